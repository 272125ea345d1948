use crate::convert::convert;
use crate::error::{Error, Result};
use crate::ifs::{GainCheck, QuadIfs};

use super::{haar_forward, zerotree_scan, Band, ZerotreeViolation};

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateOptions {
    pub bands: Vec<Band>,
    pub y0: f64,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions {
            bands: Band::ALL.to_vec(),
            y0: 128.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub passed: bool,
    pub depth: usize,
    pub tau: f64,
    pub slack: f64,
    /// `max|alpha|^m` times the dynamic range of the render; how far the
    /// iterate may still be from the attractor.
    pub residual_bound: f64,
    pub violations: Vec<ZerotreeViolation>,
}

/// Renders the system at depth `m` and looks for zerotree violations among the
/// Haar coefficients of the selected bands.
pub fn theorem_certificate(
    ifs: &QuadIfs,
    m: usize,
    tau: f64,
    options: &CertificateOptions,
) -> Result<CertificateReport> {
    ifs.ensure_valid(GainCheck::Lenient)?;
    if ifs.max_abs_alpha() > 1.0 {
        return Err(Error::Precondition(format!(
            "expanding system: max |alpha| = {}",
            ifs.max_abs_alpha()
        )));
    }
    let img = convert(ifs, options.y0)?.render(m)?;
    let pyramid = haar_forward(&img, m)?;
    let (lo, hi) = img
        .samples()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let residual_bound = ifs.max_abs_alpha().powi(m as i32) * (hi - lo).max(options.y0.abs());
    // parent and descendants share one threshold
    let slack = 0.0;
    let violations = zerotree_scan(&pyramid, tau, &options.bands, slack);
    Ok(CertificateReport {
        passed: violations.is_empty(),
        depth: m,
        tau,
        slack,
        residual_bound,
        violations,
    })
}
