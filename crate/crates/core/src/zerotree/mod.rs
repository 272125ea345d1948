//! Haar pyramids, block filters over fat pixels, and zerotree detection.

mod block;
mod certificate;
mod pyramid;
mod scan;

pub use block::{
    block_filter, block_projection, child_fat_coefficient, commutation_check, dense_matrix,
    ChildCoefficient, FatCluster,
};
pub use certificate::{theorem_certificate, CertificateOptions, CertificateReport};
pub use pyramid::{haar_forward, haar_inverse, DetailLevel, WaveletPyramid};
pub use scan::{zerotree_scan, ZerotreeViolation};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Detail band of the 2D Haar transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Band {
    Lh,
    Hl,
    Hh,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::Lh, Band::Hl, Band::Hh];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn filter(self) -> HighPassFilter {
        let taps = match self {
            Band::Hh => [0.5, -0.5, -0.5, 0.5],
            Band::Lh => [0.5, 0.5, -0.5, -0.5],
            Band::Hl => [0.5, -0.5, 0.5, -0.5],
        };
        HighPassFilter { taps }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Band::Lh => "LH",
            Band::Hl => "HL",
            Band::Hh => "HH",
        })
    }
}

impl FromStr for Band {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "LH" => Ok(Band::Lh),
            "HL" => Ok(Band::Hl),
            "HH" => Ok(Band::Hh),
            other => Err(Error::Structural(format!(
                "unknown band {other:?} (LH, HL, HH)"
            ))),
        }
    }
}

/// Four taps over a 2x2 cluster, positioned by quadrant (LL, UL, LR, UR), summing to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighPassFilter {
    taps: [f64; 4],
}

/// Zero-sum tolerance, relative to the largest tap.
const ZERO_SUM_TOL: f64 = 1e-12;

impl HighPassFilter {
    pub fn new(taps: [f64; 4]) -> Result<Self> {
        let scale = taps.iter().fold(0.0f64, |m, t| m.max(t.abs())).max(1.0);
        let sum: f64 = taps.iter().sum();
        if !taps.iter().all(|t| t.is_finite()) || sum.abs() > ZERO_SUM_TOL * scale {
            return Err(Error::Structural(format!(
                "filter taps {taps:?} sum to {sum}, not zero"
            )));
        }
        Ok(HighPassFilter { taps })
    }

    pub fn taps(&self) -> [f64; 4] {
        self.taps
    }

    /// Filter applied to the four values of a cluster, indexed by quadrant.
    pub fn apply(&self, values: [f64; 4]) -> f64 {
        self.taps.iter().zip(values).map(|(h, v)| h * v).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn built_in_filters_are_zero_sum_and_orthonormal() {
        let rows: Vec<[f64; 4]> = Band::ALL.iter().map(|b| b.filter().taps()).collect();
        for (i, a) in rows.iter().enumerate() {
            assert_eq!(a.iter().sum::<f64>(), 0.0);
            for (j, b) in rows.iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                assert_eq!(dot, if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn non_zero_sum_rejected() {
        assert!(HighPassFilter::new([0.25; 4]).is_err());
        assert!(HighPassFilter::new([1.0, -1.0, 2.0, -2.0]).is_ok());
    }

    #[test]
    fn band_names() {
        for b in Band::ALL {
            assert_eq!(b.to_string().parse::<Band>().unwrap(), b);
        }
        assert!("LL".parse::<Band>().is_err());
    }
}
