//! Quadtree-aligned iterated function systems and their grid decoder.
//!
//! Each map squeezes a dyadic domain cell into a range cell one level deeper
//! and applies `alpha · x + beta` to the brightness. One decoding step clears
//! the plane to zero and writes every range from the previous image.

use std::fmt;

use crate::address::QuadAddress;
use crate::error::{Error, Result};
use crate::image::Image;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadMap {
    pub domain: QuadAddress,
    pub range: QuadAddress,
    pub alpha: f64,
    pub beta: f64,
}

impl QuadMap {
    pub fn new(domain: QuadAddress, range: QuadAddress, alpha: f64, beta: f64) -> Self {
        QuadMap {
            domain,
            range,
            alpha,
            beta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct QuadIfs {
    pub maps: Vec<QuadMap>,
}

/// How strictly gains are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GainCheck {
    /// `|alpha| <= 1` is required.
    #[default]
    Strict,
    /// Any finite gain is accepted.
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// Range is not exactly one level below its domain.
    RangeDepth,
    /// Two ranges overlap (one is a prefix of the other).
    OverlappingRanges,
    /// A domain coincides with or lies inside some range.
    DomainInsideRange,
    /// `|alpha| > 1` under the strict gain check.
    ExpandingGain,
    /// Gain or offset is NaN or infinite.
    NonFinite,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::RangeDepth => "range must be exactly one level deeper than its domain",
            Rule::OverlappingRanges => "ranges overlap",
            Rule::DomainInsideRange => "domain lies inside or on a range",
            Rule::ExpandingGain => "|alpha| exceeds 1",
            Rule::NonFinite => "non-finite coefficient",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    /// Offending map index and, for pairwise rules, the other map involved.
    pub map: usize,
    pub other: Option<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.other {
            Some(other) => write!(f, "maps {} and {}: {}", self.map, other, self.rule),
            None => write!(f, "map {}: {}", self.map, self.rule),
        }
    }
}

impl QuadIfs {
    pub fn new(maps: Vec<QuadMap>) -> Self {
        QuadIfs { maps }
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn validate(&self) -> Vec<Violation> {
        self.validate_with(GainCheck::Strict)
    }

    /// Lists every violated invariant; an empty list means the system is valid.
    pub fn validate_with(&self, gains: GainCheck) -> Vec<Violation> {
        let mut violations = Vec::new();
        let single = |rule, map| Violation {
            rule,
            map,
            other: None,
        };
        for (i, map) in self.maps.iter().enumerate() {
            if !map.alpha.is_finite() || !map.beta.is_finite() {
                violations.push(single(Rule::NonFinite, i));
            } else if gains == GainCheck::Strict && map.alpha.abs() > 1.0 {
                violations.push(single(Rule::ExpandingGain, i));
            }
            if map.range.depth() != map.domain.depth() + 1 {
                violations.push(single(Rule::RangeDepth, i));
            }
        }
        for (i, a) in self.maps.iter().enumerate() {
            for (j, b) in self.maps.iter().enumerate().skip(i + 1) {
                if a.range.is_prefix_of(&b.range) || b.range.is_prefix_of(&a.range) {
                    violations.push(Violation {
                        rule: Rule::OverlappingRanges,
                        map: i,
                        other: Some(j),
                    });
                }
            }
        }
        for (i, a) in self.maps.iter().enumerate() {
            for (j, b) in self.maps.iter().enumerate() {
                if b.range.is_prefix_of(&a.domain) {
                    violations.push(Violation {
                        rule: Rule::DomainInsideRange,
                        map: i,
                        other: Some(j),
                    });
                }
            }
        }
        violations
    }

    pub fn ensure_valid(&self, gains: GainCheck) -> Result<()> {
        let violations = self.validate_with(gains);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidIfs(violations))
        }
    }

    /// Depth of the deepest range; 0 for the empty system.
    pub fn max_range_depth(&self) -> usize {
        self.maps.iter().map(|m| m.range.depth()).max().unwrap_or(0)
    }

    pub fn max_abs_alpha(&self) -> f64 {
        self.maps.iter().map(|m| m.alpha.abs()).fold(0.0, f64::max)
    }

    /// Map whose range equals or contains `addr`.
    pub fn covering_map(&self, addr: &QuadAddress) -> Option<&QuadMap> {
        self.maps.iter().find(|m| m.range.is_prefix_of(addr))
    }

    /// True when `addr` is a proper prefix of some range.
    pub fn splits(&self, addr: &QuadAddress) -> bool {
        self.maps.iter().any(|m| addr.is_proper_prefix_of(&m.range))
    }
}

/// Halves the side by averaging each 2x2 block.
pub fn downsample2(img: &Image) -> Result<Image> {
    let side = img.side();
    if side < 2 {
        return Err(Error::Image("cannot downsample a 1x1 image".into()));
    }
    let half = side / 2;
    let mut out = Vec::with_capacity(half * half);
    for r in 0..half {
        for c in 0..half {
            let sum = img.get(2 * r, 2 * c)
                + img.get(2 * r, 2 * c + 1)
                + img.get(2 * r + 1, 2 * c)
                + img.get(2 * r + 1, 2 * c + 1);
            out.push(sum / 4.0);
        }
    }
    Image::new(half, out)
}

/// One decoding step: clear to zero, then write `alpha · squeeze(domain) + beta`
/// into every range.
pub fn ifs_step(ifs: &QuadIfs, img: &Image) -> Result<Image> {
    let m = img.depth();
    if ifs.max_range_depth() > m {
        return Err(Error::Precondition(format!(
            "range of depth {} is finer than a pixel of a {}x{} image",
            ifs.max_range_depth(),
            img.side(),
            img.side()
        )));
    }
    let mut out = Image::uniform(m, 0.0);
    for map in &ifs.maps {
        let mut block = downsample2(&img.cell(&map.domain)?)?;
        for x in block.samples_mut() {
            *x = map.alpha * *x + map.beta;
        }
        out.paste(map.range.cell(m)?, &block);
    }
    Ok(out)
}

/// Iterates [`ifs_step`] `iters` times from a uniform `y0` image of side `2^m`.
pub fn ifs_decode(ifs: &QuadIfs, m: usize, iters: usize, y0: f64) -> Result<Image> {
    ifs.ensure_valid(GainCheck::Lenient)?;
    if ifs.max_range_depth() > m {
        return Err(Error::Precondition(format!(
            "depth {m} is too coarse for ranges of depth {}",
            ifs.max_range_depth()
        )));
    }
    let mut img = Image::uniform(m, y0);
    for _ in 0..iters {
        img = ifs_step(ifs, &img)?;
    }
    Ok(img)
}

/// The four-quadrant system with a single whole-image domain.
pub fn four_quadrant(alphas: [f64; 4], betas: [f64; 4]) -> QuadIfs {
    QuadIfs::new(
        crate::address::Quadrant::ALL
            .iter()
            .map(|&q| {
                QuadMap::new(
                    QuadAddress::root(),
                    q.into(),
                    alphas[q.index()],
                    betas[q.index()],
                )
            })
            .collect(),
    )
}

/// Four-quadrant system whose attractor is the diagonal grey ramp.
pub fn ramp_system() -> QuadIfs {
    four_quadrant([0.5; 4], [128.0, 64.0, 64.0, 0.0])
}

/// Four-quadrant system whose iterates are Sierpinski indicators.
pub fn sierpinski_system() -> QuadIfs {
    four_quadrant([1.0, 1.0, 1.0, 0.0], [0.0; 4])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn addr(s: &str) -> QuadAddress {
        s.parse().unwrap()
    }

    fn map(d: &str, r: &str, alpha: f64, beta: f64) -> QuadMap {
        QuadMap::new(addr(d), addr(r), alpha, beta)
    }

    #[test]
    fn four_quadrant_system_is_valid() {
        assert!(ramp_system().validate().is_empty());
        assert!(sierpinski_system().validate().is_empty());
    }

    #[test]
    fn duplicate_ranges_violate_disjointness() {
        let ifs = QuadIfs::new(vec![map("0", "03", 0.5, 0.0), map("1", "03", 0.5, 0.0)]);
        let v = ifs.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::OverlappingRanges);
        assert_eq!((v[0].map, v[0].other), (0, Some(1)));
    }

    #[test]
    fn range_must_be_one_level_deeper() {
        let ifs = QuadIfs::new(vec![map("031", "03", 0.5, 0.0)]);
        let rules: Vec<_> = ifs.validate().iter().map(|v| v.rule).collect();
        assert!(rules.contains(&Rule::RangeDepth));
    }

    #[test]
    fn domain_inside_or_on_range_rejected() {
        let inside = QuadIfs::new(vec![map("01", "012", 0.5, 0.0), map("2", "01", 0.5, 0.0)]);
        assert!(inside
            .validate()
            .iter()
            .any(|v| v.rule == Rule::DomainInsideRange));
        let equal = QuadIfs::new(vec![map("1", "01", 0.5, 0.0), map("2", "1", 0.5, 0.0)]);
        assert!(equal
            .validate()
            .iter()
            .any(|v| v.rule == Rule::DomainInsideRange));
    }

    #[test]
    fn gain_check_strictness() {
        let ifs = QuadIfs::new(vec![map("@", "0", 1.5, 0.0)]);
        assert_eq!(ifs.validate()[0].rule, Rule::ExpandingGain);
        assert!(ifs.validate_with(GainCheck::Lenient).is_empty());
        let nan = QuadIfs::new(vec![map("@", "0", f64::NAN, 0.0)]);
        assert_eq!(
            nan.validate_with(GainCheck::Lenient)[0].rule,
            Rule::NonFinite
        );
    }

    #[test]
    fn downsample_examples() {
        let img = Image::from_rows(&[&[1.0, 2.0], &[3.0, 6.0]]).unwrap();
        assert_eq!(downsample2(&img).unwrap().samples(), &[3.0]);
        assert_eq!(
            downsample2(&Image::uniform(3, 5.0)).unwrap(),
            Image::uniform(2, 5.0)
        );
        let ramp = Image::from_rows(&[
            &[128.0, 96.0, 64.0, 32.0],
            &[160.0, 128.0, 96.0, 64.0],
            &[192.0, 160.0, 128.0, 96.0],
            &[224.0, 192.0, 160.0, 128.0],
        ])
        .unwrap();
        assert_eq!(
            downsample2(&ramp).unwrap().samples(),
            &[128.0, 64.0, 192.0, 128.0]
        );
        assert!(downsample2(&Image::uniform(0, 1.0)).is_err());
    }

    #[test]
    fn one_step_on_uniform_image() {
        let (a, b) = ([0.25, 0.5, -0.5, 0.75], [1.0, 2.0, 3.0, 4.0]);
        let ifs = four_quadrant(a, b);
        let y = 8.0;
        let out = ifs_step(&ifs, &Image::uniform(2, y)).unwrap();
        for q in crate::address::Quadrant::ALL {
            let cell = out.cell(&q.into()).unwrap();
            let want = a[q.index()] * y + b[q.index()];
            assert!(cell.samples().iter().all(|&v| v == want));
        }
        // second step: quadrant (q, r) = a_q (a_r y + b_r) + b_q
        let twice = ifs_step(&ifs, &out).unwrap();
        for q in crate::address::Quadrant::ALL {
            for r in crate::address::Quadrant::ALL {
                let cell = twice.cell(&QuadAddress::new(vec![q, r])).unwrap();
                let want = a[q.index()] * (a[r.index()] * y + b[r.index()]) + b[q.index()];
                assert!(cell.samples().iter().all(|&v| v == want));
            }
        }
    }

    #[test]
    fn single_map_clears_everything_else() {
        let ifs = QuadIfs::new(vec![map("0", "03", 0.5, 10.0)]);
        let out = ifs_step(&ifs, &Image::uniform(2, 6.0)).unwrap();
        for row in 0..4 {
            for col in 0..4 {
                let want = if (row, col) == (2, 1) { 13.0 } else { 0.0 };
                assert_eq!(out.get(row, col), want);
            }
        }
    }

    #[test]
    fn too_coarse_for_range() {
        let ifs = QuadIfs::new(vec![map("0", "03", 0.5, 10.0)]);
        assert!(matches!(
            ifs_step(&ifs, &Image::uniform(1, 0.0)),
            Err(Error::Precondition(_))
        ));
        assert!(ifs_decode(&ifs, 1, 1, 0.0).is_err());
    }

    #[test]
    fn decode_ramp_and_zero_iterations() {
        let img = ifs_decode(&ramp_system(), 2, 2, 128.0).unwrap();
        assert_eq!(img, crate::wfa::diagonal_ramp().render(2).unwrap());
        assert_eq!(
            ifs_decode(&ramp_system(), 3, 0, 7.0).unwrap(),
            Image::uniform(3, 7.0)
        );
    }

    #[test]
    fn sierpinski_census() {
        for m in 1..=6 {
            let img = ifs_decode(&sierpinski_system(), m, m, 1.0).unwrap();
            assert_eq!(img.count_nonzero(), 3usize.pow(m as u32));
        }
    }
}
