use crate::image::Image;

use super::{Band, WaveletPyramid};

/// An insignificant coefficient with a significant descendant in the same band.
#[derive(Debug, Clone, PartialEq)]
pub struct ZerotreeViolation {
    /// Pyramid level of the parent, 1 = finest.
    pub level: usize,
    pub row: usize,
    pub col: usize,
    pub band: Band,
    pub parent_magnitude: f64,
    pub max_descendant: f64,
}

/// Finds every coefficient with `|c| <= tau` that has a descendant above
/// `tau · (1 + slack)`.
pub fn zerotree_scan(
    p: &WaveletPyramid,
    tau: f64,
    bands: &[Band],
    slack: f64,
) -> Vec<ZerotreeViolation> {
    let limit = tau * (1.0 + slack);
    let mut violations = Vec::new();
    for &band in bands {
        // largest descendant magnitude for every coefficient of the current level
        let mut below: Option<Vec<f64>> = None;
        for l in 1..=p.depth() {
            let coeffs = p.level(l).band(band);
            let side = coeffs.side();
            let desc = match &below {
                None => vec![0.0; side * side],
                Some(finer) => descendant_max(p.level(l - 1).band(band), finer, side),
            };
            for row in 0..side {
                for col in 0..side {
                    let parent = coeffs.get(row, col).abs();
                    let worst = desc[row * side + col];
                    if parent <= tau && worst > limit {
                        violations.push(ZerotreeViolation {
                            level: l,
                            row,
                            col,
                            band,
                            parent_magnitude: parent,
                            max_descendant: worst,
                        });
                    }
                }
            }
            below = Some(desc);
        }
    }
    violations
}

/// For each coefficient of a level of side `side`, the largest magnitude among
/// its four children and all of their descendants.
fn descendant_max(children: &Image, child_desc: &[f64], side: usize) -> Vec<f64> {
    let child_side = children.side();
    let mut out = vec![0.0f64; side * side];
    for row in 0..side {
        for col in 0..side {
            let mut m = 0.0f64;
            for dr in 0..2 {
                for dc in 0..2 {
                    let (r, c) = (2 * row + dr, 2 * col + dc);
                    m = m
                        .max(children.get(r, c).abs())
                        .max(child_desc[r * child_side + c]);
                }
            }
            out[row * side + col] = m;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Image;
    use crate::zerotree::{haar_forward, haar_inverse};

    #[test]
    fn constant_image_is_clean_at_any_threshold() {
        let p = haar_forward(&Image::uniform(4, 3.0), 4).unwrap();
        for tau in [0.0, 1e-9, 1.0, 100.0] {
            assert!(zerotree_scan(&p, tau, &Band::ALL, 0.0).is_empty());
        }
    }

    #[test]
    fn single_finest_coefficient_is_caught_once() {
        let mut p = haar_forward(&Image::uniform(2, 0.0), 2).unwrap();
        p.level_mut(1).band_mut(Band::Hh).set(1, 0, 5.0);
        let img = haar_inverse(&p).unwrap();
        let v = zerotree_scan(&haar_forward(&img, 2).unwrap(), 0.0, &Band::ALL, 0.0);
        assert_eq!(v.len(), 1);
        assert_eq!(
            (v[0].level, v[0].row, v[0].col, v[0].band),
            (2, 0, 0, Band::Hh)
        );
        assert!((v[0].max_descendant - 5.0).abs() < 1e-12);
    }

    #[test]
    fn every_insignificant_ancestor_is_reported() {
        let mut p = haar_forward(&Image::uniform(3, 0.0), 3).unwrap();
        p.level_mut(1).band_mut(Band::Lh).set(3, 2, 1.0);
        let v = zerotree_scan(&p, 0.5, &[Band::Lh], 0.0);
        let at: Vec<_> = v.iter().map(|v| (v.level, v.row, v.col)).collect();
        assert_eq!(at, vec![(2, 1, 1), (3, 0, 0)]);
        assert!(zerotree_scan(&p, 0.5, &[Band::Hl, Band::Hh], 0.0).is_empty());
        // enough slack hides it
        assert!(zerotree_scan(&p, 0.5, &[Band::Lh], 1.0).is_empty());
    }
}
