//! Seeded random inputs for property checks and the command-line batch modes.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::address::{QuadAddress, Quadrant};
use crate::ifs::{QuadIfs, QuadMap};
use crate::image::Image;
use crate::matrix::ProjectionMatrix;
use crate::wfa::Wfa;
use crate::zerotree::HighPassFilter;

/// Shape of randomly drawn quadtree systems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemShape {
    pub max_maps: usize,
    pub max_range_depth: usize,
    pub max_abs_alpha: f64,
    /// Offsets are drawn from `[-max_abs_beta, max_abs_beta]`.
    pub max_abs_beta: f64,
}

impl Default for SystemShape {
    fn default() -> Self {
        SystemShape {
            max_maps: 4,
            max_range_depth: 3,
            max_abs_alpha: 0.9,
            max_abs_beta: 128.0,
        }
    }
}

pub fn random_address<R: Rng + ?Sized>(rng: &mut R, depth: usize) -> QuadAddress {
    QuadAddress::new(
        (0..depth)
            .map(|_| *Quadrant::ALL.choose(rng).expect("four quadrants"))
            .collect(),
    )
}

/// Draws a valid system with between 1 and `shape.max_maps` maps.
pub fn random_system<R: Rng + ?Sized>(rng: &mut R, shape: &SystemShape) -> QuadIfs {
    assert!(shape.max_maps >= 1 && shape.max_range_depth >= 1);
    let k = rng.gen_range(1..=shape.max_maps);
    let mut maps: Vec<QuadMap> = Vec::with_capacity(k);
    // placements are retried; a failed map slot is simply dropped
    for _ in 0..k {
        for _attempt in 0..64 {
            let depth = rng.gen_range(1..=shape.max_range_depth);
            let range = random_address(rng, depth);
            let domain = random_address(rng, depth - 1);
            let overlaps = maps
                .iter()
                .any(|m| m.range.is_prefix_of(&range) || range.is_prefix_of(&m.range));
            let domain_hit = maps
                .iter()
                .any(|m| m.range.is_prefix_of(&domain) || range.is_prefix_of(&m.domain))
                || range.is_prefix_of(&domain);
            if overlaps || domain_hit {
                continue;
            }
            let alpha = rng.gen_range(-shape.max_abs_alpha..=shape.max_abs_alpha);
            let beta = rng.gen_range(-shape.max_abs_beta..=shape.max_abs_beta);
            maps.push(QuadMap::new(domain, range, alpha, beta));
            break;
        }
    }
    let ifs = QuadIfs::new(maps);
    debug_assert!(ifs.validate().is_empty());
    ifs
}

/// Image of side `2^m` with samples uniform in `[0, 256)`.
pub fn random_image<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Image {
    let side = 1usize << m;
    let samples = (0..side * side)
        .map(|_| rng.gen_range(0.0..256.0))
        .collect();
    Image::new(side, samples).expect("power-of-two side")
}

/// Dense `n x n` matrix with entries uniform in `[-1, 1]`.
pub fn random_dense<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        .collect()
}

/// Dense random automaton with `n` states and a random output row.
pub fn random_wfa<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Wfa {
    let matrices = std::array::from_fn(|_| {
        ProjectionMatrix::from_dense(&random_dense(rng, n)).expect("square")
    });
    let initial = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let output = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    Wfa::new(initial, matrices, output).expect("consistent shapes")
}

/// Zero-sum filter: three free taps, the fourth balancing them.
pub fn random_filter<R: Rng + ?Sized>(rng: &mut R) -> HighPassFilter {
    let a: f64 = rng.gen_range(-1.0..=1.0);
    let b: f64 = rng.gen_range(-1.0..=1.0);
    let c: f64 = rng.gen_range(-1.0..=1.0);
    let d = -(a + b + c);
    HighPassFilter::new([a, b, c, d]).expect("balanced taps")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_systems_are_valid_and_reproducible() {
        let shape = SystemShape::default();
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let ifs = random_system(&mut a, &shape);
            assert!(ifs.validate().is_empty(), "{ifs:?}");
            assert!(!ifs.is_empty() && ifs.len() <= 4);
            assert!(ifs.max_range_depth() <= 3);
            assert!(ifs.max_abs_alpha() <= 0.9);
            assert_eq!(ifs, random_system(&mut b, &shape));
        }
    }
}
