//! Lossless single-fat-pixel encoding of an arbitrary image.
//!
//! The image is flattened in Morton order into one `4^m`-component fat pixel.
//! `C_q` keeps every fourth component starting at offset `q`, so each
//! projection peels off the least significant quadrant digit.

use crate::address::{QuadAddress, Quadrant};
use crate::error::{Error, Result};
use crate::image::Image;
use crate::matrix::ProjectionMatrix;
use crate::wfa::Wfa;

/// Default state limit for [`encode_exact`]: `4^8`.
pub const DEFAULT_STATE_LIMIT: usize = 1 << 16;

/// Flat index of a length-`m` address, coarsest digit most significant.
pub fn morton_index(addr: &QuadAddress, depth: usize) -> Result<usize> {
    if addr.depth() != depth {
        return Err(Error::Address(format!(
            "address {addr} has length {}, expected {depth}",
            addr.depth()
        )));
    }
    Ok(addr.digits().fold(0usize, |acc, d| (acc << 2) | d as usize))
}

pub fn morton_address(index: usize, depth: usize) -> Result<QuadAddress> {
    if depth >= usize::BITS as usize / 2 || index >> (2 * depth) != 0 {
        return Err(Error::Address(format!(
            "index {index} outside [0, 4^{depth})"
        )));
    }
    let quadrants = (0..depth)
        .rev()
        .map(|j| Quadrant::ALL[(index >> (2 * j)) & 3])
        .collect();
    Ok(QuadAddress::new(quadrants))
}

pub fn encode_exact(img: &Image) -> Result<Wfa> {
    encode_exact_with_limit(img, DEFAULT_STATE_LIMIT)
}

pub fn encode_exact_with_limit(img: &Image, state_limit: usize) -> Result<Wfa> {
    let m = img.depth();
    let n = img.side() * img.side();
    if n > state_limit {
        return Err(Error::Capacity(format!(
            "exact code of a {0}x{0} image needs {n} states (limit {state_limit})",
            img.side()
        )));
    }

    let mut initial = vec![0.0; n];
    for row in 0..img.side() {
        for col in 0..img.side() {
            let addr = QuadAddress::from_pixel(row, col, m);
            initial[morton_index(&addr, m)?] = img.get(row, col);
        }
    }

    // rows j >= 4^(m-1) stay zero; a depth-m render never reads them
    let live_rows = n / 4;
    let matrices = std::array::from_fn(|q| {
        ProjectionMatrix::from_triplets(n, (0..live_rows).map(|j| (j, 4 * j + q, 1.0)))
            .expect("selection entries are in range and distinct")
    });
    Wfa::with_visible_first(initial, matrices)
}
