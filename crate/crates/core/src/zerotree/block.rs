//! Block algebra on 2x2 clusters of fat pixels.
//!
//! A cluster stacks the four fat pixels of a cell's quadrants (ordered by
//! quadrant index) into one `4n` block vector. Projecting every pixel with the
//! same `C` is the block-diagonal `diag(C, C, C, C)`; filtering the cluster is
//! `H = [I I I I]ᵀ [h0·I h1·I h2·I h3·I]`. The two commute for every `C`.

use nalgebra::{DMatrix, DVector};

use crate::address::{QuadAddress, Quadrant};
use crate::error::{Error, Result};
use crate::matrix::ProjectionMatrix;
use crate::wfa::{FatPixel, Wfa};

use super::HighPassFilter;

pub fn dense_matrix(m: &ProjectionMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(m.dim(), m.dim());
    for (r, c, v) in m.entries() {
        d[(r, c)] = v;
    }
    d
}

/// `diag(C, C, C, C)`.
pub fn block_projection(c: &DMatrix<f64>) -> DMatrix<f64> {
    let n = c.nrows();
    let mut out = DMatrix::zeros(4 * n, 4 * n);
    for b in 0..4 {
        out.view_mut((b * n, b * n), (n, n)).copy_from(c);
    }
    out
}

/// The `4n x 4n` block filter; every block row is `(h0 I, h1 I, h2 I, h3 I)`.
pub fn block_filter(h: &HighPassFilter, n: usize) -> DMatrix<f64> {
    let taps = h.taps();
    let mut out = DMatrix::zeros(4 * n, 4 * n);
    for block_row in 0..4 {
        for (block_col, &t) in taps.iter().enumerate() {
            for i in 0..n {
                out[(block_row * n + i, block_col * n + i)] = t;
            }
        }
    }
    out
}

/// Largest entry of `H · diag4(C) - diag4(C) · H`.
pub fn commutation_check(c: &DMatrix<f64>, h: &HighPassFilter) -> f64 {
    let big_c = block_projection(c);
    let big_h = block_filter(h, c.nrows());
    let diff = &big_h * &big_c - &big_c * &big_h;
    diff.amax()
}

/// Four fat pixels of one 2x2 cluster, indexed by quadrant.
#[derive(Debug, Clone, PartialEq)]
pub struct FatCluster {
    pixels: [FatPixel; 4],
}

impl FatCluster {
    pub fn new(pixels: [FatPixel; 4]) -> Result<Self> {
        let n = pixels[0].dim();
        if pixels.iter().any(|p| p.dim() != n) {
            return Err(Error::Structural(
                "cluster pixels of unequal dimension".into(),
            ));
        }
        Ok(FatCluster { pixels })
    }

    /// The cluster formed by the four quadrants of `cell`.
    pub fn of_cell(wfa: &Wfa, cell: &QuadAddress) -> Self {
        FatCluster {
            pixels: Quadrant::ALL.map(|q| wfa.state_vector(&cell.child(q))),
        }
    }

    pub fn dim(&self) -> usize {
        self.pixels[0].dim()
    }

    pub fn pixels(&self) -> &[FatPixel; 4] {
        &self.pixels
    }

    pub fn to_block_vector(&self) -> DVector<f64> {
        DVector::from_iterator(
            4 * self.dim(),
            self.pixels
                .iter()
                .flat_map(|p| p.components().iter().copied()),
        )
    }
}

/// Both orderings of a child fat wavelet coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ChildCoefficient {
    /// `H · C_{i0} ⋯ C_{ik} · F`.
    pub filter_first: DVector<f64>,
    /// `C_{i0} ⋯ C_{ik} · H · F`.
    pub filter_last: DVector<f64>,
}

impl ChildCoefficient {
    pub fn value(&self) -> &DVector<f64> {
        &self.filter_first
    }

    pub fn deviation(&self) -> f64 {
        (&self.filter_first - &self.filter_last).amax()
    }

    /// Block `b` of the coefficient (all four blocks are equal).
    pub fn block(&self, b: usize) -> Vec<f64> {
        let n = self.filter_first.len() / 4;
        self.filter_first.rows(b * n, n).iter().copied().collect()
    }
}

/// Relative agreement demanded between the two orderings.
const ORDER_TOL: f64 = 1e-12;

/// Fat coefficient of the cluster at `path · cluster_addr`, computed from the
/// cluster at `cluster_addr` by projecting with `path`'s matrices before and
/// after filtering. Fails if the two orderings disagree.
pub fn child_fat_coefficient(
    wfa: &Wfa,
    cluster_addr: &QuadAddress,
    path: &QuadAddress,
    h: &HighPassFilter,
) -> Result<ChildCoefficient> {
    let cluster = FatCluster::of_cell(wfa, cluster_addr);
    let n = cluster.dim();
    let f = cluster.to_block_vector();
    let big_h = block_filter(h, n);

    let mut product = DMatrix::<f64>::identity(4 * n, 4 * n);
    for &q in path.quadrants() {
        product *= block_projection(&dense_matrix(wfa.matrix(q)));
    }

    let filter_first = &big_h * (&product * &f);
    let filter_last = &product * (&big_h * &f);
    let coefficient = ChildCoefficient {
        filter_first,
        filter_last,
    };
    let scale = coefficient
        .filter_first
        .amax()
        .max(coefficient.filter_last.amax())
        .max(1.0);
    if coefficient.deviation() > ORDER_TOL * scale {
        return Err(Error::Structural(format!(
            "filter-first and filter-last orderings differ by {}",
            coefficient.deviation()
        )));
    }
    Ok(coefficient)
}
