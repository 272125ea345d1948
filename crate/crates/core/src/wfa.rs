//! Fat-pixel automata.
//!
//! An automaton holds one vector-valued "fat" pixel and four projection
//! matrices. Projecting the whole current picture with `C_q` produces quadrant
//! `q` of a picture twice as large, so after `m` rounds the fat pixel at
//! address `a1 a2 … am` is `C_{a1} C_{a2} … C_{am} · initial` and its brightness
//! is `output · C_{a1} … C_{am} · initial`.

use crate::address::{QuadAddress, Quadrant};
use crate::error::{Error, Result};
use crate::image::Image;
use crate::matrix::{sparse_dot, sparsify, ProjectionMatrix};

/// Default cap on the number of f64 values held by the intermediate render level.
pub const DEFAULT_RENDER_FLOATS: usize = 1 << 25;

/// Deepest render ever attempted, regardless of the float budget.
pub const MAX_RENDER_DEPTH: usize = 15;

/// Full state vector of one cell; component 0 carries the visible brightness
/// under the default output functional.
#[derive(Debug, Clone, PartialEq)]
pub struct FatPixel(pub Vec<f64>);

impl FatPixel {
    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Wfa {
    initial: Vec<f64>,
    matrices: [ProjectionMatrix; 4],
    output: Vec<f64>,
}

impl Wfa {
    pub fn new(
        initial: Vec<f64>,
        matrices: [ProjectionMatrix; 4],
        output: Vec<f64>,
    ) -> Result<Self> {
        let n = initial.len();
        if n == 0 {
            return Err(Error::Structural("automaton with zero states".into()));
        }
        if output.len() != n {
            return Err(Error::Structural(format!(
                "output functional has {} entries for {n} states",
                output.len()
            )));
        }
        for (q, m) in matrices.iter().enumerate() {
            if m.dim() != n {
                return Err(Error::Structural(format!(
                    "C_{q} is {0}x{0} for {n} states",
                    m.dim()
                )));
            }
        }
        Ok(Wfa {
            initial,
            matrices,
            output,
        })
    }

    /// Automaton whose output reads component 0.
    pub fn with_visible_first(initial: Vec<f64>, matrices: [ProjectionMatrix; 4]) -> Result<Self> {
        let mut output = vec![0.0; initial.len()];
        if let Some(first) = output.first_mut() {
            *first = 1.0;
        }
        Wfa::new(initial, matrices, output)
    }

    /// Builds from dense row-major matrices.
    pub fn from_dense(initial: Vec<f64>, dense: [Vec<Vec<f64>>; 4]) -> Result<Self> {
        let [a, b, c, d] = dense;
        let matrices = [
            ProjectionMatrix::from_dense(&a)?,
            ProjectionMatrix::from_dense(&b)?,
            ProjectionMatrix::from_dense(&c)?,
            ProjectionMatrix::from_dense(&d)?,
        ];
        Wfa::with_visible_first(initial, matrices)
    }

    pub fn states(&self) -> usize {
        self.initial.len()
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn output(&self) -> &[f64] {
        &self.output
    }

    pub fn matrices(&self) -> &[ProjectionMatrix; 4] {
        &self.matrices
    }

    pub fn matrix(&self, q: Quadrant) -> &ProjectionMatrix {
        &self.matrices[q.index()]
    }

    pub fn nnz(&self) -> usize {
        self.matrices.iter().map(ProjectionMatrix::nnz).sum()
    }

    /// Brightness of a fat pixel under this automaton's output functional.
    pub fn visible(&self, pixel: &FatPixel) -> f64 {
        dot_skipping_zeros(&self.output, &pixel.0)
    }

    /// `C_{a1} … C_{am} · initial`. The finest digit's matrix is applied first.
    pub fn state_vector(&self, addr: &QuadAddress) -> FatPixel {
        let mut v = self.initial.clone();
        let mut scratch = vec![0.0; v.len()];
        for &q in addr.quadrants().iter().rev() {
            self.matrices[q.index()].mul_vec_into(&v, &mut scratch);
            std::mem::swap(&mut v, &mut scratch);
        }
        FatPixel(v)
    }

    pub fn pixel_value(&self, addr: &QuadAddress) -> f64 {
        self.visible(&self.state_vector(addr))
    }

    pub fn render(&self, depth: usize) -> Result<Image> {
        self.render_with_budget(depth, DEFAULT_RENDER_FLOATS)
    }

    /// Renders a `2^depth` image by whole-array projection.
    ///
    /// Level `k+1` is built from level `k` by writing `C_q · pixel` into
    /// quadrant `q` for every fat pixel. The last level only needs brightness,
    /// so it uses the precomputed rows `output · C_q` instead of full vectors.
    pub fn render_with_budget(&self, depth: usize, max_floats: usize) -> Result<Image> {
        if depth > MAX_RENDER_DEPTH {
            return Err(Error::Capacity(format!(
                "render depth {depth} exceeds the maximum {MAX_RENDER_DEPTH}"
            )));
        }
        let n = self.states();
        if depth == 0 {
            return Image::new(1, vec![dot_skipping_zeros(&self.output, &self.initial)]);
        }
        let penultimate = 1usize << (2 * (depth - 1));
        let needed = penultimate
            .checked_mul(n)
            .and_then(|f| f.checked_mul(2))
            .ok_or_else(|| Error::Capacity("render size overflows".into()))?;
        if needed > max_floats {
            return Err(Error::Capacity(format!(
                "depth {depth} render of a {n}-state automaton needs {needed} floats (limit {max_floats})"
            )));
        }

        // level-k fat pixels, row-major over a 2^k grid
        let mut level = self.initial.clone();
        let mut side = 1usize;
        for _ in 1..depth {
            let next_side = side * 2;
            let mut next = vec![0.0; next_side * next_side * n];
            for q in Quadrant::ALL {
                let (row_off, col_off) = (q.row_bit() * side, q.col_bit() * side);
                let m = &self.matrices[q.index()];
                for r in 0..side {
                    for c in 0..side {
                        let src = &level[(r * side + c) * n..][..n];
                        let dst_idx = ((r + row_off) * next_side + c + col_off) * n;
                        m.mul_vec_into(src, &mut next[dst_idx..dst_idx + n]);
                    }
                }
            }
            level = next;
            side = next_side;
        }

        let readout: Vec<Vec<(usize, f64)>> = self
            .matrices
            .iter()
            .map(|m| sparsify(&m.left_mul(&self.output)))
            .collect();
        let out_side = side * 2;
        let mut samples = vec![0.0; out_side * out_side];
        for q in Quadrant::ALL {
            let (row_off, col_off) = (q.row_bit() * side, q.col_bit() * side);
            let row_q = &readout[q.index()];
            for r in 0..side {
                for c in 0..side {
                    let src = &level[(r * side + c) * n..][..n];
                    samples[(r + row_off) * out_side + c + col_off] = sparse_dot(row_q, src);
                }
            }
        }
        Image::new(out_side, samples)
    }

    pub fn check_contractivity(&self) -> ContractivityReport {
        self.check_contractivity_with(DEFAULT_CONTRACTIVITY_TOL)
    }

    /// Sufficient test for non-expansion: every `C_q` has induced ∞-norm ≤ 1 + tol.
    pub fn check_contractivity_with(&self, tol: f64) -> ContractivityReport {
        let norms = [
            self.matrices[0].inf_norm(),
            self.matrices[1].inf_norm(),
            self.matrices[2].inf_norm(),
            self.matrices[3].inf_norm(),
        ];
        let verdict = if norms.iter().all(|&norm| norm <= 1.0 + tol) {
            Contractivity::NonExpanding
        } else {
            Contractivity::Inconclusive
        };
        ContractivityReport { norms, verdict }
    }
}

pub const DEFAULT_CONTRACTIVITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contractivity {
    /// All four induced norms are at most one.
    NonExpanding,
    /// Some norm exceeds one; the joint spectral radius may still be below one.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractivityReport {
    pub norms: [f64; 4],
    pub verdict: Contractivity,
}

impl ContractivityReport {
    pub fn passed(&self) -> bool {
        self.verdict == Contractivity::NonExpanding
    }
}

fn dot_skipping_zeros(weights: &[f64], v: &[f64]) -> f64 {
    weights
        .iter()
        .zip(v)
        .filter(|(&w, _)| w != 0.0)
        .map(|(w, x)| w * x)
        .sum()
}

/// The automaton of the Sierpinski gasket: one state, `C_0 = C_1 = C_2 = 1`, `C_3 = 0`.
pub fn sierpinski() -> Wfa {
    let one = || ProjectionMatrix::identity(1);
    Wfa::with_visible_first(vec![1.0], [one(), one(), one(), ProjectionMatrix::zeros(1)])
        .expect("well-formed")
}

/// Two-state diagonal grey ramp with fat pixel (128, 256).
pub fn diagonal_ramp() -> Wfa {
    Wfa::from_dense(
        vec![128.0, 256.0],
        [
            vec![vec![0.5, 0.5], vec![0.0, 1.0]],
            vec![vec![0.5, 0.25], vec![0.0, 1.0]],
            vec![vec![0.5, 0.25], vec![0.0, 1.0]],
            vec![vec![0.5, 0.0], vec![0.0, 1.0]],
        ],
    )
    .expect("well-formed")
}
