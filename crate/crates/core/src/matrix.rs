//! Sparse square projection matrices.
//!
//! Each row keeps its nonzero entries sorted by column. Explicit zeros are
//! never stored, so the entry list doubles as the weighted edge list of the
//! matrix read as a directed graph (row = source state, column = target state).

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix {
    dim: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl ProjectionMatrix {
    pub fn zeros(dim: usize) -> Self {
        ProjectionMatrix {
            dim,
            rows: vec![Vec::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        ProjectionMatrix {
            dim,
            rows: (0..dim).map(|i| vec![(i, 1.0)]).collect(),
        }
    }

    /// Builds from `(row, col, value)` triplets; repeated positions are an error.
    pub fn from_triplets(
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut m = ProjectionMatrix::zeros(dim);
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::Structural(format!(
                    "entry ({r}, {c}) outside a {dim}x{dim} matrix"
                )));
            }
            if m.rows[r].iter().any(|&(col, _)| col == c) {
                return Err(Error::Structural(format!("duplicate entry ({r}, {c})")));
            }
            m.insert(r, c, v);
        }
        Ok(m)
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Structural("dense matrix is not square".into()));
        }
        let mut m = ProjectionMatrix::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.insert(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sets entry `(r, c)`; a zero value removes it.
    pub fn insert(&mut self, r: usize, c: usize, value: f64) {
        let row = &mut self.rows[r];
        match row.binary_search_by_key(&c, |&(col, _)| col) {
            Ok(pos) if value == 0.0 => {
                row.remove(pos);
            }
            Ok(pos) => row[pos].1 = value,
            Err(_) if value == 0.0 => {}
            Err(pos) => row.insert(pos, (c, value)),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let row = &self.rows[r];
        row.binary_search_by_key(&c, |&(col, _)| col)
            .map(|pos| row[pos].1)
            .unwrap_or(0.0)
    }

    pub fn row(&self, r: usize) -> &[(usize, f64)] {
        &self.rows[r]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.dim]; self.dim];
        for (r, c, v) in self.entries() {
            dense[r][c] = v;
        }
        dense
    }

    /// `out = self · v`. Only stored entries contribute, so selection rows copy exactly.
    pub fn mul_vec_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = sparse_dot(row, v);
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.mul_vec_into(v, &mut out);
        out
    }

    /// Row vector `u · self`.
    pub fn left_mul(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (r, row) in self.rows.iter().enumerate() {
            if u[r] == 0.0 {
                continue;
            }
            for &(c, w) in row {
                out[c] += u[r] * w;
            }
        }
        out
    }

    /// Induced infinity norm: largest absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

#[inline]
pub(crate) fn sparse_dot(row: &[(usize, f64)], v: &[f64]) -> f64 {
    row.iter().map(|&(c, w)| w * v[c]).sum()
}

/// Nonzero entries of a dense vector, as a sparse row.
pub(crate) fn sparsify(v: &[f64]) -> Vec<(usize, f64)> {
    v.iter()
        .enumerate()
        .filter(|&(_, &x)| x != 0.0)
        .map(|(i, &x)| (i, x))
        .collect()
}
