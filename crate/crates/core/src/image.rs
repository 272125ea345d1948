use crate::address::{CellRect, QuadAddress};
use crate::error::{Error, Result};

/// Square grid of real samples with a power-of-two side, row-major, row 0 on top.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    side: usize,
    samples: Vec<f64>,
}

impl Image {
    pub fn new(side: usize, samples: Vec<f64>) -> Result<Self> {
        if !side.is_power_of_two() {
            return Err(Error::Image(format!("side {side} is not a power of two")));
        }
        if samples.len() != side * side {
            return Err(Error::Image(format!(
                "{} samples for a {side}x{side} image",
                samples.len()
            )));
        }
        Ok(Image { side, samples })
    }

    pub fn filled(side: usize, value: f64) -> Result<Self> {
        Image::new(side, vec![value; side * side])
    }

    /// Image of side `2^m` filled with `value`.
    pub fn uniform(m: usize, value: f64) -> Self {
        let side = 1usize << m;
        Image {
            side,
            samples: vec![value; side * side],
        }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let side = rows.len();
        if rows.iter().any(|r| r.len() != side) {
            return Err(Error::Image(
                "rows of unequal length or non-square grid".into(),
            ));
        }
        Image::new(side, rows.iter().flat_map(|r| r.iter().copied()).collect())
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// `m` such that side = 2^m.
    pub fn depth(&self) -> usize {
        self.side.trailing_zeros() as usize
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.samples[row * self.side + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.samples[row * self.side + col] = value;
    }

    /// Sample at a pixel address of length `depth()`.
    pub fn at(&self, addr: &QuadAddress) -> Result<f64> {
        if addr.depth() != self.depth() {
            return Err(Error::Address(format!(
                "pixel address of depth {} in an image of depth {}",
                addr.depth(),
                self.depth()
            )));
        }
        let cell = addr.cell(self.depth())?;
        Ok(self.get(cell.row, cell.col))
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.chunks(self.side)
    }

    /// Copy of the pixels covered by a dyadic cell.
    pub fn cell(&self, addr: &QuadAddress) -> Result<Image> {
        let rect = addr.cell(self.depth())?;
        Ok(self.crop(rect))
    }

    pub(crate) fn crop(&self, rect: CellRect) -> Image {
        let mut samples = Vec::with_capacity(rect.size * rect.size);
        for row in rect.row..rect.row + rect.size {
            let start = row * self.side + rect.col;
            samples.extend_from_slice(&self.samples[start..start + rect.size]);
        }
        Image {
            side: rect.size,
            samples,
        }
    }

    pub(crate) fn paste(&mut self, rect: CellRect, block: &Image) {
        debug_assert_eq!(rect.size, block.side);
        for (r, src) in block.rows().enumerate() {
            let start = (rect.row + r) * self.side + rect.col;
            self.samples[start..start + rect.size].copy_from_slice(src);
        }
    }

    /// Mean of all samples.
    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn max_abs_diff(&self, other: &Image) -> Result<f64> {
        if self.side != other.side {
            return Err(Error::Image(format!(
                "comparing {}x{} with {}x{}",
                self.side, self.side, other.side, other.side
            )));
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn count_nonzero(&self) -> usize {
        self.samples.iter().filter(|&&v| v != 0.0).count()
    }
}
