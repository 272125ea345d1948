//! Quadtree addressing of dyadic cells.
//!
//! A cell of the unit square is named by the sequence of quadrants taken on the
//! way down from the whole image, coarsest choice first. Quadrants are numbered
//! 0 = lower-left, 1 = upper-left, 2 = lower-right, 3 = upper-right; every module
//! in the crate shares this numbering.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Quadrant {
    LowerLeft = 0,
    UpperLeft = 1,
    LowerRight = 2,
    UpperRight = 3,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [
        Quadrant::LowerLeft,
        Quadrant::UpperLeft,
        Quadrant::LowerRight,
        Quadrant::UpperRight,
    ];

    pub fn from_digit(digit: u8) -> Result<Self> {
        match digit {
            0 => Ok(Quadrant::LowerLeft),
            1 => Ok(Quadrant::UpperLeft),
            2 => Ok(Quadrant::LowerRight),
            3 => Ok(Quadrant::UpperRight),
            d => Err(Error::Address(format!("quadrant digit {d} outside 0..=3"))),
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    /// 1 for the right half, 0 for the left half.
    #[inline]
    pub fn col_bit(self) -> usize {
        self.index() >> 1
    }

    /// 0 for the upper half, 1 for the lower half (image rows grow downwards).
    #[inline]
    pub fn row_bit(self) -> usize {
        1 - (self.index() & 1)
    }

    pub fn from_bits(row_bit: usize, col_bit: usize) -> Self {
        Quadrant::ALL[(col_bit << 1) | (1 - row_bit)]
    }
}

/// Path from the whole image down to a dyadic cell, coarsest quadrant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct QuadAddress(Vec<Quadrant>);

impl QuadAddress {
    pub fn root() -> Self {
        QuadAddress(Vec::new())
    }

    pub fn new(quadrants: Vec<Quadrant>) -> Self {
        QuadAddress(quadrants)
    }

    pub fn from_digits(digits: &[u8]) -> Result<Self> {
        digits
            .iter()
            .map(|&d| Quadrant::from_digit(d))
            .collect::<Result<Vec<_>>>()
            .map(QuadAddress)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn quadrants(&self) -> &[Quadrant] {
        &self.0
    }

    pub fn digits(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().map(|&q| q as u8)
    }

    pub fn child(&self, q: Quadrant) -> Self {
        let mut next = self.0.clone();
        next.push(q);
        QuadAddress(next)
    }

    pub fn parent(&self) -> Option<Self> {
        let (_, head) = self.0.split_last()?;
        Some(QuadAddress(head.to_vec()))
    }

    /// Concatenation `self · tail`.
    pub fn join(&self, tail: &QuadAddress) -> Self {
        let mut next = self.0.clone();
        next.extend_from_slice(&tail.0);
        QuadAddress(next)
    }

    /// True when `self` names `other` or a cell containing it.
    pub fn is_prefix_of(&self, other: &QuadAddress) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_proper_prefix_of(&self, other: &QuadAddress) -> bool {
        self.depth() < other.depth() && self.is_prefix_of(other)
    }

    /// Remainder of `self` after removing `prefix`, if it is one.
    pub fn strip_prefix(&self, prefix: &QuadAddress) -> Option<QuadAddress> {
        self.0
            .strip_prefix(prefix.0.as_slice())
            .map(|rest| QuadAddress(rest.to_vec()))
    }

    /// Top-left pixel and side of this cell in an image of side `2^m`, `m >= depth`.
    pub fn cell(&self, m: usize) -> Result<CellRect> {
        if self.depth() > m {
            return Err(Error::Address(format!(
                "cell of depth {} is finer than a pixel at depth {m}",
                self.depth()
            )));
        }
        let mut row = 0;
        let mut col = 0;
        for &q in &self.0 {
            row = (row << 1) | q.row_bit();
            col = (col << 1) | q.col_bit();
        }
        let size = 1usize << (m - self.depth());
        Ok(CellRect {
            row: row * size,
            col: col * size,
            size,
        })
    }

    /// Address of pixel `(row, col)` in an image of side `2^m`.
    pub fn from_pixel(row: usize, col: usize, m: usize) -> Self {
        let quadrants = (0..m)
            .rev()
            .map(|bit| Quadrant::from_bits((row >> bit) & 1, (col >> bit) & 1))
            .collect();
        QuadAddress(quadrants)
    }

    /// All addresses of length `m`, in increasing Morton index order.
    pub fn enumerate(m: usize) -> impl Iterator<Item = QuadAddress> {
        (0..1usize << (2 * m)).map(move |index| {
            let quadrants = (0..m)
                .rev()
                .map(|j| Quadrant::ALL[(index >> (2 * j)) & 3])
                .collect();
            QuadAddress(quadrants)
        })
    }
}

/// Pixel rectangle occupied by a dyadic cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellRect {
    pub row: usize,
    pub col: usize,
    pub size: usize,
}

impl fmt::Display for QuadAddress {
    /// Digit string, `@` for the root.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("@");
        }
        for d in self.digits() {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for QuadAddress {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "@" {
            return Ok(QuadAddress::root());
        }
        if s.is_empty() {
            return Err(Error::Address(
                "empty address token (use @ for the root)".into(),
            ));
        }
        s.chars()
            .map(|c| match c.to_digit(10) {
                Some(d) if d < 4 => Ok(Quadrant::ALL[d as usize]),
                _ => Err(Error::Address(format!(
                    "invalid quadrant digit {c:?} in {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(QuadAddress)
    }
}

impl From<Quadrant> for QuadAddress {
    fn from(q: Quadrant) -> Self {
        QuadAddress(vec![q])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn addr(s: &str) -> QuadAddress {
        s.parse().unwrap()
    }

    #[test]
    fn quadrant_bits_match_layout() {
        // 4x4 image: lower-left quadrant occupies rows 2..4, cols 0..2
        assert_eq!(
            addr("0").cell(2).unwrap(),
            CellRect {
                row: 2,
                col: 0,
                size: 2
            }
        );
        assert_eq!(
            addr("1").cell(2).unwrap(),
            CellRect {
                row: 0,
                col: 0,
                size: 2
            }
        );
        assert_eq!(
            addr("2").cell(2).unwrap(),
            CellRect {
                row: 2,
                col: 2,
                size: 2
            }
        );
        assert_eq!(
            addr("3").cell(2).unwrap(),
            CellRect {
                row: 0,
                col: 2,
                size: 2
            }
        );
        assert_eq!(
            addr("13").cell(2).unwrap(),
            CellRect {
                row: 0,
                col: 1,
                size: 1
            }
        );
        assert_eq!(
            addr("00").cell(2).unwrap(),
            CellRect {
                row: 3,
                col: 0,
                size: 1
            }
        );
    }

    #[test]
    fn pixel_round_trip() {
        for m in 0..4 {
            let side = 1 << m;
            for row in 0..side {
                for col in 0..side {
                    let a = QuadAddress::from_pixel(row, col, m);
                    assert_eq!(a.depth(), m);
                    let cell = a.cell(m).unwrap();
                    assert_eq!((cell.row, cell.col, cell.size), (row, col, 1));
                }
            }
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(addr("@"), QuadAddress::root());
        assert_eq!(addr("0312").to_string(), "0312");
        assert_eq!(QuadAddress::root().to_string(), "@");
        assert!("04".parse::<QuadAddress>().is_err());
        assert!("".parse::<QuadAddress>().is_err());
        assert!(QuadAddress::from_digits(&[0, 4]).is_err());
    }

    #[test]
    fn child_adds_one_level() {
        let a = addr("21");
        let c = a.child(Quadrant::UpperRight);
        assert_eq!(c.depth(), a.depth() + 1);
        assert_eq!(c.parent().unwrap(), a);
        assert!(a.is_proper_prefix_of(&c));
        assert!(!c.is_prefix_of(&a));
        assert_eq!(c.strip_prefix(&a).unwrap(), addr("3"));
    }

    #[test]
    fn cell_finer_than_pixel_rejected() {
        assert!(addr("012").cell(2).is_err());
    }
}
