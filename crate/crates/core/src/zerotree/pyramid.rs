use crate::address::Quadrant;
use crate::error::{Error, Result};
use crate::image::Image;

use super::Band;

/// Three detail bands of one decomposition level.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailLevel {
    bands: [Image; 3],
}

impl DetailLevel {
    pub fn new(lh: Image, hl: Image, hh: Image) -> Result<Self> {
        if lh.side() != hl.side() || lh.side() != hh.side() {
            return Err(Error::Structural("detail bands of unequal size".into()));
        }
        Ok(DetailLevel {
            bands: [lh, hl, hh],
        })
    }

    pub fn band(&self, band: Band) -> &Image {
        &self.bands[band.index()]
    }

    pub fn band_mut(&mut self, band: Band) -> &mut Image {
        &mut self.bands[band.index()]
    }

    pub fn side(&self) -> usize {
        self.bands[0].side()
    }
}

/// Orthonormal 2D Haar decomposition. `levels[0]` is level 1, the finest.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletPyramid {
    side: usize,
    levels: Vec<DetailLevel>,
    root: Image,
}

impl WaveletPyramid {
    pub fn new(side: usize, levels: Vec<DetailLevel>, root: Image) -> Result<Self> {
        if !side.is_power_of_two() {
            return Err(Error::Structural(format!(
                "pyramid side {side} is not a power of two"
            )));
        }
        for (i, level) in levels.iter().enumerate() {
            if level.side() << (i + 1) != side {
                return Err(Error::Structural(format!(
                    "level {} has side {}, expected {}",
                    i + 1,
                    level.side(),
                    side >> (i + 1)
                )));
            }
        }
        if root.side() << levels.len() != side {
            return Err(Error::Structural(
                "root approximation has the wrong size".into(),
            ));
        }
        Ok(WaveletPyramid { side, levels, root })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Detail level `l`, 1-based; level 1 is the finest.
    pub fn level(&self, l: usize) -> &DetailLevel {
        &self.levels[l - 1]
    }

    pub fn level_mut(&mut self, l: usize) -> &mut DetailLevel {
        &mut self.levels[l - 1]
    }

    pub fn levels(&self) -> &[DetailLevel] {
        &self.levels
    }

    pub fn root(&self) -> &Image {
        &self.root
    }
}

/// Value at quadrant `q` of the 2x2 cluster whose top-left pixel is `(2r, 2c)`.
fn cluster(img: &Image, r: usize, c: usize) -> [f64; 4] {
    Quadrant::ALL.map(|q| img.get(2 * r + q.row_bit(), 2 * c + q.col_bit()))
}

pub fn haar_forward(img: &Image, levels: usize) -> Result<WaveletPyramid> {
    if levels > img.depth() {
        return Err(Error::Image(format!(
            "{levels} levels requested for a {0}x{0} image",
            img.side()
        )));
    }
    let filters = Band::ALL.map(Band::filter);
    let mut approx = img.clone();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let half = approx.side() / 2;
        let mut next = Image::filled(half, 0.0)?;
        let mut bands = [
            Image::filled(half, 0.0)?,
            Image::filled(half, 0.0)?,
            Image::filled(half, 0.0)?,
        ];
        for r in 0..half {
            for c in 0..half {
                let x = cluster(&approx, r, c);
                next.set(r, c, 0.5 * (x[0] + x[1] + x[2] + x[3]));
                for (band, f) in bands.iter_mut().zip(&filters) {
                    band.set(r, c, f.apply(x));
                }
            }
        }
        let [lh, hl, hh] = bands;
        details.push(DetailLevel::new(lh, hl, hh)?);
        approx = next;
    }
    WaveletPyramid::new(img.side(), details, approx)
}

pub fn haar_inverse(p: &WaveletPyramid) -> Result<Image> {
    let filters = Band::ALL.map(Band::filter);
    let mut approx = p.root().clone();
    for level in p.levels().iter().rev() {
        let half = approx.side();
        let mut out = Image::filled(half * 2, 0.0)?;
        for r in 0..half {
            for c in 0..half {
                let a = approx.get(r, c);
                let d = Band::ALL.map(|b| level.band(b).get(r, c));
                for q in Quadrant::ALL {
                    let mut v = 0.5 * a;
                    for (f, coef) in filters.iter().zip(d) {
                        v += f.taps()[q.index()] * coef;
                    }
                    out.set(2 * r + q.row_bit(), 2 * c + q.col_bit(), v);
                }
            }
        }
        approx = out;
    }
    Ok(approx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp() -> Image {
        Image::from_rows(&[
            &[128.0, 96.0, 64.0, 32.0],
            &[160.0, 128.0, 96.0, 64.0],
            &[192.0, 160.0, 128.0, 96.0],
            &[224.0, 192.0, 160.0, 128.0],
        ])
        .unwrap()
    }

    #[test]
    fn constant_image_has_no_detail() {
        let p = haar_forward(&Image::uniform(3, 42.0), 3).unwrap();
        for level in p.levels() {
            for b in Band::ALL {
                assert!(level.band(b).samples().iter().all(|&v| v == 0.0));
            }
        }
        assert_eq!(p.root().samples(), &[42.0 * 8.0]);
    }

    #[test]
    fn affine_ramp_details() {
        let p = haar_forward(&ramp(), 2).unwrap();
        for (i, level) in p.levels().iter().enumerate() {
            assert!(level.band(Band::Hh).samples().iter().all(|&v| v == 0.0));
            for b in [Band::Lh, Band::Hl] {
                let s = level.band(b).samples();
                assert!(s.iter().all(|&v| v == s[0]), "level {} {b}", i + 1);
            }
        }
        // top-left cluster: LH = (LL + UL - LR - UR)/2 = (160 + 128 - 128 - 96)/2
        assert_eq!(p.level(1).band(Band::Lh).get(0, 0), 32.0);
        assert_eq!(p.level(1).band(Band::Hl).get(0, 0), 32.0);
    }

    #[test]
    fn perfect_reconstruction() {
        let img = Image::new(8, (0..64).map(|i| ((i * 37) % 11) as f64 - 3.5).collect()).unwrap();
        for levels in 0..=3 {
            let back = haar_inverse(&haar_forward(&img, levels).unwrap()).unwrap();
            assert!(back.max_abs_diff(&img).unwrap() < 1e-12);
        }
    }

    #[test]
    fn too_many_levels() {
        assert!(haar_forward(&Image::uniform(2, 0.0), 3).is_err());
    }
}
