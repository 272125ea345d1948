//! `PYR1`: header `side levels`, then for each level from the finest, the LH,
//! HL and HH bands as rows of floats, one image row per line. The root
//! approximation comes last.

use std::fmt::Write;

use crate::error::{Error, FormatIssue, Result};
use crate::image::Image;
use crate::zerotree::{Band, DetailLevel, WaveletPyramid};

use super::{join_floats, parse_float, parse_usize, Lines};

pub fn write_pyramid(p: &WaveletPyramid) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "PYR1");
    let _ = writeln!(out, "{} {}", p.side(), p.depth());
    let mut emit = |img: &Image| {
        for row in img.rows() {
            let _ = writeln!(out, "{}", join_floats(row));
        }
    };
    for level in p.levels() {
        for band in Band::ALL {
            emit(level.band(band));
        }
    }
    emit(p.root());
    out
}

pub fn read_pyramid(text: &str) -> Result<WaveletPyramid> {
    let mut lines = Lines::new(text);
    lines.magic("PYR1")?;
    let (line, header) = lines.expect("the size header")?;
    let [side, levels] = header.as_slice() else {
        return Err(Error::format(
            line,
            FormatIssue::Syntax,
            "header is `<side> <levels>`",
        ));
    };
    let side = parse_usize(line, side)?;
    let levels = parse_usize(line, levels)?;
    if !side.is_power_of_two() || levels > side.trailing_zeros() as usize {
        return Err(Error::format(
            line,
            FormatIssue::Syntax,
            format!("{levels} levels do not fit side {side}"),
        ));
    }
    let mut details = Vec::with_capacity(levels);
    for l in 1..=levels {
        let n = side >> l;
        let [lh, hl, hh] = [(); 3].map(|_| read_grid(&mut lines, n));
        details.push(DetailLevel::new(lh?, hl?, hh?)?);
    }
    let root = read_grid(&mut lines, side >> levels)?;
    if let Some((line, _)) = lines.next_line() {
        return Err(Error::format(
            line,
            FormatIssue::CountMismatch,
            "rows after the root",
        ));
    }
    WaveletPyramid::new(side, details, root)
}

fn read_grid(lines: &mut Lines<'_>, n: usize) -> Result<Image> {
    let mut samples = Vec::with_capacity(n * n);
    for _ in 0..n {
        let (line, tokens) = lines.expect("a coefficient row")?;
        if tokens.len() != n {
            return Err(Error::format(
                line,
                FormatIssue::CountMismatch,
                format!("row has {} values, expected {n}", tokens.len()),
            ));
        }
        for t in tokens {
            samples.push(parse_float(line, t)?);
        }
    }
    Image::new(n, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zerotree::haar_forward;

    #[test]
    fn two_by_two_layout() {
        let img = Image::from_rows(&[&[1.0, 2.0], &[3.0, 5.0]]).unwrap();
        let p = haar_forward(&img, 1).unwrap();
        let text = write_pyramid(&p);
        assert_eq!(text, "PYR1\n2 1\n-1.5\n2.5\n-0.5\n5.5\n");
        assert_eq!(read_pyramid(&text).unwrap(), p);
    }

    #[test]
    fn round_trip_and_errors() {
        let img = Image::new(8, (0..64).map(|i| (i * i % 17) as f64 / 3.0).collect()).unwrap();
        for levels in 0..=3 {
            let p = haar_forward(&img, levels).unwrap();
            assert_eq!(read_pyramid(&write_pyramid(&p)).unwrap(), p);
        }
        assert!(read_pyramid("PYR1\n2 2\n").is_err());
        assert!(read_pyramid("PYR1\n2 1\n1\n2\n3\n").is_err());
        assert!(read_pyramid("PYR1\n2 1\n1 1\n2\n3\n4\n").is_err());
        assert!(read_pyramid("PYR1\n2 0\n1\n2\n").is_err());
    }
}
