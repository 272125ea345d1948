use crate::error::{Error, FormatIssue, Result};
use crate::image::Image;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PgmEncoding {
    /// `P5`
    #[default]
    Binary,
    /// `P2`
    Ascii,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedPgm {
    pub bytes: Vec<u8>,
    /// Samples that fell outside `[0, 255]` after rounding (NaN included).
    pub clamped: usize,
}

/// Rounds half away from zero and clamps to `0..=255`, maxval 255.
pub fn write_pgm(img: &Image, encoding: PgmEncoding) -> EncodedPgm {
    let side = img.side();
    let mut clamped = 0;
    let levels: Vec<u8> = img
        .samples()
        .iter()
        .map(|&v| {
            let r = v.round();
            if (0.0..=255.0).contains(&r) {
                r as u8
            } else {
                clamped += 1;
                if r > 255.0 {
                    255
                } else {
                    0
                }
            }
        })
        .collect();
    let magic = match encoding {
        PgmEncoding::Binary => "P5",
        PgmEncoding::Ascii => "P2",
    };
    let mut bytes = format!("{magic}\n{side} {side}\n255\n").into_bytes();
    match encoding {
        PgmEncoding::Binary => bytes.extend_from_slice(&levels),
        PgmEncoding::Ascii => {
            for row in levels.chunks(side) {
                let line: Vec<String> = row.iter().map(u8::to_string).collect();
                bytes.extend_from_slice(line.join(" ").as_bytes());
                bytes.push(b'\n');
            }
        }
    }
    EncodedPgm { bytes, clamped }
}

/// Reads a `P5` or `P2` image with maxval 255 and a square power-of-two size.
pub fn read_pgm(bytes: &[u8]) -> Result<Image> {
    let mut cursor = Cursor { bytes, pos: 0 };
    let magic = bytes.get(..2).ok_or_else(|| header("missing magic"))?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        _ => return Err(Error::format(0, FormatIssue::BadMagic, "expected P5 or P2")),
    };
    cursor.pos = 2;
    let width = cursor.header_int()?;
    let height = cursor.header_int()?;
    let maxval = cursor.header_int()?;
    if maxval != 255 {
        return Err(header(&format!("maxval {maxval}, only 255 is supported")));
    }
    if width != height {
        return Err(Error::Image(format!(
            "image is {width}x{height}, not square"
        )));
    }
    if width == 0 || !width.is_power_of_two() {
        return Err(Error::Image(format!("side {width} is not a power of two")));
    }
    let count = width * height;
    let samples: Vec<f64> = if binary {
        if !cursor
            .bytes
            .get(cursor.pos)
            .is_some_and(u8::is_ascii_whitespace)
        {
            return Err(header("no whitespace after maxval"));
        }
        let start = cursor.pos + 1;
        let payload = bytes.get(start..start + count).ok_or_else(|| {
            Error::format(
                0,
                FormatIssue::Truncated,
                format!(
                    "{} of {count} samples present",
                    bytes.len().saturating_sub(start)
                ),
            )
        })?;
        payload.iter().map(|&b| b as f64).collect()
    } else {
        let text = std::str::from_utf8(&bytes[cursor.pos..])
            .map_err(|_| Error::format(0, FormatIssue::Syntax, "P2 payload is not ASCII"))?;
        let mut samples = Vec::with_capacity(count);
        for token in text.split_ascii_whitespace().take(count) {
            match token.parse::<u32>() {
                Ok(v) if v <= 255 => samples.push(v as f64),
                _ => {
                    return Err(Error::format(
                        0,
                        FormatIssue::Syntax,
                        format!("bad sample `{token}`"),
                    ))
                }
            }
        }
        if samples.len() < count {
            return Err(Error::format(
                0,
                FormatIssue::Truncated,
                format!("{} of {count} samples present", samples.len()),
            ));
        }
        samples
    };
    Image::new(width, samples)
}

fn header(msg: &str) -> Error {
    Error::format(0, FormatIssue::BadHeader, msg)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    /// Skips whitespace and comments, then reads a decimal integer.
    fn header_int(&mut self) -> Result<usize> {
        loop {
            match self.bytes.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| header("expected a header integer"))
    }
}
