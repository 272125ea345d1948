//! Text formats for automata (`WFA1`), quadtree systems (`IFS1`) and Haar
//! pyramids (`PYR1`), plus PGM images.
//!
//! Both text formats are line oriented. `#` starts a comment that runs to the
//! end of the line and blank lines are ignored. Floats are written with the
//! shortest representation that parses back to the same value.

mod ifs_file;
mod pgm;
mod pyramid_file;
mod wfa_file;

pub use ifs_file::{read_ifs, write_ifs};
pub use pgm::{read_pgm, write_pgm, EncodedPgm, PgmEncoding};
pub use pyramid_file::{read_pyramid, write_pyramid};
pub use wfa_file::{read_wfa, write_wfa, Layout};

use crate::error::{Error, FormatIssue, Result};

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    fn next_line(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let body = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if !tokens.is_empty() {
                return Some((i + 1, tokens));
            }
        }
        None
    }

    /// Next line, or a count error pointing past the end of the input.
    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        self.next_line().ok_or_else(|| {
            Error::format(
                self.last + 1,
                FormatIssue::CountMismatch,
                format!("input ended before {what}"),
            )
        })
    }

    fn magic(&mut self, magic: &str) -> Result<()> {
        match self.next_line() {
            Some((_, t)) if t == [magic] => Ok(()),
            Some((line, t)) => Err(Error::format(
                line,
                FormatIssue::BadMagic,
                format!("expected `{magic}`, found `{}`", t.join(" ")),
            )),
            None => Err(Error::format(
                1,
                FormatIssue::BadMagic,
                format!("expected `{magic}`"),
            )),
        }
    }

    /// A `keyword <values...>` line; returns the values.
    fn keyword(&mut self, key: &str) -> Result<(usize, Vec<&'a str>)> {
        let (line, tokens) = self.expect(&format!("`{key}`"))?;
        if tokens[0] != key {
            return Err(Error::format(
                line,
                FormatIssue::Syntax,
                format!("expected `{key}`, found `{}`", tokens[0]),
            ));
        }
        Ok((line, tokens[1..].to_vec()))
    }

    fn count(&mut self, key: &str) -> Result<usize> {
        let (line, values) = self.keyword(key)?;
        match values.as_slice() {
            [v] => parse_usize(line, v),
            _ => Err(Error::format(
                line,
                FormatIssue::Syntax,
                format!("`{key}` takes one integer"),
            )),
        }
    }
}

fn parse_usize(line: usize, token: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| Error::format(line, FormatIssue::Syntax, format!("bad integer `{token}`")))
}

fn parse_float(line: usize, token: &str) -> Result<f64> {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::format(
            line,
            FormatIssue::Syntax,
            format!("bad number `{token}`"),
        )),
    }
}

fn join_floats(values: &[f64]) -> String {
    values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}
