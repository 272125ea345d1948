use std::fmt::Write;

use crate::address::QuadAddress;
use crate::error::{Error, FormatIssue, Result};
use crate::ifs::{GainCheck, QuadIfs, QuadMap};

use super::{parse_float, Lines};

pub fn write_ifs(ifs: &QuadIfs) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "IFS1");
    let _ = writeln!(out, "maps {}", ifs.len());
    for m in &ifs.maps {
        let _ = writeln!(out, "map {} {} {} {}", m.domain, m.range, m.alpha, m.beta);
    }
    out
}

/// Parses and validates a system; gains above 1 in magnitude are rejected.
pub fn read_ifs(text: &str) -> Result<QuadIfs> {
    let mut lines = Lines::new(text);
    lines.magic("IFS1")?;
    let k = lines.count("maps")?;
    let mut maps = Vec::with_capacity(k);
    for i in 0..k {
        let (line, values) = lines.keyword("map").map_err(|e| match e {
            Error::Format {
                line,
                issue: FormatIssue::CountMismatch,
                ..
            } => Error::format(
                line,
                FormatIssue::CountMismatch,
                format!("input ended after {i} of {k} maps"),
            ),
            other => other,
        })?;
        if values.len() != 4 {
            return Err(Error::format(
                line,
                FormatIssue::Syntax,
                "a map is `map <domain> <range> <alpha> <beta>`",
            ));
        }
        let domain = address(line, values[0])?;
        let range = address(line, values[1])?;
        let alpha = parse_float(line, values[2])?;
        let beta = parse_float(line, values[3])?;
        maps.push(QuadMap::new(domain, range, alpha, beta));
    }
    if let Some((line, _)) = lines.next_line() {
        return Err(Error::format(
            line,
            FormatIssue::CountMismatch,
            format!("more than the {k} declared maps"),
        ));
    }
    let ifs = QuadIfs::new(maps);
    ifs.ensure_valid(GainCheck::Strict)?;
    Ok(ifs)
}

fn address(line: usize, token: &str) -> Result<QuadAddress> {
    token
        .parse()
        .map_err(|_| Error::format(line, FormatIssue::Syntax, format!("bad address `{token}`")))
}
