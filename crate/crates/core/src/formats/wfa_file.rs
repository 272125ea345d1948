use std::collections::HashSet;
use std::fmt::Write;

use crate::convert::pad_with_constant_copies;
use crate::error::{Error, FormatIssue, Result};
use crate::matrix::ProjectionMatrix;
use crate::wfa::Wfa;

use super::{join_floats, parse_float, parse_usize, Lines};

/// State layout used when writing an automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Layout {
    /// States exactly as stored.
    #[default]
    Native,
    /// Padded with constant copies to `2(k+1)` states for a system of `k` maps.
    Padded { maps: usize },
}

pub fn write_wfa(wfa: &Wfa, layout: Layout) -> Result<String> {
    let padded;
    let wfa = match layout {
        Layout::Native => wfa,
        Layout::Padded { maps } => {
            padded = pad_with_constant_copies(wfa, maps)?;
            &padded
        }
    };
    let mut out = String::new();
    let _ = writeln!(out, "WFA1");
    let _ = writeln!(out, "n {}", wfa.states());
    let _ = writeln!(out, "out {}", join_floats(wfa.output()));
    let _ = writeln!(out, "init {}", join_floats(wfa.initial()));
    let _ = writeln!(out, "edges {}", wfa.nnz());
    for (q, m) in wfa.matrices().iter().enumerate() {
        for (src, dst, w) in m.entries() {
            let _ = writeln!(out, "{q} {src} {dst} {w}");
        }
    }
    Ok(out)
}

pub fn read_wfa(text: &str) -> Result<Wfa> {
    let mut lines = Lines::new(text);
    lines.magic("WFA1")?;
    let n = lines.count("n")?;
    if n == 0 {
        return Err(Error::format(
            lines.last,
            FormatIssue::Syntax,
            "state count must be positive",
        ));
    }
    let output = float_row(&mut lines, "out", n)?;
    let initial = float_row(&mut lines, "init", n)?;
    let declared = lines.count("edges")?;

    let mut seen = HashSet::new();
    let mut triplets: [Vec<(usize, usize, f64)>; 4] = Default::default();
    for k in 0..declared {
        let (line, t) = lines.expect(&format!("edge {} of {declared}", k + 1))?;
        if t.len() != 4 {
            return Err(Error::format(
                line,
                FormatIssue::Syntax,
                "an edge is `<q> <src> <dst> <weight>`",
            ));
        }
        let q = parse_usize(line, t[0])?;
        let src = parse_usize(line, t[1])?;
        let dst = parse_usize(line, t[2])?;
        let w = parse_float(line, t[3])?;
        if q > 3 {
            return Err(Error::format(
                line,
                FormatIssue::IndexOutOfRange,
                format!("quadrant {q}"),
            ));
        }
        if src >= n || dst >= n {
            return Err(Error::format(
                line,
                FormatIssue::IndexOutOfRange,
                format!("edge {src} -> {dst} with {n} states"),
            ));
        }
        if !seen.insert((q, src, dst)) {
            return Err(Error::format(
                line,
                FormatIssue::DuplicateEdge,
                format!("edge {q} {src} {dst} listed twice"),
            ));
        }
        triplets[q].push((src, dst, w));
    }
    if let Some((line, _)) = lines.next_line() {
        return Err(Error::format(
            line,
            FormatIssue::CountMismatch,
            format!("more than the {declared} declared edges"),
        ));
    }
    let [a, b, c, d] = triplets;
    let matrices = [a, b, c, d].map(|t| {
        ProjectionMatrix::from_triplets(n, t).expect("indices and duplicates checked above")
    });
    Wfa::new(initial, matrices, output)
}

fn float_row(lines: &mut Lines<'_>, key: &str, n: usize) -> Result<Vec<f64>> {
    let (line, values) = lines.keyword(key)?;
    if values.len() != n {
        return Err(Error::format(
            line,
            FormatIssue::CountMismatch,
            format!("`{key}` has {} values for {n} states", values.len()),
        ));
    }
    values.iter().map(|v| parse_float(line, v)).collect()
}
