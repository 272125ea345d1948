use thiserror::Error;

use crate::ifs::Violation;

/// Errors raised by the library.
///
/// Variants are grouped the way the command line reports them: structural and
/// format problems are usage errors, capacity problems get their own exit code.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes of vectors or matrices do not agree.
    #[error("structural: {0}")]
    Structural(String),

    /// A quadrant digit outside 0..=3 or an address of the wrong length.
    #[error("address: {0}")]
    Address(String),

    /// Image dimensions that are not a square power of two, or too small for the operation.
    #[error("image: {0}")]
    Image(String),

    /// The requested work would exceed a configured resource limit.
    #[error("capacity: {0}")]
    Capacity(String),

    /// A quadtree IFS failed validation.
    #[error("invalid IFS: {}", format_violations(.0))]
    InvalidIfs(Vec<Violation>),

    /// Precondition of an IFS operation not met (too coarse a grid, expanding maps, ...).
    #[error("precondition: {0}")]
    Precondition(String),

    /// Malformed text or binary input. `line` is 0 for binary payloads.
    #[error("format: line {line}: {issue}: {message}")]
    Format {
        line: usize,
        issue: FormatIssue,
        message: String,
    },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// What went wrong while parsing a file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormatIssue {
    BadMagic,
    Syntax,
    CountMismatch,
    IndexOutOfRange,
    DuplicateEdge,
    BadHeader,
    Truncated,
}

impl std::fmt::Display for FormatIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FormatIssue::BadMagic => "bad magic",
            FormatIssue::Syntax => "syntax",
            FormatIssue::CountMismatch => "count mismatch",
            FormatIssue::IndexOutOfRange => "index out of range",
            FormatIssue::DuplicateEdge => "duplicate edge",
            FormatIssue::BadHeader => "bad header",
            FormatIssue::Truncated => "truncated",
        })
    }
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub(crate) fn format(line: usize, issue: FormatIssue, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            issue,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
