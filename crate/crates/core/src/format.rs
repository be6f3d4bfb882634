//! The plain-text `.lts` system format.
//!
//! ```text
//! lts 1
//! # comment lines start with '#'
//! <n> <m>
//! <i> <j> <k>      m lines, 0 <= i < j < k < n, lexicographically sorted
//! ```

use std::fmt::Write;

use thiserror::Error;

use crate::system::{build_system, SystemError, TripleSystem};

pub const HEADER: &str = "lts 1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: SystemError,
    },
}

impl FormatError {
    fn syntax(line: usize, message: impl Into<String>) -> Self {
        FormatError::Syntax {
            line,
            message: message.into(),
        }
    }
}

pub fn serialize_system(sys: &TripleSystem) -> String {
    let mut out = String::with_capacity(16 + 12 * sys.len());
    out.push_str(HEADER);
    out.push('\n');
    let _ = writeln!(out, "{} {}", sys.n(), sys.len());
    for t in sys.triples() {
        let [a, b, c] = t.vertices();
        let _ = writeln!(out, "{a} {b} {c}");
    }
    out
}

fn parse_ints(line: usize, text: &str, expected: usize) -> Result<Vec<i64>, FormatError> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != expected {
        return Err(FormatError::syntax(
            line,
            format!("expected {expected} integers, found {}", fields.len()),
        ));
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<i64>()
                .map_err(|_| FormatError::syntax(line, format!("'{f}' is not an integer")))
        })
        .collect()
}

/// Parses and validates a system. Grammar violations are [`FormatError::Syntax`];
/// well-formed input describing an invalid system is [`FormatError::Invalid`].
pub fn parse_system(text: &str) -> Result<TripleSystem, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hl, header) = lines.next().ok_or_else(|| FormatError::syntax(1, "missing header"))?;
    if header != HEADER {
        let message = match header.strip_prefix("lts ") {
            Some(v) => format!("unsupported format version '{v}'"),
            None => format!("expected header '{HEADER}'"),
        };
        return Err(FormatError::syntax(hl, message));
    }

    let (cl, counts) = lines
        .next()
        .ok_or_else(|| FormatError::syntax(hl + 1, "missing counts line"))?;
    let counts = parse_ints(cl, counts, 2)?;
    let (n, m) = (counts[0], counts[1]);
    if n < 0 || m < 0 {
        return Err(FormatError::syntax(cl, "counts must be nonnegative"));
    }
    let (n, m) = (n as usize, m as usize);

    let mut blocks: Vec<[usize; 3]> = Vec::with_capacity(m);
    let mut line_of = Vec::with_capacity(m);
    let mut last_line = cl;
    for (ln, text) in lines {
        last_line = ln;
        if blocks.len() == m {
            return Err(FormatError::syntax(ln, format!("more than the declared {m} triples")));
        }
        let v = parse_ints(ln, text, 3)?;
        if let Some(&bad) = v.iter().find(|&&x| x < 0 || x >= n as i64) {
            return Err(FormatError::Invalid {
                line: ln,
                source: SystemError::VertexOutOfRange { vertex: bad, n },
            });
        }
        if v[0] == v[1] || v[1] == v[2] || v[0] == v[2] {
            return Err(FormatError::Invalid {
                line: ln,
                source: SystemError::DegenerateTriple([v[0], v[1], v[2]]),
            });
        }
        if !(v[0] < v[1] && v[1] < v[2]) {
            return Err(FormatError::syntax(ln, "triple entries must be strictly increasing"));
        }
        let t = [v[0] as usize, v[1] as usize, v[2] as usize];
        if blocks.last().is_some_and(|prev| *prev >= t) {
            return Err(FormatError::syntax(ln, "triples must be strictly lexicographically sorted"));
        }
        blocks.push(t);
        line_of.push(ln);
    }
    if blocks.len() != m {
        return Err(FormatError::syntax(
            last_line,
            format!("declared {m} triples but found {}", blocks.len()),
        ));
    }

    build_system(n, blocks.iter().copied()).map_err(|source| {
        // attribute linearity errors to the later of the two offending lines
        let line = match &source {
            SystemError::DuplicatePairCoverage { second, .. } => blocks
                .iter()
                .position(|b| *b == second.vertices())
                .map_or(cl, |i| line_of[i]),
            _ => cl,
        };
        FormatError::Invalid { line, source }
    })
}
