//! Text formats: DIMACS-style instance files and tab-separated result
//! tables.
//!
//! Instances: a header `p ev <n> <m> <B>`, then `m` arc lines
//! `a <u> <v> <g>` with 1-based vertices and integer gains; `c` lines are
//! comments. Duplicate arcs collapse to the larger gain. Results: one
//! `s <tab> t <tab> value` line per ordered pair, sorted, with `-inf` /
//! `+inf` tokens for unreachable pairs.

use crate::gain::Charge;
#[cfg(test)]
use crate::gain::Gain;
use crate::graph::EnergyGraph;
use crate::table::{BetaValue, Matrix};
use std::path::Path as FsPath;
use thiserror::Error;

/// Keeps dense tables and the saturation headroom sane.
pub const MAX_VERTICES: usize = 4096;
pub const MAX_MAGNITUDE: i64 = 1 << 32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("missing header line")]
    MissingHeader,
    #[error("expected {expected} arc lines, found {found}")]
    ArcCount { expected: usize, found: usize },
}

fn err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Line {
        line,
        msg: msg.into(),
    }
}

/// Parses an instance and returns the normalized graph.
pub fn parse_graph(text: &str) -> Result<EnergyGraph, ParseError> {
    let mut header: Option<(usize, usize, i64)> = None;
    let mut graph: Option<EnergyGraph> = None;
    let mut arcs_seen = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut it = line.split_whitespace();
        match it.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(err(line_no, "duplicate header"));
                }
                if it.next() != Some("ev") {
                    return Err(err(line_no, "expected 'p ev <n> <m> <B>'"));
                }
                let n: usize = parse_field(&mut it, line_no, "n")?;
                let m: usize = parse_field(&mut it, line_no, "m")?;
                let b: i64 = parse_field(&mut it, line_no, "B")?;
                if n == 0 || n > MAX_VERTICES {
                    return Err(err(line_no, format!("n={n} outside 1..={MAX_VERTICES}")));
                }
                if b <= 0 || b > MAX_MAGNITUDE {
                    return Err(err(line_no, format!("B={b} outside 1..={MAX_MAGNITUDE}")));
                }
                header = Some((n, m, b));
                graph = Some(
                    EnergyGraph::new(n, b)
                        .map_err(|e| err(line_no, e.to_string()))?,
                );
            }
            Some("a") => {
                let Some((n, _, _)) = header else {
                    return Err(ParseError::MissingHeader);
                };
                let u: usize = parse_field(&mut it, line_no, "u")?;
                let v: usize = parse_field(&mut it, line_no, "v")?;
                let g: i64 = parse_field(&mut it, line_no, "g")?;
                if u == 0 || u > n || v == 0 || v > n {
                    return Err(err(line_no, format!("vertex outside 1..={n}")));
                }
                if g.abs() > MAX_MAGNITUDE {
                    return Err(err(line_no, format!("gain {g} out of range")));
                }
                graph.as_mut().unwrap().add_arc_max(u - 1, v - 1, g);
                arcs_seen += 1;
            }
            Some(tok) => return Err(err(line_no, format!("unknown line type '{tok}'"))),
            None => unreachable!(),
        }
        if it.next().is_some() {
            return Err(err(line_no, "trailing tokens"));
        }
    }
    let Some((_, m, _)) = header else {
        return Err(ParseError::MissingHeader);
    };
    if arcs_seen != m {
        return Err(ParseError::ArcCount {
            expected: m,
            found: arcs_seen,
        });
    }
    graph
        .unwrap()
        .normalize()
        .map_err(|e| err(0, e.to_string()))
}

fn parse_field<T: std::str::FromStr>(
    it: &mut std::str::SplitWhitespace<'_>,
    line: usize,
    name: &str,
) -> Result<T, ParseError> {
    it.next()
        .ok_or_else(|| err(line, format!("missing field {name}")))?
        .parse()
        .map_err(|_| err(line, format!("bad value for {name}")))
}

/// Serializes a graph in the instance format (inverse of [`parse_graph`] up
/// to normalization).
pub fn format_graph(g: &EnergyGraph) -> String {
    let mut out = String::new();
    let arcs: Vec<_> = g.arcs().collect();
    out.push_str(&format!("p ev {} {} {}\n", g.n(), arcs.len(), g.capacity()));
    for (u, v, w) in arcs {
        out.push_str(&format!("a {} {} {}\n", u + 1, v + 1, w));
    }
    out
}

/// Formats an alpha table: n^2 sorted tab-separated triples.
pub fn format_alpha_table(t: &Matrix<Charge>) -> String {
    let mut out = String::new();
    for s in 0..t.n() {
        for u in 0..t.n() {
            out.push_str(&format!("{}\t{}\t{}\n", s + 1, u + 1, t.at(s, u)));
        }
    }
    out
}

/// Formats a beta table, with `+inf` for unreachable pairs.
pub fn format_beta_table(t: &Matrix<BetaValue>) -> String {
    let mut out = String::new();
    for s in 0..t.n() {
        for u in 0..t.n() {
            out.push_str(&format!("{}\t{}\t{}\n", s + 1, u + 1, t.at(s, u)));
        }
    }
    out
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub fn load_graph(path: &FsPath) -> Result<EnergyGraph, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_graph(&text)?)
}

pub fn save_text(path: &FsPath, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}
