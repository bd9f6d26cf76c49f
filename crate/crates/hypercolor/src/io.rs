//! Plain-text serialization for instances, colorings, vector solutions,
//! graphs and Gram blocks.
//!
//! All formats are whitespace-separated with `#` line comments. Weights and
//! vector entries are written so that reading them back reproduces the exact
//! same f64 bits (shortest round-trip form for weights, 17 significant digits
//! for vectors).

use crate::coloring::Coloring;
use crate::forge::Graph;
use crate::hypergraph::{Hypergraph, HypergraphError};
use crate::sdp::VectorSolution;
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unexpected end of input, wanted {0}")]
    Truncated(&'static str),
    #[error(transparent)]
    Invalid(#[from] HypergraphError),
}

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Parse {
        line,
        msg: msg.into(),
    })
}

/// Content lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

fn parse_fields<T: std::str::FromStr>(
    line_no: usize,
    line: &str,
    what: &str,
) -> Result<Vec<T>, FormatError> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<T>()
                .map_err(|_| FormatError::Parse {
                    line: line_no,
                    msg: format!("bad {what} token {tok:?}"),
                })
        })
        .collect()
}

/// `k n m` header, then one edge per line: k ascending vertex ids and an
/// optional trailing weight (default 1).
pub fn write_hypergraph(h: &Hypergraph) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} {} {}\n", h.k(), h.n(), h.m()));
    for (e, &w) in h.edges().iter().zip(h.weights()) {
        let ids: Vec<String> = e.iter().map(|v| v.to_string()).collect();
        out.push_str(&ids.join(" "));
        if w != 1.0 {
            out.push_str(&format!(" {w:?}"));
        }
        out.push('\n');
    }
    out
}

pub fn read_hypergraph(text: &str) -> Result<Hypergraph, FormatError> {
    let mut lines = content_lines(text);
    let (hline_no, header) = lines.next().ok_or(FormatError::Truncated("k n m header"))?;
    let head: Vec<usize> = parse_fields(hline_no, header, "header")?;
    if head.len() != 3 {
        return parse_err(hline_no, "header must be `k n m`");
    }
    let (k, n, m) = (head[0], head[1], head[2]);
    let mut edges = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for _ in 0..m {
        let (line_no, line) = lines.next().ok_or(FormatError::Truncated("edge line"))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != k && toks.len() != k + 1 {
            return parse_err(line_no, format!("expected {k} ids with optional weight"));
        }
        let ids: Vec<usize> = parse_fields(line_no, &toks[..k].join(" "), "vertex id")?;
        let w = if toks.len() == k + 1 {
            toks[k]
                .parse::<f64>()
                .map_err(|_| FormatError::Parse {
                    line: line_no,
                    msg: format!("bad weight {:?}", toks[k]),
                })?
        } else {
            1.0
        };
        edges.push(ids);
        weights.push(w);
    }
    if let Some((line_no, _)) = lines.next() {
        return parse_err(line_no, "trailing content after last edge");
    }
    Ok(Hypergraph::new(k, n, edges, weights)?)
}

/// `palette n` header, then one color per vertex line; `-` marks uncolored.
pub fn write_coloring(c: &Coloring) -> String {
    let mut out = format!("{} {}\n", c.palette(), c.n());
    for v in 0..c.n() {
        match c.get(v) {
            Some(color) => out.push_str(&format!("{color}\n")),
            None => out.push_str("-\n"),
        }
    }
    out
}

pub fn read_coloring(text: &str) -> Result<Coloring, FormatError> {
    let mut lines = content_lines(text);
    let (hline_no, header) = lines
        .next()
        .ok_or(FormatError::Truncated("palette n header"))?;
    let head: Vec<usize> = parse_fields(hline_no, header, "header")?;
    if head.len() != 2 {
        return parse_err(hline_no, "header must be `palette n`");
    }
    let (palette, n) = (head[0], head[1]);
    if palette == 0 {
        return parse_err(hline_no, "palette must be positive");
    }
    let mut colors = Vec::with_capacity(n);
    for _ in 0..n {
        let (line_no, line) = lines.next().ok_or(FormatError::Truncated("color line"))?;
        if line == "-" {
            colors.push(None);
        } else {
            let c: usize = line.parse().map_err(|_| FormatError::Parse {
                line: line_no,
                msg: format!("bad color {line:?}"),
            })?;
            if c >= palette {
                return parse_err(line_no, format!("color {c} outside palette {palette}"));
            }
            colors.push(Some(c));
        }
    }
    Ok(Coloring::from_colors(palette, colors))
}

/// `n d` header, then one row of d entries per vertex, 17 significant digits.
pub fn write_vectors(v: &VectorSolution) -> String {
    let mut out = format!("{} {}\n", v.n(), v.dim());
    for row in v.rows() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_vectors(text: &str) -> Result<VectorSolution, FormatError> {
    let mut lines = content_lines(text);
    let (hline_no, header) = lines.next().ok_or(FormatError::Truncated("n d header"))?;
    let head: Vec<usize> = parse_fields(hline_no, header, "header")?;
    if head.len() != 2 {
        return parse_err(hline_no, "header must be `n d`");
    }
    let (n, d) = (head[0], head[1]);
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let (line_no, line) = lines.next().ok_or(FormatError::Truncated("vector row"))?;
        let row: Vec<f64> = parse_fields(line_no, line, "vector entry")?;
        if row.len() != d {
            return parse_err(line_no, format!("expected {d} entries, got {}", row.len()));
        }
        rows.push(row);
    }
    Ok(VectorSolution::from_rows(d, rows))
}

/// `n m` header, then one `u v` line per graph edge.
pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edges().len());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn read_graph(text: &str) -> Result<Graph, FormatError> {
    let mut lines = content_lines(text);
    let (hline_no, header) = lines.next().ok_or(FormatError::Truncated("n m header"))?;
    let head: Vec<usize> = parse_fields(hline_no, header, "header")?;
    if head.len() != 2 {
        return parse_err(hline_no, "header must be `n m`");
    }
    let (n, m) = (head[0], head[1]);
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line_no, line) = lines.next().ok_or(FormatError::Truncated("edge line"))?;
        let pair: Vec<usize> = parse_fields(line_no, line, "vertex id")?;
        if pair.len() != 2 {
            return parse_err(line_no, "expected `u v`");
        }
        edges.push((pair[0], pair[1]));
    }
    Graph::new(n, edges).map_err(|e| FormatError::Parse {
        line: hline_no,
        msg: e.to_string(),
    })
}

/// `k` header, then k rows of k entries.
pub fn write_gram(a: &DMatrix<f64>) -> String {
    let k = a.nrows();
    let mut out = format!("{k}\n");
    for i in 0..k {
        let cells: Vec<String> = (0..k).map(|j| format!("{:.16e}", a[(i, j)])).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_gram(text: &str) -> Result<DMatrix<f64>, FormatError> {
    let mut lines = content_lines(text);
    let (hline_no, header) = lines.next().ok_or(FormatError::Truncated("size header"))?;
    let head: Vec<usize> = parse_fields(hline_no, header, "header")?;
    if head.len() != 1 {
        return parse_err(hline_no, "header must be the matrix size");
    }
    let k = head[0];
    let mut entries = Vec::with_capacity(k * k);
    for _ in 0..k {
        let (line_no, line) = lines.next().ok_or(FormatError::Truncated("matrix row"))?;
        let row: Vec<f64> = parse_fields(line_no, line, "matrix entry")?;
        if row.len() != k {
            return parse_err(line_no, format!("expected {k} entries, got {}", row.len()));
        }
        entries.extend(row);
    }
    Ok(DMatrix::from_row_slice(k, k, &entries))
}
