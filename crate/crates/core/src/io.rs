//! Plain-text formats. Blank lines and lines starting with `#` are ignored
//! when reading.
//!
//! - matrix: `rows cols`, then one row per line of integers or `num/den`
//! - hypergraph: `n k mode`, then one colex rank per line (`indicator`) or
//!   `rank num/den` lines (`fractional`; omitted ranks have weight 0)
//! - vector: `t k p`, then `rank num/den` lines (omitted ranks are 0)
//! - graph: `n`, then the strict upper triangle, one row per line

use std::fmt::Write as _;
use std::path::Path;

use num_rational::BigRational;
use num_traits::Zero;

use crate::combinatorics::choose;
use crate::error::{Error, Result};
use crate::hypergraph::{WeightedHypergraph, Weights};
use crate::linalg::ExactMatrix;
use crate::rational::{format_rational, parse_rational};
use crate::structure::WeightedGraph;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_usize(token: &str, line: usize) -> Result<usize> {
    token
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: expected a non-negative integer, got {token:?}")))
}

fn parse_value(token: &str, line: usize) -> Result<BigRational> {
    parse_rational(token).map_err(|e| Error::Parse(format!("line {line}: {e}")))
}

fn header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, fields: usize, what: &str) -> Result<(usize, Vec<&'a str>)> {
    let (n, line) = lines.next().ok_or_else(|| Error::Parse(format!("missing {what} header")))?;
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != fields {
        return Err(Error::Parse(format!("line {n}: {what} header needs {fields} fields, got {line:?}")));
    }
    Ok((n, tokens))
}

pub fn write_matrix(m: &ExactMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(format_rational).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<ExactMatrix> {
    let mut lines = content_lines(text);
    let (n, h) = header(&mut lines, 2, "matrix")?;
    let (rows, cols) = (parse_usize(h[0], n)?, parse_usize(h[1], n)?);
    let mut data = Vec::with_capacity(rows * cols);
    for (n, line) in lines {
        let row = line.split_whitespace().map(|t| parse_value(t, n)).collect::<Result<Vec<_>>>()?;
        if row.len() != cols {
            return Err(Error::Parse(format!("line {n}: expected {cols} entries, got {}", row.len())));
        }
        data.extend(row);
    }
    if data.len() != rows * cols {
        return Err(Error::Parse(format!("expected {rows} rows, got {}", data.len() / cols.max(1))));
    }
    ExactMatrix::from_vec(rows, cols, data)
}

pub fn write_hypergraph(h: &WeightedHypergraph) -> String {
    let mut out = String::new();
    match h.weights() {
        Weights::Indicator(w) => {
            let _ = writeln!(out, "{} {} indicator", h.n(), h.k());
            for (r, _) in w.iter().enumerate().filter(|(_, &e)| e) {
                let _ = writeln!(out, "{r}");
            }
        }
        Weights::Fractional(w) => {
            let _ = writeln!(out, "{} {} fractional", h.n(), h.k());
            for (r, x) in w.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                let _ = writeln!(out, "{r} {}", format_rational(x));
            }
        }
    }
    out
}

fn rank_in_range(rank: usize, len: usize, line: usize) -> Result<usize> {
    if rank >= len {
        return Err(Error::Parse(format!("line {line}: rank {rank} out of range (limit {len})")));
    }
    Ok(rank)
}

pub fn parse_hypergraph(text: &str) -> Result<WeightedHypergraph> {
    let mut lines = content_lines(text);
    let (n0, h) = header(&mut lines, 3, "hypergraph")?;
    let (n, k) = (parse_usize(h[0], n0)?, parse_usize(h[1], n0)?);
    if k == 0 || k > n {
        return Err(Error::Parse(format!("line {n0}: need 1 <= k <= n")));
    }
    let len = choose(n, k);
    match h[2] {
        "indicator" => {
            let mut edges = vec![false; len];
            for (ln, line) in lines {
                edges[rank_in_range(parse_usize(line, ln)?, len, ln)?] = true;
            }
            WeightedHypergraph::from_indicator(n, k, edges)
        }
        "fractional" => {
            let mut weights = vec![BigRational::zero(); len];
            for (ln, line) in lines {
                let (r, v) = line
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| Error::Parse(format!("line {ln}: expected \"rank num/den\"")))?;
                weights[rank_in_range(parse_usize(r, ln)?, len, ln)?] = parse_value(v.trim(), ln)?;
            }
            WeightedHypergraph::from_fractional(n, k, weights)
        }
        other => Err(Error::Parse(format!("line {n0}: unknown mode {other:?}"))),
    }
}

/// A vector on the k-subsets of `[t]` with its density parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorFile {
    pub t: usize,
    pub k: usize,
    pub p: BigRational,
    pub entries: Vec<BigRational>,
}

pub fn write_vector(t: usize, k: usize, p: &BigRational, entries: &[BigRational]) -> String {
    let mut out = format!("{t} {k} {}\n", format_rational(p));
    for (r, x) in entries.iter().enumerate() {
        let _ = writeln!(out, "{r} {}", format_rational(x));
    }
    out
}

pub fn parse_vector(text: &str) -> Result<VectorFile> {
    let mut lines = content_lines(text);
    let (n0, h) = header(&mut lines, 3, "vector")?;
    let (t, k, p) = (parse_usize(h[0], n0)?, parse_usize(h[1], n0)?, parse_value(h[2], n0)?);
    let len = choose(t, k);
    let mut entries = vec![BigRational::zero(); len];
    for (ln, line) in lines {
        let (r, v) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::Parse(format!("line {ln}: expected \"rank num/den\"")))?;
        entries[rank_in_range(parse_usize(r, ln)?, len, ln)?] = parse_value(v.trim(), ln)?;
    }
    Ok(VectorFile { t, k, p, entries })
}

pub fn write_graph(g: &WeightedGraph) -> String {
    let n = g.n();
    let mut out = format!("{n}\n");
    for i in 0..n.saturating_sub(1) {
        let row: Vec<String> = (i + 1..n).map(|j| format_rational(g.weight(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    let mut lines = content_lines(text);
    let (n0, h) = header(&mut lines, 1, "graph")?;
    let n = parse_usize(h[0], n0)?;
    let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for (i, (ln, line)) in lines.enumerate() {
        let row = line.split_whitespace().map(|t| parse_value(t, ln)).collect::<Result<Vec<_>>>()?;
        if i + 1 >= n || row.len() != n - 1 - i {
            return Err(Error::Parse(format!("line {ln}: upper-triangle row {i} needs {} entries", n.saturating_sub(i + 1))));
        }
        upper.extend(row);
    }
    WeightedGraph::from_upper(n, &upper)
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{exact_ckp_weights, sample_gnp};
    use crate::rational::{int, ratio};

    #[test]
    fn matrix_text() {
        let m = ExactMatrix::from_rows(vec![vec![int(1), ratio(-1, 2)], vec![int(0), int(3)]]).unwrap();
        let text = write_matrix(&m);
        assert_eq!(text, "2 2\n1 -1/2\n0 3\n");
        assert_eq!(parse_matrix(&text).unwrap(), m);
        assert!(parse_matrix("2 2\n1 2\n").is_err());
        assert!(parse_matrix("2 2\n1 2\n3\n").is_err());
    }

    #[test]
    fn hypergraph_text() {
        let h = sample_gnp(9, 3, &ratio(1, 2), 4).unwrap();
        assert_eq!(parse_hypergraph(&write_hypergraph(&h)).unwrap(), h);
        let f = exact_ckp_weights(8, 2, &ratio(1, 4), &[1, 2, 3, 4]).unwrap();
        let text = write_hypergraph(&f);
        assert!(text.starts_with("8 2 fractional\n0 1/2\n"));
        assert_eq!(parse_hypergraph(&text).unwrap(), f);
        assert!(parse_hypergraph("4 2 indicator\n6\n").is_err());
        assert!(parse_hypergraph("4 2 weird\n").is_err());
        assert_eq!(parse_hypergraph("# comment\n4 2 indicator\n\n0\n").unwrap().edge_count(), 1);
    }

    #[test]
    fn vector_and_graph_text() {
        let entries = vec![int(0), ratio(1, 2), int(2)];
        let text = write_vector(3, 2, &ratio(1, 4), &entries);
        let v = parse_vector(&text).unwrap();
        assert_eq!((v.t, v.k, v.p, v.entries), (3, 2, ratio(1, 4), entries));
        let g = WeightedGraph::from_upper(4, &[int(1), ratio(1, 3), int(0), int(2), int(5), ratio(-1, 7)]).unwrap();
        let text = write_graph(&g);
        assert_eq!(text, "4\n1 1/3 0\n2 5\n-1/7\n");
        assert_eq!(parse_graph(&text).unwrap(), g);
        assert!(parse_graph("3\n1 2\n3 4\n").is_err());
    }
}
