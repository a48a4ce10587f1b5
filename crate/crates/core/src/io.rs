//! Text formats: edge lists, labeling files, key-value parameter files.
//!
//! Node indices and labels are 1-based in files and 0-based in memory.
//!
//! Edge list: an `n k` header line (`k` optional), then one whitespace
//! separated `i j` pair per line. Labeling: one label per line. Parameter
//! file: `key = value` lines, e.g.
//!
//! ```text
//! k = 2
//! pi = 0.5, 0.5
//! S = 4, 1
//! S = 1, 4
//! rho_mode = log_n_over_n
//! ```
//!
//! `S` may also be given on one line with rows separated by `;`. The
//! sparsity is either `rho = <value>` or `rho_mode` in `const`,
//! `log_n_over_n`, `one_over_n`, `c_log_n_over_n` (the last with `rho_c`).
//! Lines starting with `#` are comments everywhere.

use std::fmt::Write as _;

use crate::error::{Result, SbmError};
use crate::graph::{Graph, Labeling};
use crate::matrix::Matrix;
use crate::sampler::{RhoMode, SbmParams};

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(line: usize, msg: impl Into<String>) -> SbmError {
    SbmError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_index(tok: &str, line: usize) -> Result<usize> {
    let v: usize = tok
        .parse()
        .map_err(|_| parse_err(line, format!("expected a positive integer, found {tok:?}")))?;
    if v == 0 {
        return Err(parse_err(line, "indices are 1-based; found 0"));
    }
    Ok(v - 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeList {
    pub graph: Graph,
    /// `k` from the header, when present.
    pub k: Option<usize>,
}

/// Parses an edge list. With `header = false`, `n` is the largest index.
pub fn parse_edge_list(text: &str, header: bool) -> Result<EdgeList> {
    let mut lines = data_lines(text);
    let mut n = None;
    let mut k = None;
    if header {
        let (ln, first) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing `n k` header"))?;
        let mut toks = first.split_whitespace();
        let nv: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(ln, "header must start with the node count"))?;
        n = Some(nv);
        if let Some(t) = toks.next() {
            k = Some(
                t.parse()
                    .map_err(|_| parse_err(ln, format!("bad k {t:?} in header")))?,
            );
        }
        if toks.next().is_some() {
            return Err(parse_err(ln, "header has more than two fields"));
        }
    }
    let mut edges = Vec::new();
    let mut max = 0;
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(ln, format!("expected `i j`, found {line:?}")));
        }
        let (i, j) = (parse_index(toks[0], ln)?, parse_index(toks[1], ln)?);
        if let Some(nv) = n {
            if i >= nv || j >= nv {
                return Err(parse_err(
                    ln,
                    format!("edge ({}, {}) exceeds n = {nv}", i + 1, j + 1),
                ));
            }
        }
        if i == j {
            return Err(parse_err(ln, format!("self-loop at node {}", i + 1)));
        }
        max = max.max(i + 1).max(j + 1);
        edges.push((i, j));
    }
    let graph = Graph::from_edges(n.unwrap_or(max), edges)?;
    Ok(EdgeList { graph, k })
}

pub fn format_edge_list(g: &Graph, k: Option<usize>) -> String {
    let mut out = String::new();
    match k {
        Some(k) => writeln!(out, "{} {}", g.n(), k).unwrap(),
        None => writeln!(out, "{}", g.n()).unwrap(),
    }
    for (i, j) in g.edges() {
        writeln!(out, "{} {}", i + 1, j + 1).unwrap();
    }
    out
}

/// Parses a labeling file. `k` defaults to the largest label.
pub fn parse_labeling(text: &str, k: Option<usize>) -> Result<Labeling> {
    let mut labels = Vec::new();
    for (ln, line) in data_lines(text) {
        labels.push(parse_index(line, ln)?);
    }
    match k {
        Some(k) => Labeling::new(labels, k),
        None => Labeling::from_labels(labels),
    }
}

pub fn format_labeling(z: &Labeling) -> String {
    let mut out = String::with_capacity(z.len() * 3);
    for &l in z.labels() {
        writeln!(out, "{}", l + 1).unwrap();
    }
    out
}

/// Splits `key = value` lines (also `key: value` and `key value`).
pub fn parse_key_values(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (ln, line) in data_lines(text) {
        let line = line.split(" #").next().unwrap_or(line).trim();
        let (key, value) = line
            .split_once('=')
            .or_else(|| line.split_once(':'))
            .or_else(|| line.split_once(char::is_whitespace))
            .ok_or_else(|| parse_err(ln, format!("expected `key = value`, found {line:?}")))?;
        out.push((ln, key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

fn parse_list(value: &str, ln: usize) -> Result<Vec<f64>> {
    value
        .split([',', ' ', '\t'])
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| parse_err(ln, format!("expected a number, found {t:?}")))
        })
        .collect()
}

pub fn parse_params(text: &str) -> Result<SbmParams> {
    let mut k = None;
    let mut pi = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rho = None;
    let mut mode = None;
    let mut rho_c = 1.0;
    for (ln, key, value) in parse_key_values(text)? {
        match key.to_ascii_lowercase().as_str() {
            "k" => {
                k = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| parse_err(ln, format!("bad k {value:?}")))?,
                )
            }
            "pi" => pi = Some(parse_list(&value, ln)?),
            "s" => {
                for row in value.split(';').filter(|r| !r.trim().is_empty()) {
                    rows.push(parse_list(row, ln)?);
                }
            }
            "rho" => {
                rho = Some(
                    value
                        .parse::<f64>()
                        .map_err(|_| parse_err(ln, format!("bad rho {value:?}")))?,
                )
            }
            "rho_mode" => mode = Some((ln, value.to_ascii_lowercase())),
            "rho_c" | "c" => {
                rho_c = value
                    .parse::<f64>()
                    .map_err(|_| parse_err(ln, format!("bad rho_c {value:?}")))?
            }
            other => return Err(parse_err(ln, format!("unknown key {other:?}"))),
        }
    }
    let k = k.or(pi.as_ref().map(Vec::len)).unwrap_or(rows.len());
    let pi = pi.unwrap_or_else(|| vec![1.0 / k as f64; k]);
    if pi.len() != k {
        return Err(SbmError::Parameter(format!(
            "pi has {} entries but k = {k}",
            pi.len()
        )));
    }
    if rows.len() != k {
        return Err(SbmError::Parameter(format!(
            "S has {} rows but k = {k}",
            rows.len()
        )));
    }
    let s = Matrix::from_rows(rows)
        .ok_or_else(|| SbmError::Parameter(format!("every row of S needs {k} entries")))?;
    let rho = match (mode, rho) {
        (None, Some(r)) => RhoMode::Const(r),
        (None, None) => return Err(SbmError::Parameter("missing rho or rho_mode".into())),
        (Some((ln, m)), r) => match m.as_str() {
            "const" => {
                RhoMode::Const(r.ok_or_else(|| parse_err(ln, "rho_mode = const needs rho"))?)
            }
            "log_n_over_n" => RhoMode::LogNOverN,
            "one_over_n" => RhoMode::OneOverN,
            "c_log_n_over_n" | "custom" => RhoMode::ScaledLogNOverN(rho_c),
            other => return Err(parse_err(ln, format!("unknown rho_mode {other:?}"))),
        },
    };
    SbmParams::new(pi, s, rho)
}

pub fn format_params(p: &SbmParams) -> String {
    let join = |v: &[f64]| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    let mut out = String::new();
    writeln!(out, "k = {}", p.k()).unwrap();
    writeln!(out, "pi = {}", join(p.pi())).unwrap();
    for a in 0..p.k() {
        writeln!(out, "S = {}", join(p.s().row(a))).unwrap();
    }
    match p.rho_mode() {
        RhoMode::Const(r) => writeln!(out, "rho = {r}").unwrap(),
        RhoMode::LogNOverN => writeln!(out, "rho_mode = log_n_over_n").unwrap(),
        RhoMode::OneOverN => writeln!(out, "rho_mode = one_over_n").unwrap(),
        RhoMode::ScaledLogNOverN(c) => {
            writeln!(out, "rho_mode = c_log_n_over_n").unwrap();
            writeln!(out, "rho_c = {c}").unwrap();
        }
    }
    out
}

/// Formats `x` with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..12).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}
