//! Model parameters, sampling, and expected block edge counts.

use std::fmt;

use rand::Rng;

use crate::error::{Result, SbmError};
use crate::graph::{check_pair, pair_count, ConfusionMatrix, Graph, Labeling};
use crate::matrix::Matrix;
use crate::rng::{stream, EDGE_STREAM, LABEL_STREAM};

/// Edge probabilities must lie in `[P_MIN, 1 - P_MIN]`.
pub const P_MIN: f64 = 1e-12;

/// How the sparsity scale `rho` is chosen for a network of `n` nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RhoMode {
    Const(f64),
    /// `log(n) / n`
    LogNOverN,
    /// `1 / n`
    OneOverN,
    /// `c * log(n) / n`
    ScaledLogNOverN(f64),
}

impl RhoMode {
    pub fn at(&self, n: usize) -> f64 {
        let nf = n as f64;
        match *self {
            RhoMode::Const(r) => r,
            RhoMode::LogNOverN => nf.ln() / nf,
            RhoMode::OneOverN => 1.0 / nf,
            RhoMode::ScaledLogNOverN(c) => c * nf.ln() / nf,
        }
    }
}

impl fmt::Display for RhoMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhoMode::Const(r) => write!(f, "{r}"),
            RhoMode::LogNOverN => f.write_str("log_n_over_n"),
            RhoMode::OneOverN => f.write_str("one_over_n"),
            RhoMode::ScaledLogNOverN(c) => write!(f, "{c}*log_n_over_n"),
        }
    }
}

/// Parameters `(k, pi, S, rho)` of a stochastic block model; `P = rho * S`.
#[derive(Clone, Debug, PartialEq)]
pub struct SbmParams {
    pi: Vec<f64>,
    s: Matrix<f64>,
    rho: RhoMode,
}

impl SbmParams {
    pub fn new(pi: Vec<f64>, s: Matrix<f64>, rho: RhoMode) -> Result<Self> {
        let k = pi.len();
        if k == 0 {
            return Err(SbmError::Parameter("k must be at least 1".into()));
        }
        if s.dim() != k {
            return Err(SbmError::Parameter(format!(
                "S is {0}x{0} but pi has {k} entries",
                s.dim()
            )));
        }
        if pi.iter().any(|&p| p <= 0.0 || !p.is_finite()) {
            return Err(SbmError::Parameter("pi must be strictly positive".into()));
        }
        let total: f64 = pi.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(SbmError::Parameter(format!("pi sums to {total}, not 1")));
        }
        if s.as_slice().iter().any(|&x| x <= 0.0 || !x.is_finite()) {
            return Err(SbmError::Parameter("S must be strictly positive".into()));
        }
        if !s.is_symmetric() {
            return Err(SbmError::Parameter("S must be symmetric".into()));
        }
        match rho {
            RhoMode::Const(r) if !(r > 0.0 && r <= 1.0) => {
                return Err(SbmError::Parameter(format!("rho = {r} must lie in (0, 1]")))
            }
            RhoMode::ScaledLogNOverN(c) if !(c > 0.0 && c.is_finite()) => {
                return Err(SbmError::Parameter(format!(
                    "rho constant c = {c} must be positive"
                )))
            }
            _ => {}
        }
        Ok(Self { pi, s, rho })
    }

    /// Balanced `k`-community model with `s1` on the diagonal and `s2` off it.
    pub fn symmetric(k: usize, s1: f64, s2: f64, rho: RhoMode) -> Result<Self> {
        let pi = vec![1.0 / k as f64; k];
        let s = Matrix::from_fn(k, |a, b| if a == b { s1 } else { s2 });
        Self::new(pi, s, rho)
    }

    pub fn k(&self) -> usize {
        self.pi.len()
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn s(&self) -> &Matrix<f64> {
        &self.s
    }

    pub fn rho_mode(&self) -> RhoMode {
        self.rho
    }

    pub fn with_rho(&self, rho: RhoMode) -> Result<Self> {
        Self::new(self.pi.clone(), self.s.clone(), rho)
    }

    pub fn rho(&self, n: usize) -> f64 {
        self.rho.at(n)
    }

    /// `P = rho(n) * S`, validated against `[P_MIN, 1 - P_MIN]`.
    pub fn probabilities(&self, n: usize) -> Result<Matrix<f64>> {
        let rho = self.rho(n);
        let p = self.s.scale(rho);
        for a in 0..self.k() {
            for b in 0..self.k() {
                let x = p[(a, b)];
                if !(P_MIN..=1.0 - P_MIN).contains(&x) {
                    return Err(SbmError::Parameter(format!(
                        "P[{a}][{b}] = rho * S = {x} lies outside [{P_MIN:e}, 1 - {P_MIN:e}]"
                    )));
                }
            }
        }
        Ok(p)
    }

    /// Identifiability warnings (identical columns of `S`).
    pub fn warnings(&self) -> Vec<String> {
        let k = self.k();
        let mut out = Vec::new();
        for b in 0..k {
            for c in (b + 1)..k {
                if (0..k).all(|a| self.s[(a, b)] == self.s[(a, c)]) {
                    out.push(format!(
                        "columns {b} and {c} of S are identical; communities {b} and {c} are not identifiable"
                    ));
                }
            }
        }
        out
    }
}

/// Community labels `z_i` drawn i.i.d. from `pi` on the label stream.
pub fn sample_labels(params: &SbmParams, n: usize, seed: u64) -> Labeling {
    let mut rng = stream(seed, LABEL_STREAM);
    let mut cdf = Vec::with_capacity(params.k());
    let mut acc = 0.0;
    for &p in params.pi() {
        acc += p;
        cdf.push(acc);
    }
    let last = params.k() - 1;
    let labels = (0..n)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * acc;
            cdf.iter().position(|&c| u < c).unwrap_or(last)
        })
        .collect();
    Labeling::new(labels, params.k()).expect("labels below k")
}

/// Draws `(Z, A)`: labels first in node order from the label stream, then
/// every pair `i < j` in lexicographic order from the edge stream, with
/// `a_ij = 1` iff a uniform draw falls below `P[z_i][z_j]`.
pub fn sample(params: &SbmParams, n: usize, seed: u64) -> Result<(Labeling, Graph)> {
    if n < 2 {
        return Err(SbmError::Argument(format!("n = {n} must be at least 2")));
    }
    let p = params.probabilities(n)?;
    let z = sample_labels(params, n, seed);
    let mut rng = stream(seed, EDGE_STREAM);
    let mut edges = Vec::new();
    for i in 0..n {
        let row = p.row(z.get(i));
        for j in (i + 1)..n {
            if rng.random::<f64>() < row[z.get(j)] {
                edges.push((i, j));
            }
        }
    }
    let g = Graph::from_edges(n, edges)?;
    Ok((z, g))
}

/// `[P_R]_ab`, the block-averaged edge probability seen through the
/// confusion matrix `R = R(e, z)`.
pub fn mixture_probability(
    r: &ConfusionMatrix,
    params: &SbmParams,
    n: usize,
) -> Result<Matrix<f64>> {
    let k = r.k();
    if params.k() != k {
        return Err(SbmError::Dimension(format!(
            "confusion matrix is {k}x{k} but the model has k = {}",
            params.k()
        )));
    }
    let p = params.probabilities(n)?;
    mixture_from_p(r.matrix(), &p, n)
}

pub(crate) fn mixture_from_p(r: &Matrix<f64>, p: &Matrix<f64>, n: usize) -> Result<Matrix<f64>> {
    let k = r.dim();
    let inv_n = 1.0 / n as f64;
    let rpr = r.matmul(p).matmul(&r.transpose());
    let row = r.row_sums();
    let mut out = Matrix::zeros(k);
    for a in 0..k {
        let self_pairs: f64 = (0..k).map(|c| p[(c, c)] * r[(a, c)]).sum::<f64>() * inv_n;
        for b in 0..k {
            let (num, den) = if a == b {
                (rpr[(a, a)] - self_pairs, row[a] * (row[a] - inv_n))
            } else {
                (rpr[(a, b)], row[a] * row[b])
            };
            // the diagonal denominator is exactly zero for singleton rows
            if den <= 0.5 * inv_n * inv_n {
                return Err(SbmError::DegenerateBlock(a, b));
            }
            out[(a, b)] = num / den;
        }
    }
    Ok(out)
}

/// `E(o_ab(e) | Z = z)` as a direct sum over ordered pairs `i != j`.
pub fn expected_edge_counts(e: &Labeling, z: &Labeling, params: &SbmParams) -> Result<Matrix<f64>> {
    check_pair(e, z)?;
    let n = e.len();
    let p = params.probabilities(n)?;
    let k = e.k();
    // group by (e_i, z_i) so the pair sum runs over k^4 cells
    let mut cells = Matrix::<u64>::zeros(k);
    for (&a, &c) in e.labels().iter().zip(z.labels()) {
        cells[(a, c)] += 1;
    }
    let mut out = Matrix::zeros(k);
    for a in 0..k {
        for b in 0..k {
            let mut acc = 0.0;
            for c in 0..k {
                for d in 0..k {
                    let pairs = pair_count(cells[(a, c)], cells[(b, d)], a == b && c == d);
                    acc += pairs as f64 * p[(c, d)];
                }
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}
