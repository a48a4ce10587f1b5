//! Divergences between edge rates, the Chernoff-Hellinger constant
//! `C(pi, S)`, and the expectation-based pieces of `Q_ML`.

use crate::error::{Result, SbmError};
use crate::graph::{
    block_counters, check_len, check_pair, confusion, ConfusionMatrix, Graph, Labeling,
};
use crate::matrix::Matrix;
use crate::modularity::{normalized, tau_counts};
use crate::sampler::{expected_edge_counts, mixture_from_p, SbmParams};

pub use crate::modularity::tau;

/// `γ(x) = x log x - x`
pub fn gamma_fn(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    x * x.ln() - x
}

/// Bernoulli Kullback-Leibler divergence `KL(p || q)`.
pub fn kl(p: f64, q: f64) -> f64 {
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
    term(p, q) + term(1.0 - p, 1.0 - q)
}

/// `K_1(p || q) = p log(p/q) + q - p`
pub fn k1(p: f64, q: f64) -> f64 {
    p * (p / q).ln() + q - p
}

/// `K_t(p || q) = p^(1-t) q^t + t p log(p/q) - p`
pub fn kt(t: f64, p: f64, q: f64) -> f64 {
    p.powf(1.0 - t) * q.powf(t) + t * p * (p / q).ln() - p
}

/// `H_t(p || q) = (1-t) p + t q - p^(1-t) q^t`
pub fn ht(t: f64, p: f64, q: f64) -> f64 {
    (1.0 - t) * p + t * q - p.powf(1.0 - t) * q.powf(t)
}

/// `L(x) = e^x - x - 1`
pub fn big_l(x: f64) -> f64 {
    x.exp_m1() - x
}

/// Iteration cap for the golden-section search over `t`.
pub const T_SEARCH_ITERATIONS: usize = 200;
/// Stop once the bracket for `t` is narrower than this.
pub const T_TOLERANCE: f64 = 1e-12;

/// Golden-section search for the maximum of a concave function on `[lo, hi]`.
pub fn maximize_concave(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..T_SEARCH_ITERATIONS {
        if b - a < T_TOLERANCE {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    let mut best = (t, f(t));
    for edge in [lo, hi] {
        let v = f(edge);
        if v > best.1 {
            best = (edge, v);
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseConstant {
    pub value: f64,
    /// Ordered pair `(b, b')` attaining the minimum; ties go to the
    /// lexicographically smallest pair.
    pub argmin_pair: (usize, usize),
    pub argmax_t: f64,
}

impl PhaseConstant {
    /// Exact recovery threshold for the likelihood estimator at `rho = log n / n`.
    pub fn ml_threshold_met(&self) -> bool {
        self.value >= 1.0
    }

    /// Threshold `C >= 1 + k²` for the integrated likelihood estimator.
    pub fn icl_threshold_met(&self, k: usize) -> bool {
        self.value >= 1.0 + (k * k) as f64
    }
}

/// `max_t Σ_a pi_a H_t(S_ab || S_ab')` for one ordered pair of columns.
pub fn chernoff_hellinger(pi: &[f64], s: &Matrix<f64>, b: usize, b2: usize) -> (f64, f64) {
    let objective = |t: f64| {
        pi.iter()
            .enumerate()
            .map(|(a, &w)| w * ht(t, s[(a, b)], s[(a, b2)]))
            .sum::<f64>()
    };
    maximize_concave(objective, 0.0, 1.0)
}

/// `C(pi, S) = min_{b != b'} max_{t in [0,1]} Σ_a pi_a H_t(S_ab || S_ab')`.
/// The sparsity scale of `params` is ignored.
pub fn ch_constant(params: &SbmParams) -> Result<PhaseConstant> {
    let k = params.k();
    if k < 2 {
        return Err(SbmError::Undefined(
            "C(pi, S) needs at least two communities".into(),
        ));
    }
    let mut best: Option<PhaseConstant> = None;
    for b in 0..k {
        for b2 in 0..k {
            if b == b2 {
                continue;
            }
            let (t, value) = chernoff_hellinger(params.pi(), params.s(), b, b2);
            if best.is_none_or(|cur| value < cur.value) {
                best = Some(PhaseConstant {
                    value,
                    argmin_pair: (b, b2),
                    argmax_t: t,
                });
            }
        }
    }
    Ok(best.expect("k >= 2"))
}

/// `D(S) = max_{t, a != a', b != b'} K_t(S_ab || S_a'b')`. `K_t` is convex
/// in `t`, so the maximum over `t` sits at an endpoint.
pub fn d_constant(s: &Matrix<f64>) -> Result<f64> {
    let k = s.dim();
    if k < 2 {
        return Err(SbmError::Undefined(
            "D(S) needs at least two communities".into(),
        ));
    }
    let mut best = f64::NEG_INFINITY;
    for a in 0..k {
        for a2 in (0..k).filter(|&x| x != a) {
            for b in 0..k {
                for b2 in (0..k).filter(|&x| x != b) {
                    let (p, q) = (s[(a, b)], s[(a2, b2)]);
                    best = best.max(kt(0.0, p, q)).max(kt(1.0, p, q));
                }
            }
        }
    }
    Ok(best)
}

/// `G_S(R) = Σ_ab [R S Rᵀ]_ab log([R S Rᵀ]_ab / ([R1]_a [R1]_b))`.
pub fn g_s(r: &ConfusionMatrix, s: &Matrix<f64>) -> Result<f64> {
    g_s_matrix(r.matrix(), s)
}

pub fn g_s_matrix(r: &Matrix<f64>, s: &Matrix<f64>) -> Result<f64> {
    let k = r.dim();
    if s.dim() != k {
        return Err(SbmError::Dimension(format!(
            "R is {k}x{k} but S is {0}x{0}",
            s.dim()
        )));
    }
    let rsr = r.matmul(s).matmul(&r.transpose());
    let rows = r.row_sums();
    let mut total = 0.0;
    for a in 0..k {
        for b in 0..k {
            let num = rsr[(a, b)];
            if num == 0.0 {
                continue;
            }
            let den = rows[a] * rows[b];
            if den <= 0.0 {
                return Err(SbmError::DegenerateBlock(a, b));
            }
            total += num * (num / den).ln();
        }
    }
    Ok(total)
}

/// `G_S(Diag(Rᵀ1)) - G_S(R)`; nonnegative, and zero when some row
/// permutation of `R` is diagonal.
pub fn g_s_gap(r: &Matrix<f64>, s: &Matrix<f64>) -> Result<f64> {
    let d = Matrix::diag(&r.col_sums());
    Ok(g_s_matrix(&d, s)? - g_s_matrix(r, s)?)
}

/// `H_{P,n}(R) = (1/2) Σ_ab [R1]_a ([R1]_b - δ_ab/n) τ([P_R]_ab)`.
pub fn h_pn(r: &ConfusionMatrix, params: &SbmParams, n: usize) -> Result<f64> {
    let p = params.probabilities(n)?;
    h_from_p(r.matrix(), &p, n)
}

fn h_from_p(r: &Matrix<f64>, p: &Matrix<f64>, n: usize) -> Result<f64> {
    let pr = mixture_from_p(r, p, n)?;
    let rows = r.row_sums();
    let inv_n = 1.0 / n as f64;
    let k = r.dim();
    let mut total = 0.0;
    for a in 0..k {
        for b in 0..k {
            let delta = if a == b { inv_n } else { 0.0 };
            total += rows[a] * (rows[b] - delta) * tau(pr[(a, b)]);
        }
    }
    Ok(0.5 * total)
}

/// `X(e, z) = (1/2n²) Σ_ab n_ab(e) [τ(o_ab(e)/n_ab(e)) - τ([P_R(e,z)]_ab)]`.
pub fn x_statistic(g: &Graph, e: &Labeling, z: &Labeling, params: &SbmParams) -> Result<f64> {
    check_len(g.n(), e.len())?;
    check_pair(e, z)?;
    let n = g.n();
    let p = params.probabilities(n)?;
    let r = confusion(e, z)?;
    let pr = mixture_from_p(r.matrix(), &p, n)?;
    let c = block_counters(g, e)?;
    let k = e.k();
    let mut total = 0.0;
    for a in 0..k {
        for b in 0..k {
            let pairs = c.pairs(a, b);
            total += pairs as f64 * (tau_counts(c.edges(a, b), pairs) - tau(pr[(a, b)]));
        }
    }
    let nf = n as f64;
    Ok(total / (2.0 * nf * nf))
}

/// Same quantity through `Q_ML(e) - H_{P,n}(R(e, z))`.
pub fn x_statistic_via_decomposition(
    g: &Graph,
    e: &Labeling,
    z: &Labeling,
    params: &SbmParams,
) -> Result<f64> {
    let c = block_counters(g, e)?;
    let q = normalized(&c, g.n(), crate::modularity::ml_block_term);
    Ok(q - h_pn(&confusion(e, z)?, params, g.n())?)
}

/// `W_ab = (o_ab(e) - E o_ab(e) - o_ab(z) + E o_ab(z)) / n²`.
pub fn w_deviation(
    g: &Graph,
    e: &Labeling,
    z: &Labeling,
    params: &SbmParams,
) -> Result<Matrix<f64>> {
    check_len(g.n(), e.len())?;
    check_pair(e, z)?;
    let ce = block_counters(g, e)?;
    let cz = block_counters(g, z)?;
    let ee = expected_edge_counts(e, z, params)?;
    let ez = expected_edge_counts(z, z, params)?;
    let nf = g.n() as f64;
    let n2 = nf * nf;
    Ok(Matrix::from_fn(e.k(), |a, b| {
        let observed = ce.edges(a, b) as f64 - cz.edges(a, b) as f64;
        let expected = ee[(a, b)] - ez[(a, b)];
        (observed - expected) / n2
    }))
}
