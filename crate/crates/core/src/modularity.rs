//! Likelihood modularity `Q_ML` and integrated conditional likelihood
//! modularity `Q_ICL` (Beta(1/2, 1/2) prior on every block probability).
//!
//! Both objectives are sums over unordered blocks `a <= b` of a term that
//! depends only on the block's pair count `ñ_ab` and edge count `õ_ab`
//! (diagonal counts halved):
//!
//! ```text
//! Q_ML  = (1/n²) Σ_{a<=b} ñ_ab · τ(õ_ab / ñ_ab)
//! Q_ICL = (1/n²) Σ_{a<=b} log B(õ_ab + 1/2, ñ_ab - õ_ab + 1/2) / B(1/2, 1/2)
//! ```
//!
//! The first form equals the ordered-pair sum `(1/2n²) Σ_{a,b} n_ab τ(o_ab/n_ab)`.
//! Block terms are summed in sorted order, so relabeling communities leaves
//! the result bit-for-bit unchanged.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use statrs::function::gamma::ln_gamma;

use crate::error::{Result, SbmError};
use crate::graph::{block_counters, BlockCounters, Graph, Labeling};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Objective {
    Ml,
    Icl,
}

impl Objective {
    pub fn evaluate(self, g: &Graph, z: &Labeling) -> Result<f64> {
        match self {
            Objective::Ml => q_ml(g, z),
            Objective::Icl => q_icl(g, z),
        }
    }

    /// Unnormalized contribution of one unordered block.
    pub fn block_term(self, pairs: u64, edges: u64) -> f64 {
        match self {
            Objective::Ml => ml_block_term(pairs, edges),
            Objective::Icl => icl_block_term(pairs, edges),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Ml => "ml",
            Objective::Icl => "icl",
        })
    }
}

impl FromStr for Objective {
    type Err = SbmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ml" => Ok(Objective::Ml),
            "icl" => Ok(Objective::Icl),
            _ => Err(SbmError::Argument(format!(
                "unknown objective {s:?} (expected ml or icl)"
            ))),
        }
    }
}

/// A modularity value in nats, normalized by `n²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModularityValue {
    pub value: f64,
    pub objective: Objective,
}

pub fn modularity(g: &Graph, z: &Labeling, objective: Objective) -> Result<ModularityValue> {
    Ok(ModularityValue {
        value: objective.evaluate(g, z)?,
        objective,
    })
}

/// `τ(x) = x log x + (1 - x) log(1 - x)` with `τ(0) = τ(1) = 0`.
pub fn tau(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    x * x.ln() + (1.0 - x) * (-x).ln_1p()
}

/// `τ(o / n)` evaluated from counts, using `(n - o) / n` for the
/// complementary fraction.
pub fn tau_counts(edges: u64, pairs: u64) -> f64 {
    if edges == 0 || edges >= pairs {
        return 0.0;
    }
    let nf = pairs as f64;
    let x = edges as f64 / nf;
    let y = (pairs - edges) as f64 / nf;
    x * x.ln() + y * y.ln()
}

pub fn ml_block_term(pairs: u64, edges: u64) -> f64 {
    if pairs == 0 {
        return 0.0;
    }
    pairs as f64 * tau_counts(edges, pairs)
}

/// `log B(o + 1/2, n - o + 1/2) - log B(1/2, 1/2)` through log-gamma.
pub fn icl_block_term(pairs: u64, edges: u64) -> f64 {
    if pairs == 0 {
        return 0.0;
    }
    let (o, n) = (edges as f64, pairs as f64);
    ln_gamma(o + 0.5) + ln_gamma(n - o + 0.5) - ln_gamma(n + 1.0) - PI.ln()
}

pub(crate) fn sum_sorted(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum()
}

pub(crate) fn normalized(
    c: &BlockCounters,
    n: usize,
    mut term: impl FnMut(u64, u64) -> f64,
) -> f64 {
    let k = c.k();
    let mut terms = Vec::with_capacity(k * (k + 1) / 2);
    for a in 0..k {
        for b in a..k {
            terms.push(term(c.tilde_pairs(a, b), c.tilde_edges(a, b)));
        }
    }
    let nf = n as f64;
    sum_sorted(terms) / (nf * nf)
}

/// Likelihood modularity `Q_ML(z)`.
pub fn q_ml(g: &Graph, z: &Labeling) -> Result<f64> {
    let c = block_counters(g, z)?;
    Ok(normalized(&c, g.n(), ml_block_term))
}

/// `Q_ML` with a caller-supplied `τ`; used to check that the self-check
/// suite notices a broken `τ`.
pub(crate) fn q_ml_with_tau(g: &Graph, z: &Labeling, tau_fn: fn(f64) -> f64) -> Result<f64> {
    let c = block_counters(g, z)?;
    Ok(normalized(&c, g.n(), |pairs, edges| {
        if pairs == 0 {
            0.0
        } else {
            pairs as f64 * tau_fn(edges as f64 / pairs as f64)
        }
    }))
}

/// Integrated conditional likelihood modularity `Q_ICL(z)`.
pub fn q_icl(g: &Graph, z: &Labeling) -> Result<f64> {
    let c = block_counters(g, z)?;
    Ok(normalized(&c, g.n(), icl_block_term))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IclMlGap {
    /// `Q_ML - Q_ICL`
    pub gap: f64,
    /// `k² (log n + 2) / n²`
    pub bound: f64,
}

impl IclMlGap {
    pub fn holds(&self) -> bool {
        self.gap >= 0.0 && self.gap <= self.bound
    }
}

pub fn icl_ml_gap(g: &Graph, z: &Labeling) -> Result<IclMlGap> {
    let gap = q_ml(g, z)? - q_icl(g, z)?;
    Ok(IclMlGap {
        gap,
        bound: gap_bound(g.n(), z.k()),
    })
}

pub fn gap_bound(n: usize, k: usize) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    kf * kf * (nf.ln() + 2.0) / (nf * nf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(v: &[usize], k: usize) -> Labeling {
        Labeling::new(v.to_vec(), k).unwrap()
    }

    #[test]
    fn tau_boundaries() {
        assert_eq!(tau(0.0), 0.0);
        assert_eq!(tau(1.0), 0.0);
        assert!((tau(0.5) + 2f64.ln()).abs() < 1e-15);
        assert!(tau(1e-300) <= 0.0);
        assert_eq!(tau_counts(3, 3), 0.0);
        assert!((tau_counts(1, 3) - tau(1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn q_ml_degenerate_graphs() {
        let z = lab(&[0, 1, 0, 1, 1], 2);
        assert_eq!(q_ml(&Graph::empty(5), &z).unwrap(), 0.0);
        assert_eq!(q_ml(&Graph::complete(5), &z).unwrap(), 0.0);
    }

    #[test]
    fn q_ml_single_edge_triangle() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let v = q_ml(&g, &lab(&[0, 0, 0], 1)).unwrap();
        let t: f64 = 1.0 / 3.0;
        let want = (t * t.ln() + (1.0 - t) * (1.0 - t).ln()) / 3.0;
        assert!((v - want).abs() < 1e-15);
        assert!((v + 0.212_171).abs() < 1e-6);
    }

    #[test]
    fn q_icl_two_nodes() {
        let z = lab(&[0, 0], 1);
        let one = q_icl(&Graph::from_edges(2, [(0, 1)]).unwrap(), &z).unwrap();
        let none = q_icl(&Graph::empty(2), &z).unwrap();
        assert!((one - 0.25 * 0.5f64.ln()).abs() < 1e-14);
        assert!((none - one).abs() < 1e-14);
        assert!((one + 0.173_287).abs() < 1e-6);
    }

    #[test]
    fn gap_two_nodes() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let gap = icl_ml_gap(&g, &lab(&[0, 0], 1)).unwrap();
        assert!((gap.gap - 0.173_287).abs() < 1e-6);
        assert!((gap.bound - (2f64.ln() + 2.0) / 4.0).abs() < 1e-15);
        assert!(gap.holds());
    }

    #[test]
    fn gap_empty_graph() {
        for n in [2, 5, 17, 60] {
            let gap = icl_ml_gap(&Graph::empty(n), &lab(&vec![0; n], 1)).unwrap();
            assert!(gap.holds(), "n = {n}: {gap:?}");
        }
    }

    #[test]
    fn empty_communities_contribute_nothing() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3), (1, 2)]).unwrap();
        let z2 = lab(&[0, 0, 1, 1], 2);
        let z4 = lab(&[0, 0, 3, 3], 4);
        assert_eq!(q_ml(&g, &z2).unwrap(), q_ml(&g, &z4).unwrap());
        assert_eq!(q_icl(&g, &z2).unwrap(), q_icl(&g, &z4).unwrap());
    }

    #[test]
    fn objective_parse() {
        assert_eq!("ML".parse::<Objective>().unwrap(), Objective::Ml);
        assert_eq!("icl".parse::<Objective>().unwrap(), Objective::Icl);
        assert!("nope".parse::<Objective>().is_err());
        assert_eq!(Objective::Icl.to_string(), "icl");
    }
}
