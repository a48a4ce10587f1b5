//! Self-check suite: every identity and bound the library relies on,
//! evaluated on seeded random instances.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::estimators::{exact_argmax, greedy_argmax, Alpha, SearchConfig, SearchState};
use crate::graph::{
    confusion, misclassification_by_assignment, misclassification_by_enumeration,
    misclassification_l1, Graph, Labeling,
};
use crate::matrix::Matrix;
use crate::modularity::{gap_bound, q_icl, q_ml, q_ml_with_tau, tau, Objective};
use crate::rng::{derive_seed, stream};
use crate::sampler::{expected_edge_counts, mixture_probability, sample, RhoMode, SbmParams};
use crate::theory::{
    ch_constant, chernoff_hellinger, ht, x_statistic, x_statistic_via_decomposition,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Replace `τ` by `2τ` inside the ICL/ML gap check (mutation test).
    pub corrupt_tau: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Case seed of the first failure; rerun the check's generator on it.
    pub first_failure: Option<u64>,
    pub note: String,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "verify seed={}", self.seed).unwrap();
        for c in &self.checks {
            if c.passed() {
                write!(out, "PASS {} {}/{}", c.name, c.cases, c.cases).unwrap();
            } else {
                write!(
                    out,
                    "FAIL {} {}/{} failed; first failing case seed={}",
                    c.name,
                    c.failures,
                    c.cases,
                    c.first_failure.unwrap_or_default()
                )
                .unwrap();
            }
            if !c.note.is_empty() {
                write!(out, " ({})", c.note).unwrap();
            }
            out.push('\n');
        }
        let passed = self.checks.iter().filter(|c| c.passed()).count();
        writeln!(out, "summary: {passed}/{} checks passed", self.checks.len()).unwrap();
        out
    }
}

pub fn verify_all(seed: u64) -> VerifyReport {
    verify_with(seed, VerifyOptions::default())
}

pub fn verify_with(seed: u64, opts: VerifyOptions) -> VerifyReport {
    let mut checks = Vec::new();
    let mut tag = 0u64;
    let mut run = |name: &'static str, cases: usize, f: &dyn Fn(u64) -> Result<bool>| {
        tag += 1;
        let mut failures = 0;
        let mut first_failure = None;
        for i in 0..cases {
            let case_seed = derive_seed(seed ^ (tag << 48), i as u64);
            if !f(case_seed).unwrap_or(false) {
                failures += 1;
                first_failure.get_or_insert(case_seed);
            }
        }
        checks.push(CheckResult {
            name,
            cases,
            failures,
            first_failure,
            note: String::new(),
        });
    };

    run("icl_ml_gap_bound", 1000, &|s| gap_case(s, opts));
    run("misclassification_l1_identity", 1000, &l1_case);
    run(
        "misclassification_enumeration_vs_assignment",
        300,
        &assignment_case,
    );
    run("expectation_identity", 200, &expectation_case);
    run("x_decomposition", 500, &x_case);
    run("symmetric_closed_forms", 80, &symmetric_case);
    run("constant_grid_agreement", 50, &grid_case);
    run("permutation_invariance", 200, &permutation_case);
    run("incremental_vs_recompute", 100, &incremental_case);
    run("exact_dominates_greedy", 40, &dominance_case);

    // attainment is a rate, reported rather than failed per case
    let attained = (0..40u64)
        .filter(|&i| attainment_case(derive_seed(seed ^ (99 << 48), i)).unwrap_or(false))
        .count();
    if let Some(c) = checks
        .iter_mut()
        .find(|c| c.name == "exact_dominates_greedy")
    {
        c.note = format!(
            "greedy attained the exact optimum for both objectives on {attained}/40 instances"
        );
    }
    VerifyReport { seed, checks }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    stream(seed, 0)
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges).expect("valid edges")
}

fn random_labeling(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Labeling {
    Labeling::new((0..n).map(|_| rng.random_range(0..k)).collect(), k).expect("labels below k")
}

/// Labeling whose communities all have at least `min` members.
fn padded_labeling(rng: &mut ChaCha8Rng, n: usize, k: usize, min: usize) -> Labeling {
    let mut labels: Vec<usize> = (0..n)
        .map(|i| {
            if i < k * min {
                i % k
            } else {
                rng.random_range(0..k)
            }
        })
        .collect();
    labels.shuffle(rng);
    Labeling::new(labels, k).expect("labels below k")
}

fn random_params(rng: &mut ChaCha8Rng, k: usize) -> SbmParams {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let pi: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let mut s = Matrix::zeros(k);
    for a in 0..k {
        for b in a..k {
            let v = rng.random_range(0.01..0.99);
            s[(a, b)] = v;
            s[(b, a)] = v;
        }
    }
    SbmParams::new(pi, s, RhoMode::Const(1.0)).expect("valid params")
}

fn corrupted_tau(x: f64) -> f64 {
    2.0 * tau(x)
}

fn gap_case(seed: u64, opts: VerifyOptions) -> Result<bool> {
    let mut rng = rng_for(seed);
    let n = rng.random_range(2..=50);
    let k = rng.random_range(1..=4);
    let p = rng.random::<f64>();
    let g = random_graph(&mut rng, n, p);
    let z = random_labeling(&mut rng, n, k);
    let ml = if opts.corrupt_tau {
        q_ml_with_tau(&g, &z, corrupted_tau)?
    } else {
        q_ml(&g, &z)?
    };
    let gap = ml - q_icl(&g, &z)?;
    Ok(gap >= 0.0 && gap <= gap_bound(n, k))
}

fn l1_case(seed: u64) -> Result<bool> {
    let mut rng = rng_for(seed);
    let n = rng.random_range(1..=60);
    let k = rng.random_range(1..=6);
    let e = random_labeling(&mut rng, n, k);
    let z = random_labeling(&mut rng, n, k);
    let direct = e
        .labels()
        .iter()
        .zip(z.labels())
        .filter(|(a, b)| a != b)
        .count();
    Ok(misclassification_l1(&e, &z)? == direct as f64 / n as f64)
}

fn assignment_case(seed: u64) -> Result<bool> {
    let mut rng = rng_for(seed);
    let k = rng.random_range(2..=8);
    let n = rng.random_range(1..=30);
    let e = random_labeling(&mut rng, n, k);
    let z = random_labeling(&mut rng, n, k);
    let a = misclassification_by_enumeration(&e, &z)?;
    Ok(a == misclassification_by_assignment(&e, &z)?
        && a == misclassification_by_enumeration(&z, &e)?)
}

fn expectation_case(seed: u64) -> Result<bool> {
    let mut rng = rng_for(seed);
    let k = rng.random_range(1..=4);
    let n = rng.random_range(2 * k.max(1)..=40);
    let params = random_params(&mut rng, k);
    let e = padded_labeling(&mut rng, n, k, 2);
    let z = random_labeling(&mut rng, n, k);
    let direct = expected_edge_counts(&e, &z, &params)?;
    let pr = mixture_probability(&confusion(&e, &z)?, &params, n)?;
    let c = crate::graph::block_counters(&Graph::empty(n), &e)?;
    for a in 0..k {
        for b in 0..k {
            let via = c.pairs(a, b) as f64 * pr[(a, b)];
            let d = direct[(a, b)];
            if (via - d).abs() > 1e-10 * d.abs().max(f64::MIN_POSITIVE) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn x_case(seed: u64) -> Result<bool> {
    let mut rng = rng_for(seed);
    let k = rng.random_range(1..=4);
    let n = rng.random_range(2 * k..=40);
    let params = random_params(&mut rng, k);
    let p = rng.random::<f64>();
    let g = random_graph(&mut rng, n, p);
    let e = padded_labeling(&mut rng, n, k, 2);
    let z = random_labeling(&mut rng, n, k);
    let x = x_statistic(&g, &e, &z, &params)?;
    let via = x_statistic_via_decomposition(&g, &e, &z, &params)?;
    Ok((x - via).abs() < 1e-10)
}

fn symmetric_case(seed: u64) -> Result<bool> {
    let mut rng = rng_for(seed);
    let k = rng.random_range(2..=5);
    let s1: f64 = rng.random_range(f64::EPSILON..=10.0);
    let s2: f64 = rng.random_range(f64::EPSILON..=10.0);
    let params = SbmParams::symmetric(k, s1, s2, RhoMode::Const(0.01))?;
    let want = (s1.sqrt() - s2.sqrt()).powi(2) / k as f64;
    Ok((ch_constant(&params)?.value - want).abs() < 1e-9)
}

fn grid_case(seed: u64) -> Result<bool> {
    let mut rng = rng_for(seed);
    let k = rng.random_range(2..=4);
    let mut params = random_params(&mut rng, k);
    params = SbmParams::new(
        params.pi().to_vec(),
        params.s().scale(10.0),
        RhoMode::Const(0.01),
    )?;
    let c = ch_constant(&params)?;
    let mut grid_min = f64::INFINITY;
    for b in 0..k {
        for b2 in (0..k).filter(|&x| x != b) {
            let best = (0..=10_000)
                .map(|i| {
                    let t = i as f64 * 1e-4;
                    (0..k)
                        .map(|a| params.pi()[a] * ht(t, params.s()[(a, b)], params.s()[(a, b2)]))
                        .sum::<f64>()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            grid_min = grid_min.min(best);
            let (_, golden) = chernoff_hellinger(params.pi(), params.s(), b, b2);
            if golden < best - 1e-12 {
                return Ok(false);
            }
        }
    }
    Ok((grid_min - c.value).abs() < 1e-6)
}

fn permutation_case(seed: u64) -> Result<bool> {
    let mut rng = rng_for(seed);
    let n = rng.random_range(2..=40);
    let k = rng.random_range(1..=5);
    let p = rng.random::<f64>();
    let g = random_graph(&mut rng, n, p);
    let z = random_labeling(&mut rng, n, k);
    let mut perm: Vec<usize> = (0..k).collect();
    perm.shuffle(&mut rng);
    let zp = z.relabeled(&perm)?;
    Ok(q_ml(&g, &z)? == q_ml(&g, &zp)? && q_icl(&g, &z)? == q_icl(&g, &zp)?)
}

fn incremental_case(seed: u64) -> Result<bool> {
    let mut rng = rng_for(seed);
    let n = rng.random_range(4..=40);
    let k = rng.random_range(2..=4);
    let p = rng.random::<f64>();
    let g = random_graph(&mut rng, n, p);
    let z = random_labeling(&mut rng, n, k);
    for objective in [Objective::Ml, Objective::Icl] {
        let mut state = SearchState::new(&g, &z, objective)?;
        for _ in 0..50 {
            let i = rng.random_range(0..n);
            let b = rng.random_range(0..k);
            state.apply_move(i, b);
            let full = objective.evaluate(&g, &state.labeling())?;
            if (state.value() - full).abs() >= 1e-9 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn small_instance(seed: u64) -> Result<Graph> {
    let s = Matrix::from_rows(vec![vec![0.9, 0.05], vec![0.05, 0.9]]).expect("square");
    let params = SbmParams::new(vec![0.5, 0.5], s, RhoMode::Const(1.0))?;
    Ok(sample(&params, 10, seed)?.1)
}

fn dominance_case(seed: u64) -> Result<bool> {
    let g = small_instance(seed)?;
    let alpha = Alpha::new(1, 5)?;
    for objective in [Objective::Ml, Objective::Icl] {
        let cfg = SearchConfig::new(objective, alpha).restarts(3).seed(seed);
        let exact = exact_argmax(&g, 2, &cfg)?;
        let greedy = greedy_argmax(&g, 2, &cfg)?;
        if greedy.objective_value > exact.objective_value || !greedy.feasible || !exact.feasible {
            return Ok(false);
        }
    }
    Ok(true)
}

fn attainment_case(seed: u64) -> Result<bool> {
    let g = small_instance(seed)?;
    let alpha = Alpha::new(1, 5)?;
    let mut all = true;
    for objective in [Objective::Ml, Objective::Icl] {
        let cfg = SearchConfig::new(objective, alpha).restarts(20).seed(seed);
        let exact = exact_argmax(&g, 2, &cfg)?;
        let greedy = greedy_argmax(&g, 2, &cfg)?;
        all &= greedy.objective_value == exact.objective_value;
    }
    Ok(all)
}
