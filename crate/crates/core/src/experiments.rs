//! Separation and sparsity sweeps on balanced symmetric models, and the
//! Monte-Carlo concentration diagnostics.
//!
//! Replicate `r` of every grid point uses the network seed
//! `derive_seed(base_seed, r)` and the search seed
//! `derive_seed(network_seed, 1)`, so grid points share their random
//! streams and differ only through the model parameters.

use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::index::sample as sample_indices;

use crate::error::{Result, SbmError};
use crate::estimators::{greedy_argmax, Alpha, SearchConfig};
use crate::graph::{block_counters, misclassification, Labeling};
use crate::metrics::{mean, quantile, std_error};
use crate::modularity::Objective;
use crate::rng::{derive_seed, stream, SEARCH_STREAM};
use crate::sampler::{sample, RhoMode, SbmParams};
use crate::theory::w_deviation;

/// Within-community scale used when solving `s1` from a separation target.
pub const DEFAULT_S2: f64 = 1.0;
/// Separation `(sqrt(s1) - sqrt(s2))²` of the sparsity sweep.
pub const SPARSITY_SEPARATION: f64 = 2.10;

/// Greedy restarts per fit in the sweeps. A single restart from a random
/// labeling reaches the planted optimum only about a third of the time at
/// `k = 3`, so ten restarts leave visible search failures.
pub const SWEEP_RESTARTS: usize = 30;
pub const CSV_HEADER: &str =
    "n,k,s1,s2,separation,rho,replicate_seed,objective,nmi,misclassified,runtime_ms";

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub n: usize,
    pub k: usize,
    pub reps: usize,
    pub base_seed: u64,
    pub restarts: usize,
    pub max_sweeps: usize,
    pub alpha: Alpha,
    pub s2: f64,
    pub keep_labelings: bool,
    /// Record wall-clock fit time; otherwise `runtime_ms` is written as 0
    /// and the CSV is byte-for-byte reproducible.
    pub timings: bool,
}

impl SweepConfig {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            reps: 50,
            base_seed: 1,
            restarts: SWEEP_RESTARTS,
            max_sweeps: 100,
            alpha: Alpha::new(1, 20).expect("valid alpha"),
            s2: DEFAULT_S2,
            keep_labelings: false,
            timings: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub k: usize,
    pub s1: f64,
    pub s2: f64,
    pub separation: f64,
    pub rho: f64,
    pub replicate_seed: u64,
    pub objective: Objective,
    pub nmi: f64,
    pub misclassified: usize,
    pub runtime_ms: f64,
}

impl SweepRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.k,
            self.s1,
            self.s2,
            self.separation,
            self.rho,
            self.replicate_seed,
            self.objective,
            self.nmi,
            self.misclassified,
            self.runtime_ms
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub row: SweepRow,
    /// `(estimate, truth)` when `keep_labelings` is set.
    pub labelings: Option<(Labeling, Labeling)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryPoint {
    pub x: f64,
    pub objective: Objective,
    pub mean_nmi: f64,
    pub std_error: f64,
    pub reps: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    /// Grid points skipped because some `P` entry left `(0, 1)`.
    pub warnings: Vec<String>,
}

impl SweepOutput {
    pub fn rows(&self) -> impl Iterator<Item = &SweepRow> {
        self.records.iter().map(|r| &r.row)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{CSV_HEADER}").unwrap();
        for row in self.rows() {
            writeln!(out, "{}", row.csv_line()).unwrap();
        }
        out
    }

    /// Mean NMI and its standard error per grid value and objective, in
    /// grid order.
    pub fn summarize(&self, x: impl Fn(&SweepRow) -> f64) -> Vec<SummaryPoint> {
        let mut out: Vec<SummaryPoint> = Vec::new();
        let mut groups: Vec<(f64, Objective, Vec<f64>)> = Vec::new();
        for row in self.rows() {
            let key = (x(row), row.objective);
            match groups
                .iter_mut()
                .find(|(gx, go, _)| *gx == key.0 && *go == key.1)
            {
                Some(g) => g.2.push(row.nmi),
                None => groups.push((key.0, key.1, vec![row.nmi])),
            }
        }
        for (x, objective, v) in groups {
            out.push(SummaryPoint {
                x,
                objective,
                mean_nmi: mean(&v),
                std_error: std_error(&v),
                reps: v.len(),
            });
        }
        out
    }
}

/// `s1 = (sqrt(s2) + sqrt(separation))²`.
pub fn s1_for_separation(separation: f64, s2: f64) -> f64 {
    (s2.sqrt() + separation.sqrt()).powi(2)
}

/// Separations `0, k/4, ..., 2k` (nine points).
pub fn default_separation_grid(k: usize) -> Vec<f64> {
    (0..=8).map(|i| i as f64 * k as f64 / 4.0).collect()
}

/// Eight evenly spaced values from `1/n` to `log(n)/n`.
pub fn default_rho_grid(n: usize) -> Vec<f64> {
    let lo = RhoMode::OneOverN.at(n);
    let hi = RhoMode::LogNOverN.at(n);
    (0..8).map(|i| lo + (hi - lo) * i as f64 / 7.0).collect()
}

#[derive(Clone, Copy)]
struct GridPoint {
    s1: f64,
    s2: f64,
    separation: f64,
    rho: f64,
}

/// Separation sweep: `rho = log(n)/n`, `s2` fixed, `s1` solved from each
/// separation.
pub fn sweep_separation(cfg: &SweepConfig, separations: &[f64]) -> Result<SweepOutput> {
    let rho = RhoMode::LogNOverN.at(cfg.n);
    let points = separations
        .iter()
        .map(|&sep| {
            if sep.is_nan() || sep < 0.0 {
                return Err(SbmError::Argument(format!(
                    "separation {sep} must be nonnegative"
                )));
            }
            Ok(GridPoint {
                s1: s1_for_separation(sep, cfg.s2),
                s2: cfg.s2,
                separation: sep,
                rho,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    run_grid(cfg, &points)
}

/// Sparsity sweep: fixed separation, varying `rho`.
pub fn sweep_sparsity(cfg: &SweepConfig, separation: f64, rhos: &[f64]) -> Result<SweepOutput> {
    let s1 = s1_for_separation(separation, cfg.s2);
    let points: Vec<GridPoint> = rhos
        .iter()
        .map(|&rho| GridPoint {
            s1,
            s2: cfg.s2,
            separation,
            rho,
        })
        .collect();
    run_grid(cfg, &points)
}

fn run_grid(cfg: &SweepConfig, points: &[GridPoint]) -> Result<SweepOutput> {
    if cfg.reps == 0 {
        return Err(SbmError::Argument("reps must be at least 1".into()));
    }
    let mut warnings = Vec::new();
    let mut tasks = Vec::new();
    for (gi, p) in points.iter().enumerate() {
        let params = SbmParams::symmetric(cfg.k, p.s1, p.s2, RhoMode::Const(p.rho))
            .and_then(|params| params.probabilities(cfg.n).map(|_| params));
        match params {
            Ok(params) => tasks.extend((0..cfg.reps).map(|rep| (gi, rep, params.clone()))),
            Err(e) => warnings.push(format!(
                "skipping separation {} at rho {}: {e}",
                p.separation, p.rho
            )),
        }
    }
    let run = |(gi, rep, params): &(usize, usize, SbmParams)| {
        run_replicate(cfg, &points[*gi], params, *rep)
    };

    #[cfg(feature = "parallel")]
    let results: Vec<Result<Vec<SweepRecord>>> = {
        use rayon::prelude::*;
        tasks.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<Vec<SweepRecord>>> = tasks.iter().map(run).collect();

    let mut records = Vec::with_capacity(tasks.len() * 2);
    for r in results {
        records.extend(r?);
    }
    Ok(SweepOutput { records, warnings })
}

fn run_replicate(
    cfg: &SweepConfig,
    p: &GridPoint,
    params: &SbmParams,
    rep: usize,
) -> Result<Vec<SweepRecord>> {
    let replicate_seed = derive_seed(cfg.base_seed, rep as u64);
    let (truth, g) = sample(params, cfg.n, replicate_seed)?;
    let mut out = Vec::with_capacity(2);
    for objective in [Objective::Ml, Objective::Icl] {
        let search = SearchConfig::new(objective, cfg.alpha)
            .restarts(cfg.restarts)
            .max_sweeps(cfg.max_sweeps)
            .seed(derive_seed(replicate_seed, 1));
        // Instant is unavailable on wasm32, so only touch it when asked
        let start = cfg.timings.then(Instant::now);
        let fit = greedy_argmax(&g, cfg.k, &search)?;
        let runtime_ms = start.map_or(0.0, |t| t.elapsed().as_secs_f64() * 1e3);
        let row = SweepRow {
            n: cfg.n,
            k: cfg.k,
            s1: p.s1,
            s2: p.s2,
            separation: p.separation,
            rho: p.rho,
            replicate_seed,
            objective,
            nmi: crate::metrics::nmi(&fit.labeling, &truth)?,
            misclassified: misclassification(&fit.labeling, &truth)?,
            runtime_ms,
        };
        out.push(SweepRecord {
            row,
            labelings: cfg.keep_labelings.then(|| (fit.labeling, truth.clone())),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConcentrationReport {
    pub n: usize,
    pub rho: f64,
    pub delta: f64,
    /// Mean over replicates of `sup_ab |o_ab/n_ab - rho S_ab|`.
    pub empirical_sup_deviation: f64,
    /// Radius `sqrt(delta * rho * log n) / n`.
    pub theoretical_bound: f64,
    pub replicates: usize,
    pub violation_fraction: f64,
    /// Whether `W(z, z)` was exactly zero in every replicate.
    pub w_truth_zero: bool,
}

/// Samples `reps` networks and measures how often the block frequencies at
/// the true labeling stray from `rho S` by more than
/// `sqrt(delta * rho * log n) / n`.
pub fn concentration_experiment(
    params: &SbmParams,
    n: usize,
    reps: usize,
    delta: f64,
    seed: u64,
) -> Result<ConcentrationReport> {
    if reps < 100 {
        return Err(SbmError::Argument(format!(
            "reps = {reps} must be at least 100"
        )));
    }
    if delta.is_nan() || delta < 0.0 {
        return Err(SbmError::Argument(format!(
            "delta = {delta} must be nonnegative"
        )));
    }
    let p = params.probabilities(n)?;
    let rho = params.rho(n);
    let nf = n as f64;
    let radius = (delta * rho * nf.ln()).sqrt() / nf;
    let one = |r: usize| -> Result<(f64, bool)> {
        let (z, g) = sample(params, n, derive_seed(seed, r as u64))?;
        let c = block_counters(&g, &z)?;
        let k = z.k();
        let mut sup = 0.0f64;
        for a in 0..k {
            for b in 0..k {
                let pairs = c.pairs(a, b);
                if pairs > 0 {
                    sup = sup.max((c.edges(a, b) as f64 / pairs as f64 - p[(a, b)]).abs());
                }
            }
        }
        let w = w_deviation(&g, &z, &z, params)?;
        Ok((sup, w.as_slice().iter().all(|&x| x == 0.0)))
    };

    #[cfg(feature = "parallel")]
    let results: Vec<Result<(f64, bool)>> = {
        use rayon::prelude::*;
        (0..reps).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<(f64, bool)>> = (0..reps).map(one).collect();

    let mut sups = Vec::with_capacity(reps);
    let mut w_truth_zero = true;
    for r in results {
        let (s, w0) = r?;
        sups.push(s);
        w_truth_zero &= w0;
    }
    let violations = sups.iter().filter(|&&s| s >= radius).count();
    Ok(ConcentrationReport {
        n,
        rho,
        delta,
        empirical_sup_deviation: mean(&sups),
        theoretical_bound: radius,
        replicates: reps,
        violation_fraction: violations as f64 / reps as f64,
        w_truth_zero,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WDiagnostic {
    pub n: usize,
    pub misclassified: usize,
    pub rho: f64,
    /// 99th percentile of `max_ab |W_ab(e, z)|`.
    pub p99_max_abs_w: f64,
    /// `c` such that the percentile equals `c * rho * m / n`.
    pub fitted_c: f64,
}

/// Distribution of `max_ab |W_ab(e, z)|` when `e` moves `m` random nodes of
/// the true labeling to the next community.
pub fn w_diagnostic(
    params: &SbmParams,
    n: usize,
    m: usize,
    reps: usize,
    seed: u64,
) -> Result<WDiagnostic> {
    if m == 0 || m > n {
        return Err(SbmError::Argument(format!("m = {m} must lie in 1..={n}")));
    }
    let k = params.k();
    let mut maxima = Vec::with_capacity(reps);
    for r in 0..reps {
        let s = derive_seed(seed, r as u64);
        let (z, g) = sample(params, n, s)?;
        let mut rng = stream(s, SEARCH_STREAM);
        let mut labels = z.labels().to_vec();
        for i in sample_indices(&mut rng, n, m) {
            labels[i] = (labels[i] + 1) % k;
        }
        let e = Labeling::new(labels, k)?;
        let w = w_deviation(&g, &e, &z, params)?;
        maxima.push(w.as_slice().iter().fold(0.0f64, |acc, x| acc.max(x.abs())));
    }
    let rho = params.rho(n);
    let p99 = quantile(&maxima, 0.99);
    Ok(WDiagnostic {
        n,
        misclassified: m,
        rho,
        p99_max_abs_w: p99,
        fitted_c: p99 * n as f64 / (rho * m as f64),
    })
}
