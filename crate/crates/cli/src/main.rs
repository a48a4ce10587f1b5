use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sbm_core::experiments::{
    concentration_experiment, default_rho_grid, default_separation_grid, sweep_separation,
    sweep_sparsity, w_diagnostic, SweepConfig, SweepOutput, SweepRow, DEFAULT_S2,
    SPARSITY_SEPARATION, SWEEP_RESTARTS,
};
use sbm_core::io::{
    format_edge_list, format_labeling, format_params, parse_edge_list, parse_labeling,
    parse_params, sig12,
};
use sbm_core::plot::{Chart, Series};
use sbm_core::verify::{verify_with, VerifyOptions};
use sbm_core::{
    ch_constant, exact_argmax, greedy_argmax, misclassification, nmi, sample, Alpha, Objective,
    RhoMode, SbmParams, SearchConfig,
};
use serde_json::json;

mod config;

#[derive(Parser)]
#[command(
    name = "sbm",
    version,
    about = "Stochastic block model sampling, fitting and experiments"
)]
#[command(
    after_help = "Any flag can also come from a key-value file: --config FILE (keys use _ or -)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a network and its community labels.
    Sample(SampleArgs),
    /// Fit communities by maximizing the ML or ICL modularity.
    Fit(FitArgs),
    /// Compare two labeling files (NMI and misclassification).
    Eval(EvalArgs),
    /// Chernoff-Hellinger constant C(pi, S) and the recovery verdicts.
    Constant(ConstantArgs),
    /// Mean NMI as the separation (sqrt(s1) - sqrt(s2))^2 grows.
    SweepSeparation(SweepSeparationArgs),
    /// Mean NMI as the sparsity rho grows at fixed separation.
    SweepSparsity(SweepSparsityArgs),
    /// Concentration of block frequencies around rho * S.
    Concentration(ConcentrationArgs),
    /// Run the self-check suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
#[command(args_override_self = true)]
struct ModelArgs {
    /// Parameter file (k, pi, S rows, rho or rho_mode).
    #[arg(long, conflicts_with_all = ["k", "s1", "s2"])]
    params: Option<PathBuf>,
    /// Balanced symmetric model: number of communities.
    #[arg(long)]
    k: Option<usize>,
    /// Within-community rate of the symmetric model.
    #[arg(long)]
    s1: Option<f64>,
    /// Between-community rate of the symmetric model.
    #[arg(long)]
    s2: Option<f64>,
    #[arg(long, value_enum, default_value_t = RhoArg::LogNOverN)]
    rho_mode: RhoArg,
    /// Constant rho (with --rho-mode const).
    #[arg(long)]
    rho: Option<f64>,
    /// Multiplier c for --rho-mode c-log-n-over-n.
    #[arg(long, default_value_t = 1.0)]
    rho_c: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum RhoArg {
    Const,
    LogNOverN,
    OneOverN,
    CLogNOverN,
}

impl ModelArgs {
    fn resolve(&self, default: Option<(usize, f64, f64)>) -> Result<SbmParams> {
        if let Some(path) = &self.params {
            let text = read(path)?;
            return parse_params(&text).with_context(|| format!("in {}", path.display()));
        }
        let (k, s1, s2) = match (self.k, self.s1, self.s2, default) {
            (Some(k), Some(s1), Some(s2), _) => (k, s1, s2),
            (k, s1, s2, Some((dk, d1, d2))) => {
                (k.unwrap_or(dk), s1.unwrap_or(d1), s2.unwrap_or(d2))
            }
            _ => bail!("give --params FILE or all of --k, --s1, --s2"),
        };
        let rho = match self.rho_mode {
            RhoArg::Const => RhoMode::Const(self.rho.context("--rho-mode const needs --rho")?),
            RhoArg::LogNOverN => RhoMode::LogNOverN,
            RhoArg::OneOverN => RhoMode::OneOverN,
            RhoArg::CLogNOverN => RhoMode::ScaledLogNOverN(self.rho_c),
        };
        Ok(SbmParams::symmetric(k, s1, s2, rho)?)
    }
}

#[derive(Args)]
#[command(args_override_self = true)]
struct SampleArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge list output (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Planted labels output.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Ml,
    Icl,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Ml => Objective::Ml,
            ObjectiveArg::Icl => Objective::Icl,
        }
    }
}

#[derive(Args)]
#[command(args_override_self = true)]
struct FitArgs {
    /// Edge list with an `n k` header.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Icl)]
    objective: ObjectiveArg,
    /// Number of communities (defaults to k from the header).
    #[arg(long)]
    k: Option<usize>,
    /// Smallest community fraction, as a decimal or `p/q`.
    #[arg(long, default_value = "0.05")]
    alpha: Alpha,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    #[arg(long, default_value_t = 100)]
    max_sweeps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Enumerate every labeling instead of hill climbing.
    #[arg(long)]
    exact: bool,
    /// The edge list has no header; n is the largest node index.
    #[arg(long)]
    no_header: bool,
    /// Labeling output (one label per line).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    estimate: PathBuf,
    truth: PathBuf,
}

#[derive(Args)]
#[command(args_override_self = true)]
struct ConstantArgs {
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
#[command(args_override_self = true)]
struct SweepArgs {
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 50)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = SWEEP_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = 100)]
    max_sweeps: usize,
    #[arg(long, default_value = "0.05")]
    alpha: Alpha,
    #[arg(long, default_value_t = DEFAULT_S2)]
    s2: f64,
    /// CSV output (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG chart of mean NMI with standard-error bars.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Directory for the estimated and true labeling of every row.
    #[arg(long)]
    keep_labelings: Option<PathBuf>,
    /// Record wall-clock fit times (makes the CSV nondeterministic).
    #[arg(long)]
    timings: bool,
}

impl SweepArgs {
    fn config(&self) -> SweepConfig {
        let mut cfg = SweepConfig::new(self.n, self.k);
        cfg.reps = self.reps;
        cfg.base_seed = self.seed;
        cfg.restarts = self.restarts;
        cfg.max_sweeps = self.max_sweeps;
        cfg.alpha = self.alpha;
        cfg.s2 = self.s2;
        cfg.keep_labelings = self.keep_labelings.is_some();
        cfg.timings = self.timings;
        cfg
    }
}

#[derive(Args)]
#[command(args_override_self = true)]
struct SweepSeparationArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    /// Comma-separated separations (default 0, k/4, ..., 2k).
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
}

#[derive(Args)]
#[command(args_override_self = true)]
struct SweepSparsityArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    #[arg(long, default_value_t = SPARSITY_SEPARATION)]
    separation: f64,
    /// Comma-separated rho values (default: 8 points from 1/n to log(n)/n).
    #[arg(long, value_delimiter = ',')]
    rhos: Option<Vec<f64>>,
}

#[derive(Args)]
#[command(args_override_self = true)]
struct ConcentrationArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Comma-separated network sizes.
    #[arg(long, value_delimiter = ',', default_value = "100,200,400")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    reps: usize,
    #[arg(long, default_value_t = 4.0)]
    delta: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also report W(e, z) when e relabels this many nodes.
    #[arg(long)]
    w_misclassified: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Replace tau by 2*tau in the gap check (the suite must then fail).
    #[arg(long, hide = true)]
    corrupt_tau: bool,
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    PropertyFailure,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_sample(a: &SampleArgs) -> Result<Status> {
    let params = a.model.resolve(None)?;
    for w in params.warnings() {
        eprintln!("warning: {w}");
    }
    let (z, g) = sample(&params, a.n, a.seed)?;
    emit(a.out.as_deref(), &format_edge_list(&g, Some(params.k())))?;
    if let Some(path) = &a.labels {
        write(path, &format_labeling(&z))?;
    }
    Ok(Status::Ok)
}

fn run_fit(a: &FitArgs) -> Result<Status> {
    let parsed = parse_edge_list(&read(&a.input)?, !a.no_header)
        .with_context(|| format!("in {}", a.input.display()))?;
    let k =
        a.k.or(parsed.k)
            .context("k is missing: pass --k or put it in the header")?;
    let objective = Objective::from(a.objective);
    let cfg = SearchConfig::new(objective, a.alpha)
        .restarts(a.restarts)
        .max_sweeps(a.max_sweeps)
        .seed(a.seed);
    let fit = if a.exact {
        exact_argmax(&parsed.graph, k, &cfg)?
    } else {
        greedy_argmax(&parsed.graph, k, &cfg)?
    };
    let labels = format_labeling(&fit.labeling);
    if let Some(p) = &a.out {
        write(p, &labels)?;
    }
    let meta = json!({
        "objective": objective.to_string(),
        "objective_value": sig12(fit.objective_value),
        "n": parsed.graph.n(),
        "k": k,
        "alpha": a.alpha.to_string(),
        "method": if a.exact { "exact" } else { "greedy" },
        "restarts": if a.exact { 0 } else { a.restarts },
        "restart_index": fit.restart_index,
        "sweeps": fit.sweeps_used,
        "feasible": fit.feasible,
        "seed": a.seed,
    });
    println!("{meta}");
    if a.out.is_none() {
        print!("{labels}");
    }
    Ok(Status::Ok)
}

fn run_eval(a: &EvalArgs) -> Result<Status> {
    let e = parse_labeling(&read(&a.estimate)?, None)?;
    let z = parse_labeling(&read(&a.truth)?, None)?;
    let k = e.k().max(z.k());
    let (e, z) = (
        parse_labeling(&read(&a.estimate)?, Some(k))?,
        parse_labeling(&read(&a.truth)?, Some(k))?,
    );
    let m = misclassification(&e, &z)?;
    println!("nmi {}", sig12(nmi(&e, &z)?));
    println!("misclassified {m}");
    println!(
        "misclassified_fraction {}",
        sig12(m as f64 / e.len() as f64)
    );
    Ok(Status::Ok)
}

fn run_constant(a: &ConstantArgs) -> Result<Status> {
    let params = a.model.resolve(None)?;
    let c = ch_constant(&params)?;
    let k = params.k();
    println!("C {}", sig12(c.value));
    println!("argmax_t {}", sig12(c.argmax_t));
    println!(
        "argmin_pair {} {}",
        c.argmin_pair.0 + 1,
        c.argmin_pair.1 + 1
    );
    println!("ml_exact_recovery (C >= 1) {}", c.ml_threshold_met());
    println!(
        "icl_exact_recovery (C >= 1 + k^2 = {}) {}",
        1 + k * k,
        c.icl_threshold_met(k)
    );
    Ok(Status::Ok)
}

fn write_labelings(dir: &Path, out: &SweepOutput) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (i, rec) in out.records.iter().enumerate() {
        if let Some((est, truth)) = &rec.labelings {
            let stem = format!("row{:05}_{}", i + 1, rec.row.objective);
            write(
                &dir.join(format!("{stem}_estimate.txt")),
                &format_labeling(est),
            )?;
            write(
                &dir.join(format!("{stem}_truth.txt")),
                &format_labeling(truth),
            )?;
        }
    }
    Ok(())
}

fn finish_sweep(
    a: &SweepArgs,
    out: &SweepOutput,
    x_name: &str,
    x: fn(&SweepRow) -> f64,
    marker: Option<f64>,
) -> Result<Status> {
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    emit(a.out.as_deref(), &out.to_csv())?;
    if let Some(dir) = &a.keep_labelings {
        write_labelings(dir, out)?;
    }
    let summary = out.summarize(x);
    let mut text = String::new();
    let mut worst_gap = 0.0f64;
    let xs: Vec<f64> = summary
        .iter()
        .filter(|p| p.objective == Objective::Ml)
        .map(|p| p.x)
        .collect();
    for &xv in &xs {
        let get = |o: Objective| summary.iter().find(|p| p.x == xv && p.objective == o);
        let (ml, icl) = (get(Objective::Ml), get(Objective::Icl));
        if let (Some(ml), Some(icl)) = (ml, icl) {
            worst_gap = worst_gap.max((ml.mean_nmi - icl.mean_nmi).abs());
            writeln!(
                text,
                "{x_name} {} ml_nmi {} icl_nmi {}",
                sig12(xv),
                sig12(ml.mean_nmi),
                sig12(icl.mean_nmi)
            )
            .unwrap();
        }
    }
    let soft = if worst_gap <= 0.1 { "ok" } else { "exceeded" };
    writeln!(
        text,
        "max |ml - icl| mean NMI gap {} ({soft}, soft limit 0.1)",
        sig12(worst_gap)
    )
    .unwrap();
    eprint!("{text}");
    if let Some(path) = &a.plot {
        let series = [Objective::Ml, Objective::Icl]
            .into_iter()
            .map(|o| Series {
                name: o.to_string().to_uppercase(),
                points: summary
                    .iter()
                    .filter(|p| p.objective == o)
                    .map(|p| (p.x, p.mean_nmi, p.std_error))
                    .collect(),
            })
            .collect();
        let chart = Chart {
            title: format!("n = {}, k = {}, {} replicates", a.n, a.k, a.reps),
            x_label: x_name.to_string(),
            y_label: "mean NMI".into(),
            series,
            marker,
            y_range: (0.0, 1.0),
        };
        write(path, &chart.to_svg())?;
    }
    Ok(Status::Ok)
}

fn run_sweep_separation(a: &SweepSeparationArgs) -> Result<Status> {
    let cfg = a.sweep.config();
    let grid = a
        .grid
        .clone()
        .unwrap_or_else(|| default_separation_grid(cfg.k));
    let out = sweep_separation(&cfg, &grid)?;
    finish_sweep(
        &a.sweep,
        &out,
        "separation",
        |r| r.separation,
        Some(cfg.k as f64),
    )
}

fn run_sweep_sparsity(a: &SweepSparsityArgs) -> Result<Status> {
    let cfg = a.sweep.config();
    let rhos = a.rhos.clone().unwrap_or_else(|| default_rho_grid(cfg.n));
    let out = sweep_sparsity(&cfg, a.separation, &rhos)?;
    let log_n = RhoMode::LogNOverN.at(cfg.n);
    finish_sweep(&a.sweep, &out, "rho", |r| r.rho, Some(log_n))
}

fn run_concentration(a: &ConcentrationArgs) -> Result<Status> {
    let params = a.model.resolve(Some((2, 4.0, 1.0)))?;
    print!("{}", format_params(&params));
    println!("delta {}", sig12(a.delta));
    println!("n rho radius mean_sup_deviation violation_fraction w_truth_zero");
    for &n in &a.n {
        let r = concentration_experiment(&params, n, a.reps, a.delta, a.seed)?;
        println!(
            "{} {} {} {} {} {}",
            r.n,
            sig12(r.rho),
            sig12(r.theoretical_bound),
            sig12(r.empirical_sup_deviation),
            sig12(r.violation_fraction),
            r.w_truth_zero
        );
    }
    if let Some(m) = a.w_misclassified {
        println!("n m p99_max_abs_w fitted_c");
        for &n in &a.n {
            let d = w_diagnostic(&params, n, m.min(n), a.reps, a.seed)?;
            println!(
                "{} {} {} {}",
                d.n,
                d.misclassified,
                sig12(d.p99_max_abs_w),
                sig12(d.fitted_c)
            );
        }
    }
    Ok(Status::Ok)
}

fn run_verify(a: &VerifyArgs) -> Result<Status> {
    let report = verify_with(
        a.seed,
        VerifyOptions {
            corrupt_tau: a.corrupt_tau,
        },
    );
    print!("{}", report.render());
    Ok(if report.passed() {
        Status::Ok
    } else {
        Status::PropertyFailure
    })
}

fn main() -> ExitCode {
    let args: Vec<OsString> = std::env::args_os().collect();
    let args = match config::expand(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    let result = match &cli.command {
        Command::Sample(a) => run_sample(a),
        Command::Fit(a) => run_fit(a),
        Command::Eval(a) => run_eval(a),
        Command::Constant(a) => run_constant(a),
        Command::SweepSeparation(a) => run_sweep_separation(a),
        Command::SweepSparsity(a) => run_sweep_sparsity(a),
        Command::Concentration(a) => run_concentration(a),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::PropertyFailure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
