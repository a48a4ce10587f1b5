//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs as a plain binary (`harness = false`).

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbm_core::experiments::concentration_experiment;
use sbm_core::theory::x_statistic_via_decomposition;
use sbm_core::{
    block_counters, ch_constant, confusion, exact_argmax, expected_edge_counts, greedy_argmax,
    misclassification_l1, mixture_probability, q_icl, q_ml, sample, x_statistic, Alpha, Graph,
    Labeling, Matrix, Objective, RhoMode, SbmParams, SearchConfig,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_graph(r: &mut ChaCha8Rng, n: usize) -> Graph {
    let p: f64 = r.random();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if r.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

fn random_labels(r: &mut ChaCha8Rng, n: usize, k: usize) -> Labeling {
    Labeling::new((0..n).map(|_| r.random_range(0..k)).collect(), k).unwrap()
}

fn labels_with_pairs(r: &mut ChaCha8Rng, n: usize, k: usize) -> Labeling {
    loop {
        let z = random_labels(r, n, k);
        if z.sizes().iter().all(|&s| s >= 2) {
            return z;
        }
    }
}

fn random_params(r: &mut ChaCha8Rng, k: usize) -> SbmParams {
    let raw: Vec<f64> = (0..k).map(|_| r.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut s = Matrix::zeros(k);
    for a in 0..k {
        for b in a..k {
            let v = r.random_range(0.01..1.0);
            s[(a, b)] = v;
            s[(b, a)] = v;
        }
    }
    SbmParams::new(
        raw.iter().map(|x| x / total).collect(),
        s,
        RhoMode::Const(1.0),
    )
    .unwrap()
}

fn closed_forms() -> Outcome {
    let mut r = rng(101);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let s1: f64 = r.random_range(f64::EPSILON..=10.0);
        let s2: f64 = r.random_range(f64::EPSILON..=10.0);
        let sep = (s1.sqrt() - s2.sqrt()).powi(2);
        let two =
            ch_constant(&SbmParams::symmetric(2, s1, s2, RhoMode::LogNOverN).unwrap()).unwrap();
        worst = worst.max((two.value - 0.5 * sep).abs());
        for k in 2..=5 {
            let c =
                ch_constant(&SbmParams::symmetric(k, s1, s2, RhoMode::LogNOverN).unwrap()).unwrap();
            worst = worst.max((c.value - sep / k as f64).abs());
        }
    }
    outcome(
        worst < 1e-9,
        format!("max abs error {worst:.2e} (tol 1e-9)"),
    )
}

fn icl_gap() -> Outcome {
    let mut r = rng(102);
    let mut violations = 0;
    for _ in 0..1000 {
        let n = r.random_range(1..=50);
        let k = r.random_range(1..=4);
        let g = random_graph(&mut r, n);
        let z = random_labels(&mut r, n, k);
        let gap = q_ml(&g, &z).unwrap() - q_icl(&g, &z).unwrap();
        let nf = n as f64;
        let bound = (k * k) as f64 * (nf.ln() + 2.0) / (nf * nf);
        if !(0.0..=bound).contains(&gap) {
            violations += 1;
        }
    }
    outcome(
        violations == 0,
        format!("{violations}/1000 cases outside [0, k²(log n + 2)/n²]"),
    )
}

fn l1_identity() -> Outcome {
    let mut r = rng(103);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n = r.random_range(1..=60);
        let k = r.random_range(1..=6);
        let e = random_labels(&mut r, n, k);
        let z = random_labels(&mut r, n, k);
        let hamming = e
            .labels()
            .iter()
            .zip(z.labels())
            .filter(|(a, b)| a != b)
            .count();
        // n R has integer entries, so (n/2)||Diag(Rᵀ1) - R||₁ is evaluated exactly
        let counts = confusion(&e, &z).unwrap();
        let counts = counts.counts().unwrap();
        let mut norm = 0u64;
        for b in 0..k {
            let col: u64 = (0..k).map(|a| counts[(a, b)]).sum();
            for a in 0..k {
                let diag = if a == b { col } else { 0 };
                norm += diag.abs_diff(counts[(a, b)]);
            }
        }
        let lib = misclassification_l1(&e, &z).unwrap();
        if norm != 2 * hamming as u64 || lib != hamming as f64 / n as f64 {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!("{mismatches}/1000 pairs differ from the Hamming count"),
    )
}

fn expectation_identity() -> Outcome {
    let mut r = rng(104);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let k = r.random_range(1..=4);
        let n = r.random_range(2 * k..=40);
        let params = random_params(&mut r, k);
        let e = labels_with_pairs(&mut r, n, k);
        let z = random_labels(&mut r, n, k);
        let p = params.probabilities(n).unwrap();
        let mut pair_sum = Matrix::<f64>::zeros(k);
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                pair_sum[(e.get(i), e.get(j))] += p[(z.get(i), z.get(j))];
            }
        }
        let pr = mixture_probability(&confusion(&e, &z).unwrap(), &params, n).unwrap();
        let c = block_counters(&Graph::empty(n), &e).unwrap();
        let grouped = expected_edge_counts(&e, &z, &params).unwrap();
        for a in 0..k {
            for b in 0..k {
                let want = pair_sum[(a, b)];
                let scale = want.abs().max(f64::MIN_POSITIVE);
                worst = worst.max((c.pairs(a, b) as f64 * pr[(a, b)] - want).abs() / scale);
                worst = worst.max((grouped[(a, b)] - want).abs() / scale);
            }
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max relative error {worst:.2e} (tol 1e-10)"),
    )
}

fn x_decomposition() -> Outcome {
    let mut r = rng(105);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let k = r.random_range(1..=4);
        let n = r.random_range(2 * k..=40);
        let params = random_params(&mut r, k);
        let g = random_graph(&mut r, n);
        let e = labels_with_pairs(&mut r, n, k);
        let z = random_labels(&mut r, n, k);
        let x = x_statistic(&g, &e, &z, &params).unwrap();
        let via = x_statistic_via_decomposition(&g, &e, &z, &params).unwrap();
        worst = worst.max((x - via).abs());
    }
    outcome(
        worst < 1e-10,
        format!("max abs difference {worst:.2e} (tol 1e-10)"),
    )
}

fn search_quality() -> Outcome {
    let s = Matrix::from_rows(vec![vec![0.9, 0.05], vec![0.05, 0.9]]).unwrap();
    let params = SbmParams::new(vec![0.5, 0.5], s, RhoMode::Const(1.0)).unwrap();
    let alpha = Alpha::new(1, 5).unwrap();
    let mut attained = 0;
    for seed in 0..100u64 {
        let (_, g) = sample(&params, 10, 7_000 + seed).unwrap();
        let both = [Objective::Ml, Objective::Icl]
            .into_iter()
            .all(|objective| {
                let cfg = SearchConfig::new(objective, alpha).restarts(20).seed(seed);
                let exact = exact_argmax(&g, 2, &cfg).unwrap();
                let greedy = greedy_argmax(&g, 2, &cfg).unwrap();
                greedy.objective_value == exact.objective_value
            });
        attained += usize::from(both);
    }
    outcome(
        attained >= 95,
        format!("greedy attained the exact optimum on {attained}/100 instances (need 95)"),
    )
}

fn sbm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sbm"))
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = sbm().args(args).output().expect("sbm runs");
    assert!(
        out.status.success() || args[0] == "verify",
        "sbm {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

struct Csv {
    rows: Vec<(f64, f64, String, f64)>,
}

/// Parses the sweep CSV into `(separation, rho, objective, nmi)`.
fn parse_csv(bytes: &[u8]) -> Csv {
    let text = String::from_utf8(bytes.to_vec()).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let (sep, rho, obj, nmi) = (col("separation"), col("rho"), col("objective"), col("nmi"));
    let rows = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[sep].parse().unwrap(),
                f[rho].parse().unwrap(),
                f[obj].to_string(),
                f[nmi].parse().unwrap(),
            )
        })
        .collect();
    Csv { rows }
}

/// Mean NMI per distinct x value, in first-seen order.
fn curve(
    csv: &Csv,
    objective: &str,
    x: impl Fn(&(f64, f64, String, f64)) -> f64,
) -> Vec<(f64, f64)> {
    let mut groups: Vec<(f64, f64, usize)> = Vec::new();
    for row in csv.rows.iter().filter(|r| r.2 == objective) {
        let xv = x(row);
        match groups.iter_mut().find(|g| g.0 == xv) {
            Some(g) => {
                g.1 += row.3;
                g.2 += 1;
            }
            None => groups.push((xv, row.3, 1)),
        }
    }
    groups
        .into_iter()
        .map(|(x, s, c)| (x, s / c as f64))
        .collect()
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        for &t in &idx[i..=j] {
            ranks[t] = (i + j) as f64 / 2.0 + 1.0;
        }
        i = j + 1;
    }
    ranks
}

fn spearman(points: &[(f64, f64)]) -> f64 {
    let rx = average_ranks(&points.iter().map(|p| p.0).collect::<Vec<_>>());
    let ry = average_ranks(&points.iter().map(|p| p.1).collect::<Vec<_>>());
    let m = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / m, ry.iter().sum::<f64>() / m);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

struct SweepRuns {
    separation_k2: Vec<u8>,
    separation_k3: Vec<u8>,
    sparsity: Vec<u8>,
}

fn figure_one(runs: &SweepRuns) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, bytes) in [(2usize, &runs.separation_k2), (3, &runs.separation_k3)] {
        let csv = parse_csv(bytes);
        for objective in ["ml", "icl"] {
            let c = curve(&csv, objective, |r| r.0);
            let at = |x: f64| c.iter().find(|p| p.0 == x).map(|p| p.1).unwrap_or(f64::NAN);
            let (low, high, rho) = (at(0.0), at(2.0 * k as f64), spearman(&c));
            ok &= c.len() >= 8 && high >= 0.85 && low <= 0.3 && rho > 0.9;
            parts.push(format!(
                "k={k} {objective}: NMI(0)={low:.3} NMI(2k)={high:.3} spearman={rho:.3}"
            ));
        }
    }
    outcome(ok, parts.join("; "))
}

fn figure_two(runs: &SweepRuns) -> Outcome {
    let csv = parse_csv(&runs.sparsity);
    let mut ok = true;
    let mut parts = Vec::new();
    for objective in ["ml", "icl"] {
        let c = curve(&csv, objective, |r| r.1);
        let (first, last) = (c.first().unwrap(), c.last().unwrap());
        let one_over_n = 1.0 / 200.0;
        let log_n = 200f64.ln() / 200.0;
        ok &= (first.0 - one_over_n).abs() < 1e-12 && (last.0 - log_n).abs() < 1e-12;
        ok &= first.1 <= 0.3 && last.1 >= 0.8;
        parts.push(format!(
            "{objective}: NMI(1/n)={:.3} NMI(log n/n)={:.3}",
            first.1, last.1
        ));
    }
    outcome(ok, parts.join("; "))
}

fn concentration() -> Outcome {
    let params = SbmParams::symmetric(2, 4.0, 1.0, RhoMode::LogNOverN).unwrap();
    let mut fractions = Vec::new();
    let mut w_zero = true;
    for n in [100, 200, 400] {
        let rep = concentration_experiment(&params, n, 200, 4.0, 1).unwrap();
        fractions.push(rep.violation_fraction);
        w_zero &= rep.w_truth_zero;
    }
    let monotone = fractions.windows(2).all(|w| w[1] <= w[0] + 0.05);
    outcome(
        monotone && w_zero,
        format!("violation fractions {fractions:?} at n = 100, 200, 400; W(z, z) = 0 in all replicates: {w_zero}"),
    )
}

fn determinism(runs: &SweepRuns, verify_first: &[u8]) -> Outcome {
    let verify_second = run_cli(&["verify", "--seed", "3"]);
    let sep_again = run_cli(&separation_args(2));
    let sparsity_again = run_cli(&sparsity_args());
    let same = [
        verify_first == verify_second.as_slice(),
        runs.separation_k2 == sep_again,
        runs.sparsity == sparsity_again,
    ];
    outcome(
        same.iter().all(|&s| s),
        format!(
            "identical bytes: verify {}, sweep-separation {}, sweep-sparsity {}",
            same[0], same[1], same[2]
        ),
    )
}

fn separation_args(k: usize) -> Vec<&'static str> {
    let k: &'static str = if k == 2 { "2" } else { "3" };
    vec![
        "sweep-separation",
        "--n",
        "200",
        "--k",
        k,
        "--reps",
        "50",
        "--seed",
        "1",
    ]
}

fn sparsity_args() -> Vec<&'static str> {
    vec![
        "sweep-sparsity",
        "--n",
        "200",
        "--k",
        "2",
        "--separation",
        "2.10",
        "--reps",
        "50",
        "--seed",
        "1",
    ]
}

fn report(id: usize, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let took = start.elapsed();
    let in_time = took <= limit;
    let passed = o.passed && in_time;
    println!(
        "{} [{id}] {name}: {} ({:.2} s, limit {} s{})",
        if passed { "PASS" } else { "FAIL" },
        o.detail,
        took.as_secs_f64(),
        limit.as_secs(),
        if in_time { "" } else { ", too slow" }
    );
    passed
}

fn main() {
    assert!(Path::new(env!("CARGO_BIN_EXE_sbm")).exists());
    let secs = Duration::from_secs;
    let mut all = true;
    all &= report(1, "closed-form constants", secs(1), closed_forms);
    all &= report(2, "ICL/ML gap bound", secs(10), icl_gap);
    all &= report(3, "misclassification L1 identity", secs(1), l1_identity);
    all &= report(
        4,
        "conditional expectation identity",
        secs(5),
        expectation_identity,
    );
    all &= report(5, "X decomposition", secs(10), x_decomposition);
    all &= report(6, "greedy vs exact search", secs(120), search_quality);

    let mut runs = SweepRuns {
        separation_k2: Vec::new(),
        separation_k3: Vec::new(),
        sparsity: Vec::new(),
    };
    all &= report(7, "separation sweep (n=200, k=2,3)", secs(30 * 60), || {
        runs.separation_k2 = run_cli(&separation_args(2));
        runs.separation_k3 = run_cli(&separation_args(3));
        figure_one(&runs)
    });
    all &= report(8, "sparsity sweep (n=200, k=2)", secs(15 * 60), || {
        runs.sparsity = run_cli(&sparsity_args());
        figure_two(&runs)
    });
    all &= report(
        9,
        "block frequency concentration",
        secs(10 * 60),
        concentration,
    );
    let verify_first = run_cli(&["verify", "--seed", "3"]);
    all &= report(
        10,
        "determinism of verify and sweeps",
        secs(30 * 60),
        || determinism(&runs, &verify_first),
    );

    println!(
        "acceptance: {}",
        if all {
            "all criteria passed"
        } else {
            "some criteria FAILED"
        }
    );
    if !all {
        std::process::exit(1);
    }
}
