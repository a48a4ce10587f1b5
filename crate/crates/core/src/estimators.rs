//! Maximizers of `Q_ML` / `Q_ICL` over labelings whose communities all hold
//! at least `alpha * n` nodes.
//!
//! [`exact_argmax`] enumerates every partition for toy graphs;
//! [`greedy_argmax`] runs best-improvement single-node relabeling from
//! random feasible starts, keeping block counters and block terms up to date
//! incrementally.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SbmError};
use crate::graph::{check_len, Graph, Labeling};
use crate::matrix::Matrix;
use crate::modularity::{sum_sorted, Objective};
use crate::rng::{derive_seed, stream, SEARCH_STREAM};

pub use crate::graph::Alpha;

/// Largest `k^n` that [`exact_argmax`] accepts.
pub const EXACT_LIMIT: f64 = 2e7;
/// Random initial labelings tried before falling back to a stratified fill.
pub const INIT_ATTEMPTS: usize = 1000;
/// A move must raise the unnormalized objective (nats) by more than this.
pub const IMPROVE_EPS: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub objective: Objective,
    pub alpha: Alpha,
    pub restarts: usize,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(objective: Objective, alpha: Alpha) -> Self {
        Self {
            objective,
            alpha,
            restarts: 10,
            max_sweeps: 100,
            seed: 0,
        }
    }

    pub fn restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn max_sweeps(mut self, max_sweeps: usize) -> Self {
        self.max_sweeps = max_sweeps;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self, n: usize, k: usize) -> Result<()> {
        if k == 0 {
            return Err(SbmError::Argument("k must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(SbmError::Argument("restarts must be at least 1".into()));
        }
        if !self.alpha.feasible(n, k) {
            return Err(SbmError::Infeasible(format!(
                "alpha = {} needs {} nodes per community, but n = {n} cannot hold k = {k} such communities",
                self.alpha,
                self.alpha.min_size(n)
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    /// Communities renumbered by first occurrence.
    pub labeling: Labeling,
    pub objective_value: f64,
    pub objective: Objective,
    pub sweeps_used: usize,
    pub restart_index: usize,
    pub feasible: bool,
}

/// Global maximizer by enumeration of all partitions of `0..n` into exactly
/// `k` nonempty communities (one canonical representative per relabeling
/// class, visited in lexicographic order).
pub fn exact_argmax(g: &Graph, k: usize, cfg: &SearchConfig) -> Result<FitResult> {
    let n = g.n();
    let size = (k as f64).powi(n as i32);
    if size > EXACT_LIMIT {
        return Err(SbmError::SearchSpace {
            size,
            limit: EXACT_LIMIT,
        });
    }
    cfg.validate(n, k)?;
    let mut search = Enumerator {
        g,
        k,
        objective: cfg.objective,
        min_size: cfg.alpha.min_size(n),
        labels: vec![0; n],
        sizes: vec![0; k],
        o: Matrix::zeros(k),
        best: None,
    };
    search.descend(0, 0);
    let (value, labels) = search.best.ok_or_else(|| {
        SbmError::Infeasible(format!("no partition satisfies alpha = {}", cfg.alpha))
    })?;
    let labeling = Labeling::new(labels, k)?;
    let objective_value = cfg.objective.evaluate(g, &labeling)?;
    debug_assert!((objective_value - value).abs() <= 1e-12 * value.abs().max(1.0));
    Ok(FitResult {
        feasible: cfg.alpha.contains(&labeling),
        labeling,
        objective_value,
        objective: cfg.objective,
        sweeps_used: 0,
        restart_index: 0,
    })
}

struct Enumerator<'g> {
    g: &'g Graph,
    k: usize,
    objective: Objective,
    min_size: usize,
    labels: Vec<usize>,
    sizes: Vec<u64>,
    o: Matrix<u64>,
    best: Option<(f64, Vec<usize>)>,
}

impl Enumerator<'_> {
    fn descend(&mut self, i: usize, used: usize) {
        let n = self.labels.len();
        if i == n {
            if used == self.k && self.sizes.iter().all(|&s| s as usize >= self.min_size) {
                let value = value_from_counts(self.objective, &self.sizes, &self.o, n);
                if self.best.as_ref().is_none_or(|(b, _)| value > *b) {
                    self.best = Some((value, self.labels.clone()));
                }
            }
            return;
        }
        // every still-unused label needs at least one of the remaining nodes
        if self.k - used > n - i {
            return;
        }
        let top = (used + 1).min(self.k);
        for l in 0..top {
            self.assign(i, l, true);
            self.descend(i + 1, used.max(l + 1));
            self.assign(i, l, false);
        }
    }

    fn assign(&mut self, i: usize, l: usize, add: bool) {
        self.labels[i] = l;
        let step = |x: &mut u64, by: u64| {
            if add {
                *x += by
            } else {
                *x -= by
            }
        };
        step(&mut self.sizes[l], 1);
        for &j in self.g.neighbors(i).iter().take_while(|&&j| j < i) {
            let c = self.labels[j];
            if c == l {
                step(&mut self.o[(l, l)], 2);
            } else {
                step(&mut self.o[(l, c)], 1);
                step(&mut self.o[(c, l)], 1);
            }
        }
    }
}

fn tilde_counts(sizes: &[u64], o: &Matrix<u64>, a: usize, b: usize) -> (u64, u64) {
    if a == b {
        let s = sizes[a];
        (s * s.saturating_sub(1) / 2, o[(a, a)] / 2)
    } else {
        (sizes[a] * sizes[b], o[(a, b)])
    }
}

fn value_from_counts(objective: Objective, sizes: &[u64], o: &Matrix<u64>, n: usize) -> f64 {
    let k = sizes.len();
    let mut terms = Vec::with_capacity(k * (k + 1) / 2);
    for a in 0..k {
        for b in a..k {
            let (pairs, edges) = tilde_counts(sizes, o, a, b);
            terms.push(objective.block_term(pairs, edges));
        }
    }
    let nf = n as f64;
    sum_sorted(terms) / (nf * nf)
}

/// Mutable search state: a labeling with its counters and cached block terms.
#[derive(Clone, Debug)]
pub struct SearchState<'g> {
    g: &'g Graph,
    objective: Objective,
    labels: Vec<usize>,
    sizes: Vec<u64>,
    o: Matrix<u64>,
    /// Unnormalized block terms, stored at `(a, b)` with `a <= b`.
    terms: Matrix<f64>,
    total: f64,
    nbr: Vec<u64>,
}

impl<'g> SearchState<'g> {
    pub fn new(g: &'g Graph, z: &Labeling, objective: Objective) -> Result<Self> {
        check_len(g.n(), z.len())?;
        let k = z.k();
        let sizes: Vec<u64> = z.sizes().into_iter().map(|s| s as u64).collect();
        let mut o = Matrix::zeros(k);
        for (i, j) in g.edges() {
            let (a, b) = (z.get(i), z.get(j));
            o[(a, b)] += 1;
            o[(b, a)] += 1;
        }
        let mut state = Self {
            g,
            objective,
            labels: z.labels().to_vec(),
            sizes,
            o,
            terms: Matrix::zeros(k),
            total: 0.0,
            nbr: vec![0; k],
        };
        for a in 0..k {
            for b in a..k {
                let (pairs, edges) = tilde_counts(&state.sizes, &state.o, a, b);
                state.terms[(a, b)] = objective.block_term(pairs, edges);
                state.total += state.terms[(a, b)];
            }
        }
        Ok(state)
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labeling(&self) -> Labeling {
        Labeling::new(self.labels.clone(), self.k()).expect("labels stay below k")
    }

    /// Running objective value, normalized by `n²`.
    pub fn value(&self) -> f64 {
        let nf = self.g.n() as f64;
        self.total / (nf * nf)
    }

    fn load_neighbors(&mut self, i: usize) {
        self.nbr.iter_mut().for_each(|d| *d = 0);
        for &j in self.g.neighbors(i) {
            self.nbr[self.labels[j]] += 1;
        }
    }

    /// Edge count of the ordered block `(x, y)` after moving a node with
    /// neighbor counts `self.nbr` from `a` to `b`.
    fn moved_o(&self, x: usize, y: usize, a: usize, b: usize) -> u64 {
        let shift = |c: usize| (c == b) as i64 - (c == a) as i64;
        let v =
            self.o[(x, y)] as i64 + shift(x) * self.nbr[y] as i64 + shift(y) * self.nbr[x] as i64;
        debug_assert!(v >= 0);
        v as u64
    }

    fn moved_term(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        let size = |c: usize| self.sizes[c] + (c == b) as u64 - (c == a) as u64;
        let (pairs, edges) = if x == y {
            let s = size(x);
            (s * s.saturating_sub(1) / 2, self.moved_o(x, x, a, b) / 2)
        } else {
            (size(x) * size(y), self.moved_o(x, y, a, b))
        };
        self.objective.block_term(pairs, edges)
    }

    fn affected_blocks(k: usize, a: usize, b: usize) -> impl Iterator<Item = (usize, usize)> {
        let ordered = |x: usize, y: usize| if x <= y { (x, y) } else { (y, x) };
        (0..k)
            .map(move |c| ordered(a, c))
            .chain((0..k).filter(move |&c| c != a).map(move |c| ordered(b, c)))
    }

    fn delta_loaded(&self, i: usize, b: usize) -> f64 {
        let a = self.labels[i];
        if a == b {
            return 0.0;
        }
        Self::affected_blocks(self.k(), a, b)
            .map(|(x, y)| self.moved_term(x, y, a, b) - self.terms[(x, y)])
            .sum()
    }

    /// Change of the unnormalized objective if node `i` moves to `b`.
    pub fn move_delta(&mut self, i: usize, b: usize) -> f64 {
        self.load_neighbors(i);
        self.delta_loaded(i, b)
    }

    /// Best admissible target for node `i` (ties go to the smallest label),
    /// with its unnormalized gain; `None` when `i` cannot leave its community.
    pub fn best_move(&mut self, i: usize, min_size: usize) -> Option<(usize, f64)> {
        let a = self.labels[i];
        if (self.sizes[a] as usize) <= min_size {
            return None;
        }
        self.load_neighbors(i);
        let mut best: Option<(usize, f64)> = None;
        for b in (0..self.k()).filter(|&b| b != a) {
            let d = self.delta_loaded(i, b);
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((b, d));
            }
        }
        best
    }

    /// Moves node `i` to community `b`, updating counters and block terms.
    pub fn apply_move(&mut self, i: usize, b: usize) {
        let a = self.labels[i];
        if a == b {
            return;
        }
        self.load_neighbors(i);
        let k = self.k();
        let blocks: Vec<(usize, usize)> = Self::affected_blocks(k, a, b).collect();
        let mut delta = 0.0;
        let mut fresh = Vec::with_capacity(blocks.len());
        for &(x, y) in &blocks {
            let t = self.moved_term(x, y, a, b);
            delta += t - self.terms[(x, y)];
            fresh.push(t);
        }
        let mut updated = Vec::with_capacity(4 * k);
        for c in 0..k {
            for (x, y) in [(a, c), (c, a), (b, c), (c, b)] {
                updated.push(((x, y), self.moved_o(x, y, a, b)));
            }
        }
        for ((x, y), v) in updated {
            self.o[(x, y)] = v;
        }
        self.sizes[a] -= 1;
        self.sizes[b] += 1;
        self.labels[i] = b;
        for (&(x, y), t) in blocks.iter().zip(fresh) {
            self.terms[(x, y)] = t;
        }
        self.total += delta;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClimbOutcome {
    pub labeling: Labeling,
    pub sweeps: usize,
    pub moves: usize,
    /// Normalized objective after each accepted move.
    pub trace: Vec<f64>,
}

/// Hill climbing from `init`: sweeps visit nodes in random order and apply
/// the best admissible single-node relabeling when it improves the
/// objective, until a sweep makes no move or `cfg.max_sweeps` is reached.
pub fn climb(
    g: &Graph,
    init: &Labeling,
    cfg: &SearchConfig,
    rng: &mut ChaCha8Rng,
) -> Result<ClimbOutcome> {
    let min_size = cfg.alpha.min_size(g.n());
    let mut state = SearchState::new(g, init, cfg.objective)?;
    let mut order: Vec<usize> = (0..g.n()).collect();
    let mut sweeps = 0;
    let mut moves = 0;
    let mut trace = Vec::new();
    while sweeps < cfg.max_sweeps {
        sweeps += 1;
        order.shuffle(rng);
        let mut moved = false;
        for &i in &order {
            if let Some((b, gain)) = state.best_move(i, min_size) {
                if gain > IMPROVE_EPS {
                    state.apply_move(i, b);
                    moves += 1;
                    moved = true;
                    trace.push(state.value());
                }
            }
        }
        if !moved {
            break;
        }
    }
    Ok(ClimbOutcome {
        labeling: state.labeling(),
        sweeps,
        moves,
        trace,
    })
}

/// Uniform labels resampled until admissible; after [`INIT_ATTEMPTS`]
/// failures, a round-robin fill over a random node order.
pub fn random_feasible_labeling(
    n: usize,
    k: usize,
    alpha: &Alpha,
    rng: &mut ChaCha8Rng,
) -> Labeling {
    for _ in 0..INIT_ATTEMPTS {
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let z = Labeling::new(labels, k).expect("labels below k");
        if alpha.contains(&z) {
            return z;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut labels = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        labels[i] = pos % k;
    }
    Labeling::new(labels, k).expect("labels below k")
}

struct RestartOutcome {
    value: f64,
    labeling: Labeling,
    sweeps: usize,
}

fn run_restart(g: &Graph, k: usize, cfg: &SearchConfig, index: usize) -> Result<RestartOutcome> {
    let mut rng = stream(derive_seed(cfg.seed, index as u64), SEARCH_STREAM);
    let init = random_feasible_labeling(g.n(), k, &cfg.alpha, &mut rng);
    let out = climb(g, &init, cfg, &mut rng)?;
    let labeling = out.labeling.canonical();
    Ok(RestartOutcome {
        value: cfg.objective.evaluate(g, &labeling)?,
        labeling,
        sweeps: out.sweeps,
    })
}

/// Best of `cfg.restarts` hill climbs. Restart `r` draws from the search
/// stream of `derive_seed(cfg.seed, r)`; ties go to the lowest restart.
pub fn greedy_argmax(g: &Graph, k: usize, cfg: &SearchConfig) -> Result<FitResult> {
    cfg.validate(g.n(), k)?;
    #[cfg(feature = "parallel")]
    let outcomes: Vec<Result<RestartOutcome>> = {
        use rayon::prelude::*;
        (0..cfg.restarts)
            .into_par_iter()
            .map(|r| run_restart(g, k, cfg, r))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<Result<RestartOutcome>> = (0..cfg.restarts)
        .map(|r| run_restart(g, k, cfg, r))
        .collect();

    let mut best: Option<(usize, RestartOutcome)> = None;
    for (r, out) in outcomes.into_iter().enumerate() {
        let out = out?;
        if best.as_ref().is_none_or(|(_, b)| out.value > b.value) {
            best = Some((r, out));
        }
    }
    let (restart_index, out) = best.expect("at least one restart");
    Ok(FitResult {
        feasible: cfg.alpha.contains(&out.labeling),
        labeling: out.labeling,
        objective_value: out.value,
        objective: cfg.objective,
        sweeps_used: out.sweeps,
        restart_index,
    })
}
