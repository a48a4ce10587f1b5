//! Graphs, labelings and the combinatorial objects built from them.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use crate::assignment::max_weight_assignment;
use crate::error::{Result, SbmError};
use crate::matrix::Matrix;

/// Largest `k` for which [`misclassification`] enumerates all permutations.
pub const MAX_ENUMERATED_K: usize = 8;

/// Undirected simple graph on nodes `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            adj: vec![Vec::new(); n],
            edges: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n)
            .map(|i| (0..n).filter(|&j| j != i).collect())
            .collect();
        Self {
            n,
            adj,
            edges: n * n.saturating_sub(1) / 2,
        }
    }

    /// Builds a graph from undirected edges. Duplicates (in either
    /// orientation) are merged; self-loops and out-of-range endpoints are
    /// rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(SbmError::Argument(format!(
                    "edge ({i}, {j}) out of range for n = {n}"
                )));
            }
            if i == j {
                return Err(SbmError::Argument(format!("self-loop at node {i}")));
            }
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut count = 0;
        for nbrs in &mut adj {
            nbrs.sort_unstable();
            nbrs.dedup();
            count += nbrs.len();
        }
        Ok(Self {
            n,
            adj,
            edges: count / 2,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// Sorted neighbor list of `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    /// Edges `(i, j)` with `i < j` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, nbrs)| nbrs.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// Community assignment of `n` nodes into `k` labelled communities.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Labeling {
    labels: Vec<usize>,
    k: usize,
}

impl Labeling {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(SbmError::Argument("k must be at least 1".into()));
        }
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
            return Err(SbmError::Argument(format!(
                "label {l} at node {i} is not below k = {k}"
            )));
        }
        Ok(Self { labels, k })
    }

    /// Uses `k = max label + 1`.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().max().map_or(1, |m| m + 1);
        Self::new(labels, k)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn get(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn nonempty_communities(&self) -> usize {
        self.sizes().iter().filter(|&&s| s > 0).count()
    }

    /// Renumbers communities by order of first occurrence. Unused labels
    /// keep the highest numbers.
    pub fn canonical(&self) -> Labeling {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if map[l] == usize::MAX {
                    map[l] = next;
                    next += 1;
                }
                map[l]
            })
            .collect();
        Labeling { labels, k: self.k }
    }

    /// Applies `perm` to every label: node `i` gets `perm[z_i]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Labeling> {
        if perm.len() != self.k {
            return Err(SbmError::Dimension(format!(
                "permutation of length {} for k = {}",
                perm.len(),
                self.k
            )));
        }
        Labeling::new(self.labels.iter().map(|&l| perm[l]).collect(), self.k)
    }
}

/// Community sizes, ordered-pair counts and edge-endpoint counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCounters {
    pub sizes: Vec<u64>,
    pub pair_counts: Matrix<u64>,
    pub edge_counts: Matrix<u64>,
}

impl BlockCounters {
    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    /// `n_ab`: ordered node pairs `(i, j)`, `i != j`, with labels `(a, b)`.
    pub fn pairs(&self, a: usize, b: usize) -> u64 {
        self.pair_counts[(a, b)]
    }

    /// `o_ab`: ordered adjacent pairs; diagonal blocks count each edge twice.
    pub fn edges(&self, a: usize, b: usize) -> u64 {
        self.edge_counts[(a, b)]
    }

    /// Unordered pair count (`n_aa / 2` on the diagonal).
    pub fn tilde_pairs(&self, a: usize, b: usize) -> u64 {
        if a == b {
            self.pairs(a, a) / 2
        } else {
            self.pairs(a, b)
        }
    }

    /// Edge count of the block (`o_aa / 2` on the diagonal).
    pub fn tilde_edges(&self, a: usize, b: usize) -> u64 {
        if a == b {
            self.edges(a, a) / 2
        } else {
            self.edges(a, b)
        }
    }
}

pub(crate) fn pair_count(na: u64, nb: u64, same: bool) -> u64 {
    if same {
        na * na.saturating_sub(1)
    } else {
        na * nb
    }
}

pub fn block_counters(g: &Graph, z: &Labeling) -> Result<BlockCounters> {
    check_len(g.n(), z.len())?;
    let k = z.k();
    let sizes: Vec<u64> = z.sizes().into_iter().map(|s| s as u64).collect();
    let pair_counts = Matrix::from_fn(k, |a, b| pair_count(sizes[a], sizes[b], a == b));
    let mut edge_counts = Matrix::<u64>::zeros(k);
    for (i, j) in g.edges() {
        let (a, b) = (z.get(i), z.get(j));
        edge_counts[(a, b)] += 1;
        edge_counts[(b, a)] += 1;
    }
    Ok(BlockCounters {
        sizes,
        pair_counts,
        edge_counts,
    })
}

/// Joint label frequencies `R_ab = #{i : e_i = a, z_i = b} / n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfusionMatrix {
    r: Matrix<f64>,
    counts: Option<Matrix<u64>>,
}

impl ConfusionMatrix {
    /// Wraps an arbitrary nonnegative matrix whose entries sum to one
    /// (within `1e-9`).
    pub fn from_matrix(r: Matrix<f64>) -> Result<Self> {
        if r.as_slice().iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(SbmError::Argument(
                "confusion matrix entries must be finite and nonnegative".into(),
            ));
        }
        if (r.sum() - 1.0).abs() > 1e-9 {
            return Err(SbmError::Argument(format!(
                "confusion matrix entries sum to {} instead of 1",
                r.sum()
            )));
        }
        Ok(Self { r, counts: None })
    }

    pub fn k(&self) -> usize {
        self.r.dim()
    }

    pub fn matrix(&self) -> &Matrix<f64> {
        &self.r
    }

    /// `n * R` when built from two labelings.
    pub fn counts(&self) -> Option<&Matrix<u64>> {
        self.counts.as_ref()
    }

    /// `R 1`, the community fractions of the first labeling.
    pub fn row_sums(&self) -> Vec<f64> {
        self.r.row_sums()
    }

    /// `R^T 1`, the community fractions of the second labeling.
    pub fn col_sums(&self) -> Vec<f64> {
        self.r.col_sums()
    }

    /// `Diag(R^T 1)`, which equals `R(z, z)`.
    pub fn diag_of_col_sums(&self) -> Matrix<f64> {
        Matrix::diag(&self.col_sums())
    }
}

pub fn confusion(e: &Labeling, z: &Labeling) -> Result<ConfusionMatrix> {
    check_pair(e, z)?;
    let k = e.k();
    let mut counts = Matrix::<u64>::zeros(k);
    for (&a, &b) in e.labels().iter().zip(z.labels()) {
        counts[(a, b)] += 1;
    }
    let n = e.len() as f64;
    let r = Matrix::from_fn(k, |a, b| counts[(a, b)] as f64 / n);
    Ok(ConfusionMatrix {
        r,
        counts: Some(counts),
    })
}

fn confusion_counts(e: &Labeling, z: &Labeling) -> Result<Matrix<u64>> {
    check_pair(e, z)?;
    let mut counts = Matrix::<u64>::zeros(e.k());
    for (&a, &b) in e.labels().iter().zip(z.labels()) {
        counts[(a, b)] += 1;
    }
    Ok(counts)
}

/// Minimum Hamming distance between `e` and any relabeling of `z`.
pub fn misclassification(e: &Labeling, z: &Labeling) -> Result<usize> {
    if e.k() <= MAX_ENUMERATED_K {
        misclassification_by_enumeration(e, z)
    } else {
        misclassification_by_assignment(e, z)
    }
}

pub fn misclassification_by_enumeration(e: &Labeling, z: &Labeling) -> Result<usize> {
    let counts = confusion_counts(e, z)?;
    let k = e.k();
    let best = (0..k)
        .permutations(k)
        .map(|sigma| (0..k).map(|b| counts[(sigma[b], b)]).sum::<u64>())
        .max()
        .unwrap_or(0);
    Ok(e.len() - best as usize)
}

pub fn misclassification_by_assignment(e: &Labeling, z: &Labeling) -> Result<usize> {
    let counts = confusion_counts(e, z)?;
    let k = e.k();
    // rows: labels of z, columns: labels of e
    let weights: Vec<Vec<i64>> = (0..k)
        .map(|b| (0..k).map(|a| counts[(a, b)] as i64).collect())
        .collect();
    let sigma = max_weight_assignment(&weights);
    let agree: u64 = (0..k).map(|b| counts[(sigma[b], b)]).sum();
    Ok(e.len() - agree as usize)
}

/// Fraction of nodes with `e_i != z_i`, evaluated as
/// `(1/2) * ||Diag(R^T 1) - R||_1` on the integer confusion counts.
pub fn misclassification_l1(e: &Labeling, z: &Labeling) -> Result<f64> {
    let counts = confusion_counts(e, z)?;
    let k = e.k();
    let mut col = vec![0u64; k];
    for a in 0..k {
        for (b, c) in col.iter_mut().enumerate() {
            *c += counts[(a, b)];
        }
    }
    let mut norm = 0u64;
    for a in 0..k {
        for b in 0..k {
            let d = if a == b { col[b] } else { 0 };
            norm += d.abs_diff(counts[(a, b)]);
        }
    }
    debug_assert_eq!(norm % 2, 0);
    Ok((norm / 2) as f64 / e.len() as f64)
}

/// Lower bound `alpha` on community fractions, kept as an exact rational so
/// that `n_a >= alpha * n` is decided without rounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Alpha {
    num: u64,
    den: u64,
}

impl Alpha {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 || num >= den {
            return Err(SbmError::Argument(format!(
                "alpha = {num}/{den} must lie in (0, 1)"
            )));
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    /// Recovers the simplest rational (denominator at most `10^6`) that
    /// agrees with `x` to about 12 significant digits, so `0.2` becomes `1/5`.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !(x > 0.0 && x < 1.0) {
            return Err(SbmError::Argument(format!(
                "alpha = {x} must lie in (0, 1)"
            )));
        }
        // continued-fraction convergents
        let (mut h0, mut h1) = (0u64, 1u64);
        let (mut k0, mut k1) = (1u64, 0u64);
        let mut rem = x;
        let mut best = (1u64, 2u64);
        for _ in 0..64 {
            let a = rem.floor();
            let a_int = a as u64;
            let h2 = a_int.saturating_mul(h1).saturating_add(h0);
            let k2 = a_int.saturating_mul(k1).saturating_add(k0);
            if k2 > 1_000_000 {
                break;
            }
            best = (h2, k2);
            if ((h2 as f64 / k2 as f64) - x).abs() <= 1e-12 * x {
                break;
            }
            (h0, h1, k0, k1) = (h1, h2, k1, k2);
            let frac = rem - a;
            if frac <= 0.0 {
                break;
            }
            rem = 1.0 / frac;
        }
        Self::new(best.0, best.1)
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    /// Whether a community of `size` nodes out of `n` meets the bound.
    pub fn admits(&self, size: usize, n: usize) -> bool {
        (size as u128) * (self.den as u128) >= (self.num as u128) * (n as u128)
    }

    /// Smallest admissible community size, `ceil(alpha * n)`.
    pub fn min_size(&self, n: usize) -> usize {
        let prod = (self.num as u128) * (n as u128);
        prod.div_ceil(self.den as u128) as usize
    }

    pub fn contains(&self, z: &Labeling) -> bool {
        z.sizes().into_iter().all(|s| self.admits(s, z.len()))
    }

    /// Whether any labeling of `n` nodes into `k` communities is admissible.
    pub fn feasible(&self, n: usize, k: usize) -> bool {
        self.min_size(n).saturating_mul(k) <= n
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Alpha {
    type Err = SbmError;

    /// Accepts `p/q` or a plain decimal such as `0.05`, both parsed exactly.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || SbmError::Argument(format!("cannot parse alpha from {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p = p.trim().parse().map_err(|_| bad())?;
            let q = q.trim().parse().map_err(|_| bad())?;
            return Alpha::new(p, q);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.chars().any(|c| !c.is_ascii_digit())
            || frac.chars().any(|c| !c.is_ascii_digit())
            || frac.len() > 18
        {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac_v: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac_v))
            .ok_or_else(bad)?;
        Alpha::new(num, den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// True iff every community of `z` holds at least `alpha * n` nodes.
pub fn in_constraint_set(z: &Labeling, alpha: f64) -> Result<bool> {
    Ok(Alpha::from_f64(alpha)?.contains(z))
}

pub(crate) fn check_len(n: usize, len: usize) -> Result<()> {
    if n != len {
        return Err(SbmError::Dimension(format!(
            "labeling has {len} entries but the graph has {n} nodes"
        )));
    }
    Ok(())
}

pub(crate) fn check_pair(e: &Labeling, z: &Labeling) -> Result<()> {
    if e.len() != z.len() {
        return Err(SbmError::Dimension(format!(
            "labelings have lengths {} and {}",
            e.len(),
            z.len()
        )));
    }
    if e.k() != z.k() {
        return Err(SbmError::Dimension(format!(
            "labelings have k = {} and k = {}",
            e.k(),
            z.k()
        )));
    }
    Ok(())
}
