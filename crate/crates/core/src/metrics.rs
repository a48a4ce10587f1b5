//! Partition comparison and small summary statistics.

use std::collections::HashMap;

use crate::error::{Result, SbmError};
use crate::graph::Labeling;

/// Normalized mutual information `2 I(e; z) / (H(e) + H(z))` with plug-in
/// entropies in nats. Two single-cluster partitions score 1; a single-cluster
/// partition against a split one scores 0. `e` and `z` may use different `k`.
pub fn nmi(e: &Labeling, z: &Labeling) -> Result<f64> {
    if e.len() != z.len() {
        return Err(SbmError::Dimension(format!(
            "labelings have lengths {} and {}",
            e.len(),
            z.len()
        )));
    }
    let n = e.len();
    if n == 0 {
        return Err(SbmError::Argument("NMI of empty labelings".into()));
    }
    let (ke, kz) = (e.nonempty_communities(), z.nonempty_communities());
    match (ke <= 1, kz <= 1) {
        (true, true) => return Ok(1.0),
        (true, false) | (false, true) => return Ok(0.0),
        _ => {}
    }
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    for (&a, &b) in e.labels().iter().zip(z.labels()) {
        *joint.entry((a, b)).or_default() += 1;
    }
    let pe = e.sizes();
    let pz = z.sizes();
    let nf = n as f64;
    let entropy = |sizes: &[usize]| -> f64 {
        sizes
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / nf;
                -p * p.ln()
            })
            .sum()
    };
    let mut cells: Vec<_> = joint.into_iter().collect();
    cells.sort_unstable();
    let mi: f64 = cells
        .into_iter()
        .map(|((a, b), c)| {
            let p = c as f64 / nf;
            // p / (pa pb) = c n / (n_a n_b)
            p * ((c as f64 * nf) / (pe[a] as f64 * pz[b] as f64)).ln()
        })
        .sum();
    let h = entropy(&pe) + entropy(&pz);
    Ok((2.0 * mi / h).clamp(0.0, 1.0))
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean (sample standard deviation over `sqrt(len)`).
pub fn std_error(xs: &[f64]) -> f64 {
    let len = xs.len();
    if len < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (len - 1) as f64;
    (var / len as f64).sqrt()
}

/// Average ranks (1-based) with ties sharing their mean rank.
pub fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &t in &idx[i..=j] {
            out[t] = r;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (Pearson correlation of average ranks).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (ranks(x), ranks(y));
    let (mx, my) = (mean(&rx), mean(&ry));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Empirical quantile with linear interpolation between order statistics.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}
