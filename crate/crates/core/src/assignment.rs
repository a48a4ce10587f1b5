//! Maximum-weight perfect assignment on a square integer matrix
//! (Hungarian method, O(k^3)).

/// Returns `sigma` with row `r` assigned to column `sigma[r]`, maximizing
/// `sum_r weights[r][sigma[r]]`.
pub fn max_weight_assignment(weights: &[Vec<i64>]) -> Vec<usize> {
    let n = weights.len();
    if n == 0 {
        return Vec::new();
    }
    debug_assert!(weights.iter().all(|row| row.len() == n));
    let max = weights.iter().flatten().copied().max().unwrap_or(0);
    // minimize max - w
    let cost = |r: usize, c: usize| max - weights[r][c];

    let inf = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut sigma = vec![0usize; n];
    for j in 1..=n {
        if p[j] != 0 {
            sigma[p[j] - 1] = j - 1;
        }
    }
    sigma
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    #[test]
    fn matches_brute_force() {
        let mut state = 12345u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 33) % 20) as i64
        };
        for k in 1..=6 {
            for _ in 0..20 {
                let w: Vec<Vec<i64>> = (0..k).map(|_| (0..k).map(|_| next()).collect()).collect();
                let sigma = max_weight_assignment(&w);
                let got: i64 = (0..k).map(|r| w[r][sigma[r]]).sum();
                let best = (0..k)
                    .permutations(k)
                    .map(|p| (0..k).map(|r| w[r][p[r]]).sum::<i64>())
                    .max()
                    .unwrap();
                assert_eq!(got, best);
                assert_eq!(
                    sigma.iter().copied().sorted().collect::<Vec<_>>(),
                    (0..k).collect::<Vec<_>>()
                );
            }
        }
    }
}
