use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbm_core::theory::{chernoff_hellinger, d_constant, g_s_gap, h_pn, ht, k1, kt, x_statistic};
use sbm_core::{
    ch_constant, confusion, metrics, sample, ConfusionMatrix, Matrix, RhoMode, SbmParams,
};

fn random_params(r: &mut ChaCha8Rng, k: usize) -> SbmParams {
    let raw: Vec<f64> = (0..k).map(|_| r.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut s = Matrix::zeros(k);
    for a in 0..k {
        for b in a..k {
            let v = r.random_range(0.01..=10.0);
            s[(a, b)] = v;
            s[(b, a)] = v;
        }
    }
    SbmParams::new(
        raw.iter().map(|x| x / total).collect(),
        s,
        RhoMode::Const(0.001),
    )
    .unwrap()
}

#[test]
fn divergence_endpoints_to_machine_precision() {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let p: f64 = r.random_range(f64::EPSILON..=10.0);
        let q: f64 = r.random_range(f64::EPSILON..=10.0);
        let scale = p.max(q).max(1.0);
        assert!((kt(1.0, p, q) - k1(p, q)).abs() <= 1e-12 * scale * (1.0 + (p / q).ln().abs()));
        assert!(kt(0.0, p, q).abs() <= 1e-15 * scale);
        assert!(ht(0.0, p, q).abs() <= 1e-15 * scale && ht(1.0, p, q).abs() <= 1e-15 * scale);
        let t: f64 = r.random();
        assert!((ht(t, p, q) - ht(1.0 - t, q, p)).abs() <= 1e-12 * scale);
        assert!(ht(t, p, q) >= -1e-12 * scale);
        // H_t is concave and K_t convex in t
        let (t1, t2) = (r.random::<f64>(), r.random::<f64>());
        let mid = 0.5 * (t1 + t2);
        assert!(ht(mid, p, q) >= 0.5 * (ht(t1, p, q) + ht(t2, p, q)) - 1e-12 * scale);
        assert!(kt(mid, p, q) <= 0.5 * (kt(t1, p, q) + kt(t2, p, q)) + 1e-12 * scale);
    }
}

#[test]
fn golden_section_agrees_with_grid_search() {
    let mut r = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1000 {
        let k = r.random_range(2..=3);
        let params = random_params(&mut r, k);
        let (pi, s) = (params.pi(), params.s());
        let mut grid = f64::INFINITY;
        for b in 0..k {
            for b2 in (0..k).filter(|&x| x != b) {
                let best = (0..=10_000)
                    .map(|i| {
                        let t = i as f64 * 1e-4;
                        (0..k)
                            .map(|a| pi[a] * ht(t, s[(a, b)], s[(a, b2)]))
                            .sum::<f64>()
                    })
                    .fold(f64::NEG_INFINITY, f64::max);
                let (_, golden) = chernoff_hellinger(pi, s, b, b2);
                assert!((golden - best).abs() < 1e-6);
                grid = grid.min(best);
            }
        }
        assert!((ch_constant(&params).unwrap().value - grid).abs() < 1e-6);
    }
}

#[test]
fn closed_forms_for_symmetric_models() {
    let mut r = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let s1: f64 = r.random_range(f64::EPSILON..=10.0);
        let s2: f64 = r.random_range(f64::EPSILON..=10.0);
        let sep = (s1.sqrt() - s2.sqrt()).powi(2);
        for k in 2..=5 {
            let params = SbmParams::symmetric(k, s1, s2, RhoMode::LogNOverN).unwrap();
            let c = ch_constant(&params).unwrap();
            assert!((c.value - sep / k as f64).abs() < 1e-9);
        }
    }
    let at_threshold = SbmParams::symmetric(2, 9.0, 1.0, RhoMode::LogNOverN).unwrap();
    let c = ch_constant(&at_threshold).unwrap();
    assert!((c.value - 2.0).abs() < 1e-12);
    assert!(c.ml_threshold_met() && !c.icl_threshold_met(2));
    assert!((c.argmax_t - 0.5).abs() < 1e-6);
}

#[test]
fn equal_columns_give_zero_constant() {
    let s = Matrix::from_rows(vec![
        vec![2.0, 2.0, 1.0],
        vec![2.0, 2.0, 1.0],
        vec![1.0, 1.0, 3.0],
    ])
    .unwrap();
    let params = SbmParams::new(vec![0.3, 0.3, 0.4], s, RhoMode::Const(0.01)).unwrap();
    let c = ch_constant(&params).unwrap();
    assert!(c.value.abs() < 1e-15);
    assert_eq!(c.argmin_pair, (0, 1));
    assert!(ch_constant(&SbmParams::symmetric(1, 1.0, 1.0, RhoMode::Const(0.1)).unwrap()).is_err());
}

#[test]
fn d_constant_dominates_endpoint_divergences() {
    let s = Matrix::from_rows(vec![vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap();
    let d = d_constant(&s).unwrap();
    let want = [(4.0, 3.0), (3.0, 4.0), (1.0, 1.0)]
        .iter()
        .map(|&(p, q)| k1(p, q))
        .fold(0.0f64, f64::max);
    assert!((d - want).abs() < 1e-12);
}

#[test]
fn g_s_gap_is_nonnegative_and_zero_on_permuted_diagonals() {
    let mut r = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..300 {
        let k = r.random_range(2..=4);
        let params = random_params(&mut r, k);
        let mut raw = Matrix::from_fn(k, |_, _| r.random_range(0.0..1.0));
        let total = raw.sum();
        raw = raw.scale(1.0 / total);
        assert!(g_s_gap(&raw, params.s()).unwrap() >= -1e-12);

        let w: Vec<f64> = (0..k).map(|_| r.random_range(0.1..1.0)).collect();
        let sum: f64 = w.iter().sum();
        let shift = r.random_range(0..k);
        let perm_diag = Matrix::from_fn(k, |a, b| {
            if (b + shift) % k == a {
                w[b] / sum
            } else {
                0.0
            }
        });
        assert!(g_s_gap(&perm_diag, params.s()).unwrap().abs() < 1e-12);
    }
}

#[test]
fn h_pn_needs_two_members_per_row() {
    let params = SbmParams::symmetric(2, 2.0, 1.0, RhoMode::Const(0.2)).unwrap();
    let n = 4.0;
    let singleton = Matrix::from_rows(vec![vec![1.0 / n, 0.0], vec![1.0 / n, 2.0 / n]]).unwrap();
    let r = ConfusionMatrix::from_matrix(singleton).unwrap();
    assert!(h_pn(&r, &params, 4).is_err());
}

#[test]
fn x_at_truth_shrinks_with_n() {
    let s = Matrix::from_rows(vec![vec![5.0, 1.0], vec![1.0, 5.0]]).unwrap();
    let params = SbmParams::new(vec![0.5, 0.5], s, RhoMode::LogNOverN).unwrap();
    let medians: Vec<f64> = [50usize, 100, 200]
        .iter()
        .map(|&n| {
            let xs: Vec<f64> = (0..60)
                .map(|seed| {
                    let (z, g) = sample(&params, n, 1000 + seed).unwrap();
                    x_statistic(&g, &z, &z, &params).unwrap().abs()
                })
                .collect();
            metrics::median(&xs)
        })
        .collect();
    assert!(
        medians[0] > medians[1] && medians[1] > medians[2],
        "{medians:?}"
    );
    let (z, _) = sample(&params, 50, 1).unwrap();
    assert!(confusion(&z, &z).unwrap().matrix().is_symmetric());
}
