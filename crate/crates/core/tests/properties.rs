use proptest::prelude::*;
use sbm_core::io::{format_edge_list, format_labeling, parse_edge_list, parse_labeling};
use sbm_core::{icl_ml_gap, misclassification, nmi, q_icl, q_ml, Graph, Labeling};

fn graph_and_labels(max_n: usize, max_k: usize) -> impl Strategy<Value = (Graph, Labeling)> {
    (2..=max_n, 1..=max_k).prop_flat_map(|(n, k)| {
        let pairs = n * (n - 1) / 2;
        (
            proptest::collection::vec(any::<bool>(), pairs),
            proptest::collection::vec(0..k, n),
        )
            .prop_map(move |(bits, labels)| {
                let edges = (0..n)
                    .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                    .zip(bits)
                    .filter_map(|(e, keep)| keep.then_some(e));
                (
                    Graph::from_edges(n, edges).unwrap(),
                    Labeling::new(labels, k).unwrap(),
                )
            })
    })
}

fn label_pair(
    max_n: usize,
    max_k: usize,
) -> impl Strategy<Value = (Labeling, Labeling, Vec<usize>)> {
    (1..=max_n, 1..=max_k).prop_flat_map(|(n, k)| {
        (
            proptest::collection::vec(0..k, n),
            proptest::collection::vec(0..k, n),
            Just((0..k).collect::<Vec<_>>()).prop_shuffle(),
        )
            .prop_map(move |(a, b, perm)| {
                (
                    Labeling::new(a, k).unwrap(),
                    Labeling::new(b, k).unwrap(),
                    perm,
                )
            })
    })
}

proptest! {
    #[test]
    fn gap_stays_inside_its_bound((g, z) in graph_and_labels(30, 4)) {
        let gap = icl_ml_gap(&g, &z).unwrap();
        prop_assert!(gap.holds(), "{gap:?}");
    }

    #[test]
    fn modularities_ignore_label_names((g, z) in graph_and_labels(25, 4), seed in any::<u64>()) {
        let k = z.k();
        let perm: Vec<usize> = (0..k).map(|a| (a + seed as usize) % k).collect();
        let zp = z.relabeled(&perm).unwrap();
        prop_assert_eq!(q_ml(&g, &z).unwrap(), q_ml(&g, &zp).unwrap());
        prop_assert_eq!(q_icl(&g, &z).unwrap(), q_icl(&g, &zp).unwrap());
        prop_assert!(q_ml(&g, &z).unwrap() <= 0.0);
    }

    #[test]
    fn misclassification_is_a_label_free_distance((e, z, perm) in label_pair(40, 6)) {
        let m = misclassification(&e, &z).unwrap();
        prop_assert_eq!(m, misclassification(&z, &e).unwrap());
        prop_assert_eq!(misclassification(&e.relabeled(&perm).unwrap(), &z).unwrap(), m);
        prop_assert_eq!(misclassification(&z.relabeled(&perm).unwrap(), &z).unwrap(), 0);
        let hamming = e.labels().iter().zip(z.labels()).filter(|(a, b)| a != b).count();
        prop_assert!(m <= hamming);
    }

    #[test]
    fn nmi_is_bounded_and_symmetric((e, z, perm) in label_pair(40, 5)) {
        let v = nmi(&e, &z).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!((v - nmi(&z, &e).unwrap()).abs() < 1e-12);
        prop_assert!((nmi(&z.relabeled(&perm).unwrap(), &z).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_form_is_idempotent((e, _z, perm) in label_pair(30, 5)) {
        let c = e.canonical();
        prop_assert_eq!(c.canonical(), c.clone());
        prop_assert_eq!(e.relabeled(&perm).unwrap().canonical(), c);
    }

    #[test]
    fn text_formats_round_trip((g, z) in graph_and_labels(20, 4)) {
        let parsed = parse_edge_list(&format_edge_list(&g, Some(z.k())), true).unwrap();
        prop_assert_eq!(&parsed.graph, &g);
        prop_assert_eq!(parsed.k, Some(z.k()));
        prop_assert_eq!(parse_labeling(&format_labeling(&z), Some(z.k())).unwrap(), z);
    }
}
