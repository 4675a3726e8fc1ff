use bnweights::dataset::ScoreMatrix;
use bnweights::index::{composite_index, group_rankings, rank_shift_report, DEFAULT_BASELINE};
use bnweights::weights::{equal_weights, normalize, Scheme, WeightVector};
use proptest::prelude::*;

fn dims(d: usize) -> Vec<String> {
    (0..d).map(|i| format!("D{i}")).collect()
}

fn matrix(d: usize, values: Vec<f64>) -> ScoreMatrix {
    let n = values.len() / d;
    ScoreMatrix::new(dims(d), n, values).unwrap()
}

fn weights(scheme: Scheme, raw: &[f64]) -> WeightVector {
    let w = WeightVector::new(scheme, dims(raw.len()).into_iter().zip(raw.iter().copied()).collect()).unwrap();
    normalize(&w).unwrap()
}

fn arb_case(d: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(0.0f64..=1.0, d * 12),
        prop::collection::vec(0.01f64..=1.0, d),
    )
}

proptest! {
    #[test]
    fn index_is_the_weighted_dot_product((values, raw) in arb_case(6)) {
        let s = matrix(6, values.clone());
        let w = weights(Scheme::Ols, &raw);
        let idx = composite_index(&s, &w).unwrap();
        let total: f64 = raw.iter().sum();
        for (u, v) in idx.values().iter().enumerate() {
            let want: f64 = (0..6).map(|i| values[u * 6 + i] * raw[i] / total).sum();
            prop_assert!((v - want).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(v));
        }
    }

    #[test]
    fn raising_a_weighted_score_never_lowers_the_index(
        (values, raw) in arb_case(4),
        unit in 0usize..12,
        dim in 0usize..4,
        bump in 0.0f64..=1.0,
    ) {
        let w = weights(Scheme::Rf, &raw);
        let before = composite_index(&matrix(4, values.clone()), &w).unwrap();
        let mut raised = values;
        let k = unit * 4 + dim;
        raised[k] = (raised[k] + bump).min(1.0);
        let after = composite_index(&matrix(4, raised), &w).unwrap();
        prop_assert!(after.values()[unit] >= before.values()[unit]);
    }

    #[test]
    fn ranks_form_a_permutation_and_match_a_sort_oracle(
        values in prop::collection::vec(0.0f64..=1.0, 200),
        labels in prop::collection::vec(0usize..25, 100),
    ) {
        let s = matrix(2, values);
        let idx = composite_index(&s, &equal_weights(&dims(2)).unwrap()).unwrap();
        let groups: Vec<String> = labels.iter().map(|g| format!("G{g:02}")).collect();
        let t = group_rankings(&idx, &groups).unwrap();

        let mut ranks: Vec<usize> = t.rows().iter().map(|r| r.rank).collect();
        ranks.sort_unstable();
        prop_assert_eq!(ranks, (1..=t.rows().len()).collect::<Vec<_>>());

        // oracle: unweighted row means, grouped, sorted descending then by label
        let mut sums: std::collections::HashMap<&str, (f64, f64)> = Default::default();
        for (u, g) in groups.iter().enumerate() {
            let m = (s.get(u, 0) + s.get(u, 1)) / 2.0;
            let e = sums.entry(g).or_default();
            e.0 += m;
            e.1 += 1.0;
        }
        let mut oracle: Vec<(&str, f64)> = sums.into_iter().map(|(g, (a, n))| (g, a / n)).collect();
        oracle.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(b.0)));
        let got: Vec<&str> = t.rows().iter().map(|r| r.group.as_str()).collect();
        let want: Vec<&str> = oracle.iter().map(|o| o.0).collect();
        prop_assert_eq!(got, want);
    }
}

#[test]
fn identical_weight_vectors_shift_nothing() {
    let s = matrix(3, (0..30).map(|i| (i % 7) as f64 / 6.0).collect());
    let groups: Vec<String> = (0..10).map(|u| format!("g{}", u % 4)).collect();
    let eq = equal_weights(&dims(3)).unwrap();
    let mut sp = eq.clone();
    sp.scheme = Scheme::Spearman;
    let tables: Vec<_> = [eq, sp]
        .iter()
        .map(|w| group_rankings(&composite_index(&s, w).unwrap(), &groups).unwrap())
        .collect();
    let r = rank_shift_report(&tables, DEFAULT_BASELINE).unwrap();
    assert!(r.rows.iter().all(|row| row.max_shift == 0));
}

#[test]
fn concentrated_weights_lift_the_group_leading_their_dimensions() {
    // group "lead" tops D0 and D1 but trails on D2..D5
    let profiles: [(&str, [f64; 6]); 5] = [
        ("lead", [0.95, 0.95, 0.2, 0.2, 0.2, 0.2]),
        ("b", [0.6, 0.6, 0.7, 0.7, 0.7, 0.7]),
        ("c", [0.55, 0.55, 0.6, 0.6, 0.6, 0.6]),
        ("d", [0.5, 0.5, 0.5, 0.5, 0.5, 0.5]),
        ("e", [0.4, 0.4, 0.45, 0.45, 0.45, 0.45]),
    ];
    let mut values = Vec::new();
    let mut groups = Vec::new();
    for (g, p) in &profiles {
        for _ in 0..3 {
            values.extend_from_slice(p);
            groups.push(g.to_string());
        }
    }
    let s = matrix(6, values);
    let eq = equal_weights(&dims(6)).unwrap();
    let bn = weights(Scheme::Bn, &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    let tables: Vec<_> = [eq, bn]
        .iter()
        .map(|w| group_rankings(&composite_index(&s, w).unwrap(), &groups).unwrap())
        .collect();
    let r = rank_shift_report(&tables, DEFAULT_BASELINE).unwrap();
    assert_eq!(r.rows[0].group, "lead");
    assert!(r.rows[1..].iter().all(|row| row.max_shift < r.rows[0].max_shift));
}

#[test]
fn group_rankings_reject_unlabelled_units() {
    let idx = composite_index(&matrix(1, vec![0.5, 0.2]), &equal_weights(&dims(1)).unwrap()).unwrap();
    assert!(group_rankings(&idx, &["a"]).is_err());
}
