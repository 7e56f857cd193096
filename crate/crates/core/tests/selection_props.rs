use std::collections::BTreeMap;

use extropy::rate::prefix_rate_profile;
use extropy::selection::*;
use extropy::LogBase;
use proptest::prelude::*;

/// Rate of the empirical joint of the first `j` columns, straight from the
/// definition: count tuples, then `(log(S-1) + J/(S-1)) / j`.
fn brute_force_rate(cols: &[Vec<u32>], j: usize) -> f64 {
    let rows = cols[0].len();
    let mut counts: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for r in 0..rows {
        *counts
            .entry(cols[..j].iter().map(|c| c[r]).collect())
            .or_default() += 1;
    }
    let s = counts.len();
    if s == 1 {
        return 0.0;
    }
    let ext: f64 = counts
        .values()
        .map(|&c| {
            let q = 1.0 - c as f64 / rows as f64;
            -q * q.ln()
        })
        .sum();
    ((s as f64 - 1.0).ln() + ext / (s as f64 - 1.0)) / j as f64
}

fn matrix(max_cols: usize, max_rows: usize) -> impl Strategy<Value = Vec<Vec<u32>>> {
    (1..=max_cols, 1..=max_rows, 1u32..=5).prop_flat_map(|(c, r, alphabet)| {
        prop::collection::vec(prop::collection::vec(0..alphabet, r), c)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn prefix_rates_match_brute_force(cols in matrix(6, 200)) {
        let profile = prefix_rate_profile(&cols, LogBase::Natural).unwrap();
        for (j, est) in profile.iter().enumerate() {
            let oracle = brute_force_rate(&cols, j + 1);
            prop_assert!((est.value - oracle).abs() <= 1e-9, "prefix {}: {} vs {}", j + 1, est.value, oracle);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn redundant_column_scales_rate(cols in matrix(5, 60), pick in any::<prop::sample::Index>(), constant in any::<bool>()) {
        let mut cols = cols;
        let rows = cols[0].len();
        let j = cols.len();
        let extra = if constant { vec![3; rows] } else { cols[pick.index(j)].clone() };
        cols.push(extra);
        let profile = prefix_rate_profile(&cols, LogBase::Two).unwrap();
        let expected = profile[j - 1].value * j as f64 / (j + 1) as f64;
        prop_assert!((profile[j].value - expected).abs() <= 1e-12);
    }

    #[test]
    fn recoding_invariance(cols in matrix(5, 60), which in any::<prop::sample::Index>(), k in any::<prop::sample::Index>()) {
        let m = FeatureMatrix::from_columns(cols.clone()).unwrap();
        let k = k.index(cols.len()) + 1;
        let base = select_features_extropy(&m, k, LogBase::Two).unwrap();
        let mut recoded = cols.clone();
        let c = which.index(cols.len());
        recoded[c] = recoded[c].iter().map(|&v| 1000 - 13 * v).collect();
        let m2 = FeatureMatrix::from_columns(recoded).unwrap();
        let other = select_features_extropy(&m2, k, LogBase::Two).unwrap();
        prop_assert_eq!(base.selected, other.selected);
        prop_assert_eq!(base.scores, other.scores);
    }

    #[test]
    fn appended_constant_ranks_below_predecessor(cols in matrix(5, 60), k in any::<prop::sample::Index>()) {
        let d = cols.len();
        let k = k.index(d) + 1;
        let before = select_features_extropy(&FeatureMatrix::from_columns(cols.clone()).unwrap(), k, LogBase::Two).unwrap();
        let mut more = cols.clone();
        more.push(vec![0; cols[0].len()]);
        let after = select_features_extropy(&FeatureMatrix::from_columns(more).unwrap(), k, LogBase::Two).unwrap();
        let last = before.scores[d - 1];
        let appended = after.scores[d];
        if last > 0.0 {
            prop_assert!(appended < last);
        } else {
            prop_assert_eq!(appended, 0.0);
        }
        // the top choice never moves; deeper choices hold while the new
        // value does not beat the weakest kept score
        prop_assert_eq!(before.selected[0], after.selected[0]);
        let weakest = before.selected.iter().map(|&i| before.scores[i]).fold(f64::INFINITY, f64::min);
        if appended <= weakest {
            prop_assert_eq!(&before.selected, &after.selected);
        }
    }

    #[test]
    fn selection_is_top_k(cols in matrix(6, 40), k in any::<prop::sample::Index>()) {
        let k = k.index(cols.len()) + 1;
        let r = select_features_extropy(&FeatureMatrix::from_columns(cols.clone()).unwrap(), k, LogBase::Two).unwrap();
        prop_assert_eq!(r.selected.len(), k);
        let worst_kept = r.selected.iter().map(|&i| r.scores[i]).fold(f64::INFINITY, f64::min);
        for i in (0..cols.len()).filter(|i| !r.selected.contains(i)) {
            prop_assert!(r.scores[i] <= worst_kept);
        }
    }

    #[test]
    fn mi_and_chi2_symmetric(pair in (1usize..80).prop_flat_map(|n| (prop::collection::vec(0u32..4, n), prop::collection::vec(0u32..3, n)))) {
        let (f, t) = pair;
        let a = mutual_information_score(&f, &t, LogBase::Natural).unwrap();
        let b = mutual_information_score(&t, &f, LogBase::Natural).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
        prop_assert!(a >= 0.0);
        let a = chi_square_score(&f, &t).unwrap();
        let b = chi_square_score(&t, &f).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }
}

#[test]
fn appended_constant_can_displace_lower_prefix() {
    // prefix rates [0, 0.5] then 1/3 for the constant: with k = 2 the
    // constant outranks the first column
    let cols = vec![vec![1, 1], vec![1, 0], vec![0, 0]];
    let r = select_features_extropy(&FeatureMatrix::from_columns(cols).unwrap(), 2, LogBase::Two)
        .unwrap();
    assert_eq!(r.selected, vec![1, 2]);
}

#[test]
fn identical_feature_mi_is_target_entropy() {
    let t: Vec<u32> = (0..30).map(|i| i % 3).collect();
    let mi = mutual_information_score(&t, &t, LogBase::Natural).unwrap();
    assert!((mi - 3f64.ln()).abs() < 1e-12);
}

#[test]
fn independent_table_has_zero_chi2() {
    let f = [0, 0, 1, 1, 0, 0, 1, 1];
    let t = [0, 1, 0, 1, 0, 1, 0, 1];
    assert!(chi_square_score(&f, &t).unwrap().abs() < 1e-9);
}

#[test]
fn empirical_joint_examples() {
    let m = FeatureMatrix::from_columns(vec![vec![0, 0, 0, 1], vec![0, 1, 1, 1]]).unwrap();
    let j = empirical_joint(&m, &[0, 1]).unwrap();
    assert_eq!(j.support(), 3);
    let mut masses = j.masses();
    masses.sort_by(f64::total_cmp);
    assert_eq!(masses, vec![0.25, 0.25, 0.5]);
    let c = FeatureMatrix::from_columns(vec![vec![2; 5]]).unwrap();
    assert_eq!(empirical_joint(&c, &[0]).unwrap().masses(), vec![1.0]);
}

#[test]
fn all_columns_selected_when_k_is_full() {
    let m = FeatureMatrix::from_columns(vec![vec![0, 1, 0], vec![1, 1, 0], vec![0, 0, 0]]).unwrap();
    let mut r = select_features_extropy(&m, 3, LogBase::Two)
        .unwrap()
        .selected;
    r.sort();
    assert_eq!(r, vec![0, 1, 2]);
    let t = [0, 1, 1];
    let r = rank_features(&m, None, Some(&t), Method::Chi2, 3, LogBase::Two, 0).unwrap();
    assert_eq!(r.selected.len(), 3);
    assert!(r
        .selected
        .windows(2)
        .all(|w| r.scores[w[0]] >= r.scores[w[1]]));
}
