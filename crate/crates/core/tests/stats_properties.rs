use freshx_core::stats::{fisher_table, kendall_rank, ks_statistic, ks_two_sample};
use proptest::prelude::*;

fn brute_tau_b(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let (mut concordant, mut discordant, mut tied_x, mut tied_y) = (0i64, 0i64, 0i64, 0i64);
    let mut pairs = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            pairs += 1;
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 {
                tied_x += 1;
            }
            if dy == 0.0 {
                tied_y += 1;
            }
            if dx * dy > 0.0 {
                concordant += 1;
            } else if dx * dy < 0.0 {
                discordant += 1;
            }
        }
    }
    (concordant - discordant) as f64 / (((pairs - tied_x) as f64) * ((pairs - tied_y) as f64)).sqrt()
}

/// Values on a small grid so that ties are common.
fn tied(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0u8..6, len).prop_map(|v| v.into_iter().map(f64::from).collect())
}

proptest! {
    #[test]
    fn fisher_orientation_symmetry(a in 0u64..15, b in 0u64..15, c in 0u64..15, d in 0u64..15) {
        let p = fisher_table(a, b, c, d).p_value;
        prop_assert!((0.0..=1.0).contains(&p));
        for q in [fisher_table(c, d, a, b), fisher_table(b, a, d, c), fisher_table(a, c, b, d), fisher_table(d, c, b, a)] {
            prop_assert_eq!(p.to_bits(), q.p_value.to_bits());
        }
    }

    #[test]
    fn ks_is_symmetric(a in prop::collection::vec(-5.0f64..5.0, 1..60), b in prop::collection::vec(-5.0f64..5.0, 1..60)) {
        let (n1, d1) = ks_statistic(&a, &b);
        let (n2, d2) = ks_statistic(&b, &a);
        prop_assert_eq!((n1, d1), (n2, d2));
        let p = ks_two_sample(&a, &b).unwrap().p_value;
        prop_assert_eq!(p.to_bits(), ks_two_sample(&b, &a).unwrap().p_value.to_bits());
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn ks_statistic_on_tied_samples(a in tied(20), b in tied(13)) {
        let (num, den) = ks_statistic(&a, &b);
        let ecdf = |s: &[f64], z: f64| s.iter().filter(|&&v| v <= z).count() as f64 / s.len() as f64;
        let brute = a.iter().chain(&b).map(|&z| (ecdf(&a, z) - ecdf(&b, z)).abs()).fold(0.0, f64::max);
        prop_assert!((num as f64 / den as f64 - brute).abs() < 1e-15);
    }

    #[test]
    fn kendall_matches_pair_enumeration(pairs in prop::collection::vec((0u8..8, -3.0f64..3.0), 2..120)) {
        let x: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
        let y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        prop_assume!(x.iter().any(|&v| v != x[0]));
        let out = kendall_rank(&x, &y).unwrap();
        prop_assert!((out.statistic - brute_tau_b(&x, &y)).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&out.p_value));
        // Swapping the roles of the variables changes nothing.
        let swapped = kendall_rank(&y, &x).unwrap();
        prop_assert!((swapped.statistic - out.statistic).abs() < 1e-12);
    }

    #[test]
    fn kendall_sign_flips_with_reflection(values in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 3..80)) {
        let x: Vec<f64> = values.iter().map(|p| p.0).collect();
        let y: Vec<f64> = values.iter().map(|p| p.1).collect();
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let a = kendall_rank(&x, &y).unwrap();
        let b = kendall_rank(&x, &neg).unwrap();
        prop_assert!((a.statistic + b.statistic).abs() < 1e-12);
        prop_assert!((a.p_value - b.p_value).abs() < 1e-12);
    }
}
