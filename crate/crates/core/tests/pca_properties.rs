use freshx_core::{pca_reduce, FeatureColumn, FeatureId, FeatureMatrix};
use proptest::prelude::*;

fn matrix(rows: &[Vec<f64>]) -> FeatureMatrix {
    let m = rows.len();
    let k = rows[0].len();
    let columns = (0..k)
        .map(|j| FeatureColumn::new(FeatureId::Other(format!("f{j}")), rows.iter().map(|r| r[j]).collect()))
        .collect();
    FeatureMatrix::new((0..m).map(|i| format!("e{i}")).collect(), columns).unwrap()
}

fn data() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (3usize..25, 1usize..7).prop_flat_map(|(m, k)| prop::collection::vec(prop::collection::vec(-10.0f64..10.0, k), m))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #[test]
    fn scores_are_orthogonal(rows in data(), p in 0.05f64..=1.0) {
        let out = pca_reduce(&matrix(&rows), p).unwrap();
        let cols = out.matrix.columns();
        for i in 0..cols.len() {
            for j in i + 1..cols.len() {
                let (a, b) = (cols[i].values(), cols[j].values());
                let bound = 1e-8 * dot(a, a).sqrt() * dot(b, b).sqrt();
                prop_assert!(dot(a, b).abs() <= bound.max(1e-12));
            }
        }
        let names: Vec<String> = cols.iter().map(|c| c.id().to_string()).collect();
        let expected: Vec<String> = (1..=cols.len()).map(|i| format!("pc-{i}")).collect();
        prop_assert_eq!(names, expected);
    }

    #[test]
    fn explained_variance_ratios(rows in data()) {
        let out = pca_reduce(&matrix(&rows), 1.0).unwrap();
        let r = &out.explained_variance_ratio;
        prop_assert!(r.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        // Eigenvalues of a correlation matrix add up to its trace.
        let total: f64 = out.eigenvalues.iter().sum();
        prop_assert!((total - out.used_columns.len() as f64).abs() < 1e-9 * total.max(1.0));
        let m = rows.len();
        prop_assert!(out.matrix.n_columns() <= (m - 1).min(out.used_columns.len()));
    }

    #[test]
    fn affine_rescaling_of_a_column(rows in data(), pick in any::<prop::sample::Index>(), scale in 0.1f64..50.0, shift in -100.0f64..100.0) {
        let j = pick.index(rows[0].len());
        let changed: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r[j] = scale * r[j] + shift;
                r
            })
            .collect();
        let a = pca_reduce(&matrix(&rows), 0.9).unwrap();
        let b = pca_reduce(&matrix(&changed), 0.9).unwrap();
        // Nearly equal eigenvalues leave the axes undetermined.
        let gaps_ok = a.eigenvalues.windows(2).all(|w| w[0] - w[1] > 1e-4);
        prop_assume!(gaps_ok);
        prop_assert_eq!(a.matrix.n_columns(), b.matrix.n_columns());
        for (x, y) in a.matrix.columns().iter().zip(b.matrix.columns()) {
            for (u, v) in x.values().iter().zip(y.values()) {
                prop_assert!((u - v).abs() <= 1e-8 * u.abs().max(1.0), "{u} vs {v}");
            }
        }
    }
}

#[test]
fn correlated_pair_closed_form() {
    // x and y = rho x + sqrt(1 - rho^2) z with x, z exactly uncorrelated and
    // of equal variance, so the sample correlation is exactly rho.
    let rho: f64 = 0.8;
    let x = [1.0, -1.0, 1.0, -1.0];
    let z = [1.0, 1.0, -1.0, -1.0];
    let y: Vec<f64> = x.iter().zip(&z).map(|(a, b)| rho * a + (1.0 - rho * rho).sqrt() * b).collect();
    let rows: Vec<Vec<f64>> = x.iter().zip(&y).map(|(a, b)| vec![*a, *b]).collect();
    let out = pca_reduce(&matrix(&rows), 0.9).unwrap();
    assert!((out.eigenvalues[0] - 1.8).abs() < 1e-10);
    assert!((out.eigenvalues[1] - 0.2).abs() < 1e-10);
    assert_eq!(out.matrix.n_columns(), 1);
}

#[test]
fn constant_column_is_dropped() {
    let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![f64::from(i).sin(), 3.0]).collect();
    let out = pca_reduce(&matrix(&rows), 0.5).unwrap();
    assert_eq!(out.used_columns.len(), 1);
    assert_eq!(out.explained_variance_ratio, [1.0]);
}
