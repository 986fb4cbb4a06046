//! Dense least squares via Householder QR and the one-sided Jacobi SVD.

#[allow(unused_imports)] // Inherent methods take over when std is linked.
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

/// Relative threshold on `|R_jj|` below which the design is treated as
/// rank deficient.
const RANK_TOLERANCE: f64 = 1e-10;

/// An ordinary least-squares fit `y ~ X b`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    coefficients: Vec<f64>,
    rss: f64,
    n_obs: usize,
    /// Upper triangle of R, row-major `p x p`.
    r: Vec<f64>,
}

impl LeastSquares {
    /// Fits the model from column-major `columns` (each of length `n`).
    ///
    /// Returns `None` when there are fewer observations than parameters or
    /// the design is numerically rank deficient.
    pub fn fit(mut columns: Vec<Vec<f64>>, response: &[f64]) -> Option<Self> {
        let p = columns.len();
        let n = response.len();
        if p == 0 || n < p || columns.iter().any(|c| c.len() != n) {
            return None;
        }
        let scale = columns
            .iter()
            .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            return None;
        }
        let mut y = response.to_vec();
        for j in 0..p {
            // Householder vector for column j, rows j..n.
            let norm = columns[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm <= RANK_TOLERANCE * scale {
                return None;
            }
            let alpha = if columns[j][j] > 0.0 { -norm } else { norm };
            let mut v: Vec<f64> = columns[j][j..].to_vec();
            v[0] -= alpha;
            let vnorm2: f64 = v.iter().map(|x| x * x).sum();
            if vnorm2 > 0.0 {
                for col in columns.iter_mut().skip(j + 1) {
                    let dot: f64 = v.iter().zip(&col[j..]).map(|(a, b)| a * b).sum();
                    let f = 2.0 * dot / vnorm2;
                    for (c, vi) in col[j..].iter_mut().zip(&v) {
                        *c -= f * vi;
                    }
                }
                let dot: f64 = v.iter().zip(&y[j..]).map(|(a, b)| a * b).sum();
                let f = 2.0 * dot / vnorm2;
                for (c, vi) in y[j..].iter_mut().zip(&v) {
                    *c -= f * vi;
                }
            }
            columns[j][j] = alpha;
        }
        let mut r = vec![0.0; p * p];
        for i in 0..p {
            for j in i..p {
                r[i * p + j] = columns[j][i];
            }
        }
        let mut coefficients = vec![0.0; p];
        for i in (0..p).rev() {
            let mut acc = y[i];
            for j in (i + 1)..p {
                acc -= r[i * p + j] * coefficients[j];
            }
            coefficients[i] = acc / r[i * p + i];
        }
        let rss = y[p..].iter().map(|v| v * v).sum();
        Some(Self { coefficients, rss, n_obs: n, r })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn rss(&self) -> f64 {
        self.rss
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    /// Diagonal entry `j` of `(X'X)^{-1} = R^{-1} R^{-T}`.
    pub fn inverse_gram_diag(&self, j: usize) -> f64 {
        let p = self.coefficients.len();
        // Row j of R^{-1}: solve e_j^T = w^T R, i.e. R^T w = e_j.
        let mut w = vec![0.0; p];
        for i in j..p {
            let mut acc = if i == j { 1.0 } else { 0.0 };
            for k in j..i {
                acc -= self.r[k * p + i] * w[k];
            }
            w[i] = acc / self.r[i * p + i];
        }
        w.iter().map(|v| v * v).sum()
    }

    /// t statistic of coefficient `j` using the residual variance estimate
    /// with `n - p` degrees of freedom. `None` when there are no residual
    /// degrees of freedom.
    pub fn t_statistic(&self, j: usize) -> Option<f64> {
        let p = self.coefficients.len();
        if self.n_obs <= p {
            return None;
        }
        let sigma2 = self.rss / (self.n_obs - p) as f64;
        Some(self.coefficients[j] / (sigma2 * self.inverse_gram_diag(j)).sqrt())
    }
}

/// Sweeps after which [`jacobi_svd`] gives up.
const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `A = U diag(s) V^T` of a matrix given
/// by its columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    /// Descending; equal values keep the order of the input columns.
    pub singular_values: Vec<f64>,
    /// Columns of `U` scaled by the singular values, i.e. `A v_j`; these are
    /// exactly orthogonal to working precision even when `s_j` is tiny.
    pub scaled_left: Vec<Vec<f64>>,
    /// Columns of `V`, unit norm.
    pub right: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rotate(a: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = a.split_at_mut(q);
    for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
        let (u, v) = (*x, *y);
        *x = c * u - s * v;
        *y = s * u + c * v;
    }
}

/// One-sided (Hestenes) Jacobi SVD of the `r x c` matrix whose `c` columns
/// are given, each of length `r`.
///
/// Pairs of columns are rotated until all are mutually orthogonal to
/// `r * EPSILON` relative; the column norms are then the singular values.
/// Intended for `c <= r`: with more columns than rows, decompose the
/// transpose. Returns `None` when the sweeps do not converge.
pub fn jacobi_svd(mut columns: Vec<Vec<f64>>) -> Option<Svd> {
    let c = columns.len();
    let r = columns.first().map_or(0, Vec::len);
    let mut right: Vec<Vec<f64>> = (0..c)
        .map(|j| {
            let mut e = vec![0.0; c];
            e[j] = 1.0;
            e
        })
        .collect();
    let tolerance = f64::EPSILON * (r.max(1) as f64);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..c {
            for q in p + 1..c {
                let alpha = dot(&columns[p], &columns[p]);
                let beta = dot(&columns[q], &columns[q]);
                let gamma = dot(&columns[p], &columns[q]);
                if gamma == 0.0 || gamma.abs() <= tolerance * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate(&mut columns, p, q, cs, sn);
                rotate(&mut right, p, q, cs, sn);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    let norms: Vec<f64> = columns.iter().map(|col| dot(col, col).sqrt()).collect();
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    Some(Svd {
        singular_values: order.iter().map(|&j| norms[j]).collect(),
        scaled_left: order.iter().map(|&j| columns[j].clone()).collect(),
        right: order.iter().map(|&j| right[j].clone()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_fit() {
        let x: Vec<f64> = (0..6).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.5 - 2.0 * v).collect();
        let fit = LeastSquares::fit(vec![vec![1.0; 6], x], &y).unwrap();
        assert!((fit.coefficients()[0] - 1.5).abs() < 1e-12);
        assert!((fit.coefficients()[1] + 2.0).abs() < 1e-12);
        assert!(fit.rss() < 1e-20);
    }

    #[test]
    fn inverse_gram_matches_closed_form() {
        // Simple regression: Var factor of the slope is 1 / sum (x - xbar)^2.
        let x = vec![1.0, 2.0, 4.0, 7.0];
        let y = vec![0.5, 1.0, 2.5, 2.0];
        let fit = LeastSquares::fit(vec![vec![1.0; 4], x.clone()], &y).unwrap();
        let xbar = x.iter().sum::<f64>() / 4.0;
        let sxx: f64 = x.iter().map(|v| (v - xbar) * (v - xbar)).sum();
        assert!((fit.inverse_gram_diag(1) - 1.0 / sxx).abs() < 1e-12);
        let sum_x2: f64 = x.iter().map(|v| v * v).sum();
        assert!((fit.inverse_gram_diag(0) - sum_x2 / (4.0 * sxx)).abs() < 1e-12);
    }

    #[test]
    fn collinear_design_is_rejected() {
        let x = vec![1.0, 2.0, 3.0];
        let twice: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        assert!(LeastSquares::fit(vec![x, twice], &[1.0, 2.0, 3.0]).is_none());
        assert!(LeastSquares::fit(vec![vec![1.0; 2]; 3], &[1.0, 2.0]).is_none());
    }

    #[test]
    fn jacobi_svd_reconstructs() {
        // 5 x 3 matrix with two close singular values.
        let cols = vec![
            vec![1.0, 0.0, 2.0, -1.0, 0.5],
            vec![0.0, 1.0, 2.0, 1.0, -0.5],
            vec![3.0, 1.0, -1.0, 0.0, 2.0],
        ];
        let svd = jacobi_svd(cols.clone()).unwrap();
        assert!(svd.singular_values.windows(2).all(|w| w[0] >= w[1]));
        for (j, original) in cols.iter().enumerate() {
            for i in 0..5 {
                let rebuilt: f64 = (0..3).map(|k| svd.scaled_left[k][i] * svd.right[k][j]).sum();
                assert!((rebuilt - original[i]).abs() < 1e-14);
            }
        }
        for a in 0..3 {
            for b in a + 1..3 {
                assert!(dot(&svd.scaled_left[a], &svd.scaled_left[b]).abs() < 1e-13);
                assert!(dot(&svd.right[a], &svd.right[b]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn jacobi_svd_diagonal() {
        let svd = jacobi_svd(vec![vec![0.0, 2.0], vec![3.0, 0.0]]).unwrap();
        assert_eq!(svd.singular_values, [3.0, 2.0]);
        assert_eq!(svd.right[0], [0.0, 1.0]);
    }
}
