//! Singular values of real matrices by one-sided (Hestenes) Jacobi.
//!
//! Orthogonalizing columns directly keeps small singular values accurate to
//! roughly `ε·σ_max`, which squaring into a Gram matrix would not.

use super::matrix::RealMatrix;

const MAX_SWEEPS: usize = 80;
const ORTHOGONALITY_TOL: f64 = 1e-15;

/// Singular values in descending order (`min(rows, cols)` of them).
pub fn singular_values(m: &RealMatrix) -> Vec<f64> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    // Orthogonalize the shorter side: each working vector is a row of `m` when
    // rows < cols, a column otherwise.
    let mut work: Vec<Vec<f64>> = if rows < cols {
        m.to_rows()
    } else {
        (0..cols).map(|j| m.column(j)).collect()
    };
    let n = work.len();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let (alpha, beta, gamma) = {
                    let (a, b) = (&work[i], &work[j]);
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = 0.0;
                    for (x, y) in a.iter().zip(b) {
                        alpha += x * x;
                        beta += y * y;
                        gamma += x * y;
                    }
                    (alpha, beta, gamma)
                };
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                if gamma.abs() <= ORTHOGONALITY_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = work.split_at_mut(j);
                let (a, b) = (&mut lo[i], &mut hi[0]);
                for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                    let (xi, yi) = (*x, *y);
                    *x = c * xi - s * yi;
                    *y = s * xi + c * yi;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut values: Vec<f64> = work
        .iter()
        .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal() {
        let m = RealMatrix::diagonal(&[3.0, -5.0, 0.0]);
        assert_eq!(singular_values(&m), vec![5.0, 3.0, 0.0]);
    }

    #[test]
    fn all_ones() {
        let m = RealMatrix::from_fn(2, 2, |_, _| 1.0);
        let s = singular_values(&m);
        assert!((s[0] - 2.0).abs() < 1e-15);
        assert!(s[1].abs() < 1e-15);
    }

    #[test]
    fn rectangular_both_orientations() {
        let m = RealMatrix::from_rows(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let a = singular_values(&m);
        let b = singular_values(&m.transpose());
        assert_eq!(a.len(), 2);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-13);
        }
        // Σσ² = ‖M‖_F² = 91
        assert!((a.iter().map(|x| x * x).sum::<f64>() - 91.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_small_values_stay_small() {
        let u = [1.0, -2.0, 0.5, 3.0, 1e-3];
        let v = [0.3, 1.0, -4.0, 2.0];
        let m = RealMatrix::from_fn(5, 4, |i, j| u[i] * v[j]);
        let s = singular_values(&m);
        assert!(s[1] < 1e-14 * s[0]);
    }
}
