//! Matrix exponential by scaling and squaring with a truncated Taylor series.

use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::Result;

const TAYLOR_TERMS: usize = 20;
const SCALED_NORM: f64 = 0.5;

pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.require_square()?;
    let n = a.rows();
    let norm = a.frobenius_norm();
    let mut squarings = 0u32;
    if norm > SCALED_NORM {
        squarings = (norm / SCALED_NORM).log2().ceil() as u32;
    }
    let scaled = a.scale(&C64::new(0.5f64.powi(squarings as i32), 0.0));

    // Horner form of Σ_{k≤N} X^k/k!.
    let id = ComplexMatrix::identity(n);
    let mut acc = id.clone();
    for k in (1..=TAYLOR_TERMS).rev() {
        acc = &(&scaled * &acc).scale(&C64::new(1.0 / k as f64, 0.0)) + &id;
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::matrix::RealMatrix;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_gives_identity() {
        let z = ComplexMatrix::zeros(3, 3);
        assert_eq!(expm(&z).unwrap(), ComplexMatrix::identity(3));
    }

    #[test]
    fn rotation_generator() {
        for theta in [0.1, 1.0, 2.5, -7.0] {
            let g = RealMatrix::from_rows(vec![vec![0.0, theta], vec![-theta, 0.0]])
                .unwrap()
                .to_complex();
            let e = expm(&g).unwrap();
            let (c, s) = (f64::cos(theta), f64::sin(theta));
            let want = RealMatrix::from_rows(vec![vec![c, s], vec![-s, c]]).unwrap().to_complex();
            assert!((&e - &want).frobenius_norm() < 1e-12, "theta={theta}");
        }
    }

    #[test]
    fn skew_hermitian_gives_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 4, 6] {
            let h = sampling::random_hermitian(n, &mut rng);
            let k = h.matrix().scale(&C64::new(0.0, 1.0));
            let u = expm(&k).unwrap();
            assert!(u.unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn non_square_rejected() {
        assert!(expm(&ComplexMatrix::zeros(2, 3)).is_err());
    }
}
