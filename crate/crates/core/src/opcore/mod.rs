//! Dense complex linear-algebra kernel.
//!
//! Everything here is a pure function on immutable values. Complex scalars are
//! `f64` pairs; exact arithmetic lives in the linear automaton models only.

mod channel;
mod eigh;
mod expm;
mod hermitian;
mod matrix;
mod svd;

pub use channel::{apply_channel, choi_matrix, is_completely_positive, KrausChannel};
pub use eigh::{eigh, Eigh};
pub use expm::expm;
pub use hermitian::{
    hermitian_basis, hs_inner, hs_inner_matrix, DensityOperator, EffectOperator, HermitianBasis,
    HermitianOperator, Projector,
};
pub use matrix::{basis_vector, inner, vec_norm, ComplexMatrix, Matrix, RealMatrix, C64};
pub use svd::singular_values;

/// Largest singular value, from the top eigenvalue of `A†A`.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    let gram = HermitianOperator::new_unchecked((&a.adjoint() * a).hermitian_part());
    gram.eigh().max().max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn operator_norm_examples() {
        assert!((operator_norm(&ComplexMatrix::identity(4)) - 1.0).abs() < 1e-15);
        let ones = RealMatrix::from_fn(2, 2, |_, _| 1.0).to_complex();
        assert!((operator_norm(&ones) - 2.0).abs() < 1e-14);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn gell_mann_orthonormal(q in 1usize..=6) {
            let b = hermitian_basis(q).unwrap();
            prop_assert_eq!(b.len(), q * q);
            for (i, x) in b.iter().enumerate() {
                if i > 0 {
                    prop_assert!(x.trace().abs() <= 1e-14);
                }
                for (j, y) in b.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((hs_inner(x, y).unwrap() - want).abs() <= 1e-13);
                }
            }
        }

        #[test]
        fn expm_inverse(seed in any::<u64>(), n in 1usize..=5, scale in 0.0f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = sampling::random_complex_matrix(n, n, &mut rng);
            let norm = a.frobenius_norm();
            let a = a.scale(&C64::new(scale / norm.max(1e-300), 0.0));
            let e = expm(&a).unwrap();
            let f = expm(&(-&a)).unwrap();
            prop_assert!((&(&e * &f) - &ComplexMatrix::identity(n)).frobenius_norm() <= 1e-11);
        }

        #[test]
        fn channel_output_is_state(seed in any::<u64>(), q in 1usize..=4, r in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ch = sampling::random_channel(q, r, &mut rng);
            let rho = sampling::random_density(q, &mut rng);
            let out = apply_channel(&ch, &rho).unwrap();
            prop_assert!((out.trace() - 1.0).abs() <= 1e-12);
            prop_assert!(out.operator().eigh().min() >= -1e-9);
        }

        #[test]
        fn projector_spectrum(seed in any::<u64>(), n in 1usize..=6, r_frac in 0.0f64..=1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = ((n as f64) * r_frac).round() as usize;
            let u = sampling::random_unitary(n, &mut rng);
            let p0 = Projector::coordinate(n, &(0..r).collect::<Vec<_>>()).unwrap();
            let p = HermitianOperator::new(u.conjugate(p0.matrix())).unwrap();
            for v in p.eigh().values {
                prop_assert!(v.abs() <= 1e-10 || (v - 1.0).abs() <= 1e-10);
            }
        }

        #[test]
        fn norm_sandwich(seed in any::<u64>(), rows in 1usize..=6, cols in 1usize..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = sampling::random_complex_matrix(rows, cols, &mut rng);
            let op = operator_norm(&a);
            let fro = a.frobenius_norm();
            let rank = rows.min(cols) as f64;
            prop_assert!(op <= fro * (1.0 + 1e-12));
            prop_assert!(fro <= rank.sqrt() * op * (1.0 + 1e-12));
        }
    }
}
