use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::opcore::{basis_vector, ComplexMatrix, DensityOperator, EffectOperator, KrausChannel};

/// Channel whose `|0⟩⟨0|` output population equals `Tr(Eρ)`:
/// `K_i = √λ_i |0⟩⟨ψ_i|`, `L_i = √(1−λ_i) |1⟩⟨ψ_i|` from `E = Σ λ_i |ψ_i⟩⟨ψ_i|`.
pub fn effect_channel(effect: &EffectOperator, q: usize) -> Result<KrausChannel> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("effect channel needs q >= 2, got {q}")));
    }
    if effect.dim() != q {
        return Err(Error::dims(q, effect.dim()));
    }
    let eig = effect.operator().eigh();
    let (e0, e1) = (basis_vector(q, 0), basis_vector(q, 1));
    let mut kraus = Vec::with_capacity(2 * q);
    for (i, lam) in eig.values.iter().enumerate() {
        let lam = lam.clamp(0.0, 1.0);
        let psi = eig.vector(i);
        kraus.push(ComplexMatrix::outer(&e0, &psi).scale(&C64::new(lam.sqrt(), 0.0)));
        kraus.push(ComplexMatrix::outer(&e1, &psi).scale(&C64::new((1.0 - lam).sqrt(), 0.0)));
    }
    KrausChannel::new(kraus)
}

/// `ρ ↦ Tr(ρ)·θ` with Kraus operators `√μ_j |φ_j⟩⟨k|`.
pub fn replacement_channel(theta: &DensityOperator) -> Result<KrausChannel> {
    let q = theta.dim();
    let eig = theta.operator().eigh();
    let mut kraus = Vec::with_capacity(q * q);
    for (j, mu) in eig.values.iter().enumerate() {
        let mu = mu.max(0.0);
        if mu == 0.0 {
            continue;
        }
        let phi = eig.vector(j);
        for k in 0..q {
            kraus.push(ComplexMatrix::outer(&phi, &basis_vector(q, k)).scale(&C64::new(mu.sqrt(), 0.0)));
        }
    }
    KrausChannel::new(kraus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::{apply_channel, Projector};
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn accept_population(ch: &KrausChannel, rho: &DensityOperator) -> f64 {
        apply_channel(ch, rho).unwrap().matrix()[(0, 0)].re
    }

    #[test]
    fn projector_effect() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let e = EffectOperator::from(Projector::coordinate(3, &[0]).unwrap());
        let ch = effect_channel(&e, 3).unwrap();
        for _ in 0..5 {
            let rho = sampling::random_density(3, &mut rng);
            assert!((accept_population(&ch, &rho) - rho.matrix()[(0, 0)].re).abs() < 1e-12);
        }
    }

    #[test]
    fn half_identity_effect() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let e = EffectOperator::new(ComplexMatrix::identity(2).scale(&C64::new(0.5, 0.0))).unwrap();
        let ch = effect_channel(&e, 2).unwrap();
        for _ in 0..5 {
            let rho = sampling::random_density(2, &mut rng);
            assert!((accept_population(&ch, &rho) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn random_effect_reproduces_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let h = sampling::random_hermitian(3, &mut rng);
        let eig = h.eigh();
        let spread = eig.max() - eig.min();
        let shifted = &h.matrix().scale(&C64::new(0.9 / spread, 0.0))
            - &ComplexMatrix::identity(3).scale(&C64::new(0.9 * eig.min() / spread - 0.05, 0.0));
        let e = EffectOperator::new(shifted).unwrap();
        let ch = effect_channel(&e, 3).unwrap();
        for _ in 0..100 {
            let rho = sampling::random_density(3, &mut rng);
            assert!((accept_population(&ch, &rho) - e.probability(rho.matrix())).abs() < 1e-10);
        }
    }

    #[test]
    fn effect_channel_preconditions() {
        let e = EffectOperator::new(ComplexMatrix::identity(1)).unwrap();
        assert!(effect_channel(&e, 1).is_err());
        let e2 = EffectOperator::new(ComplexMatrix::identity(2)).unwrap();
        assert!(effect_channel(&e2, 3).is_err());
    }

    #[test]
    fn replacement_outputs_theta() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let theta = sampling::random_density(3, &mut rng);
        let ch = replacement_channel(&theta).unwrap();
        let rho = DensityOperator::pure(&basis_vector(3, 1)).unwrap();
        let out = apply_channel(&ch, &rho).unwrap();
        assert!((out.matrix() - theta.matrix()).frobenius_norm() < 1e-12);

        let pure = DensityOperator::pure(&basis_vector(3, 0)).unwrap();
        let ch = replacement_channel(&pure).unwrap();
        let out = apply_channel(&ch, &sampling::random_density(3, &mut rng)).unwrap();
        assert!((out.matrix() - pure.matrix()).frobenius_norm() < 1e-12);

        let mixed = DensityOperator::maximally_mixed(3);
        let ch = replacement_channel(&mixed).unwrap();
        let out = apply_channel(&ch, &sampling::random_density(3, &mut rng)).unwrap();
        assert!((out.matrix() - mixed.matrix()).frobenius_norm() < 1e-12);
    }
}
