//! Seeded random generators for quantum objects, used by tests, the
//! acceptance suite and the CLI's random-instance helpers.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use std::sync::Arc;

use crate::automata::{Alphabet, Moqfa, Qcfa};
use crate::opcore::{
    ComplexMatrix, DensityOperator, EffectOperator, HermitianOperator, KrausChannel, Projector,
};

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_complex_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian_c64(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianOperator {
    let g = random_complex_matrix(n, n, rng);
    HermitianOperator::new(g.hermitian_part()).expect("hermitian part is Hermitian")
}

/// Unit vector drawn uniformly from the sphere in `ℂ^n`.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| gaussian_c64(rng)).collect();
        let norm = crate::opcore::vec_norm(&v);
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Haar-distributed unitary: Gram–Schmidt on a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let g = random_complex_matrix(n, n, rng);
        if let Some(q) = orthonormalize_columns(&g) {
            return q;
        }
    }
}

/// Modified Gram–Schmidt; `None` on (numerical) rank deficiency.
pub(crate) fn orthonormalize_columns(g: &ComplexMatrix) -> Option<ComplexMatrix> {
    let (rows, cols) = g.shape();
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = g.column(j);
        for b in &basis {
            let proj = crate::opcore::inner(b, &v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= proj * y;
            }
        }
        let norm = crate::opcore::vec_norm(&v);
        if norm < 1e-8 {
            return None;
        }
        basis.push(v.into_iter().map(|z| z / norm).collect());
    }
    Some(ComplexMatrix::from_fn(rows, cols, |i, j| basis[j][i]))
}

/// Mixed state `GG†/Tr(GG†)` for a Ginibre `G`.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityOperator {
    let g = random_complex_matrix(n, n, rng);
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    DensityOperator::new(w.scale(&C64::new(1.0 / tr, 0.0)).hermitian_part())
        .expect("Wishart matrix is a valid state")
}

/// Channel with `num_kraus` Kraus operators cut from a random isometry
/// `ℂ^q → ℂ^{q·num_kraus}`.
pub fn random_channel<R: Rng + ?Sized>(q: usize, num_kraus: usize, rng: &mut R) -> KrausChannel {
    let r = num_kraus.max(1);
    let u = random_unitary(q * r, rng);
    // The first q columns of a unitary form an isometry.
    let kraus = (0..r).map(|k| u.block(k * q, 0, q, q)).collect();
    KrausChannel::new(kraus).expect("isometry blocks are trace preserving")
}

/// A random rank-`r` orthogonal projector on `ℂ^n`.
pub fn random_projector<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> Projector {
    let u = random_unitary(n, rng);
    let p0 = Projector::coordinate(n, &(0..r.min(n)).collect::<Vec<_>>()).expect("valid indices");
    Projector::new(u.conjugate(p0.matrix()).hermitian_part()).expect("conjugated projector")
}

fn letters(nsym: usize) -> Alphabet {
    Alphabet::new((0..nsym).map(|i| ((b'a' + i as u8) as char).to_string()))
        .expect("distinct letters")
}

/// QCFA over the alphabet `a, b, …` with random transitions, channels,
/// initial state and a random rank-1 accepting projector.
pub fn random_qcfa<R: Rng + ?Sized>(c: usize, q: usize, nsym: usize, rng: &mut R) -> Qcfa {
    let delta = (0..c)
        .map(|_| (0..nsym).map(|_| rng.random_range(0..c)).collect())
        .collect();
    let channels = (0..c)
        .map(|_| {
            (0..nsym)
                .map(|_| Arc::new(random_channel(q, 2, rng)))
                .collect()
        })
        .collect();
    let rho = random_density(q, rng);
    let accept = EffectOperator::from(random_projector(q, 1, rng));
    Qcfa::new(letters(nsym), c, 0, rho, delta, channels, accept).expect("valid random QCFA")
}

/// MO-1QFA over `a, b, …` with Haar-like unitaries.
pub fn random_moqfa<R: Rng + ?Sized>(n: usize, nsym: usize, rng: &mut R) -> Moqfa {
    let us = (0..nsym).map(|_| random_unitary(n, rng)).collect();
    let psi = random_unit_vector(n, rng);
    let accept = random_projector(n, (n / 2).max(1), rng);
    Moqfa::new(letters(nsym), psi, us, accept).expect("valid random MO-1QFA")
}
