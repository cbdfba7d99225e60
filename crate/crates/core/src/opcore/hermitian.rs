//! Hermitian operators, their distinguished subsets, and the generalized
//! Gell-Mann orthonormal basis.

use num_complex::Complex64 as C64;
use num_traits::Zero;

use super::eigh::{eigh, Eigh};
use super::matrix::{inner, vec_norm, ComplexMatrix};
use crate::error::{Error, Result};
use crate::tolerance::{TAU_HERM, TAU_PSD};

/// A square complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    /// Validates Hermiticity within `τ_herm` and stores the exact Hermitian part.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, TAU_HERM)
    }

    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self> {
        m.require_square()?;
        m.require_finite()?;
        let defect = m.hermitian_defect();
        if defect > tol * m.frobenius_norm().max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self(m.hermitian_part()))
    }

    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(psi: &[C64]) -> Self {
        Self(ComplexMatrix::outer(psi, psi))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn eigh(&self) -> Eigh {
        eigh(self)
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn expectation(&self, psi: &[C64]) -> f64 {
        inner(psi, &self.0.mul_vec(psi)).re
    }
}

/// `⟨A, B⟩_HS = Tr(A†B)`, real for Hermitian arguments.
pub fn hs_inner(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    hs_inner_matrix(a.matrix(), b.matrix()).map(|z| z.re)
}

/// `Tr(A†B)` for arbitrary equally-shaped matrices.
pub fn hs_inner_matrix(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    if a.shape() != b.shape() {
        return Err(Error::dims(
            format!("{}x{}", a.rows(), a.cols()),
            format!("{}x{}", b.rows(), b.cols()),
        ));
    }
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

macro_rules! operator_newtype {
    ($name:ident) => {
        impl $name {
            pub fn operator(&self) -> &HermitianOperator {
                &self.0
            }

            pub fn matrix(&self) -> &ComplexMatrix {
                self.0.matrix()
            }

            pub fn dim(&self) -> usize {
                self.0.dim()
            }

            #[allow(dead_code)]
            pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
                Self(HermitianOperator::new_unchecked(m))
            }
        }

        impl AsRef<HermitianOperator> for $name {
            fn as_ref(&self) -> &HermitianOperator {
                &self.0
            }
        }
    };
}

/// Positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator(HermitianOperator);
operator_newtype!(DensityOperator);

impl DensityOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let h = HermitianOperator::new(m)?;
        let tr = h.trace();
        if (tr - 1.0).abs() > 1e-12 {
            return Err(Error::BadTrace(tr));
        }
        let min = h.eigh().min();
        if min < -TAU_PSD {
            return Err(Error::NotPositive(min));
        }
        Ok(Self(h))
    }

    /// `|ψ⟩⟨ψ|` for a unit vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = vec_norm(psi);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self(HermitianOperator::pure(psi)))
    }

    /// `I/q`.
    pub fn maximally_mixed(q: usize) -> Self {
        Self::new_unchecked(ComplexMatrix::identity(q).scale(&C64::new(1.0 / q as f64, 0.0)))
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }
}

/// Hermitian with spectrum in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectOperator(HermitianOperator);
operator_newtype!(EffectOperator);

impl EffectOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let h = HermitianOperator::new(m)?;
        let e = h.eigh();
        if e.min() < -TAU_PSD || e.max() > 1.0 + TAU_PSD {
            return Err(Error::NotEffect {
                min: e.min(),
                max: e.max(),
            });
        }
        Ok(Self(h))
    }

    /// `Tr(E ρ)`.
    pub fn probability(&self, rho: &ComplexMatrix) -> f64 {
        hs_inner_matrix(self.matrix(), rho).map(|z| z.re).unwrap_or(f64::NAN)
    }
}

impl From<Projector> for EffectOperator {
    fn from(p: Projector) -> Self {
        Self(p.0)
    }
}

/// Orthogonal projector: `P² = P = P†`.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector(HermitianOperator);
operator_newtype!(Projector);

impl Projector {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let h = HermitianOperator::new(m)?;
        let p = h.matrix();
        let resid = (&(p * p) - p).frobenius_norm();
        if resid > 1e-10 {
            return Err(Error::NotProjector(resid));
        }
        Ok(Self(h))
    }

    /// Projector onto the span of the listed standard basis vectors (0-based).
    pub fn coordinate(n: usize, indices: &[usize]) -> Result<Self> {
        let mut diag = vec![C64::zero(); n];
        for &i in indices {
            if i >= n {
                return Err(Error::InvalidParameter(format!(
                    "basis index {i} out of range for dimension {n}"
                )));
            }
            diag[i] = C64::new(1.0, 0.0);
        }
        Ok(Self::new_unchecked(ComplexMatrix::diagonal(&diag)))
    }

    pub fn rank(&self) -> usize {
        self.0.trace().round() as usize
    }
}

/// An ordered Hilbert–Schmidt orthonormal basis of `Herm(ℂ^q)`.
#[derive(Clone, Debug)]
pub struct HermitianBasis {
    q: usize,
    elements: Vec<HermitianOperator>,
}

impl HermitianBasis {
    /// Generalized Gell-Mann basis: `I/√q`, then diagonal, symmetric and
    /// antisymmetric elements, the off-diagonal ones in lexicographic `(j,k)`.
    pub fn gell_mann(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let mut elements = Vec::with_capacity(q * q);
        let one = C64::new(1.0, 0.0);
        elements.push(HermitianOperator::new_unchecked(
            ComplexMatrix::identity(q).scale(&C64::new(1.0 / (q as f64).sqrt(), 0.0)),
        ));
        for l in 1..q {
            let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let mut diag = vec![C64::zero(); q];
            for d in diag.iter_mut().take(l) {
                *d = one * norm;
            }
            diag[l] = one * (-(l as f64) * norm);
            elements.push(HermitianOperator::new_unchecked(ComplexMatrix::diagonal(&diag)));
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for j in 0..q {
            for k in j + 1..q {
                let mut m = ComplexMatrix::zeros(q, q);
                m[(j, k)] = C64::new(h, 0.0);
                m[(k, j)] = C64::new(h, 0.0);
                elements.push(HermitianOperator::new_unchecked(m));
            }
        }
        for j in 0..q {
            for k in j + 1..q {
                let mut m = ComplexMatrix::zeros(q, q);
                m[(j, k)] = C64::new(0.0, h);
                m[(k, j)] = C64::new(0.0, -h);
                elements.push(HermitianOperator::new_unchecked(m));
            }
        }
        Ok(Self { q, elements })
    }

    pub fn dim(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<HermitianOperator> {
        self.elements
    }

    /// Traceless tail `B_1, …, B_{q²−1}`.
    pub fn traceless(&self) -> &[HermitianOperator] {
        &self.elements[1..]
    }

    /// `x_i = Tr(B_i X)`; only the real part is kept (exact for Hermitian `X`).
    pub fn coordinates(&self, x: &ComplexMatrix) -> Result<Vec<f64>> {
        x.require_shape(self.q, self.q)?;
        // B_i is Hermitian so Tr(B_i X) = Tr(B_i† X).
        self.elements
            .iter()
            .map(|b| hs_inner_matrix(b.matrix(), x).map(|z| z.re))
            .collect()
    }

    /// `Σ x_i B_i`.
    pub fn reconstruct(&self, coords: &[f64]) -> Result<HermitianOperator> {
        if coords.len() != self.elements.len() {
            return Err(Error::dims(self.elements.len(), coords.len()));
        }
        let mut acc = ComplexMatrix::zeros(self.q, self.q);
        for (x, b) in coords.iter().zip(&self.elements) {
            acc = &acc + &b.matrix().scale(&C64::new(*x, 0.0));
        }
        Ok(HermitianOperator::new_unchecked(acc))
    }
}

/// The ordered `q²` Gell-Mann operators.
pub fn hermitian_basis(q: usize) -> Result<Vec<HermitianOperator>> {
    HermitianBasis::gell_mann(q).map(HermitianBasis::into_elements)
}
