//! CPTP maps in Kraus form.

use num_complex::Complex64 as C64;

use super::hermitian::{DensityOperator, HermitianOperator};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::tolerance::TAU_PSD;

const TRACE_PRESERVATION_TOL: f64 = 1e-10;

/// `ρ ↦ Σ Kᵢ ρ Kᵢ†` with `Σ Kᵢ†Kᵢ = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Validates shapes and trace preservation. Complete positivity holds for
    /// any Kraus list; [`choi_matrix`] can be used to double check it.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidParameter("a channel needs at least one Kraus operator".into()))?;
        let (dim_out, dim_in) = first.shape();
        let mut sum = ComplexMatrix::zeros(dim_in, dim_in);
        for k in &kraus {
            k.require_shape(dim_out, dim_in)?;
            k.require_finite()?;
            sum = &sum + &(&k.adjoint() * k);
        }
        let resid = (&sum - &ComplexMatrix::identity(dim_in)).frobenius_norm();
        if resid > TRACE_PRESERVATION_TOL {
            return Err(Error::NotTracePreserving(resid));
        }
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
        })
    }

    pub(crate) fn new_unchecked(kraus: Vec<ComplexMatrix>) -> Self {
        let (dim_out, dim_in) = kraus[0].shape();
        Self {
            dim_in,
            dim_out,
            kraus,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new_unchecked(vec![ComplexMatrix::identity(n)])
    }

    /// `ρ ↦ UρU†`.
    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        Self::new(vec![u.clone()])
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Applies the linear map to an arbitrary `dim_in × dim_in` matrix.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        x.require_shape(self.dim_in, self.dim_in)?;
        Ok(self.apply_raw(x))
    }

    pub(crate) fn apply_raw(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out = &out + &k.conjugate(x);
        }
        out
    }

    /// The channel applying `first` and then `self`.
    pub fn compose_after(&self, first: &KrausChannel) -> Result<KrausChannel> {
        if first.dim_out != self.dim_in {
            return Err(Error::dims(self.dim_in, first.dim_out));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * first.kraus.len());
        for a in &self.kraus {
            for b in &first.kraus {
                kraus.push(a * b);
            }
        }
        Ok(Self::new_unchecked(kraus))
    }
}

/// `Σ Kᵢ ρ Kᵢ†`.
pub fn apply_channel(channel: &KrausChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    if rho.dim() != channel.dim_in {
        return Err(Error::dims(channel.dim_in, rho.dim()));
    }
    let out = channel.apply_raw(rho.matrix()).hermitian_part();
    Ok(DensityOperator::new_unchecked(out))
}

/// Choi operator `Σᵢⱼ |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`.
pub fn choi_matrix(channel: &KrausChannel) -> HermitianOperator {
    let (n, m) = (channel.dim_in, channel.dim_out);
    let mut choi = ComplexMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            let mut unit = ComplexMatrix::zeros(n, n);
            unit[(i, j)] = C64::new(1.0, 0.0);
            let img = channel.apply_raw(&unit);
            choi.set_block(i * m, j * m, &img);
        }
    }
    HermitianOperator::new_unchecked(choi.hermitian_part())
}

/// `true` when the Choi operator has no eigenvalue below `−τ_psd`.
pub fn is_completely_positive(channel: &KrausChannel) -> bool {
    choi_matrix(channel).eigh().min() >= -TAU_PSD
}
