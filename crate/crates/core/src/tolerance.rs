//! Numerical tolerances used across the crate.

use crate::error::{Error, Result};

/// Hermiticity tolerance on `‖H − H†‖_F` (relative to `max(1, ‖H‖_F)`).
pub const TAU_HERM: f64 = 1e-12;
/// Smallest eigenvalue accepted as non-negative.
pub const TAU_PSD: f64 = 1e-10;
/// Scalar equality; values this close to a cutpoint are reported ambiguous.
pub const TAU_EQ: f64 = 1e-9;
/// Relative singular-value threshold for numerical rank.
pub const TAU_RANK: f64 = 1e-8;

/// Overridable copy of the tolerance constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub herm: f64,
    pub psd: f64,
    pub eq: f64,
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: TAU_HERM,
            psd: TAU_PSD,
            eq: TAU_EQ,
            rank: TAU_RANK,
        }
    }
}

impl Tolerances {
    /// Apply a `KEY=VALUE` override, as accepted by the CLI `--tol` flag.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (key, value) = spec
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("expected KEY=VALUE, got {spec:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad tolerance value in {spec:?}")))?;
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be finite and non-negative: {spec:?}"
            )));
        }
        match key.trim() {
            "herm" => self.herm = value,
            "psd" => self.psd = value,
            "eq" => self.eq = value,
            "rank" => self.rank = value,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown tolerance key {other:?} (expected herm, psd, eq or rank)"
                )))
            }
        }
        Ok(())
    }
}
