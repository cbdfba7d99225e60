use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::tolerance::TAU_EQ;

/// Strict cutpoint `λ`: a word is accepted iff its value is `> λ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutpointSpec {
    pub lambda: f64,
    /// Values within this distance of `λ` are flagged ambiguous (float mode).
    pub tolerance: f64,
}

impl CutpointSpec {
    pub fn new(lambda: f64) -> Self {
        Self {
            lambda,
            tolerance: TAU_EQ,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

/// Result of a strict-cutpoint decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    /// `+1` iff the value strictly exceeds the cutpoint by more than the tolerance.
    pub sign: i8,
    /// The value lies within the tolerance of the cutpoint.
    pub ambiguous: bool,
}

impl Membership {
    pub fn accepted(&self) -> bool {
        self.sign > 0
    }
}

/// `sgn(f − λ)` with equality on the reject side. Values within the
/// tolerance of `λ` are flagged ambiguous and take the reject sign.
pub fn member(value: f64, spec: &CutpointSpec) -> Membership {
    let gap = value - spec.lambda;
    let ambiguous = gap.abs() < spec.tolerance;
    Membership {
        sign: if gap > 0.0 && !ambiguous { 1 } else { -1 },
        ambiguous,
    }
}

/// Exact strict-cutpoint sign for exact scalars (never ambiguous).
pub fn member_exact<T: Scalar>(value: &T, lambda: &T) -> i8 {
    if value > lambda {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn strict_semantics() {
        let spec = CutpointSpec::new(0.5);
        assert_eq!(member(0.6, &spec).sign, 1);
        assert!(!member(0.6, &spec).ambiguous);
        assert_eq!(member(0.5, &spec).sign, -1);
        let m = member(0.5 + 1e-12, &spec);
        assert_eq!(m.sign, -1);
        assert!(m.ambiguous);
    }

    #[test]
    fn exact_equality_rejects() {
        let half = Rational::from_ratio(1, 2);
        assert_eq!(member_exact(&half, &half), -1);
        assert_eq!(member_exact(&Rational::from_ratio(3, 5), &half), 1);
    }
}
