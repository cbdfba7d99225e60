//! Quantum finite automata under strict cutpoints.
//!
//! The crate covers the full constructive pipeline:
//!
//! - [`opcore`]: dense complex linear algebra (Hermitian bases, Jacobi
//!   eigendecomposition, matrix exponential, Kraus channels).
//! - [`automata`]: generalized, probabilistic, measure-once quantum and
//!   classical-quantum automata with strict-cutpoint membership.
//! - [`linearize`]: exact linearization of quantum automata into generalized
//!   finite automata through Hermitian coordinates.
//! - [`stochasticize`]: conversion of a generalized automaton with cutpoint
//!   `λ` into a probabilistic automaton with `2k+6` states and cutpoint `1/2`.
//! - [`witnesses`]: prepare-test lower-bound automata and their verification.
//! - [`signrank`]: prefix-suffix sign matrices, low-rank realizations and
//!   spectral certificates.
//! - [`io`]: the JSON document formats shared by the CLI and bindings.

pub mod automata;
pub mod error;
pub mod io;
pub mod linearize;
pub mod opcore;
pub mod sampling;
pub mod scalar;
pub mod signrank;
pub mod stochasticize;
pub mod tolerance;
pub mod witnesses;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
pub use tolerance::Tolerances;
