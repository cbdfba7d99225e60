//! Automaton models and strict-cutpoint membership.

mod cutpoint;
mod gfa;
mod moqfa;
mod pfa;
mod qcfa;
mod word;

pub use cutpoint::{member, member_exact, CutpointSpec, Membership};
pub use gfa::{evaluate_gfa, Gfa};
pub use moqfa::{evaluate_moqfa, Moqfa};
pub use pfa::{evaluate_pfa, Pfa};
pub use qcfa::{evaluate_qcfa, Qcfa};
pub use word::{enumerate_words, Alphabet, Word};

use crate::error::Result;

/// Anything with an acceptance function on words. Evaluation is pure, so one
/// automaton can be shared across threads.
pub trait Automaton: Sync {
    fn alphabet(&self) -> &Alphabet;

    /// Acceptance value on already-resolved symbol indices.
    fn acceptance_indices(&self, symbols: &[usize]) -> f64;

    fn acceptance(&self, word: &Word) -> Result<f64> {
        Ok(self.acceptance_indices(&self.alphabet().resolve(word)?))
    }
}
