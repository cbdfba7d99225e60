use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signrank::{shattering_column, sign_pattern, MAX_SHATTERING_DIM};

/// Which sign vectors `η ∈ {±1}^d` get a test symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EtaMode {
    /// All `2^d` vectors in complete-shattering column order.
    Full,
    /// `count` distinct vectors drawn uniformly from a ChaCha8 stream.
    Sampled { count: usize, seed: u64 },
}

impl EtaMode {
    /// Parses `full` or `sample:N` (the seed is supplied separately).
    pub fn parse(text: &str, seed: u64) -> Result<Self> {
        if text == "full" {
            return Ok(EtaMode::Full);
        }
        let count = text
            .strip_prefix("sample:")
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::InvalidParameter(format!("eta mode must be `full` or `sample:N`, got {text:?}")))?;
        Ok(EtaMode::Sampled { count, seed })
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            EtaMode::Full => None,
            EtaMode::Sampled { seed, .. } => Some(*seed),
        }
    }
}

/// Column indices of `C_d` selected by the mode, in increasing order.
pub fn eta_columns(d: usize, mode: EtaMode) -> Result<Vec<u64>> {
    match mode {
        EtaMode::Full => {
            if d > MAX_SHATTERING_DIM {
                return Err(Error::InvalidParameter(format!(
                    "full eta enumeration needs d <= {MAX_SHATTERING_DIM}, got d = {d}; use sample:N"
                )));
            }
            Ok((0..1u64 << d).collect())
        }
        EtaMode::Sampled { count, seed } => {
            if d >= 63 {
                return Err(Error::InvalidParameter(format!("d = {d} is too large to sample")));
            }
            let total = 1u64 << d;
            if count as u64 > total {
                return Err(Error::InvalidParameter(format!(
                    "cannot draw {count} distinct sign vectors out of {total}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut cols: Vec<u64> = if total <= usize::MAX as u64 {
                index::sample(&mut rng, total as usize, count)
                    .into_iter()
                    .map(|i| i as u64)
                    .collect()
            } else {
                unreachable!("d < 63 fits in usize on 64-bit targets")
            };
            cols.sort_unstable();
            Ok(cols)
        }
    }
}

/// The selected sign vectors.
pub fn eta_vectors(d: usize, mode: EtaMode) -> Result<Vec<Vec<i8>>> {
    Ok(eta_columns(d, mode)?
        .into_iter()
        .map(|j| shattering_column(d, j))
        .collect())
}

/// Test symbol name, `tau:` followed by the `+`/`-` pattern.
pub fn tau_symbol(eta: &[i8]) -> String {
    format!("tau:{}", sign_pattern(eta))
}

/// Prepare symbol name for the 1-based index `l`.
pub fn prepare_symbol(l: usize) -> String {
    format!("p:{l}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_order_matches_shattering() {
        let etas = eta_vectors(2, EtaMode::Full).unwrap();
        let names: Vec<String> = etas.iter().map(|e| tau_symbol(e)).collect();
        assert_eq!(names, ["tau:++", "tau:+-", "tau:-+", "tau:--"]);
        assert!(eta_vectors(21, EtaMode::Full).is_err());
    }

    #[test]
    fn sampling_is_distinct_and_seeded() {
        let mode = EtaMode::Sampled { count: 2048, seed: 7 };
        let a = eta_columns(11, mode).unwrap();
        let b = eta_columns(11, mode).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2048);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(eta_columns(3, EtaMode::Sampled { count: 9, seed: 0 }).is_err());
        let c = eta_columns(30, EtaMode::Sampled { count: 100, seed: 1 }).unwrap();
        assert_eq!(c.len(), 100);
    }

    #[test]
    fn parse_modes() {
        assert_eq!(EtaMode::parse("full", 3).unwrap(), EtaMode::Full);
        assert_eq!(EtaMode::parse("sample:12", 3).unwrap(), EtaMode::Sampled { count: 12, seed: 3 });
        assert!(EtaMode::parse("sample:x", 3).is_err());
        assert!(EtaMode::parse("sample:0", 3).is_err());
        assert!(EtaMode::parse("all", 3).is_err());
    }
}
