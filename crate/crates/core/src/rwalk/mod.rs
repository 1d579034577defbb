//! The random-walk model on `Z/mZ`: steps `X − Y` with `X, Y ∈ {0, l}` and
//! `P(X = l) = 1/l`, Monte Carlo estimates of `Φ(L; m, a)`, exact enumeration
//! of the three square-sum bounds, and the block model used to calibrate curve
//! discrepancies.

mod enumerate;
mod model;
mod simulate;

pub use enumerate::{
    exact_prop21a, exact_prop21b, exact_prop21c, EnumResult, ENUMERATION_LIMIT,
};
pub use model::{model_reference, ModelQuantiles, ModelSpec, StepLaw};
pub use simulate::{simulate_phi, PhiSimulation};

use num_integer::Integer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of a Monte Carlo run of the walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub ell: u64,
    pub m: u64,
    /// Walk length `L`.
    pub len: u64,
    pub trials: u64,
    pub seed: u64,
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ell < 2 {
            return Err(Error::invalid("ell", "must be >= 2"));
        }
        if self.m == 0 {
            return Err(Error::invalid("m", "must be >= 1"));
        }
        if self.len == 0 {
            return Err(Error::invalid("L", "must be >= 1"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be >= 1"));
        }
        Ok(())
    }

    /// The coprimality hypothesis `GCD(m, l) = 1` of the uniformity bounds.
    pub fn require_coprime(&self) -> Result<()> {
        require_coprime(self.m, self.ell)
    }
}

pub(crate) fn require_coprime(m: u64, ell: u64) -> Result<()> {
    if m.gcd(&ell) != 1 {
        return Err(Error::hypothesis(
            "GCD(m,ℓ)=1",
            format!("gcd({m}, {ell}) = {}", m.gcd(&ell)),
        ));
    }
    Ok(())
}

/// Random stream for trial `trial` of a run seeded with `seed`.
///
/// The ChaCha key comes from `seed` (expanded by `seed_from_u64`) and the
/// trial index selects the 64-bit stream, so every trial reads its own
/// counter-addressed keystream regardless of which thread runs it.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[cfg(test)]
mod tests {
    use rand::Rng;

    use super::*;

    #[test]
    fn streams_are_independent_of_order() {
        let a: Vec<u64> = (0..4).map(|t| trial_rng(9, t).random()).collect();
        let b: Vec<u64> = (0..4).rev().map(|t| trial_rng(9, t).random()).collect();
        assert_eq!(a, b.into_iter().rev().collect::<Vec<_>>());
        assert_ne!(a[0], a[1]);
        assert_ne!(trial_rng(9, 0).random::<u64>(), trial_rng(10, 0).random::<u64>());
    }

    #[test]
    fn coprime_hypothesis_is_named() {
        let err = require_coprime(4, 2).unwrap_err();
        assert!(err.to_string().contains("GCD(m,ℓ)=1"));
        assert!(require_coprime(3, 2).is_ok());
    }
}
