//! Point counts of `C: y^l = P(x)` over `F_p` in sliding windows
//! `(x0, x0 + I] × [0, p-1]` and their distribution among residue classes.

mod experiment;
mod histogram;
mod residues;
mod restricted;
mod window;

pub use experiment::{
    theorem_experiment, ExperimentHistogram, ExperimentInputs, ExperimentKind, ExperimentReport,
    HypothesisCheck, HypothesisPolicy, ModelComparison, ModelRun,
};
pub use histogram::{residue_histogram, Histogram, JointHistogram};
pub use residues::{cor4_exceptional, gauss_lemma_check, GaussLemma};
pub use restricted::{
    beta_residue_scan, condition_star, condition_star_witness, restricted_window_counts, BetaScan,
    RestrictedIndex,
};
pub use window::{joint_histogram, sliding_sums, window_counts};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{Character, FieldSpec};
use crate::polyff::Poly;

/// The curve `y^l = P(x)` together with the character that counts its fibers.
#[derive(Debug, Clone)]
pub struct Curve {
    poly: Poly,
    chi: Character,
}

impl Curve {
    pub fn new(field: &FieldSpec, poly: Poly, ell: u64) -> Result<Self> {
        if poly.modulus() != field.p() {
            return Err(Error::FieldMismatch {
                left: field.p(),
                right: poly.modulus(),
            });
        }
        poly.require_nonconstant()?;
        let chi = Character::new(field, ell)?;
        Ok(Self { poly, chi })
    }

    /// Same curve, with the character backed by a full index table
    /// (`p <= 2^24`).
    pub fn with_index_table(mut self) -> Result<Self> {
        self.chi = self.chi.with_index_table()?;
        Ok(self)
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn character(&self) -> &Character {
        &self.chi
    }

    pub fn field(&self) -> &FieldSpec {
        self.chi.field()
    }

    pub fn p(&self) -> u64 {
        self.chi.p()
    }

    pub fn ell(&self) -> u64 {
        self.chi.ell()
    }

    /// `#{y ∈ F_p : y^l = P(x)}`, which is 1 at roots of `P`, and otherwise
    /// `d = gcd(l, p-1)` or 0 depending on whether `P(x)` is a `d`-th power.
    #[inline]
    pub fn fiber_count(&self, x: u64) -> u64 {
        match self.chi.index(self.poly.eval(x)) {
            None => 1,
            Some(0) => self.chi.order(),
            Some(_) => 0,
        }
    }
}

/// Window positions `x0 = x_start, …, x_start + scan_len − 1`, each window
/// covering `(x0, x0 + window]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub x_start: u64,
    pub scan_len: u64,
    pub window: u64,
    /// Block length `L` for experiments that need one.
    pub block: Option<u64>,
}

impl ScanSpec {
    pub fn new(x_start: u64, scan_len: u64, window: u64) -> Self {
        Self {
            x_start,
            scan_len,
            window,
            block: None,
        }
    }

    pub fn with_block(mut self, block: u64) -> Self {
        self.block = Some(block);
        self
    }

    /// Every window position `x0 ∈ [0, p − 1 − window]`.
    pub fn full(p: u64, window: u64) -> Self {
        Self::new(0, p.saturating_sub(window), window)
    }

    /// Windows must stay inside `[0, p − 1]`: `x_start + scan_len + window <= p`.
    pub fn validate(&self, p: u64) -> Result<()> {
        let end = self
            .x_start
            .checked_add(self.scan_len)
            .and_then(|v| v.checked_add(self.window));
        match end {
            Some(end) if end <= p => Ok(()),
            _ => Err(Error::invalid(
                "scan",
                format!(
                    "x_start + scan_len + I = {} + {} + {} exceeds p = {p} (windows may not wrap)",
                    self.x_start, self.scan_len, self.window
                ),
            )),
        }
    }

    pub fn positions(&self) -> std::ops::Range<u64> {
        self.x_start..self.x_start + self.scan_len
    }
}

/// Inclusive integer interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: u64,
    pub hi: u64,
}

impl Interval {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo > hi {
            return Err(Error::invalid("interval", format!("[{lo}, {hi}] is empty")));
        }
        Ok(Self { lo, hi })
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn len(&self) -> u64 {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<u64> {
        self.lo..=self.hi
    }
}

/// The box `Ω = 𝓘 × 𝓙` restricting both coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: Interval,
    pub y: Interval,
}

impl Rect {
    pub fn new(x: Interval, y: Interval, p: u64) -> Result<Self> {
        if x.hi >= p || y.hi >= p {
            return Err(Error::invalid("rect", format!("endpoints must lie in [0, {}]", p - 1)));
        }
        Ok(Self { x, y })
    }

    /// `α = |𝓙| / p`.
    pub fn alpha(&self, p: u64) -> f64 {
        self.y.len() as f64 / p as f64
    }
}
