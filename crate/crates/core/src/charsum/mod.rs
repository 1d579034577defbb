//! Multiplicative character sums over intervals, kept as exact tallies of
//! unity indices, with the Weil-type bounds and the census counts built on
//! them.

mod census;

pub use census::{
    census_m, joint_census, restricted_census, shifted_census, CensusMode, CensusResult,
    CensusSpec, ShiftedCensus,
};

use std::ops::Range;

use num_complex::Complex;
use num_traits::{Float, FloatConst};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::Character;
use crate::polyff::{is_complete_power, Poly};

const CHUNK: u64 = 1 << 14;

/// `S = Σ χ(P(x))` as occurrence counts per unity index, plus the number of
/// arguments equal to zero (which contribute nothing).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharSumTally {
    pub counts: Vec<u64>,
    pub zero_count: u64,
}

impl CharSumTally {
    pub fn new(order: u64) -> Self {
        Self {
            counts: vec![0; order as usize],
            zero_count: 0,
        }
    }

    #[inline]
    pub fn record(&mut self, index: Option<u32>) {
        match index {
            Some(j) => self.counts[j as usize] += 1,
            None => self.zero_count += 1,
        }
    }

    pub fn merge(&mut self, other: &CharSumTally) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.zero_count += other.zero_count;
    }

    pub fn terms(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.zero_count
    }

    /// `Σ_j counts_j ζ_d^j`.
    pub fn value<T: Float + FloatConst>(&self) -> Complex<T> {
        let d = T::from(self.counts.len()).unwrap();
        let two_pi = T::PI() + T::PI();
        self.counts
            .iter()
            .enumerate()
            .fold(Complex::new(T::zero(), T::zero()), |acc, (j, &c)| {
                let z = Complex::from_polar(T::one(), two_pi * T::from(j).unwrap() / d);
                acc + z * T::from(c).unwrap()
            })
    }

    pub fn magnitude<T: Float + FloatConst>(&self) -> T {
        self.value::<T>().norm()
    }
}

/// Exact tally of `χ(P(x))` over `x ∈ range`.
pub fn incomplete_sum(poly: &Poly, chi: &Character, range: Range<u64>) -> Result<CharSumTally> {
    let p = chi.p();
    if poly.modulus() != p {
        return Err(Error::FieldMismatch { left: p, right: poly.modulus() });
    }
    if range.end > p {
        return Err(Error::invalid("interval", format!("{range:?} leaves [0, {}]", p - 1)));
    }
    Ok(tally_over(chi.order(), range, |x| chi.index(poly.eval(x))))
}

pub(crate) fn tally_over<F>(order: u64, range: Range<u64>, index: F) -> CharSumTally
where
    F: Fn(u64) -> Option<u32> + Sync,
{
    let len = range.end.saturating_sub(range.start);
    let parts: Vec<CharSumTally> = (0..len.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = range.start + c * CHUNK;
            let hi = (lo + CHUNK).min(range.end);
            let mut t = CharSumTally::new(order);
            for x in lo..hi {
                t.record(index(x));
            }
            t
        })
        .collect();
    let mut total = CharSumTally::new(order);
    for part in &parts {
        total.merge(part);
    }
    total
}

/// Outcome of the incomplete-sum bound `2(deg + 1)√p ln p`, and on the
/// full interval also of the complete-sum bound `(deg + 1)√p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeilCheck {
    pub tally: CharSumTally,
    pub magnitude: f64,
    pub bound: f64,
    pub pass: bool,
    pub complete_bound: Option<f64>,
    pub complete_pass: Option<bool>,
}

/// Requires a nontrivial character and `P` not a complete `d`-th power.
pub fn require_weil_hypothesis(poly: &Poly, chi: &Character) -> Result<()> {
    let d = chi.order();
    if d < 2 {
        return Err(Error::hypothesis(
            "nontrivial character",
            format!("gcd(ℓ, p−1) = 1 for ℓ = {}, p = {}", chi.ell(), chi.p()),
        ));
    }
    poly.require_nonzero()?;
    if is_complete_power(poly, d)? {
        return Err(Error::hypothesis(
            "not a complete ℓ-th power",
            format!("{poly} is a complete {d}-th power"),
        ));
    }
    Ok(())
}

pub fn weil_check(poly: &Poly, chi: &Character, range: Range<u64>) -> Result<WeilCheck> {
    require_weil_hypothesis(poly, chi)?;
    let p = chi.p();
    let full = range.start == 0 && range.end == p;
    let tally = incomplete_sum(poly, chi, range)?;
    let magnitude = tally.magnitude::<f64>();
    let deg1 = (poly.degree().unwrap_or(0) + 1) as f64;
    let sqrt_p = (p as f64).sqrt();
    let bound = 2.0 * deg1 * sqrt_p * (p as f64).ln();
    let complete_bound = full.then_some(deg1 * sqrt_p);
    Ok(WeilCheck {
        pass: magnitude <= bound,
        complete_pass: complete_bound.map(|b| magnitude <= b + 1e-9 * b),
        tally,
        magnitude,
        bound,
        complete_bound,
    })
}

/// `Σ_{x ∈ F_p} χ(P(x)) e_p(−t x)`.
pub fn twisted_sum(poly: &Poly, chi: &Character, t: u64) -> Result<Complex<f64>> {
    let p = chi.p();
    if poly.modulus() != p {
        return Err(Error::FieldMismatch { left: p, right: poly.modulus() });
    }
    let d = chi.order() as f64;
    let two_pi = std::f64::consts::TAU;
    let t = t % p;
    let parts: Vec<Complex<f64>> = (0..p.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(p);
            let mut acc = Complex::new(0.0, 0.0);
            for x in lo..hi {
                if let Some(j) = chi.index(poly.eval(x)) {
                    let tx = (u128::from(t) * u128::from(x) % u128::from(p)) as f64;
                    let angle = two_pi * (f64::from(j) / d - tx / p as f64);
                    acc += Complex::from_polar(1.0, angle);
                }
            }
            acc
        })
        .collect();
    Ok(parts.into_iter().fold(Complex::new(0.0, 0.0), |a, b| a + b))
}
