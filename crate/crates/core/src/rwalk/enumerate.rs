use num_complex::Complex;
use num_traits::{Float, FloatConst};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::require_coprime;
use crate::error::{Error, Result};

/// Largest number of `(v, v')` assignments an enumeration may visit.
pub const ENUMERATION_LIMIT: u128 = 1 << 20;

const CHUNK: u64 = 1 << 12;

/// Enumerated left side against the closed-form right side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnumResult<T> {
    pub lhs: T,
    pub bound: T,
    /// `lhs <= bound · (1 + 1e-6)`.
    pub pass: bool,
}

impl<T: Float> EnumResult<T> {
    fn new(lhs: T, bound: T) -> Self {
        let slack = T::one() + T::from(1e-6).unwrap();
        Self {
            lhs,
            bound,
            pass: lhs <= bound * slack,
        }
    }
}

/// `Σ_a Σ_{v,v'} |Σ_{x<=L} Σ_{t=1}^{m-1} e_m(t(Σ_{j<=x} F(v_j) − F(v'_j) − a))|²`
/// over `v, v' ∈ μ_l^L`, compared with `7 m^4 L l^(2L+2)`.
pub fn exact_prop21a<T>(ell: u64, m: u64, len: u32) -> Result<EnumResult<T>>
where
    T: Float + FloatConst + Send + Sync,
{
    check_ell(ell)?;
    require_coprime(m, ell)?;
    let lhs = lhs_for_alphabet(&power_alphabet(ell), m, len, 1)?;
    let bound = checked_bound(&[(7, 1), (m, 4), (u64::from(len), 1), (ell, 2 * len + 2)])?;
    Ok(EnumResult::new(lhs, bound))
}

/// The `k`-dimensional version over `t ∈ (Z/mZ)^k \ {0}` and
/// `a ∈ (Z/mZ)^k`, compared with `7 m^(2k+2) L l^(2Lk+2)`.
pub fn exact_prop21b<T>(ell: u64, m: u64, len: u32, k: u32) -> Result<EnumResult<T>>
where
    T: Float + FloatConst + Send + Sync,
{
    check_ell(ell)?;
    if k == 0 {
        return Err(Error::invalid("k", "must be >= 1"));
    }
    require_coprime(m, ell)?;
    let lhs = lhs_for_alphabet(&power_alphabet(ell), m, len, k)?;
    let bound = checked_bound(&[
        (7, 1),
        (m, 2 * k + 2),
        (u64::from(len), 1),
        (ell, 2 * len * k + 2),
    ])?;
    Ok(EnumResult::new(lhs, bound))
}

/// Steps `v_j ∈ {0, 1}` themselves instead of `F(v_j)`, compared with
/// `2^(2L+2) m^4 L`.
pub fn exact_prop21c<T>(m: u64, len: u32) -> Result<EnumResult<T>>
where
    T: Float + FloatConst + Send + Sync,
{
    let lhs = lhs_for_alphabet(&[0, 1], m, len, 1)?;
    let bound = checked_bound(&[(2, 2 * len + 2), (m, 4), (u64::from(len), 1)])?;
    Ok(EnumResult::new(lhs, bound))
}

fn check_ell(ell: u64) -> Result<()> {
    if ell < 2 {
        return Err(Error::invalid("ell", "must be >= 2"));
    }
    Ok(())
}

/// `F` evaluated at the `l` roots of unity, listed by unity index.
fn power_alphabet(ell: u64) -> Vec<u64> {
    let mut f = vec![0; ell as usize];
    f[0] = ell;
    f
}

fn checked_bound<T: Float>(factors: &[(u64, u32)]) -> Result<T> {
    factors
        .iter()
        .try_fold(1u128, |acc, &(b, e)| {
            u128::from(b).checked_pow(e).and_then(|v| acc.checked_mul(v))
        })
        .and_then(T::from)
        .ok_or_else(|| Error::invalid("m", "bound does not fit in 128 bits"))
}

/// The enumerated left side for an arbitrary step alphabet: every `v_l` and
/// `v'_l` (`l = 1..k`) ranges over `alphabet^L`, and the step at position `j`
/// is `alphabet[v_j] − alphabet[v'_j]`.
pub(crate) fn lhs_for_alphabet<T>(alphabet: &[u64], m: u64, len: u32, k: u32) -> Result<T>
where
    T: Float + FloatConst + Send + Sync,
{
    if m == 0 {
        return Err(Error::invalid("m", "must be >= 1"));
    }
    if len == 0 {
        return Err(Error::invalid("L", "must be >= 1"));
    }
    let s = alphabet.len() as u128;
    let digits = 2 * len * k;
    let combos = s
        .checked_pow(digits)
        .filter(|&c| c <= ENUMERATION_LIMIT)
        .ok_or(Error::Infeasible {
            size: s.saturating_pow(digits),
            limit: ENUMERATION_LIMIT,
        })? as u64;

    // G(u) = Σ_{t=0}^{m-1} e_m(t u), built from the table of m-th roots.
    let two_pi = T::PI() + T::PI();
    let mf = T::from(m).unwrap();
    let roots: Vec<Complex<T>> = (0..m)
        .map(|j| Complex::from_polar(T::one(), two_pi * T::from(j).unwrap() / mf))
        .collect();
    let g: Vec<Complex<T>> = (0..m)
        .map(|u| (0..m).map(|t| roots[((t * u) % m) as usize]).fold(Complex::new(T::zero(), T::zero()), |a, b| a + b))
        .collect();
    let steps: Vec<u64> = alphabet.iter().map(|&f| f % m).collect();
    let a_count = m.pow(k);
    let (len, k) = (len as usize, k as usize);

    let chunk_sums: Vec<T> = (0..combos.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut walk = vec![0u64; k * len];
            let mut digit = vec![0usize; digits as usize];
            let mut total = T::zero();
            for combo in chunk * CHUNK..((chunk + 1) * CHUNK).min(combos) {
                let mut c = combo;
                for d in digit.iter_mut() {
                    *d = (c % s as u64) as usize;
                    c /= s as u64;
                }
                // walk[l*len + x] = Σ_{j<=x} step(v_{l,j}) − step(v'_{l,j}) mod m
                for l in 0..k {
                    let mut w = 0u64;
                    for x in 0..len {
                        let v = digit[(2 * l) * len + x];
                        let vp = digit[(2 * l + 1) * len + x];
                        w = (w + steps[v] + m - steps[vp]) % m;
                        walk[l * len + x] = w;
                    }
                }
                for a_idx in 0..a_count {
                    let mut sum = Complex::new(T::zero(), T::zero());
                    for x in 0..len {
                        let mut prod = Complex::new(T::one(), T::zero());
                        let mut rest = a_idx;
                        for l in 0..k {
                            let a = rest % m;
                            rest /= m;
                            prod = prod * g[((walk[l * len + x] + m - a) % m) as usize];
                        }
                        sum = sum + prod - Complex::new(T::one(), T::zero());
                    }
                    total = total + sum.norm_sqr();
                }
            }
            total
        })
        .collect();
    Ok(chunk_sums.into_iter().fold(T::zero(), |a, b| a + b))
}
