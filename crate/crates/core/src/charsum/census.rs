use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvewin::RestrictedIndex;
use crate::error::{Error, Result};
use crate::ffield::{add_mod, mul_mod, Character};
use crate::polyff::{admissible, multiplicatively_independent, Independence, Poly};

const CHUNK: u64 = 1 << 12;

/// Whether the census enforces the hypotheses of its counting estimate
/// (admissibility, `r < log p / log(4 deg)`, independence) or just counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusMode {
    #[default]
    Theorem,
    Count,
}

/// `#{0 <= i <= N : χ(P_l(iL + x_j)) = ζ^{v[l][j]} for all l, j}`.
#[derive(Debug, Clone)]
pub struct CensusSpec {
    pub polys: Vec<Poly>,
    pub stride: u64,
    pub offsets: Vec<u64>,
    pub n: u64,
    /// `targets[l][j]` is the unity index required of `P_l` at offset `j`.
    pub targets: Vec<Vec<u32>>,
    pub mode: CensusMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusResult {
    pub count: u64,
    /// `N / d^(kr)`.
    pub prediction: f64,
    pub residual: f64,
    /// `2(D·k·r(d−1) + 1)/d^(kr) · √p ln p`.
    pub main_bound: f64,
    /// Stand-in for the unspecified `O(d)` term: `D·r`.
    pub slack: f64,
    pub main_ok: bool,
    pub bound_ok: bool,
}

/// Single-polynomial census.
pub fn census_m(chi: &Character, spec: &CensusSpec) -> Result<CensusResult> {
    if spec.polys.len() != 1 {
        return Err(Error::invalid("poly", "census_m takes exactly one polynomial"));
    }
    joint_census(chi, spec)
}

/// Census over `k` polynomials at once.
pub fn joint_census(chi: &Character, spec: &CensusSpec) -> Result<CensusResult> {
    let p = chi.p();
    let k = spec.polys.len();
    let r = spec.offsets.len();
    if k == 0 {
        return Err(Error::invalid("poly", "need at least one polynomial"));
    }
    if r == 0 {
        return Err(Error::invalid("offsets", "need at least one offset"));
    }
    if spec.stride.is_multiple_of(p) {
        return Err(Error::invalid("stride", "L must be nonzero mod p"));
    }
    if spec.targets.len() != k || spec.targets.iter().any(|v| v.len() != r) {
        return Err(Error::invalid("v", format!("expected {k} target vectors of length {r}")));
    }
    let mut seen: Vec<u64> = spec.offsets.iter().map(|x| x % p).collect();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("offsets", "must be pairwise distinct"));
    }
    for poly in &spec.polys {
        if poly.modulus() != p {
            return Err(Error::FieldMismatch { left: p, right: poly.modulus() });
        }
        poly.require_nonconstant()?;
    }
    let total_deg: usize = spec.polys.iter().filter_map(Poly::degree).sum();
    if spec.mode == CensusMode::Theorem {
        if k > 1 {
            if let Independence::Dependent { witness } = multiplicatively_independent(&spec.polys)? {
                return Err(Error::Dependent { witness });
            }
        }
        for poly in &spec.polys {
            if !admissible(poly, chi.ell())? {
                return Err(Error::hypothesis("admissible", format!("{poly}")));
            }
        }
        let limit = (p as f64).ln() / (4.0 * total_deg as f64).ln();
        if r as f64 >= limit {
            return Err(Error::hypothesis(
                "r<log p/log(4d)",
                format!("r = {r}, limit = {limit:.4}"),
            ));
        }
    }

    let count = count_matches(chi, spec);
    let d = chi.order() as f64;
    let kr = (k * r) as i32;
    let prediction = spec.n as f64 / d.powi(kr);
    let residual = count as f64 - prediction;
    let sqrt_p = (p as f64).sqrt();
    let main_bound = 2.0 * (total_deg as f64 * k as f64 * r as f64 * (d - 1.0) + 1.0)
        / d.powi(kr)
        * sqrt_p
        * (p as f64).ln();
    let slack = (total_deg * r) as f64;
    Ok(CensusResult {
        count,
        prediction,
        residual,
        main_bound,
        slack,
        main_ok: residual.abs() <= main_bound,
        bound_ok: residual.abs() <= main_bound + slack,
    })
}

fn count_matches(chi: &Character, spec: &CensusSpec) -> u64 {
    let p = chi.p();
    let stride = spec.stride % p;
    let terms = spec.n + 1;
    (0..terms.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(terms);
            (lo..hi)
                .filter(|&i| {
                    let base = mul_mod(i % p, stride, p);
                    spec.polys.iter().zip(&spec.targets).all(|(poly, v)| {
                        spec.offsets.iter().zip(v).all(|(&x, &want)| {
                            chi.index(poly.eval(add_mod(base, x % p, p))) == Some(want)
                        })
                    })
                })
                .count() as u64
        })
        .sum()
}

/// Shifted-curve count `Σ_{x ∈ 𝓘, L | x} Π_{h ∈ 𝓗} δ(x + h)` and the
/// prediction `(|𝓘|/L)(|𝓙|/p)^{|𝓗|}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftedCensus {
    pub count: u64,
    pub prediction: f64,
    /// Base points `x ∈ 𝓘, L | x` with some `x + h` outside `𝓘`.
    pub boundary_misses: u64,
}

pub fn shifted_census(index: &RestrictedIndex, shifts: &[u64], stride: u64) -> Result<ShiftedCensus> {
    validate_shifts(index, shifts, stride)?;
    index.require_star()?;
    let rect = index.rect();
    let mut count = 0;
    let mut boundary_misses = 0;
    for x in base_points(index, stride) {
        if shifts.iter().all(|&h| delta_at(index, x, h)) {
            count += 1;
        }
        if shifts.iter().any(|&h| !rect.x.contains(x + h)) {
            boundary_misses += 1;
        }
    }
    let p = index.curve().p();
    let prediction = rect.x.len() as f64 / stride as f64
        * (rect.y.len() as f64 / p as f64).powi(shifts.len() as i32);
    Ok(ShiftedCensus {
        count,
        prediction,
        boundary_misses,
    })
}

/// `#{x ∈ 𝓘 : L | x, δ(x + x_j) = v_j for all j}`.
pub fn restricted_census(
    index: &RestrictedIndex,
    offsets: &[u64],
    stride: u64,
    v: &[bool],
) -> Result<u64> {
    validate_shifts(index, offsets, stride)?;
    if v.len() != offsets.len() {
        return Err(Error::invalid("v", "one target per offset"));
    }
    index.require_star()?;
    Ok(base_points(index, stride)
        .filter(|&x| offsets.iter().zip(v).all(|(&h, &want)| delta_at(index, x, h) == want))
        .count() as u64)
}

fn validate_shifts(index: &RestrictedIndex, shifts: &[u64], stride: u64) -> Result<()> {
    if stride == 0 {
        return Err(Error::invalid("stride", "L must be >= 1"));
    }
    if shifts.is_empty() {
        return Err(Error::invalid("offsets", "need at least one shift"));
    }
    let p = index.curve().p();
    if shifts.iter().any(|&h| h >= p) {
        return Err(Error::invalid("offsets", format!("shifts must lie in [0, {}]", p - 1)));
    }
    let mut sorted = shifts.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("offsets", "must be pairwise distinct"));
    }
    Ok(())
}

fn base_points(index: &RestrictedIndex, stride: u64) -> impl Iterator<Item = u64> + '_ {
    let x = index.rect().x;
    let first = x.lo.div_ceil(stride) * stride;
    (first..=x.hi).step_by(stride as usize)
}

/// `δ(x + h)` with `x + h` taken as an integer; points past `p − 1` lie
/// outside every `𝓘` and count as misses.
#[inline]
fn delta_at(index: &RestrictedIndex, x: u64, h: u64) -> bool {
    let y = x + h;
    y < index.curve().p() && index.delta(y)
}
