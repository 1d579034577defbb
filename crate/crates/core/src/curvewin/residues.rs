use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{legendre, Character, FieldSpec};

/// Gauss lemma data for one `a`: `r` counts the `x ∈ [1, (p-1)/2]` whose
/// residue `a·x mod p` exceeds `p/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussLemma {
    pub a: u64,
    pub r: u64,
    pub legendre: i8,
    pub ok: bool,
}

pub fn gauss_lemma_check(field: &FieldSpec, a: u64) -> Result<GaussLemma> {
    let p = field.p();
    let a = a % p;
    if a == 0 {
        return Err(Error::invalid("a", format!("must be coprime to p = {p}")));
    }
    let half = (p - 1) / 2;
    let r = (1..=half)
        .filter(|&x| (u128::from(a) * u128::from(x) % u128::from(p)) as u64 > half)
        .count() as u64;
    let symbol = legendre(a, p);
    let sign = if r.is_multiple_of(2) { 1 } else { -1 };
    Ok(GaussLemma {
        a,
        r,
        legendre: symbol,
        ok: sign == symbol,
    })
}

/// Number of `x0 ∈ [0, p − 1 − window]` such that no `x ∈ [x0, x0 + window)`
/// has `χ_l(x) = ζ^mu`, for each window length in `windows`.
///
/// One backward pass records, for every position, the distance to the next
/// `x` with the requested value; all window lengths are answered from it.
pub fn cor4_exceptional(
    field: &FieldSpec,
    ell: u64,
    mu: u32,
    windows: &[u64],
) -> Result<Vec<u64>> {
    let p = field.p();
    if ell < 2 || !(p - 1).is_multiple_of(ell) {
        return Err(Error::hypothesis(
            "p≡1 (mod ℓ)",
            format!("p = {p}, ℓ = {ell}"),
        ));
    }
    let chi = Character::new(field, ell)?;
    if u64::from(mu) >= chi.order() {
        return Err(Error::invalid("mu", format!("unity index must be below {}", chi.order())));
    }
    let mut dist = vec![0u64; p as usize];
    let mut next: Option<u64> = None;
    for x in (0..p).rev() {
        if chi.index(x) == Some(mu) {
            next = Some(x);
        }
        dist[x as usize] = next.map_or(u64::MAX, |n| n - x);
    }
    Ok(windows
        .iter()
        .map(|&w| {
            if w >= p {
                return 0;
            }
            dist[..(p - w) as usize].iter().filter(|&&d| d >= w).count() as u64
        })
        .collect())
}
