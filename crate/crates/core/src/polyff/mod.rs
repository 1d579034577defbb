//! Polynomials over `F_p` and the predicates the curve statistics depend on:
//! complete powers, admissibility, shifted products and multiplicative
//! independence of polynomial families.

mod factor;
mod poly;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use factor::{distinct_degree, factor, squarefree_decomposition, Factorization};
pub use poly::Poly;

use crate::error::{Error, Result};
use crate::ffield::factorize;

/// Seed used for factorizations that are not given an explicit one.
pub const DEFAULT_FACTOR_SEED: u64 = 0;

/// True iff `poly = R^e` for some `R ∈ F_p[x]`.
pub fn is_complete_power(poly: &Poly, e: u64) -> Result<bool> {
    poly.require_nonzero()?;
    if e < 2 {
        return Err(Error::invalid("e", format!("must be >= 2, got {e}")));
    }
    let fac = factor(poly, DEFAULT_FACTOR_SEED)?;
    Ok(is_power_given(&fac, e, poly.modulus()))
}

fn is_power_given(fac: &Factorization, e: u64, p: u64) -> bool {
    fac.multiplicities().all(|m| (m as u64).is_multiple_of(e)) && {
        let g = e.gcd(&(p - 1));
        poly::field_pow(fac.unit, (p - 1) / g, p) == 1
    }
}

/// True iff the nonconstant `poly` is not a complete `q`-th power for any `q`
/// coprime to `ell`.
///
/// Only primes `q` need testing, and a complete `q`-th power needs `q` to
/// divide every multiplicity, so the candidates are the prime divisors of
/// the gcd of the multiplicities.
pub fn admissible(poly: &Poly, ell: u64) -> Result<bool> {
    poly.require_nonconstant()?;
    let fac = factor(poly, DEFAULT_FACTOR_SEED)?;
    let g = fac.multiplicities().fold(0u64, |g, m| g.gcd(&(m as u64)));
    if g <= 1 {
        return Ok(true);
    }
    Ok(factorize(g)
        .into_iter()
        .map(|(q, _)| q)
        .filter(|q| q.gcd(&ell) == 1)
        .all(|q| !is_power_given(&fac, q, poly.modulus())))
}

/// `Q(x) = Π_j P(a·x + b_j)^{e_j}`.
pub fn shift_combination(poly: &Poly, a: u64, shifts: &[u64], exponents: &[u64]) -> Result<Poly> {
    let p = poly.modulus();
    if a.is_multiple_of(p) {
        return Err(Error::invalid("a", "must be nonzero in F_p"));
    }
    if shifts.len() != exponents.len() {
        return Err(Error::invalid(
            "e",
            format!("{} exponents for {} shifts", exponents.len(), shifts.len()),
        ));
    }
    if exponents.iter().all(|&e| e == 0) {
        return Err(Error::invalid("e", "exponent vector must be nonzero"));
    }
    let mut seen: Vec<u64> = shifts.iter().map(|b| b % p).collect();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("b", "shifts must be pairwise distinct"));
    }
    Ok(shifts
        .iter()
        .zip(exponents)
        .filter(|(_, &e)| e > 0)
        .fold(Poly::one(p), |acc, (&b, &e)| {
            &acc * &poly.compose_linear(a, b).pow(e)
        }))
}

/// Outcome of the multiplicative independence test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Independence {
    Independent,
    /// `Π P_i^{witness_i}` is a nonzero constant; raising it to the power
    /// `p - 1` makes it identically one.
    Dependent { witness: Vec<i64> },
}

impl Independence {
    pub fn is_independent(&self) -> bool {
        matches!(self, Independence::Independent)
    }
}

/// Exponent vectors of the polynomials over the union of their monic
/// irreducible factors (rows follow the input order).
pub fn exponent_matrix(polys: &[Poly]) -> Result<(Vec<Poly>, Vec<Vec<u32>>)> {
    let mut columns: BTreeMap<Poly, usize> = BTreeMap::new();
    let mut facs = Vec::with_capacity(polys.len());
    for poly in polys {
        let fac = factor(poly, DEFAULT_FACTOR_SEED)?;
        for (f, _) in &fac.factors {
            let next = columns.len();
            columns.entry(f.clone()).or_insert(next);
        }
        facs.push(fac);
    }
    let mut basis = vec![Poly::zero(polys.first().map_or(2, Poly::modulus)); columns.len()];
    for (f, &j) in &columns {
        basis[j] = f.clone();
    }
    let rows = facs
        .iter()
        .map(|fac| {
            let mut row = vec![0u32; columns.len()];
            for (f, e) in &fac.factors {
                row[columns[f]] = *e;
            }
            row
        })
        .collect();
    Ok((basis, rows))
}

/// Decides multiplicative independence by the rank of the exponent matrix
/// over `Q`. A rational kernel vector scaled to a primitive integer vector
/// (first nonzero entry positive) is returned as the witness.
pub fn multiplicatively_independent(polys: &[Poly]) -> Result<Independence> {
    if polys.is_empty() {
        return Err(Error::invalid("polys", "need at least one polynomial"));
    }
    let p = polys[0].modulus();
    for poly in polys {
        if poly.modulus() != p {
            return Err(Error::FieldMismatch { left: p, right: poly.modulus() });
        }
        poly.require_nonconstant()?;
    }
    let (_, rows) = exponent_matrix(polys)?;
    Ok(match integer_kernel_vector(&rows) {
        None => Independence::Independent,
        Some(witness) => Independence::Dependent { witness },
    })
}

/// Finds a nonzero integer `e` with `Σ_i e_i · rows[i] = 0`, if one exists.
fn integer_kernel_vector(rows: &[Vec<u32>]) -> Option<Vec<i64>> {
    let k = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    // Work on the transpose: unknowns are the k exponents.
    let mut m: Vec<Vec<BigRational>> = (0..cols)
        .map(|c| {
            (0..k)
                .map(|i| BigRational::from_integer(BigInt::from(rows[i][c])))
                .collect()
        })
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(pr) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free = (0..k).find(|c| !pivots.contains(c))?;
    let mut sol = vec![BigRational::zero(); k];
    sol[free] = BigRational::one();
    for (row, &pc) in pivots.iter().enumerate() {
        sol[pc] = -m[row][free].clone();
    }
    let lcm = sol.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = sol.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let sign = if ints.iter().find(|x| !x.is_zero())?.is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    Some(
        ints.iter()
            .map(|x| (x / &g * &sign).to_i64().expect("witness entry fits in i64"))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64], p: u64) -> Poly {
        Poly::from_signed(c, p)
    }

    #[test]
    fn complete_power_examples() {
        assert!(is_complete_power(&poly(&[1, 2, 1], 7), 2).unwrap());
        assert!(!is_complete_power(&poly(&[0, -1, 0, 1], 7), 2).unwrap());
        // 4x^2 = (2x)^2
        let f = poly(&[0, 0, 4], 7);
        assert!(is_complete_power(&f, 2).unwrap());
        assert_eq!(poly(&[0, 2], 7).pow(2), f);
        // 3x^2: 3 is a non-residue mod 7
        assert!(!is_complete_power(&poly(&[0, 0, 3], 7), 2).unwrap());
        // gcd(5, 6) = 1, so every unit of F_7 is a 5th power
        assert!(is_complete_power(&poly(&[0, 0, 0, 0, 0, 3], 7), 5).unwrap());
        assert!(is_complete_power(&Poly::zero(7), 2).is_err());
    }

    #[test]
    fn admissible_examples() {
        for n in 1..10 {
            assert!(admissible(&poly(&[0, -(n * n), 0, 1], 101), 2).unwrap());
        }
        assert!(!admissible(&poly(&[0, 0, 1], 101), 3).unwrap());
        assert!(admissible(&poly(&[0, 0, 1], 101), 2).unwrap());
        assert!(admissible(&Poly::constant(3, 7), 2).is_err());
        // 3·(x+1)^2 over F_7 is not a square, so admissible for l = 3.
        assert!(admissible(&poly(&[1, 2, 1], 7).scale(3), 3).unwrap());
        assert!(!admissible(&poly(&[1, 2, 1], 7), 3).unwrap());
    }

    #[test]
    fn shift_combination_examples() {
        let x = Poly::x(7);
        assert_eq!(shift_combination(&x, 1, &[0, 1], &[1, 1]).unwrap(), poly(&[0, 1, 1], 7));
        assert_eq!(shift_combination(&x, 2, &[0], &[1]).unwrap(), poly(&[0, 2], 7));
        let f = poly(&[1, 0, 1], 5);
        assert_eq!(shift_combination(&f, 1, &[0], &[2]).unwrap(), &f * &f);
        assert!(shift_combination(&x, 0, &[0], &[1]).is_err());
        assert!(shift_combination(&x, 1, &[2, 9], &[1, 1]).is_err());
        assert!(shift_combination(&x, 1, &[0, 1], &[0, 0]).is_err());
    }

    #[test]
    fn independence_examples() {
        let p = 13;
        let x = Poly::x(p);
        let x2 = poly(&[0, 0, 1], p);
        let x1 = poly(&[1, 1], p);
        assert_eq!(
            multiplicatively_independent(&[x.clone(), x2]).unwrap(),
            Independence::Dependent { witness: vec![2, -1] }
        );
        assert_eq!(
            multiplicatively_independent(&[x.clone(), x1.clone()]).unwrap(),
            Independence::Independent
        );
        let xx1 = &x * &x1;
        assert_eq!(
            multiplicatively_independent(&[xx1, x.clone(), x1]).unwrap(),
            Independence::Dependent { witness: vec![1, -1, -1] }
        );
        assert!(multiplicatively_independent(&[x, Poly::constant(2, p)]).is_err());
    }

    #[test]
    fn witness_annihilates_exponents() {
        let p = 31;
        let a = poly(&[1, 1], p);
        let b = poly(&[2, 0, 1], p);
        let polys = vec![&a.pow(3) * &b, a.pow(2).scale(5), &b.pow(2) * &a];
        let Independence::Dependent { witness } = multiplicatively_independent(&polys).unwrap()
        else {
            panic!("family is dependent");
        };
        let (_, rows) = exponent_matrix(&polys).unwrap();
        for c in 0..rows[0].len() {
            let s: i64 = rows.iter().zip(&witness).map(|(r, w)| r[c] as i64 * w).sum();
            assert_eq!(s, 0);
        }
    }
}
