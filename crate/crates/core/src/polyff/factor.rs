//! Factorization over `F_p`: squarefree decomposition, distinct-degree
//! factorization and Cantor–Zassenhaus equal-degree splitting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::Poly;
use crate::error::Result;

/// `unit · Π factor^multiplicity`, factors monic irreducible and sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub unit: u64,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn reconstruct(&self, p: u64) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(self.unit, p), |acc, (f, e)| &acc * &f.pow(*e as u64))
    }

    pub fn multiplicities(&self) -> impl Iterator<Item = u32> + '_ {
        self.factors.iter().map(|(_, e)| *e)
    }

    /// Distinct roots in `F_p` (the linear factors).
    pub fn roots(&self) -> Vec<u64> {
        self.factors
            .iter()
            .filter(|(f, _)| f.degree() == Some(1))
            .map(|(f, _)| (f.modulus() - f.coeff(0)) % f.modulus())
            .collect()
    }
}

/// Factors a nonzero polynomial. `seed` drives the equal-degree splitting, so
/// the result (including factor order) is a pure function of the input.
pub fn factor(poly: &Poly, seed: u64) -> Result<Factorization> {
    poly.require_nonzero()?;
    let p = poly.modulus();
    let unit = poly.leading();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors = Vec::new();
    for (part, mult) in squarefree_decomposition(&poly.monic()) {
        for (block, deg) in distinct_degree(&part) {
            let mut pieces = Vec::new();
            equal_degree(&block, deg, &mut rng, &mut pieces);
            factors.extend(pieces.into_iter().map(|f| (f, mult)));
        }
    }
    factors.sort_by(|(a, _), (b, _)| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| a.coeffs().iter().rev().cmp(b.coeffs().iter().rev()))
    });
    debug_assert_eq!(
        Factorization { unit, factors: factors.clone() }.reconstruct(p),
        *poly
    );
    Ok(Factorization { unit, factors })
}

/// Squarefree parts of a monic polynomial with their multiplicities.
pub fn squarefree_decomposition(f: &Poly) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    squarefree_into(f, 1, &mut out);
    out
}

fn squarefree_into(f: &Poly, scale: u32, out: &mut Vec<(Poly, u32)>) {
    if f.is_constant() {
        return;
    }
    let p = f.modulus();
    let mut c = f.gcd(&f.derivative());
    let mut w = f.exact_div(&c);
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.exact_div(&y);
        if !z.is_one() {
            out.push((z, i * scale));
        }
        i += 1;
        w = y;
        c = c.exact_div(&w);
    }
    if !c.is_one() {
        squarefree_into(&c.pth_root(), scale * p as u32, out);
    }
}

/// Splits a squarefree monic polynomial into products of irreducibles of equal degree.
pub fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let p = f.modulus();
    let x = Poly::x(p);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = x.rem(&rest);
    let mut i = 1usize;
    while rest.degree().unwrap_or(0) >= 2 * i {
        h = h.pow_mod(p, &rest);
        let g = rest.gcd(&(&h - &x));
        if !g.is_one() {
            rest = rest.exact_div(&g);
            h = h.rem(&rest);
            out.push((g, i));
        }
        i += 1;
    }
    if !rest.is_constant() {
        let d = rest.degree().unwrap();
        out.push((rest, d));
    }
    out
}

fn equal_degree(f: &Poly, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Poly>) {
    let n = f.degree().unwrap_or(0);
    if n == 0 {
        return;
    }
    if n == d {
        out.push(f.clone());
        return;
    }
    let p = f.modulus();
    loop {
        let a = Poly::new((0..n).map(|_| rng.random_range(0..p)).collect(), p);
        if a.is_constant() {
            continue;
        }
        let g = a.gcd(f);
        let candidate = if !g.is_one() {
            g
        } else {
            // a^((p^d - 1)/2) = (a · a^p · … · a^(p^(d-1)))^((p-1)/2)
            let mut frob = a.clone();
            let mut norm = a.clone();
            for _ in 1..d {
                frob = frob.pow_mod(p, f);
                norm = (&norm * &frob).rem(f);
            }
            let b = norm.pow_mod((p - 1) / 2, f);
            f.gcd(&(&b - &Poly::one(p)))
        };
        let cd = candidate.degree().unwrap_or(0);
        if cd > 0 && cd < n {
            let other = f.exact_div(&candidate);
            equal_degree(&candidate, d, rng, out);
            equal_degree(&other, d, rng, out);
            return;
        }
    }
}
