//! Prime-field arithmetic, primitive roots and multiplicative characters.
//!
//! Field elements are plain `u64` values in `[0, p)`. Products are widened to
//! `u128` before reduction, so every routine is exact for all 64-bit primes.

use std::collections::HashMap;
use std::sync::Arc;

use num_integer::Integer;

use crate::error::{Error, Result};

/// Largest modulus for which [`Character::with_index_table`] will build a
/// full discrete-log class table.
pub const INDEX_TABLE_LIMIT: u64 = 1 << 24;

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

/// `base^exp mod p` by square-and-multiply.
pub fn pow_mod(base: u64, mut exp: u64, p: u64) -> u64 {
    debug_assert!(p >= 2);
    if p == 1 {
        return 0;
    }
    let mut acc = 1u64 % p;
    let mut b = base % p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero element modulo a prime `p` (Fermat).
#[inline]
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller–Rabin; the witness set covers every `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &MR_WITNESSES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let s = d.trailing_zeros();
    d >>= s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: u64, c: u64) -> Option<u64> {
    let f = |x: u64| add_mod(mul_mod(x, x, n), c, n);
    let (mut x, mut y, mut g, mut r, mut q) = (2u64, 2u64, 1u64, 1u64, 1u64);
    let mut ys = y;
    const BATCH: u64 = 128;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += BATCH;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    for c in 1.. {
        if let Some(d) = pollard_brent(n, c) {
            split_into(d, out);
            split_into(n / d, out);
            return;
        }
    }
}

/// Prime factorization as sorted `(prime, exponent)` pairs; `factorize(1)` is empty.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factorize(0) is undefined");
    let mut primes = Vec::new();
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n.is_multiple_of(q) {
            primes.push(q);
            n /= q;
        }
    }
    split_into(n, &mut primes);
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    out
}

fn has_full_order(g: u64, p: u64, factors: &[(u64, u32)]) -> bool {
    factors.iter().all(|&(q, _)| pow_mod(g, (p - 1) / q, p) != 1)
}

/// Smallest generator of `F_p^*` for an odd prime `p`.
pub fn primitive_root(p: u64) -> Result<u64> {
    if p < 3 || p.is_multiple_of(2) || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let factors = factorize(p - 1);
    Ok(smallest_generator(p, &factors))
}

fn smallest_generator(p: u64, factors: &[(u64, u32)]) -> u64 {
    (2..p)
        .find(|&g| has_full_order(g, p, factors))
        .expect("a prime field always has a generator")
}

/// Legendre symbol via Euler's criterion.
pub fn legendre(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// A validated odd prime together with a primitive root and the
/// factorization of `p - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    p: u64,
    generator: u64,
    order_factors: Vec<(u64, u32)>,
}

impl FieldSpec {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p.is_multiple_of(2) || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        let order_factors = factorize(p - 1);
        let generator = smallest_generator(p, &order_factors);
        Ok(Self {
            p,
            generator,
            order_factors,
        })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn generator(&self) -> u64 {
        self.generator
    }

    pub fn order_factors(&self) -> &[(u64, u32)] {
        &self.order_factors
    }

    /// Multiplicative order of a nonzero element.
    pub fn order_of(&self, x: u64) -> u64 {
        assert!(!x.is_multiple_of(self.p), "zero has no multiplicative order");
        let mut order = self.p - 1;
        for &(q, e) in &self.order_factors {
            for _ in 0..e {
                if pow_mod(x, order / q, self.p) == 1 {
                    order /= q;
                } else {
                    break;
                }
            }
        }
        order
    }
}

/// Value of a multiplicative character: either the argument was zero, or
/// `ζ_d^j` encoded by its index `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CharValue {
    Zero,
    Unity(u32),
}

impl CharValue {
    pub fn index(self) -> Option<u32> {
        match self {
            CharValue::Zero => None,
            CharValue::Unity(j) => Some(j),
        }
    }
}

const NO_INDEX: u32 = u32::MAX;

/// Multiplicative character of effective order `d = gcd(l, p - 1)`.
///
/// `χ(g^k) = ζ_d^(k mod d)` for the field's smallest primitive root `g`.
#[derive(Debug, Clone)]
pub struct Character {
    field: FieldSpec,
    ell: u64,
    d: u64,
    exponent: u64,
    match_table: Vec<u64>,
    lookup: Option<HashMap<u64, u32>>,
    index_table: Option<Arc<[u32]>>,
}

impl Character {
    pub fn new(field: &FieldSpec, ell: u64) -> Result<Self> {
        if ell < 2 {
            return Err(Error::invalid("ell", format!("must be >= 2, got {ell}")));
        }
        let p = field.p();
        let d = ell.gcd(&(p - 1));
        let exponent = (p - 1) / d;
        let zeta = pow_mod(field.generator(), exponent, p);
        let mut match_table = Vec::with_capacity(d as usize);
        let mut cur = 1u64;
        for _ in 0..d {
            match_table.push(cur);
            cur = mul_mod(cur, zeta, p);
        }
        let lookup = (d > 8).then(|| {
            match_table
                .iter()
                .enumerate()
                .map(|(j, &v)| (v, j as u32))
                .collect()
        });
        Ok(Self {
            field: field.clone(),
            ell,
            d,
            exponent,
            match_table,
            lookup,
            index_table: None,
        })
    }

    /// Precomputes the unity index of every field element. Only available
    /// for `p <= 2^24`.
    pub fn with_index_table(mut self) -> Result<Self> {
        let p = self.field.p();
        if p > INDEX_TABLE_LIMIT {
            return Err(Error::invalid(
                "p",
                format!("index table needs p <= {INDEX_TABLE_LIMIT}, got {p}"),
            ));
        }
        let mut table = vec![NO_INDEX; p as usize];
        let g = self.field.generator();
        let mut cur = 1u64;
        for k in 0..p - 1 {
            table[cur as usize] = (k % self.d) as u32;
            cur = mul_mod(cur, g, p);
        }
        self.index_table = Some(table.into());
        Ok(self)
    }

    pub fn has_index_table(&self) -> bool {
        self.index_table.is_some()
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.field.p()
    }

    /// Requested order `l`.
    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// Effective order `d = gcd(l, p - 1)`.
    #[inline]
    pub fn order(&self) -> u64 {
        self.d
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn match_table(&self) -> &[u64] {
        &self.match_table
    }

    /// Unity index of `x`, or `None` for `x ≡ 0`.
    #[inline]
    pub fn index(&self, x: u64) -> Option<u32> {
        let p = self.field.p();
        let x = x % p;
        if x == 0 {
            return None;
        }
        if let Some(table) = &self.index_table {
            return Some(table[x as usize]);
        }
        let t = pow_mod(x, self.exponent, p);
        let j = match &self.lookup {
            Some(map) => map.get(&t).copied(),
            None => self.match_table.iter().position(|&v| v == t).map(|j| j as u32),
        };
        Some(j.unwrap_or_else(|| {
            panic!("x^((p-1)/d) = {t} is not a d-th root of unity mod {p}")
        }))
    }

    #[inline]
    pub fn value(&self, x: u64) -> CharValue {
        match self.index(x) {
            None => CharValue::Zero,
            Some(j) => CharValue::Unity(j),
        }
    }

    /// True when `x` is a nonzero `d`-th power residue.
    #[inline]
    pub fn is_residue(&self, x: u64) -> bool {
        self.index(x) == Some(0)
    }
}

impl PartialEq for Character {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.ell == other.ell
    }
}

impl Eq for Character {}

#[cfg(test)]
mod tests {
    use super::*;

    fn order_brute(g: u64, p: u64) -> u64 {
        let mut cur = g % p;
        let mut k = 1;
        while cur != 1 {
            cur = cur * g % p;
            k += 1;
        }
        k
    }

    #[test]
    fn pow_mod_examples() {
        assert_eq!(pow_mod(2, 10, 1_000_003), 1024);
        assert_eq!(pow_mod(5, 0, 7), 1);
        // repeated-multiplication oracle
        let mut acc = 1u64;
        for _ in 0..100 {
            acc = acc * 3 % 101;
        }
        assert_eq!(acc, 1);
        assert_eq!(pow_mod(3, 100, 101), acc);
    }

    #[test]
    fn pow_mod_near_u64_max() {
        let p = 18_446_744_073_709_551_557; // largest 64-bit prime
        assert!(is_prime(p));
        assert_eq!(pow_mod(p - 1, 2, p), 1);
        assert_eq!(pow_mod(123_456_789, p - 1, p), 1);
    }

    #[test]
    fn primality_matches_sieve() {
        let limit = 5000usize;
        let mut sieve = vec![true; limit];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..limit {
            if sieve[i] {
                for j in (i * i..limit).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for (n, &prime) in sieve.iter().enumerate() {
            assert_eq!(is_prime(n as u64), prime, "n = {n}");
        }
        // strong pseudoprimes to several small bases
        assert!(!is_prime(3_215_031_751));
        assert!(!is_prime(3_825_123_056_546_413_051));
    }

    #[test]
    fn factorize_reconstructs() {
        for n in [1u64, 2, 12, 97, 1_000_002, 600_851_475_143, 18_446_744_073_709_551_556] {
            let f = factorize(n);
            let prod: u128 = f.iter().map(|&(q, e)| (q as u128).pow(e)).product();
            assert_eq!(prod, n as u128);
            assert!(f.iter().all(|&(q, _)| is_prime(q)));
        }
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(primitive_root(7).unwrap(), 3);
        assert_eq!(primitive_root(11).unwrap(), 2);
        assert_eq!(primitive_root(3).unwrap(), 2);
        assert!(primitive_root(9).is_err());
        assert!(primitive_root(2).is_err());
        // brute-force order oracle
        for p in [7u64, 11, 13, 23, 41, 101, 257] {
            let g = primitive_root(p).unwrap();
            assert_eq!(order_brute(g, p), p - 1);
            assert!((2..g).all(|h| order_brute(h, p) < p - 1));
        }
    }

    #[test]
    fn char_value_examples() {
        let f7 = FieldSpec::new(7).unwrap();
        let chi2 = Character::new(&f7, 2).unwrap();
        assert_eq!(chi2.value(2), CharValue::Unity(0));
        assert_eq!(chi2.value(3), CharValue::Unity(1));
        let chi3 = Character::new(&f7, 3).unwrap();
        assert_eq!(chi3.value(0), CharValue::Zero);
        assert_eq!(chi3.order(), 3);
        assert_eq!(chi3.match_table()[0], 1);
    }

    #[test]
    fn effective_order_is_gcd() {
        let f = FieldSpec::new(11).unwrap();
        assert_eq!(Character::new(&f, 3).unwrap().order(), 1);
        assert_eq!(Character::new(&f, 4).unwrap().order(), 2);
        assert_eq!(Character::new(&f, 5).unwrap().order(), 5);
        assert!(Character::new(&f, 1).is_err());
    }

    #[test]
    fn multiplicativity_and_orthogonality_exhaustive() {
        for p in (3..200u64).filter(|&p| is_prime(p)) {
            let field = FieldSpec::new(p).unwrap();
            for ell in [2u64, 3, 4, 5, 6] {
                let chi = Character::new(&field, ell).unwrap();
                let d = chi.order();
                let idx: Vec<u32> = (1..p).map(|x| chi.index(x).unwrap()).collect();
                for x in 1..p {
                    for y in 1..p {
                        let lhs = chi.index(mul_mod(x, y, p)).unwrap() as u64;
                        let rhs = (idx[x as usize - 1] as u64 + idx[y as usize - 1] as u64) % d;
                        assert_eq!(lhs, rhs);
                    }
                    // l-th powers are residues
                    assert_eq!(chi.index(pow_mod(x, ell, p)), Some(0));
                }
                // every index class is hit equally often, so the sum of ζ_d^j vanishes
                let mut counts = vec![0u64; d as usize];
                for &j in &idx {
                    counts[j as usize] += 1;
                }
                assert!(counts.iter().all(|&c| c == (p - 1) / d));
            }
        }
    }

    #[test]
    fn index_table_agrees_with_pow_mod() {
        let field = FieldSpec::new(10_007).unwrap();
        for ell in [2u64, 3, 6, 23] {
            let slow = Character::new(&field, ell).unwrap();
            let fast = slow.clone().with_index_table().unwrap();
            assert!(fast.has_index_table());
            for x in 0..field.p() {
                assert_eq!(slow.value(x), fast.value(x));
            }
        }
    }

    #[test]
    fn legendre_agrees_with_quadratic_character() {
        for p in (3..500u64).filter(|&p| is_prime(p)) {
            let chi = Character::new(&FieldSpec::new(p).unwrap(), 2).unwrap();
            for a in 0..p {
                let expected = match chi.value(a) {
                    CharValue::Zero => 0,
                    CharValue::Unity(0) => 1,
                    CharValue::Unity(_) => -1,
                };
                assert_eq!(legendre(a, p), expected);
            }
        }
        assert_eq!(legendre(4, 7), 1);
        assert_eq!(legendre(3, 7), -1);
        assert_eq!(legendre(7, 7), 0);
    }
}
