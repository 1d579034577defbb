use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::ffield::{add_mod, inv_mod, mul_mod, pow_mod, sub_mod};

/// Dense univariate polynomial over `F_p`, constant term first.
///
/// The coefficient vector never has trailing zeros, so the zero polynomial
/// is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    coeffs: Vec<u64>,
    p: u64,
}

impl Poly {
    pub fn new(coeffs: Vec<u64>, p: u64) -> Self {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % p).collect();
        trim(&mut coeffs);
        Self { coeffs, p }
    }

    /// Builds from signed coefficients, reducing each into `[0, p)`.
    pub fn from_signed(coeffs: &[i64], p: u64) -> Self {
        let v = coeffs
            .iter()
            .map(|&c| c.rem_euclid(p as i64) as u64)
            .collect();
        Self::new(v, p)
    }

    pub fn zero(p: u64) -> Self {
        Self { coeffs: Vec::new(), p }
    }

    pub fn one(p: u64) -> Self {
        Self::constant(1, p)
    }

    pub fn constant(c: u64, p: u64) -> Self {
        Self::new(vec![c], p)
    }

    /// The identity polynomial `x`.
    pub fn x(p: u64) -> Self {
        Self::new(vec![0, 1], p)
    }

    /// `x - root`
    pub fn linear_root(root: u64, p: u64) -> Self {
        Self::new(vec![sub_mod(0, root % p, p), 1], p)
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: u64) -> u64 {
        let x = x % self.p;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| add_mod(mul_mod(acc, x, self.p), c, self.p))
    }

    pub fn scale(&self, c: u64) -> Self {
        let c = c % self.p;
        Self::new(self.coeffs.iter().map(|&a| mul_mod(a, c, self.p)).collect(), self.p)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(self.leading(), self.p))
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
            .collect();
        Self::new(v, p)
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        self.check_same(divisor);
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let p = self.p;
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Poly::zero(p), self.clone());
        }
        let inv_lead = inv_mod(divisor.leading(), p);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = mul_mod(rem[i + dd], inv_lead, p);
            quot[i] = c;
            if c != 0 {
                for (j, &b) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] = sub_mod(rem[i + j], mul_mod(c, b, p), p);
                }
            }
        }
        rem.truncate(dd);
        (Poly::new(quot, p), Poly::new(rem, p))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    /// Exact division; panics if the remainder is nonzero.
    pub fn exact_div(&self, divisor: &Poly) -> Poly {
        let (q, r) = self.div_rem(divisor);
        assert!(r.is_zero(), "exact_div: nonzero remainder");
        q
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        self.check_same(other);
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut acc = Poly::one(self.p);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self^e mod modulus`.
    pub fn pow_mod(&self, mut e: u64, modulus: &Poly) -> Poly {
        let mut acc = Poly::one(self.p).rem(modulus);
        let mut base = self.rem(modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = (&acc * &base).rem(modulus);
            }
            e >>= 1;
            if e > 0 {
                base = (&base * &base).rem(modulus);
            }
        }
        acc
    }

    /// `P(a·x + b)`.
    pub fn compose_linear(&self, a: u64, b: u64) -> Poly {
        let inner = Poly::new(vec![b, a], self.p);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(self.p), |acc, &c| &(&acc * &inner) + &Poly::constant(c, self.p))
    }

    /// For `self = g(x^p)`, returns `g`; in `F_p` coefficients are their own
    /// p-th roots.
    pub(crate) fn pth_root(&self) -> Poly {
        let p = self.p as usize;
        debug_assert!(self.coeffs.iter().enumerate().all(|(i, &c)| c == 0 || i % p == 0));
        Poly::new(self.coeffs.iter().step_by(p).copied().collect(), self.p)
    }

    fn check_same(&self, other: &Poly) {
        assert_eq!(self.p, other.p, "polynomials over different fields");
    }

    pub(crate) fn require_nonzero(&self) -> Result<()> {
        if self.is_zero() {
            Err(Error::ZeroPolynomial)
        } else {
            Ok(())
        }
    }

    pub(crate) fn require_nonconstant(&self) -> Result<()> {
        self.require_nonzero()?;
        if self.is_constant() {
            Err(Error::ConstantPolynomial)
        } else {
            Ok(())
        }
    }
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

impl Add for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        self.check_same(rhs);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let v = (0..n)
            .map(|i| add_mod(self.coeff(i), rhs.coeff(i), self.p))
            .collect();
        Poly::new(v, self.p)
    }
}

impl Sub for &Poly {
    type Output = Poly;

    fn sub(self, rhs: &Poly) -> Poly {
        self.check_same(rhs);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let v = (0..n)
            .map(|i| sub_mod(self.coeff(i), rhs.coeff(i), self.p))
            .collect();
        Poly::new(v, self.p)
    }
}

impl Neg for &Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        &Poly::zero(self.p) - self
    }
}

impl Mul for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        self.check_same(rhs);
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.p);
        }
        let p = self.p;
        let mut out = vec![0u64; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = add_mod(out[i + j], mul_mod(a, b, p), p);
            }
        }
        Poly::new(out, p)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, c) => write!(f, "{c}x")?,
                (i, 1) => write!(f, "x^{i}")?,
                (i, c) => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self} mod {})", self.p)
    }
}

/// Raises an element to a power inside `F_p`; re-exported for callers that
/// work with leading coefficients.
pub(crate) fn field_pow(a: u64, e: u64, p: u64) -> u64 {
    pow_mod(a, e, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        assert_eq!(Poly::new(vec![1, 0, 1], 5).eval(2), 0);
        assert_eq!(Poly::constant(3, 7).eval(6), 3);
        let x = Poly::x(101);
        for a in 0..101 {
            assert_eq!(x.eval(a), a);
        }
    }

    #[test]
    fn normalization_trims() {
        let p = Poly::new(vec![1, 2, 7, 14], 7);
        assert_eq!(p.degree(), Some(1));
        assert!(Poly::new(vec![0, 0], 5).is_zero());
        assert_eq!(Poly::from_signed(&[-1, 0, 1], 7).coeffs(), &[6, 0, 1]);
    }

    #[test]
    fn div_rem_reconstructs() {
        let p = 13;
        let a = Poly::new(vec![3, 1, 4, 1, 5, 9, 2, 6], p);
        let b = Poly::new(vec![5, 3, 5], p);
        let (q, r) = a.div_rem(&b);
        assert!(r.degree().unwrap_or(0) < 2);
        assert_eq!(&(&q * &b) + &r, a);
    }

    #[test]
    fn gcd_of_products() {
        let p = 11;
        let f = &Poly::linear_root(2, p) * &Poly::linear_root(5, p);
        let g = &Poly::linear_root(5, p) * &Poly::linear_root(7, p);
        assert_eq!(f.gcd(&g), Poly::linear_root(5, p));
        assert!(f.gcd(&Poly::linear_root(3, p)).is_one());
    }

    #[test]
    fn compose_linear_matches_pointwise() {
        let p = 17;
        let f = Poly::new(vec![2, 0, 3, 1], p);
        let g = f.compose_linear(5, 9);
        for x in 0..p {
            assert_eq!(g.eval(x), f.eval((5 * x + 9) % p));
        }
    }

    #[test]
    fn pow_mod_matches_repeated_product() {
        let p = 7;
        let m = Poly::new(vec![1, 1, 0, 1], p);
        let a = Poly::new(vec![3, 2], p);
        let mut slow = Poly::one(p);
        for _ in 0..23 {
            slow = (&slow * &a).rem(&m);
        }
        assert_eq!(a.pow_mod(23, &m), slow);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(Poly::new(vec![1, 0, 1], 5).to_string(), "x^2 + 1");
        assert_eq!(Poly::new(vec![0, 2], 5).to_string(), "2x");
        assert_eq!(Poly::zero(5).to_string(), "0");
    }
}
