use std::collections::HashMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{residue_histogram, sliding_sums, Curve, Histogram, Interval, Rect, ScanSpec};
use crate::error::{Error, Result};
use crate::ffield::{pow_mod, FieldSpec};
use crate::polyff::Poly;

/// Multiset `{y^l : y ∈ 𝓙}` for membership tests `δ_{C,Ω}(x)`.
#[derive(Debug, Clone)]
pub struct RestrictedIndex {
    curve: Curve,
    rect: Rect,
    roots: HashMap<u64, u32>,
}

impl RestrictedIndex {
    pub fn new(curve: &Curve, rect: Rect) -> Result<Self> {
        let p = curve.p();
        let rect = Rect::new(rect.x, rect.y, p)?;
        let ell = curve.ell();
        let mut roots = HashMap::with_capacity(rect.y.len() as usize);
        for y in rect.y.iter() {
            *roots.entry(pow_mod(y, ell, p)).or_insert(0) += 1;
        }
        Ok(Self {
            curve: curve.clone(),
            rect,
            roots,
        })
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn rect(&self) -> &Rect {
        &self.rect
    }

    /// `#{y ∈ 𝓙 : y^l = P(x)}`, ignoring `𝓘`.
    #[inline]
    pub fn roots_in_j(&self, x: u64) -> u32 {
        self.roots
            .get(&self.curve.poly().eval(x))
            .copied()
            .unwrap_or(0)
    }

    /// `δ_{C,Ω}(x)`.
    #[inline]
    pub fn delta(&self, x: u64) -> bool {
        self.rect.x.contains(x) && self.roots_in_j(x) > 0
    }

    /// First `x ∈ 𝓘` with two or more roots in `𝓙`.
    pub fn star_violation(&self) -> Option<(u64, u32)> {
        self.rect
            .x
            .iter()
            .map(|x| (x, self.roots_in_j(x)))
            .find(|&(_, n)| n > 1)
    }

    pub fn require_star(&self) -> Result<()> {
        match self.star_violation() {
            None => Ok(()),
            Some((x, roots)) => Err(Error::ConditionStar { x, roots }),
        }
    }
}

/// Condition (∗): every `x ∈ 𝓘` has at most one `y ∈ 𝓙` on the curve.
pub fn condition_star(curve: &Curve, rect: Rect) -> Result<bool> {
    Ok(condition_star_witness(curve, rect)?.is_none())
}

/// The first `x ∈ 𝓘` breaking condition (∗), with its number of roots in `𝓙`.
pub fn condition_star_witness(curve: &Curve, rect: Rect) -> Result<Option<(u64, u32)>> {
    Ok(RestrictedIndex::new(curve, rect)?.star_violation())
}

/// `N_{C,Ω}(x0, I) = Σ_{x0 < x <= x0 + I} δ_{C,Ω}(x)` over the scan.
pub fn restricted_window_counts(index: &RestrictedIndex, spec: &ScanSpec) -> Result<Vec<u64>> {
    spec.validate(index.curve.p())?;
    index.require_star()?;
    Ok(sliding_sums(spec, |x| u64::from(index.delta(x))))
}

/// β-residue and β-nonresidue window counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaScan {
    /// Upper end of `𝓙 = [1, ⌊βp⌋]`.
    pub j_max: u64,
    pub residues: Vec<u64>,
    pub nonresidues: Vec<u64>,
    pub residue_hist: Histogram,
    pub nonresidue_hist: Histogram,
}

/// Counts β-residues (`x ≡ y²` with `0 < y <= βp`) and β-nonresidues in
/// every window `(x0, x0 + I]` of the scan, plus their histograms mod `m`.
///
/// Both counts are computed by their own sliding pass, so `R + N = I` is a
/// genuine check rather than a definition.
pub fn beta_residue_scan(
    field: &FieldSpec,
    beta: Ratio<u64>,
    spec: &ScanSpec,
    m: u64,
) -> Result<BetaScan> {
    let p = field.p();
    if *beta.numer() == 0 || beta > Ratio::new(1, 2) {
        return Err(Error::invalid("beta", format!("{beta} is not in (0, 1/2]")));
    }
    let j_max = (u128::from(*beta.numer()) * u128::from(p) / u128::from(*beta.denom())) as u64;
    if j_max == 0 {
        return Err(Error::invalid("beta", format!("beta * p = {beta} * {p} < 1")));
    }
    spec.validate(p)?;
    let curve = Curve::new(field, Poly::x(p), 2)?;
    let rect = Rect::new(Interval::new(0, p - 1)?, Interval::new(1, j_max)?, p)?;
    let index = RestrictedIndex::new(&curve, rect)?;
    let residues = restricted_window_counts(&index, spec)?;
    let nonresidues = sliding_sums(spec, |x| u64::from(!index.delta(x)));
    Ok(BetaScan {
        j_max,
        residue_hist: residue_histogram(&residues, m)?,
        nonresidue_hist: residue_histogram(&nonresidues, m)?,
        residues,
        nonresidues,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::curve;
    use super::*;
    use crate::ffield::legendre;

    fn rect(p: u64, x: (u64, u64), y: (u64, u64)) -> Rect {
        Rect::new(Interval::new(x.0, x.1).unwrap(), Interval::new(y.0, y.1).unwrap(), p).unwrap()
    }

    #[test]
    fn condition_star_examples() {
        let c = curve(7, &[0, 1], 2);
        assert!(condition_star(&c, rect(7, (0, 6), (1, 3))).unwrap());
        assert!(!condition_star(&c, rect(7, (0, 6), (1, 6))).unwrap());
        assert_eq!(condition_star_witness(&c, rect(7, (0, 6), (1, 6))).unwrap(), Some((1, 2)));
        // 𝓘 = {3, 5, 6} holds no squares, so even the full 𝓙 is fine
        assert!(condition_star(&c, rect(7, (5, 6), (0, 6))).unwrap());
    }

    #[test]
    fn restricted_examples() {
        let c = curve(7, &[0, 1], 2);
        let index = RestrictedIndex::new(&c, rect(7, (0, 6), (1, 3))).unwrap();
        let counts = restricted_window_counts(&index, &ScanSpec::new(0, 1, 3)).unwrap();
        assert_eq!(counts, vec![2]);
        let empty = restricted_window_counts(&index, &ScanSpec::new(0, 7, 0)).unwrap();
        assert!(empty.iter().all(|&n| n == 0));

        let bad = RestrictedIndex::new(&c, rect(7, (0, 6), (0, 6))).unwrap();
        assert_eq!(
            restricted_window_counts(&bad, &ScanSpec::new(0, 1, 3)),
            Err(Error::ConditionStar { x: 1, roots: 2 })
        );
    }

    #[test]
    fn delta_respects_x_interval() {
        let c = curve(11, &[0, 1], 2);
        let index = RestrictedIndex::new(&c, rect(11, (3, 5), (1, 5))).unwrap();
        let hits: Vec<u64> = (0..11).filter(|&x| index.delta(x)).collect();
        // squares mod 11 are {1, 3, 4, 5, 9}
        assert_eq!(hits, vec![3, 4, 5]);
    }

    #[test]
    fn beta_half_counts_quadratic_residues() {
        for p in [7u64, 11, 101, 1009] {
            let field = FieldSpec::new(p).unwrap();
            let window = 5;
            let spec = ScanSpec::full(p, window);
            let scan = beta_residue_scan(&field, Ratio::new(1, 2), &spec, 3).unwrap();
            for (i, x0) in spec.positions().enumerate() {
                let qr = (x0 + 1..=x0 + window).filter(|&x| legendre(x, p) == 1).count() as u64;
                assert_eq!(scan.residues[i], qr);
                assert_eq!(scan.residues[i] + scan.nonresidues[i], window);
            }
            assert_eq!(scan.residue_hist.total(), spec.scan_len);
        }
    }

    #[test]
    fn beta_small_example() {
        let field = FieldSpec::new(7).unwrap();
        let scan = beta_residue_scan(&field, Ratio::new(3, 7), &ScanSpec::new(0, 1, 3), 2).unwrap();
        assert_eq!(scan.j_max, 3);
        assert_eq!(scan.residues, vec![2]);
        assert_eq!(scan.nonresidues, vec![1]);
    }

    #[test]
    fn beta_rejects_out_of_range() {
        let field = FieldSpec::new(101).unwrap();
        let spec = ScanSpec::new(0, 10, 5);
        assert!(beta_residue_scan(&field, Ratio::new(3, 5), &spec, 2).is_err());
        assert!(beta_residue_scan(&field, Ratio::new(0, 5), &spec, 2).is_err());
        assert!(beta_residue_scan(&field, Ratio::new(1, 200), &spec, 2).is_err());
    }
}
