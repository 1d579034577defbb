use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Exact tallies of a count sequence by residue class modulo `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    m: u64,
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("m", "modulus must be >= 1"));
        }
        Ok(Self {
            m,
            counts: vec![0; m as usize],
            total: 0,
        })
    }

    pub fn from_counts(m: u64, counts: Vec<u64>) -> Result<Self> {
        if m == 0 || counts.len() as u64 != m {
            return Err(Error::invalid("counts", format!("expected {m} classes")));
        }
        let total = counts.iter().sum();
        Ok(Self { m, counts, total })
    }

    pub fn record(&mut self, value: u64) {
        self.counts[(value % self.m) as usize] += 1;
        self.total += 1;
    }

    /// Componentwise addition; the merge used when scans run in chunks.
    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.m != other.m {
            return Err(Error::invalid("m", "cannot merge histograms with different moduli"));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        Ok(())
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// `Φ(a) = counts[a] / total`.
    pub fn phi<T: Scalar>(&self, a: u64) -> Result<T> {
        if self.total == 0 {
            return Err(Error::EmptyHistogram);
        }
        Ok(T::from_ratio(
            self.counts[(a % self.m) as usize] as u128,
            self.total as u128,
        ))
    }

    /// `Σ_a (Φ(a) − 1/m)²`.
    pub fn discrepancy<T: Scalar>(&self) -> Result<T> {
        let (num, den) = self.discrepancy_parts()?;
        Ok(T::from_ratio(num, den))
    }

    /// Numerator and denominator of the discrepancy as
    /// `Σ_a (m·c_a − T)² / (m² T²)`, unreduced.
    pub fn discrepancy_parts(&self) -> Result<(u128, u128)> {
        if self.total == 0 {
            return Err(Error::EmptyHistogram);
        }
        let m = self.m as i128;
        let t = self.total as i128;
        let num: u128 = self
            .counts
            .iter()
            .map(|&c| {
                let dev = m * c as i128 - t;
                (dev * dev) as u128
            })
            .sum();
        Ok((num, (m * m * t * t) as u128))
    }
}

/// Tallies `counts[i] mod m`.
pub fn residue_histogram(counts: &[u64], m: u64) -> Result<Histogram> {
    let mut h = Histogram::new(m)?;
    for &c in counts {
        h.record(c);
    }
    Ok(h)
}

/// Joint tallies of `k` count sequences, keyed by the residue vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointHistogram {
    m: u64,
    k: usize,
    cells: BTreeMap<Vec<u64>, u64>,
    total: u64,
}

impl JointHistogram {
    pub fn from_sequences(sequences: &[Vec<u64>], m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("m", "modulus must be >= 1"));
        }
        let k = sequences.len();
        if k == 0 {
            return Err(Error::invalid("curves", "need at least one sequence"));
        }
        let n = sequences[0].len();
        if sequences.iter().any(|s| s.len() != n) {
            return Err(Error::invalid("curves", "sequences differ in length"));
        }
        let mut cells = BTreeMap::new();
        for i in 0..n {
            let key: Vec<u64> = sequences.iter().map(|s| s[i] % m).collect();
            *cells.entry(key).or_insert(0) += 1;
        }
        Ok(Self {
            m,
            k,
            cells,
            total: n as u64,
        })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Nonempty cells in lexicographic order.
    pub fn cells(&self) -> &BTreeMap<Vec<u64>, u64> {
        &self.cells
    }

    pub fn count(&self, a: &[u64]) -> u64 {
        self.cells.get(a).copied().unwrap_or(0)
    }

    /// Number of cells `m^k` (as an exact integer).
    pub fn cell_count(&self) -> BigInt {
        BigInt::from(self.m).pow(self.k as u32)
    }

    /// `Σ_a (Φ(a) − 1/m^k)²` over all `m^k` cells, including empty ones.
    pub fn discrepancy_exact(&self) -> Result<BigRational> {
        if self.total == 0 {
            return Err(Error::EmptyHistogram);
        }
        let cells = self.cell_count();
        let t = BigInt::from(self.total);
        let mut num = BigInt::from(0);
        for &c in self.cells.values() {
            let dev = &cells * BigInt::from(c) - &t;
            num += &dev * &dev;
        }
        let empty = &cells - BigInt::from(self.cells.len());
        num += empty * &t * &t;
        let den = &cells * &cells * &t * &t;
        Ok(BigRational::new(num, den))
    }

    pub fn discrepancy<T: Scalar>(&self) -> Result<T> {
        Ok(T::from_rational(&self.discrepancy_exact()?))
    }
}
