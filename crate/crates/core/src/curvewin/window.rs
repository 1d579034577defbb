use rayon::prelude::*;

use super::{Curve, JointHistogram, ScanSpec};
use crate::error::{Error, Result};

/// Window positions handled by one parallel task.
const CHUNK: u64 = 1 << 15;

/// `S(x0) = Σ_{x = x0+1}^{x0+I} f(x)` for every position in `spec`.
///
/// Each chunk of positions computes its first window directly and then slides
/// with `S(x0 + 1) = S(x0) − f(x0 + 1) + f(x0 + I + 1)`. Chunks are independent,
/// so the output does not depend on how many threads run them.
pub fn sliding_sums<F>(spec: &ScanSpec, f: F) -> Vec<u64>
where
    F: Fn(u64) -> u64 + Sync,
{
    let n = spec.scan_len;
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let first = spec.x_start + c * CHUNK;
            let last = (first + CHUNK).min(spec.x_start + n);
            let mut out = Vec::with_capacity((last - first) as usize);
            let mut s: u64 = (first + 1..=first + spec.window).map(&f).sum();
            out.push(s);
            for x0 in first + 1..last {
                s = s + f(x0 + spec.window) - f(x0);
                out.push(s);
            }
            out
        })
        .collect::<Vec<_>>()
        .concat()
}

/// `N_C(x0, I)` for every window position in `spec`.
pub fn window_counts(curve: &Curve, spec: &ScanSpec) -> Result<Vec<u64>> {
    spec.validate(curve.p())?;
    Ok(sliding_sums(spec, |x| curve.fiber_count(x)))
}

/// Joint residue tallies of `(N_1(x0, I), …, N_k(x0, I)) mod m` over a
/// common window position `x0`.
pub fn joint_histogram(curves: &[Curve], spec: &ScanSpec, m: u64) -> Result<JointHistogram> {
    let first = curves
        .first()
        .ok_or_else(|| Error::invalid("curves", "need at least one curve"))?;
    for c in &curves[1..] {
        if c.p() != first.p() {
            return Err(Error::FieldMismatch { left: first.p(), right: c.p() });
        }
        if c.ell() != first.ell() {
            return Err(Error::ExponentMismatch { left: first.ell(), right: c.ell() });
        }
    }
    let sequences = curves
        .iter()
        .map(|c| window_counts(c, spec))
        .collect::<Result<Vec<_>>>()?;
    JointHistogram::from_sequences(&sequences, m)
}
