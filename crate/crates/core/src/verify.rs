//! The acceptance suite: twelve end-to-end checks over fixed seeds.
//!
//! Each check returns a pass flag and a canonical detail value. Timings are
//! kept apart from the detail so that reruns can be compared byte for byte.

use std::collections::HashMap;
use std::time::Instant;

use num_rational::Ratio;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::charsum::{
    joint_census, require_weil_hypothesis, twisted_sum, weil_check, CensusMode, CensusSpec,
};
use crate::curvewin::{
    beta_residue_scan, condition_star, cor4_exceptional, gauss_lemma_check, joint_histogram,
    theorem_experiment, window_counts, Curve, ExperimentInputs, ExperimentKind, HypothesisPolicy,
    Interval, ModelRun, Rect, ScanSpec,
};
use crate::error::Result;
use crate::ffield::{is_prime, legendre, pow_mod, Character, FieldSpec};
use crate::polyff::Poly;
use crate::rwalk::{exact_prop21a, exact_prop21b, exact_prop21c, model_reference, trial_rng};

/// Exceptional-start counts for `p = 1000003`, `l = 2`, `mu = 0` and windows
/// 10, 20, 40, 80, frozen from the first run.
pub const COR4_REGRESSION: [u64; 4] = [948, 0, 0, 0];

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "fiber oracle equivalence"),
    (2, "sliding-window identity"),
    (3, "Gauss lemma"),
    (4, "walk enumeration bounds"),
    (5, "Weil checks"),
    (6, "census bounds"),
    (7, "parity invariant"),
    (8, "y^3=x vs y^3=x^2 diagonal"),
    (9, "model-calibrated uniformity"),
    (10, "beta-residue partition and condition (*)"),
    (11, "exceptional-start trend"),
    (12, "determinism across thread counts"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: u8,
    pub name: String,
    pub pass: bool,
    pub detail: Value,
    #[serde(skip)]
    pub elapsed_ms: u64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} {} ({:.1}s)",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed_ms as f64 / 1000.0
        )
    }
}

pub fn run_all() -> Vec<Outcome> {
    CRITERIA.iter().map(|&(id, _)| run(id)).collect()
}

/// Runs one criterion; an error inside it counts as a failure.
pub fn run(id: u8) -> Outcome {
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map_or("unknown", |c| c.1)
        .to_string();
    let start = Instant::now();
    let result = match id {
        1 => fiber_oracle(),
        2 => sliding_identity(),
        3 => gauss_lemma(),
        4 => enumerations(),
        5 => weil(),
        6 => census(),
        7 => parity(),
        8 => diagonal(),
        9 => model_calibrated(),
        10 => beta_partition(),
        11 => exceptional_trend(),
        12 => determinism(),
        _ => Ok((false, json!({"error": "no such criterion"}))),
    };
    let (pass, detail) = result.unwrap_or_else(|e| (false, json!({"error": e.to_string()})));
    Outcome {
        id,
        name,
        pass,
        detail,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

type Check = Result<(bool, Value)>;

fn rng(stream: u64) -> ChaCha8Rng {
    trial_rng(0x5eed_c0de, stream)
}

fn primes(lo: u64, hi: u64) -> impl Iterator<Item = u64> {
    (lo.max(3)..=hi).filter(|&n| is_prime(n))
}

/// Random polynomial of degree `1..=max_deg` with nonzero leading term.
pub(crate) fn random_poly(rng: &mut ChaCha8Rng, p: u64, max_deg: usize) -> Poly {
    let deg = rng.random_range(1..=max_deg);
    let mut coeffs: Vec<u64> = (0..deg).map(|_| rng.random_range(0..p)).collect();
    coeffs.push(rng.random_range(1..p));
    Poly::new(coeffs, p)
}

fn random_prime(rng: &mut ChaCha8Rng, lo: u64, hi: u64) -> u64 {
    loop {
        let n = rng.random_range(lo..=hi);
        if n > 2 && is_prime(n) {
            return n;
        }
    }
}

fn fiber_oracle() -> Check {
    let mut rng = rng(1);
    let mut cases = 0u64;
    let mut mismatches = 0u64;
    for ell in [2u64, 3, 4] {
        for p in primes(3, 200).filter(|p| (p - 1) % ell == 0) {
            let field = FieldSpec::new(p)?;
            let mut preimages = vec![0u64; p as usize];
            for y in 0..p {
                preimages[pow_mod(y, ell, p) as usize] += 1;
            }
            for _ in 0..50 {
                let curve = Curve::new(&field, random_poly(&mut rng, p, 5), ell)?;
                for x in 0..p {
                    if curve.fiber_count(x) != preimages[curve.poly().eval(x) as usize] {
                        mismatches += 1;
                    }
                }
                cases += 1;
            }
        }
    }
    Ok((mismatches == 0, json!({"polynomials": cases, "mismatches": mismatches})))
}

fn sliding_identity() -> Check {
    let mut rng = rng(2);
    let mut mismatches = 0u64;
    let mut windows = 0u64;
    for _ in 0..100 {
        let p = random_prime(&mut rng, 3, 100_000);
        let ell = [2u64, 3, 4][rng.random_range(0..3)];
        let curve = Curve::new(&FieldSpec::new(p)?, random_poly(&mut rng, p, 5), ell)?;
        let window = rng.random_range(0..=(p - 1).min(300));
        let room = p - window;
        let x_start = rng.random_range(0..room);
        let scan_len = rng.random_range(1..=(room - x_start).min(3000));
        let spec = ScanSpec::new(x_start, scan_len, window);
        let fast = window_counts(&curve, &spec)?;
        for (x0, &n) in spec.positions().zip(&fast) {
            let direct: u64 = (x0 + 1..=x0 + window).map(|x| curve.fiber_count(x)).sum();
            if direct != n {
                mismatches += 1;
            }
        }
        windows += fast.len() as u64;
    }
    Ok((mismatches == 0, json!({"configurations": 100, "windows": windows, "mismatches": mismatches})))
}

fn gauss_lemma() -> Check {
    let mut checked = 0u64;
    let mut bad = Vec::new();
    for p in primes(3, 300) {
        let field = FieldSpec::new(p)?;
        for a in 1..p {
            let g = gauss_lemma_check(&field, a)?;
            let sign = if g.r % 2 == 0 { 1 } else { -1 };
            if !g.ok || sign != legendre(a, p) {
                bad.push((p, a));
            }
            checked += 1;
        }
    }
    Ok((bad.is_empty(), json!({"pairs": checked, "failures": bad})))
}

fn enumerations() -> Check {
    let mut rows = Vec::new();
    let mut ok = true;
    let mut push = |part: &str, m: u64, len: u32, lhs: f64, bound: f64, pass: bool| {
        ok &= pass;
        rows.push(json!({"part": part, "m": m, "L": len, "lhs": lhs, "bound": bound, "pass": pass}));
    };
    for m in [3u64, 5] {
        for len in 2..=6 {
            let r = exact_prop21a::<f64>(2, m, len)?;
            push("a", m, len, r.lhs, r.bound, r.pass);
        }
    }
    for m in [2u64, 3] {
        for len in 2..=6 {
            let r = exact_prop21c::<f64>(m, len)?;
            push("c", m, len, r.lhs, r.bound, r.pass);
        }
    }
    let r = exact_prop21b::<f64>(2, 3, 2, 2)?;
    push("b", 3, 2, r.lhs, r.bound, r.pass);
    Ok((ok, json!(rows)))
}

fn weil() -> Check {
    let mut rng = rng(5);
    let mut chars: HashMap<(u64, u64), Character> = HashMap::new();
    let mut incomplete_fail = 0u64;
    let mut twisted_fail = 0u64;
    let mut worst_ratio = 0.0f64;
    for case in 0..100u64 {
        let p = if case % 2 == 0 { 10_007 } else { 100_003 };
        // 10007 ≡ 2 (mod 3), where the cubic character is trivial
        let ell = if p == 100_003 && rng.random_bool(0.5) { 3 } else { 2 };
        let chi = match chars.get(&(p, ell)) {
            Some(c) => c.clone(),
            None => {
                let c = Character::new(&FieldSpec::new(p)?, ell)?.with_index_table()?;
                chars.insert((p, ell), c.clone());
                c
            }
        };
        let poly = loop {
            let f = random_poly(&mut rng, p, 4);
            if require_weil_hypothesis(&f, &chi).is_ok() {
                break f;
            }
        };
        let a = rng.random_range(0..p);
        let b = rng.random_range(a..=p);
        let w = weil_check(&poly, &chi, a..b)?;
        if !w.pass {
            incomplete_fail += 1;
        }
        worst_ratio = worst_ratio.max(w.magnitude / w.bound);
        let complete = (poly.degree().unwrap_or(0) + 1) as f64 * (p as f64).sqrt();
        let mut ts = vec![0u64];
        ts.extend((0..3).map(|_| rng.random_range(1..p)));
        for t in ts {
            if twisted_sum(&poly, &chi, t)?.norm() > complete * (1.0 + 1e-9) {
                twisted_fail += 1;
            }
        }
    }
    Ok((
        incomplete_fail == 0 && twisted_fail == 0,
        json!({
            "cases": 100,
            "incomplete_failures": incomplete_fail,
            "twisted_failures": twisted_fail,
            "worst_incomplete_ratio": worst_ratio,
        }),
    ))
}

fn census() -> Check {
    let p = 10_007;
    let chi = Character::new(&FieldSpec::new(p)?, 2)?.with_index_table()?;
    let polys = [
        Poly::from_signed(&[0, 1], p),
        Poly::from_signed(&[3, 1], p),
        Poly::from_signed(&[1, 0, 1], p),
        Poly::from_signed(&[5, 2, 1], p),
    ];
    let offset_sets: [&[u64]; 3] = [&[0], &[0, 1], &[0, 2, 5]];
    let mut rows = 0u64;
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for poly in &polys {
        for &stride in &[1u64, 7] {
            for offsets in offset_sets {
                let r = offsets.len();
                for code in 0..(1u32 << r) {
                    let v: Vec<u32> = (0..r).map(|j| (code >> j) & 1).collect();
                    let spec = CensusSpec {
                        polys: vec![poly.clone()],
                        stride,
                        offsets: offsets.to_vec(),
                        n: (p - 1) / stride,
                        targets: vec![v.clone()],
                        mode: CensusMode::Theorem,
                    };
                    let res = joint_census(&chi, &spec)?;
                    worst = worst.max(res.residual.abs() / (res.main_bound + res.slack));
                    if !res.bound_ok {
                        failures.push(json!({"poly": poly.to_string(), "L": stride, "v": v}));
                    }
                    rows += 1;
                }
            }
        }
    }
    let pair = vec![Poly::from_signed(&[0, 1], p), Poly::from_signed(&[1, 1], p)];
    for offsets in offset_sets {
        let r = offsets.len();
        for code in 0..(1u32 << (2 * r)) {
            let targets: Vec<Vec<u32>> = (0..2)
                .map(|l| (0..r).map(|j| (code >> (l * r + j)) & 1).collect())
                .collect();
            let spec = CensusSpec {
                polys: pair.clone(),
                stride: 3,
                offsets: offsets.to_vec(),
                n: (p - 1) / 3,
                targets: targets.clone(),
                mode: CensusMode::Theorem,
            };
            let res = joint_census(&chi, &spec)?;
            worst = worst.max(res.residual.abs() / (res.main_bound + res.slack));
            if !res.bound_ok {
                failures.push(json!({"joint": true, "v": targets}));
            }
            rows += 1;
        }
    }

    // exact recount over every small prime, every target vector
    let mut recount_mismatch = 0u64;
    let mut recounts = 0u64;
    for q in primes(3, 500) {
        let chi = Character::new(&FieldSpec::new(q)?, 2)?;
        let f = Poly::from_signed(&[1, 0, 1], q);
        let offsets: [u64; 3] = if q == 3 { [0, 1, 2] } else { [0, 1, 3] };
        for code in 0..8u32 {
            let v: Vec<u32> = (0..3).map(|j| (code >> j) & 1).collect();
            let spec = CensusSpec {
                polys: vec![f.clone()],
                stride: 2,
                offsets: offsets.to_vec(),
                n: q - 1,
                targets: vec![v.clone()],
                mode: CensusMode::Count,
            };
            let got = joint_census(&chi, &spec)?.count;
            let want = (0..q)
                .filter(|&i| {
                    offsets.iter().zip(&v).all(|(&x, &w)| {
                        let s = legendre(f.eval((2 * i + x) % q), q);
                        (w == 0 && s == 1) || (w == 1 && s == -1)
                    })
                })
                .count() as u64;
            if got != want {
                recount_mismatch += 1;
            }
            recounts += 1;
        }
    }
    Ok((
        failures.is_empty() && recount_mismatch == 0,
        json!({
            "entries": rows,
            "bound_failures": failures,
            "worst_residual_ratio": worst,
            "recounts": recounts,
            "recount_mismatches": recount_mismatch,
        }),
    ))
}

fn parity() -> Check {
    let mut rng = rng(7);
    let mut bad = 0u64;
    let mut windows = 0u64;
    for _ in 0..50 {
        let p = random_prime(&mut rng, 3, 20_000);
        let curve = Curve::new(&FieldSpec::new(p)?, random_poly(&mut rng, p, 5), 2)?;
        let window = rng.random_range(1..p);
        let spec = ScanSpec::full(p, window);
        let counts = window_counts(&curve, &spec)?;
        let mut roots = vec![0u64; p as usize + 1];
        for x in 0..p {
            roots[x as usize + 1] = roots[x as usize] + u64::from(curve.poly().eval(x) == 0);
        }
        for (x0, &n) in spec.positions().zip(&counts) {
            let in_window = roots[(x0 + window + 1) as usize] - roots[(x0 + 1) as usize];
            if n % 2 != in_window % 2 {
                bad += 1;
            }
        }
        windows += counts.len() as u64;
    }
    Ok((bad == 0, json!({"configurations": 50, "windows": windows, "violations": bad})))
}

fn diagonal() -> Check {
    let mut off_diagonal = 0u64;
    let mut cells = 0u64;
    for p in [7u64, 13, 103] {
        let field = FieldSpec::new(p)?;
        let curves = [
            Curve::new(&field, Poly::from_signed(&[0, 1], p), 3)?,
            Curve::new(&field, Poly::from_signed(&[0, 0, 1], p), 3)?,
        ];
        for m in [2u64, 5] {
            for window in [1, 2, 3, p / 2, p - 2] {
                let h = joint_histogram(&curves, &ScanSpec::full(p, window), m)?;
                for (a, &c) in h.cells() {
                    if a[0] != a[1] {
                        off_diagonal += c;
                    }
                }
                cells += 1;
            }
        }
    }
    Ok((off_diagonal == 0, json!({"histograms": cells, "off_diagonal_mass": off_diagonal})))
}

fn model_calibrated() -> Check {
    let p = 1_000_003;
    let field = FieldSpec::new(p)?;
    let inputs = ExperimentInputs {
        kind: ExperimentKind::Thm1,
        field,
        ell: 2,
        m: 3,
        polys: vec![Poly::from_signed(&[1, 1, 0, 1], p)],
        scan: ScanSpec::full(p, 50).with_block(5),
        rect: None,
        policy: HypothesisPolicy::Record,
        model: Some(ModelRun { trials: 500, seed: 0 }),
    };
    let report = theorem_experiment(&inputs)?;
    let value = report.discrepancy_f64();
    let base = report.model.as_ref().map(|m| m.spec).expect("model requested");
    let mut below = 0u64;
    let mut q99s = Vec::with_capacity(100);
    for seed in 0..100u64 {
        let q = model_reference(&crate::rwalk::ModelSpec { seed, ..base })?;
        if value < q.q99 {
            below += 1;
        }
        q99s.push(q.q99);
    }
    q99s.sort_by(f64::total_cmp);
    let asymptotic: Vec<Value> = report
        .checks
        .iter()
        .filter(|c| c.asymptotic)
        .map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail}))
        .collect();
    Ok((
        below >= 95 && report.pass,
        json!({
            "discrepancy": value,
            "theorem_bound": report.bound,
            "theorem_pass": report.pass,
            "seeds_below_q99": below,
            "q99_min": q99s[0],
            "q99_median": q99s[49],
            "q99_max": q99s[99],
            "blocks": base.blocks,
            "asymptotic_checks": asymptotic,
        }),
    ))
}

fn beta_partition() -> Check {
    let mut partition_fail = 0u64;
    let mut star_fail = Vec::new();
    let list: Vec<u64> = primes(11, 1_000).take(20).collect();
    for &p in &list {
        let field = FieldSpec::new(p)?;
        for beta in [Ratio::new(1, 4), Ratio::new(1, 3), Ratio::new(1, 2)] {
            for window in [1, 5, p / 3] {
                let spec = ScanSpec::full(p, window);
                let scan = beta_residue_scan(&field, beta, &spec, 3)?;
                partition_fail += scan
                    .residues
                    .iter()
                    .zip(&scan.nonresidues)
                    .filter(|(r, n)| *r + *n != window)
                    .count() as u64;
            }
        }
        let curve = Curve::new(&field, Poly::from_signed(&[0, 1], p), 2)?;
        let all_x = Interval::new(0, p - 1)?;
        let half = Rect::new(all_x, Interval::new(1, p / 2)?, p)?;
        let full = Rect::new(all_x, all_x, p)?;
        if !condition_star(&curve, half)? || condition_star(&curve, full)? {
            star_fail.push(p);
        }
    }
    Ok((
        partition_fail == 0 && star_fail.is_empty(),
        json!({"primes": list, "partition_failures": partition_fail, "condition_star_failures": star_fail}),
    ))
}

fn exceptional_trend() -> Check {
    let field = FieldSpec::new(1_000_003)?;
    let windows = [10u64, 20, 40, 80];
    let counts = cor4_exceptional(&field, 2, 0, &windows)?;
    let monotone = counts.windows(2).all(|w| w[0] >= w[1]);
    let halved = 2 * counts[3] < counts[0];
    let regression = counts == COR4_REGRESSION;
    Ok((
        monotone && halved && regression,
        json!({
            "windows": windows,
            "counts": counts,
            "monotone": monotone,
            "halved": halved,
            "matches_regression": regression,
        }),
    ))
}

/// Reruns every seeded criterion and a CLI walk report under 1 and 4
/// worker threads and compares the canonical output.
fn determinism() -> Check {
    let seeded = [1u8, 2, 5, 7, 9];
    let capture = |threads: usize| -> Result<Vec<String>> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| crate::Error::Internal(e.to_string()))?;
        pool.install(|| {
            let mut out: Vec<String> = seeded
                .iter()
                .map(|&id| serde_json::to_string(&run(id)).expect("outcome serializes"))
                .collect();
            let walk = crate::cli::execute_args([
                "curvestat", "walk", "--ell", "3", "--m", "4", "--L", "2000", "--trials", "64",
                "--seed", "11",
            ])
            .map_err(|e| crate::Error::Internal(e.to_string()))?;
            out.push(walk.canonical_string());
            Ok(out)
        })
    };
    let one = capture(1)?;
    let four = capture(4)?;
    let differing: Vec<usize> = (0..one.len()).filter(|&i| one[i] != four[i]).collect();
    Ok((differing.is_empty(), json!({"runs": one.len(), "differing": differing})))
}
