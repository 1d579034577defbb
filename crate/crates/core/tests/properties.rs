use curvestat::charsum::{incomplete_sum, joint_census, CensusMode, CensusSpec};
use curvestat::curvewin::{
    beta_residue_scan, cor4_exceptional, joint_histogram, residue_histogram, window_counts, Curve,
    Histogram, ScanSpec,
};
use curvestat::ffield::{is_prime, Character, FieldSpec};
use curvestat::polyff::{is_complete_power, multiplicatively_independent, Independence};
use curvestat::{Poly, Rational};
use num_rational::Ratio;
use num_traits::{One, Zero};
use proptest::prelude::*;

const SMALL_PRIMES: [u64; 12] = [5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43];

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(&SMALL_PRIMES[..])
}

fn poly(p: u64) -> impl Strategy<Value = Poly> {
    (1usize..=4)
        .prop_flat_map(move |deg| (prop::collection::vec(0..p, deg), 1..p))
        .prop_map(move |(mut c, lead)| {
            c.push(lead);
            Poly::new(c, p)
        })
}

fn curve_case() -> impl Strategy<Value = (Curve, u64, u64)> {
    (prime(), 2u64..=4)
        .prop_flat_map(|(p, ell)| (Just(p), Just(ell), poly(p), 0..p))
        .prop_flat_map(|(p, ell, f, window)| {
            let curve = Curve::new(&FieldSpec::new(p).unwrap(), f, ell).unwrap();
            (Just(curve), Just(window), 0..(p - window))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sliding_equals_direct((curve, window, start) in curve_case()) {
        let p = curve.p();
        let spec = ScanSpec::new(start, p - window - start, window);
        let counts = window_counts(&curve, &spec).unwrap();
        for (x0, n) in spec.positions().zip(counts) {
            let direct: u64 = (x0 + 1..=x0 + window).map(|x| curve.fiber_count(x)).sum();
            prop_assert_eq!(n, direct);
        }
    }

    #[test]
    fn histogram_merge_is_split_invariant(values in prop::collection::vec(0u64..50, 1..200), m in 1u64..7, cut in 0usize..200) {
        let cut = cut.min(values.len());
        let whole = residue_histogram(&values, m).unwrap();
        let mut left = Histogram::new(m).unwrap();
        for &v in &values[..cut] { left.record(v); }
        let mut right = Histogram::new(m).unwrap();
        for &v in &values[cut..] { right.record(v); }
        let mut merged = right.clone();
        merged.merge(&left).unwrap();
        left.merge(&right).unwrap();
        prop_assert_eq!(&left, &whole);
        prop_assert_eq!(&merged, &whole);
    }

    #[test]
    fn phi_sums_to_one_and_discrepancy_is_bounded(values in prop::collection::vec(0u64..50, 1..200), m in 1u64..7) {
        let h = residue_histogram(&values, m).unwrap();
        let total: Rational = (0..m).map(|a| h.phi::<Rational>(a).unwrap()).sum();
        prop_assert!(total.is_one());
        let d: Rational = h.discrepancy().unwrap();
        prop_assert!(d >= Rational::zero());
        // maximal when everything sits in one class
        prop_assert!(d <= Rational::new((m - 1).into(), m.into()));
        let f: f64 = h.discrepancy().unwrap();
        prop_assert!((f - curvestat::Scalar::to_f64(&d)).abs() < 1e-12);
    }

    #[test]
    fn joint_with_one_curve_is_single((curve, window, _start) in curve_case(), m in 1u64..6) {
        let spec = ScanSpec::full(curve.p(), window);
        let single = residue_histogram(&window_counts(&curve, &spec).unwrap(), m).unwrap();
        let joint = joint_histogram(std::slice::from_ref(&curve), &spec, m).unwrap();
        for a in 0..m {
            prop_assert_eq!(joint.count(&[a]), single.counts()[a as usize]);
        }
        let dj = joint.discrepancy_exact().unwrap();
        let ds: Rational = single.discrepancy().unwrap();
        prop_assert_eq!(dj, ds);
    }

    #[test]
    fn powers_are_complete_powers(p in prime(), e in 2u64..4) {
        let f = Poly::from_signed(&[3, 1], p);
        let g = Poly::from_signed(&[1, 2, 1], p);
        let fe = (&f * &g).pow(e);
        prop_assert!(is_complete_power(&fe, e).unwrap());
    }

    #[test]
    fn independence_ignores_order_and_scaling(p in prime(), c in 1u64..5, swap in any::<bool>()) {
        let mut family = vec![Poly::from_signed(&[0, 1], p), Poly::from_signed(&[1, 0, 1], p), Poly::from_signed(&[0, 0, 1], p)];
        let base = multiplicatively_independent(&family).unwrap().is_independent();
        family[1] = family[1].scale(c % p);
        if swap { family.swap(0, 2); }
        prop_assert_eq!(multiplicatively_independent(&family).unwrap().is_independent(), base);
        let dependent = matches!(multiplicatively_independent(&family).unwrap(), Independence::Dependent { .. });
        prop_assert!(dependent);
    }

    #[test]
    fn census_targets_partition_nonzero_positions(p in prime(), f in prime().prop_flat_map(poly), stride in 1u64..4) {
        let f = Poly::new(f.coeffs().iter().map(|c| c % p).collect(), p);
        prop_assume!(!f.is_constant());
        let chi = Character::new(&FieldSpec::new(p).unwrap(), 2).unwrap();
        let offsets = vec![0u64, 1];
        let n = p - 1;
        let mut total = 0;
        for code in 0..4u32 {
            let spec = CensusSpec {
                polys: vec![f.clone()],
                stride,
                offsets: offsets.clone(),
                n,
                targets: vec![vec![code & 1, code >> 1]],
                mode: CensusMode::Count,
            };
            total += joint_census(&chi, &spec).unwrap().count;
        }
        let nonzero = (0..=n)
            .filter(|&i| offsets.iter().all(|&x| f.eval((i * stride + x) % p) != 0))
            .count() as u64;
        prop_assert_eq!(total, nonzero);
    }

    #[test]
    fn beta_windows_partition(p in prime(), num in 1u64..4, window in 1u64..5) {
        prop_assume!(window < p && num * p >= 8);
        let beta = Ratio::new(num, 8);
        let spec = ScanSpec::full(p, window);
        let s = beta_residue_scan(&FieldSpec::new(p).unwrap(), beta, &spec, 2).unwrap();
        for (r, n) in s.residues.iter().zip(&s.nonresidues) {
            prop_assert_eq!(r + n, window);
        }
    }

    #[test]
    fn exceptional_counts_fall_with_window(p in prime(), mu in 0u32..2) {
        let ws: Vec<u64> = (1..=p + 1).collect();
        let counts = cor4_exceptional(&FieldSpec::new(p).unwrap(), 2, mu, &ws).unwrap();
        prop_assert!(counts.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn tally_covers_interval(p in prime(), f in prime().prop_flat_map(poly), a in 0u64..43, b in 0u64..43) {
        let f = Poly::new(f.coeffs().iter().map(|c| c % p).collect(), p);
        prop_assume!(!f.is_zero());
        let (lo, hi) = (a.min(b) % p, a.max(b) % p);
        let (lo, hi) = (lo.min(hi), lo.max(hi));
        let chi = Character::new(&FieldSpec::new(p).unwrap(), 2).unwrap();
        let t = incomplete_sum(&f, &chi, lo..hi).unwrap();
        prop_assert_eq!(t.terms(), hi - lo);
        prop_assert!(t.magnitude::<f64>() <= (hi - lo) as f64 + 1e-9);
    }
}

#[test]
fn small_primes_are_prime() {
    assert!(SMALL_PRIMES.iter().all(|&p| is_prime(p)));
}
