use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{
    joint_histogram, residue_histogram, restricted_window_counts, window_counts, Curve, Histogram,
    JointHistogram, Rect, RestrictedIndex, ScanSpec,
};
use crate::error::{Error, Result};
use crate::ffield::FieldSpec;
use crate::polyff::{admissible, multiplicatively_independent, Independence, Poly};
use crate::rwalk::{model_reference, ModelQuantiles, ModelSpec, StepLaw};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Thm1,
    Thm2,
    Thm3,
}

/// What to do with the growth conditions that only make sense as `p → ∞`
/// (the upper limits on `L` and the lower limit on `|𝓘|`).
///
/// Structural hypotheses (admissibility, coprimality, independence,
/// condition (∗), `p − L > I > L`, `p ≡ 1 mod l`) are always enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HypothesisPolicy {
    #[default]
    Enforce,
    Record,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    /// Growth condition, recorded but not enforced under
    /// [`HypothesisPolicy::Record`].
    pub asymptotic: bool,
}

/// Model run parameters; block count and step law follow from the scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelRun {
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct ExperimentInputs {
    pub kind: ExperimentKind,
    pub field: FieldSpec,
    pub ell: u64,
    pub m: u64,
    pub polys: Vec<Poly>,
    /// Must carry the block length `L`.
    pub scan: ScanSpec,
    /// Required for `thm3`.
    pub rect: Option<Rect>,
    pub policy: HypothesisPolicy,
    pub model: Option<ModelRun>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub spec: ModelSpec,
    pub quantiles: ModelQuantiles,
    pub below_q99: bool,
}

#[derive(Debug, Clone)]
pub enum ExperimentHistogram {
    Single(Histogram),
    Joint(JointHistogram),
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub checks: Vec<HypothesisCheck>,
    pub histogram: ExperimentHistogram,
    pub discrepancy: Rational,
    /// The main term `7m³l²/L`, `7m^(k+2)l²/L` or `4m⁴/L`.
    pub bound: f64,
    pub pass: bool,
    pub model: Option<ModelComparison>,
}

impl ExperimentReport {
    pub fn discrepancy_f64(&self) -> f64 {
        crate::scalar::Scalar::to_f64(&self.discrepancy)
    }
}

struct Checks {
    policy: HypothesisPolicy,
    list: Vec<HypothesisCheck>,
}

impl Checks {
    fn structural(&mut self, name: &str, pass: bool, detail: String) -> Result<()> {
        self.list.push(HypothesisCheck {
            name: name.into(),
            pass,
            detail: detail.clone(),
            asymptotic: false,
        });
        if pass {
            Ok(())
        } else {
            Err(Error::hypothesis(name, detail))
        }
    }

    fn growth(&mut self, name: &str, pass: bool, detail: String) -> Result<()> {
        self.list.push(HypothesisCheck {
            name: name.into(),
            pass,
            detail: detail.clone(),
            asymptotic: true,
        });
        if pass || self.policy == HypothesisPolicy::Record {
            Ok(())
        } else {
            Err(Error::hypothesis(name, detail))
        }
    }
}

/// Runs the scan behind one of the three uniformity theorems, checking its
/// hypotheses, and compares the discrepancy with the theorem's main term and
/// (optionally) with the random-walk block model.
pub fn theorem_experiment(inputs: &ExperimentInputs) -> Result<ExperimentReport> {
    let p = inputs.field.p();
    let (ell, m, scan) = (inputs.ell, inputs.m, inputs.scan);
    let block = scan
        .block
        .ok_or_else(|| Error::invalid("L", "theorem experiments need a block length"))?;
    if block == 0 {
        return Err(Error::invalid("L", "must be >= 1"));
    }
    if m == 0 {
        return Err(Error::invalid("m", "must be >= 1"));
    }
    scan.validate(p)?;
    if inputs.polys.is_empty() {
        return Err(Error::invalid("poly", "need at least one polynomial"));
    }
    let mut checks = Checks {
        policy: inputs.policy,
        list: Vec::new(),
    };
    let curves = inputs
        .polys
        .iter()
        .map(|poly| Curve::new(&inputs.field, poly.clone(), ell))
        .collect::<Result<Vec<_>>>()?;

    checks.structural(
        "p≡1 (mod ℓ)",
        (p - 1).is_multiple_of(ell),
        format!("p = {p}, ℓ = {ell}"),
    )?;
    if inputs.kind != ExperimentKind::Thm3 {
        let g = m.gcd(&ell);
        checks.structural("GCD(m,ℓ)=1", g == 1, format!("gcd({m}, {ell}) = {g}"))?;
    }
    if inputs.kind == ExperimentKind::Thm2 {
        let k = inputs.polys.len();
        checks.structural("k≥2", k >= 2, format!("k = {k}"))?;
        let verdict = multiplicatively_independent(&inputs.polys)?;
        let detail = match &verdict {
            Independence::Independent => "independent".to_string(),
            Independence::Dependent { witness } => format!("dependent, witness {witness:?}"),
        };
        checks.structural("multiplicative independence", verdict.is_independent(), detail)?;
    } else {
        checks.structural(
            "single curve",
            inputs.polys.len() == 1,
            format!("{} polynomials given", inputs.polys.len()),
        )?;
    }
    for (i, poly) in inputs.polys.iter().enumerate() {
        checks.structural(
            "admissible",
            admissible(poly, ell)?,
            format!("P{} = {poly}", i + 1),
        )?;
    }
    let window = scan.window;
    checks.structural(
        "p−L>I>L",
        window > block && p > block && p - block > window,
        format!("p = {p}, L = {block}, I = {window}"),
    )?;

    let ln_p = (p as f64).ln();
    let d = inputs.polys.iter().filter_map(Poly::degree).max().unwrap_or(1) as f64;
    match inputs.kind {
        ExperimentKind::Thm1 | ExperimentKind::Thm2 => {
            let limit = ln_p / (2.0 * (4.0 * d).ln());
            checks.growth(
                "L<log p/(2 log 4d)",
                (block as f64) < limit,
                format!("L = {block}, limit = {limit:.4}"),
            )?;
        }
        ExperimentKind::Thm3 => {
            let limit = ln_p / (2.0 * ln_p.ln());
            checks.growth(
                "L≤log p/(2 log log p)",
                (block as f64) <= limit,
                format!("L = {block}, limit = {limit:.4}"),
            )?;
        }
    }
    let eps = (scan.scan_len as f64).ln() / ln_p - 0.5;
    checks.growth(
        "|𝓘|≥p^(1/2+ε)",
        scan.scan_len > 1 && eps > 0.0,
        format!("|𝓘| = {}, ε = {eps:.4}", scan.scan_len),
    )?;

    let mf = m as f64;
    let lf = ell as f64;
    let bf = block as f64;
    let (histogram, discrepancy, bound, law) = match inputs.kind {
        ExperimentKind::Thm1 => {
            let h = residue_histogram(&window_counts(&curves[0], &scan)?, m)?;
            let disc = h.discrepancy::<Rational>()?;
            (
                ExperimentHistogram::Single(h),
                disc,
                7.0 * mf.powi(3) * lf * lf / bf,
                StepLaw::power(ell),
            )
        }
        ExperimentKind::Thm2 => {
            let h = joint_histogram(&curves, &scan, m)?;
            let disc = h.discrepancy_exact()?;
            let k = curves.len() as i32;
            (
                ExperimentHistogram::Joint(h),
                disc,
                7.0 * mf.powi(k + 2) * lf * lf / bf,
                StepLaw::power(ell),
            )
        }
        ExperimentKind::Thm3 => {
            let rect = inputs
                .rect
                .ok_or_else(|| Error::invalid("rect", "thm3 needs x and y intervals"))?;
            let index = RestrictedIndex::new(&curves[0], rect)?;
            let witness = index.star_violation();
            checks.structural(
                "condition (∗)",
                witness.is_none(),
                match witness {
                    None => "holds on 𝓘".to_string(),
                    Some((x, n)) => format!("x = {x} has {n} roots in 𝓙"),
                },
            )?;
            let alpha = rect.alpha(p);
            checks.structural(
                "|𝓙|=αp",
                alpha > 0.0 && alpha <= 1.0,
                format!("|𝓙| = {}, α = {alpha:.6}", rect.y.len()),
            )?;
            let h = residue_histogram(&restricted_window_counts(&index, &scan)?, m)?;
            let disc = h.discrepancy::<Rational>()?;
            (
                ExperimentHistogram::Single(h),
                disc,
                4.0 * mf.powi(4) / bf,
                StepLaw::bernoulli(alpha),
            )
        }
    };
    let value = crate::scalar::Scalar::to_f64(&discrepancy);
    let model = match inputs.model {
        None => None,
        Some(run) => {
            let blocks = (scan.scan_len / block).saturating_sub(1).max(1);
            let spec = ModelSpec {
                law,
                m,
                len: block,
                blocks,
                walks: curves.len() as u32,
                trials: run.trials,
                seed: run.seed,
            };
            let quantiles = model_reference(&spec)?;
            Some(ModelComparison {
                spec,
                below_q99: value < quantiles.q99,
                quantiles,
            })
        }
    };
    Ok(ExperimentReport {
        kind: inputs.kind,
        checks: checks.list,
        histogram,
        pass: value <= bound,
        discrepancy,
        bound,
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::super::Interval;
    use super::*;

    fn inputs(kind: ExperimentKind, p: u64, ell: u64, m: u64, polys: &[&[i64]]) -> ExperimentInputs {
        ExperimentInputs {
            kind,
            field: FieldSpec::new(p).unwrap(),
            ell,
            m,
            polys: polys.iter().map(|c| Poly::from_signed(c, p)).collect(),
            scan: ScanSpec::new(0, p - 60, 50).with_block(3),
            rect: None,
            policy: HypothesisPolicy::Record,
            model: None,
        }
    }

    #[test]
    fn single_class_passes_trivially() {
        let r = theorem_experiment(&inputs(ExperimentKind::Thm1, 10_007, 2, 1, &[&[1, 1, 0, 1]]))
            .unwrap();
        assert_eq!(r.discrepancy, Rational::from_integer(0.into()));
        assert!(r.bound > 0.0 && r.pass);
    }

    #[test]
    fn dependent_family_is_rejected_by_name() {
        let err = theorem_experiment(&inputs(ExperimentKind::Thm2, 10_009, 3, 2, &[&[0, 1], &[0, 0, 1]]))
            .unwrap_err();
        match err {
            Error::Hypothesis { name, detail } => {
                assert_eq!(name, "multiplicative independence");
                assert!(detail.contains("[2, -1]"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn coprimality_is_enforced() {
        let err = theorem_experiment(&inputs(ExperimentKind::Thm1, 10_007, 2, 4, &[&[1, 1, 0, 1]]))
            .unwrap_err();
        assert!(err.to_string().contains("GCD(m,ℓ)=1"));
    }

    #[test]
    fn growth_conditions_are_policy_dependent() {
        let mut i = inputs(ExperimentKind::Thm1, 10_007, 2, 3, &[&[1, 1, 0, 1]]);
        i.scan = ScanSpec::new(0, 9_000, 50).with_block(5);
        let r = theorem_experiment(&i).unwrap();
        let l_check = r.checks.iter().find(|c| c.name.starts_with("L<")).unwrap();
        assert!(!l_check.pass && l_check.asymptotic);
        i.policy = HypothesisPolicy::Enforce;
        assert!(matches!(theorem_experiment(&i), Err(Error::Hypothesis { .. })));
    }

    #[test]
    fn window_must_exceed_block() {
        let mut i = inputs(ExperimentKind::Thm1, 10_007, 2, 3, &[&[1, 1, 0, 1]]);
        i.scan = ScanSpec::new(0, 100, 3).with_block(3);
        assert!(theorem_experiment(&i).unwrap_err().to_string().contains("p−L>I>L"));
    }

    #[test]
    fn joint_experiment_runs_with_model() {
        let mut i = inputs(ExperimentKind::Thm2, 10_009, 3, 2, &[&[0, 1], &[1, 1]]);
        i.model = Some(ModelRun { trials: 50, seed: 1 });
        let r = theorem_experiment(&i).unwrap();
        assert!(matches!(r.histogram, ExperimentHistogram::Joint(_)));
        assert_eq!(r.model.unwrap().spec.walks, 2);
    }

    #[test]
    fn restricted_experiment_checks_condition_star() {
        let p = 10_007;
        let mut i = inputs(ExperimentKind::Thm3, p, 2, 3, &[&[0, 1]]);
        i.rect = Some(Rect::new(Interval::new(0, p - 1).unwrap(), Interval::new(1, p / 2).unwrap(), p).unwrap());
        i.model = Some(ModelRun { trials: 50, seed: 2 });
        let r = theorem_experiment(&i).unwrap();
        assert!(r.checks.iter().any(|c| c.name == "condition (∗)" && c.pass));
        assert!(r.pass);

        i.rect = Some(Rect::new(Interval::new(0, p - 1).unwrap(), Interval::new(0, p - 1).unwrap(), p).unwrap());
        let err = theorem_experiment(&i).unwrap_err();
        assert!(err.to_string().contains("condition (∗)"));
    }
}
