use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{trial_rng, WalkConfig};
use crate::error::Result;

/// Per-trial visit counts of `Z_1, …, Z_L` to each class mod `m`, with the
/// mean and (sample) variance of `Φ(L; m, a)` across trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiSimulation {
    pub config: WalkConfig,
    /// `counts[t][a] = L · Φ(L; m, a)` in trial `t`.
    pub counts: Vec<Vec<u64>>,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    /// Number of `X` draws equal to `l`, over all trials.
    pub x_hits: u64,
}

impl PhiSimulation {
    pub fn phi(&self, trial: usize, a: usize) -> f64 {
        self.counts[trial][a] as f64 / self.config.len as f64
    }

    /// Standard error of the mean of `Φ(a)`.
    pub fn std_error(&self, a: usize) -> f64 {
        (self.variance[a] / self.counts.len() as f64).sqrt()
    }
}

struct Trial {
    counts: Vec<u64>,
    x_hits: u64,
}

fn run_trial(cfg: &WalkConfig, trial: u64) -> Trial {
    let mut rng = trial_rng(cfg.seed, trial);
    let m = cfg.m;
    let step = cfg.ell % m;
    let mut counts = vec![0u64; m as usize];
    let mut x_hits = 0;
    let mut z = 0u64;
    for _ in 0..cfg.len {
        let x = rng.random_range(0..cfg.ell) == 0;
        let y = rng.random_range(0..cfg.ell) == 0;
        x_hits += u64::from(x);
        if x && !y {
            z = (z + step) % m;
        } else if y && !x {
            z = (z + m - step) % m;
        }
        counts[z as usize] += 1;
    }
    Trial { counts, x_hits }
}

/// Simulates `cfg.trials` independent walks of length `L`.
pub fn simulate_phi(cfg: &WalkConfig) -> Result<PhiSimulation> {
    cfg.validate()?;
    let trials: Vec<Trial> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, t))
        .collect();
    let m = cfg.m as usize;
    let n = trials.len() as f64;
    let len = cfg.len as f64;
    let mut mean = vec![0.0; m];
    for t in &trials {
        for (acc, &c) in mean.iter_mut().zip(&t.counts) {
            *acc += c as f64 / len;
        }
    }
    mean.iter_mut().for_each(|v| *v /= n);
    let mut variance = vec![0.0; m];
    if trials.len() > 1 {
        for t in &trials {
            for a in 0..m {
                let d = t.counts[a] as f64 / len - mean[a];
                variance[a] += d * d;
            }
        }
        variance.iter_mut().for_each(|v| *v /= n - 1.0);
    }
    let x_hits = trials.iter().map(|t| t.x_hits).sum();
    Ok(PhiSimulation {
        config: *cfg,
        counts: trials.into_iter().map(|t| t.counts).collect(),
        mean,
        variance,
        x_hits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(ell: u64, m: u64, len: u64, trials: u64, seed: u64) -> WalkConfig {
        WalkConfig { ell, m, len, trials, seed }
    }

    #[test]
    fn single_class_is_trivial() {
        let sim = simulate_phi(&cfg(3, 1, 50, 20, 1)).unwrap();
        assert!((0..20).all(|t| sim.phi(t, 0) == 1.0));
    }

    #[test]
    fn one_step_law() {
        // Z_1 ∈ {-2, 0, 2} with probabilities 1/4, 1/2, 1/4; mod 5 these are
        // the classes 3, 0, 2.
        let trials = 40_000;
        let sim = simulate_phi(&cfg(2, 5, 1, trials, 7)).unwrap();
        let freq = |a: usize| sim.counts.iter().filter(|c| c[a] == 1).count() as f64 / trials as f64;
        assert!((freq(0) - 0.5).abs() < 0.015);
        assert!((freq(2) - 0.25).abs() < 0.015);
        assert!((freq(3) - 0.25).abs() < 0.015);
        assert_eq!(freq(1) + freq(4), 0.0);
    }

    #[test]
    fn step_law_concentration() {
        for (ell, len, trials) in [(2u64, 200u64, 100u64), (3, 300, 50), (5, 100, 200)] {
            let sim = simulate_phi(&cfg(ell, 7, len, trials, 3)).unwrap();
            let draws = (len * trials) as f64;
            let freq = sim.x_hits as f64 / draws;
            let tol = 4.0 * (1.0 / (ell as f64 * draws)).sqrt();
            assert!((freq - 1.0 / ell as f64).abs() <= tol, "l={ell}: {freq}");
        }
    }

    #[test]
    fn mean_is_uniform_within_three_standard_errors() {
        let sim = simulate_phi(&cfg(2, 3, 10_000, 1_000, 2024)).unwrap();
        for a in 0..3 {
            let z = (sim.mean[a] - 1.0 / 3.0).abs() / sim.std_error(a);
            assert!(z < 3.0, "class {a}: z = {z}");
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let c = cfg(3, 4, 500, 64, 11);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| simulate_phi(&c).unwrap());
        let b = four.install(|| simulate_phi(&c).unwrap());
        assert_eq!(a, b);
    }
}
