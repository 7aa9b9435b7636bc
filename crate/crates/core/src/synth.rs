//! Deterministic synthetic cause-effect pair generator used for desk-scale
//! validation: causal pairs via y = f(x) + noise, anticausal as swapped
//! causal generations, independent draws, and confounded pairs sharing a
//! latent cause.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{LabeledDataset, Pair, TernaryLabel, Variable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mechanism {
    Linear,
    Quadratic,
    MonotoneNonlinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Gaussian,
    Uniform,
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_pairs: usize,
    pub frac_causal: f64,
    pub frac_anticausal: f64,
    pub frac_independent: f64,
    pub frac_confounded: f64,
    pub mechanisms: Vec<Mechanism>,
    pub noises: Vec<NoiseKind>,
    pub samples_min: usize,
    pub samples_max: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_pairs: 400,
            frac_causal: 0.4,
            frac_anticausal: 0.4,
            frac_independent: 0.1,
            frac_confounded: 0.1,
            mechanisms: vec![
                Mechanism::Linear,
                Mechanism::Quadratic,
                Mechanism::MonotoneNonlinear,
            ],
            noises: vec![NoiseKind::Gaussian, NoiseKind::Uniform],
            samples_min: 500,
            samples_max: 500,
            seed: 1,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        let total =
            self.frac_causal + self.frac_anticausal + self.frac_independent + self.frac_confounded;
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "class fractions must sum to 1, got {total}"
            )));
        }
        if self.samples_min < 2 || self.samples_max < self.samples_min {
            return Err(Error::Config("invalid samples range".to_string()));
        }
        if self.mechanisms.is_empty() || self.noises.is_empty() {
            return Err(Error::Config(
                "mechanism and noise sets must be non-empty".to_string(),
            ));
        }
        Ok(())
    }

    /// Per-class pair counts by largest remainder, summing exactly to n_pairs.
    pub fn class_counts(&self) -> [usize; 4] {
        let fracs = [
            self.frac_causal,
            self.frac_anticausal,
            self.frac_independent,
            self.frac_confounded,
        ];
        let mut counts = [0usize; 4];
        let mut remainders: Vec<(usize, f64)> = Vec::new();
        let mut assigned = 0usize;
        for (i, f) in fracs.iter().enumerate() {
            let exact = f * self.n_pairs as f64;
            counts[i] = exact.floor() as usize;
            assigned += counts[i];
            remainders.push((i, exact - exact.floor()));
        }
        remainders.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        for k in 0..(self.n_pairs - assigned) {
            counts[remainders[k % 4].0] += 1;
        }
        counts
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller on open-interval uniforms
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn draw_cause(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    match rng.gen_range(0..3u32) {
        0 => (0..n).map(|_| normal(rng)).collect(),
        1 => {
            let half = 3.0f64.sqrt();
            (0..n).map(|_| rng.gen_range(-half..half)).collect()
        }
        _ => {
            // balanced two-component mixture
            (0..n)
                .map(|_| {
                    let center = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                    center + 0.5 * normal(rng)
                })
                .collect()
        }
    }
}

fn apply_mechanism(rng: &mut ChaCha8Rng, mech: Mechanism, x: &[f64]) -> Vec<f64> {
    match mech {
        Mechanism::Linear => {
            let slope = rng.gen_range(0.5..1.5) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
            x.iter().map(|&v| slope * v).collect()
        }
        Mechanism::Quadratic => {
            let b = rng.gen_range(-0.5..0.5);
            x.iter().map(|&v| v * v + b * v).collect()
        }
        Mechanism::MonotoneNonlinear => {
            if rng.gen::<bool>() {
                let k = rng.gen_range(1.0..3.0);
                x.iter().map(|&v| (k * v).tanh()).collect()
            } else {
                let a = rng.gen_range(0.0..1.0);
                x.iter().map(|&v| v * v * v + a * v).collect()
            }
        }
    }
}

fn add_noise(rng: &mut ChaCha8Rng, kind: NoiseKind, signal: &[f64]) -> Vec<f64> {
    let n = signal.len() as f64;
    let mean = signal.iter().sum::<f64>() / n;
    let sd = (signal.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
    let scale = rng.gen_range(0.25..0.75) * if sd > 0.0 { sd } else { 1.0 };
    signal
        .iter()
        .map(|&v| {
            let eps = match kind {
                NoiseKind::Gaussian => scale * normal(rng),
                NoiseKind::Uniform => {
                    let half = 3.0f64.sqrt() * scale;
                    rng.gen_range(-half..half)
                }
            };
            v + eps
        })
        .collect()
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, set: &[T]) -> T {
    set[rng.gen_range(0..set.len())]
}

/// Generate (cause, effect) via a random mechanism and noise from the config.
fn causal_pair(rng: &mut ChaCha8Rng, cfg: &SynthConfig, n: usize) -> (Vec<f64>, Vec<f64>) {
    let x = draw_cause(rng, n);
    let mech = pick(rng, &cfg.mechanisms);
    let noise = pick(rng, &cfg.noises);
    let signal = apply_mechanism(rng, mech, &x);
    let y = add_noise(rng, noise, &signal);
    (x, y)
}

/// Deterministic synthetic dataset: identical seeds produce identical bytes.
/// Confounded pairs are labeled 0 like independent pairs.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<LabeledDataset> {
    cfg.validate()?;
    let counts = cfg.class_counts();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pairs = Vec::with_capacity(cfg.n_pairs);
    let mut labels = Vec::with_capacity(cfg.n_pairs);
    let mut index = 0usize;
    for (class, &count) in counts.iter().enumerate() {
        for _ in 0..count {
            let n = rng.gen_range(cfg.samples_min..=cfg.samples_max);
            let (a, b, label) = match class {
                0 => {
                    let (x, y) = causal_pair(&mut rng, cfg, n);
                    (x, y, TernaryLabel::FORWARD)
                }
                1 => {
                    let (x, y) = causal_pair(&mut rng, cfg, n);
                    (y, x, TernaryLabel::BACKWARD)
                }
                2 => {
                    let x = draw_cause(&mut rng, n);
                    let y = draw_cause(&mut rng, n);
                    (x, y, TernaryLabel::NONE)
                }
                _ => {
                    let z = draw_cause(&mut rng, n);
                    let mech_x = pick(&mut rng, &cfg.mechanisms);
                    let mech_y = pick(&mut rng, &cfg.mechanisms);
                    let noise = pick(&mut rng, &cfg.noises);
                    let sig_x = apply_mechanism(&mut rng, mech_x, &z);
                    let sig_y = apply_mechanism(&mut rng, mech_y, &z);
                    let x = add_noise(&mut rng, noise, &sig_x);
                    let y = add_noise(&mut rng, noise, &sig_y);
                    (x, y, TernaryLabel::NONE)
                }
            };
            pairs.push(Pair::new(
                format!("synth{index:05}"),
                Variable::numerical(a),
                Variable::numerical(b),
            )?);
            labels.push(label);
            index += 1;
        }
    }
    LabeledDataset::new(pairs, labels)
}
