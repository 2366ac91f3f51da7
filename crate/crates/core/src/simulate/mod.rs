//! Monte Carlo realization of the random integrals ∫ h(t) dY(r(t)) and
//! empirical characteristic functions.

mod sampler;

pub use sampler::DriverSampler;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::mapping::RandomIntegralSpec;
use crate::triplet::{CharExponent, LevyTriplet};

/// Samples per RNG block; block `b` draws from stream `b` of the master seed.
pub const BLOCK_SIZE: usize = 1024;
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Treatment of jumps with |x| ≤ ε.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmallJumpMode {
    Drop,
    GaussianApproximate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n_samples: usize,
    pub n_steps: usize,
    pub jump_cutoff: f64,
    pub seed: u64,
    pub small_jump_mode: SmallJumpMode,
    /// Fan blocks out over the rayon pool. Results do not depend on it.
    pub parallel: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_samples: 20_000,
            n_steps: 512,
            jump_cutoff: 1e-3,
            seed: DEFAULT_SEED,
            small_jump_mode: SmallJumpMode::GaussianApproximate,
            parallel: true,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_steps < 2 {
            return Err(domain(format!(
                "need at least 2 time steps, got {}",
                self.n_steps
            )));
        }
        if !(self.jump_cutoff > 0.0 && self.jump_cutoff <= 1.0) {
            return Err(domain(format!(
                "jump cutoff must lie in (0, 1], got {}",
                self.jump_cutoff
            )));
        }
        Ok(())
    }
}

fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

/// Runs `draw` once per sample, block by block, and concatenates the
/// blocks in order.
fn run_blocks<F>(cfg: &SimConfig, draw: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let blocks = cfg.n_samples.div_ceil(BLOCK_SIZE);
    let one = |b: usize| {
        let mut rng = block_rng(cfg.seed, b);
        let len = BLOCK_SIZE.min(cfg.n_samples - b * BLOCK_SIZE);
        (0..len).map(|_| draw(&mut rng)).collect::<Vec<f64>>()
    };
    let parts: Vec<Vec<f64>> = if cfg.parallel {
        (0..blocks).into_par_iter().map(one).collect()
    } else {
        (0..blocks).map(one).collect()
    };
    parts.concat()
}

/// Independent increments of the driver over the spans in `dt`.
pub fn sample_increments<R: rand::Rng + ?Sized>(
    t: &LevyTriplet,
    dt: &[f64],
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<Vec<f64>> {
    sampler::check_durations(dt)?;
    let s = DriverSampler::new(t, cfg)?;
    Ok(dt.iter().map(|&d| s.increment(d, rng)).collect())
}

/// Samples of Σ_k h(u_k) ΔY_k with ΔY_k an increment over r(u_{k+1}) − r(u_k)
/// and u_k = k / n_steps.
pub fn sample_random_integral(spec: &RandomIntegralSpec, cfg: &SimConfig) -> Result<Vec<f64>> {
    let sampler = DriverSampler::new(spec.driver(), cfg)?;
    let n = cfg.n_steps;
    let r = spec.time_change();
    let weights: Vec<f64> = (0..n)
        .map(|k| spec.integrand(k as f64 / n as f64))
        .collect();
    let spans: Vec<f64> = (0..n)
        .map(|k| (r.eval((k + 1) as f64 / n as f64) - r.eval(k as f64 / n as f64)).max(0.0))
        .collect();
    Ok(run_blocks(cfg, |rng| {
        weights
            .iter()
            .zip(&spans)
            .map(|(&h, &d)| {
                let x = sampler.increment(d, rng);
                h * x
            })
            .sum()
    }))
}

/// Samples of ∫₀¹ t^{1/α} dZ(t) where Z has law J^β(driver) at time one,
/// realized as Σ_k Σ_j t_k^{1/α} s_j^{1/β} ΔY over spans Δt·Δs with
/// midpoints t_k, s_j.
pub fn sample_nested_composition(
    alpha: f64,
    beta: f64,
    driver: &LevyTriplet,
    cfg: &SimConfig,
    outer_steps: usize,
    inner_steps: usize,
) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(domain(format!("need α, β > 0, got ({alpha}, {beta})")));
    }
    if outer_steps == 0 || inner_steps == 0 {
        return Err(domain("nested composition needs positive step counts"));
    }
    let sampler = DriverSampler::new(driver, cfg)?;
    let outer: Vec<f64> = (0..outer_steps)
        .map(|k| ((k as f64 + 0.5) / outer_steps as f64).powf(1.0 / alpha))
        .collect();
    let inner: Vec<f64> = (0..inner_steps)
        .map(|j| ((j as f64 + 0.5) / inner_steps as f64).powf(1.0 / beta))
        .collect();
    let span = 1.0 / (outer_steps * inner_steps) as f64;
    Ok(run_blocks(cfg, |rng| {
        let mut total = 0.0;
        for &a in &outer {
            for &b in &inner {
                total += a * b * sampler.increment(span, rng);
            }
        }
        total
    }))
}

/// (1/n) Σ e^{i y X_k} on a grid of y, with per-point standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCF {
    pub y_grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub n_samples: usize,
    pub std_error: Vec<f64>,
}

impl EmpiricalCF {
    pub fn max_std_error(&self) -> f64 {
        self.std_error.iter().copied().fold(0.0, f64::max)
    }
}

pub fn empirical_cf(samples: &[f64], y_grid: &[f64]) -> Result<EmpiricalCF> {
    if samples.is_empty() {
        return Err(domain(
            "empirical characteristic function needs at least one sample",
        ));
    }
    let n = samples.len() as f64;
    let mut values = Vec::with_capacity(y_grid.len());
    let mut std_error = Vec::with_capacity(y_grid.len());
    for &y in y_grid {
        let v = if y == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            let (c, s) = samples.iter().fold((0.0, 0.0), |(c, s), &x| {
                let (sn, cs) = (y * x).sin_cos();
                (c + cs, s + sn)
            });
            Complex64::new(c / n, s / n)
        };
        std_error.push(((1.0 - v.norm_sqr()).max(0.0) / n).sqrt());
        values.push(v);
    }
    Ok(EmpiricalCF {
        y_grid: y_grid.to_vec(),
        values,
        n_samples: samples.len(),
        std_error,
    })
}

/// sup_j |values_j − exp(Φ(y_j))|.
pub fn cf_distance(e: &EmpiricalCF, phi: &CharExponent) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (&y, &v) in e.y_grid.iter().zip(&e.values) {
        worst = worst.max((v - phi.characteristic_function(y)?).norm());
    }
    Ok(worst)
}
