use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use super::{SimConfig, SmallJumpMode};
use crate::error::{domain, LevyError, Result};
use crate::numerics::incomplete_gamma_upper;
use crate::triplet::{GridDensity, LevyTriplet, NamedDensity};

/// Largest log-width of a sampling cell for grid densities.
const CELL_WIDTH: f64 = 0.01;

/// Trapezoid in v = log|x| with endpoint heights g0, g1 of x·m(x).
#[derive(Debug, Clone, Copy)]
struct Cell {
    sign: f64,
    v0: f64,
    v1: f64,
    g0: f64,
    g1: f64,
}

impl Cell {
    fn mass(&self) -> f64 {
        0.5 * (self.g0 + self.g1) * (self.v1 - self.v0)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let (g0, g1) = (self.g0, self.g1);
        let t = if g0 + g1 > 0.0 {
            u * (g0 + g1) / (g0 + (g0 * g0 + (g1 * g1 - g0 * g0) * u).max(0.0).sqrt())
        } else {
            u
        };
        let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { u };
        self.sign * (self.v0 + t * (self.v1 - self.v0)).exp()
    }
}

#[derive(Debug, Clone)]
enum Source {
    Atoms {
        cdf: Vec<f64>,
        x: Vec<f64>,
    },
    Cells {
        cdf: Vec<f64>,
        cells: Vec<Cell>,
    },
    /// `near` is the probability of the (ε, 1] piece.
    Exponential {
        lambda: f64,
        eps: f64,
        near: f64,
    },
    Stable {
        p: f64,
        eps: f64,
        plus: f64,
    },
}

fn pick(cdf: &[f64], u: f64) -> usize {
    let total = cdf[cdf.len() - 1];
    cdf.partition_point(|&c| c <= u * total).min(cdf.len() - 1)
}

impl Source {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Source::Atoms { cdf, x } => x[pick(cdf, rng.random())],
            Source::Cells { cdf, cells } => cells[pick(cdf, rng.random())].sample(rng),
            Source::Exponential { lambda, eps, near } => {
                if rng.random::<f64>() < *near {
                    // log-uniform proposal on (ε, 1], accept with e^{−λ(x−ε)}
                    loop {
                        let x = eps * (1.0 / eps).powf(rng.random::<f64>());
                        if rng.random::<f64>() < (-lambda * (x - eps)).exp() {
                            return x;
                        }
                    }
                } else {
                    // 1 + Exp(λ) proposal, accept with 1/x
                    loop {
                        let e: f64 = -(1.0 - rng.random::<f64>()).ln() / lambda;
                        let x = 1.0 + e;
                        if rng.random::<f64>() * x < 1.0 {
                            return x;
                        }
                    }
                }
            }
            Source::Stable { p, eps, plus } => {
                let u: f64 = 1.0 - rng.random::<f64>();
                let size = eps * u.powf(-1.0 / p);
                if rng.random::<f64>() < *plus {
                    size
                } else {
                    -size
                }
            }
        }
    }
}

/// Draws increments of the Lévy process with a given law at time one:
/// exact compound Poisson above the cutoff, a compensating drift for jumps
/// in (ε, 1] and optionally a Gaussian for jumps of size at most ε.
#[derive(Debug, Clone)]
pub struct DriverSampler {
    drift: f64,
    variance: f64,
    rate: f64,
    source_cdf: Vec<f64>,
    sources: Vec<Source>,
}

impl DriverSampler {
    pub fn new(t: &LevyTriplet, cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let eps = cfg.jump_cutoff;
        let m = t.measure();
        let mut compensator = 0.0;
        let mut small_var = 0.0;
        let mut sources = Vec::new();
        let mut rates = Vec::new();

        let (mut ax, mut acdf, mut arate) = (Vec::new(), Vec::new(), 0.0);
        for a in m.atoms() {
            let s = a.x.abs();
            if s > eps {
                arate += a.mass;
                ax.push(a.x);
                acdf.push(arate);
                if s <= 1.0 {
                    compensator += a.mass * a.x;
                }
            } else {
                small_var += a.mass * a.x * a.x;
            }
        }
        if arate > 0.0 {
            rates.push(arate);
            sources.push(Source::Atoms { cdf: acdf, x: ax });
        }

        for g in m.grids() {
            compensator += g.integrate_real(
                |x| {
                    if x.abs() > eps && x.abs() <= 1.0 {
                        x
                    } else {
                        0.0
                    }
                },
                &[eps, 1.0],
            );
            small_var += g.integrate_real(|x| if x.abs() <= eps { x * x } else { 0.0 }, &[eps]);
            let cells = grid_cells(g, eps);
            if !cells.is_empty() {
                let mut cdf = Vec::with_capacity(cells.len());
                let mut acc = 0.0;
                for c in &cells {
                    acc += c.mass();
                    cdf.push(acc);
                }
                if acc > 0.0 {
                    rates.push(acc);
                    sources.push(Source::Cells { cdf, cells });
                }
            }
        }

        for named in m.named() {
            match *named {
                NamedDensity::ExponentialTail { lambda, weight } => {
                    if weight == 0.0 {
                        continue;
                    }
                    let far = weight * incomplete_gamma_upper(0.0, lambda)?;
                    let near = (weight * incomplete_gamma_upper(0.0, lambda * eps)? - far).max(0.0);
                    compensator +=
                        weight * ((-lambda * eps).exp() - (-lambda).exp()).max(0.0) / lambda;
                    let le = lambda * eps;
                    small_var += weight * (-(-le).exp_m1() - le * (-le).exp()) / (lambda * lambda);
                    rates.push(near + far);
                    sources.push(Source::Exponential {
                        lambda,
                        eps,
                        near: near / (near + far),
                    });
                }
                NamedDensity::StablePower { p, c_plus, c_minus } => {
                    let c = c_plus + c_minus;
                    if c == 0.0 {
                        continue;
                    }
                    let mean_part = if (p - 1.0).abs() < 1e-12 {
                        -eps.ln()
                    } else {
                        (1.0 - eps.powf(1.0 - p)) / (1.0 - p)
                    };
                    compensator += (c_plus - c_minus) * mean_part;
                    small_var += c * eps.powf(2.0 - p) / (2.0 - p);
                    rates.push(c * eps.powf(-p) / p);
                    sources.push(Source::Stable {
                        p,
                        eps,
                        plus: c_plus / c,
                    });
                }
            }
        }

        let mut source_cdf = Vec::with_capacity(rates.len());
        let mut rate = 0.0;
        for r in rates {
            rate += r;
            source_cdf.push(rate);
        }
        if !rate.is_finite() || !compensator.is_finite() || !small_var.is_finite() {
            return Err(LevyError::Consistency(format!(
                "jump intensity above ε = {eps} is not finite"
            )));
        }
        let variance = t.gaussian_variance()
            + match cfg.small_jump_mode {
                SmallJumpMode::GaussianApproximate => small_var,
                SmallJumpMode::Drop => 0.0,
            };
        Ok(Self {
            drift: t.shift() - compensator,
            variance,
            rate,
            source_cdf,
            sources,
        })
    }

    /// Intensity of jumps above the cutoff.
    pub fn jump_rate(&self) -> f64 {
        self.rate
    }

    /// One increment over a time span `dt ≥ 0`.
    pub fn increment<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> f64 {
        if dt <= 0.0 {
            return 0.0;
        }
        let mut x = self.drift * dt;
        if self.variance > 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            x += (self.variance * dt).sqrt() * z;
        }
        let mu = self.rate * dt;
        if mu > 0.0 {
            let n = Poisson::new(mu).map(|d| d.sample(rng)).unwrap_or(0.0) as u64;
            for _ in 0..n {
                let s = pick(&self.source_cdf, rng.random());
                x += self.sources[s].sample(rng);
            }
        }
        x
    }
}

/// Trapezoid cells covering the part of `g` with |x| > ε.
fn grid_cells(g: &GridDensity, eps: f64) -> Vec<Cell> {
    let (nodes, logs) = (g.abs_nodes(), g.log_nodes());
    let le = eps.ln();
    let mut cells = Vec::new();
    for j in 0..nodes.len() - 1 {
        let (mut v0, v1) = (logs[j], logs[j + 1]);
        if v1 <= le {
            continue;
        }
        v0 = v0.max(le);
        let k = ((v1 - v0) / CELL_WIDTH).ceil().max(1.0) as usize;
        let h = (v1 - v0) / k as f64;
        let gv = |v: f64| {
            let a = v.exp();
            g.panel_value(j, v, a) * a
        };
        let mut left = gv(v0);
        for i in 0..k {
            let a = v0 + i as f64 * h;
            let b = if i + 1 == k { v1 } else { a + h };
            let right = gv(b);
            cells.push(Cell {
                sign: g.sign(),
                v0: a,
                v1: b,
                g0: left,
                g1: right,
            });
            left = right;
        }
    }
    cells
}

pub(crate) fn check_durations(dt: &[f64]) -> Result<()> {
    if let Some(bad) = dt.iter().find(|d| !(**d >= 0.0 && d.is_finite())) {
        return Err(domain(format!(
            "time spans must be finite and nonnegative, got {bad}"
        )));
    }
    Ok(())
}
