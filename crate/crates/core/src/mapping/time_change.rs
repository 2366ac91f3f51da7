use crate::error::{domain, Result};
use crate::numerics::monotone_inverse;

/// Which formula a [`TimeChange`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeChangeKind {
    /// β/(β−α) u^α − α/(β−α) u^β, stored with `alpha < beta`.
    DistinctPair {
        alpha: f64,
        beta: f64,
    },
    /// u^β (1 − β log u).
    EqualPair {
        beta: f64,
    },
    Identity,
}

/// A continuous increasing bijection of `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeChange {
    kind: TimeChangeKind,
}

impl TimeChange {
    pub fn identity() -> Self {
        Self {
            kind: TimeChangeKind::Identity,
        }
    }

    pub fn kind(&self) -> TimeChangeKind {
        self.kind
    }

    pub fn eval(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        if u == 0.0 {
            return 0.0;
        }
        match self.kind {
            TimeChangeKind::DistinctPair { alpha, beta } => {
                let d = beta - alpha;
                u.powf(alpha) * (1.0 - alpha * (d * u.ln()).exp_m1() / d)
            }
            TimeChangeKind::EqualPair { beta } => u.powf(beta) * (1.0 - beta * u.ln()),
            TimeChangeKind::Identity => u,
        }
    }

    /// r'(u); may be infinite at `u = 0`.
    pub fn derivative(&self, u: f64) -> f64 {
        match self.kind {
            TimeChangeKind::DistinctPair { alpha, beta } => {
                let d = beta - alpha;
                -alpha * beta * u.powf(alpha - 1.0) * (d * u.ln()).exp_m1() / d
            }
            TimeChangeKind::EqualPair { beta } => {
                if u == 0.0 {
                    return if beta > 1.0 { 0.0 } else { f64::INFINITY };
                }
                -beta * beta * u.powf(beta - 1.0) * u.ln()
            }
            TimeChangeKind::Identity => 1.0,
        }
    }

    /// r^{-1}(t), in closed form when β = 2α.
    pub fn inverse(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(domain(format!(
                "time change inverse needs t in [0, 1], got {t}"
            )));
        }
        match self.kind {
            TimeChangeKind::Identity => Ok(t),
            TimeChangeKind::DistinctPair { alpha, beta } if beta == 2.0 * alpha => {
                Ok((1.0 - (1.0 - t).sqrt()).powf(1.0 / alpha))
            }
            _ => monotone_inverse(|u| self.eval(u), t, 1e-15),
        }
    }
}

/// r_(α,β); the equal-pair form when α = β. Symmetric in its arguments.
pub fn time_change_r(alpha: f64, beta: f64) -> Result<TimeChange> {
    if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(domain(format!(
            "time change needs α, β > 0, got ({alpha}, {beta})"
        )));
    }
    let kind = if alpha == beta {
        TimeChangeKind::EqualPair { beta }
    } else {
        TimeChangeKind::DistinctPair {
            alpha: alpha.min(beta),
            beta: alpha.max(beta),
        }
    };
    Ok(TimeChange { kind })
}

/// sup over u ∈ {0, 0.001, …, 1} of |r_(β−ε,β)(u) − r_(β,β)(u)|.
pub fn time_change_limit_check(beta: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < beta) {
        return Err(domain(format!(
            "limit check needs 0 < ε < β, got ε = {eps}, β = {beta}"
        )));
    }
    let near = time_change_r(beta - eps, beta)?;
    let limit = time_change_r(beta, beta)?;
    Ok((0..=1000)
        .map(|k| {
            let u = k as f64 / 1000.0;
            (near.eval(u) - limit.eval(u)).abs()
        })
        .fold(0.0, f64::max))
}
