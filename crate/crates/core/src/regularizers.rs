//! The four simplex regularizers: values, gradients, Bregman divergences,
//! regularized argmins over the simplex, and the scalar response map used
//! by 2x2 dynamics.
//!
//! Every regularizer is separable, `R(x) = sum_i phi(x[i])`, so all simplex
//! argmins reduce to a single Lagrange multiplier.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::simplex::{project_simplex, SimplexPoint};

/// Bracket for scalar stationarity bisection.
const SCALAR_LO: f64 = 1e-15;
const SCALAR_HI: f64 = 1.0 - 1e-15;
const SCALAR_MAX_ITER: usize = 200;
const SCALAR_WIDTH_TOL: f64 = 1e-14;

/// Residual allowed on the coordinate sum of a multiplier search.
const MULTIPLIER_SUM_TOL: f64 = 1e-13;
const MULTIPLIER_MAX_ITER: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regularizer {
    /// `sum x log x`
    Entropy,
    /// `1/2 sum x^2`
    SqEuclid,
    /// `-sum log x`
    LogBarrier,
    /// `(1 - sum x^beta) / (1 - beta)`, `0 < beta < 1`
    Tsallis { beta: f64 },
}

impl Regularizer {
    pub fn tsallis(beta: f64) -> Result<Self> {
        let r = Regularizer::Tsallis { beta };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Regularizer::Tsallis { beta } if !(*beta > 0.0 && *beta < 1.0) => {
                domain(format!("Tsallis beta must lie in (0, 1), got {beta}"))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Regularizer::Entropy => "entropy".into(),
            Regularizer::SqEuclid => "sq_euclid".into(),
            Regularizer::LogBarrier => "log_barrier".into(),
            Regularizer::Tsallis { beta } => format!("tsallis_{beta}"),
        }
    }

    /// Lipschitz constant of the unit-step scalar response.
    pub fn lipschitz(&self) -> f64 {
        match self {
            Regularizer::Tsallis { beta } => 1.0 / (2.0 * beta),
            _ => 0.5,
        }
    }

    /// Whether `R` is a Legendre function on the simplex (gradient blows up
    /// at the boundary), in which case OFTRL and OOMD iterates coincide.
    pub fn is_legendre(&self) -> bool {
        !matches!(self, Regularizer::SqEuclid)
    }

    fn needs_interior_gradient(&self) -> bool {
        !matches!(self, Regularizer::SqEuclid)
    }

    fn check_interior(&self, x: &SimplexPoint, what: &str) -> Result<()> {
        if !x.is_interior() {
            return domain(format!("{} requires an interior point for {what}", self.name()));
        }
        Ok(())
    }

    /// Per-coordinate derivative `phi'(p)`.
    fn phi_prime(&self, p: f64) -> f64 {
        match *self {
            Regularizer::Entropy => p.ln() + 1.0,
            Regularizer::SqEuclid => p,
            Regularizer::LogBarrier => -1.0 / p,
            Regularizer::Tsallis { beta } => -beta / (1.0 - beta) * p.powf(beta - 1.0),
        }
    }

    pub fn value(&self, x: &SimplexPoint) -> Result<f64> {
        self.validate()?;
        let p = x.probs();
        Ok(match *self {
            Regularizer::Entropy => p.iter().filter(|v| **v > 0.0).map(|v| v * v.ln()).sum(),
            Regularizer::SqEuclid => 0.5 * p.iter().map(|v| v * v).sum::<f64>(),
            Regularizer::LogBarrier => {
                self.check_interior(x, "its value")?;
                -p.iter().map(|v| v.ln()).sum::<f64>()
            }
            Regularizer::Tsallis { beta } => {
                (1.0 - p.iter().map(|v| v.powf(beta)).sum::<f64>()) / (1.0 - beta)
            }
        })
    }

    pub fn gradient(&self, x: &SimplexPoint) -> Result<Vec<f64>> {
        self.validate()?;
        if self.needs_interior_gradient() {
            self.check_interior(x, "its gradient")?;
        }
        Ok(match self {
            Regularizer::Entropy => (0..x.len()).map(|i| x.ln(i) + 1.0).collect(),
            _ => x.probs().iter().map(|p| self.phi_prime(*p)).collect(),
        })
    }

    /// `D_R(x, xp) = R(x) - R(xp) - <grad R(xp), x - xp>`.
    pub fn bregman(&self, x: &SimplexPoint, xp: &SimplexPoint) -> Result<f64> {
        self.validate()?;
        if x.len() != xp.len() {
            return domain("Bregman divergence between simplices of different dimension");
        }
        if self.needs_interior_gradient() {
            self.check_interior(xp, "the Bregman reference point")?;
        }
        let (p, q) = (x.probs(), xp.probs());
        let d: f64 = match *self {
            Regularizer::Entropy => crate::simplex::kl(x, xp),
            Regularizer::SqEuclid => 0.5 * p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>(),
            Regularizer::LogBarrier => {
                self.check_interior(x, "the Bregman argument")?;
                p.iter()
                    .zip(q)
                    .map(|(a, b)| a / b - (a / b).ln() - 1.0)
                    .sum()
            }
            Regularizer::Tsallis { beta } => p
                .iter()
                .zip(q)
                .map(|(a, b)| {
                    (b.powf(beta) - a.powf(beta) + beta * b.powf(beta - 1.0) * (a - b)) / (1.0 - beta)
                })
                .sum(),
        };
        Ok(d.max(0.0))
    }

    /// `argmin_{x in simplex} <theta, x> + R(x)`.
    ///
    /// Entropy: softmax of `-theta` in log domain. Squared Euclidean: the
    /// projection of `-theta`. Log barrier and Tsallis: bisection on the
    /// multiplier of the sum constraint.
    pub fn argmin_linear(&self, theta: &[f64]) -> Result<SimplexPoint> {
        self.validate()?;
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Numeric {
                iteration: 0,
                residual: f64::NAN,
                message: "non-finite linear term in regularized argmin".into(),
            });
        }
        match *self {
            Regularizer::Entropy => {
                let w: Vec<f64> = theta.iter().map(|t| -t).collect();
                Ok(SimplexPoint::from_log_weights(&w))
            }
            Regularizer::SqEuclid => {
                let v: Vec<f64> = theta.iter().map(|t| -t).collect();
                Ok(project_simplex(&v))
            }
            Regularizer::LogBarrier => {
                multiplier_search(theta, 1.0, theta.len() as f64, |s| 1.0 / s)
            }
            Regularizer::Tsallis { beta } => {
                // theta_i - k x_i^{beta-1} = lambda  =>  x_i = ((theta_i - lambda)/k)^{-1/(1-beta)}
                let k = beta / (1.0 - beta);
                let exponent = -1.0 / (1.0 - beta);
                multiplier_search(theta, k, (theta.len() as f64).powf(1.0 - beta) * k, |s| {
                    (s / k).powf(exponent)
                })
            }
        }
    }

    /// `argmin_{x in simplex} <g, x> + D_R(x, center)`, the mirror step.
    pub fn mirror_step(&self, g: &[f64], center: &SimplexPoint) -> Result<SimplexPoint> {
        let grad = self.gradient(center)?;
        let theta: Vec<f64> = g.iter().zip(&grad).map(|(a, b)| a - b).collect();
        self.argmin_linear(&theta)
    }

    /// `F_{eta,R}(e) = argmin_{x in [0,1]} x e + R((x, 1-x)) / eta`.
    pub fn scalar_response(&self, eta: f64, e: f64) -> Result<f64> {
        self.validate()?;
        if !(eta > 0.0 && eta.is_finite()) {
            return domain(format!("step size must be positive, got {eta}"));
        }
        if !e.is_finite() {
            return domain(format!("loss difference must be finite, got {e}"));
        }
        let big_e = eta * e;
        Ok(match self {
            Regularizer::Entropy => {
                if big_e > 0.0 {
                    let t = (-big_e).exp();
                    t / (1.0 + t)
                } else {
                    1.0 / (1.0 + big_e.exp())
                }
            }
            Regularizer::SqEuclid => ((1.0 - big_e) / 2.0).clamp(0.0, 1.0),
            _ => self.scalar_bisection(big_e),
        })
    }

    /// Root of `E + phi'(x) - phi'(1-x)` on `(0, 1)`; the left side is
    /// increasing in `x`.
    fn scalar_bisection(&self, big_e: f64) -> f64 {
        let stationarity = |x: f64| big_e + self.phi_prime(x) - self.phi_prime(1.0 - x);
        let (mut lo, mut hi) = (SCALAR_LO, SCALAR_HI);
        if stationarity(lo) >= 0.0 {
            return lo;
        }
        if stationarity(hi) <= 0.0 {
            return hi;
        }
        for _ in 0..SCALAR_MAX_ITER {
            if hi - lo <= SCALAR_WIDTH_TOL {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if stationarity(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Closed-form inverse of the unit-step scalar response on `(0, 1)`.
    pub fn inverse_scalar_response(&self, x: f64) -> Result<f64> {
        self.validate()?;
        if !(x > 0.0 && x < 1.0) {
            return domain(format!("scalar response inverse needs x in (0, 1), got {x}"));
        }
        Ok(match *self {
            Regularizer::Entropy => (-x).ln_1p() - x.ln(),
            Regularizer::SqEuclid => 1.0 - 2.0 * x,
            Regularizer::LogBarrier => (2.0 * x - 1.0) / (x * (x - 1.0)),
            Regularizer::Tsallis { beta } => {
                beta / (1.0 - beta) * (x.powf(beta - 1.0) - (1.0 - x).powf(beta - 1.0))
            }
        })
    }

    /// `f_R(delta) = -F_{1,R}^{-1}(1 / (1 + delta))`.
    pub fn delta_stability(&self, delta: f64) -> Result<f64> {
        if !(delta > 0.0 && delta < 0.5) {
            return domain(format!("delta must lie in (0, 1/2), got {delta}"));
        }
        Ok(-self.inverse_scalar_response(1.0 / (1.0 + delta))?)
    }
}

/// Solves `sum_i coord(theta_i - lambda) = 1` for `lambda < min theta`.
///
/// With `h_i = theta_i - min theta` and `s = min theta - lambda`, every
/// coordinate `coord(h_i + s)` is decreasing in `s`; the root lies in
/// `[s_lo, s_hi]` where `coord(s_lo) = 1` and `coord(s_hi) = 1/d`.
fn multiplier_search(
    theta: &[f64],
    s_lo: f64,
    s_hi: f64,
    coord: impl Fn(f64) -> f64,
) -> Result<SimplexPoint> {
    let min = theta.iter().cloned().fold(f64::INFINITY, f64::min);
    let h: Vec<f64> = theta.iter().map(|t| t - min).collect();
    let total = |s: f64| h.iter().map(|hi| coord(hi + s)).sum::<f64>();

    let (mut lo, mut hi) = (s_lo, s_hi);
    // Guard against rounding at the analytic bracket ends.
    while total(lo) < 1.0 {
        lo *= 0.5;
    }
    while total(hi) > 1.0 {
        hi *= 2.0;
    }
    let mut s = 0.5 * (lo + hi);
    let mut residual = f64::INFINITY;
    for _ in 0..MULTIPLIER_MAX_ITER {
        s = 0.5 * (lo + hi);
        let sum = total(s);
        residual = (sum - 1.0).abs();
        if residual <= MULTIPLIER_SUM_TOL || s <= lo || s >= hi {
            break;
        }
        if sum > 1.0 {
            lo = s;
        } else {
            hi = s;
        }
    }
    if residual > 1e-10 {
        return Err(Error::Numeric {
            iteration: 0,
            residual,
            message: "simplex multiplier search did not converge".into(),
        });
    }
    let mut x: Vec<f64> = h.iter().map(|hi| coord(hi + s)).collect();
    let sum: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= sum);
    Ok(SimplexPoint::from_raw(x))
}
