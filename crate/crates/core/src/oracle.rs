//! Reference minimizer for the one-dimensional problem
//! `min_{x in [0,1]} eta e x + R((x, 1-x))`, written independently of the
//! closed forms and bisection used by [`Regularizer::scalar_response`].
//!
//! A golden-section search on the objective locates the minimizer to about
//! `1e-8`; objective values are too flat near the optimum to do better, so
//! the result is polished by bisecting the derivative on a small bracket.

use crate::regularizers::Regularizer;

const GOLDEN_TOL: f64 = 1e-10;
const POLISH_RADIUS: f64 = 1e-5;

fn phi(reg: Regularizer, p: f64) -> f64 {
    match reg {
        Regularizer::Entropy => {
            if p == 0.0 {
                0.0
            } else {
                p * p.ln()
            }
        }
        Regularizer::SqEuclid => 0.5 * p * p,
        Regularizer::LogBarrier => -p.ln(),
        Regularizer::Tsallis { beta } => -p.powf(beta) / (1.0 - beta),
    }
}

fn phi_derivative(reg: Regularizer, p: f64) -> f64 {
    match reg {
        Regularizer::Entropy => 1.0 + p.ln(),
        Regularizer::SqEuclid => p,
        Regularizer::LogBarrier => -1.0 / p,
        Regularizer::Tsallis { beta } => -beta * p.powf(beta - 1.0) / (1.0 - beta),
    }
}

/// The objective `eta e x + phi(x) + phi(1 - x)`.
pub fn objective(reg: Regularizer, eta: f64, e: f64, x: f64) -> f64 {
    eta * e * x + phi(reg, x) + phi(reg, 1.0 - x)
}

fn derivative(reg: Regularizer, eta: f64, e: f64, x: f64) -> f64 {
    eta * e + phi_derivative(reg, x) - phi_derivative(reg, 1.0 - x)
}

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Reference value of the scalar response `F_{eta,R}(e)`.
pub fn scalar_minimizer(reg: Regularizer, eta: f64, e: f64) -> f64 {
    let rough = golden_section(|x| objective(reg, eta, e, x), 0.0, 1.0, GOLDEN_TOL);
    let mut lo = (rough - POLISH_RADIUS).max(0.0);
    let mut hi = (rough + POLISH_RADIUS).min(1.0);
    let g = |x: f64| derivative(reg, eta, e, x);
    // Constrained minimum at an endpoint: the derivative never changes sign.
    if lo == 0.0 && g(lo) >= 0.0 {
        return 0.0;
    }
    if hi == 1.0 && g(hi) <= 0.0 {
        return 1.0;
    }
    if !(g(lo) < 0.0 && g(hi) > 0.0) {
        // The rough search missed; fall back to the whole interval.
        lo = f64::MIN_POSITIVE;
        hi = 1.0 - f64::EPSILON;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
