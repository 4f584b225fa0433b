use serde::{Serialize, Serializer};

use crate::error::{domain, Result};

/// Absolute tolerance on the coordinate sum of a probability vector.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// A point of the probability simplex.
///
/// Points produced by entropy updates also carry their log-probabilities, so
/// coordinates that underflow to zero in linear scale keep a finite logarithm.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    probs: Vec<f64>,
    log_probs: Option<Vec<f64>>,
}

impl SimplexPoint {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return domain("a simplex point needs at least one coordinate");
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return domain(format!("probability {bad} is negative or not finite"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return domain(format!("probabilities sum to {sum}, not 1"));
        }
        Ok(Self {
            probs,
            log_probs: None,
        })
    }

    pub fn uniform(d: usize) -> Self {
        assert!(d > 0, "uniform distribution over zero actions");
        let p = 1.0 / d as f64;
        Self {
            probs: vec![p; d],
            log_probs: Some(vec![p.ln(); d]),
        }
    }

    /// Normalizes unnormalized log-weights with a max-shifted softmax.
    pub fn from_log_weights(weights: &[f64]) -> Self {
        let max = weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let norm = weights.iter().map(|w| (w - max).exp()).sum::<f64>().ln();
        let log_probs: Vec<f64> = weights.iter().map(|w| w - max - norm).collect();
        let probs = log_probs.iter().map(|l| l.exp()).collect();
        Self {
            probs,
            log_probs: Some(log_probs),
        }
    }

    /// Wraps a vector that is a probability vector by construction
    /// (output of a projection or a multiplier search).
    pub(crate) fn from_raw(probs: Vec<f64>) -> Self {
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        Self {
            probs,
            log_probs: None,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn has_log_probs(&self) -> bool {
        self.log_probs.is_some()
    }

    /// Natural log of coordinate `i`, exact even when the coordinate underflows.
    pub fn ln(&self, i: usize) -> f64 {
        match &self.log_probs {
            Some(l) => l[i],
            None => self.probs[i].ln(),
        }
    }

    pub fn min_ln(&self) -> f64 {
        (0..self.len()).map(|i| self.ln(i)).fold(f64::INFINITY, f64::min)
    }

    pub fn dot(&self, v: &[f64]) -> f64 {
        self.probs.iter().zip(v).map(|(p, x)| p * x).sum()
    }

    pub fn is_interior(&self) -> bool {
        self.probs.iter().all(|p| *p > 0.0)
    }

    pub fn is_valid(&self) -> bool {
        self.probs.iter().all(|p| p.is_finite() && *p >= 0.0)
            && (self.probs.iter().sum::<f64>() - 1.0).abs() <= SUM_TOLERANCE
    }
}

impl Serialize for SimplexPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.probs.serialize(s)
    }
}

/// KL(p, q) with the convention `0 log 0 = 0`, using log-probabilities
/// where available.
pub fn kl(p: &SimplexPoint, q: &SimplexPoint) -> f64 {
    assert_eq!(p.len(), q.len(), "KL between simplices of different dimension");
    (0..p.len())
        .filter(|&i| p.probs[i] > 0.0)
        .map(|i| p.probs[i] * (p.ln(i) - q.ln(i)))
        .sum()
}

/// Euclidean projection onto the probability simplex (sort and threshold).
pub fn project_simplex(v: &[f64]) -> SimplexPoint {
    assert!(!v.is_empty(), "projection of an empty vector");
    // Projection commutes with adding a constant; shifting keeps magnitudes small.
    let shift = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = v.iter().map(|x| x - shift).collect();
    let mut sorted = shifted.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));

    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (j, u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            tau = candidate;
        }
    }
    let mut out: Vec<f64> = shifted.iter().map(|x| (x - tau).max(0.0)).collect();
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= total);
    SimplexPoint::from_raw(out)
}
