//! Panels of the average social dynamic regret figure on `A_delta`.
//!
//! Each default horizon ends just after the first long bad block of its
//! dynamics at `delta = 0.01`, `eta = 0.1`, rounded up to a multiple of 1000,
//! so every panel shows its red region and the climb it causes. OGDA has no
//! such block and runs to `10^4`.

use serde::Serialize;

use crate::dynamics::{simulate, Algorithm, DynamicsConfig};
use crate::error::Result;
use crate::game::MatrixGame;
use crate::metrics::step_social_regret;
use crate::regularizers::Regularizer;

pub const DEFAULT_DELTA: f64 = 0.01;
pub const DEFAULT_ETA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Panel {
    pub algorithm: Algorithm,
    pub regularizer: Regularizer,
    pub horizon: usize,
}

impl Panel {
    pub fn label(&self) -> String {
        match self.algorithm {
            Algorithm::Ogda => "ogda".into(),
            _ => format!("oftrl_{}", self.regularizer.name()),
        }
    }

    pub fn config(&self, eta: f64) -> Result<DynamicsConfig> {
        DynamicsConfig::new(self.algorithm, self.regularizer, eta, self.horizon)
    }
}

/// OGDA and OFTRL with log barrier, entropy, Tsallis(1/2) and squared
/// Euclidean regularizers.
pub fn default_panels() -> Vec<Panel> {
    let oftrl = |regularizer, horizon| Panel {
        algorithm: Algorithm::Oftrl,
        regularizer,
        horizon,
    };
    vec![
        Panel {
            algorithm: Algorithm::Ogda,
            regularizer: Regularizer::SqEuclid,
            horizon: 10_000,
        },
        oftrl(Regularizer::LogBarrier, 37_000),
        oftrl(Regularizer::Entropy, 6_000),
        oftrl(Regularizer::Tsallis { beta: 0.5 }, 6_000),
        oftrl(Regularizer::SqEuclid, 2_000),
    ]
}

/// Per-iteration data of one panel, indexed by `t - 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelSeries {
    pub label: String,
    /// `(1/t) sum_{s <= t}` social dynamic regret.
    pub avg_regret: Vec<f64>,
    pub gap: Vec<f64>,
}

impl PanelSeries {
    pub fn final_avg_regret(&self) -> f64 {
        *self.avg_regret.last().expect("horizon is at least 1")
    }
}

pub fn run_panel(game: &MatrixGame, panel: &Panel, eta: f64) -> Result<PanelSeries> {
    let config = panel.config(eta)?.with_stride(1)?;
    let mut out = PanelSeries {
        label: panel.label(),
        avg_regret: Vec::with_capacity(panel.horizon),
        gap: Vec::with_capacity(panel.horizon),
    };
    let mut regret = 0.0;
    simulate(game, &config, |s| {
        regret += step_social_regret(s);
        out.avg_regret.push(regret / s.t as f64);
        out.gap.push(s.gap);
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::make_a_delta;

    #[test]
    fn non_tsallis_panels_have_distinct_horizons() {
        let panels = default_panels();
        let mut h: Vec<usize> = panels
            .iter()
            .filter(|p| !matches!(p.regularizer, Regularizer::Tsallis { .. }))
            .map(|p| p.horizon)
            .collect();
        h.sort();
        h.dedup();
        assert_eq!(h.len(), 4);
    }

    #[test]
    fn panel_average_matches_gap_average() {
        let g = make_a_delta(DEFAULT_DELTA).unwrap();
        let panel = Panel {
            algorithm: Algorithm::Oftrl,
            regularizer: Regularizer::Entropy,
            horizon: 500,
        };
        let s = run_panel(&g, &panel, DEFAULT_ETA).unwrap();
        let mean = s.gap.iter().sum::<f64>() / 500.0;
        assert!((s.final_avg_regret() - mean).abs() < 1e-12);
    }
}
