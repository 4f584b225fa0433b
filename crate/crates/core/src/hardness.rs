//! Lower-bound predictions for OFTRL on the hard 2x2 instances, and phase
//! detection on trajectories.
//!
//! Landmarks use first-crossing semantics: the reported iteration is the
//! first one at which the defining inequality holds.

use serde::Serialize;

use crate::dynamics::Trajectory;
use crate::error::{domain, Error, Result};
use crate::regularizers::Regularizer;

/// Gap threshold of the red region in the regret plots.
pub const DEFAULT_GAP_THRESHOLD: f64 = 0.1;
/// Empirical threshold constants. They are not determined by the theory,
/// which only asserts that suitable constants exist.
pub const DEFAULT_C2: f64 = 0.05;
pub const DEFAULT_C3: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardnessPrediction {
    pub regularizer: Regularizer,
    pub eta: f64,
    pub delta: f64,
    pub c3: f64,
    pub lipschitz: f64,
    /// `1/2 - F_{1,R}(1/(20L))`.
    pub c1: f64,
    /// `f_R(delta)`.
    pub f_r: f64,
    /// `floor(c1 / (2 eta L delta))`.
    pub t_h: u64,
    /// `(8 + 2 L f_R(delta)) / (c1 c3 eta L delta)`: a bad block starts no later.
    pub t_upper: f64,
    /// `c1^2 / (80 eta L delta)`: guaranteed length of the bad block.
    pub block_length: f64,
}

/// Evaluates the lower-bound constants for OFTRL with regularizer `reg` on `A_delta`.
pub fn predict_bad_block(reg: Regularizer, eta: f64, delta: f64, c3: f64) -> Result<HardnessPrediction> {
    reg.validate()?;
    let lipschitz = reg.lipschitz();
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Precondition(format!("delta must lie in (0, 1/2), got {delta}")));
    }
    if !(eta > 0.0 && eta <= 1.0 / (4.0 * lipschitz)) {
        return Err(Error::Precondition(format!(
            "step size must lie in (0, 1/(4L)] = (0, {}], got {eta}",
            1.0 / (4.0 * lipschitz)
        )));
    }
    if !(c3 > 0.0 && c3 <= 0.5) {
        return Err(Error::Precondition(format!("c3 must lie in (0, 1/2], got {c3}")));
    }
    let c1 = 0.5 - reg.scalar_response(1.0, 1.0 / (20.0 * lipschitz))?;
    let f_r = reg.delta_stability(delta)?;
    let scale = eta * lipschitz * delta;
    Ok(HardnessPrediction {
        regularizer: reg,
        eta,
        delta,
        c3,
        lipschitz,
        c1,
        f_r,
        t_h: (c1 / (2.0 * scale)).floor() as u64,
        t_upper: (8.0 + 2.0 * lipschitz * f_r) / (c1 * c3 * scale),
        block_length: c1 * c1 / (80.0 * scale),
    })
}

/// A maximal run of consecutive iterations with gap at or above a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BadRun {
    /// First iteration of the run, 1-based.
    pub start: usize,
    /// Last iteration of the run, inclusive.
    pub end: usize,
    pub min_gap: f64,
}

impl BadRun {
    pub fn length(&self) -> usize {
        self.end - self.start + 1
    }
}

/// All maximal runs of `gaps[i] >= threshold`, in order. `gaps[0]` is iteration 1.
pub fn bad_runs(gaps: &[f64], threshold: f64) -> Result<Vec<BadRun>> {
    if threshold.is_nan() || threshold <= 0.0 {
        return domain(format!("gap threshold must be positive, got {threshold}"));
    }
    let mut runs = Vec::new();
    let mut current: Option<BadRun> = None;
    for (i, &g) in gaps.iter().enumerate() {
        let t = i + 1;
        if g >= threshold {
            match &mut current {
                Some(run) => {
                    run.end = t;
                    run.min_gap = run.min_gap.min(g);
                }
                None => {
                    current = Some(BadRun {
                        start: t,
                        end: t,
                        min_gap: g,
                    })
                }
            }
        } else if let Some(run) = current.take() {
            runs.push(run);
        }
    }
    runs.extend(current);
    Ok(runs)
}

/// The longest run of gaps at or above `threshold` as `(start, end, length)`,
/// 1-based, earliest on ties. `None` when no gap reaches the threshold.
pub fn longest_bad_run(gaps: &[f64], threshold: f64) -> Result<Option<(usize, usize, usize)>> {
    let runs = bad_runs(gaps, threshold)?;
    let best = runs
        .iter()
        .fold(None::<&BadRun>, |best, r| match best {
            Some(b) if b.length() >= r.length() => Some(b),
            _ => Some(r),
        });
    Ok(best.map(|r| (r.start, r.end, r.length())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseReport {
    /// Global phase: first `t` with `x^t[1] >= 1/(1+delta)`, or in the
    /// initial-phase analysis, first `t` with `x^t[1] >= 1 - delta_x`.
    pub t1: Option<usize>,
    /// First `t > T1` with `y^t[1] >= 1/(2(1+delta))`.
    pub t2: Option<usize>,
    /// First `t` with `y^t[1] < delta_y`.
    pub ty: Option<usize>,
    /// `Ty + ceil(2/eta)`.
    pub tm: Option<usize>,
    /// First `t` with `x^t[1] > 1 - delta_x`.
    pub tx: Option<usize>,
    pub gap_threshold: f64,
    pub bad_runs: Vec<BadRun>,
}

impl PhaseReport {
    pub fn longest_run(&self) -> Option<&BadRun> {
        self.bad_runs
            .iter()
            .fold(None, |best: Option<&BadRun>, r| match best {
                Some(b) if b.length() >= r.length() => Some(b),
                _ => Some(r),
            })
    }
}

fn check_2x2(traj: &Trajectory) -> Result<()> {
    if traj.game.d1() != 2 || traj.game.d2() != 2 {
        return domain(format!(
            "phase detection needs a 2x2 game, got {}x{}",
            traj.game.d1(),
            traj.game.d2()
        ));
    }
    Ok(())
}

/// First coordinates and gaps at every iteration.
fn scan(traj: &Trajectory) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let n = traj.horizon();
    let (mut x1, mut y1, mut gaps) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    traj.for_each_step(|s| {
        x1.push(s.x.probs()[0]);
        y1.push(s.y.probs()[0]);
        gaps.push(s.gap);
    })?;
    Ok((x1, y1, gaps))
}

fn first_from(series: &[f64], from: usize, pred: impl Fn(f64) -> bool) -> Option<usize> {
    series
        .iter()
        .enumerate()
        .skip(from.saturating_sub(1))
        .find(|(_, v)| pred(**v))
        .map(|(i, _)| i + 1)
}

/// Landmarks of the global phase on `A_delta`.
pub fn detect_phases_global(traj: &Trajectory, delta: f64, gap_threshold: f64) -> Result<PhaseReport> {
    check_2x2(traj)?;
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Precondition(format!("delta must lie in (0, 1/2), got {delta}")));
    }
    let (x1, y1, gaps) = scan(traj)?;
    let t1 = first_from(&x1, 1, |v| v >= 1.0 / (1.0 + delta));
    let t2 = t1.and_then(|t1| first_from(&y1, t1 + 1, |v| v >= 1.0 / (2.0 * (1.0 + delta))));
    Ok(PhaseReport {
        t1,
        t2,
        ty: None,
        tm: None,
        tx: None,
        gap_threshold,
        bad_runs: bad_runs(&gaps, gap_threshold)?,
    })
}

/// Landmarks of the initial phase on `A_{delta_x, delta_y}`. When
/// `delta_y >= 1/2` only `T1` is reported.
pub fn detect_phases_initial(traj: &Trajectory, delta_x: f64, delta_y: f64, gap_threshold: f64) -> Result<PhaseReport> {
    check_2x2(traj)?;
    let (x1, y1, gaps) = scan(traj)?;
    let t1 = first_from(&x1, 1, |v| v >= 1.0 - delta_x);
    let (ty, tm, tx) = if delta_y >= 0.5 {
        (None, None, None)
    } else {
        let ty = first_from(&y1, 1, |v| v < delta_y);
        let tm = ty.map(|t| t + (2.0 / traj.config.eta).ceil() as usize);
        let tx = first_from(&x1, 1, |v| v > 1.0 - delta_x);
        (ty, tm, tx)
    };
    Ok(PhaseReport {
        t1,
        t2: None,
        ty,
        tm,
        tx,
        gap_threshold,
        bad_runs: bad_runs(&gaps, gap_threshold)?,
    })
}

/// Prediction and detection side by side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardnessReport {
    pub prediction: Option<HardnessPrediction>,
    pub phases: PhaseReport,
}
