//! Convergence measurements over trajectories: last, random and best-iterate
//! gap series, dynamic and interval regret, loss variation, and the KL
//! potential `Theta^t` used in the OMWU descent argument.
//!
//! Metrics that need every iteration replay the run when the trajectory was
//! stored with a stride larger than one.

use serde::Serialize;

use crate::dynamics::{StepView, Trajectory};
use crate::error::{domain, Error, Result};
use crate::game::{argmin, duality_gap};
use crate::simplex::{kl, SimplexPoint};

/// Gap tolerance for a profile accepted as an equilibrium.
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// `(t, gap(z^t))`.
    pub last_gap_series: Vec<(usize, f64)>,
    /// `(t, mean of gaps over [1, t])`.
    pub random_avg_series: Vec<(usize, f64)>,
    /// `(t, min of gaps over [1, t])`.
    pub best_series: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FinalCriteria {
    pub last_gap: f64,
    pub avg_gap: f64,
    pub best_gap: f64,
}

impl ConvergenceReport {
    pub fn final_values(&self) -> FinalCriteria {
        let last = |s: &[(usize, f64)]| s.last().map_or(f64::NAN, |p| p.1);
        FinalCriteria {
            last_gap: last(&self.last_gap_series),
            avg_gap: last(&self.random_avg_series),
            best_gap: last(&self.best_series),
        }
    }
}

/// The three convergence criteria at every recorded iteration. Running mean
/// and minimum are exact regardless of the record stride.
pub fn convergence_report(traj: &Trajectory) -> ConvergenceReport {
    let n = traj.records.len();
    let mut report = ConvergenceReport {
        last_gap_series: Vec::with_capacity(n),
        random_avg_series: Vec::with_capacity(n),
        best_series: Vec::with_capacity(n),
    };
    for r in &traj.records {
        report.last_gap_series.push((r.t, r.gap));
        report.random_avg_series.push((r.t, r.gap_sum / r.t as f64));
        report.best_series.push((r.t, r.best_gap));
    }
    report
}

fn check_interval(traj: &Trajectory, s: usize, e: usize) -> Result<()> {
    if s == 0 || s > e || e > traj.horizon() {
        return domain(format!("interval [{s}, {e}] is outside [1, {}]", traj.horizon()));
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Regret of one player against the per-iteration best pure response.
fn instant_regret(loss: &[f64], p: &SimplexPoint) -> f64 {
    dot(loss, p.probs()) - loss[argmin(loss)]
}

/// `sum_{t <= T} <l_x^t, x^t - x_*^t> + <l_y^t, y^t - y_*^t>` with pure best
/// responses as comparators. Equals the sum of duality gaps.
pub fn social_dynamic_regret(traj: &Trajectory, horizon: usize) -> Result<f64> {
    check_interval(traj, 1, horizon)?;
    let mut total = 0.0;
    traj.for_each_step_until(horizon, |s| {
        total += step_social_regret(s);
    })?;
    Ok(total)
}

/// Social dynamic regret of a single iteration; equals its duality gap.
pub fn step_social_regret(s: &StepView<'_>) -> f64 {
    instant_regret(s.loss_x, s.x) + instant_regret(s.loss_y, s.y)
}

/// Per-step social dynamic regret for `t = 1..=T`.
pub fn dynamic_regret_series(traj: &Trajectory) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(traj.horizon());
    traj.for_each_step(|s| out.push(step_social_regret(s)))?;
    Ok(out)
}

fn player_parts<'a>(s: &'a StepView<'_>, player: Player) -> (&'a [f64], &'a SimplexPoint) {
    match player {
        Player::X => (s.loss_x, s.x),
        Player::Y => (s.loss_y, s.y),
    }
}

/// Static regret of one player over `[s, e]` against the best fixed pure action.
pub fn interval_regret(traj: &Trajectory, interval: (usize, usize), player: Player) -> Result<f64> {
    let (s, e) = interval;
    check_interval(traj, s, e)?;
    let mut played = 0.0;
    let mut summed: Option<Vec<f64>> = None;
    traj.for_each_step_until(e, |step| {
        if step.t < s {
            return;
        }
        let (loss, p) = player_parts(step, player);
        played += dot(loss, p.probs());
        match &mut summed {
            Some(acc) => acc.iter_mut().zip(loss).for_each(|(a, l)| *a += l),
            None => summed = Some(loss.to_vec()),
        }
    })?;
    let summed = summed.expect("interval is non-empty");
    Ok(played - summed[argmin(&summed)])
}

fn extreme_sum(gx: &[f64], gy: &[f64]) -> f64 {
    let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
    (max(gx) + max(gy)).abs().max((min(gx) + min(gy)).abs())
}

/// `sum_{t=s+1}^{e} max_z |<F(z^t) - F(z^{t-1}), z>|`.
pub fn variation(traj: &Trajectory, interval: (usize, usize)) -> Result<f64> {
    let (s, e) = interval;
    check_interval(traj, s, e)?;
    let mut total = 0.0;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    traj.for_each_step_until(e, |step| {
        if step.t < s {
            return;
        }
        if let Some((px, py)) = &prev {
            let gx: Vec<f64> = step.loss_x.iter().zip(px).map(|(a, b)| a - b).collect();
            let gy: Vec<f64> = step.loss_y.iter().zip(py).map(|(a, b)| a - b).collect();
            total += extreme_sum(&gx, &gy);
        }
        prev = Some((step.loss_x.to_vec(), step.loss_y.to_vec()));
    })?;
    Ok(total)
}

/// `sum_{t=1}^{T-1} ||z^{t+1} - z^t||_1^2` where `z = (x, y)`.
pub fn squared_path_length(traj: &Trajectory) -> Result<f64> {
    let mut total = 0.0;
    let mut prev: Option<(SimplexPoint, SimplexPoint)> = None;
    traj.for_each_step(|s| {
        if let Some((px, py)) = &prev {
            let l1 = |a: &SimplexPoint, b: &SimplexPoint| {
                a.probs().iter().zip(b.probs()).map(|(p, q)| (p - q).abs()).sum::<f64>()
            };
            let d = l1(s.x, px) + l1(s.y, py);
            total += d * d;
        }
        prev = Some((s.x.clone(), s.y.clone()));
    })?;
    Ok(total)
}

/// `KL(z, z') = KL(x, x') + KL(y, y')`.
pub fn joint_kl(x: &SimplexPoint, y: &SimplexPoint, x2: &SimplexPoint, y2: &SimplexPoint) -> f64 {
    kl(x, x2) + kl(y, y2)
}

/// `KL(z*, zhat^t) + KL(zhat^t, z^{t-1}) / 16`, with players given as pairs.
pub fn theta_value(
    z_star: (&SimplexPoint, &SimplexPoint),
    z_hat: (&SimplexPoint, &SimplexPoint),
    z_prev: (&SimplexPoint, &SimplexPoint),
) -> f64 {
    joint_kl(z_star.0, z_star.1, z_hat.0, z_hat.1) + joint_kl(z_hat.0, z_hat.1, z_prev.0, z_prev.1) / 16.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovSeries {
    /// `(t, Theta^t)` for `t >= 2`.
    pub theta: Vec<(usize, f64)>,
    /// `(t, zeta^t)` for `2 <= t < T`.
    pub zeta: Vec<(usize, f64)>,
    /// `(t, eta <F(z^t), z^t - z*>)` for `2 <= t < T`.
    pub regret_terms: Vec<(usize, f64)>,
    pub x_star: SimplexPoint,
    pub y_star: SimplexPoint,
}

impl LyapunovSeries {
    /// Largest `Theta^{t+1} - Theta^t + (15/16) zeta^t`; nonpositive when the
    /// descent inequality holds.
    pub fn max_descent_violation(&self) -> f64 {
        self.zeta
            .iter()
            .enumerate()
            .map(|(i, (_, z))| self.theta[i + 1].1 - self.theta[i].1 + 15.0 / 16.0 * z)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest `eta <F(z^t), z^t - z*> - (Theta^t - Theta^{t+1} - (15/16) zeta^t)`.
    pub fn max_one_sided_violation(&self) -> f64 {
        self.regret_terms
            .iter()
            .enumerate()
            .map(|(i, (_, r))| r - (self.theta[i].1 - self.theta[i + 1].1 - 15.0 / 16.0 * self.zeta[i].1))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `Theta^t` and `zeta^t` along an OOMD run, which records the auxiliary
/// points `zhat^t`.
pub fn lyapunov_series(traj: &Trajectory, x_star: &SimplexPoint, y_star: &SimplexPoint) -> Result<LyapunovSeries> {
    if traj.records.first().is_some_and(|r| r.x_hat.is_none()) {
        return domain("the trajectory does not record auxiliary points; run OOMD");
    }
    let gap = duality_gap(&traj.game, x_star, y_star)?;
    if gap > EQUILIBRIUM_TOLERANCE {
        return Err(Error::Precondition(format!("z* has duality gap {gap:e}, not an equilibrium")));
    }
    let eta = traj.config.eta;
    let star = (x_star, y_star);

    struct Prev {
        x: SimplexPoint,
        y: SimplexPoint,
        x_hat: SimplexPoint,
        y_hat: SimplexPoint,
        regret: f64,
    }
    let mut prev: Option<Prev> = None;
    let mut out = LyapunovSeries {
        theta: Vec::new(),
        zeta: Vec::new(),
        regret_terms: Vec::new(),
        x_star: x_star.clone(),
        y_star: y_star.clone(),
    };
    traj.for_each_step(|s| {
        let (x_hat, y_hat) = (s.x_hat.expect("recorded"), s.y_hat.expect("recorded"));
        if let Some(p) = &prev {
            out.theta.push((s.t, theta_value(star, (x_hat, y_hat), (&p.x, &p.y))));
            // zeta^{t-1} = KL(zhat^t, z^{t-1}) + KL(z^{t-1}, zhat^{t-1})
            if s.t > 2 {
                let zeta = joint_kl(x_hat, y_hat, &p.x, &p.y) + joint_kl(&p.x, &p.y, &p.x_hat, &p.y_hat);
                out.zeta.push((s.t - 1, zeta));
                out.regret_terms.push((s.t - 1, p.regret));
            }
        }
        // <F(z^t), z^t - z*> = <l_x, x - x*> + <l_y, y - y*>
        let regret = eta
            * (dot(s.loss_x, s.x.probs()) - dot(s.loss_x, x_star.probs()) + dot(s.loss_y, s.y.probs())
                - dot(s.loss_y, y_star.probs()));
        prev = Some(Prev {
            x: s.x.clone(),
            y: s.y.clone(),
            x_hat: x_hat.clone(),
            y_hat: y_hat.clone(),
            regret,
        });
    })?;
    Ok(out)
}

/// Smallest coordinate over all iterates and auxiliary points, kept in log
/// scale since it can be far below the smallest positive double.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinProbability {
    pub ln_value: f64,
    /// First iteration attaining the minimum.
    pub t: usize,
}

impl MinProbability {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }

    pub fn log10(&self) -> f64 {
        self.ln_value / std::f64::consts::LN_10
    }
}

pub fn min_probability(traj: &Trajectory) -> Result<MinProbability> {
    let mut best = MinProbability {
        ln_value: f64::INFINITY,
        t: 0,
    };
    traj.for_each_step(|s| {
        let v = [Some(s.x), Some(s.y), s.x_hat, s.y_hat]
            .into_iter()
            .flatten()
            .map(|p| p.min_ln())
            .fold(f64::INFINITY, f64::min);
        if v < best.ln_value {
            best = MinProbability { ln_value: v, t: s.t };
        }
    })?;
    Ok(best)
}
