//! Property suites with fixed parameters and tolerances. Each suite returns
//! one [`Check`] per property with the measured value, and the CSV
//! artifacts of the runs it made.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dynamics::{run_dynamics, simulate, Algorithm, DynamicsConfig, Trajectory};
use crate::error::{Error, Result};
use crate::game::{make_a_delta, make_a_dxdy, nash_2x2};
use crate::hardness::{bad_runs, predict_bad_block, BadRun, HardnessPrediction, DEFAULT_C3, DEFAULT_GAP_THRESHOLD};
use crate::io::{to_csv_string, write_series_csv, write_trajectory_csv};
use crate::metrics::{lyapunov_series, social_dynamic_regret, step_social_regret, LyapunovSeries};
use crate::oracle::scalar_minimizer;
use crate::regularizers::Regularizer;

pub const ORACLE_TOLERANCE: f64 = 1e-9;
pub const F_DELTA_RELATIVE_TOLERANCE: f64 = 1e-10;
pub const COINCIDENCE_TOLERANCE: f64 = 1e-8;
pub const SCALAR_TOLERANCE: f64 = 1e-9;
pub const REDUCTION_TOLERANCE: f64 = 1e-9;
pub const DESCENT_TOLERANCE: f64 = 1e-9;
/// Per-iteration allowance for the sum-of-gaps identity.
pub const REGRET_IDENTITY_TOLERANCE: f64 = 1e-9;

pub const ALL_REGULARIZERS: [Regularizer; 4] = [
    Regularizer::Entropy,
    Regularizer::SqEuclid,
    Regularizer::LogBarrier,
    Regularizer::Tsallis { beta: 0.5 },
];

pub const LEGENDRE_REGULARIZERS: [Regularizer; 3] = [
    Regularizer::Entropy,
    Regularizer::LogBarrier,
    Regularizer::Tsallis { beta: 0.5 },
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable acceptance condition, e.g. `<= 1e-9`.
    pub condition: String,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            condition: format!("<= {bound:e}"),
            passed: value <= bound,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            condition: format!(">= {bound:e}"),
            passed: value >= bound,
        }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            condition: format!("in [{lo}, {hi}]"),
            passed: (lo..=hi).contains(&value),
        }
    }

    pub fn holds(name: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            value: if passed { 1.0 } else { 0.0 },
            condition: "holds".into(),
            passed,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}: {:.6e} ({})", self.name, self.value, self.condition)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Artifact {
    pub name: String,
    #[serde(skip)]
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub artifacts: Vec<Artifact>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Oracles,
    Coincidence,
    Lyapunov,
    Reduction,
    LowerBound,
    BestIterate,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Oracles,
        Suite::Coincidence,
        Suite::Lyapunov,
        Suite::Reduction,
        Suite::LowerBound,
        Suite::BestIterate,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Oracles => "oracles",
            Suite::Coincidence => "coincidence",
            Suite::Lyapunov => "lyapunov",
            Suite::Reduction => "reduction",
            Suite::LowerBound => "lowerbound",
            Suite::BestIterate => "bestiterate",
        }
    }

    /// A suite name, or `all` for every suite.
    pub fn parse_selection(name: &str) -> Result<Vec<Suite>> {
        if name == "all" {
            Ok(Suite::ALL.to_vec())
        } else {
            Ok(vec![name.parse()?])
        }
    }

    pub fn run(&self) -> Result<SuiteReport> {
        match self {
            Suite::Oracles => oracles_suite(),
            Suite::Coincidence => coincidence_suite(),
            Suite::Lyapunov => lyapunov_suite(),
            Suite::Reduction => reduction_suite(),
            Suite::LowerBound => lower_bound_suite(),
            Suite::BestIterate => best_iterate_suite(),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite '{s}'")))
    }
}

/// 1000 evenly spaced loss differences in `[-20, 20]`.
pub fn oracle_grid() -> Vec<f64> {
    (0..1000).map(|k| -20.0 + 40.0 * k as f64 / 999.0).collect()
}

/// Largest `|F_{eta,R}(e) - oracle(e)|` over `grid`.
pub fn oracle_discrepancy(reg: Regularizer, eta: f64, grid: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &e in grid {
        worst = worst.max((reg.scalar_response(eta, e)? - scalar_minimizer(reg, eta, e)).abs());
    }
    Ok(worst)
}

fn relative_error(value: f64, exact: f64) -> f64 {
    ((value - exact) / exact).abs()
}

/// `f_R(delta)` against its exact values, and the Tsallis bound together
/// with a round trip through the oracle.
pub fn f_delta_checks() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for delta in [0.1f64, 0.01, 0.001] {
        let exact = [
            (Regularizer::Entropy, (1.0 / delta).ln()),
            (Regularizer::SqEuclid, (1.0 - delta) / (1.0 + delta)),
            (Regularizer::LogBarrier, (1.0 - delta * delta) / delta),
        ];
        for (reg, value) in exact {
            checks.push(Check::at_most(
                format!("f_{}({delta}) relative error", reg.name()),
                relative_error(reg.delta_stability(delta)?, value),
                F_DELTA_RELATIVE_TOLERANCE,
            ));
        }
        let beta: f64 = 0.5;
        let reg = Regularizer::Tsallis { beta };
        let f = reg.delta_stability(delta)?;
        let bound = 2.0 * beta / (1.0 - beta) * (1.0 / delta).powf(1.0 - beta);
        checks.push(Check::at_most(format!("f_{}({delta}) / bound", reg.name()), f / bound, 1.0));
        // F_{1,R}(-f_R(delta)) = 1/(1+delta)
        let target = 1.0 / (1.0 + delta);
        checks.push(Check::at_most(
            format!("f_{}({delta}) oracle round trip relative error", reg.name()),
            relative_error(scalar_minimizer(reg, 1.0, -f), target),
            F_DELTA_RELATIVE_TOLERANCE,
        ));
    }
    Ok(checks)
}

fn oracles_suite() -> Result<SuiteReport> {
    let grid = oracle_grid();
    let mut checks = Vec::new();
    for reg in ALL_REGULARIZERS {
        for eta in [0.05, 0.1, 0.5] {
            checks.push(Check::at_most(
                format!("F_eta vs oracle, {} eta={eta}", reg.name()),
                oracle_discrepancy(reg, eta, &grid)?,
                ORACLE_TOLERANCE,
            ));
        }
    }
    checks.extend(f_delta_checks()?);
    Ok(SuiteReport {
        suite: Suite::Oracles,
        checks,
        artifacts: Vec::new(),
    })
}

/// Largest coordinate difference between the recorded iterates of two runs.
pub fn max_discrepancy(a: &Trajectory, b: &Trajectory) -> f64 {
    a.records
        .iter()
        .zip(&b.records)
        .flat_map(|(ra, rb)| {
            let xs = ra.x.probs().iter().zip(rb.x.probs());
            let ys = ra.y.probs().iter().zip(rb.y.probs());
            xs.chain(ys).map(|(p, q)| (p - q).abs())
        })
        .fold(0.0, f64::max)
}

/// `|sum of gaps - social dynamic regret|` over the whole run.
pub fn regret_identity_residual(traj: &Trajectory) -> Result<f64> {
    Ok((social_dynamic_regret(traj, traj.horizon())? - traj.summary.gap_sum).abs())
}

fn regret_identity_check(label: &str, traj: &Trajectory) -> Result<Check> {
    Ok(Check::at_most(
        format!("regret identity, {label}"),
        regret_identity_residual(traj)?,
        REGRET_IDENTITY_TOLERANCE * traj.horizon() as f64,
    ))
}

fn trajectory_artifact(name: String, traj: &Trajectory) -> Artifact {
    Artifact {
        name,
        contents: to_csv_string(|w| write_trajectory_csv(traj, w)),
    }
}

pub const COINCIDENCE_STEPS: usize = 10_000;

/// OFTRL and OOMD runs with the same regularizer on `A_0.1`, `eta = 0.1`.
pub fn coincidence_runs(reg: Regularizer, steps: usize) -> Result<(Trajectory, Trajectory)> {
    let game = make_a_delta(0.1)?;
    let oftrl = run_dynamics(&game, &DynamicsConfig::new(Algorithm::Oftrl, reg, 0.1, steps)?.with_stride(1)?)?;
    let oomd = run_dynamics(&game, &DynamicsConfig::new(Algorithm::Oomd, reg, 0.1, steps)?.with_stride(1)?)?;
    Ok((oftrl, oomd))
}

/// General and scalar 2x2 OFTRL runs on `A_0.1`, `eta = 0.1`.
pub fn scalar_runs(reg: Regularizer, steps: usize) -> Result<(Trajectory, Trajectory)> {
    let game = make_a_delta(0.1)?;
    let cfg = DynamicsConfig::new(Algorithm::Oftrl, reg, 0.1, steps)?.with_stride(1)?;
    Ok((run_dynamics(&game, &cfg)?, run_dynamics(&game, &cfg.with_scalar_2x2(true))?))
}

fn coincidence_suite() -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let mut artifacts = Vec::new();
    for reg in LEGENDRE_REGULARIZERS {
        let (oftrl, oomd) = coincidence_runs(reg, COINCIDENCE_STEPS)?;
        checks.push(Check::at_most(
            format!("OFTRL vs OOMD, {}", reg.name()),
            max_discrepancy(&oftrl, &oomd),
            COINCIDENCE_TOLERANCE,
        ));
        checks.push(regret_identity_check(&format!("oftrl-{}", reg.name()), &oftrl)?);
        checks.push(regret_identity_check(&format!("oomd-{}", reg.name()), &oomd)?);
        artifacts.push(trajectory_artifact(format!("coincidence_oftrl_{}.csv", reg.name()), &oftrl));
        artifacts.push(trajectory_artifact(format!("coincidence_oomd_{}.csv", reg.name()), &oomd));
    }
    for reg in ALL_REGULARIZERS {
        let (general, scalar) = scalar_runs(reg, COINCIDENCE_STEPS)?;
        checks.push(Check::at_most(
            format!("scalar vs general OFTRL, {}", reg.name()),
            max_discrepancy(&general, &scalar),
            SCALAR_TOLERANCE,
        ));
    }
    Ok(SuiteReport {
        suite: Suite::Coincidence,
        checks,
        artifacts,
    })
}

pub const REDUCTION_STEPS: usize = 10_000;

/// OMWU with `eta = 0.05` on `0.3 + 0.5 A'` and with `eta = 0.025` on `A'`,
/// where `A' = A_{0.05, 0.3}`.
pub fn reduction_runs(steps: usize) -> Result<(Trajectory, Trajectory)> {
    let base = make_a_dxdy(0.05, 0.3)?;
    let shifted = base.affine(0.3, 0.5)?;
    let a = run_dynamics(&shifted, &DynamicsConfig::omwu(0.05, steps)?.with_stride(1)?)?;
    let b = run_dynamics(&base, &DynamicsConfig::omwu(0.025, steps)?.with_stride(1)?)?;
    Ok((a, b))
}

fn reduction_suite() -> Result<SuiteReport> {
    let (a, b) = reduction_runs(REDUCTION_STEPS)?;
    let checks = vec![
        Check::at_most("affine reduction trajectory match", max_discrepancy(&a, &b), REDUCTION_TOLERANCE),
        regret_identity_check("reduced game", &b)?,
    ];
    Ok(SuiteReport {
        suite: Suite::Reduction,
        checks,
        artifacts: vec![
            trajectory_artifact("reduction_affine.csv".into(), &a),
            trajectory_artifact("reduction_base.csv".into(), &b),
        ],
    })
}

pub const LYAPUNOV_STEPS: usize = 100_000;

/// Entropy OOMD (OMWU) on `A_0.1` with `eta = 0.1`, and its potential.
pub fn lyapunov_run(steps: usize) -> Result<(Trajectory, LyapunovSeries)> {
    let game = make_a_delta(0.1)?;
    let ne = nash_2x2(&game)?;
    let cfg = DynamicsConfig::new(Algorithm::Oomd, Regularizer::Entropy, 0.1, steps)?.with_stride(1)?;
    let traj = run_dynamics(&game, &cfg)?;
    let series = lyapunov_series(&traj, &ne.x_star, &ne.y_star)?;
    Ok((traj, series))
}

/// `sum ||z^{t+1} - z^t||_1^2` of OMWU on `A_0.1` at the given checkpoints.
pub fn path_length_partial_sums(checkpoints: &[usize]) -> Result<Vec<f64>> {
    let game = make_a_delta(0.1)?;
    let horizon = *checkpoints.iter().max().unwrap_or(&1);
    let mut total = 0.0;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut out = Vec::new();
    simulate(&game, &DynamicsConfig::omwu(0.1, horizon)?, |s| {
        if let Some((px, py)) = &prev {
            let l1 = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| (p - q).abs()).sum::<f64>();
            let d = l1(s.x.probs(), px) + l1(s.y.probs(), py);
            total += d * d;
        }
        prev = Some((s.x.probs().to_vec(), s.y.probs().to_vec()));
        if checkpoints.contains(&s.t) {
            out.push(total);
        }
    })?;
    Ok(out)
}

fn lyapunov_suite() -> Result<SuiteReport> {
    let (traj, series) = lyapunov_run(LYAPUNOV_STEPS)?;
    let min_theta = series.theta.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let min_zeta = series.zeta.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let sums = path_length_partial_sums(&[500_000, 1_000_000])?;
    let checks = vec![
        Check::at_most("Theta descent violation", series.max_descent_violation(), DESCENT_TOLERANCE),
        Check::at_most("one-sided regret violation", series.max_one_sided_violation(), DESCENT_TOLERANCE),
        Check::at_least("min Theta", min_theta, 0.0),
        Check::at_least("min zeta", min_zeta, 0.0),
        Check::at_most("path length tail share, (5e5, 1e6]", (sums[1] - sums[0]) / sums[1], 1e-3),
        regret_identity_check("oomd-entropy", &traj)?,
    ];
    Ok(SuiteReport {
        suite: Suite::Lyapunov,
        checks,
        artifacts: vec![
            trajectory_artifact("lyapunov_trajectory.csv".into(), &traj),
            Artifact {
                name: "lyapunov_theta.csv".into(),
                contents: to_csv_string(|w| write_series_csv(&series.theta, "theta", w)),
            },
            Artifact {
                name: "lyapunov_zeta.csv".into(),
                contents: to_csv_string(|w| write_series_csv(&series.zeta, "zeta", w)),
            },
        ],
    })
}

pub const LOWER_BOUND_DELTAS: [f64; 3] = [0.02, 0.01, 0.005];
pub const LOWER_BOUND_HORIZON: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockMeasurement {
    pub delta: f64,
    pub longest: Option<BadRun>,
    pub prediction: HardnessPrediction,
    /// `|sum of gaps - social dynamic regret|`.
    pub regret_residual: f64,
    pub horizon: usize,
}

/// Longest run of gaps `>= 0.1` of OMWU (`eta = 0.1`) on `A_delta`.
pub fn measure_bad_block(delta: f64, horizon: usize) -> Result<BlockMeasurement> {
    let game = make_a_delta(delta)?;
    let mut gaps = Vec::with_capacity(horizon);
    let mut regret = 0.0;
    let mut gap_sum = 0.0;
    simulate(&game, &DynamicsConfig::omwu(0.1, horizon)?, |s| {
        gaps.push(s.gap);
        regret += step_social_regret(s);
        gap_sum += s.gap;
    })?;
    let runs = bad_runs(&gaps, DEFAULT_GAP_THRESHOLD)?;
    let longest = runs.iter().fold(None::<BadRun>, |best, r| match best {
        Some(b) if b.length() >= r.length() => Some(b),
        _ => Some(*r),
    });
    Ok(BlockMeasurement {
        delta,
        longest,
        prediction: predict_bad_block(Regularizer::Entropy, 0.1, delta, DEFAULT_C3)?,
        regret_residual: (regret - gap_sum).abs(),
        horizon,
    })
}

/// Checks on the bad-block measurements for consecutive halvings of delta.
pub fn lower_bound_checks(blocks: &[BlockMeasurement]) -> Vec<Check> {
    let mut checks = Vec::new();
    let len = |b: &BlockMeasurement| b.longest.map_or(0.0, |r| r.length() as f64);
    for w in blocks.windows(2) {
        checks.push(Check::within(
            format!("block length ratio delta {} -> {}", w[0].delta, w[1].delta),
            len(&w[1]) / len(&w[0]),
            1.3,
            3.0,
        ));
    }
    for b in blocks {
        checks.push(Check::at_most(
            format!("regret identity, omwu delta={}", b.delta),
            b.regret_residual,
            REGRET_IDENTITY_TOLERANCE * b.horizon as f64,
        ));
        if b.delta == 0.01 {
            checks.push(Check::at_least("block length at delta=0.01", len(b), 50.0));
            let start = b.longest.map_or(f64::INFINITY, |r| r.start as f64);
            checks.push(Check::at_most(
                "block start at delta=0.01 vs predicted upper bound",
                start,
                b.prediction.t_upper,
            ));
        }
    }
    checks
}

fn lower_bound_suite() -> Result<SuiteReport> {
    let blocks = LOWER_BOUND_DELTAS
        .iter()
        .map(|d| measure_bad_block(*d, LOWER_BOUND_HORIZON))
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport {
        suite: Suite::LowerBound,
        checks: lower_bound_checks(&blocks),
        artifacts: Vec::new(),
    })
}

pub const BEST_ITERATE_DELTAS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
pub const BEST_ITERATE_HORIZON: usize = 1_000_000;
pub const BEST_ITERATE_START: usize = 1_000;
/// Artifact-chosen constant in `best(T) <= C T^{-1/6}`.
pub const BEST_ITERATE_CONSTANT: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestIterateMeasurement {
    /// Largest `best(T) / (5 T^{-1/6})` over `T >= 10^3`, per delta.
    pub worst_ratio: Vec<(f64, f64)>,
    /// `(T, max over delta of best(T))` at log-spaced checkpoints.
    pub envelope: Vec<(usize, f64)>,
    /// Least-squares slope of `log envelope` against `log T`.
    pub envelope_slope: f64,
    /// Largest regret identity residual relative to `T`.
    pub regret_residual_per_step: f64,
}

/// Ten checkpoints per decade from `start` to `horizon`.
pub fn log_checkpoints(start: usize, horizon: usize) -> Vec<usize> {
    let decades = (horizon as f64 / start as f64).log10();
    let n = (decades * 10.0).round() as usize;
    let mut out: Vec<usize> = (0..=n)
        .map(|k| (start as f64 * 10f64.powf(k as f64 / 10.0)).round() as usize)
        .filter(|t| *t <= horizon)
        .collect();
    out.dedup();
    out
}

pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    cov / var
}

pub fn measure_best_iterate(deltas: &[f64], horizon: usize) -> Result<BestIterateMeasurement> {
    let checkpoints = log_checkpoints(BEST_ITERATE_START, horizon);
    let mut envelope = vec![0.0f64; checkpoints.len()];
    let mut worst_ratio = Vec::new();
    let mut residual: f64 = 0.0;
    for &delta in deltas {
        let game = make_a_delta(delta)?;
        let mut worst: f64 = 0.0;
        let mut regret = 0.0;
        let mut next = 0;
        simulate(&game, &DynamicsConfig::omwu(0.1, horizon)?, |s| {
            regret += step_social_regret(s);
            if s.t >= BEST_ITERATE_START {
                let bound = BEST_ITERATE_CONSTANT * (s.t as f64).powf(-1.0 / 6.0);
                worst = worst.max(s.best_gap / bound);
            }
            if next < checkpoints.len() && checkpoints[next] == s.t {
                envelope[next] = envelope[next].max(s.best_gap);
                next += 1;
            }
            if s.t == horizon {
                residual = residual.max((regret - s.gap_sum).abs() / horizon as f64);
            }
        })?;
        worst_ratio.push((delta, worst));
    }
    let envelope: Vec<(usize, f64)> = checkpoints.into_iter().zip(envelope).collect();
    let logs: Vec<(f64, f64)> = envelope.iter().map(|(t, v)| ((*t as f64).ln(), v.ln())).collect();
    Ok(BestIterateMeasurement {
        worst_ratio,
        envelope_slope: least_squares_slope(&logs),
        envelope,
        regret_residual_per_step: residual,
    })
}

/// Running average gap of OGDA (`eta = 0.1`) on `A_0.01` at `10^2` and `10^4`.
pub fn ogda_baseline() -> Result<(f64, f64)> {
    let game = make_a_delta(0.01)?;
    let mut at_100 = f64::NAN;
    let mut at_10k = f64::NAN;
    simulate(&game, &DynamicsConfig::ogda(0.1, 10_000)?, |s| {
        if s.t == 100 {
            at_100 = s.gap_sum / 100.0;
        }
        if s.t == 10_000 {
            at_10k = s.gap_sum / 10_000.0;
        }
    })?;
    Ok((at_100, at_10k))
}

fn best_iterate_suite() -> Result<SuiteReport> {
    let m = measure_best_iterate(&BEST_ITERATE_DELTAS, BEST_ITERATE_HORIZON)?;
    let mut checks: Vec<Check> = m
        .worst_ratio
        .iter()
        .map(|(d, r)| Check::at_most(format!("max best(T)/(5 T^(-1/6)) over T >= 1e3, delta={d}"), *r, 1.0))
        .collect();
    checks.push(Check::at_most("envelope log-log slope", m.envelope_slope, -0.15));
    checks.push(Check::at_most(
        "regret identity residual per step",
        m.regret_residual_per_step,
        REGRET_IDENTITY_TOLERANCE,
    ));
    let (early, late) = ogda_baseline()?;
    checks.push(Check::at_most("OGDA avg gap ratio T=1e4 / T=1e2", late / early, 0.2));
    Ok(SuiteReport {
        suite: Suite::BestIterate,
        checks,
        artifacts: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!(Suite::parse_selection("all").unwrap().len(), 6);
        assert!(Suite::parse_selection("bogus").is_err());
    }

    #[test]
    fn checkpoints_are_log_spaced() {
        let c = log_checkpoints(1000, 1_000_000);
        assert_eq!(c.first(), Some(&1000));
        assert_eq!(c.last(), Some(&1_000_000));
        assert_eq!(c.len(), 31);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..10).map(|k| (k as f64, -0.5 * k as f64 + 2.0)).collect();
        assert!((least_squares_slope(&pts) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn check_display() {
        let c = Check::at_most("x", 0.5, 1.0);
        assert!(c.passed);
        assert!(c.to_string().starts_with("PASS x"));
        assert!(!Check::within("r", 4.0, 1.3, 3.0).passed);
    }
}
