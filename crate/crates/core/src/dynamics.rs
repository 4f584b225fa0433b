//! OFTRL, OOMD and OGDA iterate generators with uniform initialization and
//! constant step size.
//!
//! Iteration `t = 1` plays uniform strategies. For `t >= 2`:
//!
//! * OFTRL: `x^t = argmin <x, L^{t-1} + l^{t-1}> + R(x)/eta`, likewise for y;
//! * OOMD: `zhat^t = argmin eta<z, F(z^{t-1})> + D_R(z, zhat^{t-1})` followed by
//!   `z^t = argmin eta<z, F(z^{t-1})> + D_R(z, zhat^t)`;
//! * OGDA: OOMD with the squared Euclidean regularizer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{gap_unchecked, MatrixGame};
use crate::regularizers::Regularizer;
use crate::simplex::SimplexPoint;

pub use crate::simplex::project_simplex;

/// Horizon above which trajectories are subsampled by default.
pub const FULL_RESOLUTION_LIMIT: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Oftrl,
    Oomd,
    Ogda,
}

impl Algorithm {
    pub fn uses_hat(&self) -> bool {
        !matches!(self, Algorithm::Oftrl)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Oftrl => "oftrl",
            Algorithm::Oomd => "oomd",
            Algorithm::Ogda => "ogda",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DynamicsConfig {
    pub algorithm: Algorithm,
    /// Ignored by OGDA, which always uses the squared Euclidean norm.
    pub regularizer: Regularizer,
    pub eta: f64,
    pub horizon: usize,
    pub record_stride: usize,
    /// Run 2x2 OFTRL through the scalar response map instead of the
    /// general simplex argmin.
    pub use_scalar_2x2: bool,
}

impl DynamicsConfig {
    pub fn new(algorithm: Algorithm, regularizer: Regularizer, eta: f64, horizon: usize) -> Result<Self> {
        let config = Self {
            algorithm,
            regularizer,
            eta,
            horizon,
            record_stride: default_stride(horizon),
            use_scalar_2x2: false,
        };
        config.validate()?;
        Ok(config)
    }

    /// OMWU, i.e. entropy-regularized OFTRL.
    pub fn omwu(eta: f64, horizon: usize) -> Result<Self> {
        Self::new(Algorithm::Oftrl, Regularizer::Entropy, eta, horizon)
    }

    pub fn ogda(eta: f64, horizon: usize) -> Result<Self> {
        Self::new(Algorithm::Ogda, Regularizer::SqEuclid, eta, horizon)
    }

    pub fn with_stride(mut self, stride: usize) -> Result<Self> {
        self.record_stride = stride;
        self.validate()?;
        Ok(self)
    }

    pub fn with_scalar_2x2(mut self, scalar: bool) -> Self {
        self.use_scalar_2x2 = scalar;
        self
    }

    pub fn with_horizon(mut self, horizon: usize) -> Result<Self> {
        self.horizon = horizon;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::Config(format!("step size must be positive, got {}", self.eta)));
        }
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if self.record_stride == 0 {
            return Err(Error::Config("record stride must be at least 1".into()));
        }
        if self.algorithm == Algorithm::Ogda && self.regularizer != Regularizer::SqEuclid {
            return Err(Error::Config(format!(
                "OGDA is defined with the squared Euclidean norm, not {}",
                self.regularizer.name()
            )));
        }
        if self.use_scalar_2x2 && self.algorithm != Algorithm::Oftrl {
            return Err(Error::Config("the scalar 2x2 path exists only for OFTRL".into()));
        }
        self.regularizer.validate().map_err(|e| Error::Config(e.to_string()))
    }

    /// Short label such as `oftrl-entropy` or `ogda`.
    pub fn label(&self) -> String {
        match self.algorithm {
            Algorithm::Ogda => "ogda".into(),
            a => format!("{a}-{}", self.regularizer.name()),
        }
    }
}

/// Stride 1 up to [`FULL_RESOLUTION_LIMIT`] iterations, then `T / 10^5`.
pub fn default_stride(horizon: usize) -> usize {
    if horizon <= FULL_RESOLUTION_LIMIT {
        1
    } else {
        horizon.div_ceil(FULL_RESOLUTION_LIMIT)
    }
}

/// Running sum with Neumaier compensation, one slot per action.
#[derive(Debug, Clone, PartialEq)]
struct CompensatedVec {
    sum: Vec<f64>,
    comp: Vec<f64>,
}

impl CompensatedVec {
    fn new(init: &[f64]) -> Self {
        Self {
            sum: init.to_vec(),
            comp: vec![0.0; init.len()],
        }
    }

    fn add(&mut self, v: &[f64]) {
        for ((s, c), x) in self.sum.iter_mut().zip(self.comp.iter_mut()).zip(v) {
            let t = *s + x;
            if s.abs() >= x.abs() {
                *c += (*s - t) + x;
            } else {
                *c += (x - t) + *s;
            }
            *s = t;
        }
    }

    fn value(&self) -> Vec<f64> {
        self.sum.iter().zip(&self.comp).map(|(s, c)| s + c).collect()
    }
}

/// State of both players after iteration `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointIterate {
    pub t: usize,
    pub x: SimplexPoint,
    pub y: SimplexPoint,
    /// OOMD auxiliary points; absent for OFTRL.
    pub x_hat: Option<SimplexPoint>,
    pub y_hat: Option<SimplexPoint>,
    cum_x: CompensatedVec,
    cum_y: CompensatedVec,
    /// `l^t_x = A y^t`.
    pub prev_loss_x: Vec<f64>,
    /// `l^t_y = -A^T x^t`.
    pub prev_loss_y: Vec<f64>,
}

impl JointIterate {
    /// Uniform strategies at `t = 1` with their losses accumulated.
    pub fn initial(game: &MatrixGame, with_hat: bool) -> Self {
        let x = SimplexPoint::uniform(game.d1());
        let y = SimplexPoint::uniform(game.d2());
        let (x_hat, y_hat) = if with_hat {
            (Some(x.clone()), Some(y.clone()))
        } else {
            (None, None)
        };
        Self::from_points(game, 1, x, y, x_hat, y_hat)
    }

    /// A state at iteration `t` whose cumulative loss is just the loss of
    /// the given profile. Useful for single-step checks.
    pub fn from_points(
        game: &MatrixGame,
        t: usize,
        x: SimplexPoint,
        y: SimplexPoint,
        x_hat: Option<SimplexPoint>,
        y_hat: Option<SimplexPoint>,
    ) -> Self {
        let lx = game.loss_x(y.probs());
        let ly = game.loss_y(x.probs());
        Self {
            t,
            x,
            y,
            x_hat,
            y_hat,
            cum_x: CompensatedVec::new(&lx),
            cum_y: CompensatedVec::new(&ly),
            prev_loss_x: lx,
            prev_loss_y: ly,
        }
    }

    /// Overrides the most recent loss vectors (the optimistic prediction).
    pub fn with_prev_losses(mut self, loss_x: Vec<f64>, loss_y: Vec<f64>) -> Self {
        self.prev_loss_x = loss_x;
        self.prev_loss_y = loss_y;
        self
    }

    /// `L^t_x`.
    pub fn cum_loss_x(&self) -> Vec<f64> {
        self.cum_x.value()
    }

    /// `L^t_y`.
    pub fn cum_loss_y(&self) -> Vec<f64> {
        self.cum_y.value()
    }

    pub fn gap(&self, game: &MatrixGame) -> f64 {
        gap_unchecked(game, self.x.probs(), self.y.probs())
    }

    fn advance(
        &self,
        game: &MatrixGame,
        x: SimplexPoint,
        y: SimplexPoint,
        x_hat: Option<SimplexPoint>,
        y_hat: Option<SimplexPoint>,
    ) -> Self {
        let lx = game.loss_x(y.probs());
        let ly = game.loss_y(x.probs());
        let mut cum_x = self.cum_x.clone();
        let mut cum_y = self.cum_y.clone();
        cum_x.add(&lx);
        cum_y.add(&ly);
        Self {
            t: self.t + 1,
            x,
            y,
            x_hat,
            y_hat,
            cum_x,
            cum_y,
            prev_loss_x: lx,
            prev_loss_y: ly,
        }
    }

    fn check_dims(&self, game: &MatrixGame) -> Result<()> {
        if self.x.len() != game.d1() || self.y.len() != game.d2() {
            return Err(Error::Domain(format!(
                "state of dimension {}x{} does not match a {}x{} game",
                self.x.len(),
                self.y.len(),
                game.d1(),
                game.d2()
            )));
        }
        Ok(())
    }
}

fn optimistic_input(cum: &CompensatedVec, prev: &[f64], eta: f64) -> Vec<f64> {
    cum.value().iter().zip(prev).map(|(l, p)| eta * (l + p)).collect()
}

/// One OFTRL iteration through the general simplex argmin.
pub fn step_oftrl(game: &MatrixGame, state: &JointIterate, reg: Regularizer, eta: f64) -> Result<JointIterate> {
    state.check_dims(game)?;
    let x = reg.argmin_linear(&optimistic_input(&state.cum_x, &state.prev_loss_x, eta))?;
    let y = reg.argmin_linear(&optimistic_input(&state.cum_y, &state.prev_loss_y, eta))?;
    Ok(state.advance(game, x, y, None, None))
}

/// `x^t[1] = F_{eta,R}(E^{t-1} + e^{t-1})` on the accumulated loss differences.
fn scalar_point(reg: Regularizer, eta: f64, cum: &CompensatedVec, prev: &[f64]) -> Result<SimplexPoint> {
    let l = cum.value();
    let e = (l[0] - l[1]) + (prev[0] - prev[1]);
    // Every regularizer here is symmetric, F(-e) = 1 - F(e); computing the
    // smaller coordinate directly keeps it accurate near the vertices.
    let first = reg.scalar_response(eta, e)?;
    let probs = if first <= 0.5 {
        vec![first, 1.0 - first]
    } else {
        let second = reg.scalar_response(eta, -e)?;
        vec![1.0 - second, second]
    };
    Ok(SimplexPoint::from_raw(probs))
}

/// One OFTRL iteration of a 2x2 game through the scalar response map.
pub fn step_oftrl_scalar_2x2(
    game: &MatrixGame,
    state: &JointIterate,
    reg: Regularizer,
    eta: f64,
) -> Result<JointIterate> {
    if game.d1() != 2 || game.d2() != 2 {
        return Err(Error::Domain("scalar OFTRL needs a 2x2 game".into()));
    }
    state.check_dims(game)?;
    let x = scalar_point(reg, eta, &state.cum_x, &state.prev_loss_x)?;
    let y = scalar_point(reg, eta, &state.cum_y, &state.prev_loss_y)?;
    Ok(state.advance(game, x, y, None, None))
}

/// One OOMD iteration: two mirror steps against `F(z^{t-1})`.
pub fn step_oomd(game: &MatrixGame, state: &JointIterate, reg: Regularizer, eta: f64) -> Result<JointIterate> {
    state.check_dims(game)?;
    let (Some(x_hat), Some(y_hat)) = (&state.x_hat, &state.y_hat) else {
        return Err(Error::Domain("OOMD needs the auxiliary points".into()));
    };
    let gx: Vec<f64> = state.prev_loss_x.iter().map(|l| eta * l).collect();
    let gy: Vec<f64> = state.prev_loss_y.iter().map(|l| eta * l).collect();
    let x_hat = reg.mirror_step(&gx, x_hat)?;
    let y_hat = reg.mirror_step(&gy, y_hat)?;
    let x = reg.mirror_step(&gx, &x_hat)?;
    let y = reg.mirror_step(&gy, &y_hat)?;
    Ok(state.advance(game, x, y, Some(x_hat), Some(y_hat)))
}

/// One OGDA iteration: Euclidean OOMD with simplex projections.
pub fn step_ogda(game: &MatrixGame, state: &JointIterate, eta: f64) -> Result<JointIterate> {
    step_oomd(game, state, Regularizer::SqEuclid, eta)
}

fn step(game: &MatrixGame, state: &JointIterate, config: &DynamicsConfig) -> Result<JointIterate> {
    match config.algorithm {
        Algorithm::Oftrl if config.use_scalar_2x2 => {
            step_oftrl_scalar_2x2(game, state, config.regularizer, config.eta)
        }
        Algorithm::Oftrl => step_oftrl(game, state, config.regularizer, config.eta),
        Algorithm::Oomd => step_oomd(game, state, config.regularizer, config.eta),
        Algorithm::Ogda => step_ogda(game, state, config.eta),
    }
}

/// Borrowed view of one iteration, handed to observers.
#[derive(Debug, Clone, Copy)]
pub struct StepView<'a> {
    pub t: usize,
    pub x: &'a SimplexPoint,
    pub y: &'a SimplexPoint,
    pub x_hat: Option<&'a SimplexPoint>,
    pub y_hat: Option<&'a SimplexPoint>,
    pub loss_x: &'a [f64],
    pub loss_y: &'a [f64],
    pub gap: f64,
    /// Smallest gap over `[1, t]`.
    pub best_gap: f64,
    /// Sum of gaps over `[1, t]`.
    pub gap_sum: f64,
}

impl StepView<'_> {
    pub fn to_record(&self) -> Record {
        Record {
            t: self.t,
            x: self.x.clone(),
            y: self.y.clone(),
            x_hat: self.x_hat.cloned(),
            y_hat: self.y_hat.cloned(),
            loss_x: self.loss_x.to_vec(),
            loss_y: self.loss_y.to_vec(),
            gap: self.gap,
            best_gap: self.best_gap,
            gap_sum: self.gap_sum,
        }
    }
}

/// Runs the dynamics for `config.horizon` iterations, calling `observer` at
/// every iteration. Returns the final state.
pub fn simulate(
    game: &MatrixGame,
    config: &DynamicsConfig,
    mut observer: impl FnMut(&StepView<'_>),
) -> Result<JointIterate> {
    config.validate()?;
    let mut state = JointIterate::initial(game, config.algorithm.uses_hat());
    let mut best_gap = f64::INFINITY;
    let mut gap_sum = 0.0;
    loop {
        let gap = state.gap(game);
        if !gap.is_finite() {
            return Err(Error::Numeric {
                iteration: state.t,
                residual: gap,
                message: "duality gap is not finite".into(),
            });
        }
        best_gap = best_gap.min(gap);
        gap_sum += gap;
        observer(&StepView {
            t: state.t,
            x: &state.x,
            y: &state.y,
            x_hat: state.x_hat.as_ref(),
            y_hat: state.y_hat.as_ref(),
            loss_x: &state.prev_loss_x,
            loss_y: &state.prev_loss_y,
            gap,
            best_gap,
            gap_sum,
        });
        if state.t >= config.horizon {
            return Ok(state);
        }
        state = step(game, &state, config).map_err(|e| match e {
            Error::Numeric { residual, message, .. } => Error::Numeric {
                iteration: state.t + 1,
                residual,
                message,
            },
            other => other,
        })?;
    }
}

/// One stored iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub t: usize,
    pub x: SimplexPoint,
    pub y: SimplexPoint,
    pub x_hat: Option<SimplexPoint>,
    pub y_hat: Option<SimplexPoint>,
    pub loss_x: Vec<f64>,
    pub loss_y: Vec<f64>,
    pub gap: f64,
    pub best_gap: f64,
    pub gap_sum: f64,
}

impl Record {
    pub fn view(&self) -> StepView<'_> {
        StepView {
            t: self.t,
            x: &self.x,
            y: &self.y,
            x_hat: self.x_hat.as_ref(),
            y_hat: self.y_hat.as_ref(),
            loss_x: &self.loss_x,
            loss_y: &self.loss_y,
            gap: self.gap,
            best_gap: self.best_gap,
            gap_sum: self.gap_sum,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub final_iterate: Record,
    pub best_gap: f64,
    /// First iteration attaining `best_gap`.
    pub best_t: usize,
    pub gap_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub game: MatrixGame,
    pub config: DynamicsConfig,
    /// Iterations `1, 1 + stride, 1 + 2 stride, ...` and always the last one.
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Trajectory {
    pub fn horizon(&self) -> usize {
        self.config.horizon
    }

    pub fn is_full_resolution(&self) -> bool {
        self.config.record_stride == 1
    }

    /// Visits every iteration, replaying the dynamics when the stored
    /// records are subsampled. Replays are exact since runs are deterministic.
    pub fn for_each_step(&self, mut f: impl FnMut(&StepView<'_>)) -> Result<()> {
        if self.is_full_resolution() {
            self.records.iter().for_each(|r| f(&r.view()));
            Ok(())
        } else {
            simulate(&self.game, &self.config, f).map(|_| ())
        }
    }

    /// Visits iterations `1..=last` only.
    pub fn for_each_step_until(&self, last: usize, mut f: impl FnMut(&StepView<'_>)) -> Result<()> {
        if self.is_full_resolution() {
            self.records.iter().take_while(|r| r.t <= last).for_each(|r| f(&r.view()));
            Ok(())
        } else {
            let config = self.config.with_horizon(last.clamp(1, self.horizon()))?;
            simulate(&self.game, &config, f).map(|_| ())
        }
    }

    /// The same run re-executed at stride 1.
    pub fn at_full_resolution(&self) -> Result<Trajectory> {
        if self.is_full_resolution() {
            return Ok(self.clone());
        }
        run_dynamics(&self.game, &self.config.with_stride(1)?)
    }

    pub fn final_record(&self) -> &Record {
        &self.summary.final_iterate
    }
}

/// Runs the configured dynamics from uniform strategies.
pub fn run_dynamics(game: &MatrixGame, config: &DynamicsConfig) -> Result<Trajectory> {
    config.validate()?;
    let threshold = 1.0 / (4.0 * config.regularizer.lipschitz());
    if config.algorithm != Algorithm::Ogda && config.eta > threshold {
        log::warn!(
            "step size {} exceeds 1/(4L) = {threshold} for {}; lower-bound guarantees do not apply",
            config.eta,
            config.regularizer.name()
        );
    }
    let stride = config.record_stride;
    let mut records = Vec::with_capacity(config.horizon / stride + 2);
    let mut best = (f64::INFINITY, 0usize);
    let mut last: Option<Record> = None;
    simulate(game, config, |step| {
        if step.gap < best.0 {
            best = (step.gap, step.t);
        }
        if (step.t - 1) % stride == 0 {
            records.push(step.to_record());
        } else if step.t == config.horizon {
            last = Some(step.to_record());
        }
    })?;
    records.extend(last);
    let final_iterate = records.last().cloned().expect("at least one iteration is recorded");
    let summary = Summary {
        best_gap: best.0,
        best_t: best.1,
        gap_sum: final_iterate.gap_sum,
        final_iterate,
    };
    Ok(Trajectory {
        game: game.clone(),
        config: *config,
        records,
        summary,
    })
}
