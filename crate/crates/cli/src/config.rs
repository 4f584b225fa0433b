//! TOML experiment configuration.

use std::path::{Path, PathBuf};

use oftrl_core::dynamics::{Algorithm, DynamicsConfig};
use oftrl_core::game::{make_a_delta, make_a_dxdy, MatrixGame};
use oftrl_core::hardness::DEFAULT_GAP_THRESHOLD;
use oftrl_core::Regularizer;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CONFIG_HELP: &str = "\
CONFIG FILE (TOML, unknown keys are rejected)

  [game]
  kind = \"a_delta\"            # a_delta | a_dxdy | explicit
  delta = 0.01                # a_delta: 0 < delta < 1/2
  # delta_x, delta_y          # a_dxdy
  # entries = [[0.5, 0.5], [0, 1]]   # explicit, losses in [0, 1]

  [algorithm]
  algorithm = \"oftrl\"         # oftrl | oomd | ogda | omwu (entropy oftrl)
  regularizer = \"entropy\"     # entropy | sq_euclid | log_barrier | tsallis
  # beta = 0.5                # tsallis only, 0 < beta < 1
  eta = 0.1
  horizon = 100000
  # record_stride = 1         # default 1 up to 1e5 iterations, then T/1e5

  [outputs]                   # paths are relative to --out
  csv = \"trajectory.csv\"
  convergence_csv = \"convergence.csv\"
  json = \"summary.json\"
  # svg = \"regret.svg\"        # average social dynamic regret plot
  gap_threshold = 0.1         # iterates with gap >= threshold are shaded red

  [sweep]                     # sweep command only; cartesian product
  # delta = [0.02, 0.01]      # a_delta games only
  # eta = [0.05, 0.1]
  # regularizer = [\"entropy\", \"log_barrier\"]
  # horizon = [1000, 10000]
";

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GameSpec {
    ADelta { delta: f64 },
    ADxdy { delta_x: f64, delta_y: f64 },
    Explicit { entries: Vec<Vec<f64>> },
}

impl GameSpec {
    pub fn build(&self) -> Result<MatrixGame, CliError> {
        let game = match self {
            GameSpec::ADelta { delta } => make_a_delta(*delta),
            GameSpec::ADxdy { delta_x, delta_y } => make_a_dxdy(*delta_x, *delta_y),
            GameSpec::Explicit { entries } => MatrixGame::new(entries.clone()),
        };
        game.map_err(|e| CliError::Usage(format!("game: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmName {
    Oftrl,
    Oomd,
    Ogda,
    Omwu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum RegularizerName {
    Entropy,
    SqEuclid,
    LogBarrier,
    Tsallis,
}

impl RegularizerName {
    pub fn with_beta(self, beta: Option<f64>) -> Result<Regularizer, CliError> {
        match (self, beta) {
            (RegularizerName::Tsallis, Some(b)) => {
                Regularizer::tsallis(b).map_err(|e| CliError::Usage(format!("algorithm.beta: {e}")))
            }
            (RegularizerName::Tsallis, None) => Err(CliError::Usage("algorithm.beta is required for tsallis".into())),
            (_, Some(_)) => Err(CliError::Usage("algorithm.beta applies only to tsallis".into())),
            (RegularizerName::Entropy, None) => Ok(Regularizer::Entropy),
            (RegularizerName::SqEuclid, None) => Ok(Regularizer::SqEuclid),
            (RegularizerName::LogBarrier, None) => Ok(Regularizer::LogBarrier),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub algorithm: AlgorithmName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularizer: Option<RegularizerName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub eta: f64,
    pub horizon: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_stride: Option<usize>,
}

impl AlgorithmSpec {
    pub fn build(&self) -> Result<DynamicsConfig, CliError> {
        let (algorithm, default_reg) = match self.algorithm {
            AlgorithmName::Oftrl | AlgorithmName::Omwu => (Algorithm::Oftrl, RegularizerName::Entropy),
            AlgorithmName::Oomd => (Algorithm::Oomd, RegularizerName::Entropy),
            AlgorithmName::Ogda => (Algorithm::Ogda, RegularizerName::SqEuclid),
        };
        let name = self.regularizer.unwrap_or(default_reg);
        if self.algorithm == AlgorithmName::Omwu && name != RegularizerName::Entropy {
            return Err(CliError::Usage("omwu uses the entropy regularizer".into()));
        }
        let reg = name.with_beta(self.beta)?;
        let usage = |e: oftrl_core::Error| CliError::Usage(format!("algorithm: {e}"));
        let mut config = DynamicsConfig::new(algorithm, reg, self.eta, self.horizon).map_err(usage)?;
        if let Some(stride) = self.record_stride {
            config = config.with_stride(stride).map_err(usage)?;
        }
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_csv")]
    pub csv: PathBuf,
    #[serde(default = "default_convergence_csv")]
    pub convergence_csv: PathBuf,
    #[serde(default = "default_json")]
    pub json: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
    #[serde(default = "default_gap_threshold")]
    pub gap_threshold: f64,
}

fn default_csv() -> PathBuf {
    "trajectory.csv".into()
}

fn default_convergence_csv() -> PathBuf {
    "convergence.csv".into()
}

fn default_json() -> PathBuf {
    "summary.json".into()
}

fn default_gap_threshold() -> f64 {
    DEFAULT_GAP_THRESHOLD
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            csv: default_csv(),
            convergence_csv: default_convergence_csv(),
            json: default_json(),
            svg: None,
            gap_threshold: default_gap_threshold(),
        }
    }
}

impl OutputSpec {
    fn validate(&self) -> Result<(), CliError> {
        if !(self.gap_threshold > 0.0 && self.gap_threshold.is_finite()) {
            return Err(CliError::Usage(format!(
                "outputs.gap_threshold must be positive, got {}",
                self.gap_threshold
            )));
        }
        let mut paths = vec![&self.csv, &self.convergence_csv, &self.json];
        paths.extend(self.svg.as_ref());
        for (i, p) in paths.iter().enumerate() {
            if p.as_os_str().is_empty() {
                return Err(CliError::Usage("outputs: empty path".into()));
            }
            if paths[..i].contains(p) {
                return Err(CliError::Usage(format!("outputs: {} is used twice", p.display())));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub game: GameSpec,
    pub algorithm: AlgorithmSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
}

/// A game and dynamics that passed validation.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub game: MatrixGame,
    pub dynamics: DynamicsConfig,
}

impl ExperimentConfig {
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        self.outputs.validate()?;
        Ok(Resolved {
            game: self.game.build()?,
            dynamics: self.algorithm.build()?,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub delta: Vec<f64>,
    #[serde(default)]
    pub eta: Vec<f64>,
    #[serde(default)]
    pub regularizer: Vec<RegularizerName>,
    #[serde(default)]
    pub horizon: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub game: GameSpec,
    pub algorithm: AlgorithmSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
    #[serde(default)]
    pub sweep: SweepSpec,
}

impl SweepConfig {
    /// One experiment per point of the product of the sweep lists, in
    /// lexicographic order (delta, eta, regularizer, horizon).
    pub fn expand(&self) -> Result<Vec<ExperimentConfig>, CliError> {
        let s = &self.sweep;
        if !s.delta.is_empty() && !matches!(self.game, GameSpec::ADelta { .. }) {
            return Err(CliError::Usage("sweep.delta needs game.kind = \"a_delta\"".into()));
        }
        let deltas: Vec<Option<f64>> = opt_list(&s.delta);
        let etas = opt_list(&s.eta);
        let regs = opt_list(&s.regularizer);
        let horizons = opt_list(&s.horizon);
        let mut out = Vec::new();
        for d in &deltas {
            for e in &etas {
                for r in &regs {
                    for h in &horizons {
                        let mut c = ExperimentConfig {
                            game: self.game.clone(),
                            algorithm: self.algorithm.clone(),
                            outputs: self.outputs.clone(),
                        };
                        if let Some(d) = d {
                            c.game = GameSpec::ADelta { delta: *d };
                        }
                        if let Some(e) = e {
                            c.algorithm.eta = *e;
                        }
                        if let Some(r) = r {
                            c.algorithm.regularizer = Some(*r);
                            if *r != RegularizerName::Tsallis {
                                c.algorithm.beta = None;
                            }
                        }
                        if let Some(h) = h {
                            c.algorithm.horizon = *h;
                        }
                        c.resolve()?;
                        out.push(c);
                    }
                }
            }
        }
        Ok(out)
    }
}

fn opt_list<T: Copy>(v: &[T]) -> Vec<Option<T>> {
    if v.is_empty() {
        vec![None]
    } else {
        v.iter().copied().map(Some).collect()
    }
}

pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}
