use std::fs;
use std::path::{Path, PathBuf};

use oftrl_core::dynamics::{run_dynamics, Algorithm, Trajectory};
use oftrl_core::figure::{default_panels, run_panel, Panel, PanelSeries};
use oftrl_core::game::make_a_delta;
use oftrl_core::hardness::{
    bad_runs, detect_phases_global, detect_phases_initial, predict_bad_block, HardnessReport, PhaseReport,
};
use oftrl_core::io::{format_f64, to_csv_string, to_value, write_convergence_csv, write_trajectory_csv};
use oftrl_core::metrics::convergence_report;
use oftrl_core::verify::Suite;
use oftrl_core::{DynamicsConfig, Regularizer};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, GameSpec, SweepConfig};
use crate::svg;
use crate::CliError;

fn compute(e: oftrl_core::Error) -> CliError {
    CliError::Numeric(e.to_string())
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Reads a CSV that was just written and renders its plot next to it.
fn svg_from_csv(
    csv_path: &Path,
    svg_path: &Path,
    columns: (&str, &str, &str),
    title: &str,
    threshold: f64,
) -> Result<(), CliError> {
    let text = fs::read_to_string(csv_path).map_err(|e| CliError::Io(format!("{}: {e}", csv_path.display())))?;
    let data = svg::read_columns(&text, columns.0, columns.1, columns.2)
        .map_err(|e| CliError::Io(format!("{}: {e}", csv_path.display())))?;
    write_file(svg_path, &svg::render(&data, title, "average social dynamic regret", threshold))
}

fn gaps(traj: &Trajectory) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::with_capacity(traj.horizon());
    traj.for_each_step(|s| out.push(s.gap)).map_err(compute)?;
    Ok(out)
}

fn landmarks(game: &GameSpec, traj: &Trajectory, threshold: f64) -> Result<PhaseReport, CliError> {
    match game {
        GameSpec::ADelta { delta } => detect_phases_global(traj, *delta, threshold).map_err(compute),
        GameSpec::ADxdy { delta_x, delta_y } => {
            detect_phases_initial(traj, *delta_x, *delta_y, threshold).map_err(compute)
        }
        GameSpec::Explicit { .. } => Ok(PhaseReport {
            t1: None,
            t2: None,
            ty: None,
            tm: None,
            tx: None,
            gap_threshold: threshold,
            bad_runs: bad_runs(&gaps(traj)?, threshold).map_err(compute)?,
        }),
    }
}

/// Block prediction for OFTRL on `A_delta`; null elsewhere or when the
/// preconditions of the prediction fail.
fn prediction(game: &GameSpec, dynamics: &DynamicsConfig) -> Value {
    match game {
        GameSpec::ADelta { delta } if dynamics.algorithm == Algorithm::Oftrl => {
            predict_bad_block(dynamics.regularizer, dynamics.eta, *delta, oftrl_core::hardness::DEFAULT_C3)
                .map_or(Value::Null, |p| to_value(&p))
        }
        _ => Value::Null,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub summary: Value,
}

/// Runs one experiment and writes its artifacts under `out`. Nothing is
/// written unless the config is valid and the run completes.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutcome, CliError> {
    let resolved = cfg.resolve()?;
    let traj = run_dynamics(&resolved.game, &resolved.dynamics).map_err(compute)?;
    let report = convergence_report(&traj);
    let finals = report.final_values();
    let threshold = cfg.outputs.gap_threshold;
    let summary = json!({
        "config": to_value(cfg),
        "best_gap": traj.summary.best_gap,
        "best_t": traj.summary.best_t,
        "avg_gap": finals.avg_gap,
        "last_gap": finals.last_gap,
        "landmarks": to_value(&landmarks(&cfg.game, &traj, threshold)?),
        "prediction": prediction(&cfg.game, &resolved.dynamics),
    });
    let traj_csv = to_csv_string(|w| write_trajectory_csv(&traj, w));
    let conv_csv = to_csv_string(|w| write_convergence_csv(&report, w));
    let json_text = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";

    let o = &cfg.outputs;
    write_file(&out.join(&o.csv), &traj_csv)?;
    write_file(&out.join(&o.convergence_csv), &conv_csv)?;
    write_file(&out.join(&o.json), &json_text)?;
    if let Some(path) = &o.svg {
        svg_from_csv(
            &out.join(&o.convergence_csv),
            &out.join(path),
            ("t", "avg_gap", "last_gap"),
            &resolved.dynamics.label(),
            threshold,
        )?;
    }
    Ok(RunOutcome { summary })
}

pub fn cmd_run(config: &Path, out: &Path) -> Result<(), CliError> {
    let cfg: ExperimentConfig = crate::config::load(config)?;
    let outcome = run_experiment(&cfg, out)?;
    let s = &outcome.summary;
    println!(
        "best_gap {} at t={}  avg_gap {}  last_gap {}",
        s["best_gap"], s["best_t"], s["avg_gap"], s["last_gap"]
    );
    Ok(())
}

pub fn cmd_sweep(config: &Path, out: &Path) -> Result<(), CliError> {
    let sweep: SweepConfig = crate::config::load(config)?;
    let runs = sweep.expand()?;
    let dirs: Vec<PathBuf> = (0..runs.len()).map(|i| out.join(format!("run_{i:03}"))).collect();
    let results: Vec<Result<RunOutcome, CliError>> = runs
        .par_iter()
        .zip(&dirs)
        .map(|(cfg, dir)| run_experiment(cfg, dir))
        .collect();

    let mut index = String::from("run,game,algorithm,eta,horizon,best_gap,best_t,avg_gap,last_gap\n");
    let mut first_error = None;
    for (i, (cfg, result)) in runs.iter().zip(results).enumerate() {
        match result {
            Ok(outcome) => {
                let s = &outcome.summary;
                let num = |k: &str| s[k].as_f64().map_or("nan".into(), format_f64);
                let dynamics = cfg.algorithm.build()?;
                index.push_str(&format!(
                    "run_{i:03},{},{},{},{},{},{},{},{}\n",
                    game_label(&cfg.game),
                    dynamics.label(),
                    format_f64(dynamics.eta),
                    dynamics.horizon,
                    num("best_gap"),
                    s["best_t"],
                    num("avg_gap"),
                    num("last_gap"),
                ));
            }
            Err(e) => {
                eprintln!("run_{i:03}: {e}");
                first_error.get_or_insert(e);
            }
        }
    }
    write_file(&out.join("sweep.csv"), &index)?;
    println!("{} runs written to {}", dirs.len(), out.display());
    first_error.map_or(Ok(()), Err)
}

fn game_label(game: &GameSpec) -> String {
    match game {
        GameSpec::ADelta { delta } => format!("a_delta({delta})"),
        GameSpec::ADxdy { delta_x, delta_y } => format!("a_dxdy({delta_x};{delta_y})"),
        GameSpec::Explicit { entries } => format!("explicit({}x{})", entries.len(), entries.first().map_or(0, Vec::len)),
    }
}

fn panel_key(panel: &Panel) -> &'static str {
    match (panel.algorithm, panel.regularizer) {
        (Algorithm::Ogda, _) => "ogda",
        (_, Regularizer::Entropy) => "entropy",
        (_, Regularizer::SqEuclid) => "sq_euclid",
        (_, Regularizer::LogBarrier) => "log_barrier",
        (_, Regularizer::Tsallis { .. }) => "tsallis",
    }
}

/// Applies `name=N` overrides to the default panel horizons.
pub fn figure_panels(overrides: &[String]) -> Result<Vec<Panel>, CliError> {
    let mut panels = default_panels();
    for o in overrides {
        let (name, value) = o
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--horizon expects name=N, got '{o}'")))?;
        let horizon: usize = value
            .parse()
            .ok()
            .filter(|h| *h > 0)
            .ok_or_else(|| CliError::Usage(format!("--horizon {name}: '{value}' is not a positive integer")))?;
        let panel = panels
            .iter_mut()
            .find(|p| panel_key(p) == name)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "--horizon: unknown panel '{name}' (ogda, log_barrier, entropy, tsallis, sq_euclid)"
                ))
            })?;
        panel.horizon = horizon;
    }
    Ok(panels)
}

fn panel_csv(series: &PanelSeries) -> String {
    let mut s = String::from("t,avg_regret,gap\n");
    for (i, (a, g)) in series.avg_regret.iter().zip(&series.gap).enumerate() {
        s.push_str(&format!("{},{},{}\n", i + 1, format_f64(*a), format_f64(*g)));
    }
    s
}

pub fn cmd_figure1(delta: f64, eta: f64, overrides: &[String], out: &Path) -> Result<(), CliError> {
    let game = make_a_delta(delta).map_err(|e| CliError::Usage(format!("--delta: {e}")))?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(CliError::Usage(format!("--eta must be positive, got {eta}")));
    }
    let panels = figure_panels(overrides)?;
    let threshold = oftrl_core::hardness::DEFAULT_GAP_THRESHOLD;
    let results: Vec<Result<Value, CliError>> = panels
        .par_iter()
        .map(|panel| {
            let series = run_panel(&game, panel, eta).map_err(compute)?;
            let csv_path = out.join(format!("{}.csv", series.label));
            write_file(&csv_path, &panel_csv(&series))?;
            svg_from_csv(
                &csv_path,
                &out.join(format!("{}.svg", series.label)),
                ("t", "avg_regret", "gap"),
                &format!("{} on A_delta, delta = {delta}, eta = {eta}", series.label),
                threshold,
            )?;
            let longest = bad_runs(&series.gap, threshold)
                .map_err(compute)?
                .into_iter()
                .fold(None, |best: Option<(usize, usize)>, r| match best {
                    Some((s, e)) if e - s >= r.end - r.start => Some((s, e)),
                    _ => Some((r.start, r.end)),
                });
            Ok(json!({
                "label": series.label,
                "horizon": panel.horizon,
                "final_avg_regret": series.final_avg_regret(),
                "longest_bad_run": longest.map(|(s, e)| json!({"start": s, "end": e})),
            }))
        })
        .collect();
    let panels_json = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    for p in &panels_json {
        println!("{:<24} T={:<8} final avg regret {}", p["label"].as_str().unwrap_or(""), p["horizon"], p["final_avg_regret"]);
    }
    let summary = json!({ "delta": delta, "eta": eta, "gap_threshold": threshold, "panels": panels_json });
    write_file(
        &out.join("figure1.json"),
        &(serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"),
    )
}

pub struct PredictArgs {
    pub regularizer: Regularizer,
    pub eta: f64,
    pub delta: f64,
    pub c3: f64,
    pub horizon: Option<usize>,
}

pub fn cmd_predict(args: &PredictArgs, out: Option<&Path>) -> Result<(), CliError> {
    let usage = |e: oftrl_core::Error| CliError::Usage(e.to_string());
    let prediction = predict_bad_block(args.regularizer, args.eta, args.delta, args.c3).map_err(usage)?;
    let report = match args.horizon {
        Some(h) => {
            let game = make_a_delta(args.delta).map_err(usage)?;
            let cfg = DynamicsConfig::new(Algorithm::Oftrl, args.regularizer, args.eta, h).map_err(usage)?;
            let traj = run_dynamics(&game, &cfg).map_err(compute)?;
            let phases = detect_phases_global(&traj, args.delta, oftrl_core::hardness::DEFAULT_GAP_THRESHOLD)
                .map_err(compute)?;
            to_value(&HardnessReport {
                prediction: Some(prediction),
                phases,
            })
        }
        None => json!({ "prediction": to_value(&prediction) }),
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    print!("{text}");
    if let Some(dir) = out {
        write_file(&dir.join("prediction.json"), &text)?;
    }
    Ok(())
}

/// Returns whether every check passed.
pub fn cmd_verify(selection: &str, out: Option<&Path>) -> Result<bool, CliError> {
    let suites = Suite::parse_selection(selection).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut all_passed = true;
    let mut reports = Vec::new();
    for suite in suites {
        let report = suite.run().map_err(compute)?;
        println!("suite {suite}");
        for check in &report.checks {
            println!("  {check}");
        }
        all_passed &= report.passed();
        if let Some(dir) = out {
            for a in &report.artifacts {
                write_file(&dir.join(suite.name()).join(&a.name), &a.contents)?;
            }
        }
        reports.push(report);
    }
    let (passed, total) = reports.iter().flat_map(|r| &r.checks).fold((0, 0), |(p, n), c| (p + c.passed as usize, n + 1));
    println!("{passed}/{total} checks passed");
    if let Some(dir) = out {
        let text = serde_json::to_string_pretty(&to_value(&reports)).expect("report serializes") + "\n";
        write_file(&dir.join("verify.json"), &text)?;
    }
    Ok(all_passed)
}
