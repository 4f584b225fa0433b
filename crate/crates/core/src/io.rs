//! CSV and JSON emitters. Numbers are written with 17 significant digits so
//! output is reproducible byte for byte.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::{json, Value};

use crate::dynamics::Trajectory;
use crate::metrics::ConvergenceReport;

pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Columns `t, x0.., y0.., gap`, one row per recorded iteration.
pub fn write_trajectory_csv(traj: &Trajectory, mut w: impl Write) -> io::Result<()> {
    let mut header = vec!["t".to_string()];
    header.extend((0..traj.game.d1()).map(|i| format!("x{i}")));
    header.extend((0..traj.game.d2()).map(|j| format!("y{j}")));
    header.push("gap".into());
    writeln!(w, "{}", header.join(","))?;
    for r in &traj.records {
        let mut row = vec![r.t.to_string()];
        row.extend(r.x.probs().iter().chain(r.y.probs()).map(|v| format_f64(*v)));
        row.push(format_f64(r.gap));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Columns `t, value`.
pub fn write_series_csv(series: &[(usize, f64)], value_name: &str, mut w: impl Write) -> io::Result<()> {
    writeln!(w, "t,{value_name}")?;
    for (t, v) in series {
        writeln!(w, "{t},{}", format_f64(*v))?;
    }
    Ok(())
}

/// Columns `t, last_gap, avg_gap, best_gap`.
pub fn write_convergence_csv(report: &ConvergenceReport, mut w: impl Write) -> io::Result<()> {
    writeln!(w, "t,last_gap,avg_gap,best_gap")?;
    let rows = report
        .last_gap_series
        .iter()
        .zip(&report.random_avg_series)
        .zip(&report.best_series);
    for (((t, last), (_, avg)), (_, best)) in rows {
        writeln!(w, "{t},{},{},{}", format_f64(*last), format_f64(*avg), format_f64(*best))?;
    }
    Ok(())
}

pub fn to_csv_string(write: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> String {
    let mut buf = Vec::new();
    write(&mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

/// Config echo, final iterate, best gap with its iteration, and gap sum.
pub fn trajectory_summary(traj: &Trajectory) -> Value {
    let s = &traj.summary;
    json!({
        "config": to_value(&traj.config),
        "game": traj.game.to_rows(),
        "final_iterate": {
            "t": s.final_iterate.t,
            "x": s.final_iterate.x,
            "y": s.final_iterate.y,
            "gap": s.final_iterate.gap,
        },
        "best_gap": s.best_gap,
        "best_t": s.best_t,
        "gap_sum": s.gap_sum,
        "avg_gap": s.gap_sum / traj.horizon() as f64,
    })
}

pub fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{run_dynamics, DynamicsConfig};
    use crate::game::make_a_delta;
    use crate::metrics::convergence_report;

    #[test]
    fn trajectory_csv_layout() {
        let traj = run_dynamics(&make_a_delta(0.1).unwrap(), &DynamicsConfig::omwu(0.1, 3).unwrap()).unwrap();
        let csv = to_csv_string(|w| write_trajectory_csv(&traj, w));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,x0,x1,y0,y1,gap");
        assert_eq!(lines.len(), 4);
        assert_eq!(
            lines[1],
            "1,5.0000000000000000e-1,5.0000000000000000e-1,5.0000000000000000e-1,5.0000000000000000e-1,2.5000000000000000e-1"
        );
        let report = csv_report(&traj);
        assert!(report.starts_with("t,last_gap,avg_gap,best_gap\n1,"));
    }

    fn csv_report(traj: &Trajectory) -> String {
        to_csv_string(|w| write_convergence_csv(&convergence_report(traj), w))
    }

    #[test]
    fn summary_keys() {
        let traj = run_dynamics(&make_a_delta(0.1).unwrap(), &DynamicsConfig::omwu(0.1, 10).unwrap()).unwrap();
        let v = trajectory_summary(&traj);
        assert_eq!(v["config"]["regularizer"]["kind"], "entropy");
        assert_eq!(v["config"]["algorithm"], "oftrl");
        assert_eq!(v["final_iterate"]["t"], 10);
        assert!(v["best_gap"].as_f64().unwrap() <= v["avg_gap"].as_f64().unwrap());
    }
}
