//! Parameter sweeps evaluated in parallel with deterministic ordering.

use crate::config::ScenarioConfig;
use crate::runner::{run_scenario, sweep_points, RunOutput, RunResult};
use crate::table::{format_value, render};
use rayon::prelude::*;
use std::path::Path;

/// Worker count from `NONCONJ_THREADS`, or rayon's default when unset or invalid.
pub fn thread_cap() -> Option<usize> {
    std::env::var("NONCONJ_THREADS").ok()?.trim().parse::<usize>().ok().filter(|&n| n > 0)
}

/// Run every sweep point; results are sorted by axis value.
pub fn run_sweep(cfg: &ScenarioConfig, axis: &str, values: &[f64]) -> RunResult<Vec<(f64, RunOutput)>> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let points = sweep_points(cfg, axis, &sorted)?;
    let run = || points.par_iter().map(run_scenario).collect::<RunResult<Vec<_>>>();
    let outs = match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| crate::RunError::Scenario(e.to_string()))?.install(run)?,
        None => run()?,
    };
    Ok(sorted.into_iter().zip(outs).collect())
}

/// Summary table: one row per sweep value holding the final ledger sample.
pub fn summary(axis: &str, results: &[(f64, RunOutput)]) -> String {
    let mut s = String::new();
    if let Some((_, first)) = results.first() {
        s.push_str(&format!("# nonconj {} sweep over {axis}; each row is the last ledger sample\n", env!("CARGO_PKG_VERSION")));
        s.push_str(&format!("# base config: {}\n", first.config.echo));
        s.push_str(&format!("{axis},{}\n", first.config.columns.join(",")));
    }
    for (v, out) in results {
        let last = out.ledger.rows.last().expect("ledger has rows");
        let vals: Vec<String> = out.config.columns.iter().map(|c| format_value(last.get(c).unwrap())).collect();
        s.push_str(&format!("{},{}\n", format_value(*v), vals.join(",")));
    }
    s
}

pub fn write_sweep(dir: &Path, axis: &str, results: &[(f64, RunOutput)]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (k, (_, out)) in results.iter().enumerate() {
        std::fs::write(dir.join(format!("point_{k:03}.csv")), render(out))?;
    }
    std::fs::write(dir.join("sweep.csv"), summary(axis, results))
}
