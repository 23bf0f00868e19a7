//! Config-driven scenario runner producing plot-ready ledgers.

pub mod config;
pub mod runner;
pub mod sweep;
pub mod table;

pub use config::{parse_config, ConfigError, ScenarioConfig};
pub use runner::{run_scenario, RunError, RunOutput};

/// Exit codes of the binary.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

/// Human-readable list of model kinds and their keys.
pub fn models_help() -> String {
    let mut s = String::new();
    for name in config::MODEL_NAMES {
        let m = config::ModelName::parse(name).unwrap();
        let keys: Vec<String> = m
            .scalar_params()
            .iter()
            .map(|(k, d)| if d.is_finite() { format!("{k}={d}") } else { format!("{k}=(derived)") })
            .collect();
        s.push_str(&format!("{name}\n  params: {}\n", keys.join(", ")));
        if let Some((lk, spec)) = m.list_param() {
            let keys: Vec<String> = spec.iter().map(|(k, d)| format!("{k}={d}")).collect();
            s.push_str(&format!("  params.{lk}: list of {{{}}}\n", keys.join(", ")));
        }
        s.push_str(&format!("  cutoffs: {} default {:?}\n", m.cutoff_help(), m.default_cutoffs()));
        s.push_str(&format!("  sweep axes: {}\n", config::sweep_axes(m).join(", ")));
    }
    s.push_str(&format!("top-level keys: {} (only \"model\" is required)\n", config::TOP_KEYS.join(", ")));
    s
}
