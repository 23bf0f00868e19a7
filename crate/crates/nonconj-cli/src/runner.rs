//! Scenario execution: bundle, initial state, propagation, ledger and convergence gate.

use crate::config::{BathState, GridSpec, InitialState, ModelName, ScenarioConfig};
use nonconj::dynamics::{propagate_with, Grid};
use nonconj::models::{
    build_caldeira_leggett, build_harmonic_dipole_mode, build_independent_boson, build_jaynes_cummings, build_rabi, BathOscillator,
    BosonMode, CaldeiraLeggettParams, Gauge, HarmonicParams, IndependentBosonParams, JcParams, ModelBundle, RabiParams,
};
use nonconj::operator::{c64, DensityOperator, Operator};
use nonconj::thermo::{LedgerBuilder, LedgerOptions, ThermoLedger};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Model(#[from] nonconj::Error),
    #[error("{0}")]
    Scenario(String),
}

pub type RunResult<T> = std::result::Result<T, RunError>;

fn get(cfg: &ScenarioConfig, k: &str) -> f64 {
    cfg.param(k).unwrap_or(f64::NAN)
}

fn entry(e: &[(String, f64)], k: &str) -> f64 {
    e.iter().find(|(n, _)| n == k).map(|(_, v)| *v).unwrap_or(f64::NAN)
}

pub fn build_bundle(cfg: &ScenarioConfig) -> RunResult<ModelBundle> {
    let c = &cfg.cutoffs;
    let b = match cfg.model {
        ModelName::Harmonic => {
            let p = HarmonicParams {
                mass: get(cfg, "mass"),
                omega_m: get(cfg, "omega_m"),
                omega: get(cfg, "omega"),
                eta: get(cfg, "eta"),
                volume: get(cfg, "volume"),
                t0: get(cfg, "t0"),
                s: get(cfg, "s"),
            };
            build_harmonic_dipole_mode(&p, (c[0], c[1]))?
        }
        ModelName::JaynesCummings => build_jaynes_cummings(&JcParams { omega: get(cfg, "omega"), eta: get(cfg, "eta") }, c[0])?,
        ModelName::RabiX2 | ModelName::RabiY2 => {
            let a2 = get(cfg, "a2_coefficient");
            let p = RabiParams {
                omega_m: get(cfg, "omega_m"),
                delta: get(cfg, "delta"),
                omega: get(cfg, "omega"),
                eta: get(cfg, "eta"),
                a2_coefficient: a2.is_finite().then_some(a2),
            };
            let gauge = if cfg.model == ModelName::RabiX2 { Gauge::X2 } else { Gauge::Y2 };
            build_rabi(gauge, &p, c[0])?
        }
        ModelName::CaldeiraLeggett => {
            let p = CaldeiraLeggettParams {
                mass: get(cfg, "mass"),
                omega_a: get(cfg, "omega_a"),
                quartic: get(cfg, "quartic"),
                bath: cfg
                    .list
                    .iter()
                    .map(|e| BathOscillator { mass: entry(e, "mass"), omega: entry(e, "omega"), kappa: entry(e, "kappa") })
                    .collect(),
            };
            build_caldeira_leggett(&p, c)?
        }
        ModelName::IndependentBoson => {
            let p = IndependentBosonParams {
                omega_m: get(cfg, "omega_m"),
                drive: get(cfg, "drive"),
                modes: cfg.list.iter().map(|e| BosonMode { g: entry(e, "g"), omega: entry(e, "omega") }).collect(),
            };
            build_independent_boson(&p, c)?
        }
    };
    Ok(b)
}

/// Frame-X initial state of the scenario.
pub fn initial_state(cfg: &ScenarioConfig, bundle: &ModelBundle) -> RunResult<DensityOperator> {
    match &cfg.initial_state {
        InitialState::Thermal => Ok(bundle.thermal_product(cfg.gamma, cfg.beta)?),
        InitialState::Qubit { p_g, p_eg, bath } => {
            if bundle.system_dims() != [2] {
                return Err(RunError::Scenario("qubit initial state needs a two-level system".into()));
            }
            let pe = c64::new(p_eg.0, p_eg.1);
            // basis order (e, g)
            let rho_a = Operator::from_fn(&[2], |i, j| match (i, j) {
                (0, 0) => c64::new(1.0 - p_g, 0.0),
                (1, 1) => c64::new(*p_g, 0.0),
                (0, 1) => pe,
                _ => pe.conj(),
            });
            let rho_a = DensityOperator::new(rho_a)
                .map_err(|e| RunError::Scenario(format!("system populations p_g = {p_g}, p_eg = {pe} are not a state: {e}")))?;
            let rho_b = match bath {
                BathState::Thermal => bundle.bath_thermal(cfg.beta)?,
                BathState::Vacuum => {
                    let d: usize = bundle.bath_dims().iter().product();
                    let mut v = vec![0.0; d];
                    v[0] = 1.0;
                    DensityOperator::new(Operator::diagonal(&v, bundle.bath_dims()))?
                }
            };
            Ok(bundle.product_state(&rho_a, &rho_b)?)
        }
    }
}

pub fn grid(cfg: &ScenarioConfig, bundle: &ModelBundle) -> RunResult<Grid> {
    Ok(match cfg.grid {
        GridSpec::Steps(n) => Grid::new(cfg.t_end, n)?,
        GridSpec::PerPeriod(n) => Grid::per_period(cfg.t_end, n, bundle.omega_max())?,
    })
}

fn options(cfg: &ScenarioConfig) -> LedgerOptions {
    LedgerOptions { relative_entropies: cfg.relative_entropies, observational: cfg.observational_entropies }
}

/// Ledger of one configuration without convergence checks.
pub fn run_ledger(cfg: &ScenarioConfig) -> RunResult<(ModelBundle, Grid, ThermoLedger)> {
    let bundle = build_bundle(cfg)?;
    let rho0 = initial_state(cfg, &bundle)?;
    let grid = grid(cfg, &bundle)?;
    let ledger = ledger_on(&bundle, &rho0, grid, cfg.sample_every, cfg)?;
    Ok((bundle, grid, ledger))
}

fn ledger_on(bundle: &ModelBundle, rho0: &DensityOperator, grid: Grid, stride: usize, cfg: &ScenarioConfig) -> RunResult<ThermoLedger> {
    let mut lb = LedgerBuilder::new(bundle, cfg.beta, options(cfg))?;
    propagate_with(&bundle.as_hamiltonian(), rho0, grid, stride, |_, t, rho| lb.observe(t, rho))?;
    Ok(lb.finish())
}

/// Denominator floor for relative comparisons of columns that vanish identically.
pub const ABS_FLOOR: f64 = 1e-9;

/// max |a - b| / max(max |b|, floor), ignoring entries that are NaN in both.
pub fn relative_change(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().filter(|x| x.is_finite()).fold(0.0f64, |m, x| m.max(x.abs())).max(ABS_FLOOR);
    let mut worst = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        if x.is_nan() && y.is_nan() {
            continue;
        }
        let d = (x - y).abs();
        if d.is_nan() {
            return f64::INFINITY;
        }
        worst = worst.max(d);
    }
    worst / scale
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sensitivity {
    pub column: String,
    pub cutoff: Option<f64>,
    pub steps: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConvergenceStatus {
    NotChecked,
    Converged,
    Unconverged,
}

impl ConvergenceStatus {
    pub fn label(&self) -> &'static str {
        match self {
            Self::NotChecked => "not checked",
            Self::Converged => "converged",
            Self::Unconverged => "unconverged",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub status: ConvergenceStatus,
    pub tolerance: f64,
    pub sensitivities: Vec<Sensitivity>,
    pub notes: Vec<String>,
}

impl ConvergenceReport {
    pub fn summary(&self) -> String {
        let mut s = format!("{} (tolerance {:e}", self.status.label(), self.tolerance);
        let worst = |f: &dyn Fn(&Sensitivity) -> Option<f64>| {
            self.sensitivities.iter().filter_map(|x| f(x).map(|v| (v, x.column.as_str()))).fold(None, |m: Option<(f64, &str)>, (v, c)| match m {
                Some((w, _)) if w >= v => m,
                _ => Some((v, c)),
            })
        };
        if let Some((v, c)) = worst(&|x| x.cutoff) {
            s.push_str(&format!("; cutoff doubling {v:.3e} in {c}"));
        }
        if let Some((v, c)) = worst(&|x| Some(x.steps)) {
            s.push_str(&format!("; step halving {v:.3e} in {c}"));
        }
        s.push(')');
        for n in &self.notes {
            s.push_str("; ");
            s.push_str(n);
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub config: ScenarioConfig,
    pub bundle_params: Vec<(String, f64, &'static str)>,
    pub grid: Grid,
    pub ledger: ThermoLedger,
    pub convergence: ConvergenceReport,
}

fn doubled_cutoffs(cfg: &ScenarioConfig) -> ScenarioConfig {
    let mut c = cfg.clone();
    c.cutoffs = cfg.cutoffs.iter().map(|n| 2 * n).collect();
    c
}

fn halved_steps(cfg: &ScenarioConfig, grid: Grid) -> ScenarioConfig {
    let mut c = cfg.clone();
    c.grid = GridSpec::Steps(2 * grid.steps);
    c.sample_every = 2 * cfg.sample_every;
    c
}

fn compare(cfg: &ScenarioConfig, base: &ThermoLedger, other: &ThermoLedger) -> Vec<(String, f64)> {
    cfg.columns
        .iter()
        .filter(|c| c.as_str() != "t")
        .map(|c| (c.clone(), relative_change(&other.column(c).unwrap(), &base.column(c).unwrap())))
        .collect()
}

/// Run a scenario and, when enabled, the cutoff-doubling and step-halving checks.
pub fn run_scenario(cfg: &ScenarioConfig) -> RunResult<RunOutput> {
    let (bundle, grid, ledger) = run_ledger(cfg)?;
    let tol = cfg.convergence.tolerance;
    let mut report = ConvergenceReport { status: ConvergenceStatus::NotChecked, tolerance: tol, sensitivities: Vec::new(), notes: Vec::new() };
    if cfg.convergence.enabled {
        let fine = halved_steps(cfg, grid);
        let (_, _, fine_ledger) = run_ledger(&fine)?;
        let steps = compare(cfg, &ledger, &fine_ledger);
        let big = doubled_cutoffs(cfg);
        let cut = match run_ledger(&big) {
            Ok((_, _, l)) => Some(compare(cfg, &ledger, &l)),
            Err(RunError::Model(nonconj::Error::DimensionGuard { dim, limit })) => {
                report.notes.push(format!("cutoff doubling skipped: dimension {dim} exceeds {limit}"));
                None
            }
            Err(e) => return Err(e),
        };
        let mut ok = cut.is_some();
        for (k, (col, s)) in steps.iter().enumerate() {
            let c = cut.as_ref().map(|v| v[k].1);
            ok &= *s <= tol && c.is_none_or(|x| x <= tol);
            report.sensitivities.push(Sensitivity { column: col.clone(), cutoff: c, steps: *s });
        }
        report.status = if ok { ConvergenceStatus::Converged } else { ConvergenceStatus::Unconverged };
    }
    Ok(RunOutput {
        config: cfg.clone(),
        bundle_params: bundle.params.iter().map(|p| (p.name.clone(), p.value, p.unit)).collect(),
        grid,
        ledger,
        convergence: report,
    })
}

/// Check-only plan: dimensions, grid and the runs the convergence gate would add.
pub fn plan(cfg: &ScenarioConfig) -> RunResult<String> {
    let bundle = build_bundle(cfg)?;
    let grid = grid(cfg, &bundle)?;
    let dim: usize = bundle.dims.iter().product();
    let samples = grid.sample_steps(cfg.sample_every).len();
    let mut s = format!(
        "model {}\ndims {:?} (total {dim})\ngrid t_end {} steps {} dt {:.6e}\nsamples {samples}\ncolumns {}\n",
        cfg.model.as_str(),
        bundle.dims,
        grid.t_end,
        grid.steps,
        grid.dt(),
        cfg.columns.join(",")
    );
    for w in &bundle.warnings {
        s.push_str(&format!("warning {w}\n"));
    }
    if cfg.convergence.enabled {
        let big: Vec<usize> = cfg.cutoffs.iter().map(|n| 2 * n).collect();
        let big_dim: usize = big.iter().product::<usize>() * if bundle.system_dims() == [2] && cfg.model != ModelName::CaldeiraLeggett { 2 } else { 1 };
        s.push_str(&format!("convergence step halving: {} steps\n", 2 * grid.steps));
        if big_dim > nonconj::models::MAX_DIM {
            s.push_str(&format!("convergence cutoff doubling: {big:?} exceeds the dimension guard, output would be unconverged\n"));
        } else {
            s.push_str(&format!("convergence cutoff doubling: cutoffs {big:?} (total {big_dim})\n"));
        }
        s.push_str(&format!("convergence tolerance {:e}\n", cfg.convergence.tolerance));
    } else {
        s.push_str("convergence disabled\n");
    }
    if let Some(sw) = &cfg.sweep {
        s.push_str(&format!("sweep {} over {} values\n", sw.axis, sw.values.len()));
    }
    Ok(s)
}

/// One configuration per sweep value, axis applied.
pub fn sweep_points(cfg: &ScenarioConfig, axis: &str, values: &[f64]) -> RunResult<Vec<ScenarioConfig>> {
    values
        .iter()
        .map(|&v| {
            let mut c = cfg.clone();
            c.set_axis(axis, v).map_err(RunError::Scenario)?;
            c.sweep = None;
            c.echo = crate::config::echo(&c);
            Ok(c)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn zero_coupling_ledger_vanishes() {
        let cfg = parse_config(r#"{"model": "harmonic", "params": {"eta": 0}, "cutoffs": [6, 6], "t_end": 10, "steps": 200, "sample_every": 20}"#).unwrap();
        let out = run_scenario(&cfg).unwrap();
        for col in ["Q", "Qprime", "deltaQ", "W", "Wprime", "Sigma", "SigmaTilde", "SigmaPrime"] {
            let v = out.ledger.column(col).unwrap();
            assert!(v.iter().all(|x| x.abs() < 1e-9), "{col}: {v:?}");
        }
        assert_eq!(out.ledger.rows.len(), 11);
    }

    #[test]
    fn relative_change_cases() {
        assert_eq!(relative_change(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert!((relative_change(&[1.0, 2.2], &[1.0, 2.0]) - 0.1).abs() < 1e-12);
        assert_eq!(relative_change(&[f64::NAN], &[f64::NAN]), 0.0);
        assert_eq!(relative_change(&[f64::NAN], &[1.0]), f64::INFINITY);
    }

    #[test]
    fn qubit_state_must_be_positive() {
        let cfg = parse_config(r#"{"model": "jaynes_cummings", "t_end": 0, "steps": 1, "initial_state": {"kind": "qubit", "p_g": 0.5, "p_eg": 0.6}}"#).unwrap();
        assert!(matches!(run_scenario(&cfg), Err(RunError::Scenario(_))));
    }

    #[test]
    fn convergence_gate_labels_output() {
        let cfg = parse_config(
            r#"{"model": "jaynes_cummings", "params": {"eta": 0.01}, "cutoffs": [4], "t_end": 2, "steps": 100, "sample_every": 50,
                "initial_state": {"kind": "qubit", "p_g": 0.5, "bath": "vacuum"}, "convergence": {"enabled": true}}"#,
        )
        .unwrap();
        let out = run_scenario(&cfg).unwrap();
        assert_ne!(out.convergence.status, ConvergenceStatus::NotChecked);
        assert_eq!(out.convergence.sensitivities.len(), 16);
        let coarse = parse_config(r#"{"model": "harmonic", "cutoffs": [3, 3], "t_end": 8, "steps": 20, "sample_every": 5, "convergence": {"enabled": true}}"#).unwrap();
        assert_eq!(run_scenario(&coarse).unwrap().convergence.status, ConvergenceStatus::Unconverged);
    }
}
