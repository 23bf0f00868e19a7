//! Scenario configuration: a JSON document validated against a fixed key set.

use serde_json::{Map, Value};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelName {
    Harmonic,
    JaynesCummings,
    RabiX2,
    RabiY2,
    CaldeiraLeggett,
    IndependentBoson,
}

pub const MODEL_NAMES: [&str; 6] = ["harmonic", "jaynes_cummings", "rabi_x2", "rabi_y2", "caldeira_leggett", "independent_boson"];

impl ModelName {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "harmonic" => Self::Harmonic,
            "jaynes_cummings" => Self::JaynesCummings,
            "rabi_x2" => Self::RabiX2,
            "rabi_y2" => Self::RabiY2,
            "caldeira_leggett" => Self::CaldeiraLeggett,
            "independent_boson" => Self::IndependentBoson,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Harmonic => "harmonic",
            Self::JaynesCummings => "jaynes_cummings",
            Self::RabiX2 => "rabi_x2",
            Self::RabiY2 => "rabi_y2",
            Self::CaldeiraLeggett => "caldeira_leggett",
            Self::IndependentBoson => "independent_boson",
        }
    }

    /// Scalar parameter keys with defaults.
    pub fn scalar_params(&self) -> &'static [(&'static str, f64)] {
        match self {
            Self::Harmonic => &[("mass", 1.0), ("omega_m", 1.0), ("omega", 1.0), ("eta", 0.5), ("volume", 1.0), ("t0", 5.0), ("s", 1.0)],
            Self::JaynesCummings => &[("omega", 1.0), ("eta", 0.01)],
            Self::RabiX2 | Self::RabiY2 => &[("omega_m", 1.0), ("delta", 0.0), ("omega", 1.0), ("eta", 0.1), ("a2_coefficient", f64::NAN)],
            Self::CaldeiraLeggett => &[("mass", 1.0), ("omega_a", 1.0), ("quartic", 0.0)],
            Self::IndependentBoson => &[("omega_m", 1.0), ("drive", 0.0)],
        }
    }

    /// Key of the list-valued parameter and the keys of its entries.
    pub fn list_param(&self) -> Option<(&'static str, &'static [(&'static str, f64)])> {
        match self {
            Self::CaldeiraLeggett => Some(("bath", &[("mass", 1.0), ("omega", 1.0), ("kappa", 0.2)])),
            Self::IndependentBoson => Some(("modes", &[("g", 0.4), ("omega", 1.0)])),
            _ => None,
        }
    }

    pub fn default_cutoffs(&self) -> Vec<usize> {
        match self {
            Self::Harmonic => vec![16, 16],
            Self::JaynesCummings | Self::RabiX2 | Self::RabiY2 => vec![12],
            Self::CaldeiraLeggett => vec![12, 12],
            Self::IndependentBoson => vec![16],
        }
    }

    pub fn cutoff_help(&self) -> &'static str {
        match self {
            Self::Harmonic => "[dipole, mode]",
            Self::JaynesCummings | Self::RabiX2 | Self::RabiY2 => "[mode]",
            Self::CaldeiraLeggett => "[system, bath_1, .., bath_K]",
            Self::IndependentBoson => "[mode_1, .., mode_K]",
        }
    }

    /// Whether the two-level system can be prepared from populations.
    pub fn has_qubit(&self) -> bool {
        matches!(self, Self::JaynesCummings | Self::RabiX2 | Self::RabiY2 | Self::IndependentBoson)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GridSpec {
    Steps(usize),
    PerPeriod(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub enum BathState {
    Thermal,
    Vacuum,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    /// System thermal at `gamma`, bath thermal at `beta`.
    Thermal,
    /// Two-level system with ground population `p_g` and coherence `p_eg`.
    Qubit { p_g: f64, p_eg: (f64, f64), bath: BathState },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub axis: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Convergence {
    pub enabled: bool,
    pub tolerance: f64,
    /// Exit with a runtime failure when the gate does not pass.
    pub require: bool,
}

impl Default for Convergence {
    fn default() -> Self {
        Self { enabled: false, tolerance: 1e-4, require: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub model: ModelName,
    /// Scalar parameters in declaration order, defaults filled in.
    pub params: Vec<(String, f64)>,
    /// Entries of the list-valued parameter, if the model has one.
    pub list: Vec<Vec<(String, f64)>>,
    pub cutoffs: Vec<usize>,
    pub t_end: f64,
    pub grid: GridSpec,
    pub sample_every: usize,
    pub beta: f64,
    pub gamma: f64,
    pub initial_state: InitialState,
    pub relative_entropies: bool,
    pub observational_entropies: bool,
    pub columns: Vec<String>,
    pub sweep: Option<Sweep>,
    pub output: Option<String>,
    pub convergence: Convergence,
    /// Canonical echo of the accepted document.
    pub echo: Value,
}

impl ScenarioConfig {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    /// Assign a sweepable quantity by name.
    pub fn set_axis(&mut self, axis: &str, value: f64) -> Result<(), String> {
        match axis {
            "beta" => self.beta = value,
            "gamma" => self.gamma = value,
            "t_end" => self.t_end = value,
            "p_g" | "p_eg" | "p_eg_im" => match &mut self.initial_state {
                InitialState::Qubit { p_g, p_eg, .. } => match axis {
                    "p_g" => *p_g = value,
                    "p_eg" => p_eg.0 = value,
                    _ => p_eg.1 = value,
                },
                InitialState::Thermal => return Err(format!("sweep axis '{axis}' needs a qubit initial state")),
            },
            _ => match self.params.iter_mut().find(|(k, _)| k == axis) {
                Some(slot) => slot.1 = value,
                None => {
                    let names = sweep_axes(self.model);
                    return Err(format!("unknown sweep axis '{axis}'{}", suggestion(axis, &names)));
                }
            },
        }
        Ok(())
    }
}

pub fn sweep_axes(model: ModelName) -> Vec<&'static str> {
    let mut v: Vec<&'static str> = model.scalar_params().iter().map(|(k, _)| *k).collect();
    v.extend(["beta", "gamma", "t_end"]);
    if model.has_qubit() {
        v.extend(["p_g", "p_eg", "p_eg_im"]);
    }
    v
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

pub const TOP_KEYS: [&str; 15] = [
    "model",
    "params",
    "cutoffs",
    "t_end",
    "steps",
    "steps_per_period",
    "sample_every",
    "beta",
    "gamma",
    "initial_state",
    "entropies",
    "columns",
    "sweep",
    "output",
    "convergence",
];

fn suggestion(key: &str, valid: &[&str]) -> String {
    let best = valid.iter().map(|v| (strsim::jaro_winkler(key, v), *v)).max_by(|a, b| a.0.total_cmp(&b.0));
    match best {
        Some((score, v)) if score >= 0.7 => format!(" (did you mean '{v}'?)"),
        _ => String::new(),
    }
}

struct Checker {
    errors: Vec<ConfigError>,
}

impl Checker {
    fn err(&mut self, path: &str, message: impl Into<String>) {
        self.errors.push(ConfigError { path: path.to_string(), message: message.into() });
    }

    fn unknown_keys(&mut self, obj: &Map<String, Value>, valid: &[&str], path: &str) {
        for k in obj.keys() {
            if !valid.contains(&k.as_str()) {
                let p = join(path, k);
                self.err(&p, format!("unknown key '{k}'{}", suggestion(k, valid)));
            }
        }
    }

    fn number(&mut self, v: &Value, path: &str) -> Option<f64> {
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.err(path, format!("expected a number, found {}", kind(v)));
                None
            }
        }
    }

    fn count(&mut self, v: &Value, path: &str, min: u64) -> Option<usize> {
        match v.as_u64() {
            Some(x) if x >= min => Some(x as usize),
            Some(x) => {
                self.err(path, format!("must be at least {min}, found {x}"));
                None
            }
            None => {
                self.err(path, format!("expected a non-negative integer, found {}", kind(v)));
                None
            }
        }
    }

    fn boolean(&mut self, v: &Value, path: &str) -> Option<bool> {
        match v.as_bool() {
            Some(b) => Some(b),
            None => {
                self.err(path, format!("expected true or false, found {}", kind(v)));
                None
            }
        }
    }

    fn object<'v>(&mut self, v: &'v Value, path: &str) -> Option<&'v Map<String, Value>> {
        match v.as_object() {
            Some(o) => Some(o),
            None => {
                self.err(path, format!("expected an object, found {}", kind(v)));
                None
            }
        }
    }

    fn params(&mut self, obj: &Map<String, Value>, spec: &[(&'static str, f64)], extra: &[&str], path: &str) -> Vec<(String, f64)> {
        let mut valid: Vec<&str> = spec.iter().map(|(k, _)| *k).collect();
        valid.extend_from_slice(extra);
        self.unknown_keys(obj, &valid, path);
        spec.iter()
            .map(|(k, d)| {
                let v = obj.get(*k).and_then(|v| self.number(v, &join(path, k))).unwrap_or(*d);
                (k.to_string(), v)
            })
            .collect()
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

/// Parse and validate a scenario; on failure every problem found is returned.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, Vec<ConfigError>> {
    let root: Value = serde_json::from_str(text).map_err(|e| vec![ConfigError { path: String::new(), message: format!("malformed JSON: {e}") }])?;
    let mut c = Checker { errors: Vec::new() };
    let Some(obj) = c.object(&root, "") else {
        return Err(c.errors);
    };
    c.unknown_keys(obj, &TOP_KEYS, "");

    let model = match obj.get("model") {
        None => {
            c.err("model", format!("missing required key; one of {}", MODEL_NAMES.join(", ")));
            None
        }
        Some(Value::String(s)) => match ModelName::parse(s) {
            Some(m) => Some(m),
            None => {
                c.err("model", format!("unknown model '{s}'{}", suggestion(s, &MODEL_NAMES)));
                None
            }
        },
        Some(v) => {
            c.err("model", format!("expected a string, found {}", kind(v)));
            None
        }
    };
    let Some(model) = model else {
        return Err(c.errors);
    };

    let mut params = model.scalar_params().iter().map(|(k, v)| (k.to_string(), *v)).collect::<Vec<_>>();
    let mut list = Vec::new();
    let mut list_len = 1;
    if let Some((_, lspec)) = model.list_param() {
        list = vec![lspec.iter().map(|(k, v)| (k.to_string(), *v)).collect::<Vec<_>>()];
    }
    if let Some(pv) = obj.get("params") {
        if let Some(po) = c.object(pv, "params") {
            let extra: Vec<&str> = model.list_param().map(|(k, _)| vec![k]).unwrap_or_default();
            params = c.params(po, model.scalar_params(), &extra, "params");
            if let Some((lk, lspec)) = model.list_param() {
                if let Some(lv) = po.get(lk) {
                    let lp = join("params", lk);
                    match lv.as_array() {
                        Some(items) if !items.is_empty() => {
                            list = items
                                .iter()
                                .enumerate()
                                .map(|(i, it)| {
                                    let ip = format!("{lp}[{i}]");
                                    match c.object(it, &ip) {
                                        Some(io) => c.params(io, lspec, &[], &ip),
                                        None => Vec::new(),
                                    }
                                })
                                .collect();
                            list_len = items.len();
                        }
                        _ => c.err(&lp, "expected a nonempty array of objects"),
                    }
                }
            }
        }
    }

    let mut cutoffs = model.default_cutoffs();
    if model.list_param().is_some() && list_len > 1 {
        let per = cutoffs[cutoffs.len() - 1];
        cutoffs.resize(cutoffs.len() - 1 + list_len, per);
    }
    if let Some(cv) = obj.get("cutoffs") {
        match cv.as_array() {
            Some(items) => {
                let parsed: Vec<Option<usize>> = items.iter().enumerate().map(|(i, x)| c.count(x, &format!("cutoffs[{i}]"), 2)).collect();
                if parsed.iter().all(|x| x.is_some()) {
                    cutoffs = parsed.into_iter().map(|x| x.unwrap()).collect();
                }
            }
            None => c.err("cutoffs", format!("expected an array of integers {}", model.cutoff_help())),
        }
    }
    let expected = match model {
        ModelName::Harmonic => 2,
        ModelName::JaynesCummings | ModelName::RabiX2 | ModelName::RabiY2 => 1,
        ModelName::CaldeiraLeggett => 1 + list_len,
        ModelName::IndependentBoson => list_len,
    };
    if cutoffs.len() != expected {
        c.err("cutoffs", format!("expected {expected} entries {}, found {}", model.cutoff_help(), cutoffs.len()));
    }

    let num = |c: &mut Checker, key: &str, default: f64| obj.get(key).and_then(|v| c.number(v, key)).unwrap_or(default);
    let t_end = num(&mut c, "t_end", 40.0);
    if t_end < 0.0 {
        c.err("t_end", "must be >= 0");
    }
    let grid = match (obj.get("steps"), obj.get("steps_per_period")) {
        (Some(_), Some(_)) => {
            c.err("steps", "give either 'steps' or 'steps_per_period', not both");
            GridSpec::PerPeriod(200)
        }
        (Some(v), None) => GridSpec::Steps(c.count(v, "steps", 1).unwrap_or(1)),
        (None, Some(v)) => GridSpec::PerPeriod(c.count(v, "steps_per_period", 1).unwrap_or(200)),
        (None, None) => GridSpec::PerPeriod(200),
    };
    let sample_every = obj.get("sample_every").and_then(|v| c.count(v, "sample_every", 1)).unwrap_or(10);
    let beta = num(&mut c, "beta", 1.0);
    let gamma = num(&mut c, "gamma", 2.0);
    for (k, v) in [("beta", beta), ("gamma", gamma)] {
        if !(v > 0.0) {
            c.err(k, format!("inverse temperature must be > 0, found {v}"));
        }
    }

    let initial_state = match obj.get("initial_state") {
        None => {
            if model.has_qubit() && model != ModelName::IndependentBoson {
                InitialState::Qubit { p_g: 1.0, p_eg: (0.0, 0.0), bath: BathState::Thermal }
            } else {
                InitialState::Thermal
            }
        }
        Some(v) => parse_initial(&mut c, v, model),
    };

    let (mut relative_entropies, mut observational_entropies) = (true, true);
    if let Some(ev) = obj.get("entropies") {
        if let Some(eo) = c.object(ev, "entropies") {
            c.unknown_keys(eo, &["relative", "observational"], "entropies");
            if let Some(b) = eo.get("relative").and_then(|v| c.boolean(v, "entropies.relative")) {
                relative_entropies = b;
            }
            if let Some(b) = eo.get("observational").and_then(|v| c.boolean(v, "entropies.observational")) {
                observational_entropies = b;
            }
        }
    }

    let mut columns: Vec<String> = nonconj::thermo::COLUMNS[..nonconj::thermo::CORE_COLUMNS].iter().map(|s| s.to_string()).collect();
    if let Some(cv) = obj.get("columns") {
        match cv.as_array() {
            Some(items) if !items.is_empty() => {
                let mut out = Vec::new();
                for (i, it) in items.iter().enumerate() {
                    let p = format!("columns[{i}]");
                    match it.as_str() {
                        Some(s) if nonconj::thermo::COLUMNS.contains(&s) => out.push(s.to_string()),
                        Some(s) => c.err(&p, format!("unknown column '{s}'{}", suggestion(s, &nonconj::thermo::COLUMNS))),
                        None => c.err(&p, format!("expected a string, found {}", kind(it))),
                    }
                }
                columns = out;
            }
            _ => c.err("columns", "expected a nonempty array of column names"),
        }
    }

    let sweep = obj.get("sweep").and_then(|sv| {
        let so = c.object(sv, "sweep")?;
        c.unknown_keys(so, &["axis", "values"], "sweep");
        let axis = match so.get("axis") {
            Some(Value::String(s)) => {
                let valid = sweep_axes(model);
                if !valid.contains(&s.as_str()) {
                    c.err("sweep.axis", format!("unknown sweep axis '{s}'{}", suggestion(s, &valid)));
                }
                s.clone()
            }
            Some(v) => {
                c.err("sweep.axis", format!("expected a string, found {}", kind(v)));
                return None;
            }
            None => {
                c.err("sweep.axis", "missing required key");
                return None;
            }
        };
        let values = match so.get("values").and_then(|v| v.as_array()) {
            Some(items) if !items.is_empty() => items.iter().enumerate().filter_map(|(i, x)| c.number(x, &format!("sweep.values[{i}]"))).collect(),
            _ => {
                c.err("sweep.values", "expected a nonempty array of numbers");
                return None;
            }
        };
        Some(Sweep { axis, values })
    });

    let output = match obj.get("output") {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(v) => {
            c.err("output", format!("expected a string, found {}", kind(v)));
            None
        }
    };

    let mut convergence = Convergence::default();
    if let Some(cv) = obj.get("convergence") {
        if let Some(co) = c.object(cv, "convergence") {
            c.unknown_keys(co, &["enabled", "tolerance", "require"], "convergence");
            if let Some(b) = co.get("enabled").and_then(|v| c.boolean(v, "convergence.enabled")) {
                convergence.enabled = b;
            }
            if let Some(b) = co.get("require").and_then(|v| c.boolean(v, "convergence.require")) {
                convergence.require = b;
            }
            if let Some(x) = co.get("tolerance").and_then(|v| c.number(v, "convergence.tolerance")) {
                if x > 0.0 {
                    convergence.tolerance = x;
                } else {
                    c.err("convergence.tolerance", "must be > 0");
                }
            }
        }
    }

    if !c.errors.is_empty() {
        return Err(c.errors);
    }
    let mut cfg = ScenarioConfig {
        model,
        params,
        list,
        cutoffs,
        t_end,
        grid,
        sample_every,
        beta,
        gamma,
        initial_state,
        relative_entropies,
        observational_entropies,
        columns,
        sweep,
        output,
        convergence,
        echo: Value::Null,
    };
    cfg.echo = echo(&cfg);
    Ok(cfg)
}

fn parse_initial(c: &mut Checker, v: &Value, model: ModelName) -> InitialState {
    let Some(o) = c.object(v, "initial_state") else {
        return InitialState::Thermal;
    };
    let kind_name = match o.get("kind") {
        Some(Value::String(s)) => s.as_str(),
        _ => {
            c.err("initial_state.kind", "missing or non-string; one of thermal, qubit");
            return InitialState::Thermal;
        }
    };
    match kind_name {
        "thermal" => {
            c.unknown_keys(o, &["kind"], "initial_state");
            InitialState::Thermal
        }
        "qubit" => {
            c.unknown_keys(o, &["kind", "p_g", "p_eg", "p_eg_im", "bath"], "initial_state");
            if !model.has_qubit() {
                c.err("initial_state.kind", format!("model '{}' has no two-level system", model.as_str()));
            }
            let get = |c: &mut Checker, k: &str, d: f64| o.get(k).and_then(|v| c.number(v, &format!("initial_state.{k}"))).unwrap_or(d);
            let p_g = get(c, "p_g", 1.0);
            let re = get(c, "p_eg", 0.0);
            let im = get(c, "p_eg_im", 0.0);
            let bath = match o.get("bath").map(|b| b.as_str()) {
                None | Some(Some("thermal")) => BathState::Thermal,
                Some(Some("vacuum")) => BathState::Vacuum,
                Some(other) => {
                    c.err("initial_state.bath", format!("expected 'thermal' or 'vacuum', found {other:?}"));
                    BathState::Thermal
                }
            };
            InitialState::Qubit { p_g, p_eg: (re, im), bath }
        }
        other => {
            c.err("initial_state.kind", format!("unknown kind '{other}'{}", suggestion(other, &["thermal", "qubit"])));
            InitialState::Thermal
        }
    }
}

/// Canonical JSON echo with every default made explicit.
pub fn echo(cfg: &ScenarioConfig) -> Value {
    let mut params = Map::new();
    for (k, v) in &cfg.params {
        if v.is_finite() {
            params.insert(k.clone(), Value::from(*v));
        }
    }
    if let Some((lk, _)) = cfg.model.list_param() {
        let items: Vec<Value> = cfg
            .list
            .iter()
            .map(|e| Value::Object(e.iter().map(|(k, v)| (k.clone(), Value::from(*v))).collect()))
            .collect();
        params.insert(lk.to_string(), Value::Array(items));
    }
    let mut root = Map::new();
    root.insert("model".into(), Value::from(cfg.model.as_str()));
    root.insert("params".into(), Value::Object(params));
    root.insert("cutoffs".into(), Value::from(cfg.cutoffs.clone()));
    root.insert("t_end".into(), Value::from(cfg.t_end));
    match cfg.grid {
        GridSpec::Steps(n) => root.insert("steps".into(), Value::from(n)),
        GridSpec::PerPeriod(n) => root.insert("steps_per_period".into(), Value::from(n)),
    };
    root.insert("sample_every".into(), Value::from(cfg.sample_every));
    root.insert("beta".into(), Value::from(cfg.beta));
    root.insert("gamma".into(), Value::from(cfg.gamma));
    let init = match &cfg.initial_state {
        InitialState::Thermal => serde_json::json!({"kind": "thermal"}),
        InitialState::Qubit { p_g, p_eg, bath } => serde_json::json!({
            "kind": "qubit",
            "p_g": p_g,
            "p_eg": p_eg.0,
            "p_eg_im": p_eg.1,
            "bath": match bath { BathState::Thermal => "thermal", BathState::Vacuum => "vacuum" },
        }),
    };
    root.insert("initial_state".into(), init);
    root.insert("entropies".into(), serde_json::json!({"relative": cfg.relative_entropies, "observational": cfg.observational_entropies}));
    root.insert("columns".into(), Value::from(cfg.columns.clone()));
    if let Some(s) = &cfg.sweep {
        root.insert("sweep".into(), serde_json::json!({"axis": s.axis, "values": s.values}));
    }
    if let Some(o) = &cfg.output {
        root.insert("output".into(), Value::from(o.clone()));
    }
    root.insert(
        "convergence".into(),
        serde_json::json!({"enabled": cfg.convergence.enabled, "tolerance": cfg.convergence.tolerance, "require": cfg.convergence.require}),
    );
    Value::Object(root)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_harmonic() {
        let cfg = parse_config(r#"{"model": "harmonic"}"#).unwrap();
        assert_eq!(cfg.cutoffs, vec![16, 16]);
        assert_eq!(cfg.param("eta"), Some(0.5));
        assert_eq!(cfg.initial_state, InitialState::Thermal);
        assert_eq!(cfg.columns.len(), 17);
    }

    #[test]
    fn unknown_key_names_nearest() {
        let errs = parse_config(r#"{"model": "harmonic", "params": {"etaa": 0.3}}"#).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].to_string().contains("'etaa'") && errs[0].to_string().contains("'eta'"), "{}", errs[0]);
    }

    #[test]
    fn all_errors_reported() {
        let errs = parse_config(r#"{"model": "harmonic", "beta": "hot", "cutoffs": [1, 4], "colour": 1}"#).unwrap_err();
        let text: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
        assert_eq!(errs.len(), 3, "{text:?}");
        assert!(text.iter().any(|t| t.starts_with("beta")));
        assert!(text.iter().any(|t| t.starts_with("cutoffs[0]")));
        assert!(text.iter().any(|t| t.contains("colour") && t.contains("columns")));
    }

    #[test]
    fn missing_model_and_bad_types() {
        assert!(parse_config("{}").unwrap_err()[0].to_string().contains("missing"));
        assert!(parse_config("[1]").unwrap_err()[0].to_string().contains("object"));
        assert!(parse_config("{").unwrap_err()[0].to_string().contains("malformed"));
        let e = parse_config(r#"{"model": "harmonc"}"#).unwrap_err();
        assert!(e[0].to_string().contains("'harmonic'"));
    }

    #[test]
    fn list_params_and_cutoffs() {
        let cfg = parse_config(r#"{"model": "caldeira_leggett", "params": {"bath": [{"kappa": 0.1}, {"omega": 2.0}]}, "cutoffs": [8, 6, 6]}"#).unwrap();
        assert_eq!(cfg.list.len(), 2);
        assert_eq!(cfg.list[1][1], ("omega".to_string(), 2.0));
        let e = parse_config(r#"{"model": "caldeira_leggett", "params": {"bath": [{}, {}]}, "cutoffs": [8, 6]}"#).unwrap_err();
        assert!(e[0].message.contains("expected 3"));
    }

    #[test]
    fn echo_round_trips() {
        let cfg = parse_config(r#"{"model": "jaynes_cummings", "initial_state": {"kind": "qubit", "p_g": 0.25, "bath": "vacuum"}, "sweep": {"axis": "p_g", "values": [0, 0.5]}}"#).unwrap();
        let again = parse_config(&cfg.echo.to_string()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn sweep_axis_validation() {
        let e = parse_config(r#"{"model": "harmonic", "sweep": {"axis": "etta", "values": [0.1]}}"#).unwrap_err();
        assert!(e[0].to_string().contains("'eta'"));
        let mut cfg = parse_config(r#"{"model": "harmonic"}"#).unwrap();
        cfg.set_axis("eta", 0.2).unwrap();
        assert_eq!(cfg.param("eta"), Some(0.2));
        assert!(cfg.set_axis("p_g", 0.2).is_err());
    }
}
