//! Run configuration and its TOML file format.
//!
//! ```text
//! # comments start with '#'
//! [parameters]
//! preset = "test"
//! p = 6.0
//!
//! [grid]
//! points = 101
//! ```
//!
//! Every key that is not given falls back to a documented default, and
//! [`RunConfig::to_config_string`] writes the fully resolved configuration
//! back in the same format.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::initial::{Generator, InitialSpec};
use crate::integrator::{Scheme, StepperConfig, DEFAULT_CHECK_INTERVAL};
use crate::model::{compute_sync_threshold, validate_parameters, Parameters, Preset};

pub const DEFAULT_POINTS: usize = 101;
pub const DEFAULT_SAMPLE_EVERY: usize = 10;
pub const DEFAULT_TOL: f64 = 0.1;
pub const DEFAULT_EPSILON: f64 = 1e-6;
pub const DEFAULT_SLACK: f64 = 1.05;

const SECTIONS: [(&str, &[&str]); 5] = [
    (
        "parameters",
        &[
            "preset", "a", "b", "alpha", "beta", "q", "S", "r", "c", "J", "d", "p",
        ],
    ),
    ("grid", &["dimension", "points", "length"]),
    ("stepper", &["dt", "scheme", "check_interval"]),
    (
        "initial",
        &[
            "generator",
            "seed",
            "amplitude",
            "values",
            "norm_sq",
            "synchronized",
        ],
    ),
    (
        "experiment",
        &[
            "name",
            "T",
            "sample_every",
            "p_lo",
            "p_hi",
            "tol",
            "epsilon",
            "slack",
        ],
    ),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub dimension: usize,
    pub points: usize,
    pub length: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            dimension: 1,
            points: DEFAULT_POINTS,
            length: 1.0,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.dimension, self.points, self.length)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub horizon: f64,
    pub sample_every: usize,
    pub p_lo: f64,
    pub p_hi: f64,
    pub tol: f64,
    /// Relative reduction of the synchronization functional that counts as synchronized.
    pub epsilon: f64,
    /// Multiplicative slack on the exponential synchronization bound.
    pub slack: f64,
}

/// A fully resolved run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Preset,
    pub params: Parameters,
    pub grid: GridSpec,
    pub stepper: StepperConfig,
    pub initial: InitialSpec,
    pub experiment: ExperimentSpec,
}

impl RunConfig {
    /// Defaults for a preset, with the preset's own coupling strength.
    pub fn from_preset(preset: Preset) -> Self {
        let params = preset.parameters();
        let p_star = compute_sync_threshold(&params).ok();
        RunConfig {
            preset,
            params,
            grid: GridSpec::default(),
            stepper: StepperConfig::default(),
            initial: InitialSpec::default(),
            experiment: ExperimentSpec {
                name: "run".into(),
                horizon: default_horizon(preset),
                sample_every: DEFAULT_SAMPLE_EVERY,
                p_lo: 0.0,
                p_hi: p_star.map_or(1.0, |ps| 1.2 * ps),
                tol: DEFAULT_TOL,
                epsilon: DEFAULT_EPSILON,
                slack: DEFAULT_SLACK,
            },
        }
    }

    pub fn validate(self) -> Result<Self> {
        validate_parameters(self.params)?;
        self.grid.build()?;
        self.stepper.validate()?;
        let e = &self.experiment;
        if !(e.horizon > 0.0 && e.horizon.is_finite()) {
            return Err(Error::InvalidParameter("T must be positive".into()));
        }
        if e.sample_every == 0 {
            return Err(Error::InvalidParameter(
                "sample_every must be at least 1".into(),
            ));
        }
        if !(e.p_lo < e.p_hi) {
            return Err(Error::MalformedBracket {
                p_lo: e.p_lo,
                p_hi: e.p_hi,
            });
        }
        if !(e.tol > 0.0) {
            return Err(Error::InvalidParameter("tol must be positive".into()));
        }
        if !(e.epsilon > 0.0 && e.epsilon < 1.0) {
            return Err(Error::InvalidParameter("epsilon must lie in (0, 1)".into()));
        }
        if !(e.slack >= 1.0) {
            return Err(Error::InvalidParameter("slack must be at least 1".into()));
        }
        self.initial.validate()?;
        Ok(self)
    }

    /// Writes every resolved value in the config-file format.
    pub fn to_config_string(&self) -> String {
        let p = &self.params;
        let e = &self.experiment;
        let i = &self.initial;
        let mut out = String::new();
        let _ = writeln!(out, "[parameters]");
        let _ = writeln!(out, "preset = {}", quoted(self.preset.name()));
        for (name, value) in p.named_values() {
            let _ = writeln!(out, "{name} = {value:?}");
        }
        let _ = writeln!(out, "\n[grid]");
        let _ = writeln!(out, "dimension = {}", self.grid.dimension);
        let _ = writeln!(out, "points = {}", self.grid.points);
        let _ = writeln!(out, "length = {:?}", self.grid.length);
        let _ = writeln!(out, "\n[stepper]");
        let _ = writeln!(out, "dt = {:?}", self.stepper.dt);
        let _ = writeln!(out, "scheme = {}", quoted(self.stepper.scheme.name()));
        let _ = writeln!(out, "check_interval = {}", self.stepper.check_interval);
        let _ = writeln!(out, "\n[initial]");
        let _ = writeln!(out, "generator = {}", quoted(i.generator.name()));
        // TOML integers are signed 64-bit
        if i64::try_from(i.seed).is_ok() {
            let _ = writeln!(out, "seed = {}", i.seed);
        } else {
            let _ = writeln!(out, "seed = {}", quoted(&i.seed.to_string()));
        }
        let _ = writeln!(out, "amplitude = {:?}", i.amplitude);
        let values: Vec<String> = i.values.iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(out, "values = [{}]", values.join(", "));
        if let Some(n) = i.norm_sq {
            let _ = writeln!(out, "norm_sq = {n:?}");
        }
        let _ = writeln!(out, "synchronized = {}", i.synchronized);
        let _ = writeln!(out, "\n[experiment]");
        let _ = writeln!(out, "name = {}", quoted(&e.name));
        let _ = writeln!(out, "T = {:?}", e.horizon);
        let _ = writeln!(out, "sample_every = {}", e.sample_every);
        let _ = writeln!(out, "p_lo = {:?}", e.p_lo);
        let _ = writeln!(out, "p_hi = {:?}", e.p_hi);
        let _ = writeln!(out, "tol = {:?}", e.tol);
        let _ = writeln!(out, "epsilon = {:?}", e.epsilon);
        let _ = writeln!(out, "slack = {:?}", e.slack);
        out
    }
}

fn quoted(s: &str) -> String {
    toml_edit::Value::from(s).to_string()
}

fn default_horizon(preset: Preset) -> f64 {
    match preset {
        Preset::Test => 20.0,
        Preset::Typical => 2000.0,
    }
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

type Document = HashMap<(String, String), Entry>;

fn nearest_key<'a>(key: &str, candidates: impl Iterator<Item = &'a str>) -> Option<&'a str> {
    candidates
        .map(|c| (strsim::levenshtein(key, c), c))
        .filter(|(dist, _)| *dist <= 3)
        .min_by_key(|(dist, _)| *dist)
        .map(|(_, c)| c)
}

fn line_of(text: &str, span: Option<std::ops::Range<usize>>) -> usize {
    span.map_or(1, |r| {
        text[..r.start.min(text.len())].matches('\n').count() + 1
    })
}

/// Renders a scalar or array value as the string handed to `FromStr`.
fn flatten_value(value: &toml_edit::Value) -> Option<String> {
    use toml_edit::Value;
    Some(match value {
        Value::String(s) => s.value().clone(),
        Value::Integer(i) => i.value().to_string(),
        Value::Float(f) => format!("{:?}", f.value()),
        Value::Boolean(b) => b.value().to_string(),
        Value::Array(items) => items
            .iter()
            .map(flatten_value)
            .collect::<Option<Vec<_>>>()?
            .join(", "),
        Value::Datetime(_) | Value::InlineTable(_) => return None,
    })
}

fn parse_document(text: &str) -> Result<Document> {
    let parsed = toml_edit::ImDocument::parse(text).map_err(|err| Error::Config {
        line: line_of(text, err.span()),
        message: err.message().trim().to_string(),
    })?;
    let mut doc = Document::new();
    for (name, item) in parsed.as_table().iter() {
        let line = line_of(text, parsed.as_table().key(name).and_then(|k| k.span()));
        let Some(table) = item.as_table() else {
            return Err(Error::Config {
                line,
                message: format!("key '{name}' appears before any section header"),
            });
        };
        let Some((section, keys)) = SECTIONS.iter().find(|(s, _)| *s == name) else {
            let hint = nearest_key(name, SECTIONS.iter().map(|(s, _)| *s))
                .map(|s| format!("; did you mean '[{s}]'?"))
                .unwrap_or_default();
            return Err(Error::Config {
                line,
                message: format!("unknown section '[{name}]'{hint}"),
            });
        };
        for (key, value) in table.iter() {
            let line = line_of(text, table.key(key).and_then(|k| k.span()));
            if !keys.contains(&key) {
                let hint = nearest_key(key, keys.iter().copied())
                    .map(|k| format!("; did you mean '{k}'?"))
                    .unwrap_or_default();
                return Err(Error::Config {
                    line,
                    message: format!("unknown key '{key}' in [{section}]{hint}"),
                });
            }
            let value = value
                .as_value()
                .and_then(flatten_value)
                .ok_or_else(|| Error::Config {
                    line,
                    message: format!("'{key}' must be a number, string, boolean or array"),
                })?;
            doc.insert(
                (section.to_string(), key.to_string()),
                Entry { line, value },
            );
        }
    }
    Ok(doc)
}

struct Lookup<'a> {
    doc: &'a Document,
}

impl Lookup<'_> {
    fn raw(&self, section: &str, key: &str) -> Option<&Entry> {
        self.doc.get(&(section.to_string(), key.to_string()))
    }

    fn parse<T: std::str::FromStr>(
        &self,
        section: &str,
        key: &str,
        what: &str,
    ) -> Result<Option<T>> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(entry) => entry
                .value
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::Config {
                    line: entry.line,
                    message: format!("'{key}' expects {what}, got '{}'", entry.value),
                }),
        }
    }

    fn number(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.parse(section, key, "a number")
    }

    fn integer(&self, section: &str, key: &str) -> Result<Option<usize>> {
        self.parse(section, key, "a non-negative integer")
    }

    fn with_line<T>(&self, section: &str, key: &str, res: Result<T>) -> Result<T> {
        res.map_err(|err| match self.raw(section, key) {
            Some(entry) => Error::Config {
                line: entry.line,
                message: err.to_string(),
            },
            None => err,
        })
    }
}

/// Parses a config document into a fully resolved, validated [`RunConfig`].
pub fn parse_run_config(text: &str) -> Result<RunConfig> {
    let doc = parse_document(text)?;
    let look = Lookup { doc: &doc };

    let preset = match look.raw("parameters", "preset") {
        Some(entry) => look.with_line("parameters", "preset", entry.value.parse::<Preset>())?,
        None => Preset::Test,
    };
    let mut cfg = RunConfig::from_preset(preset);

    let params = &mut cfg.params;
    let numeric: [(&str, &mut f64); 10] = [
        ("a", &mut params.a),
        ("b", &mut params.b),
        ("alpha", &mut params.alpha),
        ("beta", &mut params.beta),
        ("q", &mut params.q),
        ("r", &mut params.r),
        ("c", &mut params.c),
        ("J", &mut params.j),
        ("d", &mut params.d),
        ("p", &mut params.p),
    ];
    for (key, slot) in numeric {
        if let Some(v) = look.number("parameters", key)? {
            *slot = v;
        }
    }
    if let Some(s) = look.number("parameters", "S")? {
        params.q = params.r * s;
    }
    cfg.params = validate_parameters(cfg.params)?;

    // the bracket default follows the resolved threshold
    if let Ok(ps) = compute_sync_threshold(&cfg.params) {
        cfg.experiment.p_hi = 1.2 * ps;
    }

    if let Some(v) = look.integer("grid", "dimension")? {
        cfg.grid.dimension = v;
    }
    if let Some(v) = look.integer("grid", "points")? {
        cfg.grid.points = v;
    }
    if let Some(v) = look.number("grid", "length")? {
        cfg.grid.length = v;
    }
    let grid_key = ["points", "length", "dimension"]
        .into_iter()
        .find(|k| look.raw("grid", k).is_some())
        .unwrap_or("points");
    look.with_line("grid", grid_key, cfg.grid.build())?;

    if let Some(v) = look.number("stepper", "dt")? {
        cfg.stepper.dt = v;
    }
    if let Some(entry) = look.raw("stepper", "scheme") {
        cfg.stepper.scheme = look.with_line("stepper", "scheme", entry.value.parse::<Scheme>())?;
    }
    cfg.stepper.check_interval = look
        .integer("stepper", "check_interval")?
        .unwrap_or(DEFAULT_CHECK_INTERVAL);

    if let Some(entry) = look.raw("initial", "generator") {
        cfg.initial.generator =
            look.with_line("initial", "generator", entry.value.parse::<Generator>())?;
    }
    if let Some(v) = look.parse::<u64>("initial", "seed", "a non-negative integer")? {
        cfg.initial.seed = v;
    }
    if let Some(v) = look.number("initial", "amplitude")? {
        cfg.initial.amplitude = v;
    }
    if let Some(entry) = look.raw("initial", "values") {
        let parsed: std::result::Result<Vec<f64>, _> = entry
            .value
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect();
        match parsed {
            Ok(v) if v.len() == 6 => cfg.initial.values = [v[0], v[1], v[2], v[3], v[4], v[5]],
            _ => {
                return Err(Error::Config {
                    line: entry.line,
                    message: format!(
                        "'values' expects six comma-separated numbers, got '{}'",
                        entry.value
                    ),
                })
            }
        }
    }
    cfg.initial.norm_sq = look.number("initial", "norm_sq")?;
    if let Some(v) = look.parse::<bool>("initial", "synchronized", "true or false")? {
        cfg.initial.synchronized = v;
    }

    if let Some(entry) = look.raw("experiment", "name") {
        cfg.experiment.name = entry.value.clone();
    }
    let exp = &mut cfg.experiment;
    let numeric: [(&str, &mut f64); 6] = [
        ("T", &mut exp.horizon),
        ("p_lo", &mut exp.p_lo),
        ("p_hi", &mut exp.p_hi),
        ("tol", &mut exp.tol),
        ("epsilon", &mut exp.epsilon),
        ("slack", &mut exp.slack),
    ];
    for (key, slot) in numeric {
        if let Some(v) = look.number("experiment", key)? {
            *slot = v;
        }
    }
    if let Some(v) = look.integer("experiment", "sample_every")? {
        cfg.experiment.sample_every = v;
    }

    cfg.validate()
}
