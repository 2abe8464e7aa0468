// Copyright 2026 The cfm Authors
//
// Licensed under the Apache license, version 2.0 (the "license");
// you may not use this file except in compliance with the license.
// You may obtain a copy of the license at
//
//     http://www.apache.org/licenses/license-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the license is distributed on an "as is" basis,
// without warranties or conditions of any kind, either express or implied.
// See the license for the specific language governing permissions and
// limitations under the license.

//! Run configuration files.
//!
//! ```text
//! [run]
//! command = solve
//!
//! [problem]
//! preset = morse
//! depth = 150 au
//!
//! [solve]
//! emin = -150 au
//! emax = -0.01 au
//! ```
//!
//! Lines are `key = value` under `[section]` headers; `#` and `;` start
//! comment lines. Physical quantities carry a unit suffix and are stored
//! in the problem's native units.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use cfm::eigensolver::{Condition, GridKind, Location};
use cfm::potentials::PotentialSpec;
use cfm::presets::{self, PresetError, PresetProblem};
use cfm::units::{EnergyUnit, LengthUnit, MassConvention};
use thiserror::Error;

use crate::params;
use crate::quantity::{self, Dims, Frame, DIMENSIONLESS, ENERGY, ENERGY_LENGTH, LENGTH};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: `{field}`: {message}")]
    Field { line: usize, field: String, message: String },
    #[error("`{field}` is required: {message}")]
    Missing { field: String, message: String },
    #[error("line {line}: unknown preset `{name}`")]
    UnknownPreset { line: usize, name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Scan,
    Bands,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Scan => "scan",
            Command::Bands => "bands",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
    PlotData,
}

impl OutputFormat {
    fn name(self) -> &'static str {
        match self {
            OutputFormat::Text => "text",
            OutputFormat::Csv => "csv",
            OutputFormat::PlotData => "plotdata",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Convention {
    Atomic,
    Reduced,
    /// cm⁻¹ and Å with the reduced mass in u.
    Spectroscopic(f64),
}

impl Convention {
    pub fn mass(self) -> Result<MassConvention, cfm::units::UnitError> {
        match self {
            Convention::Atomic => Ok(MassConvention::atomic()),
            Convention::Reduced => Ok(MassConvention::reduced()),
            Convention::Spectroscopic(m) => MassConvention::spectroscopic(m),
        }
    }

    fn default_unit(self) -> EnergyUnit {
        match self {
            Convention::Atomic => EnergyUnit::Hartree,
            Convention::Reduced => EnergyUnit::AtomicUnit,
            Convention::Spectroscopic(_) => EnergyUnit::InverseCentimeter,
        }
    }

    fn length(self) -> LengthUnit {
        match self {
            Convention::Spectroscopic(_) => LengthUnit::Angstrom,
            _ => LengthUnit::Bohr,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySpec {
    pub location: Location,
    pub condition: Condition,
}

/// A problem spelled out field by field.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomProblem {
    pub potential: PotentialSpec,
    /// Two-column `x v` file for tabulated potentials.
    pub table: Option<PathBuf>,
    pub x0: f64,
    pub left: BoundarySpec,
    pub right: BoundarySpec,
    pub l: u32,
    pub convention: Convention,
    pub unit: EnergyUnit,
    /// Symmetry centre for a parity split.
    pub center: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSource {
    Preset { name: String, mass: Option<f64>, overrides: Vec<(String, f64)> },
    Custom(CustomProblem),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MarchOverrides {
    pub step: Option<f64>,
    pub saturation_tol: Option<f64>,
    pub max_extent: Option<f64>,
    pub r_min: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BandSettings {
    pub a: Option<f64>,
    pub g: Option<f64>,
    pub x0: Option<f64>,
    pub nbands: Option<usize>,
    pub kpoints: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSettings {
    pub format: OutputFormat,
    pub path: Option<PathBuf>,
    /// Extra CSV copy of an eigenvalue table.
    pub csv: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub oracle: bool,
    pub oracle_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub problem: Option<ProblemSource>,
    pub emin: Option<f64>,
    pub emax: Option<f64>,
    pub grid_points: Option<usize>,
    pub grid: Option<GridKind>,
    pub refine_tol: Option<f64>,
    pub scan_points: Option<usize>,
    pub trace_energy: Option<f64>,
    pub march: MarchOverrides,
    pub bands: BandSettings,
    pub output: OutputSettings,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            problem: None,
            emin: None,
            emax: None,
            grid_points: None,
            grid: None,
            refine_tol: None,
            scan_points: None,
            trace_energy: None,
            march: MarchOverrides::default(),
            bands: BandSettings::default(),
            output: OutputSettings::default(),
        }
    }

    pub fn preset(command: Command, name: &str) -> Self {
        RunConfig {
            problem: Some(ProblemSource::Preset { name: name.to_string(), mass: None, overrides: Vec::new() }),
            ..RunConfig::new(command)
        }
    }

    /// Native units of the configured problem.
    pub fn frame(&self) -> Frame {
        match &self.problem {
            Some(ProblemSource::Preset { name, .. }) => preset_frame(name),
            Some(ProblemSource::Custom(c)) => Frame { energy: c.unit, length: c.convention.length() },
            None => Frame { energy: EnergyUnit::Hartree, length: LengthUnit::Bohr },
        }
    }
}

/// Native units of a registered preset.
pub fn preset_frame(name: &str) -> Frame {
    let energy = match presets::preset(name, Some(1.0)) {
        Ok(p) => p.unit,
        Err(_) => EnergyUnit::Hartree,
    };
    let length = if name == "johnson-dwp" { LengthUnit::Angstrom } else { LengthUnit::Bohr };
    Frame { energy, length }
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("run", &["command"]),
    (
        "problem",
        &[
            "preset",
            "potential",
            "mass",
            "table",
            "x0",
            "left",
            "right",
            "left_condition",
            "right_condition",
            "l",
            "convention",
            "unit",
            "center",
        ],
    ),
    ("solve", &["emin", "emax", "grid_points", "grid", "refine_tol"]),
    ("scan", &["points", "trace_energy"]),
    ("march", &["step", "saturation_tol", "max_extent", "r_min"]),
    ("bands", &["a", "g", "x0", "nbands", "kpoints"]),
    ("output", &["format", "path", "csv", "trace", "oracle", "oracle_path"]),
];

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

type Entries = BTreeMap<(String, String), Entry>;

fn tokenize(text: &str) -> Result<Entries, ConfigError> {
    let mut entries = Entries::new();
    let mut section: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::Syntax {
                    line,
                    message: format!("unterminated section header `{trimmed}`"),
                })?
                .trim();
            if !SECTIONS.iter().any(|(s, _)| *s == name) {
                return Err(ConfigError::Syntax { line, message: format!("unknown section `[{name}]`") });
            }
            section = Some(name.to_string());
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ConfigError::Syntax { line, message: format!("expected `key = value`, found `{trimmed}`") });
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(section) = &section else {
            return Err(ConfigError::Syntax { line, message: format!("`{key}` appears before any section header") });
        };
        if key.is_empty() {
            return Err(ConfigError::Syntax { line, message: "empty key".into() });
        }
        let slot = (section.clone(), key.to_string());
        if let Some(prev) = entries.get(&slot) {
            return Err(ConfigError::Field {
                line,
                field: key.to_string(),
                message: format!("duplicate key (first set on line {})", prev.line),
            });
        }
        entries.insert(slot, Entry { value: value.to_string(), line });
    }
    Ok(entries)
}

struct Reader {
    entries: Entries,
    frame: Frame,
}

impl Reader {
    fn take(&mut self, section: &str, key: &str) -> Option<Entry> {
        self.entries.remove(&(section.to_string(), key.to_string()))
    }

    fn field_err(e: &Entry, key: &str, message: String) -> ConfigError {
        ConfigError::Field { line: e.line, field: key.to_string(), message }
    }

    fn quantity(&mut self, section: &str, key: &str, dims: Dims) -> Result<Option<f64>, ConfigError> {
        let Some(e) = self.take(section, key) else { return Ok(None) };
        quantity::parse_quantity(&e.value, dims, self.frame).map(Some).map_err(|m| Self::field_err(&e, key, m))
    }

    fn positive(&mut self, section: &str, key: &str, dims: Dims) -> Result<Option<f64>, ConfigError> {
        let line = self.entries.get(&(section.to_string(), key.to_string())).map(|e| e.line);
        match self.quantity(section, key, dims)? {
            Some(v) if v <= 0.0 => Err(ConfigError::Field {
                line: line.unwrap_or(0),
                field: key.to_string(),
                message: format!("must be positive, got {v}"),
            }),
            v => Ok(v),
        }
    }

    fn count(&mut self, section: &str, key: &str, min: usize) -> Result<Option<usize>, ConfigError> {
        let Some(e) = self.take(section, key) else { return Ok(None) };
        match e.value.parse::<usize>() {
            Ok(n) if n >= min => Ok(Some(n)),
            Ok(n) => Err(Self::field_err(&e, key, format!("must be at least {min}, got {n}"))),
            Err(_) => Err(Self::field_err(&e, key, format!("`{}` is not a non-negative integer", e.value))),
        }
    }

    fn text(&mut self, section: &str, key: &str) -> Option<Entry> {
        self.take(section, key)
    }
}

fn parse_boundary(text: &str, frame: Frame) -> Result<Location, String> {
    match text.trim().to_ascii_lowercase().as_str() {
        "infinity" | "inf" => Ok(Location::Infinity),
        "origin" => Ok(Location::Origin),
        _ => quantity::parse_quantity(text, LENGTH, frame).map(Location::Finite),
    }
}

fn parse_condition(text: &str) -> Result<Condition, String> {
    match text.trim().to_ascii_lowercase().as_str() {
        "value" | "null-value" => Ok(Condition::NullValue),
        "derivative" | "null-derivative" => Ok(Condition::NullDerivative),
        other => Err(format!("`{other}` is not a boundary condition (value | derivative)")),
    }
}

fn parse_bool(text: &str) -> Result<bool, String> {
    match text.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(format!("`{other}` is not a boolean")),
    }
}

fn parse_unit_subset(text: &str) -> Result<EnergyUnit, String> {
    text.trim().parse::<EnergyUnit>().map_err(|e| e.to_string())
}

/// Parses a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries = tokenize(text)?;
    for ((section, key), e) in &entries {
        let known = SECTIONS.iter().find(|(s, _)| s == section).map(|(_, k)| *k).unwrap_or(&[]);
        if !known.contains(&key.as_str()) && section != "problem" {
            return Err(ConfigError::Field {
                line: e.line,
                field: key.clone(),
                message: format!("unknown key in [{section}]"),
            });
        }
    }

    let command = match entries.remove(&("run".into(), "command".into())) {
        None => Command::Solve,
        Some(e) => match e.value.as_str() {
            "solve" => Command::Solve,
            "scan" => Command::Scan,
            "bands" => Command::Bands,
            other => {
                return Err(ConfigError::Field {
                    line: e.line,
                    field: "command".into(),
                    message: format!("`{other}` is not a command (solve | scan | bands)"),
                })
            }
        },
    };

    let (problem, frame) = parse_problem(&mut entries)?;
    let mut r = Reader { entries, frame };
    let mut cfg = RunConfig { problem, ..RunConfig::new(command) };

    cfg.emin = r.quantity("solve", "emin", ENERGY)?;
    cfg.emax = r.quantity("solve", "emax", ENERGY)?;
    if let (Some(lo), Some(hi)) = (cfg.emin, cfg.emax) {
        if lo >= hi {
            let line = text_line(text, "emax");
            return Err(ConfigError::Field {
                line,
                field: "emax".into(),
                message: format!("window [{lo}, {hi}] is empty"),
            });
        }
    }
    cfg.grid_points = r.count("solve", "grid_points", 2)?;
    if let Some(e) = r.text("solve", "grid") {
        cfg.grid = Some(match e.value.as_str() {
            "linear" => GridKind::Linear,
            "log" => GridKind::Log,
            other => return Err(Reader::field_err(&e, "grid", format!("`{other}` is not a grid (linear | log)"))),
        });
    }
    cfg.refine_tol = r.positive("solve", "refine_tol", DIMENSIONLESS)?;
    cfg.scan_points = r.count("scan", "points", 2)?;
    cfg.trace_energy = r.quantity("scan", "trace_energy", ENERGY)?;
    cfg.march = MarchOverrides {
        step: r.positive("march", "step", LENGTH)?,
        saturation_tol: r.positive("march", "saturation_tol", DIMENSIONLESS)?,
        max_extent: r.positive("march", "max_extent", LENGTH)?,
        r_min: r.positive("march", "r_min", LENGTH)?,
    };
    cfg.bands = BandSettings {
        a: r.positive("bands", "a", LENGTH)?,
        g: r.quantity("bands", "g", ENERGY_LENGTH)?,
        x0: r.quantity("bands", "x0", LENGTH)?,
        nbands: r.count("bands", "nbands", 1)?,
        kpoints: r.count("bands", "kpoints", 2)?,
    };
    if let Some(e) = r.text("output", "format") {
        cfg.output.format = match e.value.as_str() {
            "text" => OutputFormat::Text,
            "csv" => OutputFormat::Csv,
            "plotdata" => OutputFormat::PlotData,
            other => {
                return Err(Reader::field_err(
                    &e,
                    "format",
                    format!("`{other}` is not a format (text | csv | plotdata)"),
                ))
            }
        };
    }
    cfg.output.path = r.text("output", "path").map(|e| PathBuf::from(e.value));
    cfg.output.csv = r.text("output", "csv").map(|e| PathBuf::from(e.value));
    cfg.output.trace = r.text("output", "trace").map(|e| PathBuf::from(e.value));
    cfg.output.oracle_path = r.text("output", "oracle_path").map(|e| PathBuf::from(e.value));
    if let Some(e) = r.text("output", "oracle") {
        cfg.output.oracle = parse_bool(&e.value).map_err(|m| Reader::field_err(&e, "oracle", m))?;
    }
    if let Some(((section, key), e)) = r.entries.into_iter().next() {
        return Err(ConfigError::Field { line: e.line, field: key, message: format!("unknown key in [{section}]") });
    }
    Ok(cfg)
}

fn text_line(text: &str, key: &str) -> usize {
    text.lines().position(|l| l.split_once('=').is_some_and(|(k, _)| k.trim() == key)).map_or(0, |i| i + 1)
}

fn parse_problem(entries: &mut Entries) -> Result<(Option<ProblemSource>, Frame), ConfigError> {
    let take = |entries: &mut Entries, key: &str| entries.remove(&("problem".to_string(), key.to_string()));
    let preset = take(entries, "preset");
    let potential = take(entries, "potential");
    let default_frame = Frame { energy: EnergyUnit::Hartree, length: LengthUnit::Bohr };
    match (preset, potential) {
        (Some(p), Some(k)) => Err(ConfigError::Field {
            line: k.line.max(p.line),
            field: "potential".into(),
            message: "give either `preset` or `potential`, not both".into(),
        }),
        (None, None) => {
            if let Some(((_, key), e)) = entries.iter().find(|((s, _), _)| s == "problem") {
                return Err(ConfigError::Field {
                    line: e.line,
                    field: key.clone(),
                    message: "needs `preset` or `potential`".into(),
                });
            }
            Ok((None, default_frame))
        }
        (Some(p), None) => {
            let name = p.value.clone();
            let mass = match take(entries, "mass") {
                Some(e) => Some(quantity::parse_mass(&e.value).map_err(|m| Reader::field_err(&e, "mass", m))?),
                None => None,
            };
            let resolved = match presets::preset(&name, mass) {
                Ok(r) => r,
                Err(PresetError::Unknown(_)) => return Err(ConfigError::UnknownPreset { line: p.line, name }),
                Err(PresetError::MassRequired(_)) => {
                    return Err(ConfigError::Missing {
                        field: "mass".into(),
                        message: format!("preset `{name}` needs the reduced mass, e.g. `mass = 1.0 u` in [problem]"),
                    })
                }
                Err(e) => return Err(Reader::field_err(&p, "mass", e.to_string())),
            };
            let frame = preset_frame(&name);
            let spec = match &resolved.problem {
                PresetProblem::Bound(b) => b.problem.potential.clone(),
                PresetProblem::Bands(_) => PotentialSpec::DeltaComb { lattice: 0.0, strength: 0.0 },
            };
            let mut overrides = Vec::new();
            let keys: Vec<(String, Entry)> =
                entries.iter().filter(|((s, _), _)| s == "problem").map(|((_, k), e)| (k.clone(), e.clone())).collect();
            for (key, e) in keys {
                let Some(dims) =
                    params::dims_of(&spec, &key).filter(|_| matches!(resolved.problem, PresetProblem::Bound(_)))
                else {
                    return Err(Reader::field_err(&e, &key, format!("not a parameter of preset `{name}`")));
                };
                let v = quantity::parse_quantity(&e.value, dims, frame).map_err(|m| Reader::field_err(&e, &key, m))?;
                overrides.push((key.clone(), v));
                take(entries, &key);
            }
            sort_overrides(&spec, &mut overrides);
            Ok((Some(ProblemSource::Preset { name, mass, overrides }), frame))
        }
        (None, Some(k)) => {
            let custom = parse_custom(entries, &k)?;
            let frame = Frame { energy: custom.unit, length: custom.convention.length() };
            Ok((Some(ProblemSource::Custom(custom)), frame))
        }
    }
}

fn sort_overrides(spec: &PotentialSpec, overrides: &mut [(String, f64)]) {
    let order = |k: &str| params::names(spec).iter().position(|(n, _)| *n == k).unwrap_or(usize::MAX);
    overrides.sort_by_key(|(k, _)| order(k));
}

fn parse_custom(entries: &mut Entries, kind: &Entry) -> Result<CustomProblem, ConfigError> {
    let take = |entries: &mut Entries, key: &str| entries.remove(&("problem".to_string(), key.to_string()));
    let Some(mut potential) = params::template(&kind.value) else {
        return Err(Reader::field_err(
            kind,
            "potential",
            format!("`{}` is not a potential ({})", kind.value, params::KINDS.join(" | ")),
        ));
    };
    if matches!(potential, PotentialSpec::DeltaComb { .. }) {
        return Err(Reader::field_err(kind, "potential", "delta-comb problems are configured in [bands]".into()));
    }
    let convention = match take(entries, "convention") {
        None => Convention::Atomic,
        Some(e) => match e.value.as_str() {
            "atomic" => Convention::Atomic,
            "reduced" => Convention::Reduced,
            "spectroscopic" => {
                let Some(m) = take(entries, "mass") else {
                    return Err(ConfigError::Missing {
                        field: "mass".into(),
                        message: "the spectroscopic convention needs the reduced mass, e.g. `mass = 1.0 u`".into(),
                    });
                };
                Convention::Spectroscopic(
                    quantity::parse_mass(&m.value).map_err(|msg| Reader::field_err(&m, "mass", msg))?,
                )
            }
            other => {
                return Err(Reader::field_err(
                    &e,
                    "convention",
                    format!("`{other}` is not a convention (atomic | reduced | spectroscopic)"),
                ))
            }
        },
    };
    if let Some(m) = take(entries, "mass") {
        return Err(Reader::field_err(&m, "mass", "only used with `convention = spectroscopic`".into()));
    }
    let unit = match take(entries, "unit") {
        None => convention.default_unit(),
        Some(e) => parse_unit_subset(&e.value).map_err(|m| Reader::field_err(&e, "unit", m))?,
    };
    let frame = Frame { energy: unit, length: convention.length() };
    let mut table = None;
    if matches!(potential, PotentialSpec::Tabulated { .. }) {
        let Some(t) = take(entries, "table") else {
            return Err(ConfigError::Missing {
                field: "table".into(),
                message: "tabulated potentials read `x v` rows from a file".into(),
            });
        };
        table = Some(PathBuf::from(t.value));
    } else if let Some(t) = take(entries, "table") {
        return Err(Reader::field_err(&t, "table", "only used with `potential = tabulated`".into()));
    }
    for (name, dims) in params::names(&potential) {
        let Some(e) = take(entries, name) else {
            return Err(ConfigError::Missing {
                field: (*name).into(),
                message: format!("`{}` potentials need `{name}` ({dims})", kind.value),
            });
        };
        let v = quantity::parse_quantity(&e.value, *dims, frame).map_err(|m| Reader::field_err(&e, name, m))?;
        params::set(&mut potential, name, v);
    }
    let required = |entries: &mut Entries, key: &str, what: &str| {
        take(entries, key).ok_or_else(|| ConfigError::Missing { field: key.into(), message: what.into() })
    };
    let x0e = required(entries, "x0", "anchor position, e.g. `x0 = 1.0 bohr`")?;
    let x0 = quantity::parse_quantity(&x0e.value, LENGTH, frame).map_err(|m| Reader::field_err(&x0e, "x0", m))?;
    let mut boundary = |key: &str, cond_key: &str| -> Result<BoundarySpec, ConfigError> {
        let e = required(entries, key, "boundary location: infinity | origin | <length>")?;
        let location = parse_boundary(&e.value, frame).map_err(|m| Reader::field_err(&e, key, m))?;
        let condition = match take(entries, cond_key) {
            None => Condition::NullValue,
            Some(c) => parse_condition(&c.value).map_err(|m| Reader::field_err(&c, cond_key, m))?,
        };
        Ok(BoundarySpec { location, condition })
    };
    let left = boundary("left", "left_condition")?;
    let right = boundary("right", "right_condition")?;
    let l = match take(entries, "l") {
        None => 0,
        Some(e) => e
            .value
            .parse::<u32>()
            .map_err(|_| Reader::field_err(&e, "l", format!("`{}` is not a non-negative integer", e.value)))?,
    };
    let center = match take(entries, "center") {
        None => None,
        Some(e) => {
            Some(quantity::parse_quantity(&e.value, LENGTH, frame).map_err(|m| Reader::field_err(&e, "center", m))?)
        }
    };
    if let Some(((_, key), e)) = entries.iter().find(|((s, _), _)| s == "problem") {
        return Err(ConfigError::Field {
            line: e.line,
            field: key.clone(),
            message: format!("not a parameter of `{}`", kind.value),
        });
    }
    Ok(CustomProblem { potential, table, x0, left, right, l, convention, unit, center })
}

fn quantity_text(v: f64, dims: Dims, frame: Frame) -> String {
    let suffix = frame.suffix(dims);
    if suffix.is_empty() {
        format!("{v}")
    } else {
        format!("{v} {suffix}")
    }
}

fn location_text(loc: Location, frame: Frame) -> String {
    match loc {
        Location::Infinity => "infinity".into(),
        Location::Origin => "origin".into(),
        Location::Finite(x) => quantity_text(x, LENGTH, frame),
    }
}

fn condition_text(c: Condition) -> &'static str {
    match c {
        Condition::NullValue => "value",
        Condition::NullDerivative => "derivative",
    }
}

/// Writes `cfg` back as a configuration file that parses to the same value.
pub fn serialize_config(cfg: &RunConfig) -> String {
    let frame = cfg.frame();
    let mut s = String::new();
    let _ = writeln!(s, "[run]\ncommand = {}", cfg.command.name());
    match &cfg.problem {
        None => {}
        Some(ProblemSource::Preset { name, mass, overrides }) => {
            let _ = writeln!(s, "\n[problem]\npreset = {name}");
            if let Some(m) = mass {
                let _ = writeln!(s, "mass = {m} u");
            }
            let spec = match presets::preset(name, Some(1.0)).map(|p| p.problem) {
                Ok(PresetProblem::Bound(b)) => Some(b.problem.potential),
                _ => None,
            };
            for (k, v) in overrides {
                let dims = spec.as_ref().and_then(|p| params::dims_of(p, k)).unwrap_or(DIMENSIONLESS);
                let _ = writeln!(s, "{k} = {}", quantity_text(*v, dims, frame));
            }
        }
        Some(ProblemSource::Custom(c)) => {
            let _ = writeln!(s, "\n[problem]\npotential = {}", c.potential.name());
            match c.convention {
                Convention::Atomic => {
                    let _ = writeln!(s, "convention = atomic");
                }
                Convention::Reduced => {
                    let _ = writeln!(s, "convention = reduced");
                }
                Convention::Spectroscopic(m) => {
                    let _ = writeln!(s, "convention = spectroscopic\nmass = {m} u");
                }
            }
            let _ = writeln!(s, "unit = {}", c.unit.symbol());
            if let Some(t) = &c.table {
                let _ = writeln!(s, "table = {}", t.display());
            }
            for (name, dims) in params::names(&c.potential) {
                let v = params::get(&c.potential, name).unwrap_or(f64::NAN);
                let _ = writeln!(s, "{name} = {}", quantity_text(v, *dims, frame));
            }
            let _ = writeln!(s, "x0 = {}", quantity_text(c.x0, LENGTH, frame));
            let _ = writeln!(s, "left = {}", location_text(c.left.location, frame));
            let _ = writeln!(s, "left_condition = {}", condition_text(c.left.condition));
            let _ = writeln!(s, "right = {}", location_text(c.right.location, frame));
            let _ = writeln!(s, "right_condition = {}", condition_text(c.right.condition));
            let _ = writeln!(s, "l = {}", c.l);
            if let Some(x) = c.center {
                let _ = writeln!(s, "center = {}", quantity_text(x, LENGTH, frame));
            }
        }
    }

    let mut section = |name: &str, lines: Vec<(&str, Option<String>)>| {
        let lines: Vec<_> = lines.into_iter().filter_map(|(k, v)| v.map(|v| format!("{k} = {v}"))).collect();
        if !lines.is_empty() {
            let _ = writeln!(s, "\n[{name}]\n{}", lines.join("\n"));
        }
    };
    let q = |v: Option<f64>, dims: Dims| v.map(|v| quantity_text(v, dims, frame));
    let n = |v: Option<usize>| v.map(|v| v.to_string());
    section(
        "solve",
        vec![
            ("emin", q(cfg.emin, ENERGY)),
            ("emax", q(cfg.emax, ENERGY)),
            ("grid_points", n(cfg.grid_points)),
            (
                "grid",
                cfg.grid.map(|g| match g {
                    GridKind::Linear => "linear".to_string(),
                    GridKind::Log => "log".to_string(),
                }),
            ),
            ("refine_tol", q(cfg.refine_tol, DIMENSIONLESS)),
        ],
    );
    section("scan", vec![("points", n(cfg.scan_points)), ("trace_energy", q(cfg.trace_energy, ENERGY))]);
    section(
        "march",
        vec![
            ("step", q(cfg.march.step, LENGTH)),
            ("saturation_tol", q(cfg.march.saturation_tol, DIMENSIONLESS)),
            ("max_extent", q(cfg.march.max_extent, LENGTH)),
            ("r_min", q(cfg.march.r_min, LENGTH)),
        ],
    );
    section(
        "bands",
        vec![
            ("a", q(cfg.bands.a, LENGTH)),
            ("g", q(cfg.bands.g, ENERGY_LENGTH)),
            ("x0", q(cfg.bands.x0, LENGTH)),
            ("nbands", n(cfg.bands.nbands)),
            ("kpoints", n(cfg.bands.kpoints)),
        ],
    );
    let o = &cfg.output;
    let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    section(
        "output",
        vec![
            ("format", (o.format != OutputFormat::Text).then(|| o.format.name().to_string())),
            ("path", path(&o.path)),
            ("csv", path(&o.csv)),
            ("trace", path(&o.trace)),
            ("oracle", o.oracle.then(|| "true".to_string())),
            ("oracle_path", path(&o.oracle_path)),
        ],
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_preset_config() {
        let cfg = parse_config("[problem]\npreset = hydrogen\n").unwrap();
        assert_eq!(cfg, RunConfig::preset(Command::Solve, "hydrogen"));
    }

    #[test]
    fn johnson_needs_mass() {
        let err = parse_config("[problem]\npreset = johnson-dwp\n").unwrap_err();
        assert!(matches!(&err, ConfigError::Missing { field, .. } if field == "mass"), "{err}");
        assert!(err.to_string().contains("`mass`"));
        let ok = parse_config("[problem]\npreset = johnson-dwp\nmass = 1.0 u\n").unwrap();
        assert!(matches!(ok.problem, Some(ProblemSource::Preset { mass: Some(m), .. }) if m == 1.0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_config("[solve]\n\nbogus = 1\n").unwrap_err();
        assert_eq!(
            err,
            ConfigError::Field { line: 3, field: "bogus".into(), message: "unknown key in [solve]".into() }
        );
        let err = parse_config("[problem]\npreset = nope\n").unwrap_err();
        assert_eq!(err, ConfigError::UnknownPreset { line: 2, name: "nope".into() });
        let err = parse_config("[solve]\nemin = 1\n").unwrap_err();
        assert!(matches!(err, ConfigError::Field { line: 2, ref field, .. } if field == "emin"), "{err}");
        let err = parse_config("emin = 1 ha\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 1, .. }));
        let err = parse_config("[wat]\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 1, .. }));
        let err = parse_config("[solve]\nemin = 1 ha\nemin = 2 ha\n").unwrap_err();
        assert!(matches!(err, ConfigError::Field { line: 3, .. }));
    }

    #[test]
    fn windows_must_be_non_empty() {
        let err = parse_config("[problem]\npreset = morse\n[solve]\nemin = -1 au\nemax = -2 au\n").unwrap_err();
        assert!(matches!(err, ConfigError::Field { line: 5, ref field, .. } if field == "emax"), "{err}");
    }

    #[test]
    fn energies_convert_into_the_preset_unit() {
        let cfg = parse_config("[problem]\npreset = hydrogen\n[solve]\nemin = -1 hartree\n").unwrap();
        assert_eq!(cfg.emin, Some(-2.0));
    }

    #[test]
    fn preset_overrides_are_parameters() {
        let cfg = parse_config("[problem]\npreset = morse\ndepth = 150 au\n").unwrap();
        let Some(ProblemSource::Preset { overrides, .. }) = cfg.problem else { panic!() };
        assert_eq!(overrides, vec![("depth".to_string(), 150.0)]);
        assert!(parse_config("[problem]\npreset = morse\nwidth = 1 bohr\n").is_err());
    }

    #[test]
    fn custom_problem_needs_every_parameter() {
        let err = parse_config("[problem]\npotential = morse\ndepth = 1 au\nrange = 1 1/bohr\n").unwrap_err();
        assert!(matches!(err, ConfigError::Missing { ref field, .. } if field == "r_e"), "{err}");
    }

    #[test]
    fn full_morse_problem_round_trips() {
        let text = "\
[run]
command = scan

[problem]
potential = morse
convention = reduced
depth = 188.4355 au
range = 0.711248 1/bohr
r_e = 1.9975 bohr
x0 = 1.9975 bohr
left = origin
right = infinity
right_condition = value

[solve]
emin = -188.4355 au
emax = -0.01 au
grid_points = 2000
grid = linear
refine_tol = 1e-12

[scan]
points = 5000

[march]
step = 0.001 bohr
max_extent = 200 bohr

[output]
format = plotdata
path = morse.dat
";
        let cfg = parse_config(text).unwrap();
        let again = parse_config(&serialize_config(&cfg)).unwrap();
        assert_eq!(cfg, again);
        let Some(ProblemSource::Custom(c)) = &cfg.problem else { panic!() };
        assert_eq!(c.potential, cfm::presets::MORSE);
        assert_eq!(c.left.location, Location::Origin);
    }

    #[test]
    fn spectroscopic_round_trip() {
        let mut cfg = RunConfig::preset(Command::Solve, "johnson-dwp");
        cfg.problem = Some(ProblemSource::Preset {
            name: "johnson-dwp".into(),
            mass: Some(0.9),
            overrides: vec![("morse_center".into(), 1.45), ("gaussian_exponent".into(), 180.0)],
        });
        cfg.emax = Some(20000.0);
        cfg.march.step = Some(2.5e-4);
        cfg.output.oracle = true;
        let text = serialize_config(&cfg);
        let mut expected = cfg.clone();
        if let Some(ProblemSource::Preset { overrides, .. }) = &mut expected.problem {
            overrides.reverse();
        }
        assert_eq!(parse_config(&text).unwrap(), expected, "{text}");
    }
}
