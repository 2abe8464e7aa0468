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

//! Executes a [`RunConfig`].

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cfm::bands::{compute_bands, k_grid, BlochProblem};
use cfm::eigensolver::{
    eigenvalue_function, energy_grid, solve_spectrum, BoundaryCondition, GridKind, Level, Location, Parity,
    ProblemSpec, ScaledPotential, SolveOptions,
};
use cfm::oracles::{delta_comb_exact, OracleResult};
use cfm::potentials::PotentialSpec;
use cfm::presets::{self, BandPreset, BoundPreset, Preset, PresetError, PresetProblem};
use cfm::propagator::{march_trace, Boundary, Direction, MarchConfig};
use cfm::units::EnergyUnit;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{Command, ConfigError, CustomProblem, OutputFormat, ProblemSource, RunConfig};
use crate::output::{aligned, csv, sig};
use crate::params;
use crate::quantity::Frame;

/// Significant digits in tables and plot data.
pub const DIGITS: usize = 9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Units(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(ConfigError::UnknownPreset { .. }) => 4,
            CliError::Config(_) | CliError::Invalid(_) => 3,
            CliError::Solver(_) => 5,
            CliError::Io { .. } => 6,
            CliError::Units(_) => 7,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn preset_err(e: PresetError) -> CliError {
    match e {
        PresetError::Unknown(name) => CliError::Config(ConfigError::UnknownPreset { line: 0, name }),
        PresetError::MassRequired(name) => CliError::Config(ConfigError::Missing {
            field: "mass".into(),
            message: format!("preset `{name}` needs the reduced mass (`--mass` or `mass = <value> u`)"),
        }),
        e => CliError::Invalid(e.to_string()),
    }
}

/// A bound-state problem ready to solve, with its labels.
#[derive(Debug, Clone)]
pub struct BoundRun {
    pub label: String,
    pub source: String,
    pub unit: EnergyUnit,
    pub frame: Frame,
    pub preset: Preset,
}

impl BoundRun {
    pub fn bound(&self) -> &BoundPreset {
        match &self.preset.problem {
            PresetProblem::Bound(b) => b,
            PresetProblem::Bands(_) => unreachable!("bound run holds a bound problem"),
        }
    }
}

fn apply_march(cfg: &RunConfig, march: &mut MarchConfig) {
    let m = &cfg.march;
    march.step = m.step.unwrap_or(march.step);
    march.saturation_tol = m.saturation_tol.unwrap_or(march.saturation_tol);
    march.max_extent = m.max_extent.unwrap_or(march.max_extent);
    march.r_min = m.r_min.unwrap_or(march.r_min);
}

fn load_table(path: &Path) -> Result<PotentialSpec, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let (mut x, mut v) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split_whitespace().map(str::parse::<f64>);
        match (cols.next(), cols.next()) {
            (Some(Ok(a)), Some(Ok(b))) => {
                x.push(a);
                v.push(b);
            }
            _ => return Err(CliError::Invalid(format!("{}:{}: expected two numeric columns", path.display(), i + 1))),
        }
    }
    Ok(PotentialSpec::Tabulated { x, v })
}

fn custom_bound(cfg: &RunConfig, c: &CustomProblem) -> Result<BoundRun, CliError> {
    let potential = match &c.table {
        Some(path) => load_table(path)?,
        None => c.potential.clone(),
    };
    let mass = c.convention.mass().map_err(|e| CliError::Invalid(e.to_string()))?;
    let problem = ProblemSpec {
        potential,
        x0: c.x0,
        left: BoundaryCondition::new(c.left.condition, c.left.location),
        right: BoundaryCondition::new(c.right.condition, c.right.location),
        l: c.l,
        mass,
        parity: c.center.map_or(Parity::None, |center| Parity::SymmetricSplit { center }),
    };
    let missing = |field: &str| ConfigError::Missing {
        field: field.into(),
        message: "custom problems need an energy window".into(),
    };
    let emin = cfg.emin.ok_or_else(|| missing("emin"))?;
    let emax = cfg.emax.ok_or_else(|| missing("emax"))?;
    let options = SolveOptions::new((emin, emax), 1000);
    let bound = BoundPreset { problem, options, march: MarchConfig::default() };
    Ok(BoundRun {
        label: format!("custom {}", c.potential.name()),
        source: "config".into(),
        unit: c.unit,
        frame: cfg.frame(),
        preset: Preset { name: "custom", source: "config", unit: c.unit, problem: PresetProblem::Bound(bound) },
    })
}

/// Builds the bound-state problem named by `cfg`, with every override applied.
pub fn resolve_bound(cfg: &RunConfig) -> Result<BoundRun, CliError> {
    let mut run = match &cfg.problem {
        None => {
            return Err(ConfigError::Missing {
                field: "preset".into(),
                message: "name a preset or give a [problem] block".into(),
            }
            .into())
        }
        Some(ProblemSource::Custom(c)) => custom_bound(cfg, c)?,
        Some(ProblemSource::Preset { name, mass, overrides }) => {
            let mut preset = presets::preset(name, *mass).map_err(preset_err)?;
            let PresetProblem::Bound(b) = &mut preset.problem else {
                return Err(CliError::Invalid(format!("`{name}` is a band preset; use the bands command")));
            };
            for (key, value) in overrides {
                if !params::set(&mut b.problem.potential, key, *value) {
                    return Err(ConfigError::Missing {
                        field: key.clone(),
                        message: format!("not a parameter of `{name}`"),
                    }
                    .into());
                }
            }
            BoundRun {
                label: preset.name.to_string(),
                source: preset.source.to_string(),
                unit: preset.unit,
                frame: crate::config::preset_frame(name),
                preset,
            }
        }
    };
    let PresetProblem::Bound(b) = &mut run.preset.problem else { unreachable!() };
    let (lo, hi) = b.options.window;
    b.options.window = (cfg.emin.unwrap_or(lo), cfg.emax.unwrap_or(hi));
    if b.options.window.0 >= b.options.window.1 {
        return Err(CliError::Invalid(format!(
            "energy window [{}, {}] is empty",
            b.options.window.0, b.options.window.1
        )));
    }
    b.options.grid_points = cfg.grid_points.unwrap_or(b.options.grid_points);
    b.options.grid = cfg.grid.unwrap_or(b.options.grid);
    if let Some(t) = cfg.refine_tol {
        b.options.criteria.refine_tol = t;
    }
    apply_march(cfg, &mut b.march);
    b.problem.validate().map_err(|e| CliError::Invalid(e.to_string()))?;
    b.march.validate().map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok(run)
}

/// What a run produced: text for stdout and the files written.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Report {
    pub stdout: String,
    pub files: Vec<PathBuf>,
}

fn emit(report: &mut Report, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut f = fs::File::create(p).map_err(io_err(p))?;
            f.write_all(text.as_bytes()).map_err(io_err(p))?;
            report.files.push(p.to_path_buf());
        }
        None => report.stdout.push_str(text),
    }
    Ok(())
}

/// Runs the configured command. Output goes to the configured files, the
/// rest is returned for stdout.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    match cfg.command {
        Command::Solve => run_solve(cfg),
        Command::Scan => run_scan(cfg),
        Command::Bands => run_bands(cfg),
    }
}

fn grid_name(g: GridKind) -> &'static str {
    match g {
        GridKind::Linear => "linear",
        GridKind::Log => "log",
    }
}

fn header(run: &BoundRun, command: &str) -> String {
    let b = run.bound();
    let o = &b.options;
    let mut h = String::new();
    let _ = writeln!(h, "# cfm {command}: {} ({})", run.label, run.source);
    let _ = writeln!(h, "# potential: {}", b.problem.potential.name());
    let _ = writeln!(
        h,
        "# unit: {}; window [{}, {}]; grid {} {}; refine_tol {}",
        run.unit,
        sig(o.window.0, DIGITS),
        sig(o.window.1, DIGITS),
        o.grid_points,
        grid_name(o.grid),
        sig(o.criteria.refine_tol, 3)
    );
    let m = &b.march;
    let _ = writeln!(
        h,
        "# march: step {}, saturation_tol {}, max_extent {}, r_min {} ({})",
        sig(m.step, 6),
        sig(m.saturation_tol, 3),
        sig(m.max_extent, 6),
        sig(m.r_min, 3),
        run.frame.length
    );
    h
}

/// Eigenvalue table rows: index, E_cfm, E_oracle (possibly blank), residual.
pub fn solve_rows(levels: &[Level], oracle: Option<&OracleResult>) -> Vec<Vec<String>> {
    levels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let exact = oracle.and_then(|o| o.levels.get(i)).map_or(String::new(), |e| sig(*e, DIGITS));
            vec![l.index.to_string(), sig(l.energy, DIGITS), exact, sig(l.residual, DIGITS)]
        })
        .collect()
}

/// Largest `|E_cfm − E_oracle| / |E_oracle|` over rows that have both,
/// computed from the printed values.
pub fn max_relative_error(rows: &[Vec<String>]) -> Option<f64> {
    rows.iter()
        .filter_map(|r| {
            let cfm: f64 = r.get(1)?.parse().ok()?;
            let exact: f64 = r.get(2)?.parse().ok()?;
            Some(if exact == 0.0 { (cfm - exact).abs() } else { ((cfm - exact) / exact).abs() })
        })
        .reduce(f64::max)
}

pub const SOLVE_COLUMNS: [&str; 4] = ["index", "E_cfm", "E_oracle", "residual"];

fn run_solve(cfg: &RunConfig) -> Result<Report, CliError> {
    let run = resolve_bound(cfg)?;
    let b = run.bound();
    let levels = solve_spectrum(&b.problem, &b.march, &b.options).map_err(|e| CliError::Solver(e.to_string()))?;
    let oracle = if cfg.output.oracle {
        presets::oracle_for(&run.preset, levels.len().max(1)).map_err(|e| CliError::Solver(e.to_string()))?
    } else {
        None
    };
    let rows = solve_rows(&levels, oracle.as_ref());
    let mut head = header(&run, "solve");
    if cfg.output.oracle {
        let _ = writeln!(head, "# oracle: {}", oracle.as_ref().map_or("none available", |o| o.method));
    }
    let summary = if cfg.output.oracle {
        Some(match max_relative_error(&rows) {
            Some(e) => format!("max relative error vs oracle: {} over {} levels\n", sig(e, 3), rows.len()),
            None => "max relative error vs oracle: n/a (no oracle rows)\n".to_string(),
        })
    } else {
        None
    };
    let summary = summary.unwrap_or_default();
    let table = csv(&SOLVE_COLUMNS, &rows);
    let main = match cfg.output.format {
        OutputFormat::Csv if cfg.output.path.is_none() && !summary.is_empty() => format!("{table}# {summary}"),
        OutputFormat::Csv => table.clone(),
        OutputFormat::Text | OutputFormat::PlotData => format!("{head}{}{summary}", aligned(&SOLVE_COLUMNS, &rows)),
    };
    let mut report = Report::default();
    emit(&mut report, cfg.output.path.as_deref(), &main)?;
    if let Some(p) = &cfg.output.csv {
        emit(&mut report, Some(p), &table)?;
    }
    if cfg.output.path.is_some() {
        report.stdout.push_str(&summary);
    }
    Ok(report)
}

fn full_domain(b: &BoundPreset) -> ProblemSpec {
    ProblemSpec { parity: Parity::None, ..b.problem.clone() }
}

fn run_scan(cfg: &RunConfig) -> Result<Report, CliError> {
    let run = resolve_bound(cfg)?;
    let b = run.bound();
    let problem = full_domain(b);
    let (lo, hi) = b.options.window;
    let points = cfg.scan_points.unwrap_or(b.options.grid_points);
    let grid = energy_grid(lo, hi, points, b.options.grid).map_err(|e| CliError::Invalid(e.to_string()))?;
    let samples: Vec<_> = grid
        .par_iter()
        .map(|&e| eigenvalue_function(e, &problem, &b.march))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Solver(e.to_string()))?;
    let mut report = Report::default();
    let body = match cfg.output.format {
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = samples
                .iter()
                .map(|s| vec![sig(s.energy, DIGITS), if s.is_pole { String::new() } else { sig(s.f, DIGITS) }])
                .collect();
            csv(&["E", "F"], &rows)
        }
        OutputFormat::Text | OutputFormat::PlotData => {
            let mut out = header(&run, "scan");
            out = out.replacen(&format!("grid {} ", b.options.grid_points), &format!("points {points} "), 1);
            let _ = writeln!(out, "# domain: full, F = l+ - l-; pole rows are left blank");
            let _ = writeln!(out, "# E F");
            for s in &samples {
                if s.is_pole {
                    out.push('\n');
                } else {
                    let _ = writeln!(out, "{} {}", sig(s.energy, DIGITS), sig(s.f, DIGITS));
                }
            }
            out
        }
    };
    emit(&mut report, cfg.output.path.as_deref(), &body)?;
    if let Some(path) = &cfg.output.trace {
        let energy = cfg.trace_energy.unwrap_or(0.5 * (lo + hi));
        let text = trace_text(&run, &problem, energy)?;
        emit(&mut report, Some(path), &text)?;
    }
    Ok(report)
}

fn boundary(loc: Location) -> Boundary {
    match loc {
        Location::Finite(x) => Boundary::Point(x),
        Location::Infinity => Boundary::Infinity,
        Location::Origin => Boundary::Origin,
    }
}

/// Per-step canonical functions of both marches at one energy.
fn trace_text(run: &BoundRun, problem: &ProblemSpec, energy: f64) -> Result<String, CliError> {
    let b = run.bound();
    let veff = ScaledPotential::new(&problem.potential, problem.mass, problem.l);
    let c = problem.mass.factor();
    let mut out = String::new();
    let _ = writeln!(out, "# cfm trace: {} at E = {} {}", run.label, sig(energy, DIGITS), run.unit);
    let sides = [("left", problem.left, Direction::TowardLeft), ("right", problem.right, Direction::TowardRight)];
    for (i, (name, bc, dir)) in sides.into_iter().enumerate() {
        let cfg = b.march.toward(dir);
        let (outcome, states) =
            march_trace(c * energy, &veff, problem.x0, boundary(bc.location), bc.condition.ratio_kind(), &cfg)
                .map_err(|e| CliError::Solver(e.to_string()))?;
        if i > 0 {
            out.push_str("\n\n");
        }
        let _ = writeln!(
            out,
            "# {name} march: x_stop {}, saturated {}, rescalings {}",
            sig(outcome.x_stop, DIGITS),
            outcome.saturated,
            outcome.rescalings
        );
        let _ = writeln!(out, "# x alpha alpha' beta beta'");
        for s in &states {
            let _ = writeln!(
                out,
                "{} {} {} {} {}",
                sig(s.x, DIGITS),
                sig(s.alpha, DIGITS),
                sig(s.alpha_p, DIGITS),
                sig(s.beta, DIGITS),
                sig(s.beta_p, DIGITS)
            );
        }
    }
    Ok(out)
}

/// The band problem named by `cfg`, with flag overrides applied.
pub fn resolve_bands(cfg: &RunConfig) -> Result<(String, BandPreset), CliError> {
    let s = &cfg.bands;
    let (label, mut bp) = match &cfg.problem {
        Some(ProblemSource::Preset { name, mass, .. }) => {
            let p = presets::preset(name, *mass).map_err(preset_err)?;
            match p.problem {
                PresetProblem::Bands(bp) => (format!("{} ({})", p.name, p.source), bp),
                PresetProblem::Bound(_) => return Err(CliError::Invalid(format!("`{name}` is not a band preset"))),
            }
        }
        Some(ProblemSource::Custom(_)) => {
            return Err(CliError::Invalid("band problems are configured in [bands]".into()))
        }
        None => {
            let need = |v: Option<f64>, field: &str| {
                v.ok_or_else(|| ConfigError::Missing {
                    field: field.into(),
                    message: "delta-comb bands need a, g and nbands".into(),
                })
            };
            let a = need(s.a, "a")?;
            let g = need(s.g, "g")?;
            let n = s.nbands.ok_or_else(|| ConfigError::Missing {
                field: "nbands".into(),
                message: "number of bands to compute".into(),
            })?;
            let problem = BlochProblem::new(a, g, s.x0.unwrap_or(0.5 * a));
            (
                "delta comb".to_string(),
                BandPreset { problem, n_bands: n, k_points: 101, e_max: 1.0, march: MarchConfig::default() },
            )
        }
    };
    bp.problem.lattice = s.a.unwrap_or(bp.problem.lattice);
    bp.problem.strength = s.g.unwrap_or(bp.problem.strength);
    bp.problem.x0 = s.x0.unwrap_or(bp.problem.x0);
    bp.n_bands = s.nbands.unwrap_or(bp.n_bands);
    bp.k_points = s.kpoints.unwrap_or(bp.k_points);
    apply_march(cfg, &mut bp.march);
    bp.problem.validate().map_err(|e| CliError::Invalid(e.to_string()))?;
    bp.march.validate().map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok((label, bp))
}

fn run_bands(cfg: &RunConfig) -> Result<Report, CliError> {
    let (label, bp) = resolve_bands(cfg)?;
    let ks = k_grid(&bp.problem, bp.k_points);
    let bands = compute_bands(&bp.problem, bp.n_bands, &ks, &bp.march).map_err(|e| CliError::Solver(e.to_string()))?;
    let p = &bp.problem;
    let mut meta = String::new();
    let _ = writeln!(meta, "# cfm bands: {label}");
    let _ = writeln!(
        meta,
        "# a {} bohr, g {} hartree*bohr, x0 {} bohr; {} bands; {} k-points on [0, pi/a]; energies in Ha",
        sig(p.lattice, DIGITS),
        sig(p.strength, DIGITS),
        sig(p.x0, DIGITS),
        bp.n_bands,
        bp.k_points
    );
    let columns: Vec<String> =
        std::iter::once("k".to_string()).chain((1..=bp.n_bands).map(|n| format!("E{n}"))).collect();
    let rows: Vec<Vec<String>> = bands
        .points
        .iter()
        .map(|pt| std::iter::once(sig(pt.k, DIGITS)).chain(pt.energies.iter().map(|e| sig(*e, DIGITS))).collect())
        .collect();
    let oracle: Vec<Vec<f64>> = bands
        .points
        .par_iter()
        .map(|pt| delta_comb_exact(p.lattice, p.strength, pt.k, bp.n_bands, p.mass))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Solver(e.to_string()))?;
    let deviation = bands
        .points
        .iter()
        .zip(&oracle)
        .flat_map(|(pt, o)| pt.energies.iter().zip(o).map(|(e, x)| (e - x).abs()))
        .fold(0.0, f64::max);
    let oracle_rows: Vec<Vec<String>> = bands
        .points
        .iter()
        .zip(&oracle)
        .map(|(pt, o)| std::iter::once(sig(pt.k, DIGITS)).chain(o.iter().map(|e| sig(*e, DIGITS))).collect())
        .collect();
    let summary = format!("# max |E_cfm - E_oracle|: {} Ha\n", sig(deviation, 3));

    let render = |head: &str, rows: &[Vec<String>]| -> String {
        match cfg.output.format {
            OutputFormat::Csv => csv(&columns.iter().map(String::as_str).collect::<Vec<_>>(), rows),
            _ => {
                let mut out = String::from(head);
                let _ = writeln!(out, "# {}", columns.join(" "));
                for r in rows {
                    let _ = writeln!(out, "{}", r.join(" "));
                }
                out
            }
        }
    };
    let mut report = Report::default();
    let data = render(&meta, &rows);
    emit(&mut report, cfg.output.path.as_deref(), &data)?;
    let oracle_path = cfg
        .output
        .oracle_path
        .clone()
        .or_else(|| cfg.output.path.as_ref().map(|p| PathBuf::from(format!("{}.oracle", p.display()))));
    let oracle_meta = format!(
        "{}# oracle: delta-comb dispersion cos(ka) = cos(qa) + (g/q) sin(qa), by bisection\n",
        meta.replacen("cfm bands", "oracle bands", 1)
    );
    match oracle_path {
        Some(path) => {
            emit(&mut report, Some(&path), &render(&oracle_meta, &oracle_rows))?;
            report.stdout.push_str(&summary);
        }
        None if cfg.output.oracle => {
            report.stdout.push_str("\n\n");
            report.stdout.push_str(&render(&oracle_meta, &oracle_rows));
            report.stdout.push_str(&summary);
        }
        None => {}
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_matches_rows() {
        let rows = vec![
            vec!["1".into(), "-1.00000001".into(), "-1".into(), "0".into()],
            vec!["2".into(), "-0.25".into(), "".into(), "0".into()],
            vec!["3".into(), "-0.111111".into(), "-0.111111111".into(), "0".into()],
        ];
        let e = max_relative_error(&rows).unwrap();
        assert!((e - 0.999e-6).abs() < 1e-12, "{e}");
    }

    #[test]
    fn exit_codes_are_distinct() {
        let errors = [
            CliError::Config(ConfigError::Syntax { line: 1, message: String::new() }),
            CliError::Config(ConfigError::UnknownPreset { line: 1, name: String::new() }),
            CliError::Solver(String::new()),
            CliError::Io { path: PathBuf::new(), source: std::io::Error::other("x") },
            CliError::Units(String::new()),
        ];
        let mut codes: Vec<u8> = errors.iter().map(CliError::exit_code).collect();
        codes.sort_unstable();
        codes.dedup();
        assert_eq!(codes.len(), errors.len());
        assert!(!codes.contains(&0));
    }

    #[test]
    fn overrides_reach_the_potential() {
        let mut cfg = RunConfig::preset(Command::Solve, "morse");
        cfg.problem =
            Some(ProblemSource::Preset { name: "morse".into(), mass: None, overrides: vec![("depth".into(), 100.0)] });
        let run = resolve_bound(&cfg).unwrap();
        assert!(matches!(run.bound().problem.potential, PotentialSpec::Morse { depth, .. } if depth == 100.0));
    }

    #[test]
    fn band_presets_are_not_bound_problems() {
        let cfg = RunConfig::preset(Command::Solve, "kp-1band");
        assert_eq!(resolve_bound(&cfg).unwrap_err().exit_code(), 3);
    }
}
