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

use std::path::PathBuf;
use std::process::ExitCode;

use cfm::eigensolver::GridKind;
use cfm::presets::REGISTRY;
use cfm::units::EnergyUnit;
use cfm_cli::config::{Command, OutputFormat, ProblemSource, RunConfig};
use cfm_cli::output::{aligned, sig};
use cfm_cli::quantity::{self, Dims, ENERGY, LENGTH};
use cfm_cli::{params, parse_config, run, CliError, ConfigError};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Canonical Function Method eigenvalue solver.
#[derive(Parser)]
#[command(name = "cfm", version, about)]
struct Cli {
    /// Configuration file; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Locate eigenvalues and print the level table.
    Solve(SolveArgs),
    /// Sample F(E) = l+ - l- over the window as plot data.
    Scan(ScanArgs),
    /// Delta-comb band structure E_n(k).
    Bands(BandsArgs),
    /// Convert an energy between units.
    ConvertUnits {
        #[arg(allow_negative_numbers = true)]
        value: f64,
        from: String,
        to: String,
    },
    /// List the built-in presets.
    ListPresets,
}

#[derive(Clone, Copy, ValueEnum)]
enum Grid {
    Linear,
    Log,
}

#[derive(Args)]
struct ProblemArgs {
    /// Preset name (see list-presets).
    #[arg(long, visible_alias = "potential")]
    preset: Option<String>,
    /// Reduced mass in u (johnson-dwp).
    #[arg(long)]
    mass: Option<f64>,
    /// Potential parameter override, e.g. `depth=150 au`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Window bottom; a bare number is in the preset's unit.
    #[arg(long, allow_negative_numbers = true)]
    emin: Option<String>,
    /// Window top; a bare number is in the preset's unit.
    #[arg(long, allow_negative_numbers = true)]
    emax: Option<String>,
    #[arg(long)]
    grid: Option<Grid>,
    /// Integration step; a bare number is in the preset's length unit.
    #[arg(long)]
    step: Option<String>,
    /// Outer cut-off of infinite boundaries.
    #[arg(long)]
    max_extent: Option<String>,
    /// Output file (stdout when absent).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    refine_tol: Option<f64>,
    /// Add the reference column and a max relative error line.
    #[arg(long)]
    oracle: bool,
    /// Also write the table as CSV.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Number of energies sampled.
    #[arg(long)]
    points: Option<usize>,
    /// Dump per-step canonical functions to this file.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
    /// Energy of the trace dump (default: window midpoint).
    #[arg(long, allow_negative_numbers = true)]
    trace_energy: Option<String>,
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct BandsArgs {
    /// Band preset (kp-1band, kp-3band, kp-5band).
    #[arg(long)]
    preset: Option<String>,
    /// Lattice constant in bohr.
    #[arg(long)]
    a: Option<f64>,
    /// Delta strength in hartree*bohr.
    #[arg(long, allow_negative_numbers = true)]
    g: Option<f64>,
    /// Anchor inside the cell, in bohr.
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    nbands: Option<usize>,
    #[arg(long)]
    kpoints: Option<usize>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Oracle overlay file (default: `<out>.oracle`).
    #[arg(long, value_name = "PATH")]
    oracle_out: Option<PathBuf>,
    /// Print the oracle overlay when no file is given.
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    csv: bool,
}

fn flag_quantity(text: &str, dims: Dims, cfg: &RunConfig, field: &str) -> Result<f64, CliError> {
    let frame = cfg.frame();
    let parsed = match text.trim().parse::<f64>() {
        Ok(v) => Ok(v),
        Err(_) => quantity::parse_quantity(text, dims, frame),
    };
    parsed.map_err(|message| CliError::Config(ConfigError::Field { line: 0, field: field.into(), message }))
}

fn apply_problem(cfg: &mut RunConfig, args: &ProblemArgs) -> Result<(), CliError> {
    if let Some(name) = &args.preset {
        cfg.problem = Some(ProblemSource::Preset { name: name.clone(), mass: None, overrides: Vec::new() });
    }
    if let Some(m) = args.mass {
        match &mut cfg.problem {
            Some(ProblemSource::Preset { mass, .. }) => *mass = Some(m),
            _ => {
                return Err(CliError::Config(ConfigError::Missing {
                    field: "preset".into(),
                    message: "--mass applies to a preset".into(),
                }))
            }
        }
    }
    if !args.set.is_empty() {
        let frame = cfg.frame();
        let Some(ProblemSource::Preset { name, overrides, .. }) = &mut cfg.problem else {
            return Err(CliError::Config(ConfigError::Missing {
                field: "preset".into(),
                message: "--set applies to a preset".into(),
            }));
        };
        let spec = cfm::presets::preset(name, Some(1.0))
            .ok()
            .and_then(|p| match p.problem {
                cfm::presets::PresetProblem::Bound(b) => Some(b.problem.potential),
                cfm::presets::PresetProblem::Bands(_) => None,
            })
            .ok_or_else(|| CliError::Config(ConfigError::UnknownPreset { line: 0, name: name.clone() }))?;
        for item in &args.set {
            let field_err = |field: &str, message: String| {
                CliError::Config(ConfigError::Field { line: 0, field: field.into(), message })
            };
            let (key, value) =
                item.split_once('=').ok_or_else(|| field_err("set", format!("`{item}` is not KEY=VALUE")))?;
            let key = key.trim();
            let dims =
                params::dims_of(&spec, key).ok_or_else(|| field_err(key, format!("not a parameter of `{name}`")))?;
            let v = quantity::parse_quantity(value, dims, frame).map_err(|m| field_err(key, m))?;
            overrides.retain(|(k, _)| k != key);
            overrides.push((key.to_string(), v));
        }
    }
    if let Some(e) = &args.emin {
        cfg.emin = Some(flag_quantity(e, ENERGY, cfg, "emin")?);
    }
    if let Some(e) = &args.emax {
        cfg.emax = Some(flag_quantity(e, ENERGY, cfg, "emax")?);
    }
    if let Some(g) = args.grid {
        cfg.grid = Some(match g {
            Grid::Linear => GridKind::Linear,
            Grid::Log => GridKind::Log,
        });
    }
    if let Some(s) = &args.step {
        cfg.march.step = Some(flag_quantity(s, LENGTH, cfg, "step")?);
    }
    if let Some(s) = &args.max_extent {
        cfg.march.max_extent = Some(flag_quantity(s, LENGTH, cfg, "max_extent")?);
    }
    if let Some(p) = &args.out {
        cfg.output.path = Some(p.clone());
    }
    Ok(())
}

fn load_config(path: Option<&PathBuf>, command: Command) -> Result<RunConfig, CliError> {
    let Some(path) = path else { return Ok(RunConfig::new(command)) };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    let mut cfg = parse_config(&text)?;
    cfg.command = command;
    Ok(cfg)
}

fn list_presets() -> String {
    let rows: Vec<Vec<String>> = REGISTRY
        .iter()
        .map(|p| {
            let unit = cfm::presets::preset(p.name, Some(1.0)).map_or(String::new(), |p| p.unit.symbol().to_string());
            vec![
                p.name.to_string(),
                p.source.to_string(),
                unit,
                if p.needs_mass { "yes" } else { "no" }.to_string(),
                p.summary.to_string(),
            ]
        })
        .collect();
    aligned(&["name", "source", "unit", "mass", "summary"], &rows)
}

fn execute(cli: Cli) -> Result<String, CliError> {
    let cfg = match cli.command {
        Cmd::ListPresets => return Ok(list_presets()),
        Cmd::ConvertUnits { value, from, to } => {
            let from: EnergyUnit = from.parse().map_err(|e: cfm::units::UnitError| CliError::Units(e.to_string()))?;
            let to: EnergyUnit = to.parse().map_err(|e: cfm::units::UnitError| CliError::Units(e.to_string()))?;
            return Ok(format!("{}\n", sig(cfm::units::convert_energy(value, from, to), 6)));
        }
        Cmd::Solve(a) => {
            let mut cfg = load_config(cli.config.as_ref(), Command::Solve)?;
            apply_problem(&mut cfg, &a.problem)?;
            cfg.grid_points = a.grid_points.or(cfg.grid_points);
            cfg.refine_tol = a.refine_tol.or(cfg.refine_tol);
            cfg.output.oracle |= a.oracle;
            if let Some(p) = a.csv {
                cfg.output.csv = Some(p);
            }
            cfg
        }
        Cmd::Scan(a) => {
            let mut cfg = load_config(cli.config.as_ref(), Command::Scan)?;
            apply_problem(&mut cfg, &a.problem)?;
            cfg.scan_points = a.points.or(cfg.scan_points);
            if let Some(t) = a.trace {
                cfg.output.trace = Some(t);
            }
            if let Some(e) = &a.trace_energy {
                cfg.trace_energy = Some(flag_quantity(e, ENERGY, &cfg, "trace_energy")?);
            }
            if a.csv {
                cfg.output.format = OutputFormat::Csv;
            }
            cfg
        }
        Cmd::Bands(a) => {
            let mut cfg = load_config(cli.config.as_ref(), Command::Bands)?;
            if let Some(name) = a.preset {
                cfg.problem = Some(ProblemSource::Preset { name, mass: None, overrides: Vec::new() });
            }
            let b = &mut cfg.bands;
            b.a = a.a.or(b.a);
            b.g = a.g.or(b.g);
            b.x0 = a.x0.or(b.x0);
            b.nbands = a.nbands.or(b.nbands);
            b.kpoints = a.kpoints.or(b.kpoints);
            if let Some(p) = a.out {
                cfg.output.path = Some(p);
            }
            if let Some(p) = a.oracle_out {
                cfg.output.oracle_path = Some(p);
            }
            cfg.output.oracle |= a.oracle;
            if a.csv {
                cfg.output.format = OutputFormat::Csv;
            }
            cfg
        }
    };
    Ok(run(&cfg)?.stdout)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("CFM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match execute(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("cfm: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
