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

//! Named benchmark problems with their native units, windows and grids.

use std::f64::consts::PI;

use thiserror::Error;

use crate::bands::{lattice_from_band_count, BlochProblem};
use crate::eigensolver::{
    well_width_from_count, BoundaryCondition, Condition, GridKind, Location, Parity, ProblemSpec, RootCriteria,
    SolveOptions,
};
use crate::oracles::{self, NumerovReference, OracleError, OracleResult};
use crate::potentials::PotentialSpec;
use crate::propagator::MarchConfig;
use crate::units::{EnergyUnit, MassConvention, UnitError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PresetError {
    #[error("unknown preset `{0}`; try list-presets")]
    Unknown(String),
    #[error("preset `{0}` needs a reduced mass (set `mass`, in u)")]
    MassRequired(&'static str),
    #[error(transparent)]
    Units(#[from] UnitError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// A bound-state problem with everything needed to solve it.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundPreset {
    pub problem: ProblemSpec,
    pub options: SolveOptions,
    pub march: MarchConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandPreset {
    pub problem: BlochProblem,
    pub n_bands: usize,
    pub k_points: usize,
    pub e_max: f64,
    pub march: MarchConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PresetProblem {
    Bound(BoundPreset),
    Bands(BandPreset),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    /// Reference result the preset reproduces.
    pub source: &'static str,
    pub unit: EnergyUnit,
    pub problem: PresetProblem,
}

pub struct PresetInfo {
    pub name: &'static str,
    pub source: &'static str,
    pub summary: &'static str,
    pub needs_mass: bool,
}

pub const REGISTRY: &[PresetInfo] = &[
    PresetInfo {
        name: "infinite-well-25",
        source: "n^2/625 a.u. ladder",
        summary: "infinite well, E25 = 1 a.u.",
        needs_mass: false,
    },
    PresetInfo {
        name: "finite-well-24",
        source: "finite-well roots",
        summary: "finite well V0 = 1 a.u., 24 levels",
        needs_mass: false,
    },
    PresetInfo {
        name: "harmonic-26",
        source: "omega0 (n + 1/2) ladder",
        summary: "harmonic oscillator, omega0 = 2/51 a.u.",
        needs_mass: false,
    },
    PresetInfo {
        name: "dgw",
        source: "double-well doublets",
        summary: "symmetric double Gaussian well",
        needs_mass: false,
    },
    PresetInfo {
        name: "johnson-dwp",
        source: "Johnson double-well levels",
        summary: "asymmetric Morse + Gaussian well, cm-1 / Angstrom",
        needs_mass: true,
    },
    PresetInfo {
        name: "hydrogen",
        source: "-1/n^2 Ry series",
        summary: "hydrogen atom s levels, Ry",
        needs_mass: false,
    },
    PresetInfo {
        name: "morse",
        source: "Morse closed form",
        summary: "Morse potential, hbar = 2mu = 1",
        needs_mass: false,
    },
    PresetInfo {
        name: "kp-1band",
        source: "one band below 1 Ha",
        summary: "delta comb a = 2.22, g = 1",
        needs_mass: false,
    },
    PresetInfo {
        name: "kp-3band",
        source: "three bands below 1 Ha",
        summary: "delta comb a = 6.66, g = 1",
        needs_mass: false,
    },
    PresetInfo {
        name: "kp-5band",
        source: "five bands below 1 Ha",
        summary: "delta comb a = 11.12, g = 1",
        needs_mass: false,
    },
];

pub const DGW: PotentialSpec = PotentialSpec::DoubleGaussian { depth: 12.0, exponent: 0.1, offset: 5.0 };
pub const MORSE: PotentialSpec = PotentialSpec::Morse { depth: 188.4355, range: 0.711248, r_e: 1.9975 };
pub const JOHNSON: PotentialSpec = PotentialSpec::MorseGaussian {
    gaussian_height: 1.0e4,
    morse_range: 1.54,
    gaussian_exponent: 200.0,
    morse_depth: 31250.0,
    morse_center: 1.5,
    gaussian_center: 1.6,
};
pub const HARMONIC_OMEGA: f64 = 2.0 / 51.0;

/// Width of the infinite well whose 25th level is 1 a.u.
pub fn infinite_well_width() -> f64 {
    25.0 * PI / 2f64.sqrt()
}

fn value(location: Location) -> BoundaryCondition {
    BoundaryCondition::new(Condition::NullValue, location)
}

fn options(window: (f64, f64), grid_points: usize, grid: GridKind, index_base: u32) -> SolveOptions {
    SolveOptions { window, grid_points, grid, criteria: RootCriteria::default(), index_base }
}

fn bound(name: &'static str, source: &'static str, unit: EnergyUnit, b: BoundPreset) -> Preset {
    Preset { name, source, unit, problem: PresetProblem::Bound(b) }
}

pub fn infinite_well() -> Preset {
    let a = infinite_well_width();
    bound(
        "infinite-well-25",
        "n^2/625 a.u. ladder",
        EnergyUnit::Hartree,
        BoundPreset {
            problem: ProblemSpec {
                potential: PotentialSpec::InfiniteWell { width: a },
                x0: 0.37 * a / 2.0,
                left: value(Location::Finite(0.0)),
                right: value(Location::Finite(a)),
                l: 0,
                mass: MassConvention::atomic(),
                parity: Parity::SymmetricSplit { center: a / 2.0 },
            },
            options: options((1e-4, 1.05), 2000, GridKind::Linear, 1),
            march: MarchConfig::default(),
        },
    )
}

pub fn finite_well() -> Preset {
    let mass = MassConvention::atomic();
    let a = well_width_from_count(25, 1.0, mass);
    bound(
        "finite-well-24",
        "finite-well roots",
        EnergyUnit::Hartree,
        BoundPreset {
            problem: ProblemSpec {
                potential: PotentialSpec::FiniteWell { width: a, depth: 1.0 },
                x0: 0.37 * a / 2.0,
                left: value(Location::Infinity),
                right: value(Location::Infinity),
                l: 0,
                mass,
                parity: Parity::SymmetricSplit { center: a / 2.0 },
            },
            options: options((1e-4, 0.999), 2000, GridKind::Linear, 1),
            march: MarchConfig::default(),
        },
    )
}

pub fn harmonic() -> Preset {
    bound(
        "harmonic-26",
        "omega0 (n + 1/2) ladder",
        EnergyUnit::Hartree,
        BoundPreset {
            problem: ProblemSpec {
                potential: PotentialSpec::Harmonic { k_elastic: HARMONIC_OMEGA * HARMONIC_OMEGA },
                x0: -1.0,
                left: value(Location::Infinity),
                right: value(Location::Infinity),
                l: 0,
                mass: MassConvention::atomic(),
                parity: Parity::SymmetricSplit { center: 0.0 },
            },
            options: options((1e-3, 1.01), 2000, GridKind::Linear, 0),
            march: MarchConfig::default(),
        },
    )
}

pub fn dgw() -> Preset {
    bound(
        "dgw",
        "double-well doublets",
        EnergyUnit::Hartree,
        BoundPreset {
            problem: ProblemSpec {
                potential: DGW,
                x0: -5.0,
                left: value(Location::Infinity),
                right: value(Location::Infinity),
                l: 0,
                mass: MassConvention::atomic(),
                parity: Parity::SymmetricSplit { center: 0.0 },
            },
            options: options((-12.0, -1e-3), 600, GridKind::Linear, 0),
            march: MarchConfig { max_extent: 600.0, ..MarchConfig::default() },
        },
    )
}

/// Johnson's asymmetric well for a reduced mass in u. The mass is not part
/// of the parameter set, so it has no default.
pub fn johnson(reduced_mass_amu: f64) -> Result<Preset, PresetError> {
    let mass = MassConvention::spectroscopic(reduced_mass_amu)?;
    let x0 = JOHNSON.minimum_in(1.0, 2.5).unwrap_or(1.5);
    Ok(bound(
        "johnson-dwp",
        "Johnson double-well levels",
        EnergyUnit::InverseCentimeter,
        BoundPreset {
            problem: ProblemSpec {
                potential: JOHNSON,
                x0,
                left: value(Location::Origin),
                right: value(Location::Infinity),
                l: 0,
                mass,
                parity: Parity::None,
            },
            options: options((0.0, 0.9 * 31250.0), 3000, GridKind::Linear, 0),
            march: MarchConfig { step: 5e-4, max_extent: 50.0, r_min: 1e-3, ..MarchConfig::default() },
        },
    ))
}

pub fn hydrogen() -> Preset {
    bound(
        "hydrogen",
        "-1/n^2 Ry series",
        EnergyUnit::Rydberg,
        BoundPreset {
            problem: ProblemSpec {
                potential: PotentialSpec::Coulomb { charge: 1.0 },
                x0: 1.0,
                left: value(Location::Origin),
                right: value(Location::Infinity),
                l: 0,
                mass: MassConvention::reduced(),
                parity: Parity::None,
            },
            options: options((-1.2, -1.67e-3), 2000, GridKind::Log, 1),
            march: MarchConfig { step: 1e-2, max_extent: 5000.0, r_min: 1e-9, ..MarchConfig::default() },
        },
    )
}

pub fn morse() -> Preset {
    let PotentialSpec::Morse { depth, r_e, .. } = MORSE else { unreachable!() };
    bound(
        "morse",
        "Morse closed form",
        EnergyUnit::AtomicUnit,
        BoundPreset {
            problem: ProblemSpec {
                potential: MORSE,
                x0: r_e,
                left: value(Location::Origin),
                right: value(Location::Infinity),
                l: 0,
                mass: MassConvention::reduced(),
                parity: Parity::None,
            },
            options: options((-depth, -1e-2), 2000, GridKind::Linear, 1),
            march: MarchConfig::default(),
        },
    )
}

pub fn kronig_penney(n_bands: usize) -> Preset {
    let (name, source, lattice) = match n_bands {
        1 => ("kp-1band", "one band below 1 Ha", 2.22),
        3 => ("kp-3band", "three bands below 1 Ha", 6.66),
        5 => ("kp-5band", "five bands below 1 Ha", 11.12),
        n => ("kp-custom", "n bands below 1 Ha", lattice_from_band_count(n as u32, MassConvention::atomic())),
    };
    Preset {
        name,
        source,
        unit: EnergyUnit::Hartree,
        problem: PresetProblem::Bands(BandPreset {
            problem: BlochProblem::new(lattice, 1.0, 1.0),
            n_bands,
            k_points: 101,
            e_max: 1.0,
            march: MarchConfig::default(),
        }),
    }
}

/// Looks a preset up by name; `mass` (u) is required for `johnson-dwp` and
/// ignored elsewhere.
pub fn preset(name: &str, mass: Option<f64>) -> Result<Preset, PresetError> {
    match name {
        "infinite-well-25" => Ok(infinite_well()),
        "finite-well-24" => Ok(finite_well()),
        "harmonic-26" => Ok(harmonic()),
        "dgw" => Ok(dgw()),
        "johnson-dwp" => johnson(mass.ok_or(PresetError::MassRequired("johnson-dwp"))?),
        "hydrogen" => Ok(hydrogen()),
        "morse" => Ok(morse()),
        "kp-1band" => Ok(kronig_penney(1)),
        "kp-3band" => Ok(kronig_penney(3)),
        "kp-5band" => Ok(kronig_penney(5)),
        other => Err(PresetError::Unknown(other.to_string())),
    }
}

/// Reference levels for a bound preset, in the preset's index order.
pub fn oracle_levels(preset: &Preset) -> Result<Option<OracleResult>, PresetError> {
    let n = match preset.name {
        "infinite-well-25" => 25,
        "harmonic-26" => 26,
        "finite-well-24" | "dgw" | "hydrogen" => 24,
        "johnson-dwp" => 16,
        _ => 19,
    };
    oracle_for(preset, n)
}

/// Reference levels for the preset's current potential parameters. `n_levels`
/// bounds the count for spectra without a natural end; closed forms with a
/// finite spectrum return all of it.
pub fn oracle_for(preset: &Preset, n_levels: usize) -> Result<Option<OracleResult>, PresetError> {
    let PresetProblem::Bound(b) = &preset.problem else { return Ok(None) };
    let mass = b.problem.mass;
    let n = n_levels as u32;
    let result = match b.problem.potential {
        PotentialSpec::InfiniteWell { width } => oracles::infinite_well_exact(width, n, mass),
        PotentialSpec::FiniteWell { width, depth } => oracles::finite_well_exact(width, depth, mass),
        PotentialSpec::Harmonic { k_elastic } => {
            let omega = mass.hbar() * (2.0 * k_elastic / mass.two_mu()).sqrt();
            oracles::harmonic_exact(omega, n.saturating_sub(1))
        }
        PotentialSpec::Coulomb { charge } if mass == MassConvention::reduced() && b.problem.l == 0 => {
            let mut r = oracles::hydrogen_exact(n);
            r.levels.iter_mut().for_each(|e| *e *= charge * charge);
            r
        }
        PotentialSpec::Morse { depth, range, .. } if b.problem.l == 0 => oracles::morse_exact(depth, range, mass).0,
        PotentialSpec::DoubleGaussian { .. } => {
            numerov(&b.problem.potential, (-160.0, 160.0), mass, (-12.5, -1e-3), n_levels)?
        }
        PotentialSpec::MorseGaussian { .. } => {
            numerov(&b.problem.potential, (0.5, 6.0), mass, (0.0, 0.9 * 31250.0), n_levels)?
        }
        _ => return Ok(None),
    };
    Ok(Some(result))
}

fn numerov(
    potential: &PotentialSpec,
    domain: (f64, f64),
    mass: MassConvention,
    window: (f64, f64),
    n_levels: usize,
) -> Result<OracleResult, PresetError> {
    let v = |x: f64| potential.evaluate(x).unwrap_or(f64::NAN);
    Ok(NumerovReference::new(v, domain, mass).levels(window, n_levels, 1e-9)?)
}

/// Numerov levels of the double Gaussian well on `[−L, L]`.
pub fn dgw_reference(n_levels: usize) -> Result<OracleResult, PresetError> {
    numerov(&DGW, (-160.0, 160.0), MassConvention::atomic(), (-12.5, -1e-3), n_levels)
}

pub fn johnson_reference(mass: MassConvention, n_levels: usize) -> Result<OracleResult, PresetError> {
    numerov(&JOHNSON, (0.5, 6.0), mass, (0.0, 0.9 * 31250.0), n_levels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_resolve() {
        for info in REGISTRY {
            let mass = info.needs_mass.then_some(1.0);
            let p = preset(info.name, mass).unwrap();
            assert_eq!(p.name, info.name);
            assert_eq!(p.source, info.source);
        }
        assert!(matches!(preset("nope", None), Err(PresetError::Unknown(_))));
        assert!(matches!(preset("johnson-dwp", None), Err(PresetError::MassRequired(_))));
    }

    #[test]
    fn bound_presets_validate() {
        for info in REGISTRY {
            if let PresetProblem::Bound(b) = preset(info.name, Some(1.0)).unwrap().problem {
                b.problem.validate().unwrap();
                b.march.validate().unwrap();
            }
        }
    }

    #[test]
    fn lattice_widths() {
        for (n, a) in [(1, 2.22), (3, 6.66), (5, 11.12)] {
            let PresetProblem::Bands(b) = kronig_penney(n).problem else { panic!() };
            assert_eq!(b.problem.lattice, a);
            assert_eq!(b.problem.x0, 1.0);
            assert_eq!(b.problem.strength, 1.0);
        }
    }

    #[test]
    fn oracles_follow_the_potential() {
        let PresetProblem::Bound(b) = harmonic().problem else { panic!() };
        let h = oracle_levels(&harmonic()).unwrap().unwrap();
        assert_eq!(h.levels.len(), 26);
        assert!((h.levels[0] - HARMONIC_OMEGA / 2.0).abs() < 1e-15);
        let mut shifted = morse();
        if let PresetProblem::Bound(m) = &mut shifted.problem {
            m.problem.potential = PotentialSpec::Morse { depth: 50.0, range: 0.711248, r_e: 1.9975 };
        }
        let levels = oracle_levels(&shifted).unwrap().unwrap().levels;
        assert!(levels.len() < 19 && levels[0] > -50.0);
        assert!(b.problem.validate().is_ok());
        assert!(oracle_levels(&kronig_penney(1)).unwrap().is_none());
    }

    #[test]
    fn finite_well_width_from_count() {
        let PresetProblem::Bound(b) = finite_well().problem else { panic!() };
        let PotentialSpec::FiniteWell { width, .. } = b.problem.potential else { panic!() };
        assert!((width - 24.0 * PI / 2f64.sqrt()).abs() < 1e-12);
    }
}
