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

//! Energy units, the handful of atomic constants the presets need, and the
//! mass convention that scales the Schrödinger equation.
//!
//! Conversions pivot through the electron-volt row of the classic
//! J / eV / Hz / cm⁻¹ table, so every pair is exactly invertible and
//! conversions compose transitively. The full printed table is still
//! available through [`printed_factor`].

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnitError {
    #[error("unknown energy unit `{0}`")]
    UnknownEnergyUnit(String),
    #[error("unknown length unit `{0}`")]
    UnknownLengthUnit(String),
    #[error("no printed table entry for {from} -> {to}")]
    NotInTable { from: EnergyUnit, to: EnergyUnit },
    #[error("mass convention requires positive factors, got hbar={hbar}, two_mu={two_mu}")]
    NonPositiveMass { hbar: f64, two_mu: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnergyUnit {
    Joule,
    ElectronVolt,
    Hertz,
    InverseCentimeter,
    Hartree,
    Rydberg,
    /// Atomic unit of energy; identical to the Hartree.
    AtomicUnit,
}

impl EnergyUnit {
    pub const ALL: [EnergyUnit; 7] = [
        EnergyUnit::Joule,
        EnergyUnit::ElectronVolt,
        EnergyUnit::Hertz,
        EnergyUnit::InverseCentimeter,
        EnergyUnit::Hartree,
        EnergyUnit::Rydberg,
        EnergyUnit::AtomicUnit,
    ];

    /// How many of `self` make up one electron-volt.
    fn per_ev(self) -> f64 {
        match self {
            EnergyUnit::Joule => EV_IN_JOULE,
            EnergyUnit::ElectronVolt => 1.0,
            EnergyUnit::Hertz => EV_IN_HERTZ,
            EnergyUnit::InverseCentimeter => EV_IN_WAVENUMBER,
            EnergyUnit::Hartree | EnergyUnit::AtomicUnit => 1.0 / HARTREE_EV,
            EnergyUnit::Rydberg => 1.0 / RYDBERG_EV,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            EnergyUnit::Joule => "J",
            EnergyUnit::ElectronVolt => "eV",
            EnergyUnit::Hertz => "Hz",
            EnergyUnit::InverseCentimeter => "cm-1",
            EnergyUnit::Hartree => "Ha",
            EnergyUnit::Rydberg => "Ry",
            EnergyUnit::AtomicUnit => "au",
        }
    }
}

impl fmt::Display for EnergyUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for EnergyUnit {
    type Err = UnitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unit = match s.to_ascii_lowercase().as_str() {
            "j" | "joule" => EnergyUnit::Joule,
            "ev" | "electronvolt" => EnergyUnit::ElectronVolt,
            "hz" | "hertz" => EnergyUnit::Hertz,
            "cm-1" | "cm^-1" | "1/cm" | "wavenumber" => EnergyUnit::InverseCentimeter,
            "ha" | "hartree" | "eh" => EnergyUnit::Hartree,
            "ry" | "rydberg" => EnergyUnit::Rydberg,
            "au" | "a.u." | "atomic" => EnergyUnit::AtomicUnit,
            _ => return Err(UnitError::UnknownEnergyUnit(s.to_string())),
        };
        Ok(unit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LengthUnit {
    Bohr,
    Angstrom,
}

impl LengthUnit {
    pub fn symbol(self) -> &'static str {
        match self {
            LengthUnit::Bohr => "bohr",
            LengthUnit::Angstrom => "angstrom",
        }
    }
}

impl fmt::Display for LengthUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for LengthUnit {
    type Err = UnitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bohr" | "a0" | "au" => Ok(LengthUnit::Bohr),
            "angstrom" | "a" | "å" => Ok(LengthUnit::Angstrom),
            _ => Err(UnitError::UnknownLengthUnit(s.to_string())),
        }
    }
}

// eV row of the conversion table.
const EV_IN_JOULE: f64 = 1.60219e-19;
const EV_IN_HERTZ: f64 = 2.41797e14;
const EV_IN_WAVENUMBER: f64 = 8.06547e3;

pub const HARTREE_EV: f64 = 27.2;
pub const RYDBERG_EV: f64 = 13.6;
pub const BOHR_ANGSTROM: f64 = 0.529;

/// ħ²/(2 u) expressed in cm⁻¹·Å², with u the unified atomic mass unit.
/// Needed to turn a reduced mass in u into the spectroscopic mass factor.
pub const HBAR2_OVER_2AMU_CM1_A2: f64 = 16.857_629;

/// The J / eV / Hz / cm⁻¹ table exactly as printed; `TABLE[row][col]` is the
/// number of `col` units in one `row` unit.
const TABLE_UNITS: [EnergyUnit; 4] =
    [EnergyUnit::Joule, EnergyUnit::ElectronVolt, EnergyUnit::Hertz, EnergyUnit::InverseCentimeter];
const TABLE: [[f64; 4]; 4] = [
    [1.0, 6.24151e18, 1.50919e33, 5.03411e22],
    [1.60219e-19, 1.0, 2.41797e14, 8.06547e3],
    [6.62619e-34, 4.13570e-15, 1.0, 3.33564e-11],
    [1.96648e-23, 1.23935e-4, 2.99792e10, 1.0],
];

/// Converts `value` expressed in `from` into `to`.
pub fn convert_energy(value: f64, from: EnergyUnit, to: EnergyUnit) -> f64 {
    if from == to {
        return value;
    }
    value * to.per_ev() / from.per_ev()
}

/// String-keyed variant used by the CLI; unknown symbols are an error.
pub fn convert_energy_str(value: f64, from: &str, to: &str) -> Result<f64, UnitError> {
    Ok(convert_energy(value, from.parse()?, to.parse()?))
}

/// Raw entry of the printed table.
///
/// The printed rows are not mutually consistent beyond a few parts in 10⁵
/// (the cm⁻¹ → eV entry in particular), which is why [`convert_energy`]
/// uses the eV row only.
pub fn printed_factor(from: EnergyUnit, to: EnergyUnit) -> Result<f64, UnitError> {
    let row = TABLE_UNITS.iter().position(|&u| u == from);
    let col = TABLE_UNITS.iter().position(|&u| u == to);
    match (row, col) {
        (Some(r), Some(c)) => Ok(TABLE[r][c]),
        _ => Err(UnitError::NotInTable { from, to }),
    }
}

pub fn convert_length(value: f64, from: LengthUnit, to: LengthUnit) -> f64 {
    match (from, to) {
        (LengthUnit::Bohr, LengthUnit::Angstrom) => value * BOHR_ANGSTROM,
        (LengthUnit::Angstrom, LengthUnit::Bohr) => value / BOHR_ANGSTROM,
        _ => value,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub bohr_radius_angstrom: f64,
    pub hartree_ev: f64,
    pub rydberg_ev: f64,
}

pub fn physical_constants() -> PhysicalConstants {
    PhysicalConstants { bohr_radius_angstrom: BOHR_ANGSTROM, hartree_ev: HARTREE_EV, rydberg_ev: RYDBERG_EV }
}

/// The pair (ħ, 2μ) in whatever unit system a problem is stated in.
///
/// The marched equation is `y'' = (2μ/ħ²)(V − E) y`, so only
/// [`MassConvention::factor`] enters the numerics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassConvention {
    hbar: f64,
    two_mu: f64,
}

impl MassConvention {
    pub fn new(hbar: f64, two_mu: f64) -> Result<Self, UnitError> {
        if hbar > 0.0 && two_mu > 0.0 && hbar.is_finite() && two_mu.is_finite() {
            Ok(MassConvention { hbar, two_mu })
        } else {
            Err(UnitError::NonPositiveMass { hbar, two_mu })
        }
    }

    /// Atomic units, ħ = mₑ = 1.
    pub const fn atomic() -> Self {
        MassConvention { hbar: 1.0, two_mu: 2.0 }
    }

    /// ħ = 1, 2μ = 1, the radial convention used for the Coulomb and Morse
    /// problems.
    pub const fn reduced() -> Self {
        MassConvention { hbar: 1.0, two_mu: 1.0 }
    }

    /// Spectroscopic units (cm⁻¹, Å) for a reduced mass given in u.
    pub fn spectroscopic(reduced_mass_amu: f64) -> Result<Self, UnitError> {
        MassConvention::new(1.0, reduced_mass_amu / HBAR2_OVER_2AMU_CM1_A2)
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn two_mu(&self) -> f64 {
        self.two_mu
    }

    /// 2μ/ħ².
    pub fn factor(&self) -> f64 {
        self.two_mu / (self.hbar * self.hbar)
    }
}

impl Default for MassConvention {
    fn default() -> Self {
        MassConvention::atomic()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn ev_to_wavenumber_matches_table() {
        assert_eq!(convert_energy(1.0, EnergyUnit::ElectronVolt, EnergyUnit::InverseCentimeter), 8.06547e3);
        assert_eq!(convert_energy(1.0, EnergyUnit::ElectronVolt, EnergyUnit::ElectronVolt), 1.0);
    }

    #[test]
    fn hartree_and_rydberg() {
        assert!(rel(convert_energy(1.0, EnergyUnit::Hartree, EnergyUnit::ElectronVolt), 27.2) < 1e-15);
        assert!(rel(convert_energy(1.0, EnergyUnit::Hartree, EnergyUnit::Rydberg), 2.0) < 1e-15);
        assert_eq!(
            convert_energy(3.0, EnergyUnit::AtomicUnit, EnergyUnit::Joule),
            convert_energy(3.0, EnergyUnit::Hartree, EnergyUnit::Joule)
        );
        let c = physical_constants();
        assert_eq!(c.bohr_radius_angstrom, 0.529);
        assert_eq!(c.rydberg_ev, 13.6);
        assert!((c.hartree_ev - 2.0 * c.rydberg_ev).abs() < 1e-12);
    }

    #[test]
    fn printed_table_is_exposed_verbatim() {
        assert_eq!(printed_factor(EnergyUnit::InverseCentimeter, EnergyUnit::ElectronVolt).unwrap(), 1.23935e-4);
        assert!(printed_factor(EnergyUnit::Rydberg, EnergyUnit::Joule).is_err());
    }

    #[test]
    fn unknown_units_are_rejected() {
        assert!(matches!(convert_energy_str(1.0, "eV", "furlong"), Err(UnitError::UnknownEnergyUnit(_))));
        assert!((convert_energy_str(1.0, "ev", "cm-1").unwrap() - 8065.47).abs() < 1e-9);
    }

    #[test]
    fn mass_convention_validation() {
        assert!(MassConvention::new(0.0, 1.0).is_err());
        assert!(MassConvention::new(1.0, -2.0).is_err());
        assert_eq!(MassConvention::atomic().factor(), 2.0);
        assert_eq!(MassConvention::reduced().factor(), 1.0);
    }

    fn unit() -> impl Strategy<Value = EnergyUnit> {
        (0usize..EnergyUnit::ALL.len()).prop_map(|i| EnergyUnit::ALL[i])
    }

    proptest! {
        #[test]
        fn round_trip(x in -1e6f64..1e6, u in unit(), v in unit()) {
            let back = convert_energy(convert_energy(x, u, v), v, u);
            prop_assert!((back - x).abs() <= 1e-12 * x.abs());
        }

        #[test]
        fn transitive(x in -1e6f64..1e6, u in unit(), v in unit(), w in unit()) {
            let direct = convert_energy(x, u, w);
            let via = convert_energy(convert_energy(x, u, v), v, w);
            prop_assert!((direct - via).abs() <= 1e-10 * direct.abs());
        }
    }
}
