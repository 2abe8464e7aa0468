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

//! Numbers with unit suffixes, resolved into a problem's native units.
//!
//! A suffix is a product of energy and length units with optional powers,
//! e.g. `cm-1`, `angstrom`, `1/bohr2`, `hartree/bohr^2`, `ev*angstrom`.
//! The bare suffix `au` means the native unit of whatever dimension is
//! expected.

use std::fmt;

use cfm::units::{convert_energy, convert_length, EnergyUnit, LengthUnit};

/// Powers of energy and length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub energy: i32,
    pub length: i32,
}

pub const ENERGY: Dims = Dims { energy: 1, length: 0 };
pub const LENGTH: Dims = Dims { energy: 0, length: 1 };
pub const INVERSE_LENGTH: Dims = Dims { energy: 0, length: -1 };
pub const INVERSE_AREA: Dims = Dims { energy: 0, length: -2 };
pub const ENERGY_PER_AREA: Dims = Dims { energy: 1, length: -2 };
pub const ENERGY_LENGTH: Dims = Dims { energy: 1, length: 1 };
pub const DIMENSIONLESS: Dims = Dims { energy: 0, length: 0 };

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |name: &str, p: i32| match p {
            0 => String::new(),
            1 => name.to_string(),
            p => format!("{name}^{p}"),
        };
        let s = [part("energy", self.energy), part("length", self.length)]
            .into_iter()
            .filter(|s| !s.is_empty())
            .collect::<Vec<_>>()
            .join("*");
        f.write_str(if s.is_empty() { "dimensionless" } else { &s })
    }
}

/// Native units of a problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frame {
    pub energy: EnergyUnit,
    pub length: LengthUnit,
}

impl Frame {
    /// Suffix that reads back as the native unit of `dims`.
    pub fn suffix(&self, dims: Dims) -> String {
        if dims == DIMENSIONLESS {
            return String::new();
        }
        let mut num = Vec::new();
        let mut den = Vec::new();
        let mut push = |name: String, p: i32| match p.signum() {
            1 => num.push(power(&name, p)),
            -1 => den.push(power(&name, -p)),
            _ => {}
        };
        let energy = match self.energy {
            EnergyUnit::AtomicUnit => "hartree".to_string(),
            u => u.symbol().to_ascii_lowercase(),
        };
        push(energy, dims.energy);
        push(self.length.symbol().to_string(), dims.length);
        let num = if num.is_empty() { "1".to_string() } else { num.join("*") };
        if den.is_empty() {
            num
        } else {
            format!("{num}/{}", den.join("*"))
        }
    }
}

fn power(name: &str, p: i32) -> String {
    if p == 1 {
        name.to_string()
    } else {
        format!("{name}^{p}")
    }
}

/// Parses `"<number> <unit>"`; the unit is mandatory unless `dims` is
/// dimensionless, where it is forbidden.
pub fn parse_quantity(text: &str, dims: Dims, frame: Frame) -> Result<f64, String> {
    let text = text.trim();
    let split = text.find(char::is_whitespace).unwrap_or(text.len());
    let (num, unit) = (&text[..split], text[split..].trim());
    let value: f64 = num.parse().map_err(|_| format!("`{num}` is not a number"))?;
    if !value.is_finite() {
        return Err(format!("`{num}` is not finite"));
    }
    if dims == DIMENSIONLESS {
        return if unit.is_empty() {
            Ok(value)
        } else {
            Err(format!("unexpected unit `{unit}` on a dimensionless value"))
        };
    }
    if unit.is_empty() {
        return Err(format!("missing unit (expected {dims}, e.g. `{value} {}`)", frame.suffix(dims)));
    }
    Ok(value * unit_factor(unit, dims, frame)?)
}

/// Factor turning a value in `unit` into the frame's native unit.
pub fn unit_factor(unit: &str, dims: Dims, frame: Frame) -> Result<f64, String> {
    let lower = unit.to_ascii_lowercase();
    if lower == "au" {
        return Ok(1.0);
    }
    if dims == ENERGY {
        if let Ok(u) = lower.parse::<EnergyUnit>() {
            return Ok(convert_energy(1.0, u, frame.energy));
        }
    }
    let (numerator, denominator) = match lower.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (lower.as_str(), None),
    };
    let mut got = DIMENSIONLESS;
    let mut factor = 1.0;
    for (part, sign) in std::iter::once((numerator, 1)).chain(denominator.map(|d| (d, -1))) {
        for token in part.split('*') {
            let (f, d) = token_factor(token, frame).ok_or_else(|| format!("unknown unit `{token}` in `{unit}`"))?;
            factor *= f.powi(sign);
            got.energy += sign * d.energy;
            got.length += sign * d.length;
        }
    }
    if got != dims {
        return Err(format!("unit `{unit}` has dimension {got}, expected {dims}"));
    }
    Ok(factor)
}

fn token_factor(token: &str, frame: Frame) -> Option<(f64, Dims)> {
    if token == "1" {
        return Some((1.0, DIMENSIONLESS));
    }
    let split = token.trim_end_matches(|c: char| c.is_ascii_digit()).trim_end_matches('^');
    let (name, p) = if split.len() < token.len() && !token.ends_with("cm-1") {
        let digits = token[split.len()..].trim_start_matches('^');
        (split, digits.parse::<i32>().ok()?)
    } else {
        (token, 1)
    };
    if let Ok(u) = name.parse::<LengthUnit>() {
        return Some((convert_length(1.0, u, frame.length).powi(p), Dims { energy: 0, length: p }));
    }
    if let Ok(u) = name.parse::<EnergyUnit>() {
        return Some((convert_energy(1.0, u, frame.energy).powi(p), Dims { energy: p, length: 0 }));
    }
    None
}

/// Mass in u; accepts `u`, `amu` and `da`.
pub fn parse_mass(text: &str) -> Result<f64, String> {
    let text = text.trim();
    let split = text.find(char::is_whitespace).unwrap_or(text.len());
    let (num, unit) = (&text[..split], text[split..].trim());
    let value: f64 = num.parse().map_err(|_| format!("`{num}` is not a number"))?;
    match unit.to_ascii_lowercase().as_str() {
        "u" | "amu" | "da" => Ok(value),
        "" => Err(format!("missing unit (expected a mass, e.g. `{value} u`)")),
        other => Err(format!("unknown mass unit `{other}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const AU: Frame = Frame { energy: EnergyUnit::Hartree, length: LengthUnit::Bohr };
    const SPEC: Frame = Frame { energy: EnergyUnit::InverseCentimeter, length: LengthUnit::Angstrom };

    #[test]
    fn energies_convert_to_native() {
        assert_eq!(parse_quantity("2 hartree", ENERGY, AU).unwrap(), 2.0);
        assert!((parse_quantity("27.2 ev", ENERGY, AU).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(parse_quantity("31250 cm-1", ENERGY, SPEC).unwrap(), 31250.0);
        assert_eq!(parse_quantity("-0.5 au", ENERGY, AU).unwrap(), -0.5);
    }

    #[test]
    fn compound_units() {
        assert!((parse_quantity("1.54 1/angstrom", INVERSE_LENGTH, SPEC).unwrap() - 1.54).abs() < 1e-15);
        let per_bohr2 = parse_quantity("1 1/bohr^2", INVERSE_AREA, SPEC).unwrap();
        assert!((per_bohr2 - 1.0 / (0.529 * 0.529)).abs() < 1e-12);
        assert_eq!(parse_quantity("3 ha*bohr", ENERGY_LENGTH, AU).unwrap(), 3.0);
        assert_eq!(parse_quantity("0.25 hartree/bohr2", ENERGY_PER_AREA, AU).unwrap(), 0.25);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        assert!(parse_quantity("1 bohr", ENERGY, AU).unwrap_err().contains("expected energy"));
        assert!(parse_quantity("1", LENGTH, AU).unwrap_err().contains("missing unit"));
        assert!(parse_quantity("1 ev", DIMENSIONLESS, AU).is_err());
        assert!(parse_quantity("x bohr", LENGTH, AU).is_err());
    }

    #[test]
    fn suffixes_read_back() {
        for dims in [ENERGY, LENGTH, INVERSE_LENGTH, INVERSE_AREA, ENERGY_PER_AREA, ENERGY_LENGTH] {
            for frame in [AU, SPEC] {
                let text = format!("1.5 {}", frame.suffix(dims));
                assert_eq!(parse_quantity(&text, dims, frame).unwrap(), 1.5, "{text}");
            }
        }
    }

    #[test]
    fn masses() {
        assert_eq!(parse_mass("1.0 u").unwrap(), 1.0);
        assert!(parse_mass("1.0").unwrap_err().contains("missing unit"));
    }
}
