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

//! Named potential parameters, as used in config files and `--set`.

use cfm::potentials::PotentialSpec;

use crate::quantity::{
    Dims, DIMENSIONLESS, ENERGY, ENERGY_LENGTH, ENERGY_PER_AREA, INVERSE_AREA, INVERSE_LENGTH, LENGTH,
};

pub const KINDS: &[&str] = &[
    "infinite-well",
    "finite-well",
    "harmonic",
    "double-gaussian",
    "morse-gaussian",
    "coulomb",
    "morse",
    "delta-comb",
    "tabulated",
];

/// A potential of `kind` with every parameter unset (NaN).
pub fn template(kind: &str) -> Option<PotentialSpec> {
    let n = f64::NAN;
    Some(match kind {
        "infinite-well" => PotentialSpec::InfiniteWell { width: n },
        "finite-well" => PotentialSpec::FiniteWell { width: n, depth: n },
        "harmonic" => PotentialSpec::Harmonic { k_elastic: n },
        "double-gaussian" => PotentialSpec::DoubleGaussian { depth: n, exponent: n, offset: n },
        "morse-gaussian" => PotentialSpec::MorseGaussian {
            gaussian_height: n,
            morse_range: n,
            gaussian_exponent: n,
            morse_depth: n,
            morse_center: n,
            gaussian_center: n,
        },
        "coulomb" => PotentialSpec::Coulomb { charge: n },
        "morse" => PotentialSpec::Morse { depth: n, range: n, r_e: n },
        "delta-comb" => PotentialSpec::DeltaComb { lattice: n, strength: n },
        "tabulated" => PotentialSpec::Tabulated { x: Vec::new(), v: Vec::new() },
        _ => return None,
    })
}

/// Parameter names and dimensions, in declaration order.
pub fn names(spec: &PotentialSpec) -> &'static [(&'static str, Dims)] {
    match spec {
        PotentialSpec::InfiniteWell { .. } => &[("width", LENGTH)],
        PotentialSpec::FiniteWell { .. } => &[("width", LENGTH), ("depth", ENERGY)],
        PotentialSpec::Harmonic { .. } => &[("k_elastic", ENERGY_PER_AREA)],
        PotentialSpec::DoubleGaussian { .. } => &[("depth", ENERGY), ("exponent", INVERSE_AREA), ("offset", LENGTH)],
        PotentialSpec::MorseGaussian { .. } => &[
            ("gaussian_height", ENERGY),
            ("morse_range", INVERSE_LENGTH),
            ("gaussian_exponent", INVERSE_AREA),
            ("morse_depth", ENERGY),
            ("morse_center", LENGTH),
            ("gaussian_center", LENGTH),
        ],
        PotentialSpec::Coulomb { .. } => &[("charge", DIMENSIONLESS)],
        PotentialSpec::Morse { .. } => &[("depth", ENERGY), ("range", INVERSE_LENGTH), ("r_e", LENGTH)],
        PotentialSpec::DeltaComb { .. } => &[("lattice", LENGTH), ("strength", ENERGY_LENGTH)],
        PotentialSpec::Tabulated { .. } => &[],
    }
}

pub fn dims_of(spec: &PotentialSpec, key: &str) -> Option<Dims> {
    names(spec).iter().find(|(n, _)| *n == key).map(|(_, d)| *d)
}

fn slot<'a>(spec: &'a mut PotentialSpec, key: &str) -> Option<&'a mut f64> {
    Some(match (spec, key) {
        (PotentialSpec::InfiniteWell { width }, "width") => width,
        (PotentialSpec::FiniteWell { width, .. }, "width") => width,
        (PotentialSpec::FiniteWell { depth, .. }, "depth") => depth,
        (PotentialSpec::Harmonic { k_elastic }, "k_elastic") => k_elastic,
        (PotentialSpec::DoubleGaussian { depth, .. }, "depth") => depth,
        (PotentialSpec::DoubleGaussian { exponent, .. }, "exponent") => exponent,
        (PotentialSpec::DoubleGaussian { offset, .. }, "offset") => offset,
        (PotentialSpec::MorseGaussian { gaussian_height, .. }, "gaussian_height") => gaussian_height,
        (PotentialSpec::MorseGaussian { morse_range, .. }, "morse_range") => morse_range,
        (PotentialSpec::MorseGaussian { gaussian_exponent, .. }, "gaussian_exponent") => gaussian_exponent,
        (PotentialSpec::MorseGaussian { morse_depth, .. }, "morse_depth") => morse_depth,
        (PotentialSpec::MorseGaussian { morse_center, .. }, "morse_center") => morse_center,
        (PotentialSpec::MorseGaussian { gaussian_center, .. }, "gaussian_center") => gaussian_center,
        (PotentialSpec::Coulomb { charge }, "charge") => charge,
        (PotentialSpec::Morse { depth, .. }, "depth") => depth,
        (PotentialSpec::Morse { range, .. }, "range") => range,
        (PotentialSpec::Morse { r_e, .. }, "r_e") => r_e,
        (PotentialSpec::DeltaComb { lattice, .. }, "lattice") => lattice,
        (PotentialSpec::DeltaComb { strength, .. }, "strength") => strength,
        _ => return None,
    })
}

pub fn get(spec: &PotentialSpec, key: &str) -> Option<f64> {
    let mut copy = spec.clone();
    slot(&mut copy, key).map(|v| *v)
}

/// Sets a parameter; `false` when the potential has no such parameter.
pub fn set(spec: &mut PotentialSpec, key: &str, value: f64) -> bool {
    match slot(spec, key) {
        Some(v) => {
            *v = value;
            true
        }
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_named_parameter_is_settable() {
        for kind in KINDS {
            let mut spec = template(kind).unwrap();
            assert_eq!(spec.name(), *kind);
            for (i, (name, _)) in names(&spec).iter().enumerate() {
                assert!(get(&spec, name).unwrap().is_nan());
                assert!(set(&mut spec, name, i as f64 + 1.0));
                assert_eq!(get(&spec, name), Some(i as f64 + 1.0));
            }
            assert!(!set(&mut spec, "nope", 1.0));
        }
    }
}
