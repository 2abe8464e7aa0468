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

use cfm::eigensolver::{solve_spectrum, BoundaryCondition, Condition, Location, Parity, ProblemSpec, SolveOptions};
use cfm::oracles::{finite_well_exact, harmonic_exact};
use cfm::potentials::PotentialSpec;
use cfm::presets::{self, PresetProblem};
use cfm::propagator::MarchConfig;
use cfm::units::MassConvention;

fn full_infinite_well(x0_fraction: f64) -> ProblemSpec {
    ProblemSpec {
        potential: PotentialSpec::InfiniteWell { width: 10.0 },
        x0: x0_fraction * 10.0,
        left: BoundaryCondition::new(Condition::NullValue, Location::Finite(0.0)),
        right: BoundaryCondition::new(Condition::NullValue, Location::Finite(10.0)),
        l: 0,
        mass: MassConvention::atomic(),
        parity: Parity::None,
    }
}

#[test]
fn anchor_position_does_not_change_the_spectrum() {
    let exact: Vec<f64> = (1..=8).map(|n| (f64::from(n) * std::f64::consts::PI / 10.0).powi(2) / 2.0).collect();
    let opts = SolveOptions::new((1e-3, 3.3), 400);
    for frac in [0.3, 0.7] {
        let levels = solve_spectrum(&full_infinite_well(frac), &MarchConfig::default(), &opts).unwrap();
        assert_eq!(levels.len(), exact.len(), "x0 = {frac}a");
        for (l, e) in levels.iter().zip(&exact) {
            assert!((l.energy - e).abs() < 1e-8 * e, "x0 = {frac}a: {} vs {e}", l.energy);
        }
    }
}

#[test]
fn full_domain_matches_parity_split() {
    let preset = presets::finite_well();
    let PresetProblem::Bound(b) = preset.problem else { unreachable!() };
    let mut opts = b.options;
    opts.window = (1e-4, 0.08);
    opts.grid_points = 300;
    let split = solve_spectrum(&b.problem, &b.march, &opts).unwrap();
    let full_problem = ProblemSpec { parity: Parity::None, ..b.problem.clone() };
    let full = solve_spectrum(&full_problem, &b.march, &opts).unwrap();
    assert_eq!(split.len(), full.len());
    assert!(split.len() >= 6);
    for (s, f) in split.iter().zip(&full) {
        assert!((s.energy - f.energy).abs() < 1e-10, "{} vs {}", s.energy, f.energy);
    }
    let PotentialSpec::FiniteWell { width, depth } = b.problem.potential else { unreachable!() };
    let exact = finite_well_exact(width, depth, b.problem.mass).levels;
    for (s, e) in split.iter().zip(&exact) {
        assert!((s.energy - e).abs() < 1e-9 * e);
    }
}

#[test]
fn doubling_the_grid_keeps_the_levels() {
    let preset = presets::harmonic();
    let PresetProblem::Bound(b) = preset.problem else { unreachable!() };
    let mut opts = b.options;
    opts.window = (1e-3, 0.45);
    opts.grid_points = 200;
    let coarse = solve_spectrum(&b.problem, &b.march, &opts).unwrap();
    opts.grid_points *= 2;
    let fine = solve_spectrum(&b.problem, &b.march, &opts).unwrap();
    assert_eq!(coarse.len(), fine.len());
    let exact = harmonic_exact(presets::HARMONIC_OMEGA, coarse.len() as u32 - 1).levels;
    for ((c, f), e) in coarse.iter().zip(&fine).zip(&exact) {
        assert!((c.energy - f.energy).abs() < 1e-11);
        assert!((c.energy - e).abs() < 1e-6 * e);
        assert_eq!(c.index, f.index);
    }
}
