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

//! Potential families the solver knows how to march through.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("potential is singular at x = {x}")]
    Singular { x: f64 },
    #[error("radial coordinate must be positive, got r = {r}")]
    NonPositiveRadius { r: f64 },
    #[error("invalid potential parameter `{name}` = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },
    #[error("tabulated potential needs at least two strictly increasing abscissae")]
    BadTable,
}

/// One potential family with its physical parameters, in the native unit
/// system of the problem it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    /// V = 0 on (0, width); the walls are handled as boundaries.
    InfiniteWell { width: f64 },
    /// V = 0 on (0, width), `depth` elsewhere (the wall points included).
    FiniteWell { width: f64, depth: f64 },
    /// V = ½ k x².
    Harmonic { k_elastic: f64 },
    /// V = −D [exp(−Ω(x−r)²) + exp(−Ω(x+r)²)].
    DoubleGaussian { depth: f64, exponent: f64, offset: f64 },
    /// V = D [1 − exp(−B(x−r_a))]² + A exp(−C(x−r_b)²).
    MorseGaussian {
        gaussian_height: f64,
        morse_range: f64,
        gaussian_exponent: f64,
        morse_depth: f64,
        morse_center: f64,
        gaussian_center: f64,
    },
    /// V = −2Z/r, energies in Rydberg with ħ = 2μ = 1.
    Coulomb { charge: f64 },
    /// V = D [1 − exp(−a(r−r_e))]² − D.
    Morse { depth: f64, range: f64, r_e: f64 },
    /// Σₙ g δ(x − n a). Never sampled; it acts through a derivative jump.
    DeltaComb { lattice: f64, strength: f64 },
    /// Piecewise-linear interpolation of sampled values, constant beyond the
    /// table ends.
    Tabulated { x: Vec<f64>, v: Vec<f64> },
}

impl PotentialSpec {
    pub fn name(&self) -> &'static str {
        match self {
            PotentialSpec::InfiniteWell { .. } => "infinite-well",
            PotentialSpec::FiniteWell { .. } => "finite-well",
            PotentialSpec::Harmonic { .. } => "harmonic",
            PotentialSpec::DoubleGaussian { .. } => "double-gaussian",
            PotentialSpec::MorseGaussian { .. } => "morse-gaussian",
            PotentialSpec::Coulomb { .. } => "coulomb",
            PotentialSpec::Morse { .. } => "morse",
            PotentialSpec::DeltaComb { .. } => "delta-comb",
            PotentialSpec::Tabulated { .. } => "tabulated",
        }
    }

    /// Checks the parameter invariants of the family.
    pub fn validate(&self) -> Result<(), PotentialError> {
        fn positive(name: &'static str, value: f64) -> Result<(), PotentialError> {
            if value > 0.0 && value.is_finite() {
                Ok(())
            } else {
                Err(PotentialError::InvalidParameter { name, value, reason: "must be positive" })
            }
        }
        fn non_negative(name: &'static str, value: f64) -> Result<(), PotentialError> {
            if value >= 0.0 && value.is_finite() {
                Ok(())
            } else {
                Err(PotentialError::InvalidParameter { name, value, reason: "must be non-negative" })
            }
        }
        fn finite(name: &'static str, value: f64) -> Result<(), PotentialError> {
            if value.is_finite() {
                Ok(())
            } else {
                Err(PotentialError::InvalidParameter { name, value, reason: "must be finite" })
            }
        }
        match *self {
            PotentialSpec::InfiniteWell { width } => positive("width", width),
            PotentialSpec::FiniteWell { width, depth } => {
                positive("width", width)?;
                finite("depth", depth)
            }
            PotentialSpec::Harmonic { k_elastic } => positive("k_elastic", k_elastic),
            PotentialSpec::DoubleGaussian { depth, exponent, offset } => {
                finite("depth", depth)?;
                non_negative("exponent", exponent)?;
                positive("offset", offset)
            }
            PotentialSpec::MorseGaussian {
                gaussian_height,
                morse_range,
                gaussian_exponent,
                morse_depth,
                morse_center,
                gaussian_center,
            } => {
                finite("gaussian_height", gaussian_height)?;
                non_negative("morse_range", morse_range)?;
                non_negative("gaussian_exponent", gaussian_exponent)?;
                finite("morse_depth", morse_depth)?;
                positive("morse_center", morse_center)?;
                positive("gaussian_center", gaussian_center)
            }
            PotentialSpec::Coulomb { charge } => finite("charge", charge),
            PotentialSpec::Morse { depth, range, r_e } => {
                positive("depth", depth)?;
                positive("range", range)?;
                positive("r_e", r_e)
            }
            PotentialSpec::DeltaComb { lattice, strength } => {
                positive("lattice", lattice)?;
                finite("strength", strength)
            }
            PotentialSpec::Tabulated { ref x, ref v } => {
                if x.len() < 2 || x.len() != v.len() || x.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(PotentialError::BadTable);
                }
                if x.iter().chain(v.iter()).any(|t| !t.is_finite()) {
                    return Err(PotentialError::BadTable);
                }
                Ok(())
            }
        }
    }

    /// V(x) in the native units of the family.
    pub fn evaluate(&self, x: f64) -> Result<f64, PotentialError> {
        let v = match *self {
            PotentialSpec::InfiniteWell { width } => {
                if x <= 0.0 || x >= width {
                    return Err(PotentialError::Singular { x });
                }
                0.0
            }
            PotentialSpec::FiniteWell { width, depth } => {
                if x > 0.0 && x < width {
                    0.0
                } else {
                    depth
                }
            }
            PotentialSpec::Harmonic { k_elastic } => 0.5 * k_elastic * x * x,
            PotentialSpec::DoubleGaussian { depth, exponent, offset } => {
                let l = x - offset;
                let r = x + offset;
                -depth * ((-exponent * l * l).exp() + (-exponent * r * r).exp())
            }
            PotentialSpec::MorseGaussian {
                gaussian_height,
                morse_range,
                gaussian_exponent,
                morse_depth,
                morse_center,
                gaussian_center,
            } => {
                let m = 1.0 - (-morse_range * (x - morse_center)).exp();
                let g = x - gaussian_center;
                morse_depth * m * m + gaussian_height * (-gaussian_exponent * g * g).exp()
            }
            PotentialSpec::Coulomb { charge } => {
                if x <= 0.0 {
                    return Err(PotentialError::Singular { x });
                }
                -2.0 * charge / x
            }
            PotentialSpec::Morse { depth, range, r_e } => {
                let m = 1.0 - (-range * (x - r_e)).exp();
                depth * m * m - depth
            }
            PotentialSpec::DeltaComb { lattice, .. } => {
                let cell = x / lattice;
                if (cell - cell.round()).abs() * lattice <= 1e-12 * lattice.max(1.0) {
                    return Err(PotentialError::Singular { x });
                }
                0.0
            }
            PotentialSpec::Tabulated { x: ref xs, ref v } => interpolate(xs, v, x),
        };
        Ok(v)
    }

    /// V(r) + l(l+1)/r², the radial potential in the ħ = 2μ = 1 convention.
    pub fn effective_radial(&self, l: u32, r: f64) -> Result<f64, PotentialError> {
        if r <= 0.0 {
            return Err(PotentialError::NonPositiveRadius { r });
        }
        let l = f64::from(l);
        Ok(self.evaluate(r)? + l * (l + 1.0) / (r * r))
    }

    /// Abscissae where V or V' jumps; the propagator lands a step on each.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            PotentialSpec::FiniteWell { width, .. } => vec![0.0, *width],
            PotentialSpec::Tabulated { x, .. } => x.clone(),
            _ => Vec::new(),
        }
    }

    /// Centre of reflection symmetry, when the family has one.
    pub fn symmetry_center(&self) -> Option<f64> {
        match *self {
            PotentialSpec::InfiniteWell { width } | PotentialSpec::FiniteWell { width, .. } => Some(0.5 * width),
            PotentialSpec::Harmonic { .. } | PotentialSpec::DoubleGaussian { .. } => Some(0.0),
            _ => None,
        }
    }

    /// Location of the smallest sampled value of V on [lo, hi], polished by
    /// golden-section search.
    pub fn minimum_in(&self, lo: f64, hi: f64) -> Result<f64, PotentialError> {
        const SAMPLES: usize = 2000;
        let dx = (hi - lo) / SAMPLES as f64;
        let mut best = (lo, f64::INFINITY);
        for i in 0..=SAMPLES {
            let x = lo + dx * i as f64;
            if let Ok(v) = self.evaluate(x) {
                if v < best.1 {
                    best = (x, v);
                }
            }
        }
        if !best.1.is_finite() {
            return Err(PotentialError::Singular { x: lo });
        }
        let (mut a, mut b) = ((best.0 - dx).max(lo), (best.0 + dx).min(hi));
        let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
        let f = |x: f64| self.evaluate(x).unwrap_or(f64::INFINITY);
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        while (b - a).abs() > 1e-12 * (1.0 + best.0.abs()) {
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
            c = b - inv_phi * (b - a);
            d = a + inv_phi * (b - a);
        }
        Ok(0.5 * (a + b))
    }
}

fn interpolate(xs: &[f64], vs: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return vs[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return vs[last];
    }
    let i = xs.partition_point(|&t| t <= x) - 1;
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    vs[i] + t * (vs[i + 1] - vs[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MORSE: PotentialSpec = PotentialSpec::Morse { depth: 188.4355, range: 0.711248, r_e: 1.9975 };
    const DGW: PotentialSpec = PotentialSpec::DoubleGaussian { depth: 12.0, exponent: 0.1, offset: 5.0 };

    #[test]
    fn pointwise_values() {
        assert_eq!(MORSE.evaluate(1.9975).unwrap(), -188.4355);
        assert_eq!(PotentialSpec::Harmonic { k_elastic: 3.0 }.evaluate(0.0).unwrap(), 0.0);
        let v = DGW.evaluate(0.0).unwrap();
        assert!((v - (-24.0 * (-2.5f64).exp())).abs() < 1e-14);
        assert!((v + 1.970_00).abs() < 1e-4);
    }

    #[test]
    fn radial_effective_potential() {
        let h = PotentialSpec::Coulomb { charge: 1.0 };
        assert_eq!(h.effective_radial(0, 1.0).unwrap(), -2.0);
        assert!((h.effective_radial(1, 2.0).unwrap() + 0.5).abs() < 1e-15);
        assert_eq!(MORSE.effective_radial(0, 1.9975).unwrap(), -188.4355);
        assert!(matches!(h.effective_radial(0, 0.0), Err(PotentialError::NonPositiveRadius { .. })));
    }

    #[test]
    fn singular_points_are_errors() {
        let w = PotentialSpec::InfiniteWell { width: 2.0 };
        assert!(w.evaluate(0.0).is_err());
        assert!(w.evaluate(2.0).is_err());
        assert_eq!(w.evaluate(1.0).unwrap(), 0.0);
        let comb = PotentialSpec::DeltaComb { lattice: 2.22, strength: 1.0 };
        assert!(comb.evaluate(4.44).is_err());
        assert_eq!(comb.evaluate(1.0).unwrap(), 0.0);
        assert!(PotentialSpec::Coulomb { charge: 1.0 }.evaluate(0.0).is_err());
    }

    #[test]
    fn finite_well_walls_take_the_barrier_value() {
        let w = PotentialSpec::FiniteWell { width: 4.0, depth: 1.0 };
        assert_eq!(w.evaluate(0.0).unwrap(), 1.0);
        assert_eq!(w.evaluate(4.0).unwrap(), 1.0);
        assert_eq!(w.evaluate(2.0).unwrap(), 0.0);
        assert_eq!(w.breakpoints(), vec![0.0, 4.0]);
    }

    #[test]
    fn invalid_parameters() {
        assert!(PotentialSpec::InfiniteWell { width: -1.0 }.validate().is_err());
        assert!(PotentialSpec::DoubleGaussian { depth: 1.0, exponent: -0.1, offset: 1.0 }.validate().is_err());
        assert!(PotentialSpec::Tabulated { x: vec![0.0, 0.0], v: vec![1.0, 2.0] }.validate().is_err());
        assert!(MORSE.validate().is_ok());
    }

    #[test]
    fn tabulated_interpolation() {
        let t = PotentialSpec::Tabulated { x: vec![0.0, 1.0, 3.0], v: vec![0.0, 2.0, 0.0] };
        assert_eq!(t.evaluate(-1.0).unwrap(), 0.0);
        assert_eq!(t.evaluate(0.5).unwrap(), 1.0);
        assert_eq!(t.evaluate(2.0).unwrap(), 1.0);
        assert_eq!(t.evaluate(9.0).unwrap(), 0.0);
    }

    #[test]
    fn morse_gaussian_without_bump_is_shifted_morse() {
        let mg = PotentialSpec::MorseGaussian {
            gaussian_height: 0.0,
            morse_range: 0.711248,
            gaussian_exponent: 200.0,
            morse_depth: 188.4355,
            morse_center: 1.9975,
            gaussian_center: 1.6,
        };
        for i in 0..100 {
            let r = 0.2 + 0.1 * i as f64;
            let diff = mg.evaluate(r).unwrap() - (MORSE.evaluate(r).unwrap() + 188.4355);
            assert!(diff.abs() < 1e-10);
        }
    }

    #[test]
    fn morse_shape() {
        assert!(MORSE.evaluate(1e-3).unwrap() > 1000.0);
        assert!(MORSE.evaluate(60.0).unwrap().abs() < 1e-12);
        assert!(MORSE.evaluate(60.0).unwrap() <= 0.0);
        let min = MORSE.minimum_in(0.5, 10.0).unwrap();
        assert!((min - 1.9975).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn symmetric_families(u in 0.0f64..40.0) {
            let families = [
                PotentialSpec::FiniteWell { width: 53.3, depth: 1.0 },
                PotentialSpec::Harmonic { k_elastic: 4.0 / 2601.0 },
                DGW,
            ];
            for p in &families {
                let c = p.symmetry_center().unwrap();
                prop_assert_eq!(p.evaluate(c + u).unwrap(), p.evaluate(c - u).unwrap());
            }
            let w = PotentialSpec::InfiniteWell { width: 10.0 };
            let u = u % 4.9;
            prop_assert_eq!(w.evaluate(5.0 + u).unwrap(), w.evaluate(5.0 - u).unwrap());
        }

        #[test]
        fn morse_minimum_only_at_r_e(r in 0.05f64..50.0) {
            prop_assume!((r - 1.9975).abs() > 1e-3);
            prop_assert!(MORSE.evaluate(r).unwrap() > -188.4355);
        }
    }
}
