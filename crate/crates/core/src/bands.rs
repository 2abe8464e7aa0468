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

//! Bloch bands of the delta comb `V(x) = Σ g δ(x − na)`.
//!
//! The canonical functions are marched across the open cell `(0, a)` from
//! an interior anchor. Bloch periodicity `ψ(a) = e^{ika} ψ(0)` gives
//!
//! ```text
//! l₊ = (α(a) − P α(0)) / (P β(0) − β(a)),                    P = e^{ika}
//! l₋ = (−α'(0) + P̄ α'(a) + G α(0)) / (β'(0) − P̄ β'(a) − G β(0)), G = c·g
//! ```
//!
//! where the second comes from the derivative jump across the delta site.
//! `F = l₊ − l₋` has a removable `0/0` at zone-edge energies of the free
//! lattice, so band energies are located on the cleared determinant
//! `n₊ d₋ − n₋ d₊`, which equals `T(E) − 2 cos ka` with a real `T`.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::propagator::{march_to_boundary, Boundary, CanonicalState, Direction, MarchConfig, MarchError, RatioKind};
use crate::units::MassConvention;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BandError {
    #[error(transparent)]
    March(#[from] MarchError),
    #[error("invalid lattice: {0}")]
    Invalid(String),
    #[error("complex ratio denominator vanishes at E = {energy}, k = {k}")]
    Pole { energy: f64, k: f64 },
    #[error("found {found} of {wanted} bands below E = {e_max} at k = {k}")]
    TooFewBands { found: usize, wanted: usize, k: f64, e_max: f64 },
    #[error("k = {k} lies outside [0, π/a]")]
    OutsideZone { k: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochProblem {
    pub lattice: f64,
    pub strength: f64,
    pub x0: f64,
    pub mass: MassConvention,
}

impl BlochProblem {
    pub fn new(lattice: f64, strength: f64, x0: f64) -> Self {
        BlochProblem { lattice, strength, x0, mass: MassConvention::atomic() }
    }

    pub fn validate(&self) -> Result<(), BandError> {
        if !(self.lattice > 0.0 && self.lattice.is_finite()) {
            return Err(BandError::Invalid(format!("lattice {} must be positive", self.lattice)));
        }
        if !(self.x0 > 0.0 && self.x0 < self.lattice) {
            return Err(BandError::Invalid(format!("x0 = {} must lie inside (0, {})", self.x0, self.lattice)));
        }
        if !self.strength.is_finite() {
            return Err(BandError::Invalid("strength must be finite".into()));
        }
        Ok(())
    }

    /// Edge of the first Brillouin zone, `π/a`.
    pub fn zone_edge(&self) -> f64 {
        std::f64::consts::PI / self.lattice
    }

    fn jump(&self) -> f64 {
        self.mass.factor() * self.strength
    }
}

/// Canonical values at both cell ends for one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellCanonicals {
    pub energy: f64,
    pub at_zero: CanonicalState,
    pub at_lattice: CanonicalState,
}

pub fn cell_canonicals(energy: f64, prob: &BlochProblem, cfg: &MarchConfig) -> Result<CellCanonicals, BandError> {
    prob.validate()?;
    let free = |_: f64| 0.0;
    let e = prob.mass.factor() * energy;
    let left = march_to_boundary(
        e,
        &free,
        prob.x0,
        Boundary::Point(0.0),
        RatioKind::ValueRatio,
        &cfg.toward(Direction::TowardLeft),
    )?;
    let right = march_to_boundary(
        e,
        &free,
        prob.x0,
        Boundary::Point(prob.lattice),
        RatioKind::ValueRatio,
        &cfg.toward(Direction::TowardRight),
    )?;
    Ok(CellCanonicals { energy, at_zero: left.state, at_lattice: right.state })
}

struct Fractions {
    n_plus: Complex64,
    d_plus: Complex64,
    n_minus: Complex64,
    d_minus: Complex64,
}

fn fractions(cc: &CellCanonicals, k: f64, prob: &BlochProblem) -> Fractions {
    let p = Complex64::from_polar(1.0, k * prob.lattice);
    let pbar = p.conj();
    let g = prob.jump();
    let (z, a) = (&cc.at_zero, &cc.at_lattice);
    Fractions {
        n_plus: a.alpha - p * z.alpha,
        d_plus: p * z.beta - a.beta,
        n_minus: -z.alpha_p + pbar * a.alpha_p + g * z.alpha,
        d_minus: z.beta_p - pbar * a.beta_p - g * z.beta,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochRatios {
    pub l_minus: Complex64,
    pub l_plus: Complex64,
}

fn ratios_from(cc: &CellCanonicals, k: f64, prob: &BlochProblem) -> Result<BlochRatios, BandError> {
    let f = fractions(cc, k, prob);
    let l_plus = f.n_plus / f.d_plus;
    let l_minus = f.n_minus / f.d_minus;
    if f.d_plus.norm() == 0.0 || f.d_minus.norm() == 0.0 || !l_plus.is_finite() || !l_minus.is_finite() {
        return Err(BandError::Pole { energy: cc.energy, k });
    }
    Ok(BlochRatios { l_minus, l_plus })
}

pub fn bloch_ratios(energy: f64, k: f64, prob: &BlochProblem, cfg: &MarchConfig) -> Result<BlochRatios, BandError> {
    ratios_from(&cell_canonicals(energy, prob, cfg)?, k, prob)
}

/// `F(E, k) = l₊ − l₋`.
pub fn dispersion_residual(
    energy: f64,
    k: f64,
    prob: &BlochProblem,
    cfg: &MarchConfig,
) -> Result<Complex64, BandError> {
    let r = bloch_ratios(energy, k, prob, cfg)?;
    Ok(r.l_plus - r.l_minus)
}

fn determinant_from(cc: &CellCanonicals, k: f64, prob: &BlochProblem) -> Complex64 {
    let f = fractions(cc, k, prob);
    f.n_plus * f.d_minus - f.n_minus * f.d_plus
}

/// `n₊ d₋ − n₋ d₊`: `F` with both denominators cleared.
pub fn dispersion_determinant(
    energy: f64,
    k: f64,
    prob: &BlochProblem,
    cfg: &MarchConfig,
) -> Result<Complex64, BandError> {
    Ok(determinant_from(&cell_canonicals(energy, prob, cfg)?, k, prob))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandOptions {
    pub points_per_band: usize,
    pub refine_tol: f64,
    /// Accept a refined root when `|Im| ≤ imag_tol·(1 + scan scale)`.
    pub imag_tol: f64,
    /// Accept a tangential dip when `|det| ≤ dip_tol·(1 + scan scale)`.
    pub dip_tol: f64,
}

impl Default for BandOptions {
    fn default() -> Self {
        BandOptions { points_per_band: 400, refine_tol: 1e-12, imag_tol: 1e-8, dip_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandPoint {
    pub k: f64,
    pub energies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandStructure {
    pub problem: BlochProblem,
    pub points: Vec<BandPoint>,
}

impl BandStructure {
    pub fn n_bands(&self) -> usize {
        self.points.first().map_or(0, |p| p.energies.len())
    }

    /// Energies of band `n` (zero-based) across the k grid.
    pub fn band(&self, n: usize) -> Vec<f64> {
        self.points.iter().map(|p| p.energies[n]).collect()
    }
}

/// Canonical values on a fixed energy grid, shared by every k.
struct BandSolver<'a> {
    prob: &'a BlochProblem,
    cfg: &'a MarchConfig,
    opts: BandOptions,
    grid: Vec<CellCanonicals>,
    e_max: f64,
}

impl<'a> BandSolver<'a> {
    fn new(
        prob: &'a BlochProblem,
        cfg: &'a MarchConfig,
        opts: BandOptions,
        e_max: f64,
        points: usize,
    ) -> Result<Self, BandError> {
        prob.validate()?;
        let c = prob.mass.factor();
        let e_min = if prob.strength < 0.0 {
            // Lowest band of an attractive comb lies below the bound-state
            // energy of a single site, −G²/4c.
            -2.0 * prob.jump().powi(2) / (4.0 * c) - 1e-3 * e_max.abs()
        } else {
            -1e-3 * e_max.abs().max(1e-6)
        };
        let points = points.max(16);
        let energies: Vec<f64> =
            (0..points).map(|i| e_min + (e_max - e_min) * i as f64 / (points - 1) as f64).collect();
        let grid = energies.par_iter().map(|&e| cell_canonicals(e, prob, cfg)).collect::<Result<Vec<_>, _>>()?;
        Ok(BandSolver { prob, cfg, opts, grid, e_max })
    }

    fn default_window(prob: &BlochProblem, n_bands: usize) -> f64 {
        // Band n lies in κa ∈ ((n−1)π, nπ] for g ≥ 0.
        let top = (n_bands as f64 * std::f64::consts::PI / prob.lattice).powi(2) / prob.mass.factor();
        1.05 * top + 1e-3
    }

    fn det(&self, e: f64, k: f64) -> Result<Complex64, BandError> {
        Ok(determinant_from(&cell_canonicals(e, self.prob, self.cfg)?, k, self.prob))
    }

    fn roots(&self, k: f64) -> Result<Vec<f64>, BandError> {
        if !(k.abs() <= self.prob.zone_edge() * (1.0 + 1e-12)) {
            return Err(BandError::OutsideZone { k });
        }
        let dets: Vec<Complex64> = self.grid.iter().map(|cc| determinant_from(cc, k, self.prob)).collect();
        let scale = dets.iter().map(|d| d.re.abs()).fold(0.0, f64::max);
        let mut roots = Vec::new();
        for i in 0..dets.len() - 1 {
            let (ea, eb) = (self.grid[i].energy, self.grid[i + 1].energy);
            let (da, db) = (dets[i].re, dets[i + 1].re);
            if da == 0.0 {
                roots.push(ea);
            } else if da.signum() != db.signum() && db != 0.0 {
                let e = self.bisect(ea, eb, da, k)?;
                let d = self.det(e, k)?;
                if d.im.abs() <= self.opts.imag_tol * (1.0 + scale) {
                    roots.push(e);
                }
            } else if i > 0
                && dets[i - 1].re.signum() == da.signum()
                && da.abs() < dets[i - 1].re.abs()
                && da.abs() <= db.abs()
            {
                // Tangential touch: two degenerate bands.
                let e = self.golden(self.grid[i - 1].energy, eb, k)?;
                if self.det(e, k)?.norm() <= self.opts.dip_tol * (1.0 + scale) {
                    roots.push(e);
                    roots.push(e);
                }
            }
        }
        Ok(roots)
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, dlo: f64, k: f64) -> Result<f64, BandError> {
        let sign = dlo.signum();
        while hi - lo > self.opts.refine_tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let d = self.det(mid, k)?.re;
            if d == 0.0 {
                return Ok(mid);
            }
            if d.signum() == sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    fn golden(&self, mut lo: f64, mut hi: f64, k: f64) -> Result<f64, BandError> {
        let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
        let f = |e: f64| -> Result<f64, BandError> { Ok(self.det(e, k)?.norm_sqr()) };
        let mut x1 = hi - inv_phi * (hi - lo);
        let mut x2 = lo + inv_phi * (hi - lo);
        let (mut f1, mut f2) = (f(x1)?, f(x2)?);
        for _ in 0..200 {
            if hi - lo <= self.opts.refine_tol {
                break;
            }
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = f(x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = f(x2)?;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    fn lowest(&self, k: f64, n_bands: usize) -> Result<Vec<f64>, BandError> {
        let mut roots = self.roots(k)?;
        if roots.len() < n_bands {
            return Err(BandError::TooFewBands { found: roots.len(), wanted: n_bands, k, e_max: self.e_max });
        }
        roots.truncate(n_bands);
        Ok(roots)
    }
}

pub fn band_energies(k: f64, n_bands: usize, prob: &BlochProblem, cfg: &MarchConfig) -> Result<Vec<f64>, BandError> {
    band_energies_with(k, n_bands, prob, cfg, &BandOptions::default())
}

pub fn band_energies_with(
    k: f64,
    n_bands: usize,
    prob: &BlochProblem,
    cfg: &MarchConfig,
    opts: &BandOptions,
) -> Result<Vec<f64>, BandError> {
    if n_bands == 0 {
        return Err(BandError::Invalid("n_bands must be at least 1".into()));
    }
    let e_max = BandSolver::default_window(prob, n_bands);
    BandSolver::new(prob, cfg, *opts, e_max, opts.points_per_band * n_bands)?.lowest(k, n_bands)
}

/// Uniform grid of `n` wavevectors on `[0, π/a]`.
pub fn k_grid(prob: &BlochProblem, n: usize) -> Vec<f64> {
    let edge = prob.zone_edge();
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| if i == n - 1 { edge } else { edge * i as f64 / (n - 1) as f64 }).collect(),
    }
}

pub fn compute_bands(
    prob: &BlochProblem,
    n_bands: usize,
    k_grid: &[f64],
    cfg: &MarchConfig,
) -> Result<BandStructure, BandError> {
    compute_bands_with(prob, n_bands, k_grid, cfg, &BandOptions::default())
}

pub fn compute_bands_with(
    prob: &BlochProblem,
    n_bands: usize,
    k_grid: &[f64],
    cfg: &MarchConfig,
    opts: &BandOptions,
) -> Result<BandStructure, BandError> {
    if n_bands == 0 {
        return Err(BandError::Invalid("n_bands must be at least 1".into()));
    }
    let e_max = BandSolver::default_window(prob, n_bands);
    let solver = BandSolver::new(prob, cfg, *opts, e_max, opts.points_per_band * n_bands)?;
    let points = k_grid
        .par_iter()
        .map(|&k| Ok(BandPoint { k, energies: solver.lowest(k, n_bands)? }))
        .collect::<Result<Vec<_>, BandError>>()?;
    Ok(BandStructure { problem: *prob, points })
}

/// Bands whose bottom, `min(E_n(0), E_n(π/a))`, lies below `e_max`.
pub fn count_bands_below(prob: &BlochProblem, e_max: f64, cfg: &MarchConfig) -> Result<usize, BandError> {
    let free_bands =
        (prob.lattice * (prob.mass.factor() * e_max.max(0.0)).sqrt() / std::f64::consts::PI).ceil() as usize + 2;
    let opts = BandOptions::default();
    let solver = BandSolver::new(prob, cfg, opts, e_max, opts.points_per_band * free_bands)?;
    let below =
        |k: f64| -> Result<usize, BandError> { Ok(solver.roots(k)?.into_iter().filter(|&e| e < e_max).count()) };
    Ok(below(0.0)?.max(below(prob.zone_edge())?))
}

/// `a = n_B π ħ/√(2m)`: the lattice whose free band `n_B` tops out at 1.
pub fn lattice_from_band_count(n_bands: u32, mass: MassConvention) -> f64 {
    f64::from(n_bands) * std::f64::consts::PI * mass.hbar() / mass.two_mu().sqrt()
}

/// Comb strength of thin barriers, `g = Q² b ħ²/2m`, given `Q` and width `b`.
pub fn delta_strength_from_barrier(q: f64, b: f64, mass: MassConvention) -> f64 {
    q * q * b / mass.factor()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::delta_comb_exact;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn cfg() -> MarchConfig {
        MarchConfig::default()
    }

    #[test]
    fn validation() {
        assert!(BlochProblem::new(2.0, 1.0, 2.5).validate().is_err());
        assert!(BlochProblem::new(-2.0, 1.0, 0.5).validate().is_err());
        assert!(BlochProblem::new(2.22, 1.0, 1.0).validate().is_ok());
    }

    #[test]
    fn zone_edges_are_real() {
        let p = BlochProblem::new(2.22, 1.0, 1.0);
        for &k in &[0.0, p.zone_edge()] {
            for &e in &[0.13, 0.71, 2.3] {
                let f = dispersion_residual(e, k, &p, &cfg()).unwrap();
                assert!(f.im.abs() <= 1e-12 * f.norm().max(1.0), "{f}");
            }
        }
    }

    #[test]
    fn free_lattice_folds_parabola() {
        let p = BlochProblem::new(2.22, 0.0, 1.0);
        for &k in &[0.2, 0.9, 1.3] {
            let e = band_energies(k, 2, &p, &cfg()).unwrap();
            assert!((e[0] - k * k / 2.0).abs() < 1e-9);
            let second = (2.0 * PI / p.lattice - k).powi(2) / 2.0;
            assert!((e[1] - second).abs() < 1e-9);
        }
        let e = band_energies(0.0, 3, &p, &cfg()).unwrap();
        let degenerate = (2.0 * PI / p.lattice).powi(2) / 2.0;
        assert!(e[0].abs() < 1e-9);
        assert!((e[1] - degenerate).abs() < 1e-5 && (e[2] - degenerate).abs() < 1e-5, "{e:?}");
    }

    #[test]
    fn lowest_root_matches_oracle() {
        let p = BlochProblem::new(2.22, 1.0, 1.0);
        let e = band_energies(0.0, 1, &p, &cfg()).unwrap()[0];
        let o = delta_comb_exact(2.22, 1.0, 0.0, 1, p.mass).unwrap()[0];
        assert!((e - o).abs() < 1e-6);
        let f = dispersion_residual(e, 0.0, &p, &cfg()).unwrap();
        assert!(f.norm() < 1e-8, "{f}");
    }

    #[test]
    fn gap_residual_stays_away_from_zero() {
        let p = BlochProblem::new(2.22, 1.0, 1.0);
        let k = p.zone_edge();
        let e = band_energies(k, 2, &p, &cfg()).unwrap();
        for i in 1..10 {
            let mid = e[0] + (e[1] - e[0]) * i as f64 / 10.0;
            assert!(dispersion_residual(mid, k, &p, &cfg()).unwrap().norm() > 1e-3);
        }
        assert!(e[1] - e[0] > 0.0);
    }

    #[test]
    fn too_few_bands_is_reported() {
        let p = BlochProblem::new(2.22, 1.0, 1.0);
        let cfg = cfg();
        let solver = BandSolver::new(&p, &cfg, BandOptions::default(), 1.0, 200).unwrap();
        assert!(matches!(solver.lowest(0.3, 2), Err(BandError::TooFewBands { found: 1, wanted: 2, .. })));
    }

    #[test]
    fn band_counts_and_lattice_formula() {
        let m = MassConvention::atomic();
        for (a, n) in [(2.22, 1), (6.66, 3), (11.12, 5)] {
            let p = BlochProblem::new(a, 1.0, 1.0);
            assert_eq!(count_bands_below(&p, 1.0, &cfg()).unwrap(), n, "a = {a}");
            assert!((lattice_from_band_count(n as u32, m) - a).abs() < 0.015);
        }
        assert!((lattice_from_band_count(3, m) - 6.6643).abs() < 1e-4);
    }

    #[test]
    fn barrier_strength_identity() {
        let m = MassConvention::atomic();
        let (v0, b) = (1e4, 1e-4);
        let q = (m.factor() * v0).sqrt();
        assert!((delta_strength_from_barrier(q, b, m) - v0 * b).abs() < 1e-12);
    }

    #[test]
    fn k_grid_spans_zone() {
        let p = BlochProblem::new(2.22, 1.0, 1.0);
        let g = k_grid(&p, 101);
        assert_eq!(g.len(), 101);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[100], p.zone_edge());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn conjugate_wavevector_conjugates_ratios(e in 0.05f64..3.0, k in 0.01f64..1.4) {
            let p = BlochProblem::new(2.22, 1.0, 1.0);
            let plus = bloch_ratios(e, k, &p, &cfg()).unwrap();
            let minus = bloch_ratios(e, -k, &p, &cfg()).unwrap();
            prop_assert!((plus.l_plus.conj() - minus.l_plus).norm() <= 1e-12 * plus.l_plus.norm().max(1.0));
            prop_assert!((plus.l_minus.conj() - minus.l_minus).norm() <= 1e-12 * plus.l_minus.norm().max(1.0));
        }
    }
}
