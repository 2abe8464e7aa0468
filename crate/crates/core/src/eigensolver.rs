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

//! Eigenvalue function `F(E) = l₊(E) − l₋(E)`, energy scans and root
//! location.
//!
//! Roots are found in two ways. Sign changes of `F` between adjacent
//! non-pole samples are bisected and kept only when `|F|` collapses;
//! tan-like poles, where `|F|` blows up instead, are dropped. Independently,
//! the angle between the two boundary vectors `(p₊, q₊)` and `(p₋, q₋)` is
//! continuous in `E` and vanishes exactly at eigenvalues, so intervals where
//! its sine changes sign but `F` produced no root are bisected on the angle.
//! This catches levels whose eigenfunction has a node at the anchor, where
//! `F` has a root and a pole at the same energy.

use rayon::prelude::*;
use thiserror::Error;

use crate::potentials::{PotentialError, PotentialSpec};
use crate::propagator::{
    march_to_boundary, Boundary, Coefficient, Direction, MarchConfig, MarchError, Ratio, RatioKind,
};
use crate::units::MassConvention;

pub const DEFAULT_ACCEPT: f64 = 1e-6;
pub const DEFAULT_POLE_THRESHOLD: f64 = 1e6;
pub const DEFAULT_REFINE_TOL: f64 = 1e-12;
const MAX_BISECTIONS: usize = 80;
const ANGLE_ACCEPT: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    March(#[from] MarchError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("{side} march did not saturate by x = {x_stop} at E = {energy}; raise max_extent")]
    NotSaturated { side: Side, x_stop: f64, energy: f64 },
    #[error("energy grid needs at least two strictly increasing points")]
    BadGrid,
    #[error("cannot classify bracket [{lo}, {hi}] as root or pole")]
    Classification { lo: f64, hi: f64 },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    NullValue,
    NullDerivative,
}

impl Condition {
    pub fn ratio_kind(self) -> RatioKind {
        match self {
            Condition::NullValue => RatioKind::ValueRatio,
            Condition::NullDerivative => RatioKind::DerivativeRatio,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Finite(f64),
    /// Saturated infinity on this side.
    Infinity,
    /// The radial origin, reached at `r_min`.
    Origin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCondition {
    pub condition: Condition,
    pub location: Location,
}

impl BoundaryCondition {
    pub fn new(condition: Condition, location: Location) -> Self {
        BoundaryCondition { condition, location }
    }

    pub fn value_at(location: Location) -> Self {
        Self::new(Condition::NullValue, location)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Parity {
    None,
    SymmetricSplit { center: f64 },
}

/// Half-domain branch of a symmetric problem, named by the condition at
/// the center: `Odd` vanishes there, `Even` has zero slope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Odd,
    Even,
}

impl Branch {
    pub fn condition(self) -> Condition {
        match self {
            Branch::Odd => Condition::NullValue,
            Branch::Even => Condition::NullDerivative,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub potential: PotentialSpec,
    pub x0: f64,
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
    pub l: u32,
    pub mass: MassConvention,
    pub parity: Parity,
}

impl ProblemSpec {
    pub fn is_radial(&self) -> bool {
        matches!(self.left.location, Location::Origin)
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        self.potential.validate()?;
        if matches!(self.potential, PotentialSpec::DeltaComb { .. }) {
            return Err(SolveError::InvalidProblem("delta combs are periodic; use the bands module".into()));
        }
        if matches!(self.right.location, Location::Origin) {
            return Err(SolveError::InvalidProblem("the origin can only be a left boundary".into()));
        }
        if let Location::Finite(xl) = self.left.location {
            if !(xl < self.x0) {
                return Err(SolveError::InvalidProblem(format!(
                    "anchor x0 = {} must lie right of the left boundary {xl}",
                    self.x0
                )));
            }
        }
        if self.is_radial() && !(self.x0 > 0.0) {
            return Err(SolveError::InvalidProblem("radial anchor must be positive".into()));
        }
        if let Location::Finite(xr) = self.right.location {
            if !(xr > self.x0) {
                return Err(SolveError::InvalidProblem(format!(
                    "anchor x0 = {} must lie left of the right boundary {xr}",
                    self.x0
                )));
            }
        }
        if self.l > 0 && !self.is_radial() {
            return Err(SolveError::InvalidProblem("angular momentum needs a radial problem".into()));
        }
        if let Parity::SymmetricSplit { center } = self.parity {
            if center <= self.x0 {
                return Err(SolveError::InvalidProblem(format!(
                    "split center {center} must lie right of the anchor {}",
                    self.x0
                )));
            }
            if let Some(c) = self.potential.symmetry_center() {
                if (c - center).abs() > 1e-12 * c.abs().max(1.0) {
                    return Err(SolveError::InvalidProblem(format!("potential is symmetric about {c}, not {center}")));
                }
            } else {
                return Err(SolveError::InvalidProblem(format!(
                    "{} potential has no symmetry center",
                    self.potential.name()
                )));
            }
        }
        Ok(())
    }

    /// The half-domain problem for one branch of a symmetric split.
    pub fn half(&self, branch: Branch) -> Result<ProblemSpec, SolveError> {
        let Parity::SymmetricSplit { center } = self.parity else {
            return Err(SolveError::InvalidProblem("problem has no symmetric split".into()));
        };
        Ok(ProblemSpec {
            right: BoundaryCondition::new(branch.condition(), Location::Finite(center)),
            parity: Parity::None,
            ..self.clone()
        })
    }
}

/// `c·V(x) + l(l+1)/x²` with `c = 2μ/ħ²`; infinite-well walls are domain
/// ends, so the interior value is used up to and including them.
pub struct ScaledPotential<'a> {
    spec: &'a PotentialSpec,
    factor: f64,
    centrifugal: f64,
    breaks: Vec<f64>,
}

impl<'a> ScaledPotential<'a> {
    pub fn new(spec: &'a PotentialSpec, mass: MassConvention, l: u32) -> Self {
        let l = f64::from(l);
        ScaledPotential { spec, factor: mass.factor(), centrifugal: l * (l + 1.0), breaks: spec.breakpoints() }
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }
}

impl Coefficient for ScaledPotential<'_> {
    fn veff(&self, x: f64) -> f64 {
        let v = match *self.spec {
            PotentialSpec::InfiniteWell { width } if (0.0..=width).contains(&x) => 0.0,
            _ => self.spec.evaluate(x).unwrap_or(f64::NAN),
        };
        let c = if self.centrifugal != 0.0 { self.centrifugal / (x * x) } else { 0.0 };
        self.factor * v + c
    }

    fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }
}

/// Boundary ratios at one energy; `*_pair` holds the `(p, q)` with `l = p/q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratios {
    pub l_minus: Ratio,
    pub l_plus: Ratio,
    pub minus_pair: (f64, f64),
    pub plus_pair: (f64, f64),
    pub pole: bool,
}

impl Ratios {
    /// Sine of the angle between the two boundary vectors: continuous in
    /// `E` and zero exactly at eigenvalues.
    pub fn angle(&self) -> f64 {
        let (pp, qp) = self.plus_pair;
        let (pm, qm) = self.minus_pair;
        let norm = pp.hypot(qp) * pm.hypot(qm);
        if norm == 0.0 || !norm.is_finite() {
            return f64::NAN;
        }
        (pp / pp.hypot(qp)) * (qm / pm.hypot(qm)) - (pm / pm.hypot(qm)) * (qp / pp.hypot(qp))
    }
}

fn boundary_for(location: Location) -> Boundary {
    match location {
        Location::Finite(x) => Boundary::Point(x),
        Location::Infinity => Boundary::Infinity,
        Location::Origin => Boundary::Origin,
    }
}

fn march_side(
    energy: f64,
    prob: &ProblemSpec,
    veff: &ScaledPotential<'_>,
    side: Side,
    cfg: &MarchConfig,
) -> Result<(Ratio, (f64, f64)), SolveError> {
    let (bc, dir) = match side {
        Side::Left => (prob.left, Direction::TowardLeft),
        Side::Right => (prob.right, Direction::TowardRight),
    };
    let scaled_energy = veff.factor() * energy;
    let out = march_to_boundary(
        scaled_energy,
        veff,
        prob.x0,
        boundary_for(bc.location),
        bc.condition.ratio_kind(),
        &cfg.toward(dir),
    )?;
    if bc.location == Location::Infinity && !out.saturated {
        return Err(SolveError::NotSaturated { side, x_stop: out.x_stop, energy });
    }
    Ok((out.ratio, out.pair))
}

pub fn ratios(energy: f64, prob: &ProblemSpec, cfg: &MarchConfig) -> Result<Ratios, SolveError> {
    let veff = ScaledPotential::new(&prob.potential, prob.mass, prob.l);
    let (l_minus, minus_pair) = march_side(energy, prob, &veff, Side::Left, cfg)?;
    let (l_plus, plus_pair) = march_side(energy, prob, &veff, Side::Right, cfg)?;
    let pole = matches!(l_minus, Ratio::Pole) || matches!(l_plus, Ratio::Pole);
    Ok(Ratios { l_minus, l_plus, minus_pair, plus_pair, pole })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSample {
    pub energy: f64,
    /// `l₊ − l₋`; infinite when either ratio is a pole.
    pub f: f64,
    pub is_pole: bool,
    pub angle: f64,
    /// `max(1, |l₊|, |l₋|)`, the scale root acceptance is measured against.
    pub scale: f64,
}

fn sample_from(energy: f64, r: &Ratios, pole_threshold: f64) -> EigenSample {
    let angle = r.angle();
    match (r.l_plus, r.l_minus) {
        (Ratio::Finite(lp), Ratio::Finite(lm)) => {
            let f = lp - lm;
            EigenSample {
                energy,
                f,
                is_pole: !(f.abs() <= pole_threshold),
                angle,
                scale: lp.abs().max(lm.abs()).max(1.0),
            }
        }
        _ => EigenSample { energy, f: f64::INFINITY, is_pole: true, angle, scale: f64::INFINITY },
    }
}

pub fn eigenvalue_function(energy: f64, prob: &ProblemSpec, cfg: &MarchConfig) -> Result<EigenSample, SolveError> {
    Ok(sample_from(energy, &ratios(energy, prob, cfg)?, DEFAULT_POLE_THRESHOLD))
}

fn check_grid(grid: &[f64]) -> Result<(), SolveError> {
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(SolveError::BadGrid);
    }
    Ok(())
}

/// Samples `F` on `grid` in parallel; output order follows the grid.
pub fn scan(prob: &ProblemSpec, grid: &[f64], cfg: &MarchConfig) -> Result<Vec<EigenSample>, SolveError> {
    check_grid(grid)?;
    prob.validate()?;
    grid.par_iter().map(|&e| eigenvalue_function(e, prob, cfg)).collect()
}

pub fn scan_sequential(prob: &ProblemSpec, grid: &[f64], cfg: &MarchConfig) -> Result<Vec<EigenSample>, SolveError> {
    check_grid(grid)?;
    prob.validate()?;
    grid.iter().map(|&e| eigenvalue_function(e, prob, cfg)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootMethod {
    /// Bisection on `F` with collapsing residual.
    Residual,
    /// Bisection on the boundary-vector angle.
    Angle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub index: u32,
    pub energy: f64,
    /// `|F|` at the accepted root, or the angle sine for angle roots.
    pub residual: f64,
    pub bracket: (f64, f64),
    pub method: RootMethod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootCriteria {
    pub refine_tol: f64,
    /// Accept when `|F| ≤ accept·max(1, |l₊|, |l₋|)`.
    pub accept: f64,
    pub pole_threshold: f64,
}

impl Default for RootCriteria {
    fn default() -> Self {
        RootCriteria { refine_tol: DEFAULT_REFINE_TOL, accept: DEFAULT_ACCEPT, pole_threshold: DEFAULT_POLE_THRESHOLD }
    }
}

enum Verdict {
    Root(Eigenvalue),
    Pole,
}

struct Refiner<'a> {
    prob: &'a ProblemSpec,
    cfg: &'a MarchConfig,
    crit: RootCriteria,
}

impl Refiner<'_> {
    fn sample(&self, e: f64) -> Result<EigenSample, SolveError> {
        Ok(sample_from(e, &ratios(e, self.prob, self.cfg)?, self.crit.pole_threshold))
    }

    fn accepted(&self, s: &EigenSample) -> bool {
        !s.is_pole && s.f.abs() <= self.crit.accept * s.scale
    }

    fn by_residual(&self, a: EigenSample, b: EigenSample) -> Result<Verdict, SolveError> {
        let (mut lo, mut hi) = (a, b);
        let start = a.f.abs().max(b.f.abs());
        for i in 0..MAX_BISECTIONS {
            let mid_e = 0.5 * (lo.energy + hi.energy);
            if mid_e <= lo.energy || mid_e >= hi.energy {
                break;
            }
            let mid = self.sample(mid_e)?;
            if mid.is_pole {
                return Ok(Verdict::Pole);
            }
            if mid.f == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if mid.f.signum() == lo.f.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
            let narrow = hi.energy - lo.energy <= self.crit.refine_tol;
            if narrow || i + 1 == MAX_BISECTIONS {
                let best = if lo.f.abs() <= hi.f.abs() { lo } else { hi };
                if self.accepted(&best) {
                    return Ok(Verdict::Root(self.root(best, lo, hi, RootMethod::Residual)));
                }
                if best.f.abs() > start {
                    return Ok(Verdict::Pole);
                }
            }
        }
        let best = if lo.f.abs() <= hi.f.abs() { lo } else { hi };
        if self.accepted(&best) {
            Ok(Verdict::Root(self.root(best, lo, hi, RootMethod::Residual)))
        } else if best.f.abs() > start {
            Ok(Verdict::Pole)
        } else {
            Err(SolveError::Classification { lo: lo.energy, hi: hi.energy })
        }
    }

    fn by_angle(&self, a: EigenSample, b: EigenSample) -> Result<Option<Eigenvalue>, SolveError> {
        let (mut lo, mut hi) = (a, b);
        for _ in 0..MAX_BISECTIONS {
            if hi.energy - lo.energy <= self.crit.refine_tol {
                break;
            }
            let mid_e = 0.5 * (lo.energy + hi.energy);
            if mid_e <= lo.energy || mid_e >= hi.energy {
                break;
            }
            let mid = self.sample(mid_e)?;
            if !mid.angle.is_finite() {
                return Ok(None);
            }
            if mid.angle.signum() == lo.angle.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let best = if lo.angle.abs() <= hi.angle.abs() { lo } else { hi };
        if best.angle.abs() <= ANGLE_ACCEPT {
            let mut root = self.root(best, lo, hi, RootMethod::Angle);
            root.residual = best.angle.abs();
            Ok(Some(root))
        } else {
            Ok(None)
        }
    }

    fn root(&self, best: EigenSample, lo: EigenSample, hi: EigenSample, method: RootMethod) -> Eigenvalue {
        Eigenvalue { index: 0, energy: best.energy, residual: best.f.abs(), bracket: (lo.energy, hi.energy), method }
    }
}

fn crosses(a: f64, b: f64) -> bool {
    a.is_finite() && b.is_finite() && (a == 0.0 || b == 0.0 || a.signum() != b.signum())
}

/// Classifies and refines every bracket in `samples`, returning sorted
/// roots indexed from zero.
pub fn locate_roots(
    samples: &[EigenSample],
    prob: &ProblemSpec,
    cfg: &MarchConfig,
    refine_tol: f64,
) -> Result<Vec<Eigenvalue>, SolveError> {
    locate_roots_with(samples, prob, cfg, &RootCriteria { refine_tol, ..RootCriteria::default() })
}

pub fn locate_roots_with(
    samples: &[EigenSample],
    prob: &ProblemSpec,
    cfg: &MarchConfig,
    crit: &RootCriteria,
) -> Result<Vec<Eigenvalue>, SolveError> {
    let refiner = Refiner { prob, cfg, crit: *crit };
    let found: Vec<Option<Eigenvalue>> = samples
        .par_windows(2)
        .map(|w| -> Result<Option<Eigenvalue>, SolveError> {
            let (a, b) = (w[0], w[1]);
            if !a.is_pole && !b.is_pole && crosses(a.f, b.f) {
                if let Verdict::Root(r) = refiner.by_residual(a, b)? {
                    return Ok(Some(r));
                }
            }
            if crosses(a.angle, b.angle) {
                return refiner.by_angle(a, b);
            }
            Ok(None)
        })
        .collect::<Result<_, _>>()?;
    let mut roots: Vec<Eigenvalue> = found.into_iter().flatten().collect();
    roots.sort_by(|x, y| x.energy.total_cmp(&y.energy));
    let dedupe = crit.refine_tol.max(4.0 * f64::EPSILON);
    roots.dedup_by(|later, earlier| later.energy - earlier.energy <= dedupe * earlier.energy.abs().max(1.0));
    for (i, r) in roots.iter_mut().enumerate() {
        r.index = i as u32;
    }
    Ok(roots)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Linear,
    /// Logarithmic in `|E|`, dense toward zero; the window must not contain zero.
    Log,
}

/// `n` increasing energies spanning `[lo, hi]`.
pub fn energy_grid(lo: f64, hi: f64, n: usize, kind: GridKind) -> Result<Vec<f64>, SolveError> {
    if n < 2 || !(lo < hi) {
        return Err(SolveError::BadGrid);
    }
    let t = |i: usize| i as f64 / (n - 1) as f64;
    match kind {
        GridKind::Linear => Ok((0..n).map(|i| lo + (hi - lo) * t(i)).collect()),
        GridKind::Log => {
            if lo.signum() != hi.signum() || lo == 0.0 || hi == 0.0 {
                return Err(SolveError::BadGrid);
            }
            let (a, b) = (lo.abs().ln(), hi.abs().ln());
            let mut g: Vec<f64> = (0..n).map(|i| lo.signum() * (a + (b - a) * t(i)).exp()).collect();
            g[0] = lo;
            g[n - 1] = hi;
            Ok(g)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub window: (f64, f64),
    pub grid_points: usize,
    pub grid: GridKind,
    pub criteria: RootCriteria,
    /// Index given to the lowest level.
    pub index_base: u32,
}

impl SolveOptions {
    pub fn new(window: (f64, f64), grid_points: usize) -> Self {
        SolveOptions { window, grid_points, grid: GridKind::Linear, criteria: RootCriteria::default(), index_base: 0 }
    }

    fn grid_values(&self) -> Result<Vec<f64>, SolveError> {
        energy_grid(self.window.0, self.window.1, self.grid_points, self.grid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub index: u32,
    pub energy: f64,
    pub residual: f64,
    pub branch: Option<Branch>,
    pub method: RootMethod,
}

/// Roots of a problem without parity split, indexed from `index_base`.
pub fn solve(prob: &ProblemSpec, cfg: &MarchConfig, opts: &SolveOptions) -> Result<Vec<Level>, SolveError> {
    let grid = opts.grid_values()?;
    let samples = scan(prob, &grid, cfg)?;
    let roots = locate_roots_with(&samples, prob, cfg, &opts.criteria)?;
    Ok(roots
        .into_iter()
        .map(|r| Level {
            index: r.index + opts.index_base,
            energy: r.energy,
            residual: r.residual,
            branch: None,
            method: r.method,
        })
        .collect())
}

/// Roots of one half-domain branch.
pub fn solve_branch(
    prob: &ProblemSpec,
    branch: Branch,
    cfg: &MarchConfig,
    opts: &SolveOptions,
) -> Result<Vec<Eigenvalue>, SolveError> {
    let half = prob.half(branch)?;
    let grid = opts.grid_values()?;
    let samples = scan(&half, &grid, cfg)?;
    locate_roots_with(&samples, &half, cfg, &opts.criteria)
}

/// Solves both half-domain branches and merges them by energy.
pub fn solve_parity(prob: &ProblemSpec, cfg: &MarchConfig, opts: &SolveOptions) -> Result<Vec<Level>, SolveError> {
    prob.validate()?;
    let mut levels = Vec::new();
    for branch in [Branch::Odd, Branch::Even] {
        for r in solve_branch(prob, branch, cfg, opts)? {
            levels.push(Level {
                index: 0,
                energy: r.energy,
                residual: r.residual,
                branch: Some(branch),
                method: r.method,
            });
        }
    }
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    for (i, l) in levels.iter_mut().enumerate() {
        l.index = opts.index_base + i as u32;
    }
    Ok(levels)
}

/// Dispatches on the problem's parity setting.
pub fn solve_spectrum(prob: &ProblemSpec, cfg: &MarchConfig, opts: &SolveOptions) -> Result<Vec<Level>, SolveError> {
    match prob.parity {
        Parity::None => solve(prob, cfg, opts),
        Parity::SymmetricSplit { .. } => solve_parity(prob, cfg, opts),
    }
}

/// Largest level index of a finite well, counting the level sitting
/// exactly at the rim.
pub fn count_levels_finite_well(width: f64, depth: f64, mass: MassConvention) -> u32 {
    let n = 1.0 + width * (mass.factor() * depth).sqrt() / std::f64::consts::PI;
    (n + 1e-9).floor() as u32
}

pub fn well_width_from_count(n_max: u32, depth: f64, mass: MassConvention) -> f64 {
    std::f64::consts::PI * (f64::from(n_max) - 1.0) / (mass.factor() * depth).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn infinite_well(x0_fraction: f64) -> ProblemSpec {
        let a = 25.0 * PI / 2f64.sqrt();
        ProblemSpec {
            potential: PotentialSpec::InfiniteWell { width: a },
            x0: x0_fraction * a / 2.0,
            left: BoundaryCondition::value_at(Location::Finite(0.0)),
            right: BoundaryCondition::value_at(Location::Finite(a)),
            l: 0,
            mass: MassConvention::atomic(),
            parity: Parity::SymmetricSplit { center: a / 2.0 },
        }
    }

    fn exact(n: u32) -> f64 {
        f64::from(n * n) / 625.0
    }

    #[test]
    fn infinite_well_ratios_agree_at_ground_state() {
        let prob = infinite_well(0.37).half(Branch::Even).unwrap();
        let s = eigenvalue_function(exact(1), &prob, &MarchConfig::default()).unwrap();
        assert!(s.f.abs() < 1e-6, "{s:?}");
        let mid = eigenvalue_function(0.5 * (exact(1) + exact(3)), &prob, &MarchConfig::default()).unwrap();
        assert!(mid.f.abs() > 1e-3);
    }

    #[test]
    fn scan_grid_must_increase() {
        let prob = infinite_well(0.37).half(Branch::Odd).unwrap();
        let cfg = MarchConfig::default();
        assert_eq!(scan(&prob, &[0.1], &cfg), Err(SolveError::BadGrid));
        assert_eq!(scan(&prob, &[0.2, 0.1], &cfg), Err(SolveError::BadGrid));
        assert_eq!(scan(&prob, &[], &cfg), Err(SolveError::BadGrid));
    }

    #[test]
    fn rootless_interval_gives_nothing() {
        let prob = infinite_well(0.37).half(Branch::Even).unwrap();
        let cfg = MarchConfig::default();
        let grid = [exact(1) * 1.2, exact(1) * 1.3];
        let samples = scan(&prob, &grid, &cfg).unwrap();
        assert!(locate_roots(&samples, &prob, &cfg, 1e-12).unwrap().is_empty());
    }

    #[test]
    fn half_domain_even_branch_has_thirteen_levels() {
        let prob = infinite_well(0.37);
        let cfg = MarchConfig::default();
        let opts = SolveOptions::new((1e-4, 1.05), 2000);
        let even = solve_branch(&prob, Branch::Even, &cfg, &opts).unwrap();
        assert_eq!(even.len(), 13);
        for (i, r) in even.iter().enumerate() {
            let n = 2 * i as u32 + 1;
            assert!((r.energy - exact(n)).abs() <= 1e-6 * exact(n), "{n}: {}", r.energy);
        }
    }

    #[test]
    fn node_at_anchor_is_still_found() {
        // Anchor at a/4 puts a node of every even-n level on x0.
        let prob = infinite_well(0.5);
        let cfg = MarchConfig::default();
        let opts = SolveOptions::new((1e-4, 0.2), 400);
        let odd = solve_branch(&prob, Branch::Odd, &cfg, &opts).unwrap();
        let expected: Vec<f64> = (1..=5).map(|m| exact(2 * m)).filter(|&e| e < 0.2).collect();
        assert_eq!(odd.len(), expected.len());
        for (r, e) in odd.iter().zip(&expected) {
            assert!((r.energy - e).abs() <= 1e-6 * e);
        }
        assert!(odd.iter().any(|r| r.method == RootMethod::Angle));
    }

    #[test]
    fn finite_well_level_count_formulas() {
        let m = MassConvention::atomic();
        let a = well_width_from_count(25, 1.0, m);
        assert!((a - 24.0 * PI / 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(count_levels_finite_well(a, 1.0, m), 25);
        for n in 1..60 {
            assert_eq!(count_levels_finite_well(well_width_from_count(n, 3.5, m), 3.5, m), n);
        }
        assert!(count_levels_finite_well(1.0, 1e6, m) > count_levels_finite_well(1.0, 1e2, m));
    }

    #[test]
    fn log_grid_is_dense_near_zero() {
        let g = energy_grid(-1.2, -1e-3, 50, GridKind::Log).unwrap();
        assert_eq!(g[0], -1.2);
        assert_eq!(g[49], -1e-3);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g[49] - g[48] < g[1] - g[0]);
        assert!(energy_grid(-1.0, 1.0, 10, GridKind::Log).is_err());
    }

    #[test]
    fn validation_rejects_bad_anchor() {
        let mut p = infinite_well(0.37);
        p.x0 = -1.0;
        assert!(p.validate().is_err());
        let mut p = infinite_well(0.37);
        p.parity = Parity::SymmetricSplit { center: 3.0 };
        assert!(p.validate().is_err());
    }
}
