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

//! Marching of the two canonical solutions of `y'' = (v(x) − e) y`.
//!
//! Both solutions start at the anchor `x0` with
//! `α = 1, α' = 0, β = 0, β' = 1` and are advanced together by classical
//! fixed-step RK4, so they always share abscissae. Everything here works in
//! the scaled equation: callers fold the mass factor into `v` and `e`.
//!
//! A march stops at a finite boundary, or, toward infinity, once the
//! boundary ratio stops moving. The ratio `−α/β` has derivative `W/β²`
//! where `W` is the Wronskian, so it is strictly monotone and can only
//! settle once the canonical functions grow exponentially.

use thiserror::Error;

/// Largest `|q| h²` accepted before a step is halved.
const STIFFNESS_LIMIT: f64 = 0.1;
/// Fraction of the distance to the origin a step may cover near `r = 0`.
const ORIGIN_STEP_FRACTION: f64 = 0.25;
const RESCALE_THRESHOLD: f64 = 1e100;
const RESCALE_FACTOR: f64 = 1e-100;
/// Consecutive below-tolerance ratio changes required to call saturation.
const SATURATION_HITS: u32 = 3;
const MAX_HALVINGS: u32 = 60;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarchError {
    #[error("non-finite effective potential at x = {x}")]
    NonFinite { x: f64 },
    #[error("invalid march configuration: {0}")]
    Config(&'static str),
    #[error("boundary {boundary} lies on the wrong side of the anchor {x0}")]
    WrongSide { x0: f64, boundary: f64 },
    #[error("step underflow at x = {x}: potential too stiff to resolve")]
    StepUnderflow { x: f64 },
}

/// Position plus the values and slopes of both canonical solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalState {
    pub x: f64,
    pub alpha: f64,
    pub alpha_p: f64,
    pub beta: f64,
    pub beta_p: f64,
}

impl CanonicalState {
    /// `α β' − α' β`, one at the anchor and conserved by the exact flow.
    pub fn wronskian(&self) -> f64 {
        self.alpha * self.beta_p - self.alpha_p * self.beta
    }

    fn magnitude(&self) -> f64 {
        self.alpha.abs().max(self.beta.abs()).max(self.alpha_p.abs()).max(self.beta_p.abs())
    }

    fn scaled(&self, s: f64) -> CanonicalState {
        CanonicalState {
            x: self.x,
            alpha: self.alpha * s,
            alpha_p: self.alpha_p * s,
            beta: self.beta * s,
            beta_p: self.beta_p * s,
        }
    }

    /// Value and slope of `c_value·α + c_slope·β`.
    pub fn combine(&self, c_value: f64, c_slope: f64) -> (f64, f64) {
        (c_value * self.alpha + c_slope * self.beta, c_value * self.alpha_p + c_slope * self.beta_p)
    }
}

pub fn init_at(x0: f64) -> CanonicalState {
    CanonicalState { x: x0, alpha: 1.0, alpha_p: 0.0, beta: 0.0, beta_p: 1.0 }
}

/// The scaled effective potential seen by the marcher.
///
/// Any `Fn(f64) -> f64` works; implement the trait by hand to declare
/// abscissae where the potential jumps, so steps land on them.
pub trait Coefficient: Sync {
    fn veff(&self, x: f64) -> f64;

    fn breakpoints(&self) -> &[f64] {
        &[]
    }
}

impl<F: Fn(f64) -> f64 + Sync> Coefficient for F {
    fn veff(&self, x: f64) -> f64 {
        self(x)
    }
}

fn rk4(state: &CanonicalState, q: [f64; 3], h: f64) -> CanonicalState {
    let [q0, qm, q1] = q;
    let advance = |y: f64, p: f64| -> (f64, f64) {
        let k1y = p;
        let k1p = q0 * y;
        let k2y = p + 0.5 * h * k1p;
        let k2p = qm * (y + 0.5 * h * k1y);
        let k3y = p + 0.5 * h * k2p;
        let k3p = qm * (y + 0.5 * h * k2y);
        let k4y = p + h * k3p;
        let k4p = q1 * (y + h * k3y);
        (y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y), p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p))
    };
    let (alpha, alpha_p) = advance(state.alpha, state.alpha_p);
    let (beta, beta_p) = advance(state.beta, state.beta_p);
    CanonicalState { x: state.x + h, alpha, alpha_p, beta, beta_p }
}

fn sample(veff: &impl Coefficient, x: f64, energy: f64) -> Result<f64, MarchError> {
    let q = veff.veff(x) - energy;
    if q.is_finite() {
        Ok(q)
    } else {
        Err(MarchError::NonFinite { x })
    }
}

/// One classical RK4 step of signed size `h` for both canonical pairs.
pub fn step_once(
    state: &CanonicalState,
    energy: f64,
    veff: &impl Coefficient,
    h: f64,
) -> Result<CanonicalState, MarchError> {
    let q =
        [sample(veff, state.x, energy)?, sample(veff, state.x + 0.5 * h, energy)?, sample(veff, state.x + h, energy)?];
    Ok(rk4(state, q, h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    TowardLeft,
    TowardRight,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::TowardLeft => -1.0,
            Direction::TowardRight => 1.0,
        }
    }
}

/// Which canonical ratio a boundary condition selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioKind {
    /// `−α/β`, for a vanishing wavefunction.
    ValueRatio,
    /// `−α'/β'`, for a vanishing derivative.
    DerivativeRatio,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// A finite point, reached exactly.
    Point(f64),
    /// Toward ±∞ (side given by the config direction) until the ratio
    /// saturates.
    Infinity,
    /// The radial origin, approached down to `r_min` with steps no larger
    /// than a fixed fraction of `r`; the march may also stop early on saturation.
    Origin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarchConfig {
    pub step: f64,
    pub saturation_tol: f64,
    pub max_extent: f64,
    pub r_min: f64,
    pub direction: Direction,
}

impl Default for MarchConfig {
    fn default() -> Self {
        MarchConfig {
            step: 1e-3,
            saturation_tol: 1e-10,
            max_extent: 200.0,
            r_min: 1e-6,
            direction: Direction::TowardRight,
        }
    }
}

impl MarchConfig {
    pub fn validate(&self) -> Result<(), MarchError> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(MarchError::Config("step must be positive"));
        }
        if !(self.saturation_tol > 0.0 && self.saturation_tol < 1.0) {
            return Err(MarchError::Config("saturation_tol must lie in (0, 1)"));
        }
        if !(self.max_extent > 0.0 && self.max_extent.is_finite()) {
            return Err(MarchError::Config("max_extent must be positive"));
        }
        if !(self.r_min > 0.0) {
            return Err(MarchError::Config("r_min must be positive"));
        }
        Ok(())
    }

    pub fn toward(self, direction: Direction) -> Self {
        MarchConfig { direction, ..self }
    }
}

/// A boundary ratio `p/q`; `Pole` when the denominator vanished.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Finite(f64),
    Pole,
}

impl Ratio {
    pub fn value(self) -> Option<f64> {
        match self {
            Ratio::Finite(v) => Some(v),
            Ratio::Pole => None,
        }
    }

    fn from_pair(p: f64, q: f64) -> Ratio {
        let r = p / q;
        if q != 0.0 && r.is_finite() {
            Ratio::Finite(r)
        } else {
            Ratio::Pole
        }
    }
}

/// The homogeneous pair `(p, q)` whose quotient is the boundary ratio:
/// `(−α, β)` or `(−α', β')`.
pub fn ratio_pair(state: &CanonicalState, kind: RatioKind) -> (f64, f64) {
    match kind {
        RatioKind::ValueRatio => (-state.alpha, state.beta),
        RatioKind::DerivativeRatio => (-state.alpha_p, state.beta_p),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarchOutcome {
    pub ratio: Ratio,
    /// `(p, q)` with `ratio = p/q`, in the rescaled normalisation of `state`.
    pub pair: (f64, f64),
    pub x_stop: f64,
    pub saturated: bool,
    pub state: CanonicalState,
    /// Number of 1e-100 rescalings applied to `state`.
    pub rescalings: u32,
    /// Largest [`normalized_drift`] over accepted steps.
    pub max_wronskian_drift: f64,
    pub steps: usize,
}

/// Rescaling hook: multiplies both canonical pairs by `s`. Ratios are
/// unchanged; the Wronskian picks up `s²`.
pub fn rescale(state: &CanonicalState, s: f64) -> CanonicalState {
    state.scaled(s)
}

struct Marcher<'a, C: Coefficient> {
    veff: &'a C,
    energy: f64,
    cfg: MarchConfig,
    sign: f64,
    /// Where the march must end, if it is a finite one.
    target: Option<f64>,
    watch_saturation: bool,
    near_origin: bool,
    x0: f64,
}

impl<'a, C: Coefficient> Marcher<'a, C> {
    /// Signed step, the three `q` samples, and the exact landing abscissa
    /// when the step ends on a target, the extent limit or a breakpoint.
    fn next_step(&self, x: f64) -> Result<(f64, [f64; 3], Option<f64>), MarchError> {
        let mut h = self.cfg.step;
        let mut land = None;
        let limit = self.target.unwrap_or(self.x0 + self.sign * self.cfg.max_extent);
        let remaining = (limit - x) * self.sign;
        if remaining <= h {
            h = remaining;
            land = Some(limit);
        }
        for &b in self.veff.breakpoints() {
            let d = (b - x) * self.sign;
            if d > 0.0 && d <= h {
                h = d;
                land = Some(b);
            }
        }
        if self.near_origin {
            let cap = ORIGIN_STEP_FRACTION * x.abs();
            if h > cap {
                h = cap;
                land = None;
            }
        }
        let breaks = self.veff.breakpoints();
        // One-sided samples at jumps of the potential.
        let q0_at = if breaks.contains(&x) { x + self.sign * 1e-9 * h } else { x };
        let q0 = sample(self.veff, q0_at, self.energy)?;
        let mut halvings = 0;
        loop {
            if q0.abs() * h * h > STIFFNESS_LIMIT {
                h *= 0.5;
                land = None;
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    return Err(MarchError::StepUnderflow { x });
                }
                continue;
            }
            let signed = self.sign * h;
            let end = land.unwrap_or(x + signed);
            let end_at = if breaks.contains(&end) { end - self.sign * 1e-9 * h } else { end };
            let q1 = sample(self.veff, end_at, self.energy)?;
            if q1.abs() * h * h > STIFFNESS_LIMIT {
                h *= 0.5;
                land = None;
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    return Err(MarchError::StepUnderflow { x });
                }
                continue;
            }
            let qm = sample(self.veff, x + 0.5 * signed, self.energy)?;
            return Ok((signed, [q0, qm, q1], land));
        }
    }
}

/// `|W − W₀|` relative to the size of the two products forming `W`, where
/// `W₀` is the exact Wronskian after `rescalings`.
pub fn normalized_drift(state: &CanonicalState, rescalings: u32) -> f64 {
    let w = state.wronskian();
    let terms = (state.alpha * state.beta_p).abs() + (state.alpha_p * state.beta).abs();
    let expected = (2.0 * f64::from(rescalings) * RESCALE_FACTOR.ln()).exp();
    (w - expected).abs() / terms.max(expected)
}

fn march_impl(
    energy: f64,
    veff: &impl Coefficient,
    x0: f64,
    boundary: Boundary,
    kind: RatioKind,
    cfg: &MarchConfig,
    mut trace: Option<&mut Vec<CanonicalState>>,
) -> Result<MarchOutcome, MarchError> {
    cfg.validate()?;
    let (sign, target, watch_saturation, near_origin) = match boundary {
        Boundary::Point(xb) => {
            let s = if xb >= x0 { 1.0 } else { -1.0 };
            if xb != x0 && s != cfg.direction.sign() {
                return Err(MarchError::WrongSide { x0, boundary: xb });
            }
            (s, Some(xb), false, false)
        }
        Boundary::Infinity => (cfg.direction.sign(), None, true, false),
        Boundary::Origin => {
            if x0 <= cfg.r_min {
                return Err(MarchError::WrongSide { x0, boundary: cfg.r_min });
            }
            (-1.0, Some(cfg.r_min), true, true)
        }
    };
    let marcher = Marcher { veff, energy, cfg: *cfg, sign, target, watch_saturation, near_origin, x0 };

    let mut state = init_at(x0);
    if let Some(t) = trace.as_deref_mut() {
        t.push(state);
    }
    let mut rescalings = 0u32;
    let mut max_drift = 0.0f64;
    let mut steps = 0usize;
    let mut previous: Option<f64> = None;
    let mut before: Option<f64> = None;
    let mut hits = 0u32;
    let mut saturated = false;

    let done = |x: f64| match target {
        Some(t) => x == t,
        None => (x - x0).abs() >= cfg.max_extent,
    };

    if !done(state.x) {
        loop {
            let (h, q, land) = marcher.next_step(state.x)?;
            let mut next = rk4(&state, q, h);
            if let Some(xl) = land {
                next.x = xl;
            }
            state = next;
            steps += 1;
            if state.magnitude() > RESCALE_THRESHOLD {
                state = state.scaled(RESCALE_FACTOR);
                rescalings += 1;
            }
            max_drift = max_drift.max(normalized_drift(&state, rescalings));
            if let Some(t) = trace.as_deref_mut() {
                t.push(state);
            }
            if marcher.watch_saturation {
                let (p, qd) = ratio_pair(&state, kind);
                let r = p / qd;
                if let (Some(prev), true) = (previous, r.is_finite()) {
                    if (r - prev).abs() <= cfg.saturation_tol * r.abs().max(1.0) {
                        hits += 1;
                        if hits >= SATURATION_HITS {
                            saturated = true;
                            break;
                        }
                    } else {
                        hits = 0;
                    }
                }
                before = previous;
                previous = r.is_finite().then_some(r);
            }
            if done(state.x) {
                break;
            }
        }
    }

    let mut pair = ratio_pair(&state, kind);
    if saturated {
        if let (Some(l2), Some(l1)) = (previous, before) {
            if let Some(limit) = aitken(l1, l2, pair.0 / pair.1) {
                pair.0 = limit * pair.1;
            }
        }
    }
    Ok(MarchOutcome {
        ratio: Ratio::from_pair(pair.0, pair.1),
        pair,
        x_stop: state.x,
        saturated,
        state,
        rescalings,
        max_wronskian_drift: max_drift,
        steps,
    })
}

/// Limit of a geometrically settling sequence from its last three terms.
fn aitken(l0: f64, l1: f64, l2: f64) -> Option<f64> {
    let (d1, d2) = (l1 - l0, l2 - l1);
    let denom = d2 - d1;
    if d1 == 0.0 || d2 == 0.0 || d1.signum() != d2.signum() || d2.abs() >= d1.abs() || denom == 0.0 {
        return None;
    }
    let limit = l2 - d2 * d2 / denom;
    limit.is_finite().then_some(limit)
}

/// Marches from `x0` to `boundary` and returns the boundary ratio.
///
/// Toward [`Boundary::Infinity`], `saturated` reports whether the ratio
/// settled before `max_extent`; when it did not, the last ratio is
/// returned and the caller decides what to do.
pub fn march_to_boundary(
    energy: f64,
    veff: &impl Coefficient,
    x0: f64,
    boundary: Boundary,
    kind: RatioKind,
    cfg: &MarchConfig,
) -> Result<MarchOutcome, MarchError> {
    march_impl(energy, veff, x0, boundary, kind, cfg, None)
}

/// Same march, keeping every accepted state (diagnostic dumps).
pub fn march_trace(
    energy: f64,
    veff: &impl Coefficient,
    x0: f64,
    boundary: Boundary,
    kind: RatioKind,
    cfg: &MarchConfig,
) -> Result<(MarchOutcome, Vec<CanonicalState>), MarchError> {
    let mut trace = Vec::new();
    let out = march_impl(energy, veff, x0, boundary, kind, cfg, Some(&mut trace))?;
    Ok((out, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free(_: f64) -> f64 {
        0.0
    }

    #[test]
    fn initial_state() {
        let s = init_at(1.0);
        assert_eq!(s, CanonicalState { x: 1.0, alpha: 1.0, alpha_p: 0.0, beta: 0.0, beta_p: 1.0 });
        assert_eq!(s.wronskian(), 1.0);
        assert_eq!(init_at(-3.5), init_at(-3.5));
    }

    #[test]
    fn zero_rhs_is_integrated_exactly() {
        let mut s = init_at(0.5);
        for _ in 0..1000 {
            s = step_once(&s, 0.0, &free, 1e-2).unwrap();
        }
        assert_eq!(s.alpha, 1.0);
        assert_eq!(s.alpha_p, 0.0);
        assert!((s.beta - (s.x - 0.5)).abs() < 1e-12);
        assert_eq!(s.beta_p, 1.0);
    }

    #[test]
    fn free_particle_matches_closed_form() {
        let kappa: f64 = 1.3;
        let (x0, h) = (0.25, 1e-3);
        let mut s = init_at(x0);
        let mut worst: f64 = 0.0;
        for _ in 0..5000 {
            s = step_once(&s, kappa * kappa, &free, h).unwrap();
            let d = s.x - x0;
            worst = worst.max((s.alpha - (kappa * d).cos()).abs()).max((s.beta - (kappa * d).sin() / kappa).abs());
        }
        assert!(worst < 1e-10, "worst = {worst}");
    }

    #[test]
    fn wronskian_drift_is_small() {
        let v = |x: f64| 0.5 * x * x;
        let mut s = init_at(0.0);
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            s = step_once(&s, 60.0, &v, 1e-3).unwrap();
            worst = worst.max((s.wronskian() - 1.0).abs());
        }
        assert!(worst < 1e-9, "worst = {worst}");
    }

    #[test]
    fn non_finite_sample_reports_abscissa() {
        let v = |x: f64| if x > 1.0 { f64::NAN } else { 0.0 };
        let err = step_once(&init_at(0.99), 0.0, &v, 0.02).unwrap_err();
        assert!(matches!(err, MarchError::NonFinite { x } if x > 1.0));
    }

    #[test]
    fn finite_boundary_is_hit_exactly() {
        let cfg = MarchConfig { step: 0.03, ..MarchConfig::default() }.toward(Direction::TowardRight);
        let out = march_to_boundary(2.0, &free, 0.1, Boundary::Point(1.0), RatioKind::ValueRatio, &cfg).unwrap();
        assert_eq!(out.x_stop, 1.0);
        let expected = -out.state.alpha / out.state.beta;
        assert_eq!(out.ratio, Ratio::Finite(expected));
        let k = 2f64.sqrt();
        assert!((out.state.alpha - (k * 0.9).cos()).abs() < 1e-7);
    }

    #[test]
    fn wrong_side_is_rejected() {
        let cfg = MarchConfig::default().toward(Direction::TowardLeft);
        assert!(matches!(
            march_to_boundary(1.0, &free, 0.0, Boundary::Point(1.0), RatioKind::ValueRatio, &cfg),
            Err(MarchError::WrongSide { .. })
        ));
    }

    #[test]
    fn zero_length_march_is_a_pole() {
        let cfg = MarchConfig::default();
        let out = march_to_boundary(1.0, &free, 0.5, Boundary::Point(0.5), RatioKind::ValueRatio, &cfg).unwrap();
        assert_eq!(out.ratio, Ratio::Pole);
    }

    #[test]
    fn free_particle_at_zero_energy_never_saturates() {
        let cfg = MarchConfig { step: 0.05, ..MarchConfig::default() }.toward(Direction::TowardRight);
        let out = march_to_boundary(0.0, &free, 0.0, Boundary::Infinity, RatioKind::ValueRatio, &cfg).unwrap();
        assert!(!out.saturated);
        assert!((out.x_stop - 200.0).abs() < 1e-9);
    }

    #[test]
    fn forbidden_region_saturates_to_decaying_log_derivative() {
        // q = 4 everywhere: decaying solution toward +inf is exp(-2x), so
        // y'/y at the anchor from the boundary condition y(inf) = 0 is -2.
        let v = |_: f64| 4.0;
        let cfg = MarchConfig { step: 1e-3, ..MarchConfig::default() }.toward(Direction::TowardRight);
        let out = march_to_boundary(0.0, &v, 0.0, Boundary::Infinity, RatioKind::ValueRatio, &cfg).unwrap();
        assert!(out.saturated);
        assert!((out.ratio.value().unwrap() + 2.0).abs() < 1e-8, "{out:?}");
        assert!(out.max_wronskian_drift < 1e-12);
    }

    #[test]
    fn breakpoints_are_landed_on() {
        struct Step;
        impl Coefficient for Step {
            fn veff(&self, x: f64) -> f64 {
                if x < 0.0 {
                    2.0
                } else {
                    0.0
                }
            }
            fn breakpoints(&self) -> &[f64] {
                &[0.0]
            }
        }
        let cfg = MarchConfig { step: 0.07, ..MarchConfig::default() }.toward(Direction::TowardLeft);
        let (_, trace) = march_trace(2.0, &Step, 1.0, Boundary::Point(-1.0), RatioKind::ValueRatio, &cfg).unwrap();
        assert!(trace.iter().any(|s| s.x == 0.0));
        // Below x = 0 the coefficient is zero (v = e), so the solution is linear there.
        let at0 = trace.iter().find(|s| s.x == 0.0).unwrap();
        let end = trace.last().unwrap();
        assert!((end.alpha - (at0.alpha - at0.alpha_p)).abs() < 1e-12);
    }

    #[test]
    fn stiff_regions_shrink_the_step() {
        let v = |_: f64| 1e6;
        let cfg = MarchConfig { step: 0.01, ..MarchConfig::default() }.toward(Direction::TowardRight);
        let out = march_to_boundary(0.0, &v, 0.0, Boundary::Point(0.05), RatioKind::ValueRatio, &cfg).unwrap();
        assert!(out.steps >= 5 * 16);
        assert!((out.ratio.value().unwrap() + 1000.0).abs() < 1e-3);
    }

    #[test]
    fn overflow_is_rescaled() {
        let v = |_: f64| 100.0;
        let cfg = MarchConfig { step: 1e-2, saturation_tol: 1e-15, max_extent: 30.0, ..MarchConfig::default() }
            .toward(Direction::TowardRight);
        let out = march_to_boundary(0.0, &v, 0.0, Boundary::Infinity, RatioKind::ValueRatio, &cfg).unwrap();
        assert!(out.saturated || out.rescalings > 0);
        assert!((out.ratio.value().unwrap() + 10.0).abs() < 1e-6);
    }
}
