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

//! Reference spectra: closed forms, single-variable bisection, and a
//! Numerov shooting solver with node counting.
//!
//! Nothing here calls into the canonical-function code. Mass enters as the
//! factor `c = 2μ/ħ²`, so `E = k²/c`.

use std::f64::consts::PI;

use thiserror::Error;

use crate::units::MassConvention;

const BISECT_ABS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("delta-comb oracle needs g >= 0, got {0}")]
    NegativeStrength(f64),
    #[error("window exhausted: found {found} of {wanted} levels")]
    WindowExhausted { found: usize, wanted: usize },
    #[error("invalid oracle argument: {0}")]
    Invalid(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub levels: Vec<f64>,
    pub method: &'static str,
    pub tolerance: f64,
}

/// Root of `f` on `[lo, hi]` given `f(lo)` and `f(hi)` of opposite sign
/// (or zero), to an absolute bracket of `tol`.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    let fhi = f(hi);
    if fhi == 0.0 {
        return hi;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn infinite_well_exact(width: f64, n_max: u32, mass: MassConvention) -> OracleResult {
    let c = mass.factor();
    let levels = (1..=n_max).map(|n| (f64::from(n) * PI / width).powi(2) / c).collect();
    OracleResult { levels, method: "closed form n²π²ħ²/2ma²", tolerance: 0.0 }
}

/// Bound levels of a well of `width` and `depth` (zero inside), from
/// `arcsin(k/K) = (nπ − k·width)/2` with `K = √(c·depth)`.
pub fn finite_well_exact(width: f64, depth: f64, mass: MassConvention) -> OracleResult {
    let c = mass.factor();
    let kmax = (c * depth).sqrt();
    let mut levels = Vec::new();
    for n in 1.. {
        let nf = f64::from(n);
        let g = |k: f64| (k / kmax).min(1.0).asin() + 0.5 * k * width - 0.5 * nf * PI;
        if g(kmax) <= 0.0 {
            break;
        }
        let k = bisect(g, 0.0, kmax, BISECT_ABS * kmax.max(1.0) * 1e-3);
        let e = k * k / c;
        if !(e < depth * (1.0 - 1e-12)) {
            break;
        }
        levels.push(e);
    }
    OracleResult { levels, method: "transcendental equation, bisection per branch", tolerance: BISECT_ABS }
}

/// `ħω₀(n + ½)` for `n = 0..=n_max` with `ħ = 1`.
pub fn harmonic_exact(omega0: f64, n_max: u32) -> OracleResult {
    let levels = (0..=n_max).map(|n| omega0 * (f64::from(n) + 0.5)).collect();
    OracleResult { levels, method: "closed form ħω₀(n+½)", tolerance: 0.0 }
}

/// `−1/n²` Ry for `n = 1..=n_max`.
pub fn hydrogen_exact(n_max: u32) -> OracleResult {
    let levels = (1..=n_max).map(|n| -1.0 / f64::from(n * n)).collect();
    OracleResult { levels, method: "closed form −1/n² Ry", tolerance: 0.0 }
}

/// Bound levels of `D[1 − e^{−a(r−r_e)}]² − D` and the level-count
/// parameter `N = √(cD)/a − ½`.
pub fn morse_exact(depth: f64, range: f64, mass: MassConvention) -> (OracleResult, f64) {
    let c = mass.factor();
    let lambda = (c * depth).sqrt() / range;
    let count = lambda - 0.5;
    let levels = (0..)
        .map(f64::from)
        .take_while(|&n| lambda - n - 0.5 > 0.0)
        .map(|n| -(range * range / c) * (lambda - n - 0.5).powi(2))
        .collect();
    (OracleResult { levels, method: "closed form Morse levels", tolerance: 0.0 }, count)
}

/// Lowest `n_bands` energies of the delta comb `Σ g δ(x − na)` at Bloch
/// wavevector `k`, from `(c g/2κ) sin κa + cos κa = cos ka`.
pub fn delta_comb_exact(
    lattice: f64,
    strength: f64,
    k: f64,
    n_bands: usize,
    mass: MassConvention,
) -> Result<Vec<f64>, OracleError> {
    if strength < 0.0 {
        return Err(OracleError::NegativeStrength(strength));
    }
    if !(lattice > 0.0) {
        return Err(OracleError::Invalid("lattice must be positive"));
    }
    let c = mass.factor();
    let target = (k * lattice).cos();
    let lhs = |t: f64| 0.5 * c * strength * lattice * (t.sin() / t) + t.cos() - target;
    let mut energies = Vec::with_capacity(n_bands);
    for n in 1..=n_bands {
        // On ((n−1)π, nπ) the left side runs from sign (−1)^(n−1) to (−1)^n
        // relative to cos ka; the endpoints are known exactly, so they are
        // never sampled.
        let (mut lo, mut hi) = ((n as f64 - 1.0) * PI, n as f64 * PI);
        let lo_sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        while hi - lo > 1e-15 * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f = lhs(mid);
            if f != 0.0 && f.signum() == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let kappa = 0.5 * (lo + hi) / lattice;
        energies.push(kappa * kappa / c);
    }
    Ok(energies)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteBarrier {
    /// Well width.
    pub a: f64,
    /// Barrier width.
    pub b: f64,
    pub v0: f64,
}

/// Strength of the delta comb equivalent to thin barriers: `g = V0·b`, which
/// written with `Q² = 2mV0/ħ²` is `Q² b ħ²/2m`.
pub fn equivalent_delta_strength(barrier: FiniteBarrier) -> f64 {
    barrier.v0 * barrier.b
}

/// Bands below `V0` of the finite-barrier Kronig–Penney lattice with period
/// `a + b`, from
/// `(Q² − κ²)/(2Qκ) sinh Qb sin κa + cosh Qb cos κa = cos k(a+b)`.
pub fn finite_barrier_kp_exact(
    barrier: FiniteBarrier,
    k: f64,
    n_bands: usize,
    mass: MassConvention,
) -> Result<Vec<f64>, OracleError> {
    let FiniteBarrier { a, b, v0 } = barrier;
    if !(a > 0.0 && b >= 0.0 && v0 > 0.0) {
        return Err(OracleError::Invalid("need a > 0, b >= 0, V0 > 0"));
    }
    let c = mass.factor();
    let target = (k * (a + b)).cos();
    let kmax = (c * v0).sqrt();
    let h = |kappa: f64| {
        let q = (kmax * kmax - kappa * kappa).max(0.0).sqrt();
        let qb = q * b;
        let mixed = if kappa == 0.0 {
            // sin κa / κ → a as κ → 0.
            0.5 * q * qb.sinh() * a
        } else {
            (q * q - kappa * kappa) / (2.0 * q * kappa) * qb.sinh() * (kappa * a).sin()
        };
        mixed + qb.cosh() * (kappa * a).cos() - target
    };
    // Scan each branch κa ∈ ((n−1)π, nπ] for its sign changes.
    let mut energies = Vec::new();
    let samples = 64;
    'branches: for n in 1.. {
        let lo = (n as f64 - 1.0) * PI / a;
        if lo >= kmax {
            break;
        }
        let hi = (n as f64 * PI / a).min(kmax * (1.0 - 1e-15));
        let mut prev = (lo, h(lo));
        for i in 1..=samples {
            let x = lo + (hi - lo) * i as f64 / samples as f64;
            let fx = h(x);
            if prev.1 == 0.0 || prev.1.signum() != fx.signum() {
                let kappa = bisect(h, prev.0, x, 1e-15 * x.max(1.0));
                let e = kappa * kappa / c;
                if energies.last().is_none_or(|&last: &f64| e > last * (1.0 + 1e-12)) {
                    energies.push(e);
                }
                if energies.len() == n_bands {
                    break 'branches;
                }
            }
            prev = (x, fx);
        }
    }
    if energies.len() < n_bands {
        return Err(OracleError::WindowExhausted { found: energies.len(), wanted: n_bands });
    }
    Ok(energies)
}

/// Dirichlet problem `−ψ''/c + Vψ = Eψ` on `[lo, hi]` on a uniform Numerov
/// grid.
pub struct NumerovReference<V: Fn(f64) -> f64> {
    pub potential: V,
    pub domain: (f64, f64),
    pub mass: MassConvention,
    pub intervals: usize,
}

impl<V: Fn(f64) -> f64> NumerovReference<V> {
    pub fn new(potential: V, domain: (f64, f64), mass: MassConvention) -> Self {
        NumerovReference { potential, domain, mass, intervals: 200_000 }
    }

    fn table(&self) -> Vec<f64> {
        let (lo, hi) = self.domain;
        let h = (hi - lo) / self.intervals as f64;
        (0..=self.intervals).map(|i| (self.potential)(lo + h * i as f64)).collect()
    }

    /// Interior nodes of the solution shot from the left wall at energy `e`.
    pub fn nodes(&self, e: f64) -> usize {
        self.nodes_on(&self.table(), e)
    }

    fn nodes_on(&self, table: &[f64], e: f64) -> usize {
        let (lo, hi) = self.domain;
        let n = self.intervals;
        let h = (hi - lo) / n as f64;
        let s = h * h / 12.0 * self.mass.factor();
        let t = |i: usize| s * (table[i] - e);
        // Summed form in z = (1 − T)ψ and its increments, which keeps the
        // small h²-terms out of a cancelling coefficient.
        let mut t_cur = t(1);
        let mut psi = 1e-30;
        let mut z = (1.0 - t_cur) * psi;
        let mut dz = z;
        let mut count = 0;
        for i in 2..=n {
            dz += 12.0 * t_cur * psi;
            z += dz;
            t_cur = t(i);
            let next = z / (1.0 - t_cur);
            if next != 0.0 && next.signum() != psi.signum() {
                count += 1;
            }
            psi = next;
            if psi.abs() > 1e100 {
                psi *= 1e-100;
                z *= 1e-100;
                dz *= 1e-100;
            }
        }
        count
    }

    /// The `n_levels` lowest levels inside `window`, each refined to
    /// `rel_tol` relative bracket width.
    pub fn levels(&self, window: (f64, f64), n_levels: usize, rel_tol: f64) -> Result<OracleResult, OracleError> {
        let (elo, ehi) = window;
        if !(elo < ehi) {
            return Err(OracleError::Invalid("empty window"));
        }
        let table = self.table();
        let base = self.nodes_on(&table, elo);
        let top = self.nodes_on(&table, ehi);
        let available = top.saturating_sub(base);
        if available < n_levels {
            return Err(OracleError::WindowExhausted { found: available, wanted: n_levels });
        }
        let mut levels = Vec::with_capacity(n_levels);
        for m in 0..n_levels {
            let wanted = base + m;
            let (mut lo, mut hi) = (levels.last().copied().unwrap_or(elo), ehi);
            while hi - lo > rel_tol * lo.abs().max(hi.abs()).max(1e-300) {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.nodes_on(&table, mid) > wanted {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            levels.push(0.5 * (lo + hi));
        }
        Ok(OracleResult { levels, method: "Numerov shooting with node counting", tolerance: rel_tol })
    }
}

/// Convenience wrapper around [`NumerovReference`] with the default grid.
pub fn numerov_reference(
    potential: impl Fn(f64) -> f64,
    domain: (f64, f64),
    mass: MassConvention,
    window: (f64, f64),
    n_levels: usize,
) -> Result<OracleResult, OracleError> {
    NumerovReference::new(potential, domain, mass).levels(window, n_levels, 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const AU: MassConvention = MassConvention::atomic();

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn infinite_well_levels() {
        let a = 25.0 * PI / 2f64.sqrt();
        let r = infinite_well_exact(a, 25, AU);
        assert!((r.levels[0] - 1.6e-3).abs() < 1e-15);
        assert!((r.levels[24] - 1.0).abs() < 1e-14);
        for (i, e) in r.levels.iter().enumerate() {
            let n = (i + 1) as f64;
            assert!(rel(*e, r.levels[0] * n * n) < 1e-13);
        }
    }

    #[test]
    fn finite_well_levels() {
        let a = 24.0 * PI / 2f64.sqrt();
        let r = finite_well_exact(a, 1.0, AU);
        assert_eq!(r.levels.len(), 24);
        assert!(rel(r.levels[0], 1.6475233e-3) < 1e-7);
        assert!(rel(r.levels[23], 0.9318770) < 1e-7);
    }

    #[test]
    fn deep_finite_well_approaches_infinite_well() {
        let a = 10.0;
        let deep = finite_well_exact(a, 1e4, AU);
        let hard = infinite_well_exact(a, 5, AU);
        for (d, h) in deep.levels.iter().zip(&hard.levels) {
            assert!(rel(*d, *h) < 0.01);
            assert!(d < h);
        }
    }

    #[test]
    fn harmonic_and_hydrogen() {
        let h = harmonic_exact(2.0 / 51.0, 25);
        assert!(rel(h.levels[0], 1.9607844e-2) < 1e-7);
        assert!((h.levels[25] - 1.0).abs() < 1e-14);
        let hy = hydrogen_exact(24);
        assert_eq!(hy.levels[0], -1.0);
        assert_eq!(hy.levels[3], -6.25e-2);
        for (i, e) in hy.levels.iter().enumerate() {
            assert!((e * ((i + 1) * (i + 1)) as f64 + 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn morse_levels() {
        let (r, n) = morse_exact(188.4355, 0.711248, MassConvention::reduced());
        assert_eq!(r.levels.len(), 19);
        assert!((n - 18.8).abs() < 0.01);
        assert!(rel(r.levels[0], -178.798538) < 1e-8);
        // The printed top level sits 3.2e-5 off the closed form it quotes.
        assert!(rel(r.levels[18], -0.32387724) < 5e-5);
        assert!(rel(r.levels[18], -0.3238669169920) < 1e-12);
    }

    #[test]
    fn delta_comb_free_limit_and_errors() {
        let a = 2.22;
        for &k in &[0.0, 0.3, 1.0, PI / a] {
            let e = delta_comb_exact(a, 0.0, k, 1, AU).unwrap()[0];
            // Tangential crossings at the zone edges only resolve to ~1e-8.
            assert!((e - k * k / 2.0).abs() < 1e-7, "k = {k}");
        }
        assert!(matches!(delta_comb_exact(a, -1.0, 0.0, 1, AU), Err(OracleError::NegativeStrength(_))));
    }

    #[test]
    fn delta_comb_regression_anchor() {
        let a = 2.22;
        let e = delta_comb_exact(a, 1.0, PI / a, 1, AU).unwrap()[0];
        // The band top at the zone edge is pinned by κa = π.
        assert!((e - (PI / a).powi(2) / 2.0).abs() < 1e-12);
        let bottom = delta_comb_exact(a, 1.0, 0.0, 1, AU).unwrap()[0];
        assert!((bottom - 0.323_761_247_04).abs() < 1e-10, "{bottom}");
    }

    #[test]
    fn delta_comb_hits_requested_band_count_below_one() {
        for (a, n) in [(2.22, 1usize), (6.66, 3), (11.12, 5)] {
            let tops = delta_comb_exact(a, 1.0, PI / a, n + 1, AU).unwrap();
            let bottoms = delta_comb_exact(a, 1.0, 0.0, n + 1, AU).unwrap();
            let below = (0..=n).filter(|&i| bottoms[i].min(tops[i]) < 1.0).count();
            assert_eq!(below, n, "a = {a}");
        }
    }

    #[test]
    fn thin_barriers_converge_to_delta_comb() {
        // Cell length a + b is held at the comb lattice.
        let (a, g, v0) = (2.22, 1.0, 1e4);
        let b = g / v0;
        let barrier = FiniteBarrier { a: a - b, b, v0 };
        assert!((equivalent_delta_strength(barrier) - g).abs() < 1e-12);
        for &k in &[0.1, 0.7, 1.2] {
            let kp = finite_barrier_kp_exact(barrier, k, 2, AU).unwrap();
            let comb = delta_comb_exact(a, g, k, 2, AU).unwrap();
            for (x, y) in kp.iter().zip(&comb) {
                assert!((x - y).abs() < 1e-4, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn shallow_barriers_give_free_dispersion() {
        let barrier = FiniteBarrier { a: 3.0, b: 1e-12, v0: 10.0 };
        let k = 0.4;
        let e = finite_barrier_kp_exact(barrier, k, 1, AU).unwrap()[0];
        assert!((e - k * k / 2.0).abs() < 1e-6);
    }

    #[test]
    fn numerov_matches_infinite_well() {
        let a = 10.0;
        let r = numerov_reference(|_| 0.0, (0.0, a), AU, (1e-3, 1.5), 5).unwrap();
        let exact = infinite_well_exact(a, 5, AU);
        for (n, e) in r.levels.iter().zip(&exact.levels) {
            assert!(rel(*n, *e) < 1e-8, "{n} vs {e}");
        }
    }

    #[test]
    fn numerov_matches_morse() {
        let (d, alpha, re) = (188.4355, 0.711248, 1.9975);
        let v = |r: f64| d * (1.0 - (-alpha * (r - re)).exp()).powi(2) - d;
        let m = MassConvention::reduced();
        let r = numerov_reference(v, (0.3, 20.0), m, (-d, -10.0), 10).unwrap();
        let (exact, _) = morse_exact(d, alpha, m);
        for (n, e) in r.levels.iter().zip(&exact.levels) {
            assert!(rel(*n, *e) < 1e-7, "{n} vs {e}");
        }
    }

    #[test]
    fn numerov_reports_short_window() {
        let err = numerov_reference(|_| 0.0, (0.0, 1.0), AU, (1e-3, 1.0), 3).unwrap_err();
        assert!(matches!(err, OracleError::WindowExhausted { .. }));
    }

    proptest! {
        #[test]
        fn kp_symmetric_in_k(k in 0.0f64..1.4) {
            let barrier = FiniteBarrier { a: 2.0, b: 0.2, v0: 20.0 };
            let plus = finite_barrier_kp_exact(barrier, k, 2, AU).unwrap();
            let minus = finite_barrier_kp_exact(barrier, -k, 2, AU).unwrap();
            prop_assert_eq!(plus, minus);
        }

        #[test]
        fn delta_comb_bands_ordered(k in 0.0f64..1.0, g in 0.0f64..5.0) {
            let a = std::f64::consts::PI;
            let e = delta_comb_exact(a, g, k, 4, AU).unwrap();
            prop_assert!(e.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
