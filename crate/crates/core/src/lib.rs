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

//! Canonical Function Method eigenvalue solver for the one-dimensional and
//! radial Schrödinger equation.
//!
//! - [`propagator`] marches the two canonical functions from an anchor.
//! - [`eigensolver`] builds `F(E) = l₊ − l₋`, scans it and refines roots.
//! - [`bands`] solves the Bloch problem of a delta comb.
//! - [`oracles`] holds independent reference solutions.
//! - [`presets`] names the benchmark problems.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bands;
pub mod eigensolver;
pub mod oracles;
pub mod potentials;
pub mod presets;
pub mod propagator;
pub mod units;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/canonical-functions.md")]
    mod canonical_functions {}
    #[doc = include_str!("../../../book/src/eigenvalue-function.md")]
    mod eigenvalue_function {}
    #[doc = include_str!("../../../book/src/presets.md")]
    mod presets {}
    #[doc = include_str!("../../../book/src/bands.md")]
    mod bands {}
    #[doc = include_str!("../../../book/src/units.md")]
    mod units {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
