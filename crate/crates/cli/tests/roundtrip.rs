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

use cfm_cli::config::{Command, ProblemSource, RunConfig};
use cfm_cli::output::sig;
use cfm_cli::{parse_config, serialize_config};
use proptest::prelude::*;

proptest! {
    #[test]
    fn sig_keeps_nine_digits(x in -1e12f64..1e12, scale in -20i32..20) {
        let x = x * 10f64.powi(scale);
        prop_assume!(x != 0.0);
        let back: f64 = sig(x, 9).parse().unwrap();
        prop_assert!(((back - x) / x).abs() <= 5e-9);
    }

    #[test]
    fn preset_configs_round_trip(
        emin in -200.0f64..-100.0,
        width in 1e-3f64..99.0,
        depth in 1.0f64..300.0,
        points in 2usize..5000,
        step in 1e-5f64..1e-2,
        oracle in any::<bool>(),
    ) {
        let mut cfg = RunConfig::preset(Command::Solve, "morse");
        cfg.problem = Some(ProblemSource::Preset {
            name: "morse".into(),
            mass: None,
            overrides: vec![("depth".into(), depth)],
        });
        cfg.emin = Some(emin);
        cfg.emax = Some(emin + width);
        cfg.grid_points = Some(points);
        cfg.march.step = Some(step);
        cfg.output.oracle = oracle;
        let text = serialize_config(&cfg);
        prop_assert_eq!(parse_config(&text).unwrap(), cfg);
    }
}
