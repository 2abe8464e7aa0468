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

//! Command-line front end for `cfm`: configuration files, presets and
//! table / plot-data output.

pub mod config;
pub mod output;
pub mod params;
pub mod quantity;
pub mod run;

pub use config::{parse_config, serialize_config, Command, ConfigError, RunConfig};
pub use run::{run, CliError, Report};
