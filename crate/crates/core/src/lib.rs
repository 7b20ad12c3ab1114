// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Online edge coloring against adaptive and oblivious adversaries.
//!
//! The crate holds the coloring algorithms, the adversarial instance
//! generators that stress them and diagnostics for replaying the per-edge
//! probability quantities of a run.

pub mod adversaries;
pub mod algorithms;
pub mod coloring;
pub mod diagnostics;
pub mod error;
pub mod params;
pub mod ptable;
pub mod rng;
pub mod types;

pub use adversaries::{AdaptiveStream, Arrival, ArrivalStream, Instance, PublicHistory};
pub use algorithms::{
    run_alg1, run_alg2, run_greedy, run_list_greedy, run_randomized_greedy, DiagnosticsHooks,
    RunResult, StepOutcome, StepRecord,
};
pub use coloring::{validate_coloring, ColoringState, ValidationReport};
pub use error::{Error, Result};
pub use params::{derive_params, Mode, Overrides, Params};
pub use ptable::{DenseOracle, PTable};
pub use rng::RngHandle;
pub use types::{ColorRef, Edge, Palette, VertexId};
