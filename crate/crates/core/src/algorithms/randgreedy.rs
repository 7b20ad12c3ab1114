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

use serde::{Deserialize, Serialize};

use crate::adversaries::ArrivalStream;
use crate::algorithms::{Driver, RunResult, StepOutcome, StepRecord};
use crate::coloring::ColoringState;
use crate::error::{Error, Result};
use crate::rng::RngHandle;
use crate::types::ColorRef;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandGreedyOptions {
    /// Keep coloring after an edge finds no shared free color; that edge stays
    /// uncolored.
    pub continue_after_failure: bool,
}

/// Randomized greedy over a shared palette `[palette_size]`: each edge takes
/// a uniformly random color free at both endpoints, or fails.
pub fn run_randomized_greedy(
    stream: impl Into<ArrivalStream>,
    palette_size: u32,
    rng: &mut RngHandle,
    opts: RandGreedyOptions,
) -> Result<RunResult> {
    if palette_size == 0 {
        return Err(Error::InvalidParams("palette_size must be at least 1".into()));
    }
    let mut driver = Driver::new(stream.into());
    let mut state = ColoringState::new(driver.n(), palette_size);
    driver.run(opts.continue_after_failure, |t, a| {
        let (count, _) = state.shared_free_alg(a.edge, None);
        let (outcome, color) = if count == 0 {
            (StepOutcome::Failed, None)
        } else {
            let k = rng.below(count);
            let c = ColorRef::alg(state.shared_free_alg(a.edge, Some(k)).1.unwrap());
            state.record(a.edge, c);
            (StepOutcome::Random, Some(c))
        };
        StepRecord { t, edge: a.edge, z: None, outcome, color, bad_endpoints: [false; 2] }
    })?;
    Ok(driver.finish(state, None, None, None))
}
