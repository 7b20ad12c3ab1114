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

use crate::adversaries::ArrivalStream;
use crate::algorithms::{Driver, RunResult, StepOutcome, StepRecord};
use crate::coloring::ColoringState;
use crate::error::Result;

/// First-fit greedy: every edge takes the smallest greedy color free at both
/// endpoints. Uses at most `2Δ - 1` colors.
pub fn run_greedy(stream: impl Into<ArrivalStream>) -> Result<RunResult> {
    let mut driver = Driver::new(stream.into());
    let mut state = ColoringState::new(driver.n(), 0);
    driver.run(false, |t, a| {
        let color = state.greedy_assign(a.edge);
        StepRecord {
            t,
            edge: a.edge,
            z: None,
            outcome: StepOutcome::Greedy,
            color: Some(color),
            bad_endpoints: [false; 2],
        }
    })?;
    Ok(driver.finish(state, None, None, None))
}
