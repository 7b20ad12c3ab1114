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

/// How a list colorer picks among the admissible palette colors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ListChoice {
    #[default]
    Uniform,
    /// The first admissible color in palette order.
    FirstFit,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListGreedyOptions {
    pub choice: ListChoice,
    pub continue_after_failure: bool,
}

/// Colors each arrival with a color from its own palette that is unused at
/// both endpoints, or fails. Colors are opaque ids in the `Alg` palette.
pub fn run_list_greedy(
    stream: impl Into<ArrivalStream>,
    rng: &mut RngHandle,
    opts: ListGreedyOptions,
) -> Result<RunResult> {
    let mut driver = Driver::new(stream.into());
    let mut state = ColoringState::new(driver.n(), 0);
    let mut missing = None;
    let mut admissible = Vec::new();
    driver.run(opts.continue_after_failure, |t, a| {
        let Some(palette) = &a.palette else {
            missing.get_or_insert(t);
            return StepRecord {
                t,
                edge: a.edge,
                z: None,
                outcome: StepOutcome::Failed,
                color: None,
                bad_endpoints: [false; 2],
            };
        };
        state.grow_alg_palette(palette.iter().copied().max().unwrap_or(0));
        admissible.clear();
        admissible.extend(
            palette.iter().copied().filter(|&c| c > 0 && state.is_free_for(a.edge, ColorRef::alg(c))),
        );
        let pick = match (opts.choice, admissible.len()) {
            (_, 0) => None,
            (ListChoice::FirstFit, _) => Some(admissible[0]),
            (ListChoice::Uniform, k) => Some(admissible[rng.below(k)]),
        };
        let (outcome, color) = match pick {
            Some(c) => {
                state.record(a.edge, ColorRef::alg(c));
                (StepOutcome::Random, Some(ColorRef::alg(c)))
            }
            None => (StepOutcome::Failed, None),
        };
        StepRecord { t, edge: a.edge, z: None, outcome, color, bad_endpoints: [false; 2] }
    })?;
    if let Some(t) = missing {
        return Err(Error::StreamViolation {
            index: t as usize - 1,
            reason: "list coloring needs a palette on every arrival".into(),
        });
    }
    Ok(driver.finish(state, None, None, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::{gen_list_lb_deterministic, Arrival, Instance};
    use crate::types::Edge;

    #[test]
    fn disjoint_singletons_always_succeed() {
        let arrivals = (1..5)
            .map(|i| Arrival { edge: Edge::new(0, i), palette: Some(vec![i]) })
            .collect();
        let inst = Instance { n: 5, delta: 4, arrivals };
        let r = run_list_greedy(inst, &mut RngHandle::new(0), Default::default()).unwrap();
        assert!(!r.failed());
        assert!(r.validate().is_empty());
        assert!(r.palette_violations().is_empty());
    }

    #[test]
    fn deterministic_lower_bound_fails_bridge() {
        for delta in 2..=4 {
            for seed in 0..20 {
                for choice in [ListChoice::Uniform, ListChoice::FirstFit] {
                    let opts = ListGreedyOptions { choice, continue_after_failure: false };
                    let r = run_list_greedy(
                        gen_list_lb_deterministic(delta),
                        &mut RngHandle::new(seed),
                        opts,
                    )
                    .unwrap();
                    let f = r.failure().expect("bridge must fail");
                    assert_eq!(f.edge, Edge::new(0, 1));
                    assert_eq!(f.index, 2 * delta as usize - 2);
                }
            }
        }
    }

    #[test]
    fn missing_palette_is_rejected() {
        let inst = Instance::new(2, 1, [Edge::new(0, 1)]);
        assert!(run_list_greedy(inst, &mut RngHandle::new(0), Default::default()).is_err());
    }
}
