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

//! The online colorers.

mod greedy;
mod listgreedy;
mod randgreedy;
mod sampling;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::adversaries::{Arrival, ArrivalStream, PublicHistory, StreamCursor};
use crate::coloring::{validate_coloring, ColoringState, ValidationReport};
use crate::diagnostics::Metrics;
use crate::error::Result;
use crate::params::Params;
use crate::ptable::PTable;
use crate::types::{ColorRef, Edge};

pub use greedy::run_greedy;
pub use listgreedy::{run_list_greedy, ListChoice, ListGreedyOptions};
pub use randgreedy::{run_randomized_greedy, RandGreedyOptions};
pub use sampling::{run_alg1, run_alg2, sample_k};

/// A list-coloring instance: every arrival carries its palette of opaque
/// color ids.
pub type ListInstance = crate::adversaries::Instance;

/// What happened to one arrival.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepOutcome {
    /// Colored from the main palette by a sampled `K_t`.
    Colored,
    /// Marked because `Z > 1`.
    MarkedZ,
    /// Marked because `K_t = ⊥`.
    MarkedBottom,
    /// Marked at a bad endpoint (no positive `P`, or a dangerous endpoint).
    MarkedBad,
    /// Colored at a bad endpoint with the lowest color of positive `P`.
    BadColored,
    /// Colored first-fit by plain greedy.
    Greedy,
    /// Colored uniformly from the shared free colors or the list palette.
    Random,
    /// No admissible color.
    Failed,
}

impl StepOutcome {
    pub fn is_marked(self) -> bool {
        matches!(self, StepOutcome::MarkedZ | StepOutcome::MarkedBottom | StepOutcome::MarkedBad)
    }
}

/// One line of a run's trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Arrival index, starting at 1.
    pub t: u32,
    pub edge: Edge,
    /// `Z^{(t-1)}` of the arriving edge, for the sampling algorithms.
    pub z: Option<f64>,
    pub outcome: StepOutcome,
    pub color: Option<ColorRef>,
    /// Whether `edge.u()` and `edge.v()` were bad on arrival.
    pub bad_endpoints: [bool; 2],
}

impl StepRecord {
    pub fn bad_branch(&self) -> bool {
        self.bad_endpoints[0] || self.bad_endpoints[1]
    }
}

/// An arrival that could not be colored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    /// 0-based arrival index.
    pub index: usize,
    pub edge: Edge,
    pub reason: String,
}

/// Per-vertex counters of the oblivious-adversary algorithm.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadnessState {
    pub badness: Vec<u32>,
    pub baddeg: Vec<u32>,
}

impl BadnessState {
    pub fn new(n: usize) -> Self {
        BadnessState { badness: vec![0; n], baddeg: vec![0; n] }
    }

    pub fn is_bad(&self, v: usize, params: &Params) -> bool {
        f64::from(self.badness[v]) >= params.badness_threshold
    }

    pub fn is_dangerous(&self, v: usize, params: &Params) -> bool {
        f64::from(self.baddeg[v]) >= params.dangerous_threshold
    }
}

/// What to keep after a sampling run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosticsHooks {
    /// Keep the event-log table so trajectories and scaling factors can be
    /// replayed afterwards.
    pub retain_ptable: bool,
}

impl DiagnosticsHooks {
    pub fn retain() -> Self {
        DiagnosticsHooks { retain_ptable: true }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunResult {
    pub state: ColoringState,
    /// Arrivals in order, palettes included.
    pub arrivals: Vec<Arrival>,
    pub marked: BTreeSet<Edge>,
    pub trace: Vec<StepRecord>,
    pub failures: Vec<Failure>,
    pub metrics: Metrics,
    pub params: Option<Params>,
    pub badness: Option<BadnessState>,
    pub ptable: Option<PTable>,
}

impl RunResult {
    pub fn edges(&self) -> Vec<Edge> {
        self.arrivals.iter().map(|a| a.edge).collect()
    }

    /// The first failure, if any.
    pub fn failure(&self) -> Option<&Failure> {
        self.failures.first()
    }

    pub fn failed(&self) -> bool {
        !self.failures.is_empty()
    }

    /// Validates the colored part of the run. Edges listed as failures are
    /// left out, so a failed run still reports conflicts among its prefix.
    pub fn validate(&self) -> ValidationReport {
        let failed: BTreeSet<Edge> = self.failures.iter().map(|f| f.edge).collect();
        let edges: Vec<Edge> =
            self.arrivals.iter().map(|a| a.edge).filter(|e| !failed.contains(e)).collect();
        validate_coloring(&edges, &self.state)
    }

    /// Arrivals whose assigned color is not in their palette.
    pub fn palette_violations(&self) -> Vec<Edge> {
        self.arrivals
            .iter()
            .filter_map(|a| {
                let p = a.palette.as_ref()?;
                let c = self.state.color_of(a.edge)?;
                (!p.contains(&c.index)).then_some(a.edge)
            })
            .collect()
    }

    /// Arrival time (1-based) of `e`.
    pub fn arrival_time(&self, e: Edge) -> Option<u32> {
        self.arrivals.iter().position(|a| a.edge == e).map(|i| i as u32 + 1)
    }
}

/// Drives a cursor to completion. `step` colors one arrival and returns its
/// trace line; a `Failed` outcome stops the run unless `keep_going`.
pub(crate) struct Driver {
    pub cursor: StreamCursor,
    pub history: PublicHistory,
    pub arrivals: Vec<Arrival>,
    pub trace: Vec<StepRecord>,
    pub failures: Vec<Failure>,
    pub marked: BTreeSet<Edge>,
}

impl Driver {
    pub fn new(stream: ArrivalStream) -> Self {
        Driver {
            cursor: stream.into_cursor(),
            history: PublicHistory::new(),
            arrivals: Vec::new(),
            trace: Vec::new(),
            failures: Vec::new(),
            marked: BTreeSet::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.cursor.n() as usize
    }

    pub fn run(
        &mut self,
        keep_going: bool,
        mut step: impl FnMut(u32, &Arrival) -> StepRecord,
    ) -> Result<()> {
        while let Some(a) = self.cursor.next_arrival(&self.history)? {
            let t = self.arrivals.len() as u32 + 1;
            let rec = step(t, &a);
            self.history.push(a.edge, rec.color);
            if rec.outcome.is_marked() {
                self.marked.insert(a.edge);
            }
            let stop = rec.outcome == StepOutcome::Failed;
            if stop {
                self.failures.push(Failure {
                    index: t as usize - 1,
                    edge: a.edge,
                    reason: "no admissible color".into(),
                });
            }
            self.arrivals.push(a);
            self.trace.push(rec);
            if stop && !keep_going {
                break;
            }
        }
        Ok(())
    }

    pub fn finish(
        self,
        state: ColoringState,
        params: Option<Params>,
        badness: Option<BadnessState>,
        ptable: Option<PTable>,
    ) -> RunResult {
        let metrics = Metrics::compute(
            &state,
            &self.marked,
            badness.as_ref().zip(params.as_ref()),
            self.failures.len(),
            self.arrivals.len(),
        );
        RunResult {
            state,
            arrivals: self.arrivals,
            marked: self.marked,
            trace: self.trace,
            failures: self.failures,
            metrics,
            params,
            badness,
            ptable,
        }
    }
}
