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

//! Storage for the per-(edge, color) probabilities `P_ec`.
//!
//! The sampling algorithms conceptually update `P_fc` for every potential
//! future edge `f` next to each arrival. Materializing that is quadratic in
//! `n`. Instead [`PTable`] keeps, per vertex, the time-ordered list of events
//! that touched it. `P_f` depends only on the events at the two endpoints of
//! `f`, applied in time order, so it is rebuilt on demand by merging two logs.
//!
//! [`DenseOracle`] is the eager twin: an explicit matrix over all vertex pairs
//! updated exactly as the pseudocode reads. It exists for differential tests
//! and exact enumeration on small instances.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::params::Params;
use crate::types::{Edge, VertexId};

/// Index of a stored probability vector inside a [`PTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleId(u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    /// The arrival sampled from its distribution `pvec` (stored in the table)
    /// and drew `chosen` (`None` is ⊥).
    Sample { pvec: SampleId, chosen: Option<u32> },
    /// A bad-vertex assignment burned one color at both endpoints.
    Burn { color: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexEvent {
    pub time: u32,
    pub kind: EventKind,
}

/// Lazy event-log representation of all `P_ec`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PTable {
    delta: usize,
    initial: f64,
    cap: f64,
    logs: Vec<Vec<VertexEvent>>,
    pvecs: Vec<f64>,
}

impl PTable {
    pub fn new(params: &Params) -> Self {
        Self::with_values(params.n as usize, params.delta as usize, params.initial_p(), params.cap)
    }

    /// A table for `n` vertices and `delta` colors with explicit initial value
    /// and cap.
    pub fn with_values(n: usize, delta: usize, initial: f64, cap: f64) -> Self {
        PTable { delta, initial, cap, logs: vec![Vec::new(); n], pvecs: Vec::new() }
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn log(&self, v: VertexId) -> &[VertexEvent] {
        &self.logs[v.index()]
    }

    /// The event recorded at `v` for the arrival at time `t`, if any.
    pub fn event_at(&self, v: VertexId, t: u32) -> Option<&VertexEvent> {
        let log = &self.logs[v.index()];
        log.binary_search_by_key(&t, |ev| ev.time).ok().map(|i| &log[i])
    }

    /// The stored distribution of a sample event.
    pub fn pvec(&self, id: SampleId) -> &[f64] {
        let start = id.0 as usize * self.delta;
        &self.pvecs[start..start + self.delta]
    }

    /// Total number of events over all vertices (each arrival counts twice).
    pub fn event_count(&self) -> usize {
        self.logs.iter().map(Vec::len).sum()
    }

    fn push(&mut self, e: Edge, event: VertexEvent) {
        for x in e.endpoints() {
            let log = &mut self.logs[x.index()];
            assert!(
                log.last().is_none_or(|last| last.time < event.time),
                "event at t={} for {e} is out of order at vertex {x}",
                event.time
            );
            log.push(event);
        }
    }

    /// Records that `e` arrived at time `t`, sampled from `pvec` and drew
    /// `chosen`. The caller is responsible for `Σ pvec ≤ 1`.
    pub fn record_sample(&mut self, t: u32, e: Edge, pvec: &[f64], chosen: Option<u32>) {
        assert_eq!(pvec.len(), self.delta);
        if let Some(c) = chosen {
            assert!(c >= 1 && c as usize <= self.delta);
        }
        let id = SampleId(u32::try_from(self.pvecs.len() / self.delta).expect("too many samples"));
        self.pvecs.extend_from_slice(pvec);
        self.push(e, VertexEvent { time: t, kind: EventKind::Sample { pvec: id, chosen } });
    }

    /// Records that color `color` was burned at both endpoints of `e` at time `t`.
    pub fn record_burn(&mut self, t: u32, e: Edge, color: u32) {
        assert!(color >= 1 && color as usize <= self.delta);
        self.push(e, VertexEvent { time: t, kind: EventKind::Burn { color } });
    }

    /// `P_e` after every recorded event.
    pub fn reconstruct(&self, e: Edge) -> Vec<f64> {
        self.reconstruct_at(e, u32::MAX)
    }

    /// `P^{(t)}_e`: the vector after all events with time `≤ t`.
    pub fn reconstruct_at(&self, e: Edge, t: u32) -> Vec<f64> {
        let mut out = vec![0.0; self.delta];
        self.reconstruct_into(e, t, &mut out);
        out
    }

    /// Allocation-free form of [`PTable::reconstruct_at`].
    ///
    /// Panics if an event of `e` itself (a common time at both endpoints) is
    /// within the replayed window: `P_e` is only defined before `e` arrives.
    pub fn reconstruct_into(&self, e: Edge, t: u32, out: &mut [f64]) {
        assert_eq!(out.len(), self.delta);
        out.fill(self.initial);
        let a = &self.logs[e.u().index()];
        let b = &self.logs[e.v().index()];
        let (mut i, mut j) = (0, 0);
        loop {
            let next = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if x.time < y.time => {
                    i += 1;
                    x
                }
                (Some(x), Some(y)) => {
                    assert!(x.time != y.time || x.time > t, "{e} has already arrived at t={}", x.time);
                    j += 1;
                    y
                }
                (Some(x), None) => {
                    i += 1;
                    x
                }
                (None, Some(y)) => {
                    j += 1;
                    y
                }
                (None, None) => break,
            };
            if next.time > t {
                break;
            }
            self.apply(next, out);
        }
    }

    #[inline]
    fn apply(&self, event: &VertexEvent, p: &mut [f64]) {
        match event.kind {
            EventKind::Sample { pvec, chosen } => {
                let q = self.pvec(pvec);
                let skip = chosen.map_or(usize::MAX, |c| c as usize - 1);
                for (c, (pc, &qc)) in p.iter_mut().zip(q).enumerate() {
                    if c == skip {
                        *pc = 0.0;
                    } else if *pc <= self.cap {
                        *pc /= 1.0 - qc;
                    }
                }
            }
            EventKind::Burn { color } => p[color as usize - 1] = 0.0,
        }
    }

    /// `Z_e = Σ_c P_ec` summed in ascending color order.
    pub fn z_value(&self, e: Edge) -> f64 {
        self.reconstruct(e).iter().sum()
    }

    /// Writes every event as `t,vertex,kind,color,chosen`, ordered by time and
    /// then vertex. `kind` is `sample` or `burn`; samples leave `color` empty
    /// and write `chosen` as an index or `bottom`; burns leave `chosen` empty.
    pub fn write_trace<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut rows: Vec<(u32, usize, &VertexEvent)> = self
            .logs
            .iter()
            .enumerate()
            .flat_map(|(v, log)| log.iter().map(move |ev| (ev.time, v, ev)))
            .collect();
        rows.sort_by_key(|&(t, v, _)| (t, v));
        writeln!(w, "t,vertex,kind,color,chosen")?;
        for (t, v, ev) in rows {
            match ev.kind {
                EventKind::Sample { chosen: Some(c), .. } => writeln!(w, "{t},{v},sample,,{c}")?,
                EventKind::Sample { chosen: None, .. } => writeln!(w, "{t},{v},sample,,bottom")?,
                EventKind::Burn { color } => writeln!(w, "{t},{v},burn,{color},")?,
            }
        }
        Ok(())
    }
}

/// Eager matrix of `P_fc` over every vertex pair, updated per arrival.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOracle {
    n: usize,
    delta: usize,
    cap: f64,
    p: Vec<f64>,
    arrived: Vec<bool>,
}

impl DenseOracle {
    pub fn new(n: usize, delta: usize, initial: f64, cap: f64) -> Self {
        DenseOracle {
            n,
            delta,
            cap,
            p: vec![initial; n * n * delta],
            arrived: vec![false; n * n],
        }
    }

    pub fn from_params(params: &Params) -> Self {
        Self::new(params.n as usize, params.delta as usize, params.initial_p(), params.cap)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    #[inline]
    fn slot(&self, e: Edge) -> usize {
        e.u().index() * self.n + e.v().index()
    }

    /// Current `P_e`.
    pub fn get(&self, e: Edge) -> &[f64] {
        let s = self.slot(e) * self.delta;
        &self.p[s..s + self.delta]
    }

    pub fn z(&self, e: Edge) -> f64 {
        self.get(e).iter().sum()
    }

    pub fn has_arrived(&self, e: Edge) -> bool {
        self.arrived[self.slot(e)]
    }

    /// Potential future edges that share an endpoint with `e`.
    pub fn future_neighbors(&self, e: Edge) -> Vec<Edge> {
        let mut out = Vec::new();
        for x in e.endpoints() {
            for y in 0..self.n as u32 {
                if let Some(f) = Edge::try_new(x, VertexId(y)) {
                    if f != e && !self.has_arrived(f) && !out.contains(&f) {
                        out.push(f);
                    }
                }
            }
        }
        out
    }

    /// Removes `e` from the set of future edges without touching any `P`
    /// (an arrival marked because `Z > 1`).
    pub fn mark_arrived(&mut self, e: Edge) {
        assert!(!self.has_arrived(e), "{e} arrived twice");
        let s = self.slot(e);
        self.arrived[s] = true;
    }

    /// Arrival of `e` that sampled `chosen` from its current distribution.
    /// Returns the distribution used.
    pub fn apply_sample(&mut self, e: Edge, chosen: Option<u32>) -> Vec<f64> {
        self.mark_arrived(e);
        let q = self.get(e).to_vec();
        for f in self.future_neighbors(e) {
            let s = self.slot(f) * self.delta;
            #[allow(clippy::needless_range_loop)]
            for c in 0..self.delta {
                let old = self.p[s + c];
                if chosen == Some(c as u32 + 1) {
                    self.p[s + c] = 0.0;
                } else if old <= self.cap {
                    self.p[s + c] = old / (1.0 - q[c]);
                }
            }
        }
        q
    }

    /// Arrival of `e` colored `color` at a bad vertex: burn that color for
    /// every neighboring future edge, no scaling.
    pub fn apply_burn(&mut self, e: Edge, color: u32) {
        self.mark_arrived(e);
        for f in self.future_neighbors(e) {
            let s = self.slot(f) * self.delta;
            self.p[s + color as usize - 1] = 0.0;
        }
    }

    /// All vertex pairs that have not arrived yet.
    pub fn future_edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for u in 0..self.n as u32 {
            for v in u + 1..self.n as u32 {
                let f = Edge::new(u, v);
                if !self.has_arrived(f) {
                    out.push(f);
                }
            }
        }
        out
    }
}
