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

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{ColorRef, Edge};

/// One online arrival: an edge, plus its palette for list instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrival {
    pub edge: Edge,
    pub palette: Option<Vec<u32>>,
}

impl Arrival {
    pub fn plain(edge: Edge) -> Self {
        Arrival { edge, palette: None }
    }
}

impl From<Edge> for Arrival {
    fn from(edge: Edge) -> Self {
        Arrival::plain(edge)
    }
}

/// A fixed graph with a fixed arrival order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub n: u32,
    pub delta: u32,
    pub arrivals: Vec<Arrival>,
}

impl Instance {
    pub fn new(n: u32, delta: u32, edges: impl IntoIterator<Item = Edge>) -> Self {
        Instance { n, delta, arrivals: edges.into_iter().map(Arrival::plain).collect() }
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.arrivals.iter().map(|a| a.edge).collect()
    }

    pub fn len(&self) -> usize {
        self.arrivals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrivals.is_empty()
    }

    /// Largest degree actually present.
    pub fn max_degree(&self) -> u32 {
        let mut deg = vec![0u32; self.n as usize];
        for a in &self.arrivals {
            for x in a.edge.endpoints() {
                deg[x.index()] += 1;
            }
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// Checks simplicity, vertex range and the degree bound.
    pub fn audit(&self) -> Result<()> {
        let mut auditor = StreamAuditor::new(self.n, self.delta);
        self.arrivals.iter().try_for_each(|a| auditor.admit(a.edge))
    }
}

/// Everything an adaptive adversary may look at: the arrived edges and the
/// colors they received (`None` for an edge the algorithm failed on).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicHistory {
    entries: Vec<(Edge, Option<ColorRef>)>,
}

impl PublicHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, e: Edge, color: Option<ColorRef>) {
        self.entries.push((e, color));
    }

    pub fn entries(&self) -> &[(Edge, Option<ColorRef>)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

type Generator = Box<dyn FnMut(&PublicHistory) -> Option<Arrival> + Send>;

/// A history-observing edge source.
pub struct AdaptiveStream {
    pub n: u32,
    pub delta: u32,
    generator: Generator,
}

impl AdaptiveStream {
    pub fn new(
        n: u32,
        delta: u32,
        generator: impl FnMut(&PublicHistory) -> Option<Arrival> + Send + 'static,
    ) -> Self {
        AdaptiveStream { n, delta, generator: Box::new(generator) }
    }
}

impl fmt::Debug for AdaptiveStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AdaptiveStream")
            .field("n", &self.n)
            .field("delta", &self.delta)
            .finish_non_exhaustive()
    }
}

/// Source of online edges.
#[derive(Debug)]
pub enum ArrivalStream {
    Oblivious(Instance),
    Adaptive(AdaptiveStream),
}

impl ArrivalStream {
    pub fn n(&self) -> u32 {
        match self {
            ArrivalStream::Oblivious(i) => i.n,
            ArrivalStream::Adaptive(a) => a.n,
        }
    }

    pub fn delta(&self) -> u32 {
        match self {
            ArrivalStream::Oblivious(i) => i.delta,
            ArrivalStream::Adaptive(a) => a.delta,
        }
    }

    pub fn into_cursor(self) -> StreamCursor {
        StreamCursor { auditor: StreamAuditor::new(self.n(), self.delta()), stream: self, next: 0 }
    }
}

impl From<Instance> for ArrivalStream {
    fn from(i: Instance) -> Self {
        ArrivalStream::Oblivious(i)
    }
}

impl From<AdaptiveStream> for ArrivalStream {
    fn from(a: AdaptiveStream) -> Self {
        ArrivalStream::Adaptive(a)
    }
}

/// Rejects arrivals that would make the graph non-simple or exceed `Δ`.
#[derive(Clone, Debug)]
pub struct StreamAuditor {
    n: u32,
    delta: u32,
    degree: Vec<u32>,
    seen: HashSet<Edge>,
}

impl StreamAuditor {
    pub fn new(n: u32, delta: u32) -> Self {
        StreamAuditor { n, delta, degree: vec![0; n as usize], seen: HashSet::new() }
    }

    pub fn admit(&mut self, e: Edge) -> Result<()> {
        let index = self.seen.len();
        let violation = |reason: String| Err(Error::StreamViolation { index, reason });
        if e.v().0 >= self.n {
            return violation(format!("{e} has a vertex outside [0, {})", self.n));
        }
        if self.seen.contains(&e) {
            return violation(format!("{e} arrived twice"));
        }
        for x in e.endpoints() {
            if self.degree[x.index()] >= self.delta {
                return violation(format!("vertex {x} would exceed degree {}", self.delta));
            }
        }
        for x in e.endpoints() {
            self.degree[x.index()] += 1;
        }
        self.seen.insert(e);
        Ok(())
    }
}

/// Pulls audited arrivals from a stream.
#[derive(Debug)]
pub struct StreamCursor {
    stream: ArrivalStream,
    auditor: StreamAuditor,
    next: usize,
}

impl StreamCursor {
    pub fn n(&self) -> u32 {
        self.stream.n()
    }

    pub fn delta(&self) -> u32 {
        self.stream.delta()
    }

    pub fn next_arrival(&mut self, history: &PublicHistory) -> Result<Option<Arrival>> {
        let arrival = match &mut self.stream {
            ArrivalStream::Oblivious(inst) => inst.arrivals.get(self.next).cloned(),
            ArrivalStream::Adaptive(a) => (a.generator)(history),
        };
        if let Some(a) = &arrival {
            self.auditor.admit(a.edge)?;
            self.next += 1;
        }
        Ok(arrival)
    }
}
