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

//! Basic graph and color vocabulary shared by every module.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Dense vertex index in `[0, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An undirected edge stored canonically with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    u: VertexId,
    v: VertexId,
}

impl Edge {
    /// Builds the canonical edge between `a` and `b`.
    ///
    /// Panics on self loops; use [`Edge::try_new`] for untrusted input.
    pub fn new(a: impl Into<VertexId>, b: impl Into<VertexId>) -> Edge {
        Edge::try_new(a, b).expect("self loops are not edges")
    }

    pub fn try_new(a: impl Into<VertexId>, b: impl Into<VertexId>) -> Option<Edge> {
        let (a, b) = (a.into(), b.into());
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Edge { u: a, v: b }),
            std::cmp::Ordering::Greater => Some(Edge { u: b, v: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    #[inline]
    pub fn u(self) -> VertexId {
        self.u
    }

    #[inline]
    pub fn v(self) -> VertexId {
        self.v
    }

    #[inline]
    pub fn endpoints(self) -> [VertexId; 2] {
        [self.u, self.v]
    }

    #[inline]
    pub fn contains(self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }

    /// True when the two edges share at least one endpoint.
    #[inline]
    pub fn touches(self, other: Edge) -> bool {
        self.contains(other.u) || self.contains(other.v)
    }

    /// The endpoint that is not `x`. Panics if `x` is not an endpoint.
    pub fn other(self, x: VertexId) -> VertexId {
        if self.u == x {
            self.v
        } else if self.v == x {
            self.u
        } else {
            panic!("{x} is not an endpoint of {self}")
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.u, self.v)
    }
}

/// Which palette a color belongs to.
///
/// `Alg` is the main palette `[1, Δ]` of the sampling algorithms (and the
/// shared palette of randomized greedy / the id space of list instances);
/// `Greedy` is the first-fit backup palette used for marked edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Palette {
    Alg,
    Greedy,
}

/// A color: palette plus 1-based index inside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ColorRef {
    pub palette: Palette,
    pub index: u32,
}

impl ColorRef {
    pub fn alg(index: u32) -> ColorRef {
        debug_assert!(index >= 1);
        ColorRef { palette: Palette::Alg, index }
    }

    pub fn greedy(index: u32) -> ColorRef {
        debug_assert!(index >= 1);
        ColorRef { palette: Palette::Greedy, index }
    }
}

impl fmt::Display for ColorRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.palette {
            Palette::Alg => write!(f, "alg:{}", self.index),
            Palette::Greedy => write!(f, "greedy:{}", self.index),
        }
    }
}
