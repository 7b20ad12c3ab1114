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

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::algorithms::BadnessState;
use crate::coloring::ColoringState;
use crate::params::Params;
use crate::types::Edge;

/// Summary of one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub edges: usize,
    pub alg_palette_size: u32,
    pub greedy_palette_size: u32,
    /// `|C_alg| + |C_greedy|`.
    pub total_colors: u32,
    pub marked_count: usize,
    /// `M_v`: marked edges at each vertex.
    pub marked_per_vertex: Vec<u32>,
    pub max_marked_degree: u32,
    pub badness_final: Vec<u32>,
    pub baddeg_final: Vec<u32>,
    pub bad_vertex_count: usize,
    pub dangerous_vertex_count: usize,
    pub failures: usize,
}

impl Metrics {
    pub fn compute(
        state: &ColoringState,
        marked: &BTreeSet<Edge>,
        badness: Option<(&BadnessState, &Params)>,
        failures: usize,
        edges: usize,
    ) -> Metrics {
        let mut marked_per_vertex = vec![0u32; state.n()];
        for e in marked {
            for x in e.endpoints() {
                marked_per_vertex[x.index()] += 1;
            }
        }
        let max_marked_degree = marked_per_vertex.iter().copied().max().unwrap_or(0);
        let (badness_final, baddeg_final, bad_vertex_count, dangerous_vertex_count) = match badness {
            Some((b, p)) => (
                b.badness.clone(),
                b.baddeg.clone(),
                (0..state.n()).filter(|&v| b.is_bad(v, p)).count(),
                (0..state.n()).filter(|&v| b.is_dangerous(v, p)).count(),
            ),
            None => (Vec::new(), Vec::new(), 0, 0),
        };
        Metrics {
            edges,
            alg_palette_size: state.alg_palette_size(),
            greedy_palette_size: state.greedy_palette_size(),
            total_colors: state.total_colors(),
            marked_count: marked.len(),
            marked_per_vertex,
            max_marked_degree,
            badness_final,
            baddeg_final,
            bad_vertex_count,
            dangerous_vertex_count,
            failures,
        }
    }
}
