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

//! Scaling factors `S`, `R` and `Q` of an edge over its realized neighborhood.

use serde::{Deserialize, Serialize};

use crate::algorithms::RunResult;
use crate::diagnostics::trajectory::last_defined_time;
use crate::error::{Error, Result};
use crate::types::{Edge, VertexId};

/// An earlier edge `f` at one endpoint of the tracked edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborFactors {
    pub edge: Edge,
    pub arrival: u32,
    /// `P^{(t_f - 1)}_f`.
    pub p_before: Vec<f64>,
    /// `R^{(t_f - 1)}_f`.
    pub r: Vec<f64>,
}

/// The factors contributed by `U_w` for one endpoint `w`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideFactors {
    pub vertex: VertexId,
    pub neighbors: Vec<NeighborFactors>,
    /// `Q^{(t_e - 1)}_{U_w c}` per color.
    pub q: Vec<f64>,
    /// `∏_{f∈U_w} (1 - P^{(t_f - 1)}_fc)` per color.
    pub product: Vec<f64>,
}

impl SideFactors {
    /// `Q_{U_w C} = Σ_{c∈C} Q_{U_w c}`.
    pub fn q_subset(&self, colors: &[u32]) -> f64 {
        colors.iter().map(|&c| self.q[c as usize - 1]).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFactors {
    pub edge: Edge,
    /// Arrival time of the edge, or one past the end for an edge that never
    /// arrived.
    pub arrival: u32,
    /// `S^{(t_e - 1)}_ec` per color.
    pub s: Vec<f64>,
    pub sides: [SideFactors; 2],
    /// Largest `|S - (1 - Q_u)(1 - Q_v)|` over colors.
    pub identity_error: f64,
    /// Largest `P^{(t)}_ec · S^{(t)}_ec / P^{(0)}_ec - 1` over colors and
    /// pre-arrival steps. Non-positive when `P ≤ P^{(0)} / S` holds.
    pub bound_excess: f64,
    /// Largest `R_fc - P_fc` over neighbors and colors.
    pub r_excess: f64,
}

/// Computes `S`, `R` and `Q` for `e` from the realized run.
///
/// `U_w` is every edge at `w` that arrived before `e`. Needs a run made with
/// the event table retained.
pub fn compute_scaling_factors(run: &RunResult, e: Edge) -> Result<ScalingFactors> {
    let table = run.ptable.as_ref().ok_or(Error::TraceMissing(e))?;
    let delta = table.delta();
    let t_e = last_defined_time(run, e) + 1;
    let mut sides = Vec::with_capacity(2);
    let mut r_excess = f64::NEG_INFINITY;
    for w in e.endpoints() {
        let mut product = vec![1.0; delta];
        let mut q = vec![0.0; delta];
        let mut neighbors = Vec::new();
        for rec in run.trace.iter().take(t_e as usize - 1) {
            let f = rec.edge;
            if f == e || !f.contains(w) {
                continue;
            }
            let p_before = table.reconstruct_at(f, rec.t - 1);
            let r: Vec<f64> = p_before.iter().zip(&product).map(|(p, s)| p * s).collect();
            for c in 0..delta {
                q[c] += r[c];
                product[c] *= 1.0 - p_before[c];
                r_excess = r_excess.max(r[c] - p_before[c]);
            }
            neighbors.push(NeighborFactors { edge: f, arrival: rec.t, p_before, r });
        }
        sides.push(SideFactors { vertex: w, neighbors, q, product });
    }
    let sides: [SideFactors; 2] = sides.try_into().unwrap();
    let s: Vec<f64> = (0..delta).map(|c| sides[0].product[c] * sides[1].product[c]).collect();
    let identity_error = (0..delta)
        .map(|c| (s[c] - (1.0 - sides[0].q[c]) * (1.0 - sides[1].q[c])).abs())
        .fold(0.0, f64::max);

    // P_e and S_e only move at the arrivals of U_e, so checking there and at
    // t = 0 covers every t < t_e.
    let mut arrivals: Vec<(u32, &Vec<f64>)> = sides
        .iter()
        .flat_map(|side| side.neighbors.iter().map(|nb| (nb.arrival, &nb.p_before)))
        .collect();
    arrivals.sort_by_key(|a| a.0);
    let initial = table.initial();
    let mut running = vec![1.0; delta];
    let mut bound_excess = f64::NEG_INFINITY;
    let mut check = |t: u32, running: &[f64]| {
        let p = table.reconstruct_at(e, t);
        for c in 0..delta {
            bound_excess = bound_excess.max(p[c] * running[c] / initial - 1.0);
        }
    };
    check(0, &running);
    for (t, p_before) in arrivals {
        for c in 0..delta {
            running[c] *= 1.0 - p_before[c];
        }
        check(t, &running);
    }
    Ok(ScalingFactors {
        edge: e,
        arrival: t_e,
        s,
        sides,
        identity_error,
        bound_excess,
        r_excess: if r_excess.is_finite() { r_excess } else { 0.0 },
    })
}
