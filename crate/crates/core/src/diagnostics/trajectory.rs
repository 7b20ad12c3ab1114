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

//! Replayed per-edge quantities: `Z`, the capless `Z̄`, the martingale part
//! `Y`, bad colors and matching sums.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::algorithms::{RunResult, StepRecord};
use crate::error::{Error, Result};
use crate::ptable::{EventKind, PTable};
use crate::types::Edge;

/// How an arrival next to a tracked edge `f` relates to bad vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeClass {
    /// Neither endpoint bad on arrival.
    Good,
    /// A bad endpoint that is not shared with `f`.
    Bad,
    /// The endpoint shared with `f` is bad.
    Rest,
}

/// Class of the arrival `rec` relative to the tracked edge `f`.
pub fn classify(f: Edge, rec: &StepRecord) -> EdgeClass {
    let e = rec.edge;
    let shared_bad = e
        .endpoints()
        .iter()
        .zip(rec.bad_endpoints)
        .any(|(&x, bad)| bad && f.contains(x));
    if shared_bad {
        EdgeClass::Rest
    } else if rec.bad_branch() {
        EdgeClass::Bad
    } else {
        EdgeClass::Good
    }
}

/// Values after one arrival next to the tracked edge; `t = 0` is the start.
///
/// The `_c` fields restrict every sum to the tracked color subset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: u32,
    pub arrival: Option<Edge>,
    pub class: EdgeClass,
    pub z: f64,
    pub zbar: f64,
    pub y: f64,
    /// `Σ (Z̄ - Z)` over good steps so far.
    pub cap_gap: f64,
    /// `Σ ΔZ` over non-good steps so far.
    pub other: f64,
    pub bad_colors: usize,
    pub z_c: f64,
    pub zbar_c: f64,
    pub y_c: f64,
    pub cap_gap_c: f64,
    pub other_c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub edge: Edge,
    /// Tracked subset, 1-based color indices.
    pub colors: Vec<u32>,
    pub initial_z: f64,
    pub initial_z_c: f64,
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    /// Largest `|Z - (Z_0 + Y - cap_gap + other)|` over all points, for the
    /// full palette and the tracked subset.
    pub fn max_decomposition_residual(&self) -> f64 {
        self.points
            .iter()
            .map(|p| {
                let full = (p.z - (self.initial_z + p.y - p.cap_gap + p.other)).abs();
                let sub = (p.z_c - (self.initial_z_c + p.y_c - p.cap_gap_c + p.other_c)).abs();
                full.max(sub)
            })
            .fold(0.0, f64::max)
    }
}

fn table(run: &RunResult, f: Edge) -> Result<&PTable> {
    run.ptable.as_ref().ok_or(Error::TraceMissing(f))
}

/// Last time at which `P_f` is defined: one before `f` arrives, or the end of
/// the run.
pub fn last_defined_time(run: &RunResult, f: Edge) -> u32 {
    run.arrival_time(f).map_or(run.trace.len() as u32, |t| t - 1)
}

/// `P̄^{(t)}_f`: the arrival at `t` applied with every scale-up allowed.
fn pbar(table: &PTable, rec: &StepRecord, f: Edge, before: &[f64], after: &[f64]) -> Vec<f64> {
    let shared = rec.edge.endpoints().into_iter().find(|&x| f.contains(x)).expect("incident");
    match table.event_at(shared, rec.t).map(|ev| ev.kind) {
        Some(EventKind::Sample { pvec, chosen }) => {
            let q = table.pvec(pvec);
            before
                .iter()
                .zip(q)
                .enumerate()
                .map(|(c, (&p, &qc))| if chosen == Some(c as u32 + 1) { 0.0 } else { p / (1.0 - qc) })
                .collect()
        }
        _ => after.to_vec(),
    }
}

/// Replays `Z`, `Z̄` and `Y` for the potential edge `f` at every arrival
/// incident to it, up to its own arrival. `colors` selects the subset for the
/// restricted sums (all colors when `None`).
///
/// Needs a run made with the event table retained.
pub fn compute_trajectory(run: &RunResult, f: Edge, colors: Option<&[u32]>) -> Result<Trajectory> {
    let table = table(run, f)?;
    let delta = table.delta();
    let colors: Vec<u32> = colors.map_or_else(|| (1..=delta as u32).collect(), <[u32]>::to_vec);
    let sub = |p: &[f64]| colors.iter().map(|&c| p[c as usize - 1]).sum::<f64>();
    let end = last_defined_time(run, f);
    let mut prev = table.reconstruct_at(f, 0);
    let initial_z: f64 = prev.iter().sum();
    let initial_z_c = sub(&prev);
    let count_bad = |p: &[f64]| p.iter().filter(|&&x| x > table.cap()).count();
    let mut points = vec![TrajectoryPoint {
        t: 0,
        arrival: None,
        class: EdgeClass::Good,
        z: initial_z,
        zbar: initial_z,
        y: 0.0,
        cap_gap: 0.0,
        other: 0.0,
        bad_colors: count_bad(&prev),
        z_c: initial_z_c,
        zbar_c: initial_z_c,
        y_c: 0.0,
        cap_gap_c: 0.0,
        other_c: 0.0,
    }];
    for rec in run.trace.iter().take(end as usize) {
        if rec.edge == f || !rec.edge.touches(f) {
            continue;
        }
        let cur = table.reconstruct_at(f, rec.t);
        let bar = pbar(table, rec, f, &prev, &cur);
        let last = points.last().unwrap();
        let (z_prev, z_prev_c) = (last.z, last.z_c);
        let (z, z_c): (f64, f64) = (cur.iter().sum(), sub(&cur));
        let (zbar, zbar_c): (f64, f64) = (bar.iter().sum(), sub(&bar));
        let class = classify(f, rec);
        let mut p = TrajectoryPoint {
            t: rec.t,
            arrival: Some(rec.edge),
            class,
            z,
            zbar,
            bad_colors: count_bad(&cur),
            z_c,
            zbar_c,
            ..last.clone()
        };
        if class == EdgeClass::Good {
            p.y += zbar - z_prev;
            p.cap_gap += zbar - z;
            p.y_c += zbar_c - z_prev_c;
            p.cap_gap_c += zbar_c - z_c;
        } else {
            p.other += z - z_prev;
            p.other_c += z_c - z_prev_c;
        }
        points.push(p);
        prev = cur;
    }
    Ok(Trajectory { edge: f, colors, initial_z, initial_z_c, points })
}

/// `B^{(t)}_f = {c : P^{(t)}_fc > A}`.
///
/// Panics if `f` arrived at or before `t`.
pub fn bad_colors(run: &RunResult, f: Edge, t: u32) -> Result<Vec<u32>> {
    let table = table(run, f)?;
    let p = table.reconstruct_at(f, t);
    Ok((1..=p.len() as u32).filter(|&c| p[c as usize - 1] > table.cap()).collect())
}

/// `K^{(t)}_{MC} = Σ_{e∈M} Σ_{c∈C} P^{(t)}_ec` for a matching `M`.
pub fn matching_sum(run: &RunResult, matching: &[Edge], colors: &[u32], t: u32) -> Result<f64> {
    for (i, a) in matching.iter().enumerate() {
        if matching[i + 1..].iter().any(|b| a.touches(*b)) {
            return Err(Error::InvalidParams(format!("{a} shares a vertex with another edge of M")));
        }
    }
    let mut total = 0.0;
    for &e in matching {
        let table = table(run, e)?;
        let p = table.reconstruct_at(e, t);
        total += colors.iter().map(|&c| p[c as usize - 1]).sum::<f64>();
    }
    Ok(total)
}

/// Writes trajectories as CSV with columns `t,edge_u,edge_v,Z,Y,Zbar,bad_colors`,
/// where `edge_u, edge_v` name the tracked edge.
pub fn write_trajectory_csv<W: Write>(mut w: W, trajectories: &[Trajectory]) -> io::Result<()> {
    writeln!(w, "t,edge_u,edge_v,Z,Y,Zbar,bad_colors")?;
    for tr in trajectories {
        for p in &tr.points {
            writeln!(
                w,
                "{},{},{},{:?},{:?},{:?},{}",
                p.t,
                tr.edge.u(),
                tr.edge.v(),
                p.z,
                p.y,
                p.zbar,
                p.bad_colors
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::{gen_random_graph, Instance};
    use crate::algorithms::{run_alg1, run_greedy, DiagnosticsHooks};
    use crate::params::Params;
    use crate::rng::RngHandle;

    fn path_run(seed: u64, cap: f64) -> RunResult {
        let params = Params::explicit(4, 2, 0.5, cap).unwrap();
        let inst = Instance::new(4, 2, [Edge::new(0, 1), Edge::new(1, 2)]);
        run_alg1(inst, &params, &mut RngHandle::new(seed), Some(&DiagnosticsHooks::retain()))
            .unwrap()
    }

    #[test]
    fn starts_at_one_minus_eps() {
        let r = path_run(0, 1.0);
        let tr = compute_trajectory(&r, Edge::new(2, 3), None).unwrap();
        assert_eq!(tr.points[0].z, 0.5);
        assert_eq!(tr.points[0].y, 0.0);
        // {2,3} only sees the second arrival
        assert_eq!(tr.points.len(), 2);
    }

    #[test]
    fn no_cap_means_zbar_equals_z() {
        for seed in 0..10 {
            let r = path_run(seed, 10.0);
            let tr = compute_trajectory(&r, Edge::new(1, 3), None).unwrap();
            for p in &tr.points {
                assert!((p.zbar - p.z).abs() < 1e-15);
            }
            assert!(tr.max_decomposition_residual() < 1e-12);
        }
    }

    #[test]
    fn decomposition_on_random_run() {
        let params = Params::explicit(60, 6, 0.3, 0.2).unwrap();
        let mut rng = RngHandle::new(5);
        let g = gen_random_graph(60, 6, 150, &mut rng).unwrap();
        let r = run_alg1(g, &params, &mut rng, Some(&DiagnosticsHooks::retain())).unwrap();
        let edges = r.edges();
        for &f in edges.iter().step_by(7) {
            let tr = compute_trajectory(&r, f, Some(&[1, 3])).unwrap();
            assert!(tr.max_decomposition_residual() < 1e-12);
            assert!(tr.points.iter().all(|p| p.zbar >= p.z - 1e-15));
        }
    }

    #[test]
    fn missing_table_is_reported() {
        let r = run_greedy(Instance::new(2, 1, [Edge::new(0, 1)])).unwrap();
        assert_eq!(compute_trajectory(&r, Edge::new(0, 1), None), Err(Error::TraceMissing(Edge::new(0, 1))));
    }

    #[test]
    fn bad_colors_and_matching_sums() {
        let r = path_run(3, 1.0);
        assert!(bad_colors(&r, Edge::new(2, 3), 0).unwrap().is_empty());
        let m = [Edge::new(0, 2), Edge::new(1, 3)];
        assert_eq!(matching_sum(&r, &[], &[1, 2], 0).unwrap(), 0.0);
        assert!((matching_sum(&r, &m, &[1, 2], 0).unwrap() - 1.0).abs() < 1e-15);
        assert!(matching_sum(&r, &[Edge::new(0, 2), Edge::new(2, 3)], &[1], 0).is_err());
        let zero_cap = {
            let params = Params::explicit(4, 2, 0.5, 1e-9).unwrap();
            let inst = Instance::new(4, 2, [Edge::new(0, 1)]);
            run_alg1(inst, &params, &mut RngHandle::new(0), Some(&DiagnosticsHooks::retain()))
                .unwrap()
        };
        assert_eq!(bad_colors(&zero_cap, Edge::new(2, 3), 0).unwrap(), vec![1, 2]);
    }
}
