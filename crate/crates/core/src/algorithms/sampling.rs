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

//! The two probability-table algorithms.
//!
//! Both keep `P_ec` for every future edge and color. An arriving edge with
//! `Z = Σ_c P_ec ≤ 1` samples `K` from `(P_e1, …, P_eΔ, 1 - Z)`; neighbors
//! then lose color `K` and have every other color scaled by `1 / (1 - P_ec)`
//! unless already above the cap. Edges that are not colored this way are
//! marked and colored first-fit from the backup palette.
//!
//! The oblivious variant additionally counts marks per vertex. Once a vertex
//! is bad its new edges skip sampling: they take the lowest color with
//! positive `P` and burn it for the neighbors, or are marked when no such
//! color exists or an endpoint is dangerous.

use crate::adversaries::ArrivalStream;
use crate::algorithms::{BadnessState, DiagnosticsHooks, Driver, RunResult, StepOutcome, StepRecord};
use crate::coloring::ColoringState;
use crate::error::{Error, Result};
use crate::params::Params;
use crate::ptable::PTable;
use crate::rng::RngHandle;
use crate::types::ColorRef;

/// Inverse-CDF draw from `(pvec[0], …, pvec[Δ-1], 1 - Σ pvec)` with the
/// uniform `u ∈ [0, 1)`. Colors are scanned in index order with `⊥` last;
/// `None` is `⊥`.
#[inline]
pub fn sample_k(pvec: &[f64], u: f64) -> Option<u32> {
    let mut acc = 0.0;
    for (c, &p) in pvec.iter().enumerate() {
        acc += p;
        if u < acc {
            return Some(c as u32 + 1);
        }
    }
    None
}

/// Algorithm for adaptive adversaries.
pub fn run_alg1(
    stream: impl Into<ArrivalStream>,
    params: &Params,
    rng: &mut RngHandle,
    diag: Option<&DiagnosticsHooks>,
) -> Result<RunResult> {
    run(stream.into(), params, rng, diag, false)
}

/// Algorithm for oblivious adversaries, with bad and dangerous vertices.
pub fn run_alg2(
    stream: impl Into<ArrivalStream>,
    params: &Params,
    rng: &mut RngHandle,
    diag: Option<&DiagnosticsHooks>,
) -> Result<RunResult> {
    run(stream.into(), params, rng, diag, true)
}

fn run(
    stream: ArrivalStream,
    params: &Params,
    rng: &mut RngHandle,
    diag: Option<&DiagnosticsHooks>,
    oblivious: bool,
) -> Result<RunResult> {
    if stream.delta() > params.delta {
        return Err(Error::InvalidParams(format!(
            "stream degree bound {} exceeds params delta {}",
            stream.delta(),
            params.delta
        )));
    }
    if !(params.eps > 0.0 && params.eps < 1.0 && params.cap > 0.0) {
        return Err(Error::InvalidParams(format!(
            "eps = {} and cap = {} are not usable",
            params.eps, params.cap
        )));
    }
    let delta = params.delta as usize;
    let mut driver = Driver::new(stream);
    let n = driver.n();
    let mut table = PTable::with_values(n, delta, params.initial_p(), params.cap);
    let mut state = ColoringState::new(n, params.delta);
    let mut bad = BadnessState::new(n);
    let mut p = vec![0.0; delta];
    driver.run(false, |t, a| {
        let e = a.edge;
        let (u, v) = (e.u().index(), e.v().index());
        table.reconstruct_into(e, u32::MAX, &mut p);
        let z: f64 = p.iter().sum();
        let bad_endpoints = if oblivious {
            [bad.is_bad(u, params), bad.is_bad(v, params)]
        } else {
            [false; 2]
        };
        let (outcome, color) = if bad_endpoints[0] || bad_endpoints[1] {
            let dangerous = bad.is_dangerous(u, params) || bad.is_dangerous(v, params);
            match p.iter().position(|&x| x > 0.0) {
                Some(i) if !dangerous => {
                    let c = i as u32 + 1;
                    debug_assert!(state.is_free_for(e, ColorRef::alg(c)));
                    table.record_burn(t, e, c);
                    state.record(e, ColorRef::alg(c));
                    (StepOutcome::BadColored, ColorRef::alg(c))
                }
                _ => (StepOutcome::MarkedBad, state.greedy_assign(e)),
            }
        } else if z > 1.0 {
            (StepOutcome::MarkedZ, state.greedy_assign(e))
        } else {
            let k = sample_k(&p, rng.uniform());
            table.record_sample(t, e, &p, k);
            match k {
                Some(c) => {
                    debug_assert!(state.is_free_for(e, ColorRef::alg(c)));
                    state.record(e, ColorRef::alg(c));
                    (StepOutcome::Colored, ColorRef::alg(c))
                }
                None => (StepOutcome::MarkedBottom, state.greedy_assign(e)),
            }
        };
        if oblivious {
            if matches!(outcome, StepOutcome::MarkedZ | StepOutcome::MarkedBottom) {
                bad.badness[u] += 1;
                bad.badness[v] += 1;
            }
            if bad_endpoints[1] {
                bad.baddeg[u] += 1;
            }
            if bad_endpoints[0] {
                bad.baddeg[v] += 1;
            }
        }
        StepRecord { t, edge: e, z: Some(z), outcome, color: Some(color), bad_endpoints }
    })?;
    let ptable = diag.filter(|d| d.retain_ptable).map(|_| table);
    Ok(driver.finish(state, Some(*params), oblivious.then_some(bad), ptable))
}
