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

//! Exact enumeration of every random branch of a run on a small instance.
//!
//! The sampling algorithms are replayed on a [`DenseOracle`], branching on
//! each `K_t` with positive probability. Randomized greedy and list greedy
//! branch on their uniform choices. At every tree node the conditional
//! expectations of the per-edge quantities are computed exactly from the
//! children, which turns the martingale statements into checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::adversaries::Instance;
use crate::algorithms::BadnessState;
use crate::coloring::ColoringState;
use crate::error::{Error, Result};
use crate::params::Params;
use crate::ptable::DenseOracle;
use crate::types::{ColorRef, Edge, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnumAlgorithm {
    Alg1,
    Alg2,
    RandGreedy { palette_size: u32 },
    ListGreedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumOptions {
    /// Maximum number of tree nodes visited.
    pub budget: u64,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { budget: 1_000_000 }
    }
}

/// Exact results of an enumeration.
///
/// The `max_*` fields are extrema over every tree node and every future
/// vertex pair `f` next to the arriving edge (and for `Q` every instance edge,
/// endpoint and color). They stay at zero for the greedy colorers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumReport {
    pub nodes: u64,
    pub leaves: u64,
    pub total_probability: f64,
    pub failure_probability: f64,
    /// Probability that some arrival is marked.
    pub marked_probability: f64,
    pub expected_marked: f64,
    /// Per arrival, the probability that it is marked.
    pub edge_marked_probability: Vec<f64>,
    /// Final assignments (one `alg:i`, `greedy:i` or `fail` per arrival,
    /// joined by spaces) with their probabilities.
    pub outcomes: BTreeMap<String, f64>,
    /// Largest `E[Z^{(t+1)}_f - Z^{(t)}_f | history]`.
    pub max_z_drift: f64,
    /// Largest `|E[Y^{(t+1)}_f - Y^{(t)}_f | history]|`.
    pub max_abs_y_drift: f64,
    /// Largest `|Z^{(t+1)}_f - Z^{(t)}_f|` in any branch.
    pub max_abs_z_step: f64,
    /// Largest `|Z_f - (Z_0 + Y_f - Σ(Z̄ - Z) + Σ non-good ΔZ)|`.
    pub max_decomposition_residual: f64,
    /// Largest `E[Q^{(t+1)}_{U_w c} - Q^{(t)}_{U_w c} | history]`.
    pub max_q_drift: f64,
    /// Largest `|Q^{(t+1)}_{U_w c} - Q^{(t)}_{U_w c}|` in any branch.
    pub max_abs_q_step: f64,
    /// Number of `(node, f)` drift checks made.
    pub drift_checks: u64,
}

#[derive(Clone)]
struct Node {
    oracle: Option<DenseOracle>,
    state: ColoringState,
    bad: BadnessState,
    /// `P^{(t_f - 1)}_f` of every arrival so far.
    arrival_p: Vec<Vec<f64>>,
    y: Vec<f64>,
    gap: Vec<f64>,
    other: Vec<f64>,
    colors: Vec<Option<ColorRef>>,
    marked: Vec<bool>,
    failed: bool,
}

#[derive(Clone, Copy, Debug)]
enum Action {
    Sample(Option<u32>),
    Burn(u32),
    MarkZ,
    MarkBad,
    Color(u32),
    Fail,
}

struct Enumerator<'a> {
    inst: &'a Instance,
    params: Option<Params>,
    algorithm: EnumAlgorithm,
    budget: u64,
    n: usize,
    report: EnumReport,
}

fn slot(n: usize, f: Edge) -> usize {
    f.u().index() * n + f.v().index()
}

impl Enumerator<'_> {
    fn is_sampling(&self) -> bool {
        matches!(self.algorithm, EnumAlgorithm::Alg1 | EnumAlgorithm::Alg2)
    }

    fn initial_z(&self) -> f64 {
        self.params.map_or(0.0, |p| 1.0 - p.eps)
    }

    fn branches(&self, node: &Node, i: usize) -> Vec<(f64, Action)> {
        let a = &self.inst.arrivals[i];
        let e = a.edge;
        match self.algorithm {
            EnumAlgorithm::Alg1 | EnumAlgorithm::Alg2 => {
                let params = self.params.as_ref().unwrap();
                let p = node.oracle.as_ref().unwrap().get(e);
                let z: f64 = p.iter().sum();
                let (u, v) = (e.u().index(), e.v().index());
                let oblivious = self.algorithm == EnumAlgorithm::Alg2;
                if oblivious && (node.bad.is_bad(u, params) || node.bad.is_bad(v, params)) {
                    let dangerous =
                        node.bad.is_dangerous(u, params) || node.bad.is_dangerous(v, params);
                    return match p.iter().position(|&x| x > 0.0) {
                        Some(c) if !dangerous => vec![(1.0, Action::Burn(c as u32 + 1))],
                        _ => vec![(1.0, Action::MarkBad)],
                    };
                }
                if z > 1.0 {
                    return vec![(1.0, Action::MarkZ)];
                }
                let mut out: Vec<(f64, Action)> = p
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x > 0.0)
                    .map(|(c, &x)| (x, Action::Sample(Some(c as u32 + 1))))
                    .collect();
                if 1.0 - z > 0.0 {
                    out.push((1.0 - z, Action::Sample(None)));
                }
                out
            }
            EnumAlgorithm::RandGreedy { .. } => {
                let (count, _) = node.state.shared_free_alg(e, None);
                if count == 0 {
                    return vec![(1.0, Action::Fail)];
                }
                (0..count)
                    .map(|k| {
                        let c = node.state.shared_free_alg(e, Some(k)).1.unwrap();
                        (1.0 / count as f64, Action::Color(c))
                    })
                    .collect()
            }
            EnumAlgorithm::ListGreedy => {
                let palette = a.palette.as_deref().unwrap_or(&[]);
                let ok: Vec<u32> = palette
                    .iter()
                    .copied()
                    .filter(|&c| c > 0 && node.state.is_free_for(e, ColorRef::alg(c)))
                    .collect();
                if ok.is_empty() {
                    return vec![(1.0, Action::Fail)];
                }
                let w = 1.0 / ok.len() as f64;
                ok.into_iter().map(|c| (w, Action::Color(c))).collect()
            }
        }
    }

    fn apply(&self, node: &Node, i: usize, action: Action) -> Node {
        let mut child = node.clone();
        let e = self.inst.arrivals[i].edge;
        let (u, v) = (e.u().index(), e.v().index());
        let bad_flags = self.params.as_ref().map(|p| [node.bad.is_bad(u, p), node.bad.is_bad(v, p)]);
        if let Some(oracle) = child.oracle.as_mut() {
            let nbrs = oracle.future_neighbors(e);
            let before: Vec<Vec<f64>> = nbrs.iter().map(|&f| oracle.get(f).to_vec()).collect();
            let pe = oracle.get(e).to_vec();
            match action {
                Action::Sample(k) => {
                    oracle.apply_sample(e, k);
                }
                Action::Burn(c) => oracle.apply_burn(e, c),
                _ => oracle.mark_arrived(e),
            }
            let good = bad_flags.is_none_or(|b| !b[0] && !b[1]);
            for (f, old) in nbrs.iter().zip(&before) {
                let new = oracle.get(*f);
                let (z_old, z_new): (f64, f64) = (old.iter().sum(), new.iter().sum());
                let zbar: f64 = match action {
                    Action::Sample(k) => old
                        .iter()
                        .zip(&pe)
                        .enumerate()
                        .map(|(c, (&p, &q))| if k == Some(c as u32 + 1) { 0.0 } else { p / (1.0 - q) })
                        .sum(),
                    _ => z_new,
                };
                let s = slot(self.n, *f);
                let shared_bad = bad_flags.is_some_and(|b| {
                    e.endpoints().iter().zip(b).any(|(&x, bad)| bad && f.contains(x))
                });
                if good && !shared_bad {
                    child.y[s] += zbar - z_old;
                    child.gap[s] += zbar - z_new;
                } else {
                    child.other[s] += z_new - z_old;
                }
            }
            child.arrival_p.push(pe);
        }
        let color = match action {
            Action::Sample(Some(c)) | Action::Burn(c) | Action::Color(c) => {
                child.state.record(e, ColorRef::alg(c));
                Some(ColorRef::alg(c))
            }
            Action::Sample(None) | Action::MarkZ | Action::MarkBad => {
                child.marked.push(true);
                Some(child.state.greedy_assign(e))
            }
            Action::Fail => {
                child.failed = true;
                None
            }
        };
        if child.marked.len() < i + 1 {
            child.marked.push(false);
        }
        child.colors.push(color);
        if let (EnumAlgorithm::Alg2, Some(b)) = (self.algorithm, bad_flags) {
            if matches!(action, Action::Sample(None) | Action::MarkZ) {
                child.bad.badness[u] += 1;
                child.bad.badness[v] += 1;
            }
            if b[1] {
                child.bad.baddeg[u] += 1;
            }
            if b[0] {
                child.bad.baddeg[v] += 1;
            }
        }
        child
    }

    /// `Q^{(t)}_{U_w c}` per color at a node where `t` arrivals happened, for
    /// the instance edge at index `target` and its endpoint `w`.
    fn q_values(&self, node: &Node, t: usize, target: usize, w: VertexId) -> Vec<f64> {
        let oracle = node.oracle.as_ref().unwrap();
        let delta = oracle.delta();
        let e = self.inst.arrivals[target].edge;
        let u_w: Vec<usize> = (0..target)
            .filter(|&j| {
                let f = self.inst.arrivals[j].edge;
                f != e && f.contains(w)
            })
            .collect();
        let mut q = vec![0.0; delta];
        for &j in &u_w {
            // R^{(min(t, t_f - 1))}_f with t_f = j + 1
            let horizon = t.min(j);
            let p: &[f64] = if j < t { &node.arrival_p[j] } else { oracle.get(self.inst.arrivals[j].edge) };
            for c in 0..delta {
                let mut prod = 1.0;
                for &g in &u_w {
                    if g < horizon {
                        prod *= 1.0 - node.arrival_p[g][c];
                    }
                }
                q[c] += p[c] * prod;
            }
        }
        q
    }

    fn visit(&mut self, node: &Node, i: usize, prob: f64) -> Result<()> {
        self.report.nodes += 1;
        if self.report.nodes > self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget });
        }
        if i == self.inst.arrivals.len() || node.failed {
            self.leaf(node, prob);
            return Ok(());
        }
        let branches = self.branches(node, i);
        let children: Vec<(f64, Node)> =
            branches.into_iter().map(|(p, a)| (p, self.apply(node, i, a))).collect();
        if self.is_sampling() {
            self.check(node, i, &children);
        }
        for (p, child) in &children {
            self.visit(child, i + 1, prob * p)?;
        }
        Ok(())
    }

    fn check(&mut self, node: &Node, i: usize, children: &[(f64, Node)]) {
        let params = self.params.unwrap();
        let oracle = node.oracle.as_ref().unwrap();
        let e = self.inst.arrivals[i].edge;
        let z0 = self.initial_z();
        for f in oracle.future_neighbors(e) {
            let s = slot(self.n, f);
            let z = oracle.z(f);
            let (mut ez, mut ey) = (0.0, 0.0);
            for (p, child) in children {
                let co = child.oracle.as_ref().unwrap();
                let zc = co.z(f);
                ez += p * (zc - z);
                ey += p * (child.y[s] - node.y[s]);
                let step = (zc - z).abs();
                if params.cap <= 0.25 {
                    self.report.max_abs_z_step = self.report.max_abs_z_step.max(step);
                }
                let residual = (zc - (z0 + child.y[s] - child.gap[s] + child.other[s])).abs();
                self.report.max_decomposition_residual =
                    self.report.max_decomposition_residual.max(residual);
            }
            self.report.max_z_drift = self.report.max_z_drift.max(ez);
            self.report.max_abs_y_drift = self.report.max_abs_y_drift.max(ey.abs());
            self.report.drift_checks += 1;
        }
        // Q_{U_w c} for every later instance edge whose pre-arrival window
        // still contains t + 1.
        for target in i + 1..self.inst.arrivals.len() {
            let te = self.inst.arrivals[target].edge;
            for w in te.endpoints() {
                let q = self.q_values(node, i, target, w);
                let mut eq = vec![0.0; q.len()];
                for (p, child) in children {
                    let qc = self.q_values(child, i + 1, target, w);
                    for c in 0..q.len() {
                        eq[c] += p * (qc[c] - q[c]);
                        if params.cap <= 0.25 {
                            self.report.max_abs_q_step =
                                self.report.max_abs_q_step.max((qc[c] - q[c]).abs());
                        }
                    }
                }
                for d in eq {
                    self.report.max_q_drift = self.report.max_q_drift.max(d);
                }
            }
        }
    }

    fn leaf(&mut self, node: &Node, prob: f64) {
        let r = &mut self.report;
        r.leaves += 1;
        r.total_probability += prob;
        if node.failed {
            r.failure_probability += prob;
        }
        let marks = node.marked.iter().filter(|&&m| m).count();
        if marks > 0 {
            r.marked_probability += prob;
        }
        r.expected_marked += prob * marks as f64;
        for (j, &m) in node.marked.iter().enumerate() {
            if m {
                r.edge_marked_probability[j] += prob;
            }
        }
        let key = node
            .colors
            .iter()
            .map(|c| c.map_or("fail".to_string(), |c| c.to_string()))
            .collect::<Vec<_>>()
            .join(" ");
        *r.outcomes.entry(key).or_insert(0.0) += prob;
    }
}

/// Enumerates every branch of `algorithm` on `inst`.
///
/// `params` is required for the sampling algorithms and ignored otherwise.
/// Fails with [`Error::BudgetExceeded`] when the tree has more nodes than
/// `opts.budget`.
pub fn enumerate_exact(
    inst: &Instance,
    params: Option<&Params>,
    algorithm: EnumAlgorithm,
    opts: EnumOptions,
) -> Result<EnumReport> {
    inst.audit()?;
    let n = inst.n as usize;
    let sampling = matches!(algorithm, EnumAlgorithm::Alg1 | EnumAlgorithm::Alg2);
    let params = if sampling {
        let p = *params.ok_or_else(|| Error::InvalidParams("sampling algorithms need params".into()))?;
        if inst.delta > p.delta {
            return Err(Error::InvalidParams("instance degree bound exceeds params delta".into()));
        }
        Some(p)
    } else {
        None
    };
    let palette = match algorithm {
        EnumAlgorithm::RandGreedy { palette_size: 0 } => {
            return Err(Error::InvalidParams("palette_size must be at least 1".into()));
        }
        EnumAlgorithm::RandGreedy { palette_size } => palette_size,
        EnumAlgorithm::ListGreedy => inst
            .arrivals
            .iter()
            .flat_map(|a| a.palette.iter().flatten().copied())
            .max()
            .unwrap_or(0),
        _ => params.map_or(0, |p| p.delta),
    };
    let root = Node {
        oracle: params.map(|p| DenseOracle::new(n, p.delta as usize, p.initial_p(), p.cap)),
        state: ColoringState::new(n, palette),
        bad: BadnessState::new(n),
        arrival_p: Vec::new(),
        y: vec![0.0; n * n],
        gap: vec![0.0; n * n],
        other: vec![0.0; n * n],
        colors: Vec::new(),
        marked: Vec::new(),
        failed: false,
    };
    let mut en = Enumerator {
        inst,
        params,
        algorithm,
        budget: opts.budget,
        n,
        report: EnumReport {
            nodes: 0,
            leaves: 0,
            total_probability: 0.0,
            failure_probability: 0.0,
            marked_probability: 0.0,
            expected_marked: 0.0,
            edge_marked_probability: vec![0.0; inst.arrivals.len()],
            outcomes: BTreeMap::new(),
            max_z_drift: f64::NEG_INFINITY,
            max_abs_y_drift: 0.0,
            max_abs_z_step: 0.0,
            max_decomposition_residual: 0.0,
            max_q_drift: f64::NEG_INFINITY,
            max_abs_q_step: 0.0,
            drift_checks: 0,
        },
    };
    en.visit(&root, 0, 1.0)?;
    let mut report = en.report;
    if !report.max_z_drift.is_finite() {
        report.max_z_drift = 0.0;
    }
    if !report.max_q_drift.is_finite() {
        report.max_q_drift = 0.0;
    }
    Ok(report)
}
