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

//! Bias amplification of randomized greedy on an adaptively built tree.
//!
//! The palette `[m]` is split into halves `L` and `R`. Layer 0 consists of
//! star centers whose `Δ - 1` edges were colored by randomized greedy, kept
//! only when more of `L` than of `R` remains free. Each node on layer `i + 1`
//! starts with the full palette and is joined to `Δ - 1` nodes of layer `i`,
//! one edge at a time, every edge colored uniformly from the common free
//! colors.
//!
//! The literal tree has `Δ^layers` nodes, so each layer is represented by a
//! pool of `pool_size` nodes and children are drawn with replacement from the
//! previous pool. A drawn child's free set is rotated by a random offset
//! inside `L` and inside `R`. That keeps its `ℓ`/`r` split and stops repeated
//! draws of one pool entry from sharing exactly the same free colors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngHandle;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasTreeConfig {
    pub delta: u32,
    /// `|C_alg| / Δ`. The palette size is `palette_ratio·Δ` rounded to the
    /// nearest even integer.
    pub palette_ratio: f64,
    /// Number of layers including layer 0.
    pub layers: u32,
    pub pool_size: usize,
    pub seed: u64,
    /// Draws allowed per layer-0 slot before giving up.
    pub max_attempts_per_slot: u32,
}

impl BiasTreeConfig {
    pub fn new(delta: u32, palette_ratio: f64, layers: u32, pool_size: usize, seed: u64) -> Self {
        BiasTreeConfig { delta, palette_ratio, layers, pool_size, seed, max_attempts_per_slot: 10_000 }
    }

    pub fn palette_size(&self) -> u32 {
        (2.0 * (self.palette_ratio * f64::from(self.delta) / 2.0).round()) as u32
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerStats {
    pub layer: u32,
    /// Mean of `b_v = max(ℓ_v, r_v) - 1/2` over the pool.
    pub mean_bias: f64,
    /// Mean of `ℓ_v` over the pool.
    pub mean_left: f64,
    /// Fraction of nodes with all of `L` or all of `R` used up.
    pub fraction_saturated: f64,
    /// Child edges that found no common free color.
    pub failed_edges: u64,
    /// Nodes with at least one failed child edge.
    pub failed_nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasTreeReport {
    pub config: BiasTreeConfig,
    pub palette_size: u32,
    /// Accepted layer-0 stars over all stars drawn.
    pub layer0_acceptance: f64,
    pub layers: Vec<LayerStats>,
}

impl BiasTreeReport {
    pub fn mean_biases(&self) -> Vec<f64> {
        self.layers.iter().map(|l| l.mean_bias).collect()
    }

    pub fn any_failure(&self) -> bool {
        self.layers.iter().any(|l| l.failed_edges > 0)
    }
}

/// Fixed-width bitset over palette positions `0..m`; `L` is `0..m/2`.
#[derive(Clone, Debug)]
struct Free(Vec<u64>);

impl Free {
    fn full(m: usize) -> Self {
        let mut w = vec![u64::MAX; m.div_ceil(64)];
        if !m.is_multiple_of(64) {
            *w.last_mut().unwrap() = (1u64 << (m % 64)) - 1;
        }
        Free(w)
    }

    fn empty(m: usize) -> Self {
        Free(vec![0; m.div_ceil(64)])
    }

    #[cfg(test)]
    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn count_below(&self, end: usize) -> u32 {
        let mut c = 0;
        for (k, w) in self.0.iter().enumerate() {
            let lo = k * 64;
            if lo >= end {
                break;
            }
            let w = if end - lo < 64 { w & ((1u64 << (end - lo)) - 1) } else { *w };
            c += w.count_ones();
        }
        c
    }

    fn len(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    /// A uniformly random element of `self ∩ other`.
    fn pick_common(&self, other: &Free, rng: &mut RngHandle) -> Option<usize> {
        let total: u32 = self.0.iter().zip(&other.0).map(|(a, b)| (a & b).count_ones()).sum();
        if total == 0 {
            return None;
        }
        let mut k = rng.below(total as usize) as u32;
        for (i, (a, b)) in self.0.iter().zip(&other.0).enumerate() {
            let mut w = a & b;
            let c = w.count_ones();
            if k < c {
                for _ in 0..k {
                    w &= w - 1;
                }
                return Some(i * 64 + w.trailing_zeros() as usize);
            }
            k -= c;
        }
        unreachable!()
    }

    fn rotated(&self, half: usize, rl: usize, rr: usize) -> Free {
        let mut out = Free::empty(2 * half);
        for (k, &word) in self.0.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let i = k * 64 + w.trailing_zeros() as usize;
                w &= w - 1;
                let j = if i < half { (i + rl) % half } else { half + (i - half + rr) % half };
                out.insert(j);
            }
        }
        out
    }
}

/// `(ℓ_v, b_v, saturated)` of a free set.
fn node_bias(free: &Free, half: usize) -> (f64, f64, bool) {
    let left = free.count_below(half);
    let total = free.len();
    let l = f64::from(left) / f64::from(total);
    let b = l.max(1.0 - l) - 0.5;
    (l, b, left == 0 || left == total)
}

struct Node {
    free: Free,
    failures: u32,
}

fn layer_stats(layer: u32, pool: &[Node], half: usize) -> LayerStats {
    let n = pool.len() as f64;
    let (mut sl, mut sb, mut sat, mut fe, mut fnodes) = (0.0, 0.0, 0u64, 0u64, 0u64);
    for node in pool {
        let (l, b, s) = node_bias(&node.free, half);
        sl += l;
        sb += b;
        sat += u64::from(s);
        fe += u64::from(node.failures);
        fnodes += u64::from(node.failures > 0);
    }
    LayerStats {
        layer,
        mean_bias: sb / n,
        mean_left: sl / n,
        fraction_saturated: sat as f64 / n,
        failed_edges: fe,
        failed_nodes: fnodes,
    }
}

/// Runs the pooled bias-tree simulation.
///
/// Fails with [`Error::InvalidParams`] for a palette smaller than `Δ`, no
/// layers or an empty pool, and with [`Error::PoolExhaustion`] when a layer-0
/// slot sees no accepted star within its attempt budget.
pub fn gen_bias_tree(cfg: &BiasTreeConfig) -> Result<BiasTreeReport> {
    let m = cfg.palette_size() as usize;
    let delta = cfg.delta as usize;
    if delta < 2 || m < delta {
        return Err(Error::InvalidParams(format!(
            "bias tree needs delta >= 2 and palette >= delta, got delta = {delta}, palette = {m}"
        )));
    }
    if cfg.layers == 0 || cfg.pool_size == 0 {
        return Err(Error::InvalidParams("bias tree needs layers >= 1 and pool_size >= 1".into()));
    }
    let half = m / 2;
    let root = RngHandle::new(cfg.seed);
    let slot_rng = |layer: u32, node: usize| root.substream((u64::from(layer) << 32) | node as u64);

    let star: Vec<std::result::Result<(Node, u32), u32>> = (0..cfg.pool_size)
        .into_par_iter()
        .map(|j| {
            let mut rng = slot_rng(0, j);
            let leaf = Free::full(m);
            for attempt in 1..=cfg.max_attempts_per_slot {
                let mut free = Free::full(m);
                for _ in 0..delta - 1 {
                    let c = free.pick_common(&leaf, &mut rng).expect("palette >= delta");
                    free.remove(c);
                }
                let left = free.count_below(half);
                if 2 * left > free.len() {
                    return Ok((Node { free, failures: 0 }, attempt));
                }
            }
            Err(cfg.max_attempts_per_slot)
        })
        .collect();
    let mut attempts = 0u64;
    let mut pool = Vec::with_capacity(cfg.pool_size);
    for s in star {
        match s {
            Ok((node, a)) => {
                attempts += u64::from(a);
                pool.push(node);
            }
            Err(a) => {
                return Err(Error::PoolExhaustion { attempts: attempts + u64::from(a) });
            }
        }
    }
    let mut layers = vec![layer_stats(0, &pool, half)];
    for layer in 1..cfg.layers {
        let prev = &pool;
        let next: Vec<Node> = (0..cfg.pool_size)
            .into_par_iter()
            .map(|j| {
                let mut rng = slot_rng(layer, j);
                let mut free = Free::full(m);
                let mut failures = 0;
                for _ in 0..delta - 1 {
                    let child = &prev[rng.below(prev.len())];
                    let (rl, rr) = (rng.below(half), rng.below(half));
                    let child = child.free.rotated(half, rl, rr);
                    match free.pick_common(&child, &mut rng) {
                        Some(c) => free.remove(c),
                        None => failures += 1,
                    }
                }
                Node { free, failures }
            })
            .collect();
        pool = next;
        layers.push(layer_stats(layer, &pool, half));
    }
    Ok(BiasTreeReport {
        config: *cfg,
        palette_size: m as u32,
        layer0_acceptance: cfg.pool_size as f64 / attempts as f64,
        layers,
    })
}
