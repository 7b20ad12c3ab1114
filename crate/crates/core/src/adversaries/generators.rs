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

//! Instance generators, including the lower-bound gadgets.

use std::collections::HashSet;

use rand::seq::SliceRandom;

use crate::adversaries::stream::{AdaptiveStream, Arrival, Instance, PublicHistory};
use crate::error::{Error, Result};
use crate::rng::RngHandle;
use crate::types::{Edge, VertexId};

/// Edges of one two-star gadget with centers `base` and `base + 1`: the
/// `Δ - 1` leaves of the first center, then those of the second, then the
/// bridge.
fn two_star_edges(delta: u32, base: u32) -> Vec<Edge> {
    let (u, v) = (base, base + 1);
    let mut edges = Vec::with_capacity(2 * delta as usize - 1);
    for i in 0..delta - 1 {
        edges.push(Edge::new(u, base + 2 + i));
    }
    for i in 0..delta - 1 {
        edges.push(Edge::new(v, base + 1 + delta + i));
    }
    edges.push(Edge::new(u, v));
    edges
}

/// Two stars with `Δ - 1` leaves each whose centers `0` and `1` are joined
/// by a final bridge. `2Δ` vertices, `2Δ - 1` edges.
pub fn gen_two_star_bridge(delta: u32) -> Instance {
    gen_gadget_farm(delta, 1, false)
}

/// `copies` vertex-disjoint two-star gadgets.
///
/// With `interleaved` the gadgets' edges are emitted round-robin, otherwise
/// gadget by gadget; each gadget keeps its bridge last either way.
pub fn gen_gadget_farm(delta: u32, copies: u32, interleaved: bool) -> Instance {
    assert!(delta >= 2, "two-star gadgets need delta >= 2");
    assert!(copies >= 1);
    let per = 2 * delta;
    let gadgets: Vec<Vec<Edge>> = (0..copies).map(|k| two_star_edges(delta, k * per)).collect();
    let edges: Vec<Edge> = if interleaved {
        let len = gadgets[0].len();
        (0..len).flat_map(|i| gadgets.iter().map(move |g| g[i])).collect()
    } else {
        gadgets.into_iter().flatten().collect()
    };
    Instance::new(copies * per, delta, edges)
}

/// Which gadget of a farm an edge belongs to.
pub fn gadget_of(delta: u32, e: Edge) -> u32 {
    e.u().0 / (2 * delta)
}

/// A random simple graph with `m` edges and maximum degree at most `Δ`,
/// in random arrival order.
///
/// Endpoints are drawn uniformly from the vertices that still have spare
/// degree; duplicate pairs are redrawn and a dead end restarts the build.
/// Gives up with [`Error::GenerationFailure`] after `100·m` draws.
pub fn gen_random_graph(n: u32, delta: u32, m: usize, rng: &mut RngHandle) -> Result<Instance> {
    if n < 2 && m > 0 {
        return Err(Error::GenerationFailure("need at least two vertices".into()));
    }
    if m as u64 * 2 > u64::from(n) * u64::from(delta) {
        return Err(Error::GenerationFailure(format!(
            "{m} edges cannot fit in {n} vertices of degree <= {delta}"
        )));
    }
    if m as u64 > u64::from(n) * u64::from(n - 1) / 2 {
        return Err(Error::GenerationFailure(format!("{m} edges exceed the complete graph on {n} vertices")));
    }
    let budget = (100 * m as u64).max(1000);
    let mut attempts = 0u64;
    'restart: loop {
        let mut degree = vec![0u32; n as usize];
        let mut open: Vec<u32> = (0..n).collect();
        let mut pos: Vec<usize> = (0..n as usize).collect();
        let mut seen: HashSet<Edge> = HashSet::with_capacity(m);
        let mut edges = Vec::with_capacity(m);
        let mut stuck = 0u32;
        while edges.len() < m {
            attempts += 1;
            if attempts > budget {
                return Err(Error::GenerationFailure(format!(
                    "no degree-{delta} graph with {m} edges found within {budget} draws"
                )));
            }
            if open.len() < 2 || stuck > 200 {
                continue 'restart;
            }
            let a = open[rng.below(open.len())];
            let b = open[rng.below(open.len())];
            let Some(e) = Edge::try_new(a, b) else {
                stuck += 1;
                continue;
            };
            if !seen.insert(e) {
                stuck += 1;
                continue;
            }
            stuck = 0;
            edges.push(e);
            for x in [a, b] {
                degree[x as usize] += 1;
                if degree[x as usize] == delta {
                    // swap-remove x from the open list
                    let i = pos[x as usize];
                    let last = *open.last().unwrap();
                    open.swap_remove(i);
                    if last != x {
                        pos[last as usize] = i;
                    }
                }
            }
        }
        edges.shuffle(rng);
        return Ok(Instance::new(n, delta, edges));
    }
}

/// The same arrivals in a uniformly random order.
pub fn wrap_random_order(inst: &Instance, rng: &mut RngHandle) -> Instance {
    let mut out = inst.clone();
    out.arrivals.shuffle(rng);
    out
}

/// Disjoint palettes of `size` ids for each star edge of a gadget; ids start
/// at `first_id`.
fn star_palettes(delta: u32, size: u32, first_id: u32) -> Vec<Vec<u32>> {
    (0..2 * (delta - 1))
        .map(|j| (0..size).map(|k| first_id + j * size + k).collect())
        .collect()
}

/// Adaptive list-coloring adversary.
///
/// Emits a two-star gadget whose star edges carry disjoint palettes of size
/// `2Δ - 1`; the bridge arrives last with the palette made of exactly the
/// colors its `2Δ - 2` neighbors received. No palette-respecting algorithm can
/// color that bridge.
pub fn gen_list_lb_deterministic(delta: u32) -> AdaptiveStream {
    assert!(delta >= 2);
    let edges = two_star_edges(delta, 0);
    let palettes = star_palettes(delta, 2 * delta - 1, 1);
    let bridge = *edges.last().unwrap();
    AdaptiveStream::new(2 * delta, delta, move |history: &PublicHistory| {
        let t = history.len();
        if t < palettes.len() {
            return Some(Arrival { edge: edges[t], palette: Some(palettes[t].clone()) });
        }
        if t == palettes.len() {
            let mut seen: Vec<u32> = history
                .entries()
                .iter()
                .filter(|(e, _)| e.touches(bridge))
                .filter_map(|(_, c)| c.map(|c| c.index))
                .collect();
            seen.sort_unstable();
            seen.dedup();
            return Some(Arrival { edge: bridge, palette: Some(seen) });
        }
        None
    })
}

/// Shape of the oblivious randomized list lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ListLbConfig {
    pub delta: u32,
    pub copies: u32,
    /// Palette size of every star edge (at most `2Δ - 1`).
    pub star_palette_size: u32,
}

impl ListLbConfig {
    pub fn new(delta: u32, copies: u32) -> Self {
        ListLbConfig { delta, copies, star_palette_size: 2 * delta - 1 }
    }
}

/// Oblivious randomized list lower bound: `copies` gadgets whose star edges
/// have disjoint palettes, and whose bridge palette takes one uniformly random
/// color from each of the `2Δ - 2` neighboring palettes (deduplicated and
/// sorted). Everything is fixed before the run starts.
pub fn gen_list_lb_randomized(cfg: ListLbConfig, rng: &mut RngHandle) -> Instance {
    let ListLbConfig { delta, copies, star_palette_size: size } = cfg;
    assert!(delta >= 2 && copies >= 1 && size >= 1);
    let per_gadget_ids = 2 * (delta - 1) * size;
    let mut arrivals = Vec::new();
    for k in 0..copies {
        let edges = two_star_edges(delta, k * 2 * delta);
        let palettes = star_palettes(delta, size, 1 + k * per_gadget_ids);
        let mut bridge: Vec<u32> = palettes.iter().map(|p| p[rng.below(p.len())]).collect();
        bridge.sort_unstable();
        bridge.dedup();
        for (e, p) in edges.iter().zip(palettes) {
            arrivals.push(Arrival { edge: *e, palette: Some(p) });
        }
        arrivals.push(Arrival { edge: *edges.last().unwrap(), palette: Some(bridge) });
    }
    Instance { n: copies * 2 * delta, delta, arrivals }
}

/// Vertex degrees of an edge list over `n` vertices.
pub fn degrees(n: u32, edges: &[Edge]) -> Vec<u32> {
    let mut d = vec![0; n as usize];
    for e in edges {
        for x in e.endpoints() {
            d[VertexId::index(x)] += 1;
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_star_counts() {
        let g = gen_two_star_bridge(2);
        assert_eq!(g.len(), 3);
        assert_eq!(g.n, 4);
        let g = gen_two_star_bridge(3);
        assert_eq!(g.len(), 5);
        assert_eq!(g.max_degree(), 3);
        assert_eq!(g.arrivals.last().unwrap().edge, Edge::new(0, 1));
        g.audit().unwrap();
    }

    #[test]
    fn farm_counts_and_single_copy() {
        assert_eq!(gen_gadget_farm(4, 1, false), gen_two_star_bridge(4));
        for interleaved in [false, true] {
            let f = gen_gadget_farm(3, 7, interleaved);
            assert_eq!(f.len(), 7 * 5);
            assert_eq!(f.n, 7 * 6);
            f.audit().unwrap();
        }
    }

    #[test]
    fn interleaved_keeps_bridges_last_per_gadget() {
        let f = gen_gadget_farm(3, 4, true);
        for k in 0..4 {
            let pos: Vec<usize> = f
                .arrivals
                .iter()
                .enumerate()
                .filter(|(_, a)| gadget_of(3, a.edge) == k)
                .map(|(i, _)| i)
                .collect();
            let last = *pos.last().unwrap();
            assert_eq!(f.arrivals[last].edge, Edge::new(k * 6, k * 6 + 1));
        }
    }

    #[test]
    fn random_graph_forced_k4() {
        let mut rng = RngHandle::new(3);
        let g = gen_random_graph(4, 3, 6, &mut rng).unwrap();
        let mut edges = g.edges();
        edges.sort();
        let mut k4: Vec<Edge> =
            (0..4u32).flat_map(|a| (a + 1..4).map(move |b| Edge::new(a, b))).collect();
        k4.sort();
        assert_eq!(edges, k4);
    }

    #[test]
    fn random_graph_empty_and_infeasible() {
        let mut rng = RngHandle::new(3);
        assert!(gen_random_graph(10, 3, 0, &mut rng).unwrap().is_empty());
        assert!(matches!(
            gen_random_graph(4, 1, 3, &mut rng),
            Err(Error::GenerationFailure(_))
        ));
    }

    #[test]
    fn random_graph_respects_bounds() {
        let mut rng = RngHandle::new(9);
        for (n, d, m) in [(50, 8, 150), (200, 16, 1500), (30, 29, 400)] {
            let g = gen_random_graph(n, d, m, &mut rng).unwrap();
            assert_eq!(g.len(), m);
            g.audit().unwrap();
        }
    }

    #[test]
    fn random_order_preserves_edges() {
        let mut rng = RngHandle::new(1);
        let g = gen_random_graph(30, 5, 60, &mut rng).unwrap();
        let w = wrap_random_order(&g, &mut rng);
        let (mut a, mut b) = (g.edges(), w.edges());
        a.sort();
        b.sort();
        assert_eq!(a, b);
        let one = Instance::new(2, 1, [Edge::new(0, 1)]);
        assert_eq!(wrap_random_order(&one, &mut rng), one);
    }

    #[test]
    fn randomized_list_palettes() {
        let mut rng = RngHandle::new(5);
        let inst = gen_list_lb_randomized(ListLbConfig::new(3, 2), &mut rng);
        assert_eq!(inst.len(), 10);
        inst.audit().unwrap();
        let star: Vec<&Vec<u32>> =
            inst.arrivals[..4].iter().map(|a| a.palette.as_ref().unwrap()).collect();
        for p in &star {
            assert_eq!(p.len(), 5);
        }
        let bridge = inst.arrivals[4].palette.as_ref().unwrap();
        assert!(bridge.len() <= 4);
        assert!(bridge.iter().all(|c| star.iter().any(|p| p.contains(c))));
        // second gadget uses fresh ids
        let second = inst.arrivals[5].palette.as_ref().unwrap();
        assert!(second[0] > *star[3].last().unwrap());
    }
}
