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

//! Partial edge colorings, the proper-coloring validator and first-fit greedy.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::types::{ColorRef, Edge, Palette, VertexId};

/// Growable per-vertex bitset over 1-based color indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
struct ColorBits(Vec<u64>);

impl ColorBits {
    #[inline]
    fn contains(&self, index: u32) -> bool {
        let i = (index - 1) as usize;
        self.0.get(i / 64).is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    #[inline]
    fn insert(&mut self, index: u32) {
        let i = (index - 1) as usize;
        if self.0.len() <= i / 64 {
            self.0.resize(i / 64 + 1, 0);
        }
        self.0[i / 64] |= 1 << (i % 64);
    }

    /// Word `k` of the set, zero past the end.
    #[inline]
    fn word(&self, k: usize) -> u64 {
        self.0.get(k).copied().unwrap_or(0)
    }
}

/// Serializes the assignment as a list of `(edge, color)` pairs.
mod pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serializer};

    use crate::types::{ColorRef, Edge};

    pub fn serialize<S: Serializer>(m: &BTreeMap<Edge, ColorRef>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Edge, ColorRef>, D::Error> {
        Ok(Vec::<(Edge, ColorRef)>::deserialize(d)?.into_iter().collect())
    }
}

/// An online coloring in progress.
///
/// Holds the assignment of arrived edges plus, per vertex, the colors already
/// used in each palette. `alg_palette_size` bounds the `Alg` palette (Δ for the
/// sampling algorithms, the shared palette size for randomized greedy, the
/// largest color id for list instances, 0 for plain greedy).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringState {
    n: usize,
    alg_palette_size: u32,
    #[serde(with = "pairs")]
    assignment: BTreeMap<Edge, ColorRef>,
    used_alg: Vec<ColorBits>,
    used_greedy: Vec<ColorBits>,
    greedy_palette_size: u32,
}

impl ColoringState {
    pub fn new(n: usize, alg_palette_size: u32) -> Self {
        ColoringState {
            n,
            alg_palette_size,
            assignment: BTreeMap::new(),
            used_alg: vec![ColorBits::default(); n],
            used_greedy: vec![ColorBits::default(); n],
            greedy_palette_size: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alg_palette_size(&self) -> u32 {
        self.alg_palette_size
    }

    /// Widens the `Alg` palette, for list instances whose ids are only known
    /// as palettes arrive.
    pub(crate) fn grow_alg_palette(&mut self, size: u32) {
        self.alg_palette_size = self.alg_palette_size.max(size);
    }

    pub fn greedy_palette_size(&self) -> u32 {
        self.greedy_palette_size
    }

    /// `|C_alg| + |C_greedy|`.
    pub fn total_colors(&self) -> u32 {
        self.alg_palette_size + self.greedy_palette_size
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn color_of(&self, e: Edge) -> Option<ColorRef> {
        self.assignment.get(&e).copied()
    }

    pub fn assignments(&self) -> impl Iterator<Item = (Edge, ColorRef)> + '_ {
        self.assignment.iter().map(|(e, c)| (*e, *c))
    }

    /// Whether `color` is unused at `v`.
    #[inline]
    pub fn is_free(&self, v: VertexId, color: ColorRef) -> bool {
        match color.palette {
            Palette::Alg => !self.used_alg[v.index()].contains(color.index),
            Palette::Greedy => !self.used_greedy[v.index()].contains(color.index),
        }
    }

    /// Whether `color` is unused at both endpoints of `e`.
    #[inline]
    pub fn is_free_for(&self, e: Edge, color: ColorRef) -> bool {
        self.is_free(e.u(), color) && self.is_free(e.v(), color)
    }

    /// Records `e ↦ color` without checking for conflicts.
    ///
    /// Greedy indices beyond the current palette size extend it. The validator
    /// is the place where conflicts are detected.
    pub fn record(&mut self, e: Edge, color: ColorRef) {
        let prev = self.assignment.insert(e, color);
        debug_assert!(prev.is_none(), "edge {e} assigned twice");
        for x in e.endpoints() {
            match color.palette {
                Palette::Alg => self.used_alg[x.index()].insert(color.index),
                Palette::Greedy => self.used_greedy[x.index()].insert(color.index),
            }
        }
        if color.palette == Palette::Greedy {
            self.greedy_palette_size = self.greedy_palette_size.max(color.index);
        }
    }

    /// Colors `e` with the smallest greedy index free at both endpoints,
    /// opening a fresh greedy color when every existing one is blocked.
    pub fn greedy_assign(&mut self, e: Edge) -> ColorRef {
        debug_assert!(!self.assignment.contains_key(&e));
        let (a, b) = (&self.used_greedy[e.u().index()], &self.used_greedy[e.v().index()]);
        let words = (self.greedy_palette_size as usize).div_ceil(64) + 1;
        let mut index = 0;
        for k in 0..words {
            let free = !(a.word(k) | b.word(k));
            if free != 0 {
                index = (k * 64) as u32 + free.trailing_zeros() + 1;
                break;
            }
        }
        debug_assert!(index >= 1 && index <= self.greedy_palette_size + 1);
        let color = ColorRef::greedy(index);
        self.record(e, color);
        color
    }

    /// Number of `Alg` colors still free at both endpoints of `e`, and the
    /// `k`-th such color (0-based) when `k` is given.
    pub(crate) fn shared_free_alg(&self, e: Edge, k: Option<usize>) -> (usize, Option<u32>) {
        let (a, b) = (&self.used_alg[e.u().index()], &self.used_alg[e.v().index()]);
        let m = self.alg_palette_size as usize;
        let mut count = 0usize;
        let mut found = None;
        for w in 0..m.div_ceil(64) {
            let mut free = !(a.word(w) | b.word(w));
            let bits_here = (m - w * 64).min(64);
            if bits_here < 64 {
                free &= (1u64 << bits_here) - 1;
            }
            let c = free.count_ones() as usize;
            if let Some(target) = k {
                if found.is_none() && target < count + c {
                    let mut f = free;
                    for _ in 0..(target - count) {
                        f &= f - 1;
                    }
                    found = Some((w * 64) as u32 + f.trailing_zeros() + 1);
                }
            }
            count += c;
        }
        (count, found)
    }
}

/// Two edges sharing `vertex` that carry the same `color`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conflict {
    pub vertex: VertexId,
    pub color: ColorRef,
    pub first: Edge,
    pub second: Edge,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub conflicts: Vec<Conflict>,
    pub unassigned: Vec<Edge>,
    /// Assigned `Alg` colors whose index exceeds the palette size.
    pub out_of_palette: Vec<(Edge, ColorRef)>,
}

impl ValidationReport {
    /// True iff the coloring of the listed edges is proper and complete.
    pub fn is_empty(&self) -> bool {
        self.conflicts.is_empty() && self.unassigned.is_empty() && self.out_of_palette.is_empty()
    }
}

/// Checks that every edge in `edges` is colored and that no two of them that
/// share a vertex carry the same color. All defects are reported; nothing
/// here fails.
pub fn validate_coloring(edges: &[Edge], state: &ColoringState) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut seen: HashMap<(VertexId, ColorRef), Edge> = HashMap::with_capacity(edges.len() * 2);
    for &e in edges {
        let Some(color) = state.color_of(e) else {
            report.unassigned.push(e);
            continue;
        };
        if color.index == 0
            || (color.palette == Palette::Alg && color.index > state.alg_palette_size)
        {
            report.out_of_palette.push((e, color));
        }
        for x in e.endpoints() {
            if let Some(&first) = seen.get(&(x, color)) {
                report.conflicts.push(Conflict { vertex: x, color, first, second: e });
            } else {
                seen.insert((x, color), e);
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(a: u32, b: u32) -> Edge {
        Edge::new(a, b)
    }

    #[test]
    fn triangle_with_three_colors_is_proper() {
        let mut s = ColoringState::new(3, 3);
        let edges = [e(0, 1), e(1, 2), e(0, 2)];
        for (i, &x) in edges.iter().enumerate() {
            s.record(x, ColorRef::alg(i as u32 + 1));
        }
        assert!(validate_coloring(&edges, &s).is_empty());
    }

    #[test]
    fn path_with_repeated_color_conflicts_at_middle() {
        let mut s = ColoringState::new(3, 3);
        let edges = [e(0, 1), e(1, 2)];
        s.record(edges[0], ColorRef::alg(1));
        s.record(edges[1], ColorRef::alg(1));
        let r = validate_coloring(&edges, &s);
        assert_eq!(r.conflicts.len(), 1);
        assert_eq!(r.conflicts[0].vertex, VertexId(1));
        assert!(r.unassigned.is_empty());
    }

    #[test]
    fn missing_and_out_of_range_are_reported() {
        let mut s = ColoringState::new(4, 2);
        s.record(e(0, 1), ColorRef::alg(3));
        let r = validate_coloring(&[e(0, 1), e(2, 3)], &s);
        assert_eq!(r.unassigned, vec![e(2, 3)]);
        assert_eq!(r.out_of_palette.len(), 1);
        assert!(!r.is_empty());
    }

    #[test]
    fn greedy_first_fit() {
        let mut s = ColoringState::new(10, 0);
        assert_eq!(s.greedy_assign(e(0, 1)), ColorRef::greedy(1));
        assert_eq!(s.greedy_assign(e(0, 2)), ColorRef::greedy(2));
        // leaf 3 is fresh, center 0 blocks 1 and 2
        assert_eq!(s.greedy_assign(e(0, 3)), ColorRef::greedy(3));
        assert_eq!(s.greedy_palette_size(), 3);
        // disjoint edge reuses color 1
        assert_eq!(s.greedy_assign(e(4, 5)), ColorRef::greedy(1));
        assert_eq!(s.greedy_palette_size(), 3);
    }

    #[test]
    fn greedy_extends_past_word_boundary() {
        let mut s = ColoringState::new(200, 0);
        for i in 1..=70u32 {
            assert_eq!(s.greedy_assign(e(0, i)), ColorRef::greedy(i));
        }
        assert_eq!(s.greedy_palette_size(), 70);
    }

    #[test]
    fn two_star_bridge_stays_within_bound() {
        // Δ = 3, the v side arranged so its star edges take greedy 2 and 3
        let mut s = ColoringState::new(6, 0);
        s.greedy_assign(e(0, 2));
        s.greedy_assign(e(0, 3));
        s.greedy_assign(e(4, 5));
        s.greedy_assign(e(1, 4));
        s.greedy_assign(e(1, 5));
        let c = s.greedy_assign(e(0, 1));
        assert!(c.index <= 5);
    }

    #[test]
    fn shared_free_alg_counts_and_selects() {
        let mut s = ColoringState::new(3, 70);
        s.record(e(0, 2), ColorRef::alg(1));
        s.record(e(1, 2), ColorRef::alg(65));
        let (count, third) = s.shared_free_alg(e(0, 1), Some(2));
        assert_eq!(count, 68);
        assert_eq!(third, Some(4));
        let (_, last) = s.shared_free_alg(e(0, 1), Some(67));
        assert_eq!(last, Some(70));
    }
}
