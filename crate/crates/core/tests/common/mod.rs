//! Brute-force oracles written directly from the definitions. They share
//! nothing with the library beyond `Vertex` and the arcs of a quad;
//! `exhaustive` runs the two side by side.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use rswlab_core::{Quad, Vertex};

pub mod exhaustive;

/// Union-Jack adjacency: axis neighbours, plus diagonals at even vertices.
pub fn uj_adjacent(a: Vertex, b: Vertex) -> bool {
    let (dx, dy) = ((a.x - b.x).abs(), (a.y - b.y).abs());
    dx + dy == 1 || (dx == 1 && dy == 1 && (a.x + a.y).rem_euclid(2) == 0)
}

pub fn uj_neighbors(v: Vertex) -> Vec<Vertex> {
    let mut out = Vec::new();
    for dx in -1..=1 {
        for dy in -1..=1 {
            let w = Vertex::new(v.x + dx, v.y + dy);
            if w != v && uj_adjacent(v, w) {
                out.push(w);
            }
        }
    }
    out
}

pub fn oracle_strongly_simple(path: &[Vertex]) -> bool {
    for i in 0..path.len() {
        for j in i + 1..path.len() {
            let adj = uj_adjacent(path[i], path[j]);
            if path[i] == path[j] || adj != (j == i + 1) {
                return false;
            }
        }
    }
    true
}

/// A quad as plain data, with the interior found by flood fill from outside.
pub struct OracleQuad {
    pub arcs: [Vec<Vertex>; 4],
    pub boundary: HashSet<Vertex>,
    /// Sorted by `(y, x)`; bit `j` of a configuration mask is the sign of `interior[j]`.
    pub interior: Vec<Vertex>,
}

impl OracleQuad {
    pub fn from_arcs(arcs: [Vec<Vertex>; 4]) -> Self {
        let boundary: HashSet<Vertex> = arcs.iter().flatten().copied().collect();
        let x0 = boundary.iter().map(|v| v.x).min().unwrap() - 1;
        let x1 = boundary.iter().map(|v| v.x).max().unwrap() + 1;
        let y0 = boundary.iter().map(|v| v.y).min().unwrap() - 1;
        let y1 = boundary.iter().map(|v| v.y).max().unwrap() + 1;
        let in_frame = |v: Vertex| v.x >= x0 && v.x <= x1 && v.y >= y0 && v.y <= y1;
        let start = Vertex::new(x0, y0);
        let mut outside = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for w in uj_neighbors(u) {
                if in_frame(w) && !boundary.contains(&w) && outside.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        let mut interior = Vec::new();
        for y in y0..=y1 {
            for x in x0..=x1 {
                let v = Vertex::new(x, y);
                if !boundary.contains(&v) && !outside.contains(&v) {
                    interior.push(v);
                }
            }
        }
        OracleQuad {
            arcs,
            boundary,
            interior,
        }
    }

    pub fn of(q: &Quad) -> Self {
        Self::from_arcs(q.arcs().clone())
    }

    pub fn dual(&self) -> Self {
        let [g, g1, gp, g2] = self.arcs.clone();
        Self::from_arcs([g1, gp, g2, g])
    }

    pub fn bit(&self, v: Vertex) -> usize {
        self.interior.iter().position(|&w| w == v).expect("interior vertex")
    }

    pub fn mask_of(&self, vs: impl IntoIterator<Item = Vertex>) -> u32 {
        vs.into_iter().fold(0, |m, v| m | 1 << self.bit(v))
    }

    fn touches(&self, v: Vertex, arc: usize) -> bool {
        self.arcs[arc].iter().any(|&w| uj_adjacent(v, w))
    }

    fn touches_boundary(&self, v: Vertex) -> bool {
        (0..4).any(|a| self.touches(v, a))
    }

    fn is_end(&self, v: Vertex, arc: usize) -> bool {
        self.touches(v, arc) && !self.touches(v, 1) && !self.touches(v, 3)
    }

    /// Every crossing, listed from its `γ` end: a strongly simple path of
    /// interior vertices from a neighbour of `γ` to a neighbour of `γ′`,
    /// ends not adjacent to `γ₁ ∪ γ₂`, inner vertices not adjacent to `∂Q`.
    pub fn crossings(&self) -> Vec<Vec<Vertex>> {
        let interior: HashSet<Vertex> = self.interior.iter().copied().collect();
        let mut out = Vec::new();
        let mut path = Vec::new();
        for &s in &self.interior {
            if self.is_end(s, 0) {
                path.push(s);
                self.grow(&interior, &mut path, &mut out);
                path.pop();
            }
        }
        out
    }

    fn grow(&self, interior: &HashSet<Vertex>, path: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        let last = *path.last().unwrap();
        if self.is_end(last, 2) {
            out.push(path.clone());
        }
        if path.len() > 1 && self.touches_boundary(last) {
            return;
        }
        for w in uj_neighbors(last) {
            if interior.contains(&w) && !path.contains(&w) {
                path.push(w);
                if oracle_strongly_simple(path) {
                    self.grow(interior, path, out);
                }
                path.pop();
            }
        }
    }

    /// Components of `Q° \ c`.
    pub fn components_without(&self, c: &[Vertex]) -> Vec<BTreeSet<Vertex>> {
        let mut left: BTreeSet<Vertex> = self.interior.iter().copied().filter(|v| !c.contains(v)).collect();
        let mut comps = Vec::new();
        while let Some(s) = left.pop_first() {
            let mut comp = BTreeSet::from([s]);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for w in uj_neighbors(u) {
                    if left.remove(&w) {
                        comp.insert(w);
                        queue.push_back(w);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    /// `V_c`: `c` plus every component of `Q° \ c` adjacent to `γ₁`.
    pub fn region_below(&self, c: &[Vertex]) -> BTreeSet<Vertex> {
        let mut v: BTreeSet<Vertex> = c.iter().copied().collect();
        for comp in self.components_without(c) {
            if comp.iter().any(|&u| self.touches(u, 1)) {
                v.extend(comp);
            }
        }
        v
    }
}

/// Exact Bernoulli(p) probability that a configuration mask over `k` bits
/// contains one of `paths` (each a mask of required positive vertices).
pub fn exact_probability(k: usize, paths: &[u32], p: f64) -> f64 {
    let mut total = 0.0;
    for m in 0u32..1 << k {
        if paths.iter().any(|&c| c & m == c) {
            let ones = m.count_ones() as i32;
            total += p.powi(ones) * (1.0 - p).powi(k as i32 - ones);
        }
    }
    total
}
