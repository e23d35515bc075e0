//! Periodic triangulations of the plane with vertex set `Z^2`.
//!
//! The only built-in lattice is the Union-Jack triangulation: the square
//! lattice plus, in every unit square, the diagonal joining its two corners
//! of even coordinate sum. Even vertices have degree 8, odd vertices degree 4,
//! and two odd vertices are never adjacent. The lattice is invariant under
//! translations by `(2, 0)`, `(0, 2)`, `(1, 1)`, under the rotation by a
//! quarter turn about the origin and under the reflection `(x, y) -> (x, -y)`.

use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub x: i32,
    pub y: i32,
}

impl Vertex {
    pub const fn new(x: i32, y: i32) -> Self {
        Vertex { x, y }
    }

    pub fn is_even(self) -> bool {
        (self.x + self.y).rem_euclid(2) == 0
    }

    /// `max(|x|, |y|)` of `self - center`.
    pub fn norm_inf_from(self, center: Vertex) -> u32 {
        (self.x - center.x)
            .unsigned_abs()
            .max((self.y - center.y).unsigned_abs())
    }

    pub fn offset(self, dx: i32, dy: i32) -> Vertex {
        Vertex::new(self.x + dx, self.y + dy)
    }
}

impl From<(i32, i32)> for Vertex {
    fn from((x, y): (i32, i32)) -> Self {
        Vertex::new(x, y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    UnionJack,
}

/// A planar triangulation described by its neighbour rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
}

// Offsets sorted so that neighbours come out in lexicographic (x, y) order.
const EVEN_OFFSETS: [(i32, i32); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];
const ODD_OFFSETS: [(i32, i32); 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];

impl Default for LatticeSpec {
    fn default() -> Self {
        Self::union_jack()
    }
}

impl LatticeSpec {
    pub const fn union_jack() -> Self {
        LatticeSpec {
            kind: LatticeKind::UnionJack,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "union-jack" | "union_jack" | "unionjack" => Ok(Self::union_jack()),
            other => Err(Error::param(format!("unknown lattice {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            LatticeKind::UnionJack => "union-jack",
        }
    }

    /// Maximal vertex degree `N`.
    pub fn degree_max(&self) -> usize {
        8
    }

    /// Number of vertices in a closed unit square, used as `n_T` in the
    /// decorrelation bounds.
    pub fn vertices_per_unit_square(&self) -> usize {
        4
    }

    /// Offsets `w - v` of the neighbours of `v`, in lexicographic order of `w`.
    #[inline]
    pub fn neighbor_offsets(&self, v: Vertex) -> &'static [(i32, i32)] {
        if v.is_even() {
            &EVEN_OFFSETS
        } else {
            &ODD_OFFSETS
        }
    }

    pub fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        self.neighbor_offsets(v)
            .iter()
            .map(|&(dx, dy)| v.offset(dx, dy))
            .collect()
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbor_offsets(v).len()
    }

    #[inline]
    pub fn adjacent(&self, v: Vertex, w: Vertex) -> bool {
        let dx = (v.x - w.x).abs();
        let dy = (v.y - w.y).abs();
        match (dx, dy) {
            (1, 0) | (0, 1) => true,
            (1, 1) => v.is_even(),
            _ => false,
        }
    }

    /// Translation vectors generating the lattice's translation symmetry group.
    pub fn periods(&self) -> [(i32, i32); 2] {
        [(1, 1), (1, -1)]
    }
}

/// Elements of the dihedral group of the square acting about the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Identity,
    Rot90,
    Rot180,
    Rot270,
    ReflectX,
    ReflectY,
    ReflectDiag,
    ReflectAntiDiag,
}

impl Symmetry {
    pub const ALL: [Symmetry; 8] = [
        Symmetry::Identity,
        Symmetry::Rot90,
        Symmetry::Rot180,
        Symmetry::Rot270,
        Symmetry::ReflectX,
        Symmetry::ReflectY,
        Symmetry::ReflectDiag,
        Symmetry::ReflectAntiDiag,
    ];

    pub fn apply(self, v: Vertex) -> Vertex {
        let (x, y) = (v.x, v.y);
        let (a, b) = match self {
            Symmetry::Identity => (x, y),
            Symmetry::Rot90 => (-y, x),
            Symmetry::Rot180 => (-x, -y),
            Symmetry::Rot270 => (y, -x),
            Symmetry::ReflectX => (x, -y),
            Symmetry::ReflectY => (-x, y),
            Symmetry::ReflectDiag => (y, x),
            Symmetry::ReflectAntiDiag => (-y, -x),
        };
        Vertex::new(a, b)
    }
}

/// Axis-aligned rectangle of vertices `[x0, x1] x [y0, y1]`.
///
/// Configurations and vertex sets are stored densely over a window; the
/// box `Λ_n = [-n, n]^2` is `Window::centered(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub x0: i32,
    pub y0: i32,
    pub x1: i32,
    pub y1: i32,
}

impl Window {
    pub fn new(x0: i32, y0: i32, x1: i32, y1: i32) -> Result<Self> {
        if x1 < x0 || y1 < y0 {
            return Err(Error::param(format!(
                "empty window [{x0},{x1}]x[{y0},{y1}]"
            )));
        }
        Ok(Window { x0, y0, x1, y1 })
    }

    pub fn centered(n: u32) -> Self {
        let n = n as i32;
        Window {
            x0: -n,
            y0: -n,
            x1: n,
            y1: n,
        }
    }

    pub fn centered_at(c: Vertex, n: u32) -> Self {
        let n = n as i32;
        Window {
            x0: c.x - n,
            y0: c.y - n,
            x1: c.x + n,
            y1: c.y + n,
        }
    }

    pub fn width(&self) -> usize {
        (self.x1 - self.x0 + 1) as usize
    }

    pub fn height(&self) -> usize {
        (self.y1 - self.y0 + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        v.x >= self.x0 && v.x <= self.x1 && v.y >= self.y0 && v.y <= self.y1
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        other.x0 >= self.x0 && other.x1 <= self.x1 && other.y0 >= self.y0 && other.y1 <= self.y1
    }

    /// Row-major index (rows of constant `y`).
    #[inline]
    pub fn index(&self, v: Vertex) -> Option<usize> {
        if self.contains(v) {
            Some(self.index_unchecked(v))
        } else {
            None
        }
    }

    #[inline]
    pub fn index_unchecked(&self, v: Vertex) -> usize {
        (v.y - self.y0) as usize * self.width() + (v.x - self.x0) as usize
    }

    #[inline]
    pub fn vertex(&self, idx: usize) -> Vertex {
        let w = self.width();
        Vertex::new(self.x0 + (idx % w) as i32, self.y0 + (idx / w) as i32)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.len()).map(move |i| self.vertex(i))
    }

    pub fn expand(&self, r: u32) -> Window {
        let r = r as i32;
        Window {
            x0: self.x0 - r,
            y0: self.y0 - r,
            x1: self.x1 + r,
            y1: self.y1 + r,
        }
    }

    pub fn hull(&self, other: &Window) -> Window {
        Window {
            x0: self.x0.min(other.x0),
            y0: self.y0.min(other.y0),
            x1: self.x1.max(other.x1),
            y1: self.y1.max(other.y1),
        }
    }

    pub fn bounding(vertices: impl IntoIterator<Item = Vertex>) -> Option<Window> {
        let mut it = vertices.into_iter();
        let first = it.next()?;
        let mut w = Window {
            x0: first.x,
            y0: first.y,
            x1: first.x,
            y1: first.y,
        };
        for v in it {
            w.x0 = w.x0.min(v.x);
            w.y0 = w.y0.min(v.y);
            w.x1 = w.x1.max(v.x);
            w.y1 = w.y1.max(v.y);
        }
        Some(w)
    }
}

/// Closed annulus `{v : r <= |v - center|_inf <= R}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annulus {
    pub center: Vertex,
    pub inner: u32,
    pub outer: u32,
}

impl Annulus {
    /// The center must be an even vertex so that both boundary squares are
    /// circuits of the triangulation.
    pub fn new(center: Vertex, inner: u32, outer: u32) -> Result<Self> {
        if inner < 1 || outer <= inner {
            return Err(Error::param(format!(
                "annulus radii must satisfy 1 <= r < R, got r={inner}, R={outer}"
            )));
        }
        if !center.is_even() {
            return Err(Error::param(format!(
                "annulus center {center:?} must have even coordinate sum"
            )));
        }
        Ok(Annulus {
            center,
            inner,
            outer,
        })
    }

    pub fn contains(&self, v: Vertex) -> bool {
        let n = v.norm_inf_from(self.center);
        n >= self.inner && n <= self.outer
    }

    pub fn window(&self) -> Window {
        Window::centered_at(self.center, self.outer)
    }
}

/// Dense set of vertices inside a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    window: Window,
    bits: Vec<bool>,
    count: usize,
}

impl VertexSet {
    pub fn empty(window: Window) -> Self {
        VertexSet {
            window,
            bits: vec![false; window.len()],
            count: 0,
        }
    }

    pub fn full(window: Window) -> Self {
        VertexSet {
            window,
            bits: vec![true; window.len()],
            count: window.len(),
        }
    }

    pub fn from_vertices(
        window: Window,
        vertices: impl IntoIterator<Item = Vertex>,
    ) -> Result<Self> {
        let mut s = Self::empty(window);
        for v in vertices {
            if !s.insert(v) && !window.contains(v) {
                return Err(Error::OutsideWindow(format!("vertex {v:?}")));
            }
        }
        Ok(s)
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        self.window.index(v).is_some_and(|i| self.bits[i])
    }

    /// Returns true if `v` was newly inserted; vertices outside the window are ignored.
    pub fn insert(&mut self, v: Vertex) -> bool {
        match self.window.index(v) {
            Some(i) if !self.bits[i] => {
                self.bits[i] = true;
                self.count += 1;
                true
            }
            _ => false,
        }
    }

    pub fn remove(&mut self, v: Vertex) -> bool {
        match self.window.index(v) {
            Some(i) if self.bits[i] => {
                self.bits[i] = false;
                self.count -= 1;
                true
            }
            _ => false,
        }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| self.window.vertex(i))
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }
}

/// Graph distance between `v` and `w` using only vertices of `region`.
pub fn graph_distance(spec: &LatticeSpec, v: Vertex, w: Vertex, region: &VertexSet) -> Option<u32> {
    if !region.contains(v) || !region.contains(w) {
        return None;
    }
    let win = *region.window();
    let mut dist = vec![u32::MAX; win.len()];
    let mut queue = VecDeque::new();
    dist[win.index_unchecked(v)] = 0;
    queue.push_back(v);
    while let Some(u) = queue.pop_front() {
        let du = dist[win.index_unchecked(u)];
        if u == w {
            return Some(du);
        }
        for &(dx, dy) in spec.neighbor_offsets(u) {
            let z = u.offset(dx, dy);
            if region.contains(z) {
                let iz = win.index_unchecked(z);
                if dist[iz] == u32::MAX {
                    dist[iz] = du + 1;
                    queue.push_back(z);
                }
            }
        }
    }
    None
}

/// Vertices of `ambient` within lattice distance `r` of `set`.
pub fn r_neighborhood(
    spec: &LatticeSpec,
    set: &VertexSet,
    r: u32,
    ambient: &VertexSet,
) -> VertexSet {
    let win = set.window().expand(r);
    let mut dist = vec![u32::MAX; win.len()];
    let mut queue = VecDeque::new();
    for v in set.iter() {
        dist[win.index_unchecked(v)] = 0;
        queue.push_back(v);
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[win.index_unchecked(u)];
        if du == r {
            continue;
        }
        for &(dx, dy) in spec.neighbor_offsets(u) {
            let z = u.offset(dx, dy);
            let iz = win.index_unchecked(z);
            if dist[iz] == u32::MAX {
                dist[iz] = du + 1;
                queue.push_back(z);
            }
        }
    }
    let mut out = VertexSet::empty(*ambient.window());
    for v in ambient.iter() {
        if win.index(v).is_some_and(|i| dist[i] != u32::MAX) {
            out.insert(v);
        }
    }
    out
}
