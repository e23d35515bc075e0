use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::path::is_strongly_simple_circuit;
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, Symmetry, Vertex, VertexSet, Window};

/// The four boundary arcs of a quad, in circuit order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arc {
    Gamma,
    Gamma1,
    GammaPrime,
    Gamma2,
}

impl Arc {
    pub const ALL: [Arc; 4] = [Arc::Gamma, Arc::Gamma1, Arc::GammaPrime, Arc::Gamma2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn bit(self) -> u8 {
        1 << self.index()
    }
}

const OUTSIDE: u8 = 0;
const INTERIOR: u8 = 1;
const BOUNDARY: u8 = 2; // BOUNDARY + arc index

/// A quad `(Q°, γ, γ₁, γ′, γ₂)`.
///
/// Built from four arcs whose concatenation is a strongly simple circuit;
/// the interior `Q°` is the bounded component of its complement.
#[derive(Clone, Debug)]
pub struct Quad {
    spec: LatticeSpec,
    arcs: [Vec<Vertex>; 4],
    window: Window,
    role: Vec<u8>,
    adj: Vec<u8>,
    interior_len: usize,
}

impl PartialEq for Quad {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.arcs == other.arcs
    }
}

impl Quad {
    pub fn new(spec: LatticeSpec, arcs: [Vec<Vertex>; 4]) -> Result<Self> {
        if arcs.iter().any(Vec::is_empty) {
            return Err(Error::InvalidQuad("all four arcs must be nonempty".into()));
        }
        let circuit: Vec<Vertex> = arcs.iter().flatten().copied().collect();
        if !is_strongly_simple_circuit(&spec, &circuit) {
            return Err(Error::InvalidQuad(format!(
                "boundary is not a strongly simple circuit (starts at {:?})",
                circuit[0]
            )));
        }
        let window = Window::bounding(circuit.iter().copied()).expect("nonempty circuit");
        let mut role = vec![OUTSIDE; window.len()];
        for (k, arc) in arcs.iter().enumerate() {
            for &v in arc {
                role[window.index_unchecked(v)] = BOUNDARY + k as u8;
            }
        }

        // Flood the exterior from the window border; what is left is the interior.
        let mut exterior = vec![false; window.len()];
        let mut queue = VecDeque::new();
        for v in window.vertices() {
            let on_border =
                v.x == window.x0 || v.x == window.x1 || v.y == window.y0 || v.y == window.y1;
            let i = window.index_unchecked(v);
            if on_border && role[i] == OUTSIDE {
                exterior[i] = true;
                queue.push_back(v);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &(dx, dy) in spec.neighbor_offsets(u) {
                let w = u.offset(dx, dy);
                if let Some(i) = window.index(w) {
                    if !exterior[i] && role[i] == OUTSIDE {
                        exterior[i] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        let mut interior_len = 0;
        let mut first_interior = None;
        for i in 0..window.len() {
            if role[i] == OUTSIDE && !exterior[i] {
                role[i] = INTERIOR;
                interior_len += 1;
                first_interior.get_or_insert(i);
            }
        }
        let Some(start) = first_interior else {
            return Err(Error::InvalidQuad("empty interior".into()));
        };
        // The interior must be connected.
        let mut seen = vec![false; window.len()];
        seen[start] = true;
        let mut queue = VecDeque::from([window.vertex(start)]);
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &(dx, dy) in spec.neighbor_offsets(u) {
                let w = u.offset(dx, dy);
                let i = window.index_unchecked(w);
                if role[i] == INTERIOR && !seen[i] {
                    seen[i] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        if reached != interior_len {
            return Err(Error::InvalidQuad("interior is disconnected".into()));
        }

        let mut adj = vec![0u8; window.len()];
        for v in window.vertices() {
            let mut bits = 0u8;
            for &(dx, dy) in spec.neighbor_offsets(v) {
                if let Some(i) = window.index(v.offset(dx, dy)) {
                    if role[i] >= BOUNDARY {
                        bits |= 1 << (role[i] - BOUNDARY);
                    }
                }
            }
            adj[window.index_unchecked(v)] = bits;
        }
        Ok(Quad {
            spec,
            arcs,
            window,
            role,
            adj,
            interior_len,
        })
    }

    /// `[x0, x0 + a] x [y0, y0 + b]` with `γ` the left side (corners
    /// included), `γ₁` the bottom, `γ′` the right side and `γ₂` the top.
    /// Crossings run left to right.
    pub fn rect_at(spec: LatticeSpec, origin: Vertex, a: u32, b: u32) -> Result<Self> {
        if a < 2 || b < 2 {
            return Err(Error::InvalidQuad(format!("rectangle {a}x{b} is too thin")));
        }
        let (a, b) = (a as i32, b as i32);
        let (x0, y0) = (origin.x, origin.y);
        let gamma = (0..=b).rev().map(|j| Vertex::new(x0, y0 + j)).collect();
        let gamma1 = (1..a).map(|i| Vertex::new(x0 + i, y0)).collect();
        let gamma_prime = (0..=b).map(|j| Vertex::new(x0 + a, y0 + j)).collect();
        let gamma2 = (1..a).rev().map(|i| Vertex::new(x0 + i, y0 + b)).collect();
        Quad::new(spec, [gamma, gamma1, gamma_prime, gamma2])
    }

    /// `𝓡_{a,b} = [0, a] x [0, b]` crossed horizontally.
    pub fn rectangle(spec: LatticeSpec, a: u32, b: u32) -> Result<Self> {
        Self::rect_at(spec, Vertex::new(0, 0), a, b)
    }

    /// `[x0, x0 + a] x [y0, y0 + b]` crossed vertically: `γ` is the bottom side
    /// and `γ′` the top side.
    pub fn vertical_rect_at(spec: LatticeSpec, origin: Vertex, a: u32, b: u32) -> Result<Self> {
        if a < 2 || b < 2 {
            return Err(Error::InvalidQuad(format!("rectangle {a}x{b} is too thin")));
        }
        let (a, b) = (a as i32, b as i32);
        let (x0, y0) = (origin.x, origin.y);
        let gamma = (0..=a).map(|i| Vertex::new(x0 + i, y0)).collect();
        let gamma1 = (1..b).map(|j| Vertex::new(x0 + a, y0 + j)).collect();
        let gamma_prime = (0..=a).rev().map(|i| Vertex::new(x0 + i, y0 + b)).collect();
        let gamma2 = (1..b).rev().map(|j| Vertex::new(x0, y0 + j)).collect();
        Quad::new(spec, [gamma, gamma1, gamma_prime, gamma2])
    }

    /// Quad bounded by a lattice polygon.
    ///
    /// `corners` are traversed in order (closing back to the first); each side
    /// must be horizontal, vertical or at 45 degrees. `arc_starts` are the
    /// first vertices of `γ`, `γ₁`, `γ′`, `γ₂` and must appear in that
    /// cyclic order along the traced boundary.
    pub fn from_polygon(
        spec: LatticeSpec,
        corners: &[Vertex],
        arc_starts: [Vertex; 4],
    ) -> Result<Self> {
        let circuit = trace_polygon(corners)?;
        let pos = |v: Vertex| {
            circuit
                .iter()
                .position(|&w| w == v)
                .ok_or_else(|| Error::InvalidQuad(format!("arc start {v:?} is not on the polygon")))
        };
        let p0 = pos(arc_starts[0])?;
        let k = circuit.len();
        let rotated: Vec<Vertex> = (0..k).map(|i| circuit[(p0 + i) % k]).collect();
        let mut cuts = [0usize; 5];
        for j in 1..4 {
            cuts[j] = (pos(arc_starts[j])? + k - p0) % k;
        }
        cuts[4] = k;
        if !(cuts[0] < cuts[1] && cuts[1] < cuts[2] && cuts[2] < cuts[3]) {
            return Err(Error::InvalidQuad(
                "arc starts are not in cyclic order".into(),
            ));
        }
        let arcs = [0, 1, 2, 3].map(|j| rotated[cuts[j]..cuts[j + 1]].to_vec());
        Quad::new(spec, arcs)
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn arcs(&self) -> &[Vec<Vertex>; 4] {
        &self.arcs
    }

    pub fn arc(&self, a: Arc) -> &[Vertex] {
        &self.arcs[a.index()]
    }

    pub fn circuit(&self) -> Vec<Vertex> {
        self.arcs.iter().flatten().copied().collect()
    }

    /// Bounding window of the quad's support.
    pub fn window(&self) -> &Window {
        &self.window
    }

    /// `(γ₁, γ′, γ₂, γ)`: its crossings are the vertical crossings of `self`.
    pub fn dual(&self) -> Quad {
        let [g, g1, gp, g2] = self.arcs.clone();
        let arcs = [g1, gp, g2, g];
        let remap = |bits: u8| ((bits >> 1) | (bits << 3)) & 0xf;
        let role = self
            .role
            .iter()
            .map(|&r| {
                if r >= BOUNDARY {
                    BOUNDARY + (r - BOUNDARY + 3) % 4
                } else {
                    r
                }
            })
            .collect();
        let adj = self.adj.iter().map(|&b| remap(b)).collect();
        Quad {
            spec: self.spec,
            arcs,
            window: self.window,
            role,
            adj,
            interior_len: self.interior_len,
        }
    }

    pub fn translated(&self, dx: i32, dy: i32) -> Result<Quad> {
        if (dx + dy).rem_euclid(2) != 0 {
            return Err(Error::param("translation must preserve vertex parity"));
        }
        let arcs = self
            .arcs
            .clone()
            .map(|a| a.into_iter().map(|v| v.offset(dx, dy)).collect());
        Quad::new(self.spec, arcs)
    }

    /// Image under a rotation about the origin. Every rotation of a
    /// symmetric lattice preserves parity, so the image is again a quad.
    pub fn rotated(&self, sym: Symmetry) -> Result<Quad> {
        if !matches!(
            sym,
            Symmetry::Identity | Symmetry::Rot90 | Symmetry::Rot180 | Symmetry::Rot270
        ) {
            return Err(Error::param("only rotations keep the arc order"));
        }
        let arcs = self
            .arcs
            .clone()
            .map(|a| a.into_iter().map(|v| sym.apply(v)).collect());
        Quad::new(self.spec, arcs)
    }

    /// The quad `nQ`: every boundary vertex is multiplied by `n` and
    /// consecutive images are joined by straight lattice segments.
    pub fn scaled(&self, n: u32) -> Result<Quad> {
        if n == 0 {
            return Err(Error::param("scale must be positive"));
        }
        let n = n as i32;
        let circuit = self.circuit();
        let k = circuit.len();
        let mut arcs: [Vec<Vertex>; 4] = Default::default();
        let mut idx = 0;
        for (a, arc) in self.arcs.iter().enumerate() {
            for _ in 0..arc.len() {
                let v = circuit[idx];
                let w = circuit[(idx + 1) % k];
                let (dx, dy) = (w.x - v.x, w.y - v.y);
                let base = Vertex::new(v.x * n, v.y * n);
                for s in 0..n {
                    arcs[a].push(base.offset(s * dx, s * dy));
                }
                idx += 1;
            }
        }
        Quad::new(self.spec, arcs)
    }

    #[inline]
    pub fn is_interior(&self, v: Vertex) -> bool {
        self.window
            .index(v)
            .is_some_and(|i| self.role[i] == INTERIOR)
    }

    pub fn boundary_arc(&self, v: Vertex) -> Option<Arc> {
        let i = self.window.index(v)?;
        let r = self.role[i];
        (r >= BOUNDARY).then(|| Arc::ALL[(r - BOUNDARY) as usize])
    }

    pub fn in_support(&self, v: Vertex) -> bool {
        self.window
            .index(v)
            .is_some_and(|i| self.role[i] != OUTSIDE)
    }

    /// Bitmask (see [`Arc::bit`]) of the arcs that have a vertex adjacent to `v`.
    pub fn adjacent_arcs(&self, v: Vertex) -> u8 {
        self.window.index(v).map_or(0, |i| self.adj[i])
    }

    pub(crate) fn role_at(&self, idx: usize) -> u8 {
        self.role[idx]
    }

    pub(crate) fn adj_at(&self, idx: usize) -> u8 {
        self.adj[idx]
    }

    pub(crate) fn interior_code() -> u8 {
        INTERIOR
    }

    pub fn interior_len(&self) -> usize {
        self.interior_len
    }

    pub fn interior(&self) -> Vec<Vertex> {
        (0..self.window.len())
            .filter(|&i| self.role[i] == INTERIOR)
            .map(|i| self.window.vertex(i))
            .collect()
    }

    pub fn interior_set(&self) -> VertexSet {
        let mut s = VertexSet::empty(self.window);
        for v in self.interior() {
            s.insert(v);
        }
        s
    }

    /// `Q° ∪ ∂Q`.
    pub fn support(&self) -> VertexSet {
        let mut s = VertexSet::empty(self.window);
        for i in 0..self.window.len() {
            if self.role[i] != OUTSIDE {
                s.insert(self.window.vertex(i));
            }
        }
        s
    }

    pub fn boundary_set(&self) -> VertexSet {
        VertexSet::from_vertices(self.window, self.circuit())
            .expect("boundary lies in its bounding window")
    }
}

fn trace_polygon(corners: &[Vertex]) -> Result<Vec<Vertex>> {
    if corners.len() < 3 {
        return Err(Error::InvalidQuad(
            "polygon needs at least three corners".into(),
        ));
    }
    let mut out = Vec::new();
    for (i, &v) in corners.iter().enumerate() {
        let w = corners[(i + 1) % corners.len()];
        let (dx, dy) = (w.x - v.x, w.y - v.y);
        let steps = dx.abs().max(dy.abs());
        if steps == 0 || (dx != 0 && dy != 0 && dx.abs() != dy.abs()) {
            return Err(Error::InvalidQuad(format!(
                "side {v:?} -> {w:?} is not a lattice line"
            )));
        }
        let (sx, sy) = (dx.signum(), dy.signum());
        for s in 0..steps {
            out.push(v.offset(s * sx, s * sy));
        }
    }
    Ok(out)
}
