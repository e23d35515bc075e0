use serde::Serialize;

use super::mc::{McSettings, MCEstimate};
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, Symmetry, Vertex, Window};
use crate::par::try_map_indices;
use crate::rng::replica_seed;
use crate::samplers::FieldSampler;
use crate::topology::{explored_quad_glued, is_glued, leftmost_crossing, quad_in_class, subquad_in_annulus, Quad};

const ROTATIONS: [Symmetry; 4] = [Symmetry::Identity, Symmetry::Rot90, Symmetry::Rot180, Symmetry::Rot270];

/// Quads of the class `Q_{r,R,L}` around the origin over which non-gluing
/// is estimated.
///
/// `members` are fixed quads. Each entry of `recipes` is a strip whose
/// lowest positive crossing is explored; the quad above that crossing is a
/// random member of the class.
#[derive(Clone, Debug)]
pub struct BetaFamily {
    pub r: u32,
    pub big_r: u32,
    pub ell: u32,
    pub center: Vertex,
    pub members: Vec<Quad>,
    pub recipes: Vec<Quad>,
}

impl BetaFamily {
    /// The annulus family: the radial strips `[r, R] x [-r, r]`, the sub-quads
    /// that [`subquad_in_annulus`] cuts out of the longer strips
    /// `[-r, R] x [-r, r]`, and the quads explored above the lowest crossing
    /// of those longer strips, each in all four rotations.
    pub fn annulus(spec: LatticeSpec, r: u32, big_r: u32, ell: u32) -> Result<Self> {
        if !(r >= 1 && big_r > r && big_r <= ell) {
            return Err(Error::param(format!("need 1 <= r < R <= L, got r={r}, R={big_r}, L={ell}")));
        }
        let ri = r as i32;
        let mut members: Vec<Quad> = Vec::new();
        let mut recipes = Vec::new();
        let push = |q: Quad, members: &mut Vec<Quad>| -> Result<()> {
            if quad_in_class(&q, r, big_r, ell)?.member && !members.iter().any(|m| m.arcs() == q.arcs()) {
                members.push(q);
            }
            Ok(())
        };
        // Thin strips can fail to be strongly simple on lattices with
        // diagonals; those shapes are skipped.
        for sym in ROTATIONS {
            if big_r - r >= 2 {
                if let Ok(q) = Quad::rect_at(spec, Vertex::new(ri, -ri), big_r - r, 2 * r).and_then(|q| q.rotated(sym)) {
                    push(q, &mut members)?;
                }
            }
            let Ok(long) = Quad::rect_at(spec, Vertex::new(-ri, -ri), big_r + r, 2 * r).and_then(|q| q.rotated(sym)) else {
                continue;
            };
            if let Ok((_, sub)) = subquad_in_annulus(&long, r, big_r, ell) {
                push(sub, &mut members)?;
            }
            if quad_in_class(&long, r, big_r, ell)?.member {
                recipes.push(long);
            }
        }
        Ok(BetaFamily { r, big_r, ell, center: Vertex::new(0, 0), members, recipes })
    }

    pub fn window(&self) -> Option<Window> {
        self.members.iter().chain(&self.recipes).map(|q| *q.window()).reduce(|a, b| a.hull(&b))
    }
}

#[derive(Clone, Debug, Serialize)]
struct MemberEstimate {
    kind: &'static str,
    index: usize,
    value: f64,
    stderr: f64,
    n_samples: u64,
}

/// `β̂`: the largest non-gluing frequency over the family.
///
/// Fixed members contribute `P(not glued)`. Recipe members contribute
/// `P(explored quad not glued | the strip has a positive crossing)`,
/// estimated over the replicas where the crossing exists. The maximum is a
/// lower-bound proxy for the supremum over all explored quads of the class.
pub fn estimate_beta(sampler: &dyn FieldSampler, family: &BetaFamily, s: &McSettings) -> Result<MCEstimate> {
    s.check()?;
    let window = family.window().ok_or_else(|| Error::param("quad family is empty"))?;
    let rows = try_map_indices(s.exec, s.reps, |i| -> Result<(Vec<bool>, Vec<Option<bool>>)> {
        let config = sampler.sample(&window, replica_seed(s.seed, i as u64))?;
        let fixed = family.members.iter().map(|q| is_glued(&config, q).map(|g| !g)).collect::<Result<Vec<_>>>()?;
        let explored = family
            .recipes
            .iter()
            .map(|q| match leftmost_crossing(&config, q)? {
                Some(c) => explored_quad_glued(&config, q, &c).map(|g| Some(!g)),
                None => Ok(None),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((fixed, explored))
    })?;
    let mut parts = Vec::new();
    for j in 0..family.members.len() {
        let k = rows.iter().filter(|r| r.0[j]).count() as u64;
        let e = MCEstimate::from_counts(k, s.reps as u64, s.seed);
        parts.push(MemberEstimate { kind: "fixed", index: j, value: e.value, stderr: e.stderr, n_samples: e.n_samples });
    }
    for j in 0..family.recipes.len() {
        let outcomes: Vec<bool> = rows.iter().filter_map(|r| r.1[j]).collect();
        if outcomes.is_empty() {
            continue;
        }
        let k = outcomes.iter().filter(|&&b| b).count() as u64;
        let e = MCEstimate::from_counts(k, outcomes.len() as u64, s.seed);
        parts.push(MemberEstimate { kind: "explored", index: j, value: e.value, stderr: e.stderr, n_samples: e.n_samples });
    }
    let best = parts
        .iter()
        .max_by(|a, b| a.value.total_cmp(&b.value).then(b.stderr.total_cmp(&a.stderr)))
        .ok_or_else(|| Error::param("no family member could be evaluated"))?;
    Ok(MCEstimate { value: best.value, stderr: best.stderr, n_samples: s.reps as u64, seed: s.seed, metadata: Default::default() }
        .with("r", family.r)
        .with("R", family.big_r)
        .with("L", family.ell)
        .with("argmax", (best.kind, best.index))
        .with("members", &parts)
        .with("proxy", "lower bound for the supremum over explored quads"))
}
