use serde::Serialize;

use super::crossing::enumerate_crossings;
use super::quad::{Arc, Quad};
use crate::error::{Error, Result};
use crate::lattice::{Vertex, Window};

/// Interior size up to which membership is decided by enumerating crossings.
pub const EXACT_CLASS_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClassMembership {
    /// Membership certified (exactly, or by the sufficient test).
    pub member: bool,
    /// False when the quad was too large to enumerate and only the
    /// sufficient test was applied; a `false` member is then inconclusive.
    pub exact: bool,
    /// A center witnessing membership.
    pub center: Option<Vertex>,
}

fn norm_range(arc: &[Vertex], x: Vertex) -> (u32, u32) {
    arc.iter()
        .map(|v| v.norm_inf_from(x))
        .fold((u32::MAX, 0), |(lo, hi), n| (lo.min(n), hi.max(n)))
}

/// Centers `x` for which one of `γ`, `γ′` lies in `Λ_r(x)` and the other
/// outside `Λ_{R-1}(x)`. Even centers come first.
fn sufficient_centers(q: &Quad, r: u32, big_r: u32, ell: u32) -> Vec<Vertex> {
    let lam = Window::centered(ell);
    let mut out = Vec::new();
    for (inner, outer) in [(Arc::Gamma, Arc::GammaPrime), (Arc::GammaPrime, Arc::Gamma)] {
        let a = q.arc(inner);
        let Some(bb) = Window::bounding(a.iter().copied()) else {
            continue;
        };
        let r_i = r as i32;
        // x must be within r of every vertex of the inner arc.
        let (xlo, xhi) = (bb.x1 - r_i, bb.x0 + r_i);
        let (ylo, yhi) = (bb.y1 - r_i, bb.y0 + r_i);
        for y in ylo.max(lam.y0)..=yhi.min(lam.y1) {
            for x in xlo.max(lam.x0)..=xhi.min(lam.x1) {
                let c = Vertex::new(x, y);
                if norm_range(q.arc(outer), c).0 >= big_r && !out.contains(&c) {
                    out.push(c);
                }
            }
        }
    }
    out.sort_by_key(|v| (!v.is_even(), v.y, v.x));
    out
}

fn traverses_extended(q: &Quad, c: &[Vertex], x: Vertex, r: u32, big_r: u32) -> bool {
    let spec = q.spec();
    let ends = |v: Vertex, arc: Arc| -> Vec<Vertex> {
        spec.neighbors(v)
            .into_iter()
            .filter(|&w| q.boundary_arc(w) == Some(arc))
            .collect()
    };
    let (lo, hi) = norm_range(c, x);
    let starts = ends(c[0], Arc::Gamma);
    let finals = ends(c[c.len() - 1], Arc::GammaPrime);
    starts.iter().any(|&s| {
        finals.iter().any(|&t| {
            let ns = s.norm_inf_from(x);
            let nt = t.norm_inf_from(x);
            lo.min(ns).min(nt) <= r && hi.max(ns).max(nt) >= big_r
        })
    })
}

/// Whether `q ∈ Q_{r,R,L}`: `q ⊂ Λ_L` and, for some `x ∈ Λ_L`, every
/// crossing extended by one vertex of `γ` and one of `γ′` traverses the
/// annulus `A_x(r, R)`.
///
/// Quads with at most [`EXACT_CLASS_LIMIT`] interior vertices are decided
/// exactly. Larger quads are tested with the sufficient condition that one
/// of `γ`, `γ′` lies within distance `r` of `x` and the other at distance at
/// least `R`.
pub fn quad_in_class(q: &Quad, r: u32, big_r: u32, ell: u32) -> Result<ClassMembership> {
    if r == 0 || big_r <= r {
        return Err(Error::param(format!(
            "class radii must satisfy 0 < r < R, got r={r}, R={big_r}"
        )));
    }
    if !Window::centered(ell).contains_window(q.window()) {
        return Ok(ClassMembership {
            member: false,
            exact: true,
            center: None,
        });
    }
    let sufficient = sufficient_centers(q, r, big_r, ell);
    if q.interior_len() > EXACT_CLASS_LIMIT {
        return Ok(ClassMembership {
            member: !sufficient.is_empty(),
            exact: false,
            center: sufficient.first().copied(),
        });
    }
    if let Some(&c) = sufficient.first() {
        return Ok(ClassMembership {
            member: true,
            exact: true,
            center: Some(c),
        });
    }
    let crossings = enumerate_crossings(q, 1 << 20)
        .ok_or_else(|| Error::param("too many crossings to decide class membership"))?;
    let mut centers: Vec<Vertex> = Window::centered(ell).vertices().collect();
    centers.sort_by_key(|v| (!v.is_even(), v.y, v.x));
    let found = centers.into_iter().find(|&x| {
        crossings
            .iter()
            .all(|c| traverses_extended(q, c, x, r, big_r))
    });
    Ok(ClassMembership {
        member: found.is_some(),
        exact: true,
        center: found,
    })
}

/// Position of `v` along the square of radius `rho` around `x`,
/// counter-clockwise from the bottom-right corner.
fn ring_pos(v: Vertex, x: Vertex, rho: i32) -> i32 {
    let (dx, dy) = (v.x - x.x, v.y - x.y);
    if dx == rho && dy > -rho {
        dy + rho
    } else if dy == rho && dx < rho {
        2 * rho + (rho - dx)
    } else if dx == -rho && dy < rho {
        4 * rho + (rho - dy)
    } else {
        6 * rho + (dx + rho)
    }
}

/// A candidate arc on a ring: its vertices in order, oriented from the
/// `γ₂` end to the `γ₁` end.
fn ring_arcs(q: &Quad, x: Vertex, rho: u32, own_side: Arc) -> Vec<Vec<Vertex>> {
    let spec = *q.spec();
    let rho_i = rho as i32;
    let mut out = Vec::new();

    // The quad's own side, when it lies on the ring.
    let side = q.arc(own_side);
    if side.iter().all(|v| v.norm_inf_from(x) == rho) {
        let mut a = side.to_vec();
        if own_side == Arc::GammaPrime {
            a.reverse();
        }
        out.push(a);
    }

    // Ring components inside Q°.
    let on_ring: Vec<Vertex> = Window::centered_at(x, rho)
        .vertices()
        .filter(|v| v.norm_inf_from(x) == rho && q.is_interior(*v))
        .collect();
    let mut used = vec![false; on_ring.len()];
    for s in 0..on_ring.len() {
        if used[s] {
            continue;
        }
        used[s] = true;
        let mut comp = vec![on_ring[s]];
        let mut k = 0;
        while k < comp.len() {
            let u = comp[k];
            k += 1;
            for (j, &w) in on_ring.iter().enumerate() {
                if !used[j] && spec.adjacent(u, w) {
                    used[j] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_by_key(|&v| ring_pos(v, x, rho_i));
        // Rotate so the component does not wrap around the ring's origin.
        let period = 8 * rho_i;
        let n = comp.len();
        let gaps: Vec<i32> = (0..n)
            .map(|i| {
                (ring_pos(comp[(i + 1) % n], x, rho_i) - ring_pos(comp[i], x, rho_i))
                    .rem_euclid(period)
            })
            .collect();
        if let Some(cut) = (0..n).max_by_key(|&i| (gaps[i], i)) {
            comp.rotate_left((cut + 1) % n);
        }
        let first = q.adjacent_arcs(comp[0]);
        let last = q.adjacent_arcs(comp[n - 1]);
        let (g1, g2) = (Arc::Gamma1.bit(), Arc::Gamma2.bit());
        if first & g1 != 0 && last & g2 != 0 {
            comp.reverse();
        } else if !(first & g2 != 0 && last & g1 != 0) {
            continue;
        }
        out.push(comp);
    }
    out
}

fn arc_indices_near(q: &Quad, v: Vertex, arc: Arc) -> Vec<usize> {
    let spec = q.spec();
    q.arc(arc)
        .iter()
        .enumerate()
        .filter(|(_, &w)| w == v || spec.adjacent(v, w))
        .map(|(i, _)| i)
        .collect()
}

fn segment(arc: &[Vertex], from: usize, to: usize) -> Vec<Vertex> {
    if from <= to {
        arc[from..=to].to_vec()
    } else {
        arc[to..=from].iter().rev().copied().collect()
    }
}

/// A sub-quad `Q′ ⊆ q` whose crossing arcs lie on the squares of radius `r`
/// and `R` around a center `x`, and whose other two arcs are pieces of `γ₁`
/// and `γ₂`. A vertical crossing of `Q′` is a vertical crossing of `q`,
/// so `Q′` glued implies `q` glued.
pub fn subquad_in_annulus(q: &Quad, r: u32, big_r: u32, ell: u32) -> Result<(Vertex, Quad)> {
    let membership = quad_in_class(q, r, big_r, ell)?;
    if !membership.member {
        return Err(Error::NoSubQuad(format!(
            "quad is not in the class for r={r}, R={big_r}, L={ell}"
        )));
    }
    let mut centers = sufficient_centers(q, r, big_r, ell);
    if let Some(c) = membership.center {
        if !centers.contains(&c) {
            centers.push(c);
        }
    }
    let support = q.support();
    for x in centers {
        for (inner_side, outer_side) in
            [(Arc::Gamma, Arc::GammaPrime), (Arc::GammaPrime, Arc::Gamma)]
        {
            for a in ring_arcs(q, x, r, inner_side) {
                for a2 in ring_arcs(q, x, big_r, outer_side) {
                    if let Some(sub) = glue_arcs(q, &a, &a2) {
                        if sub.support().iter().all(|v| support.contains(v)) {
                            return Ok((x, sub));
                        }
                    }
                }
            }
        }
    }
    Err(Error::NoSubQuad(
        "no strongly simple sub-quad between the annulus squares".into(),
    ))
}

/// Close `a` (inner) and `a2` (outer) with pieces of `γ₁` and `γ₂`.
fn glue_arcs(q: &Quad, a: &[Vertex], a2: &[Vertex]) -> Option<Quad> {
    let b_from = arc_indices_near(q, a[a.len() - 1], Arc::Gamma1);
    let b_to = arc_indices_near(q, a2[a2.len() - 1], Arc::Gamma1);
    let c_from = arc_indices_near(q, a2[0], Arc::Gamma2);
    let c_to = arc_indices_near(q, a[0], Arc::Gamma2);
    let g1 = q.arc(Arc::Gamma1);
    let g2 = q.arc(Arc::Gamma2);
    let a2_fwd: Vec<Vertex> = a2.iter().rev().copied().collect();
    for &i in &b_from {
        for &j in &b_to {
            for &k in &c_from {
                for &l in &c_to {
                    let arcs = [
                        a.to_vec(),
                        segment(g1, i, j),
                        a2_fwd.clone(),
                        segment(g2, k, l),
                    ];
                    let arcs = dedup_joints(arcs);
                    if let Ok(sub) = Quad::new(*q.spec(), arcs) {
                        return Some(sub);
                    }
                }
            }
        }
    }
    None
}

/// Drops ring vertices that coincide with the chosen ends of `γ₁`/`γ₂`.
fn dedup_joints(mut arcs: [Vec<Vertex>; 4]) -> [Vec<Vertex>; 4] {
    for k in 0..4 {
        let next_first = arcs[(k + 1) % 4].first().copied();
        if arcs[k].len() > 1 && arcs[k].last().copied() == next_first {
            arcs[k].pop();
        }
    }
    arcs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeSpec;

    const UJ: LatticeSpec = LatticeSpec::union_jack();

    #[test]
    fn radial_strip_is_its_own_subquad() {
        let q = Quad::rect_at(UJ, Vertex::new(4, -4), 8, 8).unwrap();
        let m = quad_in_class(&q, 4, 12, 12).unwrap();
        assert!(m.member && !m.exact);
        let (x, sub) = subquad_in_annulus(&q, 4, 12, 12).unwrap();
        assert_eq!(x, Vertex::new(0, 0));
        assert_eq!(sub.support(), q.support());
    }

    #[test]
    fn wide_rectangle_is_cut_down() {
        let q = Quad::rect_at(UJ, Vertex::new(0, -2), 10, 4).unwrap();
        let (x, sub) = subquad_in_annulus(&q, 2, 8, 12).unwrap();
        assert!(x.is_even());
        assert!(sub.support().iter().all(|v| q.in_support(v)));
        assert!(sub.arc(Arc::Gamma).iter().all(|v| v.norm_inf_from(x) == 2));
        assert!(sub
            .arc(Arc::GammaPrime)
            .iter()
            .all(|v| v.norm_inf_from(x) == 8));
    }

    #[test]
    fn outside_box_is_not_a_member() {
        let q = Quad::rect_at(UJ, Vertex::new(0, -2), 10, 4).unwrap();
        assert!(!quad_in_class(&q, 2, 8, 6).unwrap().member);
    }
}
