use std::collections::VecDeque;

use super::config::Configuration;
use super::path::{is_strongly_simple, loop_erase};
use super::quad::Quad;
use crate::error::{Error, Result};
use crate::lattice::{r_neighborhood, Vertex, VertexSet};

const G: u8 = 1;
const G1: u8 = 2;
const GP: u8 = 4;
const G2: u8 = 8;

#[inline]
fn is_source(q: &Quad, i: usize) -> bool {
    let a = q.adj_at(i);
    q.role_at(i) == Quad::interior_code() && a & G != 0 && a & (G1 | G2) == 0
}

#[inline]
fn is_target(q: &Quad, i: usize) -> bool {
    let a = q.adj_at(i);
    q.role_at(i) == Quad::interior_code() && a & GP != 0 && a & (G1 | G2) == 0
}

#[inline]
fn is_core(q: &Quad, i: usize) -> bool {
    q.role_at(i) == Quad::interior_code() && q.adj_at(i) == 0
}

/// Breadth-first search for a crossing through window indices accepted by `allowed`.
///
/// Sources are the interior neighbours of `γ` away from `γ₁ ∪ γ₂`, targets
/// the same for `γ′`, and every inner vertex must avoid the neighbourhood
/// of `∂Q`. The search path is shortest, hence chordless; loop-erasure is
/// applied anyway so the result is strongly simple by construction.
fn bfs_crossing(q: &Quad, allowed: impl Fn(usize) -> bool) -> Option<Vec<Vertex>> {
    let win = *q.window();
    let spec = *q.spec();
    const UNSEEN: u32 = u32::MAX;
    let mut parent = vec![UNSEEN; win.len()];
    let mut queue = VecDeque::new();
    for i in 0..win.len() {
        if is_source(q, i) && allowed(i) {
            if is_target(q, i) {
                return Some(vec![win.vertex(i)]);
            }
            parent[i] = i as u32;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let u = win.vertex(i);
        for &(dx, dy) in spec.neighbor_offsets(u) {
            let j = win.index_unchecked(u.offset(dx, dy));
            if parent[j] != UNSEEN || !allowed(j) {
                continue;
            }
            if is_target(q, j) {
                parent[j] = i as u32;
                let mut walk = vec![win.vertex(j)];
                let mut k = i;
                loop {
                    walk.push(win.vertex(k));
                    if parent[k] as usize == k {
                        break;
                    }
                    k = parent[k] as usize;
                }
                walk.reverse();
                return Some(loop_erase(&spec, &walk));
            }
            if is_core(q, j) {
                parent[j] = i as u32;
                queue.push_back(j);
            }
        }
    }
    None
}

fn check_cover(config: &Configuration, q: &Quad) -> Result<()> {
    if config.covers(q.window()) {
        Ok(())
    } else {
        Err(Error::OutsideWindow(format!(
            "quad with bounding window {:?}",
            q.window()
        )))
    }
}

/// A strongly simple crossing of `q` on which every vertex has sign `sign`.
pub fn find_crossing(config: &Configuration, q: &Quad, sign: i8) -> Result<Option<Vec<Vertex>>> {
    check_cover(config, q)?;
    let win = *q.window();
    let cw = *config.window();
    Ok(bfs_crossing(q, |i| {
        config.sign_at(cw.index_unchecked(win.vertex(i))) == sign
    }))
}

/// A crossing of `q` using only vertices of `set`.
pub fn crossing_in_set(q: &Quad, set: &VertexSet) -> Option<Vec<Vertex>> {
    let win = *q.window();
    bfs_crossing(q, |i| set.contains(win.vertex(i)))
}

/// `q` is glued when its dual `(γ₁, γ′, γ₂, γ)` has a positive crossing.
pub fn is_glued(config: &Configuration, q: &Quad) -> Result<bool> {
    Ok(find_crossing(config, &q.dual(), 1)?.is_some())
}

/// Checks every condition of the crossing definition.
pub fn validate_crossing(q: &Quad, path: &[Vertex]) -> Result<()> {
    let fail = |msg: String| Err(Error::NotACrossing(msg));
    if path.is_empty() {
        return fail("empty path".into());
    }
    if !is_strongly_simple(q.spec(), path) {
        return fail("path is not strongly simple".into());
    }
    let win = *q.window();
    for &v in path {
        if !q.is_interior(v) {
            return fail(format!("{v:?} is not an interior vertex"));
        }
    }
    let first = win.index_unchecked(path[0]);
    let last = win.index_unchecked(path[path.len() - 1]);
    if !is_source(q, first) {
        return fail(format!("{:?} is not a valid starting vertex", path[0]));
    }
    if !is_target(q, last) {
        return fail(format!(
            "{:?} is not a valid final vertex",
            path[path.len() - 1]
        ));
    }
    if path.len() > 2 {
        for &v in &path[1..path.len() - 1] {
            if !is_core(q, win.index_unchecked(v)) {
                return fail(format!("inner vertex {v:?} touches the boundary"));
            }
        }
    }
    Ok(())
}

/// Mask (over the quad window) of interior vertices not on `c` that are
/// connected to a neighbour of `γ₁` inside `Q° \ c`, plus `c` itself.
fn below_mask(q: &Quad, c: &[Vertex]) -> Vec<bool> {
    let win = *q.window();
    let spec = *q.spec();
    let mut blocked = vec![false; win.len()];
    for &v in c {
        blocked[win.index_unchecked(v)] = true;
    }
    let mut mask = vec![false; win.len()];
    let mut queue = VecDeque::new();
    for i in 0..win.len() {
        if q.role_at(i) == Quad::interior_code() && q.adj_at(i) & G1 != 0 && !blocked[i] {
            mask[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let u = win.vertex(i);
        for &(dx, dy) in spec.neighbor_offsets(u) {
            let j = win.index_unchecked(u.offset(dx, dy));
            if !mask[j] && !blocked[j] && q.role_at(j) == Quad::interior_code() {
                mask[j] = true;
                queue.push_back(j);
            }
        }
    }
    for &v in c {
        mask[win.index_unchecked(v)] = true;
    }
    mask
}

/// Splits `Q° \ c` into the component containing the neighbours of `γ₁`
/// and the rest, which contains the neighbours of `γ₂`.
pub fn jordan_split(q: &Quad, c: &[Vertex]) -> Result<(VertexSet, VertexSet)> {
    validate_crossing(q, c)?;
    let win = *q.window();
    let spec = *q.spec();
    let mut label = vec![usize::MAX; win.len()];
    for &v in c {
        label[win.index_unchecked(v)] = usize::MAX - 1;
    }
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for s in 0..win.len() {
        if q.role_at(s) != Quad::interior_code() || label[s] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut members = vec![s];
        label[s] = id;
        let mut k = 0;
        while k < members.len() {
            let u = win.vertex(members[k]);
            k += 1;
            for &(dx, dy) in spec.neighbor_offsets(u) {
                let j = win.index_unchecked(u.offset(dx, dy));
                if q.role_at(j) == Quad::interior_code() && label[j] == usize::MAX {
                    label[j] = id;
                    members.push(j);
                }
            }
        }
        comps.push(members);
    }
    // Near the ends of `c` the quad can leave small pockets cut off between
    // `c` and `γ` (or `γ′`). They touch neither `γ₁` nor `γ₂` and are put
    // above `c`, as if `c` were joined to the boundary below them.
    let touches = |comp: &[usize], bit: u8| comp.iter().any(|&i| q.adj_at(i) & bit != 0);
    let violation = || Error::JordanViolation { components: comps.len() };
    let lows: Vec<usize> = (0..comps.len()).filter(|&k| touches(&comps[k], G1)).collect();
    let highs: Vec<usize> = (0..comps.len()).filter(|&k| touches(&comps[k], G2)).collect();
    let (lo, hi) = match (lows.as_slice(), highs.as_slice()) {
        (&[lo], &[hi]) if lo != hi => (lo, hi),
        _ => return Err(violation()),
    };
    let to_set = |comp: &[usize]| {
        let mut s = VertexSet::empty(win);
        for &i in comp {
            s.insert(win.vertex(i));
        }
        s
    };
    let mut above = to_set(&comps[hi]);
    for (k, comp) in comps.iter().enumerate() {
        if k != lo && k != hi {
            for &i in comp {
                above.insert(win.vertex(i));
            }
        }
    }
    Ok((to_set(&comps[lo]), above))
}

/// `V_c`: the crossing together with everything between it and `γ₁`.
pub fn region_below(q: &Quad, c: &[Vertex]) -> Result<VertexSet> {
    let (mut below, _) = jordan_split(q, c)?;
    for &v in c {
        below.insert(v);
    }
    Ok(below)
}

/// Whether the quad explored above a crossing `c` of `q` is glued: a
/// positive path in the component of `Q° \ c` above `c`, from a neighbour
/// of `c` to a neighbour of `γ₂`, whose ends avoid `γ ∪ γ′` and whose inner
/// vertices avoid the whole boundary `γ ∪ c ∪ γ′ ∪ γ₂`.
pub fn explored_quad_glued(config: &Configuration, q: &Quad, c: &[Vertex]) -> Result<bool> {
    check_cover(config, q)?;
    let (_, above) = jordan_split(q, c)?;
    let win = *q.window();
    let cw = *config.window();
    let spec = *q.spec();
    let mut on_c = vec![false; win.len()];
    for &v in c {
        on_c[win.index_unchecked(v)] = true;
    }
    let ok = |i: usize| {
        let v = win.vertex(i);
        above.contains(v) && config.sign_at(cw.index_unchecked(v)) == 1
    };
    let near_c = |i: usize| {
        let v = win.vertex(i);
        spec.neighbor_offsets(v)
            .iter()
            .any(|&(dx, dy)| win.index(v.offset(dx, dy)).is_some_and(|j| on_c[j]))
    };
    let sides = |i: usize| q.adj_at(i) & (G | GP) != 0;
    let mut seen = vec![false; win.len()];
    let mut queue = VecDeque::new();
    for i in 0..win.len() {
        if ok(i) && near_c(i) && !sides(i) {
            if q.adj_at(i) & G2 != 0 {
                return Ok(true);
            }
            seen[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let u = win.vertex(i);
        for &(dx, dy) in spec.neighbor_offsets(u) {
            let j = win.index_unchecked(u.offset(dx, dy));
            if seen[j] || !ok(j) || sides(j) {
                continue;
            }
            if q.adj_at(j) & G2 != 0 {
                return Ok(true);
            }
            if q.adj_at(j) == 0 && !near_c(j) {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    Ok(false)
}

fn leftmost_by(q: &Quad, allowed: impl Fn(usize) -> bool) -> Option<Vec<Vertex>> {
    let win = *q.window();
    let mut c = bfs_crossing(q, &allowed)?;
    // Any crossing inside V_c other than c lies strictly below it, and the
    // lowest crossing is the only crossing inside its own region.
    'descend: loop {
        let below = below_mask(q, &c);
        for &z in &c {
            let iz = win.index_unchecked(z);
            if let Some(next) = bfs_crossing(q, |i| i != iz && below[i] && allowed(i)) {
                c = next;
                continue 'descend;
            }
        }
        return Some(c);
    }
}

/// The lowest positive crossing `Γ⁻`: the one minimising `V_c` (the
/// crossing closest to `γ₁`).
pub fn leftmost_crossing(config: &Configuration, q: &Quad) -> Result<Option<Vec<Vertex>>> {
    check_cover(config, q)?;
    let win = *q.window();
    let cw = *config.window();
    Ok(leftmost_by(q, |i| {
        config.sign_at(cw.index_unchecked(win.vertex(i))) == 1
    }))
}

/// Lowest crossing of `q` using only vertices of `set`.
pub fn leftmost_crossing_in_set(q: &Quad, set: &VertexSet) -> Option<Vec<Vertex>> {
    let win = *q.window();
    leftmost_by(q, |i| set.contains(win.vertex(i)))
}

/// Vertices of the `ℓ`-neighbourhood `V_ℓ` of `v` (inside `Q° ∪ ∂Q`) that
/// have a neighbour in `Q° ∪ ∂Q` outside `V_ℓ`.
pub fn tubular_frontier(q: &Quad, v: &VertexSet, ell: u32) -> VertexSet {
    let support = q.support();
    let spec = *q.spec();
    let grown = r_neighborhood(&spec, v, ell, &support);
    let mut out = VertexSet::empty(*support.window());
    for x in grown.iter() {
        let escapes = spec
            .neighbor_offsets(x)
            .iter()
            .map(|&(dx, dy)| x.offset(dx, dy))
            .any(|y| support.contains(y) && !grown.contains(y));
        if escapes {
            out.insert(x);
        }
    }
    out
}

/// All crossings of `q`, or `None` if there are more than `limit`.
///
/// Depth-first enumeration directly from the definition; exponential, meant
/// for quads with a handful of interior vertices.
pub fn enumerate_crossings(q: &Quad, limit: usize) -> Option<Vec<Vec<Vertex>>> {
    let win = *q.window();
    let spec = *q.spec();
    let mut out = Vec::new();
    let mut path: Vec<Vertex> = Vec::new();

    fn extend(
        q: &Quad,
        spec: &crate::lattice::LatticeSpec,
        path: &mut Vec<Vertex>,
        out: &mut Vec<Vec<Vertex>>,
        limit: usize,
    ) -> bool {
        let win = *q.window();
        let u = *path.last().expect("nonempty path");
        for &(dx, dy) in spec.neighbor_offsets(u) {
            let w = u.offset(dx, dy);
            let j = win.index_unchecked(w);
            let usable_end = is_target(q, j);
            let usable_mid = is_core(q, j);
            if !usable_end && !usable_mid {
                continue;
            }
            let n = path.len();
            if path[..n - 1].iter().any(|&p| p == w || spec.adjacent(p, w)) {
                continue;
            }
            path.push(w);
            if usable_end {
                out.push(path.clone());
                if out.len() > limit {
                    return false;
                }
            }
            if usable_mid && !extend(q, spec, path, out, limit) {
                return false;
            }
            path.pop();
        }
        true
    }

    for i in 0..win.len() {
        if !is_source(q, i) {
            continue;
        }
        path.clear();
        path.push(win.vertex(i));
        if is_target(q, i) {
            out.push(path.clone());
            if out.len() > limit {
                return None;
            }
        }
        if !extend(q, &spec, &mut path, &mut out, limit) {
            return None;
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{LatticeSpec, Window};

    const UJ: LatticeSpec = LatticeSpec::union_jack();

    #[test]
    fn all_plus_crosses_and_all_minus_does_not() {
        let q = Quad::rectangle(UJ, 8, 10).unwrap();
        let plus = Configuration::constant(*q.window(), 1);
        let c = find_crossing(&plus, &q, 1).unwrap().unwrap();
        validate_crossing(&q, &c).unwrap();
        assert!(find_crossing(&plus, &q, -1).unwrap().is_none());
        assert!(is_glued(&plus, &q).unwrap());
    }

    #[test]
    fn lowest_crossing_of_full_rectangle_is_row_two() {
        let q = Quad::rectangle(UJ, 6, 8).unwrap();
        let plus = Configuration::constant(*q.window(), 1);
        let c = leftmost_crossing(&plus, &q).unwrap().unwrap();
        assert!(c.iter().all(|v| v.y == 2), "{c:?}");
        assert_eq!(c.len(), 5);
    }

    #[test]
    fn jordan_split_of_middle_row() {
        let q = Quad::rectangle(UJ, 6, 8).unwrap();
        let c: Vec<Vertex> = (1..6).map(|x| Vertex::new(x, 4)).collect();
        let (lo, hi) = jordan_split(&q, &c).unwrap();
        assert_eq!(lo.len(), 5 * 3);
        assert_eq!(hi.len(), 5 * 3);
    }

    #[test]
    fn narrow_quads_have_single_vertex_crossings() {
        let q = Quad::rectangle(UJ, 2, 6).unwrap();
        let all = enumerate_crossings(&q, 100).unwrap();
        // Three single vertices and the four two-vertex paths between them.
        assert_eq!(all.len(), 7);
        assert_eq!(all.iter().filter(|c| c.len() == 1).count(), 3);
        let win = Window::new(0, 0, 2, 6).unwrap();
        assert!(crossing_in_set(&q, &VertexSet::full(win)).is_some());
    }
}
