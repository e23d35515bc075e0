//! Library against oracle on every sign configuration of a small quad.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use rswlab_core::topology::{
    explored_quad_glued, find_crossing, is_glued, jordan_split, leftmost_crossing, validate_crossing,
};
use rswlab_core::{Configuration, LatticeSpec, Quad, Vertex};

use super::{uj_adjacent, uj_neighbors, OracleQuad};

fn v(x: i32, y: i32) -> Vertex {
    Vertex::new(x, y)
}

/// Five quads with at most 16 interior vertices.
pub fn shapes() -> Vec<(&'static str, Quad)> {
    let s = LatticeSpec::union_jack();
    vec![
        ("rect_4x6", Quad::rect_at(s, v(0, 0), 4, 6).unwrap()),
        ("rect_6x4", Quad::rect_at(s, v(0, 0), 6, 4).unwrap()),
        ("rect_4x4_shifted", Quad::rect_at(s, v(1, -1), 4, 4).unwrap()),
        (
            "cut_corner",
            Quad::from_polygon(
                s,
                &[v(0, 0), v(6, 0), v(6, 2), v(4, 4), v(0, 4)],
                [v(0, 3), v(1, 0), v(6, 1), v(4, 4)],
            )
            .unwrap(),
        ),
        (
            "diamond",
            Quad::from_polygon(
                s,
                &[v(0, 0), v(3, -3), v(6, 0), v(3, 3)],
                [v(1, 1), v(2, -2), v(5, -1), v(4, 2)],
            )
            .unwrap(),
        ),
    ]
}

/// Bit `j` of `mask` is the sign of `o.interior[j]`; everything else is negative.
pub fn config_of(q: &Quad, o: &OracleQuad, mask: u32) -> Configuration {
    Configuration::from_fn(*q.window(), |x| match o.interior.iter().position(|&w| w == x) {
        Some(j) if mask >> j & 1 == 1 => 1,
        _ => -1,
    })
}

/// Positive path in the part of `Q°` above `c`, from next to `c` up to `γ₂`,
/// avoiding the side arcs, with inner vertices away from every boundary piece.
pub fn oracle_explored_glued(o: &OracleQuad, c: &[Vertex], positive: &dyn Fn(Vertex) -> bool) -> bool {
    let below = o.region_below(c);
    let above: HashSet<Vertex> = o.interior.iter().copied().filter(|w| !below.contains(w)).collect();
    let near = |x: Vertex, set: &[Vertex]| set.iter().any(|&w| uj_adjacent(x, w));
    let sides = |x: Vertex| near(x, &o.arcs[0]) || near(x, &o.arcs[2]);
    let usable = |x: Vertex| above.contains(&x) && positive(x) && !sides(x);
    let top = |x: Vertex| near(x, &o.arcs[3]);
    let inner = |x: Vertex| !near(x, c) && !near(x, &o.arcs[1]) && !top(x);
    let mut seen: HashSet<Vertex> = above.iter().copied().filter(|&x| usable(x) && near(x, c)).collect();
    if seen.iter().any(|&x| top(x)) {
        return true;
    }
    let mut queue: VecDeque<Vertex> = seen.iter().copied().collect();
    while let Some(u) = queue.pop_front() {
        for w in uj_neighbors(u) {
            if seen.contains(&w) || !usable(w) {
                continue;
            }
            if top(w) {
                return true;
            }
            if inner(w) {
                seen.insert(w);
                queue.push_back(w);
            }
        }
    }
    false
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Mismatches {
    pub configs: u64,
    pub crossed: u64,
    pub glued: u64,
    pub crossing: u64,
    pub leftmost: u64,
    pub jordan: u64,
    pub gluing: u64,
    pub explored: u64,
}

impl Mismatches {
    pub fn total(&self) -> u64 {
        self.crossing + self.leftmost + self.jordan + self.gluing + self.explored
    }
}

/// Whether `jordan_split` of `c` gives the oracle's two sides: exactly one
/// component of `Q° \ c` touches `γ₁`, exactly one other touches `γ₂`, and
/// the library puts the first below and everything else above.
fn jordan_agrees(q: &Quad, o: &OracleQuad, c: &[Vertex]) -> bool {
    let touches = |comp: &BTreeSet<Vertex>, arc: usize| comp.iter().any(|&x| o.arcs[arc].iter().any(|&w| uj_adjacent(x, w)));
    let comps = o.components_without(c);
    let lows: Vec<&BTreeSet<Vertex>> = comps.iter().filter(|k| touches(k, 1)).collect();
    let highs: Vec<&BTreeSet<Vertex>> = comps.iter().filter(|k| touches(k, 3)).collect();
    if !(lows.len() == 1 && highs.len() == 1 && lows[0] != highs[0]) {
        return false;
    }
    let rest: BTreeSet<Vertex> = comps.iter().filter(|k| *k != lows[0]).flatten().copied().collect();
    match jordan_split(q, c) {
        Ok((lo, hi)) => lo.iter().collect::<BTreeSet<_>>() == *lows[0] && hi.iter().collect::<BTreeSet<_>>() == rest,
        Err(_) => false,
    }
}

/// Crossing indicator, leftmost minimality, Jordan split of the leftmost
/// crossing, gluing indicator and the explored-quad gluing indicator, on all
/// `2^|Q°|` configurations.
pub fn compare_all(q: &Quad) -> Mismatches {
    let o = OracleQuad::of(q);
    let k = o.interior.len();
    let crossings = o.crossings();
    let masks: Vec<u32> = crossings.iter().map(|c| o.mask_of(c.iter().copied())).collect();
    let regions: Vec<BTreeSet<Vertex>> = crossings.iter().map(|c| o.region_below(c)).collect();
    let dual_masks: Vec<u32> = o.dual().crossings().iter().map(|c| o.mask_of(c.iter().copied())).collect();
    let mut jordan_cache: HashMap<usize, bool> = HashMap::new();
    let mut m = Mismatches::default();
    for mask in 0u32..1 << k {
        m.configs += 1;
        let config = config_of(q, &o, mask);
        let positive: Vec<usize> = (0..masks.len()).filter(|&i| masks[i] & mask == masks[i]).collect();

        let found = find_crossing(&config, q, 1).unwrap();
        m.crossed += u64::from(found.is_some());
        let valid = found
            .as_ref()
            .is_none_or(|c| c.iter().all(|&x| config.sign(x) == 1) && validate_crossing(q, c).is_ok());
        if found.is_some() != !positive.is_empty() || !valid {
            m.crossing += 1;
        }

        let glued = dual_masks.iter().any(|&d| d & mask == d);
        m.glued += u64::from(glued);
        if is_glued(&config, q).unwrap() != glued {
            m.gluing += 1;
        }

        match leftmost_crossing(&config, q).unwrap() {
            None => m.leftmost += u64::from(!positive.is_empty()),
            Some(c) => {
                let Some(idx) = crossings.iter().position(|d| *d == c).filter(|i| positive.contains(i)) else {
                    m.leftmost += 1;
                    continue;
                };
                if !positive.iter().all(|&i| regions[idx].is_subset(&regions[i])) {
                    m.leftmost += 1;
                }
                if !*jordan_cache.entry(idx).or_insert_with(|| jordan_agrees(q, &o, &c)) {
                    m.jordan += 1;
                }
                let pos = |x: Vertex| config.sign(x) == 1;
                if explored_quad_glued(&config, q, &c).unwrap() != oracle_explored_glued(&o, &c, &pos) {
                    m.explored += 1;
                }
            }
        }
    }
    m
}
