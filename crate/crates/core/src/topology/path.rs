use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, Vertex};

/// A path whose vertices are adjacent exactly when they are consecutive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StronglySimplePath(Vec<Vertex>);

impl StronglySimplePath {
    pub fn new(spec: &LatticeSpec, vertices: Vec<Vertex>) -> Result<Self> {
        check(spec, &vertices, false)?;
        Ok(StronglySimplePath(vertices))
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Vertex> {
        self.0
    }
}

fn check(spec: &LatticeSpec, path: &[Vertex], circuit: bool) -> Result<()> {
    let k = path.len();
    if k == 0 {
        return Err(Error::NotStronglySimple("empty path".into()));
    }
    if circuit && k < 4 {
        return Err(Error::NotStronglySimple(format!("circuit of length {k}")));
    }
    let mut index = HashMap::with_capacity(k);
    for (i, &v) in path.iter().enumerate() {
        if let Some(j) = index.insert(v, i) {
            return Err(Error::NotStronglySimple(format!(
                "vertex {v:?} repeated at {j} and {i}"
            )));
        }
    }
    for (i, &v) in path.iter().enumerate() {
        if i + 1 < k && !spec.adjacent(v, path[i + 1]) {
            return Err(Error::NotStronglySimple(format!(
                "step {i} from {v:?} to {:?} is not an edge",
                path[i + 1]
            )));
        }
        for w in spec.neighbors(v) {
            if let Some(&j) = index.get(&w) {
                let gap = i.abs_diff(j);
                let consecutive = gap == 1 || (circuit && gap == k - 1);
                if !consecutive {
                    return Err(Error::NotStronglySimple(format!(
                        "chord between positions {i} and {j}"
                    )));
                }
            }
        }
    }
    if circuit && !spec.adjacent(path[k - 1], path[0]) {
        return Err(Error::NotStronglySimple("circuit does not close".into()));
    }
    Ok(())
}

/// `γ_i ~ γ_j` iff `|i - j| = 1`, and no vertex repeats.
pub fn is_strongly_simple(spec: &LatticeSpec, path: &[Vertex]) -> bool {
    check(spec, path, false).is_ok()
}

/// Same with indices taken modulo the length.
pub fn is_strongly_simple_circuit(spec: &LatticeSpec, circuit: &[Vertex]) -> bool {
    check(spec, circuit, true).is_ok()
}

/// Strong loop-erasure.
///
/// Keeps the first vertex, then repeatedly jumps to the furthest later
/// vertex adjacent to the current one. Before each jump the current position
/// moves to the last visit of the current vertex, so walks that revisit
/// vertices are also erased to a strongly simple path. The output starts at
/// `walk[0]`, ends at the last vertex of the walk, uses only walk vertices,
/// and is the identity on strongly simple input.
pub fn loop_erase(spec: &LatticeSpec, walk: &[Vertex]) -> Vec<Vertex> {
    if walk.is_empty() {
        return Vec::new();
    }
    let mut last: HashMap<Vertex, usize> = HashMap::with_capacity(walk.len());
    for (i, &v) in walk.iter().enumerate() {
        last.insert(v, i);
    }
    let end = walk.len() - 1;
    let mut out = vec![walk[0]];
    let mut l = last[&walk[0]];
    while l < end {
        let cur = walk[l];
        let mut next = l + 1;
        for &(dx, dy) in spec.neighbor_offsets(cur) {
            if let Some(&j) = last.get(&cur.offset(dx, dy)) {
                if j > next {
                    next = j;
                }
            }
        }
        out.push(walk[next]);
        l = next;
    }
    out
}
