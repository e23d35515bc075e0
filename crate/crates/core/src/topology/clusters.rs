use std::collections::VecDeque;

use super::config::Configuration;
use crate::lattice::{LatticeSpec, Vertex};

/// Component labels of same-sign clusters, indexed like the configuration.
pub fn sign_clusters(spec: &LatticeSpec, config: &Configuration) -> (Vec<u32>, usize) {
    let win = *config.window();
    let mut label = vec![u32::MAX; win.len()];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for s in 0..win.len() {
        if label[s] != u32::MAX {
            continue;
        }
        let sign = config.sign_at(s);
        label[s] = next;
        queue.push_back(s);
        while let Some(i) = queue.pop_front() {
            let u = win.vertex(i);
            for &(dx, dy) in spec.neighbor_offsets(u) {
                if let Some(j) = win.index(u.offset(dx, dy)) {
                    if label[j] == u32::MAX && config.sign_at(j) == sign {
                        label[j] = next;
                        queue.push_back(j);
                    }
                }
            }
        }
        next += 1;
    }
    (label, next as usize)
}

/// Vertices of the largest cluster of the given sign (ties go to the
/// cluster met first in row-major order).
pub fn largest_cluster(spec: &LatticeSpec, config: &Configuration, sign: i8) -> Vec<Vertex> {
    let (label, count) = sign_clusters(spec, config);
    let mut sizes = vec![0usize; count];
    for (i, &l) in label.iter().enumerate() {
        if config.sign_at(i) == sign {
            sizes[l as usize] += 1;
        }
    }
    let Some((best, &size)) = sizes
        .iter()
        .enumerate()
        .max_by_key(|&(i, &s)| (s, std::cmp::Reverse(i)))
    else {
        return Vec::new();
    };
    if size == 0 {
        return Vec::new();
    }
    let win = *config.window();
    (0..win.len())
        .filter(|&i| label[i] as usize == best)
        .map(|i| win.vertex(i))
        .collect()
}
