mod common;

use common::{oracle_strongly_simple, uj_adjacent};
use proptest::prelude::*;
use rswlab_core::lattice::Symmetry;
use rswlab_core::samplers::{Bernoulli, FieldSampler};
use rswlab_core::topology::{is_strongly_simple, loop_erase, surrounds_annulus};
use rswlab_core::{Annulus, Configuration, LatticeSpec, Vertex, Window};

const UJ: LatticeSpec = LatticeSpec::union_jack();

fn vertex_in(n: i32) -> impl Strategy<Value = Vertex> {
    (-n..=n, -n..=n).prop_map(|(x, y)| Vertex::new(x, y))
}

/// Nearest-neighbour walk from a random start, clamped to `Λ_n`.
fn walk_in(n: i32, max_len: usize) -> impl Strategy<Value = Vec<Vertex>> {
    (vertex_in(n), prop::collection::vec(0usize..8, 0..max_len)).prop_map(move |(start, steps)| {
        let mut walk = vec![start];
        for s in steps {
            let u = *walk.last().unwrap();
            let nb = UJ.neighbors(u);
            let w = nb[s % nb.len()];
            if w.x.abs() <= n && w.y.abs() <= n {
                walk.push(w);
            }
        }
        walk
    })
}

#[test]
fn adjacency_matches_definition_and_symmetries() {
    let w = Window::centered(4);
    for a in w.vertices() {
        assert_eq!(UJ.degree(a), if (a.x + a.y) % 2 == 0 { 8 } else { 4 });
        for b in w.vertices() {
            assert_eq!(UJ.adjacent(a, b), uj_adjacent(a, b), "{a:?} {b:?}");
            assert_eq!(UJ.adjacent(a, b), UJ.adjacent(b, a));
            for s in Symmetry::ALL {
                assert_eq!(UJ.adjacent(a, b), UJ.adjacent(s.apply(a), s.apply(b)), "{s:?}");
            }
            for (px, py) in UJ.periods() {
                assert_eq!(UJ.adjacent(a, b), UJ.adjacent(a.offset(px, py), b.offset(px, py)));
            }
        }
    }
}

proptest! {
    #[test]
    fn strong_simplicity_matches_brute_force(path in prop::collection::vec(vertex_in(3), 1..=5)) {
        prop_assert_eq!(is_strongly_simple(&UJ, &path), oracle_strongly_simple(&path));
    }

    #[test]
    fn loop_erasure_is_strongly_simple(walk in walk_in(3, 40)) {
        let erased = loop_erase(&UJ, &walk);
        prop_assert!(oracle_strongly_simple(&erased));
        prop_assert_eq!(erased[0], walk[0]);
        prop_assert_eq!(erased.last(), walk.last());
        prop_assert!(erased.iter().all(|v| walk.contains(v)));
    }

    #[test]
    fn loop_erasure_fixes_strongly_simple_paths(walk in walk_in(3, 8)) {
        if oracle_strongly_simple(&walk) {
            prop_assert_eq!(loop_erase(&UJ, &walk), walk);
        }
    }
}

#[test]
fn annulus_detectors_agree_and_respect_symmetry() {
    let a = Annulus::new(Vertex::new(0, 0), 2, 6).unwrap();
    let w = a.window();
    let mut seen = [0usize; 2];
    for (k, p) in [0.35, 0.5, 0.65].into_iter().enumerate() {
        let f = Bernoulli::new(p).unwrap();
        for seed in 0..3400u64 {
            let config = f.sample(&w, seed * 3 + k as u64).unwrap();
            // Errors if the winding and dual-path detectors disagree.
            let plus = surrounds_annulus(&UJ, &config, &a, 1).unwrap();
            let minus = surrounds_annulus(&UJ, &config, &a, -1).unwrap();
            assert!(!(plus && minus), "both signs surround");
            seen[usize::from(plus)] += 1;
            let rotated = Configuration::from_fn(w, |v| config.sign(Symmetry::Rot270.apply(v)));
            assert_eq!(surrounds_annulus(&UJ, &rotated, &a, 1).unwrap(), plus);
            let flipped = Configuration::from_fn(w, |v| config.sign(Symmetry::ReflectX.apply(v)));
            assert_eq!(surrounds_annulus(&UJ, &flipped, &a, 1).unwrap(), plus);
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}
