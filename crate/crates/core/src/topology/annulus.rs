use std::collections::VecDeque;

use super::config::Configuration;
use crate::error::{Error, Result};
use crate::lattice::{Annulus, LatticeSpec, Vertex};

/// Signed number of times the edge `u -> w` crosses the half-line
/// `{(t, -1/2) : t > 0}` (coordinates relative to the center).
#[inline]
fn ray_crossing(u: (i32, i32), w: (i32, i32)) -> i32 {
    if u.0 + w.0 <= 0 {
        0
    } else if u.1 == -1 && w.1 == 0 {
        1
    } else if u.1 == 0 && w.1 == -1 {
        -1
    } else {
        0
    }
}

/// Whether the vertices of sign `sign` in the closed annulus contain a
/// circuit winding around the center.
///
/// Two independent detectors are run and must agree:
/// a winding search that lifts each sign cluster to the universal cover
/// (a cluster containing a cycle of nonzero winding contains a strongly
/// simple surrounding circuit), and the dual test that no path of the
/// opposite sign joins the inner square to the outer square. Disagreement
/// is reported as an error rather than resolved.
pub fn surrounds_annulus(
    spec: &LatticeSpec,
    config: &Configuration,
    annulus: &Annulus,
    sign: i8,
) -> Result<bool> {
    let win = annulus.window();
    if !config.covers(&win) {
        return Err(Error::OutsideWindow(format!("annulus {annulus:?}")));
    }
    let c = annulus.center;
    let inside = |v: Vertex| annulus.contains(v);
    let cw = *config.window();
    let sign_of = |v: Vertex| config.sign_at(cw.index_unchecked(v));

    // Winding detector.
    let mut sheet = vec![i32::MIN; win.len()];
    let mut winding = false;
    let mut queue = VecDeque::new();
    'outer: for s in 0..win.len() {
        let sv = win.vertex(s);
        if sheet[s] != i32::MIN || !inside(sv) || sign_of(sv) != sign {
            continue;
        }
        sheet[s] = 0;
        queue.clear();
        queue.push_back(sv);
        while let Some(u) = queue.pop_front() {
            let su = sheet[win.index_unchecked(u)];
            for &(dx, dy) in spec.neighbor_offsets(u) {
                let w = u.offset(dx, dy);
                if !inside(w) || sign_of(w) != sign {
                    continue;
                }
                let lift = su + ray_crossing((u.x - c.x, u.y - c.y), (w.x - c.x, w.y - c.y));
                let j = win.index_unchecked(w);
                if sheet[j] == i32::MIN {
                    sheet[j] = lift;
                    queue.push_back(w);
                } else if sheet[j] != lift {
                    winding = true;
                    break 'outer;
                }
            }
        }
    }

    // Dual detector: an opposite-sign path from the inner to the outer square.
    let mut seen = vec![false; win.len()];
    queue.clear();
    for v in win.vertices() {
        if v.norm_inf_from(c) == annulus.inner && sign_of(v) == -sign {
            seen[win.index_unchecked(v)] = true;
            queue.push_back(v);
        }
    }
    let mut blocked = true;
    while let Some(u) = queue.pop_front() {
        if u.norm_inf_from(c) == annulus.outer {
            blocked = false;
            break;
        }
        for &(dx, dy) in spec.neighbor_offsets(u) {
            let w = u.offset(dx, dy);
            if inside(w) && sign_of(w) == -sign {
                let j = win.index_unchecked(w);
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(w);
                }
            }
        }
    }

    if winding != blocked {
        return Err(Error::DetectorDisagreement {
            center: (c.x, c.y),
            inner: annulus.inner,
            outer: annulus.outer,
        });
    }
    Ok(winding)
}

/// A path traverses the annulus when it meets both `|v - c| <= r` and `|v - c| >= R`.
pub fn traverses(path: &[Vertex], annulus: &Annulus) -> bool {
    let c = annulus.center;
    path.iter().any(|v| v.norm_inf_from(c) <= annulus.inner)
        && path.iter().any(|v| v.norm_inf_from(c) >= annulus.outer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Window;

    const UJ: LatticeSpec = LatticeSpec::union_jack();

    #[test]
    fn ring_of_plus_surrounds() {
        let a = Annulus::new(Vertex::new(0, 0), 2, 4).unwrap();
        let cfg = Configuration::from_fn(Window::centered(4), |v| {
            if v.norm_inf_from(Vertex::new(0, 0)) == 3 {
                1
            } else {
                -1
            }
        });
        assert!(surrounds_annulus(&UJ, &cfg, &a, 1).unwrap());
        // The minus squares at radius 2 and 4 surround as well.
        assert!(surrounds_annulus(&UJ, &cfg, &a, -1).unwrap());
        let holed = Configuration::from_fn(Window::centered(4), |v| {
            if v.x == 0 && v.y > 0 {
                -1
            } else {
                1
            }
        });
        assert!(!surrounds_annulus(&UJ, &holed, &a, 1).unwrap());
        assert!(!surrounds_annulus(&UJ, &holed, &a, -1).unwrap());
    }

    #[test]
    fn broken_ring_does_not_surround() {
        let a = Annulus::new(Vertex::new(0, 0), 2, 4).unwrap();
        let cfg = Configuration::from_fn(Window::centered(4), |v| {
            if v.norm_inf_from(Vertex::new(0, 0)) == 3 && v.x != 3 {
                1
            } else {
                -1
            }
        });
        assert!(!surrounds_annulus(&UJ, &cfg, &a, 1).unwrap());
        assert!(surrounds_annulus(&UJ, &cfg.negated(), &a, -1).is_ok());
    }
}
