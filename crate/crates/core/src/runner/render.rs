use std::io::Write;

use crate::lattice::{LatticeSpec, Window};
use crate::topology::{largest_cluster, Configuration};

const WHITE: [u8; 3] = [255, 255, 255];
const BLACK: [u8; 3] = [0, 0, 0];
const RED: [u8; 3] = [220, 30, 30];

/// Binary PPM, one pixel per vertex, `y` increasing upwards. Positive
/// vertices are white, negative black, and the largest positive cluster
/// red when `highlight` is set.
pub fn write_ppm(out: &mut impl Write, spec: &LatticeSpec, config: &Configuration, highlight: bool) -> std::io::Result<()> {
    let win: Window = *config.window();
    let mut red = vec![false; win.len()];
    if highlight {
        for v in largest_cluster(spec, config, 1) {
            red[win.index_unchecked(v)] = true;
        }
    }
    write!(out, "P6\n{} {}\n255\n", win.width(), win.height())?;
    let mut buf = Vec::with_capacity(3 * win.len());
    for y in (win.y0..=win.y1).rev() {
        for x in win.x0..=win.x1 {
            let i = win.index_unchecked(crate::lattice::Vertex::new(x, y));
            let px = if red[i] {
                RED
            } else if config.sign_at(i) > 0 {
                WHITE
            } else {
                BLACK
            };
            buf.extend_from_slice(&px);
        }
    }
    out.write_all(&buf)
}
