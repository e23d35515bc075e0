use rand::Rng;

use super::FieldSampler;
use crate::error::{Error, Result};
use crate::lattice::Window;
use crate::rng::chacha;
use crate::topology::Configuration;

/// Mixture of fair Bernoulli signs and block-constant fair signs.
///
/// The window is cut into `n_meso x n_meso` blocks starting at its lower-left
/// corner (block of `v` is `⌊(v - corner) / n_meso⌋`); each block gets one
/// fair sign, each vertex an independent fair sign, and an independent
/// Bernoulli(`u`) per vertex chooses the block sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoarseMixture {
    u: f64,
    n_meso: u32,
}

impl CoarseMixture {
    pub fn new(u: f64, n_meso: u32) -> Result<Self> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::param(format!("mixture weight u={u} outside [0, 1]")));
        }
        if n_meso == 0 {
            return Err(Error::param("block side must be at least 1"));
        }
        Ok(CoarseMixture { u, n_meso })
    }

    fn draw(&self, window: &Window, seed: u64, flip: bool) -> Configuration {
        let mut rng = chacha(seed);
        let n = self.n_meso as usize;
        let bw = window.width().div_ceil(n);
        let bh = window.height().div_ceil(n);
        let fair = |rng: &mut rand_chacha::ChaCha8Rng| -> i8 {
            let s = if rng.random::<bool>() { 1 } else { -1 };
            if flip {
                -s
            } else {
                s
            }
        };
        let blocks: Vec<i8> = (0..bw * bh).map(|_| fair(&mut rng)).collect();
        let signs = (0..window.len())
            .map(|i| {
                let (col, row) = (i % window.width(), i / window.width());
                let pick_block = rng.random::<f64>() < self.u;
                let own = fair(&mut rng);
                if pick_block {
                    blocks[(row / n) * bw + col / n]
                } else {
                    own
                }
            })
            .collect();
        Configuration::new(*window, signs).expect("signs are ±1")
    }
}

impl FieldSampler for CoarseMixture {
    fn sample(&self, window: &Window, seed: u64) -> Result<Configuration> {
        Ok(self.draw(window, seed, false))
    }

    fn sample_antithetic(&self, window: &Window, seed: u64) -> Result<Configuration> {
        Ok(self.draw(window, seed, true))
    }

    /// Signs at sup-distance at least `n_meso` never share a block.
    fn finite_range(&self) -> Option<u32> {
        Some(self.n_meso - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_weight_is_block_constant() {
        let w = Window::centered(3);
        let c = CoarseMixture::new(1.0, 7).unwrap().sample(&w, 4).unwrap();
        let first = c.signs()[0];
        assert!(c.signs().iter().all(|&s| s == first));
    }

    #[test]
    fn blocks_follow_the_corner() {
        let w = Window::centered(3);
        let c = CoarseMixture::new(1.0, 2).unwrap().sample(&w, 11).unwrap();
        for v in w.vertices() {
            let bx = (v.x + 3).div_euclid(2) * 2 - 3;
            let by = (v.y + 3).div_euclid(2) * 2 - 3;
            assert_eq!(c.sign(v), c.sign(crate::lattice::Vertex::new(bx, by)));
        }
    }
}
