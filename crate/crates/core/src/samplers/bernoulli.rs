use rand::Rng;

use super::FieldSampler;
use crate::error::{Error, Result};
use crate::lattice::Window;
use crate::rng::chacha;
use crate::topology::Configuration;

/// Independent signs, `+1` with probability `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bernoulli {
    p: f64,
}

impl Bernoulli {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param(format!("bernoulli p={p} outside [0, 1]")));
        }
        Ok(Bernoulli { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn draw(&self, window: &Window, seed: u64, flip: bool) -> Configuration {
        let mut rng = chacha(seed);
        let signs = (0..window.len())
            .map(|_| {
                let u: f64 = rng.random();
                let u = if flip { 1.0 - u } else { u };
                if u < self.p {
                    1
                } else {
                    -1
                }
            })
            .collect();
        Configuration::new(*window, signs).expect("signs are ±1")
    }
}

impl FieldSampler for Bernoulli {
    fn sample(&self, window: &Window, seed: u64) -> Result<Configuration> {
        Ok(self.draw(window, seed, false))
    }

    fn sample_antithetic(&self, window: &Window, seed: u64) -> Result<Configuration> {
        Ok(self.draw(window, seed, true))
    }

    fn finite_range(&self) -> Option<u32> {
        Some(0)
    }
}
