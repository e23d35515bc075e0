use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::lattice::{Annulus, LatticeSpec, Vertex, Window};
use crate::par::{try_map_indices, Execution};
use crate::rng::{replica_seed, substream};
use crate::samplers::FieldSampler;
use crate::topology::{find_crossing, surrounds_annulus, Configuration, Quad};

/// A Monte Carlo frequency or mean with its standard error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub metadata: Map<String, Value>,
}

impl MCEstimate {
    /// Frequency of `hits` among `n` indicators, `stderr = √(p(1-p)/n)`.
    pub fn from_counts(hits: u64, n: u64, seed: u64) -> Self {
        let (value, stderr) = if n == 0 {
            (f64::NAN, f64::NAN)
        } else {
            let p = hits as f64 / n as f64;
            (p, (p * (1.0 - p) / n as f64).sqrt())
        };
        MCEstimate { value, stderr, n_samples: n, seed, metadata: Map::new() }
    }

    /// Sample mean with the sample standard deviation over `√n`.
    pub fn from_samples(xs: &[f64], seed: u64) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        MCEstimate { value: mean, stderr: (var / n).sqrt(), n_samples: xs.len() as u64, seed, metadata: Map::new() }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.metadata.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }
}

/// Replica count, master seed and execution mode of an estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McSettings {
    pub reps: usize,
    pub seed: u64,
    #[serde(default)]
    pub exec: Execution,
}

impl McSettings {
    pub fn new(reps: usize, seed: u64) -> Self {
        McSettings { reps, seed, exec: Execution::default() }
    }

    pub fn with_exec(self, exec: Execution) -> Self {
        McSettings { exec, ..self }
    }

    /// Same settings on an independent seed stream.
    pub fn stream(self, tag: u64) -> Self {
        McSettings { seed: substream(self.seed, tag), ..self }
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.reps == 0 {
            Err(Error::param("reps must be at least 1"))
        } else {
            Ok(())
        }
    }
}

/// Runs `f` on one configuration per replica and counts the `true` results.
pub fn frequency(
    sampler: &dyn FieldSampler,
    window: &Window,
    s: &McSettings,
    f: impl Fn(&Configuration) -> Result<bool> + Sync + Send,
) -> Result<MCEstimate> {
    s.check()?;
    let hits = try_map_indices(s.exec, s.reps, |i| {
        let config = sampler.sample(window, replica_seed(s.seed, i as u64))?;
        f(&config)
    })?;
    let k = hits.iter().filter(|&&h| h).count() as u64;
    Ok(MCEstimate::from_counts(k, s.reps as u64, s.seed))
}

/// `π(q)`: frequency of a positive crossing of `q`.
pub fn estimate_pi(sampler: &dyn FieldSampler, q: &Quad, s: &McSettings) -> Result<MCEstimate> {
    frequency(sampler, q.window(), s, |c| Ok(find_crossing(c, q, 1)?.is_some()))
}

/// Integer side length for a fractional multiple of `n`: rounded up, then up
/// to the next even number so that rescaled rectangles keep their parity.
pub fn even_ceil(x: f64) -> u32 {
    let k = x.ceil() as u32;
    k + (k & 1)
}

/// `m_n = π(𝓡_{3n/4, n}) ∧ π(𝓡_{n/2, n/2+4})`.
pub fn estimate_m(sampler: &dyn FieldSampler, spec: LatticeSpec, n: u32, s: &McSettings) -> Result<MCEstimate> {
    if n < 8 {
        return Err(Error::param(format!("m_n needs n >= 8, got {n}")));
    }
    let wide = Quad::rectangle(spec, even_ceil(0.75 * f64::from(n)), n)?;
    let square = Quad::rectangle(spec, n / 2, n / 2 + 4)?;
    let a = estimate_pi(sampler, &wide, &s.stream(1))?;
    let b = estimate_pi(sampler, &square, &s.stream(2))?;
    let value = a.value.min(b.value);
    let stderr = a.stderr.hypot(b.stderr);
    Ok(MCEstimate { value, stderr, n_samples: s.reps as u64, seed: s.seed, metadata: Map::new() }
        .with("pi_wide", &a)
        .with("pi_almost_square", &b))
}

/// Window needed by [`estimate_m`].
pub fn m_window(n: u32) -> Window {
    let a = even_ceil(0.75 * f64::from(n)).max(n / 2) as i32;
    Window { x0: 0, y0: 0, x1: a, y1: n as i32 }
}

/// `ψ(n)`: frequency of a positive circuit in `A(n, 2n)` around the origin.
pub fn estimate_psi(sampler: &dyn FieldSampler, spec: LatticeSpec, n: u32, s: &McSettings) -> Result<MCEstimate> {
    let annulus = Annulus::new(Vertex::new(0, 0), n, 2 * n)?;
    frequency(sampler, &annulus.window(), s, |c| surrounds_annulus(&spec, c, &annulus, 1))
}
