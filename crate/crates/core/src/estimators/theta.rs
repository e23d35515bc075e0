use serde::Serialize;

use super::bounds::gaussian_theta_bound;
use super::mc::{McSettings, MCEstimate};
use crate::error::{Error, Result};
use crate::lattice::Window;
use crate::par::map_indices;
use crate::rng::replica_seed;
use crate::samplers::gaussian::covariance_matrix;
use crate::samplers::{truncation_coupling, IsingCftp, Kernel};

/// A coupling of two fields on `Λ_n` under which disagreement is observable.
#[derive(Clone, Debug)]
pub enum Coupling {
    /// The same backward exploration cut at two depths.
    IsingDepth { model: IsingCftp, depth_a: u32, depth_b: u32 },
    /// A Gaussian field against its covariance truncated below `δ_K(d)`.
    GaussianTruncation { kernel: Kernel, d: u32, n_t: u32 },
}

#[derive(Clone, Debug, Serialize)]
struct VertexRate {
    value: f64,
    stderr: f64,
    bound: f64,
}

/// `θ̂`: frequency over replicas of some sign disagreement on `Λ_n` between
/// the two coupled fields, an upper-bound sample for the total variation
/// distance of their restrictions.
pub fn estimate_theta(coupling: &Coupling, box_n: u32, s: &McSettings) -> Result<MCEstimate> {
    s.check()?;
    let window = Window::centered(box_n);
    match coupling {
        Coupling::IsingDepth { model, depth_a, depth_b } => {
            let a = model.with_depth(*depth_a);
            let b = model.with_depth(*depth_b);
            let targets: Vec<_> = window.vertices().collect();
            let per_rep = map_indices(s.exec, s.reps, |i| {
                let seed = replica_seed(s.seed, i as u64);
                let x = a.draw(&targets, seed, false);
                let y = if depth_a == depth_b { x.clone() } else { b.draw(&targets, seed, false) };
                x.spins.iter().zip(&y.spins).filter(|(u, v)| u != v).count()
            });
            let any = per_rep.iter().filter(|&&k| k > 0).count() as u64;
            let fractions: Vec<f64> = per_rep.iter().map(|&k| k as f64 / targets.len() as f64).collect();
            let rate = MCEstimate::from_samples(&fractions, s.seed);
            let vertex_bound = model.branching().powi((*depth_a).min(*depth_b) as i32);
            Ok(MCEstimate::from_counts(any, s.reps as u64, s.seed)
                .with("vertices", targets.len())
                .with("union_bound", targets.len() as f64 * vertex_bound)
                .with("vertex_rate", VertexRate { value: rate.value, stderr: rate.stderr, bound: vertex_bound }))
        }
        Coupling::GaussianTruncation { kernel, d, n_t } => {
            let a = covariance_matrix(kernel, &window)?;
            let delta = kernel.sup_beyond(*d, 4 * (*d).max(box_n))?;
            let bound = gaussian_theta_bound(*n_t, box_n, delta);
            if delta == 0.0 {
                // Nothing is truncated and no noise is added: the fields coincide.
                return Ok(MCEstimate::from_counts(0, s.reps as u64, s.seed).with("delta_k", 0.0).with("bound", 0.0));
            }
            if delta >= 1.0 / window.len() as f64 {
                return Err(Error::param(format!(
                    "δ_K({d}) = {delta:.3e} is not below 1/|Λ_{box_n}|; the coupling bound {bound:.3e} is vacuous"
                )));
            }
            let report = truncation_coupling(&a, delta, s.reps, s.seed, s.exec)?;
            Ok(MCEstimate {
                value: report.disagreement,
                stderr: report.disagreement_stderr,
                n_samples: s.reps as u64,
                seed: s.seed,
                metadata: Default::default(),
            }
            .with("delta_k", delta)
            .with("bound", bound)
            .with("coupling", &report))
        }
    }
}
