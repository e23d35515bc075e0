//! Random sign fields on windows of the lattice.
//!
//! Every sampler is a deterministic function of `(window, seed)`, and
//! supports antithetic draws that flip every sign of the symmetric models.

mod bernoulli;
mod coarse;
pub mod gaussian;
pub mod ising;
pub mod kernel;
pub mod special;

pub use bernoulli::Bernoulli;
pub use coarse::CoarseMixture;
pub use gaussian::{shifted_truncation, truncation_coupling, CouplingReport, GaussianSampler};
pub use ising::{
    ising_conditional_prob, ising_exact_gibbs, ising_q, ExactGibbs, IsingCftp, IsingDraw,
};
pub use kernel::{Kernel, KernelSpec};

use crate::error::Result;
use crate::lattice::Window;
use crate::topology::Configuration;

/// A law on `{-1, 1}^V` that can be sampled on any window it supports.
pub trait FieldSampler: Send + Sync {
    fn sample(&self, window: &Window, seed: u64) -> Result<Configuration>;

    /// Same draw with the underlying randomness reflected. For laws symmetric
    /// under global sign flip this returns `-sample(window, seed)`.
    fn sample_antithetic(&self, window: &Window, seed: u64) -> Result<Configuration>;

    /// Range of dependence: signs at distance more than this are independent.
    fn finite_range(&self) -> Option<u32> {
        None
    }
}
