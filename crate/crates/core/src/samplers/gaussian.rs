//! Centered Gaussian fields with unit variance, and the truncation coupling
//! between a covariance matrix and its thresholded, diagonally shifted copy.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::kernel::Kernel;
use super::FieldSampler;
use crate::error::{Error, Result};
use crate::lattice::Window;
use crate::par::{map_indices, Execution};
use crate::rng::{chacha, replica_seed, substream};
use crate::topology::Configuration;

/// Largest window (in vertices) a dense Cholesky factor is built for.
pub const MAX_GAUSSIAN_VERTICES: usize = 4096;

const JITTERS: [f64; 4] = [0.0, 1e-12, 1e-11, 1e-10];

/// Lower Cholesky factor of `a + jitter I`, escalating the jitter up to 1e-10.
pub fn cholesky_with_jitter(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    for &j in &JITTERS {
        let mut m = a.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += j;
        }
        if let Some(c) = m.cholesky() {
            return Ok((c.l(), j));
        }
    }
    Err(Error::NotPositiveDefinite {
        jitter: JITTERS[JITTERS.len() - 1],
    })
}

/// Sampler for the stationary Gaussian field with a given kernel on a fixed window.
#[derive(Clone, Debug)]
pub struct GaussianSampler {
    window: Window,
    chol: DMatrix<f64>,
    jitter: f64,
}

impl GaussianSampler {
    pub fn new(kernel: &Kernel, window: Window) -> Result<Self> {
        let cov = covariance_matrix(kernel, &window)?;
        let (chol, jitter) = cholesky_with_jitter(&cov)?;
        Ok(GaussianSampler {
            window,
            chol,
            jitter,
        })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Diagonal jitter that was needed for the factorization.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn sample_values(&self, seed: u64, flip: bool) -> Vec<f64> {
        let mut rng = chacha(seed);
        let n = self.window.len();
        let xi = DVector::from_iterator(
            n,
            (0..n).map(|_| {
                let z: f64 = rng.sample(StandardNormal);
                if flip {
                    -z
                } else {
                    z
                }
            }),
        );
        (&self.chol * xi).iter().copied().collect()
    }

    fn draw(&self, window: &Window, seed: u64, flip: bool) -> Result<Configuration> {
        if !self.window.contains_window(window) {
            return Err(Error::OutsideWindow(format!(
                "{window:?} (sampler built for {:?})",
                self.window
            )));
        }
        let (full, ties) = Configuration::from_values(self.window, self.sample_values(seed, flip))?;
        if ties > 0 {
            return Err(Error::SignTie { ties });
        }
        if *window == self.window {
            Ok(full)
        } else {
            full.crop(window)
        }
    }
}

impl FieldSampler for GaussianSampler {
    fn sample(&self, window: &Window, seed: u64) -> Result<Configuration> {
        self.draw(window, seed, false)
    }

    fn sample_antithetic(&self, window: &Window, seed: u64) -> Result<Configuration> {
        self.draw(window, seed, true)
    }
}

/// Covariance matrix of the field on `window` in window index order.
pub fn covariance_matrix(kernel: &Kernel, window: &Window) -> Result<DMatrix<f64>> {
    let n = window.len();
    if n > MAX_GAUSSIAN_VERTICES {
        return Err(Error::param(format!("window has {n} vertices; the dense Gaussian sampler is capped at {MAX_GAUSSIAN_VERTICES}")));
    }
    let (w, h) = (window.width(), window.height());
    let table = kernel.offset_table(w, h)?;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let (a, b) = (window.vertex(i), window.vertex(j));
        let dx = (a.x - b.x).unsigned_abs() as usize;
        let dy = (a.y - b.y).unsigned_abs() as usize;
        table[dy * w + dx]
    }))
}

/// `T_{δ,ε}(A)`: entries with `|a_ij| <= δ` are set to zero and `ε` is added
/// to the diagonal.
pub fn shifted_truncation(a: &DMatrix<f64>, delta: f64, eps: f64) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| {
        let v = a[(i, j)];
        let kept = if v.abs() > delta { v } else { 0.0 };
        kept + if i == j { eps } else { 0.0 }
    })
}

/// Outcome of the coupling `X ~ N(0, A)`, `Z = X + E`, `Y ~ N(0, B)`.
#[derive(Clone, Debug, Serialize)]
pub struct CouplingReport {
    pub n: usize,
    pub delta: f64,
    pub eps: f64,
    /// `3 n^{6/5} δ^{1/5}`.
    pub guarantee: f64,
    /// Fraction of samples where `sign X ≠ sign Y` somewhere.
    pub disagreement: f64,
    pub disagreement_stderr: f64,
    /// Fraction of samples where `sign X ≠ sign Z` somewhere.
    pub noise_disagreement: f64,
    /// Mean of `|{i : x_i z_i <= 0}|`.
    pub mean_flipped: f64,
    pub mean_flipped_stderr: f64,
    /// `2 n ε^{1/3}`.
    pub flipped_bound: f64,
    /// Pinsker bound `½ √(tr C⁻¹B − ln det C⁻¹B − n)` with `C = A + εI`.
    pub pinsker: f64,
    /// `n^{3/2} δ^{1/2} ε^{-1/2}`, meaningful when `ε >= 2 n² δ`.
    pub pinsker_envelope: f64,
    pub envelope_applies: bool,
    /// Smallest eigenvalue of `B` and the floor `ε - nδ`.
    pub min_eigenvalue: f64,
    pub eigenvalue_floor: f64,
    /// `max |λ - 1|` over eigenvalues of `C⁻¹B`, and the bound `n²δ/ε`.
    pub max_eigen_deviation: f64,
    pub gershgorin_bound: f64,
    /// Samples where the residual rejection loop hit its cap.
    pub residual_fallbacks: usize,
    pub n_samples: usize,
}

fn log_density_quadratic(l: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    // -½ xᵀ(LLᵀ)⁻¹x - Σ ln L_ii (the 2π terms cancel in ratios).
    let y = l.solve_lower_triangular(x).expect("nonsingular factor");
    -0.5 * y.norm_squared() - (0..l.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>()
}

fn normal_vector(rng: &mut impl Rng, n: usize) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

const RESIDUAL_CAP: usize = 1_000_000;

/// Couples `X ~ N(0, A)` with `Y ~ N(0, T_{δ,ε}(A))`, `ε = (nδ)^{3/5}`.
///
/// `Z = X + E` with independent `E ~ N(0, ε I)` has law `N(0, A + εI)`;
/// `Y` is obtained from `Z` by the maximal coupling of the two Gaussian
/// laws, so `P(Y ≠ Z)` is their total variation distance.
pub fn truncation_coupling(
    a: &DMatrix<f64>,
    delta: f64,
    reps: usize,
    seed: u64,
    exec: Execution,
) -> Result<CouplingReport> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::param("covariance must be a nonempty square matrix"));
    }
    if (0..n).any(|i| (a[(i, i)] - 1.0).abs() > 1e-12) {
        return Err(Error::param("covariance must have unit diagonal"));
    }
    let nf = n as f64;
    if !(delta > 0.0 && delta < 1.0 / nf) {
        return Err(Error::param(format!(
            "threshold δ={delta} must lie in (0, 1/n) with n={n}"
        )));
    }
    let eps = (nf * delta).powf(0.6);
    let b = shifted_truncation(a, delta, eps);
    let chol_b = b
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite { jitter: 0.0 })?
        .l();
    let (chol_a, _) = cholesky_with_jitter(a)?;
    let mut c = a.clone();
    for i in 0..n {
        c[(i, i)] += eps;
    }
    let chol_c = c
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite { jitter: 0.0 })?
        .l();

    // Spectrum of C^{-1/2} B C^{-1/2}, similar to C⁻¹B.
    let lb = chol_c.solve_lower_triangular(&b).expect("nonsingular");
    let m = chol_c
        .solve_lower_triangular(&lb.transpose())
        .expect("nonsingular");
    let m = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(m).eigenvalues;
    let trace: f64 = eig.iter().sum();
    let logdet: f64 = eig.iter().map(|l| l.ln()).sum();
    let pinsker = 0.5 * (trace - logdet - nf).max(0.0).sqrt();
    let max_dev = eig.iter().map(|l| (l - 1.0).abs()).fold(0.0, f64::max);
    let min_eig = SymmetricEigen::new(b.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);

    let outcomes = map_indices(exec, reps, |r| {
        let mut rng = chacha(replica_seed(seed, r as u64));
        let x = &chol_a * normal_vector(&mut rng, n);
        let e = normal_vector(&mut rng, n) * eps.sqrt();
        let z = &x + e;
        let lp = log_density_quadratic(&chol_c, &z);
        let lq = log_density_quadratic(&chol_b, &z);
        let u: f64 = rng.random();
        let mut fallback = false;
        let y = if u.ln() <= (lq - lp).min(0.0) {
            z.clone()
        } else {
            // Residual (q - p)_+ by rejection from q.
            let mut res_rng = chacha(substream(replica_seed(seed, r as u64), 1));
            let mut found = None;
            for _ in 0..RESIDUAL_CAP {
                let cand = &chol_b * normal_vector(&mut res_rng, n);
                let lp_c = log_density_quadratic(&chol_c, &cand);
                let lq_c = log_density_quadratic(&chol_b, &cand);
                let accept = 1.0 - (lp_c - lq_c).min(0.0).exp();
                if res_rng.random::<f64>() < accept {
                    found = Some(cand);
                    break;
                }
            }
            found.unwrap_or_else(|| {
                fallback = true;
                &chol_b * normal_vector(&mut res_rng, n)
            })
        };
        let sign = |v: f64| v > 0.0;
        let flipped = (0..n).filter(|&i| x[i] * z[i] <= 0.0).count();
        let xz = (0..n).any(|i| sign(x[i]) != sign(z[i]));
        let xy = (0..n).any(|i| sign(x[i]) != sign(y[i]));
        (xy, xz, flipped, fallback)
    });

    let reps_f = reps as f64;
    let dis = outcomes.iter().filter(|o| o.0).count() as f64 / reps_f;
    let noise = outcomes.iter().filter(|o| o.1).count() as f64 / reps_f;
    let mean_flip = outcomes.iter().map(|o| o.2 as f64).sum::<f64>() / reps_f;
    let var_flip = outcomes
        .iter()
        .map(|o| (o.2 as f64 - mean_flip).powi(2))
        .sum::<f64>()
        / (reps_f - 1.0).max(1.0);
    Ok(CouplingReport {
        n,
        delta,
        eps,
        guarantee: 3.0 * nf.powf(1.2) * delta.powf(0.2),
        disagreement: dis,
        disagreement_stderr: (dis * (1.0 - dis) / reps_f).sqrt(),
        noise_disagreement: noise,
        mean_flipped: mean_flip,
        mean_flipped_stderr: (var_flip / reps_f).sqrt(),
        flipped_bound: 2.0 * nf * eps.powf(1.0 / 3.0),
        pinsker,
        pinsker_envelope: nf.powf(1.5) * delta.sqrt() / eps.sqrt(),
        envelope_applies: eps >= 2.0 * nf * nf * delta,
        min_eigenvalue: min_eig,
        eigenvalue_floor: eps - nf * delta,
        max_eigen_deviation: max_dev,
        gershgorin_bound: nf * nf * delta / eps,
        residual_fallbacks: outcomes.iter().filter(|o| o.3).count(),
        n_samples: reps,
    })
}
