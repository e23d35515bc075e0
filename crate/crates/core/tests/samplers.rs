use std::collections::HashMap;

use nalgebra::DVector;
use rswlab_core::samplers::gaussian::covariance_matrix;
use rswlab_core::samplers::ising::{GibbsChain, Patch};
use rswlab_core::samplers::special::bessel_j0;
use rswlab_core::samplers::{
    ising_exact_gibbs, Bernoulli, CoarseMixture, FieldSampler, GaussianSampler, IsingCftp, Kernel, KernelSpec,
};
use rswlab_core::{LatticeSpec, Vertex, Window};

const UJ: LatticeSpec = LatticeSpec::union_jack();

/// 0.999 quantiles of the χ² law, from scipy.stats.chi2.ppf.
const CHI2_999_DF15: f64 = 37.69729821835383;
const CHI2_999_DF49: f64 = 85.35056460859305;

#[test]
fn j0_matches_reference_values() {
    // scipy.special.j0
    let table = [
        (0.5, 0.938469807240813),
        (1.0, 0.7651976865579665),
        (5.0, -0.1775967713143383),
        (8.0, 0.1716508071375539),
        (12.0, 0.04768931079683335),
        (20.0, 0.16702466434058322),
        (50.0, 0.055812327669252086),
    ];
    for (x, want) in table {
        assert!((bessel_j0(x) - want).abs() < 1e-14, "J0({x}) = {} vs {want}", bessel_j0(x));
    }
    assert!(bessel_j0(2.404825557695773).abs() < 1e-14);
}

#[test]
fn whitened_gaussian_samples_are_chi_square() {
    let w = Window::centered(3);
    for spec in [KernelSpec::Iid, KernelSpec::Power { c: 1.0, d: 3.0 }] {
        let kernel = Kernel::from_spec(&spec).unwrap();
        let g = GaussianSampler::new(&kernel, w).unwrap();
        let chol = covariance_matrix(&kernel, &w).unwrap().cholesky().unwrap();
        let reps = 400;
        let mut total = 0.0;
        let mut exceed = 0;
        for seed in 0..reps {
            let x = DVector::from_vec(g.sample_values(seed, false));
            let q = x.dot(&chol.solve(&x));
            total += q;
            exceed += usize::from(q > CHI2_999_DF49);
        }
        let mean = total / reps as f64;
        // Var χ²_49 = 98.
        assert!((mean - 49.0).abs() < 3.0 * (98.0 / reps as f64).sqrt(), "{spec:?}: mean {mean}");
        assert!(exceed <= 3, "{spec:?}: {exceed} exceedances");
    }
}

#[test]
fn empirical_covariance_follows_kernel() {
    let kernel = Kernel::from_spec(&KernelSpec::J0).unwrap();
    let w = Window::new(0, 0, 3, 0).unwrap();
    let g = GaussianSampler::new(&kernel, w).unwrap();
    let reps = 20_000;
    let mut acc = [0.0; 4];
    for seed in 0..reps {
        let x = g.sample_values(seed, false);
        for d in 0..4 {
            acc[d] += x[0] * x[d];
        }
    }
    for (d, a) in acc.iter().enumerate() {
        let want = bessel_j0(d as f64);
        // Var(X0 Xd) = 1 + K² <= 2.
        assert!((a / reps as f64 - want).abs() < 3.0 * (2.0 / reps as f64).sqrt(), "lag {d}");
    }
}

#[test]
fn every_sampler_is_deterministic_and_antithetic() {
    let w = Window::centered(5);
    let g = GaussianSampler::new(&Kernel::from_spec(&KernelSpec::J0).unwrap(), w).unwrap();
    let samplers: Vec<Box<dyn FieldSampler>> = vec![
        Box::new(Bernoulli::new(0.5).unwrap()),
        Box::new(CoarseMixture::new(0.4, 3).unwrap()),
        Box::new(IsingCftp::new(UJ, -0.01, 0.01, 6).unwrap()),
        Box::new(g),
    ];
    for (k, s) in samplers.iter().enumerate() {
        for seed in [0, 1, u64::MAX] {
            let a = s.sample(&w, seed).unwrap();
            assert_eq!(a, s.sample(&w, seed).unwrap(), "sampler {k}");
            assert_eq!(s.sample_antithetic(&w, seed).unwrap(), a.negated(), "sampler {k}");
        }
    }
}

#[test]
fn coarse_mixture_block_correlation() {
    let (u, m) = (0.6, 4);
    let f = CoarseMixture::new(u, m).unwrap();
    let w = Window::new(0, 0, 7, 7).unwrap();
    let reps = 20_000;
    let (mut same_block, mut other_block, mut plus) = (0u32, 0u32, 0u32);
    for seed in 0..reps {
        let c = f.sample(&w, seed).unwrap();
        same_block += u32::from(c.sign(Vertex::new(0, 0)) == c.sign(Vertex::new(3, 3)));
        other_block += u32::from(c.sign(Vertex::new(3, 3)) == c.sign(Vertex::new(4, 4)));
        plus += u32::from(c.sign(Vertex::new(5, 2)) == 1);
    }
    let n = f64::from(reps as u32);
    let tol = 3.0 * (0.25 / n).sqrt();
    // Both vertices read the block sign with probability u², otherwise a fair comparison.
    assert!((f64::from(same_block) / n - (0.5 + u * u / 2.0)).abs() < tol);
    assert!((f64::from(other_block) / n - 0.5).abs() < tol);
    assert!((f64::from(plus) / n - 0.5).abs() < tol);
    assert_eq!(f.finite_range(), Some(m - 1));
}

/// Index of a 2x2 pattern as a 4-bit number.
fn pattern(spin: impl Fn(Vertex) -> i8) -> usize {
    let cells = [(0, 0), (1, 0), (0, 1), (1, 1)];
    cells
        .iter()
        .enumerate()
        .fold(0, |k, (j, &(x, y))| k | usize::from(spin(Vertex::new(x, y)) == 1) << j)
}

#[test]
fn cftp_agrees_with_glauber_chain_on_a_small_patch() {
    // Both chains at the strongest admissible coupling for β₀ = 0.015.
    let beta = -0.015;
    let cftp = IsingCftp::new(UJ, beta, 0.015, 14).unwrap();
    let reps = 20_000;
    let cells: Vec<Vertex> = [(0, 0), (1, 0), (0, 1), (1, 1)].iter().map(|&(x, y)| Vertex::new(x, y)).collect();
    let mut a = [0u32; 16];
    for seed in 0..reps {
        let d = cftp.draw(&cells, seed, false);
        a[pattern(|v| d.spins[cells.iter().position(|&c| c == v).unwrap()])] += 1;
    }
    let mut chain = GibbsChain::new(UJ, Window::centered(20), beta, 7);
    for _ in 0..50 {
        chain.sweep();
    }
    let mut b = [0u32; 16];
    for _ in 0..reps {
        chain.sweep();
        b[pattern(|v| chain.spin(v))] += 1;
    }
    // Two-sample χ² homogeneity test with 15 degrees of freedom.
    let stat: f64 = (0..16)
        .filter(|&k| a[k] + b[k] > 0)
        .map(|k| f64::from(a[k] as i32 - b[k] as i32).powi(2) / f64::from(a[k] + b[k]))
        .sum();
    assert!(stat < CHI2_999_DF15, "χ² = {stat}");
}

#[test]
fn exact_gibbs_two_site_law() {
    // Two adjacent free spins, no boundary: P(σ₀ = σ₁) = e^β / (e^β + e^{-β}).
    let beta = 0.3;
    let vs = [Vertex::new(0, 0), Vertex::new(1, 0)];
    let g = ising_exact_gibbs(&UJ, &vs, beta, &HashMap::new()).unwrap();
    let same = g.probs[0] + g.probs[3];
    assert!((same - beta.exp() / (2.0 * beta.cosh())).abs() < 1e-15);
}

#[test]
fn patch_boundary_pulls_free_spins() {
    // A strong ferromagnetic coupling to an all-plus boundary.
    let free = vec![Vertex::new(0, 0)];
    let boundary: HashMap<Vertex, i8> = UJ.neighbors(Vertex::new(0, 0)).into_iter().map(|v| (v, 1)).collect();
    let cftp = IsingCftp::new(UJ, 0.015, 0.015, 10).unwrap();
    let patch = Patch { free: free.clone(), boundary: boundary.clone() };
    let exact = ising_exact_gibbs(&UJ, &free, 0.015, &boundary).unwrap();
    let reps = 40_000;
    let plus = (0..reps).filter(|&s| cftp.draw_patch(&patch, s, false).spins[0] == 1).count();
    let p = plus as f64 / reps as f64;
    let want = exact.probs[1];
    assert!((p - want).abs() < 3.0 * (want * (1.0 - want) / reps as f64).sqrt(), "{p} vs {want}");
}
