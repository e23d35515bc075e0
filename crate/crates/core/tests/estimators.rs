use proptest::prelude::*;
use rswlab_core::estimators::{
    beta_hat, bootstrap_constants, decorrelation_bound, estimate_beta, estimate_pi, estimate_psi, estimate_theta,
    rho_k, rsw_bound, BetaFamily, BoundValue, Coupling, Decorrelation, Log2Value, McSettings, RswBound,
};
use rswlab_core::par::Execution;
use rswlab_core::samplers::{Bernoulli, IsingCftp, Kernel, KernelSpec};
use rswlab_core::{LatticeSpec, Quad};

const UJ: LatticeSpec = LatticeSpec::union_jack();

fn coin() -> Bernoulli {
    Bernoulli::new(0.5).unwrap()
}

#[test]
fn parallel_and_sequential_estimates_are_identical() {
    let q = Quad::rectangle(UJ, 8, 10).unwrap();
    let s = McSettings::new(500, 11);
    let par = estimate_pi(&coin(), &q, &s.with_exec(Execution::Parallel)).unwrap();
    let seq = estimate_pi(&coin(), &q, &s.with_exec(Execution::Sequential)).unwrap();
    assert_eq!(par, seq);
    assert_eq!(par.value.to_bits(), seq.value.to_bits());

    let fam = BetaFamily::annulus(UJ, 2, 8, 16).unwrap();
    let s = McSettings::new(200, 3);
    assert_eq!(
        estimate_beta(&coin(), &fam, &s.with_exec(Execution::Parallel)).unwrap(),
        estimate_beta(&coin(), &fam, &s.with_exec(Execution::Sequential)).unwrap()
    );
}

#[test]
fn psi_regression() {
    // Frozen from this implementation; guards against silent changes in
    // the circuit detectors or the replica seeding.
    let est = estimate_psi(&coin(), UJ, 2, &McSettings::new(4000, 2024)).unwrap();
    assert_eq!((est.value, est.n_samples), (0.00225, 4000));
}

#[test]
fn beta_hat_decreases_with_the_aspect_ratio() {
    let s = McSettings::new(600, 9);
    let est: Vec<_> = [2u32, 4, 8]
        .iter()
        .map(|&r| estimate_beta(&coin(), &BetaFamily::annulus(UJ, r, 16, 32).unwrap(), &s).unwrap())
        .collect();
    for w in est.windows(2) {
        // r grows, R/r shrinks, β̂ must not decrease (up to noise).
        let tol = 3.0 * w[0].stderr.hypot(w[1].stderr);
        assert!(w[0].value <= w[1].value + tol, "{} vs {}", w[0].value, w[1].value);
    }
    assert!(est[0].value < est[2].value);
}

#[test]
fn beta_hat_is_trivial_at_degenerate_scales() {
    let b = beta_hat(&coin(), UJ, 0, 2, 8, &McSettings::new(10, 0)).unwrap();
    assert_eq!(b.value, 1.0);
    assert!(b.metadata.contains_key("trivial"));
}

#[test]
fn identical_couplings_never_disagree() {
    let model = IsingCftp::new(UJ, -0.01, 0.01, 4).unwrap();
    let c = Coupling::IsingDepth { model, depth_a: 5, depth_b: 5 };
    let est = estimate_theta(&c, 4, &McSettings::new(50, 1)).unwrap();
    assert_eq!(est.value, 0.0);

    let iid = Coupling::GaussianTruncation { kernel: Kernel::from_spec(&KernelSpec::Iid).unwrap(), d: 1, n_t: 4 };
    let est = estimate_theta(&iid, 3, &McSettings::new(50, 1)).unwrap();
    assert_eq!(est.value, 0.0);
}

#[test]
fn annulus_bound_at_half() {
    let v = rsw_bound(&RswBound::Annulus { m: 0.5, beta_hat: 0.0 }).unwrap();
    assert_eq!(v, BoundValue::Value(Log2Value::pos(-1396.0)));
    // Any positive β̂ swamps the main term.
    let v = rsw_bound(&RswBound::Annulus { m: 0.5, beta_hat: 1e-6 }).unwrap();
    assert!((v.to_f64() + 9e-3).abs() < 1e-15);
}

#[test]
fn svlr_and_surrounding_exponent() {
    // 4^9 / m^17 (m²/4)^{24ρ} at m = 1, ρ = 3/4 is 2^18 / 2^36.
    let v = rsw_bound(&RswBound::Svlr { m: 1.0, beta_hat: 0.0, rho: 0.75 }).unwrap();
    assert_eq!(v, BoundValue::Value(Log2Value::pos(-18.0)));
    let v = rsw_bound(&RswBound::SurrExponent { m: 1.0, beta_hat: 0.0, beta_l1: 0.1, beta_l1_4r: 0.0 }).unwrap();
    assert_eq!(v.to_f64(), 0.0);
    assert!(rsw_bound(&RswBound::Svlr { m: 0.5, beta_hat: 0.0, rho: 0.5 }).is_err());
    assert!(rsw_bound(&RswBound::Annulus { m: 0.0, beta_hat: 0.0 }).is_err());
}

#[test]
fn godzilla_bound_log_form() {
    // (8r/R)^{2^{-1397}} with 8r/R = 1/4: log₂ = -2 · 2^{-1397} = -2^{-1396}.
    let BoundValue::Log2Of(l) = rsw_bound(&RswBound::Godzilla { r: 1.0, big_r: 32.0 }).unwrap() else {
        panic!("expected log form");
    };
    assert_eq!((l.sign, l.log2_abs), (-1, -1396.0));
    assert_eq!(rsw_bound(&RswBound::Godzilla { r: 2.0, big_r: 16.0 }).unwrap(), BoundValue::Log2Of(Log2Value::ZERO));
}

#[test]
fn rho_doubling() {
    assert_eq!(rho_k(0), 0.75);
    assert!((rho_k(3) - (2.0 / 3.0 + 8.0 / 12.0)).abs() < 1e-15);
}

#[test]
fn gaussian_instantiation_constants() {
    // α = 12/5, β = D/5 with D = 25; values frozen from a direct evaluation.
    let k = bootstrap_constants(1.0, 2.4, 5.0).unwrap();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
    assert!(close(k.eta, 0.004505056755937338));
    assert!(close(k.c, 1.0136999567756357));
    assert!(close(k.epsilon, 0.4954949432440627));
    assert!(close(k.nu, 0.033634557945750654));
    assert_eq!(k.log2_lambda_star, 1398.0);
    assert!(close(k.log2_log2_n, 1419.2454501148745));
    assert!(close(k.log2_log2_n_bar, 1420.8312290336687));
    assert_eq!(k.sign_conditions(), [true; 4]);
    assert!(bootstrap_constants(1.0, 2.0, 4.0).is_err());
}

#[test]
fn decorrelation_rates() {
    let d = decorrelation_bound(&Decorrelation::Ising { degree: 8, beta0: 0.01, prefactor: 1.0, n: 4, ell: 10 }).unwrap();
    let rate = d.rate.unwrap();
    // -½ ln(8 tanh 0.08), scipy/numpy reference.
    assert!((rate - 0.22420862795284005).abs() < 1e-15);
    assert!((d.bound - 16.0 * (-10.0 * rate).exp()).abs() < 1e-12);
    assert!(decorrelation_bound(&Decorrelation::Ising { degree: 8, beta0: 0.02, prefactor: 1.0, n: 4, ell: 1 }).is_err());

    let g = |n, delta_k| decorrelation_bound(&Decorrelation::Gaussian { n_t: 4, n, delta_k }).unwrap().bound;
    assert_eq!(g(8, 0.0), 0.0);
    // Power kernel δ_K(d) = c d^{-D}: bound ∝ n^{12/5} d^{-D/5}.
    assert!((g(16, 1e-10) / g(8, 1e-10) - 2f64.powf(2.4)).abs() < 1e-12);
    assert!((g(8, 2f64.powi(-25)) / g(8, 1.0) - 2f64.powi(-5)).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn bootstrap_sign_conditions(alpha in 0.01f64..10.0, excess in 1e-3f64..20.0, big_c in 0.1f64..1e6) {
        let beta = 2.0 * alpha + excess;
        let k = bootstrap_constants(big_c, alpha, beta).unwrap();
        prop_assert_eq!(k.sign_conditions(), [true; 4], "{:?}", k);
    }
}
