//! Monte Carlo estimates of crossing, surrounding, gluing and coupling
//! probabilities, the closed-form bounds they feed, and inequality checks.

pub mod beta;
pub mod bounds;
pub mod inequality;
pub mod mc;
pub mod theta;

pub use beta::{estimate_beta, BetaFamily};
pub use bounds::{
    bootstrap_constants, decorrelation_bound, gaussian_theta_bound, rho_k, rsw_bound, BootstrapConstants, BoundValue,
    Decorrelation, DecorrelationBound, Log2Value, RswBound,
};
pub use inequality::{
    beta_hat, check_chain, check_long_to_annulus, check_rect_to_l, check_rect_to_long, check_square_to_annulus,
    check_square_to_long, InequalityReport, RectToL, VIOLATION_SIGMAS,
};
pub use mc::{estimate_m, estimate_pi, estimate_psi, even_ceil, frequency, m_window, McSettings, MCEstimate};
pub use theta::{estimate_theta, Coupling};
