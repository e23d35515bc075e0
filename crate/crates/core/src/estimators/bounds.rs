//! Closed-form bounds and the constants of the bootstrap argument.
//!
//! Most of these numbers are far outside the range of `f64` (think
//! `2^{-1396}`), so they are carried as a sign and a base-2 logarithm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `sign * 2^log2_abs`; `sign == 0` is the value zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Log2Value {
    pub sign: i8,
    pub log2_abs: f64,
}

impl Log2Value {
    pub const ZERO: Log2Value = Log2Value { sign: 0, log2_abs: f64::NEG_INFINITY };

    pub fn pos(log2_abs: f64) -> Self {
        Log2Value { sign: 1, log2_abs }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Log2Value { sign: if x > 0.0 { 1 } else { -1 }, log2_abs: x.abs().log2() }
        }
    }

    /// Nearest `f64`; underflows to `±0` and overflows to `±inf`.
    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.log2_abs.exp2()
        }
    }

    pub fn neg(self) -> Self {
        Log2Value { sign: -self.sign, ..self }
    }

    pub fn add(self, other: Log2Value) -> Self {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (big, small) = if self.log2_abs >= other.log2_abs { (self, other) } else { (other, self) };
        let t = (small.log2_abs - big.log2_abs).exp2();
        if big.sign == small.sign {
            Log2Value { sign: big.sign, log2_abs: big.log2_abs + t.ln_1p() / std::f64::consts::LN_2 }
        } else if t == 1.0 {
            Self::ZERO
        } else {
            Log2Value { sign: big.sign, log2_abs: big.log2_abs + (-t).ln_1p() / std::f64::consts::LN_2 }
        }
    }

    pub fn sub(self, other: Log2Value) -> Self {
        self.add(other.neg())
    }

    /// `max(self, 0)`.
    pub fn positive_part(self) -> Self {
        if self.sign > 0 {
            self
        } else {
            Self::ZERO
        }
    }
}

/// Parameters of the closed-form crossing and gluing bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RswBound {
    /// `π(𝓡_{ρn,n}) >= 4^9/m^17 (m²/4)^{24ρ} - 2304 ρ² (β̂/m)^{1/2}`.
    Svlr { m: f64, beta_hat: f64, rho: f64 },
    /// `ψ(n) >= m^700/2^696 - 9 β̂^{1/2}`.
    Annulus { m: f64, beta_hat: f64 },
    /// Gluing exponent `(m^700/2^696 - 9 β̂^{1/2} - 2 β̂₁ - 2 β̂₂)_+`.
    SurrExponent {
        m: f64,
        beta_hat: f64,
        #[serde(default)]
        beta_l1: f64,
        #[serde(default)]
        beta_l1_4r: f64,
    },
    /// `β(r, R) <= (8r/R)^{2^{-1397}}`.
    Godzilla { r: f64, big_r: f64 },
}

/// Value of a bound. Bounds indistinguishable from 1 in `f64` are given by
/// their base-2 logarithm instead.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundValue {
    Value(Log2Value),
    Log2Of(Log2Value),
}

impl BoundValue {
    pub fn to_f64(self) -> f64 {
        match self {
            BoundValue::Value(v) => v.to_f64(),
            BoundValue::Log2Of(l) => l.to_f64().exp2(),
        }
    }
}

fn check_m(m: f64) -> Result<()> {
    if m > 0.0 && m <= 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("m={m} must lie in (0, 1]")))
    }
}

fn check_beta(name: &str, b: f64) -> Result<()> {
    if b >= 0.0 && b.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("{name}={b} must be finite and nonnegative")))
    }
}

/// `m^700 / 2^696`.
fn annulus_main(m: f64) -> Log2Value {
    Log2Value::pos(700.0 * m.log2() - 696.0)
}

pub fn rsw_bound(bound: &RswBound) -> Result<BoundValue> {
    match *bound {
        RswBound::Svlr { m, beta_hat, rho } => {
            check_m(m)?;
            check_beta("beta_hat", beta_hat)?;
            if !(rho >= 0.75) {
                return Err(Error::param(format!("rho={rho} must be at least 3/4")));
            }
            let lm = m.log2();
            let main = Log2Value::pos(18.0 - 17.0 * lm + 24.0 * rho * (2.0 * lm - 2.0));
            let err = Log2Value::from_f64(2304.0 * rho * rho * (beta_hat / m).sqrt());
            Ok(BoundValue::Value(main.sub(err)))
        }
        RswBound::Annulus { m, beta_hat } => {
            check_m(m)?;
            check_beta("beta_hat", beta_hat)?;
            Ok(BoundValue::Value(annulus_main(m).sub(Log2Value::from_f64(9.0 * beta_hat.sqrt()))))
        }
        RswBound::SurrExponent { m, beta_hat, beta_l1, beta_l1_4r } => {
            check_m(m)?;
            check_beta("beta_hat", beta_hat)?;
            check_beta("beta_l1", beta_l1)?;
            check_beta("beta_l1_4r", beta_l1_4r)?;
            let err = 9.0 * beta_hat.sqrt() + 2.0 * beta_l1 + 2.0 * beta_l1_4r;
            Ok(BoundValue::Value(annulus_main(m).sub(Log2Value::from_f64(err)).positive_part()))
        }
        RswBound::Godzilla { r, big_r } => {
            if !(r > 0.0 && big_r > r) {
                return Err(Error::param(format!("need 0 < r < R, got r={r}, R={big_r}")));
            }
            // log2 of the bound is 2^{-1397} log2(8r/R).
            let l = (8.0 * r / big_r).log2();
            let log2_bound =
                if l == 0.0 { Log2Value::ZERO } else { Log2Value { sign: if l > 0.0 { 1 } else { -1 }, log2_abs: l.abs().log2() - 1397.0 } };
            Ok(BoundValue::Log2Of(log2_bound))
        }
    }
}

/// `ρ_k = 2/3 + 2^k / 12`, the widths of the doubling sequence
/// `ρ₀ = 3/4`, `ρ_{k+1} = 2ρ_k - 2/3`.
pub fn rho_k(k: u32) -> f64 {
    2.0 / 3.0 + f64::from(k).exp2() / 12.0
}

/// Constants of the one-step bootstrap for a field with
/// `θ(n, ℓ) <= C n^α ℓ^{-β}`.
///
/// `λ*` is at least `2^1398` and `N` is a power tower beyond it, so both are
/// stored through logarithms: `log2_lambda_star = log₂ λ*` and
/// `log2_log2_n = log₂ log₂ N(λ*)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConstants {
    pub eta: f64,
    pub c: f64,
    pub epsilon: f64,
    pub nu: f64,
    pub log2_lambda_star: f64,
    pub log2_log2_n: f64,
    pub log2_log2_n_bar: f64,
}

impl BootstrapConstants {
    /// `η > 0`, `c > 1 + η`, `2ε + η < 1`, `ν > 0`.
    pub fn sign_conditions(&self) -> [bool; 4] {
        [self.eta > 0.0, self.c > 1.0 + self.eta, 2.0 * self.epsilon + self.eta < 1.0, self.nu > 0.0]
    }
}

/// `log₂ log₂ N(λ, ε, η)` for `N = (16^1402 λ^4)^{λ/(1-2ε-η)}`.
fn log2_log2_n(log2_lambda: f64, gap: f64) -> f64 {
    log2_lambda - gap.log2() + (4.0 * 1402.0 + 4.0 * log2_lambda).log2()
}

pub fn bootstrap_constants(big_c: f64, alpha: f64, beta: f64) -> Result<BootstrapConstants> {
    if !(big_c > 0.0) {
        return Err(Error::param(format!("C={big_c} must be positive")));
    }
    if !(alpha > 0.0) {
        return Err(Error::param(format!("alpha={alpha} must be positive")));
    }
    if !(beta > 2.0 * alpha) {
        return Err(Error::param(format!("need beta > 2 alpha, got alpha={alpha}, beta={beta}")));
    }
    let eta = (1.0 - (2.0 * alpha / beta).cbrt()) / 3.0;
    let c = 1.0 / ((1.0 + eta) * (1.0 - 2.0 * eta).powi(2));
    let epsilon = 0.5 - eta;
    let nu = epsilon * beta - alpha * c * (1.0 + eta);
    let log2_lambda_star = (4.0 * big_c).log2().max((4.0 * (1.0 + eta) / nu).log2()).max(1398.0);
    // 1 - 2ε - η simplifies to η; computing it directly loses every digit
    // when η is tiny.
    let gap = eta;
    let ln = log2_log2_n(log2_lambda_star, gap);
    let tripled = log2_log2_n(log2_lambda_star + 3f64.log2(), gap);
    let four_thirds = log2_lambda_star - eta.log2() + (4.0f64 / 3.0).log2().log2();
    Ok(BootstrapConstants {
        eta,
        c,
        epsilon,
        nu,
        log2_lambda_star,
        log2_log2_n: ln,
        log2_log2_n_bar: tripled.max(four_thirds),
    })
}

/// Decorrelation bounds for the two model families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decorrelation {
    /// `C n² e^{-cℓ}` with `c = -½ ln(N tanh(β₀ N))`.
    Ising { degree: u32, beta0: f64, prefactor: f64, n: u32, ell: u32 },
    /// `16 n_T^{6/5} n^{12/5} δ_K^{1/5}`.
    Gaussian { n_t: u32, n: u32, delta_k: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecorrelationBound {
    /// Exponential rate `c` (Ising only).
    pub rate: Option<f64>,
    pub bound: f64,
}

/// `16 n_T^{6/5} n^{12/5} δ^{1/5}`.
pub fn gaussian_theta_bound(n_t: u32, n: u32, delta_k: f64) -> f64 {
    16.0 * f64::from(n_t).powf(1.2) * f64::from(n).powf(2.4) * delta_k.powf(0.2)
}

pub fn decorrelation_bound(d: &Decorrelation) -> Result<DecorrelationBound> {
    match *d {
        Decorrelation::Ising { degree, beta0, prefactor, n, ell } => {
            let nn = f64::from(degree);
            let rate = -0.5 * (nn * (beta0 * nn).tanh()).ln();
            if !(rate > 0.0) {
                return Err(Error::param(format!("N tanh(β₀N) = {} is not below 1", nn * (beta0 * nn).tanh())));
            }
            let bound = prefactor * f64::from(n).powi(2) * (-rate * f64::from(ell)).exp();
            Ok(DecorrelationBound { rate: Some(rate), bound })
        }
        Decorrelation::Gaussian { n_t, n, delta_k } => {
            check_beta("delta_k", delta_k)?;
            Ok(DecorrelationBound { rate: None, bound: gaussian_theta_bound(n_t, n, delta_k) })
        }
    }
}
