//! One-scale checks of the crossing inequalities, with every probability
//! replaced by its Monte Carlo estimate.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::beta::{estimate_beta, BetaFamily};
use super::bounds::{rsw_bound, RswBound};
use super::mc::{estimate_m, estimate_pi, estimate_psi, even_ceil, McSettings, MCEstimate};
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, Vertex};
use crate::samplers::FieldSampler;
use crate::topology::Quad;

/// Margins below `-VIOLATION_SIGMAS` combined standard errors are flagged.
pub const VIOLATION_SIGMAS: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub lhs_stderr: f64,
    pub rhs: f64,
    pub rhs_stderr: f64,
    /// `lhs - rhs`.
    pub margin: f64,
    pub combined_stderr: f64,
    pub violated: bool,
    /// Whether the scale hypotheses of the inequality hold. The inequality is
    /// checked either way.
    pub hypotheses_met: bool,
    pub terms: Map<String, Value>,
}

/// Standard error of `f(x)` by a central finite difference of width one
/// standard error in each coordinate, clamped to `[0, 1]`.
fn propagate(f: &dyn Fn(&[f64]) -> f64, x: &[f64], se: &[f64]) -> f64 {
    let mut var = 0.0;
    for i in 0..x.len() {
        let (mut up, mut down) = (x.to_vec(), x.to_vec());
        up[i] = (x[i] + se[i]).min(1.0);
        down[i] = (x[i] - se[i]).max(0.0);
        let d = (f(&up) - f(&down)) / 2.0;
        if d.is_finite() {
            var += d * d;
        }
    }
    var.sqrt()
}

struct Builder {
    terms: Map<String, Value>,
}

impl Builder {
    fn new() -> Self {
        Builder { terms: Map::new() }
    }

    fn term(&mut self, name: &str, e: MCEstimate) -> MCEstimate {
        self.terms.insert(name.to_string(), serde_json::to_value(&e).unwrap_or(Value::Null));
        e
    }

    fn note(&mut self, name: &str, v: impl Serialize) {
        self.terms.insert(name.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    /// Report for `lhs >= f(rhs_terms)`.
    fn finish(
        self,
        name: &str,
        lhs: &MCEstimate,
        rhs_terms: &[&MCEstimate],
        f: &dyn Fn(&[f64]) -> f64,
        hypotheses_met: bool,
    ) -> InequalityReport {
        let x: Vec<f64> = rhs_terms.iter().map(|e| e.value).collect();
        let se: Vec<f64> = rhs_terms.iter().map(|e| e.stderr).collect();
        let rhs = f(&x);
        let rhs_stderr = propagate(f, &x, &se);
        let margin = lhs.value - rhs;
        let combined = lhs.stderr.hypot(rhs_stderr);
        InequalityReport {
            name: name.to_string(),
            lhs: lhs.value,
            lhs_stderr: lhs.stderr,
            rhs,
            rhs_stderr,
            margin,
            combined_stderr: combined,
            violated: margin < -VIOLATION_SIGMAS * combined,
            hypotheses_met,
            terms: self.terms,
        }
    }
}

/// `β̂(2ℓ, R, L)` over the annulus family. The inner radius is raised to 2,
/// the smallest for which the strips of the family are strongly simple. Scales with `R <= r`, or where no member of the family
/// exists, get the trivial value 1.
pub fn beta_hat(
    sampler: &dyn FieldSampler,
    spec: LatticeSpec,
    two_ell: u32,
    big_r: u32,
    ell: u32,
    s: &McSettings,
) -> Result<MCEstimate> {
    let r = two_ell.max(2);
    let trivial = |why: &str| {
        Ok(MCEstimate { value: 1.0, stderr: 0.0, n_samples: 0, seed: s.seed, metadata: Map::new() }
            .with("r", r)
            .with("R", big_r)
            .with("L", ell)
            .with("trivial", why))
    };
    if big_r <= r {
        return trivial("R <= r");
    }
    let family = BetaFamily::annulus(spec, r, big_r, ell.max(big_r))?;
    if family.members.is_empty() && family.recipes.is_empty() {
        return trivial("no quad of the family fits");
    }
    estimate_beta(sampler, &family, s)
}

/// Dimensions of the L-shaped union of `[0, L] x [0, l]` and `[L - l′, L] x [0, L′]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectToL {
    pub l: u32,
    #[serde(rename = "L")]
    pub big_l: u32,
    pub l_prime: u32,
    #[serde(rename = "L_prime")]
    pub big_l_prime: u32,
}

impl RectToL {
    /// `min(l/4, (L - l′)/2)`.
    pub fn delta(&self) -> f64 {
        (f64::from(self.l) / 4.0).min(f64::from(self.big_l.saturating_sub(self.l_prime)) / 2.0)
    }

    /// Failing dimension constraints for a field of range `ell`.
    pub fn violations(&self, ell: u32) -> Vec<String> {
        let RectToL { l, big_l, l_prime, big_l_prime } = *self;
        let mut out = Vec::new();
        if !(0 < l && l < big_l_prime) {
            out.push(format!("0 < l < L′ fails (l={l}, L′={big_l_prime})"));
        }
        if !(0 < l_prime && l_prime < big_l) {
            out.push(format!("0 < l′ < L fails (l′={l_prime}, L={big_l})"));
        }
        if big_l_prime > big_l {
            out.push(format!("L′ <= L fails (L′={big_l_prime}, L={big_l})"));
        }
        if !(f64::from(2 * ell) < self.delta()) {
            out.push(format!("2ℓ < min(l/4, (L - l′)/2) fails (ℓ={ell}, δ={})", self.delta()));
        }
        if l < 2 || l_prime < 2 {
            out.push("rectangles need width and height at least 2".into());
        }
        out
    }

    /// `(𝓡, 𝓡′, 𝓛)`.
    pub fn quads(&self, spec: LatticeSpec) -> Result<(Quad, Quad, Quad)> {
        let (l, big_l, lp, big_lp) = (self.l as i32, self.big_l as i32, self.l_prime as i32, self.big_l_prime as i32);
        let r = Quad::rect_at(spec, Vertex::new(0, 0), self.big_l, self.l)?;
        let r_prime = Quad::vertical_rect_at(spec, Vertex::new(big_l - lp, 0), self.l_prime, self.big_l_prime)?;
        let v = Vertex::new;
        let corners = [v(0, 0), v(big_l, 0), v(big_l, big_lp), v(big_l - lp, big_lp), v(big_l - lp, l), v(0, l)];
        let starts = [v(0, l), v(1, 0), v(big_l, big_lp), v(big_l - lp, big_lp - 1)];
        let ell = Quad::from_polygon(spec, &corners, starts)?;
        Ok((r, r_prime, ell))
    }
}

/// `π(𝓛) >= π(𝓡) π(𝓡′) - 2 β̂(2ℓ, δ, L)` for a field of range `ell`.
pub fn check_rect_to_l(
    sampler: &dyn FieldSampler,
    spec: LatticeSpec,
    dims: RectToL,
    ell: u32,
    s: &McSettings,
) -> Result<InequalityReport> {
    match sampler.finite_range() {
        Some(range) if range <= ell => {}
        Some(range) => return Err(Error::param(format!("sampler range {range} exceeds ℓ={ell}"))),
        None => return Err(Error::param("the rectangle-to-L check needs a finite-range sampler")),
    }
    let bad = dims.violations(ell);
    if !bad.is_empty() {
        return Err(Error::param(bad.join("; ")));
    }
    let (r, r_prime, l_quad) = dims.quads(spec)?;
    let mut b = Builder::new();
    let lhs = b.term("pi_L", estimate_pi(sampler, &l_quad, &s.stream(1))?);
    let pr = b.term("pi_R", estimate_pi(sampler, &r, &s.stream(2))?);
    let prp = b.term("pi_R_prime", estimate_pi(sampler, &r_prime, &s.stream(3))?);
    let beta = b.term("beta_hat", beta_hat(sampler, spec, 2 * ell, dims.delta().floor() as u32, dims.big_l, &s.stream(4))?);
    b.note("dims", dims);
    // With positive association the error term is not needed.
    b.note("rhs_beta_free", pr.value * prp.value);
    Ok(b.finish("rect_to_l", &lhs, &[&pr, &prp, &beta], &|x| x[0] * x[1] - 2.0 * x[2], true))
}

fn rect(spec: LatticeSpec, a: f64, b: u32) -> Result<Quad> {
    Quad::rectangle(spec, even_ceil(a), b)
}

/// `π(𝓡_{(2ρ-2/3)n, n}) >= ¼ π(𝓡_{ρn,n})² π(𝓡_{n/2,n/2+4}) - 4 β̂(2ℓ, n/8, 2ρn)`.
pub fn check_rect_to_long(
    sampler: &dyn FieldSampler,
    spec: LatticeSpec,
    n: u32,
    rho: f64,
    ell: u32,
    s: &McSettings,
) -> Result<InequalityReport> {
    let nf = f64::from(n);
    let mut b = Builder::new();
    let lhs = b.term("pi_long", estimate_pi(sampler, &rect(spec, (2.0 * rho - 2.0 / 3.0) * nf, n)?, &s.stream(1))?);
    let p = b.term("pi_rho", estimate_pi(sampler, &rect(spec, rho * nf, n)?, &s.stream(2))?);
    let sq = b.term("pi_almost_square", estimate_pi(sampler, &Quad::rectangle(spec, n / 2, n / 2 + 4)?, &s.stream(3))?);
    let beta = b.term("beta_hat", beta_hat(sampler, spec, 2 * ell, n / 8, even_ceil(2.0 * rho * nf), &s.stream(4))?);
    b.note("rho", rho);
    Ok(b.finish("rect_to_long", &lhs, &[&p, &sq, &beta], &|x| 0.25 * x[0] * x[0] * x[1] - 4.0 * x[2], n > 8 * ell + 24))
}

/// `π(𝓡_{ρn,n}) >= 4^9/m_n^17 (m_n²/4)^{24ρ} - 2304 ρ² (β̂(2ℓ, n/8, 2ρn)/m_n)^{1/2}`.
pub fn check_square_to_long(
    sampler: &dyn FieldSampler,
    spec: LatticeSpec,
    n: u32,
    rho: f64,
    ell: u32,
    s: &McSettings,
) -> Result<InequalityReport> {
    let nf = f64::from(n);
    let mut b = Builder::new();
    let lhs = b.term("pi_rho", estimate_pi(sampler, &rect(spec, rho * nf, n)?, &s.stream(1))?);
    let m = b.term("m_n", estimate_m(sampler, spec, n, &s.stream(2))?);
    let beta = b.term("beta_hat", beta_hat(sampler, spec, 2 * ell, n / 8, even_ceil(2.0 * rho * nf), &s.stream(3))?);
    if !(m.value > 0.0) {
        return Err(Error::param("m̂_n = 0: the bound is undefined"));
    }
    b.note("rho", rho);
    let f = move |x: &[f64]| {
        rsw_bound(&RswBound::Svlr { m: x[0].max(f64::MIN_POSITIVE), beta_hat: x[1], rho }).map_or(f64::NAN, |v| v.to_f64())
    };
    Ok(b.finish("square_to_long", &lhs, &[&m, &beta], &f, n > 8 * ell + 24))
}

/// `ψ(n) >= π(𝓡_{4n,n})^4 - 8 β̂(2ℓ, n/4, 4n)`.
pub fn check_long_to_annulus(
    sampler: &dyn FieldSampler,
    spec: LatticeSpec,
    n: u32,
    ell: u32,
    s: &McSettings,
) -> Result<InequalityReport> {
    let mut b = Builder::new();
    let lhs = b.term("psi", estimate_psi(sampler, spec, n, &s.stream(1))?);
    let p = b.term("pi_4n", estimate_pi(sampler, &Quad::rectangle(spec, 4 * n, n)?, &s.stream(2))?);
    let beta = b.term("beta_hat", beta_hat(sampler, spec, 2 * ell, n / 4, 4 * n, &s.stream(3))?);
    Ok(b.finish("long_to_annulus", &lhs, &[&p, &beta], &|x| x[0].powi(4) - 8.0 * x[1], n > 8 * ell))
}

/// `ψ(n) >= m_n^700 / 2^696 - 9 β̂(2ℓ, n/8, 8n)^{1/2}`.
pub fn check_square_to_annulus(
    sampler: &dyn FieldSampler,
    spec: LatticeSpec,
    n: u32,
    ell: u32,
    s: &McSettings,
) -> Result<InequalityReport> {
    let mut b = Builder::new();
    let lhs = b.term("psi", estimate_psi(sampler, spec, n, &s.stream(1))?);
    let m = b.term("m_n", estimate_m(sampler, spec, n, &s.stream(2))?);
    let beta = b.term("beta_hat", beta_hat(sampler, spec, 2 * ell, n / 8, 8 * n, &s.stream(3))?);
    let f = |x: &[f64]| {
        rsw_bound(&RswBound::Annulus { m: x[0].clamp(f64::MIN_POSITIVE, 1.0), beta_hat: x[1] }).map_or(f64::NAN, |v| v.to_f64())
    };
    Ok(b.finish("square_to_annulus", &lhs, &[&m, &beta], &f, n > 8 * ell))
}

/// The chain from rectangles to annuli at scale `n`: the rectangle-to-L
/// check at `l = l′ = n`, `L = 3n`, `L′ = 2n`, then the four inequalities leading
/// to `ψ(n)` with `ρ = 3/4`.
pub fn check_chain(
    sampler: &dyn FieldSampler,
    spec: LatticeSpec,
    n: u32,
    ell: u32,
    s: &McSettings,
) -> Result<Vec<InequalityReport>> {
    let dims = RectToL { l: n, big_l: 3 * n, l_prime: n, big_l_prime: 2 * n };
    Ok(vec![
        check_rect_to_l(sampler, spec, dims, ell, &s.stream(10))?,
        check_rect_to_long(sampler, spec, n, 0.75, ell, &s.stream(11))?,
        check_square_to_long(sampler, spec, n, 0.75, ell, &s.stream(12))?,
        check_long_to_annulus(sampler, spec, n, ell, &s.stream(13))?,
        check_square_to_annulus(sampler, spec, n, ell, &s.stream(14))?,
    ])
}
