//! Stationary covariance kernels on `Z^2`.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::special::{bessel_j0, integrate};
use crate::error::{Error, Result};
use crate::lattice::Vertex;

/// Serializable kernel descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    /// Independent unit variances.
    Iid,
    /// `J₀(|x - y|)`, the random monochromatic wave.
    J0,
    /// `(1 + (r / a)^2)^(-D/2)` with `a = c^(1/D)`, so `K(r) ~ c r^(-D)`.
    Power { c: f64, d: f64 },
    /// Monochromatic wave with spectral measure smoothed by a bump of
    /// half-width `w` around the unit circle (in squared frequency).
    Smoothed {
        #[serde(default = "default_bump_width")]
        w: f64,
    },
    /// `1` on the diagonal, `u² K(x, y)` off it.
    Mixture { u: f64, base: Box<KernelSpec> },
}

fn default_bump_width() -> f64 {
    0.3
}

/// A kernel ready for evaluation.
#[derive(Clone, Debug)]
pub enum Kernel {
    Iid,
    J0,
    Power { c: f64, d: f64, scale: f64 },
    Smoothed { w: f64, norm: f64 },
    Mixture { u: f64, base: Box<Kernel> },
}

fn bump(t: f64, w: f64) -> f64 {
    let s = (t - 1.0) / w;
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

/// `π ∫ χ(t) J₀(ρ √t) dt`, i.e. `2π ∫ χ(s²) J₀(ρ s) s ds`.
fn smoothed_raw(rho: f64, w: f64) -> Result<f64> {
    integrate(
        |t| bump(t, w) * bessel_j0(rho * t.sqrt()),
        1.0 - w,
        1.0 + w,
        1e-14,
        4000,
    )
    .map(|v| PI * v)
}

impl Kernel {
    pub fn from_spec(spec: &KernelSpec) -> Result<Self> {
        Ok(match spec {
            KernelSpec::Iid => Kernel::Iid,
            KernelSpec::J0 => Kernel::J0,
            &KernelSpec::Power { c, d } => {
                if !(c > 0.0 && d > 0.0) {
                    return Err(Error::param("power kernel needs c > 0 and D > 0"));
                }
                Kernel::Power {
                    c,
                    d,
                    scale: c.powf(1.0 / d),
                }
            }
            &KernelSpec::Smoothed { w } => {
                if !(w > 0.0 && w < 1.0) {
                    return Err(Error::param("bump width must lie in (0, 1)"));
                }
                Kernel::Smoothed {
                    w,
                    norm: smoothed_raw(0.0, w)?,
                }
            }
            KernelSpec::Mixture { u, base } => {
                if !(0.0..=1.0).contains(u) {
                    return Err(Error::param("mixture weight must lie in [0, 1]"));
                }
                Kernel::Mixture {
                    u: *u,
                    base: Box::new(Kernel::from_spec(base)?),
                }
            }
        })
    }

    /// Value at offset `(dx, dy)`.
    pub fn eval_offset(&self, dx: i32, dy: i32) -> Result<f64> {
        let same = dx == 0 && dy == 0;
        let r = f64::from(dx).hypot(f64::from(dy));
        Ok(match self {
            Kernel::Iid => f64::from(u8::from(same)),
            Kernel::J0 => bessel_j0(r),
            Kernel::Power { d, scale, .. } => (1.0 + (r / scale).powi(2)).powf(-d / 2.0),
            Kernel::Smoothed { w, norm } => {
                if same {
                    1.0
                } else {
                    smoothed_raw(r, *w)? / norm
                }
            }
            Kernel::Mixture { u, base } => {
                if same {
                    1.0
                } else {
                    u * u * base.eval_offset(dx, dy)?
                }
            }
        })
    }

    pub fn eval(&self, x: Vertex, y: Vertex) -> Result<f64> {
        self.eval_offset(x.x - y.x, x.y - y.y)
    }

    /// Table of `K` at offsets `|dx| < w`, `|dy| < h`, indexed `dy * w + dx`.
    /// Values are computed once per distinct squared distance.
    pub fn offset_table(&self, w: usize, h: usize) -> Result<Vec<f64>> {
        let mut by_r2: HashMap<i64, f64> = HashMap::new();
        let mut out = Vec::with_capacity(w * h);
        for dy in 0..h as i32 {
            for dx in 0..w as i32 {
                let r2 = i64::from(dx * dx + dy * dy);
                let v = match by_r2.get(&r2) {
                    Some(&v) => v,
                    None => {
                        let v = self.eval_offset(dx, dy)?;
                        by_r2.insert(r2, v);
                        v
                    }
                };
                out.push(v);
            }
        }
        Ok(out)
    }

    /// `sup_{|x|_inf >= d} |K(x)|`, scanned over `d <= |x|_inf <= d + span`
    /// and bounded beyond the scan by the kernel's decay envelope.
    pub fn sup_beyond(&self, d: u32, span: u32) -> Result<f64> {
        let d = d as i32;
        match self {
            Kernel::Iid => Ok(if d == 0 { 1.0 } else { 0.0 }),
            // Radially decreasing: the sup is at distance d on an axis.
            Kernel::Power { .. } => self.eval_offset(d, 0).map(f64::abs),
            _ => {
                let hi = d + span as i32;
                let mut best: f64 = 0.0;
                for x in 0..=hi {
                    for y in 0..=x {
                        if x >= d {
                            best = best.max(self.eval_offset(x, y)?.abs());
                        }
                    }
                }
                Ok(best.max(self.envelope(f64::from(hi))))
            }
        }
    }

    /// Upper bound on `|K|` at Euclidean distance at least `r`.
    fn envelope(&self, r: f64) -> f64 {
        match self {
            Kernel::Iid => 0.0,
            // |J0(x)| <= sqrt(2 / (pi x)) for x > 0.
            Kernel::J0 => (2.0 / (PI * r)).sqrt().min(1.0),
            Kernel::Power { d, scale, .. } => (1.0 + (r / scale).powi(2)).powf(-d / 2.0),
            // Smooth spectral density: faster than any power; the scan dominates.
            Kernel::Smoothed { .. } => 0.0,
            Kernel::Mixture { u, base } => u * u * base.envelope(r),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernels_are_one_at_origin() {
        for spec in [
            KernelSpec::Iid,
            KernelSpec::J0,
            KernelSpec::Power { c: 1.0, d: 3.0 },
            KernelSpec::Smoothed { w: 0.3 },
            KernelSpec::Mixture {
                u: 0.5,
                base: Box::new(KernelSpec::J0),
            },
        ] {
            let k = Kernel::from_spec(&spec).unwrap();
            assert_eq!(k.eval_offset(0, 0).unwrap(), 1.0, "{spec:?}");
        }
    }

    #[test]
    fn power_kernel_tail() {
        let k = Kernel::from_spec(&KernelSpec::Power { c: 2.0, d: 4.0 }).unwrap();
        let v = k.eval_offset(100, 0).unwrap();
        assert!((v * 100f64.powi(4) / 2.0 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn narrow_bump_approaches_j0() {
        let k = Kernel::from_spec(&KernelSpec::Smoothed { w: 0.01 }).unwrap();
        for r in [1, 2, 3] {
            let v = k.eval_offset(r, 0).unwrap();
            assert!((v - bessel_j0(f64::from(r))).abs() < 5e-3);
        }
    }

    #[test]
    fn mixture_scales_off_diagonal() {
        let k = Kernel::from_spec(&KernelSpec::Mixture {
            u: 0.5,
            base: Box::new(KernelSpec::J0),
        })
        .unwrap();
        assert!((k.eval_offset(1, 0).unwrap() - 0.25 * bessel_j0(1.0)).abs() < 1e-15);
    }
}
