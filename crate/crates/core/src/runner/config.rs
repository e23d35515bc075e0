use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{Decorrelation, RectToL, RswBound};
use crate::lattice::{LatticeSpec, Vertex, Window};
use crate::par::Execution;
use crate::samplers::{Bernoulli, CoarseMixture, FieldSampler, GaussianSampler, IsingCftp, Kernel, KernelSpec};
use crate::topology::Quad;

/// Random field descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    Bernoulli {
        p: f64,
    },
    /// Gaussian field with kernel `kernel`; when `u` is set, the mixture
    /// `1` on the diagonal and `u² K` off it.
    Gaussian {
        kernel: KernelSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        u: Option<f64>,
    },
    Ising {
        beta: f64,
        beta0: f64,
        depth: u32,
    },
    Coarse {
        u: f64,
        n_meso: u32,
    },
}

impl ModelSpec {
    pub fn kernel_spec(&self) -> Option<KernelSpec> {
        match self {
            ModelSpec::Gaussian { kernel, u: Some(u) } => Some(KernelSpec::Mixture { u: *u, base: Box::new(kernel.clone()) }),
            ModelSpec::Gaussian { kernel, u: None } => Some(kernel.clone()),
            _ => None,
        }
    }

    pub fn ising(&self, spec: LatticeSpec) -> Result<Option<IsingCftp>> {
        match *self {
            ModelSpec::Ising { beta, beta0, depth } => IsingCftp::new(spec, beta, beta0, depth).map(Some),
            _ => Ok(None),
        }
    }

    /// Sampler able to produce configurations on `window`. Only the
    /// Gaussian model depends on the window.
    pub fn build(&self, spec: LatticeSpec, window: &Window) -> Result<Box<dyn FieldSampler>> {
        Ok(match *self {
            ModelSpec::Bernoulli { p } => Box::new(Bernoulli::new(p)?),
            ModelSpec::Gaussian { .. } => {
                let kernel = Kernel::from_spec(&self.kernel_spec().expect("gaussian model"))?;
                Box::new(GaussianSampler::new(&kernel, *window)?)
            }
            ModelSpec::Ising { .. } => Box::new(self.ising(spec)?.expect("ising model")),
            ModelSpec::Coarse { u, n_meso } => Box::new(CoarseMixture::new(u, n_meso)?),
        })
    }
}

/// Quad descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum QuadSpec {
    /// `[x0, x0 + a] x [y0, y0 + b]`, crossed left to right, or bottom to
    /// top when `vertical`.
    Rectangle {
        a: u32,
        b: u32,
        #[serde(default)]
        origin: (i32, i32),
        #[serde(default)]
        vertical: bool,
    },
    /// Lattice polygon with the first vertices of `γ, γ₁, γ′, γ₂`.
    Polygon { corners: Vec<(i32, i32)>, arc_starts: [(i32, i32); 4] },
    /// The four arcs `γ, γ₁, γ′, γ₂` listed vertex by vertex.
    Arcs { arcs: [Vec<(i32, i32)>; 4] },
}

impl QuadSpec {
    pub fn build(&self, spec: LatticeSpec) -> Result<Quad> {
        let v = |(x, y): (i32, i32)| Vertex::new(x, y);
        match self {
            &QuadSpec::Rectangle { a, b, origin, vertical: false } => Quad::rect_at(spec, v(origin), a, b),
            &QuadSpec::Rectangle { a, b, origin, vertical: true } => Quad::vertical_rect_at(spec, v(origin), a, b),
            QuadSpec::Polygon { corners, arc_starts } => {
                let corners: Vec<Vertex> = corners.iter().copied().map(v).collect();
                Quad::from_polygon(spec, &corners, arc_starts.map(v))
            }
            QuadSpec::Arcs { arcs } => Quad::new(spec, arcs.clone().map(|a| a.into_iter().map(v).collect())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThetaSpec {
    /// Ising model cut at two exploration depths with shared randomness.
    IsingDepth { depth_a: u32, depth_b: u32 },
    /// Gaussian covariance truncated below `δ_K(d)`.
    GaussianTruncation { d: u32 },
}

/// The job of one run, with its geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case")]
pub enum Task {
    /// One configuration on `Λ_n`, written as an image.
    Sample {
        n: u32,
        #[serde(default = "yes")]
        highlight: bool,
    },
    Pi {
        quad: QuadSpec,
    },
    Psi {
        n: u32,
    },
    Beta {
        r: u32,
        #[serde(rename = "R")]
        big_r: u32,
        #[serde(rename = "L")]
        ell: u32,
    },
    Theta {
        n: u32,
        coupling: ThetaSpec,
    },
    CheckRectL {
        #[serde(flatten)]
        dims: RectToL,
        #[serde(default)]
        ell: u32,
    },
    /// The rectangle-to-annulus chain at scale `n`.
    Chain {
        n: u32,
        #[serde(default)]
        ell: u32,
    },
    Constants {
        #[serde(rename = "C")]
        big_c: f64,
        alpha: f64,
        beta: f64,
    },
    Bounds {
        #[serde(default)]
        bounds: Vec<RswBound>,
        #[serde(default)]
        decorrelation: Vec<Decorrelation>,
    },
}

fn yes() -> bool {
    true
}

fn default_lattice() -> String {
    "union_jack".into()
}

fn default_reps() -> usize {
    1
}

/// One experiment: a model, a task, and where the results go.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: String,
    #[serde(default = "default_lattice")]
    pub lattice: String,
    /// Random field; not needed for `constants` and `bounds`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(flatten)]
    pub task: Task,
    #[serde(default = "default_reps")]
    pub reps: usize,
    pub seed: u64,
    pub output_dir: String,
    /// Declared box `Λ_n`; when set, all geometry must fit inside it.
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub box_n: Option<u32>,
    #[serde(default)]
    pub exec: Execution,
}

impl RunConfig {
    pub fn spec(&self) -> Result<LatticeSpec> {
        LatticeSpec::by_name(&self.lattice)
    }

    pub fn model(&self) -> Result<&ModelSpec> {
        self.model.as_ref().ok_or_else(|| Error::param(format!("task needs a model (experiment {})", self.experiment)))
    }

    /// Window the task samples on, if it samples at all.
    pub fn window(&self) -> Result<Option<Window>> {
        let spec = self.spec()?;
        Ok(match &self.task {
            Task::Sample { n, .. } => Some(Window::centered(*n)),
            Task::Psi { n } => Some(Window::centered(2 * n)),
            Task::Pi { quad } => Some(*quad.build(spec)?.window()),
            Task::Beta { big_r, .. } => Some(Window::centered(*big_r)),
            Task::Theta { n, .. } => Some(Window::centered(*n)),
            Task::CheckRectL { dims, .. } => {
                let r = dims.delta().floor() as i32;
                Some(Window { x0: -r, y0: -r, x1: dims.big_l as i32, y1: dims.big_l_prime as i32 })
            }
            Task::Chain { n, .. } => {
                let n = *n as i32;
                Some(Window { x0: -2 * n, y0: -2 * n, x1: 4 * n, y1: 2 * n })
            }
            Task::Constants { .. } | Task::Bounds { .. } => None,
        })
    }

    pub fn task_name(&self) -> &'static str {
        match self.task {
            Task::Sample { .. } => "sample",
            Task::Pi { .. } => "pi",
            Task::Psi { .. } => "psi",
            Task::Beta { .. } => "beta",
            Task::Theta { .. } => "theta",
            Task::CheckRectL { .. } => "check-rect-l",
            Task::Chain { .. } => "chain",
            Task::Constants { .. } => "constants",
            Task::Bounds { .. } => "bounds",
        }
    }
}

/// Parses a single config object or an array of them.
pub fn parse_configs(text: &str) -> Result<Vec<RunConfig>> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.is_array() {
        Ok(serde_json::from_value(value)?)
    } else {
        Ok(vec![serde_json::from_value(value)?])
    }
}
