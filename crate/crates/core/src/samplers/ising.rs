//! High-temperature Ising model: perfect simulation by backward exploration
//! of a continuous-time Glauber dynamics, exact enumeration on small sets,
//! and a plain Gibbs sampler used as a cross-check.
//!
//! Every vertex carries a Poisson clock of rate one, read backwards in time
//! from 0. At a mark, with probability `1 - δ` (`δ = tanh(β₀ N)`) the spin
//! is refreshed by a fair coin independently of everything else; otherwise
//! it is set to `+1` with probability `q = ½ + (p - ½)/δ` where `p` is the
//! conditional probability of `+1` given the current neighbours. The spin
//! at time 0 is found by recursively resolving the neighbours at the mark
//! times; the recursion is cut after `k` nested resolutions, where the
//! spin is replaced by an extra fair coin and flagged as undetermined.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use serde::Serialize;

use super::FieldSampler;
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, Vertex, Window};
use crate::rng::{chacha, mix64, unit_f64};
use crate::topology::Configuration;

/// `P(σ_v = +1 | Σ_{w ~ v} σ_w = n) = e^{βn} / (e^{βn} + e^{-βn})`.
pub fn ising_conditional_prob(beta: f64, n: i32) -> f64 {
    0.5 * (1.0 + (beta * f64::from(n)).tanh())
}

/// `q = ½ + (p - ½)/δ`, defined when `|p - ½| <= δ/2`.
pub fn ising_q(p: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::param(format!("δ={delta} must lie in (0, 1]")));
    }
    if (p - 0.5).abs() > delta / 2.0 + 1e-15 {
        return Err(Error::param(format!(
            "|p - ½| = {} exceeds δ/2 = {}",
            (p - 0.5).abs(),
            delta / 2.0
        )));
    }
    Ok((0.5 + (p - 0.5) / delta).clamp(0.0, 1.0))
}

const TAG_GAP: u64 = 1;
const TAG_EPS: u64 = 2;
const TAG_OMEGA: u64 = 3;
const TAG_UNIFORM: u64 = 4;
const TAG_COIN: u64 = 5;

#[inline]
fn stream(seed: u64, v: Vertex, mark: u32, tag: u64) -> u64 {
    let site = (v.x as u32 as u64) | ((v.y as u32 as u64) << 32);
    mix64(mix64(seed ^ mix64(site)) ^ ((u64::from(mark) << 8) | tag))
}

/// A finite set of free spins with fixed spins around it. Neighbours that
/// are neither free nor fixed do not interact.
#[derive(Clone, Debug, Default)]
pub struct Patch {
    pub free: Vec<Vertex>,
    pub boundary: HashMap<Vertex, i8>,
}

/// Perfect sampler for the Ising model at inverse temperature `β`,
/// with `|β| <= β₀`, truncated at depth `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsingCftp {
    #[serde(skip)]
    spec: LatticeSpec,
    pub beta: f64,
    pub beta0: f64,
    pub depth: u32,
    pub delta: f64,
}

/// Spins of one draw together with which of them were fully resolved.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingDraw {
    pub spins: Vec<i8>,
    pub determined: Vec<bool>,
}

impl IsingDraw {
    pub fn undetermined(&self) -> usize {
        self.determined.iter().filter(|&&d| !d).count()
    }
}

impl IsingCftp {
    pub fn new(spec: LatticeSpec, beta: f64, beta0: f64, depth: u32) -> Result<Self> {
        if !(beta0 > 0.0) {
            return Err(Error::param("β₀ must be positive"));
        }
        if beta.abs() > beta0 {
            return Err(Error::param(format!(
                "|β|={} exceeds β₀={beta0}",
                beta.abs()
            )));
        }
        let delta = (beta0 * spec.degree_max() as f64).tanh();
        Ok(IsingCftp {
            spec,
            beta,
            beta0,
            depth,
            delta,
        })
    }

    pub fn with_depth(&self, depth: u32) -> Self {
        IsingCftp {
            depth,
            ..self.clone()
        }
    }

    /// Mean offspring count `δN` of the exploration.
    pub fn branching(&self) -> f64 {
        self.delta * self.spec.degree_max() as f64
    }

    /// Bound `(δN)^k` on the probability that a given spin is undetermined.
    pub fn undetermined_bound(&self) -> f64 {
        self.branching().powi(self.depth as i32)
    }

    /// Spins at time 0 of `targets` in infinite volume.
    pub fn draw(&self, targets: &[Vertex], seed: u64, flip: bool) -> IsingDraw {
        Explorer::new(self, seed, flip, None).run(targets)
    }

    /// Spins of the free vertices of `patch`, in the order of `patch.free`.
    pub fn draw_patch(&self, patch: &Patch, seed: u64, flip: bool) -> IsingDraw {
        Explorer::new(self, seed, flip, Some(patch)).run(&patch.free)
    }

    pub fn draw_window(&self, window: &Window, seed: u64, flip: bool) -> IsingDraw {
        let targets: Vec<Vertex> = window.vertices().collect();
        self.draw(&targets, seed, flip)
    }
}

impl FieldSampler for IsingCftp {
    fn sample(&self, window: &Window, seed: u64) -> Result<Configuration> {
        Configuration::new(*window, self.draw_window(window, seed, false).spins)
    }

    fn sample_antithetic(&self, window: &Window, seed: u64) -> Result<Configuration> {
        Configuration::new(*window, self.draw_window(window, seed, true).spins)
    }
}

struct Explorer<'a> {
    model: &'a IsingCftp,
    seed: u64,
    flip: bool,
    patch: Option<(&'a Patch, HashSet<Vertex>)>,
    marks: HashMap<Vertex, Vec<f64>>,
    memo: HashMap<(Vertex, u32, u32), (i8, bool)>,
}

impl<'a> Explorer<'a> {
    fn new(model: &'a IsingCftp, seed: u64, flip: bool, patch: Option<&'a Patch>) -> Self {
        let patch = patch.map(|p| (p, p.free.iter().copied().collect()));
        Explorer {
            model,
            seed,
            flip,
            patch,
            marks: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    fn run(mut self, targets: &[Vertex]) -> IsingDraw {
        let mut spins = Vec::with_capacity(targets.len());
        let mut determined = Vec::with_capacity(targets.len());
        for &v in targets {
            let (s, d) = self.resolve(v, 0.0, self.model.depth);
            spins.push(s);
            determined.push(d);
        }
        IsingDraw { spins, determined }
    }

    fn unit(&self, v: Vertex, mark: u32, tag: u64) -> f64 {
        unit_f64(stream(self.seed, v, mark, tag))
    }

    fn fair(&self, v: Vertex, mark: u32, tag: u64) -> i8 {
        let s = if self.unit(v, mark, tag) < 0.5 { 1 } else { -1 };
        if self.flip {
            -s
        } else {
            s
        }
    }

    /// Index and time of the last mark of `v` strictly before `t`.
    fn mark_before(&mut self, v: Vertex, t: f64) -> (u32, f64) {
        let seed = self.seed;
        let times = self.marks.entry(v).or_default();
        while times.last().is_none_or(|&s| s >= t) {
            let i = times.len() as u32;
            let gap = -(1.0 - unit_f64(stream(seed, v, i, TAG_GAP))).ln();
            let prev = times.last().copied().unwrap_or(0.0);
            times.push(prev - gap);
        }
        let i = times.partition_point(|&s| s >= t);
        (i as u32, times[i])
    }

    fn neighbor_spin(&mut self, u: Vertex, t: f64, remaining: u32) -> Option<(i8, bool)> {
        if let Some((patch, free)) = &self.patch {
            if !free.contains(&u) {
                return patch.boundary.get(&u).map(|&s| (s, true));
            }
        }
        Some(self.resolve(u, t, remaining))
    }

    fn resolve(&mut self, v: Vertex, t: f64, remaining: u32) -> (i8, bool) {
        let (i, time) = self.mark_before(v, t);
        if let Some(&hit) = self.memo.get(&(v, i, remaining)) {
            return hit;
        }
        let out = if remaining == 0 {
            (self.fair(v, i, TAG_COIN), false)
        } else if self.unit(v, i, TAG_EPS) >= self.model.delta {
            (self.fair(v, i, TAG_OMEGA), true)
        } else {
            let mut field = 0i32;
            let mut determined = true;
            for &(dx, dy) in self.model.spec.neighbor_offsets(v) {
                if let Some((s, d)) = self.neighbor_spin(v.offset(dx, dy), time, remaining - 1) {
                    field += i32::from(s);
                    determined &= d;
                }
            }
            let p = ising_conditional_prob(self.model.beta, field);
            let q = ising_q(p, self.model.delta).expect("|β| <= β₀ keeps p within δ/2 of ½");
            let u = self.unit(v, i, TAG_UNIFORM);
            let u = if self.flip { 1.0 - u } else { u };
            (if u < q { 1 } else { -1 }, determined)
        };
        self.memo.insert((v, i, remaining), out);
        out
    }
}

pub const EXACT_GIBBS_LIMIT: usize = 12;

/// Gibbs measure on a small vertex set, by enumeration of all `2^k` states.
/// State bit `j` set means `vertices[j]` is `+1`.
#[derive(Clone, Debug)]
pub struct ExactGibbs {
    pub vertices: Vec<Vertex>,
    pub probs: Vec<f64>,
}

impl ExactGibbs {
    pub fn spin(state: usize, j: usize) -> i8 {
        if state >> j & 1 == 1 {
            1
        } else {
            -1
        }
    }

    pub fn expectation(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.probs.iter().enumerate().map(|(s, p)| p * f(s)).sum()
    }

    /// Law of the spins at positions `idx` (bit `m` of the result index is `idx[m]`).
    pub fn marginal(&self, idx: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; 1 << idx.len()];
        for (s, p) in self.probs.iter().enumerate() {
            let key = idx
                .iter()
                .enumerate()
                .fold(0, |k, (m, &j)| k | ((s >> j & 1) << m));
            out[key] += p;
        }
        out
    }
}

/// Ising measure `∝ exp(β Σ_{v~w} σ_v σ_w)` on `vertices` with the spins of
/// `boundary` held fixed.
pub fn ising_exact_gibbs(
    spec: &LatticeSpec,
    vertices: &[Vertex],
    beta: f64,
    boundary: &HashMap<Vertex, i8>,
) -> Result<ExactGibbs> {
    let k = vertices.len();
    if k > EXACT_GIBBS_LIMIT {
        return Err(Error::param(format!(
            "exact enumeration limited to {EXACT_GIBBS_LIMIT} vertices, got {k}"
        )));
    }
    let mut pairs = Vec::new();
    let mut field = vec![0i32; k];
    for (a, &v) in vertices.iter().enumerate() {
        for (b, &w) in vertices.iter().enumerate().skip(a + 1) {
            if spec.adjacent(v, w) {
                pairs.push((a, b));
            }
        }
        for w in spec.neighbors(v) {
            if let Some(&s) = boundary.get(&w) {
                if !vertices.contains(&w) {
                    field[a] += i32::from(s);
                }
            }
        }
    }
    let logw: Vec<f64> = (0..1usize << k)
        .map(|s| {
            let sp = |j| i32::from(ExactGibbs::spin(s, j));
            let e: i32 = pairs.iter().map(|&(a, b)| sp(a) * sp(b)).sum::<i32>()
                + (0..k).map(|j| sp(j) * field[j]).sum::<i32>();
            beta * f64::from(e)
        })
        .collect();
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = w.iter().sum();
    Ok(ExactGibbs {
        vertices: vertices.to_vec(),
        probs: w.into_iter().map(|x| x / z).collect(),
    })
}

/// Systematic-scan heat-bath dynamics on a window with free boundary.
pub struct GibbsChain {
    spec: LatticeSpec,
    window: Window,
    beta: f64,
    spins: Vec<i8>,
    rng: rand_chacha::ChaCha8Rng,
}

impl GibbsChain {
    pub fn new(spec: LatticeSpec, window: Window, beta: f64, seed: u64) -> Self {
        let mut rng = chacha(seed);
        let spins = (0..window.len())
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        GibbsChain {
            spec,
            window,
            beta,
            spins,
            rng,
        }
    }

    pub fn sweep(&mut self) {
        for i in 0..self.window.len() {
            let v = self.window.vertex(i);
            let field: i32 = self
                .spec
                .neighbor_offsets(v)
                .iter()
                .filter_map(|&(dx, dy)| self.window.index(v.offset(dx, dy)))
                .map(|j| i32::from(self.spins[j]))
                .sum();
            let p = ising_conditional_prob(self.beta, field);
            self.spins[i] = if self.rng.random::<f64>() < p { 1 } else { -1 };
        }
    }

    pub fn spin(&self, v: Vertex) -> i8 {
        self.spins[self.window.index(v).expect("vertex in chain window")]
    }
}
