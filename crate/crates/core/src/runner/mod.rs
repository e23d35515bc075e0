//! Batch runner: JSON run configs in, JSON/CSV records and images out.
//!
//! For each experiment `name` the runner writes `name.json` (the records),
//! `name.csv` (one row per record), `name.meta.json` (wall-clock data,
//! kept apart so that the other files are a pure function of the config)
//! and, for sampling tasks, `name.ppm`.

mod config;
mod render;

use std::collections::BTreeMap;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use config::{parse_configs, ModelSpec, QuadSpec, RunConfig, Task, ThetaSpec};
pub use render::write_ppm;

use crate::error::{Error, Result};
use crate::estimators::{
    bootstrap_constants, check_chain, check_rect_to_l, decorrelation_bound, estimate_beta, estimate_pi, estimate_psi,
    estimate_theta, rsw_bound, BetaFamily, Coupling, InequalityReport, McSettings, MCEstimate,
};
use crate::lattice::Window;
use crate::samplers::gaussian::MAX_GAUSSIAN_VERTICES;
use crate::samplers::{IsingCftp, Kernel};
use crate::topology::largest_cluster;

/// A problem that keeps a config from running.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    fn new(field: &str, message: impl Into<String>) -> Self {
        Diagnostic { field: field.to_string(), message: message.into() }
    }
}

/// Everything that would stop `run` before it starts sampling. Empty means
/// the config is runnable.
pub fn validate(config: &RunConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if config.experiment.is_empty()
        || !config.experiment.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
    {
        out.push(Diagnostic::new("experiment", "must be a nonempty name made of [A-Za-z0-9_.-]"));
    }
    let spec = match config.spec() {
        Ok(s) => s,
        Err(e) => {
            out.push(Diagnostic::new("lattice", e.to_string()));
            return out;
        }
    };
    let needs_model = !matches!(config.task, Task::Constants { .. } | Task::Bounds { .. });
    if needs_model && config.reps == 0 {
        out.push(Diagnostic::new("reps", "must be at least 1"));
    }
    if let Some(model) = &config.model {
        check_model(model, spec, &mut out);
    } else if needs_model {
        out.push(Diagnostic::new("model", format!("task {} needs a model", config.task_name())));
    }
    let window = match config.window() {
        Ok(w) => w,
        Err(e) => {
            out.push(Diagnostic::new("quad", e.to_string()));
            None
        }
    };
    if let (Some(n), Some(w)) = (config.box_n, window) {
        if !Window::centered(n).contains_window(&w) {
            out.push(Diagnostic::new("box", format!("geometry {w:?} does not fit in the declared box Λ_{n}")));
        }
    }
    if let (Some(ModelSpec::Gaussian { .. }), Some(w)) = (&config.model, window) {
        if w.len() > MAX_GAUSSIAN_VERTICES {
            out.push(Diagnostic::new(
                "model",
                format!("Gaussian sampling on {} vertices exceeds the cap of {MAX_GAUSSIAN_VERTICES}", w.len()),
            ));
        }
    }
    match &config.task {
        Task::Theta { n: 0, .. } => out.push(Diagnostic::new("n", "must be positive")),
        Task::Beta { r, big_r, ell } => {
            if !(*r >= 1 && big_r > r && big_r <= ell) {
                out.push(Diagnostic::new("R", format!("need 1 <= r < R <= L, got r={r}, R={big_r}, L={ell}")));
            }
        }
        Task::Theta { coupling, .. } => match (coupling, &config.model) {
            (ThetaSpec::IsingDepth { .. }, Some(ModelSpec::Ising { .. })) => {}
            (ThetaSpec::GaussianTruncation { .. }, Some(ModelSpec::Gaussian { .. })) => {}
            (c, _) => out.push(Diagnostic::new(
                "coupling",
                format!("no coupling recipe {c:?} for this model; θ cannot be estimated by independent sampling"),
            )),
        },
        Task::CheckRectL { dims, ell } => {
            for v in dims.violations(*ell) {
                out.push(Diagnostic::new("geometry", v));
            }
            check_range(config, *ell, &mut out);
        }
        Task::Chain { n, ell } => {
            if *n < 8 {
                out.push(Diagnostic::new("n", "the chain needs n >= 8"));
            }
            check_range(config, *ell, &mut out);
        }
        Task::Psi { n } | Task::Sample { n, .. } if *n == 0 => {
            out.push(Diagnostic::new("n", "must be positive"));
        }
        _ => {}
    }
    out
}

fn check_range(config: &RunConfig, ell: u32, out: &mut Vec<Diagnostic>) {
    let range = match &config.model {
        Some(ModelSpec::Bernoulli { .. }) => Some(0),
        Some(ModelSpec::Coarse { n_meso, .. }) => Some(n_meso.saturating_sub(1)),
        Some(ModelSpec::Ising { depth, .. }) => Some(2 * depth),
        _ => None,
    };
    match range {
        Some(r) if r <= ell => {}
        Some(r) => out.push(Diagnostic::new("ell", format!("model range {r} exceeds ℓ={ell}"))),
        None => out.push(Diagnostic::new("model", "inequality checks need a finite-range model")),
    }
}

fn check_model(model: &ModelSpec, spec: crate::lattice::LatticeSpec, out: &mut Vec<Diagnostic>) {
    match *model {
        ModelSpec::Ising { beta, beta0, .. } => {
            let nn = spec.degree_max() as f64;
            let d = nn * (beta0 * nn).tanh();
            if !(d < 1.0) {
                out.push(Diagnostic::new(
                    "model.beta0",
                    format!("high-temperature hypothesis N tanh(β₀N) < 1 fails: N tanh(β₀N) = {d:.4} with N = {nn}"),
                ));
            }
            if let Err(e) = IsingCftp::new(spec, beta, beta0, 0) {
                out.push(Diagnostic::new("model", e.to_string()));
            }
        }
        ModelSpec::Gaussian { .. } => {
            if let Err(e) = Kernel::from_spec(&model.kernel_spec().expect("gaussian model")) {
                out.push(Diagnostic::new("model.kernel", e.to_string()));
            }
        }
        _ => {
            if let Err(e) = model.build(spec, &Window::centered(0)) {
                out.push(Diagnostic::new("model", e.to_string()));
            }
        }
    }
}

/// One output row. `result` holds the full task output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub experiment: String,
    pub task: String,
    pub config: RunConfig,
    pub value: Option<f64>,
    pub stderr: Option<f64>,
    pub n_samples: Option<u64>,
    pub seed: u64,
    pub violations: usize,
    pub result: Value,
}

#[derive(Clone, Debug, Default)]
pub struct RunOutcome {
    pub records: Vec<Record>,
    pub files: Vec<PathBuf>,
    /// Inequality reports flagged as violated, over all records.
    pub violations: usize,
}

fn estimate_record(config: &RunConfig, e: &MCEstimate) -> Record {
    Record {
        experiment: config.experiment.clone(),
        task: config.task_name().into(),
        config: config.clone(),
        value: Some(e.value),
        stderr: Some(e.stderr),
        n_samples: Some(e.n_samples),
        seed: config.seed,
        violations: 0,
        result: serde_json::to_value(e).unwrap_or(Value::Null),
    }
}

fn plain_record(config: &RunConfig, result: Value) -> Record {
    Record {
        experiment: config.experiment.clone(),
        task: config.task_name().into(),
        config: config.clone(),
        value: None,
        stderr: None,
        n_samples: None,
        seed: config.seed,
        violations: 0,
        result,
    }
}

fn reports_record(config: &RunConfig, reports: &[InequalityReport]) -> Record {
    let mut r = plain_record(config, serde_json::to_value(reports).unwrap_or(Value::Null));
    r.violations = reports.iter().filter(|x| x.violated).count();
    if let [single] = reports {
        r.value = Some(single.margin);
        r.stderr = Some(single.combined_stderr);
    }
    r.n_samples = Some(config.reps as u64);
    r
}

#[derive(Serialize)]
struct SampleStats {
    window: Window,
    image: String,
    positive_fraction: f64,
    largest_positive_cluster: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    determined_fraction: Option<f64>,
}

/// Executes one config; `image` receives the PPM for sampling tasks.
fn execute(config: &RunConfig, image: Option<&Path>) -> Result<Record> {
    let bad = validate(config);
    if !bad.is_empty() {
        let msgs: Vec<String> = bad.iter().map(|d| format!("{}: {}", d.field, d.message)).collect();
        return Err(Error::param(msgs.join("; ")));
    }
    let spec = config.spec()?;
    let s = McSettings { reps: config.reps, seed: config.seed, exec: config.exec };
    let window = config.window()?;
    let sampler = || config.model()?.build(spec, &window.expect("sampling task has a window"));
    Ok(match &config.task {
        Task::Pi { quad } => estimate_record(config, &estimate_pi(sampler()?.as_ref(), &quad.build(spec)?, &s)?),
        Task::Psi { n } => estimate_record(config, &estimate_psi(sampler()?.as_ref(), spec, *n, &s)?),
        Task::Beta { r, big_r, ell } => {
            let family = BetaFamily::annulus(spec, *r, *big_r, *ell)?;
            estimate_record(config, &estimate_beta(sampler()?.as_ref(), &family, &s)?)
        }
        Task::Theta { n, coupling } => {
            let model = config.model()?;
            let c = match coupling {
                ThetaSpec::IsingDepth { depth_a, depth_b } => Coupling::IsingDepth {
                    model: model.ising(spec)?.ok_or_else(|| Error::param("ising_depth needs an Ising model"))?,
                    depth_a: *depth_a,
                    depth_b: *depth_b,
                },
                ThetaSpec::GaussianTruncation { d } => Coupling::GaussianTruncation {
                    kernel: Kernel::from_spec(
                        &model.kernel_spec().ok_or_else(|| Error::param("gaussian_truncation needs a Gaussian model"))?,
                    )?,
                    d: *d,
                    n_t: spec.vertices_per_unit_square() as u32,
                },
            };
            estimate_record(config, &estimate_theta(&c, *n, &s)?)
        }
        Task::CheckRectL { dims, ell } => {
            reports_record(config, &[check_rect_to_l(sampler()?.as_ref(), spec, *dims, *ell, &s)?])
        }
        Task::Chain { n, ell } => reports_record(config, &check_chain(sampler()?.as_ref(), spec, *n, *ell, &s)?),
        Task::Constants { big_c, alpha, beta } => {
            let k = bootstrap_constants(*big_c, *alpha, *beta)?;
            let mut v = serde_json::to_value(k)?;
            v["sign_conditions"] = serde_json::to_value(k.sign_conditions())?;
            plain_record(config, v)
        }
        Task::Bounds { bounds, decorrelation } => {
            let b: Vec<Value> = bounds
                .iter()
                .map(|b| Ok(serde_json::json!({ "params": b, "value": rsw_bound(b)? })))
                .collect::<Result<_>>()?;
            let d: Vec<Value> = decorrelation
                .iter()
                .map(|d| Ok(serde_json::json!({ "params": d, "value": decorrelation_bound(d)? })))
                .collect::<Result<_>>()?;
            plain_record(config, serde_json::json!({ "bounds": b, "decorrelation": d }))
        }
        Task::Sample { n, highlight } => {
            let w = Window::centered(*n);
            let model = config.model()?;
            let (cfg, determined) = match model.ising(spec)? {
                Some(ising) => {
                    let draw = ising.draw_window(&w, config.seed, false);
                    let det = 1.0 - draw.undetermined() as f64 / w.len() as f64;
                    (crate::topology::Configuration::new(w, draw.spins)?, Some(det))
                }
                None => (model.build(spec, &w)?.sample(&w, config.seed)?, None),
            };
            let path = image.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(format!("{}.ppm", config.experiment)));
            let mut f = BufWriter::new(fs::File::create(&path)?);
            write_ppm(&mut f, &spec, &cfg, *highlight)?;
            let positive = cfg.signs().iter().filter(|&&x| x > 0).count();
            let stats = SampleStats {
                window: w,
                image: path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
                positive_fraction: positive as f64 / w.len() as f64,
                largest_positive_cluster: largest_cluster(&spec, &cfg, 1).len(),
                determined_fraction: determined,
            };
            let mut r = plain_record(config, serde_json::to_value(&stats)?);
            r.value = determined;
            r.n_samples = Some(1);
            r
        }
    })
}

#[derive(Serialize)]
struct Meta {
    experiment: String,
    started_unix_ms: u128,
    runtime_ms: Vec<u128>,
}

/// Runs every config in order. Files of an experiment are rewritten from
/// scratch on each call, and records of configs sharing an experiment name
/// are appended in config order.
pub fn run(configs: &[RunConfig]) -> Result<RunOutcome> {
    let mut by_exp: BTreeMap<(String, String), (Vec<Record>, Vec<u128>, u128)> = BTreeMap::new();
    let mut outcome = RunOutcome::default();
    let mut order = Vec::new();
    for config in configs {
        let dir = PathBuf::from(&config.output_dir);
        fs::create_dir_all(&dir)?;
        let key = (config.output_dir.clone(), config.experiment.clone());
        let started = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_millis());
        let t = Instant::now();
        let image = dir.join(format!("{}.ppm", config.experiment));
        let record = execute(config, Some(&image))?;
        if matches!(config.task, Task::Sample { .. }) {
            outcome.files.push(image);
        }
        let entry = by_exp.entry(key.clone()).or_insert_with(|| {
            order.push(key.clone());
            (Vec::new(), Vec::new(), started)
        });
        outcome.violations += record.violations;
        entry.0.push(record.clone());
        entry.1.push(t.elapsed().as_millis());
        outcome.records.push(record);
    }
    for key in order {
        let (records, runtimes, started) = &by_exp[&key];
        let dir = PathBuf::from(&key.0);
        let json_path = dir.join(format!("{}.json", key.1));
        let mut text = serde_json::to_string_pretty(records)?;
        text.push('\n');
        fs::write(&json_path, text)?;
        let csv_path = dir.join(format!("{}.csv", key.1));
        let mut w = csv::Writer::from_path(&csv_path)?;
        w.write_record(["experiment", "task", "value", "stderr", "n_samples", "seed", "violations"])?;
        for r in records {
            let opt = |x: Option<f64>| x.map(|v| format!("{v:.17e}")).unwrap_or_default();
            w.write_record([
                r.experiment.clone(),
                r.task.clone(),
                opt(r.value),
                opt(r.stderr),
                r.n_samples.map(|n| n.to_string()).unwrap_or_default(),
                r.seed.to_string(),
                r.violations.to_string(),
            ])?;
        }
        w.flush()?;
        let meta_path = dir.join(format!("{}.meta.json", key.1));
        let meta = Meta { experiment: key.1.clone(), started_unix_ms: *started, runtime_ms: runtimes.clone() };
        fs::write(&meta_path, serde_json::to_string_pretty(&meta)? + "\n")?;
        outcome.files.extend([json_path, csv_path, meta_path]);
    }
    Ok(outcome)
}

/// Samples the config's model on its task window (or declared box) and
/// writes the image next to the other outputs.
pub fn render(config: &RunConfig) -> Result<PathBuf> {
    let window = match (config.window()?, config.box_n) {
        (_, Some(n)) => Window::centered(n),
        (Some(w), None) => w,
        (None, None) => return Err(Error::param("nothing to render: the task has no geometry and no box is declared")),
    };
    let spec = config.spec()?;
    let model = config.model()?;
    let cfg = model.build(spec, &window)?.sample(&window, config.seed)?;
    fs::create_dir_all(&config.output_dir)?;
    let path = PathBuf::from(&config.output_dir).join(format!("{}.ppm", config.experiment));
    let mut f = BufWriter::new(fs::File::create(&path)?);
    write_ppm(&mut f, &spec, &cfg, true)?;
    Ok(path)
}
