//! Command-line front end: `spectrum`, `dynamics`, `steady` and `reproduce`.
//!
//! Every option can also be given in a `key=value` file passed with
//! `--config`; keys are the long flag names without the leading dashes.
//! Command-line flags take precedence over the file.

use std::collections::{BTreeMap, HashMap};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::dynamics::{
    propagate_lorentzian_analytic, propagate_volterra, InitialState, Trajectory,
};
use crate::entanglement::{concurrence_from_amplitudes, predict_steady, SteadyPrediction};
use crate::numerics::VolterraOptions;
use crate::reservoir::{LorentzianKernel, ReservoirModel, SpectralDensity};
use crate::spectrum::{energy_grid, find_bound_state, y_of, BoundStateOptions, BoundStateReport};
use crate::{Complex64, Error};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

fn usage(err: impl std::fmt::Display) -> CliError {
    CliError::Usage(err.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "boundstate",
    version,
    about = "Qubit–reservoir bound states and entanglement dynamics"
)]
pub struct Cli {
    /// `key=value` configuration file; command-line flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample y(E) and locate bound states for each N.
    Spectrum(SpectrumArgs),
    /// Propagate the amplitudes and write concurrence time series.
    Dynamics(DynamicsArgs),
    /// Long-time concurrence prediction from the bound-state projection.
    Steady(SteadyArgs),
    /// Regenerate every data file of a figure (`fig1` or `fig2`).
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// `lorentzian` or `ohmic`.
    #[arg(long)]
    pub reservoir: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub gamma0: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long = "omega-c")]
    pub omega_c: Option<f64>,
    #[arg(long)]
    pub omega0: Option<f64>,
    /// Comma-separated qubit counts, e.g. `2,8,12`.
    #[arg(long = "n")]
    pub n_list: Option<String>,
    /// Observed qubit pair `m,n` (1-based).
    #[arg(long)]
    pub pair: Option<String>,
    /// Initial amplitudes, e.g. `1:0.7071+0i,2:0.7071+0i`.
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `csv`, `json` or `both`.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long = "beta-sq-min")]
    pub beta_sq_min: Option<f64>,
    /// Use the half-line Lorentzian kernel instead of the exponential one.
    #[arg(long = "half-line-kernel")]
    pub half_line_kernel: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    #[arg(long = "corrector-iterations")]
    pub corrector_iterations: Option<usize>,
    /// Write every k-th time step (the last step is always written).
    #[arg(long)]
    pub stride: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct EnergyArgs {
    #[arg(long = "e-min", allow_hyphen_values = true)]
    pub e_min: Option<f64>,
    #[arg(long = "e-max", allow_hyphen_values = true)]
    pub e_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub energy: EnergyArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DynamicsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Solve the Volterra equation even when a closed form exists.
    #[arg(long = "force-volterra")]
    pub force_volterra: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SteadyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    /// `fig1` or `fig2`.
    pub figure: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub energy: EnergyArgs,
}

const CONFIG_KEYS: &[&str] = &[
    "reservoir",
    "lambda",
    "gamma0",
    "s",
    "gamma",
    "omega-c",
    "omega0",
    "n",
    "pair",
    "init",
    "out",
    "format",
    "epsilon",
    "beta-sq-min",
    "half-line-kernel",
    "force-volterra",
    "dt",
    "t-max",
    "corrector-iterations",
    "stride",
    "e-min",
    "e-max",
    "points",
];

/// Parsed `key=value` configuration file.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile(HashMap<String, String>);

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                usage(format!(
                    "config line {}: expected key=value, got `{line}`",
                    lineno + 1
                ))
            })?;
            let key = key.trim().trim_start_matches("--").replace('_', "-");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(usage(format!(
                    "config line {}: unknown key `{key}`",
                    lineno + 1
                )));
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(Self(entries))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Flag value if present, otherwise the parsed file entry.
    fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.0
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| usage(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    fn flag(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        if flag {
            return Ok(true);
        }
        Ok(self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "both" => Ok(Format::Both),
            other => Err(format!(
                "unknown format `{other}` (expected csv, json or both)"
            )),
        }
    }
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ReservoirModel,
    pub n_list: Vec<usize>,
    pub pair: (usize, usize),
    pub init: Option<BTreeMap<usize, Complex64>>,
    pub out: PathBuf,
    pub format: Format,
    pub bound: BoundStateOptions,
    pub kernel: LorentzianKernel,
    pub dt: f64,
    pub t_max: f64,
    pub corrector_iterations: usize,
    pub stride: usize,
    pub force_volterra: bool,
    pub e_min: f64,
    pub e_max: f64,
    pub points: usize,
}

fn parse_n_list(text: &str) -> Result<Vec<usize>, CliError> {
    let list: Vec<usize> = text
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|e| usage(format!("invalid qubit count `{t}`: {e}")))
        })
        .collect::<Result<_, _>>()?;
    if list.is_empty() {
        return Err(usage("--n needs at least one qubit count"));
    }
    if let Some(bad) = list.iter().find(|&&n| n < 2) {
        return Err(usage(format!("qubit counts must be at least 2, got {bad}")));
    }
    Ok(list)
}

fn parse_pair(text: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [m, n] = parts.as_slice() else {
        return Err(usage(format!("--pair expects `m,n`, got `{text}`")));
    };
    let m = m
        .parse::<usize>()
        .map_err(|e| usage(format!("--pair: {e}")))?;
    let n = n
        .parse::<usize>()
        .map_err(|e| usage(format!("--pair: {e}")))?;
    Ok((m, n))
}

fn parse_init(text: &str) -> Result<BTreeMap<usize, Complex64>, CliError> {
    let mut map = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (index, value) = item
            .split_once(':')
            .ok_or_else(|| usage(format!("--init entry `{item}` should be `index:amplitude`")))?;
        let index = index
            .trim()
            .parse::<usize>()
            .map_err(|e| usage(format!("--init index `{index}`: {e}")))?;
        let value = value.trim().parse::<Complex64>().map_err(|_| {
            usage(format!(
                "--init amplitude `{value}` is not a complex number"
            ))
        })?;
        if map.insert(index, value).is_some() {
            return Err(usage(format!("--init lists qubit {index} twice")));
        }
    }
    if map.is_empty() {
        return Err(usage("--init needs at least one amplitude"));
    }
    Ok(map)
}

fn resolve_model(args: &ModelArgs, cfg: &ConfigFile) -> Result<ReservoirModel, CliError> {
    let name = cfg
        .pick(args.reservoir.clone(), "reservoir")?
        .ok_or_else(|| usage("--reservoir is required (lorentzian or ohmic)"))?;
    let density = match name.as_str() {
        "lorentzian" => SpectralDensity::Lorentzian {
            gamma0: cfg.pick(args.gamma0, "gamma0")?.unwrap_or(0.2),
            lambda: cfg.pick(args.lambda, "lambda")?.unwrap_or(15.0),
        },
        "ohmic" | "ohmic-family" | "ohmic_family" => SpectralDensity::OhmicFamily {
            s: cfg.pick(args.s, "s")?.unwrap_or(1.0),
            gamma: cfg.pick(args.gamma, "gamma")?.unwrap_or(1.0),
            omega_c: cfg.pick(args.omega_c, "omega-c")?.unwrap_or(1.0),
        },
        other => {
            return Err(usage(format!(
                "unknown reservoir `{other}` (expected lorentzian or ohmic)"
            )))
        }
    };
    let omega0 = cfg.pick(args.omega0, "omega0")?.unwrap_or(1.0);
    ReservoirModel::new(density, omega0).map_err(usage)
}

impl RunConfig {
    fn resolve(
        model_args: &ModelArgs,
        grid: &GridArgs,
        energy: &EnergyArgs,
        force_volterra: bool,
        cfg: &ConfigFile,
    ) -> Result<Self, CliError> {
        let model = resolve_model(model_args, cfg)?;
        let n_text = cfg
            .pick(model_args.n_list.clone(), "n")?
            .unwrap_or_else(|| "2,8,12".into());
        let n_list = parse_n_list(&n_text)?;
        let smallest = *n_list.iter().min().expect("non-empty");

        let pair = match cfg.pick(model_args.pair.clone(), "pair")? {
            Some(text) => parse_pair(&text)?,
            None => (1, 2),
        };
        if pair.0 == pair.1 || pair.0 == 0 || pair.1 == 0 || pair.0.max(pair.1) > smallest {
            return Err(usage(format!(
                "--pair {},{} must name two distinct qubits in 1..={smallest}",
                pair.0, pair.1
            )));
        }
        let init = cfg
            .pick(model_args.init.clone(), "init")?
            .map(|t| parse_init(&t))
            .transpose()?;
        if let Some(bad) = init
            .as_ref()
            .and_then(|m| m.keys().find(|&&k| k == 0 || k > smallest))
        {
            return Err(usage(format!("--init qubit {bad} outside 1..={smallest}")));
        }

        let mut bound = BoundStateOptions::default();
        if let Some(eps) = cfg.pick(model_args.epsilon, "epsilon")? {
            bound.epsilon = eps;
        }
        if let Some(min) = cfg.pick(model_args.beta_sq_min, "beta-sq-min")? {
            bound.beta_sq_min = min;
        }
        if !(bound.epsilon > 0.0 && bound.beta_sq_min >= 0.0) {
            return Err(usage(
                "--epsilon must be positive and --beta-sq-min non-negative",
            ));
        }

        let kernel = if cfg.flag(model_args.half_line_kernel, "half-line-kernel")? {
            LorentzianKernel::HalfLine
        } else {
            LorentzianKernel::Exponential
        };
        let format = cfg
            .pick(model_args.format.clone(), "format")?
            .unwrap_or_else(|| "both".into());

        let cfg_run = Self {
            model,
            n_list,
            pair,
            init,
            out: cfg
                .pick(model_args.out.clone(), "out")?
                .unwrap_or_else(|| PathBuf::from(".")),
            format: format.parse().map_err(usage)?,
            bound,
            kernel,
            dt: cfg.pick(grid.dt, "dt")?.unwrap_or(1.0e-3),
            t_max: cfg.pick(grid.t_max, "t-max")?.unwrap_or(50.0),
            corrector_iterations: cfg
                .pick(grid.corrector_iterations, "corrector-iterations")?
                .unwrap_or(2),
            stride: cfg.pick(grid.stride, "stride")?.unwrap_or(10),
            force_volterra: cfg.flag(force_volterra, "force-volterra")?,
            e_min: cfg.pick(energy.e_min, "e-min")?.unwrap_or(-1.0),
            e_max: cfg.pick(energy.e_max, "e-max")?.unwrap_or(-1.0e-6),
            points: cfg.pick(energy.points, "points")?.unwrap_or(400),
        };
        cfg_run.validate_grid()?;
        Ok(cfg_run)
    }

    fn validate_grid(&self) -> Result<(), CliError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(usage(format!("--dt must be positive, got {}", self.dt)));
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return Err(usage(format!(
                "--t-max must be non-negative, got {}",
                self.t_max
            )));
        }
        if self.t_max > 0.0 && self.t_max < self.dt {
            return Err(usage(format!(
                "--t-max {} is shorter than --dt {}",
                self.t_max, self.dt
            )));
        }
        if self.stride == 0 || self.corrector_iterations == 0 {
            return Err(usage(
                "--stride and --corrector-iterations must be at least 1",
            ));
        }
        Ok(())
    }

    fn validate_energy(&self) -> Result<(), CliError> {
        energy_grid(self.e_min, self.e_max, self.points)
            .map(|_| ())
            .map_err(usage)
    }

    /// Initial state for `n` qubits: the explicit amplitudes (normalised) or
    /// the symmetric pair on the observed qubits.
    pub fn initial_state(&self, n: usize) -> Result<InitialState, CliError> {
        match &self.init {
            Some(map) => {
                let norm: f64 = map.values().map(|c| c.norm_sqr()).sum();
                if (norm - 1.0).abs() > crate::dynamics::NORM_TOL {
                    eprintln!("note: initial amplitudes have norm² {norm}; rescaling to 1");
                }
                InitialState::normalized(n, map).map_err(usage)
            }
            None => InitialState::symmetric_pair(n, self.pair.0, self.pair.1).map_err(usage),
        }
    }

    fn volterra_options(&self) -> Result<VolterraOptions, CliError> {
        VolterraOptions::new(self.dt, self.t_max)
            .map(|o| o.with_corrector_iterations(self.corrector_iterations))
            .map_err(usage)
    }

    fn uses_analytic_path(&self) -> bool {
        self.model.is_lorentzian()
            && self.kernel == LorentzianKernel::Exponential
            && !self.force_volterra
    }
}

/// Fixed 17-significant-digit formatting so reruns are byte-identical.
pub fn fmt_num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn check_finite(values: &[f64], what: &str) -> Result<(), CliError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(CliError::Numerical(Error::Domain(format!(
            "non-finite value in {what}"
        ))))
    }
}

fn csv_row(values: &[f64]) -> String {
    let mut row = values
        .iter()
        .map(|&v| fmt_num(v))
        .collect::<Vec<_>>()
        .join(",");
    row.push('\n');
    row
}

/// One output file plus its manifest entry.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub file: String,
    pub contents: String,
    pub meta: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumResult {
    pub model: ReservoirModel,
    pub bound_states: Vec<BoundStateReport>,
}

/// `spectrum.csv` contents and the bound-state reports, one per `N`.
pub fn spectrum_table(
    model: &ReservoirModel,
    n_list: &[usize],
    grid: &[f64],
    bound: &BoundStateOptions,
) -> Result<(String, Vec<BoundStateReport>), CliError> {
    let columns: Vec<Vec<f64>> = n_list
        .par_iter()
        .map(|&n| {
            grid.iter()
                .map(|&e| y_of(model, n, e))
                .collect::<crate::Result<Vec<_>>>()
        })
        .collect::<crate::Result<_>>()?;
    let reports: Vec<BoundStateReport> = n_list
        .par_iter()
        .map(|&n| find_bound_state(model, n, bound))
        .collect::<crate::Result<_>>()?;

    let mut csv = String::from("E");
    for n in n_list {
        write!(csv, ",y_N{n}").unwrap();
    }
    csv.push_str(",diagonal\n");
    for (i, &e) in grid.iter().enumerate() {
        let mut row = vec![e];
        row.extend(columns.iter().map(|c| c[i]));
        row.push(e);
        check_finite(&row, "spectrum table")?;
        csv.push_str(&csv_row(&row));
    }
    Ok((csv, reports))
}

/// Rows written for a trajectory: every `stride`-th step plus the last one.
fn output_rows(len: usize, stride: usize) -> impl Iterator<Item = usize> {
    (0..len).filter(move |&i| i % stride == 0 || i + 1 == len)
}

pub const DYNAMICS_HEADER: &str = "t,re_S,im_S,re_Cm,im_Cm,re_Cn,im_Cn,concurrence";

pub fn dynamics_csv(
    traj: &Trajectory,
    pair: (usize, usize),
    stride: usize,
) -> Result<String, CliError> {
    let mut csv = format!("{DYNAMICS_HEADER}\n");
    let (cm, cn) = (traj.amplitude(pair.0), traj.amplitude(pair.1));
    for i in output_rows(traj.len(), stride) {
        let c = concurrence_from_amplitudes(cm[i], cn[i])?;
        let s = traj.collective[i];
        let row = [
            traj.t_grid[i],
            s.re,
            s.im,
            cm[i].re,
            cm[i].im,
            cn[i].re,
            cn[i].im,
            c,
        ];
        check_finite(&row, "dynamics table")?;
        csv.push_str(&csv_row(&row));
    }
    Ok(csv)
}

fn dynamics_json(
    traj: &Trajectory,
    n: usize,
    pair: (usize, usize),
    stride: usize,
) -> Result<String, CliError> {
    let rows: Vec<usize> = output_rows(traj.len(), stride).collect();
    let (cm, cn) = (traj.amplitude(pair.0), traj.amplitude(pair.1));
    let concurrence = rows
        .iter()
        .map(|&i| concurrence_from_amplitudes(cm[i], cn[i]))
        .collect::<crate::Result<Vec<_>>>()?;
    let pick = |f: &dyn Fn(usize) -> f64| rows.iter().map(|&i| f(i)).collect::<Vec<f64>>();
    let value = json!({
        "n_qubits": n,
        "pair": [pair.0, pair.1],
        "t": pick(&|i| traj.t_grid[i]),
        "re_S": pick(&|i| traj.collective[i].re),
        "im_S": pick(&|i| traj.collective[i].im),
        "re_Cm": pick(&|i| cm[i].re),
        "im_Cm": pick(&|i| cm[i].im),
        "re_Cn": pick(&|i| cn[i].re),
        "im_Cn": pick(&|i| cn[i].im),
        "concurrence": concurrence,
    });
    Ok(serde_json::to_string_pretty(&value).expect("serialisable") + "\n")
}

/// Propagates `n` qubits, choosing the closed form for the exponential
/// Lorentzian kernel unless `force_volterra` is set.
pub fn run_trajectory(cfg: &RunConfig, n: usize) -> Result<Trajectory, CliError> {
    let init = cfg.initial_state(n)?;
    if cfg.t_max == 0.0 {
        return Ok(Trajectory::snapshot(&init));
    }
    let opts = cfg.volterra_options()?;
    let traj = if cfg.uses_analytic_path() {
        propagate_lorentzian_analytic(&cfg.model, &init, &opts.grid())?
    } else {
        propagate_volterra(&cfg.model, &init, &opts, cfg.kernel)?
    };
    Ok(traj)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate_energy()?;
    let grid = energy_grid(cfg.e_min, cfg.e_max, cfg.points).map_err(usage)?;
    let (csv, reports) = spectrum_table(&cfg.model, &cfg.n_list, &grid, &cfg.bound)?;
    let mut written = Vec::new();
    if cfg.format.csv() {
        written.push(write_file(&cfg.out, "spectrum.csv", &csv)?);
    }
    if cfg.format.json() {
        let result = SpectrumResult {
            model: cfg.model,
            bound_states: reports,
        };
        let text = serde_json::to_string_pretty(&result).expect("serialisable") + "\n";
        written.push(write_file(&cfg.out, "boundstates.json", &text)?);
    }
    Ok(written)
}

fn cmd_dynamics(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let outputs: Vec<(usize, Trajectory)> = cfg
        .n_list
        .par_iter()
        .map(|&n| run_trajectory(cfg, n).map(|t| (n, t)))
        .collect::<Result<_, _>>()?;
    let mut written = Vec::new();
    for (n, traj) in &outputs {
        if cfg.format.csv() {
            let csv = dynamics_csv(traj, cfg.pair, cfg.stride)?;
            written.push(write_file(&cfg.out, &format!("dynamics_N{n}.csv"), &csv)?);
        }
        if cfg.format.json() {
            let text = dynamics_json(traj, *n, cfg.pair, cfg.stride)?;
            written.push(write_file(&cfg.out, &format!("dynamics_N{n}.json"), &text)?);
        }
    }
    Ok(written)
}

#[derive(Debug, Clone, Serialize)]
pub struct SteadyEntry {
    pub steady: SteadyPrediction,
    pub bound_state: BoundStateReport,
    /// Whether the bound state entered the prediction. The exponential
    /// Lorentzian kernel describes a reservoir extending over all
    /// frequencies, which has no isolated eigenvalue, so its long-time limit
    /// is the dark component alone.
    pub bound_state_used: bool,
}

/// Steady prediction for `n` qubits under the configured kernel.
pub fn steady_entry(cfg: &RunConfig, n: usize) -> Result<SteadyEntry, CliError> {
    let init = cfg.initial_state(n)?;
    let report = find_bound_state(&cfg.model, n, &cfg.bound)?;
    let used = !(cfg.model.is_lorentzian() && cfg.kernel == LorentzianKernel::Exponential);
    let effective = if used {
        report.clone()
    } else {
        BoundStateReport {
            exists: false,
            e_bs: None,
            beta_sq: None,
            ..report.clone()
        }
    };
    let steady = predict_steady(&cfg.model, &init, cfg.pair, &effective)?;
    let bound_state_used = used && report.exists;
    Ok(SteadyEntry {
        steady,
        bound_state: report,
        bound_state_used,
    })
}

fn cmd_steady(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let entries: Vec<(usize, SteadyEntry)> = cfg
        .n_list
        .par_iter()
        .map(|&n| steady_entry(cfg, n).map(|e| (n, e)))
        .collect::<Result<_, _>>()?;
    let mut written = Vec::new();
    if cfg.format.json() {
        let results: serde_json::Map<String, Value> = entries
            .iter()
            .map(|(n, e)| {
                (
                    n.to_string(),
                    serde_json::to_value(e).expect("serialisable"),
                )
            })
            .collect();
        let value = json!({
            "model": cfg.model,
            "pair": [cfg.pair.0, cfg.pair.1],
            "kernel": cfg.kernel,
            "results": results,
        });
        let text = serde_json::to_string_pretty(&value).expect("serialisable") + "\n";
        written.push(write_file(&cfg.out, "steady.json", &text)?);
    }
    if cfg.format.csv() {
        let mut csv = String::from(
            "N,exists,e_bs,beta_sq,concurrence_min,concurrence_mean,concurrence_max\n",
        );
        for (n, e) in &entries {
            let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
            writeln!(
                csv,
                "{n},{},{},{},{},{},{}",
                e.bound_state.exists,
                opt(e.bound_state.e_bs),
                opt(e.bound_state.beta_sq),
                fmt_num(e.steady.concurrence_min),
                fmt_num(e.steady.concurrence_mean),
                fmt_num(e.steady.concurrence_max),
            )
            .unwrap();
        }
        written.push(write_file(&cfg.out, "steady.csv", &csv)?);
    }
    Ok(written)
}

/// One panel pair of a figure: a spectrum file and the dynamics files.
struct Panel {
    spectrum_label: &'static str,
    dynamics_label: &'static str,
    model: ReservoirModel,
    e_min: f64,
}

enum Job<'a> {
    Spectrum(&'a Panel),
    Dynamics(&'a Panel, usize),
}

fn figure_panels(figure: &str) -> Result<Vec<Panel>, CliError> {
    let lorentz = |gamma0, lambda| ReservoirModel::lorentzian(gamma0, lambda).expect("valid");
    let ohmic = |s| ReservoirModel::ohmic(s, 1.0, 1.0).expect("valid");
    Ok(match figure {
        "fig1" => vec![
            Panel {
                spectrum_label: "fig1a",
                dynamics_label: "fig1b",
                model: lorentz(0.2, 15.0),
                e_min: -1.0,
            },
            Panel {
                spectrum_label: "fig1c",
                dynamics_label: "fig1d",
                model: lorentz(1.0, 0.5),
                e_min: -1.0,
            },
        ],
        "fig2" => vec![
            Panel {
                spectrum_label: "fig2a",
                dynamics_label: "fig2b",
                model: ohmic(0.5),
                e_min: -1.0,
            },
            Panel {
                spectrum_label: "fig2c",
                dynamics_label: "fig2d",
                model: ohmic(1.0),
                e_min: -1.0,
            },
            Panel {
                spectrum_label: "fig2e",
                dynamics_label: "fig2f",
                model: ohmic(2.0),
                e_min: -1.0,
            },
        ],
        other => {
            return Err(usage(format!(
                "unknown figure `{other}` (expected fig1 or fig2)"
            )))
        }
    })
}

/// Computes every artifact of a figure. Cells run in parallel; the result
/// order is fixed by the job list, not by completion order.
pub fn reproduce_artifacts(figure: &str, base: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    const N_LIST: [usize; 3] = [2, 8, 12];
    let panels = figure_panels(figure)?;
    let mut jobs = Vec::new();
    for panel in &panels {
        jobs.push(Job::Spectrum(panel));
        jobs.extend(N_LIST.iter().map(|&n| Job::Dynamics(panel, n)));
    }

    jobs.par_iter()
        .map(|job| match *job {
            Job::Spectrum(panel) => {
                let e_min = if base.e_min == -1.0 {
                    panel.e_min
                } else {
                    base.e_min
                };
                let grid = energy_grid(e_min, base.e_max, base.points).map_err(usage)?;
                let (csv, reports) = spectrum_table(&panel.model, &N_LIST, &grid, &base.bound)?;
                Ok(Artifact {
                    file: format!("{}_spectrum.csv", panel.spectrum_label),
                    contents: csv,
                    meta: json!({
                        "kind": "spectrum",
                        "model": panel.model,
                        "n_list": N_LIST,
                        "e_min": e_min,
                        "e_max": base.e_max,
                        "points": base.points,
                        "bound_states": reports,
                    }),
                })
            }
            Job::Dynamics(panel, n) => {
                let cfg = RunConfig {
                    model: panel.model,
                    n_list: vec![n],
                    ..base.clone()
                };
                let traj = run_trajectory(&cfg, n)?;
                Ok(Artifact {
                    file: format!("{}_dynamics_N{n}.csv", panel.dynamics_label),
                    contents: dynamics_csv(&traj, cfg.pair, cfg.stride)?,
                    meta: json!({
                        "kind": "dynamics",
                        "model": panel.model,
                        "n_qubits": n,
                        "pair": [cfg.pair.0, cfg.pair.1],
                        "dt": cfg.dt,
                        "t_max": cfg.t_max,
                        "stride": cfg.stride,
                        "method": if cfg.uses_analytic_path() { "analytic" } else { "volterra" },
                    }),
                })
            }
        })
        .collect()
}

fn cmd_reproduce(figure: &str, base: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let artifacts = reproduce_artifacts(figure, base)?;
    let mut written = Vec::new();
    let mut entries = Vec::new();
    for artifact in &artifacts {
        written.push(write_file(&base.out, &artifact.file, &artifact.contents)?);
        let mut meta = artifact.meta.clone();
        meta["file"] = Value::String(artifact.file.clone());
        entries.push(meta);
    }
    let manifest = json!({ "figure": figure, "files": entries });
    let text = serde_json::to_string_pretty(&manifest).expect("serialisable") + "\n";
    written.push(write_file(&base.out, "manifest.json", &text)?);
    Ok(written)
}

/// Resolves the configuration and runs the selected command, returning the
/// paths written.
pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let cfg_file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match &cli.command {
        Command::Spectrum(a) => {
            let cfg =
                RunConfig::resolve(&a.model, &GridArgs::default(), &a.energy, false, &cfg_file)?;
            cmd_spectrum(&cfg)
        }
        Command::Dynamics(a) => {
            let cfg = RunConfig::resolve(
                &a.model,
                &a.grid,
                &EnergyArgs::default(),
                a.force_volterra,
                &cfg_file,
            )?;
            cmd_dynamics(&cfg)
        }
        Command::Steady(a) => {
            let cfg = RunConfig::resolve(
                &a.model,
                &GridArgs::default(),
                &EnergyArgs::default(),
                false,
                &cfg_file,
            )?;
            cmd_steady(&cfg)
        }
        Command::Reproduce(a) => {
            figure_panels(&a.figure)?;
            let model_args = ModelArgs {
                reservoir: Some("ohmic".into()),
                out: a.out.clone(),
                ..ModelArgs::default()
            };
            let base = RunConfig::resolve(&model_args, &a.grid, &a.energy, false, &cfg_file)?;
            cmd_reproduce(&a.figure, &base)
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = err.exit_code();
            let _ = err.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(paths) => {
            for path in paths {
                println!("{}", path.display());
            }
            0
        }
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
