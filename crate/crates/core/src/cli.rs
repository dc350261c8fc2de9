//! Batch front end behind the `coherence` binary.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input or arguments,
//! 3 internal invariant violation. Diagnostics go to standard error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::basis_opt::{maximize, SearchConfig, Target};
use crate::error::Error;
use crate::format;
use crate::infdim::{
    build_cv_grid, coherent_fock, commutator_check, geometric_oam, oam_to_angle, p_inf_angle,
    p_inf_cv, p_inf_fock, p_inf_oam, p_inf_wigner, read_infdim_state, thermal_fock, wigner_from_cv,
    ConvergenceLadder, CvGrid, CvState, FockState, InfdimState, OamState,
};
use crate::measures::{coherence_report, p_n};
use crate::state::{random_state, read_state, write_state, RandomKind, DEFAULT_TOLERANCE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

const MAX_BUDGET: u64 = 1_000_000_000;
const MAX_DISCRETE_CUTOFF: usize = 4096;
const MAX_CV_CUTOFF: usize = 2048;
const MAX_ANGLE_GRID: usize = 16384;
const MAX_DIM: usize = 512;

#[derive(Debug, Parser)]
#[command(
    name = "coherence",
    version,
    about = "Intrinsic degree of coherence of quantum states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coherence report for one or more state files.
    Report(ReportArgs),
    /// Search over bases for the largest μ_N or visibility.
    Maximize(MaximizeArgs),
    /// P_∞ of an infinite-dimensional state by every applicable route.
    Infdim(InfdimArgs),
    /// Write a seeded random state file.
    Random(RandomArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Tsv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// State files; several may be given and are processed in parallel.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Validation tolerance for Hermiticity, trace and positivity.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Mu,
    Visibility,
}

#[derive(Debug, Args)]
pub struct MaximizeArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub target: TargetArg,
    /// Objective evaluations.
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Record the best value every this many evaluations (0: off).
    #[arg(long, default_value_t = 0)]
    pub trace_stride: u64,
    /// Search from Haar-random bases only, without the analytic maximizer.
    #[arg(long)]
    pub haar_only: bool,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct InfdimArgs {
    /// State family with parameters, e.g. `thermal-fock:nbar=1`.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub family: Option<String>,
    /// Tagged OAM, Fock or CV state file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Cutoff D of the top ladder rung.
    #[arg(long)]
    pub grid_d: Option<usize>,
    /// Momentum extent of the top CV rung.
    #[arg(long)]
    pub p_max: Option<f64>,
    /// Angular grid size for the angle route.
    #[arg(long)]
    pub grid_m: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RandomArgs {
    #[arg(long)]
    pub dim: usize,
    /// haar_pure, ginibre_mixed or rank_k:K.
    #[arg(long, default_value = "ginibre_mixed")]
    pub kind: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// A failure with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("{}: {}", path.display(), e),
        }
    }

    fn in_file(self, path: &Path) -> Self {
        let prefix = path.display().to_string();
        if self.message.starts_with(&prefix) {
            return self;
        }
        Self {
            code: self.code,
            message: format!("{}: {}", path.display(), self.message),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self {
            code: if e.is_validation() {
                EXIT_INVALID
            } else {
                EXIT_INTERNAL
            },
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_INVALID
                }
            };
        }
    };
    let (outcome, output) = match &cli.command {
        Command::Report(a) => (cmd_report(a), a.out.output.as_deref()),
        Command::Maximize(a) => (cmd_maximize(a), a.out.output.as_deref()),
        Command::Infdim(a) => (cmd_infdim(a), a.out.output.as_deref()),
        Command::Random(a) => (cmd_random(a), a.output.as_deref()),
    };
    let (text, errors) = outcome;
    let mut code = errors.iter().map(|e| e.code).max().unwrap_or(EXIT_OK);
    for e in &errors {
        let _ = writeln!(stderr, "error: {}", e.message);
    }
    if let Some(text) = text {
        let written = match output {
            Some(path) => std::fs::write(path, &text).map_err(|e| CliError::io(path, e)),
            None => stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
        };
        if let Err(e) = written {
            let _ = writeln!(stderr, "error: {}", e.message);
            code = code.max(EXIT_IO);
        }
    }
    code
}

/// Rendered output, if any, plus every error met along the way.
type Outcome = (Option<String>, Vec<CliError>);

fn single(result: CliResult<String>) -> Outcome {
    match result {
        Ok(text) => (Some(text), Vec::new()),
        Err(e) => (None, vec![e]),
    }
}

fn check_tol(tol: f64) -> CliResult<()> {
    if tol > 0.0 && tol <= 1e-3 {
        Ok(())
    } else {
        Err(CliError::invalid(format!(
            "--tol must lie in (0, 1e-3], got {}",
            tol
        )))
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Runs `f` on every input in parallel and renders the successes in input
/// order. One input gives a bare object, several give an array.
fn per_input(
    inputs: &[PathBuf],
    format: OutputFormat,
    f: impl Fn(&Path) -> CliResult<Value> + Sync,
) -> Outcome {
    let results: Vec<CliResult<Value>> = inputs
        .par_iter()
        .map(|path| {
            f(path)
                .map(|v| with_input(path, v))
                .map_err(|e| e.in_file(path))
        })
        .collect();
    let mut values = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(v) => values.push(v),
            Err(e) => errors.push(e),
        }
    }
    if values.is_empty() {
        return (None, errors);
    }
    let combined = if inputs.len() == 1 {
        values.pop().expect("one value")
    } else {
        Value::Array(values)
    };
    (Some(render(&combined, format)), errors)
}

fn with_input(path: &Path, v: Value) -> Value {
    let mut obj = Map::new();
    obj.insert("input".into(), json!(path.display().to_string()));
    if let Value::Object(m) = v {
        obj.extend(m);
    }
    Value::Object(obj)
}

pub fn cmd_report(a: &ReportArgs) -> Outcome {
    if let Err(e) = check_tol(a.tol) {
        return (None, vec![e]);
    }
    per_input(&a.input, a.out.format, |path| {
        let rho = read_state(&read_text(path)?, a.tol)?;
        Ok(coherence_report(&rho)?.to_json())
    })
}

pub fn cmd_maximize(a: &MaximizeArgs) -> Outcome {
    if let Err(e) = check_tol(a.tol) {
        return (None, vec![e]);
    }
    if a.budget == 0 || a.budget > MAX_BUDGET {
        return (
            None,
            vec![CliError::invalid(format!(
                "--budget must lie in [1, {}]",
                MAX_BUDGET
            ))],
        );
    }
    let target = match a.target {
        TargetArg::Mu => Target::Mu,
        TargetArg::Visibility => Target::Visibility,
    };
    let mut config = SearchConfig::new(a.budget, a.seed).with_trace_stride(a.trace_stride);
    config.analytic_seed = !a.haar_only;
    per_input(&a.input, a.out.format, |path| {
        let rho = read_state(&read_text(path)?, a.tol)?;
        let result = maximize(&rho, target, &config)?;
        let analytic = p_n(&rho)?;
        let mut v = result.to_json();
        v["analytic_value"] = format::num(analytic);
        v["gap"] = format::num(analytic - result.best_value);
        Ok(v)
    })
}

pub fn cmd_random(a: &RandomArgs) -> Outcome {
    single((|| {
        if a.dim < 2 || a.dim > MAX_DIM {
            return Err(CliError::invalid(format!(
                "--dim must lie in [2, {}]",
                MAX_DIM
            )));
        }
        let kind: RandomKind = a.kind.parse()?;
        Ok(write_state(&random_state(a.dim, kind, a.seed)?))
    })())
}

pub fn cmd_infdim(a: &InfdimArgs) -> Outcome {
    single((|| {
        if !(a.hbar > 0.0) || !a.hbar.is_finite() {
            return Err(CliError::invalid("--hbar must be a positive number"));
        }
        if let Some(p) = a.p_max {
            if !(p > 0.0) || !p.is_finite() {
                return Err(CliError::invalid("--p-max must be a positive number"));
            }
        }
        let value = match (&a.family, &a.input) {
            (Some(spec), _) => infdim_family(&Family::parse(spec)?, a)?,
            (None, Some(path)) => infdim_file(path, a)?,
            (None, None) => return Err(CliError::invalid("need --family or --input")),
        };
        Ok(render(&value, a.out.format))
    })())
}

/// A state family named on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    GeometricOam {
        q: f64,
    },
    ThermalFock {
        nbar: f64,
    },
    CoherentFock {
        alpha: Complex64,
    },
    GaussianCv {
        sigma: Option<f64>,
        x0: f64,
        p0: f64,
    },
    ThermalCv {
        nbar: f64,
        sigma0: Option<f64>,
    },
}

impl Family {
    /// `name` or `name:key=value,key=value`. Unknown keys are rejected.
    pub fn parse(spec: &str) -> CliResult<Self> {
        let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let mut params = BTreeMap::new();
        for item in rest.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::invalid(format!("expected key=value, got '{}'", item)))?;
            let x: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::invalid(format!("'{}' is not a number", v)))?;
            if !x.is_finite() {
                return Err(CliError::invalid(format!("{} must be finite", k)));
            }
            params.insert(k.trim().to_string(), x);
        }
        let allowed: &[&str] = match name {
            "geometric-oam" => &["q"],
            "thermal-fock" => &["nbar"],
            "coherent-fock" => &["alpha", "phase"],
            "gaussian-cv" => &["sigma", "x0", "p0"],
            "thermal-cv" => &["nbar", "sigma0"],
            other => return Err(CliError::invalid(format!("unknown family '{}'", other))),
        };
        if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(CliError::invalid(format!(
                "unknown parameter '{}' for {} (allowed: {})",
                k,
                name,
                allowed.join(", ")
            )));
        }
        let get = |k: &str, default: f64| params.get(k).copied().unwrap_or(default);
        Ok(match name {
            "geometric-oam" => Family::GeometricOam { q: get("q", 0.5) },
            "thermal-fock" => Family::ThermalFock {
                nbar: get("nbar", 1.0),
            },
            "coherent-fock" => Family::CoherentFock {
                alpha: Complex64::from_polar(get("alpha", 2f64.sqrt()), get("phase", 0.0)),
            },
            "gaussian-cv" => Family::GaussianCv {
                sigma: params.get("sigma").copied(),
                x0: get("x0", 0.0),
                p0: get("p0", 0.0),
            },
            _ => Family::ThermalCv {
                nbar: get("nbar", 1.0),
                sigma0: params.get("sigma0").copied(),
            },
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::GeometricOam { .. } => "geometric-oam",
            Family::ThermalFock { .. } => "thermal-fock",
            Family::CoherentFock { .. } => "coherent-fock",
            Family::GaussianCv { .. } => "gaussian-cv",
            Family::ThermalCv { .. } => "thermal-cv",
        }
    }

    fn default_cutoff(&self) -> usize {
        match self {
            Family::GeometricOam { .. } => 60,
            Family::ThermalFock { .. } | Family::CoherentFock { .. } => 80,
            Family::GaussianCv { .. } | Family::ThermalCv { .. } => 256,
        }
    }

    /// Closed-form P_∞ of the untruncated state.
    fn analytic(&self) -> f64 {
        match *self {
            Family::GeometricOam { q } => ((1.0 - q) / (1.0 + q)).sqrt(),
            Family::ThermalFock { nbar } | Family::ThermalCv { nbar, .. } => {
                1.0 / (2.0 * nbar + 1.0).sqrt()
            }
            Family::CoherentFock { .. } | Family::GaussianCv { .. } => 1.0,
        }
    }

    fn parameters(&self) -> Value {
        match *self {
            Family::GeometricOam { q } => json!({ "q": format::num(q) }),
            Family::ThermalFock { nbar } => json!({ "nbar": format::num(nbar) }),
            Family::CoherentFock { alpha } => {
                json!({ "alpha": format::num(alpha.norm()), "phase": format::num(alpha.arg()) })
            }
            Family::GaussianCv { sigma, x0, p0 } => json!({
                "sigma": sigma.map_or(Value::Null, format::num),
                "x0": format::num(x0),
                "p0": format::num(p0),
            }),
            Family::ThermalCv { nbar, sigma0 } => json!({
                "nbar": format::num(nbar),
                "sigma0": sigma0.map_or(Value::Null, format::num),
            }),
        }
    }
}

/// D/4, D/2, D without repeats.
fn ladder_cutoffs(top: usize) -> Vec<usize> {
    let mut v: Vec<usize> = [top / 4, top / 2, top]
        .into_iter()
        .filter(|&d| d >= 1)
        .collect();
    v.dedup();
    v
}

fn discrete_cutoff(a: &InfdimArgs, default: usize) -> CliResult<usize> {
    let d = a.grid_d.unwrap_or(default);
    if d > MAX_DISCRETE_CUTOFF {
        return Err(CliError::invalid(format!(
            "--grid-d must be at most {}",
            MAX_DISCRETE_CUTOFF
        )));
    }
    Ok(d)
}

fn angle_grid(a: &InfdimArgs, cutoff: usize) -> CliResult<usize> {
    let m = a.grid_m.unwrap_or_else(|| (2 * (2 * cutoff + 1)).max(512));
    if m > MAX_ANGLE_GRID {
        return Err(CliError::invalid(format!(
            "--grid-m must be at most {}",
            MAX_ANGLE_GRID
        )));
    }
    Ok(m)
}

fn infdim_family(f: &Family, a: &InfdimArgs) -> CliResult<Value> {
    let mut out = match f {
        Family::GeometricOam { q } => {
            let top = discrete_cutoff(a, f.default_cutoff())?;
            let mut ladder = ConvergenceLadder::default();
            for d in ladder_cutoffs(top) {
                let p = p_inf_oam(&geometric_oam(*q, d)?)?;
                ladder.push(d, p.value, vec![("error_bound", p.error_bound)]);
            }
            let mut v = oam_routes(&geometric_oam(*q, top)?, angle_grid(a, top)?)?;
            v["ladder"] = ladder_json(&ladder);
            v
        }
        Family::ThermalFock { nbar } => {
            fock_report(a, f, |d| thermal_fock(*nbar, d).map_err(CliError::from))?
        }
        Family::CoherentFock { alpha } => {
            fock_report(a, f, |d| coherent_fock(*alpha, d).map_err(CliError::from))?
        }
        Family::GaussianCv { sigma, x0, p0 } => {
            let sigma = sigma.unwrap_or_else(|| CvState::default_sigma0(a.hbar));
            cv_report(a, f, |g| {
                CvState::gaussian(g, sigma, *x0, *p0).map_err(CliError::from)
            })?
        }
        Family::ThermalCv { nbar, sigma0 } => {
            let s0 = sigma0.unwrap_or_else(|| CvState::default_sigma0(a.hbar));
            cv_report(a, f, |g| {
                CvState::thermal(g, *nbar, s0).map_err(CliError::from)
            })?
        }
    };
    let analytic = f.analytic();
    let mut head = Map::new();
    head.insert("family".into(), json!(f.name()));
    head.insert("parameters".into(), f.parameters());
    head.insert("analytic".into(), format::num(analytic));
    if let Value::Object(m) = &mut out {
        head.append(m);
    }
    Ok(Value::Object(head))
}

fn ladder_json(ladder: &ConvergenceLadder) -> Value {
    json!({
        "rungs": ladder.to_json(),
        "error_estimate": ladder.error_estimate().map_or(Value::Null, format::num),
    })
}

fn oam_routes(s: &OamState, grid_m: usize) -> CliResult<Value> {
    let oam = p_inf_oam(s)?;
    let angle = p_inf_angle(&oam_to_angle(s, grid_m)?)?;
    Ok(json!({
        "cutoff": s.cutoff(),
        "routes": {
            "oam": oam.to_json(),
            "angle": { "value": format::num(angle), "grid_m": grid_m },
        },
        "route_agreement": format::num((oam.value - angle).abs()),
    }))
}

fn fock_report(
    a: &InfdimArgs,
    f: &Family,
    build: impl Fn(usize) -> CliResult<FockState>,
) -> CliResult<Value> {
    let top = discrete_cutoff(a, f.default_cutoff())?;
    let mut ladder = ConvergenceLadder::default();
    for d in ladder_cutoffs(top) {
        let p = p_inf_fock(&build(d)?)?;
        ladder.push(d, p.value, vec![("error_bound", p.error_bound)]);
    }
    let p = p_inf_fock(&build(top)?)?;
    Ok(json!({
        "cutoff": top,
        "routes": { "fock": p.to_json() },
        "ladder": ladder_json(&ladder),
    }))
}

/// Rungs D/4, D/2, D with p_max ∝ √D, so Δx shrinks while the position
/// range DΔx grows.
fn cv_report(
    a: &InfdimArgs,
    f: &Family,
    build: impl Fn(CvGrid) -> CliResult<CvState>,
) -> CliResult<Value> {
    let top = a.grid_d.unwrap_or(f.default_cutoff());
    if top == 0 || top > MAX_CV_CUTOFF {
        return Err(CliError::invalid(format!(
            "--grid-d must lie in [1, {}]",
            MAX_CV_CUTOFF
        )));
    }
    let p_top = a.p_max.unwrap_or(10.0);
    let mut ladder = ConvergenceLadder::default();
    let mut last = None;
    for d in ladder_cutoffs(top) {
        let grid = build_cv_grid(d, p_top * (d as f64 / top as f64).sqrt(), a.hbar)?;
        let s = build(grid)?;
        let c = commutator_check(&grid, &s)?;
        ladder.push(
            d,
            p_inf_cv(&s)?,
            vec![
                ("p_max", grid.p_max()),
                ("raw_trace", s.raw_trace().unwrap_or(1.0)),
                ("commutator_deviation", c.deviation),
            ],
        );
        last = Some((s, c));
    }
    let (s, c) = last.expect("at least one rung");
    let mut v = cv_routes(&s)?;
    v["commutator"] = c.to_json();
    v["ladder"] = ladder_json(&ladder);
    Ok(v)
}

fn cv_routes(s: &CvState) -> CliResult<Value> {
    let position = s.to_position();
    let momentum = s.to_momentum();
    let px = p_inf_cv(&position)?;
    let pp = p_inf_cv(&momentum)?;
    let steps = s.grid().size();
    let pw = p_inf_wigner(&wigner_from_cv(&position, steps, steps)?, s.grid().hbar())?;
    Ok(json!({
        "cutoff": s.grid().cutoff(),
        "grid": s.grid().to_json(),
        "routes": {
            "position": format::num(px),
            "momentum": format::num(pp),
            "wigner": { "value": format::num(pw), "steps": steps },
        },
        "representation_agreement": format::num((px - pp).abs()),
    }))
}

fn infdim_file(path: &Path, a: &InfdimArgs) -> CliResult<Value> {
    let state =
        read_infdim_state(&read_text(path)?).map_err(|e| CliError::from(e).in_file(path))?;
    let mut v = match &state {
        InfdimState::Oam(s) => oam_routes(s, angle_grid(a, s.cutoff())?)?,
        InfdimState::Fock(s) => json!({
            "cutoff": s.cutoff(),
            "routes": { "fock": p_inf_fock(s)?.to_json() },
        }),
        InfdimState::Cv(s) => {
            let mut v = cv_routes(s)?;
            v["commutator"] = commutator_check(s.grid(), s)?.to_json();
            v
        }
    };
    v["input"] = json!(path.display().to_string());
    Ok(v)
}

/// JSON pretty-printed, or TSV as `path<TAB>value` per scalar leaf.
pub fn render(v: &Value, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => format::to_pretty(v),
        OutputFormat::Tsv => {
            let mut out = String::new();
            flatten_tsv("", v, &mut out);
            out
        }
    }
}

fn flatten_tsv(prefix: &str, v: &Value, out: &mut String) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{}.{}", prefix, k)
        }
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten_tsv(&key(k), x, out);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten_tsv(&key(&i.to_string()), x, out);
            }
        }
        Value::Number(n) => {
            let text = match n.as_u64() {
                Some(u) => u.to_string(),
                None => format::tsv_num(n.as_f64().unwrap_or(f64::NAN)),
            };
            out.push_str(&format!("{}\t{}\n", prefix, text));
        }
        Value::Null => out.push_str(&format!("{}\tNA\n", prefix)),
        Value::Bool(b) => out.push_str(&format!("{}\t{}\n", prefix, b)),
        Value::String(s) => out.push_str(&format!("{}\t{}\n", prefix, s)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_parsing() {
        assert_eq!(
            Family::parse("thermal-fock:nbar=2").unwrap(),
            Family::ThermalFock { nbar: 2.0 }
        );
        assert_eq!(
            Family::parse("geometric-oam").unwrap(),
            Family::GeometricOam { q: 0.5 }
        );
        assert!(Family::parse("thermal-fock:temperature=2").is_err());
        assert!(Family::parse("thermal-fock:nbar").is_err());
        assert!(Family::parse("squeezed").is_err());
        assert!(Family::parse("gaussian-cv:sigma=nan").is_err());
    }

    #[test]
    fn ladder_rungs() {
        assert_eq!(ladder_cutoffs(80), vec![20, 40, 80]);
        assert_eq!(ladder_cutoffs(2), vec![1, 2]);
        assert_eq!(ladder_cutoffs(1), vec![1]);
    }

    #[test]
    fn tsv_flattening() {
        let v = json!({"a": {"b": format::num(0.264_575_131_106_459)}, "c": [1, null], "d": "x"});
        assert_eq!(
            render(&v, OutputFormat::Tsv),
            "a.b\t0.264575131106\nc.0\t1\nc.1\tNA\nd\tx\n"
        );
    }

    #[test]
    fn error_codes() {
        assert_eq!(
            CliError::from(Error::NotPSD {
                min_eigenvalue: -1.0
            })
            .code,
            EXIT_INVALID
        );
        let internal = Error::InternalInvariantViolation {
            what: "x".into(),
            discrepancy: 1.0,
        };
        assert_eq!(CliError::from(internal).code, EXIT_INTERNAL);
    }
}
