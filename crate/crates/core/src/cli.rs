//! The `pqc` command line: argument parsing, job execution and artifact
//! writing. Everything here is callable from tests.
//!
//! Exit statuses: 0 success, 1 validation failure, 2 usage or parse failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::channel::{Channel, KrausChannel};
use crate::config::{read_json, LoadedConfig, Method, GATE_DIM};
use crate::error::{arg_err, dim_err, Error, Result};
use crate::linalg::{haar_random_pure_state, validate_density_matrix, DensityMatrix, PureState};
use crate::metrics::{diamond_distance, embed_witness, AscentConfig, CostEvaluation, CostLandscape, ExtensionIndex};
use crate::minmax::{cnot_mixture_family, golden_section_min, minmax_gda, sweep, ParametricChannel, SweepCurve};
use crate::noise::{
    amplitude_damping_kraus, build_cnot_variant, depolarizing_kraus, ideal_cnot_channel, noise_layer,
    single_qubit_noise, CnotVariants,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Channels built by `validate` must pass at this tolerance.
pub const VALIDATE_TOL: f64 = 1e-10;
const OUTPUT_STATE_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "pqc", version, about = "Parametric quantum channel experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build every channel in a config and check it is CPTP.
    Validate { config: PathBuf },
    /// Evaluate worst-case and mean cost over a grid of mixing weights.
    Sweep {
        config: PathBuf,
        /// Number of grid points (overrides optimizer.grid_points).
        #[arg(long)]
        grid: Option<usize>,
        /// CSV output path (overrides output.sweep_csv).
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON summary path; defaults to the CSV path with a .json extension.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Minimize the worst-case cost over the mixing weight.
    Optimize {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-extension worst-case distance between two channel files.
    Distance {
        channel_a: PathBuf,
        channel_b: PathBuf,
        /// Largest extension size m (default: the channel dimension).
        #[arg(long)]
        max_ext: Option<usize>,
        #[arg(long, default_value_t = AscentConfig::default().restarts)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Validation(_) | Error::NotCompletelyPositive { .. } => EXIT_VALIDATION,
        Error::Dimension(_) | Error::Argument(_) | Error::Io { .. } | Error::Parse { .. } => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status. Results go to `stdout`, diagnostics to stderr.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return exit_code(&e);
    }
    match run(&cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Honors `PQC_THREADS`. The global pool can only be set once per process;
/// later calls keep the first setting.
fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("PQC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| arg_err(format!("PQC_THREADS must be a positive integer, got {raw:?}")))?;
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(command: &Command, stdout: &mut dyn Write) -> Result<()> {
    let io = |e: std::io::Error| Error::Io { path: "<stdout>".into(), source: e };
    match command {
        Command::Validate { config } => {
            let cfg = LoadedConfig::load(config)?;
            let report = cmd_validate(&cfg)?;
            write!(stdout, "{report}").map_err(io)?;
            if report.passed {
                Ok(())
            } else {
                Err(Error::Validation(format!("{} of {} checks failed", report.failures(), report.entries.len())))
            }
        }
        Command::Sweep { config, grid, out, summary } => {
            let cfg = LoadedConfig::load(config)?;
            let csv = out
                .clone()
                .or_else(|| cfg.config.output.sweep_csv.as_ref().map(|p| cfg.resolve(p)))
                .ok_or_else(|| arg_err("no output path: pass --out or set output.sweep_csv"))?;
            let summary = summary
                .clone()
                .or_else(|| cfg.config.output.sweep_summary.as_ref().map(|p| cfg.resolve(p)))
                .unwrap_or_else(|| default_summary_path(&csv));
            let s = cmd_sweep(&cfg, *grid, &csv, &summary)?;
            writeln!(stdout, "{}", to_json(&s)).map_err(io)
        }
        Command::Optimize { config, out } => {
            let cfg = LoadedConfig::load(config)?;
            let path = out.clone().or_else(|| cfg.config.output.optimize_json.as_ref().map(|p| cfg.resolve(p)));
            let res = cmd_optimize(&cfg)?;
            let text = to_json(&res);
            if let Some(path) = path {
                write_atomic(&path, format!("{text}\n").as_bytes())?;
            }
            writeln!(stdout, "{text}").map_err(io)
        }
        Command::Distance { channel_a, channel_b, max_ext, restarts, seed, out } => {
            let cfg = AscentConfig { restarts: *restarts, seed: *seed, ..AscentConfig::default() };
            let res = cmd_distance(channel_a, channel_b, *max_ext, &cfg)?;
            let text = to_json(&res);
            if let Some(path) = out {
                write_atomic(path, format!("{text}\n").as_bytes())?;
            }
            writeln!(stdout, "{text}").map_err(io)
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serialization is infallible")
}

fn default_summary_path(csv: &Path) -> PathBuf {
    let p = csv.with_extension("json");
    if p == csv {
        csv.with_extension("summary.json")
    } else {
        p
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed write never leaves a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| Error::Io { path: path.display().to_string(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidateEntry {
    pub name: String,
    pub dim: usize,
    pub tp_residual: f64,
    pub choi_min_eigenvalue: f64,
    /// Smallest eigenvalue over the outputs of the probe states.
    pub output_min_eigenvalue: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidateReport {
    pub entries: Vec<ValidateEntry>,
    pub passed: bool,
}

impl ValidateReport {
    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| !e.passed).count()
    }
}

impl std::fmt::Display for ValidateReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "{:<6} {} (dim {}): |ΣK†K − I| = {:.3e}, min Choi eigenvalue = {:.3e}, min output eigenvalue = {:.3e}",
                if e.passed { "ok" } else { "FAILED" },
                e.name,
                e.dim,
                e.tp_residual,
                e.choi_min_eigenvalue,
                e.output_min_eigenvalue
            )?;
        }
        writeln!(f, "{}", if self.passed { "all channels valid" } else { "validation failed" })
    }
}

fn check_channel(name: String, ch: &KrausChannel, seed: u64) -> Result<ValidateEntry> {
    let cptp = ch.validate_cptp(VALIDATE_TOL);
    let d = ch.dim();
    let mut probes = (0..d).map(|i| DensityMatrix::basis(d, i)).collect::<Result<Vec<_>>>()?;
    for k in 0..2 {
        probes.push(haar_random_pure_state(d, seed.wrapping_add(k))?.to_density());
    }
    let mut outputs_ok = true;
    let mut output_min_eigenvalue = f64::INFINITY;
    for rho in &probes {
        let r = validate_density_matrix(&ch.apply(rho)?, OUTPUT_STATE_TOL);
        outputs_ok &= r.passed;
        output_min_eigenvalue = output_min_eigenvalue.min(r.min_eigenvalue);
    }
    Ok(ValidateEntry {
        name,
        dim: d,
        tp_residual: cptp.tp_residual,
        choi_min_eigenvalue: cptp.choi_min_eigenvalue,
        output_min_eigenvalue,
        passed: cptp.passed && outputs_ok,
    })
}

/// Builds every channel the config describes (single-qubit noise, the noise
/// layer, each gate variant, mixtures, extra channel files) and checks each.
pub fn cmd_validate(cfg: &LoadedConfig) -> Result<ValidateReport> {
    let c = &cfg.config;
    let mut channels: Vec<(String, KrausChannel)> = Vec::new();
    for (i, q) in c.noise.qubits().iter().enumerate() {
        channels.push((format!("q{i} depolarizing({})", q.depolarizing), depolarizing_kraus(q.depolarizing)?));
        channels.push((
            format!("q{i} amplitude_damping({})", q.amplitude_damping),
            amplitude_damping_kraus(q.amplitude_damping)?,
        ));
        channels.push((format!("q{i} noise"), single_qubit_noise(*q, c.noise.order())?));
    }
    channels.push(("noise layer".into(), noise_layer(&c.noise)?));
    channels.push(("ideal cnot".into(), ideal_cnot_channel()));
    for v in &c.variants {
        channels.push((format!("variant {v:?}"), build_cnot_variant(*v, &c.noise)?));
    }
    if c.require_mixture().is_ok() {
        let variants = CnotVariants::build(&c.noise)?;
        for w in [0.0, 0.5, 1.0] {
            channels.push((format!("mixture w1={w}"), variants.mixture(w)?.to_kraus()));
        }
    }
    for (path, ch) in cfg.extra_channels()? {
        channels.push((path.display().to_string(), ch.to_kraus()));
    }
    let entries = channels
        .into_iter()
        .map(|(name, ch)| check_channel(name, &ch, c.seed))
        .collect::<Result<Vec<_>>>()?;
    let passed = entries.iter().all(|e| e.passed);
    Ok(ValidateReport { entries, passed })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionCost {
    pub extension: ExtensionIndex,
    pub cost: f64,
    pub converged: bool,
    pub witness: PureState,
}

/// Worst-case cost for each extension in increasing `m`, each warm-started
/// from the witnesses already found, embedded into the larger space.
pub fn per_extension_costs(
    target: &KrausChannel,
    candidate: &KrausChannel,
    exts: &[ExtensionIndex],
    cfg: &AscentConfig,
    seed_witness: Option<&PureState>,
) -> Result<Vec<ExtensionCost>> {
    let d = target.dim();
    let mut order: Vec<ExtensionIndex> = exts.to_vec();
    order.sort();
    order.dedup();
    let mut found: Vec<PureState> = seed_witness.into_iter().cloned().collect();
    let mut out = Vec::with_capacity(order.len());
    for ext in order {
        let warm = found
            .iter()
            .filter(|w| w.dim() <= ext.get() * d)
            .map(|w| embed_witness(w, ext.get(), d))
            .collect::<Result<Vec<_>>>()?;
        let e = CostLandscape::new(target, candidate, ext)?.worst_case(cfg, &warm)?;
        found.push(e.witness.clone());
        out.push(ExtensionCost { extension: ext, cost: e.value, converged: e.converged, witness: e.witness });
    }
    Ok(out)
}

/// The `K` fixed reference inputs of the sweep, seeded `seed+1..=seed+K`.
pub fn reference_states(seed: u64, k: usize) -> Result<Vec<PureState>> {
    (1..=k as u64).map(|i| haar_random_pure_state(GATE_DIM, seed.wrapping_add(i))).collect()
}

pub fn sweep_csv(curve: &SweepCurve) -> String {
    let k = curve.reference_costs.first().map_or(0, Vec::len);
    let mut s = String::from("w1,worst_cost,mean_cost");
    for i in 1..=k {
        s.push_str(&format!(",cost_state_{i}"));
    }
    s.push('\n');
    for i in 0..curve.grid.len() {
        let row: Vec<String> = [curve.grid[i], curve.worst_cost[i], curve.mean_cost[i]]
            .into_iter()
            .chain(curve.reference_costs[i].iter().copied())
            .map(|x| format!("{x:.16e}"))
            .collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary {
    pub grid_points: usize,
    pub seed: u64,
    pub argmin_index: usize,
    pub w1_star: f64,
    pub worst_cost_star: f64,
    pub worst_cost_w1_0: f64,
    pub worst_cost_w1_1: f64,
    pub interior_argmin: bool,
    pub mean_argmin_index: usize,
    pub w1_mean_star: f64,
    pub mean_cost_star: f64,
    pub witness_star: PureState,
    /// Worst-case cost at `w1_star` per extension size.
    pub per_m: Vec<ExtensionCost>,
}

pub struct SweepOutput {
    pub curve: SweepCurve,
    pub summary: SweepSummary,
}

/// Runs the sweep without writing anything.
pub fn compute_sweep(cfg: &LoadedConfig, grid: Option<usize>) -> Result<SweepOutput> {
    let c = &cfg.config;
    c.require_mixture()?;
    let opt = &c.optimizer;
    let points = grid.unwrap_or(opt.grid_points);
    let pc = cnot_mixture_family(&c.noise)?;
    let target = ideal_cnot_channel();
    let ascent = opt.ascent(c.seed);
    let refs = reference_states(c.seed, opt.reference_states)?;
    let curve = sweep(&pc, &target, ExtensionIndex::NONE, points, &ascent, opt.mean_samples, c.seed, &refs)?;

    let i = curve.argmin;
    let star = pc.build(&[curve.grid[i]])?;
    let per_m = per_extension_costs(&target, &star, &c.extensions(), &ascent, Some(&curve.witnesses[i]))?;
    let last = curve.grid.len() - 1;
    let summary = SweepSummary {
        grid_points: points,
        seed: c.seed,
        argmin_index: i,
        w1_star: curve.grid[i],
        worst_cost_star: curve.worst_cost[i],
        worst_cost_w1_0: curve.worst_cost[0],
        worst_cost_w1_1: curve.worst_cost[last],
        interior_argmin: i != 0 && i != last,
        mean_argmin_index: curve.mean_argmin,
        w1_mean_star: curve.grid[curve.mean_argmin],
        mean_cost_star: curve.mean_cost[curve.mean_argmin],
        witness_star: curve.witnesses[i].clone(),
        per_m,
    };
    Ok(SweepOutput { curve, summary })
}

/// Runs the sweep and writes the CSV and JSON summary atomically.
pub fn cmd_sweep(cfg: &LoadedConfig, grid: Option<usize>, csv: &Path, summary: &Path) -> Result<SweepSummary> {
    let out = compute_sweep(cfg, grid)?;
    write_atomic(csv, sweep_csv(&out.curve).as_bytes())?;
    write_atomic(summary, format!("{}\n", to_json(&out.summary)).as_bytes())?;
    Ok(out.summary)
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizeResult {
    pub method: Method,
    pub theta_star: Vec<f64>,
    pub w1_star: Option<f64>,
    /// Worst-case cost at the optimum from the enlarged restart budget.
    pub certified_cost: f64,
    pub certified_restarts: usize,
    pub witness: PureState,
    pub converged: bool,
    pub per_m: Vec<ExtensionCost>,
}

/// Minimizes the worst-case cost of `pc` against `target`: golden-section
/// search for one parameter, descent-ascent otherwise (or as configured).
pub fn optimize_family(
    pc: &ParametricChannel,
    target: &KrausChannel,
    cfg: &LoadedConfig,
) -> Result<OptimizeResult> {
    let c = &cfg.config;
    let opt = &c.optimizer;
    let ascent = opt.ascent(c.seed);
    let method = match opt.method {
        Method::Auto if pc.arity() == 1 => Method::Golden,
        Method::Auto => Method::Gda,
        Method::Golden if pc.arity() != 1 => {
            return Err(arg_err(format!("golden-section search needs one parameter, family has {}", pc.arity())))
        }
        m => m,
    };
    let m1 = ExtensionIndex::NONE;
    let worst = |theta: &[f64], cfg: &AscentConfig, warm: &[PureState]| -> Result<CostEvaluation> {
        CostLandscape::new(target, &pc.build(theta)?, m1)?.worst_case(cfg, warm)
    };

    let (theta, found) = match method {
        Method::Golden => {
            let (lo, hi) = pc.bounds()[0];
            let mut failure = None;
            let (w, _) = golden_section_min(
                |w| match worst(&[w], &ascent, &[]) {
                    Ok(e) => e.value,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::INFINITY
                    }
                },
                lo,
                hi,
                opt.golden_tol,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            let e = worst(&[w], &ascent, &[])?;
            (vec![w], e)
        }
        _ => {
            let mid: Vec<f64> = pc.bounds().iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
            let res = minmax_gda(pc, target, m1, &pc.point(mid)?, &opt.gda(c.seed))?;
            (res.theta_star.values().to_vec(), res.cost)
        }
    };

    let certify = AscentConfig { restarts: opt.certify_restarts, ..ascent.clone() };
    let cert = worst(&theta, &certify, std::slice::from_ref(&found.witness))?;
    let per_m = per_extension_costs(target, &pc.build(&theta)?, &c.extensions(), &ascent, Some(&cert.witness))?;
    Ok(OptimizeResult {
        method,
        w1_star: (pc.arity() == 1).then(|| theta[0]),
        theta_star: theta,
        certified_cost: cert.value,
        certified_restarts: opt.certify_restarts,
        converged: cert.converged,
        witness: cert.witness,
        per_m,
    })
}

pub fn cmd_optimize(cfg: &LoadedConfig) -> Result<OptimizeResult> {
    cfg.config.require_mixture()?;
    optimize_family(&cnot_mixture_family(&cfg.config.noise)?, &ideal_cnot_channel(), cfg)
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceResult {
    pub dim: usize,
    /// Largest per-extension cost; a lower bound on the diamond distance.
    pub diamond_lower_bound: f64,
    pub argmax: ExtensionIndex,
    pub per_m: Vec<ExtensionCost>,
}

fn load_valid_channel(path: &Path) -> Result<KrausChannel> {
    let ch: Channel = read_json(path)?;
    let k = ch.to_kraus();
    let report = k.validate_cptp(VALIDATE_TOL);
    if !report.passed {
        return Err(Error::Validation(format!("{}: {report}", path.display())));
    }
    Ok(k)
}

pub fn cmd_distance(a: &Path, b: &Path, max_ext: Option<usize>, cfg: &AscentConfig) -> Result<DistanceResult> {
    let (ka, kb) = (load_valid_channel(a)?, load_valid_channel(b)?);
    if ka.dim() != kb.dim() {
        return Err(dim_err(format!("{} acts on dim {}, {} on dim {}", a.display(), ka.dim(), b.display(), kb.dim())));
    }
    let est = diamond_distance(&ka, &kb, cfg, max_ext)?;
    Ok(DistanceResult {
        dim: ka.dim(),
        diamond_lower_bound: est.value,
        argmax: est.argmax,
        per_m: est
            .per_m
            .into_iter()
            .map(|e| ExtensionCost { extension: e.ext_dim, cost: e.value, converged: e.converged, witness: e.witness })
            .collect(),
    })
}
