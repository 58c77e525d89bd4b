//! Command-line front end: verification, CHSH scans, four-photon
//! optimization, trajectory export and distributions of experiment files.

mod manifest;
mod settings;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use geophase::bell::{
    anchor_w1, anchor_w2, optimize_chsh_d1, random_state_scan, sampled_trajectory, scan,
    theta_grid, trajectory_x1, trajectory_x2, trajectory_y1, trajectory_y2, LOCAL_BOUND,
    QUANTUM_BOUND,
};
use geophase::cyclic::{
    build_cyclic_rows, coincidence_distribution, CyclicConfig, InterferometerRows, OutcomePattern,
};
use geophase::experiment::{coincidence_csv, fmt_f64, port_distribution_csv, scan_csv, ExperimentConfig};
use geophase::oracle::{
    full_distribution, OutputPortPattern, PermutationSum, Sector, DEFAULT_CAPACITY,
};
use geophase::states::{BlochVector, MixedState, PureState};
use geophase::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use manifest::RunManifest;
use settings::Settings;

const VERIFY_TOL: f64 = 1e-9;
const D1_BOUND_TOL: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(name = "geophase", version, about = "Geometric phases and CHSH correlations in cyclic multiphoton interferometers")]
struct Cli {
    /// JSON file supplying parameters; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file; a `.manifest.json` is written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cross-check the closed-form coincidence statistics against the
    /// permutation-sum oracle.
    Verify(VerifyArgs),
    /// CHSH value over a latitude grid for several trajectory lengths.
    Scan(ScanArgs),
    /// Search for CHSH violations with four photons.
    Optimize(OptimizeArgs),
    /// Bloch-sphere points of the measurement trajectories.
    Trajectories(TrajectoryArgs),
    /// Output distribution of an experiment file.
    Distribution(DistributionArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// JSON rows (`[[[re, im], …], …]`) of an interferometer to check as well.
    #[arg(long)]
    rows: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Comma-separated trajectory lengths.
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<usize>>,
    #[arg(long)]
    theta_min: Option<f64>,
    #[arg(long)]
    theta_max: Option<f64>,
    #[arg(long)]
    theta_steps: Option<usize>,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[arg(long)]
    restarts: Option<usize>,
    /// Comma-separated state dimensions for the random scan.
    #[arg(long, value_delimiter = ',')]
    dim: Option<Vec<usize>>,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args, Debug)]
struct TrajectoryArgs {
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    /// Points of the continuous curves.
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Args, Debug)]
struct DistributionArgs {
    /// Experiment JSON file.
    #[arg(long)]
    experiment: Option<PathBuf>,
    /// Also run the permutation-sum oracle over all detection patterns.
    #[arg(long)]
    all_patterns: bool,
}

/// Why a command stopped; each maps to a process exit code.
#[derive(Debug)]
enum Failure {
    Verification(String),
    Input(String),
    Capacity(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Input(_) => 2,
            Failure::Capacity(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verification(m) | Failure::Input(m) | Failure::Capacity(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Capacity { .. } => Failure::Capacity(e.to_string()),
            Error::InvalidInterferometer(_) | Error::NumericalResidue { .. } => {
                Failure::Verification(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CmdResult<T> = Result<T, Failure>;

fn write_file(path: &Path, contents: &str) -> CmdResult<()> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes the primary output, any extra files and the manifest.
fn emit(
    out: Option<&Path>,
    primary: &str,
    extras: &[(PathBuf, String)],
    mut manifest: RunManifest,
) -> CmdResult<()> {
    let Some(out) = out else {
        print!("{primary}");
        return Ok(());
    };
    write_file(out, primary)?;
    manifest.record(out, primary.as_bytes());
    for (path, text) in extras {
        write_file(path, text)?;
        manifest.record(path, text.as_bytes());
    }
    write_file(&sidecar(out, ".manifest.json"), &manifest.to_json())
}

fn random_inputs(n: usize, mixed: bool, rng: &mut ChaCha8Rng) -> CmdResult<Vec<MixedState>> {
    let dim = rng.random_range(2..=3);
    (0..n)
        .map(|_| {
            if mixed {
                MixedState::random(dim, rng)
            } else {
                PureState::random(dim, rng).map(|p| p.density())
            }
        })
        .collect::<Result<_, _>>()
        .map_err(Failure::from)
}

fn cmd_verify(args: &VerifyArgs, s: &Settings) -> CmdResult<RunManifest> {
    let max_n = s.pick(args.max_n, "max_n", 6usize)?;
    let trials = s.pick(args.trials, "trials", 20usize)?;
    let seed = s.seed();
    let rows_path: Option<PathBuf> = s.pick_opt(args.rows.clone(), "rows")?;
    if max_n < 2 {
        return Err(Failure::Input(format!("--max-n must be at least 2, got {max_n}")));
    }
    if max_n > DEFAULT_CAPACITY {
        return Err(Error::Capacity { n: max_n, cap: DEFAULT_CAPACITY }.into());
    }
    if trials == 0 {
        return Err(Failure::Input("--trials must be positive".into()));
    }

    let mut report = String::from("n,trials,max_deviation,max_normalization_error\n");
    let mut worst_overall: f64 = 0.0;
    let mut per_n = Vec::new();
    for n in 2..=max_n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(n as u64);
        let (mut worst, mut norm_err): (f64, f64) = (0.0, 0.0);
        for trial in 0..trials {
            let phases: Vec<f64> = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
            let cfg = CyclicConfig::new(phases)?;
            let rhos = random_inputs(n, trial % 2 == 1, &mut rng)?;
            let rows = build_cyclic_rows(&cfg);
            let oracle = PermutationSum::new(&rows, &rhos)?;
            for (o, p) in coincidence_distribution(&cfg, &rhos)? {
                let q = oracle.probability(&coincidence_pattern(&o)?)?;
                worst = worst.max((p - q).abs());
            }
            if n <= 4 {
                let total: f64 = oracle.distribution(Sector::All)?.iter().map(|(_, p)| p).sum();
                norm_err = norm_err.max((total - 1.0).abs());
            }
        }
        println!("N = {n}: max deviation {worst:.3e}, normalization error {norm_err:.3e}");
        let _ = writeln!(report, "{n},{trials},{},{}", fmt_f64(worst), fmt_f64(norm_err));
        worst_overall = worst_overall.max(worst).max(norm_err);
        per_n.push(json!({"n": n, "max_deviation": worst, "normalization_error": norm_err}));
    }

    // two-photon limits
    let hom = hom_check()?;
    println!("two-photon limits: identical {:.3e}, orthogonal {:.15}", hom.0, hom.1);
    let hom_dev = hom.0.abs().max((hom.1 - 0.5).abs());

    let mut rows_report = Value::Null;
    if let Some(path) = &rows_path {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
        let rows: InterferometerRows = serde_json::from_str(&text).map_err(|e| {
            // serde wraps our validation error; keep the category
            if e.to_string().contains("invalid interferometer") {
                Failure::Verification(format!("{}: {e}", path.display()))
            } else {
                Failure::Input(format!("{}: {e}", path.display()))
            }
        })?;
        let n = rows.n_photons();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0);
        let rhos = random_inputs(n, true, &mut rng)?;
        let total: f64 = full_distribution(&rows, &rhos, Sector::All)?.iter().map(|(_, p)| p).sum();
        let err = (total - 1.0).abs();
        println!("rows file: {n} photons, normalization error {err:.3e}");
        worst_overall = worst_overall.max(err);
        rows_report = json!({"path": path, "n": n, "normalization_error": err});
    }

    let pass = worst_overall <= VERIFY_TOL && hom_dev <= 1e-12;
    let params = json!({"max_n": max_n, "trials": trials, "rows": rows_path});
    let mut manifest = RunManifest::new("verify", params, seed);
    manifest.summary = json!({
        "per_n": per_n,
        "two_photon": {"identical": hom.0, "orthogonal": hom.1},
        "rows": rows_report,
        "tolerance": VERIFY_TOL,
        "pass": pass,
    });
    if !pass {
        if let Some(out) = &s.out {
            emit(Some(out), &report, &[], manifest)?;
        }
        return Err(Failure::Verification(format!(
            "largest deviation {worst_overall:.3e} exceeds {VERIFY_TOL:e}"
        )));
    }
    println!("verification passed (tolerance {VERIFY_TOL:e})");
    if let Some(out) = &s.out {
        emit(Some(out), &report, &[], manifest.clone())?;
    }
    Ok(manifest)
}

fn coincidence_pattern(o: &OutcomePattern) -> CmdResult<OutputPortPattern> {
    let ports = o.bits().iter().enumerate().map(|(s, &b)| 2 * s + b as usize).collect();
    Ok(OutputPortPattern::new(ports, 2 * o.len())?)
}

/// Coincidence probability behind a balanced beam splitter for identical
/// and for orthogonal photons.
fn hom_check() -> CmdResult<(f64, f64)> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bs: InterferometerRows =
        serde_json::from_value(json!([[[h, 0.0], [h, 0.0]], [[h, 0.0], [-h, 0.0]]]))
            .map_err(|e| Failure::Verification(e.to_string()))?;
    let a = PureState::basis(2, 0)?.density();
    let b = PureState::basis(2, 1)?.density();
    let l = OutputPortPattern::new(vec![0, 1], 2)?;
    let same = PermutationSum::new(&bs, &[a.clone(), a.clone()])?.probability(&l)?;
    let orth = PermutationSum::new(&bs, &[a, b])?.probability(&l)?;
    Ok((same, orth))
}

fn cmd_scan(args: &ScanArgs, s: &Settings) -> CmdResult<RunManifest> {
    let ds = s.pick(args.d.clone(), "d", vec![1usize, 2, 3, 4, 5, 500])?;
    let theta_min = s.pick(args.theta_min, "theta_min", 0.0)?;
    let theta_max = s.pick(args.theta_max, "theta_max", FRAC_PI_2)?;
    let steps = s.pick(args.theta_steps, "theta_steps", 201usize)?;
    if ds.is_empty() {
        return Err(Failure::Input("--d needs at least one value".into()));
    }
    let thetas = theta_grid(theta_min, theta_max, steps)?;
    let rows = scan(&ds, &thetas)?;
    let csv = scan_csv(&rows);

    let maxima: Vec<Value> = ds
        .iter()
        .map(|&d| {
            let best = rows
                .iter()
                .filter(|r| r.d == d)
                .fold(None::<(f64, f64)>, |acc, r| match acc {
                    Some((v, _)) if v >= r.report.i_chsh => acc,
                    _ => Some((r.report.i_chsh, r.theta)),
                })
                .unwrap_or((f64::NAN, f64::NAN));
            json!({"d": d, "max_i_chsh": best.0, "theta": best.1, "violates": best.0 > LOCAL_BOUND})
        })
        .collect();
    for m in &maxima {
        println!("d = {}: max I = {:.9} at theta = {:.6}", m["d"], m["max_i_chsh"], m["theta"]);
    }
    let params = json!({"d": ds, "theta_min": theta_min, "theta_max": theta_max, "theta_steps": steps});
    let mut manifest = RunManifest::new("scan", params, s.seed());
    let reference = json!({
        "local_bound": LOCAL_BOUND,
        "quantum_bound": QUANTUM_BOUND,
        "maxima": maxima,
    });
    manifest.summary = reference.clone();
    let extras = match &s.out {
        Some(out) => vec![(sidecar(out, ".json"), pretty(&reference))],
        None => Vec::new(),
    };
    emit(s.out.as_deref(), &csv, &extras, manifest.clone())?;
    Ok(manifest)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn cmd_optimize(args: &OptimizeArgs, s: &Settings) -> CmdResult<RunManifest> {
    let restarts = s.pick(args.restarts, "restarts", 200usize)?;
    let dims = s.pick(args.dim.clone(), "dim", vec![3usize, 4, 5])?;
    let samples = s.pick(args.samples, "samples", 100_000usize)?;
    let seed = s.seed();
    let opt = optimize_chsh_d1(restarts, seed)?;
    println!("optimized four-photon CHSH value: {:.12}", opt.best_value);
    let mut scans = Vec::new();
    let mut best_random = f64::NEG_INFINITY;
    for &dim in &dims {
        let m = random_state_scan(dim, samples, seed.wrapping_add(dim as u64))?;
        println!("dimension {dim}: max over {samples} random draws {m:.9}");
        best_random = best_random.max(m);
        scans.push(json!({"dim": dim, "samples": samples, "max_i_chsh": m}));
    }
    let within = opt.best_value <= LOCAL_BOUND + D1_BOUND_TOL && best_random <= LOCAL_BOUND + D1_BOUND_TOL;
    let report = json!({
        "best_value": opt.best_value,
        "vectors": opt.vectors,
        "restarts": opt.restarts,
        "seed": opt.seed,
        "random_scans": scans,
        "local_bound": LOCAL_BOUND,
        "tolerance": D1_BOUND_TOL,
        "within_local_bound": within,
    });
    let params = json!({"restarts": restarts, "dim": dims, "samples": samples});
    let mut manifest = RunManifest::new("optimize", params, seed);
    manifest.summary = json!({"best_value": opt.best_value, "within_local_bound": within});
    emit(s.out.as_deref(), &pretty(&report), &[], manifest.clone())?;
    if !within {
        return Err(Failure::Verification(format!(
            "found a four-photon CHSH value above {LOCAL_BOUND}"
        )));
    }
    Ok(manifest)
}

fn cmd_trajectories(args: &TrajectoryArgs, s: &Settings) -> CmdResult<RunManifest> {
    let theta = s.pick(args.theta, "theta", 0.25f64.acos())?;
    let d = s.pick(args.d, "d", 3usize)?;
    let grid = s.pick(args.grid, "grid", 101usize)?;
    if d == 0 {
        return Err(Failure::Input("--d must be positive".into()));
    }
    if grid < 2 {
        return Err(Failure::Input("--grid needs at least 2 points".into()));
    }
    let mut csv = String::from("trajectory,kind,index,t,x,y,z\n");
    let mut line = |name: &str, kind: &str, index: usize, t: f64, b: &BlochVector| {
        let _ = writeln!(
            csv,
            "{name},{kind},{index},{},{},{},{}",
            fmt_f64(t),
            fmt_f64(b.x),
            fmt_f64(b.y),
            fmt_f64(b.z)
        );
    };
    line("w1", "anchor", 0, PI, &anchor_w1(theta));
    line("w2", "anchor", 0, 0.0, &anchor_w2(theta));
    type Curve = fn(f64, f64) -> geophase::Result<BlochVector>;
    let curves: [(&str, Curve, bool, usize); 4] = [
        ("x1", trajectory_x1, true, 1),
        ("x2", trajectory_x2, true, 2),
        ("y1", trajectory_y1, false, 1),
        ("y2", trajectory_y2, false, 2),
    ];
    for (name, curve, alice, setting) in curves {
        for (k, b) in sampled_trajectory(theta, d, alice, setting)?.iter().enumerate() {
            line(name, "sampled", k + 1, (k + 1) as f64 * PI / (d + 1) as f64, b);
        }
        for k in 0..grid {
            let t = PI * k as f64 / (grid - 1) as f64;
            line(name, "curve", k, t, &curve(theta, t)?);
        }
    }
    let params = json!({"theta": theta, "d": d, "grid": grid});
    let manifest = RunManifest::new("trajectories", params, s.seed());
    emit(s.out.as_deref(), &csv, &[], manifest.clone())?;
    Ok(manifest)
}

fn cmd_distribution(args: &DistributionArgs, s: &Settings) -> CmdResult<RunManifest> {
    let path: PathBuf = s
        .pick_opt(args.experiment.clone(), "experiment")?
        .ok_or_else(|| Failure::Input("--experiment is required".into()))?;
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let exp = ExperimentConfig::from_json(&text)?;
    let cfg = exp.cyclic_config()?;
    let rhos = exp.mixed_states()?;
    let csv = if args.all_patterns {
        let rows = build_cyclic_rows(&cfg);
        port_distribution_csv(&full_distribution(&rows, &rhos, Sector::All)?)
    } else {
        coincidence_csv(&coincidence_distribution(&cfg, &rhos)?)
    };
    if let Some(p) = exp.partition() {
        let c = geophase::cyclic::parity_correlator(&cfg, &rhos, &p)?;
        eprintln!("parity correlator: {c:.15}");
    }
    let params = json!({"experiment": path, "all_patterns": args.all_patterns});
    let mut manifest = RunManifest::new("distribution", params, s.seed());
    manifest.summary = json!({"input_sha256": manifest::sha256_hex(text.as_bytes())});
    emit(s.out.as_deref(), &csv, &[], manifest.clone())?;
    Ok(manifest)
}

fn run(cli: Cli) -> CmdResult<()> {
    let settings = Settings::load(cli.config.as_deref(), cli.seed, cli.out.clone())?;
    match &cli.command {
        Command::Verify(a) => cmd_verify(a, &settings),
        Command::Scan(a) => cmd_scan(a, &settings),
        Command::Optimize(a) => cmd_optimize(a, &settings),
        Command::Trajectories(a) => cmd_trajectories(a, &settings),
        Command::Distribution(a) => cmd_distribution(a, &settings),
    }
    .map(|_| ())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
