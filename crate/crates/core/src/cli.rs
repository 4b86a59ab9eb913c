//! Command-line surface. Exit codes: 0 pass, 1 verification failure,
//! 2 usage or format error, 3 invariant violation, 4 numeric singularity,
//! 5 unsupported mode.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::exec::Execution;
use crate::filters::checks::{
    check_paraunitary, check_perfect_reconstruction, check_symmetry, max_distance, CheckConfig,
};
use crate::filters::eval::wavelet_eval;
use crate::filters::params::{box_to_params, sample_box, BoxPoint, FilterParameters};
use crate::filters::subband::subband_filters;
use crate::io::{
    self, FilterFile, LoadError, ParameterFile, RealizationFile, ReportEntry, SynthesisSidecar,
    VerificationReport,
};
use crate::matrix::{C64, TOL};
use crate::realization::{
    degree_formula, eval_realization, realize_wavelet, stein_verify, verify_minimality, Realization,
};
use crate::signal::{analyze, circular_shift, norm, synthesize, SubbandSet};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_POLE: i32 = 4;
pub const EXIT_UNSUPPORTED: i32 = 5;

/// Hermiticity bound on the Stein solution.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "wfk", version, about = "Rational paraunitary wavelet filters")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw filter parameters from the box (seeded) or map given box coordinates.
    Gen(GenArgs),
    /// Build the state-space realization of a parameter file.
    Realize(RealizeArgs),
    /// Run the sampled membership, degree, minimality and Stein checks.
    Verify(VerifyArgs),
    /// Evaluate the transfer function at a point or on a circle grid.
    Eval(EvalArgs),
    /// Split a signal into subbands (FIR filters only).
    Analyze(AnalyzeArgs),
    /// Reconstruct a signal from subbands (FIR filters only).
    Synthesize(SynthesizeArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub index: usize,
    #[arg(long)]
    pub rho: f64,
    #[arg(long, env = "WFK_SEED", default_value_t = 0)]
    pub seed: u64,
    /// JSON array of box coordinates (or `{"box": [...]}`).
    #[arg(long = "box")]
    pub box_file: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RealizeArgs {
    pub params: PathBuf,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 256)]
    pub points: usize,
    #[arg(long, default_value_t = TOL)]
    pub tol: f64,
    #[arg(long, env = "WFK_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Run sweeps on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("where").required(true).args(["z", "circle"])))]
pub struct EvalArgs {
    pub file: PathBuf,
    /// Evaluation point as `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Number of equispaced points on the unit circle.
    #[arg(long)]
    pub circle: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub params: PathBuf,
    #[arg(long)]
    pub signal: PathBuf,
    /// Output directory for `band_k.csv`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    pub params: PathBuf,
    /// Directory holding `band_k.csv`.
    #[arg(long)]
    pub bands: PathBuf,
    /// Reconstructed signal; a sidecar `<out>.json` is written next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Original signal to measure reconstruction error against.
    #[arg(long)]
    pub reference: Option<PathBuf>,
}

/// A failed command: exit code plus message for stderr.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn usage(flag: &str, message: impl std::fmt::Display) -> Self {
        Self::new(EXIT_USAGE, format!("invalid value for {flag}: {message}"))
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        let code = match &e {
            LoadError::Io { .. } | LoadError::Format { .. } => EXIT_USAGE,
            LoadError::Invariant { .. } => EXIT_INVARIANT,
        };
        Self::new(code, e.to_string())
    }
}

/// Exit code for a library error raised while processing valid input.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Pole { .. } | Error::Singular { .. } | Error::SamplingExhausted { .. } => EXIT_POLE,
        Error::NotFir => EXIT_UNSUPPORTED,
        Error::NonConvergence(_) => EXIT_VERIFY_FAILED,
        Error::DimensionMismatch { .. }
        | Error::InvalidParameter { .. }
        | Error::OutOfRange(_)
        | Error::NonCanonical(_) => EXIT_INVARIANT,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::new(exit_code(&e), e.to_string())
    }
}

type CliResult = Result<i32, CliError>;

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::new(EXIT_USAGE, format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Gen(a) => gen(&a),
        Command::Realize(a) => realize(&a),
        Command::Verify(a) => verify(&a),
        Command::Eval(a) => eval(&a),
        Command::Analyze(a) => analyze_cmd(&a),
        Command::Synthesize(a) => synthesize_cmd(&a),
    }
}

fn gen(a: &GenArgs) -> CliResult {
    if a.n < 2 {
        return Err(CliError::usage(
            "--n",
            format!("band count must be >= 2, got {}", a.n),
        ));
    }
    if !(0.0..=1.0).contains(&a.rho) {
        return Err(CliError::usage(
            "--rho",
            format!("must lie in [0, 1], got {}", a.rho),
        ));
    }
    let (point, seed) = match &a.box_file {
        Some(path) => {
            let flat = io::load_box(path)?;
            let point = BoxPoint::from_flat(a.n, a.index, &flat)
                .map_err(|e| CliError::usage("--box", e))?;
            (point, None)
        }
        None => (sample_box(a.seed, a.n, a.index, a.rho), Some(a.seed)),
    };
    let params = box_to_params(&point, a.n, a.index, a.rho).map_err(|e| {
        let flag = if a.box_file.is_some() {
            "--box"
        } else {
            "--rho"
        };
        CliError::usage(flag, e)
    })?;
    let file = ParameterFile::from_params(&params, Some(&point), seed);
    write_output(a.output.as_deref(), &io::to_json_pretty(&file))?;
    Ok(EXIT_PASS)
}

fn realize(a: &RealizeArgs) -> CliResult {
    let (params, _) = io::load_parameters(&a.params)?;
    let r = realize_wavelet(&params)?;
    write_output(
        a.output.as_deref(),
        &io::to_json_pretty(&RealizationFile::from_realization(&r)),
    )?;
    Ok(EXIT_PASS)
}

/// Turns a check outcome into a report entry; evaluation errors become
/// failed entries rather than aborting the run.
fn entry(name: &str, cfg: &CheckConfig, outcome: crate::Result<ReportEntry>) -> ReportEntry {
    outcome.unwrap_or_else(|e| ReportEntry::failed(name, cfg.tol, cfg.points, cfg.seed, e))
}

fn stein_entries(r: &Realization, cfg: &CheckConfig) -> Vec<ReportEntry> {
    match stein_verify(r) {
        Ok(cert) => {
            let mut main = ReportEntry::new("stein", cert.max_residual(), cfg.tol, 0, cfg.seed)
                .with_detail(format!(
                    "residuals state {:.3e}, cross {:.3e}, io {:.3e}; {} doubling steps",
                    cert.residual_state, cert.residual_cross, cert.residual_io, cert.iterations
                ));
            if !cert.positive_definite {
                main = main.with_detail("H is not positive definite");
            }
            let herm = ReportEntry::new(
                "stein_hermitian",
                cert.hermitian_defect,
                HERMITIAN_TOL,
                0,
                cfg.seed,
            )
            .with_detail(format!("condition estimate {:.3e}", cert.cond_estimate));
            vec![main, herm]
        }
        Err(e) => vec![ReportEntry::failed("stein", cfg.tol, 0, cfg.seed, e)],
    }
}

fn minimality_entry(r: &Realization, seed: u64) -> ReportEntry {
    let rep = verify_minimality(r);
    let deficit = rep.state_dim - rep.controllability_rank.min(rep.observability_rank);
    ReportEntry::new("minimality", deficit as f64, 0.0, 0, seed).with_detail(format!(
        "state dim {}, controllability rank {}, observability rank {}",
        rep.state_dim, rep.controllability_rank, rep.observability_rank
    ))
}

fn realization_checks(r: &Realization, n: usize, cfg: &CheckConfig) -> Vec<ReportEntry> {
    let f = |z| eval_realization(r, z);
    let mut out = vec![
        entry("symmetry", cfg, check_symmetry(f, n, cfg).map(Into::into)),
        entry(
            "paraunitary",
            cfg,
            check_paraunitary(f, cfg).map(Into::into),
        ),
        entry(
            "perfect_reconstruction",
            cfg,
            check_perfect_reconstruction(f, cfg).map(Into::into),
        ),
    ];
    out.extend(stein_entries(r, cfg));
    out.push(minimality_entry(r, cfg.seed));
    out
}

/// Runs every check; the report is also usable as a library call.
pub fn verification_report(file: &FilterFile, name: &str, cfg: &CheckConfig) -> VerificationReport {
    let (kind, checks) = match file {
        FilterFile::Parameters(params, _) => {
            let n = params.n();
            let f = |z| wavelet_eval(params, z);
            let mut checks = vec![
                entry("symmetry", cfg, check_symmetry(f, n, cfg).map(Into::into)),
                entry(
                    "paraunitary",
                    cfg,
                    check_paraunitary(f, cfg).map(Into::into),
                ),
                entry(
                    "perfect_reconstruction",
                    cfg,
                    check_perfect_reconstruction(f, cfg).map(Into::into),
                ),
            ];
            match realize_wavelet(params) {
                Ok(r) => {
                    let expected = degree_formula(n, params.m());
                    checks.push(
                        ReportEntry::new(
                            "degree",
                            r.state_dim().abs_diff(expected) as f64,
                            0.0,
                            0,
                            cfg.seed,
                        )
                        .with_detail(format!("state dim {}, expected {expected}", r.state_dim())),
                    );
                    checks.push(entry(
                        "transfer_match",
                        cfg,
                        max_distance(|z| eval_realization(&r, z), f, cfg).map(|d| {
                            ReportEntry::new("transfer_match", d, cfg.tol, cfg.points, cfg.seed)
                        }),
                    ));
                    checks.push(minimality_entry(&r, cfg.seed));
                    checks.extend(stein_entries(&r, cfg));
                }
                Err(e) => checks.push(ReportEntry::failed("degree", 0.0, 0, cfg.seed, e)),
            }
            ("parameters", checks)
        }
        FilterFile::Realization(r) => {
            let n = r.outputs();
            let mut checks = realization_checks(r, n, cfg);
            // The degree law ties the state dimension to some index m.
            let base = degree_formula(n, 0);
            let consistent = r.state_dim() >= base && (r.state_dim() - base).is_multiple_of(n);
            checks.push(
                ReportEntry::new(
                    "degree",
                    if consistent { 0.0 } else { 1.0 },
                    0.0,
                    0,
                    cfg.seed,
                )
                .with_detail(format!(
                    "state dim {} {} of the form N(N-1)/2 + N*m",
                    r.state_dim(),
                    if consistent { "is" } else { "is not" }
                )),
            );
            ("realization", checks)
        }
    };
    VerificationReport {
        file: name.to_string(),
        kind: kind.to_string(),
        seed: cfg.seed,
        points: cfg.points,
        tolerance: cfg.tol,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn verify(a: &VerifyArgs) -> CliResult {
    if a.points == 0 {
        return Err(CliError::usage("--points", "must be positive"));
    }
    if !(a.tol > 0.0) || !a.tol.is_finite() {
        return Err(CliError::usage(
            "--tol",
            format!("must be a positive number, got {}", a.tol),
        ));
    }
    let file = io::load_filter_file(&a.file)?;
    let cfg = CheckConfig {
        points: a.points,
        tol: a.tol,
        seed: a.seed,
        exec: if a.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    let report = verification_report(&file, &a.file.display().to_string(), &cfg);
    write_output(a.output.as_deref(), &io::to_json_pretty(&report))?;
    if a.output.is_some() {
        for c in &report.checks {
            eprintln!(
                "{} {}: residual {} (tol {:e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.max_residual
                    .map_or("n/a".to_string(), |r| format!("{r:.3e}")),
                c.tolerance
            );
        }
    }
    Ok(if report.passed {
        EXIT_PASS
    } else {
        EXIT_VERIFY_FAILED
    })
}

fn parse_point(s: &str) -> Result<C64, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().ok().filter(|x| x.is_finite());
    match parts.as_slice() {
        [re] => num(re).map(|r| C64::new(r, 0.0)),
        [re, im] => num(re).zip(num(im)).map(|(r, i)| C64::new(r, i)),
        _ => None,
    }
    .ok_or_else(|| CliError::usage("--z", format!("expected `re,im`, got {s:?}")))
}

fn eval(a: &EvalArgs) -> CliResult {
    let points: Vec<C64> = match (&a.z, a.circle) {
        (Some(z), _) => vec![parse_point(z)?],
        (None, Some(0)) => return Err(CliError::usage("--circle", "must be positive")),
        (None, Some(k)) => (0..k)
            .map(|j| C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / k as f64))
            .collect(),
        (None, None) => return Err(CliError::usage("--z", "one of --z or --circle is required")),
    };
    let file = io::load_filter_file(&a.file)?;
    let mut csv = String::new();
    for z in points {
        let value = match &file {
            FilterFile::Parameters(p, _) => wavelet_eval(p, z)?,
            FilterFile::Realization(r) => eval_realization(r, z)?,
        };
        csv.push_str(&io::eval_row(z, &value));
        csv.push('\n');
    }
    write_output(a.output.as_deref(), &csv)?;
    Ok(EXIT_PASS)
}

fn fir_params(path: &Path) -> Result<FilterParameters, CliError> {
    let (params, _) = io::load_parameters(path)?;
    if !params.is_fir() {
        return Err(CliError::new(
            EXIT_UNSUPPORTED,
            "time-domain analysis/synthesis needs FIR parameters (all alpha = 0); use `verify` for the frequency-domain check",
        ));
    }
    Ok(params)
}

fn band_path(dir: &Path, k: usize) -> PathBuf {
    dir.join(format!("band_{k}.csv"))
}

fn analyze_cmd(a: &AnalyzeArgs) -> CliResult {
    let params = fir_params(&a.params)?;
    let n = params.n();
    let x = io::read_signal_csv(&a.signal)?;
    if x.is_empty() || !x.len().is_multiple_of(n) {
        return Err(CliError::usage(
            "--signal",
            format!("length {} is not a positive multiple of n = {n}", x.len()),
        ));
    }
    let filters = subband_filters(&params)?;
    if filters.max_len() > x.len() {
        return Err(CliError::usage(
            "--signal",
            format!(
                "length {} is shorter than the longest band filter ({})",
                x.len(),
                filters.max_len()
            ),
        ));
    }
    let bands = analyze(&x, &filters, n)?;
    std::fs::create_dir_all(&a.out).map_err(|e| {
        CliError::new(
            EXIT_USAGE,
            format!("cannot create {}: {e}", a.out.display()),
        )
    })?;
    for (k, b) in bands.bands.iter().enumerate() {
        write_output(Some(&band_path(&a.out, k)), &io::signal_to_csv(b))?;
    }
    Ok(EXIT_PASS)
}

fn synthesize_cmd(a: &SynthesizeArgs) -> CliResult {
    let params = fir_params(&a.params)?;
    let n = params.n();
    let bands = (0..n)
        .map(|k| io::read_signal_csv(&band_path(&a.bands, k)))
        .collect::<Result<Vec<_>, _>>()?;
    let len = bands[0].len();
    if len == 0 || bands.iter().any(|b| b.len() != len) {
        let lens: Vec<usize> = bands.iter().map(Vec::len).collect();
        return Err(CliError::usage(
            "--bands",
            format!("band lengths differ or are empty: {lens:?}"),
        ));
    }
    let filters = subband_filters(&params)?;
    if filters.max_len() > len * n {
        return Err(CliError::usage(
            "--bands",
            "bands are too short for the filter length",
        ));
    }
    let y = synthesize(&SubbandSet { bands }, &filters, n)?;
    write_output(Some(&a.out), &io::signal_to_csv(&y))?;

    let delay = filters.delay();
    let mut sidecar = SynthesisSidecar {
        n,
        delay,
        length: y.len(),
        reference: None,
        relative_error: None,
        max_abs_error: None,
    };
    if let Some(ref_path) = &a.reference {
        let x = io::read_signal_csv(ref_path)?;
        if x.len() != y.len() {
            return Err(CliError::usage(
                "--reference",
                format!(
                    "length {} differs from reconstruction length {}",
                    x.len(),
                    y.len()
                ),
            ));
        }
        let diff: Vec<C64> = y
            .iter()
            .zip(circular_shift(&x, delay))
            .map(|(a, b)| a - b)
            .collect();
        let scale = norm(&x);
        sidecar.reference = Some(ref_path.display().to_string());
        sidecar.relative_error = Some(if scale > 0.0 {
            norm(&diff) / scale
        } else {
            norm(&diff)
        });
        sidecar.max_abs_error = Some(diff.iter().map(|d| d.norm()).fold(0.0, f64::max));
    }
    let mut side_path = a.out.clone().into_os_string();
    side_path.push(".json");
    write_output(Some(Path::new(&side_path)), &io::to_json_pretty(&sidecar))?;
    Ok(EXIT_PASS)
}
