//! Command-line front end.
//!
//! Exit codes: 0 success (claim verified), 1 check failed or computation
//! error, 2 bad arguments or malformed input, 3 output could not be written,
//! 4 fit target unreachable.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::entanglement::{
    closed_form_criterion, scan, EntanglementReport, LoModel, MeasurementCombination, ZETA_PER_S,
};
use crate::gaussian::GaussianState;
use crate::numeric::bisect;
use crate::observables::{
    detect_scheme, quadratic_covariance, quadratic_stats, stokes_observable, DetectionResult, DetectionScheme, Dof,
    DEFAULT_LO_AMPLITUDE,
};
use crate::states::{build, verify_factorization, Construction, CylindricalStateSpec};
use crate::vector_modes::{
    is_structurally_separable, render_intensity, schmidt_decompose, standard_mode, CylindricalKind,
    SchmidtDecomposition, VectorModeCoefficients, DEFAULT_EXTENT_WAISTS, DEFAULT_GRID, DEFAULT_WAIST,
};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_WRITE: i32 = 3;
pub const EXIT_UNREACHABLE: i32 = 4;

/// Default `--tol` of `factorize`.
pub const FACTORIZE_TOL: f64 = 1e-10;
/// `duan` exits 0 when the largest relative gap to `e^{−s}·cosh s` is below this.
pub const DUAN_GAP_TOL: f64 = 1e-5;
/// Fits stop once within this many dB of the target.
pub const FIT_DB_TOL: f64 = 1e-3;
/// Composite amplitude of the emulated bright beam.
pub const DEFAULT_DETECT_ALPHA: f64 = 1e3;
/// Upper end of the `s` search range in fits.
pub const FIT_S_MAX: f64 = 2.0;
const FIT_SAMPLES: usize = 200;

#[derive(Debug, Parser)]
#[command(
    name = "hybrid-cv",
    version,
    about = "Squeezed cylindrically polarized beams: identities, criteria and detection"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Tolerance for the command's pass/fail check.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Run metadata on stderr.
    #[arg(long, global = true)]
    pub verbose: bool,
    /// JSON object whose keys override flags of the same name.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pgm,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that the composite squeezer equals its single- and two-mode factors.
    Factorize(FactorizeArgs),
    /// Scan the Stokes inseparability criterion over squeezing.
    Duan(DuanArgs),
    /// Emulate direct or split detection against the quantum noise limit.
    Detect(DetectArgs),
    /// Render a cylindrical mode and report its Schmidt structure.
    Mode(ModeArgs),
    /// Schmidt decomposition of a coefficients file.
    Schmidt(SchmidtArgs),
    /// Exact Stokes means and variances per arm.
    Stokes(StokesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Radial,
    Azimuthal,
}

impl From<KindArg> for CylindricalKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Radial => CylindricalKind::Radial,
            KindArg::Azimuthal => CylindricalKind::Azimuthal,
        }
    }
}

#[derive(Debug, Args)]
pub struct FactorizeArgs {
    #[arg(long, value_enum, default_value = "azimuthal")]
    pub kind: KindArg,
    /// Composite coherent amplitude as `re,im`.
    #[arg(long, value_parser = parse_complex, default_value = "0,0", allow_hyphen_values = true)]
    pub alpha: Complex64,
    /// Squeezing parameter as `re,im`. Real positive ζ with real α gives an
    /// amplitude-squeezed bright beam.
    #[arg(long, value_parser = parse_complex, default_value = "0,0", allow_hyphen_values = true)]
    pub zeta: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DofSet {
    /// pol/pol, spa/spa and spa/pol.
    All,
    PolPol,
    SpaSpa,
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LoKind {
    Linearized,
    Exact,
}

#[derive(Debug, Args)]
pub struct DuanArgs {
    #[arg(long, value_enum, default_value = "azimuthal")]
    pub kind: KindArg,
    #[arg(long, default_value_t = 0.0)]
    pub s_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub s_max: f64,
    /// Number of s values, end points included.
    #[arg(long, default_value_t = 21)]
    pub steps: usize,
    #[arg(long, default_value_t = 2)]
    pub mu: u8,
    #[arg(long, default_value_t = 3)]
    pub nu: u8,
    #[arg(long, value_enum, default_value = "all")]
    pub dofs: DofSet,
    #[arg(long, value_enum, default_value = "linearized")]
    pub lo_model: LoKind,
    /// Auxiliary amplitude.
    #[arg(long, default_value_t = DEFAULT_LO_AMPLITUDE)]
    pub lo_amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Direct,
    Sum,
    Difference,
}

impl From<SchemeArg> for DetectionScheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Direct => DetectionScheme::Direct,
            SchemeArg::Sum => DetectionScheme::Sum,
            SchemeArg::Difference => DetectionScheme::Difference,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitParam {
    S,
    Eta,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long, value_enum, default_value = "azimuthal")]
    pub kind: KindArg,
    #[arg(long, default_value_t = 0.0)]
    pub s: f64,
    /// Power transmission applied to both arms.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Real composite amplitude of the bright beam.
    #[arg(long, default_value_t = DEFAULT_DETECT_ALPHA)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "direct")]
    pub scheme: SchemeArg,
    /// Solve for the parameter giving this reading in dB.
    #[arg(long, allow_hyphen_values = true)]
    pub fit_db: Option<f64>,
    #[arg(long, value_enum, default_value = "s")]
    pub fit_param: FitParam,
}

#[derive(Debug, Args)]
pub struct ModeArgs {
    #[arg(long, value_enum, default_value = "radial")]
    pub kind: KindArg,
    #[arg(long, default_value_t = DEFAULT_WAIST)]
    pub waist: f64,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    /// Half-width of the image in waists.
    #[arg(long, default_value_t = DEFAULT_EXTENT_WAISTS)]
    pub extent: f64,
}

#[derive(Debug, Args)]
pub struct SchmidtArgs {
    /// Coefficients JSON.
    pub file: PathBuf,
}

#[derive(Debug, Args)]
pub struct StokesArgs {
    #[arg(long, value_enum, default_value = "azimuthal")]
    pub kind: KindArg,
    #[arg(long, value_parser = parse_complex, default_value = "2,0", allow_hyphen_values = true)]
    pub alpha: Complex64,
    #[arg(long, value_parser = parse_complex, default_value = "0,0", allow_hyphen_values = true)]
    pub zeta: Complex64,
    /// Two-mode signal state JSON; replaces `--kind/--alpha/--zeta`.
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    pub aux_amplitude: f64,
    /// Auxiliary phases for arms a and b as `a,b`; locked to the signal when absent.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub aux_phases: Option<(f64, f64)>,
    #[arg(long, value_enum, default_value = "pol")]
    pub dof: DofArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DofArg {
    Pol,
    Spa,
}

impl From<DofArg> for Dof {
    fn from(d: DofArg) -> Self {
        match d {
            DofArg::Pol => Dof::Pol,
            DofArg::Spa => Dof::Spa,
        }
    }
}

fn parse_pair(text: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| format!("expected 're,im' (two comma-separated numbers), got '{text}'"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("'{v}': {e}"));
    Ok((parse(a)?, parse(b)?))
}

/// `re,im` to a complex number.
pub fn parse_complex(text: &str) -> std::result::Result<Complex64, String> {
    parse_pair(text).map(|(re, im)| Complex64::new(re, im))
}

/// Float with 12 significant digits, trailing zeros trimmed.
pub fn fmt12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{v:.11e}");
        let (mantissa, e) = s.split_once('e').unwrap();
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{e}")
    }
}

/// Turns a config object into `--key value` tokens appended after the
/// command line, so config values win over flags.
fn config_tokens(path: &Path) -> std::result::Result<Vec<OsString>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| format!("config {} must be a JSON object", path.display()))?;
    let scalar = |key: &str, v: &serde_json::Value| -> std::result::Result<String, String> {
        match v {
            serde_json::Value::String(s) => Ok(s.clone()),
            serde_json::Value::Number(n) => Ok(n.to_string()),
            _ => Err(format!(
                "config key '{key}': expected a string, number, boolean or [a, b] pair"
            )),
        }
    };
    let mut tokens = Vec::new();
    for (key, v) in obj {
        if key == "config" {
            return Err("config files cannot nest --config".into());
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            serde_json::Value::Bool(true) => tokens.push(flag.into()),
            serde_json::Value::Bool(false) | serde_json::Value::Null => {}
            serde_json::Value::Array(items) => {
                let parts = items
                    .iter()
                    .map(|i| scalar(key, i))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                tokens.push(format!("{flag}={}", parts.join(",")).into());
            }
            other => tokens.push(format!("{flag}={}", scalar(key, other)?).into()),
        }
    }
    Ok(tokens)
}

/// Parses arguments (merging `--config`), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => return report_clap(e),
    };
    let cli = match &cli.config {
        None => cli,
        Some(path) => {
            match config_tokens(path) {
                Ok(tokens) => argv.extend(tokens),
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return EXIT_USAGE;
                }
            }
            match Cli::try_parse_from(&argv) {
                Ok(cli) => cli,
                Err(e) => return report_clap(e),
            }
        }
    };
    let started = Instant::now();
    let code = execute(&cli);
    if cli.verbose {
        eprintln!(
            "[hybrid-cv {}] {:?} exit {code} in {:.3} s",
            env!("CARGO_PKG_VERSION"),
            cli.command,
            started.elapsed().as_secs_f64()
        );
    }
    code
}

fn report_clap(e: clap::Error) -> i32 {
    let _ = e.print();
    if !e.use_stderr() {
        // --help and --version
        return EXIT_OK;
    }
    if !matches!(
        e.kind(),
        clap::error::ErrorKind::MissingSubcommand | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
    ) {
        eprintln!("\n{}", Cli::command().render_usage());
    }
    EXIT_USAGE
}

fn execute(cli: &Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Factorize(a) => cmd_factorize(cli, a),
        Command::Duan(a) => cmd_duan(cli, a),
        Command::Detect(a) => cmd_detect(cli, a),
        Command::Mode(a) => cmd_mode(cli, a),
        Command::Schmidt(a) => cmd_schmidt(cli, a),
        Command::Stokes(a) => cmd_stokes(cli, a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::Json(_) | Error::Unsupported(_) => EXIT_USAGE,
        Error::Io(_) => EXIT_WRITE,
        Error::UnreachableTarget { .. } => EXIT_UNREACHABLE,
        _ => EXIT_FAILED,
    }
}

/// Writes to `--out` or stdout; write failures become exit code 3.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn cmd_factorize(cli: &Cli, a: &FactorizeArgs) -> Result<i32> {
    let tol = cli.tol.unwrap_or(FACTORIZE_TOL);
    let deviation = verify_factorization(a.kind.into(), a.alpha, a.zeta)?;
    let passed = deviation < tol;
    let text = match cli.format {
        Some(Format::Json) => to_json(&serde_json::json!({
            "kind": CylindricalKind::from(a.kind),
            "alpha": a.alpha,
            "zeta": a.zeta,
            "max_deviation": deviation,
            "tol": tol,
            "passed": passed,
        })),
        _ => format!(
            "max deviation {} (tol {}): {}\n",
            fmt12(deviation),
            fmt12(tol),
            if passed { "ok" } else { "FAILED" }
        ),
    };
    emit(cli.out.as_deref(), text.as_bytes())?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}

/// Evenly spaced values from `lo` to `hi`, end points included.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect()
}

/// Scan rows with the closed-form comparison attached.
#[derive(Debug, Clone, Serialize)]
pub struct DuanRow {
    #[serde(flatten)]
    pub report: EntanglementReport,
    pub closed_form_criterion: f64,
    pub rel_gap: f64,
}

pub fn duan_rows(
    kind: CylindricalKind,
    s_values: &[f64],
    combinations: &[MeasurementCombination],
    lo_model: &LoModel,
) -> Result<Vec<DuanRow>> {
    scan(kind, s_values, combinations, lo_model)?
        .into_iter()
        .map(|report| {
            let closed = closed_form_criterion(report.s.unwrap_or(0.0))?;
            Ok(DuanRow {
                report,
                closed_form_criterion: closed,
                rel_gap: (report.lhs - closed).abs() / closed,
            })
        })
        .collect()
}

pub const DUAN_CSV_HEADER: &str =
    "s,mu,nu,dof_a,dof_b,lhs,bound,entangled,warn_asymmetric,closed_form_criterion,rel_gap";

pub fn duan_csv(rows: &[DuanRow]) -> String {
    let mut out = String::from(DUAN_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let r = &row.report;
        let c = &r.combination;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt12(r.s.unwrap_or(f64::NAN)),
            c.mu,
            c.nu,
            c.dof_a,
            c.dof_b,
            fmt12(r.lhs),
            fmt12(r.bound),
            r.entangled,
            r.warn_asymmetric,
            fmt12(row.closed_form_criterion),
            fmt12(row.rel_gap)
        );
    }
    out
}

fn cmd_duan(cli: &Cli, a: &DuanArgs) -> Result<i32> {
    if !(a.s_min >= 0.0) || !(a.s_max >= a.s_min) {
        return Err(Error::invalid(format!(
            "need 0 <= s_min <= s_max, got [{}, {}]",
            a.s_min, a.s_max
        )));
    }
    if a.steps == 0 {
        return Err(Error::invalid("steps must be at least 1"));
    }
    let kind: CylindricalKind = a.kind.into();
    let all = MeasurementCombination::three_sets(a.mu, a.nu)?;
    let combinations: Vec<_> = match a.dofs {
        DofSet::All => all.to_vec(),
        DofSet::PolPol => vec![all[0]],
        DofSet::SpaSpa => vec![all[1]],
        DofSet::Hybrid => vec![all[2]],
    };
    let lo_model = match a.lo_model {
        LoKind::Linearized => LoModel::linearized(kind, a.lo_amplitude),
        LoKind::Exact => LoModel::exact(kind, a.lo_amplitude),
    };
    let rows = duan_rows(kind, &linspace(a.s_min, a.s_max, a.steps), &combinations, &lo_model)?;
    let max_gap = rows.iter().map(|r| r.rel_gap).fold(0.0, f64::max);
    let text = match cli.format {
        Some(Format::Json) => to_json(&serde_json::json!({ "rows": rows, "max_rel_gap": max_gap })),
        _ => duan_csv(&rows),
    };
    emit(cli.out.as_deref(), text.as_bytes())?;
    let summary = format!("max_rel_gap={}", fmt12(max_gap));
    if cli.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(if max_gap < DUAN_GAP_TOL { EXIT_OK } else { EXIT_FAILED })
}

/// Detection of the bright amplitude-squeezed beam of `kind` at squeezing
/// `s`, both arms attenuated to transmission `eta`.
pub fn emulate_detection(
    kind: CylindricalKind,
    s: f64,
    eta: f64,
    alpha: f64,
    scheme: DetectionScheme,
) -> Result<DetectionResult> {
    if !(s >= 0.0) {
        return Err(Error::invalid(format!(
            "squeezing parameter must be non-negative, got {s}"
        )));
    }
    let state = build(&CylindricalStateSpec::new(
        kind,
        Complex64::new(alpha, 0.0),
        Complex64::new(s * ZETA_PER_S, 0.0),
        Construction::Composite,
    ))?
    .attenuate(0, eta)?
    .attenuate(1, eta)?;
    detect_scheme(&state, scheme)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub parameter: FitParam,
    pub value: f64,
    pub target_db: f64,
    pub achieved_db: f64,
    /// `10^(dB/10)` at the fitted point.
    pub variance_ratio: f64,
}

/// Solves for `s` (at fixed `eta`) or `eta` (at fixed `s`) so the reading is
/// `target_db`. The reading is sampled on a grid first; the first bracketing
/// interval is then bisected.
pub fn fit_detection(
    kind: CylindricalKind,
    scheme: DetectionScheme,
    alpha: f64,
    param: FitParam,
    fixed: f64,
    target_db: f64,
) -> Result<(FitResult, DetectionResult)> {
    let (lo, hi) = match param {
        FitParam::S => (0.0, FIT_S_MAX),
        // no light reaches the detectors at η = 0
        FitParam::Eta => (1e-6, 1.0),
    };
    let eval = |x: f64| -> Result<DetectionResult> {
        match param {
            FitParam::S => emulate_detection(kind, x, fixed, alpha, scheme),
            FitParam::Eta => emulate_detection(kind, fixed, x, alpha, scheme),
        }
    };
    let grid = linspace(lo, hi, FIT_SAMPLES + 1);
    let mut readings = Vec::with_capacity(grid.len());
    for &x in &grid {
        readings.push(eval(x)?.db_vs_qnl - target_db);
    }
    let bracket = readings
        .windows(2)
        .position(|w| w[0] == 0.0 || w[0].signum() != w[1].signum());
    let Some(i) = bracket else {
        let min = readings.iter().cloned().fold(f64::INFINITY, f64::min) + target_db;
        let max = readings.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + target_db;
        return Err(Error::UnreachableTarget {
            target_db,
            min_db: min,
            max_db: max,
        });
    };
    let value = bisect(
        |x| eval(x).map(|d| d.db_vs_qnl - target_db).unwrap_or(f64::NAN),
        grid[i],
        grid[i + 1],
        1e-14,
    )
    .ok_or_else(|| Error::invalid("fit bracket lost its sign change"))?;
    let result = eval(value)?;
    if (result.db_vs_qnl - target_db).abs() > FIT_DB_TOL {
        return Err(Error::UnreachableTarget {
            target_db,
            min_db: result.db_vs_qnl,
            max_db: result.db_vs_qnl,
        });
    }
    Ok((
        FitResult {
            parameter: param,
            value,
            target_db,
            achieved_db: result.db_vs_qnl,
            variance_ratio: result.variance / result.qnl_variance,
        },
        result,
    ))
}

fn cmd_detect(cli: &Cli, a: &DetectArgs) -> Result<i32> {
    if !(0.0..=1.0).contains(&a.eta) {
        return Err(Error::invalid(format!("eta must lie in [0, 1], got {}", a.eta)));
    }
    let kind: CylindricalKind = a.kind.into();
    let scheme: DetectionScheme = a.scheme.into();
    let (s, eta, fit, result) = match a.fit_db {
        None => (a.s, a.eta, None, emulate_detection(kind, a.s, a.eta, a.alpha, scheme)?),
        Some(target) => {
            let fixed = match a.fit_param {
                FitParam::S => a.eta,
                FitParam::Eta => a.s,
            };
            let (fit, result) = match fit_detection(kind, scheme, a.alpha, a.fit_param, fixed, target) {
                Ok(v) => v,
                Err(e @ Error::UnreachableTarget { .. }) => {
                    eprintln!("error: {e}");
                    return Ok(EXIT_UNREACHABLE);
                }
                Err(e) => return Err(e),
            };
            let (s, eta) = match a.fit_param {
                FitParam::S => (fit.value, a.eta),
                FitParam::Eta => (a.s, fit.value),
            };
            (s, eta, Some(fit), result)
        }
    };
    let doc = serde_json::json!({
        "kind": kind,
        "scheme": scheme,
        "s": s,
        "eta": eta,
        "alpha": a.alpha,
        "result": result,
        "variance_ratio": result.variance / result.qnl_variance,
        "fit": fit,
    });
    emit(cli.out.as_deref(), to_json(&doc).as_bytes())?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct SchmidtReport<'a> {
    lambdas: &'a [f64],
    schmidt_rank: f64,
    separable: bool,
}

fn schmidt_text(d: &SchmidtDecomposition, separable: bool) -> String {
    let lambdas: Vec<String> = d.lambdas.iter().map(|l| format!("{l:.12}")).collect();
    format!(
        "lambda=[{}]\nK={:.6}\n{}\n",
        lambdas.join(", "),
        d.schmidt_rank,
        if separable { "separable" } else { "entangled" }
    )
}

fn schmidt_output(cli: &Cli, c: &VectorModeCoefficients) -> Result<String> {
    let d = schmidt_decompose(c)?;
    let separable = is_structurally_separable(c, cli.tol.unwrap_or(1e-9))?;
    Ok(match cli.format {
        Some(Format::Json) => to_json(&SchmidtReport {
            lambdas: &d.lambdas,
            schmidt_rank: d.schmidt_rank,
            separable,
        }),
        _ => schmidt_text(&d, separable),
    })
}

fn cmd_mode(cli: &Cli, a: &ModeArgs) -> Result<i32> {
    if !(a.waist > 0.0) {
        return Err(Error::invalid(format!("waist must be positive, got {}", a.waist)));
    }
    let c = standard_mode(a.kind.into());
    let image = render_intensity(&c, a.grid, a.extent * a.waist, a.waist)?;
    if let Some(path) = &cli.out {
        std::fs::write(path, image.to_pgm())?;
    }
    print!("{}", schmidt_output(cli, &c)?);
    Ok(EXIT_OK)
}

fn cmd_schmidt(cli: &Cli, a: &SchmidtArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&a.file)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", a.file.display())))?;
    let c = VectorModeCoefficients::from_json(&text)?;
    emit(cli.out.as_deref(), schmidt_output(cli, &c)?.as_bytes())?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct StokesArm {
    arm: &'static str,
    mean: [f64; 4],
    variance: [f64; 4],
    /// Symmetrized covariances of (Ŝ₁,Ŝ₂), (Ŝ₁,Ŝ₃), (Ŝ₂,Ŝ₃).
    covariance: [f64; 3],
}

fn cmd_stokes(cli: &Cli, a: &StokesArgs) -> Result<i32> {
    let kind: CylindricalKind = a.kind.into();
    let signal = match &a.state {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
            GaussianState::from_json(&text)?
        }
        None => build(&CylindricalStateSpec::new(
            kind,
            a.alpha,
            a.zeta,
            Construction::Composite,
        ))?,
    };
    if signal.num_modes() != 2 {
        return Err(Error::invalid("signal state must have two modes"));
    }
    if !(a.aux_amplitude >= 0.0) {
        return Err(Error::invalid("auxiliary amplitude must be non-negative"));
    }
    let phases = a
        .aux_phases
        .map(|(x, y)| [x, y])
        .unwrap_or_else(|| crate::entanglement::locked_phases(kind));
    let aux = GaussianState::coherent(&[
        Complex64::from_polar(a.aux_amplitude, phases[0]),
        Complex64::from_polar(a.aux_amplitude, phases[1]),
    ])?;
    let full = signal.tensor(&aux);
    let mut arms = Vec::new();
    for (label, signal_mode, aux_mode) in [("a", 0, 2), ("b", 1, 3)] {
        let ops = (0..4u8)
            .map(|mu| stokes_observable(a.dof.into(), mu, (signal_mode, aux_mode), 4))
            .collect::<Result<Vec<_>>>()?;
        let mut mean = [0.0; 4];
        let mut variance = [0.0; 4];
        for (k, op) in ops.iter().enumerate() {
            let m = quadratic_stats(&full, op)?;
            mean[k] = m.mean;
            variance[k] = m.variance;
        }
        let covariance = [
            quadratic_covariance(&full, &ops[1], &ops[2])?,
            quadratic_covariance(&full, &ops[1], &ops[3])?,
            quadratic_covariance(&full, &ops[2], &ops[3])?,
        ];
        arms.push(StokesArm {
            arm: label,
            mean,
            variance,
            covariance,
        });
    }
    let text = match cli.format {
        Some(Format::Csv) => {
            let mut out = String::from("arm,mu,mean,variance\n");
            for arm in &arms {
                for mu in 0..4 {
                    let _ = writeln!(
                        out,
                        "{},{mu},{},{}",
                        arm.arm,
                        fmt12(arm.mean[mu]),
                        fmt12(arm.variance[mu])
                    );
                }
            }
            out
        }
        _ => to_json(&serde_json::json!({ "dof": Dof::from(a.dof), "aux_phases": phases, "arms": arms })),
    };
    emit(cli.out.as_deref(), text.as_bytes())?;
    Ok(EXIT_OK)
}
