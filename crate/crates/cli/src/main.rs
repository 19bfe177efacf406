//! `phasekit` command-line front end.
//!
//! Exit codes: 0 success, 1 check or tolerance failure, 2 usage error.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use phasekit::boundary::corpus;
use phasekit::checks::{run_check, CheckParams, CheckSuite};
use phasekit::coherent::{classical_limit_scan_at, DEFAULT_TAIL_TOL, SCAN_COLUMNS};
use phasekit::linalg::{eigen_decompose, OperatorMatrix};
use phasekit::phase::{build_abs_phase, build_cos_phase, build_function_of_phase, PhaseKernel};
use phasekit::{PhaseSector, ScanTable, ToleranceConfig, Value};

const TOL_ENV: &str = "PHASEKIT_TOL_OVERRIDE";

const BUILD_HELP: &str = "\
CSV columns: kind,i,j,re,im
  kind=entry       one row per matrix entry (i, j) in row-major order
  kind=eigenvalue  one row per eigenvalue, ascending; i = j = index, im = 0";

const SCAN_HELP: &str = "\
CSV columns: theta,nbar,sector,dim,expect,abs_theta,fourier_ref,deviation
  rows in grid order (sector outer, then theta, then nbar);
  deviation = |expect - |theta||; fourier_ref is the 9999-term cosine series.
Grid syntax: comma list (0.5,1,1.5) or start:stop:count (0.5:3:6).";

const CHECK_HELP: &str = "\
CSV columns: check,case,value,tolerance,pass (boundary adds per-pair residual rows;
oracle reports one row per entry with closed_form, adaptive and fixed-order values).
Offending cases are listed on stderr and the exit code is 1.";

#[derive(Parser, Debug)]
#[command(
    name = "phasekit",
    version,
    about = "Absolute-phase and angle operators as truncated matrices"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress the metadata header.
    #[arg(long, global = true)]
    no_meta: bool,
    /// key=value config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Tolerance override key=value (repeatable, comma lists accepted).
    #[arg(long = "tol", global = true)]
    tol: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a phase operator matrix and its spectrum.
    #[command(after_long_help = BUILD_HELP)]
    Build(BuildArgs),
    /// Coherent-state expectation of |Phi| over a theta x nbar grid.
    #[command(name = "coherent-scan", after_long_help = SCAN_HELP)]
    CoherentScan(ScanArgs),
    /// Run a verification suite.
    #[command(after_long_help = CHECK_HELP)]
    Check(CheckArgs),
    /// List the shipped boundary-check corpus.
    Corpus,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[arg(long, value_enum)]
    sector: Option<SectorArg>,
    #[arg(long, value_enum)]
    kernel: Option<KernelArg>,
    #[arg(long)]
    dim: Option<usize>,
    /// Cosine coefficients a_0,a_1,... for --kernel series.
    #[arg(long)]
    coeffs: Option<String>,
    /// Series cutoff for --kernel absphi-series.
    #[arg(long)]
    cutoff: Option<usize>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    nbar: Option<String>,
    #[arg(long, value_enum)]
    sector: Option<ScanSectorArg>,
    /// Poisson tail tolerance for the truncation.
    #[arg(long)]
    tail_tol: Option<f64>,
    /// Fixed truncation; fails if too small for some nbar.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(value_enum)]
    which: CheckArg,
    /// Rotator truncation |m| <= m_max.
    #[arg(long)]
    m_max: Option<usize>,
    /// Oracle sweep covers n, m < max_index.
    #[arg(long)]
    max_index: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SectorArg {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScanSectorArg {
    Plus,
    Minus,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum KernelArg {
    Absphi,
    Cosphi,
    Identity,
    Series,
    AbsphiSeries,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CheckArg {
    Rotator,
    Boundary,
    Oracle,
    Commutators,
}

/// How a run ended, mapped onto the exit-code contract.
enum Failure {
    Usage(String),
    /// Message, plus the residual table when there is one to write.
    Check(String, Option<ScanTable>),
}

type Outcome<T> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn failed(msg: impl ToString) -> Failure {
    Failure::Check(msg.to_string(), None)
}

/// Keys a config file may set besides tolerances (bare or `tol.`-prefixed).
const CONFIG_KEYS: [&str; 13] = [
    "format",
    "out",
    "no_meta",
    "sector",
    "kernel",
    "dim",
    "coeffs",
    "cutoff",
    "theta",
    "nbar",
    "tail_tol",
    "m_max",
    "max_index",
];

/// Values from the config file, keyed by flag name (`-` and `_` both accepted).
#[derive(Default)]
struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    fn load(path: &Path) -> Outcome<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                usage(format!(
                    "{}:{}: expected key=value",
                    path.display(),
                    lineno + 1
                ))
            })?;
            let key = k.trim().replace('-', "_");
            let bare = key.strip_prefix("tol.").unwrap_or(&key);
            if !CONFIG_KEYS.contains(&key.as_str()) && !ToleranceConfig::KEYS.contains(&bare) {
                return Err(usage(format!(
                    "{}:{}: unknown key {key:?}",
                    path.display(),
                    lineno + 1
                )));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Outcome<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| usage(format!("config {key}: cannot parse {v:?}")))
            })
            .transpose()
    }

    fn choice<T: ValueEnum>(&self, key: &str) -> Outcome<Option<T>> {
        self.get(key)
            .map(|v| {
                T::from_str(v, true)
                    .map_err(|_| usage(format!("config {key}: invalid value {v:?}")))
            })
            .transpose()
    }

    fn tolerances(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().filter_map(|(k, v)| {
            let key = k.strip_prefix("tol.").unwrap_or(k);
            ToleranceConfig::KEYS
                .contains(&key)
                .then_some((key, v.as_str()))
        })
    }
}

/// Defaults, then config file, then `PHASEKIT_TOL_OVERRIDE`, then `--tol`.
fn resolve_tolerances(cfg: &ConfigFile, flags: &[String]) -> Outcome<ToleranceConfig> {
    let mut tol = ToleranceConfig::default();
    for (k, v) in cfg.tolerances() {
        tol.apply_overrides(&format!("{k}={v}"))
            .map_err(|e| usage(e.to_string()))?;
    }
    if let Ok(env) = std::env::var(TOL_ENV) {
        tol.apply_overrides(&env)
            .map_err(|e| usage(format!("{TOL_ENV}: {e}")))?;
    }
    for spec in flags {
        tol.apply_overrides(spec)
            .map_err(|e| usage(format!("--tol: {e}")))?;
    }
    Ok(tol)
}

/// Comma list or `start:stop:count` with `count >= 1` evenly spaced points.
fn parse_grid(s: &str) -> Outcome<Vec<f64>> {
    let bad = || usage(format!("malformed grid {s:?}"));
    let s = s.trim();
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [a, b, n] = parts[..] else {
            return Err(bad());
        };
        let a: f64 = a.parse().map_err(|_| bad())?;
        let b: f64 = b.parse().map_err(|_| bad())?;
        let n: usize = n.parse().map_err(|_| bad())?;
        if n == 0 || !a.is_finite() || !b.is_finite() {
            return Err(bad());
        }
        if n == 1 {
            return Ok(vec![a]);
        }
        return Ok((0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect());
    }
    let values: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Outcome<_>>()?;
    if values.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    Ok(values)
}

fn parse_coeffs(s: &str) -> Outcome<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("malformed coefficient list {s:?}")))
        })
        .collect()
}

fn sector_of(arg: SectorArg) -> PhaseSector {
    match arg {
        SectorArg::Plus => PhaseSector::Plus,
        SectorArg::Minus => PhaseSector::Minus,
    }
}

fn run_build(
    args: &BuildArgs,
    cfg: &ConfigFile,
    tol: &ToleranceConfig,
    params: &mut Vec<(String, String)>,
) -> Outcome<ScanTable> {
    let sector = sector_of(pick(args.sector, cfg.choice("sector")?, SectorArg::Plus));
    let kernel = pick(args.kernel, cfg.choice("kernel")?, KernelArg::Absphi);
    let dim = args
        .dim
        .or(cfg.parsed("dim")?)
        .ok_or_else(|| usage("build requires --dim"))?;
    if dim == 0 {
        return Err(usage("--dim must be at least 1"));
    }
    params.push(("sector".into(), sector.name().into()));
    params.push((
        "kernel".into(),
        kernel.to_possible_value().unwrap().get_name().into(),
    ));
    params.push(("dim".into(), dim.to_string()));

    // Spectral bounds are the range of the kernel on [0, pi].
    let (matrix, lo, hi) = match kernel {
        KernelArg::Absphi => (build_abs_phase(sector, dim), 0.0, std::f64::consts::PI),
        KernelArg::Cosphi => {
            if dim < 2 {
                return Err(usage("--kernel cosphi needs --dim >= 2"));
            }
            (build_cos_phase(sector, dim), -1.0, 1.0)
        }
        KernelArg::Identity => (
            build_function_of_phase(&PhaseKernel::constant(1.0), sector, dim),
            1.0,
            1.0,
        ),
        KernelArg::Series | KernelArg::AbsphiSeries => {
            let k = if kernel == KernelArg::Series {
                let text = args
                    .coeffs
                    .clone()
                    .or(cfg.get("coeffs").map(String::from))
                    .ok_or_else(|| usage("--kernel series requires --coeffs"))?;
                params.push(("coeffs".into(), text.clone()));
                PhaseKernel::new(parse_coeffs(&text)?).map_err(|e| usage(e.to_string()))?
            } else {
                let cutoff = args
                    .cutoff
                    .or(cfg.parsed("cutoff")?)
                    .ok_or_else(|| usage("--kernel absphi-series requires --cutoff"))?;
                params.push(("cutoff".into(), cutoff.to_string()));
                PhaseKernel::abs_phi_series(cutoff)
            };
            let bound: f64 = k.coeffs().iter().map(|a| a.abs()).sum();
            (build_function_of_phase(&k, sector, dim), -bound, bound)
        }
    };
    let matrix = matrix.map_err(failed)?;
    build_table(&matrix, sector, lo, hi, tol)
}

fn build_table(
    m: &OperatorMatrix,
    sector: PhaseSector,
    lo: f64,
    hi: f64,
    tol: &ToleranceConfig,
) -> Outcome<ScanTable> {
    let herm = m.hermitian_residual();
    if herm > tol.hermiticity {
        return Err(failed(format!(
            "hermiticity residual {herm:e} exceeds {:e}",
            tol.hermiticity
        )));
    }
    let spec = eigen_decompose(m).map_err(failed)?;
    let slack = tol.spectrum_slack;
    if spec.min() < lo - slack || spec.max() > hi + slack {
        return Err(failed(format!(
            "spectrum [{:e}, {:e}] leaves [{lo}, {hi}] by more than {slack:e}",
            spec.min(),
            spec.max()
        )));
    }

    let mut t = ScanTable::new(
        ["kind", "i", "j", "re", "im"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    );
    let row = |kind: &str, i: usize, j: usize, re: f64, im: f64| {
        vec![
            Value::Text(kind.into()),
            Value::Int(i as i64),
            Value::Int(j as i64),
            Value::Real(re),
            Value::Real(im),
        ]
    };
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            let z = m.get(i, j);
            t.push_row(row("entry", i, j, z.re, z.im))
                .expect("fixed width");
        }
    }
    for (k, &l) in spec.eigenvalues.iter().enumerate() {
        t.push_row(row("eigenvalue", k, k, l, 0.0))
            .expect("fixed width");
    }
    t.push_meta("hermiticity_residual", format!("{herm:e}"));
    t.push_meta("spectrum_min", format!("{:e}", spec.min()));
    t.push_meta("spectrum_max", format!("{:e}", spec.max()));
    if sector == PhaseSector::Minus {
        // Index 0 has no sine partner, so its row and column are identically zero.
        t.push_meta(
            "index0_null",
            "true (one zero eigenvalue is an artifact of n=0)",
        );
    }
    Ok(t)
}

fn run_scan(
    args: &ScanArgs,
    cfg: &ConfigFile,
    params: &mut Vec<(String, String)>,
) -> Outcome<ScanTable> {
    let theta_text = args
        .theta
        .clone()
        .or(cfg.get("theta").map(String::from))
        .ok_or_else(|| usage("coherent-scan requires --theta"))?;
    let nbar_text = args
        .nbar
        .clone()
        .or(cfg.get("nbar").map(String::from))
        .ok_or_else(|| usage("coherent-scan requires --nbar"))?;
    let thetas = parse_grid(&theta_text)?;
    let nbars = parse_grid(&nbar_text)?;
    if nbars.iter().any(|&n| n < 0.0) {
        return Err(usage("nbar values must be >= 0"));
    }
    let tail_tol = args
        .tail_tol
        .or(cfg.parsed("tail_tol")?)
        .unwrap_or(DEFAULT_TAIL_TOL);
    if !(tail_tol > 0.0 && tail_tol.is_finite()) {
        return Err(usage("--tail-tol must be positive"));
    }
    let dim = args.dim.or(cfg.parsed("dim")?);
    if dim == Some(0) {
        return Err(usage("--dim must be at least 1"));
    }
    let which = pick(args.sector, cfg.choice("sector")?, ScanSectorArg::Plus);
    let sectors: &[PhaseSector] = match which {
        ScanSectorArg::Plus => &[PhaseSector::Plus],
        ScanSectorArg::Minus => &[PhaseSector::Minus],
        ScanSectorArg::Both => &PhaseSector::ALL,
    };
    params.push(("theta".into(), theta_text));
    params.push(("nbar".into(), nbar_text));
    params.push((
        "sector".into(),
        which.to_possible_value().unwrap().get_name().into(),
    ));
    params.push(("tail_tol".into(), format!("{tail_tol:e}")));

    let mut out = ScanTable::new(SCAN_COLUMNS.iter().map(|s| s.to_string()).collect());
    for &s in sectors {
        let t = classical_limit_scan_at(&thetas, &nbars, s, tail_tol, dim).map_err(failed)?;
        if out.meta().is_empty() {
            for (k, v) in t.meta().iter().filter(|(k, _)| k != "sector") {
                out.push_meta(k.clone(), v.clone());
            }
        }
        for row in t.rows() {
            out.push_row(row.clone()).expect("same columns");
        }
    }
    Ok(out)
}

fn run_checks(
    args: &CheckArgs,
    cfg: &ConfigFile,
    tol: &ToleranceConfig,
    params: &mut Vec<(String, String)>,
) -> Outcome<ScanTable> {
    let defaults = CheckParams::default();
    let p = CheckParams {
        m_max: args
            .m_max
            .or(cfg.parsed("m_max")?)
            .unwrap_or(defaults.m_max),
        max_index: args
            .max_index
            .or(cfg.parsed("max_index")?)
            .unwrap_or(defaults.max_index),
    };
    if p.m_max == 0 || p.max_index == 0 {
        return Err(usage("--m-max and --max-index must be at least 1"));
    }
    let suite = match args.which {
        CheckArg::Rotator => CheckSuite::Rotator,
        CheckArg::Boundary => CheckSuite::Boundary,
        CheckArg::Oracle => CheckSuite::Oracle,
        CheckArg::Commutators => CheckSuite::Commutators,
    };
    match suite {
        CheckSuite::Rotator => params.push(("m_max".into(), p.m_max.to_string())),
        CheckSuite::Oracle => params.push(("max_index".into(), p.max_index.to_string())),
        _ => {}
    }
    let report = run_check(suite, p, tol).map_err(failed)?;
    if report.passed() {
        Ok(report.table)
    } else {
        let msg = format!(
            "{} check(s) failed:\n{}",
            report.failures.len(),
            report.failures.join("\n")
        );
        Err(Failure::Check(msg, Some(report.table)))
    }
}

fn corpus_table() -> ScanTable {
    let mut t = ScanTable::new(
        ["name", "domain", "h_r_plus", "h_r_minus"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    );
    for c in corpus() {
        t.push_row(vec![
            Value::Text(c.name.into()),
            Value::Text(if c.on_circle { "circle" } else { "half_line" }.into()),
            Value::Text(c.plus.to_string()),
            Value::Text(c.minus.to_string()),
        ])
        .expect("fixed width");
    }
    t
}

fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

fn render(
    table: &ScanTable,
    header: &[(String, String)],
    format: Format,
    with_meta: bool,
) -> String {
    match format {
        Format::Csv => {
            let mut out = String::new();
            if with_meta {
                for (k, v) in header {
                    out.push_str(&format!("# {k}: {v}\n"));
                }
            }
            out.push_str(&table.to_csv(with_meta));
            out
        }
        Format::Json => {
            let mut v = table.to_json(with_meta);
            if let Some(meta) = v.get_mut("meta").and_then(|m| m.as_object_mut()) {
                for (k, val) in header {
                    meta.insert(k.clone(), serde_json::Value::String(val.clone()));
                }
            }
            let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
            s.push('\n');
            s
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Outcome<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not an error worth reporting.
            let _ = stdout.write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Outcome<()> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let tol = resolve_tolerances(&cfg, &cli.tol)?;
    let format = pick(cli.format, cfg.choice("format")?, Format::Csv);
    let out = cli.out.clone().or(cfg.get("out").map(PathBuf::from));
    let with_meta = !(cli.no_meta || cfg.parsed::<bool>("no_meta")?.unwrap_or(false));

    let mut params = Vec::new();
    let (name, result) = match &cli.command {
        Command::Build(a) => ("build", run_build(a, &cfg, &tol, &mut params)),
        Command::CoherentScan(a) => ("coherent-scan", run_scan(a, &cfg, &mut params)),
        Command::Check(a) => ("check", run_checks(a, &cfg, &tol, &mut params)),
        Command::Corpus => ("corpus", Ok(corpus_table())),
    };

    let mut header = vec![
        (
            "tool".to_string(),
            format!("phasekit {}", env!("CARGO_PKG_VERSION")),
        ),
        ("command".to_string(), name.to_string()),
    ];
    header.extend(
        tol.fields()
            .iter()
            .map(|(k, v)| (format!("tol.{k}"), format!("{v:e}"))),
    );
    header.extend(params.into_iter().map(|(k, v)| (format!("param.{k}"), v)));

    match result {
        Ok(table) => emit(&render(&table, &header, format, with_meta), out.as_deref()),
        // The residual table is still written so offending rows can be inspected.
        Err(Failure::Check(msg, Some(table))) => {
            emit(&render(&table, &header, format, with_meta), out.as_deref())?;
            Err(failed(msg))
        }
        Err(e) => Err(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg, _)) => {
            eprintln!("phasekit: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("phasekit: {msg}\nRun with --help for usage.");
            ExitCode::from(2)
        }
    }
}
