//! Command-line front end: reads domain, spec and problem documents, runs the
//! checks or the solver, and writes reports and traces.

pub mod doc;
pub mod trace;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use thiserror::Error;
use tube_geodesics::domain::{from_reinhardt, validate_staircase, ReinhardtFactor};
use tube_geodesics::solver::SolveError;
use tube_geodesics::verify::{verify_geodesic, Level, VerifySettings};
use tube_geodesics::{solve_two_point, Geodesic, SolveProblem, Status, TubeDomain};

use doc::{AttemptDoc, Document, DomainDoc, Num, ReportDoc, SolutionDoc, SpecDoc};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_FAIL: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;
pub const EXIT_BUDGET: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Malformed(_) => EXIT_IO,
            CliError::Invalid(_) => EXIT_INVALID,
        }
    }
}

impl From<tube_geodesics::Error> for CliError {
    fn from(e: tube_geodesics::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "tube-geodesics", version, about = "Complex geodesics of convex tube domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a domain document.
    Validate { domain: PathBuf },
    /// Sample a geodesic along a circle |λ| = r.
    Trace {
        spec: PathBuf,
        domain: PathBuf,
        #[arg(long, default_value_t = 360)]
        samples: usize,
        #[arg(long, default_value_t = 0.999)]
        radius: f64,
        /// CSV file (a `.json` extension writes a trace document instead).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the geodesy checks on a spec.
    Verify {
        spec: PathBuf,
        domain: PathBuf,
        #[arg(long, value_enum, default_value_t = LevelArg::All)]
        level: LevelArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find a geodesic through two points.
    Solve {
        problem: PathBuf,
        /// Where to write the solved spec.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Staircase base of an intersection of Reinhardt domains.
    Reinhardt {
        #[arg(long = "p", required = true)]
        p: Vec<f64>,
        #[arg(long = "q", required = true)]
        q: Vec<f64>,
        #[arg(long = "alpha", required = true)]
        alpha: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Measure,
    Radial,
    Inverse,
    All,
}

impl From<LevelArg> for Level {
    fn from(l: LevelArg) -> Self {
        match l {
            LevelArg::Measure => Level::Measure,
            LevelArg::Radial => Level::Radial,
            LevelArg::Inverse => Level::Inverse,
            LevelArg::All => Level::All,
        }
    }
}

/// Caps the rayon pool from `TUBE_GEODESICS_THREADS`.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("TUBE_GEODESICS_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Invalid(format!("TUBE_GEODESICS_THREADS must be a positive integer, got {v:?}")))?;
    // a pool that is already built keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(cli: Cli) -> i32 {
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Validate { domain } => validate(&domain),
        Command::Trace { spec, domain, samples, radius, out } => trace_cmd(&spec, &domain, samples, radius, out.as_deref()),
        Command::Verify { spec, domain, level, out } => verify(&spec, &domain, level.into(), out.as_deref()),
        Command::Solve { problem, out } => solve(&problem, out.as_deref()),
        Command::Reinhardt { p, q, alpha, out } => reinhardt(&p, &q, &alpha, out.as_deref()),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn read_document(path: &Path) -> Result<Document, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    Document::parse(&text).map_err(|e| match e {
        CliError::Malformed(m) => CliError::Malformed(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn expect_domain(path: &Path) -> Result<DomainDoc, CliError> {
    match read_document(path)? {
        Document::Domain(d) => Ok(d),
        other => Err(CliError::Invalid(format!("{} holds a {} document, expected domain", path.display(), other.kind()))),
    }
}

fn expect_spec(path: &Path) -> Result<SpecDoc, CliError> {
    match read_document(path)? {
        Document::GeodesicSpec(s) => Ok(s),
        other => {
            Err(CliError::Invalid(format!("{} holds a {} document, expected geodesic_spec", path.display(), other.kind())))
        }
    }
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_atomic(p, contents.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(contents.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Pass => EXIT_OK,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
        Status::Fail => EXIT_FAIL,
    }
}

fn validate(path: &Path) -> Result<i32, CliError> {
    let d = expect_domain(path)?;
    let mut report = ReportDoc::new("validate", "pass");
    match &d {
        DomainDoc::Staircase { normals, points } => {
            let violations = validate_staircase(normals, points);
            for v in &violations {
                eprintln!("violation: {v}");
            }
            report.notes = violations.iter().map(|v| v.to_string()).collect();
            if !violations.is_empty() {
                report.status = "fail".into();
            }
        }
        other => {
            if let Err(e) = other.to_domain() {
                eprintln!("violation: {e}");
                report.notes.push(e.to_string());
                report.status = "fail".into();
            }
        }
    }
    emit(None, &Document::Report(report.clone()).to_json())?;
    Ok(if report.status == "pass" { EXIT_OK } else { EXIT_INVALID })
}

fn load_geodesic(spec: &Path, domain: &Path) -> Result<Geodesic, CliError> {
    let spec = expect_spec(spec)?.to_spec()?;
    let domain = expect_domain(domain)?.to_domain()?;
    Ok(Geodesic::new(spec, domain)?)
}

fn trace_cmd(spec: &Path, domain: &Path, samples: usize, radius: f64, out: Option<&Path>) -> Result<i32, CliError> {
    if samples == 0 {
        return Err(CliError::Invalid("--samples must be positive".into()));
    }
    if !(0.0..1.0).contains(&radius) {
        return Err(CliError::Invalid(format!("--radius must lie in [0, 1), got {radius}")));
    }
    let g = load_geodesic(spec, domain)?;
    let t = trace::sample(&g, samples, radius);
    match out {
        Some(p) if p.extension().is_some_and(|e| e == "json") => {
            write_atomic(p, Document::Trace(t).to_json().as_bytes())?;
        }
        Some(p) => {
            write_atomic(p, trace::rows_csv(&t).as_bytes())?;
            if !t.boundary.is_empty() {
                write_atomic(&trace::boundary_path(p), trace::boundary_csv(&t).as_bytes())?;
            }
        }
        None => emit(None, &trace::rows_csv(&t))?,
    }
    Ok(EXIT_OK)
}

fn verify(spec: &Path, domain: &Path, level: Level, out: Option<&Path>) -> Result<i32, CliError> {
    let g = load_geodesic(spec, domain)?;
    let report = verify_geodesic(&g, level, &VerifySettings::default())?;
    let status = report.status();
    for c in &report.conditions {
        eprintln!("{}: {} (worst {:e}, {} checked)", c.condition.name(), c.status.name(), c.worst, c.checked);
    }
    emit(out, &Document::Report(ReportDoc::from_report("verify", &report)).to_json())?;
    Ok(status_code(status))
}

fn solve(path: &Path, out: Option<&Path>) -> Result<i32, CliError> {
    let p = match read_document(path)? {
        Document::SolveProblem(p) => p,
        other => {
            return Err(CliError::Invalid(format!("{} holds a {} document, expected solve_problem", path.display(), other.kind())))
        }
    };
    let cx = |v: &[doc::Cx]| v.iter().map(|z| Complex::new(z[0], z[1])).collect::<Vec<_>>();
    let problem =
        SolveProblem::new(p.domain.to_domain()?, cx(&p.z), cx(&p.w))?.with_options(p.options.to_options()?);
    match solve_two_point(&problem) {
        Ok(sol) => {
            let spec = SpecDoc::from_spec(sol.spec())?;
            if let Some(o) = out {
                write_atomic(o, Document::GeodesicSpec(spec.clone()).to_json().as_bytes())?;
            }
            let mut report = ReportDoc::from_report("solve", &sol.report);
            report.solution = Some(SolutionDoc { case: sol.case.clone(), sigma: sol.sigma, residual: sol.residual, spec });
            eprintln!("solved via {} with sigma = {} (endpoint residual {:e})", sol.case, sol.sigma, sol.residual);
            emit(None, &Document::Report(report).to_json())?;
            Ok(EXIT_OK)
        }
        Err(SolveError::Invalid(e)) => Err(e.into()),
        Err(SolveError::Budget { best }) => {
            let mut report = ReportDoc::new("solve", "budget");
            report.attempts = best.into_iter().map(|(case, r)| AttemptDoc { case, residual: Num(r) }).collect();
            eprintln!("no verified geodesic within the search budget");
            emit(None, &Document::Report(report).to_json())?;
            Ok(EXIT_BUDGET)
        }
    }
}

fn reinhardt(p: &[f64], q: &[f64], alpha: &[f64], out: Option<&Path>) -> Result<i32, CliError> {
    if p.len() != q.len() || p.len() != alpha.len() {
        return Err(CliError::Invalid("--p, --q and --alpha must be given the same number of times".into()));
    }
    let factors: Vec<ReinhardtFactor> =
        p.iter().zip(q).zip(alpha).map(|((&p, &q), &alpha)| ReinhardtFactor { p, q, alpha }).collect();
    let d = TubeDomain::Staircase(from_reinhardt(&factors)?);
    emit(out, &Document::Domain(DomainDoc::from_domain(&d)).to_json())?;
    Ok(EXIT_OK)
}
