//! `ising-ff`: exact finite-lattice Ising form factors, correlations and
//! identity checks from the command line.
//!
//! Exit codes: 0 ok, 2 parse error, 3 domain error, 4 resource limit,
//! 5 verification failure (a residual above tolerance or a numerical failure).

mod report;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ising_formfactors::formfactors::{
    ff_closed, ff_pfaffian_with, two_point_correlation_with, CorrelationParams, FormFactorSpec, TwoParticleMatrices,
};
use ising_formfactors::oracle::{Oracle, SpinOperatorSet, MAX_CORRELATION_HEIGHT};
use ising_formfactors::spectral::{Couplings, Sector};
use ising_formfactors::verify::{run_suite, Suite};
use ising_formfactors::{Error, ErrorKind};

use report::{
    ComplexValue, CorrReport, CouplingsInput, FfEntry, FfReport, ParamsReport, PointRow, SpectrumReport,
    VerifyReport,
};

/// Widths up to which `ff` and `corr` consult the dense transfer-matrix oracle.
const ORACLE_MAX_WIDTH: usize = 10;

const EXIT_DOMAIN: u8 = 3;
const EXIT_RESOURCE: u8 = 4;
const EXIT_VERIFICATION: u8 = 5;

#[derive(Debug, Parser)]
#[command(name = "ising-ff", version, about = "Exact form factors and correlations of the finite periodic 2D Ising model")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,

    /// Tolerance for identity residuals and closed-versus-pfaffian agreement.
    #[arg(long, global = true, env = "ISING_FF_TOLERANCE", default_value_t = 1e-10)]
    tolerance: f64,

    /// Relative tolerance for agreement with the dense oracle.
    #[arg(long, global = true, default_value_t = 1e-8)]
    oracle_tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct CouplingArgs {
    #[arg(long)]
    kx: f64,
    #[arg(long)]
    ky: f64,
    /// Lattice width N.
    #[arg(long, default_value_t = 1)]
    n: usize,
}

impl CouplingArgs {
    fn build(&self) -> Result<Couplings, Error> {
        Couplings::new(self.n, self.kx, self.ky)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derived scalars of the couplings: k, K, K', eta, xi, ...
    Params(CouplingArgs),
    /// Spectral data of every quasimomentum in both sectors.
    Spectrum(CouplingArgs),
    /// Form factors <bra|s_site|ket> by the product formula, the pfaffian and,
    /// for N <= 10, the dense oracle. Repeat --bra/--ket to sweep all pairs.
    Ff {
        #[command(flatten)]
        couplings: CouplingArgs,
        #[arg(long, default_value_t = 0)]
        site: usize,
        /// Comma-separated antiperiodic momentum indices; "" for the vacuum.
        #[arg(long, value_parser = parse_indices, allow_hyphen_values = true)]
        bra: Vec<IndexList>,
        /// Comma-separated periodic momentum indices; "" for the vacuum.
        #[arg(long, value_parser = parse_indices, allow_hyphen_values = true)]
        ket: Vec<IndexList>,
    },
    /// Two-point function <s(0,0) s(dx,dy)> on the M x N torus.
    Corr {
        #[command(flatten)]
        couplings: CouplingArgs,
        #[arg(long)]
        m_height: usize,
        #[arg(long, default_value_t = 0)]
        dx: usize,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        dy: i64,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true, value_parser = parse_sign)]
        eps_x: i8,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true, value_parser = parse_sign)]
        eps_y: i8,
        /// Largest particle number kept in the spectral sum.
        #[arg(long)]
        cutoff: Option<usize>,
    },
    /// Run an identity suite and report the largest residuals.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        #[command(flatten)]
        couplings: CouplingArgs,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct IndexList(Vec<usize>);

fn parse_indices(s: &str) -> Result<IndexList, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(IndexList(Vec::new()));
    }
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad momentum index '{t}': {e}")))
        .collect::<Result<_, _>>()
        .map(IndexList)
}

fn parse_sign(s: &str) -> Result<i8, String> {
    match s {
        "1" | "+1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err(format!("expected 1 or -1, got '{s}'")),
    }
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|_| format!("unknown suite '{s}' (elliptic | cauchy | rotation | formfactor | all)"))
}

/// A command's failure: a library error or a failed comparison whose report
/// has already been written.
enum Failure {
    Lib(Error),
    Io(io::Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(io::Error::other(e))
    }
}

fn emit_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(io::Error::other)?;
    writeln!(out)?;
    Ok(())
}

fn emit_csv<T: Serialize>(rows: &[T]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn params(cli: &Cli, args: &CouplingArgs) -> Result<(), Failure> {
    let report = ParamsReport::new(&args.build()?);
    match cli.output {
        Output::Json => emit_json(&report),
        Output::Csv => emit_csv(&[report]),
    }
}

fn spectrum(cli: &Cli, args: &CouplingArgs) -> Result<(), Failure> {
    let c = args.build()?;
    let rows = |sector| c.points(sector).iter().enumerate().map(|(i, p)| PointRow::new(sector, i, p)).collect::<Vec<_>>();
    let report = SpectrumReport {
        couplings: CouplingsInput::of(&c),
        antiperiodic: rows(Sector::Antiperiodic),
        periodic: rows(Sector::Periodic),
    };
    match cli.output {
        Output::Json => emit_json(&report),
        Output::Csv => {
            let all: Vec<&PointRow> = report.antiperiodic.iter().chain(&report.periodic).collect();
            emit_csv(&all)
        }
    }
}

fn ff(cli: &Cli, args: &CouplingArgs, site: usize, bras: &[IndexList], kets: &[IndexList]) -> Result<(), Failure> {
    let c = args.build()?;
    let vacuum = [IndexList(Vec::new())];
    let bras = if bras.is_empty() { &vacuum[..] } else { bras };
    let kets = if kets.is_empty() { &vacuum[..] } else { kets };
    // Validate every pair before the expensive parts.
    let mut specs = Vec::new();
    for b in bras {
        for k in kets {
            specs.push(FormFactorSpec::from_indices(c.n(), site, &b.0, &k.0)?);
        }
    }
    let tp = TwoParticleMatrices::closed(&c, site)?;
    let oracle = if c.n() <= ORACLE_MAX_WIDTH { Some(Oracle::new(&c)?) } else { None };
    let mut results = Vec::new();
    for spec in &specs {
        let closed = ff_closed(spec, &c)?;
        let pf = ff_pfaffian_with(spec, &tp)?;
        let residual_pfaffian = (pf.value - closed.value).norm() / closed.value.norm();
        let oracle_abs = oracle.as_ref().map(|o| o.ff_modulus(spec)).transpose()?;
        let residual_oracle = oracle_abs.map(|o| relative(closed.modulus(), o));
        results.push(FfEntry {
            site,
            bra: spec.bra().indices().to_vec(),
            ket: spec.ket().indices().to_vec(),
            closed: ComplexValue::from(&closed),
            pfaffian: ComplexValue::from(&pf),
            residual_pfaffian,
            agree_pfaffian: residual_pfaffian <= cli.tolerance,
            oracle_abs,
            residual_oracle,
            agree_oracle: residual_oracle.map(|r| r <= cli.oracle_tolerance),
        });
    }
    let report = FfReport {
        couplings: CouplingsInput::of(&c),
        tolerance: cli.tolerance,
        oracle_tolerance: cli.oracle_tolerance,
        results,
    };
    match cli.output {
        Output::Json => emit_json(&report)?,
        Output::Csv => emit_csv(&report.rows())?,
    }
    if report.results.iter().all(FfEntry::agrees) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn corr(cli: &Cli, args: &CouplingArgs, p: CorrelationParams, cutoff: Option<usize>) -> Result<(), Failure> {
    let c = args.build()?;
    let r = two_point_correlation_with(&c, p, cutoff)?;
    let oracle = if c.n() <= ORACLE_MAX_WIDTH && p.m_height <= MAX_CORRELATION_HEIGHT {
        let ops = SpinOperatorSet::new(&c, p.eps_y)?;
        Some(ising_formfactors::oracle::oracle_correlation(&ops, p.m_height, p.dx, p.dy, p.eps_x)?)
    } else {
        None
    };
    // A truncated sum agrees when the oracle lies within the tail bound.
    let residual_oracle = oracle.map(|o| (r.value - o).abs());
    let agree_oracle = residual_oracle.map(|d| d <= cli.oracle_tolerance + r.tail_bound);
    let report = CorrReport {
        kx: c.kx(),
        ky: c.ky(),
        n: c.n(),
        m_height: p.m_height,
        dx: p.dx,
        dy: p.dy,
        eps_x: p.eps_x,
        eps_y: p.eps_y,
        value: r.value,
        tail_bound: r.tail_bound,
        cutoff: r.cutoff,
        states_antiperiodic: r.states_antiperiodic,
        states_periodic: r.states_periodic,
        oracle,
        residual_oracle,
        agree_oracle,
    };
    match cli.output {
        Output::Json => emit_json(&report)?,
        Output::Csv => emit_csv(&[&report])?,
    }
    if agree_oracle.unwrap_or(true) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn verify(cli: &Cli, args: &CouplingArgs, suite: Suite) -> Result<(), Failure> {
    let c = args.build()?;
    let reports = run_suite(suite, &c)?;
    let report = VerifyReport::new(&c, cli.tolerance, &reports);
    match cli.output {
        Output::Json => emit_json(&report)?,
        Output::Csv => emit_csv(&report.rows())?,
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if !(cli.tolerance > 0.0 && cli.oracle_tolerance > 0.0) {
        return Err(Error::Domain("tolerances must be positive".into()).into());
    }
    match &cli.command {
        Command::Params(a) => params(cli, a),
        Command::Spectrum(a) => spectrum(cli, a),
        Command::Ff { couplings, site, bra, ket } => ff(cli, couplings, *site, bra, ket),
        Command::Corr { couplings, m_height, dx, dy, eps_x, eps_y, cutoff } => {
            let p = CorrelationParams::new(*m_height, *dx, *dy, *eps_x, *eps_y)?;
            corr(cli, couplings, p, *cutoff)
        }
        Command::Verify { suite, couplings } => verify(cli, couplings, *suite),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => {
            eprintln!("error: verification failed (see report)");
            ExitCode::from(EXIT_VERIFICATION)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Input => EXIT_DOMAIN,
                ErrorKind::Resource => EXIT_RESOURCE,
                ErrorKind::Numerical => EXIT_VERIFICATION,
            })
        }
    }
}
