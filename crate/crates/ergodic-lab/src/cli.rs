//! Command-line interface: rearrange / norms / membership / simulate /
//! synthesize / verify over function and operator files.
//!
//! Exit codes: 0 on success (and on a verified certificate), 1 when a
//! certificate fails verification, 2 on malformed input. Output is
//! deterministic: identical inputs produce identical bytes.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::counterexample::{check_trace, synthesize};
use crate::error::{Error, Result};
use crate::measure::Location;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::rearrangement::rearrange;
use crate::schema::{
    load_certificate, load_function, load_operator, to_json_string, CertificateFile, OperatorFile,
};
use crate::spaces::{
    contains_one, has_iet, space_norm, LorentzWeight, OrliczFunction, SpaceDescriptor,
};

#[derive(Parser)]
#[command(
    name = "ergodic-lab",
    version,
    about = "Exact rearrangements, symmetric-space norms, ergodic averages \
             and divergence certificates on sigma-finite measure models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Write to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the decreasing rearrangement of a function as (value,width) rows.
    Rearrange {
        /// Function file (JSON).
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Report the norm of a function in a catalog space, plus the space's
    /// membership predicates.
    Norms {
        #[arg(long = "fn")]
        function: PathBuf,
        /// l1 | linf | l1cap | l1plus | orlicz:power:<p> |
        /// orlicz:shifted:<u0>:<p> | lorentz:power:<gamma> |
        /// lorentz:capped:<c>
        #[arg(long)]
        space: String,
        /// Relative tolerance for the Luxemburg norm bisection.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Report whether the averages of a function converge for every
    /// Dunford-Schwartz operator.
    Membership {
        #[arg(long = "fn")]
        function: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Trace the Cesaro averages of an operator at one point.
    Simulate {
        /// Operator file (JSON).
        #[arg(long)]
        op: PathBuf,
        #[arg(long = "fn")]
        function: PathBuf,
        /// Tracked point, e.g. atom:1 or cell:3.
        #[arg(long)]
        at: String,
        /// Largest average order to report.
        #[arg(long = "n-max")]
        n_max: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build the divergence counterexample for a function outside R_mu.
    Synthesize {
        #[arg(long = "fn")]
        function: PathBuf,
        /// Certificate depth (number of oscillations witnessed).
        #[arg(long, default_value_t = 8)]
        depth: u64,
        /// Where to write the certificate JSON (stdout when omitted).
        #[arg(long = "out-cert")]
        out_cert: Option<PathBuf>,
        /// Where to write the synthesized operator JSON.
        #[arg(long = "out-op")]
        out_op: Option<PathBuf>,
    },
    /// Re-check a certificate against its operator and function files.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        op: PathBuf,
        #[arg(long = "fn")]
        function: PathBuf,
    },
}

/// Runs the CLI on the given arguments and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Rearrange {
            function,
            format,
            output,
        } => cmd_rearrange(&function, format, &output),
        Command::Norms {
            function,
            space,
            tol,
            output,
        } => cmd_norms(&function, &space, tol, &output),
        Command::Membership { function, output } => cmd_membership(&function, &output),
        Command::Simulate {
            op,
            function,
            at,
            n_max,
            format,
            output,
        } => cmd_simulate(&op, &function, &at, n_max, format, &output),
        Command::Synthesize {
            function,
            depth,
            out_cert,
            out_op,
        } => cmd_synthesize(&function, depth, out_cert.as_deref(), out_op.as_deref()),
        Command::Verify { cert, op, function } => cmd_verify(&cert, &op, &function),
    }
}

fn emit(output: &OutputArgs, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct StepRow {
    value: String,
    width: String,
}

fn cmd_rearrange(function: &Path, format: OutputFormat, output: &OutputArgs) -> Result<i32> {
    let f = load_function(function)?;
    let r = rearrange(&f);
    let rows: Vec<StepRow> = r
        .steps()
        .iter()
        .map(|s| StepRow {
            value: format_rational(&s.value),
            width: s.width.to_string(),
        })
        .collect();
    let text = match format {
        OutputFormat::Csv => rows
            .iter()
            .map(|row| format!("{},{}\n", row.value, row.width))
            .collect::<String>(),
        OutputFormat::Json => to_json_string(&rows)?,
    };
    emit(output, &text)?;
    Ok(0)
}

#[derive(Serialize)]
struct NormReport {
    space: String,
    norm: String,
    in_space: bool,
    contains_one: bool,
    has_iet: bool,
}

fn cmd_norms(function: &Path, space: &str, tol: f64, output: &OutputArgs) -> Result<i32> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::Parse("tolerance must be positive".into()));
    }
    let f = load_function(function)?;
    let descriptor = parse_space(space)?;
    let tol =
        Rational::from_float(tol).ok_or_else(|| Error::Parse("tolerance must be finite".into()))?;
    let norm = space_norm(&f, &descriptor, &tol);
    let report = NormReport {
        space: space.to_string(),
        norm: norm.to_string(),
        in_space: norm.is_finite(),
        contains_one: contains_one(&descriptor),
        has_iet: has_iet(&descriptor),
    };
    emit(output, &to_json_string(&report)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct MembershipReport {
    in_r_mu: bool,
    rearrangement_tail: String,
}

fn cmd_membership(function: &Path, output: &OutputArgs) -> Result<i32> {
    let f = load_function(function)?;
    let report = MembershipReport {
        in_r_mu: f.in_r_mu(),
        rearrangement_tail: format_rational(&rearrange(&f).tail_value()),
    };
    emit(output, &to_json_string(&report)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct TraceRow {
    n: u64,
    value: String,
}

fn cmd_simulate(
    op: &Path,
    function: &Path,
    at: &str,
    n_max: u64,
    format: OutputFormat,
    output: &OutputArgs,
) -> Result<i32> {
    if n_max == 0 {
        return Err(Error::Parse("n-max must be >= 1".into()));
    }
    let operator = load_operator(op)?;
    let f = load_function(function)?;
    let location: Location = at.parse()?;
    let orders: Vec<u64> = (1..=n_max).collect();
    let averages = operator.averages_at(&f, &location, &orders)?;
    let rows: Vec<TraceRow> = orders
        .into_iter()
        .zip(&averages)
        .map(|(n, v)| TraceRow {
            n,
            value: format_rational(v),
        })
        .collect();
    let text = match format {
        OutputFormat::Csv => rows
            .iter()
            .map(|row| format!("{},{}\n", row.n, row.value))
            .collect::<String>(),
        OutputFormat::Json => to_json_string(&rows)?,
    };
    emit(output, &text)?;
    Ok(0)
}

fn cmd_synthesize(
    function: &Path,
    depth: u64,
    out_cert: Option<&Path>,
    out_op: Option<&Path>,
) -> Result<i32> {
    let f = load_function(function)?;
    let (operator, certificate) = synthesize(&f, depth)?;
    let cert_text = to_json_string(&CertificateFile::from_certificate(&certificate))?;
    let op_text = to_json_string(&OperatorFile::from_operator(&operator))?;
    match out_cert {
        Some(path) => std::fs::write(path, &cert_text)?,
        None => print!("{cert_text}"),
    }
    if let Some(path) = out_op {
        std::fs::write(path, &op_text)?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct VerifyReport {
    verified: bool,
    trace_matches: bool,
    alternates: bool,
    stored_trace: Vec<String>,
    recomputed_trace: Vec<String>,
}

fn cmd_verify(cert: &Path, op: &Path, function: &Path) -> Result<i32> {
    let cert = load_certificate(cert)?;
    let operator = load_operator(op)?;
    let f = load_function(function)?;
    let check = check_trace(
        &operator,
        &f,
        cert.part()?,
        cert.m1,
        &cert.lower()?,
        &cert.ns,
        &cert.trace_values()?,
    )?;
    let report = VerifyReport {
        verified: check.verified(),
        trace_matches: check.trace_matches,
        alternates: check.alternates,
        stored_trace: cert.trace.clone(),
        recomputed_trace: check.recomputed.iter().map(format_rational).collect(),
    };
    println!("{}", to_json_string(&report)?.trim_end());
    Ok(if report.verified { 0 } else { 1 })
}

/// Parses a `--space` descriptor like `l1`, `orlicz:power:2`,
/// `orlicz:shifted:1/2:2`, `lorentz:power:1/2` or `lorentz:capped:3`.
fn parse_space(descriptor: &str) -> Result<SpaceDescriptor> {
    match descriptor {
        "l1" => return Ok(SpaceDescriptor::L1),
        "linf" => return Ok(SpaceDescriptor::Linf),
        "l1cap" => return Ok(SpaceDescriptor::L1CapLinf),
        "l1plus" => return Ok(SpaceDescriptor::L1PlusLinf),
        _ => {}
    }
    let parts: Vec<&str> = descriptor.split(':').collect();
    let rational = |s: &str| parse_rational(s).map_err(Error::Parse);
    match parts.as_slice() {
        ["orlicz", "power", p] => {
            let p: u32 = p
                .parse()
                .map_err(|_| Error::Parse(format!("invalid exponent `{p}`")))?;
            Ok(SpaceDescriptor::Orlicz(OrliczFunction::power(p)?))
        }
        ["orlicz", "shifted", u0, p] => {
            let p: u32 = p
                .parse()
                .map_err(|_| Error::Parse(format!("invalid exponent `{p}`")))?;
            Ok(SpaceDescriptor::Orlicz(OrliczFunction::shifted_power(
                rational(u0)?,
                p,
            )?))
        }
        ["lorentz", "power", gamma] => Ok(SpaceDescriptor::Lorentz(LorentzWeight::power(
            rational(gamma)?,
        )?)),
        ["lorentz", "capped", c] => Ok(SpaceDescriptor::Lorentz(LorentzWeight::capped(rational(
            c,
        )?)?)),
        _ => Err(Error::Parse(format!(
            "unknown space `{descriptor}` (expected l1, linf, l1cap, l1plus, \
             orlicz:power:<p>, orlicz:shifted:<u0>:<p>, lorentz:power:<gamma> \
             or lorentz:capped:<c>)"
        ))),
    }
}
