//! Command-line front end: `study`, `field-dump` and `selftest`.

mod csv;
mod dump;
mod svg;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use self::csv::{emit_csv, to_csv, HEADER as CSV_HEADER};
pub use self::dump::{field_dump, DumpConfig, HEADER as DUMP_HEADER};
pub use self::svg::{emit_svg_plot, to_svg};

use crate::analysis::{run_study, Method, StudyConfig};
use crate::error::{Error, Result};
use crate::regular_fd::{parse_first_scheme, parse_second_scheme, FdScheme, FdSchemes};
use crate::test_functions::TestFunction;
use crate::weighting::WeightKind;

#[derive(Debug, Parser)]
#[command(
    name = "ddin",
    version,
    about = "Least-squares derivative stencils on irregular nodes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a convergence study and write the RMS table as CSV.
    Study(StudyArgs),
    /// Write per-node numeric and exact derivatives for one resolution.
    FieldDump(DumpArgs),
    /// Run the built-in exactness and oracle checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FunctionArg {
    Power,
    Sinusoidal,
}

impl From<FunctionArg> for TestFunction {
    fn from(f: FunctionArg) -> Self {
        match f {
            FunctionArg::Power => TestFunction::Power,
            FunctionArg::Sinusoidal => TestFunction::Sinusoidal,
        }
    }
}

fn non_negative(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("{s} must be finite and >= 0"))
    }
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    let v = non_negative(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{s} must be > 0"))
    }
}

#[derive(Debug, Args)]
struct NodeArgs {
    #[arg(long, value_enum, default_value_t = FunctionArg::Power)]
    function: FunctionArg,
    /// Irregularity scale as a fraction of the grid spacing.
    #[arg(long, default_value = "0.25", value_parser = non_negative)]
    dr_frac: f64,
    /// Cutoff radius as a multiple of the grid spacing.
    #[arg(long, default_value = "2.5", value_parser = positive)]
    r_frac: f64,
    /// Kernel used by the weighted method.
    #[arg(long, default_value = "mps", value_parser = ["none", "mps"])]
    weight: String,
    #[arg(long, default_value_t = StudyConfig::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value = "central", value_parser = parse_first_scheme)]
    fd_first: FdScheme,
    #[arg(long, default_value = "central", value_parser = parse_second_scheme)]
    fd_second: FdScheme,
}

impl NodeArgs {
    fn weight(&self) -> WeightKind {
        self.weight.parse().expect("restricted by clap")
    }

    fn fd(&self) -> FdSchemes {
        FdSchemes {
            first: self.fd_first,
            second: self.fd_second,
        }
    }
}

#[derive(Debug, Args)]
struct StudyArgs {
    #[command(flatten)]
    nodes: NodeArgs,
    /// Nodes per axis, strictly increasing.
    #[arg(long, value_delimiter = ',', default_value = "26,51,101,201")]
    sizes: Vec<usize>,
    #[arg(long, default_value = "false", action = clap::ArgAction::Set)]
    include_boundary: bool,
    #[arg(long, value_delimiter = ',', default_value = "ddin,ddinw,fd", value_parser = ["ddin", "ddinw", "fd"])]
    methods: Vec<String>,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DumpArgs {
    #[command(flatten)]
    nodes: NodeArgs,
    /// Nodes per axis.
    #[arg(long, default_value_t = 51)]
    size: usize,
    #[arg(long, default_value = "ddin", value_parser = ["ddin", "ddinw", "fd"])]
    method: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    /// Random configurations per check.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = StudyConfig::DEFAULT_SEED)]
    seed: u64,
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn study(args: &StudyArgs) -> Result<()> {
    let config = StudyConfig {
        function: args.nodes.function.into(),
        sizes: args.sizes.clone(),
        dr_frac: args.nodes.dr_frac,
        r_frac: args.nodes.r_frac,
        weight: args.nodes.weight(),
        seed: args.nodes.seed,
        include_boundary: args.include_boundary,
        methods: args
            .methods
            .iter()
            .map(|m| m.parse::<Method>().expect("restricted by clap"))
            .collect(),
        fd: args.nodes.fd(),
    };
    let report = run_study(&config)?;
    write_output(args.out.as_ref(), &to_csv(&report))?;
    if let Some(svg) = &args.svg {
        emit_svg_plot(&report, svg)?;
    }
    Ok(())
}

fn dump(args: &DumpArgs) -> Result<()> {
    let config = DumpConfig {
        function: args.nodes.function.into(),
        n: args.size,
        dr_frac: args.nodes.dr_frac,
        r_frac: args.nodes.r_frac,
        weight: args.nodes.weight(),
        seed: args.nodes.seed,
        method: args.method.parse().expect("restricted by clap"),
        fd: args.nodes.fd(),
    };
    write_output(args.out.as_ref(), &field_dump(&config)?)
}

fn selftest(args: &SelftestArgs) -> bool {
    let outcomes = crate::selftest::run(args.trials, args.seed);
    for o in &outcomes {
        println!(
            "{} {}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.detail
        );
    }
    outcomes.iter().all(|o| o.passed)
}

/// Parses `argv` (program name first) and runs the command. Returns the
/// process exit status: 0 success, 1 runtime error, 2 usage error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Study(a) => study(a),
        Command::FieldDump(a) => dump(a),
        Command::Selftest(a) => {
            return if selftest(a) { 0 } else { 1 };
        }
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
