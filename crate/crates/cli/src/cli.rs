//! Argument parsing and dispatch.
//!
//! Exit codes: 0 success, 1 a check suite found a violation, 2 usage or
//! input errors, 3 numeric failures (singular systems, eigensolver
//! non-convergence).

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands;
use crate::config::{GraphChoice, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Machine-readable report (the canonical format).
    Json,
    /// Human-readable rendering of the same data.
    Text,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Load the graph from a JSON file.
    #[arg(long, value_name = "PATH")]
    pub graph: Option<PathBuf>,
    /// Generate a built-in family: halfline, triangular, cycle, random.
    #[arg(long, value_name = "NAME")]
    pub family: Option<String>,
    /// Family parameters as KEY=VALUE pairs (cycle: n, flux; random: n, p).
    #[arg(long, value_name = "KEY=VALUE", num_args = 1..)]
    pub params: Vec<String>,
}

impl GraphArgs {
    fn choice(&self, seed: u64) -> Result<GraphChoice> {
        GraphChoice::from_flags(self.graph.as_deref(), self.family.as_deref(), &self.params, seed)
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// RNG seed; recorded in every report.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance override NAME=FLOAT (repeatable); names: identity, solve,
    /// harmonic_residual, eigen_residual.
    #[arg(long = "tol", value_name = "NAME=FLOAT")]
    pub tol: Vec<String>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the result to this file (atomic) instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    fn tolerances(&self) -> Result<Tolerances> {
        let mut t = Tolerances::default();
        t.apply_overrides(&self.tol)?;
        Ok(t)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "magschro",
    version,
    about = "Magnetic Schrödinger operators on weighted graphs: identity checks, \
             spectra, path metrics, and self-adjointness criteria"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a family member and write it as a graph JSON file.
    Gen {
        #[command(flatten)]
        graph: GraphArgs,
        /// Truncation radius for infinite families.
        #[arg(long)]
        radius: Option<u32>,
        /// Path for the generated graph file.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        /// Seed for the random family.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Verify operator identities, inequalities, and cut-off bounds.
    Check {
        #[command(flatten)]
        graph: GraphArgs,
        /// Truncation radius when generating an infinite family (default 30).
        #[arg(long)]
        radius: Option<u32>,
        /// Random trial fields per identity.
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Decide which essential-self-adjointness criteria apply.
    Report {
        #[command(flatten)]
        graph: GraphArgs,
        /// Center vertex (defaults to the graph root).
        #[arg(long)]
        x0: Option<String>,
        /// Depth of the growth and metric scans.
        #[arg(long, default_value_t = 16)]
        max_n: u32,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Write a truncated operator matrix as CSV plus a JSON sidecar.
    Assemble {
        #[command(flatten)]
        graph: GraphArgs,
        /// Ball center (defaults to the graph root).
        #[arg(long)]
        x0: Option<String>,
        /// Ball radius (required for infinite families; defaults to the
        /// whole graph otherwise).
        #[arg(long)]
        radius: Option<u32>,
        /// Export the symmetrized matrix instead of the weighted one.
        #[arg(long)]
        symmetrize: bool,
        /// CSV path; the sidecar lands next to it as PATH.meta.json.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        /// Seed for the random family.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Smallest eigenvalues of a truncated operator (Dirichlet ball).
    Spectrum {
        #[command(flatten)]
        graph: GraphArgs,
        /// Ball center (defaults to the graph root).
        #[arg(long)]
        x0: Option<String>,
        /// Ball radius (required for infinite families; defaults to the
        /// whole graph otherwise).
        #[arg(long)]
        radius: Option<u32>,
        /// Number of eigenvalues to report.
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Path metric queries: a pairwise distance or a completeness profile.
    Metric {
        #[command(flatten)]
        graph: GraphArgs,
        /// Profile center (defaults to the graph root).
        #[arg(long)]
        x0: Option<String>,
        /// Distance source vertex.
        #[arg(long)]
        from: Option<String>,
        /// Distance target vertex.
        #[arg(long)]
        to: Option<String>,
        /// Emit the ball-by-ball completeness profile instead of a distance.
        #[arg(long)]
        profile: bool,
        /// Truncation radius for distances on infinite families (default 60).
        #[arg(long)]
        radius: Option<u32>,
        /// Profile depth.
        #[arg(long, default_value_t = 16)]
        max_n: u32,
        /// Extra truncation margin when profiling an infinite family.
        #[arg(long, default_value_t = 8)]
        margin: u32,
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// Parses the command line and runs the command, translating every failure
/// into the documented exit codes.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap uses exit code 2 for usage errors; help and version print
            // to stdout and exit cleanly.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            exit_code_for(&err)
        }
    }
}

fn exit_code_for(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<magschro::Error>() {
        Some(magschro::Error::SingularSystem { .. })
        | Some(magschro::Error::EigenConvergence { .. }) => 3,
        _ => 2,
    }
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen { graph, radius, out, seed } => {
            commands::cmd_gen(&graph.choice(seed)?, radius, &out, seed)
        }
        Command::Check { graph, radius, trials, common } => commands::cmd_check(
            &graph.choice(common.seed)?,
            radius,
            common.seed,
            trials,
            common.tolerances()?,
            common.format,
            common.out.as_deref(),
        ),
        Command::Report { graph, x0, max_n, common } => commands::cmd_report(
            &graph.choice(common.seed)?,
            x0.as_deref(),
            max_n,
            common.seed,
            common.tolerances()?,
            common.format,
            common.out.as_deref(),
        ),
        Command::Assemble { graph, x0, radius, symmetrize, out, seed } => commands::cmd_assemble(
            &graph.choice(seed)?,
            x0.as_deref(),
            radius,
            symmetrize,
            &out,
            seed,
        ),
        Command::Spectrum { graph, x0, radius, k, common } => commands::cmd_spectrum(
            &graph.choice(common.seed)?,
            x0.as_deref(),
            radius,
            k,
            common.seed,
            common.tolerances()?,
            common.format,
            common.out.as_deref(),
        ),
        Command::Metric {
            graph,
            x0,
            from,
            to,
            profile,
            radius,
            max_n,
            margin,
            common,
        } => commands::cmd_metric(
            &graph.choice(common.seed)?,
            x0.as_deref(),
            from.as_deref(),
            to.as_deref(),
            profile,
            radius,
            max_n,
            margin,
            common.seed,
            common.tolerances()?,
            common.format,
            common.out.as_deref(),
        ),
    }
}
