use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hbvm::output::write_summary;
use hbvm::{cmd_run, table1, CliResult, ProblemRegistry, RunDescriptor};
use hbvm_core::{MethodConfig, MethodKind};

#[derive(Parser)]
#[command(
    name = "hbvm",
    version,
    about = "Energy- and invariant-conserving integrators for Hamiltonian systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one problem with one method and print a summary line.
    Run(RunArgs),
    /// Reproduce the quartic-oscillator comparison table.
    Table1 {
        /// Write the summary CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value = "quartic")]
    problem: String,
    /// gauss, hbvm or ehbvm.
    #[arg(long, default_value = "hbvm")]
    method: String,
    /// Quadrature points (defaults to s for gauss, 4 otherwise).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 2)]
    s: usize,
    #[arg(long, default_value_t = 0.1)]
    h: f64,
    #[arg(long = "t-end", default_value_t = 100.0)]
    t_end: f64,
    #[arg(long, default_value_t = MethodConfig::DEFAULT_TOLERANCE)]
    tol: f64,
    #[arg(long = "max-iter", default_value_t = MethodConfig::DEFAULT_MAX_ITERATIONS)]
    max_iter: usize,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the full trajectory to the --csv file instead of the summary.
    #[arg(long)]
    trajectory: bool,
    /// Exit with status 3 if any step fails to converge.
    #[arg(long)]
    strict: bool,
    /// Accepted for interface stability; every computation is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

impl RunArgs {
    fn descriptor(&self) -> CliResult<RunDescriptor> {
        let kind: MethodKind = self.method.parse()?;
        let k = self.k.unwrap_or(match kind {
            MethodKind::Gauss => self.s,
            _ => 4,
        });
        let config = MethodConfig::new(kind, k, self.s)
            .with_tolerance(self.tol)
            .with_max_iterations(self.max_iter);
        Ok(RunDescriptor {
            problem: self.problem.clone(),
            config,
            h: self.h,
            t_end: self.t_end,
            output_path: self.csv.clone(),
            emit_trajectory: self.trajectory,
            strict: self.strict,
        })
    }
}

fn run(args: &RunArgs) -> CliResult<()> {
    let desc = args.descriptor()?;
    let outcome = cmd_run(&desc, &ProblemRegistry::with_builtins())?;
    for w in &outcome.trajectory.meta.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(note) = &outcome.reference_note {
        eprintln!("warning: {note}");
    }
    let bad = outcome.trajectory.meta.nonconverged_steps;
    if bad > 0 {
        eprintln!("warning: {bad} step(s) did not converge");
    }
    println!("{}", outcome.summary_line());
    Ok(())
}

fn run_table1(csv: Option<&PathBuf>) -> CliResult<()> {
    let rows = table1::run()?;
    let records: Vec<_> = rows.iter().map(|r| r.record()).collect();
    match csv {
        Some(path) => {
            let mut out = BufWriter::new(File::create(path)?);
            write_summary(&mut out, &records)?;
            out.flush()?;
        }
        None => write_summary(io::stdout().lock(), &records)?,
    }
    let failed = rows.iter().filter(|r| !r.passed()).count();
    if failed > 0 {
        eprintln!(
            "{failed} of {} rows differ from the published values beyond tolerance",
            rows.len()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Table1 { csv } => run_table1(csv.as_ref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
