use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use isochron_cli::bench::{self, BenchConfig};
use isochron_cli::commands::{self, CliError, UrabeSource};
use isochron_core::conditions::Variant;

/// Necessary isochronicity conditions for Liénard-type systems.
#[derive(Parser)]
#[command(name = "isochron", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduce a planar system file to Liénard form.
    Reduce {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the condition polynomials 0..=M.
    Conditions {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute conditions and solve successively for the Urabe coefficients.
    Eliminate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check both isochronicity identities against a Urabe series fixture.
    Verify {
        input: PathBuf,
        #[arg(long)]
        urabe: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long = "bind", value_name = "NAME=P/Q")]
        bind: Vec<String>,
    },
    /// Time the algorithm variants over a range of orders.
    Bench {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "5,10,15")]
        orders: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "a0,a1,a2,a3,a4,a5")]
        algos: Vec<Variant>,
        /// Seconds per cell.
        #[arg(long, default_value_t = 600)]
        timeout: u64,
        /// Resident-set cap per cell, e.g. 4G; the ISOCHRON_MEM_CAP variable takes precedence.
        #[arg(long)]
        mem_cap: Option<String>,
        /// Runs per cell; the median time is reported.
        #[arg(long, default_value_t = 1)]
        repeat: usize,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        parallel: bool,
        #[arg(long = "bind", value_name = "NAME=P/Q")]
        bind: Vec<String>,
        #[arg(long)]
        urabe_count: Option<usize>,
    },
    #[command(hide = true)]
    BenchCell {
        input: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        algo: Variant,
        #[arg(long = "bind")]
        bind: Vec<String>,
        #[arg(long)]
        urabe_count: Option<usize>,
    },
}

#[derive(Args)]
struct RunArgs {
    input: PathBuf,
    /// Highest condition index M.
    #[arg(long)]
    order: usize,
    #[arg(long, default_value = "a4")]
    algo: Variant,
    #[arg(long = "bind", value_name = "NAME=P/Q")]
    bind: Vec<String>,
    /// Number of symbolic Urabe coefficients (default: floor(M/2)).
    #[arg(long, conflicts_with = "urabe")]
    urabe_count: Option<usize>,
    /// Use the known Urabe series from this fixture instead of unknowns.
    #[arg(long)]
    urabe: Option<PathBuf>,
}

impl RunArgs {
    fn run(&self) -> Result<isochron_core::conditions::ConditionSet, CliError> {
        let bindings = commands::parse_bindings(&self.bind)?;
        let (_, sys) = commands::load_system(&self.input, &bindings)?;
        let source = match &self.urabe {
            Some(p) => UrabeSource::Numeric(commands::load_urabe(p)?),
            None => UrabeSource::Symbolic(self.urabe_count),
        };
        commands::conditions(&sys, self.order, self.algo, &source)
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(CliError::resource(format!("cannot write output: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Cmd::Reduce { input, out } => {
            let file = isochron_cli::SystemFile::read(&input)?;
            emit(&commands::reduce(&file)?.to_json(), out.as_deref())
        }
        Cmd::Conditions { run, out } => emit(&commands::to_json(&run.run()?.to_record()), out.as_deref()),
        Cmd::Eliminate { run, out } => emit(&commands::to_json(&commands::eliminate(&run.run()?)), out.as_deref()),
        Cmd::Verify { input, urabe, order, bind } => {
            let (_, sys) = commands::load_system(&input, &commands::parse_bindings(&bind)?)?;
            let h = commands::load_urabe(&urabe)?;
            let outcome = commands::verify(&sys, &h, order)?;
            emit(&outcome.report(), None)?;
            if outcome.holds() {
                Ok(())
            } else {
                Err(CliError::verification("isochronicity identities fail"))
            }
        }
        Cmd::Bench { input, orders, algos, timeout, mem_cap, repeat, json, parallel, bind, urabe_count } => {
            let (file, _) = commands::load_system(&input, &commands::parse_bindings(&bind)?)?;
            let cfg = BenchConfig {
                exe: bench::default_exe()?,
                input: input.clone(),
                bindings: bind,
                urabe_count,
                orders,
                variants: algos,
                timeout: Duration::from_secs(timeout),
                mem_cap: bench::effective_mem_cap(mem_cap.as_deref())?,
                repeat,
                parallel,
            };
            let report = bench::run_bench(&cfg, &bench::describe_system(&input, file.name.as_deref()));
            emit(&report.table(), None)?;
            if let Some(p) = json {
                emit(&commands::to_json(&report), Some(&p))?;
            }
            if report.has_mismatch() {
                Err(CliError::verification("some cells disagree with the reference variant"))
            } else if report.completed() == 0 {
                Err(CliError::resource("no cell completed"))
            } else {
                Ok(())
            }
        }
        Cmd::BenchCell { input, order, algo, bind, urabe_count } => {
            let (_, sys) = commands::load_system(&input, &commands::parse_bindings(&bind)?)?;
            let out = bench::run_cell_here(&sys, order, algo, &UrabeSource::Symbolic(urabe_count))?;
            emit(&serde_json::to_string(&out).expect("plain data"), None)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("isochron: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
