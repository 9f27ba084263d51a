use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use repset_cli::commands::{load, run_bench, run_solve, run_verify, AlphaArg, Property, RunOptions, SolveMode};
use repset_cli::gen::{corpus, generate, GenOptions, Kind};
use repset_cli::CliError;
use repset_core::{ElementId, Epsilon, IdSet};

#[derive(Parser)]
#[command(name = "repset", version, about = "Budgeted matching and matroid intersection via representative sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Tuning {
    /// Error parameter as p/q.
    #[arg(long, default_value = "1/10")]
    epsilon: String,
    #[arg(long, value_enum, default_value = "lagrangian")]
    alpha: AlphaArg,
    /// Maximum number of enumerated skeletons.
    #[arg(long, default_value_t = 10_000_000)]
    enumeration_cap: u64,
    /// Maximum number of branches of the chain recursion per class.
    #[arg(long, default_value_t = 1_000_000)]
    branch_budget: usize,
    /// Largest instance solved exactly inside the residual solver.
    #[arg(long, default_value_t = 20)]
    fallback: usize,
    /// Disable the exact residual fallback.
    #[arg(long)]
    no_fallback: bool,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Also run the chain recursion with the matroids exchanged.
    #[arg(long)]
    swap_roles: bool,
}

impl Tuning {
    fn options(&self) -> Result<RunOptions, CliError> {
        let epsilon: Epsilon = self.epsilon.parse()?;
        let mut options = RunOptions::new(epsilon);
        options.alpha = self.alpha.into();
        options.enumeration_cap = self.enumeration_cap;
        options.branch_budget = self.branch_budget;
        options.fallback = (!self.no_fallback).then_some(self.fallback);
        options.threads = self.threads;
        options.swap_roles = self.swap_roles;
        Ok(options)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded instance, or the whole evaluation corpus.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        size: u32,
        #[arg(long, value_enum, default_value = "matching")]
        kind: Kind,
        #[arg(long, default_value_t = 1)]
        cost_min: u64,
        #[arg(long, default_value_t = 100)]
        cost_max: u64,
        #[arg(long, default_value_t = 1)]
        profit_min: u64,
        #[arg(long, default_value_t = 100)]
        profit_max: u64,
        /// Write the corpus (this many instances per constraint type) into
        /// this directory instead of a single instance.
        #[arg(long, requires = "count")]
        corpus: Option<PathBuf>,
        #[arg(long)]
        count: Option<usize>,
        /// Output file; standard output when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Solve an instance file and print a JSON record.
    Solve {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "solve")]
        mode: SolveMode,
        #[command(flatten)]
        tuning: Tuning,
        /// Leave out the wall time so that outputs compare byte for byte.
        #[arg(long)]
        omit_timing: bool,
    },
    /// Check a structural property exhaustively.
    Verify {
        path: PathBuf,
        #[arg(long, value_enum)]
        property: Property,
        #[command(flatten)]
        tuning: Tuning,
        /// Comma-separated ids replacing the constructed set (exchange set,
        /// representative set or replacement).
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        inject: Option<Vec<u32>>,
    },
    /// Compare `solve` with the exact optimum over a corpus directory.
    Bench {
        dir: PathBuf,
        /// May be repeated.
        #[arg(long, default_values_t = vec!["1/10".to_string(), "1/4".to_string()])]
        epsilon: Vec<String>,
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("records serialize")
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen { seed, size, kind, cost_min, cost_max, profit_min, profit_max, corpus: dir, count, out } => {
            if let Some(dir) = dir {
                std::fs::create_dir_all(&dir)?;
                for (name, file) in corpus(seed, count.unwrap_or(0)) {
                    std::fs::write(dir.join(format!("{name}.json")), file.to_json())?;
                }
                return Ok(());
            }
            let options = GenOptions { cost: (cost_min, cost_max), profit: (profit_min, profit_max), ..GenOptions::new(seed, size, kind) };
            output(out.as_ref())?.write_all(generate(&options)?.to_json().as_bytes())?;
        }
        Command::Solve { path, mode, tuning, omit_timing } => {
            let options = tuning.options()?;
            let (_, instance) = load(&path)?;
            let mut record = run_solve(&instance, mode, &options)?;
            if omit_timing {
                record.ms_total = None;
            }
            println!("{}", json(&record));
        }
        Command::Verify { path, property, tuning, inject } => {
            let options = tuning.options()?;
            let (_, instance) = load(&path)?;
            let inject: Option<IdSet> = inject.map(|v| v.into_iter().map(ElementId).collect());
            let record = run_verify(&instance, property, &options, inject.as_ref())?;
            println!("{}", json(&record));
            if !record.passed {
                return Err(CliError::Verification(record.property));
            }
        }
        Command::Bench { dir, epsilon, out, threads } => {
            let epsilons = epsilon.iter().map(|s| s.parse()).collect::<Result<Vec<Epsilon>, _>>()?;
            let mut template = RunOptions::new(epsilons.first().copied().unwrap_or("1/10".parse()?));
            template.threads = threads;
            run_bench(&dir, &epsilons, &template, output(out.as_ref())?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
