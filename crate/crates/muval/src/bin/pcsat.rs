//! pfwCSP satisfiability checker: CEGIS over stratified template families.
//!
//! Prints `sat` with a model as define-fun forms, `unsat` with the
//! unsatisfiable example-instance set, or `unknown`.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use muval::pipeline::{Certificate, FinalVerdict, RunConfig};

#[derive(Parser)]
#[command(name = "pcsat", about = "pfwCSP satisfiability checker", version)]
struct Cli {
    /// pfwCSP input file (SMT-LIB2 surface with declare-wf).
    file: PathBuf,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    timeout: Option<u64>,
    /// SMT solver executable (SMT-LIB2 on stdin/stdout).
    #[arg(long, value_name = "PATH")]
    smt_solver: Option<PathBuf>,
    /// Random seed passed to the SMT backend.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the iteration log to this path.
    #[arg(long, value_name = "OUT")]
    log: Option<PathBuf>,
    /// Configuration file with key=value lines.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Iteration budget.
    #[arg(long)]
    iterations: Option<u32>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("pcsat: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let mut config = RunConfig::defaults().map_err(|e| e.to_string())?;
    if let Some(path) = &cli.config {
        config.apply_config_file(path).map_err(|e| e.to_string())?;
    }
    if let Some(secs) = cli.timeout {
        config.timeout = Duration::from_secs(secs);
    }
    if let Some(iters) = cli.iterations {
        config.max_iterations = iters;
    }
    if let Some(path) = cli.smt_solver {
        config.smt_args = muval::smt::default_solver_args(&path);
        config.smt_solver = path;
    }
    if cli.seed.is_some() {
        config.seed = cli.seed;
    }
    config.log_path = cli.log;

    let text = std::fs::read_to_string(&cli.file).map_err(|e| e.to_string())?;
    let csp = muclp::pfwcsp::parse_pfwcsp(&text).map_err(|e| format!("parse error: {e}"))?;
    let (report, _) = muval::pipeline::pcsat_solve(&csp, &config).map_err(|e| e.to_string())?;
    match report.verdict {
        FinalVerdict::Valid => {
            println!("sat");
            if let Some(Certificate::Solution(sol)) = &report.certificate {
                print!("{}", muval::pipeline::print_solution(&csp, sol));
            }
        }
        FinalVerdict::Invalid => {
            println!("unsat");
            if let Some(Certificate::Counterexamples(ex)) = &report.certificate {
                print!("{}", muval::pipeline::print_examples(ex));
            }
        }
        FinalVerdict::Unknown | FinalVerdict::Timeout => {
            println!("unknown");
            if !report.detail.is_empty() {
                println!("; {}", report.detail);
            }
        }
    }
    eprintln!(
        "; iterations={} smt-queries={} wall-time={:.1}s",
        report.iterations,
        report.smt_queries,
        report.wall_time.as_secs_f64()
    );
    let code = match report.verdict {
        FinalVerdict::Valid => 0,
        FinalVerdict::Invalid => 1,
        _ => 2,
    };
    Ok(ExitCode::from(code))
}
