//! MuCLP validity checker.
//!
//! `muval solve FILE` decides the validity of a MuCLP program by reducing
//! it (and its De Morgan dual) to pfwCSP and running CEGIS on both sides in
//! parallel. `muval encode ...` translates transition-system inputs into
//! MuCLP text.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use muval::pipeline::{Certificate, PipelineError, RunConfig};

#[derive(Parser)]
#[command(name = "muval", about = "MuCLP validity checker", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide validity of a MuCLP file.
    Solve(SolveArgs),
    /// Translate a verification problem into MuCLP text.
    Encode(EncodeArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// MuCLP input file.
    file: PathBuf,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    timeout: Option<u64>,
    /// Run only the primal side.
    #[arg(long)]
    no_dual: bool,
    /// Write the reduced pfwCSP to this path and continue.
    #[arg(long, value_name = "OUT")]
    emit_pcsp: Option<PathBuf>,
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
    /// Iteration budget per CEGIS side.
    #[arg(long)]
    iterations: Option<u32>,
}

#[derive(Args)]
struct EncodeArgs {
    /// Encoder: buchi | safety-game | reach-game | ltl-game | bisim.
    kind: String,
    /// Input files (.lts/.game/.buchi; bisim takes two .lts files).
    inputs: Vec<PathBuf>,
    /// Output MuCLP file.
    #[arg(short, long, value_name = "OUT.muclp")]
    output: PathBuf,
    /// Query values for bisim (comma-separated integers, both tuples).
    #[arg(long)]
    pair: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("muval: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Solve(args) => solve(args),
        Command::Encode(args) => encode(args),
    }
}

fn solve(args: SolveArgs) -> Result<ExitCode, String> {
    let mut config = RunConfig::defaults().map_err(|e| e.to_string())?;
    if let Some(path) = &args.config {
        config.apply_config_file(path).map_err(|e| e.to_string())?;
    }
    if let Some(secs) = args.timeout {
        config.timeout = Duration::from_secs(secs);
    }
    if let Some(iters) = args.iterations {
        config.max_iterations = iters;
    }
    if args.no_dual {
        config.parallel_dual = false;
    }
    if let Some(path) = args.smt_solver {
        config.smt_args = muval::smt::default_solver_args(&path);
        config.smt_solver = path;
    }
    if args.seed.is_some() {
        config.seed = args.seed;
    }
    config.log_path = args.log;

    let text = std::fs::read_to_string(&args.file).map_err(|e| e.to_string())?;
    let program = muclp::parse::parse_muclp(&text).map_err(|e| format!("parse error: {e}"))?;
    let normalized = muclp::wellformed::normalize_query_positivity(&program);
    muclp::wellformed::check_wellformed(&normalized).map_err(|e| e.to_string())?;

    if let Some(out) = &args.emit_pcsp {
        let (csp, _) = muclp::reduce::reduce(&program).map_err(|e| e.to_string())?;
        std::fs::write(out, muclp::pfwcsp::print_pfwcsp(&csp)).map_err(|e| e.to_string())?;
    }

    let report = match muval::pipeline::muval_solve(&program, &config) {
        Ok(r) => r,
        Err(PipelineError::Parse(e)) => return Err(e),
        Err(e) => return Err(e.to_string()),
    };
    println!("{}", report.verdict.label());
    if let Some(side) = report.concluded_by {
        println!("; concluded by {side:?} side");
    }
    match &report.certificate {
        Some(Certificate::Solution(sol)) => {
            // the certificate for the side that concluded
            let (csp, _) = match report.concluded_by {
                Some(muval::pipeline::Side::Dual) => {
                    let dual = muclp::transform::demorgan_dual(&program);
                    muclp::reduce::reduce(&dual).map_err(|e| e.to_string())?
                }
                _ => muclp::reduce::reduce(&program).map_err(|e| e.to_string())?,
            };
            print!("{}", muval::pipeline::print_solution(&csp, sol));
        }
        Some(Certificate::Counterexamples(examples)) => {
            print!("{}", muval::pipeline::print_examples(examples));
        }
        None => {
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
    Ok(ExitCode::from(report.verdict.exit_code() as u8))
}

fn encode(args: EncodeArgs) -> Result<ExitCode, String> {
    let read = |p: &PathBuf| -> Result<muclp::encoders::LtsFile, String> {
        let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
        muclp::encoders::parse_lts_file(&text).map_err(|e| e.to_string())
    };
    let program = match args.kind.as_str() {
        "buchi" => {
            let [input] = args.inputs.as_slice() else {
                return Err("buchi takes one input file".into());
            };
            let file = read(input)?;
            let buchi = file
                .buchi
                .clone()
                .ok_or("input has no automaton section")?;
            let init = file.init.clone().ok_or("input has no init formula")?;
            muclp::encoders::encode_buchi(&file.lts, &buchi, &init).map_err(|e| e.to_string())?
        }
        "safety-game" | "reach-game" | "ltl-game" => {
            let [input] = args.inputs.as_slice() else {
                return Err("games take one input file".into());
            };
            let file = read(input)?;
            let objective = match args.kind.as_str() {
                "safety-game" => muclp::encoders::Objective::Safety(
                    file.safe.clone().ok_or("input has no safe formula")?,
                ),
                "reach-game" => muclp::encoders::Objective::Reach(
                    file.reach.clone().ok_or("input has no reach formula")?,
                ),
                _ => muclp::encoders::Objective::Ltl(
                    file.buchi.clone().ok_or("input has no automaton section")?,
                ),
            };
            let game = muclp::encoders::GameSpec {
                lts: file.lts.clone(),
                exists_labels: file.exists_labels.clone(),
                forall_labels: file.forall_labels.clone(),
                objective,
                init: file.init.clone().ok_or("input has no init formula")?,
            };
            match args.kind.as_str() {
                "safety-game" => {
                    muclp::encoders::encode_safety_game(&game).map_err(|e| e.to_string())?
                }
                "reach-game" => muclp::encoders::encode_reachability_game(&game)
                    .map_err(|e| e.to_string())?,
                _ => muclp::encoders::encode_ltl_game(&game).map_err(|e| e.to_string())?,
            }
        }
        "bisim" => {
            let [a, b] = args.inputs.as_slice() else {
                return Err("bisim takes two input files".into());
            };
            let fa = read(a)?;
            let fb = read(b)?;
            let query = match &args.pair {
                Some(spec) => {
                    let values: Result<Vec<i64>, _> =
                        spec.split(',').map(|s| s.trim().parse::<i64>()).collect();
                    let values = values.map_err(|e| format!("bad --pair: {e}"))?;
                    let n1 = fa.lts.state_vars.len();
                    if values.len() != n1 + fb.lts.state_vars.len() {
                        return Err("--pair arity mismatch".into());
                    }
                    muclp::encoders::BisimQuery::Pairs(
                        values[..n1].iter().map(|v| muclp::ast::Value::Int(*v)).collect(),
                        values[n1..].iter().map(|v| muclp::ast::Value::Int(*v)).collect(),
                    )
                }
                None => {
                    let init = fa.init.clone().ok_or("bisim without --pair needs init")?;
                    muclp::encoders::BisimQuery::LowerBound(init)
                }
            };
            muclp::encoders::encode_bisimulation(&fa.lts, &fb.lts, &query)
                .map_err(|e| e.to_string())?
        }
        other => {
            let known: BTreeSet<&str> =
                ["buchi", "safety-game", "reach-game", "ltl-game", "bisim"]
                    .into_iter()
                    .collect();
            return Err(format!("unknown encoder `{other}`; expected one of {known:?}"));
        }
    };
    std::fs::write(&args.output, muclp::print::print_muclp(&program))
        .map_err(|e| e.to_string())?;
    Ok(ExitCode::SUCCESS)
}
