//! End-to-end pipelines: MuCLP validity via reduction plus primal-dual
//! CEGIS, and direct pfwCSP solving. The primal side solves the reduced
//! problem; the dual side solves the reduction of the De Morgan dual. A
//! satisfiable primal means valid, a satisfiable dual means invalid, and by
//! completeness of the reduction an unsatisfiable side decides the other
//! way. The first definitive answer wins and the loser is cancelled.

use std::path::{Path, PathBuf};
use std::sync::atomic::Ordering;
use std::time::{Duration, Instant};

use muclp::ast::MuClpProgram;
use muclp::pfwcsp::{CandidateSolution, ExampleInstance, PfwCsp};
use muclp::templates::InitialParams;
use thiserror::Error;

use crate::cegis::{Cegis, CegisConfig, IterationLog, Verdict};
use crate::smt::{SmtConf, SmtSolver, Validity};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub timeout: Duration,
    pub max_iterations: u32,
    pub smt_solver: PathBuf,
    pub smt_args: Vec<String>,
    pub parallel_dual: bool,
    pub init_params: InitialParams,
    pub fairness_cap: u32,
    pub resolution_depth: u32,
    pub log_path: Option<PathBuf>,
    pub seed: Option<u64>,
    pub smt_query_timeout: Duration,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("no SMT solver found; install z3 or the z3-smt2 shim, or pass --smt-solver")]
    NoSolver,
    #[error("bad config line `{0}`")]
    BadLine(String),
    #[error("bad value for `{key}`: {value}")]
    BadValue { key: String, value: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl RunConfig {
    pub fn defaults() -> Result<RunConfig, ConfigError> {
        let smt_solver = crate::smt::default_solver_path().ok_or(ConfigError::NoSolver)?;
        let smt_args = crate::smt::default_solver_args(&smt_solver);
        Ok(RunConfig {
            timeout: Duration::from_secs(300),
            max_iterations: 200,
            smt_solver,
            smt_args,
            parallel_dual: true,
            init_params: InitialParams::default(),
            fairness_cap: 3,
            resolution_depth: 2,
            log_path: None,
            seed: None,
            smt_query_timeout: Duration::from_secs(30),
        })
    }

    /// Apply `key=value` lines (`#` comments allowed). CLI flags override
    /// the file, so this runs first.
    pub fn apply_config_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)?;
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::BadLine(line.to_string()));
            };
            let (key, value) = (key.trim(), value.trim());
            let bad = || ConfigError::BadValue {
                key: key.to_string(),
                value: value.to_string(),
            };
            match key {
                "timeout" => {
                    self.timeout = Duration::from_secs(value.parse().map_err(|_| bad())?)
                }
                "iterations" => self.max_iterations = value.parse().map_err(|_| bad())?,
                "smt_solver" => {
                    self.smt_solver = PathBuf::from(value);
                    self.smt_args = crate::smt::default_solver_args(&self.smt_solver);
                }
                "parallel_dual" => self.parallel_dual = value.parse().map_err(|_| bad())?,
                "fairness_cap" => self.fairness_cap = value.parse().map_err(|_| bad())?,
                "resolution_depth" => {
                    self.resolution_depth = value.parse().map_err(|_| bad())?
                }
                "seed" => self.seed = Some(value.parse().map_err(|_| bad())?),
                "smt_query_timeout" => {
                    self.smt_query_timeout =
                        Duration::from_secs(value.parse().map_err(|_| bad())?)
                }
                "pred.nd" => self.init_params.pred.0 = value.parse().map_err(|_| bad())?,
                "pred.nc" => self.init_params.pred.1 = value.parse().map_err(|_| bad())?,
                "pred.ac" => self.init_params.pred.2 = value.parse().map_err(|_| bad())?,
                "pred.ad" => self.init_params.pred.3 = value.parse().map_err(|_| bad())?,
                "wf.nl" => self.init_params.wf.0 = value.parse().map_err(|_| bad())?,
                "wf.np" => self.init_params.wf.1 = value.parse().map_err(|_| bad())?,
                "wf.nc" => self.init_params.wf.2 = value.parse().map_err(|_| bad())?,
                _ => return Err(ConfigError::BadLine(line.to_string())),
            }
        }
        Ok(())
    }

    pub fn cegis_config(&self) -> CegisConfig {
        let mut smt = SmtConf::new(self.smt_solver.clone());
        smt.args = self.smt_args.clone();
        smt.seed = self.seed;
        smt.query_timeout = self.smt_query_timeout;
        let mut c = CegisConfig::new(smt);
        c.max_iterations = self.max_iterations;
        c.wall_clock = self.timeout;
        c.resolution_depth = self.resolution_depth;
        c.init_params = self.init_params.clone();
        c.fairness_cap = self.fairness_cap;
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinalVerdict {
    Valid,
    Invalid,
    Unknown,
    Timeout,
}

impl FinalVerdict {
    pub fn exit_code(self) -> i32 {
        match self {
            FinalVerdict::Valid => 0,
            FinalVerdict::Invalid => 1,
            FinalVerdict::Unknown | FinalVerdict::Timeout => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FinalVerdict::Valid => "valid",
            FinalVerdict::Invalid => "invalid",
            FinalVerdict::Unknown => "unknown",
            FinalVerdict::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Certificate {
    Solution(CandidateSolution),
    Counterexamples(Vec<ExampleInstance>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Primal,
    Dual,
}

#[derive(Debug)]
pub struct FinalReport {
    pub verdict: FinalVerdict,
    pub certificate: Option<Certificate>,
    pub concluded_by: Option<Side>,
    pub iterations: u32,
    pub smt_queries: u64,
    pub wall_time: Duration,
    pub detail: String,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("ill-formed program: {0}")]
    Wellformed(String),
    #[error("reduction failed: {0}")]
    Reduce(String),
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Re-verify a Sat certificate from scratch with a fresh solver before
/// reporting it.
fn reverify_solution(
    csp: &PfwCsp,
    solution: &CandidateSolution,
    conf: &SmtConf,
) -> Result<bool, PipelineError> {
    let mut smt = SmtSolver::new(conf.clone());
    let applied = csp
        .apply_solution(solution)
        .map_err(|e| PipelineError::Internal(format!("{e}")))?;
    for formula in &applied {
        let (vars, matrix) = match formula {
            muclp::ast::Formula::Quant(muclp::ast::Quantifier::Forall, vars, body) => {
                (vars.clone(), body.as_ref().clone())
            }
            other => (Vec::new(), other.clone()),
        };
        match smt
            .check_validity(&vars, &matrix)
            .map_err(|e| PipelineError::Internal(format!("{e}")))?
        {
            Validity::Valid => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

pub struct SideOutcome {
    pub side: Side,
    pub verdict: Result<Verdict, String>,
    pub log: IterationLog,
    pub iterations: u32,
    pub smt_queries: u64,
}

fn run_side(csp: PfwCsp, config: CegisConfig, side: Side, stop: std::sync::Arc<std::sync::atomic::AtomicBool>) -> SideOutcome {
    let mut cegis = Cegis::new(csp, config);
    cegis.stop = stop;
    let verdict = cegis.solve().map_err(|e| format!("{e}"));
    SideOutcome {
        side,
        verdict,
        iterations: cegis.log.records.len() as u32,
        smt_queries: cegis.smt.queries_issued,
        log: cegis.log,
    }
}

/// Solve a MuCLP validity problem by reducing the program and its De
/// Morgan dual and running CEGIS on both. Definitive answers must agree;
/// a primal Sat together with a dual Sat aborts with an internal error.
pub fn muval_solve(program: &MuClpProgram, config: &RunConfig) -> Result<FinalReport, PipelineError> {
    let start = Instant::now();
    let (primal_csp, _) =
        muclp::reduce::reduce(program).map_err(|e| PipelineError::Reduce(format!("{e}")))?;
    let dual_program = muclp::transform::demorgan_dual(program);
    let (dual_csp, _) = muclp::reduce::reduce(&dual_program)
        .map_err(|e| PipelineError::Reduce(format!("dual: {e}")))?;

    let cegis_conf = config.cegis_config();
    let stop = std::sync::Arc::new(std::sync::atomic::AtomicBool::new(false));

    let outcomes: Vec<SideOutcome> = if config.parallel_dual {
        let (tx, rx) = std::sync::mpsc::channel();
        let mut handles = Vec::new();
        for (csp, side) in [(primal_csp.clone(), Side::Primal), (dual_csp.clone(), Side::Dual)] {
            let tx = tx.clone();
            let conf = cegis_conf.clone();
            let stop = stop.clone();
            handles.push(std::thread::spawn(move || {
                let out = run_side(csp, conf, side, stop);
                let _ = tx.send(out);
            }));
        }
        drop(tx);
        let mut outcomes = Vec::new();
        // collect until a definitive answer arrives, then cancel the rest
        while let Ok(out) = rx.recv() {
            let definitive = matches!(out.verdict, Ok(Verdict::Sat(_)) | Ok(Verdict::Unsat(_)));
            outcomes.push(out);
            if definitive {
                stop.store(true, Ordering::Relaxed);
                break;
            }
        }
        // drain whatever already finished; joined threads observe `stop`
        while let Ok(out) = rx.try_recv() {
            outcomes.push(out);
        }
        for h in handles {
            let _ = h.join();
        }
        outcomes
    } else {
        vec![run_side(primal_csp.clone(), cegis_conf.clone(), Side::Primal, stop)]
    };

    let iterations: u32 = outcomes.iter().map(|o| o.iterations).sum();
    let smt_queries: u64 = outcomes.iter().map(|o| o.smt_queries).sum();

    if let Some(path) = &config.log_path {
        let mut text = String::new();
        for out in &outcomes {
            for line in &out.log.lines {
                text.push_str(&format!("side={:?} {line}\n", out.side));
            }
        }
        std::fs::write(path, text)?;
    }

    // soundness cross-check: primal Sat and dual Sat may never co-occur
    let primal_sat = outcomes
        .iter()
        .any(|o| o.side == Side::Primal && matches!(o.verdict, Ok(Verdict::Sat(_))));
    let dual_sat = outcomes
        .iter()
        .any(|o| o.side == Side::Dual && matches!(o.verdict, Ok(Verdict::Sat(_))));
    if primal_sat && dual_sat {
        return Err(PipelineError::Internal(
            "primal and dual both report Sat".into(),
        ));
    }

    let mut report = FinalReport {
        verdict: FinalVerdict::Unknown,
        certificate: None,
        concluded_by: None,
        iterations,
        smt_queries,
        wall_time: start.elapsed(),
        detail: String::new(),
    };

    for out in &outcomes {
        match (&out.verdict, out.side) {
            (Ok(Verdict::Sat(sol)), side) => {
                let csp = match side {
                    Side::Primal => &primal_csp,
                    Side::Dual => &dual_csp,
                };
                if !reverify_solution(csp, sol, &cegis_conf.smt)? {
                    return Err(PipelineError::Internal(format!(
                        "{side:?} certificate failed re-verification"
                    )));
                }
                report.verdict = match side {
                    Side::Primal => FinalVerdict::Valid,
                    Side::Dual => FinalVerdict::Invalid,
                };
                report.certificate = Some(Certificate::Solution(sol.clone()));
                report.concluded_by = Some(side);
                report.wall_time = start.elapsed();
                return Ok(report);
            }
            (Ok(Verdict::Unsat(examples)), side) => {
                report.verdict = match side {
                    Side::Primal => FinalVerdict::Invalid,
                    Side::Dual => FinalVerdict::Valid,
                };
                report.certificate = Some(Certificate::Counterexamples(examples.clone()));
                report.concluded_by = Some(side);
                report.wall_time = start.elapsed();
                return Ok(report);
            }
            _ => {}
        }
    }

    let timed_out = start.elapsed() >= config.timeout;
    report.verdict = if timed_out {
        FinalVerdict::Timeout
    } else {
        FinalVerdict::Unknown
    };
    report.detail = outcomes
        .iter()
        .map(|o| match &o.verdict {
            Ok(Verdict::Unknown(r)) => format!("{:?}: {r}", o.side),
            Ok(_) => format!("{:?}: done", o.side),
            Err(e) => format!("{:?}: error {e}", o.side),
        })
        .collect::<Vec<_>>()
        .join("; ");
    Ok(report)
}

/// Direct pfwCSP solving.
pub fn pcsat_solve(csp: &PfwCsp, config: &RunConfig) -> Result<(FinalReport, IterationLog), PipelineError> {
    let start = Instant::now();
    let cegis_conf = config.cegis_config();
    let mut cegis = Cegis::new(csp.clone(), cegis_conf.clone());
    let verdict = cegis
        .solve()
        .map_err(|e| PipelineError::Internal(format!("{e}")))?;
    let mut report = FinalReport {
        verdict: FinalVerdict::Unknown,
        certificate: None,
        concluded_by: Some(Side::Primal),
        iterations: cegis.log.records.len() as u32,
        smt_queries: cegis.smt.queries_issued,
        wall_time: start.elapsed(),
        detail: String::new(),
    };
    match verdict {
        Verdict::Sat(sol) => {
            if !reverify_solution(csp, &sol, &cegis_conf.smt)? {
                return Err(PipelineError::Internal(
                    "certificate failed re-verification".into(),
                ));
            }
            report.verdict = FinalVerdict::Valid; // printed as "sat"
            report.certificate = Some(Certificate::Solution(sol));
        }
        Verdict::Unsat(examples) => {
            report.verdict = FinalVerdict::Invalid; // printed as "unsat"
            report.certificate = Some(Certificate::Counterexamples(examples));
        }
        Verdict::Unknown(reason) => {
            report.verdict = if start.elapsed() >= config.timeout {
                FinalVerdict::Timeout
            } else {
                FinalVerdict::Unknown
            };
            report.detail = reason;
        }
    }
    if let Some(path) = &config.log_path {
        std::fs::write(path, cegis.log.lines.join("\n") + "\n")?;
    }
    let log = std::mem::take(&mut cegis.log);
    Ok((report, log))
}

/// Render a solution as SMT-LIB2 define-fun forms (the pcsat output model).
pub fn print_solution(csp: &PfwCsp, solution: &CandidateSolution) -> String {
    let mut out = String::new();
    for (name, lambda) in &solution.0 {
        let params = lambda
            .params
            .iter()
            .map(|(x, s)| format!("({x} {})", muclp::smtlib::sort_to_sexp(s)))
            .collect::<Vec<_>>()
            .join(" ");
        let (ret, body) = match &lambda.body {
            muclp::pfwcsp::LambdaBody::Pred(f) => {
                ("Bool".to_string(), muclp::smtlib::formula_to_sexp(f).to_string())
            }
            muclp::pfwcsp::LambdaBody::Fn(t) => {
                let ret = csp
                    .fn_sorts
                    .get(name)
                    .map(|(_, r)| muclp::smtlib::sort_to_sexp(r).to_string())
                    .unwrap_or_else(|| "Int".to_string());
                (ret, muclp::smtlib::term_to_sexp(t).to_string())
            }
        };
        out.push_str(&format!("(define-fun {name} ({params}) {ret} {body})\n"));
    }
    out
}

/// Render an unsatisfiable example-instance set (the pcsat unsat output).
pub fn print_examples(examples: &[ExampleInstance]) -> String {
    let mut out = String::new();
    for inst in examples {
        out.push_str(&format!(
            "(example (clause {}) {})\n",
            inst.source,
            muclp::smtlib::formula_to_sexp(&inst.clause.to_formula())
        ));
    }
    out
}
