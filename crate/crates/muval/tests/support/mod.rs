//! Shared helpers for the solver-side test suites: solver discovery,
//! configuration presets, and fixture loading.

use std::path::PathBuf;
use std::time::Duration;

use muval::pipeline::RunConfig;
use muval::smt::{SmtConf, SmtSolver};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn solver_conf() -> SmtConf {
    let path = muval::smt::default_solver_path()
        .expect("no SMT solver available; install z3 or `npm install -g z3-solver`");
    let mut conf = SmtConf::new(path.clone());
    conf.args = muval::smt::default_solver_args(&path);
    conf.seed = Some(0);
    conf
}

pub fn solver() -> SmtSolver {
    SmtSolver::new(solver_conf())
}

pub fn run_config() -> RunConfig {
    let mut config = RunConfig::defaults().expect("solver discovery");
    config.seed = Some(0);
    config.timeout = Duration::from_secs(120);
    config
}

/// Parse a MuCLP fixture.
pub fn parse(name: &str) -> muclp::ast::MuClpProgram {
    muclp::parse::parse_muclp(&fixture(name)).unwrap()
}
