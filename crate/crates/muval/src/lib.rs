//! Solver runtime for MuCLP validity checking: the subprocess SMT backend,
//! the CEGIS loop for pfwCSP, and the primal-dual orchestration behind the
//! `muval` and `pcsat` executables.

pub mod cegis;
pub mod pipeline;
pub mod smt;

pub use cegis::{Cegis, CegisConfig, ExampleStore, Verdict};
pub use pipeline::{muval_solve, pcsat_solve, FinalReport, FinalVerdict, RunConfig};
pub use smt::{SmtConf, SmtOutcome, SmtQuery, SmtSolver};
