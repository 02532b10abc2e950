//! Process-based SMT backend speaking SMT-LIB2 over standard input/output.
//!
//! One persistent solver process per CEGIS instance, `(reset)` between
//! queries, full restart after a crash or timeout. Every request is
//! followed by an `(echo "...")` sync token so stray diagnostics can never
//! desynchronize the protocol; any response that does not match the
//! expected grammar yields `UnknownBackend`, never a wrong verdict.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{Receiver, RecvTimeoutError};
use std::time::{Duration, Instant};

use muclp::ast::{Formula, Name, Sort, Term, Value};
use muclp::pfwcsp::{Lambda, LambdaBody};
use muclp::sexp::{parse_sexps, Sexp};
use muclp::smtlib::{formula_to_sexp, sort_to_sexp, ReadCtx};
use thiserror::Error;

#[derive(Debug, Clone)]
pub struct SmtConf {
    pub solver_path: PathBuf,
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub query_timeout: Duration,
}

impl SmtConf {
    pub fn new(solver_path: PathBuf) -> SmtConf {
        SmtConf {
            solver_path,
            args: Vec::new(),
            seed: None,
            query_timeout: Duration::from_secs(30),
        }
    }
}

#[derive(Debug, Error)]
pub enum SmtError {
    #[error("failed to spawn solver {path}: {source}")]
    Spawn {
        path: String,
        source: std::io::Error,
    },
    #[error("solver backend unusable: {0}")]
    Backend(String),
}

/// Declarations for one query.
#[derive(Debug, Clone, Default)]
pub struct SmtQuery {
    /// (name, argument sorts, return sort); Prop maps to Bool.
    pub decls: Vec<(Name, Vec<Sort>, Sort)>,
    pub named: Vec<(String, Formula)>,
    pub want_model: bool,
    pub want_core: bool,
}

#[derive(Debug, Clone)]
pub enum SmtOutcome {
    Sat(Model),
    Unsat(Vec<String>),
    Unknown(String),
}

/// A parsed solver model: every declared symbol mapped to a closed lambda
/// (constants are zero-parameter lambdas).
#[derive(Debug, Clone, Default)]
pub struct Model(pub BTreeMap<Name, Lambda>);

impl Model {
    pub fn int_value(&self, name: &str) -> Option<i64> {
        match &self.0.get(name)?.body {
            LambdaBody::Fn(Term::Int(n)) => Some(*n),
            _ => None,
        }
    }

    pub fn value(&self, name: &str) -> Option<Value> {
        let lambda = self.0.get(name)?;
        if !lambda.params.is_empty() {
            return None;
        }
        match &lambda.body {
            LambdaBody::Fn(t) => t.value(),
            LambdaBody::Pred(Formula::True) => Some(Value::Bool(true)),
            LambdaBody::Pred(Formula::False) => Some(Value::Bool(false)),
            LambdaBody::Pred(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Countermodel(BTreeMap<Name, Value>),
    UnknownBackend(String),
}

pub struct SmtSolver {
    conf: SmtConf,
    proc: Option<Proc>,
    sync_counter: u64,
    pub queries_issued: u64,
}

struct Proc {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
}

impl Drop for Proc {
    fn drop(&mut self) {
        let _ = self.stdin.write_all(b"(exit)\n");
        let _ = self.stdin.flush();
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl SmtSolver {
    pub fn new(conf: SmtConf) -> SmtSolver {
        SmtSolver {
            conf,
            proc: None,
            sync_counter: 0,
            queries_issued: 0,
        }
    }

    fn ensure_proc(&mut self) -> Result<&mut Proc, SmtError> {
        if self.proc.is_none() {
            let mut child = Command::new(&self.conf.solver_path)
                .args(&self.conf.args)
                .stdin(Stdio::piped())
                .stdout(Stdio::piped())
                .stderr(Stdio::null())
                .spawn()
                .map_err(|source| SmtError::Spawn {
                    path: self.conf.solver_path.display().to_string(),
                    source,
                })?;
            let stdin = child.stdin.take().expect("piped stdin");
            let stdout = child.stdout.take().expect("piped stdout");
            let (tx, rx) = std::sync::mpsc::channel();
            std::thread::spawn(move || {
                let reader = BufReader::new(stdout);
                for line in reader.lines() {
                    let is_err = line.is_err();
                    if tx.send(line).is_err() || is_err {
                        break;
                    }
                }
            });
            self.proc = Some(Proc {
                child,
                stdin,
                lines: rx,
            });
        }
        Ok(self.proc.as_mut().unwrap())
    }

    fn kill_proc(&mut self) {
        self.proc = None;
    }

    fn send(&mut self, text: &str) -> Result<(), SmtError> {
        let proc = self.ensure_proc()?;
        proc.stdin
            .write_all(text.as_bytes())
            .and_then(|_| proc.stdin.write_all(b"\n"))
            .and_then(|_| proc.stdin.flush())
            .map_err(|e| SmtError::Backend(format!("write failed: {e}")))
    }

    /// Send an echo token and collect every line up to it.
    fn sync(&mut self, deadline: Instant) -> Result<Vec<String>, SmtError> {
        self.sync_counter += 1;
        let token = format!("sync!{}", self.sync_counter);
        self.send(&format!("(echo \"{token}\")"))?;
        let mut out = Vec::new();
        loop {
            let now = Instant::now();
            if now >= deadline {
                self.kill_proc();
                return Err(SmtError::Backend("query timeout".into()));
            }
            let proc = self.proc.as_mut().expect("live process");
            match proc.lines.recv_timeout(deadline - now) {
                Ok(Ok(line)) => {
                    if line.trim() == token {
                        return Ok(out);
                    }
                    out.push(line);
                }
                Ok(Err(e)) => {
                    self.kill_proc();
                    return Err(SmtError::Backend(format!("read failed: {e}")));
                }
                Err(RecvTimeoutError::Timeout) => {
                    self.kill_proc();
                    return Err(SmtError::Backend("query timeout".into()));
                }
                Err(RecvTimeoutError::Disconnected) => {
                    self.kill_proc();
                    return Err(SmtError::Backend("solver exited".into()));
                }
            }
        }
    }

    fn preamble(&mut self, query: &SmtQuery) -> Result<(), SmtError> {
        self.send("(reset)")?;
        if query.want_model {
            self.send("(set-option :produce-models true)")?;
        }
        if query.want_core {
            self.send("(set-option :produce-unsat-cores true)")?;
        }
        if let Some(seed) = self.conf.seed {
            self.send(&format!("(set-option :smt.random_seed {seed})"))?;
            self.send(&format!("(set-option :sat.random_seed {seed})"))?;
        }
        let logic = compute_logic(query);
        self.send(&format!("(set-logic {logic})"))?;
        for (name, args, ret) in &query.decls {
            let args = args
                .iter()
                .map(|s| sort_to_sexp(s).to_string())
                .collect::<Vec<_>>()
                .join(" ");
            let ret = sort_to_sexp(ret);
            self.send(&format!("(declare-fun {name} ({args}) {ret})"))?;
        }
        Ok(())
    }

    /// Satisfiability of a conjunction of named assertions, with optional
    /// model and unsat core.
    pub fn check_sat_named(&mut self, query: &SmtQuery) -> Result<SmtOutcome, SmtError> {
        self.queries_issued += 1;
        let deadline = Instant::now() + self.conf.query_timeout + Duration::from_secs(5);
        self.preamble(query)?;
        for (name, formula) in &query.named {
            let body = formula_to_sexp(formula);
            if query.want_core {
                self.send(&format!("(assert (! {body} :named {name}))"))?;
            } else {
                self.send(&format!("(assert {body})"))?;
            }
        }
        self.send("(check-sat)")?;
        let lines = self.sync(deadline)?;
        let verdict = extract_verdict(&lines)?;
        match verdict.as_str() {
            "sat" => {
                if !query.want_model {
                    return Ok(SmtOutcome::Sat(Model::default()));
                }
                self.send("(get-model)")?;
                let lines = self.sync(deadline)?;
                let model = parse_model(&lines.join("\n"), &query.decls)
                    .map_err(SmtError::Backend)?;
                Ok(SmtOutcome::Sat(model))
            }
            "unsat" => {
                if !query.want_core {
                    return Ok(SmtOutcome::Unsat(Vec::new()));
                }
                self.send("(get-unsat-core)")?;
                let lines = self.sync(deadline)?;
                let core = parse_core(&lines.join("\n")).map_err(SmtError::Backend)?;
                Ok(SmtOutcome::Unsat(core))
            }
            other => Ok(SmtOutcome::Unknown(other.to_string())),
        }
    }

    /// Validity of `forall vars. matrix` with `matrix` quantifier-free and
    /// closed except for `vars` (function variables must have been
    /// substituted away). A satisfying assignment of the negation becomes
    /// the countermodel.
    pub fn check_validity(
        &mut self,
        vars: &[(Name, Sort)],
        matrix: &Formula,
    ) -> Result<Validity, SmtError> {
        let query = SmtQuery {
            decls: vars
                .iter()
                .map(|(x, s)| (x.clone(), Vec::new(), s.clone()))
                .collect(),
            named: vec![("goal".into(), Formula::not(matrix.clone()))],
            want_model: true,
            want_core: false,
        };
        match self.check_sat_named(&query) {
            Ok(SmtOutcome::Sat(model)) => {
                let mut theta = BTreeMap::new();
                for (x, s) in vars {
                    let v = model.value(x).unwrap_or(match s {
                        Sort::Bool => Value::Bool(false),
                        _ => Value::Int(0),
                    });
                    theta.insert(x.clone(), v);
                }
                Ok(Validity::Countermodel(theta))
            }
            Ok(SmtOutcome::Unsat(_)) => Ok(Validity::Valid),
            Ok(SmtOutcome::Unknown(r)) => Ok(Validity::UnknownBackend(r)),
            Err(SmtError::Backend(r)) => Ok(Validity::UnknownBackend(r)),
            Err(e) => Err(e),
        }
    }
}

fn extract_verdict(lines: &[String]) -> Result<String, SmtError> {
    for line in lines {
        match line.trim() {
            "sat" => return Ok("sat".into()),
            "unsat" => return Ok("unsat".into()),
            "unknown" => return Ok("unknown".into()),
            l if l.starts_with("(error") => {
                return Err(SmtError::Backend(format!("solver error: {l}")))
            }
            _ => {}
        }
    }
    Err(SmtError::Backend(format!(
        "no verdict in solver output: {lines:?}"
    )))
}

fn parse_core(text: &str) -> Result<Vec<String>, String> {
    let sexps = parse_sexps(text).map_err(|e| format!("bad core: {e}"))?;
    let Some(Sexp::List(items)) = sexps.first() else {
        return Err(format!("bad core: {text}"));
    };
    Ok(items
        .iter()
        .filter_map(|s| s.as_atom().map(|a| a.to_string()))
        .collect())
}

/// Parse `(get-model)` output into closed lambdas. Auxiliary definitions
/// that reference each other are inlined; a model that cannot be closed is
/// an error.
pub fn parse_model(
    text: &str,
    decls: &[(Name, Vec<Sort>, Sort)],
) -> Result<Model, String> {
    let sexps = parse_sexps(text).map_err(|e| format!("bad model: {e}"))?;
    // z3 prints (model ...) or just (...) of define-funs
    let items: &[Sexp] = match sexps.first() {
        Some(Sexp::List(items)) => {
            if items.first().and_then(|s| s.as_atom()) == Some("model") {
                &items[1..]
            } else {
                items
            }
        }
        _ => return Err(format!("bad model: {text}")),
    };

    // first pass: signatures of every defined symbol
    struct RawDef {
        params: Vec<(Name, Sort)>,
        ret: Sort,
        body: Sexp,
    }
    let mut raw: BTreeMap<Name, RawDef> = BTreeMap::new();
    for item in items {
        let Some(parts) = item.as_list() else {
            continue;
        };
        if parts.first().and_then(|s| s.as_atom()) != Some("define-fun") {
            continue;
        }
        let [_, name, params, ret, body] = parts else {
            return Err(format!("malformed define-fun: {item}"));
        };
        let Some(name) = name.as_atom() else {
            return Err(format!("malformed define-fun name: {item}"));
        };
        let Some(params) = params.as_list() else {
            return Err(format!("malformed define-fun params: {item}"));
        };
        let params = params
            .iter()
            .map(|p| {
                let Some([n, s]) = p.as_list() else {
                    return Err(format!("malformed parameter: {p}"));
                };
                let (Some(n), Some(s)) = (n.as_atom(), muclp::smtlib::sort_from_sexp(s)) else {
                    return Err(format!("malformed parameter: {p}"));
                };
                Ok((n.to_string(), s))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let ret = muclp::smtlib::sort_from_sexp(ret).ok_or_else(|| format!("bad sort in {item}"))?;
        raw.insert(
            name.to_string(),
            RawDef {
                params,
                ret,
                body: body.clone(),
            },
        );
    }

    // second pass: parse bodies with every model and query symbol visible,
    // then inline internal references until closed
    let mut ctx = ReadCtx::default();
    for (name, def) in &raw {
        if def.ret == Sort::Bool {
            ctx.preds
                .insert(name.clone(), def.params.iter().map(|(_, s)| s.clone()).collect());
        } else {
            ctx.fns.insert(
                name.clone(),
                (def.params.iter().map(|(_, s)| s.clone()).collect(), def.ret.clone()),
            );
        }
    }
    for (name, args, ret) in decls {
        if *ret == Sort::Bool || *ret == Sort::Prop {
            ctx.preds.entry(name.clone()).or_insert_with(|| args.clone());
        } else {
            ctx.fns
                .entry(name.clone())
                .or_insert_with(|| (args.clone(), ret.clone()));
        }
    }
    let required: std::collections::BTreeSet<&Name> =
        decls.iter().map(|(n, _, _)| n).collect();
    let mut lambdas: BTreeMap<Name, Lambda> = BTreeMap::new();
    for (name, def) in &raw {
        let mut local = ctx.clone();
        for (p, s) in &def.params {
            local.vars.insert(p.clone(), s.clone());
        }
        let body = if def.ret == Sort::Bool {
            muclp::smtlib::formula_from_sexp(&def.body, &local).map(LambdaBody::Pred)
        } else {
            muclp::smtlib::term_from_sexp(&def.body, &local).map(LambdaBody::Fn)
        };
        match body {
            Ok(body) => {
                lambdas.insert(
                    name.clone(),
                    Lambda {
                        params: def.params.clone(),
                        body,
                    },
                );
            }
            Err(e) if required.contains(name) => {
                return Err(format!("model body for {name}: {e}"));
            }
            // solver-internal entries (e.g. named-assertion markers) whose
            // bodies mention symbols outside our fragment are irrelevant
            Err(_) => {}
        }
    }

    // inline cross-references (z3 sometimes introduces helper definitions)
    let mut fresh = muclp::ast::FreshNames::seeded(lambdas.keys());
    for _ in 0..8 {
        let snapshot = lambdas.clone();
        let mut changed = false;
        for lambda in lambdas.values_mut() {
            let refs: std::collections::BTreeSet<Name> = match &lambda.body {
                LambdaBody::Pred(f) => muclp::ast::formula_pred_apps(f)
                    .into_iter()
                    .chain(muclp::ast::formula_fn_apps(f))
                    .collect(),
                LambdaBody::Fn(t) => {
                    let mut set = std::collections::BTreeSet::new();
                    muclp::ast::term_fn_apps(t, &mut set);
                    set
                }
            };
            let internal: BTreeMap<Name, Lambda> = refs
                .into_iter()
                .filter_map(|r| snapshot.get(&r).map(|l| (r, l.clone())))
                .collect();
            if internal.is_empty() {
                continue;
            }
            changed = true;
            match &mut lambda.body {
                LambdaBody::Pred(f) => {
                    *f = muclp::transform::substitute(f, &internal, &mut fresh)
                        .map_err(|e| format!("inlining model: {e}"))?;
                }
                LambdaBody::Fn(t) => {
                    *t = muclp::transform::substitute_term(t, &internal, &mut fresh)
                        .map_err(|e| format!("inlining model: {e}"))?;
                }
            }
        }
        if !changed {
            break;
        }
    }

    // ensure every declared symbol has an entry; unconstrained symbols get
    // defaults
    let mut model = Model::default();
    for (name, args, ret) in decls {
        let lambda = match lambdas.get(name) {
            Some(l) => l.clone(),
            None => default_lambda(name, args, ret),
        };
        model.0.insert(name.clone(), lambda);
    }
    Ok(model)
}

fn default_lambda(name: &str, args: &[Sort], ret: &Sort) -> Lambda {
    let params: Vec<(Name, Sort)> = args
        .iter()
        .enumerate()
        .map(|(i, s)| (format!("x!{name}!{i}"), s.clone()))
        .collect();
    match ret {
        Sort::Bool | Sort::Prop => Lambda::pred(params, Formula::False),
        _ => Lambda::func(params, Term::Int(0)),
    }
}

fn compute_logic(query: &SmtQuery) -> String {
    let uses_uf = query.decls.iter().any(|(_, args, _)| !args.is_empty());
    let mut uses_arith = query
        .decls
        .iter()
        .any(|(_, args, ret)| *ret == Sort::Int || args.iter().any(|s| *s == Sort::Int));
    let mut nonlinear = false;
    for (_, f) in &query.named {
        scan_formula(f, &mut uses_arith, &mut nonlinear);
    }
    let mut logic = String::from("QF_");
    if uses_uf {
        logic.push_str("UF");
    }
    if uses_arith {
        logic.push_str(if nonlinear { "NIA" } else { "LIA" });
    }
    if logic == "QF_" {
        logic.push_str("UF");
    }
    logic
}

fn scan_formula(f: &Formula, arith: &mut bool, nonlinear: &mut bool) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Cmp(_, a, b) => {
            *arith = true;
            scan_term(a, arith, nonlinear);
            scan_term(b, arith, nonlinear);
        }
        Formula::BoolTerm(t) => scan_term(t, arith, nonlinear),
        Formula::PredApp(_, args) => {
            for a in args {
                scan_term(a, arith, nonlinear);
            }
        }
        Formula::Not(g) => scan_formula(g, arith, nonlinear),
        Formula::And(fs) | Formula::Or(fs) => {
            for g in fs {
                scan_formula(g, arith, nonlinear);
            }
        }
        Formula::Quant(_, _, body) => scan_formula(body, arith, nonlinear),
    }
}

fn scan_term(t: &Term, arith: &mut bool, nonlinear: &mut bool) {
    match t {
        Term::Var(_, Sort::Int) | Term::Int(_) => *arith = true,
        Term::Var(..) | Term::Bool(_) => {}
        Term::Add(a, b) | Term::Sub(a, b) => {
            *arith = true;
            scan_term(a, arith, nonlinear);
            scan_term(b, arith, nonlinear);
        }
        Term::Mul(a, b) => {
            *arith = true;
            if !matches!(a.as_ref(), Term::Int(_)) && !matches!(b.as_ref(), Term::Int(_)) {
                *nonlinear = true;
            }
            scan_term(a, arith, nonlinear);
            scan_term(b, arith, nonlinear);
        }
        Term::Ite(c, a, b) => {
            scan_formula(c, arith, nonlinear);
            scan_term(a, arith, nonlinear);
            scan_term(b, arith, nonlinear);
        }
        Term::App(_, args) => {
            for a in args {
                scan_term(a, arith, nonlinear);
            }
        }
    }
}

/// Locate a usable solver: `$MUVAL_SMT_SOLVER`, then `z3` on PATH, then the
/// bundled z3-smt2 shim next to the workspace or the executable.
pub fn default_solver_path() -> Option<PathBuf> {
    if let Ok(p) = std::env::var("MUVAL_SMT_SOLVER") {
        let p = PathBuf::from(p);
        if p.exists() {
            return Some(p);
        }
    }
    if let Some(paths) = std::env::var_os("PATH") {
        for dir in std::env::split_paths(&paths) {
            for name in ["z3", "z3-smt2"] {
                let cand = dir.join(name);
                if cand.exists() {
                    return Some(cand);
                }
            }
        }
    }
    let mut candidates: Vec<PathBuf> = Vec::new();
    if let Ok(exe) = std::env::current_exe() {
        let mut dir = exe.parent().map(|p| p.to_path_buf());
        while let Some(d) = dir {
            candidates.push(d.join("tools/z3-smt2"));
            dir = d.parent().map(|p| p.to_path_buf());
        }
    }
    if let Ok(cwd) = std::env::current_dir() {
        let mut dir = Some(cwd);
        while let Some(d) = dir {
            candidates.push(d.join("tools/z3-smt2"));
            dir = d.parent().map(|p| p.to_path_buf());
        }
    }
    candidates.into_iter().find(|c| c.exists())
}

/// Solver arguments needed when driving a real z3 binary directly.
pub fn default_solver_args(path: &std::path::Path) -> Vec<String> {
    let name = path
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or_default();
    if name == "z3" {
        vec!["-in".into()]
    } else {
        Vec::new()
    }
}
