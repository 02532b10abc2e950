//! The CEGIS loop for pfwCSP satisfiability: synthesis from accumulated
//! ground example instances over stratified templates, SMT validation of
//! candidates, resolution-based example propagation, and unsatisfiability
//! checking of example sets with simple-cycle learning for well-foundedness
//! constraints.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use muclp::ast::{Formula, Name, Sort, Term, Value};
use muclp::cycles::enumerate_simple_cycles;
use muclp::eval::{eval_formula, eval_term, EvalBudget, NoVars, SolutionResolver};
use muclp::pfwcsp::{
    clause_key, eval_ground_clause, instantiate, CandidateSolution, ExampleInstance,
    PfwCsp,
};
use muclp::templates::{
    build_templates, extract_candidate, hypothesis_constraint, implicated_vars, CoeffAssignment,
    InitialParams, ParamVector,
};
use thiserror::Error;

use crate::smt::{Model, SmtConf, SmtError, SmtOutcome, SmtQuery, SmtSolver, Validity};

#[derive(Debug, Clone)]
pub struct CegisConfig {
    pub smt: SmtConf,
    pub max_iterations: u32,
    pub wall_clock: Duration,
    pub resolution_depth: u32,
    pub init_params: InitialParams,
    pub fairness_cap: u32,
    /// Parameter bumps allowed inside one synthesis call.
    pub synth_bump_budget: u32,
    /// Iterations of the cycle-learning loop in example unsat checking.
    pub unsat_check_budget: u32,
    /// Sample size for the finite well-foundedness spot check.
    pub wf_spot_points: usize,
}

impl CegisConfig {
    pub fn new(smt: SmtConf) -> CegisConfig {
        CegisConfig {
            smt,
            max_iterations: 200,
            wall_clock: Duration::from_secs(300),
            resolution_depth: 2,
            init_params: InitialParams::default(),
            fairness_cap: 3,
            synth_bump_budget: 400,
            unsat_check_budget: 100,
            wf_spot_points: 500,
        }
    }
}

/// Accumulated ground example instances plus derived unit facts.
#[derive(Debug, Clone, Default)]
pub struct ExampleStore {
    pub instances: Vec<ExampleInstance>,
    keys: BTreeSet<String>,
    pub pos_facts: BTreeSet<(Name, Vec<Value>)>,
    pub neg_facts: BTreeSet<(Name, Vec<Value>)>,
}

impl ExampleStore {
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Insert if new; trivially true instances are dropped. Returns whether
    /// the store changed.
    pub fn insert(&mut self, inst: ExampleInstance) -> bool {
        if inst.clause.is_trivially_true() {
            return false;
        }
        let key = clause_key(&inst.clause);
        if !self.keys.insert(key) {
            return false;
        }
        self.instances.push(inst);
        true
    }

    fn facts(&self) -> Vec<(bool, Name, Vec<Value>)> {
        let mut out = Vec::new();
        for (p, args) in &self.pos_facts {
            out.push((true, p.clone(), args.clone()));
        }
        for (p, args) in &self.neg_facts {
            out.push((false, p.clone(), args.clone()));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Sat(CandidateSolution),
    Unsat(Vec<ExampleInstance>),
    Unknown(String),
}

#[derive(Debug, Error)]
pub enum CegisError {
    #[error("{0}")]
    Smt(#[from] SmtError),
    #[error("internal error: {0}")]
    Internal(String),
}

/// One structured record per iteration for the progress-property checker.
#[derive(Debug, Clone)]
pub struct IterRecord {
    pub iteration: u32,
    pub candidate: String,
    pub failed_clauses: Vec<usize>,
    pub example_count: usize,
    pub params: String,
}

#[derive(Debug, Default)]
pub struct IterationLog {
    pub records: Vec<IterRecord>,
    pub lines: Vec<String>,
}

impl IterationLog {
    fn push(&mut self, rec: IterRecord) {
        let mut line = String::new();
        let _ = write!(
            line,
            "iter={} examples={} failed={:?} params=[{}] candidate={}",
            rec.iteration, rec.example_count, rec.failed_clauses, rec.params, rec.candidate
        );
        self.lines.push(line);
        self.records.push(rec);
    }
}

fn fmt_candidate(sol: &CandidateSolution) -> String {
    let mut out = String::new();
    for (name, lambda) in &sol.0 {
        let body = match &lambda.body {
            muclp::pfwcsp::LambdaBody::Pred(f) => muclp::print::fmt_formula_raw(f),
            muclp::pfwcsp::LambdaBody::Fn(t) => muclp::print::fmt_term_raw(t),
        };
        let params = lambda
            .params
            .iter()
            .map(|(x, _)| x.as_str())
            .collect::<Vec<_>>()
            .join(",");
        let _ = write!(out, "{name}=λ{params}.{body}; ");
    }
    out
}

fn fmt_params(p: &ParamVector) -> String {
    let mut out = String::new();
    for (name, v) in &p.vars {
        let comps = v
            .comps
            .iter()
            .map(|c| format!("{}={}", c.id.label(), c.value))
            .collect::<Vec<_>>()
            .join(",");
        let _ = write!(out, "{name}:{comps} ");
    }
    out.trim_end().to_string()
}

pub struct Cegis {
    pub csp: PfwCsp,
    pub config: CegisConfig,
    pub smt: SmtSolver,
    pub log: IterationLog,
    pub stop: Arc<AtomicBool>,
    start: Instant,
}

impl Cegis {
    pub fn new(csp: PfwCsp, config: CegisConfig) -> Cegis {
        let smt = SmtSolver::new(config.smt.clone());
        Cegis {
            csp,
            config,
            smt,
            log: IterationLog::default(),
            stop: Arc::new(AtomicBool::new(false)),
            start: Instant::now(),
        }
    }

    fn out_of_time(&self) -> bool {
        self.stop.load(Ordering::Relaxed) || self.start.elapsed() >= self.config.wall_clock
    }

    /// The outer loop. `Sat` verdicts re-validate from scratch and `Unsat`
    /// verdicts re-check from scratch before being returned.
    pub fn solve(&mut self) -> Result<Verdict, CegisError> {
        self.start = Instant::now();
        if let Err(e) = self.csp.check_declared() {
            return Err(CegisError::Internal(format!("ill-formed pfwCSP: {e}")));
        }
        let mut store = ExampleStore::default();
        // ground clauses of the problem are example instances from the
        // start (their instantiation is the identity)
        for (ix, clause) in self.csp.clauses.iter().enumerate() {
            if clause.term_vars.is_empty() {
                let inst = instantiate(clause, ix, &BTreeMap::new())
                    .map_err(|e| CegisError::Internal(format!("{e}")))?;
                store.insert(inst);
            }
        }
        let mut params = ParamVector::initial(
            &self.csp,
            &self.config.init_params,
            self.config.fairness_cap,
        );
        let mut seen_candidates: BTreeSet<String> = BTreeSet::new();

        for iteration in 1..=self.config.max_iterations {
            if self.out_of_time() {
                return Ok(Verdict::Unknown("budget exhausted".into()));
            }
            // synthesis phase starts by checking the accumulated examples
            match self.check_examples_unsat(&store)? {
                ExamplesVerdict::Unsat => {
                    // re-check from scratch before concluding
                    match self.check_examples_unsat(&store)? {
                        ExamplesVerdict::Unsat => {
                            return Ok(Verdict::Unsat(store.instances.clone()))
                        }
                        _ => {
                            return Err(CegisError::Internal(
                                "unsat verdict did not re-check".into(),
                            ))
                        }
                    }
                }
                ExamplesVerdict::SatAssignment => {}
                ExamplesVerdict::Unknown(reason) => return Ok(Verdict::Unknown(reason)),
            }

            let candidate = match self.synthesize(&store, &mut params)? {
                Some(c) => c,
                None => return Ok(Verdict::Unknown("synthesis budget exhausted".into())),
            };
            let key = fmt_candidate(&candidate);
            if !seen_candidates.insert(key.clone()) {
                return Err(CegisError::Internal(format!(
                    "candidate repeated across iterations: {key}"
                )));
            }

            match self.validate(&candidate)? {
                ValidationResult::Valid => {
                    self.log.push(IterRecord {
                        iteration,
                        candidate: key,
                        failed_clauses: Vec::new(),
                        example_count: store.len(),
                        params: fmt_params(&params),
                    });
                    // re-validate from scratch before concluding
                    match self.validate(&candidate)? {
                        ValidationResult::Valid => {}
                        _ => {
                            return Err(CegisError::Internal(
                                "sat verdict did not re-validate".into(),
                            ))
                        }
                    }
                    if !self.wf_spot_check(&candidate) {
                        return Err(CegisError::Internal(
                            "validated candidate failed the well-foundedness spot check".into(),
                        ));
                    }
                    return Ok(Verdict::Sat(candidate));
                }
                ValidationResult::Unknown(reason) => {
                    return Ok(Verdict::Unknown(format!("validation: {reason}")))
                }
                ValidationResult::Counterexamples(list) => {
                    let mut failed = Vec::new();
                    let before = store.len();
                    for (clause_ix, theta) in &list {
                        failed.push(*clause_ix);
                        let inst = instantiate(&self.csp.clauses[*clause_ix], *clause_ix, theta)
                            .map_err(|e| CegisError::Internal(format!("{e}")))?;
                        // the countermodel must falsify the instance
                        debug_assert_eq!(
                            eval_ground_clause(&inst.clause, &candidate).ok(),
                            Some(false),
                            "countermodel does not falsify clause {clause_ix}: {}",
                            clause_key(&inst.clause),
                        );
                        // collisions across different source clauses can
                        // produce an already-known ground clause; the round
                        // as a whole must still grow the example set
                        store.insert(inst);
                    }
                    if store.len() == before {
                        return Err(CegisError::Internal(format!(
                            "validation failed clauses {failed:?} without any new example \
                             instance; candidate: {key}"
                        )));
                    }
                    self.resolution_closure(&mut store, self.config.resolution_depth);
                    self.log.push(IterRecord {
                        iteration,
                        candidate: key,
                        failed_clauses: failed,
                        example_count: store.len(),
                        params: fmt_params(&params),
                    });
                }
            }
        }
        Ok(Verdict::Unknown("iteration budget exhausted".into()))
    }

    /// Find a candidate satisfying every stored instance within the current
    /// parameter space, bumping parameters on unsat cores. `None` when the
    /// bump budget runs out.
    pub fn synthesize(
        &mut self,
        store: &ExampleStore,
        params: &mut ParamVector,
    ) -> Result<Option<CandidateSolution>, CegisError> {
        for _ in 0..=self.config.synth_bump_budget {
            if self.out_of_time() {
                return Ok(None);
            }
            let templates = build_templates(&self.csp, params)
                .map_err(|e| CegisError::Internal(format!("{e}")))?;
            let constraints = hypothesis_constraint(&store.instances, &store.facts(), &templates)
                .map_err(|e| CegisError::Internal(format!("{e}")))?;
            let unknowns: Vec<(Name, Vec<Sort>, Sort)> = templates
                .values()
                .flat_map(|t| t.all_unknowns())
                .map(|n| (n.clone(), Vec::new(), Sort::Int))
                .collect();
            // cores are requested lazily: the common (sat) path runs
            // without assumption tracking, and only an unsat answer pays
            // for a second, core-producing query
            let mut query = SmtQuery {
                decls: unknowns,
                named: constraints
                    .iter()
                    .map(|c| (c.name.clone(), c.formula.clone()))
                    .collect(),
                want_model: true,
                want_core: false,
            };
            let mut outcome = self.smt.check_sat_named(&query)?;
            if matches!(outcome, SmtOutcome::Unsat(_)) {
                query.want_core = true;
                query.want_model = false;
                outcome = self.smt.check_sat_named(&query)?;
                if matches!(outcome, SmtOutcome::Sat(_)) {
                    return Err(CegisError::Internal(
                        "synthesis query flipped between unsat and sat".into(),
                    ));
                }
            }
            match outcome {
                SmtOutcome::Sat(model) => {
                    let theta = model_to_assignment(&model, &templates);
                    let candidate = extract_candidate(&templates, &theta);
                    // candidates must satisfy every stored instance by
                    // direct ground evaluation
                    for inst in &store.instances {
                        match eval_ground_clause(&inst.clause, &candidate) {
                            Ok(true) => {}
                            other => {
                                return Err(CegisError::Internal(format!(
                                    "synthesized candidate fails a stored instance: {other:?}"
                                )))
                            }
                        }
                    }
                    return Ok(Some(candidate));
                }
                SmtOutcome::Unsat(core) => {
                    let implicated = implicated_vars(&core, &constraints);
                    let implicated = if implicated.is_empty() {
                        // empty or unusable core: bump everything
                        params.vars.keys().cloned().collect()
                    } else {
                        implicated
                    };
                    *params = params.bump(&implicated);
                }
                SmtOutcome::Unknown(reason) => {
                    return Err(CegisError::Smt(SmtError::Backend(format!(
                        "synthesis query unknown: {reason}"
                    ))))
                }
            }
        }
        Ok(None)
    }

    /// SMT validation of a candidate: valid, or one countermodel per failed
    /// clause.
    pub fn validate(
        &mut self,
        candidate: &CandidateSolution,
    ) -> Result<ValidationResult, CegisError> {
        let applied = self
            .csp
            .apply_solution(candidate)
            .map_err(|e| CegisError::Internal(format!("{e}")))?;
        let mut counterexamples = Vec::new();
        for (ix, formula) in applied.iter().enumerate() {
            let (vars, matrix) = match formula {
                Formula::Quant(muclp::ast::Quantifier::Forall, vars, body) => {
                    (vars.clone(), muclp::simplify::simplify(body))
                }
                other => (Vec::new(), muclp::simplify::simplify(other)),
            };
            if matrix == Formula::True {
                continue;
            }
            match self.smt.check_validity(&vars, &matrix)? {
                Validity::Valid => {}
                Validity::Countermodel(theta) => {
                    // ground recheck: the countermodel must falsify the matrix
                    let env: muclp::eval::Env = theta.clone().into_iter().collect();
                    let holds = eval_formula(&matrix, &env, &NoVars, &mut EvalBudget::unlimited());
                    if holds != Ok(false) {
                        return Ok(ValidationResult::Unknown(format!(
                            "countermodel for clause {ix} did not falsify it: {holds:?}"
                        )));
                    }
                    counterexamples.push((ix, theta));
                }
                Validity::UnknownBackend(reason) => {
                    return Ok(ValidationResult::Unknown(reason))
                }
            }
        }
        if counterexamples.is_empty() {
            Ok(ValidationResult::Valid)
        } else {
            Ok(ValidationResult::Counterexamples(counterexamples))
        }
    }

    /// Unit propagation over the stored instances followed by resolution of
    /// the original clauses against derived facts, to the given depth.
    /// Everything added stays ground.
    pub fn resolution_closure(&self, store: &mut ExampleStore, depth: u32) {
        for _ in 0..depth {
            let mut changed = false;
            changed |= unit_propagate(store);
            // resolve original clauses against positive facts
            let facts: Vec<(Name, Vec<Value>)> = store.pos_facts.iter().cloned().collect();
            for (clause_ix, clause) in self.csp.clauses.iter().enumerate() {
                if clause.term_vars.is_empty() {
                    continue;
                }
                for (pvar, values) in &facts {
                    for (neg_ix, (x, args)) in clause.neg.iter().enumerate() {
                        let _ = neg_ix;
                        if x != pvar || args.len() != values.len() {
                            continue;
                        }
                        if let Some(theta) = match_args(args, values, &clause.term_vars) {
                            if theta.len() == clause.term_vars.len() {
                                if let Ok(inst) = instantiate(clause, clause_ix, &theta) {
                                    changed |= store.insert(inst);
                                }
                            }
                        }
                    }
                }
            }
            // and against negative facts on positive literals
            let nfacts: Vec<(Name, Vec<Value>)> = store.neg_facts.iter().cloned().collect();
            for (clause_ix, clause) in self.csp.clauses.iter().enumerate() {
                if clause.term_vars.is_empty() {
                    continue;
                }
                for (pvar, values) in &nfacts {
                    for (x, args) in &clause.pos {
                        if x != pvar || args.len() != values.len() {
                            continue;
                        }
                        if let Some(theta) = match_args(args, values, &clause.term_vars) {
                            if theta.len() == clause.term_vars.len() {
                                if let Ok(inst) = instantiate(clause, clause_ix, &theta) {
                                    changed |= store.insert(inst);
                                }
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Decide unsatisfiability of the stored ground instances together with
    /// the well-foundedness constraints, learning simple-cycle blocking
    /// clauses.
    pub fn check_examples_unsat(
        &mut self,
        store: &ExampleStore,
    ) -> Result<ExamplesVerdict, CegisError> {
        if store.is_empty() && store.pos_facts.is_empty() && store.neg_facts.is_empty() {
            return Ok(ExamplesVerdict::SatAssignment);
        }
        // declarations: predicate variables and function variables over
        // their argument sorts
        let mut decls: Vec<(Name, Vec<Sort>, Sort)> = Vec::new();
        for (name, sorts) in &self.csp.pred_sorts {
            decls.push((name.clone(), sorts.clone(), Sort::Bool));
        }
        for (name, (args, ret)) in &self.csp.fn_sorts {
            decls.push((name.clone(), args.clone(), ret.clone()));
        }

        let mut base: Vec<(String, Formula)> = store
            .instances
            .iter()
            .enumerate()
            .map(|(k, inst)| (format!("ex!{k}"), inst.clause.to_formula()))
            .collect();
        for (k, (positive, p, args)) in store.facts().iter().enumerate() {
            let app = Formula::PredApp(p.clone(), args.iter().map(|v| v.as_term()).collect());
            base.push((
                format!("factc!{k}"),
                if *positive { app } else { Formula::not(app) },
            ));
        }

        // atoms of well-founded variables occurring anywhere in the instances
        let mut wf_atoms: BTreeMap<Name, Vec<Vec<Term>>> = BTreeMap::new();
        for inst in &store.instances {
            for (x, args) in inst.clause.pos.iter().chain(&inst.clause.neg) {
                if self.csp.wf_vars.contains(x) {
                    wf_atoms.entry(x.clone()).or_default().push(args.clone());
                }
            }
        }

        let mut learnt: Vec<Formula> = Vec::new();
        for _ in 0..self.config.unsat_check_budget {
            if self.out_of_time() {
                return Ok(ExamplesVerdict::Unknown("budget exhausted".into()));
            }
            let mut named = base.clone();
            for (k, f) in learnt.iter().enumerate() {
                named.push((format!("learnt!{k}"), f.clone()));
            }
            let query = SmtQuery {
                decls: decls.clone(),
                named,
                want_model: true,
                want_core: false,
            };
            match self.smt.check_sat_named(&query)? {
                SmtOutcome::Unsat(_) => return Ok(ExamplesVerdict::Unsat),
                SmtOutcome::Unknown(reason) => {
                    return Ok(ExamplesVerdict::Unknown(format!(
                        "example check unknown: {reason}"
                    )))
                }
                SmtOutcome::Sat(model) => {
                    let mut any_cycle = false;
                    for (wf, atom_args) in &wf_atoms {
                        let edges = wf_edges(wf, atom_args, &model)?;
                        let cycles = enumerate_simple_cycles(&edges);
                        for cycle in cycles {
                            any_cycle = true;
                            learnt.push(cycle_blocking_clause(wf, &cycle));
                        }
                    }
                    if !any_cycle {
                        return Ok(ExamplesVerdict::SatAssignment);
                    }
                }
            }
        }
        Ok(ExamplesVerdict::Unknown(
            "cycle-learning budget exhausted".into(),
        ))
    }

    /// Finite well-foundedness check: sample integer tuples, build the
    /// graph of the extracted relation, and require zero cycles.
    pub fn wf_spot_check(&self, candidate: &CandidateSolution) -> bool {
        let resolver = SolutionResolver::new(candidate);
        for wf in &self.csp.wf_vars {
            let Some(sorts) = self.csp.pred_sorts.get(wf) else {
                return false;
            };
            let half = sorts.len() / 2;
            let points = sample_tuples(&sorts[..half], self.config.wf_spot_points);
            let mut edges = BTreeSet::new();
            for a in &points {
                for b in &points {
                    let mut args: Vec<Value> = a.clone();
                    args.extend(b.iter().copied());
                    match muclp::eval::Resolver::pred(
                        &resolver,
                        wf,
                        &args,
                        &mut EvalBudget::with_steps(1_000_000),
                    ) {
                        Ok(true) => {
                            edges.insert((a.clone(), b.clone()));
                        }
                        Ok(false) => {}
                        Err(_) => return false,
                    }
                }
            }
            if !enumerate_simple_cycles(&edges).is_empty() {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone)]
pub enum ValidationResult {
    Valid,
    Counterexamples(Vec<(usize, BTreeMap<Name, Value>)>),
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExamplesVerdict {
    Unsat,
    SatAssignment,
    Unknown(String),
}

fn model_to_assignment(
    model: &Model,
    templates: &BTreeMap<Name, muclp::templates::TemplateInstance>,
) -> CoeffAssignment {
    let mut theta = CoeffAssignment::default();
    for t in templates.values() {
        for unknown in t.all_unknowns() {
            let v = model.int_value(unknown).unwrap_or(0);
            theta.0.insert(unknown.clone(), v);
        }
    }
    theta
}

/// Derive unit facts by Boolean constraint propagation over the ground
/// instances. Returns whether anything new was learnt.
fn unit_propagate(store: &mut ExampleStore) -> bool {
    let mut changed = false;
    loop {
        let mut new_facts: Vec<(bool, Name, Vec<Value>)> = Vec::new();
        for inst in &store.instances {
            // the constraint part must be decided false for a unit step
            if inst.clause.constraint != Formula::False {
                let ground = muclp::simplify::simplify(&inst.clause.constraint);
                if ground != Formula::False {
                    continue;
                }
            }
            let mut undecided: Vec<(bool, &Name, &Vec<Term>)> = Vec::new();
            let mut satisfied = false;
            for (x, args) in &inst.clause.pos {
                match ground_values(args) {
                    Some(vals) => {
                        if store.pos_facts.contains(&(x.clone(), vals.clone())) {
                            satisfied = true;
                        } else if !store.neg_facts.contains(&(x.clone(), vals)) {
                            undecided.push((true, x, args));
                        }
                    }
                    None => undecided.push((true, x, args)),
                }
            }
            for (x, args) in &inst.clause.neg {
                match ground_values(args) {
                    Some(vals) => {
                        if store.neg_facts.contains(&(x.clone(), vals.clone())) {
                            satisfied = true;
                        } else if !store.pos_facts.contains(&(x.clone(), vals)) {
                            undecided.push((false, x, args));
                        }
                    }
                    None => undecided.push((false, x, args)),
                }
            }
            if satisfied || undecided.len() != 1 {
                continue;
            }
            let (positive, x, args) = undecided[0];
            if let Some(vals) = ground_values(args) {
                new_facts.push((positive, x.clone(), vals));
            }
        }
        let mut grew = false;
        for (positive, x, vals) in new_facts {
            let set = if positive {
                &mut store.pos_facts
            } else {
                &mut store.neg_facts
            };
            grew |= set.insert((x, vals));
        }
        if !grew {
            return changed;
        }
        changed = true;
    }
}

fn ground_values(args: &[Term]) -> Option<Vec<Value>> {
    args.iter().map(|t| t.value()).collect()
}

/// Match clause-literal arguments against ground values: variables bind,
/// ground terms must match exactly; anything else fails.
fn match_args(
    args: &[Term],
    values: &[Value],
    term_vars: &[(Name, Sort)],
) -> Option<BTreeMap<Name, Value>> {
    let mut theta = BTreeMap::new();
    for (arg, value) in args.iter().zip(values) {
        match arg {
            Term::Var(x, _) if term_vars.iter().any(|(y, _)| y == x) => {
                match theta.get(x) {
                    Some(v) if v != value => return None,
                    _ => {
                        theta.insert(x.clone(), *value);
                    }
                }
            }
            _ => match arg.value() {
                Some(v) if v == *value => {}
                _ => return None,
            },
        }
    }
    Some(theta)
}

/// Evaluate the WF atoms occurring in the instances under the model and
/// collect the edges whose atom is assigned true.
fn wf_edges(
    wf: &Name,
    atom_args: &[Vec<Term>],
    model: &Model,
) -> Result<BTreeSet<(Vec<Value>, Vec<Value>)>, CegisError> {
    let resolver = ModelResolver { model };
    let mut edges = BTreeSet::new();
    for args in atom_args {
        let mut budget = EvalBudget::with_steps(1_000_000);
        let vals: Result<Vec<Value>, _> = args
            .iter()
            .map(|t| eval_term(t, &muclp::eval::Env::new(), &resolver, &mut budget))
            .collect();
        let vals = vals.map_err(|e| CegisError::Internal(format!("wf edge eval: {e}")))?;
        let truth = muclp::eval::Resolver::pred(&resolver, wf, &vals, &mut budget)
            .map_err(|e| CegisError::Internal(format!("wf atom eval: {e}")))?;
        if truth {
            let half = vals.len() / 2;
            edges.insert((vals[..half].to_vec(), vals[half..].to_vec()));
        }
    }
    Ok(edges)
}

/// `¬X(v1, v2) ∨ … ∨ ¬X(vm-1, vm)` for a simple cycle `v1 … vm (v1)`.
fn cycle_blocking_clause(wf: &Name, cycle: &[Vec<Value>]) -> Formula {
    let mut lits = Vec::new();
    for i in 0..cycle.len() {
        let a = &cycle[i];
        let b = &cycle[(i + 1) % cycle.len()];
        let mut args: Vec<Term> = a.iter().map(|v| v.as_term()).collect();
        args.extend(b.iter().map(|v| v.as_term()));
        lits.push(Formula::not(Formula::PredApp(wf.clone(), args)));
    }
    Formula::or(lits)
}

struct ModelResolver<'a> {
    model: &'a Model,
}

impl muclp::eval::Resolver for ModelResolver<'_> {
    fn pred(
        &self,
        name: &Name,
        args: &[Value],
        budget: &mut EvalBudget,
    ) -> Result<bool, muclp::eval::EvalError> {
        let Some(lambda) = self.model.0.get(name) else {
            return Err(muclp::eval::EvalError::UnknownPredicate(name.clone()));
        };
        let env: muclp::eval::Env = lambda
            .params
            .iter()
            .map(|(p, _)| p.clone())
            .zip(args.iter().copied())
            .collect();
        match &lambda.body {
            muclp::pfwcsp::LambdaBody::Pred(f) => eval_formula(f, &env, self, budget),
            muclp::pfwcsp::LambdaBody::Fn(t) => match eval_term(t, &env, self, budget)? {
                Value::Bool(b) => Ok(b),
                Value::Int(_) => Err(muclp::eval::EvalError::SortError(
                    "predicate model returned int".into(),
                )),
            },
        }
    }

    fn func(
        &self,
        name: &Name,
        args: &[Value],
        budget: &mut EvalBudget,
    ) -> Result<Value, muclp::eval::EvalError> {
        let Some(lambda) = self.model.0.get(name) else {
            return Err(muclp::eval::EvalError::UnknownFunction(name.clone()));
        };
        let env: muclp::eval::Env = lambda
            .params
            .iter()
            .map(|(p, _)| p.clone())
            .zip(args.iter().copied())
            .collect();
        match &lambda.body {
            muclp::pfwcsp::LambdaBody::Fn(t) => eval_term(t, &env, self, budget),
            muclp::pfwcsp::LambdaBody::Pred(f) => {
                Ok(Value::Bool(eval_formula(f, &env, self, budget)?))
            }
        }
    }
}

/// Deterministic low-discrepancy integer tuples for the spot check.
fn sample_tuples(sorts: &[Sort], count: usize) -> Vec<Vec<Value>> {
    let mut out = Vec::with_capacity(count);
    let mut seed = 0x2545f4914f6cdd1du64;
    for _ in 0..count {
        let mut tuple = Vec::with_capacity(sorts.len());
        for s in sorts {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            match s {
                Sort::Bool => tuple.push(Value::Bool(seed & 1 == 0)),
                _ => tuple.push(Value::Int((seed % 201) as i64 - 100)),
            }
        }
        out.push(tuple);
    }
    out.sort();
    out.dedup();
    out
}
