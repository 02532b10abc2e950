//! Ground evaluation and the bounded-domain reference evaluator.
//!
//! `bounded_evaluate` computes the nested fixpoint denotation of a program
//! exactly, with integers restricted to `[-bound, bound]`. It follows the
//! equation-order semantics literally: the first equation's fixpoint is
//! computed by Kleene iteration, re-solving the remaining program for every
//! candidate table of the head. This is the testing oracle, not the
//! production solver; domains are expected to be tiny.
//!
//! Connectives combine partial results symmetrically (three-valued): a
//! conjunction with one definite false is false even if another conjunct
//! ran out of the domain. Verdicts are therefore decided whenever possible
//! and a single `OutOfDomain` leak does not poison unrelated branches.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::ast::{
    Equation, FixKind, Formula, MuClpProgram, Name, Quantifier, Sort, Term, Value,
};
use crate::pfwcsp::{CandidateSolution, Lambda, LambdaBody};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    OutOfDomain,
    Overflow,
    Cancelled,
    UnboundVariable(Name),
    UnknownPredicate(Name),
    UnknownFunction(Name),
    SortError(String),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::OutOfDomain => write!(f, "evaluation left the restricted domain"),
            EvalError::Overflow => write!(f, "integer overflow"),
            EvalError::Cancelled => write!(f, "evaluation cancelled"),
            EvalError::UnboundVariable(x) => write!(f, "unbound variable {x}"),
            EvalError::UnknownPredicate(x) => write!(f, "unknown predicate {x}"),
            EvalError::UnknownFunction(x) => write!(f, "unknown function {x}"),
            EvalError::SortError(m) => write!(f, "sort error: {m}"),
        }
    }
}

/// Resolver for predicate and function variable applications.
pub trait Resolver {
    fn pred(&self, name: &Name, args: &[Value], budget: &mut EvalBudget)
        -> Result<bool, EvalError>;
    fn func(&self, name: &Name, args: &[Value], budget: &mut EvalBudget)
        -> Result<Value, EvalError>;
}

/// Rejects every predicate/function variable; for closed formulas.
pub struct NoVars;

impl Resolver for NoVars {
    fn pred(&self, name: &Name, _: &[Value], _: &mut EvalBudget) -> Result<bool, EvalError> {
        Err(EvalError::UnknownPredicate(name.clone()))
    }
    fn func(&self, name: &Name, _: &[Value], _: &mut EvalBudget) -> Result<Value, EvalError> {
        Err(EvalError::UnknownFunction(name.clone()))
    }
}

/// Resolves via a candidate solution's closed lambdas.
pub struct SolutionResolver<'a> {
    solution: &'a CandidateSolution,
}

impl<'a> SolutionResolver<'a> {
    pub fn new(solution: &'a CandidateSolution) -> Self {
        SolutionResolver { solution }
    }

    fn apply(&self, lambda: &Lambda, args: &[Value], budget: &mut EvalBudget)
        -> Result<Value, EvalError> {
        if lambda.params.len() != args.len() {
            return Err(EvalError::SortError(String::from("arity mismatch")));
        }
        let env: Env = lambda
            .params
            .iter()
            .map(|(p, _)| p.clone())
            .zip(args.iter().copied())
            .collect();
        match &lambda.body {
            LambdaBody::Pred(f) => Ok(Value::Bool(eval_formula(f, &env, self, budget)?)),
            LambdaBody::Fn(t) => eval_term(t, &env, self, budget),
        }
    }
}

impl Resolver for SolutionResolver<'_> {
    fn pred(&self, name: &Name, args: &[Value], budget: &mut EvalBudget)
        -> Result<bool, EvalError> {
        let lambda = self
            .solution
            .get(name)
            .ok_or_else(|| EvalError::UnknownPredicate(name.clone()))?;
        match self.apply(lambda, args, budget)? {
            Value::Bool(b) => Ok(b),
            Value::Int(_) => Err(EvalError::SortError(String::from("predicate returned int"))),
        }
    }

    fn func(&self, name: &Name, args: &[Value], budget: &mut EvalBudget)
        -> Result<Value, EvalError> {
        let lambda = self
            .solution
            .get(name)
            .ok_or_else(|| EvalError::UnknownFunction(name.clone()))?;
        self.apply(lambda, args, budget)
    }
}

pub type Env = BTreeMap<Name, Value>;

/// Step budget plus optional cooperative cancellation and an optional
/// integer domain restriction (arithmetic leaving `[-bound, bound]` is an
/// out-of-domain error rather than silently exact).
pub struct EvalBudget<'a> {
    steps: u64,
    max_steps: u64,
    cancel: Option<&'a mut dyn FnMut() -> bool>,
    bound: Option<i64>,
}

impl<'a> EvalBudget<'a> {
    pub fn unlimited() -> Self {
        EvalBudget {
            steps: 0,
            max_steps: u64::MAX,
            cancel: None,
            bound: None,
        }
    }

    pub fn with_steps(max_steps: u64) -> Self {
        EvalBudget {
            steps: 0,
            max_steps,
            cancel: None,
            bound: None,
        }
    }

    pub fn with_cancel(max_steps: u64, cancel: &'a mut dyn FnMut() -> bool) -> Self {
        EvalBudget {
            steps: 0,
            max_steps,
            cancel: Some(cancel),
            bound: None,
        }
    }

    pub fn restrict_ints(mut self, bound: i64) -> Self {
        self.bound = Some(bound);
        self
    }

    fn tick(&mut self) -> Result<(), EvalError> {
        self.steps += 1;
        if self.steps > self.max_steps {
            return Err(EvalError::Cancelled);
        }
        if self.steps % 4096 == 0 {
            if let Some(cancel) = self.cancel.as_mut() {
                if cancel() {
                    return Err(EvalError::Cancelled);
                }
            }
        }
        Ok(())
    }
}

/// Three-valued combination with early exit: an absorbing value decides
/// the connective regardless of domain errors elsewhere.
fn combine_lazy<'x>(
    results: impl Iterator<Item = Result<bool, EvalError>> + 'x,
    absorbing: bool,
) -> Result<bool, EvalError> {
    let mut pending: Option<EvalError> = None;
    for r in results {
        match r {
            Ok(b) if b == absorbing => return Ok(absorbing),
            Ok(_) => {}
            Err(EvalError::OutOfDomain) => pending = Some(EvalError::OutOfDomain),
            Err(e) => return Err(e),
        }
    }
    match pending {
        Some(e) => Err(e),
        None => Ok(!absorbing),
    }
}

pub fn eval_term(
    t: &Term,
    env: &Env,
    resolver: &dyn Resolver,
    budget: &mut EvalBudget,
) -> Result<Value, EvalError> {
    budget.tick()?;
    match t {
        Term::Var(x, _) => env
            .get(x)
            .copied()
            .ok_or_else(|| EvalError::UnboundVariable(x.clone())),
        Term::Int(n) => Ok(Value::Int(*n)),
        Term::Bool(b) => Ok(Value::Bool(*b)),
        Term::Add(a, b) => int_op(a, b, env, resolver, budget, i64::checked_add),
        Term::Sub(a, b) => int_op(a, b, env, resolver, budget, i64::checked_sub),
        Term::Mul(a, b) => int_op(a, b, env, resolver, budget, i64::checked_mul),
        Term::Ite(c, a, b) => {
            // lazy: only the selected branch is evaluated
            if eval_formula(c, env, resolver, budget)? {
                eval_term(a, env, resolver, budget)
            } else {
                eval_term(b, env, resolver, budget)
            }
        }
        Term::App(f, args) => {
            let vals = args
                .iter()
                .map(|a| eval_term(a, env, resolver, budget))
                .collect::<Result<Vec<_>, _>>()?;
            resolver.func(f, &vals, budget)
        }
    }
}

fn int_op(
    a: &Term,
    b: &Term,
    env: &Env,
    resolver: &dyn Resolver,
    budget: &mut EvalBudget,
    op: impl Fn(i64, i64) -> Option<i64>,
) -> Result<Value, EvalError> {
    let x = as_int(eval_term(a, env, resolver, budget)?)?;
    let y = as_int(eval_term(b, env, resolver, budget)?)?;
    let r = op(x, y).ok_or(EvalError::Overflow)?;
    if let Some(bound) = budget.bound {
        if r < -bound || r > bound {
            return Err(EvalError::OutOfDomain);
        }
    }
    Ok(Value::Int(r))
}

fn as_int(v: Value) -> Result<i64, EvalError> {
    match v {
        Value::Int(n) => Ok(n),
        Value::Bool(_) => Err(EvalError::SortError(String::from("expected int"))),
    }
}

fn as_bool(v: Value) -> Result<bool, EvalError> {
    match v {
        Value::Bool(b) => Ok(b),
        Value::Int(_) => Err(EvalError::SortError(String::from("expected bool"))),
    }
}

pub fn eval_formula(
    f: &Formula,
    env: &Env,
    resolver: &dyn Resolver,
    budget: &mut EvalBudget,
) -> Result<bool, EvalError> {
    budget.tick()?;
    match f {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Cmp(op, a, b) => {
            let x = as_int(eval_term(a, env, resolver, budget)?)?;
            let y = as_int(eval_term(b, env, resolver, budget)?)?;
            Ok(op.eval(x, y))
        }
        Formula::BoolTerm(t) => as_bool(eval_term(t, env, resolver, budget)?),
        Formula::PredApp(x, args) => {
            let vals = args
                .iter()
                .map(|a| eval_term(a, env, resolver, budget))
                .collect::<Result<Vec<_>, _>>()?;
            resolver.pred(x, &vals, budget)
        }
        Formula::Not(g) => Ok(!eval_formula(g, env, resolver, budget)?),
        Formula::And(fs) => {
            let mut pending: Option<EvalError> = None;
            for g in fs {
                match eval_formula(g, env, resolver, budget) {
                    Ok(false) => return Ok(false),
                    Ok(true) => {}
                    Err(EvalError::OutOfDomain) => pending = Some(EvalError::OutOfDomain),
                    Err(e) => return Err(e),
                }
            }
            match pending {
                Some(e) => Err(e),
                None => Ok(true),
            }
        }
        Formula::Or(fs) => {
            let mut pending: Option<EvalError> = None;
            for g in fs {
                match eval_formula(g, env, resolver, budget) {
                    Ok(true) => return Ok(true),
                    Ok(false) => {}
                    Err(EvalError::OutOfDomain) => pending = Some(EvalError::OutOfDomain),
                    Err(e) => return Err(e),
                }
            }
            match pending {
                Some(e) => Err(e),
                None => Ok(false),
            }
        }
        Formula::Quant(q, binders, body) => {
            // quantification needs a domain; only available via resolver
            // shims, so plain ground evaluation rejects quantifiers unless
            // they bind nothing.
            let _ = (q, binders, body);
            Err(EvalError::SortError(String::from(
                "quantifier in ground evaluation",
            )))
        }
    }
}

/// Evaluate a formula that may quantify over the bounded domain.
fn eval_formula_bounded(
    f: &Formula,
    env: &Env,
    resolver: &dyn Resolver,
    bound: i64,
    budget: &mut EvalBudget,
) -> Result<bool, EvalError> {
    budget.tick()?;
    match f {
        Formula::Quant(q, binders, body) => {
            let absorbing = matches!(q, Quantifier::Exists);
            let mut env2 = env.clone();
            quant_loop(binders, 0, body, &mut env2, resolver, bound, absorbing, budget)
        }
        Formula::Not(g) => Ok(!eval_formula_bounded(g, env, resolver, bound, budget)?),
        Formula::And(fs) => combine_lazy(
            fs.iter()
                .map(|g| eval_formula_bounded(g, env, resolver, bound, budget)),
            false,
        ),
        Formula::Or(fs) => combine_lazy(
            fs.iter()
                .map(|g| eval_formula_bounded(g, env, resolver, bound, budget)),
            true,
        ),
        other => eval_formula(other, env, resolver, budget),
    }
}

#[allow(clippy::too_many_arguments)]
fn quant_loop(
    binders: &[(Name, Sort)],
    i: usize,
    body: &Formula,
    env: &mut Env,
    resolver: &dyn Resolver,
    bound: i64,
    absorbing: bool,
    budget: &mut EvalBudget,
) -> Result<bool, EvalError> {
    if i == binders.len() {
        return eval_formula_bounded(body, env, resolver, bound, budget);
    }
    let (x, s) = &binders[i];
    let mut pending: Option<EvalError> = None;
    for v in domain_values(s, bound) {
        env.insert(x.clone(), v);
        match quant_loop(binders, i + 1, body, env, resolver, bound, absorbing, budget) {
            Ok(b) if b == absorbing => {
                env.remove(x);
                return Ok(absorbing);
            }
            Ok(_) => {}
            Err(EvalError::OutOfDomain) => pending = Some(EvalError::OutOfDomain),
            Err(e) => {
                env.remove(x);
                return Err(e);
            }
        }
    }
    env.remove(x);
    match pending {
        Some(e) => Err(e),
        None => Ok(!absorbing),
    }
}

pub fn domain_values(sort: &Sort, bound: i64) -> Vec<Value> {
    match sort {
        Sort::Int => (-bound..=bound).map(Value::Int).collect(),
        Sort::Bool => vec![Value::Bool(false), Value::Bool(true)],
        _ => Vec::new(),
    }
}

/// Finite table for one predicate over the bounded domain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PredTable {
    sorts: Vec<Sort>,
    bound: i64,
    bits: Vec<bool>,
}

impl PredTable {
    fn constant(sorts: &[Sort], bound: i64, value: bool) -> PredTable {
        let size = sorts
            .iter()
            .map(|s| domain_size(s, bound))
            .product::<usize>();
        PredTable {
            sorts: sorts.to_vec(),
            bound,
            bits: vec![value; size],
        }
    }

    fn index(&self, args: &[Value]) -> Result<usize, EvalError> {
        if args.len() != self.sorts.len() {
            return Err(EvalError::SortError(String::from("table arity mismatch")));
        }
        let mut ix = 0usize;
        for (v, s) in args.iter().zip(&self.sorts) {
            let (k, size) = match (v, s) {
                (Value::Int(n), Sort::Int) => {
                    if *n < -self.bound || *n > self.bound {
                        return Err(EvalError::OutOfDomain);
                    }
                    ((n + self.bound) as usize, (2 * self.bound + 1) as usize)
                }
                (Value::Bool(b), Sort::Bool) => (usize::from(*b), 2),
                _ => return Err(EvalError::SortError(String::from("table sort mismatch"))),
            };
            ix = ix * size + k;
        }
        Ok(ix)
    }

    fn get(&self, args: &[Value]) -> Result<bool, EvalError> {
        Ok(self.bits[self.index(args)?])
    }

    fn len(&self) -> usize {
        self.bits.len()
    }
}

fn domain_size(sort: &Sort, bound: i64) -> usize {
    match sort {
        Sort::Int => (2 * bound + 1) as usize,
        Sort::Bool => 2,
        _ => 1,
    }
}

/// Enumerate all argument tuples of the given sorts.
pub fn domain_tuples(sorts: &[Sort], bound: i64) -> Vec<Vec<Value>> {
    let mut out = vec![Vec::new()];
    for s in sorts {
        let vals = domain_values(s, bound);
        let mut next = Vec::with_capacity(out.len() * vals.len());
        for tuple in &out {
            for v in &vals {
                let mut t = tuple.clone();
                t.push(*v);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

struct TableResolver<'a> {
    tables: &'a BTreeMap<Name, PredTable>,
    /// Closed lambdas interpreting function variables, when the evaluated
    /// program contains any (e.g. Skolemized output).
    functions: Option<&'a CandidateSolution>,
}

impl Resolver for TableResolver<'_> {
    fn pred(&self, name: &Name, args: &[Value], _: &mut EvalBudget) -> Result<bool, EvalError> {
        match self.tables.get(name) {
            Some(t) => t.get(args),
            None => Err(EvalError::UnknownPredicate(name.clone())),
        }
    }
    fn func(&self, name: &Name, args: &[Value], budget: &mut EvalBudget)
        -> Result<Value, EvalError> {
        let Some(fns) = self.functions else {
            return Err(EvalError::UnknownFunction(name.clone()));
        };
        SolutionResolver::new(fns).func(name, args, budget)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundedVerdict {
    Valid,
    Invalid,
    OutOfDomain,
}

impl fmt::Display for BoundedVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundedVerdict::Valid => write!(f, "valid"),
            BoundedVerdict::Invalid => write!(f, "invalid"),
            BoundedVerdict::OutOfDomain => write!(f, "out-of-domain"),
        }
    }
}

type Memo = BTreeMap<(usize, Vec<(Name, Vec<bool>)>), BTreeMap<Name, PredTable>>;

struct BoundedCtx<'a, 'b> {
    program: &'a MuClpProgram,
    bound: i64,
    memo: Memo,
    budget: EvalBudget<'b>,
    /// Predicates applied in each equation body (index-aligned).
    body_preds: Vec<alloc::collections::BTreeSet<Name>>,
    functions: Option<&'a CandidateSolution>,
}

/// Compute the denotation of the program with `Int` restricted to
/// `[-bound, bound]` and decide the (closed) query. The query's free
/// predicate variables must all be defined by the program.
pub fn bounded_evaluate(
    program: &MuClpProgram,
    bound: i64,
    budget: EvalBudget,
) -> Result<BoundedVerdict, EvalError> {
    bounded_evaluate_impl(program, bound, budget, None)
}

/// Like [`bounded_evaluate`] for programs containing function variables
/// (Skolemized output), interpreted by the given closed lambdas.
pub fn bounded_evaluate_with_functions(
    program: &MuClpProgram,
    bound: i64,
    budget: EvalBudget,
    functions: &CandidateSolution,
) -> Result<BoundedVerdict, EvalError> {
    bounded_evaluate_impl(program, bound, budget, Some(functions))
}

fn bounded_evaluate_impl(
    program: &MuClpProgram,
    bound: i64,
    budget: EvalBudget,
    functions: Option<&CandidateSolution>,
) -> Result<BoundedVerdict, EvalError> {
    let budget = budget.restrict_ints(bound);
    let body_preds = program
        .equations
        .iter()
        .map(|eq| crate::ast::formula_pred_apps(&eq.body))
        .collect();
    let mut ctx = BoundedCtx {
        program,
        bound,
        memo: Memo::new(),
        budget,
        body_preds,
        functions,
    };
    let tables = match ctx.sem_program(0, &BTreeMap::new()) {
        Ok(t) => t,
        Err(EvalError::OutOfDomain) => return Ok(BoundedVerdict::OutOfDomain),
        Err(e) => return Err(e),
    };
    let resolver = TableResolver {
        tables: &tables,
        functions,
    };
    match eval_formula_bounded(
        &program.query,
        &Env::new(),
        &resolver,
        bound,
        &mut ctx.budget,
    ) {
        Ok(true) => Ok(BoundedVerdict::Valid),
        Ok(false) => Ok(BoundedVerdict::Invalid),
        Err(EvalError::OutOfDomain) => Ok(BoundedVerdict::OutOfDomain),
        Err(e) => Err(e),
    }
}

impl BoundedCtx<'_, '_> {
    /// `⟦P[from..]⟧(rho)`: tables for all equations from index `from` on.
    fn sem_program(
        &mut self,
        from: usize,
        rho: &BTreeMap<Name, PredTable>,
    ) -> Result<BTreeMap<Name, PredTable>, EvalError> {
        if from >= self.program.equations.len() {
            return Ok(BTreeMap::new());
        }
        let key = (from, self.memo_key(from, rho));
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let eq = &self.program.equations[from];
        let q = self.fixpoint(from, rho)?;
        let mut rho2 = rho.clone();
        rho2.insert(eq.head.clone(), q.clone());
        let mut rest = self.sem_program(from + 1, &rho2)?;
        rest.insert(eq.head.clone(), q);
        self.memo.insert(key, rest.clone());
        Ok(rest)
    }

    /// Tables relevant to the suffix starting at `from` (the memo key).
    fn memo_key(&self, from: usize, rho: &BTreeMap<Name, PredTable>) -> Vec<(Name, Vec<bool>)> {
        rho.iter()
            .filter(|(n, _)| self.body_preds[from..].iter().any(|set| set.contains(*n)))
            .map(|(n, t)| (n.clone(), t.bits.clone()))
            .collect()
    }

    /// Kleene iteration for the fixpoint of the equation at `from`, with the
    /// suffix program re-solved for every candidate table.
    fn fixpoint(
        &mut self,
        from: usize,
        rho: &BTreeMap<Name, PredTable>,
    ) -> Result<PredTable, EvalError> {
        let eq = self.program.equations[from].clone();
        let sorts = eq.param_sorts();
        let init = match eq.kind {
            FixKind::Mu => false,
            FixKind::Nu => true,
        };
        let mut q = PredTable::constant(&sorts, self.bound, init);
        let tuples = domain_tuples(&sorts, self.bound);
        for _round in 0..=q.len() {
            let next = self.apply_functional(&eq, &q, from, rho, &tuples)?;
            if next == q {
                return Ok(q);
            }
            q = next;
        }
        // monotone iteration on a finite lattice converges within len rounds
        Ok(q)
    }

    fn apply_functional(
        &mut self,
        eq: &Equation,
        q: &PredTable,
        from: usize,
        rho: &BTreeMap<Name, PredTable>,
        tuples: &[Vec<Value>],
    ) -> Result<PredTable, EvalError> {
        let mut rho_q = rho.clone();
        rho_q.insert(eq.head.clone(), q.clone());
        let suffix = self.sem_program(from + 1, &rho_q)?;
        let mut tables = rho_q;
        for (n, t) in suffix {
            tables.insert(n, t);
        }
        let mut bits = Vec::with_capacity(q.len());
        for tuple in tuples {
            let env: Env = eq
                .params
                .iter()
                .map(|(p, _)| p.clone())
                .zip(tuple.iter().copied())
                .collect();
            let resolver = TableResolver {
                tables: &tables,
                functions: self.functions,
            };
            let v = eval_formula_bounded(&eq.body, &env, &resolver, self.bound, &mut self.budget)?;
            bits.push(v);
        }
        Ok(PredTable {
            sorts: eq.param_sorts(),
            bound: self.bound,
            bits,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_muclp;

    fn verdict(text: &str, bound: i64) -> BoundedVerdict {
        let p = parse_muclp(text).unwrap();
        bounded_evaluate(&p, bound, EvalBudget::with_steps(50_000_000)).unwrap()
    }

    #[test]
    fn equation_order_matters() {
        // nu-first: X true; mu-first: both false
        let nu_mu = "query X();\nX() =nu X() /\\ Y();\nY() =mu X() \\/ Y();\n";
        let mu_nu = "query X();\nY() =mu X() \\/ Y();\nX() =nu X() /\\ Y();\n";
        assert_eq!(verdict(nu_mu, 0), BoundedVerdict::Valid);
        assert_eq!(verdict(mu_nu, 0), BoundedVerdict::Invalid);
    }

    #[test]
    fn identity_fixpoints() {
        assert_eq!(verdict("query X();\nX() =mu X();\n", 0), BoundedVerdict::Invalid);
        assert_eq!(verdict("query X();\nX() =nu X();\n", 0), BoundedVerdict::Valid);
    }

    #[test]
    fn simple_induction() {
        // guarded recursion stays inside the box, so the table is exact:
        // N holds on [0, bound]
        let text = "query forall x: int. not (x >= 0) \\/ not (x <= 2) \\/ N(x);\nN(x: int) =mu x = 0 \\/ (x >= 1 /\\ N(x - 1));\n";
        assert_eq!(verdict(text, 3), BoundedVerdict::Valid);
        let bad = "query forall x: int. not (x >= 0) \\/ not (x <= 2) \\/ N(x);\nN(x: int) =mu x = 1 \\/ (x >= 2 /\\ N(x - 1));\n";
        assert_eq!(verdict(bad, 3), BoundedVerdict::Invalid);
    }

    #[test]
    fn out_of_domain_surfaces() {
        // x + 1 leaves the domain at the top edge and the truth value
        // genuinely depends on it
        let text = "query forall x: int. P(x);\nP(x: int) =nu x + 1 >= 0;\n";
        assert_eq!(verdict(text, 2), BoundedVerdict::OutOfDomain);
    }

    #[test]
    fn three_valued_rescue() {
        // the disjunct x <= bound decides everything even though x + 1
        // errs at the edge
        let text = "query forall x: int. x <= 2 \\/ x + 1 >= 100;";
        assert_eq!(verdict(text, 2), BoundedVerdict::Valid);
    }

    #[test]
    fn quantifier_alternation() {
        let text = "query forall x: int. exists y: int. y = 0 - x;";
        assert_eq!(verdict(text, 2), BoundedVerdict::Valid);
        let text2 = "query exists y: int. forall x: int. not (x = y);";
        assert_eq!(verdict(text2, 2), BoundedVerdict::Invalid);
    }

    #[test]
    fn cancellation() {
        let p = parse_muclp("query forall x: int. exists y: int. x + y = 0;").unwrap();
        let r = bounded_evaluate(&p, 5, EvalBudget::with_steps(10));
        assert_eq!(r, Err(EvalError::Cancelled));
    }
}
