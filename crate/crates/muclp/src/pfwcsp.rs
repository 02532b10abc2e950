//! pfwCSP: predicate constraint satisfaction with function variables and
//! well-founded predicate variables.
//!
//! A clause is `constraint ∨ ⋁ pos ∨ ⋁ ¬neg` with its free term variables
//! implicitly universally quantified. The constraint part is an arbitrary
//! quantifier-free formula without predicate variables (it may contain
//! non-predicate function variables, e.g. Skolem functions).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::ast::{
    formula_fn_apps, formula_free_vars, term_fn_apps, Formula, FreshNames,
    Name, Sort, Term, Value,
};
use crate::transform::{substitute, SubstError};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Clause {
    pub constraint: Formula,
    pub pos: Vec<(Name, Vec<Term>)>,
    pub neg: Vec<(Name, Vec<Term>)>,
    pub term_vars: Vec<(Name, Sort)>,
}

impl Clause {
    /// The whole clause as one disjunction.
    pub fn to_formula(&self) -> Formula {
        let mut parts = Vec::new();
        if self.constraint != Formula::False {
            parts.push(self.constraint.clone());
        }
        for (x, args) in &self.pos {
            parts.push(Formula::PredApp(x.clone(), args.clone()));
        }
        for (x, args) in &self.neg {
            parts.push(Formula::not(Formula::PredApp(x.clone(), args.clone())));
        }
        Formula::or(parts)
    }

    /// Free term variables actually occurring, in first-occurrence order.
    pub fn free_term_vars(&self) -> Vec<(Name, Sort)> {
        formula_free_vars(&self.to_formula())
    }

    /// Recompute `term_vars` from the literals (first-occurrence order).
    pub fn close_term_vars(&mut self) {
        self.term_vars = self.free_term_vars();
    }

    pub fn is_ground(&self) -> bool {
        self.term_vars.is_empty()
    }

    /// True when the constraint part is literally `true` (the clause holds
    /// under every interpretation).
    pub fn is_trivially_true(&self) -> bool {
        self.constraint == Formula::True
    }

    /// Predicate variables occurring in the clause.
    pub fn pred_vars(&self) -> BTreeSet<Name> {
        let mut out: BTreeSet<Name> = self.pos.iter().map(|(x, _)| x.clone()).collect();
        out.extend(self.neg.iter().map(|(x, _)| x.clone()));
        out
    }

    /// Non-predicate function variables occurring anywhere in the clause.
    pub fn fn_vars(&self) -> BTreeSet<Name> {
        let mut out = formula_fn_apps(&self.constraint);
        for (_, args) in self.pos.iter().chain(&self.neg) {
            for a in args {
                term_fn_apps(a, &mut out);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcspClass {
    /// At most one positive literal per clause.
    Chc,
    /// At most one negative literal per clause.
    CoChc,
    /// Both.
    LinearChc,
    General,
}

impl fmt::Display for PcspClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PcspClass::Chc => write!(f, "CHC"),
            PcspClass::CoChc => write!(f, "coCHC"),
            PcspClass::LinearChc => write!(f, "linear CHC"),
            PcspClass::General => write!(f, "general"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PfwCsp {
    pub clauses: Vec<Clause>,
    pub wf_vars: BTreeSet<Name>,
    pub fn_vars: BTreeSet<Name>,
    /// Argument sorts of every predicate variable (including WF variables,
    /// whose full doubled arity is recorded here).
    pub pred_sorts: BTreeMap<Name, Vec<Sort>>,
    /// Argument sorts and return sort of every function variable.
    pub fn_sorts: BTreeMap<Name, (Vec<Sort>, Sort)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PfwError {
    UndeclaredPred(Name),
    UndeclaredFn(Name),
    OddWfArity(Name),
    NotCoChc(PcspClass),
    UnsupportedWf,
    UnsupportedFnVars,
    IncompleteSolution(Name),
    Subst(SubstError),
    DomainMismatch(Name),
}

impl fmt::Display for PfwError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PfwError::UndeclaredPred(x) => write!(f, "undeclared predicate variable {x}"),
            PfwError::UndeclaredFn(x) => write!(f, "undeclared function variable {x}"),
            PfwError::OddWfArity(x) => write!(f, "well-founded variable {x} has odd arity"),
            PfwError::NotCoChc(c) => write!(f, "expected a coCHC system, got {c}"),
            PfwError::UnsupportedWf => write!(f, "negation does not support WF variables"),
            PfwError::UnsupportedFnVars => {
                write!(f, "negation does not support function variables")
            }
            PfwError::IncompleteSolution(x) => write!(f, "solution does not cover {x}"),
            PfwError::Subst(e) => write!(f, "{e}"),
            PfwError::DomainMismatch(x) => write!(f, "substitution domain mismatch on {x}"),
        }
    }
}

impl From<SubstError> for PfwError {
    fn from(e: SubstError) -> Self {
        PfwError::Subst(e)
    }
}

impl PfwCsp {
    /// Every free variable needing a solution entry.
    pub fn all_vars(&self) -> BTreeSet<Name> {
        let mut out: BTreeSet<Name> = self.pred_sorts.keys().cloned().collect();
        out.extend(self.fn_sorts.keys().cloned());
        out
    }

    pub fn check_declared(&self) -> Result<(), PfwError> {
        for c in &self.clauses {
            for x in c.pred_vars() {
                if !self.pred_sorts.contains_key(&x) {
                    return Err(PfwError::UndeclaredPred(x));
                }
            }
            for g in c.fn_vars() {
                if !self.fn_sorts.contains_key(&g) {
                    return Err(PfwError::UndeclaredFn(g));
                }
            }
        }
        for w in &self.wf_vars {
            let Some(sorts) = self.pred_sorts.get(w) else {
                return Err(PfwError::UndeclaredPred(w.clone()));
            };
            if sorts.len() % 2 != 0 {
                return Err(PfwError::OddWfArity(w.clone()));
            }
            let half = sorts.len() / 2;
            if sorts[..half] != sorts[half..] {
                return Err(PfwError::OddWfArity(w.clone()));
            }
        }
        Ok(())
    }

    /// The tightest applicable classification.
    pub fn classify(&self) -> PcspClass {
        let chc = self.clauses.iter().all(|c| c.pos.len() <= 1);
        let cochc = self.clauses.iter().all(|c| c.neg.len() <= 1);
        match (chc, cochc) {
            (true, true) => PcspClass::LinearChc,
            (true, false) => PcspClass::Chc,
            (false, true) => PcspClass::CoChc,
            (false, false) => PcspClass::General,
        }
    }

    /// Reduce a coCHC system to an equi-satisfiable CHC system by flipping
    /// every literal to its negated dual predicate.
    pub fn negate_cochc_to_chc(&self) -> Result<PfwCsp, PfwError> {
        match self.classify() {
            PcspClass::CoChc | PcspClass::LinearChc => {}
            other => return Err(PfwError::NotCoChc(other)),
        }
        if !self.wf_vars.is_empty() {
            return Err(PfwError::UnsupportedWf);
        }
        if !self.fn_vars.is_empty() {
            return Err(PfwError::UnsupportedFnVars);
        }
        let rename = crate::transform::dual_name;
        let clauses = self
            .clauses
            .iter()
            .map(|c| {
                let mut out = Clause {
                    constraint: c.constraint.clone(),
                    pos: c
                        .neg
                        .iter()
                        .map(|(x, args)| (rename(x), args.clone()))
                        .collect(),
                    neg: c
                        .pos
                        .iter()
                        .map(|(x, args)| (rename(x), args.clone()))
                        .collect(),
                    term_vars: c.term_vars.clone(),
                };
                out.close_term_vars();
                out
            })
            .collect();
        Ok(PfwCsp {
            clauses,
            wf_vars: BTreeSet::new(),
            fn_vars: BTreeSet::new(),
            pred_sorts: self
                .pred_sorts
                .iter()
                .map(|(x, s)| (rename(x), s.clone()))
                .collect(),
            fn_sorts: BTreeMap::new(),
        })
    }

    /// Apply a candidate solution: one universally quantified, beta-reduced
    /// formula per clause, with no residual function/predicate variables.
    pub fn apply_solution(&self, solution: &CandidateSolution) -> Result<Vec<Formula>, PfwError> {
        let mut needed: BTreeSet<Name> = BTreeSet::new();
        for c in &self.clauses {
            needed.extend(c.pred_vars());
            needed.extend(c.fn_vars());
        }
        for x in &needed {
            if !solution.0.contains_key(x) {
                return Err(PfwError::IncompleteSolution(x.clone()));
            }
        }
        let mut fresh = FreshNames::seeded(
            solution
                .0
                .keys()
                .chain(self.pred_sorts.keys())
                .chain(self.fn_sorts.keys()),
        );
        self.clauses
            .iter()
            .map(|c| {
                let f = substitute(&c.to_formula(), &solution.0, &mut fresh)?;
                Ok(Formula::forall(c.term_vars.clone(), f))
            })
            .collect()
    }
}

/// Closed lambda abstraction: the body's only free term variables are the
/// parameters, and it contains no predicate/function variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lambda {
    pub params: Vec<(Name, Sort)>,
    pub body: LambdaBody,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LambdaBody {
    Pred(Formula),
    Fn(Term),
}

impl Lambda {
    pub fn pred(params: Vec<(Name, Sort)>, body: Formula) -> Lambda {
        Lambda {
            params,
            body: LambdaBody::Pred(body),
        }
    }

    pub fn func(params: Vec<(Name, Sort)>, body: Term) -> Lambda {
        Lambda {
            params,
            body: LambdaBody::Fn(body),
        }
    }
}

/// A finite map from predicate/function variables to closed lambdas.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CandidateSolution(pub BTreeMap<Name, Lambda>);

impl CandidateSolution {
    pub fn get(&self, name: &str) -> Option<&Lambda> {
        self.0.get(name)
    }

    pub fn insert(&mut self, name: impl Into<Name>, lambda: Lambda) {
        self.0.insert(name.into(), lambda);
    }
}

/// A ground clause obtained from a source clause by a recorded term
/// substitution.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExampleInstance {
    pub clause: Clause,
    pub source: usize,
    pub theta: BTreeMap<Name, Value>,
}

/// Instantiate a clause's term variables with values and constant-fold.
pub fn instantiate(
    clause: &Clause,
    source: usize,
    theta: &BTreeMap<Name, Value>,
) -> Result<ExampleInstance, PfwError> {
    for (x, _) in &clause.term_vars {
        if !theta.contains_key(x) {
            return Err(PfwError::DomainMismatch(x.clone()));
        }
    }
    if theta.len() != clause.term_vars.len() {
        // extra bindings indicate the caller mixed up clauses
        for x in theta.keys() {
            if !clause.term_vars.iter().any(|(y, _)| y == x) {
                return Err(PfwError::DomainMismatch(x.clone()));
            }
        }
    }
    let tv: BTreeMap<Name, Term> = theta
        .iter()
        .map(|(x, v)| (x.clone(), v.as_term()))
        .collect();
    let mut fresh = FreshNames::new();
    let fold_args = |args: &Vec<Term>, fresh: &mut FreshNames| -> Vec<Term> {
        args.iter()
            .map(|a| {
                crate::simplify::simplify_term(&crate::transform::subst_term_vars_in_term(
                    a, &tv, fresh,
                ))
            })
            .collect()
    };
    let constraint = crate::simplify::simplify(&crate::transform::subst_term_vars(
        &clause.constraint,
        &tv,
        &mut fresh,
    ));
    let instance = Clause {
        constraint,
        pos: clause
            .pos
            .iter()
            .map(|(x, args)| (x.clone(), fold_args(args, &mut fresh)))
            .collect(),
        neg: clause
            .neg
            .iter()
            .map(|(x, args)| (x.clone(), fold_args(args, &mut fresh)))
            .collect(),
        term_vars: Vec::new(),
    };
    debug_assert!(instance.free_term_vars().is_empty());
    Ok(ExampleInstance {
        clause: instance,
        source,
        theta: theta.clone(),
    })
}

/// `solution(clause)` for a ground clause, evaluated to a truth value.
/// The solution must cover every predicate/function variable.
pub fn eval_ground_clause(
    clause: &Clause,
    solution: &CandidateSolution,
) -> Result<bool, crate::eval::EvalError> {
    let env = BTreeMap::new();
    crate::eval::eval_formula(
        &clause.to_formula(),
        &env,
        &crate::eval::SolutionResolver::new(solution),
        &mut crate::eval::EvalBudget::unlimited(),
    )
    .map(|v| v)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PfwParseError {
    Sexp(crate::sexp::SexpError),
    Read(crate::smtlib::FromSexpError),
    Malformed(String),
}

impl fmt::Display for PfwParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PfwParseError::Sexp(e) => write!(f, "{e}"),
            PfwParseError::Read(e) => write!(f, "{e}"),
            PfwParseError::Malformed(m) => write!(f, "{m}"),
        }
    }
}

/// Parse the pfwCSP file format: SMT-LIB2 surface extended with
/// `declare-wf`.
///
/// ```text
/// (declare-fun P (Int Int) Bool)    ; predicate variable
/// (declare-wf  W (Int Int))         ; WF variable over pairs; arity doubles
/// (declare-fun F (Int) Int)         ; function variable
/// (assert (forall ((x Int)) <qf-formula>))
/// (check-sat)
/// ```
pub fn parse_pfwcsp(text: &str) -> Result<PfwCsp, PfwParseError> {
    let sexps = crate::sexp::parse_sexps(text).map_err(PfwParseError::Sexp)?;
    let mut csp = PfwCsp::default();
    let mut asserts = Vec::new();
    for s in &sexps {
        let Some(items) = s.as_list() else {
            return Err(PfwParseError::Malformed(format!("stray atom {s}")));
        };
        let Some(head) = items.first().and_then(|h| h.as_atom()) else {
            return Err(PfwParseError::Malformed(format!("malformed command {s}")));
        };
        match head {
            "declare-fun" => {
                let [_, name, args, ret] = items else {
                    return Err(PfwParseError::Malformed(format!("malformed {s}")));
                };
                let Some(name) = name.as_atom() else {
                    return Err(PfwParseError::Malformed(format!("malformed name in {s}")));
                };
                let Some(args) = args.as_list() else {
                    return Err(PfwParseError::Malformed(format!("malformed args in {s}")));
                };
                let arg_sorts = args
                    .iter()
                    .map(|a| {
                        crate::smtlib::sort_from_sexp(a).ok_or_else(|| {
                            PfwParseError::Malformed(format!("bad sort in {s}"))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                match ret.as_atom() {
                    Some("Bool") => {
                        csp.pred_sorts.insert(name.into(), arg_sorts);
                    }
                    Some("Int") => {
                        csp.fn_vars.insert(name.into());
                        csp.fn_sorts.insert(name.into(), (arg_sorts, Sort::Int));
                    }
                    _ => {
                        return Err(PfwParseError::Malformed(format!(
                            "unsupported return sort in {s}"
                        )))
                    }
                }
            }
            "declare-wf" => {
                let [_, name, args] = items else {
                    return Err(PfwParseError::Malformed(format!("malformed {s}")));
                };
                let Some(name) = name.as_atom() else {
                    return Err(PfwParseError::Malformed(format!("malformed name in {s}")));
                };
                let Some(args) = args.as_list() else {
                    return Err(PfwParseError::Malformed(format!("malformed args in {s}")));
                };
                let half = args
                    .iter()
                    .map(|a| {
                        crate::smtlib::sort_from_sexp(a).ok_or_else(|| {
                            PfwParseError::Malformed(format!("bad sort in {s}"))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let mut full = half.clone();
                full.extend(half);
                csp.wf_vars.insert(name.into());
                csp.pred_sorts.insert(name.into(), full);
            }
            "assert" => {
                let [_, body] = items else {
                    return Err(PfwParseError::Malformed(format!("malformed {s}")));
                };
                asserts.push(body.clone());
            }
            "check-sat" | "set-logic" | "set-option" | "set-info" | "exit" | "get-model" => {}
            other => {
                return Err(PfwParseError::Malformed(format!(
                    "unsupported command {other}"
                )))
            }
        }
    }
    for body in asserts {
        let ctx = crate::smtlib::ReadCtx {
            vars: BTreeMap::new(),
            preds: csp.pred_sorts.clone(),
            fns: csp.fn_sorts.clone(),
        };
        let f = crate::smtlib::formula_from_sexp(&body, &ctx).map_err(PfwParseError::Read)?;
        let (_, clauses) = crate::transform::prenex_cnf(&f)
            .map_err(|e| PfwParseError::Malformed(alloc::format!("{e}")))?;
        csp.clauses.extend(clauses);
    }
    csp.check_declared()
        .map_err(|e| PfwParseError::Malformed(alloc::format!("{e}")))?;
    Ok(csp)
}

/// Print in the pfwCSP file format; `parse_pfwcsp` reads it back exactly.
pub fn print_pfwcsp(csp: &PfwCsp) -> String {
    use crate::smtlib::{formula_to_sexp, sort_to_sexp};
    let mut out = String::new();
    for (name, sorts) in &csp.pred_sorts {
        if csp.wf_vars.contains(name) {
            let half = sorts.len() / 2;
            let args = sorts[..half]
                .iter()
                .map(|s| sort_to_sexp(s).to_string())
                .collect::<Vec<_>>()
                .join(" ");
            out.push_str(&format!("(declare-wf {name} ({args}))\n"));
        } else {
            let args = sorts
                .iter()
                .map(|s| sort_to_sexp(s).to_string())
                .collect::<Vec<_>>()
                .join(" ");
            out.push_str(&format!("(declare-fun {name} ({args}) Bool)\n"));
        }
    }
    for (name, (args, _)) in &csp.fn_sorts {
        let args = args
            .iter()
            .map(|s| sort_to_sexp(s).to_string())
            .collect::<Vec<_>>()
            .join(" ");
        out.push_str(&format!("(declare-fun {name} ({args}) Int)\n"));
    }
    for clause in &csp.clauses {
        let body = formula_to_sexp(&clause.to_formula());
        if clause.term_vars.is_empty() {
            out.push_str(&format!("(assert {body})\n"));
        } else {
            let binders = clause
                .term_vars
                .iter()
                .map(|(x, s)| format!("({x} {})", sort_to_sexp(s)))
                .collect::<Vec<_>>()
                .join(" ");
            out.push_str(&format!("(assert (forall ({binders}) {body}))\n"));
        }
    }
    out.push_str("(check-sat)\n");
    out
}

/// Canonical single-line rendering used for duplicate detection.
pub fn clause_key(c: &Clause) -> String {
    use crate::print::{fmt_formula_raw, fmt_term_raw};
    let mut s = String::new();
    s.push_str(&fmt_formula_raw(&c.constraint));
    for (x, args) in &c.pos {
        s.push_str(&format!(
            " +{x}({})",
            args.iter().map(fmt_term_raw).collect::<Vec<_>>().join(",")
        ));
    }
    for (x, args) in &c.neg {
        s.push_str(&format!(
            " -{x}({})",
            args.iter().map(fmt_term_raw).collect::<Vec<_>>().join(",")
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::CmpOp;

    fn pred_app_clause() -> Clause {
        // not X(0)
        Clause {
            constraint: Formula::False,
            pos: Vec::new(),
            neg: alloc::vec![("X".into(), alloc::vec![Term::Int(0)])],
            term_vars: Vec::new(),
        }
    }

    #[test]
    fn classify_tightest() {
        let mut csp = PfwCsp::default();
        csp.pred_sorts.insert("X".into(), alloc::vec![Sort::Int]);
        csp.clauses.push(pred_app_clause());
        assert_eq!(csp.classify(), PcspClass::LinearChc);

        // two positive literals -> not CHC
        csp.clauses.push(Clause {
            constraint: Formula::False,
            pos: alloc::vec![
                ("X".into(), alloc::vec![Term::Int(0)]),
                ("X".into(), alloc::vec![Term::Int(1)])
            ],
            neg: Vec::new(),
            term_vars: Vec::new(),
        });
        assert_eq!(csp.classify(), PcspClass::CoChc);

        // and two negative literals as well -> general
        csp.clauses.push(Clause {
            constraint: Formula::False,
            pos: Vec::new(),
            neg: alloc::vec![
                ("X".into(), alloc::vec![Term::Int(0)]),
                ("X".into(), alloc::vec![Term::Int(1)])
            ],
            term_vars: Vec::new(),
        });
        assert_eq!(csp.classify(), PcspClass::General);
    }

    #[test]
    fn negate_flips_literals() {
        let mut csp = PfwCsp::default();
        csp.pred_sorts.insert("X".into(), alloc::vec![Sort::Int]);
        // { X(0), not X(1) \/ X(2) }
        csp.clauses.push(Clause {
            constraint: Formula::False,
            pos: alloc::vec![("X".into(), alloc::vec![Term::Int(0)])],
            neg: Vec::new(),
            term_vars: Vec::new(),
        });
        csp.clauses.push(Clause {
            constraint: Formula::False,
            pos: alloc::vec![("X".into(), alloc::vec![Term::Int(2)])],
            neg: alloc::vec![("X".into(), alloc::vec![Term::Int(1)])],
            term_vars: Vec::new(),
        });
        let neg = csp.negate_cochc_to_chc().unwrap();
        assert_eq!(neg.classify(), PcspClass::LinearChc);
        assert_eq!(neg.clauses[0].neg.len(), 1);
        assert_eq!(neg.clauses[0].pos.len(), 0);
        let back = neg.negate_cochc_to_chc().unwrap();
        assert_eq!(back, csp);
    }

    #[test]
    fn instantiate_folds_constants() {
        // clause: x + 1 >= 0 \/ X(x + 1)
        let x = Term::var("x", Sort::Int);
        let clause = Clause {
            constraint: Formula::cmp(CmpOp::Ge, Term::add(x.clone(), Term::Int(1)), Term::Int(0)),
            pos: alloc::vec![("X".into(), alloc::vec![Term::add(x, Term::Int(1))])],
            neg: Vec::new(),
            term_vars: alloc::vec![("x".into(), Sort::Int)],
        };
        let mut theta = BTreeMap::new();
        theta.insert("x".into(), Value::Int(-1));
        let inst = instantiate(&clause, 0, &theta).unwrap();
        assert_eq!(inst.clause.pos[0].1[0], Term::Int(0));
        // -1 + 1 >= 0 folds to true, so the instance is trivially true
        assert!(inst.clause.is_trivially_true());
    }

    #[test]
    fn instantiate_ground_identity() {
        let clause = pred_app_clause();
        let inst = instantiate(&clause, 3, &BTreeMap::new()).unwrap();
        assert_eq!(inst.clause, clause);
        assert_eq!(inst.source, 3);
    }
}
