//! The three-step reduction from a MuCLP validity problem to a pfwCSP
//! satisfiability problem.
//!
//! 1. `elim_ex` Skolemizes positive existentials (and negative universals,
//!    which NNF has already turned into existentials) with fresh function
//!    variables applied to the enclosing universally bound variables.
//! 2. `elim_mu` turns every least-fixpoint equation into a greatest-fixpoint
//!    equation guarded by a fresh well-founded predicate variable,
//!    processing the right-most inductive equation whose suffix is entirely
//!    co-inductive, and threading the inductive predicate's arguments
//!    through the suffix equations with a Boolean validity flag.
//! 3. `elim_nu` replaces the remaining co-inductive predicates by
//!    under-approximation predicate variables and converts each equation
//!    (and the query) to clauses.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::ast::{
    all_names, Equation, FixKind, Formula, FreshNames, MuClpProgram, Name, Quantifier, Sort,
    Term,
};
use crate::pfwcsp::{Clause, Lambda, LambdaBody, PfwCsp};
use crate::transform::{nnf, prenex_cnf, substitute, substitute_program, CnfError};
use crate::wellformed::{check_wellformed, normalize_query_positivity, WfError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkolemInfo {
    pub name: Name,
    /// The existential binder this function witnesses.
    pub binder: Name,
    /// Universally bound variables in scope at the binder, in binding order.
    pub args: Vec<(Name, Sort)>,
    pub ret: Sort,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WfInfo {
    pub name: Name,
    /// The inductive equation this WF variable guards.
    pub source: Name,
    /// Parameter sorts of the source equation (the WF variable's arity is
    /// twice this).
    pub param_sorts: Vec<Sort>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgExtension {
    pub bool_param: Name,
    pub mirrored: Vec<(Name, Sort)>,
}

/// What the reduction did: Skolem functions with their binding sites, WF
/// variables in elimination order (right-most inductive equation first),
/// and the argument extensions added to each co-inductive predicate.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReductionTrace {
    pub skolem_fns: Vec<SkolemInfo>,
    pub wf_vars: Vec<WfInfo>,
    pub arg_extensions: BTreeMap<Name, Vec<ArgExtension>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReduceError {
    Wf(WfError),
    Cnf(CnfError),
    Subst(crate::transform::SubstError),
}

impl core::fmt::Display for ReduceError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ReduceError::Wf(e) => write!(f, "{e}"),
            ReduceError::Cnf(e) => write!(f, "{e}"),
            ReduceError::Subst(e) => write!(f, "{e}"),
        }
    }
}

impl From<WfError> for ReduceError {
    fn from(e: WfError) -> Self {
        ReduceError::Wf(e)
    }
}

impl From<CnfError> for ReduceError {
    fn from(e: CnfError) -> Self {
        ReduceError::Cnf(e)
    }
}

impl From<crate::transform::SubstError> for ReduceError {
    fn from(e: crate::transform::SubstError) -> Self {
        ReduceError::Subst(e)
    }
}

/// Skolemize every existential quantifier (the program is NNF-normalized
/// first, turning negative universals into existentials). Each eliminated
/// binder `x: s` under universally bound variables `ys` becomes the
/// application `F(ys)` of a fresh function variable of sort `ys -> s`.
pub fn elim_ex(p: &MuClpProgram) -> (MuClpProgram, Vec<SkolemInfo>) {
    let mut fresh = FreshNames::seeded(all_names(p).iter());
    let mut skolems = Vec::new();
    let equations = p
        .equations
        .iter()
        .map(|eq| {
            let body = nnf(&eq.body);
            let body = skolemize(&body, &eq.params.clone(), &mut fresh, &mut skolems);
            Equation {
                head: eq.head.clone(),
                params: eq.params.clone(),
                kind: eq.kind,
                body,
            }
        })
        .collect();
    let query = skolemize(&nnf(&p.query), &[], &mut fresh, &mut skolems);
    (MuClpProgram { equations, query }, skolems)
}

fn skolemize(
    f: &Formula,
    scope: &[(Name, Sort)],
    fresh: &mut FreshNames,
    skolems: &mut Vec<SkolemInfo>,
) -> Formula {
    match f {
        Formula::True
        | Formula::False
        | Formula::Cmp(..)
        | Formula::BoolTerm(_)
        | Formula::PredApp(..)
        | Formula::Not(_) => f.clone(),
        Formula::And(fs) => Formula::and(
            fs.iter()
                .map(|g| skolemize(g, scope, fresh, skolems))
                .collect(),
        ),
        Formula::Or(fs) => Formula::or(
            fs.iter()
                .map(|g| skolemize(g, scope, fresh, skolems))
                .collect(),
        ),
        Formula::Quant(Quantifier::Forall, binders, body) => {
            let mut scope2 = scope.to_vec();
            scope2.extend(binders.iter().cloned());
            Formula::forall(
                binders.clone(),
                skolemize(body, &scope2, fresh, skolems),
            )
        }
        Formula::Quant(Quantifier::Exists, binders, body) => {
            let mut map: BTreeMap<Name, Term> = BTreeMap::new();
            for (x, s) in binders {
                let name = fresh.fresh(&alloc::format!("sk_{}", crate::ast::name_stem(x)));
                let args: Vec<Term> = scope
                    .iter()
                    .map(|(y, ys)| Term::Var(y.clone(), ys.clone()))
                    .collect();
                skolems.push(SkolemInfo {
                    name: name.clone(),
                    binder: x.clone(),
                    args: scope.to_vec(),
                    ret: s.clone(),
                });
                map.insert(x.clone(), Term::App(name, args));
            }
            let body = crate::transform::subst_term_vars(body, &map, fresh);
            skolemize(&body, scope, fresh, skolems)
        }
    }
}

/// Convert every inductive equation into a guarded co-inductive one. The
/// returned program is entirely `nu`; the trace lists the generated WF
/// variables in elimination order.
pub fn elim_mu(p: &MuClpProgram) -> Result<(MuClpProgram, Vec<WfInfo>, ReductionTrace), ReduceError> {
    let mut program = p.clone();
    let mut fresh = FreshNames::seeded(all_names(p).iter());
    let mut trace = ReductionTrace::default();

    loop {
        // right-most mu whose suffix is all nu
        let k = match program
            .equations
            .iter()
            .rposition(|eq| eq.kind == FixKind::Mu)
        {
            Some(k) => k,
            None => break,
        };
        debug_assert!(program.equations[k + 1..]
            .iter()
            .all(|eq| eq.kind == FixKind::Nu));

        let target = program.equations[k].clone();

        // A least fixpoint that is never recursively re-entered (no call to
        // the head in its own body or in any suffix body) equals the
        // greatest fixpoint; convert it in place without a guard. This is
        // what keeps self-call-free equations clean, and the guard would be
        // vacuous anyway.
        let reentered = program.equations[k..]
            .iter()
            .any(|eq| crate::ast::formula_pred_apps(&eq.body).contains(&target.head));
        if !reentered {
            program.equations[k].kind = FixKind::Nu;
            continue;
        }

        let wf_name = fresh.fresh(&alloc::format!("wf_{}", crate::ast::name_stem(&target.head)));
        trace.wf_vars.push(WfInfo {
            name: wf_name.clone(),
            source: target.head.clone(),
            param_sorts: target.param_sorts(),
        });

        let target_params: Vec<Term> = target
            .params
            .iter()
            .map(|(x, s)| Term::Var(x.clone(), s.clone()))
            .collect();
        let suffix_heads: Vec<Name> = program.equations[k + 1..]
            .iter()
            .map(|eq| eq.head.clone())
            .collect();

        // fresh extended parameters (b_i, copies of the target's params)
        // per suffix equation
        let mut extensions: BTreeMap<Name, (Name, Vec<(Name, Sort)>)> = BTreeMap::new();
        for head in &suffix_heads {
            let b = fresh.fresh("b");
            let mirrored: Vec<(Name, Sort)> = target
                .params
                .iter()
                .map(|(x, s)| (fresh.fresh(crate::ast::name_stem(x)), s.clone()))
                .collect();
            trace
                .arg_extensions
                .entry(head.clone())
                .or_default()
                .push(ArgExtension {
                    bool_param: b.clone(),
                    mirrored: mirrored.clone(),
                });
            extensions.insert(head.clone(), (b, mirrored));
        }

        // sigma_X: in the target's body, guard self-recursion with the WF
        // variable and pass (true, own params) to suffix predicates
        let sigma_x = build_sigma(
            &program,
            &target.head,
            &suffix_heads,
            &extensions,
            &wf_name,
            SigmaKind::Target {
                formals: &target_params,
            },
            &mut fresh,
        );

        // sigma_0: callers to the left and the query pass (false, dummies)
        let dummies: Vec<Term> = target
            .params
            .iter()
            .map(|(_, s)| dummy_value(s))
            .collect();
        let sigma_0 = build_sigma(
            &program,
            &target.head,
            &suffix_heads,
            &extensions,
            &wf_name,
            SigmaKind::Outside { dummies: &dummies },
            &mut fresh,
        );

        let mut new_equations: Vec<Equation> = Vec::with_capacity(program.equations.len());
        for (i, eq) in program.equations.iter().enumerate() {
            if i < k {
                new_equations.push(Equation {
                    head: eq.head.clone(),
                    params: eq.params.clone(),
                    kind: eq.kind,
                    body: substitute(&eq.body, &sigma_0, &mut fresh)?,
                });
            } else if i == k {
                new_equations.push(Equation {
                    head: eq.head.clone(),
                    params: eq.params.clone(),
                    kind: FixKind::Nu,
                    body: substitute(&eq.body, &sigma_x, &mut fresh)?,
                });
            } else {
                let (b, mirrored) = &extensions[&eq.head];
                let mirrored_terms: Vec<Term> = mirrored
                    .iter()
                    .map(|(x, s)| Term::Var(x.clone(), s.clone()))
                    .collect();
                let sigma_i = build_sigma(
                    &program,
                    &target.head,
                    &suffix_heads,
                    &extensions,
                    &wf_name,
                    SigmaKind::Suffix {
                        flag: b,
                        formals: &mirrored_terms,
                    },
                    &mut fresh,
                );
                let mut params = vec![(b.clone(), Sort::Bool)];
                params.extend(mirrored.iter().cloned());
                params.extend(eq.params.iter().cloned());
                new_equations.push(Equation {
                    head: eq.head.clone(),
                    params,
                    kind: FixKind::Nu,
                    body: substitute(&eq.body, &sigma_i, &mut fresh)?,
                });
            }
        }
        program = MuClpProgram {
            equations: new_equations,
            query: substitute(&program.query, &sigma_0, &mut fresh)?,
        };
    }
    let wf = trace.wf_vars.clone();
    Ok((program, wf, trace))
}

enum SigmaKind<'a> {
    /// Inside the eliminated equation's own body.
    Target { formals: &'a [Term] },
    /// Inside a suffix (already co-inductive) equation's body.
    Suffix {
        flag: &'a Name,
        formals: &'a [Term],
    },
    /// In the query and the equations left of the target.
    Outside { dummies: &'a [Term] },
}

/// The substitution maps `target` and every suffix predicate to lambdas per
/// the elimination rule; other predicates are untouched.
fn build_sigma(
    program: &MuClpProgram,
    target: &Name,
    suffix_heads: &[Name],
    extensions: &BTreeMap<Name, (Name, Vec<(Name, Sort)>)>,
    wf_name: &Name,
    kind: SigmaKind,
    fresh: &mut FreshNames,
) -> BTreeMap<Name, Lambda> {
    let mut map = BTreeMap::new();
    let sorts = program.pred_sorts();

    // replacement for calls to the target predicate itself
    let target_sorts = &sorts[target];
    let lam_params: Vec<(Name, Sort)> = target_sorts
        .iter()
        .map(|s| (fresh.fresh("y"), s.clone()))
        .collect();
    let lam_args: Vec<Term> = lam_params
        .iter()
        .map(|(x, s)| Term::Var(x.clone(), s.clone()))
        .collect();
    let call = Formula::PredApp(target.clone(), lam_args.clone());
    let target_body = match &kind {
        SigmaKind::Target { formals } => {
            let mut wf_args: Vec<Term> = formals.to_vec();
            wf_args.extend(lam_args.iter().cloned());
            Formula::and2(call, Formula::PredApp(wf_name.clone(), wf_args))
        }
        SigmaKind::Suffix { flag, formals } => {
            let mut wf_args: Vec<Term> = formals.to_vec();
            wf_args.extend(lam_args.iter().cloned());
            Formula::and2(
                call,
                Formula::implies(
                    Formula::BoolTerm(Term::Var(flag.to_string(), Sort::Bool)),
                    Formula::PredApp(wf_name.clone(), wf_args),
                ),
            )
        }
        SigmaKind::Outside { .. } => call,
    };
    if !matches!(kind, SigmaKind::Outside { .. }) {
        map.insert(target.clone(), Lambda::pred(lam_params, target_body));
    }

    // replacements for calls to the suffix predicates
    for head in suffix_heads {
        let head_sorts = &sorts[head];
        let params: Vec<(Name, Sort)> = head_sorts
            .iter()
            .map(|s| (fresh.fresh("y"), s.clone()))
            .collect();
        let old_args: Vec<Term> = params
            .iter()
            .map(|(x, s)| Term::Var(x.clone(), s.clone()))
            .collect();
        let (flag_term, carried): (Term, Vec<Term>) = match &kind {
            SigmaKind::Target { formals } => (Term::Bool(true), formals.to_vec()),
            SigmaKind::Suffix { flag, formals } => (
                Term::Var(flag.to_string(), Sort::Bool),
                formals.to_vec(),
            ),
            SigmaKind::Outside { dummies } => (Term::Bool(false), dummies.to_vec()),
        };
        let mut new_args = vec![flag_term];
        new_args.extend(carried);
        new_args.extend(old_args);
        map.insert(
            head.clone(),
            Lambda::pred(params, Formula::PredApp(head.clone(), new_args)),
        );
        let _ = extensions;
    }
    map
}

fn dummy_value(sort: &Sort) -> Term {
    match sort {
        Sort::Int => Term::Int(0),
        Sort::Bool => Term::Bool(false),
        _ => Term::Int(0),
    }
}

/// Replace the co-inductive predicates of a `nu`-only program by
/// under-approximation predicate variables and emit clauses: the query
/// contributes `cnf(query)`, and each equation `X(xs) =nu body` contributes
/// `cnf(X(xs) => body)`.
pub fn elim_nu(p: &MuClpProgram) -> Result<Vec<Clause>, ReduceError> {
    debug_assert!(p.equations.iter().all(|eq| eq.kind == FixKind::Nu));
    let mut clauses = Vec::new();
    let (_, query_clauses) = prenex_cnf(&p.query)?;
    clauses.extend(query_clauses);
    for eq in &p.equations {
        let head_args: Vec<Term> = eq
            .params
            .iter()
            .map(|(x, s)| Term::Var(x.clone(), s.clone()))
            .collect();
        let f = Formula::implies(
            Formula::PredApp(eq.head.clone(), head_args),
            eq.body.clone(),
        );
        let (_, eq_clauses) = prenex_cnf(&f)?;
        clauses.extend(eq_clauses);
    }
    Ok(clauses)
}

/// The full reduction. The program is query-normalized and checked first;
/// the result registers the generated WF and Skolem variables.
pub fn reduce(p: &MuClpProgram) -> Result<(PfwCsp, ReductionTrace), ReduceError> {
    let p = normalize_query_positivity(p);
    check_wellformed(&p)?;
    let (p_mu, skolems) = elim_ex(&p);
    let (p_nu, _, mut trace) = elim_mu(&p_mu)?;
    trace.skolem_fns = skolems;
    let clauses = elim_nu(&p_nu)?;

    let mut csp = PfwCsp {
        clauses,
        wf_vars: trace.wf_vars.iter().map(|w| w.name.clone()).collect(),
        fn_vars: trace.skolem_fns.iter().map(|s| s.name.clone()).collect(),
        pred_sorts: p_nu.pred_sorts(),
        fn_sorts: trace
            .skolem_fns
            .iter()
            .map(|s| {
                (
                    s.name.clone(),
                    (
                        s.args.iter().map(|(_, srt)| srt.clone()).collect(),
                        s.ret.clone(),
                    ),
                )
            })
            .collect(),
    };
    for w in &trace.wf_vars {
        let mut sorts = w.param_sorts.clone();
        sorts.extend(w.param_sorts.clone());
        csp.pred_sorts.insert(w.name.clone(), sorts);
    }
    csp.check_declared()
        .map_err(|e| ReduceError::Wf(WfError::SortMismatch {
            location: String::from("reduction output"),
            pvar: String::from("-"),
            message: alloc::format!("{e}"),
        }))?;
    Ok((csp, trace))
}

/// `substitute_program` re-export convenience used by tests.
pub fn apply_to_program(
    p: &MuClpProgram,
    map: &BTreeMap<Name, Lambda>,
) -> Result<MuClpProgram, ReduceError> {
    let mut fresh = FreshNames::seeded(all_names(p).iter());
    Ok(substitute_program(p, map, &mut fresh)?)
}

/// No generated name may collide with an input name.
pub fn check_freshness(p: &MuClpProgram, trace: &ReductionTrace) -> bool {
    let input_names = all_names(p);
    let mut generated: BTreeSet<&Name> = trace.skolem_fns.iter().map(|s| &s.name).collect();
    generated.extend(trace.wf_vars.iter().map(|w| &w.name));
    for exts in trace.arg_extensions.values() {
        for ext in exts {
            generated.insert(&ext.bool_param);
            generated.extend(ext.mirrored.iter().map(|(x, _)| x));
        }
    }
    generated.iter().all(|g| !input_names.contains(*g))
}

/// Used by LambdaBody pattern checks in tests.
pub fn lambda_is_pred(l: &Lambda) -> bool {
    matches!(l.body, LambdaBody::Pred(_))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_muclp;
    use crate::pfwcsp::clause_key;
    use crate::print::print_muclp;

    /// The worked example: (X =mu Y(x-1)); (Y =mu y<=0 \/ X(y-1)),
    /// query forall x. X(x) /\ Y(x).
    fn paper_example() -> MuClpProgram {
        parse_muclp(
            "query forall x: int. X(x) /\\ Y(x);\nX(x: int) =mu Y(x - 1);\nY(y: int) =mu y <= 0 \\/ X(y - 1);\n",
        )
        .unwrap()
    }

    #[test]
    fn elim_ex_no_existentials_is_identity_modulo_nnf() {
        let p = paper_example();
        let (q, sk) = elim_ex(&p);
        assert!(sk.is_empty());
        assert_eq!(q.equations.len(), 2);
    }

    #[test]
    fn elim_ex_skolemizes_with_scope() {
        let p = parse_muclp(
            "query exists x1: int, x2: int. NI(x1, x2);\nNI(x1: int, x2: int) =nu exists z: int. NI(x1 - 1, z);\n",
        )
        .unwrap();
        let (q, sk) = elim_ex(&p);
        // two zero-arity skolems for the query, one binary for the body
        assert_eq!(sk.len(), 3);
        let arities: Vec<usize> = sk.iter().map(|s| s.args.len()).collect();
        assert!(arities.contains(&0));
        assert!(arities.contains(&2));
        // body skolem takes the equation parameters in order
        let body_sk = sk.iter().find(|s| s.args.len() == 2).unwrap();
        assert_eq!(crate::ast::name_stem(&body_sk.args[0].0), "x1");
        assert_eq!(crate::ast::name_stem(&body_sk.args[1].0), "x2");
        // no existential remains anywhere
        let all_text = print_muclp(&q);
        assert!(!all_text.contains("exists"), "{all_text}");
    }

    #[test]
    fn elim_mu_matches_worked_example() {
        let p = paper_example();
        let (p2, sk) = elim_ex(&p);
        assert!(sk.is_empty());
        let (p3, wf, _trace) = elim_mu(&p2).unwrap();
        assert_eq!(wf.len(), 1);
        assert_eq!(wf[0].source, "X");
        assert!(p3.equations.iter().all(|eq| eq.kind == FixKind::Nu));
        // X keeps its params, Y is extended to (b, x_copy, y)
        assert_eq!(p3.equations[0].params.len(), 1);
        assert_eq!(p3.equations[1].params.len(), 3);
        assert_eq!(p3.equations[1].params[0].1, Sort::Bool);

        // query: forall x. X(x) /\ Y(false, 0, x)
        let Formula::Quant(_, _, qbody) = &p3.query else {
            panic!("{}", print_muclp(&p3))
        };
        let Formula::And(parts) = qbody.as_ref() else {
            panic!("{}", print_muclp(&p3))
        };
        let Formula::PredApp(y, args) = &parts[1] else {
            panic!("{}", print_muclp(&p3))
        };
        assert_eq!(y, "Y");
        assert_eq!(args[0], Term::Bool(false));
        assert_eq!(args[1], Term::Int(0));

        // X's body: Y(true, x, x - 1) with x being X's own parameter
        let x_param = &p3.equations[0].params[0];
        let Formula::PredApp(y2, args2) = &p3.equations[0].body else {
            panic!("{}", print_muclp(&p3))
        };
        assert_eq!(y2, "Y");
        assert_eq!(args2[0], Term::Bool(true));
        assert_eq!(args2[1], Term::Var(x_param.0.clone(), Sort::Int));
        assert_eq!(
            args2[2],
            Term::sub(Term::Var(x_param.0.clone(), Sort::Int), Term::Int(1))
        );

        // Y's body: y <= 0 \/ X(y - 1) /\ (b => WF_X(x_copy, y - 1))
        let yb = &p3.equations[1].body;
        let Formula::Or(disj) = yb else {
            panic!("{}", print_muclp(&p3))
        };
        assert_eq!(disj.len(), 2);
        let Formula::And(conj) = &disj[1] else {
            panic!("{}", print_muclp(&p3))
        };
        assert!(matches!(&conj[0], Formula::PredApp(x, _) if x == "X"));
        let Formula::Or(guard) = &conj[1] else {
            panic!("{}", print_muclp(&p3))
        };
        assert!(matches!(&guard[0], Formula::Not(_)));
        assert!(matches!(&guard[1], Formula::PredApp(w, _) if *w == wf[0].name));
    }

    #[test]
    fn reduce_worked_example_five_clauses() {
        let p = paper_example();
        let (csp, trace) = reduce(&p).unwrap();
        assert_eq!(csp.clauses.len(), 5);
        assert_eq!(csp.wf_vars.len(), 1);
        assert!(csp.fn_vars.is_empty());
        assert!(check_freshness(&p, &trace));
        let keys: Vec<String> = csp.clauses.iter().map(clause_key).collect();
        // spot shape checks: one positive unit X(x), one Y(false,0,x),
        // the guarded clause mentions the wf variable
        assert!(keys.iter().any(|k| k.contains("+X(")), "{keys:?}");
        assert!(
            keys.iter()
                .any(|k| k.contains("+Y(false,0,") && !k.contains("-")),
            "{keys:?}"
        );
        let wf = csp.wf_vars.iter().next().unwrap();
        assert!(keys.iter().any(|k| k.contains(&alloc::format!("+{wf}("))));
    }

    #[test]
    fn nu_only_program_reduces_to_cochc() {
        let p = parse_muclp(
            "query forall x: int. not (x >= 0) \\/ S(x);\nS(x: int) =nu x >= 0 /\\ S(x + 1);\n",
        )
        .unwrap();
        let (csp, _) = reduce(&p).unwrap();
        assert!(csp.wf_vars.is_empty());
        assert!(csp.fn_vars.is_empty());
        assert!(matches!(
            csp.classify(),
            crate::pfwcsp::PcspClass::CoChc | crate::pfwcsp::PcspClass::LinearChc
        ));
    }

    #[test]
    fn wf_variables_occur_only_positively() {
        let p = paper_example();
        let (csp, _) = reduce(&p).unwrap();
        for clause in &csp.clauses {
            for (x, _) in &clause.neg {
                assert!(!csp.wf_vars.contains(x), "negative wf literal in {clause:?}");
            }
        }
    }

    #[test]
    fn deterministic() {
        let p = paper_example();
        let (a, _) = reduce(&p).unwrap();
        let (b, _) = reduce(&p).unwrap();
        assert_eq!(a, b);
    }
}
