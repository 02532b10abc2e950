//! Logical transformations: De Morgan duals, negation normal form,
//! capture-avoiding substitution of predicate/function variables, and
//! prenex conjunctive normal form.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::ast::{
    all_names, Equation, Formula, FreshNames, MuClpProgram, Name, Quantifier,
    Sort, Term,
};
use crate::pfwcsp::{Clause, Lambda, LambdaBody};

/// Marker suffix used for De Morgan dual predicate names; stripping it twice
/// makes the dual an involution on the nose.
const DUAL_MARK: &str = "!neg";

pub fn dual_name(name: &Name) -> Name {
    match name.strip_suffix(DUAL_MARK) {
        Some(stem) => String::from(stem),
        None => {
            let mut s = name.clone();
            s.push_str(DUAL_MARK);
            s
        }
    }
}

/// The De Morgan dual: every equation kind flipped, every body negated with
/// defined predicates replaced by the negation of their dual, and the query
/// negated likewise.
pub fn demorgan_dual(p: &MuClpProgram) -> MuClpProgram {
    let defined: BTreeSet<Name> = p.equations.iter().map(|eq| eq.head.clone()).collect();
    let equations = p
        .equations
        .iter()
        .map(|eq| Equation {
            head: dual_name(&eq.head),
            params: eq.params.clone(),
            kind: eq.kind.dual(),
            body: negate_with_duals(&eq.body, &defined),
        })
        .collect();
    let query = negate_with_duals(&p.query, &defined);
    MuClpProgram {
        equations,
        query,
    }
}

/// `not f` with each application of a defined predicate `X` rewritten to
/// `not X_dual`, pushed through so the result stays positivity-clean.
fn negate_with_duals(f: &Formula, defined: &BTreeSet<Name>) -> Formula {
    let renamed = rename_preds_to_dual(f, defined);
    nnf(&Formula::not(renamed))
}

fn rename_preds_to_dual(f: &Formula, defined: &BTreeSet<Name>) -> Formula {
    match f {
        Formula::PredApp(x, args) if defined.contains(x) => {
            Formula::not(Formula::PredApp(dual_name(x), args.clone()))
        }
        Formula::True | Formula::False | Formula::Cmp(..) | Formula::BoolTerm(_) => f.clone(),
        Formula::PredApp(..) => f.clone(),
        Formula::Not(g) => Formula::not(rename_preds_to_dual(g, defined)),
        Formula::And(fs) => Formula::and(
            fs.iter()
                .map(|g| rename_preds_to_dual(g, defined))
                .collect(),
        ),
        Formula::Or(fs) => Formula::or(
            fs.iter()
                .map(|g| rename_preds_to_dual(g, defined))
                .collect(),
        ),
        Formula::Quant(q, binders, body) => Formula::quant(
            *q,
            binders.clone(),
            rename_preds_to_dual(body, defined),
        ),
    }
}

/// Negation normal form: negations pushed down to atoms, double negations
/// cancelled, quantifiers dualized under negation. `ite` conditions are
/// normalized independently.
pub fn nnf(f: &Formula) -> Formula {
    nnf_signed(f, true)
}

fn nnf_signed(f: &Formula, positive: bool) -> Formula {
    match f {
        Formula::True => {
            if positive {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::False => {
            if positive {
                Formula::False
            } else {
                Formula::True
            }
        }
        Formula::Cmp(op, a, b) => {
            let (a, b) = (nnf_in_term(a), nnf_in_term(b));
            if positive {
                Formula::Cmp(*op, a, b)
            } else {
                Formula::Cmp(op.negate(), a, b)
            }
        }
        Formula::BoolTerm(t) => {
            let t = nnf_in_term(t);
            if positive {
                Formula::BoolTerm(t)
            } else {
                Formula::not(Formula::BoolTerm(t))
            }
        }
        Formula::PredApp(x, args) => {
            let app = Formula::PredApp(x.clone(), args.iter().map(nnf_in_term).collect());
            if positive {
                app
            } else {
                Formula::not(app)
            }
        }
        Formula::Not(g) => nnf_signed(g, !positive),
        Formula::And(fs) => {
            let parts = fs.iter().map(|g| nnf_signed(g, positive)).collect();
            if positive {
                Formula::and(parts)
            } else {
                Formula::or(parts)
            }
        }
        Formula::Or(fs) => {
            let parts = fs.iter().map(|g| nnf_signed(g, positive)).collect();
            if positive {
                Formula::or(parts)
            } else {
                Formula::and(parts)
            }
        }
        Formula::Quant(q, binders, body) => {
            let q = if positive { *q } else { q.dual() };
            Formula::quant(q, binders.clone(), nnf_signed(body, positive))
        }
    }
}

fn nnf_in_term(t: &Term) -> Term {
    match t {
        Term::Var(..) | Term::Int(_) | Term::Bool(_) => t.clone(),
        Term::Add(a, b) => Term::add(nnf_in_term(a), nnf_in_term(b)),
        Term::Sub(a, b) => Term::sub(nnf_in_term(a), nnf_in_term(b)),
        Term::Mul(a, b) => Term::mul(nnf_in_term(a), nnf_in_term(b)),
        Term::Ite(c, a, b) => Term::ite(nnf(c), nnf_in_term(a), nnf_in_term(b)),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(nnf_in_term).collect()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubstError {
    Arity {
        var: Name,
        expected: usize,
        got: usize,
    },
    SortMismatch {
        var: Name,
    },
}

impl fmt::Display for SubstError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubstError::Arity {
                var,
                expected,
                got,
            } => write!(f, "{var} applied to {got} arguments, expected {expected}"),
            SubstError::SortMismatch { var } => write!(f, "sort mismatch substituting {var}"),
        }
    }
}

/// Substitute term variables by terms, renaming binders that would capture
/// a free variable of a replacement.
pub fn subst_term_vars(
    f: &Formula,
    map: &BTreeMap<Name, Term>,
    fresh: &mut FreshNames,
) -> Formula {
    if map.is_empty() {
        return f.clone();
    }
    let mut avoid = BTreeSet::new();
    for t in map.values() {
        let mut bound = BTreeSet::new();
        let mut vars = Vec::new();
        crate::ast::term_free_vars(t, &mut bound, &mut vars);
        avoid.extend(vars.into_iter().map(|(n, _)| n));
    }
    subst_tv_formula(f, map, &avoid, fresh)
}

fn subst_tv_formula(
    f: &Formula,
    map: &BTreeMap<Name, Term>,
    avoid: &BTreeSet<Name>,
    fresh: &mut FreshNames,
) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Cmp(op, a, b) => Formula::Cmp(
            *op,
            subst_tv_term(a, map, avoid, fresh),
            subst_tv_term(b, map, avoid, fresh),
        ),
        Formula::BoolTerm(t) => match subst_tv_term(t, map, avoid, fresh) {
            Term::Bool(true) => Formula::True,
            Term::Bool(false) => Formula::False,
            other => Formula::BoolTerm(other),
        },
        Formula::PredApp(x, args) => Formula::PredApp(
            x.clone(),
            args.iter()
                .map(|a| subst_tv_term(a, map, avoid, fresh))
                .collect(),
        ),
        Formula::Not(g) => Formula::not(subst_tv_formula(g, map, avoid, fresh)),
        Formula::And(fs) => Formula::and(
            fs.iter()
                .map(|g| subst_tv_formula(g, map, avoid, fresh))
                .collect(),
        ),
        Formula::Or(fs) => Formula::or(
            fs.iter()
                .map(|g| subst_tv_formula(g, map, avoid, fresh))
                .collect(),
        ),
        Formula::Quant(q, binders, body) => {
            let mut map = map.clone();
            let mut renames: BTreeMap<Name, Term> = BTreeMap::new();
            let mut new_binders = Vec::new();
            for (x, s) in binders {
                map.remove(x);
                if avoid.contains(x) {
                    let fresh_name = fresh.fresh(x);
                    renames.insert(x.clone(), Term::Var(fresh_name.clone(), s.clone()));
                    new_binders.push((fresh_name, s.clone()));
                } else {
                    new_binders.push((x.clone(), s.clone()));
                }
            }
            let body = if renames.is_empty() {
                body.as_ref().clone()
            } else {
                subst_tv_formula(body, &renames, &BTreeSet::new(), fresh)
            };
            Formula::quant(*q, new_binders, subst_tv_formula(&body, &map, avoid, fresh))
        }
    }
}

fn subst_tv_term(
    t: &Term,
    map: &BTreeMap<Name, Term>,
    avoid: &BTreeSet<Name>,
    fresh: &mut FreshNames,
) -> Term {
    match t {
        Term::Var(x, _) => match map.get(x) {
            Some(rep) => rep.clone(),
            None => t.clone(),
        },
        Term::Int(_) | Term::Bool(_) => t.clone(),
        Term::Add(a, b) => Term::add(
            subst_tv_term(a, map, avoid, fresh),
            subst_tv_term(b, map, avoid, fresh),
        ),
        Term::Sub(a, b) => Term::sub(
            subst_tv_term(a, map, avoid, fresh),
            subst_tv_term(b, map, avoid, fresh),
        ),
        Term::Mul(a, b) => Term::mul(
            subst_tv_term(a, map, avoid, fresh),
            subst_tv_term(b, map, avoid, fresh),
        ),
        Term::Ite(c, a, b) => Term::ite(
            subst_tv_formula(c, map, avoid, fresh),
            subst_tv_term(a, map, avoid, fresh),
            subst_tv_term(b, map, avoid, fresh),
        ),
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter()
                .map(|a| subst_tv_term(a, map, avoid, fresh))
                .collect(),
        ),
    }
}

/// Simultaneous substitution of predicate and function variables by closed
/// lambdas, beta-reducing every application. Replacement bodies are not
/// re-substituted, so recursive substitutions like `X -> λy. X(y) ∧ W(x, y)`
/// work as expected. Quantifier binders that would shadow a free term
/// variable of a replacement body are renamed first.
pub fn substitute(
    f: &Formula,
    map: &BTreeMap<Name, Lambda>,
    fresh: &mut FreshNames,
) -> Result<Formula, SubstError> {
    let avoid = lambda_free_vars(map);
    substitute_inner(f, map, &avoid, fresh)
}

fn lambda_free_vars(map: &BTreeMap<Name, Lambda>) -> BTreeSet<Name> {
    let mut avoid = BTreeSet::new();
    for lambda in map.values() {
        let mut bound: BTreeSet<Name> = lambda.params.iter().map(|(p, _)| p.clone()).collect();
        let mut vars = Vec::new();
        match &lambda.body {
            LambdaBody::Pred(body) => {
                for (x, _) in crate::ast::formula_free_vars(body) {
                    if !bound.contains(&x) {
                        avoid.insert(x);
                    }
                }
            }
            LambdaBody::Fn(body) => {
                crate::ast::term_free_vars(body, &mut bound, &mut vars);
                avoid.extend(vars.into_iter().map(|(n, _)| n));
            }
        }
    }
    avoid
}

fn substitute_inner(
    f: &Formula,
    map: &BTreeMap<Name, Lambda>,
    avoid: &BTreeSet<Name>,
    fresh: &mut FreshNames,
) -> Result<Formula, SubstError> {
    match f {
        Formula::True | Formula::False => Ok(f.clone()),
        Formula::Cmp(op, a, b) => Ok(Formula::Cmp(
            *op,
            substitute_term_inner(a, map, avoid, fresh)?,
            substitute_term_inner(b, map, avoid, fresh)?,
        )),
        Formula::BoolTerm(t) => Ok(match substitute_term_inner(t, map, avoid, fresh)? {
            Term::Bool(true) => Formula::True,
            Term::Bool(false) => Formula::False,
            other => Formula::BoolTerm(other),
        }),
        Formula::PredApp(x, args) => {
            let args = args
                .iter()
                .map(|a| substitute_term_inner(a, map, avoid, fresh))
                .collect::<Result<Vec<_>, _>>()?;
            match map.get(x) {
                None => Ok(Formula::PredApp(x.clone(), args)),
                Some(lambda) => {
                    if lambda.params.len() != args.len() {
                        return Err(SubstError::Arity {
                            var: x.clone(),
                            expected: lambda.params.len(),
                            got: args.len(),
                        });
                    }
                    let LambdaBody::Pred(body) = &lambda.body else {
                        return Err(SubstError::SortMismatch { var: x.clone() });
                    };
                    let tv: BTreeMap<Name, Term> = lambda
                        .params
                        .iter()
                        .map(|(p, _)| p.clone())
                        .zip(args)
                        .collect();
                    Ok(subst_term_vars(body, &tv, fresh))
                }
            }
        }
        Formula::Not(g) => Ok(Formula::not(substitute_inner(g, map, avoid, fresh)?)),
        Formula::And(fs) => Ok(Formula::and(
            fs.iter()
                .map(|g| substitute_inner(g, map, avoid, fresh))
                .collect::<Result<Vec<_>, _>>()?,
        )),
        Formula::Or(fs) => Ok(Formula::or(
            fs.iter()
                .map(|g| substitute_inner(g, map, avoid, fresh))
                .collect::<Result<Vec<_>, _>>()?,
        )),
        Formula::Quant(q, binders, body) => {
            let clash: BTreeMap<Name, Term> = binders
                .iter()
                .filter(|(x, _)| avoid.contains(x))
                .map(|(x, s)| (x.clone(), Term::Var(fresh.fresh(x), s.clone())))
                .collect();
            if clash.is_empty() {
                return Ok(Formula::quant(
                    *q,
                    binders.clone(),
                    substitute_inner(body, map, avoid, fresh)?,
                ));
            }
            let binders: Vec<(Name, Sort)> = binders
                .iter()
                .map(|(x, s)| match clash.get(x) {
                    Some(Term::Var(y, _)) => (y.clone(), s.clone()),
                    _ => (x.clone(), s.clone()),
                })
                .collect();
            let body = subst_term_vars(body, &clash, fresh);
            Ok(Formula::quant(
                *q,
                binders,
                substitute_inner(&body, map, avoid, fresh)?,
            ))
        }
    }
}

pub fn substitute_term(
    t: &Term,
    map: &BTreeMap<Name, Lambda>,
    fresh: &mut FreshNames,
) -> Result<Term, SubstError> {
    let avoid = lambda_free_vars(map);
    substitute_term_inner(t, map, &avoid, fresh)
}

fn substitute_term_inner(
    t: &Term,
    map: &BTreeMap<Name, Lambda>,
    avoid: &BTreeSet<Name>,
    fresh: &mut FreshNames,
) -> Result<Term, SubstError> {
    match t {
        Term::Var(..) | Term::Int(_) | Term::Bool(_) => Ok(t.clone()),
        Term::Add(a, b) => Ok(Term::add(
            substitute_term_inner(a, map, avoid, fresh)?,
            substitute_term_inner(b, map, avoid, fresh)?,
        )),
        Term::Sub(a, b) => Ok(Term::sub(
            substitute_term_inner(a, map, avoid, fresh)?,
            substitute_term_inner(b, map, avoid, fresh)?,
        )),
        Term::Mul(a, b) => Ok(Term::mul(
            substitute_term_inner(a, map, avoid, fresh)?,
            substitute_term_inner(b, map, avoid, fresh)?,
        )),
        Term::Ite(c, a, b) => Ok(Term::ite(
            substitute_inner(c, map, avoid, fresh)?,
            substitute_term_inner(a, map, avoid, fresh)?,
            substitute_term_inner(b, map, avoid, fresh)?,
        )),
        Term::App(f, args) => {
            let args = args
                .iter()
                .map(|a| substitute_term_inner(a, map, avoid, fresh))
                .collect::<Result<Vec<_>, _>>()?;
            match map.get(f) {
                None => Ok(Term::App(f.clone(), args)),
                Some(lambda) => {
                    if lambda.params.len() != args.len() {
                        return Err(SubstError::Arity {
                            var: f.clone(),
                            expected: lambda.params.len(),
                            got: args.len(),
                        });
                    }
                    let LambdaBody::Fn(body) = &lambda.body else {
                        return Err(SubstError::SortMismatch { var: f.clone() });
                    };
                    let tv: BTreeMap<Name, Term> = lambda
                        .params
                        .iter()
                        .map(|(p, _)| p.clone())
                        .zip(args)
                        .collect();
                    Ok(subst_term_in_term(body, &tv, fresh))
                }
            }
        }
    }
}

fn subst_term_in_term(t: &Term, map: &BTreeMap<Name, Term>, fresh: &mut FreshNames) -> Term {
    let mut avoid = BTreeSet::new();
    for rep in map.values() {
        let mut bound = BTreeSet::new();
        let mut vars = Vec::new();
        crate::ast::term_free_vars(rep, &mut bound, &mut vars);
        avoid.extend(vars.into_iter().map(|(n, _)| n));
    }
    subst_tv_term(t, map, &avoid, fresh)
}

/// Term-variable substitution at the term level.
pub fn subst_term_vars_in_term(
    t: &Term,
    map: &BTreeMap<Name, Term>,
    fresh: &mut FreshNames,
) -> Term {
    subst_term_in_term(t, map, fresh)
}

/// Apply a pred/fn-variable substitution to every equation body and the
/// query of a program.
pub fn substitute_program(
    p: &MuClpProgram,
    map: &BTreeMap<Name, Lambda>,
    fresh: &mut FreshNames,
) -> Result<MuClpProgram, SubstError> {
    let equations = p
        .equations
        .iter()
        .map(|eq| {
            Ok(Equation {
                head: eq.head.clone(),
                params: eq.params.clone(),
                kind: eq.kind,
                body: substitute(&eq.body, map, fresh)?,
            })
        })
        .collect::<Result<Vec<_>, SubstError>>()?;
    Ok(MuClpProgram {
        equations,
        query: substitute(&p.query, map, fresh)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CnfError {
    /// An existential quantifier survived into positive position.
    ResidualExistential,
}

impl fmt::Display for CnfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CnfError::ResidualExistential => write!(f, "residual existential quantifier"),
        }
    }
}

/// Prenex conjunctive normal form. The input must be existential-free after
/// NNF (guaranteed for reduction output); the result is the universal
/// prefix plus a set of clauses, each restricted to the term variables it
/// actually uses.
pub fn prenex_cnf(f: &Formula) -> Result<(Vec<(Name, Sort)>, Vec<Clause>), CnfError> {
    let f = nnf(f);
    let mut prefix = Vec::new();
    let matrix = strip_quantifiers(&f, &mut prefix)?;
    let clauses = cnf_matrix(&matrix)?;
    let clause_structs = clauses
        .iter()
        .map(|lits| clause_from_literals(lits, &prefix))
        .collect();
    Ok((prefix, clause_structs))
}

fn strip_quantifiers(
    f: &Formula,
    prefix: &mut Vec<(Name, Sort)>,
) -> Result<Formula, CnfError> {
    match f {
        Formula::Quant(Quantifier::Forall, binders, body) => {
            prefix.extend(binders.iter().cloned());
            strip_quantifiers(body, prefix)
        }
        Formula::Quant(Quantifier::Exists, _, _) => Err(CnfError::ResidualExistential),
        Formula::And(fs) => {
            let parts = fs
                .iter()
                .map(|g| strip_quantifiers(g, prefix))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Formula::and(parts))
        }
        Formula::Or(fs) => {
            let parts = fs
                .iter()
                .map(|g| strip_quantifiers(g, prefix))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Formula::or(parts))
        }
        Formula::Not(g) => {
            // NNF: negation only over atoms, which contain no quantifiers.
            Ok(Formula::not(strip_quantifiers(g, prefix)?))
        }
        _ => Ok(f.clone()),
    }
}

/// Distribute disjunction over conjunction, producing a list of clauses,
/// each a list of literals.
fn cnf_matrix(f: &Formula) -> Result<Vec<Vec<Formula>>, CnfError> {
    match f {
        Formula::True => Ok(vec![]),
        Formula::False => Ok(vec![vec![]]),
        Formula::And(fs) => {
            let mut out = Vec::new();
            for g in fs {
                out.extend(cnf_matrix(g)?);
            }
            Ok(out)
        }
        Formula::Or(fs) => {
            // cross product of the clause sets of the disjuncts
            let mut acc: Vec<Vec<Formula>> = vec![vec![]];
            for g in fs {
                let gs = cnf_matrix(g)?;
                if gs.is_empty() {
                    // disjunct is true: whole disjunction is true
                    return Ok(vec![]);
                }
                let mut next = Vec::with_capacity(acc.len() * gs.len());
                for base in &acc {
                    for clause in &gs {
                        let mut merged = base.clone();
                        merged.extend(clause.iter().cloned());
                        next.push(merged);
                    }
                }
                acc = next;
            }
            Ok(acc)
        }
        Formula::Quant(Quantifier::Exists, _, _) => Err(CnfError::ResidualExistential),
        Formula::Quant(Quantifier::Forall, _, _) => {
            // inner universal under a disjunction: hoisting it is sound here
            // because all binders are globally distinct (alpha-normalized);
            // handled by the caller's strip pass, so this is unreachable in
            // practice but kept total.
            let mut prefix = Vec::new();
            let matrix = strip_quantifiers(f, &mut prefix)?;
            cnf_matrix(&matrix)
        }
        atom => Ok(vec![vec![atom.clone()]]),
    }
}

fn clause_from_literals(lits: &[Formula], prefix: &[(Name, Sort)]) -> Clause {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut constraint_parts = Vec::new();
    for lit in lits {
        match lit {
            Formula::PredApp(x, args) => pos.push((x.clone(), args.clone())),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::PredApp(x, args) => neg.push((x.clone(), args.clone())),
                _ => constraint_parts.push(lit.clone()),
            },
            _ => constraint_parts.push(lit.clone()),
        }
    }
    let constraint = Formula::or(constraint_parts);
    let mut clause = Clause {
        constraint,
        pos,
        neg,
        term_vars: Vec::new(),
    };
    let free = clause.free_term_vars();
    clause.term_vars = prefix
        .iter()
        .filter(|(x, _)| free.iter().any(|(y, _)| y == x))
        .cloned()
        .collect();
    // free variables not bound by the prefix (e.g. clause built from a
    // quantifier-free formula) still count as implicitly universal
    for (x, s) in free {
        if !clause.term_vars.iter().any(|(y, _)| *y == x) {
            clause.term_vars.push((x, s));
        }
    }
    clause
}

/// Fold a sequence of binary connectives over a slice (right-assoc), for
/// callers building formulas out of clause parts.
pub fn or_all(fs: Vec<Formula>) -> Formula {
    Formula::or(fs)
}

pub fn and_all(fs: Vec<Formula>) -> Formula {
    Formula::and(fs)
}

/// Fresh-name generator seeded past every name in the program.
pub fn fresh_for_program(p: &MuClpProgram) -> FreshNames {
    let names = all_names(p);
    FreshNames::seeded(names.iter())
}

/// Comparison helper used by tests: classify a formula as a literal.
pub fn is_literal(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::False | Formula::Cmp(..) | Formula::BoolTerm(_)
        | Formula::PredApp(..) => true,
        Formula::Not(g) => matches!(
            g.as_ref(),
            Formula::Cmp(..) | Formula::BoolTerm(_) | Formula::PredApp(..)
        ),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::CmpOp;
    use crate::ast::alpha_eq;
    use crate::parse::parse_muclp;
    use crate::print::fmt_formula_raw;

    fn b(n: &str) -> Formula {
        Formula::BoolTerm(Term::var(n, Sort::Bool))
    }

    #[test]
    fn nnf_de_morgan() {
        // not (a /\ not b) -> not a \/ b
        let f = Formula::not(Formula::and2(b("a"), Formula::not(b("b"))));
        let expect = Formula::or2(Formula::not(b("a")), b("b"));
        assert_eq!(nnf(&f), expect);
    }

    #[test]
    fn nnf_quantifier_dual() {
        let f = Formula::not(Formula::forall(
            vec![("x".into(), Sort::Int)],
            Formula::cmp(CmpOp::Ge, Term::var("x", Sort::Int), Term::Int(0)),
        ));
        let g = nnf(&f);
        let Formula::Quant(Quantifier::Exists, _, body) = &g else {
            panic!("expected exists: {}", fmt_formula_raw(&g))
        };
        assert!(matches!(body.as_ref(), Formula::Cmp(CmpOp::Lt, _, _)));
    }

    #[test]
    fn cnf_distributes() {
        // a \/ (b /\ c) -> {a \/ b, a \/ c}
        let f = Formula::or2(b("a"), Formula::and2(b("b"), b("c")));
        let (prefix, clauses) = prenex_cnf(&f).unwrap();
        assert!(prefix.is_empty());
        assert_eq!(clauses.len(), 2);
    }

    #[test]
    fn cnf_rejects_existential() {
        let f = Formula::exists(
            vec![("x".into(), Sort::Int)],
            Formula::cmp(CmpOp::Ge, Term::var("x", Sort::Int), Term::Int(0)),
        );
        assert_eq!(prenex_cnf(&f), Err(CnfError::ResidualExistential));
    }

    #[test]
    fn dual_is_involution() {
        let p = parse_muclp(
            "query forall x: int. I(x);\nI(x: int) =mu x <= 0 \\/ I(x - 1) /\\ not (x = 5);\n",
        )
        .unwrap();
        let dd = demorgan_dual(&demorgan_dual(&p));
        assert_eq!(dd.equations.len(), p.equations.len());
        for (a, b) in dd.equations.iter().zip(&p.equations) {
            assert_eq!(a.head, b.head);
            assert_eq!(a.kind, b.kind);
        }
        // bodies are logically equal; NNF both sides to compare structurally
        for (a, bq) in dd.equations.iter().zip(&p.equations) {
            assert!(
                alpha_eq(&nnf(&a.body), &nnf(&bq.body)),
                "{} vs {}",
                fmt_formula_raw(&nnf(&a.body)),
                fmt_formula_raw(&nnf(&bq.body))
            );
        }
        assert!(alpha_eq(&nnf(&dd.query), &nnf(&p.query)));
    }

    #[test]
    fn substitution_capture_avoiding() {
        // (forall y. X(y)) with X -> λz. z >= w  must not capture a y in w
        let mut fresh = FreshNames::seeded(["y".into(), "w".into()].iter());
        let f = Formula::forall(
            vec![("y".into(), Sort::Int)],
            Formula::PredApp("X".into(), vec![Term::var("y", Sort::Int)]),
        );
        let mut map = BTreeMap::new();
        map.insert(
            "X".into(),
            Lambda {
                params: vec![("z".into(), Sort::Int)],
                body: LambdaBody::Pred(Formula::cmp(
                    CmpOp::Ge,
                    Term::var("z", Sort::Int),
                    Term::var("y", Sort::Int),
                )),
            },
        );
        let g = substitute(&f, &map, &mut fresh).unwrap();
        // the binder y must have been renamed so the free y stays free
        let Formula::Quant(_, binders, body) = &g else {
            panic!()
        };
        // actually the free `y` in the lambda body refers to an outer y;
        // after substitution the bound occurrence fed to z is the binder.
        let Formula::Cmp(_, lhs, rhs) = body.as_ref() else {
            panic!("{}", fmt_formula_raw(&g))
        };
        let Term::Var(bound, _) = lhs else { panic!() };
        let Term::Var(freev, _) = rhs else { panic!() };
        assert_eq!(bound, &binders[0].0);
        assert_ne!(freev, &binders[0].0);
    }

    #[test]
    fn empty_substitution_is_identity() {
        let p = parse_muclp("query forall x: int. x >= 0 \\/ x < 0;").unwrap();
        let mut fresh = fresh_for_program(&p);
        let g = substitute(&p.query, &BTreeMap::new(), &mut fresh).unwrap();
        assert_eq!(g, p.query);
    }
}
