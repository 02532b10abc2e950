//! Program well-formedness: distinct heads and parameters, closed bodies,
//! defined predicate variables, and the positivity condition (every defined
//! predicate occurs under an even number of negations everywhere).
//!
//! Negative occurrences of defined predicates in the *query* are permitted
//! at the input level: [`normalize_query_positivity`] rewrites them to
//! negated applications of De Morgan dual predicates and appends the dual
//! equations, which keeps the reduction total over well-formed input.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::ast::{Formula, MuClpProgram, Name, Sort, Term};
use crate::transform::{demorgan_dual, dual_name};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WfError {
    DuplicateHead(Name),
    DuplicateParam {
        head: Name,
        param: Name,
    },
    UnboundPredicate {
        location: Name,
        pvar: Name,
    },
    OpenBody {
        head: Name,
        var: Name,
    },
    OpenQuery {
        var: Name,
    },
    PositivityViolation {
        pvar: Name,
        path: String,
    },
    SortMismatch {
        location: Name,
        pvar: Name,
        message: String,
    },
}

impl core::fmt::Display for WfError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            WfError::DuplicateHead(x) => write!(f, "duplicate equation head {x}"),
            WfError::DuplicateParam { head, param } => {
                write!(f, "duplicate parameter {param} in {head}")
            }
            WfError::UnboundPredicate { location, pvar } => {
                write!(f, "predicate {pvar} used in {location} is not defined")
            }
            WfError::OpenQuery { var } => {
                write!(f, "query has free term variable {var}; queries must be closed")
            }
            WfError::OpenBody { head, var } => {
                write!(f, "body of {head} has free term variable {var}")
            }
            WfError::PositivityViolation { pvar, path } => {
                write!(f, "predicate {pvar} occurs negatively at {path}")
            }
            WfError::SortMismatch {
                location,
                pvar,
                message,
            } => write!(f, "sort mismatch applying {pvar} in {location}: {message}"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Polarity {
    Pos,
    Neg,
    Both,
}

impl Polarity {
    fn flip(self) -> Polarity {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
            Polarity::Both => Polarity::Both,
        }
    }
}

/// Check every invariant of `Equation` and `MuClpProgram`. The program must
/// already be query-normalized: defined predicates occurring negatively in
/// the query are rejected here (see [`normalize_query_positivity`]).
pub fn check_wellformed(p: &MuClpProgram) -> Result<(), WfError> {
    let mut heads = BTreeSet::new();
    for eq in &p.equations {
        if !heads.insert(eq.head.clone()) {
            return Err(WfError::DuplicateHead(eq.head.clone()));
        }
        let mut params = BTreeSet::new();
        for (x, _) in &eq.params {
            if !params.insert(x.clone()) {
                return Err(WfError::DuplicateParam {
                    head: eq.head.clone(),
                    param: x.clone(),
                });
            }
        }
    }
    let sorts = p.pred_sorts();
    let defined: BTreeSet<Name> = sorts.keys().cloned().collect();

    for eq in &p.equations {
        for pv in crate::ast::formula_pred_apps(&eq.body) {
            if !defined.contains(&pv) {
                return Err(WfError::UnboundPredicate {
                    location: eq.head.clone(),
                    pvar: pv,
                });
            }
        }
        check_sorts(&eq.body, &sorts, &eq.head)?;
        let params: BTreeSet<Name> = eq.params.iter().map(|(x, _)| x.clone()).collect();
        for (x, _) in crate::ast::formula_free_vars(&eq.body) {
            if !params.contains(&x) {
                return Err(WfError::OpenBody {
                    head: eq.head.clone(),
                    var: x,
                });
            }
        }
        check_positivity(
            &eq.body,
            Polarity::Pos,
            &defined,
            &format!("body of {}", eq.head),
        )?;
    }

    for pv in crate::ast::formula_pred_apps(&p.query) {
        if !defined.contains(&pv) {
            return Err(WfError::UnboundPredicate {
                location: String::from("query"),
                pvar: pv,
            });
        }
    }
    check_sorts(&p.query, &sorts, "query")?;
    if let Some((x, _)) = crate::ast::formula_free_vars(&p.query).into_iter().next() {
        return Err(WfError::OpenQuery { var: x });
    }
    check_positivity(&p.query, Polarity::Pos, &defined, "query")?;
    Ok(())
}

fn check_positivity(
    f: &Formula,
    pol: Polarity,
    defined: &BTreeSet<Name>,
    path: &str,
) -> Result<(), WfError> {
    match f {
        Formula::True | Formula::False => Ok(()),
        Formula::Cmp(_, a, b) => {
            check_positivity_term(a, defined, path)?;
            check_positivity_term(b, defined, path)
        }
        Formula::BoolTerm(t) => check_positivity_term(t, defined, path),
        Formula::PredApp(x, args) => {
            if defined.contains(x) && pol != Polarity::Pos {
                return Err(WfError::PositivityViolation {
                    pvar: x.clone(),
                    path: String::from(path),
                });
            }
            for a in args {
                check_positivity_term(a, defined, path)?;
            }
            Ok(())
        }
        Formula::Not(g) => check_positivity(g, pol.flip(), defined, &format!("{path}/not")),
        Formula::And(fs) => {
            for (i, g) in fs.iter().enumerate() {
                check_positivity(g, pol, defined, &format!("{path}/and[{i}]"))?;
            }
            Ok(())
        }
        Formula::Or(fs) => {
            for (i, g) in fs.iter().enumerate() {
                check_positivity(g, pol, defined, &format!("{path}/or[{i}]"))?;
            }
            Ok(())
        }
        Formula::Quant(_, _, body) => {
            check_positivity(body, pol, defined, &format!("{path}/quant"))
        }
    }
}

/// Defined predicates may not occur inside terms at all: an occurrence in
/// an `ite` condition would be of mixed polarity.
fn check_positivity_term(t: &Term, defined: &BTreeSet<Name>, path: &str) -> Result<(), WfError> {
    match t {
        Term::Var(..) | Term::Int(_) | Term::Bool(_) => Ok(()),
        Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
            check_positivity_term(a, defined, path)?;
            check_positivity_term(b, defined, path)
        }
        Term::Ite(c, a, b) => {
            check_positivity(c, Polarity::Both, defined, &format!("{path}/ite-cond"))?;
            check_positivity_term(a, defined, path)?;
            check_positivity_term(b, defined, path)
        }
        Term::App(_, args) => {
            for a in args {
                check_positivity_term(a, defined, path)?;
            }
            Ok(())
        }
    }
}

fn check_sorts(
    f: &Formula,
    sorts: &alloc::collections::BTreeMap<Name, Vec<Sort>>,
    location: &str,
) -> Result<(), WfError> {
    match f {
        Formula::True | Formula::False | Formula::Cmp(..) | Formula::BoolTerm(_) => Ok(()),
        Formula::PredApp(x, args) => {
            if let Some(want) = sorts.get(x) {
                if want.len() != args.len() {
                    return Err(WfError::SortMismatch {
                        location: String::from(location),
                        pvar: x.clone(),
                        message: format!("arity {} vs {}", args.len(), want.len()),
                    });
                }
                for (a, s) in args.iter().zip(want) {
                    let got = term_sort(a);
                    if got != *s {
                        return Err(WfError::SortMismatch {
                            location: String::from(location),
                            pvar: x.clone(),
                            message: format!("argument sort {got} vs {s}"),
                        });
                    }
                }
            }
            Ok(())
        }
        Formula::Not(g) => check_sorts(g, sorts, location),
        Formula::And(fs) | Formula::Or(fs) => {
            for g in fs {
                check_sorts(g, sorts, location)?;
            }
            Ok(())
        }
        Formula::Quant(_, _, body) => check_sorts(body, sorts, location),
    }
}

pub fn term_sort(t: &Term) -> Sort {
    match t {
        Term::Var(_, s) => s.clone(),
        Term::Int(_) => Sort::Int,
        Term::Bool(_) => Sort::Bool,
        Term::Add(..) | Term::Sub(..) | Term::Mul(..) => Sort::Int,
        Term::Ite(_, a, _) => term_sort(a),
        // function variables in this fragment return int
        Term::App(..) => Sort::Int,
    }
}

/// Rewrite negative occurrences of defined predicates in the query into
/// negated dual-predicate applications, appending the dual equations when
/// any rewrite happened. The appended equations form an independent block,
/// so placing them after the original equations preserves the semantics.
pub fn normalize_query_positivity(p: &MuClpProgram) -> MuClpProgram {
    let defined: BTreeSet<Name> = p.equations.iter().map(|eq| eq.head.clone()).collect();
    let mut used_dual = false;
    let query = rewrite_query(&p.query, Polarity::Pos, &defined, &mut used_dual);
    if !used_dual {
        return MuClpProgram {
            equations: p.equations.clone(),
            query,
        };
    }
    let dual = demorgan_dual(p);
    let mut equations = p.equations.clone();
    equations.extend(dual.equations);
    MuClpProgram { equations, query }
}

fn rewrite_query(
    f: &Formula,
    pol: Polarity,
    defined: &BTreeSet<Name>,
    used_dual: &mut bool,
) -> Formula {
    match f {
        Formula::PredApp(x, args) if defined.contains(x) && pol == Polarity::Neg => {
            *used_dual = true;
            Formula::not(Formula::PredApp(dual_name(x), args.clone()))
        }
        Formula::True
        | Formula::False
        | Formula::Cmp(..)
        | Formula::BoolTerm(_)
        | Formula::PredApp(..) => f.clone(),
        Formula::Not(g) => Formula::not(rewrite_query(g, pol.flip(), defined, used_dual)),
        Formula::And(fs) => Formula::and(
            fs.iter()
                .map(|g| rewrite_query(g, pol, defined, used_dual))
                .collect(),
        ),
        Formula::Or(fs) => Formula::or(
            fs.iter()
                .map(|g| rewrite_query(g, pol, defined, used_dual))
                .collect(),
        ),
        Formula::Quant(q, binders, body) => Formula::quant(
            *q,
            binders.clone(),
            rewrite_query(body, pol, defined, used_dual),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_muclp;

    #[test]
    fn direct_negative_self_occurrence_rejected() {
        let p = parse_muclp("query X();\nX() =mu not X();\n").unwrap();
        assert!(matches!(
            check_wellformed(&p),
            Err(WfError::PositivityViolation { .. })
        ));
    }

    #[test]
    fn double_negation_accepted() {
        let p = parse_muclp("query X();\nX() =mu not (not X());\n").unwrap();
        check_wellformed(&p).unwrap();
    }

    #[test]
    fn open_query_rejected() {
        // crafted directly: parser already rejects unbound variables
        let mut p = parse_muclp("query true;").unwrap();
        p.query = Formula::cmp(
            crate::ast::CmpOp::Ge,
            Term::var("x", Sort::Int),
            Term::Int(0),
        );
        assert!(matches!(check_wellformed(&p), Err(WfError::OpenQuery { .. })));
    }

    #[test]
    fn negative_query_occurrence_normalizes() {
        let p = parse_muclp("query not X(1);\nX(x: int) =mu x = 0 \\/ X(x - 1);\n").unwrap();
        assert!(check_wellformed(&p).is_err());
        let q = normalize_query_positivity(&p);
        check_wellformed(&q).unwrap();
        assert_eq!(q.equations.len(), 2);
        assert_eq!(q.equations[1].head, dual_name(&String::from("X")));
        assert_eq!(q.equations[1].kind, crate::ast::FixKind::Nu);
    }
}
