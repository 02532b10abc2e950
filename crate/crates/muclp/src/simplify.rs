//! Light structural simplification: constant folding of ground subterms,
//! dropping of trivially true/false conjuncts and disjuncts, and unit
//! arithmetic identities. No deep normalization.

use alloc::vec::Vec;

use crate::ast::{Formula, Term};

pub fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Cmp(op, a, b) => {
            let (a, b) = (simplify_term(a), simplify_term(b));
            match (a.value(), b.value()) {
                (Some(crate::ast::Value::Int(x)), Some(crate::ast::Value::Int(y))) => {
                    if op.eval(x, y) {
                        Formula::True
                    } else {
                        Formula::False
                    }
                }
                _ => Formula::Cmp(*op, a, b),
            }
        }
        Formula::BoolTerm(t) => match simplify_term(t) {
            Term::Bool(true) => Formula::True,
            Term::Bool(false) => Formula::False,
            other => Formula::BoolTerm(other),
        },
        Formula::PredApp(x, args) => {
            Formula::PredApp(x.clone(), args.iter().map(simplify_term).collect())
        }
        Formula::Not(g) => Formula::not(simplify(g)),
        Formula::And(fs) => Formula::and(fs.iter().map(simplify).collect()),
        Formula::Or(fs) => Formula::or(fs.iter().map(simplify).collect()),
        Formula::Quant(q, binders, body) => {
            Formula::quant(*q, binders.clone(), simplify(body))
        }
    }
}

pub fn simplify_term(t: &Term) -> Term {
    match t {
        Term::Var(..) | Term::Int(_) | Term::Bool(_) => t.clone(),
        Term::Add(a, b) => {
            let (a, b) = (simplify_term(a), simplify_term(b));
            match (&a, &b) {
                (Term::Int(x), Term::Int(y)) => match x.checked_add(*y) {
                    Some(n) => Term::Int(n),
                    None => Term::add(a.clone(), b.clone()),
                },
                (Term::Int(0), _) => b,
                (_, Term::Int(0)) => a,
                _ => Term::add(a, b),
            }
        }
        Term::Sub(a, b) => {
            let (a, b) = (simplify_term(a), simplify_term(b));
            match (&a, &b) {
                (Term::Int(x), Term::Int(y)) => match x.checked_sub(*y) {
                    Some(n) => Term::Int(n),
                    None => Term::sub(a.clone(), b.clone()),
                },
                (_, Term::Int(0)) => a,
                _ => Term::sub(a, b),
            }
        }
        Term::Mul(a, b) => {
            let (a, b) = (simplify_term(a), simplify_term(b));
            match (&a, &b) {
                (Term::Int(x), Term::Int(y)) => match x.checked_mul(*y) {
                    Some(n) => Term::Int(n),
                    None => Term::mul(a.clone(), b.clone()),
                },
                (Term::Int(0), _) | (_, Term::Int(0)) => Term::Int(0),
                (Term::Int(1), _) => b,
                (_, Term::Int(1)) => a,
                _ => Term::mul(a, b),
            }
        }
        Term::Ite(c, a, b) => {
            let c = simplify(c);
            match c {
                Formula::True => simplify_term(a),
                Formula::False => simplify_term(b),
                c => Term::ite(c, simplify_term(a), simplify_term(b)),
            }
        }
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(simplify_term).collect()),
    }
}

/// Simplify a disjunction given as parts, keeping clause-level structure.
pub fn simplify_parts(fs: &[Formula]) -> Vec<Formula> {
    fs.iter().map(simplify).collect()
}
