//! Conversion between the formula/term AST and SMT-LIB2 s-expressions.
//!
//! Internal names (which may contain `!`) are legal SMT-LIB simple symbols,
//! so no renaming is needed in this direction. The reverse direction
//! (parsing solver models and pfwCSP files) reconstructs terms from sexps,
//! including `let` bindings and nested `ite`s as produced by solvers.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::ast::{CmpOp, Formula, Name, Quantifier, Sort, Term};
use crate::sexp::Sexp;

pub fn sort_to_sexp(s: &Sort) -> Sexp {
    match s {
        Sort::Int => Sexp::atom("Int"),
        Sort::Bool | Sort::Prop => Sexp::atom("Bool"),
        Sort::Fun(..) => Sexp::atom("Int"),
    }
}

pub fn sort_from_sexp(s: &Sexp) -> Option<Sort> {
    match s.as_atom()? {
        "Int" => Some(Sort::Int),
        "Bool" => Some(Sort::Bool),
        _ => None,
    }
}

pub fn term_to_sexp(t: &Term) -> Sexp {
    match t {
        Term::Var(x, _) => Sexp::atom(x.clone()),
        Term::Int(n) => {
            if *n < 0 {
                Sexp::list(vec![Sexp::atom("-"), Sexp::atom(format!("{}", -n))])
            } else {
                Sexp::atom(format!("{n}"))
            }
        }
        Term::Bool(b) => Sexp::atom(if *b { "true" } else { "false" }),
        Term::Add(a, b) => Sexp::list(vec![Sexp::atom("+"), term_to_sexp(a), term_to_sexp(b)]),
        Term::Sub(a, b) => Sexp::list(vec![Sexp::atom("-"), term_to_sexp(a), term_to_sexp(b)]),
        Term::Mul(a, b) => Sexp::list(vec![Sexp::atom("*"), term_to_sexp(a), term_to_sexp(b)]),
        Term::Ite(c, a, b) => Sexp::list(vec![
            Sexp::atom("ite"),
            formula_to_sexp(c),
            term_to_sexp(a),
            term_to_sexp(b),
        ]),
        Term::App(f, args) => {
            if args.is_empty() {
                Sexp::atom(f.clone())
            } else {
                let mut items = vec![Sexp::atom(f.clone())];
                items.extend(args.iter().map(term_to_sexp));
                Sexp::list(items)
            }
        }
    }
}

pub fn formula_to_sexp(f: &Formula) -> Sexp {
    match f {
        Formula::True => Sexp::atom("true"),
        Formula::False => Sexp::atom("false"),
        Formula::Cmp(op, a, b) => {
            let sym = match op {
                CmpOp::Eq => "=",
                CmpOp::Ne => "distinct",
                CmpOp::Le => "<=",
                CmpOp::Lt => "<",
                CmpOp::Ge => ">=",
                CmpOp::Gt => ">",
            };
            Sexp::list(vec![Sexp::atom(sym), term_to_sexp(a), term_to_sexp(b)])
        }
        Formula::BoolTerm(t) => term_to_sexp(t),
        Formula::PredApp(x, args) => {
            if args.is_empty() {
                Sexp::atom(x.clone())
            } else {
                let mut items = vec![Sexp::atom(x.clone())];
                items.extend(args.iter().map(term_to_sexp));
                Sexp::list(items)
            }
        }
        Formula::Not(g) => Sexp::list(vec![Sexp::atom("not"), formula_to_sexp(g)]),
        Formula::And(fs) => {
            let mut items = vec![Sexp::atom("and")];
            items.extend(fs.iter().map(formula_to_sexp));
            Sexp::list(items)
        }
        Formula::Or(fs) => {
            let mut items = vec![Sexp::atom("or")];
            items.extend(fs.iter().map(formula_to_sexp));
            Sexp::list(items)
        }
        Formula::Quant(q, binders, body) => {
            let kw = match q {
                Quantifier::Forall => "forall",
                Quantifier::Exists => "exists",
            };
            let bs = binders
                .iter()
                .map(|(x, s)| Sexp::list(vec![Sexp::atom(x.clone()), sort_to_sexp(s)]))
                .collect();
            Sexp::list(vec![Sexp::atom(kw), Sexp::List(bs), formula_to_sexp(body)])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FromSexpError {
    pub message: String,
}

impl core::fmt::Display for FromSexpError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.message)
    }
}

fn err<T>(message: impl Into<String>) -> Result<T, FromSexpError> {
    Err(FromSexpError {
        message: message.into(),
    })
}

/// Context for reading expressions back: sorts of bound symbols and the
/// split between predicate and function variables.
#[derive(Debug, Clone, Default)]
pub struct ReadCtx {
    pub vars: BTreeMap<Name, Sort>,
    pub preds: BTreeMap<Name, Vec<Sort>>,
    pub fns: BTreeMap<Name, (Vec<Sort>, Sort)>,
}

impl ReadCtx {
    fn with_var(&self, name: &str, sort: Sort) -> ReadCtx {
        let mut c = self.clone();
        c.vars.insert(name.to_string(), sort);
        c
    }
}

/// Read a formula from an SMT-LIB2 expression, expanding `let`.
pub fn formula_from_sexp(s: &Sexp, ctx: &ReadCtx) -> Result<Formula, FromSexpError> {
    match expr_from_sexp(s, ctx)? {
        Expr::Formula(f) => Ok(f),
        Expr::Term(Term::Bool(b)) => Ok(if b { Formula::True } else { Formula::False }),
        Expr::Term(t) => {
            if crate::wellformed::term_sort(&t) == Sort::Bool {
                Ok(Formula::BoolTerm(t))
            } else {
                err(format!("expected a formula, got term {t:?}"))
            }
        }
    }
}

pub fn term_from_sexp(s: &Sexp, ctx: &ReadCtx) -> Result<Term, FromSexpError> {
    match expr_from_sexp(s, ctx)? {
        Expr::Term(t) => Ok(t),
        Expr::Formula(Formula::True) => Ok(Term::Bool(true)),
        Expr::Formula(Formula::False) => Ok(Term::Bool(false)),
        Expr::Formula(Formula::BoolTerm(t)) => Ok(t),
        Expr::Formula(f) => err(format!("expected a term, got formula {f:?}")),
    }
}

enum Expr {
    Term(Term),
    Formula(Formula),
}

impl Expr {
    fn into_formula(self) -> Result<Formula, FromSexpError> {
        match self {
            Expr::Formula(f) => Ok(f),
            Expr::Term(Term::Bool(b)) => Ok(if b { Formula::True } else { Formula::False }),
            Expr::Term(t) if crate::wellformed::term_sort(&t) == Sort::Bool => {
                Ok(Formula::BoolTerm(t))
            }
            Expr::Term(t) => err(format!("not a formula: {t:?}")),
        }
    }

    fn into_term(self) -> Result<Term, FromSexpError> {
        match self {
            Expr::Term(t) => Ok(t),
            Expr::Formula(Formula::True) => Ok(Term::Bool(true)),
            Expr::Formula(Formula::False) => Ok(Term::Bool(false)),
            Expr::Formula(Formula::BoolTerm(t)) => Ok(t),
            Expr::Formula(f) => err(format!("not a term: {f:?}")),
        }
    }
}

fn expr_from_sexp(s: &Sexp, ctx: &ReadCtx) -> Result<Expr, FromSexpError> {
    match s {
        Sexp::Atom(a) => {
            if let Some(n) = s.as_int() {
                return Ok(Expr::Term(Term::Int(n)));
            }
            match a.as_str() {
                "true" => Ok(Expr::Formula(Formula::True)),
                "false" => Ok(Expr::Formula(Formula::False)),
                _ => {
                    if let Some(sort) = ctx.vars.get(a) {
                        Ok(Expr::Term(Term::Var(a.clone(), sort.clone())))
                    } else if ctx.preds.get(a).is_some_and(|ps| ps.is_empty()) {
                        Ok(Expr::Formula(Formula::PredApp(a.clone(), Vec::new())))
                    } else if ctx.fns.get(a).is_some_and(|(ps, _)| ps.is_empty()) {
                        Ok(Expr::Term(Term::App(a.clone(), Vec::new())))
                    } else {
                        err(format!("unknown symbol `{a}`"))
                    }
                }
            }
        }
        Sexp::List(items) => {
            if items.is_empty() {
                return err("empty application");
            }
            if let Some(n) = s.as_int() {
                return Ok(Expr::Term(Term::Int(n)));
            }
            let head = match items[0].as_atom() {
                Some(h) => h,
                None => return err("application head must be a symbol"),
            };
            let args = &items[1..];
            match head {
                "let" => {
                    let [bindings, body] = args else {
                        return err("malformed let");
                    };
                    let Some(bindings) = bindings.as_list() else {
                        return err("malformed let bindings");
                    };
                    let mut subst: BTreeMap<Name, Sexp> = BTreeMap::new();
                    for b in bindings {
                        let Some([name, value]) = b.as_list() else {
                            return err("malformed let binding");
                        };
                        let Some(name) = name.as_atom() else {
                            return err("let binding name must be a symbol");
                        };
                        subst.insert(name.to_string(), value.clone());
                    }
                    // expand by substituting the binding sexps into the body
                    let body = substitute_sexp(body, &subst);
                    expr_from_sexp(&body, ctx)
                }
                "not" => {
                    let [a] = args else { return err("not arity") };
                    Ok(Expr::Formula(Formula::not(
                        expr_from_sexp(a, ctx)?.into_formula()?,
                    )))
                }
                "and" => Ok(Expr::Formula(Formula::and(
                    args.iter()
                        .map(|a| expr_from_sexp(a, ctx)?.into_formula())
                        .collect::<Result<Vec<_>, _>>()?,
                ))),
                "or" => Ok(Expr::Formula(Formula::or(
                    args.iter()
                        .map(|a| expr_from_sexp(a, ctx)?.into_formula())
                        .collect::<Result<Vec<_>, _>>()?,
                ))),
                "=>" => {
                    let [a, b] = args else { return err("=> arity") };
                    Ok(Expr::Formula(Formula::implies(
                        expr_from_sexp(a, ctx)?.into_formula()?,
                        expr_from_sexp(b, ctx)?.into_formula()?,
                    )))
                }
                "ite" => {
                    let [c, a, b] = args else { return err("ite arity") };
                    let c = expr_from_sexp(c, ctx)?.into_formula()?;
                    let a = expr_from_sexp(a, ctx)?;
                    match a {
                        Expr::Formula(fa) => {
                            let fb = expr_from_sexp(b, ctx)?.into_formula()?;
                            // Boolean ite as a formula
                            Ok(Expr::Formula(Formula::or2(
                                Formula::and2(c.clone(), fa),
                                Formula::and2(Formula::not(c), fb),
                            )))
                        }
                        Expr::Term(ta) => {
                            let tb = expr_from_sexp(b, ctx)?.into_term()?;
                            Ok(Expr::Term(Term::ite(c, ta, tb)))
                        }
                    }
                }
                "+" | "-" | "*" => {
                    let mut terms = args
                        .iter()
                        .map(|a| expr_from_sexp(a, ctx)?.into_term())
                        .collect::<Result<Vec<_>, _>>()?;
                    if head == "-" && terms.len() == 1 {
                        return Ok(Expr::Term(Term::sub(Term::Int(0), terms.remove(0))));
                    }
                    if terms.is_empty() {
                        return err("empty arithmetic application");
                    }
                    let mut acc = terms.remove(0);
                    for t in terms {
                        acc = match head {
                            "+" => Term::add(acc, t),
                            "-" => Term::sub(acc, t),
                            _ => Term::mul(acc, t),
                        };
                    }
                    Ok(Expr::Term(acc))
                }
                "=" | "distinct" | "<=" | "<" | ">=" | ">" => {
                    let [a, b] = args else {
                        return err(format!("{head} arity"));
                    };
                    let ea = expr_from_sexp(a, ctx)?;
                    let eb = expr_from_sexp(b, ctx)?;
                    // Boolean equality shows up in solver output; expand it.
                    if head == "=" || head == "distinct" {
                        let bool_side = |e: &Expr| match e {
                            Expr::Formula(_) => true,
                            Expr::Term(t) => crate::wellformed::term_sort(t) == Sort::Bool,
                        };
                        if bool_side(&ea) || bool_side(&eb) {
                            let fa = ea.into_formula()?;
                            let fb = eb.into_formula()?;
                            let iff = Formula::and2(
                                Formula::implies(fa.clone(), fb.clone()),
                                Formula::implies(fb, fa),
                            );
                            return Ok(Expr::Formula(if head == "=" {
                                iff
                            } else {
                                Formula::not(iff)
                            }));
                        }
                    }
                    let op = match head {
                        "=" => CmpOp::Eq,
                        "distinct" => CmpOp::Ne,
                        "<=" => CmpOp::Le,
                        "<" => CmpOp::Lt,
                        ">=" => CmpOp::Ge,
                        _ => CmpOp::Gt,
                    };
                    Ok(Expr::Formula(Formula::Cmp(
                        op,
                        ea.into_term()?,
                        eb.into_term()?,
                    )))
                }
                "forall" | "exists" => {
                    let [bindings, body] = args else {
                        return err("quantifier arity");
                    };
                    let Some(bindings) = bindings.as_list() else {
                        return err("malformed quantifier bindings");
                    };
                    let mut ctx2 = ctx.clone();
                    let mut binders = Vec::new();
                    for b in bindings {
                        let Some([name, sort]) = b.as_list() else {
                            return err("malformed binding");
                        };
                        let Some(name) = name.as_atom() else {
                            return err("binding name must be a symbol");
                        };
                        let Some(sort) = sort_from_sexp(sort) else {
                            return err("unsupported binding sort");
                        };
                        ctx2 = ctx2.with_var(name, sort.clone());
                        binders.push((name.to_string(), sort));
                    }
                    let q = if head == "forall" {
                        Quantifier::Forall
                    } else {
                        Quantifier::Exists
                    };
                    Ok(Expr::Formula(Formula::quant(
                        q,
                        binders,
                        expr_from_sexp(body, &ctx2)?.into_formula()?,
                    )))
                }
                _ => {
                    // predicate or function application
                    let terms = args
                        .iter()
                        .map(|a| expr_from_sexp(a, ctx)?.into_term())
                        .collect::<Result<Vec<_>, _>>()?;
                    if ctx.preds.contains_key(head) {
                        Ok(Expr::Formula(Formula::PredApp(head.to_string(), terms)))
                    } else if ctx.fns.contains_key(head) {
                        Ok(Expr::Term(Term::App(head.to_string(), terms)))
                    } else {
                        err(format!("unknown application head `{head}`"))
                    }
                }
            }
        }
    }
}

fn substitute_sexp(s: &Sexp, subst: &BTreeMap<Name, Sexp>) -> Sexp {
    match s {
        Sexp::Atom(a) => match subst.get(a) {
            Some(rep) => rep.clone(),
            None => s.clone(),
        },
        Sexp::List(items) => {
            // shadowing lets would need scope tracking; solver models in
            // this pipeline use fresh names per binding
            Sexp::List(items.iter().map(|i| substitute_sexp(i, subst)).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexp::parse_sexps;

    fn ctx() -> ReadCtx {
        let mut c = ReadCtx::default();
        c.vars.insert("x".into(), Sort::Int);
        c.vars.insert("b".into(), Sort::Bool);
        c.preds.insert("P".into(), vec![Sort::Int]);
        c.fns.insert("F".into(), (vec![Sort::Int], Sort::Int));
        c
    }

    #[test]
    fn round_trips_formula() {
        let f = Formula::forall(
            vec![("y".into(), Sort::Int)],
            Formula::or2(
                Formula::cmp(
                    CmpOp::Le,
                    Term::var("y", Sort::Int),
                    Term::App("F".into(), vec![Term::var("x", Sort::Int)]),
                ),
                Formula::PredApp("P".into(), vec![Term::Int(-3)]),
            ),
        );
        let printed = formula_to_sexp(&f).to_string();
        let parsed = parse_sexps(&printed).unwrap();
        let back = formula_from_sexp(&parsed[0], &ctx()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn reads_let_and_nested_ite() {
        let src = "(let ((a (+ x 1))) (ite (<= a 0) a (- a 1)))";
        let parsed = parse_sexps(src).unwrap();
        let t = term_from_sexp(&parsed[0], &ctx()).unwrap();
        match t {
            Term::Ite(..) => {}
            other => panic!("expected ite, got {other:?}"),
        }
    }

    #[test]
    fn reads_n_ary_arith() {
        let src = "(+ 1 2 x)";
        let parsed = parse_sexps(src).unwrap();
        let t = term_from_sexp(&parsed[0], &ctx()).unwrap();
        assert_eq!(
            t,
            Term::add(Term::add(Term::Int(1), Term::Int(2)), Term::var("x", Sort::Int))
        );
    }
}
