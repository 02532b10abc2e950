//! Sorted first-order AST for MuCLP formulas, terms, and equation systems.
//!
//! Programs are kept alpha-normalized after parsing: every binder (equation
//! parameter or quantifier) introduces a globally unique name, so the
//! transformation passes never have to worry about accidental capture.
//! Internal fresh names contain a `!` separator, which the concrete grammar
//! cannot produce, so fresh names never collide with user names.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub type Name = String;

/// Sorts of the two-theory fragment: integers, Booleans, the proposition
/// sort for formulas, and function sorts for predicate/function variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Int,
    Bool,
    Prop,
    Fun(Vec<Sort>, Box<Sort>),
}

impl Sort {
    pub fn pred(args: Vec<Sort>) -> Sort {
        Sort::Fun(args, Box::new(Sort::Prop))
    }

    pub fn is_base(&self) -> bool {
        matches!(self, Sort::Int | Sort::Bool)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Int => write!(f, "int"),
            Sort::Bool => write!(f, "bool"),
            Sort::Prop => write!(f, "prop"),
            Sort::Fun(args, ret) => {
                write!(f, "(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ") -> {ret}")
            }
        }
    }
}

/// Ground values of the base sorts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
}

impl Value {
    pub fn sort(&self) -> Sort {
        match self {
            Value::Int(_) => Sort::Int,
            Value::Bool(_) => Sort::Bool,
        }
    }

    pub fn as_term(&self) -> Term {
        match self {
            Value::Int(n) => Term::Int(*n),
            Value::Bool(b) => Term::Bool(*b),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Terms: variables, literals, linear arithmetic, `ite`, and applications of
/// function variables (Skolem functions and declared function variables).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Name, Sort),
    Int(i64),
    Bool(bool),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Ite(Box<Formula>, Box<Term>, Box<Term>),
    /// Function-variable application. Zero arity encodes a constant to be
    /// synthesized.
    App(Name, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<Name>, sort: Sort) -> Term {
        Term::Var(name.into(), sort)
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn ite(c: Formula, t: Term, e: Term) -> Term {
        Term::Ite(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn value(&self) -> Option<Value> {
        match self {
            Term::Int(n) => Some(Value::Int(*n)),
            Term::Bool(b) => Some(Value::Bool(*b)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Le,
    Lt,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Lt => CmpOp::Ge,
        }
    }

    pub fn eval(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Le => a <= b,
            CmpOp::Lt => a < b,
            CmpOp::Ge => a >= b,
            CmpOp::Gt => a > b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn dual(self) -> Quantifier {
        match self {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        }
    }
}

/// Formulas. `And`/`Or` are kept flattened n-ary; the smart constructors
/// below maintain that invariant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Cmp(CmpOp, Term, Term),
    /// A Boolean-sorted term (a variable or literal) used as an atom.
    BoolTerm(Term),
    /// Predicate-variable application.
    PredApp(Name, Vec<Term>),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Quant(Quantifier, Vec<(Name, Sort)>, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn and(fs: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for f in fs {
            match f {
                Formula::True => {}
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        if out.iter().any(|f| matches!(f, Formula::False)) {
            return Formula::False;
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    pub fn or(fs: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for f in fs {
            match f {
                Formula::False => {}
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        if out.iter().any(|f| matches!(f, Formula::True)) {
            return Formula::True;
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    pub fn and2(a: Formula, b: Formula) -> Formula {
        Formula::and(vec![a, b])
    }

    pub fn or2(a: Formula, b: Formula) -> Formula {
        Formula::or(vec![a, b])
    }

    /// `a => b` desugared to `not a \/ b`.
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or2(Formula::not(a), b)
    }

    pub fn forall(binders: Vec<(Name, Sort)>, body: Formula) -> Formula {
        Formula::quant(Quantifier::Forall, binders, body)
    }

    pub fn exists(binders: Vec<(Name, Sort)>, body: Formula) -> Formula {
        Formula::quant(Quantifier::Exists, binders, body)
    }

    pub fn quant(q: Quantifier, binders: Vec<(Name, Sort)>, body: Formula) -> Formula {
        if binders.is_empty() {
            body
        } else {
            Formula::Quant(q, binders, Box::new(body))
        }
    }

    pub fn cmp(op: CmpOp, a: Term, b: Term) -> Formula {
        Formula::Cmp(op, a, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FixKind {
    Mu,
    Nu,
}

impl FixKind {
    pub fn dual(self) -> FixKind {
        match self {
            FixKind::Mu => FixKind::Nu,
            FixKind::Nu => FixKind::Mu,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            FixKind::Mu => "=mu",
            FixKind::Nu => "=nu",
        }
    }
}

/// One (co-)recursive equation `X(params) =mu/=nu body`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub head: Name,
    pub params: Vec<(Name, Sort)>,
    pub kind: FixKind,
    pub body: Formula,
}

impl Equation {
    pub fn param_sorts(&self) -> Vec<Sort> {
        self.params.iter().map(|(_, s)| s.clone()).collect()
    }
}

/// An ordered sequence of equations plus a query formula. Equation order is
/// semantically significant: earlier equations bind outer fixpoints.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MuClpProgram {
    pub equations: Vec<Equation>,
    pub query: Formula,
}

impl Default for Formula {
    fn default() -> Self {
        Formula::True
    }
}

impl MuClpProgram {
    pub fn new(equations: Vec<Equation>, query: Formula) -> Self {
        MuClpProgram { equations, query }
    }

    /// Argument sorts of every defined predicate.
    pub fn pred_sorts(&self) -> BTreeMap<Name, Vec<Sort>> {
        self.equations
            .iter()
            .map(|eq| (eq.head.clone(), eq.param_sorts()))
            .collect()
    }

    pub fn equation(&self, head: &str) -> Option<&Equation> {
        self.equations.iter().find(|eq| eq.head == head)
    }
}

/// Deterministic source of globally fresh names. Fresh names are
/// `base!<n>`; `!` is not a grammar character, so they never collide with
/// parsed names, and the counter is seeded past every `!`-suffix already in
/// use.
#[derive(Debug, Clone, Default)]
pub struct FreshNames {
    next: u64,
}

impl FreshNames {
    pub fn new() -> Self {
        FreshNames { next: 0 }
    }

    /// A generator whose output never collides with names in `used`.
    pub fn seeded<'a>(used: impl IntoIterator<Item = &'a Name>) -> Self {
        let mut max = 0;
        for name in used {
            if let Some(ix) = name.rfind('!') {
                if let Ok(n) = name[ix + 1..].parse::<u64>() {
                    max = max.max(n + 1);
                }
            }
        }
        FreshNames { next: max }
    }

    pub fn fresh(&mut self, base: &str) -> Name {
        let stem = match base.find('!') {
            Some(ix) => &base[..ix],
            None => base,
        };
        let n = self.next;
        self.next += 1;
        format!("{stem}!{n}")
    }
}

/// The original user-facing stem of a (possibly freshened) name.
pub fn name_stem(name: &str) -> &str {
    match name.find('!') {
        Some(ix) => &name[..ix],
        None => name,
    }
}

/// Every name occurring anywhere in the program (variables, predicates,
/// function applications, binders).
pub fn all_names(program: &MuClpProgram) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    let visit_formula = |f: &Formula, out: &mut BTreeSet<Name>| collect_formula_names(f, out);
    for eq in &program.equations {
        out.insert(eq.head.clone());
        for (p, _) in &eq.params {
            out.insert(p.clone());
        }
        visit_formula(&eq.body, &mut out);
    }
    visit_formula(&program.query, &mut out);
    out
}

fn collect_term_names(t: &Term, out: &mut BTreeSet<Name>) {
    match t {
        Term::Var(x, _) => {
            out.insert(x.clone());
        }
        Term::Int(_) | Term::Bool(_) => {}
        Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
            collect_term_names(a, out);
            collect_term_names(b, out);
        }
        Term::Ite(c, a, b) => {
            collect_formula_names(c, out);
            collect_term_names(a, out);
            collect_term_names(b, out);
        }
        Term::App(f, args) => {
            out.insert(f.clone());
            for a in args {
                collect_term_names(a, out);
            }
        }
    }
}

fn collect_formula_names(f: &Formula, out: &mut BTreeSet<Name>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Cmp(_, a, b) => {
            collect_term_names(a, out);
            collect_term_names(b, out);
        }
        Formula::BoolTerm(t) => collect_term_names(t, out),
        Formula::PredApp(p, args) => {
            out.insert(p.clone());
            for a in args {
                collect_term_names(a, out);
            }
        }
        Formula::Not(g) => collect_formula_names(g, out),
        Formula::And(fs) | Formula::Or(fs) => {
            for g in fs {
                collect_formula_names(g, out);
            }
        }
        Formula::Quant(_, binders, body) => {
            for (x, _) in binders {
                out.insert(x.clone());
            }
            collect_formula_names(body, out);
        }
    }
}

/// Free term variables of a term, with sorts, in first-occurrence order.
pub fn term_free_vars(t: &Term, bound: &mut BTreeSet<Name>, out: &mut Vec<(Name, Sort)>) {
    match t {
        Term::Var(x, s) => {
            if !bound.contains(x) && !out.iter().any(|(y, _)| y == x) {
                out.push((x.clone(), s.clone()));
            }
        }
        Term::Int(_) | Term::Bool(_) => {}
        Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
            term_free_vars(a, bound, out);
            term_free_vars(b, bound, out);
        }
        Term::Ite(c, a, b) => {
            formula_free_vars_inner(c, bound, out);
            term_free_vars(a, bound, out);
            term_free_vars(b, bound, out);
        }
        Term::App(_, args) => {
            for a in args {
                term_free_vars(a, bound, out);
            }
        }
    }
}

fn formula_free_vars_inner(f: &Formula, bound: &mut BTreeSet<Name>, out: &mut Vec<(Name, Sort)>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Cmp(_, a, b) => {
            term_free_vars(a, bound, out);
            term_free_vars(b, bound, out);
        }
        Formula::BoolTerm(t) => term_free_vars(t, bound, out),
        Formula::PredApp(_, args) => {
            for a in args {
                term_free_vars(a, bound, out);
            }
        }
        Formula::Not(g) => formula_free_vars_inner(g, bound, out),
        Formula::And(fs) | Formula::Or(fs) => {
            for g in fs {
                formula_free_vars_inner(g, bound, out);
            }
        }
        Formula::Quant(_, binders, body) => {
            let added: Vec<Name> = binders
                .iter()
                .filter(|(x, _)| bound.insert(x.clone()))
                .map(|(x, _)| x.clone())
                .collect();
            formula_free_vars_inner(body, bound, out);
            for x in added {
                bound.remove(&x);
            }
        }
    }
}

/// Free term variables of a formula, in first-occurrence order.
pub fn formula_free_vars(f: &Formula) -> Vec<(Name, Sort)> {
    let mut bound = BTreeSet::new();
    let mut out = Vec::new();
    formula_free_vars_inner(f, &mut bound, &mut out);
    out
}

/// Names of predicate variables applied anywhere in the formula.
pub fn formula_pred_apps(f: &Formula) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    collect_pred_apps(f, &mut out);
    out
}

fn collect_pred_apps_term(t: &Term, out: &mut BTreeSet<Name>) {
    match t {
        Term::Var(..) | Term::Int(_) | Term::Bool(_) => {}
        Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
            collect_pred_apps_term(a, out);
            collect_pred_apps_term(b, out);
        }
        Term::Ite(c, a, b) => {
            collect_pred_apps(c, out);
            collect_pred_apps_term(a, out);
            collect_pred_apps_term(b, out);
        }
        Term::App(_, args) => {
            for a in args {
                collect_pred_apps_term(a, out);
            }
        }
    }
}

fn collect_pred_apps(f: &Formula, out: &mut BTreeSet<Name>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Cmp(_, a, b) => {
            collect_pred_apps_term(a, out);
            collect_pred_apps_term(b, out);
        }
        Formula::BoolTerm(t) => collect_pred_apps_term(t, out),
        Formula::PredApp(p, args) => {
            out.insert(p.clone());
            for a in args {
                collect_pred_apps_term(a, out);
            }
        }
        Formula::Not(g) => collect_pred_apps(g, out),
        Formula::And(fs) | Formula::Or(fs) => {
            for g in fs {
                collect_pred_apps(g, out);
            }
        }
        Formula::Quant(_, _, body) => collect_pred_apps(body, out),
    }
}

/// Names of function variables applied anywhere in the formula (every
/// `Term::App` head).
pub fn formula_fn_apps(f: &Formula) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    collect_fn_apps(f, &mut out);
    out
}

pub fn term_fn_apps(t: &Term, out: &mut BTreeSet<Name>) {
    match t {
        Term::Var(..) | Term::Int(_) | Term::Bool(_) => {}
        Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
            term_fn_apps(a, out);
            term_fn_apps(b, out);
        }
        Term::Ite(c, a, b) => {
            collect_fn_apps(c, out);
            term_fn_apps(a, out);
            term_fn_apps(b, out);
        }
        Term::App(g, args) => {
            out.insert(g.clone());
            for a in args {
                term_fn_apps(a, out);
            }
        }
    }
}

fn collect_fn_apps(f: &Formula, out: &mut BTreeSet<Name>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Cmp(_, a, b) => {
            term_fn_apps(a, out);
            term_fn_apps(b, out);
        }
        Formula::BoolTerm(t) => term_fn_apps(t, out),
        Formula::PredApp(_, args) => {
            for a in args {
                term_fn_apps(a, out);
            }
        }
        Formula::Not(g) => collect_fn_apps(g, out),
        Formula::And(fs) | Formula::Or(fs) => {
            for g in fs {
                collect_fn_apps(g, out);
            }
        }
        Formula::Quant(_, _, body) => collect_fn_apps(body, out),
    }
}

/// Structural equality up to renaming of bound variables.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    alpha_eq_inner(a, b, &mut BTreeMap::new(), &mut BTreeMap::new())
}

fn alpha_eq_term(
    a: &Term,
    b: &Term,
    l2r: &mut BTreeMap<Name, Name>,
    r2l: &mut BTreeMap<Name, Name>,
) -> bool {
    match (a, b) {
        (Term::Var(x, sx), Term::Var(y, sy)) => {
            if sx != sy {
                return false;
            }
            match (l2r.get(x), r2l.get(y)) {
                (Some(x2), Some(y2)) => x2 == y && y2 == x,
                (None, None) => x == y,
                _ => false,
            }
        }
        (Term::Int(m), Term::Int(n)) => m == n,
        (Term::Bool(p), Term::Bool(q)) => p == q,
        (Term::Add(a1, a2), Term::Add(b1, b2))
        | (Term::Sub(a1, a2), Term::Sub(b1, b2))
        | (Term::Mul(a1, a2), Term::Mul(b1, b2)) => {
            alpha_eq_term(a1, b1, l2r, r2l) && alpha_eq_term(a2, b2, l2r, r2l)
        }
        (Term::Ite(c1, t1, e1), Term::Ite(c2, t2, e2)) => {
            alpha_eq_inner(c1, c2, l2r, r2l)
                && alpha_eq_term(t1, t2, l2r, r2l)
                && alpha_eq_term(e1, e2, l2r, r2l)
        }
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len()
                && xs
                    .iter()
                    .zip(ys)
                    .all(|(x, y)| alpha_eq_term(x, y, l2r, r2l))
        }
        _ => false,
    }
}

fn alpha_eq_inner(
    a: &Formula,
    b: &Formula,
    l2r: &mut BTreeMap<Name, Name>,
    r2l: &mut BTreeMap<Name, Name>,
) -> bool {
    match (a, b) {
        (Formula::True, Formula::True) | (Formula::False, Formula::False) => true,
        (Formula::Cmp(o1, a1, a2), Formula::Cmp(o2, b1, b2)) => {
            o1 == o2 && alpha_eq_term(a1, b1, l2r, r2l) && alpha_eq_term(a2, b2, l2r, r2l)
        }
        (Formula::BoolTerm(t), Formula::BoolTerm(u)) => alpha_eq_term(t, u, l2r, r2l),
        (Formula::PredApp(p, xs), Formula::PredApp(q, ys)) => {
            p == q && xs.len() == ys.len()
                && xs
                    .iter()
                    .zip(ys)
                    .all(|(x, y)| alpha_eq_term(x, y, l2r, r2l))
        }
        (Formula::Not(g), Formula::Not(h)) => alpha_eq_inner(g, h, l2r, r2l),
        (Formula::And(fs), Formula::And(gs)) | (Formula::Or(fs), Formula::Or(gs)) => {
            fs.len() == gs.len()
                && fs
                    .iter()
                    .zip(gs)
                    .all(|(f, g)| alpha_eq_inner(f, g, l2r, r2l))
        }
        (Formula::Quant(q1, bs1, f1), Formula::Quant(q2, bs2, f2)) => {
            if q1 != q2 || bs1.len() != bs2.len() {
                return false;
            }
            if bs1.iter().zip(bs2).any(|((_, s1), (_, s2))| s1 != s2) {
                return false;
            }
            let mut saved = Vec::new();
            for ((x, _), (y, _)) in bs1.iter().zip(bs2) {
                saved.push((x.clone(), l2r.insert(x.clone(), y.clone())));
                saved.push((y.clone(), r2l.insert(y.clone(), x.clone())));
            }
            let res = alpha_eq_inner(f1, f2, l2r, r2l);
            // unwind in reverse so shadowed entries are restored correctly
            let mut it = bs1.iter().zip(bs2).rev();
            let mut saved = saved;
            while let Some(((x, _), (y, _))) = it.next() {
                let (ky, vy) = saved.pop().unwrap();
                debug_assert_eq!(&ky, y);
                match vy {
                    Some(v) => {
                        r2l.insert(ky, v);
                    }
                    None => {
                        r2l.remove(&ky);
                    }
                }
                let (kx, vx) = saved.pop().unwrap();
                debug_assert_eq!(&kx, x);
                match vx {
                    Some(v) => {
                        l2r.insert(kx, v);
                    }
                    None => {
                        l2r.remove(&kx);
                    }
                }
            }
            res
        }
        _ => false,
    }
}

/// Alpha-equivalence of whole programs: same equation heads in the same
/// order, same fixpoint kinds, bodies and query alpha-equivalent under the
/// pairing of parameter lists.
pub fn program_alpha_eq(a: &MuClpProgram, b: &MuClpProgram) -> bool {
    if a.equations.len() != b.equations.len() {
        return false;
    }
    for (ea, eb) in a.equations.iter().zip(&b.equations) {
        if ea.head != eb.head || ea.kind != eb.kind || ea.params.len() != eb.params.len() {
            return false;
        }
        if ea
            .params
            .iter()
            .zip(&eb.params)
            .any(|((_, s1), (_, s2))| s1 != s2)
        {
            return false;
        }
        let mut l2r = BTreeMap::new();
        let mut r2l = BTreeMap::new();
        for ((x, _), (y, _)) in ea.params.iter().zip(&eb.params) {
            l2r.insert(x.clone(), y.clone());
            r2l.insert(y.clone(), x.clone());
        }
        if !alpha_eq_inner(&ea.body, &eb.body, &mut l2r, &mut r2l) {
            return false;
        }
    }
    alpha_eq(&a.query, &b.query)
}
