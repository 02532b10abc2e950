//! Deterministic random generators for programs, formulas, and pfwCSP
//! instances. Used by the property test suites of this crate and the
//! solver crate; all randomness comes from an explicit xorshift seed.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::ast::{CmpOp, Equation, FixKind, Formula, MuClpProgram, Name, Quantifier, Sort, Term};
use crate::pfwcsp::{Clause, PfwCsp};

#[derive(Debug, Clone)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(seed.max(1))
    }

    pub fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n.max(1)
    }

    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.below((hi - lo + 1) as u64) as i64)
    }

    pub fn flip(&mut self) -> bool {
        self.next() & 1 == 0
    }
}

#[derive(Debug, Clone)]
pub struct ProgramShape {
    pub max_equations: usize,
    pub max_arity: usize,
    pub const_range: (i64, i64),
    pub max_depth: u32,
    pub allow_quantifiers: bool,
    /// Existentials only appear in the query prefix (so Skolem functions
    /// are constants), keeping exhaustive-search oracles feasible.
    pub query_exists_prefix: bool,
}

impl Default for ProgramShape {
    fn default() -> Self {
        ProgramShape {
            max_equations: 3,
            max_arity: 2,
            const_range: (-2, 2),
            max_depth: 3,
            allow_quantifiers: true,
            query_exists_prefix: false,
        }
    }
}

/// A random well-formed program: every defined predicate occurs only
/// positively, bodies are closed over their parameters, and the query is
/// closed.
pub fn random_program(rng: &mut Rng, shape: &ProgramShape) -> MuClpProgram {
    let n_eq = 1 + rng.below(shape.max_equations as u64) as usize;
    let mut heads = Vec::new();
    for i in 0..n_eq {
        let arity = rng.below(shape.max_arity as u64 + 1) as usize;
        heads.push((format!("P{i}"), arity));
    }
    let equations = heads
        .iter()
        .map(|(head, arity)| {
            let params: Vec<(Name, Sort)> = (0..*arity)
                .map(|k| (format!("{head}_a{k}"), Sort::Int))
                .collect();
            let body = random_formula(rng, shape, &params, &heads, shape.max_depth, true);
            Equation {
                head: head.clone(),
                params,
                kind: if rng.flip() { FixKind::Mu } else { FixKind::Nu },
                body,
            }
        })
        .collect();

    let query = if shape.query_exists_prefix && rng.flip() {
        let n = 1 + rng.below(2) as usize;
        let binders: Vec<(Name, Sort)> = (0..n).map(|k| (format!("q{k}"), Sort::Int)).collect();
        let body = random_formula(rng, shape, &binders, &heads, shape.max_depth, true);
        Formula::exists(binders, body)
    } else {
        let n = rng.below(3) as usize;
        let binders: Vec<(Name, Sort)> = (0..n).map(|k| (format!("q{k}"), Sort::Int)).collect();
        let body = random_formula(rng, shape, &binders, &heads, shape.max_depth, true);
        Formula::forall(binders, body)
    };
    MuClpProgram { equations, query }
}

/// A random formula over the given integer variables; defined predicates
/// are referenced only at positive polarity when `positive` holds.
pub fn random_formula(
    rng: &mut Rng,
    shape: &ProgramShape,
    vars: &[(Name, Sort)],
    preds: &[(Name, usize)],
    depth: u32,
    positive: bool,
) -> Formula {
    if depth == 0 {
        return random_atom(rng, shape, vars, preds, positive);
    }
    match rng.below(8) {
        0 | 1 => Formula::and2(
            random_formula(rng, shape, vars, preds, depth - 1, positive),
            random_formula(rng, shape, vars, preds, depth - 1, positive),
        ),
        2 | 3 => Formula::or2(
            random_formula(rng, shape, vars, preds, depth - 1, positive),
            random_formula(rng, shape, vars, preds, depth - 1, positive),
        ),
        4 => {
            // negation flips polarity; keep defined predicates positive by
            // negating only predicate-free subformulas
            Formula::not(random_formula(rng, shape, vars, preds, depth - 1, false))
        }
        5 if shape.allow_quantifiers => {
            let name = format!("v{}", rng.next() % 1000);
            let mut vars2 = vars.to_vec();
            vars2.push((name.clone(), Sort::Int));
            Formula::quant(
                if rng.flip() {
                    Quantifier::Forall
                } else {
                    Quantifier::Exists
                },
                vec![(name, Sort::Int)],
                random_formula(rng, shape, &vars2, preds, depth - 1, positive),
            )
        }
        _ => random_atom(rng, shape, vars, preds, positive),
    }
}

fn random_atom(
    rng: &mut Rng,
    shape: &ProgramShape,
    vars: &[(Name, Sort)],
    preds: &[(Name, usize)],
    positive: bool,
) -> Formula {
    if positive && !preds.is_empty() && rng.below(3) == 0 {
        let (name, arity) = &preds[rng.below(preds.len() as u64) as usize];
        let args = (0..*arity)
            .map(|_| random_term(rng, shape, vars, 1))
            .collect();
        return Formula::PredApp(name.clone(), args);
    }
    let op = match rng.below(6) {
        0 => CmpOp::Eq,
        1 => CmpOp::Ne,
        2 => CmpOp::Le,
        3 => CmpOp::Lt,
        4 => CmpOp::Ge,
        _ => CmpOp::Gt,
    };
    Formula::Cmp(
        op,
        random_term(rng, shape, vars, 1),
        random_term(rng, shape, vars, 1),
    )
}

pub fn random_term(
    rng: &mut Rng,
    shape: &ProgramShape,
    vars: &[(Name, Sort)],
    depth: u32,
) -> Term {
    let int_vars: Vec<&(Name, Sort)> = vars.iter().filter(|(_, s)| *s == Sort::Int).collect();
    if depth == 0 || (int_vars.is_empty() && rng.flip()) {
        return if int_vars.is_empty() || rng.below(3) == 0 {
            Term::Int(rng.int_in(shape.const_range.0, shape.const_range.1))
        } else {
            let (x, s) = int_vars[rng.below(int_vars.len() as u64) as usize];
            Term::Var(x.clone(), s.clone())
        };
    }
    match rng.below(6) {
        0 => Term::add(
            random_term(rng, shape, vars, depth - 1),
            random_term(rng, shape, vars, depth - 1),
        ),
        1 => Term::sub(
            random_term(rng, shape, vars, depth - 1),
            random_term(rng, shape, vars, depth - 1),
        ),
        2 => Term::mul(
            Term::Int(rng.int_in(-2, 2)),
            random_term(rng, shape, vars, depth - 1),
        ),
        _ => {
            if int_vars.is_empty() || rng.below(3) == 0 {
                Term::Int(rng.int_in(shape.const_range.0, shape.const_range.1))
            } else {
                let (x, s) = int_vars[rng.below(int_vars.len() as u64) as usize];
                Term::Var(x.clone(), s.clone())
            }
        }
    }
}

/// A random quantifier-free formula over declared variables only (no
/// predicate variables); for NNF/CNF truth-table oracles.
pub fn random_qf_formula(rng: &mut Rng, vars: &[(Name, Sort)], depth: u32) -> Formula {
    let shape = ProgramShape {
        allow_quantifiers: false,
        ..ProgramShape::default()
    };
    random_formula(rng, &shape, vars, &[], depth, false)
}

/// A random clause-shaped pfwCSP for round-trip tests.
pub fn random_pfwcsp(rng: &mut Rng) -> PfwCsp {
    let mut csp = PfwCsp::default();
    let n_pred = 1 + rng.below(3) as usize;
    for i in 0..n_pred {
        let arity = rng.below(3) as usize;
        csp.pred_sorts
            .insert(format!("P{i}"), vec![Sort::Int; arity]);
    }
    if rng.flip() {
        csp.wf_vars.insert("W".to_string());
        csp.pred_sorts
            .insert("W".to_string(), vec![Sort::Int, Sort::Int]);
    }
    if rng.flip() {
        csp.fn_vars.insert("F".to_string());
        csp.fn_sorts
            .insert("F".to_string(), (vec![Sort::Int], Sort::Int));
    }
    let preds: Vec<(Name, usize)> = csp
        .pred_sorts
        .iter()
        .map(|(n, s)| (n.clone(), s.len()))
        .collect();
    let n_clauses = 1 + rng.below(4) as usize;
    let shape = ProgramShape::default();
    for _ in 0..n_clauses {
        let n_vars = rng.below(3) as usize;
        let vars: Vec<(Name, Sort)> = (0..n_vars)
            .map(|k| (format!("x{k}"), Sort::Int))
            .collect();
        let mut mk_args = |rng: &mut Rng, arity: usize| -> Vec<Term> {
            (0..arity)
                .map(|_| {
                    let t = random_term(rng, &shape, &vars, 1);
                    if csp.fn_vars.contains("F") && rng.below(6) == 0 {
                        Term::App("F".to_string(), vec![t])
                    } else {
                        t
                    }
                })
                .collect()
        };
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for _ in 0..rng.below(3) {
            let (p, ar) = &preds[rng.below(preds.len() as u64) as usize];
            pos.push((p.clone(), mk_args(rng, *ar)));
        }
        for _ in 0..rng.below(3) {
            let (p, ar) = &preds[rng.below(preds.len() as u64) as usize];
            neg.push((p.clone(), mk_args(rng, *ar)));
        }
        let constraint = if rng.flip() {
            Formula::False
        } else {
            random_atom(&mut *rng, &shape, &vars, &[], false)
        };
        let mut clause = Clause {
            constraint,
            pos,
            neg,
            term_vars: Vec::new(),
        };
        clause.close_term_vars();
        csp.clauses.push(clause);
    }
    csp
}

/// Deterministic assignment of truth values to opaque predicate atoms,
/// keyed by predicate name and argument values; for equivalence oracles
/// over formulas containing predicate applications.
pub struct HashingResolver {
    pub salt: u64,
}

impl crate::eval::Resolver for HashingResolver {
    fn pred(
        &self,
        name: &Name,
        args: &[crate::ast::Value],
        _budget: &mut crate::eval::EvalBudget,
    ) -> Result<bool, crate::eval::EvalError> {
        let mut h = self.salt ^ 0x9e3779b97f4a7c15;
        for b in name.as_bytes() {
            h = h.wrapping_mul(31).wrapping_add(*b as u64);
        }
        for a in args {
            let v = match a {
                crate::ast::Value::Int(n) => *n as u64,
                crate::ast::Value::Bool(b) => 7 + *b as u64,
            };
            h = h.wrapping_mul(0x100000001b3).wrapping_add(v);
        }
        h ^= h >> 33;
        h = h.wrapping_mul(0xff51afd7ed558ccd);
        h ^= h >> 33;
        Ok(h & 1 == 0)
    }

    fn func(
        &self,
        name: &Name,
        args: &[crate::ast::Value],
        _budget: &mut crate::eval::EvalBudget,
    ) -> Result<crate::ast::Value, crate::eval::EvalError> {
        let mut h = self.salt ^ 0xdeadbeefcafef00d;
        for b in name.as_bytes() {
            h = h.wrapping_mul(37).wrapping_add(*b as u64);
        }
        for a in args {
            let v = match a {
                crate::ast::Value::Int(n) => *n as u64,
                crate::ast::Value::Bool(b) => 3 + *b as u64,
            };
            h = h.wrapping_mul(0x100000001b3).wrapping_add(v);
        }
        Ok(crate::ast::Value::Int((h % 7) as i64 - 3))
    }
}

/// All assignments of the integer box to the given variables.
pub fn assignments(vars: &[(Name, Sort)], lo: i64, hi: i64) -> Vec<BTreeMap<Name, crate::ast::Value>> {
    let mut out = vec![BTreeMap::new()];
    for (x, s) in vars {
        let values: Vec<crate::ast::Value> = match s {
            Sort::Bool => vec![
                crate::ast::Value::Bool(false),
                crate::ast::Value::Bool(true),
            ],
            _ => (lo..=hi).map(crate::ast::Value::Int).collect(),
        };
        let mut next = Vec::with_capacity(out.len() * values.len());
        for env in &out {
            for v in &values {
                let mut e = env.clone();
                e.insert(x.clone(), *v);
                next.push(e);
            }
        }
        out = next;
    }
    out
}
