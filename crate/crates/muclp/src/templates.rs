//! Stratified template families for candidate synthesis: disjunctions of
//! conjunctions of affine inequalities for ordinary predicates,
//! piecewise-defined affine functions for function variables, and
//! lexicographic piecewise-defined affine ranking relations for
//! well-founded predicate variables.
//!
//! Every family is indexed by a small integer parameter record; the induced
//! solution spaces are finite (coefficients are bounded by the accompanying
//! shape constraint) and monotone in the pointwise parameter order.
//! Synthesis failures bump the implicated parameters fairly, which is what
//! makes the outer CEGIS loop relatively complete.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::ast::{CmpOp, Formula, Name, Sort, Term, Value};
use crate::pfwcsp::{Lambda, LambdaBody, PfwCsp};

/// Hard cap on Boolean case splits per template (the search space doubles
/// per Boolean argument).
pub const BOOL_SPLIT_CAP: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Family {
    Pred,
    Func,
    Wf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CompId {
    /// disjuncts (pred, func pieces)
    Nd,
    /// conjuncts per disjunct / discriminator
    Nc,
    /// coefficient-sum bound of pred atoms
    Ac,
    /// constant bound of pred atoms
    Ad,
    /// discriminator coefficient/constant bounds
    Dc,
    Dd,
    /// branch-expression coefficient/constant bounds
    Ec,
    Ed,
    /// lexicographic length
    Nl,
    /// pieces per lexicographic level
    Np,
    /// ranking coefficient/constant bounds
    Rc,
    Rd,
}

impl CompId {
    pub fn is_structural(self) -> bool {
        matches!(self, CompId::Nd | CompId::Nc | CompId::Nl | CompId::Np)
    }

    pub fn label(self) -> &'static str {
        match self {
            CompId::Nd => "nd",
            CompId::Nc => "nc",
            CompId::Ac => "ac",
            CompId::Ad => "ad",
            CompId::Dc => "dc",
            CompId::Dd => "dd",
            CompId::Ec => "ec",
            CompId::Ed => "ed",
            CompId::Nl => "nl",
            CompId::Np => "np",
            CompId::Rc => "rc",
            CompId::Rd => "rd",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub id: CompId,
    pub value: u32,
    pub bumps: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarParams {
    pub family: Family,
    pub comps: Vec<Component>,
    next_structural: usize,
    next_bound: usize,
    bump_parity: bool,
}

impl VarParams {
    pub fn new(family: Family, init: &InitialParams) -> VarParams {
        let comps = match family {
            Family::Pred => vec![
                (CompId::Nd, init.pred.0),
                (CompId::Nc, init.pred.1),
                (CompId::Ac, init.pred.2),
                (CompId::Ad, init.pred.3),
            ],
            Family::Func => vec![
                (CompId::Nd, init.func.0),
                (CompId::Nc, init.func.1),
                (CompId::Dc, init.func.2),
                (CompId::Dd, init.func.3),
                (CompId::Ec, init.func.4),
                (CompId::Ed, init.func.5),
            ],
            Family::Wf => vec![
                (CompId::Nl, init.wf.0),
                (CompId::Np, init.wf.1),
                (CompId::Nc, init.wf.2),
                (CompId::Rc, init.wf.3),
                (CompId::Rd, init.wf.4),
                (CompId::Dc, init.wf.5),
                (CompId::Dd, init.wf.6),
            ],
        };
        VarParams {
            family,
            comps: comps
                .into_iter()
                .map(|(id, value)| Component {
                    id,
                    value,
                    bumps: 0,
                })
                .collect(),
            next_structural: 0,
            next_bound: 0,
            bump_parity: false,
        }
    }

    pub fn get(&self, id: CompId) -> u32 {
        self.comps
            .iter()
            .find(|c| c.id == id)
            .map(|c| c.value)
            .unwrap_or(0)
    }

    /// One bump event: structural components get +1 and bound components
    /// double, alternating round-robin.
    fn bump_once(&mut self) {
        let structural: Vec<usize> = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, c)| c.id.is_structural())
            .map(|(i, _)| i)
            .collect();
        let bounds: Vec<usize> = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.id.is_structural())
            .map(|(i, _)| i)
            .collect();
        let ix = if !self.bump_parity || bounds.is_empty() {
            let ix = structural[self.next_structural % structural.len()];
            self.next_structural += 1;
            ix
        } else {
            let ix = bounds[self.next_bound % bounds.len()];
            self.next_bound += 1;
            ix
        };
        self.bump_parity = !self.bump_parity;
        let comp = &mut self.comps[ix];
        comp.value = if comp.id.is_structural() {
            comp.value + 1
        } else if comp.value == 0 {
            1
        } else {
            comp.value.saturating_mul(2)
        };
        comp.bumps += 1;
    }

    /// Catch one specific component up by one bump step.
    fn bump_component(&mut self, ix: usize) {
        let comp = &mut self.comps[ix];
        comp.value = if comp.id.is_structural() {
            comp.value + 1
        } else if comp.value == 0 {
            1
        } else {
            comp.value.saturating_mul(2)
        };
        comp.bumps += 1;
    }

    fn le(&self, other: &VarParams) -> bool {
        self.comps
            .iter()
            .zip(&other.comps)
            .all(|(a, b)| a.id == b.id && a.value <= b.value)
    }
}

/// Initial parameters for the three families:
/// pred (nd, nc, ac, ad); func (nd, nc, dc, dd, ec, ed);
/// wf (nl, np, nc, rc, rd, dc, dd).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialParams {
    pub pred: (u32, u32, u32, u32),
    pub func: (u32, u32, u32, u32, u32, u32),
    pub wf: (u32, u32, u32, u32, u32, u32, u32),
}

impl Default for InitialParams {
    fn default() -> Self {
        InitialParams {
            pred: (1, 1, 1, 1),
            func: (1, 1, 1, 1, 1, 1),
            wf: (1, 1, 1, 1, 1, 1, 1),
        }
    }
}

/// Per-variable parameter records plus the bump bookkeeping; owned by one
/// CEGIS instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamVector {
    pub vars: BTreeMap<Name, VarParams>,
    pub fairness_cap: u32,
}

impl ParamVector {
    pub fn initial(csp: &PfwCsp, init: &InitialParams, fairness_cap: u32) -> ParamVector {
        let mut vars = BTreeMap::new();
        for name in csp.pred_sorts.keys() {
            let family = if csp.wf_vars.contains(name) {
                Family::Wf
            } else {
                Family::Pred
            };
            vars.insert(name.clone(), VarParams::new(family, init));
        }
        for name in csp.fn_sorts.keys() {
            vars.insert(name.clone(), VarParams::new(Family::Func, init));
        }
        ParamVector {
            vars,
            fairness_cap,
        }
    }

    /// Pointwise order (defined for vectors over the same variables).
    pub fn le(&self, other: &ParamVector) -> bool {
        self.vars.len() == other.vars.len()
            && self
                .vars
                .iter()
                .all(|(n, v)| other.vars.get(n).is_some_and(|w| v.le(w)))
    }

    /// Strictly greater on at least one component of every implicated
    /// variable, with lagging components everywhere caught up to within the
    /// fairness cap. Deterministic given (self, implicated).
    pub fn bump(&self, implicated: &BTreeSet<Name>) -> ParamVector {
        let mut next = self.clone();
        for name in implicated {
            if let Some(v) = next.vars.get_mut(name) {
                v.bump_once();
            }
        }
        // fairness: no component may lag more than `fairness_cap` bump
        // steps behind the most-bumped component
        let max_bumps = next
            .vars
            .values()
            .flat_map(|v| v.comps.iter().map(|c| c.bumps))
            .max()
            .unwrap_or(0);
        let floor = max_bumps.saturating_sub(next.fairness_cap);
        let names: Vec<Name> = next.vars.keys().cloned().collect();
        for name in names {
            let v = next.vars.get_mut(&name).unwrap();
            for ix in 0..v.comps.len() {
                while v.comps[ix].bumps < floor {
                    v.bump_component(ix);
                }
            }
        }
        next
    }
}

/// A template skeleton with unknown coefficients, the unknown lists, and
/// the accompanying shape constraint over the unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateInstance {
    pub params: Vec<(Name, Sort)>,
    pub body: LambdaBody,
    /// Unknowns occurring in the skeleton.
    pub unknowns: Vec<Name>,
    /// Auxiliary unknowns used only inside the shape constraint
    /// (absolute-value encodings).
    pub aux_unknowns: Vec<Name>,
    pub shape_constraint: Formula,
}

impl TemplateInstance {
    pub fn as_lambda(&self) -> Lambda {
        Lambda {
            params: self.params.clone(),
            body: self.body.clone(),
        }
    }

    pub fn all_unknowns(&self) -> impl Iterator<Item = &Name> {
        self.unknowns.iter().chain(self.aux_unknowns.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TemplateError {
    TooManyBools { var: Name, count: usize },
    OddWfArity { var: Name },
    UnknownVariable(Name),
}

impl core::fmt::Display for TemplateError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TemplateError::TooManyBools { var, count } => {
                write!(f, "{var} has {count} Boolean arguments (cap {BOOL_SPLIT_CAP})")
            }
            TemplateError::OddWfArity { var } => write!(f, "{var} has odd arity"),
            TemplateError::UnknownVariable(v) => write!(f, "no sorts known for {v}"),
        }
    }
}

/// Collector for fresh unknown coefficient names.
struct Unknowns {
    prefix: String,
    next: u32,
    names: Vec<Name>,
}

impl Unknowns {
    fn new(var: &str) -> Unknowns {
        Unknowns {
            prefix: format!("c!{var}"),
            next: 0,
            names: Vec::new(),
        }
    }

    fn fresh(&mut self) -> Term {
        let name = format!("{}!{}", self.prefix, self.next);
        self.next += 1;
        self.names.push(name.clone());
        Term::Var(name, Sort::Int)
    }
}

fn affine(coeffs: &[Term], vars: &[Term], constant: Term) -> Term {
    let mut acc = constant;
    for (c, x) in coeffs.iter().zip(vars) {
        acc = Term::add(acc, Term::mul(c.clone(), x.clone()));
    }
    acc
}

/// `|t| <= bound` as two inequalities.
fn abs_le(t: &Term, bound: u32) -> Formula {
    Formula::and2(
        Formula::cmp(CmpOp::Le, t.clone(), Term::Int(bound as i64)),
        Formula::cmp(CmpOp::Ge, t.clone(), Term::Int(-(bound as i64))),
    )
}

/// `sum |c_k| <= bound` via auxiliary unknowns `u_k >= c_k, u_k >= -c_k,
/// sum u_k <= bound` (keeps the constraint disjunction-free).
fn abs_sum_le(
    coeffs: &[Term],
    bound: u32,
    aux: &mut Unknowns,
    aux_names: &mut Vec<Name>,
) -> Formula {
    if coeffs.is_empty() {
        return Formula::True;
    }
    let mut conjuncts = Vec::new();
    let mut sum: Option<Term> = None;
    for c in coeffs {
        let u = aux.fresh();
        if let Term::Var(name, _) = &u {
            aux_names.push(name.clone());
        }
        conjuncts.push(Formula::cmp(CmpOp::Ge, u.clone(), c.clone()));
        conjuncts.push(Formula::cmp(
            CmpOp::Ge,
            u.clone(),
            Term::sub(Term::Int(0), c.clone()),
        ));
        sum = Some(match sum {
            None => u,
            Some(s) => Term::add(s, u),
        });
    }
    conjuncts.push(Formula::cmp(
        CmpOp::Le,
        sum.unwrap(),
        Term::Int(bound as i64),
    ));
    Formula::and(conjuncts)
}

fn split_sorts(sorts: &[Sort]) -> (Vec<usize>, Vec<usize>) {
    let ints = sorts
        .iter()
        .enumerate()
        .filter(|(_, s)| **s == Sort::Int)
        .map(|(i, _)| i)
        .collect();
    let bools = sorts
        .iter()
        .enumerate()
        .filter(|(_, s)| **s == Sort::Bool)
        .map(|(i, _)| i)
        .collect();
    (ints, bools)
}

fn param_vars(params: &[(Name, Sort)]) -> Vec<Term> {
    params
        .iter()
        .map(|(x, s)| Term::Var(x.clone(), s.clone()))
        .collect()
}

/// Boolean case-split: fold `f` over every valuation of the Boolean
/// parameters, producing `⋁_β (pattern_β ∧ f(β))`.
fn bool_cases(
    bool_vars: &[Term],
    mut per_case: impl FnMut() -> Formula,
) -> Formula {
    if bool_vars.is_empty() {
        return per_case();
    }
    let n = bool_vars.len();
    let mut cases = Vec::new();
    for bits in 0..(1u32 << n) {
        let mut pattern = Vec::new();
        for (i, b) in bool_vars.iter().enumerate() {
            let atom = Formula::BoolTerm(b.clone());
            pattern.push(if bits & (1 << i) != 0 {
                atom
            } else {
                Formula::not(atom)
            });
        }
        pattern.push(per_case());
        cases.push(Formula::and(pattern));
    }
    Formula::or(cases)
}

/// Template for an ordinary predicate: a disjunction of `nd` conjunctions
/// of `nc` affine inequalities over the integer arguments, case-split over
/// the Boolean arguments.
pub fn build_pred_template(
    var: &Name,
    sorts: &[Sort],
    p: &VarParams,
) -> Result<TemplateInstance, TemplateError> {
    let params: Vec<(Name, Sort)> = sorts
        .iter()
        .enumerate()
        .map(|(i, s)| (format!("x!{var}!{i}"), s.clone()))
        .collect();
    let vars = param_vars(&params);
    let (ints, bools) = split_sorts(sorts);
    if bools.len() > BOOL_SPLIT_CAP as usize {
        return Err(TemplateError::TooManyBools {
            var: var.clone(),
            count: bools.len(),
        });
    }
    let int_vars: Vec<Term> = ints.iter().map(|i| vars[*i].clone()).collect();
    let bool_vars: Vec<Term> = bools.iter().map(|i| vars[*i].clone()).collect();
    let (nd, nc, ac, ad) = (
        p.get(CompId::Nd) as usize,
        p.get(CompId::Nc) as usize,
        p.get(CompId::Ac),
        p.get(CompId::Ad),
    );

    let mut unknowns = Unknowns::new(var);
    let mut aux = Unknowns::new(&format!("u!{var}"));
    let mut aux_names = Vec::new();
    let mut shape = Vec::new();
    let body = bool_cases(&bool_vars, || {
        let mut disjuncts = Vec::new();
        for _ in 0..nd {
            let mut conjuncts = Vec::new();
            for _ in 0..nc {
                let constant = unknowns.fresh();
                let coeffs: Vec<Term> = int_vars.iter().map(|_| unknowns.fresh()).collect();
                shape.push(abs_le(&constant, ad));
                shape.push(abs_sum_le(&coeffs, ac, &mut aux, &mut aux_names));
                conjuncts.push(Formula::cmp(
                    CmpOp::Ge,
                    affine(&coeffs, &int_vars, constant),
                    Term::Int(0),
                ));
            }
            disjuncts.push(Formula::and(conjuncts));
        }
        Formula::or(disjuncts)
    });
    Ok(TemplateInstance {
        params,
        body: LambdaBody::Pred(body),
        unknowns: unknowns.names,
        aux_unknowns: aux_names,
        shape_constraint: Formula::and(shape),
    })
}

/// Template for a (non-predicate) function variable: a piecewise-defined
/// affine function with `nd` branch expressions selected by `nd - 1`
/// discriminators of `nc` conjuncts each. Total for every coefficient
/// assignment by construction. Boolean-returning functions use a
/// predicate-shaped discriminator under an `ite`.
pub fn build_fun_template(
    var: &Name,
    arg_sorts: &[Sort],
    ret: &Sort,
    p: &VarParams,
) -> Result<TemplateInstance, TemplateError> {
    let params: Vec<(Name, Sort)> = arg_sorts
        .iter()
        .enumerate()
        .map(|(i, s)| (format!("x!{var}!{i}"), s.clone()))
        .collect();
    let vars = param_vars(&params);
    let (ints, _) = split_sorts(arg_sorts);
    let int_vars: Vec<Term> = ints.iter().map(|i| vars[*i].clone()).collect();
    let (nd, nc, dc, dd, ec, ed) = (
        p.get(CompId::Nd) as usize,
        p.get(CompId::Nc) as usize,
        p.get(CompId::Dc),
        p.get(CompId::Dd),
        p.get(CompId::Ec),
        p.get(CompId::Ed),
    );

    let mut unknowns = Unknowns::new(var);
    let mut aux = Unknowns::new(&format!("u!{var}"));
    let mut aux_names = Vec::new();
    let mut shape = Vec::new();

    if *ret == Sort::Bool {
        // ite over a predicate-shaped discriminator
        let mut disjuncts = Vec::new();
        for _ in 0..nd {
            let mut conjuncts = Vec::new();
            for _ in 0..nc.max(1) {
                let constant = unknowns.fresh();
                let coeffs: Vec<Term> = int_vars.iter().map(|_| unknowns.fresh()).collect();
                shape.push(abs_le(&constant, dd));
                shape.push(abs_sum_le(&coeffs, dc, &mut aux, &mut aux_names));
                conjuncts.push(Formula::cmp(
                    CmpOp::Ge,
                    affine(&coeffs, &int_vars, constant),
                    Term::Int(0),
                ));
            }
            disjuncts.push(Formula::and(conjuncts));
        }
        let body = Term::ite(
            Formula::or(disjuncts),
            Term::Bool(true),
            Term::Bool(false),
        );
        return Ok(TemplateInstance {
            params,
            body: LambdaBody::Fn(body),
            unknowns: unknowns.names,
            aux_unknowns: aux_names,
            shape_constraint: Formula::and(shape),
        });
    }

    fn branch(
        int_vars: &[Term],
        ec: u32,
        ed: u32,
        unknowns: &mut Unknowns,
        shape: &mut Vec<Formula>,
        aux: &mut Unknowns,
        aux_names: &mut Vec<Name>,
    ) -> Term {
        let constant = unknowns.fresh();
        let coeffs: Vec<Term> = int_vars.iter().map(|_| unknowns.fresh()).collect();
        shape.push(abs_le(&constant, ed));
        shape.push(abs_sum_le(&coeffs, ec, aux, aux_names));
        affine(&coeffs, int_vars, constant)
    }
    // t_nd = e_nd; t_i = ite(D_i, e_i, t_{i+1})
    let mut body = branch(
        &int_vars,
        ec,
        ed,
        &mut unknowns,
        &mut shape,
        &mut aux,
        &mut aux_names,
    );
    for _ in 1..nd {
        let mut conjuncts = Vec::new();
        for _ in 0..nc {
            let constant = unknowns.fresh();
            let coeffs: Vec<Term> = int_vars.iter().map(|_| unknowns.fresh()).collect();
            shape.push(abs_le(&constant, dd));
            shape.push(abs_sum_le(&coeffs, dc, &mut aux, &mut aux_names));
            conjuncts.push(Formula::cmp(
                CmpOp::Ge,
                affine(&coeffs, &int_vars, constant),
                Term::Int(0),
            ));
        }
        let e = branch(
            &int_vars,
            ec,
            ed,
            &mut unknowns,
            &mut shape,
            &mut aux,
            &mut aux_names,
        );
        body = Term::ite(Formula::and(conjuncts), e, body);
    }
    Ok(TemplateInstance {
        params,
        body: LambdaBody::Fn(body),
        unknowns: unknowns.names,
        aux_unknowns: aux_names,
        shape_constraint: Formula::and(shape),
    })
}

/// Template for a well-founded predicate over pairs: the relation induced
/// by an `nl`-lexicographic `np`-piecewise-defined affine ranking function.
/// Every coefficient assignment denotes a well-founded relation: all pieces
/// are non-negative on the source tuple, the discriminators cover both
/// tuples, and some lexicographic level strictly decreases with all earlier
/// levels non-increasing. Boolean tuple components are ignored by the
/// ranking and discriminator templates.
pub fn build_wf_template(
    var: &Name,
    sorts: &[Sort],
    p: &VarParams,
) -> Result<TemplateInstance, TemplateError> {
    if sorts.len() % 2 != 0 {
        return Err(TemplateError::OddWfArity { var: var.clone() });
    }
    let half = sorts.len() / 2;
    let params: Vec<(Name, Sort)> = sorts
        .iter()
        .enumerate()
        .map(|(i, s)| (format!("x!{var}!{i}"), s.clone()))
        .collect();
    let vars = param_vars(&params);
    let (ints_first, _) = split_sorts(&sorts[..half]);
    let xs: Vec<Term> = ints_first.iter().map(|i| vars[*i].clone()).collect();
    let ys: Vec<Term> = ints_first.iter().map(|i| vars[half + *i].clone()).collect();
    let (nl, np, nc, rc, rd, dc, dd) = (
        p.get(CompId::Nl) as usize,
        p.get(CompId::Np) as usize,
        p.get(CompId::Nc) as usize,
        p.get(CompId::Rc),
        p.get(CompId::Rd),
        p.get(CompId::Dc),
        p.get(CompId::Dd),
    );

    let mut unknowns = Unknowns::new(var);
    let mut aux = Unknowns::new(&format!("u!{var}"));
    let mut aux_names = Vec::new();
    let mut shape = Vec::new();

    // rank[i][j] and disc[i][j] as coefficient vectors applied to either
    // tuple
    struct Piece {
        rank_const: Term,
        rank_coeffs: Vec<Term>,
        disc: Vec<(Term, Vec<Term>)>,
    }
    let mut pieces: Vec<Vec<Piece>> = Vec::new();
    for _ in 0..nl {
        let mut level = Vec::new();
        for _ in 0..np {
            let rank_const = unknowns.fresh();
            let rank_coeffs: Vec<Term> = xs.iter().map(|_| unknowns.fresh()).collect();
            shape.push(abs_le(&rank_const, rd));
            shape.push(abs_sum_le(&rank_coeffs, rc, &mut aux, &mut aux_names));
            let mut disc = Vec::new();
            for _ in 0..nc {
                let d_const = unknowns.fresh();
                let d_coeffs: Vec<Term> = xs.iter().map(|_| unknowns.fresh()).collect();
                shape.push(abs_le(&d_const, dd));
                shape.push(abs_sum_le(&d_coeffs, dc, &mut aux, &mut aux_names));
                disc.push((d_const, d_coeffs));
            }
            level.push(Piece {
                rank_const,
                rank_coeffs,
                disc,
            });
        }
        pieces.push(level);
    }

    let rank = |piece: &Piece, tuple: &[Term]| -> Term {
        affine(&piece.rank_coeffs, tuple, piece.rank_const.clone())
    };
    let disc = |piece: &Piece, tuple: &[Term]| -> Formula {
        Formula::and(
            piece
                .disc
                .iter()
                .map(|(c0, cs)| {
                    Formula::cmp(CmpOp::Ge, affine(cs, tuple, c0.clone()), Term::Int(0))
                })
                .collect(),
        )
    };

    let mut conjuncts = Vec::new();
    // non-negativity of every ranking piece on the source tuple
    for level in &pieces {
        for piece in level {
            conjuncts.push(Formula::cmp(CmpOp::Ge, rank(piece, &xs), Term::Int(0)));
        }
    }
    // discriminator coverage on both tuples
    for level in &pieces {
        conjuncts.push(Formula::or(
            level.iter().map(|piece| disc(piece, &xs)).collect(),
        ));
        conjuncts.push(Formula::or(
            level.iter().map(|piece| disc(piece, &ys)).collect(),
        ));
    }
    // some level strictly decreases, earlier levels non-increasing
    let compare = |level: &Vec<Piece>, strict: bool| -> Formula {
        Formula::or(
            level
                .iter()
                .map(|pj| {
                    let mut parts = vec![disc(pj, &xs)];
                    for pk in level {
                        parts.push(Formula::implies(
                            disc(pk, &ys),
                            Formula::cmp(
                                if strict { CmpOp::Gt } else { CmpOp::Ge },
                                rank(pj, &xs),
                                rank(pk, &ys),
                            ),
                        ));
                    }
                    Formula::and(parts)
                })
                .collect(),
        )
    };
    let mut lex = Vec::new();
    for i in 0..nl {
        let mut parts = vec![compare(&pieces[i], true)];
        for level in pieces.iter().take(i) {
            parts.push(compare(level, false));
        }
        lex.push(Formula::and(parts));
    }
    conjuncts.push(Formula::or(lex));

    Ok(TemplateInstance {
        params,
        body: LambdaBody::Pred(Formula::and(conjuncts)),
        unknowns: unknowns.names,
        aux_unknowns: aux_names,
        shape_constraint: Formula::and(shape),
    })
}

/// Build templates for every declared variable of the problem.
pub fn build_templates(
    csp: &PfwCsp,
    params: &ParamVector,
) -> Result<BTreeMap<Name, TemplateInstance>, TemplateError> {
    let mut out = BTreeMap::new();
    for (name, sorts) in &csp.pred_sorts {
        let p = params
            .vars
            .get(name)
            .ok_or_else(|| TemplateError::UnknownVariable(name.clone()))?;
        let t = if csp.wf_vars.contains(name) {
            build_wf_template(name, sorts, p)?
        } else {
            build_pred_template(name, sorts, p)?
        };
        out.insert(name.clone(), t);
    }
    for (name, (args, ret)) in &csp.fn_sorts {
        let p = params
            .vars
            .get(name)
            .ok_or_else(|| TemplateError::UnknownVariable(name.clone()))?;
        out.insert(name.clone(), build_fun_template(name, args, ret, p)?);
    }
    Ok(out)
}

/// A total assignment of integers to template unknowns.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoeffAssignment(pub BTreeMap<Name, i64>);

/// Substitute a coefficient assignment into a template and lightly
/// simplify, yielding a closed lambda.
pub fn extract_lambda(template: &TemplateInstance, theta: &CoeffAssignment) -> Lambda {
    let map: BTreeMap<Name, Term> = theta
        .0
        .iter()
        .map(|(n, v)| (n.clone(), Term::Int(*v)))
        .collect();
    let mut fresh = crate::ast::FreshNames::new();
    match &template.body {
        LambdaBody::Pred(f) => {
            let g = crate::transform::subst_term_vars(f, &map, &mut fresh);
            Lambda::pred(template.params.clone(), crate::simplify::simplify(&g))
        }
        LambdaBody::Fn(t) => {
            let u = crate::transform::subst_term_vars_in_term(t, &map, &mut fresh);
            Lambda::func(template.params.clone(), crate::simplify::simplify_term(&u))
        }
    }
}

/// `extract_candidate`: close every template under the assignment.
pub fn extract_candidate(
    templates: &BTreeMap<Name, TemplateInstance>,
    theta: &CoeffAssignment,
) -> crate::pfwcsp::CandidateSolution {
    let mut sol = crate::pfwcsp::CandidateSolution::default();
    for (name, t) in templates {
        sol.insert(name.clone(), extract_lambda(t, theta));
    }
    sol
}

/// One named conjunct of the synthesis constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedConstraint {
    pub name: String,
    pub formula: Formula,
    /// Variables implicated when this conjunct appears in an unsat core.
    pub vars: BTreeSet<Name>,
}

/// The hypothesis constraint: one conjunct per example instance (templates
/// substituted for its predicate/function variables) plus one shape
/// conjunct per variable. Models over the unknowns are exactly the
/// candidate solutions within the current parameter space that satisfy
/// every example.
pub fn hypothesis_constraint(
    instances: &[crate::pfwcsp::ExampleInstance],
    facts: &[(bool, Name, Vec<Value>)],
    templates: &BTreeMap<Name, TemplateInstance>,
) -> Result<Vec<NamedConstraint>, crate::transform::SubstError> {
    let lambdas: BTreeMap<Name, Lambda> = templates
        .iter()
        .map(|(n, t)| (n.clone(), t.as_lambda()))
        .collect();
    let mut out = Vec::new();
    let mut fresh = crate::ast::FreshNames::new();
    for (k, inst) in instances.iter().enumerate() {
        let f = inst.clause.to_formula();
        let g = crate::transform::substitute(&f, &lambdas, &mut fresh)?;
        out.push(NamedConstraint {
            name: format!("ex!{k}"),
            formula: crate::simplify::simplify(&g),
            vars: inst
                .clause
                .pred_vars()
                .into_iter()
                .chain(inst.clause.fn_vars())
                .collect(),
        });
    }
    for (k, (positive, pvar, args)) in facts.iter().enumerate() {
        let app = Formula::PredApp(
            pvar.clone(),
            args.iter().map(|v| v.as_term()).collect(),
        );
        let f = if *positive { app } else { Formula::not(app) };
        let g = crate::transform::substitute(&f, &lambdas, &mut fresh)?;
        out.push(NamedConstraint {
            name: format!("fact!{k}"),
            formula: crate::simplify::simplify(&g),
            vars: BTreeSet::from([pvar.clone()]),
        });
    }
    for (name, t) in templates {
        out.push(NamedConstraint {
            name: format!("con!{name}"),
            formula: t.shape_constraint.clone(),
            vars: BTreeSet::from([name.clone()]),
        });
    }
    Ok(out)
}

/// Map unsat-core names back to the variables whose parameters must grow.
pub fn implicated_vars(
    core: &[String],
    constraints: &[NamedConstraint],
) -> BTreeSet<Name> {
    let by_name: BTreeMap<&str, &NamedConstraint> = constraints
        .iter()
        .map(|c| (c.name.as_str(), c))
        .collect();
    let mut out = BTreeSet::new();
    for name in core {
        if let Some(c) = by_name.get(name.as_str()) {
            out.extend(c.vars.iter().cloned());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{eval_formula, EvalBudget, NoVars};
    use alloc::string::ToString;
    use std::collections::BTreeMap as StdMap;

    fn pred_params(nd: u32, nc: u32, ac: u32, ad: u32) -> VarParams {
        let mut p = VarParams::new(Family::Pred, &InitialParams::default());
        for c in &mut p.comps {
            c.value = match c.id {
                CompId::Nd => nd,
                CompId::Nc => nc,
                CompId::Ac => ac,
                CompId::Ad => ad,
                _ => c.value,
            };
        }
        p
    }

    fn wf_params(nl: u32, np: u32, nc: u32, rc: u32, rd: u32, dc: u32, dd: u32) -> VarParams {
        let mut p = VarParams::new(Family::Wf, &InitialParams::default());
        for c in &mut p.comps {
            c.value = match c.id {
                CompId::Nl => nl,
                CompId::Np => np,
                CompId::Nc => nc,
                CompId::Rc => rc,
                CompId::Rd => rd,
                CompId::Dc => dc,
                CompId::Dd => dd,
                _ => c.value,
            };
        }
        p
    }

    #[test]
    fn pred_unknown_count() {
        // nd * nc * (arity + 1) for all-int arities
        let mut seed = 12345u64;
        let mut rand = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..20 {
            let nd = (rand() % 3 + 1) as u32;
            let nc = (rand() % 3 + 1) as u32;
            let ar = (rand() % 4) as usize;
            let t = build_pred_template(
                &"X".to_string(),
                &vec![Sort::Int; ar],
                &pred_params(nd, nc, 1, 1),
            )
            .unwrap();
            assert_eq!(t.unknowns.len(), (nd * nc) as usize * (ar + 1));
        }
    }

    #[test]
    fn arity1_matches_running_example_shape() {
        // nd=1, nc=1 over one int: a*x + b >= 0
        let t = build_pred_template(&"X".to_string(), &[Sort::Int], &pred_params(1, 1, 1, 1))
            .unwrap();
        let LambdaBody::Pred(f) = &t.body else { panic!() };
        assert!(matches!(f, Formula::Cmp(CmpOp::Ge, _, _)));
        assert_eq!(t.unknowns.len(), 2);
    }

    #[test]
    fn all_zero_coefficients_give_top_and_bottom() {
        let t = build_pred_template(&"X".to_string(), &[Sort::Int], &pred_params(1, 1, 0, 0))
            .unwrap();
        let theta = CoeffAssignment(
            t.unknowns
                .iter()
                .map(|n| (n.clone(), 0i64))
                .collect::<StdMap<_, _>>(),
        );
        let lam = extract_lambda(&t, &theta);
        let LambdaBody::Pred(f) = &lam.body else { panic!() };
        assert_eq!(*f, Formula::True);

        let w = build_wf_template(
            &"W".to_string(),
            &[Sort::Int, Sort::Int],
            &wf_params(1, 1, 1, 1, 1, 1, 1),
        )
        .unwrap();
        let theta = CoeffAssignment(w.unknowns.iter().map(|n| (n.clone(), 0i64)).collect());
        let lam = extract_lambda(&w, &theta);
        let LambdaBody::Pred(f) = &lam.body else { panic!() };
        assert_eq!(*f, Formula::False);
    }

    #[test]
    fn wf_nl1_np1_nc0_matches_running_example() {
        // lambda (z, z'). d*z + e >= 0 /\ d*z + e > d*z' + e
        let w = build_wf_template(
            &"W".to_string(),
            &[Sort::Int, Sort::Int],
            &wf_params(1, 1, 0, 1, 1, 1, 1),
        )
        .unwrap();
        let LambdaBody::Pred(f) = &w.body else { panic!() };
        // after simplification with d=1, e=0: z >= 0 /\ z > z'
        let theta = CoeffAssignment(
            w.unknowns
                .iter()
                .map(|n| (n.clone(), if n.ends_with("!1") { 1 } else { 0 }))
                .collect(),
        );
        let lam = extract_lambda(&w, &theta);
        let LambdaBody::Pred(g) = &lam.body else { panic!() };
        let Formula::And(parts) = g else { panic!("{g:?} from {f:?}") };
        assert_eq!(parts.len(), 2);
    }

    #[test]
    fn fun_template_total_under_random_assignments() {
        let t = build_fun_template(
            &"F".to_string(),
            &[Sort::Int, Sort::Int],
            &Sort::Int,
            &{
                let mut p = VarParams::new(Family::Func, &InitialParams::default());
                for c in &mut p.comps {
                    if c.id == CompId::Nd {
                        c.value = 3;
                    }
                    if c.id == CompId::Nc {
                        c.value = 2;
                    }
                }
                p
            },
        )
        .unwrap();
        let mut seed = 77u64;
        let mut rand = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..50 {
            let theta = CoeffAssignment(
                t.unknowns
                    .iter()
                    .map(|n| (n.clone(), (rand() % 7) as i64 - 3))
                    .collect(),
            );
            let lam = extract_lambda(&t, &theta);
            for _ in 0..100 {
                let args = alloc::vec![
                    Value::Int((rand() % 21) as i64 - 10),
                    Value::Int((rand() % 21) as i64 - 10)
                ];
                let sol = crate::pfwcsp::CandidateSolution(
                    [("F".to_string(), lam.clone())].into_iter().collect(),
                );
                let r = crate::eval::SolutionResolver::new(&sol);
                let v = crate::eval::Resolver::func(
                    &r,
                    &"F".to_string(),
                    &args,
                    &mut EvalBudget::unlimited(),
                );
                assert!(v.is_ok());
            }
        }
    }

    #[test]
    fn shape_constraint_bounds_coefficients() {
        let t = build_pred_template(&"X".to_string(), &[Sort::Int], &pred_params(1, 1, 1, 1))
            .unwrap();
        // assignment with |coefficient| > ac has no aux extension satisfying
        // the shape constraint: check by brute force over aux values
        let coeff = t.unknowns[1].clone();
        let constant = t.unknowns[0].clone();
        let mut ok = false;
        for u in -3..=3i64 {
            let mut env = crate::eval::Env::new();
            env.insert(coeff.clone(), Value::Int(2));
            env.insert(constant.clone(), Value::Int(0));
            env.insert(t.aux_unknowns[0].clone(), Value::Int(u));
            if eval_formula(
                &t.shape_constraint,
                &env,
                &NoVars,
                &mut EvalBudget::unlimited(),
            )
            .unwrap()
            {
                ok = true;
            }
        }
        assert!(!ok, "coefficient 2 must violate ac = 1");
    }

    #[test]
    fn monotone_bumps_grow_pointwise() {
        let mut csp = PfwCsp::default();
        csp.pred_sorts.insert("X".into(), alloc::vec![Sort::Int]);
        csp.pred_sorts.insert("Y".into(), alloc::vec![Sort::Int]);
        let p0 = ParamVector::initial(&csp, &InitialParams::default(), 3);
        let mut p = p0.clone();
        for i in 0..20 {
            let implicated = BTreeSet::from([if i % 2 == 0 { "X" } else { "Y" }.to_string()]);
            let next = p.bump(&implicated);
            assert!(p.le(&next), "bump not monotone at step {i}");
            assert!(p != next);
            p = next;
        }
        assert!(p0.le(&p));
    }

    #[test]
    fn fairness_catches_up_lagging_components() {
        let mut csp = PfwCsp::default();
        csp.pred_sorts.insert("X".into(), alloc::vec![Sort::Int]);
        csp.pred_sorts.insert("Y".into(), alloc::vec![Sort::Int]);
        let cap = 3;
        let mut p = ParamVector::initial(&csp, &InitialParams::default(), cap);
        // adversarial: always implicate X only
        let implicated = BTreeSet::from(["X".to_string()]);
        for _ in 0..30 {
            p = p.bump(&implicated);
        }
        let max_bumps = p
            .vars
            .values()
            .flat_map(|v| v.comps.iter().map(|c| c.bumps))
            .max()
            .unwrap();
        for (name, v) in &p.vars {
            for c in &v.comps {
                assert!(
                    c.bumps + cap >= max_bumps,
                    "component {:?} of {name} lags: {} vs {max_bumps}",
                    c.id,
                    c.bumps
                );
            }
        }
        // growth floor: after n bumps every component has been bumped at
        // least (n / comps_per_var) - cap times
        let n = 30u32;
        let per_var = n / 4 - cap; // X has 4 components, round-robin
        for v in p.vars.values() {
            for c in &v.comps {
                assert!(c.bumps >= per_var, "{:?}: {} < {per_var}", c.id, c.bumps);
            }
        }
    }

    #[test]
    fn bump_is_deterministic() {
        let mut csp = PfwCsp::default();
        csp.pred_sorts.insert("X".into(), alloc::vec![Sort::Int]);
        let p = ParamVector::initial(&csp, &InitialParams::default(), 3);
        let implicated = BTreeSet::from(["X".to_string()]);
        assert_eq!(p.bump(&implicated), p.bump(&implicated));
    }
}
