//! Front-end translators into MuCLP: linear-time verification of a labeled
//! transition system against a Büchi automaton, safety/reachability/LTL
//! games, and bisimulation queries.
//!
//! Transition systems are symbolic: a transition is a formula over the
//! state variables and their primed copies (`x` and `x'`).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::ast::{
    Equation, FixKind, Formula, FreshNames, MuClpProgram, Name, Sort, Term, Value,
};
use crate::parse::{parse_formula_in_context, ParseError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicLts {
    pub state_vars: Vec<(Name, Sort)>,
    pub labels: Vec<Name>,
    /// Transition guard per label, over `state_vars` and their primed
    /// copies.
    pub transitions: BTreeMap<Name, Formula>,
}

impl SymbolicLts {
    pub fn primed_vars(&self) -> Vec<(Name, Sort)> {
        self.state_vars
            .iter()
            .map(|(x, s)| (primed(x), s.clone()))
            .collect()
    }
}

pub fn primed(x: &str) -> Name {
    format!("{x}'")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuchiAutomaton {
    pub states: Vec<Name>,
    pub labels: Vec<Name>,
    pub delta: BTreeMap<(Name, Name), Vec<Name>>,
    pub init: Name,
    pub final_states: BTreeSet<Name>,
}

impl BuchiAutomaton {
    pub fn successors(&self, q: &Name, label: &Name) -> &[Name] {
        self.delta
            .get(&(q.clone(), label.clone()))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    fn alpha(&self, q: &Name) -> FixKind {
        if self.final_states.contains(q) {
            FixKind::Nu
        } else {
            FixKind::Mu
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Objective {
    Safety(Formula),
    Reach(Formula),
    Ltl(BuchiAutomaton),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSpec {
    pub lts: SymbolicLts,
    /// The ego player's labels (the player trying to win the objective).
    pub exists_labels: BTreeSet<Name>,
    /// The adversary's labels.
    pub forall_labels: BTreeSet<Name>,
    pub objective: Objective,
    pub init: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EncodeError {
    LabelMismatch(String),
    WrongObjective(String),
    Parse(ParseError),
    Malformed(String),
}

impl core::fmt::Display for EncodeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EncodeError::LabelMismatch(m) => write!(f, "label mismatch: {m}"),
            EncodeError::WrongObjective(m) => write!(f, "wrong objective kind: {m}"),
            EncodeError::Parse(e) => write!(f, "{e}"),
            EncodeError::Malformed(m) => write!(f, "{m}"),
        }
    }
}

impl From<ParseError> for EncodeError {
    fn from(e: ParseError) -> Self {
        EncodeError::Parse(e)
    }
}

fn vars_of(params: &[(Name, Sort)]) -> Vec<Term> {
    params
        .iter()
        .map(|(x, s)| Term::Var(x.clone(), s.clone()))
        .collect()
}

/// Rename a transition guard so that unprimed variables become `from` and
/// primed variables become `to`.
fn guard_between(
    lts: &SymbolicLts,
    guard: &Formula,
    from: &[(Name, Sort)],
    to: &[(Name, Sort)],
    fresh: &mut FreshNames,
) -> Formula {
    let mut map: BTreeMap<Name, Term> = BTreeMap::new();
    for ((x, s), (f, _)) in lts.state_vars.iter().zip(from) {
        map.insert(x.clone(), Term::Var(f.clone(), s.clone()));
    }
    for ((x, s), (t, _)) in lts.state_vars.iter().zip(to) {
        map.insert(primed(x), Term::Var(t.clone(), s.clone()));
    }
    crate::transform::subst_term_vars(guard, &map, fresh)
}

fn check_labels(lts: &SymbolicLts, labels: &[Name]) -> Result<(), EncodeError> {
    let lts_labels: BTreeSet<&Name> = lts.labels.iter().collect();
    let other: BTreeSet<&Name> = labels.iter().collect();
    if lts_labels != other {
        return Err(EncodeError::LabelMismatch(format!(
            "LTS labels {:?} vs {:?}",
            lts.labels, labels
        )));
    }
    Ok(())
}

fn pred_name(base: &str, q: &Name, alpha: FixKind) -> Name {
    let a = match alpha {
        FixKind::Mu => "mu",
        FixKind::Nu => "nu",
    };
    format!("{base}_{q}_{a}")
}

/// Order equations for a mixed mu/nu system: strongly connected components
/// of the dependency graph in topological order (callers before callees),
/// nu-equations before mu-equations inside each component.
fn order_equations(equations: Vec<Equation>) -> Vec<Equation> {
    let index: BTreeMap<Name, usize> = equations
        .iter()
        .enumerate()
        .map(|(i, eq)| (eq.head.clone(), i))
        .collect();
    let adj: Vec<BTreeSet<usize>> = equations
        .iter()
        .map(|eq| {
            crate::ast::formula_pred_apps(&eq.body)
                .into_iter()
                .filter_map(|p| index.get(&p).copied())
                .collect()
        })
        .collect();
    // Tarjan emits components in reverse topological order (callees first);
    // reverse to put callers first.
    let mut sccs = tarjan(&adj);
    sccs.reverse();
    let mut out = Vec::with_capacity(equations.len());
    for scc in sccs {
        let mut nu: Vec<usize> = scc
            .iter()
            .copied()
            .filter(|i| equations[*i].kind == FixKind::Nu)
            .collect();
        let mut mu: Vec<usize> = scc
            .iter()
            .copied()
            .filter(|i| equations[*i].kind == FixKind::Mu)
            .collect();
        nu.sort_unstable();
        mu.sort_unstable();
        for i in nu.into_iter().chain(mu) {
            out.push(equations[i].clone());
        }
    }
    out
}

fn tarjan(adj: &[BTreeSet<usize>]) -> Vec<Vec<usize>> {
    struct T<'a> {
        adj: &'a [BTreeSet<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on: Vec<bool>,
        stack: Vec<usize>,
        n: usize,
        out: Vec<Vec<usize>>,
    }
    impl T<'_> {
        fn visit(&mut self, v: usize) {
            self.index[v] = Some(self.n);
            self.low[v] = self.n;
            self.n += 1;
            self.stack.push(v);
            self.on[v] = true;
            for w in self.adj[v].iter().copied() {
                match self.index[w] {
                    None => {
                        self.visit(w);
                        self.low[v] = self.low[v].min(self.low[w]);
                    }
                    Some(ix) if self.on[w] => self.low[v] = self.low[v].min(ix),
                    _ => {}
                }
            }
            if Some(self.low[v]) == self.index[v] {
                let mut scc = Vec::new();
                loop {
                    let w = self.stack.pop().unwrap();
                    self.on[w] = false;
                    scc.push(w);
                    if w == v {
                        break;
                    }
                }
                scc.sort_unstable();
                self.out.push(scc);
            }
        }
    }
    let mut t = T {
        adj,
        index: vec![None; adj.len()],
        low: vec![0; adj.len()],
        on: vec![false; adj.len()],
        stack: Vec::new(),
        n: 0,
        out: Vec::new(),
    };
    for v in 0..adj.len() {
        if t.index[v].is_none() {
            t.visit(v);
        }
    }
    t.out
}

/// Linear-time verification: every infinite run of the LTS from a state
/// satisfying `init` must be accepted by the automaton. One equation per
/// (state, fixpoint-kind) pair reachable from the initial pair.
pub fn encode_buchi(
    lts: &SymbolicLts,
    buchi: &BuchiAutomaton,
    init: &Formula,
) -> Result<MuClpProgram, EncodeError> {
    check_labels(lts, &buchi.labels)?;
    let mut fresh = FreshNames::new();
    // reachable (q, alpha) pairs from (init, nu)
    let start = (buchi.init.clone(), FixKind::Nu);
    let mut reachable: BTreeSet<(Name, FixKind)> = BTreeSet::new();
    let mut work = vec![start.clone()];
    while let Some(pair) = work.pop() {
        if !reachable.insert(pair.clone()) {
            continue;
        }
        let (q, _) = pair;
        for label in &buchi.labels {
            for q2 in buchi.successors(&q, label) {
                let next = (q2.clone(), buchi.alpha(q2));
                if !reachable.contains(&next) {
                    work.push(next);
                }
            }
        }
    }
    let mut ordered: Vec<(Name, FixKind)> = reachable.into_iter().collect();
    // keep the initial pair first for readability; order_equations fixes
    // the semantic order anyway
    ordered.sort_by_key(|p| (p != &start, p.clone()));

    let mut equations = Vec::new();
    for (q, alpha) in &ordered {
        let params: Vec<(Name, Sort)> = lts
            .state_vars
            .iter()
            .map(|(x, s)| (fresh.fresh(x), s.clone()))
            .collect();
        let next: Vec<(Name, Sort)> = lts
            .state_vars
            .iter()
            .map(|(x, s)| (fresh.fresh(&format!("{x}n")), s.clone()))
            .collect();
        let mut conjuncts = Vec::new();
        for label in &buchi.labels {
            let guard = guard_between(
                lts,
                &lts.transitions[label],
                &params,
                &next,
                &mut fresh,
            );
            let succs = buchi.successors(q, label);
            let targets = Formula::or(
                succs
                    .iter()
                    .map(|q2| {
                        Formula::PredApp(
                            pred_name("Z", q2, buchi.alpha(q2)),
                            vars_of(&next),
                        )
                    })
                    .collect(),
            );
            conjuncts.push(Formula::forall(
                next.clone(),
                Formula::implies(guard, targets),
            ));
        }
        equations.push(Equation {
            head: pred_name("Z", q, *alpha),
            params,
            kind: *alpha,
            body: Formula::and(conjuncts),
        });
    }
    let equations = order_equations(equations);

    let qvars: Vec<(Name, Sort)> = lts.state_vars.clone();
    let query = Formula::forall(
        qvars.clone(),
        Formula::implies(
            init.clone(),
            Formula::PredApp(pred_name("Z", &buchi.init, FixKind::Nu), vars_of(&qvars)),
        ),
    );
    Ok(MuClpProgram { equations, query })
}

/// One-step moves of a player: the disjunction of its labels' guards.
fn player_step(
    lts: &SymbolicLts,
    labels: &BTreeSet<Name>,
    from: &[(Name, Sort)],
    to: &[(Name, Sort)],
    fresh: &mut FreshNames,
) -> Formula {
    Formula::or(
        lts.labels
            .iter()
            .filter(|l| labels.contains(*l))
            .map(|l| guard_between(lts, &lts.transitions[l], from, to, fresh))
            .collect(),
    )
}

/// Safety game: the ego player must keep the play inside the safe region
/// forever, moving second in each round.
pub fn encode_safety_game(g: &GameSpec) -> Result<MuClpProgram, EncodeError> {
    let Objective::Safety(safe) = &g.objective else {
        return Err(EncodeError::WrongObjective(String::from("expected safety")));
    };
    check_partition(g)?;
    let mut fresh = FreshNames::new();
    let params = g.lts.state_vars.clone();
    let mid: Vec<(Name, Sort)> = params
        .iter()
        .map(|(x, s)| (fresh.fresh(&format!("{x}a")), s.clone()))
        .collect();
    let end: Vec<(Name, Sort)> = params
        .iter()
        .map(|(x, s)| (fresh.fresh(&format!("{x}e")), s.clone()))
        .collect();
    let safe_now = safe.clone();
    let safe_mid = rename_formula(safe, &params, &mid, &mut fresh);
    let adv = player_step(&g.lts, &g.forall_labels, &params, &mid, &mut fresh);
    let ego = player_step(&g.lts, &g.exists_labels, &mid, &end, &mut fresh);
    let body = Formula::and2(
        safe_now,
        Formula::forall(
            mid.clone(),
            Formula::implies(
                adv,
                Formula::and2(
                    safe_mid,
                    Formula::exists(
                        end.clone(),
                        Formula::and2(ego, Formula::PredApp("sg".into(), vars_of(&end))),
                    ),
                ),
            ),
        ),
    );
    let query = Formula::forall(
        params.clone(),
        Formula::implies(g.init.clone(), Formula::PredApp("sg".into(), vars_of(&params))),
    );
    Ok(MuClpProgram {
        equations: vec![Equation {
            head: "sg".into(),
            params,
            kind: FixKind::Nu,
            body,
        }],
        query,
    })
}

/// Reachability game: the ego player must eventually reach the target
/// region; symmetric to the safety game with a least fixpoint.
pub fn encode_reachability_game(g: &GameSpec) -> Result<MuClpProgram, EncodeError> {
    let Objective::Reach(reach) = &g.objective else {
        return Err(EncodeError::WrongObjective(String::from(
            "expected reachability",
        )));
    };
    check_partition(g)?;
    let mut fresh = FreshNames::new();
    let params = g.lts.state_vars.clone();
    let mid: Vec<(Name, Sort)> = params
        .iter()
        .map(|(x, s)| (fresh.fresh(&format!("{x}a")), s.clone()))
        .collect();
    let end: Vec<(Name, Sort)> = params
        .iter()
        .map(|(x, s)| (fresh.fresh(&format!("{x}e")), s.clone()))
        .collect();
    let reach_now = reach.clone();
    let reach_mid = rename_formula(reach, &params, &mid, &mut fresh);
    let adv = player_step(&g.lts, &g.forall_labels, &params, &mid, &mut fresh);
    let ego = player_step(&g.lts, &g.exists_labels, &mid, &end, &mut fresh);
    let body = Formula::or2(
        reach_now,
        Formula::forall(
            mid.clone(),
            Formula::implies(
                adv,
                Formula::or2(
                    reach_mid,
                    Formula::exists(
                        end.clone(),
                        Formula::and2(ego, Formula::PredApp("rg".into(), vars_of(&end))),
                    ),
                ),
            ),
        ),
    );
    let query = Formula::forall(
        params.clone(),
        Formula::implies(g.init.clone(), Formula::PredApp("rg".into(), vars_of(&params))),
    );
    Ok(MuClpProgram {
        equations: vec![Equation {
            head: "rg".into(),
            params,
            kind: FixKind::Mu,
            body,
        }],
        query,
    })
}

/// LTL game: the adversary moves, the automaton steps on the adversary's
/// label, then the ego player moves and the automaton steps again; the
/// fixpoint kind of the target predicate is co-inductive when either
/// intermediate automaton state is accepting.
pub fn encode_ltl_game(g: &GameSpec) -> Result<MuClpProgram, EncodeError> {
    let Objective::Ltl(buchi) = &g.objective else {
        return Err(EncodeError::WrongObjective(String::from("expected LTL")));
    };
    check_partition(g)?;
    check_labels(&g.lts, &buchi.labels)?;
    let mut fresh = FreshNames::new();

    // alpha for the pair of steps
    let pair_alpha = |q1: &Name, q2: &Name| -> FixKind {
        if buchi.final_states.contains(q1) || buchi.final_states.contains(q2) {
            FixKind::Nu
        } else {
            FixKind::Mu
        }
    };

    let start = (buchi.init.clone(), FixKind::Nu);
    let mut reachable: BTreeSet<(Name, FixKind)> = BTreeSet::new();
    let mut work = vec![start.clone()];
    while let Some(pair) = work.pop() {
        if !reachable.insert(pair.clone()) {
            continue;
        }
        let (q, _) = pair;
        for la in &g.forall_labels {
            for q1 in buchi.successors(&q, la) {
                for le in &g.exists_labels {
                    for q2 in buchi.successors(q1, le) {
                        let next = (q2.clone(), pair_alpha(q1, q2));
                        if !reachable.contains(&next) {
                            work.push(next);
                        }
                    }
                }
            }
        }
    }
    let mut ordered: Vec<(Name, FixKind)> = reachable.into_iter().collect();
    ordered.sort_by_key(|p| (p != &start, p.clone()));

    let mut equations = Vec::new();
    for (q, alpha) in &ordered {
        let params: Vec<(Name, Sort)> = g
            .lts
            .state_vars
            .iter()
            .map(|(x, s)| (fresh.fresh(x), s.clone()))
            .collect();
        let mid: Vec<(Name, Sort)> = g
            .lts
            .state_vars
            .iter()
            .map(|(x, s)| (fresh.fresh(&format!("{x}a")), s.clone()))
            .collect();
        let mut conjuncts = Vec::new();
        for la in g.lts.labels.iter().filter(|l| g.forall_labels.contains(*l)) {
            let adv_guard = guard_between(
                &g.lts,
                &g.lts.transitions[la],
                &params,
                &mid,
                &mut fresh,
            );
            let mut responses = Vec::new();
            for q1 in buchi.successors(q, la) {
                for le in g.lts.labels.iter().filter(|l| g.exists_labels.contains(*l)) {
                    for q2 in buchi.successors(q1, le) {
                        let end: Vec<(Name, Sort)> = g
                            .lts
                            .state_vars
                            .iter()
                            .map(|(x, s)| (fresh.fresh(&format!("{x}e")), s.clone()))
                            .collect();
                        let ego_guard = guard_between(
                            &g.lts,
                            &g.lts.transitions[le],
                            &mid,
                            &end,
                            &mut fresh,
                        );
                        responses.push(Formula::exists(
                            end.clone(),
                            Formula::and2(
                                ego_guard,
                                Formula::PredApp(
                                    pred_name("G", q2, pair_alpha(q1, q2)),
                                    vars_of(&end),
                                ),
                            ),
                        ));
                    }
                }
            }
            conjuncts.push(Formula::forall(
                mid.clone(),
                Formula::implies(adv_guard, Formula::or(responses)),
            ));
        }
        equations.push(Equation {
            head: pred_name("G", q, *alpha),
            params,
            kind: *alpha,
            body: Formula::and(conjuncts),
        });
    }
    let equations = order_equations(equations);
    let qvars = g.lts.state_vars.clone();
    let query = Formula::forall(
        qvars.clone(),
        Formula::implies(
            g.init.clone(),
            Formula::PredApp(pred_name("G", &buchi.init, FixKind::Nu), vars_of(&qvars)),
        ),
    );
    Ok(MuClpProgram { equations, query })
}

fn check_partition(g: &GameSpec) -> Result<(), EncodeError> {
    let all: BTreeSet<Name> = g.lts.labels.iter().cloned().collect();
    let union: BTreeSet<Name> = g
        .exists_labels
        .union(&g.forall_labels)
        .cloned()
        .collect();
    if union != all || !g.exists_labels.is_disjoint(&g.forall_labels) {
        return Err(EncodeError::LabelMismatch(String::from(
            "player labels must partition the LTS labels",
        )));
    }
    Ok(())
}

fn rename_formula(
    f: &Formula,
    from: &[(Name, Sort)],
    to: &[(Name, Sort)],
    fresh: &mut FreshNames,
) -> Formula {
    let map: BTreeMap<Name, Term> = from
        .iter()
        .zip(to)
        .map(|((x, s), (y, _))| (x.clone(), Term::Var(y.clone(), s.clone())))
        .collect();
    crate::transform::subst_term_vars(f, &map, fresh)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BisimQuery {
    /// Are these two concrete states bisimilar?
    Pairs(Vec<Value>, Vec<Value>),
    /// Lower bound: every pair satisfying the formula is bisimilar.
    LowerBound(Formula),
    /// Upper bound: every bisimilar pair satisfies the formula (emitted via
    /// the inductive dual).
    UpperBound(Formula),
}

/// Bisimulation between two LTSs with a shared alphabet. The relation is
/// co-inductive; upper-bound queries go through its De Morgan dual.
pub fn encode_bisimulation(
    lts1: &SymbolicLts,
    lts2: &SymbolicLts,
    query: &BisimQuery,
) -> Result<MuClpProgram, EncodeError> {
    if lts1.labels != lts2.labels {
        return Err(EncodeError::LabelMismatch(String::from(
            "bisimulation needs a shared alphabet",
        )));
    }
    let mut fresh = FreshNames::new();
    let params1: Vec<(Name, Sort)> = lts1
        .state_vars
        .iter()
        .map(|(x, s)| (fresh.fresh(&format!("{x}1")), s.clone()))
        .collect();
    let params2: Vec<(Name, Sort)> = lts2
        .state_vars
        .iter()
        .map(|(x, s)| (fresh.fresh(&format!("{x}2")), s.clone()))
        .collect();
    let mut params = params1.clone();
    params.extend(params2.iter().cloned());

    let mut conjuncts = Vec::new();
    for label in &lts1.labels {
        // forward: every move of system 1 is matched by system 2
        let y1: Vec<(Name, Sort)> = lts1
            .state_vars
            .iter()
            .map(|(x, s)| (fresh.fresh(&format!("{x}1s")), s.clone()))
            .collect();
        let y2: Vec<(Name, Sort)> = lts2
            .state_vars
            .iter()
            .map(|(x, s)| (fresh.fresh(&format!("{x}2s")), s.clone()))
            .collect();
        let step1 = guard_between(lts1, &lts1.transitions[label], &params1, &y1, &mut fresh);
        let step2 = guard_between(lts2, &lts2.transitions[label], &params2, &y2, &mut fresh);
        let mut rec_args = vars_of(&y1);
        rec_args.extend(vars_of(&y2));
        conjuncts.push(Formula::forall(
            y1.clone(),
            Formula::implies(
                step1.clone(),
                Formula::exists(
                    y2.clone(),
                    Formula::and2(
                        step2.clone(),
                        Formula::PredApp("bisim".into(), rec_args.clone()),
                    ),
                ),
            ),
        ));
        // backward: every move of system 2 is matched by system 1
        let z1: Vec<(Name, Sort)> = lts1
            .state_vars
            .iter()
            .map(|(x, s)| (fresh.fresh(&format!("{x}1t")), s.clone()))
            .collect();
        let z2: Vec<(Name, Sort)> = lts2
            .state_vars
            .iter()
            .map(|(x, s)| (fresh.fresh(&format!("{x}2t")), s.clone()))
            .collect();
        let step1b = guard_between(lts1, &lts1.transitions[label], &params1, &z1, &mut fresh);
        let step2b = guard_between(lts2, &lts2.transitions[label], &params2, &z2, &mut fresh);
        let mut rec_args2 = vars_of(&z1);
        rec_args2.extend(vars_of(&z2));
        conjuncts.push(Formula::forall(
            z2.clone(),
            Formula::implies(
                step2b,
                Formula::exists(
                    z1.clone(),
                    Formula::and2(step1b, Formula::PredApp("bisim".into(), rec_args2)),
                ),
            ),
        ));
    }
    let program = MuClpProgram {
        equations: vec![Equation {
            head: "bisim".into(),
            params: params.clone(),
            kind: FixKind::Nu,
            body: Formula::and(conjuncts),
        }],
        query: Formula::True,
    };

    let query = match query {
        BisimQuery::Pairs(v1, v2) => {
            if v1.len() != lts1.state_vars.len() || v2.len() != lts2.state_vars.len() {
                return Err(EncodeError::Malformed(String::from(
                    "bisimulation query arity mismatch",
                )));
            }
            let mut args: Vec<Term> = v1.iter().map(|v| v.as_term()).collect();
            args.extend(v2.iter().map(|v| v.as_term()));
            Formula::PredApp("bisim".into(), args)
        }
        BisimQuery::LowerBound(f) => Formula::forall(
            params.clone(),
            Formula::implies(f.clone(), Formula::PredApp("bisim".into(), vars_of(&params))),
        ),
        BisimQuery::UpperBound(f) => {
            // bisim => f  is  not f => bisim_dual; emit the dual program
            let dual = crate::transform::demorgan_dual(&program);
            let dual_head = crate::transform::dual_name(&"bisim".to_string());
            let query = Formula::forall(
                params.clone(),
                Formula::implies(
                    Formula::not(f.clone()),
                    Formula::PredApp(dual_head, vars_of(&params)),
                ),
            );
            return Ok(MuClpProgram {
                equations: dual.equations,
                query,
            });
        }
    };
    Ok(MuClpProgram {
        equations: program.equations,
        query,
    })
}

/// Parse the structured text formats for LTSs, automata, and games. The
/// expression syntax is shared with the MuCLP format.
///
/// ```text
/// # .lts
/// vars x: int, y: int;
/// labels a, b;
/// trans a: x <= 3 /\ x' = x + 1 /\ y' = y;
/// init x = 0 /\ y = 0;
///
/// # .buchi
/// states q0, q1;
/// labels a, b;
/// init q0;
/// final q0;
/// delta q0 a -> q0, q1;
///
/// # .game (lts sections plus)
/// exists a;
/// forall b;
/// safe x <= 5;            # or: reach x >= 5;  or: buchi { ... }
/// ```
#[derive(Debug, Clone, Default)]
pub struct LtsFile {
    pub lts: SymbolicLts,
    pub init: Option<Formula>,
    pub exists_labels: BTreeSet<Name>,
    pub forall_labels: BTreeSet<Name>,
    pub safe: Option<Formula>,
    pub reach: Option<Formula>,
    pub buchi: Option<BuchiAutomaton>,
}

impl Default for SymbolicLts {
    fn default() -> Self {
        SymbolicLts {
            state_vars: Vec::new(),
            labels: Vec::new(),
            transitions: BTreeMap::new(),
        }
    }
}

fn split_sections(text: &str) -> Vec<(String, String)> {
    // statements are `keyword ...;` possibly spanning lines; '#' comments
    let mut cleaned = String::new();
    for line in text.lines() {
        let line = match line.find('#') {
            Some(ix) => &line[..ix],
            None => line,
        };
        cleaned.push_str(line);
        cleaned.push('\n');
    }
    cleaned
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|stmt| {
            let (kw, rest) = match stmt.find(char::is_whitespace) {
                Some(ix) => (&stmt[..ix], stmt[ix..].trim()),
                None => (stmt, ""),
            };
            (kw.to_string(), rest.to_string())
        })
        .collect()
}

fn parse_name_list(s: &str) -> Vec<Name> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.to_string())
        .collect()
}

pub fn parse_lts_file(text: &str) -> Result<LtsFile, EncodeError> {
    let mut out = LtsFile::default();
    let mut buchi_states: Vec<Name> = Vec::new();
    let mut buchi_labels: Vec<Name> = Vec::new();
    let mut buchi_init: Option<Name> = None;
    let mut buchi_final: BTreeSet<Name> = BTreeSet::new();
    let mut buchi_delta: BTreeMap<(Name, Name), Vec<Name>> = BTreeMap::new();
    let mut saw_buchi = false;

    for (kw, rest) in split_sections(text) {
        match kw.as_str() {
            "vars" => {
                for item in rest.split(',') {
                    let item = item.trim();
                    let Some((name, sort)) = item.split_once(':') else {
                        return Err(EncodeError::Malformed(format!("bad var decl `{item}`")));
                    };
                    let sort = match sort.trim() {
                        "int" => Sort::Int,
                        "bool" => Sort::Bool,
                        other => {
                            return Err(EncodeError::Malformed(format!("bad sort `{other}`")))
                        }
                    };
                    out.lts.state_vars.push((name.trim().to_string(), sort));
                }
            }
            "labels" => out.lts.labels = parse_name_list(&rest),
            "trans" => {
                let Some((label, guard)) = rest.split_once(':') else {
                    return Err(EncodeError::Malformed(format!("bad trans `{rest}`")));
                };
                let mut vars = out.lts.state_vars.clone();
                vars.extend(out.lts.primed_vars());
                let f = parse_formula_in_context(guard.trim(), &vars, &BTreeMap::new())?;
                out.lts
                    .transitions
                    .insert(label.trim().to_string(), f);
            }
            "init" => {
                // in .buchi files `init q0`, in .lts/.game files a formula
                if rest.chars().all(|c| c.is_alphanumeric() || c == '_')
                    && buchi_states.contains(&rest.to_string())
                {
                    buchi_init = Some(rest.to_string());
                } else {
                    let f =
                        parse_formula_in_context(&rest, &out.lts.state_vars, &BTreeMap::new())?;
                    out.init = Some(f);
                }
            }
            "exists" => out.exists_labels = parse_name_list(&rest).into_iter().collect(),
            "forall" => out.forall_labels = parse_name_list(&rest).into_iter().collect(),
            "safe" => {
                let f = parse_formula_in_context(&rest, &out.lts.state_vars, &BTreeMap::new())?;
                out.safe = Some(f);
            }
            "reach" => {
                let f = parse_formula_in_context(&rest, &out.lts.state_vars, &BTreeMap::new())?;
                out.reach = Some(f);
            }
            "states" => {
                buchi_states = parse_name_list(&rest);
                saw_buchi = true;
            }
            "alabels" => buchi_labels = parse_name_list(&rest),
            "final" => {
                buchi_final = parse_name_list(&rest).into_iter().collect();
                saw_buchi = true;
            }
            "delta" => {
                let Some((lhs, rhs)) = rest.split_once("->") else {
                    return Err(EncodeError::Malformed(format!("bad delta `{rest}`")));
                };
                let parts: Vec<&str> = lhs.split_whitespace().collect();
                let [q, label] = parts.as_slice() else {
                    return Err(EncodeError::Malformed(format!("bad delta lhs `{lhs}`")));
                };
                buchi_delta.insert(
                    (q.to_string(), label.to_string()),
                    parse_name_list(rhs),
                );
                saw_buchi = true;
            }
            other => {
                return Err(EncodeError::Malformed(format!("unknown section `{other}`")))
            }
        }
    }
    if saw_buchi {
        let labels = if buchi_labels.is_empty() {
            out.lts.labels.clone()
        } else {
            buchi_labels
        };
        let init = buchi_init.ok_or_else(|| {
            EncodeError::Malformed(String::from("automaton missing init state"))
        })?;
        out.buchi = Some(BuchiAutomaton {
            states: buchi_states,
            labels,
            delta: buchi_delta,
            init,
            final_states: buchi_final,
        });
    }
    Ok(out)
}
