//! Explicit finite-state oracles shared by the encoder test suites:
//! enumerated transition relations over an integer box, direct fixpoint
//! game solvers, bisimilarity refinement, and a clamped random LTS
//! generator whose arithmetic stays inside the box.
//!
//! Everything here works on enumerated state sets and never touches the
//! formula pipeline beyond ground guard evaluation.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use muclp::ast::{CmpOp, FixKind, Formula, Sort, Term, Value};
use muclp::encoders::{
    encode_bisimulation, encode_buchi, encode_ltl_game, encode_reachability_game,
    encode_safety_game, BisimQuery, BuchiAutomaton, GameSpec, Objective, SymbolicLts,
};
use muclp::eval::{bounded_evaluate, eval_formula, BoundedVerdict, Env, EvalBudget, NoVars};
use muclp::gen::Rng;
use muclp::wellformed::check_wellformed;

pub fn steps() -> EvalBudget<'static> {
    EvalBudget::with_steps(400_000_000)
}

pub type State = Vec<i64>;

/// Explicit transition relation of a symbolic LTS over the box
/// [-bound, bound]^n, per label.
pub fn explicit_steps(
    lts: &SymbolicLts,
    bound: i64,
) -> (Vec<State>, BTreeMap<String, BTreeSet<(usize, usize)>>) {
    let n = lts.state_vars.len();
    let mut states: Vec<State> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for s in &states {
            for v in -bound..=bound {
                let mut t = s.clone();
                t.push(v);
                next.push(t);
            }
        }
        states = next;
    }
    let index: BTreeMap<&State, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut rel: BTreeMap<String, BTreeSet<(usize, usize)>> = BTreeMap::new();
    for label in &lts.labels {
        let guard = &lts.transitions[label];
        let mut edges = BTreeSet::new();
        for (i, from) in states.iter().enumerate() {
            for to in &states {
                let mut env = Env::new();
                for ((x, _), v) in lts.state_vars.iter().zip(from) {
                    env.insert(x.clone(), Value::Int(*v));
                }
                for ((x, _), v) in lts.state_vars.iter().zip(to) {
                    env.insert(muclp::encoders::primed(x), Value::Int(*v));
                }
                if eval_formula(guard, &env, &NoVars, &mut steps()) == Ok(true) {
                    edges.insert((i, index[to]));
                }
            }
        }
        rel.insert(label.clone(), edges);
    }
    (states, rel)
}

pub fn holds(f: &Formula, lts: &SymbolicLts, state: &State) -> bool {
    let mut env = Env::new();
    for ((x, _), v) in lts.state_vars.iter().zip(state) {
        env.insert(x.clone(), Value::Int(*v));
    }
    eval_formula(f, &env, &NoVars, &mut steps()) == Ok(true)
}

/// Büchi verification oracle: the automaton resolver must be able to keep
/// every LTS run accepted. Product nodes are (state, q); the adversary
/// picks the LTS step, the protagonist the automaton successor. Winning
/// region of "visit accepting product nodes infinitely often" via the
/// standard two-level fixpoint.
pub fn buchi_verification_oracle(
    lts: &SymbolicLts,
    buchi: &BuchiAutomaton,
    init: &Formula,
    bound: i64,
) -> bool {
    let (states, rel) = explicit_steps(lts, bound);
    let qix: BTreeMap<&String, usize> = buchi.states.iter().enumerate().map(|(i, q)| (q, i)).collect();
    let nprod = states.len() * buchi.states.len();
    let node = |s: usize, q: usize| s * buchi.states.len() + q;

    // pre(S) = nodes where for every LTS step there is an automaton
    // successor with the target in the required set (acceptance decided by
    // the successor state)
    let compute = |zset: &BTreeSet<usize>, yset: &BTreeSet<usize>| -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        'nodes: for s in 0..states.len() {
            for q in buchi.states.iter() {
                let qn = qix[q];
                for label in &lts.labels {
                    for (a, b) in rel[label].iter().filter(|(a, _)| *a == s) {
                        let _ = a;
                        let ok = buchi.successors(q, label).iter().any(|q2| {
                            let target = node(*b, qix[q2]);
                            if buchi.final_states.contains(q2) {
                                zset.contains(&target)
                            } else {
                                yset.contains(&target)
                            }
                        });
                        if !ok {
                            continue 'nodes;
                        }
                    }
                }
                out.insert(node(s, qn));
            }
        }
        out
    };
    // W = nu Z. mu Y. compute(Z, Y)
    let mut z: BTreeSet<usize> = (0..nprod).collect();
    loop {
        let mut y: BTreeSet<usize> = BTreeSet::new();
        loop {
            let y2 = compute(&z, &y);
            if y2 == y {
                break;
            }
            y = y2;
        }
        if y == z {
            break;
        }
        z = y;
    }
    // every init state accepted from (s, q_init)
    states
        .iter()
        .enumerate()
        .filter(|(_, s)| holds(init, lts, s))
        .all(|(i, _)| z.contains(&node(i, qix[&buchi.init])))
}

/// Safety game oracle: direct greatest-fixpoint iteration of
/// "safe now, and after every adversary move the state is safe and some
/// ego move stays in the region".
pub fn safety_game_oracle(g: &GameSpec, bound: i64) -> bool {
    let Objective::Safety(safe) = &g.objective else { panic!() };
    let (states, rel) = explicit_steps(&g.lts, bound);
    let adv: BTreeSet<(usize, usize)> = g
        .forall_labels
        .iter()
        .flat_map(|l| rel[l].iter().copied())
        .collect();
    let ego: BTreeSet<(usize, usize)> = g
        .exists_labels
        .iter()
        .flat_map(|l| rel[l].iter().copied())
        .collect();
    let mut win: BTreeSet<usize> = (0..states.len())
        .filter(|i| holds(safe, &g.lts, &states[*i]))
        .collect();
    loop {
        let next: BTreeSet<usize> = win
            .iter()
            .copied()
            .filter(|i| {
                adv.iter().filter(|(a, _)| a == i).all(|(_, mid)| {
                    holds(safe, &g.lts, &states[*mid])
                        && ego
                            .iter()
                            .filter(|(a, _)| a == mid)
                            .any(|(_, end)| win.contains(end))
                })
            })
            .collect();
        if next == win {
            break;
        }
        win = next;
    }
    states
        .iter()
        .enumerate()
        .filter(|(_, s)| holds(&g.init, &g.lts, s))
        .all(|(i, _)| win.contains(&i))
}

/// Reachability game oracle: least-fixpoint iteration.
pub fn reach_game_oracle(g: &GameSpec, bound: i64) -> bool {
    let Objective::Reach(reach) = &g.objective else { panic!() };
    let (states, rel) = explicit_steps(&g.lts, bound);
    let adv: BTreeSet<(usize, usize)> = g
        .forall_labels
        .iter()
        .flat_map(|l| rel[l].iter().copied())
        .collect();
    let ego: BTreeSet<(usize, usize)> = g
        .exists_labels
        .iter()
        .flat_map(|l| rel[l].iter().copied())
        .collect();
    let mut win: BTreeSet<usize> = BTreeSet::new();
    loop {
        let next: BTreeSet<usize> = (0..states.len())
            .filter(|i| {
                holds(reach, &g.lts, &states[*i])
                    || adv.iter().filter(|(a, _)| a == i).all(|(_, mid)| {
                        holds(reach, &g.lts, &states[*mid])
                            || ego
                                .iter()
                                .filter(|(a, _)| a == mid)
                                .any(|(_, end)| win.contains(end))
                    })
            })
            .collect();
        if next == win {
            break;
        }
        win = next;
    }
    states
        .iter()
        .enumerate()
        .filter(|(_, s)| holds(&g.init, &g.lts, s))
        .all(|(i, _)| win.contains(&i))
}

/// LTL game oracle over accepting transitions: the adversary moves and the
/// automaton steps, then the ego player moves and the automaton steps
/// again; a pair is accepting when either intermediate automaton state is
/// final.
pub fn ltl_game_oracle(g: &GameSpec, bound: i64) -> bool {
    let Objective::Ltl(buchi) = &g.objective else { panic!() };
    let (states, rel) = explicit_steps(&g.lts, bound);
    let qix: BTreeMap<&String, usize> = buchi.states.iter().enumerate().map(|(i, q)| (q, i)).collect();
    let node = |s: usize, q: usize| s * buchi.states.len() + q;
    let nprod = states.len() * buchi.states.len();

    let compute = |zset: &BTreeSet<usize>, yset: &BTreeSet<usize>| -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        'nodes: for s in 0..states.len() {
            'qs: for q in buchi.states.iter() {
                for la in &g.forall_labels {
                    for (_, mid) in rel[la].iter().filter(|(a, _)| *a == s) {
                        let mut ok = false;
                        'resp: for q1 in buchi.successors(q, la) {
                            for le in &g.exists_labels {
                                for (_, end) in rel[le].iter().filter(|(a, _)| a == mid) {
                                    for q2 in buchi.successors(q1, le) {
                                        let accept = buchi.final_states.contains(q1)
                                            || buchi.final_states.contains(q2);
                                        let target = node(*end, qix[q2]);
                                        if (accept && zset.contains(&target))
                                            || (!accept && yset.contains(&target))
                                        {
                                            ok = true;
                                            break 'resp;
                                        }
                                    }
                                }
                            }
                        }
                        if !ok {
                            continue 'qs;
                        }
                    }
                }
                out.insert(node(s, qix[q]));
            }
        }
        out
    };
    let mut z: BTreeSet<usize> = (0..nprod).collect();
    loop {
        let mut y = BTreeSet::new();
        loop {
            let y2 = compute(&z, &y);
            if y2 == y {
                break;
            }
            y = y2;
        }
        if y == z {
            break;
        }
        z = y;
    }
    states
        .iter()
        .enumerate()
        .filter(|(_, s)| holds(&g.init, &g.lts, s))
        .all(|(i, _)| z.contains(&node(i, qix[&buchi.init])))
}

/// Bisimilarity oracle: greatest-fixpoint refinement over explicit pairs.
pub fn bisim_oracle(lts: &SymbolicLts, bound: i64) -> BTreeSet<(usize, usize)> {
    let (states, rel) = explicit_steps(lts, bound);
    let mut sim: BTreeSet<(usize, usize)> = (0..states.len())
        .flat_map(|i| (0..states.len()).map(move |j| (i, j)))
        .collect();
    loop {
        let next: BTreeSet<(usize, usize)> = sim
            .iter()
            .copied()
            .filter(|(i, j)| {
                lts.labels.iter().all(|l| {
                    let edges = &rel[l];
                    edges.iter().filter(|(a, _)| a == i).all(|(_, i2)| {
                        edges
                            .iter()
                            .filter(|(a, _)| a == j)
                            .any(|(_, j2)| sim.contains(&(*i2, *j2)))
                    }) && edges.iter().filter(|(a, _)| a == j).all(|(_, j2)| {
                        edges
                            .iter()
                            .filter(|(a, _)| a == i)
                            .any(|(_, i2)| sim.contains(&(*i2, *j2)))
                    })
                })
            })
            .collect();
        if next == sim {
            break;
        }
        sim = next;
    }
    sim
}

pub fn verdict(p: &muclp::ast::MuClpProgram, bound: i64) -> BoundedVerdict {
    bounded_evaluate(p, bound, steps()).unwrap()
}

pub fn ctx(vars: &[(&str, Sort)]) -> Vec<(String, Sort)> {
    vars.iter().map(|(n, s)| (n.to_string(), s.clone())).collect()
}

pub fn formula(text: &str, vars: &[(String, Sort)]) -> Formula {
    muclp::parse::parse_formula_in_context(text, vars, &BTreeMap::new()).unwrap()
}

/// Clamped one-variable LTS: in-box arithmetic only.
pub fn clamped_lts(rng: &mut Rng, bound: i64) -> SymbolicLts {
    let vars = ctx(&[("x", Sort::Int)]);
    let both = {
        let mut v = vars.clone();
        v.push(("x'".to_string(), Sort::Int));
        v
    };
    let labels = vec!["a".to_string(), "b".to_string()];
    let mk_guard = |rng: &mut Rng, both: &[(String, Sort)]| -> Formula {
        let c1 = rng.int_in(-bound + 1, bound - 1);
        let c2 = rng.int_in(-bound + 1, bound - 1);
        match rng.below(4) {
            0 => formula(&format!("x <= {c1} /\\ x' = x + 1"), both),
            1 => formula(&format!("x >= {c1} /\\ x' = x - 1"), both),
            2 => formula(&format!("x' = {c1}"), both),
            _ => formula(&format!("x <= {c1} /\\ x' = {c2}"), both),
        }
    };
    let transitions = labels
        .iter()
        .map(|l| (l.clone(), mk_guard(rng, &both)))
        .collect();
    SymbolicLts {
        state_vars: vars,
        labels,
        transitions,
    }
}

