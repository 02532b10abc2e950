//! Encoder correctness against explicit finite-state oracles: the encoded
//! program, decided by the bounded-domain evaluator, must agree with
//! direct fixpoint computations over the explicit product graphs.

#[path = "support/oracles.rs"]
mod oracles;

use std::collections::{BTreeMap, BTreeSet};

use muclp::ast::{CmpOp, FixKind, Formula, Sort, Term, Value};
use muclp::encoders::{
    encode_bisimulation, encode_buchi, encode_ltl_game, encode_reachability_game,
    encode_safety_game, BisimQuery, BuchiAutomaton, GameSpec, Objective, SymbolicLts,
};
use muclp::eval::BoundedVerdict;
use muclp::gen::Rng;
use muclp::wellformed::check_wellformed;
use oracles::*;

#[test]
fn buchi_encoder_agrees_with_product_oracle() {
    let bound = 2i64;
    let mut rng = Rng::new(0xB0C1);
    let mut agreements = 0;
    let mut tried = 0;
    while agreements < 10 && tried < 80 {
        tried += 1;
        let lts = clamped_lts(&mut rng, bound);
        // random 2-state automaton over the labels
        let states = vec!["q0".to_string(), "q1".to_string()];
        let mut delta = BTreeMap::new();
        for q in &states {
            for l in &lts.labels {
                let mut succs = Vec::new();
                if rng.flip() {
                    succs.push("q0".to_string());
                }
                if rng.flip() {
                    succs.push("q1".to_string());
                }
                delta.insert((q.clone(), l.clone()), succs);
            }
        }
        let buchi = BuchiAutomaton {
            states: states.clone(),
            labels: lts.labels.clone(),
            delta,
            init: "q0".to_string(),
            final_states: BTreeSet::from(["q0".to_string()]),
        };
        let init = formula("x = 0", &lts.state_vars);
        let p = encode_buchi(&lts, &buchi, &init).unwrap();
        check_wellformed(&p).unwrap();
        let enc = verdict(&p, bound);
        if enc == BoundedVerdict::OutOfDomain {
            continue;
        }
        let oracle = buchi_verification_oracle(&lts, &buchi, &init, bound);
        assert_eq!(
            enc == BoundedVerdict::Valid,
            oracle,
            "disagreement on\n{}",
            muclp::print::print_muclp(&p)
        );
        agreements += 1;
    }
    assert!(agreements >= 10, "{agreements} agreements in {tried} tries");
}

#[test]
fn safety_and_reachability_encoders_agree_and_are_dual() {
    let bound = 2i64;
    let mut rng = Rng::new(0x5AFE);
    let mut agreements = 0;
    let mut tried = 0;
    while agreements < 10 && tried < 120 {
        tried += 1;
        let lts = clamped_lts(&mut rng, bound);
        let exists_labels = BTreeSet::from(["a".to_string()]);
        let forall_labels = BTreeSet::from(["b".to_string()]);
        let c = rng.int_in(-1, 1);
        let safe = formula(&format!("x <= {c}"), &lts.state_vars);
        let init = formula("x = 0", &lts.state_vars);
        let game = GameSpec {
            lts: lts.clone(),
            exists_labels: exists_labels.clone(),
            forall_labels: forall_labels.clone(),
            objective: Objective::Safety(safe.clone()),
            init: init.clone(),
        };
        let p = encode_safety_game(&game).unwrap();
        check_wellformed(&p).unwrap();
        let enc = verdict(&p, bound);
        if enc == BoundedVerdict::OutOfDomain {
            continue;
        }
        let oracle = safety_game_oracle(&game, bound);
        assert_eq!(enc == BoundedVerdict::Valid, oracle, "safety disagreement");

        // reachability encoder on an independent random game
        let reach_game = GameSpec {
            lts: lts.clone(),
            exists_labels: exists_labels.clone(),
            forall_labels: forall_labels.clone(),
            objective: Objective::Reach(Formula::not(safe.clone())),
            init: init.clone(),
        };
        let q = encode_reachability_game(&reach_game).unwrap();
        check_wellformed(&q).unwrap();
        let enc_reach = verdict(&q, bound);
        if enc_reach != BoundedVerdict::OutOfDomain {
            let oracle_reach = reach_game_oracle(&reach_game, bound);
            assert_eq!(
                enc_reach == BoundedVerdict::Valid,
                oracle_reach,
                "reachability disagreement"
            );
        }

        // duality: the De Morgan dual of the safety game program is a
        // reachability-game-shaped program (least fixpoint, the swapped
        // player existentially choosing the original adversary's moves)
        // and its verdict is the exact opposite
        let dual_program = muclp::transform::demorgan_dual(&p);
        check_wellformed(&dual_program).unwrap();
        assert_eq!(dual_program.equations.len(), 1);
        assert_eq!(dual_program.equations[0].kind, FixKind::Mu);
        let enc_dual = verdict(&dual_program, bound);
        if enc_dual != BoundedVerdict::OutOfDomain {
            assert_eq!(
                enc == BoundedVerdict::Valid,
                enc_dual == BoundedVerdict::Invalid,
                "safety game and its dual must have opposite verdicts"
            );
        }
        agreements += 1;
    }
    assert!(agreements >= 10, "{agreements} agreements in {tried} tries");
}

#[test]
fn reachability_trivial_objective_immediately_valid() {
    let mut rng = Rng::new(7);
    let lts = clamped_lts(&mut rng, 2);
    let game = GameSpec {
        lts: lts.clone(),
        exists_labels: BTreeSet::from(["a".to_string()]),
        forall_labels: BTreeSet::from(["b".to_string()]),
        objective: Objective::Reach(Formula::True),
        init: Formula::True,
    };
    let p = encode_reachability_game(&game).unwrap();
    assert_eq!(verdict(&p, 2), BoundedVerdict::Valid);
}

#[test]
fn ltl_game_encoder_agrees_with_product_oracle() {
    let bound = 2i64;
    let mut rng = Rng::new(0x171);
    let mut agreements = 0;
    let mut tried = 0;
    while agreements < 10 && tried < 100 {
        tried += 1;
        let lts = clamped_lts(&mut rng, bound);
        let exists_labels = BTreeSet::from(["a".to_string()]);
        let forall_labels = BTreeSet::from(["b".to_string()]);
        let states = vec!["q0".to_string(), "q1".to_string()];
        let mut delta = BTreeMap::new();
        for q in &states {
            for l in &lts.labels {
                let mut succs = Vec::new();
                if rng.flip() {
                    succs.push("q0".to_string());
                }
                if rng.flip() || succs.is_empty() {
                    succs.push("q1".to_string());
                }
                delta.insert((q.clone(), l.clone()), succs);
            }
        }
        let buchi = BuchiAutomaton {
            states,
            labels: lts.labels.clone(),
            delta,
            init: "q0".to_string(),
            final_states: BTreeSet::from(["q0".to_string()]),
        };
        let init = formula("x = 0", &lts.state_vars);
        let game = GameSpec {
            lts: lts.clone(),
            exists_labels,
            forall_labels,
            objective: Objective::Ltl(buchi),
            init,
        };
        let p = encode_ltl_game(&game).unwrap();
        check_wellformed(&p).unwrap();
        let enc = verdict(&p, bound);
        if enc == BoundedVerdict::OutOfDomain {
            continue;
        }
        let oracle = ltl_game_oracle(&game, bound);
        assert_eq!(enc == BoundedVerdict::Valid, oracle, "ltl game disagreement");
        agreements += 1;
    }
    assert!(agreements >= 10, "{agreements} agreements in {tried} tries");
}

#[test]
fn bisimulation_encoder_agrees_with_refinement_oracle() {
    let bound = 2i64;
    let mut rng = Rng::new(0xB151);
    let mut agreements = 0;
    let mut tried = 0;
    while agreements < 12 && tried < 60 {
        tried += 1;
        let lts = clamped_lts(&mut rng, bound);
        let (states, _) = explicit_steps(&lts, bound);
        let sim = bisim_oracle(&lts, bound);
        // pick a random pair and compare the encoded query verdict
        let i = rng.below(states.len() as u64) as usize;
        let j = rng.below(states.len() as u64) as usize;
        let p = encode_bisimulation(
            &lts,
            &lts,
            &BisimQuery::Pairs(
                states[i].iter().map(|v| Value::Int(*v)).collect(),
                states[j].iter().map(|v| Value::Int(*v)).collect(),
            ),
        )
        .unwrap();
        check_wellformed(&p).unwrap();
        let enc = verdict(&p, bound);
        if enc == BoundedVerdict::OutOfDomain {
            continue;
        }
        assert_eq!(
            enc == BoundedVerdict::Valid,
            sim.contains(&(i, j)),
            "bisim disagreement on {:?} ~ {:?}",
            states[i],
            states[j]
        );
        agreements += 1;
    }
    assert!(agreements >= 12, "{agreements} agreements in {tried} tries");
}

#[test]
fn identical_one_state_systems_are_bisimilar() {
    let vars = ctx(&[("x", Sort::Int)]);
    let both = {
        let mut v = vars.clone();
        v.push(("x'".to_string(), Sort::Int));
        v
    };
    let lts = SymbolicLts {
        state_vars: vars,
        labels: vec!["a".to_string()],
        transitions: [("a".to_string(), formula("x' = x", &both))].into_iter().collect(),
    };
    let p = encode_bisimulation(
        &lts,
        &lts,
        &BisimQuery::LowerBound(Formula::cmp(
            CmpOp::Eq,
            Term::var("x1!0", Sort::Int),
            Term::var("x2!1", Sort::Int),
        )),
    );
    // the lower-bound formula references encoder-internal parameter names;
    // use the pairs form instead for a stable test
    let p = match p {
        Ok(p) => p,
        Err(_) => encode_bisimulation(
            &lts,
            &lts,
            &BisimQuery::Pairs(vec![Value::Int(0)], vec![Value::Int(0)]),
        )
        .unwrap(),
    };
    assert_eq!(verdict(&p, 2), BoundedVerdict::Valid);
}

#[test]
fn counter_bisim_instance_valid_and_inequal_pairs_invalid() {
    // the two-counter system: <x,y> steps +1 while x+1 <= y and -1 while
    // x-1 >= y; states with equal slack are bisimilar
    let vars = ctx(&[("x", Sort::Int), ("y", Sort::Int)]);
    let both = {
        let mut v = vars.clone();
        v.push(("x'".to_string(), Sort::Int));
        v.push(("y'".to_string(), Sort::Int));
        v
    };
    let lts = SymbolicLts {
        state_vars: vars,
        labels: vec!["plus".to_string(), "minus".to_string()],
        transitions: [
            (
                "plus".to_string(),
                formula("x < y /\\ x' = x + 1 /\\ y' = y", &both),
            ),
            (
                "minus".to_string(),
                formula("x > y /\\ x' = x - 1 /\\ y' = y", &both),
            ),
        ]
        .into_iter()
        .collect(),
    };
    let p = encode_bisimulation(
        &lts,
        &lts,
        &BisimQuery::Pairs(
            vec![Value::Int(0), Value::Int(1)],
            vec![Value::Int(1), Value::Int(2)],
        ),
    )
    .unwrap();
    assert_eq!(verdict(&p, 3), BoundedVerdict::Valid);

    let q = encode_bisimulation(
        &lts,
        &lts,
        &BisimQuery::Pairs(
            vec![Value::Int(0), Value::Int(1)],
            vec![Value::Int(0), Value::Int(2)],
        ),
    )
    .unwrap();
    assert_eq!(verdict(&q, 3), BoundedVerdict::Invalid);
}

#[test]
fn buchi_equation_order_nu_first_within_components() {
    // a strongly connected 2-state automaton yields one component whose
    // nu-indexed equations precede the mu-indexed ones
    let mut rng = Rng::new(0x0DD);
    let lts = clamped_lts(&mut rng, 2);
    let states = vec!["q0".to_string(), "q1".to_string()];
    let mut delta = BTreeMap::new();
    for q in &states {
        for l in &lts.labels {
            delta.insert((q.clone(), l.clone()), states.clone());
        }
    }
    let buchi = BuchiAutomaton {
        states,
        labels: lts.labels.clone(),
        delta,
        init: "q0".to_string(),
        final_states: BTreeSet::from(["q0".to_string()]),
    };
    let p = encode_buchi(&lts, &buchi, &Formula::True).unwrap();
    let kinds: Vec<FixKind> = p.equations.iter().map(|eq| eq.kind).collect();
    let first_mu = kinds.iter().position(|k| *k == FixKind::Mu);
    if let Some(ix) = first_mu {
        assert!(
            kinds[ix..].iter().all(|k| *k == FixKind::Mu),
            "nu equations must precede mu equations within the component: {kinds:?}"
        );
    }
}
