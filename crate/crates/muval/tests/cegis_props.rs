//! Operation-level tests of the CEGIS machinery against the live SMT
//! backend: backend protocol behavior, example-set unsatisfiability with
//! cycle learning, resolution closure, validation countermodels, and the
//! co-CHC negation equi-satisfiability property.

mod support;

use std::collections::{BTreeMap, BTreeSet};

use muclp::ast::{CmpOp, Formula, Sort, Term, Value};
use muclp::pfwcsp::{instantiate, CandidateSolution, Clause, Lambda, PfwCsp};
use muval::cegis::{Cegis, CegisConfig, ExampleStore, ExamplesVerdict, Verdict};
use muval::smt::{SmtOutcome, SmtQuery, Validity};

fn cegis_for(csp: PfwCsp) -> Cegis {
    let mut config = CegisConfig::new(support::solver_conf());
    config.max_iterations = 60;
    config.wall_clock = std::time::Duration::from_secs(90);
    Cegis::new(csp, config)
}

fn int_clause(pos: &[(&str, i64)], neg: &[(&str, i64)]) -> Clause {
    Clause {
        constraint: Formula::False,
        pos: pos
            .iter()
            .map(|(x, v)| (x.to_string(), vec![Term::Int(*v)]))
            .collect(),
        neg: neg
            .iter()
            .map(|(x, v)| (x.to_string(), vec![Term::Int(*v)]))
            .collect(),
        term_vars: Vec::new(),
    }
}

#[test]
fn smt_backend_validity_and_countermodels() {
    let mut smt = support::solver();
    // forall y. y = 0 \/ y != 0 is valid
    let y = ("y".to_string(), Sort::Int);
    let matrix = Formula::or2(
        Formula::cmp(CmpOp::Eq, Term::var("y", Sort::Int), Term::Int(0)),
        Formula::cmp(CmpOp::Ne, Term::var("y", Sort::Int), Term::Int(0)),
    );
    assert_eq!(
        smt.check_validity(&[y.clone()], &matrix).unwrap(),
        Validity::Valid
    );
    // forall y. y >= 1 has countermodels, all falsifying
    let matrix = Formula::cmp(CmpOp::Ge, Term::var("y", Sort::Int), Term::Int(1));
    match smt.check_validity(&[y], &matrix).unwrap() {
        Validity::Countermodel(theta) => {
            let Value::Int(v) = theta["y"] else { panic!() };
            assert!(v < 1);
        }
        other => panic!("expected countermodel, got {other:?}"),
    }
}

#[test]
fn smt_backend_named_cores_recheck_unsat() {
    let mut smt = support::solver();
    let query = SmtQuery {
        decls: vec![("x".to_string(), Vec::new(), Sort::Int)],
        named: vec![
            (
                "n1".to_string(),
                Formula::cmp(CmpOp::Ge, Term::var("x", Sort::Int), Term::Int(1)),
            ),
            (
                "n2".to_string(),
                Formula::cmp(CmpOp::Le, Term::var("x", Sort::Int), Term::Int(0)),
            ),
            (
                "n3".to_string(),
                Formula::cmp(CmpOp::Le, Term::var("x", Sort::Int), Term::Int(5)),
            ),
        ],
        want_model: false,
        want_core: true,
    };
    let SmtOutcome::Unsat(core) = smt.check_sat_named(&query).unwrap() else {
        panic!("expected unsat");
    };
    assert!(!core.is_empty());
    let names: BTreeSet<&str> = core.iter().map(|s| s.as_str()).collect();
    assert!(names.is_subset(&BTreeSet::from(["n1", "n2", "n3"])));
    // the core itself must re-check unsat
    let requery = SmtQuery {
        decls: vec![("x".to_string(), Vec::new(), Sort::Int)],
        named: query
            .named
            .iter()
            .filter(|(n, _)| names.contains(n.as_str()))
            .cloned()
            .collect(),
        want_model: false,
        want_core: false,
    };
    assert!(matches!(
        smt.check_sat_named(&requery).unwrap(),
        SmtOutcome::Unsat(_)
    ));
}

#[test]
fn smt_model_parses_nested_function_bodies() {
    let mut smt = support::solver();
    // force a function model: F(1) = 5, F(2) = 7
    let query = SmtQuery {
        decls: vec![("F".to_string(), vec![Sort::Int], Sort::Int)],
        named: vec![
            (
                "a".to_string(),
                Formula::cmp(
                    CmpOp::Eq,
                    Term::App("F".to_string(), vec![Term::Int(1)]),
                    Term::Int(5),
                ),
            ),
            (
                "b".to_string(),
                Formula::cmp(
                    CmpOp::Eq,
                    Term::App("F".to_string(), vec![Term::Int(2)]),
                    Term::Int(7),
                ),
            ),
        ],
        want_model: true,
        want_core: false,
    };
    let SmtOutcome::Sat(model) = smt.check_sat_named(&query).unwrap() else {
        panic!("expected sat");
    };
    let lambda = &model.0["F"];
    assert_eq!(lambda.params.len(), 1);
    // evaluating the parsed body reproduces the constraints
    let sol = CandidateSolution([("F".to_string(), lambda.clone())].into_iter().collect());
    let resolver = muclp::eval::SolutionResolver::new(&sol);
    let mut budget = muclp::eval::EvalBudget::unlimited();
    let f1 = muclp::eval::Resolver::func(&resolver, &"F".to_string(), &[Value::Int(1)], &mut budget)
        .unwrap();
    let f2 = muclp::eval::Resolver::func(&resolver, &"F".to_string(), &[Value::Int(2)], &mut budget)
        .unwrap();
    assert_eq!(f1, Value::Int(5));
    assert_eq!(f2, Value::Int(7));
}

fn wf_only_csp() -> PfwCsp {
    let mut csp = PfwCsp::default();
    csp.pred_sorts
        .insert("WF".to_string(), vec![Sort::Int, Sort::Int]);
    csp.wf_vars.insert("WF".to_string());
    csp
}

#[test]
fn cycle_learning_unsat_for_two_cycle() {
    // positive units WF(0,1), WF(1,0): the 0 -> 1 -> 0 cycle forces a
    // learnt clause contradicting the units; exactly one learnt clause and
    // the set is unsat within a second
    let start = std::time::Instant::now();
    let mut csp = wf_only_csp();
    csp.clauses = vec![
        Clause {
            constraint: Formula::False,
            pos: vec![("WF".to_string(), vec![Term::Int(0), Term::Int(1)])],
            neg: Vec::new(),
            term_vars: Vec::new(),
        },
        Clause {
            constraint: Formula::False,
            pos: vec![("WF".to_string(), vec![Term::Int(1), Term::Int(0)])],
            neg: Vec::new(),
            term_vars: Vec::new(),
        },
    ];
    let mut cegis = cegis_for(csp.clone());
    let mut store = ExampleStore::default();
    for (ix, clause) in csp.clauses.iter().enumerate() {
        store.insert(instantiate(clause, ix, &BTreeMap::new()).unwrap());
    }
    assert_eq!(
        cegis.check_examples_unsat(&store).unwrap(),
        ExamplesVerdict::Unsat
    );
    assert!(start.elapsed() < std::time::Duration::from_secs(10));
}

#[test]
fn single_decreasing_edge_is_satisfiable() {
    let mut csp = wf_only_csp();
    csp.clauses = vec![Clause {
        constraint: Formula::False,
        pos: vec![("WF".to_string(), vec![Term::Int(1), Term::Int(0)])],
        neg: Vec::new(),
        term_vars: Vec::new(),
    }];
    let mut cegis = cegis_for(csp.clone());
    let mut store = ExampleStore::default();
    store.insert(instantiate(&csp.clauses[0], 0, &BTreeMap::new()).unwrap());
    assert_eq!(
        cegis.check_examples_unsat(&store).unwrap(),
        ExamplesVerdict::SatAssignment
    );
}

#[test]
fn empty_store_is_satisfiable() {
    let mut cegis = cegis_for(wf_only_csp());
    let store = ExampleStore::default();
    assert_eq!(
        cegis.check_examples_unsat(&store).unwrap(),
        ExamplesVerdict::SatAssignment
    );
}

#[test]
fn ground_contradiction_solves_unsat_immediately() {
    // { X(0), not X(0) }: the grounding is already contradictory
    let mut csp = PfwCsp::default();
    csp.pred_sorts.insert("X".to_string(), vec![Sort::Int]);
    csp.clauses = vec![
        int_clause(&[("X", 0)], &[]),
        int_clause(&[], &[("X", 0)]),
    ];
    let mut cegis = cegis_for(csp);
    match cegis.solve().unwrap() {
        Verdict::Unsat(examples) => assert_eq!(examples.len(), 2),
        other => panic!("expected unsat, got {other:?}"),
    }
    assert!(cegis.log.records.is_empty(), "no synthesis iteration needed");
}

#[test]
fn unit_propagation_derives_facts() {
    // instances { X(1), not X(1) \/ Y(2) } propagate the fact Y(2)
    let mut csp = PfwCsp::default();
    csp.pred_sorts.insert("X".to_string(), vec![Sort::Int]);
    csp.pred_sorts.insert("Y".to_string(), vec![Sort::Int]);
    let cegis = cegis_for(csp.clone());
    let mut store = ExampleStore::default();
    store.insert(
        instantiate(&int_clause(&[("X", 1)], &[]), 0, &BTreeMap::new()).unwrap(),
    );
    store.insert(
        instantiate(&int_clause(&[("Y", 2)], &[("X", 1)]), 1, &BTreeMap::new()).unwrap(),
    );
    cegis.resolution_closure(&mut store, 2);
    assert!(store
        .pos_facts
        .contains(&("X".to_string(), vec![Value::Int(1)])));
    assert!(store
        .pos_facts
        .contains(&("Y".to_string(), vec![Value::Int(2)])));
}

#[test]
fn resolution_grounds_clauses_against_facts() {
    // fact X(0) against clause not X(x) \/ Y(x + 1) yields instance Y(1)
    let x = Term::var("x", Sort::Int);
    let mut csp = PfwCsp::default();
    csp.pred_sorts.insert("X".to_string(), vec![Sort::Int]);
    csp.pred_sorts.insert("Y".to_string(), vec![Sort::Int]);
    csp.clauses = vec![
        int_clause(&[("X", 0)], &[]),
        Clause {
            constraint: Formula::False,
            pos: vec![("Y".to_string(), vec![Term::add(x.clone(), Term::Int(1))])],
            neg: vec![("X".to_string(), vec![x.clone()])],
            term_vars: vec![("x".to_string(), Sort::Int)],
        },
    ];
    let cegis = cegis_for(csp.clone());
    let mut store = ExampleStore::default();
    store.insert(instantiate(&csp.clauses[0], 0, &BTreeMap::new()).unwrap());
    let before = store.len();
    cegis.resolution_closure(&mut store, 2);
    assert!(store.len() > before);
    // the new instance is the grounded clause with x = 0, folded to Y(1)
    let grounded = store
        .instances
        .iter()
        .find(|i| i.source == 1)
        .expect("resolution added the grounded clause");
    assert_eq!(grounded.clause.pos[0].1[0], Term::Int(1));
    // and propagation then learns the fact Y(1)
    assert!(store
        .pos_facts
        .contains(&("Y".to_string(), vec![Value::Int(1)])));
}

#[test]
fn depth_zero_resolution_is_identity() {
    let mut csp = PfwCsp::default();
    csp.pred_sorts.insert("X".to_string(), vec![Sort::Int]);
    csp.clauses = vec![int_clause(&[("X", 0)], &[])];
    let cegis = cegis_for(csp.clone());
    let mut store = ExampleStore::default();
    store.insert(instantiate(&csp.clauses[0], 0, &BTreeMap::new()).unwrap());
    let snapshot = store.instances.clone();
    cegis.resolution_closure(&mut store, 0);
    assert_eq!(store.instances, snapshot);
    assert!(store.pos_facts.is_empty());
}

#[test]
fn negate_cochc_preserves_solver_verdict() {
    // small coCHC systems: the negated CHC system has the same verdict
    let mut rng = muclp::gen::Rng::new(0x600D);
    let mut compared = 0;
    let mut tried = 0;
    while compared < 8 && tried < 40 {
        tried += 1;
        let mut csp = muclp::gen::random_pfwcsp(&mut rng);
        csp.wf_vars.clear();
        csp.fn_vars.clear();
        csp.fn_sorts.clear();
        csp.pred_sorts.remove("W");
        csp.pred_sorts.remove("F");
        // strip clauses referencing removed symbols and extra negatives
        csp.clauses.retain(|c| {
            c.pred_vars().iter().all(|p| csp.pred_sorts.contains_key(p))
                && c.fn_vars().is_empty()
        });
        for c in &mut csp.clauses {
            c.neg.truncate(1);
            c.close_term_vars();
        }
        if csp.clauses.is_empty() {
            continue;
        }
        let Ok(negated) = csp.negate_cochc_to_chc() else {
            continue;
        };
        let mut a = cegis_for(csp.clone());
        let mut b = cegis_for(negated);
        let (va, vb) = (a.solve().unwrap(), b.solve().unwrap());
        match (va, vb) {
            (Verdict::Sat(_), Verdict::Sat(_)) | (Verdict::Unsat(_), Verdict::Unsat(_)) => {
                compared += 1;
            }
            (Verdict::Unknown(_), _) | (_, Verdict::Unknown(_)) => {}
            (va, vb) => panic!("negation changed the verdict: {va:?} vs {vb:?}"),
        }
    }
    assert!(compared >= 8, "only {compared} comparisons in {tried} tries");
}

#[test]
fn validation_countermodels_falsify_their_clause() {
    // sigma(1) from the running example fails the Y-clause with some y != 0
    let csp = muclp::pfwcsp::parse_pfwcsp(&support::fixture("running_example.pcsp")).unwrap();
    let mut cegis = cegis_for(csp.clone());
    let mut sigma = CandidateSolution::default();
    sigma.insert(
        "X".to_string(),
        Lambda::pred(vec![("x".to_string(), Sort::Int)], Formula::True),
    );
    sigma.insert(
        "Y".to_string(),
        Lambda::pred(vec![("y".to_string(), Sort::Int)], Formula::True),
    );
    sigma.insert(
        "WF_Y".to_string(),
        Lambda::pred(
            vec![("a".to_string(), Sort::Int), ("b".to_string(), Sort::Int)],
            Formula::False,
        ),
    );
    match cegis.validate(&sigma).unwrap() {
        muval::cegis::ValidationResult::Counterexamples(list) => {
            assert!(!list.is_empty());
            // the failing clause is the WF half of Y's implication, and the
            // countermodel has y != 0
            for (ix, theta) in &list {
                let clause = &csp.clauses[*ix];
                assert!(clause.pos.iter().any(|(p, _)| p == "WF_Y"));
                let Value::Int(y) = theta.values().next().unwrap() else {
                    panic!()
                };
                assert_ne!(*y, 0);
            }
        }
        other => panic!("expected counterexamples, got {other:?}"),
    }
}
