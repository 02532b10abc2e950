//! Properties of the pfwCSP data model: file-format round trips,
//! classification, solution application against finite brute force, and
//! instance grounding.

use std::collections::BTreeMap;

use muclp::ast::{CmpOp, Formula, Sort, Term, Value};
use muclp::eval::{eval_formula, Env, EvalBudget};
use muclp::gen::{assignments, random_pfwcsp, HashingResolver, Rng};
use muclp::pfwcsp::{
    instantiate, parse_pfwcsp, print_pfwcsp, CandidateSolution, Clause, Lambda, PcspClass, PfwCsp,
};

fn steps() -> EvalBudget<'static> {
    EvalBudget::with_steps(10_000_000)
}

#[test]
fn print_parse_round_trip_100_random_instances() {
    let mut rng = Rng::new(0xF00D);
    for case in 0..100 {
        let csp = random_pfwcsp(&mut rng);
        let printed = print_pfwcsp(&csp);
        let back = parse_pfwcsp(&printed).unwrap_or_else(|e| panic!("case {case}: {e}\n{printed}"));
        assert_eq!(back.pred_sorts, csp.pred_sorts, "{printed}");
        assert_eq!(back.fn_sorts, csp.fn_sorts);
        assert_eq!(back.wf_vars, csp.wf_vars);
        assert_eq!(back.clauses.len(), csp.clauses.len(), "{printed}");
        for (a, b) in back.clauses.iter().zip(&csp.clauses) {
            assert_eq!(a.pos, b.pos, "{printed}");
            assert_eq!(a.neg, b.neg, "{printed}");
            // constraint parts may re-associate; compare by truth table
            for env in assignments(&b.term_vars, -2, 2).into_iter().take(25) {
                let env: Env = env.into_iter().collect();
                let ta = eval_formula(&a.constraint, &env, &HashingResolver { salt: 1 }, &mut steps());
                let tb = eval_formula(&b.constraint, &env, &HashingResolver { salt: 1 }, &mut steps());
                assert_eq!(ta.ok(), tb.ok(), "{printed}");
            }
        }
    }
}

#[test]
fn parse_running_example_fixture() {
    let text = std::fs::read_to_string(
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/running_example.pcsp"),
    )
    .unwrap();
    let csp = parse_pfwcsp(&text).unwrap();
    // conjunctions split at clause level: 1 + 2 + 2
    assert_eq!(csp.clauses.len(), 5);
    assert_eq!(csp.wf_vars.len(), 1);
    assert!(csp.wf_vars.contains("WF_Y"));
    assert_eq!(csp.pred_sorts["WF_Y"].len(), 2, "declared arity doubles");
    // per stored clause: every clause has at most one positive and at most
    // one negative predicate literal, so the tightest label applies
    for c in &csp.clauses {
        assert!(c.pos.len() <= 1 && c.neg.len() <= 1);
    }
    assert_eq!(csp.classify(), PcspClass::LinearChc);
}

#[test]
fn empty_clause_list_is_satisfiable_by_empty_solution() {
    let csp = parse_pfwcsp("(check-sat)\n").unwrap();
    assert!(csp.clauses.is_empty());
    let applied = csp.apply_solution(&CandidateSolution::default()).unwrap();
    assert!(applied.is_empty());
}

#[test]
fn classify_monotone_under_clause_deletion() {
    let mut rng = Rng::new(0xCAFE);
    let rank = |c: PcspClass| match c {
        PcspClass::LinearChc => 0,
        PcspClass::Chc | PcspClass::CoChc => 1,
        PcspClass::General => 2,
    };
    for _ in 0..50 {
        let csp = random_pfwcsp(&mut rng);
        let full = csp.classify();
        for drop_ix in 0..csp.clauses.len() {
            let mut smaller = csp.clone();
            smaller.clauses.remove(drop_ix);
            assert!(
                rank(smaller.classify()) <= rank(full),
                "deletion moved {:?} to {:?}",
                full,
                smaller.classify()
            );
        }
    }
}

#[test]
fn reduced_p_term_is_general_class() {
    let text = std::fs::read_to_string(
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/p_term.muclp"),
    )
    .unwrap();
    let p = muclp::parse::parse_muclp(&text).unwrap();
    let (csp, _) = muclp::reduce::reduce(&p).unwrap();
    // the conjunction under I's body flattens to clauses with several
    // positive literals (not Horn), but every clause keeps exactly one
    // negative literal (its head), so reduction output is always coCHC
    assert!(csp.clauses.iter().any(|c| c.pos.len() > 1));
    assert!(csp.clauses.iter().all(|c| c.neg.len() <= 1));
    assert_eq!(csp.classify(), PcspClass::CoChc);
}

#[test]
fn apply_solution_agrees_with_finite_brute_force() {
    // validity of each applied clause formula agrees with brute force over
    // the box [-5, 5] whenever the formula's truth is box-decided false;
    // validity itself cannot be certified finitely, so the check is on
    // falsifiability: brute-force countermodels falsify the SMT-free
    // ground evaluation too
    let mut rng = Rng::new(0xAB5);
    let mut checked = 0;
    for _ in 0..50 {
        let csp = random_pfwcsp(&mut rng);
        // a simple concrete solution: P_i(xs) := sum xs >= i, F(x) := x + 1
        let mut solution = CandidateSolution::default();
        for (ix, (name, sorts)) in csp.pred_sorts.iter().enumerate() {
            let params: Vec<(String, Sort)> = sorts
                .iter()
                .enumerate()
                .map(|(k, s)| (format!("z{k}"), s.clone()))
                .collect();
            let sum = params
                .iter()
                .filter(|(_, s)| *s == Sort::Int)
                .fold(Term::Int(0), |acc, (x, s)| {
                    Term::add(acc, Term::Var(x.clone(), s.clone()))
                });
            solution.insert(
                name.clone(),
                Lambda::pred(params, Formula::cmp(CmpOp::Ge, sum, Term::Int(ix as i64))),
            );
        }
        for (name, (args, _)) in &csp.fn_sorts {
            let params: Vec<(String, Sort)> = args
                .iter()
                .enumerate()
                .map(|(k, s)| (format!("z{k}"), s.clone()))
                .collect();
            let body = Term::add(
                Term::Var(params[0].0.clone(), Sort::Int),
                Term::Int(1),
            );
            solution.insert(name.clone(), Lambda::func(params, body));
        }
        let applied = csp.apply_solution(&solution).unwrap();
        for (clause, formula) in csp.clauses.iter().zip(&applied) {
            let matrix = match formula {
                Formula::Quant(_, _, body) => body.as_ref().clone(),
                other => other.clone(),
            };
            for env in assignments(&clause.term_vars, -5, 5).into_iter().step_by(11) {
                let env: Env = env.into_iter().collect();
                let via_formula =
                    eval_formula(&matrix, &env, &muclp::eval::NoVars, &mut steps()).ok();
                // independent route: evaluate the clause with the solution
                // resolving predicate and function variables directly
                let resolver = muclp::eval::SolutionResolver::new(&solution);
                let direct =
                    eval_formula(&clause.to_formula(), &env, &resolver, &mut steps()).ok();
                assert_eq!(via_formula, direct);
                checked += 1;
            }
        }
    }
    assert!(checked > 200, "only {checked} comparisons");
}

#[test]
fn instantiate_matches_term_interpreter() {
    // constant folding in instantiate agrees with direct evaluation
    let mut rng = Rng::new(0x1057);
    let shape = muclp::gen::ProgramShape::default();
    for _ in 0..100 {
        let vars = vec![("x".to_string(), Sort::Int), ("y".to_string(), Sort::Int)];
        let t = muclp::gen::random_term(&mut rng, &shape, &vars, 2);
        let clause = Clause {
            constraint: Formula::False,
            pos: vec![("P".to_string(), vec![t.clone()])],
            neg: Vec::new(),
            term_vars: muclp::ast::formula_free_vars(&Formula::PredApp(
                "P".to_string(),
                vec![t.clone()],
            )),
        };
        let mut theta = BTreeMap::new();
        for (x, _) in &clause.term_vars {
            theta.insert(x.clone(), Value::Int(rng.int_in(-3, 3)));
        }
        let inst = instantiate(&clause, 0, &theta).unwrap();
        let env: Env = theta.into_iter().collect();
        let expect = muclp::eval::eval_term(&t, &env, &muclp::eval::NoVars, &mut steps());
        match (expect, &inst.clause.pos[0].1[0]) {
            (Ok(v), folded) => assert_eq!(folded.value(), Some(v)),
            (Err(_), _) => {} // overflow; folding simply keeps the term
        }
    }
}

#[test]
fn negate_cochc_refuses_wf_and_functions() {
    let mut csp = PfwCsp::default();
    csp.pred_sorts.insert("X".into(), vec![Sort::Int]);
    csp.pred_sorts
        .insert("W".into(), vec![Sort::Int, Sort::Int]);
    csp.wf_vars.insert("W".into());
    assert!(csp.negate_cochc_to_chc().is_err());
}
