//! Golden tests for the reduction pipeline: the worked elimination example
//! must reproduce its printed five-clause output exactly (up to renaming of
//! bound variables and literal order), and the termination /
//! non-termination fixtures must reduce to the documented shapes.

use std::collections::BTreeSet;
use std::path::Path;

use muclp::ast::{Name, Sort, Term};
use muclp::parse::parse_muclp;
use muclp::pfwcsp::{Clause, PfwCsp};
use muclp::reduce::reduce;

fn fixture(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name))
        .unwrap()
}

/// Canonical rendering of a clause with term variables numbered by first
/// occurrence and every name reduced to its stem; literal order is
/// canonicalized by sorting. Two clauses are alpha/order-equivalent iff
/// their renderings match.
fn canon_clause(clause: &Clause, wf_vars: &BTreeSet<Name>) -> String {
    use std::collections::BTreeMap;
    let mut names: BTreeMap<Name, String> = BTreeMap::new();
    let mut canon_term = |t: &Term, names: &mut BTreeMap<Name, String>| -> Term {
        fn go(t: &Term, names: &mut BTreeMap<Name, String>) -> Term {
            match t {
                Term::Var(x, s) => {
                    let n = names.len();
                    let name = names
                        .entry(x.clone())
                        .or_insert_with(|| format!("v{n}"))
                        .clone();
                    Term::Var(name, s.clone())
                }
                Term::Int(_) | Term::Bool(_) => t.clone(),
                Term::Add(a, b) => Term::add(go(a, names), go(b, names)),
                Term::Sub(a, b) => Term::sub(go(a, names), go(b, names)),
                Term::Mul(a, b) => Term::mul(go(a, names), go(b, names)),
                Term::Ite(..) => t.clone(),
                Term::App(f, args) => Term::App(
                    muclp::ast::name_stem(f).to_string(),
                    args.iter().map(|a| go(a, names)).collect(),
                ),
            }
        }
        go(t, names)
    };

    // number variables in a fixed traversal order: negative literals first
    // (they are the heads), then constraint, then positive literals
    let mut parts: Vec<String> = Vec::new();
    let mut neg: Vec<String> = Vec::new();
    for (x, args) in &clause.neg {
        let rendered: Vec<String> = args
            .iter()
            .map(|a| muclp::print::fmt_term_raw(&canon_term(a, &mut names)))
            .collect();
        let stem = if wf_vars.contains(x) {
            "WF".to_string()
        } else {
            muclp::ast::name_stem(x).to_string()
        };
        neg.push(format!("-{stem}({})", rendered.join(",")));
    }
    let constraint = {
        let mut sub: std::collections::BTreeMap<Name, Term> = std::collections::BTreeMap::new();
        for (x, _) in &clause.term_vars {
            // touch variables in term_vars order only if already numbered
            let _ = x;
        }
        let mut fresh = muclp::ast::FreshNames::new();
        let renamed = muclp::transform::subst_term_vars(
            &clause.constraint,
            &{
                // rename via canon numbering, registering new names on the fly
                for (x, _) in muclp::ast::formula_free_vars(&clause.constraint) {
                    let n = names.len();
                    names.entry(x.clone()).or_insert_with(|| format!("v{n}"));
                }
                sub.extend(names.iter().map(|(k, v)| {
                    (k.clone(), Term::Var(v.clone(), Sort::Int))
                }));
                sub
            },
            &mut fresh,
        );
        muclp::print::fmt_formula_raw(&renamed)
    };
    let mut pos: Vec<String> = Vec::new();
    for (x, args) in &clause.pos {
        let rendered: Vec<String> = args
            .iter()
            .map(|a| muclp::print::fmt_term_raw(&canon_term(a, &mut names)))
            .collect();
        let stem = if wf_vars.contains(x) {
            "WF".to_string()
        } else {
            muclp::ast::name_stem(x).to_string()
        };
        pos.push(format!("+{stem}({})", rendered.join(",")));
    }
    neg.sort();
    pos.sort();
    parts.extend(neg);
    parts.push(format!("[{constraint}]"));
    parts.extend(pos);
    parts.join(" ")
}

#[test]
fn elimination_example_exact_five_clauses() {
    let start = std::time::Instant::now();
    let text = "query forall x: int. X(x) /\\ Y(x);\nX(x: int) =mu Y(x - 1);\nY(y: int) =mu y <= 0 \\/ X(y - 1);\n";
    let p = parse_muclp(text).unwrap();
    let (csp, trace) = reduce(&p).unwrap();

    assert_eq!(csp.wf_vars.len(), 1);
    assert!(csp.fn_vars.is_empty());
    assert_eq!(trace.wf_vars.len(), 1);
    assert_eq!(trace.wf_vars[0].source, "X");

    let got: BTreeSet<String> = csp
        .clauses
        .iter()
        .map(|c| canon_clause(c, &csp.wf_vars))
        .collect();
    let expected: BTreeSet<String> = [
        // X(x)
        "[false] +X(v0)",
        // Y(false, 0, x)
        "[false] +Y(false,0,v0)",
        // not X(x) \/ Y(true, x, x - 1)
        "-X(v0) [false] +Y(true,v0,v0 - 1)",
        // not Y(b, x, y) \/ y <= 0 \/ X(y - 1)
        "-Y(v0,v1,v2) [v2 <= 0] +X(v2 - 1)",
        // not Y(b, x, y) \/ y <= 0 \/ not b \/ WF_X(x, y - 1)
        "-Y(v0,v1,v2) [v2 <= 0 \\/ not v0] +WF(v1,v2 - 1)",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    assert_eq!(got, expected);
    assert!(
        start.elapsed() < std::time::Duration::from_secs(1),
        "golden reduction must complete within a second"
    );
}

#[test]
fn p_term_reduces_to_guarded_shape() {
    let p = parse_muclp(&fixture("p_term.muclp")).unwrap();
    let (csp, trace) = reduce(&p).unwrap();
    // two inductive equations with recursive entry: two WF variables
    assert_eq!(csp.wf_vars.len(), 2);
    assert!(csp.fn_vars.is_empty());
    let sources: BTreeSet<&str> = trace.wf_vars.iter().map(|w| w.source.as_str()).collect();
    assert_eq!(sources, BTreeSet::from(["I", "J"]));
    // elimination order: right-most inductive equation first
    assert_eq!(trace.wf_vars[0].source, "J");
    // argument extensions: NP extended twice (for J then I), J once
    assert_eq!(trace.arg_extensions["NP"].len(), 2);
    assert_eq!(trace.arg_extensions["J"].len(), 1);
    // NP's final arity: 2 own + (1 bool + 1 int) + (1 bool + 2 int) = 7
    assert_eq!(csp.pred_sorts["NP"].len(), 7);
    assert_eq!(csp.pred_sorts["J"].len(), 4);
    assert_eq!(csp.pred_sorts["I"].len(), 2);
    // WF sorts double their source parameter sorts
    let wf_j = &trace.wf_vars[0].name;
    let wf_i = &trace.wf_vars[1].name;
    assert_eq!(csp.pred_sorts[wf_j].len(), 2);
    assert_eq!(csp.pred_sorts[wf_i].len(), 4);
}

#[test]
fn p_nterm_reduces_with_skolems() {
    let p = parse_muclp(&fixture("p_nterm.muclp")).unwrap();
    let (csp, trace) = reduce(&p).unwrap();
    assert_eq!(csp.fn_vars.len(), 3);
    let arities: Vec<usize> = trace.skolem_fns.iter().map(|s| s.args.len()).collect();
    assert_eq!(
        arities.iter().filter(|a| **a == 0).count(),
        2,
        "query existentials become constants"
    );
    assert_eq!(
        arities.iter().filter(|a| **a == 2).count(),
        1,
        "the body existential captures the equation parameters"
    );
    assert_eq!(csp.wf_vars.len(), 1);
    assert_eq!(trace.wf_vars[0].source, "P");
    // the ground query clause references the Skolem constants
    let ground: Vec<&Clause> = csp.clauses.iter().filter(|c| c.term_vars.is_empty()).collect();
    assert_eq!(ground.len(), 1);
    assert_eq!(ground[0].pos.len(), 1);
    assert!(ground[0].pos[0].1.iter().all(|t| matches!(t, Term::App(_, args) if args.is_empty())));
}

#[test]
fn freshness_of_generated_names() {
    for file in ["p_term.muclp", "p_nterm.muclp"] {
        let p = parse_muclp(&fixture(file)).unwrap();
        let (_, trace) = reduce(&p).unwrap();
        assert!(muclp::reduce::check_freshness(&p, &trace), "{file}");
    }
}

#[test]
fn reduction_is_deterministic_across_runs() {
    let p = parse_muclp(&fixture("p_term.muclp")).unwrap();
    let (a, _) = reduce(&p).unwrap();
    let (b, _) = reduce(&p).unwrap();
    assert_eq!(a, b);
}

#[test]
fn wf_variables_only_positive_in_reduced_output() {
    for file in ["p_term.muclp", "p_nterm.muclp"] {
        let p = parse_muclp(&fixture(file)).unwrap();
        let (csp, _) = reduce(&p).unwrap();
        for clause in &csp.clauses {
            for (x, _) in &clause.neg {
                assert!(!csp.wf_vars.contains(x), "{file}: negative WF literal");
            }
        }
    }
}

#[test]
fn emit_pcsp_round_trips_through_parser() {
    let p = parse_muclp(&fixture("p_term.muclp")).unwrap();
    let (csp, _) = reduce(&p).unwrap();
    let printed = muclp::pfwcsp::print_pfwcsp(&csp);
    let back: PfwCsp = muclp::pfwcsp::parse_pfwcsp(&printed).unwrap();
    assert_eq!(back.clauses.len(), csp.clauses.len());
    assert_eq!(back.wf_vars, csp.wf_vars);
    assert_eq!(back.pred_sorts, csp.pred_sorts);
}
