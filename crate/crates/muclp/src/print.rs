//! Printer for the MuCLP text format.
//!
//! Internal fresh names contain `!`, which the grammar cannot read back, so
//! the printer first computes a global injective renaming into plain
//! identifiers (`x!3` becomes `x_3`, with further suffixes on collision).
//! `parse(print(p))` is alpha-equivalent to `p`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::ast::{
    all_names, Formula, MuClpProgram, Name, Quantifier, Term,
};

/// Injective renaming of every name into a grammar-safe identifier.
pub fn grammar_safe_names(names: &BTreeSet<Name>) -> BTreeMap<Name, Name> {
    let mut taken: BTreeSet<Name> = names.iter().filter(|n| !n.contains('!')).cloned().collect();
    let mut map = BTreeMap::new();
    for name in names {
        if !name.contains('!') {
            map.insert(name.clone(), name.clone());
            continue;
        }
        let base = name.replace('!', "_");
        let mut candidate = base.clone();
        let mut k = 0u32;
        while taken.contains(&candidate) {
            candidate = format!("{base}_{k}");
            k += 1;
        }
        taken.insert(candidate.clone());
        map.insert(name.clone(), candidate);
    }
    map
}

fn rename(map: &BTreeMap<Name, Name>, n: &Name) -> Name {
    map.get(n).cloned().unwrap_or_else(|| n.clone())
}

pub fn print_muclp(p: &MuClpProgram) -> String {
    let map = grammar_safe_names(&all_names(p));
    let mut out = String::new();
    out.push_str("query ");
    out.push_str(&fmt_formula(&p.query, 0, &map));
    out.push_str(";\n");
    for eq in &p.equations {
        out.push_str(&rename(&map, &eq.head));
        out.push('(');
        for (i, (x, s)) in eq.params.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&format!("{}: {s}", rename(&map, x)));
        }
        out.push_str(") ");
        out.push_str(eq.kind.keyword());
        out.push(' ');
        out.push_str(&fmt_formula(&eq.body, 0, &map));
        out.push_str(";\n");
    }
    out
}

/// Precedence levels: 0 = entry (implies), 1 = or, 2 = and, 3 = not/atom.
pub fn fmt_formula(f: &Formula, level: u8, map: &BTreeMap<Name, Name>) -> String {
    match f {
        Formula::True => "true".to_string(),
        Formula::False => "false".to_string(),
        Formula::Cmp(op, a, b) => {
            format!("{} {} {}", fmt_term(a, 0, map), op.symbol(), fmt_term(b, 0, map))
        }
        Formula::BoolTerm(t) => fmt_term(t, 2, map),
        Formula::PredApp(p, args) => {
            let mut s = rename(map, p);
            s.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                s.push_str(&fmt_term(a, 0, map));
            }
            s.push(')');
            s
        }
        Formula::Not(g) => {
            let s = format!("not {}", fmt_formula(g, 3, map));
            if level > 3 {
                format!("({s})")
            } else {
                s
            }
        }
        Formula::And(fs) => {
            let s = fs
                .iter()
                .map(|g| fmt_formula(g, 3, map))
                .collect::<Vec<_>>()
                .join(" /\\ ");
            if level > 2 {
                format!("({s})")
            } else {
                s
            }
        }
        Formula::Or(fs) => {
            let s = fs
                .iter()
                .map(|g| fmt_formula(g, 2, map))
                .collect::<Vec<_>>()
                .join(" \\/ ");
            if level > 1 {
                format!("({s})")
            } else {
                s
            }
        }
        Formula::Quant(q, binders, body) => {
            let kw = match q {
                Quantifier::Forall => "forall",
                Quantifier::Exists => "exists",
            };
            let bs = binders
                .iter()
                .map(|(x, s)| format!("{}: {s}", rename(map, x)))
                .collect::<Vec<_>>()
                .join(", ");
            let s = format!("{kw} {bs}. {}", fmt_formula(body, 0, map));
            if level > 0 {
                format!("({s})")
            } else {
                s
            }
        }
    }
}

/// Term precedence: 0 = additive, 1 = multiplicative, 2 = primary.
pub fn fmt_term(t: &Term, level: u8, map: &BTreeMap<Name, Name>) -> String {
    match t {
        Term::Var(x, _) => rename(map, x),
        Term::Int(n) => {
            if *n < 0 && level >= 1 {
                format!("({n})")
            } else {
                format!("{n}")
            }
        }
        Term::Bool(b) => format!("{b}"),
        Term::Add(a, b) => {
            let s = format!("{} + {}", fmt_term(a, 0, map), fmt_term(b, 1, map));
            if level > 0 {
                format!("({s})")
            } else {
                s
            }
        }
        Term::Sub(a, b) => {
            let s = format!("{} - {}", fmt_term(a, 0, map), fmt_term(b, 1, map));
            if level > 0 {
                format!("({s})")
            } else {
                s
            }
        }
        Term::Mul(a, b) => {
            // scalar literals print bare so `-2 * x` stays in the grammar
            let lhs = match a.as_ref() {
                Term::Int(n) => format!("{n}"),
                other => fmt_term(other, 2, map),
            };
            let s = format!("{lhs} * {}", fmt_term(b, 2, map));
            if level > 1 {
                format!("({s})")
            } else {
                s
            }
        }
        Term::Ite(c, a, b) => format!(
            "ite({}, {}, {})",
            fmt_formula(c, 0, map),
            fmt_term(a, 0, map),
            fmt_term(b, 0, map)
        ),
        Term::App(f, args) => {
            let mut s = rename(map, f);
            s.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                s.push_str(&fmt_term(a, 0, map));
            }
            s.push(')');
            s
        }
    }
}

/// Format a formula with raw (internal) names; used for logs and errors,
/// not for round-tripping.
pub fn fmt_formula_raw(f: &Formula) -> String {
    fmt_formula(f, 0, &BTreeMap::new())
}

pub fn fmt_term_raw(t: &Term) -> String {
    fmt_term(t, 0, &BTreeMap::new())
}
