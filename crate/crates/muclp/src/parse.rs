//! Parser for the MuCLP text format.
//!
//! ```text
//! program  := "query" formula ";" eqn*
//! eqn      := IDENT "(" params? ")" ("=mu"|"=nu") formula ";"
//! params   := IDENT ":" ("int"|"bool") ("," IDENT ":" sort)*
//! formula  := "forall"/"exists" params "." formula
//!           | formula ("/\"|"\/"|"=>") formula | "not" formula | atom
//! atom     := IDENT "(" terms? ")" | term cmp term | "true" | "false"
//! term     := INT | IDENT | term ("+"|"-") term | INT "*" term
//!           | "ite" "(" formula "," term "," term ")"
//! ```
//!
//! Precedence: `not` > `/\` > `\/` > `=>`; quantifier bodies extend
//! maximally to the right; `=>` associates to the right; `+`/`-` to the
//! left. Parsed programs are sort-checked and alpha-normalized: every
//! binder gets a globally unique name (fresh `!n` suffixes are appended
//! only when a base name is reused).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::ast::{
    CmpOp, Equation, FixKind, Formula, FreshNames, MuClpProgram, Name, Quantifier, Sort, Term,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Query,
    Forall,
    Exists,
    Not,
    Ite,
    True,
    False,
    IntSort,
    BoolSort,
    EqMu,
    EqNu,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    Comma,
    Dot,
    Semi,
    Colon,
    Plus,
    Minus,
    Star,
    Eq,
    Ne,
    Le,
    Lt,
    Ge,
    Gt,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "identifier `{s}`"),
            Tok::Int(n) => return write!(f, "integer `{n}`"),
            Tok::Query => "query",
            Tok::Forall => "forall",
            Tok::Exists => "exists",
            Tok::Not => "not",
            Tok::Ite => "ite",
            Tok::True => "true",
            Tok::False => "false",
            Tok::IntSort => "int",
            Tok::BoolSort => "bool",
            Tok::EqMu => "=mu",
            Tok::EqNu => "=nu",
            Tok::And => "/\\",
            Tok::Or => "\\/",
            Tok::Implies => "=>",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Le => "<=",
            Tok::Lt => "<",
            Tok::Ge => ">=",
            Tok::Gt => ">",
        };
        write!(f, "`{s}`")
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

type Spanned = (Tok, usize, usize);

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        loop {
            while let Some(c) = self.peek() {
                if c == b'#' {
                    while self.peek().is_some_and(|c| c != b'\n') {
                        self.bump();
                    }
                } else if c.is_ascii_whitespace() {
                    self.bump();
                } else {
                    break;
                }
            }
            let Some(c) = self.peek() else { break };
            let (line, col) = (self.line, self.col);
            let tok = match c {
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b',' => {
                    self.bump();
                    Tok::Comma
                }
                b'.' => {
                    self.bump();
                    Tok::Dot
                }
                b';' => {
                    self.bump();
                    Tok::Semi
                }
                b':' => {
                    self.bump();
                    Tok::Colon
                }
                b'+' => {
                    self.bump();
                    Tok::Plus
                }
                b'-' => {
                    self.bump();
                    Tok::Minus
                }
                b'*' => {
                    self.bump();
                    Tok::Star
                }
                b'/' => {
                    self.bump();
                    if self.peek() == Some(b'\\') {
                        self.bump();
                        Tok::And
                    } else {
                        return Err(self.error("expected `/\\`"));
                    }
                }
                b'\\' => {
                    self.bump();
                    if self.peek() == Some(b'/') {
                        self.bump();
                        Tok::Or
                    } else {
                        return Err(self.error("expected `\\/`"));
                    }
                }
                b'=' => {
                    self.bump();
                    match self.peek() {
                        Some(b'>') => {
                            self.bump();
                            Tok::Implies
                        }
                        Some(b'm') if self.peek2() == Some(b'u') => {
                            self.bump();
                            self.bump();
                            Tok::EqMu
                        }
                        Some(b'n') if self.peek2() == Some(b'u') => {
                            self.bump();
                            self.bump();
                            Tok::EqNu
                        }
                        _ => Tok::Eq,
                    }
                }
                b'!' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::Ne
                    } else {
                        return Err(self.error("expected `!=`"));
                    }
                }
                b'<' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::Le
                    } else {
                        Tok::Lt
                    }
                }
                b'>' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::Ge
                    } else {
                        Tok::Gt
                    }
                }
                c if c.is_ascii_digit() => {
                    let mut n: i64 = 0;
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        let d = (self.bump() - b'0') as i64;
                        n = n
                            .checked_mul(10)
                            .and_then(|n| n.checked_add(d))
                            .ok_or_else(|| self.error("integer literal out of range"))?;
                    }
                    Tok::Int(n)
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let start = self.pos;
                    while self
                        .peek()
                        .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_' || c == b'\'')
                    {
                        self.bump();
                    }
                    let word = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    match word {
                        "query" => Tok::Query,
                        "forall" => Tok::Forall,
                        "exists" => Tok::Exists,
                        "not" => Tok::Not,
                        "ite" => Tok::Ite,
                        "true" => Tok::True,
                        "false" => Tok::False,
                        "int" => Tok::IntSort,
                        "bool" => Tok::BoolSort,
                        _ => Tok::Ident(word.to_string()),
                    }
                }
                other => {
                    return Err(self.error(format!("unexpected character `{}`", other as char)))
                }
            };
            out.push((tok, line, col));
        }
        Ok(out)
    }
}

/// Scope for sort checking and alpha-renaming during parsing.
struct Scope {
    /// Stack of (user name -> (unique name, sort)).
    vars: Vec<(Name, Name, Sort)>,
    /// Predicate name -> argument sorts.
    preds: BTreeMap<Name, Vec<Sort>>,
    used: BTreeSet<Name>,
    fresh: FreshNames,
}

impl Scope {
    fn bind(&mut self, user: &str, sort: Sort) -> Name {
        let unique = if self.used.contains(user) {
            self.fresh.fresh(user)
        } else {
            user.to_string()
        };
        self.used.insert(unique.clone());
        self.vars.push((user.to_string(), unique.clone(), sort));
        unique
    }

    fn lookup(&self, user: &str) -> Option<(Name, Sort)> {
        self.vars
            .iter()
            .rev()
            .find(|(u, _, _)| u == user)
            .map(|(_, n, s)| (n.clone(), s.clone()))
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    scope: Scope,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn span(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some((_, l, c)) => (*l, *c),
            None => self
                .toks
                .last()
                .map(|(_, l, c)| (*l, *c + 1))
                .unwrap_or((1, 1)),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.span();
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error(format!("expected {tok}, found {t}"))),
            None => Err(self.error(format!("expected {tok}, found end of input"))),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse_sort(&mut self) -> Result<Sort, ParseError> {
        match self.next() {
            Some(Tok::IntSort) => Ok(Sort::Int),
            Some(Tok::BoolSort) => Ok(Sort::Bool),
            Some(t) => Err(self.error(format!("expected a sort, found {t}"))),
            None => Err(self.error("expected a sort, found end of input")),
        }
    }

    fn parse_params(&mut self) -> Result<Vec<(Name, Sort)>, ParseError> {
        let mut out = Vec::new();
        loop {
            let name = match self.next() {
                Some(Tok::Ident(s)) => s,
                Some(t) => return Err(self.error(format!("expected parameter name, found {t}"))),
                None => return Err(self.error("expected parameter name")),
            };
            self.expect(Tok::Colon)?;
            let sort = self.parse_sort()?;
            out.push((name, sort));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        Ok(out)
    }

    /// formula := quantified | implication
    fn parse_formula(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Forall) | Some(Tok::Exists) => {
                let q = if matches!(self.next().unwrap(), Tok::Forall) {
                    Quantifier::Forall
                } else {
                    Quantifier::Exists
                };
                let params = self.parse_params()?;
                self.expect(Tok::Dot)?;
                let depth = self.scope.vars.len();
                let binders: Vec<(Name, Sort)> = params
                    .iter()
                    .map(|(n, s)| (self.scope.bind(n, s.clone()), s.clone()))
                    .collect();
                let body = self.parse_formula();
                self.scope.vars.truncate(depth);
                Ok(Formula::quant(q, binders, body?))
            }
            _ => self.parse_implies(),
        }
    }

    fn parse_implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_or()?;
        if self.eat(&Tok::Implies) {
            // right-associative; the rhs may itself be quantified
            let rhs = self.parse_formula()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_or(&mut self) -> Result<Formula, ParseError> {
        let mut out = vec![self.parse_and()?];
        while self.eat(&Tok::Or) {
            if matches!(self.peek(), Some(Tok::Forall) | Some(Tok::Exists)) {
                out.push(self.parse_formula()?);
                break;
            }
            out.push(self.parse_and()?);
        }
        Ok(Formula::or(out))
    }

    fn parse_and(&mut self) -> Result<Formula, ParseError> {
        let mut out = vec![self.parse_not()?];
        while self.eat(&Tok::And) {
            if matches!(self.peek(), Some(Tok::Forall) | Some(Tok::Exists)) {
                out.push(self.parse_formula()?);
                break;
            }
            out.push(self.parse_not()?);
        }
        Ok(Formula::and(out))
    }

    fn parse_not(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&Tok::Not) {
            Ok(Formula::not(self.parse_not()?))
        } else {
            self.parse_atom()
        }
    }

    /// An atom, or a parenthesized formula. Parentheses are ambiguous
    /// between formulas and terms, so `(` is resolved by attempting a
    /// formula first and falling back to a term comparison.
    fn parse_atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(Tok::True) => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(Tok::False) => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Some(Tok::Ident(name)) => {
                // predicate application / bool variable / term comparison
                if self.toks.get(self.pos + 1).map(|(t, _, _)| t) == Some(&Tok::LParen)
                    && self.scope.preds.contains_key(&name)
                {
                    self.pos += 2;
                    let mut args = Vec::new();
                    if self.peek() != Some(&Tok::RParen) {
                        loop {
                            args.push(self.parse_term()?);
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen)?;
                    let sorts = self.scope.preds.get(&name).unwrap().clone();
                    if sorts.len() != args.len() {
                        return Err(self.error(format!(
                            "predicate {name} applied to {} arguments, expected {}",
                            args.len(),
                            sorts.len()
                        )));
                    }
                    for (i, (arg, want)) in args.iter().zip(&sorts).enumerate() {
                        let got = self.sort_of(arg)?;
                        if got != *want {
                            return Err(self.error(format!(
                                "argument {} of {name} has sort {got}, expected {want}",
                                i + 1
                            )));
                        }
                    }
                    Ok(Formula::PredApp(name, args))
                } else if self.scope.lookup(&name).is_none()
                    && self.scope.preds.get(&name).is_some_and(|s| s.is_empty())
                {
                    // bare nullary predicate atom
                    self.pos += 1;
                    Ok(Formula::PredApp(name, Vec::new()))
                } else {
                    self.parse_cmp_or_bool()
                }
            }
            _ => self.parse_cmp_or_bool(),
        }
    }

    fn parse_cmp_or_bool(&mut self) -> Result<Formula, ParseError> {
        // Try a parenthesized formula first.
        if self.peek() == Some(&Tok::LParen) {
            let save = self.pos;
            self.pos += 1;
            if let Ok(f) = self.parse_formula() {
                if self.eat(&Tok::RParen) {
                    // a parenthesized bool-sorted term is also a valid start
                    // of a comparison; only accept if no cmp operator follows
                    if !matches!(
                        self.peek(),
                        Some(Tok::Eq)
                            | Some(Tok::Ne)
                            | Some(Tok::Le)
                            | Some(Tok::Lt)
                            | Some(Tok::Ge)
                            | Some(Tok::Gt)
                            | Some(Tok::Plus)
                            | Some(Tok::Minus)
                            | Some(Tok::Star)
                    ) {
                        return Ok(f);
                    }
                }
            }
            self.pos = save;
        }
        let lhs = self.parse_term()?;
        let op = match self.peek() {
            Some(Tok::Eq) => Some(CmpOp::Eq),
            Some(Tok::Ne) => Some(CmpOp::Ne),
            Some(Tok::Le) => Some(CmpOp::Le),
            Some(Tok::Lt) => Some(CmpOp::Lt),
            Some(Tok::Ge) => Some(CmpOp::Ge),
            Some(Tok::Gt) => Some(CmpOp::Gt),
            _ => None,
        };
        match op {
            Some(op) => {
                self.pos += 1;
                let rhs = self.parse_term()?;
                let (ls, rs) = (self.sort_of(&lhs)?, self.sort_of(&rhs)?);
                if ls != Sort::Int || rs != Sort::Int {
                    return Err(self.error("comparison arguments must be int"));
                }
                Ok(Formula::Cmp(op, lhs, rhs))
            }
            None => {
                if self.sort_of(&lhs)? == Sort::Bool {
                    Ok(Formula::BoolTerm(lhs))
                } else {
                    Err(self.error("expected a comparison operator or a bool term"))
                }
            }
        }
    }

    fn parse_term(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.parse_term_mul()?;
        loop {
            if self.eat(&Tok::Plus) {
                let rhs = self.parse_term_mul()?;
                self.check_int(&lhs)?;
                self.check_int(&rhs)?;
                lhs = Term::add(lhs, rhs);
            } else if self.eat(&Tok::Minus) {
                let rhs = self.parse_term_mul()?;
                self.check_int(&lhs)?;
                self.check_int(&rhs)?;
                lhs = Term::sub(lhs, rhs);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn parse_term_mul(&mut self) -> Result<Term, ParseError> {
        // grammar: INT "*" term (scalar multiplication); a leading minus on
        // the scalar is accepted too
        if let Some(Tok::Int(n)) = self.peek().cloned() {
            if self.toks.get(self.pos + 1).map(|(t, _, _)| t) == Some(&Tok::Star) {
                self.pos += 2;
                let rhs = self.parse_term_mul()?;
                self.check_int(&rhs)?;
                return Ok(Term::mul(Term::Int(n), rhs));
            }
        }
        if self.peek() == Some(&Tok::Minus) {
            if let (Some(Tok::Int(n)), Some(Tok::Star)) = (
                self.toks.get(self.pos + 1).map(|(t, _, _)| t.clone()),
                self.toks.get(self.pos + 2).map(|(t, _, _)| t.clone()),
            ) {
                self.pos += 3;
                let rhs = self.parse_term_mul()?;
                self.check_int(&rhs)?;
                return Ok(Term::mul(Term::Int(-n), rhs));
            }
        }
        self.parse_term_primary()
    }

    fn parse_term_primary(&mut self) -> Result<Term, ParseError> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(Term::Int(n)),
            Some(Tok::True) => Ok(Term::Bool(true)),
            Some(Tok::False) => Ok(Term::Bool(false)),
            Some(Tok::Minus) => {
                let t = self.parse_term_primary()?;
                self.check_int(&t)?;
                Ok(match t {
                    Term::Int(n) => Term::Int(-n),
                    other => Term::sub(Term::Int(0), other),
                })
            }
            Some(Tok::Ite) => {
                self.expect(Tok::LParen)?;
                let c = self.parse_formula()?;
                self.expect(Tok::Comma)?;
                let t = self.parse_term()?;
                self.expect(Tok::Comma)?;
                let e = self.parse_term()?;
                self.expect(Tok::RParen)?;
                let (ts, es) = (self.sort_of(&t)?, self.sort_of(&e)?);
                if ts != es {
                    return Err(self.error("ite branches must have the same sort"));
                }
                Ok(Term::ite(c, t, e))
            }
            Some(Tok::LParen) => {
                let t = self.parse_term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Ident(name)) => match self.scope.lookup(&name) {
                Some((unique, sort)) => Ok(Term::Var(unique, sort)),
                None => Err(self.error(format!("unbound variable `{name}`"))),
            },
            Some(t) => Err(self.error(format!("expected a term, found {t}"))),
            None => Err(self.error("expected a term, found end of input")),
        }
    }

    fn check_int(&self, t: &Term) -> Result<(), ParseError> {
        if self.sort_of(t)? != Sort::Int {
            return Err(self.error("arithmetic arguments must be int"));
        }
        Ok(())
    }

    fn sort_of(&self, t: &Term) -> Result<Sort, ParseError> {
        match t {
            Term::Var(_, s) => Ok(s.clone()),
            Term::Int(_) => Ok(Sort::Int),
            Term::Bool(_) => Ok(Sort::Bool),
            Term::Add(..) | Term::Sub(..) | Term::Mul(..) => Ok(Sort::Int),
            Term::Ite(_, t, _) => self.sort_of(t),
            Term::App(..) => Ok(Sort::Int),
        }
    }
}

/// Parse and sort-check a MuCLP program; the result is alpha-normalized.
pub fn parse_muclp(text: &str) -> Result<MuClpProgram, ParseError> {
    let toks = Lexer::new(text).tokens()?;

    // Pre-scan equation heads so mutual recursion sort-checks in one pass.
    let mut preds: BTreeMap<Name, Vec<Sort>> = BTreeMap::new();
    {
        let mut i = 0;
        let mut depth = 0usize;
        // Skip the query: scan for the first `;` at depth 0.
        while i < toks.len() {
            match &toks[i].0 {
                Tok::LParen => depth += 1,
                Tok::RParen => depth = depth.saturating_sub(1),
                Tok::Semi if depth == 0 => {
                    i += 1;
                    break;
                }
                _ => {}
            }
            i += 1;
        }
        while i < toks.len() {
            let (head, hl, hc) = match &toks[i] {
                (Tok::Ident(s), l, c) => (s.clone(), *l, *c),
                (t, l, c) => {
                    return Err(ParseError {
                        line: *l,
                        col: *c,
                        message: format!("expected equation head, found {t}"),
                    })
                }
            };
            i += 1;
            if toks.get(i).map(|(t, _, _)| t) != Some(&Tok::LParen) {
                return Err(ParseError {
                    line: hl,
                    col: hc,
                    message: format!("expected `(` after equation head {head}"),
                });
            }
            i += 1;
            let mut sorts = Vec::new();
            while toks.get(i).map(|(t, _, _)| t) != Some(&Tok::RParen) {
                // IDENT : sort
                match toks.get(i).map(|(t, _, _)| t) {
                    Some(Tok::Ident(_)) => i += 1,
                    _ => {
                        return Err(ParseError {
                            line: hl,
                            col: hc,
                            message: format!("malformed parameter list for {head}"),
                        })
                    }
                }
                if toks.get(i).map(|(t, _, _)| t) != Some(&Tok::Colon) {
                    return Err(ParseError {
                        line: hl,
                        col: hc,
                        message: format!("malformed parameter list for {head}"),
                    });
                }
                i += 1;
                match toks.get(i).map(|(t, _, _)| t) {
                    Some(Tok::IntSort) => sorts.push(Sort::Int),
                    Some(Tok::BoolSort) => sorts.push(Sort::Bool),
                    _ => {
                        return Err(ParseError {
                            line: hl,
                            col: hc,
                            message: format!("malformed parameter sort for {head}"),
                        })
                    }
                }
                i += 1;
                if toks.get(i).map(|(t, _, _)| t) == Some(&Tok::Comma) {
                    i += 1;
                }
            }
            i += 1; // consume `)`
            if preds.insert(head.clone(), sorts).is_some() {
                return Err(ParseError {
                    line: hl,
                    col: hc,
                    message: format!("duplicate equation head {head}"),
                });
            }
            // skip to the `;` ending this equation
            let mut depth = 0usize;
            while i < toks.len() {
                match &toks[i].0 {
                    Tok::LParen => depth += 1,
                    Tok::RParen => depth = depth.saturating_sub(1),
                    Tok::Semi if depth == 0 => {
                        i += 1;
                        break;
                    }
                    _ => {}
                }
                i += 1;
            }
        }
    }

    let used: BTreeSet<Name> = preds.keys().cloned().collect();
    let mut parser = Parser {
        toks,
        pos: 0,
        scope: Scope {
            vars: Vec::new(),
            preds,
            fresh: FreshNames::new(),
            used,
        },
    };

    parser.expect(Tok::Query)?;
    let query = parser.parse_formula()?;
    parser.expect(Tok::Semi)?;

    let mut equations = Vec::new();
    while parser.peek().is_some() {
        let head = match parser.next() {
            Some(Tok::Ident(s)) => s,
            _ => return Err(parser.error("expected equation head")),
        };
        parser.expect(Tok::LParen)?;
        let params = if parser.peek() == Some(&Tok::RParen) {
            Vec::new()
        } else {
            parser.parse_params()?
        };
        parser.expect(Tok::RParen)?;
        let kind = match parser.next() {
            Some(Tok::EqMu) => FixKind::Mu,
            Some(Tok::EqNu) => FixKind::Nu,
            _ => return Err(parser.error("expected `=mu` or `=nu`")),
        };
        {
            let mut seen = BTreeSet::new();
            for (p, _) in &params {
                if !seen.insert(p.clone()) {
                    return Err(parser.error(format!("duplicate parameter `{p}` in {head}")));
                }
            }
        }
        let depth = parser.scope.vars.len();
        let binders: Vec<(Name, Sort)> = params
            .iter()
            .map(|(n, s)| (parser.scope.bind(n, s.clone()), s.clone()))
            .collect();
        let body = parser.parse_formula()?;
        parser.scope.vars.truncate(depth);
        parser.expect(Tok::Semi)?;
        equations.push(Equation {
            head,
            params: binders,
            kind,
            body,
        });
    }

    Ok(MuClpProgram { equations, query })
}

/// Parse a single formula against the given variable and predicate context
/// (used by the encoder input formats, which share this expression syntax).
pub fn parse_formula_in_context(
    text: &str,
    vars: &[(Name, Sort)],
    preds: &BTreeMap<Name, Vec<Sort>>,
) -> Result<Formula, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let used: BTreeSet<Name> = vars
        .iter()
        .map(|(n, _)| n.clone())
        .chain(preds.keys().cloned())
        .collect();
    let mut parser = Parser {
        toks,
        pos: 0,
        scope: Scope {
            vars: vars
                .iter()
                .map(|(n, s)| (n.clone(), n.clone(), s.clone()))
                .collect(),
            preds: preds.clone(),
            fresh: FreshNames::seeded(used.iter()),
            used,
        },
    };
    let f = parser.parse_formula()?;
    if parser.peek().is_some() {
        return Err(parser.error("trailing input after formula"));
    }
    Ok(f)
}
