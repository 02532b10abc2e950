//! Minimal s-expression reader and writer for the SMT-LIB2 surface.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn atom(s: impl Into<String>) -> Sexp {
        Sexp::Atom(s.into())
    }

    pub fn list(items: Vec<Sexp>) -> Sexp {
        Sexp::List(items)
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s) => Some(s),
            Sexp::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::Atom(_) => None,
            Sexp::List(items) => Some(items),
        }
    }

    /// Parse an integer atom, including the `(- 5)` form.
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Sexp::Atom(s) => s.parse().ok(),
            Sexp::List(items) => match items.as_slice() {
                [Sexp::Atom(minus), inner] if minus == "-" => inner.as_int().map(|n| -n),
                _ => None,
            },
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(s) => write!(f, "{s}"),
            Sexp::List(items) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SexpError {
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for SexpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "byte {}: {}", self.pos, self.message)
    }
}

/// Parse every top-level s-expression in the input. Comments (`;` to end of
/// line), string literals, and `|quoted symbols|` are handled.
pub fn parse_sexps(input: &str) -> Result<Vec<Sexp>, SexpError> {
    let bytes = input.as_bytes();
    let mut pos = 0;
    let mut out = Vec::new();
    loop {
        skip_trivia(bytes, &mut pos);
        if pos >= bytes.len() {
            return Ok(out);
        }
        out.push(parse_one(bytes, &mut pos)?);
    }
}

fn skip_trivia(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() {
        match bytes[*pos] {
            b';' => {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
            }
            c if c.is_ascii_whitespace() => *pos += 1,
            _ => return,
        }
    }
}

fn parse_one(bytes: &[u8], pos: &mut usize) -> Result<Sexp, SexpError> {
    skip_trivia(bytes, pos);
    if *pos >= bytes.len() {
        return Err(SexpError {
            pos: *pos,
            message: "unexpected end of input".to_string(),
        });
    }
    match bytes[*pos] {
        b'(' => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                skip_trivia(bytes, pos);
                if *pos >= bytes.len() {
                    return Err(SexpError {
                        pos: *pos,
                        message: "unclosed list".to_string(),
                    });
                }
                if bytes[*pos] == b')' {
                    *pos += 1;
                    return Ok(Sexp::List(items));
                }
                items.push(parse_one(bytes, pos)?);
            }
        }
        b')' => Err(SexpError {
            pos: *pos,
            message: "unexpected `)`".to_string(),
        }),
        b'"' => {
            let start = *pos;
            *pos += 1;
            while *pos < bytes.len() {
                if bytes[*pos] == b'"' {
                    if bytes.get(*pos + 1) == Some(&b'"') {
                        *pos += 2;
                        continue;
                    }
                    *pos += 1;
                    let s = core::str::from_utf8(&bytes[start..*pos]).map_err(|_| SexpError {
                        pos: start,
                        message: "invalid utf8".to_string(),
                    })?;
                    return Ok(Sexp::Atom(s.to_string()));
                }
                *pos += 1;
            }
            Err(SexpError {
                pos: start,
                message: "unclosed string".to_string(),
            })
        }
        b'|' => {
            let start = *pos;
            *pos += 1;
            while *pos < bytes.len() && bytes[*pos] != b'|' {
                *pos += 1;
            }
            if *pos >= bytes.len() {
                return Err(SexpError {
                    pos: start,
                    message: "unclosed quoted symbol".to_string(),
                });
            }
            *pos += 1;
            let s = core::str::from_utf8(&bytes[start..*pos]).map_err(|_| SexpError {
                pos: start,
                message: "invalid utf8".to_string(),
            })?;
            Ok(Sexp::Atom(s.to_string()))
        }
        _ => {
            let start = *pos;
            while *pos < bytes.len() {
                let c = bytes[*pos];
                if c.is_ascii_whitespace() || c == b'(' || c == b')' || c == b';' {
                    break;
                }
                *pos += 1;
            }
            let s = core::str::from_utf8(&bytes[start..*pos]).map_err(|_| SexpError {
                pos: start,
                message: "invalid utf8".to_string(),
            })?;
            Ok(Sexp::Atom(s.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn parses_nested() {
        let got = parse_sexps("(a (b 1) -2) atom ; comment\n(c)").unwrap();
        assert_eq!(got.len(), 3);
        assert_eq!(
            got[0],
            Sexp::List(vec![
                Sexp::atom("a"),
                Sexp::List(vec![Sexp::atom("b"), Sexp::atom("1")]),
                Sexp::atom("-2"),
            ])
        );
        assert_eq!(got[1], Sexp::atom("atom"));
    }

    #[test]
    fn negative_int_forms() {
        let got = parse_sexps("(- 5)").unwrap();
        assert_eq!(got[0].as_int(), Some(-5));
        assert_eq!(Sexp::atom("-7").as_int(), Some(-7));
    }

    #[test]
    fn rejects_unbalanced() {
        assert!(parse_sexps("(a (b)").is_err());
        assert!(parse_sexps(")").is_err());
    }
}
