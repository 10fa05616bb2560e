//! Minimal s-expression reader and printer.
//!
//! Every file format in this crate (knowledge base, gold specs, logical
//! forms, frame listings) is built from three shapes: bare atoms, double
//! quoted strings, and parenthesized lists. `;` starts a comment that runs to
//! the end of the line.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sexpr {
    Atom(String),
    Str(String),
    List(Vec<Sexpr>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SexprError {
    #[error("unexpected end of input (unclosed list or string)")]
    UnexpectedEof,
    #[error("unexpected ')' at byte {0}")]
    UnexpectedClose(usize),
    #[error("invalid escape sequence at byte {0}")]
    BadEscape(usize),
}

impl Sexpr {
    pub fn atom(s: impl Into<String>) -> Self {
        Sexpr::Atom(s.into())
    }

    pub fn string(s: impl Into<String>) -> Self {
        Sexpr::Str(s.into())
    }

    pub fn list(items: impl IntoIterator<Item = Sexpr>) -> Self {
        Sexpr::List(items.into_iter().collect())
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Sexpr::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(items) => Some(items),
            _ => None,
        }
    }

    /// Head atom of a list, e.g. `semtrans` for `(semtrans ...)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom()
    }
}

/// Writes `s` as a double-quoted string literal.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl fmt::Display for Sexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexpr::Atom(a) => f.write_str(a),
            Sexpr::Str(s) => f.write_str(&quote(s)),
            Sexpr::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn is_delim(c: char) -> bool {
    c.is_whitespace() || c == '(' || c == ')' || c == '"' || c == ';'
}

/// Parses every top-level expression in `input`.
pub fn parse_all(input: &str) -> Result<Vec<Sexpr>, SexprError> {
    let mut stack: Vec<Vec<Sexpr>> = vec![Vec::new()];
    let mut chars = input.char_indices().peekable();
    while let Some((pos, c)) = chars.next() {
        match c {
            ';' => {
                for (_, c) in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '(' => stack.push(Vec::new()),
            ')' => {
                if stack.len() < 2 {
                    return Err(SexprError::UnexpectedClose(pos));
                }
                let done = stack.pop().unwrap();
                stack.last_mut().unwrap().push(Sexpr::List(done));
            }
            '"' => {
                let mut s = String::new();
                let mut closed = false;
                while let Some((p, c)) = chars.next() {
                    match c {
                        '"' => {
                            closed = true;
                            break;
                        }
                        '\\' => match chars.next() {
                            Some((_, '"')) => s.push('"'),
                            Some((_, '\\')) => s.push('\\'),
                            Some((_, 'n')) => s.push('\n'),
                            Some(_) => return Err(SexprError::BadEscape(p)),
                            None => return Err(SexprError::UnexpectedEof),
                        },
                        c => s.push(c),
                    }
                }
                if !closed {
                    return Err(SexprError::UnexpectedEof);
                }
                stack.last_mut().unwrap().push(Sexpr::Str(s));
            }
            c if c.is_whitespace() => {}
            c => {
                let mut atom = String::from(c);
                while let Some(&(_, next)) = chars.peek() {
                    if is_delim(next) {
                        break;
                    }
                    atom.push(next);
                    chars.next();
                }
                stack.last_mut().unwrap().push(Sexpr::Atom(atom));
            }
        }
    }
    if stack.len() != 1 {
        return Err(SexprError::UnexpectedEof);
    }
    Ok(stack.pop().unwrap())
}

/// Parses exactly one expression; trailing content is not allowed.
pub fn parse_one(input: &str) -> Result<Option<Sexpr>, SexprError> {
    let mut all = parse_all(input)?;
    match all.len() {
        0 => Ok(None),
        1 => Ok(all.pop()),
        _ => Err(SexprError::UnexpectedClose(input.len())),
    }
}
