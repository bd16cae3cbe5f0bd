//! Polish notation for implicational formulas (`C` is implication) and a
//! small reader for first-order syntax such as `i(i(p,q),r)`.

use std::collections::HashSet;

use crate::error::ParseError;
use crate::term::{FTerm, Sym, TermKind, Var};

/// Parse a formula in Polish notation. Lowercase names are variables unless
/// listed in `constants`. A name is a letter optionally followed by digits.
pub fn parse_polish(src: &str, constants: &HashSet<String>) -> Result<FTerm, ParseError> {
    let bytes = src.as_bytes();
    let mut pos = 0;
    let t = parse_polish_at(bytes, &mut pos, constants)?;
    skip_ws(bytes, &mut pos);
    if pos < bytes.len() {
        return Err(ParseError::malformed(pos, "trailing input after formula"));
    }
    Ok(t)
}

fn skip_ws(b: &[u8], pos: &mut usize) {
    while *pos < b.len() && b[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_polish_at(b: &[u8], pos: &mut usize, constants: &HashSet<String>) -> Result<FTerm, ParseError> {
    // Iterative to cope with long formulas.
    enum Frame {
        Imp(Option<FTerm>),
    }
    let mut stack: Vec<Frame> = Vec::new();
    loop {
        skip_ws(b, pos);
        let Some(&c) = b.get(*pos) else {
            return Err(ParseError::malformed(*pos, "unexpected end of formula"));
        };
        let mut done = if c == b'C' {
            *pos += 1;
            stack.push(Frame::Imp(None));
            continue;
        } else if c.is_ascii_lowercase() {
            let start = *pos;
            *pos += 1;
            while *pos < b.len() && b[*pos].is_ascii_digit() {
                *pos += 1;
            }
            let name = std::str::from_utf8(&b[start..*pos]).expect("ascii");
            if constants.contains(name) {
                FTerm::constant(name)
            } else {
                FTerm::var(Var::from_name(name))
            }
        } else {
            return Err(ParseError::malformed(
                *pos,
                format!("unexpected character `{}` in formula", c as char),
            ));
        };
        loop {
            match stack.pop() {
                None => return Ok(done),
                Some(Frame::Imp(None)) => {
                    stack.push(Frame::Imp(Some(done)));
                    break;
                }
                Some(Frame::Imp(Some(a))) => {
                    done = FTerm::imp(a, done);
                }
            }
        }
    }
}

/// Print a formula in Polish notation. Symbols other than `i` fall back to
/// first-order syntax.
pub fn print_polish(t: &FTerm) -> String {
    let mut out = String::new();
    write_polish(t, &mut out);
    out
}

fn write_polish(t: &FTerm, out: &mut String) {
    match t.kind() {
        TermKind::Var(v) => out.push_str(&v.to_string()),
        TermKind::Const(c) => out.push_str(c.name()),
        TermKind::App(f, args) if *f == Sym::imp() && args.len() == 2 => {
            out.push('C');
            write_polish(&args[0], out);
            write_polish(&args[1], out);
        }
        TermKind::App(..) => out.push_str(&t.to_string()),
    }
}

/// Parse first-order syntax: `f(t1,...,tn)`, constants and variables.
/// Names listed in `constants` are constants; other bare names are variables.
pub fn parse_first_order(src: &str, constants: &HashSet<String>) -> Result<FTerm, ParseError> {
    let b = src.as_bytes();
    let mut pos = 0;
    let t = fo_term(b, &mut pos, constants)?;
    skip_ws(b, &mut pos);
    if pos < b.len() {
        return Err(ParseError::malformed(pos, "trailing input after term"));
    }
    Ok(t)
}

fn fo_term(b: &[u8], pos: &mut usize, constants: &HashSet<String>) -> Result<FTerm, ParseError> {
    skip_ws(b, pos);
    let start = *pos;
    while *pos < b.len() && (b[*pos].is_ascii_alphanumeric() || b[*pos] == b'_') {
        *pos += 1;
    }
    if start == *pos {
        return Err(ParseError::malformed(*pos, "expected a name"));
    }
    let name = std::str::from_utf8(&b[start..*pos]).expect("ascii");
    skip_ws(b, pos);
    if b.get(*pos) == Some(&b'(') {
        *pos += 1;
        let mut args = Vec::new();
        loop {
            args.push(fo_term(b, pos, constants)?);
            skip_ws(b, pos);
            match b.get(*pos) {
                Some(b',') => *pos += 1,
                Some(b')') => {
                    *pos += 1;
                    break;
                }
                _ => return Err(ParseError::malformed(*pos, "expected `,` or `)`")),
            }
        }
        Ok(FTerm::app(Sym::new(name), args))
    } else if constants.contains(name) {
        Ok(FTerm::constant(name))
    } else {
        Ok(FTerm::var(Var::from_name(name)))
    }
}

/// Parse either notation: input containing `(` is read as first-order syntax.
pub fn parse_formula(src: &str, constants: &HashSet<String>) -> Result<FTerm, ParseError> {
    if src.contains('(') {
        parse_first_order(src, constants)
    } else {
        parse_polish(src, constants)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let none = HashSet::new();
        for s in ["CCpqCCqrCpr", "CCCpqrCCrpCsp", "p", "CpCqp", "Cv1Cwv12"] {
            let t = parse_polish(s, &none).unwrap();
            assert_eq!(print_polish(&t), s);
        }
    }

    #[test]
    fn constants_and_errors() {
        let consts: HashSet<String> = ["a".to_string()].into();
        let t = parse_polish("Cap", &consts).unwrap();
        assert!(t.args()[0].as_var().is_none());
        assert!(parse_polish("Cp", &consts).is_err());
        assert!(parse_polish("Cpqq", &consts).is_err());
        assert!(parse_polish("CpX", &consts).is_err());
    }

    #[test]
    fn first_order() {
        let none = HashSet::new();
        let t = parse_formula("i(i(p,q),r)", &none).unwrap();
        assert_eq!(print_polish(&t), "CCpqr");
    }
}
