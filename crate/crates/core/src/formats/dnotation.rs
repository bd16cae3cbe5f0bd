//! D-notation: D-terms in prefix form, e.g. `DD13.D16.16.13`.
//!
//! `D` takes two arguments. A numeral with two or more digits is terminated by
//! `.`; a run of digits without a terminating dot is read digit by digit. The
//! final numeral of the input may omit its dot when it is the only argument
//! still missing. Input containing `(` is read in functional form,
//! e.g. `D(L1,D(1,1))`, which also admits non-numeric labels.

use crate::dterm::DTerm;
use crate::error::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DParseOptions {
    /// Read a dotless multi-digit run in the middle of the input as a single
    /// numeral instead of digit by digit.
    pub lenient: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    D,
    Label(String),
}

/// Parse with the strict rules.
pub fn parse(src: &str) -> Result<DTerm, ParseError> {
    parse_with(src, DParseOptions::default()).map(|(d, _)| d)
}

/// Parse, returning the D-term and any warnings produced in lenient mode.
pub fn parse_with(src: &str, opts: DParseOptions) -> Result<(DTerm, Vec<String>), ParseError> {
    if src.contains('(') {
        return parse_functional(src).map(|d| (d, Vec::new()));
    }
    let b = src.as_bytes();
    let mut toks: Vec<(Tok, usize)> = Vec::new();
    let mut warnings = Vec::new();
    // Number of leaves still needed to complete the term.
    let mut need: usize = 1;
    let mut pos = 0;
    while pos < b.len() {
        let c = b[pos];
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        if need == 0 {
            return Err(ParseError::malformed(pos, "trailing input after D-term"));
        }
        match c {
            b'D' => {
                toks.push((Tok::D, pos));
                need += 1;
                pos += 1;
            }
            b'n' => {
                toks.push((Tok::Label("n".into()), pos));
                need -= 1;
                pos += 1;
            }
            b'0'..=b'9' => {
                let start = pos;
                while pos < b.len() && b[pos].is_ascii_digit() {
                    pos += 1;
                }
                let run = &src[start..pos];
                let dotted = b.get(pos) == Some(&b'.');
                let at_end = src[pos..].trim().is_empty();
                if dotted {
                    pos += 1;
                    toks.push((Tok::Label(run.into()), start));
                    need -= 1;
                } else if at_end {
                    if run.len() == need {
                        for (k, ch) in run.chars().enumerate() {
                            toks.push((Tok::Label(ch.to_string()), start + k));
                        }
                        need = 0;
                    } else if need == 1 {
                        toks.push((Tok::Label(run.into()), start));
                        need = 0;
                    } else {
                        return Err(ParseError::malformed(
                            start,
                            format!("ambiguous numeral run `{run}` for {need} missing arguments"),
                        ));
                    }
                } else if opts.lenient && run.len() > 1 {
                    warnings.push(format!("column {start}: read dotless `{run}` as one numeral"));
                    toks.push((Tok::Label(run.into()), start));
                    need -= 1;
                } else {
                    if run.len() > need {
                        return Err(ParseError::malformed(start, "too many arguments"));
                    }
                    for (k, ch) in run.chars().enumerate() {
                        toks.push((Tok::Label(ch.to_string()), start + k));
                    }
                    need -= run.len();
                }
            }
            _ => {
                return Err(ParseError::malformed(
                    pos,
                    format!("unexpected character `{}` in D-term", c as char),
                ))
            }
        }
    }
    if need > 0 {
        return Err(ParseError::malformed(b.len(), "incomplete D-term"));
    }
    Ok((build(&toks), warnings))
}

fn build(toks: &[(Tok, usize)]) -> DTerm {
    let mut stack: Vec<Option<DTerm>> = Vec::new();
    let mut result = None;
    for (tok, _) in toks {
        let mut done = match tok {
            Tok::D => {
                stack.push(None);
                continue;
            }
            Tok::Label(l) => DTerm::prim(l.as_str()),
        };
        loop {
            match stack.pop() {
                None => {
                    result = Some(done);
                    break;
                }
                Some(None) => {
                    stack.push(Some(done));
                    break;
                }
                Some(Some(major)) => done = DTerm::d(&major, &done),
            }
        }
    }
    result.expect("token stream was checked to be complete")
}

fn parse_functional(src: &str) -> Result<DTerm, ParseError> {
    let b = src.as_bytes();
    let mut pos = 0;
    let d = functional_at(b, &mut pos)?;
    while pos < b.len() && b[pos].is_ascii_whitespace() {
        pos += 1;
    }
    if pos < b.len() {
        return Err(ParseError::malformed(pos, "trailing input after D-term"));
    }
    Ok(d)
}

fn functional_at(b: &[u8], pos: &mut usize) -> Result<DTerm, ParseError> {
    while *pos < b.len() && b[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    let start = *pos;
    while *pos < b.len() && (b[*pos].is_ascii_alphanumeric() || b[*pos] == b'_' || b[*pos] == b'\'') {
        *pos += 1;
    }
    if start == *pos {
        return Err(ParseError::malformed(*pos, "expected a label or `D(`"));
    }
    let name = std::str::from_utf8(&b[start..*pos]).expect("ascii");
    let mut p = *pos;
    while p < b.len() && b[p].is_ascii_whitespace() {
        p += 1;
    }
    if name == "D" && b.get(p) == Some(&b'(') {
        *pos = p + 1;
        let major = functional_at(b, pos)?;
        expect(b, pos, b',')?;
        let minor = functional_at(b, pos)?;
        expect(b, pos, b')')?;
        Ok(DTerm::d(&major, &minor))
    } else {
        Ok(DTerm::prim(name))
    }
}

fn expect(b: &[u8], pos: &mut usize, c: u8) -> Result<(), ParseError> {
    while *pos < b.len() && b[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if b.get(*pos) == Some(&c) {
        *pos += 1;
        Ok(())
    } else {
        Err(ParseError::malformed(*pos, format!("expected `{}`", c as char)))
    }
}

fn is_numeral(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|c| c.is_ascii_digit())
}

/// Print in prefix D-notation. D-terms with labels other than numerals and
/// `n` are printed in functional form.
pub fn print(d: &DTerm) -> String {
    let mut toks = Vec::new();
    let mut stack = vec![d.clone()];
    while let Some(t) = stack.pop() {
        match t.children() {
            Some((a, b)) => {
                toks.push(Tok::D);
                stack.push(b.clone());
                stack.push(a.clone());
            }
            None => toks.push(Tok::Label(t.as_prim().expect("leaf").as_str().to_string())),
        }
    }
    let plain = toks.iter().all(|t| match t {
        Tok::D => true,
        Tok::Label(l) => l == "n" || is_numeral(l),
    });
    if !plain {
        return print_functional(d);
    }
    let mut out = String::new();
    let mut k = 0;
    while k < toks.len() {
        match &toks[k] {
            Tok::D => {
                out.push('D');
                k += 1;
            }
            Tok::Label(l) if l == "n" => {
                out.push('n');
                k += 1;
            }
            Tok::Label(_) => {
                // A maximal run of consecutive numerals.
                let start = k;
                while k < toks.len() && matches!(&toks[k], Tok::Label(l) if l != "n") {
                    k += 1;
                }
                let run: Vec<&str> = toks[start..k]
                    .iter()
                    .map(|t| match t {
                        Tok::Label(l) => l.as_str(),
                        Tok::D => unreachable!(),
                    })
                    .collect();
                let at_end = k == toks.len();
                for (j, l) in run.iter().enumerate() {
                    out.push_str(l);
                    let last = j + 1 == run.len();
                    let dot = if l.len() > 1 {
                        !(at_end && last)
                    } else {
                        // A single digit needs separating from a later multi-digit numeral.
                        run[j + 1..].iter().any(|m| m.len() > 1)
                    };
                    if dot {
                        out.push('.');
                    }
                }
            }
        }
    }
    out
}

/// `D(major,minor)` form.
pub fn print_functional(d: &DTerm) -> String {
    match d.children() {
        Some((a, b)) => format!("D({},{})", print_functional(a), print_functional(b)),
        None => d.as_prim().expect("leaf").to_string(),
    }
}
