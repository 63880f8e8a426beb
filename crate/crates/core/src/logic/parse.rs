use super::{is_variable_name, Signature, Term};
use crate::error::{Error, Result};

/// Parses `f(t1,...,tk)` / constants / `x1..xn` and validates against `sig`.
/// Variables are accepted up to any index; range checks belong to the caller.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term> {
    let t = parse_term_unchecked(text)?;
    t.check(sig, usize::MAX)?;
    Ok(t)
}

/// Syntactic parse with no signature: `name(...)` is an application, `xN` a
/// variable, any other identifier a constant.
pub fn parse_term_unchecked(text: &str) -> Result<Term> {
    let mut p = TermParser { src: text.as_bytes(), pos: 0 };
    let t = p.term()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(Error::syntax(p.pos, "trailing input"));
    }
    Ok(t)
}

struct TermParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl TermParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() => self.pos += 1,
            _ => return Err(Error::syntax(start, "expected identifier")),
        }
        while let Some(c) = self.src.get(self.pos) {
            if c.is_ascii_alphanumeric() || *c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn term(&mut self) -> Result<Term> {
        let start = self.pos;
        let name = self.ident()?;
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let mut args = Vec::new();
            if self.peek() == Some(b')') {
                return Err(Error::syntax(self.pos, "empty argument list"));
            }
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(Error::syntax(self.pos, "expected `,` or `)`")),
                }
            }
            return Ok(Term::App(name, args));
        }
        if is_variable_name(&name) {
            let index: usize = name[1..]
                .parse()
                .map_err(|_| Error::syntax(start, "bad variable index"))?;
            if index == 0 {
                return Err(Error::syntax(start, "variables start at x1"));
            }
            return Ok(Term::Var(index));
        }
        Ok(Term::Const(name))
    }
}
