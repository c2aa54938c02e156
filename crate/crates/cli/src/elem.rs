//! Element expressions for `--elem`: integers, `pi`, `x` (the generator of
//! the unramified part), `p`, with + - * / ^ and parentheses.

use std::sync::Arc;

use num_bigint::BigInt;

use hyperval_core::kelem::KElem;
use hyperval_core::{FieldElem, FieldModel};

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Name(String),
    Op(char),
}

fn lex(text: &str) -> Result<Vec<Tok>, CliError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let s: String = chars[i..].iter().take_while(|c| c.is_ascii_digit()).collect();
            i += s.len();
            out.push(Tok::Num(s.parse().expect("digits")));
        } else if c.is_ascii_alphabetic() || c == 'π' {
            let s: String = chars[i..].iter().take_while(|c| c.is_ascii_alphanumeric() || **c == 'π').collect();
            i += s.chars().count();
            out.push(Tok::Name(if s == "π" { "pi".into() } else { s }));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(CliError::Domain(format!("unexpected character {c:?} in element {text:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    field: &'a Arc<FieldModel>,
}

impl Parser<'_> {
    fn peek_op(&self, c: char) -> bool {
        self.toks.get(self.pos) == Some(&Tok::Op(c))
    }

    fn expr(&mut self) -> Result<KElem, CliError> {
        let mut acc = self.term()?;
        loop {
            if self.peek_op('+') {
                self.pos += 1;
                acc = acc.add(&self.term()?)?;
            } else if self.peek_op('-') {
                self.pos += 1;
                acc = acc.sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<KElem, CliError> {
        let mut acc = self.unary()?;
        loop {
            if self.peek_op('*') {
                self.pos += 1;
                acc = acc.mul(&self.unary()?)?;
            } else if self.peek_op('/') {
                self.pos += 1;
                acc = acc.div(&self.unary()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<KElem, CliError> {
        if self.peek_op('-') {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        let base = self.atom()?;
        if self.peek_op('^') {
            self.pos += 1;
            let k = match self.toks.get(self.pos) {
                Some(Tok::Num(n)) => u32::try_from(n).map_err(|_| CliError::Domain("exponent too large".into()))?,
                _ => return Err(CliError::Domain("expected an exponent after '^'".into())),
            };
            self.pos += 1;
            return Ok(base.pow(k)?);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<KElem, CliError> {
        let f = self.field;
        let tok = self.toks.get(self.pos).cloned();
        self.pos += 1;
        Ok(match tok {
            Some(Tok::Num(n)) => KElem::from_int(f, n),
            Some(Tok::Name(s)) if s == "pi" => KElem::from_elem(&FieldElem::pi(f)),
            Some(Tok::Name(s)) if s == "x" => KElem::from_elem(&FieldElem::x(f)),
            Some(Tok::Name(s)) if s == "p" => KElem::from_int(f, f.p().clone()),
            Some(Tok::Op('(')) => {
                let v = self.expr()?;
                if !self.peek_op(')') {
                    return Err(CliError::Domain("missing ')'".into()));
                }
                self.pos += 1;
                v
            }
            other => return Err(CliError::Domain(format!("unexpected {other:?} in element expression"))),
        })
    }
}

pub fn parse_elem(field: &Arc<FieldModel>, text: &str) -> Result<KElem, CliError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, field };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(CliError::Domain(format!("trailing input in element {text:?}")));
    }
    Ok(v)
}
