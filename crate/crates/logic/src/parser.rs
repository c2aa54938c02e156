//! Recursive-descent parsers for both languages. The grammar is published in
//! docs/grammar.ebnf.

use num_bigint::BigInt;

use crate::ast::{Binder, FTerm, Formula, GTerm, RTerm, Sort, ValAtom, ValFormula, VhfAtom, VhfFormula, VhfTerm};
use crate::error::{Error, Result};
use crate::lexer::{lex, Tok, Token};

pub fn parse_vhf(text: &str) -> Result<VhfFormula> {
    let mut p = Parser::new(text, Lang::Vhf)?;
    let f = p.implication::<VhfLang>()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_val(text: &str) -> Result<ValFormula> {
    let mut p = Parser::new(text, Lang::Val)?;
    let f = p.implication::<ValLang>()?;
    p.finish()?;
    Ok(f)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Lang {
    Vhf,
    Val,
}

/// Atoms are parsed per language; the connective layer is shared.
trait AtomParser {
    type Atom;
    fn atom(p: &mut Parser) -> Result<Formula<Self::Atom>>;
}

struct VhfLang;
struct ValLang;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    lang: Lang,
    /// Bound variables in scope, innermost last.
    scope: Vec<Binder>,
}

/// Untyped arithmetic expression, resolved to a sort after parsing.
#[derive(Clone, Debug)]
enum Raw {
    Var(String),
    Int(BigInt),
    P,
    Inf,
    Nu(Box<Raw>),
    Res(Box<Raw>),
    Add(Box<Raw>, Box<Raw>),
    Sub(Box<Raw>, Box<Raw>),
    Neg(Box<Raw>),
    Mul(Box<Raw>, Box<Raw>),
    Pow(Box<Raw>, u32),
}

fn is_term_continuation(t: &Tok) -> bool {
    matches!(
        t,
        Tok::Eq | Tok::Ne | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge | Tok::Bar | Tok::Star | Tok::Add | Tok::Minus | Tok::Caret
    )
}

impl Parser {
    fn new(text: &str, lang: Lang) -> Result<Self> {
        Ok(Parser { toks: lex(text)?, pos: 0, lang, scope: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = &self.toks[self.pos];
        Err(Error::Syntax { line: t.line, col: t.col, message: message.into() })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}, found {:?}", self.peek()))
        }
    }

    fn finish(&self) -> Result<()> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            self.err(format!("unexpected {:?} after the formula", self.peek()))
        }
    }

}

impl Parser {
    fn implication<A: AtomParser>(&mut self) -> Result<Formula<A::Atom>> {
        let lhs = self.disjunction::<A>()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication::<A>()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction<A: AtomParser>(&mut self) -> Result<Formula<A::Atom>> {
        let mut parts = vec![self.conjunction::<A>()?];
        while *self.peek() == Tok::Or {
            self.bump();
            parts.push(self.conjunction::<A>()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::Or(parts) })
    }

    fn conjunction<A: AtomParser>(&mut self) -> Result<Formula<A::Atom>> {
        let mut parts = vec![self.unary::<A>()?];
        while *self.peek() == Tok::And {
            self.bump();
            parts.push(self.unary::<A>()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::And(parts) })
    }

    fn unary<A: AtomParser>(&mut self) -> Result<Formula<A::Atom>> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::Not(Box::new(self.unary::<A>()?)))
            }
            Tok::Exists | Tok::Forall => self.quantifier::<A>(),
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::LParen => {
                let save = self.pos;
                self.bump();
                let inner = self.implication::<A>();
                if let Ok(f) = inner {
                    if *self.peek() == Tok::RParen {
                        self.bump();
                        if !is_term_continuation(self.peek()) {
                            return Ok(f);
                        }
                    }
                }
                self.pos = save;
                A::atom(self)
            }
            _ => A::atom(self),
        }
    }

    fn quantifier<A: AtomParser>(&mut self) -> Result<Formula<A::Atom>> {
        let universal = self.bump() == Tok::Forall;
        let mut binders = Vec::new();
        loop {
            let name = match self.bump() {
                Tok::Ident(s) => s,
                other => return self.err(format!("expected a variable, found {other:?}")),
            };
            let sort = if *self.peek() == Tok::Colon {
                self.bump();
                if self.lang == Lang::Vhf {
                    return self.err("hyperfield variables carry no sort annotation");
                }
                match self.bump() {
                    Tok::Ident(s) if s == "K" => Sort::K,
                    Tok::Ident(s) if s == "k" => Sort::R,
                    Tok::Ident(s) if s == "G" => Sort::G,
                    other => return self.err(format!("unknown sort {other:?}; use K, k or G")),
                }
            } else if self.lang == Lang::Vhf {
                Sort::H
            } else {
                Sort::K
            };
            binders.push(Binder::new(name, sort));
            if *self.peek() != Tok::Comma {
                break;
            }
            self.bump();
        }
        let depth = self.scope.len();
        self.scope.extend(binders.iter().cloned());
        let body = match self.peek() {
            Tok::Dot => {
                self.bump();
                self.implication::<A>()
            }
            Tok::LParen => self.unary::<A>(),
            other => self.err(format!("expected '.' or '(' after the bound variables, found {other:?}")),
        };
        self.scope.truncate(depth);
        let body = Box::new(body?);
        Ok(if universal { Formula::Forall(binders, body) } else { Formula::Exists(binders, body) })
    }

    fn exponent(&mut self) -> Result<u32> {
        match self.bump() {
            Tok::Int(s) => s.parse().or_else(|_| self.err("exponent too large")),
            other => self.err(format!("expected an integer exponent, found {other:?}")),
        }
    }

    // Hyperfield terms.

    fn vhf_term(&mut self) -> Result<VhfTerm> {
        let mut t = self.vhf_factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            t = VhfTerm::mul(t, self.vhf_factor()?);
        }
        Ok(t)
    }

    fn vhf_factor(&mut self) -> Result<VhfTerm> {
        let base = self.vhf_primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            return Ok(VhfTerm::Pow(Box::new(base), self.exponent()?));
        }
        Ok(base)
    }

    fn vhf_primary(&mut self) -> Result<VhfTerm> {
        match self.bump() {
            Tok::Int(s) if s == "0" => Ok(VhfTerm::Zero),
            Tok::Int(s) if s == "1" => Ok(VhfTerm::One),
            Tok::Int(s) => {
                self.pos -= 1;
                self.err(format!("the hyperfield language has constants 0, 1 and phat only, not {s}"))
            }
            Tok::PHat | Tok::P => Ok(VhfTerm::PHat),
            Tok::Ident(v) => Ok(VhfTerm::Var(v)),
            Tok::LParen => {
                let t = self.vhf_term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            other => {
                self.pos -= usize::from(other != Tok::End);
                self.err(format!("expected a term, found {other:?}"))
            }
        }
    }

    // Valued-field expressions.

    fn raw_expr(&mut self) -> Result<Raw> {
        let mut t = self.raw_term()?;
        loop {
            match self.peek() {
                Tok::Add => {
                    self.bump();
                    t = Raw::Add(Box::new(t), Box::new(self.raw_term()?));
                }
                Tok::Minus => {
                    self.bump();
                    t = Raw::Sub(Box::new(t), Box::new(self.raw_term()?));
                }
                _ => return Ok(t),
            }
        }
    }

    fn raw_term(&mut self) -> Result<Raw> {
        let mut t = self.raw_unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            t = Raw::Mul(Box::new(t), Box::new(self.raw_unary()?));
        }
        Ok(t)
    }

    fn raw_unary(&mut self) -> Result<Raw> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Raw::Neg(Box::new(self.raw_unary()?)));
        }
        let base = self.raw_primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            return Ok(Raw::Pow(Box::new(base), self.exponent()?));
        }
        Ok(base)
    }

    fn raw_primary(&mut self) -> Result<Raw> {
        match self.bump() {
            Tok::Int(s) => Ok(Raw::Int(s.parse().expect("digits"))),
            Tok::P | Tok::PHat => Ok(Raw::P),
            Tok::Inf => Ok(Raw::Inf),
            Tok::Ident(v) => Ok(Raw::Var(v)),
            t @ (Tok::Nu | Tok::Res) => {
                self.expect(Tok::LParen, "'('")?;
                let inner = Box::new(self.raw_expr()?);
                self.expect(Tok::RParen, "')'")?;
                Ok(if t == Tok::Nu { Raw::Nu(inner) } else { Raw::Res(inner) })
            }
            Tok::LParen => {
                let e = self.raw_expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            other => {
                self.pos -= usize::from(other != Tok::End);
                self.err(format!("expected an expression, found {other:?}"))
            }
        }
    }

    fn sort_of_var(&self, v: &str) -> Sort {
        self.scope.iter().rev().find(|b| b.name == v).map_or(Sort::K, |b| b.sort)
    }

    fn infer(&self, e: &Raw) -> Option<Sort> {
        match e {
            Raw::Var(v) => Some(self.sort_of_var(v)),
            Raw::Int(_) => None,
            Raw::P => Some(Sort::K),
            Raw::Inf | Raw::Nu(_) => Some(Sort::G),
            Raw::Res(_) => Some(Sort::R),
            Raw::Neg(a) | Raw::Pow(a, _) => self.infer(a),
            Raw::Add(a, b) | Raw::Sub(a, b) | Raw::Mul(a, b) => self.infer(a).or_else(|| self.infer(b)),
        }
    }

    fn sort_err<T>(&self, e: &Raw, want: Sort) -> Result<T> {
        Err(Error::Sort(format!("{e:?} is not a term of sort {want:?}")))
    }

    fn to_f(&self, e: &Raw) -> Result<FTerm> {
        Ok(match e {
            Raw::Var(v) if self.sort_of_var(v) == Sort::K => FTerm::Var(v.clone()),
            Raw::Int(n) => FTerm::Int(n.clone()),
            Raw::P => FTerm::P,
            Raw::Add(a, b) => FTerm::Add(Box::new(self.to_f(a)?), Box::new(self.to_f(b)?)),
            Raw::Sub(a, b) => FTerm::Sub(Box::new(self.to_f(a)?), Box::new(self.to_f(b)?)),
            Raw::Mul(a, b) => FTerm::Mul(Box::new(self.to_f(a)?), Box::new(self.to_f(b)?)),
            Raw::Neg(a) => FTerm::Neg(Box::new(self.to_f(a)?)),
            Raw::Pow(a, k) => FTerm::Pow(Box::new(self.to_f(a)?), *k),
            _ => return self.sort_err(e, Sort::K),
        })
    }

    fn to_r(&self, e: &Raw) -> Result<RTerm> {
        Ok(match e {
            Raw::Var(v) if self.sort_of_var(v) == Sort::R => RTerm::Var(v.clone()),
            Raw::Int(n) => RTerm::Int(n.clone()),
            Raw::Res(a) => RTerm::Res(self.to_f(a)?),
            Raw::Add(a, b) => RTerm::Add(Box::new(self.to_r(a)?), Box::new(self.to_r(b)?)),
            Raw::Sub(a, b) => RTerm::Sub(Box::new(self.to_r(a)?), Box::new(self.to_r(b)?)),
            Raw::Mul(a, b) => RTerm::Mul(Box::new(self.to_r(a)?), Box::new(self.to_r(b)?)),
            Raw::Neg(a) => RTerm::Neg(Box::new(self.to_r(a)?)),
            Raw::Pow(a, k) => RTerm::Pow(Box::new(self.to_r(a)?), *k),
            _ => return self.sort_err(e, Sort::R),
        })
    }

    fn to_g(&self, e: &Raw) -> Result<GTerm> {
        Ok(match e {
            Raw::Var(v) if self.sort_of_var(v) == Sort::G => GTerm::Var(v.clone()),
            Raw::Int(n) if n == &BigInt::from(0) => GTerm::Zero,
            Raw::Inf => GTerm::Inf,
            Raw::Nu(a) => GTerm::Nu(self.to_f(a)?),
            Raw::Add(a, b) => GTerm::Add(Box::new(self.to_g(a)?), Box::new(self.to_g(b)?)),
            _ => return self.sort_err(e, Sort::G),
        })
    }
}

impl AtomParser for VhfLang {
    type Atom = VhfAtom;

    fn atom(p: &mut Parser) -> Result<VhfFormula> {
        if *p.peek() == Tok::Plus {
            p.bump();
            p.expect(Tok::LParen, "'('")?;
            let a = p.vhf_term()?;
            p.expect(Tok::Comma, "','")?;
            let b = p.vhf_term()?;
            p.expect(Tok::Comma, "','")?;
            let c = p.vhf_term()?;
            p.expect(Tok::RParen, "')'")?;
            return Ok(Formula::Atom(VhfAtom::Plus(a, b, c)));
        }
        let lhs = p.vhf_term()?;
        let rel = p.bump();
        let rhs = p.vhf_term()?;
        match rel {
            Tok::Bar => Ok(Formula::Atom(VhfAtom::Divides(lhs, rhs))),
            Tok::Eq => Ok(Formula::Atom(VhfAtom::Eq(lhs, rhs))),
            Tok::Ne => Ok(Formula::Not(Box::new(Formula::Atom(VhfAtom::Eq(lhs, rhs))))),
            other => {
                p.pos -= 1;
                p.err(format!("expected '|', '=' or '!=', found {other:?}"))
            }
        }
    }
}

impl AtomParser for ValLang {
    type Atom = ValAtom;

    fn atom(p: &mut Parser) -> Result<ValFormula> {
        let lhs = p.raw_expr()?;
        let rel = p.peek().clone();
        if !matches!(rel, Tok::Eq | Tok::Ne | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge) {
            return p.err(format!("expected a relation, found {rel:?}"));
        }
        p.bump();
        let rhs = p.raw_expr()?;
        let atom = match rel {
            Tok::Eq | Tok::Ne => match p.infer(&lhs).or_else(|| p.infer(&rhs)).unwrap_or(Sort::K) {
                Sort::R => ValAtom::EqR(p.to_r(&lhs)?, p.to_r(&rhs)?),
                Sort::G => ValAtom::EqG(p.to_g(&lhs)?, p.to_g(&rhs)?),
                _ => ValAtom::EqK(p.to_f(&lhs)?, p.to_f(&rhs)?),
            },
            Tok::Lt => ValAtom::LtG(p.to_g(&lhs)?, p.to_g(&rhs)?),
            Tok::Le => ValAtom::LeG(p.to_g(&lhs)?, p.to_g(&rhs)?),
            Tok::Gt => ValAtom::LtG(p.to_g(&rhs)?, p.to_g(&lhs)?),
            _ => ValAtom::LeG(p.to_g(&rhs)?, p.to_g(&lhs)?),
        };
        let f = Formula::Atom(atom);
        Ok(if rel == Tok::Ne { Formula::Not(Box::new(f)) } else { f })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vhf_examples() {
        let f = parse_vhf("exists x. x*x = phat").unwrap();
        assert_eq!(f.to_string(), "exists x. x * x = phat");
        assert!(f.is_positive_existential());
        let g = parse_vhf("plus(x,y,z) and x | y").unwrap();
        assert!(matches!(&g, Formula::And(v) if v.len() == 2));
        let h = parse_vhf("forall x. not (x=0)").unwrap();
        assert!(!h.is_positive());
        assert_eq!(parse_vhf("∃x(x·x = p̂)").unwrap(), f);
    }

    #[test]
    fn val_sorts() {
        let f = parse_val("exists x:K, g:G. nu(x) = g and res(x) = 1 and g >= 0").unwrap();
        assert_eq!(f.to_string(), "exists x:K, g:G. nu(x) = g and res(x) = 1 and 0 <= g");
        assert!(matches!(parse_val("exists g:G. g * g = 0"), Err(Error::Sort(_))));
        assert!(matches!(parse_val("nu(x) < x"), Err(Error::Sort(_))));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_vhf("exists x.\n  x * = 1") {
            Err(Error::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 7)),
            other => panic!("{other:?}"),
        }
        assert!(parse_vhf("x = 2").is_err());
    }

    #[test]
    fn parenthesized_terms_and_formulas() {
        let f = parse_vhf("(x * y) = z or (x | y)").unwrap();
        assert_eq!(f.to_string(), "x * y = z or x | y");
        let g = parse_val("(x + 1) * y = -(x * y) - 2").unwrap();
        assert_eq!(g.to_string(), "(x + 1) * y = -(x * y) - 2");
        assert_eq!(parse_val(&g.to_string()).unwrap(), g);
    }
}
