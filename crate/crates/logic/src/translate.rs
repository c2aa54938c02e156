//! The map φ ↦ φ̃ from hyperfield sentences to valued-field sentences.
//!
//! Hyperfield variables become field variables and every atomic relation on
//! classes [·]_n is replaced by an existential definition over K that only
//! depends on p, e and n. Positive existential input yields existential output.

use std::collections::BTreeSet;

use crate::ast::{Binder, FTerm, Formula, GTerm, Sort, ValAtom, ValFormula, VhfAtom, VhfFormula, VhfTerm};

/// The output mentions p only as the field constant, so it depends on the
/// initial ramification index `e` and the level `n` alone.
pub fn translate(phi: &VhfFormula, e: u32, n: u32) -> ValFormula {
    let mut t = Translator { e, n, used: phi.all_vars(), next: 0 };
    t.formula(phi)
}

struct Translator {
    e: u32,
    n: u32,
    /// Every name in use; fresh names avoid these.
    used: BTreeSet<String>,
    next: usize,
}

pub fn term(t: &VhfTerm) -> FTerm {
    match t {
        VhfTerm::Zero => FTerm::int(0),
        VhfTerm::One => FTerm::int(1),
        VhfTerm::PHat => FTerm::P,
        VhfTerm::Var(v) => FTerm::Var(v.clone()),
        VhfTerm::Mul(a, b) => FTerm::mul(term(a), term(b)),
        VhfTerm::Pow(a, k) => FTerm::Pow(Box::new(term(a)), *k),
    }
}

fn atom(a: ValAtom) -> ValFormula {
    Formula::Atom(a)
}

fn nu(t: FTerm) -> GTerm {
    GTerm::Nu(t)
}

fn is_zero(t: &FTerm) -> ValFormula {
    atom(ValAtom::EqK(t.clone(), FTerm::int(0)))
}

impl Translator {
    fn fresh(&mut self, stem: &str) -> String {
        loop {
            self.next += 1;
            let name = format!("{stem}_{}", self.next);
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }

    fn formula(&mut self, phi: &VhfFormula) -> ValFormula {
        let k = |bs: &[Binder]| bs.iter().map(|b| Binder::new(b.name.clone(), Sort::K)).collect::<Vec<_>>();
        match phi {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => self.atom(a),
            Formula::Not(f) => Formula::Not(Box::new(self.formula(f))),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| self.formula(f)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| self.formula(f)).collect()),
            Formula::Implies(a, b) => Formula::Implies(Box::new(self.formula(a)), Box::new(self.formula(b))),
            Formula::Exists(bs, f) => Formula::Exists(k(bs), Box::new(self.formula(f))),
            Formula::Forall(bs, f) => Formula::Forall(k(bs), Box::new(self.formula(f))),
        }
    }

    fn atom(&mut self, a: &VhfAtom) -> ValFormula {
        match a {
            VhfAtom::Divides(s, t) => atom(ValAtom::LeG(nu(term(s)), nu(term(t)))),
            VhfAtom::Plus(s, t, r) => self.sum(&term(s), &term(t), &term(r)),
            VhfAtom::Eq(s, t) => {
                let (s, t) = (term(s), term(t));
                Formula::Or(vec![
                    Formula::And(vec![Formula::Not(Box::new(is_zero(&t))), self.product(&s, &FTerm::int(1), &t)]),
                    Formula::And(vec![is_zero(&s), is_zero(&t)]),
                ])
            }
        }
    }

    /// ν(π^e) = ν(p): π is a uniformizer.
    fn uniformizer(&self, pi: &str) -> ValFormula {
        atom(ValAtom::EqG(nu(FTerm::pow(FTerm::var(pi), self.e)), nu(FTerm::P)))
    }

    fn pi_n(&self, pi: &str) -> FTerm {
        FTerm::pow(FTerm::var(pi), self.n)
    }

    /// [z] = [x]·[y]. The nonzero case is written without division:
    /// ν(xy/z − 1) ≥ ν(π^n) ⇔ ν(z·π^n) ≤ ν(xy − z). The zero case is the
    /// positive disjunction (x = 0 ∧ z = 0) ∨ (y = 0 ∧ z = 0).
    fn product(&mut self, x: &FTerm, y: &FTerm, z: &FTerm) -> ValFormula {
        let pi = self.fresh("pi");
        let nonzero = Formula::Exists(
            vec![Binder::new(pi.clone(), Sort::K)],
            Box::new(Formula::And(vec![
                Formula::Not(Box::new(is_zero(z))),
                self.uniformizer(&pi),
                atom(ValAtom::LeG(
                    nu(FTerm::mul(z.clone(), self.pi_n(&pi))),
                    nu(FTerm::sub(FTerm::mul(x.clone(), y.clone()), z.clone())),
                )),
            ])),
        );
        Formula::Or(vec![
            nonzero,
            Formula::And(vec![is_zero(x), is_zero(z)]),
            Formula::And(vec![is_zero(y), is_zero(z)]),
        ])
    }

    /// [z] ∈ [x] + [y] as z ∈ x(1 + m^n) + y(1 + m^n).
    fn sum(&mut self, x: &FTerm, y: &FTerm, z: &FTerm) -> ValFormula {
        let (pi, u, v) = (self.fresh("pi"), self.fresh("u"), self.fresh("v"));
        let one_plus = |w: &str| FTerm::add(FTerm::int(1), FTerm::var(w));
        Formula::Exists(
            [&pi, &u, &v].iter().map(|w| Binder::new((*w).clone(), Sort::K)).collect(),
            Box::new(Formula::And(vec![
                self.uniformizer(&pi),
                atom(ValAtom::LeG(nu(self.pi_n(&pi)), nu(FTerm::var(&u)))),
                atom(ValAtom::LeG(nu(self.pi_n(&pi)), nu(FTerm::var(&v)))),
                atom(ValAtom::EqK(
                    z.clone(),
                    FTerm::add(FTerm::mul(x.clone(), one_plus(&u)), FTerm::mul(y.clone(), one_plus(&v))),
                )),
            ])),
        )
    }
}
