//! Formulas of the hyperfield language and the three-sorted valued-field
//! language, sharing one connective layer.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;

/// Variable sorts. `H` is the single sort of the hyperfield language; `K`,
/// `R` and `G` are the field, residue-field and value-group sorts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    H,
    K,
    R,
    G,
}

impl Sort {
    fn suffix(self) -> &'static str {
        match self {
            Sort::H => "",
            Sort::K => ":K",
            Sort::R => ":k",
            Sort::G => ":G",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binder {
    pub name: String,
    pub sort: Sort,
}

impl Binder {
    pub fn new(name: impl Into<String>, sort: Sort) -> Self {
        Binder { name: name.into(), sort }
    }
}

/// Connectives and quantifiers over atoms `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula<A> {
    True,
    False,
    Atom(A),
    Not(Box<Formula<A>>),
    And(Vec<Formula<A>>),
    Or(Vec<Formula<A>>),
    Implies(Box<Formula<A>>, Box<Formula<A>>),
    Exists(Vec<Binder>, Box<Formula<A>>),
    Forall(Vec<Binder>, Box<Formula<A>>),
}

/// Atoms that can report the variables they mention.
pub trait AtomVars {
    fn vars(&self, out: &mut BTreeSet<String>);
}

impl<A: AtomVars> Formula<A> {
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => a.vars(out),
            Formula::Not(f) => f.collect_free(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(out)),
            Formula::Implies(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::Exists(bs, f) | Formula::Forall(bs, f) => {
                let mut inner = BTreeSet::new();
                f.collect_free(&mut inner);
                for b in bs {
                    inner.remove(&b.name);
                }
                out.extend(inner);
            }
        }
    }

    /// Every variable name, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = self.free_vars();
        self.visit(&mut |f| {
            if let Formula::Exists(bs, _) | Formula::Forall(bs, _) = f {
                out.extend(bs.iter().map(|b| b.name.clone()));
            }
        });
        out
    }
}

impl<A> Formula<A> {
    /// Pre-order traversal.
    pub fn visit(&self, g: &mut impl FnMut(&Formula<A>)) {
        g(self);
        match self {
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.visit(g),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.visit(g)),
            Formula::Implies(a, b) => {
                a.visit(g);
                b.visit(g);
            }
            _ => {}
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        let mut qf = true;
        self.visit(&mut |f| {
            if matches!(f, Formula::Exists(..) | Formula::Forall(..)) {
                qf = false;
            }
        });
        qf
    }

    /// No negation and no implication.
    pub fn is_positive(&self) -> bool {
        let mut pos = true;
        self.visit(&mut |f| {
            if matches!(f, Formula::Not(_) | Formula::Implies(..)) {
                pos = false;
            }
        });
        pos
    }

    /// Equivalent to a prenex ∃-formula: no ∀, and negation or an implication
    /// antecedent only over quantifier-free subformulas.
    pub fn is_existential(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_existential),
            Formula::Implies(a, b) => a.is_quantifier_free() && b.is_existential(),
            Formula::Exists(_, f) => f.is_existential(),
            Formula::Forall(..) => false,
        }
    }

    pub fn is_positive_existential(&self) -> bool {
        self.is_positive() && self.is_existential()
    }

    /// Nesting depth of quantifier blocks, counting each bound variable.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 0,
            Formula::Not(f) => f.quantifier_depth(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::quantifier_depth).max().unwrap_or(0),
            Formula::Implies(a, b) => a.quantifier_depth().max(b.quantifier_depth()),
            Formula::Exists(bs, f) | Formula::Forall(bs, f) => bs.len() + f.quantifier_depth(),
        }
    }
}

/// Terms of the hyperfield language: products of 0, 1, p̂ and variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VhfTerm {
    Zero,
    One,
    PHat,
    Var(String),
    Mul(Box<VhfTerm>, Box<VhfTerm>),
    Pow(Box<VhfTerm>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VhfAtom {
    /// t₃ ∈ t₁ + t₂.
    Plus(VhfTerm, VhfTerm, VhfTerm),
    Divides(VhfTerm, VhfTerm),
    Eq(VhfTerm, VhfTerm),
}

pub type VhfFormula = Formula<VhfAtom>;

/// Field-sort terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FTerm {
    Var(String),
    /// A nonnegative integer literal.
    Int(BigInt),
    P,
    Add(Box<FTerm>, Box<FTerm>),
    Sub(Box<FTerm>, Box<FTerm>),
    Neg(Box<FTerm>),
    Mul(Box<FTerm>, Box<FTerm>),
    Pow(Box<FTerm>, u32),
}

/// Residue-sort terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RTerm {
    Var(String),
    Int(BigInt),
    Res(FTerm),
    Add(Box<RTerm>, Box<RTerm>),
    Sub(Box<RTerm>, Box<RTerm>),
    Neg(Box<RTerm>),
    Mul(Box<RTerm>, Box<RTerm>),
    Pow(Box<RTerm>, u32),
}

/// Value-group terms over Γ ∪ {∞}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GTerm {
    Var(String),
    Zero,
    Inf,
    Nu(FTerm),
    Add(Box<GTerm>, Box<GTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValAtom {
    EqK(FTerm, FTerm),
    EqR(RTerm, RTerm),
    EqG(GTerm, GTerm),
    LtG(GTerm, GTerm),
    LeG(GTerm, GTerm),
}

pub type ValFormula = Formula<ValAtom>;

impl VhfTerm {
    pub fn mul(a: VhfTerm, b: VhfTerm) -> Self {
        VhfTerm::Mul(Box::new(a), Box::new(b))
    }

    fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            VhfTerm::Var(v) => {
                out.insert(v.clone());
            }
            VhfTerm::Mul(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            VhfTerm::Pow(a, _) => a.vars(out),
            _ => {}
        }
    }
}

impl AtomVars for VhfAtom {
    fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            VhfAtom::Plus(a, b, c) => [a, b, c].iter().for_each(|t| t.vars(out)),
            VhfAtom::Divides(a, b) | VhfAtom::Eq(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }
}

impl FTerm {
    pub fn int(n: i64) -> Self {
        assert!(n >= 0, "integer literals are nonnegative");
        FTerm::Int(BigInt::from(n))
    }

    pub fn var(name: &str) -> Self {
        FTerm::Var(name.into())
    }

    pub fn add(a: FTerm, b: FTerm) -> Self {
        FTerm::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: FTerm, b: FTerm) -> Self {
        FTerm::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: FTerm, b: FTerm) -> Self {
        FTerm::Mul(Box::new(a), Box::new(b))
    }

    /// a^k, with a^1 written as a.
    pub fn pow(a: FTerm, k: u32) -> Self {
        if k == 1 {
            a
        } else {
            FTerm::Pow(Box::new(a), k)
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            FTerm::Var(v) => {
                out.insert(v.clone());
            }
            FTerm::Int(_) | FTerm::P => {}
            FTerm::Add(a, b) | FTerm::Sub(a, b) | FTerm::Mul(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            FTerm::Neg(a) | FTerm::Pow(a, _) => a.vars(out),
        }
    }

    /// Syntactic degree in `x`.
    pub fn degree_in(&self, x: &str) -> u32 {
        match self {
            FTerm::Var(v) => u32::from(v == x),
            FTerm::Int(_) | FTerm::P => 0,
            FTerm::Add(a, b) | FTerm::Sub(a, b) => a.degree_in(x).max(b.degree_in(x)),
            FTerm::Mul(a, b) => a.degree_in(x) + b.degree_in(x),
            FTerm::Neg(a) => a.degree_in(x),
            FTerm::Pow(a, k) => a.degree_in(x) * k,
        }
    }
}

impl RTerm {
    fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            RTerm::Var(v) => {
                out.insert(v.clone());
            }
            RTerm::Int(_) => {}
            RTerm::Res(t) => t.vars(out),
            RTerm::Add(a, b) | RTerm::Sub(a, b) | RTerm::Mul(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            RTerm::Neg(a) | RTerm::Pow(a, _) => a.vars(out),
        }
    }
}

impl GTerm {
    pub fn nu(t: FTerm) -> Self {
        GTerm::Nu(t)
    }

    fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            GTerm::Var(v) => {
                out.insert(v.clone());
            }
            GTerm::Zero | GTerm::Inf => {}
            GTerm::Nu(t) => t.vars(out),
            GTerm::Add(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }
}

impl AtomVars for ValAtom {
    fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            ValAtom::EqK(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            ValAtom::EqR(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            ValAtom::EqG(a, b) | ValAtom::LtG(a, b) | ValAtom::LeG(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }
}

// Printing. Operator precedence: sums 1, products 2, negation 3, powers 4,
// primaries 5.

fn paren(f: &mut fmt::Formatter<'_>, wrap: bool, g: impl FnOnce(&mut fmt::Formatter<'_>) -> fmt::Result) -> fmt::Result {
    if wrap {
        f.write_str("(")?;
    }
    g(f)?;
    if wrap {
        f.write_str(")")?;
    }
    Ok(())
}

impl VhfTerm {
    fn prec(&self) -> u8 {
        match self {
            VhfTerm::Mul(..) => 2,
            VhfTerm::Pow(..) => 4,
            _ => 5,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        paren(f, self.prec() < min, |f| match self {
            VhfTerm::Zero => f.write_str("0"),
            VhfTerm::One => f.write_str("1"),
            VhfTerm::PHat => f.write_str("phat"),
            VhfTerm::Var(v) => f.write_str(v),
            VhfTerm::Mul(a, b) => {
                a.write(f, 2)?;
                f.write_str(" * ")?;
                b.write(f, 3)
            }
            VhfTerm::Pow(a, k) => {
                a.write(f, 5)?;
                write!(f, "^{k}")
            }
        })
    }
}

impl fmt::Display for VhfTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

impl fmt::Display for VhfAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VhfAtom::Plus(a, b, c) => write!(f, "plus({a}, {b}, {c})"),
            VhfAtom::Divides(a, b) => write!(f, "{a} | {b}"),
            VhfAtom::Eq(a, b) => write!(f, "{a} = {b}"),
        }
    }
}

macro_rules! ring_term_display {
    ($t:ident, $extra:expr) => {
        impl $t {
            fn prec(&self) -> u8 {
                match self {
                    $t::Add(..) | $t::Sub(..) => 1,
                    $t::Mul(..) => 2,
                    $t::Neg(..) => 3,
                    $t::Pow(..) => 4,
                    _ => 5,
                }
            }

            fn write(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
                paren(f, self.prec() < min, |f| match self {
                    $t::Var(v) => f.write_str(v),
                    $t::Int(n) => write!(f, "{n}"),
                    $t::Add(a, b) => {
                        a.write(f, 1)?;
                        f.write_str(" + ")?;
                        b.write(f, 2)
                    }
                    $t::Sub(a, b) => {
                        a.write(f, 1)?;
                        f.write_str(" - ")?;
                        b.write(f, 2)
                    }
                    $t::Mul(a, b) => {
                        a.write(f, 2)?;
                        f.write_str(" * ")?;
                        b.write(f, 3)
                    }
                    $t::Neg(a) => {
                        f.write_str("-")?;
                        a.write(f, 4)
                    }
                    $t::Pow(a, k) => {
                        a.write(f, 5)?;
                        write!(f, "^{k}")
                    }
                    #[allow(unreachable_patterns)]
                    other => $extra(other, f),
                })
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.write(f, 0)
            }
        }
    };
}

ring_term_display!(FTerm, |t: &FTerm, f: &mut fmt::Formatter<'_>| match t {
    FTerm::P => f.write_str("p"),
    _ => unreachable!(),
});

ring_term_display!(RTerm, |t: &RTerm, f: &mut fmt::Formatter<'_>| match t {
    RTerm::Res(x) => write!(f, "res({x})"),
    _ => unreachable!(),
});

impl GTerm {
    fn write(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = if matches!(self, GTerm::Add(..)) { 1 } else { 4 };
        paren(f, prec < min, |f| match self {
            GTerm::Var(v) => f.write_str(v),
            GTerm::Zero => f.write_str("0"),
            GTerm::Inf => f.write_str("inf"),
            GTerm::Nu(t) => write!(f, "nu({t})"),
            GTerm::Add(a, b) => {
                a.write(f, 1)?;
                f.write_str(" + ")?;
                b.write(f, 2)
            }
        })
    }
}

impl fmt::Display for GTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

impl fmt::Display for ValAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValAtom::EqK(a, b) => write!(f, "{a} = {b}"),
            ValAtom::EqR(a, b) => write!(f, "{a} = {b}"),
            ValAtom::EqG(a, b) => write!(f, "{a} = {b}"),
            ValAtom::LtG(a, b) => write!(f, "{a} < {b}"),
            ValAtom::LeG(a, b) => write!(f, "{a} <= {b}"),
        }
    }
}

impl<A: fmt::Display> Formula<A> {
    fn is_simple(&self) -> bool {
        matches!(self, Formula::True | Formula::False | Formula::Atom(_) | Formula::Not(_))
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        paren(f, !self.is_simple(), |f| write!(f, "{self}"))
    }

    fn write_binders(f: &mut fmt::Formatter<'_>, q: &str, bs: &[Binder]) -> fmt::Result {
        let names: Vec<String> = bs.iter().map(|b| format!("{}{}", b.name, b.sort.suffix())).collect();
        write!(f, "{q} {}. ", names.join(", "))
    }
}

/// Canonical text: binary connectives parenthesize compound operands and a
/// quantifier body extends to the end of its scope.
impl<A: fmt::Display> fmt::Display for Formula<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(g) => {
                f.write_str("not ")?;
                g.write_operand(f)
            }
            Formula::And(gs) | Formula::Or(gs) => {
                let op = if matches!(self, Formula::And(_)) { " and " } else { " or " };
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    g.write_operand(f)?;
                }
                Ok(())
            }
            Formula::Implies(a, b) => {
                a.write_operand(f)?;
                f.write_str(" -> ")?;
                b.write_operand(f)
            }
            Formula::Exists(bs, g) => {
                Self::write_binders(f, "exists", bs)?;
                write!(f, "{g}")
            }
            Formula::Forall(bs, g) => {
                Self::write_binders(f, "forall", bs)?;
                write!(f, "{g}")
            }
        }
    }
}
