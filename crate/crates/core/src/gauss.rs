//! ℚ_p(t) with the Gauss valuation: an unramified valued field whose residue
//! field F_p(t) is imperfect, with p-basis {t}.
//!
//! Elements are fractions f/g over (ℤ/p^N)[t] with g of unit content, so
//! ν(f/g) = min ν_p of the coefficients of f. Fractions have no canonical form
//! modulo p^N; equality is cross-multiplication.

use std::fmt;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::arith::is_prime;
use crate::error::{Error, Result};

/// Highest numerator or denominator degree accepted by the expansion.
pub const MAX_DEGREE: usize = 8;
/// Highest p^l accepted by the expansion.
pub const MAX_EXPONENT: i64 = 9;

type Poly = Vec<i64>;

fn trim(mut a: Poly) -> Poly {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    if a.is_empty() {
        a.push(0);
    }
    a
}

fn reduce(a: &[i64], m: i64) -> Poly {
    trim(a.iter().map(|c| c.rem_euclid(m)).collect())
}

fn padd(a: &[i64], b: &[i64], m: i64) -> Poly {
    let len = a.len().max(b.len());
    let get = |v: &[i64], i: usize| v.get(i).copied().unwrap_or(0);
    trim((0..len).map(|i| (get(a, i) + get(b, i)).rem_euclid(m)).collect())
}

fn pneg(a: &[i64], m: i64) -> Poly {
    reduce(&a.iter().map(|c| -c).collect::<Vec<_>>(), m)
}

fn pmul(a: &[i64], b: &[i64], m: i64) -> Poly {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y).rem_euclid(m);
        }
    }
    trim(out)
}

fn ppow(a: &[i64], k: u32, m: i64) -> Poly {
    let mut out = vec![1 % m];
    for _ in 0..k {
        out = pmul(&out, a, m);
    }
    trim(out)
}

fn is_zero_poly(a: &[i64]) -> bool {
    a.iter().all(|c| *c == 0)
}

fn nu_p(mut c: i64, p: i64) -> u32 {
    let mut k = 0;
    while c != 0 && c % p == 0 {
        c /= p;
        k += 1;
    }
    k
}

fn inv_mod_p(a: i64, p: i64) -> i64 {
    let (mut r, mut base, mut e) = (1i64, a.rem_euclid(p), p - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    r
}

/// Remainder of a modulo b over F_p; b must be nonzero.
fn fp_rem(a: &[i64], b: &[i64], p: i64) -> (Poly, Poly) {
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    let lead_inv = inv_mod_p(b[db], p);
    let mut r = reduce(a, p);
    let mut q = vec![0i64; r.len().max(1)];
    while !is_zero_poly(&r) && r.len() > db {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        q[dr - db] = c;
        for (i, bc) in b.iter().enumerate() {
            r[dr - db + i] = (r[dr - db + i] - c * bc).rem_euclid(p);
        }
        r = trim(r);
    }
    (trim(q), r)
}

fn fp_gcd(a: &[i64], b: &[i64], p: i64) -> Poly {
    let (mut a, mut b) = (reduce(a, p), reduce(b, p));
    while !is_zero_poly(&b) {
        let (_, r) = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// A rational function over F_p in lowest terms with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpFrac {
    pub p: i64,
    pub num: Vec<i64>,
    pub den: Vec<i64>,
}

impl FpFrac {
    pub fn new(p: i64, num: &[i64], den: &[i64]) -> Result<Self> {
        let num = reduce(num, p);
        let den = reduce(den, p);
        if is_zero_poly(&den) {
            return Err(Error::DivisionByZero);
        }
        if is_zero_poly(&num) {
            return Ok(FpFrac { p, num, den: vec![1] });
        }
        let g = fp_gcd(&num, &den, p);
        let num = fp_rem(&num, &g, p).0;
        let den = fp_rem(&den, &g, p).0;
        let lead = inv_mod_p(*den.last().unwrap(), p);
        let scale = |v: &[i64]| reduce(&v.iter().map(|c| c * lead).collect::<Vec<_>>(), p);
        Ok(FpFrac { p, num: scale(&num), den: scale(&den) })
    }

    /// Membership in F_p(t^p): both parts of the reduced form are polynomials in t^p.
    pub fn is_pth_power(&self) -> bool {
        let in_tp = |v: &[i64]| v.iter().enumerate().all(|(k, c)| *c == 0 || k as i64 % self.p == 0);
        in_tp(&self.num) && in_tp(&self.den)
    }
}

impl fmt::Display for FpFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == [1] {
            write!(f, "{}", render_poly(&self.num))
        } else {
            write!(f, "({})/({})", render_poly(&self.num), render_poly(&self.den))
        }
    }
}

fn render_poly(a: &[i64]) -> String {
    let mut parts = Vec::new();
    for (k, c) in a.iter().enumerate() {
        if *c == 0 {
            continue;
        }
        parts.push(match (k, c) {
            (0, c) => c.to_string(),
            (1, 1) => "t".into(),
            (1, c) => format!("{c}*t"),
            (k, 1) => format!("t^{k}"),
            (k, c) => format!("{c}*t^{k}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// f/g over (ℤ/p^prec)[t], g of unit content.
#[derive(Clone, Debug)]
pub struct GaussElem {
    p: i64,
    prec: u32,
    num: Poly,
    den: Poly,
}

fn modulus(p: i64, prec: u32) -> Result<i64> {
    match p.checked_pow(prec) {
        Some(m) if m < 1 << 31 => Ok(m),
        _ => Err(Error::InvalidInput(format!("p^N = {p}^{prec} exceeds 2^31"))),
    }
}

impl GaussElem {
    pub fn new(p: i64, prec: u32, num: &[i64], den: &[i64]) -> Result<Self> {
        if p < 2 || !is_prime(&BigInt::from(p)) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if prec == 0 {
            return Err(Error::InvalidInput("precision must be positive".into()));
        }
        let m = modulus(p, prec)?;
        let den = reduce(den, m);
        if den.iter().all(|c| c % p == 0) {
            return Err(Error::NonUnitDenominator);
        }
        Ok(GaussElem { p, prec, num: reduce(num, m), den })
    }

    pub fn from_int(p: i64, prec: u32, n: i64) -> Result<Self> {
        Self::new(p, prec, &[n], &[1])
    }

    /// The transcendental t.
    pub fn t(p: i64, prec: u32) -> Result<Self> {
        Self::new(p, prec, &[0, 1], &[1])
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn num(&self) -> &[i64] {
        &self.num
    }

    pub fn den(&self) -> &[i64] {
        &self.den
    }

    fn modulus(&self) -> i64 {
        self.p.pow(self.prec)
    }

    /// The same value known modulo p^prec, prec ≤ current.
    pub fn with_prec(&self, prec: u32) -> Self {
        let prec = prec.min(self.prec).max(1);
        let m = self.p.pow(prec);
        GaussElem { p: self.p, prec, num: reduce(&self.num, m), den: reduce(&self.den, m) }
    }

    fn common(&self, other: &Self) -> Result<(Self, Self, i64)> {
        if self.p != other.p {
            return Err(Error::MixedFields);
        }
        let prec = self.prec.min(other.prec);
        Ok((self.with_prec(prec), other.with_prec(prec), self.p.pow(prec)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (a, b, m) = self.common(other)?;
        let (num, den) = if a.den == b.den {
            (padd(&a.num, &b.num, m), a.den.clone())
        } else {
            (
                padd(&pmul(&a.num, &b.den, m), &pmul(&b.num, &a.den, m), m),
                pmul(&a.den, &b.den, m),
            )
        };
        Ok(GaussElem { p: a.p, prec: a.prec, num, den })
    }

    pub fn neg(&self) -> Self {
        GaussElem { num: pneg(&self.num, self.modulus()), ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (a, b, m) = self.common(other)?;
        Ok(GaussElem { p: a.p, prec: a.prec, num: pmul(&a.num, &b.num, m), den: pmul(&a.den, &b.den, m) })
    }

    pub fn pow(&self, k: u32) -> Self {
        let m = self.modulus();
        GaussElem { num: ppow(&self.num, k, m), den: ppow(&self.den, k, m), ..self.clone() }
    }

    /// Inverse of a unit. Elements of positive valuation have no inverse in the
    /// valuation ring.
    pub fn inv(&self) -> Result<Self> {
        match self.valuation() {
            None => Err(Error::DivisionByZero),
            Some(0) => Ok(GaussElem { num: self.den.clone(), den: self.num.clone(), ..self.clone() }),
            Some(_) => Err(Error::NonUnitDenominator),
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    /// Minimal ν_p of the numerator coefficients; `None` when the numerator
    /// vanishes modulo p^prec.
    pub fn valuation(&self) -> Option<u32> {
        self.num.iter().filter(|c| **c != 0).map(|c| nu_p(*c, self.p)).min()
    }

    pub fn residue(&self) -> FpFrac {
        FpFrac::new(self.p, &self.num, &self.den).expect("denominator has unit content")
    }

    /// Cross-multiplication at the common precision.
    pub fn eq_at_precision(&self, other: &Self) -> bool {
        match self.common(other) {
            Ok((a, b, m)) => pmul(&a.num, &b.den, m) == pmul(&b.num, &a.den, m),
            Err(_) => false,
        }
    }

    /// Division by p of an element of positive valuation; loses one digit.
    pub fn div_p(&self) -> Result<Self> {
        if self.num.iter().any(|c| c % self.p != 0) {
            return Err(Error::NegativeValuation);
        }
        if self.prec == 1 {
            return Err(Error::PrecisionExhausted("dividing by p at precision 1".into()));
        }
        let m = self.p.pow(self.prec - 1);
        Ok(GaussElem {
            p: self.p,
            prec: self.prec - 1,
            num: reduce(&self.num.iter().map(|c| c / self.p).collect::<Vec<_>>(), m),
            den: reduce(&self.den, m),
        })
    }

    /// Parses "f" or "f/g" with f, g integer polynomials in t; `p` stands for the prime.
    pub fn parse(p: i64, prec: u32, text: &str) -> Result<Self> {
        let m = modulus(p, prec)?;
        let mut parser = PolyParser { chars: text.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0, p, m };
        let num = parser.expr()?;
        let den = if parser.eat('/') { parser.expr()? } else { vec![1] };
        if parser.pos != parser.chars.len() {
            return Err(Error::InvalidInput(format!("unexpected input at offset {} in {text:?}", parser.pos)));
        }
        Self::new(p, prec, &num, &den)
    }

    pub fn render(&self) -> String {
        if self.den == [1] {
            render_poly(&self.num)
        } else {
            format!("({})/({})", render_poly(&self.num), render_poly(&self.den))
        }
    }
}

impl fmt::Display for GaussElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

struct PolyParser {
    chars: Vec<char>,
    pos: usize,
    p: i64,
    m: i64,
}

impl PolyParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, what: &str) -> Error {
        Error::InvalidInput(format!("{what} at offset {}", self.pos))
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = padd(&acc, &self.term()?, self.m);
            } else if self.eat('-') {
                acc = padd(&acc, &pneg(&self.term()?, self.m), self.m);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        loop {
            // Juxtaposition is multiplication: "3t", "2(1+t)".
            if self.eat('*') || matches!(self.peek(), Some('t' | 'p' | '(')) {
                acc = pmul(&acc, &self.factor()?, self.m);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Poly> {
        if self.eat('-') {
            return Ok(pneg(&self.factor()?, self.m));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let k = self.number()?;
            let k = u32::try_from(k).map_err(|_| self.error("exponent too large"))?;
            return Ok(ppow(&base, k, self.m));
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<i64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse::<i64>().map_err(|_| self.error("number too large"))
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some('t') => {
                self.pos += 1;
                Ok(vec![0, 1])
            }
            Some('p') => {
                self.pos += 1;
                Ok(reduce(&[self.p], self.m))
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => Ok(reduce(&[self.number()? % self.m], self.m)),
            _ => Err(self.error("expected a term")),
        }
    }
}

/// {b} is p-independent over F_p iff res(b) ∉ F_p(t)^p = F_p(t^p).
pub fn p_independent_check(b: &GaussElem) -> Result<bool> {
    if b.valuation() != Some(0) {
        return Err(Error::InvalidInput("p-independence needs a unit".into()));
    }
    Ok(!b.residue().is_pth_power())
}

/// F_p(t) has p-degree 1, so only sets of size at most one can be p-independent.
pub fn p_independent_set(bs: &[GaussElem]) -> Result<bool> {
    match bs {
        [] => Ok(true),
        [b] => p_independent_check(b),
        _ => {
            for b in bs {
                p_independent_check(b)?;
            }
            Ok(false)
        }
    }
}

/// a ≡ Σ_{i≤l} (Σ_{j<p^l} a_{i,j}^{p^l} t^j) p^i mod p^{l+1}.
#[derive(Clone, Debug)]
pub struct PBasisExpansion {
    pub p: i64,
    pub level: u32,
    /// digits[i][j] = a_{i,j}.
    pub digits: Vec<Vec<GaussElem>>,
}

impl PBasisExpansion {
    pub fn to_json(&self) -> Value {
        let rows: Vec<Vec<String>> =
            self.digits.iter().map(|row| row.iter().map(GaussElem::render).collect()).collect();
        json!({ "p": self.p, "level": self.level, "basis": ["t"], "digits": rows })
    }
}

/// Expansion along the p-basis {t}. With a = f/g, write a = f·g^{q−1}/g^q for
/// q = p^l; the numerator splits by exponent digits k = q·s + j.
pub fn pbasis_expand_t(a: &GaussElem, l: u32) -> Result<PBasisExpansion> {
    let p = a.p;
    let q = p
        .checked_pow(l)
        .filter(|q| *q <= MAX_EXPONENT && l <= 2)
        .ok_or_else(|| Error::BudgetExceeded(format!("p^l = {p}^{l} above {MAX_EXPONENT} or l > 2")))?;
    if a.num.len() > MAX_DEGREE + 1 || a.den.len() > MAX_DEGREE + 1 {
        return Err(Error::BudgetExceeded(format!("degree above {MAX_DEGREE}")));
    }
    if a.prec < l + 1 {
        return Err(Error::PrecisionExhausted(format!("need precision {} for level {l}", l + 1)));
    }
    let a = a.with_prec(l + 1);
    let qu = q as u32;
    let mut m = p.pow(l + 1);
    let mut rest = pmul(&a.num, &ppow(&a.den, qu - 1, m), m);
    let mut digits = Vec::with_capacity(l as usize + 1);
    for i in 0..=l {
        let bar = reduce(&rest, p);
        let mut row = Vec::with_capacity(q as usize);
        let mut sum = vec![0];
        for j in 0..q as usize {
            let c: Poly = trim(bar.iter().skip(j).step_by(q as usize).copied().collect());
            let mut shifted = vec![0; j];
            shifted.extend(ppow(&c, qu, m));
            sum = padd(&sum, &shifted, m);
            row.push(GaussElem::new(p, l + 1, &c, &a.den)?);
        }
        digits.push(row);
        if i < l {
            let diff = padd(&rest, &pneg(&sum, m), m);
            debug_assert!(diff.iter().all(|c| c % p == 0));
            m /= p;
            rest = reduce(&diff.iter().map(|c| c / p).collect::<Vec<_>>(), m);
        }
    }
    Ok(PBasisExpansion { p, level: l, digits })
}

/// Σ_i p^i Σ_j a_{i,j}^{p^l} t^j at precision l+1.
pub fn pbasis_assemble(d: &PBasisExpansion) -> Result<GaussElem> {
    let prec = d.level + 1;
    let q = d.p.pow(d.level) as u32;
    let t = GaussElem::t(d.p, prec)?;
    let mut acc = GaussElem::from_int(d.p, prec, 0)?;
    let mut pi = GaussElem::from_int(d.p, prec, 1)?;
    let p = GaussElem::from_int(d.p, prec, d.p)?;
    for row in &d.digits {
        let mut tj = GaussElem::from_int(d.p, prec, 1)?;
        for a in row {
            acc = acc.add(&a.with_prec(prec).pow(q).mul(&tj)?.mul(&pi)?)?;
            tj = tj.mul(&t)?;
        }
        pi = pi.mul(&p)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(p: i64, s: &str) -> GaussElem {
        GaussElem::parse(p, 8, s).unwrap()
    }

    #[test]
    fn valuation_and_residue() {
        assert_eq!(g(3, "p*t+1").valuation(), Some(0));
        assert_eq!(g(3, "3*t+9").valuation(), Some(1));
        let r = g(3, "(1+p*t)/(t+2)").residue();
        assert_eq!(r, FpFrac::new(3, &[1], &[2, 1]).unwrap());
        assert_eq!(r.to_string(), "(1)/(2 + t)");
    }

    #[test]
    fn inverse_of_t() {
        let t = g(2, "t");
        let inv = t.inv().unwrap();
        assert!(inv.eq_at_precision(&g(2, "1/t")));
        assert!(t.mul(&inv).unwrap().eq_at_precision(&g(2, "1")));
        assert_eq!(g(2, "2*t").inv().unwrap_err(), Error::NonUnitDenominator);
        assert_eq!(GaussElem::new(2, 4, &[1], &[2, 4]).unwrap_err(), Error::NonUnitDenominator);
    }

    #[test]
    fn p_independence() {
        assert!(p_independent_check(&g(2, "t")).unwrap());
        assert!(!p_independent_check(&g(2, "t^2")).unwrap());
        assert!(!p_independent_check(&g(3, "(1+t^3)/(2+t^6)")).unwrap());
        assert!(p_independent_check(&g(2, "1+t")).unwrap());
        assert!(!p_independent_set(&[g(2, "t"), g(2, "t^2")]).unwrap());
    }

    #[test]
    fn expansion_examples() {
        let d = pbasis_expand_t(&g(2, "t^3"), 1).unwrap();
        assert!(d.digits[0][1].eq_at_precision(&g(2, "t")));
        assert!(d.digits[0][0].eq_at_precision(&g(2, "0")));
        assert!(d.digits[1].iter().all(|a| a.valuation().is_none()));

        let d = pbasis_expand_t(&g(2, "2"), 1).unwrap();
        assert!(d.digits[1][0].eq_at_precision(&g(2, "1")));
        assert!(d.digits[0].iter().chain(&d.digits[1][1..]).all(|a| a.valuation().is_none()));

        let a = g(2, "(1)/(1+t)");
        let d = pbasis_expand_t(&a, 1).unwrap();
        assert!(pbasis_assemble(&d).unwrap().eq_at_precision(&a));
    }

    #[test]
    fn expansion_budget() {
        assert!(pbasis_expand_t(&g(5, "t"), 2).unwrap_err().is_budget());
        assert!(pbasis_expand_t(&g(2, "t^9"), 1).unwrap_err().is_budget());
    }
}
