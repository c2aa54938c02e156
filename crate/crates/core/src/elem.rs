//! Elements of the valuation ring O_K known modulo a power of m.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use rand::Rng;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::FieldModel;
use crate::residue::ResElem;

/// An element of O_K known modulo m^prec, prec ≤ N.
///
/// Coefficients are canonical: slot (i, j) lies in [0, p^{ceil((prec-i)/e)}).
#[derive(Clone, Debug)]
pub struct FieldElem {
    field: Arc<FieldModel>,
    coeffs: Vec<BigInt>,
    prec: u32,
    exact_zero: bool,
}

pub(crate) fn same_field(a: &Arc<FieldModel>, b: &Arc<FieldModel>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::MixedFields)
    }
}

impl FieldElem {
    /// Builds an element from raw coefficients, reducing them canonically.
    pub fn from_coeffs(field: &Arc<FieldModel>, mut coeffs: Vec<BigInt>, prec: u32) -> Self {
        assert_eq!(coeffs.len(), field.dim(), "coefficient count must be e·f");
        let prec = prec.min(field.prec());
        field.canonical(&mut coeffs, prec);
        FieldElem { field: field.clone(), coeffs, prec, exact_zero: false }
    }

    pub fn from_int<T: Into<BigInt>>(field: &Arc<FieldModel>, n: T) -> Self {
        let n: BigInt = n.into();
        if n.is_zero() {
            return Self::zero(field);
        }
        let mut coeffs = vec![BigInt::zero(); field.dim()];
        coeffs[0] = n;
        Self::from_coeffs(field, coeffs, field.prec())
    }

    /// The element of W with the given x-coefficients.
    pub fn from_w(field: &Arc<FieldModel>, w: &[BigInt]) -> Self {
        let mut coeffs = vec![BigInt::zero(); field.dim()];
        for (slot, c) in coeffs.iter_mut().zip(w) {
            *slot = c.clone();
        }
        Self::from_coeffs(field, coeffs, field.prec())
    }

    /// Exact zero.
    pub fn zero(field: &Arc<FieldModel>) -> Self {
        FieldElem {
            field: field.clone(),
            coeffs: vec![BigInt::zero(); field.dim()],
            prec: field.prec(),
            exact_zero: true,
        }
    }

    pub fn one(field: &Arc<FieldModel>) -> Self {
        Self::from_int(field, 1)
    }

    /// The uniformizer π.
    pub fn pi(field: &Arc<FieldModel>) -> Self {
        if field.e() == 1 {
            return Self::from_int(field, field.p().clone());
        }
        let mut coeffs = vec![BigInt::zero(); field.dim()];
        coeffs[field.f()] = BigInt::one();
        Self::from_coeffs(field, coeffs, field.prec())
    }

    /// The unramified generator x (a root of h).
    pub fn x(field: &Arc<FieldModel>) -> Self {
        let mut coeffs = vec![BigInt::zero(); field.dim()];
        if field.f() > 1 {
            coeffs[1] = BigInt::one();
        }
        Self::from_coeffs(field, coeffs, field.prec())
    }

    pub fn pi_pow(field: &Arc<FieldModel>, k: u32) -> Self {
        Self::pi(field).pow(k)
    }

    /// A uniformly random element of O/m^prec.
    pub fn random<R: Rng + ?Sized>(field: &Arc<FieldModel>, prec: u32, rng: &mut R) -> Self {
        let prec = prec.min(field.prec());
        let coeffs = field
            .slot_moduli(prec)
            .iter()
            .map(|m| rng.gen_bigint_range(&BigInt::zero(), m))
            .collect();
        Self::from_coeffs(field, coeffs, prec)
    }

    /// Canonical lift of a residue element, with digits in [0, p).
    pub fn lift_residue(field: &Arc<FieldModel>, r: &ResElem) -> Self {
        Self::from_w(field, r)
    }

    pub fn field(&self) -> &Arc<FieldModel> {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact_zero
    }

    /// True when every stored digit vanishes (exact zero included).
    pub fn is_zero_at_precision(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The same value re-declared as known modulo m^prec. Used when the stored
    /// representative is itself the intended element (Newton iterates, lifts).
    pub fn with_prec(&self, prec: u32) -> Self {
        if self.exact_zero {
            return self.clone();
        }
        Self::from_coeffs(&self.field, self.coeffs.clone(), prec)
    }

    /// The valuation, `None` for exact zero.
    pub fn valuation(&self) -> Result<Option<u32>> {
        if self.exact_zero {
            return Ok(None);
        }
        match self.field.raw_valuation(&self.coeffs) {
            Some(v) => Ok(Some(v)),
            None => Err(Error::ZeroAtPrecision),
        }
    }

    /// A lower bound for the valuation: exact when nonzero, the precision otherwise.
    pub fn valuation_lb(&self) -> Option<u32> {
        if self.exact_zero {
            return None;
        }
        Some(self.field.raw_valuation(&self.coeffs).unwrap_or(self.prec))
    }

    pub fn is_unit(&self) -> bool {
        matches!(self.valuation(), Ok(Some(0)))
    }

    fn build(&self, coeffs: Vec<BigInt>, prec: u32) -> Self {
        Self::from_coeffs(&self.field, coeffs, prec)
    }

    pub fn neg(&self) -> Self {
        if self.exact_zero {
            return self.clone();
        }
        let coeffs = self.coeffs.iter().map(|c| -c).collect();
        self.build(coeffs, self.prec)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_field(&self.field, &other.field)?;
        if self.exact_zero {
            return Ok(other.clone());
        }
        if other.exact_zero {
            return Ok(self.clone());
        }
        let prec = self.prec.min(other.prec);
        let m = self.field.modulus(prec);
        let coeffs = self.field.raw_add(&self.coeffs, &other.coeffs, &m);
        let mut out = self.build(coeffs, prec);
        if self.prec == other.prec && other.coeffs == self.neg().coeffs {
            out.exact_zero = true;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        same_field(&self.field, &other.field)?;
        if self.exact_zero || other.exact_zero {
            return Ok(Self::zero(&self.field));
        }
        let va = self.valuation_lb().unwrap_or(0);
        let vb = other.valuation_lb().unwrap_or(0);
        let prec = (self.prec + vb).min(other.prec + va).min(self.field.prec());
        let m = self.field.modulus(prec);
        let coeffs = self.field.raw_mul(&self.coeffs, &other.coeffs, &m);
        Ok(self.build(coeffs, prec))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(&self.field);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base).expect("same field");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("same field");
            }
        }
        result
    }

    pub fn mul_int<T: Into<BigInt>>(&self, n: T) -> Self {
        self.mul(&Self::from_int(&self.field, n)).expect("same field")
    }

    /// Division by π^k; loses k units of precision.
    pub fn div_pi_pow(&self, k: u32) -> Result<Self> {
        if self.exact_zero || k == 0 {
            return Ok(self.clone());
        }
        if k > self.prec {
            return Err(Error::PrecisionExhausted(format!(
                "dividing by π^{k} at precision {}",
                self.prec
            )));
        }
        if let Some(v) = self.field.raw_valuation(&self.coeffs) {
            if v < k {
                return Err(Error::NegativeValuation);
            }
        }
        let mut coeffs = self.coeffs.clone();
        let mut digits = self.field.digits(self.prec) + k as usize;
        let m = self.field.p_pow(digits);
        for c in coeffs.iter_mut() {
            *c = c.mod_floor(&m);
        }
        for _ in 0..k {
            coeffs = self.field.raw_div_pi(&coeffs, digits);
            digits -= 1;
        }
        Ok(self.build(coeffs, self.prec - k))
    }

    /// Inverse of a unit by Newton iteration y ← y(2 − ay).
    pub fn inv_unit(&self) -> Result<Self> {
        if self.exact_zero {
            return Err(Error::DivisionByZero);
        }
        match self.valuation() {
            Ok(Some(0)) => {}
            Ok(_) => return Err(Error::NegativeValuation),
            Err(_) => return Err(Error::DivisionByZero),
        }
        let k = self.field.residue_field();
        let r = k.inv(&self.residue()?)?;
        let prec = self.prec;
        let mut y = Self::lift_residue(&self.field, &r).with_prec(prec);
        let a = self.with_prec(prec);
        let two = Self::from_int(&self.field, 2).with_prec(prec);
        let one = Self::one(&self.field).with_prec(prec);
        for _ in 0..64 {
            let ay = a.mul(&y)?;
            if ay.sub(&one)?.is_zero_at_precision() {
                return Ok(y);
            }
            y = y.mul(&two.sub(&ay)?)?;
        }
        Err(Error::PrecisionExhausted("inverse did not converge".into()))
    }

    /// Quotient a/b inside O_K; requires ν(b) ≤ ν(a). Loses ν(b) units of precision.
    pub fn div(&self, other: &Self) -> Result<Self> {
        same_field(&self.field, &other.field)?;
        let vb = match other.valuation() {
            Ok(Some(v)) => v,
            Ok(None) | Err(Error::ZeroAtPrecision) => return Err(Error::DivisionByZero),
            Err(e) => return Err(e),
        };
        if self.exact_zero {
            return Ok(self.clone());
        }
        let num = self.div_pi_pow(vb)?;
        let den = other.div_pi_pow(vb)?.inv_unit()?;
        num.mul(&den)
    }

    /// Image in the residue field.
    pub fn residue(&self) -> Result<ResElem> {
        let k = self.field.residue_field();
        if self.prec == 0 {
            return Err(Error::PrecisionExhausted("residue of an element known mod m^0".into()));
        }
        Ok(k.from_coeffs(&self.coeffs[..self.field.f()]))
    }

    /// Class in O/m^k with canonical representative.
    pub fn reduce_mod(&self, k: u32) -> Result<Self> {
        if k > self.prec {
            return Err(Error::PrecisionExhausted(format!(
                "reduce_mod({k}) of an element known mod m^{}",
                self.prec
            )));
        }
        Ok(self.build(self.coeffs.clone(), k))
    }

    /// Equality of values at the common precision.
    pub fn eq_at_precision(&self, other: &Self) -> bool {
        if self.exact_zero && other.exact_zero {
            return true;
        }
        match self.sub(other) {
            Ok(d) => d.is_zero_at_precision(),
            Err(_) => false,
        }
    }

    pub fn render(&self) -> String {
        if self.is_zero_at_precision() {
            return "0".into();
        }
        let f = self.field.f();
        let mut parts = Vec::new();
        for (idx, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (i, j) = (idx / f, idx % f);
            let mut term = c.to_string();
            match j {
                0 => {}
                1 => term.push_str("·x"),
                _ => term.push_str(&format!("·x^{j}")),
            }
            match i {
                0 => {}
                1 => term.push_str("·π"),
                _ => term.push_str(&format!("·π^{i}")),
            }
            parts.push(term);
        }
        parts.join(" + ")
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.eq_at_precision(other)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())?;
        if self.prec < self.field.prec() {
            write!(f, " + O(π^{})", self.prec)?;
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident) => {
        impl std::ops::$tr<&FieldElem> for &FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: &FieldElem) -> FieldElem {
                FieldElem::$method(self, rhs).expect("operands from different fields")
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl std::ops::Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem::neg(self)
    }
}

/// Canonical representatives of (O/m^k)^×, (q−1)·q^{k−1} of them, in mixed-radix
/// order with slot 0 least significant.
pub fn enumerate_units(field: &Arc<FieldModel>, k: u32, cap: usize) -> Result<Vec<FieldElem>> {
    if k == 0 || k > field.prec() {
        return Err(Error::PrecisionExhausted(format!("enumerate_units({k})")));
    }
    let moduli = field.slot_moduli(k);
    let total = moduli.iter().fold(BigInt::one(), |acc, m| acc * m);
    let q = field.residue_field().order();
    let units = &total / &q * (&q - 1u32);
    if units > BigInt::from(cap) {
        return Err(Error::BudgetExceeded(format!(
            "{units} units exceed the cap of {cap}"
        )));
    }
    let f = field.f();
    let mut out = Vec::new();
    let mut digits = vec![BigInt::zero(); moduli.len()];
    loop {
        if digits[..f].iter().any(|c| !c.is_multiple_of(field.p())) {
            out.push(FieldElem::from_coeffs(field, digits.clone(), k));
        }
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                return Ok(out);
            }
            digits[pos] += 1u32;
            if digits[pos] < moduli[pos] {
                break;
            }
            digits[pos] = BigInt::zero();
            pos += 1;
        }
    }
}

/// Canonical representatives of all of O/m^k in the same order.
pub fn enumerate_quotient(field: &Arc<FieldModel>, k: u32, cap: usize) -> Result<Vec<FieldElem>> {
    let moduli = field.slot_moduli(k);
    let total = moduli.iter().fold(BigInt::one(), |acc, m| acc * m);
    if total > BigInt::from(cap) {
        return Err(Error::BudgetExceeded(format!(
            "{total} residues exceed the cap of {cap}"
        )));
    }
    let mut out = Vec::new();
    let mut digits = vec![BigInt::zero(); moduli.len()];
    loop {
        out.push(FieldElem::from_coeffs(field, digits.clone(), k));
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                return Ok(out);
            }
            digits[pos] += 1u32;
            if digits[pos] < moduli[pos] {
                break;
            }
            digits[pos] = BigInt::zero();
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldDef;

    fn field(p: i64, eis: &[i64], n: u32) -> Arc<FieldModel> {
        Arc::new(FieldModel::new(FieldDef::simple(p, eis, n)).unwrap())
    }

    #[test]
    fn pi_squared_is_five() {
        let k = field(5, &[-5, 0, 1], 12);
        let pi = FieldElem::pi(&k);
        assert_eq!(&pi * &pi, FieldElem::from_int(&k, 5));
    }

    #[test]
    fn inverse_of_three_mod_32() {
        let k = field(2, &[-2, 1], 5);
        let inv = FieldElem::from_int(&k, 3).inv_unit().unwrap();
        assert_eq!(inv.coeffs()[0], BigInt::from(11));
    }

    #[test]
    fn additive_inverse_is_exact_zero() {
        let k = field(5, &[-5, 0, 1], 12);
        let a = FieldElem::from_int(&k, 17).add(&FieldElem::pi(&k)).unwrap();
        let z = a.add(&a.neg()).unwrap();
        assert!(z.is_exact_zero());
        assert_eq!(z.valuation(), Ok(None));
        assert_eq!(a.sub(&a).unwrap().valuation(), Ok(None));
    }

    #[test]
    fn valuations() {
        let k = field(2, &[-2, 0, 1], 12);
        assert_eq!(FieldElem::from_int(&k, 2).valuation(), Ok(Some(2)));
        let two_plus_pi = FieldElem::from_int(&k, 2).add(&FieldElem::pi(&k)).unwrap();
        assert_eq!(two_plus_pi.valuation(), Ok(Some(1)));
        let tiny = FieldElem::from_int(&k, 1 << 6);
        assert_eq!(tiny.valuation(), Err(Error::ZeroAtPrecision));
    }

    #[test]
    fn residue_and_reduction() {
        let q5 = field(5, &[-5, 1], 12);
        let seven = FieldElem::from_int(&q5, 7);
        assert_eq!(seven.residue().unwrap(), vec![BigInt::from(2)]);
        let r = FieldElem::from_int(&q5, 35).reduce_mod(2).unwrap();
        assert_eq!(r.coeffs()[0], BigInt::from(10));
        let k = field(5, &[-5, 0, 1], 12);
        assert_eq!(FieldElem::pi(&k).residue().unwrap(), vec![BigInt::zero()]);
    }

    #[test]
    fn division_by_pi() {
        let k = field(2, &[-2, 0, 1], 12);
        let two = FieldElem::from_int(&k, 2);
        let q = two.div_pi_pow(1).unwrap();
        assert_eq!(q, FieldElem::pi(&k).with_prec(11));
        assert_eq!(q.prec(), 11);
        let q5 = field(5, &[-10, 0, 1], 12);
        let pi = FieldElem::pi(&q5);
        let ten = FieldElem::from_int(&q5, 10);
        let r = ten.div(&pi).unwrap();
        assert_eq!(&r * &pi, ten.with_prec(11));
    }

    #[test]
    fn unit_enumeration() {
        let q2 = field(2, &[-2, 1], 8);
        let u: Vec<BigInt> = enumerate_units(&q2, 2, 100)
            .unwrap()
            .iter()
            .map(|a| a.coeffs()[0].clone())
            .collect();
        assert_eq!(u, vec![BigInt::from(1), BigInt::from(3)]);
        let k = field(2, &[-2, 0, 1], 12);
        let u = enumerate_units(&k, 2, 100).unwrap();
        assert_eq!(u.len(), 2);
        assert_eq!(u[1], FieldElem::one(&k).add(&FieldElem::pi(&k)).unwrap().reduce_mod(2).unwrap());
        assert!(matches!(enumerate_units(&k, 12, 10), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = FieldElem::one(&field(5, &[-5, 1], 12));
        let b = FieldElem::one(&field(3, &[-3, 1], 12));
        assert_eq!(a.add(&b).unwrap_err(), Error::MixedFields);
    }
}
