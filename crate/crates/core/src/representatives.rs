//! Canonical representatives of p^l-th powers of residues in O/m^{l+1} and
//! in the hyperfield at level l+1, with the digit expansions they generate.
//!
//! The residue field F_{p^f} is perfect, so every α is β^{p^l} for
//! β = Frob^{-l}(α), and λ_{l+1}(α) is (any lift of β)^{p^l} mod m^{l+1}.

use std::sync::Arc;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::elem::FieldElem;
use crate::error::{Error, Result};
use crate::field::FieldModel;
use crate::hyperfield::{HfClass, Hyperfield};
use crate::residue::ResElem;

/// Radix of a digit expansion: powers of π, or powers of p in W.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Radix {
    Pi,
    P,
}

/// a ≡ Σ_i λ_{l+1}(α_i)·r^i mod m^{l+1} with r = π or p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DigitExpansion {
    pub level: u32,
    pub radix: Radix,
    /// Residue digits α_i, lowest power first.
    pub digits: Vec<ResElem>,
}

fn small_p(field: &FieldModel) -> Result<u32> {
    field
        .p()
        .to_u32()
        .ok_or_else(|| Error::InvalidInput("p does not fit in 32 bits".into()))
}

fn need_prec(field: &FieldModel, k: u32) -> Result<()> {
    if k > field.prec() {
        return Err(Error::PrecisionExhausted(format!(
            "level {k} exceeds the working precision {}",
            field.prec()
        )));
    }
    Ok(())
}

/// b^{p^l} at full working precision.
fn p_power(b: &FieldElem, l: u32) -> Result<FieldElem> {
    let p = small_p(b.field())?;
    let mut x = b.clone();
    for _ in 0..l {
        x = x.pow(p);
    }
    Ok(x)
}

/// b^{p^l} mod m^{l+1}. Depends only on b mod m.
pub fn lambda_from_lift(b: &FieldElem, l: u32) -> Result<FieldElem> {
    need_prec(b.field(), l + 1)?;
    p_power(b, l)?.reduce_mod(l + 1)
}

/// λ_{l+1}(α) in O/m^{l+1}.
pub fn lambda_rep(field: &Arc<FieldModel>, alpha: &ResElem, l: u32) -> Result<FieldElem> {
    lambda_from_lift(&lift_root(field, alpha, l), l)
}

/// The canonical lift of Frob^{-l}(α).
fn lift_root(field: &Arc<FieldModel>, alpha: &ResElem, l: u32) -> FieldElem {
    let beta = field.residue_field().frobenius_inv(alpha, l);
    FieldElem::lift_residue(field, &beta)
}

/// λ_{l+1}(α) as a full-precision representative, for class computations.
fn lambda_full(field: &Arc<FieldModel>, alpha: &ResElem, l: u32) -> Result<FieldElem> {
    need_prec(field, l + 1)?;
    p_power(&lift_root(field, alpha, l), l)
}

/// η_{l+1}(α): the class of λ_{l+1}(α) in the hyperfield of level l+1.
pub fn eta_rep(h: &Hyperfield, alpha: &ResElem, l: u32) -> Result<HfClass> {
    if h.level() != l + 1 {
        return Err(Error::InvalidInput(format!(
            "η_{} needs a hyperfield of level {}, got {}",
            l + 1,
            l + 1,
            h.level()
        )));
    }
    if h.field().residue_field().is_zero(alpha) {
        return Ok(HfClass::Zero);
    }
    h.class_of(&lambda_full(h.field(), alpha, l)?)
}

/// Valuation of a^{p^i} − b^{p^i} for each i ≤ imax.
#[derive(Clone, Debug, Serialize)]
pub struct CongruenceReport {
    pub imax: u32,
    /// `None` when the difference vanishes at working precision.
    pub valuations: Vec<Option<u32>>,
}

/// Checks a^{p^i} ≡ b^{p^i} mod m^{i+1} for i ≤ imax, given a ≡ b mod m.
pub fn p_power_congruence_check(a: &FieldElem, b: &FieldElem, imax: u32) -> Result<CongruenceReport> {
    let field = a.field().clone();
    need_prec(&field, imax + 1)?;
    if !a.sub(b)?.reduce_mod(1)?.is_zero_at_precision() {
        return Err(Error::InvalidInput("a and b differ modulo m".into()));
    }
    let p = small_p(&field)?;
    let (mut x, mut y) = (a.clone(), b.clone());
    let mut valuations = Vec::new();
    for i in 0..=imax {
        if i > 0 {
            x = x.pow(p);
            y = y.pow(p);
        }
        let d = x.sub(&y)?;
        let v = d.valuation().unwrap_or(None);
        if !d.reduce_mod(i + 1)?.is_zero_at_precision() {
            return Err(Error::CongruenceFailed {
                i,
                witness: format!("a = {}, b = {}, difference {}", a.render(), b.render(), d.render()),
            });
        }
        valuations.push(v);
    }
    Ok(CongruenceReport { imax, valuations })
}

/// Greedy π-adic expansion: α_i = res((a − partial)/π^i), lowest power first.
pub fn digit_expand(a: &FieldElem, l: u32) -> Result<DigitExpansion> {
    let field = a.field().clone();
    need_prec(&field, l + 1)?;
    let a = a.reduce_mod(l + 1)?;
    let mut partial = FieldElem::zero(&field);
    let mut digits = Vec::with_capacity(l as usize + 1);
    for i in 0..=l {
        let rest = a.sub(&partial)?.div_pi_pow(i)?;
        let alpha = rest.residue()?;
        let term = lambda_rep(&field, &alpha, l)?.mul(&FieldElem::pi_pow(&field, i))?;
        partial = partial.add(&term)?;
        digits.push(alpha);
    }
    Ok(DigitExpansion { level: l, radix: Radix::Pi, digits })
}

/// Σ_i λ_{l+1}(α_i)·r^i mod m^{l+1}.
pub fn digit_assemble(field: &Arc<FieldModel>, d: &DigitExpansion) -> Result<FieldElem> {
    need_prec(field, d.level + 1)?;
    let r = match d.radix {
        Radix::Pi => FieldElem::pi(field),
        Radix::P => FieldElem::from_int(field, field.p().clone()),
    };
    let mut acc = FieldElem::zero(field);
    let mut power = FieldElem::one(field);
    for alpha in &d.digits {
        acc = acc.add(&lambda_rep(field, alpha, d.level)?.mul(&power)?)?;
        power = power.mul(&r)?;
    }
    acc.reduce_mod(d.level + 1)
}

/// True when every coefficient of a π-power other than π^0 vanishes.
pub fn in_w(a: &FieldElem) -> bool {
    let f = a.field().f();
    a.coeffs()[f..].iter().all(|c| c.sign() == num_bigint::Sign::NoSign)
}

/// p-adic expansion of a ∈ W: subtract the digit, divide by p, repeat while
/// e·i < l+1.
pub fn cohen_expand(a: &FieldElem, l: u32) -> Result<DigitExpansion> {
    let field = a.field().clone();
    need_prec(&field, l + 1)?;
    if !in_w(a) {
        return Err(Error::InvalidInput("element is not in the unramified subring".into()));
    }
    let e = field.e() as u32;
    let p = FieldElem::from_int(&field, field.p().clone());
    let mut cur = a.reduce_mod(l + 1)?;
    let mut digits = Vec::new();
    let mut i = 0;
    while e * i < l + 1 {
        let alpha = cur.residue()?;
        digits.push(alpha.clone());
        if e * (i + 1) < l + 1 {
            let d = lambda_rep(&field, &alpha, l)?.with_prec(cur.prec());
            cur = cur.sub(&d)?.div(&p)?;
        }
        i += 1;
    }
    Ok(DigitExpansion { level: l, radix: Radix::P, digits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldDef;
    use num_bigint::BigInt;

    fn field(p: i64, eis: &[i64], n: u32) -> Arc<FieldModel> {
        Arc::new(FieldModel::new(FieldDef::simple(p, eis, n)).unwrap())
    }

    fn res(k: &Arc<FieldModel>, n: i64) -> ResElem {
        k.residue_field().from_int(&BigInt::from(n))
    }

    #[test]
    fn lambda_two_in_q5() {
        let k = field(5, &[-5, 1], 10);
        let lam = lambda_rep(&k, &res(&k, 2), 1).unwrap();
        assert_eq!(lam.coeffs()[0], BigInt::from(7));
        let other = lambda_from_lift(&FieldElem::from_int(&k, 7), 1).unwrap();
        assert!(lam.eq_at_precision(&other));
        assert!(lambda_rep(&k, &res(&k, 1), 3).unwrap().eq_at_precision(&FieldElem::one(&k)));
    }

    #[test]
    fn eta_two_in_q5() {
        let k = field(5, &[-5, 1], 10);
        let h = Hyperfield::new(k.clone(), 2).unwrap();
        let eta = eta_rep(&h, &res(&k, 2), 1).unwrap();
        assert_eq!(eta, h.class_from_int(7));
        assert!(eta_rep(&h, &res(&k, 2), 2).is_err());
    }

    #[test]
    fn congruence_examples() {
        let k = field(2, &[-2, 1], 12);
        let r = p_power_congruence_check(&FieldElem::one(&k), &FieldElem::from_int(&k, 3), 4).unwrap();
        assert_eq!(r.valuations[1], Some(3));
        let k = field(2, &[-2, 0, 1], 16);
        let b = FieldElem::one(&k).add(&FieldElem::pi(&k)).unwrap();
        let r = p_power_congruence_check(&FieldElem::one(&k), &b, 4).unwrap();
        assert_eq!(r.valuations[1], Some(2));
        assert!(p_power_congruence_check(&FieldElem::one(&k), &FieldElem::pi(&k), 1).is_err());
    }

    #[test]
    fn digits_of_ten_in_q5() {
        let k = field(5, &[-5, 1], 10);
        let d = digit_expand(&FieldElem::from_int(&k, 10), 1).unwrap();
        assert_eq!(d.digits, vec![res(&k, 0), res(&k, 2)]);
        let back = digit_assemble(&k, &d).unwrap();
        assert_eq!(back.coeffs()[0], BigInt::from(10));
        assert_eq!(cohen_expand(&FieldElem::from_int(&k, 10), 1).unwrap().digits, d.digits);
    }

    #[test]
    fn digits_of_pi() {
        let k = field(2, &[-2, 0, 1], 12);
        let d = digit_expand(&FieldElem::pi(&k), 2).unwrap();
        assert_eq!(d.digits, vec![res(&k, 0), res(&k, 1), res(&k, 0)]);
    }

    #[test]
    fn cohen_three_in_ramified_q2() {
        let k = field(2, &[-2, 0, 1], 12);
        let a = FieldElem::from_int(&k, 3);
        let d = cohen_expand(&a, 3).unwrap();
        assert_eq!(d.digits.len(), 2);
        assert!(digit_assemble(&k, &d).unwrap().eq_at_precision(&a.reduce_mod(4).unwrap()));
        assert!(cohen_expand(&FieldElem::pi(&k), 3).is_err());
    }
}
