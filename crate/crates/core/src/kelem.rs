//! Elements of K written as π^v · unit, with relative precision.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::elem::{same_field, FieldElem};
use crate::error::{Error, Result};
use crate::field::FieldModel;
use crate::residue::ResElem;

#[derive(Clone, Debug)]
enum Repr {
    /// Exact zero, or a value known only to have valuation ≥ `lb`.
    Zero { exact: bool, lb: i64 },
    /// π^val · unit, the unit known to its own precision.
    Unit { val: i64, unit: FieldElem },
}

/// An element of K. The unit part has valuation 0; its precision is the
/// relative precision of the element.
#[derive(Clone, Debug)]
pub struct KElem {
    field: Arc<FieldModel>,
    repr: Repr,
}

impl KElem {
    pub fn zero(field: &Arc<FieldModel>) -> Self {
        KElem { field: field.clone(), repr: Repr::Zero { exact: true, lb: 0 } }
    }

    pub fn from_int<T: Into<BigInt>>(field: &Arc<FieldModel>, n: T) -> Self {
        Self::from_elem(&FieldElem::from_int(field, n))
    }

    /// π^val · unit; `unit` must have valuation 0.
    pub fn from_parts(val: i64, unit: FieldElem) -> Result<Self> {
        if !unit.is_unit() {
            return Err(Error::InvalidInput("unit part must have valuation 0".into()));
        }
        Ok(KElem { field: unit.field().clone(), repr: Repr::Unit { val, unit } })
    }

    pub fn from_elem(a: &FieldElem) -> Self {
        let field = a.field().clone();
        let repr = match a.valuation() {
            Ok(None) => Repr::Zero { exact: true, lb: 0 },
            Err(_) => Repr::Zero { exact: false, lb: a.prec() as i64 },
            Ok(Some(v)) => Repr::Unit {
                val: v as i64,
                unit: a.div_pi_pow(v).expect("valuation checked"),
            },
        };
        KElem { field, repr }
    }

    pub fn pi_pow(field: &Arc<FieldModel>, k: i64) -> Self {
        KElem {
            field: field.clone(),
            repr: Repr::Unit { val: k, unit: FieldElem::one(field) },
        }
    }

    pub fn field(&self) -> &Arc<FieldModel> {
        &self.field
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { exact: true, .. })
    }

    /// True for exact zero and for values indistinguishable from zero.
    pub fn is_zero_at_precision(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    /// `None` for exact zero.
    pub fn valuation(&self) -> Result<Option<i64>> {
        match &self.repr {
            Repr::Zero { exact: true, .. } => Ok(None),
            Repr::Zero { .. } => Err(Error::ZeroAtPrecision),
            Repr::Unit { val, .. } => Ok(Some(*val)),
        }
    }

    /// Valuation with zero at working precision read as ∞.
    pub fn valuation_or_inf(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Unit { val, .. } => Some(*val),
        }
    }

    /// The unit part u with self = π^ν(self)·u.
    pub fn unit(&self) -> Option<&FieldElem> {
        match &self.repr {
            Repr::Unit { unit, .. } => Some(unit),
            Repr::Zero { .. } => None,
        }
    }

    /// Absolute precision: the value is known modulo m^abs_prec.
    pub fn abs_prec(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { exact: true, .. } => None,
            Repr::Zero { lb, .. } => Some(*lb),
            Repr::Unit { val, unit } => Some(val + unit.prec() as i64),
        }
    }

    pub fn neg(&self) -> Self {
        let repr = match &self.repr {
            Repr::Unit { val, unit } => Repr::Unit { val: *val, unit: unit.neg() },
            z => z.clone(),
        };
        KElem { field: self.field.clone(), repr }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_field(&self.field, &other.field)?;
        let field = self.field.clone();
        let repr = match (&self.repr, &other.repr) {
            (Repr::Zero { exact: true, .. }, _) => other.repr.clone(),
            (_, Repr::Zero { exact: true, .. }) => self.repr.clone(),
            (Repr::Zero { lb: a, .. }, Repr::Zero { lb: b, .. }) => {
                Repr::Zero { exact: false, lb: *a.min(b) }
            }
            (Repr::Zero { lb, .. }, Repr::Unit { val, unit })
            | (Repr::Unit { val, unit }, Repr::Zero { lb, .. }) => {
                if lb <= val {
                    Repr::Zero { exact: false, lb: *lb }
                } else {
                    let rel = (*lb - *val).min(unit.prec() as i64) as u32;
                    Repr::Unit { val: *val, unit: unit.with_prec(rel) }
                }
            }
            (Repr::Unit { val: v1, unit: u1 }, Repr::Unit { val: v2, unit: u2 }) => {
                let m = *v1.min(v2);
                let a1 = v1 + u1.prec() as i64;
                let a2 = v2 + u2.prec() as i64;
                let rel = (a1.min(a2) - m).min(field.prec() as i64) as u32;
                let s1 = u1.mul(&FieldElem::pi_pow(&field, (v1 - m) as u32))?.with_prec(rel.min(u1.prec() + (v1 - m) as u32));
                let s2 = u2.mul(&FieldElem::pi_pow(&field, (v2 - m) as u32))?.with_prec(rel.min(u2.prec() + (v2 - m) as u32));
                let s = s1.add(&s2)?;
                if s.is_exact_zero() {
                    Repr::Zero { exact: true, lb: 0 }
                } else {
                    match s.valuation() {
                        Ok(Some(t)) => Repr::Unit {
                            val: m + t as i64,
                            unit: s.div_pi_pow(t)?,
                        },
                        Ok(None) => Repr::Zero { exact: true, lb: 0 },
                        Err(_) => Repr::Zero { exact: false, lb: m + s.prec() as i64 },
                    }
                }
            }
        };
        Ok(KElem { field, repr })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        same_field(&self.field, &other.field)?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Zero { exact: true, .. }, _) | (_, Repr::Zero { exact: true, .. }) => {
                Repr::Zero { exact: true, lb: 0 }
            }
            (Repr::Zero { lb: a, .. }, Repr::Zero { lb: b, .. }) => {
                Repr::Zero { exact: false, lb: a + b }
            }
            (Repr::Zero { lb, .. }, Repr::Unit { val, .. })
            | (Repr::Unit { val, .. }, Repr::Zero { lb, .. }) => {
                Repr::Zero { exact: false, lb: lb + val }
            }
            (Repr::Unit { val: v1, unit: u1 }, Repr::Unit { val: v2, unit: u2 }) => {
                Repr::Unit { val: v1 + v2, unit: u1.mul(u2)? }
            }
        };
        Ok(KElem { field: self.field.clone(), repr })
    }

    pub fn inv(&self) -> Result<Self> {
        match &self.repr {
            Repr::Zero { .. } => Err(Error::DivisionByZero),
            Repr::Unit { val, unit } => Ok(KElem {
                field: self.field.clone(),
                repr: Repr::Unit { val: -val, unit: unit.inv_unit()? },
            }),
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = KElem::from_int(&self.field, 1);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Back into O_K; requires valuation ≥ 0. The result has absolute precision
    /// min(abs_prec, N).
    pub fn to_elem(&self) -> Result<FieldElem> {
        match &self.repr {
            Repr::Zero { exact: true, .. } => Ok(FieldElem::zero(&self.field)),
            Repr::Zero { lb, .. } => {
                if *lb < 0 {
                    return Err(Error::NegativeValuation);
                }
                let prec = (*lb as u32).min(self.field.prec());
                Ok(FieldElem::from_coeffs(
                    &self.field,
                    vec![BigInt::from(0); self.field.dim()],
                    prec,
                ))
            }
            Repr::Unit { val, unit } => {
                if *val < 0 {
                    return Err(Error::NegativeValuation);
                }
                let v = *val as u32;
                let prec = (v + unit.prec()).min(self.field.prec());
                Ok(unit.mul(&FieldElem::pi_pow(&self.field, v))?.with_prec(prec))
            }
        }
    }

    /// Residue of an element of O_K; negative valuation is an error.
    pub fn residue(&self) -> Result<ResElem> {
        let k = self.field.residue_field();
        match &self.repr {
            Repr::Zero { exact: true, .. } => Ok(k.zero()),
            Repr::Zero { lb, .. } if *lb >= 1 => Ok(k.zero()),
            Repr::Zero { .. } => Err(Error::PrecisionExhausted("residue of an unknown digit".into())),
            Repr::Unit { val, .. } if *val < 0 => Err(Error::NegativeValuation),
            Repr::Unit { val, .. } if *val > 0 => Ok(k.zero()),
            Repr::Unit { unit, .. } => unit.residue(),
        }
    }

    /// Equality at the common precision.
    pub fn eq_at_precision(&self, other: &Self) -> bool {
        match self.sub(other) {
            Ok(d) => d.is_zero_at_precision(),
            Err(_) => false,
        }
    }

    pub fn render(&self) -> String {
        match &self.repr {
            Repr::Zero { .. } => "0".into(),
            Repr::Unit { val: 0, unit } => unit.render(),
            Repr::Unit { val, unit } => format!("π^{val}·({})", unit.render()),
        }
    }
}

impl fmt::Display for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
