//! Polynomials over O_K and Newton-Hensel root lifting.

use std::sync::Arc;

use crate::elem::FieldElem;
use crate::error::{Error, Result};
use crate::field::FieldModel;

/// Polynomial with coefficients in O_K, lowest degree first.
#[derive(Clone, Debug)]
pub struct Poly {
    pub coeffs: Vec<FieldElem>,
}

impl Poly {
    pub fn new(coeffs: Vec<FieldElem>) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs at least one coefficient");
        Poly { coeffs }
    }

    pub fn from_ints(field: &Arc<FieldModel>, coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| FieldElem::from_int(field, c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &FieldElem) -> Result<FieldElem> {
        let mut acc = self.coeffs.last().unwrap().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(x)?.add(c)?;
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::new(vec![FieldElem::zero(self.coeffs[0].field())]);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.mul_int(k as i64))
                .collect(),
        )
    }

    /// Q(X + c), by repeated synthetic division.
    pub fn shift(&self, c: &FieldElem) -> Result<Poly> {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = a[j + 1].mul(c)?;
                a[j] = a[j].add(&t)?;
            }
        }
        Ok(Poly::new(a))
    }
}

fn val_or_inf(a: &FieldElem) -> Option<u32> {
    a.valuation().unwrap_or_default()
}

/// The root c of Q with ν(c − x0) > ν(Q'(x0)), assuming ν(Q(x0)) > 2ν(Q'(x0)).
///
/// The returned representative satisfies Q(c) ≡ 0 mod m^N; the true root agrees
/// with it modulo m^{N − ν(Q'(c))}.
pub fn hensel_root(q: &Poly, x0: &FieldElem) -> Result<FieldElem> {
    let field = x0.field().clone();
    let top = field.prec();
    let dq = q.derivative();
    let mut x = x0.with_prec(top);
    let d = match val_or_inf(&dq.eval(&x)?) {
        Some(d) => d,
        None => {
            return Err(Error::HenselPreconditionFailed(
                "derivative vanishes at the seed".into(),
            ))
        }
    };
    if let Some(v) = val_or_inf(&q.eval(&x)?) {
        if v <= 2 * d {
            return Err(Error::HenselPreconditionFailed(format!(
                "ν(Q(x0)) = {v} is not greater than 2·ν(Q'(x0)) = {}",
                2 * d
            )));
        }
    }
    let max_steps = 2 * (32 - top.leading_zeros()) + 8;
    for _ in 0..max_steps {
        let qx = q.eval(&x)?;
        if qx.is_zero_at_precision() {
            return Ok(x);
        }
        let step = qx.div(&dq.eval(&x)?)?;
        x = x.sub(&step)?.with_prec(top);
    }
    Err(Error::PrecisionExhausted("Newton iteration did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldDef;
    use num_bigint::BigInt;

    fn field(p: i64, eis: &[i64], n: u32) -> Arc<FieldModel> {
        Arc::new(FieldModel::new(FieldDef::simple(p, eis, n)).unwrap())
    }

    #[test]
    fn sqrt_17_in_q2() {
        let k = field(2, &[-2, 1], 20);
        let q = Poly::from_ints(&k, &[-17, 0, 1]);
        let c = hensel_root(&q, &FieldElem::one(&k)).unwrap();
        assert!(q.eval(&c).unwrap().is_zero_at_precision());
        // The root near 1 is 9 mod 16; its negative, 7 mod 16, is the other root.
        assert_eq!(c.reduce_mod(4).unwrap().coeffs()[0], BigInt::from(9));
        assert_eq!(c.neg().reduce_mod(4).unwrap().coeffs()[0], BigInt::from(7));
    }

    #[test]
    fn unit_square_root_in_q5() {
        let k = field(5, &[-5, 1], 16);
        let q = Poly::from_ints(&k, &[-(1 + 5 * 7), 0, 1]);
        let c = hensel_root(&q, &FieldElem::one(&k)).unwrap();
        assert!(q.eval(&c).unwrap().is_zero_at_precision());
    }

    #[test]
    fn two_is_not_a_square_in_q2() {
        let k = field(2, &[-2, 1], 20);
        let q = Poly::from_ints(&k, &[-2, 0, 1]);
        assert!(matches!(
            hensel_root(&q, &FieldElem::one(&k)),
            Err(Error::HenselPreconditionFailed(_))
        ));
    }

    #[test]
    fn shift_matches_evaluation() {
        let k = field(3, &[-3, 0, 1], 12);
        let q = Poly::from_ints(&k, &[4, -1, 2, 1]);
        let c = FieldElem::pi(&k);
        let s = q.shift(&c).unwrap();
        let x = FieldElem::from_int(&k, 7);
        assert_eq!(s.eval(&x).unwrap(), q.eval(&(&x + &c)).unwrap());
    }
}
