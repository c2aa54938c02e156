//! The residue field F_q = F_p[x]/(h mod p).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Coefficients of an element of F_q in the basis 1, x, ..., x^{f-1}, each in [0, p).
pub type ResElem = Vec<BigInt>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueField {
    p: BigInt,
    f: usize,
    /// Monic modulus of degree f, coefficients reduced mod p.
    h: Vec<BigInt>,
}

impl ResidueField {
    pub fn new(p: BigInt, h: &[BigInt]) -> Self {
        let f = h.len() - 1;
        let h = h.iter().map(|c| c.mod_floor(&p)).collect();
        ResidueField { p, f, h }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn degree(&self) -> usize {
        self.f
    }

    pub fn order(&self) -> BigInt {
        num_traits::pow(self.p.clone(), self.f)
    }

    pub fn zero(&self) -> ResElem {
        vec![BigInt::zero(); self.f]
    }

    pub fn one(&self) -> ResElem {
        self.from_int(&BigInt::one())
    }

    pub fn from_int(&self, n: &BigInt) -> ResElem {
        let mut v = self.zero();
        v[0] = n.mod_floor(&self.p);
        v
    }

    /// Takes at most f coefficients.
    pub fn from_coeffs(&self, c: &[BigInt]) -> ResElem {
        assert!(c.len() <= self.f, "too many residue coefficients");
        let mut v = self.zero();
        for (slot, x) in v.iter_mut().zip(c) {
            *slot = x.mod_floor(&self.p);
        }
        v
    }

    pub fn is_zero(&self, a: &ResElem) -> bool {
        a.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, a: &ResElem, b: &ResElem) -> ResElem {
        a.iter().zip(b).map(|(x, y)| (x + y).mod_floor(&self.p)).collect()
    }

    pub fn sub(&self, a: &ResElem, b: &ResElem) -> ResElem {
        a.iter().zip(b).map(|(x, y)| (x - y).mod_floor(&self.p)).collect()
    }

    pub fn neg(&self, a: &ResElem) -> ResElem {
        a.iter().map(|x| (-x).mod_floor(&self.p)).collect()
    }

    pub fn mul(&self, a: &ResElem, b: &ResElem) -> ResElem {
        let f = self.f;
        let mut prod = vec![BigInt::zero(); 2 * f - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        for d in (f..prod.len()).rev() {
            let c = std::mem::take(&mut prod[d]).mod_floor(&self.p);
            if c.is_zero() {
                continue;
            }
            for k in 0..f {
                prod[d - f + k] -= &c * &self.h[k];
            }
        }
        prod.truncate(f);
        prod.into_iter().map(|c| c.mod_floor(&self.p)).collect()
    }

    pub fn pow(&self, a: &ResElem, exp: &BigInt) -> ResElem {
        let mut result = self.one();
        let mut base = a.clone();
        let mut e = exp.clone();
        let two = BigInt::from(2);
        while !e.is_zero() {
            if e.is_odd() {
                result = self.mul(&result, &base);
            }
            base = self.mul(&base, &base);
            e = e.div_floor(&two);
        }
        result
    }

    pub fn inv(&self, a: &ResElem) -> Result<ResElem> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, &(self.order() - 2u32)))
    }

    /// Frobenius x -> x^p applied `l` times.
    pub fn frobenius(&self, a: &ResElem, l: u32) -> ResElem {
        let k = (l as usize) % self.f;
        self.pow(a, &num_traits::pow(self.p.clone(), k))
    }

    /// The unique b with b^{p^l} = a.
    pub fn frobenius_inv(&self, a: &ResElem, l: u32) -> ResElem {
        let k = (self.f - (l as usize) % self.f) % self.f;
        self.pow(a, &num_traits::pow(self.p.clone(), k))
    }

    /// Position in the canonical enumeration: sum of c_j p^j.
    pub fn index_of(&self, a: &ResElem) -> BigInt {
        a.iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * &self.p + c)
    }

    pub fn from_index(&self, idx: &BigInt) -> ResElem {
        let mut v = self.zero();
        let mut n = idx.clone();
        for c in v.iter_mut() {
            let (q, r) = n.div_mod_floor(&self.p);
            *c = r;
            n = q;
        }
        v
    }

    /// All q elements in canonical order; `None` when q does not fit a usize.
    pub fn elements(&self) -> Option<Vec<ResElem>> {
        let q = self.order().to_usize()?;
        Some((0..q).map(|i| self.from_index(&BigInt::from(i))).collect())
    }

    pub fn render(&self, a: &ResElem) -> String {
        let mut parts = Vec::new();
        for (j, c) in a.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            parts.push(match j {
                0 => c.to_string(),
                1 => format!("{c}·x"),
                _ => format!("{c}·x^{j}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}
