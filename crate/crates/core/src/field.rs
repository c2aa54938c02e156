//! Finitely ramified p-adic fields K = W[π]/(P), W = ℤ_p[x]/(h).
//!
//! Elements of the valuation ring are stored as e·f integer coefficients in the
//! basis x^j π^i (index `i*f + j`). All raw arithmetic here works on integer
//! lifts modulo a power of p; precision bookkeeping lives in [`crate::elem`].

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::Value;

use crate::arith::{ceil_div, is_prime, valuation_p};
use crate::error::{Error, Result};
use crate::residue::ResidueField;

/// Largest unramified degree accepted by [`FieldModel::new`].
pub const MAX_F: usize = 3;
/// Largest absolute degree e·f accepted by [`FieldModel::new`].
pub const MAX_EF: usize = 8;

/// Plain parameters of a field, as read from a definition file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDef {
    pub p: BigInt,
    pub f: usize,
    pub e: usize,
    /// e+1 coefficients of P, each a W-element given by f integers.
    pub eis: Vec<Vec<BigInt>>,
    pub h: Vec<BigInt>,
    pub prec: u32,
    /// Default hyperfield level, if the file names one.
    pub n: Option<u32>,
}

fn json_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::InvalidInput(format!("not an integer: {n}"))),
        Value::String(s) => s
            .trim()
            .parse::<BigInt>()
            .map_err(|_| Error::InvalidInput(format!("not an integer: {s:?}"))),
        other => Err(Error::InvalidInput(format!("not an integer: {other}"))),
    }
}

fn json_usize(obj: &Value, key: &str) -> Result<usize> {
    obj.get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| Error::InvalidInput(format!("missing or invalid field {key:?}")))
}

impl FieldDef {
    /// Unramified degree 1 with P = X^e + ... given as plain integers.
    pub fn simple(p: i64, eis: &[i64], prec: u32) -> Self {
        FieldDef {
            p: BigInt::from(p),
            f: 1,
            e: eis.len() - 1,
            eis: eis.iter().map(|&c| vec![BigInt::from(c)]).collect(),
            h: vec![BigInt::zero(), BigInt::one()],
            prec,
            n: None,
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let p = json_int(
            v.get("p")
                .ok_or_else(|| Error::InvalidInput("missing field \"p\"".into()))?,
        )?;
        let f = json_usize(v, "f")?;
        let e = json_usize(v, "e")?;
        let prec = json_usize(v, "N")? as u32;
        let n = v.get("n").and_then(Value::as_u64).map(|n| n as u32);
        let eis_raw = v
            .get("eis")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("missing array \"eis\"".into()))?;
        let mut eis = Vec::with_capacity(eis_raw.len());
        for c in eis_raw {
            let mut w = match c {
                Value::Array(items) => items.iter().map(json_int).collect::<Result<Vec<_>>>()?,
                other => vec![json_int(other)?],
            };
            if w.len() > f {
                return Err(Error::InvalidInput(
                    "eis coefficient longer than f".into(),
                ));
            }
            w.resize(f.max(1), BigInt::zero());
            eis.push(w);
        }
        let h = match v.get("h") {
            Some(Value::Array(items)) => items.iter().map(json_int).collect::<Result<Vec<_>>>()?,
            None if f == 1 => vec![BigInt::zero(), BigInt::one()],
            _ => return Err(Error::InvalidInput("missing array \"h\"".into())),
        };
        Ok(FieldDef { p, f, e, eis, h, prec, n })
    }

    pub fn to_json(&self) -> Value {
        let int = |c: &BigInt| match c.to_i64() {
            Some(v) => Value::from(v),
            None => Value::from(c.to_string()),
        };
        let eis: Vec<Value> = self
            .eis
            .iter()
            .map(|w| {
                if self.f == 1 {
                    int(&w[0])
                } else {
                    Value::Array(w.iter().map(int).collect())
                }
            })
            .collect();
        let mut obj = serde_json::Map::new();
        obj.insert("p".into(), int(&self.p));
        obj.insert("f".into(), Value::from(self.f));
        obj.insert("e".into(), Value::from(self.e));
        obj.insert("eis".into(), Value::Array(eis));
        obj.insert("h".into(), Value::Array(self.h.iter().map(int).collect()));
        obj.insert("N".into(), Value::from(self.prec));
        if let Some(n) = self.n {
            obj.insert("n".into(), Value::from(n));
        }
        Value::Object(obj)
    }
}

/// A validated field with working precision N. Immutable after construction.
#[derive(Clone, Debug)]
pub struct FieldModel {
    def: FieldDef,
    residue: ResidueField,
    /// p^0, p^1, ..., enough for every working modulus at precision N.
    p_pows: Vec<BigInt>,
    /// Full coefficient vector of g with π·g = P(0).
    pi_cofactor: Vec<BigInt>,
    /// Inverse of P(0)/p in W, modulo the largest cached power of p.
    a0_unit_inv: Vec<BigInt>,
}

impl PartialEq for FieldModel {
    fn eq(&self, other: &Self) -> bool {
        self.def == other.def
    }
}

impl Eq for FieldModel {}

/// Exhaustive search for a monic factor of degree 1..=deg/2 modulo p.
fn has_proper_factor(h: &[BigInt], p: &BigInt) -> Result<bool> {
    let deg = h.len() - 1;
    let pu = p
        .to_u64()
        .ok_or_else(|| Error::BudgetExceeded("irreducibility search for huge p".into()))?;
    for d in 1..=deg / 2 {
        let count = (pu as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
        if count > 1 << 22 {
            return Err(Error::BudgetExceeded(format!(
                "irreducibility search over {count} candidates"
            )));
        }
        for idx in 0..count as u64 {
            let mut g: Vec<BigInt> = Vec::with_capacity(d + 1);
            let mut n = idx;
            for _ in 0..d {
                g.push(BigInt::from(n % pu));
                n /= pu;
            }
            g.push(BigInt::one());
            if poly_divides_mod_p(&g, h, p) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Whether monic g divides h over F_p.
fn poly_divides_mod_p(g: &[BigInt], h: &[BigInt], p: &BigInt) -> bool {
    let mut r: Vec<BigInt> = h.iter().map(|c| c.mod_floor(p)).collect();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = r.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let off = r.len() - dg;
        for k in 0..dg {
            r[off + k] = (&r[off + k] - &lead * &g[k]).mod_floor(p);
        }
    }
    r.iter().all(|c| c.is_zero())
}

impl FieldModel {
    pub fn new(def: FieldDef) -> Result<Self> {
        let FieldDef { p, f, e, eis, h, prec, .. } = &def;
        let (f, e, prec) = (*f, *e, *prec);
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if f == 0 || e == 0 {
            return Err(Error::InvalidInput("f and e must be at least 1".into()));
        }
        if f > MAX_F || e * f > MAX_EF {
            return Err(Error::InvalidInput(format!(
                "degree caps exceeded (f ≤ {MAX_F}, e·f ≤ {MAX_EF})"
            )));
        }
        if h.len() != f + 1 || !h[f].is_one() {
            return Err(Error::InvalidInput(format!("h must be monic of degree {f}")));
        }
        if f > 1 && has_proper_factor(h, p)? {
            return Err(Error::NotIrreducible(format!("h = {h:?} factors modulo {p}")));
        }
        if eis.len() != e + 1 || eis.iter().any(|w| w.len() != f) {
            return Err(Error::NotEisenstein(format!(
                "expected {} coefficients with {f} entries each",
                e + 1
            )));
        }
        let is_one = eis[e][0].is_one() && eis[e][1..].iter().all(Zero::is_zero);
        if !is_one {
            return Err(Error::NotEisenstein("P is not monic".into()));
        }
        for (k, w) in eis[..e].iter().enumerate() {
            if w.iter().any(|c| !c.is_multiple_of(p)) {
                return Err(Error::NotEisenstein(format!(
                    "coefficient of X^{k} is not divisible by {p}"
                )));
            }
        }
        let unit_part: Vec<BigInt> = eis[0].iter().map(|c| c / p).collect();
        if unit_part.iter().all(|c| c.is_multiple_of(p)) {
            return Err(Error::NotEisenstein(
                "constant coefficient is divisible by p^2".into(),
            ));
        }
        let need = 4 * e as u32 + 1;
        if prec < need {
            return Err(Error::PrecisionTooSmall { have: prec, need });
        }

        let residue = ResidueField::new(p.clone(), h);
        let top = ceil_div(prec as i64, e as i64) as usize + 3;
        let mut p_pows = Vec::with_capacity(top + 1);
        p_pows.push(BigInt::one());
        for k in 1..=top {
            let next = &p_pows[k - 1] * p;
            p_pows.push(next);
        }

        let mut pi_cofactor = vec![BigInt::zero(); e * f];
        for k in 1..=e {
            for j in 0..f {
                pi_cofactor[(k - 1) * f + j] = -&eis[k][j];
            }
        }

        let mut model = FieldModel {
            def: def.clone(),
            residue,
            p_pows,
            pi_cofactor,
            a0_unit_inv: Vec::new(),
        };
        let m = model.p_pows[top].clone();
        let res_inv = model
            .residue
            .inv(&model.residue.from_coeffs(&unit_part))
            .expect("unit part is nonzero mod p");
        let two = {
            let mut t = vec![BigInt::zero(); f];
            t[0] = BigInt::from(2);
            t
        };
        let mut y = res_inv;
        for _ in 0..(top.ilog2() + 2) {
            let ay = model.w_mul(&unit_part, &y, &m);
            let corr: Vec<BigInt> = two.iter().zip(&ay).map(|(t, a)| t - a).collect();
            y = model.w_mul(&y, &corr, &m);
        }
        model.a0_unit_inv = y;
        Ok(model)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::new(FieldDef::from_json_str(text)?)
    }

    pub fn def(&self) -> &FieldDef {
        &self.def
    }

    pub fn p(&self) -> &BigInt {
        &self.def.p
    }

    pub fn f(&self) -> usize {
        self.def.f
    }

    pub fn e(&self) -> usize {
        self.def.e
    }

    /// Working precision: elements are known modulo m^N.
    pub fn prec(&self) -> u32 {
        self.def.prec
    }

    pub fn residue_field(&self) -> &ResidueField {
        &self.residue
    }

    /// Eisenstein coefficients over W, low degree first.
    pub fn eisenstein(&self) -> &[Vec<BigInt>] {
        &self.def.eis
    }

    pub fn h(&self) -> &[BigInt] {
        &self.def.h
    }

    /// Number of stored coefficients, e·f.
    pub fn dim(&self) -> usize {
        self.def.e * self.def.f
    }

    pub fn is_tame(&self) -> bool {
        !BigInt::from(self.def.e).is_multiple_of(&self.def.p)
    }

    /// Checks N ≥ n + 4e for use with hyperfield level n.
    pub fn check_level(&self, n: u32) -> Result<()> {
        let need = n + 4 * self.def.e as u32;
        if self.def.prec < need {
            return Err(Error::PrecisionTooSmall { have: self.def.prec, need });
        }
        Ok(())
    }

    pub fn p_pow(&self, k: usize) -> BigInt {
        match self.p_pows.get(k) {
            Some(v) => v.clone(),
            None => num_traits::pow(self.def.p.clone(), k),
        }
    }

    /// Number of p-adic digits carried for an element of precision `prec`, one guard digit included.
    pub(crate) fn digits(&self, prec: u32) -> usize {
        ceil_div(prec as i64, self.def.e as i64) as usize + 1
    }

    pub(crate) fn modulus(&self, prec: u32) -> BigInt {
        self.p_pow(self.digits(prec))
    }

    /// Reduces coefficient (i, j) modulo p^{ceil((prec-i)/e)}, into [0, p^k).
    pub(crate) fn canonical(&self, coeffs: &mut [BigInt], prec: u32) {
        let (e, f) = (self.def.e as i64, self.def.f);
        for (idx, c) in coeffs.iter_mut().enumerate() {
            let i = (idx / f) as i64;
            let k = ceil_div(prec as i64 - i, e);
            if k <= 0 {
                *c = BigInt::zero();
            } else {
                *c = c.mod_floor(&self.p_pow(k as usize));
            }
        }
    }

    /// Product in W modulo m.
    pub(crate) fn w_mul(&self, a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
        let f = self.def.f;
        if f == 1 {
            return vec![(&a[0] * &b[0]).mod_floor(m)];
        }
        let mut prod = vec![BigInt::zero(); 2 * f - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        self.reduce_x(&mut prod, m);
        prod
    }

    /// Reduces a polynomial in x modulo h and m, leaving f coefficients.
    fn reduce_x(&self, prod: &mut Vec<BigInt>, m: &BigInt) {
        let f = self.def.f;
        for d in (f..prod.len()).rev() {
            let c = std::mem::take(&mut prod[d]);
            if c.is_zero() {
                continue;
            }
            for k in 0..f {
                prod[d - f + k] -= &c * &self.def.h[k];
            }
        }
        prod.truncate(f);
        for c in prod.iter_mut() {
            *c = c.mod_floor(m);
        }
    }

    /// Product of two full coefficient vectors modulo m.
    pub(crate) fn raw_mul(&self, a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
        let (e, f) = (self.def.e, self.def.f);
        // prod[i][*]: coefficient of π^i, a polynomial in x of degree < 2f-1.
        let mut prod = vec![vec![BigInt::zero(); 2 * f - 1]; 2 * e - 1];
        for i in 0..e {
            for j in 0..f {
                let x = &a[i * f + j];
                if x.is_zero() {
                    continue;
                }
                for k in 0..e {
                    for l in 0..f {
                        let y = &b[k * f + l];
                        if !y.is_zero() {
                            prod[i + k][j + l] += x * y;
                        }
                    }
                }
            }
        }
        let mut rows: Vec<Vec<BigInt>> = prod
            .into_iter()
            .map(|mut r| {
                self.reduce_x(&mut r, m);
                r
            })
            .collect();
        // π^e = -(a_0 + a_1 π + ... + a_{e-1} π^{e-1}).
        for d in (e..rows.len()).rev() {
            let c = std::mem::replace(&mut rows[d], vec![BigInt::zero(); f]);
            if c.iter().all(Zero::is_zero) {
                continue;
            }
            for k in 0..e {
                let t = self.w_mul(&c, &self.def.eis[k], m);
                for (slot, v) in rows[d - e + k].iter_mut().zip(t) {
                    *slot = (&*slot - v).mod_floor(m);
                }
            }
        }
        rows.truncate(e);
        rows.into_iter().flatten().collect()
    }

    pub(crate) fn raw_add(&self, a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
        a.iter().zip(b).map(|(x, y)| (x + y).mod_floor(m)).collect()
    }

    /// Divides a lift of valuation ≥ 1 by π. Input is taken modulo p^digits,
    /// output is valid modulo p^(digits-1).
    pub(crate) fn raw_div_pi(&self, a: &[BigInt], digits: usize) -> Vec<BigInt> {
        let (e, f) = (self.def.e, self.def.f);
        let m = self.p_pow(digits);
        let m_out = self.p_pow(digits - 1);
        let t = self.raw_mul(a, &self.pi_cofactor, &m);
        let mut out = Vec::with_capacity(e * f);
        for i in 0..e {
            let w: Vec<BigInt> = t[i * f..(i + 1) * f]
                .iter()
                .map(|c| {
                    debug_assert!(c.is_multiple_of(&self.def.p));
                    c / &self.def.p
                })
                .collect();
            out.extend(self.w_mul(&w, &self.a0_unit_inv, &m_out));
        }
        out
    }

    /// Mixed-radix size of O/m^k: the modulus of each coefficient slot.
    pub(crate) fn slot_moduli(&self, k: u32) -> Vec<BigInt> {
        let (e, f) = (self.def.e as i64, self.def.f);
        (0..self.dim())
            .map(|idx| {
                let i = (idx / f) as i64;
                let d = ceil_div(k as i64 - i, e).max(0);
                self.p_pow(d as usize)
            })
            .collect()
    }

    /// The valuation min(e·ν_p(c) + i) of a canonical vector, `None` if all zero.
    pub(crate) fn raw_valuation(&self, coeffs: &[BigInt]) -> Option<u32> {
        let (e, f) = (self.def.e as u32, self.def.f);
        coeffs
            .iter()
            .enumerate()
            .filter_map(|(idx, c)| {
                valuation_p(c, &self.def.p).map(|v| e * v + (idx / f) as u32)
            })
            .min()
    }

    pub fn describe(&self) -> String {
        let d = &self.def;
        let eis: Vec<String> = d
            .eis
            .iter()
            .map(|w| {
                if d.f == 1 {
                    w[0].to_string()
                } else {
                    format!("{w:?}")
                }
            })
            .collect();
        format!(
            "p={} f={} e={} P=[{}] h={:?} N={}",
            d.p,
            d.f,
            d.e,
            eis.join(", "),
            d.h.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            d.prec
        )
    }
}

impl fmt::Display for FieldModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}
