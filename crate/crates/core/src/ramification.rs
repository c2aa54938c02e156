//! Ramification invariants: d(e), the Krasner radius M of a uniformizer, the
//! hyperfield level needed for lifting, and Krasner root refinement.
//!
//! Valuations are π-normalized (ν(π) = 1) except where a name ends in `_p1`,
//! which means ν(p) = 1.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith::valuation_p_u64;
use crate::elem::FieldElem;
use crate::error::{Error, Result};
use crate::field::FieldModel;
use crate::poly::Poly;

pub type Rational = Ratio<i64>;

fn ser_ratio<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// d(e) = e·(1 + ν_p(e)).
pub fn d_of(e: u64, p: u64) -> u64 {
    assert!(e >= 1, "e must be positive");
    e * (1 + valuation_p_u64(e, p) as u64)
}

/// The Eisenstein polynomial P of the field, over W.
pub fn eisenstein_poly(field: &Arc<FieldModel>) -> Poly {
    Poly::new(field.eisenstein().iter().map(|w| FieldElem::from_w(field, w)).collect())
}

/// Lower convex hull of the points (k, ν_k); missing points are ∞.
pub fn newton_polygon(points: &[(usize, i64)]) -> Vec<(usize, i64)> {
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &pt in points {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // Drop the middle point when it lies on or above the chord.
            let cross = (x2 as i64 - x1 as i64) * (pt.1 - y1) - (y2 - y1) * (pt.0 as i64 - x1 as i64);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull
}

/// Root valuations with multiplicities, largest first, read off the hull.
pub fn root_valuations(hull: &[(usize, i64)]) -> Vec<(Rational, usize)> {
    hull.windows(2)
        .map(|w| {
            let len = (w[1].0 - w[0].0) as i64;
            (Rational::new(w[0].1 - w[1].1, len), len as usize)
        })
        .collect()
}

fn exact_valuation(a: &FieldElem) -> Result<Option<i64>> {
    Ok(a.valuation()?.map(i64::from))
}

/// Newton polygon of Q(X) = P(X + root)/X, whose roots are the differences
/// root' − root over the other roots of P.
pub fn difference_polygon(p: &Poly, root: &FieldElem) -> Result<Vec<(usize, i64)>> {
    let shifted = p.shift(root)?;
    let q = &shifted.coeffs[1..];
    let v0 = match exact_valuation(&q[0]) {
        Ok(Some(v)) => v,
        _ => {
            return Err(Error::PrecisionExhausted(
                "constant coefficient of P(X+π)/X vanishes at working precision".into(),
            ))
        }
    };
    let mut points = vec![(0, v0)];
    for (k, c) in q.iter().enumerate().skip(1) {
        match exact_valuation(c) {
            Ok(Some(v)) => points.push((k, v)),
            Ok(None) => {}
            // Every hull value is at most v0, so a coefficient known to vanish
            // beyond v0 cannot touch the polygon.
            Err(_) if c.prec() as i64 >= v0 => {}
            Err(_) => {
                return Err(Error::PrecisionExhausted(format!(
                    "coefficient of X^{k} in P(X+π)/X vanishes at precision {}",
                    c.prec()
                )))
            }
        }
    }
    Ok(newton_polygon(&points))
}

/// max ν(root' − root) over the other roots of P, π-normalized.
pub fn max_difference(p: &Poly, root: &FieldElem) -> Result<Rational> {
    let hull = difference_polygon(p, root)?;
    Ok(root_valuations(&hull).first().map(|r| r.0).unwrap_or_else(Rational::zero))
}

/// M of the defining uniformizer in the ν(p) = 1 normalization; 0 when e = 1.
pub fn m_nu(field: &Arc<FieldModel>) -> Result<Rational> {
    let e = field.e() as i64;
    if e == 1 {
        return Ok(Rational::zero());
    }
    Ok(max_difference(&eisenstein_poly(field), &FieldElem::pi(field))? / e)
}

/// M recomputed for another uniformizer π0, through its characteristic
/// polynomial over W.
pub fn m_nu_for_uniformizer(field: &Arc<FieldModel>, pi0: &FieldElem) -> Result<Rational> {
    let e = field.e() as i64;
    if pi0.valuation()? != Some(1) {
        return Err(Error::InvalidInput("not a uniformizer".into()));
    }
    if e == 1 {
        return Ok(Rational::zero());
    }
    let p0 = charpoly_over_w(pi0)?;
    Ok(max_difference(&p0, pi0)? / e)
}

/// W-coordinate of a in the basis 1, π, …, π^{e−1}.
fn w_coordinate(a: &FieldElem, i: usize, prec: u32) -> FieldElem {
    let field = a.field();
    let f = field.f();
    FieldElem::from_w(field, &a.coeffs()[i * f..(i + 1) * f]).with_prec(prec)
}

/// Characteristic polynomial of multiplication by a on O_K over W, computed
/// division-free (Berkowitz).
pub fn charpoly_over_w(a: &FieldElem) -> Result<Poly> {
    let field = a.field().clone();
    let e = field.e();
    let prec = field.prec().saturating_sub(e as u32);
    let mut cols = Vec::with_capacity(e);
    let mut basis = FieldElem::one(&field);
    for _ in 0..e {
        cols.push(a.mul(&basis)?);
        basis = basis.mul(&FieldElem::pi(&field))?;
    }
    let m: Vec<Vec<FieldElem>> =
        (0..e).map(|i| (0..e).map(|j| w_coordinate(&cols[j], i, prec)).collect()).collect();
    let top_first = berkowitz(&field, &m)?;
    Ok(Poly::new(top_first.into_iter().rev().collect()))
}

/// Coefficients of det(X·I − M), highest degree first.
fn berkowitz(field: &Arc<FieldModel>, m: &[Vec<FieldElem>]) -> Result<Vec<FieldElem>> {
    let zero = FieldElem::zero(field);
    let one = FieldElem::one(field);
    let n = m.len();
    let mut transforms: Vec<Vec<Vec<FieldElem>>> = Vec::new();
    let mut size = n;
    while size > 1 {
        let k = size - 1;
        let r: Vec<FieldElem> = (0..k).map(|j| m[k][j].neg()).collect();
        let c: Vec<FieldElem> = (0..k).map(|i| m[i][k].clone()).collect();
        let a = m[k][k].neg();
        let mut items = vec![one.clone(), a];
        let mut vec_b = c;
        for step in 0..k {
            let mut dot = zero.clone();
            for (x, y) in r.iter().zip(&vec_b) {
                dot = dot.add(&x.mul(y)?)?;
            }
            items.push(dot);
            if step + 1 < k {
                let mut next = Vec::with_capacity(k);
                for row in m.iter().take(k) {
                    let mut acc = zero.clone();
                    for (x, y) in row.iter().take(k).zip(&vec_b) {
                        acc = acc.add(&x.mul(y)?)?;
                    }
                    next.push(acc);
                }
                vec_b = next;
            }
        }
        let mut t = vec![vec![zero.clone(); size]; size + 1];
        for col in 0..size {
            for (row, item) in items.iter().take(size - col + 1).enumerate() {
                t[col + row][col] = item.clone();
            }
        }
        transforms.push(t);
        size -= 1;
    }
    let mut poly = vec![one.clone(), m[0][0].neg()];
    for t in transforms.iter().rev() {
        let mut next = Vec::with_capacity(t.len());
        for row in t {
            let mut acc = zero.clone();
            for (x, y) in row.iter().zip(&poly) {
                acc = acc.add(&x.mul(y)?)?;
            }
            next.push(acc);
        }
        poly = next;
    }
    Ok(poly)
}

/// M from explicit conjugates, where they are available in closed form:
/// e = 2 (the conjugate of π is −a₁ − π) and binomial P = X^e + a₀ (the
/// conjugates are ζπ, with ν_p(1 − ζ) = 1/φ(p^k) for ζ of order p^k and 0
/// for orders that are not prime powers). `None` otherwise.
pub fn conjugate_difference_m(field: &Arc<FieldModel>) -> Result<Option<Rational>> {
    let e = field.e();
    let ei = e as i64;
    if e == 1 {
        return Ok(Some(Rational::zero()));
    }
    let eis = field.eisenstein();
    if e == 2 {
        let pi = FieldElem::pi(field);
        let diff = pi.mul_int(2).add(&FieldElem::from_w(field, &eis[1]))?;
        let v = diff.valuation()?.ok_or_else(|| Error::InvalidInput("repeated root".into()))?;
        return Ok(Some(Rational::new(v as i64, ei)));
    }
    let binomial = eis[1..e].iter().all(|w| w.iter().all(Zero::is_zero));
    if !binomial {
        return Ok(None);
    }
    let p = field.p().to_i64().ok_or_else(|| Error::InvalidInput("p too large".into()))?;
    let mut best = Rational::zero();
    for d in 2..=ei {
        if ei % d != 0 {
            continue;
        }
        let mut k = 0u32;
        let mut rest = d;
        while rest % p == 0 {
            rest /= p;
            k += 1;
        }
        if rest == 1 {
            best = best.max(Rational::new(1, p.pow(k - 1) * (p - 1)));
        }
    }
    Ok(Some(Rational::new(1, ei) + best))
}

#[derive(Clone, Debug, Serialize)]
pub struct RamificationReport {
    pub p: String,
    pub e: u64,
    pub d_e: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub m_p1: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub m_int: Rational,
    pub n_min_conservative: u64,
    pub n_min_paper: u64,
    pub tame: bool,
    /// M_p1 ≤ d(e)/e.
    pub within_de_over_e: bool,
    /// M_p1 ≤ d(e)/e²; raised as a flag when false.
    pub within_de_over_e2: bool,
    pub flagged: bool,
    /// Hull of P(X+π)/X, π-normalized; empty when e = 1.
    pub newton_vertices: Vec<(usize, i64)>,
}

fn floor_plus_one(r: Rational) -> u64 {
    (r.floor().to_integer() + 1) as u64
}

/// Thresholds for the hyperfield level: 1 when tame, otherwise
/// floor(e²·M)+1 under both normalizations of M.
pub fn n_threshold(field: &Arc<FieldModel>) -> Result<RamificationReport> {
    let e = field.e() as u64;
    let p = field.p().to_u64().ok_or_else(|| Error::InvalidInput("p too large".into()))?;
    let tame = field.is_tame();
    let d_e = d_of(e, p);
    let (m_p1, vertices) = if e == 1 {
        (Rational::zero(), Vec::new())
    } else {
        let hull = difference_polygon(&eisenstein_poly(field), &FieldElem::pi(field))?;
        let top = root_valuations(&hull).first().map(|r| r.0).unwrap_or_else(Rational::zero);
        (top / e as i64, hull)
    };
    let ei = e as i64;
    let m_int = m_p1 * ei;
    let (n_paper, n_cons) = if tame {
        (1, 1)
    } else {
        (floor_plus_one(m_p1 * (ei * ei)), floor_plus_one(m_int * (ei * ei)))
    };
    let within_e = m_p1 <= Rational::new(d_e as i64, ei);
    let within_e2 = m_p1 <= Rational::new(d_e as i64, ei * ei);
    Ok(RamificationReport {
        p: field.p().to_string(),
        e,
        d_e,
        m_p1,
        m_int,
        n_min_conservative: n_cons,
        n_min_paper: n_paper,
        tame,
        within_de_over_e: within_e,
        within_de_over_e2: within_e2,
        flagged: !within_e2,
        newton_vertices: vertices,
    })
}

/// Outcome of [`krasner_refine`].
#[derive(Clone, Debug)]
pub struct Refinement {
    pub root: FieldElem,
    pub newton_steps: u32,
    pub digit_steps: u32,
}

fn val_or_inf(a: &FieldElem) -> Option<i64> {
    a.valuation().ok().flatten().map(i64::from)
}

/// Improves x by one π-adic digit when some digit raises ν(P(x)).
fn digit_search(p: &Poly, x: &FieldElem, current: i64) -> Result<Option<FieldElem>> {
    let field = x.field().clone();
    let residues = field
        .residue_field()
        .elements()
        .ok_or_else(|| Error::BudgetExceeded("residue field too large for digit search".into()))?;
    for k in 1..field.prec() {
        let shift = FieldElem::pi_pow(&field, k);
        let mut best: Option<(i64, FieldElem)> = None;
        for r in &residues {
            let cand = x.add(&FieldElem::lift_residue(&field, r).mul(&shift)?)?;
            let v = val_or_inf(&p.eval(&cand)?).unwrap_or(i64::MAX);
            if v > current && best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                best = Some((v, cand));
            }
        }
        if let Some((_, cand)) = best {
            return Ok(Some(cand));
        }
    }
    Ok(None)
}

/// The root c of P closest to b, given ν_p1(P(b)) > d(deg P)/deg P.
///
/// Newton iteration once ν(P(x)) > 2ν(P'(x)); before that, single-digit
/// corrections that raise ν(P(x)). Postcondition: P(c) ≡ 0 mod m^N.
pub fn krasner_refine(p: &Poly, b: &FieldElem) -> Result<Refinement> {
    let field = b.field().clone();
    let top = field.prec();
    let ek = field.e() as i64;
    let deg = p.degree() as u64;
    let prime = field.p().to_u64().ok_or_else(|| Error::InvalidInput("p too large".into()))?;
    let d = d_of(deg, prime) as i64;
    let mut x = b.with_prec(top);
    let pb = p.eval(&x)?;
    if let Some(v) = val_or_inf(&pb) {
        // ν_p1(P(b)) = v/e_K must exceed d/deg.
        if v * deg as i64 <= d * ek {
            return Err(Error::NoRootFound(format!(
                "ν(P(b)) = {v}/{ek} does not exceed d({deg})/{deg} = {d}/{deg}"
            )));
        }
    } else {
        return Ok(Refinement { root: x, newton_steps: 0, digit_steps: 0 });
    }
    let dp = p.derivative();
    let (mut newton_steps, mut digit_steps) = (0, 0);
    let budget = 4 * top + 16;
    for _ in 0..budget {
        let px = p.eval(&x)?;
        let vp = match val_or_inf(&px) {
            None => return Ok(Refinement { root: x, newton_steps, digit_steps }),
            Some(v) => v,
        };
        let vd = val_or_inf(&dp.eval(&x)?);
        match vd {
            Some(vd) if vp > 2 * vd => {
                let step = px.div(&dp.eval(&x)?)?;
                x = x.sub(&step)?.with_prec(top);
                newton_steps += 1;
            }
            _ => match digit_search(p, &x, vp)? {
                Some(next) => {
                    x = next.with_prec(top);
                    digit_steps += 1;
                }
                None => {
                    return Err(Error::NoRootFound(format!(
                        "no digit raises ν(P(x)) beyond {vp}"
                    )))
                }
            },
        }
    }
    Err(Error::PrecisionExhausted("refinement did not converge".into()))
}

/// P given by integer coefficients, lowest degree first.
pub fn poly_from_ints(field: &Arc<FieldModel>, coeffs: &[BigInt]) -> Poly {
    Poly::new(coeffs.iter().map(|c| FieldElem::from_int(field, c.clone())).collect())
}
