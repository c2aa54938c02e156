//! The n-th valued hyperfield H = K/(1+m^n).
//!
//! A nonzero class is π^γ·u·(1+m^n) with u a canonical unit of O/m^n, stored as
//! (γ, index of u). Sums are closed balls D(c, r) = {x : ν(x − c) ≥ r}; a ball
//! whose center has valuation ≥ r is stored with no center (it is m^r).

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use crate::elem::{enumerate_units, FieldElem};
use crate::error::{Error, Result};
use crate::field::FieldModel;
use crate::kelem::KElem;
use crate::residue::ResElem;

/// Largest unit group (O/m^n)^× a hyperfield is built for.
pub const MAX_UNITS: usize = 1 << 16;
const TABLE_LIMIT: usize = 1 << 22;

/// A class of H: zero, or π^val times the unit with index `unit` at level n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum HfClass {
    Zero,
    NonZero { val: i64, unit: u32 },
}

impl HfClass {
    /// `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        match self {
            HfClass::Zero => None,
            HfClass::NonZero { val, .. } => Some(*val),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, HfClass::Zero)
    }
}

/// Center π^val·u of a ball, u known at level `level` = radius − val, 1 ≤ level ≤ n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BallCenter {
    pub val: i64,
    pub level: u32,
    pub unit: u32,
}

/// A hyperfield sum. `Single` when the ball is one class; otherwise the ball
/// D(center, radius), with no center when it is m^radius (then it contains zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum HfSumBall {
    Single(HfClass),
    Ball {
        center: Option<BallCenter>,
        radius: i64,
        contains_zero: bool,
    },
}

/// Closed ball in canonical form; `radius == None` only for {0}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Disc {
    pub center: Option<BallCenter>,
    pub radius: Option<i64>,
}

impl HfSumBall {
    pub fn contains_zero(&self) -> bool {
        match self {
            HfSumBall::Single(c) => c.is_zero(),
            HfSumBall::Ball { contains_zero, .. } => *contains_zero,
        }
    }

    /// Radius of the ball; `None` for the sum {0}.
    pub fn radius(&self, n: u32) -> Option<i64> {
        match self {
            HfSumBall::Single(HfClass::Zero) => None,
            HfSumBall::Single(HfClass::NonZero { val, .. }) => Some(val + n as i64),
            HfSumBall::Ball { radius, .. } => Some(*radius),
        }
    }
}

/// Units of O/m^j for one level j, with lookup by canonical coefficients.
#[derive(Clone, Debug)]
struct Level {
    units: Vec<FieldElem>,
    index: HashMap<Vec<BigInt>, u32>,
    /// Index at level n of the canonical lift of each unit.
    lift: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct Hyperfield {
    field: Arc<FieldModel>,
    n: u32,
    /// levels[j] for j in 1..=n; levels[0] is an empty placeholder.
    levels: Vec<Level>,
    /// reduce[j][u]: index at level j of the level-n unit u.
    reduce: Vec<Vec<u32>>,
    one: u32,
    neg_one: u32,
    inv: Vec<u32>,
    mul: Option<Vec<u32>>,
    /// add[(k*U + u1)*U + u2] = (Δ, unit at level n−Δ) for u1 + π^k·u2, Δ = n meaning ≥ n.
    add: Option<Vec<(u8, u32)>>,
}

impl Hyperfield {
    pub fn new(field: Arc<FieldModel>, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("hyperfield level must be at least 1".into()));
        }
        field.check_level(n)?;
        let mut levels = vec![Level { units: vec![], index: HashMap::new(), lift: vec![] }];
        for j in 1..=n {
            let units = enumerate_units(&field, j, MAX_UNITS)?;
            let index = units
                .iter()
                .enumerate()
                .map(|(i, u)| (u.coeffs().to_vec(), i as u32))
                .collect();
            levels.push(Level { units, index, lift: vec![] });
        }
        let top = &levels[n as usize];
        let lifts: Vec<Vec<u32>> = (0..=n as usize)
            .map(|j| {
                levels[j]
                    .units
                    .iter()
                    .map(|u| top.index[u.with_prec(n).coeffs()])
                    .collect()
            })
            .collect();
        for (lvl, lift) in levels.iter_mut().zip(lifts) {
            lvl.lift = lift;
        }
        let top = &levels[n as usize];
        let reduce: Vec<Vec<u32>> = (0..=n)
            .map(|j| {
                if j == 0 {
                    return vec![];
                }
                top.units
                    .iter()
                    .map(|u| levels[j as usize].index[u.reduce_mod(j).unwrap().coeffs()])
                    .collect()
            })
            .collect();
        let size = top.units.len();
        let lookup = |a: &FieldElem| top.index[a.reduce_mod(n).unwrap().coeffs()];
        let one = lookup(&FieldElem::one(&field).with_prec(n));
        let neg_one = lookup(&FieldElem::from_int(&field, -1).with_prec(n));
        let inv = top.units.iter().map(|u| lookup(&u.inv_unit().unwrap())).collect();
        let mut hf = Hyperfield { field, n, levels, reduce, one, neg_one, inv, mul: None, add: None };
        if size * size <= TABLE_LIMIT {
            let mut t = Vec::with_capacity(size * size);
            for a in 0..size as u32 {
                for b in 0..size as u32 {
                    t.push(hf.mul_slow(a, b));
                }
            }
            hf.mul = Some(t);
        }
        if (n as usize) * size * size <= TABLE_LIMIT {
            let mut t = Vec::with_capacity(n as usize * size * size);
            for k in 0..n {
                for a in 0..size as u32 {
                    for b in 0..size as u32 {
                        t.push(hf.add_slow(k, a, b));
                    }
                }
            }
            hf.add = Some(t);
        }
        Ok(hf)
    }

    pub fn field(&self) -> &Arc<FieldModel> {
        &self.field
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    /// |(O/m^n)^×|.
    pub fn unit_count(&self) -> usize {
        self.levels[self.n as usize].units.len()
    }

    /// Number of units at level j ≤ n.
    pub fn unit_count_at(&self, j: u32) -> usize {
        self.levels[j as usize].units.len()
    }

    /// Canonical representative of unit `idx` at level j.
    pub fn unit_elem_at(&self, j: u32, idx: u32) -> &FieldElem {
        &self.levels[j as usize].units[idx as usize]
    }

    pub fn unit_elem(&self, idx: u32) -> &FieldElem {
        self.unit_elem_at(self.n, idx)
    }

    /// Index at level j of a unit, from any representative known to precision ≥ j.
    pub fn unit_index_at(&self, j: u32, u: &FieldElem) -> Result<u32> {
        let r = u.reduce_mod(j)?;
        self.levels[j as usize]
            .index
            .get(r.coeffs())
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("{u} is not a unit")))
    }

    pub fn unit_index(&self, u: &FieldElem) -> Result<u32> {
        self.unit_index_at(self.n, u)
    }

    /// Level-j index of the level-n unit u.
    pub fn reduce_unit(&self, j: u32, u: u32) -> u32 {
        if j == self.n {
            u
        } else {
            self.reduce[j as usize][u as usize]
        }
    }

    /// Level-n index of the canonical lift of unit `idx` at level j.
    pub fn lift_unit(&self, j: u32, idx: u32) -> u32 {
        self.levels[j as usize].lift[idx as usize]
    }

    fn unit_size(&self) -> usize {
        self.unit_count()
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let prod = self.unit_elem(a).mul(self.unit_elem(b)).unwrap();
        self.unit_index(&prod).unwrap()
    }

    fn add_slow(&self, k: u32, a: u32, b: u32) -> (u8, u32) {
        let n = self.n;
        let shifted = self.unit_elem(b).mul(&FieldElem::pi_pow(&self.field, k)).unwrap();
        let s = self.unit_elem(a).add(&shifted).unwrap().reduce_mod(n).unwrap();
        match s.valuation() {
            Ok(Some(d)) if d < n => {
                let u = s.div_pi_pow(d).unwrap();
                (d as u8, self.unit_index_at(n - d, &u).unwrap())
            }
            _ => (n as u8, 0),
        }
    }

    pub fn unit_mul(&self, a: u32, b: u32) -> u32 {
        match &self.mul {
            Some(t) => t[a as usize * self.unit_size() + b as usize],
            None => self.mul_slow(a, b),
        }
    }

    pub fn unit_inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    /// (Δ, unit at level n−Δ) for u1 + π^k·u2 with k < n; Δ = n when the sum lies in m^n.
    pub fn unit_add(&self, k: u32, a: u32, b: u32) -> (u32, u32) {
        debug_assert!(k < self.n);
        let (d, u) = match &self.add {
            Some(t) => {
                let s = self.unit_size();
                t[(k as usize * s + a as usize) * s + b as usize]
            }
            None => self.add_slow(k, a, b),
        };
        (d as u32, u)
    }

    pub fn one(&self) -> HfClass {
        HfClass::NonZero { val: 0, unit: self.one }
    }

    pub fn zero(&self) -> HfClass {
        HfClass::Zero
    }

    /// Index of the unit 1 at level n.
    pub fn one_index(&self) -> u32 {
        self.one
    }

    pub fn pi_class(&self) -> HfClass {
        HfClass::NonZero { val: 1, unit: self.one }
    }

    /// [p]_n.
    pub fn p_class(&self) -> HfClass {
        self.class_of(&FieldElem::from_int(&self.field, self.field.p().clone()))
            .expect("N exceeds e + n")
    }

    /// [a]_n for a in O_K.
    pub fn class_of(&self, a: &FieldElem) -> Result<HfClass> {
        let v = match a.valuation() {
            Ok(None) => return Ok(HfClass::Zero),
            Ok(Some(v)) => v,
            Err(_) => {
                return Err(Error::PrecisionExhausted(
                    "element is zero at its precision".into(),
                ))
            }
        };
        if a.prec() < v + self.n {
            return Err(Error::PrecisionExhausted(format!(
                "class at level {} needs precision {} but element has {}",
                self.n,
                v + self.n,
                a.prec()
            )));
        }
        let unit = self.unit_index(&a.div_pi_pow(v)?)?;
        Ok(HfClass::NonZero { val: v as i64, unit })
    }

    /// [a]_n for a in K.
    pub fn class_of_k(&self, a: &KElem) -> Result<HfClass> {
        match a.valuation() {
            Ok(None) => Ok(HfClass::Zero),
            Ok(Some(v)) => {
                let u = a.unit().expect("nonzero");
                if u.prec() < self.n {
                    return Err(Error::PrecisionExhausted(format!(
                        "class at level {} needs relative precision {}",
                        self.n, self.n
                    )));
                }
                Ok(HfClass::NonZero { val: v, unit: self.unit_index(u)? })
            }
            Err(_) => Err(Error::PrecisionExhausted("element is zero at its precision".into())),
        }
    }

    pub fn class_from_int(&self, n: i64) -> HfClass {
        self.class_of(&FieldElem::from_int(&self.field, n)).expect("integer class")
    }

    /// π^γ·u with the canonical unit, as an element of K.
    pub fn representative(&self, a: &HfClass) -> KElem {
        match a {
            HfClass::Zero => KElem::zero(&self.field),
            HfClass::NonZero { val, unit } => {
                KElem::from_parts(*val, self.unit_elem(*unit).with_prec(self.field.prec()))
                    .expect("canonical unit")
            }
        }
    }

    pub fn mul(&self, a: &HfClass, b: &HfClass) -> HfClass {
        match (a, b) {
            (HfClass::NonZero { val: v1, unit: u1 }, HfClass::NonZero { val: v2, unit: u2 }) => {
                HfClass::NonZero { val: v1 + v2, unit: self.unit_mul(*u1, *u2) }
            }
            _ => HfClass::Zero,
        }
    }

    pub fn inv(&self, a: &HfClass) -> Result<HfClass> {
        match a {
            HfClass::Zero => Err(Error::DivisionByZero),
            HfClass::NonZero { val, unit } => {
                Ok(HfClass::NonZero { val: -val, unit: self.unit_inv(*unit) })
            }
        }
    }

    pub fn neg(&self, a: &HfClass) -> HfClass {
        match a {
            HfClass::Zero => HfClass::Zero,
            HfClass::NonZero { val, unit } => {
                HfClass::NonZero { val: *val, unit: self.unit_mul(*unit, self.neg_one) }
            }
        }
    }

    pub fn pow(&self, a: &HfClass, k: u32) -> HfClass {
        let mut out = self.one();
        for _ in 0..k {
            out = self.mul(&out, a);
        }
        out
    }

    /// The ball consisting of one class.
    pub fn disc_of(&self, a: &HfClass) -> Disc {
        match a {
            HfClass::Zero => Disc { center: None, radius: None },
            HfClass::NonZero { val, unit } => Disc {
                center: Some(BallCenter { val: *val, level: self.n, unit: *unit }),
                radius: Some(val + self.n as i64),
            },
        }
    }

    /// Shrinks a center to radius r ≤ its own radius.
    fn truncate(&self, c: BallCenter, r: i64) -> Disc {
        if c.val >= r {
            return Disc { center: None, radius: Some(r) };
        }
        let level = (r - c.val) as u32;
        debug_assert!(level <= c.level);
        let unit = self.reduce_unit(level, self.lift_unit(c.level, c.unit));
        Disc { center: Some(BallCenter { val: c.val, level, unit }), radius: Some(r) }
    }

    /// Minkowski sum D(c1, r1) + D(c2, r2) = D(c1 + c2, min(r1, r2)).
    pub fn disc_add(&self, a: &Disc, b: &Disc) -> Disc {
        let r = match (a.radius, b.radius) {
            (None, None) => return Disc { center: None, radius: None },
            (Some(x), None) | (None, Some(x)) => x,
            (Some(x), Some(y)) => x.min(y),
        };
        match (a.center, b.center) {
            (None, None) => Disc { center: None, radius: Some(r) },
            (Some(c), None) | (None, Some(c)) => self.truncate(c, r),
            (Some(c1), Some(c2)) => {
                let (c1, c2) = if c1.val <= c2.val { (c1, c2) } else { (c2, c1) };
                let w = c1.val;
                let level = (r - w) as u32;
                debug_assert!(level >= 1 && level <= self.n);
                let u1 = self.lift_unit(c1.level, c1.unit);
                let k = (c2.val - w) as u32;
                if k >= level {
                    return Disc {
                        center: Some(BallCenter { val: w, level, unit: self.reduce_unit(level, u1) }),
                        radius: Some(r),
                    };
                }
                let u2 = self.lift_unit(c2.level, c2.unit);
                let (d, s) = self.unit_add(k, u1, u2);
                if d >= level {
                    return Disc { center: None, radius: Some(r) };
                }
                let from = self.n - d;
                let to = level - d;
                let unit = self.reduce_unit(to, self.lift_unit(from, s));
                Disc {
                    center: Some(BallCenter { val: w + d as i64, level: to, unit }),
                    radius: Some(r),
                }
            }
        }
    }

    /// γ·D(c, r) = D(γc, r + ν(γ)).
    pub fn disc_scale(&self, a: &Disc, g: &HfClass) -> Disc {
        let (gv, gu) = match g {
            HfClass::Zero => return Disc { center: None, radius: None },
            HfClass::NonZero { val, unit } => (*val, *unit),
        };
        let radius = a.radius.map(|r| r + gv);
        let center = a.center.map(|c| {
            let prod = self.unit_mul(self.lift_unit(c.level, c.unit), gu);
            BallCenter { val: c.val + gv, level: c.level, unit: self.reduce_unit(c.level, prod) }
        });
        Disc { center, radius }
    }

    pub fn disc_contains(&self, d: &Disc, x: &HfClass) -> bool {
        match (d.center, x) {
            (None, HfClass::Zero) => true,
            (None, HfClass::NonZero { val, .. }) => d.radius.is_some_and(|r| *val >= r),
            (Some(_), HfClass::Zero) => false,
            (Some(c), HfClass::NonZero { val, unit }) => {
                *val == c.val && self.reduce_unit(c.level, *unit) == c.unit
            }
        }
    }

    /// Whether a ⊆ b.
    pub fn disc_subset(&self, a: &Disc, b: &Disc) -> bool {
        match (a.radius, b.radius) {
            (_, None) => a.radius.is_none(),
            (None, Some(_)) => b.center.is_none(),
            (Some(ra), Some(rb)) => {
                if ra < rb {
                    return false;
                }
                match (a.center, b.center) {
                    (_, None) => match a.center {
                        None => true,
                        Some(c) => c.val >= rb,
                    },
                    (None, Some(_)) => false,
                    (Some(ca), Some(cb)) => {
                        ca.val == cb.val
                            && self.reduce_unit(cb.level, self.lift_unit(ca.level, ca.unit)) == cb.unit
                    }
                }
            }
        }
    }

    pub fn disc_to_ball(&self, d: &Disc) -> HfSumBall {
        match (d.center, d.radius) {
            (None, None) => HfSumBall::Single(HfClass::Zero),
            (Some(c), _) if c.level == self.n => {
                HfSumBall::Single(HfClass::NonZero { val: c.val, unit: c.unit })
            }
            (center, Some(radius)) => HfSumBall::Ball {
                center,
                radius,
                contains_zero: center.is_none(),
            },
            (Some(_), None) => unreachable!("a ball with a center has finite radius"),
        }
    }

    pub fn ball_to_disc(&self, s: &HfSumBall) -> Disc {
        match s {
            HfSumBall::Single(c) => self.disc_of(c),
            HfSumBall::Ball { center, radius, .. } => Disc { center: *center, radius: Some(*radius) },
        }
    }

    /// α + β as a ball.
    pub fn multiadd(&self, a: &HfClass, b: &HfClass) -> HfSumBall {
        self.disc_to_ball(&self.disc_add(&self.disc_of(a), &self.disc_of(b)))
    }

    /// Left fold of multiadd over a list; the empty sum is {0}.
    pub fn multi_sum(&self, xs: &[HfClass]) -> HfSumBall {
        let d = xs.iter().fold(Disc { center: None, radius: None }, |acc, x| {
            self.disc_add(&acc, &self.disc_of(x))
        });
        self.disc_to_ball(&d)
    }

    /// S + γ for a sum S and a class γ.
    pub fn ball_add(&self, s: &HfSumBall, g: &HfClass) -> HfSumBall {
        self.disc_to_ball(&self.disc_add(&self.ball_to_disc(s), &self.disc_of(g)))
    }

    pub fn sum_contains(&self, s: &HfSumBall, x: &HfClass) -> bool {
        self.disc_contains(&self.ball_to_disc(s), x)
    }

    /// Members of S with valuation ≤ cutoff, plus Zero when S contains zero.
    pub fn sum_members(&self, s: &HfSumBall, cutoff: i64) -> Result<Vec<HfClass>> {
        let d = self.ball_to_disc(s);
        if let Some(r) = d.radius {
            if cutoff < r {
                return Err(Error::InvalidInput(format!(
                    "cutoff {cutoff} is below the radius {r}"
                )));
            }
        }
        let mut out = Vec::new();
        match (d.center, d.radius) {
            (None, None) => out.push(HfClass::Zero),
            (None, Some(r)) => {
                out.push(HfClass::Zero);
                for val in r..=cutoff {
                    for unit in 0..self.unit_count() as u32 {
                        out.push(HfClass::NonZero { val, unit });
                    }
                }
            }
            (Some(c), _) => {
                for unit in 0..self.unit_count() as u32 {
                    if self.reduce_unit(c.level, unit) == c.unit {
                        out.push(HfClass::NonZero { val: c.val, unit });
                    }
                }
            }
        }
        Ok(out)
    }

    /// {0} together with every class of valuation in [−v, v].
    pub fn window(&self, v: i64) -> Vec<HfClass> {
        let mut out = vec![HfClass::Zero];
        for val in -v..=v {
            for unit in 0..self.unit_count() as u32 {
                out.push(HfClass::NonZero { val, unit });
            }
        }
        out
    }

    /// H(S): zero and the valuation-0 classes.
    pub fn units_part(&self) -> Vec<HfClass> {
        let mut out = vec![HfClass::Zero];
        out.extend((0..self.unit_count() as u32).map(|unit| HfClass::NonZero { val: 0, unit }));
        out
    }

    /// The map [x]_1 ↦ res(x) on H(S) at level 1, verified to be a field isomorphism.
    pub fn residue_iso_level1(&self) -> Result<Vec<(HfClass, ResElem)>> {
        if self.n != 1 {
            return Err(Error::InvalidInput("residue isomorphism needs level 1".into()));
        }
        let k = self.field.residue_field();
        let table: Vec<(HfClass, ResElem)> = self
            .units_part()
            .into_iter()
            .map(|c| {
                let r = match c {
                    HfClass::Zero => k.zero(),
                    HfClass::NonZero { unit, .. } => self.unit_elem(unit).residue().unwrap(),
                };
                (c, r)
            })
            .collect();
        let back: HashMap<ResElem, HfClass> = table.iter().map(|(c, r)| (r.clone(), *c)).collect();
        let q = k.order();
        if back.len() != table.len() || BigInt::from(table.len()) != q {
            return Err(Error::AxiomViolation {
                axiom: "residue-iso/bijective".into(),
                witness: format!("{} classes for a field of size {q}", table.len()),
            });
        }
        let fail = |axiom: &str, a: &HfClass, b: &HfClass| Error::AxiomViolation {
            axiom: axiom.into(),
            witness: format!("({}, {})", self.render_class(a), self.render_class(b)),
        };
        for (a, ra) in &table {
            for (b, rb) in &table {
                if back[&k.mul(ra, rb)] != self.mul(a, b) {
                    return Err(fail("residue-iso/mul", a, b));
                }
                let s = self.multiadd(a, b);
                let members: Vec<HfClass> = self
                    .sum_members(&s, s.radius(self.n).unwrap_or(0).max(0))?
                    .into_iter()
                    .filter(|c| c.valuation().is_none_or(|v| v == 0))
                    .collect();
                if members != vec![back[&k.add(ra, rb)]] {
                    return Err(fail("residue-iso/add", a, b));
                }
            }
        }
        Ok(table)
    }

    pub fn render_unit_at(&self, level: u32, idx: u32) -> String {
        self.unit_elem_at(level, idx).render()
    }

    pub fn render_class(&self, a: &HfClass) -> String {
        match a {
            HfClass::Zero => "0".into(),
            HfClass::NonZero { val, unit } => {
                format!("pi^{val} * ({})", self.unit_elem(*unit).render())
            }
        }
    }

    pub fn render_ball(&self, s: &HfSumBall) -> String {
        match s {
            HfSumBall::Single(c) => self.render_class(c),
            HfSumBall::Ball { center, radius, contains_zero } => {
                let c = match center {
                    None => "0".to_string(),
                    Some(c) => format!("pi^{} * ({})", c.val, self.render_unit_at(c.level, c.unit)),
                };
                format!("Ball(center={c}, radius={radius}, zero={contains_zero})")
            }
        }
    }
}

impl fmt::Display for Hyperfield {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H_{} of {}", self.n, self.field)
    }
}
