//! Homomorphisms of valued hyperfields over p: finite presentation,
//! verification, exhaustive search, and lifting to field embeddings.
//!
//! The multiplicative group of K/(1+m^n) is ⟨π⟩ × (O/m^n)^×, so a
//! multiplicative map is fixed by the image of π and of independent
//! generators of the unit group.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::elem::FieldElem;
use crate::error::{Error, Result};
use crate::field::{FieldDef, FieldModel};
use crate::hyperfield::{HfClass, HfSumBall, Hyperfield};
use crate::kelem::KElem;
use crate::poly::{hensel_root, Poly};
use crate::ramification::{krasner_refine, n_threshold};

/// Default cap on |(O/m^n)^×| for presentations and searches.
pub const DEFAULT_UNIT_CAP: usize = 1 << 13;

/// (O/m^n)^× as a direct product of cyclic groups.
#[derive(Clone, Debug)]
pub struct UnitGroup {
    /// Generators as unit indices at level n.
    pub gens: Vec<u32>,
    pub orders: Vec<u32>,
    /// dlog[u][i]: exponent of gens[i] in u.
    dlog: Vec<Vec<u32>>,
}

fn unit_pow(h: &Hyperfield, u: u32, k: u64) -> u32 {
    let (mut out, mut base, mut k) = (h.one_index(), u, k);
    while k > 0 {
        if k & 1 == 1 {
            out = h.unit_mul(out, base);
        }
        base = h.unit_mul(base, base);
        k >>= 1;
    }
    out
}

/// Independent generators by greedy choice: at each step the element whose
/// image in G/H has the largest order o, among those with x^o = 1; H ⊕ ⟨x⟩ is
/// then again a direct summand. Ties go to the smallest index.
pub fn unit_group_gens(h: &Hyperfield, cap: usize) -> Result<UnitGroup> {
    let size = h.unit_count();
    if size > cap {
        return Err(Error::BudgetExceeded(format!("unit group of order {size} exceeds cap {cap}")));
    }
    let one = h.one_index();
    let mut in_h = vec![false; size];
    in_h[one as usize] = true;
    let mut members = vec![one];
    let mut gens = Vec::new();
    let mut orders = Vec::new();
    while members.len() < size {
        let quotient = (size / members.len()) as u64;
        let divisors: Vec<u64> = (1..=quotient).filter(|d| quotient % d == 0).collect();
        let mut best: Option<(u32, u64)> = None;
        for x in 0..size as u32 {
            if in_h[x as usize] {
                continue;
            }
            let o = *divisors
                .iter()
                .find(|d| in_h[unit_pow(h, x, **d) as usize])
                .expect("the quotient order annihilates G/H");
            if unit_pow(h, x, o) != one || best.is_some_and(|(_, bo)| bo >= o) {
                continue;
            }
            best = Some((x, o));
        }
        let (g, o) = best.expect("a complement element always exists");
        let o = o as u32;
        let mut next = Vec::with_capacity(members.len() * o as usize);
        let mut power = one;
        for _ in 0..o {
            for m in &members {
                next.push(h.unit_mul(*m, power));
            }
            power = h.unit_mul(power, g);
        }
        for m in &next {
            in_h[*m as usize] = true;
        }
        members = next;
        gens.push(g);
        orders.push(o);
    }
    let mut dlog = vec![Vec::new(); size];
    let mut exps = vec![0u32; gens.len()];
    loop {
        let u = gens
            .iter()
            .zip(&exps)
            .fold(one, |acc, (g, k)| h.unit_mul(acc, unit_pow(h, *g, *k as u64)));
        dlog[u as usize] = exps.clone();
        let mut i = 0;
        while i < exps.len() {
            exps[i] += 1;
            if exps[i] < orders[i] {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
        if i == exps.len() {
            break;
        }
    }
    Ok(UnitGroup { gens, orders, dlog })
}

impl UnitGroup {
    pub fn order(&self) -> usize {
        self.dlog.len()
    }

    pub fn dlog(&self, unit: u32) -> &[u32] {
        &self.dlog[unit as usize]
    }
}

/// A hyperfield of level n together with a presentation of its unit group.
#[derive(Clone, Debug)]
pub struct Presented {
    pub h: Arc<Hyperfield>,
    pub group: UnitGroup,
}

impl Presented {
    pub fn new(h: Arc<Hyperfield>, cap: usize) -> Result<Self> {
        let group = unit_group_gens(&h, cap)?;
        Ok(Presented { h, group })
    }

    pub fn from_field(field: Arc<FieldModel>, n: u32, cap: usize) -> Result<Self> {
        Self::new(Arc::new(Hyperfield::new(field, n)?), cap)
    }

    pub fn field(&self) -> &Arc<FieldModel> {
        self.h.field()
    }

    pub fn level(&self) -> u32 {
        self.h.level()
    }
}

/// Target side of a homomorphism check.
pub trait ValuedHyperfield {
    type Elem: Copy + Eq + Ord + Hash + Debug + Send + Sync;
    type Sum;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    /// `None` for zero.
    fn valuation(&self, a: &Self::Elem) -> Option<i64>;
    fn sum(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Sum;
    fn sum_contains(&self, s: &Self::Sum, x: &Self::Elem) -> bool;
    /// [p], when the structure has one.
    fn p_class(&self) -> Option<Self::Elem>;
    fn render(&self, a: &Self::Elem) -> String;

    fn pow(&self, a: &Self::Elem, k: i64) -> Result<Self::Elem> {
        let mut base = if k < 0 { self.inv(a)? } else { *a };
        let mut out = self.one();
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                out = self.mul(&out, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        Ok(out)
    }
}

impl ValuedHyperfield for Hyperfield {
    type Elem = HfClass;
    type Sum = HfSumBall;

    fn zero(&self) -> HfClass {
        HfClass::Zero
    }
    fn one(&self) -> HfClass {
        Hyperfield::one(self)
    }
    fn mul(&self, a: &HfClass, b: &HfClass) -> HfClass {
        Hyperfield::mul(self, a, b)
    }
    fn inv(&self, a: &HfClass) -> Result<HfClass> {
        Hyperfield::inv(self, a)
    }
    fn valuation(&self, a: &HfClass) -> Option<i64> {
        a.valuation()
    }
    fn sum(&self, a: &HfClass, b: &HfClass) -> HfSumBall {
        self.multiadd(a, b)
    }
    fn sum_contains(&self, s: &HfSumBall, x: &HfClass) -> bool {
        Hyperfield::sum_contains(self, s, x)
    }
    fn p_class(&self) -> Option<HfClass> {
        Some(Hyperfield::p_class(self))
    }
    fn render(&self, a: &HfClass) -> String {
        self.render_class(a)
    }
    fn pow(&self, a: &HfClass, k: i64) -> Result<HfClass> {
        match a {
            HfClass::Zero if k > 0 => Ok(HfClass::Zero),
            HfClass::Zero if k == 0 => Ok(Hyperfield::one(self)),
            HfClass::Zero => Err(Error::DivisionByZero),
            HfClass::NonZero { val, unit } => {
                let u = if k < 0 { self.unit_inv(*unit) } else { *unit };
                Ok(HfClass::NonZero { val: val * k, unit: unit_pow(self, u, k.unsigned_abs()) })
            }
        }
    }
}

/// The Krasner hyperfield {0, 1} with 1 + 1 = {0, 1} and trivial valuation.
#[derive(Clone, Copy, Debug, Default)]
pub struct KrasnerF2;

impl ValuedHyperfield for KrasnerF2 {
    type Elem = bool;
    type Sum = (bool, bool);

    fn zero(&self) -> bool {
        false
    }
    fn one(&self) -> bool {
        true
    }
    fn mul(&self, a: &bool, b: &bool) -> bool {
        *a && *b
    }
    fn inv(&self, a: &bool) -> Result<bool> {
        if *a {
            Ok(true)
        } else {
            Err(Error::DivisionByZero)
        }
    }
    fn valuation(&self, a: &bool) -> Option<i64> {
        a.then_some(0)
    }
    fn sum(&self, a: &bool, b: &bool) -> (bool, bool) {
        (*a, *b)
    }
    fn sum_contains(&self, s: &(bool, bool), x: &bool) -> bool {
        match s {
            (false, false) => !*x,
            (true, true) => true,
            _ => *x,
        }
    }
    fn p_class(&self) -> Option<bool> {
        None
    }
    fn render(&self, a: &bool) -> String {
        if *a { "1" } else { "0" }.into()
    }
}

/// A multiplicative map from a presented hyperfield, fixed on generators and π.
#[derive(Clone, Debug)]
pub struct HomSpec<T: ValuedHyperfield> {
    pub src: Arc<Presented>,
    pub dst: Arc<T>,
    /// Images of `src.group.gens`, in order.
    pub unit_images: Vec<T::Elem>,
    pub pi_image: T::Elem,
    pub over_p: bool,
}

impl HomSpec<Hyperfield> {
    pub fn identity(p: &Arc<Presented>) -> Self {
        HomSpec {
            src: p.clone(),
            dst: p.h.clone(),
            unit_images: p.group.gens.iter().map(|g| HfClass::NonZero { val: 0, unit: *g }).collect(),
            pi_image: p.h.pi_class(),
            over_p: true,
        }
    }
}

impl<T: ValuedHyperfield> HomSpec<T> {
    pub fn apply(&self, a: &HfClass) -> Result<T::Elem> {
        let dst = &*self.dst;
        match a {
            HfClass::Zero => Ok(dst.zero()),
            HfClass::NonZero { val, unit } => {
                let mut out = dst.pow(&self.pi_image, *val)?;
                for (img, k) in self.unit_images.iter().zip(self.src.group.dlog(*unit)) {
                    out = dst.mul(&out, &dst.pow(img, *k as i64)?);
                }
                Ok(out)
            }
        }
    }

    fn render_src(&self, xs: &[HfClass]) -> String {
        let parts: Vec<String> = xs.iter().map(|x| self.src.h.render_class(x)).collect();
        format!("({})", parts.join(", "))
    }
}

pub use crate::axioms::Status;

#[derive(Clone, Debug, Serialize)]
pub struct ConditionResult {
    pub condition: u8,
    pub name: &'static str,
    pub status: Status,
    pub witness: Option<String>,
    /// The source classes of the first failing instance.
    #[serde(skip)]
    pub witness_classes: Vec<HfClass>,
    pub checked: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomReport {
    pub window: i64,
    pub conditions: Vec<ConditionResult>,
}

impl HomReport {
    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|c| c.status == Status::Pass)
    }

    pub fn condition(&self, id: u8) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.condition == id)
    }

    pub fn first_violation(&self) -> Option<Error> {
        self.conditions.iter().find(|c| c.status == Status::Fail).map(|c| Error::HomViolation {
            condition: c.condition,
            witness: c.witness.clone().unwrap_or_default(),
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct HomBudget {
    /// Valuation window for condition (4) and for zero-containing sums.
    pub window: i64,
}

impl HomBudget {
    pub fn default_for(n: u32) -> Self {
        HomBudget { window: 2 * n as i64 + 2 }
    }
}

struct Tally {
    condition: u8,
    name: &'static str,
    checked: u64,
    witness: Option<(String, Vec<HfClass>)>,
}

impl Tally {
    fn new(condition: u8, name: &'static str) -> Self {
        Tally { condition, name, checked: 0, witness: None }
    }

    fn expect(&mut self, ok: bool, witness: impl FnOnce() -> (String, Vec<HfClass>)) {
        self.checked += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
    }

    fn done(self) -> ConditionResult {
        let (witness, witness_classes) = match self.witness {
            Some((w, c)) => (Some(w), c),
            None => (None, Vec::new()),
        };
        ConditionResult {
            condition: self.condition,
            name: self.name,
            status: if witness.is_none() { Status::Pass } else { Status::Fail },
            witness,
            witness_classes,
            checked: self.checked,
        }
    }
}

/// Window classes in rank order: 0, then valuations 0, 1, −1, 2, −2, …, units
/// by index within a valuation.
fn ranked_window(h: &Hyperfield, v: i64) -> Vec<HfClass> {
    let mut out = vec![HfClass::Zero];
    let mut vals = vec![0];
    for k in 1..=v {
        vals.push(k);
        vals.push(-k);
    }
    for val in vals {
        out.extend((0..h.unit_count() as u32).map(|unit| HfClass::NonZero { val, unit }));
    }
    out
}

fn ord_key(v: Option<i64>) -> i64 {
    v.unwrap_or(i64::MAX)
}

/// Conditions (1) identities, (2) multiplicativity on the presentation,
/// (3) additive containment, (4) valuation-order equivalence, and (5) over p
/// when requested.
///
/// By exact distributivity on both sides, (3) reduces to pairs (1, π^k·u)
/// with 0 ≤ k ≤ n; for k ≥ n the source sum is the single class [1].
pub fn check_hom<T: ValuedHyperfield>(spec: &HomSpec<T>, budget: &HomBudget) -> Result<HomReport> {
    let src = &spec.src;
    let h = &*src.h;
    let dst = &*spec.dst;
    let n = h.level();
    let mut results = Vec::new();

    let mut ident = Tally::new(1, "identities");
    ident.expect(spec.apply(&HfClass::Zero)? == dst.zero(), || ("f(0) ≠ 0".into(), vec![HfClass::Zero]));
    ident.expect(spec.apply(&h.one())? == dst.one(), || ("f(1) ≠ 1".into(), vec![h.one()]));
    let nonzero = spec.pi_image != dst.zero() && spec.unit_images.iter().all(|u| *u != dst.zero());
    ident.expect(nonzero, || ("a generator maps to 0".into(), vec![]));
    results.push(ident.done());
    if !nonzero {
        return Ok(HomReport { window: budget.window, conditions: results });
    }

    let mut mult = Tally::new(2, "multiplicativity");
    for (i, (g, o)) in src.group.gens.iter().zip(&src.group.orders).enumerate() {
        let img = dst.pow(&spec.unit_images[i], *o as i64)?;
        let gc = HfClass::NonZero { val: 0, unit: *g };
        mult.expect(img == dst.one(), || {
            (format!("generator {} of order {o} has image of another order", h.render_class(&gc)), vec![gc])
        });
    }
    results.push(mult.done());

    // f on valuation-0 classes, so each image below costs one π-power.
    let unit_img: Vec<T::Elem> = (0..h.unit_count() as u32)
        .map(|unit| spec.apply(&HfClass::NonZero { val: 0, unit }))
        .collect::<Result<_>>()?;
    let image = |a: &HfClass| -> Result<T::Elem> {
        match a {
            HfClass::Zero => Ok(dst.zero()),
            HfClass::NonZero { val, unit } => Ok(dst.mul(&dst.pow(&spec.pi_image, *val)?, &unit_img[*unit as usize])),
        }
    };

    let mut add = Tally::new(3, "additive containment");
    let one = h.one();
    let f_one = image(&one)?;
    for k in 0..=n as i64 {
        for u in 0..h.unit_count() as u32 {
            let beta = HfClass::NonZero { val: k, unit: u };
            let s = h.multiadd(&one, &beta);
            let target = dst.sum(&f_one, &image(&beta)?);
            let radius = s.radius(n).expect("1 + β is not {0}");
            let cutoff = if s.contains_zero() { radius + budget.window } else { radius };
            for m in h.sum_members(&s, cutoff)? {
                let ok = dst.sum_contains(&target, &image(&m)?);
                add.expect(ok, || (spec.render_src(&[one, beta, m]), vec![one, beta, m]));
            }
        }
    }
    results.push(add.done());

    let mut order = Tally::new(4, "valuation order");
    let window = ranked_window(h, budget.window);
    let mut reps: HashMap<(i64, i64), usize> = HashMap::new();
    let mut keys: Vec<(i64, i64)> = Vec::new();
    for (rank, a) in window.iter().enumerate() {
        let key = (ord_key(a.valuation()), ord_key(dst.valuation(&image(a)?)));
        if !reps.contains_key(&key) {
            reps.insert(key, rank);
            keys.push(key);
        }
    }
    let mut worst: Option<(usize, usize)> = None;
    for ka in &keys {
        for kb in &keys {
            order.checked += 1;
            if (ka.0 <= kb.0) != (ka.1 <= kb.1) {
                let cand = (reps[ka], reps[kb]);
                let better = match worst {
                    None => true,
                    Some(w) => (cand.0 + cand.1, cand.0) < (w.0 + w.1, w.0),
                };
                if better {
                    worst = Some(cand);
                }
            }
        }
    }
    if let Some((i, j)) = worst {
        let pair = [window[i], window[j]];
        order.witness = Some((spec.render_src(&pair), pair.to_vec()));
    }
    results.push(order.done());

    if spec.over_p {
        let mut overp = Tally::new(5, "over p");
        let pc = h.p_class();
        let ok = match dst.p_class() {
            Some(target) => spec.apply(&pc)? == target,
            None => false,
        };
        overp.expect(ok, || (spec.render_src(&[pc]), vec![pc]));
        results.push(overp.done());
    }
    Ok(HomReport { window: budget.window, conditions: results })
}

/// Cap on the number of candidate assignments a search may visit.
pub const SEARCH_CAP: usize = 1 << 20;

/// Every homomorphism H1 → H2 (over p when asked) with ν(f(π)) = e_L/e_K,
/// sorted by (pi_image, unit_images).
pub fn search_homs(
    src: &Arc<Presented>,
    dst: &Arc<Presented>,
    over_p: bool,
    threads: usize,
) -> Result<Vec<HomSpec<Hyperfield>>> {
    if src.level() != dst.level() {
        return Err(Error::InvalidInput("source and target levels differ".into()));
    }
    let (ek, el) = (src.field().e() as i64, dst.field().e() as i64);
    if el % ek != 0 || src.field().p() != dst.field().p() {
        return Ok(Vec::new());
    }
    let s = el / ek;
    let th = &*dst.h;
    let unit_choices: Vec<Vec<HfClass>> = src
        .group
        .orders
        .iter()
        .map(|o| {
            (0..th.unit_count() as u32)
                .filter(|u| unit_pow(th, *u, *o as u64) == th.one_index())
                .map(|unit| HfClass::NonZero { val: 0, unit })
                .collect()
        })
        .collect();
    let pi_choices: Vec<HfClass> =
        (0..th.unit_count() as u32).map(|unit| HfClass::NonZero { val: s, unit }).collect();
    let total = unit_choices
        .iter()
        .try_fold(pi_choices.len(), |acc, c| acc.checked_mul(c.len()))
        .filter(|t| *t <= SEARCH_CAP)
        .ok_or_else(|| Error::BudgetExceeded(format!("more than {SEARCH_CAP} candidate maps")))?;
    let budget = HomBudget::default_for(src.level());
    let build = |mut idx: usize| -> HomSpec<Hyperfield> {
        let pi_image = pi_choices[idx % pi_choices.len()];
        idx /= pi_choices.len();
        let mut unit_images = Vec::with_capacity(unit_choices.len());
        for c in &unit_choices {
            unit_images.push(c[idx % c.len()]);
            idx /= c.len();
        }
        HomSpec { src: src.clone(), dst: dst.h.clone(), unit_images, pi_image, over_p }
    };
    let keep = |spec: &HomSpec<Hyperfield>| -> Result<bool> {
        if over_p && spec.apply(&src.h.p_class())? != dst.h.p_class() {
            return Ok(false);
        }
        Ok(check_hom(spec, &budget)?.all_pass())
    };
    let threads = threads.max(1).min(total.max(1));
    let mut found: Vec<HomSpec<Hyperfield>> = Vec::new();
    let chunks: Vec<Result<Vec<HomSpec<Hyperfield>>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let (build, keep) = (&build, &keep);
                scope.spawn(move || {
                    let mut out = Vec::new();
                    for idx in (t..total).step_by(threads) {
                        let spec = build(idx);
                        if keep(&spec)? {
                            out.push(spec);
                        }
                    }
                    Ok(out)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("search worker panicked")).collect()
    });
    for c in chunks {
        found.extend(c?);
    }
    found.sort_by(|a, b| (a.pi_image, &a.unit_images).cmp(&(b.pi_image, &b.unit_images)));
    Ok(found)
}

/// The inverse of a bijective homomorphism, or `None` when f is not bijective.
pub fn inverse(spec: &HomSpec<Hyperfield>, dst: &Arc<Presented>) -> Result<Option<HomSpec<Hyperfield>>> {
    let h1 = &*spec.src.h;
    let h2 = &*dst.h;
    if h1.unit_count() != h2.unit_count() || spec.pi_image.valuation() != Some(1) {
        return Ok(None);
    }
    let mut back = vec![u32::MAX; h2.unit_count()];
    for u in 0..h1.unit_count() as u32 {
        match spec.apply(&HfClass::NonZero { val: 0, unit: u })? {
            HfClass::NonZero { val: 0, unit } if back[unit as usize] == u32::MAX => back[unit as usize] = u,
            _ => return Ok(None),
        }
    }
    let w = match spec.pi_image {
        HfClass::NonZero { unit, .. } => unit,
        HfClass::Zero => return Ok(None),
    };
    let unit_images =
        dst.group.gens.iter().map(|g| HfClass::NonZero { val: 0, unit: back[*g as usize] }).collect();
    let pi_image = HfClass::NonZero { val: 1, unit: back[h2.unit_inv(w) as usize] };
    Ok(Some(HomSpec { src: dst.clone(), dst: spec.src.h.clone(), unit_images, pi_image, over_p: spec.over_p }))
}

/// Homomorphisms over p that are bijective with a homomorphism as inverse.
pub fn search_isos(src: &Arc<Presented>, dst: &Arc<Presented>, threads: usize) -> Result<Vec<HomSpec<Hyperfield>>> {
    let budget = HomBudget::default_for(src.level());
    let mut out = Vec::new();
    for f in search_homs(src, dst, true, threads)? {
        if let Some(g) = inverse(&f, dst)? {
            if check_hom(&g, &budget)?.all_pass() {
                out.push(f);
            }
        }
    }
    Ok(out)
}

/// A continuous embedding K → L, fixed by the images of x and π.
#[derive(Clone, Debug)]
pub struct EmbeddingSpec {
    pub src: Arc<FieldModel>,
    pub dst: Arc<FieldModel>,
    pub x_image: FieldElem,
    pub pi_image: FieldElem,
}

impl EmbeddingSpec {
    /// ν_L(Φ(π)) = e_L/e_K.
    pub fn scale(&self) -> u32 {
        self.pi_image.valuation().ok().flatten().unwrap_or(0).max(1)
    }

    fn x_powers(&self) -> Result<Vec<FieldElem>> {
        let mut out = vec![FieldElem::one(&self.dst)];
        for _ in 1..self.src.f() {
            out.push(out.last().unwrap().mul(&self.x_image)?);
        }
        Ok(out)
    }

    /// Φ on an element of W given by its x-coefficients.
    pub fn apply_w(&self, w: &[BigInt]) -> Result<FieldElem> {
        let xs = self.x_powers()?;
        let mut acc = FieldElem::zero(&self.dst);
        for (c, xp) in w.iter().zip(&xs) {
            if !c.is_zero() {
                acc = acc.add(&xp.mul_int(c.clone()))?;
            }
        }
        Ok(acc)
    }

    /// Σ c_ij Φ(x)^j Φ(π)^i, with absolute precision min(N_L, s·prec(a)).
    pub fn apply(&self, a: &FieldElem) -> Result<FieldElem> {
        if a.is_exact_zero() {
            return Ok(FieldElem::zero(&self.dst));
        }
        let f = self.src.f();
        let xs = self.x_powers()?;
        let mut acc = FieldElem::zero(&self.dst);
        let mut pi_pow = FieldElem::one(&self.dst);
        for row in a.coeffs().chunks(f) {
            let mut w = FieldElem::zero(&self.dst);
            for (c, xp) in row.iter().zip(&xs) {
                if !c.is_zero() {
                    w = w.add(&xp.mul_int(c.clone()))?;
                }
            }
            acc = acc.add(&w.mul(&pi_pow)?)?;
            pi_pow = pi_pow.mul(&self.pi_image)?;
        }
        let prec = (self.scale() * a.prec()).min(self.dst.prec());
        Ok(acc.with_prec(prec.min(acc.prec())))
    }

    pub fn apply_k(&self, a: &KElem) -> Result<KElem> {
        if a.is_exact_zero() {
            return Ok(KElem::zero(&self.dst));
        }
        if a.is_zero_at_precision() {
            let lb = a.abs_prec().unwrap_or(0).max(0) as u32;
            let prec = (self.scale() * lb).min(self.dst.prec());
            let z = FieldElem::from_coeffs(&self.dst, vec![BigInt::zero(); self.dst.dim()], prec);
            return Ok(KElem::from_elem(&z));
        }
        let v = a.valuation()?.expect("nonzero");
        let u = KElem::from_elem(&self.apply(a.unit().expect("nonzero"))?);
        let pi = KElem::from_elem(&self.pi_image);
        let pv = if v >= 0 { pi.pow(v as u32)? } else { pi.inv()?.pow(v.unsigned_abs() as u32)? };
        u.mul(&pv)
    }

    /// Φ applied to the Eisenstein polynomial of K.
    pub fn image_of_eisenstein(&self) -> Result<Poly> {
        let coeffs = self.src.eisenstein().iter().map(|w| self.apply_w(w)).collect::<Result<_>>()?;
        Ok(Poly::new(coeffs))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "x_image": self.x_image.render(),
            "pi_image": self.pi_image.render(),
        })
    }
}

/// How often a lifted embedding reproduces f on sampled classes.
#[derive(Clone, Debug, Serialize)]
pub struct Agreement {
    pub checked: usize,
    pub matched: usize,
    pub first_mismatch: Option<String>,
}

impl Agreement {
    pub fn complete(&self) -> bool {
        self.matched == self.checked
    }
}

#[derive(Clone, Debug)]
pub struct Lift {
    pub embedding: EmbeddingSpec,
    pub newton_steps: u32,
    pub digit_steps: u32,
    pub agreement: Agreement,
}

/// Samples compared by the lifting routines.
pub const LIFT_SAMPLES: usize = 64;

/// Compares f([a]) with [Φ(a)] on x, π, p and seeded random π^v·u.
pub fn verify_induces(f: &HomSpec<Hyperfield>, emb: &EmbeddingSpec, samples: usize, seed: u64) -> Result<Agreement> {
    let h = &*f.src.h;
    let k = h.field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut elems = vec![
        KElem::from_elem(&FieldElem::pi(&k)),
        KElem::from_int(&k, k.p().clone()),
    ];
    if k.f() > 1 {
        elems.push(KElem::from_elem(&FieldElem::x(&k)));
    }
    while elems.len() < samples.max(elems.len()) {
        let u = FieldElem::random(&k, k.prec(), &mut rng);
        if u.is_unit() {
            let v = rng.gen_range(-2i64..=3);
            elems.push(KElem::from_parts(v, u)?);
        }
    }
    let mut out = Agreement { checked: 0, matched: 0, first_mismatch: None };
    for a in &elems {
        let lhs = f.apply(&h.class_of_k(a)?)?;
        let rhs = f.dst.class_of_k(&emb.apply_k(a)?)?;
        out.checked += 1;
        if lhs == rhs {
            out.matched += 1;
        } else if out.first_mismatch.is_none() {
            out.first_mismatch = Some(format!(
                "a = {}: f([a]) = {}, [Φ(a)] = {}",
                a.render(),
                f.dst.render_class(&lhs),
                f.dst.render_class(&rhs)
            ));
        }
    }
    Ok(out)
}

/// Outcome of [`verify_embedding`]: one counter per property.
#[derive(Clone, Debug, Default, Serialize)]
pub struct EmbeddingCheck {
    pub samples: usize,
    pub multiplicative: usize,
    pub additive: usize,
    pub valuation: usize,
    pub residue: usize,
    pub first_failure: Option<String>,
}

impl EmbeddingCheck {
    pub fn all_pass(&self) -> bool {
        [self.multiplicative, self.additive, self.valuation, self.residue].iter().all(|c| *c == self.samples)
    }
}

/// Φ(ab) = Φ(a)Φ(b), Φ(a+b) = Φ(a)+Φ(b), ν_L∘Φ = s·ν_K and res∘Φ = φ∘res
/// on seeded random pairs, with φ the residue map induced by f.
pub fn verify_embedding(emb: &EmbeddingSpec, f: &HomSpec<Hyperfield>, samples: usize, seed: u64) -> Result<EmbeddingCheck> {
    let k = emb.src.clone();
    let s = emb.scale();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = EmbeddingCheck { samples, ..Default::default() };
    let fail = |out: &mut EmbeddingCheck, what: &str, a: &FieldElem, b: &FieldElem| {
        if out.first_failure.is_none() {
            out.first_failure = Some(format!("{what} at ({}, {})", a.render(), b.render()));
        }
    };
    for _ in 0..samples {
        let a = FieldElem::random(&k, k.prec(), &mut rng);
        let b = FieldElem::random(&k, k.prec(), &mut rng);
        let (fa, fb) = (emb.apply(&a)?, emb.apply(&b)?);
        if emb.apply(&a.mul(&b)?)?.eq_at_precision(&fa.mul(&fb)?) {
            out.multiplicative += 1;
        } else {
            fail(&mut out, "multiplicativity", &a, &b);
        }
        if emb.apply(&a.add(&b)?)?.eq_at_precision(&fa.add(&fb)?) {
            out.additive += 1;
        } else {
            fail(&mut out, "additivity", &a, &b);
        }
        let va = a.valuation().ok().flatten();
        if va.map(|v| v * s) == fa.valuation().ok().flatten() {
            out.valuation += 1;
        } else {
            fail(&mut out, "valuation", &a, &b);
        }
        let ra = a.residue()?;
        let induced = if k.residue_field().is_zero(&ra) {
            HfClass::Zero
        } else {
            f.apply(&f.src.h.class_of(&FieldElem::lift_residue(&k, &ra))?)?
        };
        let phi_ra = match induced {
            HfClass::Zero => f.dst.field().residue_field().zero(),
            HfClass::NonZero { unit, .. } => f.dst.unit_elem(unit).residue()?,
        };
        if fa.residue()? == phi_ra {
            out.residue += 1;
        } else {
            fail(&mut out, "residue compatibility", &a, &b);
        }
    }
    Ok(out)
}

/// Φ(x): the root of h in L lifting the residue of f([x]).
fn unramified_image(f: &HomSpec<Hyperfield>) -> Result<FieldElem> {
    let k = f.src.field().clone();
    let l = f.dst.field().clone();
    if f.src.level() != f.dst.level() {
        return Err(Error::InvalidInput("source and target levels differ".into()));
    }
    if k.p() != l.p() {
        return Err(Error::IncompatibleResidueEmbedding("residue characteristics differ".into()));
    }
    if k.f() == 1 {
        return Ok(FieldElem::zero(&l));
    }
    let cx = f.src.h.class_of(&FieldElem::x(&k))?;
    let unit = match f.apply(&cx)? {
        HfClass::NonZero { val: 0, unit } => unit,
        other => {
            return Err(Error::IncompatibleResidueEmbedding(format!(
                "f([x]) = {} is not a unit class",
                f.dst.render_class(&other)
            )))
        }
    };
    let seed = FieldElem::lift_residue(&l, &f.dst.unit_elem(unit).residue()?);
    let hpoly = Poly::new(k.h().iter().map(|c| FieldElem::from_int(&l, c.clone())).collect());
    if !hpoly.eval(&seed)?.reduce_mod(1)?.is_zero_at_precision() {
        return Err(Error::IncompatibleResidueEmbedding(format!(
            "residue of f([x]) = {} is not a root of h",
            f.dst.render_class(&HfClass::NonZero { val: 0, unit })
        )));
    }
    hensel_root(&hpoly, &seed)
}

fn verified(f: &HomSpec<Hyperfield>, embedding: EmbeddingSpec) -> Result<Lift> {
    let agreement = verify_induces(f, &embedding, LIFT_SAMPLES, 0)?;
    if let Some(m) = &agreement.first_mismatch {
        return Err(Error::IncompatibleResidueEmbedding(format!("lift does not induce f: {m}")));
    }
    Ok(Lift { embedding, newton_steps: 0, digit_steps: 0, agreement })
}

/// Lift of a homomorphism over p out of an unramified field.
pub fn lift_unramified(f: &HomSpec<Hyperfield>) -> Result<Lift> {
    let k = f.src.field().clone();
    if k.e() != 1 {
        return Err(Error::InvalidInput("source field is ramified".into()));
    }
    let l = f.dst.field().clone();
    let embedding = EmbeddingSpec {
        src: k.clone(),
        dst: l.clone(),
        x_image: unramified_image(f)?,
        pi_image: FieldElem::from_int(&l, k.p().clone()),
    };
    verified(f, embedding)
}

/// The unit a in P = X^e − p·a, when P has that shape.
fn normal_form_unit(k: &FieldModel) -> Result<Vec<BigInt>> {
    let eis = k.eisenstein();
    let e = k.e();
    let p = k.p();
    for (i, w) in eis.iter().enumerate().take(e).skip(1) {
        if w.iter().any(|c| !c.is_zero()) {
            return Err(Error::NotNormalForm(format!("coefficient of X^{i} is nonzero")));
        }
    }
    if eis[0].iter().any(|c| !c.is_multiple_of(p)) {
        return Err(Error::NotNormalForm("constant term is not divisible by p".into()));
    }
    Ok(eis[0].iter().map(|c| -(c / p)).collect())
}

/// Lift of a homomorphism over p out of a tame field in normal form
/// P = X^e − p·a: Φ(π) = b·π₀ with π₀ the representative of f([π]) and
/// b^e = p·Φ(a)/π₀^e, b ≡ 1.
pub fn lift_tame(f: &HomSpec<Hyperfield>) -> Result<Lift> {
    let k = f.src.field().clone();
    if !k.is_tame() {
        return Err(Error::NotTame);
    }
    normal_form_unit(&k)?;
    let x_image = unramified_image(f)?;
    lift_tame_with(f, x_image)
}

fn lift_tame_with(f: &HomSpec<Hyperfield>, x_image: FieldElem) -> Result<Lift> {
    let k = f.src.field().clone();
    let l = f.dst.field().clone();
    let a = normal_form_unit(&k)?;
    let e = k.e() as u32;
    let mut emb = EmbeddingSpec { src: k.clone(), dst: l.clone(), x_image, pi_image: FieldElem::one(&l) };
    let pi0 = f.dst.representative(&f.pi_image);
    if pi0.valuation()?.is_none_or(|v| v < 1) {
        return Err(Error::InvalidInput("f([π]) must have positive valuation".into()));
    }
    let c = KElem::from_int(&l, k.p().clone())
        .mul(&KElem::from_elem(&emb.apply_w(&a)?))?
        .div(&pi0.pow(e)?)?;
    if c.valuation()? != Some(0) {
        return Err(Error::HenselPreconditionFailed("p·Φ(a)/π₀^e is not a unit; f is not over p".into()));
    }
    let mut q = vec![c.to_elem()?.neg()];
    q.extend((1..e).map(|_| FieldElem::zero(&l)));
    q.push(FieldElem::one(&l));
    let b = hensel_root(&Poly::new(q), &FieldElem::one(&l))?;
    emb.pi_image = b.mul(&pi0.to_elem()?)?;
    verified(f, emb)
}

/// An equivalent Eisenstein polynomial X^e − p·w with w a Teichmüller-style
/// lift of res(π^e/p), and the new uniformizer π₁ = π/r, r^e = (π^e/p)/w.
#[derive(Clone, Debug)]
pub struct TameNormalForm {
    pub def: FieldDef,
    pub w: Vec<BigInt>,
    pub pi1: FieldElem,
}

pub fn tame_normal_form(field: &Arc<FieldModel>) -> Result<TameNormalForm> {
    if !field.is_tame() {
        return Err(Error::NotTame);
    }
    let e = field.e() as u32;
    let p = FieldElem::from_int(field, field.p().clone());
    let u = FieldElem::pi_pow(field, e).div(&p)?;
    let w_elem = FieldElem::lift_residue(field, &u.residue()?);
    let t = u.div(&w_elem)?;
    let mut q = vec![t.neg()];
    q.extend((1..e).map(|_| FieldElem::zero(field)));
    q.push(FieldElem::one(field));
    let r = hensel_root(&Poly::new(q), &FieldElem::one(field))?;
    let pi1 = FieldElem::pi(field).mul(&r.inv_unit()?)?;
    let w: Vec<BigInt> = w_elem.coeffs()[..field.f()].to_vec();
    let mut def = field.def().clone();
    let fdeg = field.f();
    def.eis = (0..=field.e())
        .map(|i| {
            let mut c = vec![BigInt::zero(); fdeg];
            if i == 0 {
                c = w.iter().map(|x| -(x * field.p())).collect();
            } else if i == field.e() {
                c[0] = BigInt::from(1);
            }
            c
        })
        .collect();
    Ok(TameNormalForm { def, w, pi1 })
}

/// Lift of a homomorphism over p by Krasner refinement of the image of P
/// from the representative of f([π]), once n reaches the conservative
/// threshold. Agreement with f is reported and not asserted.
pub fn lift_wild(f: &HomSpec<Hyperfield>) -> Result<Lift> {
    let k = f.src.field().clone();
    let l = f.dst.field().clone();
    let n = f.src.level();
    let needed = n_threshold(&k)?.n_min_conservative as u32;
    if n < needed {
        return Err(Error::ThresholdNotMet { n, needed });
    }
    let mut emb =
        EmbeddingSpec { src: k.clone(), dst: l.clone(), x_image: unramified_image(f)?, pi_image: FieldElem::one(&l) };
    let pi0 = f.dst.representative(&f.pi_image).to_elem()?;
    let r = krasner_refine(&emb.image_of_eisenstein()?, &pi0)?;
    emb.pi_image = r.root;
    let agreement = verify_induces(f, &emb, LIFT_SAMPLES, 0)?;
    Ok(Lift { embedding: emb, newton_steps: r.newton_steps, digit_steps: r.digit_steps, agreement })
}

/// Extends an embedding Φ₀ of the unramified subfield K₀ ⊂ K to K, given a
/// homomorphism f over p whose restriction to W-units matches Φ₀.
pub fn lift_over(phi0: &EmbeddingSpec, f: &HomSpec<Hyperfield>) -> Result<Lift> {
    let k = f.src.field().clone();
    let k0 = phi0.src.clone();
    if k0.e() != 1 || k0.p() != k.p() || k0.h() != k.h() {
        return Err(Error::InvalidInput("Φ₀ is not defined on the unramified subfield of K".into()));
    }
    if !k.is_tame() {
        return Err(Error::NotTame);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut ws: Vec<Vec<BigInt>> = vec![vec![k.p().clone()]];
    if let Some(all) = k.residue_field().elements() {
        ws.extend(all.into_iter().filter(|r| !k.residue_field().is_zero(r)));
    }
    while ws.len() < LIFT_SAMPLES {
        let u = FieldElem::random(&k0, k0.prec(), &mut rng);
        if u.is_unit() {
            ws.push(u.coeffs().to_vec());
        }
    }
    let h = &*f.src.h;
    for w in &ws {
        let lhs = f.apply(&h.class_of(&FieldElem::from_w(&k, w))?)?;
        let rhs = f.dst.class_of(&phi0.apply_w(w)?)?;
        if lhs != rhs {
            return Err(Error::RestrictionMismatch(format!(
                "w = {:?}: f([w]) = {}, [Φ₀(w)] = {}",
                w.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                f.dst.render_class(&lhs),
                f.dst.render_class(&rhs)
            )));
        }
    }
    lift_tame_with(f, phi0.x_image.clone())
}

fn int_json(c: &BigInt) -> serde_json::Value {
    match i64::try_from(c) {
        Ok(v) => serde_json::Value::from(v),
        Err(_) => serde_json::Value::from(c.to_string()),
    }
}

fn json_bigint(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::Number(n) => {
            n.as_i64().map(BigInt::from).ok_or_else(|| Error::InvalidInput(format!("not an integer: {n}")))
        }
        serde_json::Value::String(s) => {
            s.trim().parse().map_err(|_| Error::InvalidInput(format!("not an integer: {s:?}")))
        }
        other => Err(Error::InvalidInput(format!("not an integer: {other}"))),
    }
}

/// `"zero"` or `{"val": v, "unit": [coefficients of the canonical unit]}`.
pub fn class_to_json(h: &Hyperfield, a: &HfClass) -> serde_json::Value {
    match a {
        HfClass::Zero => serde_json::Value::from("zero"),
        HfClass::NonZero { val, unit } => serde_json::json!({
            "val": val,
            "unit": h.unit_elem(*unit).coeffs().iter().map(int_json).collect::<Vec<_>>(),
        }),
    }
}

pub fn class_from_json(h: &Hyperfield, v: &serde_json::Value) -> Result<HfClass> {
    if v.as_str() == Some("zero") {
        return Ok(HfClass::Zero);
    }
    let val = v
        .get("val")
        .and_then(serde_json::Value::as_i64)
        .ok_or_else(|| Error::InvalidInput("class needs an integer \"val\"".into()))?;
    let coeffs = v
        .get("unit")
        .and_then(serde_json::Value::as_array)
        .ok_or_else(|| Error::InvalidInput("class needs a \"unit\" array".into()))?
        .iter()
        .map(json_bigint)
        .collect::<Result<Vec<_>>>()?;
    let field = h.field();
    if coeffs.len() != field.dim() {
        return Err(Error::InvalidInput(format!("unit needs {} coefficients", field.dim())));
    }
    let u = FieldElem::from_coeffs(field, coeffs, field.prec());
    if !u.is_unit() {
        return Err(Error::InvalidInput("unit part is not a unit".into()));
    }
    Ok(HfClass::NonZero { val, unit: h.unit_index(&u)? })
}

impl HomSpec<Hyperfield> {
    pub fn to_json(&self) -> serde_json::Value {
        let h1 = &*self.src.h;
        let gens: Vec<_> = self
            .src
            .group
            .gens
            .iter()
            .zip(&self.src.group.orders)
            .map(|(g, o)| {
                let c = HfClass::NonZero { val: 0, unit: *g };
                serde_json::json!({ "class": class_to_json(h1, &c), "order": o, "render": h1.render_class(&c) })
            })
            .collect();
        serde_json::json!({
            "source": self.src.field().def().to_json(),
            "target": self.dst.field().def().to_json(),
            "n": self.src.level(),
            "over_p": self.over_p,
            "generators": gens,
            "unit_images": self.unit_images.iter().map(|c| class_to_json(&self.dst, c)).collect::<Vec<_>>(),
            "pi_image": class_to_json(&self.dst, &self.pi_image),
        })
    }

    /// Rebuilds a spec; the listed generators must match the deterministic
    /// presentation of the source.
    pub fn from_json(v: &serde_json::Value, cap: usize) -> Result<Self> {
        let get = |k: &str| v.get(k).ok_or_else(|| Error::InvalidInput(format!("missing field {k:?}")));
        let n = get("n")?.as_u64().ok_or_else(|| Error::InvalidInput("\"n\" must be an integer".into()))? as u32;
        let k = Arc::new(FieldModel::new(FieldDef::from_json(get("source")?)?)?);
        let l = Arc::new(FieldModel::new(FieldDef::from_json(get("target")?)?)?);
        let src = Arc::new(Presented::from_field(k, n, cap)?);
        let dst = Arc::new(Hyperfield::new(l, n)?);
        if let Some(gens) = v.get("generators").and_then(serde_json::Value::as_array) {
            let listed =
                gens.iter().map(|g| class_from_json(&src.h, g.get("class").unwrap_or(g))).collect::<Result<Vec<_>>>()?;
            let ours: Vec<HfClass> = src.group.gens.iter().map(|g| HfClass::NonZero { val: 0, unit: *g }).collect();
            if listed != ours {
                return Err(Error::InvalidInput("generators differ from the canonical presentation".into()));
            }
        }
        let unit_images = get("unit_images")?
            .as_array()
            .ok_or_else(|| Error::InvalidInput("\"unit_images\" must be an array".into()))?
            .iter()
            .map(|c| class_from_json(&dst, c))
            .collect::<Result<Vec<_>>>()?;
        if unit_images.len() != src.group.gens.len() {
            return Err(Error::InvalidInput(format!("expected {} unit images", src.group.gens.len())));
        }
        let pi_image = class_from_json(&dst, get("pi_image")?)?;
        let over_p = v.get("over_p").and_then(serde_json::Value::as_bool).unwrap_or(true);
        Ok(HomSpec { src, dst, unit_images, pi_image, over_p })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: i64, eis: &[i64], prec: u32) -> Arc<FieldModel> {
        Arc::new(FieldModel::new(FieldDef::simple(p, eis, prec)).unwrap())
    }

    fn presented(p: i64, eis: &[i64], n: u32) -> Arc<Presented> {
        let e = eis.len() as u32 - 1;
        Arc::new(Presented::from_field(field(p, eis, n + 4 * e + 8), n, DEFAULT_UNIT_CAP).unwrap())
    }

    fn sorted_orders(p: &Presented) -> Vec<u32> {
        let mut o = p.group.orders.clone();
        o.sort();
        o
    }

    #[test]
    fn generator_presentations() {
        let q2 = presented(2, &[-2, 1], 3);
        assert_eq!(sorted_orders(&q2), vec![2, 2]);
        let q5 = presented(5, &[-5, 1], 1);
        assert_eq!(q5.group.orders, vec![4]);
        assert_eq!(q5.h.class_from_int(2), HfClass::NonZero { val: 0, unit: q5.group.gens[0] });
        let r = presented(2, &[-2, 0, 1], 2);
        assert_eq!(r.group.orders, vec![2]);
        for u in 0..q2.h.unit_count() as u32 {
            let d = q2.group.dlog(u);
            let back = q2.group.gens.iter().zip(d.iter()).fold(q2.h.one_index(), |acc, (g, k)| {
                q2.h.unit_mul(acc, unit_pow(&q2.h, *g, *k as u64))
            });
            assert_eq!(back, u);
        }
    }

    #[test]
    fn identity_is_a_homomorphism() {
        for (p, eis, n) in [(2, &[-2, 1][..], 1), (5, &[-5, 0, 1][..], 2)] {
            let h = presented(p, eis, n);
            let r = check_hom(&HomSpec::identity(&h), &HomBudget::default_for(n)).unwrap();
            assert!(r.all_pass(), "{:?}", r.first_violation());
            assert_eq!(r.conditions.len(), 5);
        }
    }

    #[test]
    fn krasner_quotient_fails_order_condition() {
        let h = presented(2, &[-2, 1], 1);
        let spec = HomSpec { src: h.clone(), dst: Arc::new(KrasnerF2), unit_images: vec![], pi_image: true, over_p: false };
        let r = check_hom(&spec, &HomBudget::default_for(1)).unwrap();
        for c in 1..=3 {
            assert_eq!(r.condition(c).unwrap().status, Status::Pass, "condition {c}");
        }
        let four = r.condition(4).unwrap();
        assert_eq!(four.status, Status::Fail);
        assert_eq!(four.witness_classes, vec![h.h.class_from_int(2), h.h.class_from_int(1)]);
        assert!(matches!(r.first_violation(), Some(Error::HomViolation { condition: 4, .. })));
    }

    #[test]
    fn generator_order_breach() {
        let src = presented(2, &[-2, 1], 3);
        let dst = presented(5, &[-5, 1], 3);
        let two = dst.h.class_from_int(2);
        let spec = HomSpec {
            src: src.clone(),
            dst: dst.h.clone(),
            unit_images: vec![two; src.group.gens.len()],
            pi_image: dst.h.pi_class(),
            over_p: false,
        };
        let r = check_hom(&spec, &HomBudget::default_for(3)).unwrap();
        assert!(matches!(r.first_violation(), Some(Error::HomViolation { condition: 2, .. })));
    }

    #[test]
    fn quadratic_iso_search() {
        let a = presented(5, &[-5, 0, 1], 1);
        let b = presented(5, &[-20, 0, 1], 1);
        let c = presented(5, &[-10, 0, 1], 1);
        let isos = search_isos(&a, &b, 2).unwrap();
        assert!(!isos.is_empty());
        assert!(search_isos(&a, &c, 2).unwrap().is_empty());
        let selfs = search_homs(&a, &a, true, 1).unwrap();
        let id = HomSpec::identity(&a);
        assert!(selfs.iter().any(|f| f.unit_images == id.unit_images && f.pi_image == id.pi_image));

        let f = &isos[0];
        let lift = lift_tame(f).unwrap();
        let pi = &lift.embedding.pi_image;
        assert!(pi.pow(2).eq_at_precision(&FieldElem::from_int(b.field(), 5)));
        assert!(lift.agreement.complete());

        let q5 = field(5, &[-5, 1], b.field().prec());
        let phi0 = EmbeddingSpec {
            src: q5,
            dst: b.field().clone(),
            x_image: FieldElem::zero(b.field()),
            pi_image: FieldElem::from_int(b.field(), 5),
        };
        let over = lift_over(&phi0, f).unwrap();
        assert!(over.embedding.pi_image.eq_at_precision(pi));
    }

    #[test]
    fn tame_lifts_of_self_maps() {
        let a = presented(5, &[-5, 0, 1], 1);
        let k = a.field().clone();
        let id = HomSpec::identity(&a);
        let lift = lift_tame(&id).unwrap();
        assert!(lift.embedding.pi_image.eq_at_precision(&FieldElem::pi(&k)));
        let minus_pi = a.h.class_of(&FieldElem::pi(&k).neg()).unwrap();
        let neg = HomSpec { pi_image: minus_pi, ..id };
        let lift = lift_tame(&neg).unwrap();
        assert!(lift.embedding.pi_image.eq_at_precision(&FieldElem::pi(&k).neg()));
    }

    #[test]
    fn tame_normal_form_of_general_eisenstein() {
        let k = field(5, &[5, 5, 1], 20);
        assert!(matches!(normal_form_unit(&k), Err(Error::NotNormalForm(_))));
        let nf = tame_normal_form(&k).unwrap();
        let pw = FieldElem::from_w(&k, &nf.w).mul_int(5);
        assert!(nf.pi1.pow(2).eq_at_precision(&pw));
        assert_eq!(nf.pi1.valuation().unwrap(), Some(1));
        FieldModel::new(nf.def).unwrap();
    }

    #[test]
    fn unramified_quadratic_self_maps() {
        let two = |c: i64| vec![BigInt::from(c), BigInt::zero()];
        let def = FieldDef {
            p: BigInt::from(2),
            f: 2,
            e: 1,
            eis: vec![two(-2), two(1)],
            h: vec![BigInt::from(1), BigInt::from(1), BigInt::from(1)],
            prec: 16,
            n: None,
        };
        let k = Arc::new(FieldModel::new(def).unwrap());
        let h = Arc::new(Presented::from_field(k.clone(), 1, DEFAULT_UNIT_CAP).unwrap());
        let homs = search_homs(&h, &h, true, 2).unwrap();
        assert_eq!(homs.len(), 2);
        let xs: Vec<FieldElem> = homs.iter().map(|f| lift_unramified(f).unwrap().embedding.x_image).collect();
        assert!(!xs[0].eq_at_precision(&xs[1]));
        let hx = |x: &FieldElem| x.mul(x).unwrap().add(x).unwrap().add(&FieldElem::one(&k)).unwrap();
        assert!(xs.iter().all(|x| hx(x).is_zero_at_precision()));
    }

    #[test]
    fn wild_lift_needs_threshold() {
        let a = presented(2, &[-2, 0, 1], 2);
        assert!(matches!(lift_wild(&HomSpec::identity(&a)), Err(Error::ThresholdNotMet { n: 2, needed: 13 })));
    }

    #[test]
    fn json_round_trip() {
        let a = presented(5, &[-5, 0, 1], 1);
        let id = HomSpec::identity(&a);
        let back = HomSpec::from_json(&id.to_json(), DEFAULT_UNIT_CAP).unwrap();
        assert_eq!(back.unit_images, id.unit_images);
        assert_eq!(back.pi_image, id.pi_image);
        assert_eq!(back.to_json(), id.to_json());
    }
}
