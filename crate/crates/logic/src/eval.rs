//! Bounded evaluation of sentences on H_{ν,n} and on (K, ν).
//!
//! Quantifiers range over finite domains cut out by a radius V, so answers
//! are three-valued: `True` carries a witness that re-verifies, a definite or
//! exhaustive failure is `FalseWithinRadius`, and anything the finite search
//! cannot settle is `Unknown`.

use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::BigInt;
use serde_json::{json, Value};

use hyperval_core::hyperfield::{HfClass, Hyperfield};
use hyperval_core::kelem::KElem;
use hyperval_core::ResElem;

use crate::ast::{AtomVars, Binder, FTerm, Formula, GTerm, RTerm, Sort, ValAtom, ValFormula, VhfAtom, VhfFormula, VhfTerm};
use crate::error::{Error, Result};

/// Default number of evaluation steps (bindings plus atom checks).
pub const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalConfig {
    pub radius: i64,
    pub budget: u64,
}

impl EvalConfig {
    pub fn new(radius: i64) -> Self {
        EvalConfig { radius, budget: DEFAULT_BUDGET }
    }
}

/// Result of a bounded evaluation. Witness values are rendered as text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TriBool {
    True(Vec<(String, String)>),
    FalseWithinRadius(i64),
    Unknown(i64),
}

impl TriBool {
    pub fn is_true(&self) -> bool {
        matches!(self, TriBool::True(_))
    }

    pub fn is_definite(&self) -> bool {
        !matches!(self, TriBool::Unknown(_))
    }

    pub fn to_json(&self) -> Value {
        match self {
            TriBool::True(w) => {
                let map: serde_json::Map<String, Value> =
                    w.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
                json!({ "result": "true", "witness": map })
            }
            TriBool::FalseWithinRadius(v) => json!({ "result": "false_within_radius", "radius": v }),
            TriBool::Unknown(v) => json!({ "result": "unknown", "radius": v }),
        }
    }
}

/// A result together with the witness values behind `TriBool::True`.
#[derive(Clone, Debug)]
pub struct Outcome<V> {
    pub result: TriBool,
    pub assignment: Vec<(String, V)>,
}

/// Kleene values with two kinds of falsity: `F` is definite, `B` means no
/// witness inside the radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum K4 {
    T,
    B,
    U,
    F,
}

impl K4 {
    fn not(self) -> K4 {
        match self {
            K4::T => K4::F,
            K4::F => K4::T,
            _ => K4::U,
        }
    }
}

/// Variable bindings, innermost last.
pub struct Env<V> {
    vars: Vec<(String, V)>,
}

impl<V> Env<V> {
    fn new() -> Self {
        Env { vars: Vec::new() }
    }

    pub fn get(&self, name: &str) -> Option<&V> {
        self.vars.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    fn push(&mut self, name: &str, v: V) {
        self.vars.push((name.to_string(), v));
    }

    fn pop(&mut self) {
        self.vars.pop();
    }
}

fn unbound(name: &str) -> Error {
    Error::Sort(format!("unbound variable {name}"))
}

/// A structure the evaluator can quantify over.
pub trait Semantics {
    type Atom: AtomVars;
    type Value: Clone;

    /// The search domain for a sort and whether it is the whole sort.
    fn domain(&self, sort: Sort) -> Result<(Vec<Self::Value>, bool)>;

    fn atom(&self, a: &Self::Atom, env: &Env<Self::Value>) -> Result<bool>;

    /// Whether `a` is an equation of degree one in `x`.
    fn affine_in(&self, _a: &Self::Atom, _x: &str) -> bool {
        false
    }

    /// The value of `x` solving the affine equation `a`, with each name in
    /// `zeros` set to zero. `None` when the coefficient of `x` vanishes.
    fn solve(&self, _a: &Self::Atom, _x: &str, _env: &mut Env<Self::Value>, _zeros: &[String]) -> Result<Option<Self::Value>> {
        Ok(None)
    }

    fn render(&self, v: &Self::Value) -> String;
}

struct Block<'f, A> {
    /// Binders in search order.
    order: Vec<Binder>,
    /// Binders in source order, for the witness.
    source: Vec<Binder>,
    /// Conjuncts with no block variable.
    pre: Vec<&'f Formula<A>>,
    /// ready[i]: conjuncts whose last block variable is order[i].
    ready: Vec<Vec<&'f Formula<A>>>,
    /// solver[i]: the equation used to solve order[i], if any.
    solver: Vec<Option<&'f A>>,
    /// Some conjunct can evaluate to `U`; otherwise a `B` conjunct settles
    /// the branch.
    may_unknown: bool,
}

/// Whether `f` can evaluate to `U`. Quantifier-free formulas are definite.
fn may_be_unknown<A>(f: &Formula<A>) -> bool {
    let mut out = false;
    f.visit(&mut |g| match g {
        Formula::Forall(..) => out = true,
        Formula::Not(a) | Formula::Implies(a, _) if !a.is_quantifier_free() => out = true,
        _ => {}
    });
    out
}

#[derive(Default)]
struct BlockAgg {
    any_b: bool,
    any_u: bool,
    incomplete: bool,
}

struct Evaluator<'s, S: Semantics> {
    sem: &'s S,
    steps: u64,
    budget: u64,
    pinned: Option<&'s HashMap<String, S::Value>>,
    domains: HashMap<Sort, (Rc<Vec<S::Value>>, bool)>,
}

type Witness<V> = Vec<(String, V)>;

/// Candidate values for one variable: a shared domain plus at most one
/// solved value.
struct Cands<V> {
    shared: Rc<Vec<V>>,
    extra: Option<V>,
    /// The candidates exhaust the sort, or the solution is unique.
    complete: bool,
}

impl<V> Cands<V> {
    fn iter(&self) -> impl Iterator<Item = &V> {
        self.shared.iter().chain(self.extra.as_ref())
    }
}

impl<'s, S: Semantics> Evaluator<'s, S> {
    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Error::BudgetExceeded(format!("more than {} evaluation steps", self.budget)));
        }
        Ok(())
    }

    fn domain(&mut self, sort: Sort) -> Result<Cands<S::Value>> {
        if !self.domains.contains_key(&sort) {
            let (d, complete) = self.sem.domain(sort)?;
            self.domains.insert(sort, (Rc::new(d), complete));
        }
        let (d, complete) = &self.domains[&sort];
        Ok(Cands { shared: d.clone(), extra: None, complete: *complete })
    }

    fn eval(&mut self, f: &Formula<S::Atom>, env: &mut Env<S::Value>) -> Result<(K4, Witness<S::Value>)> {
        Ok(match f {
            Formula::True => (K4::T, vec![]),
            Formula::False => (K4::F, vec![]),
            Formula::Atom(a) => {
                self.tick()?;
                (if self.sem.atom(a, env)? { K4::T } else { K4::F }, vec![])
            }
            Formula::Not(g) => (self.eval(g, env)?.0.not(), vec![]),
            Formula::And(gs) => {
                let (mut acc, mut wit) = (K4::T, vec![]);
                for g in gs {
                    let (r, w) = self.eval(g, env)?;
                    if r == K4::F {
                        return Ok((K4::F, vec![]));
                    }
                    acc = acc.max(r);
                    wit.extend(w);
                }
                (acc, if acc == K4::T { wit } else { vec![] })
            }
            Formula::Or(gs) => self.or(gs.iter(), env)?,
            Formula::Implies(a, b) => {
                let (ra, _) = self.eval(a, env)?;
                let na = ra.not();
                if na == K4::T {
                    (K4::T, vec![])
                } else {
                    let (rb, wb) = self.eval(b, env)?;
                    if rb == K4::T {
                        (K4::T, wb)
                    } else if na == K4::F && rb == K4::F {
                        (K4::F, vec![])
                    } else if na == K4::U || rb == K4::U {
                        (K4::U, vec![])
                    } else {
                        (K4::B, vec![])
                    }
                }
            }
            Formula::Exists(bs, body) => self.exists(bs, body, env)?,
            Formula::Forall(bs, body) => (self.forall(bs, body, env)?, vec![]),
        })
    }

    fn or<'f>(
        &mut self,
        gs: impl Iterator<Item = &'f Formula<S::Atom>>,
        env: &mut Env<S::Value>,
    ) -> Result<(K4, Witness<S::Value>)>
    where
        S::Atom: 'f,
    {
        let mut acc = K4::F;
        for g in gs {
            let (r, w) = self.eval(g, env)?;
            match r {
                K4::T => return Ok((K4::T, w)),
                K4::U => acc = K4::U,
                K4::B if acc == K4::F => acc = K4::B,
                _ => {}
            }
        }
        Ok((acc, vec![]))
    }

    fn forall(&mut self, bs: &[Binder], body: &Formula<S::Atom>, env: &mut Env<S::Value>) -> Result<K4> {
        let Some((b, rest)) = bs.split_first() else {
            return Ok(self.eval(body, env)?.0);
        };
        let cands = self.candidates_plain(b)?;
        let mut all_true = true;
        for v in cands.iter().cloned() {
            self.tick()?;
            env.push(&b.name, v);
            let r = self.forall(rest, body, env);
            env.pop();
            match r? {
                K4::F => return Ok(K4::F),
                K4::T => {}
                _ => all_true = false,
            }
        }
        Ok(if all_true && cands.complete { K4::T } else { K4::U })
    }

    fn candidates_plain(&mut self, b: &Binder) -> Result<Cands<S::Value>> {
        if let Some(v) = self.pinned.and_then(|p| p.get(&b.name)) {
            return Ok(Cands { shared: Rc::new(vec![v.clone()]), extra: None, complete: false });
        }
        self.domain(b.sort)
    }

    fn block<'f>(&self, bs: &[Binder], body: &'f Formula<S::Atom>) -> (Block<'f, S::Atom>, &'f Formula<S::Atom>) {
        // Merge directly nested blocks when no name is rebound.
        let mut source = bs.to_vec();
        let mut body = body;
        while let Formula::Exists(inner, b2) = body {
            if inner.iter().any(|b| source.iter().any(|s| s.name == b.name)) {
                break;
            }
            source.extend(inner.iter().cloned());
            body = b2;
        }
        let mut conjuncts = Vec::new();
        flatten_and(body, &mut conjuncts);

        let atoms: Vec<&S::Atom> = conjuncts
            .iter()
            .filter_map(|c| if let Formula::Atom(a) = c { Some(a) } else { None })
            .collect();
        let solver_for = |name: &str| atoms.iter().copied().find(|a| self.sem.affine_in(a, name));
        let (mut order, mut affine): (Vec<Binder>, Vec<Binder>) =
            source.iter().cloned().partition(|b| solver_for(&b.name).is_none());
        order.append(&mut affine);
        let solver = order.iter().map(|b| solver_for(&b.name)).collect();

        let mut pre = Vec::new();
        let mut ready = vec![Vec::new(); order.len()];
        let may_unknown = conjuncts.iter().any(|c| may_be_unknown(c));
        for c in conjuncts {
            let free = c.free_vars();
            match order.iter().rposition(|b| free.contains(&b.name)) {
                Some(i) => ready[i].push(c),
                None => pre.push(c),
            }
        }
        // Cheaper conjuncts first, so failures prune before nested searches.
        pre.sort_by_key(|c| c.quantifier_depth());
        ready.iter_mut().for_each(|r| r.sort_by_key(|c| c.quantifier_depth()));
        (Block { order, source, pre, ready, solver, may_unknown }, body)
    }

    fn exists(&mut self, bs: &[Binder], body: &Formula<S::Atom>, env: &mut Env<S::Value>) -> Result<(K4, Witness<S::Value>)> {
        let (blk, _) = self.block(bs, body);
        let mut status = K4::T;
        let mut wit = Vec::new();
        for c in &blk.pre {
            let (r, w) = self.eval(c, env)?;
            if r == K4::F {
                return Ok((K4::F, vec![]));
            }
            status = status.max(r);
            wit.extend(w);
        }
        if status == K4::B && !blk.may_unknown {
            return Ok((K4::B, vec![]));
        }
        let mut agg = BlockAgg::default();
        if let Some(found) = self.search(&blk, 0, env, status, &mut agg)? {
            let mut out: Witness<S::Value> = Vec::new();
            for b in &blk.source {
                let v = found.0.iter().find(|(n, _)| *n == b.name).expect("bound").1.clone();
                out.push((b.name.clone(), v));
            }
            out.extend(wit);
            out.extend(found.1);
            return Ok((K4::T, out));
        }
        Ok((
            if agg.any_u {
                K4::U
            } else if agg.any_b || agg.incomplete {
                K4::B
            } else {
                K4::F
            },
            vec![],
        ))
    }

    fn candidates(&mut self, blk: &Block<'_, S::Atom>, i: usize, env: &mut Env<S::Value>) -> Result<Cands<S::Value>> {
        let b = &blk.order[i];
        if self.pinned.is_some_and(|p| p.contains_key(&b.name)) {
            return self.candidates_plain(b);
        }
        let Some(eq) = blk.solver[i] else {
            return self.domain(b.sort);
        };
        let later: Vec<String> = blk.order[i + 1..].iter().filter(|b| b.sort == Sort::K).map(|b| b.name.clone()).collect();
        self.tick()?;
        let solved = self.sem.solve(eq, &b.name, env, &later)?;
        match solved {
            // With every other variable bound the solution is unique.
            Some(v) if later.is_empty() => Ok(Cands { shared: Rc::new(vec![v]), extra: None, complete: true }),
            Some(v) => {
                let dom = self.domain(b.sort)?;
                Ok(Cands { extra: Some(v), complete: false, ..dom })
            }
            None => self.domain(b.sort),
        }
    }

    /// Depth-first search for a satisfying assignment of the block; returns
    /// the block bindings and the witnesses of nested conjuncts.
    #[allow(clippy::type_complexity)]
    fn search(
        &mut self,
        blk: &Block<'_, S::Atom>,
        i: usize,
        env: &mut Env<S::Value>,
        status: K4,
        agg: &mut BlockAgg,
    ) -> Result<Option<(Witness<S::Value>, Witness<S::Value>)>> {
        let cands = self.candidates(blk, i, env)?;
        if !cands.complete {
            agg.incomplete = true;
        }
        let b = &blk.order[i];
        'cand: for v in cands.iter() {
            self.tick()?;
            env.push(&b.name, v.clone());
            let mut st = status;
            let mut wit = Vec::new();
            for c in &blk.ready[i] {
                let (r, w) = match self.eval(c, env) {
                    Ok(x) => x,
                    Err(e) => {
                        env.pop();
                        return Err(e);
                    }
                };
                if r == K4::F {
                    env.pop();
                    continue 'cand;
                }
                st = st.max(r);
                wit.extend(w);
                if st == K4::B && !blk.may_unknown {
                    agg.any_b = true;
                    env.pop();
                    continue 'cand;
                }
            }
            let res = if i + 1 == blk.order.len() {
                match st {
                    K4::T => Some((vec![], vec![])),
                    K4::U => {
                        agg.any_u = true;
                        None
                    }
                    _ => {
                        agg.any_b = true;
                        None
                    }
                }
            } else {
                match self.search(blk, i + 1, env, st, agg) {
                    Ok(r) => r,
                    Err(e) => {
                        env.pop();
                        return Err(e);
                    }
                }
            };
            env.pop();
            if let Some((mut bind, mut nested)) = res {
                bind.push((b.name.clone(), v.clone()));
                wit.append(&mut nested);
                return Ok(Some((bind, wit)));
            }
        }
        Ok(None)
    }
}

fn flatten_and<'f, A>(f: &'f Formula<A>, out: &mut Vec<&'f Formula<A>>) {
    match f {
        Formula::And(gs) => gs.iter().for_each(|g| flatten_and(g, out)),
        _ => out.push(f),
    }
}

/// Evaluates a sentence of either language under `sem`.
pub fn evaluate<S: Semantics>(sem: &S, phi: &Formula<S::Atom>, cfg: &EvalConfig) -> Result<Outcome<S::Value>> {
    run(sem, phi, cfg, None)
}

fn run<S: Semantics>(
    sem: &S,
    phi: &Formula<S::Atom>,
    cfg: &EvalConfig,
    pinned: Option<&HashMap<String, S::Value>>,
) -> Result<Outcome<S::Value>> {
    if let Some(v) = phi.free_vars().into_iter().next() {
        return Err(Error::Sort(format!("{v} is free; only sentences can be evaluated")));
    }
    let mut ev = Evaluator { sem, steps: 0, budget: cfg.budget, pinned, domains: HashMap::new() };
    let (r, w) = ev.eval(phi, &mut Env::new())?;
    Ok(match r {
        K4::T => Outcome {
            result: TriBool::True(w.iter().map(|(n, v)| (n.clone(), sem.render(v))).collect()),
            assignment: w,
        },
        K4::F | K4::B => Outcome { result: TriBool::FalseWithinRadius(cfg.radius), assignment: vec![] },
        K4::U => Outcome { result: TriBool::Unknown(cfg.radius), assignment: vec![] },
    })
}

/// Re-evaluates `phi` with every witnessed variable pinned to its value.
pub fn check_witness<S: Semantics>(sem: &S, phi: &Formula<S::Atom>, witness: &[(String, S::Value)], cfg: &EvalConfig) -> Result<bool> {
    let pinned: HashMap<String, S::Value> = witness.iter().cloned().collect();
    Ok(run(sem, phi, cfg, Some(&pinned))?.result.is_true())
}

// The hyperfield side.

/// H_{ν,n} with quantifiers over {0} and the classes of valuation in [−V, V].
pub struct VhfModel<'a> {
    pub h: &'a Hyperfield,
    pub radius: i64,
}

impl VhfModel<'_> {
    fn term(&self, t: &VhfTerm, env: &Env<HfClass>) -> Result<HfClass> {
        Ok(match t {
            VhfTerm::Zero => self.h.zero(),
            VhfTerm::One => self.h.one(),
            VhfTerm::PHat => self.h.p_class(),
            VhfTerm::Var(v) => *env.get(v).ok_or_else(|| unbound(v))?,
            VhfTerm::Mul(a, b) => self.h.mul(&self.term(a, env)?, &self.term(b, env)?),
            VhfTerm::Pow(a, k) => self.h.pow(&self.term(a, env)?, *k),
        })
    }
}

impl Semantics for VhfModel<'_> {
    type Atom = VhfAtom;
    type Value = HfClass;

    fn domain(&self, sort: Sort) -> Result<(Vec<HfClass>, bool)> {
        match sort {
            Sort::H => Ok((self.h.window(self.radius), false)),
            other => Err(Error::Sort(format!("sort {other:?} does not occur in the hyperfield language"))),
        }
    }

    fn atom(&self, a: &VhfAtom, env: &Env<HfClass>) -> Result<bool> {
        Ok(match a {
            VhfAtom::Plus(x, y, z) => {
                let s = self.h.multiadd(&self.term(x, env)?, &self.term(y, env)?);
                self.h.sum_contains(&s, &self.term(z, env)?)
            }
            VhfAtom::Divides(x, y) => {
                le_inf(self.term(x, env)?.valuation(), self.term(y, env)?.valuation())
            }
            VhfAtom::Eq(x, y) => self.term(x, env)? == self.term(y, env)?,
        })
    }

    fn render(&self, v: &HfClass) -> String {
        format!("[{}]", self.h.render_class(v))
    }
}

/// a ≤ b on Γ ∪ {∞}, with `None` for ∞.
fn le_inf(a: Option<i64>, b: Option<i64>) -> bool {
    match (a, b) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(a), Some(b)) => a <= b,
    }
}

fn lt_inf(a: Option<i64>, b: Option<i64>) -> bool {
    match (a, b) {
        (None, _) => false,
        (Some(_), None) => true,
        (Some(a), Some(b)) => a < b,
    }
}

// The valued-field side.

/// Values of the three sorts; `G(None)` is ∞.
#[derive(Clone, Debug)]
pub enum ValValue {
    K(KElem),
    R(ResElem),
    G(Option<i64>),
}

/// (K, ν) with field quantifiers over 0 and the canonical representatives of
/// the classes of H_{ν,n} with valuation in [−V, V], lifted to the working
/// precision; residue quantifiers over all of k; value-group quantifiers over
/// ∞ and [−V, V].
pub struct ValModel<'a> {
    pub h: &'a Hyperfield,
    pub radius: i64,
}

impl ValModel<'_> {
    fn k(&self, t: &FTerm, env: &Env<ValValue>) -> Result<KElem> {
        let field = self.h.field();
        Ok(match t {
            FTerm::Var(v) => match env.get(v) {
                Some(ValValue::K(x)) => x.clone(),
                Some(_) => return Err(Error::Sort(format!("{v} is not a field variable"))),
                None => return Err(unbound(v)),
            },
            FTerm::Int(n) => KElem::from_int(field, n.clone()),
            FTerm::P => KElem::from_int(field, field.p().clone()),
            FTerm::Add(a, b) => self.k(a, env)?.add(&self.k(b, env)?)?,
            FTerm::Sub(a, b) => self.k(a, env)?.sub(&self.k(b, env)?)?,
            FTerm::Mul(a, b) => self.k(a, env)?.mul(&self.k(b, env)?)?,
            FTerm::Neg(a) => self.k(a, env)?.neg(),
            FTerm::Pow(a, e) => self.k(a, env)?.pow(*e)?,
        })
    }

    fn r(&self, t: &RTerm, env: &Env<ValValue>) -> Result<ResElem> {
        let k = self.h.field().residue_field();
        Ok(match t {
            RTerm::Var(v) => match env.get(v) {
                Some(ValValue::R(x)) => x.clone(),
                Some(_) => return Err(Error::Sort(format!("{v} is not a residue variable"))),
                None => return Err(unbound(v)),
            },
            RTerm::Int(n) => k.from_int(n),
            RTerm::Res(a) => {
                let x = self.k(a, env)?;
                // res is extended by 0 outside the valuation ring.
                if x.valuation_or_inf().is_some_and(|v| v < 0) {
                    k.zero()
                } else {
                    x.residue()?
                }
            }
            RTerm::Add(a, b) => k.add(&self.r(a, env)?, &self.r(b, env)?),
            RTerm::Sub(a, b) => k.sub(&self.r(a, env)?, &self.r(b, env)?),
            RTerm::Mul(a, b) => k.mul(&self.r(a, env)?, &self.r(b, env)?),
            RTerm::Neg(a) => k.neg(&self.r(a, env)?),
            RTerm::Pow(a, e) => k.pow(&self.r(a, env)?, &BigInt::from(*e)),
        })
    }

    fn g(&self, t: &GTerm, env: &Env<ValValue>) -> Result<Option<i64>> {
        Ok(match t {
            GTerm::Var(v) => match env.get(v) {
                Some(ValValue::G(x)) => *x,
                Some(_) => return Err(Error::Sort(format!("{v} is not a value-group variable"))),
                None => return Err(unbound(v)),
            },
            GTerm::Zero => Some(0),
            GTerm::Inf => None,
            GTerm::Nu(a) => self.k(a, env)?.valuation_or_inf(),
            GTerm::Add(a, b) => match (self.g(a, env)?, self.g(b, env)?) {
                (Some(x), Some(y)) => Some(x + y),
                _ => None,
            },
        })
    }
}

impl Semantics for ValModel<'_> {
    type Atom = ValAtom;
    type Value = ValValue;

    fn domain(&self, sort: Sort) -> Result<(Vec<ValValue>, bool)> {
        match sort {
            Sort::K => Ok((
                self.h.window(self.radius).iter().map(|c| ValValue::K(self.h.representative(c))).collect(),
                false,
            )),
            Sort::R => {
                let k = self.h.field().residue_field();
                let all = k.elements().ok_or_else(|| Error::BudgetExceeded("residue field too large to enumerate".into()))?;
                Ok((all.into_iter().map(ValValue::R).collect(), true))
            }
            Sort::G => {
                let mut out = vec![ValValue::G(None)];
                out.extend((-self.radius..=self.radius).map(|v| ValValue::G(Some(v))));
                Ok((out, false))
            }
            Sort::H => Err(Error::Sort("the hyperfield sort does not occur in the valued-field language".into())),
        }
    }

    fn atom(&self, a: &ValAtom, env: &Env<ValValue>) -> Result<bool> {
        Ok(match a {
            ValAtom::EqK(x, y) => self.k(x, env)?.sub(&self.k(y, env)?)?.is_zero_at_precision(),
            ValAtom::EqR(x, y) => {
                let k = self.h.field().residue_field();
                k.is_zero(&k.sub(&self.r(x, env)?, &self.r(y, env)?))
            }
            ValAtom::EqG(x, y) => self.g(x, env)? == self.g(y, env)?,
            ValAtom::LtG(x, y) => lt_inf(self.g(x, env)?, self.g(y, env)?),
            ValAtom::LeG(x, y) => le_inf(self.g(x, env)?, self.g(y, env)?),
        })
    }

    fn affine_in(&self, a: &ValAtom, x: &str) -> bool {
        matches!(a, ValAtom::EqK(l, r) if l.degree_in(x).max(r.degree_in(x)) == 1)
    }

    fn solve(&self, a: &ValAtom, x: &str, env: &mut Env<ValValue>, zeros: &[String]) -> Result<Option<ValValue>> {
        let ValAtom::EqK(l, r) = a else { return Ok(None) };
        let field = self.h.field();
        for z in zeros {
            env.push(z, ValValue::K(KElem::zero(field)));
        }
        // The difference l − r is a + b·x.
        let at = |t: i64, env: &mut Env<ValValue>| -> Result<KElem> {
            env.push(x, ValValue::K(KElem::from_int(field, t)));
            let d = self.k(l, env).and_then(|lv| Ok(lv.sub(&self.k(r, env)?)?));
            env.pop();
            d
        };
        let d0 = at(0, env);
        let d1 = at(1, env);
        for _ in zeros {
            env.pop();
        }
        let (a0, a1) = (d0?, d1?);
        let b = a1.sub(&a0)?;
        if b.is_zero_at_precision() {
            return Ok(None);
        }
        Ok(Some(ValValue::K(a0.neg().div(&b)?)))
    }

    fn render(&self, v: &ValValue) -> String {
        match v {
            ValValue::K(x) => x.render(),
            ValValue::R(x) => self.h.field().residue_field().render(x),
            ValValue::G(None) => "inf".into(),
            ValValue::G(Some(g)) => g.to_string(),
        }
    }
}

fn check_radius(h: &Hyperfield, cfg: &EvalConfig) -> Result<()> {
    if cfg.radius < i64::from(h.level()) {
        return Err(Error::InvalidInput(format!("radius {} is below the level {}", cfg.radius, h.level())));
    }
    Ok(())
}

pub fn eval_vhf(phi: &VhfFormula, h: &Hyperfield, cfg: &EvalConfig) -> Result<Outcome<HfClass>> {
    check_radius(h, cfg)?;
    evaluate(&VhfModel { h, radius: cfg.radius }, phi, cfg)
}

/// Evaluates on the field of `h`, quantifying over representatives of the
/// classes of `h`.
pub fn eval_val(phi: &ValFormula, h: &Hyperfield, cfg: &EvalConfig) -> Result<Outcome<ValValue>> {
    check_radius(h, cfg)?;
    evaluate(&ValModel { h, radius: cfg.radius }, phi, cfg)
}
