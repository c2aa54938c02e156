//! Exhaustive checks of the hyperfield and valued-hyperfield axioms on a
//! valuation window.
//!
//! Triple axioms are invariant under multiplying all three arguments by a
//! nonzero class (exact distributivity, itself checked as `hf.scaling`), so
//! every triple over E_V = {0} ∪ {|ν| ≤ V} is equivalent to one of
//! (1, β, γ), (0, 1, γ), (0, 0, γ) with β, γ in E_{2V}; those are checked
//! exhaustively.

use std::collections::{HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Error;
use crate::hyperfield::{Disc, HfClass, Hyperfield};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomResult {
    pub axiom: String,
    pub status: Status,
    pub witness: Option<String>,
    pub checked: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub level: u32,
    pub window: i64,
    /// Every sum α+β is a closed ball of radius rho + min(ν(α), ν(β)).
    pub rho: i64,
    pub ball_type: &'static str,
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.status == Status::Pass)
    }

    /// The first failure as an error.
    pub fn first_failure(&self) -> Option<Error> {
        self.results.iter().find(|r| r.status == Status::Fail).map(|r| Error::AxiomViolation {
            axiom: r.axiom.clone(),
            witness: r.witness.clone().unwrap_or_default(),
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AxiomBudget {
    /// Valuation window V.
    pub window: i64,
    /// Random unnormalized triples drawn from E_V.
    pub samples: usize,
    /// Triples cross-checked by explicit set enumeration.
    pub enum_samples: usize,
    pub seed: u64,
}

impl AxiomBudget {
    /// Window 2n+2.
    pub fn default_for(n: u32) -> Self {
        AxiomBudget { window: 2 * n as i64 + 2, samples: 2000, enum_samples: 24, seed: 0 }
    }
}

struct Check<'a> {
    h: &'a Hyperfield,
    axiom: &'static str,
    checked: u64,
    witness: Option<String>,
}

impl<'a> Check<'a> {
    fn new(h: &'a Hyperfield, axiom: &'static str) -> Self {
        Check { h, axiom, checked: 0, witness: None }
    }

    /// Records one instance; keeps the first failing witness.
    fn expect(&mut self, ok: bool, args: &[&HfClass]) {
        self.checked += 1;
        if !ok && self.witness.is_none() {
            let parts: Vec<String> = args.iter().map(|a| self.h.render_class(a)).collect();
            self.witness = Some(format!("({})", parts.join(", ")));
        }
    }

    fn done(self) -> AxiomResult {
        AxiomResult {
            axiom: self.axiom.into(),
            status: if self.witness.is_none() { Status::Pass } else { Status::Fail },
            witness: self.witness,
            checked: self.checked,
        }
    }
}

/// Representatives of all triples up to scaling, over E_{2V}.
fn normalized_triples(h: &Hyperfield, v: i64) -> (Vec<HfClass>, Vec<(HfClass, HfClass, HfClass)>) {
    let wide = h.window(2 * v);
    let mut heads = Vec::new();
    heads.push((HfClass::Zero, HfClass::Zero, HfClass::Zero));
    heads.push((HfClass::Zero, HfClass::Zero, h.one()));
    for g in &wide {
        heads.push((HfClass::Zero, h.one(), *g));
    }
    (wide, heads)
}

/// Unit classes that generate (O/m^n)^× under multiplication.
pub fn unit_generators(h: &Hyperfield) -> Vec<u32> {
    let size = h.unit_count();
    let mut seen = vec![false; size];
    seen[h.one_index() as usize] = true;
    let mut reached = vec![h.one_index()];
    let mut gens = Vec::new();
    for cand in 0..size as u32 {
        if seen[cand as usize] {
            continue;
        }
        gens.push(cand);
        let mut queue: VecDeque<u32> = reached.iter().copied().collect();
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let y = h.unit_mul(x, *g);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    reached.push(y);
                    queue.push_back(y);
                }
            }
        }
        if reached.len() == size {
            break;
        }
    }
    gens
}

fn assoc(h: &Hyperfield, a: &HfClass, b: &HfClass, c: &HfClass) -> bool {
    let left = h.disc_add(&h.disc_add(&h.disc_of(a), &h.disc_of(b)), &h.disc_of(c));
    let right = h.disc_add(&h.disc_of(a), &h.disc_add(&h.disc_of(b), &h.disc_of(c)));
    left == right
}

fn distrib(h: &Hyperfield, a: &HfClass, b: &HfClass, c: &HfClass) -> bool {
    let left = h.disc_scale(&h.disc_add(&h.disc_of(a), &h.disc_of(b)), c);
    let right = h.disc_add(&h.disc_of(&h.mul(a, c)), &h.disc_of(&h.mul(b, c)));
    h.disc_subset(&left, &right)
}

fn reversible(h: &Hyperfield, a: &HfClass, b: &HfClass, c: &HfClass) -> bool {
    let s1 = h.disc_add(&h.disc_of(b), &h.disc_of(&h.neg(c)));
    let s2 = h.disc_add(&h.disc_of(a), &h.disc_of(c));
    h.disc_contains(&s1, a) == h.disc_contains(&s2, b)
}

/// Members of D with valuation ≤ cutoff, plus Zero if D contains it.
fn members_upto(h: &Hyperfield, d: &Disc, cutoff: i64) -> Vec<HfClass> {
    let ball = h.disc_to_ball(d);
    let r = ball.radius(h.level()).unwrap_or(cutoff);
    h.sum_members(&ball, cutoff.max(r))
        .expect("cutoff at least the radius")
        .into_iter()
        .filter(|c| c.valuation().is_none_or(|v| v <= cutoff))
        .collect()
}

/// (α+β)+γ computed as the union of δ+γ over members δ of α+β.
fn assoc_by_enumeration(h: &Hyperfield, a: &HfClass, b: &HfClass, c: &HfClass) -> bool {
    let n = h.level() as i64;
    let top = [a, b, c].iter().filter_map(|x| x.valuation()).max().unwrap_or(0);
    let cutoff = top + n + 1;
    let ab = h.disc_add(&h.disc_of(a), &h.disc_of(b));
    let mut union: HashSet<HfClass> = HashSet::new();
    for d in members_upto(h, &ab, cutoff) {
        let s = h.disc_add(&h.disc_of(&d), &h.disc_of(c));
        union.extend(members_upto(h, &s, cutoff));
    }
    let direct: HashSet<HfClass> = members_upto(h, &h.disc_add(&ab, &h.disc_of(c)), cutoff)
        .into_iter()
        .collect();
    union == direct
}

pub fn check_hyperfield_axioms(h: &Hyperfield, budget: &AxiomBudget) -> AxiomReport {
    let v = budget.window;
    let n = h.level();
    let win = h.window(v);
    let mut results = Vec::new();

    let mut group = Check::new(h, "hf.mult_group");
    let size = h.unit_count() as u32;
    for a in 0..size {
        let x = HfClass::NonZero { val: 0, unit: a };
        let inv = h.inv(&x).expect("nonzero");
        group.expect(h.mul(&x, &inv) == h.one() && h.mul(&x, &h.one()) == x, &[&x]);
        for b in 0..size {
            let y = HfClass::NonZero { val: 1, unit: b };
            group.expect(h.mul(&x, &y) == h.mul(&y, &x), &[&x, &y]);
            if size <= 128 {
                for c in 0..size {
                    let z = HfClass::NonZero { val: -1, unit: c };
                    group.expect(
                        h.mul(&h.mul(&x, &y), &z) == h.mul(&x, &h.mul(&y, &z)),
                        &[&x, &y, &z],
                    );
                }
            }
        }
    }
    results.push(group.done());

    let mut zero_mul = Check::new(h, "hf.a");
    for a in &win {
        zero_mul.expect(h.mul(&HfClass::Zero, a) == HfClass::Zero, &[a]);
    }
    results.push(zero_mul.done());

    let mut scaling = Check::new(h, "hf.scaling");
    let mut scalars: Vec<HfClass> = unit_generators(h)
        .into_iter()
        .map(|u| HfClass::NonZero { val: 0, unit: u })
        .collect();
    scalars.push(h.pi_class());
    scalars.push(h.inv(&h.pi_class()).expect("nonzero"));
    for a in &win {
        for b in &win {
            let s = h.disc_add(&h.disc_of(a), &h.disc_of(b));
            for g in &scalars {
                let scaled = h.disc_scale(&s, g);
                let direct = h.disc_add(&h.disc_of(&h.mul(a, g)), &h.disc_of(&h.mul(b, g)));
                scaling.expect(scaled == direct, &[a, b, g]);
            }
        }
    }
    results.push(scaling.done());

    let (wide, heads) = normalized_triples(h, v);
    let one = h.one();
    let mut assoc_c = Check::new(h, "hf.b");
    let mut dist_c = Check::new(h, "hf.d");
    let mut rev_c = Check::new(h, "hf.g");
    for b in &wide {
        for c in &wide {
            assoc_c.expect(assoc(h, &one, b, c), &[&one, b, c]);
            dist_c.expect(distrib(h, &one, b, c), &[&one, b, c]);
            rev_c.expect(reversible(h, &one, b, c), &[&one, b, c]);
        }
    }
    for (a, b, c) in &heads {
        assoc_c.expect(assoc(h, a, b, c), &[a, b, c]);
        dist_c.expect(distrib(h, a, b, c), &[a, b, c]);
        rev_c.expect(reversible(h, a, b, c), &[a, b, c]);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let pick = |rng: &mut ChaCha8Rng| win[rng.gen_range(0..win.len())];
    for _ in 0..budget.samples {
        let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        assoc_c.expect(assoc(h, &a, &b, &c), &[&a, &b, &c]);
        dist_c.expect(distrib(h, &a, &b, &c), &[&a, &b, &c]);
        rev_c.expect(reversible(h, &a, &b, &c), &[&a, &b, &c]);
    }
    let mut enum_c = Check::new(h, "hf.b.enumeration");
    for _ in 0..budget.enum_samples {
        let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        enum_c.expect(assoc_by_enumeration(h, &a, &b, &c), &[&a, &b, &c]);
    }

    let mut comm = Check::new(h, "hf.c");
    let mut ident = Check::new(h, "hf.e");
    let mut inverse = Check::new(h, "hf.f");
    for a in &win {
        ident.expect(h.multiadd(a, &HfClass::Zero) == crate::hyperfield::HfSumBall::Single(*a), &[a]);
        let na = h.neg(a);
        for b in &win {
            comm.expect(h.multiadd(a, b) == h.multiadd(b, a), &[a, b]);
            let has_zero = h.multiadd(a, b).contains_zero();
            inverse.expect(has_zero == (*b == na), &[a, b]);
        }
    }
    results.push(assoc_c.done());
    results.push(enum_c.done());
    results.push(comm.done());
    results.push(dist_c.done());
    results.push(ident.done());
    results.push(inverse.done());
    results.push(rev_c.done());

    AxiomReport { level: n, window: v, rho: n as i64, ball_type: "closed", results }
}

pub fn check_valued_axioms(h: &Hyperfield, budget: &AxiomBudget) -> AxiomReport {
    let v = budget.window;
    let n = h.level() as i64;
    let win = h.window(v);
    let mut va = Check::new(h, "vhf.a");
    let mut vb = Check::new(h, "vhf.b");
    let mut vc = Check::new(h, "vhf.c");
    let mut vd = Check::new(h, "vhf.d");
    let mut ve = Check::new(h, "vhf.e");
    for a in &win {
        va.expect(a.valuation().is_none() == a.is_zero(), &[a]);
        for b in &win {
            let prod = h.mul(a, b);
            let expected = match (a.valuation(), b.valuation()) {
                (Some(x), Some(y)) => Some(x + y),
                _ => None,
            };
            vb.expect(prod.valuation() == expected, &[a, b]);

            let s = h.multiadd(a, b);
            let min = match (a.valuation(), b.valuation()) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            };
            let radius = s.radius(h.level());
            let members = match radius {
                Some(r) => h.sum_members(&s, r).expect("cutoff equals radius"),
                None => vec![HfClass::Zero],
            };
            let ok_c = members
                .iter()
                .all(|m| match (m.valuation(), min) {
                    (Some(x), Some(lo)) => x >= lo,
                    (None, _) => true,
                    (Some(_), None) => false,
                });
            vc.expect(ok_c, &[a, b]);
            if !s.contains_zero() {
                let vals: HashSet<Option<i64>> = members.iter().map(|m| m.valuation()).collect();
                vd.expect(vals.len() == 1, &[a, b]);
            }
            ve.expect(radius == min.map(|m| m + n), &[a, b]);
        }
    }
    AxiomReport {
        level: h.level(),
        window: v,
        rho: n,
        ball_type: "closed",
        results: vec![va.done(), vb.done(), vc.done(), vd.done(), ve.done()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldDef, FieldModel};
    use std::sync::Arc;

    #[test]
    fn q5_level1_passes() {
        let k = Arc::new(FieldModel::new(FieldDef::simple(5, &[-5, 1], 12)).unwrap());
        let h = Hyperfield::new(k, 1).unwrap();
        let budget = AxiomBudget { window: 3, ..AxiomBudget::default_for(1) };
        let r = check_hyperfield_axioms(&h, &budget);
        assert!(r.all_pass(), "{:?}", r.first_failure());
        let r = check_valued_axioms(&h, &budget);
        assert!(r.all_pass(), "{:?}", r.first_failure());
        assert_eq!(r.rho, 1);
    }

    #[test]
    fn generators_cover_the_group() {
        let k = Arc::new(FieldModel::new(FieldDef::simple(2, &[-2, 1], 12)).unwrap());
        let h = Hyperfield::new(k, 3).unwrap();
        assert_eq!(unit_generators(&h).len(), 2);
    }
}
