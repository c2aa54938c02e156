//! Acceptance suite: one PASS/FAIL line per criterion. Every comparison is
//! exact unless a tolerance constant below says otherwise.

#[path = "../../core/tests/support/brute.rs"]
mod brute;

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use brute::{brute_sum, BClass, BKey, Ring};
use hyperval_core::axioms::{check_hyperfield_axioms, check_valued_axioms, AxiomBudget, Status};
use hyperval_core::gauss::{p_independent_check, pbasis_assemble, pbasis_expand_t, GaussElem, MAX_DEGREE};
use hyperval_core::hyperfield::{HfClass, Hyperfield};
use hyperval_core::morphisms::{
    check_hom, lift_tame, lift_wild, search_isos, verify_induces, HomBudget, HomSpec, KrasnerF2, Presented,
    DEFAULT_UNIT_CAP,
};
use hyperval_core::ramification::{conjugate_difference_m, d_of, eisenstein_poly, krasner_refine, n_threshold};
use hyperval_core::representatives::{
    cohen_expand, digit_assemble, digit_expand, lambda_from_lift, p_power_congruence_check,
};
use hyperval_core::{FieldDef, FieldElem, FieldModel};
use hyperval_logic::{agreement_harness, eval_val, eval_vhf, generate_corpus, parse_vhf, translate, EvalConfig, TriBool};

/// Runtime ceiling for criterion 1.
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(60);
/// Highest valuation at which library and brute-force sums are compared.
const ORACLE_CUTOFF: u32 = 3;
const LAMBDA_PAIRS: usize = 50;
const CONGRUENCE_PAIRS: usize = 500;
const CONGRUENCE_IMAX: u32 = 4;
const EXPANSION_MAX_LEVEL: u32 = 6;
const GAUSS_FRACTIONS: usize = 100;
const TAME_SAMPLES: usize = 100;
const WILD_PRECISION: u32 = 40;
const WILD_NEWTON_MAX: u32 = 8;
const CORPUS_SIZE: usize = 50;
const CORPUS_RADIUS: i64 = 4;
const AKE_RADIUS: i64 = 6;

const GRID: &[(i64, &[i64])] = &[(2, &[-2, 1]), (3, &[-3, 1]), (5, &[-5, 1]), (2, &[-2, 0, 1]), (5, &[-5, 0, 1])];

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn field(p: i64, eis: &[i64], prec: u32) -> Arc<FieldModel> {
    Arc::new(FieldModel::new(FieldDef::simple(p, eis, prec)).unwrap())
}

fn grid_hyperfield(p: i64, eis: &[i64], n: u32) -> Hyperfield {
    let e = (eis.len() - 1) as u32;
    Hyperfield::new(field(p, eis, 4 * e + n + 8), n).unwrap()
}

/// W(F_4) with h = X^2 + X + 1 and π = 2.
fn unramified_f4(prec: u32) -> Arc<FieldModel> {
    let w = |c: i64| vec![BigInt::from(c), BigInt::from(0)];
    let def = FieldDef {
        p: BigInt::from(2),
        f: 2,
        e: 1,
        eis: vec![w(-2), w(1)],
        h: vec![BigInt::from(1), BigInt::from(1), BigInt::from(1)],
        prec,
        n: None,
    };
    Arc::new(FieldModel::new(def).unwrap())
}

fn presented(p: i64, eis: &[i64], n: u32, prec: u32) -> Arc<Presented> {
    Arc::new(Presented::from_field(field(p, eis, prec), n, DEFAULT_UNIT_CAP).unwrap())
}

fn to_bclass(h: &Hyperfield, c: &HfClass) -> BClass {
    match c {
        HfClass::Zero => None,
        HfClass::NonZero { val, unit } => {
            let coeffs = h.unit_elem(*unit).coeffs().iter().map(|x| i64::try_from(x).unwrap()).collect();
            Some((u32::try_from(*val).expect("normalized pair"), coeffs))
        }
    }
}

fn to_key(ring: &Ring, h: &Hyperfield, c: &HfClass) -> BKey {
    match to_bclass(h, c) {
        None => BKey::Zero,
        Some((w, u)) => {
            let z = ring.mul(&ring.pi_pow(w), &ring.from_coeffs(&u));
            BKey::Class(w, ring.canon(&z, w + h.level()))
        }
    }
}

/// Pairs up to scaling, the smaller valuation normalized to 0; scaling
/// covers every pair whose valuations lie in ±v/2.
fn normalized_pairs(h: &Hyperfield, v: i64) -> Vec<(HfClass, HfClass)> {
    let one = h.one();
    let mut pairs = vec![(HfClass::Zero, HfClass::Zero), (HfClass::Zero, one), (one, HfClass::Zero)];
    for b in h.window(v) {
        match b.valuation() {
            None => {}
            Some(w) if w >= 0 => pairs.push((one, b)),
            Some(_) => pairs.push((h.inv(&b).unwrap(), one)),
        }
    }
    pairs
}

fn c1_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut compared = 0usize;
    for &(p, eis) in GRID {
        for n in 1..=3u32 {
            let h = grid_hyperfield(p, eis, n);
            let ring = Ring::new(p, eis, n + ORACLE_CUTOFF + 1);
            for (a, b) in normalized_pairs(&h, 2 * (2 * n as i64 + 2)) {
                let s = h.multiadd(&a, &b);
                let r = s.radius(n).unwrap_or(0).max(ORACLE_CUTOFF as i64);
                let lib: BTreeSet<BKey> = h
                    .sum_members(&s, r)
                    .map_err(|e| e.to_string())?
                    .iter()
                    .filter(|c| c.valuation().is_none_or(|w| w <= ORACLE_CUTOFF as i64))
                    .map(|c| to_key(&ring, &h, c))
                    .collect();
                let oracle =
                    brute_sum(&ring, n, &to_bclass(&h, &a), &to_bclass(&h, &b), ORACLE_CUTOFF, ORACLE_CUTOFF);
                ensure(lib == oracle, || {
                    format!("p={p} eis={eis:?} n={n}: {} + {}", h.render_class(&a), h.render_class(&b))
                })?;
                compared += 1;
            }
        }
    }
    let t = start.elapsed();
    ensure(t < ORACLE_TIME_LIMIT, || format!("took {t:?}"))?;
    Ok(format!("{compared} normalized sums equal the coset oracle, {:.1}s", t.as_secs_f64()))
}

fn c2_axioms() -> Outcome {
    let mut instances = 0u64;
    for &(p, eis) in GRID {
        for n in 1..=3u32 {
            let h = grid_hyperfield(p, eis, n);
            let budget = AxiomBudget::default_for(n);
            for r in [check_hyperfield_axioms(&h, &budget), check_valued_axioms(&h, &budget)] {
                ensure(r.rho == n as i64, || format!("rho = {} at n = {n}", r.rho))?;
                if let Some(e) = r.first_failure() {
                    return Err(format!("p={p} eis={eis:?} n={n}: {e}"));
                }
                instances += r.results.iter().map(|x| x.checked).sum::<u64>();
            }
        }
    }
    Ok(format!("hyperfield (a)-(g) and valued (a)-(e) pass on 15 hyperfields, {instances} instances"))
}

/// F_q on coefficient vectors; F_4 uses x^2 = x + 1.
struct Fq {
    p: i64,
    f: usize,
}

impl Fq {
    fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| (x + y).rem_euclid(self.p)).collect()
    }

    fn mul(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        if self.f == 1 {
            return vec![(a[0] * b[0]).rem_euclid(self.p)];
        }
        let (c0, c1, c2) = (a[0] * b[0], a[0] * b[1] + a[1] * b[0], a[1] * b[1]);
        vec![(c0 + c2).rem_euclid(2), (c1 + c2).rem_euclid(2)]
    }
}

fn c3_residue_iso() -> Outcome {
    let fields = [field(2, &[-2, 1], 8), field(3, &[-3, 1], 8), field(5, &[-5, 1], 8), unramified_f4(8)];
    let mut sizes = Vec::new();
    for k in fields {
        let fq = Fq { p: i64::try_from(k.p()).unwrap(), f: k.f() };
        let h = Hyperfield::new(k, 1).unwrap();
        let table = h.residue_iso_level1().map_err(|e| e.to_string())?;
        let res = |c: &HfClass| -> Vec<i64> {
            let r = &table.iter().find(|(x, _)| x == c).unwrap().1;
            let mut v: Vec<i64> = r.iter().map(|x| i64::try_from(x).unwrap()).collect();
            v.resize(fq.f, 0);
            v
        };
        let q = fq.p.pow(fq.f as u32);
        ensure(table.len() as i64 == q, || format!("{} classes for F_{q}", table.len()))?;
        let images: BTreeSet<Vec<i64>> = table.iter().map(|(c, _)| res(c)).collect();
        ensure(images.len() == table.len(), || format!("not injective over F_{q}"))?;
        for (a, _) in &table {
            for (b, _) in &table {
                ensure(res(&h.mul(a, b)) == fq.mul(&res(a), &res(b)), || format!("product over F_{q}"))?;
                let s = h.multiadd(a, b);
                let units: Vec<HfClass> = h
                    .sum_members(&s, s.radius(1).unwrap_or(0).max(0))
                    .map_err(|e| e.to_string())?
                    .into_iter()
                    .filter(|c| c.valuation().is_none_or(|v| v == 0))
                    .collect();
                ensure(units.len() == 1 && res(&units[0]) == fq.add(&res(a), &res(b)), || {
                    format!("sum over F_{q}: {} + {}", h.render_class(a), h.render_class(b))
                })?;
            }
        }
        sizes.push(format!("F_{q}"));
    }
    Ok(format!("exhaustive tables for {}", sizes.join(", ")))
}

fn ints(a: &FieldElem) -> Vec<i64> {
    a.coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect()
}

fn ring_pow(ring: &Ring, a: &[i64], k: u64) -> Vec<i64> {
    (0..k).fold(ring.from_coeffs(&[1]), |acc, _| ring.mul(&acc, a))
}

fn ring_gap(ring: &Ring, x: &[i64], y: &[i64]) -> Option<u32> {
    ring.valuation(&ring.add(x, &ring.neg(y)))
}

/// a and a + π·c: congruent modulo m.
fn close_pair(k: &Arc<FieldModel>, prec: u32, rng: &mut ChaCha8Rng) -> (FieldElem, FieldElem) {
    let a = FieldElem::random(k, prec, rng);
    let c = FieldElem::random(k, prec, rng);
    let b = a.add(&FieldElem::pi(k).mul(&c).unwrap()).unwrap();
    (a, b)
}

fn c4_representatives() -> Outcome {
    const PREC: u32 = 12;
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc4);
    let mut fields: Vec<Arc<FieldModel>> = GRID.iter().map(|(p, eis)| field(*p, eis, PREC)).collect();
    fields.push(unramified_f4(PREC));
    for k in &fields {
        let brute = (k.f() == 1).then(|| {
            let eis: Vec<i64> = k.eisenstein().iter().map(|w| i64::try_from(&w[0]).unwrap()).collect();
            Ring::new(i64::try_from(k.p()).unwrap(), &eis, PREC)
        });
        for trial in 0..LAMBDA_PAIRS {
            let l = (trial % 5) as u32;
            let (b1, b2) = close_pair(k, PREC, &mut rng);
            let x = lambda_from_lift(&b1, l).map_err(|e| e.to_string())?;
            let y = lambda_from_lift(&b2, l).map_err(|e| e.to_string())?;
            ensure(x.eq_at_precision(&y), || format!("λ depends on the lift in {}", k.describe()))?;
            if let Some(ring) = &brute {
                let q = (ring.p as u64).pow(l);
                let ox = ring_pow(ring, &ring.from_coeffs(&ints(&b1)), q);
                ensure(ring_gap(ring, &ox, &ring.from_coeffs(&ints(&x))).is_none_or(|v| v > l), || {
                    format!("λ differs from b^(p^{l}) mod m^{} in {}", l + 1, k.describe())
                })?;
            }
        }
    }
    let per_field = CONGRUENCE_PAIRS / GRID.len();
    for (p, eis) in GRID {
        let k = field(*p, eis, PREC);
        let ring = Ring::new(*p, eis, PREC);
        for _ in 0..per_field {
            let (a, b) = close_pair(&k, PREC, &mut rng);
            let report = p_power_congruence_check(&a, &b, CONGRUENCE_IMAX).map_err(|e| e.to_string())?;
            let (ra, rb) = (ring.from_coeffs(&ints(&a)), ring.from_coeffs(&ints(&b)));
            for i in 0..=CONGRUENCE_IMAX {
                let q = (*p as u64).pow(i);
                let gap = ring_gap(&ring, &ring_pow(&ring, &ra, q), &ring_pow(&ring, &rb, q));
                ensure(gap.is_none_or(|v| v > i), || format!("p={p} eis={eis:?} i={i}: gap {gap:?}"))?;
                if let (Some(g), Some(r)) = (gap, report.valuations[i as usize]) {
                    ensure(g == r, || format!("reported valuation {r}, oracle {g}"))?;
                }
            }
        }
    }
    let mut round_trips = 0;
    for k in &fields {
        for l in 0..=EXPANSION_MAX_LEVEL {
            for _ in 0..10 {
                let a = FieldElem::random(k, PREC, &mut rng);
                let d = digit_expand(&a, l).map_err(|e| e.to_string())?;
                let back = digit_assemble(k, &d).map_err(|e| e.to_string())?;
                ensure(back.eq_at_precision(&a.reduce_mod(l + 1).unwrap()), || format!("digit round trip l={l}"))?;
                let w: Vec<BigInt> = (0..k.f()).map(|_| BigInt::from(rng.gen_range(-500i64..500))).collect();
                let a = FieldElem::from_w(k, &w);
                let d = cohen_expand(&a, l).map_err(|e| e.to_string())?;
                let back = digit_assemble(k, &d).map_err(|e| e.to_string())?;
                ensure(back.eq_at_precision(&a.reduce_mod(l + 1).unwrap()), || format!("Cohen round trip l={l}"))?;
                round_trips += 2;
            }
        }
    }
    Ok(format!(
        "{} λ lift pairs, {} congruence pairs up to i={CONGRUENCE_IMAX}, {round_trips} exact round trips for l ≤ {EXPANSION_MAX_LEVEL}",
        LAMBDA_PAIRS * fields.len(),
        per_field * GRID.len()
    ))
}

fn poly_mul(a: &[i64], b: &[i64], m: i64) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y).rem_euclid(m);
        }
    }
    out
}

/// x ≡ y mod m through num_x·den_y − num_y·den_x.
fn cross_equal(x: &GaussElem, y: &GaussElem, m: i64) -> bool {
    let l = poly_mul(x.num(), y.den(), m);
    let r = poly_mul(y.num(), x.den(), m);
    (0..l.len().max(r.len()))
        .all(|i| (l.get(i).copied().unwrap_or(0) - r.get(i).copied().unwrap_or(0)).rem_euclid(m) == 0)
}

fn c5_gauss() -> Outcome {
    for p in [2i64, 3] {
        let t = GaussElem::t(p, 4).unwrap();
        ensure(p_independent_check(&t).map_err(|e| e.to_string())?, || format!("t dependent for p={p}"))?;
        ensure(!p_independent_check(&t.pow(p as u32)).map_err(|e| e.to_string())?, || {
            format!("t^p independent for p={p}")
        })?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc5);
    let mut count = 0;
    for p in [2i64, 3] {
        for l in 0..=2u32 {
            let m = p.pow(l + 1);
            for _ in 0..GAUSS_FRACTIONS {
                let a = loop {
                    let num: Vec<i64> = (0..=rng.gen_range(0..=MAX_DEGREE)).map(|_| rng.gen_range(0..m)).collect();
                    let den: Vec<i64> = (0..=rng.gen_range(0..=MAX_DEGREE)).map(|_| rng.gen_range(0..m)).collect();
                    if let Ok(a) = GaussElem::new(p, l + 1, &num, &den) {
                        break a;
                    }
                };
                let d = pbasis_expand_t(&a, l).map_err(|e| e.to_string())?;
                let back = pbasis_assemble(&d).map_err(|e| e.to_string())?;
                ensure(cross_equal(&a, &back, m), || format!("p={p} l={l}: {}", a.render()))?;
                count += 1;
            }
        }
    }
    Ok(format!("{{t}} p-independent and t^p not, for p = 2, 3; {count} exact round trips"))
}

/// M for X^2 − c with ν_p(c) = 1: the conjugates differ by 2√c.
fn quadratic_m(p: i64) -> Ratio<i64> {
    let two_val = if p == 2 { 1 } else { 0 };
    Ratio::from_integer(two_val) + Ratio::new(1, 2)
}

fn c6_bounds() -> Outcome {
    let table = [((1, 2), 1), ((1, 3), 1), ((1, 5), 1), ((2, 2), 4), ((2, 5), 2), ((6, 3), 12)];
    for ((e, p), want) in table {
        ensure(d_of(e, p) == want, || format!("d({e}) at p={p} is {}, want {want}", d_of(e, p)))?;
    }
    let mut parts = Vec::new();
    for (p, eis, want) in [(5, &[-5, 0, 1], Ratio::new(1, 2)), (2, &[-2, 0, 1], Ratio::new(3, 2))] {
        let k = field(p, eis, 24);
        let r = n_threshold(&k).map_err(|e| e.to_string())?;
        ensure(r.m_p1 == want, || format!("M_p1 = {} for p={p}", r.m_p1))?;
        ensure(r.m_p1 == quadratic_m(p), || "closed form disagrees".into())?;
        let conj = conjugate_difference_m(&k).map_err(|e| e.to_string())?;
        ensure(conj == Some(want), || format!("conjugate difference gives {conj:?}"))?;
        ensure(r.flagged == (p == 2), || format!("d(e)/e^2 flag {} for p={p}", r.flagged))?;
        parts.push(format!("M_p1(Q_{p}(sqrt {p})) = {}", r.m_p1));
    }
    Ok(format!("d(e) table exact; {}; flag raised for Q_2(sqrt 2) only", parts.join(", ")))
}

fn tame_run() -> Result<(String, String), String> {
    let a = presented(5, &[-5, 0, 1], 1, 24);
    let b = presented(5, &[-20, 0, 1], 1, 24);
    let isos = search_isos(&a, &b, 4).map_err(|e| e.to_string())?;
    let f = isos.first().ok_or("no isomorphism")?;
    let lift = lift_tame(f).map_err(|e| e.to_string())?;
    Ok((f.to_json().to_string(), lift.embedding.to_json().to_string()))
}

fn c7_tame_lifting() -> Outcome {
    let a = presented(5, &[-5, 0, 1], 1, 24);
    let b = presented(5, &[-20, 0, 1], 1, 24);
    let c = presented(5, &[-10, 0, 1], 1, 24);
    let isos = search_isos(&a, &b, 4).map_err(|e| e.to_string())?;
    let none = search_isos(&a, &c, 4).map_err(|e| e.to_string())?;
    ensure(!isos.is_empty(), || "no isomorphism to Q_5(sqrt 20)".into())?;
    ensure(none.is_empty(), || format!("{} isomorphisms to Q_5(sqrt 10)", none.len()))?;
    let five = FieldElem::from_int(b.field(), 5);
    for f in &isos {
        let lift = lift_tame(f).map_err(|e| e.to_string())?;
        let pi = &lift.embedding.pi_image;
        ensure(pi.pow(2).eq_at_precision(&five), || format!("(pi')^2 != 5 for pi' = {}", pi.render()))?;
        let agree = verify_induces(f, &lift.embedding, TAME_SAMPLES, 7).map_err(|e| e.to_string())?;
        ensure(agree.matched == TAME_SAMPLES && agree.checked == TAME_SAMPLES, || {
            format!("{}/{} samples: {:?}", agree.matched, agree.checked, agree.first_mismatch)
        })?;
    }
    ensure(tame_run()? == tame_run()?, || "repeated runs differ".into())?;
    Ok(format!(
        "{} isomorphisms to Q_5(sqrt 20), none to Q_5(sqrt 10); (pi')^2 = 5 and {TAME_SAMPLES}/{TAME_SAMPLES} samples; runs identical",
        isos.len()
    ))
}

fn c8_wild_lifting() -> Outcome {
    let k = field(2, &[-2, 0, 1], WILD_PRECISION);
    let n = n_threshold(&k).map_err(|e| e.to_string())?.n_min_conservative as u32;
    ensure(n == 13, || format!("conservative threshold {n}"))?;
    let h = Arc::new(Presented::from_field(k.clone(), n, DEFAULT_UNIT_CAP).map_err(|e| e.to_string())?);
    let lift = lift_wild(&HomSpec::identity(&h)).map_err(|e| e.to_string())?;
    let two = FieldElem::from_int(&k, 2);
    let pi = &lift.embedding.pi_image;
    ensure(pi.pow(2).sub(&two).unwrap().is_zero_at_precision(), || format!("(pi')^2 != 2 for {}", pi.render()))?;
    let seed = FieldElem::pi(&k).mul(&FieldElem::one(&k).add(&FieldElem::pi_pow(&k, 13)).unwrap()).unwrap();
    let r = krasner_refine(&eisenstein_poly(&k), &seed).map_err(|e| e.to_string())?;
    ensure(r.newton_steps <= WILD_NEWTON_MAX, || format!("{} Newton steps", r.newton_steps))?;
    ensure(r.root.pow(2).sub(&two).unwrap().is_zero_at_precision(), || "refined root is not a root".into())?;
    Ok(format!(
        "n = {n}, N = {WILD_PRECISION}: (pi')^2 = 2; refinement from pi(1+pi^13) in {} Newton steps",
        r.newton_steps
    ))
}

fn c9_translation_agreement() -> Outcome {
    let corpus = generate_corpus(CORPUS_SIZE, hyperval_logic::corpus::CORPUS_SEED);
    let mut parts = Vec::new();
    for (p, eis, n, name) in [(2, &[-2, 1][..], 2, "Q_2"), (5, &[-5, 0, 1][..], 1, "Q_5(sqrt 5)")] {
        let h = Hyperfield::new(field(p, eis, 20), n).unwrap();
        let r = agreement_harness(&corpus, &h, &EvalConfig::new(CORPUS_RADIUS), 4).map_err(|e| e.to_string())?;
        r.check().map_err(|e| e.to_string())?;
        ensure(r.all_existential(), || "a translation left the existential fragment".into())?;
        parts.push(format!("{name} n={n}: {} definite agreements", r.definite_agreements()));
    }
    Ok(format!("0 disagreements on {CORPUS_SIZE} sentences; {}", parts.join(", ")))
}

fn c10_krasner_counterexample() -> Outcome {
    let h = presented(2, &[-2, 1], 1, 16);
    let spec = HomSpec {
        unit_images: vec![true; h.group.gens.len()],
        src: h.clone(),
        dst: Arc::new(KrasnerF2),
        pi_image: true,
        over_p: false,
    };
    let r = check_hom(&spec, &HomBudget::default_for(1)).map_err(|e| e.to_string())?;
    for c in 1..=3 {
        let cond = r.condition(c).ok_or("missing condition")?;
        ensure(cond.status == Status::Pass, || format!("condition ({c}) fails at {:?}", cond.witness))?;
    }
    let four = r.condition(4).ok_or("missing condition (4)")?;
    ensure(four.status == Status::Fail, || "condition (4) passes".into())?;
    let w = four.witness.clone().ok_or("no witness")?;
    ensure(four.witness_classes == vec![h.h.class_from_int(2), h.h.class_from_int(1)], || format!("witness {w}"))?;
    Ok(format!("conditions (1)-(3) pass; (4) fails at {w}: not a valued-hyperfield homomorphism"))
}

fn c11_ake_demo() -> Outcome {
    let phi = parse_vhf("exists x. x*x = phat").map_err(|e| e.to_string())?;
    let cfg = EvalConfig::new(AKE_RADIUS);
    let mut parts = Vec::new();
    for (eis, name, expect_true) in [(&[-5, 0, 1][..], "Q_5(sqrt 5)", true), (&[-5, 1][..], "Q_5", false)] {
        let h = Hyperfield::new(field(5, eis, 20), 1).unwrap();
        let e = (eis.len() - 1) as u32;
        let vhf = eval_vhf(&phi, &h, &cfg).map_err(|e| e.to_string())?.result;
        let val = eval_val(&translate(&phi, e, 1), &h, &cfg).map_err(|e| e.to_string())?.result;
        for (side, r) in [("hyperfield", &vhf), ("field", &val)] {
            let ok = if expect_true { r.is_true() } else { *r == TriBool::FalseWithinRadius(AKE_RADIUS) };
            ensure(ok, || format!("{name}, {side} side: {}", r.to_json()))?;
        }
        parts.push(format!("{name}: {}", if expect_true { "true on both sides" } else { "no witness on both sides" }));
    }
    Ok(format!("radius {AKE_RADIUS}; {}", parts.join(", ")))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("hyperfield sums equal the brute-force oracle", c1_oracle_equivalence),
        ("hyperfield and valued-hyperfield axioms", c2_axioms),
        ("level-1 units part is the residue field", c3_residue_iso),
        ("representatives, congruences, expansions", c4_representatives),
        ("Gauss model p-basis", c5_gauss),
        ("ramification bounds", c6_bounds),
        ("tame lifting", c7_tame_lifting),
        ("wild lifting", c8_wild_lifting),
        ("translation agreement", c9_translation_agreement),
        ("Krasner quotient counterexample", c10_krasner_counterexample),
        ("existential AKE demo", c11_ake_demo),
    ];
    let results: Vec<(Outcome, Duration)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, f)| {
                s.spawn(move || {
                    let t = Instant::now();
                    (f(), t.elapsed())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| (Err("panicked".into()), Duration::ZERO)))
            .collect()
    });
    let mut failed = Vec::new();
    for (i, ((name, _), (outcome, t))) in criteria.iter().zip(&results).enumerate() {
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{:.1}s]", i + 1, t.as_secs_f64()),
            Err(why) => {
                println!("FAIL {:>2} {name}: {why} [{:.1}s]", i + 1, t.as_secs_f64());
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
