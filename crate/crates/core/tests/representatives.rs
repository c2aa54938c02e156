//! λ representatives, p-power congruences and digit expansions, checked
//! against the brute-force ring for f = 1 and by round trips everywhere.

#[path = "support/brute.rs"]
mod brute;

use std::sync::Arc;

use brute::Ring;
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use hyperval_core::representatives::{
    cohen_expand, digit_assemble, digit_expand, lambda_from_lift, p_power_congruence_check,
};
use hyperval_core::{FieldDef, FieldElem, FieldModel};

const PREC: u32 = 12;
const GRID: &[(i64, &[i64])] = &[
    (2, &[-2, 1]),
    (3, &[-3, 1]),
    (5, &[-5, 1]),
    (2, &[-2, 0, 1]),
    (5, &[-5, 0, 1]),
];

fn field(p: i64, eis: &[i64]) -> Arc<FieldModel> {
    Arc::new(FieldModel::new(FieldDef::simple(p, eis, PREC)).unwrap())
}

/// W(F_4)[π] with π = 2: h = X^2 + X + 1.
fn unramified_f4() -> Arc<FieldModel> {
    let w = |c: i64| vec![BigInt::from(c), BigInt::from(0)];
    let def = FieldDef {
        p: BigInt::from(2),
        f: 2,
        e: 1,
        eis: vec![w(-2), w(1)],
        h: vec![BigInt::from(1), BigInt::from(1), BigInt::from(1)],
        prec: PREC,
        n: None,
    };
    Arc::new(FieldModel::new(def).unwrap())
}

fn all_fields() -> Vec<Arc<FieldModel>> {
    let mut v: Vec<_> = GRID.iter().map(|(p, eis)| field(*p, eis)).collect();
    v.push(unramified_f4());
    v
}

fn ints(a: &FieldElem) -> Vec<i64> {
    a.coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect()
}

fn ring_pow(ring: &Ring, a: &[i64], k: u64) -> Vec<i64> {
    (0..k).fold(ring.from_coeffs(&[1]), |acc, _| ring.mul(&acc, a))
}

/// ν(x − y) in the brute ring, `None` when they agree to full precision.
fn ring_gap(ring: &Ring, x: &[i64], y: &[i64]) -> Option<u32> {
    ring.valuation(&ring.add(x, &ring.neg(y)))
}

fn close_pair(k: &Arc<FieldModel>, rng: &mut ChaCha8Rng) -> (FieldElem, FieldElem) {
    let a = FieldElem::random(k, PREC, rng);
    let c = FieldElem::random(k, PREC, rng);
    let b = a.add(&FieldElem::pi(k).mul(&c).unwrap()).unwrap();
    (a, b)
}

#[test]
fn lambda_is_independent_of_the_lift() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in all_fields() {
        let brute = (k.f() == 1).then(|| {
            let eis: Vec<i64> = k.eisenstein().iter().map(|w| i64::try_from(&w[0]).unwrap()).collect();
            Ring::new(i64::try_from(k.p()).unwrap(), &eis, PREC)
        });
        for trial in 0..50 {
            let l = trial % 5;
            let (b1, b2) = close_pair(&k, &mut rng);
            let x = lambda_from_lift(&b1, l).unwrap();
            let y = lambda_from_lift(&b2, l).unwrap();
            assert!(x.eq_at_precision(&y), "lift dependence at l={l}");
            if let Some(ring) = &brute {
                let q = (ring.p as u64).pow(l);
                let ox = ring_pow(ring, &ring.from_coeffs(&ints(&b1)), q);
                let oy = ring_pow(ring, &ring.from_coeffs(&ints(&b2)), q);
                assert!(ring_gap(ring, &ox, &oy).is_none_or(|v| v >= l + 1));
                assert!(ring_gap(ring, &ox, &ring.from_coeffs(&ints(&x))).is_none_or(|v| v >= l + 1));
            }
        }
    }
}

#[test]
fn p_power_congruences_on_500_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (p, eis) in GRID {
        let k = field(*p, eis);
        let ring = Ring::new(*p, eis, PREC);
        for _ in 0..100 {
            let (a, b) = close_pair(&k, &mut rng);
            let report = p_power_congruence_check(&a, &b, 4).unwrap();
            let (ra, rb) = (ring.from_coeffs(&ints(&a)), ring.from_coeffs(&ints(&b)));
            for i in 0..=4u32 {
                let q = (*p as u64).pow(i);
                let gap = ring_gap(&ring, &ring_pow(&ring, &ra, q), &ring_pow(&ring, &rb, q));
                assert!(gap.is_none_or(|v| v >= i + 1), "p={p} eis={eis:?} i={i}");
                if let (Some(g), Some(r)) = (gap, report.valuations[i as usize]) {
                    assert_eq!(g, r);
                }
            }
        }
    }
}

#[test]
fn noncongruent_pairs_are_rejected() {
    let k = field(3, &[-3, 1]);
    assert!(p_power_congruence_check(&FieldElem::one(&k), &FieldElem::from_int(&k, 2), 2).is_err());
}

#[test]
fn expansions_round_trip_up_to_level_six() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for k in all_fields() {
        for l in 0..=6u32 {
            for _ in 0..10 {
                let a = FieldElem::random(&k, PREC, &mut rng);
                let d = digit_expand(&a, l).unwrap();
                assert_eq!(d.digits.len(), l as usize + 1);
                let back = digit_assemble(&k, &d).unwrap();
                assert!(back.eq_at_precision(&a.reduce_mod(l + 1).unwrap()));

                let w: Vec<BigInt> = (0..k.f()).map(|_| BigInt::from(rng.gen_range(-500i64..500))).collect();
                let a = FieldElem::from_w(&k, &w);
                let d = cohen_expand(&a, l).unwrap();
                assert_eq!(d.digits.len(), (l as usize + 1).div_ceil(k.e()));
                let back = digit_assemble(&k, &d).unwrap();
                assert!(back.eq_at_precision(&a.reduce_mod(l + 1).unwrap()));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn digit_expansion_of_integers_round_trips(n in -100_000i64..100_000, l in 0u32..=6, which in 0usize..5) {
        let (p, eis) = GRID[which];
        let k = field(p, eis);
        let a = FieldElem::from_int(&k, n);
        let back = digit_assemble(&k, &digit_expand(&a, l).unwrap()).unwrap();
        prop_assert!(back.eq_at_precision(&a.reduce_mod(l + 1).unwrap()));
    }
}
