//! The Gauss-valuation model on F_p(t)-residue fields: p-independence and
//! the expansion along the p-basis {t}, checked by cross-multiplication.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use hyperval_core::gauss::{
    p_independent_check, pbasis_assemble, pbasis_expand_t, GaussElem, MAX_DEGREE,
};

fn poly_mul(a: &[i64], b: &[i64], m: i64) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y).rem_euclid(m);
        }
    }
    out
}

/// x ≡ y mod p^k, via num_x·den_y − num_y·den_x.
fn cross_equal(x: &GaussElem, y: &GaussElem, m: i64) -> bool {
    let l = poly_mul(x.num(), y.den(), m);
    let r = poly_mul(y.num(), x.den(), m);
    let n = l.len().max(r.len());
    (0..n).all(|i| (l.get(i).copied().unwrap_or(0) - r.get(i).copied().unwrap_or(0)).rem_euclid(m) == 0)
}

fn random_fraction(p: i64, prec: u32, rng: &mut ChaCha8Rng) -> GaussElem {
    let m = p.pow(prec);
    loop {
        let num: Vec<i64> = (0..=rng.gen_range(0..=MAX_DEGREE)).map(|_| rng.gen_range(0..m)).collect();
        let den: Vec<i64> = (0..=rng.gen_range(0..=MAX_DEGREE)).map(|_| rng.gen_range(0..m)).collect();
        if let Ok(a) = GaussElem::new(p, prec, &num, &den) {
            return a;
        }
    }
}

#[test]
fn t_is_p_independent_and_t_to_the_p_is_not() {
    for p in [2, 3, 5] {
        let t = GaussElem::t(p, 4).unwrap();
        assert!(p_independent_check(&t).unwrap());
        assert!(!t.residue().is_pth_power());
        let tp = t.pow(p as u32);
        assert!(!p_independent_check(&tp).unwrap());
        assert!(tp.residue().is_pth_power());
    }
}

#[test]
fn pbasis_round_trips_on_random_fractions() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for p in [2i64, 3] {
        for l in 0..=2u32 {
            for _ in 0..100 {
                let a = random_fraction(p, l + 1, &mut rng);
                let d = pbasis_expand_t(&a, l).unwrap();
                assert_eq!(d.digits.len(), l as usize + 1);
                assert!(d.digits.iter().all(|row| row.len() == p.pow(l) as usize));
                let back = pbasis_assemble(&d).unwrap();
                assert!(cross_equal(&a, &back, p.pow(l + 1)), "p={p} l={l} a={}", a.render());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn division_inverts_multiplication(
        p in prop::sample::select(vec![2i64, 3, 5]),
        num in prop::collection::vec(0i64..1000, 1..4),
        den in prop::collection::vec(1i64..1000, 1..4),
    ) {
        if let Ok(a) = GaussElem::new(p, 3, &num, &den) {
            if a.valuation() == Some(0) {
                let b = GaussElem::t(p, 3).unwrap().add(&GaussElem::from_int(p, 3, 1).unwrap()).unwrap();
                let back = a.mul(&b).unwrap().div(&b).unwrap();
                prop_assert!(cross_equal(&a, &back, p.pow(3)));
            }
        }
    }
}
