//! The level-1 hyperfield of S is the residue field: the class-to-residue
//! table against hand-written F_q arithmetic.

use std::sync::Arc;

use num_bigint::BigInt;
use hyperval_core::hyperfield::{HfClass, Hyperfield};
use hyperval_core::{FieldDef, FieldModel};

/// F_q arithmetic on coefficient pairs; F_4 uses x^2 = x + 1.
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

fn residue_field_case(def: FieldDef) {
    let fq = Fq { p: i64::try_from(&def.p).unwrap(), f: def.f };
    let h = Hyperfield::new(Arc::new(FieldModel::new(def).unwrap()), 1).unwrap();
    let table = h.residue_iso_level1().unwrap();
    let res = |c: &HfClass| -> Vec<i64> {
        let r = &table.iter().find(|(x, _)| x == c).unwrap().1;
        let mut v: Vec<i64> = r.iter().map(|x| i64::try_from(x).unwrap()).collect();
        v.resize(fq.f, 0);
        v
    };
    assert_eq!(table.len() as i64, fq.p.pow(fq.f as u32));
    let mut seen: Vec<Vec<i64>> = table.iter().map(|(c, _)| res(c)).collect();
    seen.sort();
    seen.dedup();
    assert_eq!(seen.len(), table.len());
    for (a, _) in &table {
        for (b, _) in &table {
            assert_eq!(res(&h.mul(a, b)), fq.mul(&res(a), &res(b)));
            let s = h.multiadd(a, b);
            let units: Vec<HfClass> = h
                .sum_members(&s, s.radius(1).unwrap_or(0).max(0))
                .unwrap()
                .into_iter()
                .filter(|c| c.valuation().is_none_or(|v| v == 0))
                .collect();
            assert_eq!(units.len(), 1);
            assert_eq!(res(&units[0]), fq.add(&res(a), &res(b)));
        }
    }
}

#[test]
fn prime_residue_fields() {
    for p in [2, 3, 5] {
        residue_field_case(FieldDef::simple(p, &[-p, 1], 8));
    }
}

#[test]
fn residue_field_of_order_four() {
    let w = |c: i64| vec![BigInt::from(c), BigInt::from(0)];
    residue_field_case(FieldDef {
        p: BigInt::from(2),
        f: 2,
        e: 1,
        eis: vec![w(-2), w(1)],
        h: vec![BigInt::from(1), BigInt::from(1), BigInt::from(1)],
        prec: 8,
        n: None,
    });
}
