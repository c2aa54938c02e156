//! Independent brute-force model of K/(1+m^n) sums for fields with f = 1.
//!
//! Elements of O/m^L are integer vectors in the basis 1, π, ..., π^{e-1} modulo
//! p^digits. Classes are compared by the defining relation ν(x − y) ≥ ν(x) + n,
//! through canonical reductions, without any division.

#![allow(dead_code)]

use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BKey {
    Zero,
    Class(u32, Vec<i64>),
}

pub struct Ring {
    pub p: i64,
    pub e: usize,
    /// P = X^e + eis[e-1] X^{e-1} + ... + eis[0].
    pub eis: Vec<i64>,
    pub prec: u32,
    pub modulus: i64,
}

impl Ring {
    /// O/m^prec with one guard digit.
    pub fn new(p: i64, eis: &[i64], prec: u32) -> Self {
        let e = eis.len() - 1;
        let digits = (prec as usize).div_ceil(e) + 1;
        let modulus = p.checked_pow(digits as u32).expect("modulus fits in i64");
        assert!(modulus < 1 << 31, "products must fit in i64");
        Ring { p, e, eis: eis.to_vec(), prec, modulus }
    }

    pub fn reduce(&self, a: &mut [i64]) {
        for c in a.iter_mut() {
            *c = c.rem_euclid(self.modulus);
        }
    }

    pub fn from_coeffs(&self, c: &[i64]) -> Vec<i64> {
        let mut v = vec![0; self.e];
        v[..c.len()].copy_from_slice(c);
        self.reduce(&mut v);
        v
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut v: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.reduce(&mut v);
        v
    }

    pub fn neg(&self, a: &[i64]) -> Vec<i64> {
        let mut v: Vec<i64> = a.iter().map(|x| -x).collect();
        self.reduce(&mut v);
        v
    }

    pub fn mul(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let e = self.e;
        let mut prod = vec![0i64; 2 * e - 1];
        for i in 0..e {
            for j in 0..e {
                prod[i + j] = (prod[i + j] + a[i] * b[j]).rem_euclid(self.modulus);
            }
        }
        for d in (e..prod.len()).rev() {
            let c = prod[d];
            prod[d] = 0;
            for k in 0..e {
                prod[d - e + k] = (prod[d - e + k] - c * self.eis[k]).rem_euclid(self.modulus);
            }
        }
        prod.truncate(e);
        prod
    }

    pub fn pi_pow(&self, k: u32) -> Vec<i64> {
        let mut pi = vec![0; self.e];
        if self.e == 1 {
            pi[0] = self.p;
        } else {
            pi[1] = 1;
        }
        let mut out = self.from_coeffs(&[1]);
        for _ in 0..k {
            out = self.mul(&out, &pi);
        }
        out
    }

    fn nu_p(&self, mut c: i64) -> u32 {
        let mut k = 0;
        while c % self.p == 0 {
            c /= self.p;
            k += 1;
        }
        k
    }

    /// Valuation, or `None` when the value vanishes modulo m^prec.
    pub fn valuation(&self, a: &[i64]) -> Option<u32> {
        let v = a
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(i, c)| self.e as u32 * self.nu_p(*c) + i as u32)
            .min()?;
        (v < self.prec).then_some(v)
    }

    /// Reduction modulo m^k in canonical form.
    pub fn canon(&self, a: &[i64], k: u32) -> Vec<i64> {
        a.iter()
            .enumerate()
            .map(|(i, c)| {
                let d = (k as i64 - i as i64).max(0) as u32;
                let d = d.div_ceil(self.e as u32);
                c.rem_euclid(self.p.pow(d))
            })
            .collect()
    }

    /// Class key: valuation and the value modulo m^{ν+n}.
    pub fn key(&self, z: &[i64], n: u32) -> BKey {
        match self.valuation(z) {
            None => BKey::Zero,
            Some(w) => {
                assert!(w + n <= self.prec, "class needs more precision than the ring carries");
                BKey::Class(w, self.canon(z, w + n))
            }
        }
    }

    /// All digit vectors Σ d_k π^k, k < len, d_k in [0, p).
    pub fn digit_elements(&self, len: u32) -> Vec<Vec<i64>> {
        let total = self.p.pow(len);
        (0..total)
            .map(|mut idx| {
                let mut acc = self.from_coeffs(&[0]);
                for k in 0..len {
                    let d = idx % self.p;
                    idx /= self.p;
                    let term = self.mul(&self.from_coeffs(&[d]), &self.pi_pow(k));
                    acc = self.add(&acc, &term);
                }
                acc
            })
            .collect()
    }
}

/// A nonzero class π^val·u with u given by its coefficients, or zero.
pub type BClass = Option<(u32, Vec<i64>)>;

/// {class(x+y) : x ∈ [a], y ∈ [b], ν(x+y) ≤ cutoff} ∪ ({0} if [−a] = [b]),
/// with x, y running over a(1+π^n t) for t in the digit set of O/m^extra.
pub fn brute_sum(ring: &Ring, n: u32, a: &BClass, b: &BClass, cutoff: u32, extra: u32) -> BTreeSet<BKey> {
    let ts = ring.digit_elements(extra);
    let coset = |c: &BClass| -> Vec<Vec<i64>> {
        match c {
            None => vec![ring.from_coeffs(&[0])],
            Some((v, u)) => {
                let base = ring.mul(&ring.pi_pow(*v), &ring.from_coeffs(u));
                let pin = ring.pi_pow(n);
                ts.iter()
                    .map(|t| {
                        let one_plus = ring.add(&ring.from_coeffs(&[1]), &ring.mul(&pin, t));
                        ring.mul(&base, &one_plus)
                    })
                    .collect()
            }
        }
    };
    let xs = coset(a);
    let ys = coset(b);
    let mut out = BTreeSet::new();
    for x in &xs {
        for y in &ys {
            let z = ring.add(x, y);
            if ring.valuation(&z).is_some_and(|w| w <= cutoff) {
                out.insert(ring.key(&z, n));
            }
        }
    }
    let minus_x = ring.neg(&xs[0]);
    let same_class = match (ring.valuation(&minus_x), ring.valuation(&ys[0])) {
        (Some(v), Some(w)) => v == w && ring.key(&minus_x, n) == ring.key(&ys[0], n),
        _ => a.is_none() && b.is_none(),
    };
    if same_class {
        out.insert(BKey::Zero);
    }
    out
}
