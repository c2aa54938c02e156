//! Small integer helpers shared by the field and residue code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Largest k with p^k | n, or `None` for n = 0.
pub fn valuation_p(n: &BigInt, p: &BigInt) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let mut k = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return Some(k);
        }
        m = q;
        k += 1;
    }
}

pub fn valuation_p_u64(mut n: u64, p: u64) -> u32 {
    assert!(n != 0);
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    k
}

/// Ceiling division for possibly negative numerators and positive divisors.
pub fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    -((-a).div_euclid(b))
}

pub fn modpow(base: &BigInt, exp: &BigInt, m: &BigInt) -> BigInt {
    base.mod_floor(m).modpow(exp, m)
}

/// Deterministic Miller-Rabin for inputs below 3.3e24, strong probable prime above.
pub fn is_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if n < &two {
        return false;
    }
    const SMALL: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    for s in SMALL {
        let s = BigInt::from(s);
        if n == &s {
            return true;
        }
        if n.is_multiple_of(&s) {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let mut d = n_minus_1.clone();
    let mut r = 0u32;
    while d.is_even() {
        d >>= 1;
        r += 1;
    }
    'witness: for a in SMALL {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..r {
            x = (&x * &x).mod_floor(n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn abs_u64(n: &BigInt) -> Option<u64> {
    use num_traits::ToPrimitive;
    n.abs().to_u64()
}
