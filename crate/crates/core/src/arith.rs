//! Integer kernel: primality, factorization, square-free parts, Kronecker
//! symbols and prime sieves.
//!
//! Everything below 2^64 goes through a native `u64` path; larger values use
//! `BigInt` with the same algorithms.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("zero has no factorization")]
    Zero,
}

/// A signed prime factorization `sign * prod p^e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    sign: i8,
    factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Prime powers in strictly increasing order of the prime.
    pub fn factors(&self) -> &[(BigInt, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn value(&self) -> BigInt {
        let mut v = BigInt::from(self.sign);
        for (p, e) in &self.factors {
            v *= num_traits::pow(p.clone(), *e as usize);
        }
        v
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    fn from_unsorted(sign: i8, mut raw: Vec<(BigInt, u32)>) -> Self {
        raw.sort();
        let mut factors: Vec<(BigInt, u32)> = Vec::with_capacity(raw.len());
        for (p, e) in raw {
            match factors.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => factors.push((p, e)),
            }
        }
        Factorization { sign, factors }
    }
}

// ---------------------------------------------------------------------------
// u64 primitives

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

const SMALL_PRIMES: [u64; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    // Bases known to be deterministic below 2^64.
    'witness: for &a in &[2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn brent_u64(n: u64) -> u64 {
    debug_assert!(n > 3 && !is_prime_u64(n));
    if n % 2 == 0 {
        return 2;
    }
    let f = |x: u64, c: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
    let dist = |a: u64, b: u64| a.abs_diff(b);
    for c in 1u64.. {
        let mut y = 2u64;
        let mut r = 1u64;
        let mut q = 1u64;
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        const BLOCK: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y, c);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BLOCK.min(r - k) {
                    y = f(y, c);
                    q = mul_mod(q, dist(x, y), n);
                }
                g = q.gcd(&n);
                k += BLOCK;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys, c);
                g = dist(x, ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

fn split_u64(n: u64, out: &mut Vec<(u64, u32)>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push((n, 1));
        return;
    }
    let d = brent_u64(n);
    split_u64(d, out);
    split_u64(n / d, out);
}

/// Prime factorization of a positive `u64`, primes ascending.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factor_u64(0)");
    let mut raw = Vec::new();
    for p in 2u64..1000 {
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            raw.push((p, e));
        }
    }
    split_u64(n, &mut raw);
    raw.sort_unstable();
    let mut merged: Vec<(u64, u32)> = Vec::with_capacity(raw.len());
    for (p, e) in raw {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    merged
}

// ---------------------------------------------------------------------------
// BigInt primality and factoring

fn trial_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve_primes(1 << 16))
}

const MR_RANDOM_ROUNDS: usize = 64;

fn miller_rabin_big(n: &BigUint, base: &BigUint) -> bool {
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    let mut x = base.modpow(&d, n);
    if x == one || x == n1 {
        return true;
    }
    for _ in 1..s {
        x = x.modpow(&BigUint::from(2u32), n);
        if x == n1 {
            return true;
        }
    }
    false
}

fn is_prime_biguint(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in trial_primes().iter().take(200) {
        if (n % p).is_zero() {
            return false;
        }
    }
    // The first 13 prime bases are deterministic below 3.3e24.
    let det_bound: BigUint = "3317044064679887385961981".parse().unwrap();
    let fixed = [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    for b in fixed {
        if !miller_rabin_big(n, &BigUint::from(b)) {
            return false;
        }
    }
    if *n < det_bound {
        return true;
    }
    // Fixed-seed random bases: error probability at most 4^-64.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e7_2e4);
    let bytes = n.to_bytes_le().len();
    for _ in 0..MR_RANDOM_ROUNDS {
        let raw: Vec<u8> = (0..bytes + 8).map(|_| rng.gen()).collect();
        let base = BigUint::from_bytes_le(&raw) % (n - 3u32) + 2u32;
        if !miller_rabin_big(n, &base) {
            return false;
        }
    }
    true
}

/// True iff `|n|` is prime. Deterministic below 3.3e24, and beyond that
/// probabilistic with error below 2^-128.
pub fn is_prime(n: &BigInt) -> bool {
    is_prime_biguint(n.magnitude())
}

fn brent_big(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    let dist = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut r: u64 = 1;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..128.min(r - k) {
                    y = f(&y);
                    q = (q * dist(&x, &y)) % n;
                }
                g = q.gcd(n);
                k += 128;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                g = dist(&x, &ys).gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    let bits = n.bits() as u32;
    for k in (2..=bits).rev() {
        let r = n.nth_root(k);
        if r > BigUint::one() && num_traits::pow(r.clone(), k as usize) == *n {
            return Some((r, k));
        }
    }
    None
}

fn split_big(n: BigUint, mult: u32, out: &mut Vec<(BigInt, u32)>) {
    if n.is_one() {
        return;
    }
    if let Some(small) = n.to_u64() {
        for (p, e) in factor_u64(small) {
            out.push((BigInt::from(p), e * mult));
        }
        return;
    }
    if is_prime_biguint(&n) {
        out.push((BigInt::from(n), mult));
        return;
    }
    if let Some((root, k)) = perfect_power(&n) {
        split_big(root, mult * k, out);
        return;
    }
    let d = brent_big(&n);
    let rest = &n / &d;
    split_big(d, mult, out);
    split_big(rest, mult, out);
}

/// Complete prime factorization of a nonzero integer.
pub fn factor(n: &BigInt) -> Result<Factorization, ArithError> {
    if n.is_zero() {
        return Err(ArithError::Zero);
    }
    let sign = if n.sign() == Sign::Minus { -1 } else { 1 };
    let mut rest = n.magnitude().clone();
    if let Some(small) = rest.to_u64() {
        let raw = factor_u64(small)
            .into_iter()
            .map(|(p, e)| (BigInt::from(p), e))
            .collect();
        return Ok(Factorization::from_unsorted(sign, raw));
    }
    let mut raw = Vec::new();
    for &p in trial_primes() {
        if (&rest % p).is_zero() {
            let mut e = 0;
            while (&rest % p).is_zero() {
                rest /= p;
                e += 1;
            }
            raw.push((BigInt::from(p), e));
        }
    }
    split_big(rest, 1, &mut raw);
    Ok(Factorization::from_unsorted(sign, raw))
}

/// Writes `n = d * t^2` with `d` square-free, `sign(d) = sign(n)` and `t > 0`.
pub fn squarefree_part(n: &BigInt) -> Result<(BigInt, BigInt), ArithError> {
    let f = factor(n)?;
    let mut d = BigInt::from(f.sign());
    let mut t = BigInt::one();
    for (p, e) in f.factors() {
        if e % 2 == 1 {
            d *= p;
        }
        t *= num_traits::pow(p.clone(), (e / 2) as usize);
    }
    Ok((d, t))
}

/// [`squarefree_part`] for machine integers.
pub fn squarefree_part_i64(n: i64) -> Result<(i64, u64), ArithError> {
    if n == 0 {
        return Err(ArithError::Zero);
    }
    let mut d: i64 = n.signum();
    let mut t: u64 = 1;
    for (p, e) in factor_u64(n.unsigned_abs()) {
        if e % 2 == 1 {
            d *= p as i64;
        }
        t *= p.pow(e / 2);
    }
    Ok((d, t))
}

pub fn is_squarefree_i64(n: i64) -> bool {
    n != 0 && factor_u64(n.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

// ---------------------------------------------------------------------------
// Residue symbols

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi_u64(a: u64, n: u64) -> i8 {
    assert!(n % 2 == 1, "jacobi_u64 needs an odd modulus");
    let mut a = a % n;
    let mut n = n;
    let mut result = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            result = -result;
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Kronecker symbol `(a/n)` on machine integers.
pub fn kronecker_i64(a: i64, n: i64) -> i8 {
    if n == 0 {
        return if a.unsigned_abs() == 1 { 1 } else { 0 };
    }
    let mut result = 1i8;
    if n < 0 && a < 0 {
        result = -result;
    }
    let mut m = n.unsigned_abs();
    let v = m.trailing_zeros();
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        let r = a.rem_euclid(8);
        if v % 2 == 1 && (r == 3 || r == 5) {
            result = -result;
        }
        m >>= v;
    }
    if m == 1 {
        return result;
    }
    let a_mod = a.rem_euclid(m as i64) as u64;
    result * jacobi_u64(a_mod, m)
}

/// Kronecker symbol `(a/n)`, extending the Legendre and Jacobi symbols.
pub fn kronecker(a: &BigInt, n: &BigInt) -> i8 {
    if let (Some(a), Some(n)) = (a.to_i64(), n.to_i64()) {
        return kronecker_i64(a, n);
    }
    kronecker_big(a, n)
}

fn kronecker_big(a: &BigInt, n: &BigInt) -> i8 {
    if n.is_zero() {
        return if a.magnitude().is_one() { 1 } else { 0 };
    }
    let mut result = 1i8;
    if n.is_negative() && a.is_negative() {
        result = -result;
    }
    let mut m = n.magnitude().clone();
    let v = m.trailing_zeros().unwrap_or(0);
    if v > 0 {
        if a.is_even() {
            return 0;
        }
        let r = a.mod_floor(&BigInt::from(8)).to_u8().unwrap();
        if v % 2 == 1 && (r == 3 || r == 5) {
            result = -result;
        }
        m >>= v;
    }
    let mut n = m;
    let mut a = a.mod_floor(&BigInt::from(n.clone())).to_biguint().unwrap();
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        a >>= tz;
        let n8 = (&n % 8u32).to_u8().unwrap();
        if tz % 2 == 1 && (n8 == 3 || n8 == 5) {
            result = -result;
        }
        if (&a % 4u32).to_u8() == Some(3) && (&n % 4u32).to_u8() == Some(3) {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= &n;
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// A square root of `a` modulo the odd prime `p` (Tonelli-Shanks), if any.
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if p == 2 || a == 0 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.mod_floor(m).extended_gcd(m);
    if g.gcd.is_one() {
        Some(g.x.mod_floor(m))
    } else {
        None
    }
}

/// `p`-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let mut n = n.magnitude().clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&BigUint::from(p));
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

// ---------------------------------------------------------------------------
// Sieves

/// All primes `<= limit`, ascending. Odd-only sieve of Eratosthenes.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    // index i stands for 2i + 1
    let half = (limit - 1) / 2 + 1;
    let mut composite = vec![false; half];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(limit / 10 + 8);
    primes.push(2);
    primes.extend(
        composite
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| 2 * i as u64 + 1),
    );
    primes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn trial_division(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(&big(37)));
        assert!(!is_prime(&big(1)));
        assert!(!is_prime(&big(6272)));
        assert!(is_prime(&big(-7)));
        assert!(!is_prime(&big(0)));
        // 2^61 - 1 and a Carmichael number
        assert!(is_prime_u64((1 << 61) - 1));
        assert!(!is_prime_u64(561));
        let m127 = (BigInt::one() << 127) - 1;
        assert!(is_prime(&m127));
        assert!(!is_prime(&(&m127 * big(3))));
        let p89: BigInt = (BigInt::one() << 89) - 1;
        assert!(!is_prime(&(&p89 * &p89)));
    }

    #[test]
    fn factor_examples() {
        let f = factor(&big(6272)).unwrap();
        assert_eq!(f.sign(), 1);
        assert_eq!(f.factors(), &[(big(2), 7), (big(7), 2)]);
        let f = factor(&big(-34496)).unwrap();
        assert_eq!(f.sign(), -1);
        assert_eq!(f.factors(), &[(big(2), 6), (big(7), 2), (big(11), 1)]);
        let f = factor(&big(-7)).unwrap();
        assert_eq!((f.sign(), f.factors()), (-1, &[(big(7), 1)][..]));
        assert_eq!(factor(&big(0)), Err(ArithError::Zero));
    }

    #[test]
    fn factor_matches_trial_division() {
        for n in [1u64, 2, 97, 1001, 65536, 999_983 * 999_979, 600_851_475_143] {
            let got: Vec<(u64, u32)> = factor(&BigInt::from(n))
                .unwrap()
                .factors()
                .iter()
                .map(|(p, e)| (p.to_u64().unwrap(), *e))
                .collect();
            assert_eq!(got, trial_division(n), "n = {n}");
        }
    }

    #[test]
    fn factor_large_semiprime_and_powers() {
        let p = BigInt::from(1_000_000_007u64);
        let q = BigInt::from(998_244_353u64);
        let r: BigInt = "18446744073709551557".parse().unwrap(); // largest prime < 2^64
        let n = &p * &q * &r * &r;
        let f = factor(&n).unwrap();
        assert_eq!(f.value(), n);
        assert_eq!(f.factors().len(), 3);
        assert!(f.factors().iter().all(|(p, _)| is_prime(p)));
        let n = num_traits::pow(BigInt::from(12), 12) * num_traits::pow(BigInt::from(57591), 6);
        let f = factor(&n).unwrap();
        assert_eq!(f.factors(), &[(big(2), 24), (big(3), 48), (big(79), 6)]);
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_part(&big(6272)).unwrap(), (big(2), big(56)));
        assert_eq!(squarefree_part(&big(2368)).unwrap(), (big(37), big(8)));
        assert_eq!(squarefree_part(&big(-5103)).unwrap(), (big(-7), big(27)));
        assert_eq!(squarefree_part_i64(-1664).unwrap(), (-26, 8));
        assert!(squarefree_part(&big(0)).is_err());
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(&big(-2), &big(3)), 1);
        assert_eq!(kronecker(&big(-1), &big(5)), 1);
        assert_eq!(kronecker(&big(3), &big(11)), 1);
        assert_eq!(kronecker_i64(2, 7), 1);
        assert_eq!(kronecker_i64(3, 7), -1);
        assert_eq!(kronecker_i64(5, 2), -1);
        assert_eq!(kronecker_i64(7, 2), 1);
        assert_eq!(kronecker_i64(6, 3), 0);
        assert_eq!(kronecker_i64(-1, -1), -1);
        let big_a: BigInt = "123456789012345678901".parse().unwrap();
        let big_n: BigInt = "1000000000000000000000007".parse().unwrap();
        // agrees with Euler's criterion for a prime modulus
        let euler = big_a.modpow(&((&big_n - 1) / 2), &big_n);
        let expect = if euler.is_one() { 1 } else { -1 };
        assert_eq!(kronecker(&big_a, &big_n), expect);
    }

    #[test]
    fn kronecker_multiplicative_small() {
        for p in sieve_primes(100).into_iter().skip(1) {
            let p = p as i64;
            for a in -99..100 {
                for b in -99..100 {
                    assert_eq!(
                        kronecker_i64(a, p) * kronecker_i64(b, p),
                        kronecker_i64(a * b, p),
                        "a={a} b={b} p={p}"
                    );
                }
            }
        }
    }

    #[test]
    fn kronecker_big_matches_small() {
        for a in -40i64..40 {
            for n in -40i64..40 {
                if n == 0 {
                    continue;
                }
                assert_eq!(
                    kronecker_big(&big(a), &big(n)),
                    kronecker_i64(a, n),
                    "({a}/{n})"
                );
            }
        }
    }

    #[test]
    fn sieve_examples() {
        assert_eq!(sieve_primes(10), vec![2, 3, 5, 7]);
        let p30 = sieve_primes(30);
        assert_eq!((p30.len(), *p30.last().unwrap()), (10, 29));
        assert_eq!(sieve_primes(1_000_000).len(), 78498);
        assert!(sieve_primes(1).is_empty());
        assert_eq!(sieve_primes(2), vec![2]);
    }

    #[test]
    fn sieve_matches_primality() {
        let primes = sieve_primes(20_000);
        let direct: Vec<u64> = (0..=20_000).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(primes, direct);
    }

    #[test]
    fn modular_square_roots() {
        for p in sieve_primes(2000).into_iter().skip(1) {
            for a in 0..p.min(200) {
                let is_qr = a == 0 || jacobi_u64(a, p) == 1;
                match sqrt_mod_prime(a, p) {
                    Some(r) => assert_eq!(mul_mod(r, r, p), a, "a={a} p={p}"),
                    None => assert!(!is_qr, "missed root of {a} mod {p}"),
                }
            }
        }
        assert_eq!(mod_inverse(&big(3), &big(7)), Some(big(5)));
        assert_eq!(mod_inverse(&big(-3), &big(7)), Some(big(2)));
        assert_eq!(mod_inverse(&big(6), &big(9)), None);
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&big(6272), 2), 7);
        assert_eq!(valuation(&big(-5103), 3), 6);
        assert_eq!(valuation(&big(5), 3), 0);
    }
}
