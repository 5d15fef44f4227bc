use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{FieldElement, FieldError, QuadraticField, ResidueElem, ResidueField};
use crate::arith;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimeKind {
    Split,
    Inert,
    Ramified,
}

/// A prime ideal of `O_K` above a rational prime `p`.
///
/// For split and ramified primes `root` identifies the ideal: it is the
/// residue `c` of `sqrt(m)` modulo `p`, so the ideal is `(p, sqrt(m) - c)`.
/// When 2 splits (`m = 1 mod 8`) the two ideals agree mod 2, and `root` is
/// instead the 2-adic square root of `m` taken mod 4 (1 or 3).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimeIdeal {
    field: QuadraticField,
    p: u64,
    kind: PrimeKind,
    root: Option<u64>,
}

impl PrimeIdeal {
    pub(super) fn above(field: QuadraticField, p: u64) -> Result<Vec<PrimeIdeal>, FieldError> {
        if !arith::is_prime_u64(p) {
            return Err(FieldError::NotPrime(p));
        }
        let m = field.m();
        let ideal = |kind, root| PrimeIdeal {
            field,
            p,
            kind,
            root,
        };
        let symbol = arith::kronecker_i64(field.discriminant(), p as i64);
        Ok(match symbol {
            0 => {
                let c = if p == 2 { m.rem_euclid(2) as u64 } else { 0 };
                vec![ideal(PrimeKind::Ramified, Some(c))]
            }
            -1 => vec![ideal(PrimeKind::Inert, None)],
            _ => {
                let (c1, c2) = if p == 2 {
                    (1, 3)
                } else {
                    let c = arith::sqrt_mod_prime(m.rem_euclid(p as i64) as u64, p)
                        .expect("split prime has a square root of m");
                    (c.min(p - c), c.max(p - c))
                };
                vec![
                    ideal(PrimeKind::Split, Some(c1)),
                    ideal(PrimeKind::Split, Some(c2)),
                ]
            }
        })
    }

    pub fn field(&self) -> QuadraticField {
        self.field
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn kind(&self) -> PrimeKind {
        self.kind
    }

    pub fn root(&self) -> Option<u64> {
        self.root
    }

    pub fn residue_degree(&self) -> u32 {
        if self.kind == PrimeKind::Inert {
            2
        } else {
            1
        }
    }

    pub fn ramification_index(&self) -> u32 {
        if self.kind == PrimeKind::Ramified {
            2
        } else {
            1
        }
    }
}

impl PartialOrd for PrimeIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PrimeIdeal {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.field, self.p, self.root).cmp(&(other.field, other.p, other.root))
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.root {
            None => write!(f, "({})", self.p),
            Some(c) => write!(f, "({}, sqrt({})-{})", self.p, self.field.m(), c),
        }
    }
}

/// Local data at a prime ideal: uniformizer, residue field, valuation and
/// reduction maps.
///
/// Valuations at inert and ramified primes come from the norm, since there
/// is a single prime above `p`. At split primes the element is embedded in
/// `Z_p` through a Hensel-lifted square root of `m`.
#[derive(Debug, Clone)]
pub struct Localization {
    ideal: PrimeIdeal,
    pi: FieldElement,
    residue: ResidueField,
    theta_image: u64,
}

fn rational_valuation(r: &BigRational, p: u64) -> i64 {
    arith::valuation(r.numer(), p) as i64 - arith::valuation(r.denom(), p) as i64
}

fn mod_p_of(r: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = r.denom().mod_floor(&pb);
    if den.is_zero() {
        return None;
    }
    let inv = arith::mod_inverse(&den, &pb)?;
    Some((r.numer() * inv).mod_floor(&pb).to_u64().unwrap())
}

impl Localization {
    pub fn new(ideal: &PrimeIdeal) -> Self {
        let field = ideal.field;
        let m = field.m();
        let p = ideal.p;
        let (t, n) = field.theta_trace_norm();
        let pi = match ideal.kind {
            PrimeKind::Split | PrimeKind::Inert => field.int(p as i64),
            PrimeKind::Ramified if p == 2 && m.rem_euclid(4) == 3 => {
                FieldElement::from_ints(field, 1, 1)
            }
            PrimeKind::Ramified => field.sqrt_m(),
        };
        let residue = match ideal.kind {
            PrimeKind::Inert => ResidueField::quadratic(p, t, n),
            _ => ResidueField::prime(p),
        };
        // image of theta in the residue field (ramified case only is used)
        let theta_image = match (ideal.kind, ideal.root) {
            (PrimeKind::Ramified, Some(c)) => {
                if m.rem_euclid(4) == 1 {
                    // theta = (1 + sqrt m)/2, p odd here
                    ((1 + c) * p.div_ceil(2)) % p
                } else {
                    c % p
                }
            }
            _ => 0,
        };
        Localization {
            ideal: ideal.clone(),
            pi,
            residue,
            theta_image,
        }
    }

    pub fn ideal(&self) -> &PrimeIdeal {
        &self.ideal
    }

    pub fn uniformizer(&self) -> &FieldElement {
        &self.pi
    }

    pub fn residue_field(&self) -> &ResidueField {
        &self.residue
    }

    /// A square root of `m` in `Z_p` modulo `p^prec`, on the branch fixed by
    /// the ideal's root. Split primes only.
    fn padic_sqrt(&self, prec: u32) -> BigInt {
        let p = self.ideal.p;
        let m = BigInt::from(self.ideal.field.m());
        let c = self.ideal.root.expect("split prime has a root");
        if p == 2 {
            let k_top = prec.max(1) + 2;
            let mut s = BigInt::one();
            for k in 3..=k_top {
                let modk1 = BigInt::one() << (k + 1);
                if (&s * &s - &m).mod_floor(&modk1) != BigInt::zero() {
                    s += BigInt::one() << (k - 1);
                }
            }
            let four = BigInt::from(4);
            if s.mod_floor(&four) != BigInt::from(c) {
                s = -s;
            }
            return s.mod_floor(&(BigInt::one() << prec));
        }
        let pb = BigInt::from(p);
        let mut s = BigInt::from(c);
        let mut cur = 1u32;
        while cur < prec {
            cur = (2 * cur).min(prec);
            let modulus = num_traits::pow(pb.clone(), cur as usize);
            let inv = arith::mod_inverse(&(BigInt::from(2) * &s), &modulus)
                .expect("2s is a unit at an odd split prime");
            s = (&s - (&s * &s - &m) * inv).mod_floor(&modulus);
        }
        s.mod_floor(&num_traits::pow(pb, prec as usize))
    }

    /// `(A, B, d)` with `x = (A + B sqrt m)/d`.
    fn integer_form(x: &FieldElement) -> (BigInt, BigInt, BigInt) {
        let d = x.a().denom().lcm(x.b().denom());
        let big_a = x.a().numer() * (&d / x.a().denom());
        let big_b = x.b().numer() * (&d / x.b().denom());
        (big_a, big_b, d)
    }

    /// Valuation at the ideal; `None` for zero.
    pub fn val(&self, x: &FieldElement) -> Option<i64> {
        if x.is_zero() {
            return None;
        }
        let p = self.ideal.p;
        Some(match self.ideal.kind {
            PrimeKind::Inert => rational_valuation(&x.norm(), p) / 2,
            PrimeKind::Ramified => rational_valuation(&x.norm(), p),
            PrimeKind::Split => {
                let (a, b, d) = Self::integer_form(x);
                let m = BigInt::from(self.ideal.field.m());
                let n = &a * &a - &m * &b * &b;
                let prec = arith::valuation(&n, p) + 1;
                let s = self.padic_sqrt(prec);
                let modulus = num_traits::pow(BigInt::from(p), prec as usize);
                let z = (a + b * s).mod_floor(&modulus);
                debug_assert!(!z.is_zero());
                arith::valuation(&z, p) as i64 - arith::valuation(&d, p) as i64
            }
        })
    }

    /// Valuation with zero mapped to `i64::MAX`.
    pub fn val_or_inf(&self, x: &FieldElement) -> i64 {
        self.val(x).unwrap_or(i64::MAX)
    }

    /// Image in the residue field of an element with nonnegative valuation.
    pub fn reduce(&self, x: &FieldElement) -> Result<ResidueElem, FieldError> {
        let p = self.ideal.p;
        let negative = || FieldError::NegativeValuation {
            element: x.to_string(),
            ideal: self.ideal.to_string(),
        };
        match self.ideal.kind {
            PrimeKind::Split => {
                let (a, b, d) = Self::integer_form(x);
                let k = arith::valuation(&d, p);
                let pk = num_traits::pow(BigInt::from(p), k as usize);
                let s = self.padic_sqrt(k + 1);
                let z = (a + b * s).mod_floor(&(&pk * p));
                if !(&z % &pk).is_zero() {
                    return Err(negative());
                }
                let top = &z / &pk;
                let unit = &d / &pk;
                let pb = BigInt::from(p);
                let inv = arith::mod_inverse(&unit, &pb).expect("unit mod p");
                Ok(self
                    .residue
                    .from_int((top * inv).mod_floor(&pb).to_i64().unwrap()))
            }
            PrimeKind::Inert | PrimeKind::Ramified => {
                let (x0, x1) = x.theta_coords();
                let r0 = mod_p_of(&x0, p).ok_or_else(negative)?;
                let r1 = mod_p_of(&x1, p).ok_or_else(negative)?;
                if self.ideal.kind == PrimeKind::Inert {
                    Ok(self.residue.elem(r0, r1))
                } else {
                    let v = (r0 as u128 + r1 as u128 * self.theta_image as u128) % p as u128;
                    Ok(self.residue.elem(v as u64, 0))
                }
            }
        }
    }

    /// A representative in `O_K` of a residue class.
    pub fn lift(&self, r: ResidueElem) -> FieldElement {
        let field = self.ideal.field;
        let base = field.int(r.0 as i64);
        if r.1 == 0 {
            base
        } else {
            &base + &(&field.theta() * r.1 as i64)
        }
    }
}

/// `P`-adic valuation of a nonzero element.
pub fn valuation(x: &FieldElement, ideal: &PrimeIdeal) -> Result<i64, FieldError> {
    assert_eq!(
        x.field(),
        ideal.field,
        "element and ideal in different fields"
    );
    Localization::new(ideal)
        .val(x)
        .ok_or(FieldError::ZeroValuation)
}

/// Class of an integral element in `O_K / P^k`, as its first `k` digits in
/// the `pi`-adic expansion (digits are canonical residue representatives).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueClass {
    pub ideal: PrimeIdeal,
    pub digits: Vec<ResidueElem>,
}

impl ResidueClass {
    /// The residue-field image (the first digit).
    pub fn leading(&self) -> ResidueElem {
        self.digits[0]
    }
}

pub fn residue(x: &FieldElement, ideal: &PrimeIdeal, k: u32) -> Result<ResidueClass, FieldError> {
    assert!(k >= 1, "residue needs k >= 1");
    if !x.is_integral() {
        return Err(FieldError::NotIntegral(x.to_string()));
    }
    let loc = Localization::new(ideal);
    let mut digits = Vec::with_capacity(k as usize);
    let mut cur = x.clone();
    for i in 0..k {
        let d = loc.reduce(&cur)?;
        digits.push(d);
        if i + 1 < k {
            cur = &(&cur - &loc.lift(d)) / loc.uniformizer();
        }
    }
    Ok(ResidueClass {
        ideal: ideal.clone(),
        digits,
    })
}
