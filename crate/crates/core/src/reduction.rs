//! Local reduction types over `Q(sqrt(m))` and certification of everywhere
//! good reduction.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::constructor::CurveModel;
use crate::quadfield::{
    FieldElement, FieldError, Localization, PrimeIdeal, ResidueElem, ResidueField,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("model is not integral at {0}")]
    NotIntegral(String),
    #[error("model is singular")]
    Singular,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("Tate's algorithm did not terminate at {0}")]
    NoTermination(String),
    #[error("norm of the discriminant has a prime factor beyond 64 bits: {0}")]
    HugePrime(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kodaira {
    Good,
    I(u32),
    II,
    III,
    IV,
    IStar(u32),
    IIStar,
    IIIStar,
    IVStar,
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::Good => write!(f, "good"),
            Kodaira::I(n) => write!(f, "I{n}"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::IStar(n) => write!(f, "I{n}*"),
            Kodaira::IIStar => write!(f, "II*"),
            Kodaira::IIIStar => write!(f, "III*"),
            Kodaira::IVStar => write!(f, "IV*"),
        }
    }
}

impl Serialize for Kodaira {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Reduction type and minimal discriminant valuation at one prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalReduction {
    pub prime: PrimeIdeal,
    pub kodaira: Kodaira,
    pub v_min_delta: u32,
}

impl LocalReduction {
    pub fn is_good(&self) -> bool {
        self.kodaira == Kodaira::Good
    }
}

impl fmt::Display for LocalReduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P={} type={} v(Dmin)={}",
            self.prime, self.kodaira, self.v_min_delta
        )
    }
}

impl Serialize for LocalReduction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LocalReduction", 7)?;
        st.serialize_field("P", &self.prime.to_string())?;
        st.serialize_field("p", &self.prime.p())?;
        st.serialize_field("kind", &self.prime.kind())?;
        st.serialize_field("root", &self.prime.root())?;
        st.serialize_field("type", &self.kodaira)?;
        st.serialize_field("v_min_delta", &self.v_min_delta)?;
        st.end()
    }
}

// ---------------------------------------------------------------------------
// Local helpers

struct Local {
    loc: Localization,
    f: ResidueField,
    p: u64,
    pi: FieldElement,
}

impl Local {
    fn new(ideal: &PrimeIdeal) -> Self {
        let loc = Localization::new(ideal);
        let f = *loc.residue_field();
        let pi = loc.uniformizer().clone();
        Local {
            loc,
            f,
            p: ideal.p(),
            pi,
        }
    }

    fn v(&self, x: &FieldElement) -> i64 {
        self.loc.val_or_inf(x)
    }

    fn red(&self, x: &FieldElement) -> ResidueElem {
        self.loc
            .reduce(x)
            .expect("reduction of a P-integral element")
    }

    fn lift(&self, r: ResidueElem) -> FieldElement {
        self.loc.lift(r)
    }

    fn unit(&self, x: &FieldElement) -> bool {
        self.v(x) == 0
    }

    fn divisible(&self, x: &FieldElement) -> bool {
        self.v(x) > 0
    }

    fn int(&self, n: i64) -> ResidueElem {
        self.f.from_int(n)
    }

    fn sqrt(&self, x: ResidueElem) -> ResidueElem {
        self.f
            .sqrt(x)
            .expect("square roots exist in characteristic 2")
    }

    fn cbrt(&self, x: ResidueElem) -> ResidueElem {
        self.f
            .cbrt(x)
            .expect("cube roots exist in characteristic 3")
    }

    fn div(&self, x: ResidueElem, y: ResidueElem) -> ResidueElem {
        self.f.div(x, y).expect("division by a unit")
    }

    fn pi_pow(&self, k: u32) -> FieldElement {
        self.pi.pow(k)
    }
}

fn check_integral(e: &CurveModel, l: &Local) -> Result<(), ReductionError> {
    if e.coefficients().iter().any(|a| l.v(a) < 0) {
        return Err(ReductionError::NotIntegral(l.loc.ideal().to_string()));
    }
    Ok(())
}

/// `true` iff `|N(disc)| = 1`. Requires an integral model.
pub fn unit_discriminant(e: &CurveModel) -> Result<bool, ReductionError> {
    if !e.is_integral() {
        return Err(ReductionError::NotIntegral("some prime".into()));
    }
    let n = e.discriminant().norm();
    Ok(n.abs().is_one())
}

fn kodaira_from_minimal(vmin: u32, c4_unit: bool, vj_negative: bool) -> Kodaira {
    if vmin == 0 {
        return Kodaira::Good;
    }
    if c4_unit {
        return Kodaira::I(vmin);
    }
    if vj_negative {
        return Kodaira::IStar(vmin - 6);
    }
    match vmin {
        2 => Kodaira::II,
        3 => Kodaira::III,
        4 => Kodaira::IV,
        6 => Kodaira::IStar(0),
        8 => Kodaira::IVStar,
        9 => Kodaira::IIIStar,
        10 => Kodaira::IIStar,
        _ => unreachable!("additive potentially good reduction with v = {vmin}"),
    }
}

/// Reduction at `P` from valuations of `c4`, `c6`, `disc`. Valid when the
/// residue characteristic is at least 5.
pub fn tate_fast(e: &CurveModel, ideal: &PrimeIdeal) -> Result<LocalReduction, ReductionError> {
    assert!(
        ideal.p() >= 5,
        "fast path needs residue characteristic >= 5"
    );
    let l = Local::new(ideal);
    check_integral(e, &l)?;
    let vd = l
        .loc
        .val(e.discriminant())
        .ok_or(ReductionError::Singular)?;
    let v4 = l.v(e.c4());
    let v6 = l.v(e.c6());
    let k = (v4 / 4).min(v6 / 6).min(vd / 12);
    let vmin = (vd - 12 * k) as u32;
    let v4min = v4.saturating_sub(4 * k);
    let vj = 3 * v4min.min(i64::MAX / 4) - vmin as i64;
    Ok(LocalReduction {
        prime: ideal.clone(),
        kodaira: kodaira_from_minimal(vmin, v4min == 0, vj < 0),
        v_min_delta: vmin,
    })
}

/// Reduction type at `P`; residue characteristic 2 and 3 use the full
/// algorithm, larger characteristics the valuation shortcut.
pub fn tate(e: &CurveModel, ideal: &PrimeIdeal) -> Result<LocalReduction, ReductionError> {
    if ideal.p() >= 5 {
        tate_fast(e, ideal)
    } else {
        tate_full(e, ideal)
    }
}

const MAX_ROUNDS: u32 = 64;

/// Tate's algorithm at `P` for any residue characteristic.
pub fn tate_full(e: &CurveModel, ideal: &PrimeIdeal) -> Result<LocalReduction, ReductionError> {
    let l = Local::new(ideal);
    check_integral(e, &l)?;
    if e.discriminant().is_zero() {
        return Err(ReductionError::Singular);
    }
    let p = l.p;
    let f = l.f;
    let field = e.field();
    let zero = FieldElement::zero(field);
    let pi = l.pi.clone();
    let pi2 = l.pi_pow(2);
    let pi3 = l.pi_pow(3);
    let pi4 = l.pi_pow(4);
    let done = |kodaira, vmin: i64| {
        Ok(LocalReduction {
            prime: ideal.clone(),
            kodaira,
            v_min_delta: vmin as u32,
        })
    };

    let mut c = e.clone();
    for _ in 0..MAX_ROUNDS {
        let vd = l.v(c.discriminant());
        if vd == 0 {
            return done(Kodaira::Good, 0);
        }

        // Move the singular point of the reduction to (0, 0).
        let [a1, a2, a3, a4, a6] = c.coefficients().clone().map(|x| l.red(&x));
        let [b2, b4, b6, _] = c.b_invariants().clone().map(|x| l.red(&x));
        let (r, t) = match p {
            2 => {
                if f.is_zero(b2) {
                    let r = l.sqrt(a4);
                    let rhs = f.add(
                        f.add(f.pow(r, 3), f.mul(a2, f.mul(r, r))),
                        f.add(f.mul(a4, r), a6),
                    );
                    (r, l.sqrt(rhs))
                } else {
                    let r = l.div(a3, a1);
                    let t = l.div(f.add(a4, f.mul(r, r)), a1);
                    (r, t)
                }
            }
            3 => {
                let r = if f.is_zero(b2) {
                    l.cbrt(f.neg(b6))
                } else {
                    f.neg(l.div(b4, b2))
                };
                (r, f.add(f.mul(a1, r), a3))
            }
            _ => {
                let c4 = l.red(c.c4());
                let c6 = l.red(c.c6());
                let r = if f.is_zero(c4) {
                    f.neg(l.div(b2, l.int(12)))
                } else {
                    f.neg(l.div(f.add(c6, f.mul(b2, c4)), f.mul(l.int(12), c4)))
                };
                let t = f.neg(l.div(f.add(f.mul(a1, r), a3), l.int(2)));
                (r, t)
            }
        };
        c = c.rst(&l.lift(r), &zero, &l.lift(t));
        check_integral(&c, &l)?;
        if !(l.divisible(c.a3()) && l.divisible(c.a4()) && l.divisible(c.a6())) {
            return Err(ReductionError::NoTermination(ideal.to_string()));
        }

        let b = c.b_invariants().clone();
        if l.unit(&b[0]) {
            return done(Kodaira::I(vd as u32), vd);
        }
        if l.v(c.a6()) < 2 {
            return done(Kodaira::II, vd);
        }
        if l.v(&b[3]) < 3 {
            return done(Kodaira::III, vd);
        }
        if l.v(&b[2]) < 3 {
            return done(Kodaira::IV, vd);
        }

        // Now P | a1, a2 and P^2 | a3, a4 and P^3 | a6.
        let (s, t) = if p == 2 {
            let s = l.lift(l.sqrt(l.red(c.a2())));
            let t = &pi * &l.lift(l.sqrt(l.red(&(c.a6() / &pi2))));
            (s, t)
        } else if p == 3 {
            (c.a1().clone(), c.a3().clone())
        } else {
            let h = FieldElement::from_rational(field, BigRational::new((-1).into(), 2.into()));
            (c.a1() * &h, c.a3() * &h)
        };
        c = c.rst(&zero, &s, &t);

        let bb = l.red(&(c.a2() / &pi));
        let cc = l.red(&(c.a4() / &pi2));
        let dd = l.red(&(c.a6() / &pi3));
        let sq = |x| f.mul(x, x);
        let w = {
            let t1 = f.mul(l.int(27), sq(dd));
            let t2 = f.mul(sq(bb), sq(cc));
            let t3 = f.mul(l.int(4), f.mul(f.pow(bb, 3), dd));
            let t4 = f.mul(l.int(18), f.mul(bb, f.mul(cc, dd)));
            let t5 = f.mul(l.int(4), f.pow(cc, 3));
            f.add(f.sub(f.add(f.sub(t1, t2), t3), t4), t5)
        };
        let x = f.sub(f.mul(l.int(3), cc), sq(bb));

        if !f.is_zero(w) {
            return done(Kodaira::IStar(0), vd);
        }

        if !f.is_zero(x) {
            // Double root: move it to 0 and count the I_n* subdivisions.
            let r = match p {
                2 => l.sqrt(cc),
                3 => l.div(cc, bb),
                _ => l.div(
                    f.sub(f.mul(bb, cc), f.mul(l.int(9), dd)),
                    f.mul(l.int(2), x),
                ),
            };
            c = c.rst(&(&pi * &l.lift(r)), &zero, &zero);
            let mut ix = 3u32;
            let mut iy = 3u32;
            let mut mx = pi2.clone();
            let mut my = pi2.clone();
            loop {
                let a3t = c.a3() / &my;
                let a6t = &(c.a6() / &mx) / &my;
                if !l.divisible(&(&(&a3t * &a3t) + &(&a6t * 4))) {
                    break;
                }
                let t = if p == 2 {
                    &my * &l.lift(l.sqrt(l.red(&a6t)))
                } else {
                    &my * &l.lift(f.neg(l.div(l.red(&a3t), l.int(2))))
                };
                c = c.rst(&zero, &zero, &t);
                my = &my * &pi;
                iy += 1;
                let a2t = c.a2() / &pi;
                let a4t = &(c.a4() / &pi) / &mx;
                let a6t = &(c.a6() / &mx) / &my;
                if !l.divisible(&(&(&a4t * &a4t) - &(&(&a6t * &a2t) * 4))) {
                    break;
                }
                let r = if p == 2 {
                    &mx * &l.lift(l.sqrt(l.div(l.red(&a6t), l.red(&a2t))))
                } else {
                    &mx * &l.lift(f.neg(l.div(l.red(&a4t), f.mul(l.int(2), l.red(&a2t)))))
                };
                c = c.rst(&r, &zero, &zero);
                mx = &mx * &pi;
                ix += 1;
            }
            return done(Kodaira::IStar(ix + iy - 5), vd);
        }

        // Triple root: move it to 0.
        let r = match p {
            2 => bb,
            3 => l.cbrt(f.neg(dd)),
            _ => f.neg(l.div(bb, l.int(3))),
        };
        c = c.rst(&(&pi * &l.lift(r)), &zero, &zero);
        let x3 = c.a3() / &pi2;
        let x6 = c.a6() / &pi4;
        if !l.divisible(&(&(&x3 * &x3) + &(&x6 * 4))) {
            return done(Kodaira::IVStar, vd);
        }
        let t = if p == 2 {
            -(&pi2 * &l.lift(l.sqrt(l.red(&x6))))
        } else {
            &pi2 * &l.lift(f.neg(l.div(l.red(&x3), l.int(2))))
        };
        c = c.rst(&zero, &zero, &t);
        if l.v(c.a4()) < 4 {
            return done(Kodaira::IIIStar, vd);
        }
        if l.v(c.a6()) < 6 {
            return done(Kodaira::IIStar, vd);
        }
        // Non-minimal: divide through by pi and start again. The integrality
        // check makes every later "good" verdict a certificate: the final
        // model is P-integral, isomorphic to the input and has unit discriminant.
        c = c.scale_down(&pi);
        check_integral(&c, &l)?;
    }
    Err(ReductionError::NoTermination(ideal.to_string()))
}

/// Least positive integer `lambda` with `lambda^i a_i` integral for all `i`.
fn integralizing_scale(e: &CurveModel) -> BigInt {
    let mut lam = BigInt::one();
    for (x, i) in e.coefficients().iter().zip([1u32, 2, 3, 4, 6]) {
        let d = x.denominator();
        // smallest k with d | k^i: product over p^e of p^ceil(e/i)
        if d.is_one() {
            continue;
        }
        let f = arith::factor(&d).expect("nonzero denominator");
        let mut k = BigInt::one();
        for (p, e) in f.factors() {
            k *= num_traits::pow(p.clone(), e.div_ceil(i) as usize);
        }
        lam = num_integer::lcm(lam, k);
    }
    lam
}

/// Certifies everywhere good reduction. Returns `(true, [])` when the
/// discriminant is a unit; otherwise runs the local algorithm at every prime
/// dividing the discriminant and returns the reports ordered by `(p, root)`.
pub fn verify_egr(e: &CurveModel) -> Result<(bool, Vec<LocalReduction>), ReductionError> {
    if e.discriminant().is_zero() {
        return Err(ReductionError::Singular);
    }
    let lam = integralizing_scale(e);
    let model = if lam.is_one() {
        e.clone()
    } else {
        e.scale_up(&lam)
    };
    if unit_discriminant(&model)? {
        return Ok((true, Vec::new()));
    }
    let norm = model.discriminant().norm();
    debug_assert!(norm.is_integer());
    let n = norm.to_integer().abs();
    let fac = arith::factor(&n).expect("nonzero norm");
    let mut ideals = Vec::new();
    for prime in fac.primes() {
        let p = prime
            .to_u64()
            .ok_or_else(|| ReductionError::HugePrime(prime.to_string()))?;
        for ideal in model.field().split_prime(p)? {
            ideals.push(ideal);
        }
    }
    let mut reports: Vec<LocalReduction> = ideals
        .par_iter()
        .filter(|ideal| Localization::new(ideal).val_or_inf(model.discriminant()) > 0)
        .map(|ideal| tate(&model, ideal))
        .collect::<Result<_, _>>()?;
    reports.sort_by(|a, b| (a.prime.p(), a.prime.root()).cmp(&(b.prime.p(), b.prime.root())));
    let egr = reports.iter().all(|r| r.is_good());
    Ok((egr, reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructor::build_curve;
    use crate::quadfield::{rat, QuadraticField};

    fn k(m: i64) -> QuadraticField {
        QuadraticField::new(m).unwrap()
    }

    fn el(m: i64, a: i64, b: i64) -> FieldElement {
        FieldElement::from_ints(k(m), a, b)
    }

    fn short(m: i64, a4: i64, a6: i64) -> CurveModel {
        CurveModel::short(k(m), el(m, a4, 0), el(m, a6, 0)).unwrap()
    }

    fn unit_disc_curve() -> CurveModel {
        let f = k(29);
        let a = FieldElement::new(
            f,
            BigRational::new(5.into(), 2.into()),
            BigRational::new(1.into(), 2.into()),
        );
        let z = FieldElement::zero(f);
        CurveModel::new(f, [FieldElement::one(f), z.clone(), &a * &a, z.clone(), z]).unwrap()
    }

    #[test]
    fn unit_disc_curve_has_unit_discriminant() {
        let e = unit_disc_curve();
        assert!(e.is_integral());
        assert!(unit_discriminant(&e).unwrap());
        assert_eq!(verify_egr(&e).unwrap(), (true, vec![]));
        let p29 = &k(29).split_prime(29).unwrap()[0];
        assert!(tate(&e, p29).unwrap().is_good());
    }

    #[test]
    fn types_of_rational_curves_at_unramified_primes() {
        // Reduction types of curves over Q do not change in an unramified
        // extension. Each prime below is inert in the chosen field.
        let minus_x = short(5, -1, 0); // conductor 32
        let plus_one = short(2, 0, 1); // conductor 36
        let plus_five = short(2, 0, 5);
        let cases = [
            (&minus_x, 5, 2, Kodaira::III, 6),
            (&plus_one, 2, 3, Kodaira::III, 3),
            (&plus_five, 2, 5, Kodaira::II, 2),
        ];
        for (e, m, p, kod, v) in cases {
            let ideal = &k(m).split_prime(p).unwrap()[0];
            assert_eq!(ideal.kind(), crate::quadfield::PrimeKind::Inert);
            let r = tate_full(e, ideal).unwrap();
            assert_eq!((r.kodaira, r.v_min_delta), (kod, v), "p={p}");
        }
        let plus_one_5 = short(5, 0, 1);
        let p2 = &k(5).split_prime(2).unwrap()[0];
        let r = tate_full(&plus_one_5, p2).unwrap();
        assert_eq!((r.kodaira, r.v_min_delta), (Kodaira::IV, 4));
        // conductor 11: y^2 + y = x^3 - x^2 - 10x - 20, split multiplicative I5
        let f = k(2);
        let e = CurveModel::new(
            f,
            [
                el(2, 0, 0),
                el(2, -1, 0),
                el(2, 1, 0),
                el(2, -10, 0),
                el(2, -20, 0),
            ],
        )
        .unwrap();
        let p11 = &f.split_prime(11).unwrap()[0];
        let r = tate_full(&e, p11).unwrap();
        assert_eq!((r.kodaira, r.v_min_delta), (Kodaira::I(5), 5));
        assert_eq!(tate_fast(&e, p11).unwrap(), r);
        let p5 = &f.split_prime(5).unwrap()[0];
        assert_eq!(
            tate_fast(&plus_five, p5).unwrap(),
            tate_full(&plus_five, p5).unwrap()
        );
    }

    #[test]
    fn additive_star_types() {
        // 5 is inert in Q(sqrt 2)
        let p5 = &k(2).split_prime(5).unwrap()[0];
        let cases = [
            (-25, 0, Kodaira::IStar(0), 6),
            (0, 625, Kodaira::IVStar, 8),
            (125, 0, Kodaira::IIIStar, 9),
            (0, 3125, Kodaira::IIStar, 10),
            (-75, 875, Kodaira::IStar(1), 7),
        ];
        for (a4, a6, kod, v) in cases {
            let e = short(2, a4, a6);
            let r = tate_full(&e, p5).unwrap();
            assert_eq!((r.kodaira, r.v_min_delta), (kod, v), "a4={a4} a6={a6}");
            assert_eq!(tate_fast(&e, p5).unwrap(), r);
        }
    }

    #[test]
    fn non_minimal_models_are_reduced() {
        // 7 is inert in Q(sqrt 3); both models are 7^k twists of good ones
        let e = short(3, 0, 117649 * 2);
        let p7 = &k(3).split_prime(7).unwrap()[0];
        let r = tate_full(&e, p7).unwrap();
        assert_eq!(r, tate_fast(&e, p7).unwrap());
        let e = short(3, 7i64.pow(4), 7i64.pow(6));
        let r = tate_full(&e, p7).unwrap();
        assert!(r.is_good());
        assert_eq!(r.v_min_delta, 0);
    }

    #[test]
    fn ramified_primes_and_witness_curve() {
        let e = build_curve(20, &el(6, -84, -42)).unwrap();
        assert!(!unit_discriminant(&e).unwrap());
        let (egr, reports) = verify_egr(&e).unwrap();
        assert!(egr, "{reports:?}");
        let ps: Vec<u64> = reports.iter().map(|r| r.prime.p()).collect();
        assert!(ps.contains(&2) && ps.contains(&3));
        let p2 = &k(6).split_prime(2).unwrap()[0];
        assert!(tate(&e, p2).unwrap().is_good());
    }

    #[test]
    fn bad_reduction_detected() {
        let e = CurveModel::short(k(6), FieldElement::zero(k(6)), k(6).sqrt_m()).unwrap();
        let (egr, reports) = verify_egr(&e).unwrap();
        assert!(!egr);
        let bad: Vec<u64> = reports
            .iter()
            .filter(|r| !r.is_good())
            .map(|r| r.prime.p())
            .collect();
        assert!(bad.contains(&2) && bad.contains(&3));
        let y = short(6, 0, 1);
        assert!(!unit_discriminant(&y).unwrap());
        assert_eq!(
            y.discriminant(),
            &FieldElement::from_rational(k(6), rat(-432))
        );
    }

    #[test]
    fn report_rendering() {
        let e = build_curve(20, &el(6, -84, -42)).unwrap();
        let (_, reports) = verify_egr(&e).unwrap();
        let line = reports[0].to_string();
        assert_eq!(line, "P=(2, sqrt(6)-0) type=good v(Dmin)=0");
    }
}
