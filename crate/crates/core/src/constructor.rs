//! Witness curves: rational points on the norm conic, the integral element
//! `beta`, the twist parameter `u`, and the curve `E_{u,A}` itself.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::quadfield::{format_rational, rat, FieldElement, FieldError, QuadraticField};
use crate::reduction::{self, LocalReduction, ReductionError};
use crate::setzer::{self, GoodDRecord};

pub const DEFAULT_RETRY_CAP: usize = 8;

/// Largest box height tried by the conic search.
pub const SEARCH_CAP: i128 = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("x^2 - {m} y^2 = {c} z^2 has no nontrivial rational solution")]
    Unsolvable { m: i64, c: i64 },
    #[error("no solution of x^2 - {m} y^2 = {c} z^2 with height <= {bound}")]
    Exhausted { m: i64, c: i64, bound: i128 },
    #[error("{0} has an even denominator; no odd multiple is integral")]
    EvenDenominator(String),
    #[error("u must be nonzero")]
    ZeroU,
    #[error("the model is singular (zero discriminant)")]
    Singular,
    #[error("D*q = {d}*{q} does not equal m = {m}")]
    Mismatch { m: i64, d: i64, q: i64 },
    #[error("no candidate curve verified after {tried} conic solutions")]
    RetryCapExhausted { tried: usize },
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

// ---------------------------------------------------------------------------
// Hilbert symbols and local solvability

fn split_p(mut a: i128, p: i128) -> (u32, i128) {
    let mut k = 0;
    while a % p == 0 {
        a /= p;
        k += 1;
    }
    (k, a)
}

fn legendre(u: i128, p: u64) -> i32 {
    let r = u.rem_euclid(p as i128) as u64;
    arith::jacobi_u64(r, p) as i32
}

/// Hilbert symbol `(a, b)_p` for nonzero integers; `p = None` is the real
/// place.
pub fn hilbert_symbol(a: i128, b: i128, p: Option<u64>) -> i32 {
    assert!(a != 0 && b != 0, "hilbert symbol of zero");
    let p = match p {
        None => return if a < 0 && b < 0 { -1 } else { 1 },
        Some(p) => p,
    };
    let (al, u) = split_p(a, p as i128);
    let (be, v) = split_p(b, p as i128);
    if p == 2 {
        let eps = |x: i128| ((x - 1) / 2).rem_euclid(2);
        let omega = |x: i128| ((x * x - 1) / 8).rem_euclid(2);
        let e = eps(u) * eps(v) + al as i128 * omega(v) + be as i128 * omega(u);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        let mut s = 1;
        if (al as u64 * be as u64 * ((p - 1) / 2)) % 2 == 1 {
            s = -s;
        }
        if be % 2 == 1 {
            s *= legendre(u, p);
        }
        if al % 2 == 1 {
            s *= legendre(v, p);
        }
        s
    }
}

/// Whether `x^2 - m y^2 = c z^2` has a nontrivial rational solution, by the
/// local-global principle for conics.
pub fn norm_equation_solvable(m: i64, c: i64) -> bool {
    assert!(m != 0 && c != 0);
    if hilbert_symbol(m as i128, c as i128, None) != 1 {
        return false;
    }
    let mut primes: Vec<u64> = vec![2];
    for n in [m, c] {
        primes.extend(
            arith::factor_u64(n.unsigned_abs())
                .into_iter()
                .map(|(p, _)| p),
        );
    }
    primes.sort_unstable();
    primes.dedup();
    primes
        .into_iter()
        .all(|p| hilbert_symbol(m as i128, c as i128, Some(p)) == 1)
}

// ---------------------------------------------------------------------------
// Conic search

/// A solution of `x^2 - m y^2 = c z^2` with `z != 0` and the element
/// `alpha = (x + y sqrt(m))/z` of norm `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConicSolution {
    pub m: i64,
    pub c: i64,
    #[serde(serialize_with = "ser_display")]
    pub x: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub y: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub z: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub alpha: FieldElement,
}

fn ser_display<T: fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl ConicSolution {
    pub fn holds(&self) -> bool {
        let lhs = &self.x * &self.x - BigInt::from(self.m) * &self.y * &self.y;
        !self.z.is_zero() && lhs == BigInt::from(self.c) * &self.z * &self.z
    }
}

/// Primitive solutions with `x, y >= 0` in a deterministic order: box height
/// `H` doubles from 1; within a box, odd `z` ascending, then `y` ascending.
/// Even `z` is only visited after the odd pass reaches the cap.
#[derive(Debug, Clone)]
pub struct NormSolutions {
    field: QuadraticField,
    m: i128,
    c: i128,
    h: i128,
    z: i128,
    y: i128,
    even_pass: bool,
    done: bool,
}

impl NormSolutions {
    pub fn new(m: i64, c: i64) -> Result<Self, ConstructError> {
        let field = QuadraticField::new(m)?;
        if c == 0 {
            return Err(ConstructError::Unsolvable { m, c });
        }
        Ok(NormSolutions {
            field,
            m: m as i128,
            c: c as i128,
            h: 1,
            z: 1,
            y: 0,
            even_pass: false,
            done: false,
        })
    }

    fn first_z(&self) -> i128 {
        if self.even_pass {
            2
        } else {
            1
        }
    }

    /// Moves to the next `(z, y)` pair not covered by a smaller box.
    fn advance(&mut self) {
        loop {
            self.y += 1;
            if self.y > self.h {
                self.y = 0;
                self.z += 2;
                if self.z > self.h {
                    self.h *= 2;
                    self.z = self.first_z();
                    if self.h > SEARCH_CAP {
                        if self.even_pass {
                            self.done = true;
                            return;
                        }
                        self.even_pass = true;
                        self.h = 2;
                        self.z = 2;
                    }
                }
            }
            let prev = self.h / 2;
            if !(self.h > 1 && self.z <= prev && self.y <= prev) {
                return;
            }
        }
    }

    fn test(&self) -> Option<(i128, i128, i128)> {
        let (z, y) = (self.z, self.y);
        let v = self
            .c
            .checked_mul(z * z)?
            .checked_add(self.m.checked_mul(y * y)?)?;
        if v < 0 {
            return None;
        }
        let x = (v as u128).sqrt() as i128;
        if x * x != v || x.gcd(&y).gcd(&z) != 1 {
            return None;
        }
        Some((x, y, z))
    }
}

impl Iterator for NormSolutions {
    type Item = ConicSolution;

    fn next(&mut self) -> Option<ConicSolution> {
        while !self.done {
            let hit = self.test();
            self.advance();
            if let Some((x, y, z)) = hit {
                let alpha = FieldElement::new(
                    self.field,
                    BigRational::new(x.into(), z.into()),
                    BigRational::new(y.into(), z.into()),
                );
                return Some(ConicSolution {
                    m: self.field.m(),
                    c: self.c as i64,
                    x: x.into(),
                    y: y.into(),
                    z: z.into(),
                    alpha,
                });
            }
        }
        None
    }
}

/// First solution of `x^2 - m y^2 = c z^2` in search order.
pub fn solve_norm_equation(m: i64, c: i64) -> Result<ConicSolution, ConstructError> {
    let mut it = NormSolutions::new(m, c)?;
    if !norm_equation_solvable(m, c) {
        return Err(ConstructError::Unsolvable { m, c });
    }
    it.next().ok_or(ConstructError::Exhausted {
        m,
        c,
        bound: SEARCH_CAP,
    })
}

/// `(n * alpha, n)` with `n` the least positive integer making `n * alpha`
/// integral; that `n` must be odd.
pub fn integralize(alpha: &FieldElement) -> Result<(FieldElement, BigInt), ConstructError> {
    let n = alpha.denominator();
    if n.is_even() {
        return Err(ConstructError::EvenDenominator(alpha.to_string()));
    }
    Ok((alpha.scale(&BigRational::from_integer(n.clone())), n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum UBranch {
    #[serde(rename = "+beta*d1")]
    Plus,
    #[serde(rename = "-beta*d1")]
    Minus,
    #[serde(rename = "+beta*d1*rho")]
    PlusRho,
    #[serde(rename = "-beta*d1*rho")]
    MinusRho,
}

impl fmt::Display for UBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UBranch::Plus => "+beta*d1",
            UBranch::Minus => "-beta*d1",
            UBranch::PlusRho => "+beta*d1*rho",
            UBranch::MinusRho => "-beta*d1*rho",
        })
    }
}

/// `(m + 1)/2 + sqrt(m)`.
pub fn rho(field: QuadraticField) -> FieldElement {
    let m = field.m();
    FieldElement::new(field, BigRational::new((m + 1).into(), 2.into()), rat(1))
}

/// Twist parameters to try, in order: `+-beta*d1`, then for `m = 3 (mod 4)`
/// also `+-beta*d1*rho`.
pub fn u_candidates(beta: &FieldElement, d1: u64) -> Vec<(FieldElement, UBranch)> {
    let field = beta.field();
    let base = beta * &FieldElement::from_integer(field, d1);
    let mut out = vec![(base.clone(), UBranch::Plus), (-&base, UBranch::Minus)];
    if field.m().rem_euclid(4) == 3 {
        let with_rho = &base * &rho(field);
        out.push((with_rho.clone(), UBranch::PlusRho));
        out.push((-with_rho, UBranch::MinusRho));
    }
    out
}

// ---------------------------------------------------------------------------
// Weierstrass models

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` over `Q(sqrt(m))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveModel {
    field: QuadraticField,
    a: [FieldElement; 5],
    b: [FieldElement; 4],
    c4: FieldElement,
    c6: FieldElement,
    disc: FieldElement,
}

pub const COEFF_NAMES: [&str; 5] = ["a1", "a2", "a3", "a4", "a6"];

impl CurveModel {
    pub fn new(field: QuadraticField, a: [FieldElement; 5]) -> Result<Self, ConstructError> {
        let e = Self::unchecked(field, a);
        if e.disc.is_zero() {
            return Err(ConstructError::Singular);
        }
        Ok(e)
    }

    pub fn short(
        field: QuadraticField,
        a4: FieldElement,
        a6: FieldElement,
    ) -> Result<Self, ConstructError> {
        let z = FieldElement::zero(field);
        Self::new(field, [z.clone(), z.clone(), z, a4, a6])
    }

    pub(crate) fn unchecked(field: QuadraticField, a: [FieldElement; 5]) -> Self {
        for x in &a {
            assert_eq!(x.field(), field, "coefficient from another field");
        }
        let [a1, a2, a3, a4, a6] = &a;
        let b2 = a1 * a1 + a2 * 4;
        let b4 = a4 * 2 + a1 * a3;
        let b6 = a3 * a3 + a6 * 4;
        let b8 = a1 * a1 * a6 + a2 * a6 * 4 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        let c4 = &b2 * &b2 - &b4 * 24;
        let c6 = -(&b2 * &b2 * &b2) + &b2 * &b4 * 36 - &b6 * 216;
        let disc = -(&b2 * &b2 * &b8) - &b4 * &b4 * &b4 * 8 - &b6 * &b6 * 27 + &b2 * &b4 * &b6 * 9;
        CurveModel {
            field,
            a,
            b: [b2, b4, b6, b8],
            c4,
            c6,
            disc,
        }
    }

    pub fn field(&self) -> QuadraticField {
        self.field
    }

    /// `[a1, a2, a3, a4, a6]`.
    pub fn coefficients(&self) -> &[FieldElement; 5] {
        &self.a
    }

    pub fn a1(&self) -> &FieldElement {
        &self.a[0]
    }
    pub fn a2(&self) -> &FieldElement {
        &self.a[1]
    }
    pub fn a3(&self) -> &FieldElement {
        &self.a[2]
    }
    pub fn a4(&self) -> &FieldElement {
        &self.a[3]
    }
    pub fn a6(&self) -> &FieldElement {
        &self.a[4]
    }

    /// `[b2, b4, b6, b8]`.
    pub fn b_invariants(&self) -> &[FieldElement; 4] {
        &self.b
    }

    pub fn c4(&self) -> &FieldElement {
        &self.c4
    }

    pub fn c6(&self) -> &FieldElement {
        &self.c6
    }

    pub fn discriminant(&self) -> &FieldElement {
        &self.disc
    }

    pub fn j_invariant(&self) -> FieldElement {
        &(&(&self.c4 * &self.c4) * &self.c4) / &self.disc
    }

    pub fn is_integral(&self) -> bool {
        self.a.iter().all(|x| x.is_integral())
    }

    /// The model after `x = x' + r`, `y = y' + s x' + t`.
    pub fn rst(&self, r: &FieldElement, s: &FieldElement, t: &FieldElement) -> CurveModel {
        let [a1, a2, a3, a4, a6] = &self.a;
        let n1 = a1 + &(s * 2);
        let n2 = a2 - &(s * a1) + &(r * 3) - &(s * s);
        let n3 = a3 + &(r * a1) + &(t * 2);
        let n4 =
            a4 - &(s * a3) + &(r * a2 * 2) - &((t + &(r * s)) * a1) + &(r * r * 3) - &(s * t * 2);
        let n6 =
            a6 + &(r * a4) + &(r * r * a2) + &(r * r * r) - &(t * a3) - &(t * t) - &(r * t * a1);
        CurveModel::unchecked(self.field, [n1, n2, n3, n4, n6])
    }

    /// Divides `a_i` by `u^i` (the model for `x = u^2 x'`, `y = u^3 y'`).
    pub fn scale_down(&self, u: &FieldElement) -> CurveModel {
        let mut out = self.a.clone();
        for (x, e) in out.iter_mut().zip([1u32, 2, 3, 4, 6]) {
            *x = &*x / &u.pow(e);
        }
        CurveModel::unchecked(self.field, out)
    }

    /// Multiplies `a_i` by `lambda^i`.
    pub fn scale_up(&self, lambda: &BigInt) -> CurveModel {
        let exps = [1usize, 2, 3, 4, 6];
        let mut out = self.a.clone();
        for (i, e) in exps.iter().enumerate() {
            let k = BigRational::from_integer(num_traits::pow(lambda.clone(), *e));
            out[i] = out[i].scale(&k);
        }
        CurveModel::unchecked(self.field, out)
    }

    pub fn record(&self) -> CurveRecord {
        let pair = |x: &FieldElement| [format_rational(x.a()), format_rational(x.b())];
        CurveRecord {
            m: self.field.m(),
            a1: pair(&self.a[0]),
            a2: pair(&self.a[1]),
            a3: pair(&self.a[2]),
            a4: pair(&self.a[3]),
            a6: pair(&self.a[4]),
        }
    }

    /// The line-oriented curve file: `m <int>` then one `<rat> <rat>` line
    /// per coefficient.
    pub fn to_file_string(&self) -> String {
        let mut s = format!("m {}\n", self.field.m());
        for (name, x) in COEFF_NAMES.iter().zip(&self.a) {
            s.push_str(&format!(
                "{} {} {}\n",
                name,
                format_rational(x.a()),
                format_rational(x.b())
            ));
        }
        s
    }
}

impl fmt::Display for CurveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4, a6] = &self.a;
        write!(
            f,
            "y^2 + ({a1}) xy + ({a3}) y = x^3 + ({a2}) x^2 + ({a4}) x + ({a6}) over Q(sqrt({}))",
            self.field.m()
        )
    }
}

/// Machine-readable curve: `m` and each coefficient as `[a, b]` rationals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveRecord {
    pub m: i64,
    pub a1: [String; 2],
    pub a2: [String; 2],
    pub a3: [String; 2],
    pub a4: [String; 2],
    pub a6: [String; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct CurveParseError {
    pub line: usize,
    pub msg: String,
}

fn parse_rational(tok: &str, line: usize) -> Result<BigRational, CurveParseError> {
    let err = || CurveParseError {
        line,
        msg: format!("bad rational {tok:?}"),
    };
    let (n, d) = match tok.split_once('/') {
        Some((n, d)) => (n, d),
        None => (tok, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| err())?;
    let d = BigInt::from_str(d).map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(n, d))
}

impl FromStr for CurveModel {
    type Err = CurveParseError;

    /// Parses the curve file format. Blank lines and `#` comments are
    /// skipped; coefficient lines may carry an optional `a1`..`a6` label.
    fn from_str(s: &str) -> Result<CurveModel, CurveParseError> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, first) = lines.next().ok_or(CurveParseError {
            line: 0,
            msg: "empty curve file".into(),
        })?;
        let toks: Vec<&str> = first.split_whitespace().collect();
        let m = match toks.as_slice() {
            ["m", v] => v.parse::<i64>().map_err(|_| CurveParseError {
                line: ln,
                msg: format!("bad integer {v:?}"),
            })?,
            _ => {
                return Err(CurveParseError {
                    line: ln,
                    msg: "expected `m <integer>`".into(),
                })
            }
        };
        let field = QuadraticField::new(m).map_err(|e| CurveParseError {
            line: ln,
            msg: e.to_string(),
        })?;
        let mut coeffs = Vec::with_capacity(5);
        for name in COEFF_NAMES {
            let (ln, l) = lines.next().ok_or(CurveParseError {
                line: 0,
                msg: format!("missing {name}"),
            })?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            let pair = match toks.as_slice() {
                [a, b] => [*a, *b],
                [label, a, b] if *label == name => [*a, *b],
                _ => {
                    return Err(CurveParseError {
                        line: ln,
                        msg: format!("expected `{name} <rat> <rat>`"),
                    })
                }
            };
            coeffs.push(FieldElement::new(
                field,
                parse_rational(pair[0], ln)?,
                parse_rational(pair[1], ln)?,
            ));
        }
        if let Some((ln, _)) = lines.next() {
            return Err(CurveParseError {
                line: ln,
                msg: "trailing content".into(),
            });
        }
        let a: [FieldElement; 5] = coeffs.try_into().expect("five coefficients");
        CurveModel::new(field, a).map_err(|e| CurveParseError {
            line: 0,
            msg: e.to_string(),
        })
    }
}

/// `E_{u,A}: y^2 = x^3 - 3A(A^3 - 1728)u^2 x - 2(A^3 - 1728)^2 u^3`.
pub fn build_curve(a: i64, u: &FieldElement) -> Result<CurveModel, ConstructError> {
    if u.is_zero() {
        return Err(ConstructError::ZeroU);
    }
    let field = u.field();
    let k: BigInt = BigInt::from(a).pow(3) - 1728;
    if k.is_zero() {
        return Err(ConstructError::Singular);
    }
    let u2 = u * u;
    let u3 = &u2 * u;
    let a4 = u2.scale(&BigRational::from_integer(BigInt::from(-3 * a) * &k));
    let a6 = u3.scale(&BigRational::from_integer(BigInt::from(-2) * &k * &k));
    CurveModel::short(field, a4, a6)
}

// ---------------------------------------------------------------------------
// Witness construction

/// A verified curve with everywhere good reduction and rational `j`.
#[derive(Debug, Clone)]
pub struct Witness {
    pub record: GoodDRecord,
    pub q: i64,
    pub conic: ConicSolution,
    pub beta: FieldElement,
    pub n: BigInt,
    pub u: FieldElement,
    pub branch: UBranch,
    pub curve: CurveModel,
    pub reports: Vec<LocalReduction>,
    /// Number of conic solutions consumed (1 when the first one worked).
    pub attempts: usize,
}

/// Solves the norm equation, forms the `u` candidates and returns the first
/// curve certified by [`reduction::verify_egr`]. Tries at most `retry_cap`
/// conic solutions.
pub fn construct_witness(
    m: i64,
    record: &GoodDRecord,
    q: i64,
    retry_cap: usize,
) -> Result<Witness, ConstructError> {
    let d = record.d;
    if d.checked_mul(q) != Some(m) {
        return Err(ConstructError::Mismatch { m, d, q });
    }
    let c = setzer::epsilon(d) as i64 * d;
    if !norm_equation_solvable(m, c) {
        return Err(ConstructError::Unsolvable { m, c });
    }
    let mut tried = 0;
    for conic in NormSolutions::new(m, c)?.take(retry_cap) {
        tried += 1;
        let (beta, n) = match integralize(&conic.alpha) {
            Ok(v) => v,
            Err(ConstructError::EvenDenominator(_)) => continue,
            Err(e) => return Err(e),
        };
        for (u, branch) in u_candidates(&beta, record.d1) {
            let curve = build_curve(record.a, &u)?;
            let (egr, reports) = reduction::verify_egr(&curve)?;
            if egr {
                return Ok(Witness {
                    record: *record,
                    q,
                    conic,
                    beta,
                    n,
                    u,
                    branch,
                    curve,
                    reports,
                    attempts: tried,
                });
            }
        }
    }
    if tried == 0 {
        return Err(ConstructError::Exhausted {
            m,
            c,
            bound: SEARCH_CAP,
        });
    }
    Err(ConstructError::RetryCapExhausted { tried })
}
