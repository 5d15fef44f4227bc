//! Good discriminants `D`, the congruence conditions on `m = D*q`, and the
//! three-valued decision for a quadratic field.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::constructor::{self, ConstructError, Witness};

/// Largest supported `A_max`: keeps `A^3 - 1728` inside `i64`.
pub const MAX_A_MAX: u64 = 2_000_000;

pub const DEFAULT_A_MAX: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetzerError {
    #[error("m = {0} is not square-free")]
    NotSquarefree(i64),
    #[error("m = {0} does not define a quadratic field")]
    Degenerate(i64),
    #[error("D = {0} is a unit; +-1 are never good")]
    UnitD(i64),
    #[error("scan bound {0} out of range 1..={max}", max = MAX_A_MAX)]
    ScanBound(u64),
    #[error("{0} is not a prime congruent to 3 mod 8")]
    NotThreeModEight(i64),
    #[error("witness construction failed for m = {m}: {source}")]
    Construction { m: i64, source: ConstructError },
}

/// Membership in the admissible set of `A`.
pub fn in_r(a: i64) -> bool {
    let two_ok = a % 2 != 0 || a % 16 == 0 || (a - 4) % 16 == 0;
    let three_ok = a % 3 != 0 || (a - 12) % 27 == 0;
    two_ok && three_ok
}

/// `+1` if `D = 1 (mod 4)`, else `-1`.
pub fn epsilon(d: i64) -> i8 {
    if d.rem_euclid(4) == 1 {
        1
    } else {
        -1
    }
}

/// A witness that `D` is good: `D t^2 = A^3 - 1728` with `A` admissible,
/// together with `3t = d1 * d2^2`, `d1` square-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GoodDRecord {
    #[serde(rename = "A")]
    pub a: i64,
    #[serde(rename = "D")]
    pub d: i64,
    pub t: u64,
    pub d1: u64,
    pub d2: u64,
    pub epsilon: i8,
}

impl GoodDRecord {
    /// The record for `A`, if `A` is admissible and yields `D != +-1`.
    pub fn for_a(a: i64) -> Option<GoodDRecord> {
        if !in_r(a) || a == 12 || a.unsigned_abs() > MAX_A_MAX {
            return None;
        }
        // A^3 - 1728 = (A - 12)(A^2 + 12A + 144), second factor always positive
        let lin = a - 12;
        let quad = (a * a + 12 * a + 144) as u64;
        let mut exps: BTreeMap<u64, u32> = BTreeMap::new();
        for part in [lin.unsigned_abs(), quad] {
            for (p, e) in arith::factor_u64(part) {
                *exps.entry(p).or_default() += e;
            }
        }
        let mut d = lin.signum();
        let mut t: u64 = 1;
        for (&p, &e) in &exps {
            if e % 2 == 1 {
                d *= p as i64;
            }
            t *= p.pow(e / 2);
        }
        if d.abs() == 1 {
            return None;
        }
        *exps.entry(3).or_default() += 2;
        let (mut d1, mut d2) = (1u64, 1u64);
        for (&p, &e) in &exps {
            let half = e / 2; // exponent of p in 3t
            if half % 2 == 1 {
                d1 *= p;
            }
            d2 *= p.pow(half / 2);
        }
        Some(GoodDRecord {
            a,
            d,
            t,
            d1,
            d2,
            epsilon: epsilon(d),
        })
    }

    pub fn a_cubed_minus_1728(&self) -> i128 {
        let a = self.a as i128;
        a * a * a - 1728
    }
}

/// Good `D` found by scanning `|A| <= a_max`, indexed by `D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodTable {
    a_max: u64,
    by_d: BTreeMap<i64, Vec<GoodDRecord>>,
}

impl GoodTable {
    pub fn a_max(&self) -> u64 {
        self.a_max
    }

    /// Records for `D`, smallest `|A|` first (ties: negative `A` first).
    pub fn get(&self, d: i64) -> Option<&[GoodDRecord]> {
        self.by_d.get(&d).map(|v| v.as_slice())
    }

    pub fn contains(&self, d: i64) -> bool {
        self.by_d.contains_key(&d)
    }

    pub fn len(&self) -> usize {
        self.by_d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_d.is_empty()
    }

    pub fn ds(&self) -> impl Iterator<Item = i64> + '_ {
        self.by_d.keys().copied()
    }

    /// All records ordered by `A`.
    pub fn records(&self) -> Vec<GoodDRecord> {
        let mut all: Vec<GoodDRecord> = self.by_d.values().flatten().copied().collect();
        all.sort_by_key(|r| r.a);
        all
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("A,D,t,d1,d2,epsilon\n");
        for r in self.records() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.a, r.d, r.t, r.d1, r.d2, r.epsilon
            ));
        }
        out
    }
}

/// Scans every admissible `A` with `|A| <= a_max`, `A != 12`.
pub fn scan_good_d(a_max: u64) -> Result<GoodTable, SetzerError> {
    if a_max == 0 || a_max > MAX_A_MAX {
        return Err(SetzerError::ScanBound(a_max));
    }
    let lo = -(a_max as i64);
    let hi = a_max as i64;
    let found: Vec<GoodDRecord> = (lo..=hi)
        .into_par_iter()
        .filter_map(GoodDRecord::for_a)
        .collect();
    let mut by_d: BTreeMap<i64, Vec<GoodDRecord>> = BTreeMap::new();
    for r in found {
        by_d.entry(r.d).or_default().push(r);
    }
    for v in by_d.values_mut() {
        v.sort_by_key(|r| (r.a.unsigned_abs(), r.a));
    }
    Ok(GoodTable { a_max, by_d })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Condition {
    A,
    B,
    C,
    D,
    E,
}

impl Condition {
    pub const ALL: [Condition; 5] = [
        Condition::A,
        Condition::B,
        Condition::C,
        Condition::D,
        Condition::E,
    ];

    pub fn label(self) -> char {
        match self {
            Condition::A => 'a',
            Condition::B => 'b',
            Condition::C => 'c',
            Condition::D => 'd',
            Condition::E => 'e',
        }
    }
}

/// Outcome of one condition; `prime` names the witnessing prime on failure
/// when one exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    pub condition: Condition,
    pub pass: bool,
    pub prime: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    #[serde(rename = "D")]
    pub d: i64,
    pub q: i64,
    pub results: [ConditionResult; 5],
}

impl ConditionReport {
    pub fn pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn result(&self, c: Condition) -> ConditionResult {
        self.results[c as usize]
    }

    pub fn failed(&self) -> Vec<Condition> {
        self.results
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.condition)
            .collect()
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D={} q={}", self.d, self.q)?;
        for r in &self.results {
            let mark = if r.pass { "ok" } else { "FAIL" };
            write!(f, " ({})={}", r.condition.label(), mark)?;
            if let (false, Some(p)) = (r.pass, r.prime) {
                write!(f, "@{p}")?;
            }
        }
        Ok(())
    }
}

fn odd_primes(n: i64) -> Vec<u64> {
    if n.unsigned_abs() <= 1 {
        return Vec::new();
    }
    arith::factor_u64(n.unsigned_abs())
        .into_iter()
        .map(|(p, _)| p)
        .filter(|&p| p != 2)
        .collect()
}

/// Evaluates the five conditions for the factorization `m = D*q`.
///
/// The residue-symbol conditions (a) and (b) range over odd primes only; the
/// prime 2 is covered by (d) and (e).
pub fn check_conditions(d: i64, q: i64) -> Result<ConditionReport, SetzerError> {
    if d.abs() == 1 {
        return Err(SetzerError::UnitD(d));
    }
    let m = d
        .checked_mul(q)
        .ok_or(SetzerError::NotSquarefree(i64::MAX))?;
    if !arith::is_squarefree_i64(m) {
        return Err(SetzerError::NotSquarefree(m));
    }
    let eps = epsilon(d) as i64;
    let ok = |c| ConditionResult {
        condition: c,
        pass: true,
        prime: None,
    };
    let fail = |c, prime| ConditionResult {
        condition: c,
        pass: false,
        prime,
    };

    let a = match odd_primes(d)
        .into_iter()
        .find(|&p| arith::kronecker_i64(-eps * q, p as i64) != 1)
    {
        None => ok(Condition::A),
        Some(p) => fail(Condition::A, Some(p)),
    };
    let b = match odd_primes(q)
        .into_iter()
        .find(|&p| arith::kronecker_i64(eps * d, p as i64) != 1)
    {
        None => ok(Condition::B),
        Some(p) => fail(Condition::B, Some(p)),
    };
    let c = if eps * d < 0 && m < 0 {
        fail(Condition::C, None)
    } else {
        ok(Condition::C)
    };
    let d_mod8 = d.rem_euclid(8);
    let cond_d = if (d_mod8 == 3 || d_mod8 == 5) && (q - d).rem_euclid(4) != 0 {
        fail(Condition::D, Some(2))
    } else {
        ok(Condition::D)
    };
    let e = if d % 2 == 0 && (q - d - 1).rem_euclid(8) != 0 {
        fail(Condition::E, Some(2))
    } else {
        ok(Condition::E)
    };
    Ok(ConditionReport {
        d,
        q,
        results: [a, b, c, cond_d, e],
    })
}

/// Signed factorizations `m = D*q` with `D` a divisor other than `+-1`,
/// ordered by `|D|` and then positive `D` first.
pub fn candidates(m: i64) -> Result<Vec<(i64, i64)>, SetzerError> {
    validate_m(m)?;
    let primes: Vec<i64> = arith::factor_u64(m.unsigned_abs())
        .into_iter()
        .map(|(p, _)| p as i64)
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << primes.len()) {
        let d: i64 = primes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, p)| p)
            .product();
        if d == 1 {
            continue;
        }
        for s in [1, -1] {
            out.push((s * d, m / (s * d)));
        }
    }
    out.sort_by_key(|&(d, _)| (d.unsigned_abs(), d < 0));
    Ok(out)
}

fn validate_m(m: i64) -> Result<(), SetzerError> {
    if m == 0 || m == 1 {
        return Err(SetzerError::Degenerate(m));
    }
    if !arith::is_squarefree_i64(m) {
        return Err(SetzerError::NotSquarefree(m));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Yes => "YES",
            Status::No => "NO",
            Status::Unknown => "UNKNOWN",
        })
    }
}

/// Decision for `Q(sqrt(m))` relative to a good-`D` table.
#[derive(Debug, Clone)]
pub struct EgrVerdict {
    pub m: i64,
    pub status: Status,
    pub a_max: u64,
    pub witness: Option<Witness>,
    /// Every candidate that failed some condition.
    pub failures: Vec<ConditionReport>,
    /// Candidates `(D, q)` that pass all conditions but whose `D` is not in
    /// the table.
    pub unresolved: Vec<(i64, i64)>,
}

/// Decides `Q(sqrt(m))`, constructing and verifying a witness curve on YES.
pub fn decide(m: i64, table: &GoodTable) -> Result<EgrVerdict, SetzerError> {
    decide_with(m, table, constructor::DEFAULT_RETRY_CAP)
}

pub fn decide_with(m: i64, table: &GoodTable, retry_cap: usize) -> Result<EgrVerdict, SetzerError> {
    let cands = candidates(m)?;
    decide_over(m, &cands, table, retry_cap)
}

/// [`decide`] over an explicit candidate list (any order).
pub fn decide_over(
    m: i64,
    cands: &[(i64, i64)],
    table: &GoodTable,
    retry_cap: usize,
) -> Result<EgrVerdict, SetzerError> {
    validate_m(m)?;
    let mut sorted = cands.to_vec();
    sorted.sort_by_key(|&(d, _)| (d.unsigned_abs(), d < 0));
    let mut failures = Vec::new();
    let mut unresolved = Vec::new();
    let mut good = Vec::new();
    for &(d, q) in &sorted {
        let report = check_conditions(d, q)?;
        if !report.pass() {
            failures.push(report);
        } else if let Some(recs) = table.get(d) {
            good.push((recs[0], q));
        } else {
            unresolved.push((d, q));
        }
    }
    let status = if !good.is_empty() {
        Status::Yes
    } else if unresolved.is_empty() {
        Status::No
    } else {
        Status::Unknown
    };
    let witness = match good.first() {
        Some(&(rec, q)) => Some(
            constructor::construct_witness(m, &rec, q, retry_cap)
                .map_err(|source| SetzerError::Construction { m, source })?,
        ),
        None => None,
    };
    Ok(EgrVerdict {
        m,
        status,
        a_max: table.a_max(),
        witness,
        failures,
        unresolved,
    })
}

/// Verdicts for `m = p` and `m = -p`, `p` a prime `3 (mod 8)`. Both are NO
/// without reference to any table.
pub fn nonexistence_certificate(p: i64) -> Result<(EgrVerdict, EgrVerdict), SetzerError> {
    if p <= 0 || p % 8 != 3 || !arith::is_prime_u64(p as u64) {
        return Err(SetzerError::NotThreeModEight(p));
    }
    let empty = GoodTable {
        a_max: 0,
        by_d: BTreeMap::new(),
    };
    let pos = decide(p, &empty)?;
    let neg = decide(-p, &empty)?;
    debug_assert_eq!(pos.status, Status::No);
    debug_assert_eq!(neg.status, Status::No);
    Ok((pos, neg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissible_set() {
        for a in [20, 16, -15, -32, 39, 4, 1, -1, 52] {
            assert!(in_r(a), "{a}");
        }
        for a in [2, 6, 8, 3, 9, 24, 36, 28] {
            assert!(!in_r(a), "{a}");
        }
    }

    #[test]
    fn in_r_matches_definition_by_residues() {
        for a in -2000i64..2000 {
            let two = a % 2 != 0 || a.rem_euclid(16) == 0 || a.rem_euclid(16) == 4;
            let three = a % 3 != 0 || a.rem_euclid(27) == 12;
            assert_eq!(in_r(a), two && three, "{a}");
        }
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon(37), 1);
        assert_eq!(epsilon(2), -1);
        assert_eq!(epsilon(-7), 1);
        assert_eq!(epsilon(79), -1);
        assert_eq!(epsilon(-11), 1);
    }

    #[test]
    fn records_for_table_rows() {
        let r = GoodDRecord::for_a(20).unwrap();
        assert_eq!((r.d, r.t, r.d1, r.d2, r.epsilon), (2, 56, 42, 2, -1));
        let r = GoodDRecord::for_a(16).unwrap();
        assert_eq!((r.d, r.t, r.d1), (37, 8, 6));
        let r = GoodDRecord::for_a(-15).unwrap();
        assert_eq!((r.d, r.t, r.d1, r.d2), (-7, 27, 1, 9));
        let r = GoodDRecord::for_a(4).unwrap();
        assert_eq!((r.d, r.t), (-26, 8));
        assert!(GoodDRecord::for_a(12).is_none());
        assert!(GoodDRecord::for_a(2).is_none());
    }

    #[test]
    fn record_identities_hold() {
        let table = scan_good_d(3000).unwrap();
        assert!(!table.is_empty());
        for r in table.records() {
            let n = r.a_cubed_minus_1728();
            assert_eq!(r.d as i128 * (r.t as i128).pow(2), n);
            assert_eq!(
                r.d as i128 * (r.d1 as i128).pow(2) * (r.d2 as i128).pow(4),
                9 * n
            );
            assert!(arith::is_squarefree_i64(r.d));
            assert!(arith::is_squarefree_i64(r.d1 as i64));
            assert!(in_r(r.a) && r.a != 12);
        }
    }

    #[test]
    fn small_scans() {
        let t40 = scan_good_d(40).unwrap();
        for (a, d) in [(20, 2), (16, 37), (-15, -7), (-32, -11), (39, 79), (4, -26)] {
            assert!(t40.get(d).unwrap().iter().any(|r| r.a == a), "A={a}");
        }
        let t3 = scan_good_d(3).unwrap();
        assert_eq!(t3.ds().collect::<Vec<_>>(), vec![-1729, -1727]);
        assert_eq!(scan_good_d(0), Err(SetzerError::ScanBound(0)));
        assert!(t40.to_csv().starts_with("A,D,t,d1,d2,epsilon\n"));
    }

    #[test]
    fn condition_examples() {
        assert!(check_conditions(2, 3).unwrap().pass());
        assert!(check_conditions(-11, -3).unwrap().pass());
        assert!(check_conditions(-7, -1).unwrap().pass());
        for p in [3, 11, 19, 43] {
            let r = check_conditions(p, 1).unwrap();
            assert_eq!(r.failed(), vec![Condition::D], "p={p}");
        }
        assert_eq!(check_conditions(1, 6), Err(SetzerError::UnitD(1)));
        assert_eq!(check_conditions(2, 6), Err(SetzerError::NotSquarefree(12)));
    }

    #[test]
    fn candidate_enumeration() {
        assert_eq!(
            candidates(6).unwrap(),
            vec![(2, 3), (-2, -3), (3, 2), (-3, -2), (6, 1), (-6, -1)]
        );
        assert!(candidates(-1).unwrap().is_empty());
        assert_eq!(candidates(12), Err(SetzerError::NotSquarefree(12)));
        assert_eq!(candidates(1), Err(SetzerError::Degenerate(1)));
    }

    #[test]
    fn nonexistence_for_small_primes() {
        for p in [3, 11, 19, 43, 59] {
            let (pos, neg) = nonexistence_certificate(p).unwrap();
            assert_eq!(pos.status, Status::No);
            assert_eq!(neg.status, Status::No);
            for f in &pos.failures {
                assert!(f.failed().contains(&Condition::D));
            }
            for f in &neg.failures {
                let failed = f.failed();
                assert!(failed.contains(&Condition::A) || failed.contains(&Condition::C));
            }
        }
        assert!(nonexistence_certificate(5).is_err());
        assert!(nonexistence_certificate(27).is_err());
    }
}
