//! Counting the fields `Q(sqrt(D q))` produced by a good `D`, and checking
//! their growth against `X / log^alpha X`.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::setzer;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DensityError {
    #[error("D = {0} is a unit; +-1 are never good")]
    UnitD(i64),
    #[error("D = {0} is not square-free")]
    NotSquarefree(i64),
    #[error("bound {0} is below 10")]
    SmallBound(u64),
    #[error("need at least 3 grid points with nonzero counts, have {0}")]
    InsufficientData(usize),
}

/// The family of `q` attached to a good `D`: `q = sign * q_1 ... q_n`
/// square-free, every `q_j` passing the prime condition, and `q` in the
/// residue class `residue` mod 8 when one is imposed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilySpec {
    #[serde(rename = "D")]
    pub d: i64,
    pub r: u32,
    pub epsilon: i8,
    pub sign: i8,
    /// `Some(+-1)` for even `D`: the extra condition `(-2 delta / q_j) = 1`.
    pub delta: Option<i8>,
    /// Required value of `q mod 8`.
    pub residue: Option<u8>,
    /// Odd primes of `D`.
    pub odd_primes: Vec<u64>,
    /// Whether `Q(sqrt(D q))` is real.
    pub real: bool,
}

impl FamilySpec {
    /// `1 - 1/2^r` as `(numerator, denominator)`.
    pub fn alpha_fraction(&self) -> (u64, u64) {
        let den = 1u64 << self.r;
        (den - 1, den)
    }

    pub fn alpha(&self) -> f64 {
        let (n, d) = self.alpha_fraction();
        n as f64 / d as f64
    }

    /// Short label like `D=2` used in CSV output.
    pub fn label(&self) -> String {
        format!("D={}", self.d)
    }

    /// Whether the prime `p` may divide `q`.
    pub fn accepts_prime(&self, p: u64) -> bool {
        if self.d % p as i64 == 0 {
            return false;
        }
        if p == 2 {
            // q must be odd whenever a residue class is imposed
            return self.residue.is_none()
                && self
                    .odd_primes
                    .iter()
                    .all(|&pi| arith::kronecker_i64(2, pi as i64) == 1);
        }
        let by_d = self
            .odd_primes
            .iter()
            .all(|&pi| arith::kronecker_i64(p as i64, pi as i64) == 1);
        let by_delta = match self.delta {
            Some(delta) => arith::kronecker_i64(-2 * delta as i64, p as i64) == 1,
            None => true,
        };
        by_d && by_delta
    }

    /// Whether `q = sign * n` meets the residue condition.
    pub fn accepts_residue(&self, n: u64) -> bool {
        match self.residue {
            None => true,
            Some(r) => {
                let q = (self.sign as i64 * (n % 8) as i64).rem_euclid(8);
                q as u8 == r
            }
        }
    }

    /// Naive membership test for `q = sign * n`.
    pub fn contains_abs(&self, n: u64) -> bool {
        if n == 0 || !self.accepts_residue(n) {
            return false;
        }
        arith::factor_u64(n)
            .iter()
            .all(|&(p, e)| e == 1 && self.accepts_prime(p))
    }

    /// Members `q` with `|q| <= x`, ordered by `|q|`.
    pub fn members(&self, x: u64) -> Vec<i64> {
        let flags = sieve_flags(self, 1, x + 1);
        flags
            .iter()
            .enumerate()
            .filter(|&(_, &ok)| ok)
            .map(|(i, _)| self.sign as i64 * (i as i64 + 1))
            .collect()
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (an, ad) = self.alpha_fraction();
        write!(
            f,
            "D={} r={} eps={} sign(q)={} alpha={}/{}",
            self.d, self.r, self.epsilon, self.sign, an, ad
        )?;
        if let Some(res) = self.residue {
            write!(f, " q={res} mod 8")?;
        }
        if let Some(delta) = self.delta {
            write!(f, " delta={delta}")?;
        }
        write!(f, " {}", if self.real { "real" } else { "imaginary" })
    }
}

/// The family for `D`.
///
/// The sign of `q` is `-eps_D`, which settles the symbol conditions and the
/// sign condition at once. Residues: `q = 5D (mod 8)` when `D = +-3 (mod 8)`,
/// `q = D + 1 (mod 8)` when `D` is even, and no constraint otherwise.
pub fn family_for(d: i64) -> Result<FamilySpec, DensityError> {
    if d.abs() <= 1 {
        return Err(DensityError::UnitD(d));
    }
    if !arith::is_squarefree_i64(d) {
        return Err(DensityError::NotSquarefree(d));
    }
    let primes: Vec<u64> = arith::factor_u64(d.unsigned_abs())
        .into_iter()
        .map(|(p, _)| p)
        .collect();
    let r = primes.len() as u32;
    let odd_primes: Vec<u64> = primes.into_iter().filter(|&p| p != 2).collect();
    let epsilon = setzer::epsilon(d);
    let sign = -epsilon;
    let even = d % 2 == 0;
    let delta = even.then(|| if (d / 2).rem_euclid(4) == 1 { 1 } else { -1 });
    let residue = match d.rem_euclid(8) {
        3 | 5 => Some((5 * d).rem_euclid(8) as u8),
        0 | 2 | 4 | 6 => Some((d + 1).rem_euclid(8) as u8),
        _ => None,
    };
    Ok(FamilySpec {
        d,
        r,
        epsilon,
        sign,
        delta,
        residue,
        odd_primes,
        real: -(epsilon as i64) * d > 0,
    })
}

/// Membership flags for `n` in `[lo, hi)`.
fn sieve_flags(spec: &FamilySpec, lo: u64, hi: u64) -> Vec<bool> {
    let primes = arith::sieve_primes(hi.max(2));
    segment_flags(spec, &primes, lo, hi)
}

fn segment_flags(spec: &FamilySpec, primes: &[u64], lo: u64, hi: u64) -> Vec<bool> {
    let len = (hi - lo) as usize;
    let mut ok = vec![true; len];
    for (i, slot) in ok.iter_mut().enumerate() {
        *slot = spec.accepts_residue(lo + i as u64);
    }
    for &p in primes {
        if p >= hi {
            break;
        }
        let step = if spec.accepts_prime(p) {
            match p.checked_mul(p) {
                Some(pp) if pp < hi => pp,
                _ => continue,
            }
        } else {
            p
        };
        let mut k = lo.div_ceil(step) * step;
        while k < hi {
            ok[(k - lo) as usize] = false;
            k += step;
        }
    }
    ok
}

const SEGMENT: u64 = 1 << 18;

/// Counts of `n <= g` in the family for each `g` in `grid`, by a segmented
/// sieve over `[1, max grid]`. Segments run in parallel; the result does not
/// depend on the partition.
fn counts_at(spec: &FamilySpec, grid: &[u64]) -> Vec<u64> {
    let top = grid.iter().copied().max().unwrap_or(0);
    if top == 0 {
        return vec![0; grid.len()];
    }
    let primes = arith::sieve_primes(top.max(2));
    let starts: Vec<u64> = (1..=top).step_by(SEGMENT as usize).collect();
    let per_segment: Vec<Vec<u64>> = starts
        .par_iter()
        .map(|&lo| {
            let hi = (lo + SEGMENT).min(top + 1);
            let flags = segment_flags(spec, &primes, lo, hi);
            grid.iter()
                .map(|&g| {
                    if g < lo {
                        0
                    } else {
                        let end = ((g + 1).min(hi) - lo) as usize;
                        flags[..end].iter().filter(|&&b| b).count() as u64
                    }
                })
                .collect()
        })
        .collect();
    let mut total = vec![0u64; grid.len()];
    for seg in per_segment {
        for (t, c) in total.iter_mut().zip(seg) {
            *t += c;
        }
    }
    total
}

/// Counts at thresholds `X_i`, with `count * (log X)^alpha / X`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub family: String,
    /// What is bounded by `X`: `|q|` or `|disc K|`.
    pub convention: String,
    pub alpha: f64,
    pub grid: Vec<u64>,
    pub counts: Vec<u64>,
    pub normalized: Vec<f64>,
}

pub fn normalize(count: u64, x: u64, alpha: f64) -> f64 {
    let xf = x as f64;
    count as f64 * xf.ln().powf(alpha) / xf
}

impl CountReport {
    fn new(family: String, convention: &str, alpha: f64, grid: Vec<u64>, counts: Vec<u64>) -> Self {
        let normalized = grid
            .iter()
            .zip(&counts)
            .map(|(&x, &c)| normalize(c, x, alpha))
            .collect();
        CountReport {
            family,
            convention: convention.to_string(),
            alpha,
            grid,
            counts,
            normalized,
        }
    }

    /// The same counts normalized with another exponent.
    pub fn with_alpha(&self, alpha: f64) -> CountReport {
        CountReport::new(
            self.family.clone(),
            &self.convention,
            alpha,
            self.grid.clone(),
            self.counts.clone(),
        )
    }

    /// CSV with header `X,count,normalized`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("X,count,normalized\n");
        for i in 0..self.grid.len() {
            s.push_str(&format!(
                "{},{},{:.6}\n",
                self.grid[i], self.counts[i], self.normalized[i]
            ));
        }
        s
    }

    /// Long-format CSV rows `family,X,count,normalized` (no header).
    pub fn to_long_rows(&self) -> String {
        let mut s = String::new();
        for i in 0..self.grid.len() {
            s.push_str(&format!(
                "{},{},{},{:.6}\n",
                self.family, self.grid[i], self.counts[i], self.normalized[i]
            ));
        }
        s
    }
}

pub const LONG_HEADER: &str = "family,X,count,normalized\n";

/// Powers of ten up to `x`, then `x` itself if it is not one.
pub fn geometric_grid(x: u64) -> Vec<u64> {
    let mut g = Vec::new();
    let mut v = 10u64;
    while v <= x {
        g.push(v);
        match v.checked_mul(10) {
            Some(n) => v = n,
            None => break,
        }
    }
    if g.last() != Some(&x) {
        g.push(x);
    }
    g
}

/// `#{q in family : |q| <= X}` on the grid of [`geometric_grid`].
pub fn count_family(spec: &FamilySpec, x: u64) -> Result<CountReport, DensityError> {
    if x < 10 {
        return Err(DensityError::SmallBound(x));
    }
    Ok(count_family_on(spec, &geometric_grid(x)))
}

/// As [`count_family`] on an explicit grid.
pub fn count_family_on(spec: &FamilySpec, grid: &[u64]) -> CountReport {
    let counts = counts_at(spec, grid);
    CountReport::new(spec.label(), "|q|<=X", spec.alpha(), grid.to_vec(), counts)
}

fn aggregate(d: i64, disc_per_q: u64, label: &str, grid: &[u64]) -> CountReport {
    let spec = family_for(d).expect("fixed family");
    // |disc| = disc_per_q * |q| < X  <=>  |q| <= (X - 1) / disc_per_q
    let q_grid: Vec<u64> = grid
        .iter()
        .map(|&x| x.saturating_sub(1) / disc_per_q)
        .collect();
    let counts = counts_at(&spec, &q_grid);
    CountReport::new(
        label.to_string(),
        "|disc K|<X",
        spec.alpha(),
        grid.to_vec(),
        counts,
    )
}

/// Real fields `Q(sqrt(2q))` from the `D = 2` family with `|disc K| = 8q < X`.
pub fn aggregate_rx(x: u64) -> Result<CountReport, DensityError> {
    if x < 10 {
        return Err(DensityError::SmallBound(x));
    }
    Ok(aggregate_rx_on(&geometric_grid(x)))
}

pub fn aggregate_rx_on(grid: &[u64]) -> CountReport {
    aggregate(2, 8, "R", grid)
}

/// Imaginary fields `Q(sqrt(37q))` from the `D = 37` family with
/// `|disc K| = 37|q| < X`.
pub fn aggregate_ix(x: u64) -> Result<CountReport, DensityError> {
    if x < 10 {
        return Err(DensityError::SmallBound(x));
    }
    Ok(aggregate_ix_on(&geometric_grid(x)))
}

pub fn aggregate_ix_on(grid: &[u64]) -> CountReport {
    aggregate(37, 37, "I", grid)
}

/// Normalized ratios at grid points with nonzero counts.
pub fn growth_check(report: &CountReport) -> Result<Vec<f64>, DensityError> {
    let ratios: Vec<f64> = report
        .counts
        .iter()
        .zip(&report.normalized)
        .filter(|(&c, _)| c > 0)
        .map(|(_, &r)| r)
        .collect();
    if ratios.len() < 3 {
        return Err(DensityError::InsufficientData(ratios.len()));
    }
    Ok(ratios)
}

/// `max / min - 1` of a list of positive ratios.
pub fn drift(ratios: &[f64]) -> f64 {
    let max = ratios.iter().copied().fold(f64::MIN, f64::max);
    let min = ratios.iter().copied().fold(f64::MAX, f64::min);
    max / min - 1.0
}
