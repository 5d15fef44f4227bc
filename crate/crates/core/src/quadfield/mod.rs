//! Arithmetic in `K = Q(sqrt(m))` and its ring of integers.

mod element;
mod ideal;
mod residue_field;

pub use element::{format_rational, FieldElement};
pub use ideal::{residue, valuation, Localization, PrimeIdeal, PrimeKind, ResidueClass};
pub use residue_field::{ResidueElem, ResidueField};

pub(crate) use element::rat;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("m = {0} is not a square-free integer other than 0 and 1")]
    BadDiscriminant(i64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("element {0} is not integral")]
    NotIntegral(String),
    #[error("element {element} has negative valuation at {ideal}")]
    NegativeValuation { element: String, ideal: String },
}

/// `Q(sqrt(m))` for a square-free `m` not in `{0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct QuadraticField {
    m: i64,
}

impl TryFrom<i64> for QuadraticField {
    type Error = FieldError;
    fn try_from(m: i64) -> Result<Self, FieldError> {
        QuadraticField::new(m)
    }
}

impl From<QuadraticField> for i64 {
    fn from(k: QuadraticField) -> i64 {
        k.m
    }
}

impl QuadraticField {
    pub fn new(m: i64) -> Result<Self, FieldError> {
        if m == 0 || m == 1 || !arith::is_squarefree_i64(m) {
            return Err(FieldError::BadDiscriminant(m));
        }
        Ok(QuadraticField { m })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    /// Field discriminant: `m` if `m = 1 (mod 4)`, else `4m`.
    pub fn discriminant(&self) -> i64 {
        if self.m.rem_euclid(4) == 1 {
            self.m
        } else {
            4 * self.m
        }
    }

    pub fn is_real(&self) -> bool {
        self.m > 0
    }

    pub fn sqrt_m(&self) -> FieldElement {
        FieldElement::from_ints(*self, 0, 1)
    }

    /// Generator of the ring of integers: `(1 + sqrt(m))/2` or `sqrt(m)`.
    pub fn theta(&self) -> FieldElement {
        if self.m.rem_euclid(4) == 1 {
            FieldElement::new(
                *self,
                num_rational::BigRational::new(1.into(), 2.into()),
                num_rational::BigRational::new(1.into(), 2.into()),
            )
        } else {
            self.sqrt_m()
        }
    }

    /// `(T, N)` with `theta^2 = T*theta - N`.
    pub fn theta_trace_norm(&self) -> (i64, i64) {
        if self.m.rem_euclid(4) == 1 {
            (1, (1 - self.m) / 4)
        } else {
            (0, -self.m)
        }
    }

    pub fn int(&self, a: i64) -> FieldElement {
        FieldElement::from_ints(*self, a, 0)
    }

    /// The prime ideals above the rational prime `p`.
    pub fn split_prime(&self, p: u64) -> Result<Vec<PrimeIdeal>, FieldError> {
        PrimeIdeal::above(*self, p)
    }
}
