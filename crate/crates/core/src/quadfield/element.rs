use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::QuadraticField;

/// `a + b*sqrt(m)` with exact rational coordinates.
///
/// Coordinates are always in the `{1, sqrt(m)}` basis; integrality is a
/// predicate ([`FieldElement::is_integral`]), not part of the representation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: QuadraticField,
    a: BigRational,
    b: BigRational,
}

pub(crate) fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

impl FieldElement {
    pub fn new(field: QuadraticField, a: BigRational, b: BigRational) -> Self {
        FieldElement { field, a, b }
    }

    pub fn from_ints(field: QuadraticField, a: i64, b: i64) -> Self {
        Self::new(field, rat(a), rat(b))
    }

    pub fn from_integer(field: QuadraticField, a: impl Into<BigInt>) -> Self {
        Self::new(field, rat(a), BigRational::zero())
    }

    pub fn from_rational(field: QuadraticField, a: BigRational) -> Self {
        Self::new(field, a, BigRational::zero())
    }

    pub fn zero(field: QuadraticField) -> Self {
        Self::from_ints(field, 0, 0)
    }

    pub fn one(field: QuadraticField) -> Self {
        Self::from_ints(field, 1, 0)
    }

    pub fn field(&self) -> QuadraticField {
        self.field
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.field, self.a.clone(), -&self.b)
    }

    /// `a^2 - m b^2`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - rat(self.field.m()) * &self.b * &self.b
    }

    pub fn trace(&self) -> BigRational {
        &self.a + &self.a
    }

    /// Coordinates `(x0, x1)` with `self = x0 + x1*theta`, where `theta` is
    /// the standard generator of the ring of integers.
    pub fn theta_coords(&self) -> (BigRational, BigRational) {
        if self.field.m().rem_euclid(4) == 1 {
            (&self.a - &self.b, &self.b + &self.b)
        } else {
            (self.a.clone(), self.b.clone())
        }
    }

    /// Least positive integer `d` with `d * self` in the ring of integers.
    pub fn denominator(&self) -> BigInt {
        let (x0, x1) = self.theta_coords();
        x0.denom().lcm(x1.denom())
    }

    /// Membership in the ring of integers.
    pub fn is_integral(&self) -> bool {
        self.denominator().is_one()
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(Self::new(self.field, &self.a / &n, -&self.b / &n))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(self.field, &self.a * k, &self.b * k)
    }

    fn same_field(&self, other: &Self) {
        assert_eq!(
            self.field, other.field,
            "arithmetic between elements of different fields"
        );
    }
}

/// Renders a rational as `p` or `p/q` in lowest terms.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for FieldElement {
    /// `p/q + r/s*sqrt(m)`, always with both terms.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.b.is_negative() { "-" } else { "+" };
        write!(
            f,
            "{} {} {}*sqrt({})",
            format_rational(&self.a),
            sign,
            format_rational(&self.b.abs()),
            self.field.m()
        )
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({self})")
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.same_field(rhs);
        FieldElement::new(self.field, &self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.same_field(rhs);
        FieldElement::new(self.field, &self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.same_field(rhs);
        let m = rat(self.field.m());
        FieldElement::new(
            self.field,
            &self.a * &rhs.a + m * &self.b * &rhs.b,
            &self.a * &rhs.b + &self.b * &rhs.a,
        )
    }
}

impl<'a> Div<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn div(self, rhs: &FieldElement) -> FieldElement {
        let inv = rhs.inverse().expect("division by zero field element");
        self * &inv
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::new(self.field, -&self.a, -&self.b)
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.$method(&rhs)
            }
        }
        impl<'a> $tr<i64> for &'a FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: i64) -> FieldElement {
                self.$method(&FieldElement::from_ints(self.field, rhs, 0))
            }
        }
        impl $tr<i64> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: i64) -> FieldElement {
                (&self).$method(rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul, Div div);
