use std::fmt;

/// A residue field `O_K / P`: either `F_p` or `F_p[theta]` with
/// `theta^2 = t*theta - n` irreducible mod `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueField {
    p: u64,
    degree: u8,
    t: u64,
    n: u64,
}

/// Element `x0 + x1*theta` of a [`ResidueField`] (`x1 = 0` for prime fields).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueElem(pub u64, pub u64);

impl fmt::Display for ResidueElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 == 0 {
            write!(f, "{}", self.0)
        } else {
            write!(f, "{}+{}*theta", self.0, self.1)
        }
    }
}

#[inline]
fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

impl ResidueField {
    pub fn prime(p: u64) -> Self {
        ResidueField {
            p,
            degree: 1,
            t: 0,
            n: 0,
        }
    }

    /// `F_p[theta]/(theta^2 - t*theta + n)`; the polynomial must be irreducible.
    pub fn quadratic(p: u64, t: i64, n: i64) -> Self {
        let red = |v: i64| v.rem_euclid(p as i64) as u64;
        ResidueField {
            p,
            degree: 2,
            t: red(t),
            n: red(n),
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn size(&self) -> u64 {
        self.p.pow(self.degree as u32)
    }

    pub fn zero(&self) -> ResidueElem {
        ResidueElem(0, 0)
    }

    pub fn one(&self) -> ResidueElem {
        ResidueElem(1 % self.p, 0)
    }

    pub fn from_int(&self, v: i64) -> ResidueElem {
        ResidueElem(v.rem_euclid(self.p as i64) as u64, 0)
    }

    pub fn elem(&self, x0: u64, x1: u64) -> ResidueElem {
        if self.degree == 1 {
            ResidueElem(x0 % self.p, 0)
        } else {
            ResidueElem(x0 % self.p, x1 % self.p)
        }
    }

    pub fn is_zero(&self, x: ResidueElem) -> bool {
        x.0 == 0 && x.1 == 0
    }

    pub fn add(&self, x: ResidueElem, y: ResidueElem) -> ResidueElem {
        ResidueElem((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }

    pub fn neg(&self, x: ResidueElem) -> ResidueElem {
        ResidueElem((self.p - x.0) % self.p, (self.p - x.1) % self.p)
    }

    pub fn sub(&self, x: ResidueElem, y: ResidueElem) -> ResidueElem {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: ResidueElem, y: ResidueElem) -> ResidueElem {
        let p = self.p;
        if self.degree == 1 {
            return ResidueElem(mulm(x.0, y.0, p), 0);
        }
        // (a + b th)(c + d th) = ac - bd n + (ad + bc + bd t) th
        let bd = mulm(x.1, y.1, p);
        let c0 = (mulm(x.0, y.0, p) + p - mulm(bd, self.n, p)) % p;
        let c1 = (mulm(x.0, y.1, p) + mulm(x.1, y.0, p) + mulm(bd, self.t, p)) % p;
        ResidueElem(c0, c1)
    }

    pub fn pow(&self, x: ResidueElem, mut e: u64) -> ResidueElem {
        let mut acc = self.one();
        let mut base = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: ResidueElem) -> Option<ResidueElem> {
        if self.is_zero(x) {
            None
        } else {
            Some(self.pow(x, self.size() - 2))
        }
    }

    pub fn div(&self, x: ResidueElem, y: ResidueElem) -> Option<ResidueElem> {
        self.inv(y).map(|yi| self.mul(x, yi))
    }

    pub fn elements(&self) -> impl Iterator<Item = ResidueElem> + '_ {
        let p = self.p;
        let hi = if self.degree == 1 { 1 } else { p };
        (0..hi).flat_map(move |x1| (0..p).map(move |x0| ResidueElem(x0, x1)))
    }

    /// Some `y` with `y^k = x`, by exhaustive search.
    pub fn root(&self, x: ResidueElem, k: u64) -> Option<ResidueElem> {
        self.elements().find(|&y| self.pow(y, k) == x)
    }

    pub fn sqrt(&self, x: ResidueElem) -> Option<ResidueElem> {
        self.root(x, 2)
    }

    pub fn cbrt(&self, x: ResidueElem) -> Option<ResidueElem> {
        self.root(x, 3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_field_is_a_field() {
        // F_4 = F_2[w], w^2 = w + 1 ; F_9 = F_3[i], i^2 = -1 ; F_49 via sqrt(3)
        for f in [
            ResidueField::quadratic(2, 1, 1),
            ResidueField::quadratic(3, 0, 1),
            ResidueField::quadratic(7, 0, -3),
        ] {
            let elems: Vec<_> = f.elements().collect();
            assert_eq!(elems.len() as u64, f.size());
            for &x in &elems {
                if f.is_zero(x) {
                    continue;
                }
                let xi = f.inv(x).unwrap();
                assert_eq!(f.mul(x, xi), f.one());
                for &y in &elems {
                    assert_eq!(f.mul(x, y), f.mul(y, x));
                }
            }
        }
    }

    #[test]
    fn roots_exist_in_small_characteristic() {
        let f4 = ResidueField::quadratic(2, 1, 1);
        let f9 = ResidueField::quadratic(3, 0, 1);
        for x in f4.elements() {
            let s = f4.sqrt(x).unwrap();
            assert_eq!(f4.mul(s, s), x);
        }
        for x in f9.elements() {
            let c = f9.cbrt(x).unwrap();
            assert_eq!(f9.pow(c, 3), x);
        }
        let f7 = ResidueField::prime(7);
        assert!(f7.sqrt(f7.from_int(3)).is_none());
        assert_eq!(f7.from_int(-1), ResidueElem(6, 0));
    }
}
