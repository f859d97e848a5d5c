//! Arithmetic in the prime field F_p.
//!
//! `PrimeField` is a copyable context holding the modulus; raw residues are
//! `u32` in `[0, p)`. `FieldElem` bundles a residue with its field for the
//! places where carrying the context around explicitly would be noisy.

use crate::error::Error;
use std::fmt;

/// A prime field F_p. The modulus is checked for primality at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    /// Builds F_p, rejecting composite moduli.
    pub fn new(p: u32) -> Result<Self, Error> {
        if is_prime(p) {
            Ok(PrimeField { p })
        } else {
            Err(Error::CompositeModulus(p))
        }
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.p
    }

    /// Reduces an arbitrary integer into the field.
    #[inline]
    pub fn reduce(&self, v: u64) -> u32 {
        (v % self.p as u64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse in F_p.
    pub fn inv(&self, a: u32) -> Result<u32, Error> {
        if a % self.p == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.p as u64 - 2))
    }

    /// `a / b`, failing on `b = 0`.
    pub fn div(&self, a: u32, b: u32) -> Result<u32, Error> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Wraps a residue as an element of this field.
    #[inline]
    pub fn elem(&self, v: u64) -> FieldElem {
        FieldElem {
            value: self.reduce(v),
            field: *self,
        }
    }
}

/// A canonical residue in `[0, p)` together with its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldElem {
    value: u32,
    field: PrimeField,
}

impl FieldElem {
    #[inline]
    pub fn value(&self) -> u32 {
        self.value
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(self, other: FieldElem) {
        assert_eq!(
            self.field, other.field,
            "mixed elements of different prime fields"
        );
    }
}

/// Multiplicative inverse; fails on the zero element.
pub fn field_inv(a: FieldElem) -> Result<FieldElem, Error> {
    Ok(FieldElem {
        value: a.field.inv(a.value)?,
        field: a.field,
    })
}

impl std::ops::Add for FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: FieldElem) -> FieldElem {
        self.check(rhs);
        FieldElem {
            value: self.field.add(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl std::ops::Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: FieldElem) -> FieldElem {
        self.check(rhs);
        FieldElem {
            value: self.field.sub(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl std::ops::Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: FieldElem) -> FieldElem {
        self.check(rhs);
        FieldElem {
            value: self.field.mul(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl std::ops::Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem {
            value: self.field.neg(self.value),
            field: self.field,
        }
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
