use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted by [`PrimeField::new`].
pub const MAX_PRIME: u32 = 65_521;

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The prime field F_p, used as an arithmetic context for raw residues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeField {
    p: u32,
}

impl TryFrom<u32> for PrimeField {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        f.p
    }
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if p > MAX_PRIME || !is_prime(p) {
            return Err(Error::BadModulus(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, x: u64) -> u32 {
        (x % self.p as u64) as u32
    }

    #[inline]
    pub fn reduce_signed(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u32) -> Result<u32> {
        if a % self.p == 0 {
            return Err(Error::ZeroInversion);
        }
        // Fermat: a^(p-2)
        Ok(self.pow(a, self.p as u64 - 2))
    }

    pub fn element(self, value: u32) -> FieldElement {
        FieldElement {
            value: value % self.p,
            field: self,
        }
    }
}

/// A single residue tagged with its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    field: PrimeField,
}

impl FieldElement {
    pub fn new(value: u32, p: u32) -> Result<Self> {
        Ok(PrimeField::new(p)?.element(value))
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.field.p
    }

    pub fn field(self) -> PrimeField {
        self.field
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.field.p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    /// Inverse of the first operand; the second is ignored.
    Inv,
}

pub fn field_arith(a: FieldElement, b: FieldElement, op: ArithOp) -> Result<FieldElement> {
    if a.field != b.field {
        return Err(Error::ModulusMismatch(a.field.p, b.field.p));
    }
    let f = a.field;
    let value = match op {
        ArithOp::Add => f.add(a.value, b.value),
        ArithOp::Sub => f.sub(a.value, b.value),
        ArithOp::Mul => f.mul(a.value, b.value),
        ArithOp::Inv => f.inv(a.value)?,
    };
    Ok(FieldElement { value, field: f })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(v: u32, p: u32) -> FieldElement {
        FieldElement::new(v, p).unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(field_arith(el(1, 2), el(1, 2), ArithOp::Add).unwrap().value(), 0);
        assert_eq!(field_arith(el(2, 5), el(0, 5), ArithOp::Inv).unwrap().value(), 3);
        assert_eq!(field_arith(el(4, 5), el(3, 5), ArithOp::Mul).unwrap().value(), 2);
        assert_eq!(field_arith(el(1, 5), el(3, 5), ArithOp::Sub).unwrap().value(), 3);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            field_arith(el(0, 7), el(1, 7), ArithOp::Inv),
            Err(Error::ZeroInversion)
        ));
        assert!(matches!(
            field_arith(el(1, 5), el(1, 7), ArithOp::Add),
            Err(Error::ModulusMismatch(5, 7))
        ));
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(1).is_err());
    }

    #[test]
    fn every_nonzero_element_has_inverse() {
        for p in [2u32, 3, 5, 7, 11, 13, 31] {
            let f = PrimeField::new(p).unwrap();
            for a in 1..p {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1, "p={p} a={a}");
            }
        }
    }
}
