//! Enumeration of F_p^n by mixed-radix index.
//!
//! Vector `v` is stored at index `v_0 p^{n-1} + v_1 p^{n-2} + ... + v_{n-1}`
//! (coordinate 0 is the most significant digit). Sets are dense boolean masks.

use crate::error::{Error, Result};
use crate::ff::{FpVector, PrimeField};

/// Largest domain any dense table in the crate may span.
pub const MAX_DOMAIN: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FpSpace {
    field: PrimeField,
    n: usize,
    size: usize,
}

impl FpSpace {
    pub fn new(field: PrimeField, n: usize) -> Result<Self> {
        let mut size: usize = 1;
        for _ in 0..n {
            size = size
                .checked_mul(field.modulus() as usize)
                .filter(|&s| s <= MAX_DOMAIN)
                .ok_or(Error::DomainTooLarge(usize::MAX))?;
        }
        Ok(FpSpace { field, n, size })
    }

    pub fn with_modulus(p: u32, n: usize) -> Result<Self> {
        FpSpace::new(PrimeField::new(p)?, n)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.modulus()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn index_of(&self, v: &FpVector) -> usize {
        debug_assert_eq!(v.len(), self.n);
        self.index_of_digits(v.entries())
    }

    pub fn index_of_digits(&self, digits: &[u32]) -> usize {
        let p = self.p() as usize;
        digits.iter().fold(0, |acc, &d| acc * p + d as usize)
    }

    pub fn digits_into(&self, mut idx: usize, out: &mut [u32]) {
        let p = self.p() as usize;
        for slot in out.iter_mut().rev() {
            *slot = (idx % p) as u32;
            idx /= p;
        }
    }

    pub fn digits(&self, idx: usize) -> Vec<u32> {
        let mut out = vec![0; self.n];
        self.digits_into(idx, &mut out);
        out
    }

    pub fn vector(&self, idx: usize) -> FpVector {
        FpVector::new(self.field, self.digits(idx))
    }

    pub fn vectors(&self) -> impl Iterator<Item = FpVector> + '_ {
        (0..self.size).map(|i| self.vector(i))
    }

    fn zip_digits(&self, a: usize, b: usize, op: impl Fn(u32, u32) -> u32) -> usize {
        let p = self.p() as usize;
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.n {
            out += op((a % p) as u32, (b % p) as u32) as usize * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        if self.p() == 2 {
            return a ^ b;
        }
        self.zip_digits(a, b, |x, y| self.field.add(x, y))
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        if self.p() == 2 {
            return a ^ b;
        }
        self.zip_digits(a, b, |x, y| self.field.sub(x, y))
    }

    /// ⟨a, b⟩ over F_p for two indexed vectors.
    pub fn dot(&self, a: usize, b: usize) -> u32 {
        if self.p() == 2 {
            return (a & b).count_ones() % 2;
        }
        let p = self.p() as usize;
        let (mut a, mut b) = (a, b);
        let mut acc = 0usize;
        for _ in 0..self.n {
            acc += (a % p) * (b % p);
            a /= p;
            b /= p;
        }
        (acc % p) as u32
    }
}

/// A subset of F_p^n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpSet {
    space: FpSpace,
    mask: Vec<bool>,
}

impl FpSet {
    pub fn empty(space: FpSpace) -> Self {
        FpSet {
            space,
            mask: vec![false; space.size()],
        }
    }

    pub fn full(space: FpSpace) -> Self {
        FpSet {
            space,
            mask: vec![true; space.size()],
        }
    }

    pub fn from_mask(space: FpSpace, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != space.size() {
            return Err(Error::DimensionMismatch {
                expected: space.size(),
                found: mask.len(),
            });
        }
        Ok(FpSet { space, mask })
    }

    /// Set of vectors whose digits satisfy `pred`.
    pub fn from_predicate(space: FpSpace, mut pred: impl FnMut(&[u32]) -> bool) -> Self {
        let mut digits = vec![0; space.n()];
        let mask = (0..space.size())
            .map(|i| {
                space.digits_into(i, &mut digits);
                pred(&digits)
            })
            .collect();
        FpSet { space, mask }
    }

    pub fn from_vectors<'a>(space: FpSpace, vs: impl IntoIterator<Item = &'a FpVector>) -> Self {
        let mut set = FpSet::empty(space);
        for v in vs {
            set.mask[space.index_of(v)] = true;
        }
        set
    }

    pub fn space(&self) -> FpSpace {
        self.space
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn insert(&mut self, idx: usize) {
        self.mask[idx] = true;
    }

    pub fn contains_index(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    pub fn contains(&self, v: &FpVector) -> bool {
        self.mask[self.space.index_of(v)]
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn density(&self) -> f64 {
        self.len() as f64 / self.space.size() as f64
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&i| self.mask[i]).collect()
    }

    pub fn is_subset(&self, other: &FpSet) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    pub fn indicator(&self) -> Vec<f64> {
        self.mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }
}
