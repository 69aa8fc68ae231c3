use std::fmt;

use serde::{Deserialize, Serialize};

use super::element::{FieldElement, PrimeField};
use crate::error::{Error, Result};

/// A vector in F_p^n.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpVector {
    field: PrimeField,
    entries: Vec<u32>,
}

impl FpVector {
    /// Builds a vector, reducing every entry modulo `p`.
    pub fn new(field: PrimeField, entries: impl IntoIterator<Item = u32>) -> Self {
        let p = field.modulus();
        FpVector {
            field,
            entries: entries.into_iter().map(|e| e % p).collect(),
        }
    }

    pub fn from_slice(p: u32, entries: &[u32]) -> Result<Self> {
        Ok(FpVector::new(PrimeField::new(p)?, entries.iter().copied()))
    }

    pub fn zero(field: PrimeField, n: usize) -> Self {
        FpVector {
            field,
            entries: vec![0; n],
        }
    }

    /// Standard basis vector e_k (0-based).
    pub fn basis(field: PrimeField, n: usize, k: usize) -> Self {
        let mut v = FpVector::zero(field, n);
        v.entries[k] = 1;
        v
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn modulus(&self) -> u32 {
        self.field.modulus()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> u32 {
        self.entries[i]
    }

    pub fn element(&self, i: usize) -> FieldElement {
        self.field.element(self.entries[i])
    }

    pub fn set(&mut self, i: usize, value: u32) {
        self.entries[i] = value % self.field.modulus();
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn weight(&self) -> usize {
        self.entries.iter().filter(|&&e| e != 0).count()
    }

    fn check(&self, other: &FpVector) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(self.modulus(), other.modulus()));
        }
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &FpVector) -> Result<FpVector> {
        self.check(other)?;
        let f = self.field;
        Ok(FpVector {
            field: f,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &FpVector) -> Result<FpVector> {
        self.check(other)?;
        let f = self.field;
        Ok(FpVector {
            field: f,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f.sub(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: u32) -> FpVector {
        let f = self.field;
        FpVector {
            field: f,
            entries: self.entries.iter().map(|&a| f.mul(a, c % f.modulus())).collect(),
        }
    }

    /// `self += c * other`, in place.
    pub fn axpy(&mut self, c: u32, other: &FpVector) -> Result<()> {
        self.check(other)?;
        let f = self.field;
        for (a, &b) in self.entries.iter_mut().zip(&other.entries) {
            *a = f.add(*a, f.mul(c, b));
        }
        Ok(())
    }
}

impl fmt::Display for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

pub fn inner_product(a: &FpVector, b: &FpVector) -> Result<FieldElement> {
    a.check(b)?;
    let f = a.field;
    let acc = a
        .entries
        .iter()
        .zip(&b.entries)
        .fold(0u64, |acc, (&x, &y)| (acc + x as u64 * y as u64) % f.modulus() as u64);
    Ok(f.element(acc as u32))
}

/// A dense row-major matrix over F_p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FpMatrix {
    pub fn from_rows(field: PrimeField, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r.iter().map(|&e| e % field.modulus()));
        }
        Ok(FpMatrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_row_major(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        let p = field.modulus();
        Ok(FpMatrix {
            field,
            rows,
            cols,
            data: data.into_iter().map(|e| e % p).collect(),
        })
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FpMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = FpMatrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.field.modulus();
    }

    pub fn row(&self, r: usize) -> FpVector {
        FpVector::new(self.field, self.data[r * self.cols..(r + 1) * self.cols].iter().copied())
    }

    pub fn row_major(&self) -> &[u32] {
        &self.data
    }

    pub fn sub(&self, other: &FpMatrix) -> Result<FpMatrix> {
        self.check_same_shape(other)?;
        let f = self.field;
        Ok(FpMatrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &FpMatrix) -> Result<FpMatrix> {
        self.check_same_shape(other)?;
        let f = self.field;
        Ok(FpMatrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect(),
        })
    }

    fn check_same_shape(&self, other: &FpMatrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(self.field.modulus(), other.field.modulus()));
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(())
    }
}

/// Exact product `M v` over F_p; the ground truth every other route is checked against.
pub fn matvec(m: &FpMatrix, v: &FpVector) -> Result<FpVector> {
    if m.field != v.field() {
        return Err(Error::ModulusMismatch(m.field.modulus(), v.modulus()));
    }
    if m.cols != v.len() {
        return Err(Error::DimensionMismatch {
            expected: m.cols,
            found: v.len(),
        });
    }
    let p = m.field.modulus() as u64;
    let out = (0..m.rows).map(|r| {
        let row = &m.data[r * m.cols..(r + 1) * m.cols];
        (row.iter()
            .zip(v.entries())
            .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p)) as u32
    });
    Ok(FpVector::new(m.field, out))
}
