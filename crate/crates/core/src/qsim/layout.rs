use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::MAX_DOMAIN;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wire {
    pub name: String,
    pub dim: usize,
}

/// Named wires of arbitrary dimension; wire 0 is the most significant digit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    wires: Vec<Wire>,
    strides: Vec<usize>,
    total: usize,
}

impl Layout {
    pub fn new<S: AsRef<str>>(wires: &[(S, usize)]) -> Result<Arc<Layout>> {
        let mut ws: Vec<Wire> = Vec::with_capacity(wires.len());
        for (name, dim) in wires {
            let name = name.as_ref();
            if *dim == 0 {
                return Err(Error::Wire(format!("wire {name} has dimension 0")));
            }
            if ws.iter().any(|w| w.name == name) {
                return Err(Error::Wire(format!("duplicate wire name {name}")));
            }
            ws.push(Wire {
                name: name.to_string(),
                dim: *dim,
            });
        }
        let mut strides = vec![1; ws.len()];
        let mut total: usize = 1;
        for k in (0..ws.len()).rev() {
            strides[k] = total;
            total = total
                .checked_mul(ws[k].dim)
                .filter(|&t| t <= MAX_DOMAIN)
                .ok_or(Error::DomainTooLarge(usize::MAX))?;
        }
        Ok(Arc::new(Layout {
            wires: ws,
            strides,
            total,
        }))
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn len(&self) -> usize {
        self.wires.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wires.is_empty()
    }

    pub fn wires(&self) -> &[Wire] {
        &self.wires
    }

    pub fn wire(&self, name: &str) -> Result<usize> {
        self.wires
            .iter()
            .position(|w| w.name == name)
            .ok_or_else(|| Error::Wire(format!("no wire named {name}")))
    }

    pub fn dim(&self, w: usize) -> usize {
        self.wires[w].dim
    }

    pub fn stride(&self, w: usize) -> usize {
        self.strides[w]
    }

    #[inline]
    pub fn digit(&self, idx: usize, w: usize) -> usize {
        (idx / self.strides[w]) % self.wires[w].dim
    }

    #[inline]
    pub fn with_digit(&self, idx: usize, w: usize, value: usize) -> usize {
        let old = self.digit(idx, w);
        idx - old * self.strides[w] + value * self.strides[w]
    }

    /// Basis index from `(wire, value)` pairs; unlisted wires are 0.
    pub fn index(&self, values: &[(usize, usize)]) -> usize {
        values.iter().map(|&(w, v)| v * self.strides[w]).sum()
    }

    pub fn index_by_name(&self, values: &[(&str, usize)]) -> Result<usize> {
        let mut idx = 0;
        for &(name, v) in values {
            let w = self.wire(name)?;
            if v >= self.dim(w) {
                return Err(Error::Wire(format!("value {v} out of range for wire {name}")));
            }
            idx += v * self.strides[w];
        }
        Ok(idx)
    }

    /// Joint value of several wires, first listed wire most significant.
    pub fn joint(&self, idx: usize, wires: &[usize]) -> usize {
        wires.iter().fold(0, |acc, &w| acc * self.dim(w) + self.digit(idx, w))
    }

    pub fn joint_dim(&self, wires: &[usize]) -> usize {
        wires.iter().map(|&w| self.dim(w)).product()
    }

    /// Offsets of every joint value of `wires` relative to a base index with those digits zero.
    pub fn offsets(&self, wires: &[usize]) -> Vec<usize> {
        let mut out = vec![0usize];
        for &w in wires {
            let mut next = Vec::with_capacity(out.len() * self.dim(w));
            for &o in &out {
                for v in 0..self.dim(w) {
                    next.push(o + v * self.strides[w]);
                }
            }
            out = next;
        }
        out
    }

    /// All indices whose digits on `wires` are zero.
    pub fn bases(&self, wires: &[usize]) -> Vec<usize> {
        (0..self.total).filter(|&i| wires.iter().all(|&w| self.digit(i, w) == 0)).collect()
    }

    pub fn check_wire(&self, w: usize) -> Result<()> {
        if w >= self.wires.len() {
            return Err(Error::Wire(format!("wire index {w} out of range")));
        }
        Ok(())
    }

    pub fn check_distinct(&self, ws: &[usize]) -> Result<()> {
        for (i, &a) in ws.iter().enumerate() {
            self.check_wire(a)?;
            if ws[..i].contains(&a) {
                return Err(Error::Wire(format!("wire {} used twice in one gate", self.wires[a].name)));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_radix() {
        let l = Layout::new(&[("a", 3), ("f", 2), ("b", 5)]).unwrap();
        assert_eq!(l.total_dim(), 30);
        let i = l.index_by_name(&[("a", 2), ("f", 1), ("b", 4)]).unwrap();
        assert_eq!(i, 2 * 10 + 5 + 4);
        assert_eq!(l.digit(i, 0), 2);
        assert_eq!(l.digit(i, 1), 1);
        assert_eq!(l.digit(i, 2), 4);
        assert_eq!(l.joint(i, &[2, 0]), 4 * 3 + 2);
        assert_eq!(l.with_digit(i, 1, 0), 24);
        assert_eq!(l.offsets(&[1, 2]).len(), 10);
        assert_eq!(l.bases(&[1, 2]), vec![0, 10, 20]);
        assert!(Layout::new(&[("a", 2), ("a", 2)]).is_err());
        assert!(l.index_by_name(&[("a", 3)]).is_err());
    }
}
