use super::matrix::FpVector;
use crate::error::{Error, Result};

/// Reduced row echelon form of a list of rows, zero rows dropped.
///
/// `basis[j][pivots[j]] == 1` and `basis[j][pivots[i]] == 0` for `i != j`.
/// Pivot columns are 0-based and strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RrefResult {
    pub basis: Vec<FpVector>,
    pub pivots: Vec<usize>,
}

impl RrefResult {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `v` in the basis if `v` lies in its span.
    pub fn solve(&self, v: &FpVector) -> Option<Vec<u32>> {
        let coeffs: Vec<u32> = self.pivots.iter().map(|&k| v.get(k)).collect();
        let mut acc = FpVector::zero(v.field(), v.len());
        for (c, b) in coeffs.iter().zip(&self.basis) {
            acc.axpy(*c, b).ok()?;
        }
        (acc == *v).then_some(coeffs)
    }
}

/// Gauss-Jordan elimination. Columns are scanned left to right and the pivot
/// row is the first remaining row with a nonzero entry in that column.
pub fn rref_with_pivots(rows: &[FpVector]) -> Result<RrefResult> {
    let Some(first) = rows.first() else {
        return Ok(RrefResult {
            basis: Vec::new(),
            pivots: Vec::new(),
        });
    };
    let field = first.field();
    let n = first.len();
    for r in rows {
        if r.field() != field {
            return Err(Error::ModulusMismatch(field.modulus(), r.modulus()));
        }
        if r.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.len(),
            });
        }
    }

    let mut work: Vec<Vec<u32>> = rows.iter().map(|r| r.entries().to_vec()).collect();
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..n {
        if top == work.len() {
            break;
        }
        let Some(sel) = (top..work.len()).find(|&r| work[r][col] != 0) else {
            continue;
        };
        work.swap(top, sel);
        let inv = field.inv(work[top][col])?;
        for e in work[top].iter_mut() {
            *e = field.mul(*e, inv);
        }
        let pivot_row = work[top].clone();
        for (r, row) in work.iter_mut().enumerate() {
            if r == top || row[col] == 0 {
                continue;
            }
            let c = row[col];
            for (e, &pv) in row.iter_mut().zip(&pivot_row) {
                *e = field.sub(*e, field.mul(c, pv));
            }
        }
        pivots.push(col);
        top += 1;
    }
    work.truncate(top);
    Ok(RrefResult {
        basis: work.into_iter().map(|r| FpVector::new(field, r)).collect(),
        pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::PrimeField;
    use proptest::prelude::*;

    fn vecs(p: u32, rows: &[&[u32]]) -> Vec<FpVector> {
        rows.iter().map(|r| FpVector::from_slice(p, r).unwrap()).collect()
    }

    #[test]
    fn two_rows_over_f2() {
        let res = rref_with_pivots(&vecs(2, &[&[1, 1, 0], &[0, 1, 1]])).unwrap();
        assert_eq!(res.basis, vecs(2, &[&[1, 0, 1], &[0, 1, 1]]));
        assert_eq!(res.pivots, vec![0, 1]);
        assert_eq!(res.rank(), 2);
    }

    #[test]
    fn zero_and_duplicate_rows() {
        let res = rref_with_pivots(&vecs(2, &[&[0, 0, 0]])).unwrap();
        assert_eq!(res.rank(), 0);
        assert!(res.basis.is_empty());

        let res = rref_with_pivots(&vecs(2, &[&[1, 1], &[1, 1]])).unwrap();
        assert_eq!(res.basis, vecs(2, &[&[1, 1]]));
        assert_eq!(res.pivots, vec![0]);

        let res = rref_with_pivots(&[]).unwrap();
        assert_eq!(res.rank(), 0);
    }

    #[test]
    fn mismatched_rows_rejected() {
        let rows = vec![
            FpVector::from_slice(3, &[1, 2]).unwrap(),
            FpVector::from_slice(3, &[1]).unwrap(),
        ];
        assert!(rref_with_pivots(&rows).is_err());
    }

    proptest! {
        #[test]
        fn rref_structure_and_span(
            p in prop::sample::select(vec![2u32, 3, 5, 7]),
            n in 1usize..7,
            nrows in 1usize..7,
            seed in prop::collection::vec(0u32..1000, 49),
        ) {
            let field = PrimeField::new(p).unwrap();
            let rows: Vec<FpVector> = (0..nrows)
                .map(|r| FpVector::new(field, (0..n).map(|c| seed[r * 7 + c] % p)))
                .collect();
            let res = rref_with_pivots(&rows).unwrap();
            prop_assert!(res.pivots.windows(2).all(|w| w[0] < w[1]));
            for (j, b) in res.basis.iter().enumerate() {
                for (i, &k) in res.pivots.iter().enumerate() {
                    prop_assert_eq!(b.get(k), u32::from(i == j));
                }
            }
            for r in &rows {
                prop_assert!(res.solve(r).is_some());
            }
            // basis rows are themselves combinations of input rows: rank cannot exceed input count
            prop_assert!(res.rank() <= nrows.min(n));
        }
    }
}
