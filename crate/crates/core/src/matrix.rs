//! Small dense square integer matrices.
//!
//! Matrices act on column vectors; column `j` of a reflection holds the image
//! of the `j`-th basis vector, and column `j` of a basis matrix is the `j`-th
//! basis vector.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zero(n: usize) -> Self {
        IntMatrix {
            n,
            data: vec![0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Builds a matrix from its rows; `None` if the rows do not form a square.
    pub fn from_rows(rows: &[Vec<i64>]) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(IntMatrix {
            n,
            data: rows.concat(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data
            .chunks(self.n.max(1))
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.n, "dimension mismatch");
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        IntMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> i64 {
        let n = self.n;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> = self
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(i128::from).collect())
            .collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&r| a[r][k] != 0) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        (sign * a[n - 1][n - 1]) as i64
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let n = self.n;
        let mut a: Vec<Vec<i128>> = self
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(i128::from).collect())
            .collect();
        let mut rank = 0;
        for col in 0..n {
            let Some(pivot) = (rank..n).find(|&r| a[r][col] != 0) else {
                continue;
            };
            a.swap(rank, pivot);
            let (top, rest) = a.split_at_mut(rank + 1);
            let pivot_row = &top[rank];
            for row in rest.iter_mut().filter(|row| row[col] != 0) {
                let (p, q) = (pivot_row[col], row[col]);
                for (x, y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x = *x * p - y * q;
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs() == 1
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;

    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.n + j]
    }
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = String;

    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self, String> {
        IntMatrix::from_rows(&rows).ok_or_else(|| "integer matrix must be square".to_string())
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        m.rows()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, row) in self.rows().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            let cells: Vec<String> = row.iter().map(i64::to_string).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
