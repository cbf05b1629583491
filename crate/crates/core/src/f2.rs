//! Dense matrices over F2 with at most 64 columns, one machine word per row.

use std::fmt;

use serde::Serialize;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(cols <= 64, "at most 64 columns");
        F2Matrix {
            rows,
            cols,
            data: vec![0; rows],
        }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = F2Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v & 1 == 1);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i] >> j & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        if v {
            self.data[i] |= 1 << j;
        } else {
            self.data[i] &= !(1 << j);
        }
    }

    pub fn row_bits(&self, i: usize) -> u64 {
        self.data[i]
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| u8::from(self.get(i, j))).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = F2Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// M v for a column vector given as a bitmask.
    pub fn mul_vec(&self, v: u64) -> u64 {
        let mut out = 0u64;
        for i in 0..self.rows {
            if (self.data[i] & v).count_ones() % 2 == 1 {
                out |= 1 << i;
            }
        }
        out
    }

    pub fn column_sums(&self) -> u64 {
        self.data.iter().fold(0, |acc, r| acc ^ r)
    }

    /// Reduced row echelon form and pivot columns; pivots are chosen at the
    /// lowest available column index.
    pub fn rref(&self) -> (F2Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for j in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, j)) else {
                continue;
            };
            m.data.swap(r, p);
            let pivot_row = m.data[r];
            for i in 0..m.rows {
                if i != r && m.get(i, j) {
                    m.data[i] ^= pivot_row;
                }
            }
            pivots.push(j);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of {v : M v = 0}, one vector per free column in increasing order.
    pub fn kernel_basis(&self) -> Vec<u64> {
        let (m, pivots) = self.rref();
        let mut basis = Vec::new();
        for f in (0..self.cols).filter(|j| !pivots.contains(j)) {
            let mut v = 1u64 << f;
            for (r, &p) in pivots.iter().enumerate() {
                if m.get(r, f) {
                    v |= 1 << p;
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Rank of a set of vectors given as bitmasks.
pub fn span_rank(vectors: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &v in vectors {
        let mut x = v;
        for &b in &basis {
            x = x.min(x ^ b);
        }
        if x != 0 {
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.to_rows() {
            writeln!(f, "{r:?}")?;
        }
        Ok(())
    }
}

impl fmt::Display for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.to_rows().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let s: Vec<String> = r.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", s.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for F2Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel() {
        let m = F2Matrix::from_rows(&[vec![1, 0, 0], vec![1, 0, 0], vec![0, 0, 0]]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.kernel_basis(), vec![0b010, 0b100]);
        assert_eq!(m.transpose().kernel_basis(), vec![0b011, 0b100]);
        assert_eq!(m.column_sums(), 0);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = F2Matrix::from_rows(&[
            vec![1, 1, 0, 1],
            vec![0, 1, 1, 1],
            vec![1, 0, 1, 0],
        ]);
        let k = m.kernel_basis();
        assert_eq!(k.len() + m.rank(), 4);
        for v in k {
            assert_eq!(m.mul_vec(v), 0);
        }
        assert_eq!(span_rank(&[0b11, 0b01, 0b10]), 2);
    }
}
