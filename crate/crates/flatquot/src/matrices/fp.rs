//! Dense matrices over a prime field `F_p`, sized for the desk-scale
//! triangularization and subgroup constructions (`p < 10^6`, `n` small).
//!
//! Elimination-based routines (inverse, kernel, rank) are deterministic:
//! pivots are scanned top-to-bottom, free columns ascending, so repeated runs
//! produce identical bases.

use crate::exact_arith::{inv_mod_u64, mul_mod_u64};

/// A rows×cols matrix over `F_p`, row-major, entries in `0..p`.
#[derive(Clone, PartialEq, Eq)]
pub struct FpMat {
    pub p: u64,
    pub rows: usize,
    pub cols: usize,
    data: Vec<u64>,
}

impl std::fmt::Debug for FpMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FpMat(p={}, {}x{}", self.p, self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "; {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, ")")
    }
}

impl FpMat {
    pub fn zero(p: u64, rows: usize, cols: usize) -> Self {
        FpMat { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zero(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(p: u64, rows: &[Vec<u64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data = rows.iter().flatten().map(|&x| x % p).collect();
        FpMat { p, rows: r, cols: c, data }
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self, range: std::ops::Range<usize>) -> Vec<Vec<u64>> {
        range.map(|j| self.column(j)).collect()
    }

    pub fn from_columns(p: u64, rows: usize, cols: &[Vec<u64>]) -> Self {
        let mut m = Self::zero(p, rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn mul(&self, other: &FpMat) -> FpMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        assert_eq!(self.p, other.p);
        let p = self.p;
        let mut out = FpMat::zero(p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let add = mul_mod_u64(a, other.get(k, j), p);
                    let cur = out.get(i, j);
                    out.set(i, j, (cur + add) % p);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len());
        let p = self.p;
        (0..self.rows)
            .map(|i| {
                v.iter().enumerate().fold(0u64, |acc, (j, &vj)| {
                    (acc + mul_mod_u64(self.get(i, j), vj, p)) % p
                })
            })
            .collect()
    }

    /// `self - μI` for square matrices.
    pub fn sub_scalar_diag(&self, mu: u64) -> FpMat {
        assert!(self.is_square());
        let mut m = self.clone();
        for i in 0..self.rows {
            let cur = m.get(i, i);
            m.set(i, i, (cur + self.p - mu % self.p) % self.p);
        }
        m
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<FpMat> {
        assert!(self.is_square());
        let (n, p) = (self.rows, self.p);
        let mut a = self.clone();
        let mut inv = FpMat::identity(p, n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| a.get(r, col) != 0)?;
            if pivot != col {
                for j in 0..n {
                    let (x, y) = (a.get(col, j), a.get(pivot, j));
                    a.set(col, j, y);
                    a.set(pivot, j, x);
                    let (x, y) = (inv.get(col, j), inv.get(pivot, j));
                    inv.set(col, j, y);
                    inv.set(pivot, j, x);
                }
            }
            let s = inv_mod_u64(a.get(col, col), p).expect("pivot invertible mod prime");
            for j in 0..n {
                a.set(col, j, mul_mod_u64(a.get(col, j), s, p));
                inv.set(col, j, mul_mod_u64(inv.get(col, j), s, p));
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col);
                if f == 0 {
                    continue;
                }
                for j in 0..n {
                    let sub = mul_mod_u64(f, a.get(col, j), p);
                    a.set(r, j, (a.get(r, j) + p - sub % p) % p);
                    let sub = mul_mod_u64(f, inv.get(col, j), p);
                    inv.set(r, j, (inv.get(r, j) + p - sub % p) % p);
                }
            }
        }
        Some(inv)
    }

    /// Row-reduce in place; returns the pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if pr != row {
                for j in 0..self.cols {
                    let (x, y) = (self.get(row, j), self.get(pr, j));
                    self.set(row, j, y);
                    self.set(pr, j, x);
                }
            }
            let s = inv_mod_u64(self.get(row, col), p).expect("pivot invertible mod prime");
            for j in 0..self.cols {
                let v = mul_mod_u64(self.get(row, j), s, p);
                self.set(row, j, v);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let f = self.get(r, col);
                if f == 0 {
                    continue;
                }
                for j in 0..self.cols {
                    let sub = mul_mod_u64(f, self.get(row, j), p);
                    let v = (self.get(r, j) + p - sub % p) % p;
                    self.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// A deterministic basis of the null space, returned as the columns of a
    /// cols×k matrix (free variables taken ascending).
    pub fn kernel_basis(&self) -> FpMat {
        let p = self.p;
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = FpMat::zero(p, self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            basis.set(f, k, 1);
            for (row, &pc) in pivots.iter().enumerate() {
                let v = m.get(row, f);
                if v != 0 {
                    basis.set(pc, k, p - v);
                }
            }
        }
        basis
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.is_square()
            && (1..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == 0))
    }

    pub fn diagonal(&self) -> Vec<u64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    /// Characteristic polynomial of a square matrix via the Berkowitz
    /// recurrence (division-free), lowest degree first, monic.
    pub fn char_poly(&self) -> Vec<u64> {
        assert!(self.is_square());
        let (n, p) = (self.rows, self.p);
        if n == 0 {
            return vec![1];
        }
        // c holds the char poly of the leading r×r principal submatrix,
        // highest degree first.
        let mut c = vec![1u64, (p - self.get(0, 0) % p) % p];
        for r in 1..n {
            // t = [1, -A[r][r], -(R C), -(R M C), -(R M^2 C), ...]
            let corner = self.get(r, r);
            let row: Vec<u64> = (0..r).map(|j| self.get(r, j)).collect();
            let col: Vec<u64> = (0..r).map(|i| self.get(i, r)).collect();
            let mut t = Vec::with_capacity(r + 2);
            t.push(1u64);
            t.push((p - corner % p) % p);
            let mut w = col.clone();
            for _ in 0..r {
                let dot = row
                    .iter()
                    .zip(&w)
                    .fold(0u64, |acc, (&a, &b)| (acc + mul_mod_u64(a, b, p)) % p);
                t.push((p - dot) % p);
                // w <- M w with M the leading r×r principal submatrix
                let mut next = vec![0u64; r];
                for (i, slot) in next.iter_mut().enumerate() {
                    for (j, &wj) in w.iter().enumerate() {
                        *slot = (*slot + mul_mod_u64(self.get(i, j), wj, p)) % p;
                    }
                }
                w = next;
            }
            let mut out = vec![0u64; r + 2];
            for (i, slot) in out.iter_mut().enumerate() {
                for (j, &cj) in c.iter().enumerate() {
                    if i >= j && i - j < t.len() {
                        *slot = (*slot + mul_mod_u64(t[i - j], cj, p)) % p;
                    }
                }
            }
            c = out;
        }
        c.reverse();
        c
    }

    /// The root multiset of the characteristic polynomial if it splits,
    /// ascending with multiplicity.
    pub fn split_eigenvalues(&self) -> Option<Vec<u64>> {
        let p = self.p;
        let mut rem = self.char_poly();
        let mut roots = Vec::with_capacity(self.rows);
        for a in 0..p {
            while rem.len() > 1 && crate::polynomials::eval_fp(&rem, a, p) == 0 {
                rem = crate::polynomials::deflate_fp(&rem, a, p);
                roots.push(a);
            }
            if rem.len() == 1 {
                break;
            }
        }
        (rem.len() == 1).then_some(roots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let p = 13;
        let m = FpMat::from_rows(p, &[vec![2, 5, 1], vec![0, 3, 4], vec![7, 1, 2]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), FpMat::identity(p, 3));
        assert_eq!(inv.mul(&m), FpMat::identity(p, 3));
        let singular = FpMat::from_rows(p, &[vec![1, 2], vec![2, 4]]);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn kernel_of_singular_matrix() {
        let p = 7;
        let m = FpMat::from_rows(p, &[vec![1, 2, 3], vec![2, 4, 6], vec![0, 0, 1]]);
        let k = m.kernel_basis();
        assert_eq!(k.cols, 1);
        let v = k.column(0);
        assert_eq!(m.mul_vec(&v), vec![0, 0, 0]);
        assert_eq!(FpMat::identity(p, 3).kernel_basis().cols, 0);
    }

    #[test]
    fn char_poly_matches_hand_expansion() {
        // x^2 - (a+d)x + (ad - bc) for a 2x2 matrix.
        let p = 11;
        let m = FpMat::from_rows(p, &[vec![3, 4], vec![5, 6]]);
        // trace 9, det 18-20 = -2 ≡ 9
        assert_eq!(m.char_poly(), vec![9, (p - 9), 1]);
        // Cayley-Hamilton over F_p.
        let c = m.char_poly();
        let mut acc = FpMat::zero(p, 2, 2);
        let mut pow = FpMat::identity(p, 2);
        for &ck in &c {
            for i in 0..2 {
                for j in 0..2 {
                    let v = (acc.get(i, j) + mul_mod_u64(ck, pow.get(i, j), p)) % p;
                    acc.set(i, j, v);
                }
            }
            pow = pow.mul(&m);
        }
        assert_eq!(acc, FpMat::zero(p, 2, 2));
    }

    #[test]
    fn split_eigenvalues_of_triangular() {
        let p = 5;
        let m = FpMat::from_rows(p, &[vec![2, 1], vec![0, 3]]);
        assert_eq!(m.split_eigenvalues().unwrap(), vec![2, 3]);
        // x^2 + 1 does not split over F_3.
        let rot = FpMat::from_rows(3, &[vec![0, 2], vec![1, 0]]);
        assert!(rot.split_eigenvalues().is_none());
    }
}
