//! Exact rational matrix algebra for commuting families.
//!
//! A [`CommutingFamily`] is a tuple of pairwise-commuting invertible rational
//! matrices `M_1, ..., M_m` together with the prime support `D` of all entries
//! of the `M_i` and their inverses. It stands for the group
//! `K(M_1, ..., M_m) ⋊ Z^m`, where `K` is the subgroup of `Q^n` generated by
//! all `M_1^{k_1} ··· M_m^{k_m} v` with `v ∈ Z^n`.
//!
//! For a prime `p ∉ D` at which every characteristic polynomial splits, the
//! family reduces to commuting matrices over `F_p`, which share a
//! simultaneous eigenvector and a simultaneous upper-triangular form. The
//! triangularization yields an invariant hyperplane in `K/pK` and hence an
//! index-`p` subgroup of `K`, the seed of the quotient family `Z_p ⋊ ⊕Z_{r_i}`.

pub mod fp;

use crate::exact_arith::{
    self, denominator_support, multiplicative_order_u64, ExactArithError, PrimeSet, Rational,
};
use crate::polynomials::{MonicPoly, PolyError};
use fp::FpMat;
use serde::Deserialize;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix {index} is {found}x{found2}, expected {expected}x{expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize, found2: usize },
    #[error("matrices {0} and {1} do not commute")]
    NotCommuting(usize, usize),
    #[error("matrix {0} is singular")]
    Singular(usize),
    #[error("a commuting family needs at least one matrix")]
    EmptyFamily,
    #[error("prime {p} is unusable here: {reason}")]
    BadPrime { p: u64, reason: String },
    #[error("characteristic polynomial of matrix {index} does not split over F_{p} with nonzero roots")]
    NotSplit { p: u64, index: usize },
    #[error("the prescribed diagonal is not a permutation of the eigenvalue multiset")]
    BadOrder,
    #[error("entry ({row},{col}) of matrix {index}: cannot parse {literal:?}")]
    BadEntry { index: usize, row: usize, col: usize, literal: String },
    #[error("malformed family file: {0}")]
    BadFile(String),
    #[error(transparent)]
    Arith(#[from] ExactArithError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A square matrix with rational entries, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl std::fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "QMatrix{:?}", self.rows_vec())
    }
}

impl QMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self, MatrixError> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::DimensionMismatch {
                    index: 0,
                    expected: n,
                    found: i,
                    found2: row.len(),
                });
            }
        }
        Ok(QMatrix { n, entries: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Rational::from(x)).collect())
            .collect();
        Self::new(rows).expect("square integer matrix")
    }

    /// Parse from rows of `"a/b"` strings.
    pub fn from_str_rows(rows: &[Vec<String>], index: usize) -> Result<Self, MatrixError> {
        let n = rows.len();
        let mut parsed = Vec::with_capacity(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::DimensionMismatch {
                    index,
                    expected: n,
                    found: i,
                    found2: row.len(),
                });
            }
            let mut prow = Vec::with_capacity(n);
            for (j, lit) in row.iter().enumerate() {
                let q: Rational = lit.parse().map_err(|_| MatrixError::BadEntry {
                    index,
                    row: i,
                    col: j,
                    literal: lit.clone(),
                })?;
                prow.push(q);
            }
            parsed.push(prow);
        }
        Self::new(parsed)
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![Rational::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = Rational::one();
        }
        QMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.n + j]
    }

    pub fn rows_vec(&self) -> Vec<Vec<Rational>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Rational> {
        self.entries.iter()
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut entries = vec![Rational::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let slot = &mut entries[i * n + j];
                    *slot = &*slot + &(a * other.get(k, j));
                }
            }
        }
        QMatrix { n, entries }
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.n, other.n);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        QMatrix { n: self.n, entries }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Rational::is_zero)
    }

    /// Gauss-Jordan inverse over the rationals; `None` when singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        let n = self.n;
        let mut a = self.rows_vec();
        let mut inv = QMatrix::identity(n).rows_vec();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let s = a[col][col].recip();
            for j in 0..n {
                a[col][j] = &a[col][j] * &s;
                inv[col][j] = &inv[col][j] * &s;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for j in 0..n {
                    a[r][j] = &a[r][j] - &(&f * &a[col][j]);
                    inv[r][j] = &inv[r][j] - &(&f * &inv[col][j]);
                }
            }
        }
        Some(QMatrix::new(inv).expect("square"))
    }

    /// Monic characteristic polynomial `det(xI - M)` by the Berkowitz
    /// recurrence; division-free, exact.
    pub fn char_poly(&self) -> MonicPoly {
        let n = self.n;
        assert!(n >= 1);
        let mut c = vec![Rational::one(), -self.get(0, 0).clone()];
        for r in 1..n {
            let corner = self.get(r, r);
            let row: Vec<&Rational> = (0..r).map(|j| self.get(r, j)).collect();
            let col: Vec<Rational> = (0..r).map(|i| self.get(i, r).clone()).collect();
            let mut t = Vec::with_capacity(r + 2);
            t.push(Rational::one());
            t.push(-corner.clone());
            let mut w = col.clone();
            for _ in 0..r {
                let mut dot = Rational::zero();
                for (a, b) in row.iter().zip(&w) {
                    dot = &dot + &(*a * b);
                }
                t.push(-dot);
                let mut next = vec![Rational::zero(); r];
                for (i, slot) in next.iter_mut().enumerate() {
                    for (j, wj) in w.iter().enumerate() {
                        *slot = &*slot + &(self.get(i, j) * wj);
                    }
                }
                w = next;
            }
            let mut out = vec![Rational::zero(); r + 2];
            for (i, slot) in out.iter_mut().enumerate() {
                for (j, cj) in c.iter().enumerate() {
                    if i >= j && i - j < t.len() {
                        *slot = &*slot + &(&t[i - j] * cj);
                    }
                }
            }
            c = out;
        }
        c.reverse();
        MonicPoly::new(c).expect("Berkowitz output is monic of degree n")
    }

    /// Entry-wise reduction mod `p`; fails if any denominator vanishes mod `p`.
    pub fn reduce_mod_p(&self, p: u64) -> Result<FpMat, ExactArithError> {
        let mut m = FpMat::zero(p, self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, exact_arith::reduce_mod_p(self.get(i, j), p)?);
            }
        }
        Ok(m)
    }
}

/// Pairwise-commuting invertible rational matrices with their prime support.
///
/// `D` collects the prime factors of every entry denominator of the `M_i`
/// *and* of the `M_i^{-1}`, so reduction mod any `p ∉ D` stays invertible.
#[derive(Clone, Debug)]
pub struct CommutingFamily {
    n: usize,
    matrices: Vec<QMatrix>,
    inverses: Vec<QMatrix>,
    d_support: PrimeSet,
}

impl CommutingFamily {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[QMatrix] {
        &self.matrices
    }

    pub fn inverses(&self) -> &[QMatrix] {
        &self.inverses
    }

    pub fn d_support(&self) -> &PrimeSet {
        &self.d_support
    }
}

/// Check squareness, pairwise commutation and invertibility, and compute the
/// prime support `D`.
pub fn validate_family(matrices: Vec<QMatrix>) -> Result<CommutingFamily, MatrixError> {
    let Some(first) = matrices.first() else {
        return Err(MatrixError::EmptyFamily);
    };
    let n = first.dim();
    for (i, m) in matrices.iter().enumerate() {
        if m.dim() != n {
            return Err(MatrixError::DimensionMismatch {
                index: i,
                expected: n,
                found: m.dim(),
                found2: m.dim(),
            });
        }
    }
    for i in 0..matrices.len() {
        for j in i + 1..matrices.len() {
            if matrices[i].mul(&matrices[j]) != matrices[j].mul(&matrices[i]) {
                return Err(MatrixError::NotCommuting(i, j));
            }
        }
    }
    let mut inverses = Vec::with_capacity(matrices.len());
    for (i, m) in matrices.iter().enumerate() {
        inverses.push(m.inverse().ok_or(MatrixError::Singular(i))?);
    }
    let mut d_support = PrimeSet::empty();
    for m in matrices.iter().chain(&inverses) {
        for q in m.entries() {
            d_support = d_support.union(&denominator_support(q)?);
        }
    }
    Ok(CommutingFamily { n, matrices, inverses, d_support })
}

/// The finite-generation criterion for `K(M_1, ..., M_m)`: every `χ(M_i)` and
/// `χ(M_i^{-1})` has integer coefficients. Then all powers have bounded
/// denominators (Cayley-Hamilton) and the semidirect product is polycyclic.
pub fn finitely_generated_criterion(fam: &CommutingFamily) -> bool {
    fam.matrices
        .iter()
        .chain(&fam.inverses)
        .all(|m| m.char_poly().has_integer_coeffs())
}

/// Reduce every matrix of the family mod `p ∉ D`; each reduction is checked
/// invertible over `F_p` (it can only fail when `p` divides a determinant
/// numerator).
pub fn reduce_k_mod_p(fam: &CommutingFamily, p: u64) -> Result<Vec<FpMat>, MatrixError> {
    if fam.d_support.contains(p) {
        return Err(MatrixError::BadPrime { p, reason: format!("p lies in D = {}", fam.d_support) });
    }
    let mut out = Vec::with_capacity(fam.matrices.len());
    for (i, m) in fam.matrices.iter().enumerate() {
        let reduced = m.reduce_mod_p(p)?;
        if reduced.inverse().is_none() {
            return Err(MatrixError::BadPrime {
                p,
                reason: format!("matrix {i} becomes singular mod {p}"),
            });
        }
        out.push(reduced);
    }
    Ok(out)
}

/// A common eigenvector of commuting `F_p` matrices, with its eigenvalues.
///
/// Built by intersecting eigenspaces one matrix at a time; at each step the
/// smallest eigenvalue (as a residue) with a nonzero intersection is taken,
/// and the vector is the first column of a deterministic kernel basis, scaled
/// so its first nonzero coordinate is 1.
pub fn simultaneous_eigenvector(reduced: &[FpMat]) -> Result<(Vec<u64>, Vec<u64>), MatrixError> {
    assert!(!reduced.is_empty());
    let p = reduced[0].p;
    let n = reduced[0].rows;
    let mut w = FpMat::identity(p, n);
    let mut eigenvalues = Vec::with_capacity(reduced.len());
    for (i, m) in reduced.iter().enumerate() {
        let mut found = false;
        for mu in 0..p {
            let restricted = m.sub_scalar_diag(mu).mul(&w);
            let kernel = restricted.kernel_basis();
            if kernel.cols > 0 {
                w = w.mul(&kernel);
                eigenvalues.push(mu);
                found = true;
                break;
            }
        }
        if !found {
            return Err(MatrixError::NotSplit { p, index: i });
        }
    }
    let mut v = w.column(0);
    normalize_leading(&mut v, p);
    Ok((v, eigenvalues))
}

fn normalize_leading(v: &mut [u64], p: u64) {
    if let Some(&lead) = v.iter().find(|&&x| x != 0) {
        let s = exact_arith::inv_mod_u64(lead, p).expect("nonzero mod prime");
        for x in v.iter_mut() {
            *x = exact_arith::mul_mod_u64(*x, s, p);
        }
    }
}

/// A certificate that a commuting family over `F_p` has been simultaneously
/// upper-triangularized.
#[derive(Clone, Debug)]
pub struct TriangularizationCert {
    pub prime: u64,
    /// Columns are the new basis vectors.
    pub basis: FpMat,
    pub triangular_forms: Vec<FpMat>,
    /// Diagonal of the first triangular form, in prescribed order.
    pub diagonal_of_first: Vec<u64>,
}

impl TriangularizationCert {
    /// Re-check every certificate invariant against the reduced matrices.
    pub fn verify(&self, reduced: &[FpMat]) -> bool {
        let Some(basis_inv) = self.basis.inverse() else {
            return false;
        };
        if reduced.len() != self.triangular_forms.len() {
            return false;
        }
        for (m, t) in reduced.iter().zip(&self.triangular_forms) {
            if !t.is_upper_triangular() || basis_inv.mul(&m.mul(&self.basis)) != *t {
                return false;
            }
        }
        self.triangular_forms[0].diagonal() == self.diagonal_of_first
    }
}

/// Simultaneously upper-triangularize commuting `F_p` matrices, with the
/// diagonal of the first form prescribed by `order`.
///
/// Follows the recursive quotient construction: pick a common eigenvector
/// inside the `order[0]`-eigenspace of the first matrix, split it off, and
/// recurse on the induced maps of the quotient space.
pub fn simultaneous_triangularize(
    reduced: &[FpMat],
    order: &[u64],
) -> Result<TriangularizationCert, MatrixError> {
    assert!(!reduced.is_empty());
    let p = reduced[0].p;
    let n = reduced[0].rows;
    let mut expected = reduced[0]
        .split_eigenvalues()
        .ok_or(MatrixError::NotSplit { p, index: 0 })?;
    let mut claimed: Vec<u64> = order.to_vec();
    claimed.sort_unstable();
    expected.sort_unstable();
    if claimed != expected || order.len() != n {
        return Err(MatrixError::BadOrder);
    }
    let basis = triangularize_rec(reduced.to_vec(), order)?;
    let basis_inv = basis.inverse().expect("basis built from invertible steps");
    let triangular_forms: Vec<FpMat> = reduced
        .iter()
        .map(|m| basis_inv.mul(&m.mul(&basis)))
        .collect();
    let cert = TriangularizationCert {
        prime: p,
        basis,
        triangular_forms,
        diagonal_of_first: order.to_vec(),
    };
    debug_assert!(cert.verify(reduced));
    Ok(cert)
}

fn triangularize_rec(mats: Vec<FpMat>, order: &[u64]) -> Result<FpMat, MatrixError> {
    let p = mats[0].p;
    let n = mats[0].rows;
    if n == 1 {
        return Ok(FpMat::identity(p, 1));
    }
    // Common eigenvector with first-matrix eigenvalue order[0].
    let mut w = mats[0].sub_scalar_diag(order[0]).kernel_basis();
    if w.cols == 0 {
        return Err(MatrixError::BadOrder);
    }
    for (i, m) in mats.iter().enumerate().skip(1) {
        let mut found = false;
        for mu in 0..p {
            let kernel = m.sub_scalar_diag(mu).mul(&w).kernel_basis();
            if kernel.cols > 0 {
                w = w.mul(&kernel);
                found = true;
                break;
            }
        }
        if !found {
            return Err(MatrixError::NotSplit { p, index: i });
        }
    }
    let mut v = w.column(0);
    normalize_leading(&mut v, p);

    // Extend v to a basis by standard basis vectors, greedily keeping rank.
    let mut cols = vec![v];
    for j in 0..n {
        if cols.len() == n {
            break;
        }
        let mut e = vec![0u64; n];
        e[j] = 1;
        let mut candidate = cols.clone();
        candidate.push(e);
        let trial = FpMat::from_columns(p, n, &candidate);
        if trial.rank() == candidate.len() {
            cols = candidate;
        }
    }
    let p_mat = FpMat::from_columns(p, n, &cols);
    let p_inv = p_mat.inverse().expect("completed to a basis");

    // Conjugate and split off the first coordinate.
    let subs: Vec<FpMat> = mats
        .iter()
        .map(|m| {
            let conj = p_inv.mul(&m.mul(&p_mat));
            let mut sub = FpMat::zero(p, n - 1, n - 1);
            for i in 1..n {
                for j in 1..n {
                    sub.set(i - 1, j - 1, conj.get(i, j));
                }
            }
            sub
        })
        .collect();
    let sub_basis = triangularize_rec(subs, &order[1..])?;

    // Lift: full change of basis is P · blockdiag(1, sub_basis).
    let mut block = FpMat::identity(p, n);
    for i in 1..n {
        for j in 1..n {
            block.set(i, j, sub_basis.get(i - 1, j - 1));
        }
    }
    Ok(p_mat.mul(&block))
}

/// Policy for the exponents `r_i` (`i ≥ 2`) of the quotient `Z_p ⋊ ⊕Z_{r_i}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RPolicy {
    /// `r_i = p - 1`, which always annihilates the induced scalar.
    #[default]
    PMinusOne,
    /// `r_i = ord_p(λ_i)`, the exact order; gives smaller quotients.
    ExactOrder,
}

/// The data of an index-`p` subgroup `H_p ≤ K`: an invariant hyperplane in
/// `K/pK` together with the scalar action induced on the quotient line.
#[derive(Clone, Debug)]
pub struct IndexPSubgroup {
    pub prime: u64,
    /// Eigenvalue of the first matrix with the largest multiplicative order
    /// (smallest residue on ties); the induced scalar on `K/H_p`.
    pub lambda: u64,
    /// Basis of the invariant hyperplane, `n-1` vectors over `F_p`.
    pub hyperplane_basis: Vec<Vec<u64>>,
    /// `r_1 = ord_p(λ)`, then the chosen exponents for the other matrices.
    pub r: Vec<u64>,
    /// Scalars by which each matrix acts on the quotient line `K/H_p`.
    pub scalars: Vec<u64>,
    /// The underlying triangularization.
    pub cert: TriangularizationCert,
}

/// Construct the index-`p` subgroup data for `p ∉ D`: select the eigenvalue
/// `λ` of the first reduced matrix with the largest multiplicative order,
/// triangularize with `λ` last on the diagonal, and read the hyperplane and
/// induced scalars off the certificate.
pub fn index_p_subgroup(
    fam: &CommutingFamily,
    p: u64,
    policy: RPolicy,
) -> Result<IndexPSubgroup, MatrixError> {
    let reduced = reduce_k_mod_p(fam, p)?;
    let n = fam.dim();
    for (i, m) in reduced.iter().enumerate() {
        let ok = m
            .split_eigenvalues()
            .is_some_and(|roots| roots.iter().all(|&a| a != 0));
        if !ok {
            return Err(MatrixError::NotSplit { p, index: i });
        }
    }
    let mut roots = reduced[0].split_eigenvalues().expect("checked above");
    roots.sort_unstable();
    let lambda = *roots
        .iter()
        .max_by_key(|&&a| (multiplicative_order_u64(a, p).expect("nonzero root"), std::cmp::Reverse(a)))
        .expect("degree >= 1");
    // λ goes last on the diagonal so that the invariant hyperplane is spanned
    // by the first n-1 basis vectors and M_1 acts on the quotient line by λ.
    let pos = roots.iter().position(|&a| a == lambda).unwrap();
    roots.remove(pos);
    roots.push(lambda);
    let cert = simultaneous_triangularize(&reduced, &roots)?;
    let hyperplane_basis = cert.basis.columns(0..n - 1);
    let scalars: Vec<u64> = cert
        .triangular_forms
        .iter()
        .map(|t| t.get(n - 1, n - 1))
        .collect();
    debug_assert_eq!(scalars[0], lambda);
    let mut r = Vec::with_capacity(scalars.len());
    r.push(multiplicative_order_u64(lambda, p)?);
    for &s in &scalars[1..] {
        r.push(match policy {
            RPolicy::PMinusOne => p - 1,
            RPolicy::ExactOrder => multiplicative_order_u64(s, p)?,
        });
    }
    Ok(IndexPSubgroup { prime: p, lambda, hyperplane_basis, r, scalars, cert })
}

/// If every `χ(M_i) = (x-1)^n`, the smallest `c` such that all products of
/// `c` factors drawn from `{M_i - I}` vanish (at most `n`); otherwise `None`.
pub fn nilpotency_class_bound(fam: &CommutingFamily) -> Option<usize> {
    let n = fam.dim();
    let unipotent = {
        let mut pow = MonicPoly::linear(Rational::one());
        for _ in 1..n {
            pow = pow.multiply(&MonicPoly::linear(Rational::one()));
        }
        pow
    };
    if fam.matrices.iter().any(|m| m.char_poly() != unipotent) {
        return None;
    }
    let deltas: Vec<QMatrix> = fam
        .matrices
        .iter()
        .map(|m| m.sub(&QMatrix::identity(n)))
        .collect();
    let mut products = vec![QMatrix::identity(n)];
    for c in 1..=n {
        let mut next = Vec::with_capacity(products.len() * deltas.len());
        for prod in &products {
            for d in &deltas {
                next.push(d.mul(prod));
            }
        }
        if next.iter().all(QMatrix::is_zero) {
            return Some(c);
        }
        products = next;
    }
    // Commuting matrices with all eigenvalues 0 multiply to zero in n steps.
    unreachable!("products of n commuting nilpotent factors must vanish");
}

/// True iff all eigenvalues of every `M_i` are roots of unity, i.e. the group
/// `K(M_1, ..., M_m) ⋊ Z^m` is virtually nilpotent. `false` means the
/// flatness harness can hunt for violating quotient sequences.
pub fn virtual_nilpotency_decision(fam: &CommutingFamily) -> bool {
    fam.matrices
        .iter()
        .all(|m| m.char_poly().all_roots_roots_of_unity())
}

#[derive(Deserialize)]
struct FamilyFile {
    n: usize,
    matrices: Vec<Vec<Vec<String>>>,
}

/// Parse a matrix-family file: `{"n": 2, "matrices": [[["0","-1"],["1","4/3"]]]}`.
pub fn family_from_json(text: &str) -> Result<CommutingFamily, MatrixError> {
    let file: FamilyFile =
        serde_json::from_str(text).map_err(|e| MatrixError::BadFile(e.to_string()))?;
    let mut matrices = Vec::with_capacity(file.matrices.len());
    for (i, rows) in file.matrices.iter().enumerate() {
        let m = QMatrix::from_str_rows(rows, i)?;
        if m.dim() != file.n {
            return Err(MatrixError::DimensionMismatch {
                index: i,
                expected: file.n,
                found: m.dim(),
                found2: m.dim(),
            });
        }
        matrices.push(m);
    }
    validate_family(matrices)
}
