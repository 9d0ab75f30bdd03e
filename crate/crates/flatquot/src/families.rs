//! Constructors for the explicit finite quotient families, each yielding
//! [`QuotientRecord`]s: the row type consumed by the flatness harness.
//!
//! * `bs_quotient(k, n)` — the Baumslag-Solitar quotients
//!   `Z_m ⋊_k Z_n` with `m = k^n - 1`, index `n(k^n - 1)` and analytic
//!   diameter bound `(2n+1)n + n`.
//! * `wreath_quotient(p, n)` — the periodised wreath quotients
//!   `(Z_p)^n ⋊ Z_n` (cyclic shift), order `p^n · n`, bound `2pn²`.
//! * `matrix_family_quotient(fam, p)` — the quotients `Z_p ⋊ ⊕Z_{r_i}` cut
//!   out of `K(M_1,...,M_m) ⋊ Z^m` by an index-`p` subgroup.
//! * `bpq_quotient(p, q, m)` — the conjectural `B_{p,q}` quotients, gated by
//!   an explicit validity check and marked experimental.
//! * `cyclic_quotient(m)` — plain cyclic groups, the positive control.

use crate::exact_arith::{gcd_u64, inv_mod_u64, is_prime_u64, pow_mod_u64};
use crate::finite_groups::{diameter_bfs, FiniteMetabelian, GeneratingSet, GroupError};
use crate::matrices::{index_p_subgroup, CommutingFamily, MatrixError, RPolicy};
use crate::polynomials::{splitting_primes, PolyError};
use num_bigint::BigInt;
use num_traits::Signed;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("ord_{m}({k}) = {actual}, expected {expected}")]
    OrderMismatch { k: u64, m: u64, expected: u64, actual: u64 },
    #[error("B_pq validity check failed: s = {s}, n = {n}, s^n ≡ {residue} (mod {m}) ≠ 1")]
    InvalidConstruction { s: u64, n: u64, m: u64, residue: u64 },
    #[error("index {0} overflows the supported range")]
    IndexTooLarge(BigInt),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Whether the diameter column of a record is exact or only the analytic bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiamMode {
    Exact,
    BoundOnly,
}

impl std::fmt::Display for DiamMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DiamMode::Exact => write!(f, "exact"),
            DiamMode::BoundOnly => write!(f, "bound-only"),
        }
    }
}

/// One finite quotient: its group, generator images, index, the analytic
/// diameter bound, and (when computed) the exact BFS diameter.
#[derive(Clone, Debug)]
pub struct QuotientRecord {
    pub family_id: String,
    pub parameter: u64,
    pub index: u64,
    pub group: FiniteMetabelian,
    pub generator_images: GeneratingSet,
    pub diam_bound: u64,
    pub diam_exact: Option<u64>,
    pub mode: DiamMode,
    /// Set for constructions the source presents as conjectural.
    pub experimental: bool,
}

impl QuotientRecord {
    fn new(
        family_id: String,
        parameter: u64,
        group: FiniteMetabelian,
        generator_images: GeneratingSet,
        diam_bound: u64,
        experimental: bool,
    ) -> Result<Self, FamilyError> {
        let order = group.order();
        let index =
            u64::try_from(order).map_err(|_| FamilyError::IndexTooLarge(BigInt::from(order)))?;
        Ok(QuotientRecord {
            family_id,
            parameter,
            index,
            group,
            generator_images,
            diam_bound,
            diam_exact: None,
            mode: DiamMode::BoundOnly,
            experimental,
        })
    }

    /// The diameter estimate used by the harness: exact when available. An
    /// upper bound is sound for certifying a flatness violation.
    pub fn diameter_estimate(&self) -> u64 {
        self.diam_exact.unwrap_or(self.diam_bound)
    }

    /// Run the BFS oracle when the index fits under the ceiling; otherwise
    /// stay in bound-only mode.
    pub fn fill_diameter(&mut self, bfs_ceiling: u64) -> Result<(), FamilyError> {
        if self.index > bfs_ceiling {
            self.mode = DiamMode::BoundOnly;
            return Ok(());
        }
        let d = diameter_bfs(&self.group, &self.generator_images, bfs_ceiling)?;
        self.diam_exact = Some(d);
        self.mode = DiamMode::Exact;
        Ok(())
    }
}

/// The quotient `Z_m ⋊_k Z_n` of `BS(1,k)` with `m = k^n - 1`, generator
/// images of `S = {(±1,0), (0,t^{±1})}`, and the digit-walk diameter bound
/// `(2n+1)n + n`.
pub fn bs_quotient(k: u64, n: u64) -> Result<QuotientRecord, FamilyError> {
    if k < 2 || n < 1 {
        return Err(FamilyError::Degenerate(format!(
            "need k ≥ 2 and n ≥ 1, got k={k}, n={n}"
        )));
    }
    let m_big = BigInt::from(k).pow(n as u32) - 1i32;
    let m: u64 = m_big
        .clone()
        .try_into()
        .map_err(|_| FamilyError::IndexTooLarge(m_big))?;
    if m <= 1 {
        return Err(FamilyError::Degenerate(format!("k^n - 1 = {m} (k={k}, n={n})")));
    }
    // ord_m(k) = n always holds for m = k^n - 1; checked anyway.
    let ord = crate::exact_arith::multiplicative_order_u64(k % m, m)
        .map_err(|e| FamilyError::Degenerate(e.to_string()))?;
    if ord != n {
        return Err(FamilyError::OrderMismatch { k, m, expected: n, actual: ord });
    }
    let group = FiniteMetabelian::new(vec![m], vec![n], vec![vec![vec![(k % m) as i64]]])?;
    let gens = GeneratingSet::new(vec![group.element(&[1], &[0])?, group.element(&[0], &[1])?])
        .symmetrized(&group);
    let bound = (2 * n + 1) * n + n;
    QuotientRecord::new(format!("bs(k={k})"), n, group, gens, bound, false)
}

/// The `n`-periodised wreath quotient `(Z_p)^n ⋊ Z_n` with the cyclic-shift
/// action, generators `{(σ,0), (0,1)}` for `σ = (1,0,...,0)`, order `p^n · n`
/// and diameter bound `2pn²`.
pub fn wreath_quotient(p: u64, n: u64) -> Result<QuotientRecord, FamilyError> {
    if !is_prime_u64(p) {
        return Err(FamilyError::Degenerate(format!("{p} is not prime")));
    }
    if n < 2 {
        return Err(FamilyError::Degenerate(format!("need n ≥ 2, got {n}")));
    }
    let dim = n as usize;
    let mut shift = vec![vec![0i64; dim]; dim];
    for (j, row) in shift.iter_mut().enumerate() {
        row[(j + dim - 1) % dim] = 1;
    }
    let group = FiniteMetabelian::new(vec![p; dim], vec![n], vec![shift])?;
    let mut sigma = vec![0i64; dim];
    sigma[0] = 1;
    let gens = GeneratingSet::new(vec![
        group.element(&sigma, &[0])?,
        group.element(&vec![0i64; dim], &[1])?,
    ])
    .symmetrized(&group);
    let bound = 2 * p * n * n;
    QuotientRecord::new(format!("wreath(p={p})"), n, group, gens, bound, false)
}

/// The quotient `Γ_p = Z_p ⋊ ⊕Z_{r_i}` of `K(M_1,...,M_m) ⋊ Z^m` cut out by
/// the index-`p` subgroup: generator `t_i` acts by the scalar induced on the
/// quotient line, the standard basis vectors of `K` map to their last
/// coordinate in the triangularizing basis, and the index is `p · ∏ r_i`.
pub fn matrix_family_quotient(
    fam: &CommutingFamily,
    p: u64,
    policy: RPolicy,
) -> Result<QuotientRecord, FamilyError> {
    let sub = index_p_subgroup(fam, p, policy)?;
    let n = fam.dim();
    let action: Vec<Vec<Vec<i64>>> =
        sub.scalars.iter().map(|&s| vec![vec![s as i64]]).collect();
    let group = FiniteMetabelian::new(vec![p], sub.r.clone(), action)?;
    // Image of e_j in K/H_p: its v_n-coordinate in the triangularizing basis,
    // i.e. the j-th entry of the last row of basis^{-1}.
    let basis_inv = sub.cert.basis.inverse().expect("certificate basis is invertible");
    let m_gens = sub.r.len();
    let mut elements = Vec::with_capacity(n + m_gens);
    for j in 0..n {
        let coord = basis_inv.get(n - 1, j);
        elements.push(group.element(&[coord as i64], &vec![0i64; m_gens])?);
    }
    for i in 0..m_gens {
        let mut b = vec![0i64; m_gens];
        b[i] = 1;
        elements.push(group.element(&[0], &b)?);
    }
    let gens = GeneratingSet::new(elements).symmetrized(&group);
    let mut index_big = BigInt::from(p);
    for &r in &sub.r {
        index_big *= r;
    }
    // The only analytic bound available here is the trivial diam ≤ [G : H_p].
    let bound: u64 = index_big
        .clone()
        .try_into()
        .map_err(|_| FamilyError::IndexTooLarge(index_big))?;
    QuotientRecord::new("matrix".to_string(), p, group, gens, bound, false)
}

/// Splitting primes usable for [`matrix_family_quotient`]: every `χ(M_i)`
/// splits with no zero roots, skipping the support `D`.
pub fn matrix_family_primes(
    fam: &CommutingFamily,
    count: usize,
    ceiling: u64,
) -> Result<Vec<u64>, FamilyError> {
    let polys: Vec<_> = fam.matrices().iter().map(|m| m.char_poly()).collect();
    Ok(splitting_primes(&polys, count, fam.d_support(), ceiling)?)
}

/// The conjectural `B_{p,q}` quotient `Z_m ⋊_s Z_n` with `s = p·q^{-1} mod m`
/// and `n = |p^m - q^m|`.
///
/// The construction is only believed to work; the validity gate checks
/// `s^n ≡ 1 (mod m)` and reports failures as a structured error rather than
/// producing a wrong group. Valid records are marked experimental.
pub fn bpq_quotient(p: u64, q: u64, m: u64) -> Result<QuotientRecord, FamilyError> {
    if p == q || !is_prime_u64(p) || !is_prime_u64(q) {
        return Err(FamilyError::Degenerate(format!("need distinct primes, got {p}, {q}")));
    }
    if m < 2 || gcd_u64(m, p * q) != 1 {
        return Err(FamilyError::Degenerate(format!("need m ≥ 2 coprime to pq, got m={m}")));
    }
    let q_inv = inv_mod_u64(q % m, m).expect("q coprime to m");
    let s = crate::exact_arith::mul_mod_u64(p % m, q_inv, m);
    let n_big = (BigInt::from(p).pow(m as u32) - BigInt::from(q).pow(m as u32)).abs();
    let n: u64 = n_big
        .clone()
        .try_into()
        .map_err(|_| FamilyError::IndexTooLarge(n_big))?;
    let residue = pow_mod_u64(s, n, m);
    if residue != 1 {
        return Err(FamilyError::InvalidConstruction { s, n, m, residue });
    }
    let group = FiniteMetabelian::new(vec![m], vec![n], vec![vec![vec![s as i64]]])?;
    let gens = GeneratingSet::new(vec![group.element(&[1], &[0])?, group.element(&[0], &[1])?])
        .symmetrized(&group);
    let index = m
        .checked_mul(n)
        .ok_or_else(|| FamilyError::IndexTooLarge(BigInt::from(m) * BigInt::from(n)))?;
    QuotientRecord::new(format!("bpq(p={p},q={q})"), m, group, gens, index, true)
}

/// Plain cyclic `Z_m` with `S = {±1}`: the positive control whose diameter
/// `⌊m/2⌋` genuinely grows like the index.
pub fn cyclic_quotient(m: u64) -> Result<QuotientRecord, FamilyError> {
    if m < 2 {
        return Err(FamilyError::Degenerate(format!("need m ≥ 2, got {m}")));
    }
    let group = FiniteMetabelian::new(vec![m], vec![], vec![])?;
    let gens = GeneratingSet::new(vec![group.element(&[1], &[])?]).symmetrized(&group);
    QuotientRecord::new("cyclic".to_string(), m, group, gens, m, false)
}

/// Which family a series draws from.
#[derive(Clone, Debug)]
pub enum FamilySpec {
    Bs { k: u64 },
    Wreath { p: u64 },
    Bpq { p: u64, q: u64 },
    MatrixFamily { fam: CommutingFamily, policy: RPolicy },
    Cyclic,
}

impl FamilySpec {
    fn build(&self, param: u64) -> Result<QuotientRecord, FamilyError> {
        match self {
            FamilySpec::Bs { k } => bs_quotient(*k, param),
            FamilySpec::Wreath { p } => wreath_quotient(*p, param),
            FamilySpec::Bpq { p, q } => bpq_quotient(*p, *q, param),
            FamilySpec::MatrixFamily { fam, policy } => matrix_family_quotient(fam, param, *policy),
            FamilySpec::Cyclic => cyclic_quotient(param),
        }
    }
}

/// Build a record per parameter, filling exact diameters by BFS whenever the
/// index fits under `bfs_ceiling`. Construction errors are reported
/// per-record without aborting the series.
pub fn family_series(
    spec: &FamilySpec,
    params: &[u64],
    bfs_ceiling: u64,
) -> Vec<(u64, Result<QuotientRecord, FamilyError>)> {
    params
        .iter()
        .map(|&param| {
            let record = spec.build(param).and_then(|mut r| {
                r.fill_diameter(bfs_ceiling)?;
                Ok(r)
            });
            (param, record)
        })
        .collect()
}

/// Multiplication-table equality under the canonical relabeling: both groups
/// enumerate their elements in the same mixed-radix order, so equal moduli
/// plus identical tables mean the same group. Comparison is capped at 2^16
/// elements; larger inputs compare as unequal.
pub fn same_multiplication_table(a: &FiniteMetabelian, b: &FiniteMetabelian) -> bool {
    if a.a_moduli() != b.a_moduli() || a.b_moduli() != b.b_moduli() {
        return false;
    }
    let order = a.order();
    if order != b.order() || order > (1 << 16) {
        return false;
    }
    let order = order as u64;
    for i in 0..order {
        for j in 0..order {
            let x = a.multiply(&a.decode(i), &a.decode(j));
            let y = b.multiply(&b.decode(i), &b.decode(j));
            if a.encode(&x) != b.encode(&y) {
                return false;
            }
        }
    }
    true
}
