//! Concrete finite metabelian groups `A ⋊ B` with `A` a product of cyclic
//! groups, `B` a direct sum of cyclic groups acting through commuting integer
//! matrices: element arithmetic, exact BFS diameter, subgroup enumeration at
//! small scale, lower central series, and the conjugate-generation machinery.
//!
//! The multiplication follows the semidirect-product convention
//! `(a1, b1)·(a2, b2) = (a1 + b1·a2, b1 + b2)`, written additively.

pub mod small_group;

use crate::exact_arith::{factor_u64, is_prime_u64, multiplicative_order_u64};
use serde::Deserialize;
use small_group::SmallGroup;

pub const DEFAULT_BFS_CEILING: u64 = 2_000_000;
pub const DEFAULT_ENUM_CEILING: u64 = 2_000;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("invalid group data: {0}")]
    BadAction(String),
    #[error("group of order {order} exceeds the ceiling {ceiling}")]
    TooLarge { order: u128, ceiling: u64 },
    #[error("generating set does not generate the group (reached {reached} of {order} elements)")]
    NotGenerating { reached: u64, order: u64 },
    #[error("group is not abelian")]
    NotAbelian,
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("R does not normally generate A")]
    NotNormallyGenerating,
    #[error("element out of range: {0}")]
    BadElement(String),
    #[error("generic and formula lower central series disagree at term {0}")]
    FormulaMismatch(usize),
    #[error("malformed group file: {0}")]
    BadFile(String),
}

/// An element `(a, b)` of `A ⋊ B`, residues within the moduli.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Element {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
}

impl std::fmt::Display for Element {
    /// Prints as `([a1,...],[b1,...])`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let join = |v: &[u64]| {
            v.iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "([{}],[{}])", join(&self.a), join(&self.b))
    }
}

/// A finite group `A ⋊ B` where `A = Z_{m_1} × ... × Z_{m_a}`,
/// `B = Z_{r_1} ⊕ ... ⊕ Z_{r_b}`, and the `i`-th `B`-generator acts on `A`
/// through an integer matrix (row `j` reduced mod `m_j`).
///
/// Construction validates that each matrix defines an endomorphism of `A`,
/// that the matrices pairwise commute, and that the `i`-th matrix raised to
/// `r_i` is the identity map (which also makes it invertible).
#[derive(Clone, Debug)]
pub struct FiniteMetabelian {
    a_moduli: Vec<u64>,
    b_moduli: Vec<u64>,
    action: Vec<Vec<Vec<u64>>>,
}

#[derive(Deserialize)]
struct GroupFile {
    a_moduli: Vec<u64>,
    b_moduli: Vec<u64>,
    action: Vec<Vec<Vec<i64>>>,
}

impl FiniteMetabelian {
    pub fn new(
        a_moduli: Vec<u64>,
        b_moduli: Vec<u64>,
        action: Vec<Vec<Vec<i64>>>,
    ) -> Result<Self, GroupError> {
        if a_moduli.is_empty() || a_moduli.contains(&0) {
            return Err(GroupError::BadAction("a_moduli must be nonempty and positive".into()));
        }
        if b_moduli.contains(&0) {
            return Err(GroupError::BadAction("b_moduli must be positive".into()));
        }
        if action.len() != b_moduli.len() {
            return Err(GroupError::BadAction(format!(
                "{} action matrices for {} B-generators",
                action.len(),
                b_moduli.len()
            )));
        }
        let dim = a_moduli.len();
        let mut reduced: Vec<Vec<Vec<u64>>> = Vec::with_capacity(action.len());
        for (i, m) in action.iter().enumerate() {
            if m.len() != dim || m.iter().any(|row| row.len() != dim) {
                return Err(GroupError::BadAction(format!("action matrix {i} is not {dim}x{dim}")));
            }
            let mut rows = Vec::with_capacity(dim);
            for (j, row) in m.iter().enumerate() {
                let mj = a_moduli[j] as i128;
                let mut out = Vec::with_capacity(dim);
                for (l, &e) in row.iter().enumerate() {
                    let r = (e as i128).rem_euclid(mj) as u64;
                    // Endomorphism condition: m_j | e · m_l.
                    if !(r as u128 * a_moduli[l] as u128).is_multiple_of(a_moduli[j] as u128) {
                        return Err(GroupError::BadAction(format!(
                            "entry ({j},{l}) of action matrix {i} does not define a homomorphism"
                        )));
                    }
                    out.push(r);
                }
                rows.push(out);
            }
            reduced.push(rows);
        }
        let g = FiniteMetabelian { a_moduli, b_moduli, action: reduced };
        for i in 0..g.action.len() {
            for j in i + 1..g.action.len() {
                if g.mat_mul(&g.action[i], &g.action[j]) != g.mat_mul(&g.action[j], &g.action[i]) {
                    return Err(GroupError::BadAction(format!(
                        "action matrices {i} and {j} do not commute"
                    )));
                }
            }
        }
        for (i, m) in g.action.iter().enumerate() {
            if g.mat_pow(m, g.b_moduli[i]) != g.mat_identity() {
                return Err(GroupError::BadAction(format!(
                    "action matrix {i} to the power r_{i} = {} is not the identity",
                    g.b_moduli[i]
                )));
            }
        }
        Ok(g)
    }

    /// Parse `{"a_moduli": [...], "b_moduli": [...], "action": [matrix, ...]}`.
    pub fn from_json(text: &str) -> Result<Self, GroupError> {
        let file: GroupFile =
            serde_json::from_str(text).map_err(|e| GroupError::BadFile(e.to_string()))?;
        Self::new(file.a_moduli, file.b_moduli, file.action)
    }

    pub fn a_moduli(&self) -> &[u64] {
        &self.a_moduli
    }

    pub fn b_moduli(&self) -> &[u64] {
        &self.b_moduli
    }

    pub fn action(&self) -> &[Vec<Vec<u64>>] {
        &self.action
    }

    pub fn order(&self) -> u128 {
        let a: u128 = self.a_moduli.iter().map(|&m| m as u128).product();
        let b: u128 = self.b_moduli.iter().map(|&r| r as u128).product();
        a * b
    }

    pub fn a_order(&self) -> u128 {
        self.a_moduli.iter().map(|&m| m as u128).product()
    }

    pub fn identity(&self) -> Element {
        Element { a: vec![0; self.a_moduli.len()], b: vec![0; self.b_moduli.len()] }
    }

    /// Build an element, reducing the residues into range.
    pub fn element(&self, a: &[i64], b: &[i64]) -> Result<Element, GroupError> {
        if a.len() != self.a_moduli.len() || b.len() != self.b_moduli.len() {
            return Err(GroupError::BadElement(format!(
                "expected {} + {} coordinates",
                self.a_moduli.len(),
                self.b_moduli.len()
            )));
        }
        let a = a
            .iter()
            .zip(&self.a_moduli)
            .map(|(&x, &m)| (x as i128).rem_euclid(m as i128) as u64)
            .collect();
        let b = b
            .iter()
            .zip(&self.b_moduli)
            .map(|(&x, &r)| (x as i128).rem_euclid(r as i128) as u64)
            .collect();
        Ok(Element { a, b })
    }

    fn mat_identity(&self) -> Vec<Vec<u64>> {
        let n = self.a_moduli.len();
        (0..n)
            .map(|i| (0..n).map(|j| u64::from(i == j && self.a_moduli[i] > 1)).collect())
            .collect()
    }

    /// Composite of two action matrices, row `j` reduced mod `m_j`.
    fn mat_mul(&self, x: &[Vec<u64>], y: &[Vec<u64>]) -> Vec<Vec<u64>> {
        let n = self.a_moduli.len();
        (0..n)
            .map(|j| {
                let mj = self.a_moduli[j] as u128;
                (0..n)
                    .map(|k| {
                        let mut acc = 0u128;
                        for l in 0..n {
                            acc = (acc + x[j][l] as u128 * y[l][k] as u128) % mj;
                        }
                        acc as u64
                    })
                    .collect()
            })
            .collect()
    }

    fn mat_pow(&self, m: &[Vec<u64>], mut e: u64) -> Vec<Vec<u64>> {
        let mut acc = self.mat_identity();
        let mut base = m.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mat_mul(&acc, &base);
            }
            base = self.mat_mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn mat_apply(&self, m: &[Vec<u64>], v: &[u64]) -> Vec<u64> {
        (0..v.len())
            .map(|j| {
                let mj = self.a_moduli[j] as u128;
                let mut acc = 0u128;
                for (l, &vl) in v.iter().enumerate() {
                    acc = (acc + m[j][l] as u128 * vl as u128) % mj;
                }
                acc as u64
            })
            .collect()
    }

    /// The composite action of the `B`-tuple `b` on an `A`-vector.
    pub fn apply_b(&self, b: &[u64], v: &[u64]) -> Vec<u64> {
        let mut out = v.to_vec();
        for (i, &e) in b.iter().enumerate() {
            out = self.mat_apply(&self.mat_pow(&self.action[i], e), &out);
        }
        out
    }

    /// Semidirect product law `(a1, b1)·(a2, b2) = (a1 + b1·a2, b1 + b2)`.
    pub fn multiply(&self, g: &Element, h: &Element) -> Element {
        let moved = self.apply_b(&g.b, &h.a);
        let a = g
            .a
            .iter()
            .zip(&moved)
            .zip(&self.a_moduli)
            .map(|((&x, &y), &m)| {
                let s = x as u128 + y as u128;
                (s % m as u128) as u64
            })
            .collect();
        let b = g
            .b
            .iter()
            .zip(&h.b)
            .zip(&self.b_moduli)
            .map(|((&x, &y), &r)| ((x as u128 + y as u128) % r as u128) as u64)
            .collect();
        Element { a, b }
    }

    pub fn invert(&self, g: &Element) -> Element {
        let b: Vec<u64> = g
            .b
            .iter()
            .zip(&self.b_moduli)
            .map(|(&x, &r)| (r - x % r) % r)
            .collect();
        let moved = self.apply_b(&b, &g.a);
        let a = moved
            .iter()
            .zip(&self.a_moduli)
            .map(|(&x, &m)| (m - x % m) % m)
            .collect();
        Element { a, b }
    }

    pub fn is_abelian(&self) -> bool {
        self.action.iter().all(|m| *m == self.mat_identity())
    }

    /// Exponent of the group when it is abelian: lcm of all moduli.
    pub fn abelian_exponent(&self) -> u64 {
        self.a_moduli
            .iter()
            .chain(&self.b_moduli)
            .fold(1u64, |acc, &m| {
                let g = crate::exact_arith::gcd_u64(acc, m);
                acc / g * m
            })
    }

    // Mixed-radix element <-> index codecs; the A part varies fastest.

    pub fn encode_a(&self, a: &[u64]) -> u64 {
        let mut idx = 0u64;
        for (x, m) in a.iter().zip(&self.a_moduli).rev() {
            idx = idx * m + x;
        }
        idx
    }

    pub fn decode_a(&self, mut idx: u64) -> Vec<u64> {
        self.a_moduli
            .iter()
            .map(|&m| {
                let x = idx % m;
                idx /= m;
                x
            })
            .collect()
    }

    pub fn encode_b(&self, b: &[u64]) -> u64 {
        let mut idx = 0u64;
        for (x, r) in b.iter().zip(&self.b_moduli).rev() {
            idx = idx * r + x;
        }
        idx
    }

    pub fn decode_b(&self, mut idx: u64) -> Vec<u64> {
        self.b_moduli
            .iter()
            .map(|&r| {
                let x = idx % r;
                idx /= r;
                x
            })
            .collect()
    }

    pub fn encode(&self, g: &Element) -> u64 {
        self.encode_a(&g.a) + self.a_order() as u64 * self.encode_b(&g.b)
    }

    pub fn decode(&self, idx: u64) -> Element {
        let a_order = self.a_order() as u64;
        Element { a: self.decode_a(idx % a_order), b: self.decode_b(idx / a_order) }
    }

    /// Expand into a multiplication table for lattice computations.
    pub fn to_small_group(&self, ceiling: u64) -> Result<SmallGroup, GroupError> {
        let order = self.order();
        if order > ceiling as u128 {
            return Err(GroupError::TooLarge { order, ceiling });
        }
        let n = order as usize;
        Ok(SmallGroup::from_mul_fn(n, 0, |i, j| {
            let g = self.decode(i as u64);
            let h = self.decode(j as u64);
            self.encode(&self.multiply(&g, &h)) as u32
        }))
    }
}

/// A finite generating set; `symmetric` records whether it has been closed
/// under inversion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingSet {
    pub elements: Vec<Element>,
    pub symmetric: bool,
}

impl GeneratingSet {
    pub fn new(elements: Vec<Element>) -> Self {
        GeneratingSet { elements, symmetric: false }
    }

    /// Close under inversion and drop duplicates, keeping first occurrences.
    pub fn symmetrized(&self, g: &FiniteMetabelian) -> GeneratingSet {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        let push = |e: Element, out: &mut Vec<Element>, seen: &mut std::collections::HashSet<u64>| {
            if seen.insert(g.encode(&e)) {
                out.push(e);
            }
        };
        for e in &self.elements {
            push(e.clone(), &mut out, &mut seen);
        }
        for e in &self.elements {
            push(g.invert(e), &mut out, &mut seen);
        }
        GeneratingSet { elements: out, symmetric: true }
    }

    /// Number of generators counted up to inversion (inverse pairs and
    /// involutions count once); the identity does not count.
    pub fn count_up_to_inverse(&self, g: &FiniteMetabelian) -> u64 {
        let mut seen = std::collections::HashSet::new();
        let mut count = 0u64;
        let id = g.encode(&g.identity());
        for e in &self.elements {
            let x = g.encode(e);
            if x == id || seen.contains(&x) {
                continue;
            }
            seen.insert(x);
            seen.insert(g.encode(&g.invert(e)));
            count += 1;
        }
        count
    }
}

struct BfsTables {
    a_order: u64,
    a_dims: usize,
    a_moduli: Vec<u64>,
    a_strides: Vec<u64>,
    /// Per generator, per B-index: displacement vector added to the A part.
    da: Vec<Vec<Vec<u64>>>,
    /// Per generator, per B-index: successor B-index.
    tb: Vec<Vec<u64>>,
}

impl BfsTables {
    fn build(g: &FiniteMetabelian, gens: &[Element]) -> BfsTables {
        let a_order = g.a_order() as u64;
        let b_order = (g.order() / g.a_order()) as u64;
        let mut a_strides = Vec::with_capacity(g.a_moduli.len());
        let mut s = 1u64;
        for &m in &g.a_moduli {
            a_strides.push(s);
            s *= m;
        }
        let mut da = Vec::with_capacity(gens.len());
        let mut tb = Vec::with_capacity(gens.len());
        for gen in gens {
            // Displacements beta · gen.a for every B-index beta, filled along
            // the mixed radix so each entry needs one matrix application.
            let mut disp: Vec<Vec<u64>> = Vec::with_capacity(b_order as usize);
            disp.push(gen.a.clone());
            let mut strides_b = Vec::new();
            let mut sb = 1u64;
            for &r in &g.b_moduli {
                strides_b.push(sb);
                sb *= r;
            }
            for beta in 1..b_order {
                let digits = g.decode_b(beta);
                let i = digits.iter().position(|&d| d != 0).expect("beta > 0");
                let prev = beta - strides_b[i];
                let v = g.mat_apply(&g.action[i], &disp[prev as usize]);
                disp.push(v);
            }
            let trans: Vec<u64> = (0..b_order)
                .map(|beta| {
                    let digits = g.decode_b(beta);
                    let next: Vec<u64> = digits
                        .iter()
                        .zip(&gen.b)
                        .zip(&g.b_moduli)
                        .map(|((&x, &y), &r)| (x + y) % r)
                        .collect();
                    g.encode_b(&next)
                })
                .collect();
            da.push(disp);
            tb.push(trans);
        }
        BfsTables {
            a_order,
            a_dims: g.a_moduli.len(),
            a_moduli: g.a_moduli.clone(),
            a_strides,
            da,
            tb,
        }
    }

    #[inline]
    fn step(&self, state: u64, gen: usize, scratch: &mut [u64]) -> u64 {
        let a_idx = state % self.a_order;
        let b_idx = state / self.a_order;
        let disp = &self.da[gen][b_idx as usize];
        let next_b = self.tb[gen][b_idx as usize];
        if self.a_dims == 1 {
            let a = (a_idx + disp[0]) % self.a_moduli[0];
            return a + self.a_order * next_b;
        }
        let mut idx = a_idx;
        let mut next_a = 0u64;
        for j in 0..self.a_dims {
            let m = self.a_moduli[j];
            scratch[j] = (idx % m + disp[j]) % m;
            idx /= m;
            next_a += scratch[j] * self.a_strides[j];
        }
        next_a + self.a_order * next_b
    }
}

fn resolve_symmetric(g: &FiniteMetabelian, s: &GeneratingSet) -> GeneratingSet {
    if s.symmetric {
        s.clone()
    } else {
        s.symmetrized(g)
    }
}

/// Exact diameter of the Cayley graph of `G` on the symmetric closure of `S`:
/// the eccentricity of the identity, by breadth-first search over a dense
/// bit-packed visited table.
pub fn diameter_bfs(
    g: &FiniteMetabelian,
    s: &GeneratingSet,
    ceiling: u64,
) -> Result<u64, GroupError> {
    let order = g.order();
    if order > ceiling as u128 || order > u32::MAX as u128 {
        return Err(GroupError::TooLarge { order, ceiling });
    }
    let order = order as u64;
    let sym = resolve_symmetric(g, s);
    let tables = BfsTables::build(g, &sym.elements);
    let mut visited = vec![0u64; order.div_ceil(64) as usize];
    let start = g.encode(&g.identity());
    visited[(start / 64) as usize] |= 1 << (start % 64);
    let mut frontier = vec![start as u32];
    let mut reached = 1u64;
    let mut depth = 0u64;
    let mut scratch = vec![0u64; tables.a_dims];
    let mut next = Vec::new();
    while !frontier.is_empty() {
        next.clear();
        for &state in &frontier {
            for gen in 0..sym.elements.len() {
                let t = tables.step(state as u64, gen, &mut scratch);
                let (w, bit) = ((t / 64) as usize, 1u64 << (t % 64));
                if visited[w] & bit == 0 {
                    visited[w] |= bit;
                    next.push(t as u32);
                    reached += 1;
                }
            }
        }
        if next.is_empty() {
            break;
        }
        depth += 1;
        std::mem::swap(&mut frontier, &mut next);
    }
    if reached < order {
        return Err(GroupError::NotGenerating { reached, order });
    }
    Ok(depth)
}

/// Word-metric distances from the identity for every element, indexed by
/// [`FiniteMetabelian::encode`].
pub fn bfs_distances(
    g: &FiniteMetabelian,
    s: &GeneratingSet,
    ceiling: u64,
) -> Result<Vec<u32>, GroupError> {
    let order = g.order();
    if order > ceiling as u128 || order > u32::MAX as u128 {
        return Err(GroupError::TooLarge { order, ceiling });
    }
    let order = order as u64;
    let sym = resolve_symmetric(g, s);
    let tables = BfsTables::build(g, &sym.elements);
    let mut dist = vec![u32::MAX; order as usize];
    let start = g.encode(&g.identity());
    dist[start as usize] = 0;
    let mut frontier = vec![start as u32];
    let mut depth = 0u32;
    let mut scratch = vec![0u64; tables.a_dims];
    let mut reached = 1u64;
    let mut next = Vec::new();
    while !frontier.is_empty() {
        next.clear();
        depth += 1;
        for &state in &frontier {
            for gen in 0..sym.elements.len() {
                let t = tables.step(state as u64, gen, &mut scratch);
                if dist[t as usize] == u32::MAX {
                    dist[t as usize] = depth;
                    next.push(t as u32);
                    reached += 1;
                }
            }
        }
        std::mem::swap(&mut frontier, &mut next);
    }
    if reached < order {
        return Err(GroupError::NotGenerating { reached, order });
    }
    Ok(dist)
}

/// `|S| · exponent(G)` for abelian `G`, with `|S|` counted up to inversion;
/// an upper bound for the diameter.
pub fn abelian_diameter_bound(g: &FiniteMetabelian, s: &GeneratingSet) -> Result<u64, GroupError> {
    if !g.is_abelian() {
        return Err(GroupError::NotAbelian);
    }
    Ok(s.count_up_to_inverse(g) * g.abelian_exponent())
}

/// The lower central series `G = G_1 ⊇ G_2 ⊇ ...` until stabilization, as
/// sorted element lists.
///
/// Each term is computed twice: generically (subgroup generated by
/// commutators `[x, g]`) and, because `A` and `B` are abelian, by the
/// iterated-commutator span `(M_h - I)·V` on the `A` side; the run fails if
/// the two ever disagree.
pub fn lower_central_series(
    g: &FiniteMetabelian,
    ceiling: u64,
) -> Result<Vec<Vec<Element>>, GroupError> {
    let small = g.to_small_group(ceiling)?;
    let all: Vec<u32> = (0..small.n as u32).collect();
    let generic = small.lower_central_series_of(&all);

    // Formula route: V_1 = A, V_{i+1} = span{(M_h - I)v : h ∈ B, v ∈ V_i}.
    let a_order = g.a_order() as u64;
    let b_order = (g.order() / g.a_order()) as u64;
    let mut formula: Vec<Vec<u64>> = Vec::new();
    let mut current: Vec<u64> = (0..a_order).collect();
    loop {
        let mut gens: Vec<Vec<u64>> = Vec::new();
        for beta in 0..b_order {
            let b = g.decode_b(beta);
            for &v_idx in &current {
                let v = g.decode_a(v_idx);
                let moved = g.apply_b(&b, &v);
                let delta: Vec<u64> = moved
                    .iter()
                    .zip(&v)
                    .zip(&g.a_moduli)
                    .map(|((&x, &y), &m)| (x + m - y) % m)
                    .collect();
                gens.push(delta);
            }
        }
        let next = additive_span(g, &gens);
        let stable = formula.last().is_some_and(|prev| *prev == next);
        let trivial = next.len() == 1;
        current = next.clone();
        formula.push(next);
        if stable || trivial {
            break;
        }
    }

    // The generic chain is [G, G_2, ...]; the formula chain starts at G_2.
    if generic.len() != formula.len() + 1 {
        return Err(GroupError::FormulaMismatch(formula.len().min(generic.len())));
    }
    for (i, v) in formula.iter().enumerate() {
        let lifted: Vec<u32> = v.iter().map(|&a_idx| a_idx as u32).collect();
        // A-elements encode below a_order with b = 0, so indices coincide.
        if lifted != generic[i + 1] {
            return Err(GroupError::FormulaMismatch(i + 2));
        }
    }
    Ok(generic
        .into_iter()
        .map(|set| set.into_iter().map(|i| g.decode(i as u64)).collect())
        .collect())
}

/// The additive subgroup of `A` generated by the given vectors, as a sorted
/// list of `A`-indices.
fn additive_span(g: &FiniteMetabelian, gens: &[Vec<u64>]) -> Vec<u64> {
    let a_order = g.a_order() as u64;
    let mut member = vec![false; a_order as usize];
    member[0] = true;
    let mut out = vec![0u64];
    let mut frontier = vec![vec![0u64; g.a_moduli.len()]];
    while let Some(v) = frontier.pop() {
        for gen in gens {
            let sum: Vec<u64> = v
                .iter()
                .zip(gen)
                .zip(&g.a_moduli)
                .map(|((&x, &y), &m)| (x + y) % m)
                .collect();
            let idx = g.encode_a(&sum);
            if !member[idx as usize] {
                member[idx as usize] = true;
                out.push(idx);
                frontier.push(sum);
            }
        }
    }
    out.sort_unstable();
    out
}

/// All normal subgroups, via the full subgroup lattice (join-closure of the
/// cyclic subgroups) filtered by conjugation-invariance.
pub fn normal_subgroups(
    g: &FiniteMetabelian,
    ceiling: u64,
) -> Result<Vec<Vec<Element>>, GroupError> {
    let small = g.to_small_group(ceiling)?;
    Ok(small
        .normal_subgroups()
        .into_iter()
        .map(|set| set.into_iter().map(|i| g.decode(i as u64)).collect())
        .collect())
}

/// Exhaustively verify, for `G = Z_p ⋊ ⊕Z_{r_i}` with the first generator
/// acting by `k` of order `r_1`: every normal subgroup `N` whose quotient
/// `G/N` contains a nilpotent subgroup of index < `r_1` contains `Z_p × {0}`.
pub fn verify_zp_lemma(g: &FiniteMetabelian, k: u64, ceiling: u64) -> Result<bool, GroupError> {
    if g.a_moduli.len() != 1 || !is_prime_u64(g.a_moduli[0]) {
        return Err(GroupError::BadParameters("A must be Z_p with p prime".into()));
    }
    let p = g.a_moduli[0];
    if g.b_moduli.is_empty() {
        return Err(GroupError::BadParameters("B must be nontrivial".into()));
    }
    for &r in &g.b_moduli {
        if !(p - 1).is_multiple_of(r) {
            return Err(GroupError::BadParameters(format!("r = {r} does not divide p-1")));
        }
    }
    if g.action[0][0][0] != k % p {
        return Err(GroupError::BadParameters("first generator does not act by k".into()));
    }
    let ord = multiplicative_order_u64(k % p, p)
        .map_err(|e| GroupError::BadParameters(e.to_string()))?;
    let r1 = g.b_moduli[0];
    if ord != r1 {
        return Err(GroupError::BadParameters(format!(
            "r_1 = {r1} but ord_{p}({k}) = {ord}"
        )));
    }
    let small = g.to_small_group(ceiling)?;
    let zp: Vec<u32> = (0..p as u32).collect(); // A-part indices encode first
    for n_sub in small.normal_subgroups() {
        let (q, _) = small.quotient(&n_sub);
        let has_small_nilpotent = q.all_subgroups().into_iter().any(|h| {
            (q.n / h.len()) < r1 as usize && q.is_nilpotent_subgroup(&h)
        });
        if has_small_nilpotent {
            let contains_zp = zp.iter().all(|x| n_sub.binary_search(x).is_ok());
            if !contains_zp {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The outcome of the conjugate-generation analysis of `R ⊆ A`.
#[derive(Clone, Debug)]
pub struct ConjugationProfile {
    /// Minimal exponents (greedy coordinate-wise, lexicographically smallest)
    /// such that the conjugates of `R` by `t`-words with `|k_i| ≤ l_i` span `A`.
    pub l: Vec<u64>,
    /// Sizes of the intermediate spans along `j = 0, 1, ...` (each `l_i`
    /// capped at its minimum), ending at `|A|`.
    pub chain: Vec<u64>,
    /// Exponent of `<R>`.
    pub exponent: u64,
    /// `(2l+1) · M · |R| · l^m` with `l = Σ l_i`: word-length bound for the
    /// spanned subgroup.
    pub word_length_bound: u64,
    /// Smallest prime divisor of `|A|`; the span chain forces `|A| ≥ p^{Σ l_i}`.
    pub min_prime: u64,
    /// True when every stabilization (two equal consecutive spans) observed
    /// over the full conjugator range is permanent.
    pub stabilization_verified: bool,
}

/// Compute the minimal conjugation exponents for `R` to normally generate
/// `A`, the chain of intermediate subgroup sizes, and the associated bounds.
pub fn conjugate_generation_profile(
    g: &FiniteMetabelian,
    r_set: &[Vec<u64>],
    ceiling: u64,
) -> Result<ConjugationProfile, GroupError> {
    if r_set.is_empty() {
        return Err(GroupError::BadParameters("R must be nonempty".into()));
    }
    for v in r_set {
        if v.len() != g.a_moduli.len() || v.iter().zip(&g.a_moduli).any(|(&x, &m)| x >= m) {
            return Err(GroupError::BadElement(format!("{v:?} is not an A-vector")));
        }
    }
    let a_order = g.a_order();
    if a_order > ceiling as u128 {
        return Err(GroupError::TooLarge { order: a_order, ceiling });
    }
    let m = g.b_moduli.len();
    let maxes: Vec<u64> = g.b_moduli.clone();

    let span_size = |ls: &[u64]| -> u64 {
        let gens = conjugate_vectors(g, r_set, ls);
        additive_span(g, &gens).len() as u64
    };
    let full = a_order as u64;
    if span_size(&maxes) != full {
        return Err(GroupError::NotNormallyGenerating);
    }

    // Greedy minimal tuple: shrink each coordinate in turn with the later
    // ones held at their full range.
    let mut l = vec![0u64; m];
    for i in 0..m {
        let mut probe: Vec<u64> = l[..i].to_vec();
        probe.push(0);
        probe.extend_from_slice(&maxes[i + 1..]);
        for cand in 0..=maxes[i] {
            probe[i] = cand;
            if span_size(&probe) == full {
                break;
            }
        }
        l[i] = probe[i];
    }
    debug_assert_eq!(span_size(&l), full);

    // Chain along the capped diagonal, plus the stabilization check over the
    // whole range.
    let j_full = maxes.iter().copied().max().unwrap_or(0);
    let mut sizes = Vec::new();
    for j in 0..=j_full {
        let capped: Vec<u64> = l.iter().map(|&li| li.min(j)).collect();
        sizes.push(span_size(&capped));
    }
    let mut stabilization_verified = true;
    let mut stable_at = None;
    for w in 0..sizes.len().saturating_sub(1) {
        if sizes[w] == sizes[w + 1] {
            stable_at.get_or_insert(w);
        }
    }
    if let Some(w) = stable_at {
        stabilization_verified = sizes[w..].iter().all(|&s| s == sizes[w]);
    }
    let chain_end = stable_at.map_or(sizes.len(), |w| w + 1);
    let chain: Vec<u64> = sizes[..chain_end].to_vec();

    let r_span = additive_span(g, r_set);
    let exponent = r_span
        .iter()
        .map(|&idx| {
            let v = g.decode_a(idx);
            v.iter().zip(&g.a_moduli).fold(1u64, |acc, (&x, &mj)| {
                let ord = mj / crate::exact_arith::gcd_u64(x, mj);
                acc / crate::exact_arith::gcd_u64(acc, ord) * ord
            })
        })
        .fold(1u64, |acc, ord| acc / crate::exact_arith::gcd_u64(acc, ord) * ord);

    let l_sum: u64 = l.iter().sum();
    let word_length_bound = (2 * l_sum + 1)
        .saturating_mul(exponent)
        .saturating_mul(r_set.len() as u64)
        .saturating_mul(l_sum.pow(m as u32));

    let min_prime = g
        .a_moduli
        .iter()
        .filter(|&&mj| mj > 1)
        .flat_map(|&mj| factor_u64(mj).into_iter().map(|(p, _)| p))
        .min()
        .unwrap_or(2);

    Ok(ConjugationProfile {
        l,
        chain,
        exponent,
        word_length_bound,
        min_prime,
        stabilization_verified,
    })
}

/// All conjugates `(t_1^{k_1} ... t_m^{k_m}) · r` with `|k_i| ≤ l_i`.
fn conjugate_vectors(g: &FiniteMetabelian, r_set: &[Vec<u64>], ls: &[u64]) -> Vec<Vec<u64>> {
    let m = g.b_moduli.len();
    let mut out = Vec::new();
    let mut k: Vec<i64> = ls.iter().map(|&l| -(l as i64)).collect();
    loop {
        let b: Vec<u64> = k
            .iter()
            .zip(&g.b_moduli)
            .map(|(&x, &r)| (x as i128).rem_euclid(r as i128) as u64)
            .collect();
        for r in r_set {
            out.push(g.apply_b(&b, r));
        }
        // Advance the odometer over the box |k_i| <= l_i.
        let mut i = 0;
        loop {
            if i == m {
                return out;
            }
            if k[i] < ls[i] as i64 {
                k[i] += 1;
                break;
            }
            k[i] = -(ls[i] as i64);
            i += 1;
        }
    }
}
