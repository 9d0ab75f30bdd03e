//! Cayley-table computations for groups small enough to enumerate: subgroup
//! closure, the full subgroup lattice as a join-closure of cyclic subgroups,
//! normal subgroups, quotients, lower central series and nilpotency.
//!
//! Subgroups are sorted vectors of element indices; all routines are
//! deterministic.

use std::collections::HashSet;

/// A finite group given by its multiplication table.
#[derive(Clone)]
pub struct SmallGroup {
    pub n: usize,
    /// Index of the identity element.
    pub identity: u32,
    mul: Vec<u32>,
    inv: Vec<u32>,
}

impl SmallGroup {
    /// Build from an explicit multiplication law.
    pub fn from_mul_fn(n: usize, identity: u32, mul_fn: impl Fn(u32, u32) -> u32) -> Self {
        let mut mul = vec![0u32; n * n];
        for i in 0..n as u32 {
            for j in 0..n as u32 {
                mul[i as usize * n + j as usize] = mul_fn(i, j);
            }
        }
        let mut inv = vec![0u32; n];
        for i in 0..n as u32 {
            let j = (0..n as u32)
                .find(|&j| mul[i as usize * n + j as usize] == identity)
                .expect("every element has an inverse");
            inv[i as usize] = j;
        }
        SmallGroup { n, identity, mul, inv }
    }

    pub fn mul(&self, i: u32, j: u32) -> u32 {
        self.mul[i as usize * self.n + j as usize]
    }

    pub fn inv(&self, i: u32) -> u32 {
        self.inv[i as usize]
    }

    pub fn conjugate(&self, g: u32, x: u32) -> u32 {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn commutator(&self, x: u32, y: u32) -> u32 {
        self.mul(self.mul(self.inv(x), self.inv(y)), self.mul(x, y))
    }

    /// The subgroup generated by `gens`, as a sorted element list.
    pub fn subgroup_closure(&self, gens: &[u32]) -> Vec<u32> {
        let mut member = vec![false; self.n];
        member[self.identity as usize] = true;
        let mut elements = vec![self.identity];
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                for y in [self.mul(x, g), self.mul(x, self.inv(g))] {
                    if !member[y as usize] {
                        member[y as usize] = true;
                        elements.push(y);
                        frontier.push(y);
                    }
                }
            }
        }
        elements.sort_unstable();
        elements
    }

    /// Every subgroup, computed as the join-closure of the cyclic subgroups.
    pub fn all_subgroups(&self) -> Vec<Vec<u32>> {
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        let mut subgroups: Vec<Vec<u32>> = Vec::new();
        let insert = |h: Vec<u32>, subgroups: &mut Vec<Vec<u32>>, seen: &mut HashSet<Vec<u32>>| {
            if seen.insert(h.clone()) {
                subgroups.push(h);
            }
        };
        insert(vec![self.identity], &mut subgroups, &mut seen);
        for g in 0..self.n as u32 {
            insert(self.subgroup_closure(&[g]), &mut subgroups, &mut seen);
        }
        // Join-closure: keep adjoining generators of one subgroup to another.
        let mut changed = true;
        while changed {
            changed = false;
            let snapshot = subgroups.clone();
            for h in &snapshot {
                for k in &snapshot {
                    let mut gens = h.clone();
                    gens.extend_from_slice(k);
                    let join = self.subgroup_closure(&gens);
                    if seen.insert(join.clone()) {
                        subgroups.push(join);
                        changed = true;
                    }
                }
            }
        }
        subgroups.sort();
        subgroups
    }

    pub fn is_normal(&self, h: &[u32]) -> bool {
        h.iter().all(|&x| {
            (0..self.n as u32).all(|g| h.binary_search(&self.conjugate(g, x)).is_ok())
        })
    }

    pub fn normal_subgroups(&self) -> Vec<Vec<u32>> {
        self.all_subgroups()
            .into_iter()
            .filter(|h| self.is_normal(h))
            .collect()
    }

    /// Quotient by a normal subgroup: the coset group and the map from
    /// element index to coset index.
    pub fn quotient(&self, n_sub: &[u32]) -> (SmallGroup, Vec<u32>) {
        debug_assert!(self.is_normal(n_sub));
        let mut coset_of = vec![u32::MAX; self.n];
        let mut reps: Vec<u32> = Vec::new();
        for x in 0..self.n as u32 {
            if coset_of[x as usize] != u32::MAX {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(x);
            for &h in n_sub {
                coset_of[self.mul(x, h) as usize] = id;
            }
        }
        let coset_of_clone = coset_of.clone();
        let q = SmallGroup::from_mul_fn(reps.len(), coset_of[self.identity as usize], |i, j| {
            coset_of_clone[self.mul(reps[i as usize], reps[j as usize]) as usize]
        });
        (q, coset_of)
    }

    /// Lower central series of a subgroup `h` (taken inside `h` itself):
    /// `L_1 = h`, `L_{k+1} = <[x, y] : x ∈ L_k, y ∈ h>`, until stable.
    pub fn lower_central_series_of(&self, h: &[u32]) -> Vec<Vec<u32>> {
        let mut chain = vec![h.to_vec()];
        loop {
            let current = chain.last().unwrap();
            let mut gens: Vec<u32> = Vec::new();
            for &x in current {
                for &y in h {
                    gens.push(self.commutator(x, y));
                }
            }
            gens.sort_unstable();
            gens.dedup();
            let next = self.subgroup_closure(&gens);
            let stable = *current == next;
            let trivial = next.len() == 1;
            chain.push(next);
            if stable || trivial {
                break;
            }
        }
        chain
    }

    pub fn is_nilpotent_subgroup(&self, h: &[u32]) -> bool {
        self.lower_central_series_of(h).last().unwrap().len() == 1
    }

    pub fn is_nilpotent(&self) -> bool {
        let all: Vec<u32> = (0..self.n as u32).collect();
        self.is_nilpotent_subgroup(&all)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Z_p ⋊ Z_r with the generator of Z_r acting by multiplication by k.
    fn zp_semidirect(p: u32, r: u32, k: u32) -> SmallGroup {
        let n = (p * r) as usize;
        SmallGroup::from_mul_fn(n, 0, |i, j| {
            let (a1, b1) = (i % p, i / p);
            let (a2, b2) = (j % p, j / p);
            // k^b1 mod p
            let mut scale = 1u64;
            for _ in 0..b1 {
                scale = scale * k as u64 % p as u64;
            }
            let a = (a1 as u64 + scale * a2 as u64) % p as u64;
            let b = (b1 + b2) % r;
            b * p + a as u32
        })
    }

    #[test]
    fn cyclic_group_lattice() {
        let z6 = SmallGroup::from_mul_fn(6, 0, |i, j| (i + j) % 6);
        let subs = z6.all_subgroups();
        assert_eq!(subs.len(), 4); // 1, Z2, Z3, Z6
        assert!(subs.iter().all(|h| z6.is_normal(h)));
        assert!(z6.is_nilpotent());
    }

    #[test]
    fn z7_semidirect_z3_normal_subgroups() {
        let g = zp_semidirect(7, 3, 2);
        let normals = g.normal_subgroups();
        let sizes: Vec<usize> = normals.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![1, 7, 21]);
        assert!(!g.is_nilpotent());
        // Quotient by Z_7 is Z_3.
        let z7 = normals.iter().find(|h| h.len() == 7).unwrap();
        let (q, _) = g.quotient(z7);
        assert_eq!(q.n, 3);
        assert!(q.is_nilpotent());
    }

    #[test]
    fn lower_central_series_of_dihedral_like() {
        // Z_5 ⋊ Z_4 with k = 2 (ord_5(2) = 4).
        let g = zp_semidirect(5, 4, 2);
        let chain = g.lower_central_series_of(&(0..20).collect::<Vec<_>>());
        assert_eq!(chain[1].len(), 5); // [G,G] = Z_5
        assert_eq!(chain.last().unwrap().len(), 5); // stabilises, not nilpotent
    }

    #[test]
    fn subgroup_lattice_meet_join_closed() {
        let g = zp_semidirect(5, 4, 2);
        let subs = g.all_subgroups();
        for h in &subs {
            for k in &subs {
                let meet: Vec<u32> = h
                    .iter()
                    .copied()
                    .filter(|x| k.binary_search(x).is_ok())
                    .collect();
                assert!(subs.contains(&meet), "meet closed");
                let mut gens = h.clone();
                gens.extend_from_slice(k);
                assert!(subs.contains(&g.subgroup_closure(&gens)), "join closed");
            }
        }
    }
}
