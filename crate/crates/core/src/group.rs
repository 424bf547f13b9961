//! Finite permutation groups stored by full element enumeration.
//!
//! Permutations act on the right: the product `a * b` applies `a` first, then
//! `b`, and `x^g = g^-1 x g`. Elements are sorted lexicographically by their
//! one-line images, so the identity always has id 0 and every id-ordered
//! output is deterministic.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// Default bound on the order of a constructed group.
pub const DEFAULT_GROUP_CAP: usize = 10_000;

/// Groups up to this order get a full multiplication table.
const TABLE_LIMIT: usize = 2048;

pub type ElemId = u32;

/// A permutation of `0..n`, stored by its images.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    /// Builds a permutation from 0-indexed images, rejecting non-bijections.
    pub fn from_images(images: Vec<u32>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Perm(images))
    }

    /// Builds a permutation from 1-indexed one-line images.
    pub fn from_one_line(images: &[u32]) -> Option<Self> {
        if images.iter().any(|&i| i == 0) {
            return None;
        }
        Self::from_images(images.iter().map(|&i| i - 1).collect())
    }

    /// Builds a permutation of `0..n` from 1-indexed cycles.
    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Self {
        let mut p: Vec<u32> = (0..n as u32).collect();
        for c in cycles {
            for i in 0..c.len() {
                p[(c[i] - 1) as usize] = c[(i + 1) % c.len()] - 1;
            }
        }
        Perm(p)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, point: u32) -> u32 {
        self.0[point as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn one_line(&self) -> Vec<u32> {
        self.0.iter().map(|&i| i + 1).collect()
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut r = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            r[j as usize] = i as u32;
        }
        Perm(r)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.one_line())
    }
}

/// A subgroup of a [`FiniteGroup`], as a sorted list of element ids.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    elements: Vec<ElemId>,
    members: FixedBitSet,
}

impl Subgroup {
    fn from_sorted(elements: Vec<ElemId>, group_order: usize) -> Self {
        let mut members = FixedBitSet::with_capacity(group_order);
        for &e in &elements {
            members.insert(e as usize);
        }
        Subgroup { elements, members }
    }

    /// Wraps an id set without checking closure; see [`FiniteGroup::is_subgroup`].
    pub fn from_ids(g: &FiniteGroup, mut ids: Vec<ElemId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Self::from_sorted(ids, g.order())
    }

    pub fn elements(&self) -> &[ElemId] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, e: ElemId) -> bool {
        self.members.contains(e as usize)
    }

    pub fn is_subset(&self, other: &Subgroup) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        let elements: Vec<_> = self.elements.iter().copied().filter(|&e| other.contains(e)).collect();
        Self::from_sorted(elements, self.members.len())
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup{:?}", self.elements)
    }
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by order, then lexicographically by element ids.
impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.elements.len(), &self.elements).cmp(&(other.elements.len(), &other.elements))
    }
}

/// An explicit finite permutation group.
#[derive(Clone)]
pub struct FiniteGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    index: HashMap<Perm, ElemId>,
    inverses: Vec<ElemId>,
    table: Option<Vec<ElemId>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("degree", &self.degree)
            .field("order", &self.order())
            .field("generators", &self.generators)
            .finish()
    }
}

impl FiniteGroup {
    pub fn from_generators(generators: Vec<Perm>, degree: usize) -> Result<Self> {
        Self::from_generators_capped(generators, degree, DEFAULT_GROUP_CAP)
    }

    pub fn from_generators_capped(generators: Vec<Perm>, degree: usize, cap: usize) -> Result<Self> {
        for (index, g) in generators.iter().enumerate() {
            if g.degree() != degree || Perm::from_images(g.0.clone()).is_none() {
                return Err(Error::NotBijective { index, degree });
            }
        }
        let id = Perm::identity(degree);
        let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for s in &generators {
                let y = x.then(s);
                if !seen.contains(&y) {
                    if seen.len() >= cap {
                        return Err(Error::CapExceeded { what: "group order", cap });
                    }
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        let mut elements: Vec<Perm> = seen.into_iter().collect();
        elements.sort();
        Ok(Self::from_sorted_elements(generators, degree, elements))
    }

    fn from_sorted_elements(generators: Vec<Perm>, degree: usize, elements: Vec<Perm>) -> Self {
        let index: HashMap<Perm, ElemId> =
            elements.iter().enumerate().map(|(i, p)| (p.clone(), i as ElemId)).collect();
        let inverses = elements.iter().map(|p| index[&p.inverse()]).collect();
        let n = elements.len();
        let table = (n <= TABLE_LIMIT).then(|| {
            let mut t = Vec::with_capacity(n * n);
            for a in &elements {
                for b in &elements {
                    t.push(index[&a.then(b)]);
                }
            }
            t
        });
        FiniteGroup { degree, generators, elements, index, inverses, table }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn identity(&self) -> ElemId {
        0
    }

    pub fn perm(&self, e: ElemId) -> &Perm {
        &self.elements[e as usize]
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn id_of(&self, p: &Perm) -> Option<ElemId> {
        self.index.get(p).copied()
    }

    /// `a` followed by `b`.
    pub fn mul(&self, a: ElemId, b: ElemId) -> ElemId {
        match &self.table {
            Some(t) => t[a as usize * self.order() + b as usize],
            None => self.index[&self.perm(a).then(self.perm(b))],
        }
    }

    pub fn inv(&self, a: ElemId) -> ElemId {
        self.inverses[a as usize]
    }

    /// `x^g = g^-1 x g`.
    pub fn conj(&self, x: ElemId, g: ElemId) -> ElemId {
        self.mul(self.mul(self.inv(g), x), g)
    }

    pub fn pow(&self, x: ElemId, k: usize) -> ElemId {
        (0..k).fold(self.identity(), |acc, _| self.mul(acc, x))
    }

    pub fn element_order(&self, x: ElemId) -> usize {
        let mut y = x;
        let mut k = 1;
        while y != self.identity() {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::from_sorted((0..self.order() as ElemId).collect(), self.order())
    }

    pub fn trivial(&self) -> Subgroup {
        Subgroup::from_sorted(vec![self.identity()], self.order())
    }

    /// The subgroup generated by `gens`.
    pub fn generated(&self, gens: &[ElemId]) -> Subgroup {
        let mut members = FixedBitSet::with_capacity(self.order());
        members.insert(self.identity() as usize);
        let mut queue = VecDeque::from([self.identity()]);
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(x, s);
                if !members.put(y as usize) {
                    queue.push_back(y);
                }
            }
        }
        let elements = members.ones().map(|e| e as ElemId).collect();
        Subgroup { elements, members }
    }

    pub fn is_subgroup(&self, h: &Subgroup) -> bool {
        h.contains(self.identity())
            && h.elements.iter().all(|&a| {
                h.contains(self.inv(a)) && h.elements.iter().all(|&b| h.contains(self.mul(a, b)))
            })
    }

    pub fn conjugate(&self, h: &Subgroup, g: ElemId) -> Subgroup {
        Subgroup::from_ids(self, h.elements.iter().map(|&x| self.conj(x, g)).collect())
    }

    pub fn normalizer(&self, h: &Subgroup) -> Subgroup {
        let ids = (0..self.order() as ElemId)
            .filter(|&g| h.elements.iter().all(|&x| h.contains(self.conj(x, g))))
            .collect();
        Subgroup::from_sorted(ids, self.order())
    }

    pub fn centralizer(&self, h: &Subgroup) -> Subgroup {
        let ids = (0..self.order() as ElemId)
            .filter(|&g| h.elements.iter().all(|&x| self.mul(x, g) == self.mul(g, x)))
            .collect();
        Subgroup::from_sorted(ids, self.order())
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        self.generators
            .iter()
            .map(|p| self.index[p])
            .all(|g| h.elements.iter().all(|&x| h.contains(self.conj(x, g))))
    }

    /// Smallest normal subgroup containing `h`.
    pub fn normal_closure(&self, h: &Subgroup) -> Subgroup {
        let gens: Vec<ElemId> = h
            .elements
            .iter()
            .flat_map(|&x| (0..self.order() as ElemId).map(move |g| (x, g)))
            .map(|(x, g)| self.conj(x, g))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        self.generated(&gens)
    }

    pub fn is_p_group(&self, h: &Subgroup, p: u64) -> bool {
        is_prime_power_of(h.order() as u64, p)
    }

    /// Every subgroup exactly once, in canonical order.
    pub fn all_subgroups(&self) -> Result<Vec<Subgroup>> {
        self.all_subgroups_capped(DEFAULT_GROUP_CAP)
    }

    pub fn all_subgroups_capped(&self, cap: usize) -> Result<Vec<Subgroup>> {
        if self.order() > cap {
            return Err(Error::CapExceeded { what: "group order", cap });
        }
        // cyclic subgroups, each with one generator
        let mut cyclic: Vec<(ElemId, Subgroup)> = Vec::new();
        let mut cyclic_seen: HashSet<Vec<ElemId>> = HashSet::new();
        for x in 0..self.order() as ElemId {
            let c = self.generated(&[x]);
            if cyclic_seen.insert(c.elements.clone()) {
                cyclic.push((x, c));
            }
        }
        let mut found: HashSet<Vec<ElemId>> = HashSet::from([vec![self.identity()]]);
        let mut list: Vec<(Vec<ElemId>, Subgroup)> = vec![(vec![], self.trivial())];
        let mut i = 0;
        while i < list.len() {
            let (gens, h) = list[i].clone();
            for (x, c) in &cyclic {
                if c.is_subset(&h) {
                    continue;
                }
                let mut g2 = gens.clone();
                g2.push(*x);
                let k = self.generated(&g2);
                if found.insert(k.elements.clone()) {
                    list.push((g2, k));
                }
            }
            i += 1;
        }
        let mut subs: Vec<Subgroup> = list.into_iter().map(|(_, h)| h).collect();
        subs.sort();
        Ok(subs)
    }

    /// The canonically least Sylow `p`-subgroup.
    pub fn sylow_subgroup(&self, p: u64) -> Subgroup {
        let target = p_part(self.order() as u64, p) as usize;
        let mut s = self.trivial();
        while s.order() < target {
            // a p-subgroup that is not Sylow is not Sylow in its normalizer either
            let n = self.normalizer(&s);
            let x = n
                .elements
                .iter()
                .copied()
                .find(|&x| !s.contains(x) && s.contains(self.pow(x, p as usize)))
                .expect("normalizer of a non-Sylow p-subgroup contains a p-element outside it");
            let mut gens = s.elements.clone();
            gens.push(x);
            s = self.generated(&gens);
        }
        (0..self.order() as ElemId)
            .map(|g| self.conjugate(&s, g))
            .min()
            .unwrap_or(s)
    }

    /// Largest normal `p`-subgroup: the intersection of all Sylow `p`-subgroups.
    pub fn p_core(&self, p: u64) -> Subgroup {
        let s = self.sylow_subgroup(p);
        (0..self.order() as ElemId).fold(s.clone(), |acc, g| acc.intersection(&self.conjugate(&s, g)))
    }

    /// `C_G(O_p(G)) <= O_p(G)`.
    pub fn is_characteristic_p(&self, p: u64) -> bool {
        let core = self.p_core(p);
        self.centralizer(&core).is_subset(&core)
    }

    /// The subgroup `h` as a group in its own right (same degree).
    pub fn subgroup_as_group(&self, h: &Subgroup) -> FiniteGroup {
        let perms: Vec<Perm> = h.elements.iter().map(|&e| self.perm(e).clone()).collect();
        let gens = perms.clone();
        FiniteGroup::from_sorted_elements(gens, self.degree, perms)
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Largest power of `p` dividing `n`.
pub fn p_part(mut n: u64, p: u64) -> u64 {
    let mut r = 1;
    while n > 0 && n % p == 0 {
        n /= p;
        r *= p;
    }
    r
}

pub fn is_prime_power_of(n: u64, p: u64) -> bool {
    n >= 1 && p_part(n, p) == n
}

pub fn smallest_prime_factor(n: u64) -> Option<u64> {
    (2..=n).find(|d| n % d == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: usize, cycles: &[&[u32]]) -> Perm {
        Perm::from_cycles(n, cycles)
    }

    fn d8() -> FiniteGroup {
        FiniteGroup::from_generators(vec![c(4, &[&[1, 2, 3, 4]]), c(4, &[&[1, 3]])], 4).unwrap()
    }

    fn s4() -> FiniteGroup {
        FiniteGroup::from_generators(vec![c(4, &[&[1, 2, 3, 4]]), c(4, &[&[1, 2]])], 4).unwrap()
    }

    /// Breadth-first closure without any of the group machinery.
    fn closure_order(gens: &[Perm], n: usize) -> usize {
        let mut seen = vec![Perm::identity(n)];
        let mut i = 0;
        while i < seen.len() {
            for g in gens {
                let y = seen[i].then(g);
                if !seen.contains(&y) {
                    seen.push(y);
                }
            }
            i += 1;
        }
        seen.len()
    }

    #[test]
    fn orders_match_closure_oracle() {
        assert_eq!(FiniteGroup::from_generators(vec![], 3).unwrap().order(), 1);
        let dg = [c(4, &[&[1, 2, 3, 4]]), c(4, &[&[1, 3]])];
        assert_eq!(closure_order(&dg, 4), 8);
        assert_eq!(d8().order(), 8);
        let sg = [c(4, &[&[1, 2, 3, 4]]), c(4, &[&[1, 2]])];
        assert_eq!(closure_order(&sg, 4), 24);
        assert_eq!(s4().order(), 24);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Perm::from_one_line(&[1, 1, 2]).is_none());
        assert!(Perm::from_one_line(&[0, 1, 2]).is_none());
        let bad = Perm(vec![0, 0, 1]);
        assert!(matches!(FiniteGroup::from_generators(vec![bad], 3), Err(Error::NotBijective { .. })));
        let s5 = vec![c(5, &[&[1, 2, 3, 4, 5]]), c(5, &[&[1, 2]])];
        assert!(matches!(
            FiniteGroup::from_generators_capped(s5, 5, 100),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn identity_first_and_closed() {
        let g = s4();
        assert!(g.perm(0).is_identity());
        for a in 0..24 {
            assert_eq!(g.mul(a, g.inv(a)), 0);
            for b in 0..24 {
                let ab = g.perm(a).then(g.perm(b));
                assert_eq!(g.perm(g.mul(a, b)), &ab);
            }
        }
        assert_eq!(720 % g.order(), 0);
    }

    /// Exhaustive subset filtering over all 2^8 subsets of an order-8 group.
    fn subgroup_count_by_subsets(g: &FiniteGroup) -> usize {
        let n = g.order();
        (0u32..(1 << n))
            .filter(|mask| {
                let ids: Vec<ElemId> = (0..n as u32).filter(|i| mask & (1 << i) != 0).collect();
                !ids.is_empty() && g.is_subgroup(&Subgroup::from_ids(g, ids))
            })
            .count()
    }

    #[test]
    fn subgroup_counts() {
        assert_eq!(FiniteGroup::from_generators(vec![], 2).unwrap().all_subgroups().unwrap().len(), 1);
        let v4 = FiniteGroup::from_generators(vec![c(4, &[&[1, 2], &[3, 4]]), c(4, &[&[1, 3], &[2, 4]])], 4)
            .unwrap();
        assert_eq!(v4.all_subgroups().unwrap().len(), 5);
        let d = d8();
        assert_eq!(subgroup_count_by_subsets(&d), 10);
        assert_eq!(d.all_subgroups().unwrap().len(), 10);
        assert_eq!(s4().all_subgroups().unwrap().len(), 30);
    }

    #[test]
    fn sylow_and_core() {
        let t = FiniteGroup::from_generators(vec![], 3).unwrap();
        assert_eq!(t.sylow_subgroup(2).order(), 1);
        let g = s4();
        let s2 = g.sylow_subgroup(2);
        assert_eq!(s2.order(), 8);
        let first = g.all_subgroups().unwrap().into_iter().find(|h| h.order() == 8).unwrap();
        assert_eq!(s2, first);
        assert_eq!(g.sylow_subgroup(3).order(), 3);
        let core = g.p_core(2);
        assert_eq!(core.order(), 4);
        for &x in core.elements() {
            let p = g.perm(x);
            assert!(p.is_identity() || (0..4).all(|i| p.apply(i) != i));
        }
    }

    #[test]
    fn normalizer_centralizer() {
        let g = s4();
        let w = g.whole();
        assert_eq!(g.normalizer(&w), w);
        assert_eq!(g.centralizer(&g.trivial()), w);
        for h in g.all_subgroups().unwrap() {
            let n = g.normalizer(&h);
            let cz = g.centralizer(&h);
            assert!(h.is_subset(&n));
            assert!(cz.is_subset(&n));
            let ng = g.subgroup_as_group(&n);
            let cz_in_n = Subgroup::from_ids(&ng, cz.elements().iter().map(|&e| ng.id_of(g.perm(e)).unwrap()).collect());
            assert!(ng.is_normal(&cz_in_n));
        }
    }

    #[test]
    fn characteristic_p() {
        assert!(d8().is_characteristic_p(2));
        assert!(s4().is_characteristic_p(2));
        let c3 = FiniteGroup::from_generators(vec![c(3, &[&[1, 2, 3]])], 3).unwrap();
        assert!(!c3.is_characteristic_p(2));
        for g in [d8(), s4(), c3] {
            for p in [2, 3] {
                let core = g.p_core(p);
                assert!(g.is_normal(&core) && g.is_p_group(&core, p));
                assert_eq!(g.is_characteristic_p(p), g.centralizer(&core).is_subset(&core));
            }
        }
    }
}
