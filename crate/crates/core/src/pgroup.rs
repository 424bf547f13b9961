//! Small p-groups (at most 64 elements) with subgroups stored as bitmasks.
//!
//! Every fusion system is built over one of these. Elements carry labels (the
//! ids of the ambient group or locality), and local indices follow label order.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::group::{is_prime, is_prime_power_of};

/// A subset of the p-group, bit `i` standing for local element `i`.
pub type Mask = u64;

pub const MAX_ORDER: usize = 64;

pub fn popcount(m: Mask) -> usize {
    m.count_ones() as usize
}

pub fn bits(m: Mask) -> impl Iterator<Item = u8> {
    (0..64u8).filter(move |i| m & (1u64 << i) != 0)
}

pub fn bit(i: u8) -> Mask {
    1u64 << i
}

#[derive(Debug, Clone)]
pub struct PGroup {
    p: u64,
    labels: Vec<u32>,
    table: Vec<u8>,
    inverses: Vec<u8>,
    identity: u8,
    subgroups: Vec<Mask>,
    subgroup_index: HashMap<Mask, usize>,
}

impl PartialEq for PGroup {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.labels == other.labels && self.table == other.table
    }
}

impl Eq for PGroup {}

impl PGroup {
    /// Builds the group on `labels` with multiplication `mul` (on labels).
    pub fn new(p: u64, mut labels: Vec<u32>, mul: impl Fn(u32, u32) -> u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Precondition(format!("{p} is not prime")));
        }
        labels.sort_unstable();
        labels.dedup();
        let m = labels.len();
        if m > MAX_ORDER {
            return Err(Error::CapExceeded { what: "p-group order", cap: MAX_ORDER });
        }
        if !is_prime_power_of(m as u64, p) {
            return Err(Error::Precondition(format!("order {m} is not a power of {p}")));
        }
        let local: HashMap<u32, u8> = labels.iter().enumerate().map(|(i, &l)| (l, i as u8)).collect();
        let mut table = Vec::with_capacity(m * m);
        for &a in &labels {
            for &b in &labels {
                let c = local
                    .get(&mul(a, b))
                    .ok_or_else(|| Error::Precondition("p-group not closed under products".into()))?;
                table.push(*c);
            }
        }
        let identity = (0..m)
            .find(|&e| (0..m).all(|x| table[e * m + x] as usize == x && table[x * m + e] as usize == x))
            .ok_or_else(|| Error::Precondition("p-group has no identity".into()))? as u8;
        let mut inverses = Vec::with_capacity(m);
        for x in 0..m {
            let y = (0..m)
                .find(|&y| table[x * m + y] == identity)
                .ok_or_else(|| Error::Precondition("p-group element without inverse".into()))?;
            inverses.push(y as u8);
        }
        let mut g = PGroup {
            p,
            labels,
            table,
            inverses,
            identity,
            subgroups: Vec::new(),
            subgroup_index: HashMap::new(),
        };
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let (a, b, c) = (a as u8, b as u8, c as u8);
                    if g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c)) {
                        return Err(Error::Precondition("p-group product is not associative".into()));
                    }
                }
            }
        }
        g.subgroups = g.enumerate_subgroups();
        g.subgroup_index = g.subgroups.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(g)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, x: u8) -> u32 {
        self.labels[x as usize]
    }

    pub fn local(&self, label: u32) -> Option<u8> {
        self.labels.binary_search(&label).ok().map(|i| i as u8)
    }

    pub fn identity(&self) -> u8 {
        self.identity
    }

    pub fn full(&self) -> Mask {
        if self.order() == 64 {
            u64::MAX
        } else {
            (1u64 << self.order()) - 1
        }
    }

    pub fn trivial(&self) -> Mask {
        bit(self.identity)
    }

    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.table[a as usize * self.order() + b as usize]
    }

    pub fn inv(&self, a: u8) -> u8 {
        self.inverses[a as usize]
    }

    /// `x^g = g^-1 x g`.
    pub fn conj(&self, x: u8, g: u8) -> u8 {
        self.mul(self.mul(self.inv(g), x), g)
    }

    pub fn generated(&self, gens: Mask) -> Mask {
        let mut h = self.trivial();
        let mut frontier = h;
        while frontier != 0 {
            let mut next = 0;
            for x in bits(frontier) {
                for s in bits(gens) {
                    let y = bit(self.mul(x, s));
                    if h & y == 0 {
                        h |= y;
                        next |= y;
                    }
                }
            }
            frontier = next;
        }
        h
    }

    pub fn join(&self, a: Mask, b: Mask) -> Mask {
        self.generated(a | b)
    }

    /// Set product `AB`.
    pub fn product_set(&self, a: Mask, b: Mask) -> Mask {
        let mut r = 0;
        for x in bits(a) {
            for y in bits(b) {
                r |= bit(self.mul(x, y));
            }
        }
        r
    }

    pub fn is_subgroup(&self, h: Mask) -> bool {
        self.subgroup_index.contains_key(&h)
    }

    /// All subgroups, ordered by order and then by element list.
    pub fn subgroups(&self) -> &[Mask] {
        &self.subgroups
    }

    pub fn subgroup_id(&self, h: Mask) -> Option<usize> {
        self.subgroup_index.get(&h).copied()
    }

    /// Subgroups of `h`, in canonical order.
    pub fn subgroups_of(&self, h: Mask) -> impl Iterator<Item = Mask> + '_ {
        self.subgroups.iter().copied().filter(move |&s| s & !h == 0)
    }

    pub fn conj_set(&self, h: Mask, g: u8) -> Mask {
        bits(h).fold(0, |acc, x| acc | bit(self.conj(x, g)))
    }

    /// `N_within(h)`.
    pub fn normalizer(&self, within: Mask, h: Mask) -> Mask {
        bits(within).filter(|&g| self.conj_set(h, g) == h).fold(0, |acc, g| acc | bit(g))
    }

    /// `C_within(h)`.
    pub fn centralizer(&self, within: Mask, h: Mask) -> Mask {
        bits(within)
            .filter(|&g| bits(h).all(|x| self.mul(x, g) == self.mul(g, x)))
            .fold(0, |acc, g| acc | bit(g))
    }

    pub fn center(&self, h: Mask) -> Mask {
        self.centralizer(h, h)
    }

    pub fn is_normal_in(&self, h: Mask, within: Mask) -> bool {
        bits(within).all(|g| self.conj_set(h, g) == h)
    }

    pub fn mask_of_labels(&self, labels: impl IntoIterator<Item = u32>) -> Option<Mask> {
        labels.into_iter().try_fold(0, |acc, l| self.local(l).map(|x| acc | bit(x)))
    }

    pub fn labels_of(&self, h: Mask) -> Vec<u32> {
        bits(h).map(|x| self.label(x)).collect()
    }

    fn enumerate_subgroups(&self) -> Vec<Mask> {
        let m = self.order() as u8;
        let cyclic: Vec<Mask> = {
            let mut v: Vec<Mask> = (0..m).map(|x| self.generated(bit(x))).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let mut found = vec![self.trivial()];
        let mut seen: std::collections::HashSet<Mask> = found.iter().copied().collect();
        let mut i = 0;
        while i < found.len() {
            let h = found[i];
            for &c in &cyclic {
                if c & !h != 0 {
                    let k = self.join(h, c);
                    if seen.insert(k) {
                        found.push(k);
                    }
                }
            }
            i += 1;
        }
        found.sort_by_key(|&h| (popcount(h), bits(h).collect::<Vec<_>>()));
        found
    }
}
