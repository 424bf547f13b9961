//! Fusion systems over small p-groups, stored as explicit Hom-sets.
//!
//! A [`FusionSystem`] lives inside an ambient p-group `S` and is *over* a
//! subgroup `base ≤ S`. For every subgroup `P ≤ base` it stores all morphisms
//! `P → base` as full element maps; `Hom(P, Q)` is the subset with image in `Q`.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{p_part, FiniteGroup, Perm, Subgroup};
use crate::pgroup::{bit, bits, popcount, Mask, PGroup};

pub const DEFAULT_MORPHISM_CAP: usize = 1_000_000;

/// Default cap on intermediate subsystems visited by subnormality searches.
pub const DEFAULT_SUBSYSTEM_CAP: usize = 2_000;

const UNDEF: u8 = u8::MAX;

/// An injective homomorphism from `source` into `S`; `map[x]` is the image of
/// local element `x`, or `UNDEF` outside the source.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Morphism {
    source: Mask,
    map: Vec<u8>,
}

impl Morphism {
    pub fn new(source: Mask, map: Vec<u8>) -> Self {
        Morphism { source, map }
    }

    pub fn identity(s: &PGroup, source: Mask) -> Self {
        let map = (0..s.order() as u8).map(|x| if source & bit(x) != 0 { x } else { UNDEF }).collect();
        Morphism { source, map }
    }

    /// `c_u : x ↦ u^-1 x u` on `source`.
    pub fn conjugation(s: &PGroup, source: Mask, u: u8) -> Self {
        let map = (0..s.order() as u8).map(|x| if source & bit(x) != 0 { s.conj(x, u) } else { UNDEF }).collect();
        Morphism { source, map }
    }

    pub fn source(&self) -> Mask {
        self.source
    }

    pub fn image(&self) -> Mask {
        bits(self.source).fold(0, |acc, x| acc | bit(self.map[x as usize]))
    }

    pub fn apply(&self, x: u8) -> u8 {
        self.map[x as usize]
    }

    pub fn map(&self) -> &[u8] {
        &self.map
    }

    /// `other ∘ self` (apply `self` first); needs `image(self) ≤ source(other)`.
    pub fn then(&self, other: &Morphism) -> Morphism {
        let map = self.map.iter().map(|&y| if y == UNDEF { UNDEF } else { other.map[y as usize] }).collect();
        Morphism { source: self.source, map }
    }

    pub fn inverse(&self) -> Morphism {
        let mut map = vec![UNDEF; self.map.len()];
        for x in bits(self.source) {
            map[self.map[x as usize] as usize] = x;
        }
        Morphism { source: self.image(), map }
    }

    pub fn restrict(&self, sub: Mask) -> Morphism {
        let map = (0..self.map.len() as u8).map(|x| if sub & bit(x) != 0 { self.map[x as usize] } else { UNDEF }).collect();
        Morphism { source: sub, map }
    }

    /// Agreement with `other` on `sub`.
    pub fn agrees_on(&self, other: &Morphism, sub: Mask) -> bool {
        bits(sub).all(|x| self.map[x as usize] == other.map[x as usize])
    }

    fn is_injective_hom(&self, s: &PGroup) -> bool {
        let img = self.image();
        popcount(img) == popcount(self.source)
            && bits(self.source).all(|x| bits(self.source).all(|y| self.apply(s.mul(x, y)) == s.mul(self.apply(x), self.apply(y))))
    }

    /// As a permutation of all of `S` (identity outside the source); needs `image = source`.
    fn as_perm(&self) -> Perm {
        let images = self.map.iter().enumerate().map(|(x, &y)| if y == UNDEF { x as u32 } else { y as u32 }).collect();
        Perm::from_images(images).expect("automorphism is a bijection")
    }
}

/// Verdict of a capped search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<T> {
    Yes(T),
    No,
    Unknown,
}

impl<T> Verdict<T> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionSystem {
    s: Arc<PGroup>,
    base: Mask,
    /// Indexed by subgroup id of `S`; empty for subgroups not inside `base`.
    homs: Vec<Vec<Morphism>>,
}

impl FusionSystem {
    /// Least fusion system over `base` containing `generators` and inner fusion.
    pub fn close(s: Arc<PGroup>, base: Mask, generators: Vec<Morphism>) -> Result<Self> {
        Self::close_capped(s, base, generators, DEFAULT_MORPHISM_CAP)
    }

    pub fn close_capped(s: Arc<PGroup>, base: Mask, generators: Vec<Morphism>, cap: usize) -> Result<Self> {
        if !s.is_subgroup(base) {
            return Err(Error::Precondition("base is not a subgroup of S".into()));
        }
        let mut gens: BTreeSet<Morphism> = BTreeSet::new();
        for g in generators {
            if !s.is_subgroup(g.source) || g.source & !base != 0 || g.map.len() != s.order() {
                return Err(Error::Precondition("generator source is not a subgroup of the base".into()));
            }
            if !g.is_injective_hom(&s) || g.image() & !base != 0 {
                return Err(Error::Precondition("generator is not an injective homomorphism into the base".into()));
            }
            gens.insert(g.inverse());
            gens.insert(g);
        }
        for u in bits(base) {
            gens.insert(Morphism::conjugation(&s, base, u));
        }
        let gens: Vec<Morphism> = gens.into_iter().collect();
        let mut homs = vec![Vec::new(); s.subgroups().len()];
        let mut total = 0usize;
        for p in s.subgroups_of(base) {
            let start = Morphism::identity(&s, p);
            let mut seen: HashSet<Morphism> = HashSet::from([start.clone()]);
            let mut queue = VecDeque::from([start]);
            while let Some(psi) = queue.pop_front() {
                let q = psi.image();
                for g in gens.iter().filter(|g| q & !g.source == 0) {
                    let next = psi.then(g);
                    if !seen.contains(&next) {
                        seen.insert(next.clone());
                        queue.push_back(next);
                    }
                }
                if total + seen.len() > cap {
                    return Err(Error::CapExceeded { what: "morphism count", cap });
                }
            }
            total += seen.len();
            let mut v: Vec<Morphism> = seen.into_iter().collect();
            v.sort_unstable();
            homs[s.subgroup_id(p).unwrap()] = v;
        }
        Ok(FusionSystem { s, base, homs })
    }

    fn from_homs(s: Arc<PGroup>, base: Mask, mut keep: impl FnMut(Mask) -> Vec<Morphism>) -> Self {
        let mut homs = vec![Vec::new(); s.subgroups().len()];
        for p in s.subgroups_of(base) {
            let mut v = keep(p);
            v.sort_unstable();
            v.dedup();
            homs[s.subgroup_id(p).unwrap()] = v;
        }
        FusionSystem { s, base, homs }
    }

    /// `F_S(G)`.
    pub fn of_group(g: &FiniteGroup, s: &Subgroup) -> Result<Self> {
        Self::of_subgroup(g, &g.whole(), s)
    }

    /// `F_{S∩H}(H)` inside the ambient p-group `S`, computed directly as
    /// `{c_h|_P : h ∈ H, P^h ≤ S∩H}`.
    pub fn of_subgroup(g: &FiniteGroup, h: &Subgroup, s: &Subgroup) -> Result<Self> {
        if !g.is_subgroup(s) || !g.is_subgroup(h) {
            return Err(Error::Precondition("not a subgroup".into()));
        }
        let pg = Arc::new(PGroup::new(
            crate::group::smallest_prime_factor(s.order() as u64).unwrap_or(2),
            s.elements().to_vec(),
            |a, b| g.mul(a, b),
        )?);
        Self::of_subgroup_in(g, h, pg)
    }

    /// As [`Self::of_subgroup`], over an existing p-group whose labels are ids of `g`.
    pub fn of_subgroup_in(g: &FiniteGroup, h: &Subgroup, pg: Arc<PGroup>) -> Result<Self> {
        let base = pg.mask_of_labels(pg.labels().iter().copied().filter(|&l| h.contains(l))).unwrap_or(0);
        if !pg.is_subgroup(base) {
            return Err(Error::Precondition("S ∩ H is not a subgroup".into()));
        }
        let m = pg.order();
        let pg2 = pg.clone();
        Ok(Self::from_homs(pg, base, |p| {
            h.elements()
                .iter()
                .filter_map(|&x| {
                    let mut map = vec![UNDEF; m];
                    for y in bits(p) {
                        let z = pg2.local(g.conj(pg2.label(y), x))?;
                        if base & bit(z) == 0 {
                            return None;
                        }
                        map[y as usize] = z;
                    }
                    Some(Morphism { source: p, map })
                })
                .collect()
        }))
    }

    pub fn s(&self) -> &Arc<PGroup> {
        &self.s
    }

    pub fn base(&self) -> Mask {
        self.base
    }

    pub fn p(&self) -> u64 {
        self.s.p()
    }

    /// All morphisms `P → base`.
    pub fn hom(&self, p: Mask) -> &[Morphism] {
        match self.s.subgroup_id(p) {
            Some(i) => &self.homs[i],
            None => &[],
        }
    }

    pub fn hom_into(&self, p: Mask, q: Mask) -> impl Iterator<Item = &Morphism> {
        self.hom(p).iter().filter(move |m| m.image() & !q == 0)
    }

    pub fn aut(&self, p: Mask) -> Vec<&Morphism> {
        self.hom_into(p, p).collect()
    }

    pub fn contains(&self, m: &Morphism) -> bool {
        self.hom(m.source).binary_search(m).is_ok()
    }

    pub fn morphism_count(&self) -> usize {
        self.homs.iter().map(Vec::len).sum()
    }

    /// Subgroups of the base, in canonical order.
    pub fn subgroups(&self) -> Vec<Mask> {
        self.s.subgroups_of(self.base).collect()
    }

    /// The `F`-conjugates of `P`, in canonical order.
    pub fn class_of(&self, p: Mask) -> Vec<Mask> {
        let set: BTreeSet<Mask> = self.hom(p).iter().map(Morphism::image).collect();
        let mut v: Vec<Mask> = set.into_iter().collect();
        v.sort_by_key(|&q| self.s.subgroup_id(q));
        v
    }

    /// Conjugacy classes of subgroups of the base; each class in canonical order.
    pub fn classes(&self) -> Vec<Vec<Mask>> {
        let mut done = HashSet::new();
        let mut out = Vec::new();
        for p in self.subgroups() {
            if done.insert(p) {
                let c = self.class_of(p);
                done.extend(c.iter().copied());
                out.push(c);
            }
        }
        out
    }

    pub fn is_subsystem_of(&self, other: &FusionSystem) -> bool {
        *self.s == *other.s
            && self.base & !other.base == 0
            && self.homs.iter().flatten().all(|m| other.contains(m))
    }

    pub fn is_strongly_closed(&self, t: Mask) -> bool {
        bits(t).all(|x| {
            let c = self.s.generated(bit(x));
            c & !self.base != 0 || self.hom(c).iter().all(|m| t & bit(m.apply(x)) != 0)
        })
    }

    /// `Aut_base(P)`: distinct maps `c_u|_P`, `u ∈ N_base(P)`.
    pub fn aut_base(&self, p: Mask) -> BTreeSet<Morphism> {
        bits(self.s.normalizer(self.base, p)).map(|u| Morphism::conjugation(&self.s, p, u)).collect()
    }

    pub fn is_fully_normalized(&self, p: Mask) -> bool {
        let n = popcount(self.s.normalizer(self.base, p));
        self.class_of(p).iter().all(|&q| popcount(self.s.normalizer(self.base, q)) <= n)
    }

    pub fn is_fully_automized(&self, p: Mask) -> bool {
        let aut = self.aut(p).len() as u64;
        self.aut_base(p).len() as u64 == p_part(aut, self.p())
    }

    /// Whether `ψ ∈ Hom(target)` restricting to `phi` on its source exists.
    fn extends_to(&self, phi: &Morphism, target: Mask) -> bool {
        self.hom(target).iter().any(|psi| psi.agrees_on(phi, phi.source))
    }

    /// Every isomorphism `φ : Q → P` extends to `N_φ`.
    pub fn is_receptive(&self, p: Mask) -> bool {
        let aut_s = self.aut_base(p);
        for q in self.class_of(p) {
            for phi in self.hom(q).iter().filter(|m| m.image() == p) {
                let inv = phi.inverse();
                let n_phi = bits(self.s.normalizer(self.base, q))
                    .filter(|&g| aut_s.contains(&inv.then(&Morphism::conjugation(&self.s, q, g)).then(phi)))
                    .fold(0, |acc, g| acc | bit(g));
                if !self.extends_to(phi, n_phi) {
                    return false;
                }
            }
        }
        true
    }

    /// Each class has a member that is fully automized and receptive.
    pub fn is_saturated(&self) -> bool {
        self.saturation_witness().is_none()
    }

    /// A class with no fully automized receptive member.
    pub fn saturation_witness(&self) -> Option<Mask> {
        self.classes()
            .into_iter()
            .find(|c| !c.iter().any(|&p| self.is_fully_automized(p) && self.is_receptive(p)))
            .map(|c| c[0])
    }

    pub fn is_centric(&self, p: Mask) -> bool {
        self.class_of(p).iter().all(|&q| self.s.centralizer(self.base, q) & !q == 0)
    }

    /// `Aut_F(P)` as a permutation group on the local elements of `S`.
    pub fn aut_group(&self, p: Mask) -> FiniteGroup {
        let gens: Vec<Perm> = self.aut(p).iter().map(|m| m.as_perm()).collect();
        FiniteGroup::from_generators(gens, self.s.order()).expect("Aut_F(P) closes")
    }

    /// Centric with `O_p(Out_F(P)) = 1`.
    pub fn is_centric_radical(&self, p: Mask) -> bool {
        if !self.is_centric(p) {
            return false;
        }
        let inn: BTreeSet<Morphism> = bits(p).map(|u| Morphism::conjugation(&self.s, p, u)).collect();
        self.aut_group(p).p_core(self.p()).order() == inn.len()
    }

    /// Morphisms of `P` into `N_base(Q)` that extend to `PQ` normalizing `Q`.
    fn normalizer_homs(&self, q: Mask, p: Mask) -> Vec<Morphism> {
        let pq = self.s.join(p, q);
        let ext: Vec<&Morphism> = self.hom(pq).iter().filter(|m| m.image_of(q) == q).collect();
        self.hom(p).iter().filter(|phi| ext.iter().any(|psi| psi.agrees_on(phi, p))).cloned().collect()
    }

    /// `N_F(Q)` over `N_base(Q)`, for any `Q ≤ base`.
    pub fn normalizer_of(&self, q: Mask) -> FusionSystem {
        let nq = self.s.normalizer(self.base, q);
        Self::from_homs(self.s.clone(), nq, |p| self.normalizer_homs(q, p))
    }

    /// `N_F(T)` for `T` strongly closed.
    pub fn normalizer_system(&self, t: Mask) -> Result<FusionSystem> {
        if t & !self.base != 0 || !self.is_strongly_closed(t) {
            return Err(Error::Precondition(format!("{:?} is not strongly closed", self.s.labels_of(t))));
        }
        Ok(self.normalizer_of(t))
    }

    /// `R` is normal in `F`: every morphism extends to one normalizing `R`.
    pub fn is_normal_subgroup(&self, r: Mask) -> bool {
        self.subgroups().into_iter().all(|p| self.normalizer_homs(r, p).len() == self.hom(p).len())
    }

    /// `O_p(F)`, the largest subgroup normal in `F`.
    pub fn o_p(&self) -> Mask {
        let mut cands: Vec<Mask> =
            self.subgroups().into_iter().filter(|&r| self.s.is_normal_in(r, self.base)).collect();
        cands.reverse();
        cands.into_iter().find(|&r| self.is_normal_subgroup(r)).unwrap_or(self.s.trivial())
    }

    /// `O_p(N_F(Q))` is `F`-centric for a fully normalized conjugate `Q` of `P`.
    pub fn is_subcentric(&self, p: Mask) -> bool {
        let q = self.class_of(p).into_iter().find(|&q| self.is_fully_normalized(q)).unwrap_or(p);
        self.is_centric(self.normalizer_of(q).o_p())
    }

    /// `F^s` in canonical order.
    pub fn subcentric_subgroups(&self) -> Vec<Mask> {
        self.subgroups().into_iter().filter(|&p| self.is_subcentric(p)).collect()
    }

    /// `E ⊴ F`: strongly closed base, saturated, strongly invariant, extension condition.
    pub fn is_normal_subsystem(&self, e: &FusionSystem) -> bool {
        self.normality_failure(e).is_none()
    }

    /// The first failing clause of `E ⊴ F`, if any.
    pub fn normality_failure(&self, e: &FusionSystem) -> Option<&'static str> {
        let t = e.base;
        if !e.is_subsystem_of(self) {
            return Some("subsystem");
        }
        if !self.is_strongly_closed(t) {
            return Some("strongly_closed");
        }
        if !e.is_saturated() {
            return Some("saturated");
        }
        if !self.is_strongly_invariant(e) {
            return Some("invariant");
        }
        if !self.extension_condition(e) {
            return Some("extension");
        }
        None
    }

    fn is_strongly_invariant(&self, e: &FusionSystem) -> bool {
        e.subgroups().into_iter().all(|p| {
            e.hom(p).iter().all(|phi| {
                let q = self.s.join(p, phi.image());
                self.hom(q).iter().all(|beta| {
                    let b_p = beta.restrict(p);
                    let conj = b_p.inverse().then(phi).then(beta);
                    e.contains(&conj)
                })
            })
        })
    }

    fn extension_condition(&self, e: &FusionSystem) -> bool {
        let t = e.base;
        let c = self.s.centralizer(self.base, t);
        let tc = self.s.join(t, c);
        let z = self.s.center(t);
        e.aut(t).iter().all(|alpha| {
            self.hom(tc).iter().any(|hat| {
                hat.agrees_on(alpha, t)
                    && bits(c).all(|x| z & bit(self.s.mul(self.s.inv(x), hat.apply(x))) != 0)
            })
        })
    }

    /// Normal subsystems of `self` containing `e` (all of them when `e` is `None`).
    /// Visits at most `cap` candidates.
    pub fn normal_subsystems(&self, e: Option<&FusionSystem>, cap: usize) -> Verdict<Vec<FusionSystem>> {
        let e_base = e.map_or(self.s.trivial(), |e| e.base);
        let mut found: Vec<FusionSystem> = Vec::new();
        let mut budget = cap;
        for u in self.subgroups() {
            if u & e_base != e_base || !self.is_strongly_closed(u) {
                continue;
            }
            // per class of subgroups of U meeting the U-centric ones: candidate automorphism groups
            let mut slots: Vec<(Vec<&Morphism>, Vec<Vec<Morphism>>)> = Vec::new();
            let mut done = HashSet::new();
            for p in self.s.subgroups_of(u) {
                if done.contains(&p) {
                    continue;
                }
                let class = self.class_of(p);
                done.extend(class.iter().copied());
                let Some(&rep) = class.iter().find(|&&q| self.s.centralizer(u, q) & !q == 0) else { continue };
                let aut_y = self.aut_group(rep);
                let mut must: Vec<Perm> = bits(self.s.normalizer(u, rep))
                    .map(|x| Morphism::conjugation(&self.s, rep, x).as_perm())
                    .collect();
                if let Some(e) = e {
                    if rep & !e.base == 0 {
                        must.extend(e.aut(rep).iter().map(|m| m.as_perm()));
                    }
                }
                let must_ids: Vec<u32> = must.iter().map(|p| aut_y.id_of(p).expect("Aut_E ≤ Aut_F")).collect();
                let floor = aut_y.generated(&must_ids);
                let choices: Vec<Vec<Morphism>> = normal_subgroups(&aut_y)
                    .into_iter()
                    .filter(|n| floor.is_subset(n))
                    .map(|n| {
                        n.elements().iter().map(|&a| perm_to_morphism(aut_y.perm(a), rep)).collect()
                    })
                    .collect();
                let transports: Vec<&Morphism> = self.hom(rep).iter().filter(|b| b.image() & !u == 0).collect();
                slots.push((transports, choices));
            }
            let combos: usize = slots.iter().map(|s| s.1.len()).try_fold(1usize, |a, b| a.checked_mul(b)).unwrap_or(usize::MAX);
            if combos > budget {
                return Verdict::Unknown;
            }
            budget -= combos;
            let mut idx = vec![0usize; slots.len()];
            loop {
                let mut gens = Vec::new();
                for (slot, &i) in slots.iter().zip(&idx) {
                    for beta in &slot.0 {
                        let inv = beta.inverse();
                        for a in &slot.1[i] {
                            gens.push(inv.then(a).then(beta));
                        }
                    }
                }
                if let Ok(cand) = FusionSystem::close(self.s.clone(), u, gens) {
                    let contains_e = e.map_or(true, |e| e.is_subsystem_of(&cand));
                    if contains_e && !found.contains(&cand) && self.is_normal_subsystem(&cand) {
                        found.push(cand);
                    }
                }
                // odometer over the choice vectors
                let mut k = 0;
                while k < idx.len() {
                    idx[k] += 1;
                    if idx[k] < slots[k].1.len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == idx.len() {
                    break;
                }
            }
        }
        found.sort_by(|a, b| a.ordering_key().cmp(&b.ordering_key()));
        Verdict::Yes(found)
    }

    fn ordering_key(&self) -> (usize, usize, Mask) {
        (popcount(self.base), self.morphism_count(), self.base)
    }

    /// A shortest chain `E = E_0 ⊴ E_1 ⊴ … ⊴ E_k = F`, searched top-down through normal subsystems.
    pub fn is_subnormal_subsystem(&self, e: &FusionSystem, cap: usize) -> Verdict<Vec<FusionSystem>> {
        if e == self {
            return Verdict::Yes(vec![self.clone()]);
        }
        if !e.is_subsystem_of(self) {
            return Verdict::No;
        }
        let mut budget = cap;
        match subnormal_search(self, e, &mut budget) {
            Some(Some(chain)) => Verdict::Yes(chain),
            Some(None) => Verdict::No,
            None => Verdict::Unknown,
        }
    }

    /// All subnormal subsystems, smallest first.
    pub fn subnormal_subsystems(&self, cap: usize) -> Verdict<Vec<FusionSystem>> {
        let mut all: Vec<FusionSystem> = vec![self.clone()];
        let mut i = 0;
        let mut budget = cap;
        while i < all.len() {
            let y = all[i].clone();
            match y.normal_subsystems(None, budget) {
                Verdict::Yes(ns) => {
                    budget = budget.saturating_sub(ns.len().max(1));
                    for n in ns {
                        if !all.contains(&n) {
                            all.push(n);
                        }
                    }
                }
                _ => return Verdict::Unknown,
            }
            i += 1;
        }
        all.sort_by(|a, b| a.ordering_key().cmp(&b.ordering_key()));
        Verdict::Yes(all)
    }

    /// Checks the defining closure properties of a fusion system.
    pub fn audit(&self) -> std::result::Result<(), String> {
        let s = &self.s;
        for p in self.subgroups() {
            let hom = self.hom(p);
            for m in hom {
                if m.source != p || !m.is_injective_hom(s) || m.image() & !self.base != 0 {
                    return Err(format!("bad morphism on {:?}", s.labels_of(p)));
                }
                if !self.contains(&m.inverse()) {
                    return Err(format!("inverse missing on {:?}", s.labels_of(m.image())));
                }
                for q in s.subgroups_of(p) {
                    if !self.contains(&m.restrict(q)) {
                        return Err(format!("restriction missing on {:?}", s.labels_of(q)));
                    }
                }
                for g in self.hom(m.image()) {
                    if !self.contains(&m.then(g)) {
                        return Err(format!("composite missing on {:?}", s.labels_of(p)));
                    }
                }
            }
            for u in bits(self.base) {
                if self.s.conj_set(p, u) & !self.base == 0 && !self.contains(&Morphism::conjugation(s, p, u)) {
                    return Err(format!("inner map missing on {:?}", s.labels_of(p)));
                }
            }
        }
        Ok(())
    }

    /// Deterministic JSON export; subgroups and maps use element labels.
    pub fn to_json(&self) -> Value {
        let subs = self.subgroups();
        let index = |q: Mask| subs.iter().position(|&x| x == q).expect("image is a subgroup");
        let morphisms: Vec<Value> = subs
            .iter()
            .flat_map(|&p| self.hom(p).iter())
            .map(|m| {
                let pairs: Vec<[u32; 2]> =
                    bits(m.source).map(|x| [self.s.label(x), self.s.label(m.apply(x))]).collect();
                json!({"src": index(m.source), "tgt": index(m.image()), "map": pairs})
            })
            .collect();
        json!({
            "p": self.p(),
            "S": self.s.labels(),
            "base": self.s.labels_of(self.base),
            "subgroups": subs.iter().map(|&q| self.s.labels_of(q)).collect::<Vec<_>>(),
            "morphisms": morphisms,
        })
    }
}

impl Morphism {
    fn image_of(&self, q: Mask) -> Mask {
        bits(q).fold(0, |acc, x| acc | bit(self.map[x as usize]))
    }
}

fn perm_to_morphism(p: &Perm, source: Mask) -> Morphism {
    let map = (0..p.degree() as u32)
        .map(|x| if source & (1u64 << x) != 0 { p.apply(x) as u8 } else { UNDEF })
        .collect();
    Morphism { source, map }
}

/// Normal subgroups, as joins of normal closures of single elements.
fn normal_subgroups(g: &FiniteGroup) -> Vec<Subgroup> {
    let atoms: BTreeSet<Subgroup> =
        (0..g.order() as u32).map(|x| g.normal_closure(&g.generated(&[x]))).collect();
    let mut all: BTreeSet<Subgroup> = atoms.clone();
    all.insert(g.trivial());
    let mut frontier: Vec<Subgroup> = all.iter().cloned().collect();
    while let Some(n) = frontier.pop() {
        for a in &atoms {
            let mut gens = n.elements().to_vec();
            gens.extend_from_slice(a.elements());
            let j = g.generated(&gens);
            if all.insert(j.clone()) {
                frontier.push(j);
            }
        }
    }
    all.into_iter().collect()
}

/// `Some(Some(chain from Y down to E))`, `Some(None)` if none, `None` on cap.
fn subnormal_search(f: &FusionSystem, e: &FusionSystem, budget: &mut usize) -> Option<Option<Vec<FusionSystem>>> {
    // Breadth first, so the chain found is a shortest one; each node keeps its parent.
    let mut nodes: Vec<(FusionSystem, Option<usize>)> = vec![(f.clone(), None)];
    let mut i = 0;
    while i < nodes.len() {
        let y = nodes[i].0.clone();
        if y.is_normal_subsystem(e) {
            let mut chain = vec![e.clone()];
            let mut j = Some(i);
            while let Some(k) = j {
                chain.push(nodes[k].0.clone());
                j = nodes[k].1;
            }
            return Some(Some(chain));
        }
        let ns = match y.normal_subsystems(Some(e), *budget) {
            Verdict::Yes(ns) => ns,
            _ => return None,
        };
        for n in ns {
            if n == y || n == *e || nodes.iter().any(|(m, _)| *m == n) {
                continue;
            }
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            nodes.push((n, Some(i)));
        }
        i += 1;
    }
    Some(None)
}
