//! Localities `(L, Δ, S)`: partial groups whose domain is decided by `S_w ∈ Δ`.
//!
//! Elements are addressed by labels (`u32`). For group-realized localities the
//! label is the element id in the ambient [`FiniteGroup`], so restrictions and
//! normalizer localities keep comparable labels. Internally everything is
//! indexed by position in the sorted carrier.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::fusion::{FusionSystem, Morphism};
use crate::group::{is_prime_power_of, p_part, FiniteGroup, Perm, Subgroup};
use crate::pgroup::{bit, bits, popcount, Mask, PGroup};

pub type Label = u32;

/// Default bound on carrier size (the binary product is stored as a table).
pub const CARRIER_CAP: usize = 2048;

/// Default word-length bound of [`Locality::validate`].
pub const DEFAULT_MAX_WORD_LENGTH: usize = 4;

pub(crate) const NONE: u32 = u32::MAX;
const UNDEF: u8 = u8::MAX;

/// The object set `Δ`: a set of subgroups of `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectSet {
    members: BTreeSet<Mask>,
}

impl ObjectSet {
    pub fn new(members: impl IntoIterator<Item = Mask>) -> Self {
        ObjectSet { members: members.into_iter().collect() }
    }

    pub fn min_order(s: &PGroup, k: usize) -> Self {
        Self::new(s.subgroups().iter().copied().filter(|&h| popcount(h) >= k))
    }

    pub fn all(s: &PGroup) -> Self {
        Self::min_order(s, 1)
    }

    pub fn contains(&self, h: Mask) -> bool {
        self.members.contains(&h)
    }

    pub fn members(&self) -> impl Iterator<Item = Mask> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_subset(&self, other: &ObjectSet) -> bool {
        self.members.is_subset(&other.members)
    }

    /// First member that is not a subgroup of `s`.
    pub fn non_subgroup(&self, s: &PGroup) -> Option<Mask> {
        self.members().find(|&h| !s.is_subgroup(h))
    }

    /// First overgroup (in `s`) of a member that is missing.
    pub fn missing_overgroup(&self, s: &PGroup) -> Option<Mask> {
        for p in self.members() {
            for &q in s.subgroups() {
                if p & !q == 0 && !self.contains(q) {
                    return Some(q);
                }
            }
        }
        None
    }
}

/// One pass/fail line of a [`ValidationReport`].
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Label>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub max_word_length: usize,
    pub words_checked: u64,
    /// Axioms are only checked on words up to `max_word_length`.
    pub bounded_check_only: bool,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Outcome of [`Locality::is_linking_locality`].
#[derive(Clone, Debug, Serialize)]
pub struct LinkingReport {
    pub saturated: bool,
    pub centric_radical_in_delta: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub missing_centric_radical: Option<Vec<Label>>,
    pub normalizers_char_p: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bad_normalizer_of: Option<Vec<Label>>,
}

impl LinkingReport {
    pub fn holds(&self) -> bool {
        self.saturated && self.centric_radical_in_delta && self.normalizers_char_p
    }
}

/// Raw data of a locality given by explicit tables (ids `0..n`).
#[derive(Clone, Debug)]
pub struct AbstractData {
    pub p: u64,
    pub size: usize,
    pub identity: Label,
    pub inverse: Vec<Label>,
    pub products: Vec<(Label, Label, Label)>,
    pub s: Vec<Label>,
    pub delta: Vec<Vec<Label>>,
}

#[derive(Clone, Debug)]
pub struct Locality {
    p: u64,
    carrier: Vec<Label>,
    pos_of: HashMap<Label, u32>,
    identity: u32,
    inverse: Vec<u32>,
    product: Vec<u32>,
    s: Arc<PGroup>,
    s_pos: Vec<u32>,
    conj: Vec<u8>,
    s_f: Vec<Mask>,
    delta: ObjectSet,
    realization: Option<Arc<FiniteGroup>>,
    /// `x^f` for positions, indexed `x * n + f`; built on first use.
    elem_conj: OnceLock<Vec<u32>>,
}

impl Locality {
    /// The group realization `L_Δ(G) = {g ∈ G : S_g ∈ Δ}`, validated on words
    /// up to `validate_len`.
    pub fn from_group(
        g: Arc<FiniteGroup>,
        p: u64,
        s: &Subgroup,
        delta: ObjectSet,
        validate_len: usize,
    ) -> Result<Self> {
        let loc = Self::from_group_unchecked(g, p, s, delta)?;
        loc.require_valid(validate_len)?;
        Ok(loc)
    }

    /// As [`Self::from_group`] without running the validator (preconditions are still checked).
    pub fn from_group_unchecked(g: Arc<FiniteGroup>, p: u64, s: &Subgroup, delta: ObjectSet) -> Result<Self> {
        if !is_prime_power_of(s.order() as u64, p) || !g.is_subgroup(s) {
            return Err(Error::Precondition("S is not a p-subgroup of G".into()));
        }
        let pg = Arc::new(PGroup::new(p, s.elements().to_vec(), |a, b| g.mul(a, b))?);
        check_delta_shape(&pg, &delta)?;
        let m = pg.order();
        let local_conj = |x: u8, f: u32| pg.local(g.conj(pg.label(x), f));
        // Δ must be closed under every G-conjugation between subgroups of S.
        for q in delta.members() {
            for f in 0..g.order() as u32 {
                let img: Option<Mask> = bits(q).try_fold(0, |acc, x| local_conj(x, f).map(|y| acc | bit(y)));
                if let Some(img) = img {
                    if !delta.contains(img) {
                        return Err(Error::Precondition(format!(
                            "delta not closed under conjugation: {:?} -> {:?}",
                            pg.labels_of(q),
                            pg.labels_of(img)
                        )));
                    }
                }
            }
        }
        let s_of = |f: u32| -> Mask {
            (0..m as u8).filter(|&x| local_conj(x, f).is_some()).fold(0, |acc, x| acc | bit(x))
        };
        let carrier: Vec<Label> = (0..g.order() as u32).filter(|&f| delta.contains(s_of(f))).collect();
        if carrier.len() > CARRIER_CAP {
            return Err(Error::CapExceeded { what: "carrier size", cap: CARRIER_CAP });
        }
        let n = carrier.len();
        let pos_of: HashMap<Label, u32> = carrier.iter().enumerate().map(|(i, &l)| (l, i as u32)).collect();
        let mut conj = vec![UNDEF; n * m];
        for (i, &f) in carrier.iter().enumerate() {
            for x in 0..m as u8 {
                if let Some(y) = local_conj(x, f) {
                    conj[i * m + x as usize] = y;
                }
            }
        }
        let inverse = carrier.iter().map(|&f| pos_of[&g.inv(f)]).collect();
        let s_pos = pg.labels().iter().map(|l| pos_of[l]).collect();
        let mut loc = Locality {
            p,
            identity: pos_of[&g.identity()],
            inverse,
            product: vec![NONE; n * n],
            s: pg,
            s_pos,
            conj,
            s_f: Vec::new(),
            delta,
            realization: Some(g.clone()),
            elem_conj: OnceLock::new(),
            carrier,
            pos_of,
        };
        loc.s_f = (0..n as u32).map(|f| loc.chain_domain(&[f])).collect();
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                if loc.delta.contains(loc.chain_domain(&[a, b])) {
                    let c = g.mul(loc.carrier[a as usize], loc.carrier[b as usize]);
                    loc.product[a as usize * n + b as usize] = loc.pos_of[&c];
                }
            }
        }
        Ok(loc)
    }

    /// A locality from explicit tables; conjugation is derived as `s^f = (f^-1 s) f`.
    pub fn from_abstract(data: AbstractData, validate_len: usize) -> Result<Self> {
        let loc = Self::from_abstract_unchecked(data)?;
        check_delta_shape(&loc.s, &loc.delta)?;
        loc.require_valid(validate_len)?;
        Ok(loc)
    }

    /// As [`Self::from_abstract`] without validation; for inspecting broken data.
    pub fn from_abstract_unchecked(data: AbstractData) -> Result<Self> {
        let n = data.size;
        if n > CARRIER_CAP {
            return Err(Error::CapExceeded { what: "carrier size", cap: CARRIER_CAP });
        }
        let in_range = |x: Label| (x as usize) < n;
        if !in_range(data.identity) || data.inverse.len() != n || !data.inverse.iter().all(|&x| in_range(x)) {
            return Err(Error::Descriptor("identity/inverse out of range".into()));
        }
        let mut product = vec![NONE; n * n];
        for &(a, b, c) in &data.products {
            if !(in_range(a) && in_range(b) && in_range(c)) {
                return Err(Error::Descriptor(format!("product entry ({a},{b},{c}) out of range")));
            }
            product[a as usize * n + b as usize] = c;
        }
        let bin = |a: u32, b: u32| product[a as usize * n + b as usize];
        let pg = Arc::new(PGroup::new(data.p, data.s.clone(), |a, b| match bin(a, b) {
            NONE => u32::MAX,
            c => c,
        })?);
        let mut masks = Vec::new();
        for h in &data.delta {
            masks.push(pg.mask_of_labels(h.iter().copied()).ok_or_else(|| {
                Error::Descriptor(format!("delta member {h:?} is not a subset of S"))
            })?);
        }
        let delta = ObjectSet::new(masks);
        let m = pg.order();
        let mut conj = vec![UNDEF; n * m];
        for f in 0..n as u32 {
            for x in 0..m as u8 {
                let a = bin(data.inverse[f as usize], pg.label(x));
                if a != NONE {
                    let b = bin(a, f);
                    if b != NONE {
                        if let Some(y) = pg.local(b) {
                            conj[f as usize * m + x as usize] = y;
                        }
                    }
                }
            }
        }
        let mut loc = Locality {
            p: data.p,
            carrier: (0..n as u32).collect(),
            pos_of: (0..n as u32).map(|i| (i, i)).collect(),
            identity: data.identity,
            inverse: data.inverse,
            product,
            s_pos: pg.labels().to_vec(),
            s: pg,
            conj,
            s_f: Vec::new(),
            delta,
            realization: None,
            elem_conj: OnceLock::new(),
        };
        loc.s_f = (0..n as u32).map(|f| loc.chain_domain(&[f])).collect();
        Ok(loc)
    }

    /// The explicit tables, with carrier positions as ids.
    pub fn to_abstract(&self) -> AbstractData {
        let n = self.size();
        let mut products = Vec::new();
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                let c = self.bin(a, b);
                if c != NONE {
                    products.push((a, b, c));
                }
            }
        }
        AbstractData {
            p: self.p,
            size: n,
            identity: self.identity,
            inverse: self.inverse.clone(),
            products,
            s: self.s_pos.clone(),
            delta: self
                .delta
                .members()
                .map(|h| bits(h).map(|x| self.s_pos[x as usize]).collect())
                .collect(),
        }
    }

    /// Checks objectivity on `count` random words of length `1..=max_len`, reproducible from `seed`.
    pub fn sample_objectivity(&self, count: usize, max_len: usize, seed: u64) -> Check {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = self.size() as u32;
        for _ in 0..count {
            let len = rng.gen_range(1..=max_len.max(1));
            let w: Vec<u32> = (0..len).map(|_| rng.gen_range(0..n)).collect();
            let in_d = self.delta.contains(self.chain_domain(&w));
            let mut acc = self.identity;
            let folds = w.iter().all(|&f| {
                acc = self.bin(acc, f);
                acc != NONE
            });
            if in_d && !folds {
                let witness = w.iter().map(|&f| self.carrier[f as usize]).collect();
                return Check { name: "objectivity_sampled", passed: false, witness: Some(witness) };
            }
        }
        Check { name: "objectivity_sampled", passed: true, witness: None }
    }

    /// `Err(Axiom)` naming the first failed check of [`Self::validate`].
    pub fn require_valid(&self, len: usize) -> Result<()> {
        let report = self.validate(len);
        match report.first_failure() {
            None => Ok(()),
            Some(c) => Err(Error::Axiom { axiom: c.name.to_string(), witness: c.witness.clone().unwrap_or_default() }),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn carrier(&self) -> &[Label] {
        &self.carrier
    }

    pub fn size(&self) -> usize {
        self.carrier.len()
    }

    pub fn contains(&self, f: Label) -> bool {
        self.pos_of.contains_key(&f)
    }

    pub fn identity(&self) -> Label {
        self.carrier[self.identity as usize]
    }

    pub fn inverse(&self, f: Label) -> Label {
        self.carrier[self.inverse[self.pos(f) as usize] as usize]
    }

    pub fn s_group(&self) -> &Arc<PGroup> {
        &self.s
    }

    /// Labels of the elements of `S`.
    pub fn s_labels(&self) -> &[Label] {
        self.s.labels()
    }

    pub fn delta(&self) -> &ObjectSet {
        &self.delta
    }

    pub fn realization(&self) -> Option<&Arc<FiniteGroup>> {
        self.realization.as_ref()
    }

    /// The ambient permutation of a label, for group-realized localities.
    pub fn perm(&self, f: Label) -> Option<&Perm> {
        self.realization.as_ref().map(|g| g.perm(f))
    }

    pub(crate) fn pos(&self, f: Label) -> u32 {
        *self.pos_of.get(&f).unwrap_or_else(|| panic!("{f} is not in the carrier"))
    }

    pub(crate) fn try_pos(&self, f: Label) -> Option<u32> {
        self.pos_of.get(&f).copied()
    }

    pub(crate) fn label_at(&self, pos: u32) -> Label {
        self.carrier[pos as usize]
    }

    pub(crate) fn bin(&self, a: u32, b: u32) -> u32 {
        self.product[a as usize * self.size() + b as usize]
    }

    pub(crate) fn inv_pos(&self, f: u32) -> u32 {
        self.inverse[f as usize]
    }

    pub(crate) fn chain_domain_pos(&self, word: &[u32]) -> Mask {
        self.chain_domain(word)
    }

    /// `x^f` at positions, or `NONE` when `(f^-1, x, f) ∉ D`.
    pub(crate) fn conj_pos(&self, x: u32, f: u32) -> u32 {
        let n = self.size();
        let table = self.elem_conj.get_or_init(|| {
            exec::map_range(n, |x| {
                (0..n as u32)
                    .map(|f| {
                        let fi = self.inverse[f as usize];
                        if self.delta.contains(self.chain_domain(&[fi, x as u32, f])) {
                            self.bin(self.bin(fi, x as u32), f)
                        } else {
                            NONE
                        }
                    })
                    .collect::<Vec<u32>>()
            })
            .concat()
        });
        table[x as usize * n + f as usize]
    }

    /// `x^f = Π(f^-1, x, f)` when `(f^-1, x, f) ∈ D`.
    pub fn conjugate(&self, x: Label, f: Label) -> Option<Label> {
        match self.conj_pos(self.pos(x), self.pos(f)) {
            NONE => None,
            c => Some(self.carrier[c as usize]),
        }
    }

    /// The stored binary product, if `(a, b)` is in the domain.
    pub fn binary_product(&self, a: Label, b: Label) -> Option<Label> {
        match self.bin(self.pos(a), self.pos(b)) {
            NONE => None,
            c => Some(self.carrier[c as usize]),
        }
    }

    fn conj_local(&self, f: u32, x: u8) -> u8 {
        self.conj[f as usize * self.s.order() + x as usize]
    }

    /// `x^f` for `x ∈ S_f` (local indices of `S`).
    pub fn conj_s(&self, x: u8, f: Label) -> Option<u8> {
        match self.conj_local(self.pos(f), x) {
            UNDEF => None,
            y => Some(y),
        }
    }

    fn chain_map(&self, word: &[u32]) -> Vec<u8> {
        let mut map: Vec<u8> = (0..self.s.order() as u8).collect();
        for &f in word {
            for y in map.iter_mut() {
                if *y != UNDEF {
                    *y = self.conj_local(f, *y);
                }
            }
        }
        map
    }

    fn chain_domain(&self, word: &[u32]) -> Mask {
        map_domain(&self.chain_map(word))
    }

    fn positions(&self, w: &[Label]) -> Vec<u32> {
        w.iter().map(|&f| self.pos(f)).collect()
    }

    pub fn s_of(&self, f: Label) -> Mask {
        self.s_f[self.pos(f) as usize]
    }

    /// `S_w`: elements of `S` carried through `w` by a chain inside `S`.
    pub fn s_of_word(&self, w: &[Label]) -> Mask {
        self.chain_domain(&self.positions(w))
    }

    pub fn in_domain(&self, w: &[Label]) -> bool {
        self.delta.contains(self.s_of_word(w))
    }

    /// `Π(w)`, the left fold of the binary product over a domain word.
    pub fn product(&self, w: &[Label]) -> Result<Label> {
        let s_w = self.s_of_word(w);
        if !self.delta.contains(s_w) {
            return Err(Error::Domain { s_w: self.s.labels_of(s_w) });
        }
        let mut acc = self.identity;
        for (step, &f) in w.iter().enumerate() {
            acc = self.bin(acc, self.pos(f));
            if acc == NONE {
                return Err(Error::InconsistentProduct { step });
            }
        }
        Ok(self.carrier[acc as usize])
    }

    /// `N_L(P) = {f : P ≤ S_f, P^f = P}`.
    pub fn normalizer_of(&self, p: Mask) -> Vec<Label> {
        (0..self.size() as u32)
            .filter(|&f| {
                let sf = self.s_f[f as usize];
                p & !sf == 0 && bits(p).fold(0, |acc, x| acc | bit(self.conj_local(f, x))) == p
            })
            .map(|f| self.carrier[f as usize])
            .collect()
    }

    /// Checks the locality axioms exhaustively on words of length up to `max_len`.
    pub fn validate(&self, max_len: usize) -> ValidationReport {
        let n = self.size();
        let m = self.s.order();
        let s = &self.s;
        let mut checks = Vec::new();
        let push = |checks: &mut Vec<Check>, name, witness: Option<Vec<Label>>| {
            checks.push(Check { name, passed: witness.is_none(), witness })
        };
        let full = s.full();

        push(&mut checks, "delta_contains_S", (!self.delta.contains(full)).then(|| s.labels_of(full)));
        let shape = self.delta.non_subgroup(s).or_else(|| self.delta.missing_overgroup(s));
        push(&mut checks, "delta_overgroup_closed", shape.map(|h| s.labels_of(h)));
        let conj_bad = (0..n as u32).find_map(|f| {
            self.delta.members().find_map(|q| {
                let sf = self.s_f[f as usize];
                if q & !sf != 0 {
                    return None;
                }
                let img = bits(q).fold(0, |acc, x| acc | bit(self.conj_local(f, x)));
                (!self.delta.contains(img)).then(|| vec![self.carrier[f as usize]])
            })
        });
        push(&mut checks, "delta_conjugation_closed", conj_bad);
        let sf_bad = (0..n).find(|&f| !self.delta.contains(self.s_f[f])).map(|f| vec![self.carrier[f]]);
        push(&mut checks, "S_f_in_delta", sf_bad);

        let e = self.identity;
        let id_bad = (0..n as u32).find(|&f| {
            self.bin(f, e) != f
                || self.bin(e, f) != f
                || (0..m as u8).any(|x| self.conj_local(e, x) != x)
                || self.inverse[e as usize] != e
        });
        push(&mut checks, "identity_laws", id_bad.map(|f| vec![self.carrier[f as usize]]));
        let inv_bad = (0..n as u32).find(|&f| {
            let g = self.inverse[f as usize];
            if self.inverse[g as usize] != f || self.bin(g, f) != e || self.bin(f, g) != e {
                return true;
            }
            // c_{f^-1} inverts c_f on S_f
            (0..m as u8).any(|x| {
                let y = self.conj_local(f, x);
                y != UNDEF && self.conj_local(g, y) != x
            })
        });
        push(&mut checks, "inversion_laws", inv_bad.map(|f| vec![self.carrier[f as usize]]));

        let pair_bad = exec::find_first(n, |a| {
            (0..n as u32).find_map(|b| {
                let in_d = self.delta.contains(self.chain_domain(&[a as u32, b]));
                (in_d != (self.bin(a as u32, b) != NONE)).then(|| vec![self.carrier[a], self.carrier[b as usize]])
            })
        })
        .map(|(_, w)| w);

        let maximal_bad = self.s_maximality_witness();

        let per_letter = exec::map_range(n, |first| {
            let mut acc = WordFindings::default();
            if max_len > 0 {
                let mut dfs = WordDfs::new(self, max_len);
                dfs.run(first as u32, &mut acc);
            }
            acc
        });
        let mut words = WordFindings::default();
        for f in per_letter {
            words.merge(f);
        }
        let to_labels = |w: Option<Vec<u32>>| w.map(|w| w.iter().map(|&p| self.carrier[p as usize]).collect());
        let objectivity = pair_bad.or_else(|| to_labels(words.objectivity));
        push(&mut checks, "objectivity_E1", objectivity);
        push(&mut checks, "word_inversion", to_labels(words.inversion));
        push(&mut checks, "conjugation_E2", to_labels(words.e2));
        push(&mut checks, "identity_append_E3", to_labels(words.e3));
        push(&mut checks, "associativity", to_labels(words.assoc));
        push(&mut checks, "S_maximal", maximal_bad);

        ValidationReport { max_word_length: max_len, words_checked: words.count, bounded_check_only: true, checks }
    }

    /// `S` is maximal among p-subgroups iff it is Sylow in the group `N_L(S)`.
    fn s_maximality_witness(&self) -> Option<Vec<Label>> {
        let full = self.s.full();
        let nl: Vec<u32> = self.normalizer_of(full).iter().map(|&f| self.pos(f)).collect();
        for &a in &nl {
            for &b in &nl {
                let c = self.bin(a, b);
                if c == NONE || !nl.contains(&c) {
                    return Some(vec![self.carrier[a as usize], self.carrier[b as usize]]);
                }
            }
        }
        (p_part(nl.len() as u64, self.p) != self.s.order() as u64)
            .then(|| nl.iter().map(|&f| self.carrier[f as usize]).collect())
    }

    /// Sub-locality on the carrier positions kept by `keep`, with object set `delta`.
    fn sub(&self, keep: impl Fn(u32) -> bool, delta: ObjectSet) -> Result<Locality> {
        let old: Vec<u32> = (0..self.size() as u32).filter(|&f| keep(f)).collect();
        let n = old.len();
        let mut new_pos = vec![NONE; self.size()];
        for (i, &f) in old.iter().enumerate() {
            new_pos[f as usize] = i as u32;
        }
        let m = self.s.order();
        let carrier: Vec<Label> = old.iter().map(|&f| self.carrier[f as usize]).collect();
        let mut product = vec![NONE; n * n];
        for (i, &a) in old.iter().enumerate() {
            for (j, &b) in old.iter().enumerate() {
                let c = self.bin(a, b);
                if c != NONE && delta.contains(self.chain_domain(&[a, b])) {
                    if new_pos[c as usize] == NONE {
                        return Err(Error::Precondition(format!(
                            "product {}·{} leaves the sub-carrier",
                            self.carrier[a as usize], self.carrier[b as usize]
                        )));
                    }
                    product[i * n + j] = new_pos[c as usize];
                }
            }
        }
        let mut conj = Vec::with_capacity(n * m);
        for &f in &old {
            conj.extend_from_slice(&self.conj[f as usize * m..(f as usize + 1) * m]);
        }
        let remap = |f: u32| -> Result<u32> {
            match new_pos[f as usize] {
                NONE => Err(Error::Precondition(format!("{} dropped from sub-carrier", self.carrier[f as usize]))),
                x => Ok(x),
            }
        };
        Ok(Locality {
            p: self.p,
            pos_of: carrier.iter().enumerate().map(|(i, &l)| (l, i as u32)).collect(),
            carrier,
            identity: remap(self.identity)?,
            inverse: old.iter().map(|&f| remap(self.inverse[f as usize])).collect::<Result<_>>()?,
            product,
            s: self.s.clone(),
            s_pos: self.s_pos.iter().map(|&f| remap(f)).collect::<Result<_>>()?,
            conj,
            s_f: old.iter().map(|&f| self.s_f[f as usize]).collect(),
            delta,
            realization: self.realization.clone(),
            elem_conj: OnceLock::new(),
        })
    }

    /// The restriction `L|_Δ'`: carrier `{f : S_f ∈ Δ'}`, domain `{w : S_w ∈ Δ'}`.
    pub fn restriction(&self, delta: ObjectSet) -> Result<Locality> {
        if let Some(h) = delta.members().find(|&h| !self.delta.contains(h)) {
            return Err(Error::Precondition(format!("{:?} is not in the object set", self.s.labels_of(h))));
        }
        check_delta_shape(&self.s, &delta)?;
        for f in 0..self.size() as u32 {
            for q in delta.members() {
                if q & !self.s_f[f as usize] == 0 {
                    let img = bits(q).fold(0, |acc, x| acc | bit(self.conj_local(f, x)));
                    if !delta.contains(img) {
                        return Err(Error::Precondition(format!(
                            "object set not closed under F_S(L)-conjugacy at {:?}",
                            self.s.labels_of(q)
                        )));
                    }
                }
            }
        }
        let keep: Vec<bool> = self.s_f.iter().map(|&sf| delta.contains(sf)).collect();
        self.sub(|f| keep[f as usize], delta)
    }

    /// `T` strongly closed in `F_S(L)`: no `c_f` moves an element of `T` out of `T`.
    pub fn is_strongly_closed(&self, t: Mask) -> bool {
        (0..self.size() as u32).all(|f| {
            bits(t & self.s_f[f as usize]).all(|x| t & bit(self.conj_local(f, x)) != 0)
        })
    }

    /// `(N_L(T), Δ, S)` for `T` strongly closed in `F_S(L)`.
    pub fn normalizer_locality(&self, t: Mask) -> Result<Locality> {
        if t & !self.s.full() != 0 || !self.s.is_subgroup(t) {
            return Err(Error::Precondition("T is not a subgroup of S".into()));
        }
        if !self.is_strongly_closed(t) {
            return Err(Error::Precondition(format!("{:?} is not strongly closed", self.s.labels_of(t))));
        }
        let keep: BTreeSet<Label> = self.normalizer_of(t).into_iter().collect();
        self.sub(|f| keep.contains(&self.carrier[f as usize]), self.delta.clone())
    }

    /// `F_{S∩H}(H)`: generated by `c_h` on subgroups of `S_h ∩ H`.
    pub fn fusion_of(&self, h: &[Label]) -> Result<FusionSystem> {
        self.fusion_of_capped(h, crate::fusion::DEFAULT_MORPHISM_CAP)
    }

    /// [`Self::fusion_of`] with an explicit morphism cap.
    pub fn fusion_of_capped(&self, h: &[Label], cap: usize) -> Result<FusionSystem> {
        let members: BTreeSet<Label> = h.iter().copied().collect();
        let base = self.s.mask_of_labels(self.s_labels().iter().copied().filter(|l| members.contains(l))).unwrap_or(0);
        if !self.s.is_subgroup(base) {
            return Err(Error::Precondition("S ∩ H is not a subgroup".into()));
        }
        let m = self.s.order();
        let mut gens = Vec::new();
        for &f in &members {
            let fp = self.pos(f);
            let dom = self.s_f[fp as usize] & base;
            let mut map = vec![UNDEF; m];
            let mut src = 0;
            for x in bits(dom) {
                let y = self.conj_local(fp, x);
                if base & bit(y) != 0 {
                    map[x as usize] = y;
                    src |= bit(x);
                }
            }
            for (x, y) in map.iter_mut().enumerate() {
                if src & bit(x as u8) == 0 {
                    *y = UNDEF;
                }
            }
            gens.push(Morphism::new(src, map));
        }
        FusionSystem::close_capped(self.s.clone(), base, gens, cap)
    }

    /// `F_S(L)`.
    pub fn fusion_system(&self) -> Result<FusionSystem> {
        self.fusion_of(&self.carrier)
    }

    /// `N_L(P)` as a permutation group (right regular action), if it is a group.
    pub fn normalizer_group(&self, p: Mask) -> Option<FiniteGroup> {
        let nl: Vec<u32> = self.normalizer_of(p).iter().map(|&f| self.pos(f)).collect();
        let idx: HashMap<u32, u32> = nl.iter().enumerate().map(|(i, &f)| (f, i as u32)).collect();
        let mut perms = Vec::with_capacity(nl.len());
        for &g in &nl {
            let mut images = Vec::with_capacity(nl.len());
            for &x in &nl {
                images.push(*idx.get(&self.bin(x, g))?);
            }
            perms.push(Perm::from_images(images)?);
        }
        let grp = FiniteGroup::from_generators(perms, nl.len()).ok()?;
        (grp.order() == nl.len()).then_some(grp)
    }

    /// Linking locality: `F_S(L)` saturated, `F^cr ⊆ Δ`, each `N_L(P)` a group of characteristic p.
    pub fn is_linking_locality(&self) -> Result<LinkingReport> {
        let f = self.fusion_system()?;
        let saturated = f.is_saturated();
        let missing = self
            .s
            .subgroups()
            .iter()
            .copied()
            .find(|&q| !self.delta.contains(q) && f.is_centric_radical(q));
        let bad = self.delta.members().find(|&q| match self.normalizer_group(q) {
            Some(g) => !g.is_characteristic_p(self.p),
            None => true,
        });
        Ok(LinkingReport {
            saturated,
            centric_radical_in_delta: missing.is_none(),
            missing_centric_radical: missing.map(|q| self.s.labels_of(q)),
            normalizers_char_p: bad.is_none(),
            bad_normalizer_of: bad.map(|q| self.s.labels_of(q)),
        })
    }
}

fn map_domain(map: &[u8]) -> Mask {
    map.iter().enumerate().filter(|(_, &y)| y != UNDEF).fold(0, |acc, (x, _)| acc | bit(x as u8))
}

fn check_delta_shape(s: &PGroup, delta: &ObjectSet) -> Result<()> {
    if let Some(h) = delta.non_subgroup(s) {
        return Err(Error::Precondition(format!("{:?} is not a subgroup of S", s.labels_of(h))));
    }
    if !delta.contains(s.full()) {
        return Err(Error::Precondition("S is not in the object set".into()));
    }
    if let Some(h) = delta.missing_overgroup(s) {
        return Err(Error::Precondition(format!(
            "object set not overgroup-closed: missing {:?}",
            s.labels_of(h)
        )));
    }
    Ok(())
}

/// First witnesses (as position words) of word-level axiom failures.
#[derive(Default)]
struct WordFindings {
    count: u64,
    objectivity: Option<Vec<u32>>,
    inversion: Option<Vec<u32>>,
    e2: Option<Vec<u32>>,
    e3: Option<Vec<u32>>,
    assoc: Option<Vec<u32>>,
}

impl WordFindings {
    fn merge(&mut self, other: WordFindings) {
        self.count += other.count;
        for (mine, theirs) in [
            (&mut self.objectivity, other.objectivity),
            (&mut self.inversion, other.inversion),
            (&mut self.e2, other.e2),
            (&mut self.e3, other.e3),
            (&mut self.assoc, other.assoc),
        ] {
            if mine.is_none() {
                *mine = theirs;
            }
        }
    }
}

/// Depth-first walk over domain words. A word outside `D` has no extension in
/// `D` (`S_{w∘f} ≤ S_w` and `Δ` is overgroup-closed), so only domain words are
/// visited. Prefix and suffix products are carried along the walk.
struct WordDfs<'a> {
    loc: &'a Locality,
    max_len: usize,
    word: Vec<u32>,
    maps: Vec<Vec<u8>>,
    prefix: Vec<u32>,
    suffix: Vec<Vec<u32>>,
}

impl<'a> WordDfs<'a> {
    fn new(loc: &'a Locality, max_len: usize) -> Self {
        let m = loc.s.order();
        WordDfs {
            loc,
            max_len,
            word: Vec::with_capacity(max_len),
            maps: vec![(0..m as u8).collect()],
            prefix: vec![loc.identity],
            suffix: vec![Vec::new()],
        }
    }

    fn run(&mut self, first: u32, acc: &mut WordFindings) {
        self.visit(first, acc);
    }

    fn visit(&mut self, f: u32, acc: &mut WordFindings) {
        let loc = self.loc;
        let d = self.word.len();
        let map: Vec<u8> = self.maps[d]
            .iter()
            .map(|&y| if y == UNDEF { UNDEF } else { loc.conj_local(f, y) })
            .collect();
        let s_w = map_domain(&map);
        if !loc.delta.contains(s_w) {
            return;
        }
        self.word.push(f);
        acc.count += 1;
        let word_now = || self.word.clone();

        let prev = self.prefix[d];
        let prod = if prev == NONE { NONE } else { loc.bin(prev, f) };
        let mut suffix: Vec<u32> = self.suffix[d]
            .iter()
            .map(|&v| if v == NONE { NONE } else { loc.bin(v, f) })
            .collect();
        suffix.push(f);
        if prod == NONE || suffix.contains(&NONE) {
            acc.objectivity.get_or_insert_with(word_now);
        } else {
            // Conjugation: the chain map agrees with c_{Π(w)} on S_w
            let sp = loc.s_f[prod as usize];
            let e2_ok = s_w & !sp == 0
                && bits(s_w).all(|x| loc.conj_local(prod, x) == map[x as usize]);
            if !e2_ok {
                acc.e2.get_or_insert_with(word_now);
            }
            // Identity: w∘(1) ∈ D with the same product
            let e = loc.identity;
            let with_one = map.iter().map(|&y| if y == UNDEF { UNDEF } else { loc.conj_local(e, y) });
            if map_domain(&with_one.collect::<Vec<_>>()) != s_w || loc.bin(prod, e) != prod {
                acc.e3.get_or_insert_with(word_now);
            }
            // w^-1 ∘ w ∈ D with product 1
            let inv_word: Vec<u32> =
                self.word.iter().rev().map(|&g| loc.inverse[g as usize]).chain(self.word.iter().copied()).collect();
            let inv_ok = loc.delta.contains(loc.chain_domain(&inv_word)) && {
                let mut a = e;
                inv_word.iter().all(|&g| {
                    a = loc.bin(a, g);
                    a != NONE
                }) && a == e
            };
            if !inv_ok {
                acc.inversion.get_or_insert_with(word_now);
            }
            // every bracketing: Π(u)·Π(v) = Π(u∘v)
            for i in 1..d {
                if loc.bin(self.prefix[i], suffix[i]) != prod {
                    acc.assoc.get_or_insert_with(word_now);
                    break;
                }
            }
        }

        if self.word.len() < self.max_len {
            self.maps.push(map);
            self.prefix.push(prod);
            self.suffix.push(suffix);
            for g in 0..loc.size() as u32 {
                self.visit(g, acc);
            }
            self.maps.pop();
            self.prefix.pop();
            self.suffix.pop();
        }
        self.word.pop();
    }
}
