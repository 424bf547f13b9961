//! Bundled example groups and localities.

use std::sync::Arc;

use crate::error::Result;
use crate::fusion::FusionSystem;
use crate::group::{FiniteGroup, Perm, Subgroup};
use crate::locality::{Locality, ObjectSet, DEFAULT_MAX_WORD_LENGTH};
use crate::partial::ElementSet;

fn perm(n: usize, cycles: &[&[u32]]) -> Perm {
    Perm::from_cycles(n, cycles)
}

/// The group generated by permutations given in 1-indexed cycle notation.
pub fn group(n: usize, gens: &[&[&[u32]]]) -> FiniteGroup {
    FiniteGroup::from_generators(gens.iter().map(|c| perm(n, c)).collect(), n).expect("bundled group")
}

pub fn symmetric(n: usize) -> FiniteGroup {
    let long: Vec<u32> = (1..=n as u32).collect();
    group(n, &[&[&[1, 2]], &[&long]])
}

pub fn alternating(n: usize) -> FiniteGroup {
    let gens: Vec<Perm> = (3..=n as u32).map(|k| perm(n, &[&[1, 2, k]])).collect();
    FiniteGroup::from_generators(gens, n).expect("bundled group")
}

/// Subgroup of `g` generated by cycle-notation permutations.
pub fn subgroup(g: &FiniteGroup, gens: &[&[&[u32]]]) -> Subgroup {
    let ids: Vec<u32> = gens
        .iter()
        .map(|c| g.id_of(&perm(g.degree(), c)).expect("generator lies in the group"))
        .collect();
    g.generated(&ids)
}

/// The dihedral Sylow 2-subgroup `⟨(1 2 3 4), (1 3)⟩` of `S_n`, `n ≥ 4`.
pub fn d8_in(g: &FiniteGroup) -> Subgroup {
    subgroup(g, &[&[&[1, 2, 3, 4]], &[&[1, 3]]])
}

/// The Klein four-group of double transpositions on `{1,2,3,4}`.
pub fn v4_in(g: &FiniteGroup) -> Subgroup {
    subgroup(g, &[&[&[1, 2], &[3, 4]], &[&[1, 3], &[2, 4]]])
}

/// `S_n` with `S = D8` and `Δ = {P ≤ S : |P| ≥ min_order}`.
pub fn symmetric_locality(n: usize, min_order: usize, validate_len: usize) -> Result<Locality> {
    let g = Arc::new(symmetric(n));
    let s = d8_in(&g);
    let pg = crate::pgroup::PGroup::new(2, s.elements().to_vec(), |a, b| g.mul(a, b))?;
    let delta = ObjectSet::min_order(&pg, min_order);
    Locality::from_group(g, 2, &s, delta, validate_len)
}

/// The order-24 instance: `S_4`, `Δ = {|P| ≥ 4}`.
pub fn s4_locality() -> Locality {
    symmetric_locality(4, 4, DEFAULT_MAX_WORD_LENGTH).expect("bundled locality")
}

/// The order-120 instance: `S_5`, `Δ = {|P| ≥ 4}`.
pub fn s5_locality() -> Locality {
    symmetric_locality(5, 4, 3).expect("bundled locality")
}

/// `G` as a locality with `Δ` = every subgroup of `S`.
pub fn full_locality(g: Arc<FiniteGroup>, p: u64, s: &Subgroup, validate_len: usize) -> Result<Locality> {
    let pg = crate::pgroup::PGroup::new(p, s.elements().to_vec(), |a, b| g.mul(a, b))?;
    let delta = ObjectSet::all(&pg);
    Locality::from_group(g, p, s, delta, validate_len)
}

/// Data for a product `ED` with a group oracle `F_{TR}(MK)`.
#[derive(Clone, Debug)]
pub struct ProductInstance {
    pub name: &'static str,
    pub locality: Locality,
    /// `M ⊴ G` with `E = F_T(M)`.
    pub m: Subgroup,
    /// `K ⊴ N_G(T)` with `D = F_R(K)`.
    pub k: Subgroup,
    pub f: FusionSystem,
    pub e: FusionSystem,
    pub d: FusionSystem,
}

impl ProductInstance {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.locality.realization().expect("group-realized")
    }

    pub fn n_set(&self) -> ElementSet {
        self.m.elements().iter().copied().collect()
    }

    pub fn k_set(&self) -> ElementSet {
        self.k.elements().iter().copied().collect()
    }

    /// `F_{TR}(MK)` computed in the group.
    pub fn oracle(&self) -> FusionSystem {
        let g = self.group();
        let mut gens = self.m.elements().to_vec();
        gens.extend_from_slice(self.k.elements());
        let mk = g.generated(&gens);
        FusionSystem::of_subgroup_in(g, &mk, self.locality.s_group().clone()).expect("oracle system")
    }
}

fn product_instance(name: &'static str, g: FiniteGroup, m: Subgroup, k: Subgroup) -> ProductInstance {
    let g = Arc::new(g);
    let s = d8_times(&g);
    let locality = full_locality(g, 2, &s, 3).expect("bundled locality");
    let f = locality.fusion_system().expect("F");
    let e = locality.fusion_of(m.elements()).expect("E");
    let d = locality.fusion_of(k.elements()).expect("D");
    ProductInstance { name, locality, m, k, f, e, d }
}

/// Sylow 2-subgroup: `D8` on `{1..4}`, times `⟨(5 6)⟩` when the degree is 6.
fn d8_times(g: &FiniteGroup) -> Subgroup {
    if g.degree() == 6 {
        subgroup(g, &[&[&[1, 2, 3, 4]], &[&[1, 3]], &[&[5, 6]]])
    } else {
        d8_in(g)
    }
}

/// `S4 × C2` on six points.
pub fn s4_times_c2() -> FiniteGroup {
    group(6, &[&[&[1, 2]], &[&[1, 2, 3, 4]], &[&[5, 6]]])
}

/// `S4 × C3` on seven points; not of characteristic 2.
pub fn s4_times_c3() -> FiniteGroup {
    group(7, &[&[&[1, 2]], &[&[1, 2, 3, 4]], &[&[5, 6, 7]]])
}

/// The three product instances: `D = F_T(T)`, `D = F`, and the `S4 × C2` case.
pub fn product_instances() -> Vec<ProductInstance> {
    let s4 = symmetric(4);
    let a4 = subgroup(&s4, &[&[&[1, 2, 3]], &[&[1, 2], &[3, 4]]]);
    let v = v4_in(&s4);
    let whole = s4.whole();
    let g2 = s4_times_c2();
    let a4x1 = subgroup(&g2, &[&[&[1, 2, 3]], &[&[1, 2], &[3, 4]]]);
    let c2 = subgroup(&g2, &[&[&[5, 6]]]);
    vec![
        product_instance("s4_inner_T", s4.clone(), a4.clone(), v),
        product_instance("s4_full", s4, a4, whole),
        product_instance("s4xc2_central", g2, a4x1, c2),
    ]
}
