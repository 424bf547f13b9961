mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use fusion_locality::fusion::{FusionSystem, Morphism, Verdict, DEFAULT_SUBSYSTEM_CAP};
use fusion_locality::group::{FiniteGroup, Subgroup};
use fusion_locality::instances::{self, d8_in, s4_locality, symmetric, v4_in};
use fusion_locality::pgroup::{popcount, Mask, PGroup};

fn pgroup(g: &FiniteGroup, s: &Subgroup) -> Arc<PGroup> {
    Arc::new(PGroup::new(2, s.elements().to_vec(), |a, b| g.mul(a, b)).unwrap())
}

fn s4_system() -> (FiniteGroup, Subgroup, FusionSystem) {
    let g = symmetric(4);
    let s = d8_in(&g);
    let f = FusionSystem::of_group(&g, &s).unwrap();
    (g, s, f)
}

fn mask(f: &FusionSystem, sub: &Subgroup) -> Mask {
    f.s().mask_of_labels(sub.elements().iter().copied()).unwrap()
}

#[test]
fn group_system_matches_the_conjugation_oracle() {
    let (g, s, f) = s4_system();
    let elems: Vec<u32> = (0..g.order() as u32).collect();
    assert_eq!(common::all_homs(&f), common::conjugation_homs(&g, &elems, f.s(), f.s().full()));
    assert!(f.audit().is_ok());
    // Generating from all conjugation maps gives the same system.
    let gens = common::conjugation_homs(&g, &elems, f.s(), f.s().full()).into_iter().collect();
    let closed = FusionSystem::close(pgroup(&g, &s), f.s().full(), gens).unwrap();
    assert_eq!(closed, f);
}

#[test]
fn closing_nothing_gives_inner_fusion() {
    let (g, s, _) = s4_system();
    let pg = pgroup(&g, &s);
    let inner = FusionSystem::close(pg.clone(), pg.full(), Vec::new()).unwrap();
    assert_eq!(inner, FusionSystem::of_subgroup_in(&g, &s, pg.clone()).unwrap());
    assert_eq!(common::all_homs(&inner), common::conjugation_homs(&g, s.elements(), &pg, pg.full()));
    assert!(inner.audit().is_ok());
}

#[test]
fn closure_adds_inverses_and_restrictions() {
    let g = symmetric(4);
    let v = v4_in(&g);
    let pg = pgroup(&g, &v);
    // An automorphism of V of order 3: it generates the fusion of A4.
    let cycle = Morphism::new(pg.full(), vec![0, 2, 3, 1]);
    let f = FusionSystem::close(pg.clone(), pg.full(), vec![cycle.clone()]).unwrap();
    assert!(f.contains(&cycle.inverse()));
    assert_eq!(f.aut(pg.full()).len(), 3);
    assert!(f.audit().is_ok());
    let a4 = instances::subgroup(&g, &[&[&[1, 2, 3]], &[&[1, 2], &[3, 4]]]);
    assert_eq!(f, FusionSystem::of_subgroup_in(&g, &a4, pg).unwrap());
    assert!(f.is_saturated());
}

#[test]
fn an_involution_on_the_four_group_is_not_saturated() {
    let g = symmetric(4);
    let v = v4_in(&g);
    let pg = pgroup(&g, &v);
    let swap = Morphism::new(pg.full(), vec![0, 2, 1, 3]);
    let f = FusionSystem::close(pg.clone(), pg.full(), vec![swap]).unwrap();
    assert!(f.audit().is_ok());
    assert!(!f.is_fully_automized(pg.full()));
    assert!(!f.is_saturated());
    assert_eq!(f.saturation_witness(), Some(pg.full()));
}

#[test]
fn sylow_systems_of_bundled_groups_are_saturated() {
    let d8 = {
        let s4 = symmetric(4);
        s4.subgroup_as_group(&d8_in(&s4))
    };
    let groups = [d8, symmetric(4), instances::s4_times_c2(), instances::alternating(5), symmetric(5)];
    let orders: Vec<usize> = groups.iter().map(FiniteGroup::order).collect();
    assert_eq!(orders, vec![8, 24, 48, 60, 120]);
    for g in &groups {
        let f = FusionSystem::of_group(g, &g.sylow_subgroup(2)).unwrap();
        assert!(f.is_saturated(), "order {}", g.order());
        assert!(f.audit().is_ok());
    }
}

#[test]
fn centric_and_radical_subgroups_of_s4() {
    let (g, _, f) = s4_system();
    let s = f.s().clone();
    let centric: Vec<usize> = f.subgroups().into_iter().filter(|&p| f.is_centric(p)).map(popcount).collect();
    // V, the other four-group, C4, and S.
    assert_eq!(centric.iter().filter(|&&n| n == 4).count(), 3);
    assert_eq!(centric.iter().filter(|&&n| n == 8).count(), 1);
    assert_eq!(centric.len(), 4);
    let cr: Vec<Mask> = f.subgroups().into_iter().filter(|&p| f.is_centric_radical(p)).collect();
    assert_eq!(cr, vec![mask(&f, &v4_in(&g)), s.full()]);
    // Every subgroup is subcentric: S4 has characteristic 2 locally.
    assert_eq!(f.subcentric_subgroups().len(), s.subgroups().len());
}

#[test]
fn strongly_closed_subgroups_and_normalizers() {
    let (g, _, f) = s4_system();
    let s = f.s().clone();
    let v = mask(&f, &v4_in(&g));
    let closed: Vec<Mask> = f.subgroups().into_iter().filter(|&p| f.is_strongly_closed(p)).collect();
    assert_eq!(closed, vec![s.trivial(), v, s.full()]);
    assert_eq!(f.normalizer_system(v).unwrap(), f);
    assert!(f.normalizer_system(s.center(s.full())).is_err());
    assert!(f.is_normal_subgroup(v));
    assert_eq!(f.o_p(), v);
    // N_F(S) is the fusion of S itself.
    let ns = f.normalizer_system(s.full()).unwrap();
    assert_eq!(ns, FusionSystem::close(s.clone(), s.full(), Vec::new()).unwrap());
}

/// `{F_{S∩M}(M)}` for the given subgroups `M`, deduplicated.
fn systems_of(g: &FiniteGroup, pg: &Arc<PGroup>, subs: impl IntoIterator<Item = Subgroup>) -> BTreeSet<Vec<Morphism>> {
    subs.into_iter()
        .map(|m| {
            let f = FusionSystem::of_subgroup_in(g, &m, pg.clone()).unwrap();
            common::all_homs(&f).into_iter().collect()
        })
        .collect()
}

fn as_sets(fs: &[FusionSystem]) -> BTreeSet<Vec<Morphism>> {
    fs.iter().map(|f| common::all_homs(f).into_iter().collect()).collect()
}

#[test]
fn normal_subsystems_come_from_normal_subgroups() {
    let (g, s, f) = s4_system();
    let pg = pgroup(&g, &s);
    let Verdict::Yes(found) = f.normal_subsystems(None, DEFAULT_SUBSYSTEM_CAP) else { panic!("enumeration capped") };
    assert_eq!(found.len(), 4);
    let normals = g.all_subgroups().unwrap().into_iter().filter(|h| g.is_normal(h));
    assert_eq!(as_sets(&found), systems_of(&g, &pg, normals));
    for e in &found {
        assert!(f.is_normal_subsystem(e));
        assert!(f.is_strongly_closed(e.base()));
    }
}

#[test]
fn subnormal_subsystems_come_from_subnormal_subgroups() {
    let (g, s, f) = s4_system();
    let pg = pgroup(&g, &s);
    let Verdict::Yes(found) = f.subnormal_subsystems(DEFAULT_SUBSYSTEM_CAP) else { panic!("enumeration capped") };
    assert_eq!(found.len(), 7);
    assert_eq!(as_sets(&found), systems_of(&g, &pg, common::subnormal_subgroups(&g)));
}

#[test]
fn subnormal_chain_of_a_central_involution() {
    let (g, s, f) = s4_system();
    let pg = pgroup(&g, &s);
    let z = instances::subgroup(&g, &[&[&[1, 3], &[2, 4]]]);
    let fz = FusionSystem::of_subgroup_in(&g, &z, pg).unwrap();
    assert!(!f.is_normal_subsystem(&fz));
    assert_eq!(f.normality_failure(&fz), Some("strongly_closed"));
    let Verdict::Yes(chain) = f.is_subnormal_subsystem(&fz, DEFAULT_SUBSYSTEM_CAP) else { panic!("not subnormal") };
    // F_Z(Z) ⊴ F_V(V) ⊴ F: the four-group is normal in S4 and abelian.
    assert_eq!(chain.len(), 3);
    assert_eq!(chain.first(), Some(&fz));
    assert_eq!(chain.last(), Some(&f));
    for w in chain.windows(2) {
        assert!(w[1].is_normal_subsystem(&w[0]));
    }
    assert_eq!(f.is_subnormal_subsystem(&f, 10), Verdict::Yes(vec![f.clone()]));
}

#[test]
fn non_subnormal_subsystem() {
    let (g, s, f) = s4_system();
    let pg = pgroup(&g, &s);
    // F_S(S) is not subnormal in the fusion of S4.
    let fs = FusionSystem::of_subgroup_in(&g, &s, pg).unwrap();
    assert_eq!(f.normality_failure(&fs), Some("invariant"));
    assert_eq!(f.is_subnormal_subsystem(&fs, DEFAULT_SUBSYSTEM_CAP), Verdict::No);
}

#[test]
fn fusion_of_the_carrier_equals_the_group_system() {
    let l = s4_locality();
    let (_, _, f) = s4_system();
    assert_eq!(l.fusion_system().unwrap(), f);
}

#[test]
fn morphism_cap_is_reported() {
    let l = s4_locality();
    assert!(matches!(
        l.fusion_of_capped(l.carrier(), 5),
        Err(fusion_locality::Error::CapExceeded { .. })
    ));
}

#[test]
fn json_export_is_deterministic() {
    let (_, _, f) = s4_system();
    let a = serde_json::to_string(&f.to_json()).unwrap();
    let b = serde_json::to_string(&s4_locality().fusion_system().unwrap().to_json()).unwrap();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["p"], 2);
    assert_eq!(v["morphisms"].as_array().unwrap().len(), f.morphism_count());
}
