mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use fusion_locality::group::Perm;
use fusion_locality::instances::{self, d8_in, s4_locality, s5_locality, symmetric};
use fusion_locality::locality::{AbstractData, Label, Locality, ObjectSet};
use fusion_locality::pgroup::{popcount, PGroup};
use fusion_locality::Error;

fn id(l: &Locality, n: usize, cycles: &[&[u32]]) -> Label {
    l.realization().unwrap().id_of(&Perm::from_cycles(n, cycles)).unwrap()
}

/// The double transpositions on `{1,2,3,4}` with the identity.
fn four_group(l: &Locality) -> Vec<Label> {
    instances::v4_in(l.realization().unwrap()).elements().to_vec()
}

#[test]
fn carrier_is_the_set_of_elements_with_large_s_f() {
    for (l, n) in [(s4_locality(), 4), (s5_locality(), 5)] {
        let g = l.realization().unwrap().clone();
        let expected: Vec<Label> = (0..g.order() as Label).filter(|&f| common::s_w(&l, &[f]).len() >= 4).collect();
        assert_eq!(l.carrier(), &expected[..], "S{n}");
    }
    // Both carriers are the symmetric group on {1,2,3,4}.
    assert_eq!(s4_locality().size(), 24);
    assert_eq!(s5_locality().size(), 24);
}

#[test]
fn s_of_a_transposition() {
    let l = s4_locality();
    let t = id(&l, 4, &[&[1, 2]]);
    let s = l.s_group();
    let got = s.labels_of(l.s_of(t));
    assert_eq!(got, common::s_w(&l, &[t]));
    // (1 2) normalizes only the double transpositions inside D8.
    assert_eq!(got, four_group(&l));
}

#[test]
fn domain_membership_and_products() {
    // In S5 with every nontrivial subgroup of S as an object, (4 5) lies in the carrier.
    let l = instances::symmetric_locality(5, 2, 2).unwrap();
    let g = l.realization().unwrap().clone();
    let a = id(&l, 5, &[&[4, 5]]);
    let b = id(&l, 5, &[&[1, 2]]);
    assert_eq!(common::s_w(&l, &[a]).len(), 2);
    assert!(l.in_domain(&[a, l.inverse(a)]));
    assert_eq!(l.product(&[a, l.inverse(a)]).unwrap(), l.identity());
    // S_(45) = <(1 3)>, and (1 2) moves (1 3) out of S.
    let w = [a, b];
    assert_eq!(common::s_w(&l, &w).len(), 1);
    assert!(!l.in_domain(&w));
    assert!(matches!(l.product(&w), Err(Error::Domain { .. })));
    assert_eq!(l.binary_product(a, b), None);
    // (1 3) fixes <(1 3)>, so (4 5)(1 3) is a domain word.
    let c = id(&l, 5, &[&[1, 3]]);
    let w = [a, c];
    assert!(l.in_domain(&w));
    assert_eq!(l.product(&w).unwrap(), g.mul(a, c));
}

#[test]
fn bundled_carriers_have_total_domain() {
    // Every S_f contains the normal four-group, so every word is in the domain.
    let l = s5_locality();
    for &a in l.carrier() {
        for &b in l.carrier() {
            assert!(l.in_domain(&[a, b]));
        }
    }
}

#[test]
fn instances_validate_at_length_four() {
    for l in [s4_locality(), s5_locality()] {
        let r = l.validate(4);
        assert!(r.passed(), "{:?}", r.first_failure());
        assert!(r.bounded_check_only);
        assert!(r.words_checked > 0);
    }
}

#[test]
fn missing_product_breaks_objectivity() {
    let l = s4_locality();
    let mut data = l.to_abstract();
    let s: BTreeSet<u32> = data.s.iter().copied().collect();
    let pos = data.products.iter().position(|&(a, b, _)| s.contains(&a) && !s.contains(&b)).unwrap();
    data.products.remove(pos);
    let broken = Locality::from_abstract_unchecked(data.clone()).unwrap();
    let r = broken.validate(3);
    assert!(!r.check("objectivity_E1").unwrap().passed);
    assert!(matches!(Locality::from_abstract(data, 3), Err(Error::Axiom { .. })));
}

#[test]
fn abstract_round_trip_validates() {
    let l = s4_locality();
    let back = Locality::from_abstract(l.to_abstract(), 3).unwrap();
    assert_eq!(back.size(), 24);
    assert!(back.realization().is_none());
    assert_eq!(back.fusion_system().unwrap().morphism_count(), l.fusion_system().unwrap().morphism_count());
}

#[test]
fn object_set_shape_is_enforced() {
    let g = Arc::new(symmetric(4));
    let s = d8_in(&g);
    let pg = PGroup::new(2, s.elements().to_vec(), |a, b| g.mul(a, b)).unwrap();
    let z = pg.center(pg.full());
    let missing_overgroups = ObjectSet::new([z, pg.full()]);
    let err = Locality::from_group_unchecked(g.clone(), 2, &s, missing_overgroups).unwrap_err();
    assert!(matches!(err, Error::Precondition(m) if m.contains("overgroup")));
    let without_s = ObjectSet::new(pg.subgroups().iter().copied().filter(|&h| popcount(h) == 4));
    assert!(Locality::from_group_unchecked(g, 2, &s, without_s).is_err());
}

#[test]
fn restriction_to_s_alone_is_its_normalizer() {
    for l in [s4_locality(), s5_locality()] {
        let s = l.s_group().clone();
        let r = l.restriction(ObjectSet::new([s.full()])).unwrap();
        // N_G(D8) = D8 in both S4 and S5.
        assert_eq!(r.carrier(), l.s_labels());
        assert!(r.validate(4).passed());
    }
}

#[test]
fn restriction_to_the_same_object_set_is_the_identity() {
    let l = s5_locality();
    let r = l.restriction(l.delta().clone()).unwrap();
    assert_eq!(r.carrier(), l.carrier());
    for &a in l.carrier() {
        for &b in l.carrier() {
            assert_eq!(r.binary_product(a, b), l.binary_product(a, b));
        }
    }
}

#[test]
fn restriction_rejects_sets_outside_delta() {
    let l = s4_locality();
    let s = l.s_group();
    let all = ObjectSet::all(s);
    assert!(matches!(l.restriction(all), Err(Error::Precondition(_))));
}

#[test]
fn normalizer_locality_of_v_is_s4() {
    let l = s5_locality();
    let s = l.s_group();
    let v = s.mask_of_labels(four_group(&l)).unwrap();
    assert!(l.is_strongly_closed(v));
    let lt = l.normalizer_locality(v).unwrap();
    let g = l.realization().unwrap();
    let expected: Vec<Label> = (0..g.order() as Label)
        .filter(|&f| l.contains(f) && s.labels_of(v).iter().all(|&x| s.labels_of(v).contains(&g.conj(x, f))))
        .collect();
    assert_eq!(lt.carrier(), &expected[..]);
    assert_eq!(lt.size(), 24);
    // The centre of D8 is not strongly closed: it is fused into V.
    assert!(!l.is_strongly_closed(s.center(s.full())));
    assert!(l.normalizer_locality(s.center(s.full())).is_err());
}

#[test]
fn bundled_instances_are_linking_localities() {
    for l in [s4_locality(), s5_locality()] {
        let r = l.is_linking_locality().unwrap();
        assert!(r.holds(), "{r:?}");
    }
}

#[test]
fn normalizers_of_characteristic_other_than_p_are_detected() {
    let g = Arc::new(instances::s4_times_c3());
    let s = d8_in(&g);
    let l = instances::full_locality(g, 2, &s, 2).unwrap();
    let r = l.is_linking_locality().unwrap();
    assert!(r.saturated);
    assert!(!r.normalizers_char_p);
    assert!(!r.holds());
}

#[test]
fn object_set_without_a_centric_radical_is_detected() {
    // Constructed violation: the S4 tables with the normal four-group removed
    // from the object set. This is not a locality; only the linking check is exercised.
    let l = s4_locality();
    let s = l.s_group();
    let z = s.center(s.full());
    let normal_v = s
        .subgroups()
        .iter()
        .copied()
        .find(|&h| popcount(h) == 4 && h & z == z && l.is_strongly_closed(h) && s.is_normal_in(h, s.full()))
        .unwrap();
    let mut data: AbstractData = l.to_abstract();
    let v_labels: Vec<u32> = s.labels_of(normal_v).iter().map(|x| l.carrier().binary_search(x).unwrap() as u32).collect();
    data.delta.retain(|d| d != &v_labels);
    let bad = Locality::from_abstract_unchecked(data).unwrap();
    let r = bad.is_linking_locality().unwrap();
    assert!(!r.centric_radical_in_delta);
    assert_eq!(r.missing_centric_radical.as_ref().map(Vec::len), Some(4));
}

#[test]
fn sampled_objectivity_is_reproducible() {
    let l = s5_locality();
    let a = l.sample_objectivity(2_000, 6, 11);
    let b = l.sample_objectivity(2_000, 6, 11);
    assert!(a.passed);
    assert_eq!(a.witness, b.witness);
}
