use std::sync::Arc;

use fusion_locality::fusion::{FusionSystem, DEFAULT_SUBSYSTEM_CAP};
use fusion_locality::group::{FiniteGroup, Subgroup};
use fusion_locality::instances::{self, d8_in, s4_locality, symmetric, v4_in};
use fusion_locality::partial::ElementSet;
use fusion_locality::pgroup::PGroup;
use fusion_locality::products::{self, Route, Status, VerifyOptions};
use fusion_locality::Error;

struct S4 {
    g: FiniteGroup,
    pg: Arc<PGroup>,
    f: FusionSystem,
}

impl S4 {
    fn new() -> Self {
        let g = symmetric(4);
        let s = d8_in(&g);
        let pg = Arc::new(PGroup::new(2, s.elements().to_vec(), |a, b| g.mul(a, b)).unwrap());
        let f = FusionSystem::of_subgroup_in(&g, &g.whole(), pg.clone()).unwrap();
        S4 { g, pg, f }
    }

    fn sub(&self, gens: &[&[&[u32]]]) -> Subgroup {
        instances::subgroup(&self.g, gens)
    }

    fn of(&self, h: &Subgroup) -> FusionSystem {
        FusionSystem::of_subgroup_in(&self.g, h, self.pg.clone()).unwrap()
    }

    fn a4(&self) -> Subgroup {
        self.sub(&[&[&[1, 2, 3]], &[&[1, 2], &[3, 4]]])
    }

    fn mask(&self, h: &Subgroup) -> u64 {
        self.pg.mask_of_labels(h.elements().iter().copied()).unwrap()
    }
}

#[test]
fn a_fe_on_the_four_group_is_the_order_three_part() {
    let x = S4::new();
    let e = x.of(&x.a4());
    let v = x.mask(&v4_in(&x.g));
    let a = products::a_fe(&x.f, &e, v);
    assert_eq!(a.len(), 3);
    let mut expected: Vec<_> = e.aut(v).into_iter().cloned().collect();
    expected.sort();
    assert_eq!(a, expected);
    // Aut_F(S) is a 2-group, so only the identity survives.
    assert_eq!(products::a_fe(&x.f, &e, x.pg.full()).len(), 1);
}

#[test]
fn product_with_a_subgroup() {
    let x = S4::new();
    let e = x.of(&x.a4());
    // (ES)_F = F_S(A4 S) = F.
    assert_eq!(products::product_er(&x.f, &e, x.pg.full()).unwrap(), x.f);
    // R inside T changes nothing.
    assert_eq!(products::product_er(&x.f, &e, e.base()).unwrap(), e);
    let not_normal = x.of(&d8_in(&x.g));
    assert!(matches!(products::product_er(&x.f, &not_normal, x.pg.full()), Err(Error::Precondition(_))));
}

#[test]
fn status_of_subsystems_in_the_normalizer() {
    let x = S4::new();
    let nft = x.f.normalizer_system(x.mask(&v4_in(&x.g))).unwrap();
    let z = x.of(&x.sub(&[&[&[1, 3], &[2, 4]]]));
    let s = x.of(&d8_in(&x.g));
    assert_eq!(products::status_in(&nft, &x.of(&v4_in(&x.g)), DEFAULT_SUBSYSTEM_CAP), Status::Normal);
    assert_eq!(products::status_in(&nft, &z, DEFAULT_SUBSYSTEM_CAP), Status::Subnormal);
    assert_eq!(products::status_in(&nft, &s, DEFAULT_SUBSYSTEM_CAP), Status::Fail);
}

#[test]
fn product_ed_preconditions() {
    let x = S4::new();
    let e = x.of(&x.a4());
    let z = x.of(&x.sub(&[&[&[1, 3], &[2, 4]]]));
    assert_eq!(products::product_ed(&x.f, &e, &z), Err(Error::NormalityRequired));
    let d8 = x.of(&d8_in(&x.g));
    assert!(matches!(products::product_ed(&x.f, &d8, &z), Err(Error::Precondition(_))));
    assert!(matches!(products::product_ed(&x.f, &e, &d8), Err(Error::Precondition(_))));
}

#[test]
fn locality_route_handles_subnormal_d() {
    let l = s4_locality();
    let x = S4::new();
    let n: ElementSet = x.a4().elements().iter().copied().collect();
    let z: ElementSet = x.sub(&[&[&[1, 3], &[2, 4]]]).elements().iter().copied().collect();
    let via = products::product_ed_via_locality(&l, &n, &z).unwrap();
    assert_eq!(via.nk, n);
    assert_eq!(via.system, x.of(&x.a4()));
    assert!(via.linking_locality);
    // Δ = {|P| ≥ 4} omits subcentric subgroups of order 2.
    assert!(!via.delta_contains_subcentrics);
    let t: ElementSet = x.sub(&[&[&[1, 2]]]).elements().iter().copied().collect();
    assert!(matches!(products::product_ed_via_locality(&l, &n, &t), Err(Error::Precondition(_))));
    assert!(matches!(products::product_ed_via_locality(&l, &z, &n), Err(Error::Precondition(_))));
}

#[test]
fn verify_ed_flags_a_wrong_product() {
    let x = S4::new();
    let e = x.of(&x.a4());
    let d = x.f.clone();
    // Pretend ED were E: it does not lie over TR = S.
    let report = products::verify_ed(&x.f, &e, &d, &e, VerifyOptions::default());
    assert!(!report.clauses.over_tr);
    assert!(!report.passed());
    assert_eq!(report.route, Route::Formula);
    assert_eq!(report.to_json()["clauses"]["minimality"], "not_enumerable");
}
