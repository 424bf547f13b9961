//! Independent oracles computed directly in the ambient permutation group.
#![allow(dead_code)]

use std::collections::BTreeSet;

use fusion_locality::fusion::{FusionSystem, Morphism};
use fusion_locality::group::{FiniteGroup, Subgroup};
use fusion_locality::locality::{Label, Locality};
use fusion_locality::pgroup::{bits, Mask, PGroup};

/// `S_w` by following each element of `S` through the conjugations of `w`.
pub fn s_w(l: &Locality, w: &[Label]) -> Vec<Label> {
    let g = l.realization().expect("group-realized");
    let s: BTreeSet<Label> = l.s_labels().iter().copied().collect();
    l.s_labels()
        .iter()
        .copied()
        .filter(|&x| {
            let mut y = x;
            w.iter().all(|&f| {
                y = g.conj(y, f);
                s.contains(&y)
            })
        })
        .collect()
}

/// The ambient product of a word.
pub fn group_product(g: &FiniteGroup, w: &[Label]) -> Label {
    w.iter().fold(g.identity(), |acc, &f| g.mul(acc, f))
}

/// Every conjugation map `c_g : P → Q` with `P^g ≤ Q`, for `g` in `h`, as morphisms of `s`.
pub fn conjugation_homs(g: &FiniteGroup, h: &[Label], s: &PGroup, base: Mask) -> BTreeSet<Morphism> {
    let mut out = BTreeSet::new();
    for &p in s.subgroups() {
        if p & !base != 0 {
            continue;
        }
        for &x in h {
            let mut map = vec![u8::MAX; s.order()];
            let ok = bits(p).all(|a| match s.local(g.conj(s.label(a), x)) {
                Some(b) if base & (1 << b) != 0 => {
                    map[a as usize] = b;
                    true
                }
                _ => false,
            });
            if ok {
                out.insert(Morphism::new(p, map));
            }
        }
    }
    out
}

/// All morphisms of a fusion system as one set.
pub fn all_homs(f: &FusionSystem) -> BTreeSet<Morphism> {
    f.subgroups().into_iter().flat_map(|p| f.hom(p).to_vec()).collect()
}

/// Normal closure of `h` in `k`, inside `g`.
pub fn normal_closure_in(g: &FiniteGroup, h: &Subgroup, k: &Subgroup) -> Subgroup {
    let gens: Vec<Label> = k.elements().iter().flat_map(|&x| h.elements().iter().map(move |&y| (y, x))).map(|(y, x)| g.conj(y, x)).collect();
    g.generated(&gens)
}

/// Subnormal subgroups of `g`, by iterated normal closure.
pub fn subnormal_subgroups(g: &FiniteGroup) -> Vec<Subgroup> {
    g.all_subgroups()
        .expect("small group")
        .into_iter()
        .filter(|h| {
            let mut cur = g.whole();
            loop {
                let next = normal_closure_in(g, h, &cur);
                if next == cur {
                    return &cur == h;
                }
                cur = next;
            }
        })
        .collect()
}
