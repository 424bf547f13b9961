//! Products of a normal subsystem `E ⊴ F` with a subgroup `R` or with a
//! subnormal subsystem `D` of `N_F(T)`, and the clause checks for `ED`.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exec;
use crate::fusion::{FusionSystem, Morphism, Verdict, DEFAULT_SUBSYSTEM_CAP};
use crate::locality::{Label, Locality};
use crate::partial::{self, ElementSet};
use crate::pgroup::{bit, bits, Mask};

/// `A_{F,E}(P)`: generated by the p′-elements `φ ∈ Aut_F(P)` with
/// `[P, φ] ≤ P ∩ T` and `φ|_{P∩T} ∈ Aut_E(P ∩ T)`. Sorted.
pub fn a_fe(f: &FusionSystem, e: &FusionSystem, p: Mask) -> Vec<Morphism> {
    let s = f.s();
    let t = e.base();
    let pt = p & t;
    let aut = f.aut_group(p);
    let prime = f.p();
    let gens: Vec<u32> = (0..aut.order() as u32)
        .filter(|&a| aut.element_order(a) as u64 % prime != 0)
        .filter(|&a| {
            let phi = aut.perm(a);
            let comm = s.generated(bits(p).fold(0, |acc, x| acc | bit(s.mul(s.inv(x), phi.apply(x as u32) as u8))));
            if comm & !pt != 0 {
                return false;
            }
            let restricted = restrict_perm(phi, pt, s.order());
            e.contains(&restricted)
        })
        .collect();
    let mut out: Vec<Morphism> =
        aut.generated(&gens).elements().iter().map(|&a| restrict_perm(aut.perm(a), p, s.order())).collect();
    out.sort_unstable();
    out
}

fn restrict_perm(phi: &crate::group::Perm, src: Mask, m: usize) -> Morphism {
    let map = (0..m as u32).map(|x| if src & bit(x as u8) != 0 { phi.apply(x) as u8 } else { u8::MAX }).collect();
    Morphism::new(src, map)
}

/// The `A_{F,E}(P)` for `P ≤ TR` with `P ∩ T` centric in `E`.
fn er_generators(f: &FusionSystem, e: &FusionSystem, tr: Mask) -> Vec<Morphism> {
    let t = e.base();
    let ps: Vec<Mask> = f.s().subgroups_of(tr).filter(|&p| e.is_centric(p & t)).collect();
    exec::map_range(ps.len(), |i| a_fe(f, e, ps[i])).concat()
}

fn tr_of(f: &FusionSystem, t: Mask, r: Mask) -> Result<Mask> {
    let tr = f.s().product_set(t, r);
    if !f.s().is_subgroup(tr) || tr & !f.base() != 0 {
        return Err(Error::Precondition("TR is not a subgroup of the base".into()));
    }
    Ok(tr)
}

/// `(ER)_F = ⟨A_{F,E}(P) : P ≤ TR, P ∩ T ∈ E^c⟩_{TR}`.
pub fn product_er(f: &FusionSystem, e: &FusionSystem, r: Mask) -> Result<FusionSystem> {
    if !f.is_normal_subsystem(e) {
        return Err(Error::Precondition("E is not normal in F".into()));
    }
    let tr = tr_of(f, e.base(), r)?;
    FusionSystem::close(f.s().clone(), tr, er_generators(f, e, tr))
}

/// Status of `D` inside `Y`: normal, subnormal (with the cap), or neither.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Normal,
    Subnormal,
    Fail,
    Unknown,
}

pub fn status_in(y: &FusionSystem, d: &FusionSystem, cap: usize) -> Status {
    if y.is_normal_subsystem(d) {
        return Status::Normal;
    }
    match y.is_subnormal_subsystem(d, cap) {
        Verdict::Yes(_) => Status::Subnormal,
        Verdict::No => Status::Fail,
        Verdict::Unknown => Status::Unknown,
    }
}

/// `ED = ⟨(ER)_F, (DT)_{N_F(T)}⟩` for `E ⊴ F` and `D ⊴ N_F(T)`.
pub fn product_ed(f: &FusionSystem, e: &FusionSystem, d: &FusionSystem) -> Result<FusionSystem> {
    if !f.is_normal_subsystem(e) {
        return Err(Error::Precondition("E is not normal in F".into()));
    }
    let t = e.base();
    let nft = f.normalizer_system(t)?;
    if !d.is_subsystem_of(&nft) {
        return Err(Error::Precondition("D is not a subsystem of N_F(T)".into()));
    }
    match status_in(&nft, d, DEFAULT_SUBSYSTEM_CAP) {
        Status::Normal => {}
        Status::Subnormal => return Err(Error::NormalityRequired),
        Status::Fail => return Err(Error::Precondition("D is not subnormal in N_F(T)".into())),
        Status::Unknown => {
            return Err(Error::CapExceeded { what: "subsystem enumeration", cap: DEFAULT_SUBSYSTEM_CAP })
        }
    }
    let tr = tr_of(f, t, d.base())?;
    let mut gens = er_generators(f, e, tr);
    gens.extend(er_generators(&nft, d, tr));
    FusionSystem::close(f.s().clone(), tr, gens)
}

/// `F_{TR}(NK)` together with what was checked about the locality.
#[derive(Clone, Debug)]
pub struct LocalityProduct {
    pub system: FusionSystem,
    pub nk: ElementSet,
    pub linking_locality: bool,
    pub delta_contains_subcentrics: bool,
}

/// `F_{T(S∩K)}(NK)` for `N ⊴ L` and `K` subnormal in `N_L(T)`.
pub fn product_ed_via_locality(l: &Locality, n: &ElementSet, k: &ElementSet) -> Result<LocalityProduct> {
    if !partial::is_partial_normal(l, n) {
        return Err(Error::Precondition("N is not a partial normal subgroup of L".into()));
    }
    let s = l.s_group();
    let t = s.mask_of_labels(s.labels().iter().copied().filter(|x| n.contains(x))).unwrap_or(0);
    let lt = l.normalizer_locality(t)?;
    if k.iter().any(|&x| !lt.contains(x)) || !partial::is_subnormal(&lt, k) {
        return Err(Error::Precondition("K is not subnormal in N_L(T)".into()));
    }
    let nk = partial::generated(l, &partial::set_product(l, n, k))?;
    let ff = l.fusion_system()?;
    let linking = l.is_linking_locality()?.holds();
    let subcentrics = ff.subcentric_subgroups().into_iter().all(|q| l.delta().contains(q));
    let system = l.fusion_of(&nk.iter().copied().collect::<Vec<Label>>())?;
    Ok(LocalityProduct { system, nk, linking_locality: linking, delta_contains_subcentrics: subcentrics })
}

/// Which construction produced `ED`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Route {
    #[serde(rename = "formula_e")]
    Formula,
    #[serde(rename = "locality")]
    Locality,
}

/// Locality data behind `E` and `D`, used when `D` is not normal in `N_F(T)`.
pub struct LocalityContext<'a> {
    pub locality: &'a Locality,
    pub n: &'a ElementSet,
    pub k: &'a ElementSet,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct EdClauses {
    pub over_tr: bool,
    pub e_normal_in_ed: bool,
    pub d_status: Status,
    pub ed_normal_in_f: Option<bool>,
    pub n_ed_t_identity: bool,
    pub minimality: Value,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct EdReport {
    pub instance: String,
    pub clauses: EdClauses,
    pub route: Route,
}

impl EdReport {
    pub fn passed(&self) -> bool {
        let c = &self.clauses;
        c.over_tr
            && c.e_normal_in_ed
            && matches!(c.d_status, Status::Normal | Status::Subnormal)
            && c.ed_normal_in_f != Some(false)
            && c.n_ed_t_identity
            && c.minimality != Value::Bool(false)
    }

    pub fn to_json(&self) -> Value {
        let c = &self.clauses;
        serde_json::json!({
            "instance": self.instance,
            "clauses": {
                "over_TR": c.over_tr,
                "E_normal_in_ED": c.e_normal_in_ed,
                "D_status": c.d_status,
                "ED_normal_in_F": c.ed_normal_in_f,
                "N_ED_T_identity": c.n_ed_t_identity,
                "minimality": c.minimality,
            },
            "route": self.route,
        })
    }
}

/// Options for [`verify_ed`].
pub struct VerifyOptions<'a> {
    pub instance: String,
    pub route: Route,
    pub locality: Option<LocalityContext<'a>>,
    /// Cap for subsystem enumeration; minimality is skipped when `None`.
    pub minimality_cap: Option<usize>,
    pub subnormal_cap: usize,
}

impl Default for VerifyOptions<'_> {
    fn default() -> Self {
        VerifyOptions {
            instance: String::new(),
            route: Route::Formula,
            locality: None,
            minimality_cap: None,
            subnormal_cap: DEFAULT_SUBSYSTEM_CAP,
        }
    }
}

/// Checks `ED` against the product theorem: over `TR`; `E ⊴ ED`; `D` keeps its
/// status in `N_ED(T)`; `ED ⊴ F` when `D ⊴ N_F(T)`; `N_ED(T) = (N_E(T)D)_{N_F(T)}`;
/// and minimality among enumerated subnormal subsystems.
pub fn verify_ed(f: &FusionSystem, e: &FusionSystem, d: &FusionSystem, ed: &FusionSystem, opts: VerifyOptions) -> EdReport {
    let t = e.base();
    let cap = opts.subnormal_cap;
    let over_tr = ed.base() == f.s().product_set(t, d.base());
    let e_normal_in_ed = ed.is_normal_subsystem(e);
    let (status_f, n_ed_t) = match f.normalizer_system(t) {
        Ok(nft) => (status_in(&nft, d, cap), ed.normalizer_system(t).ok()),
        Err(_) => (Status::Fail, None),
    };
    let status_ed = n_ed_t.as_ref().map_or(Status::Fail, |n| status_in(n, d, cap));
    let d_status = if status_f == status_ed { status_f } else { Status::Fail };
    let ed_normal_in_f = (status_f == Status::Normal).then(|| f.is_normal_subsystem(ed));

    let n_ed_t_identity = n_ed_t.map_or(false, |lhs| {
        let rhs = if status_f == Status::Normal {
            f.normalizer_system(t)
                .and_then(|nft| product_ed(&nft, &e.normalizer_of(t), d))
                .ok()
        } else {
            opts.locality.as_ref().and_then(|ctx| {
                let lt = ctx.locality.normalizer_locality(t).ok()?;
                let n_t: ElementSet = ctx.n.iter().copied().filter(|&x| lt.contains(x)).collect();
                product_ed_via_locality(&lt, &n_t, ctx.k).ok().map(|p| p.system)
            })
        };
        rhs.as_ref() == Some(&lhs)
    });

    let minimality = match opts.minimality_cap {
        None => Value::String("not_enumerable".into()),
        Some(mcap) => match f.subnormal_subsystems(mcap) {
            Verdict::Yes(all) => {
                let ok = all.iter().all(|tilde| {
                    let relevant = tilde.is_subnormal_subsystem(e, cap).is_yes()
                        && tilde
                            .normalizer_system(t)
                            .map(|n| n.is_subnormal_subsystem(d, cap).is_yes())
                            .unwrap_or(false);
                    !relevant || ed.is_subsystem_of(tilde)
                });
                Value::Bool(ok)
            }
            _ => Value::String("not_enumerable".into()),
        },
    };

    EdReport {
        instance: opts.instance,
        clauses: EdClauses { over_tr, e_normal_in_ed, d_status, ed_normal_in_f, n_ed_t_identity, minimality },
        route: opts.route,
    }
}

/// Subgroups of `S` in a set of labels, as a mask.
pub fn mask_of_set(f: &FusionSystem, x: &BTreeSet<Label>) -> Mask {
    let s = f.s();
    s.mask_of_labels(s.labels().iter().copied().filter(|l| x.contains(l))).unwrap_or(0)
}
