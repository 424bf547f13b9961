//! The subcommands, each producing one [`InstanceReport`] per descriptor.

use std::path::Path;
use std::time::Instant;

use fusion_locality::descriptor::{Instance, InstanceDescriptor, ProductSpec};
use fusion_locality::fusion::{FusionSystem, DEFAULT_SUBSYSTEM_CAP};
use fusion_locality::group::{p_part, Subgroup};
use fusion_locality::locality::Label;
use fusion_locality::partial::{self, ElementSet};
use fusion_locality::products::{self, LocalityContext, Route, VerifyOptions};
use fusion_locality::report::Report;
use fusion_locality::{Error, Result};
use serde_json::{json, Value};

use crate::outcome::{InstanceReport, Status};

/// Random words drawn by the sampled objectivity check.
pub const SAMPLED_WORDS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    GroupInfo,
    LocalityBuild,
    LocalityValidate,
    Theorem1,
    Theorem2,
    Restriction,
    FusionBuild,
    SaturateCheck,
    ProductEd,
    VerifyEd,
    Suite,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::GroupInfo => "group-info",
            Task::LocalityBuild => "locality-build",
            Task::LocalityValidate => "locality-validate",
            Task::Theorem1 => "theorem1",
            Task::Theorem2 => "theorem2",
            Task::Restriction => "restriction",
            Task::FusionBuild => "fusion-build",
            Task::SaturateCheck => "fusion-saturate-check",
            Task::ProductEd => "product-ed",
            Task::VerifyEd => "verify-ed",
            Task::Suite => "suite",
        }
    }
}

/// The tasks `suite` runs, in order.
const SUITE: [Task; 9] = [
    Task::LocalityValidate,
    Task::Theorem1,
    Task::Theorem2,
    Task::Restriction,
    Task::FusionBuild,
    Task::SaturateCheck,
    Task::ProductEd,
    Task::VerifyEd,
    Task::GroupInfo,
];

#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub seed: u64,
    pub max_word_len: usize,
    pub group_cap: usize,
    pub morphism_cap: usize,
    pub timing: bool,
    /// Skip re-validating the locality (set by `suite` after a passing validation).
    pub assume_valid: bool,
}

/// Loads the descriptor at `path` and runs `task` on it.
pub fn run(task: Task, path: &Path, st: &Settings) -> InstanceReport {
    let start = Instant::now();
    let fallback = path.display().to_string();
    let mut report = match InstanceDescriptor::load(path).and_then(|d| d.build(st.group_cap)) {
        Ok(inst) => run_on(task, &inst, st),
        Err(e) => {
            let mut r = InstanceReport::new(&fallback, task.name(), st.seed);
            r.error(&e);
            r
        }
    };
    if st.timing {
        report.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    report
}

pub fn run_on(task: Task, inst: &Instance, st: &Settings) -> InstanceReport {
    let mut r = InstanceReport::new(inst.name(), task.name(), st.seed);
    if task == Task::Suite {
        let mut st = *st;
        for t in SUITE {
            if t == Task::GroupInfo && inst.group.is_none() {
                continue;
            }
            let sub = run_on(t, inst, &st);
            if t == Task::LocalityValidate {
                st.assume_valid = sub.errors.is_empty() && sub.clauses.iter().all(|c| c.status == Status::Pass);
            }
            r.absorb(t.name(), sub);
        }
        return r;
    }
    if let Err(e) = dispatch(task, inst, st, &mut r) {
        r.error(&e);
    }
    r
}

fn dispatch(task: Task, inst: &Instance, st: &Settings, r: &mut InstanceReport) -> Result<()> {
    match task {
        Task::GroupInfo => group_info(inst, r),
        Task::LocalityBuild => locality_build(inst, r),
        Task::LocalityValidate => locality_validate(inst, st, r),
        Task::Theorem1 => theorems(inst, st, r, false),
        Task::Theorem2 => theorems(inst, st, r, true),
        Task::Restriction => restriction(inst, st, r),
        Task::FusionBuild => fusion_build(inst, st, r),
        Task::SaturateCheck => saturate_check(inst, st, r),
        Task::ProductEd => product_ed(inst, st, r),
        Task::VerifyEd => verify_ed(inst, st, r),
        Task::Suite => unreachable!("suite is expanded by run_on"),
    }
}

fn labels(x: &ElementSet) -> Vec<Label> {
    x.iter().copied().collect()
}

/// Copies a library [`Report`] in, prefixing its clause names.
fn merge(r: &mut InstanceReport, prefix: &str, lib: Report) {
    for c in lib.clauses {
        r.clause(format!("{prefix}:{}", c.name), c.passed, c.detail);
    }
    for f in lib.flags {
        r.flag(f);
    }
    if !lib.data.is_empty() {
        r.data(prefix, Value::Object(lib.data));
    }
}

fn group_info(inst: &Instance, r: &mut InstanceReport) -> Result<()> {
    let g = inst.group.as_ref().ok_or_else(|| Error::Descriptor("descriptor has no group".into()))?;
    let l = &inst.locality;
    let p = l.p();
    let s = l.s_labels();
    r.data("degree", g.degree());
    r.data("order", g.order());
    r.data("p", p);
    r.data("S", s.to_vec());
    r.data("O_p_order", g.p_core(p).order());
    r.data("characteristic_p", g.is_characteristic_p(p));
    r.clause("S_is_sylow", s.len() as u64 == p_part(g.order() as u64, p), None);
    Ok(())
}

fn locality_build(inst: &Instance, r: &mut InstanceReport) -> Result<()> {
    let l = &inst.locality;
    let s = l.s_group();
    r.data("p", l.p());
    r.data("carrier_size", l.size());
    r.data("carrier", l.carrier().to_vec());
    r.data("S", l.s_labels().to_vec());
    r.data("delta", l.delta().members().map(|h| s.labels_of(h)).collect::<Vec<_>>());
    r.data("sets", inst.sets.iter().map(|(k, v)| (k.clone(), json!(labels(v)))).collect::<serde_json::Map<_, _>>());
    let overgroups = l.delta().missing_overgroup(s);
    r.clause("delta_overgroup_closed", overgroups.is_none(), overgroups.map(|h| json!(s.labels_of(h))));
    Ok(())
}

fn locality_validate(inst: &Instance, st: &Settings, r: &mut InstanceReport) -> Result<()> {
    let l = &inst.locality;
    let v = l.validate(st.max_word_len);
    r.data("max_word_length", v.max_word_length);
    r.data("words_checked", v.words_checked);
    r.data("bounded_check_only", v.bounded_check_only);
    r.flag("bounded_check_only");
    for c in &v.checks {
        r.clause(c.name, c.passed, c.witness.as_ref().map(|w| json!(w)));
    }
    let sampled = l.sample_objectivity(SAMPLED_WORDS, st.max_word_len + 2, st.seed);
    r.clause(sampled.name, sampled.passed, sampled.witness.map(|w| json!(w)));
    Ok(())
}

/// Checks the locality axioms before running anything that relies on them.
fn require_valid(inst: &Instance, st: &Settings) -> Result<()> {
    if st.assume_valid {
        return Ok(());
    }
    inst.locality.require_valid(st.max_word_len)
}

fn theorems(inst: &Instance, st: &Settings, r: &mut InstanceReport, second: bool) -> Result<()> {
    require_valid(inst, st)?;
    let pairs = if second { &inst.descriptor.theorem2 } else { &inst.descriptor.theorem1 };
    for [n, k] in pairs {
        let prefix = format!("{n}*{k}");
        let l = &inst.locality;
        let out = if second {
            partial::verify_theorem2(l, inst.set(n), inst.set(k))
        } else {
            partial::verify_theorem1(l, inst.set(n), inst.set(k))
        };
        match out {
            Ok(lib) => merge(r, &prefix, lib),
            Err(e) => r.error_in(&prefix, &e),
        }
    }
    Ok(())
}

fn restriction(inst: &Instance, st: &Settings, r: &mut InstanceReport) -> Result<()> {
    require_valid(inst, st)?;
    let l = &inst.locality;
    for spec in &inst.descriptor.restrictions {
        let delta = spec.delta.build(l.s_group())?;
        let restricted = l.restriction(delta.clone())?;
        let v = restricted.validate(st.max_word_len);
        r.clause(format!("{}:restriction_valid", spec.name), v.passed(), v.first_failure().map(|c| json!(c.name)));
        match partial::verify_restriction_product(l, delta, inst.set(&spec.n), inst.set(&spec.k)) {
            Ok(lib) => merge(r, &spec.name, lib),
            Err(e) => r.error_in(&spec.name, &e),
        }
    }
    Ok(())
}

fn fusion_system(inst: &Instance, st: &Settings) -> Result<FusionSystem> {
    inst.locality.fusion_of_capped(inst.locality.carrier(), st.morphism_cap)
}

fn fusion_build(inst: &Instance, st: &Settings, r: &mut InstanceReport) -> Result<()> {
    let f = fusion_system(inst, st)?;
    r.data("morphism_count", f.morphism_count());
    r.data("classes", f.classes().len());
    r.data("system", f.to_json());
    let audit = f.audit();
    r.clause("closed_under_composition", audit.is_ok(), audit.err().map(Value::String));
    Ok(())
}

fn saturate_check(inst: &Instance, st: &Settings, r: &mut InstanceReport) -> Result<()> {
    let f = fusion_system(inst, st)?;
    let s = f.s();
    r.clause("saturated", f.is_saturated(), f.saturation_witness().map(|q| json!(s.labels_of(q))));
    if let Some(g) = &inst.group {
        let sub = Subgroup::from_ids(g, s.labels().to_vec());
        let fg = FusionSystem::of_group(g, &sub)?;
        r.clause("group_system_saturated", fg.is_saturated(), None);
        r.data("equals_group_system", fg == f);
    }
    if require_valid(inst, st).is_ok() {
        let link = inst.locality.is_linking_locality()?;
        r.data("linking_locality", link.holds());
        r.data("linking", serde_json::to_value(&link).expect("serializable"));
    }
    Ok(())
}

/// `F`, `E`, `D` and `ED` for one product spec, with the route used.
struct Product {
    f: FusionSystem,
    e: FusionSystem,
    d: FusionSystem,
    ed: FusionSystem,
    route: Route,
    via: Option<products::LocalityProduct>,
}

fn compute_product(inst: &Instance, spec: &ProductSpec, st: &Settings) -> Result<Product> {
    let l = &inst.locality;
    let cap = st.morphism_cap;
    let (n, k) = (inst.set(&spec.e), inst.set(&spec.d));
    let f = fusion_system(inst, st)?;
    let e = l.fusion_of_capped(&labels(n), cap)?;
    let d = l.fusion_of_capped(&labels(k), cap)?;
    match products::product_ed(&f, &e, &d) {
        Ok(ed) => {
            let via = products::product_ed_via_locality(l, n, k).ok();
            Ok(Product { f, e, d, ed, route: Route::Formula, via })
        }
        Err(Error::NormalityRequired) => {
            let via = products::product_ed_via_locality(l, n, k)?;
            Ok(Product { f, e, d, ed: via.system.clone(), route: Route::Locality, via: Some(via) })
        }
        Err(err) => Err(err),
    }
}

fn product_ed(inst: &Instance, st: &Settings, r: &mut InstanceReport) -> Result<()> {
    require_valid(inst, st)?;
    for spec in &inst.descriptor.fusion_products {
        let name = &spec.name;
        let pr = match compute_product(inst, spec, st) {
            Ok(pr) => pr,
            Err(e) => {
                r.error_in(name, &e);
                continue;
            }
        };
        r.clause(format!("{name}:computed"), true, None);
        let s = pr.f.s();
        r.data(
            name.clone(),
            json!({
                "route": pr.route,
                "base": s.labels_of(pr.ed.base()),
                "morphism_count": pr.ed.morphism_count(),
            }),
        );
        if let Some(via) = &pr.via {
            if pr.route == Route::Formula {
                r.clause(format!("{name}:routes_agree"), via.system == pr.ed, None);
            }
            if !via.linking_locality {
                r.flag("not_a_linking_locality");
            }
            if !via.delta_contains_subcentrics {
                r.flag("delta_lacks_subcentric_subgroups");
            }
            if let Some(g) = inst.group.as_ref().filter(|g| g.order() == inst.locality.size()) {
                let nk = g.generated(&labels(&via.nk));
                let oracle = FusionSystem::of_subgroup_in(g, &nk, s.clone())?;
                r.clause(format!("{name}:group_oracle"), oracle == pr.ed, None);
            }
        }
    }
    Ok(())
}

fn verify_ed(inst: &Instance, st: &Settings, r: &mut InstanceReport) -> Result<()> {
    require_valid(inst, st)?;
    for spec in &inst.descriptor.fusion_products {
        let name = &spec.name;
        let pr = match compute_product(inst, spec, st) {
            Ok(pr) => pr,
            Err(e) => {
                r.error_in(name, &e);
                continue;
            }
        };
        let ctx = LocalityContext { locality: &inst.locality, n: inst.set(&spec.e), k: inst.set(&spec.d) };
        let opts = VerifyOptions {
            instance: name.clone(),
            route: pr.route,
            locality: Some(ctx),
            minimality_cap: spec.minimality.then_some(DEFAULT_SUBSYSTEM_CAP),
            ..VerifyOptions::default()
        };
        let rep = products::verify_ed(&pr.f, &pr.e, &pr.d, &pr.ed, opts);
        let js = rep.to_json();
        for (clause, v) in js["clauses"].as_object().expect("clause map") {
            let status = match (clause.as_str(), v) {
                (_, Value::Bool(b)) => Status::from(*b),
                (_, Value::Null) => continue,
                ("D_status", Value::String(s)) => match s.as_str() {
                    "normal" | "subnormal" => Status::Pass,
                    "unknown" => Status::Unknown,
                    _ => Status::Fail,
                },
                ("minimality", _) if !spec.minimality => continue,
                _ => Status::Unknown,
            };
            let witness = (clause == "D_status").then(|| v.clone());
            r.clause(format!("{name}:{clause}"), status, witness);
        }
        r.data(name.clone(), js);
    }
    Ok(())
}
