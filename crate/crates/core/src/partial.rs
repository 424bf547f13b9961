//! Partial subgroups of a locality: closure, partial normality, subnormal
//! chains, the set product `NK`, and the product-theorem harnesses.
//!
//! Sets of elements are sorted label sets. Closure under the partial product
//! only needs binary products: the product of a domain word is a left fold
//! whose every step multiplies two elements already in the set.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exec;
use crate::locality::{Label, Locality, ObjectSet, NONE};
use crate::pgroup::Mask;
use crate::report::Report;

pub type ElementSet = BTreeSet<Label>;

/// Default carrier bound for [`enumerate_partial_normals`].
pub const PARTIAL_NORMAL_CAP: usize = 400;

fn to_bits(l: &Locality, x: &ElementSet) -> Result<FixedBitSet> {
    let mut b = FixedBitSet::with_capacity(l.size());
    for &f in x {
        let p = l.try_pos(f).ok_or_else(|| Error::Precondition(format!("{f} is not in the carrier")))?;
        b.insert(p as usize);
    }
    Ok(b)
}

fn to_set(l: &Locality, b: &FixedBitSet) -> ElementSet {
    b.ones().map(|p| l.label_at(p as u32)).collect()
}

/// Smallest set containing `set` closed under inverses, defined binary
/// products and (optionally) conjugation by the elements of `conj_by`.
fn close_bits(l: &Locality, mut set: FixedBitSet, conj_by: Option<&FixedBitSet>) -> FixedBitSet {
    set.insert(l.pos(l.identity()) as usize);
    let mut members: Vec<u32> = set.ones().map(|p| p as u32).collect();
    let mut queue = members.clone();
    let add = |y: u32, set: &mut FixedBitSet, queue: &mut Vec<u32>, members: &mut Vec<u32>| {
        if y != NONE && !set.contains(y as usize) {
            set.insert(y as usize);
            queue.push(y);
            members.push(y);
        }
    };
    while let Some(x) = queue.pop() {
        add(l.inv_pos(x), &mut set, &mut queue, &mut members);
        let mut i = 0;
        while i < members.len() {
            let y = members[i];
            add(l.bin(x, y), &mut set, &mut queue, &mut members);
            add(l.bin(y, x), &mut set, &mut queue, &mut members);
            i += 1;
        }
        if let Some(c) = conj_by {
            for f in c.ones() {
                add(l.conj_pos(x, f as u32), &mut set, &mut queue, &mut members);
            }
        }
    }
    set
}

/// Contains 1, closed under inversion and under products of domain words.
pub fn is_partial_subgroup(l: &Locality, x: &ElementSet) -> bool {
    match to_bits(l, x) {
        Ok(b) => close_bits(l, b.clone(), None) == b,
        Err(_) => false,
    }
}

/// The partial subgroup generated by `x`.
pub fn generated(l: &Locality, x: &ElementSet) -> Result<ElementSet> {
    Ok(to_set(l, &close_bits(l, to_bits(l, x)?, None)))
}

/// Smallest partial subgroup containing `x` and closed under conjugation by `within`.
pub fn normal_closure_in(l: &Locality, x: &ElementSet, within: &ElementSet) -> Result<ElementSet> {
    let w = to_bits(l, within)?;
    Ok(to_set(l, &close_bits(l, to_bits(l, x)?, Some(&w))))
}

pub fn normal_closure(l: &Locality, x: &ElementSet) -> Result<ElementSet> {
    normal_closure_in(l, x, &l.carrier().iter().copied().collect())
}

/// `N` is a partial subgroup and `Π(f^-1, n, f) ∈ N` whenever defined, `f ∈ within`.
pub fn is_partial_normal_in(l: &Locality, n: &ElementSet, within: &ElementSet) -> bool {
    let (Ok(nb), Ok(wb)) = (to_bits(l, n), to_bits(l, within)) else { return false };
    if close_bits(l, nb.clone(), None) != nb {
        return false;
    }
    let ns: Vec<u32> = nb.ones().map(|p| p as u32).collect();
    let ws: Vec<u32> = wb.ones().map(|p| p as u32).collect();
    exec::all(ns.len(), |i| {
        ws.iter().all(|&f| {
            let c = l.conj_pos(ns[i], f);
            c == NONE || nb.contains(c as usize)
        })
    })
}

pub fn is_partial_normal(l: &Locality, n: &ElementSet) -> bool {
    is_partial_normal_in(l, n, &l.carrier().iter().copied().collect())
}

/// A chain `H = H_0 ⊴ H_1 ⊴ … ⊴ H_k = L` by iterated normal closure, or `None`.
pub fn subnormal_chain(l: &Locality, h: &ElementSet) -> Option<Vec<ElementSet>> {
    if !is_partial_subgroup(l, h) {
        return None;
    }
    let mut chain: Vec<ElementSet> = vec![l.carrier().iter().copied().collect()];
    loop {
        let cur = chain.last().expect("chain is nonempty");
        if cur == h {
            break;
        }
        let next = normal_closure_in(l, h, cur).ok()?;
        if &next == cur {
            return None;
        }
        chain.push(next);
    }
    chain.reverse();
    Some(chain)
}

pub fn is_subnormal(l: &Locality, h: &ElementSet) -> bool {
    subnormal_chain(l, h).is_some()
}

/// `XY = {Π(x, y) : (x, y) ∈ D}`.
pub fn set_product(l: &Locality, x: &ElementSet, y: &ElementSet) -> ElementSet {
    let mut out = ElementSet::new();
    for &a in x {
        for &b in y {
            if let Some(c) = l.binary_product(a, b) {
                out.insert(c);
            }
        }
    }
    out
}

fn pair_ok(l: &Locality, a: Label, b: Label, g: Label) -> bool {
    let (pa, pb) = (l.pos(a), l.pos(b));
    l.bin(pa, pb) == l.pos(g) && l.chain_domain_pos(&[pa, pb]) == l.s_of(g)
}

/// Least `(n, k) ∈ N × K` and least `(k', n') ∈ K × N` with `g = nk = k'n'`,
/// `S_g = S_{(n,k)} = S_{(k',n')}`.
pub fn decompose(
    l: &Locality,
    n: &ElementSet,
    k: &ElementSet,
    g: Label,
) -> Result<((Label, Label), (Label, Label))> {
    if !l.contains(g) {
        return Err(Error::Precondition(format!("{g} is not in the carrier")));
    }
    let find = |xs: &ElementSet, ys: &ElementSet| {
        xs.iter().find_map(|&a| ys.iter().find(|&&b| pair_ok(l, a, b, g)).map(|&b| (a, b)))
    };
    let nk = find(n, k).ok_or(Error::NotFound(g))?;
    let kn = find(k, n).ok_or(Error::NotFound(g))?;
    Ok((nk, kn))
}

fn mask_of(l: &Locality, x: &ElementSet) -> Mask {
    let s = l.s_group();
    s.mask_of_labels(s.labels().iter().copied().filter(|f| x.contains(f))).unwrap_or(0)
}

fn labels(s: &ElementSet) -> Vec<Label> {
    s.iter().copied().collect()
}

fn set_of_mask(l: &Locality, m: Mask) -> ElementSet {
    l.s_group().labels_of(m).into_iter().collect()
}

/// `T = S ∩ N` for `N ⊴ L`, with `N_L(T)`.
fn normal_pair(l: &Locality, n: &ElementSet) -> Result<(Mask, Locality)> {
    if !is_partial_normal(l, n) {
        return Err(Error::Precondition("N is not a partial normal subgroup of L".into()));
    }
    let t = mask_of(l, n);
    Ok((t, l.normalizer_locality(t)?))
}

fn check_in(lt: &Locality, k: &ElementSet) -> Result<()> {
    match k.iter().find(|&&f| !lt.contains(f)) {
        Some(f) => Err(Error::Precondition(format!("K ⊄ N_L(T): {f}"))),
        None => Ok(()),
    }
}

/// `NK ∩ S = T (K ∩ S)`, as a clause.
fn s_part_clause(l: &Locality, nk: &ElementSet, t: Mask, k: &ElementSet, report: &mut Report, name: &str) {
    let s = l.s_group();
    let lhs = mask_of(l, nk);
    let rhs = s.product_set(t, mask_of(l, k));
    report.clause(name, lhs == rhs, Some(json!({"lhs": s.labels_of(lhs), "rhs": s.labels_of(rhs)})));
}

/// For `N ⊴ L` and `K ⊴ N_L(T)`: `NK ⊴ L`, `NK = KN`, `NK ∩ S = T(K∩S)`, and
/// every `g ∈ NK` decomposes in both orders.
pub fn verify_theorem1(l: &Locality, n: &ElementSet, k: &ElementSet) -> Result<Report> {
    let (t, lt) = normal_pair(l, n)?;
    check_in(&lt, k)?;
    if !is_partial_normal(&lt, k) {
        return Err(Error::Precondition("K is not a partial normal subgroup of N_L(T)".into()));
    }
    let mut r = Report::new("theorem1");
    let nk = set_product(l, n, k);
    let kn = set_product(l, k, n);
    r.data("T", l.s_group().labels_of(t)).data("NK", labels(&nk));
    r.clause("NK_partial_normal", is_partial_normal(l, &nk), None);
    r.clause("NK_equals_KN", nk == kn, None);
    s_part_clause(l, &nk, t, k, &mut r, "NK_cap_S");
    let elems: Vec<Label> = labels(&nk);
    let bad = exec::find_first(elems.len(), |i| {
        let g = elems[i];
        match decompose(l, n, k, g) {
            Ok(((a, b), (c, d))) if pair_ok(l, a, b, g) && pair_ok(l, c, d, g) => None,
            _ => Some(g),
        }
    });
    r.clause("decompose_all", bad.is_none(), bad.map(|(_, g)| json!({"element": g})));
    Ok(r)
}

/// For `N ⊴ L` and `K` subnormal in `N_L(T)`: `NK = KN`, `NK` subnormal in `L`
/// (with the chain), `S ∩ NK = T(S∩K)`.
pub fn verify_theorem2(l: &Locality, n: &ElementSet, k: &ElementSet) -> Result<Report> {
    let (t, lt) = normal_pair(l, n)?;
    check_in(&lt, k)?;
    let k_chain = subnormal_chain(&lt, k)
        .ok_or_else(|| Error::Precondition("K is not subnormal in N_L(T)".into()))?;
    let mut r = Report::new("theorem2");
    r.flag("regularity_not_certified");
    let nk = set_product(l, n, k);
    let kn = set_product(l, k, n);
    r.data("T", l.s_group().labels_of(t))
        .data("NK", labels(&nk))
        .data("K_chain_length", k_chain.len() - 1);
    r.clause("NK_equals_KN", nk == kn, None);
    let chain = subnormal_chain(l, &nk);
    let detail = chain.as_ref().map(|c| {
        json!({"length": c.len() - 1, "chain": c.iter().map(labels).collect::<Vec<_>>()})
    });
    r.clause("NK_subnormal", chain.is_some(), detail);
    s_part_clause(l, &nk, t, k, &mut r, "S_cap_NK");
    Ok(r)
}

/// With `L = L^+|_Δ`, `N = N^+ ∩ L`, `K = K^+ ∩ L`: `N ⊴ L`, `K ⊴ N_L(T)`
/// and `Π^+(N^+, K^+) ∩ L = Π(N, K)`.
pub fn verify_restriction_product(
    lplus: &Locality,
    delta: ObjectSet,
    nplus: &ElementSet,
    kplus: &ElementSet,
) -> Result<Report> {
    let (_, ltplus) = normal_pair(lplus, nplus)?;
    check_in(&ltplus, kplus)?;
    if !is_partial_normal(&ltplus, kplus) {
        return Err(Error::Precondition("K+ is not a partial normal subgroup of N_L+(T)".into()));
    }
    let l = lplus.restriction(delta)?;
    let meet = |x: &ElementSet| -> ElementSet { x.iter().copied().filter(|&f| l.contains(f)).collect() };
    let (n, k) = (meet(nplus), meet(kplus));
    let mut r = Report::new("restriction_product");
    let n_normal = is_partial_normal(&l, &n);
    r.clause("N_normal_in_L", n_normal, None);
    let t = mask_of(&l, &n);
    let k_normal = match l.normalizer_locality(t) {
        Ok(lt) => k.iter().all(|&f| lt.contains(f)) && is_partial_normal(&lt, &k),
        Err(_) => false,
    };
    r.clause("K_normal_in_NLT", k_normal, None);
    let lhs = meet(&set_product(lplus, nplus, kplus));
    let rhs = set_product(&l, &n, &k);
    r.data("carrier", labels(&l.carrier().iter().copied().collect()));
    r.clause("products_agree", lhs == rhs, Some(json!({"lhs": labels(&lhs), "rhs": labels(&rhs)})));
    Ok(r)
}

pub fn enumerate_partial_normals(l: &Locality) -> Result<Vec<ElementSet>> {
    enumerate_partial_normals_capped(l, PARTIAL_NORMAL_CAP)
}

/// All partial normal subgroups: joins of the normal closures of single elements.
pub fn enumerate_partial_normals_capped(l: &Locality, cap: usize) -> Result<Vec<ElementSet>> {
    let n = l.size();
    if n > cap {
        return Err(Error::CapExceeded { what: "carrier size", cap });
    }
    let all = FixedBitSet::with_capacity(n);
    let mut everything = all.clone();
    everything.insert_range(..);
    let ncl = |b: FixedBitSet| close_bits(l, b, Some(&everything));
    let atoms: BTreeSet<Vec<usize>> = exec::map_range(n, |x| {
        let mut b = all.clone();
        b.insert(x);
        ncl(b).ones().collect::<Vec<usize>>()
    })
    .into_iter()
    .collect();
    let to_b = |v: &Vec<usize>| {
        let mut b = all.clone();
        b.extend(v.iter().copied());
        b
    };
    let atoms: Vec<FixedBitSet> = atoms.iter().map(to_b).collect();
    let mut found: BTreeSet<Vec<usize>> = atoms.iter().map(|a| a.ones().collect()).collect();
    let mut frontier: Vec<FixedBitSet> = atoms.clone();
    while let Some(x) = frontier.pop() {
        for a in &atoms {
            if a.is_subset(&x) {
                continue;
            }
            let mut u = x.clone();
            u.union_with(a);
            let j = ncl(u);
            if found.insert(j.ones().collect()) {
                frontier.push(j);
            }
        }
    }
    let mut out: Vec<ElementSet> = found.iter().map(|v| to_set(l, &to_b(v))).collect();
    out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    Ok(out)
}

/// `S ∩ X` as a set of labels.
pub fn s_part(l: &Locality, x: &ElementSet) -> ElementSet {
    set_of_mask(l, mask_of(l, x))
}
