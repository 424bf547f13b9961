//! JSON instance descriptors.
//!
//! A descriptor names a locality, either realized by a permutation group
//! (`group`, `p`, `sylow`, `delta`) or given by explicit tables (`carrier`,
//! `identity`, `inverse`, `products`, `S`, `delta`), plus the named partial
//! subgroups and product specifications the harnesses run on.
//!
//! Elements are written as group element ids, or as permutations in cycle
//! notation (1-indexed): `{"generators": [...]}` is the subgroup they generate,
//! `{"elements": [...]}` is the listed set. Sets are intersected with the carrier.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::group::{smallest_prime_factor, FiniteGroup, Perm, Subgroup, DEFAULT_GROUP_CAP};
use crate::locality::{AbstractData, Label, Locality, ObjectSet};
use crate::partial::ElementSet;
use crate::pgroup::{popcount, PGroup};

type Cycles = Vec<Vec<u32>>;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDescriptor {
    pub degree: usize,
    /// Generators in one-line notation (1-indexed images).
    #[serde(default)]
    pub generators: Vec<Vec<u32>>,
    /// Generators in cycle notation.
    #[serde(default)]
    pub cycles: Vec<Cycles>,
}

impl GroupDescriptor {
    pub fn build(&self, cap: usize) -> Result<FiniteGroup> {
        let mut gens = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            if g.len() != self.degree {
                return Err(Error::Descriptor(format!("generator {i} has length {} not {}", g.len(), self.degree)));
            }
            gens.push(Perm::from_one_line(g).ok_or(Error::NotBijective { index: i, degree: self.degree })?);
        }
        for c in &self.cycles {
            gens.push(cycle_perm(self.degree, c)?);
        }
        FiniteGroup::from_generators_capped(gens, self.degree, cap)
    }
}

fn cycle_perm(n: usize, cycles: &Cycles) -> Result<Perm> {
    let mut seen = BTreeSet::new();
    for &x in cycles.iter().flatten() {
        if x == 0 || x as usize > n || !seen.insert(x) {
            return Err(Error::Descriptor(format!("bad cycle entry {x} for degree {n}")));
        }
    }
    let refs: Vec<&[u32]> = cycles.iter().map(Vec::as_slice).collect();
    Ok(Perm::from_cycles(n, &refs))
}

/// A set of elements: ids, generated subgroup, or listed permutations.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ElementSpec {
    Ids(Vec<u32>),
    Tagged(TaggedSpec),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TaggedSpec {
    Ids(Vec<u32>),
    Generators(Vec<Cycles>),
    Elements(Vec<Cycles>),
}

impl ElementSpec {
    /// The named set as group ids.
    pub fn resolve(&self, g: Option<&FiniteGroup>) -> Result<Vec<u32>> {
        let perm_id = |g: &FiniteGroup, c: &Cycles| -> Result<u32> {
            let p = cycle_perm(g.degree(), c)?;
            g.id_of(&p).ok_or_else(|| Error::Descriptor(format!("{c:?} is not in the group")))
        };
        match (self, g) {
            (ElementSpec::Ids(ids), _) | (ElementSpec::Tagged(TaggedSpec::Ids(ids)), _) => Ok(ids.clone()),
            (ElementSpec::Tagged(TaggedSpec::Generators(cs)), Some(g)) => {
                let ids = cs.iter().map(|c| perm_id(g, c)).collect::<Result<Vec<_>>>()?;
                Ok(g.generated(&ids).elements().to_vec())
            }
            (ElementSpec::Tagged(TaggedSpec::Elements(cs)), Some(g)) => cs.iter().map(|c| perm_id(g, c)).collect(),
            (_, None) => Err(Error::Descriptor("permutation specs need a group".into())),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum SylowSpec {
    Auto(String),
    Set(ElementSpec),
}

/// Object-set rules for group-realized localities.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DeltaRule {
    MinOrder(usize),
    Orders(Vec<usize>),
    Explicit(Vec<Vec<u32>>),
    All(bool),
}

impl DeltaRule {
    pub fn build(&self, s: &PGroup) -> Result<ObjectSet> {
        Ok(match self {
            DeltaRule::MinOrder(k) => ObjectSet::min_order(s, *k),
            DeltaRule::Orders(os) => ObjectSet::new(s.subgroups().iter().copied().filter(|&h| os.contains(&popcount(h)))),
            DeltaRule::All(_) => ObjectSet::all(s),
            DeltaRule::Explicit(lists) => {
                let mut masks = Vec::new();
                for l in lists {
                    let m = s
                        .mask_of_labels(l.iter().copied())
                        .ok_or_else(|| Error::Descriptor(format!("delta member {l:?} is not inside S")))?;
                    masks.push(m);
                }
                ObjectSet::new(masks)
            }
        })
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictionSpec {
    pub name: String,
    pub delta: DeltaRule,
    #[serde(rename = "N")]
    pub n: String,
    #[serde(rename = "K")]
    pub k: String,
}

/// `E = F(M)` and `D = F(K)` for a product `ED`, with `M ⊴ L`, `K` subnormal in `N_L(T)`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProductSpec {
    pub name: String,
    #[serde(rename = "E")]
    pub e: String,
    #[serde(rename = "D")]
    pub d: String,
    /// Run the minimality clause with exhaustive subsystem enumeration.
    #[serde(default)]
    pub minimality: bool,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDescriptor {
    pub name: String,
    #[serde(default)]
    pub group: Option<GroupDescriptor>,
    #[serde(default)]
    pub p: Option<u64>,
    #[serde(default)]
    pub sylow: Option<SylowSpec>,
    #[serde(default)]
    pub delta: Option<Value>,
    #[serde(default)]
    pub carrier: Option<usize>,
    #[serde(default)]
    pub identity: Option<u32>,
    #[serde(default)]
    pub inverse: Option<Vec<u32>>,
    #[serde(default)]
    pub products: Option<Vec<[u32; 3]>>,
    #[serde(default, rename = "S")]
    pub s: Option<Vec<u32>>,
    #[serde(default)]
    pub normal_subgroups: BTreeMap<String, ElementSpec>,
    #[serde(default)]
    pub k_choices: BTreeMap<String, ElementSpec>,
    #[serde(default)]
    pub theorem1: Vec<[String; 2]>,
    #[serde(default)]
    pub theorem2: Vec<[String; 2]>,
    #[serde(default)]
    pub restrictions: Vec<RestrictionSpec>,
    #[serde(default)]
    pub fusion_products: Vec<ProductSpec>,
}

/// A loaded descriptor: the locality (not yet validated) and resolved sets.
#[derive(Debug)]
pub struct Instance {
    pub descriptor: InstanceDescriptor,
    pub group: Option<Arc<FiniteGroup>>,
    pub locality: Locality,
    /// Named sets from `normal_subgroups` and `k_choices`, intersected with the carrier.
    pub sets: BTreeMap<String, ElementSet>,
}

impl InstanceDescriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        let d: InstanceDescriptor = serde_json::from_str(text).map_err(|e| Error::Descriptor(e.to_string()))?;
        let mut names = BTreeSet::new();
        for n in d.normal_subgroups.keys().chain(d.k_choices.keys()) {
            if !names.insert(n.clone()) {
                return Err(Error::Descriptor(format!("duplicate name {n}")));
            }
        }
        let mut products = BTreeSet::new();
        for p in &d.fusion_products {
            if !products.insert(&p.name) {
                return Err(Error::Descriptor(format!("duplicate product name {}", p.name)));
            }
        }
        Ok(d)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Descriptor(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Builds the group and locality (without word validation) and resolves names.
    pub fn build(self, group_cap: usize) -> Result<Instance> {
        let (group, locality) = match (&self.group, self.carrier) {
            (Some(gd), None) => {
                let g = Arc::new(gd.build(group_cap)?);
                let p = self.p.ok_or_else(|| Error::Descriptor("missing p".into()))?;
                let s = match &self.sylow {
                    None => g.sylow_subgroup(p),
                    Some(SylowSpec::Auto(a)) if a == "auto" => g.sylow_subgroup(p),
                    Some(SylowSpec::Auto(a)) => return Err(Error::Descriptor(format!("unknown sylow rule {a}"))),
                    Some(SylowSpec::Set(spec)) => Subgroup::from_ids(&g, spec.resolve(Some(&g))?),
                };
                let pg = PGroup::new(p, s.elements().to_vec(), |a, b| g.mul(a, b))?;
                let rule: DeltaRule = match &self.delta {
                    None => DeltaRule::All(true),
                    Some(v) => serde_json::from_value(v.clone()).map_err(|e| Error::Descriptor(format!("delta: {e}")))?,
                };
                let delta = rule.build(&pg)?;
                let l = Locality::from_group_unchecked(g.clone(), p, &s, delta)?;
                (Some(g), l)
            }
            (None, Some(n)) => {
                let missing = |what: &str| Error::Descriptor(format!("abstract locality without {what}"));
                let s = self.s.clone().ok_or_else(|| missing("S"))?;
                let p = match self.p {
                    Some(p) => p,
                    None => smallest_prime_factor(s.len() as u64).ok_or_else(|| missing("p (S is trivial)"))?,
                };
                let delta: Vec<Vec<u32>> = match &self.delta {
                    Some(v) => serde_json::from_value(v.clone()).map_err(|e| Error::Descriptor(format!("delta: {e}")))?,
                    None => return Err(missing("delta")),
                };
                let data = AbstractData {
                    p,
                    size: n,
                    identity: self.identity.ok_or_else(|| missing("identity"))?,
                    inverse: self.inverse.clone().ok_or_else(|| missing("inverse"))?,
                    products: self.products.clone().unwrap_or_default().into_iter().map(|[a, b, c]| (a, b, c)).collect(),
                    s,
                    delta,
                };
                let l = Locality::from_abstract_unchecked(data)?;
                if let Some(h) = l.delta().non_subgroup(l.s_group()) {
                    return Err(Error::Precondition(format!("{:?} is not a subgroup of S", l.s_group().labels_of(h))));
                }
                (None, l)
            }
            _ => return Err(Error::Descriptor("give either a group or an abstract carrier".into())),
        };
        let mut sets = BTreeMap::new();
        for (name, spec) in self.normal_subgroups.iter().chain(&self.k_choices) {
            let ids = spec.resolve(group.as_deref())?;
            let set: ElementSet = ids.into_iter().filter(|&x| locality.contains(x)).collect();
            sets.insert(name.clone(), set);
        }
        let check = |name: &String| -> Result<()> {
            if sets.contains_key(name) {
                Ok(())
            } else {
                Err(Error::Descriptor(format!("unknown set name {name}")))
            }
        };
        for [a, b] in self.theorem1.iter().chain(&self.theorem2) {
            check(a)?;
            check(b)?;
        }
        for r in &self.restrictions {
            check(&r.n)?;
            check(&r.k)?;
        }
        for p in &self.fusion_products {
            check(&p.e)?;
            check(&p.d)?;
        }
        Ok(Instance { descriptor: self, group, locality, sets })
    }
}

impl Instance {
    pub fn load(path: &Path) -> Result<Self> {
        InstanceDescriptor::load(path)?.build(DEFAULT_GROUP_CAP)
    }

    pub fn name(&self) -> &str {
        &self.descriptor.name
    }

    pub fn set(&self, name: &str) -> &ElementSet {
        &self.sets[name]
    }

    pub fn labels(&self, name: &str) -> Vec<Label> {
        self.set(name).iter().copied().collect()
    }
}
