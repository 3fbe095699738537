//! Core domain types: instances, class constraints, assignments, feasibility.
//!
//! An [`Instance`] is a bipartite item/platform graph with per-platform and
//! per-item capacities plus class constraints (edge subsets with upper-bound
//! quotas). After validation every identifier is mapped to a dense index and
//! the per-platform / per-item quotas are folded into whole-neighborhood
//! constraints, so solvers only ever deal with one constraint kind.

mod builder;
mod io;

pub use builder::InstanceBuilder;
pub use io::{RawClass, RawInstance, RawRatio, RawWeight};

use num_rational::Rational64;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

pub type ItemId = usize;
pub type PlatformId = usize;
pub type EdgeId = usize;

/// Which side of the bipartition a constraint belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Owner {
    Item(ItemId),
    Platform(PlatformId),
}

impl Owner {
    pub fn is_item(&self) -> bool {
        matches!(self, Owner::Item(_))
    }

    pub fn is_platform(&self) -> bool {
        matches!(self, Owner::Platform(_))
    }
}

/// A validated class constraint: a set of edges incident to one owner,
/// with an upper bound on how many of them may be matched simultaneously.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassConstraint {
    pub id: String,
    pub owner: Owner,
    /// Sorted, deduplicated edge ids; all incident to `owner`.
    pub members: Vec<EdgeId>,
    pub quota: u64,
}

/// One entry of the unified constraint view: either an explicit class or a
/// folded per-item / per-platform quota (a whole-neighborhood class).
#[derive(Clone, Debug)]
pub struct Constraint {
    pub members: Vec<EdgeId>,
    pub quota: u64,
    pub owner: Owner,
    pub label: String,
    /// True for folded item/platform quotas, false for explicit classes.
    pub folded: bool,
}

/// A single validation problem. Validation reports all of them, not just the first.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("duplicate item identifier {0:?}")]
    DuplicateItem(String),
    #[error("duplicate platform identifier {0:?}")]
    DuplicatePlatform(String),
    #[error("edge ({0:?}, {1:?}) references an unknown item")]
    EdgeUnknownItem(String, String),
    #[error("edge ({0:?}, {1:?}) references an unknown platform")]
    EdgeUnknownPlatform(String, String),
    #[error("duplicate edge ({0:?}, {1:?})")]
    DuplicateEdge(String, String),
    #[error("quota given for unknown {kind} {id:?}")]
    QuotaUnknownOwner { kind: &'static str, id: String },
    #[error("negative quota {quota} for {what}")]
    NegativeQuota { what: String, quota: i64 },
    #[error("class {0:?} has an unknown owner {1:?}")]
    ClassUnknownOwner(String, String),
    #[error("class {0:?} has no members")]
    EmptyClass(String),
    #[error("class {class:?} member ({item:?}, {platform:?}) is not an instance edge")]
    ClassMemberUnknownEdge {
        class: String,
        item: String,
        platform: String,
    },
    #[error("class {class:?} member ({item:?}, {platform:?}) is not incident to owner {owner:?}")]
    ClassMemberNotIncident {
        class: String,
        item: String,
        platform: String,
        owner: String,
    },
    #[error("duplicate class identifier {0:?}")]
    DuplicateClassId(String),
    #[error("weight given for unknown edge ({0:?}, {1:?})")]
    WeightUnknownEdge(String, String),
    #[error("duplicate weight entry for edge ({0:?}, {1:?})")]
    DuplicateWeight(String, String),
    #[error("negative weight {weight} for edge ({item:?}, {platform:?})")]
    NegativeWeight {
        item: String,
        platform: String,
        weight: String,
    },
    #[error("malformed weight {text:?} for edge ({item:?}, {platform:?})")]
    MalformedWeight {
        item: String,
        platform: String,
        text: String,
    },
    #[error("malformed instance file: {0}")]
    MalformedJson(String),
}

/// Carries every violation found while validating a raw instance.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instance validation failed ({} problems):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// A validated CMM instance with dense indices and the folded constraint view.
#[derive(Clone, Debug)]
pub struct Instance {
    items: Vec<String>,
    platforms: Vec<String>,
    edges: Vec<(ItemId, PlatformId)>,
    platform_quota: Vec<u64>,
    item_quota: Vec<u64>,
    platform_classes: Vec<ClassConstraint>,
    item_classes: Vec<ClassConstraint>,
    edge_weight: Option<Vec<Rational64>>,
    // Derived lookup structures.
    constraints: Vec<Constraint>,
    edge_constraints: Vec<Vec<usize>>,
    item_edges: Vec<Vec<EdgeId>>,
    platform_edges: Vec<Vec<EdgeId>>,
    item_index: HashMap<String, ItemId>,
    platform_index: HashMap<String, PlatformId>,
    edge_index: HashMap<(ItemId, PlatformId), EdgeId>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.items == other.items
            && self.platforms == other.platforms
            && self.edges == other.edges
            && self.platform_quota == other.platform_quota
            && self.item_quota == other.item_quota
            && self.platform_classes == other.platform_classes
            && self.item_classes == other.item_classes
            && self.edge_weight == other.edge_weight
    }
}

impl Eq for Instance {}

impl Instance {
    /// Validates a raw description, reporting every violation at once.
    pub fn from_raw(raw: &RawInstance) -> Result<Instance, ValidationError> {
        let mut violations = Vec::new();

        let mut item_index = HashMap::new();
        for (i, name) in raw.items.iter().enumerate() {
            if item_index.insert(name.clone(), i).is_some() {
                violations.push(Violation::DuplicateItem(name.clone()));
            }
        }
        let mut platform_index = HashMap::new();
        for (p, name) in raw.platforms.iter().enumerate() {
            if platform_index.insert(name.clone(), p).is_some() {
                violations.push(Violation::DuplicatePlatform(name.clone()));
            }
        }

        let mut edges = Vec::new();
        let mut edge_index = HashMap::new();
        for (a, p) in &raw.edges {
            let ai = item_index.get(a);
            let pi = platform_index.get(p);
            if ai.is_none() {
                violations.push(Violation::EdgeUnknownItem(a.clone(), p.clone()));
            }
            if pi.is_none() {
                violations.push(Violation::EdgeUnknownPlatform(a.clone(), p.clone()));
            }
            if let (Some(&ai), Some(&pi)) = (ai, pi) {
                if edge_index.insert((ai, pi), edges.len()).is_some() {
                    violations.push(Violation::DuplicateEdge(a.clone(), p.clone()));
                } else {
                    edges.push((ai, pi));
                }
            }
        }

        let mut item_edges = vec![Vec::new(); raw.items.len()];
        let mut platform_edges = vec![Vec::new(); raw.platforms.len()];
        for (e, &(a, p)) in edges.iter().enumerate() {
            item_edges[a].push(e);
            platform_edges[p].push(e);
        }

        // Quotas. Missing platform quotas default to the neighborhood size
        // (vacuous); missing item quotas default to 1 (the many-to-one model).
        let mut platform_quota: Vec<u64> =
            platform_edges.iter().map(|es| es.len() as u64).collect();
        for (name, &q) in &raw.platform_quota {
            match platform_index.get(name) {
                None => violations.push(Violation::QuotaUnknownOwner {
                    kind: "platform",
                    id: name.clone(),
                }),
                Some(&p) => {
                    if q < 0 {
                        violations.push(Violation::NegativeQuota {
                            what: format!("platform {name:?}"),
                            quota: q,
                        });
                    } else {
                        platform_quota[p] = q as u64;
                    }
                }
            }
        }
        let mut item_quota: Vec<u64> = vec![1; raw.items.len()];
        for (name, &q) in &raw.item_quota {
            match item_index.get(name) {
                None => violations.push(Violation::QuotaUnknownOwner {
                    kind: "item",
                    id: name.clone(),
                }),
                Some(&i) => {
                    if q < 0 {
                        violations.push(Violation::NegativeQuota {
                            what: format!("item {name:?}"),
                            quota: q,
                        });
                    } else {
                        item_quota[i] = q as u64;
                    }
                }
            }
        }

        let mut class_ids = BTreeSet::new();
        let mut check_class = |raw_class: &RawClass,
                               expect_item_owner: bool,
                               violations: &mut Vec<Violation>|
         -> Option<ClassConstraint> {
            if !class_ids.insert(raw_class.id.clone()) {
                violations.push(Violation::DuplicateClassId(raw_class.id.clone()));
            }
            let owner = if expect_item_owner {
                item_index.get(&raw_class.owner).map(|&i| Owner::Item(i))
            } else {
                platform_index
                    .get(&raw_class.owner)
                    .map(|&p| Owner::Platform(p))
            };
            let owner = match owner {
                Some(o) => o,
                None => {
                    violations.push(Violation::ClassUnknownOwner(
                        raw_class.id.clone(),
                        raw_class.owner.clone(),
                    ));
                    return None;
                }
            };
            if raw_class.quota < 0 {
                violations.push(Violation::NegativeQuota {
                    what: format!("class {:?}", raw_class.id),
                    quota: raw_class.quota,
                });
            }
            if raw_class.members.is_empty() {
                violations.push(Violation::EmptyClass(raw_class.id.clone()));
            }
            let mut members = BTreeSet::new();
            let mut ok = raw_class.quota >= 0 && !raw_class.members.is_empty();
            for (a, p) in &raw_class.members {
                let edge = item_index
                    .get(a)
                    .zip(platform_index.get(p))
                    .and_then(|(&ai, &pi)| edge_index.get(&(ai, pi)).copied());
                let e = match edge {
                    Some(e) => e,
                    None => {
                        violations.push(Violation::ClassMemberUnknownEdge {
                            class: raw_class.id.clone(),
                            item: a.clone(),
                            platform: p.clone(),
                        });
                        ok = false;
                        continue;
                    }
                };
                let incident = match owner {
                    Owner::Item(i) => edges[e].0 == i,
                    Owner::Platform(pl) => edges[e].1 == pl,
                };
                if !incident {
                    violations.push(Violation::ClassMemberNotIncident {
                        class: raw_class.id.clone(),
                        item: a.clone(),
                        platform: p.clone(),
                        owner: raw_class.owner.clone(),
                    });
                    ok = false;
                    continue;
                }
                members.insert(e);
            }
            if !ok {
                return None;
            }
            Some(ClassConstraint {
                id: raw_class.id.clone(),
                owner,
                members: members.into_iter().collect(),
                quota: raw_class.quota as u64,
            })
        };

        let mut platform_classes = Vec::new();
        for rc in &raw.platform_classes {
            if let Some(c) = check_class(rc, false, &mut violations) {
                platform_classes.push(c);
            }
        }
        let mut item_classes = Vec::new();
        for rc in &raw.item_classes {
            if let Some(c) = check_class(rc, true, &mut violations) {
                item_classes.push(c);
            }
        }

        let edge_weight = match &raw.edge_weight {
            None => None,
            Some(entries) => {
                let mut weights = vec![Rational64::from_integer(1); edges.len()];
                let mut seen = BTreeSet::new();
                for entry in entries {
                    let (item, platform) = (entry.item(), entry.platform());
                    let edge = item_index
                        .get(item)
                        .zip(platform_index.get(platform))
                        .and_then(|(&ai, &pi)| edge_index.get(&(ai, pi)).copied());
                    let e = match edge {
                        Some(e) => e,
                        None => {
                            violations.push(Violation::WeightUnknownEdge(
                                item.to_string(),
                                platform.to_string(),
                            ));
                            continue;
                        }
                    };
                    if !seen.insert(e) {
                        violations.push(Violation::DuplicateWeight(
                            item.to_string(),
                            platform.to_string(),
                        ));
                        continue;
                    }
                    match entry.weight.to_rational() {
                        Ok(w) if w >= Rational64::from_integer(0) => weights[e] = w,
                        Ok(w) => violations.push(Violation::NegativeWeight {
                            item: item.to_string(),
                            platform: platform.to_string(),
                            weight: w.to_string(),
                        }),
                        Err(text) => violations.push(Violation::MalformedWeight {
                            item: item.to_string(),
                            platform: platform.to_string(),
                            text,
                        }),
                    }
                }
                Some(weights)
            }
        };

        if !violations.is_empty() {
            return Err(ValidationError { violations });
        }

        Ok(Instance::assemble(
            raw.items.clone(),
            raw.platforms.clone(),
            edges,
            platform_quota,
            item_quota,
            platform_classes,
            item_classes,
            edge_weight,
            item_edges,
            platform_edges,
            item_index,
            platform_index,
            edge_index,
        ))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        items: Vec<String>,
        platforms: Vec<String>,
        edges: Vec<(ItemId, PlatformId)>,
        platform_quota: Vec<u64>,
        item_quota: Vec<u64>,
        platform_classes: Vec<ClassConstraint>,
        item_classes: Vec<ClassConstraint>,
        edge_weight: Option<Vec<Rational64>>,
        item_edges: Vec<Vec<EdgeId>>,
        platform_edges: Vec<Vec<EdgeId>>,
        item_index: HashMap<String, ItemId>,
        platform_index: HashMap<String, PlatformId>,
        edge_index: HashMap<(ItemId, PlatformId), EdgeId>,
    ) -> Instance {
        // Unified constraint view: folded item quotas, folded platform quotas,
        // then explicit item and platform classes.
        let mut constraints = Vec::new();
        for (i, es) in item_edges.iter().enumerate() {
            if !es.is_empty() {
                constraints.push(Constraint {
                    members: es.clone(),
                    quota: item_quota[i],
                    owner: Owner::Item(i),
                    label: format!("quota({})", items[i]),
                    folded: true,
                });
            }
        }
        for (p, es) in platform_edges.iter().enumerate() {
            if !es.is_empty() {
                constraints.push(Constraint {
                    members: es.clone(),
                    quota: platform_quota[p],
                    owner: Owner::Platform(p),
                    label: format!("quota({})", platforms[p]),
                    folded: true,
                });
            }
        }
        for c in item_classes.iter().chain(platform_classes.iter()) {
            constraints.push(Constraint {
                members: c.members.clone(),
                quota: c.quota,
                owner: c.owner,
                label: c.id.clone(),
                folded: false,
            });
        }

        let mut edge_constraints = vec![Vec::new(); edges.len()];
        for (ci, c) in constraints.iter().enumerate() {
            for &e in &c.members {
                edge_constraints[e].push(ci);
            }
        }

        Instance {
            items,
            platforms,
            edges,
            platform_quota,
            item_quota,
            platform_classes,
            item_classes,
            edge_weight,
            constraints,
            edge_constraints,
            item_edges,
            platform_edges,
            item_index,
            platform_index,
            edge_index,
        }
    }

    pub fn from_json_str(text: &str) -> Result<Instance, ValidationError> {
        let raw: RawInstance = serde_json::from_str(text).map_err(|e| ValidationError {
            violations: vec![Violation::MalformedJson(e.to_string())],
        })?;
        Instance::from_raw(&raw)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("instance serialization cannot fail")
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn platforms(&self) -> &[String] {
        &self.platforms
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn n_platforms(&self) -> usize {
        self.platforms.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(ItemId, PlatformId)] {
        &self.edges
    }

    pub fn edge_endpoints(&self, e: EdgeId) -> (ItemId, PlatformId) {
        self.edges[e]
    }

    pub fn edge_names(&self, e: EdgeId) -> (&str, &str) {
        let (a, p) = self.edges[e];
        (&self.items[a], &self.platforms[p])
    }

    pub fn edge_id(&self, item: ItemId, platform: PlatformId) -> Option<EdgeId> {
        self.edge_index.get(&(item, platform)).copied()
    }

    pub fn item_id(&self, name: &str) -> Option<ItemId> {
        self.item_index.get(name).copied()
    }

    pub fn platform_id(&self, name: &str) -> Option<PlatformId> {
        self.platform_index.get(name).copied()
    }

    pub fn platform_quota(&self, p: PlatformId) -> u64 {
        self.platform_quota[p]
    }

    pub fn item_quota(&self, i: ItemId) -> u64 {
        self.item_quota[i]
    }

    pub fn platform_classes(&self) -> &[ClassConstraint] {
        &self.platform_classes
    }

    pub fn item_classes(&self) -> &[ClassConstraint] {
        &self.item_classes
    }

    pub fn classes_of_platform(&self, p: PlatformId) -> impl Iterator<Item = &ClassConstraint> {
        self.platform_classes
            .iter()
            .filter(move |c| c.owner == Owner::Platform(p))
    }

    pub fn classes_of_item(&self, i: ItemId) -> impl Iterator<Item = &ClassConstraint> {
        self.item_classes
            .iter()
            .filter(move |c| c.owner == Owner::Item(i))
    }

    pub fn item_edges(&self, i: ItemId) -> &[EdgeId] {
        &self.item_edges[i]
    }

    pub fn platform_edges(&self, p: PlatformId) -> &[EdgeId] {
        &self.platform_edges[p]
    }

    /// The unified constraint view (folded quotas plus explicit classes).
    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Indices into [`Instance::constraints`] of the constraints containing `e`.
    pub fn constraints_of_edge(&self, e: EdgeId) -> &[usize] {
        &self.edge_constraints[e]
    }

    pub fn is_weighted(&self) -> bool {
        self.edge_weight.is_some()
    }

    /// Edge weight; 1 for every edge of an unweighted instance.
    pub fn weight(&self, e: EdgeId) -> Rational64 {
        match &self.edge_weight {
            Some(w) => w[e],
            None => Rational64::from_integer(1),
        }
    }

    /// True when the instance is many-to-one: every item quota is 1 and
    /// there are no item classes.
    pub fn is_many_to_one(&self) -> bool {
        self.item_classes.is_empty() && self.item_quota.iter().all(|&q| q == 1)
    }

    /// Sum of weights of the given edges (cardinality when unweighted).
    pub fn value_of<'a>(&self, edges: impl IntoIterator<Item = &'a EdgeId>) -> Rational64 {
        edges
            .into_iter()
            .map(|&e| self.weight(e))
            .sum()
    }

    /// True iff every platform quota, item quota, and class quota is respected.
    pub fn is_feasible(&self, asg: &Assignment) -> bool {
        let mut counts = vec![0u64; self.constraints.len()];
        for &e in asg.matched() {
            if e >= self.edges.len() {
                return false;
            }
            for &ci in &self.edge_constraints[e] {
                counts[ci] += 1;
            }
        }
        counts
            .iter()
            .zip(self.constraints.iter())
            .all(|(&n, c)| n <= c.quota)
    }

    /// Incremental feasibility of `asg ∪ {e}`: only constraints containing `e`
    /// are rechecked. Callers must pass a feasible `asg` not containing `e`.
    pub fn can_extend(&self, asg: &Assignment, e: EdgeId) -> bool {
        debug_assert!(!asg.matched().contains(&e));
        self.edge_constraints[e].iter().all(|&ci| {
            let c = &self.constraints[ci];
            let used = c.members.iter().filter(|m| asg.matched().contains(m)).count() as u64;
            used + 1 <= c.quota
        })
    }

    /// Total weight of an assignment (cardinality when unweighted).
    pub fn assignment_value(&self, asg: &Assignment) -> Rational64 {
        self.value_of(asg.matched().iter())
    }

    /// Renders an assignment in the external JSON shape:
    /// `{"matched": [[item, platform], ...], "value": <number>}`.
    pub fn assignment_to_json(&self, asg: &Assignment) -> serde_json::Value {
        let matched: Vec<serde_json::Value> = asg
            .matched()
            .iter()
            .map(|&e| {
                let (a, p) = self.edge_names(e);
                serde_json::json!([a, p])
            })
            .collect();
        let value = asg.value();
        let value_json = if value.is_integer() {
            serde_json::json!(value.to_integer())
        } else {
            serde_json::json!(*value.numer() as f64 / *value.denom() as f64)
        };
        serde_json::json!({ "matched": matched, "value": value_json })
    }
}

/// A set of matched edges together with its value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    matched: BTreeSet<EdgeId>,
    value: Rational64,
}

impl Assignment {
    pub fn empty() -> Assignment {
        Assignment {
            matched: BTreeSet::new(),
            value: Rational64::from_integer(0),
        }
    }

    /// Builds an assignment from edge ids, computing its value. Panics on an
    /// out-of-range edge id; feasibility is not checked here.
    pub fn from_edges(inst: &Instance, edges: impl IntoIterator<Item = EdgeId>) -> Assignment {
        let matched: BTreeSet<EdgeId> = edges.into_iter().collect();
        for &e in &matched {
            assert!(e < inst.n_edges(), "edge id {e} out of range");
        }
        let value = inst.value_of(matched.iter());
        Assignment { matched, value }
    }

    pub fn matched(&self) -> &BTreeSet<EdgeId> {
        &self.matched
    }

    pub fn value(&self) -> Rational64 {
        self.value
    }

    pub fn size(&self) -> usize {
        self.matched.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matched.is_empty()
    }
}

/// Incrementally grown matching with per-constraint load counts. This is what
/// the greedy, brute-force, and online solvers use internally; `can_add`
/// touches only the constraints containing the candidate edge.
#[derive(Clone)]
pub struct MatchBuilder<'a> {
    inst: &'a Instance,
    counts: Vec<u64>,
    matched: BTreeSet<EdgeId>,
    value: Rational64,
}

impl<'a> MatchBuilder<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        MatchBuilder {
            inst,
            counts: vec![0; inst.constraints().len()],
            matched: BTreeSet::new(),
            value: Rational64::from_integer(0),
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.matched.contains(&e)
    }

    pub fn can_add(&self, e: EdgeId) -> bool {
        !self.matched.contains(&e)
            && self.inst.constraints_of_edge(e).iter().all(|&ci| {
                self.counts[ci] + 1 <= self.inst.constraints()[ci].quota
            })
    }

    /// Constraints containing `e` that are already at quota.
    pub fn tight_constraints(&self, e: EdgeId) -> Vec<usize> {
        self.inst
            .constraints_of_edge(e)
            .iter()
            .copied()
            .filter(|&ci| self.counts[ci] >= self.inst.constraints()[ci].quota)
            .collect()
    }

    pub fn add(&mut self, e: EdgeId) {
        debug_assert!(self.can_add(e));
        self.matched.insert(e);
        self.value += self.inst.weight(e);
        for &ci in self.inst.constraints_of_edge(e) {
            self.counts[ci] += 1;
        }
    }

    pub fn remove(&mut self, e: EdgeId) {
        let was_in = self.matched.remove(&e);
        debug_assert!(was_in);
        self.value -= self.inst.weight(e);
        for &ci in self.inst.constraints_of_edge(e) {
            self.counts[ci] -= 1;
        }
    }

    pub fn size(&self) -> usize {
        self.matched.len()
    }

    pub fn value(&self) -> Rational64 {
        self.value
    }

    pub fn matched(&self) -> &BTreeSet<EdgeId> {
        &self.matched
    }

    pub fn assignment(&self) -> Assignment {
        Assignment {
            matched: self.matched.clone(),
            value: self.value,
        }
    }

    pub fn into_assignment(self) -> Assignment {
        Assignment {
            matched: self.matched,
            value: self.value,
        }
    }
}

#[cfg(test)]
mod tests;
