//! Laminarity testing, laminar forests, and partitioning a class collection
//! into laminar families.
//!
//! A family of sets is laminar when every pair is nested or disjoint. The
//! approximation guarantees are parameterized by Δ, the number of laminar
//! families of classes containing an edge; [`partition_classes`] derives a
//! valid (not necessarily minimum) Δ from a raw class collection by greedy
//! first-fit over classes in descending size.

use crate::model::{EdgeId, Instance, Owner};
use crate::SolveError;
use std::collections::HashMap;

/// Relation between two sorted sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SetRelation {
    Disjoint,
    AContainsB,
    BContainsA,
    Equal,
    Crossing,
}

/// Single-pass relation test on sorted, deduplicated slices.
fn relation(a: &[EdgeId], b: &[EdgeId]) -> SetRelation {
    let (mut i, mut j) = (0, 0);
    let mut common = 0usize;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    match (common == a.len(), common == b.len(), common == 0) {
        (true, true, _) => SetRelation::Equal,
        (false, true, _) => SetRelation::AContainsB,
        (true, false, _) => SetRelation::BContainsA,
        (false, false, true) => SetRelation::Disjoint,
        (false, false, false) => SetRelation::Crossing,
    }
}

fn compatible(a: &[EdgeId], b: &[EdgeId]) -> bool {
    relation(a, b) != SetRelation::Crossing
}

/// True iff every pair of member sets is nested or disjoint.
/// Sets must be sorted and deduplicated (as produced by validation).
pub fn is_laminar(classes: &[Vec<EdgeId>]) -> bool {
    for (i, a) in classes.iter().enumerate() {
        for b in &classes[i + 1..] {
            if !compatible(a, b) {
                return false;
            }
        }
    }
    true
}

/// Containment forest over a laminar class list: each class points to the
/// smallest class strictly containing it. Classes with identical member sets
/// are chained in insertion order (earlier = parent).
#[derive(Clone, Debug)]
pub struct LaminarForest {
    /// Parent index per class; `None` for roots.
    pub parent: Vec<Option<usize>>,
    /// For each member element, the deepest class containing it.
    pub deepest: HashMap<EdgeId, usize>,
    /// Children lists, mirror of `parent`.
    pub children: Vec<Vec<usize>>,
}

impl LaminarForest {
    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_none())
            .map(|(i, _)| i)
    }
}

/// Builds the containment forest of a laminar family.
pub fn build_forest(classes: &[Vec<EdgeId>]) -> Result<LaminarForest, SolveError> {
    if !is_laminar(classes) {
        return Err(SolveError::NotLaminar {
            owner: "input class list".into(),
        });
    }
    // Process in descending size, insertion order among equals, so that any
    // candidate parent has already been placed.
    let mut order: Vec<usize> = (0..classes.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(classes[i].len()), i));

    let mut parent = vec![None; classes.len()];
    for (pos, &ci) in order.iter().enumerate() {
        let mut best: Option<usize> = None;
        for &cj in &order[..pos] {
            let rel = relation(&classes[cj], &classes[ci]);
            let contains = matches!(rel, SetRelation::AContainsB | SetRelation::Equal);
            if contains {
                // Smallest container wins. Equal-size containers are equal
                // sets (laminarity), so taking the most recently placed one
                // chains duplicates in insertion order.
                let better = match best {
                    None => true,
                    Some(b) => classes[cj].len() <= classes[b].len(),
                };
                if better {
                    best = Some(cj);
                }
            }
        }
        parent[ci] = best;
    }

    let mut children = vec![Vec::new(); classes.len()];
    for (c, p) in parent.iter().enumerate() {
        if let Some(p) = *p {
            children[p].push(c);
        }
    }

    // Deepest class per element: walk in processing order; later (smaller or
    // equal, inserted-later) classes overwrite their ancestors.
    let mut deepest = HashMap::new();
    for &ci in &order {
        for &e in &classes[ci] {
            deepest.insert(e, ci);
        }
    }

    Ok(LaminarForest {
        parent,
        deepest,
        children,
    })
}

/// A partition of a class collection into laminar families.
#[derive(Clone, Debug)]
pub struct LaminarPartition {
    /// Class indices per family; families are pairwise disjoint and cover
    /// every input class.
    pub families: Vec<Vec<usize>>,
}

impl LaminarPartition {
    pub fn family_count(&self) -> usize {
        self.families.len()
    }

    /// Number of families containing a class that contains `element`.
    pub fn delta_of(&self, classes: &[Vec<EdgeId>], element: EdgeId) -> usize {
        self.families
            .iter()
            .filter(|family| {
                family
                    .iter()
                    .any(|&ci| classes[ci].binary_search(&element).is_ok())
            })
            .count()
    }
}

/// Greedy first-fit partition into laminar families: classes are processed in
/// descending size (insertion order among equals) and placed into the first
/// family they keep laminar, else a new family is opened. Any valid partition
/// yields a valid Δ; minimality is not required for the guarantees.
pub fn partition_classes(classes: &[Vec<EdgeId>]) -> LaminarPartition {
    let mut order: Vec<usize> = (0..classes.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(classes[i].len()), i));

    let mut families: Vec<Vec<usize>> = Vec::new();
    for &ci in &order {
        let slot = families.iter_mut().find(|family| {
            family
                .iter()
                .all(|&cj| compatible(&classes[cj], &classes[ci]))
        });
        match slot {
            Some(family) => family.push(ci),
            None => families.push(vec![ci]),
        }
    }
    LaminarPartition { families }
}

/// Per-edge Δ for a whole instance. Each owner's classes — explicit classes
/// plus the folded whole-neighborhood quota — are partitioned separately;
/// `delta_of(e)` sums the families containing `e` on the item side and the
/// platform side. `max_delta` is the Δ the approximation guarantees use.
#[derive(Clone, Debug)]
pub struct DeltaReport {
    pub per_edge: Vec<usize>,
    /// Families containing the edge on the platform side only.
    pub platform_side: Vec<usize>,
    pub max_delta: usize,
    pub max_platform_delta: usize,
}

pub fn instance_delta(inst: &Instance) -> DeltaReport {
    let mut per_edge = vec![0usize; inst.n_edges()];
    let mut platform_side = vec![0usize; inst.n_edges()];

    for p in 0..inst.n_platforms() {
        let mut classes: Vec<Vec<EdgeId>> = vec![inst.platform_edges(p).to_vec()];
        classes.extend(inst.classes_of_platform(p).map(|c| c.members.clone()));
        let partition = partition_classes(&classes);
        for &e in inst.platform_edges(p) {
            let d = partition.delta_of(&classes, e);
            per_edge[e] += d;
            platform_side[e] = d;
        }
    }
    for i in 0..inst.n_items() {
        let mut classes: Vec<Vec<EdgeId>> = vec![inst.item_edges(i).to_vec()];
        classes.extend(inst.classes_of_item(i).map(|c| c.members.clone()));
        let partition = partition_classes(&classes);
        for &e in inst.item_edges(i) {
            per_edge[e] += partition.delta_of(&classes, e);
        }
    }

    DeltaReport {
        max_delta: per_edge.iter().copied().max().unwrap_or(0),
        max_platform_delta: platform_side.iter().copied().max().unwrap_or(0),
        per_edge,
        platform_side,
    }
}

/// True when every owner's explicit class family is laminar, the setting in
/// which the flow solver is exact and the random-arrival guarantee applies.
pub fn instance_is_laminar(inst: &Instance) -> bool {
    laminarity_violation(inst).is_none()
}

/// The first owner whose classes are not laminar, if any.
pub fn laminarity_violation(inst: &Instance) -> Option<Owner> {
    for p in 0..inst.n_platforms() {
        let classes: Vec<Vec<EdgeId>> = inst
            .classes_of_platform(p)
            .map(|c| c.members.clone())
            .collect();
        if !is_laminar(&classes) {
            return Some(Owner::Platform(p));
        }
    }
    for i in 0..inst.n_items() {
        let classes: Vec<Vec<EdgeId>> = inst.classes_of_item(i).map(|c| c.members.clone()).collect();
        if !is_laminar(&classes) {
            return Some(Owner::Item(i));
        }
    }
    None
}
