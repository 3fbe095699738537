//! Approximation algorithms: greedy maximal independent sets on capacitated
//! hypergraphs (1/Δ), the edge-item reduction turning multi-platform CMM into
//! a single-platform GMIS (1/(Δ+1) overall), the weighted greedy variant, the
//! bounded-average-degree algorithm (r/(4Δ)), and sequential composition of a
//! single-platform solver over all platforms (α/(1+α)).

use crate::laminar::LaminarPartition;
use crate::model::{Assignment, EdgeId, Instance, PlatformId, RawClass, RawInstance};
use crate::SolveError;
use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeSet;

/// A capacitated hyperedge: at most `capacity` members may be selected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperedge {
    pub members: Vec<usize>,
    pub capacity: u64,
}

/// A generalized maximum independent set instance: pick the largest vertex
/// set S with |S ∩ e| ≤ f(e) for every hyperedge e.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GmisInstance {
    vertex_count: usize,
    hyperedges: Vec<Hyperedge>,
    weights: Option<Vec<Rational64>>,
    incident: Vec<Vec<usize>>,
}

impl GmisInstance {
    pub fn new(
        vertex_count: usize,
        hyperedges: Vec<Hyperedge>,
        weights: Option<Vec<Rational64>>,
    ) -> GmisInstance {
        let mut hyperedges = hyperedges;
        for e in &mut hyperedges {
            e.members.sort_unstable();
            e.members.dedup();
            assert!(e.members.iter().all(|&v| v < vertex_count));
        }
        if let Some(w) = &weights {
            assert_eq!(w.len(), vertex_count);
        }
        let mut incident = vec![Vec::new(); vertex_count];
        for (k, e) in hyperedges.iter().enumerate() {
            for &v in &e.members {
                incident[v].push(k);
            }
        }
        GmisInstance {
            vertex_count,
            hyperedges,
            weights,
            incident,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn hyperedges(&self) -> &[Hyperedge] {
        &self.hyperedges
    }

    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn weights(&self) -> Option<&[Rational64]> {
        self.weights.as_deref()
    }

    pub fn weight(&self, v: usize) -> Rational64 {
        match &self.weights {
            Some(w) => w[v],
            None => Rational64::from_integer(1),
        }
    }

    pub fn is_feasible_set(&self, set: &BTreeSet<usize>) -> bool {
        self.hyperedges.iter().all(|e| {
            let used = e.members.iter().filter(|v| set.contains(v)).count() as u64;
            used <= e.capacity
        })
    }

    pub fn set_value(&self, set: &BTreeSet<usize>) -> Rational64 {
        set.iter().map(|&v| self.weight(v)).sum()
    }
}

/// Scans `order` once, adding each vertex whose addition keeps every incident
/// hyperedge within capacity. The result is maximal: nothing outside it can
/// be added. `order` must be a permutation of the vertices.
pub fn greedy_gmis(g: &GmisInstance, order: &[usize]) -> Vec<usize> {
    assert_eq!(order.len(), g.vertex_count(), "order must be a permutation");
    let mut seen = vec![false; g.vertex_count()];
    for &v in order {
        assert!(!seen[v], "order must be a permutation");
        seen[v] = true;
    }

    let mut counts = vec![0u64; g.hyperedges().len()];
    let mut chosen = Vec::new();
    for &v in order {
        let fits = g
            .incident(v)
            .iter()
            .all(|&k| counts[k] + 1 <= g.hyperedges()[k].capacity);
        if fits {
            for &k in g.incident(v) {
                counts[k] += 1;
            }
            chosen.push(v);
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Exhaustive GMIS optimum (weighted), independent of the greedy path; the
/// oracle the approximation bounds are checked against. Exponential — only
/// for small instances.
pub fn brute_force_gmis(g: &GmisInstance) -> BTreeSet<usize> {
    fn go(
        g: &GmisInstance,
        v: usize,
        counts: &mut Vec<u64>,
        current: &mut BTreeSet<usize>,
        best: &mut (Rational64, BTreeSet<usize>),
    ) {
        if v == g.vertex_count() {
            let value = g.set_value(current);
            if value > best.0 {
                *best = (value, current.clone());
            }
            return;
        }
        let fits = g
            .incident(v)
            .iter()
            .all(|&k| counts[k] + 1 <= g.hyperedges()[k].capacity);
        if fits {
            for &k in g.incident(v) {
                counts[k] += 1;
            }
            current.insert(v);
            go(g, v + 1, counts, current, best);
            current.remove(&v);
            for &k in g.incident(v) {
                counts[k] -= 1;
            }
        }
        go(g, v + 1, counts, current, best);
    }

    let mut counts = vec![0; g.hyperedges().len()];
    let mut current = BTreeSet::new();
    let mut best = (Rational64::from_integer(0), BTreeSet::new());
    go(g, 0, &mut counts, &mut current, &mut best);
    best.1
}

/// Records how a CMM instance was turned into a single-platform GMIS: vertex
/// v of the reduced instance is instance edge v, and each hyperedge came from
/// one entry of the unified constraint view.
#[derive(Clone, Debug)]
pub struct ReductionMap {
    pub edge_of_vertex: Vec<EdgeId>,
    /// Index into `Instance::constraints()` per hyperedge.
    pub constraint_of_hyperedge: Vec<usize>,
}

impl ReductionMap {
    pub fn decode(&self, inst: &Instance, vertices: &[usize]) -> Assignment {
        Assignment::from_edges(inst, vertices.iter().map(|&v| self.edge_of_vertex[v]))
    }
}

/// Replaces every edge (a, p) by a synthetic vertex on one dummy platform.
/// Every class, item quota, and platform quota becomes a capacitated
/// hyperedge over the synthetic vertices; vertex weights are edge weights.
/// Single-member hyperedges with capacity ≥ 1 are vacuous and dropped.
pub fn edge_item_reduction(inst: &Instance) -> (GmisInstance, ReductionMap) {
    let mut hyperedges = Vec::new();
    let mut constraint_of_hyperedge = Vec::new();
    for (ci, c) in inst.constraints().iter().enumerate() {
        if c.members.len() == 1 && c.quota >= 1 {
            continue;
        }
        hyperedges.push(Hyperedge {
            members: c.members.clone(),
            capacity: c.quota,
        });
        constraint_of_hyperedge.push(ci);
    }
    let weights = if inst.is_weighted() {
        Some((0..inst.n_edges()).map(|e| inst.weight(e)).collect())
    } else {
        None
    };
    let g = GmisInstance::new(inst.n_edges(), hyperedges, weights);
    let map = ReductionMap {
        edge_of_vertex: (0..inst.n_edges()).collect(),
        constraint_of_hyperedge,
    };
    (g, map)
}

/// How greedy scans the reduced vertices.
#[derive(Clone, Debug)]
pub enum ScanOrder {
    /// Instance insertion order (edge ids ascending).
    Input,
    /// Nonincreasing weight, ties by insertion order.
    WeightDescending,
    /// Seeded uniform shuffle.
    Random(u64),
    /// Caller-supplied permutation of the edge ids.
    Explicit(Vec<EdgeId>),
}

impl ScanOrder {
    fn materialize(&self, g: &GmisInstance) -> Vec<usize> {
        let n = g.vertex_count();
        match self {
            ScanOrder::Input => (0..n).collect(),
            ScanOrder::WeightDescending => {
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by_key(|&v| (std::cmp::Reverse(g.weight(v)), v));
                order
            }
            ScanOrder::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut rng);
                order
            }
            ScanOrder::Explicit(order) => order.clone(),
        }
    }
}

/// Greedy CMM via the edge-item reduction: feasible, maximal, and within
/// 1/(Δ+1) of the optimum when every edge lies in at most Δ+1 laminar
/// families of constraints.
pub fn greedy_cmm(inst: &Instance, order: &ScanOrder) -> Assignment {
    let (g, map) = edge_item_reduction(inst);
    let scan = order.materialize(&g);
    let chosen = greedy_gmis(&g, &scan);
    map.decode(inst, &chosen)
}

/// The bounded-average-degree algorithm. A vertex's degree is the number of
/// laminar families (of `partition`, over `g`'s hyperedges) containing it;
/// for every guess OPT′ ∈ {1..n} the vertices of degree above ⌈2·Σdeg/OPT′⌉
/// are dropped and greedy runs on the rest. Returns the largest result,
/// lowest guess winning ties.
pub fn avg_degree_gmis(g: &GmisInstance, partition: &LaminarPartition) -> Vec<usize> {
    let n = g.vertex_count();
    if n == 0 {
        return Vec::new();
    }
    let member_sets: Vec<Vec<usize>> = g
        .hyperedges()
        .iter()
        .map(|e| e.members.clone())
        .collect();
    let degrees: Vec<usize> = (0..n)
        .map(|v| partition.delta_of(&member_sets, v))
        .collect();
    let degree_sum: usize = degrees.iter().sum();

    let run_guess = |guess: usize| -> Vec<usize> {
        // ⌈f·Δ_avg⌉ with f = 2/r′ and r′ = guess/n simplifies to ⌈2·Σdeg/guess⌉.
        let cutoff = (2 * degree_sum).div_ceil(guess);
        let kept: Vec<usize> = (0..n).filter(|&v| degrees[v] <= cutoff).collect();
        // Greedy on the induced sub-instance: scanning only kept vertices
        // against the full hyperedges is equivalent to restricting them.
        let mut counts = vec![0u64; g.hyperedges().len()];
        let mut chosen = Vec::new();
        for v in kept {
            let fits = g
                .incident(v)
                .iter()
                .all(|&k| counts[k] + 1 <= g.hyperedges()[k].capacity);
            if fits {
                for &k in g.incident(v) {
                    counts[k] += 1;
                }
                chosen.push(v);
            }
        }
        chosen
    };

    // Guesses are independent; the argmax tie-breaks on the lowest guess, so
    // the parallel reduction is identical to serial execution.
    (1..=n)
        .into_par_iter()
        .map(|guess| (guess, run_guess(guess)))
        .min_by_key(|(guess, result)| (std::cmp::Reverse(result.len()), *guess))
        .map(|(_, result)| result)
        .unwrap_or_default()
}

/// Runs a single-platform solver over the platforms in `platform_order`,
/// restricting each solve to the still-unmatched items. With an exact
/// single-platform solver this is a 1/2-approximation for many-to-one
/// instances; with an α-approximate one, α/(1+α).
pub fn sequential_compose<F>(
    inst: &Instance,
    platform_order: &[PlatformId],
    mut single_solver: F,
) -> Result<Assignment, SolveError>
where
    F: FnMut(&Instance) -> Result<Assignment, SolveError>,
{
    if !inst.is_many_to_one() {
        return Err(SolveError::ManyToOneRequired {
            algo: "sequential_compose",
        });
    }
    {
        let mut seen = vec![false; inst.n_platforms()];
        assert_eq!(platform_order.len(), inst.n_platforms());
        for &p in platform_order {
            assert!(!seen[p], "platform_order must be a permutation");
            seen[p] = true;
        }
    }

    let mut item_taken = vec![false; inst.n_items()];
    let mut matched: Vec<EdgeId> = Vec::new();

    for &p in platform_order {
        let platform_name = inst.platforms()[p].clone();
        let sub_edges: Vec<EdgeId> = inst
            .platform_edges(p)
            .iter()
            .copied()
            .filter(|&e| !item_taken[inst.edge_endpoints(e).0])
            .collect();
        if sub_edges.is_empty() {
            continue;
        }

        let sub_items: Vec<String> = sub_edges
            .iter()
            .map(|&e| inst.items()[inst.edge_endpoints(e).0].clone())
            .collect();
        let edge_pair = |e: EdgeId| {
            let (a, _) = inst.edge_names(e);
            (a.to_string(), platform_name.clone())
        };
        let classes: Vec<RawClass> = inst
            .classes_of_platform(p)
            .filter_map(|c| {
                let members: Vec<(String, String)> = c
                    .members
                    .iter()
                    .copied()
                    .filter(|e| sub_edges.contains(e))
                    .map(edge_pair)
                    .collect();
                if members.is_empty() {
                    None
                } else {
                    Some(RawClass {
                        id: c.id.clone(),
                        owner: platform_name.clone(),
                        members,
                        quota: c.quota as i64,
                    })
                }
            })
            .collect();
        let raw = RawInstance {
            items: sub_items,
            platforms: vec![platform_name.clone()],
            edges: sub_edges.iter().map(|&e| edge_pair(e)).collect(),
            platform_quota: [(platform_name.clone(), inst.platform_quota(p) as i64)]
                .into_iter()
                .collect(),
            item_quota: Default::default(),
            platform_classes: classes,
            item_classes: Vec::new(),
            edge_weight: if inst.is_weighted() {
                Some(
                    sub_edges
                        .iter()
                        .map(|&e| crate::model::RawWeight {
                            edge: edge_pair(e),
                            weight: crate::model::RawRatio::from_rational(inst.weight(e)),
                        })
                        .collect(),
                )
            } else {
                None
            },
        };
        let sub = Instance::from_raw(&raw).expect("restricted sub-instance is well-formed");
        let sub_assignment = single_solver(&sub)?;

        for &se in sub_assignment.matched() {
            let (item_name, _) = sub.edge_names(se);
            let i = inst.item_id(item_name).expect("item exists in parent");
            let e = inst.edge_id(i, p).expect("edge exists in parent");
            item_taken[i] = true;
            matched.push(e);
        }
    }

    Ok(Assignment::from_edges(inst, matched))
}
