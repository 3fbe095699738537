//! Seeded random corpora shared by the property and acceptance suites.

use fairmatch_core::approx::{GmisInstance, Hyperedge};
use fairmatch_core::model::{EdgeId, Instance, InstanceBuilder};
use fairmatch_core::reductions::{MisGraph, RankingInstance, SimMatchInstance};
use num_rational::Rational64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn item(i: usize) -> String {
    format!("a{i}")
}

fn platform(p: usize) -> String {
    format!("p{p}")
}

/// Random many-to-one instance: ≤ `max_items` items, 1–3 platforms, at most
/// 3 (possibly crossing) classes per platform, so the measured platform-side
/// Δ is at most 3.
pub fn random_model1(seed: u64, max_items: usize) -> Instance {
    let mut rng = rng(seed);
    let n_items = rng.gen_range(2..=max_items);
    let n_platforms = rng.gen_range(1..=3);

    let mut b = InstanceBuilder::new()
        .items((0..n_items).map(item))
        .platforms((0..n_platforms).map(platform));
    let mut platform_edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_platforms];
    for i in 0..n_items {
        for p in 0..n_platforms {
            if rng.gen_bool(0.6) {
                b = b.edge(item(i), platform(p));
                platform_edges[p].push((i, p));
            }
        }
    }
    for (p, edges) in platform_edges.iter().enumerate() {
        b = b.platform_quota(platform(p), rng.gen_range(0..=(edges.len().max(1)) as u64));
        let n_classes = rng.gen_range(0..=3.min(edges.len()));
        for c in 0..n_classes {
            let members: Vec<(String, String)> = edges
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .map(|&(i, p)| (item(i), platform(p)))
                .collect();
            if members.is_empty() {
                continue;
            }
            let quota = rng.gen_range(0..=members.len() as u64);
            b = b.platform_class(format!("p{p}c{c}"), platform(p), members, quota);
        }
    }
    b.build().expect("random model-1 instance is well-formed")
}

/// Splits `edges` into laminar classes: a random partition into blocks plus
/// an optional covering parent class.
fn laminar_classes(
    rng: &mut ChaCha8Rng,
    edges: &[(usize, usize)],
) -> Vec<(Vec<(usize, usize)>, u64)> {
    let mut classes = Vec::new();
    if edges.is_empty() {
        return classes;
    }
    let mut shuffled: Vec<(usize, usize)> = edges.to_vec();
    shuffled.shuffle(rng);
    let n_blocks = rng.gen_range(1..=shuffled.len().min(3));
    let mut blocks: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_blocks];
    for (k, e) in shuffled.into_iter().enumerate() {
        blocks[k % n_blocks].push(e);
    }
    for block in &blocks {
        if !block.is_empty() && rng.gen_bool(0.7) {
            let quota = rng.gen_range(0..=block.len() as u64);
            classes.push((block.clone(), quota));
        }
    }
    if rng.gen_bool(0.4) {
        let quota = rng.gen_range(1..=edges.len() as u64);
        classes.push((edges.to_vec(), quota));
    }
    classes
}

/// Random instance whose class family is laminar for every owner: ≤ 20
/// edges, ≤ 3 platforms, many-to-many with item classes.
pub fn random_laminar(seed: u64) -> Instance {
    let mut rng = rng(seed);
    let n_platforms = rng.gen_range(1..=3);
    let n_items = rng.gen_range(2..=20 / n_platforms.max(2));

    let mut item_edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_items];
    let mut platform_edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_platforms];
    let mut b = InstanceBuilder::new()
        .items((0..n_items).map(item))
        .platforms((0..n_platforms).map(platform));
    for i in 0..n_items {
        for p in 0..n_platforms {
            if rng.gen_bool(0.5) {
                b = b.edge(item(i), platform(p));
                item_edges[i].push((i, p));
                platform_edges[p].push((i, p));
            }
        }
    }

    for (p, edges) in platform_edges.iter().enumerate() {
        b = b.platform_quota(platform(p), rng.gen_range(0..=(edges.len().max(1)) as u64));
        for (k, (members, quota)) in laminar_classes(&mut rng, edges).into_iter().enumerate() {
            let members: Vec<(String, String)> =
                members.into_iter().map(|(i, p)| (item(i), platform(p))).collect();
            b = b.platform_class(format!("p{p}c{k}"), platform(p), members, quota);
        }
    }
    for (i, edges) in item_edges.iter().enumerate() {
        b = b.item_quota(item(i), rng.gen_range(1..=2));
        for (k, (members, quota)) in laminar_classes(&mut rng, edges).into_iter().enumerate() {
            let members: Vec<(String, String)> =
                members.into_iter().map(|(i, p)| (item(i), platform(p))).collect();
            b = b.item_class(format!("a{i}c{k}"), item(i), members, quota);
        }
    }
    b.build().expect("random laminar instance is well-formed")
}

/// Random single-platform instance: ≤ `max_items` items, ≤ `max_classes`
/// classes (possibly crossing).
pub fn random_single_platform(seed: u64, max_items: usize, max_classes: usize) -> Instance {
    let mut rng = rng(seed);
    let n_items = rng.gen_range(1..=max_items);
    let mut b = InstanceBuilder::new()
        .items((0..n_items).map(item))
        .platforms(["p"])
        .platform_quota("p", rng.gen_range(0..=n_items as u64));
    for i in 0..n_items {
        b = b.edge(item(i), "p");
    }
    let n_classes = rng.gen_range(0..=max_classes);
    for c in 0..n_classes {
        let members: Vec<(String, String)> = (0..n_items)
            .filter(|_| rng.gen_bool(0.5))
            .map(|i| (item(i), "p".to_string()))
            .collect();
        if members.is_empty() {
            continue;
        }
        let quota = rng.gen_range(0..=members.len() as u64);
        b = b.platform_class(format!("c{c}"), "p", members, quota);
    }
    b.build().expect("random single-platform instance is well-formed")
}

pub fn random_gmis(seed: u64, max_vertices: usize, max_hyperedges: usize) -> GmisInstance {
    let mut rng = rng(seed);
    let n = rng.gen_range(1..=max_vertices);
    let n_edges = rng.gen_range(0..=max_hyperedges);
    let mut hyperedges = Vec::new();
    for _ in 0..n_edges {
        let members: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if members.is_empty() {
            continue;
        }
        let capacity = rng.gen_range(0..=members.len() as u64);
        hyperedges.push(Hyperedge { members, capacity });
    }
    let weights = if rng.gen_bool(0.3) {
        Some((0..n).map(|_| Rational64::from_integer(rng.gen_range(0..=4))).collect())
    } else {
        None
    };
    GmisInstance::new(n, hyperedges, weights)
}

pub fn random_mis_graph(seed: u64, max_vertices: usize) -> MisGraph {
    let mut rng = rng(seed);
    let n = rng.gen_range(1..=max_vertices);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(0.4) {
                edges.push((u, v));
            }
        }
    }
    MisGraph::new((0..n).map(|v| format!("v{v}")).collect(), edges)
}

pub fn random_ranking(seed: u64) -> RankingInstance {
    let mut rng = rng(seed);
    let m = rng.gen_range(1..=3);
    let n = rng.gen_range(1..=2.min(m));
    let n_props = rng.gen_range(0..=2);
    let mut properties = Vec::new();
    let mut prefix_quotas = Vec::new();
    for _ in 0..n_props {
        let members: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.6)).collect();
        if members.is_empty() {
            continue;
        }
        let mut quotas = Vec::with_capacity(n);
        let mut q = rng.gen_range(0..=1u64);
        for _ in 0..n {
            q += rng.gen_range(0..=1u64);
            quotas.push(q);
        }
        properties.push(members);
        prefix_quotas.push(quotas);
    }
    let values = if rng.gen_bool(0.5) {
        Some(
            (0..m)
                .map(|_| {
                    (0..n)
                        .map(|_| Rational64::from_integer(rng.gen_range(0..=5)))
                        .collect()
                })
                .collect(),
        )
    } else {
        None
    };
    RankingInstance {
        m,
        n,
        values,
        properties,
        prefix_quotas,
    }
}

pub fn random_simmatch(seed: u64) -> SimMatchInstance {
    let mut rng = rng(seed);
    let nx = rng.gen_range(1..=3);
    let nd = rng.gen_range(1..=3);
    let mut edges = Vec::new();
    for x in 0..nx {
        for d in 0..nd {
            if rng.gen_bool(0.6) {
                edges.push((x, d));
            }
        }
    }
    let n_family = rng.gen_range(0..=2);
    let mut family = Vec::new();
    for _ in 0..n_family {
        let members: Vec<usize> = (0..nx).filter(|_| rng.gen_bool(0.6)).collect();
        if !members.is_empty() {
            family.push(members);
        }
    }
    SimMatchInstance {
        x_labels: (0..nx).map(|x| format!("x{x}")).collect(),
        d_labels: (0..nd).map(|d| format!("d{d}")).collect(),
        edges,
        family,
    }
}

/// Per-edge count helper used when comparing measured Δ values.
pub fn edge_ids(inst: &Instance) -> Vec<EdgeId> {
    (0..inst.n_edges()).collect()
}
