//! Constructive reductions between CMM and neighboring problems, each with a
//! decoder mapping CMM assignments back to source-problem solutions and an
//! independent brute-force oracle for the source problem (so equivalence is
//! testable without circularity).

mod ranking;
mod simmatch;

pub use ranking::{ranking_to_cmm, RankingDecoder, RankingInstance, RawRanking};
pub use simmatch::{simmatch_to_cmm, RawSimMatch, SimMatchDecoder, SimMatchInstance};

use crate::approx::{GmisInstance, Hyperedge};
use crate::model::{Assignment, Instance, InstanceBuilder, RawRatio};
use crate::SolveError;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A simple undirected graph, the input of the independent-set reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MisGraph {
    pub labels: Vec<String>,
    /// Vertex-index pairs, loop-free.
    pub edges: Vec<(usize, usize)>,
}

impl MisGraph {
    pub fn new(labels: Vec<String>, edges: Vec<(usize, usize)>) -> MisGraph {
        for &(u, v) in &edges {
            assert!(u < labels.len() && v < labels.len() && u != v);
        }
        MisGraph { labels, edges }
    }

    /// Adjacency-list text: one edge `u v` per line; a line with a single
    /// token declares an isolated vertex. `#` starts a comment.
    pub fn parse_text(text: &str) -> Result<MisGraph, String> {
        let mut labels: Vec<String> = Vec::new();
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let mut intern = |name: &str, labels: &mut Vec<String>| -> usize {
            *index.entry(name.to_string()).or_insert_with(|| {
                labels.push(name.to_string());
                labels.len() - 1
            })
        };
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens.as_slice() {
                [v] => {
                    intern(v, &mut labels);
                }
                [u, v] => {
                    if u == v {
                        return Err(format!("line {}: self-loop {u}", lineno + 1));
                    }
                    let ui = intern(u, &mut labels);
                    let vi = intern(v, &mut labels);
                    edges.push((ui, vi));
                }
                _ => return Err(format!("line {}: expected 1 or 2 tokens", lineno + 1)),
            }
        }
        Ok(MisGraph { labels, edges })
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.edges
            .iter()
            .any(|&(a, b)| (a, b) == (u, v) || (b, a) == (u, v))
    }

    /// Exhaustive maximum independent set — the reduction-free oracle.
    pub fn independence_brute(&self) -> Vec<usize> {
        let n = self.labels.len();
        let mut best: Vec<usize> = Vec::new();
        let mut current: Vec<usize> = Vec::new();
        fn go(g: &MisGraph, v: usize, current: &mut Vec<usize>, best: &mut Vec<usize>) {
            if v == g.labels.len() {
                if current.len() > best.len() {
                    *best = current.clone();
                }
                return;
            }
            if current.iter().all(|&u| !g.adjacent(u, v)) {
                current.push(v);
                go(g, v + 1, current, best);
                current.pop();
            }
            go(g, v + 1, current, best);
        }
        assert!(n <= 24, "brute-force independence is exponential");
        go(self, 0, &mut current, &mut best);
        best
    }
}

/// Decoder for [`mis_to_cmm`]: matched items are the chosen vertices.
#[derive(Clone, Debug)]
pub struct MisDecoder;

impl MisDecoder {
    pub fn decode(&self, inst: &Instance, asg: &Assignment) -> Vec<usize> {
        asg.matched()
            .iter()
            .map(|&e| inst.edge_endpoints(e).0)
            .collect()
    }
}

/// One platform with quota |V|; an item per vertex, all adjacent; a quota-1
/// class per graph edge. Size-k feasible assignments correspond exactly to
/// size-k independent sets.
pub fn mis_to_cmm(g: &MisGraph) -> (Instance, MisDecoder) {
    let mut b = InstanceBuilder::new()
        .items(g.labels.iter().cloned())
        .platforms(["p"])
        .platform_quota("p", g.labels.len() as u64);
    for label in &g.labels {
        b = b.edge(label.clone(), "p");
    }
    for (k, &(u, v)) in g.edges.iter().enumerate() {
        b = b.platform_class(
            format!("C{k}"),
            "p",
            [
                (g.labels[u].clone(), "p".to_string()),
                (g.labels[v].clone(), "p".to_string()),
            ],
            1,
        );
    }
    let inst = b.build().expect("reduction output is well-formed");
    (inst, MisDecoder)
}

/// Decoder for [`gmis_to_cmm`]: matched items are the chosen vertices.
#[derive(Clone, Debug)]
pub struct GmisDecoder;

impl GmisDecoder {
    pub fn decode(&self, inst: &Instance, asg: &Assignment) -> Vec<usize> {
        asg.matched()
            .iter()
            .map(|&e| inst.edge_endpoints(e).0)
            .collect()
    }
}

/// Single-platform CMM instance whose feasible item sets are exactly the
/// feasible vertex sets of `g` (value-preserving bijection).
pub fn gmis_to_cmm(g: &GmisInstance) -> (Instance, GmisDecoder) {
    let n = g.vertex_count();
    let name = |v: usize| format!("v{v}");
    let mut b = InstanceBuilder::new()
        .items((0..n).map(name))
        .platforms(["p"])
        .platform_quota("p", n as u64);
    for v in 0..n {
        b = b.edge(name(v), "p");
    }
    for (k, e) in g.hyperedges().iter().enumerate() {
        b = b.platform_class(
            format!("e{k}"),
            "p",
            e.members.iter().map(|&v| (name(v), "p".to_string())),
            e.capacity,
        );
    }
    if let Some(weights) = g.weights() {
        for (v, w) in weights.iter().enumerate() {
            b = b.weight(name(v), "p", *w);
        }
    }
    let inst = b.build().expect("reduction output is well-formed");
    (inst, GmisDecoder)
}

/// The literal single-platform form: vertices are the platform's edges,
/// hyperedges its classes (plus the folded quotas only where binding, so the
/// round trip through [`gmis_to_cmm`] is structurally the identity).
pub fn cmm_to_gmis(inst: &Instance) -> Result<(GmisInstance, ReverseMap), SolveError> {
    if inst.n_platforms() != 1 {
        return Err(SolveError::SinglePlatformRequired {
            algo: "cmm_to_gmis",
            platforms: inst.n_platforms(),
        });
    }
    let edges = inst.platform_edges(0);
    let vertex_of_edge: BTreeMap<usize, usize> =
        edges.iter().enumerate().map(|(v, &e)| (e, v)).collect();

    let mut hyperedges = Vec::new();
    for c in inst.classes_of_platform(0) {
        hyperedges.push(Hyperedge {
            members: c.members.iter().map(|e| vertex_of_edge[e]).collect(),
            capacity: c.quota,
        });
    }
    if (inst.platform_quota(0) as usize) < edges.len() {
        hyperedges.push(Hyperedge {
            members: (0..edges.len()).collect(),
            capacity: inst.platform_quota(0),
        });
    }
    // Item-side constraints are singletons here; only quota 0 binds.
    for (v, &e) in edges.iter().enumerate() {
        let blocked = inst.constraints_of_edge(e).iter().any(|&ci| {
            let c = &inst.constraints()[ci];
            c.owner.is_item() && c.quota == 0
        });
        if blocked {
            hyperedges.push(Hyperedge {
                members: vec![v],
                capacity: 0,
            });
        }
    }
    let weights = if inst.is_weighted() {
        Some(edges.iter().map(|&e| inst.weight(e)).collect())
    } else {
        None
    };
    let g = GmisInstance::new(edges.len(), hyperedges, weights);
    Ok((
        g,
        ReverseMap {
            edge_of_vertex: edges.to_vec(),
        },
    ))
}

/// Vertex → instance-edge map produced by [`cmm_to_gmis`].
#[derive(Clone, Debug)]
pub struct ReverseMap {
    pub edge_of_vertex: Vec<usize>,
}

impl ReverseMap {
    pub fn decode(&self, inst: &Instance, vertices: &[usize]) -> Assignment {
        Assignment::from_edges(inst, vertices.iter().map(|&v| self.edge_of_vertex[v]))
    }
}

/// On-disk form of a GMIS instance for the `reduce` subcommand.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGmis {
    pub vertices: Vec<String>,
    pub hyperedges: Vec<RawHyperedge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<String, RawRatio>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawHyperedge {
    pub members: Vec<String>,
    pub capacity: u64,
}

impl RawGmis {
    pub fn to_gmis(&self) -> Result<GmisInstance, String> {
        let index: BTreeMap<&str, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        if index.len() != self.vertices.len() {
            return Err("duplicate vertex name".into());
        }
        let mut hyperedges = Vec::new();
        for e in &self.hyperedges {
            let members: Result<Vec<usize>, String> = e
                .members
                .iter()
                .map(|m| {
                    index
                        .get(m.as_str())
                        .copied()
                        .ok_or_else(|| format!("unknown vertex {m:?}"))
                })
                .collect();
            hyperedges.push(Hyperedge {
                members: members?,
                capacity: e.capacity,
            });
        }
        let weights = match &self.weights {
            None => None,
            Some(map) => {
                let mut w = vec![Rational64::from_integer(1); self.vertices.len()];
                for (name, ratio) in map {
                    let &v = index
                        .get(name.as_str())
                        .ok_or_else(|| format!("unknown vertex {name:?}"))?;
                    w[v] = ratio.to_rational().map_err(|t| format!("bad weight {t:?}"))?;
                }
                Some(w)
            }
        };
        Ok(GmisInstance::new(self.vertices.len(), hyperedges, weights))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{brute_force, DEFAULT_EDGE_LIMIT};
    use crate::approx::brute_force_gmis;

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn triangle_reduces_to_inst_b_shape() {
        let g = MisGraph::new(labels(&["a1", "a2", "a3"]), vec![(0, 1), (0, 2), (1, 2)]);
        let (inst, decoder) = mis_to_cmm(&g);
        let opt = brute_force(&inst, DEFAULT_EDGE_LIMIT).unwrap();
        assert_eq!(opt.value(), Rational64::from_integer(1));
        assert_eq!(g.independence_brute().len(), 1);
        let chosen = decoder.decode(&inst, &opt);
        assert_eq!(chosen.len(), 1);
    }

    #[test]
    fn edgeless_graph_keeps_everything() {
        let g = MisGraph::new(labels(&["1", "2", "3", "4", "5"]), vec![]);
        let (inst, _) = mis_to_cmm(&g);
        let opt = brute_force(&inst, DEFAULT_EDGE_LIMIT).unwrap();
        assert_eq!(opt.value(), Rational64::from_integer(5));
    }

    #[test]
    fn path_p3_keeps_the_endpoints() {
        let g = MisGraph::new(labels(&["u", "mid", "w"]), vec![(0, 1), (1, 2)]);
        let (inst, decoder) = mis_to_cmm(&g);
        let opt = brute_force(&inst, DEFAULT_EDGE_LIMIT).unwrap();
        assert_eq!(opt.value(), Rational64::from_integer(2));
        let chosen = decoder.decode(&inst, &opt);
        assert_eq!(chosen, vec![0, 2]);
        // Decoded sets are always independent.
        for (i, &u) in chosen.iter().enumerate() {
            for &v in &chosen[i + 1..] {
                assert!(!g.adjacent(u, v));
            }
        }
    }

    #[test]
    fn mis_text_format_round_trip() {
        let text = "a b\nb c\nlonely\n# comment\na c # triangle closer\n";
        let g = MisGraph::parse_text(text).unwrap();
        assert_eq!(g.labels.len(), 4);
        assert_eq!(g.edges.len(), 3);
        assert!(MisGraph::parse_text("x x\n").is_err());
        assert!(MisGraph::parse_text("a b c\n").is_err());
    }

    #[test]
    fn gmis_round_trip_is_identity() {
        // INST-A in literal GMIS form.
        let g = GmisInstance::new(
            3,
            vec![
                Hyperedge { members: vec![0, 1], capacity: 1 },
                Hyperedge { members: vec![1, 2], capacity: 1 },
            ],
            None,
        );
        let (inst, _) = gmis_to_cmm(&g);
        let (back, map) = cmm_to_gmis(&inst).unwrap();
        assert_eq!(g, back);
        assert_eq!(map.edge_of_vertex, vec![0, 1, 2]);
    }

    #[test]
    fn vacuous_capacity_is_consistent_on_both_sides() {
        let g = GmisInstance::new(
            3,
            vec![Hyperedge { members: vec![0, 1, 2], capacity: 3 }],
            None,
        );
        let (inst, _) = gmis_to_cmm(&g);
        let opt_cmm = brute_force(&inst, DEFAULT_EDGE_LIMIT).unwrap();
        let opt_gmis = brute_force_gmis(&g);
        assert_eq!(opt_cmm.size(), opt_gmis.len());
        assert_eq!(opt_cmm.size(), 3);
    }

    #[test]
    fn gmis_and_cmm_brute_force_optima_agree() {
        // 8-vertex hypergraph with mixed capacities.
        let g = GmisInstance::new(
            8,
            vec![
                Hyperedge { members: vec![0, 1, 2, 3], capacity: 2 },
                Hyperedge { members: vec![2, 3, 4, 5], capacity: 1 },
                Hyperedge { members: vec![5, 6, 7], capacity: 2 },
                Hyperedge { members: vec![0, 7], capacity: 1 },
            ],
            None,
        );
        let (inst, decoder) = gmis_to_cmm(&g);
        let opt_cmm = brute_force(&inst, DEFAULT_EDGE_LIMIT).unwrap();
        let opt_gmis = brute_force_gmis(&g);
        assert_eq!(opt_cmm.size(), opt_gmis.len());
        let decoded: std::collections::BTreeSet<usize> =
            decoder.decode(&inst, &opt_cmm).into_iter().collect();
        assert!(g.is_feasible_set(&decoded));
    }

    #[test]
    fn blocked_items_survive_cmm_to_gmis() {
        let inst = InstanceBuilder::new()
            .items(["a", "b"])
            .platforms(["p"])
            .edge("a", "p")
            .edge("b", "p")
            .platform_quota("p", 2)
            .item_quota("a", 0)
            .build()
            .unwrap();
        let (g, map) = cmm_to_gmis(&inst).unwrap();
        let opt = brute_force_gmis(&g);
        assert_eq!(opt.len(), 1);
        let decoded = map.decode(&inst, &opt.iter().copied().collect::<Vec<_>>());
        assert!(inst.is_feasible(&decoded));
    }
}
