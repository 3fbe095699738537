//! Exact solver for laminar classes via a flow network.
//!
//! Flow runs source → item class tree (root = folded item quota) → edge node
//! → platform class tree (root = folded platform quota) → sink. Each class
//! node's single tree arc carries its quota, so an integral maximum flow is
//! exactly an optimal feasible assignment.

use crate::laminar::{build_forest, is_laminar};
use crate::model::{Assignment, EdgeId, Instance};
use crate::SolveError;

#[derive(Clone, Copy, Debug)]
pub struct FlowArc {
    pub from: usize,
    pub to: usize,
    pub capacity: u64,
}

/// The constructed network. Node 0 is the source, node 1 the sink.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    pub node_count: usize,
    pub source: usize,
    pub sink: usize,
    pub arcs: Vec<FlowArc>,
    /// Per instance edge: the arc entering its edge node (item side).
    pub edge_in_arc: Vec<usize>,
    /// Per instance edge: the arc leaving its edge node (platform side).
    pub edge_out_arc: Vec<usize>,
}

impl FlowNetwork {
    /// Integral maximum flow (Dinic) and the per-arc flow values.
    pub fn max_flow(&self) -> (u64, Vec<u64>) {
        let mut dinic = Dinic::new(self.node_count);
        let handles: Vec<usize> = self
            .arcs
            .iter()
            .map(|a| dinic.add_arc(a.from, a.to, a.capacity as i64))
            .collect();
        let value = dinic.max_flow(self.source, self.sink) as u64;
        let flows = handles.iter().map(|&h| dinic.flow_on(h) as u64).collect();
        (value, flows)
    }
}

/// Builds the laminar flow network. Fails with `NotLaminar` naming the first
/// offending owner when some owner's classes cross.
pub fn build_network(inst: &Instance) -> Result<FlowNetwork, SolveError> {
    let m = inst.n_edges();
    let clamp = |q: u64| q.min(m as u64); // flow never exceeds the edge count

    let mut arcs: Vec<FlowArc> = Vec::new();
    let mut node_count = 2usize; // 0 = source, 1 = sink
    let (source, sink) = (0usize, 1usize);
    let mut new_node = || {
        let id = node_count;
        node_count += 1;
        id
    };

    // Edge nodes.
    let edge_node: Vec<usize> = (0..m).map(|_| new_node()).collect();
    let mut edge_in_arc = vec![usize::MAX; m];
    let mut edge_out_arc = vec![usize::MAX; m];

    // Item side: folded quota root plus the explicit class tree.
    for i in 0..inst.n_items() {
        if inst.item_edges(i).is_empty() {
            continue;
        }
        let explicit: Vec<Vec<EdgeId>> =
            inst.classes_of_item(i).map(|c| c.members.clone()).collect();
        if !is_laminar(&explicit) {
            return Err(SolveError::NotLaminar {
                owner: format!("item {}", inst.items()[i]),
            });
        }
        let mut classes: Vec<Vec<EdgeId>> = vec![inst.item_edges(i).to_vec()];
        classes.extend(explicit);
        let mut quotas: Vec<u64> = vec![inst.item_quota(i)];
        quotas.extend(inst.classes_of_item(i).map(|c| c.quota));

        let forest = build_forest(&classes).expect("folded root keeps the family laminar");
        let nodes: Vec<usize> = classes.iter().map(|_| new_node()).collect();
        for (c, parent) in forest.parent.iter().enumerate() {
            let from = match parent {
                None => source, // only the folded root is parentless
                Some(p) => nodes[*p],
            };
            arcs.push(FlowArc {
                from,
                to: nodes[c],
                capacity: clamp(quotas[c]),
            });
        }
        for &e in inst.item_edges(i) {
            let deepest = forest.deepest[&e];
            edge_in_arc[e] = arcs.len();
            arcs.push(FlowArc {
                from: nodes[deepest],
                to: edge_node[e],
                capacity: 1,
            });
        }
    }

    // Platform side, mirrored into the sink.
    for p in 0..inst.n_platforms() {
        if inst.platform_edges(p).is_empty() {
            continue;
        }
        let explicit: Vec<Vec<EdgeId>> = inst
            .classes_of_platform(p)
            .map(|c| c.members.clone())
            .collect();
        if !is_laminar(&explicit) {
            return Err(SolveError::NotLaminar {
                owner: format!("platform {}", inst.platforms()[p]),
            });
        }
        let mut classes: Vec<Vec<EdgeId>> = vec![inst.platform_edges(p).to_vec()];
        classes.extend(explicit);
        let mut quotas: Vec<u64> = vec![inst.platform_quota(p)];
        quotas.extend(inst.classes_of_platform(p).map(|c| c.quota));

        let forest = build_forest(&classes).expect("folded root keeps the family laminar");
        let nodes: Vec<usize> = classes.iter().map(|_| new_node()).collect();
        for (c, parent) in forest.parent.iter().enumerate() {
            let to = match parent {
                None => sink,
                Some(pa) => nodes[*pa],
            };
            arcs.push(FlowArc {
                from: nodes[c],
                to,
                capacity: clamp(quotas[c]),
            });
        }
        for &e in inst.platform_edges(p) {
            let deepest = forest.deepest[&e];
            edge_out_arc[e] = arcs.len();
            arcs.push(FlowArc {
                from: edge_node[e],
                to: nodes[deepest],
                capacity: 1,
            });
        }
    }

    Ok(FlowNetwork {
        node_count,
        source,
        sink,
        arcs,
        edge_in_arc,
        edge_out_arc,
    })
}

/// Optimal assignment for unweighted instances whose class families are
/// laminar per owner: decodes an integral maximum flow of the network.
pub fn flow_laminar(inst: &Instance) -> Result<Assignment, SolveError> {
    if inst.is_weighted() {
        return Err(SolveError::WeightedNotSupported {
            algo: "flow_laminar",
        });
    }
    let network = build_network(inst)?;
    let (_, flows) = network.max_flow();
    let matched = (0..inst.n_edges()).filter(|&e| flows[network.edge_in_arc[e]] == 1);
    Ok(Assignment::from_edges(inst, matched))
}

/// Dinic's algorithm on an adjacency-list residual graph.
struct Dinic {
    // Arcs stored in pairs: forward at even indices, residual at odd.
    to: Vec<usize>,
    cap: Vec<i64>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic {
            to: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); n],
            level: vec![-1; n],
            iter: vec![0; n],
        }
    }

    fn add_arc(&mut self, u: usize, v: usize, c: i64) -> usize {
        let idx = self.to.len();
        self.to.push(v);
        self.cap.push(c);
        self.adj[u].push(idx);
        self.to.push(u);
        self.cap.push(0);
        self.adj[v].push(idx + 1);
        idx
    }

    fn flow_on(&self, arc: usize) -> i64 {
        self.cap[arc ^ 1]
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(-1);
        self.level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let v = self.to[a];
                if self.cap[a] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: i64) -> i64 {
        if u == t {
            return pushed;
        }
        while self.iter[u] < self.adj[u].len() {
            let a = self.adj[u][self.iter[u]];
            let v = self.to[a];
            if self.cap[a] > 0 && self.level[v] == self.level[u] + 1 {
                let d = self.dfs(v, t, pushed.min(self.cap[a]));
                if d > 0 {
                    self.cap[a] -= d;
                    self.cap[a ^ 1] += d;
                    return d;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        while self.bfs(s, t) {
            self.iter.fill(0);
            loop {
                let pushed = self.dfs(s, t, i64::MAX);
                if pushed == 0 {
                    break;
                }
                flow += pushed;
            }
        }
        flow
    }
}
