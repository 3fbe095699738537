//! Simultaneous matchings → CMM: given a bipartite graph (X ∪ D, E) and a
//! family F ⊆ 2^X, find the largest M ⊆ E such that M ∩ (C × D) is a matching
//! for every C ∈ F.

use crate::model::{Assignment, Instance, InstanceBuilder};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimMatchInstance {
    pub x_labels: Vec<String>,
    pub d_labels: Vec<String>,
    /// (x, d) index pairs.
    pub edges: Vec<(usize, usize)>,
    /// Family members as X-index sets.
    pub family: Vec<Vec<usize>>,
}

impl SimMatchInstance {
    pub fn validate(&self) -> Result<(), String> {
        for &(x, d) in &self.edges {
            if x >= self.x_labels.len() || d >= self.d_labels.len() {
                return Err("edge endpoint out of range".into());
            }
        }
        for (k, c) in self.family.iter().enumerate() {
            if c.iter().any(|&x| x >= self.x_labels.len()) {
                return Err(format!("family member {k} names an out-of-range vertex"));
            }
        }
        Ok(())
    }

    /// The defining check: for every C ∈ F, M ∩ (C × D) is a matching — no
    /// d ∈ D and no x ∈ C touches two of its edges.
    pub fn is_simultaneous(&self, chosen: &BTreeSet<usize>) -> bool {
        for c in &self.family {
            let in_c: Vec<(usize, usize)> = chosen
                .iter()
                .map(|&k| self.edges[k])
                .filter(|(x, _)| c.contains(x))
                .collect();
            let mut xs = BTreeSet::new();
            let mut ds = BTreeSet::new();
            for (x, d) in in_c {
                if !xs.insert(x) || !ds.insert(d) {
                    return false;
                }
            }
        }
        true
    }

    /// Exhaustive optimum straight from the definition — the source oracle.
    pub fn brute_force(&self) -> BTreeSet<usize> {
        assert!(self.edges.len() <= 20, "exponential oracle");
        let mut best = BTreeSet::new();
        for mask in 0u32..(1 << self.edges.len()) {
            let chosen: BTreeSet<usize> =
                (0..self.edges.len()).filter(|k| mask & (1 << k) != 0).collect();
            if chosen.len() > best.len() && self.is_simultaneous(&chosen) {
                best = chosen;
            }
        }
        best
    }
}

/// Decoder for [`simmatch_to_cmm`]: matched CMM edges are source edges.
#[derive(Clone, Debug)]
pub struct SimMatchDecoder {
    /// CMM edge id → source edge index.
    source_edge: Vec<usize>,
}

impl SimMatchDecoder {
    pub fn decode(&self, asg: &Assignment) -> BTreeSet<usize> {
        asg.matched().iter().map(|&e| self.source_edge[e]).collect()
    }
}

/// Platforms are D with quota |N(d)|; for every d and C ∈ F a quota-1 class
/// over (C ∩ N(d)) × {d}. On the X side, any x in some C gets a quota-1 class
/// over all its edges (its degree in M ∩ (C × D) equals its total degree);
/// unconstrained x keep item quota |N(x)|.
pub fn simmatch_to_cmm(s: &SimMatchInstance) -> (Instance, SimMatchDecoder) {
    s.validate().expect("simultaneous-matching instance must be valid");
    let x_name = |x: usize| format!("x_{}", s.x_labels[x]);
    let d_name = |d: usize| format!("d_{}", s.d_labels[d]);

    let mut b = InstanceBuilder::new()
        .items((0..s.x_labels.len()).map(x_name))
        .platforms((0..s.d_labels.len()).map(d_name));
    for &(x, d) in &s.edges {
        b = b.edge(x_name(x), d_name(d));
    }
    let degree_x = |x: usize| s.edges.iter().filter(|&&(a, _)| a == x).count() as u64;
    let degree_d = |d: usize| s.edges.iter().filter(|&&(_, b)| b == d).count() as u64;
    for d in 0..s.d_labels.len() {
        b = b.platform_quota(d_name(d), degree_d(d));
    }

    // Platform side: per d and C, at most one C-vertex.
    for d in 0..s.d_labels.len() {
        for (k, c) in s.family.iter().enumerate() {
            let members: Vec<(String, String)> = s
                .edges
                .iter()
                .filter(|&&(x, dd)| dd == d && c.contains(&x))
                .map(|&(x, dd)| (x_name(x), d_name(dd)))
                .collect();
            if !members.is_empty() {
                b = b.platform_class(format!("d{d}C{k}"), d_name(d), members, 1);
            }
        }
    }

    // Item side: x constrained by any C matches at most once in total.
    let constrained: BTreeSet<usize> = s.family.iter().flatten().copied().collect();
    for x in 0..s.x_labels.len() {
        let deg = degree_x(x);
        if deg == 0 {
            continue;
        }
        if constrained.contains(&x) {
            let members: Vec<(String, String)> = s
                .edges
                .iter()
                .filter(|&&(a, _)| a == x)
                .map(|&(a, d)| (x_name(a), d_name(d)))
                .collect();
            b = b
                .item_quota(x_name(x), deg)
                .item_class(format!("x{x}once"), x_name(x), members, 1);
        } else {
            b = b.item_quota(x_name(x), deg);
        }
    }

    let inst = b.build().expect("reduction output is well-formed");
    let source_edge: Vec<usize> = (0..inst.n_edges())
        .map(|e| {
            let (xi, di) = inst.edge_endpoints(e);
            s.edges
                .iter()
                .position(|&(x, d)| x_name(x) == inst.items()[xi] && d_name(d) == inst.platforms()[di])
                .expect("every CMM edge comes from a source edge")
        })
        .collect();
    (inst, SimMatchDecoder { source_edge })
}

/// On-disk form for the `reduce` subcommand.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSimMatch {
    pub x: Vec<String>,
    pub d: Vec<String>,
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub family: Vec<Vec<String>>,
}

impl RawSimMatch {
    pub fn to_simmatch(&self) -> Result<SimMatchInstance, String> {
        let find = |labels: &[String], name: &str| {
            labels
                .iter()
                .position(|l| l == name)
                .ok_or_else(|| format!("unknown vertex {name:?}"))
        };
        let edges = self
            .edges
            .iter()
            .map(|(x, d)| Ok((find(&self.x, x)?, find(&self.d, d)?)))
            .collect::<Result<Vec<_>, String>>()?;
        let family = self
            .family
            .iter()
            .map(|c| c.iter().map(|x| find(&self.x, x)).collect())
            .collect::<Result<Vec<_>, String>>()?;
        let s = SimMatchInstance {
            x_labels: self.x.clone(),
            d_labels: self.d.clone(),
            edges,
            family,
        };
        s.validate()?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{brute_force, DEFAULT_EDGE_LIMIT};

    fn labels(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    #[test]
    fn single_class_over_x_is_ordinary_matching() {
        // 3×3 with F = {X}: the optimum is a maximum bipartite matching.
        let s = SimMatchInstance {
            x_labels: labels("x", 3),
            d_labels: labels("d", 3),
            edges: vec![(0, 0), (0, 1), (1, 1), (2, 1), (2, 2)],
            family: vec![vec![0, 1, 2]],
        };
        let (inst, decoder) = simmatch_to_cmm(&s);
        let opt = brute_force(&inst, DEFAULT_EDGE_LIMIT).unwrap();
        let source_opt = s.brute_force();
        assert_eq!(opt.size(), source_opt.len());
        assert_eq!(opt.size(), 3);
        assert!(s.is_simultaneous(&decoder.decode(&opt)));
    }

    #[test]
    fn empty_family_keeps_every_edge() {
        let s = SimMatchInstance {
            x_labels: labels("x", 2),
            d_labels: labels("d", 2),
            edges: vec![(0, 0), (0, 1), (1, 0), (1, 1)],
            family: vec![],
        };
        let (inst, _) = simmatch_to_cmm(&s);
        let opt = brute_force(&inst, DEFAULT_EDGE_LIMIT).unwrap();
        assert_eq!(opt.size(), 4);
        assert_eq!(s.brute_force().len(), 4);
    }

    #[test]
    fn singleton_classes_match_definition_brute_force() {
        // F = {{x0}, {x1}, …}: each constrained vertex matches at most once.
        let s = SimMatchInstance {
            x_labels: labels("x", 3),
            d_labels: labels("d", 3),
            edges: vec![(0, 0), (0, 1), (1, 0), (1, 2), (2, 1), (2, 2)],
            family: vec![vec![0], vec![1], vec![2]],
        };
        let (inst, decoder) = simmatch_to_cmm(&s);
        let opt = brute_force(&inst, DEFAULT_EDGE_LIMIT).unwrap();
        let source_opt = s.brute_force();
        assert_eq!(opt.size(), source_opt.len());
        assert!(s.is_simultaneous(&decoder.decode(&opt)));
    }

    #[test]
    fn overlapping_family_members() {
        let s = SimMatchInstance {
            x_labels: labels("x", 3),
            d_labels: labels("d", 2),
            edges: vec![(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)],
            family: vec![vec![0, 1], vec![1, 2]],
        };
        let (inst, decoder) = simmatch_to_cmm(&s);
        let opt = brute_force(&inst, DEFAULT_EDGE_LIMIT).unwrap();
        let source_opt = s.brute_force();
        assert_eq!(opt.size(), source_opt.len());
        assert!(s.is_simultaneous(&decoder.decode(&opt)));
    }
}
