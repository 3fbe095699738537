//! Fair-ranking → CMM reduction: rank n of m items, maximizing total value,
//! with per-property prefix quotas U[p][k] bounding how many items of a
//! property may appear in the top k positions.

use crate::model::{Assignment, Instance, InstanceBuilder, RawRatio};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankingInstance {
    pub m: usize,
    pub n: usize,
    /// values[i][j] = value of item i ranked at position j (1 when absent).
    pub values: Option<Vec<Vec<Rational64>>>,
    /// Item-index sets sharing a property.
    pub properties: Vec<Vec<usize>>,
    /// prefix_quotas[p][k-1] caps property-p items in the top k positions;
    /// nondecreasing in k.
    pub prefix_quotas: Vec<Vec<u64>>,
}

impl RankingInstance {
    pub fn validate(&self) -> Result<(), String> {
        if self.n > self.m {
            return Err(format!("n = {} exceeds m = {}", self.n, self.m));
        }
        if self.properties.len() != self.prefix_quotas.len() {
            return Err("properties and prefix_quotas differ in length".into());
        }
        for (p, items) in self.properties.iter().enumerate() {
            if items.iter().any(|&i| i >= self.m) {
                return Err(format!("property {p} names an out-of-range item"));
            }
            let quotas = &self.prefix_quotas[p];
            if quotas.len() != self.n {
                return Err(format!("property {p} needs {} prefix quotas", self.n));
            }
            if quotas.windows(2).any(|w| w[0] > w[1]) {
                return Err(format!("property {p} has decreasing prefix quotas"));
            }
        }
        if let Some(values) = &self.values {
            if values.len() != self.m || values.iter().any(|row| row.len() != self.n) {
                return Err("values must be an m × n matrix".into());
            }
            if values.iter().flatten().any(|v| *v < Rational64::from_integer(0)) {
                return Err("values must be nonnegative".into());
            }
        }
        Ok(())
    }

    pub fn value(&self, item: usize, position: usize) -> Rational64 {
        match &self.values {
            Some(v) => v[item][position],
            None => Rational64::from_integer(1),
        }
    }

    /// True iff the partial ranking (position → item, injective) satisfies
    /// every prefix quota.
    pub fn ranking_is_fair(&self, placed: &[(usize, usize)]) -> bool {
        for (p, items) in self.properties.iter().enumerate() {
            for k in 1..=self.n {
                let in_prefix = placed
                    .iter()
                    .filter(|&&(item, pos)| pos < k && items.contains(&item))
                    .count() as u64;
                if in_prefix > self.prefix_quotas[p][k - 1] {
                    return false;
                }
            }
        }
        true
    }

    /// Exhaustive optimum over partial injective rankings — the source-side
    /// oracle. Exponential in n; keep m, n small.
    pub fn brute_force(&self) -> (Rational64, Vec<(usize, usize)>) {
        fn go(
            r: &RankingInstance,
            pos: usize,
            used: &mut Vec<bool>,
            placed: &mut Vec<(usize, usize)>,
            best: &mut (Rational64, Vec<(usize, usize)>),
        ) {
            if pos == r.n {
                let value: Rational64 = placed.iter().map(|&(i, j)| r.value(i, j)).sum();
                if value > best.0 || (value == best.0 && placed.len() < best.1.len()) {
                    *best = (value, placed.clone());
                }
                return;
            }
            go(r, pos + 1, used, placed, best); // leave the position empty
            for item in 0..r.m {
                if used[item] {
                    continue;
                }
                placed.push((item, pos));
                if r.ranking_is_fair(placed) {
                    used[item] = true;
                    go(r, pos + 1, used, placed, best);
                    used[item] = false;
                }
                placed.pop();
            }
        }
        let mut used = vec![false; self.m];
        let mut placed = Vec::new();
        let mut best = (Rational64::from_integer(0), Vec::new());
        go(self, 0, &mut used, &mut placed, &mut best);
        best
    }
}

/// Decoder for [`ranking_to_cmm`]: matched (item, position) copies form a
/// partial ranking, which the decoder re-verifies against the prefix quotas.
#[derive(Clone, Debug)]
pub struct RankingDecoder {
    m: usize,
    n: usize,
}

impl RankingDecoder {
    /// Returns (item, position) pairs, positions 0-based.
    pub fn decode(&self, inst: &Instance, asg: &Assignment) -> Vec<(usize, usize)> {
        let mut placed: Vec<(usize, usize)> = asg
            .matched()
            .iter()
            .map(|&e| {
                let item_idx = inst.edge_endpoints(e).0;
                (item_idx / self.n, item_idx % self.n)
            })
            .collect();
        placed.sort_by_key(|&(_, pos)| pos);
        assert!(placed.iter().all(|&(i, j)| i < self.m && j < self.n));
        placed
    }
}

/// One platform; an item copy (i, j) per item-position pair; quota-1 classes
/// per source item and per rank; one laminar chain of prefix classes per
/// property. Values W[i][j] ride along as edge weights.
pub fn ranking_to_cmm(r: &RankingInstance) -> (Instance, RankingDecoder) {
    r.validate().expect("ranking instance must be valid");
    let copy = |i: usize, j: usize| format!("i{i}r{j}");
    let mut b = InstanceBuilder::new()
        .items((0..r.m).flat_map(|i| (0..r.n).map(move |j| copy(i, j))))
        .platforms(["p"])
        .platform_quota("p", (r.m * r.n) as u64);
    for i in 0..r.m {
        for j in 0..r.n {
            b = b.edge(copy(i, j), "p");
        }
    }
    // An item is ranked at most once.
    for i in 0..r.m {
        b = b.platform_class(
            format!("item{i}"),
            "p",
            (0..r.n).map(|j| (copy(i, j), "p".to_string())),
            1,
        );
    }
    // A rank holds at most one item.
    for j in 0..r.n {
        b = b.platform_class(
            format!("rank{j}"),
            "p",
            (0..r.m).map(|i| (copy(i, j), "p".to_string())),
            1,
        );
    }
    // Per property: the nested prefix chain C_1 ⊆ C_2 ⊆ … with quotas U.
    for (p, items) in r.properties.iter().enumerate() {
        for k in 1..=r.n {
            b = b.platform_class(
                format!("prop{p}top{k}"),
                "p",
                items
                    .iter()
                    .flat_map(|&i| (0..k).map(move |j| (copy(i, j), "p".to_string()))),
                r.prefix_quotas[p][k - 1],
            );
        }
    }
    if r.values.is_some() {
        for i in 0..r.m {
            for j in 0..r.n {
                b = b.weight(copy(i, j), "p", r.value(i, j));
            }
        }
    }
    let inst = b.build().expect("reduction output is well-formed");
    (inst, RankingDecoder { m: r.m, n: r.n })
}

/// On-disk form for the `reduce` subcommand.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRanking {
    pub m: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Vec<RawRatio>>>,
    #[serde(default)]
    pub properties: Vec<Vec<usize>>,
    #[serde(default)]
    pub prefix_quotas: Vec<Vec<u64>>,
}

impl RawRanking {
    pub fn to_ranking(&self) -> Result<RankingInstance, String> {
        let values = match &self.values {
            None => None,
            Some(rows) => Some(
                rows.iter()
                    .map(|row| {
                        row.iter()
                            .map(|v| v.to_rational().map_err(|t| format!("bad value {t:?}")))
                            .collect::<Result<Vec<_>, String>>()
                    })
                    .collect::<Result<Vec<_>, String>>()?,
            ),
        };
        let r = RankingInstance {
            m: self.m,
            n: self.n,
            values,
            properties: self.properties.clone(),
            prefix_quotas: self.prefix_quotas.clone(),
        };
        r.validate()?;
        Ok(r)
    }
}
