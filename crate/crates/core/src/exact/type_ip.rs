//! Exact single-platform solver for instances with few classes: one integer
//! variable per item *type* (class-incidence signature), solved by
//! branch-and-bound with a greedy capacity-relaxation bound.

use crate::model::{Assignment, EdgeId, Instance};
use crate::SolveError;
use std::collections::BTreeMap;

/// Default cap on the number of classes (variables are 2^classes at worst).
pub const DEFAULT_CLASS_CAP: usize = 16;

#[derive(Clone, Debug)]
pub struct TypeEntry {
    /// Bitmask over the platform's classes (bit k set ⇔ in class k).
    pub signature: u32,
    /// Edges of this type, ordered by item index (decode order).
    pub members: Vec<EdgeId>,
    /// Variable upper bound: min(|members|, tightest quota in the signature).
    pub upper: u64,
}

/// The items of a single-platform instance partitioned into class-incidence
/// types, together with the quota data the IP runs against.
#[derive(Clone, Debug)]
pub struct TypeTable {
    pub types: Vec<TypeEntry>,
    pub class_quotas: Vec<u64>,
    pub platform_quota: u64,
}

pub fn build_type_table(inst: &Instance, class_cap: usize) -> Result<TypeTable, SolveError> {
    if inst.n_platforms() != 1 {
        return Err(SolveError::SinglePlatformRequired {
            algo: "type_ip",
            platforms: inst.n_platforms(),
        });
    }
    let classes: Vec<&crate::model::ClassConstraint> = inst.classes_of_platform(0).collect();
    if classes.len() > class_cap {
        return Err(SolveError::TooManyClasses {
            platform: inst.platforms()[0].to_string(),
            classes: classes.len(),
            cap: class_cap,
        });
    }

    // An edge is usable unless some item-side constraint on it has quota 0
    // (with one platform, item classes are singletons: quota >= 1 is vacuous).
    let usable = |e: EdgeId| {
        inst.constraints_of_edge(e)
            .iter()
            .all(|&ci| {
                let c = &inst.constraints()[ci];
                !c.owner.is_item() || c.quota >= 1
            })
    };

    let mut groups: BTreeMap<u32, Vec<EdgeId>> = BTreeMap::new();
    for e in 0..inst.n_edges() {
        if !usable(e) {
            continue;
        }
        let mut signature = 0u32;
        for (k, class) in classes.iter().enumerate() {
            if class.members.binary_search(&e).is_ok() {
                signature |= 1 << k;
            }
        }
        groups.entry(signature).or_default().push(e);
    }

    let class_quotas: Vec<u64> = classes.iter().map(|c| c.quota).collect();
    let platform_quota = inst.platform_quota(0);
    let types = groups
        .into_iter()
        .map(|(signature, mut members)| {
            members.sort_by_key(|&e| inst.edge_endpoints(e).0);
            let tightest = (0..class_quotas.len())
                .filter(|k| signature & (1 << k) != 0)
                .map(|k| class_quotas[k])
                .min()
                .unwrap_or(u64::MAX);
            let upper = (members.len() as u64).min(tightest).min(platform_quota);
            TypeEntry {
                signature,
                members,
                upper,
            }
        })
        .collect();

    Ok(TypeTable {
        types,
        class_quotas,
        platform_quota,
    })
}

/// Exact optimum for an unweighted single-platform instance with at most
/// `class_cap` classes. Type counts are decoded to concrete items lowest
/// index first.
pub fn type_ip(inst: &Instance, class_cap: usize) -> Result<Assignment, SolveError> {
    if inst.is_weighted() {
        return Err(SolveError::WeightedNotSupported { algo: "type_ip" });
    }
    let table = build_type_table(inst, class_cap)?;

    struct Search<'t> {
        table: &'t TypeTable,
        counts: Vec<u64>,
        best_counts: Vec<u64>,
        best: u64,
    }

    impl Search<'_> {
        /// Optimistic value of types k.. against the remaining capacities:
        /// each type greedily takes its tightest remaining quota, ignoring
        /// that siblings share classes.
        fn bound(&self, k: usize, rem_classes: &[u64], rem_platform: u64) -> u64 {
            let mut total = 0u64;
            for t in &self.table.types[k..] {
                let tightest = (0..rem_classes.len())
                    .filter(|c| t.signature & (1 << c) != 0)
                    .map(|c| rem_classes[c])
                    .min()
                    .unwrap_or(u64::MAX);
                total += t.upper.min(tightest);
            }
            total.min(rem_platform)
        }

        fn go(&mut self, k: usize, taken: u64, rem_classes: &mut [u64], rem_platform: u64) {
            if taken + self.bound(k, rem_classes, rem_platform) <= self.best
                && !self.best_counts.is_empty()
            {
                return;
            }
            if k == self.table.types.len() {
                if taken > self.best || self.best_counts.is_empty() {
                    self.best = taken;
                    self.best_counts = self.counts.clone();
                }
                return;
            }
            let t = &self.table.types[k];
            let tightest = (0..rem_classes.len())
                .filter(|c| t.signature & (1 << c) != 0)
                .map(|c| rem_classes[c])
                .min()
                .unwrap_or(u64::MAX);
            let max_take = t.upper.min(tightest).min(rem_platform);
            // Greedy-optimistic: higher counts first.
            for x in (0..=max_take).rev() {
                self.counts[k] = x;
                for c in 0..rem_classes.len() {
                    if t.signature & (1 << c) != 0 {
                        rem_classes[c] -= x;
                    }
                }
                self.go(k + 1, taken + x, rem_classes, rem_platform - x);
                for c in 0..rem_classes.len() {
                    if t.signature & (1 << c) != 0 {
                        rem_classes[c] += x;
                    }
                }
            }
            self.counts[k] = 0;
        }
    }

    let mut search = Search {
        table: &table,
        counts: vec![0; table.types.len()],
        best_counts: Vec::new(),
        best: 0,
    };
    let mut rem_classes = table.class_quotas.clone();
    search.go(0, 0, &mut rem_classes, table.platform_quota);

    let mut matched = Vec::new();
    for (t, &count) in table.types.iter().zip(search.best_counts.iter()) {
        matched.extend(t.members.iter().take(count as usize));
    }
    Ok(Assignment::from_edges(inst, matched))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{brute_force, DEFAULT_EDGE_LIMIT};
    use crate::fixtures::{inst_a, inst_b, inst_c};
    use crate::model::InstanceBuilder;
    use num_rational::Rational64;

    fn pair(a: &str, p: &str) -> (String, String) {
        (a.to_string(), p.to_string())
    }

    #[test]
    fn type_ip_matches_brute_force_on_fixtures() {
        for inst in [inst_a(), inst_b(), inst_c()] {
            let ip = type_ip(&inst, DEFAULT_CLASS_CAP).unwrap();
            let brute = brute_force(&inst, DEFAULT_EDGE_LIMIT).unwrap();
            assert_eq!(ip.value(), brute.value());
            assert!(inst.is_feasible(&ip));
        }
    }

    #[test]
    fn inst_a_has_four_types() {
        // Two classes split the three items into types {C1}, {C1,C2}, {C2};
        // the empty signature has no members.
        let table = build_type_table(&inst_a(), DEFAULT_CLASS_CAP).unwrap();
        assert_eq!(table.types.len(), 3);
        let ip = type_ip(&inst_a(), DEFAULT_CLASS_CAP).unwrap();
        assert_eq!(ip.value(), Rational64::from_integer(2));
    }

    #[test]
    fn single_class_over_all_items_forces_quota() {
        let n = 6;
        let k = 2;
        let members: Vec<(String, String)> =
            (0..n).map(|i| pair(&format!("a{i}"), "p")).collect();
        let mut b = InstanceBuilder::new()
            .items((0..n).map(|i| format!("a{i}")))
            .platforms(["p"])
            .platform_quota("p", n as u64);
        for i in 0..n {
            b = b.edge(format!("a{i}"), "p");
        }
        let inst = b
            .platform_class("C", "p", members, k)
            .build()
            .unwrap();
        let ip = type_ip(&inst, DEFAULT_CLASS_CAP).unwrap();
        assert_eq!(ip.value(), Rational64::from_integer(k as i64));
    }

    #[test]
    fn zero_classes_gives_min_of_quota_and_items() {
        let inst = InstanceBuilder::new()
            .items(["a1", "a2", "a3"])
            .platforms(["p"])
            .edge("a1", "p")
            .edge("a2", "p")
            .edge("a3", "p")
            .platform_quota("p", 2)
            .build()
            .unwrap();
        let ip = type_ip(&inst, DEFAULT_CLASS_CAP).unwrap();
        assert_eq!(ip.value(), Rational64::from_integer(2));
        // Lowest-index-first decode.
        assert_eq!(ip.matched().iter().copied().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn class_cap_is_enforced() {
        assert!(matches!(
            type_ip(&inst_b(), 2),
            Err(SolveError::TooManyClasses { classes: 3, cap: 2, .. })
        ));
    }

    #[test]
    fn multi_platform_is_rejected() {
        let inst = crate::fixtures::inst_d();
        assert!(matches!(
            type_ip(&inst, DEFAULT_CLASS_CAP),
            Err(SolveError::SinglePlatformRequired { platforms: 2, .. })
        ));
    }

    #[test]
    fn item_quota_zero_blocks_items() {
        let inst = InstanceBuilder::new()
            .items(["a1", "a2"])
            .platforms(["p"])
            .edge("a1", "p")
            .edge("a2", "p")
            .platform_quota("p", 2)
            .item_quota("a1", 0)
            .build()
            .unwrap();
        let ip = type_ip(&inst, DEFAULT_CLASS_CAP).unwrap();
        assert_eq!(ip.value(), Rational64::from_integer(1));
        assert_eq!(ip.matched().iter().copied().collect::<Vec<_>>(), vec![1]);
    }
}
