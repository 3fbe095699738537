use super::*;
use crate::fixtures::{inst_a, inst_b};
use crate::model::InstanceBuilder;
use proptest::prelude::*;

fn pair(a: &str, p: &str) -> (String, String) {
    (a.to_string(), p.to_string())
}

fn asg(inst: &Instance, names: &[(&str, &str)]) -> Assignment {
    Assignment::from_edges(
        inst,
        names.iter().map(|(a, p)| {
            inst.edge_id(inst.item_id(a).unwrap(), inst.platform_id(p).unwrap())
                .unwrap()
        }),
    )
}

#[test]
fn class_member_must_be_incident_to_owner() {
    let err = InstanceBuilder::new()
        .items(["a1"])
        .platforms(["p1", "p2"])
        .edge("a1", "p1")
        .edge("a1", "p2")
        .platform_class("C", "p1", [pair("a1", "p2")], 1)
        .build()
        .unwrap_err();
    assert!(err
        .violations
        .iter()
        .any(|v| matches!(v, Violation::ClassMemberNotIncident { .. })));
}

#[test]
fn well_formed_instance_round_trips_unchanged() {
    let inst = inst_a();
    let again = Instance::from_raw(&inst.to_raw()).unwrap();
    assert_eq!(inst, again);
}

#[test]
fn negative_quota_is_rejected() {
    let mut raw = inst_a().to_raw();
    raw.platform_classes[0].quota = -1;
    let err = Instance::from_raw(&raw).unwrap_err();
    assert!(err
        .violations
        .iter()
        .any(|v| matches!(v, Violation::NegativeQuota { .. })));

    let mut raw = inst_a().to_raw();
    raw.platform_quota.insert("p".into(), -1);
    assert!(Instance::from_raw(&raw).is_err());
}

#[test]
fn validation_collects_all_violations() {
    let err = InstanceBuilder::new()
        .items(["a1", "a1"])
        .platforms(["p"])
        .edge("a1", "p")
        .edge("ghost", "p")
        .platform_class("C", "p", [], 2)
        .item_quota("nobody", 1)
        .build()
        .unwrap_err();
    assert!(err.violations.len() >= 3, "got: {err}");
}

#[test]
fn unknown_json_keys_are_rejected() {
    let text = r#"{"items": [], "platforms": [], "edges": [], "bogus": 1}"#;
    assert!(Instance::from_json_str(text).is_err());
}

#[test]
fn empty_assignment_is_feasible() {
    for inst in [inst_a(), inst_b()] {
        assert!(inst.is_feasible(&Assignment::empty()));
    }
}

#[test]
fn inst_a_feasibility_examples() {
    let inst = inst_a();
    // C1 = {a1,a2} with quota 1 is violated by matching both.
    assert!(!inst.is_feasible(&asg(&inst, &[("a1", "p"), ("a2", "p")])));
    assert!(inst.is_feasible(&asg(&inst, &[("a1", "p"), ("a3", "p")])));
}

#[test]
fn inst_a_can_extend_examples() {
    let inst = inst_a();
    let a1_only = asg(&inst, &[("a1", "p")]);
    let e_a2 = inst.edge_id(1, 0).unwrap();
    let e_a3 = inst.edge_id(2, 0).unwrap();
    assert!(!inst.can_extend(&a1_only, e_a2));
    assert!(inst.can_extend(&a1_only, e_a3));
    // From an empty assignment any edge with all incident quotas >= 1 extends.
    assert!(inst.can_extend(&Assignment::empty(), e_a2));
}

#[test]
fn assignment_value_examples() {
    let five = InstanceBuilder::new()
        .items(["a1", "a2", "a3", "a4", "a5"])
        .platforms(["p1", "p2", "p3", "p4", "p5"])
        .edge("a1", "p1")
        .edge("a2", "p2")
        .edge("a3", "p3")
        .edge("a4", "p4")
        .edge("a5", "p5")
        .build()
        .unwrap();
    let all = Assignment::from_edges(&five, 0..5);
    assert_eq!(all.value(), Rational64::from_integer(5));

    let weighted = InstanceBuilder::new()
        .items(["a1", "a2"])
        .platforms(["p"])
        .edge("a1", "p")
        .edge("a2", "p")
        .platform_quota("p", 2)
        .weight("a1", "p", Rational64::from_integer(2))
        .weight("a2", "p", Rational64::from_integer(3))
        .build()
        .unwrap();
    let both = Assignment::from_edges(&weighted, 0..2);
    assert_eq!(both.value(), Rational64::from_integer(5));
    assert_eq!(Assignment::empty().value(), Rational64::from_integer(0));
}

#[test]
fn fractional_weights_parse_and_round_trip() {
    let inst = InstanceBuilder::new()
        .items(["a"])
        .platforms(["p"])
        .edge("a", "p")
        .weight("a", "p", Rational64::new(3, 2))
        .build()
        .unwrap();
    assert_eq!(inst.weight(0), Rational64::new(3, 2));
    let reparsed = Instance::from_json_str(&inst.to_json_string()).unwrap();
    assert_eq!(inst, reparsed);
}

#[test]
fn match_builder_tracks_counts_and_value() {
    let inst = inst_a();
    let mut mb = MatchBuilder::new(&inst);
    assert!(mb.can_add(0));
    mb.add(0);
    assert!(!mb.can_add(1), "C1 is tight after a1");
    assert!(mb.can_add(2));
    mb.add(2);
    assert_eq!(mb.size(), 2);
    let tight = mb.tight_constraints(1);
    assert!(!tight.is_empty());
    mb.remove(0);
    assert!(!mb.can_add(1), "C2 is still tight via a3");
    mb.remove(2);
    assert!(mb.can_add(1));
    assert_eq!(mb.assignment().size(), 0);
}

// Random well-formed raw instances for the property suite: up to 5 items,
// 3 platforms, dense random edges, random quotas and classes.
fn arb_instance() -> impl Strategy<Value = Instance> {
    let sizes = (1usize..=5, 1usize..=3);
    sizes
        .prop_flat_map(|(n_items, n_platforms)| {
            let n_edges = n_items * n_platforms;
            (
                Just(n_items),
                Just(n_platforms),
                proptest::collection::vec(any::<bool>(), n_edges),
                proptest::collection::vec(0u64..=3, n_platforms),
                proptest::collection::vec(0u64..=2, n_items),
                proptest::collection::vec(
                    (proptest::collection::vec(any::<bool>(), n_edges), 0u64..=2),
                    0..=3,
                ),
                proptest::option::of(proptest::collection::vec(0i64..=4, n_edges)),
            )
        })
        .prop_map(
            |(n_items, n_platforms, edge_mask, pq, iq, classes, weights)| {
                let mut b = InstanceBuilder::new()
                    .items((0..n_items).map(|i| format!("a{i}")))
                    .platforms((0..n_platforms).map(|p| format!("p{p}")));
                let mut edges = Vec::new();
                for i in 0..n_items {
                    for p in 0..n_platforms {
                        if edge_mask[i * n_platforms + p] {
                            edges.push((format!("a{i}"), format!("p{p}")));
                            b = b.edge(format!("a{i}"), format!("p{p}"));
                        }
                    }
                }
                for (p, q) in pq.iter().enumerate() {
                    b = b.platform_quota(format!("p{p}"), *q);
                }
                for (i, q) in iq.iter().enumerate() {
                    b = b.item_quota(format!("a{i}"), *q);
                }
                for (ci, (mask, quota)) in classes.iter().enumerate() {
                    // Attach each class to platform 0's incident edges.
                    let members: Vec<(String, String)> = edges
                        .iter()
                        .enumerate()
                        .filter(|(k, (_, p))| mask[*k % mask.len()] && p == "p0")
                        .map(|(_, e)| e.clone())
                        .collect();
                    if !members.is_empty() {
                        b = b.platform_class(format!("C{ci}"), "p0", members, *quota);
                    }
                }
                if let Some(ws) = weights {
                    for (k, (a, p)) in edges.iter().enumerate() {
                        b = b.weight(a.clone(), p.clone(), Rational64::from_integer(ws[k % ws.len()]));
                    }
                }
                b.build().expect("generated instance is well-formed")
            },
        )
}

proptest! {
    // Feasibility is monotone downward: any subset of a feasible set is feasible.
    #[test]
    fn feasibility_monotone_downward(inst in arb_instance(), mask in proptest::collection::vec(any::<bool>(), 16)) {
        let all: Vec<EdgeId> = (0..inst.n_edges()).collect();
        let m = Assignment::from_edges(&inst, all.iter().copied());
        let sub: Vec<EdgeId> = all
            .iter()
            .copied()
            .filter(|e| mask[e % mask.len()])
            .collect();
        let m_sub = Assignment::from_edges(&inst, sub);
        if inst.is_feasible(&m) {
            prop_assert!(inst.is_feasible(&m_sub));
        }
    }

    // The incremental check agrees with a full recheck of the extended set.
    #[test]
    fn can_extend_equals_full_recheck(inst in arb_instance(), mask in proptest::collection::vec(any::<bool>(), 16)) {
        let chosen: Vec<EdgeId> = (0..inst.n_edges())
            .filter(|e| mask[e % mask.len()])
            .collect();
        let m = Assignment::from_edges(&inst, chosen.iter().copied());
        prop_assume!(inst.is_feasible(&m));
        for e in 0..inst.n_edges() {
            if m.matched().contains(&e) {
                continue;
            }
            let mut extended: Vec<EdgeId> = m.matched().iter().copied().collect();
            extended.push(e);
            let full = inst.is_feasible(&Assignment::from_edges(&inst, extended));
            prop_assert_eq!(inst.can_extend(&m, e), full);
        }
    }

    // parse(serialize(inst)) is structurally identical to inst.
    #[test]
    fn serialization_round_trip(inst in arb_instance()) {
        let text = inst.to_json_string();
        let back = Instance::from_json_str(&text).unwrap();
        prop_assert_eq!(inst, back);
    }
}
