//! Canonical desk-scale instances shared by the unit, property, and
//! acceptance suites.
//!
//! - INST-A: one platform, two crossing classes (greedy order matters)
//! - INST-B: the triangle independent-set instance (three pairwise classes)
//! - INST-C: one platform with a nested (laminar) class chain
//! - INST-D / INST-E: two platforms sharing one item, all quotas 1

use crate::model::{Instance, InstanceBuilder};

fn pair(a: &str, p: &str) -> (String, String) {
    (a.to_string(), p.to_string())
}

/// Items a1,a2,a3 on platform p (quota 3) with crossing classes
/// C1 = {a1,a2} and C2 = {a2,a3}, both of quota 1. Optimum 2.
pub fn inst_a() -> Instance {
    InstanceBuilder::new()
        .items(["a1", "a2", "a3"])
        .platforms(["p"])
        .edge("a1", "p")
        .edge("a2", "p")
        .edge("a3", "p")
        .platform_quota("p", 3)
        .platform_class("C1", "p", [pair("a1", "p"), pair("a2", "p")], 1)
        .platform_class("C2", "p", [pair("a2", "p"), pair("a3", "p")], 1)
        .build()
        .expect("INST-A is well-formed")
}

/// The triangle: three items on one platform, one quota-1 class per
/// vertex pair. Optimum 1 (the independence number of K3).
pub fn inst_b() -> Instance {
    InstanceBuilder::new()
        .items(["a1", "a2", "a3"])
        .platforms(["p"])
        .edge("a1", "p")
        .edge("a2", "p")
        .edge("a3", "p")
        .platform_quota("p", 3)
        .platform_class("C12", "p", [pair("a1", "p"), pair("a2", "p")], 1)
        .platform_class("C13", "p", [pair("a1", "p"), pair("a3", "p")], 1)
        .platform_class("C23", "p", [pair("a2", "p"), pair("a3", "p")], 1)
        .build()
        .expect("INST-B is well-formed")
}

/// One platform of quota 2 with the laminar chain {a1,a2,a3} (quota 2)
/// ⊋ {a1,a2} (quota 1). Optimum 2.
pub fn inst_c() -> Instance {
    InstanceBuilder::new()
        .items(["a1", "a2", "a3"])
        .platforms(["p"])
        .edge("a1", "p")
        .edge("a2", "p")
        .edge("a3", "p")
        .platform_quota("p", 2)
        .platform_class(
            "Cbig",
            "p",
            [pair("a1", "p"), pair("a2", "p"), pair("a3", "p")],
            2,
        )
        .platform_class("Csmall", "p", [pair("a1", "p"), pair("a2", "p")], 1)
        .build()
        .expect("INST-C is well-formed")
}

/// Two platforms p1, p2; a1 adjacent to both, a2 only to p1; every quota 1,
/// no classes. Optimum 2 (a1→p2, a2→p1); a greedy platform sweep that hands
/// a1 to p1 gets only 1.
pub fn inst_d() -> Instance {
    InstanceBuilder::new()
        .items(["a1", "a2"])
        .platforms(["p1", "p2"])
        .edge("a1", "p1")
        .edge("a1", "p2")
        .edge("a2", "p1")
        .platform_quota("p1", 1)
        .platform_quota("p2", 1)
        .build()
        .expect("INST-D is well-formed")
}

/// Same graph as INST-D; used by the online suites where the arrival order
/// (a1,a2) vs (a2,a1) decides between values 1 and 2 under ranking p1 ≻ p2.
pub fn inst_e() -> Instance {
    inst_d()
}
