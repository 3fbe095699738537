//! Exact solvers: the brute-force oracle, the max-flow solver for laminar
//! classes, and the type-based integer program for platforms with few classes.

mod flow;
mod type_ip;

pub use flow::{build_network, flow_laminar, FlowArc, FlowNetwork};
pub use type_ip::{type_ip, TypeEntry, TypeTable, DEFAULT_CLASS_CAP};

use crate::model::{Assignment, Instance, MatchBuilder};
use crate::SolveError;
use num_rational::Rational64;

/// Default edge-count cap for [`brute_force`].
pub const DEFAULT_EDGE_LIMIT: usize = 24;

/// Optimal assignment by depth-first search over include/exclude decisions
/// per edge, with feasibility pruning and an optimistic weight bound. Among
/// optima the lexicographically smallest edge set is returned.
pub fn brute_force(inst: &Instance, limit: usize) -> Result<Assignment, SolveError> {
    if inst.n_edges() > limit {
        return Err(SolveError::InstanceTooLarge {
            edges: inst.n_edges(),
            limit,
        });
    }

    // suffix[k] = total weight of edges k.. — the optimistic remainder.
    let m = inst.n_edges();
    let mut suffix = vec![Rational64::from_integer(0); m + 1];
    for e in (0..m).rev() {
        suffix[e] = suffix[e + 1] + inst.weight(e);
    }

    struct Search<'a> {
        inst: &'a Instance,
        suffix: Vec<Rational64>,
        best: Assignment,
    }

    impl Search<'_> {
        fn go(&mut self, state: &mut MatchBuilder<'_>, idx: usize) {
            // Prune only strictly dominated branches: ties must still be
            // explored so the lexicographic tie-break sees every optimum.
            if state.value() + self.suffix[idx] < self.best.value() {
                return;
            }
            if idx == self.inst.n_edges() {
                let better = state.value() > self.best.value()
                    || (state.value() == self.best.value()
                        && state.matched().iter().lt(self.best.matched().iter()));
                if better {
                    self.best = state.assignment();
                }
                return;
            }
            if state.can_add(idx) {
                state.add(idx);
                self.go(state, idx + 1);
                state.remove(idx);
            }
            self.go(state, idx + 1);
        }
    }

    let mut search = Search {
        inst,
        suffix,
        best: Assignment::empty(),
    };
    let mut state = MatchBuilder::new(inst);
    search.go(&mut state, 0);
    Ok(search.best)
}

/// Sequential composition of the type-based IP over all platforms: exact on
/// each single-platform subproblem, 1/2-approximate overall for many-to-one
/// instances with at most `class_cap` classes per platform.
pub fn half_approx_multi(inst: &Instance, class_cap: usize) -> Result<Assignment, SolveError> {
    for p in 0..inst.n_platforms() {
        let classes = inst.classes_of_platform(p).count();
        if classes > class_cap {
            return Err(SolveError::TooManyClasses {
                platform: inst.platforms()[p].to_string(),
                classes,
                cap: class_cap,
            });
        }
    }
    let order: Vec<usize> = (0..inst.n_platforms()).collect();
    crate::approx::sequential_compose(inst, &order, |sub| type_ip(sub, class_cap))
}
