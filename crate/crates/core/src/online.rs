//! Online arrival simulation: items arrive one by one (adversarial or
//! uniform-random order) and the greedy algorithm matches each arrival to as
//! many platforms as stay feasible, scanning a fixed platform ranking. Matched
//! edges are never removed. Competitive ratios are measured against the exact
//! offline optimum from the laminar flow solver.

use crate::exact::flow_laminar;
use crate::model::{Assignment, EdgeId, Instance, ItemId, MatchBuilder, PlatformId};
use crate::SolveError;
use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// The order in which items arrive.
#[derive(Clone, Debug)]
pub struct ArrivalOrder {
    pub sequence: Vec<ItemId>,
    pub provenance: Provenance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Explicit,
    UniformRandom { seed: u64 },
}

impl ArrivalOrder {
    pub fn explicit(sequence: Vec<ItemId>) -> ArrivalOrder {
        ArrivalOrder {
            sequence,
            provenance: Provenance::Explicit,
        }
    }

    /// A uniform permutation of all items, derived deterministically from `seed`.
    pub fn uniform_random(inst: &Instance, seed: u64) -> ArrivalOrder {
        let mut sequence: Vec<ItemId> = (0..inst.n_items()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        sequence.shuffle(&mut rng);
        ArrivalOrder {
            sequence,
            provenance: Provenance::UniformRandom { seed },
        }
    }
}

/// What happened when an arriving item scanned one platform.
#[derive(Clone, Debug)]
pub struct StepRecord {
    pub item: ItemId,
    pub platform: PlatformId,
    pub edge: EdgeId,
    pub outcome: StepOutcome,
}

#[derive(Clone, Debug)]
pub enum StepOutcome {
    Matched,
    /// Indices into `Instance::constraints()` that were at quota.
    Blocked { tight: Vec<usize> },
}

/// An online run: the assignment plus the per-step cause log.
#[derive(Clone, Debug)]
pub struct OnlineRun {
    pub assignment: Assignment,
    pub log: Vec<StepRecord>,
}

impl OnlineRun {
    /// Platforms the item ended up matched to.
    pub fn platforms_of(&self, inst: &Instance, item: ItemId) -> Vec<PlatformId> {
        self.assignment
            .matched()
            .iter()
            .map(|&e| inst.edge_endpoints(e))
            .filter(|&(a, _)| a == item)
            .map(|(_, p)| p)
            .collect()
    }

    pub fn blocked_causes(&self, item: ItemId, platform: PlatformId) -> Option<&[usize]> {
        self.log
            .iter()
            .find(|r| r.item == item && r.platform == platform)
            .and_then(|r| match &r.outcome {
                StepOutcome::Matched => None,
                StepOutcome::Blocked { tight } => Some(tight.as_slice()),
            })
    }
}

/// Processes items in arrival order; each arrival is matched to every
/// platform, scanned in `ranking` order, for which the matching stays
/// feasible. `order` must list distinct items (prefixes are allowed, so
/// irrevocability can be replayed); `ranking` must be a permutation of the
/// platforms. Unweighted instances only.
pub fn online_greedy(
    inst: &Instance,
    order: &ArrivalOrder,
    ranking: &[PlatformId],
) -> Result<OnlineRun, SolveError> {
    if inst.is_weighted() {
        return Err(SolveError::WeightedNotSupported {
            algo: "online_greedy",
        });
    }
    {
        let mut seen_items = vec![false; inst.n_items()];
        for &i in &order.sequence {
            assert!(!seen_items[i], "arrival order repeats an item");
            seen_items[i] = true;
        }
        let mut seen = vec![false; inst.n_platforms()];
        assert_eq!(ranking.len(), inst.n_platforms());
        for &p in ranking {
            assert!(!seen[p], "ranking must be a permutation");
            seen[p] = true;
        }
    }

    let mut state = MatchBuilder::new(inst);
    let mut log = Vec::new();
    for &item in &order.sequence {
        for &platform in ranking {
            let Some(edge) = inst.edge_id(item, platform) else {
                continue;
            };
            let outcome = if state.can_add(edge) {
                state.add(edge);
                StepOutcome::Matched
            } else {
                StepOutcome::Blocked {
                    tight: state.tight_constraints(edge),
                }
            };
            log.push(StepRecord {
                item,
                platform,
                edge,
                outcome,
            });
        }
    }
    Ok(OnlineRun {
        assignment: state.into_assignment(),
        log,
    })
}

/// Online greedy with the default (input-order) platform ranking. Works for
/// arbitrary — possibly non-laminar — classes and equals the offline greedy
/// scanned in arrival order on the edge-item reduction.
pub fn online_greedy_anymodel(
    inst: &Instance,
    order: &ArrivalOrder,
) -> Result<OnlineRun, SolveError> {
    let ranking: Vec<PlatformId> = (0..inst.n_platforms()).collect();
    let run = online_greedy(inst, order, &ranking)?;
    debug_assert_eq!(
        run.assignment,
        crate::approx::greedy_cmm(
            inst,
            &crate::approx::ScanOrder::Explicit(arrival_edge_order(inst, order, &ranking)),
        ),
        "online run diverged from the offline greedy in arrival order"
    );
    Ok(run)
}

/// The edge scan order induced by an arrival order: items in arrival
/// sequence, each item's edge block ordered by the platform ranking. Items
/// missing from a partial order are appended in index order so the result is
/// a permutation of the edges.
pub fn arrival_edge_order(
    inst: &Instance,
    order: &ArrivalOrder,
    ranking: &[PlatformId],
) -> Vec<EdgeId> {
    let mut arrived = vec![false; inst.n_items()];
    let mut scan = Vec::with_capacity(inst.n_edges());
    let push_item = |item: ItemId, scan: &mut Vec<EdgeId>| {
        for &p in ranking {
            if let Some(e) = inst.edge_id(item, p) {
                scan.push(e);
            }
        }
    };
    for &item in &order.sequence {
        arrived[item] = true;
        push_item(item, &mut scan);
    }
    for item in 0..inst.n_items() {
        if !arrived[item] {
            push_item(item, &mut scan);
        }
    }
    scan
}

/// Aggregated ALG/OPT ratios over random-arrival trials.
#[derive(Clone, Debug)]
pub struct CompetitiveReport {
    pub trials: usize,
    pub ratios: Vec<Rational64>,
    pub seeds: Vec<u64>,
    pub alg_values: Vec<u64>,
    pub opt_value: u64,
    /// Exact mean of the ratios.
    pub mean: Rational64,
    /// Sample standard deviation of the ratios.
    pub stddev: f64,
    pub min: Rational64,
    pub max: Rational64,
}

impl CompetitiveReport {
    pub fn mean_f64(&self) -> f64 {
        *self.mean.numer() as f64 / *self.mean.denom() as f64
    }

    /// CSV rows `trial,seed,alg_value,opt_value,ratio` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,seed,alg_value,opt_value,ratio\n");
        for t in 0..self.trials {
            let ratio = self.alg_values[t] as f64 / self.opt_value as f64;
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                t, self.seeds[t], self.alg_values[t], self.opt_value, ratio
            ));
        }
        out
    }
}

/// Counter-mode derivation of independent per-trial seeds from a master seed.
pub fn derive_seed(master_seed: u64, trial: u64) -> u64 {
    // splitmix64 on master ⊕ counter·φ.
    let mut z = master_seed ^ trial.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs `trials` uniform-random arrival orders and reports ALG/OPT per trial,
/// with OPT from the laminar flow solver. Trials run in parallel; the report
/// is identical to serial execution.
pub fn competitive_trials(
    inst: &Instance,
    trials: usize,
    master_seed: u64,
    ranking: &[PlatformId],
) -> Result<CompetitiveReport, SolveError> {
    let opt = flow_laminar(inst)?;
    let opt_value = opt.value().to_integer() as u64;
    if opt_value == 0 {
        return Err(SolveError::DegenerateOpt);
    }

    let per_trial: Vec<(u64, u64)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(master_seed, t);
            let order = ArrivalOrder::uniform_random(inst, seed);
            let run = online_greedy(inst, &order, ranking)
                .expect("competitive_trials verified the instance is unweighted via flow");
            (seed, run.assignment.value().to_integer() as u64)
        })
        .collect();

    let seeds: Vec<u64> = per_trial.iter().map(|&(s, _)| s).collect();
    let alg_values: Vec<u64> = per_trial.iter().map(|&(_, v)| v).collect();
    let ratios: Vec<Rational64> = alg_values
        .iter()
        .map(|&v| Rational64::new(v as i64, opt_value as i64))
        .collect();

    let mean = ratios.iter().sum::<Rational64>() / Rational64::from_integer(trials as i64);
    let mean_f = *mean.numer() as f64 / *mean.denom() as f64;
    let stddev = if trials > 1 {
        let ss: f64 = ratios
            .iter()
            .map(|r| {
                let x = *r.numer() as f64 / *r.denom() as f64;
                (x - mean_f) * (x - mean_f)
            })
            .sum();
        (ss / (trials as f64 - 1.0)).sqrt()
    } else {
        0.0
    };

    Ok(CompetitiveReport {
        trials,
        min: ratios.iter().copied().min().unwrap_or_default(),
        max: ratios.iter().copied().max().unwrap_or_default(),
        mean,
        stddev,
        ratios,
        seeds,
        alg_values,
        opt_value,
    })
}

/// Behavioral check of the displacement lemma on laminar instances: move
/// `mover` from the back of `base_sequence` to `new_position`; any item whose
/// matched-platform count decreases must have lost each platform to a tight
/// *platform-owned* constraint, never to an item class alone. Returns a
/// description of the first violation found.
pub fn item_displacement_violation(
    inst: &Instance,
    ranking: &[PlatformId],
    base_sequence: &[ItemId],
    mover: ItemId,
    new_position: usize,
) -> Option<String> {
    let mut base_order: Vec<ItemId> = base_sequence.to_vec();
    base_order.retain(|&i| i != mover);
    base_order.push(mover);

    let mut moved_order = base_order.clone();
    moved_order.pop();
    moved_order.insert(new_position.min(moved_order.len()), mover);

    let base = online_greedy(inst, &ArrivalOrder::explicit(base_order), ranking)
        .expect("unweighted by caller contract");
    let moved = online_greedy(inst, &ArrivalOrder::explicit(moved_order), ranking)
        .expect("unweighted by caller contract");

    for item in 0..inst.n_items() {
        if item == mover {
            continue;
        }
        let before = base.platforms_of(inst, item);
        let after = moved.platforms_of(inst, item);
        if after.len() >= before.len() {
            continue;
        }
        for &p in before.iter().filter(|p| !after.contains(p)) {
            let causes = moved
                .blocked_causes(item, p)
                .expect("lost platform must have a blocked record");
            let any_platform_owned = causes
                .iter()
                .any(|&ci| inst.constraints()[ci].owner.is_platform());
            if !any_platform_owned {
                return Some(format!(
                    "item {} lost platform {} solely to item-owned constraints {:?}",
                    inst.items()[item],
                    inst.platforms()[p],
                    causes
                ));
            }
        }
    }
    None
}
