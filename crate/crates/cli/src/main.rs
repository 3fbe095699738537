//! `fairmatch` — solve, simulate, generate, reduce, and benchmark classified
//! maximum matching instances.
//!
//! Exit codes: 0 success, 2 invalid input (validation/config/parse), 3 solver
//! inapplicable to the given instance, 1 other failures (I/O).

use anyhow::Context;
use clap::{Parser, Subcommand};
use fairmatch_core::approx::{avg_degree_gmis, greedy_cmm, ScanOrder};
use fairmatch_core::bench::{self, Algo, GenConfig};
use fairmatch_core::exact::{
    brute_force, flow_laminar, half_approx_multi, type_ip, DEFAULT_CLASS_CAP, DEFAULT_EDGE_LIMIT,
};
use fairmatch_core::laminar::partition_classes;
use fairmatch_core::model::{Assignment, Instance};
use fairmatch_core::online::competitive_trials;
use fairmatch_core::reductions::{
    cmm_to_gmis, gmis_to_cmm, mis_to_cmm, ranking_to_cmm, simmatch_to_cmm, MisGraph, RawGmis,
    RawRanking, RawSimMatch,
};
use fairmatch_core::SolveError;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fairmatch", version, about = "Classified maximum matching solvers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance file with a chosen algorithm.
    Solve {
        /// One of: greedy, flow, typeip, seq-half, avgdeg, brute.
        #[arg(long)]
        algo: String,
        #[arg(long = "in")]
        input: PathBuf,
        /// Greedy scan order: input, weight, or random:<seed>.
        #[arg(long, default_value = "input")]
        order: String,
        /// Write the assignment JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Class cap for typeip / seq-half.
        #[arg(long, default_value_t = DEFAULT_CLASS_CAP)]
        class_cap: usize,
        /// Edge cap for brute.
        #[arg(long, default_value_t = DEFAULT_EDGE_LIMIT)]
        brute_limit: usize,
    },
    /// Random-arrival trials of the online greedy against the flow optimum.
    Simulate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Platform ranking: input (default) or random:<seed>.
        #[arg(long, default_value = "input")]
        ranking: String,
        /// Write per-trial CSV here (summary always goes to stdout).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Generate a synthetic instance from a preset or a config file.
    Generate {
        /// One of: small-sparse, small-dense, small-sparse-mm, small-dense-mm.
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// JSON GenConfig file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the seed from the preset/config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a neighboring problem to a CMM instance file.
    Reduce {
        /// One of: mis, gmis, ranking, simmatch.
        #[arg(long)]
        from: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment suite and report values, ratios, and wall times.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

enum CliError {
    /// Bad input: malformed files, failed validation, unknown flags. Exit 2.
    Invalid(String),
    /// The chosen solver cannot run on this instance. Exit 3.
    Inapplicable(SolveError),
    /// Everything else (I/O). Exit 1.
    Other(anyhow::Error),
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        CliError::Inapplicable(e)
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Other(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Inapplicable(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(CliError::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::Other)
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    let text = read_to_string(path)?;
    Instance::from_json_str(&text).map_err(|e| CliError::Invalid(e.to_string()))
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(CliError::Other),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            // A closed pipe (e.g. `| head`) is not an error for us.
            match writeln!(stdout, "{content}") {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other.context("writing to stdout").map_err(CliError::Other),
            }
        }
    }
}

fn parse_scan_order(order: &str) -> Result<ScanOrder, CliError> {
    match order {
        "input" => Ok(ScanOrder::Input),
        "weight" => Ok(ScanOrder::WeightDescending),
        other => match other.strip_prefix("random:") {
            Some(seed) => seed
                .parse::<u64>()
                .map(ScanOrder::Random)
                .map_err(|_| CliError::Invalid(format!("bad seed in --order {other:?}"))),
            None => Err(CliError::Invalid(format!(
                "unknown --order {other:?} (expected input, weight, or random:<seed>)"
            ))),
        },
    }
}

fn parse_ranking(ranking: &str, inst: &Instance) -> Result<Vec<usize>, CliError> {
    let mut ids: Vec<usize> = (0..inst.n_platforms()).collect();
    match ranking {
        "input" => Ok(ids),
        other => match other.strip_prefix("random:") {
            Some(seed) => {
                let seed: u64 = seed
                    .parse()
                    .map_err(|_| CliError::Invalid(format!("bad seed in --ranking {other:?}")))?;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                ids.shuffle(&mut rng);
                Ok(ids)
            }
            None => Err(CliError::Invalid(format!(
                "unknown --ranking {other:?} (expected input or random:<seed>)"
            ))),
        },
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Solve {
            algo,
            input,
            order,
            out,
            class_cap,
            brute_limit,
        } => {
            let inst = load_instance(&input)?;
            let assignment: Assignment = match algo.as_str() {
                "greedy" => greedy_cmm(&inst, &parse_scan_order(&order)?),
                "flow" => flow_laminar(&inst)?,
                "typeip" => type_ip(&inst, class_cap)?,
                "seq-half" => half_approx_multi(&inst, class_cap)?,
                "avgdeg" => {
                    let (g, map) = cmm_to_gmis(&inst)?;
                    let member_sets: Vec<Vec<usize>> = g
                        .hyperedges()
                        .iter()
                        .map(|e| e.members.clone())
                        .collect();
                    let partition = partition_classes(&member_sets);
                    let chosen = avg_degree_gmis(&g, &partition);
                    map.decode(&inst, &chosen)
                }
                "brute" => brute_force(&inst, brute_limit)?,
                other => {
                    return Err(CliError::Invalid(format!(
                        "unknown --algo {other:?} (expected greedy, flow, typeip, seq-half, avgdeg, brute)"
                    )))
                }
            };
            let json = serde_json::to_string_pretty(&inst.assignment_to_json(&assignment))
                .expect("assignment serialization cannot fail");
            write_output(&out, &json)
        }
        Cmd::Simulate {
            input,
            trials,
            seed,
            ranking,
            report,
        } => {
            let inst = load_instance(&input)?;
            let ranking = parse_ranking(&ranking, &inst)?;
            let rep = competitive_trials(&inst, trials, seed, &ranking)?;
            println!(
                "trials={} opt={} mean={:.4} stddev={:.4} min={:.4} max={:.4}",
                rep.trials,
                rep.opt_value,
                rep.mean_f64(),
                rep.stddev,
                *rep.min.numer() as f64 / *rep.min.denom() as f64,
                *rep.max.numer() as f64 / *rep.max.denom() as f64,
            );
            if let Some(path) = report {
                std::fs::write(&path, rep.to_csv())
                    .with_context(|| format!("writing {}", path.display()))
                    .map_err(CliError::Other)?;
            }
            Ok(())
        }
        Cmd::Generate {
            preset,
            config,
            seed,
            out,
        } => {
            let mut cfg: GenConfig = match (&preset, &config) {
                (Some(name), None) => bench::preset(name).ok_or_else(|| {
                    CliError::Invalid(format!(
                        "unknown preset {name:?} (expected one of {})",
                        bench::PRESET_NAMES.join(", ")
                    ))
                })?,
                (None, Some(path)) => serde_json::from_str(&read_to_string(path)?)
                    .map_err(|e| CliError::Invalid(format!("bad config: {e}")))?,
                _ => {
                    return Err(CliError::Invalid(
                        "exactly one of --preset or --config is required".into(),
                    ))
                }
            };
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let inst = bench::generate(&cfg).map_err(|e| CliError::Invalid(e.to_string()))?;
            write_output(&out, &inst.to_json_string())
        }
        Cmd::Reduce { from, input, out } => {
            let text = read_to_string(&input)?;
            let invalid = |e: String| CliError::Invalid(e);
            let inst = match from.as_str() {
                "mis" => {
                    let graph = MisGraph::parse_text(&text).map_err(invalid)?;
                    mis_to_cmm(&graph).0
                }
                "gmis" => {
                    let raw: RawGmis = serde_json::from_str(&text)
                        .map_err(|e| CliError::Invalid(format!("bad gmis file: {e}")))?;
                    let g = raw.to_gmis().map_err(invalid)?;
                    gmis_to_cmm(&g).0
                }
                "ranking" => {
                    let raw: RawRanking = serde_json::from_str(&text)
                        .map_err(|e| CliError::Invalid(format!("bad ranking file: {e}")))?;
                    let r = raw.to_ranking().map_err(invalid)?;
                    ranking_to_cmm(&r).0
                }
                "simmatch" => {
                    let raw: RawSimMatch = serde_json::from_str(&text)
                        .map_err(|e| CliError::Invalid(format!("bad simmatch file: {e}")))?;
                    let s = raw.to_simmatch().map_err(invalid)?;
                    simmatch_to_cmm(&s).0
                }
                other => {
                    return Err(CliError::Invalid(format!(
                        "unknown --from {other:?} (expected mis, gmis, ranking, simmatch)"
                    )))
                }
            };
            write_output(&out, &inst.to_json_string())
        }
        Cmd::Bench { suite, report } => {
            let suite: Suite = serde_json::from_str(&read_to_string(&suite)?)
                .map_err(|e| CliError::Invalid(format!("bad suite file: {e}")))?;
            let mut instances = Vec::new();
            for source in &suite.instances {
                instances.push(source.load()?);
            }
            let algorithms: Vec<Algo> = suite
                .algorithms
                .iter()
                .map(|name| {
                    Algo::parse(name)
                        .ok_or_else(|| CliError::Invalid(format!("unknown algorithm {name:?}")))
                })
                .collect::<Result<_, _>>()?;
            let rep = bench::run_experiment(
                &instances,
                &algorithms,
                suite.repetitions,
                suite.seed,
            );
            print!("{}", rep.human_table());
            if let Some(path) = report {
                std::fs::write(&path, rep.to_csv())
                    .with_context(|| format!("writing {}", path.display()))
                    .map_err(CliError::Other)?;
            }
            Ok(())
        }
    }
}

/// Experiment suite file: a list of instance sources, algorithm names, and a
/// repetition count.
#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct Suite {
    instances: Vec<InstanceSource>,
    algorithms: Vec<String>,
    #[serde(default = "one")]
    repetitions: usize,
    #[serde(default)]
    seed: u64,
}

fn one() -> usize {
    1
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceSource {
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    preset: Option<String>,
    #[serde(default)]
    file: Option<PathBuf>,
    #[serde(default)]
    config: Option<GenConfig>,
    #[serde(default)]
    seed: Option<u64>,
}

impl InstanceSource {
    fn load(&self) -> Result<(String, Instance), CliError> {
        match (&self.preset, &self.file, &self.config) {
            (Some(name), None, None) => {
                let mut cfg = bench::preset(name)
                    .ok_or_else(|| CliError::Invalid(format!("unknown preset {name:?}")))?;
                if let Some(seed) = self.seed {
                    cfg.seed = seed;
                }
                let inst =
                    bench::generate(&cfg).map_err(|e| CliError::Invalid(e.to_string()))?;
                Ok((self.label.clone().unwrap_or_else(|| name.clone()), inst))
            }
            (None, Some(path), None) => {
                let inst = load_instance(path)?;
                let label = self
                    .label
                    .clone()
                    .unwrap_or_else(|| path.display().to_string());
                Ok((label, inst))
            }
            (None, None, Some(cfg)) => {
                let mut cfg = cfg.clone();
                if let Some(seed) = self.seed {
                    cfg.seed = seed;
                }
                let inst =
                    bench::generate(&cfg).map_err(|e| CliError::Invalid(e.to_string()))?;
                Ok((
                    self.label.clone().unwrap_or_else(|| "config".to_string()),
                    inst,
                ))
            }
            _ => Err(CliError::Invalid(
                "each suite instance needs exactly one of preset, file, or config".into(),
            )),
        }
    }
}
