//! Time-to-failure runs: generate inputs until a property fails on a
//! mutated implementation, then aggregate across treatments.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::error::{GenError, StageError};
use crate::harness::Treatment;
use crate::rand::{mix64, Seed};
use crate::workloads::{Task, Trial, Verdict};

#[derive(Debug, Clone)]
pub struct EtnaConfig {
    pub timeout: Duration,
    /// Optional cap on inputs per run, counted like the timeout.
    pub max_values: Option<u64>,
    /// Input sizes cycle through `0..size_cycle`.
    pub size_cycle: i64,
    pub seeds: u64,
}

impl Default for EtnaConfig {
    fn default() -> Self {
        EtnaConfig {
            timeout: Duration::from_secs(10),
            max_values: None,
            size_cycle: 31,
            seeds: 10,
        }
    }
}

#[derive(Debug, Error)]
pub enum EtnaError {
    #[error(transparent)]
    Stage(#[from] StageError),
    #[error(transparent)]
    Gen(#[from] GenError),
}

/// Result of one (task, treatment, seed) run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub task: String,
    pub seed: u64,
    pub treatment: Treatment,
    pub found: bool,
    /// Time until the failing input was checked, or until giving up.
    pub ns: u64,
    /// Inputs generated, discarded ones included.
    pub values_tried: u64,
}

impl Outcome {
    pub const HEADER: [&'static str; 6] = ["task", "seed", "treatment", "found", "ns", "values_tried"];

    pub fn record(&self) -> [String; 6] {
        [
            self.task.clone(),
            self.seed.to_string(),
            self.treatment.name(),
            self.found.to_string(),
            self.ns.to_string(),
            self.values_tried.to_string(),
        ]
    }
}

/// Master seed state for a (task, seed id) pair; the same for every
/// treatment.
pub fn task_seed(task: &str, seed_id: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in task.bytes() {
        h ^= u64::from(byte);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    mix64(h ^ mix64(seed_id.wrapping_add(1)))
}

/// Runs an already-built trial until it fails, the timeout passes or the
/// value cap is reached. Input `i` has size `i % size_cycle` and its own
/// seed split from the master seed.
pub fn run_trial(
    trial: &dyn Trial,
    task: &str,
    treatment: Treatment,
    seed_id: u64,
    cfg: &EtnaConfig,
) -> Result<Outcome, GenError> {
    let mut master = Seed::from_u64(task_seed(task, seed_id), treatment.prng);
    let cycle = cfg.size_cycle.max(1);
    let cap = cfg.max_values.unwrap_or(u64::MAX);
    let start = Instant::now();
    let mut tried = 0u64;
    let mut found = false;
    while tried < cap {
        let mut s = master.split();
        let size = (tried % cycle as u64) as i64;
        let verdict = trial.run(size, &mut s)?;
        tried += 1;
        if verdict == Verdict::Fail {
            found = true;
            break;
        }
        if start.elapsed() >= cfg.timeout {
            break;
        }
    }
    let ns = (start.elapsed().as_nanos() as u64).max(1);
    Ok(Outcome {
        task: task.to_string(),
        seed: seed_id,
        treatment,
        found,
        ns,
        values_tried: tried,
    })
}

/// Builds the trial for `treatment` (untimed) and runs it.
pub fn run_task(task: &Task, treatment: Treatment, seed_id: u64, cfg: &EtnaConfig) -> Result<Outcome, EtnaError> {
    let trial = task.trial(treatment.backend)?;
    Ok(run_trial(trial.as_ref(), &task.id(), treatment, seed_id, cfg)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SpeedupError {
    #[error("the base treatment did not find the bug")]
    BaseNotFound,
    #[error("the compared treatment did not find the bug")]
    OtherNotFound,
    #[error("no seed on which both treatments found the bug")]
    NoCommonFinds,
}

/// `base.ns / other.ns`, defined only when both found the bug.
pub fn speedup(base: &Outcome, other: &Outcome) -> Result<f64, SpeedupError> {
    if !base.found {
        return Err(SpeedupError::BaseNotFound);
    }
    if !other.found {
        return Err(SpeedupError::OtherNotFound);
    }
    Ok(base.ns as f64 / other.ns as f64)
}

/// Speedup of `other` over `base` on one task: total time over the seeds
/// where both found the bug.
pub fn task_speedup(outcomes: &[Outcome], task: &str, base: Treatment, other: Treatment) -> Result<f64, SpeedupError> {
    let pick = |t: Treatment| -> BTreeMap<u64, &Outcome> {
        outcomes
            .iter()
            .filter(|o| o.task == task && o.treatment == t)
            .map(|o| (o.seed, o))
            .collect()
    };
    let (bs, os) = (pick(base), pick(other));
    let (mut tb, mut to) = (0.0, 0.0);
    for (seed, b) in &bs {
        if let Some(o) = os.get(seed) {
            if b.found && o.found {
                tb += b.ns as f64;
                to += o.ns as f64;
            }
        }
    }
    if to == 0.0 {
        return Err(SpeedupError::NoCommonFinds);
    }
    Ok(tb / to)
}

#[derive(Debug, Clone)]
pub struct FilterConfig {
    /// Treatment whose run time decides the too-fast rule.
    pub reference: Treatment,
    pub min_reference_time: Duration,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            reference: Treatment::BASELINE_FAST,
            min_reference_time: Duration::from_millis(5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exclusion {
    /// No treatment found the bug on any seed.
    AllFailed,
    /// The reference treatment found it faster than the threshold, on
    /// average over the seeds where it did.
    TooFast,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskVerdict {
    pub task: String,
    pub excluded: Option<Exclusion>,
}

/// Decides which tasks count toward aggregate speedups.
///
/// A task found by exactly one treatment is always kept. Otherwise it is
/// dropped if no treatment found it, or if the reference treatment's mean
/// time to failure is under the threshold.
pub fn filter_tasks(outcomes: &[Outcome], cfg: &FilterConfig) -> Vec<TaskVerdict> {
    let mut tasks: BTreeMap<&str, Vec<&Outcome>> = BTreeMap::new();
    for o in outcomes {
        tasks.entry(o.task.as_str()).or_default().push(o);
    }
    tasks
        .into_iter()
        .map(|(task, os)| {
            let finders: BTreeSet<Treatment> = os.iter().filter(|o| o.found).map(|o| o.treatment).collect();
            let ref_times: Vec<u64> = os
                .iter()
                .filter(|o| o.found && o.treatment == cfg.reference)
                .map(|o| o.ns)
                .collect();
            let excluded = if finders.len() == 1 {
                None
            } else if finders.is_empty() {
                Some(Exclusion::AllFailed)
            } else if !ref_times.is_empty()
                && (ref_times.iter().sum::<u64>() as f64 / ref_times.len() as f64)
                    < cfg.min_reference_time.as_nanos() as f64
            {
                Some(Exclusion::TooFast)
            } else {
                None
            };
            TaskVerdict {
                task: task.to_string(),
                excluded,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(task: &str, seed: u64, t: Treatment, found: bool, ms: u64) -> Outcome {
        Outcome {
            task: task.into(),
            seed,
            treatment: t,
            found,
            ns: ms * 1_000_000,
            values_tried: 7,
        }
    }

    #[test]
    fn speedup_of_self_is_one() {
        let o = outcome("t", 0, Treatment::BASELINE_FAST, true, 12);
        assert_eq!(speedup(&o, &o), Ok(1.0));
        let miss = outcome("t", 0, Treatment::STAGED_FAST, false, 12);
        assert_eq!(speedup(&o, &miss), Err(SpeedupError::OtherNotFound));
    }

    #[test]
    fn task_seeds_differ_by_task_and_seed() {
        assert_ne!(task_seed("a", 0), task_seed("b", 0));
        assert_ne!(task_seed("a", 0), task_seed("a", 1));
        assert_eq!(task_seed("a", 3), task_seed("a", 3));
    }
}
