//! Measurement: differential testing of the two backends, generation-speed
//! benchmarks and time-to-failure runs on bug-finding tasks.
//!
//! Everything here runs on the calling thread, one measurement at a time.

mod bench;
mod diff;
mod etna;
mod stats;

use std::fmt;

pub use bench::{bench, bench_row, counts_per_value, BenchConfig, BenchRow};
pub use diff::{diff_test, DiffReport, Divergence};
pub use etna::{
    filter_tasks, run_task, run_trial, speedup, task_seed, task_speedup, EtnaConfig, EtnaError, Exclusion,
    FilterConfig, Outcome, SpeedupError, TaskVerdict,
};
pub use stats::{geo_mean, median_or_inf, ranks, spearman};

use crate::rand::Variant;
pub use crate::workloads::Backend;

/// A backend paired with a randomness implementation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Treatment {
    pub backend: Backend,
    pub prng: Variant,
}

impl Treatment {
    pub const BASELINE_FAST: Treatment = Treatment::new(Backend::Baseline, Variant::Fast);
    pub const STAGED_FAST: Treatment = Treatment::new(Backend::Staged, Variant::Fast);
    pub const BASELINE_SLOW: Treatment = Treatment::new(Backend::Baseline, Variant::IndirectSlow);
    pub const STAGED_SLOW: Treatment = Treatment::new(Backend::Staged, Variant::IndirectSlow);

    pub const ALL: [Treatment; 4] = [
        Treatment::BASELINE_FAST,
        Treatment::STAGED_FAST,
        Treatment::BASELINE_SLOW,
        Treatment::STAGED_SLOW,
    ];

    pub const fn new(backend: Backend, prng: Variant) -> Treatment {
        Treatment { backend, prng }
    }

    /// `baseline+fast`, `staged+slow` and so on.
    pub fn name(self) -> String {
        format!("{}+{}", self.backend.name(), self.prng.name())
    }

    pub fn parse(s: &str) -> Option<Treatment> {
        Treatment::ALL.into_iter().find(|t| t.name() == s)
    }
}

impl fmt::Display for Treatment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Stack size for threads that run generators. Baseline generators recurse
/// once per bind, so large sizes need far more than the default.
pub const BIG_STACK: usize = 1 << 29;

/// Runs `f` on a fresh thread with a [`BIG_STACK`] stack and waits for it.
pub fn with_big_stack<R: Send + 'static>(f: impl FnOnce() -> R + Send + 'static) -> R {
    std::thread::Builder::new()
        .stack_size(BIG_STACK)
        .spawn(f)
        .expect("spawn worker thread")
        .join()
        .unwrap_or_else(|e| std::panic::resume_unwind(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn treatment_names_round_trip() {
        for t in Treatment::ALL {
            assert_eq!(Treatment::parse(&t.name()), Some(t));
        }
        assert_eq!(Treatment::STAGED_FAST.name(), "staged+fast");
    }
}
