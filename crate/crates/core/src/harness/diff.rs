//! Differential testing: both backends from the same seed must agree.

use std::fmt;

use crate::rand::{Seed, Variant};
use crate::workloads::{Mismatch, Subject};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub workload: String,
    pub size: i64,
    pub seed: u64,
    pub mismatch: Mismatch,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} size {} seed {}: {}",
            self.workload, self.size, self.seed, self.mismatch
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DiffReport {
    /// Number of (size, seed) points compared.
    pub checked: usize,
    pub divergences: Vec<Divergence>,
}

impl DiffReport {
    pub fn passed(&self) -> bool {
        self.divergences.is_empty()
    }

    pub fn merge(&mut self, other: DiffReport) {
        self.checked += other.checked;
        self.divergences.extend(other.divergences);
    }
}

/// Compares the backends of `subject` at every size for seeds
/// `0..n_seeds`, checking value, final seed state and sample count.
pub fn diff_test(workload: &str, subject: &dyn Subject, sizes: &[i64], n_seeds: u64) -> DiffReport {
    let mut report = DiffReport::default();
    for &size in sizes {
        for seed in 0..n_seeds {
            report.checked += 1;
            if let Some(mismatch) = subject.compare(size, &Seed::from_u64(seed, Variant::Fast)) {
                report.divergences.push(Divergence {
                    workload: workload.to_string(),
                    size,
                    seed,
                    mismatch,
                });
            }
        }
    }
    report
}
