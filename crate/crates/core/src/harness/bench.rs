//! Generation-speed benchmarks.

use std::time::{Duration, Instant};

use crate::error::GenError;
use crate::harness::Treatment;
use crate::rand::{Seed, Variant};
use crate::workloads::{Backend, Subject};

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<i64>,
    /// Minimum measured time per row.
    pub min_duration: Duration,
    pub master_seed: u64,
    /// Values generated before timing starts.
    pub warmup: u64,
    /// Seeds averaged over for the bind and sample counts.
    pub count_seeds: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![10, 100, 1000, 10000],
            min_duration: Duration::from_secs(1),
            master_seed: 0,
            warmup: 16,
            count_seeds: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub workload: String,
    pub treatment: Treatment,
    pub size: i64,
    pub ns_per_value: f64,
    /// Binds per value for this treatment. Staged code performs none.
    pub binds: Option<f64>,
    pub samples: Option<f64>,
    pub iterations: u64,
    /// Set when the clock could not resolve the measurement.
    pub flagged: bool,
}

impl BenchRow {
    pub const HEADER: [&'static str; 6] = ["workload", "treatment", "size", "ns_per_value", "binds", "samples"];

    pub fn record(&self) -> [String; 6] {
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.2}")).unwrap_or_default();
        [
            self.workload.clone(),
            self.treatment.name(),
            self.size.to_string(),
            format!("{:.1}", self.ns_per_value),
            opt(self.binds),
            opt(self.samples),
        ]
    }
}

/// Average binds and samples per value over `n` seeds, from an
/// instrumented, untimed run of `backend`.
pub fn counts_per_value(
    subject: &dyn Subject,
    backend: Backend,
    size: i64,
    master_seed: u64,
    n: u64,
) -> Result<(f64, f64), GenError> {
    let mut master = Seed::from_u64(master_seed, Variant::Fast);
    let (mut binds, mut samples) = (0u64, 0u64);
    for _ in 0..n {
        let seed = master.split();
        match backend {
            Backend::Baseline => {
                let c = subject.count(size, &seed)?;
                binds += c.binds;
                samples += c.samples;
            }
            Backend::Staged => {
                let mut s = seed.instrumented();
                subject.generate(Backend::Staged, size, &mut s)?;
                binds += s.bind_count().unwrap_or(0);
                samples += s.sample_count().unwrap_or(0);
            }
        }
    }
    let n = n.max(1) as f64;
    Ok((binds as f64 / n, samples as f64 / n))
}

/// Times one (treatment, size) cell. Each value gets a fresh seed split
/// from the master seed, so every treatment sees the same seeds.
pub fn bench_row(
    workload: &str,
    subject: &dyn Subject,
    treatment: Treatment,
    size: i64,
    cfg: &BenchConfig,
) -> Result<BenchRow, GenError> {
    let mut master = Seed::from_u64(cfg.master_seed, treatment.prng);
    for _ in 0..cfg.warmup {
        let mut s = master.split();
        subject.generate(treatment.backend, size, &mut s)?;
    }
    let mut master = Seed::from_u64(cfg.master_seed, treatment.prng);
    let mut iterations = 0u64;
    let mut elapsed = Duration::ZERO;
    let mut batch = 1u64;
    while elapsed < cfg.min_duration {
        let start = Instant::now();
        for _ in 0..batch {
            let mut s = master.split();
            subject.generate(treatment.backend, size, &mut s)?;
        }
        elapsed += start.elapsed();
        iterations += batch;
        batch = (batch * 2).min(1 << 20);
    }
    let ns = elapsed.as_nanos() as f64;
    let (binds, samples) = if cfg.count_seeds > 0 {
        let (b, s) = counts_per_value(subject, treatment.backend, size, cfg.master_seed, cfg.count_seeds)?;
        (Some(b), Some(s))
    } else {
        (None, None)
    };
    Ok(BenchRow {
        workload: workload.to_string(),
        treatment,
        size,
        ns_per_value: ns / iterations as f64,
        binds,
        samples,
        iterations,
        flagged: ns == 0.0,
    })
}

/// One row per size in `cfg.sizes`.
pub fn bench(
    workload: &str,
    subject: &dyn Subject,
    treatment: Treatment,
    cfg: &BenchConfig,
) -> Result<Vec<BenchRow>, GenError> {
    cfg.sizes
        .iter()
        .map(|&size| bench_row(workload, subject, treatment, size, cfg))
        .collect()
}
