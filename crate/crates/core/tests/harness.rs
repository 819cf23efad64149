use std::time::Duration;

use proptest::prelude::*;
use stagegen::harness::{
    self, bench_row, counts_per_value, filter_tasks, geo_mean, run_task, spearman, speedup, task_speedup, BenchConfig,
    EtnaConfig, Exclusion, FilterConfig, Outcome, SpeedupError, Treatment,
};
use stagegen::workloads::{self, tasks, Backend};

fn outcome(task: &str, seed: u64, t: Treatment, found: bool, ns: u64, tried: u64) -> Outcome {
    Outcome {
        task: task.into(),
        seed,
        treatment: t,
        found,
        ns,
        values_tried: tried,
    }
}

proptest! {
    #[test]
    fn geo_mean_of_ones_is_one(n in 1usize..50) {
        prop_assert_eq!(geo_mean(&vec![1.0; n]), Some(1.0));
    }

    #[test]
    fn geo_mean_is_permutation_invariant(mut xs in prop::collection::vec(0.01f64..100.0, 1..20), rot in 0usize..20) {
        let a = geo_mean(&xs).unwrap();
        let k = rot % xs.len();
        xs.rotate_left(k);
        xs.reverse();
        let b = geo_mean(&xs).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn geo_mean_of_constant(c in 0.01f64..100.0, n in 1usize..20) {
        let g = geo_mean(&vec![c; n]).unwrap();
        prop_assert!((g - c).abs() <= 1e-9 * c);
    }

    #[test]
    fn filter_keeps_single_finder(ns in 1u64..10_000_000, t in 0usize..4) {
        let finder = Treatment::ALL[t];
        let os: Vec<Outcome> = Treatment::ALL
            .iter()
            .map(|&tr| outcome("x", 0, tr, tr == finder, ns, 3))
            .collect();
        let v = filter_tasks(&os, &FilterConfig::default());
        prop_assert_eq!(v[0].excluded, None);
    }

    #[test]
    fn monotone_pairs_have_positive_correlation(xs in prop::collection::btree_set(0i32..1000, 3..12)) {
        let xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * 3.0 + 1.0).collect();
        prop_assert_eq!(spearman(&xs, &ys), Some(1.0));
    }
}

#[test]
fn geo_mean_rejects_bad_input() {
    assert_eq!(geo_mean(&[]), None);
    assert_eq!(geo_mean(&[1.0, 0.0]), None);
    assert_eq!(geo_mean(&[1.0, -2.0]), None);
    assert!((geo_mean(&[2.0, 8.0]).unwrap() - 4.0).abs() < 1e-12);
}

#[test]
fn speedup_rules() {
    let a = outcome("t", 0, Treatment::BASELINE_FAST, true, 1234, 9);
    assert_eq!(speedup(&a, &a), Ok(1.0));
    let b = outcome("t", 0, Treatment::STAGED_FAST, true, 617, 9);
    assert_eq!(speedup(&a, &b), Ok(2.0));
    let miss = outcome("t", 0, Treatment::STAGED_FAST, false, 10, 9);
    assert_eq!(speedup(&a, &miss), Err(SpeedupError::OtherNotFound));
    assert_eq!(speedup(&miss, &a), Err(SpeedupError::BaseNotFound));

    let os = vec![
        a.clone(),
        b,
        outcome("t", 1, Treatment::BASELINE_FAST, true, 766, 4),
        outcome("t", 1, Treatment::STAGED_FAST, false, 50, 4),
    ];
    assert_eq!(
        task_speedup(&os, "t", Treatment::BASELINE_FAST, Treatment::STAGED_FAST),
        Ok(2.0)
    );
    assert_eq!(
        task_speedup(&os, "u", Treatment::BASELINE_FAST, Treatment::STAGED_FAST),
        Err(SpeedupError::NoCommonFinds)
    );
}

#[test]
fn filter_rules_on_fixtures() {
    let ms = 1_000_000;
    let mut os = Vec::new();
    for t in Treatment::ALL {
        os.push(outcome("all_fail", 0, t, false, 10_000 * ms, 50));
        os.push(outcome("too_fast", 0, t, true, 4 * ms, 50));
        os.push(outcome("kept", 0, t, true, 6 * ms, 50));
    }
    let v = filter_tasks(&os, &FilterConfig::default());
    let get = |name: &str| v.iter().find(|x| x.task == name).unwrap().excluded;
    assert_eq!(get("all_fail"), Some(Exclusion::AllFailed));
    assert_eq!(get("too_fast"), Some(Exclusion::TooFast));
    assert_eq!(get("kept"), None);

    let loose = FilterConfig {
        min_reference_time: Duration::from_millis(1),
        ..FilterConfig::default()
    };
    let v = filter_tasks(&os, &loose);
    assert!(v.iter().filter(|x| x.excluded.is_none()).count() == 2);
}

#[test]
fn bool_list_binds_are_two_per_element() {
    let w = workloads::workload("bool_list").unwrap();
    let subject = w.build().unwrap();
    let (binds, samples) = counts_per_value(subject.as_ref(), Backend::Baseline, 100, 0, 4).unwrap();
    assert_eq!(binds, 201.0);
    let (staged_binds, staged_samples) = counts_per_value(subject.as_ref(), Backend::Staged, 100, 0, 4).unwrap();
    assert_eq!(staged_binds, 0.0);
    assert_eq!(samples, staged_samples);
}

#[test]
fn bench_row_reports_counts_and_time() {
    let w = workloads::workload("bst_single_pass").unwrap();
    let subject = w.build().unwrap();
    let cfg = BenchConfig {
        sizes: vec![10],
        min_duration: Duration::from_millis(5),
        count_seeds: 4,
        ..BenchConfig::default()
    };
    let row = bench_row(w.id, subject.as_ref(), Treatment::STAGED_FAST, 10, &cfg).unwrap();
    assert!(row.iterations > 0 && row.ns_per_value > 0.0 && !row.flagged);
    assert_eq!(row.binds, Some(0.0));
    assert_eq!(row.record()[1], "staged+fast");
}

#[test]
fn treatments_agree_on_values_tried() {
    let cfg = EtnaConfig {
        timeout: Duration::from_secs(5),
        max_values: Some(3000),
        seeds: 3,
        ..EtnaConfig::default()
    };
    let task = tasks::select_tasks("bst_single_pass:insert_le:InsertValid").unwrap()[0];
    for seed in 0..cfg.seeds {
        let runs: Vec<Outcome> = Treatment::ALL
            .iter()
            .map(|&t| run_task(&task, t, seed, &cfg).unwrap())
            .collect();
        for r in &runs[1..] {
            assert_eq!((r.found, r.values_tried), (runs[0].found, runs[0].values_tried));
        }
    }
}

#[test]
fn task_seeds_differ_by_task_and_seed() {
    let a = harness::task_seed("a:b:c", 0);
    assert_ne!(a, harness::task_seed("a:b:c", 1));
    assert_ne!(a, harness::task_seed("a:b:d", 0));
    assert_eq!(a, harness::task_seed("a:b:c", 0));
}
