//! `stagegen`: benchmarks, bug-finding runs, differential checks, schema
//! derivation and PRNG known-answer vectors.
//!
//! Exit status is 0 on success, 1 when a check fails (a divergence, a
//! soundness violation or a KAT mismatch) and 2 on a usage error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use stagegen::derive::{self, Schema, Tree};
use stagegen::harness::{self, BenchConfig, BenchRow, EtnaConfig, FilterConfig, Outcome, Treatment};
use stagegen::staged::{self, CompileOptions, Compiled};
use stagegen::workloads::{self, tasks, Backend, Task, Workload};
use stagegen::{Seed, Variant};

use stagegen::chart::{BarChart, Scale, Series, XyChart};

#[derive(Parser, Debug)]
#[command(name = "stagegen", version, about = "Staged generator benchmarks and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Time value generation per workload, treatment and size.
    Bench(BenchArgs),
    /// Generate inputs until a mutated implementation fails a property.
    Etna(EtnaArgs),
    /// Check that both backends agree value for value.
    Diff(DiffArgs),
    /// Derive generators from a schema and run them.
    Derive(DeriveArgs),
    /// Print or check SplitMix64 known-answer vectors.
    PrngKat(KatArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Directory for CSV and SVG output.
    #[arg(long, env = "STAGEGEN_OUT", default_value = "results")]
    out: PathBuf,
    /// List what can be selected and exit.
    #[arg(long)]
    list: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BackendArg {
    Baseline,
    Staged,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PrngArg {
    Fast,
    Slow,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Baseline => Backend::Baseline,
            BackendArg::Staged => Backend::Staged,
        }
    }
}

impl From<PrngArg> for Variant {
    fn from(p: PrngArg) -> Variant {
        match p {
            PrngArg::Fast => Variant::Fast,
            PrngArg::Slow => Variant::IndirectSlow,
        }
    }
}

/// Treatments allowed by the optional filters, in canonical order.
fn treatments(backend: Option<BackendArg>, prng: Option<PrngArg>) -> Vec<Treatment> {
    Treatment::ALL
        .into_iter()
        .filter(|t| backend.is_none_or(|b| t.backend == Backend::from(b)))
        .filter(|t| prng.is_none_or(|p| t.prng == Variant::from(p)))
        .collect()
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Workload id or `all`.
    #[arg(long, default_value = "all")]
    workload: String,
    #[arg(long, value_delimiter = ',', default_values_t = [10, 100, 1000])]
    sizes: Vec<i64>,
    #[arg(long)]
    backend: Option<BackendArg>,
    #[arg(long)]
    prng: Option<PrngArg>,
    /// Minimum timed milliseconds per row.
    #[arg(long, default_value_t = 1000)]
    min_ms: u64,
    /// Master seed for the per-value seeds.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also count binds and samples per value in a separate untimed pass.
    #[arg(long)]
    instrument: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct EtnaArgs {
    /// `all`, a strategy or case study, optionally `:mutant[:property]`.
    #[arg(long, default_value = "all")]
    task: String,
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    /// Seconds per (task, treatment, seed) run.
    #[arg(long, default_value_t = 10.0)]
    timeout: f64,
    /// Stop a run after this many inputs.
    #[arg(long)]
    max_values: Option<u64>,
    #[arg(long, default_value_t = 31)]
    size_cycle: i64,
    /// Tasks whose reference time to failure is below this are excluded.
    #[arg(long, default_value_t = 5.0)]
    min_ms: f64,
    #[arg(long)]
    backend: Option<BackendArg>,
    #[arg(long)]
    prng: Option<PrngArg>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct DiffArgs {
    /// Workload id or `all`.
    #[arg(long, default_value = "all")]
    workload: String,
    #[arg(long, default_value_t = 1000)]
    seeds: u64,
    #[arg(long, value_delimiter = ',', default_values_t = [10, 100])]
    sizes: Vec<i64>,
    /// Print each staged program.
    #[arg(long)]
    dump_ir: bool,
    /// Run the staged side with let-insertion undone, which duplicates
    /// effects. Expected to diverge.
    #[arg(long)]
    no_let_insertion: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct DeriveArgs {
    /// Built-in schema name or path to a JSON schema.
    #[arg(long, default_value = "bst")]
    schema: String,
    #[arg(long, default_value_t = 5)]
    size: i64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Values generated per backend.
    #[arg(long, default_value_t = 3)]
    count: u64,
    #[arg(long)]
    backend: Option<BackendArg>,
    #[arg(long)]
    prng: Option<PrngArg>,
    #[arg(long)]
    dump_ir: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct KatArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    count: usize,
    #[arg(long)]
    prng: Option<PrngArg>,
    /// Write the words to a KAT file.
    #[arg(long)]
    write: Option<PathBuf>,
    /// Compare against a KAT file; `--count` is ignored.
    #[arg(long)]
    check: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

/// Bad selector or argument: exit 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match harness::with_big_stack(move || run(cli)) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => match e.downcast_ref::<Usage>() {
            Some(u) => {
                eprintln!("error: {u}");
                ExitCode::from(2)
            }
            None => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
    }
}

fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Bench(a) => bench(a),
        Command::Etna(a) => etna(a),
        Command::Diff(a) => diff(a),
        Command::Derive(a) => derive_cmd(a),
        Command::PrngKat(a) => prng_kat(a),
    }
}

struct Output {
    dir: PathBuf,
}

impl Output {
    fn new(dir: &Path) -> Result<Output> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Output { dir: dir.to_path_buf() })
    }

    fn csv<const N: usize>(
        &self,
        name: &str,
        header: [&str; N],
        rows: impl IntoIterator<Item = [String; N]>,
    ) -> Result<PathBuf> {
        let path = self.dir.join(format!("{name}.csv"));
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush()?;
        eprintln!("wrote {}", path.display());
        Ok(path)
    }

    fn svg(&self, name: &str, body: String) -> Result<()> {
        let path = self.dir.join(format!("{name}.svg"));
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {}", path.display());
        Ok(())
    }
}

/// `<subcommand>_<selector>` with the selector made file-name safe.
fn stem(sub: &str, selector: &str) -> String {
    let clean: String = selector
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                c
            } else {
                '-'
            }
        })
        .collect();
    format!("{sub}_{clean}")
}

fn workload_listing() -> String {
    let mut s = String::from("workloads:\n  all\n");
    for w in workloads::WORKLOADS {
        let kind = if w.benchmark { "" } else { " (fixture)" };
        let _ = writeln!(s, "  {:<16} {}{}", w.id, w.description, kind);
    }
    s
}

fn task_listing() -> String {
    let mut s = String::from("strategies:\n");
    for st in tasks::Strategy::ALL {
        let _ = writeln!(s, "  {:<16} ({})", st.id(), st.case_study());
    }
    s.push_str("mutants:\n");
    for m in tasks::Mutant::all() {
        let props: Vec<&str> = m.properties().iter().map(|p| p.id()).collect();
        let _ = writeln!(
            s,
            "  {}:{:<22} {} [{}]",
            m.case_study(),
            m.id(),
            m.description(),
            props.join(", ")
        );
    }
    s.push_str("tasks:\n");
    for t in tasks::all_tasks() {
        let _ = writeln!(s, "  {t}");
    }
    s
}

fn select_workloads(sel: &str) -> Result<Vec<&'static Workload>> {
    workloads::select_workloads(sel)
        .ok_or_else(|| Usage(format!("unknown workload `{sel}`\n{}", workload_listing())).into())
}

fn parse_sizes(sizes: &[i64]) -> Result<()> {
    if sizes.is_empty() || sizes.iter().any(|&s| s < 0) {
        return Err(Usage("sizes must be a nonempty list of nonnegative integers".into()).into());
    }
    Ok(())
}

fn bench(a: BenchArgs) -> Result<Status> {
    if a.common.list {
        print!("{}", workload_listing());
        return Ok(Status::Ok);
    }
    let selected = select_workloads(&a.workload)?;
    parse_sizes(&a.sizes)?;
    let ts = treatments(a.backend, a.prng);
    let cfg = BenchConfig {
        sizes: a.sizes.clone(),
        min_duration: Duration::from_millis(a.min_ms),
        master_seed: a.seed,
        count_seeds: if a.instrument {
            BenchConfig::default().count_seeds
        } else {
            0
        },
        ..BenchConfig::default()
    };
    let out = Output::new(&a.common.out)?;
    let mut rows: Vec<BenchRow> = Vec::new();
    for w in &selected {
        let subject = w.build()?;
        for &t in &ts {
            for &size in &cfg.sizes {
                let row = harness::bench_row(w.id, subject.as_ref(), t, size, &cfg)?;
                println!(
                    "{:<16} {:<13} size {:>6}  {:>14.1} ns/value{}",
                    row.workload,
                    row.treatment.name(),
                    row.size,
                    row.ns_per_value,
                    if row.flagged { "  (unresolved)" } else { "" }
                );
                rows.push(row);
            }
        }
    }
    let name = stem("bench", &a.workload);
    out.csv(&name, BenchRow::HEADER, rows.iter().map(BenchRow::record))?;

    let mut series: BTreeMap<(String, String), Vec<(f64, f64)>> = BTreeMap::new();
    for r in &rows {
        series
            .entry((r.workload.clone(), r.treatment.name()))
            .or_default()
            .push((r.size as f64, r.ns_per_value));
    }
    out.svg(
        &name,
        XyChart {
            title: format!("Time to generate values ({})", a.workload),
            x_label: "size".into(),
            y_label: "ns per value".into(),
            x_scale: Scale::Log,
            y_scale: Scale::Log,
            lines: true,
            series: series
                .into_iter()
                .map(|((w, t), points)| Series {
                    name: format!("{w} {t}"),
                    points,
                })
                .collect(),
        }
        .render(),
    )?;

    if a.instrument {
        bind_report(&out, &name, &rows)?;
    }
    Ok(Status::Ok)
}

/// Binds per value against staging speedup at size 100, over benchmark
/// workloads that have both fast treatments.
fn bind_report(out: &Output, name: &str, rows: &[BenchRow]) -> Result<()> {
    const SIZE: i64 = 100;
    let find = |w: &str, t: Treatment| {
        rows.iter()
            .find(|r| r.workload == w && r.treatment == t && r.size == SIZE)
    };
    let mut points = Vec::new();
    for w in workloads::WORKLOADS.iter().filter(|w| w.benchmark) {
        if let (Some(b), Some(s)) = (find(w.id, Treatment::BASELINE_FAST), find(w.id, Treatment::STAGED_FAST)) {
            if let Some(binds) = b.binds {
                points.push((w.id, binds, b.ns_per_value / s.ns_per_value));
            }
        }
    }
    if points.is_empty() {
        return Ok(());
    }
    let binds_name = format!("{name}_binds");
    out.csv(
        &binds_name,
        ["workload", "binds_per_value", "speedup"],
        points
            .iter()
            .map(|(w, b, s)| [w.to_string(), format!("{b:.2}"), format!("{s:.3}")]),
    )?;
    let xs: Vec<f64> = points.iter().map(|p| p.1).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.2).collect();
    match harness::spearman(&xs, &ys) {
        Some(rho) => println!(
            "binds vs staging speedup at size {SIZE}: spearman {rho:.3} over {} workloads",
            points.len()
        ),
        None => println!("binds vs staging speedup at size {SIZE}: correlation undefined"),
    }
    out.svg(
        &binds_name,
        XyChart {
            title: format!("Staging speedup vs binds per value (size {SIZE})"),
            x_label: "binds per value".into(),
            y_label: "speedup".into(),
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            lines: false,
            series: points
                .iter()
                .map(|(w, b, s)| Series {
                    name: w.to_string(),
                    points: vec![(*b, *s)],
                })
                .collect(),
        }
        .render(),
    )
}

fn etna(a: EtnaArgs) -> Result<Status> {
    if a.common.list {
        print!("{}", task_listing());
        return Ok(Status::Ok);
    }
    let selected = tasks::select_tasks(&a.task)
        .ok_or_else(|| Usage(format!("unknown task selector `{}`\n{}", a.task, task_listing())))?;
    if !a.timeout.is_finite() || a.timeout <= 0.0 || a.seeds == 0 || a.size_cycle < 1 {
        return Err(Usage("timeout, seeds and size-cycle must be positive".into()).into());
    }
    let ts = treatments(a.backend, a.prng);
    let cfg = EtnaConfig {
        timeout: Duration::from_secs_f64(a.timeout),
        max_values: a.max_values,
        size_cycle: a.size_cycle,
        seeds: a.seeds,
    };
    let out = Output::new(&a.common.out)?;
    let mut outcomes: Vec<Outcome> = Vec::new();
    for task in &selected {
        let id = task.id();
        for &t in &ts {
            let trial = task.trial(t.backend)?;
            let mut found = 0;
            for seed in 0..cfg.seeds {
                let o = harness::run_trial(trial.as_ref(), &id, t, seed, &cfg)?;
                found += usize::from(o.found);
                outcomes.push(o);
            }
            println!("{id:<50} {:<13} found {found}/{}", t.name(), cfg.seeds);
        }
    }
    let name = stem("etna", &a.task);
    out.csv(&name, Outcome::HEADER, outcomes.iter().map(Outcome::record))?;

    let violations = soundness_violations(&outcomes);
    for v in &violations {
        eprintln!("soundness violation: {v}");
    }

    let filter = FilterConfig {
        min_reference_time: Duration::from_secs_f64(a.min_ms / 1000.0),
        ..FilterConfig::default()
    };
    let verdicts = harness::filter_tasks(&outcomes, &filter);
    let mut per_task = Vec::new();
    // (strategy, base, other) -> speedups of retained tasks
    let mut groups: BTreeMap<(String, Treatment, Treatment), Vec<f64>> = BTreeMap::new();
    for v in &verdicts {
        let task = Task::parse(&v.task).context("task id round trip")?;
        let excluded = v.excluded.map(|e| format!("{e:?}")).unwrap_or_default();
        for base in [Treatment::BASELINE_FAST, Treatment::BASELINE_SLOW] {
            if !ts.contains(&base) {
                continue;
            }
            for &other in ts.iter().filter(|&&o| o != base) {
                let sp = harness::task_speedup(&outcomes, &v.task, base, other);
                if let (Ok(s), None) = (&sp, v.excluded) {
                    groups
                        .entry((task.strategy.id().to_string(), base, other))
                        .or_default()
                        .push(*s);
                }
                per_task.push([
                    v.task.clone(),
                    excluded.clone(),
                    base.name(),
                    other.name(),
                    sp.as_ref().map(|s| format!("{s:.3}")).unwrap_or_default(),
                    sp.err().map(|e| e.to_string()).unwrap_or_default(),
                ]);
            }
        }
    }
    out.csv(
        &format!("{name}_tasks"),
        ["task", "excluded", "base", "treatment", "speedup", "note"],
        per_task,
    )?;
    let summary: Vec<[String; 5]> = groups
        .iter()
        .map(|((strategy, base, other), xs)| {
            [
                strategy.clone(),
                base.name(),
                other.name(),
                xs.len().to_string(),
                harness::geo_mean(xs).map(|g| format!("{g:.3}")).unwrap_or_default(),
            ]
        })
        .collect();
    for r in &summary {
        println!(
            "{:<16} {} vs {:<13} tasks {:>3}  geo-mean speedup {}",
            r[0], r[2], r[1], r[3], r[4]
        );
    }
    out.csv(
        &format!("{name}_summary"),
        ["strategy", "base", "treatment", "tasks", "geo_mean_speedup"],
        summary.clone(),
    )?;

    let base = Treatment::BASELINE_FAST.name();
    let mut categories: Vec<String> = summary.iter().filter(|r| r[1] == base).map(|r| r[0].clone()).collect();
    categories.dedup();
    let bar_series: Vec<(String, Vec<Option<f64>>)> = ts
        .iter()
        .filter(|t| **t != Treatment::BASELINE_FAST)
        .map(|t| {
            let vals = categories
                .iter()
                .map(|c| {
                    summary
                        .iter()
                        .find(|r| r[0] == *c && r[1] == base && r[2] == t.name())
                        .and_then(|r| r[4].parse().ok())
                })
                .collect();
            (t.name(), vals)
        })
        .collect();
    out.svg(
        &name,
        BarChart {
            title: format!("Speedup over {base} ({})", a.task),
            y_label: "geometric-mean speedup".into(),
            categories,
            series: bar_series,
            reference: Some(1.0),
        }
        .render(),
    )?;

    Ok(if violations.is_empty() {
        Status::Ok
    } else {
        Status::Failed
    })
}

/// (task, seed) pairs where two treatments found the bug after different
/// numbers of inputs.
fn soundness_violations(outcomes: &[Outcome]) -> Vec<String> {
    let mut by_run: BTreeMap<(&str, u64), Vec<&Outcome>> = BTreeMap::new();
    for o in outcomes.iter().filter(|o| o.found) {
        by_run.entry((o.task.as_str(), o.seed)).or_default().push(o);
    }
    by_run
        .into_iter()
        .filter(|(_, os)| os.iter().any(|o| o.values_tried != os[0].values_tried))
        .map(|((task, seed), os)| {
            let detail: Vec<String> = os
                .iter()
                .map(|o| format!("{}={}", o.treatment.name(), o.values_tried))
                .collect();
            format!("{task} seed {seed}: {}", detail.join(" "))
        })
        .collect()
}

fn diff(a: DiffArgs) -> Result<Status> {
    if a.common.list {
        print!("{}", workload_listing());
        return Ok(Status::Ok);
    }
    let selected = select_workloads(&a.workload)?;
    parse_sizes(&a.sizes)?;
    let out = Output::new(&a.common.out)?;
    let mut summary = Vec::new();
    let mut divergences = Vec::new();
    for w in &selected {
        let mut subject = w.build()?;
        if a.no_let_insertion {
            let program = subject.program().without_let_insertion();
            subject = subject.with_program(program)?;
        }
        if a.dump_ir {
            println!("== {} ==\n{}", w.id, subject.program());
        }
        let report = harness::diff_test(w.id, subject.as_ref(), &a.sizes, a.seeds);
        println!(
            "{:<16} checked {:>6}  divergences {}",
            w.id,
            report.checked,
            report.divergences.len()
        );
        for d in report.divergences.iter().take(5) {
            println!("  {d}");
        }
        summary.push([
            w.id.to_string(),
            report.checked.to_string(),
            report.divergences.len().to_string(),
        ]);
        divergences.extend(report.divergences);
    }
    let name = stem("diff", &a.workload);
    out.csv(&name, ["workload", "checked", "divergences"], summary)?;
    out.csv(
        &format!("{name}_divergences"),
        ["workload", "size", "seed", "what", "baseline", "staged"],
        divergences.iter().map(|d| {
            [
                d.workload.clone(),
                d.size.to_string(),
                d.seed.to_string(),
                d.mismatch.what.to_string(),
                d.mismatch.baseline.clone(),
                d.mismatch.staged.clone(),
            ]
        }),
    )?;
    Ok(if divergences.is_empty() {
        Status::Ok
    } else {
        Status::Failed
    })
}

const BUILTIN_SCHEMAS: [(&str, fn() -> Schema); 3] = [
    ("bst", Schema::bst),
    ("stlc_type", Schema::stlc_type),
    ("stlc_term", Schema::stlc_term),
];

fn schema_listing() -> String {
    let mut s = String::from("schemas (or a path to a JSON schema):\n");
    for (n, _) in BUILTIN_SCHEMAS {
        let _ = writeln!(s, "  {n}");
    }
    s
}

fn load_schema(sel: &str) -> Result<Schema> {
    if let Some((_, f)) = BUILTIN_SCHEMAS.iter().find(|(n, _)| *n == sel) {
        return Ok(f());
    }
    let path = Path::new(sel);
    if !path.is_file() {
        return Err(Usage(format!("unknown schema `{sel}`\n{}", schema_listing())).into());
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {sel}"))?;
    Schema::from_json(&text).map_err(|e| Usage(format!("{sel}: {e}")).into())
}

fn derive_cmd(a: DeriveArgs) -> Result<Status> {
    if a.common.list {
        print!("{}", schema_listing());
        return Ok(Status::Ok);
    }
    let schema = load_schema(&a.schema)?;
    if a.size < 0 {
        return Err(Usage("size must be nonnegative".into()).into());
    }
    let base = derive::derive_baseline(&schema).map_err(|e| Usage(e.to_string()))?;
    let staged_gen = derive::derive_staged(&schema).map_err(|e| Usage(e.to_string()))?;
    let program = staged::stage_program(&staged_gen, CompileOptions::default())?;
    if a.dump_ir {
        println!("{program}");
    }
    let compiled: Compiled<Tree> = Compiled::from_program(program)?;
    let backends: Vec<Backend> = match a.backend {
        Some(b) => vec![b.into()],
        None => Backend::ALL.to_vec(),
    };
    let variant = a.prng.map_or(Variant::Fast, Variant::from);
    let mut rows = Vec::new();
    let mut status = Status::Ok;
    for i in 0..a.count {
        let mut values = Vec::new();
        for &b in &backends {
            let mut seed = Seed::from_u64(a.seed.wrapping_add(i), variant);
            let v = match b {
                Backend::Baseline => base.generate(a.size, &mut seed)?,
                Backend::Staged => compiled.run(a.size, &mut seed)?,
            };
            let shown = format!("{v:?}");
            println!("{:<8} seed {:>4}: {shown}", b.name(), a.seed.wrapping_add(i));
            rows.push([
                a.seed.wrapping_add(i).to_string(),
                a.size.to_string(),
                b.name().to_string(),
                shown,
            ]);
            values.push(v);
        }
        if values.windows(2).any(|w| w[0] != w[1]) {
            eprintln!("backends disagree on seed {}", a.seed.wrapping_add(i));
            status = Status::Failed;
        }
    }
    let name = stem(
        "derive",
        Path::new(&a.schema)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("schema"),
    );
    Output::new(&a.common.out)?.csv(&name, ["seed", "size", "backend", "value"], rows)?;
    Ok(status)
}

/// Lowercase hex words, one per line.
fn read_kat(path: &Path) -> Result<Vec<u64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| {
            u64::from_str_radix(l, 16)
                .map_err(|_| Usage(format!("{}:{}: not a hex word: {l}", path.display(), i + 1)).into())
        })
        .collect()
}

fn prng_kat(a: KatArgs) -> Result<Status> {
    if a.common.list {
        for v in Variant::ALL {
            println!("{}", v.name());
        }
        return Ok(Status::Ok);
    }
    let variant = a.prng.map_or(Variant::Fast, Variant::from);
    let expected = a.check.as_deref().map(read_kat).transpose()?;
    let count = expected.as_ref().map_or(a.count, Vec::len);
    let mut seed = Seed::from_u64(a.seed, variant);
    let words: Vec<u64> = (0..count).map(|_| seed.next_u64()).collect();
    let lines: String = words.iter().map(|w| format!("{w:016x}\n")).collect();
    print!("{lines}");
    if let Some(path) = &a.write {
        fs::write(path, &lines).with_context(|| format!("writing {}", path.display()))?;
    }
    Output::new(&a.common.out)?.csv(
        &stem("prng-kat", &a.seed.to_string()),
        ["index", "word"],
        words
            .iter()
            .enumerate()
            .map(|(i, w)| [i.to_string(), format!("{w:016x}")]),
    )?;
    if let Some(exp) = expected {
        if let Some(i) = (0..count).find(|&i| exp[i] != words[i]) {
            eprintln!("mismatch at word {i}: expected {:016x}, got {:016x}", exp[i], words[i]);
            return Ok(Status::Failed);
        }
        eprintln!("{count} words match");
    }
    Ok(Status::Ok)
}
