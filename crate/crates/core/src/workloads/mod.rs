//! Benchmark generators, reference operations with injected bugs, and the
//! registries the harness and CLI select from.
//!
//! Every workload exists once per backend. Both versions make the same
//! choices in the same order, so for a given seed they produce the same
//! value and leave the seed in the same state.

pub mod bool_list;
pub mod bst;
pub mod seq;
pub mod stlc;
pub mod tasks;

use std::fmt::{self, Debug};
use std::sync::Arc;

use crate::baseline as b;
use crate::error::{GenError, StageError};
use crate::rand::Seed;
use crate::staged::{self as st, Code, Compiled, Program, CONS_TAG, NIL_TAG};
use seq::Seq;

pub use tasks::{Strategy, Task, Trial};

/// Result of checking a property on one input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The input does not meet the property's precondition.
    Discard,
}

impl Verdict {
    pub fn from_pass(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Which generator implementation runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Backend {
    Baseline,
    Staged,
}

impl Backend {
    pub const ALL: [Backend; 2] = [Backend::Baseline, Backend::Staged];

    pub fn name(self) -> &'static str {
        match self {
            Backend::Baseline => "baseline",
            Backend::Staged => "staged",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A list of exactly `size` elements, one recursive call per element.
///
/// Each element costs two binds: the size read and the element itself.
pub fn list_baseline<T: Clone + Send + Sync + 'static>(elem: b::Gen<T>) -> b::Gen<Arc<Seq<T>>> {
    b::fixed_point(move |this| {
        b::size().bind(move |n| {
            let tail = b::with_size(n - 1, this.clone());
            let cons = elem
                .clone()
                .bind(move |x| tail.clone().map(move |rest| Seq::cons(x.clone(), rest)));
            b::weighted_union(vec![(if n == 0 { 1 } else { 0 }, b::pure(Seq::nil())), (n, cons)])
        })
    })
}

pub fn list_staged(elem: st::Gen<Code>) -> st::Gen<Code> {
    st::fixed_point(move |this| {
        let this = this.clone();
        st::size().bind(move |n| {
            let tail = st::with_size(Code::sub(n.clone(), Code::Int(1)), st::recurse(&this));
            let cons = elem.clone().bind(move |x| {
                tail.clone()
                    .map(move |rest| Code::Construct(CONS_TAG, vec![x.clone(), rest]))
            });
            st::weighted_union(vec![
                (
                    Code::ite(Code::eq(n.clone(), Code::Int(0)), Code::Int(1), Code::Int(0)),
                    st::pure(Code::Construct(NIL_TAG, vec![])),
                ),
                (n, cons),
            ])
        })
    })
}

/// `x <- int 0 100; y <- int 0 x; return (x, y)`: the smallest generator
/// whose staged form depends on let-insertion, since `x` is read twice.
pub fn int_pair_baseline() -> b::Gen<(i64, i64)> {
    b::int(0, 100).bind(|x| b::int(0, x).bind(move |y| b::pure((x, y))))
}

pub fn int_pair_staged() -> st::Gen<Code> {
    st::int(0, 100).bind(|x| st::int(0, x.clone()).bind(move |y| st::pure(Code::Tuple(vec![x.clone(), y]))))
}

/// A divergence found when running both backends from the same seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub what: &'static str,
    pub baseline: String,
    pub staged: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} differs: baseline {} vs staged {}",
            self.what, self.baseline, self.staged
        )
    }
}

/// Statistics from one instrumented run of each backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counts {
    pub binds: u64,
    pub samples: u64,
}

/// A workload with both backends built, behind a type-erased interface.
pub trait Subject: Send + Sync {
    /// Generates one value with `backend` and drops it.
    fn generate(&self, backend: Backend, size: i64, seed: &mut Seed) -> Result<(), GenError>;

    /// Runs both backends from copies of `seed` and reports the first
    /// difference in value, final seed state or sample count.
    fn compare(&self, size: i64, seed: &Seed) -> Option<Mismatch>;

    /// Bind and sample counts of one baseline run.
    fn count(&self, size: i64, seed: &Seed) -> Result<Counts, GenError>;

    /// Rendered value from one backend.
    fn show(&self, backend: Backend, size: i64, seed: &mut Seed) -> Result<String, GenError>;

    fn program(&self) -> &Program;

    /// The same workload with its staged program replaced.
    fn with_program(&self, program: Program) -> Result<Box<dyn Subject>, StageError>;
}

/// Both backends of one generator.
pub struct Pair<A> {
    pub baseline: b::Gen<A>,
    pub staged: Compiled<A>,
}

impl<A> Pair<A> {
    pub fn new(baseline: b::Gen<A>, staged: Compiled<A>) -> Pair<A> {
        Pair { baseline, staged }
    }
}

impl<A: PartialEq + Debug + 'static> Subject for Pair<A> {
    fn generate(&self, backend: Backend, size: i64, seed: &mut Seed) -> Result<(), GenError> {
        match backend {
            Backend::Baseline => self.baseline.generate(size, seed).map(drop),
            Backend::Staged => self.staged.run(size, seed).map(drop),
        }
    }

    fn compare(&self, size: i64, seed: &Seed) -> Option<Mismatch> {
        let mut sb = seed.clone().instrumented();
        let mut ss = seed.clone().instrumented();
        let vb = self.baseline.generate(size, &mut sb);
        let vs = self.staged.run(size, &mut ss);
        if vb != vs {
            return Some(Mismatch {
                what: "value",
                baseline: format!("{vb:?}"),
                staged: format!("{vs:?}"),
            });
        }
        if sb.position() != ss.position() {
            return Some(Mismatch {
                what: "seed state",
                baseline: format!("{:x?}", sb.position()),
                staged: format!("{:x?}", ss.position()),
            });
        }
        if sb.sample_count() != ss.sample_count() {
            return Some(Mismatch {
                what: "sample count",
                baseline: format!("{:?}", sb.sample_count()),
                staged: format!("{:?}", ss.sample_count()),
            });
        }
        None
    }

    fn count(&self, size: i64, seed: &Seed) -> Result<Counts, GenError> {
        let mut s = seed.clone().instrumented();
        self.baseline.generate(size, &mut s)?;
        Ok(Counts {
            binds: s.bind_count().unwrap_or(0),
            samples: s.sample_count().unwrap_or(0),
        })
    }

    fn show(&self, backend: Backend, size: i64, seed: &mut Seed) -> Result<String, GenError> {
        Ok(match backend {
            Backend::Baseline => format!("{:?}", self.baseline.generate(size, seed)?),
            Backend::Staged => format!("{:?}", self.staged.run(size, seed)?),
        })
    }

    fn program(&self) -> &Program {
        self.staged.program()
    }

    fn with_program(&self, program: Program) -> Result<Box<dyn Subject>, StageError> {
        Ok(Box::new(Pair {
            baseline: self.baseline.clone(),
            staged: self.staged.with_program(program)?,
        }))
    }
}

/// A registered workload.
#[derive(Clone, Copy)]
pub struct Workload {
    pub id: &'static str,
    pub description: &'static str,
    /// Part of the generation-speed comparison. Fixtures are not.
    pub benchmark: bool,
    build: fn() -> Result<Box<dyn Subject>, StageError>,
}

impl Workload {
    pub fn build(&self) -> Result<Box<dyn Subject>, StageError> {
        (self.build)()
    }
}

impl Debug for Workload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id)
    }
}

fn boxed<A: PartialEq + Debug + 'static>(
    baseline: b::Gen<A>,
    staged: Result<Compiled<A>, StageError>,
) -> Result<Box<dyn Subject>, StageError> {
    Ok(Box::new(Pair::new(baseline, staged?)))
}

/// Every workload, in a fixed order.
pub const WORKLOADS: &[Workload] = &[
    Workload {
        id: "int_pair",
        description: "pair (x, y) with y drawn from 0..=x",
        benchmark: false,
        build: || boxed(int_pair_baseline(), st::compile(&int_pair_staged())),
    },
    Workload {
        id: "bool_list",
        description: "list of booleans, length = size",
        benchmark: true,
        build: || boxed(bool_list::baseline(), bool_list::compiled()),
    },
    Workload {
        id: "bst_insert",
        description: "BST from size-many inserts",
        benchmark: true,
        build: || boxed(bst::insert_baseline(), bst::insert_compiled()),
    },
    Workload {
        id: "bst_single_pass",
        description: "tree built top-down with halving size",
        benchmark: true,
        build: || boxed(bst::single_pass_baseline(), bst::single_pass_compiled()),
    },
    Workload {
        id: "bst_derived",
        description: "tree derived from the BST schema",
        benchmark: true,
        build: || boxed(bst::derived_baseline(), bst::derived_compiled()),
    },
    Workload {
        id: "stlc_derived",
        description: "lambda term derived from the term schema",
        benchmark: true,
        build: || boxed(stlc::derived_baseline(), stlc::derived_compiled()),
    },
    Workload {
        id: "stlc_welltyped",
        description: "well-typed lambda term built by type-directed choice",
        benchmark: true,
        build: || boxed(stlc::welltyped_baseline(), stlc::welltyped_compiled()),
    },
];

pub fn workload(id: &str) -> Option<&'static Workload> {
    WORKLOADS.iter().find(|w| w.id == id)
}

/// Workloads matching a selector: an id, or `all`.
pub fn select_workloads(selector: &str) -> Option<Vec<&'static Workload>> {
    if selector == "all" {
        return Some(WORKLOADS.iter().collect());
    }
    workload(selector).map(|w| vec![w])
}
