//! Bug-finding tasks: a generation strategy, an injected bug and a
//! property that can observe it.
//!
//! Task ids have the form `strategy:mutant:property`, e.g.
//! `bst_insert:insert_le:InsertValid`.

use std::fmt;

use crate::baseline as b;
use crate::error::{GenError, StageError};
use crate::rand::Seed;
use crate::staged::Compiled;
use crate::workloads::bst::{self, Bst, BstCase, BstMutant, BstOps, BstProperty, KEY_MAX};
use crate::workloads::stlc::{self, StlcMutant, StlcOps, StlcProperty, Term};
use crate::workloads::{Backend, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    BstInsert,
    BstSinglePass,
    BstDerived,
    StlcDerived,
    StlcWellTyped,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::BstInsert,
        Strategy::BstSinglePass,
        Strategy::BstDerived,
        Strategy::StlcDerived,
        Strategy::StlcWellTyped,
    ];

    /// Same as the id of the workload it generates with.
    pub fn id(self) -> &'static str {
        match self {
            Strategy::BstInsert => "bst_insert",
            Strategy::BstSinglePass => "bst_single_pass",
            Strategy::BstDerived => "bst_derived",
            Strategy::StlcDerived => "stlc_derived",
            Strategy::StlcWellTyped => "stlc_welltyped",
        }
    }

    pub fn case_study(self) -> &'static str {
        match self {
            Strategy::BstInsert | Strategy::BstSinglePass | Strategy::BstDerived => "bst",
            Strategy::StlcDerived | Strategy::StlcWellTyped => "stlc",
        }
    }

    pub fn from_id(id: &str) -> Option<Strategy> {
        Strategy::ALL.into_iter().find(|s| s.id() == id)
    }

    pub fn mutants(self) -> Vec<Mutant> {
        match self.case_study() {
            "bst" => BstMutant::ALL.into_iter().map(Mutant::Bst).collect(),
            _ => StlcMutant::ALL.into_iter().map(Mutant::Stlc).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mutant {
    Bst(BstMutant),
    Stlc(StlcMutant),
}

impl Mutant {
    pub fn all() -> Vec<Mutant> {
        BstMutant::ALL
            .into_iter()
            .map(Mutant::Bst)
            .chain(StlcMutant::ALL.into_iter().map(Mutant::Stlc))
            .collect()
    }

    pub fn id(self) -> &'static str {
        match self {
            Mutant::Bst(m) => m.id(),
            Mutant::Stlc(m) => m.id(),
        }
    }

    pub fn case_study(self) -> &'static str {
        match self {
            Mutant::Bst(_) => "bst",
            Mutant::Stlc(_) => "stlc",
        }
    }

    pub fn op(self) -> &'static str {
        match self {
            Mutant::Bst(m) => m.op(),
            Mutant::Stlc(m) => m.op(),
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Mutant::Bst(m) => m.description(),
            Mutant::Stlc(m) => m.description(),
        }
    }

    pub fn properties(self) -> Vec<Property> {
        match self {
            Mutant::Bst(m) => m.properties().iter().copied().map(Property::Bst).collect(),
            Mutant::Stlc(m) => m.properties().iter().copied().map(Property::Stlc).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    Bst(BstProperty),
    Stlc(StlcProperty),
}

impl Property {
    pub fn id(self) -> &'static str {
        match self {
            Property::Bst(p) => p.id(),
            Property::Stlc(p) => p.id(),
        }
    }
}

/// One bug-property pair under one strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Task {
    pub strategy: Strategy,
    pub mutant: Mutant,
    pub property: Property,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.strategy.id(), self.mutant.id(), self.property.id())
    }
}

/// Generates one input and checks the property on it.
pub trait Trial: Send + Sync {
    fn run(&self, size: i64, seed: &mut Seed) -> Result<Verdict, GenError>;
}

enum Source<A> {
    Baseline(b::Gen<A>),
    Staged(Compiled<A>),
}

impl<A: 'static> Source<A> {
    fn generate(&self, size: i64, seed: &mut Seed) -> Result<A, GenError> {
        match self {
            Source::Baseline(g) => g.generate(size, seed),
            Source::Staged(c) => c.run(size, seed),
        }
    }
}

struct BstTrial {
    source: Source<Bst>,
    ops: BstOps,
    property: BstProperty,
}

impl Trial for BstTrial {
    fn run(&self, size: i64, seed: &mut Seed) -> Result<Verdict, GenError> {
        let t = self.source.generate(size, seed)?;
        let u = if self.property.trees() == 2 {
            self.source.generate(size, seed)?
        } else {
            Bst::Leaf
        };
        // Scalars come straight from the seed so every treatment draws them
        // the same way.
        let k = seed.int_in_range(0, KEY_MAX)?;
        let v = seed.int_in_range(0, KEY_MAX)?;
        let k2 = seed.int_in_range(0, KEY_MAX)?;
        Ok(self.property.check(&self.ops, &BstCase { t, u, k, v, k2 }))
    }
}

struct StlcTrial {
    source: Source<Term>,
    ops: StlcOps,
    property: StlcProperty,
}

impl Trial for StlcTrial {
    fn run(&self, size: i64, seed: &mut Seed) -> Result<Verdict, GenError> {
        let t = self.source.generate(size, seed)?;
        Ok(self.property.check(&self.ops, &t))
    }
}

fn bst_source(s: Strategy, backend: Backend) -> Result<Source<Bst>, StageError> {
    Ok(match (s, backend) {
        (Strategy::BstInsert, Backend::Baseline) => Source::Baseline(bst::insert_baseline()),
        (Strategy::BstInsert, Backend::Staged) => Source::Staged(bst::insert_compiled()?),
        (Strategy::BstSinglePass, Backend::Baseline) => Source::Baseline(bst::single_pass_baseline()),
        (Strategy::BstSinglePass, Backend::Staged) => Source::Staged(bst::single_pass_compiled()?),
        (_, Backend::Baseline) => Source::Baseline(bst::derived_baseline()),
        (_, Backend::Staged) => Source::Staged(bst::derived_compiled()?),
    })
}

fn stlc_source(s: Strategy, backend: Backend) -> Result<Source<Term>, StageError> {
    Ok(match (s, backend) {
        (Strategy::StlcWellTyped, Backend::Baseline) => Source::Baseline(stlc::welltyped_baseline()),
        (Strategy::StlcWellTyped, Backend::Staged) => Source::Staged(stlc::welltyped_compiled()?),
        (_, Backend::Baseline) => Source::Baseline(stlc::derived_baseline()),
        (_, Backend::Staged) => Source::Staged(stlc::derived_compiled()?),
    })
}

impl Task {
    pub fn id(&self) -> String {
        self.to_string()
    }

    pub fn parse(id: &str) -> Option<Task> {
        let mut parts = id.split(':');
        let (s, m, p) = (parts.next()?, parts.next()?, parts.next()?);
        if parts.next().is_some() {
            return None;
        }
        all_tasks()
            .into_iter()
            .find(|t| t.strategy.id() == s && t.mutant.id() == m && t.property.id() == p)
    }

    /// A trial against the mutated operations.
    pub fn trial(&self, backend: Backend) -> Result<Box<dyn Trial>, StageError> {
        self.build(backend, false)
    }

    /// A trial against the reference operations, which should never fail.
    pub fn reference_trial(&self, backend: Backend) -> Result<Box<dyn Trial>, StageError> {
        self.build(backend, true)
    }

    fn build(&self, backend: Backend, reference: bool) -> Result<Box<dyn Trial>, StageError> {
        Ok(match (self.mutant, self.property) {
            (Mutant::Bst(m), Property::Bst(property)) => Box::new(BstTrial {
                source: bst_source(self.strategy, backend)?,
                ops: if reference { BstOps::REFERENCE } else { BstOps::with(m) },
                property,
            }),
            (Mutant::Stlc(m), Property::Stlc(property)) => Box::new(StlcTrial {
                source: stlc_source(self.strategy, backend)?,
                ops: if reference {
                    StlcOps::REFERENCE
                } else {
                    StlcOps::with(m)
                },
                property,
            }),
            _ => return Err(StageError::IllFormed(format!("task {self} mixes case studies"))),
        })
    }
}

/// Every strategy paired with every mutant of its case study and each
/// property that mutant is known to violate.
pub fn all_tasks() -> Vec<Task> {
    let mut out = Vec::new();
    for strategy in Strategy::ALL {
        for mutant in strategy.mutants() {
            for property in mutant.properties() {
                out.push(Task {
                    strategy,
                    mutant,
                    property,
                });
            }
        }
    }
    out
}

/// Tasks matching a selector of up to three `:`-separated parts.
///
/// The first part is `all`, a strategy id or a case study (`bst`, `stlc`).
/// The mutant and property parts, when present, are ids or `*`.
pub fn select_tasks(selector: &str) -> Option<Vec<Task>> {
    let parts: Vec<&str> = selector.split(':').collect();
    if parts.len() > 3 {
        return None;
    }
    let head = parts[0];
    let part = |i: usize| parts.get(i).copied().filter(|p| *p != "*");
    let known_head =
        head == "all" || Strategy::from_id(head).is_some() || Strategy::ALL.iter().any(|s| s.case_study() == head);
    if !known_head {
        return None;
    }
    let picked: Vec<Task> = all_tasks()
        .into_iter()
        .filter(|t| head == "all" || t.strategy.id() == head || t.strategy.case_study() == head)
        .filter(|t| part(1).is_none_or(|m| t.mutant.id() == m))
        .filter(|t| part(2).is_none_or(|p| t.property.id() == p))
        .collect();
    if picked.is_empty() {
        None
    } else {
        Some(picked)
    }
}
