//! The A-normal-form program emitted by stage one.
//!
//! Every effect (a draw, a recursive call, a weighted choice, a checked
//! size) is the right-hand side of exactly one `let`. Values flow between
//! statements only through variables and pure [`Code`].

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use super::code::{Code, VarId};
use crate::error::StageError;

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub defs: Vec<Def>,
    pub entry: usize,
}

/// A named recursive definition. Every def implicitly receives the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Def {
    pub name: String,
    pub size_param: VarId,
    pub params: Vec<VarId>,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub result: Code,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub var: VarId,
    pub rhs: Rhs,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rhs {
    /// Uniform draw from `[lo, hi]`.
    Sample {
        lo: Code,
        hi: Code,
    },
    /// Sum of weights; fails on a negative weight.
    Total(Vec<Code>),
    /// Uniform draw from `[0, n)`; fails with an empty distribution if `n < 1`.
    SampleBelow(Code),
    /// Passes a size through, failing if it is negative.
    CheckSize(Code),
    Call {
        def: usize,
        size: Code,
        args: Vec<Code>,
    },
    /// Exactly one arm runs: the first whose weight exceeds the remaining
    /// selector after subtracting the weights before it.
    Choose {
        selector: Code,
        arms: Vec<Arm>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arm {
    pub weight: Code,
    pub body: Block,
}

impl Rhs {
    pub fn is_sample(&self) -> bool {
        matches!(self, Rhs::Sample { .. } | Rhs::SampleBelow(_))
    }

    fn for_each_code(&self, f: &mut impl FnMut(&Code)) {
        match self {
            Rhs::Sample { lo, hi } => {
                f(lo);
                f(hi);
            }
            Rhs::Total(ws) => ws.iter().for_each(f),
            Rhs::SampleBelow(c) | Rhs::CheckSize(c) => f(c),
            Rhs::Call { size, args, .. } => {
                f(size);
                args.iter().for_each(f);
            }
            Rhs::Choose { selector, arms } => {
                f(selector);
                for arm in arms {
                    f(&arm.weight);
                }
            }
        }
    }
}

/// Effect counts found by [`Program::census`].
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Census {
    pub samples: usize,
    pub calls: usize,
    pub chooses: usize,
    pub lets: usize,
}

impl Program {
    pub fn entry_def(&self) -> &Def {
        &self.defs[self.entry]
    }

    pub fn census(&self) -> Census {
        fn walk(b: &Block, c: &mut Census) {
            for s in &b.stmts {
                c.lets += 1;
                match &s.rhs {
                    Rhs::Sample { .. } | Rhs::SampleBelow(_) => c.samples += 1,
                    Rhs::Call { .. } => c.calls += 1,
                    Rhs::Choose { arms, .. } => {
                        c.chooses += 1;
                        for a in arms {
                            walk(&a.body, c);
                        }
                    }
                    Rhs::Total(_) | Rhs::CheckSize(_) => {}
                }
            }
        }
        let mut c = Census::default();
        for d in &self.defs {
            walk(&d.body, &mut c);
        }
        c
    }

    /// Checks well-formedness: unique binders, every variable used inside
    /// the scope of its binder, and calls that match their target's arity.
    pub fn lint(&self) -> Result<(), StageError> {
        if self.entry >= self.defs.len() {
            return Err(StageError::UnknownDef(self.entry));
        }
        let mut seen = HashSet::new();
        for def in &self.defs {
            let mut scope = Vec::new();
            for &p in std::iter::once(&def.size_param).chain(&def.params) {
                if !seen.insert(p) {
                    return Err(StageError::DuplicateBinder(p));
                }
                scope.push(p);
            }
            self.lint_block(&def.body, &mut scope, &mut seen)?;
        }
        Ok(())
    }

    fn lint_block(&self, block: &Block, scope: &mut Vec<VarId>, seen: &mut HashSet<VarId>) -> Result<(), StageError> {
        let mark = scope.len();
        for stmt in &block.stmts {
            let mut err = None;
            stmt.rhs.for_each_code(&mut |c| check_code(c, scope, &mut err));
            if let Some(e) = err {
                return Err(e);
            }
            match &stmt.rhs {
                Rhs::Call { def, args, .. } => {
                    let target = self.defs.get(*def).ok_or(StageError::UnknownDef(*def))?;
                    if target.params.len() != args.len() {
                        return Err(StageError::Arity {
                            expected: target.params.len(),
                            got: args.len(),
                        });
                    }
                }
                Rhs::Choose { arms, .. } => {
                    if arms.is_empty() {
                        return Err(StageError::IllFormed("choose without arms".into()));
                    }
                    for arm in arms {
                        self.lint_block(&arm.body, scope, seen)?;
                    }
                }
                _ => {}
            }
            if !seen.insert(stmt.var) {
                return Err(StageError::DuplicateBinder(stmt.var));
            }
            scope.push(stmt.var);
        }
        let mut err = None;
        check_code(&block.result, scope, &mut err);
        scope.truncate(mark);
        err.map_or(Ok(()), Err)
    }
}

impl Program {
    /// Fault injection: rewrites the program as if draws were spliced into
    /// every place that reads them instead of being named once. Every read
    /// of a sampled variable after the first gets a fresh draw.
    pub fn without_let_insertion(&self) -> Program {
        let mut next = self.max_var() + 1;
        let defs = self
            .defs
            .iter()
            .map(|d| Def {
                body: unshare_block(&d.body, &mut Default::default(), &mut next),
                ..d.clone()
            })
            .collect();
        Program {
            defs,
            entry: self.entry,
        }
    }

    fn max_var(&self) -> VarId {
        fn block(b: &Block, m: &mut VarId) {
            for s in &b.stmts {
                *m = (*m).max(s.var);
                if let Rhs::Choose { arms, .. } = &s.rhs {
                    for a in arms {
                        block(&a.body, m);
                    }
                }
            }
        }
        let mut m = 0;
        for d in &self.defs {
            m = m.max(d.size_param);
            m = d.params.iter().fold(m, |m, &p| m.max(p));
            block(&d.body, &mut m);
        }
        m
    }
}

#[derive(Default, Clone)]
struct Draws {
    /// Sampled variables with their bounds and whether they were read yet.
    vars: std::collections::HashMap<VarId, (Rhs, bool)>,
}

fn respliced(c: &Code, draws: &mut Draws, out: &mut Vec<Stmt>, next: &mut VarId) -> Code {
    c.map_vars(&mut |v| match draws.vars.get_mut(&v) {
        Some((_, used @ false)) => {
            *used = true;
            Code::Var(v)
        }
        Some((rhs, true)) => {
            let fresh = *next;
            *next += 1;
            out.push(Stmt {
                var: fresh,
                rhs: rhs.clone(),
            });
            Code::Var(fresh)
        }
        None => Code::Var(v),
    })
}

fn unshare_block(b: &Block, draws: &mut Draws, next: &mut VarId) -> Block {
    let mut stmts = Vec::new();
    for s in &b.stmts {
        let mut pre = Vec::new();
        let rhs = match &s.rhs {
            Rhs::Sample { lo, hi } => Rhs::Sample {
                lo: respliced(lo, draws, &mut pre, next),
                hi: respliced(hi, draws, &mut pre, next),
            },
            Rhs::Total(ws) => Rhs::Total(ws.iter().map(|w| respliced(w, draws, &mut pre, next)).collect()),
            Rhs::SampleBelow(n) => Rhs::SampleBelow(respliced(n, draws, &mut pre, next)),
            Rhs::CheckSize(n) => Rhs::CheckSize(respliced(n, draws, &mut pre, next)),
            Rhs::Call { def, size, args } => Rhs::Call {
                def: *def,
                size: respliced(size, draws, &mut pre, next),
                args: args.iter().map(|a| respliced(a, draws, &mut pre, next)).collect(),
            },
            Rhs::Choose { selector, arms } => {
                let selector = respliced(selector, draws, &mut pre, next);
                let arms = arms
                    .iter()
                    .map(|a| {
                        let weight = respliced(&a.weight, draws, &mut pre, next);
                        let mut inner = draws.clone();
                        let body = unshare_block(&a.body, &mut inner, next);
                        Arm { weight, body }
                    })
                    .collect();
                Rhs::Choose { selector, arms }
            }
        };
        stmts.extend(pre);
        if rhs.is_sample() {
            draws.vars.insert(s.var, (rhs.clone(), false));
        }
        stmts.push(Stmt { var: s.var, rhs });
    }
    let result = respliced(&b.result, draws, &mut stmts, next);
    Block { stmts, result }
}

fn check_code(c: &Code, scope: &[VarId], err: &mut Option<StageError>) {
    c.for_each_var(&mut |v| {
        if err.is_none() && !scope.contains(&v) {
            *err = Some(StageError::ScopeViolation(v));
        }
    });
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (i, def) in self.defs.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = write!(out, "def {}(v{}, seed", def.name, def.size_param);
            for p in &def.params {
                let _ = write!(out, ", v{p}");
            }
            out.push_str("):\n");
            write_block(&mut out, self, &def.body, 1);
        }
        f.write_str(&out)
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_block(out: &mut String, prog: &Program, block: &Block, depth: usize) {
    for stmt in &block.stmts {
        indent(out, depth);
        let _ = write!(out, "let v{} = ", stmt.var);
        match &stmt.rhs {
            Rhs::Sample { lo, hi } => {
                let _ = writeln!(out, "sample({lo}, {hi})");
            }
            Rhs::Total(ws) => {
                out.push_str("total(");
                for (i, w) in ws.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    let _ = write!(out, "{w}");
                }
                out.push_str(")\n");
            }
            Rhs::SampleBelow(n) => {
                let _ = writeln!(out, "sample_below({n})");
            }
            Rhs::CheckSize(n) => {
                let _ = writeln!(out, "check_size({n})");
            }
            Rhs::Call { def, size, args } => {
                let name = prog.defs.get(*def).map_or("?", |d| d.name.as_str());
                let _ = write!(out, "call {name}({size}");
                for a in args {
                    let _ = write!(out, ", {a}");
                }
                out.push_str(")\n");
            }
            Rhs::Choose { selector, arms } => {
                let _ = writeln!(out, "choose {selector}");
                for arm in arms {
                    indent(out, depth + 1);
                    let _ = writeln!(out, "case {}:", arm.weight);
                    write_block(out, prog, &arm.body, depth + 2);
                }
            }
        }
    }
    indent(out, depth);
    let _ = writeln!(out, "ret {}", block.result);
}
