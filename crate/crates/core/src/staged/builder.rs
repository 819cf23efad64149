//! Stage-one program builder.
//!
//! Holds the stack of open blocks that effects are let-inserted into, the
//! fresh-variable counter, and the definitions emitted so far.

use std::collections::{HashMap, HashSet};

use super::code::{Code, PrimOp, VarId};
use super::ir::{Block, Def, Program, Rhs, Stmt};
use crate::error::StageError;

/// Options for a single compilation.
#[derive(Debug, Clone, Copy)]
pub struct CompileOptions {
    /// Fold weight sums of constant weights at stage one.
    pub fold_constants: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { fold_constants: true }
    }
}

pub struct Builder {
    next_var: VarId,
    blocks: Vec<Vec<Stmt>>,
    defs: Vec<Option<Def>>,
    /// Fixed points whose definitions are being emitted, innermost last.
    active: Vec<u64>,
    emitted: HashMap<u64, usize>,
    nonneg: HashSet<VarId>,
    options: CompileOptions,
}

impl Builder {
    pub(crate) fn new(options: CompileOptions) -> Builder {
        Builder {
            next_var: 0,
            blocks: Vec::new(),
            defs: Vec::new(),
            active: Vec::new(),
            emitted: HashMap::new(),
            nonneg: HashSet::new(),
            options,
        }
    }

    pub fn options(&self) -> CompileOptions {
        self.options
    }

    pub fn fresh(&mut self) -> VarId {
        let v = self.next_var;
        self.next_var += 1;
        v
    }

    /// Names an effect. Always returns a variable.
    pub fn let_insert(&mut self, rhs: Rhs) -> Code {
        let var = self.fresh();
        self.blocks
            .last_mut()
            .expect("let-insertion outside any block")
            .push(Stmt { var, rhs });
        Code::Var(var)
    }

    pub(crate) fn open(&mut self) {
        self.blocks.push(Vec::new());
    }

    pub(crate) fn close(&mut self, result: Code) -> Block {
        let stmts = self.blocks.pop().expect("unbalanced block");
        Block { stmts, result }
    }

    pub(crate) fn mark_nonneg(&mut self, v: VarId) {
        self.nonneg.insert(v);
    }

    /// Whether `c` is known at stage one to be a nonnegative integer.
    pub fn known_nonneg(&self, c: &Code) -> bool {
        match c {
            Code::Int(n) => *n >= 0,
            Code::Var(v) => self.nonneg.contains(v),
            Code::Prim(PrimOp::Div, xs) => match xs.as_slice() {
                [a, Code::Int(d)] => *d > 0 && self.known_nonneg(a),
                _ => false,
            },
            Code::Prim(PrimOp::Add | PrimOp::Mul | PrimOp::Min | PrimOp::Max, xs) => {
                xs.iter().all(|x| self.known_nonneg(x))
            }
            _ => false,
        }
    }

    pub(crate) fn reserve_def(&mut self) -> usize {
        self.defs.push(None);
        self.defs.len() - 1
    }

    pub(crate) fn finish_def(&mut self, index: usize, def: Def) {
        self.defs[index] = Some(def);
    }

    pub(crate) fn emitted(&self, key: u64) -> Option<usize> {
        self.emitted.get(&key).copied()
    }

    pub(crate) fn begin_fixed_point(&mut self, key: u64, def: usize) {
        self.emitted.insert(key, def);
        self.active.push(key);
    }

    pub(crate) fn end_fixed_point(&mut self) {
        self.active.pop();
    }

    /// Target definition of a recursive call, if the fixed point that owns
    /// `key` is currently being emitted.
    pub(crate) fn active_def(&self, key: u64) -> Result<usize, StageError> {
        if self.active.contains(&key) {
            Ok(self.emitted[&key])
        } else {
            Err(StageError::EscapedHandle)
        }
    }

    pub(crate) fn into_program(self) -> Result<Program, StageError> {
        let defs = self
            .defs
            .into_iter()
            .enumerate()
            .map(|(i, d)| d.ok_or_else(|| StageError::IllFormed(format!("definition {i} unfinished"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Program { defs, entry: 0 })
    }
}
