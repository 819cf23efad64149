//! Lowering of a [`Program`] to register slots, and its evaluator.
//!
//! Every definition gets a frame on a shared value stack: slot 0 holds the
//! size, then the parameters, then one slot per `let`. Evaluating a program
//! walks the lowered statements once; no staged combinator survives.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::code::{Code, PrimOp, VarId};
use super::ir::{Block, Program, Rhs};
use super::value::{Decode, Heap, Value, TUPLE_TAG};
use crate::error::{GenError, StageError};
use crate::rand::Seed;

#[derive(Debug)]
enum LCode {
    Const(Value),
    Slot(u32),
    Prim(PrimOp, Box<[LCode]>),
    Make(u32, Box<[LCode]>),
    /// A binary operator on two leaves, evaluated without recursion.
    Bin(PrimOp, Leaf, Leaf),
}

#[derive(Debug, Clone, Copy)]
enum Leaf {
    Const(Value),
    Slot(u32),
}

impl Leaf {
    #[inline(always)]
    fn get(self, frame: &[Value]) -> Value {
        match self {
            Leaf::Const(v) => v,
            Leaf::Slot(i) => frame[i as usize],
        }
    }
}

fn is_binary(op: PrimOp) -> bool {
    use PrimOp::*;
    matches!(op, Add | Sub | Mul | Div | Eq | Lt | Le | Min | Max)
}

#[derive(Debug)]
enum LRhs {
    Sample(LCode, LCode),
    Total(Box<[LCode]>),
    SampleBelow(LCode),
    CheckSize(LCode),
    Call(usize, LCode, Box<[LCode]>),
    Choose(LCode, Box<[(LCode, LBlock)]>),
}

#[derive(Debug)]
struct LStmt {
    slot: u32,
    rhs: LRhs,
}

#[derive(Debug)]
struct LBlock {
    stmts: Box<[LStmt]>,
    result: LCode,
}

#[derive(Debug)]
struct LDef {
    frame: usize,
    params: usize,
    body: LBlock,
}

#[derive(Debug)]
pub(crate) struct Machine {
    defs: Vec<LDef>,
    entry: usize,
}

struct Lowering {
    slots: HashMap<VarId, u32>,
}

impl Lowering {
    fn slot(&mut self, v: VarId) -> u32 {
        let n = self.slots.len() as u32;
        *self.slots.entry(v).or_insert(n)
    }

    fn code(&self, c: &Code) -> Result<LCode, StageError> {
        Ok(match c {
            Code::Int(n) => LCode::Const(Value::Int(*n)),
            Code::Bool(b) => LCode::Const(Value::Bool(*b)),
            Code::Var(v) => LCode::Slot(*self.slots.get(v).ok_or(StageError::ScopeViolation(*v))?),
            Code::Tuple(xs) => LCode::Make(TUPLE_TAG, self.codes(xs)?),
            Code::Construct(t, xs) => LCode::Make(*t, self.codes(xs)?),
            Code::Prim(op, xs) => {
                let xs = self.codes(xs)?;
                match (&xs[..], is_binary(*op)) {
                    ([a, b], true) => match (leaf(a), leaf(b)) {
                        (Some(a), Some(b)) => LCode::Bin(*op, a, b),
                        _ => LCode::Prim(*op, xs),
                    },
                    _ => LCode::Prim(*op, xs),
                }
            }
        })
    }

    fn codes(&self, xs: &[Code]) -> Result<Box<[LCode]>, StageError> {
        xs.iter().map(|x| self.code(x)).collect()
    }

    fn block(&mut self, b: &Block) -> Result<LBlock, StageError> {
        let mut stmts = Vec::with_capacity(b.stmts.len());
        for s in &b.stmts {
            let rhs = match &s.rhs {
                Rhs::Sample { lo, hi } => LRhs::Sample(self.code(lo)?, self.code(hi)?),
                Rhs::Total(ws) => LRhs::Total(self.codes(ws)?),
                Rhs::SampleBelow(n) => LRhs::SampleBelow(self.code(n)?),
                Rhs::CheckSize(n) => LRhs::CheckSize(self.code(n)?),
                Rhs::Call { def, size, args } => LRhs::Call(*def, self.code(size)?, self.codes(args)?),
                Rhs::Choose { selector, arms } => {
                    let sel = self.code(selector)?;
                    let mut out = Vec::with_capacity(arms.len());
                    for a in arms {
                        out.push((self.code(&a.weight)?, self.block(&a.body)?));
                    }
                    LRhs::Choose(sel, out.into_boxed_slice())
                }
            };
            stmts.push(LStmt {
                slot: self.slot(s.var),
                rhs,
            });
        }
        Ok(LBlock {
            stmts: stmts.into_boxed_slice(),
            result: self.code(&b.result)?,
        })
    }
}

fn leaf(c: &LCode) -> Option<Leaf> {
    match c {
        LCode::Const(v) => Some(Leaf::Const(*v)),
        LCode::Slot(i) => Some(Leaf::Slot(*i)),
        _ => None,
    }
}

impl Machine {
    pub(crate) fn lower(program: &Program) -> Result<Machine, StageError> {
        program.lint()?;
        let mut defs = Vec::with_capacity(program.defs.len());
        for d in &program.defs {
            let mut l = Lowering { slots: HashMap::new() };
            l.slot(d.size_param);
            for &p in &d.params {
                l.slot(p);
            }
            let body = l.block(&d.body)?;
            defs.push(LDef {
                frame: l.slots.len(),
                params: d.params.len(),
                body,
            });
        }
        Ok(Machine {
            defs,
            entry: program.entry,
        })
    }

    fn run(&self, size: i64, seed: &mut Seed, sc: &mut Scratch) -> Result<Value, GenError> {
        if size < 0 {
            return Err(GenError::NegativeSize(size));
        }
        sc.stack.clear();
        sc.heap.clear();
        let d = &self.defs[self.entry];
        sc.stack.resize(d.frame, Value::Int(0));
        sc.stack[0] = Value::Int(size);
        self.block(&d.body, 0, seed, sc).map_err(|e| *e)
    }

    fn block(&self, b: &LBlock, base: usize, seed: &mut Seed, sc: &mut Scratch) -> Res<Value> {
        for s in b.stmts.iter() {
            let v = match &s.rhs {
                LRhs::Sample(lo, hi) => {
                    let lo = sc.eval(lo, base)?.as_int()?;
                    let hi = sc.eval(hi, base)?.as_int()?;
                    Value::Int(seed.int_in_range(lo, hi)?)
                }
                LRhs::Total(ws) => {
                    let mut total: i64 = 0;
                    for w in ws.iter() {
                        let w = sc.eval(w, base)?.as_int()?;
                        if w < 0 {
                            return Err(Box::new(GenError::NegativeWeight(w)));
                        }
                        total += w;
                    }
                    Value::Int(total)
                }
                LRhs::SampleBelow(n) => {
                    let n = sc.eval(n, base)?.as_int()?;
                    if n < 1 {
                        return Err(Box::new(GenError::EmptyDistribution));
                    }
                    Value::Int(seed.int_in_range(0, n - 1)?)
                }
                LRhs::CheckSize(n) => {
                    let n = sc.eval(n, base)?.as_int()?;
                    if n < 0 {
                        return Err(Box::new(GenError::NegativeSize(n)));
                    }
                    Value::Int(n)
                }
                LRhs::Call(def, size, args) => {
                    let d = &self.defs[*def];
                    debug_assert_eq!(d.params, args.len());
                    // The callee frame starts right after the caller's; its
                    // arguments are written in place before it runs.
                    let callee = sc.stack.len();
                    sc.stack.resize(callee + d.frame, Value::Int(0));
                    sc.stack[callee] = sc.eval(size, base)?;
                    for (i, a) in args.iter().enumerate() {
                        sc.stack[callee + 1 + i] = sc.eval(a, base)?;
                    }
                    let out = self.block(&d.body, callee, seed, sc)?;
                    sc.stack.truncate(callee);
                    out
                }
                LRhs::Choose(sel, arms) => {
                    let mut rest = sc.eval(sel, base)?.as_int()?;
                    let (last, init) = arms.split_last().expect("lint rejects empty choose");
                    let mut taken = &last.1;
                    for (w, body) in init {
                        let w = sc.eval(w, base)?.as_int()?;
                        if rest < w {
                            taken = body;
                            break;
                        }
                        rest -= w;
                    }
                    self.block(taken, base, seed, sc)?
                }
            };
            sc.stack[base + s.slot as usize] = v;
        }
        sc.eval(&b.result, base)
    }
}

/// Machine-internal result. Errors are boxed so results fit in registers.
type Res<T> = Result<T, Box<GenError>>;

#[derive(Default)]
struct Scratch {
    stack: Vec<Value>,
    heap: Heap,
}

impl Scratch {
    #[inline]
    fn eval(&mut self, c: &LCode, base: usize) -> Res<Value> {
        eval(c, &self.stack[base..], &mut self.heap)
    }
}

#[inline(always)]
fn eval(c: &LCode, frame: &[Value], heap: &mut Heap) -> Res<Value> {
    match c {
        LCode::Const(v) => Ok(*v),
        LCode::Slot(i) => Ok(frame[*i as usize]),
        LCode::Bin(op, a, b) => bin(*op, a.get(frame), b.get(frame), heap),
        _ => eval_nested(c, frame, heap),
    }
}

/// Arity up to which constructor fields and host arguments are gathered
/// on the native stack.
const INLINE_ARGS: usize = 4;

#[inline(never)]
fn eval_nested(c: &LCode, frame: &[Value], heap: &mut Heap) -> Res<Value> {
    match c {
        LCode::Make(tag, xs) if xs.len() <= INLINE_ARGS => {
            let mut buf = [Value::Int(0); INLINE_ARGS];
            for (slot, x) in buf.iter_mut().zip(xs.iter()) {
                *slot = eval(x, frame, heap)?;
            }
            Ok(heap.alloc(*tag, &buf[..xs.len()]))
        }
        LCode::Make(tag, xs) => {
            // Fields are reserved first, so nested constructors land after
            // them.
            let (node, start) = heap.reserve(*tag, xs.len());
            for (i, x) in xs.iter().enumerate() {
                let v = eval(x, frame, heap)?;
                heap.set_field(start + i, v);
            }
            Ok(node)
        }
        LCode::Prim(op, xs) => prim(*op, xs, frame, heap),
        _ => eval(c, frame, heap),
    }
}

#[inline]
fn bin(op: PrimOp, a: Value, b: Value, heap: &Heap) -> Res<Value> {
    if let PrimOp::Eq = op {
        return Ok(match (a, b) {
            (Value::Node(_), _) | (_, Value::Node(_)) => Value::Bool(heap.equal(a, b)?),
            _ => Value::Bool(a == b),
        });
    }
    let (a, b) = (a.as_int()?, b.as_int()?);
    Ok(match op {
        PrimOp::Add => Value::Int(a.wrapping_add(b)),
        PrimOp::Sub => Value::Int(a.wrapping_sub(b)),
        PrimOp::Mul => Value::Int(a.wrapping_mul(b)),
        PrimOp::Div => {
            if b == 0 {
                return Err(Box::new(GenError::TypeMismatch("division by zero")));
            }
            Value::Int(a.wrapping_div(b))
        }
        PrimOp::Lt => Value::Bool(a < b),
        PrimOp::Le => Value::Bool(a <= b),
        PrimOp::Min => Value::Int(a.min(b)),
        PrimOp::Max => Value::Int(a.max(b)),
        _ => unreachable!("not a binary operator"),
    })
}

fn prim(op: PrimOp, xs: &[LCode], frame: &[Value], heap: &mut Heap) -> Res<Value> {
    if is_binary(op) {
        let a = eval(&xs[0], frame, heap)?;
        let b = eval(&xs[1], frame, heap)?;
        return bin(op, a, b, heap);
    }
    Ok(match op {
        PrimOp::Not => Value::Bool(!eval(&xs[0], frame, heap)?.as_bool()?),
        PrimOp::And => {
            let a = eval(&xs[0], frame, heap)?.as_bool()?;
            Value::Bool(a && eval(&xs[1], frame, heap)?.as_bool()?)
        }
        PrimOp::Or => {
            let a = eval(&xs[0], frame, heap)?.as_bool()?;
            Value::Bool(a || eval(&xs[1], frame, heap)?.as_bool()?)
        }
        PrimOp::If => {
            if eval(&xs[0], frame, heap)?.as_bool()? {
                eval(&xs[1], frame, heap)?
            } else {
                eval(&xs[2], frame, heap)?
            }
        }
        PrimOp::Field(i) => {
            let v = eval(&xs[0], frame, heap)?;
            heap.field(v, i as usize)?
        }
        PrimOp::Tag => {
            let v = eval(&xs[0], frame, heap)?;
            Value::Int(heap.tag(v)? as i64)
        }
        PrimOp::Add
        | PrimOp::Sub
        | PrimOp::Mul
        | PrimOp::Div
        | PrimOp::Eq
        | PrimOp::Lt
        | PrimOp::Le
        | PrimOp::Min
        | PrimOp::Max => unreachable!("handled above"),
        PrimOp::Host(f) => {
            if xs.len() <= INLINE_ARGS {
                let mut buf = [Value::Int(0); INLINE_ARGS];
                for (slot, x) in buf.iter_mut().zip(xs) {
                    *slot = eval(x, frame, heap)?;
                }
                (f.eval)(&buf[..xs.len()], heap)?
            } else {
                let args = xs.iter().map(|x| eval(x, frame, heap)).collect::<Res<Vec<Value>>>()?;
                (f.eval)(&args, heap)?
            }
        }
    })
}

thread_local! {
    static SCRATCH: RefCell<Scratch> = RefCell::new(Scratch::default());
}

type DecodeFn<A> = dyn Fn(Value, &Heap) -> Result<A, GenError> + Send + Sync;

/// An executable generator produced by [`compile`](super::compile).
///
/// Holds the emitted program, its lowered form and a decoder from run-time
/// values to `A`.
pub struct Compiled<A> {
    program: Arc<Program>,
    machine: Arc<Machine>,
    decode: Arc<DecodeFn<A>>,
}

impl<A> Clone for Compiled<A> {
    fn clone(&self) -> Self {
        Compiled {
            program: Arc::clone(&self.program),
            machine: Arc::clone(&self.machine),
            decode: Arc::clone(&self.decode),
        }
    }
}

impl<A> fmt::Debug for Compiled<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Compiled")
            .field("defs", &self.program.defs.len())
            .finish()
    }
}

impl<A: Decode + 'static> Compiled<A> {
    /// Lowers an already-built program, after checking it.
    pub fn from_program(program: Program) -> Result<Compiled<A>, StageError> {
        let machine = Machine::lower(&program)?;
        Ok(Compiled {
            program: Arc::new(program),
            machine: Arc::new(machine),
            decode: Arc::new(A::decode),
        })
    }
}

impl<A: 'static> Compiled<A> {
    pub fn program(&self) -> &Program {
        &self.program
    }

    /// Same decoder, different program.
    pub fn with_program(&self, program: Program) -> Result<Compiled<A>, StageError> {
        let machine = Machine::lower(&program)?;
        Ok(Compiled {
            program: Arc::new(program),
            machine: Arc::new(machine),
            decode: Arc::clone(&self.decode),
        })
    }

    /// Post-processes every output with a native function.
    pub fn map<B: 'static>(self, f: impl Fn(A) -> B + Send + Sync + 'static) -> Compiled<B> {
        let decode = self.decode;
        Compiled {
            program: self.program,
            machine: self.machine,
            decode: Arc::new(move |v, h| decode(v, h).map(&f)),
        }
    }

    /// Runs the program at `size`, advancing `seed`.
    pub fn run(&self, size: i64, seed: &mut Seed) -> Result<A, GenError> {
        SCRATCH.with(|cell| match cell.try_borrow_mut() {
            Ok(mut sc) => {
                let v = self.machine.run(size, seed, &mut sc)?;
                (self.decode)(v, &sc.heap)
            }
            Err(_) => {
                let mut sc = Scratch::default();
                let v = self.machine.run(size, seed, &mut sc)?;
                (self.decode)(v, &sc.heap)
            }
        })
    }

    /// Runs the program and hands the raw result to `f` with its heap.
    pub fn run_raw<R>(&self, size: i64, seed: &mut Seed, f: impl FnOnce(Value, &Heap) -> R) -> Result<R, GenError> {
        let mut sc = Scratch::default();
        let v = self.machine.run(size, seed, &mut sc)?;
        Ok(f(v, &sc.heap))
    }
}
