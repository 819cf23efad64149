//! Staged generator combinators.
//!
//! A [`Gen<A>`] runs at stage one: given the size as [`Code`] and a
//! [`Builder`], it appends let-bound effects to the program under
//! construction and returns a stage-one value, usually [`Code`]. Size and
//! seed are dynamic; the generator's structure is static and is gone once
//! [`compile`] has emitted and lowered the program.
//!
//! Effectful combinators ([`int`], [`weighted_union`], [`recurse`]) do their
//! own let-insertion, so [`bind`] never has to: a draw is named once and
//! every later use refers to the name.
//!
//! ```
//! use stagegen::staged::{self, Code};
//! use stagegen::{Seed, Variant};
//!
//! let pair = staged::int(0, 100).bind(|x| {
//!     staged::int(0, x.clone()).map(move |y| Code::Tuple(vec![x.clone(), y]))
//! });
//! let g = staged::compile::<(i64, i64)>(&pair).unwrap();
//! let (x, y) = g.run(10, &mut Seed::from_u64(0, Variant::Fast)).unwrap();
//! assert!(0 <= y && y <= x && x <= 100);
//! ```

mod builder;
mod code;
mod ir;
mod machine;
mod value;

use std::rc::Rc;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

pub use builder::{Builder, CompileOptions};
pub use code::{Code, HostFn, PrimOp, VarId};
pub use ir::{Arm, Block, Census, Def, Program, Rhs, Stmt};
pub use machine::Compiled;
pub use value::{Decode, Heap, Value, CONS_TAG, NIL_TAG, TUPLE_TAG};

use crate::error::{GenError, StageError};
use crate::rand::Seed;

type StageFn<A> = dyn Fn(&Code, &mut Builder) -> Result<A, StageError>;

/// A stage-one generator.
pub struct Gen<A> {
    stage: Rc<StageFn<A>>,
}

impl<A> Clone for Gen<A> {
    fn clone(&self) -> Self {
        Gen {
            stage: Rc::clone(&self.stage),
        }
    }
}

impl<A: 'static> Gen<A> {
    pub fn new(f: impl Fn(&Code, &mut Builder) -> Result<A, StageError> + 'static) -> Self {
        Gen { stage: Rc::new(f) }
    }

    /// Runs stage one at `size`, emitting into `b`.
    pub fn stage(&self, size: &Code, b: &mut Builder) -> Result<A, StageError> {
        (self.stage)(size, b)
    }

    pub fn bind<B: 'static>(self, k: impl Fn(A) -> Gen<B> + 'static) -> Gen<B> {
        bind(self, k)
    }

    pub fn map<B: 'static>(self, f: impl Fn(A) -> B + 'static) -> Gen<B> {
        map(self, f)
    }
}

pub fn pure<A: Clone + 'static>(x: A) -> Gen<A> {
    Gen::new(move |_, _| Ok(x.clone()))
}

/// Sequencing. Emits nothing itself.
pub fn bind<A: 'static, B: 'static>(g: Gen<A>, k: impl Fn(A) -> Gen<B> + 'static) -> Gen<B> {
    Gen::new(move |size, b| {
        let a = g.stage(size, b)?;
        k(a).stage(size, b)
    })
}

pub fn map<A: 'static, B: 'static>(g: Gen<A>, f: impl Fn(A) -> B + 'static) -> Gen<B> {
    Gen::new(move |size, b| g.stage(size, b).map(&f))
}

/// Uniform integer in `[lo, hi]`.
pub fn int(lo: impl Into<Code>, hi: impl Into<Code>) -> Gen<Code> {
    let (lo, hi) = (lo.into(), hi.into());
    Gen::new(move |_, b| {
        Ok(b.let_insert(Rhs::Sample {
            lo: lo.clone(),
            hi: hi.clone(),
        }))
    })
}

pub fn bool() -> Gen<Code> {
    int(0, 1).map(|v| Code::eq(v, Code::Int(1)))
}

pub fn size() -> Gen<Code> {
    Gen::new(|size, _| Ok(size.clone()))
}

/// Runs `g` with the size replaced by `n`. A size that is not known to be
/// nonnegative is checked at run time.
pub fn with_size<A: 'static>(n: impl Into<Code>, g: Gen<A>) -> Gen<A> {
    let n = n.into();
    Gen::new(move |_, b| {
        if b.known_nonneg(&n) {
            g.stage(&n, b)
        } else {
            let checked = b.let_insert(Rhs::CheckSize(n.clone()));
            if let Code::Var(v) = checked {
                b.mark_nonneg(v);
            }
            g.stage(&checked, b)
        }
    })
}

/// Weighted choice, specialized to the list of choices: emits the weight
/// sum, one draw below it and a comparison chain over the arms.
pub fn weighted_union(choices: Vec<(Code, Gen<Code>)>) -> Gen<Code> {
    Gen::new(move |size, b| {
        if choices.is_empty() {
            return Err(StageError::NoChoices);
        }
        let consts: Option<Vec<i64>> = choices.iter().map(|(w, _)| w.as_const_int()).collect();
        let total = match consts {
            Some(ws) if b.options().fold_constants && ws.iter().all(|&w| w >= 0) => Code::Int(ws.iter().sum()),
            _ => b.let_insert(Rhs::Total(choices.iter().map(|(w, _)| w.clone()).collect())),
        };
        let selector = b.let_insert(Rhs::SampleBelow(total));
        let mut arms = Vec::with_capacity(choices.len());
        for (w, g) in &choices {
            b.open();
            let out = g.stage(size, b);
            let result = match out {
                Ok(c) => c,
                Err(e) => {
                    b.close(Code::Int(0));
                    return Err(e);
                }
            };
            arms.push(Arm {
                weight: w.clone(),
                body: b.close(result),
            });
        }
        Ok(b.let_insert(Rhs::Choose { selector, arms }))
    })
}

/// Like [`weighted_union`] with constant weights.
pub fn frequency(choices: Vec<(i64, Gen<Code>)>) -> Gen<Code> {
    weighted_union(choices.into_iter().map(|(w, g)| (Code::Int(w), g)).collect())
}

static NEXT_FIXED_POINT: AtomicU64 = AtomicU64::new(0);

/// Recursive-call handle of a fixed point. Only valid while that fixed
/// point's definition is being emitted.
#[derive(Debug, Clone)]
pub struct Handle {
    key: u64,
    arity: usize,
}

impl Handle {
    pub fn arity(&self) -> usize {
        self.arity
    }
}

/// Recursive generator with no extra parameters.
pub fn fixed_point(f: impl FnOnce(&Handle) -> Gen<Code>) -> Gen<Code> {
    fixed_point_with("rec", 0, |h, _| f(h), vec![])
}

/// Recursive generator with one extra run-time parameter, started at `init`.
pub fn fixed_point_param(f: impl FnOnce(&Handle, Code) -> Gen<Code>, init: impl Into<Code>) -> Gen<Code> {
    fixed_point_with(
        "rec",
        1,
        |h, mut ps| f(h, ps.pop().expect("one parameter")),
        vec![init.into()],
    )
}

/// Recursive generator with `arity` extra parameters, called at `init`.
pub fn fixed_point_with(
    name: &str,
    arity: usize,
    f: impl FnOnce(&Handle, Vec<Code>) -> Gen<Code>,
    init: Vec<Code>,
) -> Gen<Code> {
    FixedPoint::new(name, arity, f).call(init)
}

/// A recursive definition that can be called from several places.
///
/// Emits one named definition per compilation, the first time one of its
/// calls is staged, and a let-bound call at every use. The body may only
/// capture constants; run-time values go through parameters.
#[derive(Clone)]
pub struct FixedPoint {
    inner: Rc<FixedPointInner>,
}

struct FixedPointInner {
    name: String,
    handle: Handle,
    placeholders: Vec<VarId>,
    body: Gen<Code>,
}

impl FixedPoint {
    pub fn new(name: &str, arity: usize, f: impl FnOnce(&Handle, Vec<Code>) -> Gen<Code>) -> Self {
        let handle = Handle {
            key: NEXT_FIXED_POINT.fetch_add(1, Ordering::Relaxed),
            arity,
        };
        // Parameters are staged as placeholder variables, renamed to fresh
        // binders each time the definition is emitted.
        let placeholders: Vec<VarId> = (0..arity)
            .map(|_| NEXT_PLACEHOLDER.fetch_add(1, Ordering::Relaxed))
            .collect();
        let body = f(&handle, placeholders.iter().map(|&v| Code::Var(v)).collect());
        FixedPoint {
            inner: Rc::new(FixedPointInner {
                name: name.to_string(),
                handle,
                placeholders,
                body,
            }),
        }
    }

    /// Call at the ambient size.
    pub fn call(&self, args: Vec<Code>) -> Gen<Code> {
        let fp = Rc::clone(&self.inner);
        Gen::new(move |size, b| {
            let h = &fp.handle;
            if args.len() != h.arity {
                return Err(StageError::Arity {
                    expected: h.arity,
                    got: args.len(),
                });
            }
            let def = match b.emitted(h.key) {
                Some(d) => d,
                None => emit_def(b, &fp.name, h, &fp.placeholders, &fp.body)?,
            };
            Ok(b.let_insert(Rhs::Call {
                def,
                size: size.clone(),
                args: args.clone(),
            }))
        })
    }
}

/// Placeholder ids live far above anything a builder hands out.
static NEXT_PLACEHOLDER: AtomicU32 = AtomicU32::new(1 << 31);

fn emit_def(
    b: &mut Builder,
    name: &str,
    h: &Handle,
    placeholders: &[VarId],
    body: &Gen<Code>,
) -> Result<usize, StageError> {
    let index = b.reserve_def();
    b.begin_fixed_point(h.key, index);
    let size_param = b.fresh();
    b.mark_nonneg(size_param);
    let params: Vec<VarId> = (0..h.arity).map(|_| b.fresh()).collect();
    b.open();
    let staged = body.stage(&Code::Var(size_param), b);
    let out = staged.map(|r| b.close(r));
    b.end_fixed_point();
    let block = out?;
    let block = rename_params(block, placeholders, &params);
    b.finish_def(
        index,
        Def {
            name: format!("{name}{index}"),
            size_param,
            params,
            body: block,
        },
    );
    Ok(index)
}

fn rename_params(block: Block, placeholders: &[VarId], params: &[VarId]) -> Block {
    let mut sub = |v: VarId| match placeholders.iter().position(|&p| p == v) {
        Some(i) => Code::Var(params[i]),
        None => Code::Var(v),
    };
    rename_block(&block, &mut sub)
}

fn rename_block(b: &Block, sub: &mut impl FnMut(VarId) -> Code) -> Block {
    let stmts = b
        .stmts
        .iter()
        .map(|s| Stmt {
            var: s.var,
            rhs: match &s.rhs {
                Rhs::Sample { lo, hi } => Rhs::Sample {
                    lo: lo.map_vars(sub),
                    hi: hi.map_vars(sub),
                },
                Rhs::Total(ws) => Rhs::Total(ws.iter().map(|w| w.map_vars(sub)).collect()),
                Rhs::SampleBelow(n) => Rhs::SampleBelow(n.map_vars(sub)),
                Rhs::CheckSize(n) => Rhs::CheckSize(n.map_vars(sub)),
                Rhs::Call { def, size, args } => Rhs::Call {
                    def: *def,
                    size: size.map_vars(sub),
                    args: args.iter().map(|a| a.map_vars(sub)).collect(),
                },
                Rhs::Choose { selector, arms } => Rhs::Choose {
                    selector: selector.map_vars(sub),
                    arms: arms
                        .iter()
                        .map(|a| Arm {
                            weight: a.weight.map_vars(sub),
                            body: rename_block(&a.body, sub),
                        })
                        .collect(),
                },
            },
        })
        .collect();
    Block {
        stmts,
        result: b.result.map_vars(sub),
    }
}

/// Recursive call with no extra arguments, at the ambient size.
pub fn recurse(h: &Handle) -> Gen<Code> {
    recurse_with(h, vec![])
}

/// Recursive call at the ambient size.
pub fn recurse_with(h: &Handle, args: Vec<Code>) -> Gen<Code> {
    let h = h.clone();
    Gen::new(move |size, b| {
        if args.len() != h.arity {
            return Err(StageError::Arity {
                expected: h.arity,
                got: args.len(),
            });
        }
        let def = b.active_def(h.key)?;
        Ok(b.let_insert(Rhs::Call {
            def,
            size: size.clone(),
            args: args.clone(),
        }))
    })
}

/// Runs stage one with a symbolic size and returns the emitted program.
pub fn stage_program(g: &Gen<Code>, options: CompileOptions) -> Result<Program, StageError> {
    let mut b = Builder::new(options);
    let main = b.reserve_def();
    let size = b.fresh();
    b.mark_nonneg(size);
    b.open();
    let result = g.stage(&Code::Var(size), &mut b)?;
    let body = b.close(result);
    b.finish_def(
        main,
        Def {
            name: "main".into(),
            size_param: size,
            params: vec![],
            body,
        },
    );
    let program = b.into_program()?;
    program.lint()?;
    Ok(program)
}

/// Stages `g` and lowers the program into an executable generator.
pub fn compile<A: Decode + 'static>(g: &Gen<Code>) -> Result<Compiled<A>, StageError> {
    compile_with(g, CompileOptions::default())
}

pub fn compile_with<A: Decode + 'static>(g: &Gen<Code>, options: CompileOptions) -> Result<Compiled<A>, StageError> {
    Compiled::from_program(stage_program(g, options)?)
}

/// Runs a compiled generator at `size`, advancing `seed`.
pub fn run<A: 'static>(g: &Compiled<A>, size: i64, seed: &mut Seed) -> Result<A, GenError> {
    g.run(size, seed)
}
