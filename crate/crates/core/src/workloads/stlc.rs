//! Simply typed lambda calculus with de Bruijn indices.
//!
//! `step` is full normal-order reduction: the leftmost-outermost redex is
//! contracted, including under binders, so substitution has to shift free
//! variables correctly.

use std::fmt;
use std::sync::Arc;

use crate::baseline as b;
use crate::derive::{self, Schema, Tree};
use crate::error::GenError;
use crate::staged::{self as st, Code, Compiled, Decode, Heap, HostFn, Value, CONS_TAG, NIL_TAG};
use crate::workloads::seq::Seq;
use crate::workloads::Verdict;

const BASE: u32 = 0;
const ARROW: u32 = 1;

const VAR: u32 = 0;
const CONST: u32 = 1;
const LAM: u32 = 2;
const APP: u32 = 3;

/// Largest constant.
pub const CONST_MAX: i64 = 100;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ty {
    Base,
    Arrow(Arc<Ty>, Arc<Ty>),
}

impl Ty {
    pub fn arrow(a: Ty, r: Ty) -> Ty {
        Ty::Arrow(Arc::new(a), Arc::new(r))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(i64),
    Const(i64),
    Lam(Arc<Ty>, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
}

impl Term {
    pub fn lam(t: Ty, body: Term) -> Term {
        Term::Lam(Arc::new(t), Arc::new(body))
    }

    pub fn app(f: Term, x: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(x))
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::Lam(_, b) => 1 + b.size(),
            Term::App(f, x) => 1 + f.size() + x.size(),
        }
    }

    /// Whether no beta-redex occurs anywhere in the term.
    pub fn is_normal(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => true,
            Term::Lam(_, b) => b.is_normal(),
            Term::App(f, x) => !matches!(**f, Term::Lam(..)) && f.is_normal() && x.is_normal(),
        }
    }

    fn from_tree(t: &Tree) -> Option<Term> {
        let Tree::Variant(tag, payload) = t else {
            return None;
        };
        Some(match (*tag, &**payload) {
            (VAR, Tree::Int(i)) => Term::Var(*i),
            (CONST, Tree::Int(c)) => Term::Const(*c),
            (LAM, Tree::Tuple(f)) => match &f[..] {
                [ty, body] => Term::Lam(Arc::new(ty_from_tree(ty)?), Arc::new(Term::from_tree(body)?)),
                _ => return None,
            },
            (APP, Tree::Tuple(f)) => match &f[..] {
                [a, b] => Term::App(Arc::new(Term::from_tree(a)?), Arc::new(Term::from_tree(b)?)),
                _ => return None,
            },
            _ => return None,
        })
    }
}

fn ty_from_tree(t: &Tree) -> Option<Ty> {
    match t {
        Tree::Variant(BASE, _) => Some(Ty::Base),
        Tree::Variant(ARROW, payload) => match &**payload {
            Tree::Tuple(f) => match &f[..] {
                [a, r] => Some(Ty::arrow(ty_from_tree(a)?, ty_from_tree(r)?)),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Base => f.write_str("B"),
            Ty::Arrow(a, r) => write!(f, "({a} -> {r})"),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "#{i}"),
            Term::Const(c) => write!(f, "{c}"),
            Term::Lam(t, b) => write!(f, "(\\{t}. {b})"),
            Term::App(a, b) => write!(f, "({a} {b})"),
        }
    }
}

impl Decode for Ty {
    fn decode(v: Value, heap: &Heap) -> Result<Self, GenError> {
        match (heap.tag(v)?, heap.fields(v)?) {
            (BASE, []) => Ok(Ty::Base),
            (ARROW, [a, r]) => Ok(Ty::arrow(Ty::decode(*a, heap)?, Ty::decode(*r, heap)?)),
            _ => Err(GenError::Decode("malformed type".into())),
        }
    }
}

impl Decode for Term {
    fn decode(v: Value, heap: &Heap) -> Result<Self, GenError> {
        match (heap.tag(v)?, heap.fields(v)?) {
            (VAR, [i]) => Ok(Term::Var(i.as_int()?)),
            (CONST, [c]) => Ok(Term::Const(c.as_int()?)),
            (LAM, [t, b]) => Ok(Term::lam(Ty::decode(*t, heap)?, Term::decode(*b, heap)?)),
            (APP, [f, x]) => Ok(Term::app(Term::decode(*f, heap)?, Term::decode(*x, heap)?)),
            _ => Err(GenError::Decode("malformed term".into())),
        }
    }
}

/// Type of `t` in the context `ctx`, innermost binder last.
pub fn typecheck(ctx: &mut Vec<Arc<Ty>>, t: &Term) -> Option<Arc<Ty>> {
    match t {
        Term::Var(i) => {
            let i = usize::try_from(*i).ok()?;
            ctx.len().checked_sub(i + 1).map(|j| Arc::clone(&ctx[j]))
        }
        Term::Const(_) => Some(Arc::new(Ty::Base)),
        Term::Lam(a, body) => {
            ctx.push(Arc::clone(a));
            let r = typecheck(ctx, body);
            ctx.pop();
            Some(Arc::new(Ty::Arrow(Arc::clone(a), r?)))
        }
        Term::App(f, x) => match &*typecheck(ctx, f)? {
            Ty::Arrow(a, r) if *typecheck(ctx, x)? == **a => Some(Arc::clone(r)),
            _ => None,
        },
    }
}

pub fn type_of(t: &Term) -> Option<Arc<Ty>> {
    typecheck(&mut Vec::new(), t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StlcMutant {
    /// Substitution does not shift the replacement under a binder.
    SubstNoShift,
    /// Substitution does not bump the target index under a binder.
    SubstNoIncr,
    /// Shifting also moves bound variables.
    ShiftIgnoresCutoff,
    /// Beta reduction leaves the result shifted up by one.
    BetaNoUnshift,
    /// Beta reduction drops the argument.
    BetaNoSubst,
    /// Reduction never looks inside the argument of an application.
    StepNoArg,
}

impl StlcMutant {
    pub const ALL: [StlcMutant; 6] = [
        StlcMutant::SubstNoShift,
        StlcMutant::SubstNoIncr,
        StlcMutant::ShiftIgnoresCutoff,
        StlcMutant::BetaNoUnshift,
        StlcMutant::BetaNoSubst,
        StlcMutant::StepNoArg,
    ];

    pub fn id(self) -> &'static str {
        match self {
            StlcMutant::SubstNoShift => "subst_no_shift",
            StlcMutant::SubstNoIncr => "subst_no_incr",
            StlcMutant::ShiftIgnoresCutoff => "shift_ignores_cutoff",
            StlcMutant::BetaNoUnshift => "beta_no_unshift",
            StlcMutant::BetaNoSubst => "beta_no_subst",
            StlcMutant::StepNoArg => "step_no_arg",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            StlcMutant::SubstNoShift => "substitution under a binder does not shift the argument",
            StlcMutant::SubstNoIncr => "substitution under a binder keeps the same index",
            StlcMutant::ShiftIgnoresCutoff => "shift ignores its cutoff",
            StlcMutant::BetaNoUnshift => "beta reduction does not shift the result down",
            StlcMutant::BetaNoSubst => "beta reduction discards the argument",
            StlcMutant::StepNoArg => "reduction skips application arguments",
        }
    }

    pub fn op(self) -> &'static str {
        match self {
            StlcMutant::SubstNoShift | StlcMutant::SubstNoIncr => "subst",
            StlcMutant::ShiftIgnoresCutoff => "shift",
            _ => "step",
        }
    }

    pub fn properties(self) -> &'static [StlcProperty] {
        use StlcProperty::*;
        match self {
            StlcMutant::StepNoArg => &[Progress],
            _ => &[SinglePreserve, MultiPreserve],
        }
    }

    pub fn from_id(id: &str) -> Option<StlcMutant> {
        StlcMutant::ALL.into_iter().find(|m| m.id() == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StlcOps {
    pub mutant: Option<StlcMutant>,
}

impl StlcOps {
    pub const REFERENCE: StlcOps = StlcOps { mutant: None };

    pub fn with(m: StlcMutant) -> StlcOps {
        StlcOps { mutant: Some(m) }
    }

    fn is(&self, m: StlcMutant) -> bool {
        self.mutant == Some(m)
    }

    /// Adds `d` to every variable at or above `cutoff`.
    pub fn shift(&self, d: i64, cutoff: i64, t: &Term) -> Term {
        match t {
            Term::Var(k) => {
                if *k >= cutoff || self.is(StlcMutant::ShiftIgnoresCutoff) {
                    Term::Var(k + d)
                } else {
                    Term::Var(*k)
                }
            }
            Term::Const(c) => Term::Const(*c),
            Term::Lam(a, body) => Term::Lam(Arc::clone(a), Arc::new(self.shift(d, cutoff + 1, body))),
            Term::App(f, x) => Term::App(Arc::new(self.shift(d, cutoff, f)), Arc::new(self.shift(d, cutoff, x))),
        }
    }

    /// Replaces variable `j` with `s`.
    pub fn subst(&self, j: i64, s: &Term, t: &Term) -> Term {
        match t {
            Term::Var(k) => {
                if *k == j {
                    s.clone()
                } else {
                    Term::Var(*k)
                }
            }
            Term::Const(c) => Term::Const(*c),
            Term::Lam(a, body) => {
                let j2 = if self.is(StlcMutant::SubstNoIncr) { j } else { j + 1 };
                let s2 = if self.is(StlcMutant::SubstNoShift) {
                    s.clone()
                } else {
                    self.shift(1, 0, s)
                };
                Term::Lam(Arc::clone(a), Arc::new(self.subst(j2, &s2, body)))
            }
            Term::App(f, x) => Term::App(Arc::new(self.subst(j, s, f)), Arc::new(self.subst(j, s, x))),
        }
    }

    /// Contracts `(\. body) arg`.
    pub fn beta(&self, body: &Term, arg: &Term) -> Term {
        if self.is(StlcMutant::BetaNoSubst) {
            return self.shift(-1, 0, body);
        }
        let r = self.subst(0, &self.shift(1, 0, arg), body);
        if self.is(StlcMutant::BetaNoUnshift) {
            r
        } else {
            self.shift(-1, 0, &r)
        }
    }

    /// One leftmost-outermost reduction step, if any redex exists.
    pub fn step(&self, t: &Term) -> Option<Term> {
        match t {
            Term::Var(_) | Term::Const(_) => None,
            Term::Lam(a, body) => Some(Term::Lam(Arc::clone(a), Arc::new(self.step(body)?))),
            Term::App(f, x) => {
                if let Term::Lam(_, body) = &**f {
                    return Some(self.beta(body, x));
                }
                if let Some(f2) = self.step(f) {
                    return Some(Term::App(Arc::new(f2), Arc::clone(x)));
                }
                if self.is(StlcMutant::StepNoArg) {
                    return None;
                }
                Some(Term::App(Arc::clone(f), Arc::new(self.step(x)?)))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StlcProperty {
    /// One step preserves the type of a closed well-typed term.
    SinglePreserve,
    /// Every term along a bounded reduction sequence keeps the type.
    MultiPreserve,
    /// A closed well-typed term steps unless it has no redex.
    Progress,
}

/// Step bound for [`StlcProperty::MultiPreserve`].
pub const MULTI_STEPS: usize = 16;
/// Terms larger than this stop a reduction sequence early.
pub const MULTI_SIZE_CAP: usize = 4096;

impl StlcProperty {
    pub const ALL: [StlcProperty; 3] = [
        StlcProperty::SinglePreserve,
        StlcProperty::MultiPreserve,
        StlcProperty::Progress,
    ];

    pub fn id(self) -> &'static str {
        match self {
            StlcProperty::SinglePreserve => "SinglePreserve",
            StlcProperty::MultiPreserve => "MultiPreserve",
            StlcProperty::Progress => "Progress",
        }
    }

    pub fn check(self, ops: &StlcOps, t: &Term) -> Verdict {
        let Some(ty) = type_of(t) else {
            return Verdict::Discard;
        };
        let ok = match self {
            StlcProperty::SinglePreserve => match ops.step(t) {
                None => true,
                Some(t2) => type_of(&t2) == Some(ty),
            },
            StlcProperty::MultiPreserve => {
                let mut cur = t.clone();
                let mut ok = true;
                for _ in 0..MULTI_STEPS {
                    match ops.step(&cur) {
                        None => break,
                        Some(next) => {
                            if type_of(&next).as_ref() != Some(&ty) {
                                ok = false;
                                break;
                            }
                            if next.size() > MULTI_SIZE_CAP {
                                break;
                            }
                            cur = next;
                        }
                    }
                }
                ok
            }
            StlcProperty::Progress => ops.step(t).is_some() || t.is_normal(),
        };
        Verdict::from_pass(ok)
    }
}

impl fmt::Display for StlcProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

fn tree_to_term(t: Tree) -> Term {
    Term::from_tree(&t).expect("value follows the term schema")
}

pub fn derived_baseline() -> b::Gen<Term> {
    derive::derive_baseline(&Schema::stlc_term())
        .expect("valid schema")
        .map(tree_to_term)
}

/// A term read straight from the derived representation.
struct DerivedTerm(Term);

fn ty_from_derived(v: Value, heap: &Heap) -> Result<Ty, GenError> {
    match derive::variant_parts(v, heap)? {
        (BASE, _) => Ok(Ty::Base),
        (ARROW, p) => match derive::tuple_fields(p, heap)? {
            [a, r] => Ok(Ty::arrow(ty_from_derived(*a, heap)?, ty_from_derived(*r, heap)?)),
            _ => Err(GenError::Decode("malformed arrow".into())),
        },
        _ => Err(GenError::Decode("unknown type tag".into())),
    }
}

fn term_from_derived(v: Value, heap: &Heap) -> Result<Term, GenError> {
    let (tag, p) = derive::variant_parts(v, heap)?;
    Ok(match tag {
        VAR => Term::Var(p.as_int()?),
        CONST => Term::Const(p.as_int()?),
        LAM | APP => match derive::tuple_fields(p, heap)? {
            [a, b] if tag == LAM => Term::lam(ty_from_derived(*a, heap)?, term_from_derived(*b, heap)?),
            [a, b] => Term::app(term_from_derived(*a, heap)?, term_from_derived(*b, heap)?),
            _ => return Err(GenError::Decode("malformed term".into())),
        },
        _ => return Err(GenError::Decode("unknown term tag".into())),
    })
}

impl Decode for DerivedTerm {
    fn decode(v: Value, heap: &Heap) -> Result<Self, GenError> {
        term_from_derived(v, heap).map(DerivedTerm)
    }
}

pub fn derived_compiled() -> Result<Compiled<Term>, crate::StageError> {
    let g = derive::derive_staged(&Schema::stlc_term()).expect("valid schema");
    Ok(st::compile::<DerivedTerm>(&g)?.map(|t| t.0))
}

/// Size of the target type of a well-typed term.
pub const TARGET_TYPE_SIZE: i64 = 3;
/// Size of the argument type picked for an application.
pub const ARG_TYPE_SIZE: i64 = 1;

type Ctx = Arc<Seq<Arc<Ty>>>;

fn matching(ctx: &Ctx, t: &Ty) -> Vec<i64> {
    ctx.iter()
        .enumerate()
        .filter(|(_, u)| ***u == *t)
        .map(|(i, _)| i as i64)
        .collect()
}

fn ty_baseline() -> b::Gen<Arc<Ty>> {
    b::fixed_point(|this| {
        b::size().bind(move |n| {
            let sub = b::with_size(n / 2, this.clone());
            let arrow = sub.clone().bind(move |a| {
                sub.clone()
                    .bind(move |r| b::pure(Arc::new(Ty::Arrow(Arc::clone(&a), r))))
            });
            b::weighted_union(vec![(1, b::pure(Arc::new(Ty::Base))), (n, arrow)])
        })
    })
}

/// Terms of a generated type, built by choosing among variables of that
/// type, constants (at the base type), lambdas (at arrow types) and
/// applications to an argument of a small generated type. Every recursive
/// position gets half the size.
pub fn welltyped_baseline() -> b::Gen<Term> {
    let ty = ty_baseline();
    let arg_ty = b::with_size(ARG_TYPE_SIZE, ty.clone());
    let term: b::FixedPoint<(Ctx, Arc<Ty>), Term> =
        b::FixedPoint::new(move |this: &b::Recur<(Ctx, Arc<Ty>), Term>, (ctx, t): (Ctx, Arc<Ty>)| {
            let this = this.clone();
            let arg_ty = arg_ty.clone();
            b::size().bind(move |n| {
                let half = n / 2;
                let hits = matching(&ctx, &t);
                let count = hits.len() as i64;
                let var = b::int(0, count - 1).map(move |i| Term::Var(hits[i as usize]));
                let (is_base, constant) = match &*t {
                    Ty::Base => (1, b::int(0, CONST_MAX).map(Term::Const)),
                    Ty::Arrow(..) => (0, b::Gen::fail(GenError::TypeMismatch("constant at arrow type"))),
                };
                let (is_arrow, lam) = match &*t {
                    Ty::Arrow(a, r) => {
                        let a2 = Arc::clone(a);
                        let body = this.call((Seq::cons(Arc::clone(a), Arc::clone(&ctx)), Arc::clone(r)));
                        (
                            1,
                            b::with_size(half, body).map(move |body| Term::Lam(Arc::clone(&a2), Arc::new(body))),
                        )
                    }
                    Ty::Base => (0, b::Gen::fail(GenError::TypeMismatch("lambda at base type"))),
                };
                let app = {
                    let (this, ctx, t) = (this.clone(), Arc::clone(&ctx), Arc::clone(&t));
                    arg_ty.clone().bind(move |a| {
                        let fun_ty = Arc::new(Ty::Arrow(Arc::clone(&a), Arc::clone(&t)));
                        let arg = b::with_size(half, this.call((Arc::clone(&ctx), a)));
                        b::with_size(half, this.call((Arc::clone(&ctx), fun_ty))).bind(move |f| {
                            let f = Arc::new(f);
                            arg.clone()
                                .bind(move |x| b::pure(Term::App(Arc::clone(&f), Arc::new(x))))
                        })
                    })
                };
                b::weighted_union(vec![(count, var), (is_base, constant), (is_arrow, lam), (n, app)])
            })
        });
    b::with_size(TARGET_TYPE_SIZE, ty).bind(move |t| term.call((Seq::nil(), t)))
}

fn count_matching(args: &[Value], heap: &Heap) -> Result<Value, GenError> {
    let (mut ctx, t) = (args[0], args[1]);
    let mut n = 0;
    while heap.tag(ctx)? == CONS_TAG {
        if heap.equal(heap.field(ctx, 0)?, t)? {
            n += 1;
        }
        ctx = heap.field(ctx, 1)?;
    }
    Ok(Value::Int(n))
}

fn nth_matching(args: &[Value], heap: &Heap) -> Result<Value, GenError> {
    let (mut ctx, t, mut want) = (args[0], args[1], args[2].as_int()?);
    let mut index = 0;
    while heap.tag(ctx)? == CONS_TAG {
        if heap.equal(heap.field(ctx, 0)?, t)? {
            if want == 0 {
                return Ok(Value::Int(index));
            }
            want -= 1;
        }
        index += 1;
        ctx = heap.field(ctx, 1)?;
    }
    Err(GenError::TypeMismatch("no matching variable"))
}

/// Number of context entries equal to a type.
pub const COUNT_MATCHING: HostFn = HostFn {
    name: "count_matching",
    eval: count_matching,
};

/// De Bruijn index of the i-th context entry equal to a type.
pub const NTH_MATCHING: HostFn = HostFn {
    name: "nth_matching",
    eval: nth_matching,
};

fn ty_staged() -> st::Gen<Code> {
    st::fixed_point(|this| {
        let this = this.clone();
        st::size().bind(move |n| {
            let sub = st::with_size(Code::half(n.clone()), st::recurse(&this));
            let arrow = sub.clone().bind(move |a| {
                sub.clone()
                    .bind(move |r| st::pure(Code::Construct(ARROW, vec![a.clone(), r])))
            });
            st::weighted_union(vec![
                (Code::Int(1), st::pure(Code::Construct(BASE, vec![]))),
                (n, arrow),
            ])
        })
    })
}

pub fn welltyped_staged() -> st::Gen<Code> {
    let ty = ty_staged();
    let arg_ty = st::with_size(ARG_TYPE_SIZE, ty.clone());
    let term = st::FixedPoint::new("term", 2, move |this, params| {
        let (ctx, t) = (params[0].clone(), params[1].clone());
        let this = this.clone();
        st::size().bind(move |n| {
            let half = Code::half(n.clone());
            let is_base = Code::eq(Code::tag(t.clone()), Code::Int(BASE as i64));
            let count = Code::host(COUNT_MATCHING, vec![ctx.clone(), t.clone()]);
            let var = {
                let (ctx, t) = (ctx.clone(), t.clone());
                st::int(0, Code::sub(count.clone(), Code::Int(1)))
                    .map(move |i| Code::Construct(VAR, vec![Code::host(NTH_MATCHING, vec![ctx.clone(), t.clone(), i])]))
            };
            let constant = st::int(0, CONST_MAX).map(|c| Code::Construct(CONST, vec![c]));
            let lam = {
                let (a, r) = (Code::field(t.clone(), 0), Code::field(t.clone(), 1));
                let inner = Code::Construct(CONS_TAG, vec![a.clone(), ctx.clone()]);
                st::with_size(half.clone(), st::recurse_with(&this, vec![inner, r]))
                    .map(move |body| Code::Construct(LAM, vec![a.clone(), body]))
            };
            let app = {
                let (this, ctx, t, half) = (this.clone(), ctx.clone(), t.clone(), half.clone());
                arg_ty.clone().bind(move |a| {
                    let fun_ty = Code::Construct(ARROW, vec![a.clone(), t.clone()]);
                    let arg = st::with_size(half.clone(), st::recurse_with(&this, vec![ctx.clone(), a]));
                    st::with_size(half.clone(), st::recurse_with(&this, vec![ctx.clone(), fun_ty])).bind(move |f| {
                        arg.clone()
                            .bind(move |x| st::pure(Code::Construct(APP, vec![f.clone(), x])))
                    })
                })
            };
            st::weighted_union(vec![
                (count, var),
                (Code::ite(is_base.clone(), Code::Int(1), Code::Int(0)), constant),
                (Code::ite(is_base, Code::Int(0), Code::Int(1)), lam),
                (n, app),
            ])
        })
    });
    st::with_size(TARGET_TYPE_SIZE, ty).bind(move |t| term.call(vec![Code::Construct(NIL_TAG, vec![]), t]))
}

pub fn welltyped_compiled() -> Result<Compiled<Term>, crate::StageError> {
    st::compile(&welltyped_staged())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(t: Ty) -> Term {
        Term::lam(t, Term::Var(0))
    }

    #[test]
    fn typing() {
        assert_eq!(type_of(&Term::Const(3)).as_deref(), Some(&Ty::Base));
        assert_eq!(type_of(&id(Ty::Base)).as_deref(), Some(&Ty::arrow(Ty::Base, Ty::Base)));
        assert_eq!(type_of(&Term::Var(0)), None);
        assert_eq!(type_of(&Term::app(Term::Const(1), Term::Const(2))), None);
        assert_eq!(
            type_of(&Term::app(id(Ty::Base), Term::Const(2))).as_deref(),
            Some(&Ty::Base)
        );
    }

    #[test]
    fn reduction_under_binders() {
        let ops = StlcOps::REFERENCE;
        // \x:B->B. (\y:B->B. \z:B. y z) x  steps to  \x. \z. x z
        let bb = Ty::arrow(Ty::Base, Ty::Base);
        let inner = Term::lam(bb.clone(), Term::lam(Ty::Base, Term::app(Term::Var(1), Term::Var(0))));
        let t = Term::lam(bb.clone(), Term::app(inner, Term::Var(0)));
        let expect = Term::lam(bb, Term::lam(Ty::Base, Term::app(Term::Var(1), Term::Var(0))));
        assert_eq!(ops.step(&t), Some(expect));
    }

    /// Closed, well-typed inputs on which each bug shows.
    fn witnesses() -> Vec<Term> {
        let bb = Ty::arrow(Ty::Base, Ty::Base);
        let b_bb = Ty::arrow(Ty::Base, bb.clone());
        vec![
            // \x:B->B. (\y:B->B. \z:B. y z) x
            Term::lam(
                bb.clone(),
                Term::app(
                    Term::lam(bb.clone(), Term::lam(Ty::Base, Term::app(Term::Var(1), Term::Var(0)))),
                    Term::Var(0),
                ),
            ),
            // \w:B. \x:B->B. (\y:B. x y) w
            Term::lam(
                Ty::Base,
                Term::lam(
                    bb.clone(),
                    Term::app(Term::lam(Ty::Base, Term::app(Term::Var(1), Term::Var(0))), Term::Var(1)),
                ),
            ),
            // (\y:B. \z:B->B. z y) 4
            Term::app(
                Term::lam(Ty::Base, Term::lam(bb.clone(), Term::app(Term::Var(0), Term::Var(1)))),
                Term::Const(4),
            ),
            // \f:B->B->B. f 1 ((\x:B. x) 2)
            Term::lam(
                b_bb,
                Term::app(
                    Term::app(Term::Var(0), Term::Const(1)),
                    Term::app(id(Ty::Base), Term::Const(2)),
                ),
            ),
        ]
    }

    #[test]
    fn witnesses_pass_reference() {
        for t in witnesses() {
            assert!(type_of(&t).is_some(), "{t}");
            for p in StlcProperty::ALL {
                assert_eq!(p.check(&StlcOps::REFERENCE, &t), Verdict::Pass, "{p} on {t}");
            }
        }
    }

    #[test]
    fn every_mutant_is_observable() {
        for m in StlcMutant::ALL {
            let ops = StlcOps::with(m);
            let killed = m
                .properties()
                .iter()
                .any(|p| witnesses().iter().any(|t| p.check(&ops, t) == Verdict::Fail));
            assert!(killed, "{} survives", m.id());
        }
    }

    #[test]
    fn ill_typed_terms_are_discarded() {
        assert_eq!(
            StlcProperty::Progress.check(&StlcOps::REFERENCE, &Term::Var(2)),
            Verdict::Discard
        );
    }
}
