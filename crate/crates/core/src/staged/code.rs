//! Stage-one representation of run-time values.

use std::fmt;

use super::value::{Heap, Value};
use crate::error::GenError;

pub type VarId = u32;

/// A pure host function callable from emitted code.
#[derive(Clone, Copy)]
pub struct HostFn {
    pub name: &'static str,
    pub eval: fn(&[Value], &Heap) -> Result<Value, GenError>,
}

impl PartialEq for HostFn {
    fn eq(&self, other: &HostFn) -> bool {
        self.name == other.name && std::ptr::fn_addr_eq(self.eval, other.eval)
    }
}

impl fmt::Debug for HostFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HostFn({})", self.name)
    }
}

/// Pure primitive operations. None of them draws randomness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrimOp {
    Add,
    Sub,
    Mul,
    /// Truncating division; division by zero is a run-time type error.
    Div,
    Eq,
    Lt,
    Le,
    Not,
    And,
    Or,
    /// `if(c, a, b)`; both arms are pure so both may be evaluated.
    If,
    Min,
    Max,
    /// Projection of the i-th field of a tuple or constructor.
    Field(u32),
    /// Constructor tag of a heap value, as an integer.
    Tag,
    Host(HostFn),
}

impl PrimOp {
    fn symbol(&self) -> Option<&'static str> {
        Some(match self {
            PrimOp::Add => "+",
            PrimOp::Sub => "-",
            PrimOp::Mul => "*",
            PrimOp::Div => "/",
            PrimOp::Eq => "==",
            PrimOp::Lt => "<",
            PrimOp::Le => "<=",
            PrimOp::And => "&&",
            PrimOp::Or => "||",
            _ => return None,
        })
    }
}

/// Code for a run-time value: constants, variables, and pure operations on
/// them. Effects never appear here; they are let-bound in the program.
#[derive(Debug, Clone, PartialEq)]
pub enum Code {
    Int(i64),
    Bool(bool),
    Var(VarId),
    Tuple(Vec<Code>),
    Construct(u32, Vec<Code>),
    Prim(PrimOp, Vec<Code>),
}

impl Code {
    pub fn as_const_int(&self) -> Option<i64> {
        match self {
            Code::Int(n) => Some(*n),
            _ => None,
        }
    }

    /// Primitive application, folded when every argument is a scalar
    /// constant and the result is defined.
    pub fn prim(op: PrimOp, args: Vec<Code>) -> Code {
        fold(op, &args).unwrap_or(Code::Prim(op, args))
    }

    pub fn add(a: Code, b: Code) -> Code {
        Code::prim(PrimOp::Add, vec![a, b])
    }

    pub fn sub(a: Code, b: Code) -> Code {
        Code::prim(PrimOp::Sub, vec![a, b])
    }

    pub fn div(a: Code, b: Code) -> Code {
        Code::prim(PrimOp::Div, vec![a, b])
    }

    pub fn half(a: Code) -> Code {
        Code::div(a, Code::Int(2))
    }

    pub fn eq(a: Code, b: Code) -> Code {
        Code::prim(PrimOp::Eq, vec![a, b])
    }

    pub fn lt(a: Code, b: Code) -> Code {
        Code::prim(PrimOp::Lt, vec![a, b])
    }

    pub fn not(a: Code) -> Code {
        Code::prim(PrimOp::Not, vec![a])
    }

    pub fn ite(c: Code, a: Code, b: Code) -> Code {
        Code::prim(PrimOp::If, vec![c, a, b])
    }

    pub fn field(v: Code, i: u32) -> Code {
        match v {
            Code::Tuple(mut xs) | Code::Construct(_, mut xs) if (i as usize) < xs.len() => xs.swap_remove(i as usize),
            v => Code::Prim(PrimOp::Field(i), vec![v]),
        }
    }

    pub fn tag(v: Code) -> Code {
        match v {
            Code::Construct(t, _) => Code::Int(t as i64),
            v => Code::Prim(PrimOp::Tag, vec![v]),
        }
    }

    pub fn host(f: HostFn, args: Vec<Code>) -> Code {
        Code::Prim(PrimOp::Host(f), args)
    }

    /// Variables read by this code, in order of appearance.
    pub fn for_each_var(&self, f: &mut impl FnMut(VarId)) {
        match self {
            Code::Int(_) | Code::Bool(_) => {}
            Code::Var(v) => f(*v),
            Code::Tuple(xs) | Code::Construct(_, xs) | Code::Prim(_, xs) => {
                for x in xs {
                    x.for_each_var(f);
                }
            }
        }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(VarId) -> Code) -> Code {
        match self {
            Code::Int(_) | Code::Bool(_) => self.clone(),
            Code::Var(v) => f(*v),
            Code::Tuple(xs) => Code::Tuple(xs.iter().map(|x| x.map_vars(f)).collect()),
            Code::Construct(t, xs) => Code::Construct(*t, xs.iter().map(|x| x.map_vars(f)).collect()),
            Code::Prim(op, xs) => Code::Prim(*op, xs.iter().map(|x| x.map_vars(f)).collect()),
        }
    }
}

fn fold(op: PrimOp, args: &[Code]) -> Option<Code> {
    use Code::{Bool, Int};
    Some(match (op, args) {
        (PrimOp::Add, [Int(a), Int(b)]) => Int(a.checked_add(*b)?),
        (PrimOp::Sub, [Int(a), Int(b)]) => Int(a.checked_sub(*b)?),
        (PrimOp::Mul, [Int(a), Int(b)]) => Int(a.checked_mul(*b)?),
        (PrimOp::Div, [Int(a), Int(b)]) => Int(a.checked_div(*b)?),
        (PrimOp::Eq, [Int(a), Int(b)]) => Bool(a == b),
        (PrimOp::Eq, [Bool(a), Bool(b)]) => Bool(a == b),
        (PrimOp::Lt, [Int(a), Int(b)]) => Bool(a < b),
        (PrimOp::Le, [Int(a), Int(b)]) => Bool(a <= b),
        (PrimOp::Not, [Bool(a)]) => Bool(!a),
        (PrimOp::And, [Bool(a), Bool(b)]) => Bool(*a && *b),
        (PrimOp::Or, [Bool(a), Bool(b)]) => Bool(*a || *b),
        (PrimOp::If, [Bool(c), a, b]) => {
            if *c {
                a.clone()
            } else {
                b.clone()
            }
        }
        (PrimOp::Min, [Int(a), Int(b)]) => Int(*a.min(b)),
        (PrimOp::Max, [Int(a), Int(b)]) => Int(*a.max(b)),
        _ => return None,
    })
}

impl From<i64> for Code {
    fn from(n: i64) -> Code {
        Code::Int(n)
    }
}

impl From<bool> for Code {
    fn from(b: bool) -> Code {
        Code::Bool(b)
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, xs: &[Code]) -> fmt::Result {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        }
        match self {
            Code::Int(n) => write!(f, "{n}"),
            Code::Bool(b) => write!(f, "{b}"),
            Code::Var(v) => write!(f, "v{v}"),
            Code::Tuple(xs) => {
                f.write_str("(")?;
                list(f, xs)?;
                f.write_str(")")
            }
            Code::Construct(t, xs) => {
                write!(f, "#{t}(")?;
                list(f, xs)?;
                f.write_str(")")
            }
            Code::Prim(op, xs) => match (op.symbol(), xs.as_slice()) {
                (Some(sym), [a, b]) => write!(f, "({a} {sym} {b})"),
                _ => {
                    match op {
                        PrimOp::Not => f.write_str("not(")?,
                        PrimOp::If => f.write_str("if(")?,
                        PrimOp::Min => f.write_str("min(")?,
                        PrimOp::Max => f.write_str("max(")?,
                        PrimOp::Field(i) => write!(f, "field{i}(")?,
                        PrimOp::Tag => f.write_str("tag(")?,
                        PrimOp::Host(h) => write!(f, "{}(", h.name)?,
                        other => write!(f, "{other:?}(")?,
                    }
                    list(f, xs)?;
                    f.write_str(")")
                }
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_constant_arithmetic() {
        assert_eq!(Code::add(Code::Int(2), Code::Int(3)), Code::Int(5));
        assert_eq!(Code::half(Code::Int(7)), Code::Int(3));
        assert_eq!(Code::lt(Code::Int(1), Code::Int(2)), Code::Bool(true));
        assert_eq!(Code::ite(Code::Bool(false), Code::Var(1), Code::Var(2)), Code::Var(2));
    }

    #[test]
    fn keeps_dynamic_and_undefined_ops() {
        let x = Code::Var(4);
        assert!(matches!(Code::add(x.clone(), Code::Int(1)), Code::Prim(PrimOp::Add, _)));
        assert!(matches!(
            Code::div(Code::Int(1), Code::Int(0)),
            Code::Prim(PrimOp::Div, _)
        ));
        assert_eq!(format!("{}", Code::half(x)), "(v4 / 2)");
    }

    #[test]
    fn projections_of_known_aggregates() {
        let t = Code::Tuple(vec![Code::Var(1), Code::Int(5)]);
        assert_eq!(Code::field(t, 1), Code::Int(5));
        assert_eq!(Code::tag(Code::Construct(3, vec![])), Code::Int(3));
    }
}
