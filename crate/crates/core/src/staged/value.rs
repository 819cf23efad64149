//! Run-time values of compiled generators.
//!
//! Scalars are unboxed. Tuples and constructor applications live in a
//! per-run [`Heap`] arena and are referred to by index, so evaluation never
//! allocates per node.

use crate::error::GenError;

/// Tag reserved for tuples.
pub const TUPLE_TAG: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Node(u32),
}

impl Value {
    #[inline]
    pub fn as_int(self) -> Result<i64, GenError> {
        match self {
            Value::Int(n) => Ok(n),
            _ => Err(GenError::TypeMismatch("expected an integer")),
        }
    }

    #[inline]
    pub fn as_bool(self) -> Result<bool, GenError> {
        match self {
            Value::Bool(b) => Ok(b),
            _ => Err(GenError::TypeMismatch("expected a boolean")),
        }
    }

    #[inline]
    pub fn as_node(self) -> Result<u32, GenError> {
        match self {
            Value::Node(n) => Ok(n),
            _ => Err(GenError::TypeMismatch("expected a constructed value")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Header {
    tag: u32,
    start: u32,
    len: u32,
}

#[derive(Debug, Default)]
pub struct Heap {
    nodes: Vec<Header>,
    fields: Vec<Value>,
}

impl Heap {
    pub fn new() -> Heap {
        Heap::default()
    }

    pub fn clear(&mut self) {
        self.nodes.clear();
        self.fields.clear();
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    #[inline]
    pub fn alloc(&mut self, tag: u32, fields: &[Value]) -> Value {
        let id = self.nodes.len() as u32;
        self.nodes.push(Header {
            tag,
            start: self.fields.len() as u32,
            len: fields.len() as u32,
        });
        self.fields.extend_from_slice(fields);
        Value::Node(id)
    }

    /// Allocates a node whose `len` fields are filled in later with
    /// [`Heap::set_field`]. Returns the node and its first field index.
    #[inline]
    pub fn reserve(&mut self, tag: u32, len: usize) -> (Value, usize) {
        let id = self.nodes.len() as u32;
        let start = self.fields.len();
        self.nodes.push(Header {
            tag,
            start: start as u32,
            len: len as u32,
        });
        self.fields.resize(start + len, Value::Int(0));
        (Value::Node(id), start)
    }

    #[inline]
    pub fn set_field(&mut self, index: usize, v: Value) {
        self.fields[index] = v;
    }

    #[inline]
    pub fn tag(&self, v: Value) -> Result<u32, GenError> {
        Ok(self.header(v)?.tag)
    }

    #[inline]
    pub fn fields(&self, v: Value) -> Result<&[Value], GenError> {
        let h = self.header(v)?;
        Ok(&self.fields[h.start as usize..(h.start + h.len) as usize])
    }

    #[inline]
    pub fn field(&self, v: Value, i: usize) -> Result<Value, GenError> {
        self.fields(v)?
            .get(i)
            .copied()
            .ok_or(GenError::TypeMismatch("field index out of range"))
    }

    #[inline]
    fn header(&self, v: Value) -> Result<Header, GenError> {
        let id = v.as_node()?;
        self.nodes
            .get(id as usize)
            .copied()
            .ok_or(GenError::TypeMismatch("dangling node"))
    }

    /// Structural equality.
    pub fn equal(&self, a: Value, b: Value) -> Result<bool, GenError> {
        match (a, b) {
            (Value::Node(_), Value::Node(_)) => {
                if a == b {
                    return Ok(true);
                }
                let (ha, hb) = (self.header(a)?, self.header(b)?);
                if ha.tag != hb.tag || ha.len != hb.len {
                    return Ok(false);
                }
                for i in 0..ha.len as usize {
                    let fa = self.fields[ha.start as usize + i];
                    let fb = self.fields[hb.start as usize + i];
                    if !self.equal(fa, fb)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            (Value::Node(_), _) | (_, Value::Node(_)) => Ok(false),
            _ => Ok(a == b),
        }
    }
}

/// Conversion of a run-time value into a native Rust value.
pub trait Decode: Sized {
    fn decode(v: Value, heap: &Heap) -> Result<Self, GenError>;
}

impl Decode for Value {
    fn decode(v: Value, _: &Heap) -> Result<Self, GenError> {
        Ok(v)
    }
}

impl Decode for i64 {
    fn decode(v: Value, _: &Heap) -> Result<Self, GenError> {
        v.as_int()
    }
}

impl Decode for bool {
    fn decode(v: Value, _: &Heap) -> Result<Self, GenError> {
        v.as_bool()
    }
}

impl<A: Decode, B: Decode> Decode for (A, B) {
    fn decode(v: Value, heap: &Heap) -> Result<Self, GenError> {
        match heap.fields(v)? {
            [a, b] => Ok((A::decode(*a, heap)?, B::decode(*b, heap)?)),
            _ => Err(GenError::Decode("expected a pair".into())),
        }
    }
}

impl<A: Decode, B: Decode, C: Decode> Decode for (A, B, C) {
    fn decode(v: Value, heap: &Heap) -> Result<Self, GenError> {
        match heap.fields(v)? {
            [a, b, c] => Ok((A::decode(*a, heap)?, B::decode(*b, heap)?, C::decode(*c, heap)?)),
            _ => Err(GenError::Decode("expected a triple".into())),
        }
    }
}

impl<A: Decode, B: Decode, C: Decode, D: Decode> Decode for (A, B, C, D) {
    fn decode(v: Value, heap: &Heap) -> Result<Self, GenError> {
        match heap.fields(v)? {
            [a, b, c, d] => Ok((
                A::decode(*a, heap)?,
                B::decode(*b, heap)?,
                C::decode(*c, heap)?,
                D::decode(*d, heap)?,
            )),
            _ => Err(GenError::Decode("expected a 4-tuple".into())),
        }
    }
}

/// Cons-list convention used by workloads: tag 0 is nil, tag 1 is
/// `cons(head, tail)`. Decoded iteratively.
pub const NIL_TAG: u32 = 0;
pub const CONS_TAG: u32 = 1;

impl<A: Decode> Decode for Vec<A> {
    fn decode(mut v: Value, heap: &Heap) -> Result<Self, GenError> {
        let mut out = Vec::new();
        loop {
            match heap.tag(v)? {
                NIL_TAG => return Ok(out),
                CONS_TAG => {
                    let f = heap.fields(v)?;
                    if f.len() != 2 {
                        return Err(GenError::Decode("malformed cons cell".into()));
                    }
                    out.push(A::decode(f[0], heap)?);
                    v = f[1];
                }
                t => return Err(GenError::Decode(format!("unexpected list tag {t}"))),
            }
        }
    }
}
