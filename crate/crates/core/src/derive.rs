//! Generators derived from a datatype schema.
//!
//! One derivation algorithm, instantiated twice: once over the baseline
//! combinators and once over the staged ones. Base types become primitive
//! generators, products bind their fields left to right, sums become a
//! weighted union, and a recursive type becomes a fixed point whose
//! recursive occurrences run at half the current size.
//!
//! # JSON format
//!
//! ```json
//! {"kind": "rec", "body":
//!   {"kind": "sum", "variants": [
//!     {"tag": 0, "weight": 1, "schema": {"kind": "product", "fields": []}},
//!     {"tag": 1, "weight": "size", "schema": {"kind": "product", "fields": [
//!       {"kind": "rec_ref"},
//!       {"kind": "int", "lo": 0, "hi": 100},
//!       {"kind": "int", "lo": 0, "hi": 100},
//!       {"kind": "rec_ref"}]}}]}}
//! ```
//!
//! `kind` is one of `int`, `bool`, `product`, `sum`, `rec_ref`, `rec`. A
//! variant weight is a nonnegative integer or the string `"size"`, which
//! reads the ambient size.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baseline;
use crate::error::GenError;
use crate::staged::{self, Code, Decode, Heap, Value, TUPLE_TAG};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schema {
    Int { lo: i64, hi: i64 },
    Bool,
    Product { fields: Vec<Schema> },
    Sum { variants: Vec<Alt> },
    RecRef,
    Rec { body: Box<Schema> },
}

/// One constructor of a sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alt {
    pub tag: u32,
    pub weight: Weight,
    pub schema: Schema,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weight {
    Const(i64),
    CurrentSize(SizeKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SizeKeyword {
    #[serde(rename = "size")]
    Size,
}

impl Weight {
    pub const SIZE: Weight = Weight::CurrentSize(SizeKeyword::Size);
}

impl Schema {
    pub fn product(fields: Vec<Schema>) -> Schema {
        Schema::Product { fields }
    }

    pub fn sum(variants: Vec<(u32, Weight, Schema)>) -> Schema {
        Schema::Sum {
            variants: variants
                .into_iter()
                .map(|(tag, weight, schema)| Alt { tag, weight, schema })
                .collect(),
        }
    }

    pub fn rec(body: Schema) -> Schema {
        Schema::Rec { body: Box::new(body) }
    }

    pub fn from_json(s: &str) -> Result<Schema, DeriveError> {
        let schema: Schema = serde_json::from_str(s).map_err(|e| DeriveError::Parse(e.to_string()))?;
        schema.validate()?;
        Ok(schema)
    }

    /// Binary search trees with keys and values in `[0, 100]`.
    pub fn bst() -> Schema {
        let key = Schema::Int { lo: 0, hi: 100 };
        Schema::rec(Schema::sum(vec![
            (0, Weight::Const(1), Schema::product(vec![])),
            (
                1,
                Weight::SIZE,
                Schema::product(vec![Schema::RecRef, key.clone(), key, Schema::RecRef]),
            ),
        ]))
    }

    /// Simple types: `Base` (tag 0) and `Arrow` (tag 1).
    pub fn stlc_type() -> Schema {
        Schema::rec(Schema::sum(vec![
            (0, Weight::Const(1), Schema::product(vec![])),
            (1, Weight::SIZE, Schema::product(vec![Schema::RecRef, Schema::RecRef])),
        ]))
    }

    /// Lambda terms with de Bruijn variables: `Var` (0), `Const` (1),
    /// `Lam` (2) and `App` (3).
    pub fn stlc_term() -> Schema {
        Schema::rec(Schema::sum(vec![
            (0, Weight::Const(1), Schema::Int { lo: 0, hi: 3 }),
            (1, Weight::Const(1), Schema::Int { lo: 0, hi: 100 }),
            (
                2,
                Weight::SIZE,
                Schema::product(vec![Schema::stlc_type(), Schema::RecRef]),
            ),
            (3, Weight::SIZE, Schema::product(vec![Schema::RecRef, Schema::RecRef])),
        ]))
    }

    /// Checks the structural rules: every `rec_ref` sits inside a `rec`,
    /// behind a sum that can stop (a variant without recursion and with a
    /// positive constant weight); sums are nonempty, constant weights are
    /// nonnegative and integer ranges are nonempty.
    pub fn validate(&self) -> Result<(), DeriveError> {
        self.check(0, false)
    }

    fn check(&self, depth: usize, guarded: bool) -> Result<(), DeriveError> {
        match self {
            Schema::Int { lo, hi } => {
                if lo > hi {
                    return Err(DeriveError::EmptyRange(*lo, *hi));
                }
            }
            Schema::Bool => {}
            Schema::Product { fields } => {
                for f in fields {
                    f.check(depth, guarded)?;
                }
            }
            Schema::Sum { variants } => {
                if variants.is_empty() {
                    return Err(DeriveError::EmptySum);
                }
                let mut stops = false;
                for v in variants {
                    if let Weight::Const(w) = v.weight {
                        if w < 0 {
                            return Err(DeriveError::NegativeWeight(w));
                        }
                        stops |= w > 0 && !v.schema.recurses();
                    }
                }
                for v in variants {
                    v.schema.check(depth, guarded || stops)?;
                }
            }
            Schema::RecRef => {
                if depth == 0 {
                    return Err(DeriveError::RecRefOutsideRec);
                }
                if !guarded {
                    return Err(DeriveError::Unguarded);
                }
            }
            Schema::Rec { body } => body.check(depth + 1, false)?,
        }
        Ok(())
    }

    /// Whether a `rec_ref` bound outside this schema occurs in it.
    fn recurses(&self) -> bool {
        fn go(s: &Schema, inner: usize) -> bool {
            match s {
                Schema::Int { .. } | Schema::Bool => false,
                Schema::Product { fields } => fields.iter().any(|f| go(f, inner)),
                Schema::Sum { variants } => variants.iter().any(|v| go(&v.schema, inner)),
                Schema::RecRef => inner == 0,
                Schema::Rec { body } => go(body, inner + 1),
            }
        }
        go(self, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error("rec_ref outside any rec")]
    RecRefOutsideRec,
    #[error("sum without variants")]
    EmptySum,
    #[error("negative variant weight {0}")]
    NegativeWeight(i64),
    #[error("empty integer range [{0}, {1}]")]
    EmptyRange(i64, i64),
    #[error("recursion not guarded by a sum with a terminating variant")]
    Unguarded,
    #[error("cannot parse schema: {0}")]
    Parse(String),
}

/// Workload-agnostic generated value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tree {
    Int(i64),
    Bool(bool),
    Tuple(Arc<[Tree]>),
    Variant(u32, Arc<Tree>),
}

impl Tree {
    pub fn tuple(items: Vec<Tree>) -> Tree {
        Tree::Tuple(items.into())
    }

    /// Number of `Variant` nodes.
    pub fn constructors(&self) -> usize {
        match self {
            Tree::Int(_) | Tree::Bool(_) => 0,
            Tree::Tuple(xs) => xs.iter().map(Tree::constructors).sum(),
            Tree::Variant(_, x) => 1 + x.constructors(),
        }
    }
}

impl Decode for Tree {
    fn decode(v: Value, heap: &Heap) -> Result<Self, GenError> {
        Ok(match v {
            Value::Int(n) => Tree::Int(n),
            Value::Bool(b) => Tree::Bool(b),
            Value::Node(_) => {
                let fields = heap.fields(v)?;
                match heap.tag(v)? {
                    TUPLE_TAG => Tree::Tuple(
                        fields
                            .iter()
                            .map(|f| Tree::decode(*f, heap))
                            .collect::<Result<Vec<_>, _>>()?
                            .into(),
                    ),
                    tag => match fields {
                        [payload] => Tree::Variant(tag, Arc::new(Tree::decode(*payload, heap)?)),
                        _ => return Err(GenError::Decode("variant without payload".into())),
                    },
                }
            }
        })
    }
}

/// Tag and payload of a staged sum value.
pub fn variant_parts(v: Value, heap: &Heap) -> Result<(u32, Value), GenError> {
    match heap.fields(v)? {
        [payload] => Ok((heap.tag(v)?, *payload)),
        _ => Err(GenError::Decode("variant without payload".into())),
    }
}

/// Fields of a staged product value.
pub fn tuple_fields(v: Value, heap: &Heap) -> Result<&[Value], GenError> {
    if heap.tag(v)? != TUPLE_TAG {
        return Err(GenError::Decode("expected a tuple".into()));
    }
    heap.fields(v)
}

/// Derivation over the baseline combinators.
pub fn derive_baseline(s: &Schema) -> Result<baseline::Gen<Tree>, DeriveError> {
    s.validate()?;
    Ok(baseline_gen(s, &[]))
}

fn baseline_gen(s: &Schema, recs: &[baseline::Gen<Tree>]) -> baseline::Gen<Tree> {
    use crate::baseline as b;
    match s {
        Schema::Int { lo, hi } => b::int(*lo, *hi).map(Tree::Int),
        Schema::Bool => b::bool().map(Tree::Bool),
        Schema::Product { fields } => {
            let gens: Arc<[b::Gen<Tree>]> = fields.iter().map(|f| baseline_gen(f, recs)).collect();
            baseline_product(gens, Vec::new())
        }
        Schema::Sum { variants } => {
            let arms: Vec<(u32, Weight, b::Gen<Tree>)> = variants
                .iter()
                .map(|v| {
                    let tag = v.tag;
                    let g = baseline_gen(&v.schema, recs).map(move |t| Tree::Variant(tag, Arc::new(t)));
                    (v.tag, v.weight, g)
                })
                .collect();
            if arms.iter().all(|(_, w, _)| matches!(w, Weight::Const(_))) {
                b::weighted_union(arms.into_iter().map(|(_, w, g)| (const_weight(w), g)).collect())
            } else {
                b::size().bind(move |n| {
                    b::weighted_union(
                        arms.iter()
                            .map(|(_, w, g)| match w {
                                Weight::Const(c) => (*c, g.clone()),
                                Weight::CurrentSize(_) => (n, g.clone()),
                            })
                            .collect(),
                    )
                })
            }
        }
        Schema::RecRef => {
            let r = recs.last().expect("validated").clone();
            b::size().bind(move |n| b::with_size(n / 2, r.clone()))
        }
        Schema::Rec { body } => b::fixed_point(|h| {
            let mut inner = recs.to_vec();
            inner.push(h);
            baseline_gen(body, &inner)
        }),
    }
}

fn const_weight(w: Weight) -> i64 {
    match w {
        Weight::Const(c) => c,
        Weight::CurrentSize(_) => unreachable!("checked by caller"),
    }
}

fn baseline_product(gens: Arc<[baseline::Gen<Tree>]>, acc: Vec<Tree>) -> baseline::Gen<Tree> {
    match gens.get(acc.len()) {
        None => baseline::pure(Tree::tuple(acc)),
        Some(g) => {
            let gens = Arc::clone(&gens);
            g.clone().bind(move |x| {
                let mut acc = acc.clone();
                acc.push(x);
                baseline_product(Arc::clone(&gens), acc)
            })
        }
    }
}

/// Derivation over the staged combinators.
pub fn derive_staged(s: &Schema) -> Result<staged::Gen<Code>, DeriveError> {
    s.validate()?;
    Ok(staged_gen(s, &[]))
}

fn staged_gen(s: &Schema, recs: &[staged::Handle]) -> staged::Gen<Code> {
    use crate::staged as st;
    match s {
        Schema::Int { lo, hi } => st::int(*lo, *hi),
        Schema::Bool => st::bool(),
        Schema::Product { fields } => {
            let gens: std::rc::Rc<[st::Gen<Code>]> = fields.iter().map(|f| staged_gen(f, recs)).collect();
            staged_product(gens, Vec::new())
        }
        Schema::Sum { variants } => {
            let arms: Vec<(Weight, st::Gen<Code>)> = variants
                .iter()
                .map(|v| {
                    let tag = v.tag;
                    let g = staged_gen(&v.schema, recs).map(move |c| Code::Construct(tag, vec![c]));
                    (v.weight, g)
                })
                .collect();
            if arms.iter().all(|(w, _)| matches!(w, Weight::Const(_))) {
                st::weighted_union(arms.into_iter().map(|(w, g)| (Code::Int(const_weight(w)), g)).collect())
            } else {
                st::size().bind(move |n| {
                    st::weighted_union(
                        arms.iter()
                            .map(|(w, g)| match w {
                                Weight::Const(c) => (Code::Int(*c), g.clone()),
                                Weight::CurrentSize(_) => (n.clone(), g.clone()),
                            })
                            .collect(),
                    )
                })
            }
        }
        Schema::RecRef => {
            let h = recs.last().expect("validated").clone();
            st::size().bind(move |n| st::with_size(Code::half(n), st::recurse(&h)))
        }
        Schema::Rec { body } => st::fixed_point(|h| {
            let mut inner = recs.to_vec();
            inner.push(h.clone());
            staged_gen(body, &inner)
        }),
    }
}

fn staged_product(gens: std::rc::Rc<[staged::Gen<Code>]>, acc: Vec<Code>) -> staged::Gen<Code> {
    match gens.get(acc.len()) {
        None => staged::pure(Code::Tuple(acc)),
        Some(g) => {
            let gens = std::rc::Rc::clone(&gens);
            g.clone().bind(move |x| {
                let mut acc = acc.clone();
                acc.push(x);
                staged_product(std::rc::Rc::clone(&gens), acc)
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        for s in [Schema::bst(), Schema::stlc_term()] {
            let text = serde_json::to_string(&s).unwrap();
            assert_eq!(Schema::from_json(&text).unwrap(), s);
        }
        let s = Schema::from_json(r#"{"kind":"sum","variants":[{"tag":3,"weight":"size","schema":{"kind":"bool"}}]}"#)
            .unwrap();
        assert_eq!(s, Schema::sum(vec![(3, Weight::SIZE, Schema::Bool)]));
    }

    #[test]
    fn malformed_schemas_are_rejected() {
        assert_eq!(Schema::RecRef.validate(), Err(DeriveError::RecRefOutsideRec));
        assert_eq!(Schema::sum(vec![]).validate(), Err(DeriveError::EmptySum));
        let unguarded = Schema::rec(Schema::product(vec![Schema::RecRef]));
        assert_eq!(unguarded.validate(), Err(DeriveError::Unguarded));
        let only_recursive = Schema::rec(Schema::sum(vec![(0, Weight::SIZE, Schema::RecRef)]));
        assert_eq!(only_recursive.validate(), Err(DeriveError::Unguarded));
        assert!(Schema::from_json(r#"{"kind":"widget"}"#).is_err());
        assert!(derive_staged(&Schema::Int { lo: 2, hi: 1 }).is_err());
    }

    #[test]
    fn inner_rec_does_not_guard_outer() {
        let s = Schema::rec(Schema::sum(vec![
            (0, Weight::Const(1), Schema::stlc_type()),
            (1, Weight::SIZE, Schema::RecRef),
        ]));
        assert_eq!(s.validate(), Ok(()));
        let bad = Schema::rec(Schema::sum(vec![(
            0,
            Weight::Const(1),
            Schema::product(vec![Schema::stlc_type(), Schema::RecRef]),
        )]));
        assert_eq!(bad.validate(), Err(DeriveError::Unguarded));
    }
}
