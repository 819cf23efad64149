//! Binary search trees: reference operations, injected bugs, properties
//! and three generation strategies.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::baseline as b;
use crate::derive::{self, Schema, Tree};
use crate::error::GenError;
use crate::staged::{self as st, Code, Compiled, Decode, Heap, Value};
use crate::workloads::seq::Seq;
use crate::workloads::{list_baseline, list_staged, Verdict};

pub const KEY_MAX: i64 = 100;

const LEAF: u32 = 0;
const NODE: u32 = 1;

/// A binary tree of key/value pairs. Not necessarily ordered.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Bst {
    #[default]
    Leaf,
    Node(Arc<Bst>, i64, i64, Arc<Bst>),
}

impl Bst {
    pub fn node(l: Bst, k: i64, v: i64, r: Bst) -> Bst {
        Bst::Node(Arc::new(l), k, v, Arc::new(r))
    }

    pub fn size(&self) -> usize {
        match self {
            Bst::Leaf => 0,
            Bst::Node(l, _, _, r) => 1 + l.size() + r.size(),
        }
    }

    /// In-order key/value pairs.
    pub fn to_vec(&self) -> Vec<(i64, i64)> {
        fn go(t: &Bst, out: &mut Vec<(i64, i64)>) {
            if let Bst::Node(l, k, v, r) = t {
                go(l, out);
                out.push((*k, *v));
                go(r, out);
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    fn from_tree(t: &Tree) -> Option<Bst> {
        match t {
            Tree::Variant(LEAF, _) => Some(Bst::Leaf),
            Tree::Variant(NODE, payload) => match &**payload {
                Tree::Tuple(f) => match &f[..] {
                    [l, Tree::Int(k), Tree::Int(v), r] => Some(Bst::Node(
                        Arc::new(Bst::from_tree(l)?),
                        *k,
                        *v,
                        Arc::new(Bst::from_tree(r)?),
                    )),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }
}

impl Decode for Bst {
    fn decode(v: Value, heap: &Heap) -> Result<Self, GenError> {
        match (heap.tag(v)?, heap.fields(v)?) {
            (LEAF, []) => Ok(Bst::Leaf),
            (NODE, [l, k, val, r]) => Ok(Bst::Node(
                Arc::new(Bst::decode(*l, heap)?),
                k.as_int()?,
                val.as_int()?,
                Arc::new(Bst::decode(*r, heap)?),
            )),
            _ => Err(GenError::Decode("malformed tree node".into())),
        }
    }
}

/// Strict ordering: every key in a left subtree is smaller than its root
/// and every key in a right subtree is larger.
pub fn is_bst(t: &Bst) -> bool {
    fn go(t: &Bst, lo: Option<i64>, hi: Option<i64>) -> bool {
        match t {
            Bst::Leaf => true,
            Bst::Node(l, k, _, r) => {
                lo.is_none_or(|lo| lo < *k) && hi.is_none_or(|hi| *k < hi) && go(l, lo, Some(*k)) && go(r, Some(*k), hi)
            }
        }
    }
    go(t, None, None)
}

pub fn find(k: i64, t: &Bst) -> Option<i64> {
    let mut cur = t;
    loop {
        match cur {
            Bst::Leaf => return None,
            Bst::Node(l, key, v, r) => match k.cmp(key) {
                Ordering::Less => cur = l,
                Ordering::Greater => cur = r,
                Ordering::Equal => return Some(*v),
            },
        }
    }
}

/// An injected bug in one BST operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BstMutant {
    /// Equal keys descend left instead of replacing.
    InsertLe,
    /// Smaller keys descend right.
    InsertSwapDir,
    /// Returns a singleton, dropping the tree.
    InsertDropTree,
    /// Keeps the old value when the key is present.
    InsertKeepOld,
    /// Deleting a node with two children keeps only its left subtree.
    DeleteDropRight,
    /// Searches the wrong subtree for the key.
    DeleteWrongDir,
    /// Moves the successor up without removing it below.
    DeleteKeepSuccessor,
    /// Returns the left tree.
    UnionIgnoreRight,
    /// Hangs the right tree under the rightmost node of the left.
    UnionConcat,
    /// Prefers the right tree's value on duplicate keys.
    UnionRightBias,
}

impl BstMutant {
    pub const ALL: [BstMutant; 10] = [
        BstMutant::InsertLe,
        BstMutant::InsertSwapDir,
        BstMutant::InsertDropTree,
        BstMutant::InsertKeepOld,
        BstMutant::DeleteDropRight,
        BstMutant::DeleteWrongDir,
        BstMutant::DeleteKeepSuccessor,
        BstMutant::UnionIgnoreRight,
        BstMutant::UnionConcat,
        BstMutant::UnionRightBias,
    ];

    pub fn id(self) -> &'static str {
        match self {
            BstMutant::InsertLe => "insert_le",
            BstMutant::InsertSwapDir => "insert_swap_dir",
            BstMutant::InsertDropTree => "insert_drop_tree",
            BstMutant::InsertKeepOld => "insert_keep_old",
            BstMutant::DeleteDropRight => "delete_drop_right",
            BstMutant::DeleteWrongDir => "delete_wrong_dir",
            BstMutant::DeleteKeepSuccessor => "delete_keep_successor",
            BstMutant::UnionIgnoreRight => "union_ignore_right",
            BstMutant::UnionConcat => "union_concat",
            BstMutant::UnionRightBias => "union_right_bias",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            BstMutant::InsertLe => "insert compares with <= and duplicates equal keys",
            BstMutant::InsertSwapDir => "insert sends smaller keys right",
            BstMutant::InsertDropTree => "insert forgets the existing tree",
            BstMutant::InsertKeepOld => "insert keeps the old value of an existing key",
            BstMutant::DeleteDropRight => "delete of an inner node discards its right subtree",
            BstMutant::DeleteWrongDir => "delete searches the wrong subtree",
            BstMutant::DeleteKeepSuccessor => "delete copies the successor without removing it",
            BstMutant::UnionIgnoreRight => "union returns its left argument",
            BstMutant::UnionConcat => "union appends the right tree without merging",
            BstMutant::UnionRightBias => "union prefers right values on duplicate keys",
        }
    }

    pub fn op(self) -> &'static str {
        match self {
            BstMutant::InsertLe | BstMutant::InsertSwapDir | BstMutant::InsertDropTree | BstMutant::InsertKeepOld => {
                "insert"
            }
            BstMutant::DeleteDropRight | BstMutant::DeleteWrongDir | BstMutant::DeleteKeepSuccessor => "delete",
            _ => "union",
        }
    }

    /// Properties this bug violates.
    pub fn properties(self) -> &'static [BstProperty] {
        use BstProperty::*;
        match self {
            BstMutant::InsertLe | BstMutant::InsertSwapDir => &[InsertValid, InsertPost],
            BstMutant::InsertDropTree | BstMutant::InsertKeepOld => &[InsertPost],
            BstMutant::DeleteDropRight | BstMutant::DeleteWrongDir => &[DeletePost],
            BstMutant::DeleteKeepSuccessor => &[DeleteValid],
            BstMutant::UnionIgnoreRight | BstMutant::UnionRightBias => &[UnionPost],
            BstMutant::UnionConcat => &[UnionValid, UnionPost],
        }
    }

    pub fn from_id(id: &str) -> Option<BstMutant> {
        BstMutant::ALL.into_iter().find(|m| m.id() == id)
    }
}

/// BST operations, optionally with one injected bug.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BstOps {
    pub mutant: Option<BstMutant>,
}

impl BstOps {
    pub const REFERENCE: BstOps = BstOps { mutant: None };

    pub fn with(m: BstMutant) -> BstOps {
        BstOps { mutant: Some(m) }
    }

    fn is(&self, m: BstMutant) -> bool {
        self.mutant == Some(m)
    }

    pub fn insert(&self, k: i64, v: i64, t: &Bst) -> Bst {
        if self.is(BstMutant::InsertDropTree) {
            return Bst::node(Bst::Leaf, k, v, Bst::Leaf);
        }
        self.insert_rec(k, v, t)
    }

    fn insert_rec(&self, k: i64, v: i64, t: &Bst) -> Bst {
        match t {
            Bst::Leaf => Bst::node(Bst::Leaf, k, v, Bst::Leaf),
            Bst::Node(l, key, val, r) => {
                let mut ord = k.cmp(key);
                if self.is(BstMutant::InsertLe) && ord == Ordering::Equal {
                    ord = Ordering::Less;
                }
                if self.is(BstMutant::InsertSwapDir) {
                    ord = ord.reverse();
                }
                match ord {
                    Ordering::Less => Bst::Node(Arc::new(self.insert_rec(k, v, l)), *key, *val, r.clone()),
                    Ordering::Greater => Bst::Node(l.clone(), *key, *val, Arc::new(self.insert_rec(k, v, r))),
                    Ordering::Equal => {
                        let v = if self.is(BstMutant::InsertKeepOld) { *val } else { v };
                        Bst::Node(l.clone(), k, v, r.clone())
                    }
                }
            }
        }
    }

    pub fn delete(&self, k: i64, t: &Bst) -> Bst {
        match t {
            Bst::Leaf => Bst::Leaf,
            Bst::Node(l, key, val, r) => {
                let mut ord = k.cmp(key);
                if self.is(BstMutant::DeleteWrongDir) {
                    ord = ord.reverse();
                }
                match ord {
                    Ordering::Less => Bst::Node(Arc::new(self.delete(k, l)), *key, *val, r.clone()),
                    Ordering::Greater => Bst::Node(l.clone(), *key, *val, Arc::new(self.delete(k, r))),
                    Ordering::Equal => match (&**l, &**r) {
                        (Bst::Leaf, _) => (**r).clone(),
                        (_, Bst::Leaf) => (**l).clone(),
                        _ if self.is(BstMutant::DeleteDropRight) => (**l).clone(),
                        _ => {
                            let (sk, sv) = min_binding(r);
                            let rest = if self.is(BstMutant::DeleteKeepSuccessor) {
                                r.clone()
                            } else {
                                Arc::new(self.delete(sk, r))
                            };
                            Bst::Node(l.clone(), sk, sv, rest)
                        }
                    },
                }
            }
        }
    }

    /// Left-biased union by splitting the right tree at each key.
    pub fn union(&self, t: &Bst, u: &Bst) -> Bst {
        match self.mutant {
            Some(BstMutant::UnionIgnoreRight) => return t.clone(),
            Some(BstMutant::UnionConcat) => return concat(t, u),
            _ => {}
        }
        match (t, u) {
            (Bst::Leaf, _) => u.clone(),
            (_, Bst::Leaf) => t.clone(),
            (Bst::Node(l, k, v, r), _) => {
                let (ul, found, ur) = split(*k, u);
                let v = match found {
                    Some(uv) if self.is(BstMutant::UnionRightBias) => uv,
                    _ => *v,
                };
                Bst::Node(Arc::new(self.union(l, &ul)), *k, v, Arc::new(self.union(r, &ur)))
            }
        }
    }
}

fn min_binding(t: &Bst) -> (i64, i64) {
    let mut cur = t;
    let mut best = None;
    while let Bst::Node(l, k, v, _) = cur {
        best = Some((*k, *v));
        cur = l;
    }
    best.expect("nonempty tree")
}

/// Keys below `k`, the value at `k`, keys above `k`.
fn split(k: i64, t: &Bst) -> (Bst, Option<i64>, Bst) {
    match t {
        Bst::Leaf => (Bst::Leaf, None, Bst::Leaf),
        Bst::Node(l, key, v, r) => match k.cmp(key) {
            Ordering::Equal => ((**l).clone(), Some(*v), (**r).clone()),
            Ordering::Less => {
                let (ll, found, lr) = split(k, l);
                (ll, found, Bst::Node(Arc::new(lr), *key, *v, r.clone()))
            }
            Ordering::Greater => {
                let (rl, found, rr) = split(k, r);
                (Bst::Node(l.clone(), *key, *v, Arc::new(rl)), found, rr)
            }
        },
    }
}

fn concat(t: &Bst, u: &Bst) -> Bst {
    match t {
        Bst::Leaf => u.clone(),
        Bst::Node(l, k, v, r) => Bst::Node(l.clone(), *k, *v, Arc::new(concat(r, u))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BstProperty {
    InsertValid,
    DeleteValid,
    UnionValid,
    InsertPost,
    DeletePost,
    UnionPost,
}

impl BstProperty {
    pub const ALL: [BstProperty; 6] = [
        BstProperty::InsertValid,
        BstProperty::DeleteValid,
        BstProperty::UnionValid,
        BstProperty::InsertPost,
        BstProperty::DeletePost,
        BstProperty::UnionPost,
    ];

    pub fn id(self) -> &'static str {
        match self {
            BstProperty::InsertValid => "InsertValid",
            BstProperty::DeleteValid => "DeleteValid",
            BstProperty::UnionValid => "UnionValid",
            BstProperty::InsertPost => "InsertPost",
            BstProperty::DeletePost => "DeletePost",
            BstProperty::UnionPost => "UnionPost",
        }
    }

    pub fn trees(self) -> usize {
        match self {
            BstProperty::UnionValid | BstProperty::UnionPost => 2,
            _ => 1,
        }
    }

    pub fn check(self, ops: &BstOps, c: &BstCase) -> Verdict {
        let valid = is_bst(&c.t) && (self.trees() == 1 || is_bst(&c.u));
        if !valid {
            return Verdict::Discard;
        }
        let ok = match self {
            BstProperty::InsertValid => is_bst(&ops.insert(c.k, c.v, &c.t)),
            BstProperty::DeleteValid => is_bst(&ops.delete(c.k, &c.t)),
            BstProperty::UnionValid => is_bst(&ops.union(&c.t, &c.u)),
            BstProperty::InsertPost => {
                let expect = if c.k == c.k2 { Some(c.v) } else { find(c.k2, &c.t) };
                find(c.k2, &ops.insert(c.k, c.v, &c.t)) == expect
            }
            BstProperty::DeletePost => {
                let expect = if c.k == c.k2 { None } else { find(c.k2, &c.t) };
                find(c.k2, &ops.delete(c.k, &c.t)) == expect
            }
            BstProperty::UnionPost => find(c.k, &ops.union(&c.t, &c.u)) == find(c.k, &c.t).or(find(c.k, &c.u)),
        };
        Verdict::from_pass(ok)
    }
}

impl fmt::Display for BstProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// One test input: up to two trees plus keys and a value.
#[derive(Debug, Clone, Default)]
pub struct BstCase {
    pub t: Bst,
    pub u: Bst,
    pub k: i64,
    pub v: i64,
    pub k2: i64,
}

/// Fold of the reference insert over `(key, value)` pairs, from a leaf.
pub fn insert_all<'a>(pairs: impl IntoIterator<Item = &'a (i64, i64)>) -> Bst {
    pairs
        .into_iter()
        .fold(Bst::Leaf, |t, &(k, v)| BstOps::REFERENCE.insert(k, v, &t))
}

fn key_b() -> b::Gen<i64> {
    b::int(0, KEY_MAX)
}

fn key_s() -> st::Gen<Code> {
    st::int(0, KEY_MAX)
}

/// Size-many random pairs folded into an empty tree with insert.
pub fn insert_baseline() -> b::Gen<Bst> {
    let pair = key_b().bind(|k| key_b().map(move |v| (k, v)));
    list_baseline(pair).map(|pairs: Arc<Seq<(i64, i64)>>| insert_all(pairs.iter()))
}

pub fn insert_staged() -> st::Gen<Code> {
    let pair = key_s().bind(|k| key_s().map(move |v| Code::Tuple(vec![k.clone(), v])));
    list_staged(pair)
}

pub fn insert_compiled() -> Result<Compiled<Bst>, crate::StageError> {
    Ok(st::compile::<Vec<(i64, i64)>>(&insert_staged())?.map(|pairs| insert_all(pairs.iter())))
}

/// Trees built top-down: a leaf with weight 1 or a node with weight
/// `size`, whose subtrees get half the size.
pub fn single_pass_baseline() -> b::Gen<Bst> {
    b::fixed_point(|this: b::Gen<Bst>| {
        b::size().bind(move |n| {
            let sub = b::with_size(n / 2, this.clone());
            let node = sub.clone().bind(move |l| {
                let sub = sub.clone();
                key_b().bind(move |k| {
                    let (sub, l) = (sub.clone(), l.clone());
                    key_b().bind(move |v| {
                        let l = l.clone();
                        sub.clone()
                            .bind(move |r| b::pure(Bst::Node(Arc::new(l.clone()), k, v, Arc::new(r))))
                    })
                })
            });
            b::weighted_union(vec![(1, b::pure(Bst::Leaf)), (n, node)])
        })
    })
}

pub fn single_pass_staged() -> st::Gen<Code> {
    st::fixed_point(|this| {
        let this = this.clone();
        st::size().bind(move |n| {
            let sub = st::with_size(Code::half(n.clone()), st::recurse(&this));
            let node = sub.clone().bind(move |l| {
                let sub = sub.clone();
                key_s().bind(move |k| {
                    let (sub, l) = (sub.clone(), l.clone());
                    key_s().bind(move |v| {
                        let (l, k) = (l.clone(), k.clone());
                        sub.clone()
                            .bind(move |r| st::pure(Code::Construct(NODE, vec![l.clone(), k.clone(), v.clone(), r])))
                    })
                })
            });
            st::weighted_union(vec![(Code::Int(1), st::pure(Code::Construct(LEAF, vec![]))), (n, node)])
        })
    })
}

pub fn single_pass_compiled() -> Result<Compiled<Bst>, crate::StageError> {
    st::compile(&single_pass_staged())
}

fn tree_to_bst(t: Tree) -> Bst {
    Bst::from_tree(&t).expect("value follows the BST schema")
}

pub fn derived_baseline() -> b::Gen<Bst> {
    derive::derive_baseline(&Schema::bst())
        .expect("valid schema")
        .map(tree_to_bst)
}

/// A tree read straight from the derived representation.
struct DerivedBst(Bst);

fn bst_from_derived(v: Value, heap: &Heap) -> Result<Bst, GenError> {
    match derive::variant_parts(v, heap)? {
        (LEAF, _) => Ok(Bst::Leaf),
        (NODE, p) => match derive::tuple_fields(p, heap)? {
            [l, k, v, r] => Ok(Bst::node(
                bst_from_derived(*l, heap)?,
                k.as_int()?,
                v.as_int()?,
                bst_from_derived(*r, heap)?,
            )),
            _ => Err(GenError::Decode("malformed node".into())),
        },
        _ => Err(GenError::Decode("unknown tree tag".into())),
    }
}

impl Decode for DerivedBst {
    fn decode(v: Value, heap: &Heap) -> Result<Self, GenError> {
        bst_from_derived(v, heap).map(DerivedBst)
    }
}

pub fn derived_compiled() -> Result<Compiled<Bst>, crate::StageError> {
    let g = derive::derive_staged(&Schema::bst()).expect("valid schema");
    Ok(st::compile::<DerivedBst>(&g)?.map(|t| t.0))
}
