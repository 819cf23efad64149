//! Lists of booleans whose length is the size.

use std::sync::Arc;

use crate::baseline as b;
use crate::staged::{self as st, Code, Compiled};
use crate::workloads::seq::Seq;
use crate::workloads::{list_baseline, list_staged};

pub fn baseline() -> b::Gen<Vec<bool>> {
    list_baseline(b::bool()).map(|l: Arc<Seq<bool>>| l.to_vec())
}

pub fn staged() -> st::Gen<Code> {
    list_staged(st::bool())
}

pub fn compiled() -> Result<Compiled<Vec<bool>>, crate::StageError> {
    st::compile(&staged())
}
