//! Persistent cons lists for the baseline generators.
//!
//! Baseline generators return values through `pure`, which clones on
//! every run, so the lists they build must share their tails.

use std::sync::Arc;

#[derive(Debug)]
pub enum Seq<T> {
    Nil,
    Cons(T, Arc<Seq<T>>),
}

impl<T> Seq<T> {
    pub fn nil() -> Arc<Seq<T>> {
        Arc::new(Seq::Nil)
    }

    pub fn cons(head: T, tail: Arc<Seq<T>>) -> Arc<Seq<T>> {
        Arc::new(Seq::Cons(head, tail))
    }

    pub fn iter(&self) -> SeqIter<'_, T> {
        SeqIter { cur: self }
    }
}

impl<T: Clone> Seq<T> {
    pub fn to_vec(&self) -> Vec<T> {
        self.iter().cloned().collect()
    }
}

pub struct SeqIter<'a, T> {
    cur: &'a Seq<T>,
}

impl<'a, T> Iterator for SeqIter<'a, T> {
    type Item = &'a T;

    fn next(&mut self) -> Option<&'a T> {
        match self.cur {
            Seq::Nil => None,
            Seq::Cons(x, rest) => {
                self.cur = rest;
                Some(x)
            }
        }
    }
}

impl<T> Drop for Seq<T> {
    fn drop(&mut self) {
        // Unlink uniquely owned tails one at a time so long lists do not
        // recurse.
        fn take<T>(s: &mut Seq<T>) -> Option<Seq<T>> {
            match s {
                Seq::Cons(_, tail) => Arc::get_mut(tail).map(|n| std::mem::replace(n, Seq::Nil)),
                Seq::Nil => None,
            }
        }
        let mut cur = match take(self) {
            Some(c) => c,
            None => return,
        };
        while let Some(next) = take(&mut cur) {
            cur = next;
        }
    }
}
