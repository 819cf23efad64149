//! Naive monadic generator library.
//!
//! A [`Gen<A>`] is a shared closure `(size, seed) -> A`. This backend is the
//! experimental control: every [`bind`] calls its continuation at run time
//! and gets back a freshly allocated generator, and every
//! [`weighted_union`] builds a cumulative-weight table on each execution.
//! Do not optimize it.

use std::sync::{Arc, OnceLock, Weak};

use crate::error::GenError;
use crate::rand::Seed;

type RunFn<A> = dyn Fn(i64, &mut Seed) -> Result<A, GenError> + Send + Sync;

pub struct Gen<A> {
    run: Arc<RunFn<A>>,
}

impl<A> Clone for Gen<A> {
    fn clone(&self) -> Self {
        Gen {
            run: Arc::clone(&self.run),
        }
    }
}

impl<A: 'static> Gen<A> {
    pub fn new(f: impl Fn(i64, &mut Seed) -> Result<A, GenError> + Send + Sync + 'static) -> Self {
        Gen { run: Arc::new(f) }
    }

    /// A generator that always fails with `err`.
    pub fn fail(err: GenError) -> Self {
        Gen::new(move |_, _| Err(err.clone()))
    }

    /// Runs the generator without validating `size`.
    #[inline]
    pub fn generate(&self, size: i64, seed: &mut Seed) -> Result<A, GenError> {
        (self.run)(size, seed)
    }

    pub fn bind<B: 'static>(self, k: impl Fn(A) -> Gen<B> + Send + Sync + 'static) -> Gen<B> {
        bind(self, k)
    }

    pub fn map<B: 'static>(self, f: impl Fn(A) -> B + Send + Sync + 'static) -> Gen<B> {
        map(self, f)
    }
}

/// Generator that returns `x` and draws nothing.
pub fn pure<A: Clone + Send + Sync + 'static>(x: A) -> Gen<A> {
    Gen::new(move |_, _| Ok(x.clone()))
}

/// Runs `g`, feeds its result to `k`, then runs the generator `k` returned
/// with the same size and seed.
pub fn bind<A: 'static, B: 'static>(g: Gen<A>, k: impl Fn(A) -> Gen<B> + Send + Sync + 'static) -> Gen<B> {
    Gen::new(move |size, seed| {
        seed.record_bind();
        let a = g.generate(size, seed)?;
        let next = k(a);
        next.generate(size, seed)
    })
}

/// Applies a pure function to the output. Not a bind.
pub fn map<A: 'static, B: 'static>(g: Gen<A>, f: impl Fn(A) -> B + Send + Sync + 'static) -> Gen<B> {
    Gen::new(move |size, seed| g.generate(size, seed).map(&f))
}

pub fn int(lo: i64, hi: i64) -> Gen<i64> {
    Gen::new(move |_, seed| seed.int_in_range(lo, hi))
}

pub fn bool() -> Gen<bool> {
    Gen::new(|_, seed| Ok(seed.coin()))
}

/// The ambient size.
pub fn size() -> Gen<i64> {
    Gen::new(|size, _| Ok(size))
}

/// Runs `g` with the size replaced by `n`.
pub fn with_size<A: 'static>(n: i64, g: Gen<A>) -> Gen<A> {
    Gen::new(move |_, seed| {
        if n < 0 {
            return Err(GenError::NegativeSize(n));
        }
        g.generate(n, seed)
    })
}

/// Index chosen by a draw `r` in `[0, sum(weights))`: the first `i` whose
/// running total exceeds `r`.
///
/// Shared by both backends. Returns `None` when `r` is out of range.
pub fn select(r: i64, weights: &[i64]) -> Option<usize> {
    let mut rest = r;
    for (i, &w) in weights.iter().enumerate() {
        if rest < w {
            return Some(i);
        }
        rest -= w;
    }
    None
}

/// Weighted choice between generators.
///
/// Draws `r` uniformly from `[0, S)` where `S` is the total weight, then
/// scans a cumulative table built on this execution. An empty list yields a
/// generator that fails with [`GenError::NoChoices`]; see
/// [`try_weighted_union`] to reject it at construction.
pub fn weighted_union<A: 'static>(choices: Vec<(i64, Gen<A>)>) -> Gen<A> {
    try_weighted_union(choices).unwrap_or_else(Gen::fail)
}

pub fn try_weighted_union<A: 'static>(choices: Vec<(i64, Gen<A>)>) -> Result<Gen<A>, GenError> {
    if choices.is_empty() {
        return Err(GenError::NoChoices);
    }
    Ok(Gen::new(move |size, seed| {
        let mut table = Vec::with_capacity(choices.len());
        let mut total: i64 = 0;
        for (w, _) in &choices {
            if *w < 0 {
                return Err(GenError::NegativeWeight(*w));
            }
            total += *w;
            table.push(total);
        }
        if total == 0 {
            return Err(GenError::EmptyDistribution);
        }
        let r = seed.int_in_range(0, total - 1)?;
        let idx = table
            .iter()
            .position(|&cum| cum > r)
            .ok_or(GenError::EmptyDistribution)?;
        choices[idx].1.generate(size, seed)
    }))
}

/// Ties a recursive knot: the generator passed to `f` is the result itself.
pub fn fixed_point<A: 'static>(f: impl FnOnce(Gen<A>) -> Gen<A>) -> Gen<A> {
    let cell: Arc<OnceLock<Gen<A>>> = Arc::new(OnceLock::new());
    let weak: Weak<OnceLock<Gen<A>>> = Arc::downgrade(&cell);
    let handle = Gen::new(move |size, seed| {
        let cell = weak.upgrade().expect("recursive handle outlived its fixed point");
        cell.get()
            .expect("fixed point used before it was tied")
            .generate(size, seed)
    });
    let body = f(handle);
    let _ = cell.set(body);
    Gen::new(move |size, seed| {
        cell.get()
            .expect("fixed point is tied at construction")
            .generate(size, seed)
    })
}

struct ParamBody<P, A> {
    f: Box<dyn Fn(&Recur<P, A>, P) -> Gen<A> + Send + Sync>,
}

/// Handle for a recursive generator with one extra parameter.
pub struct Recur<P, A> {
    body: Weak<ParamBody<P, A>>,
}

impl<P, A> Clone for Recur<P, A> {
    fn clone(&self) -> Self {
        Recur {
            body: Weak::clone(&self.body),
        }
    }
}

impl<P: Clone + Send + Sync + 'static, A: 'static> Recur<P, A> {
    /// Generator for the recursive call at parameter `p`.
    pub fn call(&self, p: P) -> Gen<A> {
        let weak = Weak::clone(&self.body);
        Gen::new(move |size, seed| {
            let body = weak.upgrade().expect("recursive handle outlived its fixed point");
            let handle = Recur {
                body: Weak::clone(&weak),
            };
            (body.f)(&handle, p.clone()).generate(size, seed)
        })
    }
}

/// Parameterized fixed point: `f(handle, p)` describes the generator at
/// parameter `p`, and `handle.call(q)` recurses at `q`.
pub fn fixed_point_param<P, A>(f: impl Fn(&Recur<P, A>, P) -> Gen<A> + Send + Sync + 'static, init: P) -> Gen<A>
where
    P: Clone + Send + Sync + 'static,
    A: 'static,
{
    FixedPoint::new(f).call(init)
}

/// A parameterized recursive generator that can be entered at any
/// parameter.
pub struct FixedPoint<P, A> {
    body: Arc<ParamBody<P, A>>,
}

impl<P, A> Clone for FixedPoint<P, A> {
    fn clone(&self) -> Self {
        FixedPoint {
            body: Arc::clone(&self.body),
        }
    }
}

impl<P: Clone + Send + Sync + 'static, A: 'static> FixedPoint<P, A> {
    pub fn new(f: impl Fn(&Recur<P, A>, P) -> Gen<A> + Send + Sync + 'static) -> Self {
        FixedPoint {
            body: Arc::new(ParamBody { f: Box::new(f) }),
        }
    }

    pub fn call(&self, p: P) -> Gen<A> {
        let body = Arc::clone(&self.body);
        let handle = Recur {
            body: Arc::downgrade(&body),
        };
        Gen::new(move |size, seed| (body.f)(&handle, p.clone()).generate(size, seed))
    }
}

/// Runs `g` at `size`, advancing `seed`.
pub fn run<A: 'static>(g: &Gen<A>, size: i64, seed: &mut Seed) -> Result<A, GenError> {
    if size < 0 {
        return Err(GenError::NegativeSize(size));
    }
    g.generate(size, seed)
}
