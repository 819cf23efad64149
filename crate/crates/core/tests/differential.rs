//! Random combinator programs run under both backends must agree on the
//! value (or error), the final seed and the number of draws.

use proptest::prelude::*;
use stagegen::baseline as b;
use stagegen::derive::{derive_baseline, derive_staged, Schema};
use stagegen::staged::{self as st, Code, Compiled, PrimOp};
use stagegen::workloads::{self, Backend};
use stagegen::{GenError, Seed, Variant};

#[derive(Debug, Clone)]
enum G {
    Int(i64, i64),
    Bool,
    Size,
    Pure(i64),
    Map(Box<G>),
    Add(Box<G>, Box<G>),
    Dep(Box<G>),
    Resize(i64, Box<G>),
    Halve(Box<G>),
    Union(Vec<(i64, G)>),
    SizeUnion(Box<G>, Box<G>),
    Rec(Box<G>),
}

fn arb_g() -> impl Strategy<Value = G> {
    let leaf = prop_oneof![
        (-50i64..50, 0i64..300).prop_map(|(lo, span)| G::Int(lo, lo + span)),
        Just(G::Bool),
        Just(G::Size),
        (-5i64..5).prop_map(G::Pure),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|g| G::Map(Box::new(g))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| G::Add(Box::new(x), Box::new(y))),
            inner.clone().prop_map(|g| G::Dep(Box::new(g))),
            (-1i64..12, inner.clone()).prop_map(|(n, g)| G::Resize(n, Box::new(g))),
            inner.clone().prop_map(|g| G::Halve(Box::new(g))),
            prop::collection::vec((0i64..4, inner.clone()), 1..4).prop_map(G::Union),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| G::SizeUnion(Box::new(x), Box::new(y))),
            inner.prop_map(|g| G::Rec(Box::new(g))),
        ]
    })
}

fn base(g: &G) -> b::Gen<i64> {
    match g {
        G::Int(lo, hi) => b::int(*lo, *hi),
        G::Bool => b::bool().map(i64::from),
        G::Size => b::size(),
        G::Pure(n) => b::pure(*n),
        G::Map(g) => base(g).map(|x| x.wrapping_add(x).wrapping_add(1)),
        G::Add(x, y) => {
            let y = base(y);
            base(x).bind(move |a| y.clone().map(move |c| a.wrapping_add(c)))
        }
        G::Dep(g) => base(g).bind(|x| b::int(0, x.max(0).min(20))),
        G::Resize(n, g) => b::with_size(*n, base(g)),
        G::Halve(g) => {
            let g = base(g);
            b::size().bind(move |n| b::with_size(n / 2, g.clone()))
        }
        G::Union(arms) => b::weighted_union(arms.iter().map(|(w, g)| (*w, base(g))).collect()),
        G::SizeUnion(x, y) => {
            let (x, y) = (base(x), base(y));
            b::size().bind(move |n| b::weighted_union(vec![(n, x.clone()), (1, y.clone())]))
        }
        G::Rec(g) => {
            let g = base(g);
            b::fixed_point(move |this: b::Gen<i64>| {
                b::size().bind(move |n| {
                    let step = {
                        let g = g.clone();
                        b::with_size(n / 2, this.clone()).bind(move |a| g.clone().map(move |c| a.wrapping_add(c)))
                    };
                    b::weighted_union(vec![(1, b::pure(0)), (n, step)])
                })
            })
        }
    }
}

fn staged(g: &G) -> st::Gen<Code> {
    match g {
        G::Int(lo, hi) => st::int(*lo, *hi),
        G::Bool => st::bool().map(|c| Code::ite(c, Code::Int(1), Code::Int(0))),
        G::Size => st::size(),
        G::Pure(n) => st::pure(Code::Int(*n)),
        G::Map(g) => staged(g).map(|x| Code::add(Code::add(x.clone(), x), Code::Int(1))),
        G::Add(x, y) => {
            let y = staged(y);
            staged(x).bind(move |a| y.clone().map(move |c| Code::add(a.clone(), c)))
        }
        G::Dep(g) => staged(g).bind(|x| {
            let clamped = Code::prim(
                PrimOp::Min,
                vec![Code::prim(PrimOp::Max, vec![x, Code::Int(0)]), Code::Int(20)],
            );
            st::int(0, clamped)
        }),
        G::Resize(n, g) => st::with_size(*n, staged(g)),
        G::Halve(g) => {
            let g = staged(g);
            st::size().bind(move |n| st::with_size(Code::half(n), g.clone()))
        }
        G::Union(arms) => st::frequency(arms.iter().map(|(w, g)| (*w, staged(g))).collect()),
        G::SizeUnion(x, y) => {
            let (x, y) = (staged(x), staged(y));
            st::size().bind(move |n| st::weighted_union(vec![(n, x.clone()), (Code::Int(1), y.clone())]))
        }
        G::Rec(g) => {
            let g = staged(g);
            st::fixed_point(move |this| {
                let this = this.clone();
                st::size().bind(move |n| {
                    let g = g.clone();
                    let step = st::with_size(Code::half(n.clone()), st::recurse(&this))
                        .bind(move |a| g.clone().map(move |c| Code::add(a.clone(), c)));
                    st::weighted_union(vec![(Code::Int(1), st::pure(Code::Int(0))), (n, step)])
                })
            })
        }
    }
}

type Run = (Result<i64, GenError>, (u64, u64), Option<u64>);

fn run_both(g: &G, size: i64, seed: u64) -> (Run, Run) {
    let bg = base(g);
    let sg: Compiled<i64> = st::compile(&staged(g)).expect("stages");
    let mut sb = Seed::from_u64(seed, Variant::Fast).instrumented();
    let mut ss = Seed::from_u64(seed, Variant::Fast).instrumented();
    let vb = bg.generate(size, &mut sb);
    let vs = sg.run(size, &mut ss);
    (
        (vb, sb.position(), sb.sample_count()),
        (vs, ss.position(), ss.sample_count()),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn random_programs_agree(g in arb_g(), size in 0i64..40, seed in any::<u64>()) {
        let (rb, rs) = run_both(&g, size, seed);
        prop_assert_eq!(rb, rs);
    }

    #[test]
    fn registered_workloads_agree(idx in 0usize..workloads::WORKLOADS.len(), size in 0i64..60, seed in any::<u64>()) {
        let w = &workloads::WORKLOADS[idx];
        let subject = w.build().unwrap();
        let mismatch = subject.compare(size, &Seed::from_u64(seed, Variant::Fast));
        prop_assert!(mismatch.is_none(), "{}: {:?}", w.id, mismatch);
    }

    #[test]
    fn instrumentation_does_not_change_values(idx in 0usize..workloads::WORKLOADS.len(), size in 0i64..40, seed in any::<u64>()) {
        let w = &workloads::WORKLOADS[idx];
        let subject = w.build().unwrap();
        for backend in Backend::ALL {
            let mut plain = Seed::from_u64(seed, Variant::Fast);
            let mut counted = Seed::from_u64(seed, Variant::Fast).instrumented();
            let a = subject.show(backend, size, &mut plain).unwrap();
            let c = subject.show(backend, size, &mut counted).unwrap();
            prop_assert_eq!(a, c);
            prop_assert_eq!(plain.position(), counted.position());
        }
    }

    #[test]
    fn derived_schemas_agree(which in 0usize..3, size in 0i64..30, seed in any::<u64>()) {
        let schema = [Schema::bst(), Schema::stlc_type(), Schema::stlc_term()][which].clone();
        let bg = derive_baseline(&schema).unwrap();
        let sg: Compiled<stagegen::derive::Tree> = st::compile(&derive_staged(&schema).unwrap()).unwrap();
        let mut sb = Seed::from_u64(seed, Variant::Fast);
        let mut ss = Seed::from_u64(seed, Variant::Fast);
        prop_assert_eq!(bg.generate(size, &mut sb), sg.run(size, &mut ss));
        prop_assert_eq!(sb.position(), ss.position());
    }

    #[test]
    fn slow_variant_generates_the_same_values(idx in 0usize..workloads::WORKLOADS.len(), size in 0i64..30, seed in any::<u64>()) {
        let subject = workloads::WORKLOADS[idx].build().unwrap();
        for backend in Backend::ALL {
            let mut fast = Seed::from_u64(seed, Variant::Fast);
            let mut slow = Seed::from_u64(seed, Variant::IndirectSlow);
            prop_assert_eq!(subject.show(backend, size, &mut fast).unwrap(), subject.show(backend, size, &mut slow).unwrap());
            prop_assert_eq!(fast.position(), slow.position());
        }
    }
}

#[test]
fn undoing_let_insertion_is_detected() {
    let w = workloads::workload("int_pair").unwrap();
    let subject = w.build().unwrap();
    let broken = subject.with_program(subject.program().without_let_insertion()).unwrap();
    let diverged = (0..100)
        .filter(|&i| broken.compare(10, &Seed::from_u64(i, Variant::Fast)).is_some())
        .count();
    assert!(diverged > 90, "only {diverged} of 100 seeds diverged");
}

#[test]
fn errors_agree() {
    let cases = [
        G::Resize(-1, Box::new(G::Size)),
        G::Union(vec![(0, G::Pure(1)), (0, G::Pure(2))]),
        G::SizeUnion(Box::new(G::Pure(1)), Box::new(G::Pure(2))),
    ];
    for g in &cases {
        let (rb, rs) = run_both(g, 0, 9);
        assert_eq!(rb, rs, "{g:?}");
    }
    assert!(run_both(&cases[0], 0, 9).0 .0.is_err());
}
