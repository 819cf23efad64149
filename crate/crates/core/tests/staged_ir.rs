use stagegen::staged::{self as st, Code, CompileOptions, Compiled, Rhs};
use stagegen::workloads::{self, bool_list};
use stagegen::{Seed, StageError, Variant};

fn program_text(g: &st::Gen<Code>) -> String {
    st::stage_program(g, CompileOptions::default()).unwrap().to_string()
}

#[test]
fn int_pair_golden() {
    let text = program_text(&workloads::int_pair_staged());
    assert_eq!(
        text,
        "def main(v0, seed):\n  let v1 = sample(0, 100)\n  let v2 = sample(0, v1)\n  ret (v1, v2)\n"
    );
}

#[test]
fn undone_let_insertion_duplicates_the_draw() {
    let p = st::stage_program(&workloads::int_pair_staged(), CompileOptions::default()).unwrap();
    let broken = p.without_let_insertion();
    assert_eq!(p.census().samples, 2);
    assert_eq!(broken.census().samples, 3);
    assert_eq!(
        broken.to_string(),
        "def main(v0, seed):\n  let v1 = sample(0, 100)\n  let v2 = sample(0, v1)\n  let v3 = sample(0, 100)\n  ret (v3, v2)\n"
    );
}

#[test]
fn bool_list_golden() {
    let text = program_text(&bool_list::staged());
    let expected = "\
def main(v0, seed):
  let v8 = call rec1(v0)
  ret v8

def rec1(v1, seed):
  let v2 = total(if((v1 == 0), 1, 0), v1)
  let v3 = sample_below(v2)
  let v7 = choose v3
    case if((v1 == 0), 1, 0):
      ret #0()
    case v1:
      let v4 = sample(0, 1)
      let v5 = check_size((v1 - 1))
      let v6 = call rec1(v5)
      ret #1((v4 == 1), v6)
  ret v7
";
    assert_eq!(text, expected);
}

#[test]
fn constant_weights_fold() {
    let g = st::frequency(vec![(3, st::pure(Code::Int(0))), (1, st::pure(Code::Int(1)))]);
    let folded = program_text(&g);
    assert!(folded.contains("sample_below(4)"), "{folded}");
    let kept = st::stage_program(&g, CompileOptions { fold_constants: false }).unwrap();
    assert!(kept
        .entry_def()
        .body
        .stmts
        .iter()
        .any(|s| matches!(s.rhs, Rhs::Total(_))));
}

#[test]
fn map_emits_no_statement() {
    let g = st::int(0, 9)
        .map(|x| Code::add(x, Code::Int(1)))
        .map(|x| Code::add(x, Code::Int(1)));
    let p = st::stage_program(&g, CompileOptions::default()).unwrap();
    assert_eq!(p.entry_def().body.stmts.len(), 1);
    let c: Compiled<i64> = Compiled::from_program(p).unwrap();
    let mut s = Seed::from_u64(1, Variant::Fast);
    let x = c.run(0, &mut s).unwrap();
    assert!((2..=11).contains(&x));
}

#[test]
fn empty_union_is_a_staging_error() {
    let err = st::compile::<i64>(&st::weighted_union(vec![])).err();
    assert_eq!(err, Some(StageError::NoChoices));
}

#[test]
fn every_workload_lints_and_prints_stably() {
    for w in workloads::WORKLOADS {
        let a = w.build().unwrap();
        let b = w.build().unwrap();
        a.program().lint().unwrap();
        assert_eq!(a.program().to_string(), b.program().to_string(), "{}", w.id);
    }
}

#[test]
fn single_pass_has_one_recursive_def_with_two_calls() {
    let p = st::stage_program(&workloads::bst::single_pass_staged(), CompileOptions::default()).unwrap();
    assert_eq!(p.defs.len(), 2);
    let text = p.to_string();
    let rec = text.split("\n\n").nth(1).unwrap();
    assert_eq!(rec.matches("call rec").count(), 2, "{text}");
}
