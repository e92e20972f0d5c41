use dynlab_core::corpus::{builtin_program, strawman};
use dynlab_core::dsl::parse_program;
use dynlab_core::program::{
    decode_relations, deletion_depth, dependency_graph, eliminate_repeated_variables, is_invariant_init,
    relations_to_functions, Depth, InitSpec, PermutationMode,
};
use dynlab_core::structure::Modification;
use dynlab_core::{Error, State};

fn set(s: &State, name: &str) -> Vec<Vec<u32>> {
    s.tuples_named(name).unwrap()
}

#[test]
fn non_empty_set_apply_by_hand() {
    let p = builtin_program("non-empty-set").unwrap().program;
    let s0 = p.init_state(3, &[]).unwrap();
    let s1 = p.apply(&s0, &Modification::ins("U", &[0])).unwrap();
    assert!(p.query_holds(&s1));
    assert_eq!(set(&s1, "First"), vec![vec![0]]);
    assert_eq!(set(&s1, "Last"), vec![vec![0]]);
    assert!(set(&s1, "List").is_empty());

    let s2 = p.apply(&s1, &Modification::ins("U", &[1])).unwrap();
    assert!(p.query_holds(&s2));
    assert_eq!(set(&s2, "First"), vec![vec![0]]);
    assert_eq!(set(&s2, "Last"), vec![vec![1]]);
    assert_eq!(set(&s2, "List"), vec![vec![0, 1]]);

    let s3 = p.apply(&s2, &Modification::del("U", &[0])).unwrap();
    assert!(p.query_holds(&s3));
    assert_eq!(set(&s3, "First"), vec![vec![1]]);
    assert_eq!(set(&s3, "Last"), vec![vec![1]]);
    assert!(set(&s3, "List").is_empty());

    let s4 = p.apply(&s3, &Modification::del("U", &[1])).unwrap();
    assert!(!p.query_holds(&s4));
}

#[test]
fn run_traces() {
    let p = builtin_program("non-empty-set").unwrap().program;
    let s0 = p.init_state(2, &[]).unwrap();
    assert_eq!(p.run(&s0, &[], true).unwrap(), vec![s0.clone()]);

    let seq = [Modification::ins("U", &[0]), Modification::del("U", &[0])];
    let trace = p.run(&s0, &seq, true).unwrap();
    assert_eq!(trace.len(), 3);
    assert!(!p.query_holds(&trace[2]));

    let twice = [Modification::ins("U", &[0]), Modification::ins("U", &[0])];
    let err = p.run(&s0, &twice, true).unwrap_err();
    assert!(matches!(&err, Error::Dishonest { step: 2, .. }), "{err}");
    assert!(p.run(&s0, &twice, false).is_ok());
}

#[test]
fn init_variants() {
    let p = builtin_program("non-empty-set").unwrap().program;
    let input = vec![("U".to_string(), vec![0]), ("U".to_string(), vec![1])];
    let empty = p.with_init(InitSpec::Empty).init_state(3, &input).unwrap();
    for aux in ["Q", "First", "Last", "List"] {
        assert!(set(&empty, aux).is_empty(), "{aux}");
    }

    let oracle = p.init_state(3, &input).unwrap();
    assert!(p.query_holds(&oracle));
    assert_eq!(set(&oracle, "First"), vec![vec![0]]);
    assert_eq!(set(&oracle, "Last"), vec![vec![1]]);
    assert_eq!(set(&oracle, "List"), vec![vec![0, 1]]);

    let reach = builtin_program("reach-1layer-qf").unwrap().program;
    let s = reach.init_state(5, &[]).unwrap();
    assert_eq!(set(&s, "C"), vec![vec![0]]);
    assert!(!reach.query_holds(&s));
    assert!(set(&s, "ConS").is_empty());
    assert!(set(&s, "ConT").is_empty());
}

#[test]
fn invariance_of_simple_inits() {
    let header = "input { U/1 }\naux { Q/0, M/1 }\nquery Q\ndefault frame\n";
    let copy = parse_program(&format!("program c\n{header}init builtin copy_input\n")).unwrap();
    let mark = parse_program(&format!("program m\n{header}init builtin mark_zero\n")).unwrap();
    let empty = parse_program(&format!("program e\n{header}init empty\n")).unwrap();
    let db = vec![("U".to_string(), vec![1])];
    assert!(is_invariant_init(&copy, 3, &db, PermutationMode::All).unwrap());
    assert!(is_invariant_init(&empty, 3, &db, PermutationMode::All).unwrap());
    assert!(!is_invariant_init(&mark, 2, &[], PermutationMode::All).unwrap());
}

#[test]
fn dedup_vars_example() {
    let input = strawman("repeated-vars").unwrap().program;
    assert!(input.syntax_flags().repeated_vars_in_atom);
    let out = eliminate_repeated_variables(&input).unwrap();
    assert!(!out.syntax_flags().repeated_vars_in_atom);
    let expected = parse_program(include_str!("../corpus/strawmen/repeated-vars-dedup.dynp")).unwrap();
    assert_eq!(out, expected);
}

#[test]
fn dedup_vars_fixed_point() {
    let p = builtin_program("non-empty-set").unwrap().program;
    let out = eliminate_repeated_variables(&p).unwrap();
    assert_eq!(out.rules(), p.rules());
}

#[test]
fn dedup_vars_rejects_functions() {
    let p = builtin_program("reach-1layer-qf").unwrap().program;
    assert!(eliminate_repeated_variables(&p).is_err());
}

#[test]
fn rel2fun_encoding() {
    let p = parse_program("program r\ninput { U/1 }\naux { Q/0, R/1 }\nquery Q\ninit empty\non insert U(a):\n  R(x): R(x) | x = a\n  Q: true\non delete U(a):\n  R(x): R(x) & x != a\n  Q: Q\n")
        .unwrap();
    let q = relations_to_functions(&p).unwrap();
    let s0 = q.init_state(2, &[]).unwrap();
    let top = s0.fun_named("c_top", &[]).unwrap();
    let bot = s0.fun_named("c_bot", &[]).unwrap();
    assert_eq!((top, bot), (0, 1));
    assert_eq!(s0.fun_named("f_R", &[0]).unwrap(), bot);
    assert_eq!(s0.fun_named("f_R", &[1]).unwrap(), bot);

    let s1 = q.apply(&s0, &Modification::ins("U", &[0])).unwrap();
    assert_eq!(s1.fun_named("f_R", &[0]).unwrap(), top);
    assert_eq!(s1.fun_named("f_R", &[1]).unwrap(), bot);
    let decoded = decode_relations(&p, &s1).unwrap();
    assert_eq!(set(&decoded, "R"), vec![vec![0]]);
    assert!(q.init_state(1, &[]).is_err());
}

#[test]
fn dependency_edges() {
    let p = strawman("conj-nonemptyset").unwrap().program;
    let g = dependency_graph(&p, true);
    assert!(g.has_edge("Q", "R"));
    assert!(g.has_edge("R", "R"));

    let no_atoms = parse_program("program n\ninput { U/1 }\naux { Q/0 }\nquery Q\ninit empty\non insert U(a):\n  Q: true\non delete U(a):\n  Q: false\n")
        .unwrap();
    let g = dependency_graph(&no_atoms, false);
    assert_eq!(g.successors("Q").count(), 0);
}

#[test]
fn deletion_depths() {
    let p = parse_program(
        "program d
input { U/1 }
aux { Q/0, R/1, S/1, T/1 }
query Q
init empty
default frame
on delete U(u):
  Q: R(u)
  R(x): S(x)
",
    )
    .unwrap();
    let d = deletion_depth(&p);
    assert_eq!(d["Q"], Depth::Finite(0));
    assert_eq!(d["R"], Depth::Finite(1));
    assert_eq!(d["S"], Depth::Finite(2));
    assert_eq!(d["T"], Depth::Unreachable);
}
