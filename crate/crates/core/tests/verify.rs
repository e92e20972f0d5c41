use dynlab_core::corpus::{builtin_program, strawman, Guard};
use dynlab_core::dsl::parse_program;
use dynlab_core::program::{deletion_depth, InitSpec};
use dynlab_core::queries::{oracle_nonemptyset, oracle_st_reach, Oracle};
use dynlab_core::structure::{Elem, Modification};
use dynlab_core::verify::*;
use dynlab_core::{Error, State};

fn oracle(o: Oracle) -> impl Fn(&State) -> dynlab_core::Result<bool> + Sync {
    move |s: &State| o.eval(s)
}

#[test]
fn non_empty_set_domain_3_is_ok() {
    let e = builtin_program("non-empty-set").unwrap();
    let v = check_maintenance(&e.program, &oracle(e.oracle), &CheckConfig::exhaustive(3, 6)).unwrap();
    assert!(v.is_ok(), "{v}");
    assert_eq!(v.exit_code(), 0);
}

#[test]
fn broken_delete_rule_diverges_at_step_2() {
    let p = parse_program(
        "program broken
input { U/1 }
aux { Q/0 }
query Q
init empty
on insert U(a):
  Q: true
on delete U(a):
  Q: true
",
    )
    .unwrap();
    let v = check_maintenance(&p, &oracle(Oracle::NonEmptySet), &CheckConfig::exhaustive(2, 3)).unwrap();
    let cex = v.counterexample().expect("counterexample");
    assert_eq!(cex.step, 2);
    assert!(!cex.expected);
    assert!(cex.produced);
    assert_eq!(cex.sequence, vec![Modification::ins("U", &[0]), Modification::del("U", &[0])]);
    cex.validate(&p, &oracle(Oracle::NonEmptySet)).unwrap();
    assert_eq!(v.exit_code(), 1);
}

#[test]
fn verdicts_do_not_depend_on_job_count() {
    let p = strawman("unary-candidate").unwrap();
    let cfg = CheckConfig::exhaustive(5, 6).guard(Guard::OneLayered);
    let one = check_maintenance(&p.program, &oracle(p.oracle), &cfg.clone().jobs(1)).unwrap();
    let many = check_maintenance(&p.program, &oracle(p.oracle), &cfg.jobs(4)).unwrap();
    assert_eq!(one.counterexample(), many.counterexample());
    assert!(one.counterexample().is_some());
}

#[test]
fn random_mode_records_seed_and_is_reproducible() {
    let p = strawman("unary-candidate").unwrap();
    let cfg = CheckConfig::random(5, 6, 200, 7).guard(Guard::OneLayered);
    let a = check_maintenance(&p.program, &oracle(p.oracle), &cfg).unwrap();
    let b = check_maintenance(&p.program, &oracle(p.oracle), &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.counterexample().unwrap().seed, Some(7));
}

#[test]
fn exhaustive_cap_is_a_resource_error() {
    let e = builtin_program("st-twopath-binary").unwrap();
    let err = check_maintenance(&e.program, &oracle(e.oracle), &CheckConfig::exhaustive(50, 5)).unwrap_err();
    assert!(matches!(err, Error::Resource(_)), "{err}");
}

#[test]
fn counterexample_json_roundtrip() {
    let p = strawman("conj-nonemptyset").unwrap();
    let v = check_maintenance(&p.program, &oracle(p.oracle), &CheckConfig::exhaustive(2, 4)).unwrap();
    let json = v.to_json();
    assert_eq!(json["format"], 1);
    assert_eq!(json["verdict"], "counterexample");
    let cex: Counterexample = serde_json::from_value(json["counterexample"].clone())
        .or_else(|_| serde_json::from_value(json.clone()))
        .unwrap();
    cex.validate(&p.program, &oracle(p.oracle)).unwrap();
}

#[test]
fn star_deletion_finds_witness_against_unary_candidate() {
    let p = strawman("unary-candidate").unwrap().program;
    let cex = (1..=8)
        .find_map(|n| attack_star_deletion(&p, n).unwrap())
        .expect("witness at some n <= 8");
    cex.validate(&p, &|s: &State| oracle_st_reach(s)).unwrap();
}

#[test]
fn star_deletion_needs_two_nodes() {
    let p = strawman("unary-candidate").unwrap().program;
    assert_eq!(attack_star_deletion(&p, 1).unwrap(), None);
}

#[test]
fn star_deletion_rejects_wide_aux_schemas() {
    let p = builtin_program("s-twopath-ternary").unwrap().program;
    let err = attack_star_deletion(&p, 4).unwrap_err();
    assert!(matches!(&err, Error::Guard(m) if m.contains("3 > 1")), "{err}");
}

#[test]
fn subset_gadget_runs_and_validates() {
    let p = strawman("unary-candidate").unwrap().program;
    assert_eq!(attack_subset_gadget(&p, 0).unwrap(), None);
    if let Some(cex) = attack_subset_gadget(&p, 2).unwrap() {
        cex.validate(&p, &|s: &State| oracle_st_reach(s)).unwrap();
    }
    assert!(matches!(attack_subset_gadget(&p, MAX_GADGET_N2 + 1), Err(Error::Resource(_))));
}

#[test]
fn cq_adversary_beats_conjunctive_candidate() {
    let p = strawman("conj-nonemptyset").unwrap().program;
    let cex = cq_adversary(&p, 2).unwrap().expect("witness");
    assert!(cex.step <= 4);
    assert!(cex.produced && !cex.expected);
    cex.validate(&p, &|s: &State| oracle_nonemptyset(s)).unwrap();
}

#[test]
fn cq_adversary_needs_conjunctive_input() {
    let p = builtin_program("non-empty-set").unwrap().program;
    assert!(matches!(cq_adversary(&p, 3), Err(Error::Precondition(_))));
}

#[test]
fn diverse_saturation_examples() {
    let p = strawman("conj-nonemptyset").unwrap().program;
    let depths = deletion_depth(&p);
    let s0 = p.init_state(2, &[]).unwrap();
    let mut s = p.apply(&s0, &Modification::ins("U", &[0])).unwrap();
    s = p.apply(&s, &Modification::ins("U", &[1])).unwrap();
    assert_eq!(diverse_saturation(&s, &p, &depths, "U").unwrap(), vec![]);

    let mut missing = s.clone();
    missing.set_named("R", &[0], false).unwrap();
    let v = diverse_saturation(&missing, &p, &depths, "U").unwrap();
    assert_eq!(
        v,
        vec![Unsaturated {
            relation: "R".into(),
            tuple: vec![0]
        }]
    );

    let mut empty_q = s.clone();
    empty_q.set_named("Q", &[], false).unwrap();
    let v = diverse_saturation(&empty_q, &p, &depths, "U").unwrap();
    assert!(v.iter().any(|u| u.relation == "Q" && u.tuple.is_empty()));
}

#[test]
fn substructure_trial_identity_holds() {
    let p = builtin_program("non-empty-set").unwrap().program;
    let s0 = p.init_state(4, &[]).unwrap();
    let s = p
        .run_final(&s0, &[Modification::ins("U", &[1]), Modification::ins("U", &[2])])
        .unwrap();
    let alpha = vec![Modification::del("U", &[1]), Modification::ins("U", &[3])];
    let t = substructure_trial(&p, &s, &s, &[1, 3], &[1, 3], &alpha, None).unwrap();
    assert_eq!(t, Trial::Held);
}

#[test]
fn substructure_trial_skips_first_vs_last() {
    let p = builtin_program("non-empty-set").unwrap().program;
    let s0 = p.init_state(3, &[]).unwrap();
    let s = p
        .run_final(&s0, &[Modification::ins("U", &[0]), Modification::ins("U", &[1])])
        .unwrap();
    let t = substructure_trial(&p, &s, &s, &[0], &[1], &[Modification::del("U", &[0])], None).unwrap();
    assert!(matches!(t, Trial::Skipped(_)));
}

#[test]
fn relational_suite_small_run() {
    let p = builtin_program("st-twopath-binary").unwrap().program;
    let v = substructure_property(&p, &SuiteConfig::relational(5, 40, 3)).unwrap();
    assert!(matches!(v, SuiteVerdict::Ok { held: 40, .. }), "{v}");
}

#[test]
fn functional_suite_needs_depth() {
    let p = builtin_program("reach-1layer-qf").unwrap().program;
    assert!(matches!(
        substructure_property(&p, &SuiteConfig::relational(6, 5, 0)),
        Err(Error::Precondition(_))
    ));
    assert_eq!(similarity_depth(&p, 4), 4 * p.nesting_depth() + p.nesting_depth());
}

#[test]
fn initfunc_on_pointer_init() {
    let p = parse_program(
        "program pointer
input { E/2 }
aux { Q/0, fun F/1 }
const s = 0, t = last
query Q
init builtin st_pointer
default frame
",
    )
    .unwrap();
    let input: Vec<(String, Vec<Elem>)> = vec![("E".into(), vec![0, 1]), ("E".into(), vec![0, 2])];
    let s = p.init_state(5, &input).unwrap();
    assert!(swappable_pairs(&s).contains(&(1, 2)));
    assert!(initfunc_violations(&s).is_empty());
    assert_eq!(init_invariance(&p, 4, 30, 1).unwrap(), None);

    let ident = p.with_init(InitSpec::Empty);
    let s = ident.init_state(5, &input).unwrap();
    assert!(initfunc_violations(&s).is_empty());
}

#[test]
fn mark_zero_is_not_invariant() {
    let p = parse_program(
        "program marked
input { U/1 }
aux { Q/0, M/1 }
query Q
init builtin mark_zero
default frame
",
    )
    .unwrap();
    assert!(init_invariance(&p, 3, 10, 0).unwrap().is_some());
    assert_eq!(init_invariance(&p.with_init(InitSpec::Empty), 3, 10, 0).unwrap(), None);
}

#[test]
fn diverse_types_on_complete_layer() {
    let p = parse_program(
        "program copy
input { E/2 }
aux { Q/0, C/2 }
const s = 0, t = last
query Q
init builtin copy_input
default frame
",
    )
    .unwrap();
    let layer: Vec<Elem> = vec![1, 2, 3];
    let mut input = Vec::new();
    for &a in &layer {
        input.push(("E".to_string(), vec![0, a]));
        input.push(("E".to_string(), vec![a, 4]));
    }
    let s = p.init_state(5, &input).unwrap();
    assert!(diverse_types_uniform(&s, &layer, 2).unwrap());
    let mut broken = s.clone();
    broken.set_named("C", &[1, 2], true).unwrap();
    assert!(!diverse_types_uniform(&broken, &layer, 2).unwrap());
}

fn succ_state(size: u32) -> State {
    parse_program("program succ\ninput { U/1 }\naux { Q/0, fun e/1 }\nbuiltin { fun Succ/1 }\nquery Q\ninit empty\ndefault frame\n")
        .unwrap()
        .init_state(size, &[])
        .unwrap()
}

#[test]
fn neighborhoods() {
    let mut s = succ_state(3);
    for x in 0..3 {
        s.set_fun_named("e", &[x], x).unwrap();
    }
    assert_eq!(neighborhood(&s, &[0], 1).unwrap(), vec![0, 1]);
    assert_eq!(neighborhood(&s, &[2], 3).unwrap(), vec![2]);
    assert!(is_closed(&s, &[2]).unwrap());

    let p = builtin_program("non-empty-set").unwrap().program;
    let r = p.init_state(4, &[]).unwrap();
    assert_eq!(neighborhood(&r, &[1, 3], 2).unwrap(), vec![1, 3]);
    let (vec, eq) = neighborhood_vector(&r, &[1, 3], 1).unwrap();
    assert_eq!(vec, vec![1, 3]);
    assert!(eq.is_discrete());
    let (_, eq) = neighborhood_vector(&r, &[1, 1], 1).unwrap();
    assert!(!eq.is_discrete());
}

#[test]
fn neighborhood_vector_follows_function_path() {
    // e: 0 -> 1 -> 2, the vector for (0) at k = 1 lists 0 then e(0)
    let mut s = succ_state(3);
    s.set_fun_named("e", &[0], 1).unwrap();
    s.set_fun_named("e", &[1], 2).unwrap();
    s.set_fun_named("e", &[2], 2).unwrap();
    let (vec, _) = neighborhood_vector(&s, &[0], 1).unwrap();
    assert_eq!(&vec[..2], &[0, 1]);
}

#[test]
fn similarity_of_closed_and_mismatched_sets() {
    let p = builtin_program("non-empty-set").unwrap().program;
    let s0 = p.init_state(4, &[]).unwrap();
    let s = p
        .run_final(&s0, &[Modification::ins("U", &[1]), Modification::ins("U", &[2])])
        .unwrap();
    for k in 0..4 {
        assert!(k_similar(&s, &[1, 2], &s, &[1, 2], k).unwrap().is_some());
    }
    assert!(k_similar(&s, &[1], &s, &[3], 0).unwrap().is_none());
}

#[test]
fn higman_examples() {
    assert!(subsequence(b"ab", b"acb"));
    assert!(subsequence(b"", b"xyz"));
    assert!(!subsequence(b"ba", b"ab"));
    let w = |v: &[&str]| v.iter().map(|s| s.as_bytes().to_vec()).collect::<Vec<_>>();
    assert_eq!(higman_pair::<u8>(&w(&["a", "ba"])), Some((1, 2)));
    assert_eq!(higman_pair::<u8>(&w(&["b", "a"])), None);
    assert_eq!(higman_pair::<u8>(&w(&["x", "y", "xy"])), Some((1, 3)));
}
