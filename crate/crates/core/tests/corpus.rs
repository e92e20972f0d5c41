use dynlab_core::corpus::{builtin_program, entries, names, strawman, Fragment, Guard, STRAWMEN};
use dynlab_core::dsl::{parse_program, print_program};
use dynlab_core::structure::Modification;

fn q_trace(name: &str, size: u32, seq: &[Modification]) -> Vec<bool> {
    let p = builtin_program(name).unwrap().program;
    let s0 = p.init_state(size, &[]).unwrap();
    p.run(&s0, seq, true).unwrap()[1..].iter().map(|s| p.query_holds(s)).collect()
}

#[test]
fn non_empty_set_trace() {
    let seq = [
        Modification::ins("U", &[0]),
        Modification::ins("U", &[1]),
        Modification::del("U", &[0]),
        Modification::del("U", &[1]),
    ];
    assert_eq!(q_trace("non-empty-set", 3, &seq), vec![true, true, true, false]);
}

#[test]
fn st_twopath_second_insert_fires() {
    // s = 0, a = 1, b = 2, t = 3
    let seq = [Modification::ins("E", &[0, 1]), Modification::ins("E", &[1, 3])];
    assert_eq!(q_trace("st-twopath-binary", 4, &seq), vec![false, true]);
}

#[test]
fn reach_counts_connected_nodes() {
    let p = builtin_program("reach-1layer-qf").unwrap().program;
    let s0 = p.init_state(5, &[]).unwrap();
    let s = p
        .run_final(&s0, &[Modification::ins("E", &[0, 2]), Modification::ins("E", &[2, 4])])
        .unwrap();
    assert_eq!(s.tuples_named("C").unwrap(), vec![vec![1]]);
    assert!(p.query_holds(&s));
}

#[test]
fn class_tags() {
    let tags = |n: &str| builtin_program(n).unwrap().tags;
    let reach = tags("reach-1layer-qf");
    assert_eq!(reach.fragment, Fragment::Qf);
    assert!(reach.starred);
    assert_eq!(reach.max_aux_arity, 1);
    assert_eq!(reach.nesting_depth, 1);
    assert!(reach.only_unary_builtin_functions);

    let two = tags("st-twopath-binary");
    assert_eq!(two.fragment, Fragment::Prop);
    assert_eq!(two.max_aux_arity, 2);
    assert!(!two.conjunctive);

    assert_eq!(tags("s-twopath-ternary").max_aux_arity, 3);
    assert_eq!(tags("non-empty-set").max_aux_arity, 2);
    assert!(strawman("conj-nonemptyset").unwrap().tags.conjunctive);
}

#[test]
fn names_and_guards() {
    assert_eq!(names(), vec!["non-empty-set", "st-twopath-binary", "s-twopath-ternary", "reach-1layer-qf"]);
    assert!(builtin_program("nope").is_err());
    assert!(strawman("nope").is_err());
    assert_eq!(builtin_program("reach-1layer-qf").unwrap().guard, Guard::OneLayered);
    for g in ["any", "1-layered", "2-layered"] {
        assert_eq!(g.parse::<Guard>().unwrap().to_string(), g);
    }
}

#[test]
fn printed_programs_reparse() {
    let mut all: Vec<_> = entries().unwrap().into_iter().map(|e| e.program).collect();
    all.extend(STRAWMEN.iter().map(|n| strawman(n).unwrap().program));
    for p in all {
        let text = print_program(&p);
        assert_eq!(parse_program(&text).unwrap(), p, "{}", p.name());
    }
}
