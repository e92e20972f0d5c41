use dynlab_core::queries::*;
use dynlab_core::structure::Elem;
use dynlab_core::State;

fn g(size: u32, es: &[(Elem, Elem)]) -> State {
    graph(graph_schema(true), size, es).unwrap()
}

fn plain(size: u32, es: &[(Elem, Elem)]) -> State {
    graph(graph_schema(false), size, es).unwrap()
}

#[test]
fn st_reach() {
    assert!(oracle_st_reach(&g(4, &[(0, 3)])).unwrap());
    assert!(!oracle_st_reach(&g(4, &[])).unwrap());
    assert!(oracle_st_reach(&g(4, &[(0, 1), (1, 2), (2, 3)])).unwrap());
    assert!(oracle_st_reach(&plain(3, &[])).is_err());
}

#[test]
fn non_empty_set() {
    let p = dynlab_core::corpus::builtin_program("non-empty-set").unwrap().program;
    let mut db = p.blank_state(3).unwrap().input_only();
    assert!(!oracle_nonemptyset(&db).unwrap());
    db.set_named("U", &[1], true).unwrap();
    assert!(oracle_nonemptyset(&db).unwrap());
    db.set_named("U", &[1], false).unwrap();
    assert!(!oracle_nonemptyset(&db).unwrap());
}

#[test]
fn two_paths() {
    let both = g(4, &[(0, 1), (1, 3)]);
    assert!(oracle_st_twopath(&both).unwrap());
    assert!(oracle_s_twopath(&both).unwrap());
    let direct = g(4, &[(0, 3)]);
    assert!(!oracle_st_twopath(&direct).unwrap());
    assert!(!oracle_s_twopath(&direct).unwrap());
    let away = g(4, &[(0, 1), (1, 2)]);
    assert!(!oracle_st_twopath(&away).unwrap());
    assert!(oracle_s_twopath(&away).unwrap());
}

#[test]
fn cliques() {
    assert!(oracle_k_clique(&plain(3, &[(0, 1), (1, 2), (2, 0)]), 3).unwrap());
    assert!(!oracle_k_clique(&plain(3, &[(0, 1), (1, 2)]), 3).unwrap());
    assert!(oracle_k_clique(&plain(3, &[(0, 1)]), 1).unwrap());
}

#[test]
fn colorability() {
    let triangle = plain(3, &[(0, 1), (1, 2), (2, 0)]);
    assert!(!oracle_k_colorability(&triangle, 2).unwrap());
    assert!(oracle_k_colorability(&triangle, 3).unwrap());
    assert!(oracle_k_colorability(&plain(4, &[]), 1).unwrap());
}

#[test]
fn layered_generation() {
    let spec = LayeredSpec::new(&[3], true).unwrap();
    let star = gen_layered(&spec, &EdgePattern::Star).unwrap();
    let t = spec.t().unwrap();
    let mut expected = Vec::new();
    for a in spec.layer(0) {
        expected.push((0, a));
        expected.push((a, t));
    }
    expected.sort();
    assert_eq!(edges(&star).unwrap(), expected);

    let spec2 = LayeredSpec::new(&[2, 2], true).unwrap();
    let t2 = spec2.t().unwrap();
    let bs: Vec<(Elem, Elem)> = spec2.layer(1).map(|b| (b, t2)).collect();
    let base = gen_layered(&spec2, &EdgePattern::Explicit(bs.clone())).unwrap();
    assert_eq!(edges(&base).unwrap(), bs);
    assert!(is_k_layered(&base, 2).unwrap());

    let empty = gen_layered(&spec2, &EdgePattern::Empty).unwrap();
    assert!(edges(&empty).unwrap().is_empty());

    let a = spec2.layer(0).next().unwrap();
    assert!(gen_layered(&spec2, &EdgePattern::Explicit(vec![(0, t2), (a, t2)])).is_err());
}

#[test]
fn identify_st() {
    // s=0, a=1, b=2, t=3 in a 2-layered graph with one node per layer
    let spec = LayeredSpec::new(&[1, 1], true).unwrap();
    let path = gen_layered(&spec, &EdgePattern::Explicit(vec![(0, 1), (1, 2), (2, 3)])).unwrap();
    let h = reduce_identify_st(&path).unwrap();
    assert_eq!(edges(&h).unwrap(), vec![(0, 1), (1, 2), (2, 0)]);
    assert!(oracle_k_clique(&h, 3).unwrap());

    let empty = reduce_identify_st(&gen_layered(&spec, &EdgePattern::Empty).unwrap()).unwrap();
    assert!(edges(&empty).unwrap().is_empty());
}

#[test]
fn identify_st_matches_reachability_exhaustively() {
    let spec = LayeredSpec::new(&[2, 2], true).unwrap();
    let allowed = spec.allowed_edges();
    for mask in 0u32..1 << allowed.len() {
        let es: Vec<(Elem, Elem)> = allowed
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = gen_layered(&spec, &EdgePattern::Explicit(es)).unwrap();
        let h = reduce_identify_st(&g).unwrap();
        assert_eq!(oracle_st_reach(&g).unwrap(), oracle_k_clique(&h, 3).unwrap(), "mask {mask}");
    }
}

#[test]
fn tensor_clique() {
    let triangle = plain(3, &[(0, 1), (1, 2), (2, 0)]);
    assert_eq!(reduce_tensor_clique(&triangle, 0, 1).unwrap(), triangle);
    let bigger = reduce_tensor_clique(&triangle, 1, 1).unwrap();
    assert!(oracle_k_clique(&bigger, 4).unwrap());
}

#[test]
fn oracle_names_parse() {
    for name in ["st-reach", "non-empty-set", "st-twopath", "s-twopath"] {
        let o: Oracle = name.parse().unwrap();
        assert_eq!(o.to_string(), name);
    }
    assert!("no-such-oracle".parse::<Oracle>().is_err());
}
