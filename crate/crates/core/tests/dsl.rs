use dynlab_core::corpus::builtin_program;
use dynlab_core::dsl::{parse_formula, parse_program, parse_script, print_script};
use dynlab_core::structure::Modification;
use dynlab_core::{Error, Formula, Term};

#[test]
fn script_names_and_constants() {
    let p = builtin_program("st-twopath-binary").unwrap().program;
    let sc = parse_script("domain 4\nins E(s, a)\nins E(a, t)\ndel E(s, a)\n", p.schema()).unwrap();
    assert_eq!(sc.size, 4);
    assert_eq!(sc.names, vec![("a".to_string(), 1)]);
    assert_eq!(
        sc.mods,
        vec![
            Modification::ins("E", &[0, 1]),
            Modification::ins("E", &[1, 3]),
            Modification::del("E", &[0, 1]),
        ]
    );
    let again = parse_script(&print_script(sc.size, &sc.initial, &sc.mods), p.schema()).unwrap();
    assert_eq!(again.mods, sc.mods);
}

#[test]
fn script_errors() {
    let p = builtin_program("non-empty-set").unwrap().program;
    assert!(parse_script("domain 2\nins U(5)\n", p.schema()).is_err());
    assert!(parse_script("domain 2\nins V(0)\n", p.schema()).is_err());
    let err = parse_script("domain 2\nins U(0)\ndomain 3\n", p.schema()).unwrap_err();
    assert!(matches!(err, Error::Parse(e) if e.line == 3), "position");
}

#[test]
fn parse_errors_carry_positions() {
    let err = parse_program("program x\ninput { U/1 }\naux { Q/0 }\nquery Q\ninit empty\non insert U(a):\n  Q: U(a) &\n")
        .unwrap_err();
    match err {
        Error::Parse(e) => assert!(e.line >= 7, "{e}"),
        other => panic!("{other}"),
    }
}

#[test]
fn formulas_parse() {
    let p = builtin_program("non-empty-set").unwrap().program;
    let f = parse_formula("!(First(a) & Last(a))", p.schema(), &["a"]).unwrap();
    let a = || vec![Term::var("a")];
    assert_eq!(f, Formula::not(Formula::and(Formula::atom("First", a()), Formula::atom("Last", a()))));
    assert!(parse_formula("Unknown(a)", p.schema(), &["a"]).is_err());
    assert!(parse_formula("First(z)", p.schema(), &["a"]).is_err());
}
