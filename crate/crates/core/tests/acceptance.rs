//! One pass/fail line per acceptance criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are reported as FAIL but do not fail
//! the run; any other failure, or a known failure that starts passing, does.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dynlab_core::corpus::{builtin_program, entries, strawman, Fragment, Guard};
use dynlab_core::dsl::parse_program;
use dynlab_core::program::{eliminate_repeated_variables, is_invariant_init, relations_to_functions, InitSpec, PermutationMode};
use dynlab_core::queries::{
    gen_layered, oracle_k_clique, oracle_k_colorability, oracle_nonemptyset, oracle_st_reach, reduce_identify_st,
    reduce_tensor_clique, EdgePattern, LayeredSpec, Oracle,
};
use dynlab_core::structure::Elem;
use dynlab_core::verify::*;
use dynlab_core::{DynamicProgram, Result, State};

const KNOWN_FAILURES: &[usize] = &[8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn oracle(o: Oracle) -> impl Fn(&State) -> Result<bool> + Sync {
    move |s: &State| o.eval(s)
}

fn c1() -> Result<Outcome> {
    let e = builtin_program("non-empty-set")?;
    let start = Instant::now();
    for n in 1..=4 {
        let v = check_maintenance(&e.program, &oracle(e.oracle), &CheckConfig::exhaustive(n, 6).jobs(1))?;
        if !v.is_ok() {
            return outcome(false, format!("domain {n}: {v}"));
        }
    }
    let took = start.elapsed();
    outcome(took < Duration::from_secs(30), format!("domains 1-4, len <= 6, 1 thread, {}", secs(took)))
}

fn c2() -> Result<Outcome> {
    let e = builtin_program("st-twopath-binary")?;
    let start = Instant::now();
    let v = check_maintenance(&e.program, &oracle(e.oracle), &CheckConfig::exhaustive(5, 5))?;
    let took = start.elapsed();
    outcome(v.is_ok() && took < Duration::from_secs(60), format!("{v}, {}", secs(took)))
}

fn c3() -> Result<Outcome> {
    let e = builtin_program("s-twopath-ternary")?;
    let v = check_maintenance(&e.program, &oracle(e.oracle), &CheckConfig::random(5, 12, 10_000, 2024))?;
    outcome(v.is_ok(), v.to_string())
}

fn c4() -> Result<Outcome> {
    let e = builtin_program("reach-1layer-qf")?;
    let cfg = CheckConfig::exhaustive(5, 5).guard(Guard::OneLayered);
    let v = check_maintenance(&e.program, &oracle(e.oracle), &cfg)?;
    outcome(v.is_ok(), v.to_string())
}

fn c5() -> Result<Outcome> {
    let mut parts = Vec::new();
    for e in entries()?.into_iter().filter(|e| e.tags.fragment == Fragment::Prop) {
        let domain = e.program.blank_state(1)?.constants().len() as u32 + 4;
        let cfg = SuiteConfig::relational(domain, 500, 11);
        match substructure_property(&e.program, &cfg)? {
            SuiteVerdict::Ok { held, skipped } => parts.push(format!("{} {held} held/{skipped} skipped", e.name)),
            other => return outcome(false, format!("{}: {other}", e.name)),
        }
    }
    outcome(true, parts.join(", "))
}

fn c6() -> Result<Outcome> {
    let e = builtin_program("reach-1layer-qf")?;
    let cfg = SuiteConfig::functional(&e.program, 24, 200, 5).guard(e.guard);
    let v = substructure_property(&e.program, &cfg)?;
    let m = cfg.depth.unwrap_or(0);
    outcome(matches!(v, SuiteVerdict::Ok { .. }), format!("m = {m}: {v}"))
}

fn c7() -> Result<Outcome> {
    let mut programs: Vec<DynamicProgram> = entries()?.into_iter().map(|e| e.program).collect();
    programs.push(strawman("repeated-vars")?.program);
    for p in &programs {
        let mut outputs = vec![("rel2fun", relations_to_functions(p)?)];
        if p.is_relational() {
            let d = eliminate_repeated_variables(p)?;
            if d.syntax_flags().repeated_vars_in_atom {
                return outcome(false, format!("dedup-vars output of {} still repeats a variable", p.name()));
            }
            outputs.push(("dedup-vars", d));
        }
        for (pass, q) in &outputs {
            for n in 2..=4 {
                if let Some(seq) = query_disagreement(p, q, n, 5)? {
                    return outcome(false, format!("{pass} on {} differs at domain {n} after {seq:?}", p.name()));
                }
            }
        }
    }
    let example = eliminate_repeated_variables(&strawman("repeated-vars")?.program)?;
    let expected = parse_program(include_str!("../corpus/strawmen/repeated-vars-dedup.dynp"))?;
    outcome(
        example == expected,
        format!("{} programs, domains 2-4, len <= 5; example output matches: {}", programs.len(), example == expected),
    )
}

/// Every 2-layered graph with the given layer sizes.
fn all_two_layered(a: u32, b: u32) -> Result<Vec<State>> {
    let spec = LayeredSpec::new(&[a, b], true)?;
    let allowed = spec.allowed_edges();
    (0u32..1 << allowed.len())
        .map(|mask| {
            let es: Vec<(Elem, Elem)> = allowed
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            gen_layered(&spec, &EdgePattern::Explicit(es))
        })
        .collect()
}

fn c8() -> Result<Outcome> {
    for g in all_two_layered(2, 2)? {
        if oracle_st_reach(&g)? != oracle_k_clique(&reduce_identify_st(&g)?, 3)? {
            return outcome(false, "reachability and 3-clique disagree");
        }
    }
    // (instance, k, every second-layer node has an edge to t)
    let mut instances: Vec<(State, usize, bool)> = Vec::new();
    for (a, b) in [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1)] {
        for g in all_two_layered(a, b)? {
            let t = g.constant_named("t")?;
            let full = (a + 1..a + 1 + b).all(|v| g.holds_named("E", &[v, t]).unwrap_or(false));
            let h = reduce_identify_st(&g)?;
            if h.size() < 6 {
                instances.push((reduce_tensor_clique(&h, 1, 1)?, 4, full));
            }
            instances.insert(0, (h, 3, full));
        }
    }
    let total = instances.len();
    let mut broken = None;
    let mut proof_instances_ok = true;
    for (h, k, full) in &instances {
        if oracle_k_clique(h, *k)? == oracle_k_colorability(h, k - 1)? {
            proof_instances_ok &= !full;
            if broken.is_none() {
                broken = Some((dynlab_core::queries::edges(h)?, *k));
            }
        }
    }
    let proof_note = format!("duality on instances with all edges into t: {proof_instances_ok}");
    match broken {
        None => outcome(true, format!("reduction exact on 256 graphs; duality on {total} instances")),
        Some((es, k)) => outcome(
            false,
            format!(
                "reduction exact on 256 graphs; duality fails for k = {k} on edges {es:?} ({total} instances); {proof_note}"
            ),
        ),
    }
}

fn c9() -> Result<Outcome> {
    let unary = strawman("unary-candidate")?.program;
    let mut star = None;
    for n in 1..=8 {
        if let Some(cex) = attack_star_deletion(&unary, n)? {
            cex.validate(&unary, &|s: &State| oracle_st_reach(s))?;
            star = Some((n, cex));
            break;
        }
    }
    let conj = strawman("conj-nonemptyset")?.program;
    let cq = cq_adversary(&conj, 4)?;
    if let Some(cex) = &cq {
        cex.validate(&conj, &|s: &State| oracle_nonemptyset(s))?;
    }
    let cq_ok = cq.as_ref().is_some_and(|c| c.step <= 4);
    let detail = format!(
        "star-deletion: {}; cq-adversary: {}",
        star.as_ref()
            .map_or("none".into(), |(n, c)| format!("n = {n}, step {}", c.step)),
        cq.as_ref().map_or("none".into(), |c| format!("step {}", c.step)),
    );
    outcome(star.is_some() && cq_ok, detail)
}

fn c10() -> Result<Outcome> {
    let header = "input { E/2 }\naux { Q/0, C/2, M/1, fun F/1 }\nconst s = 0, t = last\nquery Q\ndefault frame\n";
    let base = parse_program(&format!("program inits\n{header}init empty\n"))?;
    let copy = base.with_init(InitSpec::Builtin("copy_input".into()));
    let pointer = base.with_init(InitSpec::Builtin("st_pointer".into()));
    let mut notes = Vec::new();
    for (name, p) in [("empty", &base), ("copy_input", &copy), ("st_pointer", &pointer)] {
        for n in 2..=5 {
            if let Some(db) = init_invariance(p, n, 40, 3)? {
                return outcome(false, format!("{name} not invariant at domain {n} on {db:?}"));
            }
        }
        notes.push(name);
    }
    // mark_zero pins element 0 = s, which every tested permutation fixes;
    // a program without constants exposes it.
    let plain = parse_program("program marked\ninput { U/1 }\naux { Q/0, M/1 }\nquery Q\ninit builtin mark_zero\ndefault frame\n")?;
    let rejected = !is_invariant_init(&plain, 3, &[], PermutationMode::All)?;
    let mut initfunc_checked = 0;
    for n in 2..=5 {
        let Ok(spec) = LayeredSpec::new(&[n - 2], true) else {
            continue;
        };
        for pattern in [EdgePattern::Empty, EdgePattern::Star, EdgePattern::Complete] {
            let g = gen_layered(&spec, &pattern)?;
            let s = pointer.init_from(&g)?;
            if !initfunc_violations(&s).is_empty() {
                return outcome(false, format!("aux function hits a swappable element at domain {n}"));
            }
            initfunc_checked += 1;
        }
    }
    outcome(
        rejected,
        format!(
            "invariant: {}; mark_zero rejected: {rejected}; initfunc clean on {initfunc_checked} graphs",
            notes.join(", ")
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("non-empty-set exhaustive maintenance", c1),
        ("st-twopath-binary exhaustive maintenance", c2),
        ("s-twopath-ternary random maintenance", c3),
        ("reach-1layer-qf exhaustive 1-layered maintenance", c4),
        ("substructure suite on relational programs", c5),
        ("similarity suite on reach-1layer-qf", c6),
        ("transform equivalence and example output", c7),
        ("reduction and clique/colorability duality", c8),
        ("attack drivers find validated witnesses", c9),
        ("invariant initialization checks", c10),
    ];
    let mut unexpected = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        let known = KNOWN_FAILURES.contains(&id);
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let mark = if pass { "PASS" } else { "FAIL" };
        let note = if known && !pass { " (known)" } else { "" };
        println!("criterion {id:>2} {mark}{note}: {name}: {detail}");
        if pass == known {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
