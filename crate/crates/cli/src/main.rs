use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use dynlab_core::corpus::{self, builtin_program, strawman, CorpusEntry, Guard, STRAWMEN};
use dynlab_core::dsl::{parse_program, parse_script, print_program};
use dynlab_core::program::{
    dependency_graph, deletion_depth, eliminate_repeated_variables, relations_to_functions, Depth,
};
use dynlab_core::queries::Oracle;
use dynlab_core::serial::{StateJson, TraceJson};
use dynlab_core::structure::Role;
use dynlab_core::verify::{
    attack_star_deletion, attack_subset_gadget, check_maintenance, cq_adversary, query_disagreement,
    substructure_property, CheckConfig, Counterexample, SuiteConfig, SuiteVerdict, Verdict,
};
use dynlab_core::{DynamicProgram, State};

#[derive(Parser)]
#[command(name = "dynlab", version, about = "Run, check and attack dynamic programs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Apply a modification script and print the query after every step.
    Run {
        /// A .dynp file or the name of a shipped program.
        program: String,
        script: PathBuf,
        #[arg(long)]
        dump_aux: bool,
        #[arg(long)]
        json: bool,
        /// Reject re-insertions and deletions of absent tuples.
        #[arg(long)]
        honest: bool,
    },
    /// Compare the query with an oracle over bounded modification sequences.
    Verify {
        program: String,
        /// Defaults to the oracle registered for a shipped program.
        #[arg(long)]
        oracle: Option<String>,
        #[arg(long, default_value_t = 4)]
        domain: u32,
        #[arg(long, default_value_t = 4)]
        maxlen: usize,
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        /// Random mode with this many sampled sequences.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Honest modifications only (the default).
        #[arg(long, conflicts_with = "dishonest")]
        honest: bool,
        #[arg(long)]
        dishonest: bool,
        /// any, 1-layered or 2-layered.
        #[arg(long)]
        guard: Option<String>,
        /// Largest initial database (exhaustive mode).
        #[arg(long, default_value_t = 0)]
        init_db: usize,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        override_cap: bool,
        #[arg(long)]
        json: bool,
    },
    /// Search for a witness along a lower-bound construction.
    Attack {
        program: String,
        #[arg(long, value_enum)]
        driver: Driver,
        /// Star size, second-layer size, or deletion bound, per driver.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Rewrite a program and print or write the result.
    Transform {
        program: String,
        #[arg(long, value_enum)]
        pass: Pass,
        /// Compare the query of both programs on domains 2..=DOMAIN.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = 4)]
        domain: u32,
        #[arg(long, default_value_t = 5)]
        maxlen: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Class tags, deletion depths and dependency graphs.
    Analyze {
        program: String,
        #[arg(long)]
        dot: bool,
    },
    /// Randomized substructure-property suite.
    Suite {
        program: String,
        #[arg(long, default_value_t = 6)]
        domain: u32,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Similarity depth; defaults to the computed one for programs
        /// with functions.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// The shipped programs.
    Corpus {
        #[command(subcommand)]
        cmd: CorpusCmd,
    },
}

#[derive(Subcommand)]
enum CorpusCmd {
    List,
    Show { name: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Driver {
    StarDeletion,
    SubsetGadget,
    CqAdversary,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pass {
    DedupVars,
    Rel2fun,
}

struct Loaded {
    program: DynamicProgram,
    entry: Option<CorpusEntry>,
}

fn load(spec: &str) -> anyhow::Result<Loaded> {
    let path = Path::new(spec);
    if path.exists() {
        let src = fs::read_to_string(path).with_context(|| format!("reading {spec}"))?;
        let program = parse_program(&src).map_err(|e| anyhow::anyhow!("{spec}: {e}"))?;
        return Ok(Loaded { program, entry: None });
    }
    let entry = if STRAWMEN.contains(&spec) {
        strawman(spec)?
    } else if corpus::names().contains(&spec) {
        builtin_program(spec)?
    } else {
        bail!("no such file or shipped program `{spec}`");
    };
    Ok(Loaded {
        program: entry.program.clone(),
        entry: Some(entry),
    })
}

fn aux_lines(p: &DynamicProgram, s: &State) -> Vec<String> {
    let j = StateJson::of(s);
    let schema = p.schema();
    let mut out = Vec::new();
    for r in schema.with_role(Role::Aux) {
        if let Some(tuples) = j.relations.get(&r.name) {
            out.push(format!("    {} = {:?}", r.name, tuples));
        } else if let Some(rows) = j.functions.get(&r.name) {
            out.push(format!("    {} = {:?}", r.name, rows));
        }
    }
    out
}

fn cmd_run(program: &str, script: &Path, dump_aux: bool, json: bool, honest: bool) -> anyhow::Result<i32> {
    let p = load(program)?.program;
    let src = fs::read_to_string(script).with_context(|| format!("reading {}", script.display()))?;
    let sc = parse_script(&src, p.schema()).map_err(|e| anyhow::anyhow!("{}: {e}", script.display()))?;
    let s0 = p.init_state(sc.size, &sc.initial)?;
    let trace = p.run(&s0, &sc.mods, honest)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&TraceJson::new(&p, &trace, &sc.mods))?);
        return Ok(0);
    }
    for (i, s) in trace.iter().enumerate() {
        let label = match i {
            0 => "init".to_string(),
            _ => sc.mods[i - 1].to_string(),
        };
        println!("step {i}: {label} {}={}", p.query(), p.query_holds(s));
        if dump_aux {
            for line in aux_lines(&p, s) {
                println!("{line}");
            }
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    program: &str,
    oracle: Option<String>,
    domain: u32,
    maxlen: usize,
    samples: Option<usize>,
    seed: u64,
    dishonest: bool,
    guard: Option<String>,
    init_db: usize,
    jobs: usize,
    override_cap: bool,
    json: bool,
) -> anyhow::Result<i32> {
    let loaded = load(program)?;
    let oracle: Oracle = match (oracle, &loaded.entry) {
        (Some(name), _) => name.parse()?,
        (None, Some(e)) => e.oracle,
        (None, None) => bail!("--oracle is required for program files"),
    };
    let guard: Guard = match (guard, &loaded.entry) {
        (Some(g), _) => g.parse()?,
        (None, Some(e)) => e.guard,
        (None, None) => Guard::Any,
    };
    let mut cfg = match samples {
        Some(n) => CheckConfig::random(domain, maxlen, n, seed),
        None => CheckConfig::exhaustive(domain, maxlen),
    }
    .honest(!dishonest)
    .guard(guard)
    .jobs(jobs)
    .init_db_max(init_db);
    cfg.override_cap = override_cap;
    let f = move |s: &State| oracle.eval(s);
    let verdict = check_maintenance(&loaded.program, &f, &cfg)?;
    report_verdict(&verdict, json)?;
    Ok(verdict.exit_code())
}

fn report_verdict(v: &Verdict, json: bool) -> anyhow::Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(&v.to_json())?);
        return Ok(());
    }
    println!("{v}");
    if let Some(cex) = v.counterexample() {
        println!("replay script:\n{}", cex.script());
        println!("{}", serde_json::to_string(cex)?);
    }
    Ok(())
}

fn report_witness(cex: Option<Counterexample>, json: bool) -> anyhow::Result<i32> {
    match cex {
        Some(c) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&c)?);
            } else {
                println!("{c}");
                println!("replay script:\n{}", c.script());
            }
            Ok(1)
        }
        None => {
            println!("no witness at this scale");
            Ok(2)
        }
    }
}

fn cmd_attack(program: &str, driver: Driver, n: Option<usize>, json: bool) -> anyhow::Result<i32> {
    let p = load(program)?.program;
    let cex = match driver {
        Driver::StarDeletion => attack_star_deletion(&p, n.unwrap_or(6))?,
        Driver::SubsetGadget => attack_subset_gadget(&p, n.unwrap_or(2))?,
        Driver::CqAdversary => cq_adversary(&p, n.unwrap_or(4))?,
    };
    report_witness(cex, json)
}

fn cmd_transform(
    program: &str,
    pass: Pass,
    check: bool,
    domain: u32,
    maxlen: usize,
    output: Option<PathBuf>,
) -> anyhow::Result<i32> {
    let p = load(program)?.program;
    let q = match pass {
        Pass::DedupVars => eliminate_repeated_variables(&p)?,
        Pass::Rel2fun => relations_to_functions(&p)?,
    };
    if q == p {
        eprintln!("note: nothing to rewrite, program passed through unchanged");
    }
    let text = print_program(&q);
    match &output {
        Some(path) => fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    if check {
        for n in 2..=domain.max(2) {
            if let Some(seq) = query_disagreement(&p, &q, n, maxlen)? {
                let shown: Vec<String> = seq.iter().map(|m| m.to_string()).collect();
                eprintln!("check failed: domain {n}, after [{}]", shown.join(", "));
                return Ok(1);
            }
        }
        eprintln!("check: query agrees on domains 2..={} up to length {maxlen}", domain.max(2));
    }
    Ok(0)
}

fn cmd_analyze(program: &str, dot: bool) -> anyhow::Result<i32> {
    let p = load(program)?.program;
    println!("program {}", p.name());
    println!("{}", corpus::ClassTags::of(&p));
    let depths = deletion_depth(&p);
    println!("deletion depths:");
    let mut unreachable = Vec::new();
    for (sym, d) in &depths {
        match d {
            Depth::Finite(k) => println!("  {sym}: {k}"),
            Depth::Unreachable => unreachable.push(sym.as_str()),
        }
    }
    if !unreachable.is_empty() {
        println!("unreachable: {}", unreachable.join(", "));
    }
    if dot {
        print!("{}", dependency_graph(&p, false).to_dot(&format!("{} dependencies", p.name())));
        print!("{}", dependency_graph(&p, true).to_dot(&format!("{} deletion dependencies", p.name())));
    }
    Ok(0)
}

fn cmd_suite(program: &str, domain: u32, samples: usize, seed: u64, depth: Option<usize>) -> anyhow::Result<i32> {
    let loaded = load(program)?;
    let p = &loaded.program;
    let mut cfg = if p.is_relational() && depth.is_none() {
        SuiteConfig::relational(domain, samples, seed)
    } else {
        SuiteConfig::functional(p, domain, samples, seed)
    };
    if depth.is_some() {
        cfg.depth = depth;
    }
    if let Some(e) = &loaded.entry {
        cfg.guard = e.guard;
    }
    let v = substructure_property(p, &cfg)?;
    println!("seed {seed}: {v}");
    if let SuiteVerdict::Violation(w) = &v {
        println!("{}", serde_json::to_string(w.as_ref())?);
    }
    Ok(v.exit_code())
}

fn cmd_corpus(cmd: CorpusCmd) -> anyhow::Result<i32> {
    match cmd {
        CorpusCmd::List => {
            for e in corpus::entries()? {
                println!("{:<20} {:<8} oracle {:<14} guard {}", e.name, e.tags.class_name(), e.oracle, e.guard);
            }
            for name in STRAWMEN {
                let e = strawman(name)?;
                println!("{:<20} {:<8} oracle {:<14} strawman", e.name, e.tags.class_name(), e.oracle);
            }
        }
        CorpusCmd::Show { name } => {
            let e = load(&name)?.entry.context("not a shipped program")?;
            print!("{}", e.source);
        }
    }
    Ok(0)
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.cmd {
        Cmd::Run {
            program,
            script,
            dump_aux,
            json,
            honest,
        } => cmd_run(&program, &script, dump_aux, json, honest),
        Cmd::Verify {
            program,
            oracle,
            domain,
            maxlen,
            exhaustive: _,
            samples,
            seed,
            honest: _,
            dishonest,
            guard,
            init_db,
            jobs,
            override_cap,
            json,
        } => cmd_verify(
            &program,
            oracle,
            domain,
            maxlen,
            samples,
            seed,
            dishonest,
            guard,
            init_db,
            jobs,
            override_cap,
            json,
        ),
        Cmd::Attack { program, driver, n, json } => cmd_attack(&program, driver, n, json),
        Cmd::Transform {
            program,
            pass,
            check,
            domain,
            maxlen,
            output,
        } => cmd_transform(&program, pass, check, domain, maxlen, output),
        Cmd::Analyze { program, dot } => cmd_analyze(&program, dot),
        Cmd::Suite {
            program,
            domain,
            samples,
            seed,
            depth,
        } => cmd_suite(&program, domain, samples, seed, depth),
        Cmd::Corpus { cmd } => cmd_corpus(cmd),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
