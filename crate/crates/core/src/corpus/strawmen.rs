use super::{builtin_program, ClassTags, CorpusEntry, Guard};
use crate::dsl::parse_program;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::program::{DynamicProgram, RuleBody, UpdateRule};
use crate::queries::Oracle;
use crate::structure::{Role, Schema, SymbolKind};

/// Candidate programs that are expected to fail, used by the attacks and
/// transform tests.
pub const STRAWMEN: &[&str] = &["unary-candidate", "conj-nonemptyset", "repeated-vars"];

/// Drops every aux symbol of arity above one; atoms over dropped relations
/// become `false`.
pub fn project_to_unary(p: &DynamicProgram, name: &str) -> Result<DynamicProgram> {
    let schema = p.schema();
    let dropped: Vec<String> = schema
        .with_role(Role::Aux)
        .filter(|s| s.arity > 1)
        .map(|s| s.name.clone())
        .collect();
    if dropped.iter().any(|d| d == p.query()) {
        return Err(Error::Unsupported("the query symbol has arity above one".into()));
    }
    let mut b = Schema::builder();
    for s in schema.symbols() {
        if dropped.contains(&s.name) {
            continue;
        }
        b = match s.kind {
            SymbolKind::Relation => b.relation(&s.name, s.arity, s.role),
            SymbolKind::Function => b.function(&s.name, s.arity, s.role),
            SymbolKind::Constant => b.constant(&s.name, Some(schema.binding(s.slot))),
        };
    }
    let mut cut = |rel: &str, args: &[crate::formula::Term]| {
        if dropped.iter().any(|d| d == rel) {
            Formula::False
        } else {
            Formula::Atom(rel.to_string(), args.to_vec())
        }
    };
    let rules: Vec<UpdateRule> = p
        .rules()
        .iter()
        .filter(|r| !dropped.contains(&r.target))
        .map(|r| UpdateRule {
            body: match &r.body {
                RuleBody::Formula(f) => RuleBody::Formula(f.map_atoms(&mut cut)),
                RuleBody::Term(t) => RuleBody::Term(t.map_atoms(&mut cut)),
            },
            ..r.clone()
        })
        .collect();
    DynamicProgram::new(name, b.build()?, rules, p.query(), p.init().clone(), p.default_frame())
}

pub fn strawman(name: &str) -> Result<CorpusEntry> {
    let (name, program, oracle, guard, source): (&'static str, DynamicProgram, Oracle, Guard, &'static str) = match name {
        "unary-candidate" => {
            let base = builtin_program("st-twopath-binary")?;
            (
                "unary-candidate",
                project_to_unary(&base.program, "unary-candidate")?,
                Oracle::StReach,
                Guard::OneLayered,
                include_str!("../../corpus/strawmen/unary-candidate.dynp"),
            )
        }
        "conj-nonemptyset" => {
            let text = include_str!("../../corpus/strawmen/conj-nonemptyset.dynp");
            ("conj-nonemptyset", parse_program(text)?, Oracle::NonEmptySet, Guard::Any, text)
        }
        "repeated-vars" => {
            let text = include_str!("../../corpus/strawmen/repeated-vars.dynp");
            ("repeated-vars", parse_program(text)?, Oracle::NonEmptySet, Guard::Any, text)
        }
        other => {
            return Err(Error::Precondition(format!(
                "unknown strawman `{other}` (known: {})",
                STRAWMEN.join(", ")
            )))
        }
    };
    Ok(CorpusEntry {
        name,
        tags: ClassTags::of(&program),
        program,
        oracle,
        guard,
        source,
    })
}
