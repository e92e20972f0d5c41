//! The shipped programs: the four maintained queries plus strawman
//! candidates for the attack drivers.

mod guard;
mod strawmen;

pub use guard::Guard;
pub use strawmen::{project_to_unary, strawman, STRAWMEN};

use std::fmt;

use crate::dsl::parse_program;
use crate::error::{Error, Result};
use crate::program::DynamicProgram;
use crate::queries::Oracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fragment {
    /// Quantifier-free formulas over relations only.
    Prop,
    /// Additionally uses function symbols.
    Qf,
}

/// Syntactic class of a program, computed from its schema and rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassTags {
    pub fragment: Fragment,
    /// Uses built-in symbols.
    pub starred: bool,
    pub max_aux_arity: usize,
    pub negation_free: bool,
    pub conjunctive: bool,
    pub nesting_depth: usize,
    pub only_unary_builtin_functions: bool,
    pub relational_aux: bool,
}

impl ClassTags {
    pub fn of(p: &DynamicProgram) -> ClassTags {
        use crate::structure::{Role, SymbolKind};
        let schema = p.schema();
        let flags = p.syntax_flags();
        ClassTags {
            fragment: if schema.num_functions() == 0 {
                Fragment::Prop
            } else {
                Fragment::Qf
            },
            starred: schema
                .with_role(Role::Builtin)
                .any(|s| s.kind != SymbolKind::Constant),
            max_aux_arity: p.max_aux_arity(),
            negation_free: flags.negation_free,
            conjunctive: flags.conjunctive,
            nesting_depth: p.nesting_depth(),
            only_unary_builtin_functions: p.only_unary_builtin_functions(),
            relational_aux: schema
                .with_role(Role::Aux)
                .all(|s| s.kind == SymbolKind::Relation),
        }
    }

    /// `DynProp`, `DynQF*` and so on.
    pub fn class_name(&self) -> String {
        let base = match self.fragment {
            Fragment::Prop => "DynProp",
            Fragment::Qf => "DynQF",
        };
        if self.starred {
            format!("{base}*")
        } else {
            base.to_string()
        }
    }
}

impl fmt::Display for ClassTags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "yes" } else { "no" };
        writeln!(f, "class {}", self.class_name())?;
        writeln!(f, "max aux arity {}", self.max_aux_arity)?;
        writeln!(f, "nesting depth {}", self.nesting_depth)?;
        writeln!(f, "negation-free: {}", yn(self.negation_free))?;
        writeln!(f, "conjunctive: {}", yn(self.conjunctive))?;
        writeln!(f, "relational aux schema: {}", yn(self.relational_aux))?;
        write!(f, "builtin functions unary: {}", yn(self.only_unary_builtin_functions))
    }
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub program: DynamicProgram,
    pub oracle: Oracle,
    pub tags: ClassTags,
    pub guard: Guard,
    pub source: &'static str,
}

struct Source {
    name: &'static str,
    text: &'static str,
    oracle: Oracle,
    guard: Guard,
}

const SOURCES: &[Source] = &[
    Source {
        name: "non-empty-set",
        text: include_str!("../../corpus/non-empty-set.dynp"),
        oracle: Oracle::NonEmptySet,
        guard: Guard::Any,
    },
    Source {
        name: "st-twopath-binary",
        text: include_str!("../../corpus/st-twopath-binary.dynp"),
        oracle: Oracle::StTwoPath,
        guard: Guard::Any,
    },
    Source {
        name: "s-twopath-ternary",
        text: include_str!("../../corpus/s-twopath-ternary.dynp"),
        oracle: Oracle::STwoPath,
        guard: Guard::Any,
    },
    Source {
        name: "reach-1layer-qf",
        text: include_str!("../../corpus/reach-1layer-qf.dynp"),
        oracle: Oracle::StReach,
        guard: Guard::OneLayered,
    },
];

/// Names accepted by [`builtin_program`].
pub fn names() -> Vec<&'static str> {
    SOURCES.iter().map(|s| s.name).collect()
}

pub fn builtin_program(name: &str) -> Result<CorpusEntry> {
    let src = SOURCES.iter().find(|s| s.name == name).ok_or_else(|| {
        Error::Precondition(format!(
            "unknown corpus program `{name}` (known: {})",
            names().join(", ")
        ))
    })?;
    let program = parse_program(src.text)?;
    Ok(CorpusEntry {
        name: src.name,
        tags: ClassTags::of(&program),
        program,
        oracle: src.oracle,
        guard: src.guard,
        source: src.text,
    })
}

pub fn entries() -> Result<Vec<CorpusEntry>> {
    SOURCES.iter().map(|s| builtin_program(s.name)).collect()
}
