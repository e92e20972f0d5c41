use std::fmt;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::DynamicProgram;
use crate::error::{Error, Result};
use crate::structure::{permute_state, Elem, Modification, Role, State, SymbolKind};

/// An argument or value position in an init table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TableArg {
    Elem(Elem),
    Const(String),
    Last,
    /// `*`: every domain element.
    Any,
}

impl TableArg {
    fn candidates(&self, s: &State) -> Result<Vec<Elem>> {
        Ok(match self {
            TableArg::Elem(e) => {
                if *e >= s.size() {
                    return Err(Error::Init(format!("element {e} outside domain of size {}", s.size())));
                }
                vec![*e]
            }
            TableArg::Const(c) => vec![s.constant_named(c)?],
            TableArg::Last => {
                if s.size() == 0 {
                    return Err(Error::Init("`last` on an empty domain".into()));
                }
                vec![s.size() - 1]
            }
            TableArg::Any => s.domain(),
        })
    }
}

impl fmt::Display for TableArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableArg::Elem(e) => write!(f, "{e}"),
            TableArg::Const(c) => write!(f, "{c}"),
            TableArg::Last => write!(f, "last"),
            TableArg::Any => write!(f, "*"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TableEntry {
    Fact { rel: String, args: Vec<TableArg> },
    Value { fun: String, args: Vec<TableArg>, value: TableArg },
}

impl fmt::Display for TableEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, args) = match self {
            TableEntry::Fact { rel, args } => (rel, args),
            TableEntry::Value { fun, args, .. } => (fun, args),
        };
        write!(f, "{name}({})", args.iter().join(", "))?;
        if let TableEntry::Value { value, .. } = self {
            write!(f, " = {value}")?;
        }
        Ok(())
    }
}

/// Explicit aux values, applied in order on top of a blank state.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct InitTable {
    pub entries: Vec<TableEntry>,
}

impl InitTable {
    pub fn new(entries: Vec<TableEntry>) -> Self {
        InitTable { entries }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn apply(&self, s: &mut State) -> Result<()> {
        let schema = s.schema().clone();
        for entry in &self.entries {
            let (name, args) = match entry {
                TableEntry::Fact { rel, args } => (rel, args),
                TableEntry::Value { fun, args, .. } => (fun, args),
            };
            let sym = schema.lookup(name)?;
            if sym.role != Role::Aux {
                return Err(Error::Init(format!("init table sets non-aux symbol `{name}`")));
            }
            if sym.arity != args.len() {
                return Err(Error::Init(format!(
                    "`{name}` has arity {}, table entry has {} arguments",
                    sym.arity,
                    args.len()
                )));
            }
            let choices = args
                .iter()
                .map(|a| a.candidates(s))
                .collect::<Result<Vec<_>>>()?;
            let tuples: Vec<Vec<Elem>> = if choices.is_empty() {
                vec![vec![]]
            } else {
                choices.into_iter().multi_cartesian_product().collect()
            };
            match entry {
                TableEntry::Fact { .. } => {
                    if sym.kind != SymbolKind::Relation {
                        return Err(Error::Init(format!("`{name}` is not a relation")));
                    }
                    for t in tuples {
                        s.set(sym.slot, &t, true);
                    }
                }
                TableEntry::Value { value, .. } => {
                    if sym.kind != SymbolKind::Function {
                        return Err(Error::Init(format!("`{name}` is not a function")));
                    }
                    let v = match value {
                        TableArg::Any => {
                            return Err(Error::Init(format!("`*` is not a value (entry for `{name}`)")))
                        }
                        other => other.candidates(s)?[0],
                    };
                    for t in tuples {
                        s.set_fun(sym.slot, &t, v);
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for InitTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{ {} }}", self.entries.iter().join(", "))
    }
}

/// How a program initializes its aux data from an input database.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum InitSpec {
    Empty,
    /// Replay the input tuples as insertions, starting from `base`.
    Oracle { base: Option<InitTable> },
    Table(InitTable),
    Builtin(String),
}

impl fmt::Display for InitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitSpec::Empty => write!(f, "empty"),
            InitSpec::Oracle { base: None } => write!(f, "oracle"),
            InitSpec::Oracle { base: Some(t) } => write!(f, "oracle table {t}"),
            InitSpec::Table(t) => write!(f, "table {t}"),
            InitSpec::Builtin(name) => write!(f, "builtin {name}"),
        }
    }
}

const BUILTIN_INITS: &[&str] = &["copy_input", "mark_zero", "st_pointer"];

/// Names accepted by `init builtin <name>`.
pub fn builtin_init_names() -> &'static [&'static str] {
    BUILTIN_INITS
}

fn sorted_modifications(p: &DynamicProgram, input: &[(String, Vec<Elem>)]) -> Result<Vec<Modification>> {
    let schema = p.schema();
    let mut keyed = Vec::with_capacity(input.len());
    for (rel, tuple) in input {
        let sym = schema.relation(rel)?;
        if sym.role != Role::Input {
            return Err(Error::schema(format!("`{rel}` is not an input relation")));
        }
        keyed.push((sym.slot, tuple.clone(), rel.clone()));
    }
    keyed.sort();
    keyed.dedup();
    Ok(keyed
        .into_iter()
        .map(|(_, t, rel)| Modification::ins(&rel, &t))
        .collect())
}

pub(super) fn init_state(p: &DynamicProgram, size: u32, input: &[(String, Vec<Elem>)]) -> Result<State> {
    let mut s = p.blank_state(size)?;
    let mods = sorted_modifications(p, input)?;
    match p.init() {
        InitSpec::Oracle { base } => {
            if let Some(t) = base {
                t.apply(&mut s)?;
            }
            for m in &mods {
                s = p.apply(&s, m)?;
            }
            return Ok(s);
        }
        _ => {
            for m in &mods {
                s.apply_input_in_place(m)?;
            }
        }
    }
    match p.init() {
        InitSpec::Empty | InitSpec::Oracle { .. } => {}
        InitSpec::Table(t) => t.apply(&mut s)?,
        InitSpec::Builtin(name) => run_builtin(name, &mut s)?,
    }
    Ok(s)
}

fn run_builtin(name: &str, s: &mut State) -> Result<()> {
    let schema = s.schema().clone();
    match name {
        "copy_input" => {
            for aux in schema.relations().filter(|r| r.role == Role::Aux) {
                for inp in schema.relations().filter(|r| r.role == Role::Input && r.arity == aux.arity) {
                    for t in s.tuples(inp.slot) {
                        s.set(aux.slot, &t, true);
                    }
                }
            }
        }
        "mark_zero" => {
            if s.size() == 0 {
                return Err(Error::Init("mark_zero needs a non-empty domain".into()));
            }
            for aux in schema.relations().filter(|r| r.role == Role::Aux && r.arity == 1) {
                s.set(aux.slot, &[0], true);
            }
        }
        "st_pointer" => {
            let src = s.constant_named("s")?;
            let dst = s.constant_named("t")?;
            let e = schema.relation("E")?.slot;
            for f in schema.functions().filter(|f| f.role == Role::Aux && f.arity == 1) {
                let table = (0..s.size())
                    .map(|x| if s.holds(e, &[src, x]) { src } else { dst })
                    .collect();
                s.set_fun_table(f.slot, table);
            }
        }
        other => {
            return Err(Error::Init(format!(
                "unknown built-in initializer `{other}` (known: {})",
                BUILTIN_INITS.join(", ")
            )))
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermutationMode {
    /// Every permutation fixing the constants.
    All,
    Sample { count: usize, seed: u64 },
}

/// Whether `pi(init(D)) == init(pi(D))` for the tested permutations `pi`.
///
/// Permutations always fix the interpretations of constant symbols.
pub fn is_invariant_init(
    p: &DynamicProgram,
    size: u32,
    input: &[(String, Vec<Elem>)],
    mode: PermutationMode,
) -> Result<bool> {
    let base = p.init_state(size, input)?;
    let fixed: Vec<Elem> = base.constants().to_vec();
    let movable: Vec<Elem> = (0..size).filter(|e| !fixed.contains(e)).collect();
    let check = |images: &[Elem]| -> Result<bool> {
        let mut perm: Vec<Elem> = (0..size).collect();
        for (from, to) in movable.iter().zip(images) {
            perm[*from as usize] = *to;
        }
        let moved: Vec<(String, Vec<Elem>)> = input
            .iter()
            .map(|(r, t)| (r.clone(), t.iter().map(|&e| perm[e as usize]).collect()))
            .collect();
        let lhs = permute_state(&base, &perm);
        let rhs = p.init_state(size, &moved)?;
        Ok(lhs == rhs)
    };
    match mode {
        PermutationMode::All => {
            for images in movable.iter().copied().permutations(movable.len()) {
                if !check(&images)? {
                    return Ok(false);
                }
            }
        }
        PermutationMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut images = movable.clone();
            for _ in 0..count {
                images.shuffle(&mut rng);
                if !check(&images)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
