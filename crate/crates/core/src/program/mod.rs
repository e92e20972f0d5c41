//! Dynamic programs and their update semantics.

mod deps;
mod init;
mod transform;

pub use deps::{dependency_graph, deletion_depth, DepGraph, Depth};
pub use init::{
    builtin_init_names, is_invariant_init, InitSpec, InitTable, PermutationMode, TableArg,
    TableEntry,
};
pub use transform::{decode_relations, eliminate_repeated_variables, relations_to_functions, C_BOT, C_TOP};

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::formula::{
    classify_syntax, nesting_depth, nesting_depth_term, CompiledFormula, CompiledTerm, Formula,
    SyntaxFlags, Term,
};
use crate::structure::{decode, tuple_count, Elem, ModKind, Modification, Role, Schema, State, SymbolKind};

/// An abstract modification `ins_R` / `del_R`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trigger {
    pub kind: ModKind,
    pub rel: String,
}

impl Trigger {
    pub fn ins(rel: &str) -> Self {
        Trigger {
            kind: ModKind::Ins,
            rel: rel.to_string(),
        }
    }

    pub fn del(rel: &str) -> Self {
        Trigger {
            kind: ModKind::Del,
            rel: rel.to_string(),
        }
    }
}

impl fmt::Display for Trigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.kind.keyword(), self.rel)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RuleBody {
    Formula(Formula),
    Term(Term),
}

/// `target(vars) := body` evaluated when `trigger(params)` happens.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UpdateRule {
    pub target: String,
    pub trigger: Trigger,
    pub params: Vec<String>,
    pub vars: Vec<String>,
    pub body: RuleBody,
}

fn owned(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

impl UpdateRule {
    pub fn relation(target: &str, trigger: Trigger, params: &[&str], vars: &[&str], body: Formula) -> Self {
        UpdateRule {
            target: target.to_string(),
            trigger,
            params: owned(params),
            vars: owned(vars),
            body: RuleBody::Formula(body),
        }
    }

    pub fn function(target: &str, trigger: Trigger, params: &[&str], vars: &[&str], body: Term) -> Self {
        UpdateRule {
            target: target.to_string(),
            trigger,
            params: owned(params),
            vars: owned(vars),
            body: RuleBody::Term(body),
        }
    }

    pub fn formula(&self) -> Option<&Formula> {
        match &self.body {
            RuleBody::Formula(f) => Some(f),
            RuleBody::Term(_) => None,
        }
    }

    /// Whether the rule keeps the old value of its target.
    pub fn is_frame(&self) -> bool {
        let args: Vec<Term> = self.vars.iter().map(|v| Term::Var(v.clone())).collect();
        match &self.body {
            RuleBody::Formula(Formula::Atom(r, a)) => *r == self.target && *a == args,
            RuleBody::Term(Term::App(f, a)) => *f == self.target && *a == args,
            RuleBody::Term(Term::Const(c)) => *c == self.target && args.is_empty(),
            _ => false,
        }
    }

    /// The canonical frame rule used when `default frame` fills gaps.
    pub fn frame(target: &str, kind: SymbolKind, arity: usize, trigger: Trigger, params: &[String]) -> Self {
        let vars = frame_vars(params, arity);
        let args: Vec<Term> = vars.iter().map(|v| Term::Var(v.clone())).collect();
        let body = match kind {
            SymbolKind::Function => RuleBody::Term(Term::App(target.to_string(), args)),
            _ => RuleBody::Formula(Formula::Atom(target.to_string(), args)),
        };
        UpdateRule {
            target: target.to_string(),
            trigger,
            params: params.to_vec(),
            vars,
            body,
        }
    }

    pub(crate) fn vars_in_scope(&self) -> Vec<&str> {
        self.params
            .iter()
            .chain(self.vars.iter())
            .map(String::as_str)
            .collect()
    }
}

/// Variable names `y1..yk`, or the first prefix that avoids `taken`.
pub fn frame_vars(taken: &[String], arity: usize) -> Vec<String> {
    for prefix in ["y", "z", "w", "v", "yy"] {
        let names: Vec<String> = (1..=arity).map(|i| format!("{prefix}{i}")).collect();
        if names.iter().all(|n| !taken.contains(n)) {
            return names;
        }
    }
    (1..=arity).map(|i| format!("frame_{i}")).collect()
}

/// Parameter names `u, v, w, ...` for a trigger of the given arity.
pub fn default_params(arity: usize) -> Vec<String> {
    const NAMES: [&str; 4] = ["u", "v", "w", "r"];
    if arity <= NAMES.len() {
        NAMES[..arity].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=arity).map(|i| format!("u{i}")).collect()
    }
}

#[derive(Debug, Clone)]
enum Compiled {
    Keep,
    Rel {
        slot: usize,
        arity: usize,
        body: CompiledFormula,
    },
    Fun {
        slot: usize,
        arity: usize,
        body: CompiledTerm,
    },
}

/// Update rules, schema, query symbol and initialization.
#[derive(Debug, Clone)]
pub struct DynamicProgram {
    name: String,
    schema: Arc<Schema>,
    rules: Vec<UpdateRule>,
    query: String,
    init: InitSpec,
    default_frame: bool,
    query_slot: usize,
    input_index: HashMap<usize, usize>,
    compiled: Vec<Vec<Compiled>>,
}

impl PartialEq for DynamicProgram {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && *self.schema == *other.schema
            && self.rules == other.rules
            && self.query == other.query
            && self.init == other.init
            && self.default_frame == other.default_frame
    }
}

impl Eq for DynamicProgram {}

pub const KNOWN_BUILTINS: &[&str] = &["Succ", "Pred", "Less"];

impl DynamicProgram {
    /// Validates coverage and well-formedness and compiles the rules.
    ///
    /// Without `default_frame` every (aux symbol, trigger) pair needs a rule;
    /// with it, missing pairs get the canonical frame rule.
    pub fn new(
        name: &str,
        schema: Schema,
        rules: Vec<UpdateRule>,
        query: &str,
        init: InitSpec,
        default_frame: bool,
    ) -> Result<DynamicProgram> {
        Self::from_arc(name, Arc::new(schema), rules, query, init, default_frame)
    }

    pub fn from_arc(
        name: &str,
        schema: Arc<Schema>,
        rules: Vec<UpdateRule>,
        query: &str,
        init: InitSpec,
        default_frame: bool,
    ) -> Result<DynamicProgram> {
        let qsym = schema.lookup(query)?;
        if qsym.kind != SymbolKind::Relation || qsym.role != Role::Aux {
            return Err(Error::Program(format!("query `{query}` must be an aux relation")));
        }
        let query_slot = qsym.slot;
        for sym in schema.with_role(Role::Builtin) {
            if sym.kind != SymbolKind::Constant && !KNOWN_BUILTINS.contains(&sym.name.as_str()) {
                return Err(Error::Program(format!(
                    "unknown built-in `{}` (known: {})",
                    sym.name,
                    KNOWN_BUILTINS.join(", ")
                )));
            }
        }
        let inputs: Vec<_> = schema.with_role(Role::Input).cloned().collect();
        let targets: Vec<_> = schema
            .with_role(Role::Aux)
            .filter(|s| s.kind != SymbolKind::Constant)
            .cloned()
            .collect();
        let mut table: HashMap<(Trigger, String), UpdateRule> = HashMap::new();
        let mut params_of: HashMap<Trigger, Vec<String>> = HashMap::new();
        for rule in rules {
            validate_rule(&schema, &rule)?;
            let params = params_of
                .entry(rule.trigger.clone())
                .or_insert_with(|| rule.params.clone());
            if *params != rule.params {
                return Err(Error::Program(format!(
                    "rules on {} disagree on parameter names",
                    rule.trigger
                )));
            }
            let key = (rule.trigger.clone(), rule.target.clone());
            if table.contains_key(&key) {
                return Err(Error::Program(format!(
                    "two rules for `{}` on {}",
                    rule.target, rule.trigger
                )));
            }
            table.insert(key, rule);
        }
        let mut ordered = Vec::new();
        let mut compiled = Vec::new();
        let mut input_index = HashMap::new();
        for (i, inp) in inputs.iter().enumerate() {
            input_index.insert(inp.slot, i);
            for kind in [ModKind::Ins, ModKind::Del] {
                let trig = Trigger {
                    kind,
                    rel: inp.name.clone(),
                };
                let mut group = Vec::new();
                for t in &targets {
                    let rule = match table.remove(&(trig.clone(), t.name.clone())) {
                        Some(r) => r,
                        None if default_frame => {
                            let params = params_of
                                .get(&trig)
                                .cloned()
                                .unwrap_or_else(|| default_params(inp.arity));
                            UpdateRule::frame(&t.name, t.kind, t.arity, trig.clone(), &params)
                        }
                        None => {
                            return Err(Error::Program(format!(
                                "no rule for `{}` on {trig}",
                                t.name
                            )))
                        }
                    };
                    group.push(compile_rule(&schema, &rule)?);
                    ordered.push(rule);
                }
                compiled.push(group);
            }
        }
        if let Some(((trig, target), _)) = table.into_iter().next() {
            return Err(Error::Program(format!("rule for `{target}` on unknown trigger {trig}")));
        }
        Ok(DynamicProgram {
            name: name.to_string(),
            schema,
            rules: ordered,
            query: query.to_string(),
            init,
            default_frame,
            query_slot,
            input_index,
            compiled,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    /// Rules in canonical order: by input relation, insertions first, then
    /// by declaration order of the target.
    pub fn rules(&self) -> &[UpdateRule] {
        &self.rules
    }

    pub fn rule(&self, target: &str, trigger: &Trigger) -> Option<&UpdateRule> {
        self.rules
            .iter()
            .find(|r| r.target == target && r.trigger == *trigger)
    }

    pub fn query(&self) -> &str {
        &self.query
    }

    pub fn init(&self) -> &InitSpec {
        &self.init
    }

    pub fn default_frame(&self) -> bool {
        self.default_frame
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// Same program with a different initialization.
    pub fn with_init(&self, init: InitSpec) -> DynamicProgram {
        let mut p = self.clone();
        p.init = init;
        p
    }

    /// The query relation holds (for a 0-ary query: the query bit).
    pub fn query_holds(&self, s: &State) -> bool {
        s.rel_bits(self.query_slot).contains(0)
    }

    pub fn query_tuples(&self, s: &State) -> Vec<Vec<Elem>> {
        s.tuples(self.query_slot)
    }

    pub fn query_arity(&self) -> usize {
        self.schema.relation_at(self.query_slot).arity
    }

    /// One update step: the input changes and every aux symbol is recomputed
    /// from the old state.
    pub fn apply(&self, s: &State, m: &Modification) -> Result<State> {
        let sym = self.schema.relation(&m.rel)?;
        let Some(&inp) = self.input_index.get(&sym.slot).filter(|_| sym.role == Role::Input) else {
            return Err(Error::schema(format!("`{}` is not an input relation", m.rel)));
        };
        let mut next = s.apply_input_modification(m)?;
        let group = &self.compiled[inp * 2 + usize::from(m.kind == ModKind::Del)];
        let n = s.size();
        let p = m.tuple.len();
        let mut env: Vec<Elem> = Vec::with_capacity(p + 4);
        env.extend_from_slice(&m.tuple);
        for rule in group {
            match rule {
                Compiled::Keep => {}
                Compiled::Rel { slot, arity, body } => {
                    env.resize(p + arity, 0);
                    let count = tuple_count(n, *arity);
                    let mut bits = FixedBitSet::with_capacity(count);
                    for idx in 0..count {
                        decode(n, idx, &mut env[p..]);
                        if body.eval(s, &env) {
                            bits.insert(idx);
                        }
                    }
                    next.set_rel_bits(*slot, bits);
                }
                Compiled::Fun { slot, arity, body } => {
                    env.resize(p + arity, 0);
                    let count = tuple_count(n, *arity);
                    let mut table = Vec::with_capacity(count);
                    for idx in 0..count {
                        decode(n, idx, &mut env[p..]);
                        table.push(body.eval(s, &env));
                    }
                    next.set_fun_table(*slot, table);
                }
            }
        }
        Ok(next)
    }

    /// All states along `seq`, starting with `s0`.
    pub fn run(&self, s0: &State, seq: &[Modification], honest_only: bool) -> Result<Vec<State>> {
        let mut trace = Vec::with_capacity(seq.len() + 1);
        trace.push(s0.clone());
        for (i, m) in seq.iter().enumerate() {
            let cur = trace.last().expect("non-empty trace");
            if honest_only && !cur.is_honest(m)? {
                return Err(Error::Dishonest {
                    step: i + 1,
                    msg: format!("{m} is not honest"),
                });
            }
            let next = self.apply(cur, m)?;
            trace.push(next);
        }
        Ok(trace)
    }

    pub fn run_final(&self, s0: &State, seq: &[Modification]) -> Result<State> {
        let mut cur = s0.clone();
        for m in seq {
            cur = self.apply(&cur, m)?;
        }
        Ok(cur)
    }

    /// A state with empty input and aux data and built-ins filled in.
    pub fn blank_state(&self, size: u32) -> Result<State> {
        let mut s = State::new(self.schema.clone(), size)?;
        fill_builtins(&mut s);
        Ok(s)
    }

    /// The initial state for the input database given as tuples.
    pub fn init_state(&self, size: u32, input: &[(String, Vec<Elem>)]) -> Result<State> {
        init::init_state(self, size, input)
    }

    /// The initial state for the input part of `db`.
    pub fn init_from(&self, db: &State) -> Result<State> {
        self.init_state(db.size(), &db.input_tuples())
    }

    pub fn max_aux_arity(&self) -> usize {
        self.schema.max_aux_arity()
    }

    /// True if the schema has no function symbols at all.
    pub fn is_relational(&self) -> bool {
        self.schema.num_functions() == 0
    }

    pub fn nesting_depth(&self) -> usize {
        self.rules
            .iter()
            .map(|r| match &r.body {
                RuleBody::Formula(f) => nesting_depth(f),
                RuleBody::Term(t) => nesting_depth_term(t),
            })
            .max()
            .unwrap_or(0)
    }

    /// Flags aggregated over every relation rule; function rules count as
    /// neither conjunctive nor negation-free.
    pub fn syntax_flags(&self) -> SyntaxFlags {
        let mut out = SyntaxFlags {
            negation_free: true,
            conjunctive: true,
            repeated_vars_in_atom: false,
        };
        for r in &self.rules {
            match &r.body {
                RuleBody::Formula(f) => {
                    let c = classify_syntax(f);
                    out.negation_free &= c.negation_free;
                    out.conjunctive &= c.conjunctive;
                    out.repeated_vars_in_atom |= c.repeated_vars_in_atom;
                }
                RuleBody::Term(_) => {
                    out.negation_free = false;
                    out.conjunctive = false;
                }
            }
        }
        out
    }

    /// Whether every function symbol is built-in and unary.
    pub fn only_unary_builtin_functions(&self) -> bool {
        self.schema
            .functions()
            .all(|f| f.role == Role::Builtin && f.arity == 1)
    }

    /// Names of all symbols that occur in some rule body.
    pub fn mentioned_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            let mut add = |s: &str| {
                out.insert(s.to_string());
            };
            match &r.body {
                RuleBody::Formula(f) => f.visit_symbols(&mut add),
                RuleBody::Term(t) => t.visit_symbols(&mut add),
            }
        }
        out
    }
}

fn validate_rule(schema: &Schema, rule: &UpdateRule) -> Result<()> {
    let trig = schema.relation(&rule.trigger.rel)?;
    if trig.role != Role::Input {
        return Err(Error::Program(format!("trigger `{}` is not an input relation", trig.name)));
    }
    let target = schema.lookup(&rule.target)?;
    if target.role != Role::Aux || target.kind == SymbolKind::Constant {
        return Err(Error::Program(format!(
            "rule target `{}` must be an aux relation or function",
            rule.target
        )));
    }
    if rule.params.len() != trig.arity {
        return Err(Error::Program(format!(
            "{} takes {} parameters, rule for `{}` has {}",
            rule.trigger,
            trig.arity,
            rule.target,
            rule.params.len()
        )));
    }
    if rule.vars.len() != target.arity {
        return Err(Error::Program(format!(
            "`{}` has arity {}, rule binds {} variables",
            rule.target,
            target.arity,
            rule.vars.len()
        )));
    }
    let scope = rule.vars_in_scope();
    let distinct: BTreeSet<&str> = scope.iter().copied().collect();
    if distinct.len() != scope.len() {
        return Err(Error::Program(format!(
            "rule for `{}` on {} repeats a variable name",
            rule.target, rule.trigger
        )));
    }
    let mut free = BTreeSet::new();
    match (&rule.body, target.kind) {
        (RuleBody::Formula(f), SymbolKind::Relation) => f.collect_vars(&mut free),
        (RuleBody::Term(t), SymbolKind::Function) => t.collect_vars(&mut free),
        _ => {
            return Err(Error::Program(format!(
                "rule body for `{}` does not match its kind",
                rule.target
            )))
        }
    }
    for v in free {
        if !distinct.contains(v.as_str()) && schema.constant(&v).is_err() {
            return Err(Error::UnboundVariable(v));
        }
    }
    Ok(())
}

fn compile_rule(schema: &Schema, rule: &UpdateRule) -> Result<Compiled> {
    if rule.is_frame() {
        return Ok(Compiled::Keep);
    }
    let scope = rule.vars_in_scope();
    let target = schema.lookup(&rule.target)?;
    Ok(match &rule.body {
        RuleBody::Formula(f) => Compiled::Rel {
            slot: target.slot,
            arity: target.arity,
            body: CompiledFormula::compile(f, schema, &scope)?,
        },
        RuleBody::Term(t) => Compiled::Fun {
            slot: target.slot,
            arity: target.arity,
            body: CompiledTerm::compile(t, schema, &scope)?,
        },
    })
}

/// Standard built-ins: clamped successor and predecessor, strict order.
pub(crate) fn fill_builtins(s: &mut State) {
    let schema = s.schema().clone();
    let n = s.size();
    for sym in schema.with_role(Role::Builtin) {
        match (sym.kind, sym.name.as_str()) {
            (SymbolKind::Function, "Succ") if sym.arity == 1 => {
                let table = (0..n).map(|i| (i + 1).min(n.saturating_sub(1))).collect();
                s.set_fun_table(sym.slot, table);
            }
            (SymbolKind::Function, "Pred") if sym.arity == 1 => {
                let table = (0..n).map(|i| i.saturating_sub(1)).collect();
                s.set_fun_table(sym.slot, table);
            }
            (SymbolKind::Relation, "Less") if sym.arity == 2 => {
                for i in 0..n {
                    for j in i + 1..n {
                        s.set(sym.slot, &[i, j], true);
                    }
                }
            }
            _ => {}
        }
    }
}
