use std::collections::{BTreeMap, HashMap, HashSet};

use itertools::Itertools;

use super::{DynamicProgram, InitSpec, InitTable, RuleBody, TableArg, TableEntry, UpdateRule};
use crate::error::{Error, Result};
use crate::formula::{atom_repeats_var, equality_type_of, EqualityType, Formula, Term};
use crate::structure::{Role, Schema, SchemaBuilder, State, SymbolKind};

pub const C_TOP: &str = "c_top";
pub const C_BOT: &str = "c_bot";

fn fresh(taken: &mut HashSet<String>, base: String) -> String {
    let mut name = base;
    while taken.contains(&name) {
        name.push('_');
    }
    taken.insert(name.clone());
    name
}

/// Symbols grouped input, aux (with `extra` appended), built-in, constants.
/// Aux relations named in `to_fun` become aux functions.
fn regroup(
    schema: &Schema,
    to_fun: &HashMap<String, String>,
    extra: &[(String, SymbolKind, usize)],
) -> SchemaBuilder {
    let mut b = SchemaBuilder::default();
    let add = |b: SchemaBuilder, name: &str, kind: SymbolKind, arity: usize, role: Role| match kind {
        SymbolKind::Relation => b.relation(name, arity, role),
        _ => b.function(name, arity, role),
    };
    for role in [Role::Input, Role::Aux, Role::Builtin] {
        for sym in schema.with_role(role).filter(|s| s.kind != SymbolKind::Constant) {
            b = match to_fun.get(&sym.name) {
                Some(f) => b.aux_fun(f, sym.arity),
                None => add(b, &sym.name, sym.kind, sym.arity, role),
            };
        }
        if role == Role::Aux {
            for (name, kind, arity) in extra {
                b = add(b, name, *kind, *arity, Role::Aux);
            }
        }
    }
    for c in schema.constants() {
        b = b.constant(&c.name, Some(schema.binding(c.slot)));
    }
    b
}

fn bell(n: usize) -> usize {
    let mut row = vec![1usize];
    for _ in 0..n {
        let mut next = vec![*row.last().expect("non-empty row")];
        for v in &row {
            next.push(next.last().expect("non-empty row") + v);
        }
        row = next;
    }
    row[0]
}

fn arg_type(args: &[Term]) -> EqualityType {
    let labels: Vec<String> = args
        .iter()
        .enumerate()
        .map(|(i, a)| match a {
            Term::Var(v) => format!("v:{v}"),
            _ => format!("p:{i}"),
        })
        .collect();
    equality_type_of(&labels)
}

fn class_reps(rho: &EqualityType) -> Vec<usize> {
    rho.blocks().iter().map(|b| b[0]).collect()
}

struct Derived {
    name: String,
    base: String,
    rho: EqualityType,
}

/// Rewrites every aux atom with a repeated variable `R(x,x,y)` into an atom
/// `R__112(x,y)` over a fresh symbol per equality type, iterating until no
/// aux atom repeats a variable.
pub fn eliminate_repeated_variables(p: &DynamicProgram) -> Result<DynamicProgram> {
    let schema = p.schema().clone();
    if schema.num_functions() > 0 {
        return Err(Error::Unsupported(
            "repeated-variable elimination needs a program without function symbols".into(),
        ));
    }
    let cap: usize = schema
        .relations()
        .filter(|r| r.role == Role::Aux)
        .map(|r| bell(r.arity))
        .sum();
    let mut taken: HashSet<String> = schema.symbols().iter().map(|s| s.name.clone()).collect();
    let mut by_type: HashMap<(String, Vec<usize>), usize> = HashMap::new();
    let mut derived: Vec<Derived> = Vec::new();
    let mut rules: Vec<UpdateRule> = p.rules().to_vec();
    let mut i = 0;
    while i < rules.len() {
        let mut pending: Vec<usize> = Vec::new();
        let RuleBody::Formula(body) = &rules[i].body else {
            unreachable!("relational program");
        };
        let mut err = None;
        let rewritten = body.map_atoms(&mut |rel, args| {
            let is_aux = schema.get(rel).is_some_and(|s| s.role == Role::Aux);
            if !is_aux || !atom_repeats_var(args) {
                return Formula::Atom(rel.to_string(), args.to_vec());
            }
            let rho = arg_type(args);
            let key = (rel.to_string(), rho.classes());
            let idx = match by_type.get(&key) {
                Some(&idx) => idx,
                None => {
                    if derived.len() >= cap {
                        err = Some(Error::Resource(format!(
                            "repeated-variable elimination exceeded {cap} derived symbols"
                        )));
                    }
                    let suffix = rho.classes().iter().map(|c| c + 1).join("");
                    let name = fresh(&mut taken, format!("{rel}__{suffix}"));
                    derived.push(Derived {
                        name,
                        base: rel.to_string(),
                        rho: rho.clone(),
                    });
                    by_type.insert(key, derived.len() - 1);
                    pending.push(derived.len() - 1);
                    derived.len() - 1
                }
            };
            let reps = class_reps(&derived[idx].rho);
            Formula::Atom(
                derived[idx].name.clone(),
                reps.iter().map(|&r| args[r].clone()).collect(),
            )
        });
        if let Some(e) = err {
            return Err(e);
        }
        rules[i].body = RuleBody::Formula(rewritten);
        for idx in pending {
            let d = &derived[idx];
            let reps = class_reps(&d.rho);
            for r in p.rules().iter().filter(|r| r.target == d.base) {
                let classes = d.rho.classes();
                let rename: BTreeMap<&str, Term> = r
                    .vars
                    .iter()
                    .enumerate()
                    .map(|(j, v)| (v.as_str(), Term::Var(r.vars[reps[classes[j]]].clone())))
                    .collect();
                let RuleBody::Formula(f) = &r.body else {
                    unreachable!("relational program");
                };
                let body = f.rename_vars(&|v| rename.get(v).cloned());
                rules.push(UpdateRule {
                    target: d.name.clone(),
                    trigger: r.trigger.clone(),
                    params: r.params.clone(),
                    vars: reps.iter().map(|&k| r.vars[k].clone()).collect(),
                    body: RuleBody::Formula(body),
                });
            }
        }
        i += 1;
    }
    if derived.is_empty() {
        return Ok(p.clone());
    }
    let extra: Vec<(String, SymbolKind, usize)> = derived
        .iter()
        .map(|d| (d.name.clone(), SymbolKind::Relation, d.rho.num_classes()))
        .collect();
    let builder = regroup(&schema, &HashMap::new(), &extra);
    let init = match p.init() {
        InitSpec::Empty => InitSpec::Empty,
        InitSpec::Oracle { base: None } => InitSpec::Oracle { base: None },
        InitSpec::Oracle { base: Some(t) } => InitSpec::Oracle {
            base: Some(derive_table(t, &derived)?),
        },
        InitSpec::Table(t) => InitSpec::Table(derive_table(t, &derived)?),
        InitSpec::Builtin(name) => {
            return Err(Error::Unsupported(format!(
                "cannot extend built-in initializer `{name}` to derived symbols"
            )))
        }
    };
    DynamicProgram::new(p.name(), builder.build()?, rules, p.query(), init, p.default_frame())
}

fn derive_table(t: &InitTable, derived: &[Derived]) -> Result<InitTable> {
    let mut entries = t.entries.clone();
    for e in &t.entries {
        let TableEntry::Fact { rel, args } = e else {
            continue;
        };
        for d in derived.iter().filter(|d| d.base == *rel) {
            let mut out = Vec::new();
            let mut consistent = true;
            for block in d.rho.blocks() {
                let fixed: Vec<&TableArg> = block
                    .iter()
                    .map(|&k| &args[k])
                    .filter(|a| **a != TableArg::Any)
                    .unique()
                    .collect();
                match fixed.as_slice() {
                    [] => out.push(TableArg::Any),
                    [one] => out.push((*one).clone()),
                    many if many.iter().all(|a| matches!(a, TableArg::Elem(_))) => {
                        consistent = false;
                    }
                    _ => {
                        return Err(Error::Unsupported(format!(
                            "cannot project init entry {e} onto `{}`",
                            d.name
                        )))
                    }
                }
            }
            if consistent {
                entries.push(TableEntry::Fact {
                    rel: d.name.clone(),
                    args: out,
                });
            }
        }
    }
    Ok(InitTable::new(entries))
}

/// Replaces every aux relation except the query by a function `f_R` with
/// `f_R(a) = c_top` iff `a` is in `R`. Programs without such relations are
/// returned unchanged.
pub fn relations_to_functions(p: &DynamicProgram) -> Result<DynamicProgram> {
    let schema = p.schema().clone();
    let targets: Vec<String> = schema
        .relations()
        .filter(|r| r.role == Role::Aux && r.name != p.query())
        .map(|r| r.name.clone())
        .collect();
    if targets.is_empty() {
        return Ok(p.clone());
    }
    let mut taken: HashSet<String> = schema.symbols().iter().map(|s| s.name.clone()).collect();
    for c in [C_TOP, C_BOT] {
        if taken.contains(c) {
            return Err(Error::Unsupported(format!("symbol `{c}` already declared")));
        }
    }
    taken.insert(C_TOP.into());
    taken.insert(C_BOT.into());
    let fun_of: HashMap<String, String> = targets
        .iter()
        .map(|r| (r.clone(), fresh(&mut taken, format!("f_{r}"))))
        .collect();

    let extra = vec![
        (C_TOP.to_string(), SymbolKind::Function, 0),
        (C_BOT.to_string(), SymbolKind::Function, 0),
    ];
    let new_schema = regroup(&schema, &fun_of, &extra).build()?;

    let top = || Term::App(C_TOP.into(), vec![]);
    let bot = || Term::App(C_BOT.into(), vec![]);
    let mut rewrite = |rel: &str, args: &[Term]| match fun_of.get(rel) {
        Some(f) => Formula::Eq(Term::App(f.clone(), args.to_vec()), top()),
        None => Formula::Atom(rel.to_string(), args.to_vec()),
    };

    let mut rules = Vec::new();
    let mut seen_triggers = Vec::new();
    for r in p.rules() {
        if !seen_triggers.contains(&r.trigger) {
            seen_triggers.push(r.trigger.clone());
            for c in [C_TOP, C_BOT] {
                rules.push(UpdateRule::frame(c, SymbolKind::Function, 0, r.trigger.clone(), &r.params));
            }
        }
        if let Some(f) = fun_of.get(&r.target) {
            if r.is_frame() {
                rules.push(UpdateRule::frame(f, SymbolKind::Function, r.vars.len(), r.trigger.clone(), &r.params));
                continue;
            }
            let RuleBody::Formula(body) = &r.body else {
                unreachable!("relation rules have formula bodies");
            };
            rules.push(UpdateRule {
                target: f.clone(),
                trigger: r.trigger.clone(),
                params: r.params.clone(),
                vars: r.vars.clone(),
                body: RuleBody::Term(Term::ite(body.map_atoms(&mut rewrite), top(), bot())),
            });
        } else {
            let body = match &r.body {
                RuleBody::Formula(f) => RuleBody::Formula(f.map_atoms(&mut rewrite)),
                RuleBody::Term(t) => RuleBody::Term(t.map_atoms(&mut rewrite)),
            };
            rules.push(UpdateRule { body, ..r.clone() });
        }
    }

    let encode = |t: Option<&InitTable>| -> InitTable {
        let mut entries = vec![
            TableEntry::Value {
                fun: C_TOP.into(),
                args: vec![],
                value: TableArg::Elem(0),
            },
            TableEntry::Value {
                fun: C_BOT.into(),
                args: vec![],
                value: TableArg::Elem(1),
            },
        ];
        for r in &targets {
            entries.push(TableEntry::Value {
                fun: fun_of[r].clone(),
                args: vec![TableArg::Any; schema.relation(r).map(|s| s.arity).unwrap_or(0)],
                value: TableArg::Elem(1),
            });
        }
        for e in t.map(|t| t.entries.as_slice()).unwrap_or(&[]) {
            entries.push(match e {
                TableEntry::Fact { rel, args } if fun_of.contains_key(rel) => TableEntry::Value {
                    fun: fun_of[rel].clone(),
                    args: args.clone(),
                    value: TableArg::Elem(0),
                },
                other => other.clone(),
            });
        }
        InitTable::new(entries)
    };
    let init = match p.init() {
        InitSpec::Empty => InitSpec::Table(encode(None)),
        InitSpec::Table(t) => InitSpec::Table(encode(Some(t))),
        InitSpec::Oracle { base } => InitSpec::Oracle {
            base: Some(encode(base.as_ref())),
        },
        InitSpec::Builtin(name) => {
            return Err(Error::Unsupported(format!(
                "cannot encode built-in initializer `{name}` as functions"
            )))
        }
    };
    DynamicProgram::new(p.name(), new_schema, rules, p.query(), init, p.default_frame())
}

/// Reads a state of `relations_to_functions(orig)` back as a state of
/// `orig`: `a` is in `R` iff `f_R(a) = c_top`.
pub fn decode_relations(orig: &DynamicProgram, s: &State) -> Result<State> {
    let target: &Schema = orig.schema();
    let src = s.schema().clone();
    let mut out = State::new(orig.schema().clone(), s.size())?;
    let top = s.fun_named(C_TOP, &[])?;
    for r in target.relations() {
        match src.get(&r.name) {
            Some(sym) if sym.kind == SymbolKind::Relation => {
                out.set_rel_bits(r.slot, s.rel_bits(sym.slot).clone());
            }
            _ => {
                let f = src.function(&format!("f_{}", r.name))?;
                for t in out.all_tuples(r.arity) {
                    if s.fun(f.slot, &t) == top {
                        out.set(r.slot, &t, true);
                    }
                }
            }
        }
    }
    for f in target.functions() {
        let sym = src.function(&f.name)?;
        out.set_fun_table(f.slot, s.fun_table(sym.slot).to_vec());
    }
    out.set_constants(s.constants().to_vec());
    Ok(out)
}
