use std::fmt::{self, Write};

use itertools::Itertools;

use crate::program::{default_params, DynamicProgram, RuleBody, UpdateRule};
use crate::structure::{ConstBinding, ModKind, Role, Symbol, SymbolKind};

fn decl(s: &Symbol) -> String {
    match s.kind {
        SymbolKind::Function => format!("fun {}/{}", s.name, s.arity),
        _ => format!("{}/{}", s.name, s.arity),
    }
}

fn head(name: &str, vars: &[String]) -> String {
    if vars.is_empty() {
        name.to_string()
    } else {
        format!("{name}({})", vars.join(", "))
    }
}

fn is_default_frame(r: &UpdateRule, kind: SymbolKind) -> bool {
    *r == UpdateRule::frame(&r.target, kind, r.vars.len(), r.trigger.clone(), &r.params)
}

/// The canonical `.dynp` text; `parse_program` of the output yields a
/// structurally equal program.
pub fn print_program(p: &DynamicProgram) -> String {
    let mut out = String::new();
    write_program(p, &mut out).expect("writing to a String");
    out
}

fn write_program(p: &DynamicProgram, out: &mut String) -> fmt::Result {
    let schema = p.schema();
    writeln!(out, "program {}", p.name())?;
    let section = |role: Role| -> Vec<String> {
        schema
            .with_role(role)
            .filter(|s| s.kind != SymbolKind::Constant)
            .map(decl)
            .collect()
    };
    writeln!(out, "input {{ {} }}", section(Role::Input).join(", "))?;
    writeln!(out, "aux {{ {} }}", section(Role::Aux).join(", "))?;
    let builtins = section(Role::Builtin);
    if !builtins.is_empty() {
        writeln!(out, "builtin {{ {} }}", builtins.join(", "))?;
    }
    if schema.num_constants() > 0 {
        let consts = schema
            .constants()
            .map(|c| match schema.binding(c.slot) {
                ConstBinding::Index(i) => format!("{} = {i}", c.name),
                ConstBinding::Last => format!("{} = last", c.name),
            })
            .join(", ");
        writeln!(out, "const {consts}")?;
    }
    writeln!(out, "query {}", p.query())?;
    writeln!(out, "init {}", p.init())?;
    if p.default_frame() {
        writeln!(out, "default frame")?;
    }
    for inp in schema.with_role(Role::Input) {
        for kind in [ModKind::Ins, ModKind::Del] {
            let group: Vec<&UpdateRule> = p
                .rules()
                .iter()
                .filter(|r| r.trigger.rel == inp.name && r.trigger.kind == kind)
                .collect();
            let Some(first) = group.first() else { continue };
            let params = &first.params;
            let kind_of = |r: &UpdateRule| schema.get(&r.target).map(|s| s.kind).unwrap_or(SymbolKind::Relation);
            let mut shown: Vec<&UpdateRule> = group
                .iter()
                .copied()
                .filter(|r| !(p.default_frame() && is_default_frame(r, kind_of(r))))
                .collect();
            if shown.is_empty() {
                if *params == default_params(inp.arity) {
                    continue;
                }
                shown.push(first);
            }
            let word = match kind {
                ModKind::Ins => "insert",
                ModKind::Del => "delete",
            };
            writeln!(out, "\non {word} {}:", head(&inp.name, params))?;
            for r in shown {
                match &r.body {
                    RuleBody::Formula(f) => writeln!(out, "  {}: {f}", head(&r.target, &r.vars))?,
                    RuleBody::Term(t) => {
                        let h = if r.vars.is_empty() {
                            format!("{}()", r.target)
                        } else {
                            head(&r.target, &r.vars)
                        };
                        writeln!(out, "  {h} := {t}")?
                    }
                }
            }
        }
    }
    Ok(())
}

impl fmt::Display for DynamicProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_program(self))
    }
}

