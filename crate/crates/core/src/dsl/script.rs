//! Modification scripts: an optional domain size, an optional initial
//! database or graph literal, then `ins`/`del` lines.
//!
//! ```text
//! domain 4
//! graph { nodes 5; const s=0 t=4; edges (0,1) (1,4) }
//! ins E(s, a)
//! del E(0, 1)
//! ```
//!
//! Numbers are element ids; constant names resolve through the program's
//! bindings; any other name gets the least id not otherwise used.

use std::collections::BTreeSet;

use super::lexer::Tok;
use super::parser::Cursor;
use crate::error::{Error, ParseError, Result};
use crate::structure::{Elem, ModKind, Modification, Role, Schema};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Script {
    pub size: u32,
    pub initial: Vec<(String, Vec<Elem>)>,
    pub mods: Vec<Modification>,
    /// Named elements and the ids they were given.
    pub names: Vec<(String, Elem)>,
}

#[derive(Debug, Clone)]
enum Ref {
    Id(u32),
    Name(String),
}

struct RawFact {
    rel: String,
    args: Vec<Ref>,
    pos: (usize, usize),
}

pub fn parse_script(src: &str, schema: &Schema) -> Result<Script> {
    let mut c = Cursor::new(src)?;
    let mut size: Option<u32> = None;
    let mut graph_consts: Vec<(String, u32, (usize, usize))> = Vec::new();
    let mut initial: Vec<RawFact> = Vec::new();
    let mut mods: Vec<(ModKind, RawFact)> = Vec::new();
    while !c.at_eof() {
        let at = c.here();
        let word = c.ident()?;
        match word.as_str() {
            "domain" => {
                if !mods.is_empty() {
                    return Err(ParseError { line: at.0, col: at.1, msg: "`domain` must precede modifications".into() }.into());
                }
                size = Some(c.number()?);
            }
            "db" => {
                c.expect(Tok::LBrace)?;
                while !c.eat(&Tok::RBrace) {
                    initial.push(fact(&mut c)?);
                    c.eat(&Tok::Comma);
                }
            }
            "graph" => {
                c.expect(Tok::LBrace)?;
                while !c.eat(&Tok::RBrace) {
                    let item = c.ident()?;
                    match item.as_str() {
                        "nodes" => size = Some(c.number()?),
                        "const" => {
                            while let Tok::Ident(_) = c.peek() {
                                let pos = c.here();
                                let name = c.ident()?;
                                c.expect(Tok::Eq)?;
                                graph_consts.push((name, c.number()?, pos));
                            }
                        }
                        "edges" => {
                            while *c.peek() == Tok::LParen {
                                let pos = c.here();
                                c.next();
                                let a = elem_ref(&mut c)?;
                                c.expect(Tok::Comma)?;
                                let b = elem_ref(&mut c)?;
                                c.expect(Tok::RParen)?;
                                initial.push(RawFact {
                                    rel: "E".into(),
                                    args: vec![a, b],
                                    pos,
                                });
                            }
                        }
                        other => return Err(c.error_here(format!("unknown graph item `{other}`")).into()),
                    }
                    c.eat(&Tok::Semi);
                }
            }
            "ins" => mods.push((ModKind::Ins, fact(&mut c)?)),
            "del" => mods.push((ModKind::Del, fact(&mut c)?)),
            other => {
                return Err(ParseError {
                    line: at.0,
                    col: at.1,
                    msg: format!("expected `ins`, `del`, `domain`, `db` or `graph`, found `{other}`"),
                }
                .into())
            }
        }
    }

    let all = initial.iter().chain(mods.iter().map(|(_, f)| f));
    for f in all.clone() {
        let err = |msg: String| -> Error {
            ParseError {
                line: f.pos.0,
                col: f.pos.1,
                msg,
            }
            .into()
        };
        let sym = schema.get(&f.rel).ok_or_else(|| err(format!("unknown relation `{}`", f.rel)))?;
        if sym.role != Role::Input {
            return Err(err(format!("`{}` is not an input relation", f.rel)));
        }
        if sym.arity != f.args.len() {
            return Err(err(format!("`{}` has arity {}, got {}", f.rel, sym.arity, f.args.len())));
        }
    }
    let mut numbers = BTreeSet::new();
    let mut names: Vec<String> = Vec::new();
    for f in all.clone() {
        for a in &f.args {
            match a {
                Ref::Id(n) => {
                    numbers.insert(*n);
                }
                Ref::Name(n) if schema.constant(n).is_ok() => {}
                Ref::Name(n) => {
                    if !names.contains(n) {
                        names.push(n.clone());
                    }
                }
            }
        }
    }
    let n = match size {
        Some(n) => n,
        None => {
            let mut n = numbers.iter().next_back().map(|m| m + 1).unwrap_or(1).max(1);
            loop {
                if let Ok(consts) = const_ids(schema, n) {
                    let used: BTreeSet<u32> = numbers.iter().copied().chain(consts).collect();
                    if (n as usize).saturating_sub(used.len()) >= names.len() {
                        break n;
                    }
                }
                n += 1;
            }
        }
    };
    let consts = const_ids(schema, n)?;
    for (name, id, pos) in &graph_consts {
        let bound = schema
            .constant(name)
            .map_err(|_| -> Error { ParseError { line: pos.0, col: pos.1, msg: format!("unknown constant `{name}`") }.into() })?;
        if consts[bound.slot] != *id {
            return Err(ParseError {
                line: pos.0,
                col: pos.1,
                msg: format!("graph sets {name}={id}, but the program binds it to {}", consts[bound.slot]),
            }
            .into());
        }
    }
    let used: BTreeSet<u32> = numbers.iter().copied().chain(consts.iter().copied()).collect();
    let mut free = (0..n).filter(|e| !used.contains(e));
    let mut assigned = Vec::new();
    for name in &names {
        let id = free.next().ok_or_else(|| {
            Error::Domain(format!("domain of size {n} has no room for element `{name}`"))
        })?;
        assigned.push((name.clone(), id));
    }
    let resolve = |f: &RawFact| -> Result<Vec<Elem>> {
        f.args
            .iter()
            .map(|a| {
                let e = match a {
                    Ref::Id(i) => *i,
                    Ref::Name(nm) => match schema.constant(nm) {
                        Ok(sym) => consts[sym.slot],
                        Err(_) => assigned.iter().find(|(x, _)| x == nm).expect("assigned").1,
                    },
                };
                if e >= n {
                    return Err(ParseError {
                        line: f.pos.0,
                        col: f.pos.1,
                        msg: format!("element {e} outside domain of size {n}"),
                    }
                    .into());
                }
                Ok(e)
            })
            .collect()
    };
    Ok(Script {
        size: n,
        initial: initial
            .iter()
            .map(|f| Ok((f.rel.clone(), resolve(f)?)))
            .collect::<Result<_>>()?,
        mods: mods
            .iter()
            .map(|(k, f)| {
                Ok(Modification {
                    kind: *k,
                    rel: f.rel.clone(),
                    tuple: resolve(f)?,
                })
            })
            .collect::<Result<_>>()?,
        names: assigned,
    })
}

fn const_ids(schema: &Schema, n: u32) -> Result<Vec<Elem>> {
    (0..schema.num_constants())
        .map(|c| schema.binding(c).resolve(n))
        .collect()
}

fn elem_ref(c: &mut Cursor) -> std::result::Result<Ref, ParseError> {
    match c.peek().clone() {
        Tok::Num(n) => {
            c.next();
            Ok(Ref::Id(n))
        }
        Tok::Ident(_) => Ok(Ref::Name(c.ident()?)),
        other => c.fail(format!("expected element, found {}", other.describe())),
    }
}

fn fact(c: &mut Cursor) -> std::result::Result<RawFact, ParseError> {
    let pos = c.here();
    let rel = c.ident()?;
    let mut args = Vec::new();
    if c.eat(&Tok::LParen) {
        while !c.eat(&Tok::RParen) {
            args.push(elem_ref(c)?);
            if !c.eat(&Tok::Comma) && *c.peek() != Tok::RParen {
                return c.fail(format!("expected `,` or `)`, found {}", c.peek().describe()));
            }
        }
    }
    Ok(RawFact { rel, args, pos })
}

/// Prints modifications one per line, in script syntax.
pub fn print_script(size: u32, initial: &[(String, Vec<Elem>)], mods: &[Modification]) -> String {
    let mut out = format!("domain {size}\n");
    if !initial.is_empty() {
        let facts: Vec<String> = initial
            .iter()
            .map(|(r, t)| format!("{r}({})", t.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        out.push_str(&format!("db {{ {} }}\n", facts.join(", ")));
    }
    for m in mods {
        out.push_str(&format!("{m}\n"));
    }
    out
}
