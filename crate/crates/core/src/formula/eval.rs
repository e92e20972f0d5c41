use std::collections::HashMap;

use super::{Formula, Term};
use crate::error::{Error, Result};
use crate::structure::{Elem, Schema, State, SymbolKind};

/// Variable values, indexed by the positions fixed at compile time.
pub type Env = [Elem];

/// A term with symbols resolved to slots and variables to env positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompiledTerm {
    Var(usize),
    Const(usize),
    App(usize, Vec<CompiledTerm>),
    Ite(Box<CompiledFormula>, Box<CompiledTerm>, Box<CompiledTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompiledFormula {
    True,
    False,
    Atom(usize, Vec<CompiledTerm>),
    Eq(CompiledTerm, CompiledTerm),
    Not(Box<CompiledFormula>),
    And(Box<CompiledFormula>, Box<CompiledFormula>),
    Or(Box<CompiledFormula>, Box<CompiledFormula>),
}

fn var_index(vars: &[&str], name: &str) -> Option<usize> {
    vars.iter().position(|v| *v == name)
}

impl CompiledTerm {
    pub fn compile(t: &Term, schema: &Schema, vars: &[&str]) -> Result<CompiledTerm> {
        Ok(match t {
            Term::Var(v) => match var_index(vars, v) {
                Some(i) => CompiledTerm::Var(i),
                None => match schema.get(v) {
                    Some(sym) if sym.kind == SymbolKind::Constant => CompiledTerm::Const(sym.slot),
                    _ => return Err(Error::UnboundVariable(v.clone())),
                },
            },
            Term::Const(c) => {
                let sym = schema.lookup(c)?;
                match sym.kind {
                    SymbolKind::Constant => CompiledTerm::Const(sym.slot),
                    SymbolKind::Function if sym.arity == 0 => CompiledTerm::App(sym.slot, vec![]),
                    _ => return Err(Error::schema(format!("`{c}` is not a constant"))),
                }
            }
            Term::App(f, args) => {
                let sym = schema.function(f)?;
                if sym.arity != args.len() {
                    return Err(Error::schema(format!(
                        "`{f}` has arity {}, applied to {} arguments",
                        sym.arity,
                        args.len()
                    )));
                }
                let args = args
                    .iter()
                    .map(|a| CompiledTerm::compile(a, schema, vars))
                    .collect::<Result<_>>()?;
                CompiledTerm::App(sym.slot, args)
            }
            Term::Ite(c, a, b) => CompiledTerm::Ite(
                Box::new(CompiledFormula::compile(c, schema, vars)?),
                Box::new(CompiledTerm::compile(a, schema, vars)?),
                Box::new(CompiledTerm::compile(b, schema, vars)?),
            ),
        })
    }

    #[inline]
    pub fn eval(&self, s: &State, env: &Env) -> Elem {
        match self {
            CompiledTerm::Var(i) => env[*i],
            CompiledTerm::Const(c) => s.constant(*c),
            CompiledTerm::App(f, args) => {
                let n = s.size() as usize;
                let idx = args
                    .iter()
                    .fold(0usize, |acc, a| acc * n + a.eval(s, env) as usize);
                s.fun_table(*f)[idx]
            }
            // The branch not taken is never evaluated.
            CompiledTerm::Ite(c, a, b) => {
                if c.eval(s, env) {
                    a.eval(s, env)
                } else {
                    b.eval(s, env)
                }
            }
        }
    }
}

impl CompiledFormula {
    pub fn compile(f: &Formula, schema: &Schema, vars: &[&str]) -> Result<CompiledFormula> {
        Ok(match f {
            Formula::True => CompiledFormula::True,
            Formula::False => CompiledFormula::False,
            Formula::Atom(r, args) => {
                let sym = schema.relation(r)?;
                if sym.arity != args.len() {
                    return Err(Error::schema(format!(
                        "`{r}` has arity {}, used with {} arguments",
                        sym.arity,
                        args.len()
                    )));
                }
                let args = args
                    .iter()
                    .map(|a| CompiledTerm::compile(a, schema, vars))
                    .collect::<Result<_>>()?;
                CompiledFormula::Atom(sym.slot, args)
            }
            Formula::Eq(a, b) => CompiledFormula::Eq(
                CompiledTerm::compile(a, schema, vars)?,
                CompiledTerm::compile(b, schema, vars)?,
            ),
            Formula::Not(g) => CompiledFormula::Not(Box::new(Self::compile(g, schema, vars)?)),
            Formula::And(a, b) => CompiledFormula::And(
                Box::new(Self::compile(a, schema, vars)?),
                Box::new(Self::compile(b, schema, vars)?),
            ),
            Formula::Or(a, b) => CompiledFormula::Or(
                Box::new(Self::compile(a, schema, vars)?),
                Box::new(Self::compile(b, schema, vars)?),
            ),
        })
    }

    #[inline]
    pub fn eval(&self, s: &State, env: &Env) -> bool {
        match self {
            CompiledFormula::True => true,
            CompiledFormula::False => false,
            CompiledFormula::Atom(r, args) => {
                let n = s.size() as usize;
                let idx = args
                    .iter()
                    .fold(0usize, |acc, a| acc * n + a.eval(s, env) as usize);
                s.holds_idx(*r, idx)
            }
            CompiledFormula::Eq(a, b) => a.eval(s, env) == b.eval(s, env),
            CompiledFormula::Not(g) => !g.eval(s, env),
            CompiledFormula::And(a, b) => a.eval(s, env) && b.eval(s, env),
            CompiledFormula::Or(a, b) => a.eval(s, env) || b.eval(s, env),
        }
    }
}

fn split_assignment(asg: &HashMap<String, Elem>, s: &State) -> Result<(Vec<String>, Vec<Elem>)> {
    let mut names: Vec<String> = asg.keys().cloned().collect();
    names.sort();
    let mut values = Vec::with_capacity(names.len());
    for n in &names {
        let v = asg[n];
        if !s.contains(v) {
            return Err(Error::Domain(format!("`{n}` is assigned {v}, outside the domain")));
        }
        values.push(v);
    }
    Ok((names, values))
}

/// Evaluates `f` in `s` under `asg`.
pub fn eval_formula(f: &Formula, s: &State, asg: &HashMap<String, Elem>) -> Result<bool> {
    let (names, values) = split_assignment(asg, s)?;
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Ok(CompiledFormula::compile(f, s.schema(), &refs)?.eval(s, &values))
}

/// Evaluates `t` in `s` under `asg`.
pub fn eval_term(t: &Term, s: &State, asg: &HashMap<String, Elem>) -> Result<Elem> {
    let (names, values) = split_assignment(asg, s)?;
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Ok(CompiledTerm::compile(t, s.schema(), &refs)?.eval(s, &values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn asg(pairs: &[(&str, Elem)]) -> HashMap<String, Elem> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    fn state() -> State {
        let schema = Schema::builder()
            .input("U", 1)
            .input("E", 2)
            .aux("C", 1)
            .aux_fun("g", 1)
            .builtin_fun("Succ", 1)
            .builtin_fun("Pred", 1)
            .build()
            .unwrap();
        let mut s = State::new(Arc::new(schema), 3).unwrap();
        s.set_named("U", &[0], true).unwrap();
        s.set_named("E", &[0, 1], true).unwrap();
        s.set_named("C", &[0], true).unwrap();
        s.set_fun_named("g", &[0], 1).unwrap();
        for i in 0..3 {
            s.set_fun_named("Succ", &[i], (i + 1).min(2)).unwrap();
            s.set_fun_named("Pred", &[i], i.saturating_sub(1)).unwrap();
        }
        s
    }

    #[test]
    fn equality_and_literals() {
        let s = state();
        let f = Formula::eq(v("x"), v("y"));
        assert!(eval_formula(&f, &s, &asg(&[("x", 0), ("y", 0)])).unwrap());
        let g = Formula::and(
            Formula::atom_vars("U", &["x"]),
            Formula::not(Formula::atom_vars("U", &["y"])),
        );
        assert!(eval_formula(&g, &s, &asg(&[("x", 0), ("y", 1)])).unwrap());
    }

    #[test]
    fn term_before_membership() {
        let s = state();
        let f = Formula::atom("E", vec![v("x"), Term::app("g", vec![v("x")])]);
        assert!(eval_formula(&f, &s, &asg(&[("x", 0)])).unwrap());
    }

    #[test]
    fn terms_and_ite() {
        let s = state();
        let t = Term::ite(Formula::True, v("x"), v("y"));
        assert_eq!(eval_term(&t, &s, &asg(&[("x", 0), ("y", 1)])).unwrap(), 0);
        let ss = Term::app("Succ", vec![Term::app("Succ", vec![v("z")])]);
        assert_eq!(eval_term(&ss, &s, &asg(&[("z", 0)])).unwrap(), 2);
        let pred = Term::app("Pred", vec![v("x")]);
        let t = Term::ite(Formula::atom("C", vec![pred.clone()]), v("x"), pred);
        assert_eq!(eval_term(&t, &s, &asg(&[("x", 1)])).unwrap(), 1);
    }

    #[test]
    fn errors() {
        let s = state();
        assert!(matches!(
            eval_formula(&Formula::atom_vars("U", &["x"]), &s, &asg(&[])),
            Err(Error::UnboundVariable(_))
        ));
        assert!(matches!(
            eval_formula(&Formula::atom_vars("Nope", &["x"]), &s, &asg(&[("x", 0)])),
            Err(Error::UnknownSymbol(_))
        ));
    }
}
