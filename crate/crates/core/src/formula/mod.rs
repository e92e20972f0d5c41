//! Quantifier-free formulas and update terms.

mod eval;
mod measure;
mod print;

pub use eval::{eval_formula, eval_term, CompiledFormula, CompiledTerm, Env};
pub use measure::{
    atom_repeats_var, classify_syntax, equality_type_of, nesting_depth, nesting_depth_term, terms_up_to_depth,
    EqualityType, SyntaxFlags, DEFAULT_TERM_CAP,
};

use std::collections::BTreeSet;

/// An update term: variable, constant, function application or `ite`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    App(String, Vec<Term>),
    Ite(Box<Formula>, Box<Term>, Box<Term>),
}

/// A quantifier-free formula. There is no quantifier node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(f.to_string(), args)
    }

    pub fn ite(cond: Formula, then: Term, other: Term) -> Term {
        Term::Ite(Box::new(cond), Box::new(then), Box::new(other))
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Term::Ite(c, a, b) => {
                c.collect_vars(out);
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Replaces variables according to `f`; unmapped variables stay.
    pub fn rename_vars(&self, f: &impl Fn(&str) -> Option<Term>) -> Term {
        match self {
            Term::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            Term::Const(_) => self.clone(),
            Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| a.rename_vars(f)).collect()),
            Term::Ite(c, a, b) => Term::ite(c.rename_vars(f), a.rename_vars(f), b.rename_vars(f)),
        }
    }

    /// Rewrites every atom inside (through `ite` conditions).
    pub fn map_atoms(&self, f: &mut impl FnMut(&str, &[Term]) -> Formula) -> Term {
        match self {
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| a.map_atoms(f)).collect()),
            Term::Ite(c, a, b) => Term::ite(c.map_atoms(f), a.map_atoms(f), b.map_atoms(f)),
        }
    }

    pub(crate) fn visit_symbols(&self, out: &mut dyn FnMut(&str)) {
        match self {
            Term::Var(_) => {}
            Term::Const(c) => out(c),
            Term::App(g, args) => {
                out(g);
                args.iter().for_each(|a| a.visit_symbols(out));
            }
            Term::Ite(c, a, b) => {
                c.visit_symbols(out);
                a.visit_symbols(out);
                b.visit_symbols(out);
            }
        }
    }
}

impl Formula {
    pub fn atom(rel: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(rel.to_string(), args)
    }

    /// Atom whose arguments are all variables.
    pub fn atom_vars(rel: &str, vars: &[&str]) -> Formula {
        Formula::Atom(rel.to_string(), vars.iter().map(|v| Term::var(v)).collect())
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn ne(a: Term, b: Term) -> Formula {
        Formula::Not(Box::new(Formula::Eq(a, b)))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `True` for an empty list.
    pub fn and_all(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `False` for an empty list.
    pub fn or_all(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Formula::Eq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn rename_vars(&self, f: &impl Fn(&str) -> Option<Term>) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(r, args) => {
                Formula::Atom(r.clone(), args.iter().map(|a| a.rename_vars(f)).collect())
            }
            Formula::Eq(a, b) => Formula::Eq(a.rename_vars(f), b.rename_vars(f)),
            Formula::Not(g) => Formula::not(g.rename_vars(f)),
            Formula::And(a, b) => Formula::and(a.rename_vars(f), b.rename_vars(f)),
            Formula::Or(a, b) => Formula::or(a.rename_vars(f), b.rename_vars(f)),
        }
    }

    /// Rewrites every relation atom, including atoms inside `ite` terms.
    pub fn map_atoms(&self, f: &mut impl FnMut(&str, &[Term]) -> Formula) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(r, args) => {
                let args: Vec<Term> = args.iter().map(|a| a.map_atoms(f)).collect();
                f(r, &args)
            }
            Formula::Eq(a, b) => Formula::Eq(a.map_atoms(f), b.map_atoms(f)),
            Formula::Not(g) => Formula::not(g.map_atoms(f)),
            Formula::And(a, b) => Formula::and(a.map_atoms(f), b.map_atoms(f)),
            Formula::Or(a, b) => Formula::or(a.map_atoms(f), b.map_atoms(f)),
        }
    }

    /// Calls `out` for every relation atom, in left-to-right order.
    pub fn visit_atoms<'a>(&'a self, out: &mut impl FnMut(&'a str, &'a [Term])) {
        match self {
            Formula::True | Formula::False | Formula::Eq(..) => {}
            Formula::Atom(r, args) => out(r, args),
            Formula::Not(g) => g.visit_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.visit_atoms(out);
                b.visit_atoms(out);
            }
        }
    }

    /// Calls `out` with the name of every relation, function and constant
    /// symbol mentioned anywhere in the formula.
    pub fn visit_symbols(&self, out: &mut dyn FnMut(&str)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(r, args) => {
                out(r);
                args.iter().for_each(|a| a.visit_symbols(out));
            }
            Formula::Eq(a, b) => {
                a.visit_symbols(out);
                b.visit_symbols(out);
            }
            Formula::Not(g) => g.visit_symbols(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.visit_symbols(out);
                b.visit_symbols(out);
            }
        }
    }
}
