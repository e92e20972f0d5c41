use std::collections::HashMap;
use std::fmt;

use super::{Formula, Term};
use crate::error::{Error, Result};
use crate::structure::Schema;

/// Default bound on the number of enumerated terms.
pub const DEFAULT_TERM_CAP: usize = 100_000;

/// Nesting depth of a term: variables and constants 0, applications one
/// more than their deepest argument, `ite` the maximum of its parts.
pub fn nesting_depth_term(t: &Term) -> usize {
    match t {
        Term::Var(_) | Term::Const(_) => 0,
        Term::App(_, args) => 1 + args.iter().map(nesting_depth_term).max().unwrap_or(0),
        Term::Ite(c, a, b) => nesting_depth(c)
            .max(nesting_depth_term(a))
            .max(nesting_depth_term(b)),
    }
}

/// Nesting depth of a formula: the maximum over the terms it contains.
pub fn nesting_depth(f: &Formula) -> usize {
    match f {
        Formula::True | Formula::False => 0,
        Formula::Atom(_, args) => args.iter().map(nesting_depth_term).max().unwrap_or(0),
        Formula::Eq(a, b) => nesting_depth_term(a).max(nesting_depth_term(b)),
        Formula::Not(g) => nesting_depth(g),
        Formula::And(a, b) | Formula::Or(a, b) => nesting_depth(a).max(nesting_depth(b)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SyntaxFlags {
    pub negation_free: bool,
    pub conjunctive: bool,
    pub repeated_vars_in_atom: bool,
}

fn is_literal(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::False | Formula::Atom(..) | Formula::Eq(..) => true,
        Formula::Not(g) => matches!(**g, Formula::Atom(..) | Formula::Eq(..)),
        _ => false,
    }
}

fn is_conjunction(f: &Formula) -> bool {
    match f {
        Formula::And(a, b) => is_conjunction(a) && is_conjunction(b),
        _ => is_literal(f),
    }
}

fn has_negation(f: &Formula) -> bool {
    match f {
        Formula::Not(_) => true,
        Formula::And(a, b) | Formula::Or(a, b) => has_negation(a) || has_negation(b),
        Formula::Atom(_, args) => args.iter().any(term_has_negation),
        Formula::Eq(a, b) => term_has_negation(a) || term_has_negation(b),
        Formula::True | Formula::False => false,
    }
}

fn term_has_negation(t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Const(_) => false,
        Term::App(_, args) => args.iter().any(term_has_negation),
        Term::Ite(c, a, b) => has_negation(c) || term_has_negation(a) || term_has_negation(b),
    }
}

/// True if the atom's argument list mentions some variable twice.
pub fn atom_repeats_var(args: &[Term]) -> bool {
    let vars: Vec<&str> = args
        .iter()
        .filter_map(|a| match a {
            Term::Var(v) => Some(v.as_str()),
            _ => None,
        })
        .collect();
    (0..vars.len()).any(|i| vars[i + 1..].contains(&vars[i]))
}

pub fn classify_syntax(f: &Formula) -> SyntaxFlags {
    let mut repeated = false;
    f.visit_atoms(&mut |_, args| repeated |= atom_repeats_var(args));
    SyntaxFlags {
        negation_free: !has_negation(f),
        conjunctive: is_conjunction(f),
        repeated_vars_in_atom: repeated,
    }
}

/// A partition of positions `0..n`; blocks are sorted and ordered by their
/// least member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EqualityType {
    blocks: Vec<Vec<usize>>,
}

impl EqualityType {
    /// From a class index per position (any labels; renumbered canonically).
    pub fn from_labels<T: Eq + std::hash::Hash>(labels: &[T]) -> EqualityType {
        let mut first: HashMap<&T, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, l) in labels.iter().enumerate() {
            match first.get(l) {
                Some(&b) => blocks[b].push(i),
                None => {
                    first.insert(l, blocks.len());
                    blocks.push(vec![i]);
                }
            }
        }
        EqualityType { blocks }
    }

    pub fn discrete(n: usize) -> EqualityType {
        EqualityType {
            blocks: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_classes(&self) -> usize {
        self.blocks.len()
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    /// Class index of every position (restricted growth string).
    pub fn classes(&self) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for (c, b) in self.blocks.iter().enumerate() {
            for &i in b {
                out[i] = c;
            }
        }
        out
    }

    pub fn same(&self, i: usize, j: usize) -> bool {
        let c = self.classes();
        c[i] == c[j]
    }
}

impl fmt::Display for EqualityType {
    /// Positions print 1-based, e.g. `{{1,2},{3}}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (bi, b) in self.blocks.iter().enumerate() {
            if bi > 0 {
                f.write_str(",")?;
            }
            f.write_str("{")?;
            for (i, p) in b.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", p + 1)?;
            }
            f.write_str("}")?;
        }
        f.write_str("}")
    }
}

/// The partition of positions induced by equal components.
pub fn equality_type_of<T: Eq + std::hash::Hash>(tup: &[T]) -> EqualityType {
    EqualityType::from_labels(tup)
}

/// Odometer step over `0..bound` per position, last position fastest.
fn advance(idx: &mut [usize], bound: usize) -> bool {
    for p in (0..idx.len()).rev() {
        idx[p] += 1;
        if idx[p] < bound {
            return true;
        }
        idx[p] = 0;
    }
    false
}

/// All plain terms (no `ite`) of nesting depth at most `k` over `vars` and
/// the schema's constants, ordered by depth, then function name, then
/// argument positions in this same order. Fails once more than `cap` terms
/// would be produced.
pub fn terms_up_to_depth(schema: &Schema, k: usize, vars: &[&str], cap: usize) -> Result<Vec<Term>> {
    let mut consts: Vec<&str> = schema.constants().map(|c| c.name.as_str()).collect();
    consts.sort_unstable();
    let mut funs: Vec<(&str, usize)> = schema.functions().map(|f| (f.name.as_str(), f.arity)).collect();
    funs.sort_unstable();

    let mut all: Vec<Term> = vars.iter().map(|v| Term::var(v)).collect();
    all.extend(consts.iter().map(|c| Term::constant(c)));
    if all.len() > cap {
        return Err(Error::Resource(format!("{} terms exceed the cap of {cap}", all.len())));
    }
    let mut prev_start = 0usize;
    for d in 1..=k {
        let len = all.len() as u128;
        let older = prev_start as u128;
        let mut count: u128 = 0;
        for &(_, a) in &funs {
            count += if a == 0 {
                u128::from(d == 1)
            } else {
                len.saturating_pow(a as u32) - older.saturating_pow(a as u32)
            };
        }
        let total = len.saturating_add(count);
        if total > cap as u128 {
            return Err(Error::Resource(format!(
                "{total} terms of depth <= {d} exceed the cap of {cap}"
            )));
        }
        let snapshot = all.len();
        let mut next = Vec::with_capacity(count as usize);
        for &(f, a) in &funs {
            if a == 0 {
                if d == 1 {
                    next.push(Term::app(f, vec![]));
                }
                continue;
            }
            let mut idx = vec![0usize; a];
            loop {
                if idx.iter().any(|&i| i >= prev_start) {
                    next.push(Term::app(f, idx.iter().map(|&i| all[i].clone()).collect()));
                }
                if !advance(&mut idx, snapshot) {
                    break;
                }
            }
        }
        prev_start = snapshot;
        all.extend(next);
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Role;

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    #[test]
    fn depths() {
        assert_eq!(nesting_depth_term(&v("x")), 0);
        let fg = Term::app("f", vec![Term::app("g", vec![v("x")])]);
        assert_eq!(nesting_depth_term(&fg), 2);
        let t = Term::ite(Formula::atom("U", vec![Term::app("f", vec![v("x")])]), v("x"), v("y"));
        assert_eq!(nesting_depth_term(&t), 1);
        assert_eq!(nesting_depth_term(&Term::app("c", vec![])), 1);
    }

    #[test]
    fn classify() {
        let f = Formula::and(Formula::atom_vars("S", &["x", "y"]), Formula::atom_vars("R", &["x", "x"]));
        let c = classify_syntax(&f);
        assert!(c.negation_free && c.conjunctive && c.repeated_vars_in_atom);
        let g = Formula::or(Formula::atom_vars("U", &["x"]), Formula::atom_vars("U", &["y"]));
        assert!(!classify_syntax(&g).conjunctive);
        let h = Formula::not(Formula::and(
            Formula::atom_vars("First", &["a"]),
            Formula::atom_vars("Last", &["a"]),
        ));
        let c = classify_syntax(&h);
        assert!(!c.negation_free && !c.conjunctive);
        let lit = Formula::and(Formula::ne(v("a"), v("x")), Formula::atom_vars("R", &["x"]));
        let c = classify_syntax(&lit);
        assert!(c.conjunctive && !c.negation_free);
    }

    #[test]
    fn equality_types() {
        assert_eq!(equality_type_of(&['a', 'a', 'b']).to_string(), "{{1,2},{3}}");
        assert!(equality_type_of(&['a', 'b', 'c']).is_discrete());
        assert!(equality_type_of::<u32>(&[]).is_empty());
        assert_eq!(equality_type_of(&[5, 2, 5]).classes(), vec![0, 1, 0]);
    }

    #[test]
    fn term_enumeration() {
        let bare = Schema::builder().input("E", 2).constant("s", None).build().unwrap();
        let t = terms_up_to_depth(&bare, 3, &["x"], 100).unwrap();
        assert_eq!(t, vec![v("x"), Term::constant("s")]);

        let one = Schema::builder().function("f", 1, Role::Aux).build().unwrap();
        let t = terms_up_to_depth(&one, 2, &["x"], 100).unwrap();
        let fx = Term::app("f", vec![v("x")]);
        assert_eq!(t, vec![v("x"), fx.clone(), Term::app("f", vec![fx])]);

        let two = Schema::builder()
            .function("g", 1, Role::Aux)
            .function("f", 1, Role::Aux)
            .constant("c", None)
            .constant("b", None)
            .build()
            .unwrap();
        let t = terms_up_to_depth(&two, 1, &["x"], 100).unwrap();
        let shown: Vec<String> = t.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["x", "b", "c", "f(x)", "f(b)", "f(c)", "g(x)", "g(b)", "g(c)"]);
    }

    #[test]
    fn term_count_formula() {
        for c in 0..3 {
            let mut b = Schema::builder().function("f", 1, Role::Aux);
            for i in 0..c {
                b = b.constant(&format!("c{i}"), None);
            }
            let schema = b.build().unwrap();
            for k in 0..4 {
                let t = terms_up_to_depth(&schema, k, &["x"], 1000).unwrap();
                assert_eq!(t.len(), (k + 1) * (1 + c));
            }
        }
    }

    #[test]
    fn term_cap() {
        let s = Schema::builder().function("f", 2, Role::Aux).build().unwrap();
        match terms_up_to_depth(&s, 4, &["x", "y"], 1000) {
            Err(Error::Resource(msg)) => assert!(msg.contains("exceed")),
            other => panic!("expected resource error, got {other:?}"),
        }
    }
}
