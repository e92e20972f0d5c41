use std::collections::BTreeSet;
use std::fmt;

use super::{tuples_over, Elem, State};
use crate::error::{Error, Result};

/// A term position inside an atomic type: placeholder `x_i` (1-based) or a
/// constant symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Var(usize),
    Const(String),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Var(i) => write!(f, "x{i}"),
            Place::Const(c) => f.write_str(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fact {
    /// `a = b`, stored with `a < b`.
    Eq(Place, Place),
    Rel(String, Vec<Place>),
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fact::Eq(a, b) => write!(f, "{a}={b}"),
            Fact::Rel(r, args) => {
                write!(f, "{r}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// The atomic facts a tuple satisfies, over placeholders and constants.
///
/// Equalities are kept once per unordered pair, smaller place first, so two
/// types are equal exactly when their fact sets are.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomicType {
    pub arity: usize,
    pub facts: BTreeSet<Fact>,
}

impl AtomicType {
    pub fn contains(&self, fact: &Fact) -> bool {
        self.facts.contains(fact)
    }

    /// True if the relation atom with the given places is part of the type.
    pub fn has_atom(&self, rel: &str, args: &[Place]) -> bool {
        self.facts.contains(&Fact::Rel(rel.to_string(), args.to_vec()))
    }
}

impl fmt::Display for AtomicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, fact) in self.facts.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{fact}")?;
        }
        f.write_str("}")
    }
}

/// The σ-type of `tup` in `s`. `sigma = None` means every relation symbol.
pub fn atomic_type(s: &State, tup: &[Elem], sigma: Option<&[&str]>) -> Result<AtomicType> {
    if let Some(&e) = tup.iter().find(|&&e| !s.contains(e)) {
        return Err(Error::domain(format!("element {e} is outside the domain")));
    }
    let schema = s.schema();
    let mut places: Vec<(Place, Elem)> = tup
        .iter()
        .enumerate()
        .map(|(i, &e)| (Place::Var(i + 1), e))
        .collect();
    for c in schema.constants() {
        places.push((Place::Const(c.name.clone()), s.constant(c.slot)));
    }
    let mut facts = BTreeSet::new();
    for i in 0..places.len() {
        for j in i + 1..places.len() {
            if places[i].1 == places[j].1 {
                let (a, b) = (places[i].0.clone(), places[j].0.clone());
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                facts.insert(Fact::Eq(a, b));
            }
        }
    }
    let idx: Vec<Elem> = (0..places.len() as Elem).collect();
    for r in schema.relations() {
        if let Some(sig) = sigma {
            if !sig.contains(&r.name.as_str()) {
                continue;
            }
        }
        for pick in tuples_over(&idx, r.arity) {
            let elems: Vec<Elem> = pick.iter().map(|&p| places[p as usize].1).collect();
            if s.holds(r.slot, &elems) {
                let args = pick.iter().map(|&p| places[p as usize].0.clone()).collect();
                facts.insert(Fact::Rel(r.name.clone(), args));
            }
        }
    }
    if let Some(sig) = sigma {
        for name in sig {
            schema.relation(name)?;
        }
    }
    Ok(AtomicType {
        arity: tup.len(),
        facts,
    })
}
