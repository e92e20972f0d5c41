use std::collections::BTreeMap;

use itertools::Itertools;

use super::check::Counterexample;
use crate::error::{Error, Result};
use crate::program::{deletion_depth, eliminate_repeated_variables, Depth, DynamicProgram};
use crate::queries::oracle_nonemptyset;
use crate::structure::{Elem, Modification, Role, State};

/// A diverse tuple over `U` missing from an aux relation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Unsaturated {
    pub relation: String,
    pub tuple: Vec<Elem>,
}

fn unary_input(p: &DynamicProgram) -> Result<String> {
    let mut unary = p.schema().with_role(Role::Input).filter(|r| r.arity == 1);
    match (unary.next(), unary.next()) {
        (Some(r), None) => Ok(r.name.clone()),
        _ => Err(Error::Precondition("expected exactly one unary input relation".into())),
    }
}

/// For every aux relation at finite deletion depth `k` with `|U| >= k+1`,
/// the diverse tuples over `U` it does not contain. A correct conjunctive
/// program for non-emptiness has none.
pub fn diverse_saturation(
    s: &State,
    p: &DynamicProgram,
    depths: &BTreeMap<String, Depth>,
    u_symbol: &str,
) -> Result<Vec<Unsaturated>> {
    let u: Vec<Elem> = s.tuples_named(u_symbol)?.into_iter().map(|t| t[0]).collect();
    let mut out = Vec::new();
    for r in p.schema().with_role(Role::Aux).filter(|r| r.kind == crate::structure::SymbolKind::Relation) {
        let Some(k) = depths.get(&r.name).and_then(|d| d.finite()) else {
            continue;
        };
        if u.len() < k + 1 {
            continue;
        }
        for tup in u.iter().copied().permutations(r.arity) {
            if !s.holds(r.slot, &tup) {
                out.push(Unsaturated {
                    relation: r.name.clone(),
                    tuple: tup,
                });
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Inserts `m+1` elements into `U`, `m` the largest finite deletion depth
/// after removing repeated variables, then tries every honest deletion
/// sequence of length at most `bound`, shortest first.
pub fn cq_adversary(p: &DynamicProgram, bound: usize) -> Result<Option<Counterexample>> {
    if !p.syntax_flags().conjunctive {
        return Err(Error::Precondition(format!("`{}` is not conjunctive", p.name())));
    }
    let u = unary_input(p)?;
    let normal = eliminate_repeated_variables(p)?;
    let m = deletion_depth(&normal)
        .values()
        .filter_map(|d| d.finite())
        .max()
        .unwrap_or(0);
    let blank = p.blank_state(1)?;
    let reserved: Vec<Elem> = blank.constants().to_vec();
    let size = (m + 1 + reserved.len()) as u32;
    let elems: Vec<Elem> = (0..size).filter(|e| !reserved.contains(e)).take(m + 1).collect();
    let prefix: Vec<Modification> = elems.iter().map(|&e| Modification::ins(&u, &[e])).collect();
    let oracle = |s: &State| oracle_nonemptyset(s);
    for len in 0..=bound.min(elems.len()) {
        for dels in elems.iter().copied().permutations(len) {
            let mut seq = prefix.clone();
            seq.extend(dels.iter().map(|&e| Modification::del(&u, &[e])));
            if let Some(cex) = Counterexample::first_divergence(p, &oracle, size, &[], &seq)? {
                return Ok(Some(cex));
            }
        }
    }
    Ok(None)
}
