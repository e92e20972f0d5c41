use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::formula::{equality_type_of, eval_term, terms_up_to_depth, EqualityType, DEFAULT_TERM_CAP};
use crate::structure::{tuples_over, Elem, ElemMap, State, UNDEF};

fn check_elems(s: &State, elems: &[Elem]) -> Result<()> {
    match elems.iter().find(|&&e| !s.contains(e)) {
        Some(e) => Err(Error::domain(format!("element {e} is outside the domain"))),
        None => Ok(()),
    }
}

/// One closure round: values of every function on tuples over `set`.
fn step(s: &State, set: &BTreeSet<Elem>) -> BTreeSet<Elem> {
    let elems: Vec<Elem> = set.iter().copied().collect();
    let mut out = set.clone();
    for f in s.schema().functions() {
        for args in tuples_over(&elems, f.arity) {
            let v = s.fun(f.slot, &args);
            if v != UNDEF {
                out.insert(v);
            }
        }
    }
    out
}

/// The k-neighborhood of `a`: values of all plain terms of depth at most
/// `k` under assignments into `a`. Constants are depth-0 terms and
/// therefore always included.
///
/// Computed by `k` closure rounds rather than term enumeration: a term of
/// depth `d` is a function applied to terms of depth below `d`.
pub fn neighborhood(s: &State, a: &[Elem], k: usize) -> Result<Vec<Elem>> {
    check_elems(s, a)?;
    let mut set: BTreeSet<Elem> = a.iter().copied().collect();
    set.extend(s.constants().iter().copied());
    for _ in 0..k {
        let next = step(s, &set);
        if next.len() == set.len() {
            break;
        }
        set = next;
    }
    Ok(set.into_iter().collect())
}

/// Whether `a` equals its 1-neighborhood.
pub fn is_closed(s: &State, a: &[Elem]) -> Result<bool> {
    let mut sorted = a.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(neighborhood(s, a, 1)? == sorted)
}

/// Paired closure: grows `pi` by `(f^s(x̄), f^t(ȳ))` for every function and
/// every tuple of already paired elements. Fails on a clash.
fn pair_step(s: &State, t: &State, pi: &ElemMap, inv: &mut ElemMap) -> Option<ElemMap> {
    let pairs: Vec<(Elem, Elem)> = pi.iter().collect();
    let idx: Vec<Elem> = (0..pairs.len() as Elem).collect();
    let mut out = pi.clone();
    for f in s.schema().functions() {
        for sel in tuples_over(&idx, f.arity) {
            let xs: Vec<Elem> = sel.iter().map(|&i| pairs[i as usize].0).collect();
            let ys: Vec<Elem> = sel.iter().map(|&i| pairs[i as usize].1).collect();
            let (v, w) = (s.fun(f.slot, &xs), t.fun(f.slot, &ys));
            if (v == UNDEF) != (w == UNDEF) {
                return None;
            }
            if v == UNDEF {
                continue;
            }
            if !out.bind(v, w) || !inv.bind(w, v) {
                return None;
            }
        }
    }
    Some(out)
}

/// The map `t^s(ā) ↦ t^t(b̄)` over all plain terms of depth at most `k`, if
/// it is a well-defined bijection between the k-neighborhoods that
/// preserves every relation there. Constants are mapped to constants.
pub fn k_similar(s: &State, a: &[Elem], t: &State, b: &[Elem], k: usize) -> Result<Option<ElemMap>> {
    if a.len() != b.len() {
        return Err(Error::Precondition(format!(
            "tuples of different lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    if s.schema() != t.schema() {
        return Err(Error::schema("k-similarity between states of different schemas"));
    }
    check_elems(s, a)?;
    check_elems(t, b)?;
    let mut pi = ElemMap::new();
    let mut inv = ElemMap::new();
    let seeds = a
        .iter()
        .copied()
        .zip(b.iter().copied())
        .chain(s.constants().iter().copied().zip(t.constants().iter().copied()));
    for (x, y) in seeds {
        if !pi.bind(x, y) || !inv.bind(y, x) {
            return Ok(None);
        }
    }
    for _ in 0..k {
        let Some(next) = pair_step(s, t, &pi, &mut inv) else {
            return Ok(None);
        };
        if next.len() == pi.len() {
            break;
        }
        pi = next;
    }
    let dom: Vec<Elem> = pi.iter().map(|(x, _)| x).collect();
    for r in s.schema().relations() {
        for tup in tuples_over(&dom, r.arity) {
            let img = pi.apply(&tup).expect("total on its domain");
            if s.holds(r.slot, &tup) != t.holds(r.slot, &img) {
                return Ok(None);
            }
        }
    }
    Ok(Some(pi))
}

/// `(c, t_1(c), ..., t_l(c))` for every component `c`, concatenated, where
/// `t_1..t_l` are the plain terms of depth at most `k` over one variable in
/// canonical order. The second component is the equality type of the
/// concatenated vector.
pub fn neighborhood_vector(s: &State, tup: &[Elem], k: usize) -> Result<(Vec<Elem>, EqualityType)> {
    neighborhood_vector_capped(s, tup, k, DEFAULT_TERM_CAP)
}

pub fn neighborhood_vector_capped(
    s: &State,
    tup: &[Elem],
    k: usize,
    cap: usize,
) -> Result<(Vec<Elem>, EqualityType)> {
    check_elems(s, tup)?;
    let terms = terms_up_to_depth(s.schema(), k, &["x"], cap)?;
    let mut out = Vec::with_capacity(tup.len() * terms.len());
    let mut asg = std::collections::HashMap::new();
    for &c in tup {
        asg.insert("x".to_string(), c);
        for term in &terms {
            out.push(eval_term(term, s, &asg)?);
        }
    }
    let ty = equality_type_of(&out);
    Ok((out, ty))
}

/// Relation-preserving check of a partial map on its domain only, used to
/// compare restricted structures that carry no functions.
pub fn preserves_relations(s: &State, t: &State, pi: &ElemMap) -> bool {
    let dom: Vec<Elem> = pi.iter().map(|(x, _)| x).collect();
    s.schema().relations().all(|r| {
        tuples_over(&dom, r.arity).into_iter().all(|tup| {
            let img = pi.apply(&tup).expect("total on its domain");
            s.holds(r.slot, &tup) == t.holds(r.slot, &img)
        })
    })
}
