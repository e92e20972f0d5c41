use std::collections::HashMap;

use itertools::Itertools;

use super::{atomic_type, AtomicType, Elem, State};
use crate::error::{Error, Result};

fn typed(s: &State, anchor: &[Elem], tuple: &[Elem]) -> Result<AtomicType> {
    let mut full = anchor.to_vec();
    full.extend_from_slice(tuple);
    atomic_type(s, &full, None)
}

/// Whether every ≺-increasing tuple of length `1..=up_to_arity` over
/// `subset`, prefixed by `anchor`, has one atomic type per length.
pub fn is_homogeneous(
    s: &State,
    order: &[Elem],
    subset: &[Elem],
    up_to_arity: usize,
    anchor: &[Elem],
) -> Result<bool> {
    let rank: HashMap<Elem, usize> = order.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut sorted = subset.to_vec();
    for e in &sorted {
        if !rank.contains_key(e) {
            return Err(Error::Precondition(format!("order does not cover element {e}")));
        }
    }
    sorted.sort_by_key(|e| rank[e]);
    sorted.dedup();
    for l in 1..=up_to_arity.min(sorted.len()) {
        let mut first: Option<AtomicType> = None;
        for combo in sorted.iter().copied().combinations(l) {
            let ty = typed(s, anchor, &combo)?;
            match &first {
                None => first = Some(ty),
                Some(f) if *f != ty => return Ok(false),
                Some(_) => {}
            }
        }
    }
    Ok(true)
}

/// Depth-first search for the lexicographically least (with respect to
/// `order`) `n`-subset disjoint from `anchor` that is homogeneous relative to
/// `anchor` up to `up_to_arity` (default: the largest relation arity).
pub fn find_homogeneous_subset(
    s: &State,
    order: &[Elem],
    n: usize,
    anchor: &[Elem],
    up_to_arity: Option<usize>,
) -> Result<Option<Vec<Elem>>> {
    let m = up_to_arity.unwrap_or_else(|| s.schema().max_relation_arity()).max(1);
    let candidates: Vec<Elem> = order
        .iter()
        .copied()
        .filter(|e| !anchor.contains(e))
        .collect();
    if n > candidates.len() {
        return Ok(None);
    }
    let mut chosen = Vec::with_capacity(n);
    let mut reference: Vec<Option<AtomicType>> = vec![None; m + 1];
    let found = dfs(s, anchor, &candidates, 0, n, m, &mut chosen, &mut reference)?;
    Ok(found.then_some(chosen))
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    s: &State,
    anchor: &[Elem],
    cands: &[Elem],
    from: usize,
    n: usize,
    m: usize,
    chosen: &mut Vec<Elem>,
    reference: &mut Vec<Option<AtomicType>>,
) -> Result<bool> {
    if chosen.len() == n {
        return Ok(true);
    }
    for i in from..cands.len() {
        if cands.len() - i < n - chosen.len() {
            break;
        }
        let e = cands[i];
        let saved = reference.clone();
        if extend_ok(s, anchor, chosen, e, m, reference)? {
            chosen.push(e);
            if dfs(s, anchor, cands, i + 1, n, m, chosen, reference)? {
                return Ok(true);
            }
            chosen.pop();
        }
        *reference = saved;
    }
    Ok(false)
}

/// Checks the new increasing tuples ending in `e` against the reference type
/// of their length, fixing references on first sight.
fn extend_ok(
    s: &State,
    anchor: &[Elem],
    chosen: &[Elem],
    e: Elem,
    m: usize,
    reference: &mut [Option<AtomicType>],
) -> Result<bool> {
    for l in 1..=m.min(chosen.len() + 1) {
        for prefix in chosen.iter().copied().combinations(l - 1) {
            let mut tuple = prefix;
            tuple.push(e);
            let ty = typed(s, anchor, &tuple)?;
            match &reference[l] {
                None => reference[l] = Some(ty),
                Some(r) if *r != ty => return Ok(false),
                Some(_) => {}
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{ConstBinding, Schema};
    use std::sync::Arc;

    fn graph(n: u32, edges: &[(Elem, Elem)], st: bool) -> State {
        let mut b = Schema::builder().input("E", 2);
        if st {
            b = b.constant("s", None).constant("t", Some(ConstBinding::Last));
        }
        let mut s = State::new(Arc::new(b.build().unwrap()), n).unwrap();
        for &(x, y) in edges {
            s.set_named("E", &[x, y], true).unwrap();
        }
        s
    }

    #[test]
    fn empty_structure_takes_first_elements() {
        let s = graph(5, &[], false);
        let order = [4, 3, 2, 1, 0];
        let b = find_homogeneous_subset(&s, &order, 3, &[], None).unwrap();
        assert_eq!(b, Some(vec![4, 3, 2]));
        assert!(find_homogeneous_subset(&s, &order, 6, &[], None).unwrap().is_none());
    }

    #[test]
    fn complete_graph_is_homogeneous() {
        let edges: Vec<_> = (0..4)
            .flat_map(|a| (0..4).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        let s = graph(4, &edges, false);
        assert!(is_homogeneous(&s, &[2, 0, 3, 1], &[0, 1, 2, 3], 2, &[]).unwrap());
    }

    #[test]
    fn single_edge_breaks_homogeneity() {
        let s = graph(3, &[(0, 1)], false);
        assert!(!is_homogeneous(&s, &[0, 1, 2], &[0, 1, 2], 2, &[]).unwrap());
        assert!(is_homogeneous(&s, &[0, 1], &[0, 1, 2], 2, &[]).is_err());
    }

    #[test]
    fn star_layer_nodes_are_equivalent() {
        // s=0, a1..a3 = 1..3, t=4
        let s = graph(5, &[(0, 1), (0, 2), (0, 3)], true);
        let order = [0, 1, 2, 3, 4];
        let b = find_homogeneous_subset(&s, &order, 2, &[0, 4], None).unwrap().unwrap();
        assert_eq!(b, vec![1, 2]);
        assert!(is_homogeneous(&s, &order, &b, 2, &[0, 4]).unwrap());
    }
}
