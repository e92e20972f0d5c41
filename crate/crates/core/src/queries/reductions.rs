use super::{edges, graph, graph_schema_with, is_k_layered};
use crate::error::{Error, Result};
use crate::structure::{Elem, State};

/// Merges `t` into `s`: edges into `t` become edges into `s`. The result has
/// the single constant `s`; ids above `t` shift down by one.
pub fn reduce_identify_st(g: &State) -> Result<State> {
    if !is_k_layered(g, 2)? {
        return Err(Error::Precondition("identify-s-t needs a 2-layered s-t-graph".into()));
    }
    let s = g.constant_named("s")?;
    let t = g.constant_named("t")?;
    let map = |v: Elem| -> Elem {
        let v = if v == t { s } else { v };
        if v > t {
            v - 1
        } else {
            v
        }
    };
    let es: Vec<(Elem, Elem)> = edges(g)?.into_iter().map(|(a, b)| (map(a), map(b))).collect();
    graph(graph_schema_with(&[("s", map(s))]), g.size() - 1, &es)
}

/// Adds `copies` fresh `m`-cliques, each joined in both directions to every
/// original node; the copies are not joined to each other.
pub fn reduce_tensor_clique(g: &State, m: u32, copies: u32) -> Result<State> {
    if !(1..=2).contains(&copies) {
        return Err(Error::Precondition("copies must be 1 or 2".into()));
    }
    let n = g.size();
    let schema = g.schema().clone();
    let consts: Vec<(&str, Elem)> = schema
        .constants()
        .map(|c| (c.name.as_str(), g.constant(c.slot)))
        .collect();
    let mut es = edges(g)?;
    for c in 0..copies {
        let fresh: Vec<Elem> = (n + c * m..n + (c + 1) * m).collect();
        for &u in &fresh {
            for &v in &fresh {
                if u != v {
                    es.push((u, v));
                }
            }
            for v in 0..n {
                es.push((u, v));
                es.push((v, u));
            }
        }
    }
    graph(graph_schema_with(&consts), n + copies * m, &es)
}
