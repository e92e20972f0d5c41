//! Static query oracles, layered s-t-graphs and graph reductions.

mod layered;
mod oracles;
mod reductions;

pub use layered::{gen_layered, is_k_layered, layering, EdgePattern, LayeredSpec};
pub use oracles::{
    oracle_k_clique, oracle_k_colorability, oracle_nonemptyset, oracle_s_twopath, oracle_st_reach,
    oracle_st_twopath, Oracle,
};
pub use reductions::{reduce_identify_st, reduce_tensor_clique};

use std::sync::Arc;

use crate::error::Result;
use crate::structure::{ConstBinding, Elem, Schema, State};

/// `{E/2}` with constants `s = 0` and `t = last` when `with_st` is set.
pub fn graph_schema(with_st: bool) -> Arc<Schema> {
    let mut b = Schema::builder().input("E", 2);
    if with_st {
        b = b
            .constant("s", Some(ConstBinding::Index(0)))
            .constant("t", Some(ConstBinding::Last));
    }
    Arc::new(b.build().expect("valid graph schema"))
}

/// `{E/2}` with constants pinned to fixed elements.
pub fn graph_schema_with(consts: &[(&str, Elem)]) -> Arc<Schema> {
    let mut b = Schema::builder().input("E", 2);
    for (name, e) in consts {
        b = b.constant(name, Some(ConstBinding::Index(*e)));
    }
    Arc::new(b.build().expect("valid graph schema"))
}

/// A graph over `schema` with the given edges.
pub fn graph(schema: Arc<Schema>, size: u32, edges: &[(Elem, Elem)]) -> Result<State> {
    let mut g = State::new(schema, size)?;
    for &(a, b) in edges {
        g.set_named("E", &[a, b], true)?;
    }
    Ok(g)
}

pub fn edges(g: &State) -> Result<Vec<(Elem, Elem)>> {
    Ok(g.tuples_named("E")?.into_iter().map(|t| (t[0], t[1])).collect())
}

/// DOT text for the `E` relation of `g`.
pub fn to_dot(g: &State, name: &str) -> Result<String> {
    let mut out = format!("digraph \"{name}\" {{\n");
    let schema = g.schema().clone();
    for e in g.domain() {
        let label = schema
            .constants()
            .find(|c| g.constant(c.slot) == e)
            .map(|c| format!(" [label=\"{}\"]", c.name))
            .unwrap_or_default();
        out.push_str(&format!("  {e}{label};\n"));
    }
    for (a, b) in edges(g)? {
        out.push_str(&format!("  {a} -> {b};\n"));
    }
    out.push_str("}\n");
    Ok(out)
}
