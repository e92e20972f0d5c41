use std::collections::VecDeque;
use std::ops::Range;

use super::{graph, graph_schema};
use crate::error::{Error, Result};
use crate::structure::{Elem, State};

/// Layer sizes of a k-layered graph. Node ids: `s = 0`, then the layers in
/// order, then `t` last; without `s,t` the layers start at 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredSpec {
    pub sizes: Vec<u32>,
    pub with_st: bool,
}

impl LayeredSpec {
    pub fn new(sizes: &[u32], with_st: bool) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::Precondition("layered graphs need k >= 1 non-empty layers".into()));
        }
        Ok(LayeredSpec {
            sizes: sizes.to_vec(),
            with_st,
        })
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn size(&self) -> u32 {
        self.sizes.iter().sum::<u32>() + if self.with_st { 2 } else { 0 }
    }

    /// Ids of layer `i` (0-based).
    pub fn layer(&self, i: usize) -> Range<Elem> {
        let start = self.sizes[..i].iter().sum::<u32>() + u32::from(self.with_st);
        start..start + self.sizes[i]
    }

    pub fn s(&self) -> Option<Elem> {
        self.with_st.then_some(0)
    }

    pub fn t(&self) -> Option<Elem> {
        self.with_st.then(|| self.size() - 1)
    }

    /// Every edge the layer discipline allows.
    pub fn allowed_edges(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        if let Some(s) = self.s() {
            out.extend(self.layer(0).map(|a| (s, a)));
        }
        for i in 0..self.k() - 1 {
            for a in self.layer(i) {
                out.extend(self.layer(i + 1).map(|b| (a, b)));
            }
        }
        if let Some(t) = self.t() {
            out.extend(self.layer(self.k() - 1).map(|b| (b, t)));
        }
        out.sort();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgePattern {
    Empty,
    /// `s -> a -> t` for every `a` of a 1-layered graph.
    Star,
    /// Every allowed edge.
    Complete,
    Explicit(Vec<(Elem, Elem)>),
}

pub fn gen_layered(spec: &LayeredSpec, pattern: &EdgePattern) -> Result<State> {
    let allowed = spec.allowed_edges();
    let edges: Vec<(Elem, Elem)> = match pattern {
        EdgePattern::Empty => Vec::new(),
        EdgePattern::Complete => allowed.clone(),
        EdgePattern::Star => {
            if spec.k() != 1 || !spec.with_st {
                return Err(Error::Precondition("the star pattern needs a 1-layered s-t-graph".into()));
            }
            allowed.clone()
        }
        EdgePattern::Explicit(es) => es.clone(),
    };
    for e in &edges {
        if allowed.binary_search(e).is_err() {
            return Err(Error::Precondition(format!(
                "edge ({}, {}) crosses the layering",
                e.0, e.1
            )));
        }
    }
    let schema = graph_schema(spec.with_st);
    graph(schema, spec.size(), &edges)
}

/// A layer number per element (`s` gets 0, `t` gets `k+1`) such that every
/// edge goes from layer `i` to layer `i+1`, if one exists. Isolated nodes get
/// layer 1.
pub fn layering(g: &State, k: usize) -> Result<Option<Vec<i64>>> {
    let s = g.constant_named("s")? as usize;
    let t = g.constant_named("t")? as usize;
    let n = g.size() as usize;
    let k = k as i64;
    let mut nbrs: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for (a, b) in super::edges(g)? {
        nbrs[a as usize].push((b as usize, 1));
        nbrs[b as usize].push((a as usize, -1));
    }
    let mut level: Vec<Option<i64>> = vec![None; n];
    let explore = |starts: &[(usize, i64)], level: &mut Vec<Option<i64>>| -> Option<Vec<usize>> {
        let mut comp = Vec::new();
        let mut queue = VecDeque::new();
        for &(v, l) in starts {
            level[v] = Some(l);
            comp.push(v);
            queue.push_back(v);
        }
        while let Some(v) = queue.pop_front() {
            let lv = level[v].expect("visited");
            for &(w, d) in &nbrs[v] {
                match level[w] {
                    Some(lw) if lw != lv + d => return None,
                    Some(_) => {}
                    None => {
                        level[w] = Some(lv + d);
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
        }
        Some(comp)
    };
    let Some(anchored) = explore(&[(s, 0), (t, k + 1)], &mut level) else {
        return Ok(None);
    };
    if anchored
        .iter()
        .any(|&v| v != s && v != t && !(1..=k).contains(&level[v].expect("visited")))
    {
        return Ok(None);
    }
    for v in 0..n {
        if level[v].is_some() || !g.contains(v as Elem) {
            continue;
        }
        let Some(comp) = explore(&[(v, 0)], &mut level) else {
            return Ok(None);
        };
        let ls: Vec<i64> = comp.iter().map(|&w| level[w].expect("visited")).collect();
        let (lo, hi) = (ls.iter().min().copied().unwrap_or(0), ls.iter().max().copied().unwrap_or(0));
        if hi - lo + 1 > k {
            return Ok(None);
        }
        for &w in &comp {
            level[w] = Some(level[w].expect("visited") - lo + 1);
        }
    }
    Ok(Some(level.into_iter().map(|l| l.unwrap_or(-1)).collect()))
}

pub fn is_k_layered(g: &State, k: usize) -> Result<bool> {
    Ok(layering(g, k)?.is_some())
}
