use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use super::{DynamicProgram, RuleBody};
use crate::structure::{ModKind, Role, SymbolKind};

/// Dependencies between aux symbols: `(R, S)` when `S` occurs in a rule
/// body for `R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepGraph {
    pub nodes: Vec<String>,
    pub edges: BTreeSet<(String, String)>,
}

impl DepGraph {
    pub fn successors<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.edges
            .iter()
            .filter(move |(a, _)| a == node)
            .map(|(_, b)| b.as_str())
    }

    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        self.edges.contains(&(from.to_string(), to.to_string()))
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph \"{name}\" {{\n");
        for n in &self.nodes {
            out.push_str(&format!("  \"{n}\";\n"));
        }
        for (a, b) in &self.edges {
            out.push_str(&format!("  \"{a}\" -> \"{b}\";\n"));
        }
        out.push_str("}\n");
        out
    }
}

pub fn dependency_graph(p: &DynamicProgram, deletions_only: bool) -> DepGraph {
    let schema = p.schema();
    let nodes: Vec<String> = schema
        .with_role(Role::Aux)
        .filter(|s| s.kind != SymbolKind::Constant)
        .map(|s| s.name.clone())
        .collect();
    let mut edges = BTreeSet::new();
    for rule in p.rules() {
        if deletions_only && rule.trigger.kind != ModKind::Del {
            continue;
        }
        let mut add = |sym: &str| {
            if nodes.iter().any(|n| n == sym) {
                edges.insert((rule.target.clone(), sym.to_string()));
            }
        };
        match &rule.body {
            RuleBody::Formula(f) => f.visit_symbols(&mut add),
            RuleBody::Term(t) => t.visit_symbols(&mut add),
        }
    }
    DepGraph { nodes, edges }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Depth {
    Finite(usize),
    Unreachable,
}

impl Depth {
    pub fn finite(self) -> Option<usize> {
        match self {
            Depth::Finite(d) => Some(d),
            Depth::Unreachable => None,
        }
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Finite(d) => write!(f, "{d}"),
            Depth::Unreachable => write!(f, "unreachable"),
        }
    }
}

/// BFS distance from the query symbol in the deletion dependency graph.
pub fn deletion_depth(p: &DynamicProgram) -> BTreeMap<String, Depth> {
    let g = dependency_graph(p, true);
    let mut out: BTreeMap<String, Depth> = g
        .nodes
        .iter()
        .map(|n| (n.clone(), Depth::Unreachable))
        .collect();
    let mut queue = VecDeque::new();
    out.insert(p.query().to_string(), Depth::Finite(0));
    queue.push_back((p.query().to_string(), 0));
    while let Some((node, d)) = queue.pop_front() {
        for next in g.successors(&node) {
            if out.get(next) == Some(&Depth::Unreachable) {
                out.insert(next.to_string(), Depth::Finite(d + 1));
                queue.push_back((next.to_string(), d + 1));
            }
        }
    }
    out
}
