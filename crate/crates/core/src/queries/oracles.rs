use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use super::edges;
use crate::error::{Error, Result};
use crate::structure::{Elem, State};

fn adjacency(g: &State) -> Result<Vec<Vec<Elem>>> {
    let mut adj = vec![Vec::new(); g.size() as usize];
    for (a, b) in edges(g)? {
        adj[a as usize].push(b);
    }
    Ok(adj)
}

/// Is `t` reachable from `s`? A node reaches itself.
pub fn oracle_st_reach(g: &State) -> Result<bool> {
    let s = g.constant_named("s")?;
    let t = g.constant_named("t")?;
    let adj = adjacency(g)?;
    let mut seen = vec![false; g.size() as usize];
    let mut queue = VecDeque::from([s]);
    seen[s as usize] = true;
    while let Some(v) = queue.pop_front() {
        if v == t {
            return Ok(true);
        }
        for &w in &adj[v as usize] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                queue.push_back(w);
            }
        }
    }
    Ok(false)
}

pub fn oracle_nonemptyset(db: &State) -> Result<bool> {
    Ok(!db.tuples_named("U")?.is_empty())
}

/// `exists x: E(s,x) & E(x,t)`, with `x` ranging over all nodes.
pub fn oracle_st_twopath(g: &State) -> Result<bool> {
    let s = g.constant_named("s")?;
    let t = g.constant_named("t")?;
    let e = g.schema().relation("E")?.slot;
    Ok(g.domain().into_iter().any(|x| g.holds(e, &[s, x]) && g.holds(e, &[x, t])))
}

/// `exists x, y: E(s,x) & E(x,y)`.
pub fn oracle_s_twopath(g: &State) -> Result<bool> {
    let s = g.constant_named("s")?;
    let adj = adjacency(g)?;
    Ok(adj[s as usize].iter().any(|&x| !adj[x as usize].is_empty()))
}

/// A set of `k` nodes in which every pair is joined in at least one
/// direction.
pub fn oracle_k_clique(g: &State, k: usize) -> Result<bool> {
    if k == 0 {
        return Err(Error::Precondition("clique size must be at least 1".into()));
    }
    let e = g.schema().relation("E")?.slot;
    let nodes = g.domain();
    let joined = |a: Elem, b: Elem| g.holds(e, &[a, b]) || g.holds(e, &[b, a]);
    let found = nodes
        .iter()
        .copied()
        .combinations(k)
        .any(|c| c.iter().tuple_combinations().all(|(&a, &b)| joined(a, b)));
    Ok(found)
}

/// Proper colouring with `k` colours, ignoring edge direction; self-loops
/// make a graph uncolourable.
pub fn oracle_k_colorability(g: &State, k: usize) -> Result<bool> {
    if k == 0 {
        return Err(Error::Precondition("number of colours must be at least 1".into()));
    }
    let nodes = g.domain();
    let index = |v: Elem| nodes.iter().position(|&x| x == v).expect("node in domain");
    let mut nbrs = vec![Vec::new(); nodes.len()];
    for (a, b) in edges(g)? {
        if a == b {
            return Ok(false);
        }
        let (i, j) = (index(a), index(b));
        nbrs[i].push(j);
        nbrs[j].push(i);
    }
    fn extend(v: usize, colors: &mut Vec<usize>, nbrs: &[Vec<usize>], k: usize) -> bool {
        if v == nbrs.len() {
            return true;
        }
        // Symmetry breaking: a new colour is only ever the next unused one.
        let used = colors.iter().copied().max().map_or(0, |m| m + 1);
        for c in 0..k.min(used + 1) {
            if nbrs[v].iter().all(|&w| w >= v || colors[w] != c) {
                colors.push(c);
                if extend(v + 1, colors, nbrs, k) {
                    return true;
                }
                colors.pop();
            }
        }
        false
    }
    Ok(extend(0, &mut Vec::new(), &nbrs, k))
}

/// Named Boolean queries a program can be checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Oracle {
    NonEmptySet,
    StReach,
    StTwoPath,
    STwoPath,
    Clique(usize),
}

impl Oracle {
    pub fn eval(&self, db: &State) -> Result<bool> {
        match self {
            Oracle::NonEmptySet => oracle_nonemptyset(db),
            Oracle::StReach => oracle_st_reach(db),
            Oracle::StTwoPath => oracle_st_twopath(db),
            Oracle::STwoPath => oracle_s_twopath(db),
            Oracle::Clique(k) => oracle_k_clique(db, *k),
        }
    }

    pub const NAMES: &'static [&'static str] =
        &["non-empty-set", "st-reach", "st-twopath", "s-twopath", "clique-<k>"];
}

impl fmt::Display for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Oracle::NonEmptySet => write!(f, "non-empty-set"),
            Oracle::StReach => write!(f, "st-reach"),
            Oracle::StTwoPath => write!(f, "st-twopath"),
            Oracle::STwoPath => write!(f, "s-twopath"),
            Oracle::Clique(k) => write!(f, "clique-{k}"),
        }
    }
}

impl FromStr for Oracle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Oracle> {
        Ok(match s {
            "non-empty-set" => Oracle::NonEmptySet,
            "st-reach" => Oracle::StReach,
            "st-twopath" => Oracle::StTwoPath,
            "s-twopath" => Oracle::STwoPath,
            other => match other.strip_prefix("clique-").and_then(|k| k.parse().ok()) {
                Some(k) if k > 0 => Oracle::Clique(k),
                _ => {
                    return Err(Error::Precondition(format!(
                        "unknown oracle `{other}` (known: {})",
                        Oracle::NAMES.join(", ")
                    )))
                }
            },
        })
    }
}
