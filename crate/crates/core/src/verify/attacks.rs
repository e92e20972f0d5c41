//! Witness search along the proof constructions of the unary and binary
//! lower bounds for s-t-reachability.

use super::check::Counterexample;
use super::higman::{embedding, higman_pair, TypeWord};
use crate::error::{Error, Result};
use crate::program::DynamicProgram;
use crate::queries::{oracle_st_reach, LayeredSpec};
use crate::structure::{atomic_type, find_homogeneous_subset, Elem, Modification, Role, State, SymbolKind};

/// Largest layer B for the subset gadget; layer A has `2^n2` nodes.
pub const MAX_GADGET_N2: usize = 5;

fn st_constants(p: &DynamicProgram, size: u32) -> Result<(Elem, Elem)> {
    let s0 = p.blank_state(size)?;
    let s = s0.constant_named("s")?;
    let t = s0.constant_named("t")?;
    if s == t {
        return Err(Error::Precondition("constants s and t coincide".into()));
    }
    Ok((s, t))
}

fn require_graph_input(p: &DynamicProgram) -> Result<()> {
    let e = p.schema().relation("E")?;
    if e.role != Role::Input || e.arity != 2 {
        return Err(Error::Precondition("attacks need a binary input relation E".into()));
    }
    Ok(())
}

fn require_arity(p: &DynamicProgram, max: usize) -> Result<()> {
    let arity = p.max_aux_arity();
    if arity > max {
        return Err(Error::Guard(format!("aux arity {arity} > {max}")));
    }
    Ok(())
}

/// Words are indexed from 1 in the proof; `pair` is `(k, l)` with `k < l`.
fn higman_on(words: &[TypeWord]) -> Option<(usize, usize, Vec<usize>)> {
    let (k, l) = higman_pair(words)?;
    let emb = embedding(words[k - 1].as_ref(), words[l - 1].as_ref())?;
    Some((k, l, emb))
}

fn first_divergence(
    p: &DynamicProgram,
    size: u32,
    initial: &[(String, Vec<Elem>)],
    runs: [Vec<Modification>; 2],
) -> Result<Option<Counterexample>> {
    let oracle = |s: &State| oracle_st_reach(s);
    for seq in runs {
        if let Some(cex) = Counterexample::first_divergence(p, &oracle, size, initial, &seq)? {
            return Ok(Some(cex));
        }
    }
    Ok(None)
}

/// The unary construction on a star with `n` middle nodes: connect every
/// node to `s` and `t`, cut `s`-edges from the back to get states `S'_i`,
/// read off unary type words, and delete the edge sets given by a Higman
/// pair. `None` when no pair exists at this scale or neither run diverges.
pub fn attack_star_deletion(p: &DynamicProgram, n: usize) -> Result<Option<Counterexample>> {
    require_arity(p, 1)?;
    require_graph_input(p)?;
    let size = n as u32 + 2;
    let (s, t) = st_constants(p, size)?;
    let mut nodes: Vec<Elem> = (0..size).filter(|&e| e != s && e != t).collect();
    if p.schema().relations().any(|r| r.role == Role::Builtin && r.arity > 1) {
        let blank = p.blank_state(size)?;
        let m = p
            .schema()
            .with_role(Role::Builtin)
            .filter(|r| r.kind == SymbolKind::Relation)
            .map(|r| r.arity)
            .max()
            .unwrap_or(1);
        let found = (1..=nodes.len())
            .rev()
            .find_map(|k| find_homogeneous_subset(&blank, &nodes, k, &[s, t], Some(m)).transpose())
            .transpose()?;
        nodes = found.unwrap_or_default();
    }
    if nodes.len() < 2 {
        return Ok(None);
    }

    let alpha: Vec<Modification> = nodes
        .iter()
        .flat_map(|&a| [Modification::ins("E", &[s, a]), Modification::ins("E", &[a, t])])
        .collect();
    // suffix[i] deletes (s, a_n), ..., (s, a_{i+1}).
    let suffix = |i: usize| -> Vec<Modification> {
        nodes[i..].iter().rev().map(|&a| Modification::del("E", &[s, a])).collect()
    };
    let s0 = p.init_state(size, &[])?;
    let after_alpha = p.run_final(&s0, &alpha)?;
    let mut words = Vec::with_capacity(nodes.len());
    for i in 1..=nodes.len() {
        let si = p.run_final(&after_alpha, &suffix(i))?;
        let letters = nodes[..i]
            .iter()
            .map(|&a| atomic_type(&si, &[a], None))
            .collect::<Result<Vec<_>>>()?;
        words.push(TypeWord(letters));
    }
    let Some((k, l, emb)) = higman_on(&words) else {
        return Ok(None);
    };

    let mut run_k: Vec<Modification> = alpha.iter().cloned().chain(suffix(k)).collect();
    run_k.extend(nodes[..k].iter().map(|&a| Modification::del("E", &[s, a])));
    let mut run_l: Vec<Modification> = alpha.into_iter().chain(suffix(l)).collect();
    run_l.extend(emb.iter().map(|&j| Modification::del("E", &[s, nodes[j]])));
    first_divergence(p, size, &[], [run_k, run_l])
}

/// The binary construction: a 2-layered graph with `2^n2` nodes `a_X` in
/// the first layer and `n2` nodes in the second, `a_X` linked to every
/// node of `X`. Letters are binary types of `(a_{X_i}, b_j)` over a
/// homogeneous subset of the second layer.
pub fn attack_subset_gadget(p: &DynamicProgram, n2: usize) -> Result<Option<Counterexample>> {
    require_arity(p, 2)?;
    require_graph_input(p)?;
    if n2 > MAX_GADGET_N2 {
        return Err(Error::Resource(format!(
            "subset gadget with n2 = {n2} needs {} first-layer nodes (limit n2 <= {MAX_GADGET_N2})",
            1usize << n2
        )));
    }
    if n2 == 0 {
        return Ok(None);
    }
    let spec = LayeredSpec::new(&[1 << n2, n2 as u32], true)?;
    let size = spec.size();
    let (s, t) = st_constants(p, size)?;
    if (s, t) != (0, size - 1) {
        return Err(Error::Precondition("the gadget expects s = 0 and t = last".into()));
    }
    let a_nodes: Vec<Elem> = spec.layer(0).collect();
    let b_nodes: Vec<Elem> = spec.layer(1).collect();
    let a_of = |mask: usize| a_nodes[mask];
    let index_of = |b: Elem| b_nodes.iter().position(|&x| x == b).expect("second-layer node");

    let initial: Vec<(String, Vec<Elem>)> = b_nodes.iter().map(|&b| ("E".to_string(), vec![b, t])).collect();
    let mut alpha = Vec::new();
    for mask in 0..a_nodes.len() {
        for (j, &b) in b_nodes.iter().enumerate() {
            if mask >> j & 1 == 1 {
                alpha.push(Modification::ins("E", &[a_of(mask), b]));
            }
        }
    }
    let s0 = p.init_state(size, &initial)?;
    let after = p.run_final(&s0, &alpha)?;

    let b3 = (1..=b_nodes.len())
        .rev()
        .find_map(|k| find_homogeneous_subset(&after, &b_nodes, k, &[], Some(2)).transpose())
        .transpose()?
        .unwrap_or_default();
    let x_mask = |i: usize| b3[..i].iter().fold(0usize, |m, &b| m | 1 << index_of(b));
    let mut words = Vec::with_capacity(b3.len());
    for i in 1..=b3.len() {
        let a = a_of(x_mask(i));
        let letters = b3[..i]
            .iter()
            .map(|&b| atomic_type(&after, &[a, b], None))
            .collect::<Result<Vec<_>>>()?;
        words.push(TypeWord(letters));
    }
    let Some((k, l, emb)) = higman_on(&words) else {
        return Ok(None);
    };

    let (ak, al) = (a_of(x_mask(k)), a_of(x_mask(l)));
    let mut run_k = alpha.clone();
    run_k.extend(b3[..k].iter().map(|&b| Modification::del("E", &[ak, b])));
    run_k.push(Modification::ins("E", &[s, ak]));
    let mut run_l = alpha;
    run_l.extend(emb.iter().map(|&j| Modification::del("E", &[al, b3[j]])));
    run_l.push(Modification::ins("E", &[s, al]));
    first_divergence(p, size, &initial, [run_k, run_l])
}
