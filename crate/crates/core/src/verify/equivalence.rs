use std::collections::HashSet;

use crate::corpus::Guard;
use crate::error::{Error, Result};
use crate::program::DynamicProgram;
use crate::structure::{Modification, State};

/// Runs `p` and `q` side by side over every honest sequence of length at
/// most `max_len` from the empty database on domain `size`, and returns the
/// shortest (then lexicographically least) sequence after which `same`
/// rejects the pair of states. The initial pair is reported as `[]`.
pub fn first_disagreement<F>(
    p: &DynamicProgram,
    q: &DynamicProgram,
    size: u32,
    max_len: usize,
    same: F,
) -> Result<Option<Vec<Modification>>>
where
    F: Fn(&State, &State) -> Result<bool>,
{
    let sp = p.init_state(size, &[])?;
    let sq = q.init_state(size, &[])?;
    if sp.input_tuples() != sq.input_tuples() {
        return Err(Error::Precondition("programs start from different inputs".into()));
    }
    if !same(&sp, &sq)? {
        return Ok(Some(Vec::new()));
    }
    let cands = Guard::Any.candidate_modifications(&sp)?;
    let mut seen: HashSet<(Box<[u64]>, Box<[u64]>)> = HashSet::new();
    seen.insert((sp.fingerprint(), sq.fingerprint()));
    let mut layer = vec![(sp, sq, Vec::new())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (a, b, seq) in &layer {
            for m in &cands {
                if !a.is_honest(m)? {
                    continue;
                }
                let a2 = p.apply(a, m)?;
                let b2 = q.apply(b, m)?;
                let mut seq2: Vec<Modification> = seq.clone();
                seq2.push(m.clone());
                if !same(&a2, &b2)? {
                    return Ok(Some(seq2));
                }
                if seen.insert((a2.fingerprint(), b2.fingerprint())) {
                    next.push((a2, b2, seq2));
                }
            }
        }
        layer = next;
    }
    Ok(None)
}

/// [`first_disagreement`] on the query relations.
pub fn query_disagreement(
    p: &DynamicProgram,
    q: &DynamicProgram,
    size: u32,
    max_len: usize,
) -> Result<Option<Vec<Modification>>> {
    first_disagreement(p, q, size, max_len, |a, b| Ok(p.query_tuples(a) == q.query_tuples(b)))
}
