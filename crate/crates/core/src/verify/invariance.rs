//! Checks on initialization output: invariance under domain permutations,
//! aux function values at swappable elements, and uniform diverse types.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::program::{is_invariant_init, DynamicProgram, PermutationMode};
use crate::structure::{atomic_type, permute_state, tuples_over, Elem, Role, State, UNDEF};

/// Input databases with at most this many candidate tuples are enumerated
/// exhaustively by [`init_invariance`].
pub const EXHAUSTIVE_TUPLES: usize = 12;

/// An aux function value at an element whose swap with another element is
/// an automorphism of the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitFuncViolation {
    pub function: String,
    pub args: Vec<Elem>,
    pub value: Elem,
    pub swapped_with: Elem,
}

fn swap(size: u32, b: Elem, c: Elem) -> Vec<Elem> {
    let mut perm: Vec<Elem> = (0..size).collect();
    perm.swap(b as usize, c as usize);
    perm
}

/// Pairs `(b, b')` of non-constant elements such that swapping them is an
/// automorphism of the input part of `s`.
pub fn swappable_pairs(s: &State) -> Vec<(Elem, Elem)> {
    let input = s.input_only();
    let free: Vec<Elem> = s.domain().into_iter().filter(|e| !s.constants().contains(e)).collect();
    free.iter()
        .copied()
        .tuple_combinations()
        .filter(|&(b, c)| permute_state(&input, &swap(s.size(), b, c)) == input)
        .collect()
}

/// Values `f(ā) = b` where `swap(b, b')` is an input automorphism and `ā`
/// avoids both `b` and `b'`. Arguments containing `b` or `b'` are exempt:
/// the projection `f(x) = x` is invariant and hits every element.
pub fn initfunc_violations(s: &State) -> Vec<InitFuncViolation> {
    let pairs = swappable_pairs(s);
    let dom = s.domain();
    let mut out = Vec::new();
    for f in s.schema().functions().filter(|f| f.role == Role::Aux) {
        for args in tuples_over(&dom, f.arity) {
            let v = s.fun(f.slot, &args);
            if v == UNDEF {
                continue;
            }
            for &(b, c) in &pairs {
                if args.contains(&b) || args.contains(&c) {
                    continue;
                }
                let other = if v == b {
                    c
                } else if v == c {
                    b
                } else {
                    continue;
                };
                out.push(InitFuncViolation {
                    function: f.name.clone(),
                    args: args.clone(),
                    value: v,
                    swapped_with: other,
                });
            }
        }
    }
    out
}

/// Whether all diverse tuples over `elems` of each length `1..=m` have one
/// atomic type in `s`.
pub fn diverse_types_uniform(s: &State, elems: &[Elem], m: usize) -> Result<bool> {
    for len in 1..=m.min(elems.len()) {
        let mut first = None;
        for tup in elems.iter().copied().permutations(len) {
            let ty = atomic_type(s, &tup, None)?;
            match &first {
                None => first = Some(ty),
                Some(f) if *f != ty => return Ok(false),
                Some(_) => {}
            }
        }
    }
    Ok(true)
}

fn candidate_tuples(p: &DynamicProgram, size: u32) -> Vec<(String, Vec<Elem>)> {
    let dom: Vec<Elem> = (0..size).collect();
    p.schema()
        .with_role(Role::Input)
        .flat_map(|r| {
            tuples_over(&dom, r.arity)
                .into_iter()
                .map(move |t| (r.name.clone(), t))
        })
        .collect()
}

/// Tests `π(init(D)) = init(π(D))` for every permutation fixing the
/// constants. Input databases are all subsets of the candidate tuples when
/// there are at most [`EXHAUSTIVE_TUPLES`] of them, otherwise `samples`
/// seeded random databases plus the empty one. Returns the first database
/// that breaks invariance.
pub fn init_invariance(
    p: &DynamicProgram,
    size: u32,
    samples: usize,
    seed: u64,
) -> Result<Option<Vec<(String, Vec<Elem>)>>> {
    let cands = candidate_tuples(p, size);
    let dbs: Vec<Vec<(String, Vec<Elem>)>> = if cands.len() <= EXHAUSTIVE_TUPLES {
        (0u32..1 << cands.len())
            .map(|mask| {
                cands
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, t)| t.clone())
                    .collect()
            })
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = vec![Vec::new()];
        for _ in 0..samples {
            let density: f64 = rng.gen_range(0.05..0.5);
            out.push(cands.iter().filter(|_| rng.gen_bool(density)).cloned().collect());
        }
        out
    };
    for db in dbs {
        if !is_invariant_init(p, size, &db, PermutationMode::All)? {
            return Ok(Some(db));
        }
    }
    Ok(None)
}
