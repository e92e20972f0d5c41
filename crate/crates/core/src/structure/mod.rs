//! Schemas, finite states, modifications, isomorphisms and atomic types.

mod homogeneous;
mod iso;
mod modification;
mod schema;
mod state;
mod types;

pub use homogeneous::{find_homogeneous_subset, is_homogeneous};
pub use iso::{check_isomorphism, permute_state, ElemMap};
pub use modification::{ModKind, Modification};
pub use schema::{ConstBinding, Role, Schema, SchemaBuilder, Symbol, SymbolKind};
pub use state::{Restriction, State, UNDEF};
pub use types::{atomic_type, AtomicType, Fact, Place};

/// Domain elements are plain integers; a domain of size `n` is `0..n`.
pub type Elem = u32;

/// Big-endian index of `tuple` among all tuples over `0..size`.
#[inline]
pub fn encode(size: u32, tuple: &[Elem]) -> usize {
    let n = size as usize;
    tuple.iter().fold(0usize, |acc, &e| acc * n + e as usize)
}

/// Inverse of [`encode`]; writes the tuple into `out`.
#[inline]
pub fn decode(size: u32, mut idx: usize, out: &mut [Elem]) {
    let n = size as usize;
    for slot in out.iter_mut().rev() {
        *slot = (idx % n) as Elem;
        idx /= n;
    }
}

/// Number of tuples of the given arity over a domain of `size` elements.
pub fn tuple_count(size: u32, arity: usize) -> usize {
    (size as usize).pow(arity as u32)
}

/// All tuples of length `arity` over `elems`, in lexicographic order.
pub fn tuples_over(elems: &[Elem], arity: usize) -> Vec<Vec<Elem>> {
    let mut out = vec![Vec::with_capacity(arity)];
    for _ in 0..arity {
        let mut next = Vec::with_capacity(out.len() * elems.len());
        for prefix in &out {
            for &e in elems {
                let mut t = prefix.clone();
                t.push(e);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_roundtrip() {
        let mut buf = [0; 3];
        for idx in 0..tuple_count(4, 3) {
            decode(4, idx, &mut buf);
            assert_eq!(encode(4, &buf), idx);
        }
        assert_eq!(encode(5, &[]), 0);
    }

    #[test]
    fn tuples_over_counts() {
        assert_eq!(tuples_over(&[1, 2], 0), vec![Vec::<Elem>::new()]);
        assert_eq!(tuples_over(&[1, 2, 3], 2).len(), 9);
        assert_eq!(tuples_over(&[1, 2], 2)[1], vec![1, 2]);
    }
}
