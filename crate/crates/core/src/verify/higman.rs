use std::fmt;

use crate::structure::AtomicType;

/// Whether `u` embeds into `v` preserving order.
pub fn subsequence<T: PartialEq>(u: &[T], v: &[T]) -> bool {
    embedding(u, v).is_some()
}

/// The leftmost embedding of `u` into `v` as 0-based positions in `v`.
pub fn embedding<T: PartialEq>(u: &[T], v: &[T]) -> Option<Vec<usize>> {
    let mut out = Vec::with_capacity(u.len());
    let mut j = 0;
    for x in u {
        while j < v.len() && v[j] != *x {
            j += 1;
        }
        if j == v.len() {
            return None;
        }
        out.push(j);
        j += 1;
    }
    Some(out)
}

/// The 1-based pair `(l, k)` with `l < k` and `words[l] ⊑ words[k]`,
/// least in `k` and then in `l`.
pub fn higman_pair<T: PartialEq>(words: &[impl AsRef<[T]>]) -> Option<(usize, usize)> {
    for k in 1..words.len() {
        for l in 0..k {
            if subsequence(words[l].as_ref(), words[k].as_ref()) {
                return Some((l + 1, k + 1));
            }
        }
    }
    None
}

/// A word of atomic types; letter `j` describes the `j`-th node of a
/// construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TypeWord(pub Vec<AtomicType>);

impl TypeWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl AsRef<[AtomicType]> for TypeWord {
    fn as_ref(&self) -> &[AtomicType] {
        &self.0
    }
}

impl fmt::Display for TypeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, letter) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{letter}")?;
        }
        Ok(())
    }
}
