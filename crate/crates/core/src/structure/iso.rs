use std::collections::BTreeMap;

use super::{tuples_over, Elem, State, UNDEF};
use crate::error::{Error, Result};

/// A finite partial map between domain elements.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ElemMap {
    map: BTreeMap<Elem, Elem>,
}

impl ElemMap {
    pub fn new() -> Self {
        ElemMap::default()
    }

    pub fn identity(elems: &[Elem]) -> Self {
        elems.iter().map(|&e| (e, e)).collect()
    }

    /// Maps `from[i]` to `to[i]`; `None` if that is not a function.
    pub fn zip(from: &[Elem], to: &[Elem]) -> Option<Self> {
        let mut m = ElemMap::new();
        for (&a, &b) in from.iter().zip(to) {
            if !m.bind(a, b) {
                return None;
            }
        }
        Some(m)
    }

    /// Adds `a -> b`; false if `a` is already mapped elsewhere.
    pub fn bind(&mut self, a: Elem, b: Elem) -> bool {
        match self.map.get(&a) {
            Some(&old) => old == b,
            None => {
                self.map.insert(a, b);
                true
            }
        }
    }

    pub fn get(&self, a: Elem) -> Option<Elem> {
        self.map.get(&a).copied()
    }

    /// Image of `a`; panics if unmapped.
    pub fn at(&self, a: Elem) -> Elem {
        self.map[&a]
    }

    pub fn apply(&self, tuple: &[Elem]) -> Option<Vec<Elem>> {
        tuple.iter().map(|&e| self.get(e)).collect()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Elem, Elem)> + '_ {
        self.map.iter().map(|(&a, &b)| (a, b))
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.map.values().all(|v| seen.insert(*v))
    }

    pub fn inverse(&self) -> Option<ElemMap> {
        self.is_injective()
            .then(|| self.map.iter().map(|(&a, &b)| (b, a)).collect())
    }
}

impl FromIterator<(Elem, Elem)> for ElemMap {
    fn from_iter<I: IntoIterator<Item = (Elem, Elem)>>(iter: I) -> Self {
        ElemMap {
            map: iter.into_iter().collect(),
        }
    }
}

/// Whether `pi` is an isomorphism from `s` onto `t`.
///
/// Relations must be preserved both ways, constants mapped to constants and
/// every function must commute with `pi` (undefined values must match).
pub fn check_isomorphism(s: &State, t: &State, pi: &ElemMap) -> Result<bool> {
    if s.schema() != t.schema() {
        return Err(Error::schema("isomorphism between states of different schemas"));
    }
    let dom_s = s.domain();
    let dom_t = t.domain();
    let keys: Vec<Elem> = pi.iter().map(|(a, _)| a).collect();
    if keys != dom_s || !pi.is_injective() {
        return Err(Error::Precondition("map is not a bijection of the domains".into()));
    }
    let mut image: Vec<Elem> = pi.iter().map(|(_, b)| b).collect();
    image.sort_unstable();
    if image != dom_t {
        return Err(Error::Precondition("map is not a bijection of the domains".into()));
    }
    let schema = s.schema();
    for c in schema.constants() {
        if pi.at(s.constant(c.slot)) != t.constant(c.slot) {
            return Ok(false);
        }
    }
    for r in schema.relations() {
        // Equal cardinalities plus one direction give both directions.
        if s.rel_bits(r.slot).count_ones(..) != t.rel_bits(r.slot).count_ones(..) {
            return Ok(false);
        }
        for tuple in s.tuples(r.slot) {
            let img = pi.apply(&tuple).expect("total on domain");
            if !t.holds(r.slot, &img) {
                return Ok(false);
            }
        }
    }
    for f in schema.functions() {
        for args in tuples_over(&dom_s, f.arity) {
            let v = s.fun(f.slot, &args);
            let img_args = pi.apply(&args).expect("total on domain");
            let w = t.fun(f.slot, &img_args);
            let expected = if v == UNDEF { UNDEF } else { pi.at(v) };
            if expected != w {
                return Ok(false);
            }
        }
    }
    Ok(true)
}


/// The image of `s` under the domain permutation `perm` (`perm[e]` is the
/// image of `e`). Constants are moved as well.
pub fn permute_state(s: &State, perm: &[Elem]) -> State {
    let mut out = s.clone();
    let schema = s.schema().clone();
    let n = s.size();
    for r in schema.relations() {
        let mut bits = fixedbitset::FixedBitSet::with_capacity(s.rel_bits(r.slot).len());
        for t in s.tuples(r.slot) {
            let img: Vec<Elem> = t.iter().map(|&e| perm[e as usize]).collect();
            bits.insert(super::encode(n, &img));
        }
        out.set_rel_bits(r.slot, bits);
    }
    for f in schema.functions() {
        let table = s.fun_table(f.slot);
        let mut img_table = vec![UNDEF; table.len()];
        let mut args = vec![0; f.arity];
        for (idx, &v) in table.iter().enumerate() {
            super::decode(n, idx, &mut args);
            let img: Vec<Elem> = args.iter().map(|&e| perm[e as usize]).collect();
            img_table[super::encode(n, &img)] = if v == UNDEF { UNDEF } else { perm[v as usize] };
        }
        out.set_fun_table(f.slot, img_table);
    }
    let consts: Vec<Elem> = s.constants().iter().map(|&c| perm[c as usize]).collect();
    out.set_constants(consts);
    out
}
