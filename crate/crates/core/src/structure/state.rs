use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::{decode, encode, tuple_count, tuples_over, Elem, ModKind, Modification, Role, Schema};
use crate::error::{Error, Result};

/// Marks a function value that is undefined in a relation-only restriction.
pub const UNDEF: Elem = Elem::MAX;

/// How [`State::restrict`] treats function values leaving the subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Restriction {
    /// Fail unless the subset is closed under every function.
    Closed,
    /// Keep relations only; escaping function values become [`UNDEF`].
    RelationOnly,
}

/// A program state: domain, input, auxiliary and built-in interpretations.
///
/// Relations are bitsets indexed by [`encode`] over `0..size`. A restricted
/// state keeps the same index space and records its domain in `members`.
#[derive(Clone)]
pub struct State {
    schema: Arc<Schema>,
    size: u32,
    members: Option<FixedBitSet>,
    rels: Vec<FixedBitSet>,
    funs: Vec<Vec<Elem>>,
    consts: Vec<Elem>,
}

impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size
            && self.members == other.members
            && self.rels == other.rels
            && self.funs == other.funs
            && self.consts == other.consts
    }
}

impl Eq for State {}

impl Hash for State {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.size.hash(h);
        self.members.hash(h);
        self.rels.hash(h);
        self.funs.hash(h);
        self.consts.hash(h);
    }
}

impl State {
    /// All relations empty, constants per their bindings, and every
    /// function the projection onto its first argument (0-ary: element 0).
    pub fn new(schema: Arc<Schema>, size: u32) -> Result<State> {
        let rels = schema
            .relations()
            .map(|r| FixedBitSet::with_capacity(tuple_count(size, r.arity)))
            .collect();
        let mut funs = Vec::with_capacity(schema.num_functions());
        for f in schema.functions() {
            if f.arity == 0 && size == 0 {
                return Err(Error::domain(format!("0-ary function `{}` needs a non-empty domain", f.name)));
            }
            let mut table = vec![0; tuple_count(size, f.arity)];
            let mut buf = vec![0; f.arity];
            for (idx, v) in table.iter_mut().enumerate() {
                decode(size, idx, &mut buf);
                *v = buf.first().copied().unwrap_or(0);
            }
            funs.push(table);
        }
        let consts = (0..schema.num_constants())
            .map(|c| schema.binding(c).resolve(size))
            .collect::<Result<Vec<_>>>()?;
        Ok(State {
            schema,
            size,
            members: None,
            rels,
            funs,
            consts,
        })
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    /// Size of the underlying index space `0..size`.
    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn is_restricted(&self) -> bool {
        self.members.is_some()
    }

    pub fn contains(&self, e: Elem) -> bool {
        match &self.members {
            None => e < self.size,
            Some(m) => (e as usize) < m.len() && m.contains(e as usize),
        }
    }

    /// Domain elements in increasing order.
    pub fn domain(&self) -> Vec<Elem> {
        match &self.members {
            None => (0..self.size).collect(),
            Some(m) => m.ones().map(|e| e as Elem).collect(),
        }
    }

    pub fn domain_len(&self) -> usize {
        match &self.members {
            None => self.size as usize,
            Some(m) => m.count_ones(..),
        }
    }

    fn check_tuple(&self, name: &str, arity: usize, tuple: &[Elem]) -> Result<()> {
        if tuple.len() != arity {
            return Err(Error::schema(format!(
                "`{name}` has arity {arity}, got a {}-tuple",
                tuple.len()
            )));
        }
        if let Some(&e) = tuple.iter().find(|&&e| !self.contains(e)) {
            return Err(Error::domain(format!("element {e} is outside the domain")));
        }
        Ok(())
    }

    pub fn holds(&self, slot: usize, tuple: &[Elem]) -> bool {
        self.rels[slot].contains(encode(self.size, tuple))
    }

    pub fn holds_idx(&self, slot: usize, idx: usize) -> bool {
        self.rels[slot].contains(idx)
    }

    /// Membership test by relation name, with arity and domain checks.
    pub fn holds_named(&self, name: &str, tuple: &[Elem]) -> Result<bool> {
        let sym = self.schema.relation(name)?;
        self.check_tuple(name, sym.arity, tuple)?;
        Ok(self.holds(sym.slot, tuple))
    }

    pub fn rel_bits(&self, slot: usize) -> &FixedBitSet {
        &self.rels[slot]
    }

    pub fn set_rel_bits(&mut self, slot: usize, bits: FixedBitSet) {
        debug_assert_eq!(bits.len(), self.rels[slot].len());
        self.rels[slot] = bits;
    }

    pub fn set(&mut self, slot: usize, tuple: &[Elem], value: bool) {
        let idx = encode(self.size, tuple);
        self.rels[slot].set(idx, value);
    }

    pub fn set_named(&mut self, name: &str, tuple: &[Elem], value: bool) -> Result<()> {
        let sym = self.schema.relation(name)?;
        self.check_tuple(name, sym.arity, tuple)?;
        let slot = sym.slot;
        self.set(slot, tuple, value);
        Ok(())
    }

    /// Tuples of a relation, sorted lexicographically.
    pub fn tuples(&self, slot: usize) -> Vec<Vec<Elem>> {
        let arity = self.schema.relation_at(slot).arity;
        self.rels[slot]
            .ones()
            .map(|idx| {
                let mut t = vec![0; arity];
                decode(self.size, idx, &mut t);
                t
            })
            .collect()
    }

    pub fn tuples_named(&self, name: &str) -> Result<Vec<Vec<Elem>>> {
        Ok(self.tuples(self.schema.relation(name)?.slot))
    }

    pub fn fun(&self, slot: usize, args: &[Elem]) -> Elem {
        self.funs[slot][encode(self.size, args)]
    }

    pub fn fun_table(&self, slot: usize) -> &[Elem] {
        &self.funs[slot]
    }

    pub fn set_fun_table(&mut self, slot: usize, table: Vec<Elem>) {
        debug_assert_eq!(table.len(), self.funs[slot].len());
        self.funs[slot] = table;
    }

    pub fn fun_named(&self, name: &str, args: &[Elem]) -> Result<Elem> {
        let sym = self.schema.function(name)?;
        self.check_tuple(name, sym.arity, args)?;
        Ok(self.fun(sym.slot, args))
    }

    pub fn set_fun(&mut self, slot: usize, args: &[Elem], value: Elem) {
        let idx = encode(self.size, args);
        self.funs[slot][idx] = value;
    }

    pub fn set_fun_named(&mut self, name: &str, args: &[Elem], value: Elem) -> Result<()> {
        let sym = self.schema.function(name)?;
        self.check_tuple(name, sym.arity, args)?;
        if !self.contains(value) {
            return Err(Error::domain(format!("value {value} is outside the domain")));
        }
        let slot = sym.slot;
        self.set_fun(slot, args, value);
        Ok(())
    }

    pub fn constant(&self, slot: usize) -> Elem {
        self.consts[slot]
    }

    pub fn constant_named(&self, name: &str) -> Result<Elem> {
        Ok(self.consts[self.schema.constant(name)?.slot])
    }

    pub fn constants(&self) -> &[Elem] {
        &self.consts
    }

    pub(crate) fn set_constants(&mut self, consts: Vec<Elem>) {
        debug_assert_eq!(consts.len(), self.consts.len());
        self.consts = consts;
    }

    /// Applies a modification to the input database; the auxiliary and
    /// built-in parts are left as they are.
    pub fn apply_input_modification(&self, m: &Modification) -> Result<State> {
        let mut next = self.clone();
        next.apply_input_in_place(m)?;
        Ok(next)
    }

    pub(crate) fn apply_input_in_place(&mut self, m: &Modification) -> Result<()> {
        let sym = self.schema.relation(&m.rel)?;
        if sym.role != Role::Input {
            return Err(Error::schema(format!("`{}` is not an input relation", m.rel)));
        }
        self.check_tuple(&m.rel, sym.arity, &m.tuple)?;
        let slot = sym.slot;
        self.set(slot, &m.tuple, m.kind == ModKind::Ins);
        Ok(())
    }

    /// Whether applying `m` is honest: no re-insertion, no phantom deletion.
    pub fn is_honest(&self, m: &Modification) -> Result<bool> {
        let present = self.holds_named(&m.rel, &m.tuple)?;
        Ok(match m.kind {
            ModKind::Ins => !present,
            ModKind::Del => present,
        })
    }

    /// The substructure induced on `subset`.
    pub fn restrict(&self, subset: &[Elem], mode: Restriction) -> Result<State> {
        let mut members = FixedBitSet::with_capacity(self.size as usize);
        for &e in subset {
            if !self.contains(e) {
                return Err(Error::Precondition(format!("element {e} is not in the domain")));
            }
            members.insert(e as usize);
        }
        for (slot, &c) in self.consts.iter().enumerate() {
            if !members.contains(c as usize) {
                return Err(Error::Precondition(format!(
                    "subset misses constant `{}`",
                    self.schema.constant_at(slot).name
                )));
            }
        }
        let inside = |t: &[Elem]| t.iter().all(|&e| members.contains(e as usize));
        let mut out = self.clone();
        let mut buf = Vec::new();
        for (slot, bits) in out.rels.iter_mut().enumerate() {
            let arity = self.schema.relation_at(slot).arity;
            buf.resize(arity, 0);
            let drop: Vec<usize> = bits
                .ones()
                .filter(|&idx| {
                    decode(self.size, idx, &mut buf);
                    !inside(&buf)
                })
                .collect();
            for idx in drop {
                bits.set(idx, false);
            }
        }
        for (slot, table) in out.funs.iter_mut().enumerate() {
            let sym = self.schema.function_at(slot);
            buf.resize(sym.arity, 0);
            for (idx, v) in table.iter_mut().enumerate() {
                decode(self.size, idx, &mut buf);
                if !inside(&buf) {
                    *v = UNDEF;
                } else if *v != UNDEF && !members.contains(*v as usize) {
                    match mode {
                        Restriction::Closed => {
                            return Err(Error::NotClosed(format!(
                                "`{}`{:?} = {} leaves the subset",
                                sym.name, buf, v
                            )))
                        }
                        Restriction::RelationOnly => *v = UNDEF,
                    }
                }
            }
        }
        out.members = if subset.len() == self.size as usize && !self.is_restricted() {
            None
        } else {
            Some(members)
        };
        Ok(out)
    }

    /// A copy whose non-input relations are cleared and whose functions are
    /// reset to their defaults; the constants stay.
    pub fn input_only(&self) -> State {
        let mut out = self.clone();
        for (slot, bits) in out.rels.iter_mut().enumerate() {
            if self.schema.relation_at(slot).role != Role::Input {
                bits.clear();
            }
        }
        if let Ok(fresh) = State::new(self.schema.clone(), self.size) {
            out.funs = fresh.funs;
        }
        out
    }

    /// Equality of the input databases only.
    pub fn same_input(&self, other: &State) -> bool {
        self.schema
            .relations()
            .filter(|r| r.role == Role::Input)
            .all(|r| self.rels[r.slot] == other.rels[r.slot])
    }

    /// Every input tuple, ordered by relation declaration then tuple.
    pub fn input_tuples(&self) -> Vec<(String, Vec<Elem>)> {
        self.schema
            .relations()
            .filter(|r| r.role == Role::Input)
            .flat_map(|r| {
                self.tuples(r.slot)
                    .into_iter()
                    .map(move |t| (r.name.clone(), t))
            })
            .collect()
    }

    /// All tuples over the domain for a relation of the given arity.
    pub fn all_tuples(&self, arity: usize) -> Vec<Vec<Elem>> {
        tuples_over(&self.domain(), arity)
    }

    /// A compact key that determines the state among states of the same
    /// schema and size: relation bit blocks followed by function tables.
    pub fn fingerprint(&self) -> Box<[u64]> {
        let mut out = Vec::new();
        for bits in &self.rels {
            out.extend(bits.as_slice().iter().map(|&b| b as u64));
        }
        for table in &self.funs {
            out.extend(table.chunks(2).map(|c| {
                let hi = c.get(1).copied().unwrap_or(0) as u64;
                (hi << 32) | c[0] as u64
            }));
        }
        out.into_boxed_slice()
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "domain {:?}", self.domain())?;
        for c in self.schema.constants() {
            write!(f, "; {}={}", c.name, self.consts[c.slot])?;
        }
        for r in self.schema.relations() {
            write!(f, "; {}={{", r.name)?;
            for (i, t) in self.tuples(r.slot).iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t:?}")?;
            }
            f.write_str("}")?;
        }
        for fun in self.schema.functions() {
            write!(f, "; {}={:?}", fun.name, self.funs[fun.slot])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::ConstBinding;

    fn graph(n: u32) -> State {
        let schema = Schema::builder()
            .input("E", 2)
            .constant("s", None)
            .constant("t", Some(ConstBinding::Last))
            .build()
            .unwrap();
        State::new(Arc::new(schema), n).unwrap()
    }

    #[test]
    fn insert_delete_and_idempotence() {
        let s = graph(4);
        let s1 = s.apply_input_modification(&Modification::ins("E", &[0, 1])).unwrap();
        assert_eq!(s1.tuples_named("E").unwrap(), vec![vec![0, 1]]);
        let s2 = s1.apply_input_modification(&Modification::ins("E", &[0, 1])).unwrap();
        assert_eq!(s1, s2);
        let s3 = s2.apply_input_modification(&Modification::del("E", &[0, 1])).unwrap();
        assert_eq!(s3, s);
    }

    #[test]
    fn modification_errors() {
        let s = graph(3);
        assert!(matches!(
            s.apply_input_modification(&Modification::ins("E", &[0])),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            s.apply_input_modification(&Modification::ins("F", &[0, 1])),
            Err(Error::UnknownSymbol(_))
        ));
        assert!(matches!(
            s.apply_input_modification(&Modification::ins("E", &[0, 7])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn restrict_filters_tuples() {
        // s=0, a=1, b=2, t=3
        let mut s = graph(4);
        s.set_named("E", &[0, 1], true).unwrap();
        s.set_named("E", &[2, 3], true).unwrap();
        let r = s.restrict(&[0, 3, 1], Restriction::Closed).unwrap();
        assert_eq!(r.tuples_named("E").unwrap(), vec![vec![0, 1]]);
        assert_eq!(r.domain(), vec![0, 1, 3]);
        assert!(matches!(
            s.restrict(&[0, 1], Restriction::Closed),
            Err(Error::Precondition(_))
        ));
        assert_eq!(s.restrict(&[0, 1, 2, 3], Restriction::Closed).unwrap(), s);
    }

    #[test]
    fn restrict_functions() {
        let schema = Schema::builder().aux_fun("f", 1).build().unwrap();
        let mut s = State::new(Arc::new(schema), 3).unwrap();
        s.set_fun_named("f", &[0], 2).unwrap();
        assert!(matches!(
            s.restrict(&[0, 1], Restriction::Closed),
            Err(Error::NotClosed(_))
        ));
        let r = s.restrict(&[0, 1], Restriction::RelationOnly).unwrap();
        assert_eq!(r.fun(0, &[0]), UNDEF);
        assert_eq!(r.fun(0, &[1]), 1);
    }
}
