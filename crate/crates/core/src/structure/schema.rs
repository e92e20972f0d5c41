use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Elem;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Input,
    Aux,
    Builtin,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Input => "input",
            Role::Aux => "aux",
            Role::Builtin => "builtin",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Relation,
    Function,
    Constant,
}

/// Where a constant symbol points in a domain `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstBinding {
    Index(Elem),
    /// The largest element `n-1`.
    Last,
}

impl ConstBinding {
    pub fn resolve(self, size: u32) -> Result<Elem> {
        match self {
            ConstBinding::Index(i) if i < size => Ok(i),
            ConstBinding::Index(i) => Err(Error::domain(format!(
                "constant bound to {i} but domain has {size} elements"
            ))),
            ConstBinding::Last if size > 0 => Ok(size - 1),
            ConstBinding::Last => Err(Error::domain("constant in empty domain")),
        }
    }
}

impl fmt::Display for ConstBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstBinding::Index(i) => write!(f, "{i}"),
            ConstBinding::Last => f.write_str("last"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub kind: SymbolKind,
    pub arity: usize,
    pub role: Role,
    /// Position among the symbols of the same kind.
    pub slot: usize,
}

/// Relation, function and constant symbols with their roles.
///
/// Slots are dense per kind, so states store interpretations in plain vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    symbols: Vec<Symbol>,
    by_name: HashMap<String, usize>,
    relations: Vec<usize>,
    functions: Vec<usize>,
    constants: Vec<usize>,
    bindings: Vec<ConstBinding>,
}

impl Schema {
    pub fn builder() -> SchemaBuilder {
        SchemaBuilder::default()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.by_name.get(name).map(|&i| &self.symbols[i])
    }

    pub fn lookup(&self, name: &str) -> Result<&Symbol> {
        self.get(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn relation(&self, name: &str) -> Result<&Symbol> {
        match self.get(name) {
            Some(s) if s.kind == SymbolKind::Relation => Ok(s),
            Some(_) => Err(Error::schema(format!("`{name}` is not a relation symbol"))),
            None => Err(Error::UnknownSymbol(name.to_string())),
        }
    }

    pub fn function(&self, name: &str) -> Result<&Symbol> {
        match self.get(name) {
            Some(s) if s.kind == SymbolKind::Function => Ok(s),
            Some(_) => Err(Error::schema(format!("`{name}` is not a function symbol"))),
            None => Err(Error::UnknownSymbol(name.to_string())),
        }
    }

    pub fn constant(&self, name: &str) -> Result<&Symbol> {
        match self.get(name) {
            Some(s) if s.kind == SymbolKind::Constant => Ok(s),
            Some(_) => Err(Error::schema(format!("`{name}` is not a constant symbol"))),
            None => Err(Error::UnknownSymbol(name.to_string())),
        }
    }

    pub fn relations(&self) -> impl Iterator<Item = &Symbol> {
        self.relations.iter().map(|&i| &self.symbols[i])
    }

    pub fn functions(&self) -> impl Iterator<Item = &Symbol> {
        self.functions.iter().map(|&i| &self.symbols[i])
    }

    pub fn constants(&self) -> impl Iterator<Item = &Symbol> {
        self.constants.iter().map(|&i| &self.symbols[i])
    }

    pub fn relation_at(&self, slot: usize) -> &Symbol {
        &self.symbols[self.relations[slot]]
    }

    pub fn function_at(&self, slot: usize) -> &Symbol {
        &self.symbols[self.functions[slot]]
    }

    pub fn constant_at(&self, slot: usize) -> &Symbol {
        &self.symbols[self.constants[slot]]
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn num_functions(&self) -> usize {
        self.functions.len()
    }

    pub fn num_constants(&self) -> usize {
        self.constants.len()
    }

    pub fn binding(&self, const_slot: usize) -> ConstBinding {
        self.bindings[const_slot]
    }

    pub fn with_role(&self, role: Role) -> impl Iterator<Item = &Symbol> {
        self.symbols.iter().filter(move |s| s.role == role)
    }

    /// Largest arity among relation symbols (0 for an empty schema).
    pub fn max_relation_arity(&self) -> usize {
        self.relations().map(|s| s.arity).max().unwrap_or(0)
    }

    pub fn max_aux_arity(&self) -> usize {
        self.with_role(Role::Aux)
            .filter(|s| s.kind != SymbolKind::Constant)
            .map(|s| s.arity)
            .max()
            .unwrap_or(0)
    }

    /// A builder pre-filled with this schema's symbols, for extending it.
    pub fn to_builder(&self) -> SchemaBuilder {
        let mut b = SchemaBuilder::default();
        for s in &self.symbols {
            b.entries.push(match s.kind {
                SymbolKind::Constant => Entry {
                    name: s.name.clone(),
                    kind: s.kind,
                    arity: 0,
                    role: s.role,
                    binding: Some(self.bindings[s.slot]),
                },
                _ => Entry {
                    name: s.name.clone(),
                    kind: s.kind,
                    arity: s.arity,
                    role: s.role,
                    binding: None,
                },
            });
        }
        b
    }
}

#[derive(Debug, Clone)]
struct Entry {
    name: String,
    kind: SymbolKind,
    arity: usize,
    role: Role,
    binding: Option<ConstBinding>,
}

#[derive(Debug, Clone, Default)]
pub struct SchemaBuilder {
    entries: Vec<Entry>,
}

impl SchemaBuilder {
    pub fn relation(mut self, name: &str, arity: usize, role: Role) -> Self {
        self.entries.push(Entry {
            name: name.to_string(),
            kind: SymbolKind::Relation,
            arity,
            role,
            binding: None,
        });
        self
    }

    pub fn function(mut self, name: &str, arity: usize, role: Role) -> Self {
        self.entries.push(Entry {
            name: name.to_string(),
            kind: SymbolKind::Function,
            arity,
            role,
            binding: None,
        });
        self
    }

    pub fn input(self, name: &str, arity: usize) -> Self {
        self.relation(name, arity, Role::Input)
    }

    pub fn aux(self, name: &str, arity: usize) -> Self {
        self.relation(name, arity, Role::Aux)
    }

    pub fn aux_fun(self, name: &str, arity: usize) -> Self {
        self.function(name, arity, Role::Aux)
    }

    pub fn builtin_fun(self, name: &str, arity: usize) -> Self {
        self.function(name, arity, Role::Builtin)
    }

    /// Adds a constant; without an explicit binding constants take the
    /// elements `0, 1, 2, ...` in declaration order.
    pub fn constant(mut self, name: &str, binding: Option<ConstBinding>) -> Self {
        self.entries.push(Entry {
            name: name.to_string(),
            kind: SymbolKind::Constant,
            arity: 0,
            role: Role::Builtin,
            binding,
        });
        self
    }

    pub fn build(self) -> Result<Schema> {
        let mut schema = Schema {
            symbols: Vec::new(),
            by_name: HashMap::new(),
            relations: Vec::new(),
            functions: Vec::new(),
            constants: Vec::new(),
            bindings: Vec::new(),
        };
        for e in self.entries {
            if schema.by_name.contains_key(&e.name) {
                return Err(Error::schema(format!("duplicate symbol `{}`", e.name)));
            }
            if e.role == Role::Input && e.kind != SymbolKind::Relation {
                return Err(Error::schema(format!(
                    "input symbol `{}` must be a relation",
                    e.name
                )));
            }
            let slot = match e.kind {
                SymbolKind::Relation => {
                    schema.relations.push(schema.symbols.len());
                    schema.relations.len() - 1
                }
                SymbolKind::Function => {
                    schema.functions.push(schema.symbols.len());
                    schema.functions.len() - 1
                }
                SymbolKind::Constant => {
                    let idx = schema.constants.len();
                    schema.constants.push(schema.symbols.len());
                    schema
                        .bindings
                        .push(e.binding.unwrap_or(ConstBinding::Index(idx as Elem)));
                    idx
                }
            };
            schema.by_name.insert(e.name.clone(), schema.symbols.len());
            schema.symbols.push(Symbol {
                name: e.name,
                kind: e.kind,
                arity: e.arity,
                role: e.role,
                slot,
            });
        }
        Ok(schema)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_functional_input() {
        assert!(Schema::builder().input("E", 2).aux("E", 1).build().is_err());
        assert!(Schema::builder()
            .function("f", 1, Role::Input)
            .build()
            .is_err());
    }

    #[test]
    fn slots_are_dense_per_kind() {
        let s = Schema::builder()
            .input("E", 2)
            .aux_fun("f", 1)
            .aux("Q", 0)
            .constant("s", None)
            .constant("t", Some(ConstBinding::Last))
            .build()
            .unwrap();
        assert_eq!(s.relation("Q").unwrap().slot, 1);
        assert_eq!(s.function("f").unwrap().slot, 0);
        assert_eq!(s.binding(0), ConstBinding::Index(0));
        assert_eq!(s.binding(1).resolve(5).unwrap(), 4);
        assert!(s.relation("f").is_err());
        assert_eq!(s.max_aux_arity(), 1);
    }
}
