use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Elem;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModKind {
    Ins,
    Del,
}

impl ModKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ModKind::Ins => "ins",
            ModKind::Del => "del",
        }
    }
}

/// A concrete modification `ins R(a)` or `del R(a)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Modification {
    pub kind: ModKind,
    pub rel: String,
    pub tuple: Vec<Elem>,
}

impl Modification {
    pub fn ins(rel: &str, tuple: &[Elem]) -> Self {
        Modification {
            kind: ModKind::Ins,
            rel: rel.to_string(),
            tuple: tuple.to_vec(),
        }
    }

    pub fn del(rel: &str, tuple: &[Elem]) -> Self {
        Modification {
            kind: ModKind::Del,
            rel: rel.to_string(),
            tuple: tuple.to_vec(),
        }
    }

    /// The same modification on the image of its tuple.
    pub fn mapped(&self, f: impl Fn(Elem) -> Elem) -> Self {
        Modification {
            kind: self.kind,
            rel: self.rel.clone(),
            tuple: self.tuple.iter().map(|&e| f(e)).collect(),
        }
    }
}

impl fmt::Display for Modification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}(", self.kind.keyword(), self.rel)?;
        for (i, e) in self.tuple.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for Modification {
    type Err = Error;

    /// Parses the numeric form printed by `Display`, e.g. `del E(0,3)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Precondition(format!("malformed modification `{s}`"));
        let s = s.trim();
        let (kw, rest) = s.split_once(char::is_whitespace).ok_or_else(bad)?;
        let kind = match kw {
            "ins" => ModKind::Ins,
            "del" => ModKind::Del,
            _ => return Err(bad()),
        };
        let rest = rest.trim();
        let open = rest.find('(').ok_or_else(bad)?;
        let inner = rest[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let rel = rest[..open].trim().to_string();
        if rel.is_empty() {
            return Err(bad());
        }
        let tuple = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|p| p.trim().parse::<Elem>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?
        };
        Ok(Modification { kind, rel, tuple })
    }
}

impl Serialize for Modification {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Modification {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_parse_roundtrip() {
        let m = Modification::del("E", &[0, 3]);
        assert_eq!(m.to_string(), "del E(0,3)");
        assert_eq!("del E(0, 3)".parse::<Modification>().unwrap(), m);
        assert_eq!("ins Z()".parse::<Modification>().unwrap().tuple.len(), 0);
        assert!("put E(1)".parse::<Modification>().is_err());
    }
}
