//! Canonical JSON forms of states and traces.
//!
//! Every document carries `"format": 1`. Maps are keyed by symbol name and
//! serialized in sorted order, so equal states produce identical text.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::program::DynamicProgram;
use crate::structure::{tuples_over, Elem, Modification, Schema, State};

pub const FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateJson {
    pub format: u32,
    pub size: u32,
    pub constants: BTreeMap<String, Elem>,
    pub relations: BTreeMap<String, Vec<Vec<Elem>>>,
    /// Each entry is the argument tuple followed by the value.
    pub functions: BTreeMap<String, Vec<Vec<Elem>>>,
}

impl StateJson {
    pub fn of(s: &State) -> StateJson {
        let schema = s.schema();
        let dom = s.domain();
        StateJson {
            format: FORMAT,
            size: s.size(),
            constants: schema
                .constants()
                .map(|c| (c.name.clone(), s.constant(c.slot)))
                .collect(),
            relations: schema
                .relations()
                .map(|r| (r.name.clone(), s.tuples(r.slot)))
                .collect(),
            functions: schema
                .functions()
                .map(|f| {
                    let rows = tuples_over(&dom, f.arity)
                        .into_iter()
                        .map(|mut args| {
                            let v = s.fun(f.slot, &args);
                            args.push(v);
                            args
                        })
                        .collect();
                    (f.name.clone(), rows)
                })
                .collect(),
        }
    }

    /// Rebuilds a full (unrestricted) state over `schema`.
    pub fn to_state(&self, schema: Arc<Schema>) -> Result<State> {
        if self.format != FORMAT {
            return Err(Error::Precondition(format!("unsupported format {}", self.format)));
        }
        let mut s = State::new(schema.clone(), self.size)?;
        for (name, &v) in &self.constants {
            let slot = schema.constant(name)?.slot;
            if s.constant(slot) != v {
                return Err(Error::domain(format!(
                    "constant `{name}` is {v} but the schema binds it to {}",
                    s.constant(slot)
                )));
            }
        }
        for (name, tuples) in &self.relations {
            for t in tuples {
                s.set_named(name, t, true)?;
            }
        }
        for (name, rows) in &self.functions {
            for row in rows {
                let (v, args) = row
                    .split_last()
                    .ok_or_else(|| Error::schema(format!("empty row for `{name}`")))?;
                s.set_fun_named(name, args, *v)?;
            }
        }
        Ok(s)
    }
}

pub fn state_to_json(s: &State) -> serde_json::Value {
    serde_json::to_value(StateJson::of(s)).expect("state json is always serializable")
}

/// Compact canonical text of a state.
pub fn state_text(s: &State) -> String {
    serde_json::to_string(&StateJson::of(s)).expect("state json is always serializable")
}

pub fn state_from_json(schema: Arc<Schema>, v: &serde_json::Value) -> Result<State> {
    let parsed: StateJson = serde_json::from_value(v.clone())?;
    parsed.to_state(schema)
}

/// SHA-256 over the canonical texts of all states, one per line.
pub fn trace_digest(states: &[State]) -> String {
    let mut h = Sha256::new();
    for s in states {
        h.update(state_text(s).as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modification: Option<Modification>,
    pub query: bool,
    pub state: StateJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceJson {
    pub format: u32,
    pub program: String,
    pub size: u32,
    pub steps: Vec<TraceStep>,
    pub digest: String,
}

impl TraceJson {
    /// `states[0]` is the initial state and `states[i]` follows `seq[i-1]`.
    pub fn new(p: &DynamicProgram, states: &[State], seq: &[Modification]) -> TraceJson {
        let steps = states
            .iter()
            .enumerate()
            .map(|(i, s)| TraceStep {
                step: i,
                modification: i.checked_sub(1).map(|j| seq[j].clone()),
                query: p.query_holds(s),
                state: StateJson::of(s),
            })
            .collect();
        TraceJson {
            format: FORMAT,
            program: p.name().to_string(),
            size: states.first().map_or(0, |s| s.size()),
            steps,
            digest: trace_digest(states),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_roundtrip_with_functions() {
        let schema = Arc::new(
            Schema::builder()
                .input("E", 2)
                .aux_fun("f", 1)
                .aux_fun("c", 0)
                .constant("s", None)
                .build()
                .unwrap(),
        );
        let mut s = State::new(schema.clone(), 3).unwrap();
        s.set_named("E", &[0, 2], true).unwrap();
        s.set_fun_named("f", &[1], 2).unwrap();
        s.set_fun_named("c", &[], 1).unwrap();
        let v = state_to_json(&s);
        assert_eq!(v["format"], 1);
        assert_eq!(v["relations"]["E"], serde_json::json!([[0, 2]]));
        let back = state_from_json(schema, &v).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let schema = Arc::new(Schema::builder().input("U", 1).build().unwrap());
        let a = State::new(schema.clone(), 2).unwrap();
        let mut b = a.clone();
        b.set_named("U", &[1], true).unwrap();
        let d1 = trace_digest(&[a.clone(), b.clone()]);
        assert_eq!(d1, trace_digest(&[a.clone(), b.clone()]));
        assert_ne!(d1, trace_digest(&[b, a]));
        assert_eq!(d1.len(), 64);
    }
}
