use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::queries::is_k_layered;
use crate::structure::{tuples_over, Modification, Role, State};

/// Which input databases a check may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Guard {
    Any,
    OneLayered,
    TwoLayered,
}

impl Guard {
    pub fn admits(&self, db: &State) -> Result<bool> {
        match self {
            Guard::Any => Ok(true),
            Guard::OneLayered => is_k_layered(db, 1),
            Guard::TwoLayered => is_k_layered(db, 2),
        }
    }

    /// Tuples that may ever occur in an admitted database, per input
    /// relation; modifications outside this set are never generated.
    pub fn candidate_modifications(&self, db: &State) -> Result<Vec<Modification>> {
        let schema = db.schema().clone();
        let mut out = Vec::new();
        for r in schema.with_role(Role::Input) {
            for t in tuples_over(&db.domain(), r.arity) {
                let m = Modification::ins(&r.name, &t);
                if self.tuple_allowed(db, &m)? {
                    out.push(m.clone());
                    out.push(Modification::del(&r.name, &t));
                }
            }
        }
        out.sort();
        Ok(out)
    }

    fn tuple_allowed(&self, db: &State, m: &Modification) -> Result<bool> {
        if *self == Guard::Any {
            return Ok(true);
        }
        let mut g = db.input_only();
        for (rel, t) in db.input_tuples() {
            g.set_named(&rel, &t, false)?;
        }
        g.set_named(&m.rel, &m.tuple, true)?;
        self.admits(&g)
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Guard::Any => "any",
            Guard::OneLayered => "1-layered",
            Guard::TwoLayered => "2-layered",
        })
    }
}

impl FromStr for Guard {
    type Err = Error;

    fn from_str(s: &str) -> Result<Guard> {
        match s {
            "any" => Ok(Guard::Any),
            "1-layered" => Ok(Guard::OneLayered),
            "2-layered" => Ok(Guard::TwoLayered),
            other => Err(Error::Precondition(format!(
                "unknown guard `{other}` (known: any, 1-layered, 2-layered)"
            ))),
        }
    }
}
