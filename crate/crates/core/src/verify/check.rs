use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Guard;
use crate::dsl::print_script;
use crate::error::{Error, Result};
use crate::program::DynamicProgram;
use crate::serial::{trace_digest, FORMAT};
use crate::structure::{Elem, ModKind, Modification, State};

/// Upper bound on the number of sequences an exhaustive check may explore
/// unless the cap is overridden.
pub const DEFAULT_STATE_CAP: u64 = 100_000_000;

/// Frontier states handled per parallel batch.
const BATCH: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Random { samples: usize, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub domain_size: u32,
    pub max_len: usize,
    pub mode: Mode,
    pub honest_only: bool,
    pub guard: Guard,
    /// Initial databases have at most this many tuples (0: only the empty one).
    pub init_db_max: usize,
    pub state_cap: u64,
    pub override_cap: bool,
    /// Worker threads; 0 picks the rayon default.
    pub jobs: usize,
}

impl CheckConfig {
    pub fn exhaustive(domain_size: u32, max_len: usize) -> Self {
        CheckConfig {
            domain_size,
            max_len,
            mode: Mode::Exhaustive,
            honest_only: true,
            guard: Guard::Any,
            init_db_max: 0,
            state_cap: DEFAULT_STATE_CAP,
            override_cap: false,
            jobs: 0,
        }
    }

    pub fn random(domain_size: u32, max_len: usize, samples: usize, seed: u64) -> Self {
        CheckConfig {
            mode: Mode::Random { samples, seed },
            ..CheckConfig::exhaustive(domain_size, max_len)
        }
    }

    pub fn honest(mut self, honest_only: bool) -> Self {
        self.honest_only = honest_only;
        self
    }

    pub fn guard(mut self, guard: Guard) -> Self {
        self.guard = guard;
        self
    }

    pub fn jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    pub fn init_db_max(mut self, n: usize) -> Self {
        self.init_db_max = n;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckStats {
    #[serde(flatten)]
    pub mode: Mode,
    pub domain_size: u32,
    pub max_len: usize,
    pub honest_only: bool,
    pub guard: String,
    /// Distinct states (exhaustive) or sampled sequences (random).
    pub explored: u64,
    pub transitions: u64,
}

/// A replayable divergence between a program and its oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub format: u32,
    pub program: String,
    pub size: u32,
    pub initial_db: Vec<(String, Vec<Elem>)>,
    pub sequence: Vec<Modification>,
    /// 1-based index of the diverging step; 0 is the initial state.
    pub step: usize,
    pub expected: bool,
    pub produced: bool,
    /// Digest of the states from the initial one up to `step`.
    pub trace_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Counterexample {
    /// Scans the run of `seq` from `init(initial)` and returns the first
    /// step whose query value disagrees with the oracle. The result has
    /// already passed [`Counterexample::validate`].
    pub fn first_divergence<O>(
        p: &DynamicProgram,
        oracle: &O,
        size: u32,
        initial: &[(String, Vec<Elem>)],
        seq: &[Modification],
    ) -> Result<Option<Counterexample>>
    where
        O: Fn(&State) -> Result<bool> + ?Sized,
    {
        let s0 = p.init_state(size, initial)?;
        let trace = p.run(&s0, seq, false)?;
        for (i, s) in trace.iter().enumerate() {
            let expected = oracle(s)?;
            let produced = p.query_holds(s);
            if expected != produced {
                let cex = Counterexample {
                    format: FORMAT,
                    program: p.name().to_string(),
                    size,
                    initial_db: initial.to_vec(),
                    sequence: seq[..i].to_vec(),
                    step: i,
                    expected,
                    produced,
                    trace_digest: trace_digest(&trace[..=i]),
                    seed: None,
                };
                cex.validate(p, oracle)?;
                return Ok(Some(cex));
            }
        }
        Ok(None)
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    /// All states of the recorded run, initial state first.
    pub fn replay(&self, p: &DynamicProgram) -> Result<Vec<State>> {
        let s0 = p.init_state(self.size, &self.initial_db)?;
        p.run(&s0, &self.sequence[..self.step], false)
    }

    /// Replays the run and confirms the recorded values and digest.
    pub fn validate<O>(&self, p: &DynamicProgram, oracle: &O) -> Result<()>
    where
        O: Fn(&State) -> Result<bool> + ?Sized,
    {
        if self.step > self.sequence.len() {
            return Err(Error::Precondition(format!(
                "step {} is past the end of a {}-step sequence",
                self.step,
                self.sequence.len()
            )));
        }
        let trace = self.replay(p)?;
        let last = trace.last().expect("non-empty trace");
        let produced = p.query_holds(last);
        let expected = oracle(last)?;
        let digest = trace_digest(&trace);
        if produced != self.produced || expected != self.expected || produced == expected {
            return Err(Error::Program(format!(
                "counterexample does not replay: recorded {}/{}, replay gives {}/{}",
                self.expected, self.produced, expected, produced
            )));
        }
        if digest != self.trace_digest {
            return Err(Error::Program("counterexample trace digest mismatch".into()));
        }
        Ok(())
    }

    /// The inputs in modification-script form.
    pub fn script(&self) -> String {
        print_script(self.size, &self.initial_db, &self.sequence[..self.step])
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "counterexample for {} on domain {}: step {} expected {} but the program produced {}",
            self.program, self.size, self.step, self.expected, self.produced
        )?;
        if !self.initial_db.is_empty() {
            let db: Vec<String> = self
                .initial_db
                .iter()
                .map(|(r, t)| Modification::ins(r, t).to_string())
                .collect();
            writeln!(f, "initial {}", db.join(" "))?;
        }
        for (i, m) in self.sequence[..self.step].iter().enumerate() {
            writeln!(f, "  {:>3}. {m}", i + 1)?;
        }
        write!(f, "trace digest {}", self.trace_digest)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Ok(CheckStats),
    Counterexample(Box<Counterexample>),
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Ok(_) => 0,
            Verdict::Counterexample(_) => 1,
            Verdict::Inconclusive { .. } => 2,
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok(_))
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Counterexample(c) => Some(c),
            _ => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("verdicts are serializable");
        if let serde_json::Value::Object(m) = &mut v {
            m.entry("format").or_insert(FORMAT.into());
        }
        v
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Ok(st) => {
                write!(
                    f,
                    "ok up to bounds: domain {}, length <= {}, {} {}, {} transitions",
                    st.domain_size,
                    st.max_len,
                    st.explored,
                    match st.mode {
                        Mode::Exhaustive => "states",
                        Mode::Random { .. } => "samples",
                    },
                    st.transitions
                )?;
                if let Mode::Random { seed, .. } = st.mode {
                    write!(f, ", seed {seed}")?;
                }
                Ok(())
            }
            Verdict::Counterexample(c) => write!(f, "{c}"),
            Verdict::Inconclusive { reason } => write!(f, "inconclusive: {reason}"),
        }
    }
}

/// Number of sequences of length at most `len` over `branching` choices,
/// saturating.
fn sequence_bound(branching: u64, len: usize, starts: u64) -> u64 {
    let mut total: u64 = 0;
    let mut level: u64 = starts;
    for _ in 0..=len {
        total = total.saturating_add(level);
        level = level.saturating_mul(branching);
    }
    total
}

struct Setup {
    cands: Vec<Modification>,
    inits: Vec<Vec<(String, Vec<Elem>)>>,
}

fn setup(p: &DynamicProgram, cfg: &CheckConfig) -> Result<Setup> {
    if p.query_arity() != 0 {
        return Err(Error::Precondition(format!(
            "query `{}` is not 0-ary; only Boolean queries can be checked",
            p.query()
        )));
    }
    let blank = p.blank_state(cfg.domain_size)?;
    let cands = cfg.guard.candidate_modifications(&blank)?;
    let tuples: Vec<(String, Vec<Elem>)> = cands
        .iter()
        .filter(|m| m.kind == ModKind::Ins)
        .map(|m| (m.rel.clone(), m.tuple.clone()))
        .collect();
    let mut inits = vec![Vec::new()];
    if matches!(cfg.mode, Mode::Exhaustive) {
        let mut frontier = vec![(0usize, Vec::new())];
        for _ in 0..cfg.init_db_max {
            let mut next = Vec::new();
            for (from, db) in &frontier {
                for (i, t) in tuples.iter().enumerate().skip(*from) {
                    let mut bigger: Vec<(String, Vec<Elem>)> = db.clone();
                    bigger.push(t.clone());
                    if admits_db(p, cfg, &bigger)? {
                        next.push((i + 1, bigger));
                    }
                }
            }
            inits.extend(next.iter().map(|(_, db)| db.clone()));
            frontier = next;
        }
    }
    Ok(Setup { cands, inits })
}

fn admits_db(p: &DynamicProgram, cfg: &CheckConfig, db: &[(String, Vec<Elem>)]) -> Result<bool> {
    if cfg.guard == Guard::Any {
        return Ok(true);
    }
    let mut s = p.blank_state(cfg.domain_size)?;
    for (r, t) in db {
        s.set_named(r, t, true)?;
    }
    cfg.guard.admits(&s)
}

/// Whether `m` may be applied to `s` under the configuration.
fn applicable(cfg: &CheckConfig, s: &State, m: &Modification) -> Result<bool> {
    if cfg.honest_only && !s.is_honest(m)? {
        return Ok(false);
    }
    if cfg.guard == Guard::Any {
        return Ok(true);
    }
    cfg.guard.admits(&s.apply_input_modification(m)?)
}

/// Compares the query symbol of `p` with `oracle` after every step of every
/// admissible sequence within the bounds.
///
/// Exhaustive mode explores states breadth first with full-state
/// deduplication, so the reported counterexample is a shortest one and,
/// among those, the lexicographically least; the result does not depend on
/// the number of workers. Random mode draws `samples` sequences of length
/// `max_len` from per-sample streams of a seeded generator and reports the
/// lowest failing sample.
pub fn check_maintenance<O>(p: &DynamicProgram, oracle: &O, cfg: &CheckConfig) -> Result<Verdict>
where
    O: Fn(&State) -> Result<bool> + Sync,
{
    let run = || match cfg.mode {
        Mode::Exhaustive => exhaustive(p, oracle, cfg),
        Mode::Random { samples, seed } => random(p, oracle, cfg, samples, seed),
    };
    if cfg.jobs == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::Resource(format!("thread pool: {e}")))?
            .install(run)
    }
}

fn stats(cfg: &CheckConfig, explored: u64, transitions: u64) -> CheckStats {
    CheckStats {
        mode: cfg.mode,
        domain_size: cfg.domain_size,
        max_len: cfg.max_len,
        honest_only: cfg.honest_only,
        guard: cfg.guard.to_string(),
        explored,
        transitions,
    }
}

const ROOT: u32 = u32::MAX;

fn exhaustive<O>(p: &DynamicProgram, oracle: &O, cfg: &CheckConfig) -> Result<Verdict>
where
    O: Fn(&State) -> Result<bool> + Sync,
{
    let Setup { cands, inits } = setup(p, cfg)?;
    let branching = if cfg.honest_only { cands.len() / 2 } else { cands.len() } as u64;
    let bound = sequence_bound(branching, cfg.max_len, inits.len() as u64);
    if bound > cfg.state_cap && !cfg.override_cap {
        return Err(Error::Resource(format!(
            "exhaustive check may visit up to {bound} sequences (cap {}); \
             lower the bounds, use random mode or override the cap",
            cfg.state_cap
        )));
    }

    // arena[i] = (parent id or ROOT, modification index or initial db index)
    let mut arena: Vec<(u32, u32)> = Vec::new();
    let mut seen: HashSet<Box<[u64]>> = HashSet::new();
    let mut frontier: Vec<(u32, State)> = Vec::new();
    let mut transitions = 0u64;

    let path = |arena: &[(u32, u32)], mut id: u32| -> (usize, Vec<Modification>) {
        let mut seq = Vec::new();
        loop {
            let (parent, idx) = arena[id as usize];
            if parent == ROOT {
                seq.reverse();
                return (idx as usize, seq);
            }
            seq.push(cands[idx as usize].clone());
            id = parent;
        }
    };
    let report = |arena: &[(u32, u32)], id: u32| -> Result<Verdict> {
        let (init, seq) = path(arena, id);
        let cex = Counterexample::first_divergence(p, oracle, cfg.domain_size, &inits[init], &seq)?
            .ok_or_else(|| Error::Program("divergence did not reproduce on replay".into()))?;
        Ok(Verdict::Counterexample(Box::new(cex)))
    };

    for (i, db) in inits.iter().enumerate() {
        let s = p.init_state(cfg.domain_size, db)?;
        if !seen.insert(s.fingerprint()) {
            continue;
        }
        arena.push((ROOT, i as u32));
        let id = (arena.len() - 1) as u32;
        if p.query_holds(&s) != oracle(&s)? {
            return report(&arena, id);
        }
        frontier.push((id, s));
    }

    for _ in 0..cfg.max_len {
        let mut next = Vec::new();
        for batch in frontier.chunks(BATCH) {
            type Succ = (u32, u32, Box<[u64]>, State, bool);
            let produced: Vec<(u64, Vec<Succ>)> = batch
                .par_iter()
                .map(|(id, s)| -> Result<_> {
                    let mut applied = 0u64;
                    let mut out = Vec::new();
                    for (mi, m) in cands.iter().enumerate() {
                        if !applicable(cfg, s, m)? {
                            continue;
                        }
                        applied += 1;
                        let t = p.apply(s, m)?;
                        let key = t.fingerprint();
                        if seen.contains(&key) {
                            continue;
                        }
                        let ok = p.query_holds(&t) == oracle(&t)?;
                        out.push((*id, mi as u32, key, t, ok));
                    }
                    Ok((applied, out))
                })
                .collect::<Result<_>>()?;
            transitions += produced.iter().map(|(n, _)| n).sum::<u64>();
            for (parent, mi, key, t, ok) in produced.into_iter().flat_map(|(_, v)| v) {
                if !seen.insert(key) {
                    continue;
                }
                arena.push((parent, mi));
                let id = (arena.len() - 1) as u32;
                if !ok {
                    return report(&arena, id);
                }
                next.push((id, t));
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(Verdict::Ok(stats(cfg, seen.len() as u64, transitions)))
}

fn random<O>(p: &DynamicProgram, oracle: &O, cfg: &CheckConfig, samples: usize, seed: u64) -> Result<Verdict>
where
    O: Fn(&State) -> Result<bool> + Sync,
{
    let Setup { cands, .. } = setup(p, cfg)?;
    let tuples: Vec<(String, Vec<Elem>)> = cands
        .iter()
        .filter(|m| m.kind == ModKind::Ins)
        .map(|m| (m.rel.clone(), m.tuple.clone()))
        .collect();

    let sample = |i: usize| -> Result<(u64, Option<Counterexample>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut db: Vec<(String, Vec<Elem>)> = Vec::new();
        if cfg.init_db_max > 0 {
            let want = rng.gen_range(0..=cfg.init_db_max);
            let mut order = tuples.clone();
            order.shuffle(&mut rng);
            for t in order {
                if db.len() == want {
                    break;
                }
                db.push(t);
                if !admits_db(p, cfg, &db)? {
                    db.pop();
                }
            }
            db.sort();
        }
        let mut s = p.init_state(cfg.domain_size, &db)?;
        let mut seq = Vec::with_capacity(cfg.max_len);
        let mut diverged = p.query_holds(&s) != oracle(&s)?;
        let mut steps = 0u64;
        while !diverged && seq.len() < cfg.max_len {
            let options: Vec<&Modification> = cands
                .iter()
                .map(|m| applicable(cfg, &s, m).map(|ok| ok.then_some(m)))
                .filter_map(Result::transpose)
                .collect::<Result<_>>()?;
            let Some(&m) = options.choose(&mut rng) else {
                break;
            };
            s = p.apply(&s, m)?;
            seq.push(m.clone());
            steps += 1;
            diverged = p.query_holds(&s) != oracle(&s)?;
        }
        if !diverged {
            return Ok((steps, None));
        }
        let cex = Counterexample::first_divergence(p, oracle, cfg.domain_size, &db, &seq)?
            .ok_or_else(|| Error::Program("divergence did not reproduce on replay".into()))?;
        Ok((steps, Some(cex.with_seed(Some(seed)))))
    };

    let results: Vec<Result<(u64, Option<Counterexample>)>> = (0..samples).into_par_iter().map(sample).collect();
    let mut transitions = 0u64;
    for r in results {
        let (steps, cex) = r?;
        transitions += steps;
        if let Some(c) = cex {
            return Ok(Verdict::Counterexample(Box::new(c)));
        }
    }
    Ok(Verdict::Ok(stats(cfg, samples as u64, transitions)))
}
