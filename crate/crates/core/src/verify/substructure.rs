use std::fmt;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::similarity::k_similar;
use crate::corpus::Guard;
use crate::error::{Error, Result};
use crate::program::DynamicProgram;
use crate::structure::{check_isomorphism, Elem, ElemMap, ModKind, Modification, Restriction, Role, State};

/// Outcome of one substructure trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Trial {
    /// The hypothesis did not hold for this pair; nothing was checked.
    Skipped(&'static str),
    Held,
    Violated,
}

/// Extends `a ↦ b` by the constants and returns the two subsets and the map,
/// or `None` if that is not an injective map.
fn with_constants(s: &State, t: &State, a: &[Elem], b: &[Elem]) -> Option<(Vec<Elem>, Vec<Elem>, ElemMap)> {
    let mut pi = ElemMap::zip(a, b)?;
    for (&c, &d) in s.constants().iter().zip(t.constants()) {
        if !pi.bind(c, d) {
            return None;
        }
    }
    if !pi.is_injective() {
        return None;
    }
    let (xs, ys): (Vec<Elem>, Vec<Elem>) = pi.iter().unzip();
    Some((xs, ys, pi))
}

fn restricted_iso(s: &State, t: &State, xs: &[Elem], ys: &[Elem], pi: &ElemMap) -> Result<bool> {
    let rs = s.restrict(xs, Restriction::RelationOnly)?;
    let rt = t.restrict(ys, Restriction::RelationOnly)?;
    check_isomorphism(&rs, &rt, pi)
}

/// One instance of the substructure lemma.
///
/// `a` and `b` are extended by the constants. Without `depth` the
/// hypothesis is that the restrictions to `a` and `b` are isomorphic via the
/// componentwise map and the conclusion is the same for the states after
/// `alpha` and its image. With `depth = m` the hypothesis is m-similarity
/// and the conclusion 0-similarity.
pub fn substructure_trial(
    p: &DynamicProgram,
    s: &State,
    t: &State,
    a: &[Elem],
    b: &[Elem],
    alpha: &[Modification],
    depth: Option<usize>,
) -> Result<Trial> {
    if a.len() != b.len() {
        return Err(Error::Precondition("subset tuples differ in length".into()));
    }
    let Some((xs, ys, pi)) = with_constants(s, t, a, b) else {
        return Ok(Trial::Skipped("map is not injective"));
    };
    let beta = alpha
        .iter()
        .map(|m| {
            pi.apply(&m.tuple)
                .map(|tup| Modification { tuple: tup, ..m.clone() })
                .ok_or_else(|| Error::Precondition(format!("{m} leaves the subset")))
        })
        .collect::<Result<Vec<_>>>()?;
    match depth {
        None => {
            if !restricted_iso(s, t, &xs, &ys, &pi)? {
                return Ok(Trial::Skipped("restrictions are not isomorphic"));
            }
        }
        Some(m) => {
            if k_similar(s, &xs, t, &ys, m)?.is_none() {
                return Ok(Trial::Skipped("subsets are not similar at the required depth"));
            }
        }
    }
    let s2 = p.run_final(s, alpha)?;
    let t2 = p.run_final(t, &beta)?;
    let held = match depth {
        None => restricted_iso(&s2, &t2, &xs, &ys, &pi)?,
        Some(_) => k_similar(&s2, &xs, &t2, &ys, 0)?.is_some(),
    };
    Ok(if held { Trial::Held } else { Trial::Violated })
}

/// The similarity depth used for the QF suite: `l·k + k` for sequences of
/// length `l` and a program of nesting depth `k`.
pub fn similarity_depth(p: &DynamicProgram, max_len: usize) -> usize {
    let k = p.nesting_depth();
    max_len * k + k
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    /// Trials whose hypothesis holds; the suite stops once it has this many.
    pub samples: usize,
    pub seed: u64,
    pub domain_size: u32,
    /// Length bound of the random runs producing the two states.
    pub prefix_len: usize,
    /// Length bound of the π-respecting sequences.
    pub max_len: usize,
    /// Largest number of non-constant elements in a subset.
    pub subset_size: usize,
    /// `None`: isomorphism (relational lemma). `Some(m)`: m-similarity.
    pub depth: Option<usize>,
    pub guard: Guard,
    /// Attempts per requested sample before giving up.
    pub attempt_factor: usize,
    /// Candidate target subsets tried per attempt.
    pub search_limit: usize,
}

impl SuiteConfig {
    pub fn relational(domain_size: u32, samples: usize, seed: u64) -> Self {
        SuiteConfig {
            samples,
            seed,
            domain_size,
            prefix_len: 6,
            max_len: 4,
            subset_size: 2,
            depth: None,
            guard: Guard::Any,
            attempt_factor: 20,
            search_limit: 200,
        }
    }

    /// m-similarity with `m` from [`similarity_depth`].
    pub fn functional(p: &DynamicProgram, domain_size: u32, samples: usize, seed: u64) -> Self {
        let base = SuiteConfig::relational(domain_size, samples, seed);
        SuiteConfig {
            depth: Some(similarity_depth(p, base.max_len)),
            subset_size: 1,
            ..base
        }
    }

    pub fn guard(mut self, guard: Guard) -> Self {
        self.guard = guard;
        self
    }
}

/// Everything needed to rebuild a violating trial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstructureWitness {
    pub program: String,
    pub size: u32,
    pub run_s: Vec<Modification>,
    pub run_t: Vec<Modification>,
    pub a: Vec<Elem>,
    pub b: Vec<Elem>,
    pub alpha: Vec<Modification>,
    pub depth: Option<usize>,
    pub sample: usize,
}

impl SubstructureWitness {
    /// Re-runs the trial; a genuine witness yields [`Trial::Violated`].
    pub fn replay(&self, p: &DynamicProgram) -> Result<Trial> {
        let s0 = p.init_state(self.size, &[])?;
        let s = p.run_final(&s0, &self.run_s)?;
        let t = p.run_final(&s0, &self.run_t)?;
        substructure_trial(p, &s, &t, &self.a, &self.b, &self.alpha, self.depth)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SuiteVerdict {
    Ok { held: usize, skipped: usize },
    Violation(Box<SubstructureWitness>),
    Inconclusive { held: usize, skipped: usize },
}

impl SuiteVerdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            SuiteVerdict::Ok { .. } => 0,
            SuiteVerdict::Violation(_) => 1,
            SuiteVerdict::Inconclusive { .. } => 2,
        }
    }
}

impl fmt::Display for SuiteVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuiteVerdict::Ok { held, skipped } => {
                write!(f, "ok: {held} trials held ({skipped} pairs skipped)")
            }
            SuiteVerdict::Violation(w) => write!(
                f,
                "violation at sample {}: subsets {:?} and {:?} after {}",
                w.sample,
                w.a,
                w.b,
                w.alpha.iter().join(", ")
            ),
            SuiteVerdict::Inconclusive { held, skipped } => {
                write!(f, "inconclusive: only {held} admissible pairs found ({skipped} skipped)")
            }
        }
    }
}

fn random_run(
    p: &DynamicProgram,
    s0: &State,
    cands: &[Modification],
    guard: Guard,
    len: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(State, Vec<Modification>)> {
    let mut s = s0.clone();
    let mut seq = Vec::with_capacity(len);
    for _ in 0..len {
        let mut options = Vec::new();
        for m in cands {
            if s.is_honest(m)? && (guard == Guard::Any || guard.admits(&s.apply_input_modification(m)?)?) {
                options.push(m);
            }
        }
        let Some(&m) = options.choose(rng) else { break };
        s = p.apply(&s, m)?;
        seq.push(m.clone());
    }
    Ok((s, seq))
}

enum Attempt {
    Checked(Trial, Option<Box<SubstructureWitness>>),
    NoPair,
}

fn attempt(p: &DynamicProgram, cfg: &SuiteConfig, cands: &[Modification], s0: &State, i: usize) -> Result<Attempt> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(i as u64);
    let consts = s0.constants().to_vec();
    let free: Vec<Elem> = (0..cfg.domain_size).filter(|e| !consts.contains(e)).collect();
    if free.is_empty() {
        return Ok(Attempt::NoPair);
    }

    let len_s = rng.gen_range(0..=cfg.prefix_len);
    let (s, run_s) = random_run(p, s0, cands, cfg.guard, len_s, &mut rng)?;
    let strategy = rng.gen_range(0..3);
    let mut sigma: Vec<Elem> = (0..cfg.domain_size).collect();
    let (t, run_t) = match strategy {
        0 => (s.clone(), run_s.clone()),
        1 => {
            let mut images = free.clone();
            images.shuffle(&mut rng);
            for (&from, &to) in free.iter().zip(&images) {
                sigma[from as usize] = to;
            }
            let moved: Vec<Modification> = run_s.iter().map(|m| m.mapped(|e| sigma[e as usize])).collect();
            let t = p.run_final(s0, &moved)?;
            (t, moved)
        }
        _ => {
            let len_t = rng.gen_range(0..=cfg.prefix_len);
            random_run(p, s0, cands, cfg.guard, len_t, &mut rng)?
        }
    };

    let width = rng.gen_range(1..=cfg.subset_size.min(free.len()).max(1));
    let mut a: Vec<Elem> = free.choose_multiple(&mut rng, width).copied().collect();
    a.sort_unstable();

    // Target candidates: the transported image first, then injective maps
    // into the free elements starting at a random offset.
    let mut targets: Vec<Vec<Elem>> = Vec::new();
    if strategy == 1 {
        targets.push(a.iter().map(|&e| sigma[e as usize]).collect());
    }
    let all: Vec<Vec<Elem>> = free.iter().copied().permutations(width).collect();
    let offset = rng.gen_range(0..all.len());
    targets.extend(all.iter().cycle().skip(offset).take(all.len().min(cfg.search_limit)).cloned());

    let mut found = None;
    for b in targets {
        let ok = match with_constants(&s, &t, &a, &b) {
            None => false,
            Some((xs, ys, pi)) => match cfg.depth {
                None => restricted_iso(&s, &t, &xs, &ys, &pi)?,
                Some(m) => k_similar(&s, &xs, &t, &ys, m)?.is_some(),
            },
        };
        if ok {
            found = Some(b);
            break;
        }
    }
    let Some(b) = found else {
        return Ok(Attempt::NoPair);
    };

    let mut places = a.clone();
    places.extend(consts.iter().copied());
    places.sort_unstable();
    places.dedup();
    let inputs: Vec<(String, usize)> = p
        .schema()
        .with_role(Role::Input)
        .map(|r| (r.name.clone(), r.arity))
        .collect();
    let len_alpha = rng.gen_range(1..=cfg.max_len.max(1));
    let mut alpha = Vec::with_capacity(len_alpha);
    for _ in 0..len_alpha {
        let (rel, arity) = inputs.choose(&mut rng).expect("programs have an input relation");
        let tuple: Vec<Elem> = (0..*arity).map(|_| *places.choose(&mut rng).unwrap()).collect();
        let kind = if rng.gen_bool(0.6) { ModKind::Ins } else { ModKind::Del };
        alpha.push(Modification {
            kind,
            rel: rel.clone(),
            tuple,
        });
    }
    let trial = substructure_trial(p, &s, &t, &a, &b, &alpha, cfg.depth)?;
    let witness = (trial == Trial::Violated).then(|| {
        Box::new(SubstructureWitness {
            program: p.name().to_string(),
            size: cfg.domain_size,
            run_s,
            run_t,
            a,
            b,
            alpha,
            depth: cfg.depth,
            sample: i,
        })
    });
    Ok(Attempt::Checked(trial, witness))
}

/// Randomized substructure-lemma suite: samples reachable state pairs,
/// subset pairs satisfying the hypothesis and π-respecting sequences, and
/// checks the conclusion. Any violation means the evaluator is wrong.
pub fn substructure_property(p: &DynamicProgram, cfg: &SuiteConfig) -> Result<SuiteVerdict> {
    if cfg.depth.is_none() && !p.is_relational() {
        return Err(Error::Precondition(
            "programs with functions need a similarity depth".into(),
        ));
    }
    let s0 = p.init_state(cfg.domain_size, &[])?;
    let cands = cfg.guard.candidate_modifications(&s0)?;
    let limit = cfg.samples.saturating_mul(cfg.attempt_factor.max(1));
    let (mut held, mut skipped) = (0usize, 0usize);
    let mut next = 0usize;
    while held < cfg.samples && next < limit {
        let end = (next + 64).min(limit);
        let batch: Vec<Attempt> = (next..end)
            .into_par_iter()
            .map(|i| attempt(p, cfg, &cands, &s0, i))
            .collect::<Result<_>>()?;
        next = end;
        for a in batch {
            if held == cfg.samples {
                break;
            }
            match a {
                Attempt::NoPair | Attempt::Checked(Trial::Skipped(_), _) => skipped += 1,
                Attempt::Checked(Trial::Held, _) => held += 1,
                Attempt::Checked(Trial::Violated, w) => {
                    return Ok(SuiteVerdict::Violation(w.expect("violations carry a witness")))
                }
            }
        }
    }
    Ok(if held == cfg.samples {
        SuiteVerdict::Ok { held, skipped }
    } else {
        SuiteVerdict::Inconclusive { held, skipped }
    })
}
