//! Breadth-first enumeration of an orbit, restricted to a length ball.
//!
//! A node is expanded only while its functional value is at most
//! `slack · L`. Because the orbit graph is not known to be connected inside
//! the ball, the search is repeated with slack `s + 1` until two consecutive
//! passes return the same member set.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Automorphism, McgError};
use crate::hypgeom::{classify, Classification};
use crate::orbifold::{FuchsianGroup, OrbifoldSignature};
use crate::words::{canonicalize, CurveClass, DehnReducer, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Functional {
    /// Hyperbolic translation length.
    Hyperbolic,
    /// Letter count of the canonical word.
    WordLength,
}

impl Functional {
    pub fn as_str(self) -> &'static str {
        match self {
            Functional::Hyperbolic => "hyp",
            Functional::WordLength => "word",
        }
    }

    pub fn value(self, m: &Member) -> f64 {
        match self {
            Functional::Hyperbolic => m.length,
            Functional::WordLength => m.word_length as f64,
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Functional {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hyp" | "hyperbolic" | "length" => Ok(Functional::Hyperbolic),
            "word" | "word-length" => Ok(Functional::WordLength),
            other => Err(format!("unknown functional `{other}` (expected hyp or word)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub word: Word,
    pub length: f64,
    pub word_length: u64,
}

#[derive(Clone, Debug)]
pub struct OrbitOptions {
    /// Length bound `L`.
    pub bound: f64,
    /// Initial slack factor `s >= 1`.
    pub slack: f64,
    /// Largest slack tried before giving up.
    pub slack_cap: f64,
    pub functional: Functional,
    /// Stop after this many node expansions, returning what was found.
    pub budget: Option<usize>,
    /// Further orbit elements to start from (used when resuming).
    pub extra_seeds: Vec<Word>,
}

impl OrbitOptions {
    pub fn new(bound: f64) -> Self {
        OrbitOptions {
            bound,
            slack: 1.0,
            slack_cap: 4.0,
            functional: Functional::Hyperbolic,
            budget: None,
            extra_seeds: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassStats {
    pub slack: f64,
    pub visited: usize,
    pub expanded: usize,
    pub layers: usize,
    pub members: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitBall {
    pub signature_hash: String,
    pub seed: CurveClass,
    pub bound: f64,
    /// Slack of the pass whose result was confirmed by the next one.
    pub slack: f64,
    pub functional: Functional,
    /// Sorted by functional value, then by word.
    pub members: Vec<Member>,
    pub passes: Vec<PassStats>,
    pub stabilized: bool,
}

impl OrbitBall {
    pub fn values(&self) -> Vec<f64> {
        self.members.iter().map(|m| self.functional.value(m)).collect()
    }
}

pub enum OrbitOutcome {
    Complete(OrbitBall),
    /// Budget exhausted during the pass at `slack`.
    Interrupted { slack: f64, partial: Vec<Member> },
}

/// Receives members as a pass discovers them.
pub trait MemberSink {
    fn begin_pass(&mut self, _slack: f64) -> Result<(), McgError> {
        Ok(())
    }
    fn layer(&mut self, _members: &[Member]) -> Result<(), McgError> {
        Ok(())
    }
}

pub struct NoSink;
impl MemberSink for NoSink {}

/// Conjugacy key used for deduplication. For closed surfaces of genus at
/// least two the cyclic word is first shortened against the relator.
pub struct Canonicalizer {
    sig: OrbifoldSignature,
    dehn: Option<DehnReducer>,
}

impl Canonicalizer {
    pub fn new(sig: &OrbifoldSignature) -> Self {
        let dehn = (sig.genus() >= 2 && sig.r() == 0).then(|| DehnReducer::new(sig));
        Canonicalizer { sig: sig.clone(), dehn }
    }

    pub fn key(&self, w: &Word) -> Word {
        match &self.dehn {
            Some(d) => canonicalize(&d.shorten_cyclic(w), &self.sig),
            None => canonicalize(w, &self.sig),
        }
    }
}

fn member_of(word: Word, group: &FuchsianGroup) -> Member {
    let length = match classify(&group.holonomy(&word)) {
        Classification::Hyperbolic { length } => length,
        _ => 0.0,
    };
    Member { word_length: word.letter_count(), word, length }
}

fn sort_members(members: &mut [Member], functional: Functional) {
    members.sort_by(|a, b| {
        functional
            .value(a)
            .total_cmp(&functional.value(b))
            .then_with(|| a.word.cmp(&b.word))
    });
}

struct Pass {
    members: Vec<Member>,
    stats: PassStats,
}

enum PassResult {
    Done(Pass),
    OutOfBudget(Vec<Member>),
}

#[allow(clippy::too_many_arguments)]
fn run_pass(
    seeds: &[Word],
    group: &FuchsianGroup,
    moves: &[Automorphism],
    canon: &Canonicalizer,
    opts: &OrbitOptions,
    slack: f64,
    expansions: &mut usize,
    sink: &mut dyn MemberSink,
) -> Result<PassResult, McgError> {
    let sig = group.signature();
    let f = opts.functional;
    let limit = slack * opts.bound;
    let mut visited: HashMap<Word, Member> = HashMap::new();
    let mut frontier: Vec<Word> = Vec::new();
    let mut initial: Vec<Word> = seeds.iter().map(|w| canon.key(w)).collect();
    initial.sort();
    initial.dedup();
    let mut first_layer = Vec::new();
    for w in initial {
        let m = member_of(w.clone(), group);
        if f.value(&m) <= limit {
            frontier.push(w.clone());
        }
        if f.value(&m) <= opts.bound {
            first_layer.push(m.clone());
        }
        visited.insert(w, m);
    }
    sink.begin_pass(slack)?;
    sink.layer(&first_layer)?;
    let mut layers = 0;
    let mut expanded = 0;
    while !frontier.is_empty() {
        if let Some(budget) = opts.budget {
            if *expansions + frontier.len() > budget {
                let mut partial: Vec<Member> =
                    visited.into_values().filter(|m| f.value(m) <= opts.bound).collect();
                sort_members(&mut partial, f);
                return Ok(PassResult::OutOfBudget(partial));
            }
        }
        *expansions += frontier.len();
        expanded += frontier.len();
        layers += 1;
        let mut candidates: Vec<Word> = frontier
            .par_iter()
            .flat_map_iter(|w| moves.iter().map(move |a| canon.key(&a.apply_word(w, sig))))
            .collect();
        candidates.par_sort_unstable();
        candidates.dedup();
        candidates.retain(|w| !visited.contains_key(w));
        let fresh: Vec<Member> = candidates.into_par_iter().map(|w| member_of(w, group)).collect();
        frontier = Vec::new();
        let mut layer_members = Vec::new();
        for m in fresh {
            let v = f.value(&m);
            if v <= limit {
                frontier.push(m.word.clone());
            }
            if v <= opts.bound {
                layer_members.push(m.clone());
            }
            visited.insert(m.word.clone(), m);
        }
        sink.layer(&layer_members)?;
    }
    let visited_count = visited.len();
    let mut members: Vec<Member> = visited.into_values().filter(|m| f.value(m) <= opts.bound).collect();
    sort_members(&mut members, f);
    Ok(PassResult::Done(Pass {
        stats: PassStats { slack, visited: visited_count, expanded, layers, members: members.len() },
        members,
    }))
}

fn same_set(a: &[Member], b: &[Member]) -> bool {
    a.len() == b.len() && {
        let sa: HashSet<&Word> = a.iter().map(|m| &m.word).collect();
        b.iter().all(|m| sa.contains(&m.word))
    }
}

/// Orbit of `seed` under `autos` and their inverses inside the ball
/// `F <= L`, with slack escalation. A budget in `opts` may interrupt.
pub fn enumerate(
    seed: &Word,
    group: &FuchsianGroup,
    autos: &[Automorphism],
    opts: &OrbitOptions,
    sink: &mut dyn MemberSink,
) -> Result<OrbitOutcome, McgError> {
    let sig = group.signature();
    let seed_class = CurveClass::new(seed, group);
    if !seed_class.essential || !seed_class.primitive {
        return Err(McgError::BadSeed(format!(
            "{} (essential={}, primitive={})",
            seed_class.canonical.to_text(sig),
            seed_class.essential,
            seed_class.primitive
        )));
    }
    let mut moves: Vec<Automorphism> = Vec::with_capacity(2 * autos.len());
    for a in autos {
        moves.push(a.clone());
        moves.push(a.inverse());
    }
    let canon = Canonicalizer::new(sig);
    let mut seeds = vec![seed.clone()];
    seeds.extend(opts.extra_seeds.iter().cloned());
    let mut expansions = 0usize;
    let mut slack = opts.slack.max(1.0);
    let mut passes = Vec::new();

    let run = |slack: f64, expansions: &mut usize, sink: &mut dyn MemberSink| {
        run_pass(&seeds, group, &moves, &canon, opts, slack, expansions, sink)
    };

    let mut prev = match run(slack, &mut expansions, sink)? {
        PassResult::Done(p) => p,
        PassResult::OutOfBudget(partial) => return Ok(OrbitOutcome::Interrupted { slack, partial }),
    };
    passes.push(prev.stats.clone());
    let finish = |members: Vec<Member>, slack: f64, passes: Vec<PassStats>, stabilized: bool| {
        OrbitOutcome::Complete(OrbitBall {
            signature_hash: sig.hash(),
            seed: seed_class.clone(),
            bound: opts.bound,
            slack,
            functional: opts.functional,
            members,
            passes,
            stabilized,
        })
    };
    if opts.slack_cap < slack + 1.0 {
        return Ok(finish(prev.members, slack, passes, false));
    }
    loop {
        let next_slack = slack + 1.0;
        let next = match run(next_slack, &mut expansions, sink)? {
            PassResult::Done(p) => p,
            PassResult::OutOfBudget(partial) => {
                return Ok(OrbitOutcome::Interrupted { slack: next_slack, partial })
            }
        };
        passes.push(next.stats.clone());
        if same_set(&prev.members, &next.members) {
            return Ok(finish(next.members, slack, passes, true));
        }
        if next_slack + 1.0 > opts.slack_cap {
            return Err(McgError::SlackCapReached {
                cap: opts.slack_cap,
                previous: prev.members.len(),
                last: next.members.len(),
            });
        }
        prev = next;
        slack = next_slack;
    }
}

/// Stabilized orbit ball; fails if a budget interrupts the search.
pub fn orbit_ball(
    seed: &Word,
    group: &FuchsianGroup,
    autos: &[Automorphism],
    opts: &OrbitOptions,
) -> Result<OrbitBall, McgError> {
    match enumerate(seed, group, autos, opts, &mut NoSink)? {
        OrbitOutcome::Complete(ball) => Ok(ball),
        OrbitOutcome::Interrupted { slack, partial } => Err(McgError::Checkpoint(format!(
            "interrupted at slack {slack} with {} members",
            partial.len()
        ))),
    }
}

/// Per-coset member counts of the full mapping class group orbit, and the
/// size of their union.
pub fn map_orbit_counts(
    seed: &Word,
    group: &FuchsianGroup,
    autos: &[Automorphism],
    reps: &[Automorphism],
    opts: &OrbitOptions,
) -> Result<(Vec<usize>, usize), McgError> {
    let sig = group.signature();
    let canon = Canonicalizer::new(sig);
    let mut union: HashSet<Word> = HashSet::new();
    let mut per_coset = Vec::new();
    for r in reps {
        let image = canon.key(&r.apply_word(seed, sig));
        if union.contains(&image) {
            continue;
        }
        let ball = orbit_ball(&image, group, autos, opts)?;
        per_coset.push(ball.members.len());
        union.extend(ball.members.into_iter().map(|m| m.word));
    }
    Ok((per_coset, union.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcg::twist_generators;
    use crate::orbifold::group_for;

    fn setup() -> (FuchsianGroup, Vec<Automorphism>) {
        let sig: OrbifoldSignature = "g=1 cones=3".parse().unwrap();
        let group = group_for(&sig).unwrap();
        let autos = twist_generators(&sig).unwrap();
        (group, autos)
    }

    #[test]
    fn bound_below_seed_is_empty() {
        let (group, autos) = setup();
        let a = Word::parse("a", group.signature()).unwrap();
        let la = CurveClass::new(&a, &group).length;
        let ball = orbit_ball(&a, &group, &autos, &OrbitOptions::new(0.5 * la)).unwrap();
        assert!(ball.members.is_empty());
    }

    #[test]
    fn ball_at_seed_length_contains_seed() {
        let (group, autos) = setup();
        let a = Word::parse("a", group.signature()).unwrap();
        let la = CurveClass::new(&a, &group).length;
        let ball = orbit_ball(&a, &group, &autos, &OrbitOptions::new(la + 1e-9)).unwrap();
        assert!(ball.members.iter().any(|m| m.word == a));
        assert!(ball.members.iter().all(|m| m.length <= la + 1e-9));
        assert!(ball.stabilized);
    }

    #[test]
    fn rejects_non_essential_seed() {
        let (group, autos) = setup();
        let x = Word::parse("x", group.signature()).unwrap();
        assert!(matches!(
            orbit_ball(&x, &group, &autos, &OrbitOptions::new(5.0)),
            Err(McgError::BadSeed(_))
        ));
    }

    #[test]
    fn functional_parsing() {
        assert_eq!("hyp".parse::<Functional>().unwrap(), Functional::Hyperbolic);
        assert_eq!("word".parse::<Functional>().unwrap(), Functional::WordLength);
        assert!("area".parse::<Functional>().is_err());
    }
}
