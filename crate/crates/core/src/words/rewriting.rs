//! Knuth-Bendix completion of the full presentation, torsion relators
//! included, under the shortlex order.
//!
//! Completion is capped. A capped system still only rewrites a word into an
//! equal one, so reaching the empty word proves triviality; only a system
//! that finished completion also proves non-triviality.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use super::{GenId, Word};
use crate::orbifold::OrbifoldSignature;

/// Letter `2k` is generator `k`, letter `2k + 1` its inverse.
type Letter = u16;

fn encode(gen: GenId, exp: i32) -> Letter {
    2 * gen + u16::from(exp < 0)
}

fn shortlex(a: &[Letter], b: &[Letter]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

#[derive(Clone, Copy, Debug)]
pub struct CompletionLimits {
    pub max_rules: usize,
    pub max_lhs: usize,
}

impl Default for CompletionLimits {
    fn default() -> Self {
        CompletionLimits { max_rules: 2000, max_lhs: 20 }
    }
}

pub struct RewritingSystem {
    rules: HashMap<Vec<Letter>, Vec<Letter>>,
    lhs_lengths: Vec<usize>,
    confluent: bool,
}

impl RewritingSystem {
    pub fn new(sig: &OrbifoldSignature, limits: CompletionLimits) -> Self {
        let mut equations: Vec<Vec<Letter>> = Vec::new();
        for k in 0..sig.generator_count() as GenId {
            equations.push(vec![encode(k, 1), encode(k, -1)]);
            equations.push(vec![encode(k, -1), encode(k, 1)]);
            if let Some(m) = sig.torsion_order(k) {
                equations.push(vec![encode(k, 1); m as usize]);
            }
        }
        equations.push(sig.relator().letters().map(|(g, e)| encode(g, e)).collect());
        let mut completion = Completion::new(limits);
        for r in equations {
            completion.push(r, Vec::new());
        }
        completion.run();
        let mut lhs_lengths: Vec<usize> = completion.active().map(|(l, _)| l.len()).collect();
        lhs_lengths.sort_unstable();
        lhs_lengths.dedup();
        RewritingSystem {
            rules: completion.active().map(|(l, r)| (l.clone(), r.clone())).collect(),
            lhs_lengths,
            confluent: completion.complete,
        }
    }

    /// Whether completion finished, so that normal forms are unique.
    pub fn is_confluent(&self) -> bool {
        self.confluent
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    fn normal_form(&self, letters: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
        rewrite(&self.rules, &self.lhs_lengths, letters)
    }

    /// Shortlex-reduced form of `w` as a word.
    pub fn reduce(&self, w: &Word) -> Word {
        let nf = self.normal_form(w.letters().map(|(g, e)| encode(g, e)));
        Word::from_letters(nf.into_iter().map(|l| (l / 2, if l % 2 == 0 { 1 } else { -1 })))
    }

    /// True when `w` rewrites to the empty word, which proves it trivial.
    pub fn is_identity(&self, w: &Word) -> bool {
        self.normal_form(w.letters().map(|(g, e)| encode(g, e))).is_empty()
    }
}

/// Left-to-right rewriting that keeps the processed prefix irreducible, so
/// only its suffixes need checking after each new letter.
fn rewrite(
    rules: &HashMap<Vec<Letter>, Vec<Letter>>,
    lengths: &[usize],
    letters: impl IntoIterator<Item = Letter>,
) -> Vec<Letter> {
    let mut pending: Vec<Letter> = letters.into_iter().collect();
    pending.reverse();
    let mut out: Vec<Letter> = Vec::with_capacity(pending.len());
    while let Some(l) = pending.pop() {
        out.push(l);
        for &n in lengths {
            if n > out.len() {
                break;
            }
            if let Some(rhs) = rules.get(&out[out.len() - n..]) {
                out.truncate(out.len() - n);
                pending.extend(rhs.iter().rev());
                break;
            }
        }
    }
    out
}

/// Pending equation, keyed by the longer side.
type Equation = (usize, Vec<Letter>, Vec<Letter>);

struct Completion {
    limits: CompletionLimits,
    lhs: Vec<Vec<Letter>>,
    rhs: Vec<Vec<Letter>>,
    alive: Vec<bool>,
    index: HashMap<Vec<Letter>, Vec<Letter>>,
    lengths: Vec<usize>,
    queue: BinaryHeap<Reverse<Equation>>,
    complete: bool,
}

impl Completion {
    fn new(limits: CompletionLimits) -> Self {
        Completion {
            limits,
            lhs: Vec::new(),
            rhs: Vec::new(),
            alive: Vec::new(),
            index: HashMap::new(),
            lengths: Vec::new(),
            queue: BinaryHeap::new(),
            complete: true,
        }
    }

    fn active(&self) -> impl Iterator<Item = (&Vec<Letter>, &Vec<Letter>)> {
        (0..self.lhs.len()).filter(|&i| self.alive[i]).map(|i| (&self.lhs[i], &self.rhs[i]))
    }

    fn push(&mut self, u: Vec<Letter>, v: Vec<Letter>) {
        self.queue.push(Reverse((u.len().max(v.len()), u, v)));
    }

    fn reduce(&self, w: &[Letter]) -> Vec<Letter> {
        rewrite(&self.index, &self.lengths, w.iter().copied())
    }

    fn insert(&mut self, l: Vec<Letter>, r: Vec<Letter>) -> usize {
        // Rules whose left side the new rule rewrites go back to the queue.
        for i in 0..self.lhs.len() {
            if self.alive[i] && self.lhs[i].windows(l.len()).any(|w| w == l.as_slice()) {
                self.alive[i] = false;
                self.index.remove(&self.lhs[i]);
                let (a, b) = (self.lhs[i].clone(), self.rhs[i].clone());
                self.push(a, b);
            }
        }
        self.index.insert(l.clone(), r.clone());
        if let Err(at) = self.lengths.binary_search(&l.len()) {
            self.lengths.insert(at, l.len());
        }
        self.lhs.push(l);
        self.rhs.push(r);
        self.alive.push(true);
        for i in 0..self.rhs.len() {
            if self.alive[i] {
                let nf = self.reduce(&self.rhs[i]);
                self.index.insert(self.lhs[i].clone(), nf.clone());
                self.rhs[i] = nf;
            }
        }
        self.lhs.len() - 1
    }

    fn overlaps(&mut self, i: usize, j: usize) {
        let (l1, r1, l2, r2) = (self.lhs[i].clone(), self.rhs[i].clone(), self.lhs[j].clone(), self.rhs[j].clone());
        for k in 1..l1.len().min(l2.len()) {
            if l1[l1.len() - k..] == l2[..k] {
                let mut a = r1.clone();
                a.extend_from_slice(&l2[k..]);
                let mut b = l1[..l1.len() - k].to_vec();
                b.extend_from_slice(&r2);
                self.push(a, b);
            }
        }
    }

    fn run(&mut self) {
        while let Some(Reverse((_, u, v))) = self.queue.pop() {
            let (u, v) = (self.reduce(&u), self.reduce(&v));
            if u == v {
                continue;
            }
            let (l, r) = if shortlex(&u, &v) == Ordering::Greater { (u, v) } else { (v, u) };
            if l.len() > self.limits.max_lhs {
                self.complete = false;
                continue;
            }
            let new = self.insert(l, r);
            if self.alive.iter().filter(|a| **a).count() > self.limits.max_rules {
                self.complete = false;
                return;
            }
            for other in 0..self.lhs.len() {
                if self.alive[other] && self.alive[new] {
                    self.overlaps(new, other);
                    if other != new {
                        self.overlaps(other, new);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(text: &str) -> OrbifoldSignature {
        text.parse().unwrap()
    }

    #[test]
    fn torsion_and_relator_words_vanish() {
        let s = sig("g=0 cones=2 b=2");
        let rs = RewritingSystem::new(&s, CompletionLimits::default());
        let w = Word::parse("x1 x1 x1 x1 c1^-1 x1 c2^-1", &s).unwrap();
        assert!(rs.is_identity(&w));
        assert!(!rs.is_identity(&Word::parse("c1 c2", &s).unwrap()));
        assert!(rs.is_confluent());
    }

    #[test]
    fn triangle_group_completes() {
        let s = sig("g=0 cones=2,3,7");
        let rs = RewritingSystem::new(&s, CompletionLimits::default());
        assert!(rs.is_confluent(), "{} rules", rs.rule_count());
        assert!(rs.is_identity(&s.relator()));
        assert!(rs.is_identity(&Word::parse("x1 x1", &s).unwrap()));
        assert!(!rs.is_identity(&Word::parse("x1 x2", &s).unwrap()));
    }
}
