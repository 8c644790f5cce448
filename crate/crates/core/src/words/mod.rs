//! Words in the orbifold fundamental group: free and torsion reduction,
//! cyclic canonical forms, power detection and curve classes.

mod dehn;
mod rewriting;

pub use dehn::DehnReducer;
pub use rewriting::{CompletionLimits, RewritingSystem};

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypgeom::{classify, Classification};
use crate::orbifold::{FuchsianGroup, OrbifoldSignature};

pub type GenId = u16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WordError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("malformed token `{0}`")]
    BadToken(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Syllable {
    pub gen: GenId,
    pub exp: i32,
}

impl Syllable {
    /// Sort key: generator order first, positive before negative, then size.
    fn key(self) -> u64 {
        let sign = u64::from(self.exp < 0);
        (u64::from(self.gen) << 40) | (sign << 32) | u64::from(self.exp.unsigned_abs())
    }
}

impl PartialOrd for Syllable {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Syllable {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

/// A sequence of syllables `g^e`. Constructors do not reduce; call
/// [`reduce`] for the normal form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<Syllable>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn generator(gen: GenId, exp: i32) -> Self {
        if exp == 0 {
            Word::empty()
        } else {
            Word(vec![Syllable { gen, exp }])
        }
    }

    pub fn from_syllables(syllables: Vec<Syllable>) -> Self {
        Word(syllables)
    }

    /// Builds a word from signed letters `(gen, ±1)`.
    pub fn from_letters<I: IntoIterator<Item = (GenId, i32)>>(letters: I) -> Self {
        Word(
            letters
                .into_iter()
                .map(|(gen, exp)| Syllable { gen, exp })
                .collect(),
        )
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn syllable_count(&self) -> usize {
        self.0.len()
    }

    /// Number of letters, `Σ |e|`.
    pub fn letter_count(&self) -> u64 {
        self.0.iter().map(|s| u64::from(s.exp.unsigned_abs())).sum()
    }

    pub fn letters(&self) -> impl Iterator<Item = (GenId, i32)> + '_ {
        self.0
            .iter()
            .flat_map(|s| std::iter::repeat_n((s.gen, s.exp.signum()), s.exp.unsigned_abs() as usize))
    }

    /// Formal inverse (not reduced).
    pub fn inverse(&self) -> Word {
        Word(
            self.0
                .iter()
                .rev()
                .map(|s| Syllable { gen: s.gen, exp: -s.exp })
                .collect(),
        )
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn pow(&self, n: i32) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut v = Vec::with_capacity(base.0.len() * n.unsigned_abs() as usize);
        for _ in 0..n.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        Word(v)
    }

    pub fn rotated(&self, k: usize) -> Word {
        let n = self.0.len();
        if n == 0 {
            return Word::empty();
        }
        let k = k % n;
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    /// Parses `a1 b1 a1^-1 x1^2`; the bare names `a`, `b`, `x`, `c` are
    /// accepted when the signature has exactly one generator of that family.
    pub fn parse(text: &str, sig: &OrbifoldSignature) -> Result<Word, WordError> {
        let mut v = Vec::new();
        for token in text.split_whitespace() {
            if token == "1" || token == "e" {
                continue;
            }
            let (name, exp) = match token.split_once('^') {
                Some((n, e)) => {
                    let e: i32 = e.parse().map_err(|_| WordError::BadToken(token.to_string()))?;
                    (n, e)
                }
                None => (token, 1),
            };
            let gen = sig
                .generator_id(name)
                .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))?;
            if exp != 0 {
                v.push(Syllable { gen, exp });
            }
        }
        Ok(Word(v))
    }

    pub fn display<'a>(&'a self, sig: &'a OrbifoldSignature) -> WordDisplay<'a> {
        WordDisplay { word: self, sig }
    }

    pub fn to_text(&self, sig: &OrbifoldSignature) -> String {
        self.display(sig).to_string()
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    sig: &'a OrbifoldSignature,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "1");
        }
        for (i, s) in self.word.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", self.sig.generator_name(s.gen))?;
            if s.exp != 1 {
                write!(f, "^{}", s.exp)?;
            }
        }
        Ok(())
    }
}

/// Representative of `e` modulo `m` in `(-m/2, m/2]`.
pub fn normalize_exponent(exp: i32, m: u32) -> i32 {
    let m = m as i32;
    let r = exp.rem_euclid(m);
    if 2 * r > m {
        r - m
    } else {
        r
    }
}

fn push_syllable(stack: &mut Vec<Syllable>, s: Syllable, sig: Option<&OrbifoldSignature>) {
    let order = sig.and_then(|sig| sig.torsion_order(s.gen));
    let norm = |e: i32| match order {
        Some(m) => normalize_exponent(e, m),
        None => e,
    };
    match stack.last_mut() {
        Some(top) if top.gen == s.gen => {
            let e = norm(top.exp + s.exp);
            if e == 0 {
                stack.pop();
            } else {
                top.exp = e;
            }
        }
        _ => {
            let e = norm(s.exp);
            if e != 0 {
                stack.push(Syllable { gen: s.gen, exp: e });
            }
        }
    }
}

/// Free reduction with torsion exponents normalized to `(-m/2, m/2]`.
pub fn reduce(w: &Word, sig: &OrbifoldSignature) -> Word {
    let mut stack = Vec::with_capacity(w.0.len());
    for &s in &w.0 {
        push_syllable(&mut stack, s, Some(sig));
    }
    Word(stack)
}

/// Free reduction only, ignoring torsion.
pub fn free_reduce(w: &Word) -> Word {
    let mut stack = Vec::with_capacity(w.0.len());
    for &s in &w.0 {
        push_syllable(&mut stack, s, None);
    }
    Word(stack)
}

/// Reduced product `u v`.
pub fn multiply(u: &Word, v: &Word, sig: &OrbifoldSignature) -> Word {
    let mut stack = reduce(u, sig).0;
    for &s in &v.0 {
        push_syllable(&mut stack, s, Some(sig));
    }
    Word(stack)
}

/// Reduces, then merges the two ends until they carry different generators.
pub fn cyclic_reduce(w: &Word, sig: &OrbifoldSignature) -> Word {
    let mut v = reduce(w, sig).0;
    let mut start = 0;
    while v.len() - start >= 2 {
        let first = v[start];
        let last = v[v.len() - 1];
        if first.gen != last.gen {
            break;
        }
        v.pop();
        let mut merged = first.exp + last.exp;
        if let Some(m) = sig.torsion_order(first.gen) {
            merged = normalize_exponent(merged, m);
        }
        if merged == 0 {
            start += 1;
        } else {
            v[start].exp = merged;
        }
    }
    Word(v.split_off(start))
}

/// Start index of the lexicographically least rotation (Booth's algorithm).
pub fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let at = |i: usize| &s[i % n];
    let mut failure = vec![usize::MAX; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = at(j);
        let mut i = failure[j - k - 1];
        while i != usize::MAX && sj != at(k + i + 1) {
            if sj < at(k + i + 1) {
                k = j - i - 1;
            }
            i = failure[i];
        }
        if i == usize::MAX && sj != at(k) {
            if sj < at(k) {
                k = j;
            }
            failure[j - k] = usize::MAX;
        } else {
            failure[j - k] = if i == usize::MAX { 0 } else { i + 1 };
        }
    }
    k % n
}

/// Conjugacy-and-inversion invariant form: the least syllable rotation of
/// the cyclic reduction of `w` or of `w^-1`.
pub fn canonicalize(w: &Word, sig: &OrbifoldSignature) -> Word {
    let cyc = cyclic_reduce(w, sig);
    if cyc.is_empty() {
        return cyc;
    }
    let inv = cyclic_reduce(&cyc.inverse(), sig);
    let fwd = cyc.rotated(least_rotation(&cyc.0));
    let bwd = inv.rotated(least_rotation(&inv.0));
    if bwd < fwd {
        bwd
    } else {
        fwd
    }
}

/// Letter count of the canonical word.
pub fn word_length(w: &Word, sig: &OrbifoldSignature) -> u64 {
    cyclic_reduce(w, sig).letter_count()
}

/// Writes the cyclic reduction of `w` as `root^n` with `n` maximal.
pub fn primitive_root(w: &Word, sig: &OrbifoldSignature) -> (Word, u32) {
    let cyc = cyclic_reduce(w, sig);
    let n = cyc.0.len();
    if n == 0 {
        return (cyc, 1);
    }
    if n == 1 {
        let s = cyc.0[0];
        if sig.torsion_order(s.gen).is_some() {
            return (cyc, 1);
        }
        let p = s.exp.unsigned_abs();
        return (Word::generator(s.gen, s.exp.signum()), p);
    }
    for period in 1..n {
        if n.is_multiple_of(period) && (0..n).all(|i| cyc.0[i] == cyc.0[(i + period) % n]) {
            return (Word(cyc.0[..period].to_vec()), (n / period) as u32);
        }
    }
    (cyc, 1)
}

/// Conjugate into a cone stabilizer, decided on the word: the cyclic
/// reduction is a single torsion syllable.
pub fn is_symbolic_torsion(w: &Word, sig: &OrbifoldSignature) -> bool {
    let cyc = cyclic_reduce(w, sig);
    cyc.0.len() == 1 && sig.torsion_order(cyc.0[0].gen).is_some()
}

/// Conjugacy class of a group element with its geometric data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveClass {
    pub canonical: Word,
    /// Translation length of the holonomy; zero if it is not hyperbolic.
    pub length: f64,
    pub word_length: u64,
    pub essential: bool,
    pub primitive: bool,
    /// Symbolic and numeric finite-order verdicts disagree.
    pub disagreement: bool,
}

impl CurveClass {
    pub fn new(w: &Word, group: &FuchsianGroup) -> CurveClass {
        let sig = group.signature();
        let canonical = canonicalize(w, sig);
        let h = group.holonomy(&canonical);
        let class = classify(&h);
        let hyperbolic = matches!(class, Classification::Hyperbolic { .. });
        let length = match class {
            Classification::Hyperbolic { length } => length,
            _ => 0.0,
        };
        let symbolic_finite = canonical.is_empty() || is_symbolic_torsion(&canonical, sig);
        let disagreement = symbolic_finite == hyperbolic;
        let essential = hyperbolic && !symbolic_finite && !is_peripheral(&canonical, length, group);
        let primitive = primitive_root(&canonical, sig).1 == 1;
        CurveClass {
            word_length: canonical.letter_count(),
            canonical,
            length,
            essential,
            primitive,
            disagreement,
        }
    }
}

/// Matches `w` against the canonical forms of `c_l^n` for every boundary
/// generator, with `|n|` bounded through `ℓ(c^n) = |n| ℓ(c)`.
pub fn is_peripheral(canonical: &Word, length: f64, group: &FuchsianGroup) -> bool {
    let sig = group.signature();
    sig.boundary_generators().any(|c| {
        let lc = group.generator_length(c);
        let bound = match lc {
            Some(lc) if lc > 0.0 => (length / lc).ceil() as i32 + 1,
            _ => 1,
        };
        (1..=bound).any(|n| canonicalize(&Word::generator(c, n), sig) == *canonical)
    })
}

pub fn is_essential(w: &Word, group: &FuchsianGroup) -> bool {
    CurveClass::new(w, group).essential
}

pub fn is_primitive(w: &Word, group: &FuchsianGroup) -> bool {
    let sig = group.signature();
    primitive_root(&canonicalize(w, sig), sig).1 == 1
}

/// Numeric cross-check of primitivity: a word among `candidates` whose
/// length is `ℓ(w)/n` for some `2 <= n <= max_power` and whose `n`-th power
/// is conjugate to `w`.
pub fn numeric_root_witness<'a>(
    w: &Word,
    group: &FuchsianGroup,
    candidates: impl IntoIterator<Item = &'a Word>,
    max_power: u32,
) -> Option<(Word, u32)> {
    let sig = group.signature();
    let target = CurveClass::new(w, group);
    if target.length <= 0.0 {
        return None;
    }
    for v in candidates {
        let lv = CurveClass::new(v, group).length;
        if lv <= 0.0 {
            continue;
        }
        for n in 2..=max_power {
            if (lv * n as f64 - target.length).abs() <= 1e-8 * target.length.max(1.0)
                && canonicalize(&v.pow(n as i32), sig) == target.canonical
            {
                return Some((v.clone(), n));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig13() -> OrbifoldSignature {
        OrbifoldSignature::new(1, vec![3], 0).unwrap()
    }

    fn w(text: &str, sig: &OrbifoldSignature) -> Word {
        Word::parse(text, sig).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let s = sig13();
        assert_eq!(reduce(&w("a b b^-1 a", &s), &s), w("a^2", &s));
        assert_eq!(reduce(&w("x^5", &s), &s), w("x^-1", &s));
        assert_eq!(reduce(&Word::empty(), &s), Word::empty());
        assert_eq!(reduce(&w("x a a^-1 x x", &s), &s), Word::empty());
    }

    #[test]
    fn even_torsion_half_power_is_positive() {
        let s = OrbifoldSignature::new(0, vec![2, 2, 2, 3], 0).unwrap();
        assert_eq!(reduce(&w("x1^-1", &s), &s), w("x1", &s));
        assert_eq!(canonicalize(&w("x2^-1 x1^-1", &s), &s), w("x1 x2", &s));
    }

    #[test]
    fn canonical_examples() {
        let s = sig13();
        assert_eq!(canonicalize(&w("b a b^-1", &s), &s), w("a", &s));
        assert_eq!(canonicalize(&w("a^-1", &s), &s), canonicalize(&w("a", &s), &s));
        assert_eq!(canonicalize(&w("a b", &s), &s), canonicalize(&w("b a", &s), &s));
        assert_eq!(canonicalize(&w("a^2 b a^-1", &s), &s), w("a b", &s));
    }

    #[test]
    fn booth_matches_brute_force() {
        let cases: [&[u8]; 6] = [b"bca", b"aaaa", b"abab", b"cabcab", b"bbbab", b"zyxzyxa"];
        for c in cases {
            let k = least_rotation(c);
            let best = (0..c.len())
                .map(|i| [&c[i..], &c[..i]].concat())
                .min()
                .unwrap();
            assert_eq!([&c[k..], &c[..k]].concat(), best);
        }
    }

    #[test]
    fn powers() {
        let s = sig13();
        let (root, n) = primitive_root(&w("a b a b", &s), &s);
        assert_eq!((root, n), (w("a b", &s), 2));
        assert_eq!(primitive_root(&w("a^3", &s), &s), (w("a", &s), 3));
        assert_eq!(primitive_root(&w("a^2 b^2", &s), &s).1, 1);
        assert_eq!(primitive_root(&w("b a b a b a", &s), &s).1, 3);
    }

    #[test]
    fn word_lengths() {
        let s = sig13();
        assert_eq!(word_length(&w("a", &s), &s), 1);
        assert_eq!(word_length(&w("a^2 b", &s), &s), 3);
        assert_eq!(word_length(&w("b a b^-1", &s), &s), 1);
    }

    #[test]
    fn parse_and_print() {
        let s = OrbifoldSignature::new(2, vec![], 0).unwrap();
        let word = w("a1 b1 a1^-1 b2^3", &s);
        assert_eq!(word.to_text(&s), "a1 b1 a1^-1 b2^3");
        assert!(matches!(Word::parse("a", &s), Err(WordError::UnknownGenerator(_))));
        assert!(matches!(Word::parse("a1^x", &s), Err(WordError::BadToken(_))));
    }
}
