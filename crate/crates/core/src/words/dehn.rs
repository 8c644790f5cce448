//! Dehn's algorithm against the long relator.
//!
//! For closed surface groups of genus at least two this decides the word
//! problem. With cone points it is only a sufficient test: a word that
//! shortens to the empty word is trivial, a word that does not may still be.

use super::{cyclic_reduce, reduce, GenId, Word};
use crate::orbifold::OrbifoldSignature;

type Letter = (GenId, i32);

pub struct DehnReducer {
    sig: OrbifoldSignature,
    /// Every cyclic conjugate of the relator and of its inverse.
    rotations: Vec<Vec<Letter>>,
}

impl DehnReducer {
    pub fn new(sig: &OrbifoldSignature) -> Self {
        let relator: Vec<Letter> = sig.relator().letters().collect();
        let inverse: Vec<Letter> = relator.iter().rev().map(|&(g, e)| (g, -e)).collect();
        let mut rotations = Vec::new();
        for r in [relator, inverse] {
            for k in 0..r.len() {
                let mut v = r[k..].to_vec();
                v.extend_from_slice(&r[..k]);
                if !rotations.contains(&v) {
                    rotations.push(v);
                }
            }
        }
        DehnReducer { sig: sig.clone(), rotations }
    }

    /// One replacement of a relator piece longer than half the relator by
    /// the inverse of its complement, if any exists.
    fn step(&self, letters: &[Letter]) -> Option<Vec<Letter>> {
        for rot in &self.rotations {
            let n = rot.len();
            let half = n / 2 + 1;
            if letters.len() < half {
                continue;
            }
            for start in 0..=letters.len() - half {
                let k = letters[start..]
                    .iter()
                    .zip(rot.iter())
                    .take_while(|(a, b)| a == b)
                    .count();
                if 2 * k > n {
                    let mut out = letters[..start].to_vec();
                    out.extend(rot[k..].iter().rev().map(|&(g, e)| (g, -e)));
                    out.extend_from_slice(&letters[start + k..]);
                    return Some(out);
                }
            }
        }
        None
    }

    pub fn shorten(&self, w: &Word) -> Word {
        let mut cur = reduce(w, &self.sig);
        loop {
            let letters: Vec<Letter> = cur.letters().collect();
            match self.step(&letters) {
                Some(next) => cur = reduce(&Word::from_letters(next), &self.sig),
                None => return cur,
            }
        }
    }

    pub fn is_identity(&self, w: &Word) -> bool {
        self.shorten(w).is_empty()
    }

    /// Shortens the cyclic word, trying replacements across every rotation.
    pub fn shorten_cyclic(&self, w: &Word) -> Word {
        let mut cur = cyclic_reduce(&self.shorten(w), &self.sig);
        'outer: loop {
            let letters: Vec<Letter> = cur.letters().collect();
            for k in 0..letters.len() {
                let mut rot = letters[k..].to_vec();
                rot.extend_from_slice(&letters[..k]);
                if let Some(next) = self.step(&rot) {
                    cur = cyclic_reduce(&self.shorten(&Word::from_letters(next)), &self.sig);
                    continue 'outer;
                }
            }
            return cur;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relator_and_conjugates_vanish() {
        let sig = OrbifoldSignature::new(2, vec![], 0).unwrap();
        let dehn = DehnReducer::new(&sig);
        let r = sig.relator();
        assert!(dehn.is_identity(&r));
        let g = Word::parse("b2 a1^-1", &sig).unwrap();
        assert!(dehn.is_identity(&g.concat(&r).concat(&g.inverse())));
        assert!(!dehn.is_identity(&Word::parse("a1 b1", &sig).unwrap()));
    }

    #[test]
    fn long_piece_is_replaced() {
        let sig = OrbifoldSignature::new(2, vec![], 0).unwrap();
        let dehn = DehnReducer::new(&sig);
        let w = Word::parse("a1 b1 a1^-1 b1^-1 a2", &sig).unwrap();
        let short = dehn.shorten(&w);
        assert_eq!(short, Word::parse("b2 a2 b2^-1", &sig).unwrap());
    }
}
