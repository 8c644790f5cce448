//! Pure mapping classes as automorphisms of the orbifold fundamental group,
//! and enumeration of their orbits on curve classes.

pub mod checkpoint;
pub mod orbit;
mod tables;

pub use orbit::{orbit_ball, Functional, Member, OrbitBall, OrbitOptions, OrbitOutcome};
pub use tables::{coset_representatives, twist_generators};

use thiserror::Error;

use crate::orbifold::{FuchsianGroup, GeneratorKind, OrbifoldSignature};
use crate::words::{canonicalize, free_reduce, reduce, CurveClass, GenId, Word};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McgError {
    #[error("no twist table for signature {0}")]
    UnsupportedSignature(String),
    #[error("automorphism `{name}` fails validation: {reason}")]
    InvalidAutomorphism { name: String, reason: String },
    #[error("seed is not an essential primitive curve: {0}")]
    BadSeed(String),
    #[error("slack cap {cap} reached without stabilization (counts {previous} then {last})")]
    SlackCapReached { cap: f64, previous: usize, last: usize },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("i/o: {0}")]
    Io(String),
}

/// Generator images of an automorphism and of its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct Automorphism {
    pub name: String,
    images: Vec<Word>,
    inverse_images: Vec<Word>,
}

fn substitute(images: &[Word], w: &Word) -> Word {
    let mut out = Vec::new();
    for s in w.syllables() {
        let img = &images[s.gen as usize];
        let piece = if s.exp > 0 { img.clone() } else { img.inverse() };
        for _ in 0..s.exp.unsigned_abs() {
            out.extend_from_slice(piece.syllables());
        }
    }
    Word::from_syllables(out)
}

impl Automorphism {
    pub fn identity(sig: &OrbifoldSignature) -> Self {
        let images: Vec<Word> = (0..sig.generator_count() as GenId).map(|g| Word::generator(g, 1)).collect();
        Automorphism { name: "id".into(), inverse_images: images.clone(), images }
    }

    /// Builds an automorphism from the images of the listed generators;
    /// unlisted generators are fixed.
    pub(crate) fn from_changes(
        name: &str,
        sig: &OrbifoldSignature,
        changes: &[(GenId, Word)],
        inverse_changes: &[(GenId, Word)],
    ) -> Self {
        let mut a = Automorphism::identity(sig);
        a.name = name.to_string();
        for (g, w) in changes {
            a.images[*g as usize] = w.clone();
        }
        for (g, w) in inverse_changes {
            a.inverse_images[*g as usize] = w.clone();
        }
        a
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn inverse_images(&self) -> &[Word] {
        &self.inverse_images
    }

    pub fn inverse(&self) -> Automorphism {
        let name = match self.name.strip_suffix("^-1") {
            Some(base) => base.to_string(),
            None => format!("{}^-1", self.name),
        };
        Automorphism { name, images: self.inverse_images.clone(), inverse_images: self.images.clone() }
    }

    /// Image of a word, reduced in the orbifold group.
    pub fn apply_word(&self, w: &Word, sig: &OrbifoldSignature) -> Word {
        reduce(&substitute(&self.images, w), sig)
    }

    /// `self ∘ other`, computed in the free group on the generators.
    pub fn compose(&self, other: &Automorphism, name: &str) -> Automorphism {
        let images = other.images.iter().map(|w| free_reduce(&substitute(&self.images, w))).collect();
        let inverse_images = self
            .inverse_images
            .iter()
            .map(|w| free_reduce(&substitute(&other.inverse_images, w)))
            .collect();
        Automorphism { name: name.to_string(), images, inverse_images }
    }

    /// Reduces all images modulo torsion.
    pub fn reduced(mut self, sig: &OrbifoldSignature) -> Automorphism {
        for w in self.images.iter_mut().chain(self.inverse_images.iter_mut()) {
            *w = reduce(w, sig);
        }
        self
    }

    /// Relator preserved up to conjugacy, inverse tables consistent, and
    /// cone and boundary generators fixed up to conjugacy.
    pub fn validate(&self, sig: &OrbifoldSignature) -> Result<(), McgError> {
        let fail = |reason: String| McgError::InvalidAutomorphism { name: self.name.clone(), reason };
        let n = sig.generator_count();
        if self.images.len() != n || self.inverse_images.len() != n {
            return Err(fail("wrong number of images".into()));
        }
        for g in 0..n as GenId {
            let x = Word::generator(g, 1);
            let there_and_back = reduce(&substitute(&self.images, &self.inverse_images[g as usize]), sig);
            let back_and_there = reduce(&substitute(&self.inverse_images, &self.images[g as usize]), sig);
            if there_and_back != reduce(&x, sig) || back_and_there != reduce(&x, sig) {
                return Err(fail(format!("inverse table wrong on {}", sig.generator_name(g))));
            }
            if matches!(sig.kind(g), GeneratorKind::Cone { .. } | GeneratorKind::Boundary(_))
                && canonicalize(&self.images[g as usize], sig) != canonicalize(&x, sig)
            {
                return Err(fail(format!("moves {}", sig.generator_name(g))));
            }
        }
        let relator = sig.relator();
        if canonicalize(&self.apply_word(&relator, sig), sig) != canonicalize(&relator, sig) {
            return Err(fail("relator not preserved".into()));
        }
        Ok(())
    }
}

/// Image of a curve class; length recomputed from the holonomy.
pub fn apply(auto: &Automorphism, cc: &CurveClass, group: &FuchsianGroup) -> CurveClass {
    let w = auto.apply_word(&cc.canonical, group.signature());
    CurveClass::new(&w, group)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbifold::group_for;

    fn sig13() -> OrbifoldSignature {
        OrbifoldSignature::new(1, vec![3], 0).unwrap()
    }

    #[test]
    fn tau_one_fixes_commutator() {
        let s = sig13();
        let autos = twist_generators(&s).unwrap();
        let comm = Word::parse("a b a^-1 b^-1", &s).unwrap();
        let img = autos[0].apply_word(&comm, &s);
        assert_eq!(img, Word::parse("a b a^-1 b^-1", &s).unwrap());
        assert_eq!(canonicalize(&img, &s), canonicalize(&comm, &s));
    }

    #[test]
    fn inverse_round_trip() {
        let s = sig13();
        let group = group_for(&s).unwrap();
        for t in twist_generators(&s).unwrap() {
            let cc = CurveClass::new(&Word::parse("a^2 b a^-1 b", &s).unwrap(), &group);
            let back = apply(&t, &apply(&t.inverse(), &cc, &group), &group);
            assert_eq!(back.canonical, cc.canonical);
            let id = Automorphism::identity(&s);
            assert_eq!(apply(&id, &cc, &group), cc);
        }
    }

    #[test]
    fn unsupported_signature() {
        let s = OrbifoldSignature::new(0, vec![2, 3], 0).unwrap();
        assert!(matches!(twist_generators(&s), Err(McgError::UnsupportedSignature(_))));
    }

    #[test]
    fn image_length_matches_holonomy() {
        let s = sig13();
        let group = group_for(&s).unwrap();
        let a = CurveClass::new(&Word::parse("a", &s).unwrap(), &group);
        let t = &twist_generators(&s).unwrap()[1];
        let img = apply(t, &a, &group);
        let direct = crate::hypgeom::translation_length(&group.holonomy(&Word::parse("a b^-1", &s).unwrap())).unwrap();
        assert!((img.length - direct).abs() < 1e-8);
    }
}
