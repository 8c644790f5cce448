//! A bounded search for evidence that a constructed group is not discrete.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::FuchsianGroup;
use crate::hypgeom::{classify, Classification, Isometry};
use crate::tolerances::TOL;
use crate::words::{CompletionLimits, DehnReducer, GenId, RewritingSystem, Word};

/// Shortest translation length tolerated before an element counts as
/// accumulating at the identity.
const LENGTH_FLOOR: f64 = 1e-3;
/// Flagged words kept in the report.
const FLAG_LIMIT: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretenessReport {
    pub max_letters: usize,
    pub words: u64,
    /// Words within `TOL.identity_near` of `±I` that reduce to the empty
    /// word by Dehn reduction or by the completed rewriting system.
    pub identities: u64,
    /// Largest distance from `±I` among those.
    pub max_identity_residual: f64,
    pub elliptic: u64,
    /// Elliptic elements whose angle is not a multiple of `2π/m` for any
    /// cone order `m`.
    pub bad_angles: u64,
    pub parabolic: u64,
    /// Words within `TOL.identity_near` of `±I` that neither reducer shows
    /// to be trivial.
    pub near_identity: u64,
    /// Rules in the rewriting system, and whether some reducer decides the
    /// word problem: a finished completion, or Dehn reduction on a closed
    /// surface of genus at least two. Only then is a flagged word a proven
    /// non-identity.
    pub rewriting_rules: usize,
    pub word_problem_decided: bool,
    /// The first few near-identity words, as text.
    pub flagged: Vec<String>,
    pub min_hyperbolic_length: f64,
    pub pass: bool,
}

struct Walk<'a> {
    letters: Vec<(GenId, i32, Isometry)>,
    orders: Vec<u32>,
    dehn: DehnReducer,
    rewriting: RewritingSystem,
    group: &'a FuchsianGroup,
    max_letters: usize,
    path: Vec<(GenId, i32)>,
    rep: DiscretenessReport,
}

impl Walk<'_> {
    fn visit(&mut self, acc: &Isometry) {
        let rep = &mut self.rep;
        rep.words += 1;
        let residual = acc.identity_residual();
        if residual <= TOL.identity_near {
            let word = Word::from_letters(self.path.iter().copied());
            if self.dehn.is_identity(&word) || self.rewriting.is_identity(&word) {
                rep.identities += 1;
                rep.max_identity_residual = rep.max_identity_residual.max(residual);
            } else {
                rep.near_identity += 1;
                if rep.flagged.len() < FLAG_LIMIT {
                    rep.flagged.push(word.to_text(self.group.signature()));
                }
            }
        } else {
            match classify(acc) {
                Classification::Identity | Classification::Parabolic => rep.parabolic += 1,
                Classification::Elliptic { angle } => {
                    rep.elliptic += 1;
                    let rational = self.orders.iter().any(|&m| {
                        let k = angle * f64::from(m) / TAU;
                        (k - k.round()).abs() * TAU <= 1e-6
                    });
                    if !rational {
                        rep.bad_angles += 1;
                    }
                }
                Classification::Hyperbolic { length } => {
                    rep.min_hyperbolic_length = rep.min_hyperbolic_length.min(length);
                }
            }
        }
        if self.path.len() == self.max_letters {
            return;
        }
        for i in 0..self.letters.len() {
            let (gen, exp, g) = self.letters[i];
            if self.path.last().is_some_and(|&(lg, le)| lg == gen && le == -exp) {
                continue;
            }
            self.path.push((gen, exp));
            self.visit(&acc.compose(&g));
            self.path.pop();
        }
    }
}

impl FuchsianGroup {
    /// Walks every freely reduced word in the generators with at most
    /// `max_letters` letters and classifies its holonomy. A discrete,
    /// cusp-free group shows rotations by multiples of `2π/m`, translations
    /// bounded away from zero, and holonomies near `±I` only for words that
    /// are trivial in the group. Triviality comes from Dehn reduction and
    /// from a shortlex rewriting system for the full presentation; when the
    /// system's completion did not finish, a flagged word is either evidence
    /// against discreteness or a trivial word neither reducer recognizes.
    pub fn discreteness_smoke(&self, max_letters: usize) -> DiscretenessReport {
        let sig = self.signature();
        let letters = self
            .generators()
            .iter()
            .enumerate()
            .flat_map(|(k, g)| [(k as GenId, 1, *g), (k as GenId, -1, g.inverse())])
            .collect();
        let rewriting = RewritingSystem::new(sig, CompletionLimits::default());
        let closed_surface = sig.cone_orders().is_empty() && sig.boundary_count() == 0 && sig.genus() >= 2;
        let (rewriting_rules, word_problem_decided) = (rewriting.rule_count(), rewriting.is_confluent() || closed_surface);
        let mut walk = Walk {
            letters,
            orders: sig.cone_orders().to_vec(),
            dehn: DehnReducer::new(sig),
            rewriting,
            group: self,
            max_letters,
            path: Vec::with_capacity(max_letters),
            rep: DiscretenessReport {
                max_letters,
                words: 0,
                identities: 0,
                max_identity_residual: 0.0,
                elliptic: 0,
                bad_angles: 0,
                parabolic: 0,
                near_identity: 0,
                rewriting_rules,
                word_problem_decided,
                flagged: Vec::new(),
                min_hyperbolic_length: f64::INFINITY,
                pass: false,
            },
        };
        for i in 0..walk.letters.len() {
            let (gen, exp, g) = walk.letters[i];
            walk.path.push((gen, exp));
            walk.visit(&g);
            walk.path.pop();
        }
        let mut rep = walk.rep;
        rep.pass = rep.parabolic == 0
            && rep.bad_angles == 0
            && rep.near_identity == 0
            && rep.min_hyperbolic_length >= LENGTH_FLOOR;
        rep
    }
}

#[cfg(test)]
mod tests {
    use crate::orbifold::{build_group, group_for, OrbifoldSignature};

    #[test]
    fn presets_pass_short_words() {
        for s in ["g=1 cones=3", "g=0 cones=2,2,2,3"] {
            let g = group_for(&s.parse::<OrbifoldSignature>().unwrap()).unwrap();
            let rep = g.discreteness_smoke(5);
            assert!(rep.pass, "{s}: {rep:?}");
            assert!(rep.identities > 0 && rep.elliptic > 0);
        }
    }

    #[test]
    fn relator_conjugates_count_as_identities() {
        let g = build_group(&"g=0 cones=2 b=2".parse::<OrbifoldSignature>().unwrap()).unwrap();
        let rep = g.discreteness_smoke(6);
        assert!(rep.pass, "{rep:?}");
        assert!(rep.max_identity_residual > 0.0 && rep.max_identity_residual <= 1e-6);
    }
}
