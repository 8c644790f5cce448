//! Twist tables for the supported signatures.

use super::{Automorphism, McgError};
use crate::orbifold::OrbifoldSignature;
use crate::words::{GenId, Word};

fn word(letters: &[(GenId, i32)]) -> Word {
    Word::from_letters(letters.iter().copied())
}

fn torus_twists(sig: &OrbifoldSignature) -> Vec<Automorphism> {
    let (a, b) = (0, 1);
    let t1 = Automorphism::from_changes("tau1", sig, &[(b, word(&[(b, 1), (a, 1)]))], &[(b, word(&[(b, 1), (a, -1)]))]);
    let t2 = Automorphism::from_changes("tau2", sig, &[(a, word(&[(a, 1), (b, -1)]))], &[(a, word(&[(a, 1), (b, 1)]))]);
    vec![t1, t2]
}

/// Half twist exchanging cones `i` and `i + 1`.
fn half_twist(sig: &OrbifoldSignature, i: GenId) -> Automorphism {
    let j = i + 1;
    Automorphism::from_changes(
        &format!("sigma{}", i + 1),
        sig,
        &[(i, word(&[(i, 1), (j, 1), (i, -1)])), (j, word(&[(i, 1)]))],
        &[(i, word(&[(j, 1)])), (j, word(&[(j, -1), (i, 1), (j, 1)]))],
    )
}

fn sphere_twists(sig: &OrbifoldSignature) -> Vec<Automorphism> {
    let s1 = half_twist(sig, 0);
    let s2 = half_twist(sig, 1);
    let t12 = s1.compose(&s1, "T12");
    let t23 = s2.compose(&s2, "T23");
    let t13 = s2.compose(&t12, "T13").compose(&s2.inverse(), "T13");
    [t12, t23, t13].into_iter().map(|t| t.reduced(sig)).collect()
}

fn genus_two_twists(sig: &OrbifoldSignature) -> Vec<Automorphism> {
    let (a1, b1, a2, b2) = (0, 1, 2, 3);
    vec![
        Automorphism::from_changes("Ta1", sig, &[(b1, word(&[(b1, 1), (a1, 1)]))], &[(b1, word(&[(b1, 1), (a1, -1)]))]),
        Automorphism::from_changes("Tb1", sig, &[(a1, word(&[(a1, 1), (b1, -1)]))], &[(a1, word(&[(a1, 1), (b1, 1)]))]),
        Automorphism::from_changes(
            "Td",
            sig,
            &[(b1, word(&[(a2, 1), (a1, 1), (b1, 1)])), (b2, word(&[(a1, 1), (a2, 1), (b2, 1)]))],
            &[(b1, word(&[(a1, -1), (a2, -1), (b1, 1)])), (b2, word(&[(a2, -1), (a1, -1), (b2, 1)]))],
        ),
        Automorphism::from_changes("Tb2", sig, &[(a2, word(&[(a2, 1), (b2, -1)]))], &[(a2, word(&[(a2, 1), (b2, 1)]))]),
        Automorphism::from_changes("Ta2", sig, &[(b2, word(&[(b2, 1), (a2, 1)]))], &[(b2, word(&[(b2, 1), (a2, -1)]))]),
    ]
}

/// Generators of the pure mapping class group, validated before return.
pub fn twist_generators(sig: &OrbifoldSignature) -> Result<Vec<Automorphism>, McgError> {
    let autos = match (sig.genus(), sig.cone_orders().len(), sig.boundary_count()) {
        (1, 1, 0) => torus_twists(sig),
        (0, 4, 0) => sphere_twists(sig),
        (2, 0, 0) => genus_two_twists(sig),
        _ => return Err(McgError::UnsupportedSignature(sig.to_string())),
    };
    for a in &autos {
        a.validate(sig)?;
    }
    Ok(autos)
}

/// One representative per coset of the pure subgroup: products of half
/// twists that permute cones of equal order.
pub fn coset_representatives(sig: &OrbifoldSignature) -> Result<Vec<Automorphism>, McgError> {
    twist_generators(sig)?;
    let orders = sig.cone_orders();
    let mut reps = vec![Automorphism::identity(sig)];
    if orders.len() != 4 {
        return Ok(reps);
    }
    let swaps: Vec<Automorphism> = (0..3)
        .filter(|&i| orders[i] == orders[i + 1])
        .map(|i| half_twist(sig, i as GenId))
        .collect();
    // Close under the swaps, keeping one automorphism per permutation.
    let perm_of = |a: &Automorphism| -> Vec<usize> {
        (0..4)
            .map(|j| {
                let img = crate::words::canonicalize(&a.images()[j], sig);
                (0..4)
                    .find(|&k| img == crate::words::canonicalize(&Word::generator(k as GenId, 1), sig))
                    .unwrap_or(j)
            })
            .collect()
    };
    let mut perms = vec![perm_of(&reps[0])];
    let mut i = 0;
    while i < reps.len() {
        for s in &swaps {
            let c = s.compose(&reps[i], &format!("{}*{}", s.name, reps[i].name)).reduced(sig);
            let p = perm_of(&c);
            if !perms.contains(&p) {
                perms.push(p);
                reps.push(c);
            }
        }
        i += 1;
    }
    Ok(reps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{canonicalize, reduce};

    #[test]
    fn all_tables_validate() {
        for s in ["g=1 cones=3", "g=1 cones=5", "g=0 cones=2,2,2,3", "g=0 cones=3,4,5,6", "g=2 cones=-"] {
            let sig: OrbifoldSignature = s.parse().unwrap();
            let autos = twist_generators(&sig).unwrap();
            assert!(!autos.is_empty());
            for a in &autos {
                let inv = a.inverse();
                inv.validate(&sig).unwrap();
                for g in 0..sig.generator_count() as GenId {
                    let x = Word::generator(g, 1);
                    assert_eq!(a.apply_word(&inv.apply_word(&x, &sig), &sig), reduce(&x, &sig));
                }
            }
        }
    }

    #[test]
    fn sphere_twist_images() {
        let sig: OrbifoldSignature = "g=0 cones=2,2,2,3".parse().unwrap();
        let autos = twist_generators(&sig).unwrap();
        let x1x2 = Word::parse("x1 x2", &sig).unwrap();
        // twisting about the curve around cones 1, 2 fixes that curve
        assert_eq!(canonicalize(&autos[0].apply_word(&x1x2, &sig), &sig), canonicalize(&x1x2, &sig));
        // the third twist is about the image of that curve under the half twist at cones 2, 3
        let around13 = Word::parse("x1 x2 x3 x2^-1", &sig).unwrap();
        assert_eq!(canonicalize(&autos[2].apply_word(&around13, &sig), &sig), canonicalize(&around13, &sig));
        assert_ne!(canonicalize(&autos[1].apply_word(&x1x2, &sig), &sig), canonicalize(&x1x2, &sig));
    }

    #[test]
    fn cosets_permute_equal_orders() {
        let sig: OrbifoldSignature = "g=0 cones=2,2,2,3".parse().unwrap();
        assert_eq!(coset_representatives(&sig).unwrap().len(), 6);
        let sig: OrbifoldSignature = "g=0 cones=2,2,3,5".parse().unwrap();
        assert_eq!(coset_representatives(&sig).unwrap().len(), 2);
        let sig: OrbifoldSignature = "g=1 cones=3".parse().unwrap();
        assert_eq!(coset_representatives(&sig).unwrap().len(), 1);
    }
}
