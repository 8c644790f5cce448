use proptest::prelude::*;

use orbicount::counting::{count_values, fit_exponent, geometric_grid};
use orbicount::hypgeom::{dist, Isometry, PlanePoint};
use orbicount::mcg::{twist_generators, Functional};
use orbicount::orbifold::{group_for, FuchsianGroup, OrbifoldSignature};
use orbicount::words::{canonicalize, cyclic_reduce, multiply, reduce, CompletionLimits, GenId, RewritingSystem, Word};

const SIGNATURES: [&str; 3] = ["g=1 cones=3", "g=0 cones=2,2,2,3", "g=2"];

fn group(i: usize) -> FuchsianGroup {
    let sig: OrbifoldSignature = SIGNATURES[i].parse().unwrap();
    group_for(&sig).unwrap()
}

/// Letters as `(generator index, exponent)`; the index is taken modulo the
/// generator count of whichever group the word is used in.
fn raw_word(max: usize) -> impl Strategy<Value = Vec<(u16, i32)>> {
    prop::collection::vec((0u16..8, prop_oneof![-3..=-1i32, 1..=3i32]), 0..max)
}

fn word(raw: &[(u16, i32)], sig: &OrbifoldSignature) -> Word {
    let n = sig.generator_count() as GenId;
    Word::from_letters(raw.iter().flat_map(|&(g, e)| {
        std::iter::repeat_n((g % n, e.signum()), e.unsigned_abs() as usize)
    }))
}

fn frobenius(g: &Isometry) -> f64 {
    (g.a * g.a + g.b * g.b + g.c * g.c + g.d * g.d).sqrt()
}

/// Rounding allowance for evaluating `w` letter by letter: a few ulps per
/// letter times the product of the letter norms, plus the amount by which
/// the generators miss their relations, once per letter, since reduction
/// and rewriting substitute one side of a relation for the other.
fn allowance(g: &FuchsianGroup, w: &Word) -> f64 {
    let sig = g.signature();
    let defect = (0..sig.generator_count())
        .filter_map(|id| {
            let m = sig.torsion_order(id as GenId)?;
            Some(g.generators()[id].pow(i64::from(m)).identity_residual())
        })
        .fold(g.relator_residual(), f64::max);
    let scale: f64 = w.letters().map(|(id, _)| frobenius(&g.generators()[id as usize])).product();
    let n = w.letter_count() as f64 + 1.0;
    (1e-15 + defect) * n * scale.max(1.0)
}

fn isometry() -> impl Strategy<Value = Isometry> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
        .prop_filter_map("needs positive determinant", |(a, b, c, d)| {
            let det = a * d - b * c;
            (det > 0.05).then(|| Isometry::new(a, b, c, d).unwrap())
        })
}

fn point() -> impl Strategy<Value = PlanePoint> {
    (-5.0..5.0f64, 0.05..5.0f64).prop_map(|(x, y)| PlanePoint::new(x, y).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn long_products_keep_unit_determinant(gi in 0..3usize, raw in raw_word(60)) {
        let g = group(gi);
        let h = g.holonomy(&word(&raw, g.signature()));
        let scale = (h.a * h.d).abs() + (h.b * h.c).abs();
        prop_assert!((h.det() - 1.0).abs() <= 1e-9 * scale.max(1.0), "det {} scale {scale}", h.det());
    }

    #[test]
    fn isometries_preserve_distance(g in isometry(), p in point(), q in point()) {
        let d = dist(p, q);
        let moved = dist(g.apply(p), g.apply(q));
        prop_assert!((moved - d).abs() <= 1e-9 * (1.0 + d), "{d} vs {moved}");
    }

    #[test]
    fn reduction_is_idempotent_and_associative(gi in 0..3usize, a in raw_word(12), b in raw_word(12), c in raw_word(12)) {
        let sig = group(gi).signature().clone();
        let (a, b, c) = (word(&a, &sig), word(&b, &sig), word(&c, &sig));
        let r = reduce(&a, &sig);
        prop_assert_eq!(reduce(&r, &sig), r.clone());
        prop_assert_eq!(multiply(&multiply(&a, &b, &sig), &c, &sig), multiply(&a, &multiply(&b, &c, &sig), &sig));
        prop_assert!(multiply(&a, &a.inverse(), &sig).is_empty());
    }

    #[test]
    fn canonical_form_ignores_conjugation_and_inversion(gi in 0..3usize, w in raw_word(12), u in raw_word(8), k in 0usize..12) {
        let sig = group(gi).signature().clone();
        let (w, u) = (word(&w, &sig), word(&u, &sig));
        let c = canonicalize(&w, &sig);
        let conj = u.concat(&w).concat(&u.inverse());
        prop_assert_eq!(canonicalize(&conj, &sig), c.clone());
        prop_assert_eq!(canonicalize(&w.inverse(), &sig), c.clone());
        let cyc = cyclic_reduce(&w, &sig);
        let n = cyc.syllable_count().max(1);
        prop_assert_eq!(canonicalize(&cyc.rotated(k % n), &sig), c);
    }

    #[test]
    fn holonomy_is_a_homomorphism(gi in 0..3usize, u in raw_word(10), v in raw_word(10)) {
        let g = group(gi);
        let sig = g.signature();
        let (u, v) = (word(&u, sig), word(&v, sig));
        let uv = u.concat(&v);
        let lhs = g.holonomy(&uv);
        let rhs = g.holonomy(&u).compose(&g.holonomy(&v));
        prop_assert!(lhs.projective_distance(&rhs) <= allowance(&g, &uv));
        let gap = g.holonomy(&reduce(&u, sig)).projective_distance(&g.holonomy(&u));
        prop_assert!(gap <= allowance(&g, &u));
    }

    #[test]
    fn conjugate_words_share_translation_length(gi in 0..3usize, w in raw_word(10), u in raw_word(6)) {
        let g = group(gi);
        let sig = g.signature();
        let (w, u) = (word(&w, sig), word(&u, sig));
        let conj = u.concat(&w).concat(&u.inverse());
        let t0 = g.holonomy(&w).trace().abs();
        let t1 = g.holonomy(&conj).trace().abs();
        prop_assert!((t0 - t1).abs() <= 2.0 * allowance(&g, &conj), "{t0} vs {t1}");
    }

    #[test]
    fn twists_are_invertible_and_preserve_the_relator(gi in 0..3usize, w in raw_word(10), pick in 0usize..16) {
        let g = group(gi);
        let sig = g.signature();
        let autos = twist_generators(sig).unwrap();
        let auto = &autos[pick % autos.len()];
        let w = word(&w, sig);
        let back = auto.inverse().apply_word(&auto.apply_word(&w, sig), sig);
        prop_assert_eq!(canonicalize(&back, sig), canonicalize(&w, sig));
        let image = g.holonomy(&auto.apply_word(&sig.relator(), sig));
        prop_assert!(image.identity_residual() <= 1e-8);
    }

    #[test]
    fn rewriting_keeps_the_group_element(gi in 0..2usize, w in raw_word(14)) {
        let g = group(gi);
        let sig = g.signature();
        let rs = RewritingSystem::new(sig, CompletionLimits::default());
        let w = word(&w, sig);
        let nf = rs.reduce(&w);
        prop_assert!(nf.letter_count() <= reduce(&w, sig).letter_count().max(w.letter_count()));
        let gap = g.holonomy(&nf).projective_distance(&g.holonomy(&w));
        prop_assert!(gap <= allowance(&g, &w) + allowance(&g, &nf));
        prop_assert!(rs.is_identity(&w.concat(&sig.relator()).concat(&w.inverse())));
    }

    #[test]
    fn counts_are_monotone(values in prop::collection::vec(0.0..100.0f64, 0..200)) {
        let grid = geometric_grid(1.0, 1.3, 18).unwrap();
        let curve = count_values(&values, &grid, Functional::Hyperbolic).unwrap();
        prop_assert!(curve.counts.windows(2).all(|w| w[0] <= w[1]));
        let below = values.iter().filter(|&&v| v <= *grid.last().unwrap()).count() as u64;
        prop_assert_eq!(*curve.counts.last().unwrap(), below);
    }

    #[test]
    fn fit_recovers_power_laws(e in 1.0..2.0f64, c in 5.0..20.0f64) {
        let grid = geometric_grid(30.0, 10f64.powf(1.0 / 17.0), 18).unwrap();
        let n = |l: f64| (c * l.powf(e)).floor();
        let values: Vec<f64> = (1..=n(grid[grid.len() - 1]) as u64)
            .map(|k| (k as f64 / c).powf(1.0 / e))
            .collect();
        let curve = count_values(&values, &grid, Functional::Hyperbolic).unwrap();
        let fit = fit_exponent(&curve, None).unwrap();
        prop_assert!((fit.exponent - e).abs() <= 1e-2, "{} vs {e}", fit.exponent);
    }
}
