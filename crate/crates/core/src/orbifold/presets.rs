//! Generator matrices for the reference signatures, produced by the polygon
//! builder and frozen. Entries are `[a, b, c, d]`.

#![allow(clippy::excessive_precision)]

use super::OrbifoldSignature;

const TORUS_ONE_CONE: (f64, [[f64; 4]; 3]) = (
    1.443_635_475_178_825_6,
    [
        [-2.594_051_265_154_520_9, -7.905_694_150_420_992_1e-1, 7.905_694_150_420_989_9e-1, -1.445_615_223_713_227_5e-1],
        [-7.569_339_580_671_217_2e-1, -2.700_907_567_377_305_9e-1, -1.851_229_586_821_928_4, -1.981_678_829_458_721_3],
        [-3.385_254_915_624_252_9e-1, 1.783_161_023_952_590_6, -8.149_151_874_007_321e-1, 1.338_525_491_562_425_2],
    ],
);

const SPHERE_FOUR_CONES: (f64, [[f64; 4]; 4]) = (
    7.041_149_014_232_968e-1,
    [
        [-3.360_081_706_430_138e-1, -1.443_168_042_331_709_7, 7.711_517_010_456_818_7e-1, 3.360_081_706_430_138e-1],
        [-3.360_081_706_430_141_4e-1, -7.711_517_010_456_820_9e-1, 1.443_168_042_331_709_7, 3.360_081_706_430_136_9e-1],
        [3.360_081_706_430_137_5e-1, -7.711_517_010_456_818_7e-1, 1.443_168_042_331_709_7, -3.360_081_706_430_138e-1],
        [1.224_853_589_275_876_1e-2, 1.594_911_335_795_840_4, -6.194_084_075_813_576_2e-1, 9.877_514_641_072_417_9e-1],
    ],
);

const GENUS_TWO: (f64, [[f64; 4]; 4]) = (
    2.448_452_447_678_101_3,
    [
        [-3.737_210_311_442_997_8, -2.548_003_196_440_272_1, 8.662_103_659_328_354e-1, 3.229_967_490_698_907_9e-1],
        [3.229_967_490_698_909e-1, 8.662_103_659_328_356_2e-1, -2.548_003_196_440_271_6, -3.737_210_311_442_998_2],
        [3.229_967_490_698_906_2e-1, -8.662_103_659_328_350_7e-1, 2.548_003_196_440_272_1, -3.737_210_311_442_997_8],
        [3.737_210_311_442_998_6, -2.548_003_196_440_271_6, 8.662_103_659_328_354e-1, -3.229_967_490_698_907_3e-1],
    ],
);

pub(super) fn signatures() -> Vec<OrbifoldSignature> {
    vec![
        OrbifoldSignature::new(1, vec![3], 0).unwrap(),
        OrbifoldSignature::new(0, vec![2, 2, 2, 3], 0).unwrap(),
        OrbifoldSignature::new(2, vec![], 0).unwrap(),
    ]
}

pub(super) fn lookup(sig: &OrbifoldSignature) -> Option<(f64, &'static [[f64; 4]])> {
    match (sig.genus, sig.cone_orders.as_slice(), sig.boundary) {
        (1, [3], 0) => Some((TORUS_ONE_CONE.0, &TORUS_ONE_CONE.1)),
        (0, [2, 2, 2, 3], 0) => Some((SPHERE_FOUR_CONES.0, &SPHERE_FOUR_CONES.1)),
        (2, [], 0) => Some((GENUS_TWO.0, &GENUS_TWO.1)),
        _ => None,
    }
}
