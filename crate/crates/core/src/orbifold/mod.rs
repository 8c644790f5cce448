//! Orbifold signatures and a Fuchsian group realizing each one.
//!
//! Groups come from a regular polygon centred at `i`: `4g + 2k + 2b`
//! vertices at equal angles, all ordinary vertices at one common distance
//! `R` from the centre. Sides meeting at cone and boundary slots are tilted
//! so that the pairings close up; `R` is the single unknown and is fixed by
//! requiring the ordinary vertices to fill a full turn.

mod discreteness;
mod presets;

pub use discreteness::DiscretenessReport;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::hypgeom::{
    axis, classify, dist, elliptic_fixed_point, BoundaryGeodesic, Classification, Isometry,
    PlanePoint,
};
use crate::tolerances::TOL;
use crate::words::{GenId, Word};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrbifoldError {
    #[error("cone order {0} is smaller than 2")]
    BadConeOrder(i64),
    #[error("signature {sig} is not hyperbolic (euler characteristic {chi})")]
    NonHyperbolic { sig: String, chi: String },
    #[error("polygon needs at least 3 sides, signature gives {0}")]
    TooFewSides(usize),
    #[error("root finder failed: no sign change on [{lo}, {hi}]")]
    RootFindFailed { lo: f64, hi: f64 },
    #[error("constructed group violates an invariant: {0}")]
    InvariantViolated(String),
    #[error("generator id {0} does not exist")]
    UnknownGenerator(usize),
    #[error("cannot parse signature `{text}`: {reason}")]
    Parse { text: String, reason: String },
    #[error("cone point enumeration incomplete within radius {radius}")]
    ConePointEnumerationIncomplete { radius: f64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrbifoldSignature {
    genus: u32,
    cone_orders: Vec<u32>,
    boundary: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    A(usize),
    B(usize),
    Cone { index: usize, order: u32 },
    Boundary(usize),
}

impl OrbifoldSignature {
    pub fn new(genus: u32, cone_orders: Vec<u32>, boundary: u32) -> Result<Self, OrbifoldError> {
        if let Some(&m) = cone_orders.iter().find(|&&m| m < 2) {
            return Err(OrbifoldError::BadConeOrder(i64::from(m)));
        }
        Ok(OrbifoldSignature { genus, cone_orders, boundary })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn cone_orders(&self) -> &[u32] {
        &self.cone_orders
    }

    pub fn boundary_count(&self) -> u32 {
        self.boundary
    }

    /// Number of cone points plus boundary components.
    pub fn r(&self) -> u32 {
        self.cone_orders.len() as u32 + self.boundary
    }

    pub fn euler_characteristic(&self) -> Ratio<i64> {
        let mut chi = Ratio::from_integer(2 - 2 * i64::from(self.genus) - i64::from(self.boundary));
        for &m in &self.cone_orders {
            chi -= Ratio::new(i64::from(m) - 1, i64::from(m));
        }
        chi
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.euler_characteristic() < Ratio::from_integer(0)
    }

    pub fn counting_exponent(&self) -> i64 {
        6 * i64::from(self.genus) - 6 + 2 * i64::from(self.r())
    }

    pub fn is_exceptional(&self) -> bool {
        self.genus == 0 && self.r() == 3
    }

    pub fn side_count(&self) -> usize {
        4 * self.genus as usize + 2 * self.cone_orders.len() + 2 * self.boundary as usize
    }

    pub fn generator_count(&self) -> usize {
        2 * self.genus as usize + self.cone_orders.len() + self.boundary as usize
    }

    pub fn kind(&self, id: GenId) -> GeneratorKind {
        let id = id as usize;
        let g = self.genus as usize;
        let k = self.cone_orders.len();
        if id < 2 * g {
            if id.is_multiple_of(2) {
                GeneratorKind::A(id / 2)
            } else {
                GeneratorKind::B(id / 2)
            }
        } else if id < 2 * g + k {
            let index = id - 2 * g;
            GeneratorKind::Cone { index, order: self.cone_orders[index] }
        } else {
            GeneratorKind::Boundary(id - 2 * g - k)
        }
    }

    pub fn torsion_order(&self, id: GenId) -> Option<u32> {
        let g2 = 2 * self.genus as usize;
        let i = id as usize;
        if i >= g2 && i < g2 + self.cone_orders.len() {
            Some(self.cone_orders[i - g2])
        } else {
            None
        }
    }

    pub fn cone_generator(&self, index: usize) -> GenId {
        (2 * self.genus as usize + index) as GenId
    }

    pub fn boundary_generator(&self, index: usize) -> GenId {
        (2 * self.genus as usize + self.cone_orders.len() + index) as GenId
    }

    pub fn boundary_generators(&self) -> impl Iterator<Item = GenId> + '_ {
        (0..self.boundary as usize).map(|l| self.boundary_generator(l))
    }

    fn family_has_alias(&self, kind: GeneratorKind) -> bool {
        match kind {
            GeneratorKind::A(_) | GeneratorKind::B(_) => self.genus == 1,
            GeneratorKind::Cone { .. } => self.cone_orders.len() == 1,
            GeneratorKind::Boundary(_) => self.boundary == 1,
        }
    }

    pub fn generator_name(&self, id: GenId) -> String {
        match self.kind(id) {
            GeneratorKind::A(i) => format!("a{}", i + 1),
            GeneratorKind::B(i) => format!("b{}", i + 1),
            GeneratorKind::Cone { index, .. } => format!("x{}", index + 1),
            GeneratorKind::Boundary(l) => format!("c{}", l + 1),
        }
    }

    pub fn generator_id(&self, name: &str) -> Option<GenId> {
        let (family, number) = name.split_at(name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len()));
        let index: usize = if number.is_empty() {
            0
        } else {
            number.parse::<usize>().ok()?.checked_sub(1)?
        };
        let id = (0..self.generator_count() as GenId).find(|&id| {
            let kind = self.kind(id);
            let matches_family = matches!(
                (family, kind),
                ("a", GeneratorKind::A(_))
                    | ("b", GeneratorKind::B(_))
                    | ("x", GeneratorKind::Cone { .. })
                    | ("c", GeneratorKind::Boundary(_))
            );
            let idx = match kind {
                GeneratorKind::A(i) | GeneratorKind::B(i) | GeneratorKind::Boundary(i) => i,
                GeneratorKind::Cone { index, .. } => index,
            };
            matches_family && idx == index
        })?;
        if number.is_empty() && !self.family_has_alias(self.kind(id)) {
            return None;
        }
        Some(id)
    }

    /// `Π [a_i, b_i] · Π x_j · Π c_l`.
    pub fn relator(&self) -> Word {
        let mut letters = Vec::new();
        for i in 0..self.genus as GenId {
            let (a, b) = (2 * i, 2 * i + 1);
            letters.extend([(a, 1), (b, 1), (a, -1), (b, -1)]);
        }
        let g2 = 2 * self.genus as GenId;
        for id in g2..self.generator_count() as GenId {
            letters.push((id, 1));
        }
        Word::from_letters(letters)
    }

    /// Short stable digest of the canonical text form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_string().as_bytes());
        hex::encode(&digest[..8])
    }
}

impl fmt::Display for OrbifoldSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cones = if self.cone_orders.is_empty() {
            "-".to_string()
        } else {
            self.cone_orders.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
        };
        write!(f, "g={} cones={} boundary={}", self.genus, cones, self.boundary)
    }
}

#[derive(Deserialize)]
struct SignatureJson {
    genus: u32,
    #[serde(default)]
    cones: Vec<u32>,
    #[serde(default)]
    boundary: u32,
}

impl FromStr for OrbifoldSignature {
    type Err = OrbifoldError;

    /// Accepts `g=1 cones=3 boundary=0` (missing keys default to empty) or
    /// the JSON object `{"genus":1,"cones":[3],"boundary":0}`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| OrbifoldError::Parse { text: text.to_string(), reason: reason.to_string() };
        let trimmed = text.trim();
        if trimmed.starts_with('{') {
            let j: SignatureJson = serde_json::from_str(trimmed).map_err(|e| err(&e.to_string()))?;
            return OrbifoldSignature::new(j.genus, j.cones, j.boundary);
        }
        let (mut genus, mut cones, mut boundary) = (None, Vec::new(), 0);
        for item in trimmed.split_whitespace() {
            let (key, value) = item.split_once('=').ok_or_else(|| err("expected key=value"))?;
            match key {
                "g" | "genus" => genus = Some(value.parse().map_err(|_| err("bad genus"))?),
                "cones" => {
                    cones = if value.is_empty() || value == "-" {
                        Vec::new()
                    } else {
                        value
                            .split(',')
                            .map(|m| m.parse::<u32>())
                            .collect::<Result<_, _>>()
                            .map_err(|_| err("bad cone order"))?
                    }
                }
                "boundary" | "b" => boundary = value.parse().map_err(|_| err("bad boundary count"))?,
                _ => return Err(err("unknown key")),
            }
        }
        OrbifoldSignature::new(genus.ok_or_else(|| err("missing g"))?, cones, boundary)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VertexKind {
    Regular,
    Cone(u32),
    Boundary,
}

/// Polygon data for a given scale. Vertex `i` sits on the ray from `i` at
/// angle `i·β`, ordinary vertices at distance `scale`.
struct PolygonLayout {
    kinds: Vec<VertexKind>,
    beta: f64,
    scale: f64,
}

fn frame(phi: f64, r: f64) -> Isometry {
    Isometry::rotation_at_i(phi).compose(&Isometry::vertical_translation(r))
}

impl PolygonLayout {
    fn new(sig: &OrbifoldSignature, scale: f64) -> Self {
        let mut kinds = Vec::with_capacity(sig.side_count());
        for _ in 0..sig.genus {
            kinds.extend([VertexKind::Regular; 4]);
        }
        for &m in &sig.cone_orders {
            kinds.extend([VertexKind::Cone(m), VertexKind::Regular]);
        }
        for _ in 0..sig.boundary {
            kinds.extend([VertexKind::Boundary, VertexKind::Regular]);
        }
        kinds.rotate_right(1);
        let beta = 2.0 * PI / kinds.len() as f64;
        PolygonLayout { kinds, beta, scale }
    }

    fn n(&self) -> usize {
        self.kinds.len()
    }

    fn phi(&self, i: usize) -> f64 {
        (i % self.n()) as f64 * self.beta
    }

    /// Angle at a regular end between the side and the ray back to the
    /// centre, chosen so that the far end of the side is of type `kind`.
    fn psi_towards(&self, kind: VertexKind) -> f64 {
        let (beta, r) = (self.beta, self.scale);
        let tilted = |c: f64| {
            let a = beta.sin() * r.cosh();
            let b = beta.cos();
            b.atan2(a) + (c / a.hypot(b)).min(1.0).asin()
        };
        match kind {
            VertexKind::Regular => (1.0 / (beta / 2.0).tan() / r.cosh()).atan(),
            VertexKind::Cone(m) => tilted((PI / f64::from(m)).cos()),
            VertexKind::Boundary => {
                let ideal = tilted(1.0);
                (2.0 * ideal).min((ideal + PI) / 2.0)
            }
        }
    }

    fn side_psi(&self, i: usize) -> f64 {
        let a = self.kinds[i % self.n()];
        let b = self.kinds[(i + 1) % self.n()];
        self.psi_towards(if a == VertexKind::Regular { b } else { a })
    }

    fn angle_defect(&self) -> f64 {
        let n = self.n();
        let mut total = 0.0;
        for i in 0..n {
            let ends = [self.kinds[i], self.kinds[(i + 1) % n]]
                .iter()
                .filter(|&&k| k == VertexKind::Regular)
                .count();
            total += self.side_psi(i) * ends as f64;
        }
        total - 2.0 * PI
    }

    fn leaving_next(&self, i: usize, psi: f64) -> Isometry {
        frame(self.phi(i), self.scale).compose(&Isometry::rotation_at_i(PI - psi))
    }

    fn leaving_prev(&self, i: usize, psi: f64) -> Isometry {
        frame(self.phi(i), self.scale).compose(&Isometry::rotation_at_i(PI + psi))
    }

    fn generators(&self, sig: &OrbifoldSignature) -> Vec<Isometry> {
        let mut gens = Vec::with_capacity(sig.generator_count());
        let mut s = 0;
        for _ in 0..sig.genus {
            let a = self
                .leaving_next(s, self.side_psi(s))
                .compose(&self.leaving_prev(s + 3, self.side_psi(s + 2)).inverse());
            let b = self
                .leaving_next(s + 1, self.side_psi(s + 1))
                .compose(&self.leaving_prev(s + 4, self.side_psi(s + 3)).inverse())
                .inverse();
            gens.push(a);
            gens.push(b);
            s += 4;
        }
        for _ in 0..sig.cone_orders.len() + sig.boundary as usize {
            let g = self
                .leaving_next(s, self.side_psi(s))
                .compose(&self.leaving_prev(s + 2, self.side_psi(s + 1)).inverse());
            gens.push(g);
            s += 2;
        }
        gens
    }

    fn regular_vertices(&self) -> Vec<PlanePoint> {
        (0..self.n())
            .filter(|&i| self.kinds[i] == VertexKind::Regular)
            .map(|i| frame(self.phi(i), self.scale).apply(PlanePoint::I))
            .collect()
    }
}

/// Geometry of the fundamental polygon, used to enumerate lifts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Polygon {
    pub center: PlanePoint,
    /// Ordinary vertices, cone points, and feet on the boundary axes.
    pub corners: Vec<PlanePoint>,
    /// Fixed point of each cone generator.
    pub cone_points: Vec<PlanePoint>,
    /// Axis of each boundary generator.
    pub boundary_axes: Vec<BoundaryGeodesic>,
    /// Largest distance from the centre to a corner.
    pub radius: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FuchsianGroup {
    signature: OrbifoldSignature,
    scale: f64,
    generators: Vec<Isometry>,
    relator_residual: f64,
    polygon: Polygon,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeLift {
    pub point: PlanePoint,
    pub index: usize,
    pub order: u32,
}

impl FuchsianGroup {
    pub fn signature(&self) -> &OrbifoldSignature {
        &self.signature
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn generators(&self) -> &[Isometry] {
        &self.generators
    }

    pub fn relator_residual(&self) -> f64 {
        self.relator_residual
    }

    pub fn polygon(&self) -> &Polygon {
        &self.polygon
    }

    pub fn generator(&self, id: GenId) -> Result<&Isometry, OrbifoldError> {
        self.generators
            .get(id as usize)
            .ok_or(OrbifoldError::UnknownGenerator(id as usize))
    }

    pub fn generator_length(&self, id: GenId) -> Option<f64> {
        match classify(self.generators.get(id as usize)?) {
            Classification::Hyperbolic { length } => Some(length),
            _ => None,
        }
    }

    /// Product of generator matrices along the word.
    pub fn try_holonomy(&self, w: &Word) -> Result<Isometry, OrbifoldError> {
        let mut acc = Isometry::IDENTITY;
        for s in w.syllables() {
            let g = self.generator(s.gen)?;
            acc = acc.compose(&g.pow(i64::from(s.exp)));
        }
        Ok(acc)
    }

    /// Like [`try_holonomy`](Self::try_holonomy) for words known to use
    /// only this group's generators.
    pub fn holonomy(&self, w: &Word) -> Isometry {
        self.try_holonomy(w).expect("word uses a generator outside the group")
    }

    fn from_parts(signature: OrbifoldSignature, scale: f64, generators: Vec<Isometry>) -> Result<Self, OrbifoldError> {
        let layout = PolygonLayout::new(&signature, scale);
        let mut group = FuchsianGroup {
            polygon: Polygon {
                center: PlanePoint::I,
                corners: Vec::new(),
                cone_points: Vec::new(),
                boundary_axes: Vec::new(),
                radius: 0.0,
            },
            signature,
            scale,
            generators,
            relator_residual: 0.0,
        };
        group.relator_residual = group.holonomy(&group.signature.relator()).identity_residual();
        group.validate()?;
        group.polygon = group.compute_polygon(&layout)?;
        Ok(group)
    }

    fn compute_polygon(&self, layout: &PolygonLayout) -> Result<Polygon, OrbifoldError> {
        let sig = &self.signature;
        let mut corners = layout.regular_vertices();
        let cone_points: Vec<PlanePoint> = (0..sig.cone_orders.len())
            .map(|j| {
                elliptic_fixed_point(&self.generators[sig.cone_generator(j) as usize])
                    .ok_or_else(|| OrbifoldError::InvariantViolated(format!("x{} has no fixed point", j + 1)))
            })
            .collect::<Result<_, _>>()?;
        corners.extend(cone_points.iter().copied());
        let mut boundary_axes = Vec::new();
        for l in 0..sig.boundary as usize {
            let c = &self.generators[sig.boundary_generator(l) as usize];
            let ax = axis(c).map_err(|e| OrbifoldError::InvariantViolated(e.to_string()))?;
            let regular = layout.regular_vertices();
            corners.extend(regular.iter().map(|&v| ax.project(v)));
            boundary_axes.push(ax);
        }
        let radius = corners.iter().map(|&p| dist(PlanePoint::I, p)).fold(0.0, f64::max);
        Ok(Polygon { center: PlanePoint::I, corners, cone_points, boundary_axes, radius })
    }

    fn validate(&self) -> Result<(), OrbifoldError> {
        let sig = &self.signature;
        if self.relator_residual > TOL.relator_residual {
            return Err(OrbifoldError::InvariantViolated(format!(
                "relator residual {:e}",
                self.relator_residual
            )));
        }
        for id in 0..sig.generator_count() as GenId {
            let g = &self.generators[id as usize];
            if ((g.det() - 1.0).abs()) > TOL.det_drift * 10.0 {
                return Err(OrbifoldError::InvariantViolated(format!("det drift on {}", sig.generator_name(id))));
            }
            match (sig.kind(id), classify(g)) {
                (GeneratorKind::Cone { order, .. }, Classification::Elliptic { angle }) => {
                    let want = 2.0 * PI / f64::from(order);
                    if (angle - want).abs() > TOL.elliptic_angle {
                        return Err(OrbifoldError::InvariantViolated(format!(
                            "{} rotates by {angle}, expected {want}",
                            sig.generator_name(id)
                        )));
                    }
                }
                (GeneratorKind::Cone { .. }, other) => {
                    return Err(OrbifoldError::InvariantViolated(format!(
                        "{} is {other:?}",
                        sig.generator_name(id)
                    )))
                }
                (_, Classification::Hyperbolic { .. }) => {}
                (_, other) => {
                    return Err(OrbifoldError::InvariantViolated(format!(
                        "{} is {other:?}",
                        sig.generator_name(id)
                    )))
                }
            }
        }
        Ok(())
    }

    /// Every `γ ∈ Γ` whose tile `γP` has its centre within `radius` of
    /// `center`, found by walking tiles across paired sides.
    pub fn tiles_near(&self, center: PlanePoint, radius: f64) -> Vec<Isometry> {
        let reach = radius + 2.0 * self.polygon.radius;
        let key = |p: PlanePoint| ((p.x * 1e6).round() as i64, (p.y.ln() * 1e6).round() as i64);
        let mut moves: Vec<Isometry> = Vec::new();
        for g in &self.generators {
            moves.push(*g);
            moves.push(g.inverse());
        }
        // Start from the tile nearest to `center` by descending greedily.
        let mut start = Isometry::IDENTITY;
        loop {
            let here = dist(start.apply(PlanePoint::I), center);
            let better = moves
                .iter()
                .map(|m| start.compose(m))
                .map(|g| (dist(g.apply(PlanePoint::I), center), g))
                .filter(|(d, _)| *d < here - 1e-9)
                .min_by(|a, b| a.0.total_cmp(&b.0));
            match better {
                Some((_, g)) => start = g,
                None => break,
            }
        }
        let mut seen: HashMap<(i64, i64), ()> = HashMap::new();
        let mut out = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        seen.insert(key(start.apply(PlanePoint::I)), ());
        queue.push_back(start);
        while let Some(g) = queue.pop_front() {
            out.push(g);
            for m in &moves {
                let h = g.compose(m);
                let c = h.apply(PlanePoint::I);
                if dist(c, center) > reach {
                    continue;
                }
                if seen.insert(key(c), ()).is_none() {
                    queue.push_back(h);
                }
            }
        }
        out
    }

    fn cone_lifts_once(&self, center: PlanePoint, radius: f64) -> Vec<ConeLift> {
        let mut lifts: Vec<ConeLift> = Vec::new();
        for g in self.tiles_near(center, radius) {
            for (j, &p) in self.polygon.cone_points.iter().enumerate() {
                let q = g.apply(p);
                if dist(q, center) <= radius && !lifts.iter().any(|l| dist(l.point, q) < 1e-7) {
                    lifts.push(ConeLift { point: q, index: j, order: self.signature.cone_orders[j] });
                }
            }
        }
        lifts
    }

    /// Lifts of cone points within `radius` of `center`. The search region
    /// is enlarged once to confirm nothing was missed.
    pub fn cone_lifts(&self, center: PlanePoint, radius: f64) -> Result<Vec<ConeLift>, OrbifoldError> {
        let first = self.cone_lifts_once(center, radius);
        let check = self.cone_lifts_once(center, radius + self.polygon.radius);
        let confirmed = check.iter().filter(|l| dist(l.point, center) <= radius).count();
        if confirmed != first.len() {
            return Err(OrbifoldError::ConePointEnumerationIncomplete { radius });
        }
        Ok(first)
    }

    /// Lifts of boundary axes meeting the ball of `radius` about `center`.
    pub fn boundary_axes_near(&self, center: PlanePoint, radius: f64) -> Vec<BoundaryGeodesic> {
        let mut axes: Vec<BoundaryGeodesic> = Vec::new();
        for g in self.tiles_near(center, radius) {
            for ax in &self.polygon.boundary_axes {
                let a = ax.image(&g);
                if a.distance_to_point(center) <= radius && !axes.contains(&a) {
                    axes.push(a);
                }
            }
        }
        axes
    }
}

/// Builds the group by root-finding the polygon scale.
pub fn build_group(sig: &OrbifoldSignature) -> Result<FuchsianGroup, OrbifoldError> {
    if !sig.is_hyperbolic() {
        return Err(OrbifoldError::NonHyperbolic {
            sig: sig.to_string(),
            chi: sig.euler_characteristic().to_string(),
        });
    }
    if sig.side_count() < 3 {
        return Err(OrbifoldError::TooFewSides(sig.side_count()));
    }
    let scale = solve_scale(sig)?;
    let layout = PolygonLayout::new(sig, scale);
    FuchsianGroup::from_parts(sig.clone(), scale, layout.generators(sig))
}

/// Bisection on the polygon scale; the angle defect decreases with scale.
pub fn solve_scale(sig: &OrbifoldSignature) -> Result<f64, OrbifoldError> {
    let defect = |r: f64| PolygonLayout::new(sig, r).angle_defect();
    let (mut lo, mut hi) = (1e-6, 30.0);
    if !(defect(lo) > 0.0 && defect(hi) < 0.0) {
        return Err(OrbifoldError::RootFindFailed { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f = defect(mid);
        if f.abs() <= TOL.angle_defect {
            return Ok(mid);
        }
        if f > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Shipped group for the three reference signatures, if `sig` is one.
pub fn preset(sig: &OrbifoldSignature) -> Option<FuchsianGroup> {
    let (scale, entries) = presets::lookup(sig)?;
    let generators = entries
        .iter()
        .map(|e| Isometry::from_entries(e[0], e[1], e[2], e[3]))
        .collect();
    FuchsianGroup::from_parts(sig.clone(), scale, generators).ok()
}

/// Preset when available, otherwise the root-found construction.
pub fn group_for(sig: &OrbifoldSignature) -> Result<FuchsianGroup, OrbifoldError> {
    match preset(sig) {
        Some(g) => Ok(g),
        None => build_group(sig),
    }
}

pub fn preset_signatures() -> Vec<OrbifoldSignature> {
    presets::signatures()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(g: u32, cones: &[u32], b: u32) -> OrbifoldSignature {
        OrbifoldSignature::new(g, cones.to_vec(), b).unwrap()
    }

    #[test]
    fn euler_characteristic_examples() {
        assert_eq!(sig(0, &[2, 3, 7], 0).euler_characteristic(), Ratio::new(-1, 42));
        assert_eq!(sig(1, &[3], 0).euler_characteristic(), Ratio::new(-2, 3));
        assert_eq!(sig(0, &[2, 2, 2, 2], 0).euler_characteristic(), Ratio::from_integer(0));
        assert!(!sig(0, &[2, 2, 2, 2], 0).is_hyperbolic());
    }

    #[test]
    fn exponent_and_exceptional() {
        assert_eq!(sig(1, &[3], 0).counting_exponent(), 2);
        assert_eq!(sig(0, &[2, 2, 2, 3], 0).counting_exponent(), 2);
        assert_eq!(sig(2, &[], 0).counting_exponent(), 6);
        assert!(sig(0, &[2, 3, 7], 0).is_exceptional());
        assert!(!sig(1, &[3], 0).is_exceptional());
        assert!(!sig(0, &[2, 2, 2, 3], 0).is_exceptional());
    }

    #[test]
    fn non_hyperbolic_is_refused() {
        assert!(matches!(build_group(&sig(0, &[2, 2], 0)), Err(OrbifoldError::NonHyperbolic { .. })));
        assert!(OrbifoldSignature::new(0, vec![1], 0).is_err());
    }

    #[test]
    fn signature_text_round_trip() {
        let s: OrbifoldSignature = "g=1 cones=3 boundary=0".parse().unwrap();
        assert_eq!(s, sig(1, &[3], 0));
        assert_eq!(s.to_string(), "g=1 cones=3 boundary=0");
        let t: OrbifoldSignature = "g=0 cones=2,3,7".parse().unwrap();
        assert_eq!(t, sig(0, &[2, 3, 7], 0));
        let j: OrbifoldSignature = r#"{ "genus":1, "cones":[3], "boundary":0 }"#.parse().unwrap();
        assert_eq!(j, s);
        assert_eq!(sig(2, &[], 0).to_string(), "g=2 cones=- boundary=0");
        assert!("g=1 cones=x".parse::<OrbifoldSignature>().is_err());
        assert_eq!(s.hash().len(), 16);
    }

    #[test]
    fn generator_names_and_aliases() {
        let s = sig(1, &[3], 0);
        assert_eq!(s.generator_id("a"), Some(0));
        assert_eq!(s.generator_id("b1"), Some(1));
        assert_eq!(s.generator_id("x"), Some(2));
        let t = sig(0, &[2, 2, 2, 3], 0);
        assert_eq!(t.generator_id("x"), None);
        assert_eq!(t.generator_id("x4"), Some(3));
        assert_eq!(t.generator_id("x5"), None);
        assert_eq!(t.generator_name(2), "x3");
    }

    #[test]
    fn built_groups_satisfy_relations() {
        for s in [
            sig(1, &[3], 0),
            sig(2, &[], 0),
            sig(1, &[], 1),
            sig(2, &[2, 3], 1),
            sig(0, &[2, 2, 2, 3], 0),
            sig(0, &[2, 3, 7], 0),
            sig(0, &[], 3),
            sig(0, &[2], 2),
        ] {
            let g = build_group(&s).unwrap();
            assert!(g.relator_residual() <= 1e-9, "{s}: {}", g.relator_residual());
        }
    }

    #[test]
    fn solved_scales() {
        assert!((solve_scale(&sig(1, &[3], 0)).unwrap() - 1.443_635_475_178_810_5).abs() < 1e-11);
        assert!((solve_scale(&sig(2, &[], 0)).unwrap() - 2.448_452_447_678_076).abs() < 1e-11);
    }

    #[test]
    fn holonomy_basics() {
        let g = build_group(&sig(1, &[3], 0)).unwrap();
        assert!(g.holonomy(&Word::empty()).approx_eq(&Isometry::IDENTITY, 0.0));
        let x3 = Word::generator(2, 3);
        assert!(g.holonomy(&x3).identity_residual() <= 1e-9);
        assert!(g.holonomy(&Word::generator(0, 1)).approx_eq(&g.generators()[0], 0.0));
        assert!(g.try_holonomy(&Word::generator(7, 1)).is_err());
    }

    #[test]
    fn presets_load_and_match_builder() {
        for s in preset_signatures() {
            let shipped = preset(&s).expect("preset validates");
            let built = build_group(&s).unwrap();
            assert!(shipped.relator_residual() <= 1e-9);
            for (p, q) in shipped.generators().iter().zip(built.generators()) {
                assert!(p.approx_eq(q, 1e-9));
            }
        }
        assert!(preset(&sig(0, &[2, 3, 7], 0)).is_none());
    }

    #[test]
    fn cone_lifts_are_separated() {
        let g = build_group(&sig(0, &[2, 2, 2, 3], 0)).unwrap();
        let lifts = g.cone_lifts(PlanePoint::I, 3.0).unwrap();
        assert!(lifts.len() >= 4);
        for (i, p) in lifts.iter().enumerate() {
            for q in &lifts[..i] {
                assert!(dist(p.point, q.point) > 0.1);
            }
        }
    }
}
