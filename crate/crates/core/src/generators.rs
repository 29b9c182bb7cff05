//! Window providers for concrete tilings: parallelogram lattices, sheared
//! square rows, Penrose rhombs (as Robinson half-rhomb triangles) and the
//! pinwheel tiling.
//!
//! A provider stands for one fixed infinite tiling. Every window it hands out
//! is the set of tiles meeting an origin disk, and windows of different radii
//! are restrictions of each other.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Isometry2, Tolerances, Vec2};
use crate::tiling::{PlacedTile, Prototile, TilingWindow};

pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

pub const PENROSE_DEFAULT_DEPTH: u32 = 12;
pub const PINWHEEL_DEFAULT_DEPTH: u32 = 8;

/// Generator description as found in run configs:
/// `{"kind": "...", "params": {...}, "seed": integer}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub kind: String,
    #[serde(default = "empty_params")]
    pub params: serde_json::Value,
    #[serde(default)]
    pub seed: u64,
}

fn empty_params() -> serde_json::Value {
    serde_json::Value::Object(Default::default())
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeParams {
    basis: Option<[[f64; 2]; 2]>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShearParams {
    #[serde(default)]
    rule: OffsetRule,
    slide: Option<Slide>,
    flat_rows: Option<i64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubstitutionParams {
    depth: Option<u32>,
}

impl GeneratorSpec {
    pub fn new(kind: &str) -> Self {
        Self { kind: kind.to_string(), params: empty_params(), seed: 0 }
    }

    /// Builds the provider. `cover` bounds the radius of the windows a
    /// substitution provider will be asked for; lattice-type providers ignore
    /// it.
    pub fn build(&self, cover: f64) -> Result<WindowProvider> {
        let params = if self.params.is_null() { empty_params() } else { self.params.clone() };
        let bad = |e: serde_json::Error| Error::InvalidInput(format!("{} params: {e}", self.kind));
        match self.kind.as_str() {
            "lattice" => {
                let p: LatticeParams = serde_json::from_value(params).map_err(bad)?;
                let [b1, b2] = p.basis.unwrap_or([[1.0, 0.0], [0.0, 1.0]]);
                square_lattice((b1.into(), b2.into()))
            }
            "shear" => {
                let p: ShearParams = serde_json::from_value(params).map_err(bad)?;
                let offsets = ShearOffsets { rule: p.rule, seed: self.seed, slide: p.slide, flat_rows: p.flat_rows };
                offsets.validate()?;
                Ok(shear_squares(offsets))
            }
            "penrose" => {
                let p: SubstitutionParams = serde_json::from_value(params).map_err(bad)?;
                penrose(DepthPolicy { depth: p.depth.unwrap_or(PENROSE_DEFAULT_DEPTH), cover })
            }
            "pinwheel" => {
                let p: SubstitutionParams = serde_json::from_value(params).map_err(bad)?;
                pinwheel(DepthPolicy { depth: p.depth.unwrap_or(PINWHEEL_DEFAULT_DEPTH), cover })
            }
            other => Err(Error::InvalidInput(format!("unknown generator kind {other:?}"))),
        }
    }
}

/// Substitution depth and the radius up to which tiles are kept. The tiling
/// depends only on `depth`; `cover` only prunes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DepthPolicy {
    pub depth: u32,
    pub cover: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OffsetRule {
    /// All rows aligned: the unit square lattice.
    Zero,
    /// Row `k` shifted by `frac(k^2 φ)`.
    #[default]
    Golden,
    /// Row `k` shifted by a seeded pseudo-random value.
    Random,
}

/// Extra horizontal shift applied to every row `k >= from_row`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slide {
    pub from_row: i64,
    pub amount: f64,
}

/// Deterministic row offsets for [`shear_squares`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShearOffsets {
    pub rule: OffsetRule,
    pub seed: u64,
    pub slide: Option<Slide>,
    /// Rows with `|k| <= flat_rows` get offset zero (before the slide).
    pub flat_rows: Option<i64>,
}

impl ShearOffsets {
    pub fn golden() -> Self {
        Self { rule: OffsetRule::Golden, seed: 0, slide: None, flat_rows: None }
    }

    pub fn zero() -> Self {
        Self { rule: OffsetRule::Zero, ..Self::golden() }
    }

    pub fn with_slide(mut self, from_row: i64, amount: f64) -> Self {
        self.slide = Some(Slide { from_row, amount });
        self
    }

    pub fn with_flat_rows(mut self, rows: i64) -> Self {
        self.flat_rows = Some(rows);
        self
    }

    fn validate(&self) -> Result<()> {
        match self.slide {
            Some(s) if !s.amount.is_finite() => Err(Error::InvalidInput("slide amount must be finite".into())),
            _ => Ok(()),
        }
    }

    /// Offset of row `k`, in `[0, 1)`.
    pub fn offset(&self, k: i64) -> f64 {
        let flat = self.flat_rows.is_some_and(|f| k.abs() <= f);
        let base = match self.rule {
            _ if flat => 0.0,
            OffsetRule::Zero => 0.0,
            OffsetRule::Golden => {
                let k2 = (k as f64) * (k as f64);
                (k2 * GOLDEN_RATIO).rem_euclid(1.0)
            }
            OffsetRule::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                rng.gen::<f64>()
            }
        };
        let slide = match self.slide {
            Some(s) if k >= s.from_row => s.amount,
            _ => 0.0,
        };
        let o = (base + slide).rem_euclid(1.0);
        if o >= 1.0 {
            0.0
        } else {
            o
        }
    }
}

enum Source {
    Lattice { b1: Vec2, b2: Vec2, inverse: [[f64; 2]; 2], proto: Arc<Prototile> },
    Shear { offsets: ShearOffsets, proto: Arc<Prototile> },
    Patch { window: Arc<TilingWindow> },
}

impl Source {
    /// Source tiles meeting the disk, in a deterministic order.
    fn tiles_meeting(&self, center: Vec2, r: f64, tol: f64) -> Result<Vec<PlacedTile>> {
        match self {
            Source::Lattice { b1, b2, inverse, proto } => {
                let s = |p: Vec2| Vec2::new(inverse[0][0] * p.x + inverse[0][1] * p.y, inverse[1][0] * p.x + inverse[1][1] * p.y);
                let c = s(center);
                let ri = r * inverse[0][0].hypot(inverse[0][1]);
                let rj = r * inverse[1][0].hypot(inverse[1][1]);
                let mut out = Vec::new();
                for i in (c.x - ri).floor() as i64 - 1..=(c.x + ri).ceil() as i64 + 1 {
                    for j in (c.y - rj).floor() as i64 - 1..=(c.y + rj).ceil() as i64 + 1 {
                        let t = *b1 * i as f64 + *b2 * j as f64;
                        let tile = PlacedTile::new(proto.clone(), Isometry2::translation(t));
                        if tile.meets_disk(center, r, tol) {
                            out.push(tile);
                        }
                    }
                }
                Ok(out)
            }
            Source::Shear { offsets, proto } => {
                let mut out = Vec::new();
                for k in (center.y - r).floor() as i64 - 1..=(center.y + r).ceil() as i64 + 1 {
                    let o = offsets.offset(k);
                    for i in (center.x - r - o).floor() as i64 - 1..=(center.x + r - o).ceil() as i64 + 1 {
                        let t = Vec2::new(i as f64 + o, k as f64);
                        let tile = PlacedTile::new(proto.clone(), Isometry2::translation(t));
                        if tile.meets_disk(center, r, tol) {
                            out.push(tile);
                        }
                    }
                }
                Ok(out)
            }
            Source::Patch { window } => {
                let needed = center.norm() + r;
                if needed > window.radius + tol {
                    return Err(Error::InsufficientWindow { needed, available: window.radius });
                }
                Ok(window.tiles_meeting(center, r, tol).into_iter().map(|i| window.tiles[i].clone()).collect())
            }
        }
    }

    fn max_radius(&self) -> Option<f64> {
        match self {
            Source::Patch { window } => Some(window.radius),
            _ => None,
        }
    }
}

struct Inner {
    source: Source,
    prototiles: Vec<Arc<Prototile>>,
    transform: Isometry2,
    tol: f64,
    cache: Mutex<HashMap<u64, Arc<TilingWindow>>>,
}

/// Deterministic oracle for nested windows of one fixed tiling. Cheap to
/// clone; windows are cached and safe to request from several threads.
#[derive(Clone)]
pub struct WindowProvider {
    inner: Arc<Inner>,
}

impl std::fmt::Debug for WindowProvider {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WindowProvider")
            .field("prototiles", &self.inner.prototiles.len())
            .field("transform", &self.inner.transform)
            .finish()
    }
}

impl WindowProvider {
    fn from_source(source: Source, prototiles: Vec<Arc<Prototile>>) -> Self {
        Self {
            inner: Arc::new(Inner {
                source,
                prototiles,
                transform: Isometry2::IDENTITY,
                tol: Tolerances::default().geom,
                cache: Mutex::new(HashMap::new()),
            }),
        }
    }

    /// Provider serving restrictions of a fixed finite window.
    pub fn from_window(window: TilingWindow) -> Self {
        let prototiles = window.prototiles.clone();
        Self::from_source(Source::Patch { window: Arc::new(window) }, prototiles)
    }

    /// The tiling `T x`.
    pub fn transformed(&self, t: &Isometry2) -> Self {
        let source = match &self.inner.source {
            Source::Lattice { b1, b2, inverse, proto } => {
                Source::Lattice { b1: *b1, b2: *b2, inverse: *inverse, proto: proto.clone() }
            }
            Source::Shear { offsets, proto } => Source::Shear { offsets: *offsets, proto: proto.clone() },
            Source::Patch { window } => Source::Patch { window: window.clone() },
        };
        Self {
            inner: Arc::new(Inner {
                source,
                prototiles: self.inner.prototiles.clone(),
                transform: t.compose(&self.inner.transform),
                tol: self.inner.tol,
                cache: Mutex::new(HashMap::new()),
            }),
        }
    }

    /// The tiling `T_v x`.
    pub fn translated(&self, v: Vec2) -> Self {
        self.transformed(&Isometry2::translation(v))
    }

    pub fn prototiles(&self) -> &[Arc<Prototile>] {
        &self.inner.prototiles
    }

    pub fn max_diameter(&self) -> f64 {
        self.inner.prototiles.iter().map(|p| p.diameter()).fold(0.0, f64::max)
    }

    /// Largest window radius available, `None` when unbounded.
    pub fn max_radius(&self) -> Option<f64> {
        let shift = self.inner.transform.inverse().apply(Vec2::ZERO).norm();
        self.inner.source.max_radius().map(|r| r - shift)
    }

    pub fn ensure_radius(&self, needed: f64) -> Result<()> {
        match self.max_radius() {
            Some(available) if available + self.inner.tol < needed => Err(Error::InsufficientWindow { needed, available }),
            _ => Ok(()),
        }
    }

    /// All tiles meeting `B_radius`.
    pub fn window(&self, radius: f64) -> Result<Arc<TilingWindow>> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput("window radius must be positive".into()));
        }
        let key = radius.to_bits();
        if let Some(w) = self.inner.cache.lock().expect("window cache poisoned").get(&key) {
            return Ok(w.clone());
        }
        let t = &self.inner.transform;
        let center = t.inverse().apply(Vec2::ZERO);
        let identity = *t == Isometry2::IDENTITY;
        let tiles: Vec<PlacedTile> = self
            .inner
            .source
            .tiles_meeting(center, radius + self.inner.tol, self.inner.tol)?
            .into_iter()
            .map(|tile| if identity { tile } else { tile.transformed(t) })
            .filter(|tile| tile.meets_disk(Vec2::ZERO, radius, self.inner.tol))
            .collect();
        let w = Arc::new(TilingWindow::new(radius, self.inner.prototiles.clone(), tiles));
        self.inner.cache.lock().expect("window cache poisoned").entry(key).or_insert_with(|| w.clone());
        Ok(w)
    }
}

/// The periodic tiling by the fundamental parallelogram of a lattice.
pub fn square_lattice(basis: (Vec2, Vec2)) -> Result<WindowProvider> {
    let (mut b1, mut b2) = basis;
    let det = b1.cross(b2);
    if !b1.is_finite() || !b2.is_finite() || det.abs() <= 1e-12 * b1.norm() * b2.norm() || det == 0.0 {
        return Err(Error::DegenerateBasis);
    }
    if det < 0.0 {
        std::mem::swap(&mut b1, &mut b2);
    }
    let det = det.abs();
    let inverse = [[b2.y / det, -b2.x / det], [-b1.y / det, b1.x / det]];
    let proto = Arc::new(Prototile::new("cell", vec![Vec2::ZERO, b1, b1 + b2, b2])?);
    Ok(WindowProvider::from_source(Source::Lattice { b1, b2, inverse, proto: proto.clone() }, vec![proto]))
}

pub fn unit_square_lattice() -> WindowProvider {
    square_lattice((Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0))).expect("unit basis is independent")
}

/// Unit squares in horizontal rows; row `k` is shifted by `offsets.offset(k)`.
/// Every horizontal grid line is a shear line.
pub fn shear_squares(offsets: ShearOffsets) -> WindowProvider {
    let proto = Arc::new(
        Prototile::new("square", vec![Vec2::ZERO, Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)])
            .expect("unit square is a valid prototile"),
    );
    WindowProvider::from_source(Source::Shear { offsets, proto: proto.clone() }, vec![proto])
}

// ---------------------------------------------------------------------------
// Penrose rhombs via Robinson triangles

#[derive(Clone, Copy)]
struct Robinson {
    thick: bool,
    a: Vec2,
    b: Vec2,
    c: Vec2,
}

fn triangle_meets_disk(p: &[Vec2; 3], r: f64) -> bool {
    crate::geometry::point_polygon_distance(Vec2::ZERO, p) < r
}

fn robinson_subdivide(t: &Robinson, out: &mut Vec<Robinson>) {
    let phi = GOLDEN_RATIO;
    let (a, b, c) = (t.a, t.b, t.c);
    if !t.thick {
        let p = a + (b - a) * (1.0 / phi);
        out.push(Robinson { thick: false, a: c, b: p, c: b });
        out.push(Robinson { thick: true, a: p, b: c, c: a });
    } else {
        let q = b + (a - b) * (1.0 / phi);
        let r = b + (c - b) * (1.0 / phi);
        out.push(Robinson { thick: true, a: r, b: c, c: a });
        out.push(Robinson { thick: true, a: q, b: r, c: b });
        out.push(Robinson { thick: false, a: r, b: q, c: a });
    }
}

/// Penrose rhomb tiling with unit edges, represented by half-rhomb
/// triangles. Rhomb edges point along the ten multiples of 36°, and each
/// (half, chirality, direction) triple is its own prototile, so all
/// placements are translations.
///
/// Built by the Robinson triangle substitution from a ten-triangle wheel of
/// radius `φ^depth`.
pub fn penrose(policy: DepthPolicy) -> Result<WindowProvider> {
    let phi = GOLDEN_RATIO;
    let scale = phi.powi(policy.depth as i32);
    let inradius = scale * (PI / 10.0).cos();
    let max_diam = phi;
    if policy.cover + max_diam > inradius {
        return Err(Error::InsufficientWindow { needed: policy.cover + max_diam, available: inradius });
    }
    let mut tris: Vec<Robinson> = (0..10)
        .map(|i| {
            let mut b = Vec2::from_polar(scale, (2 * i - 1) as f64 * PI / 10.0 + PI / 10.0);
            let mut c = Vec2::from_polar(scale, (2 * i + 1) as f64 * PI / 10.0 + PI / 10.0);
            if i % 2 == 0 {
                std::mem::swap(&mut b, &mut c);
            }
            Robinson { thick: false, a: Vec2::ZERO, b, c }
        })
        .collect();
    for _ in 0..policy.depth {
        let mut next = Vec::with_capacity(tris.len() * 3);
        for t in &tris {
            robinson_subdivide(t, &mut next);
        }
        next.retain(|t| triangle_meets_disk(&[t.a, t.b, t.c], policy.cover + 1.0));
        tris = next;
    }

    let step = PI / 5.0;
    let mut protos: HashMap<String, Arc<Prototile>> = HashMap::new();
    let mut tiles = Vec::with_capacity(tris.len());
    for t in &tris {
        let ab = t.b - t.a;
        let ac = t.c - t.a;
        let chirality = if ab.cross(ac) > 0.0 { '+' } else { '-' };
        let k = (ab.angle() / step).round().rem_euclid(10.0) as i64;
        let apex = if t.thick { 3.0 * step } else { step };
        let id = format!("{}{}{}", if t.thick { "thick" } else { "thin" }, chirality, k);
        let proto = protos
            .entry(id.clone())
            .or_insert_with(|| {
                let dir = k as f64 * step;
                let b = Vec2::from_polar(1.0, dir);
                let sign = if chirality == '+' { 1.0 } else { -1.0 };
                let c = Vec2::from_polar(1.0, dir + sign * apex);
                let verts = if sign > 0.0 { vec![Vec2::ZERO, b, c] } else { vec![Vec2::ZERO, c, b] };
                Arc::new(Prototile::new(id, verts).expect("half-rhomb is a valid prototile"))
            })
            .clone();
        let tile = PlacedTile::new(proto, Isometry2::translation(t.a));
        debug_assert!([t.b, t.c].iter().all(|v| tile.vertices.iter().any(|w| w.dist(*v) < 1e-9)));
        if tile.meets_disk(Vec2::ZERO, policy.cover + 1e-6, 0.0) {
            tiles.push(tile);
        }
    }
    let mut prototiles: Vec<Arc<Prototile>> = protos.into_values().collect();
    prototiles.sort_by(|a, b| a.id.cmp(&b.id));
    let window = TilingWindow::new(policy.cover, prototiles.clone(), tiles);
    Ok(WindowProvider::from_source(Source::Patch { window: Arc::new(window) }, prototiles))
}

// ---------------------------------------------------------------------------
// Pinwheel

/// Right triangle with legs in ratio 2:1, by its right-angle vertex and the
/// far ends of the long and short legs.
#[derive(Clone, Copy)]
struct Pin {
    right: Vec2,
    long: Vec2,
    short: Vec2,
}

fn pin_subdivide(t: &Pin, out: &mut Vec<Pin>) {
    let (o, l, s) = (t.right, t.long, t.short);
    let d = s - l;
    let h = l + d * ((o - l).dot(d) / d.norm2());
    out.push(Pin { right: h, long: o, short: s });
    // the remaining triangle (right angle h, legs h->l and h->o) is twice a
    // child; in its frame with legs 4 and 2 it splits into two corner copies
    // and a 2x1 rectangle cut along its diagonal from the right angle
    let g = |a: f64, b: f64| h + (l - h) * (a / 4.0) + (o - h) * (b / 2.0);
    out.push(Pin { right: g(0.0, 1.0), long: g(2.0, 1.0), short: g(0.0, 2.0) });
    out.push(Pin { right: g(2.0, 0.0), long: g(4.0, 0.0), short: g(2.0, 1.0) });
    out.push(Pin { right: g(2.0, 0.0), long: g(0.0, 0.0), short: g(2.0, 1.0) });
    out.push(Pin { right: g(0.0, 1.0), long: g(2.0, 1.0), short: g(0.0, 0.0) });
}

/// Conway's pinwheel tiling with legs 1 and 2: each triangle splits into
/// five copies scaled by 1/√5, two of the same handedness and three
/// mirrored. Tile orientations are dense, so placements are general direct
/// isometries of the two mirror-image prototiles.
pub fn pinwheel(policy: DepthPolicy) -> Result<WindowProvider> {
    let s = 5f64.sqrt().powi(policy.depth as i32);
    let max_diam = 5f64.sqrt();
    if policy.cover + max_diam > s / 2.0 {
        return Err(Error::InsufficientWindow { needed: policy.cover + max_diam, available: s / 2.0 });
    }
    let mut tris = vec![
        Pin { right: Vec2::new(s, -s / 2.0), long: Vec2::new(-s, -s / 2.0), short: Vec2::new(s, s / 2.0) },
        Pin { right: Vec2::new(-s, s / 2.0), long: Vec2::new(s, s / 2.0), short: Vec2::new(-s, -s / 2.0) },
    ];
    for _ in 0..policy.depth {
        let mut next = Vec::with_capacity(tris.len() * 5);
        for t in &tris {
            pin_subdivide(t, &mut next);
        }
        next.retain(|t| triangle_meets_disk(&[t.right, t.long, t.short], policy.cover + 1.0));
        tris = next;
    }
    let right_handed = Arc::new(
        Prototile::new("pin+", vec![Vec2::ZERO, Vec2::new(2.0, 0.0), Vec2::new(0.0, 1.0)]).expect("valid triangle"),
    );
    let left_handed = Arc::new(
        Prototile::new("pin-", vec![Vec2::ZERO, Vec2::new(0.0, -1.0), Vec2::new(2.0, 0.0)]).expect("valid triangle"),
    );
    let mut tiles = Vec::with_capacity(tris.len());
    for t in &tris {
        let (l, sh) = (t.long - t.right, t.short - t.right);
        let proto = if l.cross(sh) > 0.0 { &right_handed } else { &left_handed };
        let tile = PlacedTile::new(proto.clone(), Isometry2::new(l.angle(), t.right));
        debug_assert!([t.long, t.short].iter().all(|v| tile.vertices.iter().any(|w| w.dist(*v) < 1e-9)));
        if tile.meets_disk(Vec2::ZERO, policy.cover + 1e-6, 0.0) {
            tiles.push(tile);
        }
    }
    let prototiles = vec![right_handed, left_handed];
    let window = TilingWindow::new(policy.cover, prototiles.clone(), tiles);
    Ok(WindowProvider::from_source(Source::Patch { window: Arc::new(window) }, prototiles))
}
