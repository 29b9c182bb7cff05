//! Tiles, finite tiling windows, patches, skeletons and protopatch
//! canonical forms.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{
    bounding_box, disk_area, is_simple, point_polygon_distance, polygon_area, polygon_boundary_distance,
    polygon_centroid, polygon_diameter, polygon_disk_intersection_area, polygon_overlap_area, Isometry2, Segment,
    SegmentSet, Tolerances, Vec2,
};

/// A polygonal prototile. Vertices are counterclockwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Prototile {
    pub id: String,
    pub vertices: Vec<Vec2>,
    diameter: f64,
}

impl Prototile {
    pub fn new(id: impl Into<String>, vertices: Vec<Vec2>) -> Result<Self> {
        let id = id.into();
        if vertices.len() < 3 || vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("prototile {id}: need at least 3 finite vertices")));
        }
        if polygon_area(&vertices) <= 0.0 {
            return Err(Error::InvalidInput(format!("prototile {id}: vertices must be counterclockwise")));
        }
        if !is_simple(&vertices) {
            return Err(Error::InvalidInput(format!("prototile {id}: polygon is not simple")));
        }
        let diameter = polygon_diameter(&vertices);
        Ok(Self { id, vertices, diameter })
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices)
    }
}

/// A prototile copy placed by a direct isometry. World-space vertices are
/// cached.
#[derive(Clone)]
pub struct PlacedTile {
    pub proto: Arc<Prototile>,
    pub placement: Isometry2,
    pub vertices: Vec<Vec2>,
    pub centroid: Vec2,
}

impl fmt::Debug for PlacedTile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlacedTile")
            .field("proto", &self.proto.id)
            .field("angle", &self.placement.angle())
            .field("translation", &self.placement.translation)
            .finish()
    }
}

impl PlacedTile {
    pub fn new(proto: Arc<Prototile>, placement: Isometry2) -> Self {
        let vertices: Vec<Vec2> = proto.vertices.iter().map(|v| placement.apply(*v)).collect();
        let centroid = polygon_centroid(&vertices);
        Self { proto, placement, vertices, centroid }
    }

    pub fn transformed(&self, t: &Isometry2) -> Self {
        PlacedTile::new(self.proto.clone(), t.compose(&self.placement))
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| Segment::new(self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// The tile has points strictly closer than `r - tol` to `center`.
    pub fn meets_disk(&self, center: Vec2, r: f64, tol: f64) -> bool {
        if self.centroid.dist(center) > r + self.proto.diameter() {
            return false;
        }
        point_polygon_distance(center, &self.vertices) < r - tol
    }

    pub fn disk_overlap_area(&self, center: Vec2, r: f64) -> f64 {
        if self.centroid.dist(center) > r + self.proto.diameter() {
            return 0.0;
        }
        polygon_disk_intersection_area(&self.vertices, center, r)
    }

    /// Same prototile and the same point set, vertex by vertex within `tol`.
    pub fn coincides(&self, other: &PlacedTile, tol: f64) -> bool {
        if self.vertices.len() != other.vertices.len() || self.proto.id != other.proto.id {
            return false;
        }
        if self.centroid.dist(other.centroid) > tol {
            return false;
        }
        self.vertices.iter().all(|v| other.vertices.iter().any(|w| v.dist(*w) <= tol))
    }

    pub fn is_adjacent(&self, other: &PlacedTile, tol: f64) -> bool {
        if self.centroid.dist(other.centroid) > self.proto.diameter() + other.proto.diameter() + tol {
            return false;
        }
        polygon_boundary_distance(&self.vertices, &other.vertices) <= tol
    }

    pub fn max_norm(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Uniform bucket grid over tile bounding boxes.
#[derive(Clone, Debug, Default)]
pub struct TileGrid {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<u32>>,
}

impl TileGrid {
    pub fn new(tiles: &[PlacedTile]) -> Self {
        let cell = tiles.iter().map(|t| t.proto.diameter()).fold(0.0, f64::max).max(1e-6);
        let mut buckets: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (i, t) in tiles.iter().enumerate() {
            let (lo, hi) = bounding_box(&t.vertices);
            let (x0, y0) = Self::key_of(cell, lo);
            let (x1, y1) = Self::key_of(cell, hi);
            for x in x0..=x1 {
                for y in y0..=y1 {
                    buckets.entry((x, y)).or_default().push(i as u32);
                }
            }
        }
        Self { cell, buckets }
    }

    fn key_of(cell: f64, p: Vec2) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    /// Indices of tiles whose bounding box may meet the disk, ascending.
    pub fn near(&self, center: Vec2, r: f64) -> Vec<usize> {
        let (x0, y0) = Self::key_of(self.cell, center - Vec2::new(r, r));
        let (x1, y1) = Self::key_of(self.cell, center + Vec2::new(r, r));
        let mut out = Vec::new();
        for x in x0..=x1 {
            for y in y0..=y1 {
                if let Some(b) = self.buckets.get(&(x, y)) {
                    out.extend(b.iter().map(|&i| i as usize));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn at(&self, p: Vec2) -> &[u32] {
        self.buckets.get(&Self::key_of(self.cell, p)).map(|v| v.as_slice()).unwrap_or(&[])
    }
}

/// Result of the covers/packs area audit of a window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WindowAudit {
    pub disk_area: f64,
    /// `|B_R| - (sum of tile areas in B_R - pairwise overlaps)`.
    pub coverage_deficit: f64,
    pub max_pair_overlap: f64,
    pub total_overlap: f64,
    pub tiles_missing_disk: usize,
}

impl WindowAudit {
    pub fn covers(&self, tol: &Tolerances) -> bool {
        self.coverage_deficit <= tol.area * self.disk_area
    }

    pub fn packs(&self, tol: &Tolerances) -> bool {
        self.total_overlap <= tol.area * self.disk_area
    }

    pub fn is_valid(&self, tol: &Tolerances) -> bool {
        self.covers(tol) && self.packs(tol) && self.tiles_missing_disk == 0
    }
}

/// All tiles of a tiling meeting the closed disk `B_R` about the origin.
#[derive(Clone, Debug)]
pub struct TilingWindow {
    pub radius: f64,
    pub prototiles: Vec<Arc<Prototile>>,
    pub tiles: Vec<PlacedTile>,
    grid: TileGrid,
}

impl TilingWindow {
    pub fn new(radius: f64, prototiles: Vec<Arc<Prototile>>, tiles: Vec<PlacedTile>) -> Self {
        let grid = TileGrid::new(&tiles);
        Self { radius, prototiles, tiles, grid }
    }

    pub fn max_diameter(&self) -> f64 {
        self.prototiles.iter().map(|p| p.diameter()).fold(0.0, f64::max)
    }

    pub fn grid(&self) -> &TileGrid {
        &self.grid
    }

    pub fn prototile(&self, id: &str) -> Option<&Arc<Prototile>> {
        self.prototiles.iter().find(|p| p.id == id)
    }

    /// Index of the window tile coinciding with `tile`, if any.
    pub fn find_coincident(&self, tile: &PlacedTile, tol: f64) -> Option<usize> {
        self.grid.at(tile.centroid).iter().map(|&i| i as usize).find(|&i| self.tiles[i].coincides(tile, tol))
    }

    pub fn contains_tile(&self, tile: &PlacedTile, tol: f64) -> bool {
        self.find_coincident(tile, tol).is_some()
    }

    /// Indices of tiles meeting the disk, ascending.
    pub fn tiles_meeting(&self, center: Vec2, r: f64, tol: f64) -> Vec<usize> {
        let mut out = self.grid.near(center, r);
        out.retain(|&i| self.tiles[i].meets_disk(center, r, tol));
        out
    }

    /// Tiles whose centroid lies within `r` of `p`.
    pub fn tiles_with_centroid_near(&self, p: Vec2, r: f64) -> Vec<usize> {
        let mut out = self.grid.near(p, r);
        out.retain(|&i| self.tiles[i].centroid.dist(p) <= r);
        out
    }

    /// Covers/packs audit by area.
    pub fn audit(&self, tol: &Tolerances) -> WindowAudit {
        let r = self.radius;
        let mut covered = 0.0;
        let mut total_overlap = 0.0;
        let mut max_pair_overlap: f64 = 0.0;
        let mut missing = 0;
        for (i, t) in self.tiles.iter().enumerate() {
            covered += t.disk_overlap_area(Vec2::ZERO, r);
            if !t.meets_disk(Vec2::ZERO, r + tol.geom, 0.0) {
                missing += 1;
            }
            for j in self.grid.near(t.centroid, t.proto.diameter()) {
                if j <= i {
                    continue;
                }
                let o = &self.tiles[j];
                if t.centroid.dist(o.centroid) > t.proto.diameter() + o.proto.diameter() {
                    continue;
                }
                let ov = polygon_overlap_area(&t.vertices, &o.vertices);
                total_overlap += ov;
                max_pair_overlap = max_pair_overlap.max(ov);
            }
        }
        let area = disk_area(r);
        WindowAudit {
            disk_area: area,
            coverage_deficit: (area - (covered - total_overlap)).max(0.0),
            max_pair_overlap,
            total_overlap,
            tiles_missing_disk: missing,
        }
    }

    /// The tiles of this window meeting a smaller origin disk.
    pub fn restrict(&self, radius: f64, tol: f64) -> TilingWindow {
        let tiles = self.tiles.iter().filter(|t| t.meets_disk(Vec2::ZERO, radius, tol)).cloned().collect();
        TilingWindow::new(radius, self.prototiles.clone(), tiles)
    }

    pub fn to_file(&self) -> WindowFile {
        WindowFile {
            prototiles: self
                .prototiles
                .iter()
                .map(|p| PrototileRecord { id: p.id.clone(), vertices: p.vertices.iter().map(|v| [v.x, v.y]).collect() })
                .collect(),
            tiles: self.tiles.iter().map(TileRecord::from_tile).collect(),
            radius: self.radius,
        }
    }

    pub fn from_file(file: &WindowFile) -> Result<Self> {
        if !(file.radius > 0.0) {
            return Err(Error::InvalidInput("window radius must be positive".into()));
        }
        let mut prototiles = Vec::with_capacity(file.prototiles.len());
        for p in &file.prototiles {
            if prototiles.iter().any(|q: &Arc<Prototile>| q.id == p.id) {
                return Err(Error::InvalidInput(format!("duplicate prototile id {}", p.id)));
            }
            prototiles.push(Arc::new(Prototile::new(p.id.clone(), p.vertices.iter().map(|&v| v.into()).collect())?));
        }
        let tiles = resolve_tiles(&file.tiles, &prototiles)?;
        Ok(TilingWindow::new(file.radius, prototiles, tiles))
    }
}

pub(crate) fn resolve_tiles(records: &[TileRecord], table: &[Arc<Prototile>]) -> Result<Vec<PlacedTile>> {
    let lookup: BTreeMap<&str, &Arc<Prototile>> = table.iter().map(|p| (p.id.as_str(), p)).collect();
    records
        .iter()
        .map(|r| {
            let proto = lookup
                .get(r.proto.as_str())
                .ok_or_else(|| Error::InvalidInput(format!("unknown prototile {}", r.proto)))?;
            if !r.rotation.is_finite() || !r.translation.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidInput("non-finite tile placement".into()));
            }
            Ok(PlacedTile::new((*proto).clone(), Isometry2::new(r.rotation, r.translation.into())))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrototileRecord {
    pub id: String,
    pub vertices: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileRecord {
    pub proto: String,
    /// Radians.
    pub rotation: f64,
    pub translation: [f64; 2],
}

impl TileRecord {
    pub fn from_tile(t: &PlacedTile) -> Self {
        let angle = t.placement.angle();
        TileRecord {
            proto: t.proto.id.clone(),
            rotation: if angle == 0.0 { 0.0 } else { angle },
            translation: t.placement.translation.into(),
        }
    }
}

/// Tiling window JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowFile {
    pub prototiles: Vec<PrototileRecord>,
    pub tiles: Vec<TileRecord>,
    pub radius: f64,
}

/// The union of all tile boundaries. Shared edges appear once per tile.
pub fn skeleton(w: &TilingWindow) -> SegmentSet {
    SegmentSet::new(w.tiles.iter().flat_map(|t| t.edges()).collect())
}

/// A finite, nonempty set of tiles with connected union.
#[derive(Clone, Debug)]
pub struct Patch {
    pub tiles: Vec<PlacedTile>,
}

impl Patch {
    /// Validates nonemptiness and connectivity (corner contact counts).
    pub fn new(tiles: Vec<PlacedTile>, tol: f64) -> Result<Self> {
        if tiles.is_empty() {
            return Err(Error::InvalidPatch("empty patch".into()));
        }
        if !tiles_connected(&tiles, tol) {
            return Err(Error::InvalidPatch("union of tiles is not connected".into()));
        }
        Ok(Self { tiles })
    }

    /// Callers guarantee the patch invariants.
    pub(crate) fn from_tiles_unchecked(tiles: Vec<PlacedTile>) -> Self {
        Self { tiles }
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn transformed(&self, t: &Isometry2) -> Patch {
        Patch { tiles: self.tiles.iter().map(|x| x.transformed(t)).collect() }
    }

    pub fn is_connected(&self, tol: f64) -> bool {
        tiles_connected(&self.tiles, tol)
    }

    /// Area-weighted centroid of the support.
    pub fn centroid(&self) -> Vec2 {
        let mut acc = Vec2::ZERO;
        let mut area = 0.0;
        for t in &self.tiles {
            let a = t.proto.area();
            acc += t.centroid * a;
            area += a;
        }
        acc * (1.0 / area)
    }

    pub fn records(&self) -> Vec<TileRecord> {
        self.tiles.iter().map(TileRecord::from_tile).collect()
    }

    /// Every tile coincides with a tile of `w`.
    pub fn is_contained_in(&self, w: &TilingWindow, tol: f64) -> bool {
        self.tiles.iter().all(|t| w.contains_tile(t, tol))
    }
}

fn tiles_connected(tiles: &[PlacedTile], tol: f64) -> bool {
    let n = tiles.len();
    if n <= 1 {
        return n == 1;
    }
    let grid = TileGrid::new(tiles);
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(i) = stack.pop() {
        let t = &tiles[i];
        for j in grid.near(t.centroid, t.proto.diameter() + tol) {
            if !seen[j] && t.is_adjacent(&tiles[j], tol) {
                seen[j] = true;
                count += 1;
                stack.push(j);
            }
        }
    }
    count == n
}

/// The minimal element of `w[[K]]` for the disk `K = B(center, radius)`:
/// exactly the window tiles meeting the disk. Its union is connected because
/// every tile meets the (connected) disk and the tiles cover it.
pub fn patches_covering(w: &TilingWindow, radius: f64, center: Vec2, tol: &Tolerances) -> Result<Patch> {
    let needed = center.norm() + radius;
    if needed > w.radius + tol.geom {
        return Err(Error::InsufficientWindow { needed, available: w.radius });
    }
    let idx = w.tiles_meeting(center, radius, tol.geom);
    if idx.is_empty() {
        return Err(Error::InvalidPatch("no tile meets the disk".into()));
    }
    Ok(Patch::from_tiles_unchecked(idx.into_iter().map(|i| w.tiles[i].clone()).collect()))
}

/// `disk ⊆ supp(p)`, decided by comparing covered area with the disk area.
/// Assumes the patch tiles pack.
pub fn patch_support_contains_disk(p: &Patch, radius: f64, center: Vec2, tol: &Tolerances) -> bool {
    let covered: f64 = p.tiles.iter().map(|t| t.disk_overlap_area(center, radius)).sum();
    let area = disk_area(radius);
    area - covered <= tol.area * area
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    Translation,
    Isometry,
}

type TileKey = (String, Vec<(i64, i64)>);

/// Representative of a (congruence) protopatch with a 64-bit hash of its
/// quantized description.
#[derive(Clone, Debug)]
pub struct CanonicalProtopatch {
    pub mode: MatchMode,
    pub representative: Patch,
    pub hash: u64,
    pub quantum: f64,
    /// Isometry taking the input patch to the representative.
    pub to_canonical: Isometry2,
    key: Vec<TileKey>,
}

impl PartialEq for CanonicalProtopatch {
    fn eq(&self, other: &Self) -> bool {
        self.mode == other.mode && self.key == other.key
    }
}

impl CanonicalProtopatch {
    pub fn tile_count(&self) -> usize {
        self.key.len()
    }
}

fn quantize(v: Vec2, q: f64) -> (i64, i64) {
    ((v.x / q).round() as i64, (v.y / q).round() as i64)
}

fn describe(p: &Patch, t: &Isometry2, q: f64) -> Vec<TileKey> {
    let mut key: Vec<TileKey> = p
        .tiles
        .iter()
        .map(|tile| {
            let mut vs: Vec<(i64, i64)> = tile.vertices.iter().map(|v| quantize(t.apply(*v), q)).collect();
            let start = (0..vs.len()).min_by_key(|&i| vs[i]).unwrap_or(0);
            vs.rotate_left(start);
            (tile.proto.id.clone(), vs)
        })
        .collect();
    key.sort();
    key
}

fn hash_key(mode: MatchMode, key: &[TileKey]) -> u64 {
    let mut h = Sha256::new();
    h.update([mode as u8]);
    for (id, vs) in key {
        h.update((id.len() as u64).to_le_bytes());
        h.update(id.as_bytes());
        h.update((vs.len() as u64).to_le_bytes());
        for (x, y) in vs {
            h.update(x.to_le_bytes());
            h.update(y.to_le_bytes());
        }
    }
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

/// Canonical pose and hash of a patch.
///
/// Translation mode moves the lexicographically least quantized vertex to
/// the origin. Isometry mode moves the support centroid to the origin and
/// rotates a longest edge of a tile nearest the centroid onto the +x axis,
/// choosing among tied candidates the lexicographically least description.
pub fn canonicalize(p: &Patch, mode: MatchMode, q: f64) -> CanonicalProtopatch {
    let (to_canonical, key) = match mode {
        MatchMode::Translation => {
            let least = p
                .tiles
                .iter()
                .flat_map(|t| t.vertices.iter().copied())
                .min_by_key(|v| quantize(*v, q))
                .expect("patch is nonempty");
            let t = Isometry2::translation(-least);
            (t, describe(p, &t, q))
        }
        MatchMode::Isometry => {
            let c = p.centroid();
            let nearest = p.tiles.iter().map(|t| t.centroid.dist(c)).fold(f64::INFINITY, f64::min);
            let mut best: Option<(Isometry2, Vec<TileKey>)> = None;
            for tile in p.tiles.iter().filter(|t| t.centroid.dist(c) <= nearest + 8.0 * q) {
                let longest = tile.edges().map(|e| e.length()).fold(0.0, f64::max);
                for e in tile.edges().filter(|e| e.length() >= longest - 8.0 * q) {
                    let r = Isometry2::rotation(-(e.b - e.a).angle());
                    let t = r.compose(&Isometry2::translation(-c));
                    let key = describe(p, &t, q);
                    if best.as_ref().is_none_or(|(_, k)| key < *k) {
                        best = Some((t, key));
                    }
                }
            }
            best.expect("patch is nonempty")
        }
    };
    CanonicalProtopatch {
        mode,
        representative: p.transformed(&to_canonical),
        hash: hash_key(mode, &key),
        quantum: q,
        to_canonical,
        key,
    }
}

/// Candidate isometries carrying tile `a` onto tile `b` (same prototile):
/// the centroid translation in translation mode, every equal-length edge
/// correspondence in isometry mode.
pub fn tile_alignments(a: &PlacedTile, b: &PlacedTile, mode: MatchMode, tol: f64) -> Vec<Isometry2> {
    if a.proto.id != b.proto.id {
        return Vec::new();
    }
    match mode {
        MatchMode::Translation => vec![Isometry2::translation(b.centroid - a.centroid)],
        MatchMode::Isometry => {
            let (n, m) = (a.vertices.len(), b.vertices.len());
            let mut out = Vec::new();
            for i in 0..n {
                let (p0, p1) = (a.vertices[i], a.vertices[(i + 1) % n]);
                for j in 0..m {
                    let (q0, q1) = (b.vertices[j], b.vertices[(j + 1) % m]);
                    if (p0.dist(p1) - q0.dist(q1)).abs() > tol {
                        continue;
                    }
                    let t = Isometry2::aligning(p0, p1, q0, q1);
                    if a.transformed(&t).coincides(b, tol) {
                        out.push(t);
                    }
                }
            }
            out
        }
    }
}

/// An isometry `T` (a translation in translation mode) with `T p = q` as
/// tile sets, if one exists among the tile-to-tile alignments.
pub fn patch_match(p: &Patch, q: &Patch, mode: MatchMode, tol: f64) -> Option<Isometry2> {
    if p.len() != q.len() || p.is_empty() {
        return None;
    }
    let anchor = &p.tiles[0];
    let grid = TileGrid::new(&q.tiles);
    for b in &q.tiles {
        for t in tile_alignments(anchor, b, mode, tol) {
            let all = p.tiles.iter().all(|x| {
                let moved = x.transformed(&t);
                grid.at(moved.centroid).iter().any(|&j| q.tiles[j as usize].coincides(&moved, tol))
            });
            if all {
                return Some(t);
            }
        }
    }
    None
}
