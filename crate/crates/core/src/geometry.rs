//! Planar primitives: points, segments, direct isometries, disk clipping and
//! Hausdorff distance between finite unions of segments.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Global tolerances shared by the geometric predicates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Coincidence of points, segments and tile boundaries.
    pub geom: f64,
    /// Orthogonality and unit determinant of rotation parts.
    pub iso: f64,
    /// Relative area tolerance (fraction of the disk area).
    pub area: f64,
    /// Pose quantization step used for protopatch hashing.
    pub quantum: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { geom: 1e-9, iso: 1e-9, area: 1e-6, quantum: 1e-6 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [self.geom, self.iso, self.area, self.quantum];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidInput("tolerances must be positive and finite".into()))
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(r: f64, angle: f64) -> Self {
        Self::new(r * angle.cos(), r * angle.sin())
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, o: Vec2, t: f64) -> Vec2 {
        self + (o - self) * t
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

/// Largest singular value of a 2x2 matrix, in closed form.
pub fn operator_norm_2x2(m: [[f64; 2]; 2]) -> f64 {
    let [[a, b], [c, d]] = m;
    ((a + d).hypot(c - b) + (a - d).hypot(b + c)) / 2.0
}

/// A direct (orientation preserving) isometry `p -> A p + b` of the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isometry2 {
    /// Row-major rotation matrix.
    pub rotation: [[f64; 2]; 2],
    pub translation: Vec2,
}

impl Default for Isometry2 {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Isometry2 {
    pub const IDENTITY: Isometry2 =
        Isometry2 { rotation: [[1.0, 0.0], [0.0, 1.0]], translation: Vec2::ZERO };

    pub fn translation(v: Vec2) -> Self {
        Self { translation: v, ..Self::IDENTITY }
    }

    /// Rotation by `angle` radians about the origin.
    pub fn rotation(angle: f64) -> Self {
        Self::new(angle, Vec2::ZERO)
    }

    /// Rotation by `angle` about the origin followed by translation by `t`.
    pub fn new(angle: f64, t: Vec2) -> Self {
        let (s, c) = angle.sin_cos();
        Self { rotation: [[c, -s], [s, c]], translation: t }
    }

    /// Rotation by `angle` about `center`.
    pub fn rotation_about(angle: f64, center: Vec2) -> Self {
        let r = Self::rotation(angle);
        Self::translation(center).compose(&r).compose(&Self::translation(-center))
    }

    pub fn angle(&self) -> f64 {
        self.rotation[1][0].atan2(self.rotation[0][0])
    }

    pub fn is_translation(&self, tol: f64) -> bool {
        let [[a, b], [c, d]] = self.rotation;
        operator_norm_2x2([[a - 1.0, b], [c, d - 1.0]]) <= tol
    }

    /// `A^T A = Id` and `det A = 1` within `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        let [[a, b], [c, d]] = self.rotation;
        let ata = [[a * a + c * c - 1.0, a * b + c * d], [a * b + c * d, b * b + d * d - 1.0]];
        let finite = self.rotation.iter().flatten().all(|v| v.is_finite()) && self.translation.is_finite();
        finite && operator_norm_2x2(ata) <= tol && (a * d - b * c - 1.0).abs() <= tol
    }

    pub fn apply(&self, p: Vec2) -> Vec2 {
        let [[a, b], [c, d]] = self.rotation;
        Vec2::new(a * p.x + b * p.y, c * p.x + d * p.y) + self.translation
    }

    pub fn apply_linear(&self, p: Vec2) -> Vec2 {
        let [[a, b], [c, d]] = self.rotation;
        Vec2::new(a * p.x + b * p.y, c * p.x + d * p.y)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Isometry2) -> Isometry2 {
        let m = |r: usize, c: usize| -> f64 {
            self.rotation[r][0] * other.rotation[0][c] + self.rotation[r][1] * other.rotation[1][c]
        };
        Isometry2 {
            rotation: [[m(0, 0), m(0, 1)], [m(1, 0), m(1, 1)]],
            translation: self.apply(other.translation),
        }
    }

    pub fn inverse(&self) -> Isometry2 {
        let [[a, b], [c, d]] = self.rotation;
        let rot = [[a, c], [b, d]];
        let t = self.translation;
        Isometry2 { rotation: rot, translation: -Vec2::new(a * t.x + c * t.y, b * t.x + d * t.y) }
    }

    /// The unique direct isometry taking segment `(p0, p1)` onto `(q0, q1)`,
    /// assuming both have the same length.
    pub fn aligning(p0: Vec2, p1: Vec2, q0: Vec2, q1: Vec2) -> Isometry2 {
        let angle = (q1 - q0).angle() - (p1 - p0).angle();
        let r = Isometry2::rotation(angle);
        Isometry2 { translation: q0 - r.apply(p0), ..r }
    }
}

/// `max(‖A1 − A2‖_op, ‖b1 − b2‖)`.
pub fn isometry_distance(t1: &Isometry2, t2: &Isometry2) -> f64 {
    let mut diff = [[0.0; 2]; 2];
    for (r, row) in diff.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = t1.rotation[r][c] - t2.rotation[r][c];
        }
    }
    operator_norm_2x2(diff).max((t1.translation - t2.translation).norm())
}

/// Membership in the open ball `B_eps(E^2)` around the identity.
pub fn in_epsilon_ball(t: &Isometry2, eps: f64) -> bool {
    isometry_distance(t, &Isometry2::IDENTITY) < eps
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Vec2,
    pub b: Vec2,
}

impl Segment {
    pub fn new(a: Vec2, b: Vec2) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn distance_to_point(&self, p: Vec2) -> f64 {
        point_segment_distance(p, self.a, self.b)
    }
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm2();
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SegmentSet {
    pub segments: Vec<Segment>,
}

impl SegmentSet {
    pub fn new(segments: Vec<Segment>) -> Self {
        Self { segments }
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

/// Pointwise image under a direct isometry.
pub trait Transform {
    fn transformed(&self, t: &Isometry2) -> Self;
}

impl Transform for Vec2 {
    fn transformed(&self, t: &Isometry2) -> Self {
        t.apply(*self)
    }
}

impl Transform for Segment {
    fn transformed(&self, t: &Isometry2) -> Self {
        Segment::new(t.apply(self.a), t.apply(self.b))
    }
}

impl Transform for SegmentSet {
    fn transformed(&self, t: &Isometry2) -> Self {
        SegmentSet::new(self.segments.iter().map(|s| s.transformed(t)).collect())
    }
}

pub fn apply_isometry<S: Transform>(t: &Isometry2, s: &S) -> S {
    s.transformed(t)
}

/// Intersect every segment with the closed disk of radius `n` about the
/// origin. Segments missing the disk are dropped.
pub fn clip_to_disk(s: &SegmentSet, n: f64) -> SegmentSet {
    SegmentSet::new(s.segments.iter().filter_map(|seg| clip_segment(seg, Vec2::ZERO, n)).collect())
}

pub(crate) fn clip_segment(seg: &Segment, center: Vec2, r: f64) -> Option<Segment> {
    let d = seg.b - seg.a;
    let f = seg.a - center;
    let a = d.norm2();
    if a == 0.0 {
        return None;
    }
    // |f + t d|^2 = r^2
    let b = f.dot(d);
    let c = f.norm2() - r * r;
    let disc = b * b - a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let t0 = ((-b - sq) / a).max(0.0);
    let t1 = ((-b + sq) / a).min(1.0);
    if t0 > t1 {
        return None;
    }
    let p0 = if t0 == 0.0 { seg.a } else { seg.a + d * t0 };
    let p1 = if t1 == 1.0 { seg.b } else { seg.a + d * t1 };
    if p0 == p1 && t0 != t1 {
        return None;
    }
    Some(Segment::new(p0, p1))
}

/// A Hausdorff distance estimate: the true value lies in
/// `[value, value + error_bound]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HausdorffEstimate {
    pub value: f64,
    pub error_bound: f64,
}

/// Uniform bucket grid over segments for nearest-segment queries.
struct SegmentGrid<'a> {
    segments: &'a [Segment],
    origin: Vec2,
    cell: f64,
    cols: i64,
    rows: i64,
    buckets: Vec<Vec<u32>>,
}

impl<'a> SegmentGrid<'a> {
    fn new(segments: &'a [Segment]) -> Self {
        let (mut lo, mut hi) = (Vec2::new(f64::MAX, f64::MAX), Vec2::new(f64::MIN, f64::MIN));
        let mut total = 0.0;
        for s in segments {
            for p in [s.a, s.b] {
                lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
            }
            total += s.length();
        }
        let extent = (hi.x - lo.x).max(hi.y - lo.y).max(1e-12);
        let mean = (total / segments.len() as f64).max(extent / 512.0).max(1e-9);
        let cell = mean.min(extent);
        let cols = ((hi.x - lo.x) / cell).floor() as i64 + 1;
        let rows = ((hi.y - lo.y) / cell).floor() as i64 + 1;
        let mut buckets = vec![Vec::new(); (cols * rows) as usize];
        for (i, s) in segments.iter().enumerate() {
            // walk the segment in cell-sized steps and mark every touched cell
            let steps = (s.length() / cell).ceil().max(1.0) as usize * 2;
            let mut last = None;
            for k in 0..=steps {
                let p = s.a.lerp(s.b, k as f64 / steps as f64);
                let cx = (((p.x - lo.x) / cell).floor() as i64).clamp(0, cols - 1);
                let cy = (((p.y - lo.y) / cell).floor() as i64).clamp(0, rows - 1);
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let (x, y) = (cx + dx, cy + dy);
                        if x < 0 || y < 0 || x >= cols || y >= rows || last == Some((x, y, k)) {
                            continue;
                        }
                        let b = &mut buckets[(y * cols + x) as usize];
                        if b.last() != Some(&(i as u32)) {
                            b.push(i as u32);
                        }
                    }
                }
                last = Some((cx, cy, k));
            }
        }
        for b in &mut buckets {
            b.sort_unstable();
            b.dedup();
        }
        Self { segments, origin: lo, cell, cols, rows, buckets }
    }

    /// Exact distance from `p` to the nearest segment.
    fn nearest(&self, p: Vec2) -> f64 {
        let cx = ((p.x - self.origin.x) / self.cell).floor() as i64;
        let cy = ((p.y - self.origin.y) / self.cell).floor() as i64;
        let mut best = f64::INFINITY;
        let max_ring = self.cols.max(self.rows) + cx.abs().max(cy.abs()) + 2;
        for ring in 0..=max_ring {
            // every segment not yet seen is at least (ring - 1) * cell away
            if best <= (ring - 1).max(0) as f64 * self.cell {
                break;
            }
            for y in (cy - ring)..=(cy + ring) {
                for x in (cx - ring)..=(cx + ring) {
                    if (y - cy).abs() != ring && (x - cx).abs() != ring {
                        continue;
                    }
                    if x < 0 || y < 0 || x >= self.cols || y >= self.rows {
                        continue;
                    }
                    for &i in &self.buckets[(y * self.cols + x) as usize] {
                        best = best.min(self.segments[i as usize].distance_to_point(p));
                    }
                }
            }
        }
        best
    }
}

fn directed_hausdorff(from: &SegmentSet, grid: &SegmentGrid<'_>, delta: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for s in &from.segments {
        let k = (s.length() / delta).ceil().max(1.0) as usize;
        for i in 0..=k {
            let p = s.a.lerp(s.b, i as f64 / k as f64);
            worst = worst.max(grid.nearest(p));
        }
    }
    worst
}

/// Hausdorff distance between the unions of two segment sets, by sampling
/// each segment at pitch at most `delta` and taking exact point-to-segment
/// distances. The result underestimates the true distance by at most
/// `delta / 2`; `error_bound` reports `delta`.
pub fn hausdorff_distance(a: &SegmentSet, b: &SegmentSet, delta: f64) -> Result<HausdorffEstimate> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidInput("sampling pitch must be positive".into()));
    }
    let ga = SegmentGrid::new(&a.segments);
    let gb = SegmentGrid::new(&b.segments);
    let ab = directed_hausdorff(a, &gb, delta);
    let ba = directed_hausdorff(b, &ga, delta);
    Ok(HausdorffEstimate { value: ab.max(ba), error_bound: delta })
}

// ---------------------------------------------------------------------------
// Polygons

pub fn polygon_area(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| poly[i].cross(poly[(i + 1) % n])).sum::<f64>() / 2.0
}

pub fn polygon_centroid(poly: &[Vec2]) -> Vec2 {
    let n = poly.len();
    let area = polygon_area(poly);
    if area.abs() < 1e-300 {
        return poly.iter().fold(Vec2::ZERO, |acc, p| acc + *p) * (1.0 / n as f64);
    }
    let mut c = Vec2::ZERO;
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        c += (p + q) * p.cross(q);
    }
    c * (1.0 / (6.0 * area))
}

pub fn polygon_diameter(poly: &[Vec2]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in poly.iter().enumerate() {
        for q in &poly[i + 1..] {
            d = d.max(p.dist(*q));
        }
    }
    d
}

pub fn is_convex(poly: &[Vec2]) -> bool {
    let n = poly.len();
    (0..n).all(|i| {
        let (a, b, c) = (poly[i], poly[(i + 1) % n], poly[(i + 2) % n]);
        (b - a).cross(c - b) >= -1e-12 * (b - a).norm() * (c - b).norm()
    })
}

fn segments_intersect(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = (q2 - q1).cross(p1 - q1);
    let d2 = (q2 - q1).cross(p2 - q1);
    let d3 = (p2 - p1).cross(q1 - p1);
    let d4 = (p2 - p1).cross(q2 - p1);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// No two non-adjacent edges cross.
pub fn is_simple(poly: &[Vec2]) -> bool {
    let n = poly.len();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

pub fn point_in_polygon(p: Vec2, poly: &[Vec2]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

pub fn point_polygon_boundary_distance(p: Vec2, poly: &[Vec2]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| point_segment_distance(p, poly[i], poly[(i + 1) % n])).fold(f64::INFINITY, f64::min)
}

/// Distance from `p` to the filled polygon (zero inside).
pub fn point_polygon_distance(p: Vec2, poly: &[Vec2]) -> f64 {
    if point_in_polygon(p, poly) {
        0.0
    } else {
        point_polygon_boundary_distance(p, poly)
    }
}

/// Distance between polygon boundaries (zero when edges cross).
pub fn polygon_boundary_distance(p: &[Vec2], q: &[Vec2]) -> f64 {
    let (n, m) = (p.len(), q.len());
    let mut best = f64::INFINITY;
    for i in 0..n {
        let (a, b) = (p[i], p[(i + 1) % n]);
        for j in 0..m {
            let (c, d) = (q[j], q[(j + 1) % m]);
            if segments_intersect(a, b, c, d) {
                return 0.0;
            }
            best = best.min(point_segment_distance(a, c, d)).min(point_segment_distance(c, a, b));
        }
    }
    best
}

/// Signed area of the intersection of triangle (center, a, b) with the disk
/// of radius `r` about `center`.
fn triangle_disk_area(a: Vec2, b: Vec2, r: f64) -> f64 {
    // a, b relative to the disk center
    let sector = |p: Vec2, q: Vec2| -> f64 { 0.5 * r * r * p.cross(q).atan2(p.dot(q)) };
    let tri = |p: Vec2, q: Vec2| -> f64 { 0.5 * p.cross(q) };
    let (ra, rb) = (a.norm(), b.norm());
    let r2 = r * r;
    let d = b - a;
    let dd = d.norm2();
    if dd == 0.0 {
        return 0.0;
    }
    // parameters where the line a + t d meets the circle
    let bq = a.dot(d);
    let c = a.norm2() - r2;
    let disc = bq * bq - dd * c;
    let in_a = ra <= r;
    let in_b = rb <= r;
    if in_a && in_b {
        return tri(a, b);
    }
    if disc <= 0.0 {
        return sector(a, b);
    }
    let sq = disc.sqrt();
    let t0 = (-bq - sq) / dd;
    let t1 = (-bq + sq) / dd;
    let p0 = a + d * t0.clamp(0.0, 1.0);
    let p1 = a + d * t1.clamp(0.0, 1.0);
    if in_a {
        // leaves the disk at t1
        return tri(a, p1) + sector(p1, b);
    }
    if in_b {
        return sector(a, p0) + tri(p0, b);
    }
    if t0 >= 1.0 || t1 <= 0.0 || t0 >= t1 {
        return sector(a, b);
    }
    sector(a, p0) + tri(p0, p1) + sector(p1, b)
}

/// Area of `poly ∩ disk(center, r)` for a simple polygon (either orientation
/// gives the absolute value).
pub fn polygon_disk_intersection_area(poly: &[Vec2], center: Vec2, r: f64) -> f64 {
    let n = poly.len();
    let mut total = 0.0;
    for i in 0..n {
        total += triangle_disk_area(poly[i] - center, poly[(i + 1) % n] - center, r);
    }
    total.abs()
}

/// Sutherland–Hodgman clip of `subject` by the convex counterclockwise `clip`.
pub fn convex_clip(subject: &[Vec2], clip: &[Vec2]) -> Vec<Vec2> {
    let mut out: Vec<Vec2> = subject.to_vec();
    let m = clip.len();
    for i in 0..m {
        if out.is_empty() {
            break;
        }
        let (c0, c1) = (clip[i], clip[(i + 1) % m]);
        let edge = c1 - c0;
        let inside = |p: Vec2| edge.cross(p - c0) >= 0.0;
        let input = std::mem::take(&mut out);
        let k = input.len();
        for j in 0..k {
            let (p, q) = (input[j], input[(j + 1) % k]);
            let (ip, iq) = (inside(p), inside(q));
            if ip {
                out.push(p);
            }
            if ip != iq {
                let dp = edge.cross(p - c0);
                let dq = edge.cross(q - c0);
                out.push(p.lerp(q, dp / (dp - dq)));
            }
        }
    }
    out
}

/// Ear-clipping triangulation of a simple counterclockwise polygon.
pub fn triangulate(poly: &[Vec2]) -> Vec<[Vec2; 3]> {
    let mut idx: Vec<usize> = (0..poly.len()).collect();
    let mut tris = Vec::new();
    let mut guard = 0;
    while idx.len() > 3 && guard < 10 * poly.len() * poly.len() {
        guard += 1;
        let n = idx.len();
        let mut clipped = false;
        for i in 0..n {
            let (a, b, c) = (poly[idx[(i + n - 1) % n]], poly[idx[i]], poly[idx[(i + 1) % n]]);
            if (b - a).cross(c - b) <= 0.0 {
                continue;
            }
            let blocked = idx.iter().any(|&k| {
                let p = poly[k];
                p != a && p != b && p != c && point_in_polygon(p, &[a, b, c])
            });
            if !blocked {
                tris.push([a, b, c]);
                idx.remove(i);
                clipped = true;
                break;
            }
        }
        if !clipped {
            break;
        }
    }
    if idx.len() == 3 {
        tris.push([poly[idx[0]], poly[idx[1]], poly[idx[2]]]);
    }
    tris
}

/// Convex pieces of a simple counterclockwise polygon.
pub fn convex_pieces(poly: &[Vec2]) -> Vec<Vec<Vec2>> {
    if is_convex(poly) {
        vec![poly.to_vec()]
    } else {
        triangulate(poly).into_iter().map(|t| t.to_vec()).collect()
    }
}

/// Area of the intersection of two simple counterclockwise polygons.
pub fn polygon_overlap_area(p: &[Vec2], q: &[Vec2]) -> f64 {
    let (pp, qq) = (convex_pieces(p), convex_pieces(q));
    let mut total = 0.0;
    for a in &pp {
        for b in &qq {
            let c = convex_clip(a, b);
            if c.len() >= 3 {
                total += polygon_area(&c).abs();
            }
        }
    }
    total
}

pub fn disk_area(r: f64) -> f64 {
    PI * r * r
}

/// Axis-aligned bounding box `(min, max)`.
pub fn bounding_box(poly: &[Vec2]) -> (Vec2, Vec2) {
    poly.iter().fold(
        (Vec2::new(f64::INFINITY, f64::INFINITY), Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY)),
        |(lo, hi), p| (Vec2::new(lo.x.min(p.x), lo.y.min(p.y)), Vec2::new(hi.x.max(p.x), hi.y.max(p.y))),
    )
}
