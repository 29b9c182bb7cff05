//! Tiling metrics: the skeleton-Hausdorff metric `d` with a certified
//! truncation interval, and the adapted metrics `d1` (small translation),
//! `d2` (small direct isometry) and `d3` (small per-tile isometries).

use std::collections::HashSet;
use std::f64::consts::FRAC_1_SQRT_2;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::WindowProvider;
use crate::geometry::{clip_to_disk, hausdorff_distance, isometry_distance, point_polygon_distance};
use crate::geometry::{Isometry2, Tolerances, Vec2};
use crate::tiling::{patch_support_contains_disk, skeleton, tile_alignments, MatchMode, Patch, TilingWindow};

pub const DEFAULT_GRID_STEP: f64 = 1e-3;

/// Bracket for a metric value. For the adapted metrics `upper` is the size
/// of a witness actually found; `lower` is the largest grid level at which
/// none of the enumerated candidates is a witness.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricResult {
    pub lower: f64,
    pub upper: f64,
    pub truncation_radius: f64,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

/// `d(x, y) = sup_n (1/n) d_H(B_n ∩ ∂x, B_n ∩ ∂y)`, bracketed from the
/// terms `n <= big_n` sampled at pitch `delta`.
///
/// Tail bound: every point of the plane lies within `2 D` of each skeleton
/// (`D` the largest tile diameter), and pulling a witness radially inward by
/// `2 D` keeps it in `B_n`, so every term is at most `4 D / n`.
pub fn metric_general(x: &WindowProvider, y: &WindowProvider, big_n: u32, delta: f64) -> Result<MetricResult> {
    if big_n == 0 || !(delta > 0.0) {
        return Err(Error::InvalidInput("metric_general needs N >= 1 and delta > 0".into()));
    }
    let d_max = x.max_diameter().max(y.max_diameter());
    let needed = big_n as f64 + d_max;
    x.ensure_radius(needed)?;
    y.ensure_radius(needed)?;
    let terms: Vec<f64> = (1..=big_n)
        .into_par_iter()
        .map(|n| -> Result<f64> {
            let r = n as f64;
            let sx = clip_to_disk(&skeleton(&*x.window(r)?), r);
            let sy = clip_to_disk(&skeleton(&*y.window(r)?), r);
            let h = hausdorff_distance(&sx, &sy, delta)?;
            Ok(((h.value - delta) / r).max(0.0))
        })
        .collect::<Result<_>>()?;
    let lower = terms.into_iter().fold(0.0, f64::max);
    let upper = (lower + 2.0 * delta).max(4.0 * d_max / big_n as f64);
    Ok(MetricResult { lower, upper, truncation_radius: big_n as f64, notes: format!("delta {delta}, D_max {d_max}") })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Adapted {
    D1,
    D2,
    D3,
}

/// Bisection settings for the adapted metrics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptedOptions {
    pub r_min: f64,
    pub step: f64,
    pub tol: Tolerances,
}

impl AdaptedOptions {
    pub fn new(r_min: f64) -> Self {
        Self { r_min, step: DEFAULT_GRID_STEP, tol: Tolerances::default() }
    }
}

pub fn metric_d1(x: &WindowProvider, y: &WindowProvider, r_min: f64) -> Result<MetricResult> {
    metric_adapted(x, y, Adapted::D1, &AdaptedOptions::new(r_min))
}

pub fn metric_d2(x: &WindowProvider, y: &WindowProvider, r_min: f64) -> Result<MetricResult> {
    metric_adapted(x, y, Adapted::D2, &AdaptedOptions::new(r_min))
}

pub fn metric_d3(x: &WindowProvider, y: &WindowProvider, r_min: f64) -> Result<MetricResult> {
    metric_adapted(x, y, Adapted::D3, &AdaptedOptions::new(r_min))
}

/// Smallest grid level `r` in `[r_min, 1/√2]` at which a witness exists in
/// both directions, found by bisection (the witness property is monotone in
/// `r`). When a witness of size `s` is found, the level just above `s` is
/// tried as well, so the reported upper bound is not limited by the grid.
pub fn metric_adapted(x: &WindowProvider, y: &WindowProvider, kind: Adapted, opts: &AdaptedOptions) -> Result<MetricResult> {
    let r_min = opts.r_min;
    if !(r_min > 0.0 && r_min < FRAC_1_SQRT_2) || !(opts.step > 0.0) {
        return Err(Error::InvalidInput("need 0 < r_min < 1/sqrt(2) and a positive grid step".into()));
    }
    opts.tol.validate()?;
    let needed = window_radius(r_min) + r_min;
    x.ensure_radius(needed)?;
    y.ensure_radius(needed)?;

    let levels = ((FRAC_1_SQRT_2 - r_min) / opts.step).floor() as usize;
    let level = |k: usize| r_min + k as f64 * opts.step;
    let test = |r: f64| witness_size(x, y, r, kind, &opts.tol);
    let result = |lower: f64, upper: f64, note: &str| MetricResult {
        lower,
        upper,
        truncation_radius: needed,
        notes: note.to_string(),
    };

    if let Some(s) = test(r_min)? {
        return Ok(result(0.0, r_min, &format!("witness of size {s:.3e} at r_min")));
    }
    let top = level(levels);
    if levels == 0 || test(top)?.is_none() {
        return Ok(result(top, FRAC_1_SQRT_2, "no witness below 1/sqrt(2)"));
    }
    let (mut lo, mut hi) = (0usize, levels);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if test(level(mid))?.is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (r_lo, r_hi) = (level(lo), level(hi));
    let s = test(r_hi)?.expect("witness found at this level");
    let refined = s + 1e-12 * s.max(1.0);
    if refined > r_lo && refined < r_hi && test(refined)?.is_some() {
        return Ok(result(r_lo, refined, &format!("witness of size {s:.6e}")));
    }
    Ok(result(r_lo, r_hi, &format!("witness of size {s:.6e}")))
}

fn window_radius(r: f64) -> f64 {
    1.0 / r + r
}

/// Size of a witness at level `r` found in both directions, if any.
fn witness_size(x: &WindowProvider, y: &WindowProvider, r: f64, kind: Adapted, tol: &Tolerances) -> Result<Option<f64>> {
    let w = window_radius(r);
    let (xa, xb) = (x.window(w)?, x.window(w + r)?);
    let (ya, yb) = (y.window(w)?, y.window(w + r)?);
    let forward = directed_witness(&xa, &yb, r, kind, tol);
    let Some(f) = forward else { return Ok(None) };
    Ok(directed_witness(&ya, &xb, r, kind, tol).map(|b| f.max(b)))
}

/// A witness that `xw` (the tiles of x meeting `B_{1/r + r}`) is carried
/// into `yw` by motions of size `< r` with image support covering
/// `B_{1/r}`. Returns the size of the smallest witness tried that works.
fn directed_witness(xw: &TilingWindow, yw: &TilingWindow, r: f64, kind: Adapted, tol: &Tolerances) -> Option<f64> {
    if xw.tiles.is_empty() {
        return None;
    }
    match kind {
        Adapted::D1 | Adapted::D2 => global_witness(xw, yw, r, kind, tol),
        Adapted::D3 => per_tile_witness(xw, yw, r, tol),
    }
}

fn motion_candidates(t: &crate::tiling::PlacedTile, yw: &TilingWindow, r: f64, mode: MatchMode, tol: &Tolerances) -> Vec<(f64, usize, Isometry2)> {
    let reach = r * (1.0 + t.centroid.norm()) + tol.geom;
    let mut out = Vec::new();
    for j in yw.tiles_with_centroid_near(t.centroid, reach) {
        for m in tile_alignments(t, &yw.tiles[j], mode, tol.geom) {
            let size = isometry_distance(&m, &Isometry2::IDENTITY);
            if size < r {
                out.push((size, j, m));
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    out
}

fn global_witness(xw: &TilingWindow, yw: &TilingWindow, r: f64, kind: Adapted, tol: &Tolerances) -> Option<f64> {
    let mode = if kind == Adapted::D1 { MatchMode::Translation } else { MatchMode::Isometry };
    let anchor = xw
        .tiles
        .iter()
        .enumerate()
        .min_by(|a, b| {
            let da = point_polygon_distance(Vec2::ZERO, &a.1.vertices);
            let db = point_polygon_distance(Vec2::ZERO, &b.1.vertices);
            da.total_cmp(&db).then(a.0.cmp(&b.0))
        })
        .map(|(_, t)| t)?;
    for (size, _, m) in motion_candidates(anchor, yw, r, mode, tol) {
        if mode == MatchMode::Translation && !m.is_translation(tol.iso) {
            continue;
        }
        let moved: Vec<_> = xw.tiles.iter().map(|t| t.transformed(&m)).collect();
        if !moved.iter().all(|t| yw.contains_tile(t, tol.geom)) {
            continue;
        }
        let patch = Patch::from_tiles_unchecked(moved);
        if patch_support_contains_disk(&patch, 1.0 / r, Vec2::ZERO, tol) {
            return Some(size);
        }
    }
    None
}

fn per_tile_witness(xw: &TilingWindow, yw: &TilingWindow, r: f64, tol: &Tolerances) -> Option<f64> {
    let mut used = HashSet::new();
    let mut matched = Vec::with_capacity(xw.tiles.len());
    let mut worst: f64 = 0.0;
    for t in &xw.tiles {
        let (size, j, _) = motion_candidates(t, yw, r, MatchMode::Isometry, tol)
            .into_iter()
            .find(|(_, j, _)| !used.contains(j))?;
        used.insert(j);
        matched.push(yw.tiles[j].clone());
        worst = worst.max(size);
    }
    let patch = Patch::from_tiles_unchecked(matched);
    patch_support_contains_disk(&patch, 1.0 / r, Vec2::ZERO, tol).then_some(worst)
}
