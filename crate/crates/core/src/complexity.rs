//! Two-tile protopatch censuses and window-based evidence for finite local
//! complexity.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::WindowProvider;
use crate::geometry::{Tolerances, Vec2};
use crate::tiling::{canonicalize, CanonicalProtopatch, MatchMode, Patch, TileRecord, TilingWindow};

#[derive(Clone, Debug)]
pub struct T2Class {
    pub protopatch: CanonicalProtopatch,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct T2Census {
    pub mode: MatchMode,
    pub window_radius: f64,
    /// Sorted by hash.
    pub classes: Vec<T2Class>,
}

impl T2Census {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn pair_count(&self) -> usize {
        self.classes.iter().map(|c| c.count).sum()
    }
}

#[derive(Serialize)]
struct ClassJson {
    hash: String,
    count: usize,
    representative: Vec<TileRecord>,
}

#[derive(Serialize)]
struct CensusJson {
    mode: MatchMode,
    window_radius: f64,
    class_count: usize,
    classes: Vec<ClassJson>,
}

impl Serialize for T2Census {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CensusJson {
            mode: self.mode,
            window_radius: self.window_radius,
            class_count: self.classes.len(),
            classes: self
                .classes
                .iter()
                .map(|c| ClassJson {
                    hash: format!("{:016x}", c.protopatch.hash),
                    count: c.count,
                    representative: c.protopatch.representative.records(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FlcVerdict {
    #[serde(rename = "FLC-translation")]
    FlcTranslation,
    #[serde(rename = "FLC-Euclidean")]
    FlcEuclidean,
    #[serde(rename = "non-FLC-evidence")]
    NonFlcEvidence,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct FLCReport {
    pub verdict: FlcVerdict,
    pub radii: Vec<f64>,
    pub translation_counts: Vec<usize>,
    pub isometry_counts: Vec<usize>,
    pub censuses: Vec<T2Census>,
}

/// Tallies the two-tile patches formed by adjacent tiles (corner contact
/// included) lying wholly inside the window disk.
pub fn enumerate_t2(w: &TilingWindow, mode: MatchMode, tol: &Tolerances) -> T2Census {
    let inside: Vec<bool> = w.tiles.iter().map(|t| t.max_norm() <= w.radius + tol.geom).collect();
    let reach = 2.0 * w.max_diameter() + tol.geom;
    let partial: Vec<BTreeMap<u64, T2Class>> = (0..w.tiles.len())
        .into_par_iter()
        .filter(|&i| inside[i])
        .fold(BTreeMap::new, |mut acc: BTreeMap<u64, T2Class>, i| {
            let a = &w.tiles[i];
            for j in w.grid().near(a.centroid, reach) {
                if j <= i || !inside[j] || !a.is_adjacent(&w.tiles[j], tol.geom) {
                    continue;
                }
                let patch = Patch::from_tiles_unchecked(vec![a.clone(), w.tiles[j].clone()]);
                let c = canonicalize(&patch, mode, tol.quantum);
                acc.entry(c.hash).and_modify(|e| e.count += 1).or_insert(T2Class { protopatch: c, count: 1 });
            }
            acc
        })
        .collect();
    let mut merged: BTreeMap<u64, T2Class> = BTreeMap::new();
    for m in partial {
        for (h, c) in m {
            merged.entry(h).and_modify(|e| e.count += c.count).or_insert(c);
        }
    }
    T2Census { mode, window_radius: w.radius, classes: merged.into_values().collect() }
}

/// Evidence-based FLC verdict from censuses at increasing radii:
/// translation counts equal at the last two radii gives FLC-translation;
/// otherwise isometry counts equal there gives FLC-Euclidean; isometry
/// counts growing at every step gives non-FLC evidence.
pub fn classify_flc(p: &WindowProvider, radii: &[f64], tol: &Tolerances) -> Result<FLCReport> {
    if radii.len() < 3 || radii.windows(2).any(|r| r[1] <= r[0]) || radii[0] <= 0.0 {
        return Err(Error::InvalidInput("need at least three increasing positive radii".into()));
    }
    let mut censuses = Vec::new();
    let (mut tc, mut ic) = (Vec::new(), Vec::new());
    for &r in radii {
        let w = p.window(r)?;
        let t = enumerate_t2(&w, MatchMode::Translation, tol);
        let i = enumerate_t2(&w, MatchMode::Isometry, tol);
        log::info!("radius {r}: {} translation classes, {} isometry classes", t.class_count(), i.class_count());
        tc.push(t.class_count());
        ic.push(i.class_count());
        censuses.push(t);
        censuses.push(i);
    }
    let n = radii.len();
    let verdict = if tc[n - 1] == tc[n - 2] {
        FlcVerdict::FlcTranslation
    } else if ic[n - 1] == ic[n - 2] {
        FlcVerdict::FlcEuclidean
    } else if ic.windows(2).all(|c| c[1] > c[0]) {
        FlcVerdict::NonFlcEvidence
    } else {
        FlcVerdict::Inconclusive
    };
    Ok(FLCReport { verdict, radii: radii.to_vec(), translation_counts: tc, isometry_counts: ic, censuses })
}

/// Offset between the two tiles of each class representative, for
/// inspection.
pub fn class_offsets(c: &T2Census) -> Vec<Vec2> {
    c.classes
        .iter()
        .map(|k| {
            let t = &k.protopatch.representative.tiles;
            t[1].centroid - t[0].centroid
        })
        .collect()
}
