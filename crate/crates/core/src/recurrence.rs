//! Certificates of scaled pattern recurrence: a patch `p` whose copies
//! appear at `v + n u_i` for every `u_i` in a finite pattern `F`, up to a
//! small translation (thm1), a small global isometry (thm2) or small
//! per-tile isometries (thm3). Verification and search.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::WindowProvider;
use crate::geometry::{isometry_distance, Isometry2, Tolerances, Vec2};
use crate::ipsets::{ip_enumerate, IPSetSpec};
use crate::tiling::{
    canonicalize, patch_support_contains_disk, patches_covering, resolve_tiles, tile_alignments, MatchMode, Patch,
    PlacedTile, TileRecord, TilingWindow,
};

/// The finite set `F = {u_1, ..., u_l}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternF {
    vectors: Vec<Vec2>,
}

impl PatternF {
    pub fn new(vectors: Vec<Vec2>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidInput("pattern F must be nonempty".into()));
        }
        if vectors.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("pattern F has a non-finite vector".into()));
        }
        for (i, a) in vectors.iter().enumerate() {
            if vectors[..i].contains(a) {
                return Err(Error::InvalidInput(format!("pattern F repeats ({}, {})", a.x, a.y)));
            }
        }
        Ok(Self { vectors })
    }

    pub fn vectors(&self) -> &[Vec2] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn max_norm(&self) -> f64 {
        self.vectors.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Thm1,
    Thm2,
    Thm3,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Corrections {
    /// One vector `c_i` per `u_i`.
    Thm1(Vec<Vec2>),
    /// One isometry `S_i` per `u_i`.
    Thm2(Vec<Isometry2>),
    /// For each `u_i`, one isometry per tile of the patch.
    Thm3(Vec<Vec<Isometry2>>),
}

impl Corrections {
    pub fn variant(&self) -> Variant {
        match self {
            Corrections::Thm1(_) => Variant::Thm1,
            Corrections::Thm2(_) => Variant::Thm2,
            Corrections::Thm3(_) => Variant::Thm3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct WitnessCertificate {
    pub n: u64,
    pub epsilon: f64,
    pub base: Vec2,
    pub pattern: PatternF,
    pub patch: Patch,
    pub corrections: Corrections,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsometryRecord {
    pub rotation: f64,
    pub translation: [f64; 2],
}

impl From<&Isometry2> for IsometryRecord {
    fn from(t: &Isometry2) -> Self {
        Self { rotation: t.angle(), translation: t.translation.into() }
    }
}

impl IsometryRecord {
    fn to_isometry(self) -> Result<Isometry2> {
        if !self.rotation.is_finite() || !self.translation.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("non-finite isometry".into()));
        }
        Ok(Isometry2::new(self.rotation, self.translation.into()))
    }
}

/// On-disk certificate. `pattern` records the vectors `u_i` so the file is
/// self-contained.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub variant: Variant,
    pub n: u64,
    pub epsilon: f64,
    pub base: [f64; 2],
    pub pattern: Vec<[f64; 2]>,
    pub patch: Vec<TileRecord>,
    pub corrections: serde_json::Value,
}

impl WitnessCertificate {
    pub fn variant(&self) -> Variant {
        self.corrections.variant()
    }

    pub fn to_file(&self) -> CertificateFile {
        let corrections = match &self.corrections {
            Corrections::Thm1(c) => serde_json::to_value(c.iter().map(|v| [v.x, v.y]).collect::<Vec<_>>()),
            Corrections::Thm2(s) => serde_json::to_value(s.iter().map(IsometryRecord::from).collect::<Vec<_>>()),
            Corrections::Thm3(s) => serde_json::to_value(
                s.iter().map(|row| row.iter().map(IsometryRecord::from).collect::<Vec<_>>()).collect::<Vec<_>>(),
            ),
        }
        .expect("corrections serialize");
        CertificateFile {
            variant: self.variant(),
            n: self.n,
            epsilon: self.epsilon,
            base: self.base.into(),
            pattern: self.pattern.vectors().iter().map(|&v| v.into()).collect(),
            patch: self.patch.records(),
            corrections,
        }
    }

    /// Reads a certificate, resolving patch tiles against the window's
    /// prototile table.
    pub fn from_file(file: &CertificateFile, w: &TilingWindow) -> Result<Self> {
        let bad = |e: serde_json::Error| Error::InvalidInput(format!("certificate corrections: {e}"));
        let corrections = match file.variant {
            Variant::Thm1 => {
                let c: Vec<[f64; 2]> = serde_json::from_value(file.corrections.clone()).map_err(bad)?;
                Corrections::Thm1(c.into_iter().map(Vec2::from).collect())
            }
            Variant::Thm2 => {
                let s: Vec<IsometryRecord> = serde_json::from_value(file.corrections.clone()).map_err(bad)?;
                Corrections::Thm2(s.into_iter().map(IsometryRecord::to_isometry).collect::<Result<_>>()?)
            }
            Variant::Thm3 => {
                let s: Vec<Vec<IsometryRecord>> = serde_json::from_value(file.corrections.clone()).map_err(bad)?;
                Corrections::Thm3(
                    s.into_iter()
                        .map(|row| row.into_iter().map(IsometryRecord::to_isometry).collect::<Result<Vec<_>>>())
                        .collect::<Result<_>>()?,
                )
            }
        };
        let tiles = resolve_tiles(&file.patch, &w.prototiles)?;
        if tiles.is_empty() {
            return Err(Error::InvalidPatch("certificate patch is empty".into()));
        }
        Ok(Self {
            n: file.n,
            epsilon: file.epsilon,
            base: file.base.into(),
            pattern: PatternF::new(file.pattern.iter().map(|&v| v.into()).collect())?,
            patch: Patch::from_tiles_unchecked(tiles),
            corrections,
        })
    }

    /// The same certificate with `S_i = T_{c_i}`.
    pub fn thm1_to_thm2(&self) -> Option<Self> {
        let Corrections::Thm1(c) = &self.corrections else { return None };
        Some(Self { corrections: Corrections::Thm2(c.iter().map(|&v| Isometry2::translation(v)).collect()), ..self.clone() })
    }

    /// The same certificate with `S_{i,j} = S_i` for every tile.
    pub fn thm2_to_thm3(&self) -> Option<Self> {
        let Corrections::Thm2(s) = &self.corrections else { return None };
        let k = self.patch.len();
        Some(Self { corrections: Corrections::Thm3(s.iter().map(|&t| vec![t; k]).collect()), ..self.clone() })
    }

    /// The moved copies of the patch, one list per `u_i`, or `None` when
    /// the corrections do not fit the pattern and patch.
    pub fn moved_copies(&self) -> Option<Vec<Vec<PlacedTile>>> {
        let n = self.n as f64;
        let v = self.base;
        let us = self.pattern.vectors();
        let conj = |u: Vec2, s: &Isometry2| {
            Isometry2::translation(u * n + v).compose(s).compose(&Isometry2::translation(-v))
        };
        match &self.corrections {
            Corrections::Thm1(c) if c.len() == us.len() => Some(
                us.iter()
                    .zip(c)
                    .map(|(&u, &ci)| self.patch.transformed(&Isometry2::translation(u * n + ci)).tiles)
                    .collect(),
            ),
            Corrections::Thm2(s) if s.len() == us.len() => {
                Some(us.iter().zip(s).map(|(&u, si)| self.patch.transformed(&conj(u, si)).tiles).collect())
            }
            Corrections::Thm3(s) if s.len() == us.len() && s.iter().all(|row| row.len() == self.patch.len()) => Some(
                us.iter()
                    .zip(s)
                    .map(|(&u, row)| self.patch.tiles.iter().zip(row).map(|(t, sij)| t.transformed(&conj(u, sij))).collect())
                    .collect(),
            ),
            _ => None,
        }
    }

    fn corrections_small(&self) -> bool {
        let eps = self.epsilon;
        match &self.corrections {
            Corrections::Thm1(c) => c.iter().all(|v| v.norm() < eps),
            Corrections::Thm2(s) => s.iter().all(|t| isometry_distance(t, &Isometry2::IDENTITY) < eps),
            Corrections::Thm3(s) => s.iter().flatten().all(|t| isometry_distance(t, &Isometry2::IDENTITY) < eps),
        }
    }

    /// Radius of the origin disk containing the patch and all its copies.
    pub fn required_radius(&self) -> f64 {
        let copies = self.moved_copies().unwrap_or_default();
        self.patch.tiles.iter().chain(copies.iter().flatten()).map(|t| t.max_norm()).fold(0.0, f64::max)
    }
}

/// Checks a certificate of any variant against the tiling.
pub fn verify_witness(x: &WindowProvider, cert: &WitnessCertificate, tol: &Tolerances) -> Result<bool> {
    let w = x.window(cert.required_radius() + tol.geom + 1e-6)?;
    Ok(verify_in_window(&w, cert, tol))
}

fn verify_variant(x: &WindowProvider, f: &PatternF, cert: &WitnessCertificate, variant: Variant) -> Result<bool> {
    if cert.variant() != variant || cert.pattern != *f {
        return Ok(false);
    }
    verify_witness(x, cert, &Tolerances::default())
}

pub fn verify_witness_thm1(x: &WindowProvider, f: &PatternF, cert: &WitnessCertificate) -> Result<bool> {
    verify_variant(x, f, cert, Variant::Thm1)
}

pub fn verify_witness_thm2(x: &WindowProvider, f: &PatternF, cert: &WitnessCertificate) -> Result<bool> {
    verify_variant(x, f, cert, Variant::Thm2)
}

pub fn verify_witness_thm3(x: &WindowProvider, f: &PatternF, cert: &WitnessCertificate) -> Result<bool> {
    verify_variant(x, f, cert, Variant::Thm3)
}

/// Verification against a window already known to contain every tile the
/// certificate mentions.
pub fn verify_in_window(w: &TilingWindow, cert: &WitnessCertificate, tol: &Tolerances) -> bool {
    if cert.n == 0 || !(cert.epsilon > 0.0) || cert.patch.is_empty() || !cert.corrections_small() {
        return false;
    }
    let Some(copies) = cert.moved_copies() else { return false };
    if w.radius + tol.geom < cert.required_radius() {
        return false;
    }
    cert.patch.is_contained_in(w, tol.geom)
        && patch_support_contains_disk(&cert.patch, 1.0 / cert.epsilon, cert.base, tol)
        && copies.iter().flatten().all(|t| w.contains_tile(t, tol.geom))
}

/// Hash index of the patches covering disks around grid anchors.
#[derive(Clone, Debug)]
pub struct PatchIndex {
    pub mode: MatchMode,
    pub patch_radius: f64,
    pub quantum: f64,
    buckets: HashMap<u64, Vec<(Vec2, Isometry2)>>,
}

impl PatchIndex {
    /// Anchors whose covering patch has this hash, each with the isometry
    /// taking that patch to its canonical pose.
    pub fn get(&self, hash: u64) -> &[(Vec2, Isometry2)] {
        self.buckets.get(&hash).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn lookup(&self, p: &Patch) -> &[(Vec2, Isometry2)] {
        self.get(canonicalize(p, self.mode, self.quantum).hash)
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    pub fn anchor_count(&self) -> usize {
        self.buckets.values().map(|v| v.len()).sum()
    }

    pub fn buckets(&self) -> impl Iterator<Item = (&u64, &Vec<(Vec2, Isometry2)>)> {
        self.buckets.iter()
    }
}

pub fn build_patch_index(
    w: &TilingWindow,
    anchor_grid: f64,
    patch_radius: f64,
    mode: MatchMode,
    tol: &Tolerances,
) -> Result<PatchIndex> {
    if !(anchor_grid > 0.0) || !(patch_radius > 0.0) || patch_radius > w.radius / 4.0 {
        return Err(Error::InvalidInput("need a positive grid and patch radius at most a quarter of the window".into()));
    }
    let reach = w.radius - patch_radius;
    let k = (reach / anchor_grid).floor() as i64;
    let anchors: Vec<Vec2> = (-k..=k)
        .flat_map(|i| (-k..=k).map(move |j| Vec2::new(i as f64 * anchor_grid, j as f64 * anchor_grid)))
        .filter(|p| p.norm() <= reach)
        .collect();
    let entries: Vec<(u64, Vec2, Isometry2)> = anchors
        .par_iter()
        .map(|&a| -> Result<(u64, Vec2, Isometry2)> {
            let p = patches_covering(w, patch_radius, a, tol)?;
            let c = canonicalize(&p, mode, tol.quantum);
            Ok((c.hash, a, c.to_canonical))
        })
        .collect::<Result<_>>()?;
    let mut buckets: HashMap<u64, Vec<(Vec2, Isometry2)>> = HashMap::new();
    for (h, a, t) in entries {
        buckets.entry(h).or_default().push((a, t));
    }
    Ok(PatchIndex { mode, patch_radius, quantum: tol.quantum, buckets })
}

#[derive(Clone, Debug)]
pub struct SearchParams {
    pub epsilon: f64,
    pub variant: Variant,
    pub n_budget: u64,
    pub r_search: f64,
    pub ip: Option<IPSetSpec>,
    pub tol: Tolerances,
}

impl SearchParams {
    pub fn new(epsilon: f64, variant: Variant, n_budget: u64, r_search: f64) -> Self {
        Self { epsilon, variant, n_budget, r_search, ip: None, tol: Tolerances::default() }
    }
}

/// Per-tile hashes of the patch covering `B_{1/eps}(centroid)`, computed
/// on demand.
struct HashCache<'a> {
    w: &'a TilingWindow,
    radius: f64,
    mode: MatchMode,
    tol: Tolerances,
    slots: Vec<OnceLock<u64>>,
}

impl<'a> HashCache<'a> {
    fn new(w: &'a TilingWindow, radius: f64, mode: MatchMode, tol: Tolerances) -> Self {
        Self { w, radius, mode, tol, slots: (0..w.tiles.len()).map(|_| OnceLock::new()).collect() }
    }

    fn get(&self, i: usize) -> u64 {
        *self.slots[i].get_or_init(|| {
            let idx = self.w.tiles_meeting(self.w.tiles[i].centroid, self.radius, self.tol.geom);
            let p = Patch::from_tiles_unchecked(idx.into_iter().map(|j| self.w.tiles[j].clone()).collect());
            canonicalize(&p, self.mode, self.tol.quantum).hash
        })
    }
}

/// Searches the window of radius `r_search` for a certificate. Dilations
/// `n` are tried in increasing order (restricted to the IP-set when one is
/// given), and for each `n` the candidate bases are the tile centroids in
/// lexicographic order; the first certificate that verifies is returned.
pub fn search_witness(x: &WindowProvider, f: &PatternF, params: &SearchParams) -> Result<WitnessCertificate> {
    let eps = params.epsilon;
    if !(eps > 0.0) || !eps.is_finite() || !(params.r_search > 0.0) {
        return Err(Error::InvalidInput("search needs epsilon > 0 and a positive search radius".into()));
    }
    params.tol.validate()?;
    if params.n_budget == 0 {
        return Err(Error::BudgetExhausted);
    }
    let w = x.window(params.r_search)?;
    let rho = 1.0 / eps;
    let d = w.max_diameter();
    let ns: Vec<u64> = match &params.ip {
        Some(spec) => ip_enumerate(spec, params.n_budget),
        None => (1..=params.n_budget).collect(),
    };
    let mut order: Vec<usize> = (0..w.tiles.len()).collect();
    order.sort_by(|&a, &b| {
        let (p, q) = (w.tiles[a].centroid, w.tiles[b].centroid);
        p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)).then(a.cmp(&b))
    });
    let mode = if params.variant == Variant::Thm1 { MatchMode::Translation } else { MatchMode::Isometry };
    let hashes = HashCache::new(&w, rho, mode, params.tol);
    let ctx = Ctx { w: &w, f, eps, rho, tol: params.tol, hashes: &hashes };

    for n in ns {
        let limit = params.r_search - rho - 2.0 * d - n as f64 * f.max_norm() - eps - 1e-6;
        if limit < 0.0 {
            break;
        }
        log::debug!("trying n = {n}");
        let found = order
            .par_iter()
            .filter(|&&a| w.tiles[a].centroid.norm() <= limit)
            .find_map_first(|&a| match params.variant {
                Variant::Thm1 => ctx.try_thm1(a, n),
                Variant::Thm2 => ctx.try_thm2(a, n),
                Variant::Thm3 => ctx.try_thm3(a, n),
            });
        if let Some(cert) = found {
            log::info!("certificate found at n = {n}, base ({}, {})", cert.base.x, cert.base.y);
            return Ok(cert);
        }
    }
    Err(Error::BudgetExhausted)
}

struct Ctx<'a> {
    w: &'a TilingWindow,
    f: &'a PatternF,
    eps: f64,
    rho: f64,
    tol: Tolerances,
    hashes: &'a HashCache<'a>,
}

impl Ctx<'_> {
    fn patch_at(&self, a: usize) -> Patch {
        let c = self.w.tiles[a].centroid;
        let idx = self.w.tiles_meeting(c, self.rho, self.tol.geom);
        Patch::from_tiles_unchecked(idx.into_iter().map(|j| self.w.tiles[j].clone()).collect())
    }

    fn finish(&self, a: usize, n: u64, corrections: Corrections) -> Option<WitnessCertificate> {
        let cert = WitnessCertificate {
            n,
            epsilon: self.eps,
            base: self.w.tiles[a].centroid,
            pattern: self.f.clone(),
            patch: self.patch_at(a),
            corrections,
        };
        verify_in_window(self.w, &cert, &self.tol).then_some(cert)
    }

    /// The tile near `c_a + n u` carrying the same translation protopatch,
    /// with the smallest offset.
    fn try_thm1(&self, a: usize, n: u64) -> Option<WitnessCertificate> {
        let ta = &self.w.tiles[a];
        let mut cs = Vec::with_capacity(self.f.len());
        for &u in self.f.vectors() {
            let target = ta.centroid + u * n as f64;
            let best = self
                .w
                .tiles_with_centroid_near(target, self.eps)
                .into_iter()
                .filter(|&b| self.w.tiles[b].proto.id == ta.proto.id)
                .map(|b| (self.w.tiles[b].centroid - target, b))
                .filter(|(c, _)| c.norm() < self.eps)
                .filter(|&(_, b)| self.hashes.get(b) == self.hashes.get(a))
                .min_by(|p, q| p.0.norm().total_cmp(&q.0.norm()).then(p.1.cmp(&q.1)))?;
            cs.push(best.0);
        }
        self.finish(a, n, Corrections::Thm1(cs))
    }

    /// A congruent copy of the patch near `c_a + n u` whose conjugated
    /// motion is `eps`-small.
    fn try_thm2(&self, a: usize, n: u64) -> Option<WitnessCertificate> {
        let ta = &self.w.tiles[a];
        let v = ta.centroid;
        let mut ss = Vec::with_capacity(self.f.len());
        for &u in self.f.vectors() {
            let shift = u * n as f64 + v;
            let target = ta.centroid + u * n as f64;
            let mut best: Option<(f64, Isometry2)> = None;
            for b in self.w.tiles_with_centroid_near(target, self.eps) {
                if self.w.tiles[b].proto.id != ta.proto.id || self.hashes.get(b) != self.hashes.get(a) {
                    continue;
                }
                for m in tile_alignments(ta, &self.w.tiles[b], MatchMode::Isometry, self.tol.geom) {
                    let s = Isometry2::translation(-shift).compose(&m).compose(&Isometry2::translation(v));
                    let size = isometry_distance(&s, &Isometry2::IDENTITY);
                    if size < self.eps && best.as_ref().is_none_or(|(bs, _)| size < *bs) {
                        best = Some((size, s));
                    }
                }
            }
            ss.push(best?.1);
        }
        self.finish(a, n, Corrections::Thm2(ss))
    }

    /// Each tile of the patch matched to a distinct tile near its dilated
    /// position by its own `eps`-small conjugated motion.
    fn try_thm3(&self, a: usize, n: u64) -> Option<WitnessCertificate> {
        let v = self.w.tiles[a].centroid;
        let patch = self.patch_at(a);
        let mut rows = Vec::with_capacity(self.f.len());
        for &u in self.f.vectors() {
            let shift = u * n as f64 + v;
            let mut used = HashSet::new();
            let mut row = Vec::with_capacity(patch.len());
            for t in &patch.tiles {
                let target = t.centroid + u * n as f64;
                let reach = self.eps * (1.0 + (t.centroid - v).norm()) + self.tol.geom;
                let mut best: Option<(f64, usize, Isometry2)> = None;
                for b in self.w.tiles_with_centroid_near(target, reach) {
                    if used.contains(&b) {
                        continue;
                    }
                    for m in tile_alignments(t, &self.w.tiles[b], MatchMode::Isometry, self.tol.geom) {
                        let s = Isometry2::translation(-shift).compose(&m).compose(&Isometry2::translation(v));
                        let size = isometry_distance(&s, &Isometry2::IDENTITY);
                        if size < self.eps && best.as_ref().is_none_or(|(bs, _, _)| size < *bs) {
                            best = Some((size, b, s));
                        }
                    }
                }
                let (_, b, s) = best?;
                used.insert(b);
                row.push(s);
            }
            rows.push(row);
        }
        self.finish(a, n, Corrections::Thm3(rows))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::unit_square_lattice;
    use crate::ipsets::ip_contains;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn lattice_cert(f: &PatternF, corrections: Corrections) -> WitnessCertificate {
        let w = unit_square_lattice().window(40.0).unwrap();
        let patch = patches_covering(&w, 10.0, Vec2::ZERO, &tol()).unwrap();
        WitnessCertificate { n: 1, epsilon: 0.1, base: Vec2::ZERO, pattern: f.clone(), patch, corrections }
    }

    fn two_axes() -> PatternF {
        PatternF::new(vec![Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)]).unwrap()
    }

    #[test]
    fn pattern_rejects_duplicates_and_empty() {
        assert!(PatternF::new(vec![]).is_err());
        assert!(PatternF::new(vec![Vec2::new(1.0, 0.0), Vec2::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn thm1_verification_examples() {
        let x = unit_square_lattice();
        let f = two_axes();
        let good = lattice_cert(&f, Corrections::Thm1(vec![Vec2::ZERO; 2]));
        assert!(verify_witness_thm1(&x, &f, &good).unwrap());
        let bad = lattice_cert(&f, Corrections::Thm1(vec![Vec2::new(0.2, 0.0), Vec2::ZERO]));
        assert!(!verify_witness_thm1(&x, &f, &bad).unwrap());
        let shifted = lattice_cert(&f, Corrections::Thm1(vec![Vec2::new(0.05, 0.0), Vec2::ZERO]));
        assert!(!verify_witness_thm1(&x, &f, &shifted).unwrap());
        let short = lattice_cert(&f, Corrections::Thm1(vec![Vec2::ZERO]));
        assert!(!verify_witness_thm1(&x, &f, &short).unwrap());
    }

    #[test]
    fn thm2_and_thm3_verification_examples() {
        let x = unit_square_lattice();
        let f = two_axes();
        let id = lattice_cert(&f, Corrections::Thm2(vec![Isometry2::IDENTITY; 2]));
        assert!(verify_witness_thm2(&x, &f, &id).unwrap());
        let far = lattice_cert(&f, Corrections::Thm2(vec![Isometry2::translation(Vec2::new(1.0, 0.0)); 2]));
        assert!(!verify_witness_thm2(&x, &f, &far).unwrap());
        let k = id.patch.len();
        let per_tile = lattice_cert(&f, Corrections::Thm3(vec![vec![Isometry2::IDENTITY; k]; 2]));
        assert!(verify_witness_thm3(&x, &f, &per_tile).unwrap());
        let mut rows = vec![vec![Isometry2::IDENTITY; k]; 2];
        rows[1][3] = Isometry2::rotation(0.5);
        let one_off = lattice_cert(&f, Corrections::Thm3(rows));
        assert!(!verify_witness_thm3(&x, &f, &one_off).unwrap());
        assert!(!verify_witness_thm1(&x, &f, &id).unwrap());
    }

    #[test]
    fn patch_index_on_lattice() {
        let w = unit_square_lattice().window(20.0).unwrap();
        let idx = build_patch_index(&w, 1.0, 3.0, MatchMode::Translation, &tol()).unwrap();
        // integer anchors sit on lattice vertices, so all anchors share one class
        let anchors = (-17i64..=17)
            .flat_map(|i| (-17i64..=17).map(move |j| (i, j)))
            .filter(|&(i, j)| ((i * i + j * j) as f64).sqrt() <= 17.0)
            .count();
        assert_eq!(idx.bucket_count(), 1);
        assert_eq!(idx.anchor_count(), anchors);
        let half = build_patch_index(&w, 0.5, 3.0, MatchMode::Translation, &tol()).unwrap();
        assert!(half.bucket_count() > 1);
        for (_, v) in half.buckets() {
            let (a, _) = v[0];
            assert!(v.iter().all(|(b, _)| ((b.x - a.x).fract() == 0.0) && ((b.y - a.y).fract() == 0.0)));
        }
        assert!(build_patch_index(&w, 1.0, 6.0, MatchMode::Translation, &tol()).is_err());
    }

    #[test]
    fn lattice_search_finds_period() {
        let x = unit_square_lattice();
        let f = PatternF::new(vec![Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(1.0, 1.0)]).unwrap();
        let cert = search_witness(&x, &f, &SearchParams::new(0.1, Variant::Thm1, 5, 40.0)).unwrap();
        assert_eq!(cert.n, 1);
        let Corrections::Thm1(c) = &cert.corrections else { panic!() };
        assert!(c.iter().all(|v| v.norm() < 1e-12));
        assert!(patch_support_contains_disk(&cert.patch, 10.0, cert.base, &tol()));
        assert!(verify_witness_thm1(&x, &f, &cert).unwrap());
        let two = cert.thm1_to_thm2().unwrap();
        assert!(verify_witness_thm2(&x, &f, &two).unwrap());
        assert!(verify_witness_thm3(&x, &f, &two.thm2_to_thm3().unwrap()).unwrap());
    }

    #[test]
    fn search_budget_and_ip() {
        let x = unit_square_lattice();
        let f = two_axes();
        let none = search_witness(&x, &f, &SearchParams::new(0.1, Variant::Thm1, 0, 40.0));
        assert!(matches!(none, Err(Error::BudgetExhausted)));
        let ip = IPSetSpec::geometric(3);
        let params = SearchParams { ip: Some(ip.clone()), ..SearchParams::new(0.1, Variant::Thm1, 10, 40.0) };
        let cert = search_witness(&x, &f, &params).unwrap();
        assert_eq!(cert.n, 3);
        assert!(ip_contains(&ip, cert.n));
        let params = SearchParams { ip: Some(ip), ..SearchParams::new(0.1, Variant::Thm1, 2, 40.0) };
        assert!(matches!(search_witness(&x, &f, &params), Err(Error::BudgetExhausted)));
    }

    #[test]
    fn thm2_and_thm3_search_on_lattice() {
        let x = unit_square_lattice();
        let f = two_axes();
        for variant in [Variant::Thm2, Variant::Thm3] {
            let cert = search_witness(&x, &f, &SearchParams::new(0.25, variant, 3, 30.0)).unwrap();
            assert_eq!(cert.n, 1);
            assert!(verify_witness(&x, &cert, &tol()).unwrap());
        }
    }

    #[test]
    fn certificate_json_round_trip() {
        let x = unit_square_lattice();
        let f = two_axes();
        let cert = search_witness(&x, &f, &SearchParams::new(0.2, Variant::Thm1, 3, 30.0)).unwrap();
        let w = x.window(30.0).unwrap();
        for c in [cert.clone(), cert.thm1_to_thm2().unwrap(), cert.thm1_to_thm2().unwrap().thm2_to_thm3().unwrap()] {
            let text = serde_json::to_string(&c.to_file()).unwrap();
            let file: CertificateFile = serde_json::from_str(&text).unwrap();
            let back = WitnessCertificate::from_file(&file, &w).unwrap();
            assert_eq!(back.variant(), c.variant());
            assert!(verify_witness(&x, &back, &tol()).unwrap());
        }
    }
}
