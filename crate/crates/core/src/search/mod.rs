//! Pattern search over 3-D curves described by curvature and torsion.
//!
//! Polylines are reduced to per-sample curvature and torsion profiles; a
//! reference profile pair is then slid over each target with windows from
//! half to twice its length.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dtw::{AlignSpec, Variant, WeightParams};
use crate::error::{Error, Result};
use crate::metrics::euclidean_slices;
use crate::series::{fmt_f64, interpolate, is_csv, Series};

pub type Point3 = [f64; 3];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point3>", into = "Vec<Point3>")]
pub struct Polyline3 {
    points: Vec<Point3>,
}

impl Polyline3 {
    /// At least five finite points, no two consecutive ones equal.
    pub fn new(points: Vec<Point3>) -> Result<Self> {
        if points.len() < 5 {
            return Err(Error::param(format!("a polyline needs at least 5 points, got {}", points.len())));
        }
        if points.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::param("polyline coordinates must be finite"));
        }
        if let Some(k) = points.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::param(format!("polyline repeats point {k}")));
        }
        Ok(Polyline3 { points })
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }
}

impl TryFrom<Vec<Point3>> for Polyline3 {
    type Error = Error;

    fn try_from(points: Vec<Point3>) -> Result<Self> {
        Polyline3::new(points)
    }
}

impl From<Polyline3> for Vec<Point3> {
    fn from(p: Polyline3) -> Self {
        p.points
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePair {
    pub curvature: Series,
    pub torsion: Series,
}

impl ProfilePair {
    pub fn new(curvature: Series, torsion: Series) -> Result<Self> {
        if curvature.len() != torsion.len() {
            return Err(Error::param("curvature and torsion profiles differ in length"));
        }
        if curvature.values().iter().any(|&k| k < 0.0) {
            return Err(Error::param("curvature cannot be negative"));
        }
        Ok(ProfilePair { curvature, torsion })
    }

    pub fn len(&self) -> usize {
        self.curvature.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curvature.is_empty()
    }
}

fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: Point3, b: Point3) -> Point3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: Point3) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: Point3, s: f64) -> Point3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Relative size below which `|r' x r''|` counts as zero.
const DEGENERATE: f64 = 1e-10;

/// Per-sample curvature and torsion from central differences.
///
/// Derivatives are taken with respect to the sample index. Curvature is
/// defined on interior samples and torsion two samples in from each end;
/// the remaining ends copy the nearest defined value. Where the curve is
/// locally straight, both are zero.
pub fn curvature_torsion(p: &Polyline3) -> Result<ProfilePair> {
    let pts = p.points();
    let n = pts.len();
    let mean_step = pts.windows(2).map(|w| norm(sub(w[1], w[0]))).sum::<f64>() / (n - 1) as f64;
    // |r' x r''| scales like step^3 for a curve of fixed shape.
    let eps = DEGENERATE * mean_step.powi(3);

    let d1 = |i: usize| scale(sub(pts[i + 1], pts[i - 1]), 0.5);
    let d2 = |i: usize| sub(sub(pts[i + 1], pts[i]), sub(pts[i], pts[i - 1]));
    let d3 = |i: usize| {
        let outer = sub(pts[i + 2], pts[i - 2]);
        let inner = sub(pts[i + 1], pts[i - 1]);
        scale(sub(outer, scale(inner, 2.0)), 0.5)
    };

    let mut kappa = vec![0.0; n];
    let mut tau = vec![0.0; n];
    for i in 1..n - 1 {
        let (r1, r2) = (d1(i), d2(i));
        let c = cross(r1, r2);
        let cn = norm(c);
        if cn >= eps {
            kappa[i] = cn / norm(r1).powi(3);
            if i >= 2 && i + 2 < n {
                tau[i] = dot(c, d3(i)) / (cn * cn);
            }
        }
    }
    kappa[0] = kappa[1];
    kappa[n - 1] = kappa[n - 2];
    tau[0] = tau[2];
    tau[1] = tau[2];
    tau[n - 1] = tau[n - 3];
    tau[n - 2] = tau[n - 3];
    ProfilePair::new(Series::new(kappa)?, Series::new(tau)?)
}

/// `sqrt(d_c^2 + d_t^2)`.
pub fn combined_distance(d_c: f64, d_t: f64) -> f64 {
    (d_c * d_c + d_t * d_t).sqrt()
}

/// How a window is compared with the reference.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowDistance {
    /// Alignment cost under the configured variant.
    #[default]
    Alignment,
    /// Pointwise Euclidean distance after resampling the window to the reference length.
    Euclidean,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub variant: Variant,
    pub weights: Option<WeightParams>,
    /// Window lengths relative to the reference, inclusive.
    pub window_factor: (f64, f64),
    /// Number of geometrically spaced window lengths.
    pub window_steps: usize,
    /// Start offset step; `None` uses an eighth of the reference length.
    pub stride: Option<usize>,
    pub threshold: f64,
    pub distance: WindowDistance,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            variant: Variant::Dtw,
            weights: None,
            window_factor: (0.5, 2.0),
            window_steps: 8,
            stride: None,
            threshold: 65.0,
            distance: WindowDistance::Alignment,
        }
    }
}

impl SearchConfig {
    fn spec(&self) -> AlignSpec {
        AlignSpec { variant: self.variant, weights: self.weights, band: None }
    }

    pub fn stride_for(&self, ref_len: usize) -> usize {
        self.stride.unwrap_or((ref_len / 8).max(1))
    }

    fn validate(&self) -> Result<()> {
        if self.distance == WindowDistance::Alignment {
            self.spec().validate()?;
        }
        let (lo, hi) = self.window_factor;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::param(format!("window factors ({lo}, {hi}) must be positive and ordered")));
        }
        if self.window_steps == 0 {
            return Err(Error::param("window sweep needs at least one step"));
        }
        if self.stride == Some(0) {
            return Err(Error::param("stride must be at least 1"));
        }
        if !(self.threshold >= 0.0) {
            return Err(Error::param("threshold must be non-negative"));
        }
        Ok(())
    }

    /// Window lengths: geometric from `ceil(lo * len)` to `floor(hi * len)`,
    /// plus the reference length itself when it lies in that range.
    pub fn window_lengths(&self, ref_len: usize) -> Vec<usize> {
        let (lo, hi) = self.window_factor;
        let first = ((lo * ref_len as f64).ceil() as usize).max(1);
        let last = ((hi * ref_len as f64).floor() as usize).max(first);
        let mut out: Vec<usize> = if self.window_steps == 1 || first == last {
            vec![first]
        } else {
            let ratio = last as f64 / first as f64;
            let steps = self.window_steps - 1;
            (0..=steps)
                .map(|k| match k {
                    0 => first,
                    k if k == steps => last,
                    k => (first as f64 * ratio.powf(k as f64 / steps as f64)).round() as usize,
                })
                .collect()
        };
        if (first..=last).contains(&ref_len) {
            out.push(ref_len);
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// A window `[start, end)` of a target and its distances to the reference.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub target: usize,
    pub start: usize,
    pub end: usize,
    pub d_c: f64,
    pub d_t: f64,
    pub combined: f64,
}

impl MatchResult {
    fn overlaps(&self, other: &MatchResult) -> bool {
        self.start < other.end && other.start < self.end
    }
}

fn window_distance(cfg: &SearchConfig, spec: &AlignSpec, reference: &[f64], window: &[f64]) -> Result<f64> {
    match cfg.distance {
        WindowDistance::Alignment => spec.cost_features(reference, window),
        WindowDistance::Euclidean => {
            let n = reference.len();
            let step = if n > 1 { (window.len() - 1) as f64 / (n - 1) as f64 } else { 0.0 };
            let resampled: Vec<f64> = (0..n).map(|j| interpolate(window, j as f64 * step)).collect();
            Ok(euclidean_slices(reference, &resampled))
        }
    }
}

/// Every window of every target whose combined distance is below the
/// threshold, before overlap suppression.
pub fn candidate_windows(
    reference: &ProfilePair,
    targets: &[ProfilePair],
    cfg: &SearchConfig,
) -> Result<Vec<MatchResult>> {
    cfg.validate()?;
    if reference.len() < 4 {
        return Err(Error::param("the reference profile needs at least 4 samples"));
    }
    let spec = cfg.spec();
    let derivative = cfg.distance == WindowDistance::Alignment && cfg.variant.uses_derivative();
    let features = |s: &Series| if derivative { spec.features(s.values()) } else { s.values().to_vec() };
    let (ref_c, ref_t) = (features(&reference.curvature), features(&reference.torsion));
    let min_len = if cfg.distance == WindowDistance::Alignment { cfg.variant.min_len() } else { 2 };
    let lengths: Vec<usize> = cfg.window_lengths(reference.len()).into_iter().filter(|&w| w >= min_len).collect();
    let stride = cfg.stride_for(reference.len());

    let jobs: Vec<(usize, usize, usize)> = targets
        .iter()
        .enumerate()
        .flat_map(|(t, target)| {
            lengths.iter().flat_map(move |&w| {
                (0..).map(move |k| k * stride).take_while(move |&s| s + w <= target.len()).map(move |s| (t, s, w))
            })
        })
        .collect();
    let all = jobs
        .par_iter()
        .map(|&(t, start, w)| {
            let target = &targets[t];
            let win_c = features(&Series::new(target.curvature.values()[start..start + w].to_vec())?);
            let win_t = features(&Series::new(target.torsion.values()[start..start + w].to_vec())?);
            let d_c = window_distance(cfg, &spec, &ref_c, &win_c)?;
            let d_t = window_distance(cfg, &spec, &ref_t, &win_t)?;
            Ok(MatchResult { target: t, start, end: start + w, d_c, d_t, combined: combined_distance(d_c, d_t) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(all.into_iter().filter(|m| m.combined < cfg.threshold).collect())
}

/// Keeps, per target, the best windows that overlap no better one.
pub fn suppress_overlaps(mut candidates: Vec<MatchResult>) -> Vec<MatchResult> {
    candidates.sort_by(|a, b| {
        a.target
            .cmp(&b.target)
            .then(a.combined.total_cmp(&b.combined))
            .then(a.start.cmp(&b.start))
            .then(a.end.cmp(&b.end))
    });
    let mut kept: Vec<MatchResult> = Vec::new();
    let mut first_of_target = 0;
    for m in candidates {
        if kept.get(first_of_target).is_some_and(|k| k.target != m.target) {
            first_of_target = kept.len();
        }
        if !kept[first_of_target..].iter().any(|k| k.overlaps(&m)) {
            kept.push(m);
        }
    }
    kept.sort_by_key(|m| (m.target, m.start, m.end));
    kept
}

/// Windows of `targets` resembling `reference`, with overlaps resolved in
/// favour of the smaller combined distance, sorted by target and start.
pub fn sliding_search(
    reference: &ProfilePair,
    targets: &[ProfilePair],
    cfg: &SearchConfig,
) -> Result<Vec<MatchResult>> {
    Ok(suppress_overlaps(candidate_windows(reference, targets, cfg)?))
}

/// Writes `target,start,end,d_c,d_t,combined`.
pub fn write_matches_csv<W: Write>(w: W, matches: &[MatchResult]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["target", "start", "end", "d_c", "d_t", "combined"])?;
    for m in matches {
        wtr.write_record([
            m.target.to_string(),
            m.start.to_string(),
            m.end.to_string(),
            fmt_f64(m.d_c),
            fmt_f64(m.d_t),
            fmt_f64(m.combined),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct PointRow {
    line_id: String,
    x: f64,
    y: f64,
    z: f64,
}

/// Reads `line_id,x,y,z` rows; lines keep the order of their first row.
pub fn polylines_from_csv<R: Read>(r: R) -> Result<Vec<(String, Polyline3)>> {
    let mut order: Vec<String> = Vec::new();
    let mut points: HashMap<String, Vec<Point3>> = HashMap::new();
    for row in csv::Reader::from_reader(r).deserialize() {
        let row: PointRow = row?;
        if !points.contains_key(&row.line_id) {
            order.push(row.line_id.clone());
        }
        points.entry(row.line_id).or_default().push([row.x, row.y, row.z]);
    }
    order
        .into_iter()
        .map(|id| {
            let line = Polyline3::new(points.remove(&id).unwrap_or_default())
                .map_err(|e| Error::param(format!("line `{id}`: {e}")))?;
            Ok((id, line))
        })
        .collect()
}

/// Reads a JSON list of point lists; lines are named by their position.
pub fn polylines_from_json<R: Read>(r: R) -> Result<Vec<(String, Polyline3)>> {
    let lines: Vec<Polyline3> = serde_json::from_reader(r)?;
    Ok(lines.into_iter().enumerate().map(|(k, l)| (k.to_string(), l)).collect())
}

pub fn load_polylines(path: &Path) -> Result<Vec<(String, Polyline3)>> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    if is_csv(path) {
        polylines_from_csv(file)
    } else {
        polylines_from_json(file)
    }
}
