//! Transforming a source signal into a target with the synthesis deformations
//! alone, found by simulated annealing, and summarising how large those
//! deformations are.
//!
//! A fit runs in two steps: one window scaling that fixes the length, then
//! Gaussian peaks added one at a time until the Euclidean distance to the
//! target falls below a threshold.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::euclidean_slices;
use crate::seed::{self, Rng};
use crate::series::{interpolate, Series};
use crate::synthesis::{add_gaussian_peak, scale_window, DeformationPlan, DeformationStep, PeakProfile};

/// Annealing schedule and proposal sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SAParams {
    /// Starting temperature; `None` uses the objective of the initial state.
    pub t0: Option<f64>,
    /// Geometric cooling factor.
    pub alpha: f64,
    /// Proposals per annealing run.
    pub iterations: usize,
    /// Location moves are uniform within this fraction of the series length.
    pub location_step: f64,
    /// Width moves are relative, uniform within this fraction.
    pub width_step: f64,
    /// Magnitude moves are uniform within this fraction of the target amplitude.
    pub magnitude_step: f64,
    /// Consecutive peak runs without improvement before giving up.
    pub max_failed_peaks: usize,
    pub profile: PeakProfile,
    pub seed: u64,
}

impl Default for SAParams {
    fn default() -> Self {
        SAParams {
            t0: None,
            alpha: 0.95,
            iterations: 200,
            location_step: 0.1,
            width_step: 0.25,
            magnitude_step: 0.2,
            max_failed_peaks: 20,
            profile: PeakProfile::Normalized,
            seed: 0,
        }
    }
}

impl SAParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::param(format!("cooling factor must lie in (0, 1), got {}", self.alpha)));
        }
        if self.iterations == 0 {
            return Err(Error::param("annealing needs at least one iteration"));
        }
        if self.t0.is_some_and(|t| !(t.is_finite() && t > 0.0)) {
            return Err(Error::param("initial temperature must be positive"));
        }
        for (name, v) in [
            ("location step", self.location_step),
            ("width step", self.width_step),
            ("magnitude step", self.magnitude_step),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(format!("{name} must be positive, got {v}")));
            }
        }
        if self.width_step >= 1.0 {
            return Err(Error::param("width step must stay below 1"));
        }
        Ok(())
    }
}

/// One proposal of an annealing run, as needed to replay the acceptance rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaDecision {
    pub temperature: f64,
    pub current: f64,
    pub proposed: f64,
    /// Uniform draw compared against `exp(-delta / temperature)`; absent when
    /// the proposal did not worsen the objective.
    pub draw: Option<f64>,
    pub accepted: bool,
}

#[derive(Clone, Debug)]
pub struct Annealed<S> {
    pub best: S,
    pub best_value: f64,
    pub log: Vec<SaDecision>,
}

/// Generic annealing loop. Improvements are always taken; a worsening `delta`
/// is taken with probability `exp(-delta / T_k)` where `T_k = T0 * alpha^k`.
/// Returns the best state seen.
pub fn anneal<S: Clone>(
    init: S,
    params: &SAParams,
    rng: &mut Rng,
    mut propose: impl FnMut(&S, &mut Rng) -> S,
    mut objective: impl FnMut(&S) -> f64,
) -> Annealed<S> {
    let mut current = init;
    let mut current_value = objective(&current);
    let (mut best, mut best_value) = (current.clone(), current_value);
    let t0 = params.t0.unwrap_or(current_value);
    let mut log = Vec::with_capacity(params.iterations);
    let mut temperature = t0;
    for _ in 0..params.iterations {
        let candidate = propose(&current, rng);
        let value = objective(&candidate);
        let delta = value - current_value;
        let (draw, accepted) = if delta <= 0.0 {
            (None, true)
        } else {
            let u: f64 = rng.gen();
            (Some(u), temperature > 0.0 && u < (-delta / temperature).exp())
        };
        log.push(SaDecision { temperature, current: current_value, proposed: value, draw, accepted });
        if accepted {
            current = candidate;
            current_value = value;
            if value < best_value {
                best = current.clone();
                best_value = value;
            }
        }
        temperature *= params.alpha;
    }
    Annealed { best, best_value, log }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub loc: usize,
    #[serde(rename = "W")]
    pub w: usize,
    pub s: f64,
}

impl ScalingRecord {
    pub fn step(&self) -> DeformationStep {
        DeformationStep::ScaleWindow { w0: self.loc, w1: self.loc + self.w, s: self.s, length_preserving: false }
    }

    /// Samples added (positive) or removed by this scaling.
    pub fn length_change(&self) -> isize {
        (self.w as f64 * (self.s - 1.0)).round() as isize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakRecord {
    pub loc: usize,
    pub width: usize,
    pub mag: f64,
}

impl PeakRecord {
    pub fn step(&self, profile: PeakProfile) -> DeformationStep {
        DeformationStep::GaussianPeak { center: self.loc, width: self.width, height: self.mag, profile }
    }
}

/// Scaled source and the annealing trace of the window search.
#[derive(Clone, Debug)]
pub struct ScalingFit {
    pub series: Series,
    pub record: ScalingRecord,
    pub log: Vec<SaDecision>,
}

/// Scales a window of half the source length so the source reaches the target
/// length, searching only the window location.
pub fn fit_scaling(source: &Series, target: &Series, sa: &SAParams) -> Result<(Series, ScalingRecord)> {
    let mut rng = seed::rng(sa.seed);
    fit_scaling_with(source, target, sa, &mut rng).map(|f| (f.series, f.record))
}

pub fn fit_scaling_with(source: &Series, target: &Series, sa: &SAParams, rng: &mut Rng) -> Result<ScalingFit> {
    sa.validate()?;
    source.require_len(4, "fitting")?;
    target.require_len(4, "fitting")?;
    let (ls, lt) = (source.len(), target.len());
    let w = ls / 2;
    let s = 1.0 + (lt as f64 - ls as f64) / w as f64;
    if !(s > 0.0) {
        return Err(Error::param(format!(
            "a {lt}-sample target is too short to reach by scaling a {ls}-sample source"
        )));
    }
    if s == 1.0 {
        let record = ScalingRecord { loc: 0, w, s };
        return Ok(ScalingFit { series: source.clone(), record, log: Vec::new() });
    }

    let scaled_at = |loc: usize| -> Result<Series> {
        let (scaled, _) = scale_window(source, loc, loc + w, s)?;
        Ok(if scaled.len() == lt { scaled } else { resample(&scaled, lt)? })
    };
    // Fail early on an impossible factor instead of inside the objective.
    scaled_at(0)?;

    let max_loc = ls - 1 - w;
    let step = ((sa.location_step * ls as f64).round() as i64).max(1);
    let init = rng.gen_range(0..=max_loc);
    let run = anneal(
        init,
        sa,
        rng,
        |&loc, rng| (loc as i64 + rng.gen_range(-step..=step)).clamp(0, max_loc as i64) as usize,
        |&loc| {
            let scaled = scaled_at(loc).expect("window validated above");
            euclidean_slices(scaled.values(), target.values())
        },
    );
    let record = ScalingRecord { loc: run.best, w, s };
    Ok(ScalingFit { series: scaled_at(run.best)?, record, log: run.log })
}

fn resample(x: &Series, len: usize) -> Result<Series> {
    let scale = (x.len() - 1) as f64 / (len - 1) as f64;
    Series::new((0..len).map(|j| interpolate(x.values(), j as f64 * scale)).collect())
}

/// Fitted series, applied peaks, and whether the threshold was reached.
#[derive(Clone, Debug)]
pub struct PeakFit {
    pub series: Series,
    pub peaks: Vec<PeakRecord>,
    pub distance: f64,
    pub converged: bool,
    /// Distance after each applied peak.
    pub trace: Vec<f64>,
    pub iterations: usize,
}

/// Adds one annealed Gaussian peak at a time until the distance to `target`
/// drops below `threshold` or the budget of `ceil(len / 2)` peaks is spent.
pub fn fit_peaks(source: &Series, target: &Series, threshold: f64, sa: &SAParams) -> Result<PeakFit> {
    let mut rng = seed::rng(sa.seed);
    fit_peaks_with(source, target, threshold, sa, &mut rng)
}

pub fn fit_peaks_with(
    source: &Series,
    target: &Series,
    threshold: f64,
    sa: &SAParams,
    rng: &mut Rng,
) -> Result<PeakFit> {
    sa.validate()?;
    let len = source.len();
    if len != target.len() {
        return Err(Error::param(format!("peak fitting needs equal lengths, got {len} and {}", target.len())));
    }
    source.require_len(2, "peak fitting")?;
    let budget = len.div_ceil(2);
    let amplitude = target.amplitude();
    let mag_step = sa.magnitude_step * if amplitude > 0.0 { amplitude } else { 1.0 };
    let loc_step = ((sa.location_step * len as f64).round() as i64).max(1);
    let max_width = len.max(2);

    let mut current = source.clone();
    let mut distance = euclidean_slices(current.values(), target.values());
    let mut peaks = Vec::new();
    let mut trace = Vec::new();
    let mut failures = 0;
    let mut iterations = 0;
    let done = |d: f64| d < threshold || d == 0.0;

    while !done(distance) && peaks.len() < budget && failures < sa.max_failed_peaks {
        let residual: Vec<f64> = target.values().iter().zip(current.values()).map(|(t, c)| t - c).collect();
        let energy: f64 = residual.iter().map(|r| r * r).sum();
        // Objective: distance after adding the peak, updated over its window only.
        let objective = |p: &PeakRecord| {
            let (lo, hi) = crate::synthesis::peak_window(len, p.loc, p.width);
            let mut e = energy;
            for (j, r) in residual.iter().enumerate().take(hi + 1).skip(lo) {
                let d = r - sa.profile.value(j as f64 - p.loc as f64, p.width, p.mag);
                e += d * d - r * r;
            }
            e.max(0.0).sqrt()
        };
        let loc = rng.gen_range(0..len);
        let init = PeakRecord {
            loc,
            width: rng.gen_range(2..=(len / 4).max(2)),
            mag: rng.gen_range(-1.0..=1.0) * residual.iter().fold(0.0f64, |m, r| m.max(r.abs())),
        };
        let run = anneal(
            init,
            sa,
            rng,
            |p, rng| PeakRecord {
                loc: (p.loc as i64 + rng.gen_range(-loc_step..=loc_step)).clamp(0, len as i64 - 1) as usize,
                width: ((p.width as f64 * (1.0 + rng.gen_range(-sa.width_step..=sa.width_step))).round() as usize)
                    .clamp(2, max_width),
                mag: p.mag + rng.gen_range(-mag_step..=mag_step),
            },
            objective,
        );
        iterations += sa.iterations;

        let (next, _) = add_gaussian_peak(&current, run.best.loc, run.best.width, run.best.mag, sa.profile)?;
        let next_distance = euclidean_slices(next.values(), target.values());
        if next_distance < distance {
            current = next;
            distance = next_distance;
            peaks.push(run.best);
            trace.push(distance);
            failures = 0;
        } else {
            failures += 1;
        }
    }
    Ok(PeakFit { converged: done(distance), series: current, peaks, distance, trace, iterations })
}

/// Result of a full fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub scaling: ScalingRecord,
    pub peaks: Vec<PeakRecord>,
    pub distance: f64,
    #[serde(rename = "T")]
    pub threshold: f64,
    pub converged: bool,
    pub seed: u64,
    #[serde(skip)]
    pub iterations: usize,
}

impl FitReport {
    /// The fit as a deformation plan that maps the source onto the fitted series.
    pub fn plan(&self, profile: PeakProfile) -> DeformationPlan {
        let steps = std::iter::once(self.scaling)
            .filter(|r| r.s != 1.0)
            .map(|r| r.step())
            .chain(self.peaks.iter().map(|p| p.step(profile)))
            .collect();
        DeformationPlan { steps, seed: self.seed }
    }
}

/// Threshold allowing `x` percent error: `(x / 100) * amplitude * length`.
pub fn threshold(target: &Series, x: f64) -> f64 {
    x / 100.0 * target.amplitude() * target.len() as f64
}

/// Scaling, then peaks, with the error threshold set to `x` percent.
pub fn fit(source: &Series, target: &Series, x: f64, sa: &SAParams) -> Result<(FitReport, Series)> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::param(format!("error percentage must be positive, got {x}")));
    }
    let mut rng = seed::rng(sa.seed);
    let scaled = fit_scaling_with(source, target, sa, &mut rng)?;
    let t = threshold(target, x);
    let peaks = fit_peaks_with(&scaled.series, target, t, sa, &mut rng)?;
    let report = FitReport {
        scaling: scaled.record,
        peaks: peaks.peaks,
        distance: peaks.distance,
        threshold: t,
        converged: peaks.converged,
        seed: sa.seed,
        iterations: scaled.log.len() + peaks.iterations,
    };
    Ok((report, peaks.series))
}

/// How strongly two signals differ by peaks and by scaling, in percent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationProfile {
    pub peak_effect: f64,
    pub scaling_effect: f64,
    pub significant_peaks: bool,
    pub significant_scaling: bool,
}

/// Effects at or above this percentage are significant.
pub const SIGNIFICANCE_THRESHOLD: f64 = 5.0;

impl VariationProfile {
    pub fn new(peak_effect: f64, scaling_effect: f64) -> Self {
        VariationProfile {
            peak_effect,
            scaling_effect,
            significant_peaks: peak_effect >= SIGNIFICANCE_THRESHOLD,
            significant_scaling: scaling_effect >= SIGNIFICANCE_THRESHOLD,
        }
    }
}

/// Peak effect `sum |mag| * width / (amplitude * length) * 100` over the
/// target; scaling effect `|W (s - 1)|` relative to the source length.
pub fn quantify_effects(report: &FitReport, target: &Series) -> Result<VariationProfile> {
    let amplitude = target.amplitude();
    if !(amplitude > 0.0) {
        return Err(Error::param("effects are undefined for a constant target"));
    }
    let len = target.len() as f64;
    let peak: f64 = report.peaks.iter().map(|p| p.mag.abs() * p.width as f64).sum::<f64>() / (amplitude * len) * 100.0;
    let change = report.scaling.w as f64 * (report.scaling.s - 1.0);
    let source_len = target.len() as f64 - change.round();
    Ok(VariationProfile::new(peak, change.abs() / source_len * 100.0))
}

/// The same effects read off a deformation plan instead of a fit: net length
/// changes relative to the source, peak areas relative to the final target's
/// amplitude and length.
pub fn plan_effects(plan: &DeformationPlan, source_len: usize, target: &Series) -> Result<VariationProfile> {
    let amplitude = target.amplitude();
    if !(amplitude > 0.0) {
        return Err(Error::param("effects are undefined for a constant target"));
    }
    let mut peak = 0.0;
    let mut change = 0.0;
    for step in &plan.steps {
        match *step {
            // Only net length changes count, as a fit cannot see anything else.
            DeformationStep::ScaleWindow { length_preserving: true, .. } => {}
            DeformationStep::ScaleWindow { w0, w1, s, .. } => {
                change += ((w1 - w0) as f64 * (s - 1.0)).round().abs();
            }
            DeformationStep::GaussianPeak { width, height, .. } => peak += height.abs() * width as f64,
        }
    }
    Ok(VariationProfile::new(peak / (amplitude * target.len() as f64) * 100.0, change / source_len as f64 * 100.0))
}
