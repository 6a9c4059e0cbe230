use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::deform::{apply_plan, apply_step, length_preserving_factor, peak_window};
use super::mapping::GroundTruthMapping;
use super::{DeformationPlan, DeformationStep, PeakProfile, VariationClass};
use crate::error::{Error, Result};
use crate::seed;
use crate::series::Series;

/// Ranges the randomized deformations are drawn from. Fractions are relative
/// to the length (or amplitude) of the series being deformed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VariationParams {
    pub window_fraction: (f64, f64),
    pub scale_factor: (f64, f64),
    /// Number of peaks for the multi-peak classes (inclusive).
    pub peak_count: (usize, usize),
    pub peak_width_fraction: (f64, f64),
    pub peak_height_fraction: (f64, f64),
    /// Probability that a drawn peak is subtracted instead of added.
    pub negative_peak_probability: f64,
    pub profile: PeakProfile,
}

impl Default for VariationParams {
    fn default() -> Self {
        VariationParams {
            window_fraction: (0.1, 0.3),
            scale_factor: (0.5, 1.5),
            peak_count: (2, 5),
            peak_width_fraction: (0.05, 0.15),
            peak_height_fraction: (0.4, 1.0),
            negative_peak_probability: 0.0,
            profile: PeakProfile::Normalized,
        }
    }
}

fn check_range(name: &str, (lo, hi): (f64, f64), min: f64, max: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi && lo >= min && hi <= max) {
        return Err(Error::param(format!("{name} range ({lo}, {hi}) must be ordered and lie within [{min}, {max}]")));
    }
    Ok(())
}

impl VariationParams {
    pub fn validate(&self) -> Result<()> {
        check_range("window fraction", self.window_fraction, 0.0, 1.0)?;
        check_range("scale factor", self.scale_factor, f64::MIN_POSITIVE, f64::MAX)?;
        check_range("peak width fraction", self.peak_width_fraction, 0.0, 1.0)?;
        check_range("peak height fraction", self.peak_height_fraction, 0.0, f64::MAX)?;
        if self.peak_count.0 < 2 || self.peak_count.0 > self.peak_count.1 {
            return Err(Error::param(format!("multi-peak count range {:?} must start at 2 or more", self.peak_count)));
        }
        if !(0.0..=1.0).contains(&self.negative_peak_probability) {
            return Err(Error::param("negative peak probability must be in [0, 1]"));
        }
        Ok(())
    }
}

fn draw(rng: &mut seed::Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

pub(crate) fn draw_scaling(
    rng: &mut seed::Rng,
    len: usize,
    params: &VariationParams,
    length_preserving: bool,
) -> Result<DeformationStep> {
    let width = (draw(rng, params.window_fraction) * len as f64).round() as usize;
    let width = width.max(2);
    if width > len - 1 {
        return Err(Error::param(format!("scaling window of {width} samples does not fit a series of {len}")));
    }
    let s = draw(rng, params.scale_factor);
    if (width as f64) * s < 1.0 {
        return Err(Error::param(format!("scale factor {s} collapses a {width}-sample window")));
    }
    let w0 = rng.gen_range(0..=len - 1 - width);
    let w1 = w0 + width;
    if length_preserving && !(length_preserving_factor(len, w0, w1, s) > 0.0) {
        return Err(Error::param("length-preserving scaling leaves no room outside the window"));
    }
    Ok(DeformationStep::ScaleWindow { w0, w1, s, length_preserving })
}

pub(crate) fn draw_peak(rng: &mut seed::Rng, x: &Series, params: &VariationParams) -> Result<DeformationStep> {
    let len = x.len();
    let width = ((draw(rng, params.peak_width_fraction) * len as f64).round() as usize).max(2);
    let half = width.div_ceil(2);
    if 2 * half >= len {
        return Err(Error::param(format!("peak of width {width} does not fit a series of {len} samples")));
    }
    let center = rng.gen_range(half..=len - 1 - half);
    let mut height = draw(rng, params.peak_height_fraction) * x.amplitude();
    if params.negative_peak_probability > 0.0 && rng.gen_bool(params.negative_peak_probability) {
        height = -height;
    }
    debug_assert!(peak_window(len, center, width).1 < len);
    Ok(DeformationStep::GaussianPeak { center, width, height, profile: params.profile })
}

/// A reference, its deformed target, and the true correspondence.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalPair {
    pub reference: Series,
    pub target: Series,
    pub ground_truth: GroundTruthMapping,
    pub plan: DeformationPlan,
    pub variation_class: VariationClass,
}

/// Draw a deformation plan of the requested class and apply it to `x`.
pub fn compose_variation(x: &Series, class: VariationClass, params: &VariationParams, seed: u64) -> Result<SignalPair> {
    params.validate()?;
    x.require_len(4, "deformation")?;
    let mut rng = seed::rng(seed);
    let mut steps = Vec::new();
    let mut current = x.clone();

    if class.has_scaling() {
        let step = draw_scaling(&mut rng, x.len(), params, class.length_preserving())?;
        current = apply_step(&current, &step)?.0;
        steps.push(step);
    }
    let peaks = match class.peak_bounds() {
        (0, _) => 0,
        (1, 1) => 1,
        _ => rng.gen_range(params.peak_count.0..=params.peak_count.1),
    };
    for _ in 0..peaks {
        let step = draw_peak(&mut rng, &current, params)?;
        current = apply_step(&current, &step)?.0;
        steps.push(step);
    }

    let plan = DeformationPlan { steps, seed };
    let (target, ground_truth) = apply_plan(x, &plan)?;
    debug_assert!(class.matches(&plan));
    Ok(SignalPair { reference: x.clone(), target, ground_truth, plan, variation_class: class })
}

/// On-disk layout of a [`SignalPair`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalPairFile {
    pub reference: Vec<f64>,
    pub target: Vec<f64>,
    pub ground_truth: Vec<f64>,
    pub variation_class: VariationClass,
    pub plan: Vec<DeformationStep>,
    pub seed: u64,
}

impl From<&SignalPair> for SignalPairFile {
    fn from(p: &SignalPair) -> Self {
        SignalPairFile {
            reference: p.reference.values().to_vec(),
            target: p.target.values().to_vec(),
            ground_truth: p.ground_truth.src_pos.clone(),
            variation_class: p.variation_class,
            plan: p.plan.steps.clone(),
            seed: p.plan.seed,
        }
    }
}

impl TryFrom<SignalPairFile> for SignalPair {
    type Error = Error;

    fn try_from(f: SignalPairFile) -> Result<Self> {
        let reference = Series::new(f.reference)?;
        let target = Series::new(f.target)?;
        if f.ground_truth.len() != target.len() {
            return Err(Error::param(format!(
                "ground truth has {} entries for a {}-sample target",
                f.ground_truth.len(),
                target.len()
            )));
        }
        let ground_truth = GroundTruthMapping { src_pos: f.ground_truth, src_len: reference.len() };
        if !ground_truth.in_bounds() {
            return Err(Error::param("ground truth points outside the reference"));
        }
        Ok(SignalPair {
            reference,
            target,
            ground_truth,
            plan: DeformationPlan { steps: f.plan, seed: f.seed },
            variation_class: f.variation_class,
        })
    }
}

impl Serialize for SignalPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SignalPairFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SignalPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = SignalPairFile::deserialize(d)?;
        SignalPair::try_from(file).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::{generate_signal, GeneratorSpec};

    fn reference(seed: u64) -> Series {
        generate_signal(&GeneratorSpec { length: 300, seed, ..GeneratorSpec::default() }).unwrap()
    }

    #[test]
    fn plans_follow_their_class() {
        let x = reference(1);
        let p = VariationParams::default();
        for (k, class) in VariationClass::ALL.into_iter().enumerate() {
            let pair = compose_variation(&x, class, &p, k as u64).unwrap();
            assert!(class.matches(&pair.plan), "{class}: {:?}", pair.plan);
            assert_eq!(pair.ground_truth.tgt_len(), pair.target.len());
            assert_eq!(pair.ground_truth.src_len, x.len());
            assert!(pair.ground_truth.is_monotone() && pair.ground_truth.in_bounds());
        }
        let scaled = compose_variation(&x, VariationClass::Scaled, &p, 3).unwrap();
        assert_eq!(scaled.plan.steps.len(), 1);
        let srgp = compose_variation(&x, VariationClass::ScaledRgp, &p, 3).unwrap();
        assert!(srgp.plan.steps[0].is_scaling());
        assert!(!srgp.plan.steps[1].is_scaling());
        assert_eq!(srgp.plan.steps.len(), 2);
    }

    #[test]
    fn same_seed_same_pair() {
        let x = reference(2);
        let p = VariationParams::default();
        let a = compose_variation(&x, VariationClass::ScaledMrgp, &p, 9).unwrap();
        let b = compose_variation(&x, VariationClass::ScaledMrgp, &p, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unit_scaling_gives_identity_truth() {
        let x = reference(4);
        let p = VariationParams { scale_factor: (1.0, 1.0), ..VariationParams::default() };
        let pair = compose_variation(&x, VariationClass::Scaled, &p, 0).unwrap();
        assert_eq!(pair.target, x);
        assert_eq!(pair.ground_truth, GroundTruthMapping::identity(x.len()));
    }

    #[test]
    fn oversized_ranges_are_rejected() {
        let x = Series::new(vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let p = VariationParams { peak_width_fraction: (0.9, 1.0), ..VariationParams::default() };
        assert!(matches!(compose_variation(&x, VariationClass::Rgp, &p, 0), Err(Error::Parameter(_))));
        let p = VariationParams { window_fraction: (2.0, 3.0), ..VariationParams::default() };
        assert!(compose_variation(&x, VariationClass::Scaled, &p, 0).is_err());
    }

    #[test]
    fn pair_file_round_trip() {
        let x = reference(5);
        let pair = compose_variation(&x, VariationClass::ScaledRgp, &VariationParams::default(), 1).unwrap();
        let text = serde_json::to_string(&pair).unwrap();
        let back: SignalPair = serde_json::from_str(&text).unwrap();
        assert_eq!(back, pair);
    }
}
