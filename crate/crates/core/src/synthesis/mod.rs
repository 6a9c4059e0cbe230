//! Reference-signal generation and ground-truth-recording deformations.
//!
//! A reference is produced by [`generate_signal`]; [`compose_variation`]
//! deforms it into a target according to one of six variation classes and
//! records, for every target sample, the (fractional) reference position it
//! was taken from.

mod compose;
mod deform;
mod generate;
mod mapping;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use compose::{compose_variation, SignalPair, SignalPairFile, VariationParams};
pub(crate) use compose::{draw_peak, draw_scaling};
pub(crate) use deform::peak_window;
pub use deform::{
    add_gaussian_peak, apply_plan, apply_step, length_preserving_factor, preserving_position, scale_position,
    scale_window, scale_window_length_preserving, scaled_length,
};
pub use generate::{generate_signal, generate_with_anchors, GeneratedSignal, GeneratorSpec};
pub use mapping::{compose_mappings, GroundTruthMapping};

use crate::error::Error;

/// Shape of an added Gaussian peak.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeakProfile {
    /// `h * exp(-((j - i) / (2n))^2)`. Barely decays inside the window.
    Literal,
    /// `h * exp(-0.5 * ((j - i) / (n / 6))^2)`, about 1% of `h` at the window edges.
    #[default]
    Normalized,
}

impl PeakProfile {
    pub fn value(self, offset: f64, width: usize, height: f64) -> f64 {
        let n = width as f64;
        match self {
            PeakProfile::Literal => {
                let z = offset / (2.0 * n);
                height * (-(z * z)).exp()
            }
            PeakProfile::Normalized => {
                let z = offset / (n / 6.0);
                height * (-0.5 * z * z).exp()
            }
        }
    }
}

impl FromStr for PeakProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "literal" => Ok(PeakProfile::Literal),
            "normalized" => Ok(PeakProfile::Normalized),
            other => Err(Error::param(format!("unknown peak profile `{other}`"))),
        }
    }
}

/// One deformation applied to a series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum DeformationStep {
    ScaleWindow { w0: usize, w1: usize, s: f64, length_preserving: bool },
    GaussianPeak { center: usize, width: usize, height: f64, profile: PeakProfile },
}

impl DeformationStep {
    pub fn is_scaling(&self) -> bool {
        matches!(self, DeformationStep::ScaleWindow { .. })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DeformationPlan {
    pub steps: Vec<DeformationStep>,
    pub seed: u64,
}

impl DeformationPlan {
    pub fn scaling_steps(&self) -> impl Iterator<Item = &DeformationStep> {
        self.steps.iter().filter(|s| s.is_scaling())
    }

    pub fn peak_steps(&self) -> impl Iterator<Item = &DeformationStep> {
        self.steps.iter().filter(|s| !s.is_scaling())
    }
}

/// The six variation classes evaluated by the alignment suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariationClass {
    Scaled,
    ScaledSameSize,
    Rgp,
    Mrgp,
    ScaledRgp,
    ScaledMrgp,
}

impl VariationClass {
    pub const ALL: [VariationClass; 6] = [
        VariationClass::Scaled,
        VariationClass::ScaledSameSize,
        VariationClass::Rgp,
        VariationClass::Mrgp,
        VariationClass::ScaledRgp,
        VariationClass::ScaledMrgp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VariationClass::Scaled => "scaled",
            VariationClass::ScaledSameSize => "scaled_same_size",
            VariationClass::Rgp => "rgp",
            VariationClass::Mrgp => "mrgp",
            VariationClass::ScaledRgp => "scaled_rgp",
            VariationClass::ScaledMrgp => "scaled_mrgp",
        }
    }

    pub fn has_scaling(self) -> bool {
        matches!(
            self,
            VariationClass::Scaled
                | VariationClass::ScaledSameSize
                | VariationClass::ScaledRgp
                | VariationClass::ScaledMrgp
        )
    }

    pub fn length_preserving(self) -> bool {
        self == VariationClass::ScaledSameSize
    }

    /// Inclusive bounds on the number of peak steps a plan of this class holds.
    pub fn peak_bounds(self) -> (usize, usize) {
        match self {
            VariationClass::Scaled | VariationClass::ScaledSameSize => (0, 0),
            VariationClass::Rgp | VariationClass::ScaledRgp => (1, 1),
            VariationClass::Mrgp | VariationClass::ScaledMrgp => (2, usize::MAX),
        }
    }

    /// Whether `plan` has the structure this class prescribes.
    pub fn matches(self, plan: &DeformationPlan) -> bool {
        let scales: Vec<_> = plan.scaling_steps().collect();
        let peaks = plan.peak_steps().count();
        let (lo, hi) = self.peak_bounds();
        let scaling_ok = if self.has_scaling() {
            scales.len() == 1
                && matches!(scales[0], DeformationStep::ScaleWindow { length_preserving, .. }
                    if *length_preserving == self.length_preserving())
                && plan.steps.first().is_some_and(DeformationStep::is_scaling)
        } else {
            scales.is_empty()
        };
        scaling_ok && (lo..=hi).contains(&peaks)
    }
}

impl fmt::Display for VariationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VariationClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        VariationClass::ALL
            .into_iter()
            .find(|c| c.as_str() == key)
            .ok_or_else(|| Error::param(format!("unknown variation class `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_profile_matches_hand_values() {
        // h = 8, n = 4, centre 5, evaluated at j = 3..=7
        let got: Vec<f64> = (3..=7).map(|j| PeakProfile::Literal.value(j as f64 - 5.0, 4, 8.0)).collect();
        let want = [7.515, 7.876, 8.0, 7.876, 7.515];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 5e-4, "{g} vs {w}");
        }
    }

    #[test]
    fn normalized_profile_decays_at_edges() {
        let edge = PeakProfile::Normalized.value(6.0, 12, 1.0);
        assert!(edge < 0.02);
        assert_eq!(PeakProfile::Normalized.value(0.0, 12, 3.5), 3.5);
    }

    #[test]
    fn class_names_round_trip() {
        for c in VariationClass::ALL {
            assert_eq!(c.as_str().parse::<VariationClass>().unwrap(), c);
        }
        assert!("warped".parse::<VariationClass>().is_err());
    }
}
