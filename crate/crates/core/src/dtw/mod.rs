//! DTW, derivative DTW, and their logistic-weighted forms.
//!
//! All four variants share one dynamic-programming kernel over the `m x n`
//! cost matrix with local cost `|a_i - b_j|`:
//!
//! | variant | features | local cost |
//! |---------|----------|------------|
//! | DTW     | raw values | `\|x_i - y_j\|` |
//! | DDTW    | [`derivative_transform`] | `\|dx_i - dy_j\|` |
//! | WDTW    | raw values | `w(\|i - j\|) \|x_i - y_j\|` |
//! | WDDTW   | derivatives | `w(\|i - j\|) \|dx_i - dy_j\|` |
//!
//! with the modified logistic weight `w(d) = w_max / (1 + exp(-g (d - m_c)))`.
//! Paths step by `(+1,0)`, `(0,+1)` or `(+1,+1)`; ties prefer the diagonal,
//! then the step that advances the longer series.

mod band;
mod kernel;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use band::BandConstraint;

use crate::error::{Error, Result};
use crate::series::Series;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Dtw,
    Ddtw,
    Wdtw,
    Wddtw,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Dtw, Variant::Ddtw, Variant::Wdtw, Variant::Wddtw];

    pub fn is_weighted(self) -> bool {
        matches!(self, Variant::Wdtw | Variant::Wddtw)
    }

    pub fn uses_derivative(self) -> bool {
        matches!(self, Variant::Ddtw | Variant::Wddtw)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Dtw => "dtw",
            Variant::Ddtw => "ddtw",
            Variant::Wdtw => "wdtw",
            Variant::Wddtw => "wddtw",
        }
    }

    /// Shortest series this variant can align.
    pub fn min_len(self) -> usize {
        if self.uses_derivative() {
            3
        } else {
            2
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::param(format!("unknown DTW variant `{s}`")))
    }
}

/// Logistic phase-difference weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    /// Steepness.
    pub g: f64,
    pub w_max: f64,
    /// Crossover offset in samples. `None` means half the longer series.
    pub m_c: Option<f64>,
}

impl WeightParams {
    pub fn new(g: f64) -> Self {
        WeightParams { g, w_max: 1.0, m_c: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::param(format!("weight steepness g must be positive, got {}", self.g)));
        }
        if !(self.w_max.is_finite() && self.w_max > 0.0) {
            return Err(Error::param("w_max must be positive"));
        }
        if self.m_c.is_some_and(|c| !c.is_finite()) {
            return Err(Error::param("m_c must be finite"));
        }
        Ok(())
    }

    pub fn weight(&self, d: f64, m_c: f64) -> f64 {
        self.w_max / (1.0 + (-self.g * (d - m_c)).exp())
    }
}

/// Weights for phase differences `0..=d_max`. Without an explicit `m_c` the
/// crossover sits at `(d_max + 1) / 2`, i.e. half the longer series when
/// `d_max = max(m, n) - 1`.
pub fn weight_vector(d_max: usize, params: &WeightParams) -> Vec<f64> {
    let m_c = params.m_c.unwrap_or((d_max + 1) as f64 / 2.0);
    (0..=d_max).map(|d| params.weight(d as f64, m_c)).collect()
}

/// Keogh-Pazzani derivative estimate; the two endpoints copy their neighbours.
pub fn derivative_transform(x: &Series) -> Result<Series> {
    x.require_len(3, "the derivative transform")?;
    Series::new(derivative(x.values()))
}

pub(crate) fn derivative(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = ((v[i] - v[i - 1]) + (v[i + 1] - v[i - 1]) / 2.0) / 2.0;
    }
    d[0] = d[1];
    d[n - 1] = d[n - 2];
    d
}

/// A warping path and its accumulated cost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<usize>,
    /// Set when the requested band admitted no path and was widened.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub band_widened: bool,
    pub cost: f64,
    pub path: Vec<(usize, usize)>,
}

impl Alignment {
    /// Checks boundary, step, and range conditions for an `m x n` problem.
    pub fn validate_path(&self, m: usize, n: usize) -> Result<()> {
        validate_path(&self.path, m, n)
    }

    pub fn lens(&self) -> (usize, usize) {
        self.path.last().map_or((0, 0), |&(i, j)| (i + 1, j + 1))
    }
}

pub fn validate_path(path: &[(usize, usize)], m: usize, n: usize) -> Result<()> {
    let (Some(&first), Some(&last)) = (path.first(), path.last()) else {
        return Err(Error::contract("empty warping path"));
    };
    if first != (0, 0) || last != (m - 1, n - 1) {
        return Err(Error::contract(format!(
            "path runs {first:?} -> {last:?}, expected (0, 0) -> ({}, {})",
            m - 1,
            n - 1
        )));
    }
    for w in path.windows(2) {
        let (di, dj) = (w[1].0.wrapping_sub(w[0].0), w[1].1.wrapping_sub(w[0].1));
        if !matches!((di, dj), (1, 0) | (0, 1) | (1, 1)) {
            return Err(Error::contract(format!("illegal step {:?} -> {:?}", w[0], w[1])));
        }
    }
    Ok(())
}

/// Variant, weights, and band for repeated alignments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlignSpec {
    pub variant: Variant,
    pub weights: Option<WeightParams>,
    pub band: Option<BandConstraint>,
}

impl AlignSpec {
    pub fn new(variant: Variant) -> Self {
        AlignSpec { variant, weights: None, band: None }
    }

    pub fn weighted(variant: Variant, g: f64) -> Self {
        AlignSpec { variant, weights: Some(WeightParams::new(g)), band: None }
    }

    pub fn with_band(mut self, band: Option<BandConstraint>) -> Self {
        self.band = band;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match (self.variant.is_weighted(), &self.weights) {
            (true, None) => Err(Error::param(format!("{} requires weight parameters", self.variant))),
            (false, Some(_)) => Err(Error::param(format!("{} takes no weight parameters", self.variant))),
            (true, Some(w)) => w.validate(),
            (false, None) => Ok(()),
        }
    }

    /// Transforms raw values into the features this variant compares.
    pub fn features(&self, v: &[f64]) -> Vec<f64> {
        if self.variant.uses_derivative() {
            derivative(v)
        } else {
            v.to_vec()
        }
    }

    fn check_inputs(&self, m: usize, n: usize) -> Result<()> {
        self.validate()?;
        let need = self.variant.min_len();
        if m < need || n < need {
            return Err(Error::param(format!(
                "{} needs series of at least {need} samples, got {m} and {n}",
                self.variant
            )));
        }
        Ok(())
    }

    fn weights_for(&self, m: usize, n: usize) -> Option<Vec<f64>> {
        self.weights.map(|w| weight_vector(m.max(n) - 1, &w))
    }

    fn rows_for(&self, m: usize, n: usize) -> (Option<Vec<(usize, usize)>>, Option<usize>, bool) {
        match self.band {
            None => (None, None, false),
            Some(b) => {
                let used = b.widened_to_feasible(m, n);
                (Some(used.rows(m, n)), Some(used.width), used.width != b.width)
            }
        }
    }

    /// Align pre-computed features (see [`AlignSpec::features`]).
    pub fn align_features(&self, a: &[f64], b: &[f64]) -> Result<Alignment> {
        let (m, n) = (a.len(), b.len());
        self.check_inputs(m, n)?;
        let weights = self.weights_for(m, n);
        let (rows, band, band_widened) = self.rows_for(m, n);
        let local = kernel::LocalCost { a, b, weights: weights.as_deref() };
        let (cost, path) = kernel::path(&local, rows.as_deref());
        Ok(Alignment { variant: self.variant, g: self.weights.map(|w| w.g), band, band_widened, cost, path })
    }

    /// Accumulated cost only; cheaper than [`AlignSpec::align_features`].
    pub fn cost_features(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        let (m, n) = (a.len(), b.len());
        self.check_inputs(m, n)?;
        let weights = self.weights_for(m, n);
        let (rows, _, _) = self.rows_for(m, n);
        let local = kernel::LocalCost { a, b, weights: weights.as_deref() };
        Ok(kernel::cost_only(&local, rows.as_deref()))
    }

    pub fn align(&self, x: &Series, y: &Series) -> Result<Alignment> {
        self.check_inputs(x.len(), y.len())?;
        self.align_features(&self.features(x.values()), &self.features(y.values()))
    }

    pub fn distance(&self, x: &Series, y: &Series) -> Result<f64> {
        self.check_inputs(x.len(), y.len())?;
        self.cost_features(&self.features(x.values()), &self.features(y.values()))
    }

    /// Sum of (weighted) local costs along `path`, recomputed from scratch.
    pub fn path_cost(&self, x: &Series, y: &Series, path: &[(usize, usize)]) -> Result<f64> {
        let (m, n) = (x.len(), y.len());
        self.check_inputs(m, n)?;
        validate_path(path, m, n)?;
        let (a, b) = (self.features(x.values()), self.features(y.values()));
        let weights = self.weights_for(m, n);
        let local = kernel::LocalCost { a: &a, b: &b, weights: weights.as_deref() };
        Ok(path.iter().fold(0.0, |acc, &(i, j)| acc + local.at(i, j)))
    }
}

/// Align `x` to `y` with the given variant, weights, and optional band.
pub fn align(
    x: &Series,
    y: &Series,
    variant: Variant,
    weights: Option<WeightParams>,
    band: Option<BandConstraint>,
) -> Result<Alignment> {
    AlignSpec { variant, weights, band }.align(x, y)
}
