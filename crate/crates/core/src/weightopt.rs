//! Monte-Carlo search for the weight steepness `g` of the weighted variants.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dtw::{AlignSpec, Variant};
use crate::error::{Error, Result};
use crate::metrics::{self, GroundTruthMode};
use crate::seed;
use crate::series::Series;
use crate::synthesis::SignalPair;

/// Quantity minimised by the search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    #[default]
    Adm,
    Adt,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::Adm => "adm",
            Objective::Adt => "adt",
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "adm" => Ok(Objective::Adm),
            "adt" => Ok(Objective::Adt),
            _ => Err(Error::param(format!("unknown objective `{s}` (expected adm or adt)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WeightSearchConfig {
    /// Number of uniformly drawn candidates.
    #[serde(rename = "K")]
    pub k: usize,
    pub g_range: (f64, f64),
    pub objective: Objective,
    pub seed: u64,
}

impl Default for WeightSearchConfig {
    fn default() -> Self {
        WeightSearchConfig { k: 100, g_range: (0.01, 1.0), objective: Objective::Adm, seed: 0 }
    }
}

impl WeightSearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::param("weight search needs at least one sample"));
        }
        let (lo, hi) = self.g_range;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return Err(Error::param(format!("g range ({lo}, {hi}) must be positive and ordered")));
        }
        Ok(())
    }

    /// The candidate sequence. A larger `k` with the same seed extends the
    /// sequence without changing its prefix.
    pub fn candidates(&self) -> Vec<f64> {
        let mut rng = seed::rng(self.seed);
        let (lo, hi) = self.g_range;
        (0..self.k).map(|_| if lo == hi { lo } else { rng.gen_range(lo..=hi) }).collect()
    }
}

/// Outcome of a search, including every evaluated candidate for replay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSearchResult {
    pub variant: Variant,
    pub g: f64,
    pub objective: Objective,
    pub value: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub seed: u64,
    #[serde(skip)]
    pub samples: Vec<(f64, f64)>,
}

/// Mean objective over `pairs` when aligning with `spec`.
pub fn evaluate(pairs: &[SignalPair], spec: &AlignSpec, objective: Objective) -> Result<f64> {
    let features: Vec<_> =
        pairs.iter().map(|p| (spec.features(p.reference.values()), spec.features(p.target.values()))).collect();
    evaluate_features(pairs, &features, spec, objective)
}

fn evaluate_features(
    pairs: &[SignalPair],
    features: &[(Vec<f64>, Vec<f64>)],
    spec: &AlignSpec,
    objective: Objective,
) -> Result<f64> {
    let mut total = 0.0;
    for (p, (a, b)) in pairs.iter().zip(features) {
        let al = spec.align_features(a, b)?;
        total += match objective {
            Objective::Adm => metrics::adm(&al, &p.reference, &p.target)?,
            Objective::Adt => metrics::adt(&al, &p.ground_truth, GroundTruthMode::Fractional)?,
        };
    }
    Ok(total / pairs.len() as f64)
}

/// Draws `cfg.k` values of `g`, scores each by the mean objective over
/// `pairs`, and returns the best one. Ties go to the smaller `g`.
pub fn optimize_g(pairs: &[SignalPair], variant: Variant, cfg: &WeightSearchConfig) -> Result<WeightSearchResult> {
    check(pairs.len(), variant, cfg)?;
    let probe = AlignSpec::weighted(variant, cfg.g_range.0);
    let features: Vec<_> =
        pairs.iter().map(|p| (probe.features(p.reference.values()), probe.features(p.target.values()))).collect();
    run(variant, cfg, |g| evaluate_features(pairs, &features, &AlignSpec::weighted(variant, g), cfg.objective))
}

/// [`optimize_g`] for pairs without ground truth; only ADM applies.
pub fn optimize_g_unlabelled(
    pairs: &[(Series, Series)],
    variant: Variant,
    cfg: &WeightSearchConfig,
) -> Result<WeightSearchResult> {
    check(pairs.len(), variant, cfg)?;
    if cfg.objective != Objective::Adm {
        return Err(Error::param("pairs without ground truth can only be scored by ADM"));
    }
    let probe = AlignSpec::weighted(variant, cfg.g_range.0);
    let features: Vec<_> =
        pairs.iter().map(|(x, y)| (probe.features(x.values()), probe.features(y.values()))).collect();
    run(variant, cfg, |g| {
        let spec = AlignSpec::weighted(variant, g);
        let mut total = 0.0;
        for ((x, y), (a, b)) in pairs.iter().zip(&features) {
            total += metrics::adm(&spec.align_features(a, b)?, x, y)?;
        }
        Ok(total / pairs.len() as f64)
    })
}

fn check(n_pairs: usize, variant: Variant, cfg: &WeightSearchConfig) -> Result<()> {
    cfg.validate()?;
    if n_pairs == 0 {
        return Err(Error::param("weight search needs at least one signal pair"));
    }
    if !variant.is_weighted() {
        return Err(Error::param(format!("{variant} has no weight to optimise")));
    }
    Ok(())
}

fn run(
    variant: Variant,
    cfg: &WeightSearchConfig,
    score: impl Fn(f64) -> Result<f64> + Sync,
) -> Result<WeightSearchResult> {
    let candidates = cfg.candidates();
    let values = candidates.par_iter().map(|&g| score(g)).collect::<Result<Vec<f64>>>()?;
    let samples: Vec<(f64, f64)> = candidates.into_iter().zip(values).collect();
    let &(g, value) = samples.iter().min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0))).expect("k >= 1");
    Ok(WeightSearchResult { variant, g, objective: cfg.objective, value, k: cfg.k, seed: cfg.seed, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::{compose_variation, generate_signal, GeneratorSpec, VariationClass, VariationParams};

    fn pairs(n: usize, class: VariationClass) -> Vec<SignalPair> {
        (0..n as u64)
            .map(|k| {
                let x = generate_signal(&GeneratorSpec { length: 80, p1: 5, p2: 20, seed: k, ..Default::default() })
                    .unwrap();
                compose_variation(&x, class, &VariationParams::default(), 100 + k).unwrap()
            })
            .collect()
    }

    fn identical(n: usize) -> Vec<SignalPair> {
        pairs(n, VariationClass::Rgp)
            .into_iter()
            .map(|mut p| {
                p.target = p.reference.clone();
                p.ground_truth = crate::synthesis::GroundTruthMapping::identity(p.reference.len());
                p
            })
            .collect()
    }

    #[test]
    fn single_sample_is_returned() {
        let cfg = WeightSearchConfig { k: 1, seed: 4, ..Default::default() };
        let r = optimize_g(&pairs(2, VariationClass::Scaled), Variant::Wdtw, &cfg).unwrap();
        assert_eq!(r.g, cfg.candidates()[0]);
        assert_eq!(r.samples.len(), 1);
    }

    #[test]
    fn degenerate_objective_picks_smallest_g() {
        let cfg = WeightSearchConfig { k: 12, seed: 9, ..Default::default() };
        let r = optimize_g(&identical(3), Variant::Wddtw, &cfg).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.g, cfg.candidates().into_iter().fold(f64::INFINITY, f64::min));
    }

    #[test]
    fn argmin_holds_on_replay() {
        let batch = pairs(4, VariationClass::Scaled);
        for objective in [Objective::Adm, Objective::Adt] {
            let cfg = WeightSearchConfig { k: 10, seed: 2, objective, ..Default::default() };
            let r = optimize_g(&batch, Variant::Wdtw, &cfg).unwrap();
            for &(g, v) in &r.samples {
                let replay = evaluate(&batch, &AlignSpec::weighted(Variant::Wdtw, g), objective).unwrap();
                assert_eq!(replay, v);
                assert!(r.value <= v);
            }
        }
    }

    #[test]
    fn more_samples_never_hurt() {
        let batch = pairs(3, VariationClass::Mrgp);
        let small = WeightSearchConfig { k: 5, seed: 11, ..Default::default() };
        let large = WeightSearchConfig { k: 10, ..small.clone() };
        assert_eq!(small.candidates()[..], large.candidates()[..5]);
        let a = optimize_g(&batch, Variant::Wdtw, &small).unwrap();
        let b = optimize_g(&batch, Variant::Wdtw, &large).unwrap();
        assert!(b.value <= a.value);
    }

    #[test]
    fn deterministic_given_seed() {
        let batch = pairs(3, VariationClass::ScaledRgp);
        let cfg = WeightSearchConfig { k: 8, seed: 5, ..Default::default() };
        assert_eq!(
            optimize_g(&batch, Variant::Wddtw, &cfg).unwrap(),
            optimize_g(&batch, Variant::Wddtw, &cfg).unwrap()
        );
    }

    #[test]
    fn parameter_errors() {
        let cfg = WeightSearchConfig::default();
        assert!(matches!(optimize_g(&[], Variant::Wdtw, &cfg), Err(Error::Parameter(_))));
        let batch = pairs(1, VariationClass::Rgp);
        assert!(optimize_g(&batch, Variant::Dtw, &cfg).is_err());
        assert!(optimize_g(&batch, Variant::Wdtw, &WeightSearchConfig { k: 0, ..cfg.clone() }).is_err());
        assert!(optimize_g(&batch, Variant::Wdtw, &WeightSearchConfig { g_range: (0.0, 1.0), ..cfg }).is_err());
    }

    #[test]
    fn unlabelled_search_matches_the_labelled_one_on_adm() {
        let batch = pairs(3, VariationClass::Rgp);
        let plain: Vec<_> = batch.iter().map(|p| (p.reference.clone(), p.target.clone())).collect();
        let cfg = WeightSearchConfig { k: 6, seed: 3, ..Default::default() };
        let a = optimize_g(&batch, Variant::Wddtw, &cfg).unwrap();
        let b = optimize_g_unlabelled(&plain, Variant::Wddtw, &cfg).unwrap();
        assert_eq!(a, b);
        let adt = WeightSearchConfig { objective: Objective::Adt, ..cfg };
        assert!(optimize_g_unlabelled(&plain, Variant::Wddtw, &adt).is_err());
    }

    #[test]
    fn report_json_layout() {
        let r = WeightSearchResult {
            variant: Variant::Wdtw,
            g: 0.21,
            objective: Objective::Adm,
            value: 3.5,
            k: 100,
            seed: 7,
            samples: vec![(0.21, 3.5)],
        };
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"variant":"wdtw","g":0.21,"objective":"adm","value":3.5,"K":100,"seed":7}"#
        );
    }
}
