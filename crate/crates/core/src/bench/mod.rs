//! Experiment harness: batches of synthetic pairs per variation class,
//! aligned with every variant, scored by ADM and ADT, and aggregated.
//!
//! Every random draw is derived from the suite seed and the position of the
//! pair within the suite, so single rows can be regenerated in isolation.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{self, Classification, DatasetConfig};
use crate::dtw::{AlignSpec, BandConstraint, Variant, WeightParams};
use crate::error::{Error, Result};
use crate::metrics::{self, GroundTruthMode, MetricRow};
use crate::seed;
use crate::series::{fmt_f64, Series};
use crate::synthesis::{
    compose_variation, generate_signal, GeneratorSpec, SignalPair, VariationClass, VariationParams,
};
use crate::weightopt::{self, Objective, WeightSearchConfig, WeightSearchResult};

/// Band applied to every alignment of a suite.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum BandPolicy {
    #[default]
    None,
    /// Per pair, the largest distance of the true path from the diagonal,
    /// rounded up, plus `slack`.
    Oracle {
        slack: usize,
    },
    Fixed {
        width: usize,
    },
}

impl BandPolicy {
    pub fn band_for(&self, pair: &SignalPair) -> Option<BandConstraint> {
        match *self {
            BandPolicy::None => None,
            BandPolicy::Oracle { slack } => {
                Some(BandConstraint::new(pair.ground_truth.max_diagonal_offset().ceil() as usize + slack))
            }
            BandPolicy::Fixed { width } => Some(BandConstraint::new(width)),
        }
    }
}

/// Where a weighted variant's `g` came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Unweighted variant.
    None,
    /// The configured fixed `g`.
    Fixed,
    /// Monte-Carlo optimised on the batch.
    Optimized,
}

impl Weighting {
    pub fn as_str(self) -> &'static str {
        match self {
            Weighting::None => "none",
            Weighting::Fixed => "fixed",
            Weighting::Optimized => "optimized",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub pairs: usize,
    pub classes: Vec<VariationClass>,
    pub variants: Vec<Variant>,
    /// Search for the optimised `g`; its seed is derived per batch.
    pub weight_search: WeightSearchConfig,
    /// Also run weighted variants with this unoptimised `g`.
    pub fixed_g: Option<f64>,
    pub band: BandPolicy,
    pub generator: GeneratorSpec,
    pub variation: VariationParams,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            pairs: 50,
            classes: VariationClass::ALL.to_vec(),
            variants: Variant::ALL.to_vec(),
            weight_search: WeightSearchConfig::default(),
            fixed_g: Some(0.4),
            band: BandPolicy::None,
            generator: GeneratorSpec::default(),
            variation: VariationParams::default(),
            seed: 0,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pairs == 0 {
            return Err(Error::param("a suite needs at least one pair per class"));
        }
        if self.classes.is_empty() || self.variants.is_empty() {
            return Err(Error::param("a suite needs at least one class and one variant"));
        }
        self.weight_search.validate()?;
        if let Some(g) = self.fixed_g {
            WeightParams::new(g).validate()?;
        }
        self.generator.validate()?;
        self.variation.validate()
    }
}

fn class_index(class: VariationClass) -> u64 {
    VariationClass::ALL.iter().position(|&c| c == class).expect("listed") as u64
}

fn variant_index(variant: Variant) -> u64 {
    Variant::ALL.iter().position(|&v| v == variant).expect("listed") as u64
}

/// Seeds for pair `k` of `class`: the reference generator and the deformation plan.
pub fn pair_seeds(suite_seed: u64, class: VariationClass, k: usize) -> (u64, u64) {
    let base = [class_index(class), k as u64];
    (seed::derive(suite_seed, &[base[0], base[1], 0]), seed::derive(suite_seed, &[base[0], base[1], 1]))
}

/// Regenerates pair `k` of `class` exactly as the suite does.
pub fn make_pair(cfg: &SuiteConfig, class: VariationClass, k: usize) -> Result<SignalPair> {
    let (ref_seed, plan_seed) = pair_seeds(cfg.seed, class, k);
    let reference = generate_signal(&GeneratorSpec { seed: ref_seed, ..cfg.generator.clone() })?;
    compose_variation(&reference.named(format!("{class}-{k}")), class, &cfg.variation, plan_seed)
}

pub fn make_batch(cfg: &SuiteConfig, class: VariationClass) -> Result<Vec<SignalPair>> {
    (0..cfg.pairs).into_par_iter().map(|k| make_pair(cfg, class, k)).collect()
}

/// One aligned pair under one method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub pair_id: String,
    pub variation: VariationClass,
    pub variant: Variant,
    pub weighting: Weighting,
    pub g: Option<f64>,
    pub band: Option<usize>,
    pub band_widened: bool,
    pub adm: f64,
    pub adt: f64,
    pub reference_seed: u64,
    pub plan_seed: u64,
}

impl PairRow {
    pub fn metric_row(&self) -> MetricRow {
        MetricRow {
            pair_id: self.pair_id.clone(),
            variation: self.variation.to_string(),
            variant: self.variant.to_string(),
            g: self.g,
            band: self.band,
            adm: self.adm,
            adt: Some(self.adt),
            aadft: None,
        }
    }
}

/// Aggregates for one (variation, variant, weighting) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub variation: VariationClass,
    pub variant: Variant,
    pub weighting: Weighting,
    pub g: Option<f64>,
    pub banded: bool,
    pub pairs: usize,
    pub mean_adm: f64,
    pub median_adm: f64,
    pub mean_adt: f64,
    pub median_adt: f64,
}

/// Weight search performed for one batch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchSearch {
    pub variation: VariationClass,
    #[serde(flatten)]
    pub result: WeightSearchResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: SuiteConfig,
    pub weight_searches: Vec<BatchSearch>,
    pub aggregates: Vec<Aggregate>,
    pub rows: Vec<PairRow>,
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

/// Groups rows by (variation, variant, weighting, banded) in first-seen order.
pub fn aggregate(rows: &[PairRow]) -> Vec<Aggregate> {
    let mut keys: Vec<(VariationClass, Variant, Weighting, bool)> = Vec::new();
    for r in rows {
        let key = (r.variation, r.variant, r.weighting, r.band.is_some());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(variation, variant, weighting, banded)| {
            let group: Vec<&PairRow> = rows
                .iter()
                .filter(|r| {
                    (r.variation, r.variant, r.weighting, r.band.is_some()) == (variation, variant, weighting, banded)
                })
                .collect();
            let adm: Vec<f64> = group.iter().map(|r| r.adm).collect();
            let adt: Vec<f64> = group.iter().map(|r| r.adt).collect();
            Aggregate {
                variation,
                variant,
                weighting,
                g: group[0].g,
                banded,
                pairs: group.len(),
                mean_adm: mean(&adm),
                median_adm: median(&adm),
                mean_adt: mean(&adt),
                median_adt: median(&adt),
            }
        })
        .collect()
}

/// Alignment settings of one method within a batch.
#[derive(Clone, Copy, Debug)]
struct Method {
    variant: Variant,
    weighting: Weighting,
    g: Option<f64>,
}

impl Method {
    fn spec(&self) -> AlignSpec {
        match self.g {
            Some(g) => AlignSpec::weighted(self.variant, g),
            None => AlignSpec::new(self.variant),
        }
    }
}

/// Optimises `g` where needed and lists the methods to run on a batch.
fn methods_for(
    cfg: &SuiteConfig,
    class: VariationClass,
    batch: &[SignalPair],
) -> Result<(Vec<Method>, Vec<BatchSearch>)> {
    let mut methods = Vec::new();
    let mut searches = Vec::new();
    for &variant in &cfg.variants {
        if !variant.is_weighted() {
            methods.push(Method { variant, weighting: Weighting::None, g: None });
            continue;
        }
        let search_cfg = WeightSearchConfig {
            seed: seed::derive(cfg.seed, &[class_index(class), 1000 + variant_index(variant)]),
            ..cfg.weight_search.clone()
        };
        let result = weightopt::optimize_g(batch, variant, &search_cfg)?;
        methods.push(Method { variant, weighting: Weighting::Optimized, g: Some(result.g) });
        searches.push(BatchSearch { variation: class, result });
        if let Some(g) = cfg.fixed_g {
            methods.push(Method { variant, weighting: Weighting::Fixed, g: Some(g) });
        }
    }
    Ok((methods, searches))
}

fn score(
    cfg: &SuiteConfig,
    class: VariationClass,
    k: usize,
    pair: &SignalPair,
    m: &Method,
    band: Option<BandConstraint>,
) -> Result<PairRow> {
    let al = m.spec().with_band(band).align(&pair.reference, &pair.target)?;
    let (reference_seed, plan_seed) = pair_seeds(cfg.seed, class, k);
    Ok(PairRow {
        pair_id: format!("{class}-{k}"),
        variation: class,
        variant: m.variant,
        weighting: m.weighting,
        g: m.g,
        band: al.band,
        band_widened: al.band_widened,
        adm: metrics::adm(&al, &pair.reference, &pair.target)?,
        adt: metrics::adt(&al, &pair.ground_truth, GroundTruthMode::Fractional)?,
        reference_seed,
        plan_seed,
    })
}

/// Rows for every (method, band) combination on a batch, method-major.
fn score_batch(
    cfg: &SuiteConfig,
    class: VariationClass,
    batch: &[SignalPair],
    methods: &[Method],
    bands: &[BandPolicy],
) -> Result<Vec<PairRow>> {
    let jobs: Vec<(&Method, &BandPolicy, usize)> =
        methods.iter().flat_map(|m| bands.iter().flat_map(move |b| (0..batch.len()).map(move |k| (m, b, k)))).collect();
    jobs.par_iter().map(|&(m, b, k)| score(cfg, class, k, &batch[k], m, b.band_for(&batch[k]))).collect()
}

fn run_suite(cfg: &SuiteConfig, bands: &[BandPolicy]) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut weight_searches = Vec::new();
    for &class in &cfg.classes {
        let batch = make_batch(cfg, class)?;
        let (methods, searches) = methods_for(cfg, class, &batch)?;
        rows.extend(score_batch(cfg, class, &batch, &methods, bands)?);
        weight_searches.extend(searches);
    }
    Ok(ExperimentReport { config: cfg.clone(), weight_searches, aggregates: aggregate(&rows), rows })
}

/// Aligns every pair of every class with every method under `cfg.band`.
pub fn run_alignment_suite(cfg: &SuiteConfig) -> Result<ExperimentReport> {
    run_suite(cfg, &[cfg.band])
}

/// Banded minus unbanded means for one method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowingDelta {
    pub variation: VariationClass,
    pub variant: Variant,
    pub weighting: Weighting,
    pub mean_adm_delta: f64,
    pub mean_adt_delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowingReport {
    pub report: ExperimentReport,
    pub deltas: Vec<WindowingDelta>,
}

/// Runs every method with and without the configured band on the same pairs.
pub fn run_windowing_suite(cfg: &SuiteConfig) -> Result<WindowingReport> {
    if cfg.band == BandPolicy::None {
        return Err(Error::param("the windowing suite needs a band policy"));
    }
    let report = run_suite(cfg, &[BandPolicy::None, cfg.band])?;
    let deltas = report
        .aggregates
        .iter()
        .filter(|a| a.banded)
        .filter_map(|b| {
            let u = report.aggregates.iter().find(|u| {
                !u.banded && (u.variation, u.variant, u.weighting) == (b.variation, b.variant, b.weighting)
            })?;
            Some(WindowingDelta {
                variation: b.variation,
                variant: b.variant,
                weighting: b.weighting,
                mean_adm_delta: b.mean_adm - u.mean_adm,
                mean_adt_delta: b.mean_adt - u.mean_adt,
            })
        })
        .collect();
    Ok(WindowingReport { report, deltas })
}

/// How weighted variants get their `g` in the classification suite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum ClassifierWeights {
    Fixed {
        g: f64,
    },
    /// ADM-optimised on pairs of same-class training samples.
    TrainAdm {
        pairs_per_class: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassificationSuiteConfig {
    pub dataset: DatasetConfig,
    pub variants: Vec<Variant>,
    pub weights: ClassifierWeights,
    pub weight_search: WeightSearchConfig,
}

impl Default for ClassificationSuiteConfig {
    fn default() -> Self {
        ClassificationSuiteConfig {
            dataset: DatasetConfig::default(),
            variants: Variant::ALL.to_vec(),
            weights: ClassifierWeights::TrainAdm { pairs_per_class: 5 },
            weight_search: WeightSearchConfig { k: 20, ..Default::default() },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantAccuracy {
    pub variant: Variant,
    pub g: Option<f64>,
    pub accuracy: f64,
    pub classification: Classification,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub config: ClassificationSuiteConfig,
    pub results: Vec<VariantAccuracy>,
}

impl ClassificationReport {
    pub fn accuracy(&self, variant: Variant) -> Option<f64> {
        self.results.iter().find(|r| r.variant == variant).map(|r| r.accuracy)
    }
}

/// Consecutive same-class training samples, up to `per_class` pairs per class.
fn train_pairs(ds: &classify::Dataset, per_class: usize) -> Vec<(Series, Series)> {
    let mut out = Vec::new();
    for class in 0..ds.n_classes {
        let members: Vec<usize> = ds.train.iter().copied().filter(|&k| ds.samples[k].label == class).collect();
        for w in members.windows(2).take(per_class) {
            out.push((ds.samples[w[0]].series.clone(), ds.samples[w[1]].series.clone()));
        }
    }
    out
}

/// Builds the dataset and classifies its test split with every variant.
pub fn run_classification_suite(cfg: &ClassificationSuiteConfig) -> Result<ClassificationReport> {
    if cfg.weight_search.objective != Objective::Adm {
        return Err(Error::param("classification weights can only be optimised by ADM"));
    }
    let ds = classify::make_dataset(&cfg.dataset)?;
    let results = cfg
        .variants
        .iter()
        .map(|&variant| {
            let g = match (variant.is_weighted(), cfg.weights) {
                (false, _) => None,
                (true, ClassifierWeights::Fixed { g }) => Some(g),
                (true, ClassifierWeights::TrainAdm { pairs_per_class }) => {
                    let pairs = train_pairs(&ds, pairs_per_class);
                    let search = WeightSearchConfig {
                        seed: seed::derive(cfg.dataset.seed, &[3, variant_index(variant)]),
                        ..cfg.weight_search.clone()
                    };
                    Some(weightopt::optimize_g_unlabelled(&pairs, variant, &search)?.g)
                }
            };
            let spec = match g {
                Some(g) => AlignSpec::weighted(variant, g),
                None => AlignSpec::new(variant),
            };
            let classification = classify::knn_classify(&ds, &spec)?;
            Ok(VariantAccuracy { variant, g, accuracy: classification.accuracy, classification })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassificationReport { config: cfg.clone(), results })
}

/// Writes raw rows: the metric columns followed by weighting, band widening,
/// and the seeds that regenerate the pair.
pub fn write_rows_csv<W: Write>(w: W, rows: &[PairRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        "pair_id",
        "variation",
        "variant",
        "g",
        "band",
        "adm",
        "adt",
        "aadft",
        "weighting",
        "band_widened",
        "reference_seed",
        "plan_seed",
    ])?;
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    for r in rows {
        wtr.write_record([
            r.pair_id.clone(),
            r.variation.to_string(),
            r.variant.to_string(),
            opt(r.g),
            r.band.map(|b| b.to_string()).unwrap_or_default(),
            fmt_f64(r.adm),
            fmt_f64(r.adt),
            String::new(),
            r.weighting.as_str().to_string(),
            r.band_widened.to_string(),
            r.reference_seed.to_string(),
            r.plan_seed.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Whitespace-separated table, one line per variation and a mean ADM and
/// ADT column pair per method, for bar charts.
pub fn write_gnuplot<W: Write>(mut w: W, aggregates: &[Aggregate]) -> Result<()> {
    let mut methods: Vec<(Variant, Weighting, bool)> = Vec::new();
    let mut classes: Vec<VariationClass> = Vec::new();
    for a in aggregates {
        if !methods.contains(&(a.variant, a.weighting, a.banded)) {
            methods.push((a.variant, a.weighting, a.banded));
        }
        if !classes.contains(&a.variation) {
            classes.push(a.variation);
        }
    }
    let label = |&(v, wt, banded): &(Variant, Weighting, bool)| {
        let mut s = v.to_string();
        if wt != Weighting::None {
            s = format!("{s}_{}", wt.as_str());
        }
        if banded {
            s.push_str("_banded");
        }
        s
    };
    write!(w, "# variation")?;
    for m in &methods {
        write!(w, " {0}_adm {0}_adt", label(m))?;
    }
    writeln!(w)?;
    for class in classes {
        write!(w, "{class}")?;
        for m in &methods {
            match aggregates.iter().find(|a| a.variation == class && (a.variant, a.weighting, a.banded) == *m) {
                Some(a) => write!(w, " {} {}", fmt_f64(a.mean_adm), fmt_f64(a.mean_adt))?,
                None => write!(w, " NaN NaN")?,
            }
        }
        writeln!(w)?;
    }
    Ok(())
}
