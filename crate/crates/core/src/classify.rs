//! Synthetic classification datasets and 1-nearest-neighbour classification.
//!
//! Each class has one generated parent. An offspring concatenates a prefix
//! of every parent, in parent order, with lengths proportional to a random
//! proportions vector, and then receives a few random deformations. Its label
//! is the parent with the largest proportion.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dtw::AlignSpec;
use crate::error::{Error, Result};
use crate::seed;
use crate::series::{fmt_f64, Series};
use crate::synthesis::{
    apply_step, draw_peak, draw_scaling, generate_signal, DeformationPlan, GeneratorSpec, VariationParams,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub series: Series,
    pub label: usize,
    pub proportions: Vec<f64>,
    pub plan: DeformationPlan,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub n_classes: usize,
    pub parents: Vec<Series>,
    pub samples: Vec<Sample>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

/// Index of the first maximum.
pub fn argmax(v: &[f64]) -> usize {
    v.iter().enumerate().fold((0, f64::NEG_INFINITY), |best, (i, &x)| if x > best.1 { (i, x) } else { best }).0
}

impl Dataset {
    /// Assembles a dataset from existing pieces, checking its invariants.
    pub fn from_parts(
        parents: Vec<Series>,
        samples: Vec<Sample>,
        train: Vec<usize>,
        test: Vec<usize>,
        seed: u64,
    ) -> Result<Self> {
        let ds = Dataset { n_classes: parents.len(), parents, samples, train, test, seed };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.parents.len() != self.n_classes {
            return Err(Error::param("one parent per class is required"));
        }
        for (k, s) in self.samples.iter().enumerate() {
            if s.proportions.len() != self.n_classes {
                return Err(Error::param(format!("sample {k} has {} proportions", s.proportions.len())));
            }
            if (s.proportions.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::param(format!("proportions of sample {k} do not sum to 1")));
            }
            if s.label != argmax(&s.proportions) {
                return Err(Error::param(format!("sample {k} is not labelled by its largest proportion")));
            }
        }
        if let Some(&k) = self.train.iter().chain(&self.test).find(|&&k| k >= self.samples.len()) {
            return Err(Error::param(format!("split refers to missing sample {k}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetConfig {
    pub n_classes: usize,
    /// Offspring per class; a single entry applies to every class.
    pub per_class: Vec<usize>,
    pub generator: GeneratorSpec,
    /// Inclusive range for the number of deformations per offspring.
    pub deform_ops: (usize, usize),
    pub variation: VariationParams,
    pub seed: u64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            n_classes: 4,
            per_class: vec![40],
            generator: GeneratorSpec { length: 250, ..Default::default() },
            deform_ops: (1, 3),
            variation: VariationParams::default(),
            seed: 0,
        }
    }
}

impl DatasetConfig {
    fn counts(&self) -> Result<Vec<usize>> {
        if self.n_classes < 2 {
            return Err(Error::param(format!("a dataset needs at least 2 classes, got {}", self.n_classes)));
        }
        let counts = match self.per_class.as_slice() {
            [n] => vec![*n; self.n_classes],
            v if v.len() == self.n_classes => v.to_vec(),
            v => {
                return Err(Error::param(format!("{} per-class counts given for {} classes", v.len(), self.n_classes)))
            }
        };
        if counts.contains(&0) {
            return Err(Error::param("every class needs at least one sample"));
        }
        if self.deform_ops.0 > self.deform_ops.1 {
            return Err(Error::param("deformation count range is reversed"));
        }
        Ok(counts)
    }
}

/// Splits `len` samples into segments proportional to `proportions`
/// (largest remainder, earlier parents first on equal remainders).
pub fn segment_lengths(proportions: &[f64], len: usize) -> Vec<usize> {
    let exact: Vec<f64> = proportions.iter().map(|p| p * len as f64).collect();
    let mut out: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..exact.len()).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let missing = len.saturating_sub(out.iter().sum());
    for &k in order.iter().take(missing) {
        out[k] += 1;
    }
    out
}

/// Concatenated parent prefixes for the given proportions.
pub fn blend(parents: &[Series], proportions: &[f64]) -> Result<Series> {
    let len = parents[0].len();
    let mut values = Vec::with_capacity(len);
    for (parent, take) in parents.iter().zip(segment_lengths(proportions, len)) {
        values.extend_from_slice(&parent.values()[..take]);
    }
    Series::new(values)
}

fn offspring(parents: &[Series], class: usize, cfg: &DatasetConfig, rng: &mut seed::Rng) -> Result<Sample> {
    let mut proportions: Vec<f64> = (0..parents.len()).map(|_| rng.gen::<f64>()).collect();
    // Draw for a fixed class: hand it the largest share.
    let top = argmax(&proportions);
    proportions.swap(top, class);
    let total: f64 = proportions.iter().sum();
    proportions.iter_mut().for_each(|p| *p /= total);

    let mut series = blend(parents, &proportions)?;
    let count = rng.gen_range(cfg.deform_ops.0..=cfg.deform_ops.1);
    let mut steps = Vec::with_capacity(count);
    for _ in 0..count {
        let step = match rng.gen_range(0..3) {
            0 => draw_scaling(rng, series.len(), &cfg.variation, false)?,
            1 => draw_scaling(rng, series.len(), &cfg.variation, true)?,
            _ => draw_peak(rng, &series, &cfg.variation)?,
        };
        series = apply_step(&series, &step)?.0;
        steps.push(step);
    }
    Ok(Sample { label: argmax(&proportions), series, proportions, plan: DeformationPlan { steps, seed: 0 } })
}

pub fn make_dataset(cfg: &DatasetConfig) -> Result<Dataset> {
    let counts = cfg.counts()?;
    cfg.generator.validate()?;
    cfg.variation.validate()?;
    let parents = (0..cfg.n_classes)
        .map(|c| {
            let spec = GeneratorSpec { seed: seed::derive(cfg.seed, &[0, c as u64]), ..cfg.generator.clone() };
            generate_signal(&spec).map(|s| s.named(format!("parent-{c}")))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut samples = Vec::new();
    for (class, &count) in counts.iter().enumerate() {
        for k in 0..count {
            let sample_seed = seed::derive(cfg.seed, &[1, class as u64, k as u64]);
            let mut sample = offspring(&parents, class, cfg, &mut seed::rng(sample_seed))?;
            sample.plan.seed = sample_seed;
            samples.push(sample);
        }
    }

    let mut rng = seed::rng(seed::derive(cfg.seed, &[2]));
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for class in 0..cfg.n_classes {
        let mut members: Vec<usize> = (0..samples.len()).filter(|&k| samples[k].label == class).collect();
        members.shuffle(&mut rng);
        let half = members.len().div_ceil(2);
        train.extend_from_slice(&members[..half]);
        test.extend_from_slice(&members[half..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Dataset::from_parts(parents, samples, train, test, cfg.seed)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub sample_id: usize,
    #[serde(rename = "true")]
    pub true_label: usize,
    pub predicted: usize,
    pub neighbor_id: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub accuracy: f64,
    pub predictions: Vec<Prediction>,
}

/// Accuracy recomputed from prediction rows.
pub fn accuracy(predictions: &[Prediction]) -> f64 {
    let correct = predictions.iter().filter(|p| p.predicted == p.true_label).count();
    correct as f64 / predictions.len() as f64
}

/// Labels every test sample by its cheapest train sample under `spec`;
/// ties go to the earlier train sample.
pub fn knn_classify(ds: &Dataset, spec: &AlignSpec) -> Result<Classification> {
    classify_against(ds, &ds.train, &ds.test, spec)
}

/// 1-NN of `queries` against `references`, both indices into `ds.samples`.
pub fn classify_against(
    ds: &Dataset,
    references: &[usize],
    queries: &[usize],
    spec: &AlignSpec,
) -> Result<Classification> {
    if references.is_empty() || queries.is_empty() {
        return Err(Error::param("classification needs non-empty train and test sets"));
    }
    spec.validate()?;
    let features: Vec<Vec<f64>> = ds.samples.iter().map(|s| spec.features(s.series.values())).collect();
    let predictions = queries
        .par_iter()
        .map(|&q| {
            let mut best = (references[0], f64::INFINITY);
            for &r in references {
                let d = spec.cost_features(&features[q], &features[r])?;
                if d < best.1 {
                    best = (r, d);
                }
            }
            Ok(Prediction {
                sample_id: q,
                true_label: ds.samples[q].label,
                predicted: ds.samples[best.0].label,
                neighbor_id: best.0,
                distance: best.1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Classification { accuracy: accuracy(&predictions), predictions })
}

/// Writes `sample_id,true,predicted,neighbor_id,distance`.
pub fn write_predictions_csv<W: Write>(w: W, predictions: &[Prediction]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["sample_id", "true", "predicted", "neighbor_id", "distance"])?;
    for p in predictions {
        wtr.write_record([
            p.sample_id.to_string(),
            p.true_label.to_string(),
            p.predicted.to_string(),
            p.neighbor_id.to_string(),
            fmt_f64(p.distance),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::dtw::Variant;
    use crate::synthesis::DeformationStep;

    fn small(seed: u64) -> DatasetConfig {
        DatasetConfig {
            n_classes: 3,
            per_class: vec![6],
            generator: GeneratorSpec { length: 80, p1: 5, p2: 20, ..Default::default() },
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn labels_and_split_are_consistent() {
        let ds = make_dataset(&small(1)).unwrap();
        assert_eq!(ds.samples.len(), 18);
        for class in 0..3 {
            assert_eq!(ds.samples.iter().filter(|s| s.label == class).count(), 6);
            assert_eq!(ds.train.iter().filter(|&&k| ds.samples[k].label == class).count(), 3);
        }
        let mut all: Vec<usize> = ds.train.iter().chain(&ds.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..18).collect::<Vec<_>>());
        ds.validate().unwrap();
    }

    #[test]
    fn offspring_length_moves_only_by_scaling() {
        let ds = make_dataset(&DatasetConfig { deform_ops: (2, 4), ..small(2) }).unwrap();
        for s in &ds.samples {
            let bound: isize = s
                .plan
                .steps
                .iter()
                .map(|st| match *st {
                    DeformationStep::ScaleWindow { w0, w1, s, length_preserving: false } => {
                        ((w1 - w0) as f64 * (s - 1.0)).round().abs() as isize
                    }
                    _ => 0,
                })
                .sum();
            assert!((s.series.len() as isize - 80).abs() <= bound);
        }
    }

    #[test]
    fn pure_parent_offspring_is_a_copy_of_that_parent() {
        let parents: Vec<Series> = (0..3)
            .map(|c| {
                generate_signal(&GeneratorSpec { length: 50, p1: 5, p2: 15, seed: c, ..Default::default() }).unwrap()
            })
            .collect();
        let blended = blend(&parents, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(blended.values(), parents[0].values());
        assert_eq!(argmax(&[1.0, 0.0, 0.0]), 0);
        assert_eq!(segment_lengths(&[0.5, 0.25, 0.25], 10), vec![5, 3, 2]);
        assert_eq!(segment_lengths(&[0.2, 0.3, 0.5], 7).iter().sum::<usize>(), 7);
    }

    #[test]
    fn identical_test_sample_takes_its_twins_label() {
        let mut ds = make_dataset(&small(3)).unwrap();
        let (q, r) = (ds.test[0], ds.train[4]);
        ds.samples[q] = ds.samples[r].clone();
        let out = knn_classify(&ds, &AlignSpec::new(Variant::Dtw)).unwrap();
        let row = out.predictions.iter().find(|p| p.sample_id == q).unwrap();
        assert_eq!(row.distance, 0.0);
        assert_eq!(row.predicted, ds.samples[r].label);
    }

    #[test]
    fn separated_magnitudes_classify_perfectly() {
        let mk = |lo: f64, seed: u64| {
            generate_signal(&GeneratorSpec {
                length: 40,
                min: lo,
                max: lo + 10.0,
                p1: 4,
                p2: 10,
                seed,
                ..Default::default()
            })
            .unwrap()
        };
        let parents = vec![mk(0.0, 0), mk(100.0, 1)];
        let samples: Vec<Sample> = (0..12)
            .map(|k| {
                let label = k % 2;
                let mut proportions = vec![0.0; 2];
                proportions[label] = 1.0;
                let series = mk(if label == 0 { 0.0 } else { 100.0 }, 10 + k as u64);
                Sample { series, label, proportions, plan: DeformationPlan { steps: vec![], seed: 0 } }
            })
            .collect();
        let ds = Dataset::from_parts(parents, samples, (0..6).collect(), (6..12).collect(), 0).unwrap();
        for v in Variant::ALL {
            let spec = if v.is_weighted() { AlignSpec::weighted(v, 0.2) } else { AlignSpec::new(v) };
            if !v.uses_derivative() {
                assert_eq!(knn_classify(&ds, &spec).unwrap().accuracy, 1.0);
            }
        }
    }

    #[test]
    fn single_class_is_always_right() {
        let parent = generate_signal(&GeneratorSpec { length: 30, p1: 3, p2: 8, ..Default::default() }).unwrap();
        let samples = (0..4)
            .map(|k| Sample {
                series: generate_signal(&GeneratorSpec { length: 30, p1: 3, p2: 8, seed: k, ..Default::default() })
                    .unwrap(),
                label: 0,
                proportions: vec![1.0],
                plan: DeformationPlan { steps: vec![], seed: 0 },
            })
            .collect();
        let ds = Dataset::from_parts(vec![parent], samples, vec![0, 1], vec![2, 3], 0).unwrap();
        assert_eq!(knn_classify(&ds, &AlignSpec::new(Variant::Ddtw)).unwrap().accuracy, 1.0);
    }

    #[test]
    fn train_set_classifies_itself() {
        let ds = make_dataset(&small(4)).unwrap();
        let out = classify_against(&ds, &ds.train, &ds.train, &AlignSpec::weighted(Variant::Wdtw, 0.1)).unwrap();
        assert_eq!(out.accuracy, 1.0);
    }

    #[test]
    fn classification_is_deterministic_and_recomputable() {
        let ds = make_dataset(&small(5)).unwrap();
        assert_eq!(ds, make_dataset(&small(5)).unwrap());
        let spec = AlignSpec::new(Variant::Dtw);
        let a = knn_classify(&ds, &spec).unwrap();
        assert_eq!(a, knn_classify(&ds, &spec).unwrap());
        assert_eq!(a.accuracy, accuracy(&a.predictions));
    }

    #[test]
    fn parameter_errors() {
        assert!(make_dataset(&DatasetConfig { n_classes: 1, ..small(0) }).is_err());
        assert!(make_dataset(&DatasetConfig { per_class: vec![0], ..small(0) }).is_err());
        assert!(make_dataset(&DatasetConfig { per_class: vec![1, 2], ..small(0) }).is_err());
        let mut ds = make_dataset(&small(0)).unwrap();
        ds.test.clear();
        assert!(knn_classify(&ds, &AlignSpec::new(Variant::Dtw)).is_err());
    }

    #[test]
    fn predictions_csv_layout() {
        let rows = [Prediction { sample_id: 3, true_label: 1, predicted: 0, neighbor_id: 7, distance: 2.5 }];
        let mut buf = Vec::new();
        write_predictions_csv(&mut buf, &rows).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "sample_id,true,predicted,neighbor_id,distance\n3,1,0,7,2.5\n");
    }

    proptest! {
        #[test]
        fn segments_cover_the_parent_length(raw in prop::collection::vec(0.01f64..1.0, 2..6), len in 2usize..400) {
            let total: f64 = raw.iter().sum();
            let p: Vec<f64> = raw.iter().map(|r| r / total).collect();
            let seg = segment_lengths(&p, len);
            prop_assert_eq!(seg.iter().sum::<usize>(), len);
            for (s, q) in seg.iter().zip(&p) {
                prop_assert!((*s as f64 - q * len as f64).abs() < 1.0);
            }
        }
    }
}
