//! Command-line frontend. Every subcommand parses its inputs, calls the
//! library once, and writes the result as JSON (default) or CSV.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::{self, BandPolicy, ClassificationSuiteConfig, SuiteConfig};
use crate::classify::{self, Dataset, DatasetConfig};
use crate::dtw::{AlignSpec, BandConstraint, Variant, WeightParams};
use crate::error::{Error, Result};
use crate::fitter::{self, SAParams};
use crate::metrics::{self, EventMarks, GroundTruthMode, MetricRow};
use crate::search::{self, SearchConfig, WindowDistance};
use crate::series::{fmt_f64, Series};
use crate::synthesis::{
    compose_variation, generate_signal, GeneratorSpec, PeakProfile, SignalPair, SignalPairFile, VariationClass,
    VariationParams,
};
use crate::weightopt::{self, Objective, WeightSearchConfig};

#[derive(Debug, Parser)]
#[command(name = "warpbench", version, about = "Synthetic benchmarks for dynamic time warping variants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file (default: standard output).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SeedArg {
    /// Seed for every random draw.
    #[arg(long, env = "WARPBENCH_SEED")]
    pub seed: Option<u64>,
}

impl SeedArg {
    fn require(&self) -> Result<u64> {
        self.seed.ok_or_else(|| Error::param("a seed is required: pass --seed or set WARPBENCH_SEED"))
    }
}

#[derive(Debug, Args)]
pub struct WeightArgs {
    /// Weight steepness for wdtw/wddtw.
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub w_max: f64,
    /// Weight crossover in samples (default: half the longer series).
    #[arg(long)]
    pub m_c: Option<f64>,
}

impl WeightArgs {
    fn spec(&self, variant: Variant) -> Result<AlignSpec> {
        let weights = match (variant.is_weighted(), self.g) {
            (true, Some(g)) => Some(WeightParams { g, w_max: self.w_max, m_c: self.m_c }),
            (true, None) => return Err(Error::param(format!("{variant} needs --g"))),
            (false, Some(_)) => return Err(Error::param(format!("{variant} takes no --g"))),
            (false, None) => None,
        };
        let spec = AlignSpec { variant, weights, band: None };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a reference signal.
    Generate {
        #[arg(long, default_value_t = 500)]
        length: usize,
        #[arg(long, default_value_t = 0.0)]
        min: f64,
        #[arg(long, default_value_t = 100.0)]
        max: f64,
        /// Smallest spacing between successive peaks/valleys.
        #[arg(long, default_value_t = 10)]
        p1: usize,
        /// Largest spacing between successive peaks/valleys.
        #[arg(long, default_value_t = 50)]
        p2: usize,
        /// Noise amplitude as a fraction of max - min.
        #[arg(long, default_value_t = 0.2)]
        noise: f64,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        out: Output,
    },
    /// Deform a reference into a signal pair with known ground truth.
    Deform {
        reference: PathBuf,
        /// scaled, scaled_same_size, rgp, mrgp, scaled_rgp, scaled_mrgp.
        #[arg(long)]
        class: VariationClass,
        /// JSON file of variation parameters (defaults otherwise).
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        profile: Option<PeakProfile>,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        out: Output,
    },
    /// Align two series and score the alignment.
    Align {
        /// Reference series, or a signal pair file when `target` is omitted.
        reference: PathBuf,
        target: Option<PathBuf>,
        #[arg(long, default_value = "dtw")]
        variant: Variant,
        #[command(flatten)]
        weights: WeightArgs,
        /// Band half-width around the diagonal.
        #[arg(long)]
        band: Option<usize>,
        /// Score ADT against rounded ground-truth positions.
        #[arg(long)]
        rounded: bool,
        /// Comma-separated reference event indices (AADFT).
        #[arg(long, value_delimiter = ',', requires = "target_marks")]
        reference_marks: Vec<usize>,
        /// Comma-separated true target event indices (AADFT).
        #[arg(long, value_delimiter = ',', requires = "reference_marks")]
        target_marks: Vec<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Fit a target with scaling and Gaussian peaks applied to a source.
    Fit {
        source: PathBuf,
        target: PathBuf,
        /// Allowed error in percent.
        #[arg(long, default_value_t = 1.0)]
        x: f64,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long, default_value_t = 0.95)]
        alpha: f64,
        #[arg(long, default_value_t = 200)]
        iterations: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        out: Output,
    },
    /// Monte-Carlo search for the weight steepness over signal pair files.
    OptimizeWeights {
        #[arg(required = true)]
        pairs: Vec<PathBuf>,
        #[arg(long, default_value = "wdtw")]
        variant: Variant,
        #[arg(short = 'K', long = "samples", default_value_t = 100)]
        k: usize,
        #[arg(long, default_value_t = 0.01)]
        g_min: f64,
        #[arg(long, default_value_t = 1.0)]
        g_max: f64,
        #[arg(long, default_value = "adm")]
        objective: Objective,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        out: Output,
    },
    /// Run an experiment suite.
    Bench {
        #[arg(value_enum)]
        suite: SuiteKind,
        /// JSON suite configuration (defaults otherwise).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        pairs: Option<usize>,
        /// Weight search samples.
        #[arg(short = 'K', long = "samples")]
        k: Option<usize>,
        /// Oracle band slack (windowing suite).
        #[arg(long, default_value_t = 2)]
        slack: usize,
        /// Directory for report.json, rows.csv and bars.dat; otherwise the
        /// report goes to standard output.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        out: Output,
    },
    /// Build (or load) a parent/offspring dataset and classify it with 1-NN.
    Classify {
        /// Existing dataset file; otherwise one is generated.
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Save the dataset used.
        #[arg(long)]
        save_dataset: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        classes: usize,
        #[arg(long, default_value_t = 40)]
        per_class: usize,
        #[arg(long, default_value_t = 250)]
        length: usize,
        #[arg(long, default_value = "dtw")]
        variant: Variant,
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        out: Output,
    },
    /// Sliding-window search of a reference curve over target curves.
    Search {
        /// Polylines (`line_id,x,y,z` CSV or JSON); the first is the reference.
        reference: PathBuf,
        /// Target polylines.
        targets: PathBuf,
        #[arg(long, default_value = "dtw")]
        variant: Variant,
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long, default_value_t = 65.0)]
        threshold: f64,
        /// Window start step (default: an eighth of the reference length).
        #[arg(long)]
        stride: Option<usize>,
        /// Compare windows pointwise instead of by alignment cost.
        #[arg(long)]
        euclidean: bool,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteKind {
    Alignment,
    Windowing,
    Classification,
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(mut w: impl Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn emit<T: Serialize>(out: &Output, value: &T, csv: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let mut w = sink(&out.output)?;
    match out.format {
        Format::Json => write_json(w, value),
        Format::Csv => {
            csv(&mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

fn load_pair(path: &Path) -> Result<SignalPair> {
    SignalPair::try_from(read_json::<SignalPairFile>(path)?)
}

/// Result of `align`.
#[derive(Debug, Serialize)]
pub struct AlignOutput {
    pub alignment: crate::dtw::Alignment,
    pub adm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aadft: Option<f64>,
}

/// Result of `fit`.
#[derive(Debug, Serialize)]
pub struct FitOutput {
    pub report: fitter::FitReport,
    pub profile: fitter::VariationProfile,
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit status.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        // Fails only if a pool already exists, which then stays in use.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    match cli.command {
        Command::Generate { length, min, max, p1, p2, noise, seed, out } => {
            let spec = GeneratorSpec {
                length,
                min,
                max,
                p1,
                p2,
                noise_fraction: noise,
                seed: seed.require()?,
                ..Default::default()
            };
            let series = generate_signal(&spec)?;
            emit(&out, &series, |w| series.write_csv(w))
        }
        Command::Deform { reference, class, params, profile, seed, out } => {
            let x = Series::load(&reference)?;
            let mut params: VariationParams = match params {
                Some(p) => read_json(&p)?,
                None => VariationParams::default(),
            };
            if let Some(profile) = profile {
                params.profile = profile;
            }
            let pair = compose_variation(&x, class, &params, seed.require()?)?;
            emit(&out, &SignalPairFile::from(&pair), |w| write_pair_csv(w, &pair))
        }
        Command::Align { reference, target, variant, weights, band, rounded, reference_marks, target_marks, out } => {
            let (x, y, truth) = match target {
                Some(t) => (Series::load(&reference)?, Series::load(&t)?, None),
                None => {
                    let pair = load_pair(&reference)?;
                    (pair.reference, pair.target, Some(pair.ground_truth))
                }
            };
            let spec = weights.spec(variant)?.with_band(band.map(BandConstraint::new));
            let alignment = spec.align(&x, &y)?;
            let mode = if rounded { GroundTruthMode::Rounded } else { GroundTruthMode::Fractional };
            let adt = truth.as_ref().map(|gt| metrics::adt(&alignment, gt, mode)).transpose()?;
            let aadft = if reference_marks.is_empty() {
                None
            } else {
                Some(metrics::aadft(&alignment, &EventMarks::new(reference_marks, target_marks)?)?)
            };
            let result = AlignOutput { adm: metrics::adm(&alignment, &x, &y)?, adt, aadft, alignment };
            let row = MetricRow {
                pair_id: x.name.clone().unwrap_or_else(|| file_stem(&reference)),
                variation: String::new(),
                variant: variant.to_string(),
                g: result.alignment.g,
                band: result.alignment.band,
                adm: result.adm,
                adt: result.adt,
                aadft: result.aadft,
            };
            emit(&out, &result, |w| metrics::write_metric_csv(w, [&row]))
        }
        Command::Fit { source, target, x, t0, alpha, iterations, seed, out } => {
            let (src, tgt) = (Series::load(&source)?, Series::load(&target)?);
            let sa = SAParams { t0, alpha, iterations, seed: seed.require()?, ..Default::default() };
            let (report, fitted) = fitter::fit(&src, &tgt, x, &sa)?;
            let profile = fitter::quantify_effects(&report, &tgt)?;
            emit(&out, &FitOutput { report, profile }, |w| fitted.write_csv(w))
        }
        Command::OptimizeWeights { pairs, variant, k, g_min, g_max, objective, seed, out } => {
            let batch = pairs.iter().map(|p| load_pair(p)).collect::<Result<Vec<_>>>()?;
            let cfg = WeightSearchConfig { k, g_range: (g_min, g_max), objective, seed: seed.require()? };
            let result = weightopt::optimize_g(&batch, variant, &cfg)?;
            emit(&out, &result, |w| {
                let mut wtr = csv::Writer::from_writer(w);
                wtr.write_record(["g", "value"])?;
                for &(g, v) in &result.samples {
                    wtr.write_record([fmt_f64(g), fmt_f64(v)])?;
                }
                wtr.flush()?;
                Ok(())
            })
        }
        Command::Bench { suite, config, pairs, k, slack, out_dir, seed, out } => {
            let seed = seed.require()?;
            match suite {
                SuiteKind::Alignment | SuiteKind::Windowing => {
                    let mut cfg: SuiteConfig = match config {
                        Some(p) => read_json(&p)?,
                        None => SuiteConfig::default(),
                    };
                    cfg.seed = seed;
                    if let Some(p) = pairs {
                        cfg.pairs = p;
                    }
                    if let Some(k) = k {
                        cfg.weight_search.k = k;
                    }
                    let (report, json): (_, serde_json::Value) = if suite == SuiteKind::Windowing {
                        if cfg.band == BandPolicy::None {
                            cfg.band = BandPolicy::Oracle { slack };
                        }
                        let w = bench::run_windowing_suite(&cfg)?;
                        let json = serde_json::to_value(&w)?;
                        (w.report, json)
                    } else {
                        let r = bench::run_alignment_suite(&cfg)?;
                        let json = serde_json::to_value(&r)?;
                        (r, json)
                    };
                    match out_dir {
                        Some(dir) => {
                            std::fs::create_dir_all(&dir)?;
                            write_json(BufWriter::new(File::create(dir.join("report.json"))?), &json)?;
                            bench::write_rows_csv(File::create(dir.join("rows.csv"))?, &report.rows)?;
                            bench::write_gnuplot(
                                BufWriter::new(File::create(dir.join("bars.dat"))?),
                                &report.aggregates,
                            )
                        }
                        None => emit(&out, &json, |w| bench::write_rows_csv(w, &report.rows)),
                    }
                }
                SuiteKind::Classification => {
                    let mut cfg: ClassificationSuiteConfig = match config {
                        Some(p) => read_json(&p)?,
                        None => ClassificationSuiteConfig::default(),
                    };
                    cfg.dataset.seed = seed;
                    if let Some(k) = k {
                        cfg.weight_search.k = k;
                    }
                    let report = bench::run_classification_suite(&cfg)?;
                    emit(&out, &report, |w| {
                        let mut wtr = csv::Writer::from_writer(w);
                        wtr.write_record(["variant", "g", "accuracy"])?;
                        for r in &report.results {
                            wtr.write_record([
                                r.variant.to_string(),
                                r.g.map(fmt_f64).unwrap_or_default(),
                                fmt_f64(r.accuracy),
                            ])?;
                        }
                        wtr.flush()?;
                        Ok(())
                    })
                }
            }
        }
        Command::Classify { dataset, save_dataset, classes, per_class, length, variant, weights, seed, out } => {
            let ds: Dataset = match dataset {
                Some(p) => {
                    let ds: Dataset = read_json(&p)?;
                    ds.validate()?;
                    ds
                }
                None => classify::make_dataset(&DatasetConfig {
                    n_classes: classes,
                    per_class: vec![per_class],
                    generator: GeneratorSpec { length, ..Default::default() },
                    seed: seed.require()?,
                    ..Default::default()
                })?,
            };
            if let Some(p) = save_dataset {
                write_json(BufWriter::new(File::create(p)?), &ds)?;
            }
            let result = classify::knn_classify(&ds, &weights.spec(variant)?)?;
            emit(&out, &result, |w| classify::write_predictions_csv(w, &result.predictions))
        }
        Command::Search { reference, targets, variant, weights, threshold, stride, euclidean, out } => {
            let reference = search::load_polylines(&reference)?
                .into_iter()
                .next()
                .ok_or_else(|| Error::param("the reference file holds no polyline"))?;
            let reference = search::curvature_torsion(&reference.1)?;
            let targets = search::load_polylines(&targets)?
                .iter()
                .map(|(_, line)| search::curvature_torsion(line))
                .collect::<Result<Vec<_>>>()?;
            let spec = weights.spec(variant)?;
            let cfg = SearchConfig {
                variant,
                weights: spec.weights,
                threshold,
                stride,
                distance: if euclidean { WindowDistance::Euclidean } else { WindowDistance::Alignment },
                ..Default::default()
            };
            let matches = search::sliding_search(&reference, &targets, &cfg)?;
            emit(&out, &matches, |w| search::write_matches_csv(w, &matches))
        }
    }
}

/// `index,target,ground_truth` rows of a pair.
fn write_pair_csv(w: &mut dyn Write, pair: &SignalPair) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["index", "target", "ground_truth"])?;
    for (j, (v, p)) in pair.target.values().iter().zip(&pair.ground_truth.src_pos).enumerate() {
        wtr.write_record([j.to_string(), fmt_f64(*v), fmt_f64(*p)])?;
    }
    wtr.flush()?;
    Ok(())
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}
