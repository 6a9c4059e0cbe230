//! Alignment-quality metrics.
//!
//! * ADM sums magnitude differences along a warping path.
//! * ADT sums time differences between each matched reference index and the
//!   true source position of the target sample.
//! * AADFT sums, over annotated events, the distance between the target
//!   position an alignment propagates a reference event to and its true
//!   target position.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dtw::Alignment;
use crate::error::{Error, Result};
use crate::series::{fmt_f64, Series};
use crate::synthesis::GroundTruthMapping;

/// How ADT reads the ground truth.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundTruthMode {
    #[default]
    Fractional,
    /// Positions rounded half away from zero, as used to pick sample values.
    Rounded,
}

fn check_path_bounds(al: &Alignment, m: usize, n: usize) -> Result<()> {
    if let Some(&(i, j)) = al.path.iter().find(|&&(i, j)| i >= m || j >= n) {
        return Err(Error::contract(format!("path cell ({i}, {j}) outside a {m} x {n} problem")));
    }
    Ok(())
}

/// Aggregate distance over magnitude: `sum |x_i - y_j|` along the path,
/// unweighted whatever variant produced it.
pub fn adm(al: &Alignment, x: &Series, y: &Series) -> Result<f64> {
    check_path_bounds(al, x.len(), y.len())?;
    let (xv, yv) = (x.values(), y.values());
    Ok(al.path.iter().map(|&(i, j)| (xv[i] - yv[j]).abs()).sum())
}

/// Aggregate distance over time: `sum |i - gt(j)|` along the path.
pub fn adt(al: &Alignment, gt: &GroundTruthMapping, mode: GroundTruthMode) -> Result<f64> {
    let (_, n) = al.lens();
    if gt.tgt_len() != n {
        return Err(Error::param(format!("ground truth covers {} target samples, alignment covers {n}", gt.tgt_len())));
    }
    check_path_bounds(al, gt.src_len, n)?;
    Ok(al
        .path
        .iter()
        .map(|&(i, j)| {
            let truth = match mode {
                GroundTruthMode::Fractional => gt.src_pos[j],
                GroundTruthMode::Rounded => gt.src_pos[j].round(),
            };
            (i as f64 - truth).abs()
        })
        .sum())
}

/// Annotated events: reference index `reference_marks[k]` truly corresponds
/// to target index `true_target_marks[k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventMarks {
    pub reference_marks: Vec<usize>,
    pub true_target_marks: Vec<usize>,
}

impl EventMarks {
    pub fn new(reference_marks: Vec<usize>, true_target_marks: Vec<usize>) -> Result<Self> {
        let marks = EventMarks { reference_marks, true_target_marks };
        marks.validate()?;
        Ok(marks)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reference_marks.len() != self.true_target_marks.len() {
            return Err(Error::param("event mark lists differ in length"));
        }
        let increasing = |v: &[usize]| v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&self.reference_marks) || !increasing(&self.true_target_marks) {
            return Err(Error::param("event marks must be strictly increasing"));
        }
        Ok(())
    }
}

/// Target position matched to reference index `r`: the mean of every `j`
/// paired with `r` on the path.
pub fn matched_position(al: &Alignment, r: usize) -> Option<f64> {
    let (sum, count) =
        al.path.iter().filter(|&&(i, _)| i == r).fold((0usize, 0usize), |(s, c), &(_, j)| (s + j, c + 1));
    (count > 0).then(|| sum as f64 / count as f64)
}

pub fn aadft(al: &Alignment, marks: &EventMarks) -> Result<f64> {
    marks.validate()?;
    let (m, n) = al.lens();
    let mut total = 0.0;
    for (&r, &t) in marks.reference_marks.iter().zip(&marks.true_target_marks) {
        if r >= m || t >= n {
            return Err(Error::contract(format!("event mark ({r}, {t}) outside a {m} x {n} alignment")));
        }
        let matched =
            matched_position(al, r).ok_or_else(|| Error::contract(format!("reference mark {r} is not on the path")))?;
        total += (matched - t as f64).abs();
    }
    Ok(total)
}

pub fn euclidean(x: &Series, y: &Series) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::param(format!("Euclidean distance needs equal lengths, got {} and {}", x.len(), y.len())));
    }
    Ok(euclidean_slices(x.values(), y.values()))
}

pub(crate) fn euclidean_slices(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

/// One line of a metric report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub pair_id: String,
    pub variation: String,
    pub variant: String,
    pub g: Option<f64>,
    pub band: Option<usize>,
    pub adm: f64,
    pub adt: Option<f64>,
    pub aadft: Option<f64>,
}

pub const METRIC_CSV_HEADER: [&str; 8] = ["pair_id", "variation", "variant", "g", "band", "adm", "adt", "aadft"];

/// Writes rows as `pair_id,variation,variant,g,band,adm,adt,aadft`; absent
/// values are empty fields.
pub fn write_metric_csv<'a, W: Write>(w: W, rows: impl IntoIterator<Item = &'a MetricRow>) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(METRIC_CSV_HEADER)?;
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    for r in rows {
        wtr.write_record([
            r.pair_id.clone(),
            r.variation.clone(),
            r.variant.clone(),
            opt(r.g),
            r.band.map(|b| b.to_string()).unwrap_or_default(),
            fmt_f64(r.adm),
            opt(r.adt),
            opt(r.aadft),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
