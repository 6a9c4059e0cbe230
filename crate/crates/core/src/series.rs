use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniformly sampled 1-D signal.
///
/// Values are guaranteed finite; construction through [`Series::new`] or
/// deserialization rejects NaN and infinities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries")]
pub struct Series {
    pub name: Option<String>,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawSeries {
    #[serde(default)]
    name: Option<String>,
    values: Vec<f64>,
}

impl TryFrom<RawSeries> for Series {
    type Error = Error;

    fn try_from(raw: RawSeries) -> Result<Self> {
        let mut s = Series::new(raw.values)?;
        s.name = raw.name;
        Ok(s)
    }
}

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!("series value at index {k} is not finite")));
        }
        Ok(Series { name: None, values })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `max - min`, or 0 for an empty series.
    pub fn amplitude(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        let (lo, hi) =
            self.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        hi - lo
    }

    pub(crate) fn require_len(&self, min: usize, what: &str) -> Result<()> {
        if self.len() < min {
            return Err(Error::param(format!("{what} needs a series of at least {min} samples, got {}", self.len())));
        }
        Ok(())
    }

    /// Linear-interpolation value at a fractional index, clamped to the ends.
    pub fn interpolate(&self, pos: f64) -> f64 {
        interpolate(&self.values, pos)
    }

    pub fn from_json_reader<R: Read>(r: R) -> Result<Self> {
        Ok(serde_json::from_reader(r)?)
    }

    /// Reads the `index,value` CSV layout. Rows are taken in file order.
    pub fn from_csv_reader<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers()?.clone();
        let col = headers
            .iter()
            .position(|h| h.trim() == "value")
            .ok_or_else(|| Error::param("series CSV needs a `value` column"))?;
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let field = rec.get(col).unwrap_or("").trim();
            let v: f64 = field.parse().map_err(|_| Error::param(format!("cannot parse `{field}` as a number")))?;
            values.push(v);
        }
        Series::new(values)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["index", "value"])?;
        for (k, v) in self.values.iter().enumerate() {
            wtr.write_record([k.to_string(), fmt_f64(*v)])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Loads a series from `.csv` (index,value) or JSON (anything else).
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let rdr = std::io::BufReader::new(file);
        if is_csv(path) {
            Series::from_csv_reader(rdr)
        } else {
            Series::from_json_reader(rdr)
        }
    }
}

pub(crate) fn is_csv(path: &Path) -> bool {
    path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Shortest representation that parses back to the same `f64`.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub(crate) fn interpolate(values: &[f64], pos: f64) -> f64 {
    let last = values.len() - 1;
    if pos <= 0.0 {
        return values[0];
    }
    if pos >= last as f64 {
        return values[last];
    }
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if frac == 0.0 {
        values[lo]
    } else {
        values[lo] + (values[lo + 1] - values[lo]) * frac
    }
}
