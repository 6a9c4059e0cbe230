use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;
use crate::series::Series;

/// Minimum separation between the two exponents of a segment curve.
const EXPONENT_GAP: f64 = 0.05;

/// Parameters of the anchor-and-curve signal generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorSpec {
    pub length: usize,
    pub min: f64,
    pub max: f64,
    /// Smallest spacing between successive anchors (peaks/valleys).
    pub p1: usize,
    /// Largest spacing between successive anchors.
    pub p2: usize,
    /// Interval the exponents `a`, `b` of `c1 u^a + c2 u^b` are drawn from.
    pub exponent_range: (f64, f64),
    /// Per-sample noise is uniform in `±noise_fraction * (max - min)`.
    pub noise_fraction: f64,
    pub seed: u64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            length: 500,
            min: 0.0,
            max: 100.0,
            p1: 10,
            p2: 50,
            exponent_range: (0.1, 2.0),
            noise_fraction: 0.2,
            seed: 0,
        }
    }
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.length < 2 {
            return Err(Error::param("signal length must be at least 2"));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.max <= self.min {
            return Err(Error::param(format!("magnitude range needs min < max, got ({}, {})", self.min, self.max)));
        }
        if self.p1 < 1 || self.p1 > self.p2 || self.p2 >= self.length {
            return Err(Error::param(format!(
                "peak spacing needs 1 <= p1 <= p2 < length, got p1={} p2={} length={}",
                self.p1, self.p2, self.length
            )));
        }
        let (lo, hi) = self.exponent_range;
        if !(lo > 0.0 && hi <= 3.0 && hi - lo > 2.0 * EXPONENT_GAP) {
            return Err(Error::param(format!(
                "exponent range must lie in (0, 3] and be wider than {}, got ({lo}, {hi})",
                2.0 * EXPONENT_GAP
            )));
        }
        if !(0.0..=0.5).contains(&self.noise_fraction) {
            return Err(Error::param(format!("noise fraction must be in [0, 0.5], got {}", self.noise_fraction)));
        }
        Ok(())
    }
}

/// A generated signal together with the construction record.
#[derive(Clone, Debug)]
pub struct GeneratedSignal {
    pub series: Series,
    /// Anchor abscissae and magnitudes. The last anchor may lie past the end
    /// of the signal; its segment is truncated.
    pub anchors: Vec<(usize, f64)>,
    /// The additive noise term, per sample.
    pub noise: Vec<f64>,
}

pub fn generate_signal(spec: &GeneratorSpec) -> Result<Series> {
    generate_with_anchors(spec).map(|g| g.series)
}

pub fn generate_with_anchors(spec: &GeneratorSpec) -> Result<GeneratedSignal> {
    spec.validate()?;
    let mut rng = seed::rng(spec.seed);
    let len = spec.length;
    let mut clean = vec![0.0; len];

    let mut prev_x = 0usize;
    let mut prev_y = rng.gen_range(spec.min..=spec.max);
    clean[0] = prev_y;
    let mut anchors = vec![(prev_x, prev_y)];

    while prev_x < len - 1 {
        let gap = rng.gen_range(spec.p1..=spec.p2);
        let x = prev_x + gap;
        let y = rng.gen_range(spec.min..=spec.max);
        let (a, b) = draw_exponents(&mut rng, spec.exponent_range);
        fill_segment(&mut clean, prev_x, prev_y, x, y, a, b);
        anchors.push((x, y));
        prev_x = x;
        prev_y = y;
    }

    let spread = spec.noise_fraction * (spec.max - spec.min);
    let noise: Vec<f64> = (0..len).map(|_| if spread > 0.0 { rng.gen_range(-spread..=spread) } else { 0.0 }).collect();
    let values = clean.iter().zip(&noise).map(|(c, n)| c + n).collect();
    Ok(GeneratedSignal { series: Series::new(values)?, anchors, noise })
}

fn draw_exponents(rng: &mut seed::Rng, (lo, hi): (f64, f64)) -> (f64, f64) {
    loop {
        let a = rng.gen_range(lo..=hi);
        for _ in 0..64 {
            let b = rng.gen_range(lo..=hi);
            if (a - b).abs() > EXPONENT_GAP {
                return (a, b);
            }
        }
    }
}

/// Writes `c1 u^a + c2 u^b` over samples `x0..=min(x1, len-1)`, where the
/// local abscissa `u` runs from 1 at `x0` to 2 at `x1` and `(c1, c2)` make the
/// curve pass through both anchors.
fn fill_segment(out: &mut [f64], x0: usize, y0: f64, x1: usize, y1: f64, a: f64, b: f64) {
    let end_a = 2f64.powf(a);
    let end_b = 2f64.powf(b);
    let det = end_b - end_a;
    let c1 = (y0 * end_b - y1) / det;
    let c2 = (y1 - y0 * end_a) / det;
    let span = (x1 - x0) as f64;
    let last = x1.min(out.len() - 1);
    for (t, slot) in out.iter_mut().enumerate().take(last + 1).skip(x0 + 1) {
        *slot = if t == x1 {
            y1
        } else {
            let u = 1.0 + (t - x0) as f64 / span;
            c1 * u.powf(a) + c2 * u.powf(b)
        };
    }
}
