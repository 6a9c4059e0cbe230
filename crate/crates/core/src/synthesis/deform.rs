use super::mapping::{compose_mappings, GroundTruthMapping};
use super::{DeformationPlan, DeformationStep, PeakProfile};
use crate::error::{Error, Result};
use crate::series::Series;

/// Target length after scaling window `[w0, w1]` of a `len`-sample series by `s`.
pub fn scaled_length(len: usize, w0: usize, w1: usize, s: f64) -> isize {
    len as isize + ((w1 - w0) as f64 * (s - 1.0)).round() as isize
}

/// Source position read by target index `j` when the window `[w0, w1]` is
/// scaled by `s` and the tail is shifted to follow it.
pub fn scale_position(j: f64, w0: usize, w1: usize, s: f64) -> f64 {
    let (w0f, w) = (w0 as f64, (w1 - w0) as f64);
    if j < w0f {
        j
    } else if j <= w0f + w * s {
        w0f + (j - w0f) / s
    } else {
        j - w * (s - 1.0)
    }
}

/// Compensating factor applied outside the window so that total length is kept.
pub fn length_preserving_factor(len: usize, w0: usize, w1: usize, s: f64) -> f64 {
    let (l, w) = (len as f64, (w1 - w0) as f64);
    (l - w * s) / (l - w)
}

/// Source position read by target index `j` under length-preserving scaling
/// with window factor `s` and outside factor `s_out`.
pub fn preserving_position(j: f64, w0: usize, w1: usize, s: f64, s_out: f64) -> f64 {
    let (w0f, w) = (w0 as f64, (w1 - w0) as f64);
    let start = w0f * s_out;
    let end = start + w * s;
    if j < start {
        j / s_out
    } else if j < end {
        w0f + (j - start) / s
    } else {
        w1 as f64 + (j - end) / s_out
    }
}

fn check_window(x: &Series, w0: usize, w1: usize, s: f64) -> Result<()> {
    x.require_len(2, "scaling")?;
    if w0 >= w1 || w1 > x.len() - 1 {
        return Err(Error::param(format!("scaling window [{w0}, {w1}] must satisfy 0 <= w0 < w1 <= {}", x.len() - 1)));
    }
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::param(format!("scaling factor must be positive, got {s}")));
    }
    if (w1 - w0) as f64 * s < 1.0 {
        return Err(Error::param(format!(
            "scaling window of {} samples collapses below 2 samples at s = {s}",
            w1 - w0 + 1
        )));
    }
    Ok(())
}

fn sample(x: &Series, positions: Vec<f64>) -> Result<(Series, GroundTruthMapping)> {
    let hi = (x.len() - 1) as f64;
    let src_pos: Vec<f64> = positions.into_iter().map(|p| p.clamp(0.0, hi)).collect();
    let values = src_pos.iter().map(|p| x.values()[p.round() as usize]).collect();
    let mapping = GroundTruthMapping { src_pos, src_len: x.len() };
    Ok((Series::new(values)?, mapping))
}

/// Stretch (`s > 1`) or compress (`s < 1`) the window `[w0, w1]`, shifting
/// the tail. The target length changes by `round((w1 - w0)(s - 1))`.
pub fn scale_window(x: &Series, w0: usize, w1: usize, s: f64) -> Result<(Series, GroundTruthMapping)> {
    check_window(x, w0, w1, s)?;
    let n = scaled_length(x.len(), w0, w1, s);
    if n < 2 {
        return Err(Error::param(format!("scaled series would have {n} samples")));
    }
    let positions = (0..n as usize).map(|j| scale_position(j as f64, w0, w1, s)).collect();
    sample(x, positions)
}

/// Scale the window by `s` and everything else by the compensating factor so
/// the target keeps the source length.
pub fn scale_window_length_preserving(
    x: &Series,
    w0: usize,
    w1: usize,
    s: f64,
) -> Result<(Series, GroundTruthMapping)> {
    check_window(x, w0, w1, s)?;
    let s_out = length_preserving_factor(x.len(), w0, w1, s);
    if !(s_out > 0.0) {
        return Err(Error::param(format!(
            "window of {} samples scaled by {s} leaves no room for the rest of the series",
            w1 - w0
        )));
    }
    let positions = (0..x.len()).map(|j| preserving_position(j as f64, w0, w1, s, s_out)).collect();
    sample(x, positions)
}

/// Add a peak of `height` centred on `center`, affecting samples within
/// `width / 2` of the centre. Time is not distorted.
pub fn add_gaussian_peak(
    x: &Series,
    center: usize,
    width: usize,
    height: f64,
    profile: PeakProfile,
) -> Result<(Series, GroundTruthMapping)> {
    if x.is_empty() || center >= x.len() {
        return Err(Error::param(format!("peak centre {center} outside a series of {} samples", x.len())));
    }
    if width < 2 {
        return Err(Error::param(format!("peak width must be at least 2, got {width}")));
    }
    if !height.is_finite() {
        return Err(Error::param("peak height must be finite"));
    }
    let (lo, hi) = peak_window(x.len(), center, width);
    let mut values = x.values().to_vec();
    for (j, v) in values.iter_mut().enumerate().take(hi + 1).skip(lo) {
        *v += profile.value(j as f64 - center as f64, width, height);
    }
    Ok((Series::new(values)?, GroundTruthMapping::identity(x.len())))
}

/// Inclusive sample range touched by a peak, clipped to the series.
pub(crate) fn peak_window(len: usize, center: usize, width: usize) -> (usize, usize) {
    let half = width as f64 / 2.0;
    let lo = (center as f64 - half).ceil().max(0.0) as usize;
    let hi = ((center as f64 + half).floor() as usize).min(len - 1);
    (lo, hi)
}

pub fn apply_step(x: &Series, step: &DeformationStep) -> Result<(Series, GroundTruthMapping)> {
    match *step {
        DeformationStep::ScaleWindow { w0, w1, s, length_preserving: false } => scale_window(x, w0, w1, s),
        DeformationStep::ScaleWindow { w0, w1, s, length_preserving: true } => {
            scale_window_length_preserving(x, w0, w1, s)
        }
        DeformationStep::GaussianPeak { center, width, height, profile } => {
            add_gaussian_peak(x, center, width, height, profile)
        }
    }
}

/// Apply every step in order; the returned mapping is the composition of the
/// per-step mappings and points into `x`.
pub fn apply_plan(x: &Series, plan: &DeformationPlan) -> Result<(Series, GroundTruthMapping)> {
    let mut current = x.clone();
    let mut mapping = GroundTruthMapping::identity(x.len());
    for step in &plan.steps {
        let (next, step_map) = apply_step(&current, step)?;
        // Peaks leave time untouched; skip the no-op composition.
        if step.is_scaling() {
            mapping = compose_mappings(&mapping, &step_map)?;
        }
        current = next;
    }
    current.name = x.name.clone();
    Ok((current, mapping))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize) -> Series {
        Series::new((0..n).map(|k| k as f64).collect()).unwrap()
    }

    fn series(v: &[f64]) -> Series {
        Series::new(v.to_vec()).unwrap()
    }

    #[test]
    fn unit_scale_is_identity() {
        let x = series(&[3.0, 1.0, 4.0, 1.0, 5.0, 9.0]);
        let (y, m) = scale_window(&x, 1, 4, 1.0).unwrap();
        assert_eq!(y, x);
        assert_eq!(m, GroundTruthMapping::identity(6));
        let (y, m) = scale_window_length_preserving(&x, 1, 4, 1.0).unwrap();
        assert_eq!(y, x);
        assert_eq!(m, GroundTruthMapping::identity(6));
    }

    #[test]
    fn halving_a_window_matches_hand_evaluation() {
        let (y, m) = scale_window(&ramp(10), 2, 6, 0.5).unwrap();
        assert_eq!(y.values(), &[0.0, 1.0, 2.0, 4.0, 6.0, 7.0, 8.0, 9.0]);
        assert_eq!(m.src_pos, vec![0.0, 1.0, 2.0, 4.0, 6.0, 7.0, 8.0, 9.0]);
    }

    #[test]
    fn fifty_one_percent_window_shortens_by_forty_nine_percent() {
        let x = ramp(400);
        let (y, m) = scale_window(&x, 100, 200, 0.51).unwrap();
        assert_eq!(y.len(), 400 - 49);
        assert!(m.is_monotone() && m.in_bounds());
    }

    #[test]
    fn length_preserving_hand_example() {
        let x = series(&[10.0, 11.0, 12.0, 13.0, 14.0, 15.0]);
        assert_eq!(length_preserving_factor(6, 2, 4, 2.0), 0.5);
        let (y, m) = scale_window_length_preserving(&x, 2, 4, 2.0).unwrap();
        assert_eq!(y.values(), &[10.0, 12.0, 13.0, 13.0, 14.0, 14.0]);
        assert_eq!(m.src_pos, vec![0.0, 2.0, 2.5, 3.0, 3.5, 4.0]);
    }

    #[test]
    fn scaling_rejects_bad_windows() {
        let x = ramp(10);
        assert!(scale_window(&x, 5, 5, 1.2).is_err());
        assert!(scale_window(&x, 2, 10, 1.2).is_err());
        assert!(scale_window(&x, 2, 4, 0.0).is_err());
        assert!(scale_window(&x, 2, 4, 0.4).is_err()); // 2 * 0.4 < 1
        assert!(scale_window_length_preserving(&x, 0, 9, 1.2).is_err()); // s' <= 0
    }

    #[test]
    fn peak_leaves_outside_untouched() {
        let x = Series::new(vec![1.0; 30]).unwrap();
        let (y, m) = add_gaussian_peak(&x, 10, 6, 5.0, PeakProfile::Normalized).unwrap();
        for (j, (a, b)) in x.values().iter().zip(y.values()).enumerate() {
            if (7..=13).contains(&j) {
                assert!(b > a);
            } else {
                assert_eq!(a, b);
            }
        }
        assert_eq!(m, GroundTruthMapping::identity(30));
        assert_eq!(y.values()[10], 6.0);
    }

    #[test]
    fn zero_and_negative_heights() {
        let x = ramp(20);
        let (y, _) = add_gaussian_peak(&x, 8, 4, 0.0, PeakProfile::Literal).unwrap();
        assert_eq!(y, x);
        let (y, _) = add_gaussian_peak(&x, 8, 4, -3.0, PeakProfile::Normalized).unwrap();
        assert_eq!(y.values()[8], 5.0);
        assert!(y.values().iter().zip(x.values()).all(|(a, b)| a <= b));
    }

    #[test]
    fn peak_window_clips_to_series() {
        assert_eq!(peak_window(10, 0, 6), (0, 3));
        assert_eq!(peak_window(10, 9, 6), (6, 9));
        assert_eq!(peak_window(100, 5, 4), (3, 7));
        assert_eq!(peak_window(100, 5, 5), (3, 7));
    }
}
