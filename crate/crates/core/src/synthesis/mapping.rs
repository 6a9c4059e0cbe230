use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::interpolate;

/// For every target index `j`, the (possibly fractional) reference position
/// its sample was taken from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthMapping {
    pub src_pos: Vec<f64>,
    pub src_len: usize,
}

impl GroundTruthMapping {
    pub fn identity(len: usize) -> Self {
        GroundTruthMapping { src_pos: (0..len).map(|j| j as f64).collect(), src_len: len }
    }

    pub fn tgt_len(&self) -> usize {
        self.src_pos.len()
    }

    /// Source position at target index `j`, rounded half away from zero.
    pub fn rounded(&self, j: usize) -> usize {
        self.src_pos[j].round() as usize
    }

    pub fn is_monotone(&self) -> bool {
        self.src_pos.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn in_bounds(&self) -> bool {
        let hi = self.src_len.saturating_sub(1) as f64;
        self.src_pos.iter().all(|&p| (0.0..=hi).contains(&p))
    }

    /// Largest `|gt(j) - j * (m-1)/(n-1)|`, i.e. how far the true path strays
    /// from the scaled diagonal of an `m x n` cost matrix.
    pub fn max_diagonal_offset(&self) -> f64 {
        let n = self.tgt_len();
        if n < 2 {
            return 0.0;
        }
        let slope = (self.src_len as f64 - 1.0) / (n as f64 - 1.0);
        self.src_pos.iter().enumerate().map(|(j, &p)| (p - j as f64 * slope).abs()).fold(0.0, f64::max)
    }
}

/// Chains two mappings: `inner` sends final-target indices to positions on an
/// intermediate series, `outer` sends intermediate indices to the source.
/// Fractional intermediate positions are resolved by linear interpolation.
pub fn compose_mappings(outer: &GroundTruthMapping, inner: &GroundTruthMapping) -> Result<GroundTruthMapping> {
    if outer.tgt_len() != inner.src_len {
        return Err(Error::param(format!(
            "cannot compose: outer covers {} samples but inner points into {}",
            outer.tgt_len(),
            inner.src_len
        )));
    }
    if outer.src_pos.is_empty() {
        return Err(Error::param("cannot compose an empty mapping"));
    }
    let src_pos = inner.src_pos.iter().map(|&p| interpolate(&outer.src_pos, p)).collect();
    Ok(GroundTruthMapping { src_pos, src_len: outer.src_len })
}
