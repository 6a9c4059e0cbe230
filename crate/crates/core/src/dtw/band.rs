use serde::{Deserialize, Serialize};

/// Corridor of admissible cells around the scaled diagonal of an `m x n`
/// matrix: `(i, j)` is admitted iff `|i - j (m-1)/(n-1)| <= width`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandConstraint {
    pub width: usize,
}

impl BandConstraint {
    pub fn new(width: usize) -> Self {
        BandConstraint { width }
    }

    /// Exact integer form of the admissibility predicate.
    pub fn admits(&self, i: usize, j: usize, m: usize, n: usize) -> bool {
        let lhs = (i as i128 * (n as i128 - 1) - j as i128 * (m as i128 - 1)).abs();
        lhs <= self.width as i128 * (n as i128 - 1)
    }

    /// Per-row inclusive column ranges `[lo, hi]`; empty rows have `lo > hi`.
    pub(crate) fn rows(&self, m: usize, n: usize) -> Vec<(usize, usize)> {
        let (mm, nn) = (m as i128 - 1, n as i128 - 1);
        let w = self.width as i128;
        (0..m as i128)
            .map(|i| {
                let lo = div_ceil((i - w) * nn, mm).max(0);
                let hi = ((i + w) * nn).div_euclid(mm).min(nn);
                if lo > hi {
                    (1, 0)
                } else {
                    (lo as usize, hi as usize)
                }
            })
            .collect()
    }

    /// Whether at least one monotone path from `(0,0)` to `(m-1,n-1)` stays inside.
    pub fn is_feasible(&self, m: usize, n: usize) -> bool {
        rows_connected(&self.rows(m, n))
    }

    /// This band if feasible, otherwise the narrowest feasible widening of it.
    pub fn widened_to_feasible(&self, m: usize, n: usize) -> BandConstraint {
        let mut w = self.width;
        while !BandConstraint::new(w).is_feasible(m, n) {
            w += 1;
        }
        BandConstraint::new(w)
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -((-a).div_euclid(b))
}

pub(crate) fn rows_connected(rows: &[(usize, usize)]) -> bool {
    if rows.iter().any(|&(lo, hi)| lo > hi) {
        return false;
    }
    rows.windows(2).all(|w| w[1].0 <= w[0].1 + 1)
}
