//! Quadratic dynamic-programming kernels.
//!
//! The recursion runs on cost-to-go, from `(m-1, n-1)` back to `(0, 0)`, and
//! the path is then read forward. Tie-breaking therefore applies from the
//! start of the series: at every step the diagonal wins a tie, then the move
//! that advances the longer series.
//!
//! Costs live in two rolling rows; only the step direction of every cell is
//! kept (one byte each), so a 500 x 500 alignment touches ~250 KB.

const DIAG: u8 = 0;
const DOWN: u8 = 1; // to (i+1, j): advances the first series
const RIGHT: u8 = 2; // to (i, j+1): advances the second series

/// Local cost `|a_i - b_j|`, optionally scaled by a weight indexed by `|i - j|`.
pub(crate) struct LocalCost<'a> {
    pub a: &'a [f64],
    pub b: &'a [f64],
    pub weights: Option<&'a [f64]>,
}

impl LocalCost<'_> {
    #[inline(always)]
    pub(crate) fn at(&self, i: usize, j: usize) -> f64 {
        let d = (self.a[i] - self.b[j]).abs();
        match self.weights {
            Some(w) => d * w[i.abs_diff(j)],
            None => d,
        }
    }
}

/// Row ranges `[lo, hi]` per row; `None` means the full matrix.
type Rows<'a> = Option<&'a [(usize, usize)]>;

#[inline(always)]
fn row_range(rows: Rows<'_>, i: usize, n: usize) -> (usize, usize) {
    rows.map_or((0, n - 1), |r| r[i])
}

/// Picks the cheapest successor. Ties go to the diagonal, then to the move
/// that advances the longer series.
#[inline(always)]
fn choose(diag: f64, down: f64, right: f64, prefer_down: bool) -> (f64, u8) {
    let (mut best, mut dir) = (diag, DIAG);
    let (first, first_dir, second, second_dir) =
        if prefer_down { (down, DOWN, right, RIGHT) } else { (right, RIGHT, down, DOWN) };
    if first < best {
        (best, dir) = (first, first_dir);
    }
    if second < best {
        (best, dir) = (second, second_dir);
    }
    (best, dir)
}

/// Runs the recursion, handing every cell's chosen step to `record`.
#[inline(always)]
fn sweep(cost: &LocalCost<'_>, rows: Rows<'_>, mut record: impl FnMut(usize, usize, u8)) -> f64 {
    let (m, n) = (cost.a.len(), cost.b.len());
    let prefer_down = m >= n;
    let mut next = vec![f64::INFINITY; n];
    let mut cur = vec![f64::INFINITY; n];

    for i in (0..m).rev() {
        let (lo, hi) = row_range(rows, i, n);
        if i == m - 1 {
            // last row: only moves to the right remain
            debug_assert_eq!(hi, n - 1, "every corridor contains the end cell");
            cur[hi] = cost.at(i, hi);
            record(i, hi, RIGHT);
            for j in (lo..hi).rev() {
                cur[j] = cur[j + 1] + cost.at(i, j);
                record(i, j, RIGHT);
            }
        } else {
            // right edge of the row: no move to the right
            let (best, dir) =
                choose(if hi + 1 < n { next[hi + 1] } else { f64::INFINITY }, next[hi], f64::INFINITY, prefer_down);
            cur[hi] = best + cost.at(i, hi);
            record(i, hi, dir);
            let (next_s, cur_s) = (&next[lo..=hi], &mut cur[lo..=hi]);
            for k in (0..hi - lo).rev() {
                let (best, dir) = choose(next_s[k + 1], next_s[k], cur_s[k + 1], prefer_down);
                cur_s[k] = best + cost.at(i, lo + k);
                record(i, lo + k, dir);
            }
        }
        if i > 0 {
            std::mem::swap(&mut next, &mut cur);
            // `cur` now holds row i+1; reset the span it used.
            if i + 1 < m {
                let (plo, phi) = row_range(rows, i + 1, n);
                cur[plo..=phi].fill(f64::INFINITY);
            }
        }
    }
    cur[0]
}

/// Minimum accumulated cost and its path. `rows` must describe a connected corridor.
pub(crate) fn path(cost: &LocalCost<'_>, rows: Rows<'_>) -> (f64, Vec<(usize, usize)>) {
    let (m, n) = (cost.a.len(), cost.b.len());
    let mut dirs = vec![DIAG; m * n];
    let total = sweep(cost, rows, |i, j, d| dirs[i * n + j] = d);

    let mut path = Vec::with_capacity(m + n);
    let (mut i, mut j) = (0, 0);
    path.push((0, 0));
    while i + 1 < m || j + 1 < n {
        match dirs[i * n + j] {
            DIAG => {
                i += 1;
                j += 1;
            }
            DOWN => i += 1,
            _ => j += 1,
        }
        path.push((i, j));
    }
    (total, path)
}

/// Same recursion as [`path`] without the direction matrix.
pub(crate) fn cost_only(cost: &LocalCost<'_>, rows: Rows<'_>) -> f64 {
    sweep(cost, rows, |_, _, _| {})
}
