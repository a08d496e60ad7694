//! Minimum-cost bipartite assignment.
//!
//! [`solve`] runs the classical Hungarian procedure on a (padded) square
//! working copy of the cost matrix: subtract row minima, subtract column
//! minima, then alternate a minimum line cover of the zeros with a zero shift
//! until the cover needs as many lines as the matrix has rows. The zeros of
//! the final matrix then contain an optimal assignment, which is extracted as
//! the lexicographically smallest perfect matching so that ties resolve the
//! same way on every run.
//!
//! [`brute_force_solve`] enumerates every injective assignment and serves as
//! the reference for small matrices.

use std::fmt;

use crate::{Error, Result};

/// Reduced entries at or below this magnitude count as zeros.
pub const EPS: f64 = 1e-9;

/// Largest `min(rows, cols)` accepted by [`brute_force_solve`].
pub const BRUTE_FORCE_MAX: usize = 8;

/// Dense row-major matrix of nonnegative costs (rows are tracks, columns are
/// detections in the tracker).
#[derive(Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    /// Builds a matrix from row-major data, rejecting negative or non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(idx) = data.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidCost {
                row: idx / cols,
                col: idx % cols,
                value: data[idx],
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Error::Shape {
                    expected: n_rows * n_cols,
                    got: data.len() + row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(n_rows, n_cols, data)
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    #[inline]
    fn is_zero(&self, row: usize, col: usize) -> bool {
        self.get(row, col).abs() <= EPS
    }

    /// Square copy of side `max(rows, cols)`; new cells hold `pad`.
    fn padded(&self, pad: f64) -> CostMatrix {
        let n = self.rows.max(self.cols);
        let mut data = vec![pad; n * n];
        for r in 0..self.rows {
            data[r * n..r * n + self.cols].copy_from_slice(self.row(r));
        }
        CostMatrix {
            rows: n,
            cols: n,
            data,
        }
    }
}

impl fmt::Debug for CostMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

/// Selected row/column pairing together with the leftovers on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Matched `(row, col)` pairs, sorted by row.
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_rows: Vec<usize>,
    pub unmatched_cols: Vec<usize>,
    /// Sum of the original matrix entries over `pairs`.
    pub total_cost: f64,
}

impl Assignment {
    /// Completes a pair list into a full assignment against `cost`.
    pub fn from_pairs(mut pairs: Vec<(usize, usize)>, cost: &CostMatrix) -> Self {
        pairs.sort_unstable();
        let mut row_used = vec![false; cost.n_rows()];
        let mut col_used = vec![false; cost.n_cols()];
        for &(r, c) in &pairs {
            row_used[r] = true;
            col_used[c] = true;
        }
        let total_cost = pairs.iter().map(|&(r, c)| cost.get(r, c)).sum();
        Self {
            pairs,
            unmatched_rows: (0..cost.n_rows()).filter(|&r| !row_used[r]).collect(),
            unmatched_cols: (0..cost.n_cols()).filter(|&c| !col_used[c]).collect(),
            total_cost,
        }
    }

    /// Column matched to `row`, if any.
    pub fn col_for_row(&self, row: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == row).map(|p| p.1)
    }
}

/// Rows and columns selected by a zero-covering set of lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineCover {
    rows: Vec<bool>,
    cols: Vec<bool>,
}

impl LineCover {
    pub fn covered_rows(&self) -> Vec<usize> {
        indices(&self.rows)
    }

    pub fn covered_cols(&self) -> Vec<usize> {
        indices(&self.cols)
    }

    pub fn is_row_covered(&self, row: usize) -> bool {
        self.rows[row]
    }

    pub fn is_col_covered(&self, col: usize) -> bool {
        self.cols[col]
    }

    /// Number of lines.
    pub fn len(&self) -> usize {
        self.rows.iter().filter(|&&b| b).count() + self.cols.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn indices(flags: &[bool]) -> Vec<usize> {
    flags
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i))
        .collect()
}

/// Subtracts each row's minimum from that row.
pub fn reduce_rows(cost: &CostMatrix) -> CostMatrix {
    let mut out = cost.clone();
    for r in 0..out.rows {
        let min = out.row(r).iter().copied().fold(f64::INFINITY, f64::min);
        if min.is_finite() {
            for c in 0..out.cols {
                let v = out.get(r, c) - min;
                out.set(r, c, v);
            }
        }
    }
    out
}

/// Subtracts each column's minimum from that column.
pub fn reduce_cols(cost: &CostMatrix) -> CostMatrix {
    let mut out = cost.clone();
    for c in 0..out.cols {
        let min = (0..out.rows)
            .map(|r| out.get(r, c))
            .fold(f64::INFINITY, f64::min);
        if min.is_finite() {
            for r in 0..out.rows {
                let v = out.get(r, c) - min;
                out.set(r, c, v);
            }
        }
    }
    out
}

/// Maximum matching on the zero entries. Rows are processed in ascending
/// order and each row tries its columns in ascending order.
struct ZeroMatching {
    row_match: Vec<Option<usize>>,
    col_match: Vec<Option<usize>>,
}

impl ZeroMatching {
    fn maximum(m: &CostMatrix) -> Self {
        let mut matching = ZeroMatching {
            row_match: vec![None; m.rows],
            col_match: vec![None; m.cols],
        };
        for r in 0..m.rows {
            let mut seen = vec![false; m.cols];
            matching.augment(m, r, &mut seen);
        }
        matching
    }

    fn augment(&mut self, m: &CostMatrix, row: usize, seen: &mut [bool]) -> bool {
        for c in 0..m.cols {
            if seen[c] || !m.is_zero(row, c) {
                continue;
            }
            seen[c] = true;
            let free = match self.col_match[c] {
                None => true,
                Some(owner) => self.augment(m, owner, seen),
            };
            if free {
                self.row_match[row] = Some(c);
                self.col_match[c] = Some(row);
                return true;
            }
        }
        false
    }

    fn size(&self) -> usize {
        self.row_match.iter().flatten().count()
    }
}

/// Minimum set of rows and columns covering every zero of `reduced`.
///
/// Built from a maximum zero matching: mark every row and column reachable
/// from an unmatched row along alternating paths, then cover the unmarked
/// rows and the marked columns. The line count equals the matching size,
/// which is the minimum possible.
#[allow(clippy::needless_range_loop)]
pub fn min_line_cover(reduced: &CostMatrix) -> LineCover {
    let matching = ZeroMatching::maximum(reduced);
    let (rows, cols) = (reduced.rows, reduced.cols);
    let mut row_marked = vec![false; rows];
    let mut col_marked = vec![false; cols];
    let mut stack: Vec<usize> = (0..rows)
        .filter(|&r| matching.row_match[r].is_none())
        .collect();
    for &r in &stack {
        row_marked[r] = true;
    }
    while let Some(r) = stack.pop() {
        for c in 0..cols {
            if col_marked[c] || !reduced.is_zero(r, c) {
                continue;
            }
            col_marked[c] = true;
            if let Some(owner) = matching.col_match[c] {
                if !row_marked[owner] {
                    row_marked[owner] = true;
                    stack.push(owner);
                }
            }
        }
    }
    let cover = LineCover {
        rows: row_marked.iter().map(|m| !m).collect(),
        cols: col_marked,
    };
    debug_assert_eq!(cover.len(), matching.size());
    cover
}

/// Creates new zeros outside `cover`: the smallest uncovered entry is
/// subtracted from every uncovered entry and added to every entry covered
/// twice. Returns an unchanged copy when nothing is uncovered.
pub fn shift_zeros(reduced: &CostMatrix, cover: &LineCover) -> CostMatrix {
    let mut min = f64::INFINITY;
    for r in (0..reduced.rows).filter(|&r| !cover.rows[r]) {
        for c in (0..reduced.cols).filter(|&c| !cover.cols[c]) {
            min = min.min(reduced.get(r, c));
        }
    }
    let mut out = reduced.clone();
    if !min.is_finite() {
        return out;
    }
    for r in 0..out.rows {
        for c in 0..out.cols {
            let v = out.get(r, c);
            match (cover.rows[r], cover.cols[c]) {
                (false, false) => out.set(r, c, v - min),
                (true, true) => out.set(r, c, v + min),
                _ => {}
            }
        }
    }
    out
}

/// One pass of the optimality test that failed, followed by a zero shift.
#[derive(Debug, Clone)]
pub struct ShiftStep {
    pub cover: LineCover,
    pub shifted: CostMatrix,
}

/// Intermediate matrices of a [`solve_traced`] run.
#[derive(Debug, Clone)]
pub struct HungarianTrace {
    /// Square working matrix after padding.
    pub padded: CostMatrix,
    pub row_reduced: CostMatrix,
    pub col_reduced: CostMatrix,
    pub shifts: Vec<ShiftStep>,
}

/// Exact minimum-cost assignment of `min(rows, cols)` pairs.
pub fn solve(cost: &CostMatrix) -> Result<Assignment> {
    solve_traced(cost).map(|(a, _)| a)
}

/// [`solve`], also returning every intermediate matrix.
pub fn solve_traced(cost: &CostMatrix) -> Result<(Assignment, HungarianTrace)> {
    if cost.rows == 0 || cost.cols == 0 {
        return Err(Error::Dimension {
            rows: cost.rows,
            cols: cost.cols,
        });
    }
    let padded = if cost.rows == cost.cols {
        cost.clone()
    } else {
        cost.padded(cost.max_entry() + 1.0)
    };
    let n = padded.rows;

    let row_reduced = reduce_rows(&padded);
    let col_reduced = reduce_cols(&row_reduced);
    let mut working = col_reduced.clone();
    let mut shifts = Vec::new();
    loop {
        let cover = min_line_cover(&working);
        if cover.len() >= n {
            break;
        }
        // Each shift keeps the current zero matching and grows its
        // alternating tree, so the matching gains an edge within n shifts.
        if shifts.len() >= n * n {
            return Err(Error::Numerical(format!(
                "optimality test did not converge within {} shifts",
                n * n
            )));
        }
        working = shift_zeros(&working, &cover);
        shifts.push(ShiftStep {
            cover,
            shifted: working.clone(),
        });
    }

    let row_to_col = lexicographic_zero_matching(&working)?;
    let pairs = row_to_col
        .into_iter()
        .enumerate()
        .filter(|&(r, c)| r < cost.rows && c < cost.cols)
        .collect();
    let assignment = Assignment::from_pairs(pairs, cost);
    Ok((
        assignment,
        HungarianTrace {
            padded,
            row_reduced,
            col_reduced,
            shifts,
        },
    ))
}

/// Perfect matching on the zeros of a square matrix whose column sequence
/// (indexed by row) is lexicographically smallest.
///
/// Every optimal assignment is a perfect matching on the zeros of a
/// reduced matrix, so this is also the lexicographically smallest optimum.
fn lexicographic_zero_matching(m: &CostMatrix) -> Result<Vec<usize>> {
    let n = m.rows;
    let mut matching = ZeroMatching::maximum(m);
    if matching.size() != n {
        return Err(Error::Numerical(
            "reduced matrix has no perfect zero matching".into(),
        ));
    }
    let mut fixed = vec![false; n];
    for r in 0..n {
        let current = matching.row_match[r].expect("perfect matching");
        for c in 0..current {
            if !m.is_zero(r, c) {
                continue;
            }
            let other = matching.col_match[c].expect("perfect matching");
            if fixed[other] {
                continue;
            }
            // Give `c` to `r`; `other` must then reach the freed column
            // `current` along an alternating path avoiding fixed rows.
            let saved = (matching.row_match.clone(), matching.col_match.clone());
            matching.row_match[r] = Some(c);
            matching.col_match[c] = Some(r);
            matching.row_match[other] = None;
            matching.col_match[current] = None;
            fixed[r] = true;
            let mut seen = vec![false; n];
            seen[c] = true;
            if reroute(m, &mut matching, &fixed, other, &mut seen) {
                break;
            }
            fixed[r] = false;
            matching.row_match = saved.0;
            matching.col_match = saved.1;
        }
        fixed[r] = true;
    }
    Ok(matching
        .row_match
        .into_iter()
        .map(|c| c.expect("perfect matching"))
        .collect())
}

fn reroute(
    m: &CostMatrix,
    matching: &mut ZeroMatching,
    fixed: &[bool],
    row: usize,
    seen: &mut [bool],
) -> bool {
    for c in 0..m.cols {
        if seen[c] || !m.is_zero(row, c) {
            continue;
        }
        let owner = matching.col_match[c];
        if owner.is_some_and(|o| fixed[o]) {
            continue;
        }
        seen[c] = true;
        let free = match owner {
            None => true,
            Some(o) => reroute(m, matching, fixed, o, seen),
        };
        if free {
            matching.row_match[row] = Some(c);
            matching.col_match[c] = Some(row);
            return true;
        }
    }
    false
}

/// Exhaustive minimum over all assignments of `min(rows, cols)` pairs.
///
/// Ties go to the assignment whose per-row column sequence is
/// lexicographically smallest, with unmatched rows ranking after every
/// column; this is the same order [`solve`] uses.
pub fn brute_force_solve(cost: &CostMatrix) -> Result<Assignment> {
    if cost.rows == 0 || cost.cols == 0 {
        return Err(Error::Dimension {
            rows: cost.rows,
            cols: cost.cols,
        });
    }
    let side = cost.rows.min(cost.cols);
    if side > BRUTE_FORCE_MAX {
        return Err(Error::Size {
            max: BRUTE_FORCE_MAX,
            got: side,
        });
    }

    struct Search<'a> {
        cost: &'a CostMatrix,
        skips_allowed: usize,
        col_used: Vec<bool>,
        current: Vec<Option<usize>>,
        best: Option<(f64, Vec<Option<usize>>)>,
    }

    impl Search<'_> {
        fn visit(&mut self, row: usize, skips: usize, acc: f64) {
            if row == self.cost.rows {
                if self.best.as_ref().is_none_or(|(b, _)| acc < *b) {
                    self.best = Some((acc, self.current.clone()));
                }
                return;
            }
            for c in 0..self.cost.cols {
                if self.col_used[c] {
                    continue;
                }
                self.col_used[c] = true;
                self.current[row] = Some(c);
                self.visit(row + 1, skips, acc + self.cost.get(row, c));
                self.col_used[c] = false;
            }
            if skips < self.skips_allowed {
                self.current[row] = None;
                self.visit(row + 1, skips + 1, acc);
            }
        }
    }

    let mut search = Search {
        cost,
        skips_allowed: cost.rows - side,
        col_used: vec![false; cost.cols],
        current: vec![None; cost.rows],
        best: None,
    };
    search.visit(0, 0, 0.0);
    let (_, best) = search.best.expect("at least one assignment exists");
    let pairs = best
        .into_iter()
        .enumerate()
        .filter_map(|(r, c)| c.map(|c| (r, c)))
        .collect();
    Ok(Assignment::from_pairs(pairs, cost))
}
