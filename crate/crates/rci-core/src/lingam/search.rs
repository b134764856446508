//! Root searches over an active variable set.
//!
//! Both searches accumulate, per candidate, the squared negative part of its
//! pairwise measures and return the candidate with the minimal total. The
//! eager variant evaluates all pairs; the lazy variant walks opponent cursors
//! from the current minimum and stops as soon as a candidate with the minimal
//! score has no comparisons left, which never changes the winner because
//! scores only ever grow.

use ndarray::Array2;

use crate::error::Result;
use crate::lingam::measure::{approx_entropy, pairwise_measure_cached};

/// Bookkeeping for one root search: per-candidate score accumulators, plus the
/// opponent cursors and the pending-comparison matrix used by the lazy search.
#[derive(Debug, Clone)]
pub struct SearchState {
    /// Nonnegative, nondecreasing dependence scores (one per active column).
    pub scores: Vec<f64>,
    /// Next opponent position per candidate (lazy search only).
    pub cursors: Vec<usize>,
    /// Symmetric matrix of not-yet-compared pairs (lazy search only).
    pub pending: Vec<Vec<bool>>,
    /// Number of pairwise-measure evaluations performed.
    pub evals: u64,
}

impl SearchState {
    fn new(m: usize, lazy: bool) -> Self {
        let pending = if lazy {
            let mut pending = vec![vec![true; m]; m];
            for (i, row) in pending.iter_mut().enumerate() {
                row[i] = false; // self-comparisons are never evaluated
            }
            pending
        } else {
            Vec::new()
        };
        SearchState {
            scores: vec![0.0; m],
            cursors: vec![0; m],
            pending,
            evals: 0,
        }
    }

    fn argmin(&self) -> usize {
        let mut best = 0;
        for (i, &s) in self.scores.iter().enumerate().skip(1) {
            if s < self.scores[best] {
                best = i;
            }
        }
        best // ties resolve to the smallest position
    }
}

/// Columns with entropies computed lazily once per search.
struct ColumnSet<'a> {
    cols: &'a [&'a [f64]],
    entropies: Vec<Option<f64>>,
    scratch: Vec<f64>,
}

impl<'a> ColumnSet<'a> {
    fn new(cols: &'a [&'a [f64]]) -> Self {
        ColumnSet {
            cols,
            entropies: vec![None; cols.len()],
            scratch: Vec::new(),
        }
    }

    fn entropy(&mut self, i: usize) -> Result<f64> {
        if let Some(h) = self.entropies[i] {
            return Ok(h);
        }
        let h = approx_entropy(self.cols[i])?;
        self.entropies[i] = Some(h);
        Ok(h)
    }

    fn measure(&mut self, i: usize, j: usize) -> Result<f64> {
        let h_i = self.entropy(i)?;
        let h_j = self.entropy(j)?;
        pairwise_measure_cached(self.cols[i], self.cols[j], h_i, h_j, &mut self.scratch)
    }
}

fn neg_part_sq(c: f64) -> f64 {
    let m = c.min(0.0);
    m * m
}

/// Eager search: evaluates every unordered pair once.
pub(crate) fn find_root_core(cols: &[&[f64]]) -> Result<(usize, SearchState)> {
    let m = cols.len();
    let mut state = SearchState::new(m, false);
    if m == 1 {
        return Ok((0, state));
    }
    let mut set = ColumnSet::new(cols);
    for i in 0..m - 1 {
        for j in i + 1..m {
            let c = set.measure(i, j)?;
            state.evals += 1;
            state.scores[i] += neg_part_sq(c);
            state.scores[j] += neg_part_sq(-c);
        }
    }
    Ok((state.argmin(), state))
}

/// Lazy search: only the current minimum advances its comparisons.
pub(crate) fn find_root_plus_core(cols: &[&[f64]]) -> Result<(usize, SearchState)> {
    let m = cols.len();
    let mut state = SearchState::new(m, true);
    if m == 1 {
        return Ok((0, state));
    }
    let mut set = ColumnSet::new(cols);
    loop {
        let min = state.scores.iter().cloned().fold(f64::INFINITY, f64::min);
        let current: Vec<usize> = (0..m).filter(|&i| state.scores[i] == min).collect();
        if current.iter().any(|&i| state.cursors[i] >= m) {
            break;
        }
        for i in current {
            let o = state.cursors[i];
            if state.pending[i][o] {
                let c = set.measure(i, o)?;
                state.evals += 1;
                state.scores[i] += neg_part_sq(c);
                state.scores[o] += neg_part_sq(-c);
                state.pending[i][o] = false;
                state.pending[o][i] = false;
            }
            state.cursors[i] += 1;
        }
    }
    Ok((state.argmin(), state))
}

fn gather_columns<'a>(
    data: &Array2<f64>,
    active: &[usize],
    storage: &'a mut Vec<Vec<f64>>,
) -> Vec<&'a [f64]> {
    storage.clear();
    for &j in active {
        storage.push(data.column(j).iter().copied().collect());
    }
    storage.iter().map(|v| v.as_slice()).collect()
}

/// Returns the most plausibly exogenous variable among `active` columns of
/// `data` (columns assumed standardized), evaluating all pairs.
pub fn find_root(data: &Array2<f64>, active: &[usize]) -> Result<usize> {
    Ok(find_root_with_stats(data, active)?.0)
}

/// Same output as [`find_root`] with lazily scheduled comparisons.
pub fn find_root_plus(data: &Array2<f64>, active: &[usize]) -> Result<usize> {
    Ok(find_root_plus_with_stats(data, active)?.0)
}

/// [`find_root`] plus the search bookkeeping (scores, evaluation count).
pub fn find_root_with_stats(data: &Array2<f64>, active: &[usize]) -> Result<(usize, SearchState)> {
    assert!(!active.is_empty(), "active set must be nonempty");
    let mut storage = Vec::new();
    let cols = gather_columns(data, active, &mut storage);
    let (pos, state) = find_root_core(&cols)?;
    Ok((active[pos], state))
}

/// [`find_root_plus`] plus the search bookkeeping.
pub fn find_root_plus_with_stats(
    data: &Array2<f64>,
    active: &[usize],
) -> Result<(usize, SearchState)> {
    assert!(!active.is_empty(), "active set must be nonempty");
    let mut storage = Vec::new();
    let cols = gather_columns(data, active, &mut storage);
    let (pos, state) = find_root_plus_core(&cols)?;
    Ok((active[pos], state))
}
