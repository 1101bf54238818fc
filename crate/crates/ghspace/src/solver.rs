//! Exact Gromov-Hausdorff distance between finite metric spaces.
//!
//! `d_GH(X, Y)` is half the minimum distortion over all correspondences.
//! The solver works in two phases on integer matrices obtained by clearing
//! denominators (exactness is preserved; arithmetic falls back to big
//! integers when the common denominator overflows `i128`):
//!
//! 1. depth-first branch and bound over assignments of each left point to a
//!    nonempty subset of right points, pruning against a monotone incumbent
//!    seeded by a rank-matching bijection and cutting off at an admissible
//!    lower bound (every distance must be approximated by something in the
//!    other space's distance multiset), which yields the minimum distortion;
//! 2. a deterministic lexicographic search for the least irreducible
//!    correspondence achieving that minimum, which is the returned witness.
//!    Only subsets that are disjoint unions of stars are explored, since
//!    anything else can never extend to an irreducible correspondence.
//!
//! Phase 2 is always sequential, so the witness and the reported node count
//! are identical across runs and across thread configurations; the parallel
//! mode only splits phase 1 subtrees, and workers can only improve the
//! shared incumbent value.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::ser::{Serialize, SerializeStruct, Serializer};
use std::sync::Mutex;
use thiserror::Error;

use crate::correspondence::{is_irreducible, Correspondence};
use crate::rational::Rational;
use crate::space::FiniteMetricSpace;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("space with {size} points exceeds the solver cap of {cap} per side")]
    SizeCapExceeded { size: usize, cap: usize },
}

/// Solver limits and execution mode. The result is bit-identical whichever
/// mode is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    /// Maximum number of points per side.
    pub max_side: usize,
    /// Split phase-1 subtrees across the rayon pool.
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { max_side: 8, parallel: false }
    }
}

/// Exact distance with an irreducible optimal witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GHResult {
    /// `d_GH(X, Y)`, half the minimum distortion.
    pub distance: Rational,
    /// The minimum distortion itself.
    pub distortion: Rational,
    /// Lexicographically least irreducible correspondence achieving it.
    pub optimal: Correspondence,
    /// Nodes expanded while locating the witness (deterministic).
    pub nodes_explored: u64,
}

impl Serialize for GHResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("GHResult", 3)?;
        s.serialize_field("distance", &self.distance)?;
        s.serialize_field("optimal_pairs", &self.optimal.pairs())?;
        s.serialize_field("nodes", &self.nodes_explored)?;
        s.end()
    }
}

/// `d_GH(X, Y) <= max(diam X, diam Y) / 2`, the diameter upper bound.
pub fn gh_upper_bound_diam(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Rational {
    x.diameter().max(y.diameter()).half()
}

/// Exact `d_GH` with the default configuration.
pub fn gh_distance_exact(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
) -> Result<GHResult, SolverError> {
    gh_distance_exact_with(x, y, &SolverConfig::default())
}

pub fn gh_distance_exact_with(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    config: &SolverConfig,
) -> Result<GHResult, SolverError> {
    let cap = config.max_side.min(63);
    for size in [x.len(), y.len()] {
        if size > cap {
            return Err(SolverError::SizeCapExceeded { size, cap });
        }
    }
    let (denom, xs, ys) = scaled_matrices(x, y);
    let (scaled_distortion, rows, nodes) = match (to_i128(&xs), to_i128(&ys)) {
        (Some(xs), Some(ys)) => {
            let best = min_distortion(&xs, &ys, config.parallel);
            let mut nodes = 0;
            let rows = lex_least_witness(&xs, &ys, &best, &mut nodes);
            (BigInt::from(best), rows, nodes)
        }
        _ => {
            let best = min_distortion(&xs, &ys, config.parallel);
            let mut nodes = 0;
            let rows = lex_least_witness(&xs, &ys, &best, &mut nodes);
            (best, rows, nodes)
        }
    };
    let distortion = Rational::from_big(scaled_distortion.clone(), denom.clone())
        .expect("denominator is positive");
    let distance = Rational::from_big(scaled_distortion, denom * BigInt::from(2))
        .expect("denominator is positive");
    Ok(GHResult {
        distance,
        distortion,
        optimal: Correspondence::from_rows(rows, y.len()),
        nodes_explored: nodes,
    })
}

/// Clears denominators: returns `L` and both matrices times `L`.
fn scaled_matrices(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
) -> (BigInt, Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let mut lcm = BigInt::from(1);
    for space in [x, y] {
        for row in space.matrix() {
            for v in row {
                lcm = lcm.lcm(v.denom());
            }
        }
    }
    let scale = |space: &FiniteMetricSpace| -> Vec<Vec<BigInt>> {
        space
            .matrix()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| v.numer() * (&lcm / v.denom()))
                    .collect()
            })
            .collect()
    };
    (lcm.clone(), scale(x), scale(y))
}

fn to_i128(matrix: &[Vec<BigInt>]) -> Option<Vec<Vec<i128>>> {
    matrix
        .iter()
        .map(|row| row.iter().map(|v| v.to_i128()).collect())
        .collect()
}

/// Integer-like scalar the search runs over.
trait SolverNum: Clone + Ord + Send + Sync {
    fn zero() -> Self;
    fn abs_diff(a: &Self, b: &Self) -> Self;
}

impl SolverNum for i128 {
    fn zero() -> Self {
        0
    }
    fn abs_diff(a: &Self, b: &Self) -> Self {
        (a - b).abs()
    }
}

impl SolverNum for BigInt {
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn abs_diff(a: &Self, b: &Self) -> Self {
        (a - b).abs()
    }
}

/// Distortion of a correspondence given as one right-mask per left point.
fn rows_distortion<T: SolverNum>(rows: &[u64], x: &[Vec<T>], y: &[Vec<T>]) -> T {
    let mut worst = T::zero();
    let m = y.len();
    for (i, &row) in rows.iter().enumerate() {
        for j in bits(row, m) {
            for (i2, &row2) in rows.iter().enumerate().skip(i) {
                for j2 in bits(row2, m) {
                    let d = T::abs_diff(&x[i][i2], &y[j][j2]);
                    if d > worst {
                        worst = d;
                    }
                }
            }
        }
    }
    worst
}

fn bits(mask: u64, m: usize) -> impl Iterator<Item = usize> {
    (0..m).filter(move |j| mask & (1 << j) != 0)
}

/// An admissible lower bound on the distortion of every correspondence:
/// each pair of points on one side is related to some pair (possibly
/// degenerate) on the other, so its distance must be approximated by the
/// closest value in the other space's distance multiset (zero included).
fn distortion_lower_bound<T: SolverNum>(x: &[Vec<T>], y: &[Vec<T>]) -> T {
    fn side<T: SolverNum>(from: &[Vec<T>], to: &[Vec<T>], bound: &mut T) {
        for (i, row) in from.iter().enumerate() {
            for value in &row[i + 1..] {
                let mut closest: Option<T> = None;
                for (j, to_row) in to.iter().enumerate() {
                    for to_value in &to_row[j..] {
                        let d = T::abs_diff(value, to_value);
                        if closest.as_ref().is_none_or(|c| d < *c) {
                            closest = Some(d);
                        }
                    }
                }
                if let Some(c) = closest {
                    if c > *bound {
                        *bound = c;
                    }
                }
            }
        }
    }
    let mut bound = T::zero();
    side(x, y, &mut bound);
    side(y, x, &mut bound);
    bound
}

/// Rank-matching heuristic: order both sides by their sorted distance rows
/// and match ranks; surplus points pile onto the last rank of the other
/// side. Any correspondence works here, it only seeds the incumbent.
fn heuristic_rows<T: SolverNum>(x: &[Vec<T>], y: &[Vec<T>]) -> Vec<u64> {
    let rank = |mat: &[Vec<T>]| -> Vec<usize> {
        let mut order: Vec<usize> = (0..mat.len()).collect();
        let keys: Vec<Vec<T>> = mat
            .iter()
            .map(|row| {
                let mut k = row.clone();
                k.sort();
                k
            })
            .collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(a.cmp(&b)));
        order
    };
    let (n, m) = (x.len(), y.len());
    let left = rank(x);
    let right = rank(y);
    let mut rows = vec![0u64; n];
    for t in 0..n.max(m) {
        let i = left[t.min(n - 1)];
        let j = right[t.min(m - 1)];
        rows[i] |= 1 << j;
    }
    rows
}

/// Phase 1: the minimum distortion over all correspondences.
fn min_distortion<T: SolverNum>(x: &[Vec<T>], y: &[Vec<T>], parallel: bool) -> T {
    let (n, m) = (x.len(), y.len());
    let full: u64 = (1 << m) - 1;
    let incumbent = rows_distortion(&heuristic_rows(x, y), x, y);
    let lower = distortion_lower_bound(x, y);
    if incumbent == lower {
        return incumbent;
    }

    // within-mask distortion on Y: max distance between two members
    let mut internal: Vec<T> = vec![T::zero(); 1 << m];
    for mask in 1..(1u64 << m) {
        let j0 = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let mut v = internal[rest as usize].clone();
        for j in bits(rest, m) {
            let d = y[j0][j].clone();
            if d > v {
                v = d;
            }
        }
        internal[mask as usize] = v;
    }

    // candidate masks, small images first so bijection-like optima are found early
    let mut masks: Vec<u64> = (1..=full).collect();
    masks.sort_by_key(|&w| (w.count_ones(), w));

    let ctx = SearchCtx { x, y, m, internal, masks, lower };

    if parallel && n > 1 {
        let shared = Mutex::new(incumbent.clone());
        let roots: Vec<u64> = ctx.masks.clone();
        let best = roots
            .par_iter()
            .map(|&mask0| {
                let mut local = shared.lock().unwrap().clone();
                let cost = ctx.mask_cost(0, mask0, &[]);
                if cost < local {
                    let mut assigned = vec![mask0];
                    ctx.descend(1, &mut assigned, &cost, mask0, &mut local);
                    let mut g = shared.lock().unwrap();
                    if local < *g {
                        *g = local.clone();
                    }
                }
                local
            })
            .min()
            .unwrap_or_else(|| incumbent.clone());
        best.min(incumbent)
    } else {
        let mut best = incumbent;
        let mut assigned = Vec::with_capacity(n);
        ctx.descend(0, &mut assigned, &T::zero(), 0, &mut best);
        best
    }
}

struct SearchCtx<'a, T> {
    x: &'a [Vec<T>],
    y: &'a [Vec<T>],
    m: usize,
    internal: Vec<T>,
    masks: Vec<u64>,
    /// Admissible lower bound; reaching it ends the search.
    lower: T,
}

impl<T: SolverNum> SearchCtx<'_, T> {
    /// Distortion contributed by assigning `mask` to left point `level`,
    /// against the rows already assigned.
    fn mask_cost(&self, level: usize, mask: u64, assigned: &[u64]) -> T {
        let mut worst = self.internal[mask as usize].clone();
        for (prev, &pmask) in assigned.iter().enumerate() {
            let dx = &self.x[level][prev];
            for j in bits(mask, self.m) {
                for j2 in bits(pmask, self.m) {
                    let d = T::abs_diff(dx, &self.y[j][j2]);
                    if d > worst {
                        worst = d;
                    }
                }
            }
        }
        worst
    }

    fn descend(&self, level: usize, assigned: &mut Vec<u64>, partial: &T, covered: u64, best: &mut T) {
        if *best <= self.lower {
            return;
        }
        let n = self.x.len();
        let full: u64 = (1 << self.m) - 1;
        if level == n {
            debug_assert_eq!(covered, full);
            if *partial < *best {
                *best = partial.clone();
            }
            return;
        }
        let last = level == n - 1;
        for &mask in &self.masks {
            if last && mask & (full & !covered) != full & !covered {
                continue; // the final point must cover every missing right point
            }
            let cost = self.mask_cost(level, mask, assigned);
            let next = if cost > *partial { &cost } else { partial };
            if *next >= *best {
                continue;
            }
            let next = next.clone();
            assigned.push(mask);
            self.descend(level + 1, assigned, &next, covered | mask, best);
            assigned.pop();
        }
    }
}

/// Phase 2: the lexicographically least irreducible correspondence with
/// distortion equal to `target`, found by a preorder walk over pair subsets
/// (which visits them in lexicographic order of their sorted pair lists).
fn lex_least_witness<T: SolverNum>(
    x: &[Vec<T>],
    y: &[Vec<T>],
    target: &T,
    nodes: &mut u64,
) -> Vec<u64> {
    let (n, m) = (x.len(), y.len());
    let mut state = WitnessState {
        x,
        y,
        n,
        m,
        target,
        pairs: Vec::new(),
        values: Vec::new(),
        rows: vec![0u64; n],
        col_counts: vec![0usize; m],
        uncovered_left: n,
        uncovered_right: m,
        nodes,
    };
    // the least optimal correspondence always starts with a pair of left point 0
    for j in 0..m {
        if let Some(rows) = state.explore(0, j) {
            return rows;
        }
    }
    unreachable!("an irreducible optimal correspondence always exists");
}

struct WitnessState<'a, T> {
    x: &'a [Vec<T>],
    y: &'a [Vec<T>],
    n: usize,
    m: usize,
    target: &'a T,
    pairs: Vec<(usize, usize)>,
    values: Vec<T>, // running distortion after each push
    rows: Vec<u64>,
    col_counts: Vec<usize>,
    uncovered_left: usize,
    uncovered_right: usize,
    nodes: &'a mut u64,
}

impl<T: SolverNum> WitnessState<'_, T> {
    /// Distortion of the current subset extended by `(i, j)`.
    fn value_with(&self, i: usize, j: usize) -> T {
        let mut worst = self.values.last().cloned().unwrap_or_else(T::zero);
        for &(i2, j2) in &self.pairs {
            let d = T::abs_diff(&self.x[i][i2], &self.y[j][j2]);
            if d > worst {
                worst = d;
            }
        }
        worst
    }

    /// Adding `(i, j)` must keep the subset a disjoint union of stars:
    /// pairs only ever get added, so a removable pair (fan row meeting a
    /// fan column) would stay removable in every superset, and no superset
    /// could be irreducible.
    fn keeps_star_shape(&self, i: usize, j: usize) -> bool {
        let row = self.rows[i].count_ones();
        let col = self.col_counts[j];
        if row >= 1 && col >= 1 {
            return false;
        }
        if row == 0 && col == 1 {
            // the one left point already on column j must not be a fan center
            return (0..self.n)
                .find(|&a| self.rows[a] & (1 << j) != 0)
                .map(|a| self.rows[a].count_ones() == 1)
                .unwrap_or(true);
        }
        if col == 0 && row == 1 {
            let j_old = self.rows[i].trailing_zeros() as usize;
            return self.col_counts[j_old] == 1;
        }
        true
    }

    /// Visits the subset `current + (i, j)` and its preorder descendants.
    /// Returns the witness rows as soon as one qualifies.
    fn explore(&mut self, i: usize, j: usize) -> Option<Vec<u64>> {
        if !self.keeps_star_shape(i, j) {
            return None;
        }
        let value = self.value_with(i, j);
        if value > *self.target {
            return None;
        }
        *self.nodes += 1;
        if self.rows[i] == 0 {
            self.uncovered_left -= 1;
        }
        self.rows[i] |= 1 << j;
        if self.col_counts[j] == 0 {
            self.uncovered_right -= 1;
        }
        self.col_counts[j] += 1;
        self.pairs.push((i, j));
        self.values.push(value);

        let complete = self.uncovered_left == 0 && self.uncovered_right == 0;
        let mut result = None;
        if complete {
            // supersets of a correspondence are never irreducible, so this
            // subtree ends here either way
            let candidate = Correspondence::from_rows(self.rows.clone(), self.m);
            if is_irreducible(&candidate) {
                result = Some(self.rows.clone());
            }
        } else {
            result = self.explore_children(i, j);
        }

        self.values.pop();
        self.pairs.pop();
        self.col_counts[j] -= 1;
        if self.col_counts[j] == 0 {
            self.uncovered_right += 1;
        }
        self.rows[i] &= !(1 << j);
        if self.rows[i] == 0 {
            self.uncovered_left += 1;
        }
        result
    }

    fn explore_children(&mut self, i: usize, j: usize) -> Option<Vec<u64>> {
        // candidates after (i, j) in pair order; once some left point below
        // the candidate's row is uncovered, no later candidate can fix it
        for i2 in i..self.n {
            let j_start = if i2 == i { j + 1 } else { 0 };
            if (0..i2).any(|a| self.rows[a] == 0) {
                return None;
            }
            for j2 in j_start..self.m {
                if let Some(rows) = self.explore(i2, j2) {
                    return Some(rows);
                }
            }
        }
        None
    }
}
