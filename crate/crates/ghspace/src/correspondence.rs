//! Relations and correspondences between finite point sets.
//!
//! A relation is any nonempty set of index pairs; a correspondence is a
//! relation whose projections onto both sides are surjective. Distortion of
//! a relation between two metric spaces is the largest absolute difference
//! of distances over pairs of related pairs; half its minimum over all
//! correspondences is the Gromov-Hausdorff distance (see [`crate::solver`]).
//!
//! Irreducible correspondences (minimal under inclusion) are enumerated both
//! by filtering and structurally, from their block decomposition: every
//! point either fans onto a block matched to it alone, or is matched
//! one-to-one.

use thiserror::Error;

use crate::rational::Rational;
use crate::space::FiniteMetricSpace;

/// Hard upper limit on the right side so rows fit in a `u64` bitmask.
const MASK_BITS: usize = 63;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error("relation must contain at least one pair")]
    EmptyRelation,
    #[error("pair ({0},{1}) is outside a {2}x{3} grid")]
    IndexOutOfRange(usize, usize, usize, usize),
    #[error("projection onto the {0} side is not surjective")]
    NotSurjective(&'static str),
    #[error("side of size {size} exceeds the cap {cap}")]
    SizeCapExceeded { size: usize, cap: usize },
    #[error("correspondence is not irreducible")]
    NotIrreducible,
}

/// Enumeration limits; exceeding them is an explicit error, never silent
/// truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumConfig {
    pub max_side: usize,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig { max_side: 5 }
    }
}

fn check_cap(n: usize, m: usize, cap: usize) -> Result<(), RelationError> {
    for size in [n, m] {
        if size == 0 || size > cap || size > MASK_BITS {
            return Err(RelationError::SizeCapExceeded { size, cap: cap.min(MASK_BITS) });
        }
    }
    Ok(())
}

/// A nonempty set of index pairs between a left and a right point set,
/// stored as one right-side bitmask per left point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    left_size: usize,
    right_size: usize,
    rows: Vec<u64>,
}

impl Relation {
    pub fn new(
        left_size: usize,
        right_size: usize,
        pairs: &[(usize, usize)],
    ) -> Result<Self, RelationError> {
        if right_size > MASK_BITS {
            return Err(RelationError::SizeCapExceeded { size: right_size, cap: MASK_BITS });
        }
        if pairs.is_empty() {
            return Err(RelationError::EmptyRelation);
        }
        let mut rows = vec![0u64; left_size];
        for &(i, j) in pairs {
            if i >= left_size || j >= right_size {
                return Err(RelationError::IndexOutOfRange(i, j, left_size, right_size));
            }
            rows[i] |= 1 << j;
        }
        Ok(Relation { left_size, right_size, rows })
    }

    pub fn left_size(&self) -> usize {
        self.left_size
    }

    pub fn right_size(&self) -> usize {
        self.right_size
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i < self.left_size && j < self.right_size && self.rows[i] & (1 << j) != 0
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let mask = self.rows[i];
        (0..self.right_size).filter(move |j| mask & (1 << j) != 0)
    }

    /// All pairs in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.left_size)
            .flat_map(|i| self.row(i).map(move |j| (i, j)))
            .collect()
    }

    pub fn pair_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    fn column_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.right_size];
        for &row in &self.rows {
            let mut bits = row;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                counts[j] += 1;
                bits &= bits - 1;
            }
        }
        counts
    }
}

/// A relation whose projections onto both sides are surjective.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Correspondence(Relation);

impl Correspondence {
    pub fn new(
        left_size: usize,
        right_size: usize,
        pairs: &[(usize, usize)],
    ) -> Result<Self, RelationError> {
        Relation::new(left_size, right_size, pairs)?.into_correspondence()
    }

    /// The identity bijection on `n` points.
    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| 1u64 << i).collect();
        Correspondence(Relation { left_size: n, right_size: n, rows })
    }

    pub(crate) fn from_rows(rows: Vec<u64>, right_size: usize) -> Self {
        let left_size = rows.len();
        debug_assert!(rows.iter().all(|&r| r != 0));
        debug_assert_eq!(rows.iter().fold(0, |a, &r| a | r), full_mask(right_size));
        Correspondence(Relation { left_size, right_size, rows })
    }

    pub fn relation(&self) -> &Relation {
        &self.0
    }

    pub fn left_size(&self) -> usize {
        self.0.left_size
    }

    pub fn right_size(&self) -> usize {
        self.0.right_size
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.0.pairs()
    }
}

impl Relation {
    /// Checks both surjectivity conditions and upgrades to a correspondence.
    pub fn into_correspondence(self) -> Result<Correspondence, RelationError> {
        if self.rows.contains(&0) {
            return Err(RelationError::NotSurjective("left"));
        }
        if self.rows.iter().fold(0, |a, &r| a | r) != full_mask(self.right_size) {
            return Err(RelationError::NotSurjective("right"));
        }
        Ok(Correspondence(self))
    }
}

fn full_mask(bits: usize) -> u64 {
    (1u64 << bits) - 1
}

/// `dis R`: the largest `||xx'| - |yy'||` over pairs of related pairs.
/// Zero for a single-pair relation. Every pair must index within both
/// spaces.
pub fn distortion(
    relation: &Relation,
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
) -> Result<Rational, RelationError> {
    let pairs = relation.pairs();
    for &(i, j) in &pairs {
        if i >= x.len() || j >= y.len() {
            return Err(RelationError::IndexOutOfRange(i, j, x.len(), y.len()));
        }
    }
    let mut worst = Rational::zero();
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for &(i2, j2) in &pairs[a..] {
            let diff = x.dist(i, i2).abs_diff(y.dist(j, j2));
            if diff > worst {
                worst = diff;
            }
        }
    }
    Ok(worst)
}

/// Iterator over all correspondences between `n` and `m` points, each
/// yielded exactly once, ordered lexicographically by their sorted pair
/// lists.
pub struct CorrespondenceIter {
    pair_count: usize,
    right_size: usize,
    // current subset as increasing pair indices, plus incremental coverage
    stack: Vec<usize>,
    rows: Vec<u64>,
    col_counts: Vec<usize>,
    uncovered_left: usize,
    uncovered_right: usize,
    started: bool,
}

impl CorrespondenceIter {
    fn push(&mut self, t: usize) {
        let (i, j) = (t / self.right_size, t % self.right_size);
        if self.rows[i] == 0 {
            self.uncovered_left -= 1;
        }
        self.rows[i] |= 1 << j;
        if self.col_counts[j] == 0 {
            self.uncovered_right -= 1;
        }
        self.col_counts[j] += 1;
        self.stack.push(t);
    }

    fn pop(&mut self) -> Option<usize> {
        let t = self.stack.pop()?;
        let (i, j) = (t / self.right_size, t % self.right_size);
        self.rows[i] &= !(1 << j);
        if self.rows[i] == 0 {
            self.uncovered_left += 1;
        }
        self.col_counts[j] -= 1;
        if self.col_counts[j] == 0 {
            self.uncovered_right += 1;
        }
        Some(t)
    }

    /// Advances to the next nonempty subset in preorder (lexicographic on
    /// sorted pair lists). Returns false when exhausted.
    fn advance(&mut self) -> bool {
        if !self.started {
            self.started = true;
            self.push(0);
            return true;
        }
        let last = *self.stack.last().expect("non-empty while running");
        if last + 1 < self.pair_count {
            self.push(last + 1);
            return true;
        }
        loop {
            let Some(popped) = self.pop() else { return false };
            if popped + 1 < self.pair_count {
                self.push(popped + 1);
                return true;
            }
        }
    }
}

impl Iterator for CorrespondenceIter {
    type Item = Correspondence;

    fn next(&mut self) -> Option<Self::Item> {
        while self.advance() {
            if self.uncovered_left == 0 && self.uncovered_right == 0 {
                return Some(Correspondence::from_rows(self.rows.clone(), self.right_size));
            }
        }
        None
    }
}

/// Streams every subset of the `n x m` grid with surjective projections.
pub fn enumerate_correspondences(
    n: usize,
    m: usize,
    config: &EnumConfig,
) -> Result<CorrespondenceIter, RelationError> {
    check_cap(n, m, config.max_side)?;
    Ok(CorrespondenceIter {
        pair_count: n * m,
        right_size: m,
        stack: Vec::with_capacity(n * m),
        rows: vec![0; n],
        col_counts: vec![0; m],
        uncovered_left: n,
        uncovered_right: m,
        started: false,
    })
}

/// True iff removing any single pair breaks surjectivity: every pair has a
/// singleton image or a singleton preimage.
pub fn is_irreducible(c: &Correspondence) -> bool {
    let cols = c.0.column_counts();
    for i in 0..c.left_size() {
        let row = c.0.rows[i];
        if row.count_ones() == 1 {
            continue;
        }
        let mut bits = row;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            if cols[j] > 1 {
                return false;
            }
            bits &= bits - 1;
        }
    }
    true
}

/// The block structure of an irreducible correspondence: left multi-point
/// blocks fanning onto single right points, one-to-one matched points, and
/// single left points fanning onto right multi-point blocks. Every point
/// appears in exactly one entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrreducibleDecomposition {
    left_size: usize,
    right_size: usize,
    /// Left blocks (>= 2 points) mapped to a single right point each.
    pub left_blocks: Vec<(Vec<usize>, usize)>,
    /// One-to-one matched singletons, sorted by left index.
    pub matched: Vec<(usize, usize)>,
    /// Single left points mapped onto right blocks (>= 2 points) each.
    pub right_blocks: Vec<(usize, Vec<usize>)>,
}

impl IrreducibleDecomposition {
    /// Rebuilds the correspondence; round-trips exactly.
    pub fn reconstruct(&self) -> Result<Correspondence, RelationError> {
        let mut pairs = Vec::new();
        for (block, j) in &self.left_blocks {
            pairs.extend(block.iter().map(|&i| (i, *j)));
        }
        pairs.extend(self.matched.iter().copied());
        for (i, block) in &self.right_blocks {
            pairs.extend(block.iter().map(|&j| (*i, j)));
        }
        Correspondence::new(self.left_size, self.right_size, &pairs)
    }
}

/// Classifies each point of an irreducible correspondence by its image or
/// preimage size.
pub fn decompose_irreducible(
    c: &Correspondence,
) -> Result<IrreducibleDecomposition, RelationError> {
    if !is_irreducible(c) {
        return Err(RelationError::NotIrreducible);
    }
    let cols = c.0.column_counts();
    let mut left_blocks = Vec::new();
    let mut matched = Vec::new();
    let mut right_blocks = Vec::new();
    for i in 0..c.left_size() {
        let row: Vec<usize> = c.0.row(i).collect();
        if row.len() > 1 {
            right_blocks.push((i, row));
        } else if cols[row[0]] == 1 {
            matched.push((i, row[0]));
        }
        // rows mapping into a shared right point are collected below
    }
    for (j, &count) in cols.iter().enumerate() {
        if count > 1 {
            let block: Vec<usize> =
                (0..c.left_size()).filter(|&i| c.0.contains(i, j)).collect();
            left_blocks.push((block, j));
        }
    }
    Ok(IrreducibleDecomposition {
        left_size: c.left_size(),
        right_size: c.right_size(),
        left_blocks,
        matched,
        right_blocks,
    })
}

/// Deterministically shrinks a correspondence to an irreducible one it
/// contains, removing the lexicographically greatest removable pair first.
pub fn irreducible_subset(c: &Correspondence) -> Correspondence {
    let mut rows = c.0.rows.clone();
    let mut cols = c.0.column_counts();
    loop {
        let mut removable: Option<(usize, usize)> = None;
        for (i, &row) in rows.iter().enumerate() {
            if row.count_ones() <= 1 {
                continue;
            }
            let mut bits = row;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                if cols[j] > 1 {
                    removable = Some((i, j)); // keep scanning: lex-greatest wins
                }
                bits &= bits - 1;
            }
        }
        match removable {
            Some((i, j)) => {
                rows[i] &= !(1 << j);
                cols[j] -= 1;
            }
            None => return Correspondence::from_rows(rows, c.right_size()),
        }
    }
}

/// Generates exactly the irreducible correspondences, structurally: choose
/// how many left blocks (`p`), matched pairs (`q`) and right blocks (`r`)
/// there are, then every way to fill and wire them. Deterministic order, no
/// duplicates.
pub fn enumerate_irreducible(
    n: usize,
    m: usize,
    config: &EnumConfig,
) -> Result<Vec<Correspondence>, RelationError> {
    check_cap(n, m, config.max_side)?;
    let mut out = Vec::new();
    for p in 0..=m {
        for q in 0..=n.min(m) {
            for r in 0..=n {
                if p + q > m || q + r > n {
                    continue;
                }
                let left_in_blocks = n - q - r; // points inside left blocks
                let right_in_blocks = m - p - q;
                let feasible_left = (p == 0 && left_in_blocks == 0)
                    || (p > 0 && left_in_blocks >= 2 * p);
                let feasible_right = (r == 0 && right_in_blocks == 0)
                    || (r > 0 && right_in_blocks >= 2 * r);
                if feasible_left && feasible_right {
                    emit_shape(n, m, p, q, r, &mut out);
                }
            }
        }
    }
    Ok(out)
}

fn emit_shape(n: usize, m: usize, p: usize, q: usize, r: usize, out: &mut Vec<Correspondence>) {
    let left: Vec<usize> = (0..n).collect();
    let right: Vec<usize> = (0..m).collect();
    // left side: choose fan points (X2), matched points (X''1); rest forms blocks
    for_each_subset(&left, r, &mut |fan_left, rest| {
        for_each_subset(rest, q, &mut |matched_left, block_left| {
            for_each_partition(block_left, p, &mut |left_blocks| {
                for_each_subset(&right, p, &mut |block_targets, rest_r| {
                    for_each_subset(rest_r, q, &mut |matched_right, fan_right| {
                        for_each_partition(fan_right, r, &mut |right_blocks| {
                            emit_wirings(
                                n,
                                m,
                                fan_left,
                                matched_left,
                                left_blocks,
                                block_targets,
                                matched_right,
                                right_blocks,
                                out,
                            );
                        });
                    });
                });
            });
        });
    });
}

#[allow(clippy::too_many_arguments)]
fn emit_wirings(
    n: usize,
    m: usize,
    fan_left: &[usize],
    matched_left: &[usize],
    left_blocks: &[Vec<usize>],
    block_targets: &[usize],
    matched_right: &[usize],
    right_blocks: &[Vec<usize>],
    out: &mut Vec<Correspondence>,
) {
    for_each_permutation(block_targets.len(), &mut |sigma| {
        for_each_permutation(matched_right.len(), &mut |tau| {
            for_each_permutation(right_blocks.len(), &mut |rho| {
                let mut pairs = Vec::new();
                for (b, block) in left_blocks.iter().enumerate() {
                    let target = block_targets[sigma[b]];
                    pairs.extend(block.iter().map(|&i| (i, target)));
                }
                for (a, &i) in matched_left.iter().enumerate() {
                    pairs.push((i, matched_right[tau[a]]));
                }
                for (f, &i) in fan_left.iter().enumerate() {
                    pairs.extend(right_blocks[rho[f]].iter().map(|&j| (i, j)));
                }
                out.push(
                    Correspondence::new(n, m, &pairs)
                        .expect("structural enumeration emits valid correspondences"),
                );
            });
        });
    });
}

/// All `k`-element subsets of `items` (which is sorted), in lexicographic
/// order; calls `f(subset, complement)`.
fn for_each_subset(items: &[usize], k: usize, f: &mut dyn FnMut(&[usize], &[usize])) {
    fn rec(
        items: &[usize],
        start: usize,
        k: usize,
        chosen: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize], &[usize]),
    ) {
        if chosen.len() == k {
            let rest: Vec<usize> =
                items.iter().copied().filter(|v| !chosen.contains(v)).collect();
            f(chosen, &rest);
            return;
        }
        let needed = k - chosen.len();
        for idx in start..=items.len().saturating_sub(needed) {
            chosen.push(items[idx]);
            rec(items, idx + 1, k, chosen, f);
            chosen.pop();
        }
    }
    if k > items.len() {
        return;
    }
    rec(items, 0, k, &mut Vec::new(), f);
}

/// All partitions of `items` into exactly `count` unordered blocks of at
/// least two elements, canonical (each block led by its minimum, blocks
/// ordered by leader).
fn for_each_partition(items: &[usize], count: usize, f: &mut dyn FnMut(&[Vec<usize>])) {
    fn rec(
        remaining: &[usize],
        blocks_left: usize,
        acc: &mut Vec<Vec<usize>>,
        f: &mut dyn FnMut(&[Vec<usize>]),
    ) {
        if blocks_left == 0 {
            if remaining.is_empty() {
                f(acc);
            }
            return;
        }
        if remaining.len() < 2 * blocks_left {
            return;
        }
        let leader = remaining[0];
        let rest = &remaining[1..];
        // choose >= 1 mates for the leader, leaving room for other blocks
        let max_mates = rest.len() - 2 * (blocks_left - 1);
        for mates in 1..=max_mates {
            for_each_subset(rest, mates, &mut |chosen, complement| {
                let mut block = vec![leader];
                block.extend_from_slice(chosen);
                acc.push(block);
                rec(complement, blocks_left - 1, acc, f);
                acc.pop();
            });
        }
    }
    if count == 0 {
        if items.is_empty() {
            f(&[]);
        }
        return;
    }
    rec(items, count, &mut Vec::new(), f);
}

/// All permutations of `0..k` in lexicographic order.
fn for_each_permutation(k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(k: usize, acc: &mut Vec<usize>, used: &mut Vec<bool>, f: &mut dyn FnMut(&[usize])) {
        if acc.len() == k {
            f(acc);
            return;
        }
        for v in 0..k {
            if !used[v] {
                used[v] = true;
                acc.push(v);
                rec(k, acc, used, f);
                acc.pop();
                used[v] = false;
            }
        }
    }
    rec(k, &mut Vec::new(), &mut vec![false; k], f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;
    use crate::space::test_util::{space, triangle_345};
    use crate::space::FiniteMetricSpace;
    use std::collections::BTreeSet;

    fn corr(n: usize, m: usize, pairs: &[(usize, usize)]) -> Correspondence {
        Correspondence::new(n, m, pairs).unwrap()
    }

    #[test]
    fn relation_rejects_bad_input() {
        assert_eq!(Relation::new(2, 2, &[]), Err(RelationError::EmptyRelation));
        assert_eq!(
            Relation::new(2, 2, &[(0, 2)]),
            Err(RelationError::IndexOutOfRange(0, 2, 2, 2))
        );
        assert!(matches!(
            Correspondence::new(2, 2, &[(0, 0), (0, 1)]),
            Err(RelationError::NotSurjective("left"))
        ));
    }

    #[test]
    fn distortion_examples() {
        let x = triangle_345();
        assert_eq!(
            distortion(Correspondence::identity(3).relation(), &x, &x).unwrap(),
            Rational::zero()
        );

        // full relation between a point and a two-point space of diameter 1
        let one = FiniteMetricSpace::point("a");
        let two = FiniteMetricSpace::two_point(Rational::int(1));
        let full = corr(1, 2, &[(0, 0), (0, 1)]);
        assert_eq!(distortion(full.relation(), &one, &two).unwrap(), Rational::int(1));

        // single pair-of-pairs |3 - 5|
        let a = FiniteMetricSpace::two_point(Rational::int(3));
        let b = FiniteMetricSpace::two_point(Rational::int(5));
        let bij = corr(2, 2, &[(0, 0), (1, 1)]);
        assert_eq!(distortion(bij.relation(), &a, &b).unwrap(), Rational::int(2));

        // single-pair relation has zero distortion
        let single = Relation::new(2, 2, &[(1, 0)]).unwrap();
        assert_eq!(distortion(&single, &a, &b).unwrap(), Rational::zero());
    }

    #[test]
    fn distortion_rejects_out_of_range_pairs() {
        let x = triangle_345();
        let two = FiniteMetricSpace::two_point(Rational::int(1));
        let id = Correspondence::identity(3);
        assert_eq!(
            distortion(id.relation(), &x, &two),
            Err(RelationError::IndexOutOfRange(2, 2, 3, 2))
        );
        // a relation on a smaller grid still evaluates
        let small = Relation::new(2, 2, &[(0, 0), (1, 1)]).unwrap();
        assert!(distortion(&small, &x, &x).is_ok());
    }

    #[test]
    fn enumeration_counts_small_grids() {
        let cfg = EnumConfig::default();
        assert_eq!(enumerate_correspondences(1, 1, &cfg).unwrap().count(), 1);
        assert_eq!(enumerate_correspondences(1, 2, &cfg).unwrap().count(), 1);
        // brute force over all 16 subsets of the 2x2 grid leaves 7
        assert_eq!(enumerate_correspondences(2, 2, &cfg).unwrap().count(), 7);
    }

    #[test]
    fn enumeration_is_lexicographic_and_duplicate_free() {
        let cfg = EnumConfig::default();
        let all: Vec<Vec<(usize, usize)>> = enumerate_correspondences(2, 2, &cfg)
            .unwrap()
            .map(|c| c.pairs())
            .collect();
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(all, sorted, "lexicographic order, no duplicates");
    }

    #[test]
    fn enumeration_respects_cap() {
        let cfg = EnumConfig { max_side: 3 };
        assert!(matches!(
            enumerate_correspondences(4, 2, &cfg),
            Err(RelationError::SizeCapExceeded { size: 4, cap: 3 })
        ));
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible(&corr(1, 2, &[(0, 0), (0, 1)])));
        let full = corr(2, 2, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert!(!is_irreducible(&full));
        // every single-pair removal must be tested: (1,0) and (1,1) share
        // left point 1, and (0,0),(1,0) share right point 0
        let three = corr(2, 2, &[(0, 0), (1, 0), (1, 1)]);
        assert!(!is_irreducible(&three), "contains the bijection {{(0,0),(1,1)}}");
    }

    #[test]
    fn decompose_identity_and_fans() {
        let id = Correspondence::identity(3);
        let d = decompose_irreducible(&id).unwrap();
        assert!(d.left_blocks.is_empty() && d.right_blocks.is_empty());
        assert_eq!(d.matched, vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(d.reconstruct().unwrap(), id);

        let fan = corr(2, 1, &[(0, 0), (1, 0)]);
        let d = decompose_irreducible(&fan).unwrap();
        assert_eq!(d.left_blocks, vec![(vec![0, 1], 0)]);
        assert!(d.matched.is_empty() && d.right_blocks.is_empty());
        assert_eq!(d.reconstruct().unwrap(), fan);

        let mixed = corr(2, 3, &[(0, 0), (0, 1), (1, 2)]);
        let d = decompose_irreducible(&mixed).unwrap();
        assert_eq!(d.right_blocks, vec![(0, vec![0, 1])]);
        assert_eq!(d.matched, vec![(1, 2)]);
        assert_eq!(d.reconstruct().unwrap(), mixed);
    }

    #[test]
    fn decompose_rejects_reducible() {
        let full = corr(2, 2, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(decompose_irreducible(&full), Err(RelationError::NotIrreducible));
    }

    /// Oracle: filter the full enumeration by `is_irreducible` and compare
    /// with the structural generator, as sets, for every small shape.
    #[test]
    fn structural_enumeration_matches_filtering_oracle() {
        let cfg = EnumConfig::default();
        for n in 1..=4 {
            for m in 1..=4 {
                if n * m > 12 {
                    continue;
                }
                let filtered: BTreeSet<Vec<(usize, usize)>> =
                    enumerate_correspondences(n, m, &cfg)
                        .unwrap()
                        .filter(is_irreducible)
                        .map(|c| c.pairs())
                        .collect();
                let structural: Vec<Vec<(usize, usize)>> = enumerate_irreducible(n, m, &cfg)
                    .unwrap()
                    .iter()
                    .map(|c| c.pairs())
                    .collect();
                let structural_set: BTreeSet<_> = structural.iter().cloned().collect();
                assert_eq!(structural.len(), structural_set.len(), "{n}x{m}: duplicates");
                assert_eq!(structural_set, filtered, "{n}x{m}: sets differ");
            }
        }
    }

    /// Counts confirmed by the generate-and-filter oracle above before
    /// freezing: the only irreducible correspondences on the 2x2 grid are
    /// the two bijections (every 3-pair subset contains a bijection).
    #[test]
    fn irreducible_counts_frozen() {
        let cfg = EnumConfig::default();
        assert_eq!(enumerate_irreducible(1, 1, &cfg).unwrap().len(), 1);
        assert_eq!(enumerate_irreducible(1, 4, &cfg).unwrap().len(), 1);
        assert_eq!(enumerate_irreducible(3, 1, &cfg).unwrap().len(), 1);
        assert_eq!(enumerate_irreducible(2, 2, &cfg).unwrap().len(), 2);
        assert_eq!(enumerate_irreducible(2, 3, &cfg).unwrap().len(), 6);
    }

    #[test]
    fn every_correspondence_contains_an_irreducible_subset() {
        let cfg = EnumConfig::default();
        for (n, m) in [(2, 2), (2, 3), (3, 3)] {
            for c in enumerate_correspondences(n, m, &cfg).unwrap() {
                let sub = irreducible_subset(&c);
                assert!(is_irreducible(&sub));
                assert!(sub
                    .pairs()
                    .iter()
                    .all(|&(i, j)| c.relation().contains(i, j)));
            }
        }
    }

    #[test]
    fn subset_distortion_never_increases() {
        let cfg = EnumConfig::default();
        let x = triangle_345();
        let y = space(&[&[0, 1, 2], &[1, 0, 2], &[2, 2, 0]]);
        for c in enumerate_correspondences(3, 3, &cfg).unwrap() {
            let sub = irreducible_subset(&c);
            let full = distortion(c.relation(), &x, &y).unwrap();
            let reduced = distortion(sub.relation(), &x, &y).unwrap();
            assert!(reduced <= full);
        }
    }
}
