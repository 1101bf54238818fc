//! Finite metric spaces with exact rational distances.
//!
//! A [`FiniteMetricSpace`] is `n` labeled points and a symmetric distance
//! matrix validated against the metric axioms. On top of it this module
//! provides the genericity margin [`delta`] (minimum of all triangle slacks
//! and pairwise distance gaps), the generic-space predicate, structural
//! isomorphisms (distance-order-preserving bijections), and bounded
//! perturbations that stay inside the structural isomorphism class.

use serde::Serialize;
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("distance matrix is not square ({rows} rows, row {row} has {cols} columns)")]
    NotSquare { rows: usize, row: usize, cols: usize },
    #[error("{labels} labels given for a {rows}x{rows} matrix")]
    LabelCountMismatch { labels: usize, rows: usize },
    #[error("duplicate point label `{0}`")]
    DuplicateLabel(String),
    #[error("AsymmetricMatrix({i},{j}): dist[{i}][{j}] != dist[{j}][{i}]")]
    AsymmetricMatrix { i: usize, j: usize },
    #[error("NonzeroDiagonal({i}): dist[{i}][{i}] != 0")]
    NonzeroDiagonal { i: usize },
    #[error("NonpositiveOffDiagonal({i},{j}): dist[{i}][{j}] <= 0")]
    NonpositiveOffDiagonal { i: usize, j: usize },
    #[error("TriangleViolation({i},{j},{k}): dist[{i}][{j}] > dist[{i}][{k}] + dist[{k}][{j}]")]
    TriangleViolation { i: usize, j: usize, k: usize },
    #[error("operation undefined for a single-point space")]
    SinglePoint,
    #[error("perturbation bound exceeds delta(X)/3 or an offset exceeds the bound")]
    PerturbationTooLarge,
    #[error("space is not generic (delta = 0)")]
    NotGeneric,
    #[error("mapping does not preserve the distance order")]
    NotOrderPreserving,
}

/// All unordered point pairs `(i, j)` with `i < j`, in lexicographic order.
pub fn point_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// An `n`-point metric space with exact rational distances.
///
/// Immutable after construction; every accessor is pure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<Rational>>,
}

/// Validates the metric axioms and builds a space.
///
/// Checks run in a fixed order (symmetry, zero diagonal, positivity,
/// triangle inequality) and each error names the lexicographically first
/// offending index tuple.
pub fn validate_metric(
    labels: Vec<String>,
    dist: Vec<Vec<Rational>>,
) -> Result<FiniteMetricSpace, MetricError> {
    FiniteMetricSpace::new(labels, dist)
}

impl FiniteMetricSpace {
    pub fn new(labels: Vec<String>, dist: Vec<Vec<Rational>>) -> Result<Self, MetricError> {
        let n = dist.len();
        for (row, r) in dist.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::NotSquare { rows: n, row, cols: r.len() });
            }
        }
        if labels.len() != n {
            return Err(MetricError::LabelCountMismatch { labels: labels.len(), rows: n });
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(MetricError::DuplicateLabel(a.clone()));
            }
        }
        for (i, j) in point_pairs(n) {
            if dist[i][j] != dist[j][i] {
                return Err(MetricError::AsymmetricMatrix { i, j });
            }
        }
        for (i, row) in dist.iter().enumerate() {
            if !row[i].is_zero() {
                return Err(MetricError::NonzeroDiagonal { i });
            }
        }
        for (i, j) in point_pairs(n) {
            if !dist[i][j].is_positive() {
                return Err(MetricError::NonpositiveOffDiagonal { i, j });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    if dist[i][j] > &dist[i][k] + &dist[k][j] {
                        return Err(MetricError::TriangleViolation { i, j, k });
                    }
                }
            }
        }
        Ok(FiniteMetricSpace { labels, dist })
    }

    /// The one-point space.
    pub fn point(label: impl Into<String>) -> Self {
        FiniteMetricSpace {
            labels: vec![label.into()],
            dist: vec![vec![Rational::zero()]],
        }
    }

    /// The two-point space with the given (positive) distance.
    pub fn two_point(d: Rational) -> Self {
        assert!(d.is_positive(), "two-point distance must be positive");
        FiniteMetricSpace {
            labels: vec!["p1".into(), "p2".into()],
            dist: vec![
                vec![Rational::zero(), d.clone()],
                vec![d, Rational::zero()],
            ],
        }
    }

    /// Builds a space from the upper-triangular distances listed in
    /// lexicographic pair order, with labels `p1..pn`.
    pub fn from_pair_distances(n: usize, upper: &[Rational]) -> Result<Self, MetricError> {
        assert_eq!(upper.len(), n * (n - 1) / 2, "wrong number of pair distances");
        let mut dist = vec![vec![Rational::zero(); n]; n];
        for (t, (i, j)) in point_pairs(n).enumerate() {
            dist[i][j] = upper[t].clone();
            dist[j][i] = upper[t].clone();
        }
        let labels = (1..=n).map(|i| format!("p{i}")).collect();
        FiniteMetricSpace::new(labels, dist)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least one point by construction
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    /// `max |xy|` over all pairs; 0 for a one-point space.
    pub fn diameter(&self) -> Rational {
        point_pairs(self.len())
            .map(|(i, j)| self.dist[i][j].clone())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Same points with every distance multiplied by a positive factor.
    pub fn scaled(&self, factor: &Rational) -> FiniteMetricSpace {
        assert!(factor.is_positive(), "scale factor must be positive");
        FiniteMetricSpace {
            labels: self.labels.clone(),
            dist: self
                .dist
                .iter()
                .map(|row| row.iter().map(|d| d * factor).collect())
                .collect(),
        }
    }

    /// Reorders points by `perm`: point `a` of the result is point `perm[a]`.
    pub fn permuted(&self, perm: &[usize]) -> FiniteMetricSpace {
        let n = self.len();
        assert_eq!(perm.len(), n);
        let mut seen = vec![false; n];
        for &p in perm {
            assert!(p < n && !seen[p], "not a permutation");
            seen[p] = true;
        }
        let labels = perm.iter().map(|&p| self.labels[p].clone()).collect();
        let dist = perm
            .iter()
            .map(|&a| perm.iter().map(|&b| self.dist[a][b].clone()).collect())
            .collect();
        FiniteMetricSpace { labels, dist }
    }
}

/// Which minimum produced `delta(X)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeltaWitness {
    /// `n = 2`: delta is the single distance.
    TwoPoint,
    /// Triangle slack `|x_i x_j| + |x_j x_k| - |x_i x_k|`.
    TriangleSlack { i: usize, j: usize, k: usize },
    /// Distance gap `||x_i x_j| - |x_p x_q||` (`p = q` encodes the plain
    /// distance `|x_i x_j|`).
    DistanceGap { i: usize, j: usize, p: usize, q: usize },
}

/// The genericity margin of a space, with the index tuple achieving it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaValue {
    pub value: Rational,
    pub witness: DeltaWitness,
}

/// The genericity margin: the least of all triangle slacks
/// `|x_i x_j| + |x_j x_k| - |x_i x_k|` (three distinct indices) and all
/// distance gaps `||x_i x_j| - |x_p x_q||` taken over index quadruples with
/// at least three distinct members, `p = q` permitted (those terms are the
/// plain distances). For `n = 2` it is the single distance.
///
/// `delta(X) > 0` iff `X` is generic. The witness is the lexicographically
/// first tuple achieving the minimum.
pub fn delta(space: &FiniteMetricSpace) -> Result<DeltaValue, MetricError> {
    let n = space.len();
    if n < 2 {
        return Err(MetricError::SinglePoint);
    }
    if n == 2 {
        return Ok(DeltaValue {
            value: space.dist(0, 1).clone(),
            witness: DeltaWitness::TwoPoint,
        });
    }
    let mut best: Option<DeltaValue> = None;
    let mut consider = |value: Rational, witness: DeltaWitness| match &best {
        Some(current) if current.value <= value => {}
        _ => best = Some(DeltaValue { value, witness }),
    };
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let slack = &(space.dist(i, j) + space.dist(j, k)) - space.dist(i, k);
                consider(slack, DeltaWitness::TriangleSlack { i, j, k });
            }
        }
    }
    for (i, j) in point_pairs(n) {
        for p in 0..n {
            for q in p..n {
                // #{i, j, p, q} >= 3; p == q contributes |x_i x_j| itself.
                let mut idx = vec![i, j, p, q];
                idx.sort_unstable();
                idx.dedup();
                if idx.len() < 3 {
                    continue;
                }
                let gap = if p == q {
                    space.dist(i, j).clone()
                } else {
                    space.dist(i, j).abs_diff(space.dist(p, q))
                };
                consider(gap, DeltaWitness::DistanceGap { i, j, p, q });
            }
        }
    }
    Ok(best.expect("n >= 3 always yields candidate terms"))
}

/// True iff all non-zero distances are pairwise distinct and every triangle
/// inequality is strict; equivalently `delta(X) > 0`.
pub fn is_generic(space: &FiniteMetricSpace) -> Result<bool, MetricError> {
    Ok(delta(space)?.value.is_positive())
}

/// A bijection between two spaces preserving the order on distances:
/// `|xy| <= |zw|` iff `|f(x)f(y)| <= |f(z)f(w)|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuralIsomorphism {
    map: Vec<usize>,
}

impl StructuralIsomorphism {
    pub fn identity(n: usize) -> Self {
        StructuralIsomorphism { map: (0..n).collect() }
    }

    /// Validates that `map` is an order-preserving bijection before wrapping it.
    pub fn new_checked(
        from: &FiniteMetricSpace,
        to: &FiniteMetricSpace,
        map: Vec<usize>,
    ) -> Result<Self, MetricError> {
        let n = from.len();
        if to.len() != n || map.len() != n {
            return Err(MetricError::NotOrderPreserving);
        }
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(MetricError::NotOrderPreserving);
            }
            seen[v] = true;
        }
        let ranks_from = pair_ranks(from);
        let ranks_to = pair_ranks(to);
        if ranks_from.1 != ranks_to.1 {
            return Err(MetricError::NotOrderPreserving);
        }
        for (t, (i, j)) in point_pairs(n).enumerate() {
            let (a, b) = (map[i].min(map[j]), map[i].max(map[j]));
            if ranks_from.0[t] != ranks_to.0[pair_index(n, a, b)] {
                return Err(MetricError::NotOrderPreserving);
            }
        }
        Ok(StructuralIsomorphism { map })
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        StructuralIsomorphism { map: inv }
    }
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Rank of each pair's distance among the distinct distance values
/// (ascending), plus the number of pairs holding each rank.
fn pair_ranks(space: &FiniteMetricSpace) -> (Vec<usize>, Vec<usize>) {
    let n = space.len();
    let mut values: Vec<&Rational> = point_pairs(n).map(|(i, j)| space.dist(i, j)).collect();
    values.sort();
    values.dedup();
    let mut ranks = Vec::with_capacity(n * (n - 1) / 2);
    let mut counts = vec![0usize; values.len()];
    for (i, j) in point_pairs(n) {
        let r = values.binary_search(&space.dist(i, j)).expect("value present");
        ranks.push(r);
        counts[r] += 1;
    }
    (ranks, counts)
}

/// Searches for a structural isomorphism from `x` to `y`.
///
/// Returns the unique one when both spaces have all-distinct distances; with
/// ties, backtracks over rank-compatible bijections and returns the
/// lexicographically least assignment. `None` when the cardinalities differ
/// or no order-preserving bijection exists.
pub fn structural_isomorphism(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
) -> Option<StructuralIsomorphism> {
    let n = x.len();
    if y.len() != n {
        return None;
    }
    if n == 1 {
        return Some(StructuralIsomorphism::identity(1));
    }
    let (ranks_x, counts_x) = pair_ranks(x);
    let (ranks_y, counts_y) = pair_ranks(y);
    if counts_x != counts_y {
        return None;
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if assign(0, n, &ranks_x, &ranks_y, &mut map, &mut used) {
        Some(StructuralIsomorphism { map })
    } else {
        None
    }
}

fn assign(
    i: usize,
    n: usize,
    ranks_x: &[usize],
    ranks_y: &[usize],
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> bool {
    if i == n {
        return true;
    }
    'candidate: for c in 0..n {
        if used[c] {
            continue;
        }
        for (a, &fa) in map.iter().enumerate().take(i) {
            let (p, q) = (a.min(i), a.max(i));
            let (u, v) = (fa.min(c), fa.max(c));
            if ranks_x[pair_index(n, p, q)] != ranks_y[pair_index(n, u, v)] {
                continue 'candidate;
            }
        }
        map[i] = c;
        used[c] = true;
        if assign(i + 1, n, ranks_x, ranks_y, map, used) {
            return true;
        }
        map[i] = usize::MAX;
        used[c] = false;
    }
    false
}

/// Adds `offsets` to the distance matrix, guarded by the `delta/3` margin.
///
/// Requires symmetric offsets with zero diagonal, each strictly below
/// `bound`, and `bound <= delta(X)/3`. Within that margin the result is
/// guaranteed valid, generic and structurally isomorphic to `X` via the
/// identity indexing; all three guarantees are re-checked, not assumed.
pub fn perturb(
    space: &FiniteMetricSpace,
    offsets: &[Vec<Rational>],
    bound: &Rational,
) -> Result<FiniteMetricSpace, MetricError> {
    let n = space.len();
    if offsets.len() != n {
        return Err(MetricError::NotSquare { rows: n, row: offsets.len(), cols: 0 });
    }
    for (row, r) in offsets.iter().enumerate() {
        if r.len() != n {
            return Err(MetricError::NotSquare { rows: n, row, cols: r.len() });
        }
    }
    for (i, j) in point_pairs(n) {
        if offsets[i][j] != offsets[j][i] {
            return Err(MetricError::AsymmetricMatrix { i, j });
        }
    }
    for (i, row) in offsets.iter().enumerate() {
        if !row[i].is_zero() {
            return Err(MetricError::NonzeroDiagonal { i });
        }
    }
    for (i, j) in point_pairs(n) {
        if &offsets[i][j].abs() >= bound {
            return Err(MetricError::PerturbationTooLarge);
        }
    }
    let margin = &delta(space)?.value / &Rational::int(3);
    if bound > &margin {
        return Err(MetricError::PerturbationTooLarge);
    }
    let dist = space
        .dist
        .iter()
        .zip(offsets)
        .map(|(drow, orow)| drow.iter().zip(orow).map(|(d, o)| d + o).collect())
        .collect();
    let perturbed = FiniteMetricSpace::new(space.labels.clone(), dist)?;
    if !is_generic(&perturbed)? {
        return Err(MetricError::NotGeneric);
    }
    StructuralIsomorphism::new_checked(space, &perturbed, (0..n).collect())?;
    Ok(perturbed)
}

#[cfg(test)]
pub(crate) mod test_util {
    use super::*;

    /// Space from an integer distance matrix; panics on invalid input.
    pub fn space(matrix: &[&[i64]]) -> FiniteMetricSpace {
        let n = matrix.len();
        let labels = (1..=n).map(|i| format!("p{i}")).collect();
        let dist = matrix
            .iter()
            .map(|row| row.iter().map(|&v| Rational::int(v)).collect())
            .collect();
        FiniteMetricSpace::new(labels, dist).expect("test matrix must be metric")
    }

    /// The {3,4,5} triangle: d(1,2)=3, d(1,3)=4, d(2,3)=5.
    pub fn triangle_345() -> FiniteMetricSpace {
        space(&[&[0, 3, 4], &[3, 0, 5], &[4, 5, 0]])
    }

    pub fn rat(s: &str) -> Rational {
        s.parse().expect("test literal")
    }
}

#[cfg(test)]
mod tests {
    use super::test_util::{rat, space, triangle_345};
    use super::*;

    #[test]
    fn validates_smallest_space() {
        let s = space(&[&[0, 1], &[1, 0]]);
        assert_eq!(s.len(), 2);
        assert_eq!(s.diameter(), Rational::int(1));
    }

    #[test]
    fn reports_first_triangle_violation() {
        let labels = vec!["a".into(), "b".into(), "c".into()];
        let dist = vec![
            vec![rat("0"), rat("1"), rat("3")],
            vec![rat("1"), rat("0"), rat("1")],
            vec![rat("3"), rat("1"), rat("0")],
        ];
        assert_eq!(
            FiniteMetricSpace::new(labels, dist),
            Err(MetricError::TriangleViolation { i: 0, j: 2, k: 1 })
        );
    }

    #[test]
    fn validates_345_triangle() {
        // Hand oracle: all six ordered triangle inequalities hold.
        let s = triangle_345();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    if i != j && j != k && i != k {
                        assert!(s.dist(i, j) <= &(s.dist(i, k) + s.dist(k, j)));
                    }
                }
            }
        }
        assert_eq!(s.diameter(), Rational::int(5));
    }

    #[test]
    fn rejects_shape_and_axiom_violations() {
        let err = FiniteMetricSpace::new(
            vec!["a".into(), "b".into()],
            vec![vec![rat("0"), rat("1")], vec![rat("2"), rat("0")]],
        );
        assert_eq!(err, Err(MetricError::AsymmetricMatrix { i: 0, j: 1 }));

        let err = FiniteMetricSpace::new(
            vec!["a".into(), "b".into()],
            vec![vec![rat("1"), rat("1")], vec![rat("1"), rat("0")]],
        );
        assert_eq!(err, Err(MetricError::NonzeroDiagonal { i: 0 }));

        let err = FiniteMetricSpace::new(
            vec!["a".into(), "b".into()],
            vec![vec![rat("0"), rat("-1")], vec![rat("-1"), rat("0")]],
        );
        assert_eq!(err, Err(MetricError::NonpositiveOffDiagonal { i: 0, j: 1 }));

        let err = FiniteMetricSpace::new(
            vec!["a".into(), "a".into()],
            vec![vec![rat("0"), rat("1")], vec![rat("1"), rat("0")]],
        );
        assert_eq!(err, Err(MetricError::DuplicateLabel("a".into())));
    }

    #[test]
    fn diameter_of_point_is_zero() {
        assert_eq!(FiniteMetricSpace::point("x").diameter(), Rational::zero());
    }

    #[test]
    fn delta_two_point_is_the_distance() {
        let s = FiniteMetricSpace::two_point(Rational::int(5));
        let d = delta(&s).unwrap();
        assert_eq!(d.value, Rational::int(5));
        assert_eq!(d.witness, DeltaWitness::TwoPoint);
    }

    #[test]
    fn delta_345_is_one() {
        // Independent oracle: collect every slack and gap term explicitly,
        // sort, take the least. Expected value frozen from that computation.
        let s = triangle_345();
        let mut terms = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    if i != j && j != k && i != k {
                        terms.push(&(s.dist(i, j) + s.dist(j, k)) - s.dist(i, k));
                    }
                }
            }
        }
        // distances 3, 4, 5 and their gaps (all index sets here have >= 3 members)
        for v in ["3", "4", "5", "1", "2", "1"] {
            terms.push(rat(v));
        }
        terms.sort();
        assert_eq!(terms[0], rat("1"));

        let d = delta(&s).unwrap();
        assert_eq!(d.value, rat("1"));
        assert_eq!(d.witness, DeltaWitness::DistanceGap { i: 0, j: 1, p: 0, q: 2 });
    }

    #[test]
    fn delta_equilateral_is_zero() {
        let s = space(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]);
        let d = delta(&s).unwrap();
        assert!(d.value.is_zero());
        assert!(matches!(d.witness, DeltaWitness::DistanceGap { .. }));
        assert!(!is_generic(&s).unwrap());
    }

    #[test]
    fn delta_rejects_single_point() {
        assert_eq!(
            delta(&FiniteMetricSpace::point("x")),
            Err(MetricError::SinglePoint)
        );
    }

    #[test]
    fn delta_bounded_by_every_distance() {
        let s = triangle_345();
        let d = delta(&s).unwrap().value;
        for (i, j) in point_pairs(3) {
            assert!(&d <= s.dist(i, j));
        }
    }

    #[test]
    fn genericity_examples() {
        assert!(is_generic(&triangle_345()).unwrap());
        assert!(!is_generic(&space(&[&[0, 2, 2], &[2, 0, 3], &[2, 3, 0]])).unwrap());
    }

    #[test]
    fn structural_isomorphism_by_rank() {
        // Exhaustive oracle: try all 6 bijections by hand; only the rank
        // match works, and it is the identity indexing here.
        let x = triangle_345();
        let y = space(&[&[0, 30, 40], &[30, 0, 50], &[40, 50, 0]]);
        let iso = structural_isomorphism(&x, &y).expect("must exist");
        assert!(iso.is_identity());

        // Same spaces with y's points renumbered: the map must follow.
        let y2 = y.permuted(&[2, 0, 1]);
        let iso2 = structural_isomorphism(&x, &y2).expect("must exist");
        assert_eq!(iso2.map(), &[1, 2, 0]);
        assert!(StructuralIsomorphism::new_checked(&x, &y2, iso2.map().to_vec()).is_ok());
    }

    #[test]
    fn structural_isomorphism_identity_on_self() {
        let x = triangle_345();
        let iso = structural_isomorphism(&x, &x).unwrap();
        assert!(iso.is_identity());
    }

    #[test]
    fn structural_isomorphism_absent_cases() {
        let x = triangle_345();
        let equilateral = space(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]);
        // absence is symmetric
        assert!(structural_isomorphism(&x, &equilateral).is_none());
        assert!(structural_isomorphism(&equilateral, &x).is_none());
        assert!(structural_isomorphism(&x, &FiniteMetricSpace::two_point(rat("1"))).is_none());
    }

    #[test]
    fn structural_isomorphism_inverse_pairing() {
        let x = triangle_345();
        let y = x.permuted(&[1, 2, 0]).scaled(&rat("7/3"));
        let fwd = structural_isomorphism(&x, &y).unwrap();
        let back = structural_isomorphism(&y, &x).unwrap();
        assert_eq!(fwd.inverse(), back);
    }

    #[test]
    fn perturb_identity_offsets() {
        let x = triangle_345();
        let zeros = vec![vec![Rational::zero(); 3]; 3];
        let y = perturb(&x, &zeros, &rat("1/3")).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn perturb_within_third_of_delta() {
        let x = triangle_345(); // delta = 1
        let mut offsets = vec![vec![Rational::zero(); 3]; 3];
        for ((i, j), o) in point_pairs(3).zip(["1/4", "-1/4", "1/4"]) {
            offsets[i][j] = rat(o);
            offsets[j][i] = rat(o);
        }
        let y = perturb(&x, &offsets, &rat("1/3")).unwrap();
        assert!(is_generic(&y).unwrap());
        assert!(structural_isomorphism(&x, &y).unwrap().is_identity());
        assert_eq!(y.dist(0, 1), &rat("13/4"));
    }

    #[test]
    fn perturb_rejects_degenerate_and_oversized() {
        let equilateral = space(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]);
        let zeros = vec![vec![Rational::zero(); 3]; 3];
        assert_eq!(
            perturb(&equilateral, &zeros, &rat("1/100")),
            Err(MetricError::PerturbationTooLarge)
        );

        let x = triangle_345();
        assert_eq!(
            perturb(&x, &zeros, &rat("1/2")), // bound > delta/3 = 1/3
            Err(MetricError::PerturbationTooLarge)
        );

        let mut offsets = zeros.clone();
        offsets[0][1] = rat("1/3");
        offsets[1][0] = rat("1/3");
        assert_eq!(
            perturb(&x, &offsets, &rat("1/3")), // offset not strictly below bound
            Err(MetricError::PerturbationTooLarge)
        );
    }
}
