//! Isometric embedding of a finite metric space into the family of
//! `k`-point metric spaces.
//!
//! Given an `n`-point space, take the least `k` with `n <= k(k-1)/2`, pad
//! the space with diameter-distance points up to `k(k-1)/2` points if
//! needed, push its Kuratowski image (rows of the distance matrix, a
//! max-norm isometry) into the ball around the nu vector of a generic
//! `k`-point anchor whose margin `delta/6` exceeds the diameter, and pull
//! each translated vector back through [`nu_inverse`]. The resulting
//! `k`-point spaces are pairwise at exactly the original distances in the
//! Gromov-Hausdorff metric; [`verify_embedding`] certifies that with the
//! exact solver.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::ser::{Serialize, SerializeStruct, Serializer};
use serde::Serialize as DeriveSerialize;
use thiserror::Error;

use crate::nu::{nu, nu_inverse, NuError};
use crate::rational::Rational;
use crate::solver::{gh_distance_exact_with, SolverConfig, SolverError};
use crate::space::{delta, is_generic, point_pairs, FiniteMetricSpace, MetricError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbedError {
    #[error("cannot pad a zero-diameter space with extra points")]
    DegeneratePadding,
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Nu(#[from] NuError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// The least `k >= 2` with `n <= k(k-1)/2`.
pub fn least_k(n: usize) -> usize {
    let mut k = 2;
    while k * (k - 1) / 2 < n {
        k += 1;
    }
    k
}

/// Extends `x` to `m` points, every new distance equal to the diameter.
/// The original points keep their labels and distances.
pub fn pad_to(x: &FiniteMetricSpace, m: usize) -> Result<FiniteMetricSpace, EmbedError> {
    let n = x.len();
    assert!(m >= n, "target size below the current point count");
    if m == n {
        return Ok(x.clone());
    }
    let d = x.diameter();
    if d.is_zero() {
        return Err(EmbedError::DegeneratePadding);
    }
    let mut labels = x.labels().to_vec();
    let mut next = 1;
    while labels.len() < m {
        let candidate = format!("pad{next}");
        if !labels.contains(&candidate) {
            labels.push(candidate);
        }
        next += 1;
    }
    let mut dist = vec![vec![Rational::zero(); m]; m];
    for (i, j) in point_pairs(m) {
        let v = if j < n { x.dist(i, j).clone() } else { d.clone() };
        dist[i][j] = v.clone();
        dist[j][i] = v;
    }
    Ok(FiniteMetricSpace::new(labels, dist)?)
}

/// The rows of the distance matrix as points of `R^n` with the max norm;
/// their pairwise max-norm distances reproduce the source distances
/// exactly (certified at construction).
#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
pub struct KuratowskiImage {
    labels: Vec<String>,
    vectors: Vec<Vec<Rational>>,
}

impl KuratowskiImage {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vectors(&self) -> &[Vec<Rational>] {
        &self.vectors
    }
}

pub fn kuratowski(x: &FiniteMetricSpace) -> KuratowskiImage {
    let n = x.len();
    let vectors: Vec<Vec<Rational>> = x.matrix().to_vec();
    for (i, j) in point_pairs(n) {
        let linf = vectors[i]
            .iter()
            .zip(&vectors[j])
            .map(|(a, b)| a.abs_diff(b))
            .max()
            .expect("rows are nonempty");
        assert_eq!(
            &linf,
            x.dist(i, j),
            "Kuratowski image failed to reproduce a distance"
        );
    }
    KuratowskiImage { labels: x.labels().to_vec(), vectors }
}

/// A generic `k`-point space whose margin `delta/6` strictly exceeds a
/// required diameter.
#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
pub struct AnchorSpace {
    pub space: FiniteMetricSpace,
    /// `delta(space)/6`, recomputed and certified at construction.
    pub delta_margin: Rational,
}

/// Deterministic anchor: with `m = k(k-1)/2` and gap `g` (`7d`, or `7` when
/// `d = 0`), the pair distances are `(m+1+t) g` for `t = 1..m` in
/// lexicographic pair order. All triangle inequalities hold since the
/// largest distance `(2m+1) g` is below twice the smallest `(m+2) g`; the
/// slack minimum is `4g` and the gap minimum is `g`, so `delta = g > 6d`.
/// The margin is certified by rerunning `delta`, not assumed.
pub fn build_anchor(k: usize, d: &Rational) -> AnchorSpace {
    assert!(k >= 2, "anchor needs at least two points");
    assert!(!d.is_negative(), "target diameter must be nonnegative");
    let m = k * (k - 1) / 2;
    let g = if d.is_positive() {
        d * &Rational::int(7)
    } else {
        Rational::int(7)
    };
    let upper: Vec<Rational> = (1..=m)
        .map(|t| &g * &Rational::int((m + 1 + t) as i64))
        .collect();
    let labels = (1..=k).map(|i| format!("s{i}")).collect();
    let mut dist = vec![vec![Rational::zero(); k]; k];
    for (t, (i, j)) in point_pairs(k).enumerate() {
        dist[i][j] = upper[t].clone();
        dist[j][i] = upper[t].clone();
    }
    let space = FiniteMetricSpace::new(labels, dist).expect("anchor construction is metric");
    let margin = delta(&space).expect("k >= 2").value;
    assert!(
        margin > d * &Rational::int(6),
        "anchor margin must exceed six times the diameter"
    );
    AnchorSpace { space, delta_margin: &margin / &Rational::int(6) }
}

/// The embedding of an `n`-point space: one `k`-point image per point,
/// pairwise at the original distances in the Gromov-Hausdorff metric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingResult {
    pub k: usize,
    /// Images of the original points, in point order.
    pub images: Vec<FiniteMetricSpace>,
    pub anchor: AnchorSpace,
    /// The diameter-padded intermediate space, when padding was needed.
    pub padded: Option<FiniteMetricSpace>,
    /// Images of the padding points (inspection only).
    pub extra_images: Vec<FiniteMetricSpace>,
    source_labels: Vec<String>,
}

impl EmbeddingResult {
    /// Original label of each image, in image order.
    pub fn source_labels(&self) -> &[String] {
        &self.source_labels
    }

    pub fn label_map(&self) -> BTreeMap<&str, usize> {
        self.source_labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect()
    }
}

impl Serialize for EmbeddingResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("EmbeddingResult", 6)?;
        s.serialize_field("k", &self.k)?;
        s.serialize_field("anchor", &self.anchor)?;
        s.serialize_field("images", &self.images)?;
        s.serialize_field("map", &self.label_map())?;
        s.serialize_field("padded", &self.padded)?;
        s.serialize_field("extra_images", &self.extra_images)?;
        s.end()
    }
}

/// Builds the embedding. Construction never invokes the solver; use
/// [`verify_embedding`] to certify the result.
pub fn embed(x: &FiniteMetricSpace) -> Result<EmbeddingResult, EmbedError> {
    let n = x.len();
    let k = least_k(n);
    let m = k * (k - 1) / 2;
    let padded = if n < m { Some(pad_to(x, m)?) } else { None };
    let source = padded.as_ref().unwrap_or(x);
    let d = source.diameter(); // padding preserves the diameter
    let anchor = build_anchor(k, &d);
    let center = nu(&anchor.space)?;
    let rows = kuratowski(source);

    let mut all_images = Vec::with_capacity(m);
    for vector in rows.vectors() {
        // translate the Kuratowski point into the anchor's ball; every
        // coordinate moves by at most d < delta_margin
        let z: Vec<Rational> = center
            .coords()
            .iter()
            .zip(vector)
            .map(|(c, v)| c + v)
            .collect();
        all_images.push(nu_inverse(&z, &anchor.space)?);
    }
    let extra_images = all_images.split_off(n);
    Ok(EmbeddingResult {
        k,
        images: all_images,
        anchor,
        padded,
        extra_images,
        source_labels: x.labels().to_vec(),
    })
}

/// One pairwise distance comparison in a verification report.
#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
pub struct PairCheck {
    pub i: usize,
    pub j: usize,
    pub expected: Rational,
    pub computed: Rational,
    pub pass: bool,
}

/// Per-image structural checks.
#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
pub struct ImageCheck {
    pub index: usize,
    pub points: usize,
    pub generic: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
pub struct EmbeddingReport {
    pub k: usize,
    pub pair_checks: Vec<PairCheck>,
    pub image_checks: Vec<ImageCheck>,
    pub all_pass: bool,
}

pub fn verify_embedding(
    x: &FiniteMetricSpace,
    result: &EmbeddingResult,
) -> Result<EmbeddingReport, EmbedError> {
    verify_embedding_with(x, result, &SolverConfig::default())
}

/// Certifies an embedding with the exact solver: every pairwise distance
/// between images must equal the source distance exactly, and every image
/// must have exactly `k` points and be generic.
pub fn verify_embedding_with(
    x: &FiniteMetricSpace,
    result: &EmbeddingResult,
    config: &SolverConfig,
) -> Result<EmbeddingReport, EmbedError> {
    let n = x.len();
    let pairs: Vec<(usize, usize)> = point_pairs(n.min(result.images.len())).collect();
    let pair_checks: Vec<PairCheck> = pairs
        .into_par_iter()
        .map(|(i, j)| -> Result<PairCheck, EmbedError> {
            let computed =
                gh_distance_exact_with(&result.images[i], &result.images[j], config)?.distance;
            let expected = x.dist(i, j).clone();
            let pass = computed == expected;
            Ok(PairCheck { i, j, expected, computed, pass })
        })
        .collect::<Result<_, _>>()?;
    let mut image_checks = Vec::with_capacity(result.images.len());
    for (index, image) in result.images.iter().enumerate() {
        let points = image.len();
        let generic = is_generic(image)?;
        let pass = points == result.k && generic;
        image_checks.push(ImageCheck { index, points, generic, pass });
    }
    let all_pass = result.images.len() == n
        && pair_checks.iter().all(|c| c.pass)
        && image_checks.iter().all(|c| c.pass);
    Ok(EmbeddingReport { k: result.k, pair_checks, image_checks, all_pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::gh_distance_exact;
    use crate::space::test_util::{rat, space, triangle_345};

    #[test]
    fn least_k_values() {
        assert_eq!(least_k(1), 2);
        assert_eq!(least_k(2), 3);
        assert_eq!(least_k(3), 3);
        assert_eq!(least_k(6), 4);
        assert_eq!(least_k(7), 5);
        for k in 2..=8usize {
            assert_eq!(least_k(k * (k - 1) / 2), k);
        }
        let values: Vec<usize> = (1..=40).map(least_k).collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn pad_to_examples() {
        let x = triangle_345();
        assert_eq!(pad_to(&x, 3).unwrap(), x);

        let two = FiniteMetricSpace::two_point(rat("1"));
        let padded = pad_to(&two, 3).unwrap();
        assert_eq!(padded.len(), 3);
        for (i, j) in point_pairs(3) {
            assert_eq!(padded.dist(i, j), &rat("1"));
        }
        // original block preserved, padding idempotent
        assert_eq!(padded.dist(0, 1), two.dist(0, 1));
        assert_eq!(pad_to(&padded, 3).unwrap(), padded);

        assert!(matches!(
            pad_to(&FiniteMetricSpace::point("a"), 2),
            Err(EmbedError::DegeneratePadding)
        ));
    }

    #[test]
    fn kuratowski_reproduces_distances() {
        let two = FiniteMetricSpace::two_point(rat("4"));
        let img = kuratowski(&two);
        assert_eq!(img.vectors(), &[vec![rat("0"), rat("4")], vec![rat("4"), rat("0")]]);

        let x = triangle_345();
        let img = kuratowski(&x);
        assert_eq!(img.vectors().len(), 3);
        // certified in the constructor; spot-check one pair by hand
        let gap = img.vectors()[0]
            .iter()
            .zip(&img.vectors()[2])
            .map(|(a, b)| a.abs_diff(b))
            .max()
            .unwrap();
        assert_eq!(gap, rat("4"));

        let one = kuratowski(&FiniteMetricSpace::point("a"));
        assert_eq!(one.vectors(), &[vec![rat("0")]]);
    }

    #[test]
    fn anchor_for_three_points_diameter_one() {
        let anchor = build_anchor(3, &rat("1"));
        let s = &anchor.space;
        assert_eq!(s.dist(0, 1), &rat("35"));
        assert_eq!(s.dist(0, 2), &rat("42"));
        assert_eq!(s.dist(1, 2), &rat("49"));
        let margin = delta(s).unwrap().value;
        assert_eq!(margin, rat("7"));
        assert!(margin > rat("6"));
        assert!(is_generic(s).unwrap());
        assert_eq!(anchor.delta_margin, rat("7/6"));
    }

    #[test]
    fn smallest_anchor_follows_the_ladder() {
        // k = 2, d = 0: one pair, ladder value (m+1+1) g = 3 * 7 = 21
        let anchor = build_anchor(2, &rat("0"));
        assert_eq!(anchor.space.dist(0, 1), &rat("21"));
        assert_eq!(delta(&anchor.space).unwrap().value, rat("21"));
        assert!(is_generic(&anchor.space).unwrap());
    }

    #[test]
    fn anchors_are_generic_for_all_small_shapes() {
        for k in 2..=6 {
            for d in ["0", "1", "5/3", "12"] {
                let d = rat(d);
                let anchor = build_anchor(k, &d);
                assert!(is_generic(&anchor.space).unwrap());
                assert!(delta(&anchor.space).unwrap().value > &d * &Rational::int(6));
            }
        }
    }

    #[test]
    fn embed_single_point_gives_the_anchor() {
        let result = embed(&FiniteMetricSpace::point("a")).unwrap();
        assert_eq!(result.k, 2);
        assert_eq!(result.images.len(), 1);
        assert!(result.padded.is_none());
        let r = gh_distance_exact(&result.images[0], &result.anchor.space).unwrap();
        assert!(r.distance.is_zero());
        let report = verify_embedding(&FiniteMetricSpace::point("a"), &result).unwrap();
        assert!(report.all_pass);
    }

    #[test]
    fn embed_two_point_space_matches_hand_computation() {
        // padded to the equilateral 3-point space of side 1; anchor
        // {35,42,49}; image distances follow by adding Kuratowski rows
        let two = FiniteMetricSpace::two_point(rat("1"));
        let result = embed(&two).unwrap();
        assert_eq!(result.k, 3);
        assert!(result.padded.is_some());
        assert_eq!(result.images.len(), 2);
        assert_eq!(result.extra_images.len(), 1);

        let dists = |s: &FiniteMetricSpace| {
            vec![s.dist(0, 1).clone(), s.dist(0, 2).clone(), s.dist(1, 2).clone()]
        };
        assert_eq!(dists(&result.images[0]), vec![rat("35"), rat("44"), rat("51")]);
        assert_eq!(dists(&result.images[1]), vec![rat("37"), rat("42"), rat("51")]);
        assert_eq!(dists(&result.extra_images[0]), vec![rat("37"), rat("44"), rat("49")]);

        let r = gh_distance_exact(&result.images[0], &result.images[1]).unwrap();
        assert_eq!(r.distance, rat("1"));
        let report = verify_embedding(&two, &result).unwrap();
        assert!(report.all_pass);
    }

    #[test]
    fn embed_345_triangle_end_to_end() {
        let x = triangle_345();
        let result = embed(&x).unwrap();
        assert_eq!(result.k, 3);
        assert!(result.padded.is_none());
        let report = verify_embedding(&x, &result).unwrap();
        assert!(report.all_pass);
        for check in &report.pair_checks {
            assert_eq!(check.computed, x.dist(check.i, check.j).clone());
        }
    }

    #[test]
    fn verify_flags_a_tampered_image() {
        let x = triangle_345();
        let mut result = embed(&x).unwrap();
        // bump the largest distance of the first image by 10; the diameter
        // gap alone then forces every pairwise distance involving it to move
        let tampered = {
            let img = &result.images[0];
            let mut dist: Vec<Vec<Rational>> = img.matrix().to_vec();
            dist[1][2] = &dist[1][2] + &rat("10");
            dist[2][1] = dist[1][2].clone();
            FiniteMetricSpace::new(img.labels().to_vec(), dist).unwrap()
        };
        result.images[0] = tampered;
        let report = verify_embedding(&x, &result).unwrap();
        assert!(!report.all_pass);
        assert!(report
            .pair_checks
            .iter()
            .any(|c| !c.pass && (c.i == 0 || c.j == 0)));
    }

    #[test]
    fn embedded_images_stay_inside_the_anchor_ball() {
        let x = space(&[&[0, 2, 6, 5], &[2, 0, 7, 4], &[6, 7, 0, 3], &[5, 4, 3, 0]]);
        let result = embed(&x).unwrap();
        let center = nu(&result.anchor.space).unwrap();
        let d = x.diameter();
        for image in result.images.iter().chain(&result.extra_images) {
            let z = nu(image).unwrap();
            let dev = crate::nu::linf_distance(center.coords(), z.coords()).unwrap();
            assert!(dev <= d);
            assert!(dev < result.anchor.delta_margin);
        }
    }
}
