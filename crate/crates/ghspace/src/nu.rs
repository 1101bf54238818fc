//! The half-distance vector map and its local inverse.
//!
//! An `n`-point space maps to the vector of its `n(n-1)/2` distances,
//! sorted ascending and divided by two, living in `R^N` with the max norm.
//! Around a generic space `X` this map is an isometry between the open
//! `delta(X)/6` balls: Gromov-Hausdorff distance on one side, coordinate
//! max-deviation on the other. [`nu_inverse`] realizes the inverse on such
//! a ball and [`local_isometry_check`] certifies the isometry sample by
//! sample with the exact solver, never assuming it.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::rational::Rational;
use crate::solver::{gh_distance_exact_with, SolverConfig, SolverError};
use crate::space::{
    delta, point_pairs, structural_isomorphism, FiniteMetricSpace, MetricError,
};

/// Grid resolution for exact rational sampling inside a ball: offsets are
/// `k/GRID * radius` with `k` uniform in `[-(GRID-1), GRID-1]`.
pub const SAMPLE_GRID: i64 = 64;

/// Name of the seeded generator, echoed in every report.
pub const RNG_NAME: &str = "chacha8";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NuError {
    #[error("nu is undefined for a single-point space")]
    SinglePoint,
    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("spaces are not structurally isomorphic")]
    NotStructurallyIsomorphic,
    #[error("vector deviates from the center by {deviation} >= radius {radius}")]
    OutsideBall { deviation: Rational, radius: Rational },
    #[error("anchor space is not generic")]
    AnchorNotGeneric,
    #[error("space is not generic")]
    NotGeneric,
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Sorted half-distances of a space, with the pair that produced each
/// coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NuVector {
    coords: Vec<Rational>,
    pair_order: Vec<(usize, usize)>,
}

impl NuVector {
    /// Non-decreasing coordinates; `coords[t]` is half the distance of
    /// `pair_order[t]`.
    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    /// A permutation of all unordered pairs `(i, j)`, `i < j`.
    pub fn pair_order(&self) -> &[(usize, usize)] {
        &self.pair_order
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

/// Sorted half-distance vector of `space`. Ties are ordered by
/// lexicographic pair index, so the result is deterministic even off the
/// generic locus (where provenance is not otherwise meaningful).
pub fn nu(space: &FiniteMetricSpace) -> Result<NuVector, NuError> {
    let n = space.len();
    if n < 2 {
        return Err(NuError::SinglePoint);
    }
    let mut entries: Vec<(Rational, (usize, usize))> = point_pairs(n)
        .map(|(i, j)| (space.dist(i, j).half(), (i, j)))
        .collect();
    entries.sort();
    let (coords, pair_order) = entries.into_iter().unzip();
    Ok(NuVector { coords, pair_order })
}

/// Max-norm distance between two coordinate vectors of equal length.
pub fn linf_distance(a: &[Rational], b: &[Rational]) -> Result<Rational, NuError> {
    if a.len() != b.len() {
        return Err(NuError::LengthMismatch(a.len(), b.len()));
    }
    let mut worst = Rational::zero();
    for (u, v) in a.iter().zip(b) {
        let d = u.abs_diff(v);
        if d > worst {
            worst = d;
        }
    }
    Ok(worst)
}

/// An open max-norm ball around a nu vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinfBall {
    pub center: NuVector,
    pub radius: Rational,
}

impl LinfBall {
    /// Strict membership: max coordinate deviation below the radius.
    pub fn contains(&self, z: &[Rational]) -> Result<bool, NuError> {
        Ok(linf_distance(self.center.coords(), z)? < self.radius)
    }
}

/// Outcome of one incompressibility comparison: the exact distance never
/// exceeds the max-norm distance of the nu vectors of structurally
/// isomorphic spaces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IncompressibilityCheck {
    pub gh: Rational,
    pub linf: Rational,
    pub ok: bool,
}

pub fn incompressibility_check(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
) -> Result<IncompressibilityCheck, NuError> {
    incompressibility_check_with(x, y, &SolverConfig::default())
}

pub fn incompressibility_check_with(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    config: &SolverConfig,
) -> Result<IncompressibilityCheck, NuError> {
    if structural_isomorphism(x, y).is_none() {
        return Err(NuError::NotStructurallyIsomorphic);
    }
    let gh = gh_distance_exact_with(x, y, config)?.distance;
    let linf = linf_distance(nu(x)?.coords(), nu(y)?.coords())?;
    let ok = gh <= linf;
    Ok(IncompressibilityCheck { gh, linf, ok })
}

/// Rebuilds the space whose nu vector is `z`, using the anchor's pair
/// provenance: the distance of `pair_order[t]` becomes `2 z[t]`.
///
/// Requires a generic anchor and `z` strictly inside the `delta/6` ball
/// around `nu(anchor)`; there the result is always a valid metric space
/// (validated, not assumed) and satisfies `nu(result) = z`.
pub fn nu_inverse(
    z: &[Rational],
    anchor: &FiniteMetricSpace,
) -> Result<FiniteMetricSpace, NuError> {
    let margin = delta(anchor).map_err(|e| match e {
        MetricError::SinglePoint => NuError::SinglePoint,
        other => NuError::Metric(other),
    })?;
    if !margin.value.is_positive() {
        return Err(NuError::AnchorNotGeneric);
    }
    let center = nu(anchor)?;
    let ball = LinfBall {
        radius: &margin.value / &Rational::int(6),
        center,
    };
    if !ball.contains(z)? {
        return Err(NuError::OutsideBall {
            deviation: linf_distance(ball.center.coords(), z)?,
            radius: ball.radius.clone(),
        });
    }
    let n = anchor.len();
    let mut dist = vec![vec![Rational::zero(); n]; n];
    for (t, &(i, j)) in ball.center.pair_order().iter().enumerate() {
        let d = z[t].double();
        dist[i][j] = d.clone();
        dist[j][i] = d;
    }
    Ok(FiniteMetricSpace::new(anchor.labels().to_vec(), dist)?)
}

/// One verified ball sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsometrySample {
    pub z: Vec<Rational>,
    pub gh: Rational,
    pub linf: Rational,
    pub cardinality: usize,
    pub nu_round_trip: bool,
    pub pass: bool,
}

/// Sampled certification of the local isometry around a generic space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalIsometryReport {
    pub rng: &'static str,
    pub seed: u64,
    pub grid: i64,
    pub radius: Rational,
    pub samples: Vec<IsometrySample>,
    pub all_pass: bool,
}

pub fn local_isometry_check(
    space: &FiniteMetricSpace,
    sample_count: usize,
    seed: u64,
) -> Result<LocalIsometryReport, NuError> {
    local_isometry_check_with(space, sample_count, seed, &SolverConfig::default())
}

/// Draws `sample_count` exact rational points in the open `delta/6` ball
/// around `nu(space)`, pulls each back with [`nu_inverse`], and asserts with
/// the exact solver that the Gromov-Hausdorff distance equals the max-norm
/// deviation, that the rebuilt space has the same cardinality, and that its
/// nu vector reproduces the sample. Samples are verified independently and
/// reported in sample-index order.
pub fn local_isometry_check_with(
    space: &FiniteMetricSpace,
    sample_count: usize,
    seed: u64,
    config: &SolverConfig,
) -> Result<LocalIsometryReport, NuError> {
    let margin = delta(space).map_err(|e| match e {
        MetricError::SinglePoint => NuError::SinglePoint,
        other => NuError::Metric(other),
    })?;
    if !margin.value.is_positive() {
        return Err(NuError::NotGeneric);
    }
    if space.len() > config.max_side {
        return Err(SolverError::SizeCapExceeded {
            size: space.len(),
            cap: config.max_side,
        }
        .into());
    }
    let center = nu(space)?;
    let radius = &margin.value / &Rational::int(6);

    // all randomness is consumed up front, in a fixed order
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<Rational>> = (0..sample_count)
        .map(|_| {
            center
                .coords()
                .iter()
                .map(|c| {
                    let k = rng.random_range(-(SAMPLE_GRID - 1)..=SAMPLE_GRID - 1);
                    c + &(&(&Rational::int(k) * &radius) / &Rational::int(SAMPLE_GRID))
                })
                .collect()
        })
        .collect();

    let samples: Vec<IsometrySample> = points
        .into_par_iter()
        .map(|z| -> Result<IsometrySample, NuError> {
            let rebuilt = nu_inverse(&z, space)?;
            let gh = gh_distance_exact_with(space, &rebuilt, config)?.distance;
            let linf = linf_distance(center.coords(), &z)?;
            let cardinality = rebuilt.len();
            let nu_round_trip = nu(&rebuilt)?.coords() == z.as_slice();
            let pass = gh == linf && cardinality == space.len() && nu_round_trip;
            Ok(IsometrySample { z, gh, linf, cardinality, nu_round_trip, pass })
        })
        .collect::<Result<_, _>>()?;

    let all_pass = samples.iter().all(|s| s.pass);
    Ok(LocalIsometryReport {
        rng: RNG_NAME,
        seed,
        grid: SAMPLE_GRID,
        radius,
        samples,
        all_pass,
    })
}
