//! Seeded random generators of finite metric spaces.
//!
//! Every generator is deterministic given its seed (ChaCha8 stream, one
//! generator per call, draws consumed in a fixed order) and produces exact
//! rational distances only.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::nu::SAMPLE_GRID;
use crate::rational::Rational;
use crate::space::{delta, is_generic, perturb, point_pairs, FiniteMetricSpace};

/// A random generic `n`-point space, certified by `delta > 0`.
///
/// Starts from the anchor-style ladder of distances `(m+1+t) g` (`g = 7`,
/// `t = 1..m`), assigns them to pairs in seeded random order - the ladder
/// keeps `delta = g` whatever the assignment - then jitters every distance
/// by a random exact offset below `delta/3`, which preserves validity and
/// genericity.
pub fn sample_generic(n: usize, seed: u64) -> FiniteMetricSpace {
    assert!(n >= 2, "generic spaces need at least two points");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = n * (n - 1) / 2;
    let g = Rational::int(7);
    let mut ladder: Vec<Rational> = (1..=m)
        .map(|t| &g * &Rational::int((m + 1 + t) as i64))
        .collect();
    ladder.shuffle(&mut rng);
    let base = FiniteMetricSpace::from_pair_distances(n, &ladder)
        .expect("ladder distances always form a metric");
    let bound = &delta(&base).expect("n >= 2").value / &Rational::int(3);
    let offsets = sample_offsets(n, &bound, &mut rng);
    let space = perturb(&base, &offsets, &bound)
        .expect("offsets below delta/3 preserve validity and genericity");
    debug_assert!(is_generic(&space).unwrap());
    space
}

/// Symmetric zero-diagonal offsets with every entry strictly below `bound`
/// in absolute value, drawn from the exact grid `k/64 * bound`.
pub fn sample_offsets(n: usize, bound: &Rational, rng: &mut ChaCha8Rng) -> Vec<Vec<Rational>> {
    let mut offsets = vec![vec![Rational::zero(); n]; n];
    for (i, j) in point_pairs(n) {
        let k = rng.random_range(-(SAMPLE_GRID - 1)..=SAMPLE_GRID - 1);
        let o = &(&Rational::int(k) * bound) / &Rational::int(SAMPLE_GRID);
        offsets[i][j] = o.clone();
        offsets[j][i] = o;
    }
    offsets
}

/// A random valid (not necessarily generic) space: distances drawn from the
/// grid `1 + k/8`, `k` in `0..=8`. Everything in `[1, 2]` satisfies the
/// triangle inequality outright, and the coarse grid makes repeated
/// distances common.
pub fn sample_space(n: usize, seed: u64) -> FiniteMetricSpace {
    assert!(n >= 1);
    if n == 1 {
        return FiniteMetricSpace::point("p1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let upper: Vec<Rational> = point_pairs(n)
        .map(|_| {
            let k = rng.random_range(0..=8i64);
            Rational::int(1) + Rational::new(k, 8)
        })
        .collect();
    FiniteMetricSpace::from_pair_distances(n, &upper)
        .expect("grid distances in [1,2] always form a metric")
}

/// A random valid space rescaled so its diameter is exactly 1.
pub fn sample_unit_diameter(n: usize, seed: u64) -> FiniteMetricSpace {
    assert!(n >= 2, "a positive diameter needs at least two points");
    let space = sample_space(n, seed);
    let diam = space.diameter();
    space.scaled(&(&Rational::one() / &diam))
}

/// A generic space together with a perturbed copy of it; the pair is
/// structurally isomorphic via the identity indexing by construction.
pub fn sample_isomorphic_pair(
    n: usize,
    seed: u64,
) -> (FiniteMetricSpace, FiniteMetricSpace) {
    let x = sample_generic(n, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let bound = &delta(&x).expect("n >= 2").value / &Rational::int(3);
    let offsets = sample_offsets(n, &bound, &mut rng);
    let y = perturb(&x, &offsets, &bound).expect("bounded perturbation stays valid");
    (x, y)
}
