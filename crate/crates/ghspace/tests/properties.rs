//! Cross-module invariants checked over randomized inputs.

use proptest::prelude::*;

use ghspace::correspondence::{
    distortion, enumerate_correspondences, enumerate_irreducible, EnumConfig,
};
use ghspace::embed::{build_anchor, embed, kuratowski, pad_to};
use ghspace::nu::{linf_distance, nu};
use ghspace::rational::Rational;
use ghspace::sample::{sample_generic, sample_isomorphic_pair, sample_space};
use ghspace::solver::{gh_distance_exact, gh_upper_bound_diam};
use ghspace::space::{
    delta, is_generic, point_pairs, structural_isomorphism, FiniteMetricSpace,
};

/// Exhaustive check on every shape with both sides at most 4: the minimum
/// distortion over all correspondences equals the minimum over the
/// irreducible ones alone, and the branch-and-bound solver reproduces it.
#[test]
fn minimum_distortion_agrees_with_irreducible_up_to_four_points() {
    let cfg = EnumConfig::default();
    for n in 1..=4usize {
        for m in 1..=4usize {
            let x = sample_space(n, 31 * n as u64 + m as u64);
            let y = sample_space(m, 77 * m as u64 + n as u64);
            let min_all = enumerate_correspondences(n, m, &cfg)
                .unwrap()
                .map(|c| distortion(c.relation(), &x, &y).unwrap())
                .min()
                .unwrap();
            let min_irreducible = enumerate_irreducible(n, m, &cfg)
                .unwrap()
                .iter()
                .map(|c| distortion(c.relation(), &x, &y).unwrap())
                .min()
                .unwrap();
            assert_eq!(min_all, min_irreducible, "{n}x{m}");
            let solved = gh_distance_exact(&x, &y).unwrap();
            assert_eq!(solved.distortion, min_all, "{n}x{m}");
        }
    }
}

/// A valid space with distances on the grid `1 + k/8`; ties are common.
fn arb_space(max_n: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    (2..=max_n, any::<u64>()).prop_map(|(n, seed)| sample_space(n, seed))
}

fn arb_generic(max_n: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    (2..=max_n, any::<u64>()).prop_map(|(n, seed)| sample_generic(n, seed))
}

fn arb_positive_rational() -> impl Strategy<Value = Rational> {
    (1i64..=24, 1i64..=24).prop_map(|(n, d)| Rational::new(n, d))
}

proptest! {
    #[test]
    fn delta_is_bounded_by_every_distance(x in arb_space(6)) {
        let margin = delta(&x).unwrap().value;
        for (i, j) in point_pairs(x.len()) {
            prop_assert!(&margin <= x.dist(i, j));
        }
    }

    #[test]
    fn delta_is_permutation_invariant(x in arb_space(5), seed in any::<u64>()) {
        let n = x.len();
        let mut perm: Vec<usize> = (0..n).collect();
        // cheap seeded shuffle
        for i in (1..n).rev() {
            perm.swap(i, (seed as usize).wrapping_mul(i + 7) % (i + 1));
        }
        let y = x.permuted(&perm);
        prop_assert_eq!(delta(&x).unwrap().value, delta(&y).unwrap().value);
        prop_assert_eq!(x.diameter(), y.diameter());
    }

    #[test]
    fn scaling_scales_delta_and_diameter(x in arb_space(5), c in arb_positive_rational()) {
        let y = x.scaled(&c);
        prop_assert_eq!(y.diameter(), &x.diameter() * &c);
        prop_assert_eq!(delta(&y).unwrap().value, &delta(&x).unwrap().value * &c);
        prop_assert_eq!(is_generic(&x).unwrap(), is_generic(&y).unwrap());
    }

    #[test]
    fn structural_isomorphism_is_symmetric_and_inverse(
        (x, y) in (2usize..=5, any::<u64>()).prop_map(|(n, s)| sample_isomorphic_pair(n, s))
    ) {
        let fwd = structural_isomorphism(&x, &y);
        let back = structural_isomorphism(&y, &x);
        prop_assert!(fwd.is_some() && back.is_some());
        prop_assert_eq!(fwd.unwrap().inverse(), back.unwrap());
    }

    #[test]
    fn kuratowski_certifies_on_random_spaces(x in arb_space(6)) {
        let image = kuratowski(&x);
        for (i, j) in point_pairs(x.len()) {
            let linf = linf_distance(&image.vectors()[i], &image.vectors()[j]).unwrap();
            prop_assert_eq!(&linf, x.dist(i, j));
        }
    }

    #[test]
    fn padding_preserves_the_original_block(x in arb_space(4), extra in 0usize..=3) {
        let m = x.len() + extra;
        let padded = pad_to(&x, m).unwrap();
        prop_assert_eq!(padded.len(), m);
        for (i, j) in point_pairs(x.len()) {
            prop_assert_eq!(padded.dist(i, j), x.dist(i, j));
        }
        prop_assert_eq!(padded.diameter(), x.diameter());
        prop_assert_eq!(pad_to(&padded, m).unwrap(), padded);
    }

    #[test]
    fn anchor_margin_exceeds_six_diameters(k in 2usize..=6, d in arb_positive_rational()) {
        let anchor = build_anchor(k, &d);
        prop_assert!(is_generic(&anchor.space).unwrap());
        prop_assert!(delta(&anchor.space).unwrap().value > &d * &Rational::int(6));
    }

    #[test]
    fn nu_is_sorted_and_generic_gaps_stay_wide(x in arb_generic(5)) {
        let v = nu(&x).unwrap();
        let half_delta = delta(&x).unwrap().value.half();
        for w in v.coords().windows(2) {
            prop_assert!(w[0] < w[1]);
            prop_assert!(&w[1] - &w[0] >= half_delta.clone());
        }
    }
}

// solver-backed properties get fewer cases; each case runs the exact solver
proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gh_is_symmetric_and_diameter_bounded(x in arb_space(4), y in arb_space(4)) {
        let xy = gh_distance_exact(&x, &y).unwrap();
        let yx = gh_distance_exact(&y, &x).unwrap();
        prop_assert_eq!(&xy.distance, &yx.distance);
        prop_assert!(xy.distance <= gh_upper_bound_diam(&x, &y));
        let witness = distortion(xy.optimal.relation(), &x, &y).unwrap();
        prop_assert_eq!(witness, xy.distortion);
    }

    #[test]
    fn gh_satisfies_the_triangle_inequality(
        x in arb_space(3), y in arb_space(3), z in arb_space(3)
    ) {
        let xy = gh_distance_exact(&x, &y).unwrap().distance;
        let yz = gh_distance_exact(&y, &z).unwrap().distance;
        let xz = gh_distance_exact(&x, &z).unwrap().distance;
        prop_assert!(xz <= &xy + &yz);
    }

    #[test]
    fn gh_vanishes_exactly_on_relabelings(x in arb_space(4), seed in any::<u64>()) {
        let n = x.len();
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, (seed as usize).wrapping_mul(i + 3) % (i + 1));
        }
        let relabeled = x.permuted(&perm);
        let r = gh_distance_exact(&x, &relabeled).unwrap();
        prop_assert!(r.distance.is_zero());
        // a zero distance always comes with a distortion-free bijection
        prop_assert_eq!(r.optimal.pairs().len(), n);
        prop_assert!(distortion(r.optimal.relation(), &x, &relabeled).unwrap().is_zero());
    }

    #[test]
    fn gh_scales_linearly_even_through_big_integers(
        x in arb_space(3), y in arb_space(3), seed in any::<u64>()
    ) {
        // a factor with a huge denominator forces the solver off the i128
        // fast path; the distance must scale exactly and the witness must
        // not change
        let huge = "100000000000000000000000000000000000000000000007";
        let c: Rational = format!("{}/{huge}", seed % 97 + 1).parse().unwrap();
        let base = gh_distance_exact(&x, &y).unwrap();
        let scaled = gh_distance_exact(&x.scaled(&c), &y.scaled(&c)).unwrap();
        prop_assert_eq!(&scaled.distance, &(&base.distance * &c));
        prop_assert_eq!(scaled.optimal, base.optimal);
        prop_assert_eq!(scaled.nodes_explored, base.nodes_explored);
    }

    #[test]
    fn witness_matches_brute_force_on_random_spaces(
        x in arb_space(3), y in arb_space(3)
    ) {
        let cfg = EnumConfig::default();
        let all: Vec<_> = enumerate_correspondences(x.len(), y.len(), &cfg)
            .unwrap()
            .map(|c| (distortion(c.relation(), &x, &y).unwrap(), c))
            .collect();
        let best = all.iter().map(|(d, _)| d).min().unwrap().clone();
        let expected = all
            .iter()
            .filter(|(d, c)| *d == best && ghspace::is_irreducible(c))
            .map(|(_, c)| c.pairs())
            .min()
            .unwrap();
        let r = gh_distance_exact(&x, &y).unwrap();
        prop_assert_eq!(r.optimal.pairs(), expected);
        prop_assert_eq!(r.distance.double(), r.distortion);
    }

    #[test]
    fn embedded_images_stay_in_the_anchor_ball(x in arb_space(5)) {
        let result = embed(&x).unwrap();
        let center = nu(&result.anchor.space).unwrap();
        let d = x.diameter();
        for image in result.images.iter().chain(&result.extra_images) {
            let v = nu(image).unwrap();
            let dev = linf_distance(center.coords(), v.coords()).unwrap();
            prop_assert!(dev <= d);
            prop_assert!(dev < result.anchor.delta_margin);
        }
    }
}
