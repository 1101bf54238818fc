//! Exact toolkit for finite metric spaces under the Gromov-Hausdorff
//! distance.
//!
//! Everything runs on arbitrary-precision rationals, so distances, margins
//! and comparisons are exact; there is no floating point anywhere in the
//! core. The pieces fit together like this:
//!
//! * [`space`] - validated finite metric spaces, the genericity margin
//!   `delta(X)` and structural isomorphisms;
//! * [`correspondence`] - relations, correspondences, distortion, and
//!   irreducible correspondences with their block decomposition;
//! * [`solver`] - the exact Gromov-Hausdorff distance with an irreducible
//!   optimal witness;
//! * [`mod@nu`] - the map sending an `n`-point space to its sorted vector of
//!   half-distances, a local isometry onto max-norm balls around generic
//!   spaces, with its inverse and a sampling-based verifier;
//! * [`mod@embed`] - the isometric embedding of any `n`-point space into the
//!   family of `k`-point spaces, `k` least with `n <= k(k-1)/2`;
//! * [`sample`] - seeded generators of random (generic) spaces;
//! * [`io`] - JSON and plain-matrix file formats.
//!
//! All operations are pure functions over immutable values.

// error enums carry exact rationals and witness tuples; they are cold paths
#![allow(clippy::result_large_err)]

pub mod correspondence;
pub mod embed;
pub mod io;
pub mod nu;
pub mod rational;
pub mod sample;
pub mod solver;
pub mod space;

pub use correspondence::{
    decompose_irreducible, distortion, enumerate_correspondences, enumerate_irreducible,
    is_irreducible, Correspondence, EnumConfig, IrreducibleDecomposition, Relation, RelationError,
};
pub use embed::{
    build_anchor, embed, kuratowski, least_k, pad_to, verify_embedding, AnchorSpace, EmbedError,
    EmbeddingResult, KuratowskiImage,
};
pub use nu::{
    incompressibility_check, linf_distance, local_isometry_check, nu, nu_inverse, LinfBall,
    NuError, NuVector,
};
pub use rational::Rational;
pub use sample::{sample_generic, sample_space, sample_unit_diameter};
pub use solver::{
    gh_distance_exact, gh_distance_exact_with, gh_upper_bound_diam, GHResult, SolverConfig,
    SolverError,
};
pub use space::{
    delta, is_generic, perturb, structural_isomorphism, validate_metric, DeltaValue, DeltaWitness,
    FiniteMetricSpace, MetricError, StructuralIsomorphism,
};
