//! Seeded generators for the worked simulation studies and their analytic values.
//!
//! Every generator is a pure function of its [`GeneratorSpec`]: the seed is
//! expanded through [`SeedStream`](crate::rng::SeedStream) under the example's
//! name, normal variates come from the ziggurat sampler and multivariate
//! normals from the Cholesky factor of the covariance.

mod oracle;
mod sample;
mod spec;

pub use oracle::{
    compound_symmetry, gaussian_entropy, theoretical_ex1, theoretical_two_normal,
    two_normal_mixture_entropy,
};
pub use sample::{sample, MvNormal};
pub use spec::{ExampleId, GeneratorParams, GeneratorSpec};
