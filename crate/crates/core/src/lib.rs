//! Inversion and descent statistics of random elements of the classical
//! Weyl groups S_n, B_n, D_n and their direct products.
//!
//! Elements are drawn either directly or through a latent vector of
//! generalized Rademacher variables `Z_k = U_k R_k`. The crate provides
//! the statistics, their Hájek projections, closed-form moments, an exact
//! enumeration oracle and Monte Carlo drivers for the bivariate CLT and
//! the Gumbel limit of coordinatewise maxima.

pub mod empirical;
pub mod error;
pub mod experiment;
pub mod group;
pub mod limits;
pub mod moments;
pub mod oracle;
pub mod perm;
pub mod products;
pub mod quad;
pub mod rational;
pub mod report;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use error::{Error, Result};
pub use group::{GroupFamily, GroupSpec, ProductGroupSpec, Target};
pub use moments::MomentSet;
pub use perm::{neg_count, rank_permutation, LatentSample, SignedPermutation};
pub use rng::RngStream;
pub use stats::{DecompositionTerm, JointStat};
