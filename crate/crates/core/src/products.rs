//! Product-group operations: statistics and moments add over components.

use crate::error::{Error, Result};
use crate::experiment::{run_clt, run_evlt, CltConfig, CltReport, EvltConfig, EvltReport};
use crate::group::{ProductGroupSpec, Target};
use crate::perm::LatentSample;
use crate::stats::hajek_inv;

pub use crate::moments::product_moments;
pub use crate::sampler::sample_product_element;
pub use crate::stats::product_statistics;

/// Sum of the component projections. Cross-component conditional
/// expectations are constants and cancel against the global centering.
pub fn product_hajek_inv(z: &[LatentSample], spec: &ProductGroupSpec) -> Result<f64> {
    let comps = spec.components();
    if z.len() != comps.len() {
        return Err(Error::LengthMismatch {
            expected: comps.len(),
            got: z.len(),
        });
    }
    z.iter().zip(comps).map(|(zi, c)| hajek_inv(zi, c)).sum()
}

pub fn run_clt_product(
    spec: &ProductGroupSpec,
    replications: usize,
    seed: u64,
) -> Result<CltReport> {
    run_clt(&CltConfig::new(
        Target::Product(spec.clone()),
        replications,
        seed,
    ))
}

pub fn run_evlt_product(
    spec: &ProductGroupSpec,
    k: usize,
    replications: usize,
    seed: u64,
) -> Result<EvltReport> {
    run_evlt(&EvltConfig::new(
        Target::Product(spec.clone()),
        k,
        replications,
        seed,
    ))
}
