//! Compressible/incompressible decomposition, random rounding to the sparse
//! lattice net, and spread-vector certificates.

mod net;
mod rounding;
mod sparse;
mod spread;

pub use net::{
    for_each_net_point, sparse_net_cardinality, sparse_net_contains, sparse_net_size_bound, NetSizeBound,
    MAX_ENUMERATION_DIM,
};
pub use rounding::{random_round, random_round_with, rounding_approximation, RoundingOutcome};
pub use sparse::{
    classify_compressible, dist_to_sparse, support_size, unit_check, Classification, DecompositionParams,
    UNIT_TOLERANCE,
};
pub use spread::{is_spread, spread_witness, SpreadParams};

/// Lattice spacing `ε/√n` of the rounding grid.
#[inline]
pub fn lattice_spacing(epsilon: f64, n: usize) -> f64 {
    epsilon / libm::sqrt(n as f64)
}
