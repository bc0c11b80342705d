use alloc::vec;
use alloc::vec::Vec;

use super::{lattice_spacing, DecompositionParams};
use crate::error::{Error, Result};
use crate::linalg::norm;

/// Largest dimension for which the net is enumerated explicitly.
pub const MAX_ENUMERATION_DIM: usize = 8;

/// Tolerance on `z_i / (ε/√n)` being an integer.
const LATTICE_TOLERANCE: f64 = 1e-12;

/// Relative slack on the ball radius, so points on the sphere `‖z‖ = 1 + ε`
/// count as inside despite rounding.
const RADIUS_TOLERANCE: f64 = 1e-12;

/// Membership in `(ε/√n)ℤⁿ ∩ Sparse(m) ∩ (1+ε)B₂ⁿ`.
pub fn sparse_net_contains(z: &[f64], epsilon: f64, m: usize) -> bool {
    if z.is_empty() || !(epsilon > 0.0) {
        return false;
    }
    let spacing = lattice_spacing(epsilon, z.len());
    let mut support = 0;
    for &v in z {
        let ratio = v / spacing;
        if (ratio - libm::round(ratio)).abs() > LATTICE_TOLERANCE {
            return false;
        }
        if libm::round(ratio) != 0.0 {
            support += 1;
        }
    }
    support <= m && norm(z) <= (1.0 + epsilon) * (1.0 + RADIUS_TOLERANCE)
}

/// Net cardinality bound `(C/(δ^{3/2} ε))^m`, also kept in log form since it
/// overflows quickly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetSizeBound {
    pub budget: usize,
    pub log_bound: f64,
    /// `exp(log_bound)`; infinite when it does not fit in an `f64`.
    pub bound: f64,
}

pub fn sparse_net_size_bound(params: &DecompositionParams, c_net: f64) -> Result<NetSizeBound> {
    if !(c_net > 0.0 && c_net.is_finite()) {
        return Err(Error::InvalidParameter { name: "c_net", value: c_net });
    }
    let budget = params.sparse_budget();
    let base = c_net / (libm::pow(params.delta(), 1.5) * params.epsilon());
    let log_bound = budget as f64 * libm::log(base);
    Ok(NetSizeBound { budget, log_bound, bound: libm::exp(log_bound) })
}

/// Visits every integer vector `k` with at most `m` nonzero entries and
/// `(ε/√n)‖k‖ ≤ 1 + ε`, i.e. every point of the net in lattice coordinates.
pub fn for_each_net_point(n: usize, epsilon: f64, m: usize, mut visit: impl FnMut(&[i64])) -> Result<()> {
    if n == 0 {
        return Err(Error::ZeroDimension(0));
    }
    if n > MAX_ENUMERATION_DIM {
        return Err(Error::EnumerationTooLarge { n, limit: MAX_ENUMERATION_DIM });
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter { name: "epsilon", value: epsilon });
    }
    // Squared radius `(1+ε)²n/ε²` in lattice units; integer norms are compared against it.
    let r = (1.0 + epsilon) / epsilon;
    let budget = r * r * n as f64 * (1.0 + RADIUS_TOLERANCE);
    let mut point = vec![0i64; n];
    recurse(0, &mut point, 0, m.min(n), budget, &mut visit);
    Ok(())
}

fn recurse(
    pos: usize,
    point: &mut Vec<i64>,
    used_sq: i64,
    support_left: usize,
    budget: f64,
    visit: &mut impl FnMut(&[i64]),
) {
    if pos == point.len() {
        visit(point);
        return;
    }
    point[pos] = 0;
    recurse(pos + 1, point, used_sq, support_left, budget, visit);
    if support_left == 0 {
        return;
    }
    let mut k = 1i64;
    while (used_sq + k * k) as f64 <= budget {
        for v in [k, -k] {
            point[pos] = v;
            recurse(pos + 1, point, used_sq + k * k, support_left - 1, budget, visit);
        }
        k += 1;
    }
    point[pos] = 0;
}

/// Exact number of net points, by enumeration (`n ≤ 8`).
pub fn sparse_net_cardinality(n: usize, epsilon: f64, m: usize) -> Result<u64> {
    let mut count = 0u64;
    for_each_net_point(n, epsilon, m, |_| count += 1)?;
    Ok(count)
}
