use alloc::vec::Vec;

use rand::Rng;

use super::lattice_spacing;
use crate::error::{Error, Result};
use crate::linalg::{hs_norm, norm};
use crate::matrix::RealMatrix;
use crate::rng::{RandomSeed, TrialRng};

/// A realized random rounding `η_y` of `y` onto `(ε/√n)ℤⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundingOutcome {
    pub eta: Vec<f64>,
    /// Integer lattice coordinates: `eta[i] = spacing · lattice[i]`.
    pub lattice: Vec<i64>,
    /// `p_i = (√n/ε) y_i − ⌊(√n/ε) y_i⌋`.
    pub fractional_parts: Vec<f64>,
    /// Which coordinates took the upper neighbour `k_i + 1`.
    pub rounded_up: Vec<bool>,
    pub support_size: usize,
    pub spacing: f64,
    pub attempts: u32,
}

/// Rounds each `y_i = h(k_i + p_i)` to `h k_i` with probability `1 − p_i` and
/// to `h(k_i + 1)` with probability `p_i`, independently, where `h = ε/√n`.
pub fn random_round(y: &[f64], epsilon: f64, seed: RandomSeed) -> Result<RoundingOutcome> {
    random_round_with(y, epsilon, &mut seed.rng())
}

pub fn random_round_with(y: &[f64], epsilon: f64, rng: &mut TrialRng) -> Result<RoundingOutcome> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter { name: "epsilon", value: epsilon });
    }
    if y.is_empty() {
        return Err(Error::ZeroDimension(0));
    }
    crate::matrix::check_finite(y)?;
    let n = y.len();
    let spacing = lattice_spacing(epsilon, n);
    let inv = libm::sqrt(n as f64) / epsilon;

    let mut eta = Vec::with_capacity(n);
    let mut lattice = Vec::with_capacity(n);
    let mut fractional_parts = Vec::with_capacity(n);
    let mut rounded_up = Vec::with_capacity(n);
    for &yi in y {
        let scaled = yi * inv;
        let floor = libm::floor(scaled);
        let p = scaled - floor;
        let k = floor as i64;
        // One uniform per coordinate regardless of p keeps streams aligned.
        let up = rng.random::<f64>() < p;
        let mut idx = if up { k + 1 } else { k };
        let mut value = spacing * idx as f64;
        // The product spacing·k can land one ulp outside the sup-norm ball.
        if (value - yi).abs() > spacing {
            idx = if up { k } else { k + 1 };
            value = spacing * idx as f64;
        }
        eta.push(value);
        lattice.push(idx);
        fractional_parts.push(p);
        rounded_up.push(idx != k);
    }
    let support_size = lattice.iter().filter(|&&k| k != 0).count();
    Ok(RoundingOutcome { eta, lattice, fractional_parts, rounded_up, support_size, spacing, attempts: 1 })
}

/// Draws roundings of `x` until `‖A(x − η)‖ ≤ (2ε/√n)‖A‖_HS`.
///
/// Each attempt succeeds with probability above 1/2, so the mean number of
/// attempts is below two. Requires `ε ∈ (0, 0.05)`.
pub fn rounding_approximation(
    x: &[f64],
    a: &RealMatrix,
    epsilon: f64,
    seed: RandomSeed,
    max_attempts: u32,
) -> Result<RoundingOutcome> {
    if !(epsilon > 0.0 && epsilon < 0.05) {
        return Err(Error::InvalidParameter { name: "epsilon", value: epsilon });
    }
    if max_attempts == 0 {
        return Err(Error::InvalidParameter { name: "max_attempts", value: 0.0 });
    }
    if x.len() != a.cols() {
        return Err(Error::DimensionMismatch { expected: a.cols(), found: x.len() });
    }
    let target = 2.0 * lattice_spacing(epsilon, x.len()) * hs_norm(a)?;
    let mut rng = seed.rng();
    for attempt in 1..=max_attempts {
        let mut outcome = random_round_with(x, epsilon, &mut rng)?;
        let diff: Vec<f64> = x.iter().zip(&outcome.eta).map(|(a, b)| a - b).collect();
        if norm(&a.mul_vec(&diff)?) <= target {
            outcome.attempts = attempt;
            return Ok(outcome);
        }
    }
    Err(Error::RoundingExhausted(max_attempts))
}
