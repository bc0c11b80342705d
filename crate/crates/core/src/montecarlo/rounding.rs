//! Rounding experiments: the second-moment bound and the sparsity budget of
//! random rounding, as repeatable Monte Carlo checks.

use alloc::vec::Vec;

use super::runner::{Experiment, Merge};
use crate::error::{Error, Result};
use crate::geometry::{classify_compressible, lattice_spacing, random_round_with, Classification, DecompositionParams};
use crate::linalg::{hs_norm, norm};
use crate::matrix::RealMatrix;
use crate::rng::RandomSeed;

/// Running sum and sum of squares of a scalar observation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MomentTally {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Merge for MomentTally {
    fn merge(&mut self, other: Self) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }
}

impl MomentTally {
    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        let n = self.count as f64;
        let var = (self.sum_sq - self.sum * self.sum / n) / (n - 1.0);
        libm::sqrt(var.max(0.0) / n)
    }
}

/// `‖A(y − η_y)‖²` over independent roundings of a fixed `y`.
#[derive(Debug, Clone)]
pub struct RoundingMoment {
    a: RealMatrix,
    y: Vec<f64>,
    epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundingMomentReport {
    pub trials: u64,
    pub mean: f64,
    pub std_error: f64,
    /// `(ε²/n)‖A‖²_HS`.
    pub bound: f64,
    /// `mean ≤ bound + 3·std_error`.
    pub holds: bool,
}

impl RoundingMoment {
    pub fn new(a: RealMatrix, y: Vec<f64>, epsilon: f64) -> Result<Self> {
        if y.len() != a.cols() {
            return Err(Error::DimensionMismatch { expected: a.cols(), found: y.len() });
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter { name: "epsilon", value: epsilon });
        }
        crate::matrix::check_finite(&y)?;
        Ok(Self { a, y, epsilon })
    }

    pub fn bound(&self) -> f64 {
        let h = lattice_spacing(self.epsilon, self.y.len());
        let hs = hs_norm(&self.a).unwrap_or(f64::INFINITY);
        h * h * hs * hs
    }

    pub fn report(&self, tally: &MomentTally) -> RoundingMomentReport {
        let (mean, std_error, bound) = (tally.mean(), tally.std_error(), self.bound());
        RoundingMomentReport { trials: tally.count, mean, std_error, bound, holds: mean <= bound + 3.0 * std_error }
    }
}

impl Experiment for RoundingMoment {
    type Tally = MomentTally;

    fn empty_tally(&self) -> MomentTally {
        MomentTally::default()
    }

    fn run_trial(&self, seed: RandomSeed, tally: &mut MomentTally) {
        let eta = random_round_with(&self.y, self.epsilon, &mut seed.rng()).expect("validated input");
        let diff: Vec<f64> = self.y.iter().zip(&eta.eta).map(|(a, b)| a - b).collect();
        let r = norm(&self.a.mul_vec(&diff).expect("validated shape"));
        let v = r * r;
        tally.count += 1;
        tally.sum += v;
        tally.sum_sq += v * v;
    }
}

/// Frequency of `η_y ∈ Sparse(m)` for a compressible unit `y`.
#[derive(Debug, Clone)]
pub struct SparsityBudget {
    y: Vec<f64>,
    params: DecompositionParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CountTally {
    pub trials: u64,
    pub hits: u64,
}

impl Merge for CountTally {
    fn merge(&mut self, other: Self) {
        self.trials += other.trials;
        self.hits += other.hits;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsityReport {
    pub trials: u64,
    pub budget: usize,
    pub frequency: f64,
    /// `frequency ≥ SPARSITY_FLOOR`.
    pub holds: bool,
}

/// Empirical floor checked against the guaranteed probability 0.75.
pub const SPARSITY_FLOOR: f64 = 0.70;

impl SparsityBudget {
    pub fn new(y: Vec<f64>, delta: f64, rho: f64, epsilon: f64) -> Result<Self> {
        let params = DecompositionParams::new(delta, rho, epsilon, y.len())?;
        if classify_compressible(&y, delta, rho)? != Classification::Comp {
            return Err(Error::InvalidParameter { name: "y is incompressible; rho", value: rho });
        }
        Ok(Self { y, params })
    }

    pub fn budget(&self) -> usize {
        self.params.sparse_budget()
    }

    pub fn report(&self, tally: &CountTally) -> SparsityReport {
        let frequency = tally.hits as f64 / tally.trials as f64;
        SparsityReport { trials: tally.trials, budget: self.budget(), frequency, holds: frequency >= SPARSITY_FLOOR }
    }
}

impl Experiment for SparsityBudget {
    type Tally = CountTally;

    fn empty_tally(&self) -> CountTally {
        CountTally::default()
    }

    fn run_trial(&self, seed: RandomSeed, tally: &mut CountTally) {
        let eta = random_round_with(&self.y, self.params.epsilon(), &mut seed.rng()).expect("validated input");
        tally.trials += 1;
        tally.hits += (eta.support_size <= self.budget()) as u64;
    }
}
