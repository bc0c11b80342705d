//! Isotropic log-concave vector and matrix laws.
//!
//! Every kind is centered with identity covariance by construction: the
//! scaling constants are closed-form, never estimated.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::rng::{RandomSeed, TrialRng};

/// Declarative description of an isotropic log-concave law.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EnsembleSpec {
    /// Independent standard normal coordinates.
    Gaussian,
    /// Independent coordinates uniform on `[−√3, √3]`.
    UniformCube,
    /// Independent coordinates with density `(1/√2) exp(−√2|x|)`.
    Laplace,
    /// Uniform on `r_d B_1^d` with `r_d = √((d+1)(d+2)/2)`.
    L1Ball,
    /// Matrix whose columns are independent draws of the column law.
    IndependentColumns(Box<EnsembleSpec>),
    /// `copies` independent `N x n` draws of `base`, placed side by side.
    Concatenated { base: Box<EnsembleSpec>, copies: usize },
}

impl EnsembleSpec {
    pub fn independent_columns(column: EnsembleSpec) -> Self {
        Self::IndependentColumns(Box::new(column))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::UniformCube => "uniform_cube",
            Self::Laplace => "laplace",
            Self::L1Ball => "ell1_ball",
            Self::IndependentColumns(_) => "independent_columns",
            Self::Concatenated { .. } => "concatenated",
        }
    }

    /// Whether a single draw is a vector (as opposed to a structured matrix law).
    pub fn is_vector_kind(&self) -> bool {
        !matches!(self, Self::IndependentColumns(_) | Self::Concatenated { .. })
    }

    /// Whether the density is invariant under coordinate sign flips.
    pub fn is_unconditional(&self) -> bool {
        match self {
            Self::Gaussian | Self::UniformCube | Self::Laplace | Self::L1Ball => true,
            Self::IndependentColumns(c) => c.is_unconditional(),
            Self::Concatenated { base, .. } => base.is_unconditional(),
        }
    }

    /// Closed-form scale making a `dim`-dimensional draw isotropic: the
    /// cube half-width, the Laplace scale, or the ℓ₁-ball radius.
    pub fn scale(&self, dim: usize) -> Option<f64> {
        match self {
            Self::Gaussian => Some(1.0),
            Self::UniformCube => Some(libm::sqrt(3.0)),
            Self::Laplace => Some(core::f64::consts::FRAC_1_SQRT_2),
            Self::L1Ball => Some(l1_ball_radius(dim)),
            _ => None,
        }
    }

    /// Shape `(rows, cols)` of a draw from `sample_matrix(self, rows, cols)`.
    pub fn output_shape(&self, rows: usize, cols: usize) -> (usize, usize) {
        match self {
            Self::Concatenated { base, copies } => {
                let (r, c) = base.output_shape(rows, cols);
                (r, c * copies)
            }
            _ => (rows, cols),
        }
    }
}

/// Radius `√((d+1)(d+2)/2)` of the isotropic ℓ₁ ball in dimension `d`.
pub fn l1_ball_radius(dim: usize) -> f64 {
    let d = dim as f64;
    libm::sqrt((d + 1.0) * (d + 2.0) / 2.0)
}

fn fill_vector(spec: &EnsembleSpec, out: &mut [f64], rng: &mut TrialRng) -> Result<()> {
    match spec {
        EnsembleSpec::Gaussian => {
            for x in out.iter_mut() {
                *x = StandardNormal.sample(rng);
            }
        }
        EnsembleSpec::UniformCube => {
            let a = libm::sqrt(3.0);
            for x in out.iter_mut() {
                *x = a * (2.0 * rng.random::<f64>() - 1.0);
            }
        }
        EnsembleSpec::Laplace => {
            for x in out.iter_mut() {
                let e: f64 = Exp1.sample(rng);
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                *x = sign * e * core::f64::consts::FRAC_1_SQRT_2;
            }
        }
        EnsembleSpec::L1Ball => {
            // Exponential spacings with random signs give a uniform point on the
            // ℓ₁ sphere; U^{1/d} makes the radial law uniform on the ball.
            let mut total = 0.0;
            for x in out.iter_mut() {
                let e: f64 = Exp1.sample(rng);
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                total += e;
                *x = sign * e;
            }
            let d = out.len();
            let radial = libm::pow(rng.random::<f64>(), 1.0 / d as f64);
            let factor = l1_ball_radius(d) * radial / total;
            out.iter_mut().for_each(|x| *x *= factor);
        }
        other => return Err(Error::NotVectorKind(other.name())),
    }
    Ok(())
}

/// One draw from an `n`-dimensional vector law.
pub fn sample_vector(spec: &EnsembleSpec, n: usize, seed: RandomSeed) -> Result<Vec<f64>> {
    sample_vector_with(spec, n, &mut seed.rng())
}

/// As [`sample_vector`], continuing an existing stream.
pub fn sample_vector_with(spec: &EnsembleSpec, n: usize, rng: &mut TrialRng) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::ZeroDimension(0));
    }
    let mut out = vec![0.0; n];
    fill_vector(spec, &mut out, rng)?;
    Ok(out)
}

/// One draw of an `N x n` matrix (wider for concatenated specs, see
/// [`EnsembleSpec::output_shape`]).
///
/// Vector kinds are drawn as a single `Nn`-dimensional vector, so the ℓ₁-ball
/// kind gives a matrix with dependent entries.
pub fn sample_matrix(spec: &EnsembleSpec, rows: usize, cols: usize, seed: RandomSeed) -> Result<RealMatrix> {
    sample_matrix_with(spec, rows, cols, &mut seed.rng())
}

pub fn sample_matrix_with(
    spec: &EnsembleSpec,
    rows: usize,
    cols: usize,
    rng: &mut TrialRng,
) -> Result<RealMatrix> {
    let mut m = RealMatrix::zeros(rows, cols)?;
    match spec {
        EnsembleSpec::IndependentColumns(column) => {
            if !column.is_vector_kind() {
                return Err(Error::NotVectorKind(column.name()));
            }
            for j in 0..cols {
                fill_vector(column, m.column_mut(j), rng)?;
            }
            Ok(m)
        }
        EnsembleSpec::Concatenated { base, copies } => {
            if *copies == 0 {
                return Err(Error::ZeroDimension(0));
            }
            let blocks = (0..*copies)
                .map(|_| sample_matrix_with(base, rows, cols, rng))
                .collect::<Result<Vec<_>>>()?;
            RealMatrix::hstack(&blocks)
        }
        vector_kind => {
            let mut data = m.into_col_major();
            fill_vector(vector_kind, &mut data, rng)?;
            RealMatrix::from_col_major(rows, cols, data)
        }
    }
}

/// Spec whose draws are `⌊N/n⌋` independent `N x n` copies of `spec` side by side.
pub fn make_concatenated(spec: EnsembleSpec, rows: usize, cols: usize) -> Result<EnsembleSpec> {
    if cols == 0 {
        return Err(Error::ZeroDimension(0));
    }
    if rows < 2 * cols {
        return Err(Error::ConcatenationTooShort { rows, cols });
    }
    Ok(EnsembleSpec::Concatenated { base: Box::new(spec), copies: rows / cols })
}

/// Running mean and covariance of a vector stream.
#[derive(Debug, Clone)]
pub struct MomentAccumulator {
    count: u64,
    mean: Vec<f64>,
    comoment: Vec<f64>,
}

impl MomentAccumulator {
    pub fn new(dim: usize) -> Self {
        Self { count: 0, mean: vec![0.0; dim], comoment: vec![0.0; dim * dim] }
    }

    pub fn push(&mut self, x: &[f64]) {
        let n = self.mean.len();
        debug_assert_eq!(x.len(), n);
        self.count += 1;
        let k = self.count as f64;
        let delta: Vec<f64> = x.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        for (m, d) in self.mean.iter_mut().zip(&delta) {
            *m += d / k;
        }
        for i in 0..n {
            let after = x[i] - self.mean[i];
            for j in 0..n {
                self.comoment[i * n + j] += delta[j] * after;
            }
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Unbiased covariance entry `(i, j)`.
    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        let n = self.mean.len();
        self.comoment[i * n + j] / (self.count as f64 - 1.0)
    }

    pub fn report(&self) -> IsotropyReport {
        let n = self.mean.len();
        let mut max_cov = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                max_cov = max_cov.max(libm::fabs(self.covariance(i, j) - target));
            }
        }
        let max_mean = self.mean.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v)));
        IsotropyReport { trials: self.count, max_covariance_deviation: max_cov, max_abs_mean: max_mean }
    }
}

/// Deviation of the empirical moments from those of an isotropic law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropyReport {
    pub trials: u64,
    /// `max |Σ̂ᵢⱼ − δᵢⱼ|`.
    pub max_covariance_deviation: f64,
    pub max_abs_mean: f64,
}

/// Empirical isotropy check of a vector law over `trials` independent draws.
pub fn isotropy_report(spec: &EnsembleSpec, n: usize, trials: u64, master: u64) -> Result<IsotropyReport> {
    if trials < 2 {
        return Err(Error::InvalidParameter { name: "trials", value: trials as f64 });
    }
    if !spec.is_vector_kind() {
        return Err(Error::NotVectorKind(spec.name()));
    }
    let mut acc = MomentAccumulator::new(n);
    let mut x = vec![0.0; n];
    for t in 0..trials {
        fill_vector(spec, &mut x, &mut RandomSeed::trial(master, t).rng())?;
        acc.push(&x);
    }
    Ok(acc.report())
}
