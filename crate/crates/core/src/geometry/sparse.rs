use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::norm;

/// Allowed deviation of `‖x‖` from one for inputs that must be unit vectors.
pub const UNIT_TOLERANCE: f64 = 1e-10;

/// Absorbs floating-point noise in `ceil` of quantities that are integers in
/// exact arithmetic, such as `4nρ/ε` with `ρ/ε` rational.
fn ceil_robust(x: f64) -> f64 {
    libm::ceil(x - 1e-9 * x.abs().max(1.0))
}

pub fn unit_check(x: &[f64]) -> Result<()> {
    let r = norm(x);
    if (r - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::NotUnit(r));
    }
    Ok(())
}

/// Number of nonzero coordinates.
pub fn support_size(x: &[f64]) -> usize {
    x.iter().filter(|v| **v != 0.0).count()
}

/// Euclidean distance from `x` to the vectors with at most `k` nonzero
/// coordinates: the norm of the `n − k` smallest-magnitude entries.
pub fn dist_to_sparse(x: &[f64], k: usize) -> Result<f64> {
    if k > x.len() {
        return Err(Error::IndexOutOfRange { index: k, dim: x.len() });
    }
    let mut squares: Vec<f64> = x.iter().map(|v| v * v).collect();
    squares.sort_by(f64::total_cmp);
    let tail: f64 = squares[..x.len() - k].iter().sum();
    Ok(libm::sqrt(tail))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Comp,
    Incomp,
}

/// `Comp` iff `dist(x, Sparse(⌊δn⌋)) ≤ ρ`; ties go to `Comp`.
pub fn classify_compressible(x: &[f64], delta: f64, rho: f64) -> Result<Classification> {
    unit_check(x)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter { name: "delta", value: delta });
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidParameter { name: "rho", value: rho });
    }
    let k = libm::floor(delta * x.len() as f64) as usize;
    Ok(if dist_to_sparse(x, k)? <= rho { Classification::Comp } else { Classification::Incomp })
}

/// `(δ, ρ, ε)` and dimension `n`; the sparsity budget `m` is derived on demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionParams {
    delta: f64,
    rho: f64,
    epsilon: f64,
    n: usize,
}

impl DecompositionParams {
    pub fn new(delta: f64, rho: f64, epsilon: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension(0));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter { name: "delta", value: delta });
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidParameter { name: "rho", value: rho });
        }
        if !(epsilon > 0.0 && epsilon <= 0.5) {
            return Err(Error::InvalidParameter { name: "epsilon", value: epsilon });
        }
        Ok(Self { delta, rho, epsilon, n })
    }

    /// Parameters of the compressible-infimum bound: `ρ = (1 − δ)ε/5`.
    pub fn compressible_regime(delta: f64, epsilon: f64, n: usize) -> Result<Self> {
        Self::new(delta, (1.0 - delta) * epsilon / 5.0, epsilon, n)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `⌊δn⌋`, the sparsity level defining `Comp(δ, ρ)`.
    pub fn sparse_level(&self) -> usize {
        libm::floor(self.delta * self.n as f64) as usize
    }

    /// `⌈δn⌉ + ⌈nρ²/ε² + 4nρ/ε⌉` before clamping.
    pub fn raw_budget(&self) -> usize {
        let n = self.n as f64;
        let ratio = self.rho / self.epsilon;
        let head = ceil_robust(self.delta * n);
        let tail = ceil_robust(n * ratio * ratio + 4.0 * n * ratio);
        (head + tail) as usize
    }

    /// Sparsity budget `m` of the net, clamped to `n`.
    pub fn sparse_budget(&self) -> usize {
        self.raw_budget().min(self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn dist_to_sparse_examples() {
        assert_eq!(dist_to_sparse(&[1.0, 0.0, 0.0], 1).unwrap(), 0.0);
        let d = dist_to_sparse(&[0.5; 4], 2).unwrap();
        assert!((d - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(dist_to_sparse(&[3.0, -4.0], 0).unwrap(), 5.0);
        assert!(dist_to_sparse(&[1.0], 2).is_err());
    }

    #[test]
    fn classification_examples() {
        let mut e1 = vec![0.0; 10];
        e1[0] = 1.0;
        assert_eq!(classify_compressible(&e1, 0.5, 0.1).unwrap(), Classification::Comp);

        let flat = vec![0.1; 100];
        assert_eq!(classify_compressible(&flat, 0.1, 0.1).unwrap(), Classification::Incomp);
        assert!((dist_to_sparse(&flat, 10).unwrap() - libm::sqrt(0.9)).abs() < 1e-12);

        assert!(matches!(classify_compressible(&[0.5, 0.5], 0.5, 0.1), Err(Error::NotUnit(_))));
    }

    #[test]
    fn boundary_is_compressible() {
        // n = 4, ⌊δn⌋ = 1; the tail (0.6, 0, 0) has norm 0.6.
        let x = [0.0, 0.6, 0.8, 0.0];
        let rho = dist_to_sparse(&x, 1).unwrap();
        assert!((rho - 0.6).abs() < 1e-15);
        assert_eq!(classify_compressible(&x, 0.25, rho).unwrap(), Classification::Comp);
        assert_eq!(classify_compressible(&x, 0.25, rho * 0.999).unwrap(), Classification::Incomp);
    }

    #[test]
    fn budget_formula() {
        let p = DecompositionParams::compressible_regime(0.5, 0.4, 100).unwrap();
        assert!((p.rho() - 0.04).abs() < 1e-15);
        // 50 + ⌈100·0.01 + 400·0.1⌉ = 91
        assert_eq!(p.raw_budget(), 91);
        assert_eq!(p.sparse_budget(), 91);
        assert_eq!(p.sparse_level(), 50);

        let p6 = DecompositionParams::compressible_regime(0.5, 0.5, 6).unwrap();
        // 3 + ⌈0.06 + 2.4⌉ = 6
        assert_eq!(p6.sparse_budget(), 6);

        let big = DecompositionParams::new(0.5, 0.5, 0.5, 10).unwrap();
        assert!(big.raw_budget() > 10);
        assert_eq!(big.sparse_budget(), 10);
    }

    #[test]
    fn rejects_out_of_range_params() {
        assert!(DecompositionParams::new(0.0, 0.1, 0.1, 4).is_err());
        assert!(DecompositionParams::new(0.5, 1.0, 0.1, 4).is_err());
        assert!(DecompositionParams::new(0.5, 0.1, 0.6, 4).is_err());
        assert!(DecompositionParams::new(0.5, 0.1, 0.1, 0).is_err());
    }
}
