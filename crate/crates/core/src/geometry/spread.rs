use alloc::vec::Vec;

use super::sparse::{classify_compressible, unit_check, Classification};
use crate::error::{Error, Result};

/// Constants `c, C` of a spread vector: every `|v_i| ∈ [c/√d, C/√d]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadParams {
    pub c_lo: f64,
    pub c_hi: f64,
}

impl SpreadParams {
    pub fn new(c_lo: f64, c_hi: f64) -> Result<Self> {
        if !(c_lo > 0.0) {
            return Err(Error::InvalidParameter { name: "c_lo", value: c_lo });
        }
        if !(c_hi >= c_lo && c_hi.is_finite()) {
            return Err(Error::InvalidParameter { name: "c_hi", value: c_hi });
        }
        Ok(Self { c_lo, c_hi })
    }
}

impl Default for SpreadParams {
    fn default() -> Self {
        Self { c_lo: 0.1, c_hi: 10.0 }
    }
}

pub fn is_spread(v: &[f64], params: &SpreadParams) -> bool {
    if v.is_empty() {
        return false;
    }
    let root = libm::sqrt(v.len() as f64);
    let (lo, hi) = (params.c_lo / root, params.c_hi / root);
    v.iter().all(|x| {
        let a = x.abs();
        a >= lo && a <= hi
    })
}

/// For incompressible `x`, the coordinates with `ρ/√(2n) ≤ |x_i| ≤ 1/√(δn)`.
///
/// There are always at least `ρ²δn/2` of them; [`Error::WitnessTooSmall`]
/// reports the contrary.
pub fn spread_witness(x: &[f64], delta: f64, rho: f64) -> Result<Vec<usize>> {
    unit_check(x)?;
    if classify_compressible(x, delta, rho)? == Classification::Comp {
        return Err(Error::Compressible);
    }
    let n = x.len() as f64;
    let lo = rho / libm::sqrt(2.0 * n);
    let hi = 1.0 / libm::sqrt(delta * n);
    let j: Vec<usize> = x
        .iter()
        .enumerate()
        .filter(|(_, v)| {
            let a = v.abs();
            a >= lo && a <= hi
        })
        .map(|(i, _)| i)
        .collect();
    let required = rho * rho * delta * n / 2.0;
    if (j.len() as f64) < required {
        return Err(Error::WitnessTooSmall { found: j.len(), required });
    }
    Ok(j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn flat_vector_is_its_own_witness() {
        let n = 40;
        let x = vec![1.0 / libm::sqrt(n as f64); n];
        let j = spread_witness(&x, 0.3, 0.2).unwrap();
        assert_eq!(j.len(), n);
    }

    #[test]
    fn compressible_input_is_rejected() {
        let mut e1 = vec![0.0; 10];
        e1[0] = 1.0;
        assert_eq!(spread_witness(&e1, 0.5, 0.1), Err(Error::Compressible));
    }

    #[test]
    fn spread_examples() {
        let d = 9;
        let flat = vec![1.0 / 3.0; d];
        assert!(is_spread(&flat, &SpreadParams::new(0.5, 2.0).unwrap()));
        let mut e1 = vec![0.0; d];
        e1[0] = 1.0;
        assert!(!is_spread(&e1, &SpreadParams::default()));
        assert!(SpreadParams::new(2.0, 1.0).is_err());
        assert!(SpreadParams::new(0.0, 1.0).is_err());
    }
}
