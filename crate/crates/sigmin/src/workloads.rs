//! Random inputs for experiments: unit vectors with a prescribed
//! compressibility profile.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use sigmin_core::geometry::{classify_compressible, Classification};
use sigmin_core::rng::TrialRng;

/// Uniform direction on the sphere `S^{n−1}`.
pub fn random_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let r = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > 0.0 {
            return g.into_iter().map(|v| v / r).collect();
        }
    }
}

/// Unit vector whose mass sits on `⌊δn⌋` random coordinates, with a tail of
/// norm `τ < ρ` on the rest, so it lies in `Comp(δ, ρ)`.
pub fn random_compressible(n: usize, delta: f64, rho: f64, rng: &mut TrialRng) -> Vec<f64> {
    let k = ((delta * n as f64).floor() as usize).clamp(1, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let tau = if k == n { 0.0 } else { rho * rng.random::<f64>() };
    let mut x = vec![0.0; n];
    place(&mut x, &order[..k], (1.0 - tau * tau).sqrt(), rng);
    place(&mut x, &order[k..], tau, rng);
    x
}

/// Unit vector in `Incomp(δ, ρ)`. Even draws are uniform directions; odd
/// draws sit just past the boundary, with `⌊δn⌋` large coordinates and a flat
/// tail of norm in `(ρ, 1)`.
pub fn random_incompressible(n: usize, delta: f64, rho: f64, rng: &mut TrialRng) -> Vec<f64> {
    let k = (delta * n as f64).floor() as usize;
    loop {
        let x = if rng.random::<bool>() || k == 0 || k == n {
            random_unit(n, rng)
        } else {
            let tau = rho + (1.0 - rho) * rng.random::<f64>();
            let a = ((1.0 - tau * tau) / k as f64).sqrt();
            let b = tau / ((n - k) as f64).sqrt();
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let mut x = vec![0.0; n];
            for (j, &i) in order.iter().enumerate() {
                let mag = if j < k { a } else { b } * (1.0 + 0.2 * rng.random::<f64>());
                x[i] = if rng.random::<bool>() { mag } else { -mag };
            }
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.into_iter().map(|v| v / r).collect()
        };
        if classify_compressible(&x, delta, rho) == Ok(Classification::Incomp) {
            return x;
        }
    }
}

fn place(x: &mut [f64], idx: &[usize], length: f64, rng: &mut TrialRng) {
    if idx.is_empty() {
        return;
    }
    let u = random_unit(idx.len(), rng);
    for (&i, v) in idx.iter().zip(u) {
        x[i] = length * v;
    }
}

/// The default subset `J = {0, …, d−1}` with `d = N − n + 1`.
pub fn leading_subset(rows: usize, cols: usize) -> Vec<usize> {
    (0..rows + 1 - cols).collect()
}

/// The flat unit vector `(1/√d, …, 1/√d)`.
pub fn flat_unit(d: usize) -> Vec<f64> {
    vec![1.0 / (d as f64).sqrt(); d]
}

#[cfg(test)]
mod tests {
    use super::*;
    use sigmin_core::RandomSeed;

    #[test]
    fn profiles_classify_as_requested() {
        let mut rng = RandomSeed::new(3, 0).rng();
        for _ in 0..200 {
            let c = random_compressible(30, 0.5, 0.1, &mut rng);
            assert_eq!(classify_compressible(&c, 0.5, 0.1), Ok(Classification::Comp));
            let i = random_incompressible(30, 0.3, 0.2, &mut rng);
            assert_eq!(classify_compressible(&i, 0.3, 0.2), Ok(Classification::Incomp));
        }
    }
}
