//! Closed-form and brute-force reference values.
//!
//! Nothing here calls into the estimator paths of `sigmin-core`: the oracles
//! use their own arithmetic (characteristic polynomials, normal equations,
//! exhaustive supports, special-function CDFs) so agreement is meaningful.

use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF};

/// Standard normal CDF `Φ(x)`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// `P(|Z| ≤ x) = 2Φ(x) − 1`: the law of the distance from a Gaussian vector
/// to an independent hyperplane.
pub fn half_normal_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    libm::erf(x * std::f64::consts::FRAC_1_SQRT_2)
}

/// `P(χ²_k ≤ x)`.
pub fn chi_square_cdf(k: u64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    ChiSquared::new(k as f64).expect("positive degrees of freedom").cdf(x)
}

/// `P(χ_k ≤ x)`.
pub fn chi_cdf(k: u64, x: f64) -> f64 {
    chi_square_cdf(k, x * x)
}

/// `P(χ²_k ≥ x)`.
pub fn chi_square_sf(k: u64, x: f64) -> f64 {
    ChiSquared::new(k as f64).expect("positive degrees of freedom").sf(x)
}

/// Exact law of the `rank`-th largest of `n` i.i.d. magnitudes:
/// `P(|X*_rank| ≤ r) = P(Bin(n, q) ≥ n − rank + 1)` with `q = P(|X| ≤ r)`.
pub fn order_statistic_probability(n: u64, rank: u64, q: f64) -> f64 {
    let bin = Binomial::new(q.clamp(0.0, 1.0), n).expect("valid binomial");
    bin.sf(n - rank)
}

/// `P(|X| ≤ r)` for one coordinate of the isotropic uniform cube.
pub fn uniform_cube_abs_cdf(r: f64) -> f64 {
    (r / 3f64.sqrt()).clamp(0.0, 1.0)
}

/// `P(|X| ≤ r)` for a standard normal coordinate.
pub fn gaussian_abs_cdf(r: f64) -> f64 {
    half_normal_cdf(r)
}

/// Coordinate second moment of the uniform law on `B₁^d`, as
/// `d ∫₀¹ x²(1 − x)^{d−1} dx` by composite Simpson quadrature.
pub fn l1_ball_second_moment(d: usize) -> f64 {
    let steps = 20_000;
    let h = 1.0 / steps as f64;
    let f = |x: f64| x * x * (1.0 - x).powi(d as i32 - 1);
    let mut s = f(0.0) + f(1.0);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(i as f64 * h);
    }
    d as f64 * s * h / 3.0
}

/// Leading-order location `√N − √n` of the smallest singular value of a tall
/// `N x n` isotropic matrix.
pub fn marchenko_pastur_lower_edge(rows: usize, cols: usize) -> f64 {
    (rows as f64).sqrt() - (cols as f64).sqrt()
}

/// Singular values of a 3x3 matrix (row-major) from the roots of the
/// characteristic polynomial of `AᵀA`, descending.
///
/// The two large roots come from the trigonometric cubic formula; the smallest
/// is recovered as `det(A)²/(λ₁λ₂)` to keep its relative accuracy.
pub fn singular_values_3x3(a: &[f64; 9]) -> [f64; 3] {
    let at = |i: usize, j: usize| a[i * 3 + j];
    let mut m = [[0.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|k| at(k, i) * at(k, j)).sum();
        }
    }
    let tr = m[0][0] + m[1][1] + m[2][2];
    let c1 = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0] + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let det_a = at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1))
        - at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0))
        + at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
    let c0 = det_a * det_a;
    // λ³ − tr λ² + c1 λ − c0 = 0; shift λ = μ + tr/3.
    let shift = tr / 3.0;
    let p = c1 - tr * tr / 3.0;
    let q = -2.0 * tr * tr * tr / 27.0 + tr * c1 / 3.0 - c0;
    let mut roots = if p.abs() < 1e-300 {
        [shift; 3]
    } else {
        let r = (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p * r)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let two_pi_3 = 2.0 * std::f64::consts::PI / 3.0;
        [0, 1, 2].map(|k| shift + 2.0 * r * (phi - two_pi_3 * k as f64).cos())
    };
    roots.sort_by(|x, y| y.total_cmp(x));
    if roots[0] > 0.0 && roots[1] > 0.0 {
        roots[2] = c0 / (roots[0] * roots[1]);
    }
    roots.map(|l| l.max(0.0).sqrt())
}

/// `min_z ‖v − Bz‖` by solving the normal equations `BᵀB z = Bᵀv`
/// with Gaussian elimination (partial pivoting). `b` is given as columns.
pub fn least_squares_residual(v: &[f64], b: &[Vec<f64>]) -> f64 {
    let k = b.len();
    let mut g = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            g[i][j] = b[i].iter().zip(&b[j]).map(|(x, y)| x * y).sum();
        }
        g[i][k] = b[i].iter().zip(v).map(|(x, y)| x * y).sum();
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&r, &s| g[r][col].abs().total_cmp(&g[s][col].abs())).unwrap();
        g.swap(col, piv);
        for r in col + 1..k {
            let f = g[r][col] / g[col][col];
            for c in col..=k {
                g[r][c] -= f * g[col][c];
            }
        }
    }
    let mut z = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| g[i][j] * z[j]).sum();
        z[i] = (g[i][k] - s) / g[i][i];
    }
    let mut r = v.to_vec();
    for (col, zj) in b.iter().zip(&z) {
        for (ri, bi) in r.iter_mut().zip(col) {
            *ri -= zj * bi;
        }
    }
    r.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `min_{|S| = k} ‖x − x|_S‖` by scanning every support.
pub fn dist_to_sparse_exhaustive(x: &[f64], k: usize) -> f64 {
    let n = x.len();
    assert!(n <= 20 && k <= n);
    let mut best = f64::INFINITY;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let off: f64 = (0..n).filter(|i| mask & (1 << i) == 0).map(|i| x[i] * x[i]).sum();
        best = best.min(off.sqrt());
    }
    best
}

/// Number of points of `(ε/√n)ℤⁿ ∩ Sparse(m) ∩ (1+ε)B₂ⁿ`, by scanning the
/// whole lattice box `[−K, K]ⁿ`.
pub fn net_cardinality_box_scan(n: usize, epsilon: f64, m: usize) -> u64 {
    let h = epsilon / (n as f64).sqrt();
    let k = ((1.0 + epsilon) / h).floor() as i64;
    let side = (2 * k + 1) as u64;
    let total = side.pow(n as u32);
    let mut count = 0;
    let mut z = vec![0.0; n];
    for code in 0..total {
        let mut c = code;
        for zi in z.iter_mut() {
            *zi = ((c % side) as i64 - k) as f64 * h;
            c /= side;
        }
        if sigmin_core::geometry::sparse_net_contains(&z, epsilon, m) {
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_integral_matches_closed_form() {
        for d in [1, 2, 4, 5, 10] {
            let exact = 2.0 / ((d as f64 + 1.0) * (d as f64 + 2.0));
            assert!((l1_ball_second_moment(d) - exact).abs() < 1e-10, "d = {d}");
        }
    }

    #[test]
    fn cubic_roots_of_diagonal() {
        let sv = singular_values_3x3(&[3.0, 0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, 0.5]);
        for (s, e) in sv.iter().zip([3.0, 2.0, 0.5]) {
            assert!((s - e).abs() < 1e-12);
        }
    }

    #[test]
    fn reference_values() {
        let rel = |a: f64, b: f64| (a - b).abs() / b;
        assert!(rel(chi_square_cdf(50, 12.5), 1.287_922_654_685_613_4e-8) < 1e-9);
        assert!(rel(chi_cdf(9, 2.0), 0.088_587_473_168_320_83) < 1e-12);
        assert!(rel(chi_cdf(5, 1.5), 0.186_418_220_216_352_3) < 1e-12);
        assert!(rel(chi_square_sf(100, 900.0), 6.929_916_559_119_848e-129) < 1e-6);
        assert!((order_statistic_probability(100, 90, gaussian_abs_cdf(0.05)) - 0.002_186_204_355).abs() < 1e-9);
        assert!((half_normal_cdf(1.0) - 0.682_689_492_137_085_9).abs() < 1e-15);
        assert!((normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);
        assert!((marchenko_pastur_lower_edge(200, 50) - 0.5 * 200f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn normal_equations_on_a_plane() {
        let b = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        assert!((least_squares_residual(&[3.0, 4.0, 5.0], &b) - 5.0).abs() < 1e-14);
    }
}
