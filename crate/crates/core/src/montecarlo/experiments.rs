//! Statistics behind each tail experiment.

use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};

use super::runner::{EventKind, Statistic, TrialIssue};
use crate::ensembles::{sample_matrix_with, sample_vector_with, EnsembleSpec};
use crate::error::{Error, Result};
use crate::geometry::dist_to_sparse;
use crate::linalg::{self, norm, projected_block, SubspaceBasis};
use crate::matrix::RealMatrix;
use crate::rng::TrialRng;

/// How singular-value thresholds are scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// `t` as given.
    Absolute,
    /// `t = c√N`.
    SqrtRows,
    /// `t = ε/√n`.
    InvSqrtCols,
    /// `t = ε(√(N+1) − √n)`.
    SqrtGap,
}

impl Normalization {
    pub fn scale(self, rows: usize, cols: usize) -> f64 {
        let (nr, nc) = (rows as f64, cols as f64);
        match self {
            Self::Absolute => 1.0,
            Self::SqrtRows => libm::sqrt(nr),
            Self::InvSqrtCols => 1.0 / libm::sqrt(nc),
            Self::SqrtGap => libm::sqrt(nr + 1.0) - libm::sqrt(nc),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Absolute => "absolute",
            Self::SqrtRows => "c_sqrt_N",
            Self::InvSqrtCols => "eps_over_sqrt_n",
            Self::SqrtGap => "eps_sqrt_gap",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Self::Absolute, Self::SqrtRows, Self::InvSqrtCols, Self::SqrtGap].into_iter().find(|n| n.name() == name)
    }
}

fn require_dims(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::ZeroDimension(0));
    }
    Ok(())
}

fn sample(spec: &EnsembleSpec, rows: usize, cols: usize, rng: &mut TrialRng) -> core::result::Result<RealMatrix, TrialIssue> {
    sample_matrix_with(spec, rows, cols, rng).map_err(|_| TrialIssue::Anomaly)
}

/// `σ_n(A)` in the chosen normalization.
#[derive(Debug, Clone)]
pub struct SmallestSingularValue {
    spec: EnsembleSpec,
    rows: usize,
    cols: usize,
    normalization: Normalization,
}

impl SmallestSingularValue {
    pub fn new(spec: EnsembleSpec, rows: usize, cols: usize, normalization: Normalization) -> Result<Self> {
        require_dims(rows, cols)?;
        let (r, c) = spec.output_shape(rows, cols);
        if r < c {
            return Err(Error::DimensionMismatch { expected: r, found: c });
        }
        if let EnsembleSpec::IndependentColumns(col) = &spec {
            if !col.is_vector_kind() {
                return Err(Error::NotVectorKind(col.name()));
            }
        }
        Ok(Self { spec, rows, cols, normalization })
    }
}

impl Statistic for SmallestSingularValue {
    fn evaluate(&self, rng: &mut TrialRng, out: &mut [f64]) -> core::result::Result<(), TrialIssue> {
        let a = sample(&self.spec, self.rows, self.cols, rng)?;
        let s = linalg::sigma_min(&a).map_err(|_| TrialIssue::Anomaly)?;
        out[0] = s / self.normalization.scale(self.rows, self.cols);
        Ok(())
    }
}

/// `‖X − y‖/√n`, thresholded at `ε`.
#[derive(Debug, Clone)]
pub struct SmallBall {
    spec: EnsembleSpec,
    center: Vec<f64>,
}

impl SmallBall {
    pub fn new(spec: EnsembleSpec, center: Vec<f64>) -> Result<Self> {
        if !spec.is_vector_kind() {
            return Err(Error::NotVectorKind(spec.name()));
        }
        require_dims(center.len(), 1)?;
        crate::matrix::check_finite(&center)?;
        Ok(Self { spec, center })
    }
}

impl Statistic for SmallBall {
    fn evaluate(&self, rng: &mut TrialRng, out: &mut [f64]) -> core::result::Result<(), TrialIssue> {
        let n = self.center.len();
        let x = sample_vector_with(&self.spec, n, rng).map_err(|_| TrialIssue::Anomaly)?;
        let d2: f64 = x.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum();
        out[0] = libm::sqrt(d2 / n as f64);
        Ok(())
    }
}

/// `‖X‖/(C√n)`; the event `{‖X‖ ≥ Ct√n}` is `{statistic ≥ t}`.
#[derive(Debug, Clone)]
pub struct LargeNorm {
    spec: EnsembleSpec,
    n: usize,
    constant: f64,
}

impl LargeNorm {
    pub fn new(spec: EnsembleSpec, n: usize, constant: f64) -> Result<Self> {
        if !spec.is_vector_kind() {
            return Err(Error::NotVectorKind(spec.name()));
        }
        require_dims(n, 1)?;
        if !(constant >= 0.0 && constant.is_finite()) {
            return Err(Error::InvalidParameter { name: "paouris constant", value: constant });
        }
        Ok(Self { spec, n, constant })
    }

    /// Thresholds must satisfy `t ≥ 1`.
    pub fn check_thresholds(thresholds: &[f64]) -> Result<()> {
        match thresholds.iter().find(|t| !(**t >= 1.0)) {
            Some(&t) => Err(Error::InvalidParameter { name: "paouris t", value: t }),
            None => Ok(()),
        }
    }
}

impl Statistic for LargeNorm {
    fn event(&self) -> EventKind {
        EventKind::AtLeast
    }

    fn evaluate(&self, rng: &mut TrialRng, out: &mut [f64]) -> core::result::Result<(), TrialIssue> {
        let x = sample_vector_with(&self.spec, self.n, rng).map_err(|_| TrialIssue::Anomaly)?;
        let scale = self.constant * libm::sqrt(self.n as f64);
        out[0] = if scale == 0.0 { f64::INFINITY } else { norm(&x) / scale };
        Ok(())
    }
}

/// Largest dimension for which supports are enumerated exhaustively.
pub const MAX_COMP_INF_DIM: usize = 14;

/// Visits every `k`-subset of `{0..n}` in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Certified lower bound on `inf_{x ∈ Comp(δ,ρ)} ‖Ax‖`:
/// `√(1 − ρ²) · min_{|S| = ⌈δn⌉} σ_min(A_S) − ρ σ_max(A)`.
///
/// A compressible `x` splits into its top-`⌊δn⌋` part `s` and a tail `r` with
/// `‖r‖ = ρ' ≤ ρ` and `‖s‖ = √(1 − ρ'²)`, so
/// `‖Ax‖ ≥ σ_min(A_S)√(1 − ρ'²) − σ_max(A)ρ'`, which decreases in `ρ'`.
/// Supports of size `⌈δn⌉` contain those of size `⌊δn⌋`, and enlarging a
/// support can only lower `σ_min`.
pub fn certified_comp_lower_bound(a: &RealMatrix, delta: f64, rho: f64) -> Result<f64> {
    let n = a.cols();
    if n > MAX_COMP_INF_DIM {
        return Err(Error::EnumerationTooLarge { n, limit: MAX_COMP_INF_DIM });
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter { name: "delta", value: delta });
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidParameter { name: "rho", value: rho });
    }
    let k = (libm::ceil(delta * n as f64 - 1e-9) as usize).clamp(1, n);
    let mut worst = f64::INFINITY;
    let mut failure = None;
    for_each_subset(n, k, |s| match a.select_columns(s).and_then(|sub| linalg::sigma_min(&sub)) {
        Ok(v) => worst = worst.min(v),
        Err(e) => failure = Some(e),
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let top = if rho > 0.0 { linalg::sigma_max(a)? } else { 0.0 };
    Ok(libm::sqrt(1.0 - rho * rho) * worst - rho * top)
}

/// Smallest `‖Ax‖` over `samples` random points of `Comp(δ, ρ)`: an upper
/// estimate of the compressible infimum, used to cross-check the certified
/// lower bound.
pub fn sampled_comp_infimum(a: &RealMatrix, delta: f64, rho: f64, samples: usize, rng: &mut TrialRng) -> Result<f64> {
    use rand::seq::SliceRandom;
    use rand::Rng;

    let n = a.cols();
    let k = libm::floor(delta * n as f64) as usize;
    if k == 0 {
        // Comp(δ, ρ) is empty: no unit vector is within ρ < 1 of zero.
        return Ok(f64::INFINITY);
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    for _ in 0..samples {
        order.shuffle(rng);
        let tail_norm = if k == n { 0.0 } else { rho * rng.random::<f64>() };
        let mut x = alloc::vec![0.0; n];
        let head_norm = libm::sqrt(1.0 - tail_norm * tail_norm);
        fill_direction(&mut x, &order[..k], head_norm, rng);
        fill_direction(&mut x, &order[k..], tail_norm, rng);
        // The tail must not outweigh the head, or the top-k set changes.
        let head_min = order[..k].iter().map(|&i| x[i].abs()).fold(f64::INFINITY, f64::min);
        let tail_max = order[k..].iter().map(|&i| x[i].abs()).fold(0.0, f64::max);
        if tail_max > head_min {
            continue;
        }
        let r = norm(&a.mul_vec(&x)?);
        best = best.min(r);
    }
    Ok(best)
}

fn fill_direction(x: &mut [f64], idx: &[usize], length: f64, rng: &mut TrialRng) {
    if idx.is_empty() || length == 0.0 {
        return;
    }
    let g: Vec<f64> = idx.iter().map(|_| StandardNormal.sample(rng)).collect();
    let r = norm(&g);
    for (&i, gi) in idx.iter().zip(g) {
        x[i] = length * gi / r;
    }
}

/// Certified compressible lower bound `L(A)` in the chosen normalization.
#[derive(Debug, Clone)]
pub struct CompressibleInfimum {
    spec: EnsembleSpec,
    rows: usize,
    cols: usize,
    delta: f64,
    rho: f64,
    normalization: Normalization,
}

impl CompressibleInfimum {
    pub fn new(
        spec: EnsembleSpec,
        rows: usize,
        cols: usize,
        delta: f64,
        rho: f64,
        normalization: Normalization,
    ) -> Result<Self> {
        require_dims(rows, cols)?;
        let (r, c) = spec.output_shape(rows, cols);
        if c > MAX_COMP_INF_DIM {
            return Err(Error::EnumerationTooLarge { n: c, limit: MAX_COMP_INF_DIM });
        }
        if r < c {
            return Err(Error::DimensionMismatch { expected: r, found: c });
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidParameter { name: "delta", value: delta });
        }
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::InvalidParameter { name: "rho", value: rho });
        }
        Ok(Self { spec, rows, cols, delta, rho, normalization })
    }
}

impl Statistic for CompressibleInfimum {
    fn evaluate(&self, rng: &mut TrialRng, out: &mut [f64]) -> core::result::Result<(), TrialIssue> {
        let a = sample(&self.spec, self.rows, self.cols, rng)?;
        let l = certified_comp_lower_bound(&a, self.delta, self.rho).map_err(|_| TrialIssue::Anomaly)?;
        out[0] = l / self.normalization.scale(self.rows, self.cols);
        Ok(())
    }
}

/// `dist(A₁, H₁)` for a square `n x n` draw, with `H₁` spanned by the other
/// columns. The event is `{dist < ε}`.
#[derive(Debug, Clone)]
pub struct ColumnDistance {
    spec: EnsembleSpec,
    n: usize,
}

impl ColumnDistance {
    pub fn new(spec: EnsembleSpec, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter { name: "n", value: n as f64 });
        }
        if spec.output_shape(n, n) != (n, n) {
            return Err(Error::NotVectorKind(spec.name()));
        }
        Ok(Self { spec, n })
    }
}

impl Statistic for ColumnDistance {
    fn event(&self) -> EventKind {
        EventKind::Below
    }

    fn evaluate(&self, rng: &mut TrialRng, out: &mut [f64]) -> core::result::Result<(), TrialIssue> {
        let a = sample(&self.spec, self.n, self.n, rng)?;
        let span = SubspaceBasis::from_vectors(self.n, (1..self.n).map(|j| a.column(j)));
        if span.dim() < self.n - 1 {
            return Err(TrialIssue::Degenerate);
        }
        out[0] = norm(&span.residual(a.column(0)));
        Ok(())
    }
}

/// `dist(ν, Sparse(⌊δn⌋))` for the unit normal `ν` of `H₁`; the event
/// `{· ≤ ρ}` is `{ν ∈ Comp(δ, ρ)}`.
#[derive(Debug, Clone)]
pub struct NormalCompressibility {
    spec: EnsembleSpec,
    n: usize,
    delta: f64,
}

impl NormalCompressibility {
    pub fn new(spec: EnsembleSpec, n: usize, delta: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter { name: "n", value: n as f64 });
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter { name: "delta", value: delta });
        }
        if spec.output_shape(n, n) != (n, n) {
            return Err(Error::NotVectorKind(spec.name()));
        }
        Ok(Self { spec, n, delta })
    }
}

impl Statistic for NormalCompressibility {
    fn evaluate(&self, rng: &mut TrialRng, out: &mut [f64]) -> core::result::Result<(), TrialIssue> {
        let a = sample(&self.spec, self.n, self.n, rng)?;
        let span = SubspaceBasis::from_vectors(self.n, (1..self.n).map(|j| a.column(j)));
        if span.dim() < self.n - 1 {
            return Err(TrialIssue::Degenerate);
        }
        let normal = span.complement();
        let k = libm::floor(self.delta * self.n as f64) as usize;
        out[0] = dist_to_sparse(&normal.vectors()[0], k).map_err(|_| TrialIssue::Anomaly)?;
        Ok(())
    }
}

/// `|X*_k|` with `k = ⌈n(1 − c₁)⌉`, where `|X*_1| ≥ … ≥ |X*_n|`.
#[derive(Debug, Clone)]
pub struct OrderStatistic {
    spec: EnsembleSpec,
    n: usize,
    rank: usize,
}

impl OrderStatistic {
    pub fn new(spec: EnsembleSpec, n: usize, c1: f64) -> Result<Self> {
        if !spec.is_vector_kind() {
            return Err(Error::NotVectorKind(spec.name()));
        }
        require_dims(n, 1)?;
        if !(c1 > 0.0 && c1 < 1.0) {
            return Err(Error::InvalidParameter { name: "c1", value: c1 });
        }
        let rank = (libm::ceil(n as f64 * (1.0 - c1) - 1e-9) as usize).clamp(1, n);
        Ok(Self { spec, n, rank })
    }

    /// One-based rank in the decreasing rearrangement.
    pub fn rank(&self) -> usize {
        self.rank
    }
}

impl Statistic for OrderStatistic {
    fn evaluate(&self, rng: &mut TrialRng, out: &mut [f64]) -> core::result::Result<(), TrialIssue> {
        let x = sample_vector_with(&self.spec, self.n, rng).map_err(|_| TrialIssue::Anomaly)?;
        let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
        mags.sort_by(|a, b| b.total_cmp(a));
        out[0] = mags[self.rank - 1];
        Ok(())
    }
}

/// For `W = P_{H_{J^c}^⊥} A_J` with `d = |J| = N − n + 1`: the pair
/// `(σ_min(W), ‖Wx‖) / √(2d − 1)` for a fixed unit `x`.
#[derive(Debug, Clone)]
pub struct ProjectedBlockStat {
    spec: EnsembleSpec,
    rows: usize,
    cols: usize,
    subset: Vec<usize>,
    x: Vec<f64>,
}

impl ProjectedBlockStat {
    pub fn new(spec: EnsembleSpec, rows: usize, cols: usize, subset: Vec<usize>, x: Vec<f64>) -> Result<Self> {
        check_projected_setup(&spec, rows, cols, &subset)?;
        if x.len() != subset.len() {
            return Err(Error::DimensionMismatch { expected: subset.len(), found: x.len() });
        }
        crate::geometry::unit_check(&x)?;
        Ok(Self { spec, rows, cols, subset, x })
    }

    pub fn codimension(&self) -> usize {
        2 * self.subset.len() - 1
    }
}

pub(crate) fn check_projected_setup(spec: &EnsembleSpec, rows: usize, cols: usize, subset: &[usize]) -> Result<()> {
    match spec {
        EnsembleSpec::IndependentColumns(c) if c.is_vector_kind() => {}
        other => return Err(Error::NotVectorKind(other.name())),
    }
    require_dims(rows, cols)?;
    if rows < cols {
        return Err(Error::DimensionMismatch { expected: cols, found: rows });
    }
    let d = rows - cols + 1;
    if subset.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: subset.len() });
    }
    linalg::complement_indices(cols, subset)?;
    Ok(())
}

impl Statistic for ProjectedBlockStat {
    fn arity(&self) -> usize {
        2
    }

    fn evaluate(&self, rng: &mut TrialRng, out: &mut [f64]) -> core::result::Result<(), TrialIssue> {
        let a = sample(&self.spec, self.rows, self.cols, rng)?;
        let w = match projected_block(&a, &self.subset) {
            Ok(w) => w,
            Err(Error::RankDeficient { .. }) => return Err(TrialIssue::Degenerate),
            Err(_) => return Err(TrialIssue::Anomaly),
        };
        if w.rows() != self.codimension() {
            return Err(TrialIssue::Anomaly);
        }
        let scale = libm::sqrt(self.codimension() as f64);
        out[0] = linalg::sigma_min(&w).map_err(|_| TrialIssue::Anomaly)? / scale;
        out[1] = norm(&w.mul_vec(&self.x).map_err(|_| TrialIssue::Anomaly)?) / scale;
        Ok(())
    }
}
