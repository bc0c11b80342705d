//! Pointwise check of the event cover used for the projected block.
//!
//! With `d = N − n + 1` and `m = ⌈log₂(C₁√(Nn)/d)⌉`, the bands
//! `{‖W‖_HS < C₁d}`, `{C₁2ⁱd ≤ ‖W‖_HS < C₁2ⁱ⁺¹d}` for `0 ≤ i ≤ m` and
//! `{‖W‖_HS ≥ C₁√(Nn)}` tile `[0, ∞)`, so the small-infimum event
//! `{inf_{x ∈ spread} ‖Wx‖ ≤ ε√d}` lies in `𝓔₁ ∪ (∪ᵢ 𝓔₂,ᵢ) ∪ 𝓔₃` on every sample.

use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};

use super::experiments::check_projected_setup;
use super::runner::{Experiment, Merge};
use crate::ensembles::{sample_matrix_with, EnsembleSpec};
use crate::error::{Error, Result};
use crate::geometry::{is_spread, SpreadParams};
use crate::linalg::{hs_norm, norm, projected_block};
use crate::rng::{RandomSeed, TrialRng};

#[derive(Debug, Clone)]
pub struct EventCover {
    spec: EnsembleSpec,
    rows: usize,
    cols: usize,
    subset: Vec<usize>,
    epsilon: f64,
    c1: f64,
    spread: SpreadParams,
    spread_samples: usize,
}

/// Event counts over the sample stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverTally {
    pub trials: u64,
    pub discarded: u64,
    /// Samples where the sampled spread infimum was at most `ε√d`.
    pub small_infimum: u64,
    pub e1: u64,
    /// `𝓔₂,ᵢ` counts for `i = 0..=m`.
    pub e2: Vec<u64>,
    pub e3: u64,
    /// Samples in the small-infimum event but in none of the cover events.
    pub violations: u64,
}

impl Merge for CoverTally {
    fn merge(&mut self, other: Self) {
        self.trials += other.trials;
        self.discarded += other.discarded;
        self.small_infimum += other.small_infimum;
        self.e1 += other.e1;
        for (a, b) in self.e2.iter_mut().zip(other.e2) {
            *a += b;
        }
        self.e3 += other.e3;
        self.violations += other.violations;
    }
}

/// Which cover events a single `(inf, ‖W‖_HS)` pair triggers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverFlags {
    pub small_infimum: bool,
    pub e1: bool,
    pub e2: Vec<bool>,
    pub e3: bool,
}

impl CoverFlags {
    pub fn covered(&self) -> bool {
        !self.small_infimum || self.e1 || self.e3 || self.e2.iter().any(|&b| b)
    }
}

impl EventCover {
    pub fn new(
        spec: EnsembleSpec,
        rows: usize,
        cols: usize,
        subset: Vec<usize>,
        epsilon: f64,
        c1: f64,
        spread: SpreadParams,
        spread_samples: usize,
    ) -> Result<Self> {
        check_projected_setup(&spec, rows, cols, &subset)?;
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter { name: "epsilon", value: epsilon });
        }
        if !(c1 > 0.0 && c1.is_finite()) {
            return Err(Error::InvalidParameter { name: "c1", value: c1 });
        }
        if spread_samples == 0 {
            return Err(Error::InvalidParameter { name: "spread_samples", value: 0.0 });
        }
        Ok(Self { spec, rows, cols, subset, epsilon, c1, spread, spread_samples })
    }

    pub fn d(&self) -> usize {
        self.subset.len()
    }

    /// `m = ⌈log₂(C₁√(Nn)/d)⌉`, floored at zero.
    pub fn band_count(&self) -> usize {
        let ratio = self.c1 * libm::sqrt((self.rows * self.cols) as f64) / self.d() as f64;
        libm::ceil(libm::log2(ratio)).max(0.0) as usize
    }

    /// Evaluates the cover events for a given infimum value and HS norm.
    pub fn flags(&self, infimum: f64, hs: f64) -> CoverFlags {
        let d = self.d() as f64;
        let level = self.epsilon * libm::sqrt(d);
        let small_infimum = infimum <= level;
        let e1 = small_infimum && hs < self.c1 * d;
        let e2 = (0..=self.band_count())
            .map(|i| {
                let p = libm::exp2(i as f64);
                infimum <= p * level && self.c1 * p * d <= hs && hs < 2.0 * self.c1 * p * d
            })
            .collect();
        let e3 = hs >= self.c1 * libm::sqrt((self.rows * self.cols) as f64);
        CoverFlags { small_infimum, e1, e2, e3 }
    }

    /// Minimum of `‖Wx‖` over up to `spread_samples` random spread vectors.
    fn spread_infimum(&self, w: &crate::RealMatrix, rng: &mut TrialRng) -> f64 {
        let d = self.d();
        let mut best = f64::INFINITY;
        let mut accepted = 0;
        let mut x = vec![0.0; d];
        for _ in 0..self.spread_samples * 64 {
            x.iter_mut().for_each(|v| *v = StandardNormal.sample(rng));
            let r = norm(&x);
            x.iter_mut().for_each(|v| *v /= r);
            if !is_spread(&x, &self.spread) {
                continue;
            }
            if let Ok(wx) = w.mul_vec(&x) {
                best = best.min(norm(&wx));
            }
            accepted += 1;
            if accepted == self.spread_samples {
                break;
            }
        }
        best
    }
}

impl Experiment for EventCover {
    type Tally = CoverTally;

    fn empty_tally(&self) -> CoverTally {
        CoverTally {
            trials: 0,
            discarded: 0,
            small_infimum: 0,
            e1: 0,
            e2: vec![0; self.band_count() + 1],
            e3: 0,
            violations: 0,
        }
    }

    fn run_trial(&self, seed: RandomSeed, tally: &mut CoverTally) {
        let mut rng = seed.rng();
        let w = sample_matrix_with(&self.spec, self.rows, self.cols, &mut rng)
            .and_then(|a| projected_block(&a, &self.subset));
        let w = match w {
            Ok(w) => w,
            Err(_) => {
                tally.discarded += 1;
                return;
            }
        };
        let hs = hs_norm(&w).unwrap_or(f64::INFINITY);
        let inf = self.spread_infimum(&w, &mut rng);
        let flags = self.flags(inf, hs);
        tally.trials += 1;
        tally.small_infimum += flags.small_infimum as u64;
        tally.e1 += flags.e1 as u64;
        for (c, f) in tally.e2.iter_mut().zip(&flags.e2) {
            *c += *f as u64;
        }
        tally.e3 += flags.e3 as u64;
        tally.violations += !flags.covered() as u64;
    }
}
