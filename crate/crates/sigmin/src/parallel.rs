//! Fans trial ranges out over a rayon pool.
//!
//! Tallies are commutative monoids and trial `t` always uses stream `t`, so the
//! merged result does not depend on the thread count or on scheduling.

use std::ops::Range;

use rayon::prelude::*;
use sigmin_core::montecarlo::{run_range, Experiment, Merge};

const CHUNK: u64 = 64;

/// Runs `trials` trials of `experiment` on `threads` workers (0 = all cores).
pub fn run_parallel<E: Experiment>(experiment: &E, master: u64, trials: u64, threads: usize) -> E::Tally {
    run_parallel_range(experiment, master, 0..trials, threads)
}

/// Runs the trials with indices in `range`.
pub fn run_parallel_range<E: Experiment>(experiment: &E, master: u64, range: Range<u64>, threads: usize) -> E::Tally {
    let work = || {
        let chunks = (range.end.saturating_sub(range.start)).div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let lo = range.start + c * CHUNK;
                run_range(experiment, master, lo..(lo + CHUNK).min(range.end))
            })
            .reduce(
                || experiment.empty_tally(),
                |mut a, b| {
                    a.merge(b);
                    a
                },
            )
    };
    install(threads, work)
}

/// Runs `f` inside a pool of `threads` workers (0 = the global pool).
pub fn install<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    if threads == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(e) => {
            log::warn!("could not build a {threads}-thread pool ({e}); using the global pool");
            f()
        }
    }
}

/// Default worker count: the available hardware parallelism.
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}
