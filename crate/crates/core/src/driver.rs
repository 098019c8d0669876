//! Parallel Monte Carlo driver.
//!
//! Run `i` of an ensemble always draws from `stream(seed, i)` and results come
//! back in index order, so every aggregate is independent of the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub runs: usize,
    pub seed: u64,
    /// Worker threads; 0 means rayon's default.
    pub workers: usize,
}

impl Job {
    pub fn new(runs: usize, seed: u64, workers: usize) -> Self {
        Job { runs, seed, workers }
    }
}

/// Runs `f(index, rng)` for every index of the job and returns the results in
/// index order.
pub fn run_indexed<T, F>(job: &Job, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut StreamRng) -> Result<T> + Sync,
{
    if job.runs == 0 {
        return Err(Error::arg("runs", "must be at least 1"));
    }
    let body = || {
        (0..job.runs as u64)
            .into_par_iter()
            .map(|i| f(i, &mut stream(job.seed, i)))
            .collect::<Result<Vec<T>>>()
    };
    if job.workers == 1 {
        return (0..job.runs as u64)
            .map(|i| f(i, &mut stream(job.seed, i)))
            .collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(job.workers)
        .build()
        .map_err(|e| Error::arg("workers", e.to_string()))?;
    pool.install(body)
}

/// Running mean and variance, fed in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn from_slice(xs: &[f64]) -> Self {
        let mut m = Moments::default();
        for &x in xs {
            m.push(x);
        }
        m
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Unbiased sample variance (0 with fewer than two values).
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    /// Standard error of the mean.
    pub fn se(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Mean and standard error from a slice, with two-pass variance.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}
