//! Factorized vs dense timing harness for the Laplacian transform on `P_{N1} □ P_{N2}`.
//!
//! The factorized path applies one small matrix per axis (`O(N1²N2 + N1N2²)`);
//! the dense path multiplies by the assembled `N1N2 × N1N2` matrix
//! (`O(N1²N2²)`). Before anything is timed, both paths are run on the same
//! signal and must agree within [`GATE_TOLERANCE`].

use std::hint::black_box;
use std::io::Write;
use std::time::{Duration, Instant};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::graph::{build_path, laplacian, product_laplacian, ProductGraph};
use crate::linalg::{eig_sym, fractional_basis};
use crate::transform::dense::{apply, laplacian_forward_matrix, DENSE_CAP};
use crate::transform::{l_mgfrft_with, ProductSignal};
use crate::{Error, Execution, Result};

pub const GATE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub n1: usize,
    pub n2: usize,
    pub alpha: f64,
    /// Timed repetitions per measurement (at least 3); the median is reported.
    pub reps: usize,
    /// Each repetition loops until at least this much time has passed.
    pub min_rep_time: Duration,
    /// Lift the `N1·N2 ≤ 4096` cap on the dense baseline.
    pub allow_large: bool,
    /// Execution mode of the factorized path. Sequential by default for stable timings.
    pub exec: Execution,
}

impl BenchConfig {
    pub fn new(n1: usize, n2: usize) -> Self {
        BenchConfig {
            n1,
            n2,
            alpha: 0.9,
            reps: 3,
            min_rep_time: Duration::from_millis(2),
            allow_large: false,
            exec: Execution::Sequential,
        }
    }
}

/// Timings in seconds (per single operation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub n1: usize,
    pub n2: usize,
    pub alpha: f64,
    pub reps: usize,
    pub t_factorized: f64,
    pub t_dense: f64,
    pub t_eig_factor: f64,
    pub t_eig_full: f64,
    /// `t_dense / t_factorized`.
    pub apply_speedup: f64,
    /// `t_eig_full / t_eig_factor`.
    pub eig_speedup: f64,
    /// Largest deviation between the two paths observed by the gate.
    pub gate_max_error: f64,
}

/// Median per-call time of `f`, over `reps` repetitions of at least `min` each.
pub fn median_time(reps: usize, min: Duration, mut f: impl FnMut()) -> f64 {
    let mut samples: Vec<f64> = (0..reps.max(1))
        .map(|_| {
            let start = Instant::now();
            let mut calls = 0u32;
            loop {
                f();
                calls += 1;
                let elapsed = start.elapsed();
                if elapsed >= min {
                    break elapsed.as_secs_f64() / calls as f64;
                }
            }
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    samples[samples.len() / 2]
}

fn fixture_signal(n1: usize, n2: usize) -> Result<ProductSignal> {
    // Deterministic, non-smooth values (golden-ratio sequence).
    let values = (0..n1 * n2).map(|k| ((k as f64 * 0.618_033_988_749_895).fract() - 0.5) * 2.0).collect();
    ProductSignal::from_flat(&[n1, n2], values)
}

/// Runs the gate, then times the four measurements.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchResult> {
    let (n1, n2) = (cfg.n1, cfg.n2);
    if n1 < 2 || n2 < 2 {
        return Err(Error::param("bench factors need at least 2 nodes each"));
    }
    if cfg.reps < 3 {
        return Err(Error::param(format!("reps = {} but at least 3 are required", cfg.reps)));
    }
    let size = n1 * n2;
    let cap = if cfg.allow_large { usize::MAX } else { DENSE_CAP };
    if size > cap {
        return Err(Error::Size { size, cap });
    }
    let pg = ProductGraph::new(vec![build_path(n1)?, build_path(n2)?])?;
    let l1 = laplacian(&pg.factors()[0])?;
    let l2 = laplacian(&pg.factors()[1])?;
    let e1 = eig_sym(&l1)?;
    let e2 = eig_sym(&l2)?;
    let bases = vec![fractional_basis(&e1, cfg.alpha)?, fractional_basis(&e2, cfg.alpha)?];
    let dense = laplacian_forward_matrix(&bases, cap)?;
    let f = fixture_signal(n1, n2)?;

    // Correctness gate.
    let fact = l_mgfrft_with(&f, &bases, cfg.exec)?;
    let dens = apply(&dense, &f)?;
    let gate_max_error = fact.data().iter().zip(dens.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    if !(gate_max_error < GATE_TOLERANCE) {
        return Err(Error::GateFailed { max_error: gate_max_error, tolerance: GATE_TOLERANCE });
    }

    let t_factorized = median_time(cfg.reps, cfg.min_rep_time, || {
        black_box(l_mgfrft_with(black_box(&f), &bases, cfg.exec).expect("gated"));
    });
    let t_dense = median_time(cfg.reps, cfg.min_rep_time, || {
        black_box(apply(black_box(&dense), &f).expect("gated"));
    });
    drop(dense);
    let t_eig_factor = median_time(cfg.reps, cfg.min_rep_time, || {
        black_box(eig_sym(black_box(&l1)).expect("factor eig"));
        black_box(eig_sym(black_box(&l2)).expect("factor eig"));
    });
    let full: Array2<f64> = product_laplacian(&pg)?;
    let t_eig_full = median_time(cfg.reps, cfg.min_rep_time, || {
        black_box(eig_sym(black_box(&full)).expect("full eig"));
    });
    Ok(BenchResult {
        n1,
        n2,
        alpha: cfg.alpha,
        reps: cfg.reps,
        t_factorized,
        t_dense,
        t_eig_factor,
        t_eig_full,
        apply_speedup: t_dense / t_factorized,
        eig_speedup: t_eig_full / t_eig_factor,
        gate_max_error,
    })
}

/// One result per square size `N × N`.
pub fn bench_sweep(sizes: &[usize], template: &BenchConfig) -> Result<Vec<BenchResult>> {
    sizes.iter().map(|&n| run_bench(&BenchConfig { n1: n, n2: n, ..*template })).collect()
}

/// CSV of timings for scaling plots.
pub fn write_bench_csv<W: Write>(writer: W, results: &[BenchResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in results {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<bench output>", e))?;
    Ok(())
}
