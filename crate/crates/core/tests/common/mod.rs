#![allow(dead_code)]

use mgfrft::graph::Graph;
use mgfrft::transform::ProductSignal;
use mgfrft::C64;
use ndarray::{Array2, ArrayD, IxDyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Kronecker product written out index by index.
pub fn kron_naive(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (p, q) = b.dim();
    Array2::from_shape_fn((a.nrows() * p, a.ncols() * q), |(i, j)| a[[i / p, j / q]] * b[[i % p, j % q]])
}

pub fn kron_chain(mats: &[Array2<C64>]) -> Array2<C64> {
    mats[1..].iter().fold(mats[0].clone(), |acc, m| kron_naive(&acc, m))
}

pub fn conj_t(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

pub fn matvec(a: &Array2<C64>, x: &[C64]) -> Vec<C64> {
    a.rows().into_iter().map(|row| row.iter().zip(x).map(|(m, v)| m * v).sum()).collect()
}

pub fn max_diff<'a>(a: impl IntoIterator<Item = &'a C64>, b: impl IntoIterator<Item = &'a C64>) -> f64 {
    a.into_iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn random_signal(rng: &mut ChaCha8Rng, dims: &[usize]) -> ProductSignal {
    let total: usize = dims.iter().product();
    let values = (0..total).map(|_| rng.random_range(-1.0..1.0)).collect();
    ProductSignal::from_flat(dims, values).unwrap()
}

pub fn random_complex_signal(rng: &mut ChaCha8Rng, dims: &[usize]) -> ProductSignal {
    let data = ArrayD::from_shape_simple_fn(IxDyn(dims), || C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    ProductSignal::from_complex(data).unwrap()
}

/// Random spanning tree plus extra edges; weights in [0.5, 2).
pub fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Graph {
    let mut w = Array2::<f64>::zeros((n, n));
    for i in 1..n {
        let j = rng.random_range(0..i);
        let x = rng.random_range(0.5..2.0);
        w[[i, j]] = x;
        w[[j, i]] = x;
    }
    for _ in 0..extra {
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        if i != j && w[[i, j]] == 0.0 {
            let x = rng.random_range(0.5..2.0);
            w[[i, j]] = x;
            w[[j, i]] = x;
        }
    }
    let g = Graph::new(w, false).unwrap();
    assert!(g.is_connected());
    g
}

/// Separable smooth signal: Σ_axis low-frequency cosines plus a rank-1 product term.
pub fn smooth_signal(dims: &[usize]) -> ProductSignal {
    let data = ArrayD::from_shape_fn(IxDyn(dims), |ix| {
        let mut sum = 0.0;
        let mut prod = 1.0;
        for (axis, &n) in dims.iter().enumerate() {
            let x = (ix[axis] as f64 + 0.5) / n as f64;
            sum += (std::f64::consts::PI * x).cos() + 0.3 * (2.0 * std::f64::consts::PI * x).cos();
            prod *= (std::f64::consts::PI * x).cos();
        }
        10.0 + sum + 2.0 * prod
    });
    ProductSignal::from_real(data).unwrap()
}
