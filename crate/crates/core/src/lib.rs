//! Multi-dimensional graph fractional Fourier transforms on Cartesian product graphs.
//!
//! The crate is organized bottom-up:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`graph`] | weighted graphs, Laplacians, Kronecker sums, product graphs, graph JSON |
//! | [`linalg`] | eigendecompositions, Kronecker products, principal fractional powers |
//! | [`transform`] | 1-D fractional GFT, Laplacian and adjacency multi-dimensional transforms |
//! | [`geo`] | spherical distances and the Gaussian-weighted kNN station graph |
//! | [`noaa`] | GSOD daily-summary ingestion into a station × day signal |
//! | [`compress`] | top-γ spectral compression with RE / PSNR scoring |
//! | [`bench`] | factorized vs dense timing harness |
//!
//! Signals on a product graph `G1 □ … □ Gm` are m-dimensional arrays. A vertex
//! `(n1, …, nm)` has the row-major flat index `n1·(N2⋯Nm) + … + nm`; every
//! transform works on that layout.
//!
//! Data-parallel inner loops (mode products, pairwise distances, per-file
//! parsing) run on rayon when the `parallel` feature is enabled, and fall back
//! to sequential loops otherwise. See [`Execution`].

pub mod bench;
pub mod compress;
mod error;
mod exec;
pub mod geo;
pub mod graph;
pub mod linalg;
pub mod noaa;
pub mod transform;

pub use error::{Error, Result};
pub use exec::Execution;

/// Complex scalar used for every spectral quantity.
pub type C64 = num_complex::Complex64;
