//! Fractional graph Fourier transforms on Cartesian product graphs.
//!
//! Multi-dimensional transforms never assemble the `ΠNᵢ × ΠNᵢ` Kronecker
//! matrix. They apply one `Nᵢ × Nᵢ` factor matrix along each axis (a mode
//! product), which costs `O(Σᵢ Nᵢ · ΠⱼNⱼ)`. Dense assembly lives in [`dense`]
//! and is capped in size; it exists for baselines and diagnostics.

mod adjacency;
pub mod dense;
mod io;
mod laplacian;
mod mode;

pub use adjacency::{a_mgfrft, a_mgfrft_with, ia_mgfrft, ia_mgfrft_with, AdjacencyFactor};
pub use io::{
    format_f64,
    read_coefficients_csv, read_signal_csv, write_coefficients_csv, write_signal_csv,
    write_spectrum_table_csv,
};
pub use laplacian::{
    check_factor_eigenrelation, check_factor_eigenrelation_capped, duplicated_eigsum_count,
    il_mgfrft, il_mgfrft_with, inverse_sgfrft_1d, l_mgfrft, l_mgfrft_with, sgfrft_1d,
    spectrum_table, SpectrumRow,
};
pub use mode::mode_product;

use ndarray::{ArrayD, Dimension, IxDyn};
use serde::{Deserialize, Serialize};

use crate::graph::MultiIndex;
use crate::{Error, Result, C64};

/// Which factor eigenstructure a spectrum was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Laplacian,
    Adjacency,
}

impl std::str::FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "laplacian" => Ok(TransformKind::Laplacian),
            "adjacency" => Ok(TransformKind::Adjacency),
            other => Err(Error::param(format!("unknown transform kind `{other}`"))),
        }
    }
}

/// Signal `f(n1, …, nm)` on a product graph, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSignal {
    data: ArrayD<C64>,
}

impl ProductSignal {
    pub fn from_complex(data: ArrayD<C64>) -> Result<Self> {
        if data.ndim() == 0 || data.is_empty() {
            return Err(Error::shape("a product signal needs at least one non-empty axis"));
        }
        Ok(ProductSignal { data: data.as_standard_layout().into_owned() })
    }

    pub fn from_real(data: ArrayD<f64>) -> Result<Self> {
        Self::from_complex(data.mapv(|x| C64::new(x, 0.0)))
    }

    /// Row-major flat values reshaped to `dims`.
    pub fn from_flat(dims: &[usize], values: Vec<f64>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if values.len() != total {
            return Err(Error::shape(format!(
                "{} values cannot fill dims {dims:?} ({total} entries)",
                values.len()
            )));
        }
        let data = ArrayD::from_shape_vec(IxDyn(dims), values).map_err(|e| Error::shape(e.to_string()))?;
        Self::from_real(data)
    }

    pub fn dims(&self) -> &[usize] {
        self.data.shape()
    }

    pub fn data(&self) -> &ArrayD<C64> {
        &self.data
    }

    pub fn into_data(self) -> ArrayD<C64> {
        self.data
    }

    pub fn real_part(&self) -> ArrayD<f64> {
        self.data.mapv(|z| z.re)
    }

    /// Largest `|Im f|`; zero for signals that are genuinely real.
    pub fn max_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Spectrum `f̂_α(ℓ1, …, ℓm)` keyed by the full multi-index.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoefficients {
    data: ArrayD<C64>,
    alpha: f64,
    kind: TransformKind,
}

impl SpectralCoefficients {
    pub fn new(data: ArrayD<C64>, alpha: f64, kind: TransformKind) -> Result<Self> {
        if data.ndim() == 0 || data.is_empty() {
            return Err(Error::shape("coefficients need at least one non-empty axis"));
        }
        Ok(SpectralCoefficients { data: data.as_standard_layout().into_owned(), alpha, kind })
    }

    pub fn dims(&self) -> &[usize] {
        self.data.shape()
    }

    pub fn data(&self) -> &ArrayD<C64> {
        &self.data
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, index: &MultiIndex) -> Option<C64> {
        self.data.get(IxDyn(index.as_slice())).copied()
    }

    /// Row-major `(multi-index, coefficient)` pairs.
    pub fn iter_indexed(&self) -> impl Iterator<Item = (MultiIndex, C64)> + '_ {
        self.data.indexed_iter().map(|(ix, &z)| (MultiIndex(ix.slice().to_vec()), z))
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Same metadata, new values. Values must keep the shape.
    pub fn with_data(&self, data: ArrayD<C64>) -> Result<Self> {
        if data.shape() != self.data.shape() {
            return Err(Error::shape("replacement coefficients change the shape"));
        }
        Self::new(data, self.alpha, self.kind)
    }
}

fn check_dims(dims: &[usize], sizes: impl ExactSizeIterator<Item = usize>) -> Result<()> {
    if dims.len() != sizes.len() {
        return Err(Error::shape(format!(
            "signal has {} axes but {} factor bases were given",
            dims.len(),
            sizes.len()
        )));
    }
    for (axis, (&d, s)) in dims.iter().zip(sizes).enumerate() {
        if d != s {
            return Err(Error::shape(format!("axis {axis} has length {d}, its factor has {s} nodes")));
        }
    }
    Ok(())
}
