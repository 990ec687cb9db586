//! Top-γ spectral compression scored by relative L1 error and PSNR.
//!
//! Coefficients are ranked once by magnitude (descending, ties by ascending
//! multi-index), so the retained set for a smaller γ is always a prefix of the
//! one for a larger γ.

use ndarray::{ArrayD, Zip};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::{fractional_basis, FractionalBasis, SymmetricEigenBasis};
use crate::transform::{il_mgfrft, l_mgfrft, ProductSignal, SpectralCoefficients};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressionConfig {
    gamma: f64,
    alpha: f64,
}

impl CompressionConfig {
    pub fn new(gamma: f64, alpha: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::param(format!("alpha = {alpha} must lie in (0, 1]")));
        }
        Ok(CompressionConfig { gamma, alpha })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("gamma = {gamma} must lie in (0, 1)")))
    }
}

/// Which signal supplies the PSNR peak.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeakReference {
    /// `max |f_com|²`, the peak of the reconstruction.
    #[default]
    Compressed,
    /// `max |f|²`, the conventional choice.
    Original,
}

/// `ceil(γ·n)`, at least 1. Products within 1e-9 of an integer are snapped
/// first so that e.g. 0.3·50 keeps 15, not 16.
pub fn retained_count(n: usize, gamma: f64) -> Result<usize> {
    check_gamma(gamma)?;
    let x = gamma * n as f64;
    let snapped = if (x - x.round()).abs() <= 1e-9 * x.max(1.0) { x.round() } else { x.ceil() };
    Ok((snapped as usize).clamp(1, n.max(1)))
}

/// Flat (row-major) indices sorted by |coefficient| descending, then index ascending.
pub fn magnitude_ranking(coef: &SpectralCoefficients) -> Vec<usize> {
    let mags: Vec<f64> = coef.data().iter().map(|z| z.norm()).collect();
    let mut order: Vec<usize> = (0..mags.len()).collect();
    order.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]).then(a.cmp(&b)));
    order
}

fn keep_ranked(coef: &SpectralCoefficients, ranking: &[usize], keep: usize) -> Result<SpectralCoefficients> {
    let src: Vec<C64> = coef.data().iter().copied().collect();
    let mut dst = vec![C64::new(0.0, 0.0); src.len()];
    for &k in &ranking[..keep] {
        dst[k] = src[k];
    }
    let data = ArrayD::from_shape_vec(coef.data().raw_dim(), dst).map_err(|e| Error::shape(e.to_string()))?;
    coef.with_data(data)
}

/// Keeps the `ceil(γ·N)` largest-magnitude coefficients and zeroes the rest.
pub fn threshold_coefficients(coef: &SpectralCoefficients, gamma: f64) -> Result<SpectralCoefficients> {
    let keep = retained_count(coef.len(), gamma)?;
    keep_ranked(coef, &magnitude_ranking(coef), keep)
}

fn check_same_shape(f: &ArrayD<f64>, g: &ArrayD<f64>) -> Result<()> {
    if f.shape() == g.shape() {
        Ok(())
    } else {
        Err(Error::shape(format!("signal shapes differ: {:?} vs {:?}", f.shape(), g.shape())))
    }
}

/// `Σ|f − f_com| / Σ|f|`.
pub fn relative_error(f: &ArrayD<f64>, f_com: &ArrayD<f64>) -> Result<f64> {
    check_same_shape(f, f_com)?;
    let den: f64 = f.iter().map(|x| x.abs()).sum();
    if den == 0.0 {
        return Err(Error::UndefinedMetric("relative error of an all-zero signal".into()));
    }
    let num = Zip::from(f).and(f_com).fold(0.0, |acc, a, b| acc + (a - b).abs());
    Ok(num / den)
}

/// `10·log10(peak / MSE)` in dB; `+inf` when the signals are identical.
pub fn psnr(f: &ArrayD<f64>, f_com: &ArrayD<f64>, peak: PeakReference) -> Result<f64> {
    check_same_shape(f, f_com)?;
    if f.is_empty() {
        return Err(Error::UndefinedMetric("PSNR of an empty signal".into()));
    }
    let mse = Zip::from(f).and(f_com).fold(0.0, |acc, a, b| acc + (a - b) * (a - b)) / f.len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    let reference = match peak {
        PeakReference::Compressed => f_com,
        PeakReference::Original => f,
    };
    let peak = reference.iter().fold(0.0_f64, |m, x| m.max(x * x));
    if peak == 0.0 {
        return Err(Error::UndefinedMetric("PSNR peak is zero".into()));
    }
    Ok(10.0 * (peak / mse).log10())
}

fn ser_db<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if *v == f64::INFINITY {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn de_db<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Db {
        Num(f64),
        Text(String),
    }
    match Db::deserialize(d)? {
        Db::Num(v) => Ok(v),
        Db::Text(t) if t == "inf" => Ok(f64::INFINITY),
        Db::Text(t) => Err(serde::de::Error::custom(format!("invalid dB value `{t}`"))),
    }
}

/// One compression run. `psnr` is serialized as the string `"inf"` when lossless.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionReport {
    pub gamma: f64,
    pub alpha: f64,
    pub retained: usize,
    /// Relative L1 error as a fraction.
    pub re: f64,
    #[serde(serialize_with = "ser_db", deserialize_with = "de_db")]
    pub psnr: f64,
    /// Largest imaginary magnitude discarded from the reconstruction.
    pub imag_residue: f64,
}

fn finish(
    f: &ArrayD<f64>,
    kept: &SpectralCoefficients,
    bases: &[FractionalBasis],
    gamma: f64,
    retained: usize,
    peak: PeakReference,
) -> Result<(ProductSignal, CompressionReport)> {
    let rec = il_mgfrft(kept, bases)?;
    let imag_residue = rec.max_imag();
    let real = rec.real_part();
    let report = CompressionReport {
        gamma,
        alpha: kept.alpha(),
        retained,
        re: relative_error(f, &real)?,
        psnr: psnr(f, &real, peak)?,
        imag_residue,
    };
    Ok((ProductSignal::from_real(real)?, report))
}

/// Forward transform, top-γ thresholding, inverse transform, real part, metrics.
pub fn compress_pipeline(
    signal: &ProductSignal,
    bases: &[FractionalBasis],
    cfg: &CompressionConfig,
    peak: PeakReference,
) -> Result<(ProductSignal, CompressionReport)> {
    if let Some(b) = bases.iter().find(|b| b.alpha() != cfg.alpha) {
        return Err(Error::param(format!("basis built for alpha {} but config asks for {}", b.alpha(), cfg.alpha)));
    }
    let coef = l_mgfrft(signal, bases)?;
    let retained = retained_count(coef.len(), cfg.gamma)?;
    let kept = keep_ranked(&coef, &magnitude_ranking(&coef), retained)?;
    finish(&signal.real_part(), &kept, bases, cfg.gamma, retained, peak)
}

/// Runs every (α, γ) pair; the forward transform and ranking are computed
/// once per α. Reports are ordered by α, then γ, as given.
pub fn compression_sweep(
    signal: &ProductSignal,
    factors: &[SymmetricEigenBasis],
    gammas: &[f64],
    alphas: &[f64],
    peak: PeakReference,
) -> Result<Vec<CompressionReport>> {
    let f = signal.real_part();
    let mut out = Vec::with_capacity(gammas.len() * alphas.len());
    for &alpha in alphas {
        CompressionConfig::new(gammas.first().copied().unwrap_or(0.5), alpha)?;
        let bases = factors.iter().map(|b| fractional_basis(b, alpha)).collect::<Result<Vec<_>>>()?;
        let coef = l_mgfrft(signal, &bases)?;
        let ranking = magnitude_ranking(&coef);
        for &gamma in gammas {
            let retained = retained_count(coef.len(), gamma)?;
            let kept = keep_ranked(&coef, &ranking, retained)?;
            out.push(finish(&f, &kept, &bases, gamma, retained, peak)?.1);
        }
    }
    Ok(out)
}
