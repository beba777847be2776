//! Gaussian Unitary Ensemble sampling and normalized trace moments of
//! `e^{-iGt}`.
//!
//! Normalization: `E|G_ij|² = 1/N` off the diagonal and `E G_ii² = 1/N`, so
//! the spectrum fills the semicircle on `[-2, 2]` and
//! `(1/N) E tr e^{-iGt} → J₁(2t)/t`.

mod bessel;

pub use bessel::{bessel_extremum_times, bessel_j1, bessel_ratio, bessel_zero_times};

use faer::Mat;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, HermitianOperator, SpectralDecomposition, C64};

/// Default envelope constant for [`gue_moment_envelope`].
pub const DEFAULT_K0: f64 = 1.0;

/// A GUE matrix together with its spectral decomposition.
#[derive(Debug, Clone)]
pub struct GueSample {
    operator: HermitianOperator,
    decomposition: SpectralDecomposition,
}

impl GueSample {
    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.operator
    }

    /// Eigenvalues, ascending.
    pub fn spectrum(&self) -> &[f64] {
        self.decomposition.eigenvalues()
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomposition
    }
}

/// Draws the matrix entries only. Upper-triangle entries are consumed column
/// by column so the stream layout is fixed.
pub fn sample_gue_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<HermitianOperator> {
    if n == 0 {
        return Err(Error::InvalidDimensions("GUE dimension must be positive".into()));
    }
    let diag_sd = (1.0 / n as f64).sqrt();
    let off_sd = (0.5 / n as f64).sqrt();
    let mut m = Mat::<C64>::zeros(n, n);
    for j in 0..n {
        for i in 0..j {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let v = C64::new(re * off_sd, im * off_sd);
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
        let d: f64 = rng.sample(StandardNormal);
        m[(j, j)] = C64::new(d * diag_sd, 0.0);
    }
    Ok(HermitianOperator::new_unchecked(m))
}

pub fn sample_gue<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<GueSample> {
    let operator = sample_gue_matrix(n, rng)?;
    let decomposition = eig_hermitian(&operator)?;
    Ok(GueSample {
        operator,
        decomposition,
    })
}

/// Eigenvalues of a fresh GUE matrix, skipping the eigenvectors.
pub fn sample_gue_spectrum<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    let operator = sample_gue_matrix(n, rng)?;
    operator.eigenvalues()
}

/// `alpha_p = (1/N) tr e^{-iGtp}` for `p = 1..=p_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceMomentVector {
    pub t: f64,
    pub alpha: Vec<C64>,
    pub one_norm: f64,
}

impl TraceMomentVector {
    pub fn p_max(&self) -> usize {
        self.alpha.len()
    }
}

pub fn normalized_trace_moments(g: &GueSample, t: f64, p_max: usize) -> Result<TraceMomentVector> {
    trace_moments_from_spectrum(g.spectrum(), t, p_max)
}

pub fn trace_moments_from_spectrum(
    spectrum: &[f64],
    t: f64,
    p_max: usize,
) -> Result<TraceMomentVector> {
    if p_max < 1 {
        return Err(Error::InvalidArgument("p_max must be at least 1".into()));
    }
    if spectrum.is_empty() {
        return Err(Error::Empty("spectrum".into()));
    }
    let inv_n = 1.0 / spectrum.len() as f64;
    let alpha: Vec<C64> = (1..=p_max)
        .map(|p| {
            let s: C64 = spectrum
                .iter()
                .map(|&l| C64::from_polar(1.0, -(p as f64) * l * t))
                .sum();
            s * inv_n
        })
        .collect();
    let one_norm = alpha.iter().map(|a| a.norm()).sum();
    Ok(TraceMomentVector { t, alpha, one_norm })
}

/// `(1/N) tr G^m` from a spectrum.
pub fn spectral_moment(spectrum: &[f64], m: u32) -> f64 {
    spectrum.iter().map(|l| l.powi(m as i32)).sum::<f64>() / spectrum.len() as f64
}

/// `|J₁(2t)/t| + K₀ t / N`.
pub fn gue_moment_envelope(t: f64, n: usize, k0: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("envelope needs t > 0, got {t}")));
    }
    if n == 0 {
        return Err(Error::InvalidDimensions("envelope dimension must be positive".into()));
    }
    Ok(bessel_ratio(t).abs() + k0 * t / n as f64)
}

/// Smallest `K₀ ≥ 0` for which `observed ≤ |J₁(2t)/t| + K₀ t/N + n_sigma·stderr`.
pub fn minimal_k0(t: f64, n: usize, observed: f64, stderr: f64, n_sigma: f64) -> f64 {
    let excess = observed - bessel_ratio(t).abs() - n_sigma * stderr;
    (excess * n as f64 / t).max(0.0)
}
