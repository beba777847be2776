//! Samplers for global pure states: Haar-random states, GUE time evolutions
//! and structured evolutions `V = U D U^†` with a prescribed spectrum `D`.

use faer::Mat;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{
    adjoint_mat_vec, check_dim, conjugate_diagonal, mat_vec, DimensionSpec, PureState,
    UnitaryOperator, C64,
};
use crate::rmt::sample_gue_spectrum;

const UNIT_MODULUS_TOL: f64 = 1e-12;

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn sample_haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<UnitaryOperator> {
    if n == 0 {
        return Err(Error::InvalidDimensions("unitary dimension must be positive".into()));
    }
    let mut z = Mat::<C64>::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            z[(i, j)] = complex_gaussian(rng);
        }
    }
    let qr = z.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    let phases: Vec<C64> = (0..n)
        .map(|i| {
            let d = r[(i, i)];
            let norm = d.norm();
            if norm > 0.0 {
                d / norm
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect();
    Ok(UnitaryOperator::new_unchecked(Mat::from_fn(n, n, |i, j| {
        q[(i, j)] * phases[j]
    })))
}

/// Normalized complex Gaussian vector.
pub fn sample_haar_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PureState> {
    if n == 0 {
        return Err(Error::InvalidDimensions("state dimension must be positive".into()));
    }
    let v = (0..n).map(|_| complex_gaussian(rng)).collect();
    PureState::from_unnormalized(v)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumKind {
    /// `D_j = e^{-iλ_j t}` with `λ` the eigenvalues of a fresh GUE matrix.
    GueExp { t: f64 },
    /// Uniform phases, each emitted together with its antipode.
    ZeroTracePaired,
    Fixed(Vec<C64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSpec {
    pub kind: SpectrumKind,
    pub dim: usize,
}

impl SpectrumSpec {
    pub fn new(kind: SpectrumKind, dim: usize) -> Result<Self> {
        let spec = Self { kind, dim };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidDimensions("spectrum dimension must be positive".into()));
        }
        match &self.kind {
            SpectrumKind::GueExp { t } if !t.is_finite() => Err(Error::InvalidSpectrum(format!(
                "non-finite evolution time {t}"
            ))),
            SpectrumKind::ZeroTracePaired if !self.dim.is_multiple_of(2) => Err(Error::InvalidSpectrum(
                format!("zero-trace pairing needs an even dimension, got {}", self.dim),
            )),
            SpectrumKind::Fixed(d) => {
                check_dim(self.dim, d.len())?;
                if let Some((j, x)) = d
                    .iter()
                    .enumerate()
                    .find(|(_, x)| (x.norm() - 1.0).abs() > UNIT_MODULUS_TOL)
                {
                    return Err(Error::InvalidSpectrum(format!(
                        "entry {j} has modulus {}",
                        x.norm()
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

pub fn sample_spectrum<R: Rng + ?Sized>(spec: &SpectrumSpec, rng: &mut R) -> Result<Vec<C64>> {
    spec.validate()?;
    match &spec.kind {
        SpectrumKind::GueExp { t } => Ok(sample_gue_spectrum(spec.dim, rng)?
            .into_iter()
            .map(|l| C64::from_polar(1.0, -l * t))
            .collect()),
        SpectrumKind::ZeroTracePaired => {
            let mut out = Vec::with_capacity(spec.dim);
            for _ in 0..spec.dim / 2 {
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                let d = C64::from_polar(1.0, theta);
                out.push(d);
                out.push(-d);
            }
            Ok(out)
        }
        SpectrumKind::Fixed(d) => Ok(d.clone()),
    }
}

/// `u · diag(spectrum) · u^†`.
pub fn build_structured_unitary(u: &UnitaryOperator, spectrum: &[C64]) -> Result<UnitaryOperator> {
    check_dim(u.dim(), spectrum.len())?;
    if let Some(x) = spectrum
        .iter()
        .find(|x| (x.norm() - 1.0).abs() > UNIT_MODULUS_TOL)
    {
        return Err(Error::InvalidSpectrum(format!(
            "eigenvalue modulus {} is not one",
            x.norm()
        )));
    }
    Ok(conjugate_diagonal(u, spectrum))
}

/// `u · diag(spectrum) · u^† · psi` without forming the product.
pub fn apply_structured(u: &UnitaryOperator, spectrum: &[C64], psi: &PureState) -> Result<PureState> {
    check_dim(u.dim(), spectrum.len())?;
    check_dim(u.dim(), psi.dim())?;
    let mut c = adjoint_mat_vec(u.matrix(), psi.amplitudes());
    for (x, d) in c.iter_mut().zip(spectrum) {
        *x *= d;
    }
    PureState::from_unnormalized(mat_vec(u.matrix(), &c))
}

/// Discrete Fourier transform on `n` points.
pub fn dft_unitary(n: usize) -> UnitaryOperator {
    let scale = 1.0 / (n as f64).sqrt();
    let w = std::f64::consts::TAU / n as f64;
    UnitaryOperator::new_unchecked(Mat::from_fn(n, n, |i, j| {
        C64::from_polar(scale, w * ((i * j) % n) as f64)
    }))
}

#[derive(Debug, Clone)]
pub enum BasisSpec {
    Haar,
    /// Negative control: a basis that is not averaged over.
    Fixed(UnitaryOperator),
}

#[derive(Debug, Clone)]
pub enum InitialState {
    ComputationalZero,
    Fixed(PureState),
}

impl InitialState {
    pub fn state(&self, dim: usize) -> Result<PureState> {
        match self {
            InitialState::ComputationalZero => PureState::basis(dim, 0),
            InitialState::Fixed(psi) => {
                check_dim(dim, psi.dim())?;
                Ok(psi.clone())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum GlobalKind {
    HaarState,
    GueEvolution { t: f64 },
    Structured { spectrum: SpectrumKind, basis: BasisSpec },
}

#[derive(Debug, Clone)]
pub struct GlobalEnsembleSpec {
    pub kind: GlobalKind,
    pub dims: DimensionSpec,
    pub initial_state: InitialState,
}

impl GlobalEnsembleSpec {
    pub fn new(kind: GlobalKind, dims: DimensionSpec, initial_state: InitialState) -> Result<Self> {
        let spec = Self {
            kind,
            dims,
            initial_state,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dims.dim();
        self.initial_state.state(n)?;
        match &self.kind {
            GlobalKind::HaarState => Ok(()),
            GlobalKind::GueEvolution { t } if !t.is_finite() => {
                Err(Error::InvalidArgument(format!("non-finite time {t}")))
            }
            GlobalKind::GueEvolution { .. } => Ok(()),
            GlobalKind::Structured { spectrum, basis } => {
                SpectrumSpec {
                    kind: spectrum.clone(),
                    dim: n,
                }
                .validate()?;
                if let BasisSpec::Fixed(u) = basis {
                    check_dim(n, u.dim())?;
                }
                Ok(())
            }
        }
    }

    /// One global state `|Φ⟩` drawn from this ensemble.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PureState> {
        let n = self.dims.dim();
        match &self.kind {
            GlobalKind::HaarState => sample_haar_state(n, rng),
            GlobalKind::GueEvolution { t } => {
                let g = crate::rmt::sample_gue(n, rng)?;
                g.decomposition().evolve(*t, &self.initial_state.state(n)?)
            }
            GlobalKind::Structured { spectrum, basis } => {
                let d = sample_spectrum(
                    &SpectrumSpec {
                        kind: spectrum.clone(),
                        dim: n,
                    },
                    rng,
                )?;
                let phi = self.initial_state.state(n)?;
                match basis {
                    BasisSpec::Haar => apply_structured(&sample_haar_unitary(n, rng)?, &d, &phi),
                    BasisSpec::Fixed(u) => apply_structured(u, &d, &phi),
                }
            }
        }
    }
}
