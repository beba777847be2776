//! Dense complex linear algebra: states, Hermitian and unitary operators,
//! spectral decompositions, partial traces and trace distances.
//!
//! Joint basis states of `A ⊗ B` are indexed as `i = a * N_B + b`, so `A` is
//! the most-significant tensor factor and the amplitudes belonging to a fixed
//! bath outcome `b` form a stride-`N_B` slice.

use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance record shared by every validating constructor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed deviation of a squared norm or trace from one.
    pub normalization: f64,
    /// Allowed elementwise asymmetry `|H - H^†|`.
    pub hermiticity: f64,
    /// Allowed max-norm error of `V diag(λ) V^†` against its input.
    pub reconstruction: f64,
    /// Allowed max-norm deviation of `U^† U` from the identity.
    pub unitarity: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    normalization: 1e-10,
    hermiticity: 1e-10,
    reconstruction: 1e-9,
    unitarity: 1e-9,
};

impl Default for Tolerances {
    fn default() -> Self {
        TOLERANCES
    }
}

/// Qubit counts of the kept subsystem `A` and the measured bath `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DimensionSpec {
    pub n_a: u32,
    pub n_b: u32,
}

impl DimensionSpec {
    /// Joint spaces beyond this many qubits are rejected outright.
    pub const MAX_QUBITS: u32 = 30;

    pub fn new(n_a: u32, n_b: u32) -> Result<Self> {
        if n_a < 1 {
            return Err(Error::InvalidDimensions(format!(
                "subsystem A needs at least one qubit (n_a = {n_a})"
            )));
        }
        if n_a + n_b > Self::MAX_QUBITS {
            return Err(Error::InvalidDimensions(format!(
                "n_a + n_b = {} exceeds {} qubits",
                n_a + n_b,
                Self::MAX_QUBITS
            )));
        }
        Ok(Self { n_a, n_b })
    }

    pub fn dim_a(&self) -> usize {
        1usize << self.n_a
    }

    pub fn dim_b(&self) -> usize {
        1usize << self.n_b
    }

    pub fn dim(&self) -> usize {
        self.dim_a() * self.dim_b()
    }
}

/// Normalized amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Wraps `amplitudes`, rejecting vectors whose norm differs from one.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimensions("empty state vector".into()));
        }
        let norm_sqr = norm_sqr(&amplitudes);
        if (norm_sqr - 1.0).abs() > TOLERANCES.normalization {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn from_unnormalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm_sqr = norm_sqr(&amplitudes);
        if amplitudes.is_empty() || !(norm_sqr > 0.0) || !norm_sqr.is_finite() {
            return Err(Error::NotNormalized { norm_sqr });
        }
        let scale = norm_sqr.sqrt().recip();
        for x in &mut amplitudes {
            *x *= scale;
        }
        Ok(Self { amplitudes })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    /// Projector `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> Mat<C64> {
        let n = self.dim();
        Mat::from_fn(n, n, |i, j| self.amplitudes[i] * self.amplitudes[j].conj())
    }
}

pub(crate) fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

/// Conjugate-linear in the first argument.
pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Dense Hermitian operator.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    entries: Mat<C64>,
}

impl HermitianOperator {
    pub fn new(entries: Mat<C64>) -> Result<Self> {
        Self::with_tolerance(entries, TOLERANCES.hermiticity)
    }

    pub fn with_tolerance(entries: Mat<C64>, tol: f64) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                got: entries.ncols(),
            });
        }
        if entries.nrows() == 0 {
            return Err(Error::InvalidDimensions("empty operator".into()));
        }
        let max_asymmetry = max_asymmetry(entries.as_ref());
        if !(max_asymmetry <= tol) {
            return Err(Error::NotHermitian { max_asymmetry });
        }
        Ok(Self { entries })
    }

    /// Skips validation; for operators Hermitian by construction.
    pub(crate) fn new_unchecked(entries: Mat<C64>) -> Self {
        Self { entries }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::new_unchecked(Mat::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn identity(dim: usize) -> Self {
        Self::new_unchecked(identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> Mat<C64> {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).sum()
    }

    /// Eigenvalues only, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let vals = self
            .entries
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| Error::EigenNoConvergence)?;
        Ok(vals)
    }
}

fn max_asymmetry(m: faer::MatRef<'_, C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > worst || d.is_nan() {
                worst = if d.is_nan() { f64::INFINITY } else { d };
            }
        }
    }
    worst
}

/// Dense unitary operator.
#[derive(Debug, Clone)]
pub struct UnitaryOperator {
    entries: Mat<C64>,
}

impl UnitaryOperator {
    pub fn new(entries: Mat<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                got: entries.ncols(),
            });
        }
        let deviation = unitarity_deviation(entries.as_ref());
        if !(deviation <= TOLERANCES.unitarity) {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { entries })
    }

    pub(crate) fn new_unchecked(entries: Mat<C64>) -> Self {
        Self { entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new_unchecked(identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.entries
    }

    pub fn adjoint(&self) -> UnitaryOperator {
        Self::new_unchecked(self.entries.adjoint().to_owned())
    }

    /// Max-norm of `U^† U - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(self.entries.as_ref())
    }

    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        check_dim(self.dim(), psi.dim())?;
        Ok(PureState {
            amplitudes: mat_vec(&self.entries, psi.amplitudes()),
        })
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.entries[(i, i)]).sum()
    }
}

fn unitarity_deviation(m: faer::MatRef<'_, C64>) -> f64 {
    let prod = m.adjoint() * m;
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            let d = (prod[(i, j)] - C64::new(target, 0.0)).norm();
            worst = worst.max(if d.is_nan() { f64::INFINITY } else { d });
        }
    }
    worst
}

/// `H = V diag(λ) V^†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: UnitaryOperator,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Columns are the eigenvectors.
    pub fn eigenvectors(&self) -> &UnitaryOperator {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn reconstruct(&self) -> Mat<C64> {
        let v = self.eigenvectors.matrix();
        let n = self.dim();
        let scaled = Mat::from_fn(n, n, |i, j| v[(i, j)] * self.eigenvalues[j]);
        &scaled * v.adjoint()
    }

    /// `e^{-iHt} ψ = Σ_j e^{-iλ_j t} ⟨v_j|ψ⟩ |v_j⟩`.
    pub fn evolve(&self, t: f64, psi: &PureState) -> Result<PureState> {
        check_dim(self.dim(), psi.dim())?;
        let v = self.eigenvectors.matrix();
        let mut coeffs = adjoint_mat_vec(v, psi.amplitudes());
        for (c, &lambda) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= C64::from_polar(1.0, -lambda * t);
        }
        Ok(PureState {
            amplitudes: mat_vec(v, &coeffs),
        })
    }

    /// The propagator `e^{-iHt}` as a dense unitary.
    pub fn propagator(&self, t: f64) -> UnitaryOperator {
        let phases: Vec<C64> = self
            .eigenvalues
            .iter()
            .map(|&l| C64::from_polar(1.0, -l * t))
            .collect();
        conjugate_diagonal(&self.eigenvectors, &phases)
    }
}

/// `U diag(d) U^†`.
pub(crate) fn conjugate_diagonal(u: &UnitaryOperator, d: &[C64]) -> UnitaryOperator {
    let m = u.matrix();
    let n = u.dim();
    let scaled = Mat::from_fn(n, n, |i, j| m[(i, j)] * d[j]);
    UnitaryOperator::new_unchecked(&scaled * m.adjoint())
}

/// Spectral decomposition of a Hermitian operator.
pub fn eig_hermitian(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    let max_asymmetry = max_asymmetry(h.matrix().as_ref());
    if !(max_asymmetry <= TOLERANCES.hermiticity) {
        return Err(Error::NotHermitian { max_asymmetry });
    }
    let evd = h
        .matrix()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenNoConvergence)?;
    let n = h.dim();
    let s = evd.S().column_vector();
    let eigenvalues: Vec<f64> = (0..n).map(|i| s[i].re).collect();
    if eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenNoConvergence);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: UnitaryOperator::new_unchecked(evd.U().to_owned()),
    })
}

/// `e^{-iHt} ψ₀`.
pub fn evolve_state(h: &HermitianOperator, t: f64, psi0: &PureState) -> Result<PureState> {
    check_dim(h.dim(), psi0.dim())?;
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite time {t}")));
    }
    eig_hermitian(h)?.evolve(t, psi0)
}

/// `ρ_A = tr_B |ψ⟩⟨ψ|`.
pub fn reduced_density_a(psi: &PureState, dims: DimensionSpec) -> Result<HermitianOperator> {
    check_dim(dims.dim(), psi.dim())?;
    let (na, nb) = (dims.dim_a(), dims.dim_b());
    let amp = psi.amplitudes();
    let mut rho = Mat::<C64>::zeros(na, na);
    for a in 0..na {
        let row_a = &amp[a * nb..(a + 1) * nb];
        for a2 in 0..=a {
            let row_a2 = &amp[a2 * nb..(a2 + 1) * nb];
            let v: C64 = row_a.iter().zip(row_a2).map(|(x, y)| x * y.conj()).sum();
            rho[(a, a2)] = v;
            rho[(a2, a)] = v.conj();
        }
    }
    Ok(HermitianOperator::new_unchecked(rho))
}

/// Trace norm `‖x - y‖₁`. Callers halve it when a distance is wanted.
pub fn trace_distance(x: &HermitianOperator, y: &HermitianOperator) -> Result<f64> {
    check_dim(x.dim(), y.dim())?;
    let diff = HermitianOperator::new_unchecked(x.matrix() - y.matrix());
    Ok(diff.eigenvalues()?.iter().map(|l| l.abs()).sum())
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

pub fn identity(n: usize) -> Mat<C64> {
    Mat::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Largest elementwise modulus of `a - b`.
pub fn max_abs_diff(a: &Mat<C64>, b: &Mat<C64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

pub fn kron(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    let (ra, ca) = (a.nrows(), a.ncols());
    let (rb, cb) = (b.nrows(), b.ncols());
    Mat::from_fn(ra * rb, ca * cb, |i, j| {
        a[(i / rb, j / cb)] * b[(i % rb, j % cb)]
    })
}

/// Column-major friendly `M x`.
pub(crate) fn mat_vec(m: &Mat<C64>, x: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); m.nrows()];
    for (j, &xj) in x.iter().enumerate() {
        if xj == C64::new(0.0, 0.0) {
            continue;
        }
        let col = m.col(j);
        for (i, o) in out.iter_mut().enumerate() {
            *o += col[i] * xj;
        }
    }
    out
}

/// `M^† x`.
pub(crate) fn adjoint_mat_vec(m: &Mat<C64>, x: &[C64]) -> Vec<C64> {
    (0..m.ncols())
        .map(|j| {
            let col = m.col(j);
            (0..m.nrows()).map(|i| col[i].conj() * x[i]).sum()
        })
        .collect()
}
