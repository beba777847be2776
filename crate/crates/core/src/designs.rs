//! How close a projected ensemble is to a quantum state design: moment
//! operators, frame potentials, `Δ^(k)`, trace-norm deviations, and the
//! exact Haar statistics of projected weights and overlaps.

use faer::Mat;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{trace_distance, HermitianOperator, C64};
use crate::projected::ProjectedEnsemble;
use crate::weingarten::{all_permutations, factorial};

/// Dense moment operators are limited to this many rows.
pub const MAX_MOMENT_DIM: usize = 4096;
/// Symmetrizers are built from all `k!` permutations up to this `k`.
pub const MAX_SYMMETRIZER_K: usize = 6;
pub const MAX_FRAME_POTENTIAL_ENTRIES: usize = 1 << 14;
/// Relative excesses `F/F_Haar − 1` below this are rounding noise and count
/// as zero; otherwise the square root would lift ~1e-16 noise to ~1e-8.
pub const DELTA_NOISE_FLOOR: f64 = 1e-14;

fn moment_dim(n: usize, k: usize) -> Result<usize> {
    let mut d = 1usize;
    for _ in 0..k {
        d = d
            .checked_mul(n)
            .filter(|&d| d <= MAX_MOMENT_DIM)
            .ok_or_else(|| {
                Error::GuardExceeded(format!(
                    "{n}^{k} exceeds the dense moment limit of {MAX_MOMENT_DIM}"
                ))
            })?;
    }
    Ok(d)
}

/// `k`-copy density operator on `(C^{N_A})^{⊗k}`.
#[derive(Debug, Clone)]
pub struct MomentOperator {
    k: usize,
    dim_a: usize,
    matrix: HermitianOperator,
}

impl MomentOperator {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.matrix
    }

    pub fn matrix(&self) -> &Mat<C64> {
        self.matrix.matrix()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// Traces out the last `k - keep` copies.
    pub fn partial_trace(&self, keep: usize) -> Result<MomentOperator> {
        if keep == 0 || keep > self.k {
            return Err(Error::InvalidArgument(format!(
                "cannot keep {keep} of {} copies",
                self.k
            )));
        }
        let d_keep = self.dim_a.pow(keep as u32);
        let d_rest = self.dim_a.pow((self.k - keep) as u32);
        let m = self.matrix();
        let out = Mat::from_fn(d_keep, d_keep, |i, j| {
            (0..d_rest)
                .map(|r| m[(i * d_rest + r, j * d_rest + r)])
                .sum()
        });
        Ok(MomentOperator {
            k: keep,
            dim_a: self.dim_a,
            matrix: HermitianOperator::new_unchecked(out),
        })
    }
}

/// `Σ_z q_z (|Φ_z⟩⟨Φ_z|)^{⊗k}`.
pub fn moment_operator(ens: &ProjectedEnsemble, k: usize) -> Result<MomentOperator> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let dim_a = ens.dims().dim_a();
    let d = moment_dim(dim_a, k)?;
    let m = ens.len();
    // Columns √q_z |Φ_z⟩^{⊗k}; the moment operator is W W^†.
    let mut w = Mat::<C64>::zeros(d, m);
    for (col, e) in ens.entries().iter().enumerate() {
        let amp = e.state.amplitudes();
        let mut v = vec![C64::new(e.q.sqrt(), 0.0)];
        for _ in 0..k {
            v = v
                .iter()
                .flat_map(|x| amp.iter().map(move |y| x * y))
                .collect();
        }
        for (i, x) in v.into_iter().enumerate() {
            w[(i, col)] = x;
        }
    }
    let rho = &w * w.adjoint();
    Ok(MomentOperator {
        k,
        dim_a,
        matrix: HermitianOperator::new_unchecked(rho),
    })
}

/// Symmetric-subspace projector `(1/k!) Σ_π P_π` on `(C^n)^{⊗k}`.
pub fn symmetric_projector(n: usize, k: usize) -> Result<Mat<C64>> {
    if k == 0 || k > MAX_SYMMETRIZER_K {
        return Err(Error::GuardExceeded(format!(
            "symmetrizer needs 1 <= k <= {MAX_SYMMETRIZER_K}, got {k}"
        )));
    }
    let d = moment_dim(n, k)?;
    let perms = all_permutations(k);
    let w = 1.0 / factorial(k) as f64;
    let mut out = Mat::<C64>::zeros(d, d);
    for j in 0..d {
        for p in &perms {
            out[(p.permute_tensor_index(j, n), j)] += C64::new(w, 0.0);
        }
    }
    Ok(out)
}

/// `Π_sym / dim Sym^k(C^n)`.
pub fn haar_moment_operator(n: usize, k: usize) -> Result<MomentOperator> {
    let proj = symmetric_projector(n, k)?;
    let dim_sym = binomial(n + k - 1, k)
        .to_f64()
        .expect("binomial fits in f64 under the dense guard");
    let scale = 1.0 / dim_sym;
    let d = proj.nrows();
    Ok(MomentOperator {
        k,
        dim_a: n,
        matrix: HermitianOperator::new_unchecked(Mat::from_fn(d, d, |i, j| proj[(i, j)] * scale)),
    })
}

/// `Σ_{ij} q_i q_j |⟨Φ_i|Φ_j⟩|^{2k}` from pairwise overlaps.
///
/// Row sums run in parallel but each is accumulated in index order and the
/// rows are combined sequentially, so the result does not depend on the
/// thread count.
pub fn frame_potential(ens: &ProjectedEnsemble, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let m = ens.len();
    if m > MAX_FRAME_POTENTIAL_ENTRIES {
        return Err(Error::GuardExceeded(format!(
            "{m} outcomes exceed the frame-potential limit of {MAX_FRAME_POTENTIAL_ENTRIES}"
        )));
    }
    if m == 0 {
        return Err(Error::Empty("projected ensemble".into()));
    }
    let na = ens.dims().dim_a();
    let q: Vec<f64> = ens.entries().iter().map(|e| e.q).collect();
    let flat: Vec<C64> = ens
        .entries()
        .iter()
        .flat_map(|e| e.state.amplitudes().iter().copied())
        .collect();
    let rows: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|i| {
            let a = &flat[i * na..(i + 1) * na];
            let mut s = 0.0;
            for j in i + 1..m {
                let b = &flat[j * na..(j + 1) * na];
                let ov: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                s += q[j] * ov.norm_sqr().powi(k as i32);
            }
            q[i] * (q[i] + 2.0 * s)
        })
        .collect();
    Ok(rows.iter().sum())
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `1 / binom(n + k - 1, k)`.
pub fn haar_frame_potential(n: usize, k: usize) -> f64 {
    let r = BigRational::new(BigInt::one(), BigInt::from(binomial(n + k - 1, k)));
    r.to_f64().unwrap_or(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignReport {
    pub k: usize,
    pub frame_potential: f64,
    pub haar_frame_potential: f64,
    /// `√max(F/F_Haar − 1, 0)`, with excesses under [`DELTA_NOISE_FLOOR`] clamped.
    pub delta: f64,
    /// Upper bound on `‖ρ^(k) − ρ_Haar^(k)‖₁`; equal to `delta`.
    pub l1_bound: f64,
    pub l1_exact: Option<f64>,
}

impl DesignReport {
    pub fn delta_sq(&self) -> f64 {
        self.delta * self.delta
    }
}

pub fn design_report(ens: &ProjectedEnsemble, k: usize, materialize_l1: bool) -> Result<DesignReport> {
    let na = ens.dims().dim_a();
    if materialize_l1 {
        moment_dim(na, k)?;
    }
    let f = frame_potential(ens, k)?;
    let fh = haar_frame_potential(na, k);
    let excess = f / fh - 1.0;
    let delta = if excess > DELTA_NOISE_FLOOR {
        excess.sqrt()
    } else {
        0.0
    };
    let l1_exact = if materialize_l1 {
        let rho = moment_operator(ens, k)?;
        let haar = haar_moment_operator(na, k)?;
        Some(trace_distance(rho.operator(), haar.operator())?)
    } else {
        None
    };
    Ok(DesignReport {
        k,
        frame_potential: f,
        haar_frame_potential: fh,
        delta,
        l1_bound: delta,
        l1_exact,
    })
}

/// Closed-form moments of projected weights and overlaps for Haar-random
/// global states, as exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactHaarStatistics {
    pub mu_k: BigRational,
    pub mu_k_minus_1: BigRational,
    pub overlap_moment: BigRational,
    pub jensen_gap: BigRational,
    pub r_k: BigRational,
    pub delta_gap: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HaarStatistics {
    pub n_a: u32,
    pub n_b: u32,
    pub k: usize,
    /// `E q_z^k = Π_{j<k} (N_A + j)/(N + j)`.
    pub mu_k: f64,
    /// `E |⟨Φ̃_{z₁}|Φ̃_{z₂}⟩|^{2k}` for `z₁ ≠ z₂`.
    pub overlap_moment: f64,
    /// The exact gap `μ_k − μ_1^k`.
    pub jensen_gap_bound: f64,
    /// `μ_k / μ_{k−1}`.
    pub r_k: f64,
    /// `r_k − μ_1`.
    pub delta_gap: f64,
    pub exact: ExactHaarStatistics,
}

impl HaarStatistics {
    /// `c · k² / (N_B^k N_A)`.
    pub fn jensen_envelope(&self, c: f64) -> BigRational {
        let na = BigInt::one() << self.n_a;
        let nb_k = BigInt::one() << (self.n_b as usize * self.k);
        let k2 = BigInt::from(self.k * self.k);
        ratio_from_f64(c) * BigRational::new(k2, nb_k * na)
    }
}

fn ratio_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite constant")
}

fn mu(na: &BigInt, n: &BigInt, k: usize) -> BigRational {
    let mut acc = BigRational::one();
    for j in 0..k {
        let j = BigInt::from(j);
        acc *= BigRational::new(na + &j, n + &j);
    }
    acc
}

pub fn haar_statistics(n_a: u32, n_b: u32, k: usize) -> Result<HaarStatistics> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if n_a == 0 {
        return Err(Error::InvalidDimensions("n_a must be at least 1".into()));
    }
    let na = BigInt::one() << n_a;
    let nb = BigInt::one() << n_b;
    let n = &na * &nb;
    let mu_k = mu(&na, &n, k);
    let mu_km1 = mu(&na, &n, k - 1);
    let mu_1 = mu(&na, &n, 1);

    let mut num = BigInt::from(BigUint::from(factorial(k)));
    for j in 0..k {
        num *= &na + BigInt::from(j);
    }
    let mut den = BigInt::one();
    for i in 0..2 * k {
        den *= &n + BigInt::from(i);
    }
    let overlap = BigRational::new(num, den);

    let mut mu_1_k = BigRational::one();
    for _ in 0..k {
        mu_1_k *= &mu_1;
    }
    let jensen = &mu_k - mu_1_k;
    let r_k = &mu_k / &mu_km1;
    let delta_gap = &r_k - &mu_1;

    let f = |x: &BigRational| x.to_f64().unwrap_or(0.0);
    Ok(HaarStatistics {
        n_a,
        n_b,
        k,
        mu_k: f(&mu_k),
        overlap_moment: f(&overlap),
        jensen_gap_bound: f(&jensen),
        r_k: f(&r_k),
        delta_gap: f(&delta_gap),
        exact: ExactHaarStatistics {
            mu_k,
            mu_k_minus_1: mu_km1,
            overlap_moment: overlap,
            jensen_gap: jensen,
            r_k,
            delta_gap,
        },
    })
}

/// `(N_B − 1)(k − 1) / (N_B (N_A N_B + k − 1))`, the closed form of `δ`.
pub fn delta_gap_closed_form(n_a: u32, n_b: u32, k: usize) -> BigRational {
    let na = BigInt::one() << n_a;
    let nb = BigInt::one() << n_b;
    let km1 = BigInt::from(k) - 1;
    BigRational::new(
        (&nb - 1) * &km1,
        &nb * (&na * &nb + &km1),
    )
}
