//! Exact Haar integrals over the unitary group via permutation sums.
//!
//! `E_U[U_{i₁j₁}⋯U_{i_q j_q} Ū_{i'₁j'₁}⋯Ū_{i'_q j'_q}]
//!   = Σ_{σ,τ∈S_q} Π_m δ(i_m, i'_{σ(m)}) δ(j_m, j'_{τ(m)}) Wg(στ⁻¹, N)`.

mod perm;

pub use perm::{all_permutations, cycle_type_label, factorial, partitions, Permutation};

use std::collections::BTreeMap;

use faer::Mat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{check_dim, DimensionSpec, PureState, C64};

pub const MAX_DEGREE: usize = 8;
pub const MAX_TWIRL_DEGREE: usize = 4;
pub const MAX_TWIRL_DIM: usize = 4096;
/// `expected_projected_f1` works on `N ≤ 64`, i.e. two copies of at most 4096.
pub const MAX_F1_DIM: usize = 64;

/// `Wg(·, N)` on `S_q`, stored per cycle type.
#[derive(Debug, Clone)]
pub struct WeingartenTable {
    q: usize,
    n: usize,
    classes: Vec<Vec<usize>>,
    exact: Vec<BigRational>,
    values: Vec<f64>,
    index: BTreeMap<Vec<usize>, usize>,
}

impl WeingartenTable {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Cycle types in the order of [`partitions`].
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn exact_values(&self) -> &[BigRational] {
        &self.exact
    }

    pub fn value_for_type(&self, cycle_type: &[usize]) -> Option<f64> {
        self.index.get(cycle_type).map(|&i| self.values[i])
    }

    pub fn exact_for_type(&self, cycle_type: &[usize]) -> Option<&BigRational> {
        self.index.get(cycle_type).map(|&i| &self.exact[i])
    }

    pub fn value(&self, sigma: &Permutation) -> f64 {
        assert_eq!(sigma.degree(), self.q);
        self.values[self.index[&sigma.cycle_type()]]
    }

    /// `Wg(σ τ⁻¹)` for all pairs, indexed like [`all_permutations`].
    pub fn pair_matrix(&self, perms: &[Permutation]) -> Vec<Vec<f64>> {
        let inv: Vec<Permutation> = perms.iter().map(Permutation::inverse).collect();
        perms
            .iter()
            .map(|s| inv.iter().map(|ti| self.value(&s.compose(ti))).collect())
            .collect()
    }
}

/// Inverts the Gram matrix `G_{σ,τ} = N^{#cycles(στ⁻¹)}` restricted to class
/// functions. For each class representative `π_c` the unknowns `w_d` satisfy
/// `Σ_d (Σ_{τ∈d} N^{#cycles(π_c τ⁻¹)}) w_d = δ_{c,e}`, solved in exact rationals.
pub fn weingarten_table(q: usize, n: usize) -> Result<WeingartenTable> {
    if q == 0 || q > MAX_DEGREE {
        return Err(Error::GuardExceeded(format!(
            "degree q = {q} outside 1..={MAX_DEGREE}"
        )));
    }
    if n < q {
        return Err(Error::SingularGram { q, n });
    }
    let classes = partitions(q);
    let index: BTreeMap<Vec<usize>, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i))
        .collect();
    let perms = all_permutations(q);
    let perm_class: Vec<usize> = perms.iter().map(|p| index[&p.cycle_type()]).collect();
    let inverses: Vec<Permutation> = perms.iter().map(Permutation::inverse).collect();

    let nc = classes.len();
    let big_n = BigInt::from(n);
    let powers: Vec<BigInt> = (0..=q).map(|c| num_traits::pow(big_n.clone(), c)).collect();
    let mut a = vec![vec![BigRational::zero(); nc + 1]; nc];
    for (c, class) in classes.iter().enumerate() {
        let rep = Permutation::from_cycle_type(class);
        let mut counts = vec![vec![0u64; q + 1]; nc];
        for (t, tinv) in inverses.iter().enumerate() {
            counts[perm_class[t]][rep.compose(tinv).num_cycles()] += 1;
        }
        for d in 0..nc {
            let mut s = BigInt::zero();
            for (cyc, &cnt) in counts[d].iter().enumerate() {
                if cnt > 0 {
                    s += &powers[cyc] * BigInt::from(cnt);
                }
            }
            a[c][d] = BigRational::from_integer(s);
        }
    }
    let identity_class = index[&vec![1; q]];
    a[identity_class][nc] = BigRational::one();
    let exact = solve_exact(a)?;
    let values = exact.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    Ok(WeingartenTable {
        q,
        n,
        classes,
        exact,
        values,
        index,
    })
}

/// Gauss-Jordan elimination on an augmented `n × (n+1)` system.
fn solve_exact(mut a: Vec<Vec<BigRational>>) -> Result<Vec<BigRational>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::InvalidArgument("singular class system".into()))?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &p;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
    }
    Ok(a.into_iter().map(|row| row[n].clone()).collect())
}

/// Max-norm of `Wg · G − I` over the full `q! × q!` matrices.
pub fn gram_identity_deviation(table: &WeingartenTable) -> Result<f64> {
    if table.q > 5 {
        return Err(Error::GuardExceeded(format!(
            "full Gram check limited to q <= 5, got {}",
            table.q
        )));
    }
    let perms = all_permutations(table.q);
    let wg = table.pair_matrix(&perms);
    let inv: Vec<Permutation> = perms.iter().map(Permutation::inverse).collect();
    let n = table.n as f64;
    let gram: Vec<Vec<f64>> = perms
        .iter()
        .map(|s| {
            inv.iter()
                .map(|ti| n.powi(s.compose(ti).num_cycles() as i32))
                .collect()
        })
        .collect();
    let m = perms.len();
    let mut worst = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let s: f64 = (0..m).map(|r| wg[i][r] * gram[r][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s - target).abs());
        }
    }
    Ok(worst)
}

/// `E[Π_m U_{rows[m], cols[m]} Ū_{rows_bar[m], cols_bar[m]}]` by the
/// permutation sum.
pub fn haar_monomial(
    table: &WeingartenTable,
    rows: &[usize],
    cols: &[usize],
    rows_bar: &[usize],
    cols_bar: &[usize],
) -> Result<f64> {
    let q = table.q;
    for v in [rows, cols, rows_bar, cols_bar] {
        check_dim(q, v.len())?;
    }
    let perms = all_permutations(q);
    let matches = |a: &[usize], b: &[usize]| -> Vec<bool> {
        perms
            .iter()
            .map(|p| (0..q).all(|m| a[m] == b[p.apply(m)]))
            .collect()
    };
    let row_ok = matches(rows, rows_bar);
    let col_ok = matches(cols, cols_bar);
    let mut total = 0.0;
    for (s, sigma) in perms.iter().enumerate() {
        if !row_ok[s] {
            continue;
        }
        for (t, tau) in perms.iter().enumerate() {
            if col_ok[t] {
                total += table.value(&sigma.compose(&tau.inverse()));
            }
        }
    }
    Ok(total)
}

/// `E_U U^{⊗q} ρ U^{†⊗q} = Σ_{σ,τ} tr(ρ P_σ^†) Wg(τσ⁻¹) P_τ`.
pub fn haar_twirl_exact(rho: &Mat<C64>, q: usize, n: usize) -> Result<Mat<C64>> {
    if q == 0 || q > MAX_TWIRL_DEGREE {
        return Err(Error::GuardExceeded(format!(
            "twirl degree q = {q} outside 1..={MAX_TWIRL_DEGREE}"
        )));
    }
    let d = n
        .checked_pow(q as u32)
        .filter(|&d| d <= MAX_TWIRL_DIM)
        .ok_or_else(|| {
            Error::GuardExceeded(format!("{n}^{q} exceeds the twirl limit of {MAX_TWIRL_DIM}"))
        })?;
    check_dim(d, rho.nrows())?;
    check_dim(d, rho.ncols())?;
    let table = weingarten_table(q, n)?;
    let perms = all_permutations(q);
    let images: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| (0..d).map(|j| p.permute_tensor_index(j, n)).collect())
        .collect();
    // tr(ρ P_σ^†) = Σ_J ρ[P_σ(J), J]
    let c: Vec<C64> = images
        .iter()
        .map(|img| (0..d).map(|j| rho[(img[j], j)]).sum())
        .collect();
    let wg = table.pair_matrix(&perms);
    let mut out = Mat::<C64>::zeros(d, d);
    for (t, img) in images.iter().enumerate() {
        let x: C64 = (0..perms.len()).map(|s| c[s] * wg[t][s]).sum();
        for j in 0..d {
            out[(img[j], j)] += x;
        }
    }
    Ok(out)
}

/// Leading large-`N` term
/// `N^{−2q+#cycles(π)} Π_C (−1)^{|C|−1} Cat_{|C|−1}`.
pub fn wg_leading(sigma: &Permutation, n: usize) -> f64 {
    let q = sigma.degree() as i32;
    let types = sigma.cycle_type();
    let mut coeff = 1.0;
    for len in &types {
        let sign = if (len - 1) % 2 == 0 { 1.0 } else { -1.0 };
        coeff *= sign * catalan(len - 1) as f64;
    }
    coeff * (n as f64).powi(-2 * q + types.len() as i32)
}

pub fn catalan(m: usize) -> u64 {
    let mut c = 1u64;
    for i in 0..m as u64 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

/// Exact `E_U F^(1)` for the projected ensemble of `V φ` with
/// `V = U diag(D) U^†` and Haar `U`.
///
/// With `O = I_{AA} ⊗ SWAP_B`, `F^(1) = ⟨ψψ|O|ψψ⟩` for `ψ = Vφ`. Each `ψ`
/// carries one `U` and one `Ū` sharing a column, so the average is a
/// degree-4 Weingarten sum that factors as `Σ_{σ,τ} R(σ) Wg(στ⁻¹) T(τ)`:
/// `R` collects the row contractions against `φ` and `O`, `T` the column
/// contractions against `D`. `R` does not depend on `D`, so it is computed
/// once per initial state.
#[derive(Debug, Clone)]
pub struct ProjectedF1Predictor {
    dims: DimensionSpec,
    perms: Vec<Permutation>,
    wg: Vec<Vec<f64>>,
    r: Vec<C64>,
}

/// Copy slots of the degree-4 sum. Slot `m` holds `U` with row `u_m` and
/// `Ū` with row `v_m`, both in column `c_m`. Slots 0 and 2 come from `ψ`
/// (weight `D`), slots 1 and 3 from `ψ̄` (weight `D̄`).
const CONJUGATED_SLOT: [bool; 4] = [false, true, false, true];

impl ProjectedF1Predictor {
    pub fn new(phi: &PureState, dims: DimensionSpec) -> Result<Self> {
        let n = dims.dim();
        if n > MAX_F1_DIM {
            return Err(Error::GuardExceeded(format!(
                "N = {n} exceeds the exact-prediction limit of {MAX_F1_DIM}"
            )));
        }
        check_dim(n, phi.dim())?;
        let table = weingarten_table(4, n)?;
        let perms = all_permutations(4);
        let wg = table.pair_matrix(&perms);
        let r = perms
            .iter()
            .map(|sigma| row_contraction(sigma, phi, dims))
            .collect();
        Ok(Self {
            dims,
            perms,
            wg,
            r,
        })
    }

    pub fn dims(&self) -> DimensionSpec {
        self.dims
    }

    /// `T(τ) = Π_{cycles C of τ} Σ_j Π_{m∈C} w_m(j)`.
    fn column_weights(&self, spectrum: &[C64]) -> Vec<C64> {
        self.perms
            .iter()
            .map(|tau| {
                tau.cycles()
                    .iter()
                    .map(|cycle| {
                        let conj = cycle.iter().filter(|&&m| CONJUGATED_SLOT[m]).count();
                        let plain = cycle.len() - conj;
                        spectrum
                            .iter()
                            .map(|d| d.powi(plain as i32) * d.conj().powi(conj as i32))
                            .sum::<C64>()
                    })
                    .product()
            })
            .collect()
    }

    fn contract(&self, t: &[C64]) -> C64 {
        let mut total = C64::new(0.0, 0.0);
        for (s, r) in self.r.iter().enumerate() {
            let inner: C64 = t
                .iter()
                .zip(&self.wg[s])
                .map(|(ti, w)| ti * *w)
                .sum();
            total += r * inner;
        }
        total
    }

    pub fn predict(&self, spectrum: &[C64]) -> Result<f64> {
        self.predict_mean(std::slice::from_ref(&spectrum.to_vec()))
    }

    /// Average of [`Self::predict`] over several spectra; `T` enters linearly.
    pub fn predict_mean(&self, spectra: &[Vec<C64>]) -> Result<f64> {
        if spectra.is_empty() {
            return Err(Error::Empty("spectra".into()));
        }
        let mut t = vec![C64::new(0.0, 0.0); self.perms.len()];
        for d in spectra {
            check_dim(self.dims.dim(), d.len())?;
            for (acc, x) in t.iter_mut().zip(self.column_weights(d)) {
                *acc += x;
            }
        }
        let scale = 1.0 / spectra.len() as f64;
        for x in &mut t {
            *x *= scale;
        }
        let f = self.contract(&t);
        if f.im.abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "prediction has imaginary residue {:.3e}",
                f.im
            )));
        }
        Ok(f.re)
    }

    /// The averaged two-copy operator `E_U (Vφφ^†V^†)^{⊗2}` as a dense
    /// `N² × N²` matrix, copy one most significant.
    pub fn two_copy_operator(&self, phi: &PureState, spectrum: &[C64]) -> Result<Mat<C64>> {
        let n = self.dims.dim();
        check_dim(n, phi.dim())?;
        check_dim(n, spectrum.len())?;
        let t = self.column_weights(spectrum);
        let mut out = Mat::<C64>::zeros(n * n, n * n);
        let amp = phi.amplitudes();
        for (s, sigma) in self.perms.iter().enumerate() {
            let coeff: C64 = t.iter().zip(&self.wg[s]).map(|(ti, w)| ti * *w).sum();
            for_each_row_assignment(sigma, amp, n, |x1, x2, x1p, x2p, amp_weight| {
                out[(x1 * n + x2, x1p * n + x2p)] += coeff * amp_weight;
            });
        }
        Ok(out)
    }
}

/// Enumerates the row indices compatible with `σ`: `U`-rows
/// `(x₁, y'₁, x₂, y'₂)` are free and `Ū`-rows `(y₁, x'₁, y₂, x'₂)` follow from
/// `v_{σ(m)} = u_m`. Passes `(x₁, x₂, x'₁, x'₂)` and
/// `φ_{y₁} φ_{y₂} φ̄_{y'₁} φ̄_{y'₂}`.
fn for_each_row_assignment(
    sigma: &Permutation,
    amp: &[C64],
    n: usize,
    mut f: impl FnMut(usize, usize, usize, usize, C64),
) {
    let support: Vec<usize> = (0..n).filter(|&i| amp[i] != C64::new(0.0, 0.0)).collect();
    let mut u = [0usize; 4];
    let mut v = [0usize; 4];
    for &y1p in &support {
        for &y2p in &support {
            let bra = amp[y1p].conj() * amp[y2p].conj();
            for x1 in 0..n {
                for x2 in 0..n {
                    u[0] = x1;
                    u[1] = y1p;
                    u[2] = x2;
                    u[3] = y2p;
                    for m in 0..4 {
                        v[sigma.apply(m)] = u[m];
                    }
                    let (y1, x1p, y2, x2p) = (v[0], v[1], v[2], v[3]);
                    let ket = amp[y1] * amp[y2];
                    if ket == C64::new(0.0, 0.0) {
                        continue;
                    }
                    f(x1, x2, x1p, x2p, ket * bra);
                }
            }
        }
    }
}

/// `R(σ) = Σ φ_{y₁} φ_{y₂} φ̄_{y'₁} φ̄_{y'₂} ⟨x'₁x'₂|O|x₁x₂⟩` over assignments
/// compatible with `σ`.
fn row_contraction(sigma: &Permutation, phi: &PureState, dims: DimensionSpec) -> C64 {
    let nb = dims.dim_b();
    let mut total = C64::new(0.0, 0.0);
    for_each_row_assignment(sigma, phi.amplitudes(), dims.dim(), |x1, x2, x1p, x2p, w| {
        let swap_ok = x1p / nb == x1 / nb
            && x2p / nb == x2 / nb
            && x1p % nb == x2 % nb
            && x2p % nb == x1 % nb;
        if swap_ok {
            total += w;
        }
    });
    total
}

/// Dense `I_{AA} ⊗ SWAP_B` on two copies of `A ⊗ B`, copy one most
/// significant.
pub fn swap_b_operator(dims: DimensionSpec) -> Mat<C64> {
    let n = dims.dim();
    let nb = dims.dim_b();
    let mut o = Mat::<C64>::zeros(n * n, n * n);
    for x1 in 0..n {
        for x2 in 0..n {
            let (a1, b1) = (x1 / nb, x1 % nb);
            let (a2, b2) = (x2 / nb, x2 % nb);
            let y1 = a1 * nb + b2;
            let y2 = a2 * nb + b1;
            o[(y1 * n + y2, x1 * n + x2)] = C64::new(1.0, 0.0);
        }
    }
    o
}

pub fn expected_projected_f1(spectrum: &[C64], phi: &PureState, dims: DimensionSpec) -> Result<f64> {
    ProjectedF1Predictor::new(phi, dims)?.predict(spectrum)
}

/// `|Wg_leading − Wg| / |Wg|` for one cycle type.
pub fn leading_relative_error(table: &WeingartenTable, cycle_type: &[usize]) -> Option<f64> {
    let exact = table.exact_for_type(cycle_type)?;
    let lead = wg_leading(&Permutation::from_cycle_type(cycle_type), table.n);
    let exact_f = exact.to_f64()?;
    if exact.is_zero() {
        return None;
    }
    Some(((lead - exact_f) / exact_f).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::frame_potential;
    use crate::ensembles::{apply_structured, sample_haar_state, sample_haar_unitary};
    use crate::linalg::max_abs_diff;
    use crate::projected::build_projected_ensemble;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn degree_one_and_two() {
        let t = weingarten_table(1, 7).unwrap();
        assert_eq!(t.exact_for_type(&[1]).unwrap(), &rat(1, 7));
        let t = weingarten_table(2, 4).unwrap();
        assert_eq!(t.exact_for_type(&[1, 1]).unwrap(), &rat(1, 15));
        assert_eq!(t.exact_for_type(&[2]).unwrap(), &rat(-1, 60));
    }

    #[test]
    fn degree_three_closed_forms() {
        // Known rational functions of N for S_3.
        let n = 5i64;
        let den = n * (n * n - 1) * (n * n - 4);
        let t = weingarten_table(3, n as usize).unwrap();
        assert_eq!(t.exact_for_type(&[1, 1, 1]).unwrap(), &rat(n * n - 2, den));
        assert_eq!(t.exact_for_type(&[2, 1]).unwrap(), &rat(-1, (n * n - 1) * (n * n - 4)));
        assert_eq!(t.exact_for_type(&[3]).unwrap(), &rat(2, den));
    }

    #[test]
    fn inverse_gram_identity() {
        for q in 1..=4 {
            for n in [q, 8, 16] {
                let t = weingarten_table(q, n).unwrap();
                assert!(gram_identity_deviation(&t).unwrap() < 1e-9, "q={q} n={n}");
            }
        }
        let t = weingarten_table(5, 6).unwrap();
        assert!(gram_identity_deviation(&t).unwrap() < 1e-9);
    }

    #[test]
    fn degree_eight_table_is_finite() {
        let t = weingarten_table(8, 8).unwrap();
        assert_eq!(t.classes().len(), 22);
        assert!(t.values().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn singular_gram_rejected() {
        assert!(matches!(
            weingarten_table(3, 2),
            Err(Error::SingularGram { q: 3, n: 2 })
        ));
        assert!(weingarten_table(9, 9).is_err());
    }

    #[test]
    fn twirl_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = sample_haar_state(3, &mut rng).unwrap();
        let out = haar_twirl_exact(&psi.projector(), 1, 3).unwrap();
        let want = Mat::from_fn(3, 3, |i, j| {
            if i == j {
                C64::new(1.0 / 3.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        assert!(max_abs_diff(&out, &want) < 1e-12);

        let rho = PureState::basis(4, 0).unwrap().projector();
        let out = haar_twirl_exact(&rho, 2, 2).unwrap();
        let swap = all_permutations(2)[1].clone();
        let want = Mat::from_fn(4, 4, |i, j| {
            let mut v = if i == j { 1.0 } else { 0.0 };
            if swap.permute_tensor_index(j, 2) == i {
                v += 1.0;
            }
            C64::new(v / 6.0, 0.0)
        });
        assert!(max_abs_diff(&out, &want) < 1e-12);
    }

    #[test]
    fn twirl_preserves_trace_and_commutes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (n, q) = (3usize, 3usize);
        let d = 27;
        let psi = sample_haar_state(d, &mut rng).unwrap();
        let rho = psi.projector();
        let out = haar_twirl_exact(&rho, q, n).unwrap();
        let tr: C64 = (0..d).map(|i| out[(i, i)]).sum();
        assert!((tr - C64::new(1.0, 0.0)).norm() < 1e-9);
        let w = sample_haar_unitary(n, &mut rng).unwrap();
        let w3 = crate::linalg::kron(&crate::linalg::kron(w.matrix(), w.matrix()), w.matrix());
        let lhs = &w3 * &out;
        let rhs = &out * &w3;
        assert!(max_abs_diff(&lhs, &rhs) < 1e-9);
    }

    #[test]
    fn guards_for_twirl() {
        let rho = Mat::<C64>::zeros(2, 2);
        assert!(haar_twirl_exact(&rho, 5, 2).is_err());
        let big = Mat::<C64>::zeros(1, 1);
        assert!(haar_twirl_exact(&big, 3, 17).is_err());
    }

    #[test]
    fn leading_asymptotics() {
        assert_eq!(catalan(0), 1);
        assert_eq!(catalan(3), 5);
        assert_eq!(wg_leading(&Permutation::identity(3), 4), 4f64.powi(-3));
        let n = 64usize;
        let tr = Permutation::transposition(2, 0, 1);
        let lead = wg_leading(&tr, n);
        assert_eq!(lead, -(n as f64).powi(-3));
        let t = weingarten_table(2, n).unwrap();
        let exact = t.value(&tr);
        let nn = (n * n) as f64;
        assert!(((lead - exact) / exact).abs() <= 1.0 / (nn - 1.0) + 1e-15);
        for class in partitions(4) {
            let e16 = leading_relative_error(&weingarten_table(4, 16).unwrap(), &class).unwrap();
            let e64 = leading_relative_error(&weingarten_table(4, 64).unwrap(), &class).unwrap();
            assert!(e64 < e16);
        }
    }

    #[test]
    fn monomial_examples() {
        let t = weingarten_table(1, 4).unwrap();
        assert_eq!(haar_monomial(&t, &[0], &[0], &[0], &[0]).unwrap(), 0.25);
        assert_eq!(haar_monomial(&t, &[0], &[0], &[1], &[0]).unwrap(), 0.0);
        let t = weingarten_table(2, 4).unwrap();
        // E|U_00|^4 = 2/(N(N+1))
        let v = haar_monomial(&t, &[0, 0], &[0, 0], &[0, 0], &[0, 0]).unwrap();
        assert!((v - 0.1).abs() < 1e-15);
    }

    #[test]
    fn identity_spectrum_gives_product_purity() {
        let dims = DimensionSpec::new(1, 2).unwrap();
        let phi = PureState::basis(8, 0).unwrap();
        let ones = vec![C64::new(1.0, 0.0); 8];
        let f = expected_projected_f1(&ones, &phi, dims).unwrap();
        assert!((f - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dense_operator_agrees_with_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dims = DimensionSpec::new(1, 1).unwrap();
        let phi = sample_haar_state(4, &mut rng).unwrap();
        let d: Vec<C64> = (0..4).map(|j| C64::from_polar(1.0, 0.7 * j as f64 + 0.2)).collect();
        let pred = ProjectedF1Predictor::new(&phi, dims).unwrap();
        let m = pred.two_copy_operator(&phi, &d).unwrap();
        let o = swap_b_operator(dims);
        let mo = &m * &o;
        let tr: C64 = (0..16).map(|i| mo[(i, i)]).sum();
        assert!((tr.re - pred.predict(&d).unwrap()).abs() < 1e-12);
        assert!(tr.im.abs() < 1e-12);
        let trm: C64 = (0..16).map(|i| m[(i, i)]).sum();
        assert!((trm - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn prediction_matches_monte_carlo_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let dims = DimensionSpec::new(1, 1).unwrap();
        let phi = PureState::basis(4, 0).unwrap();
        let d: Vec<C64> = (0..4).map(|j| C64::from_polar(1.0, 1.1 * j as f64)).collect();
        let want = expected_projected_f1(&d, &phi, dims).unwrap();
        let samples: Vec<f64> = (0..4000)
            .map(|_| {
                let u = sample_haar_unitary(4, &mut rng).unwrap();
                let psi = apply_structured(&u, &d, &phi).unwrap();
                frame_potential(&build_projected_ensemble(&psi, dims).unwrap(), 1).unwrap()
            })
            .collect();
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        assert!((mean - want).abs() < 3.0 * se, "{mean} vs {want} ± {se}");
    }

    #[test]
    fn predictor_guards() {
        let dims = DimensionSpec::new(1, 6).unwrap();
        let phi = PureState::basis(128, 0).unwrap();
        assert!(ProjectedF1Predictor::new(&phi, dims).is_err());
        let dims = DimensionSpec::new(1, 0).unwrap();
        let phi = PureState::basis(2, 0).unwrap();
        assert!(matches!(
            ProjectedF1Predictor::new(&phi, dims),
            Err(Error::SingularGram { .. })
        ));
    }
}
