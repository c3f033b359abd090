//! Density matrices of one or two polarization qubits, the triangular
//! parameterization that keeps least-squares fits physical, and the
//! entanglement/overlap metrics built on them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::errors::{Error, Result};
use crate::matrix::ComplexMatrix;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = -1e-10;
/// Eigenvalues below this are round-off of an exact zero; flooring them
/// before a square root keeps √λ from amplifying 1e-16 noise to 1e-8.
const SQRT_FLOOR: f64 = 1e-12;

fn floored_sqrt(v: f64) -> f64 {
    if v > SQRT_FLOOR {
        v.sqrt()
    } else {
        0.0
    }
}

/// Hermitian, unit-trace, positive-semidefinite state of one (dim 2) or two
/// (dim 4) polarization qubits. Construction validates all three invariants.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let dim = mat.dim();
        if dim != 2 && dim != 4 {
            return Err(Error::InvalidState(format!(
                "density matrix dimension must be 2 or 4, got {dim}"
            )));
        }
        let dev = mat.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian: max deviation {dev:.3e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace is {} + {}i, expected 1",
                tr.re, tr.im
            )));
        }
        let eig = mat.hermitian_part().eigen_hermitian()?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < PSD_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite: smallest eigenvalue {min:.3e}"
            )));
        }
        Ok(DensityMatrix { mat })
    }

    /// Pure state |ψ⟩⟨ψ| from a (not necessarily normalized) ket.
    pub fn from_pure(ket: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::InvalidState("zero ket".into()));
        }
        let scaled: Vec<Complex64> = ket.iter().map(|z| z / norm_sq.sqrt()).collect();
        Self::new(ComplexMatrix::outer(&scaled))
    }

    /// Maximally mixed state I/dim.
    pub fn maximally_mixed(dim: usize) -> Self {
        let mat = ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64);
        DensityMatrix { mat }
    }

    /// The nominal maximally entangled target (|HH⟩ + |VV⟩)/√2.
    pub fn bell_phi_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_pure(&[
            Complex64::new(s, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0),
        ])
        .expect("Bell state is valid")
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.mat[(r, c)]
    }

    /// Tr(ρ²) ∈ [1/dim, 1].
    pub fn purity(&self) -> f64 {
        let tr = self.mat.trace_product(&self.mat);
        debug_assert!(tr.im.abs() < 1e-12);
        tr.re
    }

    /// Wootters concurrence of a two-qubit state: max(0, λ₁−λ₂−λ₃−λ₄) with
    /// λᵢ the descending square roots of the eigenvalues of
    /// ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y). Evaluated through the Hermitian form
    /// √ρ ρ̃ √ρ so only Hermitian eigensolves are needed.
    pub fn concurrence(&self) -> f64 {
        assert_eq!(self.dim(), 4, "concurrence is defined for two qubits");
        let yy = sigma_y_tensor_sigma_y();
        let rho_tilde = yy.matmul(&self.mat.conjugate()).matmul(&yy);
        let sqrt_rho = self
            .mat
            .sqrt_psd()
            .expect("validated density matrix has a PSD square root");
        let m = sqrt_rho.matmul(&rho_tilde).matmul(&sqrt_rho).hermitian_part();
        let eig = m
            .eigen_hermitian()
            .expect("Hermitian by construction");
        let mut lambdas: Vec<f64> = eig.values.iter().map(|&v| floored_sqrt(v)).collect();
        lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
        (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
    }

    /// Quantum fidelity F(ρ, σ) = (Tr √(√ρ σ √ρ))², symmetric in its
    /// arguments and 1 iff the states coincide.
    pub fn fidelity(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::InvalidState(format!(
                "fidelity of dim {} against dim {}",
                self.dim(),
                other.dim()
            )));
        }
        let sqrt_rho = self.psd_checked_sqrt()?;
        other.check_psd_within_clamp()?;
        let inner = sqrt_rho
            .matmul(other.matrix())
            .matmul(&sqrt_rho)
            .hermitian_part();
        let eig = inner.eigen_hermitian()?;
        let tr_sqrt: f64 = eig.values.iter().map(|&v| floored_sqrt(v)).sum();
        Ok((tr_sqrt * tr_sqrt).clamp(0.0, 1.0 + 1e-9).min(1.0))
    }

    /// Trace distance ½ Tr |ρ − σ|.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let diff = self.mat.sub(&other.mat).hermitian_part();
        let eig = diff.eigen_hermitian().expect("difference is Hermitian");
        0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>()
    }

    fn psd_checked_sqrt(&self) -> Result<ComplexMatrix> {
        let eig = self.mat.hermitian_part().eigen_hermitian()?;
        if eig.values.iter().any(|&v| v < PSD_TOL) {
            return Err(Error::InvalidState(
                "state is not PSD within tolerance".into(),
            ));
        }
        Ok(eig.assemble(|l| l.max(0.0).sqrt()))
    }

    fn check_psd_within_clamp(&self) -> Result<()> {
        let eig = self.mat.hermitian_part().eigen_hermitian()?;
        if eig.values.iter().any(|&v| v < PSD_TOL) {
            return Err(Error::InvalidState(
                "state is not PSD within tolerance".into(),
            ));
        }
        Ok(())
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.mat.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let mat = ComplexMatrix::deserialize(deserializer)?;
        DensityMatrix::new(mat).map_err(serde::de::Error::custom)
    }
}

/// σ_y ⊗ σ_y, the spin-flip kernel of the concurrence.
fn sigma_y_tensor_sigma_y() -> ComplexMatrix {
    let mut sy = ComplexMatrix::zeros(2);
    sy[(0, 1)] = Complex64::new(0.0, -1.0);
    sy[(1, 0)] = Complex64::new(0.0, 1.0);
    sy.tensor_product(&sy)
}

/// Real parameters of a lower-triangular factor T with ρ = T T†/Tr(T T†):
/// first the `dim` real diagonal entries, then re/im pairs of the strictly
/// lower entries in row-major order. 4 parameters for dim 2, 16 for dim 4.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangularParams {
    dim: usize,
    values: Vec<f64>,
}

impl TriangularParams {
    pub fn param_count(dim: usize) -> usize {
        dim * dim
    }

    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::InvalidConfig(format!(
                "triangular parameterization supports dim 2 or 4, got {dim}"
            )));
        }
        if values.len() != Self::param_count(dim) {
            return Err(Error::InvalidConfig(format!(
                "dim {} needs {} parameters, got {}",
                dim,
                Self::param_count(dim),
                values.len()
            )));
        }
        Ok(TriangularParams { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The lower-triangular factor T encoded by the parameters.
    pub fn factor(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut t = ComplexMatrix::zeros(n);
        for i in 0..n {
            t[(i, i)] = Complex64::new(self.values[i], 0.0);
        }
        let mut k = n;
        for r in 1..n {
            for c in 0..r {
                t[(r, c)] = Complex64::new(self.values[k], self.values[k + 1]);
                k += 2;
            }
        }
        t
    }

    /// Offsets of the parameter vector: (row, col, is_imag) per slot, in the
    /// same order as `values`. Shared with the fit gradient.
    pub fn slots(dim: usize) -> Vec<(usize, usize, bool)> {
        let mut slots = Vec::with_capacity(Self::param_count(dim));
        for i in 0..dim {
            slots.push((i, i, false));
        }
        for r in 1..dim {
            for c in 0..r {
                slots.push((r, c, false));
                slots.push((r, c, true));
            }
        }
        slots
    }

    /// Extract parameters from a PSD matrix via its (jittered) Cholesky
    /// factor; used to seed fits from a linear-inversion estimate.
    pub fn from_psd(rho: &ComplexMatrix, jitter: f64) -> Result<Self> {
        let n = rho.dim();
        let mut a = rho.hermitian_part();
        for i in 0..n {
            a[(i, i)] += Complex64::new(jitter, 0.0);
        }
        let mut l = ComplexMatrix::zeros(n);
        for j in 0..n {
            let mut diag = a[(j, j)].re;
            for k in 0..j {
                diag -= l[(j, k)].norm_sqr();
            }
            if diag <= 0.0 {
                return Err(Error::Numerical(
                    "Cholesky failed on non-PSD input".into(),
                ));
            }
            let dsqrt = diag.sqrt();
            l[(j, j)] = Complex64::new(dsqrt, 0.0);
            for i in (j + 1)..n {
                let mut acc = a[(i, j)];
                for k in 0..j {
                    acc -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = acc / dsqrt;
            }
        }
        let mut values = vec![0.0; Self::param_count(n)];
        for (idx, (r, c, imag)) in Self::slots(n).into_iter().enumerate() {
            values[idx] = if imag { l[(r, c)].im } else { l[(r, c)].re };
        }
        TriangularParams::new(n, values)
    }
}

/// Build the physical density matrix ρ = T T†/Tr(T T†) encoded by `params`.
/// PSD by construction and unit trace by normalization; the all-zero
/// parameterization is rejected.
pub fn params_to_density(params: &TriangularParams) -> Result<DensityMatrix> {
    let t = params.factor();
    let tt = t.matmul(&t.adjoint());
    let trace = tt.trace().re;
    if trace <= 0.0 {
        return Err(Error::DegenerateParams);
    }
    let mat = tt.scale_re(1.0 / trace).hermitian_part();
    DensityMatrix::new(mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_term_state(alpha_sq: f64, phase: f64) -> DensityMatrix {
        let alpha = alpha_sq.sqrt();
        let beta = (1.0 - alpha_sq).sqrt();
        DensityMatrix::from_pure(&[
            c(alpha, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(beta * phase.cos(), beta * phase.sin()),
        ])
        .unwrap()
    }

    #[test]
    fn purity_of_bell_and_mixed() {
        assert_abs_diff_eq!(DensityMatrix::bell_phi_plus().purity(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            DensityMatrix::maximally_mixed(4).purity(),
            0.25,
            epsilon = 1e-12
        );
    }

    #[test]
    fn purity_of_equal_classical_mixture() {
        // Eigenvalues {1/2, 1/2, 0, 0} square-sum to 1/2.
        let mut m = ComplexMatrix::zeros(4);
        m[(0, 0)] = c(0.5, 0.0);
        m[(3, 3)] = c(0.5, 0.0);
        let rho = DensityMatrix::new(m).unwrap();
        assert_abs_diff_eq!(rho.purity(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn concurrence_extremes() {
        assert_abs_diff_eq!(
            DensityMatrix::bell_phi_plus().concurrence(),
            1.0,
            epsilon = 1e-10
        );
        let hh =
            DensityMatrix::from_pure(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
                .unwrap();
        assert_abs_diff_eq!(hh.concurrence(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn concurrence_closed_form_on_two_term_family() {
        // For pure α|HH⟩ + β|VV⟩ the concurrence is 2|α||β|.
        for k in 0..=5 {
            let alpha_sq = 0.1 * k as f64;
            let expected = 2.0 * (alpha_sq * (1.0 - alpha_sq)).sqrt();
            let got = two_term_state(alpha_sq, 0.0).concurrence();
            assert_abs_diff_eq!(got, expected, epsilon = 1e-9);
        }
        // |α|² = 0.25 reference point: 2·√(0.25·0.75).
        assert_abs_diff_eq!(
            two_term_state(0.25, 0.0).concurrence(),
            0.866_025_403_784_438_6,
            epsilon = 1e-9
        );
    }

    #[test]
    fn concurrence_and_purity_are_phase_invariant() {
        let reference_c = two_term_state(0.3, 0.0).concurrence();
        let reference_p = two_term_state(0.3, 0.0).purity();
        let mut phi = 0.0;
        while phi < std::f64::consts::TAU {
            let state = two_term_state(0.3, phi);
            assert!((state.concurrence() - reference_c).abs() <= 1e-10);
            assert!((state.purity() - reference_p).abs() <= 1e-10);
            phi += std::f64::consts::TAU / 16.0;
        }
    }

    #[test]
    fn fidelity_identity_and_orthogonal() {
        let bell = DensityMatrix::bell_phi_plus();
        assert_abs_diff_eq!(bell.fidelity(&bell).unwrap(), 1.0, epsilon = 1e-9);
        let hh =
            DensityMatrix::from_pure(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
                .unwrap();
        let vv =
            DensityMatrix::from_pure(&[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
                .unwrap();
        assert_abs_diff_eq!(hh.fidelity(&vv).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_of_phase_shifted_bell_pair() {
        // |⟨ψ|φ⟩|² = cos²(δ/2) for two equal-weight two-term states a phase
        // δ apart; δ = 0.289 gives ≈ 0.9793.
        let a = two_term_state(0.5, 0.0);
        let b = two_term_state(0.5, 0.289);
        let expected = (0.289_f64 / 2.0).cos().powi(2);
        assert_abs_diff_eq!(a.fidelity(&b).unwrap(), expected, epsilon = 1e-9);
        assert_abs_diff_eq!(expected, 0.979_264_7, epsilon = 1e-6);
    }

    #[test]
    fn fidelity_symmetry_and_pure_target_overlap() {
        let rho = two_term_state(0.3, 0.7);
        let sigma = DensityMatrix::maximally_mixed(4);
        let f_ab = rho.fidelity(&sigma).unwrap();
        let f_ba = sigma.fidelity(&rho).unwrap();
        assert_abs_diff_eq!(f_ab, f_ba, epsilon = 1e-9);
        // Against a pure target the fidelity is ⟨ψ|ρ|ψ⟩.
        let bell = DensityMatrix::bell_phi_plus();
        let overlap = bell.matrix().trace_product(sigma.matrix()).re;
        assert_abs_diff_eq!(sigma.fidelity(&bell).unwrap(), overlap, epsilon = 1e-9);
    }

    #[test]
    fn params_identity_normalizes() {
        let params = TriangularParams::new(4, {
            let mut v = vec![0.0; 16];
            v[0] = 2.5;
            v[1] = 2.5;
            v[2] = 2.5;
            v[3] = 2.5;
            v
        })
        .unwrap();
        let rho = params_to_density(&params).unwrap();
        assert!(rho
            .matrix()
            .sub(DensityMatrix::maximally_mixed(4).matrix())
            .max_abs()
            < 1e-14);
    }

    #[test]
    fn params_single_entry_gives_pure_hh() {
        let mut v = vec![0.0; 16];
        v[0] = 0.7;
        let rho = params_to_density(&TriangularParams::new(4, v).unwrap()).unwrap();
        assert_abs_diff_eq!(rho.entry(0, 0).re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn params_all_zero_rejected() {
        let params = TriangularParams::new(4, vec![0.0; 16]).unwrap();
        assert!(matches!(
            params_to_density(&params),
            Err(Error::DegenerateParams)
        ));
    }

    #[test]
    fn cholesky_round_trip() {
        let state = two_term_state(0.3, 0.4);
        let params = TriangularParams::from_psd(state.matrix(), 1e-12).unwrap();
        let rebuilt = params_to_density(&params).unwrap();
        assert!(rebuilt.trace_distance(&state) < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn random_params_always_yield_valid_states(
            values in proptest::collection::vec(-3.0f64..3.0, 16)
        ) {
            prop_assume!(values.iter().any(|v| v.abs() > 1e-6));
            let params = TriangularParams::new(4, values).unwrap();
            let rho = params_to_density(&params).unwrap();
            // DensityMatrix::new already enforced the invariants; spot-check
            // the eigenvalue floor and trace directly.
            let eig = rho.matrix().eigen_hermitian().unwrap();
            prop_assert!(eig.values.iter().all(|&v| v >= -1e-10));
            prop_assert!((rho.matrix().trace().re - 1.0).abs() <= 1e-12);
        }
    }

    proptest! {
        #[test]
        fn purity_bounds_hold(values in proptest::collection::vec(-2.0f64..2.0, 16)) {
            prop_assume!(values.iter().any(|v| v.abs() > 1e-6));
            let rho = params_to_density(&TriangularParams::new(4, values).unwrap()).unwrap();
            let p = rho.purity();
            prop_assert!(p >= 0.25 - 1e-9 && p <= 1.0 + 1e-9);
            let max_eig = rho.matrix().eigen_hermitian().unwrap().values[0];
            if (p - 1.0).abs() < 1e-9 {
                prop_assert!((max_eig - 1.0).abs() < 1e-6);
            }
            if (max_eig - 1.0).abs() < 1e-9 {
                prop_assert!((p - 1.0).abs() < 1e-6);
            }
        }
    }
}
