//! The six-element polarization basis (H, V, D, A, R, L), its projectors and
//! pair operators, and the waveplate settings that realize each analyzer in
//! front of an H-transmitting polarizing beamsplitter.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::errors::{Error, Result};
use crate::matrix::ComplexMatrix;

/// One of the six analyzer/seed polarizations. R is (|H⟩ − i|V⟩)/√2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolLabel {
    H,
    V,
    D,
    A,
    R,
    L,
}

impl PolLabel {
    pub const ALL: [PolLabel; 6] = [
        PolLabel::H,
        PolLabel::V,
        PolLabel::D,
        PolLabel::A,
        PolLabel::R,
        PolLabel::L,
    ];

    /// The orthogonal label within the same basis.
    pub fn orthogonal(self) -> PolLabel {
        match self {
            PolLabel::H => PolLabel::V,
            PolLabel::V => PolLabel::H,
            PolLabel::D => PolLabel::A,
            PolLabel::A => PolLabel::D,
            PolLabel::R => PolLabel::L,
            PolLabel::L => PolLabel::R,
        }
    }

    /// Basis index: 0 for {H,V}, 1 for {D,A}, 2 for {R,L}.
    pub fn basis_index(self) -> usize {
        match self {
            PolLabel::H | PolLabel::V => 0,
            PolLabel::D | PolLabel::A => 1,
            PolLabel::R | PolLabel::L => 2,
        }
    }

    /// The (transmitted, reflected) pair of the basis this label belongs to.
    pub fn basis_pair(self) -> (PolLabel, PolLabel) {
        match self.basis_index() {
            0 => (PolLabel::H, PolLabel::V),
            1 => (PolLabel::D, PolLabel::A),
            _ => (PolLabel::R, PolLabel::L),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            PolLabel::H => 'H',
            PolLabel::V => 'V',
            PolLabel::D => 'D',
            PolLabel::A => 'A',
            PolLabel::R => 'R',
            PolLabel::L => 'L',
        }
    }
}

impl std::fmt::Display for PolLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl std::str::FromStr for PolLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "H" => Ok(PolLabel::H),
            "V" => Ok(PolLabel::V),
            "D" => Ok(PolLabel::D),
            "A" => Ok(PolLabel::A),
            "R" => Ok(PolLabel::R),
            "L" => Ok(PolLabel::L),
            other => Err(Error::InvalidConfig(format!(
                "unknown polarization label '{other}'"
            ))),
        }
    }
}

impl Serialize for PolLabel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PolLabel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Normalized two-component Jones vector (h, v).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JonesVector {
    pub h: Complex64,
    pub v: Complex64,
}

impl JonesVector {
    /// Validates |h|² + |v|² = 1 within 1e-12.
    pub fn new(h: Complex64, v: Complex64) -> Result<Self> {
        let norm = h.norm_sqr() + v.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "Jones vector norm² is {norm}, expected 1"
            )));
        }
        Ok(JonesVector { h, v })
    }

    /// Normalize an arbitrary nonzero pair of amplitudes.
    pub fn normalized(h: Complex64, v: Complex64) -> Result<Self> {
        let norm = (h.norm_sqr() + v.norm_sqr()).sqrt();
        if norm <= 0.0 {
            return Err(Error::InvalidState("zero Jones vector".into()));
        }
        Ok(JonesVector {
            h: h / norm,
            v: v / norm,
        })
    }

    pub fn components(&self) -> [Complex64; 2] {
        [self.h, self.v]
    }

    pub fn outer(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.components())
    }
}

/// Unit Jones vector of a basis label.
pub fn jones_of(label: PolLabel) -> JonesVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c = Complex64::new;
    let (h, v) = match label {
        PolLabel::H => (c(1.0, 0.0), c(0.0, 0.0)),
        PolLabel::V => (c(0.0, 0.0), c(1.0, 0.0)),
        PolLabel::D => (c(s, 0.0), c(s, 0.0)),
        PolLabel::A => (c(s, 0.0), c(-s, 0.0)),
        PolLabel::R => (c(s, 0.0), c(0.0, -s)),
        PolLabel::L => (c(s, 0.0), c(0.0, s)),
    };
    JonesVector { h, v }
}

/// Rank-1 projector |label⟩⟨label|.
pub fn projector(label: PolLabel) -> ComplexMatrix {
    jones_of(label).outer()
}

/// A signal/idler analyzer pair. 36 distinct settings exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub signal: PolLabel,
    pub idler: PolLabel,
}

impl MeasurementSetting {
    pub fn new(signal: PolLabel, idler: PolLabel) -> Self {
        MeasurementSetting { signal, idler }
    }

    /// All 36 settings in canonical (signal-major) order.
    pub fn all_36() -> Vec<MeasurementSetting> {
        let mut out = Vec::with_capacity(36);
        for &s in &PolLabel::ALL {
            for &i in &PolLabel::ALL {
                out.push(MeasurementSetting::new(s, i));
            }
        }
        out
    }

    /// The minimal informationally complete 16-setting subset
    /// {H,V,D,R} × {H,V,D,R}.
    pub fn subset_16() -> Vec<MeasurementSetting> {
        let labels = [PolLabel::H, PolLabel::V, PolLabel::D, PolLabel::R];
        let mut out = Vec::with_capacity(16);
        for &s in &labels {
            for &i in &labels {
                out.push(MeasurementSetting::new(s, i));
            }
        }
        out
    }

    /// Basis-pair group index in 0..9: 3·basis(signal) + basis(idler).
    pub fn basis_group(&self) -> usize {
        3 * self.signal.basis_index() + self.idler.basis_index()
    }
}

impl std::fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.signal, self.idler)
    }
}

/// Projector onto the separable pair outcome, |s⟩⟨s| ⊗ |i⟩⟨i|.
pub fn pair_operator(setting: MeasurementSetting) -> ComplexMatrix {
    projector(setting.signal).tensor_product(&projector(setting.idler))
}

/// Measurement operator with the signal side replaced by an arbitrary seed
/// state: ρ_seed ⊗ |idler⟩⟨idler|. Used when the physically coupled seed
/// differs from its nominal label.
pub fn rotated_pair_operator(
    seed_state: &DensityMatrix,
    idler: PolLabel,
) -> Result<ComplexMatrix> {
    if seed_state.dim() != 2 {
        return Err(Error::InvalidState(format!(
            "seed state must be a single qubit, got dim {}",
            seed_state.dim()
        )));
    }
    Ok(seed_state.matrix().tensor_product(&projector(idler)))
}

/// Half/quarter waveplate angles (radians, in [0, π)) that project onto a
/// basis label when followed by an H-transmitting PBS.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveplateSetting {
    pub hwp_angle: f64,
    pub qwp_angle: f64,
}

/// Jones matrix of a half-wave plate with fast axis at `theta`.
pub fn hwp_matrix(theta: f64) -> ComplexMatrix {
    let (s2, c2) = (2.0 * theta).sin_cos();
    let mut m = ComplexMatrix::zeros(2);
    m[(0, 0)] = Complex64::new(c2, 0.0);
    m[(0, 1)] = Complex64::new(s2, 0.0);
    m[(1, 0)] = Complex64::new(s2, 0.0);
    m[(1, 1)] = Complex64::new(-c2, 0.0);
    m
}

/// Jones matrix of a quarter-wave plate with fast axis at `theta`
/// (fast-axis-horizontal form diag(1, i)).
pub fn qwp_matrix(theta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    let (ss, cc, sc) = (s * s, c * c, s * c);
    let mut m = ComplexMatrix::zeros(2);
    m[(0, 0)] = Complex64::new(cc, ss);
    m[(0, 1)] = Complex64::new(sc, -sc);
    m[(1, 0)] = Complex64::new(sc, -sc);
    m[(1, 1)] = Complex64::new(ss, cc);
    m
}

/// Analyzer angles for each label. The light passes the QWP, then the HWP,
/// then the PBS; the projected state is QWP(q)† HWP(h)† |H⟩ up to a global
/// phase.
pub fn waveplates_for(label: PolLabel) -> WaveplateSetting {
    let (hwp, qwp) = match label {
        PolLabel::H => (0.0, 0.0),
        PolLabel::V => (PI / 4.0, 0.0),
        PolLabel::D => (PI / 8.0, PI / 4.0),
        PolLabel::A => (3.0 * PI / 8.0, PI / 4.0),
        PolLabel::R => (PI / 4.0, PI / 4.0),
        PolLabel::L => (0.0, PI / 4.0),
    };
    WaveplateSetting {
        hwp_angle: hwp.rem_euclid(PI),
        qwp_angle: qwp.rem_euclid(PI),
    }
}

/// The projector implemented by an analyzer arm at the given waveplate
/// angles: QWP(q)† HWP(h)† |H⟩⟨H| HWP(h) QWP(q).
pub fn analyzer_projector(setting: WaveplateSetting) -> ComplexMatrix {
    let chain = hwp_matrix(setting.hwp_angle).matmul(&qwp_matrix(setting.qwp_angle));
    let ph = projector(PolLabel::H);
    chain.adjoint().matmul(&ph).matmul(&chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn jones_table_values() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = jones_of(PolLabel::H);
        assert_eq!(h.h, Complex64::new(1.0, 0.0));
        assert_eq!(h.v, Complex64::new(0.0, 0.0));

        // |D⟩⟨D| has all entries 1/2.
        let pd = projector(PolLabel::D);
        for r in 0..2 {
            for c in 0..2 {
                assert_abs_diff_eq!(pd[(r, c)].re, 0.5, epsilon = 1e-15);
                assert_abs_diff_eq!(pd[(r, c)].im, 0.0, epsilon = 1e-15);
            }
        }
        let d = jones_of(PolLabel::D);
        assert_abs_diff_eq!(d.h.re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(d.v.re, s, epsilon = 1e-15);

        // |R⟩⟨R| carries ±0.5 on the imaginary off-diagonals.
        let pr = projector(PolLabel::R);
        assert_abs_diff_eq!(pr[(0, 1)].im, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(pr[(1, 0)].im, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(pr[(0, 0)].re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn projectors_are_rank_one_idempotent() {
        for &label in &PolLabel::ALL {
            let p = projector(label);
            assert!(p.hermitian_deviation() < 1e-12);
            assert!(p.matmul(&p).sub(&p).max_abs() < 1e-12);
            let eig = p.eigen_hermitian().unwrap();
            assert_abs_diff_eq!(eig.values[0], 1.0, epsilon = 1e-12);
            assert!(eig.values[1].abs() <= 1e-12);
        }
    }

    #[test]
    fn bases_complete_and_mutually_unbiased() {
        let i2 = ComplexMatrix::identity(2);
        for pair in [
            (PolLabel::H, PolLabel::V),
            (PolLabel::D, PolLabel::A),
            (PolLabel::R, PolLabel::L),
        ] {
            let sum = projector(pair.0).add(&projector(pair.1));
            assert!(sum.sub(&i2).max_abs() < 1e-12);
        }
        for &a in &PolLabel::ALL {
            for &b in &PolLabel::ALL {
                if a.basis_index() != b.basis_index() {
                    let ja = jones_of(a).components();
                    let jb = jones_of(b).components();
                    let ov = ja[0].conj() * jb[0] + ja[1].conj() * jb[1];
                    assert_abs_diff_eq!(ov.norm_sqr(), 0.5, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn thirty_six_distinct_settings() {
        let all = MeasurementSetting::all_36();
        assert_eq!(all.len(), 36);
        let unique: std::collections::BTreeSet<_> = all.iter().collect();
        assert_eq!(unique.len(), 36);
        assert_eq!(MeasurementSetting::subset_16().len(), 16);
    }

    #[test]
    fn pair_operator_hh_and_rank() {
        let hh = pair_operator(MeasurementSetting::new(PolLabel::H, PolLabel::H));
        assert_abs_diff_eq!(hh[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(hh.trace().re, 1.0, epsilon = 1e-15);
        for setting in MeasurementSetting::all_36() {
            let op = pair_operator(setting);
            let eig = op.eigen_hermitian().unwrap();
            assert!(eig.values[1].abs() <= 1e-12, "{setting} is not rank-1");
        }
    }

    #[test]
    fn pair_operators_complete_per_basis_pair() {
        let labels = [
            (PolLabel::D, PolLabel::A),
            (PolLabel::D, PolLabel::A),
        ];
        let mut sum = ComplexMatrix::zeros(4);
        for &s in &[labels[0].0, labels[0].1] {
            for &i in &[labels[1].0, labels[1].1] {
                sum = sum.add(&pair_operator(MeasurementSetting::new(s, i)));
            }
        }
        assert!(sum.sub(&ComplexMatrix::identity(4)).max_abs() < 1e-12);
    }

    #[test]
    fn rotated_operator_with_ideal_seed_matches_pair_operator() {
        for &s in &PolLabel::ALL {
            let seed = DensityMatrix::new(projector(s)).unwrap();
            for &i in &PolLabel::ALL {
                let rotated = rotated_pair_operator(&seed, i).unwrap();
                let ideal = pair_operator(MeasurementSetting::new(s, i));
                assert!(rotated.sub(&ideal).max_abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn rotated_operator_with_mixed_seed() {
        let seed = DensityMatrix::maximally_mixed(2);
        let op = rotated_pair_operator(&seed, PolLabel::V).unwrap();
        // ½ I₂ ⊗ diag(0, 1)
        assert_abs_diff_eq!(op[(1, 1)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(op[(3, 3)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(op[(0, 0)].re, 0.0, epsilon = 1e-15);
        assert!(op.hermitian_deviation() < 1e-15);
        assert_abs_diff_eq!(op.trace().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rotated_operator_rejects_pair_state() {
        let bell = DensityMatrix::bell_phi_plus();
        assert!(rotated_pair_operator(&bell, PolLabel::H).is_err());
    }

    #[test]
    fn waveplate_angles_implement_projections() {
        for &label in &PolLabel::ALL {
            let setting = waveplates_for(label);
            assert!(setting.hwp_angle >= 0.0 && setting.hwp_angle < PI);
            assert!(setting.qwp_angle >= 0.0 && setting.qwp_angle < PI);
            let implemented = analyzer_projector(setting);
            let target = projector(label);
            assert!(
                implemented.sub(&target).max_abs() < 1e-10,
                "waveplate identity failed for {label}"
            );
        }
        let h = waveplates_for(PolLabel::H);
        assert_abs_diff_eq!(h.hwp_angle, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h.qwp_angle, 0.0, epsilon = 1e-15);
        let d = waveplates_for(PolLabel::D);
        assert_abs_diff_eq!(d.hwp_angle, PI / 8.0, epsilon = 1e-15);
    }
}
