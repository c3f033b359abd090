//! Ground-truth model of the two-crystal down-conversion source: the
//! two-photon polarization state as a function of pump balance, coherence,
//! and emission angle, plus the seeded (difference-frequency) response that
//! drives the stimulated-emission measurements.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::errors::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::polarization::JonesVector;
use crate::quadrature;

/// Number of Gauss–Legendre nodes used for emission-angle averaging.
const ANGLE_NODES: usize = 33;

/// Full parameterization of the simulated source. Angles are milliradians in
/// every external format; phases are radians.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    /// |α|² weight of |HH⟩ in α|HH⟩ + β|VV⟩.
    #[serde(default = "default_alpha_sq")]
    pub alpha_sq: f64,
    /// Intrinsic HH↔VV phase at zero emission angle, radians.
    #[serde(default)]
    pub phase0: f64,
    /// Coherence factor γ ∈ [0, 1] multiplying the HH↔VV off-diagonal;
    /// models compensation-crystal misalignment (1 = fully coherent).
    #[serde(default = "default_decoherence")]
    pub decoherence: f64,
    /// dφ/dθ in radians per milliradian of emission angle.
    #[serde(default = "default_phase_slope")]
    pub phase_slope: f64,
    /// Gaussian width of the phase-matching angular emission, mrad.
    #[serde(default = "default_emission_sigma")]
    pub emission_sigma_mrad: f64,
    /// Collected transverse-momentum half-range for the pair-collection
    /// optics, mrad. Derived from λ/(π ω_qst) when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collection_halfwidth_mrad: Option<f64>,
    #[serde(default = "default_wavelength")]
    pub wavelength_nm: f64,
    #[serde(default = "default_waist_qst")]
    pub waist_qst_um: f64,
    #[serde(default = "default_waist_seed")]
    pub waist_seed_um: f64,
}

fn default_alpha_sq() -> f64 {
    0.5
}
fn default_decoherence() -> f64 {
    1.0
}
fn default_phase_slope() -> f64 {
    0.312
}
fn default_emission_sigma() -> f64 {
    3.5
}
fn default_wavelength() -> f64 {
    800.0
}
fn default_waist_qst() -> f64 {
    50.0
}
fn default_waist_seed() -> f64 {
    1000.0
}

impl Default for SourceConfig {
    fn default() -> Self {
        SourceConfig {
            alpha_sq: default_alpha_sq(),
            phase0: 0.0,
            decoherence: default_decoherence(),
            phase_slope: default_phase_slope(),
            emission_sigma_mrad: default_emission_sigma(),
            collection_halfwidth_mrad: None,
            wavelength_nm: default_wavelength(),
            waist_qst_um: default_waist_qst(),
            waist_seed_um: default_waist_seed(),
        }
    }
}

impl SourceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha_sq) {
            return Err(Error::InvalidConfig(format!(
                "alpha_sq must lie in [0, 1], got {}",
                self.alpha_sq
            )));
        }
        if !(0.0..=1.0).contains(&self.decoherence) {
            return Err(Error::InvalidConfig(format!(
                "decoherence must lie in [0, 1], got {}",
                self.decoherence
            )));
        }
        for (name, value) in [
            ("emission_sigma_mrad", self.emission_sigma_mrad),
            ("wavelength_nm", self.wavelength_nm),
            ("waist_qst_um", self.waist_qst_um),
            ("waist_seed_um", self.waist_seed_um),
            ("collection_halfwidth_mrad", self.collection_halfwidth()),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be a positive finite number, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Collected half-range Δk = λ/(π ω) of the pair optics, in mrad;
    /// derived from the collection waist unless set explicitly.
    pub fn collection_halfwidth(&self) -> f64 {
        self.collection_halfwidth_mrad
            .unwrap_or_else(|| derived_halfwidth_mrad(self.wavelength_nm, self.waist_qst_um))
    }

    /// Transverse-momentum half-range of the seed beam, mrad.
    pub fn seed_halfwidth(&self) -> f64 {
        derived_halfwidth_mrad(self.wavelength_nm, self.waist_seed_um)
    }

    /// HH↔VV phase at emission angle `theta_mrad`.
    pub fn phase_at(&self, theta_mrad: f64) -> f64 {
        self.phase0 + self.phase_slope * theta_mrad
    }

    /// Width of the angular weight: emission bandwidth and collection range
    /// combined in quadrature.
    pub fn sigma_eff(&self) -> f64 {
        self.emission_sigma_mrad.hypot(self.collection_halfwidth())
    }

    /// Unnormalized angular weight, a Gaussian of width `sigma_eff`
    /// truncated at the collection half-range.
    pub fn angular_weight(&self, theta_mrad: f64) -> f64 {
        if theta_mrad.abs() > self.collection_halfwidth() {
            return 0.0;
        }
        let s = self.sigma_eff();
        (-theta_mrad * theta_mrad / (2.0 * s * s)).exp()
    }
}

/// Δk = λ/(π ω) converted to mrad.
pub fn derived_halfwidth_mrad(wavelength_nm: f64, waist_um: f64) -> f64 {
    let lambda_m = wavelength_nm * 1e-9;
    let waist_m = waist_um * 1e-6;
    lambda_m / (std::f64::consts::PI * waist_m) * 1e3
}

/// Birefringent phase and amplitude imbalance picked up by the seed before
/// the crystals.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedDistortion {
    /// H–V phase shift, radians.
    #[serde(default)]
    pub birefringent_phase: f64,
    /// |a|/|b| amplitude ratio applied to the H/V components.
    #[serde(default = "default_amp_ratio")]
    pub amp_ratio: f64,
}

fn default_amp_ratio() -> f64 {
    1.0
}

impl Default for SeedDistortion {
    fn default() -> Self {
        SeedDistortion {
            birefringent_phase: 0.0,
            amp_ratio: 1.0,
        }
    }
}

impl SeedDistortion {
    pub fn validate(&self) -> Result<()> {
        if !(self.amp_ratio > 0.0) || !self.amp_ratio.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "amp_ratio must be positive and finite, got {}",
                self.amp_ratio
            )));
        }
        Ok(())
    }

    /// Apply the distortion and renormalize.
    pub fn apply(&self, seed: &JonesVector) -> JonesVector {
        let r = self.amp_ratio.sqrt();
        let phase = Complex64::from_polar(1.0, self.birefringent_phase);
        JonesVector::normalized(seed.h * r, seed.v * phase / r)
            .expect("distorted unit vector cannot vanish")
    }
}

/// Amplitude transmissions (t_H, t_V) of the detection paths; all in (0, 1].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdlConfig {
    #[serde(default = "default_loss")]
    pub signal_loss_hv: (f64, f64),
    #[serde(default = "default_loss")]
    pub idler_loss_hv: (f64, f64),
}

fn default_loss() -> (f64, f64) {
    (1.0, 1.0)
}

impl Default for PdlConfig {
    fn default() -> Self {
        PdlConfig {
            signal_loss_hv: default_loss(),
            idler_loss_hv: default_loss(),
        }
    }
}

impl PdlConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, (th, tv)) in [
            ("signal_loss_hv", self.signal_loss_hv),
            ("idler_loss_hv", self.idler_loss_hv),
        ] {
            for t in [th, tv] {
                if !(t > 0.0 && t <= 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "{name} transmissions must lie in (0, 1], got {t}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Output of one seeded (stimulated) interaction.
#[derive(Clone, Debug)]
pub struct StimulatedResponse {
    /// Normalized polarization state of the stimulated idler after
    /// idler-path loss.
    pub idler_state: DensityMatrix,
    /// Normalized state of the seed as detected in the signal path
    /// (distortion plus signal-path loss applied).
    pub seed_detected: DensityMatrix,
    /// Relative stimulated intensity: the pre-normalization trace of the
    /// idler matrix after idler-path loss.
    pub gain: f64,
}

/// Two-photon polarization state at a single emission angle:
/// diagonal (|α|², 0, 0, |β|²) with HH↔VV coherence γ·αβ·e^{iφ(θ)} in the
/// {HH, HV, VH, VV} basis, so that arg ρ[HH,VV] is the configured phase.
pub fn true_state(cfg: &SourceConfig, theta_mrad: f64) -> Result<DensityMatrix> {
    cfg.validate()?;
    let alpha = cfg.alpha_sq.sqrt();
    let beta = (1.0 - cfg.alpha_sq).sqrt();
    let phi = cfg.phase_at(theta_mrad);
    let coherence = Complex64::from_polar(cfg.decoherence * alpha * beta, phi);
    let mut m = ComplexMatrix::zeros(4);
    m[(0, 0)] = Complex64::new(cfg.alpha_sq, 0.0);
    m[(3, 3)] = Complex64::new(1.0 - cfg.alpha_sq, 0.0);
    m[(0, 3)] = coherence;
    m[(3, 0)] = coherence.conj();
    DensityMatrix::new(m)
}

/// Emission-angle average ∫ρ(θ) w(θ) dθ over the collected range, with the
/// truncated-Gaussian weight of the source, renormalized to unit trace.
pub fn angle_averaged_state(cfg: &SourceConfig) -> Result<DensityMatrix> {
    cfg.validate()?;
    let half = cfg.collection_halfwidth();
    let mut accum = ComplexMatrix::zeros(4);
    let mut total_weight = 0.0;
    let (nodes, weights) = quadrature::gauss_legendre(ANGLE_NODES);
    for (&x, &w) in nodes.iter().zip(&weights) {
        let theta = x * half;
        let weight = w * cfg.angular_weight(theta);
        let rho = true_state(cfg, theta)?;
        accum = accum.add(&rho.matrix().scale_re(weight));
        total_weight += weight;
    }
    let mat = accum.scale_re(1.0 / total_weight).hermitian_part();
    DensityMatrix::new(mat)
}

/// Seeded response of the source at one emission angle.
///
/// The stimulating field is the distorted seed |s′⟩; the conditional idler
/// state is the contraction of the two-photon state on the signal side with
/// the conjugated seed amplitudes, which is what makes an R-polarized seed
/// stimulate an L-polarized idler. Idler-path loss is applied before the
/// gain (the pre-normalization trace) is read off.
pub fn stimulated_response(
    cfg: &SourceConfig,
    seed: &JonesVector,
    theta_mrad: f64,
    distortion: &SeedDistortion,
    pdl: &PdlConfig,
) -> Result<StimulatedResponse> {
    distortion.validate()?;
    pdl.validate()?;
    let rho = true_state(cfg, theta_mrad)?;
    let s = distortion.apply(seed).components();

    // M_{i,i'} = Σ_{j,k} conj(s_j) ρ_{(j,i),(k,i')} s_k over the signal slot.
    let mut idler = ComplexMatrix::zeros(2);
    for i in 0..2 {
        for ip in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..2 {
                for k in 0..2 {
                    acc += s[j].conj() * rho.entry(2 * j + i, 2 * k + ip) * s[k];
                }
            }
            idler[(i, ip)] = acc;
        }
    }

    let (uh, uv) = pdl.idler_loss_hv;
    let mut lossy = ComplexMatrix::zeros(2);
    let u = [uh, uv];
    for r in 0..2 {
        for c in 0..2 {
            lossy[(r, c)] = idler[(r, c)] * u[r] * u[c];
        }
    }
    let gain = lossy.trace().re;
    if gain <= 1e-15 {
        return Err(Error::DegenerateLoss(format!(
            "stimulated idler intensity vanished (gain {gain:.3e})"
        )));
    }
    let idler_state = DensityMatrix::new(lossy.scale_re(1.0 / gain).hermitian_part())?;

    let (th, tv) = pdl.signal_loss_hv;
    let detected = [s[0] * th, s[1] * tv];
    let norm: f64 = detected.iter().map(|z| z.norm_sqr()).sum();
    if norm <= 1e-30 {
        return Err(Error::DegenerateLoss(
            "seed vanished in the signal detection path".into(),
        ));
    }
    let seed_detected = DensityMatrix::new(
        ComplexMatrix::outer(&detected)
            .scale_re(1.0 / norm)
            .hermitian_part(),
    )?;

    Ok(StimulatedResponse {
        idler_state,
        seed_detected,
        gain,
    })
}
