//! Raw-data simulation: Poisson coincidence counts for the single-photon
//! tomography arm and classical intensities for the seeded arm, plus the CSV
//! schema both are stored in.

use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::errors::{Error, Result};
use crate::polarization::{pair_operator, projector, MeasurementSetting, PolLabel};
use crate::source::{stimulated_response, PdlConfig, SeedDistortion, SourceConfig};

/// Acquisition settings for coincidence counting.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QstAcquisitionConfig {
    #[serde(default = "default_pair_rate")]
    pub pair_rate_hz: f64,
    #[serde(default = "default_integration")]
    pub integration_s: f64,
    #[serde(default = "default_efficiency")]
    pub efficiency_pair: f64,
    /// Additive accidental/dark-count background, counts per second per
    /// outcome. Off by default.
    #[serde(default)]
    pub background_rate_hz: f64,
    #[serde(default)]
    pub seed_rng: u64,
    /// Emit exact expectation values instead of Poisson draws.
    #[serde(default)]
    pub noiseless: bool,
}

fn default_pair_rate() -> f64 {
    15_000.0
}
fn default_integration() -> f64 {
    1.0
}
fn default_efficiency() -> f64 {
    0.15
}

impl Default for QstAcquisitionConfig {
    fn default() -> Self {
        QstAcquisitionConfig {
            pair_rate_hz: default_pair_rate(),
            integration_s: default_integration(),
            efficiency_pair: default_efficiency(),
            background_rate_hz: 0.0,
            seed_rng: 0,
            noiseless: false,
        }
    }
}

impl QstAcquisitionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.pair_rate_hz > 0.0) {
            return Err(Error::InvalidConfig("pair_rate_hz must be positive".into()));
        }
        if !(self.integration_s > 0.0) {
            return Err(Error::InvalidConfig("integration_s must be positive".into()));
        }
        if !(self.efficiency_pair > 0.0 && self.efficiency_pair <= 1.0) {
            return Err(Error::InvalidConfig(
                "efficiency_pair must lie in (0, 1]".into(),
            ));
        }
        if self.background_rate_hz < 0.0 {
            return Err(Error::InvalidConfig(
                "background_rate_hz must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// Expected detected pairs per basis pair.
    pub fn expected_total(&self) -> f64 {
        self.pair_rate_hz * self.integration_s * self.efficiency_pair
    }
}

/// Acquisition settings for the seeded (intensity) measurements.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetAcquisitionConfig {
    #[serde(default = "default_coupling")]
    pub coupling_signal: f64,
    #[serde(default = "default_coupling")]
    pub coupling_idler: f64,
    /// Relative Gaussian noise on every photodiode reading.
    #[serde(default = "default_intensity_noise")]
    pub intensity_noise_rel: f64,
    #[serde(default)]
    pub seed_rng: u64,
}

fn default_coupling() -> f64 {
    1.0
}
fn default_intensity_noise() -> f64 {
    0.005
}

impl Default for SetAcquisitionConfig {
    fn default() -> Self {
        SetAcquisitionConfig {
            coupling_signal: default_coupling(),
            coupling_idler: default_coupling(),
            intensity_noise_rel: default_intensity_noise(),
            seed_rng: 0,
        }
    }
}

impl SetAcquisitionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.coupling_signal > 0.0) || !(self.coupling_idler > 0.0) {
            return Err(Error::InvalidConfig(
                "coupling efficiencies must be positive".into(),
            ));
        }
        if self.intensity_noise_rel < 0.0 {
            return Err(Error::InvalidConfig(
                "intensity_noise_rel must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    pub fn noiseless(&self) -> Self {
        SetAcquisitionConfig {
            intensity_noise_rel: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    QstCount,
    SetIntensity,
    SeedIntensity,
}

impl std::fmt::Display for RecordKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RecordKind::QstCount => "qst_count",
            RecordKind::SetIntensity => "set_intensity",
            RecordKind::SeedIntensity => "seed_intensity",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for RecordKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qst_count" => Ok(RecordKind::QstCount),
            "set_intensity" => Ok(RecordKind::SetIntensity),
            "seed_intensity" => Ok(RecordKind::SeedIntensity),
            other => Err(Error::InvalidConfig(format!("unknown record kind '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Port {
    Transmitted,
    Reflected,
}

impl std::fmt::Display for Port {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Port::Transmitted => "transmitted",
            Port::Reflected => "reflected",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for Port {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transmitted" => Ok(Port::Transmitted),
            "reflected" => Ok(Port::Reflected),
            other => Err(Error::InvalidConfig(format!("unknown port '{other}'"))),
        }
    }
}

/// One acquisition row. For seeded records the signal slot of the setting
/// holds the seed polarization and the idler slot the analyzer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub kind: RecordKind,
    pub setting: MeasurementSetting,
    pub port: Port,
    pub value: f64,
    pub theta_mrad: f64,
    pub rng_seed: u64,
}

/// Deterministic per-stream RNG: every (seed, stream index) pair owns an
/// independent generator, so record values do not depend on emission order.
fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut x = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    // splitmix64 finalizer
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^= x >> 31;
    ChaCha12Rng::seed_from_u64(x)
}

fn poisson_draw(rng: &mut ChaCha12Rng, mean: f64) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    let dist = Poisson::new(mean).expect("positive mean");
    dist.sample(rng)
}

fn noisy_intensity(rng: &mut ChaCha12Rng, value: f64, rel_noise: f64) -> f64 {
    if rel_noise <= 0.0 || value == 0.0 {
        return value.max(0.0);
    }
    let dist = Normal::new(1.0, rel_noise).expect("valid normal");
    (value * dist.sample(rng)).max(0.0)
}

/// Simulate coincidence counts for all nine waveplate basis pairs.
///
/// Each basis pair produces four outcome records, one per combination of the
/// two PBS ports, labeled by the projector pair they realize. Outcome means
/// are `pair_rate · integration · efficiency · Tr[Ô ρ]` and are sampled
/// Poisson per outcome from an RNG stream indexed by (seed, setting).
pub fn simulate_qst_counts(
    rho: &DensityMatrix,
    cfg: &QstAcquisitionConfig,
) -> Result<Vec<MeasurementRecord>> {
    cfg.validate()?;
    if rho.dim() != 4 {
        return Err(Error::InvalidState(
            "coincidence simulation needs a two-qubit state".into(),
        ));
    }
    let scale = cfg.expected_total();
    let background = cfg.background_rate_hz * cfg.integration_s;
    let mut records = Vec::with_capacity(36);
    for (index, setting) in MeasurementSetting::all_36().into_iter().enumerate() {
        let op = pair_operator(setting);
        let prob = op.trace_product(rho.matrix()).re.max(0.0);
        let mean = scale * prob + background;
        let value = if cfg.noiseless {
            mean
        } else {
            let mut rng = stream_rng(cfg.seed_rng, index as u64);
            poisson_draw(&mut rng, mean)
        };
        records.push(MeasurementRecord {
            kind: RecordKind::QstCount,
            setting,
            port: Port::Transmitted,
            value,
            theta_mrad: 0.0,
            rng_seed: cfg.seed_rng,
        });
    }
    Ok(records)
}

/// Simulate one seeded acquisition: 12 stimulated-intensity records (six
/// analyzers, both PBS ports) plus the two signal-PBS seed records whose sum
/// normalizes the stimulated data.
///
/// A source that cannot respond to the seed (zero stimulated gain, e.g. a
/// pure |VV⟩ source seeded with H) yields zero stimulated intensities rather
/// than an error so that sweep endpoints stay simulable.
pub fn simulate_set_intensities(
    cfg_src: &SourceConfig,
    seed_label: PolLabel,
    theta_mrad: f64,
    distortion: &SeedDistortion,
    pdl: &PdlConfig,
    acq: &SetAcquisitionConfig,
) -> Result<Vec<MeasurementRecord>> {
    acq.validate()?;
    let seed_jones = crate::polarization::jones_of(seed_label);
    let (idler_state, seed_detected, gain) =
        match stimulated_response(cfg_src, &seed_jones, theta_mrad, distortion, pdl) {
            Ok(r) => (Some(r.idler_state), r.seed_detected, r.gain),
            Err(Error::DegenerateLoss(_)) => {
                // No stimulated output; the detected seed is unaffected by
                // the idler path.
                distortion.validate()?;
                pdl.validate()?;
                let s = distortion.apply(&seed_jones).components();
                let (th, tv) = pdl.signal_loss_hv;
                let detected = [s[0] * th, s[1] * tv];
                let norm: f64 = detected.iter().map(|z| z.norm_sqr()).sum();
                let seed_detected = DensityMatrix::new(
                    crate::matrix::ComplexMatrix::outer(&detected)
                        .scale_re(1.0 / norm)
                        .hermitian_part(),
                )?;
                (None, seed_detected, 0.0)
            }
            Err(e) => return Err(e),
        };

    let seed_index = PolLabel::ALL.iter().position(|&l| l == seed_label).unwrap() as u64;
    let mut records = Vec::with_capacity(14);
    for (a_idx, &analyzer) in PolLabel::ALL.iter().enumerate() {
        for (p_idx, port) in [Port::Transmitted, Port::Reflected].into_iter().enumerate() {
            let label = if port == Port::Transmitted {
                analyzer
            } else {
                analyzer.orthogonal()
            };
            let raw = match &idler_state {
                Some(state) => {
                    let p = projector(label).trace_product(state.matrix()).re.max(0.0);
                    acq.coupling_idler * gain * p
                }
                None => 0.0,
            };
            let stream = 100 * seed_index + 2 * a_idx as u64 + p_idx as u64;
            let mut rng = stream_rng(acq.seed_rng, stream);
            records.push(MeasurementRecord {
                kind: RecordKind::SetIntensity,
                setting: MeasurementSetting::new(seed_label, analyzer),
                port,
                value: noisy_intensity(&mut rng, raw, acq.intensity_noise_rel),
                theta_mrad,
                rng_seed: acq.seed_rng,
            });
        }
    }

    // Signal-PBS seed intensities with an H/V analysis setting.
    for (p_idx, (port, label)) in [
        (Port::Transmitted, PolLabel::H),
        (Port::Reflected, PolLabel::V),
    ]
    .into_iter()
    .enumerate()
    {
        let p = projector(label)
            .trace_product(seed_detected.matrix())
            .re
            .max(0.0);
        let raw = acq.coupling_signal * p;
        let stream = 100 * seed_index + 50 + p_idx as u64;
        let mut rng = stream_rng(acq.seed_rng, stream);
        records.push(MeasurementRecord {
            kind: RecordKind::SeedIntensity,
            setting: MeasurementSetting::new(seed_label, PolLabel::H),
            port,
            value: noisy_intensity(&mut rng, raw, acq.intensity_noise_rel),
            theta_mrad,
            rng_seed: acq.seed_rng,
        });
    }
    Ok(records)
}

/// Classical intensity analysis of the coupled seed through all six
/// analyzers (both ports): the single-photon-tomography data used to build
/// rotated measurement operators.
///
/// The returned settings carry the analyzer in the idler slot and H as a
/// placeholder seed label; pipelines tag the signal slot with the seed that
/// produced the state.
pub fn measure_seed_singlephoton(
    distorted_seed: &DensityMatrix,
    acq: &SetAcquisitionConfig,
) -> Result<Vec<MeasurementRecord>> {
    acq.validate()?;
    if distorted_seed.dim() != 2 {
        return Err(Error::InvalidState(
            "seed tomography needs a single-qubit state".into(),
        ));
    }
    let total: f64 = (0..2).map(|i| distorted_seed.entry(i, i).re).sum();
    if total <= 0.0 {
        return Err(Error::InvalidState("all-zero seed intensities".into()));
    }
    let mut records = Vec::with_capacity(12);
    for (a_idx, &analyzer) in PolLabel::ALL.iter().enumerate() {
        for (p_idx, port) in [Port::Transmitted, Port::Reflected].into_iter().enumerate() {
            let label = if port == Port::Transmitted {
                analyzer
            } else {
                analyzer.orthogonal()
            };
            let p = projector(label)
                .trace_product(distorted_seed.matrix())
                .re
                .max(0.0);
            let raw = acq.coupling_signal * p;
            let stream = 1000 + 2 * a_idx as u64 + p_idx as u64;
            let mut rng = stream_rng(acq.seed_rng, stream);
            records.push(MeasurementRecord {
                kind: RecordKind::SeedIntensity,
                setting: MeasurementSetting::new(PolLabel::H, analyzer),
                port,
                value: noisy_intensity(&mut rng, raw, acq.intensity_noise_rel),
                theta_mrad: 0.0,
                rng_seed: acq.seed_rng,
            });
        }
    }
    Ok(records)
}

pub const CSV_HEADER: &str = "kind,signal,idler,port,value,theta_mrad,rng_seed";

/// Write records in the flat CSV schema. Counts are written as integers,
/// intensities with nine significant digits.
pub fn write_records_csv<W: Write>(mut w: W, records: &[MeasurementRecord]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        let value = match r.kind {
            RecordKind::QstCount => format!("{}", r.value.round() as u64),
            _ => format!("{:.8e}", r.value),
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.kind, r.setting.signal, r.setting.idler, r.port, value, r.theta_mrad, r.rng_seed
        )?;
    }
    Ok(())
}

pub fn write_records_file(path: &std::path::Path, records: &[MeasurementRecord]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_records_csv(std::io::BufWriter::new(file), records)
}

/// Parse records from the CSV schema; errors carry the 1-based row number of
/// the offending line (header is row 1).
pub fn read_records_csv<R: Read>(reader: R) -> Result<Vec<MeasurementRecord>> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    {
        let headers = csv_reader
            .headers()
            .map_err(|e| Error::Data {
                row: 1,
                message: e.to_string(),
            })?
            .clone();
        let expected: Vec<&str> = CSV_HEADER.split(',').collect();
        let got: Vec<&str> = headers.iter().collect();
        if got != expected {
            return Err(Error::Data {
                row: 1,
                message: format!("bad header: expected '{CSV_HEADER}', got '{}'", got.join(",")),
            });
        }
    }
    let mut out = Vec::new();
    for (idx, row) in csv_reader.records().enumerate() {
        let row_no = idx + 2;
        let record = row.map_err(|e| Error::Data {
            row: row_no,
            message: e.to_string(),
        })?;
        if record.len() != 7 {
            return Err(Error::Data {
                row: row_no,
                message: format!("expected 7 fields, got {}", record.len()),
            });
        }
        let field = |i: usize| record.get(i).unwrap_or("");
        let parse_err = |message: String| Error::Data {
            row: row_no,
            message,
        };
        let kind: RecordKind = field(0)
            .parse()
            .map_err(|e: Error| parse_err(e.to_string()))?;
        let signal: PolLabel = field(1)
            .parse()
            .map_err(|e: Error| parse_err(e.to_string()))?;
        let idler: PolLabel = field(2)
            .parse()
            .map_err(|e: Error| parse_err(e.to_string()))?;
        let port: Port = field(3)
            .parse()
            .map_err(|e: Error| parse_err(e.to_string()))?;
        let value: f64 = field(4)
            .parse()
            .map_err(|e| parse_err(format!("bad value: {e}")))?;
        if !value.is_finite() || value < 0.0 {
            return Err(parse_err(format!("value must be nonnegative, got {value}")));
        }
        let theta_mrad: f64 = field(5)
            .parse()
            .map_err(|e| parse_err(format!("bad theta_mrad: {e}")))?;
        let rng_seed: u64 = field(6)
            .parse()
            .map_err(|e| parse_err(format!("bad rng_seed: {e}")))?;
        out.push(MeasurementRecord {
            kind,
            setting: MeasurementSetting::new(signal, idler),
            port,
            value,
            theta_mrad,
            rng_seed,
        });
    }
    Ok(out)
}

pub fn read_records_file(path: &std::path::Path) -> Result<Vec<MeasurementRecord>> {
    let file = std::fs::File::open(path)?;
    read_records_csv(std::io::BufReader::new(file))
}
