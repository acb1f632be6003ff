//! Cryostat power budget and sample temperature under pulsed drive.
//!
//! The slow part is a duty-cycle-weighted linear rise of the cold plate; the
//! fast part superposes one double-exponential response per pulse on top of it.

use std::f64::consts::PI;

use crate::dds::{DdSpec, DdVariant};

const BOLTZMANN: f64 = 1.380_649e-23;
/// Carbon atoms per m³ of diamond (3.51 g/cm³ over 12 u).
pub const DIAMOND_NUMBER_DENSITY: f64 = 1.76e29;
/// Cold-plate linear calibration is trusted below this averaged load, W.
pub const LINEAR_REGIME_LIMIT: f64 = 50e-6;
/// Temperature at which base coherence times are quoted, K.
pub const REFERENCE_TEMP: f64 = 0.1;
/// Temperature slope of `1/T2`, (K·s)⁻¹.
pub const T2_SLOPE: f64 = 3e6;
/// Temperature slope of `1/T1`, (K·s)⁻¹.
pub const T1_SLOPE: f64 = 2.4e6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ThermalError {
    #[error("invalid thermal configuration: {0}")]
    InvalidConfig(String),
    #[error(
        "averaged load {load:e} W is outside linear calibration (< {LINEAR_REGIME_LIMIT:e} W)"
    )]
    OutsideLinearRegime { load: f64 },
    #[error("temperature {theta} K outside the low-temperature Debye regime (< {limit} K)")]
    DebyeRange { theta: f64, limit: f64 },
    #[error("temperature {theta} K below the {REFERENCE_TEMP} K reference")]
    BelowReference { theta: f64 },
    #[error("sample times must be sorted and inside [0, {max:e}] s")]
    BadSampleTimes { max: f64 },
}

/// Where a fixed attenuator sits along the drive line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// After the first cable section.
    FourKelvin,
    /// After the third section; dissipation here is the active cold-plate load.
    ColdPlate,
    /// After the fifth section, below the cold plate.
    MixingChamber,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attenuator {
    pub stage: Stage,
    pub db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FridgeConfig {
    /// Cable sections from room temperature down, m.
    pub cable_lengths: [f64; 5],
    /// Cable loss, dB/m.
    pub cable_loss: f64,
    pub attenuators: Vec<Attenuator>,
    /// Cold-plate base temperature, K.
    pub base_temp: f64,
    /// Relative cold-plate rise per μW of averaged load.
    pub coldplate_slope: f64,
    /// Sample thermalization constant, s.
    pub tau_siv: f64,
    /// Cold-plate thermalization constant, s.
    pub tau_coldplate: f64,
}

impl Default for FridgeConfig {
    fn default() -> Self {
        FridgeConfig {
            cable_lengths: [0.200, 0.290, 0.250, 0.170, 0.140],
            cable_loss: 2.0,
            attenuators: [Stage::FourKelvin, Stage::ColdPlate, Stage::MixingChamber]
                .map(|stage| Attenuator { stage, db: 20.0 })
                .to_vec(),
            base_temp: 0.1,
            coldplate_slope: 5.2e-3,
            tau_siv: 5e-6,
            tau_coldplate: 100.0,
        }
    }
}

impl FridgeConfig {
    pub fn validate(&self) -> Result<(), ThermalError> {
        let ok = self.cable_lengths.iter().all(|l| *l >= 0.0)
            && self.cable_loss >= 0.0
            && self.attenuators.iter().all(|a| a.db >= 0.0)
            && self.base_temp > 0.0
            && self.coldplate_slope >= 0.0
            && self.tau_siv > 0.0
            && self.tau_coldplate > 0.0;
        if ok {
            Ok(())
        } else {
            Err(ThermalError::InvalidConfig(format!("{self:?}")))
        }
    }

    fn attenuation_db(&self, stage: Stage) -> f64 {
        self.attenuators
            .iter()
            .filter(|a| a.stage == stage)
            .map(|a| a.db)
            .sum()
    }

    fn cable_db(&self, sections: usize) -> f64 {
        self.cable_loss * self.cable_lengths[..sections].iter().sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleConfig {
    /// Chip volume, m³.
    pub volume: f64,
    pub debye_temp: f64,
    /// Power transfer efficiency into the mechanical mode.
    pub transfer_efficiency: f64,
    pub youngs_modulus: f64,
    pub sound_speed: f64,
    pub acoustic_wavelength: f64,
    /// Fraction of delivered power that heats the sample.
    pub heating_fraction: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            volume: 5e-3 * 5e-3 * 0.5e-3,
            debye_temp: 2230.0,
            transfer_efficiency: 0.35,
            youngs_modulus: 1e12,
            sound_speed: 12000.0,
            acoustic_wavelength: 2.4e-6,
            heating_fraction: 1e-3,
        }
    }
}

impl SampleConfig {
    pub fn validate(&self) -> Result<(), ThermalError> {
        let ok = [
            self.volume,
            self.debye_temp,
            self.transfer_efficiency,
            self.youngs_modulus,
            self.sound_speed,
            self.acoustic_wavelength,
        ]
        .iter()
        .all(|v| *v > 0.0)
            && self.transfer_efficiency <= 1.0
            && (0.0..=1.0).contains(&self.heating_fraction);
        if ok {
            Ok(())
        } else {
            Err(ThermalError::InvalidConfig(format!("{self:?}")))
        }
    }
}

/// Microwave power needed at the sample for strain amplitude `strain`, W.
pub fn mw_power(strain: f64, s: &SampleConfig) -> f64 {
    s.youngs_modulus * strain * strain * s.sound_speed * s.acoustic_wavelength.powi(2)
        / (2.0 * s.transfer_efficiency)
}

/// Power leaving the cold plate and the power dissipated in the cold-plate
/// attenuator, W.
pub fn attenuation_chain(source: f64, cfg: &FridgeConfig) -> (f64, f64) {
    let above = cfg.cable_db(3) + cfg.attenuation_db(Stage::FourKelvin);
    let out = cfg.cable_db(4)
        + cfg.attenuation_db(Stage::FourKelvin)
        + cfg.attenuation_db(Stage::ColdPlate);
    let p_out = source * 10f64.powf(-out / 10.0);
    let active = source * 10f64.powf(-above / 10.0) - p_out;
    (p_out, active)
}

/// Source power that delivers `p_out` past the cold plate.
pub fn source_power_for(p_out: f64, cfg: &FridgeConfig) -> f64 {
    p_out / attenuation_chain(1.0, cfg).0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatLoad {
    pub active: f64,
    pub passive: f64,
    pub impedance: f64,
    pub sample: f64,
    pub total: f64,
}

pub const DEFAULT_PASSIVE_LOAD: f64 = 0.5e-6;

pub fn total_heat_load(
    source: f64,
    cfg: &FridgeConfig,
    s: &SampleConfig,
    passive: f64,
) -> HeatLoad {
    let (p_out, active) = attenuation_chain(source, cfg);
    let impedance = (1.0 - s.transfer_efficiency) * p_out;
    let sample = s.heating_fraction * s.transfer_efficiency * p_out;
    HeatLoad {
        active,
        passive,
        impedance,
        sample,
        total: active + passive + impedance + sample,
    }
}

/// π-pulse train as seen by the fridge: `pulses` cycles of `per_cycle`
/// back-to-back pulses of length `pulse_duration` in a window `window`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseTrain {
    pub pulses: usize,
    pub per_cycle: usize,
    pub window: f64,
    pub pulse_duration: f64,
}

impl PulseTrain {
    pub fn global(pulses: usize, window: f64, pulse_duration: f64) -> Self {
        PulseTrain {
            pulses,
            per_cycle: 1,
            window,
            pulse_duration,
        }
    }

    pub fn sequential(pulses: usize, qubits: usize, window: f64, pulse_duration: f64) -> Self {
        PulseTrain {
            pulses,
            per_cycle: qubits,
            window,
            pulse_duration,
        }
    }

    pub fn validate(&self) -> Result<(), ThermalError> {
        if !(self.window > 0.0 && self.pulse_duration >= 0.0) || self.per_cycle == 0 {
            return Err(ThermalError::InvalidConfig(format!("{self:?}")));
        }
        Ok(())
    }

    /// Start-to-centre pulse times: cycle `j` is centred at `(2j+1)τ/2N`,
    /// its sub-pulses follow at one pulse length each.
    pub fn pulse_times(&self) -> Vec<f64> {
        let n = self.pulses;
        (0..n)
            .flat_map(|j| (0..self.per_cycle).map(move |k| (j, k)))
            .map(|(j, k)| {
                (2 * j + 1) as f64 * self.window / (2 * n) as f64 + k as f64 * self.pulse_duration
            })
            .collect()
    }
}

impl From<&DdSpec> for PulseTrain {
    fn from(spec: &DdSpec) -> Self {
        PulseTrain {
            pulses: spec.pulses,
            per_cycle: match spec.variant {
                DdVariant::Global => 1,
                DdVariant::Sequential { slots, .. } => slots,
            },
            window: spec.window,
            pulse_duration: spec.pi_duration(),
        }
    }
}

pub fn duty_cycle(train: &PulseTrain) -> f64 {
    (train.pulses * train.per_cycle) as f64 * train.pulse_duration / train.window
}

/// Mean cold-plate temperature under a pulse train whose continuous-wave
/// fridge load is `load` W.
pub fn coldplate_mean_temp(
    train: &PulseTrain,
    load: f64,
    cfg: &FridgeConfig,
) -> Result<f64, ThermalError> {
    train.validate()?;
    let effective = duty_cycle(train) * load;
    if effective >= LINEAR_REGIME_LIMIT {
        return Err(ThermalError::OutsideLinearRegime { load: effective });
    }
    Ok(cfg.base_temp * (1.0 + cfg.coldplate_slope * effective * 1e6))
}

/// Low-temperature Debye heat capacity of the chip, J/K.
pub fn debye_cv(theta: f64, s: &SampleConfig) -> Result<f64, ThermalError> {
    let limit = s.debye_temp / 10.0;
    if !(0.0..limit).contains(&theta) {
        return Err(ThermalError::DebyeRange { theta, limit });
    }
    let atoms = s.volume * DIAMOND_NUMBER_DENSITY;
    Ok(12.0 * PI.powi(4) / 5.0 * (theta / s.debye_temp).powi(3) * atoms * BOLTZMANN)
}

/// Peak of `e^{−x} − e^{−9x}` sits at `x = ln 9 / 8` with value `β − β⁹`,
/// `β = 9^{−1/8}`.
pub fn response_peak_factor() -> f64 {
    let beta = 9f64.powf(-0.125);
    beta - beta.powi(9)
}

fn pulse_response(dt: f64, tau: f64) -> f64 {
    if dt <= 0.0 {
        0.0
    } else {
        (-dt / tau).exp() - (-9.0 * dt / tau).exp()
    }
}

/// Temperature at which each pulse's heat capacity is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CvReference {
    /// Sample temperature just before the pulse, including earlier pulses.
    #[default]
    PrePulse,
    /// Mean cold-plate temperature; makes the trace linear in the pulse set.
    ColdPlate,
}

/// Continuous-drive powers for one drive strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveHeat {
    /// Load seen by the cold plate while driving, W.
    pub fridge_load: f64,
    /// Power heating the sample while driving, W.
    pub sample_load: f64,
}

impl DriveHeat {
    /// Loads for a drive producing strain amplitude `strain`, with the fridge
    /// load computed from the attenuation chain.
    pub fn from_strain(strain: f64, cfg: &FridgeConfig, s: &SampleConfig) -> Self {
        let p_out = mw_power(strain, s);
        let load = total_heat_load(source_power_for(p_out, cfg), cfg, s, DEFAULT_PASSIVE_LOAD);
        DriveHeat {
            fridge_load: load.total,
            sample_load: load.sample,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalTrace {
    pub times: Vec<f64>,
    pub theta: Vec<f64>,
    /// Mean cold-plate temperature the trace rides on, K.
    pub coldplate: f64,
    /// Temperature at the end of the window, K.
    pub theta_at_window: f64,
}

/// Pulse-resolved sample temperature. Times may extend to twice the window.
pub fn theta_siv_trace(
    train: &PulseTrain,
    heat: &DriveHeat,
    cfg: &FridgeConfig,
    s: &SampleConfig,
    times: &[f64],
    cv_ref: CvReference,
) -> Result<ThermalTrace, ThermalError> {
    cfg.validate()?;
    s.validate()?;
    train.validate()?;
    let max = 2.0 * train.window;
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|t| !(0.0..=max).contains(t)) {
        return Err(ThermalError::BadSampleTimes { max });
    }
    let coldplate = coldplate_mean_temp(train, heat.fridge_load, cfg)?;
    let beta = 9f64.powf(-0.125);
    let energy = 9.0 * heat.sample_load * train.pulse_duration / (8.0 * beta);
    let tau = cfg.tau_siv;
    let pulses = train.pulse_times();
    let mut kicks: Vec<(f64, f64)> = Vec::with_capacity(pulses.len());
    for &t0 in &pulses {
        let reference = match cv_ref {
            CvReference::ColdPlate => coldplate,
            CvReference::PrePulse => {
                coldplate
                    + kicks
                        .iter()
                        .map(|(t, a)| a * pulse_response(t0 - t, tau))
                        .sum::<f64>()
            }
        };
        kicks.push((t0, energy / debye_cv(reference, s)?));
    }
    let at = |t: f64| {
        coldplate
            + kicks
                .iter()
                .map(|(t0, a)| a * pulse_response(t - t0, tau))
                .sum::<f64>()
    };
    Ok(ThermalTrace {
        times: times.to_vec(),
        theta: times.iter().map(|&t| at(t)).collect(),
        coldplate,
        theta_at_window: at(train.window),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherenceKind {
    T1,
    T2,
}

/// Coherence time at sample temperature `theta`, given its value at the
/// reference temperature.
pub fn coherence_at_temp(base: f64, theta: f64, kind: CoherenceKind) -> Result<f64, ThermalError> {
    if theta < REFERENCE_TEMP {
        return Err(ThermalError::BelowReference { theta });
    }
    let slope = match kind {
        CoherenceKind::T1 => T1_SLOPE,
        CoherenceKind::T2 => T2_SLOPE,
    };
    Ok(base / (1.0 + base * (theta - REFERENCE_TEMP) * slope))
}
