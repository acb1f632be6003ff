//! Run configuration: one TOML table per stage, every key optional.
//!
//! Parsing is strict. Unknown sections or keys are rejected so that typos in
//! sweep scripts fail loudly instead of silently running defaults.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use hetq_core::dds::{DdVariant, NoiseSpectrum, TauRange};
use hetq_core::grape::GrapeConfig;
use hetq_core::numerics::OptimizerOptions;
use hetq_core::pipeline::{GlobalDrive, PipelineConfig, SequentialDrive};
use hetq_core::pulses::{linspace, ErrorGrid, ErrorPoint};
use hetq_core::siv::SivParams;
use hetq_core::thermal::{CvReference, FridgeConfig, SampleConfig};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    StrainWindow,
    Rabi,
    Composite,
    Grape,
    Filter,
    Coherence,
    Thermal,
    Links,
    Compile,
    FullPipeline,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::StrainWindow => "strain-window",
            Stage::Rabi => "rabi",
            Stage::Composite => "composite",
            Stage::Grape => "grape",
            Stage::Filter => "filter",
            Stage::Coherence => "coherence",
            Stage::Thermal => "thermal",
            Stage::Links => "links",
            Stage::Compile => "compile",
            Stage::FullPipeline => "full-pipeline",
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    pub siv: SivSection,
    pub strain_window: StrainWindowSection,
    pub rabi: RabiSection,
    pub composite: CompositeSection,
    pub grape: GrapeSection,
    pub noise: NoiseSection,
    pub dd: DdSection,
    pub filter: FilterSection,
    pub coherence: CoherenceSection,
    pub thermal: ThermalSection,
    pub entangle: EntangleSection,
    pub links: LinksSection,
    pub compile: CompileSection,
    pub pipeline: PipelineSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub stage: Option<Stage>,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SivSection {
    pub so_ground: f64,
    pub so_excited: f64,
    pub gamma_orbital: f64,
    pub gamma_spin: f64,
    pub field: f64,
    pub field_dir: [f64; 3],
    pub strain_ground: f64,
    pub strain_excited: f64,
    pub bias_sigma: f64,
}

impl Default for SivSection {
    fn default() -> Self {
        let p = SivParams::default();
        SivSection {
            so_ground: p.so_ground,
            so_excited: p.so_excited,
            gamma_orbital: p.gamma_orbital,
            gamma_spin: p.gamma_spin,
            field: p.field,
            field_dir: p.field_dir,
            strain_ground: p.strain_ground,
            strain_excited: p.strain_excited,
            bias_sigma: p.bias_sigma,
        }
    }
}

impl SivSection {
    pub fn params(&self) -> SivParams {
        SivParams {
            so_ground: self.so_ground,
            so_excited: self.so_excited,
            gamma_orbital: self.gamma_orbital,
            gamma_spin: self.gamma_spin,
            field: self.field,
            field_dir: self.field_dir,
            strain_ground: self.strain_ground,
            strain_excited: self.strain_excited,
            bias_sigma: self.bias_sigma,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrainWindowSection {
    pub centers: usize,
    /// Laser position relative to the unstrained line, Hz.
    pub laser_offset: f64,
    pub scan: [f64; 2],
    pub scan_step: f64,
}

impl Default for StrainWindowSection {
    fn default() -> Self {
        StrainWindowSection {
            centers: 11,
            laser_offset: -60e9,
            scan: [-6e-4, 6e-4],
            scan_step: 4e-7,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RabiSection {
    /// Field used for the driven simulation, T; replaces `siv.field`.
    pub field: f64,
    pub static_strain: f64,
    pub drive_strain: f64,
    pub duration: f64,
    /// Integration steps per drive period.
    pub steps_per_cycle: f64,
    /// Trace rows written (and fitted).
    pub samples: usize,
}

impl Default for RabiSection {
    fn default() -> Self {
        RabiSection {
            field: 0.25,
            static_strain: 4e-6,
            drive_strain: 1.56e-6,
            duration: 60e-9,
            steps_per_cycle: 50.0,
            samples: 400,
        }
    }
}

/// A uniform square error grid `[lo, hi]²` with `points` per axis.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for Axis {
    fn default() -> Self {
        Axis {
            lo: -0.3,
            hi: 0.3,
            points: 11,
        }
    }
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.points)
    }

    pub fn grid(&self) -> Result<ErrorGrid, CliError> {
        Ok(ErrorGrid::uniform(self.values(), self.values()).map_err(hetq_core::Error::from)?)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompositeSection {
    pub kinds: Vec<String>,
    pub theta: f64,
    pub phi: f64,
    pub rabi: f64,
    pub grid: Axis,
}

impl Default for CompositeSection {
    fn default() -> Self {
        CompositeSection {
            kinds: ["bare", "bb1", "corpse", "rcinbb"]
                .map(String::from)
                .to_vec(),
            theta: PI,
            phi: 0.0,
            rabi: 200e6,
            grid: Axis::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrapeSection {
    pub theta: f64,
    pub phi: f64,
    pub segments: usize,
    pub rabi: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub grid: Axis,
    /// Peak weight of the Gaussian grid weighting.
    pub weight_peak: f64,
    pub weight_width: [f64; 2],
    pub max_iters: usize,
    pub grad_tol: f64,
    pub fd_step: f64,
    pub init_jitter: f64,
}

impl Default for GrapeSection {
    fn default() -> Self {
        let d = GrapeConfig::default();
        GrapeSection {
            theta: d.theta,
            phi: d.phi,
            segments: d.segments,
            rabi: d.rabi,
            t_min: d.t_min,
            t_max: d.t_max,
            grid: Axis::default(),
            weight_peak: 1.90,
            weight_width: [0.22, 0.22],
            max_iters: d.optimizer.max_iters,
            grad_tol: d.optimizer.grad_tol,
            fd_step: d.fd_step,
            init_jitter: d.init_jitter,
        }
    }
}

impl GrapeSection {
    pub fn config(&self, seed: u64) -> Result<GrapeConfig, CliError> {
        let grid = ErrorGrid::gaussian(
            self.grid.values(),
            self.grid.values(),
            self.weight_peak,
            ErrorPoint::NONE,
            (self.weight_width[0], self.weight_width[1]),
        )
        .map_err(hetq_core::Error::from)?;
        Ok(GrapeConfig {
            theta: self.theta,
            phi: self.phi,
            segments: self.segments,
            rabi: self.rabi,
            t_min: self.t_min,
            t_max: self.t_max,
            grid,
            optimizer: OptimizerOptions {
                max_iters: self.max_iters,
                grad_tol: self.grad_tol,
                ..OptimizerOptions::default()
            },
            fd_step: self.fd_step,
            seed,
            init_jitter: self.init_jitter,
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    pub c0: f64,
    pub c1: f64,
    pub omega0: f64,
    pub omega1: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        let n = NoiseSpectrum::default();
        NoiseSection {
            c0: n.c0,
            c1: n.c1,
            omega0: n.omega0,
            omega1: n.omega1,
        }
    }
}

impl NoiseSection {
    pub fn spectrum(&self) -> NoiseSpectrum {
        NoiseSpectrum {
            c0: self.c0,
            c1: self.c1,
            omega0: self.omega0,
            omega1: self.omega1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantName {
    Global,
    Sequential,
}

/// Decoupling sequence shared by the filter, coherence, thermal and links stages.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DdSection {
    pub variant: VariantName,
    /// Sequential slots per cycle.
    pub slots: usize,
    /// 1-based slot of the modeled qubit.
    pub slot: usize,
    /// `bare`, `bb1`, `corpse`, `rcinbb` or `grape` (optimized with `[grape]`).
    pub pulse: String,
    /// Pulse table file; overrides `pulse` when set.
    pub pulse_table: Option<PathBuf>,
    pub rabi: f64,
    pub pulses: Vec<usize>,
    pub window: f64,
    pub amplitude_error: f64,
    pub detuning_error: f64,
}

impl Default for DdSection {
    fn default() -> Self {
        DdSection {
            variant: VariantName::Global,
            slots: 121,
            slot: 1,
            pulse: "rcinbb".into(),
            pulse_table: None,
            rabi: 200e6,
            pulses: vec![1, 2, 4, 8],
            window: 5e-3,
            amplitude_error: 0.0,
            detuning_error: 0.0,
        }
    }
}

impl DdSection {
    pub fn variant(&self) -> DdVariant {
        match self.variant {
            VariantName::Global => DdVariant::Global,
            VariantName::Sequential => DdVariant::Sequential {
                slots: self.slots,
                slot: self.slot,
            },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterSection {
    /// Range of ωτ covered, log-spaced.
    pub omega_tau: [f64; 2],
    pub points: usize,
}

impl Default for FilterSection {
    fn default() -> Self {
        FilterSection {
            omega_tau: [1e-2, 1e3],
            points: 501,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoherenceSection {
    pub grid: Axis,
    pub tau: [f64; 2],
}

impl Default for CoherenceSection {
    fn default() -> Self {
        let t = TauRange::default();
        CoherenceSection {
            grid: Axis::default(),
            tau: [t.lo, t.hi],
        }
    }
}

impl CoherenceSection {
    pub fn tau_range(&self) -> TauRange {
        TauRange {
            lo: self.tau[0],
            hi: self.tau[1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CvName {
    PrePulse,
    Coldplate,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermalSection {
    pub base_temp: f64,
    pub coldplate_slope: f64,
    pub tau_siv: f64,
    pub tau_coldplate: f64,
    pub cable_loss: f64,
    pub attenuator_db: [f64; 3],
    pub heating_fraction: f64,
    pub transfer_efficiency: f64,
    pub cv_reference: CvName,
    /// Strain amplitude of the global drive.
    pub global_strain: f64,
    /// Global pulse length charged to the fridge, s.
    pub global_pulse: f64,
    /// Sequential bare pulse length, s.
    pub sequential_pulse: f64,
    /// Fridge load while a sequential drive is on, W.
    pub sequential_load: f64,
    /// Decoupling window for the trace and summary, s.
    pub window: f64,
    pub trace_points: usize,
    /// Uncorrected T2 reported alongside each summary row, s.
    pub t2_base: f64,
}

impl Default for ThermalSection {
    fn default() -> Self {
        let (f, s) = (FridgeConfig::default(), SampleConfig::default());
        ThermalSection {
            base_temp: f.base_temp,
            coldplate_slope: f.coldplate_slope,
            tau_siv: f.tau_siv,
            tau_coldplate: f.tau_coldplate,
            cable_loss: f.cable_loss,
            attenuator_db: [20.0; 3],
            heating_fraction: s.heating_fraction,
            transfer_efficiency: s.transfer_efficiency,
            cv_reference: CvName::PrePulse,
            global_strain: 1.56e-6,
            global_pulse: 150e-9,
            sequential_pulse: 10e-9,
            sequential_load: 65e-6,
            window: 0.2e-3,
            trace_points: 2001,
            t2_base: 1e-3,
        }
    }
}

impl ThermalSection {
    pub fn fridge(&self) -> FridgeConfig {
        let mut f = FridgeConfig {
            base_temp: self.base_temp,
            coldplate_slope: self.coldplate_slope,
            tau_siv: self.tau_siv,
            tau_coldplate: self.tau_coldplate,
            cable_loss: self.cable_loss,
            ..FridgeConfig::default()
        };
        for (a, db) in f.attenuators.iter_mut().zip(self.attenuator_db) {
            a.db = db;
        }
        f
    }

    pub fn sample(&self) -> SampleConfig {
        SampleConfig {
            heating_fraction: self.heating_fraction,
            transfer_efficiency: self.transfer_efficiency,
            ..SampleConfig::default()
        }
    }

    pub fn cv_reference(&self) -> CvReference {
        match self.cv_reference {
            CvName::PrePulse => CvReference::PrePulse,
            CvName::Coldplate => CvReference::ColdPlate,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntangleSection {
    pub alpha: f64,
    pub eta: f64,
    /// Decoupling window(s), s.
    pub t_dds: OneOrMany,
    pub t_cmpl: f64,
    pub max_attempts: u64,
    pub t1_base: f64,
}

impl Default for EntangleSection {
    fn default() -> Self {
        EntangleSection {
            alpha: 1e-4,
            eta: 1e-2,
            t_dds: OneOrMany::Many(vec![0.2e-3, 0.8e-3]),
            t_cmpl: 10e-6,
            max_attempts: 1 << 20,
            t1_base: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinksSection {
    pub grid: Axis,
    /// π pulses per window.
    pub pulses: usize,
    /// Each sequential pulse is calibrated to its qubit and sees no error.
    pub calibrated: bool,
}

impl Default for LinksSection {
    fn default() -> Self {
        LinksSection {
            grid: Axis::default(),
            pulses: 2,
            calibrated: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompileSection {
    pub n_a: usize,
    pub n_b: usize,
    /// Slot length of the faster register, s.
    pub base_step: f64,
    pub window_periods: usize,
    /// Laser-crossing strains in sweep order; taken from the strain-window
    /// stage when empty.
    pub setpoints: Vec<f64>,
    pub dwell: f64,
    pub max_slope: f64,
    pub emission_rate: f64,
    pub waveform_points: usize,
}

impl Default for CompileSection {
    fn default() -> Self {
        CompileSection {
            n_a: 5,
            n_b: 4,
            base_step: 1e-6,
            window_periods: 1,
            setpoints: Vec::new(),
            dwell: 1e-6,
            max_slope: 1e3,
            emission_rate: 1e8,
            waveform_points: 1001,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineSection {
    pub grid: Axis,
    pub pulse_counts: Vec<usize>,
    pub calibrated: bool,
}

impl Default for PipelineSection {
    fn default() -> Self {
        PipelineSection {
            grid: Axis::default(),
            pulse_counts: vec![2, 4, 8, 16],
            calibrated: true,
        }
    }
}

impl RunConfig {
    pub fn pipeline(&self, seed: u64) -> Result<PipelineConfig, CliError> {
        let th = &self.thermal;
        let e = &self.entangle;
        Ok(PipelineConfig {
            amplitude_axis: self.pipeline.grid.values(),
            detuning_axis: self.pipeline.grid.values(),
            pulse_counts: self.pipeline.pulse_counts.clone(),
            windows: e.t_dds.values(),
            t_cmpl: e.t_cmpl,
            alpha: e.alpha,
            eta: e.eta,
            max_attempts: e.max_attempts,
            seed,
            t1_base: e.t1_base,
            siv: self.siv.params(),
            global: GlobalDrive {
                grape: self.grape.config(seed)?,
                thermal_pulse: th.global_pulse,
                strain: th.global_strain,
            },
            sequential: SequentialDrive {
                pulse_duration: th.sequential_pulse,
                fridge_load: th.sequential_load,
                calibrated: self.pipeline.calibrated,
            },
            fridge: th.fridge(),
            sample: th.sample(),
            cv_reference: th.cv_reference(),
            noise: self.noise.spectrum(),
            tau_range: self.coherence.tau_range(),
        })
    }
}

/// Reads a config file and applies `section.key=value` overrides. Values are
/// parsed as TOML, falling back to a bare string.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig, CliError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    let origin = path.map_or_else(|| "<defaults>".to_string(), |p| p.display().to_string());
    // Parse once as-is so syntax and unknown-key errors carry line numbers.
    let parsed: RunConfig =
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{origin}: {e}")))?;
    if overrides.is_empty() {
        return Ok(parsed);
    }
    let mut table: toml::Table =
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{origin}: {e}")))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Usage(format!("override: {e}")))
}

fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let (path, raw) = spec.split_once('=').ok_or_else(|| {
        CliError::Usage(format!(
            "override `{spec}` is not of the form section.key=value"
        ))
    })?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(CliError::Usage(format!(
            "override `{spec}` has an empty key"
        )));
    }
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.trim().to_string()),
    };
    let (last, parents) = keys.split_last().expect("non-empty");
    let mut cur = table;
    for k in parents {
        let entry = cur
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Usage(format!("override `{spec}`: `{k}` is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}
