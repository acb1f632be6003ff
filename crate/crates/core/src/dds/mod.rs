//! Dynamical-decoupling sequences, dephasing filter functions and coherence
//! extraction.

mod coherence;
mod filter;

pub use coherence::{
    chi, chi_curve, extract_t2_z, extract_t2_z_with, sensing_sensitivity, CoherenceResult,
    NoiseSpectrum, TauRange,
};
pub use filter::{
    delta_pulse_filter, filter_function, segment_response, Block, BlockResponse, DdFilter,
    OMEGA_CAP, OMEGA_FLOOR,
};

use crate::numerics::NumericsError;
use crate::pulses::{ErrorPoint, PulseError, PulseSegment, PulseSequence};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DdsError {
    #[error("invalid decoupling spec: {0}")]
    InvalidSpec(String),
    #[error("pulses overlap or leave the window: {0}")]
    Overlap(String),
    #[error("T2 outside sweep: χ does not cross 1 on [{lo:e}, {hi:e}] s")]
    NoCrossing { lo: f64, hi: f64 },
    #[error("invalid noise spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("invalid sensing parameters: {0}")]
    InvalidSensing(String),
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// How the π pulses of a window are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DdVariant {
    /// One globally applied π pulse per cycle.
    Global,
    /// Each cycle is a block of `slots` sequential single-qubit π pulses; the
    /// modeled qubit is driven only in sub-slot `slot` (1-based).
    Sequential { slots: usize, slot: usize },
}

impl DdVariant {
    pub fn slots(&self) -> usize {
        match *self {
            DdVariant::Global => 1,
            DdVariant::Sequential { slots, .. } => slots,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DdSpec {
    pub variant: DdVariant,
    /// π pulses per window seen by the modeled qubit.
    pub pulses: usize,
    /// Window length, s.
    pub window: f64,
    pub pi_pulse: PulseSequence,
    pub errors: ErrorPoint,
}

impl DdSpec {
    pub fn with_window(&self, window: f64) -> DdSpec {
        DdSpec {
            window,
            ..self.clone()
        }
    }

    pub fn pi_duration(&self) -> f64 {
        self.pi_pulse.duration()
    }

    /// Shortest window that fits every pulse of the layout.
    pub fn min_window(&self) -> f64 {
        2.0 * self.pulses as f64 * (self.variant.slots() as f64 - 0.5) * self.pi_duration()
    }

    /// Nominal centre of cycle `j` (0-based): `(2j+1)·τ/2N`.
    pub fn cycle_time(&self, j: usize) -> f64 {
        (2 * j + 1) as f64 * self.window / (2 * self.pulses) as f64
    }

    /// Centre times of every π pulse in the window, all sub-slots included.
    pub fn all_pulse_times(&self) -> Vec<f64> {
        let tp = self.pi_duration();
        (0..self.pulses)
            .flat_map(|j| (0..self.variant.slots()).map(move |k| (j, k)))
            .map(|(j, k)| self.cycle_time(j) + k as f64 * tp)
            .collect()
    }

    /// Centre times of the π pulses acting on the modeled qubit.
    pub fn target_pulse_times(&self) -> Vec<f64> {
        let offset = match self.variant {
            DdVariant::Global => 0,
            DdVariant::Sequential { slot, .. } => slot - 1,
        };
        let tp = self.pi_duration();
        (0..self.pulses)
            .map(|j| self.cycle_time(j) + offset as f64 * tp)
            .collect()
    }

    pub fn validate(&self) -> Result<(), DdsError> {
        self.pi_pulse.validate()?;
        if !(self.window > 0.0 && self.window.is_finite()) {
            return Err(DdsError::InvalidSpec(format!(
                "window {} must be positive",
                self.window
            )));
        }
        if let DdVariant::Sequential { slots, slot } = self.variant {
            if slots == 0 || slot == 0 || slot > slots {
                return Err(DdsError::InvalidSpec(format!(
                    "sub-slot {slot} of {slots} is not addressable"
                )));
            }
        }
        if self.pulses == 0 {
            return Ok(());
        }
        let tp = self.pi_duration();
        let times = self.all_pulse_times();
        let first = times[0] - 0.5 * tp;
        let last = times[times.len() - 1] + 0.5 * tp;
        if first < -1e-15 * self.window || last > self.window * (1.0 + 1e-12) {
            return Err(DdsError::Overlap(format!(
                "pulses span [{first:e}, {last:e}] s in a {:e} s window",
                self.window
            )));
        }
        if times.windows(2).any(|w| w[1] - w[0] < tp * (1.0 - 1e-9)) {
            return Err(DdsError::Overlap(
                "adjacent pulses closer than one pulse length".into(),
            ));
        }
        Ok(())
    }

    /// Free/pulse layout seen by the modeled qubit.
    pub fn blocks(&self) -> Result<Vec<Block>, DdsError> {
        self.validate()?;
        let tp = self.pi_duration();
        let mut blocks = Vec::with_capacity(2 * self.pulses + 1);
        let mut t = 0.0;
        for c in self.target_pulse_times() {
            let start = c - 0.5 * tp;
            blocks.push(Block::Free((start - t).max(0.0)));
            blocks.push(Block::Pulse);
            t = start + tp;
        }
        blocks.push(Block::Free((self.window - t).max(0.0)));
        Ok(blocks)
    }
}

/// Full piecewise control over `[0, τ]` for the modeled qubit.
pub fn build_dd_control(spec: &DdSpec) -> Result<PulseSequence, DdsError> {
    let mut segments = Vec::new();
    for b in spec.blocks()? {
        match b {
            Block::Free(d) => segments.push(PulseSegment::free(d)),
            Block::Pulse => segments.extend_from_slice(&spec.pi_pulse.segments),
        }
    }
    Ok(PulseSequence::new(segments, spec.pi_pulse.rabi)?)
}
