//! Single-qubit rotations with amplitude and off-resonance errors, composite
//! pulses and gate-infidelity maps.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::numerics::{rotation, Mat2};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PulseError {
    #[error("rotation angle {0} outside (0, 2π]")]
    AngleOutOfRange(f64),
    #[error("invalid pulse sequence: {0}")]
    InvalidSequence(String),
    #[error("error grid is empty or malformed: {0}")]
    BadGrid(String),
    #[error("unknown composite pulse `{0}` (expected bb1, corpse or rcinbb)")]
    UnknownKind(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Systematic control errors of one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorPoint {
    /// Fractional Rabi-strength error.
    pub amplitude: f64,
    /// Drive detuning in units of the nominal Rabi strength.
    pub detuning: f64,
}

impl ErrorPoint {
    pub const NONE: ErrorPoint = ErrorPoint {
        amplitude: 0.0,
        detuning: 0.0,
    };

    pub fn new(amplitude: f64, detuning: f64) -> Self {
        ErrorPoint {
            amplitude,
            detuning,
        }
    }
}

/// Piecewise-constant drive segment. `amplitude` is relative to the nominal
/// Rabi strength; 0 means free evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSegment {
    pub duration: f64,
    pub phase: f64,
    pub amplitude: f64,
}

impl PulseSegment {
    pub fn drive(duration: f64, phase: f64) -> Self {
        PulseSegment {
            duration,
            phase,
            amplitude: 1.0,
        }
    }

    pub fn free(duration: f64) -> Self {
        PulseSegment {
            duration,
            phase: 0.0,
            amplitude: 0.0,
        }
    }

    pub fn is_free(&self) -> bool {
        self.amplitude == 0.0
    }

    /// Bloch-vector generator of this segment under `e`, scaled so that the
    /// propagator is a rotation by `|n|·Ω·duration`.
    pub fn generator(&self, e: ErrorPoint) -> [f64; 3] {
        let a = (1.0 + e.amplitude) * self.amplitude;
        [a * self.phase.cos(), a * self.phase.sin(), e.detuning]
    }

    pub fn unitary(&self, rabi: f64, e: ErrorPoint) -> Mat2 {
        let n = self.generator(e);
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if len == 0.0 {
            return Mat2::identity();
        }
        rotation(
            [n[0] / len, n[1] / len, n[2] / len],
            rabi * self.duration * len,
        )
    }
}

/// Segments in time order (index 0 is applied first).
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    pub segments: Vec<PulseSegment>,
    /// Nominal Rabi strength, rad/s.
    pub rabi: f64,
}

impl PulseSequence {
    pub fn new(segments: Vec<PulseSegment>, rabi: f64) -> Result<Self, PulseError> {
        let s = PulseSequence { segments, rabi };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), PulseError> {
        if !(self.rabi > 0.0 && self.rabi.is_finite()) {
            return Err(PulseError::InvalidSequence(format!(
                "Rabi strength {} must be positive",
                self.rabi
            )));
        }
        for (i, s) in self.segments.iter().enumerate() {
            if !(s.duration >= 0.0)
                || !s.duration.is_finite()
                || !s.phase.is_finite()
                || !s.amplitude.is_finite()
            {
                return Err(PulseError::InvalidSequence(format!(
                    "segment {i} has invalid values {s:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Total nominal rotation angle of the driven segments.
    pub fn rotation_angle(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| self.rabi * s.duration * s.amplitude.abs())
            .sum()
    }

    /// Plain-text table, one `duration_s phase_rad relative_amplitude` line per segment.
    pub fn to_table(&self) -> String {
        let mut out = String::from("# duration_s phase_rad relative_amplitude\n");
        for s in &self.segments {
            let _ = writeln!(
                out,
                "{:.16e} {:.16e} {:.16e}",
                s.duration, s.phase, s.amplitude
            );
        }
        out
    }

    pub fn from_table(text: &str, rabi: f64) -> Result<Self, PulseError> {
        let mut segments = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 3 {
                return Err(PulseError::Parse {
                    line: i + 1,
                    msg: format!("expected 3 columns, got {}", cols.len()),
                });
            }
            let mut v = [0.0; 3];
            for (slot, c) in v.iter_mut().zip(&cols) {
                *slot = c.parse().map_err(|e| PulseError::Parse {
                    line: i + 1,
                    msg: format!("`{c}`: {e}"),
                })?;
            }
            segments.push(PulseSegment {
                duration: v[0],
                phase: v[1],
                amplitude: v[2],
            });
        }
        PulseSequence::new(segments, rabi)
    }
}

fn in_plane_axis(phi: f64) -> [f64; 3] {
    [phi.cos(), phi.sin(), 0.0]
}

/// `exp(−iθ/2 (cosφ σx + sinφ σy))`.
pub fn ideal_unitary(theta: f64, phi: f64) -> Mat2 {
    rotation(in_plane_axis(phi), theta)
}

/// Nominal rotation `(θ, φ)` executed with control errors `e`.
pub fn real_unitary(theta: f64, phi: f64, e: ErrorPoint) -> Mat2 {
    PulseSegment::drive(theta, phi).unitary(1.0, e)
}

/// Propagator of a sequence; later segments multiply from the left.
pub fn compose(seq: &PulseSequence, e: ErrorPoint) -> Mat2 {
    seq.segments
        .iter()
        .fold(Mat2::identity(), |acc, s| s.unitary(seq.rabi, e) * acc)
}

/// Input-state-averaged gate infidelity `1 − (|Tr V†U|² + d)/(d(d+1))`, d = 2.
pub fn avg_gate_infidelity(u: &Mat2, target: &Mat2) -> f64 {
    let t = (target.dagger() * *u).trace().norm_sqr();
    (1.0 - (t + 2.0) / 6.0).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompositeKind {
    Bb1,
    Corpse,
    RCinBb,
}

impl std::str::FromStr for CompositeKind {
    type Err = PulseError;
    fn from_str(s: &str) -> Result<Self, PulseError> {
        match s.to_ascii_lowercase().as_str() {
            "bb1" => Ok(CompositeKind::Bb1),
            "corpse" => Ok(CompositeKind::Corpse),
            "rcinbb" => Ok(CompositeKind::RCinBb),
            _ => Err(PulseError::UnknownKind(s.to_string())),
        }
    }
}

/// Rotations `(θ_i, φ_i)` in operator-product order: the first entry is the
/// leftmost factor and therefore the last to act.
fn composite_rotations(kind: CompositeKind, theta: f64, phi: f64) -> Vec<(f64, f64)> {
    let k = ((theta / 2.0).sin() / 2.0).asin();
    let s = (-theta / (4.0 * PI)).acos();
    let refocus = [(PI, phi + s), (2.0 * PI, phi + 3.0 * s), (PI, phi + s)];
    let corpse = [
        (2.0 * PI + theta / 2.0 - k, phi),
        (2.0 * PI - 2.0 * k, phi + PI),
        (theta / 2.0 - k, phi),
    ];
    match kind {
        CompositeKind::Bb1 => refocus.into_iter().chain([(theta, phi)]).collect(),
        CompositeKind::Corpse => corpse.to_vec(),
        CompositeKind::RCinBb => refocus.into_iter().chain(corpse).collect(),
    }
}

/// Composite realization of `(θ, φ)` at Rabi strength `rabi`.
pub fn build_composite(
    kind: CompositeKind,
    theta: f64,
    phi: f64,
    rabi: f64,
) -> Result<PulseSequence, PulseError> {
    if !(theta > 0.0 && theta <= 2.0 * PI) {
        return Err(PulseError::AngleOutOfRange(theta));
    }
    let segments = composite_rotations(kind, theta, phi)
        .into_iter()
        .rev()
        .map(|(angle, ph)| PulseSegment::drive(angle / rabi, ph))
        .collect();
    PulseSequence::new(segments, rabi)
}

/// Single rectangular pulse.
pub fn bare_pulse(theta: f64, phi: f64, rabi: f64) -> Result<PulseSequence, PulseError> {
    PulseSequence::new(vec![PulseSegment::drive(theta / rabi, phi)], rabi)
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Discretized error search space with per-point weights, row-major with
/// amplitude errors along rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorGrid {
    pub amplitude: Vec<f64>,
    pub detuning: Vec<f64>,
    pub weights: Vec<f64>,
}

impl ErrorGrid {
    pub fn new(
        amplitude: Vec<f64>,
        detuning: Vec<f64>,
        weights: Vec<f64>,
    ) -> Result<Self, PulseError> {
        let g = ErrorGrid {
            amplitude,
            detuning,
            weights,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn uniform(amplitude: Vec<f64>, detuning: Vec<f64>) -> Result<Self, PulseError> {
        let w = vec![1.0; amplitude.len() * detuning.len()];
        ErrorGrid::new(amplitude, detuning, w)
    }

    /// `W = norm·exp(−(ε−ε̄)²/2σ_ε² − (f−f̄)²/2σ_f²)`.
    pub fn gaussian(
        amplitude: Vec<f64>,
        detuning: Vec<f64>,
        norm: f64,
        center: ErrorPoint,
        sigma: (f64, f64),
    ) -> Result<Self, PulseError> {
        if !(sigma.0 > 0.0 && sigma.1 > 0.0) {
            return Err(PulseError::BadGrid(
                "Gaussian widths must be positive".into(),
            ));
        }
        let mut w = Vec::with_capacity(amplitude.len() * detuning.len());
        for &a in &amplitude {
            for &d in &detuning {
                let x = (a - center.amplitude) / sigma.0;
                let y = (d - center.detuning) / sigma.1;
                w.push(norm * (-0.5 * (x * x + y * y)).exp());
            }
        }
        ErrorGrid::new(amplitude, detuning, w)
    }

    pub fn single(e: ErrorPoint) -> Self {
        ErrorGrid {
            amplitude: vec![e.amplitude],
            detuning: vec![e.detuning],
            weights: vec![1.0],
        }
    }

    pub fn validate(&self) -> Result<(), PulseError> {
        if self.amplitude.is_empty() || self.detuning.is_empty() {
            return Err(PulseError::BadGrid("no grid points".into()));
        }
        if self.weights.len() != self.amplitude.len() * self.detuning.len() {
            return Err(PulseError::BadGrid(format!(
                "{} weights for a {}×{} grid",
                self.weights.len(),
                self.amplitude.len(),
                self.detuning.len()
            )));
        }
        if let Some(w) = self
            .weights
            .iter()
            .find(|w| !(**w >= 0.0) || !w.is_finite())
        {
            return Err(PulseError::BadGrid(format!(
                "weight {w} is not a finite non-negative number"
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Grid points in row-major order.
    pub fn points(&self) -> Vec<ErrorPoint> {
        self.amplitude
            .iter()
            .flat_map(|&a| self.detuning.iter().map(move |&d| ErrorPoint::new(a, d)))
            .collect()
    }
}

/// Infidelity at every grid point; `result[i][j]` is amplitude error `i`,
/// detuning `j`.
pub fn infidelity_map(
    seq: &PulseSequence,
    theta: f64,
    phi: f64,
    grid: &ErrorGrid,
) -> Result<Vec<Vec<f64>>, PulseError> {
    grid.validate()?;
    seq.validate()?;
    let target = ideal_unitary(theta, phi);
    Ok(grid
        .amplitude
        .par_iter()
        .map(|&a| {
            grid.detuning
                .iter()
                .map(|&d| avg_gate_infidelity(&compose(seq, ErrorPoint::new(a, d)), &target))
                .collect()
        })
        .collect())
}

/// CSV with a header row of detuning values and a leading column of
/// amplitude errors.
pub fn map_to_csv(grid: &ErrorGrid, values: &[Vec<f64>]) -> String {
    let mut out = String::from("eps\\f");
    for d in &grid.detuning {
        let _ = write!(out, ",{d:.16e}");
    }
    out.push('\n');
    for (a, row) in grid.amplitude.iter().zip(values) {
        let _ = write!(out, "{a:.16e}");
        for v in row {
            let _ = write!(out, ",{v:.16e}");
        }
        out.push('\n');
    }
    out
}
