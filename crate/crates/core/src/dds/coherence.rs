use std::f64::consts::PI;

use crate::numerics::bisect;

use super::{DdFilter, DdSpec, DdsError};

/// Two-Gaussian dephasing spectrum `S(ω) = c0·e^{−ω²/ω0²} + c1·e^{−ω²/ω1²}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpectrum {
    pub c0: f64,
    pub c1: f64,
    pub omega0: f64,
    pub omega1: f64,
}

impl Default for NoiseSpectrum {
    fn default() -> Self {
        NoiseSpectrum {
            c0: 1e6,
            c1: 1e9,
            omega0: 1.8e3,
            omega1: 50.0,
        }
    }
}

impl NoiseSpectrum {
    pub fn validate(&self) -> Result<(), DdsError> {
        let ok = [self.c0, self.c1]
            .iter()
            .all(|c| *c >= 0.0 && c.is_finite())
            && self.omega0 > 0.0
            && self.omega1 > 0.0;
        if ok {
            Ok(())
        } else {
            Err(DdsError::InvalidSpectrum(format!("{self:?}")))
        }
    }

    pub fn density(&self, omega: f64) -> f64 {
        self.c0 * (-(omega / self.omega0).powi(2)).exp()
            + self.c1 * (-(omega / self.omega1).powi(2)).exp()
    }
}

impl DdFilter {
    /// `χ(τ) = (2/π)∫ S(ω)/ω²·F(ωτ) dω`, evaluated as `(1/π)∫ S·Σ|R_a|² dω`
    /// so the ω² factors cancel exactly.
    pub fn chi(&self, window: f64, noise: &NoiseSpectrum) -> Result<f64, DdsError> {
        let power = self.response_power(window)?;
        let samples: Vec<f64> = power
            .iter()
            .zip(&self.panels().nodes)
            .map(|(p, &w)| noise.density(w) * p)
            .collect();
        Ok(self.panels().sum(&samples) / PI)
    }
}

/// One-off `χ(τ)` for a spec, using the default frequency grid.
pub fn chi(window: f64, spec: &DdSpec, noise: &NoiseSpectrum) -> Result<f64, DdsError> {
    if !(window > 0.0) {
        return Err(DdsError::InvalidSpec(format!(
            "window {window} must be positive"
        )));
    }
    noise.validate()?;
    DdFilter::new(spec, DdFilter::default_panels())?.chi(window, noise)
}

pub fn chi_curve(
    filter: &DdFilter,
    noise: &NoiseSpectrum,
    windows: &[f64],
) -> Result<Vec<(f64, f64)>, DdsError> {
    windows
        .iter()
        .map(|&t| Ok((t, filter.chi(t, noise)?)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauRange {
    pub lo: f64,
    pub hi: f64,
}

impl Default for TauRange {
    fn default() -> Self {
        TauRange { lo: 1e-7, hi: 1e-1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceResult {
    pub t2: f64,
    pub z: f64,
    /// Scanned `(τ, χ)` pairs.
    pub samples: Vec<(f64, f64)>,
}

const SCAN_FACTOR: f64 = 1.25;
const LOG_STEP: f64 = 1e-3;

/// T2 as the first root of `χ(τ) = 1` and `z = d ln χ / d ln τ` there, for any
/// χ curve.
pub fn extract_t2_z_with<F>(chi: F, range: TauRange) -> Result<CoherenceResult, DdsError>
where
    F: Fn(f64) -> Result<f64, DdsError>,
{
    if !(range.lo > 0.0 && range.hi > range.lo) {
        return Err(DdsError::InvalidSpec(format!("bad τ range {range:?}")));
    }
    let mut samples = Vec::new();
    let mut t = range.lo;
    let mut prev: Option<f64> = None;
    let bracket = loop {
        let c = chi(t)?;
        samples.push((t, c));
        if c >= 1.0 {
            match prev {
                Some(p) => break (p, t),
                None => {
                    return Err(DdsError::NoCrossing {
                        lo: range.lo,
                        hi: range.hi,
                    })
                }
            }
        }
        if t >= range.hi {
            return Err(DdsError::NoCrossing {
                lo: range.lo,
                hi: range.hi,
            });
        }
        prev = Some(t);
        t = (t * SCAN_FACTOR).min(range.hi);
    };
    let g = |x: f64| chi(x.exp()).map(|c| c.ln()).unwrap_or(f64::NAN);
    let root = bisect(g, bracket.0.ln(), bracket.1.ln(), 1e-6)?;
    let t2 = root.exp();
    let up = chi((root + LOG_STEP).exp())?;
    let down = chi((root - LOG_STEP).exp())?;
    let z = (up.ln() - down.ln()) / (2.0 * LOG_STEP);
    Ok(CoherenceResult { t2, z, samples })
}

/// T2 and stretch exponent of a decoupling family; the scan starts no
/// earlier than the shortest window that fits the pulses.
pub fn extract_t2_z(
    filter: &DdFilter,
    noise: &NoiseSpectrum,
    range: TauRange,
) -> Result<CoherenceResult, DdsError> {
    noise.validate()?;
    let floor = filter.spec().min_window() * (1.0 + 1e-9);
    let range = TauRange {
        lo: range.lo.max(floor),
        hi: range.hi,
    };
    extract_t2_z_with(|t| filter.chi(t, noise), range)
}

const HBAR: f64 = 1.054_571_817e-34;
const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
const ELECTRON_G: f64 = 2.003;

/// Spin-projection-limited AC field sensitivity, T/√Hz.
pub fn sensing_sensitivity(
    qubits: usize,
    window: f64,
    t2: f64,
    stretch: f64,
    readout_fidelity: f64,
    init_time: f64,
    readout_time: f64,
) -> Result<f64, DdsError> {
    if qubits == 0 || !(window > 0.0) || !(t2 > 0.0) || !(stretch > 0.0) {
        return Err(DdsError::InvalidSensing(
            "qubits, window, T2 and exponent must be positive".into(),
        ));
    }
    if !(readout_fidelity > 0.0 && readout_fidelity <= 1.0) {
        return Err(DdsError::InvalidSensing(format!(
            "readout fidelity {readout_fidelity} outside (0, 1]"
        )));
    }
    if !(init_time >= 0.0 && readout_time >= 0.0) {
        return Err(DdsError::InvalidSensing(
            "overhead times must be non-negative".into(),
        ));
    }
    let prefactor = 0.5 * PI * HBAR / (ELECTRON_G * BOHR_MAGNETON);
    Ok(
        prefactor / (qubits as f64 * window).sqrt() * (window / t2).powf(stretch).exp()
            / readout_fidelity
            * ((init_time + window + readout_time) / window).sqrt(),
    )
}
