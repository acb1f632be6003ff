//! Toggling-frame dephasing susceptibility of piecewise-constant controls.
//!
//! For a control propagator `U(t)` the dephasing operator seen by the qubit is
//! `U†σzU = Σ_a y_a(t)σ_a`. With `R_a(ω) = ∫ e^{iωt} y_a(t) dt` over the
//! window, the filter function is `F(ω) = (ω²/2)·Σ_a |R_a(ω)|²`, which makes a
//! bare Ramsey window `F = 2 sin²(ωτ/2)`.

use crate::numerics::{bloch_rotation, LogPanels, C64, ONE, ZERO};
use crate::pulses::{ErrorPoint, PulseSegment, PulseSequence};

use super::{DdSpec, DdsError};

/// Lower edge of the frequency integration domain, rad/s.
pub const OMEGA_FLOOR: f64 = 1e-3;
/// Upper edge of the frequency integration domain, rad/s.
pub const OMEGA_CAP: f64 = 1e5;

type Vec3 = [C64; 3];
type Rot = [[f64; 3]; 3];

const IDENTITY: Rot = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// `∫₀^d e^{iks} ds`.
fn phase_integral(k: f64, d: f64) -> C64 {
    let x = k * d;
    if x.abs() < 1e-4 {
        let ix = C64::new(0.0, x);
        d * (ONE + ix / 2.0 + ix * ix / 6.0 + ix * ix * ix / 24.0)
    } else {
        (C64::new(0.0, x).exp() - ONE) / C64::new(0.0, k)
    }
}

/// `∫₀^d e^{iωs} y(s) ds` for a segment rotating about unit axis `axis` at
/// angular rate `rate`, expressed in the frame at the segment start.
pub fn segment_response(axis: [f64; 3], rate: f64, d: f64, omega: f64) -> Vec3 {
    let i0 = phase_integral(omega, d);
    if rate == 0.0 {
        return [ZERO, ZERO, i0];
    }
    let plus = phase_integral(omega + rate, d);
    let minus = phase_integral(omega - rate, d);
    let ic = (plus + minus) / 2.0;
    let is = (plus - minus) / C64::new(0.0, 2.0);
    let nz = axis[2];
    // Rotating ẑ backwards about the axis: y(s) = n·n_z + (ẑ − n·n_z)cos(rs) − (n×ẑ)sin(rs).
    let cross = [axis[1], -axis[0], 0.0];
    let zhat = [0.0, 0.0, 1.0];
    [0, 1, 2].map(|a| axis[a] * nz * i0 + (zhat[a] - axis[a] * nz) * ic - cross[a] * is)
}

fn rot_mul(a: &Rot, b: &Rot) -> Rot {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn transpose(a: &Rot) -> Rot {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

fn rot_apply(a: &Rot, v: &Vec3) -> Vec3 {
    [0, 1, 2].map(|i| v[0] * a[i][0] + v[1] * a[i][1] + v[2] * a[i][2])
}

fn add(a: &mut Vec3, b: &Vec3, scale: C64) {
    for k in 0..3 {
        a[k] += b[k] * scale;
    }
}

/// Axis, rate and transposed Bloch rotation of one segment. The detuning acts
/// through driven segments only; free segments are taken in the qubit's own
/// frame, where they commute with the dephasing operator.
fn segment_geometry(s: &PulseSegment, rabi: f64, e: ErrorPoint) -> ([f64; 3], f64, Rot) {
    let n = s.generator(e);
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if s.is_free() || len == 0.0 || s.duration == 0.0 {
        return ([0.0, 0.0, 1.0], 0.0, IDENTITY);
    }
    let rot_t = transpose(&bloch_rotation(&s.unitary(rabi, e)));
    ([n[0] / len, n[1] / len, n[2] / len], rabi * len, rot_t)
}

/// Susceptibility vector of a block starting at t = 0 in its own frame, plus
/// the transposed Bloch rotation of the whole block.
fn sequence_response(seq: &PulseSequence, e: ErrorPoint, omega: f64) -> (Vec3, Rot) {
    let mut acc = [ZERO; 3];
    let mut frame = IDENTITY;
    let mut t = 0.0;
    for s in &seq.segments {
        let (axis, rate, rot_t) = segment_geometry(s, seq.rabi, e);
        let local = segment_response(axis, rate, s.duration, omega);
        add(
            &mut acc,
            &rot_apply(&frame, &local),
            C64::new(0.0, omega * t).exp(),
        );
        frame = rot_mul(&frame, &rot_t);
        t += s.duration;
    }
    (acc, frame)
}

fn to_filter(r: &Vec3, omega: f64) -> f64 {
    0.5 * omega * omega * r.iter().map(|c| c.norm_sqr()).sum::<f64>()
}

/// `F(ω)` of an arbitrary control, segment by segment.
pub fn filter_function(control: &PulseSequence, e: ErrorPoint, omegas: &[f64]) -> Vec<f64> {
    omegas
        .iter()
        .map(|&w| to_filter(&sequence_response(control, e, w).0, w))
        .collect()
}

/// `F(ω)` of ideal instantaneous π pulses at `times` inside `[0, τ]`, from the
/// ±1 switching function.
pub fn delta_pulse_filter(times: &[f64], window: f64, omega: f64) -> f64 {
    let mut edges = Vec::with_capacity(times.len() + 2);
    edges.push(0.0);
    edges.extend_from_slice(times);
    edges.push(window);
    let r: C64 = edges
        .windows(2)
        .enumerate()
        .map(|(k, w)| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * C64::new(0.0, omega * w[0]).exp() * phase_integral(omega, w[1] - w[0])
        })
        .sum();
    0.5 * omega * omega * r.norm_sqr()
}

/// Layout element of a decoupling window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Block {
    /// Free evolution for the given duration, s.
    Free(f64),
    /// One copy of the π pulse.
    Pulse,
}

/// Cached response of the π pulse on a fixed set of frequencies.
#[derive(Debug, Clone)]
pub struct BlockResponse {
    pub omegas: Vec<f64>,
    pub response: Vec<Vec3>,
    pub rot_t: Rot,
    pub duration: f64,
}

impl BlockResponse {
    pub fn new(pulse: &PulseSequence, e: ErrorPoint, omegas: &[f64]) -> Self {
        let response = omegas
            .iter()
            .map(|&w| sequence_response(pulse, e, w).0)
            .collect();
        let rot_t = sequence_response(pulse, e, 1.0).1;
        BlockResponse {
            omegas: omegas.to_vec(),
            response,
            rot_t,
            duration: pulse.duration(),
        }
    }
}

/// Fast filter evaluation for one qubit and one decoupling family, with the
/// pulse response cached on the quadrature nodes.
#[derive(Debug, Clone)]
pub struct DdFilter {
    spec: DdSpec,
    panels: LogPanels,
    pulse: BlockResponse,
}

impl DdFilter {
    pub fn new(spec: &DdSpec, panels: LogPanels) -> Result<Self, DdsError> {
        spec.pi_pulse.validate()?;
        let pulse = BlockResponse::new(&spec.pi_pulse, spec.errors, &panels.nodes);
        Ok(DdFilter {
            spec: spec.clone(),
            panels,
            pulse,
        })
    }

    /// Default frequency grid: `[OMEGA_FLOOR, OMEGA_CAP]`, 24 panels per
    /// decade, 12-point Gauss rule.
    pub fn default_panels() -> LogPanels {
        LogPanels::new(OMEGA_FLOOR, OMEGA_CAP, 24, 12)
    }

    pub fn spec(&self) -> &DdSpec {
        &self.spec
    }

    pub fn panels(&self) -> &LogPanels {
        &self.panels
    }

    /// `Σ_a |R_a|²` at every node for window `τ`.
    pub fn response_power(&self, window: f64) -> Result<Vec<f64>, DdsError> {
        let blocks = self.spec.with_window(window).blocks()?;
        Ok(self
            .panels
            .nodes
            .iter()
            .enumerate()
            .map(|(k, &w)| {
                let mut acc = [ZERO; 3];
                let mut frame = IDENTITY;
                let mut t = 0.0;
                for b in &blocks {
                    let phase = C64::new(0.0, w * t).exp();
                    match b {
                        Block::Free(d) => {
                            let local = [ZERO, ZERO, phase_integral(w, *d)];
                            add(&mut acc, &rot_apply(&frame, &local), phase);
                            t += d;
                        }
                        Block::Pulse => {
                            add(&mut acc, &rot_apply(&frame, &self.pulse.response[k]), phase);
                            frame = rot_mul(&frame, &self.pulse.rot_t);
                            t += self.pulse.duration;
                        }
                    }
                }
                acc.iter().map(|c| c.norm_sqr()).sum()
            })
            .collect())
    }

    /// `F(ω)` on the cached nodes.
    pub fn filter_on_nodes(&self, window: f64) -> Result<Vec<f64>, DdsError> {
        let p = self.response_power(window)?;
        Ok(p.iter()
            .zip(&self.panels.nodes)
            .map(|(r, w)| 0.5 * w * w * r)
            .collect())
    }
}
