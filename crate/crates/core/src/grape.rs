//! Robust pulse synthesis: segment durations and phases optimized against a
//! weighted grid of amplitude/detuning errors.
//!
//! Parameters are laid out as `[raw durations (N_p) | phases (N_p)]`. Raw
//! durations pass through a sigmoid onto `(t_min, t_max)`; phases are free.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::numerics::{minimize_qn, Mat2, Minimum, NumericsError, OptimizerOptions};
use crate::pulses::{
    build_composite, ideal_unitary, infidelity_map, CompositeKind, ErrorGrid, ErrorPoint,
    PulseError, PulseSegment, PulseSequence,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GrapeError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("expected {expected} parameters, got {got}")]
    ParamLength { expected: usize, got: usize },
    #[error("non-finite infidelity at grid point (ε = {amplitude}, f = {detuning})")]
    NonFinite { amplitude: f64, detuning: f64 },
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrapeConfig {
    pub theta: f64,
    pub phi: f64,
    pub segments: usize,
    /// Nominal Rabi strength, rad/s.
    pub rabi: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub grid: ErrorGrid,
    pub optimizer: OptimizerOptions,
    /// Central-difference step on raw parameters.
    pub fd_step: f64,
    pub seed: u64,
    /// Uniform phase jitter (radians) added to the initial phases; 0 keeps the
    /// composite-pulse start exactly.
    pub init_jitter: f64,
}

impl Default for GrapeConfig {
    fn default() -> Self {
        let axis = crate::pulses::linspace(-0.3, 0.3, 11);
        let grid = ErrorGrid::gaussian(axis.clone(), axis, 1.90, ErrorPoint::NONE, (0.22, 0.22))
            .expect("static grid");
        GrapeConfig {
            theta: PI,
            phi: 0.0,
            segments: 100,
            rabi: 200e6,
            t_min: 1e-9,
            t_max: 1e-8,
            grid,
            optimizer: OptimizerOptions {
                max_iters: 2000,
                ..OptimizerOptions::default()
            },
            fd_step: 1e-6,
            seed: 0,
            init_jitter: 0.0,
        }
    }
}

impl GrapeConfig {
    pub fn validate(&self) -> Result<(), GrapeError> {
        if self.segments == 0 {
            return Err(GrapeError::InvalidConfig(
                "need at least one segment".into(),
            ));
        }
        if !(self.t_min > 0.0 && self.t_min < self.t_max) {
            return Err(GrapeError::InvalidConfig(format!(
                "need 0 < t_min < t_max, got {} and {}",
                self.t_min, self.t_max
            )));
        }
        if !(self.rabi > 0.0) || !(self.fd_step > 0.0) || !(self.init_jitter >= 0.0) {
            return Err(GrapeError::InvalidConfig(
                "rabi, fd_step must be positive and jitter ≥ 0".into(),
            ));
        }
        self.grid.validate()?;
        self.optimizer.validate()?;
        Ok(())
    }

    fn duration(&self, raw: f64) -> f64 {
        sigmoid_reparam(raw, self.t_min, self.t_max)
    }
}

/// Maps an unbounded raw value onto `(t_min, t_max)`.
pub fn sigmoid_reparam(raw: f64, t_min: f64, t_max: f64) -> f64 {
    t_min + (t_max - t_min) / (1.0 + (-raw).exp())
}

pub fn sigmoid_inverse(t: f64, t_min: f64, t_max: f64) -> f64 {
    let u = (t - t_min) / (t_max - t_min);
    (u / (1.0 - u)).ln()
}

fn segment_unitary(duration: f64, phase: f64, rabi: f64, e: ErrorPoint) -> Mat2 {
    PulseSegment::drive(duration, phase).unitary(rabi, e)
}

fn infidelity_from_trace(t: crate::numerics::C64) -> f64 {
    (4.0 - t.norm_sqr()) / 6.0
}

/// Infidelity at one grid point and its central-difference gradient.
fn point_loss(
    params: &[f64],
    cfg: &GrapeConfig,
    target_dag: &Mat2,
    e: ErrorPoint,
    grad: &mut [f64],
) -> f64 {
    let n = cfg.segments;
    let (raw, phases) = params.split_at(n);
    let units: Vec<Mat2> = (0..n)
        .map(|i| segment_unitary(cfg.duration(raw[i]), phases[i], cfg.rabi, e))
        .collect();
    // prefix[i] = U_{i−1}⋯U_0, suffix[i] = U_{n−1}⋯U_{i+1}
    let mut prefix = Vec::with_capacity(n);
    let mut acc = Mat2::identity();
    for u in &units {
        prefix.push(acc);
        acc = *u * acc;
    }
    let total = acc;
    let mut suffix = vec![Mat2::identity(); n];
    let mut acc = Mat2::identity();
    for i in (0..n).rev() {
        suffix[i] = acc;
        acc = acc * units[i];
    }
    let h = cfg.fd_step;
    for i in 0..n {
        let m = prefix[i] * *target_dag * suffix[i];
        let f = |r: f64, p: f64| {
            infidelity_from_trace((m * segment_unitary(cfg.duration(r), p, cfg.rabi, e)).trace())
        };
        grad[i] = (f(raw[i] + h, phases[i]) - f(raw[i] - h, phases[i])) / (2.0 * h);
        grad[n + i] = (f(raw[i], phases[i] + h) - f(raw[i], phases[i] - h)) / (2.0 * h);
    }
    infidelity_from_trace((*target_dag * total).trace())
}

/// Weighted grid infidelity and its gradient. Grid points are evaluated in
/// parallel and summed in row-major order.
pub fn loss(params: &[f64], cfg: &GrapeConfig) -> Result<(f64, Vec<f64>), GrapeError> {
    let n = cfg.segments;
    if params.len() != 2 * n {
        return Err(GrapeError::ParamLength {
            expected: 2 * n,
            got: params.len(),
        });
    }
    let target_dag = ideal_unitary(cfg.theta, cfg.phi).dagger();
    let points = cfg.grid.points();
    let per_point: Vec<(f64, Vec<f64>)> = points
        .par_iter()
        .map(|&e| {
            let mut g = vec![0.0; 2 * n];
            let l = point_loss(params, cfg, &target_dag, e, &mut g);
            (l, g)
        })
        .collect();
    let mut total = 0.0;
    let mut grad = vec![0.0; 2 * n];
    for ((l, g), (&w, e)) in per_point.iter().zip(cfg.grid.weights.iter().zip(&points)) {
        if !l.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return Err(GrapeError::NonFinite {
                amplitude: e.amplitude,
                detuning: e.detuning,
            });
        }
        total += w * l;
        grad.iter_mut().zip(g).for_each(|(a, b)| *a += w * b);
    }
    Ok((total, grad))
}

/// Converts raw parameters to a time-ordered pulse sequence.
pub fn params_to_sequence(params: &[f64], cfg: &GrapeConfig) -> Result<PulseSequence, GrapeError> {
    let n = cfg.segments;
    if params.len() != 2 * n {
        return Err(GrapeError::ParamLength {
            expected: 2 * n,
            got: params.len(),
        });
    }
    let segs = (0..n)
        .map(|i| PulseSegment::drive(cfg.duration(params[i]), params[n + i]))
        .collect();
    Ok(PulseSequence::new(segs, cfg.rabi)?)
}

/// Starting point: the composite pulse's total duration split into equal bins,
/// each bin carrying the composite phase active at its start.
pub fn initial_params(cfg: &GrapeConfig) -> Result<Vec<f64>, GrapeError> {
    cfg.validate()?;
    let composite = build_composite(CompositeKind::RCinBb, cfg.theta, cfg.phi, cfg.rabi)?;
    let total = composite.duration();
    let bin = total / cfg.segments as f64;
    if !(bin > cfg.t_min && bin < cfg.t_max) {
        return Err(GrapeError::InvalidConfig(format!(
            "initial bin duration {bin:e} s outside ({:e}, {:e})",
            cfg.t_min, cfg.t_max
        )));
    }
    let raw0 = sigmoid_inverse(bin, cfg.t_min, cfg.t_max);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params = vec![raw0; cfg.segments];
    let mut edges = composite.segments.iter().scan(0.0, |t, s| {
        *t += s.duration;
        Some((*t, s.phase))
    });
    let mut current = edges.next().expect("composite pulses are non-empty");
    for i in 0..cfg.segments {
        let start = i as f64 * bin;
        while start >= current.0 * (1.0 - 1e-12) {
            match edges.next() {
                Some(next) => current = next,
                None => break,
            }
        }
        let jitter = if cfg.init_jitter > 0.0 {
            rng.gen_range(-cfg.init_jitter..=cfg.init_jitter)
        } else {
            0.0
        };
        params.push(current.1 + jitter);
    }
    Ok(params)
}

#[derive(Debug, Clone)]
pub struct GrapeResult {
    pub params: Vec<f64>,
    pub sequence: PulseSequence,
    /// Weighted loss at the start and after each accepted step.
    pub history: Vec<f64>,
    /// Infidelity over the configured grid, rows = amplitude error.
    pub final_map: Vec<Vec<f64>>,
    pub iterations: usize,
    pub converged: bool,
}

pub fn optimize(cfg: &GrapeConfig) -> Result<GrapeResult, GrapeError> {
    let x0 = initial_params(cfg)?;
    let mut failure: Option<GrapeError> = None;
    let result = minimize_qn(
        |x, g| match loss(x, cfg) {
            Ok((l, grad)) => {
                g.copy_from_slice(&grad);
                Ok(l)
            }
            Err(e) => {
                failure = Some(e);
                Err(NumericsError::NonFinite { index: None })
            }
        },
        &x0,
        &cfg.optimizer,
    );
    let Minimum {
        x,
        history,
        iters,
        converged,
        ..
    } = match (result, failure) {
        (Ok(m), _) => m,
        (Err(_), Some(e)) => return Err(e),
        (Err(e), None) => return Err(e.into()),
    };
    let sequence = params_to_sequence(&x, cfg)?;
    let final_map = infidelity_map(&sequence, cfg.theta, cfg.phi, &cfg.grid)?;
    Ok(GrapeResult {
        params: x,
        sequence,
        history,
        final_map,
        iterations: iters,
        converged,
    })
}
