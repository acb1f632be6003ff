//! End-to-end evaluation: robust π pulse → per-qubit coherence under each
//! decoupling sequence → heating → link errors and link statistics.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::dds::{extract_t2_z, DdFilter, DdSpec, DdVariant, DdsError, NoiseSpectrum, TauRange};
use crate::entangle::{
    build_link_graph, click_probability, draw_waiting_times, epsilon_eff_and_links,
    epsilon_jk_timeavg, p_thermal, quantum_volume, QubitCoherence, Relaxation,
};
use crate::grape::{optimize, GrapeConfig};
use crate::pulses::{bare_pulse, infidelity_map, linspace, ErrorGrid, ErrorPoint, PulseSequence};
use crate::siv::{qubit_splitting, SivParams};
use crate::thermal::{
    coherence_at_temp, theta_siv_trace, CoherenceKind, CvReference, DriveHeat, FridgeConfig,
    PulseTrain, SampleConfig,
};
use crate::Error;

/// Decoupling scheme: one global robust pulse per cycle, or one bare pulse
/// per qubit per cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sequence {
    A,
    B,
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sequence::A => "A",
            Sequence::B => "B",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalDrive {
    pub grape: GrapeConfig,
    /// Pulse length charged to the fridge, s.
    pub thermal_pulse: f64,
    /// Strain amplitude of the drive.
    pub strain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequentialDrive {
    /// Bare π-pulse length, s.
    pub pulse_duration: f64,
    /// Continuous-drive fridge load, W.
    pub fridge_load: f64,
    /// Each qubit's pulse is tuned to its own transition, so it sees no
    /// amplitude or detuning error.
    pub calibrated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub amplitude_axis: Vec<f64>,
    pub detuning_axis: Vec<f64>,
    pub pulse_counts: Vec<usize>,
    /// Decoupling windows `t_dds`, s.
    pub windows: Vec<f64>,
    /// Compilation time after the window, s.
    pub t_cmpl: f64,
    pub alpha: f64,
    pub eta: f64,
    pub max_attempts: u64,
    pub seed: u64,
    /// `T1` at the reference temperature, s.
    pub t1_base: f64,
    pub siv: SivParams,
    pub global: GlobalDrive,
    pub sequential: SequentialDrive,
    pub fridge: FridgeConfig,
    pub sample: SampleConfig,
    pub cv_reference: CvReference,
    pub noise: NoiseSpectrum,
    pub tau_range: TauRange,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let axis = linspace(-0.3, 0.3, 11);
        PipelineConfig {
            amplitude_axis: axis.clone(),
            detuning_axis: axis,
            pulse_counts: vec![2, 4, 8, 16],
            windows: vec![0.2e-3, 0.8e-3],
            t_cmpl: 10e-6,
            alpha: 1e-4,
            eta: 1e-2,
            max_attempts: 1 << 20,
            seed: 0,
            t1_base: 1.0,
            siv: SivParams::default(),
            global: GlobalDrive {
                grape: GrapeConfig::default(),
                thermal_pulse: 150e-9,
                strain: 1.56e-6,
            },
            sequential: SequentialDrive {
                pulse_duration: 10e-9,
                fridge_load: 65e-6,
                calibrated: true,
            },
            fridge: FridgeConfig::default(),
            sample: SampleConfig::default(),
            cv_reference: CvReference::PrePulse,
            noise: NoiseSpectrum::default(),
            tau_range: TauRange::default(),
        }
    }
}

/// One qubit of one (sequence, N, window) evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitRecord {
    pub sequence: Sequence,
    pub pulses: usize,
    pub window: f64,
    pub errors: ErrorPoint,
    pub t2_base: f64,
    pub z: f64,
    pub t2: f64,
    pub gate_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSummary {
    pub sequence: Sequence,
    pub pulses: usize,
    pub window: f64,
    /// Sample temperature at the end of the window, K.
    pub theta: f64,
    pub t2_mean: f64,
    pub t2_std: f64,
    /// Corrected T2 of the error-free qubit (grid point nearest the origin).
    pub t2_center: f64,
    pub n_links: usize,
    pub eps_eff: f64,
    /// Links retained by both the error threshold and the attempt budget.
    pub graph_edges: usize,
    pub largest_component: usize,
    pub log2_qv: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub global_pulse: PulseSequence,
    pub grape_history: Vec<f64>,
    pub qubits: Vec<QubitRecord>,
    pub summaries: Vec<SequenceSummary>,
}

impl PipelineReport {
    pub fn summary(
        &self,
        sequence: Sequence,
        pulses: usize,
        window: f64,
    ) -> Option<&SequenceSummary> {
        self.summaries.iter().find(|s| {
            s.sequence == sequence
                && s.pulses == pulses
                && (s.window - window).abs() <= 1e-12 * window
        })
    }
}

/// `(T2, z)` of a decoupling family. When even the shortest window that fits
/// the pulses already has `χ ≥ 1`, the local power law there is extrapolated
/// downwards.
pub fn coherence_of(
    spec: &DdSpec,
    noise: &NoiseSpectrum,
    range: TauRange,
) -> Result<(f64, f64), DdsError> {
    let filter = DdFilter::new(spec, DdFilter::default_panels())?;
    match extract_t2_z(&filter, noise, range) {
        Ok(r) => Ok((r.t2, r.z)),
        Err(DdsError::NoCrossing { lo, .. }) => {
            let floor = spec.min_window() * (1.0 + 1e-9);
            let c0 = filter.chi(floor, noise)?;
            if floor < lo * (1.0 + 1e-6) && c0 >= 1.0 {
                let step: f64 = 1e-3;
                let c1 = filter.chi(floor * step.exp(), noise)?;
                let z = (c1.ln() - c0.ln()) / step;
                Ok((floor * c0.powf(-1.0 / z), z))
            } else {
                Err(DdsError::NoCrossing { lo, hi: range.hi })
            }
        }
        Err(e) => Err(e),
    }
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

struct SequenceSetup {
    sequence: Sequence,
    pulse: PulseSequence,
    variant: DdVariant,
    /// Error point each qubit's decoupling pulses see.
    errors: Vec<ErrorPoint>,
    gate_errors: Vec<f64>,
    heat: DriveHeat,
    thermal_pulse: f64,
    per_cycle: usize,
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineReport, Error> {
    let grid = ErrorGrid::uniform(cfg.amplitude_axis.clone(), cfg.detuning_axis.clone())?;
    let points = grid.points();
    let n_q = points.len();
    let center = (0..n_q)
        .min_by(|&a, &b| {
            let d = |p: ErrorPoint| p.amplitude.hypot(p.detuning);
            d(points[a]).total_cmp(&d(points[b]))
        })
        .expect("grid is non-empty");

    let grape = optimize(&cfg.global.grape)?;
    let global_map: Vec<f64> = infidelity_map(&grape.sequence, PI, 0.0, &grid)?.concat();
    let rabi_b = PI / cfg.sequential.pulse_duration;
    let bare = bare_pulse(PI, 0.0, rabi_b)?;
    let bare_errors = if cfg.sequential.calibrated {
        vec![ErrorPoint::NONE; n_q]
    } else {
        points.clone()
    };
    let bare_gate: Vec<f64> = bare_errors
        .iter()
        .map(|&e| infidelity_map(&bare, PI, 0.0, &ErrorGrid::single(e)).map(|m| m[0][0]))
        .collect::<Result<_, _>>()?;

    let heat_a = DriveHeat::from_strain(cfg.global.strain, &cfg.fridge, &cfg.sample);
    let strain_b = cfg.global.strain * rabi_b / cfg.global.grape.rabi;
    let heat_b = DriveHeat {
        fridge_load: cfg.sequential.fridge_load,
        sample_load: DriveHeat::from_strain(strain_b, &cfg.fridge, &cfg.sample).sample_load,
    };
    let setups = [
        SequenceSetup {
            sequence: Sequence::A,
            pulse: grape.sequence.clone(),
            variant: DdVariant::Global,
            errors: points.clone(),
            gate_errors: global_map,
            heat: heat_a,
            thermal_pulse: cfg.global.thermal_pulse,
            per_cycle: 1,
        },
        SequenceSetup {
            sequence: Sequence::B,
            pulse: bare,
            variant: DdVariant::Sequential {
                slots: n_q,
                slot: 1,
            },
            errors: bare_errors,
            gate_errors: bare_gate,
            heat: heat_b,
            thermal_pulse: cfg.sequential.pulse_duration,
            per_cycle: n_q,
        },
    ];

    let omega_q = 2.0 * PI * qubit_splitting(&cfg.siv, 0.0)?;
    let p_success = click_probability(cfg.alpha, cfg.eta);
    let waits = draw_waiting_times(n_q, n_q, p_success, cfg.seed)?;

    let mut qubits = Vec::new();
    let mut summaries = Vec::new();
    for setup in &setups {
        for &pulses in &cfg.pulse_counts {
            let base = base_coherence(setup, pulses, cfg)?;
            for &window in &cfg.windows {
                let train = PulseTrain {
                    pulses,
                    per_cycle: setup.per_cycle,
                    window,
                    pulse_duration: setup.thermal_pulse,
                };
                let trace = theta_siv_trace(
                    &train,
                    &setup.heat,
                    &cfg.fridge,
                    &cfg.sample,
                    &[window],
                    cfg.cv_reference,
                )?;
                let theta = trace.theta_at_window;
                let env = Relaxation {
                    t1: coherence_at_temp(cfg.t1_base, theta, CoherenceKind::T1)?,
                    p_th: p_thermal(omega_q, theta),
                };
                let coh: Vec<QubitCoherence> = base
                    .iter()
                    .zip(&setup.gate_errors)
                    .map(|(&(t2, z), &g)| {
                        coherence_at_temp(t2, theta, CoherenceKind::T2).map(|t2| QubitCoherence {
                            t2,
                            z,
                            gate_error: g,
                        })
                    })
                    .collect::<Result<_, _>>()?;
                let errors: Vec<f64> = (0..n_q * n_q)
                    .into_par_iter()
                    .map(|i| {
                        epsilon_jk_timeavg(
                            cfg.alpha,
                            window,
                            cfg.t_cmpl,
                            pulses,
                            env,
                            &coh[i / n_q],
                            &coh[i % n_q],
                        )
                    })
                    .collect::<Result<_, _>>()?;
                let links = epsilon_eff_and_links(errors.iter().copied());
                let kept: Vec<u64> = waits
                    .iter()
                    .zip(&errors)
                    .map(|(&m, &e)| {
                        if e < crate::entangle::LINK_ERROR_THRESHOLD {
                            m
                        } else {
                            u64::MAX
                        }
                    })
                    .collect();
                let graph = build_link_graph(n_q, n_q, &kept, cfg.max_attempts, Some(&errors))?;
                let largest = graph.components.first().map_or(0, |c| c.len());
                let log2_qv = if largest >= 2 && links.n_links > 0 {
                    Some(quantum_volume(links.eps_eff, largest)?.log2_volume)
                } else {
                    None
                };
                let t2s: Vec<f64> = coh.iter().map(|q| q.t2).collect();
                let (t2_mean, t2_std) = mean_std(&t2s);
                summaries.push(SequenceSummary {
                    sequence: setup.sequence,
                    pulses,
                    window,
                    theta,
                    t2_mean,
                    t2_std,
                    t2_center: t2s[center],
                    n_links: links.n_links,
                    eps_eff: links.eps_eff,
                    graph_edges: graph.edges.len(),
                    largest_component: largest,
                    log2_qv,
                });
                qubits.extend(base.iter().zip(&coh).zip(&points).map(
                    |((&(t2_base, z), q), &errors)| QubitRecord {
                        sequence: setup.sequence,
                        pulses,
                        window,
                        errors,
                        t2_base,
                        z,
                        t2: q.t2,
                        gate_error: q.gate_error,
                    },
                ));
            }
        }
    }
    Ok(PipelineReport {
        global_pulse: grape.sequence,
        grape_history: grape.history,
        qubits,
        summaries,
    })
}

/// Uncorrected `(T2, z)` per grid qubit; identical error points are
/// evaluated once.
fn base_coherence(
    setup: &SequenceSetup,
    pulses: usize,
    cfg: &PipelineConfig,
) -> Result<Vec<(f64, f64)>, Error> {
    let mut unique: Vec<ErrorPoint> = Vec::new();
    for e in &setup.errors {
        if !unique.contains(e) {
            unique.push(*e);
        }
    }
    let values: Vec<(f64, f64)> = unique
        .par_iter()
        .map(|&errors| {
            let spec = DdSpec {
                variant: setup.variant,
                pulses,
                window: 1.0,
                pi_pulse: setup.pulse.clone(),
                errors,
            };
            coherence_of(&spec, &cfg.noise, cfg.tau_range)
        })
        .collect::<Result<_, _>>()?;
    Ok(setup
        .errors
        .iter()
        .map(|e| values[unique.iter().position(|u| u == e).expect("listed above")])
        .collect())
}
