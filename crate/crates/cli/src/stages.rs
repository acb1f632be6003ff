//! One function per stage. Each computes its artifacts in memory; nothing
//! touches the disk until the whole stage has succeeded.

use std::f64::consts::PI;

use hetq_core::compiler::{
    algorithm1_drive, algorithm2_compile, coincidence_schedule, ScheduleConfig,
};
use hetq_core::dds::{build_dd_control, delta_pulse_filter, filter_function, DdSpec, DdVariant};
use hetq_core::entangle::{
    build_link_graph, click_probability, draw_waiting_times, epsilon_eff_and_links,
    epsilon_jk_timeavg, p_thermal, quantum_volume, QubitCoherence, Relaxation,
    LINK_ERROR_THRESHOLD,
};
use hetq_core::grape::optimize;
use hetq_core::numerics::fit_sin_squared;
use hetq_core::pipeline::{coherence_of, run_pipeline, PipelineReport};
use hetq_core::pulses::{
    bare_pulse, build_composite, infidelity_map, map_to_csv, CompositeKind, ErrorGrid, ErrorPoint,
    PulseSequence,
};
use hetq_core::siv::{
    c2_frequency, draw_ensemble, find_strain_window, qubit_splitting, simulate_rabi, StrainScan,
    StrainWindow,
};
use hetq_core::thermal::{
    coherence_at_temp, theta_siv_trace, CoherenceKind, DriveHeat, PulseTrain,
};
use hetq_core::Error;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{RunConfig, Stage, VariantName};
use crate::output::{Artifact, Csv};
use crate::{row, CliError};

pub fn execute(stage: Stage, cfg: &RunConfig, seed: u64) -> Result<Vec<Artifact>, CliError> {
    match stage {
        Stage::StrainWindow => strain_window(cfg, seed),
        Stage::Rabi => rabi(cfg),
        Stage::Composite => composite(cfg),
        Stage::Grape => grape(cfg, seed),
        Stage::Filter => filter(cfg, seed),
        Stage::Coherence => coherence(cfg, seed),
        Stage::Thermal => thermal(cfg),
        Stage::Links => links(cfg, seed),
        Stage::Compile => compile(cfg, seed),
        Stage::FullPipeline => full_pipeline(cfg, seed),
    }
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

fn compute_window(cfg: &RunConfig, seed: u64) -> Result<(StrainWindow, f64), Error> {
    let sw = &cfg.strain_window;
    let p = cfg.siv.params();
    let laser = c2_frequency(&p, 0.0)? + sw.laser_offset;
    let ensemble = draw_ensemble(sw.centers, p.bias_sigma, seed)?;
    let scan = StrainScan {
        lo: sw.scan[0],
        hi: sw.scan[1],
        step: sw.scan_step,
    };
    Ok((find_strain_window(&ensemble, &p, laser, scan)?, laser))
}

#[derive(Serialize)]
struct WindowSummary {
    laser_frequency: f64,
    lo: f64,
    hi: f64,
    included: Vec<usize>,
    excluded: Vec<usize>,
}

fn strain_window(cfg: &RunConfig, seed: u64) -> Result<Vec<Artifact>, CliError> {
    let (w, laser) = compute_window(cfg, seed)?;
    let mut csv = Csv::new(&["center_index", "bias", "crossing_strain", "slope_sign"]);
    for c in &w.crossings {
        csv.row(row![c.center, c.bias, c.strain, c.slope_sign]);
    }
    let summary = WindowSummary {
        laser_frequency: laser,
        lo: w.lo,
        hi: w.hi,
        included: w.crossings.iter().map(|c| c.center).collect(),
        excluded: w.excluded.clone(),
    };
    Ok(vec![
        csv.finish("strain_window.csv"),
        Artifact::json("strain_window.json", &summary),
    ])
}

#[derive(Serialize)]
struct RabiSummary {
    qubit_splitting: f64,
    rabi_frequency: f64,
    pi_time: f64,
    flip_infidelity: f64,
    norm_drift: f64,
}

fn rabi(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let r = &cfg.rabi;
    let p = hetq_core::siv::SivParams {
        field: r.field,
        ..cfg.siv.params()
    };
    let w = qubit_splitting(&p, r.static_strain).map_err(Error::from)?;
    let dt = 2.0 * PI / (r.steps_per_cycle * w);
    let tr = simulate_rabi(&p, r.static_strain, r.drive_strain, w, 0.0, r.duration, dt)
        .map_err(Error::from)?;
    let stride = tr.times.len() / r.samples.max(1) + 1;
    let mut csv = Csv::new(&["t_s", "p0", "p1", "p2", "p3"]);
    let (mut t, mut y) = (Vec::new(), Vec::new());
    for (time, pops) in tr.times.iter().zip(&tr.populations).step_by(stride) {
        csv.row(row![*time, pops[0], pops[1], pops[2], pops[3]]);
        t.push(*time);
        y.push(pops[1]);
    }
    let fit = fit_sin_squared(&t, &y).map_err(Error::from)?;
    let pi_time = PI / fit.omega;
    let flip = simulate_rabi(&p, r.static_strain, r.drive_strain, w, 0.0, pi_time, dt)
        .map_err(Error::from)?;
    let summary = RabiSummary {
        qubit_splitting: w,
        rabi_frequency: fit.omega,
        pi_time,
        flip_infidelity: 1.0 - flip.populations.last().expect("non-empty trace")[1],
        norm_drift: tr.norm_drift.max(flip.norm_drift),
    };
    Ok(vec![
        csv.finish("rabi_trace.csv"),
        Artifact::json("rabi.json", &summary),
    ])
}

fn named_pulse(kind: &str, theta: f64, phi: f64, rabi: f64) -> Result<PulseSequence, CliError> {
    let seq = if kind.eq_ignore_ascii_case("bare") {
        bare_pulse(theta, phi, rabi)
    } else {
        let kind: CompositeKind = kind.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
        build_composite(kind, theta, phi, rabi)
    };
    Ok(seq.map_err(Error::from)?)
}

#[derive(Serialize)]
struct PulseSummary {
    kind: String,
    duration: f64,
    infidelity_at_origin: f64,
    infidelity_at_quarter: f64,
}

fn point_infidelity(
    seq: &PulseSequence,
    theta: f64,
    phi: f64,
    e: ErrorPoint,
) -> Result<f64, Error> {
    Ok(infidelity_map(seq, theta, phi, &ErrorGrid::single(e))?[0][0])
}

fn composite(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let c = &cfg.composite;
    let grid = c.grid.grid()?;
    let mut out = Vec::new();
    let mut summary = Vec::new();
    for kind in &c.kinds {
        let name = kind.to_ascii_lowercase();
        let seq = named_pulse(&name, c.theta, c.phi, c.rabi)?;
        let map = infidelity_map(&seq, c.theta, c.phi, &grid).map_err(Error::from)?;
        out.push(Artifact::text(format!("{name}_pulse.txt"), seq.to_table()));
        out.push(Artifact::text(
            format!("{name}_map.csv"),
            map_to_csv(&grid, &map),
        ));
        summary.push(PulseSummary {
            kind: name,
            duration: seq.duration(),
            infidelity_at_origin: point_infidelity(&seq, c.theta, c.phi, ErrorPoint::NONE)?,
            infidelity_at_quarter: point_infidelity(
                &seq,
                c.theta,
                c.phi,
                ErrorPoint::new(0.25, 0.25),
            )?,
        });
    }
    out.push(Artifact::json("composite.json", &summary));
    Ok(out)
}

#[derive(Serialize)]
struct GrapeSummary {
    iterations: usize,
    converged: bool,
    final_loss: f64,
    duration: f64,
    infidelity_at_origin: f64,
    infidelity_at_quarter: f64,
    grid_points_below_1e_4: usize,
}

fn grape(cfg: &RunConfig, seed: u64) -> Result<Vec<Artifact>, CliError> {
    let g = cfg.grape.config(seed)?;
    let r = optimize(&g).map_err(Error::from)?;
    let grid = cfg.grape.grid.grid()?;
    let map = infidelity_map(&r.sequence, g.theta, g.phi, &grid).map_err(Error::from)?;
    let mut hist = Csv::new(&["iteration", "loss"]);
    for (i, l) in r.history.iter().enumerate() {
        hist.row(row![i, *l]);
    }
    let summary = GrapeSummary {
        iterations: r.iterations,
        converged: r.converged,
        final_loss: r.history.last().copied().unwrap_or(f64::NAN),
        duration: r.sequence.duration(),
        infidelity_at_origin: point_infidelity(&r.sequence, g.theta, g.phi, ErrorPoint::NONE)?,
        infidelity_at_quarter: point_infidelity(
            &r.sequence,
            g.theta,
            g.phi,
            ErrorPoint::new(0.25, 0.25),
        )?,
        grid_points_below_1e_4: map.iter().flatten().filter(|v| **v < 1e-4).count(),
    };
    Ok(vec![
        Artifact::text("grape_pulse.txt", r.sequence.to_table()),
        hist.finish("grape_history.csv"),
        Artifact::text("grape_map.csv", map_to_csv(&grid, &map)),
        Artifact::json("grape.json", &summary),
    ])
}

/// π pulse used by the decoupling stages.
fn dd_pulse(cfg: &RunConfig, seed: u64) -> Result<PulseSequence, CliError> {
    let dd = &cfg.dd;
    if let Some(path) = &dd.pulse_table {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        return Ok(PulseSequence::from_table(&text, dd.rabi).map_err(Error::from)?);
    }
    if dd.pulse.eq_ignore_ascii_case("grape") {
        let g = cfg.grape.config(seed)?;
        return Ok(optimize(&g).map_err(Error::from)?.sequence);
    }
    named_pulse(&dd.pulse, PI, 0.0, dd.rabi)
}

fn dd_spec(cfg: &RunConfig, pulse: &PulseSequence, pulses: usize, errors: ErrorPoint) -> DdSpec {
    DdSpec {
        variant: cfg.dd.variant(),
        pulses,
        window: cfg.dd.window,
        pi_pulse: pulse.clone(),
        errors,
    }
}

fn filter(cfg: &RunConfig, seed: u64) -> Result<Vec<Artifact>, CliError> {
    let pulse = dd_pulse(cfg, seed)?;
    let f = &cfg.filter;
    let window = cfg.dd.window;
    let wt = logspace(f.omega_tau[0], f.omega_tau[1], f.points);
    let omegas: Vec<f64> = wt.iter().map(|x| x / window).collect();
    let errors = ErrorPoint::new(cfg.dd.amplitude_error, cfg.dd.detuning_error);
    let mut csv = Csv::new(&[
        "pulses",
        "omega_tau",
        "filter_over_omega2",
        "delta_filter_over_omega2",
    ]);
    for &n in &cfg.dd.pulses {
        let spec = dd_spec(cfg, &pulse, n, errors);
        let control = build_dd_control(&spec).map_err(Error::from)?;
        let values = filter_function(&control, errors, &omegas);
        let times = spec.target_pulse_times();
        for ((x, w), v) in wt.iter().zip(&omegas).zip(&values) {
            csv.row(row![
                n,
                *x,
                v / (w * w),
                delta_pulse_filter(&times, window, *w) / (w * w)
            ]);
        }
    }
    Ok(vec![csv.finish("filter.csv")])
}

fn coherence(cfg: &RunConfig, seed: u64) -> Result<Vec<Artifact>, CliError> {
    let pulse = dd_pulse(cfg, seed)?;
    let grid = cfg.coherence.grid.grid()?;
    let noise = cfg.noise.spectrum();
    let range = cfg.coherence.tau_range();
    let mut csv = Csv::new(&["pulses", "amplitude_error", "detuning_error", "t2_s", "z"]);
    for &n in &cfg.dd.pulses {
        let results: Vec<(ErrorPoint, (f64, f64))> = grid
            .points()
            .into_par_iter()
            .map(|e| coherence_of(&dd_spec(cfg, &pulse, n, e), &noise, range).map(|r| (e, r)))
            .collect::<Result<_, _>>()
            .map_err(Error::from)?;
        for (e, (t2, z)) in results {
            csv.row(row![n, e.amplitude, e.detuning, t2, z]);
        }
    }
    Ok(vec![csv.finish("coherence.csv")])
}

struct Drive {
    name: &'static str,
    per_cycle: usize,
    pulse: f64,
    heat: DriveHeat,
}

fn drives(cfg: &RunConfig, sequential_slots: usize) -> [Drive; 2] {
    let th = &cfg.thermal;
    let (fridge, sample) = (th.fridge(), th.sample());
    let rabi_b = PI / th.sequential_pulse;
    let strain_b = th.global_strain * rabi_b / cfg.dd.rabi;
    [
        Drive {
            name: "A",
            per_cycle: 1,
            pulse: th.global_pulse,
            heat: DriveHeat::from_strain(th.global_strain, &fridge, &sample),
        },
        Drive {
            name: "B",
            per_cycle: sequential_slots,
            pulse: th.sequential_pulse,
            heat: DriveHeat {
                fridge_load: th.sequential_load,
                sample_load: DriveHeat::from_strain(strain_b, &fridge, &sample).sample_load,
            },
        },
    ]
}

fn thermal(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let th = &cfg.thermal;
    let (fridge, sample) = (th.fridge(), th.sample());
    let window = th.window;
    let n = th.trace_points.max(2);
    let times: Vec<f64> = (0..n).map(|k| window * k as f64 / (n - 1) as f64).collect();
    let mut trace = Csv::new(&["variant", "pulses", "t_s", "theta_k"]);
    let mut summary = Csv::new(&[
        "variant",
        "pulses",
        "qubits",
        "t_dds",
        "theta_at_tdds",
        "t2_corrected",
    ]);
    for d in drives(cfg, cfg.dd.slots) {
        for &pulses in &cfg.dd.pulses {
            let train = PulseTrain {
                pulses,
                per_cycle: d.per_cycle,
                window,
                pulse_duration: d.pulse,
            };
            let tr = theta_siv_trace(&train, &d.heat, &fridge, &sample, &times, th.cv_reference())
                .map_err(Error::from)?;
            for (t, theta) in tr.times.iter().zip(&tr.theta) {
                trace.row(row![d.name, pulses, *t, *theta]);
            }
            let t2 = coherence_at_temp(th.t2_base, tr.theta_at_window, CoherenceKind::T2)
                .map_err(Error::from)?;
            summary.row(row![
                d.name,
                pulses,
                d.per_cycle,
                window,
                tr.theta_at_window,
                t2
            ]);
        }
    }
    Ok(vec![
        trace.finish("thermal_trace.csv"),
        summary.finish("thermal_summary.csv"),
    ])
}

#[derive(Serialize)]
struct LinkRecord {
    #[serde(rename = "N")]
    pulses: usize,
    variant: String,
    t_dds: f64,
    t_cmpl: f64,
    theta: f64,
    n_links: usize,
    eps_eff: f64,
    graph_edges: usize,
    largest_component: usize,
    log2_qv: Option<usize>,
}

fn links(cfg: &RunConfig, seed: u64) -> Result<Vec<Artifact>, CliError> {
    let l = &cfg.links;
    let e = &cfg.entangle;
    let th = &cfg.thermal;
    let grid = l.grid.grid()?;
    let points = grid.points();
    let n_q = points.len();
    let sequential = cfg.dd.variant == VariantName::Sequential;
    let pulse = if sequential {
        bare_pulse(PI, 0.0, PI / th.sequential_pulse).map_err(Error::from)?
    } else {
        dd_pulse(cfg, seed)?
    };
    let (variant, drive) = if sequential {
        let [_, b] = drives(cfg, n_q);
        (
            DdVariant::Sequential {
                slots: n_q,
                slot: 1,
            },
            b,
        )
    } else {
        let [a, _] = drives(cfg, n_q);
        (DdVariant::Global, a)
    };
    let seen: Vec<ErrorPoint> = if sequential && l.calibrated {
        vec![ErrorPoint::NONE; n_q]
    } else {
        points.clone()
    };
    let noise = cfg.noise.spectrum();
    let range = cfg.coherence.tau_range();
    let base: Vec<(f64, f64, f64)> = seen
        .par_iter()
        .map(|&err| {
            let spec = DdSpec {
                variant,
                pulses: l.pulses,
                window: 1.0,
                pi_pulse: pulse.clone(),
                errors: err,
            };
            let (t2, z) = coherence_of(&spec, &noise, range)?;
            let gate = point_infidelity(&pulse, PI, 0.0, err)?;
            Ok((t2, z, gate))
        })
        .collect::<Result<_, Error>>()?;

    let omega_q = 2.0 * PI * qubit_splitting(&cfg.siv.params(), 0.0).map_err(Error::from)?;
    let waits = draw_waiting_times(n_q, n_q, click_probability(e.alpha, e.eta), seed)
        .map_err(Error::from)?;
    let (fridge, sample) = (th.fridge(), th.sample());
    let mut table = Csv::new(&[
        "t_dds", "j_eps", "j_f", "k_eps", "k_f", "m_jk", "eps_bar", "included",
    ]);
    let mut records = Vec::new();
    for window in e.t_dds.values() {
        let train = PulseTrain {
            pulses: l.pulses,
            per_cycle: drive.per_cycle,
            window,
            pulse_duration: drive.pulse,
        };
        let theta = theta_siv_trace(
            &train,
            &drive.heat,
            &fridge,
            &sample,
            &[window],
            th.cv_reference(),
        )
        .map_err(Error::from)?
        .theta_at_window;
        let env = Relaxation {
            t1: coherence_at_temp(e.t1_base, theta, CoherenceKind::T1).map_err(Error::from)?,
            p_th: p_thermal(omega_q, theta),
        };
        let coh: Vec<QubitCoherence> = base
            .iter()
            .map(|&(t2, z, g)| {
                coherence_at_temp(t2, theta, CoherenceKind::T2).map(|t2| QubitCoherence {
                    t2,
                    z,
                    gate_error: g,
                })
            })
            .collect::<Result<_, _>>()
            .map_err(Error::from)?;
        let errors: Vec<f64> = (0..n_q * n_q)
            .into_par_iter()
            .map(|i| {
                epsilon_jk_timeavg(
                    e.alpha,
                    window,
                    e.t_cmpl,
                    l.pulses,
                    env,
                    &coh[i / n_q],
                    &coh[i % n_q],
                )
            })
            .collect::<Result<_, _>>()
            .map_err(Error::from)?;
        let kept: Vec<u64> = waits
            .iter()
            .zip(&errors)
            .map(|(&m, &x)| {
                if x < LINK_ERROR_THRESHOLD {
                    m
                } else {
                    u64::MAX
                }
            })
            .collect();
        let graph = build_link_graph(n_q, n_q, &kept, e.max_attempts, Some(&errors))
            .map_err(Error::from)?;
        for (i, (&m, &x)) in waits.iter().zip(&errors).enumerate() {
            let (j, k) = (points[i / n_q], points[i % n_q]);
            let included = x < LINK_ERROR_THRESHOLD && m < e.max_attempts;
            table.row(row![
                window,
                j.amplitude,
                j.detuning,
                k.amplitude,
                k.detuning,
                m,
                x,
                included
            ]);
        }
        let summary = epsilon_eff_and_links(errors.iter().copied());
        let largest = graph.components.first().map_or(0, |c| c.len());
        let log2_qv = if largest >= 2 && summary.n_links > 0 {
            Some(
                quantum_volume(summary.eps_eff, largest)
                    .map_err(Error::from)?
                    .log2_volume,
            )
        } else {
            None
        };
        records.push(LinkRecord {
            pulses: l.pulses,
            variant: drive.name.to_string(),
            t_dds: window,
            t_cmpl: e.t_cmpl,
            theta,
            n_links: summary.n_links,
            eps_eff: summary.eps_eff,
            graph_edges: graph.edges.len(),
            largest_component: largest,
            log2_qv,
        });
    }
    Ok(vec![
        table.finish("links.csv"),
        Artifact::json("links.json", &records),
    ])
}

#[derive(Serialize)]
struct ScalingRecord {
    m_scal: usize,
    fundamental_period: usize,
    min_window: usize,
    unique: usize,
    /// `h_j` keyed `h0`, `h1`, ...
    h: std::collections::BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct CompileSummary {
    m_star: usize,
    e_star: usize,
    slot_duration: f64,
    waveform_period: f64,
    waveform_dwell: f64,
    sweep: Vec<ScalingRecord>,
}

fn compile(cfg: &RunConfig, seed: u64) -> Result<Vec<Artifact>, CliError> {
    let c = &cfg.compile;
    let setpoints = if c.setpoints.is_empty() {
        let (w, _) = compute_window(cfg, seed)?;
        let mut s: Vec<f64> = w.crossings.iter().map(|x| x.strain).collect();
        s.sort_by(f64::total_cmp);
        s.dedup();
        s
    } else {
        c.setpoints.clone()
    };
    let sched = ScheduleConfig {
        setpoints,
        dwell: c.dwell,
        max_slope: c.max_slope,
        emission_rate: c.emission_rate,
    };
    let wave = algorithm1_drive(&sched).map_err(Error::from)?;
    let n = c.waveform_points.max(2);
    let mut wcsv = Csv::new(&["t_s", "strain"]);
    for k in 0..n {
        let t = wave.period * k as f64 / (n - 1) as f64;
        wcsv.row(row![t, wave.value(t)]);
    }

    let comp =
        algorithm2_compile(c.n_a, c.n_b, c.base_step, c.window_periods).map_err(Error::from)?;
    let best = &comp.sweep[comp.m_star - 1];
    let slots = best.period * c.window_periods;
    let mut scsv = Csv::new(&["step", "qubit_a", "qubit_b"]);
    for a in coincidence_schedule(c.n_a, c.n_b, comp.m_star, slots - 1) {
        scsv.row(row![a.slot * comp.m_star, a.a, a.b]);
    }
    let summary = CompileSummary {
        m_star: comp.m_star,
        e_star: comp.e_star,
        slot_duration: comp.slot_duration,
        waveform_period: wave.period,
        waveform_dwell: wave.dwell,
        sweep: comp
            .sweep
            .iter()
            .map(|s| ScalingRecord {
                m_scal: s.m_scal,
                fundamental_period: s.period,
                min_window: s.min_window,
                unique: s.stats.unique,
                h: s.stats
                    .h
                    .iter()
                    .map(|(j, h)| (format!("h{j}"), *h))
                    .collect(),
            })
            .collect(),
    };
    Ok(vec![
        wcsv.finish("waveform.csv"),
        scsv.finish("schedule.csv"),
        Artifact::json("compile.json", &summary),
    ])
}

#[derive(Serialize)]
struct PipelineRecord {
    #[serde(rename = "N")]
    pulses: usize,
    variant: String,
    t_dds: f64,
    t_cmpl: f64,
    theta: f64,
    t2_mean: f64,
    t2_std: f64,
    t2_center: f64,
    n_links: usize,
    eps_eff: f64,
    graph_edges: usize,
    largest_component: usize,
    log2_qv: Option<usize>,
}

pub fn pipeline_artifacts(report: &PipelineReport, t_cmpl: f64) -> Vec<Artifact> {
    let mut hist = Csv::new(&["iteration", "loss"]);
    for (i, l) in report.grape_history.iter().enumerate() {
        hist.row(row![i, *l]);
    }
    let mut qubits = Csv::new(&[
        "variant",
        "pulses",
        "t_dds",
        "amplitude_error",
        "detuning_error",
        "t2_base",
        "z",
        "t2",
        "gate_error",
    ]);
    for q in &report.qubits {
        qubits.row(row![
            q.sequence.to_string(),
            q.pulses,
            q.window,
            q.errors.amplitude,
            q.errors.detuning,
            q.t2_base,
            q.z,
            q.t2,
            q.gate_error
        ]);
    }
    let mut summary = Csv::new(&[
        "variant", "pulses", "t_dds", "theta", "t2_mean", "t2_std", "n_links", "eps_eff", "log2_qv",
    ]);
    let mut records = Vec::new();
    for s in &report.summaries {
        let qv = s.log2_qv.map_or_else(String::new, |v| v.to_string());
        summary.row(row![
            s.sequence.to_string(),
            s.pulses,
            s.window,
            s.theta,
            s.t2_mean,
            s.t2_std,
            s.n_links,
            s.eps_eff,
            qv
        ]);
        records.push(PipelineRecord {
            pulses: s.pulses,
            variant: s.sequence.to_string(),
            t_dds: s.window,
            t_cmpl,
            theta: s.theta,
            t2_mean: s.t2_mean,
            t2_std: s.t2_std,
            t2_center: s.t2_center,
            n_links: s.n_links,
            eps_eff: s.eps_eff,
            graph_edges: s.graph_edges,
            largest_component: s.largest_component,
            log2_qv: s.log2_qv,
        });
    }
    vec![
        Artifact::text("grape_pulse.txt", report.global_pulse.to_table()),
        hist.finish("grape_history.csv"),
        qubits.finish("qubits.csv"),
        summary.finish("summary.csv"),
        Artifact::json("summary.json", &records),
    ]
}

fn full_pipeline(cfg: &RunConfig, seed: u64) -> Result<Vec<Artifact>, CliError> {
    let p = cfg.pipeline(seed)?;
    let report = run_pipeline(&p)?;
    Ok(pipeline_artifacts(&report, p.t_cmpl))
}
