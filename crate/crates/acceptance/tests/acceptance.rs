//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use hetq_core::compiler::*;
use hetq_core::dds::{build_dd_control, delta_pulse_filter, filter_function, DdSpec, DdVariant};
use hetq_core::entangle::*;
use hetq_core::grape::{optimize, GrapeConfig};
use hetq_core::numerics::fit_sin_squared;
use hetq_core::pipeline::{run_pipeline, PipelineConfig, PipelineReport, Sequence};
use hetq_core::pulses::*;
use hetq_core::siv::*;
use hetq_core::thermal::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RABI: f64 = 200e6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}

fn point_infidelity(seq: &PulseSequence, e: ErrorPoint) -> f64 {
    infidelity_map(seq, PI, 0.0, &ErrorGrid::single(e)).unwrap()[0][0]
}

fn rcinbb() -> PulseSequence {
    build_composite(CompositeKind::RCinBb, PI, 0.0, RABI).unwrap()
}

fn composite_point_values() -> Outcome {
    let start = Instant::now();
    let seq = rcinbb();
    let quarter = 1.0 - point_infidelity(&seq, ErrorPoint::new(0.25, 0.25));
    let origin = 1.0 - point_infidelity(&seq, ErrorPoint::NONE);
    let elapsed = start.elapsed().as_secs_f64();
    let pass = (quarter * 100.0 - 92.7).abs() <= 1.0 && origin >= 1.0 - 1e-10 && elapsed < 1.0;
    outcome(
        pass,
        format!(
            "F(0.25,0.25) = {:.3}%, F(0,0) = 1 - {:.1e}, {elapsed:.3} s",
            quarter * 100.0,
            1.0 - origin
        ),
    )
}

fn grape_robustness(grape: &GrapeConfig) -> Outcome {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let result = pool.install(|| optimize(grape)).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let quarter = 1.0 - point_infidelity(&result.sequence, ErrorPoint::new(0.25, 0.25));
    let axis = linspace(-0.3, 0.3, 11);
    let map = infidelity_map(
        &result.sequence,
        PI,
        0.0,
        &ErrorGrid::uniform(axis.clone(), axis).unwrap(),
    )
    .unwrap();
    let below = map.iter().flatten().filter(|v| **v < 1e-4).count();
    let pass = quarter >= 0.999 && below as f64 >= 0.8 * 121.0 && elapsed < 600.0;
    outcome(
        pass,
        format!(
            "F(0.25,0.25) = {:.4}%, {below}/121 below 1e-4, {elapsed:.1} s on one thread",
            quarter * 100.0
        ),
    )
}

fn slope(seq: &PulseSequence, along: impl Fn(f64) -> ErrorPoint) -> f64 {
    (point_infidelity(seq, along(0.02)) / point_infidelity(seq, along(0.01))).ln() / 2f64.ln()
}

fn first_order_cancellation() -> Outcome {
    let robust = rcinbb();
    let bare = bare_pulse(PI, 0.0, RABI).unwrap();
    let amp = |x| ErrorPoint::new(x, 0.0);
    let det = |x| ErrorPoint::new(0.0, x);
    let s = [
        slope(&robust, amp),
        slope(&robust, det),
        slope(&bare, amp),
        slope(&bare, det),
    ];
    let pass = s[0] > 3.5 && s[1] > 3.5 && (s[2] - 2.0).abs() < 0.1 && (s[3] - 2.0).abs() < 0.1;
    outcome(
        pass,
        format!(
            "rCinBB slopes ({:.2}, {:.2}), bare ({:.2}, {:.2})",
            s[0], s[1], s[2], s[3]
        ),
    )
}

fn squeezed(seq: &PulseSequence, factor: f64) -> PulseSequence {
    let segments = seq
        .segments
        .iter()
        .map(|s| PulseSegment {
            duration: s.duration / factor,
            ..*s
        })
        .collect();
    PulseSequence::new(segments, seq.rabi * factor).unwrap()
}

fn global(pulses: usize, window: f64, pi_pulse: PulseSequence, errors: ErrorPoint) -> DdSpec {
    DdSpec {
        variant: DdVariant::Global,
        pulses,
        window,
        pi_pulse,
        errors,
    }
}

/// Worst relative gap between the squeezed finite-width filter and the
/// switching-function closed form.
fn delta_limit_gap(pulse: &PulseSequence) -> f64 {
    let tau = 1e-3;
    let ws = log_grid(0.1 / tau, 100.0 / tau, 301);
    let mut worst: f64 = 0.0;
    for n in [1, 2, 4, 8] {
        let spec = global(n, tau, squeezed(pulse, 100.0), ErrorPoint::NONE);
        let finite = filter_function(&build_dd_control(&spec).unwrap(), ErrorPoint::NONE, &ws);
        let times = spec.target_pulse_times();
        let peak = finite.iter().fold(0.0f64, |m, v| m.max(*v));
        for (w, f) in ws.iter().zip(&finite) {
            let exact = delta_pulse_filter(&times, tau, *w);
            // Exact zeros of the closed form are compared on the curve's scale.
            worst = worst.max((f - exact).abs() / exact.max(1e-6 * peak));
        }
    }
    worst
}

fn filter_delta_limit(grape_pulse: &PulseSequence) -> Outcome {
    let worst = delta_limit_gap(grape_pulse);
    let residual = point_infidelity(grape_pulse, ErrorPoint::NONE);
    outcome(
        worst <= 0.01,
        format!(
            "optimized pulse: max deviation {worst:.2e} over 301 points, N = 1, 2, 4, 8 (its infidelity at the origin is {residual:.1e}); exact-pi rCinBB: {:.2e}",
            delta_limit_gap(&rcinbb())
        ),
    )
}

/// Low-frequency `F/ω²` at detuning error `f`, relative to `f = 0`.
fn detuning_rise(variant: DdVariant, pi_pulse: &PulseSequence, f: f64) -> (f64, f64) {
    let tau = 5e-3;
    let w = 0.07 / tau;
    let value = |e: ErrorPoint| {
        let spec = DdSpec {
            variant,
            pulses: 1,
            window: tau,
            pi_pulse: pi_pulse.clone(),
            errors: e,
        };
        filter_function(&build_dd_control(&spec).unwrap(), e, &[w])[0] / (w * w)
    };
    let base = value(ErrorPoint::NONE);
    (base, value(ErrorPoint::new(0.0, f)) / base)
}

fn detuning_robustness(grape_pulse: &PulseSequence) -> Outcome {
    let (a0, a) = detuning_rise(DdVariant::Global, grape_pulse, 0.3);
    let bare = bare_pulse(PI, 0.0, PI / 10e-9).unwrap();
    let (b0, b) = detuning_rise(
        DdVariant::Sequential {
            slots: 121,
            slot: 61,
        },
        &bare,
        0.3,
    );
    let pass = (3.0..=6.0).contains(&a) && b > 50.0 && b / a > 10.0;
    outcome(
        pass,
        format!(
            "A_1 rises {a:.2}x from {a0:.2e}, B_1 rises {b:.1}x from {b0:.2e}, ratio {:.1}",
            b / a
        ),
    )
}

fn t2_enhancement(report: &PipelineReport) -> Outcome {
    let t2 = |s, n| report.summary(s, n, 0.2e-3).unwrap().t2_mean;
    let r2 = t2(Sequence::A, 2) / t2(Sequence::B, 2);
    let r16 = t2(Sequence::A, 16) / t2(Sequence::B, 16);
    let submerged: Vec<f64> = [4, 8, 16].iter().map(|&n| t2(Sequence::B, n)).collect();
    let pass = r2 >= 1.2 && r16 >= 5.0 && submerged.iter().all(|t| *t < 0.2e-3);
    let b = submerged
        .iter()
        .map(|t| format!("{:.3}", t * 1e3))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(
        pass,
        format!("T2_A/T2_B = {r2:.2} (N=2), {r16:.2} (N=16); T2_B at N = 4, 8, 16: {b} ms"),
    )
}

fn thermal_point_values() -> Outcome {
    let (cfg, s) = (FridgeConfig::default(), SampleConfig::default());
    let (ratio, _) = attenuation_chain(1.0, &cfg);
    let (_, active) = attenuation_chain(3.65e-3, &cfg);
    let total = total_heat_load(3.65e-3, &cfg, &s, DEFAULT_PASSIVE_LOAD).total;
    let cv = debye_cv(0.1, &s).unwrap();
    let pass = rel(ratio, 6.58e-5) <= 0.02
        && rel(active, 25.6e-6) <= 0.02
        && rel(total, 26.34e-6) <= 0.02
        && rel(cv, 6.42e-13) <= 0.05;
    outcome(
        pass,
        format!(
            "ratio {ratio:.3e}, h_act {:.2} uW, h_tot {:.2} uW, Cv(0.1 K) {cv:.3e} J/K",
            active * 1e6,
            total * 1e6
        ),
    )
}

/// Fidelity of the heralded state after local relaxation and dephasing.
fn composed_fidelity(alpha: f64, eta: f64, gamma: f64, p_th: f64, chi: [f64; 2]) -> f64 {
    let out = protocol_oracle(&ProtocolParams {
        alpha,
        eta,
        ..ProtocolParams::default()
    })
    .unwrap();
    let mut rho = out.click_c.state;
    for (q, c) in chi.iter().enumerate() {
        rho = apply_local(&rho, &thermal_kraus(gamma, p_th), q);
        rho = apply_local(&rho, &dephasing_kraus(0.5 * (1.0 - (-c).exp())), q);
    }
    validate_density(&rho).unwrap();
    bell_overlap(&rho, 0.0, 1.0)
}

fn protocol_closed_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut valid = true;
    for &alpha in &log_grid(1e-4, 0.3, 5) {
        for &eta in &log_grid(1e-3, 1.0, 5) {
            let out = protocol_oracle(&ProtocolParams {
                alpha,
                eta,
                phase_a: 0.3,
                phase_b: -0.2,
                ..ProtocolParams::default()
            })
            .unwrap();
            let p_click = 2.0 * alpha * eta - 2.0 * alpha * alpha * eta * eta;
            let fid = (1.0 - alpha) / (1.0 - alpha * eta);
            for d in [
                out.click_c.probability + out.click_d.probability - p_click,
                click_probability(alpha, eta) - p_click,
                out.fidelity_c - fid,
                out.fidelity_d - fid,
                heralded_fidelity(alpha, eta) - fid,
            ] {
                worst = worst.max(d.abs());
            }
            valid &= [&out.click_c, &out.click_d, &out.none]
                .iter()
                .all(|h| validate_density(&h.state).is_ok());
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut violations = 0;
    for _ in 0..100 {
        let alpha = 10f64.powf(rng.gen_range(-4.0..-2.0));
        let eta = 10f64.powf(rng.gen_range(-3.0..0.0));
        let env = Relaxation {
            t1: 10f64.powf(rng.gen_range(-1.0..0.0)),
            p_th: rng.gen_range(0.5..1.0),
        };
        let tau = rng.gen_range(2.1e-4..8.1e-4);
        let mut draw = || QubitCoherence {
            t2: 10f64.powf(rng.gen_range(-4.0..-2.5)),
            z: rng.gen_range(1.0..3.0),
            gate_error: 0.0,
        };
        let (qj, qk) = (draw(), draw());
        let bound = fidelity_lower_bound(alpha, tau, env, &qj, &qk);
        let exact = composed_fidelity(
            alpha,
            eta,
            -(-tau / env.t1).exp_m1(),
            env.p_th,
            [qj.chi(tau), qk.chi(tau)],
        );
        violations += usize::from(bound > exact);
    }
    let pass = worst <= 1e-10 && valid && violations == 0;
    outcome(pass, format!("max closed-form deviation {worst:.1e}, densities valid: {valid}, bound violations {violations}/100"))
}

fn link_regimes(report: &PipelineReport) -> Outcome {
    let links = |s, n, w| report.summary(s, n, w).unwrap().n_links;
    let counts = [2, 4, 8, 16];
    let short_a: Vec<usize> = counts
        .iter()
        .map(|&n| links(Sequence::A, n, 0.2e-3))
        .collect();
    let short_b: Vec<usize> = counts
        .iter()
        .map(|&n| links(Sequence::B, n, 0.2e-3))
        .collect();
    let long_a: Vec<usize> = counts
        .iter()
        .map(|&n| links(Sequence::A, n, 0.8e-3))
        .collect();
    let long_b: Vec<usize> = counts
        .iter()
        .map(|&n| links(Sequence::B, n, 0.8e-3))
        .collect();

    let b_short = short_b[0] == 14641 && short_b[1..].iter().all(|&l| l == 0);
    let a_short = short_a.iter().all(|l| (5000..=12000).contains(l));
    let b_long = long_b.iter().all(|&l| l == 0);
    let peak = *long_a.iter().max().unwrap();
    let a_long = peak > long_a[0] && peak > long_a[counts.len() - 1];
    let pass = b_short && a_short && b_long && a_long;
    outcome(
        pass,
        format!("0.2 ms: A {short_a:?}, B {short_b:?}; 0.8 ms: A {long_a:?}, B {long_b:?} (N = {counts:?})"),
    )
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn phases(t_a: u64, t_b: u64, p: u64, q: u64, k: u64) -> (u64, u64) {
    (k % (2 * t_a), (p * k / q) % (2 * t_b))
}

/// Smallest shift under which both phase sequences repeat, by direct search.
fn brute_period(t_a: u64, t_b: u64, p: u64, q: u64) -> u64 {
    let horizon = 4 * t_a * t_b * q;
    (1..=horizon)
        .find(|&s| (0..horizon).all(|k| phases(t_a, t_b, p, q, k) == phases(t_a, t_b, p, q, k + s)))
        .unwrap()
}

fn compiler_exactness() -> Outcome {
    let s = link_stats(&coincidence_schedule(2, 3, 2, 4), 2, 3);
    let fig = s.h(0) == 2.0 / 6.0 && s.h(1) == 3.0 / 6.0 && s.h(2) == 1.0 / 6.0;

    let mut bound_ok = true;
    for n_a in 1..=10 {
        for n_b in 1..=10 {
            let c = algorithm2_compile(n_a, n_b, 1e-6, 1).unwrap();
            bound_ok &= c.e_star >= n_a.max(n_b);
        }
    }

    let mut period_mismatch = 0;
    for t_a in 1..=12u64 {
        for t_b in 1..=12u64 {
            for p in 1..=12u64 {
                for q in 1..=12u64 {
                    if gcd(p, q) == 1
                        && fundamental_period(t_a, t_b, p, q).unwrap()
                            != brute_period(t_a, t_b, p, q)
                    {
                        period_mismatch += 1;
                    }
                }
            }
        }
    }

    let all_to_all = link_stats(&coincidence_schedule(5, 4, 1, 19), 5, 4).h(0) == 0.0;
    let pass = fig && bound_ok && period_mismatch == 0 && all_to_all;
    outcome(
        pass,
        format!(
            "h = ({:.4}, {:.4}, {:.4}), uniqueness bound held: {bound_ok}, period mismatches {period_mismatch}, 5x4 h0 = 0 in 20 slots: {all_to_all}",
            s.h(0),
            s.h(1),
            s.h(2)
        ),
    )
}

fn quantum_volume_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut failures = 0;
    for _ in 0..50 {
        let eps = 10f64.powf(rng.gen_range(-5.0..-0.61));
        let nodes = rng.gen_range(2..2000usize);
        let qv = quantum_volume(eps, nodes).unwrap();
        let mut best = (0usize, f64::NEG_INFINITY);
        for n in 2..=nodes {
            let v = (n as f64).min((1.0 / (n as f64 * eps)).floor());
            if v > best.1 {
                best = (n, v);
            }
        }
        let floor = (1.0 / eps.sqrt()).floor() as u64;
        if qv.log2_volume != best.0 || qv.bound != floor || qv.log2_volume as u64 > floor {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("{failures}/50 disagreements with exhaustive search or the floor bound"),
    )
}

fn strain_window() -> Outcome {
    let p = SivParams::default();
    let laser = c2_frequency(&p, 0.0).unwrap() - 60e9;
    let ens = draw_ensemble(11, 6e-5, 42).unwrap();
    let scan = StrainScan {
        lo: -6e-4,
        hi: 6e-4,
        step: 4e-7,
    };
    let w = find_strain_window(&ens, &p, laser, scan).unwrap();
    let mut centers: Vec<usize> = w.crossings.iter().map(|c| c.center).collect();
    centers.dedup();
    let once = centers.len() == w.crossings.len() && w.crossings.iter().all(|c| c.slope_sign == 1);
    let slopes: Vec<f64> = w
        .crossings
        .iter()
        .map(|c| {
            let (x, h) = (c.bias + c.strain, 1e-7);
            (c2_frequency(&p, x + h).unwrap() - c2_frequency(&p, x - h).unwrap()) / (2.0 * h)
        })
        .collect();
    let (lo, hi) = slopes
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), s| (a.min(*s), b.max(*s)));
    let pass = p.field == 0.17
        && w.lo < w.hi
        && !w.crossings.is_empty()
        && once
        && slopes.iter().all(|s| rel(*s, 0.5e15) <= 0.2);
    outcome(
        pass,
        format!(
            "window [{:.3e}, {:.3e}], {} centers included, {} excluded, C2 slope {:.3}-{:.3} PHz",
            w.lo,
            w.hi,
            w.crossings.len(),
            w.excluded.len(),
            lo / 1e15,
            hi / 1e15
        ),
    )
}

fn rabi_driving() -> Outcome {
    let p = SivParams {
        field: 0.25,
        ..SivParams::default()
    };
    let w = qubit_splitting(&p, 4e-6).unwrap();
    let dt = 2.0 * PI / (50.0 * w);
    let tr = simulate_rabi(&p, 4e-6, 1.56e-6, w, 0.0, 60e-9, dt).unwrap();
    let k = tr.times.len() / 400 + 1;
    let t: Vec<f64> = tr.times.iter().step_by(k).copied().collect();
    let y: Vec<f64> = tr.populations.iter().step_by(k).map(|p| p[1]).collect();
    let omega = fit_sin_squared(&t, &y).unwrap().omega;
    let flip = simulate_rabi(&p, 4e-6, 1.56e-6, w, 0.0, PI / omega, dt).unwrap();
    let infidelity = 1.0 - flip.populations.last().unwrap()[1];
    let pass = rel(omega, 200e6) <= 0.05 && infidelity < 3e-3;
    outcome(
        pass,
        format!(
            "fitted {:.2} Mrad/s, flip infidelity {:.3}%",
            omega / 1e6,
            infidelity * 100.0
        ),
    )
}

fn determinism(first: &PipelineReport, cfg: &PipelineConfig) -> Outcome {
    let again = run_pipeline(cfg).unwrap();
    let a = hetq_cli::stages::pipeline_artifacts(first, cfg.t_cmpl);
    let b = hetq_cli::stages::pipeline_artifacts(&again, cfg.t_cmpl);
    let bytes: usize = a.iter().map(|x| x.bytes.len()).sum();
    outcome(
        a == b,
        format!("{} artifacts, {bytes} bytes compared", a.len()),
    )
}

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn main() {
    let grape = GrapeConfig::default();
    let pipeline = PipelineConfig::default();
    let report = run_pipeline(&pipeline).unwrap();

    let criteria: Vec<(&str, Check)> = vec![
        ("composite point values", Box::new(composite_point_values)),
        (
            "optimized pulse robustness",
            Box::new(|| grape_robustness(&grape)),
        ),
        (
            "first-order cancellation",
            Box::new(first_order_cancellation),
        ),
        (
            "filter delta-pulse limit",
            Box::new(|| filter_delta_limit(&report.global_pulse)),
        ),
        (
            "detuning robustness ratio",
            Box::new(|| detuning_robustness(&report.global_pulse)),
        ),
        ("T2 enhancement", Box::new(|| t2_enhancement(&report))),
        ("thermal point values", Box::new(thermal_point_values)),
        ("protocol closed forms", Box::new(protocol_closed_forms)),
        ("link-count regimes", Box::new(|| link_regimes(&report))),
        ("compiler exactness", Box::new(compiler_exactness)),
        ("quantum volume formula", Box::new(quantum_volume_formula)),
        ("strain window", Box::new(strain_window)),
        ("Rabi driving", Box::new(rabi_driving)),
        ("determinism", Box::new(|| determinism(&report, &pipeline))),
    ];

    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "{} criterion {:>2} ({name}): {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
