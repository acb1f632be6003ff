//! Heralded remote entanglement: protocol statistics, decoherence channels,
//! per-link error and ensemble link metrics.

mod links;
mod protocol;

pub use links::{build_link_graph, draw_waiting_times, Edge, LinkGraph, Node};
pub use protocol::{
    bell_overlap, click_probability, heralded_fidelity, protocol_oracle, waiting_pmf, Herald,
    ProtocolOutcome, ProtocolParams,
};

use crate::numerics::{eigh, quad_adaptive, sigma_z, Mat, Mat2, Mat4, NumericsError, C64, ZERO};

const HBAR: f64 = 1.054_571_817e-34;
const BOLTZMANN: f64 = 1.380_649e-23;
/// Links at or above this averaged error are discarded.
pub const LINK_ERROR_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EntangleError {
    #[error("invalid protocol parameters: {0}")]
    InvalidParams(String),
    #[error("not a valid density matrix: {0}")]
    InvalidState(String),
    #[error("probability {name} = {value} outside [0, 1]")]
    Probability { name: &'static str, value: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

fn check_prob(name: &'static str, value: f64) -> Result<(), EntangleError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(EntangleError::Probability { name, value })
    }
}

/// Checks trace, hermiticity and positivity.
pub fn validate_density<const N: usize>(rho: &Mat<N>) -> Result<(), EntangleError> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
        return Err(EntangleError::InvalidState(format!("trace {tr}")));
    }
    if !rho.is_hermitian(1e-10) {
        return Err(EntangleError::InvalidState("not Hermitian".into()));
    }
    let (vals, _) = eigh(rho)?;
    if let Some(v) = vals.iter().find(|v| **v < -1e-12) {
        return Err(EntangleError::InvalidState(format!("eigenvalue {v}")));
    }
    Ok(())
}

fn apply_kraus(rho: &Mat2, kraus: &[Mat2]) -> Mat2 {
    kraus
        .iter()
        .fold(Mat2::zeros(), |acc, k| acc + *k * *rho * k.dagger())
}

fn real(m: [[f64; 2]; 2], scale: f64) -> Mat2 {
    Mat(m.map(|row| row.map(|v| C64::new(v * scale, 0.0))))
}

/// Kraus operators of generalized amplitude damping towards `|0⟩`-population `p_th`.
pub fn thermal_kraus(gamma: f64, p_th: f64) -> [Mat2; 4] {
    let (a, b) = (p_th.sqrt(), (1.0 - p_th).sqrt());
    let (s, g) = ((1.0 - gamma).sqrt(), gamma.sqrt());
    [
        real([[1.0, 0.0], [0.0, s]], a),
        real([[0.0, g], [0.0, 0.0]], a),
        real([[s, 0.0], [0.0, 1.0]], b),
        real([[0.0, 0.0], [g, 0.0]], b),
    ]
}

pub fn dephasing_kraus(p_dep: f64) -> [Mat2; 2] {
    [
        Mat2::identity().scale(C64::new((1.0 - p_dep).sqrt(), 0.0)),
        sigma_z().scale(C64::new(p_dep.sqrt(), 0.0)),
    ]
}

/// Generalized amplitude damping: `ρ00 → (1−γ)ρ00 + γp_th`, `ρ01 → √(1−γ)ρ01`.
pub fn thermal_channel(rho: &Mat2, gamma: f64, p_th: f64) -> Result<Mat2, EntangleError> {
    validate_density(rho)?;
    check_prob("γ", gamma)?;
    check_prob("p_th", p_th)?;
    Ok(apply_kraus(rho, &thermal_kraus(gamma, p_th)))
}

/// `(1−p)ρ + p σz ρ σz`.
pub fn dephasing_channel(rho: &Mat2, p_dep: f64) -> Result<Mat2, EntangleError> {
    validate_density(rho)?;
    check_prob("p_dep", p_dep)?;
    Ok(apply_kraus(rho, &dephasing_kraus(p_dep)))
}

/// Applies single-qubit Kraus operators to spin `qubit` (0 = first) of a
/// two-spin state.
pub fn apply_local(rho: &Mat4, kraus: &[Mat2], qubit: usize) -> Mat4 {
    let lift = |k: &Mat2| {
        let mut out = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let (ia, ib, ja, jb) = (i >> 1, i & 1, j >> 1, j & 1);
                out.0[i][j] = if qubit == 0 {
                    if ib == jb {
                        k.0[ia][ja]
                    } else {
                        ZERO
                    }
                } else if ia == ja {
                    k.0[ib][jb]
                } else {
                    ZERO
                };
            }
        }
        out
    };
    kraus
        .iter()
        .map(lift)
        .fold(Mat4::zeros(), |acc, k| acc + k * *rho * k.dagger())
}

/// Steady-state `|0⟩` population `1/(1 + e^{−ħω/k_BΘ})`.
pub fn p_thermal(omega: f64, theta: f64) -> f64 {
    1.0 / (1.0 + (-HBAR * omega / (BOLTZMANN * theta)).exp())
}

/// Per-qubit inputs to the link error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitCoherence {
    pub t2: f64,
    pub z: f64,
    /// Single-qubit gate error.
    pub gate_error: f64,
}

impl QubitCoherence {
    pub fn chi(&self, tau: f64) -> f64 {
        (tau / self.t2).powf(self.z)
    }
}

/// Relaxation environment shared by both spins of a link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relaxation {
    pub t1: f64,
    pub p_th: f64,
}

/// Lower bound on the averaged heralded-link fidelity after time `τ`.
pub fn fidelity_lower_bound(
    alpha: f64,
    tau: f64,
    env: Relaxation,
    qj: &QubitCoherence,
    qk: &QubitCoherence,
) -> f64 {
    let decay = (-tau / env.t1).exp();
    let population = 1.0 - decay * alpha - (1.0 - decay) * env.p_th;
    let (cj, ck) = (qj.chi(tau), qk.chi(tau));
    let phase = (1.0 + (-(cj + ck)).exp()
        - (-(-2.0 * cj).exp_m1()).sqrt() * (-(-2.0 * ck).exp_m1()).sqrt())
        / 2.0;
    population * phase
}

/// Two-qubit error of a link used after `τ` with `N` decoupling pulses per
/// window; the single-qubit term uses the mean of both qubits' gate errors.
pub fn epsilon_jk(
    alpha: f64,
    tau: f64,
    pulses: usize,
    env: Relaxation,
    qj: &QubitCoherence,
    qk: &QubitCoherence,
) -> f64 {
    let single = 0.5 * (qj.gate_error + qk.gate_error);
    1.0 - fidelity_lower_bound(alpha, tau, env, qj, qk) + (2 * pulses + 1) as f64 * single
}

/// `ε_jk` averaged over `[t_dds, t_dds + t_cmpl]`.
pub fn epsilon_jk_timeavg(
    alpha: f64,
    t_dds: f64,
    t_cmpl: f64,
    pulses: usize,
    env: Relaxation,
    qj: &QubitCoherence,
    qk: &QubitCoherence,
) -> Result<f64, EntangleError> {
    if !(t_cmpl > 0.0) {
        return Err(EntangleError::InvalidParams(format!(
            "t_cmpl = {t_cmpl} must be positive"
        )));
    }
    let integral = quad_adaptive(
        |t| epsilon_jk(alpha, t, pulses, env, qj, qk),
        t_dds,
        t_dds + t_cmpl,
        1e-8,
    )?;
    Ok(integral / t_cmpl)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSummary {
    /// Mean error over retained links; 1 when none are retained.
    pub eps_eff: f64,
    pub n_links: usize,
}

pub fn epsilon_eff_and_links<I: IntoIterator<Item = f64>>(errors: I) -> LinkSummary {
    let (sum, n) = errors
        .into_iter()
        .filter(|e| *e < LINK_ERROR_THRESHOLD)
        .fold((0.0, 0usize), |(s, n), e| (s + e, n + 1));
    if n == 0 {
        LinkSummary {
            eps_eff: 1.0,
            n_links: 0,
        }
    } else {
        LinkSummary {
            eps_eff: sum / n as f64,
            n_links: n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumVolume {
    /// Maximizing register width `n`, smallest on ties.
    pub log2_volume: usize,
    /// `min(n, d(n))` at the maximizer.
    pub objective: f64,
    /// `⌊1/√ε⌋`.
    pub bound: u64,
    /// Even two qubits cannot run a unit-depth circuit.
    pub sub_unit: bool,
}

/// Achievable circuit depth at width `n`: whole layers before the expected
/// error count reaches one.
pub fn circuit_depth(n: usize, eps_eff: f64) -> f64 {
    (1.0 / (n as f64 * eps_eff)).floor()
}

pub fn quantum_volume(eps_eff: f64, nodes: usize) -> Result<QuantumVolume, EntangleError> {
    if !(eps_eff > 0.0) || nodes < 2 {
        return Err(EntangleError::InvalidParams(format!(
            "need ε_eff > 0 and ≥ 2 nodes, got {eps_eff}, {nodes}"
        )));
    }
    let mut best = (2, f64::NEG_INFINITY);
    for n in 2..=nodes {
        let value = (n as f64).min(circuit_depth(n, eps_eff));
        if value > best.1 {
            best = (n, value);
        }
        if (n as f64) > 1.0 / (n as f64 * eps_eff) {
            break;
        }
    }
    Ok(QuantumVolume {
        log2_volume: best.0,
        objective: best.1,
        bound: (1.0 / eps_eff.sqrt()).floor() as u64,
        sub_unit: best.1 < 1.0,
    })
}
