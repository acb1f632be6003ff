//! Brute-force Fock-space model of single-photon heralding between two spins.
//!
//! Spin `|0⟩` emits one photon. Each photon survives to the beamsplitter with
//! probability η or leaks into its own loss mode; survivors meet on a 50:50
//! beamsplitter with outputs C and D, and both outputs are photon-number
//! resolved.

use std::collections::BTreeMap;

use crate::numerics::{Mat4, C64, ZERO};

use super::EntangleError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    /// Bright-state population of each spin.
    pub alpha: f64,
    /// Photon survival probability from emitter to detector.
    pub eta: f64,
    pub phase_a: f64,
    pub phase_b: f64,
    /// Attempts available per window.
    pub max_attempts: u64,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams {
            alpha: 1e-4,
            eta: 1e-2,
            phase_a: 0.0,
            phase_b: 0.0,
            max_attempts: 1 << 20,
        }
    }
}

impl ProtocolParams {
    pub fn validate(&self) -> Result<(), EntangleError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0)
            || !(self.eta > 0.0 && self.eta <= 1.0)
            || self.max_attempts == 0
        {
            return Err(EntangleError::InvalidParams(format!(
                "need α ∈ (0,1), η ∈ (0,1], M ≥ 1; got α = {}, η = {}, M = {}",
                self.alpha, self.eta, self.max_attempts
            )));
        }
        Ok(())
    }
}

/// Heralded spin state for one detector outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Herald {
    pub probability: f64,
    /// Normalized two-spin density matrix, basis `|s_a s_b⟩` with index `2s_a + s_b`.
    pub state: Mat4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOutcome {
    /// Exactly one photon at C, none at D.
    pub click_c: Herald,
    /// Exactly one photon at D, none at C.
    pub click_d: Herald,
    /// No photon at either detector.
    pub none: Herald,
    /// Two photons reached the detectors.
    pub p_double: f64,
    /// `⟨Ψ+|ρ_C|Ψ+⟩` with `Ψ± = (|01⟩ ± e^{iΔφ}|10⟩)/√2`, `Δφ = φ_a − φ_b`.
    pub fidelity_c: f64,
    /// `⟨Ψ−|ρ_D|Ψ−⟩`.
    pub fidelity_d: f64,
}

/// Photon numbers in (C, D, loss_a, loss_b).
type Modes = [u8; 4];
/// Creation-operator polynomial: (spin a, spin b, mode exponents) → coefficient.
type Poly = BTreeMap<(u8, u8, Modes), C64>;

fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

pub fn protocol_oracle(p: &ProtocolParams) -> Result<ProtocolOutcome, EntangleError> {
    p.validate()?;
    let spin_amp = |s: u8, phase: f64| {
        if s == 0 {
            C64::new(p.alpha.sqrt(), 0.0)
        } else {
            C64::from_polar((1.0 - p.alpha).sqrt(), phase)
        }
    };
    let t = (p.eta / 2.0).sqrt();
    let leak = (1.0 - p.eta).sqrt();
    // Creation operator of each emitter's photon after loss and beamsplitter.
    let photon = |emitter: usize| -> Vec<(Modes, f64)> {
        let sign = if emitter == 0 { 1.0 } else { -1.0 };
        let mut loss = [0u8; 4];
        loss[2 + emitter] = 1;
        vec![([1, 0, 0, 0], t), ([0, 1, 0, 0], sign * t), (loss, leak)]
    };
    let mut poly = Poly::new();
    for sa in 0..2u8 {
        for sb in 0..2u8 {
            let mut terms: Vec<(Modes, C64)> =
                vec![([0; 4], spin_amp(sa, p.phase_a) * spin_amp(sb, p.phase_b))];
            for (emitter, s) in [sa, sb].into_iter().enumerate() {
                if s != 0 {
                    continue;
                }
                terms = terms
                    .iter()
                    .flat_map(|(m, c)| {
                        photon(emitter).into_iter().map(move |(dm, k)| {
                            let mut next = *m;
                            next.iter_mut().zip(dm).for_each(|(a, b)| *a += b);
                            (next, c * k)
                        })
                    })
                    .collect();
            }
            for (m, c) in terms {
                *poly.entry((sa, sb, m)).or_insert(ZERO) += c;
            }
        }
    }
    // Operator coefficients to Fock amplitudes, grouped by detector outcome and
    // loss configuration.
    let mut branches: BTreeMap<([u8; 2], [u8; 2]), [C64; 4]> = BTreeMap::new();
    for ((sa, sb, m), c) in poly {
        let norm: f64 = m.iter().map(|&n| factorial(n)).product::<f64>().sqrt();
        let amp = branches
            .entry(([m[0], m[1]], [m[2], m[3]]))
            .or_insert([ZERO; 4]);
        amp[(2 * sa + sb) as usize] += c * norm;
    }
    let mut rho: BTreeMap<[u8; 2], Mat4> = BTreeMap::new();
    for ((det, _), amp) in &branches {
        let r = rho.entry(*det).or_insert_with(Mat4::zeros);
        for i in 0..4 {
            for j in 0..4 {
                r.0[i][j] += amp[i] * amp[j].conj();
            }
        }
    }
    let herald = |det: [u8; 2]| -> Herald {
        let r = rho.get(&det).cloned().unwrap_or_else(Mat4::zeros);
        let prob = r.trace().re;
        let state = if prob > 0.0 {
            r.scale(C64::new(1.0 / prob, 0.0))
        } else {
            r
        };
        Herald {
            probability: prob,
            state,
        }
    };
    let click_c = herald([1, 0]);
    let click_d = herald([0, 1]);
    let none = herald([0, 0]);
    let p_double = [[2, 0], [0, 2], [1, 1]]
        .iter()
        .map(|d| herald(*d).probability)
        .sum();
    let dphi = p.phase_a - p.phase_b;
    let fidelity_c = bell_overlap(&click_c.state, dphi, 1.0);
    let fidelity_d = bell_overlap(&click_d.state, dphi, -1.0);
    Ok(ProtocolOutcome {
        click_c,
        click_d,
        none,
        p_double,
        fidelity_c,
        fidelity_d,
    })
}

/// `⟨Ψ|ρ|Ψ⟩` for `Ψ = (|01⟩ + sign·e^{iΔφ}|10⟩)/√2`.
pub fn bell_overlap(rho: &Mat4, dphi: f64, sign: f64) -> f64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [
        ZERO,
        C64::new(s, 0.0),
        C64::from_polar(sign * s, dphi),
        ZERO,
    ];
    let v = rho.mul_vec(&psi);
    psi.iter().zip(v).map(|(a, b)| a.conj() * b).sum::<C64>().re
}

/// Single-port click probability `αη − α²η²` summed over both ports.
pub fn click_probability(alpha: f64, eta: f64) -> f64 {
    2.0 * alpha * eta - 2.0 * alpha * alpha * eta * eta
}

/// Heralded-state fidelity `(1 − α)/(1 − αη)`.
pub fn heralded_fidelity(alpha: f64, eta: f64) -> f64 {
    (1.0 - alpha) / (1.0 - alpha * eta)
}

/// Probability that the first success occurs on attempt `m ≥ 1`, with the
/// linearized per-attempt success `2αη`.
pub fn waiting_pmf(m: u64, alpha: f64, eta: f64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let p = 2.0 * alpha * eta;
    p * (1.0 - p).powf((m - 1) as f64)
}
