//! Global strain waveform and coincidence scheduling between two registers.
//!
//! A register whose qubits are swept in turn emits in the order of the
//! triangular sequence `1, 2, …, N, N, …, 1`. Scheduling runs on an integer
//! step grid: register B advances one qubit per step and register A one
//! qubit every `m_scal` steps.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompilerError {
    #[error("set-points must be strictly monotonic (violated at index {0})")]
    NotMonotonic(usize),
    #[error("dwell {dwell:e} s must exceed the emission time 1/γ = {min:e} s")]
    DwellTooShort { dwell: f64, min: f64 },
    #[error("invalid schedule configuration: {0}")]
    InvalidConfig(String),
    #[error("speed ratio {p}/{q} is not reduced; reduce the ratio first")]
    UnreducedRatio { p: u64, q: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleConfig {
    /// Strain at which each qubit crosses the laser, in sweep order.
    pub setpoints: Vec<f64>,
    /// Dwell per qubit, s.
    pub dwell: f64,
    /// Largest allowed strain slew rate, 1/s.
    pub max_slope: f64,
    /// Optical emission rate, 1/s.
    pub emission_rate: f64,
}

impl ScheduleConfig {
    pub fn validate(&self) -> Result<(), CompilerError> {
        if self.setpoints.is_empty() || !(self.max_slope > 0.0) || !(self.emission_rate > 0.0) {
            return Err(CompilerError::InvalidConfig(
                "need set-points, a positive slew limit and a positive emission rate".into(),
            ));
        }
        let rising = self.setpoints.len() < 2 || self.setpoints[1] > self.setpoints[0];
        if let Some(i) =
            self.setpoints
                .windows(2)
                .position(|w| if rising { w[1] <= w[0] } else { w[1] >= w[0] })
        {
            return Err(CompilerError::NotMonotonic(i + 1));
        }
        if self.dwell <= 1.0 / self.emission_rate {
            return Err(CompilerError::DwellTooShort {
                dwell: self.dwell,
                min: 1.0 / self.emission_rate,
            });
        }
        Ok(())
    }
}

/// Periodic piecewise-linear strain waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveWaveform {
    /// `(t, strain)` over one period, starting at `t = 0`; the value at
    /// `t = period` equals the first entry.
    pub breakpoints: Vec<(f64, f64)>,
    pub period: f64,
    /// Dwell per qubit after slew clamping, s.
    pub dwell: f64,
}

impl DriveWaveform {
    pub fn value(&self, t: f64) -> f64 {
        let t = t.rem_euclid(self.period);
        let k = ((t / self.dwell).floor() as usize).min(self.breakpoints.len() - 1);
        let (t0, s0) = self.breakpoints[k];
        let s1 = self
            .breakpoints
            .get(k + 1)
            .map_or(self.breakpoints[0].1, |b| b.1);
        s0 + (s1 - s0) * (t - t0) / self.dwell
    }

    pub fn max_slope(&self) -> f64 {
        let n = self.breakpoints.len();
        (0..n)
            .map(|k| (self.breakpoints[(k + 1) % n].1 - self.breakpoints[k].1).abs() / self.dwell)
            .fold(0.0, f64::max)
    }
}

/// Sweeps the set-points up and back down, holding each end for one dwell so
/// the emission order follows the triangular sequence. The dwell is stretched
/// when the steepest step would exceed the slew limit.
pub fn algorithm1_drive(cfg: &ScheduleConfig) -> Result<DriveWaveform, CompilerError> {
    cfg.validate()?;
    let s = &cfg.setpoints;
    let steepest = s
        .windows(2)
        .map(|w| (w[1] - w[0]).abs() / cfg.dwell)
        .fold(0.0, f64::max);
    let excess = steepest / cfg.max_slope;
    let dwell = cfg.dwell * ((excess - 1.0).max(0.0) + 1.0);
    let values = s.iter().chain(s.iter().rev());
    let breakpoints = values
        .enumerate()
        .map(|(k, &v)| (k as f64 * dwell, v))
        .collect();
    Ok(DriveWaveform {
        breakpoints,
        period: 2.0 * s.len() as f64 * dwell,
        dwell,
    })
}

/// Qubit label (1-based) emitting in slot `j` of an `n`-qubit sweep.
pub fn triangular_sequence(n: usize, j: usize) -> usize {
    let r = j % (2 * n);
    1 + r.min(2 * n - 1 - r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Attempt {
    pub slot: usize,
    pub a: usize,
    pub b: usize,
}

/// Attempts for A-slots `0..=j_max` when B runs `m_scal` times faster.
pub fn coincidence_schedule(n_a: usize, n_b: usize, m_scal: usize, j_max: usize) -> Vec<Attempt> {
    (0..=j_max)
        .map(|j| Attempt {
            slot: j,
            a: triangular_sequence(n_a, j),
            b: triangular_sequence(n_b, m_scal * j),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkStats {
    /// Fraction of the `N_a·N_b` pairs attempted exactly `j` times.
    pub h: BTreeMap<usize, f64>,
    /// Distinct pairs attempted at least once.
    pub unique: usize,
    pub attempts: usize,
}

impl LinkStats {
    pub fn h(&self, j: usize) -> f64 {
        self.h.get(&j).copied().unwrap_or(0.0)
    }
}

pub fn link_stats(attempts: &[Attempt], n_a: usize, n_b: usize) -> LinkStats {
    let mut counts = vec![0usize; n_a * n_b];
    for at in attempts {
        counts[(at.a - 1) * n_b + (at.b - 1)] += 1;
    }
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for c in &counts {
        *hist.entry(*c).or_default() += 1;
    }
    let total = (n_a * n_b) as f64;
    LinkStats {
        h: hist
            .into_iter()
            .map(|(j, n)| (j, n as f64 / total))
            .collect(),
        unique: counts.iter().filter(|c| **c > 0).count(),
        attempts: attempts.len(),
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Smallest `T` after which A's phase `k mod 2T_a` and B's phase
/// `⌊pk/q⌋ mod 2T_b` both repeat.
pub fn fundamental_period(t_a: u64, t_b: u64, p: u64, q: u64) -> Result<u64, CompilerError> {
    if t_a == 0 || t_b == 0 || p == 0 || q == 0 {
        return Err(CompilerError::InvalidConfig(
            "all period inputs must be positive".into(),
        ));
    }
    if gcd(p, q) != 1 {
        return Err(CompilerError::UnreducedRatio { p, q });
    }
    let w = 2 * t_b * q;
    Ok(lcm(2 * t_a, w / gcd(p, w)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingStats {
    pub m_scal: usize,
    /// Fundamental period in A-slots.
    pub period: usize,
    pub stats: LinkStats,
    /// Fewest A-slots after which `h_0` reaches its value over the full window.
    pub min_window: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Compilation {
    pub m_star: usize,
    /// Distinct links attempted at `m_star`.
    pub e_star: usize,
    /// A-slot length at `m_star`, s.
    pub slot_duration: f64,
    pub sweep: Vec<ScalingStats>,
}

/// Sweeps the speed ratio and keeps the one attempting the most distinct
/// links (smallest ratio on ties). The window is `window_periods`
/// fundamental periods.
pub fn algorithm2_compile(
    n_a: usize,
    n_b: usize,
    base_step: f64,
    window_periods: usize,
) -> Result<Compilation, CompilerError> {
    if n_a == 0 || n_b == 0 || window_periods == 0 || !(base_step > 0.0) {
        return Err(CompilerError::InvalidConfig(
            "register sizes, window and step must be positive".into(),
        ));
    }
    let mut sweep = Vec::new();
    for m in 1..=n_a.min(n_b) {
        let period = fundamental_period(n_a as u64, n_b as u64, m as u64, 1)? as usize;
        let slots = period * window_periods;
        let attempts = coincidence_schedule(n_a, n_b, m, slots - 1);
        let stats = link_stats(&attempts, n_a, n_b);
        let mut seen = vec![false; n_a * n_b];
        let mut covered = 0;
        let mut min_window = 0;
        for (i, at) in attempts.iter().enumerate() {
            let idx = (at.a - 1) * n_b + (at.b - 1);
            if !seen[idx] {
                seen[idx] = true;
                covered += 1;
                if covered == stats.unique {
                    min_window = i + 1;
                    break;
                }
            }
        }
        sweep.push(ScalingStats {
            m_scal: m,
            period,
            stats,
            min_window,
        });
    }
    let best = sweep.iter().fold(&sweep[0], |b, s| {
        if s.stats.unique > b.stats.unique {
            s
        } else {
            b
        }
    });
    Ok(Compilation {
        m_star: best.m_scal,
        e_star: best.stats.unique,
        slot_duration: best.m_scal as f64 * base_step,
        sweep,
    })
}
