//! Silicon-vacancy ground/excited-state model under strain and magnetic field.
//!
//! Both manifolds use the four-level basis `{|e−↓⟩, |e+↑⟩, |e+↓⟩, |e−↑⟩}`.
//! Matrix entries are frequencies in Hz; strain enters only through the
//! transverse coupling `−d·ε`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::numerics::{self, column, eigh, expm_hermitian, Mat4, NumericsError, C64};

/// Largest total strain the linearized transverse-strain model is used for.
pub const MAX_STRAIN: f64 = 1e-3;
/// Crossings are reported only where the detuning is below this, Hz.
pub const CROSSING_BAND_HZ: f64 = 0.2e9;

#[derive(Debug, thiserror::Error)]
pub enum SivError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown manifold `{0}` (expected `ground` or `excited`)")]
    UnknownManifold(String),
    #[error("strain {0:e} outside the low-strain regime |ε| ≤ {MAX_STRAIN:e}")]
    StrainOutOfRange(f64),
    #[error("scan does not cover the ensemble: {0}")]
    BadScan(String),
    #[error("no common window: centers without a positive-slope crossing: {0:?}")]
    NoCommonWindow(Vec<usize>),
    #[error("time step {dt:e} s too coarse for drive at {omega:e} rad/s (need ≤ {max:e} s)")]
    StepTooCoarse { dt: f64, omega: f64, max: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Manifold {
    Ground,
    Excited,
}

impl std::str::FromStr for Manifold {
    type Err = SivError;
    fn from_str(s: &str) -> Result<Self, SivError> {
        match s.to_ascii_lowercase().as_str() {
            "gs" | "ground" => Ok(Manifold::Ground),
            "es" | "excited" => Ok(Manifold::Excited),
            _ => Err(SivError::UnknownManifold(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SivParams {
    /// Spin-orbit splitting of the ground manifold, Hz.
    pub so_ground: f64,
    /// Spin-orbit splitting of the excited manifold, Hz.
    pub so_excited: f64,
    /// Orbital gyromagnetic ratio, Hz/T.
    pub gamma_orbital: f64,
    /// Spin gyromagnetic ratio, Hz/T.
    pub gamma_spin: f64,
    /// Field magnitude, T.
    pub field: f64,
    /// Unit field direction `(x, y, z)`; only x and z enter the model.
    pub field_dir: [f64; 3],
    /// Ground-state strain susceptibility, Hz per unit strain.
    pub strain_ground: f64,
    /// Excited-state strain susceptibility, Hz per unit strain.
    pub strain_excited: f64,
    /// Standard deviation of the static strain biases.
    pub bias_sigma: f64,
}

impl Default for SivParams {
    fn default() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        SivParams {
            so_ground: 46e9,
            so_excited: 255e9,
            gamma_orbital: 1.4e9,
            gamma_spin: 14e9,
            field: 0.17,
            field_dir: [h, 0.0, h],
            strain_ground: 1.3e15,
            strain_excited: 1.8e15,
            bias_sigma: 6e-5,
        }
    }
}

impl SivParams {
    pub fn validate(&self) -> Result<(), SivError> {
        let positive = [
            ("so_ground", self.so_ground),
            ("so_excited", self.so_excited),
            ("gamma_orbital", self.gamma_orbital),
            ("gamma_spin", self.gamma_spin),
            ("field", self.field),
            ("strain_ground", self.strain_ground),
            ("strain_excited", self.strain_excited),
            ("bias_sigma", self.bias_sigma),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SivError::InvalidParams(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        let n: f64 = self.field_dir.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (n - 1.0).abs() > 1e-9 {
            return Err(SivError::InvalidParams(format!(
                "field direction has norm {n}"
            )));
        }
        Ok(())
    }

    fn susceptibility(&self, m: Manifold) -> f64 {
        match m {
            Manifold::Ground => self.strain_ground,
            Manifold::Excited => self.strain_excited,
        }
    }

    /// Transverse strain energy `−d·ε` for a manifold, Hz.
    pub fn strain_energy(&self, m: Manifold, strain: f64) -> f64 {
        -self.susceptibility(m) * strain
    }
}

/// Four-level Hamiltonian of one manifold, Hz.
pub fn build_hamiltonian(m: Manifold, p: &SivParams, strain_energy: f64) -> Result<Mat4, SivError> {
    if !strain_energy.is_finite() {
        return Err(SivError::InvalidParams("non-finite strain energy".into()));
    }
    let so = match m {
        Manifold::Ground => p.so_ground,
        Manifold::Excited => p.so_excited,
    };
    let bx = p.field * p.field_dir[0];
    let bz = p.field * p.field_dir[2];
    let lz = p.gamma_orbital * bz;
    let sz = p.gamma_spin * bz;
    let sx = C64::new(p.gamma_spin * bx, 0.0);
    let e = C64::new(strain_energy, 0.0);
    let mut h = Mat4::from_real_diag([
        -so / 2.0 - lz - sz,
        -so / 2.0 + lz + sz,
        so / 2.0 + lz - sz,
        so / 2.0 - lz + sz,
    ]);
    h.0[0][2] = e;
    h.0[2][0] = e;
    h.0[1][3] = e;
    h.0[3][1] = e;
    h.0[0][3] = sx;
    h.0[3][0] = sx;
    h.0[1][2] = sx;
    h.0[2][1] = sx;
    Ok(h)
}

// Electron spin projection in the model basis (↓, ↑, ↓, ↑).
const SPIN_Z: [f64; 4] = [-1.0, 1.0, -1.0, 1.0];

fn spin_character(v: &[C64; 4]) -> f64 {
    v.iter().zip(SPIN_Z).map(|(c, s)| c.norm_sqr() * s).sum()
}

/// Energies and spin characters of the lower orbital branch.
fn lower_branch(m: Manifold, p: &SivParams, strain: f64) -> Result<[(f64, f64); 2], SivError> {
    let h = build_hamiltonian(m, p, p.strain_energy(m, strain))?;
    let (vals, vecs) = eigh(&h)?;
    Ok([0, 1].map(|k| (vals[k], spin_character(&column(&vecs, k)))))
}

/// Frequency of the spin-conserving lower-branch optical line, relative to
/// the zero-phonon offset, Hz.
///
/// The ground level is the qubit ground state (lowest eigenstate); its
/// excited-state partner is whichever of the two lowest excited levels has the
/// matching spin character.
pub fn c2_frequency(p: &SivParams, strain: f64) -> Result<f64, SivError> {
    if !(strain.abs() <= MAX_STRAIN) {
        return Err(SivError::StrainOutOfRange(strain));
    }
    let [(e_g, s_g), _] = lower_branch(Manifold::Ground, p, strain)?;
    let es = lower_branch(Manifold::Excited, p, strain)?;
    let partner = if es[0].1 * s_g >= es[1].1 * s_g {
        es[0]
    } else {
        es[1]
    };
    Ok(partner.0 - e_g)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterBias {
    pub index: usize,
    pub bias: f64,
}

/// `n` independent normal strain biases, reproducible for a given seed.
pub fn draw_ensemble(n: usize, sigma: f64, seed: u64) -> Result<Vec<CenterBias>, SivError> {
    if n == 0 || !(sigma > 0.0) {
        return Err(SivError::InvalidParams("need n ≥ 1 and σ > 0".into()));
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| SivError::InvalidParams(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|index| CenterBias {
            index,
            bias: normal.sample(&mut rng),
        })
        .collect())
}

/// Control-strain scan `[lo, hi]` with a fixed step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainScan {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl StrainScan {
    fn points(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step).ceil() as usize;
        (0..=n)
            .map(|k| (self.lo + k as f64 * self.step).min(self.hi))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub center: usize,
    pub bias: f64,
    /// Control strain at which the line meets the laser.
    pub strain: f64,
    pub slope_sign: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrainWindow {
    pub lo: f64,
    pub hi: f64,
    /// One positive-slope crossing per included center.
    pub crossings: Vec<Crossing>,
    /// Centers whose crossing falls outside the truncated window.
    pub excluded: Vec<usize>,
}

fn center_crossings(
    c: &CenterBias,
    p: &SivParams,
    laser: f64,
    grid: &[f64],
) -> Result<(Vec<Crossing>, Vec<f64>), SivError> {
    let detuning = |dc: f64| c2_frequency(p, c.bias + dc).map(|f| f - laser);
    let values = grid
        .iter()
        .map(|&dc| detuning(dc))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    for k in 0..grid.len() - 1 {
        let (a, b) = (values[k], values[k + 1]);
        if a.abs() >= CROSSING_BAND_HZ || b.abs() >= CROSSING_BAND_HZ {
            continue;
        }
        if (a == 0.0 || a.signum() == b.signum()) && !(a == 0.0 && b != 0.0) {
            continue;
        }
        let root = numerics::bisect(
            |dc| detuning(dc).unwrap_or(f64::NAN),
            grid[k],
            grid[k + 1],
            1e-9,
        )?;
        out.push(Crossing {
            center: c.index,
            bias: c.bias,
            strain: root,
            slope_sign: if b > a { 1 } else { -1 },
        });
    }
    // Local extrema of the detuning along the scan.
    let extrema = (1..grid.len() - 1)
        .filter(|&k| (values[k] - values[k - 1]) * (values[k + 1] - values[k]) <= 0.0)
        .map(|k| grid[k])
        .collect();
    Ok((out, extrema))
}

/// Common control-strain window in which every included center meets the
/// laser exactly once, on a rising slope.
///
/// `laser` is an absolute line frequency on the same scale as
/// [`c2_frequency`].
pub fn find_strain_window(
    ensemble: &[CenterBias],
    p: &SivParams,
    laser: f64,
    scan: StrainScan,
) -> Result<StrainWindow, SivError> {
    p.validate()?;
    if ensemble.is_empty() {
        return Err(SivError::BadScan("empty ensemble".into()));
    }
    if !(scan.step > 0.0) || !(scan.hi > scan.lo) {
        return Err(SivError::BadScan("need lo < hi and step > 0".into()));
    }
    if scan.hi - scan.lo < 4.0 * p.bias_sigma {
        return Err(SivError::BadScan(format!(
            "span {:e} narrower than 4σ = {:e}",
            scan.hi - scan.lo,
            4.0 * p.bias_sigma
        )));
    }
    for c in ensemble {
        for end in [scan.lo, scan.hi] {
            if (c.bias + end).abs() > MAX_STRAIN {
                return Err(SivError::BadScan(format!(
                    "center {} (bias {:e}) leaves the low-strain regime at control strain {:e}",
                    c.index, c.bias, end
                )));
            }
        }
    }
    let grid = scan.points();
    let per_center = ensemble
        .iter()
        .map(|c| center_crossings(c, p, laser, &grid))
        .collect::<Result<Vec<_>, _>>()?;

    let missing: Vec<usize> = ensemble
        .iter()
        .zip(&per_center)
        .filter(|(_, (x, _))| !x.iter().any(|c| c.slope_sign > 0))
        .map(|(c, _)| c.index)
        .collect();
    if !missing.is_empty() {
        return Err(SivError::NoCommonWindow(missing));
    }

    let first_rising: Vec<Crossing> = per_center
        .iter()
        .map(|(x, _)| *x.iter().find(|c| c.slope_sign > 0).expect("checked above"))
        .collect();
    let lo = first_rising
        .iter()
        .map(|c| c.strain)
        .fold(f64::INFINITY, f64::min);
    let hi = first_rising
        .iter()
        .map(|c| c.strain)
        .fold(f64::NEG_INFINITY, f64::max);

    // Truncate at the first additional crossing or turning point of any center.
    let limit = per_center
        .iter()
        .flat_map(|(x, ext)| {
            x.iter()
                .map(|c| c.strain)
                .filter(|&s| s > lo)
                .filter(|&s| !first_rising.iter().any(|r| r.strain == s))
                .chain(ext.iter().copied().filter(|&s| s > lo))
        })
        .fold(f64::INFINITY, f64::min);
    let (crossings, excluded): (Vec<Crossing>, Vec<Crossing>) = first_rising
        .into_iter()
        .partition(|c| c.strain <= hi.min(limit));
    if crossings.is_empty() {
        return Err(SivError::NoCommonWindow(
            ensemble.iter().map(|c| c.index).collect(),
        ));
    }
    let latest = crossings
        .iter()
        .map(|c| c.strain)
        .fold(f64::NEG_INFINITY, f64::max);
    // A lone crossing gives a degenerate interval; pad it by half a scan step.
    let (lo, hi) = if latest > lo {
        (lo, latest)
    } else {
        (
            lo - 0.5 * scan.step,
            (lo + 0.5 * scan.step).min(0.5 * (lo + limit)),
        )
    };
    Ok(StrainWindow {
        lo,
        hi,
        crossings,
        excluded: excluded.into_iter().map(|c| c.center).collect(),
    })
}

/// Populations of the four ground-manifold eigenlevels over time.
#[derive(Debug, Clone)]
pub struct RabiTrace {
    pub times: Vec<f64>,
    pub populations: Vec<[f64; 4]>,
    /// Largest `| ‖ψ‖ − 1 |` seen during integration.
    pub norm_drift: f64,
}

/// Splitting of the two lowest ground levels, in the integrator's angular units.
pub fn qubit_splitting(p: &SivParams, static_strain: f64) -> Result<f64, SivError> {
    let h = build_hamiltonian(
        Manifold::Ground,
        p,
        p.strain_energy(Manifold::Ground, static_strain),
    )?;
    let (vals, _) = eigh(&h)?;
    Ok(vals[1] - vals[0])
}

/// Strain-driven evolution of the ground manifold, starting in its lowest
/// eigenstate.
///
/// The integrator reads the matrix entries directly as angular frequencies
/// (rad/s): `ψ(t+dt) = exp(−i·H(t_mid)·dt)·ψ(t)` with the drive sampled at the
/// step midpoint. Drive frequency `omega_drive` is on the same scale.
pub fn simulate_rabi(
    p: &SivParams,
    static_strain: f64,
    drive_strain: f64,
    omega_drive: f64,
    drive_phase: f64,
    duration: f64,
    dt: f64,
) -> Result<RabiTrace, SivError> {
    p.validate()?;
    let max_dt = 2.0 * std::f64::consts::PI / (50.0 * omega_drive.abs().max(f64::MIN_POSITIVE));
    if !(dt > 0.0) || dt > max_dt * (1.0 + 1e-12) {
        return Err(SivError::StepTooCoarse {
            dt,
            omega: omega_drive,
            max: max_dt,
        });
    }
    if !(duration > 0.0) {
        return Err(SivError::InvalidParams("duration must be positive".into()));
    }
    let h0 = build_hamiltonian(
        Manifold::Ground,
        p,
        p.strain_energy(Manifold::Ground, static_strain),
    )?;
    let (_, basis) = eigh(&h0)?;
    let amp = C64::new(p.strain_energy(Manifold::Ground, drive_strain), 0.0);
    let mut drive = Mat4::zeros();
    for (i, j) in [(0, 2), (1, 3), (2, 0), (3, 1)] {
        drive.0[i][j] = amp;
    }

    let steps = (duration / dt).round().max(1.0) as usize;
    let dt = duration / steps as f64;
    let mut psi = column(&basis, 0);
    let bd = basis.dagger();
    let pops = |psi: &[C64; 4]| {
        let c = bd.mul_vec(psi);
        [0, 1, 2, 3].map(|k| c[k].norm_sqr())
    };
    let mut times = Vec::with_capacity(steps + 1);
    let mut populations = Vec::with_capacity(steps + 1);
    times.push(0.0);
    populations.push(pops(&psi));
    let mut norm_drift: f64 = 0.0;
    for k in 0..steps {
        let tm = (k as f64 + 0.5) * dt;
        let s = (omega_drive * tm + drive_phase).cos();
        let h = h0 + drive.scale(C64::new(s, 0.0));
        let u = expm_hermitian(&h, dt)?;
        psi = u.mul_vec(&psi);
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        norm_drift = norm_drift.max((norm - 1.0).abs());
        times.push((k + 1) as f64 * dt);
        populations.push(pops(&psi));
    }
    Ok(RabiTrace {
        times,
        populations,
        norm_drift,
    })
}
