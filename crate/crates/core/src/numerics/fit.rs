use super::NumericsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinSquaredFit {
    /// Angular frequency, rad/s.
    pub omega: f64,
    pub amplitude: f64,
    pub offset: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

// For fixed omega the model A·sin²(Ωt/2) + c is linear in (A, c).
fn solve_linear(t: &[f64], y: &[f64], omega: f64) -> (f64, f64, f64) {
    let n = t.len() as f64;
    let (mut sb, mut sbb, mut sy, mut sby) = (0.0, 0.0, 0.0, 0.0);
    for (&ti, &yi) in t.iter().zip(y) {
        let b = (0.5 * omega * ti).sin().powi(2);
        sb += b;
        sbb += b * b;
        sy += yi;
        sby += b * yi;
    }
    let det = n * sbb - sb * sb;
    let (a, c) = if det.abs() < 1e-300 {
        (0.0, sy / n)
    } else {
        ((n * sby - sb * sy) / det, (sbb * sy - sb * sby) / det)
    };
    let sse: f64 = t
        .iter()
        .zip(y)
        .map(|(&ti, &yi)| (a * (0.5 * omega * ti).sin().powi(2) + c - yi).powi(2))
        .sum();
    (a, c, (sse / n).sqrt())
}

fn golden<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Least-squares fit of `y ≈ A·sin²(Ωt/2) + c`.
///
/// Dense scan of Ω between one half-cycle over the record and the Nyquist
/// limit, then golden-section refinement of the best bracket.
pub fn fit_sin_squared(t: &[f64], y: &[f64]) -> Result<SinSquaredFit, NumericsError> {
    if t.len() != y.len() || t.len() < 8 {
        return Err(NumericsError::FitInput(
            "need at least 8 paired samples".into(),
        ));
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let spread = y.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    if spread < 1e-12 {
        return Err(NumericsError::NoOscillation);
    }
    let span =
        t.iter().cloned().fold(f64::MIN, f64::max) - t.iter().cloned().fold(f64::MAX, f64::min);
    let dt_min = t
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .filter(|d| *d > 0.0)
        .fold(f64::MAX, f64::min);
    if !(span > 0.0) {
        return Err(NumericsError::FitInput("zero time span".into()));
    }
    let lo = std::f64::consts::PI / span;
    let hi = std::f64::consts::PI / dt_min;
    let n_scan = (8.0 * hi / lo).clamp(200.0, 200_000.0) as usize;
    let grid: Vec<f64> = (0..=n_scan)
        .map(|k| lo + (hi - lo) * k as f64 / n_scan as f64)
        .collect();
    let rms: Vec<f64> = grid.iter().map(|&w| solve_linear(t, y, w).2).collect();
    let best = rms
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(n_scan)];
    let omega = golden(|w| solve_linear(t, y, w).2, a, b, 200);
    let (amplitude, offset, residual) = solve_linear(t, y, omega);
    Ok(SinSquaredFit {
        omega,
        amplitude,
        offset,
        residual,
    })
}
