use super::mat::{Mat, C64, ONE, ZERO};
use super::NumericsError;

const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi.
///
/// Eigenvalues come back ascending; column `k` of the returned matrix is the
/// eigenvector for eigenvalue `k`, phased so its largest component is real
/// and positive.
pub fn eigh<const N: usize>(h: &Mat<N>) -> Result<([f64; N], Mat<N>), NumericsError> {
    if !h.is_hermitian(1e-12) {
        return Err(NumericsError::NotHermitian);
    }
    let mut a = *h;
    let mut v = Mat::<N>::identity();
    let scale = h.norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..N)
            .flat_map(|i| (0..N).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.0[i][j].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-16 * scale {
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                let apq = a.0[p][q];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = a.0[p][p].re;
                let aqq = a.0[q][q].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = D·P with D = diag(1, conj(phase)) on (p, q) and P the real
                // rotation annihilating the now-real off-diagonal element.
                let mut j = Mat::<N>::identity();
                j.0[p][p] = C64::new(c, 0.0);
                j.0[p][q] = C64::new(s, 0.0);
                j.0[q][p] = -phase.conj() * s;
                j.0[q][q] = phase.conj() * c;
                a = j.dagger() * a * j;
                a.0[p][q] = ZERO;
                a.0[q][p] = ZERO;
                v = v * j;
            }
        }
    }

    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&x, &y| a.0[x][x].re.total_cmp(&a.0[y][y].re));
    let mut vals = [0.0; N];
    let mut vecs = Mat::<N>::zeros();
    for (k, &src) in order.iter().enumerate() {
        vals[k] = a.0[src][src].re;
        let big = (0..N)
            .max_by(|&x, &y| v.0[x][src].norm().total_cmp(&v.0[y][src].norm()))
            .unwrap_or(0);
        let ph = v.0[big][src];
        let fix = if ph.norm() > 0.0 {
            ph.conj() / ph.norm()
        } else {
            ONE
        };
        for r in 0..N {
            vecs.0[r][k] = v.0[r][src] * fix;
        }
    }
    Ok((vals, vecs))
}

/// `exp(-i·H·t)` for Hermitian `H` through its eigen-decomposition.
pub fn expm_hermitian<const N: usize>(h: &Mat<N>, t: f64) -> Result<Mat<N>, NumericsError> {
    let (vals, vecs) = eigh(h)?;
    let mut d = Mat::<N>::zeros();
    for (k, &lam) in vals.iter().enumerate() {
        d.0[k][k] = C64::from_polar(1.0, -lam * t);
    }
    Ok(vecs * d * vecs.dagger())
}

/// Column `k` of an eigenvector matrix.
pub fn column<const N: usize>(v: &Mat<N>, k: usize) -> [C64; N] {
    let mut out = [ZERO; N];
    for (r, o) in out.iter_mut().enumerate() {
        *o = v.0[r][k];
    }
    out
}
