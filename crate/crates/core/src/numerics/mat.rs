// Index loops read closer to the matrix algebra here.
#![allow(clippy::needless_range_loop)]

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::NumericsError;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat<const N: usize>(pub [[C64; N]; N]);

pub type Mat2 = Mat<2>;
pub type Mat4 = Mat<4>;

impl<const N: usize> Mat<N> {
    pub fn zeros() -> Self {
        Mat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_real_diag(d: [f64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = C64::new(d[i], 0.0);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z *= s);
        m
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        self.max_diff(&self.dagger()) <= rel_tol * scale
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.dagger() * *self).max_diff(&Self::identity()) <= tol
    }

    pub fn mul_vec(&self, v: &[C64; N]) -> [C64; N] {
        let mut out = [ZERO; N];
        for (i, row) in self.0.iter().enumerate() {
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl<const N: usize> Mul for Mat<N> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl<const N: usize> Add for Mat<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a += b;
        }
        self
    }
}

impl<const N: usize> Sub for Mat<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a -= b;
        }
        self
    }
}

pub fn sigma_x() -> Mat2 {
    Mat([[ZERO, ONE], [ONE, ZERO]])
}

pub fn sigma_y() -> Mat2 {
    Mat([[ZERO, -I], [I, ZERO]])
}

pub fn sigma_z() -> Mat2 {
    Mat([[ONE, ZERO], [ZERO, -ONE]])
}

/// `n·σ` for a real 3-vector.
pub fn pauli_dot(n: [f64; 3]) -> Mat2 {
    Mat([
        [C64::new(n[2], 0.0), C64::new(n[0], -n[1])],
        [C64::new(n[0], n[1]), C64::new(-n[2], 0.0)],
    ])
}

/// `exp(-i·angle/2·(n̂·σ))`; the axis is normalized internally.
pub fn matexp_pauli(n: [f64; 3], angle: f64) -> Result<Mat2, NumericsError> {
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if len == 0.0 || !len.is_finite() {
        if angle == 0.0 {
            return Ok(Mat2::identity());
        }
        return Err(NumericsError::DegenerateAxis);
    }
    Ok(rotation([n[0] / len, n[1] / len, n[2] / len], angle))
}

/// Same as [`matexp_pauli`] for an axis already known to be unit length.
#[inline]
pub fn rotation(u: [f64; 3], angle: f64) -> Mat2 {
    let (s, c) = (angle / 2.0).sin_cos();
    Mat([
        [C64::new(c, -s * u[2]), C64::new(-s * u[1], -s * u[0])],
        [C64::new(s * u[1], -s * u[0]), C64::new(c, s * u[2])],
    ])
}

/// Rotation of the Bloch vector induced by `u`: `u σ_b u† = Σ_a R[a][b] σ_a`.
pub fn bloch_rotation(u: &Mat2) -> [[f64; 3]; 3] {
    let paulis = [sigma_x(), sigma_y(), sigma_z()];
    let ud = u.dagger();
    let mut r = [[0.0; 3]; 3];
    for (b, sb) in paulis.iter().enumerate() {
        let conj = *u * *sb * ud;
        for (a, sa) in paulis.iter().enumerate() {
            r[a][b] = 0.5 * (*sa * conj).trace().re;
        }
    }
    r
}

pub fn outer<const N: usize>(a: &[C64; N], b: &[C64; N]) -> Mat<N> {
    let mut m = Mat::<N>::zeros();
    for i in 0..N {
        for j in 0..N {
            m.0[i][j] = a[i] * b[j].conj();
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn series_expm(a: &Mat2, order: usize) -> Mat2 {
        let mut term = Mat2::identity();
        let mut acc = Mat2::identity();
        for k in 1..=order {
            term = (term * *a).scale(C64::new(1.0 / k as f64, 0.0));
            acc = acc + term;
        }
        acc
    }

    #[test]
    fn pi_about_x_is_minus_i_sigma_x() {
        let u = matexp_pauli([1.0, 0.0, 0.0], PI).unwrap();
        assert!(u.max_diff(&sigma_x().scale(-I)) < 1e-15);
    }

    #[test]
    fn zero_angle_is_identity() {
        let u = matexp_pauli([0.0, 0.0, 1.0], 0.0).unwrap();
        assert!(u.max_diff(&Mat2::identity()) < 1e-15);
        assert!(matexp_pauli([0.0; 3], 0.0).is_ok());
    }

    #[test]
    fn degenerate_axis_errors() {
        assert!(matches!(
            matexp_pauli([0.0; 3], 1.0),
            Err(NumericsError::DegenerateAxis)
        ));
    }

    #[test]
    fn half_pi_matches_series() {
        let u = matexp_pauli([1.0, 0.0, 0.0], PI / 2.0).unwrap();
        let gen = sigma_x().scale(C64::new(0.0, -PI / 4.0));
        let oracle = series_expm(&gen, 30);
        assert!(u.max_diff(&oracle) < 1e-14);
        let expect = (Mat2::identity() - sigma_x().scale(I)).scale(ONE / 2f64.sqrt());
        assert!(u.max_diff(&expect) < 1e-15);
        assert!(u.is_unitary(1e-12));
    }

    #[test]
    fn unnormalized_axis_is_normalized() {
        let a = matexp_pauli([0.0, 3.0, 4.0], 1.3).unwrap();
        let b = matexp_pauli([0.0, 0.6, 0.8], 1.3).unwrap();
        assert!(a.max_diff(&b) < 1e-15);
    }

    #[test]
    fn bloch_rotation_of_pi_x_flips_y_and_z() {
        let r = bloch_rotation(&rotation([1.0, 0.0, 0.0], PI));
        let expect = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]];
        for a in 0..3 {
            for b in 0..3 {
                assert!((r[a][b] - expect[a][b]).abs() < 1e-14);
            }
        }
    }
}
