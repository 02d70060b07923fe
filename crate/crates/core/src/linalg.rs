//! Small complex linear-algebra helpers shared across the crate.

use std::f64::consts::PI;
use std::ops::{Index, IndexMut, Mul};

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    if x > -PI && x <= PI {
        return x;
    }
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    // rem_euclid can round to exactly 2pi
    if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

/// A 4x4 complex matrix. Used for projected mode transforms (ordered
/// C0, C1, T0, T1) and for two-photon transforms on the coincidence basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4(pub [[Complex64; 4]; 4]);

impl Mat4 {
    pub fn zeros() -> Self {
        Mat4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_real(rows: [[f64; 4]; 4]) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = Complex64::new(rows[i][j], 0.0);
            }
        }
        m
    }

    /// Build from element-wise amplitudes and phases (phasor form).
    pub fn from_polar(amplitudes: &[[f64; 4]; 4], phases: &[[f64; 4]; 4]) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = Complex64::from_polar(amplitudes[i][j], phases[i][j]);
            }
        }
        m
    }

    pub fn amplitudes(&self) -> [[f64; 4]; 4] {
        self.map(|z| z.norm())
    }

    /// Element phases wrapped to `(-pi, pi]`.
    pub fn phases(&self) -> [[f64; 4]; 4] {
        self.map(|z| wrap_phase(z.arg()))
    }

    fn map(&self, f: impl Fn(Complex64) -> f64) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = f(self.0[i][j]);
            }
        }
        out
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    /// `Tr(A^dagger A)`, the squared Hilbert-Schmidt norm.
    pub fn hs_norm_sqr(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut m = *self;
        for z in m.0.iter_mut().flatten() {
            *z *= s;
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn column_norm(&self, col: usize) -> f64 {
        (0..4).map(|i| self.0[i][col].norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for Mat4 {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        let mut m = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        m
    }
}

impl Serialize for Mat4 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self
            .0
            .iter()
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat4 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
            return Err(D::Error::custom("expected a 4x4 matrix of [re, im] pairs"));
        }
        let mut m = Mat4::zeros();
        for (i, row) in rows.iter().enumerate() {
            for (j, [re, im]) in row.iter().enumerate() {
                m.0[i][j] = Complex64::new(*re, *im);
            }
        }
        Ok(m)
    }
}

/// Serde adapter for `Array2<Complex64>` as row-major nested `[re, im]` pairs.
pub mod complex_array {
    use super::*;

    pub fn serialize<S: Serializer>(a: &Array2<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = a
            .rows()
            .into_iter()
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Array2<Complex64>, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(D::Error::custom("ragged complex matrix"));
        }
        let flat: Vec<Complex64> = rows
            .into_iter()
            .flatten()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        Array2::from_shape_vec((n_rows, n_cols), flat).map_err(D::Error::custom)
    }
}

/// Haar-random `n x n` unitary from Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Array2<Complex64> {
    let mut a = Array2::from_shape_fn((n, n), |_| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    for j in 0..n {
        for k in 0..j {
            let proj: Complex64 = (0..n).map(|i| a[[i, k]].conj() * a[[i, j]]).sum();
            for i in 0..n {
                let v = a[[i, k]];
                a[[i, j]] -= proj * v;
            }
        }
        let norm = (0..n).map(|i| a[[i, j]].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            a[[i, j]] /= norm;
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn wrap_phase_range() {
        assert_eq!(wrap_phase(PI), PI);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(2.0 * PI + 0.5) - 0.5).abs() < 1e-12);
        assert!((wrap_phase(-0.5) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = random_unitary(6, &mut rng);
        for i in 0..6 {
            for j in 0..6 {
                let dot: Complex64 = (0..6).map(|k| u[[k, i]].conj() * u[[k, j]]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn mat4_json_shape() {
        let m = Mat4::identity();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.starts_with("[[[1.0,0.0],[0.0,0.0]"));
        let back: Mat4 = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
