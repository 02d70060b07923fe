#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::TAU;

use freqgate::linalg::random_unitary;
use freqgate::optics::{FrequencyGrid, ModeTransform};
use freqgate::Mat4;
use num_complex::Complex64;
use rand::Rng;

/// `(1 / 2 pi) int_0^{2 pi} exp(i m sin(t + theta) - i k t) dt` by the
/// trapezoid rule, which is spectrally accurate for periodic integrands.
pub fn sideband_by_quadrature(m: f64, theta: f64, k: i64, points: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..points {
        let t = TAU * j as f64 / points as f64;
        acc += Complex64::from_polar(1.0, m * (t + theta).sin() - k as f64 * t);
    }
    acc / points as f64
}

/// Two-photon output state of `a_u^dag a_w^dag |0>` under `a_j^dag -> sum_i V[i, j] a_i^dag`,
/// expanded term by term as ordered products of creation operators and
/// then collected into Fock amplitudes keyed by `(m, n)` with `m <= n`.
pub fn fock_two_photon(v: &[Vec<Complex64>], u: usize, w: usize) -> HashMap<(usize, usize), Complex64> {
    let mut products: HashMap<(usize, usize), Complex64> = HashMap::new();
    for (i, row_i) in v.iter().enumerate() {
        for (j, row_j) in v.iter().enumerate() {
            *products.entry((i, j)).or_default() += row_i[u] * row_j[w];
        }
    }
    // a_m^dag a_n^dag |0> = |1_m 1_n> for m != n, and (a_m^dag)^2 |0> = sqrt(2) |2_m>.
    let mut fock: HashMap<(usize, usize), Complex64> = HashMap::new();
    for ((i, j), c) in products {
        let key = (i.min(j), i.max(j));
        let weight = if i == j { 2f64.sqrt() } else { 1.0 };
        *fock.entry(key).or_default() += c * weight;
    }
    fock
}

pub fn mat4_rows(m: &Mat4) -> Vec<Vec<Complex64>> {
    (0..4).map(|i| (0..4).map(|j| m[(i, j)]).collect()).collect()
}

pub fn random_mat4<R: Rng>(rng: &mut R) -> Mat4 {
    let mut m = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    m
}

/// Haar-random unitary on bins `0..n`.
pub fn random_transform<R: Rng>(n: usize, rng: &mut R) -> ModeTransform {
    let grid = FrequencyGrid::new(193.45e12, 25e9, 0, n as i64 - 1).expect("grid");
    ModeTransform::from_entries(grid, random_unitary(n, rng)).expect("square")
}

pub fn transform_rows(v: &ModeTransform) -> Vec<Vec<Complex64>> {
    v.entries.rows().into_iter().map(|r| r.to_vec()).collect()
}
pub mod checks;
