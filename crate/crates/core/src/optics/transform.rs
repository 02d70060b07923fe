use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::element::{CircuitSpec, Element, EomElement, ShaperElement};
use super::gate::QubitModeMap;
use super::grid::FrequencyGrid;
use crate::bessel::bessel_j_table;
use crate::error::{Error, Result};
use crate::linalg::{complex_array, Mat4, ONE};

/// Linear map from input-bin to output-bin annihilation operators,
/// `b_n = sum_n' V[n, n'] a_n'`, over one grid window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeTransform {
    pub grid: FrequencyGrid,
    #[serde(with = "complex_array")]
    pub entries: Array2<Complex64>,
}

impl ModeTransform {
    pub fn identity(grid: FrequencyGrid) -> Self {
        let n = grid.len();
        ModeTransform {
            grid,
            entries: Array2::from_shape_fn((n, n), |(i, j)| if i == j { ONE } else { Complex64::default() }),
        }
    }

    pub fn from_entries(grid: FrequencyGrid, entries: Array2<Complex64>) -> Result<Self> {
        let n = grid.len();
        if entries.dim() != (n, n) {
            return Err(Error::InvalidGrid(format!(
                "matrix is {:?}, window has {n} bins",
                entries.dim()
            )));
        }
        Ok(ModeTransform { grid, entries })
    }

    /// Entry `V[out, inp]` addressed by bin numbers.
    pub fn get(&self, out: i64, inp: i64) -> Result<Complex64> {
        Ok(self.entries[[self.grid.index_of(out)?, self.grid.index_of(inp)?]])
    }

    /// `self` applied after `first`: `self * first`.
    pub fn after(&self, first: &ModeTransform) -> Result<ModeTransform> {
        check_same_grid(&self.grid, &first.grid)?;
        Ok(ModeTransform {
            grid: self.grid,
            entries: self.entries.dot(&first.entries),
        })
    }

    /// `|| column(bin) ||`.
    pub fn column_norm(&self, bin: i64) -> Result<f64> {
        let j = self.grid.index_of(bin)?;
        Ok(self.entries.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
    }

    /// Largest `|1 - ||column||^2|` over the given input bins.
    pub fn max_column_deviation(&self, bins: &[i64]) -> Result<f64> {
        let mut worst = 0.0_f64;
        for &b in bins {
            let n = self.column_norm(b)?;
            worst = worst.max((1.0 - n * n).abs());
        }
        Ok(worst)
    }
}

fn check_same_grid(a: &FrequencyGrid, b: &FrequencyGrid) -> Result<()> {
    if a.same_window(b) {
        Ok(())
    } else {
        Err(Error::GridMismatch {
            expected_min: a.n_min(),
            expected_max: a.n_max(),
            found_min: b.n_min(),
            found_max: b.n_max(),
        })
    }
}

/// Sideband amplitudes `c_k = J_k(m) e^{i k theta}` for `k = -max_k..=max_k`,
/// stored at index `k + max_k`.
pub fn eom_coefficients(element: &EomElement, max_k: usize) -> Vec<Complex64> {
    let j = bessel_j_table(max_k, element.m);
    let mut c = vec![Complex64::default(); 2 * max_k + 1];
    for k in 0..=max_k {
        let plus = Complex64::from_polar(j[k], k as f64 * element.theta);
        c[max_k + k] = plus;
        // J_{-k} e^{-ik theta} = (-1)^k J_k e^{-ik theta}
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        c[max_k - k] = sign * plus.conj();
    }
    c
}

/// Phase modulator as a Toeplitz matrix: `V[n, n'] = J_{n-n'}(m) e^{i (n-n') theta}`.
pub fn eom_transform(element: &EomElement, grid: FrequencyGrid) -> ModeTransform {
    let n = grid.len();
    let max_k = n - 1;
    let c = eom_coefficients(element, max_k);
    let entries = Array2::from_shape_fn((n, n), |(i, j)| c[max_k + i - j]);
    ModeTransform { grid, entries }
}

/// Pulse shaper as a diagonal of unit phasors.
pub fn ps_transform(element: &ShaperElement, grid: FrequencyGrid) -> ModeTransform {
    let n = grid.len();
    let mut entries = Array2::from_elem((n, n), Complex64::default());
    for (i, bin) in grid.bins().enumerate() {
        entries[[i, i]] = Complex64::from_polar(1.0, element.phase(bin));
    }
    ModeTransform { grid, entries }
}

pub fn element_transform(element: &Element, grid: FrequencyGrid) -> ModeTransform {
    match element {
        Element::Eom(e) => eom_transform(e, grid),
        Element::Ps(s) => ps_transform(s, grid),
    }
}

/// Full-window transform of a circuit: product of element transforms with
/// the last element leftmost.
pub fn compose(circuit: &CircuitSpec) -> ModeTransform {
    let grid = circuit.grid;
    let mut acc = ModeTransform::identity(grid);
    for el in circuit.elements() {
        let t = element_transform(el, grid);
        acc.entries = t.entries.dot(&acc.entries);
    }
    acc
}

/// Compose a list of transforms that must share a window; `parts[0]` acts first.
pub fn compose_transforms(parts: &[ModeTransform]) -> Result<ModeTransform> {
    let first = parts.first().ok_or(Error::EmptyCircuit)?;
    let mut acc = first.clone();
    for p in &parts[1..] {
        acc = p.after(&acc)?;
    }
    Ok(acc)
}

/// 4x4 sub-block on (C0, C1, T0, T1), rows and columns in that order.
/// No renormalization.
pub fn project_computational(v: &ModeTransform, map: &QubitModeMap) -> Result<Mat4> {
    let idx = map
        .bins()
        .map(|b| v.grid.index_of(b))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut out = Mat4::zeros();
    for (i, &r) in idx.iter().enumerate() {
        for (j, &c) in idx.iter().enumerate() {
            out[(i, j)] = v.entries[[r, c]];
        }
    }
    Ok(out)
}

/// Projected 4x4 transform computed by propagating only the four input
/// columns through the cascade. Equivalent to
/// `project_computational(&compose(circuit), map)` but much cheaper.
pub fn projected_transform(circuit: &CircuitSpec, map: &QubitModeMap) -> Result<Mat4> {
    let grid = circuit.grid;
    let idx = map
        .bins()
        .map(|b| grid.index_of(b))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let n = grid.len();
    let mut cols: Vec<Vec<Complex64>> = idx
        .iter()
        .map(|&j| {
            let mut v = vec![Complex64::default(); n];
            v[j] = ONE;
            v
        })
        .collect();
    let mut scratch = vec![Complex64::default(); n];
    for el in circuit.elements() {
        match el {
            Element::Eom(e) => {
                let c = eom_coefficients(e, n - 1);
                for col in cols.iter_mut() {
                    apply_toeplitz(&c, n - 1, col, &mut scratch);
                    col.copy_from_slice(&scratch);
                }
            }
            Element::Ps(s) => {
                for (i, bin) in grid.bins().enumerate() {
                    let ph = Complex64::from_polar(1.0, s.phase(bin));
                    for col in cols.iter_mut() {
                        col[i] *= ph;
                    }
                }
            }
        }
    }
    let mut out = Mat4::zeros();
    for (i, &r) in idx.iter().enumerate() {
        for (j, col) in cols.iter().enumerate() {
            out[(i, j)] = col[r];
        }
    }
    Ok(out)
}

/// `out[i] = sum_j c[max_k + i - j] * input[j]`, skipping negligible sidebands.
pub(crate) fn apply_toeplitz(c: &[Complex64], max_k: usize, input: &[Complex64], out: &mut [Complex64]) {
    let n = input.len();
    // Sidebands below 1e-18 cannot change a double-precision result.
    let mut band = max_k;
    while band > 0 && c[max_k + band].norm_sqr() < 1e-36 && c[max_k - band].norm_sqr() < 1e-36 {
        band -= 1;
    }
    for (i, o) in out.iter_mut().enumerate() {
        let lo = i.saturating_sub(band);
        let hi = (i + band).min(n - 1);
        let mut acc = Complex64::default();
        for j in lo..=hi {
            acc += c[max_k + i - j] * input[j];
        }
        *o = acc;
    }
}
