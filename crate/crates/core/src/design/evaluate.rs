use std::collections::BTreeMap;

use num_complex::Complex64;

use super::problem::{DesignProblem, ElementKind, Topology};
use crate::error::{Error, Result};
use crate::linalg::Mat4;
use crate::optics::{
    apply_toeplitz, eom_coefficients, gate_metrics, CircuitSpec, Element, EomElement,
    FrequencyGrid, GateMetrics, ShaperElement,
};

/// Flat-parameter view of a design problem. Parameters are laid out in
/// element order: `[m, theta]` per EOM and one phase per window bin
/// (ascending) per PS.
#[derive(Clone, Debug)]
pub struct Evaluator {
    topology: Topology,
    grid: FrequencyGrid,
    inputs: [usize; 4],
    target: Mat4,
}

impl Evaluator {
    pub fn new(problem: &DesignProblem) -> Result<Self> {
        problem.validate()?;
        let grid = problem.resolved_grid()?;
        let b = problem.map.bins();
        let mut inputs = [0; 4];
        for i in 0..4 {
            inputs[i] = grid.index_of(b[i])?;
        }
        Ok(Evaluator {
            topology: problem.topology.clone(),
            grid,
            inputs,
            target: problem.target,
        })
    }

    pub fn param_count(&self) -> usize {
        self.topology.param_count(self.grid.len())
    }

    pub fn grid(&self) -> FrequencyGrid {
        self.grid
    }

    fn check_len(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::ParamLength {
                expected: self.param_count(),
                found: params.len(),
            });
        }
        Ok(())
    }

    /// Projected 4x4 transform for a parameter vector.
    pub fn projected(&self, params: &[f64]) -> Result<Mat4> {
        self.check_len(params)?;
        Ok(self.projected_unchecked(params))
    }

    fn projected_unchecked(&self, params: &[f64]) -> Mat4 {
        let n = self.grid.len();
        let max_k = n - 1;
        let kinds = self.topology.kinds();
        let last = kinds.len() - 1;
        let mut cols = [
            vec![Complex64::default(); n],
            vec![Complex64::default(); n],
            vec![Complex64::default(); n],
            vec![Complex64::default(); n],
        ];
        for (c, &j) in cols.iter_mut().zip(&self.inputs) {
            c[j] = Complex64::new(1.0, 0.0);
        }
        let mut fresh = true;
        let mut scratch = vec![Complex64::default(); n];
        let mut out = Mat4::zeros();
        let mut offset = 0;
        for (pos, kind) in kinds.iter().enumerate() {
            match kind {
                ElementKind::Eom => {
                    let e = EomElement {
                        m: params[offset],
                        theta: params[offset + 1],
                    };
                    offset += 2;
                    let c = eom_coefficients(&e, max_k);
                    if pos == last {
                        // Only the four output rows are needed.
                        for (j, col) in cols.iter().enumerate() {
                            for (i, &r) in self.inputs.iter().enumerate() {
                                out[(i, j)] = if fresh {
                                    c[max_k + r - self.inputs[j]]
                                } else {
                                    (0..n).map(|q| c[max_k + r - q] * col[q]).sum()
                                };
                            }
                        }
                        return out;
                    }
                    for (col, &j) in cols.iter_mut().zip(&self.inputs) {
                        if fresh {
                            for (i, v) in col.iter_mut().enumerate() {
                                *v = c[max_k + i - j];
                            }
                        } else {
                            apply_toeplitz(&c, max_k, col, &mut scratch);
                            col.copy_from_slice(&scratch);
                        }
                    }
                    fresh = false;
                }
                ElementKind::Ps => {
                    let phases = &params[offset..offset + n];
                    offset += n;
                    for (i, &ph) in phases.iter().enumerate() {
                        let z = Complex64::from_polar(1.0, ph);
                        for col in cols.iter_mut() {
                            col[i] *= z;
                        }
                    }
                    fresh = false;
                }
            }
        }
        for (j, col) in cols.iter().enumerate() {
            for (i, &r) in self.inputs.iter().enumerate() {
                out[(i, j)] = col[r];
            }
        }
        out
    }

    /// Central-difference gradient of `score(metrics(x))` with step `h`.
    ///
    /// EOM coordinates are re-evaluated through the whole cascade. A shaper
    /// phase enters the projected transform as a rank-one term
    /// `R[:, q] e^{i phi_q} L[q, :]`, so its perturbed values are formed from
    /// cached left/right propagators instead.
    pub(crate) fn fd_gradient<S>(&self, x: &[f64], h: f64, score: &S, g: &mut [f64])
    where
        S: Fn(GateMetrics) -> f64,
    {
        let n = self.grid.len();
        let mut xp = x.to_vec();
        let mut offset = 0;
        for (pos, kind) in self.topology.kinds().iter().enumerate() {
            match kind {
                ElementKind::Eom => {
                    for i in offset..offset + 2 {
                        let xi = xp[i];
                        xp[i] = xi + h;
                        let up = score(self.metrics_unchecked(&xp));
                        xp[i] = xi - h;
                        let down = score(self.metrics_unchecked(&xp));
                        xp[i] = xi;
                        g[i] = (up - down) / (2.0 * h);
                    }
                    offset += 2;
                }
                ElementKind::Ps => {
                    let left = self.columns_before(x, pos);
                    let right = self.rows_after(x, pos);
                    let base = self.projected_unchecked(x);
                    for q in 0..n {
                        let phi = x[offset + q];
                        let z0 = Complex64::from_polar(1.0, phi);
                        let eval = |d: f64| {
                            let dz = Complex64::from_polar(1.0, phi + d) - z0;
                            let mut v = base;
                            for a in 0..4 {
                                let ra = right[a][q] * dz;
                                for b in 0..4 {
                                    v[(a, b)] += ra * left[b][q];
                                }
                            }
                            score(gate_metrics(&v, &self.target).unwrap_or(GateMetrics {
                                success: 0.0,
                                fidelity: 0.0,
                            }))
                        };
                        g[offset + q] = (eval(h) - eval(-h)) / (2.0 * h);
                    }
                    offset += n;
                }
            }
        }
    }

    /// Input columns propagated through elements `0..pos` (the element at
    /// `pos` excluded). `out[b][i]` is the field at window index `i`.
    fn columns_before(&self, x: &[f64], pos: usize) -> [Vec<Complex64>; 4] {
        let n = self.grid.len();
        let max_k = n - 1;
        let mut cols: [Vec<Complex64>; 4] = std::array::from_fn(|_| vec![Complex64::default(); n]);
        for (c, &j) in cols.iter_mut().zip(&self.inputs) {
            c[j] = Complex64::new(1.0, 0.0);
        }
        let mut scratch = vec![Complex64::default(); n];
        let mut offset = 0;
        for kind in &self.topology.kinds()[..pos] {
            match kind {
                ElementKind::Eom => {
                    let c = eom_coefficients(&EomElement { m: x[offset], theta: x[offset + 1] }, max_k);
                    offset += 2;
                    for col in cols.iter_mut() {
                        apply_toeplitz(&c, max_k, col, &mut scratch);
                        col.copy_from_slice(&scratch);
                    }
                }
                ElementKind::Ps => {
                    for (i, &ph) in x[offset..offset + n].iter().enumerate() {
                        let z = Complex64::from_polar(1.0, ph);
                        cols.iter_mut().for_each(|col| col[i] *= z);
                    }
                    offset += n;
                }
            }
        }
        cols
    }

    /// Output-row selectors propagated backwards through elements after
    /// `pos`. `out[a][q]` = amplitude from window index `q` just after
    /// element `pos` to output qubit mode `a`.
    fn rows_after(&self, x: &[f64], pos: usize) -> [Vec<Complex64>; 4] {
        let n = self.grid.len();
        let max_k = n - 1;
        let kinds = self.topology.kinds();
        let mut offsets = Vec::with_capacity(kinds.len());
        let mut offset = 0;
        for kind in kinds {
            offsets.push(offset);
            offset += match kind {
                ElementKind::Eom => 2,
                ElementKind::Ps => n,
            };
        }
        let mut rows: [Vec<Complex64>; 4] = std::array::from_fn(|_| vec![Complex64::default(); n]);
        for (r, &i) in rows.iter_mut().zip(&self.inputs) {
            r[i] = Complex64::new(1.0, 0.0);
        }
        let mut scratch = vec![Complex64::default(); n];
        for idx in (pos + 1..kinds.len()).rev() {
            let o = offsets[idx];
            match kinds[idx] {
                ElementKind::Eom => {
                    // (row * E)[j] = sum_i row[i] c[i - j]: a Toeplitz product with
                    // the mirrored coefficient list.
                    let mut c = eom_coefficients(&EomElement { m: x[o], theta: x[o + 1] }, max_k);
                    c.reverse();
                    for row in rows.iter_mut() {
                        apply_toeplitz(&c, max_k, row, &mut scratch);
                        row.copy_from_slice(&scratch);
                    }
                }
                ElementKind::Ps => {
                    for (i, &ph) in x[o..o + n].iter().enumerate() {
                        let z = Complex64::from_polar(1.0, ph);
                        rows.iter_mut().for_each(|row| row[i] *= z);
                    }
                }
            }
        }
        rows
    }

    /// `(success, fidelity)`; fidelity is reported as 0 when success is 0.
    pub fn metrics(&self, params: &[f64]) -> Result<GateMetrics> {
        self.check_len(params)?;
        Ok(self.metrics_unchecked(params))
    }

    pub(crate) fn metrics_unchecked(&self, params: &[f64]) -> GateMetrics {
        let v4 = self.projected_unchecked(params);
        gate_metrics(&v4, &self.target).unwrap_or(GateMetrics {
            success: 0.0,
            fidelity: 0.0,
        })
    }

    /// Build the circuit a parameter vector describes.
    pub fn decode(&self, params: &[f64]) -> Result<CircuitSpec> {
        self.check_len(params)?;
        let n = self.grid.len();
        let mut offset = 0;
        let mut elements = Vec::with_capacity(self.topology.kinds().len());
        for kind in self.topology.kinds() {
            match kind {
                ElementKind::Eom => {
                    elements.push(Element::Eom(EomElement::new(params[offset], params[offset + 1])));
                    offset += 2;
                }
                ElementKind::Ps => {
                    let phases: BTreeMap<i64, f64> = self
                        .grid
                        .bins()
                        .zip(&params[offset..offset + n])
                        .map(|(b, &p)| (b, p))
                        .collect();
                    elements.push(Element::Ps(ShaperElement::new(phases)));
                    offset += n;
                }
            }
        }
        CircuitSpec::new(self.grid, elements)
    }
}

/// `(success, fidelity)` of the circuit encoded by `params`.
pub fn objective(params: &[f64], problem: &DesignProblem) -> Result<(f64, f64)> {
    let m = Evaluator::new(problem)?.metrics(params)?;
    Ok((m.success, m.fidelity))
}
