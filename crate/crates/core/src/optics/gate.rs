use serde::{Deserialize, Serialize};

use super::element::CircuitSpec;
use super::grid::FrequencyGrid;
use super::transform::projected_transform;
use crate::error::{Error, Result};
use crate::linalg::{Mat4, ONE};

/// Labels of the pump frequencies (halved) producing each computational
/// input state. Informational only.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PumpLabels {
    pub omega_00: Option<String>,
    pub omega_01: Option<String>,
    pub omega_10: Option<String>,
    pub omega_11: Option<String>,
}

/// Bin assignment of the logical modes. Index order everywhere is
/// (C0, C1, T0, T1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMap")]
pub struct QubitModeMap {
    pub c0: i64,
    pub c1: i64,
    pub t0: i64,
    pub t1: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump_labels: Option<PumpLabels>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    c0: i64,
    c1: i64,
    t0: i64,
    t1: i64,
    #[serde(default)]
    pump_labels: Option<PumpLabels>,
}

impl TryFrom<RawMap> for QubitModeMap {
    type Error = Error;
    fn try_from(r: RawMap) -> Result<Self> {
        let mut m = QubitModeMap::new(r.c0, r.c1, r.t0, r.t1)?;
        m.pump_labels = r.pump_labels;
        Ok(m)
    }
}

impl QubitModeMap {
    pub fn new(c0: i64, c1: i64, t0: i64, t1: i64) -> Result<Self> {
        let b = [c0, c1, t0, t1];
        for i in 0..4 {
            for j in i + 1..4 {
                if b[i] == b[j] {
                    return Err(Error::InvalidModeMap(format!(
                        "bins must be distinct, got {b:?}"
                    )));
                }
            }
        }
        Ok(QubitModeMap {
            c0,
            c1,
            t0,
            t1,
            pump_labels: None,
        })
    }

    /// The placement used in the experiment: C0, C1, T0, T1 at bins 0, 6, 7, 8.
    pub fn experiment() -> Self {
        QubitModeMap::new(0, 6, 7, 8).expect("distinct bins")
    }

    pub fn bins(&self) -> [i64; 4] {
        [self.c0, self.c1, self.t0, self.t1]
    }

    pub fn check_inside(&self, grid: &FrequencyGrid) -> Result<()> {
        for b in self.bins() {
            grid.index_of(b)?;
        }
        Ok(())
    }
}

/// Two-photon transform on the coincidence basis (C0T0, C0T1, C1T0, C1T1);
/// row = output pair `rs`, column = input pair `kl`, index `2*r + s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TwoPhotonTransform(pub Mat4);

impl TwoPhotonTransform {
    pub fn entries(&self) -> &Mat4 {
        &self.0
    }

    /// Amplitude for `|C_k T_l> -> |C_r T_s>`.
    pub fn amplitude(&self, input: (usize, usize), output: (usize, usize)) -> num_complex::Complex64 {
        self.0[(2 * output.0 + output.1, 2 * input.0 + input.1)]
    }
}

/// Permanents of the 2x2 sub-blocks of a projected transform:
/// `W[(rs),(kl)] = V[Cr,Ck] V[Ts,Tl] + V[Cr,Tl] V[Ts,Ck]`.
pub fn two_photon_map(v4: &Mat4) -> TwoPhotonTransform {
    let mut w = Mat4::zeros();
    for r in 0..2 {
        for s in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let (cr, ts, ck, tl) = (r, 2 + s, k, 2 + l);
                    w[(2 * r + s, 2 * k + l)] = v4[(cr, ck)] * v4[(ts, tl)] + v4[(cr, tl)] * v4[(ts, ck)];
                }
            }
        }
    }
    TwoPhotonTransform(w)
}

/// Dimension of the coincidence basis.
pub const COINCIDENCE_DIM: f64 = 4.0;

/// `Tr(W^dagger W) / 4`.
pub fn success_probability(w: &TwoPhotonTransform) -> f64 {
    w.0.hs_norm_sqr() / COINCIDENCE_DIM
}

/// `|Tr(U^dagger W)|^2 / (16 P)`.
pub fn fidelity(w: &TwoPhotonTransform, target: &Mat4) -> Result<f64> {
    let p = success_probability(w);
    if !(p > 0.0) {
        return Err(Error::UndefinedFidelity);
    }
    let overlap = (target.dagger() * w.0).trace();
    Ok(overlap.norm_sqr() / (COINCIDENCE_DIM * COINCIDENCE_DIM * p))
}

/// Ideal CNOT on (C0T0, C0T1, C1T0, C1T1): flips the target when control is 1.
pub fn cnot() -> Mat4 {
    Mat4::from_real([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
    ])
}

/// Separable diagonal phase gate `diag(e^{i(a_r + b_s)})`, realizable by a
/// pulse shaper alone.
pub fn separable_phase_gate(control: [f64; 2], target: [f64; 2]) -> Mat4 {
    let mut u = Mat4::zeros();
    for r in 0..2 {
        for s in 0..2 {
            u[(2 * r + s, 2 * r + s)] = ONE * num_complex::Complex64::from_polar(1.0, control[r] + target[s]);
        }
    }
    u
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateMetrics {
    pub success: f64,
    pub fidelity: f64,
}

/// Success probability and fidelity of a projected transform against `target`.
pub fn gate_metrics(v4: &Mat4, target: &Mat4) -> Result<GateMetrics> {
    let w = two_photon_map(v4);
    Ok(GateMetrics {
        success: success_probability(&w),
        fidelity: fidelity(&w, target)?,
    })
}

/// Gate metrics of a circuit with the truncation window grown by doubling
/// the guard band until both metrics move by less than `tol`.
/// Returns the metrics and the circuit on the final window.
pub fn metrics_adaptive(
    circuit: &CircuitSpec,
    map: &QubitModeMap,
    target: &Mat4,
    tol: f64,
) -> Result<(GateMetrics, CircuitSpec)> {
    let mut current = circuit.clone();
    let mut prev = gate_metrics(&projected_transform(&current, map)?, target)?;
    let span = current.grid.len() as i64;
    let mut extra = span.max(16);
    for _ in 0..8 {
        let wider = current.with_grid(current.grid.widened(extra));
        let next = gate_metrics(&projected_transform(&wider, map)?, target)?;
        let settled = (next.success - prev.success).abs() < tol
            && (next.fidelity - prev.fidelity).abs() < tol;
        if settled {
            return Ok((prev, current));
        }
        current = wider;
        prev = next;
        extra *= 2;
    }
    Ok((prev, current))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_unitary;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn map_rejects_duplicates() {
        assert!(QubitModeMap::new(0, 6, 6, 8).is_err());
        let json = r#"{"c0":0,"c1":1,"t0":1,"t1":2}"#;
        assert!(serde_json::from_str::<QubitModeMap>(json).is_err());
    }

    #[test]
    fn identity_maps_to_identity() {
        let w = two_photon_map(&Mat4::identity());
        assert_eq!(w.0, Mat4::identity());
        assert_eq!(success_probability(&w), 1.0);
    }

    #[test]
    fn cnot_metrics() {
        let w = TwoPhotonTransform(cnot());
        assert!((success_probability(&w) - 1.0).abs() < 1e-15);
        assert!((fidelity(&w, &cnot()).unwrap() - 1.0).abs() < 1e-15);
        let s = 0.37;
        let ws = TwoPhotonTransform(cnot().scale(Complex64::new(s, 0.0)));
        assert!((success_probability(&ws) - s * s).abs() < 1e-15);
    }

    #[test]
    fn identity_vs_cnot_fidelity() {
        let w = two_photon_map(&Mat4::identity());
        assert!((fidelity(&w, &cnot()).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn zero_transform_has_no_fidelity() {
        let w = TwoPhotonTransform(Mat4::zeros());
        assert!(matches!(fidelity(&w, &cnot()), Err(Error::UndefinedFidelity)));
    }

    #[test]
    fn fidelity_ignores_global_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_unitary(4, &mut rng);
        let mut v4 = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                v4[(i, j)] = u[[i, j]];
            }
        }
        let w = two_photon_map(&v4);
        let f0 = fidelity(&w, &cnot()).unwrap();
        for a in [0.3, 1.7, -2.9] {
            let wr = TwoPhotonTransform(w.0.scale(Complex64::from_polar(1.0, a)));
            assert!((fidelity(&wr, &cnot()).unwrap() - f0).abs() < 1e-13);
        }
    }

    #[test]
    fn unitary_sub_block_success_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let u = random_unitary(6, &mut rng);
            let mut v4 = Mat4::zeros();
            let pick = [0, 2, 3, 5];
            for i in 0..4 {
                for j in 0..4 {
                    v4[(i, j)] = u[[pick[i], pick[j]]];
                }
            }
            assert!(success_probability(&two_photon_map(&v4)) <= 1.0 + 1e-12);
        }
    }
}
