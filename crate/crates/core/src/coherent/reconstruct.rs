use std::collections::VecDeque;
use std::f64::consts::TAU;

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::probe::{fit_fringe, probe_phase_scan_with, probe_single_line_with, ProbeResult, ProbeSettings};
use crate::bayes::Estimate;
use crate::error::{Error, Result};
use crate::linalg::{wrap_phase, Mat4};
use crate::optics::{gate_metrics, FrequencyGrid, ModeTransform, QubitModeMap};
use crate::reference;

/// A phase held at a chosen value, `(row, column)` in (C0, C1, T0, T1) order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPhase {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// The six gauge slots at their designed values.
pub fn designed_gauge() -> Vec<FixedPhase> {
    let phases = reference::designed_transform().phases();
    reference::GAUGE_FIXED_SLOTS
        .iter()
        .map(|&(row, col)| FixedPhase {
            row,
            col,
            value: phases[row][col],
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CharacterizationConfig {
    /// Equally spaced relative phases per two-line scan.
    pub scan_points: usize,
    /// Fringes with visibility `b / a` below this leave the phase undetermined.
    pub visibility_threshold: f64,
    /// Independent acquisitions averaged entry by entry.
    pub repeats: usize,
    pub probe: ProbeSettings,
}

impl Default for CharacterizationConfig {
    fn default() -> Self {
        CharacterizationConfig {
            scan_points: 16,
            visibility_threshold: 0.05,
            repeats: 1,
            probe: ProbeSettings::default(),
        }
    }
}

impl CharacterizationConfig {
    pub fn validate(&self) -> Result<()> {
        self.probe.validate()?;
        if self.scan_points < 8 {
            return Err(Error::InvalidProbe(format!(
                "phase scans need at least 8 points, got {}",
                self.scan_points
            )));
        }
        if self.repeats == 0 || !(0.0..1.0).contains(&self.visibility_threshold) {
            return Err(Error::InvalidProbe(format!("bad characterization config {self:?}")));
        }
        Ok(())
    }

    pub fn scan_phases(&self) -> Vec<f64> {
        (0..self.scan_points)
            .map(|k| k as f64 * TAU / self.scan_points as f64)
            .collect()
    }
}

/// Two-line scan with lines on qubit modes `first < second`; the scanned
/// phase is applied to `second`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairScan {
    pub first: usize,
    pub second: usize,
    pub results: Vec<ProbeResult>,
}

/// One full acquisition: a single-line probe per qubit mode and a scan for
/// every pair of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Acquisition {
    pub map: QubitModeMap,
    pub singles: Vec<ProbeResult>,
    pub scans: Vec<PairScan>,
}

pub fn acquire<R: Rng + ?Sized>(
    v: &ModeTransform,
    map: &QubitModeMap,
    cfg: &CharacterizationConfig,
    rng: &mut R,
) -> Result<Acquisition> {
    cfg.validate()?;
    let bins = map.bins();
    let singles = bins
        .iter()
        .map(|&u| probe_single_line_with(v, u, &cfg.probe, rng))
        .collect::<Result<Vec<_>>>()?;
    let phases = cfg.scan_phases();
    let mut scans = Vec::with_capacity(6);
    for first in 0..4 {
        for second in first + 1..4 {
            let results = probe_phase_scan_with(v, bins[first], bins[second], &phases, &cfg.probe, rng)?;
            scans.push(PairScan { first, second, results });
        }
    }
    Ok(Acquisition {
        map: map.clone(),
        singles,
        scans,
    })
}

/// Matrix read off one acquisition. `None` phases could not be reached
/// through a fringe of sufficient visibility from a fixed slot.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleReconstruction {
    pub amplitudes: [[f64; 4]; 4],
    pub phases: [[Option<f64>; 4]; 4],
}

fn check_gauge(fixed: &[FixedPhase]) -> Result<()> {
    for (k, f) in fixed.iter().enumerate() {
        if f.row > 3 || f.col > 3 || !f.value.is_finite() {
            return Err(Error::InvalidProbe(format!("bad fixed phase {f:?}")));
        }
        if fixed[..k].iter().any(|g| g.row == f.row && g.col == f.col) {
            return Err(Error::InvalidProbe(format!("slot ({}, {}) fixed twice", f.row, f.col)));
        }
    }
    Ok(())
}

pub fn reconstruct_single(
    acq: &Acquisition,
    fixed: &[FixedPhase],
    visibility_threshold: f64,
) -> Result<SingleReconstruction> {
    check_gauge(fixed)?;
    if acq.singles.len() != 4 {
        return Err(Error::InvalidProbe(format!(
            "expected 4 single-line probes, got {}",
            acq.singles.len()
        )));
    }
    let bins = acq.map.bins();
    let mut amplitudes = [[0.0; 4]; 4];
    for (col, probe) in acq.singles.iter().enumerate() {
        if probe.input_bins != [bins[col]] {
            return Err(Error::InvalidProbe(format!(
                "single-line probe {col} was sent into {:?}, expected bin {}",
                probe.input_bins, bins[col]
            )));
        }
        for (row, &n) in bins.iter().enumerate() {
            amplitudes[row][col] = (probe.power(n) / probe.input_power).sqrt();
        }
    }

    // fringe[row][a][b]: (c, visibility) with c = phi[row][a] - phi[row][b].
    let mut fringe = [[[None::<(f64, f64)>; 4]; 4]; 4];
    for scan in &acq.scans {
        let (a, b) = (scan.first, scan.second);
        if a >= b || b > 3 {
            return Err(Error::InvalidProbe(format!("bad scan pair ({a}, {b})")));
        }
        let alphas = scan
            .results
            .iter()
            .map(|r| {
                r.relative_phase
                    .ok_or_else(|| Error::InvalidProbe("scan point without relative phase".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        for (row, &n) in bins.iter().enumerate() {
            let powers: Vec<f64> = scan.results.iter().map(|r| r.power(n) / r.input_power).collect();
            let f = fit_fringe(&alphas, &powers)?;
            fringe[row][a][b] = Some((f.phase, f.visibility()));
            fringe[row][b][a] = Some((-f.phase, f.visibility()));
        }
    }

    let mut phases = [[None; 4]; 4];
    for f in fixed {
        phases[f.row][f.col] = Some(f.value);
    }
    for row in 0..4 {
        let mut queue: VecDeque<usize> = (0..4).filter(|&c| phases[row][c].is_some()).collect();
        while let Some(u) = queue.pop_front() {
            let phi_u = phases[row][u].unwrap_or_default();
            for w in 0..4 {
                if phases[row][w].is_some() {
                    continue;
                }
                if let Some((c, vis)) = fringe[row][u][w] {
                    if vis >= visibility_threshold {
                        phases[row][w] = Some(wrap_phase(phi_u - c));
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    Ok(SingleReconstruction { amplitudes, phases })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseStatus {
    Fixed,
    Measured,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseEntry {
    pub status: PhaseStatus,
    /// Absent exactly when `status` is `Undetermined`.
    pub estimate: Option<Estimate>,
}

/// Entry-by-entry mean and spread over repeated acquisitions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructedMatrix {
    pub map: QubitModeMap,
    pub amplitudes: [[Estimate; 4]; 4],
    pub phases: [[PhaseEntry; 4]; 4],
    pub n_repeats: usize,
}

/// Gate metrics of a reconstruction. Undetermined phases are drawn
/// uniformly; `fidelity_spread` is the largest deviation of F over those
/// draws from the reported value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InferredMetrics {
    pub fidelity: f64,
    pub success: f64,
    pub fidelity_spread: f64,
    pub draws: usize,
}

/// Averages acquisitions. A phase is reported only if every acquisition
/// determined it.
pub fn reconstruct(acqs: &[Acquisition], fixed: &[FixedPhase], visibility_threshold: f64) -> Result<ReconstructedMatrix> {
    let first = acqs
        .first()
        .ok_or_else(|| Error::InvalidProbe("no acquisitions to reconstruct".into()))?;
    if acqs.iter().any(|a| a.map != first.map) {
        return Err(Error::InvalidProbe("acquisitions use different mode maps".into()));
    }
    let singles = acqs
        .iter()
        .map(|a| reconstruct_single(a, fixed, visibility_threshold))
        .collect::<Result<Vec<_>>>()?;
    let amplitudes = std::array::from_fn(|i| {
        std::array::from_fn(|j| Estimate::of(&singles.iter().map(|s| s.amplitudes[i][j]).collect::<Vec<_>>()))
    });
    let phases = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            if let Some(f) = fixed.iter().find(|f| f.row == i && f.col == j) {
                return PhaseEntry {
                    status: PhaseStatus::Fixed,
                    estimate: Some(Estimate {
                        mean: f.value,
                        std: 0.0,
                    }),
                };
            }
            let values: Option<Vec<f64>> = singles.iter().map(|s| s.phases[i][j]).collect();
            match values {
                Some(v) => PhaseEntry {
                    status: PhaseStatus::Measured,
                    estimate: Some(Estimate::circular(&v)),
                },
                None => PhaseEntry {
                    status: PhaseStatus::Undetermined,
                    estimate: None,
                },
            }
        })
    });
    Ok(ReconstructedMatrix {
        map: first.map.clone(),
        amplitudes,
        phases,
        n_repeats: acqs.len(),
    })
}

/// Probe `v` `cfg.repeats` times and reconstruct. Acquisition `k` uses RNG
/// stream `k` of `seed`.
pub fn characterize(
    v: &ModeTransform,
    map: &QubitModeMap,
    fixed: &[FixedPhase],
    cfg: &CharacterizationConfig,
    seed: u64,
) -> Result<ReconstructedMatrix> {
    cfg.validate()?;
    let acqs = (0..cfg.repeats)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            acquire(v, map, cfg, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    reconstruct(&acqs, fixed, cfg.visibility_threshold)
}

/// Mode transform on the smallest grid holding the mapped bins, with `v4`
/// on the qubit modes and zeros elsewhere.
pub fn embed_matrix(v4: &Mat4, map: &QubitModeMap) -> Result<ModeTransform> {
    let bins = map.bins();
    let grid = FrequencyGrid::around(&bins, 0)?;
    let n = grid.len();
    let mut e = Array2::from_elem((n, n), Complex64::new(0.0, 0.0));
    for (i, &r) in bins.iter().enumerate() {
        for (j, &c) in bins.iter().enumerate() {
            e[[grid.index_of(r)?, grid.index_of(c)?]] = v4[(i, j)];
        }
    }
    ModeTransform::from_entries(grid, e)
}

impl ReconstructedMatrix {
    pub fn undetermined(&self) -> Vec<(usize, usize)> {
        (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|&(i, j)| self.phases[i][j].status == PhaseStatus::Undetermined)
            .collect()
    }

    /// Mean matrix, with `fill(row, col)` supplying undetermined phases.
    pub fn matrix_with(&self, mut fill: impl FnMut(usize, usize) -> f64) -> Mat4 {
        let amps = self.amplitudes.map(|row| row.map(|e| e.mean));
        let mut phases = [[0.0; 4]; 4];
        for (i, row) in phases.iter_mut().enumerate() {
            for (j, p) in row.iter_mut().enumerate() {
                *p = match self.phases[i][j].estimate {
                    Some(e) => e.mean,
                    None => fill(i, j),
                };
            }
        }
        Mat4::from_polar(&amps, &phases)
    }

    /// Metrics against `target`. The reported values use undetermined phases
    /// set to zero; `draws` further uniform draws bound the sensitivity.
    pub fn metrics<R: Rng + ?Sized>(&self, target: &Mat4, draws: usize, rng: &mut R) -> Result<InferredMetrics> {
        let base = gate_metrics(&self.matrix_with(|_, _| 0.0), target)?;
        let mut spread: f64 = 0.0;
        let draws = if self.undetermined().is_empty() { 0 } else { draws };
        for _ in 0..draws {
            let m = gate_metrics(&self.matrix_with(|_, _| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)), target)?;
            spread = spread.max((m.fidelity - base.fidelity).abs());
        }
        Ok(InferredMetrics {
            fidelity: base.fidelity,
            success: base.success,
            fidelity_spread: spread,
            draws,
        })
    }
}

/// The tabulated coherent-state measurement as a reconstruction with its
/// unmeasured phases marked undetermined.
pub fn tabulated_reconstruction() -> ReconstructedMatrix {
    let fixed = reference::GAUGE_FIXED_SLOTS;
    ReconstructedMatrix {
        map: QubitModeMap::experiment(),
        amplitudes: std::array::from_fn(|i| {
            std::array::from_fn(|j| Estimate {
                mean: reference::COHERENT_AMPLITUDES[i][j],
                std: reference::COHERENT_AMPLITUDE_STD[i][j],
            })
        }),
        phases: std::array::from_fn(|i| {
            std::array::from_fn(|j| match reference::COHERENT_PHASES[i][j] {
                Some(mean) => PhaseEntry {
                    status: if fixed.contains(&(i, j)) {
                        PhaseStatus::Fixed
                    } else {
                        PhaseStatus::Measured
                    },
                    estimate: Some(Estimate {
                        mean,
                        std: reference::COHERENT_PHASE_STD[i][j],
                    }),
                },
                None => PhaseEntry {
                    status: PhaseStatus::Undetermined,
                    estimate: None,
                },
            })
        }),
        n_repeats: 5,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::cnot;

    fn theory() -> (ModeTransform, QubitModeMap) {
        let map = QubitModeMap::experiment();
        (embed_matrix(&reference::designed_transform(), &map).unwrap(), map)
    }

    #[test]
    fn theory_column_c1_powers() {
        let (v, map) = theory();
        let p = super::super::probe::probe_single_line(&v, map.c1).unwrap();
        let a = reference::DESIGNED_AMPLITUDES;
        for (row, &n) in map.bins().iter().enumerate() {
            assert!((p.power(n) - a[row][1].powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn fringe_fit_recovers_target_row_phase_difference() {
        let (v, map) = theory();
        let cfg = CharacterizationConfig::default();
        let scan = super::super::probe::probe_phase_scan(&v, map.c1, map.t0, &cfg.scan_phases()).unwrap();
        let alphas: Vec<f64> = scan.iter().map(|r| r.relative_phase.unwrap()).collect();
        let powers: Vec<f64> = scan.iter().map(|r| r.power(map.t0)).collect();
        let f = fit_fringe(&alphas, &powers).unwrap();
        let ph = reference::designed_transform().phases();
        // c = phi(T0, C1) - phi(T0, T0)
        let direct = ph[2][1] - ph[2][2];
        assert!(wrap_phase(f.phase - direct).abs() < 1e-3, "{} vs {direct}", f.phase);
    }

    #[test]
    fn noiseless_round_trip() {
        let (v, map) = theory();
        let truth = reference::designed_transform();
        let r = characterize(&v, &map, &designed_gauge(), &CharacterizationConfig::default(), 1).unwrap();
        let (ta, tp) = (truth.amplitudes(), truth.phases());
        let mut measured = 0;
        for i in 0..4 {
            for j in 0..4 {
                assert!((r.amplitudes[i][j].mean - ta[i][j]).abs() < 1e-6);
                if let Some(e) = r.phases[i][j].estimate {
                    assert!(wrap_phase(e.mean - tp[i][j]).abs() < 1e-6, "({i},{j})");
                    measured += (r.phases[i][j].status == PhaseStatus::Measured) as usize;
                }
            }
        }
        // The C0 row and column, and the weak T0/T1 cross terms, give no
        // usable fringe against any known entry.
        let mut weak = vec![(0, 1), (0, 2), (0, 3), (1, 0), (2, 0), (2, 3), (3, 0), (3, 2)];
        weak.sort();
        assert_eq!(r.undetermined(), weak);
        assert_eq!(measured, 2);
    }

    #[test]
    fn strong_couplings_reconstruct_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = FrequencyGrid::new(0.0, 1.0, 0, 3).unwrap();
        let v = ModeTransform::from_entries(g, crate::linalg::random_unitary(4, &mut rng)).unwrap();
        let map = QubitModeMap::new(0, 1, 2, 3).unwrap();
        let truth = crate::optics::project_computational(&v, &map).unwrap();
        let ph = truth.phases();
        let fixed: Vec<FixedPhase> = (0..4)
            .map(|row| FixedPhase {
                row,
                col: 0,
                value: ph[row][0],
            })
            .collect();
        let r = characterize(&v, &map, &fixed, &CharacterizationConfig::default(), 0).unwrap();
        assert!(r.undetermined().is_empty());
        assert!(r.matrix_with(|_, _| 0.0).max_abs_diff(&truth) < 1e-9);
    }

    #[test]
    fn unreachable_row_is_marked() {
        let (v, map) = theory();
        let fixed: Vec<FixedPhase> = designed_gauge().into_iter().filter(|f| f.row != 3).collect();
        let r = characterize(&v, &map, &fixed, &CharacterizationConfig::default(), 1).unwrap();
        for j in 0..4 {
            assert_eq!(r.phases[3][j].status, PhaseStatus::Undetermined);
            assert!(r.phases[3][j].estimate.is_none());
        }
    }

    #[test]
    fn tabulated_values_give_reference_metrics() {
        let r = tabulated_reconstruction();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = r.metrics(&cnot(), 256, &mut rng).unwrap();
        assert!((m.fidelity - reference::COHERENT_FIDELITY).abs() <= 0.002, "{m:?}");
        assert!((m.success - reference::COHERENT_SUCCESS).abs() <= 0.001, "{m:?}");
        assert!(m.fidelity_spread < 1e-4, "{m:?}");
    }

    #[test]
    fn gauge_transform_leaves_fidelity_unchanged() {
        let (v, map) = theory();
        let cfg = CharacterizationConfig::default();
        let target = cnot();
        let base = characterize(&v, &map, &designed_gauge(), &cfg, 1).unwrap();
        // Row and column phase shifts that keep the coincidence-basis gate
        // equivalent: a common row offset plus per-column offsets.
        let (row_shift, col_shift) = (0.37, [0.0, 0.0, 0.0, 0.0]);
        let shifted: Vec<FixedPhase> = designed_gauge()
            .into_iter()
            .map(|f| FixedPhase {
                value: f.value + row_shift + col_shift[f.col],
                ..f
            })
            .collect();
        let other = characterize(&v, &map, &shifted, &cfg, 1).unwrap();
        let fa = gate_metrics(&base.matrix_with(|_, _| 0.0), &target).unwrap().fidelity;
        let fb = gate_metrics(&other.matrix_with(|_, _| row_shift), &target).unwrap().fidelity;
        assert!((fa - fb).abs() < 1e-12, "{fa} vs {fb}");
    }

    #[test]
    fn noisy_repeats_report_spread() {
        let (v, map) = theory();
        let cfg = CharacterizationConfig {
            repeats: 5,
            probe: ProbeSettings {
                rin_sigma: 0.01,
                ..ProbeSettings::default()
            },
            ..CharacterizationConfig::default()
        };
        let r = characterize(&v, &map, &designed_gauge(), &cfg, 4).unwrap();
        assert_eq!(r.n_repeats, 5);
        assert!(r.amplitudes[1][1].std > 0.0 && r.amplitudes[1][1].std < 0.01);
        let p = r.phases[2][2];
        assert_eq!(p.status, PhaseStatus::Measured);
        assert!(p.estimate.unwrap().std < 0.1);
        let again = characterize(&v, &map, &designed_gauge(), &cfg, 4).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (v, map) = theory();
        let cfg = CharacterizationConfig {
            scan_points: 4,
            ..CharacterizationConfig::default()
        };
        assert!(characterize(&v, &map, &designed_gauge(), &cfg, 0).is_err());
        let dup = vec![
            FixedPhase { row: 0, col: 0, value: 0.0 },
            FixedPhase { row: 0, col: 0, value: 1.0 },
        ];
        assert!(characterize(&v, &map, &dup, &CharacterizationConfig::default(), 0).is_err());
        assert!(reconstruct(&[], &dup, 0.05).is_err());
    }
}
