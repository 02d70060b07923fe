use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::ModeTransform;

/// Output spectrum of one probe. Bins more than `floor_db` below the
/// strongest line are not recorded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub input_bins: Vec<i64>,
    /// Phase of the second line relative to the first (two-line probes).
    pub relative_phase: Option<f64>,
    /// Power per input line.
    pub input_power: f64,
    pub output_powers: BTreeMap<i64, f64>,
}

impl ProbeResult {
    /// Recorded power at `bin`, 0 when under the floor.
    pub fn power(&self, bin: i64) -> f64 {
        self.output_powers.get(&bin).copied().unwrap_or(0.0)
    }
}

/// Dynamic range and noise of the simulated spectrum measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSettings {
    pub floor_db: f64,
    pub input_power: f64,
    /// Relative intensity noise: each recorded power is scaled by
    /// `1 + rin_sigma * N(0, 1)` (clipped at zero).
    pub rin_sigma: f64,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        ProbeSettings {
            floor_db: 60.0,
            input_power: 1.0,
            rin_sigma: 0.0,
        }
    }
}

impl ProbeSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.floor_db > 0.0) || !(self.input_power > 0.0) || !(self.rin_sigma >= 0.0) {
            return Err(Error::InvalidProbe(format!("bad probe settings {self:?}")));
        }
        Ok(())
    }
}

fn record<R: Rng + ?Sized>(
    field: impl Iterator<Item = (i64, Complex64)>,
    input_bins: Vec<i64>,
    relative_phase: Option<f64>,
    s: &ProbeSettings,
    rng: &mut R,
) -> ProbeResult {
    let powers: Vec<(i64, f64)> = field.map(|(n, a)| (n, s.input_power * a.norm_sqr())).collect();
    let peak = powers.iter().map(|p| p.1).fold(0.0, f64::max);
    let floor = peak * 10f64.powf(-s.floor_db / 10.0);
    let output_powers = powers
        .into_iter()
        .filter(|&(_, p)| p > 0.0 && p >= floor)
        .map(|(n, p)| {
            let noisy = if s.rin_sigma > 0.0 {
                let e: f64 = rng.sample(StandardNormal);
                (p * (1.0 + s.rin_sigma * e)).max(0.0)
            } else {
                p
            };
            (n, noisy)
        })
        .collect();
    ProbeResult {
        input_bins,
        relative_phase,
        input_power: s.input_power,
        output_powers,
    }
}

/// One line into bin `u`: the output power at bin `n` is `|V[n, u]|^2`.
pub fn probe_single_line(v: &ModeTransform, u: i64) -> Result<ProbeResult> {
    probe_single_line_with(v, u, &ProbeSettings::default(), &mut rand::rng())
}

pub fn probe_single_line_with<R: Rng + ?Sized>(
    v: &ModeTransform,
    u: i64,
    s: &ProbeSettings,
    rng: &mut R,
) -> Result<ProbeResult> {
    let j = v.grid.index_of(u)?;
    let column = v.entries.column(j);
    Ok(record(v.grid.bins().zip(column.iter().copied()), vec![u], None, s, rng))
}

/// Two lines into bins `u` and `w`, the second shifted by each phase in
/// `phases`: power at `n` is `|V[n, u] + e^{i alpha} V[n, w]|^2`.
pub fn probe_phase_scan(v: &ModeTransform, u: i64, w: i64, phases: &[f64]) -> Result<Vec<ProbeResult>> {
    probe_phase_scan_with(v, u, w, phases, &ProbeSettings::default(), &mut rand::rng())
}

pub fn probe_phase_scan_with<R: Rng + ?Sized>(
    v: &ModeTransform,
    u: i64,
    w: i64,
    phases: &[f64],
    s: &ProbeSettings,
    rng: &mut R,
) -> Result<Vec<ProbeResult>> {
    if u == w {
        return Err(Error::InvalidProbe(format!("two-line probe needs distinct bins, got {u} twice")));
    }
    let (ju, jw) = (v.grid.index_of(u)?, v.grid.index_of(w)?);
    Ok(phases
        .iter()
        .map(|&alpha| {
            let z = Complex64::from_polar(1.0, alpha);
            let field = v
                .grid
                .bins()
                .enumerate()
                .map(|(i, n)| (n, v.entries[[i, ju]] + z * v.entries[[i, jw]]));
            record(field, vec![u, w], Some(alpha), s, rng)
        })
        .collect())
}

/// Least-squares fit of `a + b cos(alpha - c)` with `b >= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fringe {
    pub offset: f64,
    pub amplitude: f64,
    pub phase: f64,
}

impl Fringe {
    /// `b / a`, which for two phasors of moduli `x, y` is `2xy / (x^2 + y^2)`.
    pub fn visibility(&self) -> f64 {
        if self.offset > 0.0 {
            self.amplitude / self.offset
        } else {
            0.0
        }
    }
}

pub fn fit_fringe(alphas: &[f64], powers: &[f64]) -> Result<Fringe> {
    if alphas.len() != powers.len() || alphas.len() < 3 {
        return Err(Error::InvalidProbe(format!(
            "fringe fit needs >= 3 matching points, got {} phases and {} powers",
            alphas.len(),
            powers.len()
        )));
    }
    let a = nalgebra::DMatrix::from_fn(alphas.len(), 3, |i, k| match k {
        0 => 1.0,
        1 => alphas[i].cos(),
        _ => alphas[i].sin(),
    });
    let y = nalgebra::DVector::from_column_slice(powers);
    let sol = a
        .svd(true, true)
        .solve(&y, 1e-12)
        .map_err(|e| Error::InvalidProbe(format!("fringe fit failed: {e}")))?;
    Ok(Fringe {
        offset: sol[0],
        amplitude: sol[1].hypot(sol[2]),
        phase: sol[2].atan2(sol[1]),
    })
}
