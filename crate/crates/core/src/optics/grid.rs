use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// ITU-grid anchor used by the experiment: 193.45 THz.
pub const DEFAULT_CENTER_HZ: f64 = 193.45e12;
/// 25 GHz bin spacing.
pub const DEFAULT_SPACING_HZ: f64 = 25e9;
/// Bins added on either side of the computational span.
pub const DEFAULT_GUARD_BINS: i64 = 16;

/// A contiguous window of frequency bins `omega_n = omega_0 + n * d_omega`
/// for `n` in `[n_min, n_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct FrequencyGrid {
    center_hz: f64,
    spacing_hz: f64,
    n_min: i64,
    n_max: i64,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    center_hz: f64,
    spacing_hz: f64,
    n_min: i64,
    n_max: i64,
}

impl TryFrom<RawGrid> for FrequencyGrid {
    type Error = Error;
    fn try_from(r: RawGrid) -> Result<Self> {
        FrequencyGrid::new(r.center_hz, r.spacing_hz, r.n_min, r.n_max)
    }
}

impl From<FrequencyGrid> for RawGrid {
    fn from(g: FrequencyGrid) -> Self {
        RawGrid {
            center_hz: g.center_hz,
            spacing_hz: g.spacing_hz,
            n_min: g.n_min,
            n_max: g.n_max,
        }
    }
}

impl FrequencyGrid {
    pub fn new(center_hz: f64, spacing_hz: f64, n_min: i64, n_max: i64) -> Result<Self> {
        if !(spacing_hz > 0.0 && spacing_hz.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "bin spacing must be positive, got {spacing_hz}"
            )));
        }
        if !center_hz.is_finite() {
            return Err(Error::InvalidGrid("center frequency is not finite".into()));
        }
        if n_min >= n_max {
            return Err(Error::InvalidGrid(format!(
                "empty bin range [{n_min}, {n_max}]"
            )));
        }
        Ok(FrequencyGrid {
            center_hz,
            spacing_hz,
            n_min,
            n_max,
        })
    }

    /// Default ITU grid spanning `bins` plus `guard` bins on each side.
    pub fn around(bins: &[i64], guard: i64) -> Result<Self> {
        let lo = bins.iter().copied().min().ok_or_else(|| {
            Error::InvalidGrid("no bins to build a window around".into())
        })?;
        let hi = bins.iter().copied().max().unwrap_or(lo);
        Self::new(DEFAULT_CENTER_HZ, DEFAULT_SPACING_HZ, lo - guard, hi + guard)
    }

    pub fn center_hz(&self) -> f64 {
        self.center_hz
    }

    pub fn spacing_hz(&self) -> f64 {
        self.spacing_hz
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_max
    }

    /// Number of bins in the window.
    pub fn len(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bins(&self) -> impl Iterator<Item = i64> {
        self.n_min..=self.n_max
    }

    pub fn contains(&self, bin: i64) -> bool {
        bin >= self.n_min && bin <= self.n_max
    }

    /// Row/column index of `bin` inside the window.
    pub fn index_of(&self, bin: i64) -> Result<usize> {
        if self.contains(bin) {
            Ok((bin - self.n_min) as usize)
        } else {
            Err(Error::BinOutOfWindow {
                bin,
                n_min: self.n_min,
                n_max: self.n_max,
            })
        }
    }

    /// Angular frequency of bin `n` in rad/s.
    pub fn angular_frequency(&self, n: i64) -> f64 {
        2.0 * PI * (self.center_hz + n as f64 * self.spacing_hz)
    }

    /// Same grid with `extra` more bins on each side.
    pub fn widened(&self, extra: i64) -> Self {
        FrequencyGrid {
            n_min: self.n_min - extra,
            n_max: self.n_max + extra,
            ..*self
        }
    }

    pub fn same_window(&self, other: &FrequencyGrid) -> bool {
        self.n_min == other.n_min && self.n_max == other.n_max
    }
}
