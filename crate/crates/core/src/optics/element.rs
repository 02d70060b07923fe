use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::grid::FrequencyGrid;
use crate::error::{Error, Result};
use crate::linalg::wrap_phase;

/// Sinusoidal phase modulator driven at exactly one bin spacing:
/// temporal phase `m * sin(d_omega * t + theta)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawEom")]
pub struct EomElement {
    pub m: f64,
    pub theta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEom {
    m: f64,
    theta: f64,
}

impl From<RawEom> for EomElement {
    fn from(r: RawEom) -> Self {
        EomElement::new(r.m, r.theta)
    }
}

impl EomElement {
    /// Canonical form: `m >= 0` and `theta` in `(-pi, pi]`. A negative depth
    /// is the same drive shifted by pi.
    pub fn new(m: f64, theta: f64) -> Self {
        if m < 0.0 {
            EomElement {
                m: -m,
                theta: wrap_phase(theta + std::f64::consts::PI),
            }
        } else {
            EomElement {
                m,
                theta: wrap_phase(theta),
            }
        }
    }

    /// The drive that undoes this one.
    pub fn inverse(&self) -> Self {
        EomElement::new(self.m, self.theta + std::f64::consts::PI)
    }
}

/// Line-by-line pulse shaper: an independent spectral phase per bin.
/// Bins absent from the map carry zero phase.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawShaper")]
pub struct ShaperElement {
    pub phases: BTreeMap<i64, f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawShaper {
    phases: BTreeMap<i64, f64>,
}

impl From<RawShaper> for ShaperElement {
    fn from(r: RawShaper) -> Self {
        ShaperElement::new(r.phases)
    }
}

impl ShaperElement {
    pub fn new(phases: BTreeMap<i64, f64>) -> Self {
        ShaperElement {
            phases: phases
                .into_iter()
                .map(|(k, v)| (k, wrap_phase(v)))
                .collect(),
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, f64)>) -> Self {
        Self::new(pairs.into_iter().collect())
    }

    pub fn phase(&self, bin: i64) -> f64 {
        self.phases.get(&bin).copied().unwrap_or(0.0)
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.phases.iter().map(|(&k, &v)| (k, -v)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Element {
    Eom(EomElement),
    Ps(ShaperElement),
}

impl Element {
    pub fn inverse(&self) -> Self {
        match self {
            Element::Eom(e) => Element::Eom(e.inverse()),
            Element::Ps(s) => Element::Ps(s.inverse()),
        }
    }

    pub fn modulation_depth(&self) -> f64 {
        match self {
            Element::Eom(e) => e.m,
            Element::Ps(_) => 0.0,
        }
    }
}

/// Ordered cascade of elements in propagation order (first element sees
/// the input light first).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit")]
pub struct CircuitSpec {
    pub grid: FrequencyGrid,
    elements: Vec<Element>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    grid: FrequencyGrid,
    elements: Vec<Element>,
}

impl TryFrom<RawCircuit> for CircuitSpec {
    type Error = Error;
    fn try_from(r: RawCircuit) -> Result<Self> {
        CircuitSpec::new(r.grid, r.elements)
    }
}

impl CircuitSpec {
    pub fn new(grid: FrequencyGrid, elements: Vec<Element>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyCircuit);
        }
        Ok(CircuitSpec { grid, elements })
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// Same elements evaluated on a different window.
    pub fn with_grid(&self, grid: FrequencyGrid) -> Self {
        CircuitSpec {
            grid,
            elements: self.elements.clone(),
        }
    }

    /// Element-wise inverse in reversed order; composing a circuit with its
    /// inverse gives the identity up to truncation.
    pub fn inverse(&self) -> Self {
        CircuitSpec {
            grid: self.grid,
            elements: self.elements.iter().rev().map(Element::inverse).collect(),
        }
    }

    /// Sum of modulation depths over all EOMs.
    pub fn total_modulation_depth(&self) -> f64 {
        self.elements.iter().map(Element::modulation_depth).sum()
    }

    /// Short topology label such as `2EOM/1PS`.
    pub fn topology_label(&self) -> String {
        let eoms = self
            .elements
            .iter()
            .filter(|e| matches!(e, Element::Eom(_)))
            .count();
        format!("{}EOM/{}PS", eoms, self.elements.len() - eoms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn eom_canonical_form() {
        let e = EomElement::new(-1.2, 0.3);
        assert_eq!(e.m, 1.2);
        assert!((e.theta - (0.3 + PI - 2.0 * PI)).abs() < 1e-12);
        let e = EomElement::new(0.5, 7.0);
        assert!(e.theta > -PI && e.theta <= PI);
    }

    #[test]
    fn shaper_defaults_to_zero() {
        let s = ShaperElement::from_pairs([(3, 4.0)]);
        assert_eq!(s.phase(0), 0.0);
        assert!((s.phase(3) - (4.0 - 2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn element_json_is_tagged() {
        let grid = FrequencyGrid::around(&[0, 1], 2).unwrap();
        let c = CircuitSpec::new(
            grid,
            vec![
                Element::Eom(EomElement::new(1.0, 0.5)),
                Element::Ps(ShaperElement::from_pairs([(0, 1.0), (-1, -0.5)])),
            ],
        )
        .unwrap();
        let v: serde_json::Value = serde_json::to_value(&c).unwrap();
        assert_eq!(v["elements"][0]["eom"]["m"], 1.0);
        assert_eq!(v["elements"][1]["ps"]["phases"]["-1"], -0.5);
        assert_eq!(v["grid"]["n_min"], -2);
        let back: CircuitSpec = serde_json::from_value(v).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn empty_circuit_rejected() {
        let grid = FrequencyGrid::around(&[0, 1], 2).unwrap();
        assert!(matches!(
            CircuitSpec::new(grid, vec![]),
            Err(Error::EmptyCircuit)
        ));
        let json = r#"{"grid":{"center_hz":1,"spacing_hz":1,"n_min":0,"n_max":2},"elements":[]}"#;
        assert!(serde_json::from_str::<CircuitSpec>(json).is_err());
    }
}
