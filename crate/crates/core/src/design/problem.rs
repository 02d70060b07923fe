use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat4;
use crate::optics::{cnot, CircuitSpec, FrequencyGrid, QubitModeMap, DEFAULT_GUARD_BINS};
use crate::reference::DESIGN_FIDELITY_FLOOR;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Eom,
    Ps,
}

/// Ordered element kinds of a cascade template.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTopology", into = "Vec<ElementKind>")]
pub struct Topology(Vec<ElementKind>);

#[derive(Deserialize)]
#[serde(untagged)]
enum RawTopology {
    List(Vec<ElementKind>),
    Name(String),
}

impl TryFrom<RawTopology> for Topology {
    type Error = Error;
    fn try_from(r: RawTopology) -> Result<Self> {
        match r {
            RawTopology::List(v) => Topology::new(v),
            RawTopology::Name(s) => s.parse(),
        }
    }
}

impl From<Topology> for Vec<ElementKind> {
    fn from(t: Topology) -> Self {
        t.0
    }
}

impl std::str::FromStr for Topology {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace(' ', "").as_str() {
            "2EOM/1PS" => Ok(Topology::two_eom_one_ps()),
            "3EOM/2PS" => Ok(Topology::three_eom_two_ps()),
            "1PS" | "PS" => Ok(Topology::shaper_only()),
            other => {
                // Compact form such as "EPE".
                let kinds = other
                    .chars()
                    .map(|c| match c {
                        'E' => Ok(ElementKind::Eom),
                        'P' => Ok(ElementKind::Ps),
                        _ => Err(Error::InvalidProblem(format!("unknown topology {s:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Topology::new(kinds)
            }
        }
    }
}

impl Topology {
    pub fn new(kinds: Vec<ElementKind>) -> Result<Self> {
        if kinds.is_empty() {
            return Err(Error::InvalidProblem("topology has no elements".into()));
        }
        Ok(Topology(kinds))
    }

    /// EOM, PS, EOM.
    pub fn two_eom_one_ps() -> Self {
        Topology(vec![ElementKind::Eom, ElementKind::Ps, ElementKind::Eom])
    }

    /// EOM, PS, EOM, PS, EOM.
    pub fn three_eom_two_ps() -> Self {
        use ElementKind::*;
        Topology(vec![Eom, Ps, Eom, Ps, Eom])
    }

    pub fn shaper_only() -> Self {
        Topology(vec![ElementKind::Ps])
    }

    pub fn kinds(&self) -> &[ElementKind] {
        &self.0
    }

    /// Length of the flat parameter vector: two per EOM (m, theta) and one
    /// phase per window bin per PS.
    pub fn param_count(&self, window: usize) -> usize {
        self.0
            .iter()
            .map(|k| match k {
                ElementKind::Eom => 2,
                ElementKind::Ps => window,
            })
            .sum()
    }
}

fn default_floor() -> f64 {
    DESIGN_FIDELITY_FLOOR
}

fn default_target() -> Mat4 {
    cnot()
}

/// Maximize success of `topology` on `map` subject to fidelity against
/// `target` of at least `fidelity_floor`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignProblem {
    pub topology: Topology,
    #[serde(default = "default_target")]
    pub target: Mat4,
    #[serde(default = "default_floor")]
    pub fidelity_floor: f64,
    pub map: QubitModeMap,
    /// Truncation window; defaults to the qubit span plus 16 guard bins.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<FrequencyGrid>,
}

impl DesignProblem {
    /// CNOT on the experiment's placement with the standard floor.
    pub fn cnot(topology: Topology) -> Self {
        DesignProblem {
            topology,
            target: cnot(),
            fidelity_floor: DESIGN_FIDELITY_FLOOR,
            map: QubitModeMap::experiment(),
            grid: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fidelity_floor > 0.0 && self.fidelity_floor <= 1.0) {
            return Err(Error::InvalidProblem(format!(
                "fidelity floor {} outside (0, 1]",
                self.fidelity_floor
            )));
        }
        self.map.check_inside(&self.resolved_grid()?)
    }

    pub fn resolved_grid(&self) -> Result<FrequencyGrid> {
        match self.grid {
            Some(g) => Ok(g),
            None => FrequencyGrid::around(&self.map.bins(), DEFAULT_GUARD_BINS),
        }
    }

    pub fn param_count(&self) -> Result<usize> {
        Ok(self.topology.param_count(self.resolved_grid()?.len()))
    }
}

/// Multistart optimizer settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Initial modulation depths are drawn from `[0, max_initial_depth]`.
    pub max_initial_depth: f64,
    pub penalty_start: f64,
    pub penalty_growth: f64,
    pub max_penalty_rounds: usize,
    /// Stop escalating once `internal_floor - F` is below this.
    pub violation_tol: f64,
    /// The penalty targets `floor + feasibility_margin` so that converged
    /// points land on the feasible side.
    pub feasibility_margin: f64,
    pub fd_step: f64,
    pub lbfgs_memory: usize,
    pub max_iters_per_round: usize,
    pub grad_tol: f64,
    pub f_tol: f64,
    /// Guard-band doubling stops when both metrics move by less than this.
    pub guard_tol: f64,
    /// Run restarts on the rayon pool.
    pub parallel: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 64,
            max_initial_depth: 3.0,
            penalty_start: 1e2,
            penalty_growth: 10.0,
            max_penalty_rounds: 12,
            violation_tol: 1e-6,
            feasibility_margin: 5e-7,
            fd_step: 1e-6,
            lbfgs_memory: 12,
            max_iters_per_round: 1500,
            grad_tol: 1e-9,
            f_tol: 1e-13,
            guard_tol: 1e-8,
            parallel: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignStatus {
    Feasible,
    Infeasible,
}

/// One penalty round of one restart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub restart: usize,
    pub round: usize,
    pub penalty: f64,
    pub iterations: usize,
    pub success: f64,
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignResult {
    pub status: DesignStatus,
    pub circuit: CircuitSpec,
    pub map: QubitModeMap,
    pub achieved_fidelity: f64,
    pub achieved_success: f64,
    pub fidelity_floor: f64,
    pub v_projected: Mat4,
    pub best_restart: usize,
    pub seed: u64,
    pub optimizer_trace: Vec<TraceEntry>,
}

impl DesignResult {
    pub fn is_feasible(&self) -> bool {
        self.status == DesignStatus::Feasible
    }

    pub fn total_modulation_depth(&self) -> f64 {
        self.circuit.total_modulation_depth()
    }

    /// One-paragraph human-readable summary.
    pub fn summary(&self) -> String {
        use crate::optics::Element;
        let mut s = format!(
            "{} {} on bins C0={} C1={} T0={} T1={}: P = {:.6}, F = {:.8} (floor {})\n",
            self.circuit.topology_label(),
            match self.status {
                DesignStatus::Feasible => "feasible",
                DesignStatus::Infeasible => "INFEASIBLE",
            },
            self.map.c0,
            self.map.c1,
            self.map.t0,
            self.map.t1,
            self.achieved_success,
            self.achieved_fidelity,
            self.fidelity_floor,
        );
        for (i, el) in self.circuit.elements().iter().enumerate() {
            match el {
                Element::Eom(e) => {
                    s += &format!("  [{i}] EOM  m = {:.6} rad, theta = {:+.6} rad\n", e.m, e.theta)
                }
                Element::Ps(p) => {
                    let shown: Vec<String> = self
                        .map
                        .bins()
                        .iter()
                        .map(|b| format!("{b}:{:+.4}", p.phase(*b)))
                        .collect();
                    s += &format!("  [{i}] PS   qubit-bin phases {}\n", shown.join(" "));
                }
            }
        }
        s
    }
}
