use std::cmp::Ordering;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::evaluate::Evaluator;
use super::lbfgs::{minimize, LbfgsSettings};
use super::problem::{
    DesignProblem, DesignResult, DesignStatus, ElementKind, OptimizerConfig, TraceEntry,
};
use crate::error::Result;
use crate::optics::{metrics_adaptive, GateMetrics, projected_transform, FrequencyGrid, QubitModeMap, DEFAULT_GUARD_BINS};

struct RestartOutcome {
    x: Vec<f64>,
    success: f64,
    fidelity: f64,
    depth: f64,
    trace: Vec<TraceEntry>,
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

fn initial_point(ev: &Evaluator, problem: &DesignProblem, cfg: &OptimizerConfig, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = ev.grid().len();
    let mut x = Vec::with_capacity(ev.param_count());
    for kind in problem.topology.kinds() {
        match kind {
            ElementKind::Eom => {
                x.push(rng.random_range(0.0..=cfg.max_initial_depth));
                x.push(rng.random_range(-PI..PI));
            }
            ElementKind::Ps => x.extend((0..n).map(|_| rng.random_range(-PI..PI))),
        }
    }
    x
}

fn modulation_depth(problem: &DesignProblem, x: &[f64], window: usize) -> f64 {
    let mut offset = 0;
    let mut total = 0.0;
    for kind in problem.topology.kinds() {
        match kind {
            ElementKind::Eom => {
                total += x[offset].abs();
                offset += 2;
            }
            ElementKind::Ps => offset += window,
        }
    }
    total
}

fn run_restart(
    ev: &Evaluator,
    problem: &DesignProblem,
    cfg: &OptimizerConfig,
    seed: u64,
    restart: usize,
) -> RestartOutcome {
    let mut rng = restart_rng(seed, restart);
    let mut x = initial_point(ev, problem, cfg, &mut rng);
    let floor = problem.fidelity_floor;
    let internal_floor = (floor + cfg.feasibility_margin).min(1.0);
    let settings = LbfgsSettings {
        memory: cfg.lbfgs_memory,
        max_iters: cfg.max_iters_per_round,
        grad_tol: cfg.grad_tol,
        f_tol: cfg.f_tol,
    };
    let mut penalty = cfg.penalty_start;
    let mut trace = Vec::new();
    let mut metrics = ev.metrics_unchecked(&x);
    for round in 0..cfg.max_penalty_rounds {
        let lambda = penalty;
        let score = |m: GateMetrics| {
            let v = (internal_floor - m.fidelity).max(0.0);
            -m.success + lambda * v * v
        };
        let res = minimize(
            |p, g| {
                ev.fd_gradient(p, cfg.fd_step, &score, g);
                score(ev.metrics_unchecked(p))
            },
            x,
            &settings,
        );
        x = res.x;
        metrics = ev.metrics_unchecked(&x);
        trace.push(TraceEntry {
            restart,
            round,
            penalty: lambda,
            iterations: res.iterations,
            success: metrics.success,
            fidelity: metrics.fidelity,
        });
        let violation = (internal_floor - metrics.fidelity).max(0.0);
        if metrics.fidelity >= floor && violation < cfg.violation_tol {
            break;
        }
        penalty *= cfg.penalty_growth;
    }
    RestartOutcome {
        depth: modulation_depth(problem, &x, ev.grid().len()),
        x,
        success: metrics.success,
        fidelity: metrics.fidelity,
        trace,
    }
}

/// Ranking among feasible candidates: higher success, then higher fidelity,
/// then lower total modulation depth.
fn rank(a: (f64, f64, f64), b: (f64, f64, f64)) -> Ordering {
    b.0.partial_cmp(&a.0)
        .unwrap_or(Ordering::Equal)
        .then(b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal))
        .then(a.2.partial_cmp(&b.2).unwrap_or(Ordering::Equal))
}

/// Multistart penalty search. Always returns a result; `status` reports
/// whether the fidelity floor was met.
pub fn optimize(problem: &DesignProblem, config: &OptimizerConfig, seed: u64) -> Result<DesignResult> {
    let ev = Evaluator::new(problem)?;
    let restarts = config.restarts.max(1);
    let outcomes: Vec<RestartOutcome> = if config.parallel {
        (0..restarts)
            .into_par_iter()
            .map(|r| run_restart(&ev, problem, config, seed, r))
            .collect()
    } else {
        (0..restarts)
            .map(|r| run_restart(&ev, problem, config, seed, r))
            .collect()
    };

    let floor = problem.fidelity_floor;
    let best = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| o.fidelity >= floor)
        .min_by(|(_, a), (_, b)| rank((a.success, a.fidelity, a.depth), (b.success, b.fidelity, b.depth)))
        .or_else(|| {
            outcomes
                .iter()
                .enumerate()
                .max_by(|(_, a), (_, b)| a.fidelity.partial_cmp(&b.fidelity).unwrap_or(Ordering::Equal))
        })
        .map(|(i, _)| i)
        .unwrap_or(0);

    let circuit = ev.decode(&outcomes[best].x)?;
    let (metrics, circuit) = metrics_adaptive(&circuit, &problem.map, &problem.target, config.guard_tol)?;
    let v_projected = projected_transform(&circuit, &problem.map)?;
    let status = if metrics.fidelity >= floor {
        DesignStatus::Feasible
    } else {
        DesignStatus::Infeasible
    };
    Ok(DesignResult {
        status,
        circuit,
        map: problem.map.clone(),
        achieved_fidelity: metrics.fidelity,
        achieved_success: metrics.success,
        fidelity_floor: floor,
        v_projected,
        best_restart: best,
        seed,
        optimizer_trace: outcomes.into_iter().flat_map(|o| o.trace).collect(),
    })
}

/// Optimize `template` on each candidate placement and rank the results:
/// feasible designs first by success (ties: fidelity, then lower total
/// modulation depth), infeasible ones after by fidelity.
pub fn placement_search(
    template: &DesignProblem,
    candidates: &[QubitModeMap],
    config: &OptimizerConfig,
    seed: u64,
) -> Result<Vec<DesignResult>> {
    let mut results = Vec::with_capacity(candidates.len());
    for map in candidates {
        let grid = match template.grid {
            Some(g) if map.check_inside(&g).is_ok() => Some(g),
            _ => Some(FrequencyGrid::around(&map.bins(), DEFAULT_GUARD_BINS)?),
        };
        let problem = DesignProblem {
            map: map.clone(),
            grid,
            ..template.clone()
        };
        results.push(optimize(&problem, config, seed)?);
    }
    results.sort_by(|a, b| match (a.is_feasible(), b.is_feasible()) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => rank(
            (a.achieved_success, a.achieved_fidelity, a.total_modulation_depth()),
            (b.achieved_success, b.achieved_fidelity, b.total_modulation_depth()),
        ),
        (false, false) => b
            .achieved_fidelity
            .partial_cmp(&a.achieved_fidelity)
            .unwrap_or(Ordering::Equal),
    });
    Ok(results)
}
