//! Mixed-strategy cost game: the defender either does nothing or reserves
//! an alliance of eta members; the attacker's response is a burst or not.
//! Costs combine the token value at risk with the linear alliance cost, and
//! the optimizer sweeps eta for the total-cost minimum subject to the
//! feasibility bounds.

use serde::Serialize;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::decision::{AllianceConfig, PoissonSurrogate};
use crate::error::{ModelError, Result};
use crate::stochastic::NetworkParams;

/// Token value at risk and the per-member alliance cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostModel {
    /// Total offered token value V (currency units).
    pub token_value: f64,
    /// Cost per reserved alliance member (currency units); c(eta) = member_cost * eta.
    pub member_cost: f64,
}

impl CostModel {
    pub fn new(token_value: f64, member_cost: f64) -> Result<Self> {
        if !(token_value.is_finite() && token_value > 0.0) {
            return Err(ModelError::InvalidParameter {
                name: "token_value",
                value: token_value,
                requirement: "> 0",
            });
        }
        if !(member_cost.is_finite() && member_cost >= 0.0) {
            return Err(ModelError::InvalidParameter {
                name: "member_cost",
                value: member_cost,
                requirement: ">= 0",
            });
        }
        Ok(Self {
            token_value,
            member_cost,
        })
    }

    /// Alliance cost c(eta).
    pub fn alliance_cost(&self, eta: u64) -> f64 {
        self.member_cost * eta as f64
    }
}

/// Defender strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DefenderStrategy {
    DoNothing,
    Action,
}

/// Attacker responses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AttackerResponse {
    NotBurst,
    Burst,
}

/// One cell of the cost matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrategyOutcome {
    pub strategy: DefenderStrategy,
    pub response: AttackerResponse,
    pub cost: f64,
}

impl StrategyOutcome {
    /// Cost-matrix cell: doing nothing costs V on a burst; acting costs
    /// c(eta) always plus V on a burst.
    pub fn evaluate(
        cost_model: &CostModel,
        eta: u64,
        strategy: DefenderStrategy,
        response: AttackerResponse,
    ) -> Self {
        let cost = match (strategy, response) {
            (DefenderStrategy::DoNothing, AttackerResponse::NotBurst) => 0.0,
            (DefenderStrategy::DoNothing, AttackerResponse::Burst) => cost_model.token_value,
            (DefenderStrategy::Action, AttackerResponse::NotBurst) => cost_model.alliance_cost(eta),
            (DefenderStrategy::Action, AttackerResponse::Burst) => {
                cost_model.alliance_cost(eta) + cost_model.token_value
            }
        };
        Self {
            strategy,
            response,
            cost,
        }
    }
}

/// Burst probability under a defender strategy: q0 with no action, q1_eta
/// under the alliance action.
pub fn burst_probability(strategy: DefenderStrategy, q0: f64, q1_eta: f64) -> f64 {
    match strategy {
        DefenderStrategy::DoNothing => q0,
        DefenderStrategy::Action => q1_eta,
    }
}

/// Expected strategy costs (S_NoA, S_Act).
///
/// S_Act is the algebraic simplification c(eta) + V q1 of the two-cell
/// expectation c(eta)(1 - q1) + (c(eta) + V) q1.
pub fn strategy_costs(cost_model: &CostModel, eta: u64, q0: f64, q1_eta: f64) -> (f64, f64) {
    let s_noa = cost_model.token_value * q0;
    let s_act = cost_model.alliance_cost(eta) + cost_model.token_value * q1_eta;
    (s_noa, s_act)
}

/// Total network cost: act when the decision moment is still winnable
/// (probability p_cminus1), otherwise the token value rides on q0.
pub fn total_cost(cost_model: &CostModel, eta: u64, q0: f64, q1_eta: f64, p_cminus1: f64) -> f64 {
    let (s_noa, s_act) = strategy_costs(cost_model, eta, q0, q1_eta);
    s_act * p_cminus1 + s_noa * (1.0 - p_cminus1)
}

/// Inclusive sweep over alliance sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepSpec {
    pub start: u64,
    pub end: u64,
    pub step: u64,
}

impl SweepSpec {
    pub fn new(start: u64, end: u64, step: u64) -> Result<Self> {
        if step == 0 || end < start {
            return Err(ModelError::EmptySweep(format!(
                "start {start}, end {end}, step {step}"
            )));
        }
        Ok(Self { start, end, step })
    }

    /// Default sweep for a network: 0..=M with a step that keeps the curve
    /// around six hundred points.
    pub fn default_for(network: &NetworkParams) -> Self {
        let step = (network.node_count / 600).max(1);
        Self {
            start: 0,
            end: network.threshold,
            step,
        }
    }

    pub fn values(&self) -> Vec<u64> {
        let mut out: Vec<u64> = (self.start..=self.end)
            .step_by(self.step as usize)
            .collect();
        if *out.last().expect("non-empty by construction") != self.end {
            out.push(self.end);
        }
        out
    }
}

/// One sweep point of the cost curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostPoint {
    pub eta: u64,
    pub q1_eta: f64,
    pub s_act: f64,
    pub total_cost: f64,
}

/// Optimizer output: threshold rule, cost-curve argmin and the literal
/// feasibility bound.
#[derive(Debug, Clone, Serialize)]
pub struct OptimizationResult {
    /// Smallest swept eta with a strict improvement S_NoA > S_Act(eta);
    /// None when no swept point qualifies (eta = 0 is always an exact tie).
    pub eta_threshold: Option<u64>,
    /// Cost-curve argmin (ties broken toward smaller eta) — the headline
    /// answer.
    pub eta_argmin: u64,
    pub min_total_cost: f64,
    pub cost_curve: Vec<CostPoint>,
    /// eta_argmin >= member_cost / (V q0 - member_cost), taken literally,
    /// and eta_argmin <= ceil(N/2).
    pub feasible: bool,
    pub feasibility_bound: f64,
    /// V q0 <= member_cost makes the literal bound meaningless.
    pub feasibility_vacuous: bool,
    pub q0: f64,
    pub p_cminus1: f64,
}

/// Evaluate the total-cost curve over an eta sweep and locate both the
/// threshold rule and the argmin. q1 is recomputed per eta from the
/// surrogate; q0 and p are eta-free. Sweep points evaluate independently
/// (in parallel with the `parallel` feature) and assemble in eta order.
pub fn optimize_eta(
    cost_model: &CostModel,
    surrogate: &PoissonSurrogate,
    rho: f64,
    p_cminus1: f64,
    network: &NetworkParams,
    sweep: &SweepSpec,
) -> Result<OptimizationResult> {
    if sweep.start > network.threshold || sweep.end > network.threshold {
        return Err(ModelError::InvalidParameter {
            name: "sweep",
            value: sweep.end as f64,
            requirement: "within [0, ceil(N/2)]",
        });
    }
    let q0 = surrogate.q0();
    let etas = sweep.values();
    let evaluate = |&eta: &u64| -> CostPoint {
        let alliance = AllianceConfig { eta, rho };
        let q1 = surrogate.q1_eta(&alliance);
        let (_, s_act) = strategy_costs(cost_model, eta, q0, q1);
        CostPoint {
            eta,
            q1_eta: q1,
            s_act,
            total_cost: total_cost(cost_model, eta, q0, q1, p_cminus1),
        }
    };
    #[cfg(feature = "parallel")]
    let cost_curve: Vec<CostPoint> = etas.par_iter().map(evaluate).collect();
    #[cfg(not(feature = "parallel"))]
    let cost_curve: Vec<CostPoint> = etas.iter().map(evaluate).collect();

    Ok(assemble(cost_model, q0, p_cminus1, network, cost_curve))
}

fn assemble(
    cost_model: &CostModel,
    q0: f64,
    p_cminus1: f64,
    network: &NetworkParams,
    cost_curve: Vec<CostPoint>,
) -> OptimizationResult {
    let s_noa = cost_model.token_value * q0;
    let eta_threshold = cost_curve
        .iter()
        .find(|pt| s_noa > pt.s_act)
        .map(|pt| pt.eta);
    let best = cost_curve
        .iter()
        .min_by(|x, y| {
            x.total_cost
                .partial_cmp(&y.total_cost)
                .expect("finite costs")
                .then(x.eta.cmp(&y.eta))
        })
        .expect("non-empty sweep");
    let (eta_argmin, min_total_cost) = (best.eta, best.total_cost);

    let denom = cost_model.token_value * q0 - cost_model.member_cost;
    let feasibility_vacuous = denom <= 0.0;
    let feasibility_bound = if feasibility_vacuous {
        f64::NAN
    } else {
        cost_model.member_cost / denom
    };
    let feasible = (feasibility_vacuous || eta_argmin as f64 >= feasibility_bound)
        && eta_argmin <= network.threshold;

    OptimizationResult {
        eta_threshold,
        eta_argmin,
        min_total_cost,
        cost_curve,
        feasible,
        feasibility_bound,
        feasibility_vacuous,
        q0,
        p_cminus1,
    }
}

/// Coarse sweep with a step-1 refinement window around the coarse argmin;
/// curves merge by eta. This is the default optimizer entry point.
pub fn optimize_eta_refined(
    cost_model: &CostModel,
    surrogate: &PoissonSurrogate,
    rho: f64,
    p_cminus1: f64,
    network: &NetworkParams,
) -> Result<OptimizationResult> {
    let coarse_spec = SweepSpec::default_for(network);
    let coarse = optimize_eta(cost_model, surrogate, rho, p_cminus1, network, &coarse_spec)?;
    if coarse_spec.step == 1 {
        return Ok(coarse);
    }
    let lo = coarse.eta_argmin.saturating_sub(coarse_spec.step);
    let hi = (coarse.eta_argmin + coarse_spec.step).min(network.threshold);
    let fine_spec = SweepSpec::new(lo, hi, 1)?;
    let fine = optimize_eta(cost_model, surrogate, rho, p_cminus1, network, &fine_spec)?;

    let mut merged = coarse.cost_curve;
    merged.extend(fine.cost_curve);
    merged.sort_by_key(|pt| pt.eta);
    merged.dedup_by_key(|pt| pt.eta);
    Ok(assemble(cost_model, coarse.q0, p_cminus1, network, merged))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::AllianceConfig;
    use crate::stochastic::{ArrivalModel, ObservationModel};

    fn worked_surrogate() -> (PoissonSurrogate, NetworkParams) {
        let network = NetworkParams::new(60_000).unwrap();
        let arrival = ArrivalModel::new(50.0, 0.0).unwrap();
        let obs = ObservationModel::new(3.0, 1.0).unwrap();
        (
            PoissonSurrogate::new(&arrival, &obs, &network, 598.0),
            network,
        )
    }

    #[test]
    fn cost_matrix_cells() {
        let cm = CostModel::new(1_000_000.0, 0.001).unwrap();
        let cell = |s, r| StrategyOutcome::evaluate(&cm, 7000, s, r).cost;
        assert_eq!(
            cell(DefenderStrategy::DoNothing, AttackerResponse::NotBurst),
            0.0
        );
        assert_eq!(
            cell(DefenderStrategy::DoNothing, AttackerResponse::Burst),
            1_000_000.0
        );
        assert!((cell(DefenderStrategy::Action, AttackerResponse::NotBurst) - 7.0).abs() < 1e-12);
        assert!(
            (cell(DefenderStrategy::Action, AttackerResponse::Burst) - 1_000_007.0).abs() < 1e-12
        );
    }

    #[test]
    fn strategy_costs_match_two_term_expectation() {
        let cm = CostModel::new(1_000_000.0, 0.001).unwrap();
        for &(eta, q0, q1) in &[(0u64, 0.3, 0.3), (7000, 0.5, 0.01), (100, 0.9, 0.2)] {
            let (s_noa, s_act) = strategy_costs(&cm, eta, q0, q1);
            assert!((s_noa - cm.token_value * q0).abs() < 1e-9);
            let c = cm.alliance_cost(eta);
            let two_term = c * (1.0 - q1) + (c + cm.token_value) * q1;
            assert!(
                (s_act - two_term).abs() < 1e-12 * two_term.max(1.0),
                "eta={eta}"
            );
        }
        // Edge values from the matrix.
        let (s_noa, _) = strategy_costs(&cm, 0, 0.1, 0.1);
        assert!((s_noa - 100_000.0).abs() < 1e-9);
        let cm_free = CostModel::new(1_000_000.0, 0.0).unwrap();
        let (_, s_act) = strategy_costs(&cm_free, 500, 0.3, 0.2);
        assert!((s_act - 200_000.0).abs() < 1e-9);
    }

    #[test]
    fn total_cost_extremes_and_bounds() {
        let cm = CostModel::new(1_000_000.0, 0.001).unwrap();
        let (q0, q1, eta) = (0.4, 0.1, 5000u64);
        let (s_noa, s_act) = strategy_costs(&cm, eta, q0, q1);
        assert!((total_cost(&cm, eta, q0, q1, 1.0) - s_act).abs() < 1e-9);
        assert!((total_cost(&cm, eta, q0, q1, 0.0) - s_noa).abs() < 1e-9);
        // Convex combination stays between the two strategy costs.
        for &p in &[0.1, 0.5, 0.9] {
            let t = total_cost(&cm, eta, q0, q1, p);
            assert!(t >= s_noa.min(s_act) - 1e-9 && t <= s_noa.max(s_act) + 1e-9);
        }
    }

    #[test]
    fn optimizer_rho_zero_has_no_threshold_and_argmin_zero() {
        let (surrogate, network) = worked_surrogate();
        let cm = CostModel::new(1_000_000.0, 0.001).unwrap();
        let sweep = SweepSpec::new(0, 2000, 100).unwrap();
        let result = optimize_eta(&cm, &surrogate, 0.0, 0.4, &network, &sweep).unwrap();
        assert_eq!(result.eta_threshold, None);
        assert_eq!(result.eta_argmin, 0);
    }

    #[test]
    fn optimizer_free_alliance_prefers_sweep_max() {
        // Sweep kept inside the range where q1 still strictly decreases;
        // past it q1 plateaus at 0 and the smaller-eta tie rule takes over.
        let (surrogate, network) = worked_surrogate();
        let cm = CostModel::new(1_000_000.0, 0.0).unwrap();
        let sweep = SweepSpec::new(0, 1200, 100).unwrap();
        let result = optimize_eta(&cm, &surrogate, 0.7, 0.4, &network, &sweep).unwrap();
        assert_eq!(result.eta_argmin, 1200);
    }

    #[test]
    fn optimizer_worked_example_interior_argmin() {
        let (surrogate, network) = worked_surrogate();
        let cm = CostModel::new(1_000_000.0, 0.001).unwrap();
        let p = surrogate.p_cminus1();
        let result = optimize_eta_refined(&cm, &surrogate, 0.7, p, &network).unwrap();
        assert!(
            result.eta_argmin > 0 && result.eta_argmin < network.threshold,
            "argmin {} not interior",
            result.eta_argmin
        );
        // Neighborhood of the argmin looks convex on the coarse grid.
        let curve = &result.cost_curve;
        let idx = curve
            .iter()
            .position(|pt| pt.eta == result.eta_argmin)
            .unwrap();
        if idx > 0 {
            assert!(curve[idx - 1].total_cost >= result.min_total_cost);
        }
        if idx + 1 < curve.len() {
            assert!(curve[idx + 1].total_cost >= result.min_total_cost);
        }
        assert!(result.feasible);
    }

    #[test]
    fn argmin_invariant_under_currency_scaling() {
        let (surrogate, network) = worked_surrogate();
        let sweep = SweepSpec::new(0, 4000, 200).unwrap();
        let base = CostModel::new(1_000_000.0, 0.001).unwrap();
        let scaled = CostModel::new(3_500_000.0, 0.0035).unwrap();
        let r1 = optimize_eta(&base, &surrogate, 0.7, 0.4, &network, &sweep).unwrap();
        let r2 = optimize_eta(&scaled, &surrogate, 0.7, 0.4, &network, &sweep).unwrap();
        assert_eq!(r1.eta_argmin, r2.eta_argmin);
    }

    #[test]
    fn cost_nonincreasing_in_eta_when_members_are_free() {
        let (surrogate, network) = worked_surrogate();
        let cm = CostModel::new(1_000_000.0, 0.0).unwrap();
        let sweep = SweepSpec::new(0, 3000, 100).unwrap();
        let result = optimize_eta(&cm, &surrogate, 0.7, 0.4, &network, &sweep).unwrap();
        for pair in result.cost_curve.windows(2) {
            assert!(pair[1].total_cost <= pair[0].total_cost + 1e-9);
        }
    }

    #[test]
    fn empty_sweep_is_rejected() {
        assert!(SweepSpec::new(10, 5, 1).is_err());
        assert!(SweepSpec::new(0, 5, 0).is_err());
    }

    #[test]
    fn alliance_config_respects_network_bound() {
        let network = NetworkParams::new(20).unwrap();
        assert!(AllianceConfig::new(10, 0.5)
            .unwrap()
            .check_against(&network)
            .is_ok());
        assert!(AllianceConfig::new(11, 0.5)
            .unwrap()
            .check_against(&network)
            .is_err());
    }
}
