//! Decision-making parameters for the defender: exit-index mean, decision
//! moment, block-count marginals, and the burst/safety probabilities the
//! cost game consumes.
//!
//! Two computation routes live side by side. The lattice route is exact for
//! the memoryless model (first-passage law, overshoot corrections, the
//! epoch-length bias of the crossing observation). The surrogate route
//! evaluates the closed Poisson-tail formulas used by the cost layer; it
//! treats the count at the decision horizon as Poisson at its mean and is
//! audited against the exact route and the simulator rather than trusted.

pub mod closed_form;

use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::numerics::{binomial_pmf_table, poisson_survival_table};
use crate::scenario::{InitialCount, Scenario};
use crate::stochastic::{
    expected_exit_index, first_passage, geometric_law, ArrivalModel, FirstPassageResult,
    NetworkParams, ObservationModel,
};

/// Strategic-alliance parameters: reserved member count and the acceptance
/// rate of a request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AllianceConfig {
    pub eta: u64,
    pub rho: f64,
}

impl AllianceConfig {
    pub fn new(eta: u64, rho: f64) -> Result<Self> {
        if !(rho.is_finite() && (0.0..=1.0).contains(&rho)) {
            return Err(ModelError::InvalidParameter {
                name: "rho",
                value: rho,
                requirement: "in [0, 1]",
            });
        }
        Ok(Self { eta, rho })
    }

    /// The alliance cannot exceed the majority threshold.
    pub fn check_against(&self, network: &NetworkParams) -> Result<()> {
        if self.eta > network.threshold {
            return Err(ModelError::InvalidParameter {
                name: "eta",
                value: self.eta as f64,
                requirement: "eta <= ceil(N/2)",
            });
        }
        Ok(())
    }

    /// Mean accepted members E\[B\] = eta * rho.
    pub fn mean_accepted(&self) -> f64 {
        self.eta as f64 * self.rho
    }
}

/// Which route produced a reported value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodTag {
    ExactDp,
    PaperApprox,
    Mc,
    Experimental,
}

/// Decision moment E[t_{nu-1}] with the degeneracy marker for E\[nu\] < 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecisionMoment {
    pub value: f64,
    pub degenerate: bool,
}

/// E[t_{nu-1}] = E\[t0\] + E\[U\](E\[nu\] - 1).
///
/// The formula treats the crossing epoch as a typical one; the epoch that
/// contains the crossing is length-biased, so this is a (good) closed
/// approximation, not the exact value — see [`decision_moment_exact`].
/// For E\[nu\] < 1 the formula has no literal meaning; E\[t0\] is returned and
/// flagged.
pub fn decision_moment(e_nu: f64, obs: &ObservationModel) -> DecisionMoment {
    if e_nu < 1.0 {
        DecisionMoment {
            value: obs.mean_initial,
            degenerate: true,
        }
    } else {
        DecisionMoment {
            value: obs.mean_initial + obs.mean_interval * (e_nu - 1.0),
            degenerate: false,
        }
    }
}

/// Exact E[t_{nu-1}] for the memoryless model.
///
/// t_{nu-1} = t0 + sum_{i=1}^{nu-1} U_i with t_{-1} = 0 on {nu = 0}.
/// By the stopping identity E[sum_{i<=nu} U_i] = E\[U\] E\[nu\]; the crossing
/// epoch satisfies E[U_nu | pre-state c] = E\[U\] ((M - c + 1) b + a) because
/// an epoch carrying at least k arrivals is length-biased; and the initial
/// epoch contributes E[t0 1{C0 < M}], in closed form per initial law.
pub fn decision_moment_exact(fp: &FirstPassageResult, scenario: &Scenario) -> f64 {
    let obs = &scenario.observation;
    let m = fp.threshold();
    let inc = fp.increment();
    let (a, b) = (inc.a(), inc.b());

    let e_t0_alive = match scenario.attacker_initial {
        InitialCount::Fixed(c0) => {
            if c0 < m {
                obs.mean_initial
            } else {
                0.0
            }
        }
        InitialCount::FromInitialEpoch => {
            // E[t0 1{C0 = k}] = mean_initial (k+1) a0^k b0^2.
            let init = geometric_law(scenario.arrival.lambda_c, obs.mean_initial)
                .expect("validated scenario");
            let (a0, b0) = (init.a(), init.b());
            let mut acc = 0.0;
            let mut pow = 1.0;
            for k in 0..m {
                acc += (k as f64 + 1.0) * pow;
                pow *= a0;
            }
            obs.mean_initial * b0 * b0 * acc
        }
    };

    let e_u_crossing: f64 = fp
        .pre_pmf()
        .iter()
        .enumerate()
        .map(|(c, w)| {
            let k = (m - c as u64) as f64;
            w * obs.mean_interval * ((k + 1.0) * b + a)
        })
        .sum();

    e_t0_alive + obs.mean_interval * fp.e_nu() - e_u_crossing
}

/// Marginal block-count means at the crossing, by the closed chain rules
/// E\[C_nu\] = E\[C0\] + E\[nu-1\] E\[J\], E[C_{nu-1}] = E\[C0\] + E[nu-2] E\[J\],
/// E[C_nu - B] = E\[C_nu\] - eta rho, with E[nu-k] floored at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockMarginals {
    pub e_c_nu: f64,
    pub e_c_prev: f64,
    pub e_c_nu_minus_b: f64,
}

pub fn block_marginals(
    e_nu: f64,
    e_c0: f64,
    e_increment: f64,
    alliance: &AllianceConfig,
) -> BlockMarginals {
    let e_c_nu = e_c0 + (e_nu - 1.0).max(0.0) * e_increment;
    let e_c_prev = e_c0 + (e_nu - 2.0).max(0.0) * e_increment;
    BlockMarginals {
        e_c_nu,
        e_c_prev,
        e_c_nu_minus_b: e_c_nu - alliance.mean_accepted(),
    }
}

/// The Poisson surrogate behind the closed burst/safety formulas: the block
/// count at the decision horizon is modeled as Poisson with mean
/// lambda_c (mean_initial + E\[nu-1\] mean_interval).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonSurrogate {
    pub mean: f64,
    pub threshold: u64,
    pub node_count: u64,
    pub lambda_alpha: f64,
}

impl PoissonSurrogate {
    pub fn new(
        arrival: &ArrivalModel,
        obs: &ObservationModel,
        network: &NetworkParams,
        e_nu: f64,
    ) -> Self {
        let mean = if arrival.lambda_c == 0.0 {
            0.0
        } else {
            arrival.lambda_c * (obs.mean_initial + (e_nu - 1.0).max(0.0) * obs.mean_interval)
        };
        Self {
            mean,
            threshold: network.threshold,
            node_count: network.node_count,
            lambda_alpha: arrival.lambda_c * obs.mean_interval,
        }
    }

    /// Burst probability with no action: P{X > M} for the surrogate count.
    pub fn q0(&self) -> f64 {
        poisson_survival_table(self.mean, self.threshold + 1, self.threshold + 1)[0]
    }

    /// Burst probability after the alliance action:
    /// sum_j P{B = j} P{X > M + j}, accepted members binomial.
    ///
    /// The strict tail mirrors `q0` so that eta = 0 and rho = 0 reduce to
    /// q0 identically.
    pub fn q1_eta(&self, alliance: &AllianceConfig) -> f64 {
        let b_pmf = binomial_pmf_table(alliance.eta, alliance.rho);
        let lo = self.threshold + 1;
        let hi = self.threshold + 1 + alliance.eta;
        let survival = poisson_survival_table(self.mean, lo, hi);
        b_pmf
            .iter()
            .enumerate()
            .map(|(j, &pb)| pb * survival[j])
            .sum()
    }

    /// Safety probability at the decision moment:
    /// P{X <= floor(N/2 - lambda_c mean_interval)}.
    pub fn p_cminus1(&self) -> f64 {
        let limit = self.node_count as f64 / 2.0 - self.lambda_alpha;
        if limit < 0.0 {
            return 0.0;
        }
        let k = limit.floor() as u64;
        1.0 - poisson_survival_table(self.mean, k + 1, k + 1)[0]
    }
}

/// Exact E\[nu\] with the method tag; thin named wrapper over the backward
/// recursion.
pub fn expected_nu(
    initial: &crate::stochastic::CountLaw,
    increment: crate::stochastic::GeometricLaw,
    threshold: u64,
) -> f64 {
    expected_exit_index(initial, increment, threshold)
}

/// Safety probability P{C_{nu-1} < M} from the exact lattice law: every
/// crossing with nu >= 1 has its pre-crossing count below M, so this is the
/// captured probability of {nu >= 1}.
pub fn p_cminus1_exact(fp: &FirstPassageResult) -> f64 {
    fp.p_prev_below_threshold()
}

/// pmf of C_nu - B over 0..=N, the accepted-member count convolved against
/// the crossing law; mass at N and above folds into the top bucket, and
/// (for threshold overrides below eta) negative differences clip to zero.
pub fn pmf_c_nu_minus_b(
    fp: &FirstPassageResult,
    alliance: &AllianceConfig,
    network: &NetworkParams,
) -> Vec<f64> {
    let n = network.node_count as usize;
    let mut out = vec![0.0_f64; n + 1];
    let c_pmf = fp.c_nu_pmf();
    let b_pmf = binomial_pmf_table(alliance.eta, alliance.rho);
    let m = fp.threshold();
    for (i, &pc) in c_pmf.iter().enumerate() {
        if pc == 0.0 {
            continue;
        }
        let c = m + i as u64;
        for (j, &pb) in b_pmf.iter().enumerate() {
            if pb == 0.0 {
                continue;
            }
            let k = c.saturating_sub(j as u64).min(network.node_count) as usize;
            out[k] += pc * pb;
        }
    }
    out
}

/// sigma_eta(b) = E[b^{-B}] for binomial B: (rho/b + 1 - rho)^eta.
///
/// Evaluated as the expectation itself; the closed form is pinned against
/// the explicit binomial sum in tests.
pub fn sigma_eta(alliance: &AllianceConfig, b: f64) -> Result<f64> {
    if !(b.is_finite() && b > 0.0) {
        return Err(ModelError::InvalidParameter {
            name: "b",
            value: b,
            requirement: "> 0",
        });
    }
    Ok((alliance.rho / b + (1.0 - alliance.rho)).powi(alliance.eta as i32))
}

/// The assembled decision parameters.
#[derive(Debug, Clone, Serialize)]
pub struct DecisionReport {
    pub method: MethodTag,
    /// Expected exit index (observations until the attacker crosses).
    pub e_nu: f64,
    /// Expected decision moment E[t_{nu-1}] (time units).
    pub e_t_prev: f64,
    pub e_c_nu: f64,
    pub e_c_prev: f64,
    pub e_c_nu_minus_b: f64,
    /// Burst probability with no action (Poisson surrogate).
    pub q0: f64,
    /// Burst probability under the alliance action (Poisson surrogate).
    pub q1_eta: f64,
    /// Safety probability P{C_{nu-1} < N/2}.
    pub p_cminus1: f64,
    /// Attacker generates no blocks: no crossing ever happens.
    pub degenerate_no_attack: bool,
    /// Literal closed-form exit-index transform, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<closed_form::ClosedFormReport>,
}

/// Lattice tail tolerance used by the report pipelines.
pub const DEFAULT_EPS: f64 = 1e-12;

/// Full decision report on the exact route (lattice law wherever the model
/// admits one; burst probabilities from the closed surrogate, which is the
/// only computable analytic form — the simulator provides their event-level
/// counterparts).
pub fn decision_report_exact(scenario: &Scenario) -> Result<DecisionReport> {
    let increment = scenario.increment_law()?;
    let initial = scenario.initial_law()?;
    let m = scenario.threshold();

    if increment.a() == 0.0 && initial.tail(m) < 1.0 {
        return Ok(degenerate_report(scenario, MethodTag::ExactDp));
    }

    let fp = first_passage(&initial, increment, m, DEFAULT_EPS)?;
    let surrogate = PoissonSurrogate::new(
        &scenario.arrival,
        &scenario.observation,
        &scenario.network,
        fp.e_nu(),
    );
    let e_c_nu = fp.e_c_nu();
    Ok(DecisionReport {
        method: MethodTag::ExactDp,
        e_nu: fp.e_nu(),
        e_t_prev: decision_moment_exact(&fp, scenario),
        e_c_nu,
        e_c_prev: fp.e_c_prev(),
        e_c_nu_minus_b: e_c_nu - scenario.alliance.mean_accepted(),
        q0: surrogate.q0(),
        q1_eta: surrogate.q1_eta(&scenario.alliance),
        p_cminus1: p_cminus1_exact(&fp),
        degenerate_no_attack: false,
        closed_form: None,
    })
}

/// Full decision report on the closed-formula route (exit-index mean still
/// from the exact recursion; everything downstream per the closed chain
/// rules and Poisson-tail forms).
pub fn decision_report_paper(scenario: &Scenario) -> Result<DecisionReport> {
    let increment = scenario.increment_law()?;
    let initial = scenario.initial_law()?;
    let m = scenario.threshold();

    if increment.a() == 0.0 && initial.tail(m) < 1.0 {
        return Ok(degenerate_report(scenario, MethodTag::PaperApprox));
    }

    let e_nu = expected_exit_index(&initial, increment, m);
    let surrogate = PoissonSurrogate::new(
        &scenario.arrival,
        &scenario.observation,
        &scenario.network,
        e_nu,
    );
    let marginals = block_marginals(e_nu, initial.mean(), increment.mean(), &scenario.alliance);
    Ok(DecisionReport {
        method: MethodTag::PaperApprox,
        e_nu,
        e_t_prev: decision_moment(e_nu, &scenario.observation).value,
        e_c_nu: marginals.e_c_nu,
        e_c_prev: marginals.e_c_prev,
        e_c_nu_minus_b: marginals.e_c_nu_minus_b,
        q0: surrogate.q0(),
        q1_eta: surrogate.q1_eta(&scenario.alliance),
        p_cminus1: surrogate.p_cminus1(),
        degenerate_no_attack: false,
        closed_form: None,
    })
}

fn degenerate_report(scenario: &Scenario, method: MethodTag) -> DecisionReport {
    // No attacker blocks, no crossing: burst probabilities vanish, the
    // defender is never behind at the (never-arriving) decision moment, and
    // the crossing-conditioned block marginals have no value to report.
    let _ = scenario;
    DecisionReport {
        method,
        e_nu: f64::INFINITY,
        e_t_prev: f64::INFINITY,
        e_c_nu: f64::NAN,
        e_c_prev: f64::NAN,
        e_c_nu_minus_b: f64::NAN,
        q0: 0.0,
        q1_eta: 0.0,
        p_cminus1: 1.0,
        degenerate_no_attack: true,
        closed_form: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::{CountLaw, GeometricLaw};

    fn worked_example_scenario(eta: u64) -> Scenario {
        let arrival = ArrivalModel::new(50.0, 0.0).unwrap();
        let obs = ObservationModel::new(3.0, 1.0).unwrap();
        let network = NetworkParams::new(60_000).unwrap();
        let alliance = AllianceConfig::new(eta, 0.7).unwrap();
        Scenario::new(arrival, obs, network, alliance).unwrap()
    }

    #[test]
    fn decision_moment_formula_cases() {
        let obs = ObservationModel::new(3.0, 1.0).unwrap();
        let dm = decision_moment(1.0, &obs);
        assert_eq!(dm.value, 3.0);
        assert!(!dm.degenerate);
        let dm = decision_moment(598.0, &obs);
        assert!((dm.value - 600.0).abs() < 1e-12);
        let obs2 = ObservationModel::new(0.0, 2.0).unwrap();
        assert!((decision_moment(5.0, &obs2).value - 8.0).abs() < 1e-12);
        assert!(decision_moment(0.3, &obs).degenerate);
    }

    #[test]
    fn block_marginals_chain_rule() {
        let alliance = AllianceConfig::new(0, 0.5).unwrap();
        let m = block_marginals(598.0, 150.0, 50.0, &alliance);
        assert!((m.e_c_nu - 30_000.0).abs() < 1e-9);
        assert!((m.e_c_prev - 29_950.0).abs() < 1e-9);
        assert_eq!(m.e_c_nu, m.e_c_nu_minus_b);

        let alliance = AllianceConfig::new(100, 1.0).unwrap();
        let m = block_marginals(598.0, 150.0, 50.0, &alliance);
        assert!((m.e_c_nu - m.e_c_nu_minus_b - 100.0).abs() < 1e-12);
        // Floors at small E[nu].
        let m = block_marginals(0.5, 10.0, 5.0, &alliance);
        assert_eq!(m.e_c_nu, 10.0);
        assert_eq!(m.e_c_prev, 10.0);
    }

    #[test]
    fn surrogate_q0_degenerate_and_concentrated() {
        let network = NetworkParams::new(20).unwrap();
        let obs = ObservationModel::new(1.0, 1.0).unwrap();
        // lambda_c = 0 -> q0 = 0.
        let arr = ArrivalModel::new(0.0, 0.0).unwrap();
        let s = PoissonSurrogate::new(&arr, &obs, &network, f64::INFINITY);
        assert_eq!(s.q0(), 0.0);
        // Mean 2N, far above N/2 -> q0 ~ 1.
        let s = PoissonSurrogate {
            mean: 2.0 * 40.0,
            threshold: 20,
            node_count: 40,
            lambda_alpha: 1.0,
        };
        assert!(s.q0() > 1.0 - 1e-9);
    }

    #[test]
    fn q1_boundaries_collapse_to_q0() {
        let scenario = worked_example_scenario(0);
        let surrogate = PoissonSurrogate::new(
            &scenario.arrival,
            &scenario.observation,
            &scenario.network,
            598.0,
        );
        let q0 = surrogate.q0();
        let zero_eta = AllianceConfig::new(0, 0.7).unwrap();
        assert!((surrogate.q1_eta(&zero_eta) - q0).abs() < 1e-14);
        let zero_rho = AllianceConfig::new(7000, 0.0).unwrap();
        assert!((surrogate.q1_eta(&zero_rho) - q0).abs() < 1e-14);
        // Active alliance strictly below q0.
        let active = AllianceConfig::new(7000, 0.7).unwrap();
        assert!(surrogate.q1_eta(&active) < q0);
    }

    #[test]
    fn q1_monotone_in_eta_and_rho() {
        let scenario = worked_example_scenario(0);
        let surrogate = PoissonSurrogate::new(
            &scenario.arrival,
            &scenario.observation,
            &scenario.network,
            598.0,
        );
        let mut last = f64::INFINITY;
        for eta in [0u64, 50, 100, 500, 1000, 5000] {
            let q1 = surrogate.q1_eta(&AllianceConfig::new(eta, 0.7).unwrap());
            assert!(q1 <= last + 1e-15, "eta={eta}: {q1} > {last}");
            last = q1;
        }
        let mut last = f64::INFINITY;
        for rho in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let q1 = surrogate.q1_eta(&AllianceConfig::new(5000, rho).unwrap());
            assert!(q1 <= last + 1e-15, "rho={rho}: {q1} > {last}");
            last = q1;
        }
    }

    #[test]
    fn p_cminus1_degenerate_limit() {
        // lambda_c * mean_interval >= N/2 empties the sum.
        let s = PoissonSurrogate {
            mean: 100.0,
            threshold: 10,
            node_count: 20,
            lambda_alpha: 11.0,
        };
        assert_eq!(s.p_cminus1(), 0.0);
    }

    #[test]
    fn sigma_eta_closed_form() {
        let a = AllianceConfig::new(2, 0.7).unwrap();
        assert!((sigma_eta(&a, 2.0).unwrap() - 0.4225).abs() < 1e-12);
        let a = AllianceConfig::new(5, 1.0).unwrap();
        assert!((sigma_eta(&a, 2.0).unwrap() - 2.0_f64.powi(-5)).abs() < 1e-15);
        let a = AllianceConfig::new(9, 0.0).unwrap();
        assert_eq!(sigma_eta(&a, 0.5).unwrap(), 1.0);
        assert!(sigma_eta(&a, 0.0).is_err());
    }

    #[test]
    fn sigma_eta_matches_binomial_sum() {
        for eta in [0u64, 1, 3, 17, 64] {
            for &b in &[0.5, 1.0, 2.0] {
                for &rho in &[0.0, 0.3, 0.7, 1.0] {
                    let alliance = AllianceConfig::new(eta, rho).unwrap();
                    let closed = sigma_eta(&alliance, b).unwrap();
                    let direct: f64 = binomial_pmf_table(eta, rho)
                        .iter()
                        .enumerate()
                        .map(|(j, &p)| p * b.powi(-(j as i32)))
                        .sum();
                    assert!(
                        (closed - direct).abs() <= 1e-12 * direct.abs().max(1.0),
                        "eta={eta} b={b} rho={rho}: closed {closed} vs sum {direct}"
                    );
                }
            }
        }
    }

    #[test]
    fn pmf_c_nu_minus_b_boundaries() {
        let inc = GeometricLaw::from_mean(1.5).unwrap();
        let fp = first_passage(&CountLaw::PointMass(0), inc, 3, 1e-12).unwrap();
        let network = NetworkParams::new(7).unwrap();
        // eta = 0: pmf of C_nu unchanged below the fold bucket, tail folded
        // into the top one.
        let plain = pmf_c_nu_minus_b(&fp, &AllianceConfig::new(0, 0.5).unwrap(), &network);
        let c_pmf = fp.c_nu_pmf();
        for (i, &p) in c_pmf.iter().enumerate() {
            let k = 3 + i;
            if k < 7 {
                assert!((plain[k] - p).abs() < 1e-15);
            }
        }
        let tail: f64 = c_pmf.iter().skip(4).sum();
        assert!((plain[7] - tail).abs() < 1e-12);
        // rho = 1: shifted down by exactly eta.
        let shifted = pmf_c_nu_minus_b(&fp, &AllianceConfig::new(2, 1.0).unwrap(), &network);
        for (i, &p) in c_pmf.iter().enumerate() {
            let k = 3 + i;
            if k - 2 < 7 {
                assert!((shifted[k - 2] - p).abs() < 1e-15);
            }
        }
        // Sums to one.
        let mixed = pmf_c_nu_minus_b(&fp, &AllianceConfig::new(2, 0.5).unwrap(), &network);
        let total: f64 = mixed.iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn exact_report_on_worked_example() {
        let scenario =
            worked_example_scenario(7000).with_attacker_initial(InitialCount::FromInitialEpoch);
        let report = decision_report_exact(&scenario).unwrap();
        assert!((report.e_nu - 598.0).abs() < 1e-6);
        assert!((report.e_c_nu - 30_050.0).abs() < 1e-3);
        assert!(report.e_c_prev <= report.e_c_nu);
        assert!(report.q1_eta <= report.q0 + 1e-12);
        assert!(report.p_cminus1 > 1.0 - 1e-9);
        // Exact decision moment sits below the chain-rule value 600: the
        // crossing epoch is length-biased.
        assert!(report.e_t_prev < 600.0);
        assert!(report.e_t_prev > 590.0);
    }

    #[test]
    fn paper_report_on_worked_example() {
        let scenario = worked_example_scenario(7000);
        let report = decision_report_paper(&scenario).unwrap();
        assert!((report.e_nu - 598.0).abs() < 1e-6);
        assert!((report.e_t_prev - 600.0).abs() < 1e-6);
        assert!((report.e_c_nu - 30_000.0).abs() < 1e-3);
        assert!((report.e_c_prev - 29_950.0).abs() < 1e-3);
        assert!(report.q0 > 0.0 && report.q0 < 1.0);
        assert!(report.q1_eta < report.q0);
        assert!(report.p_cminus1 > 0.0 && report.p_cminus1 < 1.0);
    }

    #[test]
    fn degenerate_attacker_reports_cleanly() {
        let arrival = ArrivalModel::new(0.0, 1.0).unwrap();
        let obs = ObservationModel::new(1.0, 1.0).unwrap();
        let network = NetworkParams::new(20).unwrap();
        let alliance = AllianceConfig::new(3, 0.5).unwrap();
        let scenario = Scenario::new(arrival, obs, network, alliance).unwrap();
        for report in [
            decision_report_exact(&scenario).unwrap(),
            decision_report_paper(&scenario).unwrap(),
        ] {
            assert!(report.degenerate_no_attack);
            assert_eq!(report.q0, 0.0);
            assert_eq!(report.q1_eta, 0.0);
            assert_eq!(report.p_cminus1, 1.0);
            assert!(report.e_nu.is_infinite());
        }
    }
}
