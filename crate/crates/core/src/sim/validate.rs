//! Cross-validation of the analytic quantities against the event-level
//! simulator, and the audit of the closed Poisson-tail approximations.
//!
//! Gating discipline: quantities with an exact lattice route must sit
//! within 3 standard errors of their event-level estimates — those rows
//! decide the overall verdict. The closed approximations are audited two
//! ways: against an independent Monte Carlo evaluation of their own
//! surrogate model (implementation check, 6 s.e.), and against the
//! event-level truth, where the deviation is tabulated as model error and
//! deliberately not gated — the surrogate changes the distribution, so no
//! replication budget brings the two together.

use serde::Serialize;

use crate::decision::{
    block_marginals, decision_moment, decision_moment_exact, pmf_c_nu_minus_b, MethodTag,
    PoissonSurrogate,
};
use crate::error::Result;
use crate::scenario::Scenario;
use crate::sim::estimate::{EstimateSet, SimulationEstimate};
use crate::sim::rng::{derive_stream, Lane, ReplicationSeed};
use crate::sim::{replicate, SimConfig};
use crate::stochastic::first_passage;

/// One analytic-vs-simulation comparison.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationRow {
    pub name: String,
    pub method: MethodTag,
    pub analytic: f64,
    pub mc_mean: f64,
    pub mc_std_err: f64,
    pub z: f64,
    /// Standard-error multiple this row is judged at; None = report-only.
    pub gate: Option<f64>,
    pub pass: Option<bool>,
}

/// How a row's standard error is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowKind {
    /// Sample standard error of a mean.
    Mean,
    /// One-sample proportion test: the analytic value is the null, so its
    /// binomial variance applies even when the observed frequency is
    /// degenerate (all zeros or all ones).
    Proportion,
}

impl ValidationRow {
    #[allow(clippy::too_many_arguments)]
    fn build(
        name: impl Into<String>,
        method: MethodTag,
        kind: RowKind,
        analytic: f64,
        mean: f64,
        std_err: f64,
        n: u64,
        gate: Option<f64>,
    ) -> Self {
        let se_test = match kind {
            RowKind::Mean => std_err,
            RowKind::Proportion => {
                let null = (analytic.clamp(0.0, 1.0) * (1.0 - analytic.clamp(0.0, 1.0))
                    / n.max(1) as f64)
                    .sqrt();
                if std_err.is_finite() {
                    std_err.max(null)
                } else {
                    null
                }
            }
        };
        let z = z_score(analytic, mean, se_test, n);
        let pass = gate.map(|g| z.is_finite() && z <= g);
        Self {
            name: name.into(),
            method,
            analytic,
            mc_mean: mean,
            mc_std_err: std_err,
            z,
            gate,
            pass,
        }
    }
}

fn z_score(analytic: f64, mean: f64, std_err: f64, n: u64) -> f64 {
    if n == 0 || !mean.is_finite() {
        return f64::NAN;
    }
    let diff = (analytic - mean).abs();
    // Differences at floating-point noise level count as agreement even
    // when the sampled variance is degenerate.
    if diff <= 1e-12 * analytic.abs().max(1.0) {
        0.0
    } else if std_err > 0.0 && std_err.is_finite() {
        diff / std_err
    } else {
        f64::INFINITY
    }
}

/// Validation verdict: per-quantity z-scores with the exact rows gating.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
    /// True when every gated exact-route row passed.
    pub exact_pass: bool,
    pub replications: u64,
    pub censored_fraction: f64,
}

/// Validation options.
#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    /// Inject a deliberately wrong exact value (+10 s.e.) to prove the
    /// harness fails when it should.
    pub perturb_self_test: bool,
    /// How many crossing-count buckets to compare (those with expected
    /// count >= 25).
    pub pmf_head: usize,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            perturb_self_test: false,
            pmf_head: 8,
        }
    }
}

/// Run the simulator and compare every analytic quantity against it.
pub fn validate(
    scenario: &Scenario,
    config: &SimConfig,
    options: &ValidateOptions,
) -> Result<ValidationReport> {
    let outcomes = replicate(scenario, config);
    let estimates = EstimateSet::from_outcomes(&outcomes);
    let mut rows = Vec::new();

    let increment = scenario.increment_law()?;
    let initial = scenario.initial_law()?;
    let m = scenario.threshold();
    let blocked = increment.a() == 0.0 && initial.tail(m) < 1.0;

    if !blocked {
        let fp = first_passage(&initial, increment, m, crate::decision::DEFAULT_EPS)?;
        let e_nu = fp.e_nu();
        let surrogate = PoissonSurrogate::new(
            &scenario.arrival,
            &scenario.observation,
            &scenario.network,
            e_nu,
        );

        // Exact lattice route, gated at 3 s.e.
        let exact_gate = Some(3.0);
        let row =
            |name: &str, kind: RowKind, analytic: f64, est: SimulationEstimate, gate, method| {
                ValidationRow::build(
                    name,
                    method,
                    kind,
                    analytic,
                    est.mean,
                    est.std_err,
                    est.n,
                    gate,
                )
            };
        rows.push(row(
            "E[nu] (lattice)",
            RowKind::Mean,
            e_nu,
            estimates.nu_mean,
            exact_gate,
            MethodTag::ExactDp,
        ));
        if options.perturb_self_test {
            let perturbed = e_nu + 10.0 * estimates.nu_mean.std_err;
            rows.push(row(
                "E[nu] (perturbed self-test)",
                RowKind::Mean,
                perturbed,
                estimates.nu_mean,
                exact_gate,
                MethodTag::ExactDp,
            ));
        }
        rows.push(row(
            "E[t_prev] (lattice)",
            RowKind::Mean,
            decision_moment_exact(&fp, scenario),
            estimates.t_prev_mean,
            exact_gate,
            MethodTag::ExactDp,
        ));
        rows.push(row(
            "E[C_nu] (lattice)",
            RowKind::Mean,
            fp.e_c_nu(),
            estimates.c_nu_mean,
            exact_gate,
            MethodTag::ExactDp,
        ));
        rows.push(row(
            "E[C_prev] (lattice)",
            RowKind::Mean,
            fp.e_c_prev(),
            estimates.c_prev_mean,
            exact_gate,
            MethodTag::ExactDp,
        ));
        rows.push(row(
            "P{C_prev < M} (lattice)",
            RowKind::Proportion,
            fp.p_prev_below_threshold(),
            estimates.p_freq,
            exact_gate,
            MethodTag::ExactDp,
        ));

        // Crossing-count pmf head, proportion test against the lattice
        // values with null-variance standard errors.
        let pmf = fp.c_nu_pmf();
        let resolved: Vec<u64> = outcomes.iter().filter_map(|o| o.c_at_nu).collect();
        let n_resolved = resolved.len() as f64;
        for (k, &p) in pmf.iter().enumerate().take(options.pmf_head) {
            if p * n_resolved < 25.0 || p >= 1.0 {
                continue;
            }
            let count = resolved.iter().filter(|&&c| c == m + k as u64).count();
            let p_hat = count as f64 / n_resolved;
            let se = (p * (1.0 - p) / n_resolved).sqrt();
            rows.push(ValidationRow::build(
                format!("P{{C_nu = {}}} (lattice)", m + k as u64),
                MethodTag::ExactDp,
                RowKind::Proportion,
                p,
                p_hat,
                se,
                resolved.len() as u64,
                exact_gate,
            ));
        }

        // Closed-formula route: report entries at 6 s.e. slack. These are
        // the approximations' deviations from the event-level law; large z
        // here is a property of the formulas, not a build failure, and the
        // exit verdict ignores them.
        let approx_gate = Some(6.0);
        let dm = decision_moment(e_nu, &scenario.observation);
        rows.push(row(
            "E[t_prev] (chain rule)",
            RowKind::Mean,
            dm.value,
            estimates.t_prev_mean,
            approx_gate,
            MethodTag::PaperApprox,
        ));
        let marginals = block_marginals(e_nu, initial.mean(), increment.mean(), &scenario.alliance);
        rows.push(row(
            "E[C_nu] (chain rule)",
            RowKind::Mean,
            marginals.e_c_nu,
            estimates.c_nu_mean,
            approx_gate,
            MethodTag::PaperApprox,
        ));
        rows.push(row(
            "E[C_prev] (chain rule)",
            RowKind::Mean,
            marginals.e_c_prev,
            estimates.c_prev_mean,
            approx_gate,
            MethodTag::PaperApprox,
        ));
        rows.push(row(
            "q0 (Poisson tail)",
            RowKind::Proportion,
            surrogate.q0(),
            estimates.q0_freq,
            approx_gate,
            MethodTag::PaperApprox,
        ));
        rows.push(row(
            "q1_eta (Poisson tail)",
            RowKind::Proportion,
            surrogate.q1_eta(&scenario.alliance),
            estimates.q1_freq,
            approx_gate,
            MethodTag::PaperApprox,
        ));
        rows.push(row(
            "p_cminus1 (Poisson tail)",
            RowKind::Proportion,
            surrogate.p_cminus1(),
            estimates.p_freq,
            approx_gate,
            MethodTag::PaperApprox,
        ));
        // The confined-game frequency answers a different question than the
        // closed q0; both are reported, neither is asserted equal.
        rows.push(row(
            "q0 vs confined-game frequency",
            RowKind::Proportion,
            surrogate.q0(),
            estimates.confined_q0,
            None,
            MethodTag::Mc,
        ));
    }

    let exact_pass = rows
        .iter()
        .filter(|r| r.method == MethodTag::ExactDp)
        .all(|r| r.pass.unwrap_or(true));
    let censored_fraction =
        outcomes.iter().filter(|o| o.censored).count() as f64 / outcomes.len().max(1) as f64;
    Ok(ValidationReport {
        rows,
        exact_pass,
        replications: config.replications,
        censored_fraction,
    })
}

/// One audited approximation.
#[derive(Debug, Clone, Serialize)]
pub struct AuditRow {
    pub quantity: String,
    /// Closed Poisson-tail value (the implementation under audit).
    pub approx: f64,
    /// Independent Monte Carlo over the surrogate model itself.
    pub surrogate_mc: f64,
    pub surrogate_se: f64,
    /// Implementation check: approx vs its own model's simulation.
    pub z_surrogate: f64,
    /// Exact lattice value of the literally-defined quantity.
    pub exact: f64,
    /// Event-level frequency.
    pub event_mc: f64,
    pub event_se: f64,
    /// |approx - event_mc|: the approximation's model error (tabulated,
    /// not gated).
    pub model_deviation: f64,
}

/// Audit the closed q0 / q1 / p formulas.
///
/// The surrogate Monte Carlo draws the count X ~ Poisson(mean) and the
/// acceptance B ~ Binomial(eta, rho) on the auxiliary lane and evaluates
/// the same indicators the formulas integrate, so its z-score checks the
/// numerics; the event-level columns expose how far the surrogate model
/// itself sits from the exact process.
pub fn paper_approx_audit(
    scenario: &Scenario,
    config: &SimConfig,
    estimates: &EstimateSet,
) -> Result<Vec<AuditRow>> {
    let increment = scenario.increment_law()?;
    let initial = scenario.initial_law()?;
    let m = scenario.threshold();
    if increment.a() == 0.0 && initial.tail(m) < 1.0 {
        return Ok(Vec::new());
    }
    let fp = first_passage(&initial, increment, m, crate::decision::DEFAULT_EPS)?;
    let surrogate = PoissonSurrogate::new(
        &scenario.arrival,
        &scenario.observation,
        &scenario.network,
        fp.e_nu(),
    );
    let alliance = &scenario.alliance;
    let p_limit = scenario.network.node_count as f64 / 2.0
        - scenario.arrival.lambda_c * scenario.observation.mean_interval;

    // Surrogate-model Monte Carlo on the auxiliary lane.
    let mut q0_hits = Vec::with_capacity(config.replications as usize);
    let mut q1_hits = Vec::with_capacity(config.replications as usize);
    let mut p_hits = Vec::with_capacity(config.replications as usize);
    for rep in 0..config.replications {
        let mut rng = derive_stream(
            ReplicationSeed {
                master_seed: config.master_seed,
                replication: rep,
            },
            Lane::Auxiliary,
        );
        let x = rng.poisson(surrogate.mean);
        let b = rng.binomial_bernoulli_sum(alliance.eta, alliance.rho);
        q0_hits.push(Some(if x > m { 1.0 } else { 0.0 }));
        q1_hits.push(Some(if x > m + b { 1.0 } else { 0.0 }));
        p_hits.push(Some(if p_limit >= 0.0 && (x as f64) <= p_limit.floor() {
            1.0
        } else {
            0.0
        }));
    }
    let q0_s = SimulationEstimate::from_samples(&q0_hits);
    let q1_s = SimulationEstimate::from_samples(&q1_hits);
    let p_s = SimulationEstimate::from_samples(&p_hits);

    // Exact literal values from the lattice law.
    let q0_exact = 1.0 - fp.truncation_mass();
    let minus_b = pmf_c_nu_minus_b(&fp, alliance, &scenario.network);
    let q1_exact: f64 = minus_b.iter().skip(m as usize).sum();
    let p_exact = fp.p_prev_below_threshold();

    let build =
        |name: &str, approx: f64, s: SimulationEstimate, exact: f64, event: SimulationEstimate| {
            AuditRow {
                quantity: name.into(),
                approx,
                surrogate_mc: s.mean,
                surrogate_se: s.std_err,
                z_surrogate: z_score(approx, s.mean, s.std_err, s.n),
                exact,
                event_mc: event.mean,
                event_se: event.std_err,
                model_deviation: (approx - event.mean).abs(),
            }
        };
    Ok(vec![
        build("q0", surrogate.q0(), q0_s, q0_exact, estimates.q0_freq),
        build(
            "q1_eta",
            surrogate.q1_eta(alliance),
            q1_s,
            q1_exact,
            estimates.q1_freq,
        ),
        build(
            "p_cminus1",
            surrogate.p_cminus1(),
            p_s,
            p_exact,
            estimates.p_freq,
        ),
    ])
}
