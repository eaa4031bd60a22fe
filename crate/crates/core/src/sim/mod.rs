//! Event-level Monte Carlo oracle for the full block-race model: both
//! marked Poisson streams, memoryless observation epochs, all five exit
//! indexes and the alliance acceptance draw, with confidence-bounded
//! estimates of every analytic quantity.
//!
//! Replications are independent work units; with the `parallel` feature
//! they fan out over a rayon pool. All reductions run in replication order
//! (and value-sorted where floating-point sums are involved), so estimates
//! are bit-identical across parallelism levels and replication
//! permutations.

pub mod estimate;
pub mod rng;
pub mod validate;

pub use estimate::{estimate, estimate_all, replicate, EstimateSet, Quantity, SimulationEstimate};
pub use rng::{derive_stream, Lane, ReplicationSeed, SplitMix64};
pub use validate::{
    paper_approx_audit, validate, AuditRow, ValidateOptions, ValidationReport, ValidationRow,
};

use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::scenario::{GenuineInitial, InitialCount, Scenario};

/// When the alliance-acceptance subtraction applies to the adjusted exit
/// index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RequestPolicy {
    /// Subtract the accepted members B from the attacker count at every
    /// observation (the printed definition of the adjusted index).
    GlobalSubtraction,
    /// Subtract B only from the decision moment onward; before it the
    /// adjusted index tracks the raw count. Kept as the documented
    /// alternative reading.
    AfterDecisionMoment,
}

/// Monte Carlo run configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub master_seed: u64,
    pub replications: u64,
    /// Observation-count horizon per replication; None derives one from the
    /// model scale.
    pub max_observations: Option<u64>,
    pub request_policy: RequestPolicy,
    /// Worker threads; None uses the rayon default, Some(1) runs inline.
    pub parallelism: Option<usize>,
}

impl SimConfig {
    pub fn new(master_seed: u64, replications: u64) -> Result<Self> {
        if replications < 1 {
            return Err(ModelError::InvalidParameter {
                name: "replications",
                value: replications as f64,
                requirement: ">= 1",
            });
        }
        Ok(Self {
            master_seed,
            replications,
            max_observations: None,
            request_policy: RequestPolicy::GlobalSubtraction,
            parallelism: None,
        })
    }

    pub fn with_horizon(mut self, max_observations: u64) -> Self {
        self.max_observations = Some(max_observations.max(1));
        self
    }

    pub fn with_parallelism(mut self, parallelism: usize) -> Self {
        self.parallelism = Some(parallelism.max(1));
        self
    }

    pub fn with_request_policy(mut self, policy: RequestPolicy) -> Self {
        self.request_policy = policy;
        self
    }
}

/// Default horizon: generous multiple of the expected crossing scale so the
/// censored fraction stays far below the reliability flag.
pub fn auto_horizon(scenario: &Scenario) -> u64 {
    let m = scenario.threshold() as f64;
    let inc_c = scenario.arrival.lambda_c * scenario.observation.mean_interval;
    let inc_g = scenario.arrival.lambda_g * scenario.observation.mean_interval;
    let rate = inc_c.max(inc_g);
    if rate <= 0.0 {
        1000
    } else {
        1000 + (50.0 * m / rate).ceil() as u64
    }
}

/// Everything observed in one replication. Censored indexes (unresolved
/// when the loop exited) are None; every None is strictly larger than any
/// resolved index from the same replication, which keeps order comparisons
/// meaningful.
#[derive(Debug, Clone, Serialize)]
pub struct ReplicationOutcome {
    /// First observation where the raw count reaches max(M - eta, 0).
    pub nu1: Option<u64>,
    /// First observation where the raw count reaches M.
    pub nu: Option<u64>,
    /// First observation where the count minus accepted members reaches M.
    pub nu2: Option<u64>,
    /// First observation where the genuine count plus accepted members
    /// reaches M.
    pub mu1: Option<u64>,
    /// First observation where the genuine count reaches M.
    pub mu: Option<u64>,
    /// C_{nu-1} (C0 itself when nu = 0); None while nu is censored.
    pub c_prev: Option<u64>,
    /// C_nu; None while nu is censored.
    pub c_at_nu: Option<u64>,
    /// Accepted alliance members B for this replication.
    pub b_drawn: u64,
    /// t_{nu-1}, with t_{-1} = 0 on {nu = 0}.
    pub t_prev: Option<f64>,
    pub t_nu: Option<f64>,
    /// Whether nu < nu2 < mu held; None when the horizon left the ordering
    /// undetermined.
    pub confined_win: Option<bool>,
    /// Observation index at which the loop stopped.
    pub resolved_at: u64,
    /// True when any index comparison was left undetermined by the horizon.
    pub censored: bool,
}

/// Order comparison with censored values treated as "beyond the horizon":
/// Some < None always; None vs None is undetermined.
fn lt(a: Option<u64>, b: Option<u64>) -> Option<bool> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x < y),
        (Some(_), None) => Some(true),
        (None, Some(_)) => Some(false),
        (None, None) => None,
    }
}

/// Simulate one replication at event level.
///
/// Draw order is fixed by the reproducibility contract: the alliance lane
/// yields B as eta Bernoulli draws; the event lane yields t0, then C0/G0
/// as configured, then per observation the epoch length U_i, the attacker
/// increment J_i ~ Poisson(lambda_c U_i) and the genuine increment
/// K_i ~ Poisson(lambda_g U_i).
pub fn simulate_once(
    scenario: &Scenario,
    horizon: u64,
    policy: RequestPolicy,
    seed: ReplicationSeed,
) -> ReplicationOutcome {
    let mut alliance_rng = derive_stream(seed, Lane::Alliance);
    let b = alliance_rng.binomial_bernoulli_sum(scenario.alliance.eta, scenario.alliance.rho);

    let mut rng = derive_stream(seed, Lane::EventPath);
    let arr = &scenario.arrival;
    let obs = &scenario.observation;
    let m = scenario.threshold();
    let early_threshold = m.saturating_sub(scenario.alliance.eta);

    let t0 = rng.exponential(obs.mean_initial);
    let c0 = match scenario.attacker_initial {
        InitialCount::FromInitialEpoch => rng.poisson(arr.lambda_c * t0),
        InitialCount::Fixed(c) => c,
    };
    let g0 = match scenario.genuine_initial {
        GenuineInitial::Zero => 0,
        GenuineInitial::MirrorAttacker => rng.poisson(arr.lambda_g * t0),
    };

    let mut c = c0;
    let mut g = g0;
    let mut t = t0;
    let mut t_before = 0.0_f64; // t_{i-1}, with t_{-1} = 0

    let mut nu1: Option<u64> = None;
    let mut nu: Option<u64> = None;
    let mut nu2: Option<u64> = None;
    let mut mu1: Option<u64> = None;
    let mut mu: Option<u64> = None;
    let mut c_prev: Option<u64> = None;
    let mut c_at_nu: Option<u64> = None;
    let mut t_prev: Option<f64> = None;
    let mut t_nu: Option<f64> = None;

    let mut i = 0u64;
    let mut prev_c = c0;
    loop {
        // Resolve indexes at observation i.
        if nu1.is_none() && c >= early_threshold {
            nu1 = Some(i);
        }
        if nu.is_none() && c >= m {
            nu = Some(i);
            c_at_nu = Some(c);
            c_prev = Some(if i == 0 { c0 } else { prev_c });
            t_nu = Some(t);
            t_prev = Some(if i == 0 { 0.0 } else { t_before });
        }
        if nu2.is_none() {
            let adjusted_applies = match policy {
                RequestPolicy::GlobalSubtraction => true,
                // Subtraction starts at the decision moment nu - 1. Before
                // the raw crossing the count is below M either way, so with
                // a single retrospective draw both policies resolve nu2 at
                // the same observation; the variant is kept to make that
                // coincidence checkable.
                RequestPolicy::AfterDecisionMoment => nu.is_some_and(|n| i + 1 >= n),
            };
            let effective = if adjusted_applies {
                c.saturating_sub(b)
            } else {
                c
            };
            if effective >= m {
                nu2 = Some(i);
            }
        }
        if mu1.is_none() && g + b >= m {
            mu1 = Some(i);
        }
        if mu.is_none() && g >= m {
            mu = Some(i);
        }

        // Stop once the confined ordering is fully determined: nu2 resolved
        // and either mu resolved or provably later than nu2.
        if let Some(n2) = nu2 {
            if mu.is_some() || i > n2 {
                break;
            }
        }
        if i >= horizon {
            break;
        }

        // Advance one observation epoch.
        let u = rng.exponential(obs.mean_interval);
        t_before = t;
        t += u;
        prev_c = c;
        c += rng.poisson(arr.lambda_c * u);
        g += rng.poisson(arr.lambda_g * u);
        i += 1;
    }

    let confined_win = match lt(nu, nu2) {
        Some(false) => Some(false),
        first => match (first, lt(nu2, mu)) {
            (Some(true), Some(second)) => Some(second),
            (_, Some(false)) => Some(false),
            _ => None,
        },
    };
    let censored = nu.is_none() || nu2.is_none() || confined_win.is_none();

    ReplicationOutcome {
        nu1,
        nu,
        nu2,
        mu1,
        mu,
        c_prev,
        c_at_nu,
        b_drawn: b,
        t_prev,
        t_nu,
        confined_win,
        resolved_at: i,
        censored,
    }
}
