//! Replication fan-out and confidence-bounded estimates.
//!
//! Every reduction is permutation-proof: per-replication values are
//! collected in replication order and sorted by value before summation, so
//! the same multiset of outcomes produces bit-identical estimates whatever
//! the execution order or thread count.

use serde::Serialize;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::Result;
use crate::scenario::Scenario;
use crate::sim::rng::ReplicationSeed;
use crate::sim::{auto_horizon, simulate_once, ReplicationOutcome, SimConfig};

/// Quantities the simulator estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Mean exit index E\[nu\].
    NuMean,
    /// Mean decision moment E[t_{nu-1}].
    TPrevMean,
    /// Mean crossing count E\[C_nu\].
    CNuMean,
    /// Mean pre-crossing count E[C_{nu-1}].
    CPrevMean,
    /// Attacker-win frequency with no action: nu < mu.
    Q0Freq,
    /// Attacker-win frequency under the action: nu2 < mu.
    Q1Freq,
    /// Frequency of C_{nu-1} < M (the defender can still act).
    PFreq,
    /// Frequency of the confined ordering nu < nu2 < mu.
    ConfinedQ0,
}

impl Quantity {
    pub const ALL: [Quantity; 8] = [
        Quantity::NuMean,
        Quantity::TPrevMean,
        Quantity::CNuMean,
        Quantity::CPrevMean,
        Quantity::Q0Freq,
        Quantity::Q1Freq,
        Quantity::PFreq,
        Quantity::ConfinedQ0,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::NuMean => "nu_mean",
            Quantity::TPrevMean => "t_prev_mean",
            Quantity::CNuMean => "c_nu_mean",
            Quantity::CPrevMean => "c_prev_mean",
            Quantity::Q0Freq => "q0_freq",
            Quantity::Q1Freq => "q1_freq",
            Quantity::PFreq => "p_freq",
            Quantity::ConfinedQ0 => "confined_q0",
        }
    }

    /// Extract this quantity from one replication; None when the horizon
    /// left it undetermined.
    pub fn extract(&self, out: &ReplicationOutcome) -> Option<f64> {
        fn lt(a: Option<u64>, b: Option<u64>) -> Option<f64> {
            match (a, b) {
                (Some(x), Some(y)) => Some(if x < y { 1.0 } else { 0.0 }),
                (Some(_), None) => Some(1.0),
                (None, Some(_)) => Some(0.0),
                (None, None) => None,
            }
        }
        match self {
            Quantity::NuMean => out.nu.map(|x| x as f64),
            Quantity::TPrevMean => out.t_prev,
            Quantity::CNuMean => out.c_at_nu.map(|x| x as f64),
            Quantity::CPrevMean => out.c_prev.map(|x| x as f64),
            Quantity::Q0Freq => lt(out.nu, out.mu),
            Quantity::Q1Freq => lt(out.nu2, out.mu),
            // C_{nu-1} < M iff nu >= 1; a censored nu is beyond any horizon
            // >= 1, so it counts as "still safe at the decision moment".
            Quantity::PFreq => match out.nu {
                Some(0) => Some(0.0),
                _ => Some(1.0),
            },
            Quantity::ConfinedQ0 => out.confined_win.map(|w| if w { 1.0 } else { 0.0 }),
        }
    }
}

/// Point estimate with its standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SimulationEstimate {
    pub mean: f64,
    pub std_err: f64,
    /// Replications that determined the quantity.
    pub n: u64,
    /// Share of replications left undetermined by the horizon.
    pub censored_fraction: f64,
    /// Set when the censored share exceeds 1% (or nothing resolved).
    pub unreliable: bool,
}

impl SimulationEstimate {
    /// Permutation-proof reduction: values are sorted before summing.
    pub fn from_samples(samples: &[Option<f64>]) -> Self {
        let total = samples.len() as f64;
        let mut values: Vec<f64> = samples.iter().filter_map(|v| *v).collect();
        values.sort_by(f64::total_cmp);
        let n = values.len() as u64;
        let censored_fraction = if total > 0.0 {
            (total - n as f64) / total
        } else {
            0.0
        };
        if n == 0 {
            return Self {
                mean: f64::NAN,
                std_err: f64::NAN,
                n: 0,
                censored_fraction,
                unreliable: true,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std_err = if n >= 2 {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (n as f64 - 1.0) / n as f64).sqrt()
        } else {
            f64::NAN
        };
        Self {
            mean,
            std_err,
            n,
            censored_fraction,
            unreliable: censored_fraction > 0.01,
        }
    }
}

fn run_replications<T, F>(config: &SimConfig, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let reps = config.replications;
    #[cfg(feature = "parallel")]
    {
        match config.parallelism {
            Some(1) => (0..reps).map(job).collect(),
            Some(k) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build()
                    .expect("worker pool");
                pool.install(|| (0..reps).into_par_iter().map(job).collect())
            }
            None => (0..reps).into_par_iter().map(job).collect(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..reps).map(job).collect()
    }
}

/// Run all replications, outcomes in replication order.
pub fn replicate(scenario: &Scenario, config: &SimConfig) -> Vec<ReplicationOutcome> {
    let horizon = config
        .max_observations
        .unwrap_or_else(|| auto_horizon(scenario));
    run_replications(config, |rep| {
        simulate_once(
            scenario,
            horizon,
            config.request_policy,
            ReplicationSeed {
                master_seed: config.master_seed,
                replication: rep,
            },
        )
    })
}

/// Estimate one quantity.
///
/// Standard errors assume enough replications for the normal regime;
/// 100 or more is the intended floor.
pub fn estimate(
    quantity: Quantity,
    config: &SimConfig,
    scenario: &Scenario,
) -> Result<SimulationEstimate> {
    let horizon = config
        .max_observations
        .unwrap_or_else(|| auto_horizon(scenario));
    let samples = run_replications(config, |rep| {
        let out = simulate_once(
            scenario,
            horizon,
            config.request_policy,
            ReplicationSeed {
                master_seed: config.master_seed,
                replication: rep,
            },
        );
        quantity.extract(&out)
    });
    Ok(SimulationEstimate::from_samples(&samples))
}

/// All estimated quantities from one replication pass.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateSet {
    pub nu_mean: SimulationEstimate,
    pub t_prev_mean: SimulationEstimate,
    pub c_nu_mean: SimulationEstimate,
    pub c_prev_mean: SimulationEstimate,
    pub q0_freq: SimulationEstimate,
    pub q1_freq: SimulationEstimate,
    pub p_freq: SimulationEstimate,
    pub confined_q0: SimulationEstimate,
}

impl EstimateSet {
    pub fn get(&self, q: Quantity) -> SimulationEstimate {
        match q {
            Quantity::NuMean => self.nu_mean,
            Quantity::TPrevMean => self.t_prev_mean,
            Quantity::CNuMean => self.c_nu_mean,
            Quantity::CPrevMean => self.c_prev_mean,
            Quantity::Q0Freq => self.q0_freq,
            Quantity::Q1Freq => self.q1_freq,
            Quantity::PFreq => self.p_freq,
            Quantity::ConfinedQ0 => self.confined_q0,
        }
    }

    pub fn from_outcomes(outcomes: &[ReplicationOutcome]) -> Self {
        let columns: Vec<[Option<f64>; 8]> = outcomes
            .iter()
            .map(|out| {
                let mut row = [None; 8];
                for (slot, q) in row.iter_mut().zip(Quantity::ALL.iter()) {
                    *slot = q.extract(out);
                }
                row
            })
            .collect();
        let column =
            |idx: usize| -> Vec<Option<f64>> { columns.iter().map(|row| row[idx]).collect() };
        Self {
            nu_mean: SimulationEstimate::from_samples(&column(0)),
            t_prev_mean: SimulationEstimate::from_samples(&column(1)),
            c_nu_mean: SimulationEstimate::from_samples(&column(2)),
            c_prev_mean: SimulationEstimate::from_samples(&column(3)),
            q0_freq: SimulationEstimate::from_samples(&column(4)),
            q1_freq: SimulationEstimate::from_samples(&column(5)),
            p_freq: SimulationEstimate::from_samples(&column(6)),
            confined_q0: SimulationEstimate::from_samples(&column(7)),
        }
    }
}

/// One replication pass, every quantity estimated.
pub fn estimate_all(config: &SimConfig, scenario: &Scenario) -> EstimateSet {
    let outcomes = replicate(scenario, config);
    EstimateSet::from_outcomes(&outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::AllianceConfig;
    use crate::stochastic::{
        first_passage, ArrivalModel, CountLaw, GeometricLaw, NetworkParams, ObservationModel,
    };

    fn toy_scenario() -> Scenario {
        Scenario::new(
            ArrivalModel::new(1.0, 0.0).unwrap(),
            ObservationModel::new(1.0, 1.0).unwrap(),
            NetworkParams::new(2).unwrap(),
            AllianceConfig::new(0, 0.5).unwrap(),
        )
        .unwrap()
        .with_attacker_initial(crate::scenario::InitialCount::Fixed(0))
    }

    #[test]
    fn nu_mean_matches_geometric_first_success() {
        // M = 1, C0 = 0, increment a = 1/2: E[nu] = 2.
        let scenario = toy_scenario();
        let config = SimConfig::new(7, 100_000).unwrap();
        let est = estimate(Quantity::NuMean, &config, &scenario).unwrap();
        assert!(
            (est.mean - 2.0).abs() < 3.0 * est.std_err,
            "mean {} se {}",
            est.mean,
            est.std_err
        );
        assert!(!est.unreliable);
    }

    #[test]
    fn estimates_are_bit_identical_across_parallelism() {
        let scenario = toy_scenario();
        let base = SimConfig::new(3, 20_000).unwrap();
        let seq = estimate_all(&base.with_parallelism(1), &scenario);
        let par = estimate_all(&base.with_parallelism(8), &scenario);
        for q in Quantity::ALL {
            let a = seq.get(q);
            let b = par.get(q);
            assert_eq!(a.mean.to_bits(), b.mean.to_bits(), "{q:?} mean");
            assert_eq!(a.std_err.to_bits(), b.std_err.to_bits(), "{q:?} se");
        }
    }

    #[test]
    fn reduction_is_permutation_invariant() {
        let mut samples: Vec<Option<f64>> = (0..5000)
            .map(|i| {
                if i % 97 == 0 {
                    None
                } else {
                    Some((i as f64 * 0.618).fract() * 3.0)
                }
            })
            .collect();
        let forward = SimulationEstimate::from_samples(&samples);
        samples.reverse();
        samples.rotate_left(1234);
        let shuffled = SimulationEstimate::from_samples(&samples);
        assert_eq!(forward.mean.to_bits(), shuffled.mean.to_bits());
        assert_eq!(forward.std_err.to_bits(), shuffled.std_err.to_bits());
    }

    #[test]
    fn dp_and_simulation_agree_on_a_toy_grid_cell() {
        // M = 3, C0 = 0, increment a = 2/3 (mean 2): E[nu] from the lattice
        // recursion vs one million replications at 3 se.
        let scenario = Scenario::new(
            ArrivalModel::new(2.0, 0.0).unwrap(),
            ObservationModel::new(1.0, 1.0).unwrap(),
            NetworkParams::new(6).unwrap(),
            AllianceConfig::new(0, 0.5).unwrap(),
        )
        .unwrap()
        .with_attacker_initial(crate::scenario::InitialCount::Fixed(0));
        let inc = GeometricLaw::from_mean(2.0).unwrap();
        let fp = first_passage(&CountLaw::PointMass(0), inc, 3, 1e-12).unwrap();
        let config = SimConfig::new(11, 1_000_000).unwrap();
        let est = estimate(Quantity::NuMean, &config, &scenario).unwrap();
        assert!(
            (est.mean - fp.e_nu()).abs() < 3.0 * est.std_err,
            "sim {} vs dp {} (se {})",
            est.mean,
            fp.e_nu(),
            est.std_err
        );
    }

    #[test]
    fn coupled_q1_direction_in_eta() {
        // Common seeds: larger alliances never increase the q1 indicator.
        let mk = |eta| {
            Scenario::new(
                ArrivalModel::new(2.0, 1.8).unwrap(),
                ObservationModel::new(1.0, 1.0).unwrap(),
                NetworkParams::new(40).unwrap(),
                AllianceConfig::new(eta, 0.7).unwrap(),
            )
            .unwrap()
        };
        let config = SimConfig::new(21, 2_000).unwrap();
        let small = replicate(&mk(2), &config);
        let large = replicate(&mk(15), &config);
        for (s, l) in small.iter().zip(&large) {
            let qs = Quantity::Q1Freq.extract(s);
            let ql = Quantity::Q1Freq.extract(l);
            if let (Some(a), Some(b)) = (qs, ql) {
                assert!(b <= a, "coupled q1 increased: {a} -> {b}");
            }
        }
    }

    #[test]
    fn all_censored_flags_unreliable() {
        let scenario = Scenario::new(
            ArrivalModel::new(0.0, 0.0).unwrap(),
            ObservationModel::new(1.0, 1.0).unwrap(),
            NetworkParams::new(10).unwrap(),
            AllianceConfig::new(0, 0.5).unwrap(),
        )
        .unwrap();
        let config = SimConfig::new(1, 200).unwrap().with_horizon(50);
        let est = estimate(Quantity::NuMean, &config, &scenario).unwrap();
        assert!(est.unreliable);
        assert_eq!(est.n, 0);
    }
}
