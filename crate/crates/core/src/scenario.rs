//! Scenario bundle shared by the analytic layers and the simulator.

use serde::Serialize;

use crate::decision::AllianceConfig;
use crate::error::Result;
use crate::stochastic::{
    geometric_law, ArrivalModel, CountLaw, GeometricLaw, NetworkParams, ObservationModel,
};

/// Attacker's initial block count at the first observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum InitialCount {
    /// C0 is the attacker's Poisson count over the (memoryless) initial
    /// epoch, i.e. geometric with mean lambda_c * mean_initial.
    FromInitialEpoch,
    /// C0 pinned to a fixed block count.
    Fixed(u64),
}

/// Genuine player's initial block count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GenuineInitial {
    /// G0 = 0: the defender starts from a clean slate.
    Zero,
    /// G0 mirrors the attacker side: Poisson over the initial epoch at
    /// lambda_g.
    MirrorAttacker,
}

/// Full model instance: rates, observation epochs, network size, alliance
/// parameters and initial conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    pub arrival: ArrivalModel,
    pub observation: ObservationModel,
    pub network: NetworkParams,
    pub alliance: AllianceConfig,
    pub attacker_initial: InitialCount,
    pub genuine_initial: GenuineInitial,
}

impl Scenario {
    pub fn new(
        arrival: ArrivalModel,
        observation: ObservationModel,
        network: NetworkParams,
        alliance: AllianceConfig,
    ) -> Result<Self> {
        alliance.check_against(&network)?;
        Ok(Self {
            arrival,
            observation,
            network,
            alliance,
            attacker_initial: InitialCount::FromInitialEpoch,
            genuine_initial: GenuineInitial::Zero,
        })
    }

    pub fn with_attacker_initial(mut self, initial: InitialCount) -> Self {
        self.attacker_initial = initial;
        self
    }

    pub fn with_genuine_initial(mut self, initial: GenuineInitial) -> Self {
        self.genuine_initial = initial;
        self
    }

    /// Per-observation attacker increment law.
    pub fn increment_law(&self) -> Result<GeometricLaw> {
        geometric_law(self.arrival.lambda_c, self.observation.mean_interval)
    }

    /// Initial attacker count law.
    pub fn initial_law(&self) -> Result<CountLaw> {
        Ok(match self.attacker_initial {
            InitialCount::Fixed(c0) => CountLaw::PointMass(c0),
            InitialCount::FromInitialEpoch => CountLaw::Geometric(geometric_law(
                self.arrival.lambda_c,
                self.observation.mean_initial,
            )?),
        })
    }

    /// Majority threshold M.
    pub fn threshold(&self) -> u64 {
        self.network.threshold
    }
}
