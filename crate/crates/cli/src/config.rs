//! Scenario configuration: a flat `key = value` file with named sections,
//! parsed with line-precise errors, plus the canonical serialization that
//! backs the provenance hash.
//!
//! Either raw rates (`[arrival]` + `[observation]`) or calibration products
//! (`[calibration]`) may be supplied, not both. Products instantiate the
//! canonical form mean_interval = 1, lambda_c = lambda_c_alpha,
//! mean_initial = lambda_c_alpha0 / lambda_c.

use std::collections::BTreeMap;
use std::fmt;

use alliance_core::decision::AllianceConfig;
use alliance_core::game::{CostModel, SweepSpec};
use alliance_core::scenario::{GenuineInitial, InitialCount, Scenario};
use alliance_core::sim::SimConfig;
use alliance_core::stochastic::{ArrivalModel, NetworkParams, ObservationModel};

/// Configuration-level failure with its file position.
#[derive(Debug, Clone)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "config line {line}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: Option<usize>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

/// Computation mode for the analytic sections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Paper,
    Experimental,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "exact" => Some(Mode::Exact),
            "paper" => Some(Mode::Paper),
            "experimental" => Some(Mode::Experimental),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Paper => "paper",
            Mode::Experimental => "experimental",
        }
    }
}

/// Optional benchmark values a scenario may carry for comparison output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferencePoint {
    pub expected_total_cost: Option<f64>,
    pub expected_eta: Option<u64>,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub cost: CostModel,
    pub sim: SimConfig,
    pub mode: Mode,
    pub eta_sweep: Option<SweepSpec>,
    pub reference: Option<ReferencePoint>,
    /// True when rates came from calibration products.
    pub calibrated: bool,
}

#[derive(Default)]
struct RawConfig {
    // (section, key) -> (line, value)
    entries: BTreeMap<(String, String), (usize, String)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut section = String::new();
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| err(Some(line_no), "unterminated section header"))?;
                section = name.trim().to_lowercase();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                err(
                    Some(line_no),
                    format!("expected `key = value`, got `{line}`"),
                )
            })?;
            if section.is_empty() {
                return Err(err(Some(line_no), "key outside any [section]"));
            }
            let key = key.trim().to_lowercase();
            let prior = entries.insert(
                (section.clone(), key.clone()),
                (line_no, value.trim().to_string()),
            );
            if let Some((first_line, _)) = prior {
                return Err(err(
                    Some(line_no),
                    format!(
                        "duplicate key `{key}` in [{section}] (first set on line {first_line})"
                    ),
                ));
            }
        }
        Ok(Self { entries })
    }

    fn get(&self, section: &str, key: &str) -> Option<&(usize, String)> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    fn f64(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.get(section, key) {
            None => Ok(None),
            Some((line, value)) => value.parse::<f64>().map(Some).map_err(|_| {
                err(
                    Some(*line),
                    format!("`{key}` must be a number, got `{value}`"),
                )
            }),
        }
    }

    fn u64(&self, section: &str, key: &str) -> Result<Option<u64>, ConfigError> {
        match self.get(section, key) {
            None => Ok(None),
            Some((line, value)) => value
                .replace('_', "")
                .parse::<u64>()
                .map(Some)
                .map_err(|_| {
                    err(
                        Some(*line),
                        format!("`{key}` must be a nonnegative integer, got `{value}`"),
                    )
                }),
        }
    }

    fn has_section(&self, section: &str) -> bool {
        self.entries.keys().any(|(s, _)| s == section)
    }

    fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        self.get(section, key).map(|(l, _)| *l)
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw = RawConfig::parse(text)?;

        // Reject unknown sections/keys so typos surface as errors.
        const KNOWN: &[(&str, &[&str])] = &[
            ("network", &["n", "threshold"]),
            ("arrival", &["lambda_c", "lambda_g"]),
            ("observation", &["alpha0", "alpha"]),
            ("calibration", &["lambda_c_alpha", "lambda_c_alpha0"]),
            ("alliance", &["eta", "rho"]),
            ("initial", &["c0", "g0"]),
            ("cost", &["v", "c_eta"]),
            (
                "sim",
                &["seed", "replications", "max_observations", "parallelism"],
            ),
            ("modes", &["mode"]),
            ("reference", &["expected_total_cost", "expected_eta"]),
        ];
        for ((section, key), (line, _)) in &raw.entries {
            let known_keys = KNOWN.iter().find(|(s, _)| s == section);
            match known_keys {
                None => return Err(err(Some(*line), format!("unknown section [{section}]"))),
                Some((_, keys)) if !keys.contains(&key.as_str()) => {
                    return Err(err(
                        Some(*line),
                        format!("unknown key `{key}` in [{section}]"),
                    ));
                }
                _ => {}
            }
        }

        let n = raw
            .u64("network", "n")?
            .ok_or_else(|| err(None, "[network] n is required"))?;
        let network = match raw.u64("network", "threshold")? {
            Some(m) => NetworkParams::with_threshold(n, m),
            None => NetworkParams::new(n),
        }
        .map_err(|e| err(raw.line_of("network", "n"), e.to_string()))?;

        // Rates: raw or calibrated, not both.
        let has_calibration = raw.has_section("calibration");
        let has_raw_rates =
            raw.get("arrival", "lambda_c").is_some() || raw.has_section("observation");
        let (arrival, observation, calibrated) = if has_calibration {
            if has_raw_rates {
                let line = raw
                    .line_of("calibration", "lambda_c_alpha")
                    .or_else(|| raw.line_of("calibration", "lambda_c_alpha0"));
                return Err(err(
                    line,
                    "supply either [calibration] products or [arrival]/[observation] rates, not both",
                ));
            }
            let product = raw
                .f64("calibration", "lambda_c_alpha")?
                .ok_or_else(|| err(None, "[calibration] lambda_c_alpha is required"))?;
            let product0 = raw
                .f64("calibration", "lambda_c_alpha0")?
                .ok_or_else(|| err(None, "[calibration] lambda_c_alpha0 is required"))?;
            if product < 0.0 || product0 < 0.0 {
                return Err(err(
                    raw.line_of("calibration", "lambda_c_alpha"),
                    "calibration products must be nonnegative",
                ));
            }
            if product == 0.0 && product0 > 0.0 {
                return Err(err(
                    raw.line_of("calibration", "lambda_c_alpha0"),
                    "lambda_c_alpha0 > 0 requires lambda_c_alpha > 0",
                ));
            }
            let lambda_g = raw.f64("arrival", "lambda_g")?.unwrap_or(0.0);
            let lambda_c = product;
            let mean_initial = if lambda_c > 0.0 {
                product0 / lambda_c
            } else {
                0.0
            };
            (
                ArrivalModel::new(lambda_c, lambda_g)
                    .map_err(|e| err(raw.line_of("arrival", "lambda_g"), e.to_string()))?,
                ObservationModel::new(mean_initial, 1.0).map_err(|e| {
                    err(raw.line_of("calibration", "lambda_c_alpha"), e.to_string())
                })?,
                true,
            )
        } else {
            let lambda_c = raw.f64("arrival", "lambda_c")?.ok_or_else(|| {
                err(
                    None,
                    "[arrival] lambda_c (or a [calibration] section) is required",
                )
            })?;
            let lambda_g = raw.f64("arrival", "lambda_g")?.unwrap_or(0.0);
            let alpha0 = raw
                .f64("observation", "alpha0")?
                .ok_or_else(|| err(None, "[observation] alpha0 is required"))?;
            let alpha = raw
                .f64("observation", "alpha")?
                .ok_or_else(|| err(None, "[observation] alpha is required"))?;
            (
                ArrivalModel::new(lambda_c, lambda_g)
                    .map_err(|e| err(raw.line_of("arrival", "lambda_c"), e.to_string()))?,
                ObservationModel::new(alpha0, alpha)
                    .map_err(|e| err(raw.line_of("observation", "alpha"), e.to_string()))?,
                false,
            )
        };

        let (eta, eta_sweep) = match raw.get("alliance", "eta") {
            None => (0, None),
            Some((line, value)) => {
                if let Some((sweep, _)) = parse_eta_range(value) {
                    let spec = sweep.map_err(|m| err(Some(*line), m))?;
                    (spec.start, Some(spec))
                } else {
                    let eta = value.replace('_', "").parse::<u64>().map_err(|_| {
                        err(
                            Some(*line),
                            format!("`eta` must be an integer or A:B:STEP range, got `{value}`"),
                        )
                    })?;
                    (eta, None)
                }
            }
        };
        let rho = raw.f64("alliance", "rho")?.unwrap_or(0.0);
        let alliance = AllianceConfig::new(eta, rho)
            .map_err(|e| err(raw.line_of("alliance", "rho"), e.to_string()))?;
        alliance
            .check_against(&network)
            .map_err(|e| err(raw.line_of("alliance", "eta"), e.to_string()))?;
        if let Some(spec) = &eta_sweep {
            if spec.end > network.threshold {
                return Err(err(
                    raw.line_of("alliance", "eta"),
                    format!(
                        "sweep end {} exceeds ceil(N/2) = {}",
                        spec.end, network.threshold
                    ),
                ));
            }
        }

        let mut scenario = Scenario::new(arrival, observation, network, alliance)
            .map_err(|e| err(None, e.to_string()))?;
        if let Some((line, value)) = raw.get("initial", "c0") {
            scenario = scenario.with_attacker_initial(match value.as_str() {
                "auto" => InitialCount::FromInitialEpoch,
                other => {
                    InitialCount::Fixed(other.replace('_', "").parse::<u64>().map_err(|_| {
                        err(
                            Some(*line),
                            format!("`c0` must be `auto` or a count, got `{other}`"),
                        )
                    })?)
                }
            });
        }
        if let Some((line, value)) = raw.get("initial", "g0") {
            scenario = scenario.with_genuine_initial(match value.as_str() {
                "zero" => GenuineInitial::Zero,
                "mirror" => GenuineInitial::MirrorAttacker,
                other => {
                    return Err(err(
                        Some(*line),
                        format!("`g0` must be `zero` or `mirror`, got `{other}`"),
                    ))
                }
            });
        }

        let token_value = raw.f64("cost", "v")?.unwrap_or(1_000_000.0);
        let member_cost = raw.f64("cost", "c_eta")?.unwrap_or(0.0);
        let cost = CostModel::new(token_value, member_cost)
            .map_err(|e| err(raw.line_of("cost", "v"), e.to_string()))?;

        let seed = raw.u64("sim", "seed")?.unwrap_or(0);
        let replications = raw.u64("sim", "replications")?.unwrap_or(100_000);
        let mut sim = SimConfig::new(seed, replications)
            .map_err(|e| err(raw.line_of("sim", "replications"), e.to_string()))?;
        if let Some(h) = raw.u64("sim", "max_observations")? {
            sim = sim.with_horizon(h);
        }
        if let Some(p) = raw.u64("sim", "parallelism")? {
            sim = sim.with_parallelism(p as usize);
        }

        let mode = match raw.get("modes", "mode") {
            None => Mode::Exact,
            Some((line, value)) => Mode::parse(value).ok_or_else(|| {
                err(
                    Some(*line),
                    format!("`mode` must be exact | paper | experimental, got `{value}`"),
                )
            })?,
        };

        let reference = if raw.has_section("reference") {
            Some(ReferencePoint {
                expected_total_cost: raw.f64("reference", "expected_total_cost")?,
                expected_eta: raw.u64("reference", "expected_eta")?,
            })
        } else {
            None
        };

        Ok(Self {
            scenario,
            cost,
            sim,
            mode,
            eta_sweep,
            reference,
            calibrated,
        })
    }

    /// Canonical flat rendering: fixed section and key order, shortest
    /// round-trip floats. Re-parsing this text reproduces the config.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        let s = &self.scenario;
        out.push_str("[network]\n");
        out.push_str(&format!("n = {}\n", s.network.node_count));
        out.push_str(&format!("threshold = {}\n", s.network.threshold));
        out.push_str("[arrival]\n");
        out.push_str(&format!("lambda_c = {}\n", s.arrival.lambda_c));
        out.push_str(&format!("lambda_g = {}\n", s.arrival.lambda_g));
        out.push_str("[observation]\n");
        out.push_str(&format!("alpha0 = {}\n", s.observation.mean_initial));
        out.push_str(&format!("alpha = {}\n", s.observation.mean_interval));
        out.push_str("[alliance]\n");
        match &self.eta_sweep {
            Some(spec) => out.push_str(&format!(
                "eta = {}:{}:{}\n",
                spec.start, spec.end, spec.step
            )),
            None => out.push_str(&format!("eta = {}\n", s.alliance.eta)),
        }
        out.push_str(&format!("rho = {}\n", s.alliance.rho));
        out.push_str("[initial]\n");
        match s.attacker_initial {
            InitialCount::FromInitialEpoch => out.push_str("c0 = auto\n"),
            InitialCount::Fixed(c) => out.push_str(&format!("c0 = {c}\n")),
        }
        match s.genuine_initial {
            GenuineInitial::Zero => out.push_str("g0 = zero\n"),
            GenuineInitial::MirrorAttacker => out.push_str("g0 = mirror\n"),
        }
        out.push_str("[cost]\n");
        out.push_str(&format!("v = {}\n", self.cost.token_value));
        out.push_str(&format!("c_eta = {}\n", self.cost.member_cost));
        out.push_str("[sim]\n");
        out.push_str(&format!("seed = {}\n", self.sim.master_seed));
        out.push_str(&format!("replications = {}\n", self.sim.replications));
        if let Some(h) = self.sim.max_observations {
            out.push_str(&format!("max_observations = {h}\n"));
        }
        // Parallelism is an execution knob: results are bit-identical across
        // worker counts, so it stays outside the canonical form and hash.
        out.push_str("[modes]\n");
        out.push_str(&format!("mode = {}\n", self.mode.name()));
        if let Some(reference) = &self.reference {
            out.push_str("[reference]\n");
            if let Some(c) = reference.expected_total_cost {
                out.push_str(&format!("expected_total_cost = {c}\n"));
            }
            if let Some(e) = reference.expected_eta {
                out.push_str(&format!("expected_eta = {e}\n"));
            }
        }
        out
    }

    /// FNV-1a 64 over the canonical text.
    pub fn hash(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in self.canonical_text().bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
        format!("{h:016x}")
    }
}

/// `A:B:STEP` sweep syntax; returns None when the value is not a range.
pub fn parse_eta_range(value: &str) -> Option<(Result<SweepSpec, String>, ())> {
    if !value.contains(':') {
        return None;
    }
    let parts: Vec<&str> = value.split(':').collect();
    if parts.len() != 3 {
        return Some((Err(format!("expected A:B:STEP, got `{value}`")), ()));
    }
    let nums: Result<Vec<u64>, _> = parts
        .iter()
        .map(|p| p.trim().replace('_', "").parse::<u64>())
        .collect();
    match nums {
        Err(_) => Some((
            Err(format!("expected integers in A:B:STEP, got `{value}`")),
            (),
        )),
        Ok(v) => Some((
            SweepSpec::new(v[0], v[1], v[2]).map_err(|e| e.to_string()),
            (),
        )),
    }
}
