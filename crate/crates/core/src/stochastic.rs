//! Probabilistic primitives of the memoryless block race: arrival/observation
//! models, per-observation geometric increment laws, and the exact
//! first-passage (exit index) dynamic program for the attacker's block count.

use serde::Serialize;
use std::collections::BTreeMap;

use crate::error::{ModelError, Result};

/// Block arrival rates for the two competing players.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArrivalModel {
    /// Attacker (corrupted-block) rate per unit time. Zero is allowed and
    /// produces the degenerate never-crossing regime.
    pub lambda_c: f64,
    /// Genuine-block rate per unit time.
    pub lambda_g: f64,
}

impl ArrivalModel {
    pub fn new(lambda_c: f64, lambda_g: f64) -> Result<Self> {
        if !(lambda_c.is_finite() && lambda_c >= 0.0) {
            return Err(ModelError::InvalidParameter {
                name: "lambda_c",
                value: lambda_c,
                requirement: "finite and >= 0",
            });
        }
        if !(lambda_g.is_finite() && lambda_g >= 0.0) {
            return Err(ModelError::InvalidParameter {
                name: "lambda_g",
                value: lambda_g,
                requirement: "finite and >= 0",
            });
        }
        Ok(Self { lambda_c, lambda_g })
    }
}

/// Observation-epoch means: the race is inspected at epochs t0 < t1 < ...
/// with E\[t0\] = `mean_initial` and E[t_i - t_{i-1}] = `mean_interval`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservationModel {
    pub mean_initial: f64,
    pub mean_interval: f64,
}

impl ObservationModel {
    pub fn new(mean_initial: f64, mean_interval: f64) -> Result<Self> {
        if !(mean_initial.is_finite() && mean_initial >= 0.0) {
            return Err(ModelError::InvalidParameter {
                name: "mean_initial",
                value: mean_initial,
                requirement: "finite and >= 0",
            });
        }
        if !(mean_interval.is_finite() && mean_interval > 0.0) {
            return Err(ModelError::InvalidParameter {
                name: "mean_interval",
                value: mean_interval,
                requirement: "finite and > 0",
            });
        }
        Ok(Self {
            mean_initial,
            mean_interval,
        })
    }
}

/// Network size and the majority threshold.
///
/// The threshold defaults to ceil(N/2): the attacker wins once its block
/// count reaches M, i.e. the event {C >= M}. An explicit override is
/// supported for experiments with other crossing conventions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NetworkParams {
    pub node_count: u64,
    pub threshold: u64,
}

impl NetworkParams {
    pub fn new(node_count: u64) -> Result<Self> {
        if node_count < 2 {
            return Err(ModelError::InvalidParameter {
                name: "node_count",
                value: node_count as f64,
                requirement: ">= 2",
            });
        }
        Ok(Self {
            node_count,
            threshold: node_count.div_ceil(2),
        })
    }

    pub fn with_threshold(node_count: u64, threshold: u64) -> Result<Self> {
        let base = Self::new(node_count)?;
        if threshold < 1 || threshold > node_count {
            return Err(ModelError::InvalidParameter {
                name: "threshold",
                value: threshold as f64,
                requirement: "1 <= M <= N",
            });
        }
        Ok(Self { threshold, ..base })
    }
}

/// Geometric law on {0, 1, 2, ...} with P{X = k} = b * a^k and a + b = 1.
///
/// This is the per-observation block-increment law forced by exponential
/// epochs: a Poisson(rate) count over an Exp(mean) epoch is geometric with
/// a = mean*rate / (1 + mean*rate).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricLaw {
    a: f64,
    b: f64,
}

impl GeometricLaw {
    pub fn new(a: f64) -> Result<Self> {
        if !(a.is_finite() && (0.0..1.0).contains(&a)) {
            return Err(ModelError::InvalidParameter {
                name: "a",
                value: a,
                requirement: "0 <= a < 1",
            });
        }
        Ok(Self { a, b: 1.0 - a })
    }

    /// Law with the given mean: a = mean/(1+mean).
    pub fn from_mean(mean: f64) -> Result<Self> {
        if !(mean.is_finite() && mean >= 0.0) {
            return Err(ModelError::InvalidParameter {
                name: "mean",
                value: mean,
                requirement: "finite and >= 0",
            });
        }
        Self::new(mean / (1.0 + mean))
    }

    /// Continuation parameter a.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Success parameter b = 1 - a.
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn mean(&self) -> f64 {
        self.a / self.b
    }

    /// P{X = k} = b * a^k.
    pub fn pmf(&self, k: u64) -> f64 {
        self.b * self.a.powi(k as i32)
    }

    /// P{X >= k} = a^k.
    pub fn tail(&self, k: u64) -> f64 {
        self.a.powi(k as i32)
    }
}

/// Per-observation increment law for a Poisson stream of `rate` observed
/// over memoryless epochs with mean `mean_epoch`.
pub fn geometric_law(rate: f64, mean_epoch: f64) -> Result<GeometricLaw> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(ModelError::InvalidParameter {
            name: "rate",
            value: rate,
            requirement: "finite and >= 0",
        });
    }
    if !(mean_epoch.is_finite() && mean_epoch >= 0.0) {
        return Err(ModelError::InvalidParameter {
            name: "mean_epoch",
            value: mean_epoch,
            requirement: "finite and >= 0",
        });
    }
    GeometricLaw::from_mean(rate * mean_epoch)
}

/// P{X = k} for a geometric law; thin wrapper kept as a named operation.
pub fn geometric_pmf(law: GeometricLaw, k: u64) -> f64 {
    law.pmf(k)
}

/// Law of the attacker's initial block count C0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CountLaw {
    /// Deterministic initial count.
    PointMass(u64),
    /// Geometric initial count (a Poisson stream observed over the
    /// memoryless initial epoch).
    Geometric(GeometricLaw),
}

impl CountLaw {
    pub fn pmf(&self, k: u64) -> f64 {
        match self {
            CountLaw::PointMass(c) => {
                if *c == k {
                    1.0
                } else {
                    0.0
                }
            }
            CountLaw::Geometric(g) => g.pmf(k),
        }
    }

    /// P{X >= k}.
    pub fn tail(&self, k: u64) -> f64 {
        match self {
            CountLaw::PointMass(c) => {
                if *c >= k {
                    1.0
                } else {
                    0.0
                }
            }
            CountLaw::Geometric(g) => g.tail(k),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            CountLaw::PointMass(c) => *c as f64,
            CountLaw::Geometric(g) => g.mean(),
        }
    }

    /// Partial mean E[X 1{X >= m}], in closed form.
    pub fn partial_mean_above(&self, m: u64) -> f64 {
        match self {
            CountLaw::PointMass(c) => {
                if *c >= m {
                    *c as f64
                } else {
                    0.0
                }
            }
            CountLaw::Geometric(g) => {
                // sum_{k>=m} k b a^k = a^m (m + a/b)
                g.a().powi(m as i32) * (m as f64 + g.mean())
            }
        }
    }
}

/// Exact joint law of (nu, C_{nu-1}, C_nu) for the attacker's threshold
/// crossing, computed by lattice dynamic programming.
///
/// Conventions:
/// - nu = inf{j >= 0 : C_j >= threshold}; nu = 0 iff C0 >= threshold.
/// - For nu = 0 the pre-crossing count is defined as C0 itself, so stored
///   "pre" values >= threshold identify exactly the nu = 0 mass.
/// - For geometric increments the overshoot C_nu - threshold given nu >= 1
///   is geometric with the increment's own parameter, independently of the
///   pre-crossing state; the joint law is stored in that factored form.
/// - Post-crossing counts are reported on threshold..=cap with all mass
///   beyond `cap` folded into the top bucket.
#[derive(Debug, Clone, Serialize)]
pub struct FirstPassageResult {
    threshold: u64,
    cap: u64,
    increment: GeometricLaw,
    initial: CountLaw,
    /// pmf_nu[j] = P{nu = j}, truncated once unabsorbed mass < eps.
    pmf_nu: Vec<f64>,
    /// pre_pmf\[c\] = P{nu >= 1, C_{nu-1} = c} for c < threshold.
    pre_pmf: Vec<f64>,
    /// nu0_pmf[p - threshold] = P{nu = 0, C0 = p} for p in threshold..=cap
    /// (top bucket folded).
    nu0_pmf: Vec<f64>,
    /// Exact E\[nu\] from the backward linear recursion (no truncation).
    e_nu: f64,
    /// Residual unabsorbed probability when iteration stopped.
    truncation_mass: f64,
}

impl FirstPassageResult {
    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn increment(&self) -> GeometricLaw {
        self.increment
    }

    pub fn pmf_nu(&self) -> &[f64] {
        &self.pmf_nu
    }

    pub fn p_nu(&self, j: usize) -> f64 {
        self.pmf_nu.get(j).copied().unwrap_or(0.0)
    }

    /// Exact E\[nu\] (backward recursion, independent of pmf truncation).
    pub fn e_nu(&self) -> f64 {
        self.e_nu
    }

    pub fn truncation_mass(&self) -> f64 {
        self.truncation_mass
    }

    /// P{nu >= 1, C_{nu-1} = c} for c < threshold.
    pub fn pre_pmf(&self) -> &[f64] {
        &self.pre_pmf
    }

    /// P{C_{nu-1} < threshold} = P{nu >= 1} over the captured mass.
    pub fn p_prev_below_threshold(&self) -> f64 {
        self.pre_pmf.iter().sum()
    }

    /// Total absorbed-after-step-0 mass (equals p_prev_below_threshold).
    pub fn absorbed_mass(&self) -> f64 {
        self.p_prev_below_threshold()
    }

    /// pmf of C_nu on threshold..=cap (index 0 <-> threshold; top bucket
    /// folded).
    pub fn c_nu_pmf(&self) -> Vec<f64> {
        let absorbed = self.absorbed_mass();
        let a = self.increment.a();
        let b = self.increment.b();
        let len = (self.cap - self.threshold + 1) as usize;
        let mut pmf = vec![0.0_f64; len];
        for (i, slot) in pmf.iter_mut().enumerate() {
            let over = if i + 1 == len {
                // Fold the geometric tail into the top bucket.
                a.powi(i as i32)
            } else {
                b * a.powi(i as i32)
            };
            *slot = absorbed * over + self.nu0_pmf[i];
        }
        pmf
    }

    /// Exact E\[C_nu\] over the captured mass (analytic overshoot tail, no
    /// cap-fold bias).
    pub fn e_c_nu(&self) -> f64 {
        let absorbed = self.absorbed_mass();
        absorbed * (self.threshold as f64 + self.increment.mean())
            + self.initial.partial_mean_above(self.threshold)
    }

    /// Exact E[C_{nu-1}] over the captured mass, with C_{-1} := C0 on
    /// {nu = 0}.
    pub fn e_c_prev(&self) -> f64 {
        let below: f64 = self
            .pre_pmf
            .iter()
            .enumerate()
            .map(|(c, w)| c as f64 * w)
            .sum();
        below + self.initial.partial_mean_above(self.threshold)
    }

    /// Materialized joint law P{C_{nu-1} = pre, C_nu = post} on the capped
    /// support, nu = 0 mass on the diagonal (pre = post = C0).
    ///
    /// Size is O(threshold * (cap - threshold)); intended for desk-scale
    /// thresholds (tests, identity checks).
    pub fn joint_pre_post(&self) -> BTreeMap<(u64, u64), f64> {
        let mut joint = BTreeMap::new();
        let a = self.increment.a();
        let b = self.increment.b();
        let len = (self.cap - self.threshold + 1) as usize;
        for (c, &w) in self.pre_pmf.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..len {
                let over = if i + 1 == len {
                    a.powi(i as i32)
                } else {
                    b * a.powi(i as i32)
                };
                let p = w * over;
                if p > 0.0 {
                    joint.insert((c as u64, self.threshold + i as u64), p);
                }
            }
        }
        for (i, &p) in self.nu0_pmf.iter().enumerate() {
            if p > 0.0 {
                let v = self.threshold + i as u64;
                *joint.entry((v, v)).or_insert(0.0) += p;
            }
        }
        joint
    }
}

/// Per-step pre-crossing detail: `pre_by_step[j-1]\[c\] = P{nu = j, C_{nu-1} = c}`.
///
/// Recorded only on request; together with the memoryless overshoot law it
/// determines the full triple law
/// P{nu = j, C_{nu-1} = c, C_nu = p} = pre_by_step[j-1]\[c\] * b * a^(p - threshold),
/// equivalently pair * pmf(p - c) / tail(threshold - c).
#[derive(Debug, Clone)]
pub struct FirstPassageDetail {
    pub pre_by_step: Vec<Vec<f64>>,
}

impl FirstPassageDetail {
    /// P{nu = j, C_{nu-1} = c, C_nu = p} for j >= 1, c < M <= p.
    pub fn triple(&self, result: &FirstPassageResult, j: usize, c: u64, p: u64) -> f64 {
        if j == 0 || j > self.pre_by_step.len() {
            return 0.0;
        }
        let m = result.threshold();
        if c >= m || p < m {
            return 0.0;
        }
        let pair = self.pre_by_step[j - 1][c as usize];
        let inc = result.increment();
        // pair = alive * tail(M - c); triple = alive * pmf(p - c).
        pair * inc.b() * inc.a().powi((p - m) as i32)
    }
}

/// Exact E\[nu\] by the backward linear recursion alone (no pmf iteration).
///
/// Returns +inf when the increment law has no upward mass and the initial
/// law puts positive probability below the threshold.
pub fn expected_exit_index(initial: &CountLaw, increment: GeometricLaw, threshold: u64) -> f64 {
    let m = threshold as usize;
    let a = increment.a();
    let b = increment.b();
    if a == 0.0 {
        return if initial.tail(threshold) == 1.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let mut s_next = 0.0_f64;
    let mut e_nu = 0.0_f64;
    let mut t_by_state = vec![0.0_f64; m];
    for c in (0..m).rev() {
        let t = (1.0 + b * s_next) / a;
        t_by_state[c] = t;
        s_next = a * (t + s_next);
    }
    match initial {
        CountLaw::PointMass(c0) => {
            if (*c0 as usize) < m {
                e_nu = t_by_state[*c0 as usize];
            }
        }
        CountLaw::Geometric(g) => {
            for (c, t) in t_by_state.iter().enumerate() {
                e_nu += g.pmf(c as u64) * t;
            }
        }
    }
    e_nu
}

/// Exact first-passage law of the attacker count: initial law `initial`,
/// i.i.d. geometric per-observation increments, absorbing at `threshold`.
///
/// The state recursion runs until unabsorbed mass drops below `eps` (or a
/// generous step cap derived from E\[nu\], with the residual reported as
/// `truncation_mass`). E\[nu\] itself comes from the backward recursion
/// T(c) = (1 + b * sum_{k>=1} a^k T(c+k)) / a with T(c) = 0 for c >= M,
/// which is exact and unaffected by the truncation.
pub fn first_passage(
    initial: &CountLaw,
    increment: GeometricLaw,
    threshold: u64,
    eps: f64,
) -> Result<FirstPassageResult> {
    Ok(first_passage_impl(initial, increment, threshold, eps, 0)?.0)
}

/// As [`first_passage`], additionally recording P{nu = j, C_{nu-1} = c} for
/// j <= max_detail_steps. Memory is O(threshold * max_detail_steps).
pub fn first_passage_with_detail(
    initial: &CountLaw,
    increment: GeometricLaw,
    threshold: u64,
    eps: f64,
    max_detail_steps: usize,
) -> Result<(FirstPassageResult, FirstPassageDetail)> {
    let (result, detail) =
        first_passage_impl(initial, increment, threshold, eps, max_detail_steps)?;
    Ok((
        result,
        FirstPassageDetail {
            pre_by_step: detail,
        },
    ))
}

fn first_passage_impl(
    initial: &CountLaw,
    increment: GeometricLaw,
    threshold: u64,
    eps: f64,
    max_detail_steps: usize,
) -> Result<(FirstPassageResult, Vec<Vec<f64>>)> {
    if threshold < 1 {
        return Err(ModelError::InvalidParameter {
            name: "threshold",
            value: threshold as f64,
            requirement: ">= 1",
        });
    }
    if !(eps > 0.0 && eps <= 1e-6) {
        return Err(ModelError::InvalidParameter {
            name: "eps",
            value: eps,
            requirement: "in (0, 1e-6]",
        });
    }
    let m = threshold as usize;
    let a = increment.a();
    let b = increment.b();
    let p_start_below = 1.0 - initial.tail(threshold);
    if a == 0.0 && p_start_below > 0.0 {
        return Err(ModelError::NonConvergence {
            reason: format!(
                "increment law has zero upward mass (mean 0) and P{{C0 < {threshold}}} = {p_start_below} > 0"
            ),
        });
    }

    // Support cap for post-crossing counts: overshoot decays geometrically.
    let cap = threshold + (64.0 * (increment.mean() + 1.0)).ceil() as u64;

    // E[nu] by the exact backward recursion (blocked case already rejected,
    // so this is finite unless the start is wholly absorbed).
    let e_nu = if a == 0.0 {
        0.0
    } else {
        expected_exit_index(initial, increment, threshold)
    };

    // nu = 0: initial mass at or above the threshold, folded at cap.
    let nu0_len = (cap - threshold + 1) as usize;
    let mut nu0_pmf = vec![0.0_f64; nu0_len];
    match initial {
        CountLaw::PointMass(c0) => {
            if *c0 >= threshold {
                let idx = ((*c0).min(cap) - threshold) as usize;
                nu0_pmf[idx] = 1.0;
            }
        }
        CountLaw::Geometric(g) => {
            for (i, slot) in nu0_pmf.iter_mut().enumerate() {
                let k = threshold + i as u64;
                *slot = if i + 1 == nu0_len {
                    g.tail(k)
                } else {
                    g.pmf(k)
                };
            }
        }
    }
    let p_nu0 = initial.tail(threshold);

    // Alive-state vector over counts 0..M.
    let mut alive = vec![0.0_f64; m];
    match initial {
        CountLaw::PointMass(c0) => {
            if (*c0 as usize) < m {
                alive[*c0 as usize] = 1.0;
            }
        }
        CountLaw::Geometric(g) => {
            for (c, slot) in alive.iter_mut().enumerate() {
                *slot = g.pmf(c as u64);
            }
        }
    }
    let mut alive_mass = p_start_below;

    // P{J >= M - c} = a^(M - c), precomputed per pre-state.
    let tail_pow: Vec<f64> = (0..m).map(|c| a.powi((m - c) as i32)).collect();

    let mut pmf_nu = vec![p_nu0];
    let mut pre_pmf = vec![0.0_f64; m];
    let mut detail: Vec<Vec<f64>> = Vec::new();
    let mut scratch = vec![0.0_f64; m];

    let step_cap = 4096 + (64.0 * e_nu.max(1.0)).ceil() as usize;
    while alive_mass >= eps && pmf_nu.len() <= step_cap {
        // Absorption out of every alive state.
        let mut absorbed_this_step = 0.0_f64;
        for c in 0..m {
            let w = alive[c] * tail_pow[c];
            pre_pmf[c] += w;
            absorbed_this_step += w;
        }
        if detail.len() < max_detail_steps {
            detail.push((0..m).map(|c| alive[c] * tail_pow[c]).collect());
        }
        pmf_nu.push(absorbed_this_step);

        // Surviving transition: new[c'] = b * sum_{c<=c'} alive[c] a^(c'-c),
        // computed by the geometric prefix recurrence.
        let mut s = 0.0_f64;
        for c in 0..m {
            s = a * s + alive[c];
            scratch[c] = b * s;
        }
        std::mem::swap(&mut alive, &mut scratch);
        alive_mass = (alive_mass - absorbed_this_step).max(0.0);
    }

    let result = FirstPassageResult {
        threshold,
        cap,
        increment,
        initial: *initial,
        pmf_nu,
        pre_pmf,
        nu0_pmf,
        e_nu,
        truncation_mass: alive_mass,
    };
    Ok((result, detail))
}
