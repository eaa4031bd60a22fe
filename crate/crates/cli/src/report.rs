//! Run-report structures and rendering (text, JSON, CSV).
//!
//! Every emitted number carries its method tag (exact-dp | paper-approx |
//! mc | experimental). Reports contain no timestamps: a fixed seed and
//! config hash reproduce every byte.

use serde::Serialize;

use alliance_core::decision::{DecisionReport, MethodTag};
use alliance_core::game::OptimizationResult;
use alliance_core::sim::{EstimateSet, Quantity, ValidationReport};

use crate::config::{ReferencePoint, ScenarioConfig};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
    pub mode: String,
    /// True when rates were supplied as calibration products.
    pub calibrated: bool,
}

impl Provenance {
    pub fn of(cfg: &ScenarioConfig) -> Self {
        Self {
            config_hash: cfg.hash(),
            seed: cfg.sim.master_seed,
            tool_version: TOOL_VERSION.to_string(),
            mode: cfg.mode.name().to_string(),
            calibrated: cfg.calibrated,
        }
    }
}

/// A value with its computation-route tag; non-finite values serialize as
/// null.
#[derive(Debug, Clone, Serialize)]
pub struct Tagged {
    pub value: Option<f64>,
    pub method: &'static str,
}

impl Tagged {
    pub fn new(value: f64, method: MethodTag) -> Self {
        Self {
            value: value.is_finite().then_some(value),
            method: method_name(method),
        }
    }
}

pub fn method_name(tag: MethodTag) -> &'static str {
    match tag {
        MethodTag::ExactDp => "exact-dp",
        MethodTag::PaperApprox => "paper-approx",
        MethodTag::Mc => "mc",
        MethodTag::Experimental => "experimental",
    }
}

/// Decision section: quantities individually tagged (burst probabilities
/// come from the closed tail formulas in every mode).
#[derive(Debug, Clone, Serialize)]
pub struct DecisionSection {
    pub e_nu: Tagged,
    pub e_t_prev: Tagged,
    pub e_c_nu: Tagged,
    pub e_c_prev: Tagged,
    pub e_c_nu_minus_b: Tagged,
    pub q0: Tagged,
    pub q1_eta: Tagged,
    pub p_cminus1: Tagged,
    pub degenerate_no_attack: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<alliance_core::decision::closed_form::ClosedFormReport>,
}

impl DecisionSection {
    pub fn of(report: &DecisionReport) -> Self {
        let route = report.method;
        Self {
            e_nu: Tagged::new(report.e_nu, MethodTag::ExactDp),
            e_t_prev: Tagged::new(report.e_t_prev, route),
            e_c_nu: Tagged::new(report.e_c_nu, route),
            e_c_prev: Tagged::new(report.e_c_prev, route),
            e_c_nu_minus_b: Tagged::new(report.e_c_nu_minus_b, route),
            q0: Tagged::new(report.q0, MethodTag::PaperApprox),
            q1_eta: Tagged::new(report.q1_eta, MethodTag::PaperApprox),
            p_cminus1: Tagged::new(report.p_cminus1, route),
            degenerate_no_attack: report.degenerate_no_attack,
            closed_form: report.closed_form.clone(),
        }
    }

    pub fn rows(&self) -> Vec<(&'static str, &Tagged)> {
        vec![
            ("E[nu]", &self.e_nu),
            ("E[t_prev]", &self.e_t_prev),
            ("E[C_nu]", &self.e_c_nu),
            ("E[C_prev]", &self.e_c_prev),
            ("E[C_nu - B]", &self.e_c_nu_minus_b),
            ("q0", &self.q0),
            ("q1_eta", &self.q1_eta),
            ("p_cminus1", &self.p_cminus1),
        ]
    }
}

/// Cost block at the configured alliance size.
#[derive(Debug, Clone, Serialize)]
pub struct CostSection {
    pub eta: u64,
    pub s_noa: Tagged,
    pub s_act: Tagged,
    pub total_cost: Tagged,
}

/// Optimizer block with the optional benchmark comparison.
#[derive(Debug, Clone, Serialize)]
pub struct OptimizationSection {
    pub eta_argmin: u64,
    pub min_total_cost: Tagged,
    pub eta_threshold: Option<u64>,
    pub feasible: bool,
    pub feasibility_bound: Option<f64>,
    pub feasibility_vacuous: bool,
    pub q0: Tagged,
    pub p_cminus1: Tagged,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_comparison: Option<ReferenceComparison>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReferenceComparison {
    pub expected_total_cost: Option<f64>,
    pub expected_eta: Option<u64>,
    pub computed_total_cost: f64,
    pub computed_eta: u64,
    pub cost_ratio: Option<f64>,
}

impl OptimizationSection {
    pub fn of(result: &OptimizationResult, reference: Option<&ReferencePoint>) -> Self {
        let reference_comparison = reference.map(|r| ReferenceComparison {
            expected_total_cost: r.expected_total_cost,
            expected_eta: r.expected_eta,
            computed_total_cost: result.min_total_cost,
            computed_eta: result.eta_argmin,
            cost_ratio: r.expected_total_cost.map(|c| result.min_total_cost / c),
        });
        Self {
            eta_argmin: result.eta_argmin,
            min_total_cost: Tagged::new(result.min_total_cost, MethodTag::PaperApprox),
            eta_threshold: result.eta_threshold,
            feasible: result.feasible,
            feasibility_bound: result
                .feasibility_bound
                .is_finite()
                .then_some(result.feasibility_bound),
            feasibility_vacuous: result.feasibility_vacuous,
            q0: Tagged::new(result.q0, MethodTag::PaperApprox),
            p_cminus1: Tagged::new(result.p_cminus1, MethodTag::PaperApprox),
            reference_comparison,
        }
    }
}

/// Monte Carlo estimates, all tagged `mc`.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationSection {
    pub replications: u64,
    pub quantities: Vec<SimQuantityRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimQuantityRow {
    pub name: &'static str,
    pub mean: Option<f64>,
    pub std_err: Option<f64>,
    pub n: u64,
    pub censored_fraction: f64,
    pub unreliable: bool,
    pub method: &'static str,
}

impl SimulationSection {
    pub fn of(estimates: &EstimateSet, replications: u64) -> Self {
        let quantities = Quantity::ALL
            .iter()
            .map(|q| {
                let e = estimates.get(*q);
                SimQuantityRow {
                    name: q.name(),
                    mean: e.mean.is_finite().then_some(e.mean),
                    std_err: e.std_err.is_finite().then_some(e.std_err),
                    n: e.n,
                    censored_fraction: e.censored_fraction,
                    unreliable: e.unreliable,
                    method: "mc",
                }
            })
            .collect();
        Self {
            replications,
            quantities,
        }
    }
}

/// Top-level run report.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decision: Option<DecisionSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost_at_eta: Option<CostSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimization: Option<OptimizationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationReport>,
}

impl RunReport {
    pub fn new(cfg: &ScenarioConfig) -> Self {
        Self {
            provenance: Provenance::of(cfg),
            decision: None,
            cost_at_eta: None,
            optimization: None,
            simulation: None,
            validation: None,
        }
    }
}

// --- rendering helpers -------------------------------------------------------

/// USD with thousands separators, two decimals.
pub fn usd(x: f64) -> String {
    if !x.is_finite() {
        return "n/a".to_string();
    }
    let negative = x < 0.0;
    let cents = (x.abs() * 100.0).round() as u128;
    let whole = cents / 100;
    let frac = cents % 100;
    let digits = whole.to_string();
    let mut grouped = String::new();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    format!(
        "{}{}.{:02} USD",
        if negative { "-" } else { "" },
        grouped,
        frac
    )
}

pub fn fmt_value(v: &Option<f64>) -> String {
    match v {
        None => "n/a".to_string(),
        Some(x) if !x.is_finite() => "n/a".to_string(),
        Some(x) => {
            if x.abs() >= 1e6 || (x.abs() < 1e-4 && *x != 0.0) {
                format!("{x:.6e}")
            } else {
                format!("{x:.6}")
            }
        }
    }
}

pub fn fmt_z(z: f64) -> String {
    if z.is_nan() {
        "n/a".to_string()
    } else if !z.is_finite() || z >= 1e4 {
        format!("{z:.2e}")
    } else {
        format!("{z:.2}")
    }
}

/// Text rendering of the full report.
pub fn render_text(report: &RunReport) -> String {
    let mut out = String::new();
    let p = &report.provenance;
    out.push_str(&format!(
        "run: mode={} seed={} config={} tool={}\n",
        p.mode, p.seed, p.config_hash, p.tool_version
    ));
    if let Some(d) = &report.decision {
        out.push_str("\ndecision parameters\n");
        for (name, tagged) in d.rows() {
            out.push_str(&format!(
                "  {:<14} {:>16}  [{}]\n",
                name,
                fmt_value(&tagged.value),
                tagged.method
            ));
        }
        if d.degenerate_no_attack {
            out.push_str("  note: attacker rate is zero; no crossing ever occurs\n");
        }
        if let Some(cf) = &d.closed_form {
            out.push_str(&format!(
                "  closed-form E[nu] {} (residual {:.3e}, reliable: {}) [experimental]\n",
                fmt_value(&Some(cf.e_nu_estimate)),
                cf.relative_residual,
                cf.reliable
            ));
            out.push_str(&format!("  closed-form note: {}\n", cf.note));
        }
    }
    if let Some(c) = &report.cost_at_eta {
        out.push_str(&format!("\nstrategy costs at eta = {}\n", c.eta));
        out.push_str(&format!(
            "  S_NoA          {:>16}  [{}]\n",
            c.s_noa.value.map_or("n/a".into(), usd),
            c.s_noa.method
        ));
        out.push_str(&format!(
            "  S_Act          {:>16}  [{}]\n",
            c.s_act.value.map_or("n/a".into(), usd),
            c.s_act.method
        ));
        out.push_str(&format!(
            "  total cost     {:>16}  [{}]\n",
            c.total_cost.value.map_or("n/a".into(), usd),
            c.total_cost.method
        ));
    }
    if let Some(o) = &report.optimization {
        out.push_str("\noptimization\n");
        out.push_str(&format!(
            "  optimal eta (argmin)   {:>10}  min total cost {}  [{}]\n",
            o.eta_argmin,
            o.min_total_cost.value.map_or("n/a".into(), usd),
            o.min_total_cost.method
        ));
        out.push_str(&format!(
            "  threshold rule eta*    {:>10}\n",
            o.eta_threshold
                .map_or("none".to_string(), |e| e.to_string())
        ));
        out.push_str(&format!(
            "  feasibility            bound {} vacuous {} feasible {}\n",
            o.feasibility_bound
                .map_or("n/a".to_string(), |b| format!("{b:.6}")),
            o.feasibility_vacuous,
            o.feasible
        ));
        if let Some(rc) = &o.reference_comparison {
            out.push_str(&format!(
                "  reference comparison   expected {} at eta = {} | computed {} at eta = {}{}\n",
                rc.expected_total_cost.map_or("n/a".into(), usd),
                rc.expected_eta.map_or("n/a".to_string(), |e| e.to_string()),
                usd(rc.computed_total_cost),
                rc.computed_eta,
                rc.cost_ratio
                    .map_or(String::new(), |r| format!(" | cost ratio {r:.3}"))
            ));
        }
    }
    if let Some(s) = &report.simulation {
        out.push_str(&format!(
            "\nsimulation estimates ({} replications)\n",
            s.replications
        ));
        out.push_str(&format!(
            "  {:<14} {:>14} {:>12} {:>10} {:>10} {:>6}\n",
            "quantity", "mean", "std_err", "n", "censored", "method"
        ));
        for q in &s.quantities {
            out.push_str(&format!(
                "  {:<14} {:>14} {:>12} {:>10} {:>9.4}% {:>6}{}\n",
                q.name,
                fmt_value(&q.mean),
                fmt_value(&q.std_err),
                q.n,
                q.censored_fraction * 100.0,
                q.method,
                if q.unreliable { "  UNRELIABLE" } else { "" }
            ));
        }
    }
    if let Some(v) = &report.validation {
        out.push_str(&format!(
            "\nvalidation ({} replications, censored {:.4}%)\n",
            v.replications,
            v.censored_fraction * 100.0
        ));
        out.push_str(&format!(
            "  {:<32} {:<13} {:>14} {:>14} {:>9} {:>6} {}\n",
            "quantity", "method", "analytic", "mc", "z", "gate", "verdict"
        ));
        for row in &v.rows {
            let verdict = match row.pass {
                Some(true) => "pass",
                Some(false) => "FAIL",
                None => "report",
            };
            out.push_str(&format!(
                "  {:<32} {:<13} {:>14} {:>14} {:>9} {:>6} {}\n",
                row.name,
                method_name(row.method),
                fmt_value(&Some(row.analytic)),
                fmt_value(&Some(row.mc_mean)),
                fmt_z(row.z),
                row.gate.map_or("-".to_string(), |g| format!("{g:.0}se")),
                verdict
            ));
        }
        out.push_str(&format!(
            "  exact-route verdict: {}\n",
            if v.exact_pass { "PASS" } else { "FAIL" }
        ));
    }
    out
}

/// Flat CSV rendering: `section,name,value,method` rows.
pub fn render_csv(report: &RunReport) -> String {
    let mut out = String::from("section,name,value,method\n");
    let p = &report.provenance;
    out.push_str(&format!("provenance,config_hash,{},-\n", p.config_hash));
    out.push_str(&format!("provenance,seed,{},-\n", p.seed));
    out.push_str(&format!("provenance,mode,{},-\n", p.mode));
    if let Some(d) = &report.decision {
        for (name, tagged) in d.rows() {
            out.push_str(&format!(
                "decision,{},{},{}\n",
                name,
                tagged.value.map_or("n/a".into(), |v| v.to_string()),
                tagged.method
            ));
        }
    }
    if let Some(c) = &report.cost_at_eta {
        for (name, t) in [
            ("s_noa", &c.s_noa),
            ("s_act", &c.s_act),
            ("total_cost", &c.total_cost),
        ] {
            out.push_str(&format!(
                "cost,{},{},{}\n",
                name,
                t.value.map_or("n/a".into(), |v| v.to_string()),
                t.method
            ));
        }
    }
    if let Some(o) = &report.optimization {
        out.push_str(&format!(
            "optimization,eta_argmin,{},paper-approx\n",
            o.eta_argmin
        ));
        out.push_str(&format!(
            "optimization,min_total_cost,{},paper-approx\n",
            o.min_total_cost
                .value
                .map_or("n/a".into(), |v| v.to_string())
        ));
        out.push_str(&format!(
            "optimization,eta_threshold,{},paper-approx\n",
            o.eta_threshold.map_or("none".into(), |e| e.to_string())
        ));
    }
    if let Some(s) = &report.simulation {
        for q in &s.quantities {
            out.push_str(&format!(
                "simulation,{},{},mc\n",
                q.name,
                q.mean.map_or("n/a".into(), |v| v.to_string())
            ));
            out.push_str(&format!(
                "simulation,{}_std_err,{},mc\n",
                q.name,
                q.std_err.map_or("n/a".into(), |v| v.to_string())
            ));
        }
    }
    if let Some(v) = &report.validation {
        for row in &v.rows {
            out.push_str(&format!(
                "validation,{},z={},{}\n",
                row.name.replace(',', ";"),
                row.z,
                method_name(row.method)
            ));
        }
    }
    out
}
