//! Per-period evaluation of EOTS against the greedy baseline over a day.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use shaper_core::{eots_decision, greedy_decision, EotsDecision, Error as ModelError};

use crate::config::Scenario;
use crate::error::{CliError, Result};
use crate::profiles::DailyProfiles;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PolicyChoice {
    Eots,
    Greedy,
    Both,
}

impl PolicyChoice {
    fn policies(self) -> &'static [Policy] {
        match self {
            Self::Eots => &[Policy::Eots],
            Self::Greedy => &[Policy::Greedy],
            Self::Both => &[Policy::Eots, Policy::Greedy],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Eots,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PeriodStatus {
    Ok,
    MacroInfeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodRecord {
    pub period: usize,
    pub label: String,
    pub start_s: f64,
    pub duration_s: f64,
    pub c_ho_j: f64,
    pub policy: Policy,
    pub status: PeriodStatus,
    pub activate_sc: bool,
    pub mu_e_per_s: Option<f64>,
    pub phi: Option<f64>,
    pub p_off: Option<f64>,
    pub delta_p_w: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DayAggregate {
    pub c_ho_j: f64,
    pub avg_gain_eots_w: Option<f64>,
    pub avg_gain_greedy_w: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DayReport {
    pub records: Vec<PeriodRecord>,
    pub aggregates: Vec<DayAggregate>,
    /// Periods whose macro cell cannot meet its QoS target.
    pub infeasible_periods: Vec<usize>,
}

impl DayReport {
    pub fn has_infeasible(&self) -> bool {
        !self.infeasible_periods.is_empty()
    }
}

fn record(
    profiles: &DailyProfiles,
    index: usize,
    c_ho_j: f64,
    policy: Policy,
    outcome: std::result::Result<EotsDecision, ModelError>,
) -> Result<PeriodRecord> {
    let p = &profiles.periods[index];
    let mut rec = PeriodRecord {
        period: index,
        label: profiles.labels[index].clone(),
        start_s: p.start_s,
        duration_s: p.duration_s,
        c_ho_j,
        policy,
        status: PeriodStatus::Ok,
        activate_sc: false,
        mu_e_per_s: None,
        phi: None,
        p_off: None,
        delta_p_w: None,
    };
    match outcome {
        Ok(d) => {
            rec.activate_sc = d.activate_sc;
            rec.mu_e_per_s = Some(d.mu_e_per_s);
            rec.phi = Some(d.operating.offload_fraction);
            rec.p_off = Some(d.operating.queue.off_probability);
            rec.delta_p_w = Some(d.predicted_gain_w);
        }
        Err(ModelError::MacroInfeasible { .. }) => rec.status = PeriodStatus::MacroInfeasible,
        Err(e) => return Err(e.into()),
    }
    Ok(rec)
}

/// Evaluates every period for every handover cost. Records are ordered by
/// cost, then period, then policy (EOTS first).
///
/// Averages are weighted by period duration over the feasible periods.
pub fn run_day(
    profiles: &DailyProfiles,
    scenario: &Scenario,
    choice: PolicyChoice,
    c_ho_list: &[f64],
) -> Result<DayReport> {
    if c_ho_list.is_empty() {
        return Err(CliError::Input("at least one handover cost is required".into()));
    }
    for &c in c_ho_list {
        if !(c.is_finite() && c >= 0.0) {
            return Err(CliError::Input(format!("handover cost must be finite and >= 0, got {c}")));
        }
    }
    let policies = choice.policies();
    let jobs: Vec<(f64, usize, Policy)> = c_ho_list
        .iter()
        .flat_map(|&c| (0..profiles.periods.len()).flat_map(move |i| policies.iter().map(move |&pol| (c, i, pol))))
        .collect();

    let records = jobs
        .par_iter()
        .map(|&(c_ho, i, policy)| {
            let p = &profiles.periods[i];
            let energy = scenario.energy.with_arrival_rate(p.lambda_e_per_s).with_handover_cost(c_ho);
            let traffic = p.traffic();
            let outcome = match policy {
                Policy::Eots => eots_decision(&traffic, &energy, &scenario.net, &scenario.qos),
                Policy::Greedy => greedy_decision(&traffic, &energy, &scenario.net, &scenario.qos),
            };
            record(profiles, i, c_ho, policy, outcome)
        })
        .collect::<Result<Vec<_>>>()?;

    let average = |c: f64, pol: Policy| -> Option<f64> {
        if !policies.contains(&pol) {
            return None;
        }
        let (mut num, mut den) = (0.0, 0.0);
        for r in records.iter().filter(|r| r.c_ho_j == c && r.policy == pol) {
            if let Some(g) = r.delta_p_w {
                num += g * r.duration_s;
                den += r.duration_s;
            }
        }
        Some(if den > 0.0 { num / den } else { 0.0 })
    };
    let aggregates = c_ho_list
        .iter()
        .map(|&c| DayAggregate {
            c_ho_j: c,
            avg_gain_eots_w: average(c, Policy::Eots),
            avg_gain_greedy_w: average(c, Policy::Greedy),
        })
        .collect();
    let mut infeasible_periods: Vec<usize> =
        records.iter().filter(|r| r.status == PeriodStatus::MacroInfeasible).map(|r| r.period).collect();
    infeasible_periods.sort_unstable();
    infeasible_periods.dedup();
    Ok(DayReport { records, aggregates, infeasible_periods })
}

pub fn write_day_csv<W: Write>(out: W, report: &DayReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in &report.records {
        w.serialize(r).map_err(|e| CliError::Input(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::io("writing day report", e))
}

#[derive(Serialize)]
struct Summary<'a> {
    periods: usize,
    aggregates: &'a [DayAggregate],
    infeasible_periods: &'a [usize],
}

pub fn summary_json(report: &DayReport, periods: usize) -> String {
    serde_json::to_string_pretty(&Summary {
        periods,
        aggregates: &report.aggregates,
        infeasible_periods: &report.infeasible_periods,
    })
    .expect("summary is serializable")
}
