//! Analytic-versus-simulated validation suites.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use shaper_core::eots::classify_regime;
use shaper_core::model::{outage_closed_form, required_bandwidth};
use shaper_core::power::ongrid_power_active;
use shaper_core::sim::{estimate_outage, simulate_energy_queue, simulate_policy, MsuPlacement, OutageRequest};
use shaper_core::{
    analyze_queue, DerivedConstants, EnergyConfig, EotsDecision, GainForm, NetworkConfig, OperatingPoint, QosSpec,
    TrafficSnapshot, UserClass,
};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Outage,
    Queue,
    Rollout,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tolerance {
    Abs,
    Rel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub analytic: f64,
    pub simulated: f64,
    pub tolerance: f64,
    pub tolerance_kind: Tolerance,
    pub pass: bool,
}

impl Check {
    fn new(suite: &'static str, name: String, analytic: f64, simulated: f64, tolerance: f64, kind: Tolerance) -> Self {
        let err = match kind {
            Tolerance::Abs => (simulated - analytic).abs(),
            Tolerance::Rel => ((simulated - analytic) / analytic).abs(),
        };
        Self { suite, name, analytic, simulated, tolerance, tolerance_kind: kind, pass: err <= tolerance }
    }
}

pub const QUEUE_LOADS: [f64; 4] = [0.3, 0.5, 0.7, 0.9];
pub const QUEUE_ARRIVALS: u64 = 1_000_000;
pub const OFFLOAD_FRACTIONS: [f64; 3] = [0.25, 0.5, 1.0];
pub const MSU_DISTANCES_M: [f64; 3] = [400.0, 600.0, 800.0];
pub const MSU_BANDWIDTH_HZ: f64 = 1e6;
pub const OUTAGE_BAND: f64 = 0.02;

/// Empty-buffer probability, one-unit probability and shutdown rate of the
/// event simulation against the closed forms, for a unit service rate.
pub fn queue_checks(load: f64, n_arrivals: u64, seed: u64) -> Result<Vec<Check>> {
    let mu = 1.0;
    let q = analyze_queue(&EnergyConfig::new(load * mu, 1.0, 0.0)?, mu)?;
    let t = simulate_energy_queue(load * mu, mu, n_arrivals, seed)?;
    let tag = |what: &str| format!("{what} rho={load}");
    Ok(vec![
        Check::new("queue", tag("p_off"), q.off_probability, t.empirical_p_off, 0.01, Tolerance::Abs),
        Check::new("queue", tag("p_one"), q.p_one, t.empirical_p_one, 0.01, Tolerance::Abs),
        Check::new(
            "queue",
            tag("shutdown_rate"),
            q.shutdown_rate_per_s,
            t.empirical_shutdown_rate,
            0.05,
            Tolerance::Rel,
        ),
    ])
}

fn outage_setup() -> Result<(NetworkConfig, QosSpec, DerivedConstants)> {
    let net = NetworkConfig::table1();
    let qos = QosSpec::table1();
    let consts = DerivedConstants::new(&net, &qos)?;
    Ok((net, qos, consts))
}

/// SSU outage at the bandwidth that meets the constraint with equality.
pub fn ssu_check(offload: f64, samples: u64, seed: u64) -> Result<Check> {
    let (net, qos, consts) = outage_setup()?;
    let traffic = TrafficSnapshot::per_km2(5.0, 60.0);
    let peers = traffic.expected_peers(UserClass::Ssu, offload, &net);
    let w = required_bandwidth(UserClass::Ssu, peers, &qos, &consts);
    let req = OutageRequest { class: UserClass::Ssu, offload, allocated_bw_hz: w, placement: MsuPlacement::Exact };
    let est = estimate_outage(&req, &net, &qos, &traffic, samples, seed)?;
    Ok(Check::new("outage", format!("ssu phi={offload}"), qos.outage_target, est.estimate, OUTAGE_BAND, Tolerance::Abs))
}

/// Closed-form MSU outage with users at the small-cell site against the
/// simulation with users spread over the small-cell disc.
pub fn msu_check(d_ms_m: f64, samples: u64, seed: u64) -> Result<Check> {
    let (mut net, qos, _) = outage_setup()?;
    net.small_cell.macro_sc_distance_m = d_ms_m;
    let offload = 0.5;
    let traffic = TrafficSnapshot::per_km2(5.0, 60.0);
    let peers = traffic.expected_peers(UserClass::Msu, offload, &net);
    let analytic = outage_closed_form(UserClass::Msu, MSU_BANDWIDTH_HZ, peers, &net, &qos);
    let req = OutageRequest {
        class: UserClass::Msu,
        offload,
        allocated_bw_hz: MSU_BANDWIDTH_HZ,
        placement: MsuPlacement::Exact,
    };
    let est = estimate_outage(&req, &net, &qos, &traffic, samples, seed)?;
    Ok(Check::new("outage", format!("msu d_ms={d_ms_m}"), analytic, est.estimate, OUTAGE_BAND, Tolerance::Abs))
}

/// MMU outage at the equality bandwidth for a dense macro cell.
pub fn mmu_check(samples: u64, seed: u64) -> Result<Check> {
    let (net, qos, consts) = outage_setup()?;
    let traffic = TrafficSnapshot::per_km2(20.0, 60.0);
    let peers = traffic.mmu_mean(&net);
    let w = required_bandwidth(UserClass::Mmu, peers, &qos, &consts);
    let req = OutageRequest { class: UserClass::Mmu, offload: 0.5, allocated_bw_hz: w, placement: MsuPlacement::Exact };
    let est = estimate_outage(&req, &net, &qos, &traffic, samples, seed)?;
    Ok(Check::new("outage", "mmu rho_m=20".into(), qos.outage_target, est.estimate, OUTAGE_BAND, Tolerance::Abs))
}

/// Stable reference instance: half of the small-cell users offloaded, load
/// 0.7, free handovers.
pub fn rollout_instance() -> Result<(TrafficSnapshot, EnergyConfig, NetworkConfig, QosSpec, EotsDecision)> {
    let (net, qos, consts) = outage_setup()?;
    let traffic = TrafficSnapshot::per_km2(5.0, 60.0);
    let sc = &net.small_cell;
    let w = required_bandwidth(UserClass::Ssu, traffic.expected_peers(UserClass::Ssu, 0.5, &net), &qos, &consts);
    let mu = sc.static_power_w + sc.amp_inefficiency * sc.tx_power_w * w / sc.bandwidth_hz;
    let energy = EnergyConfig::new(0.7 * mu, 1.0, 0.0)?;
    let operating = OperatingPoint::active(mu, &energy, &traffic, &net, &qos, &consts)?;
    let decision = EotsDecision {
        activate_sc: true,
        mu_e_per_s: mu,
        operating,
        predicted_gain_w: 0.0,
        active_gain_w: 0.0,
        gain_form: GainForm::Pipeline,
        regime: classify_regime(consts.kappa_w, energy.arrival_rate_per_s, energy.handover_cost_j),
    };
    Ok((traffic, energy, net, qos, decision))
}

/// Rollout mean on-grid power against the analytic average, over a horizon of
/// `10^5` expected energy arrivals.
pub fn rollout_check(seed: u64) -> Result<Check> {
    let (traffic, energy, net, qos, decision) = rollout_instance()?;
    let horizon = 1e5 / energy.arrival_rate_per_s;
    let ledger = simulate_policy(&traffic, &energy, &net, &qos, &decision, horizon, seed)?;
    let analytic = ongrid_power_active(&decision.operating, &net);
    Ok(Check::new("rollout", "mean_power".into(), analytic, ledger.mean_power_w, 0.02, Tolerance::Rel))
}

enum Job {
    Queue(f64),
    Ssu(f64),
    Msu(f64),
    Mmu,
    Rollout,
}

pub fn run_suite(suite: Suite, samples: u64, seed: u64) -> Result<Vec<Check>> {
    let mut jobs = Vec::new();
    if matches!(suite, Suite::Queue | Suite::All) {
        jobs.extend(QUEUE_LOADS.map(Job::Queue));
    }
    if matches!(suite, Suite::Outage | Suite::All) {
        jobs.extend(OFFLOAD_FRACTIONS.map(Job::Ssu));
        jobs.extend(MSU_DISTANCES_M.map(Job::Msu));
        jobs.push(Job::Mmu);
    }
    if matches!(suite, Suite::Rollout | Suite::All) {
        jobs.push(Job::Rollout);
    }
    let groups = jobs
        .par_iter()
        .map(|job| match *job {
            Job::Queue(load) => queue_checks(load, QUEUE_ARRIVALS, seed),
            Job::Ssu(phi) => ssu_check(phi, samples, seed).map(|c| vec![c]),
            Job::Msu(d) => msu_check(d, samples, seed).map(|c| vec![c]),
            Job::Mmu => mmu_check(samples, seed).map(|c| vec![c]),
            Job::Rollout => rollout_check(seed).map(|c| vec![c]),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(groups.into_iter().flatten().collect())
}

pub fn write_checks_csv<W: Write>(out: W, checks: &[Check]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for c in checks {
        w.serialize(c).map_err(|e| CliError::Input(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::io("writing validation table", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_kinds() {
        assert!(Check::new("s", "a".into(), 1.0, 1.04, 0.05, Tolerance::Rel).pass);
        assert!(!Check::new("s", "a".into(), 1.0, 1.06, 0.05, Tolerance::Rel).pass);
        assert!(Check::new("s", "a".into(), 0.05, 0.069, 0.02, Tolerance::Abs).pass);
        assert!(!Check::new("s", "a".into(), 0.05, 0.071, 0.02, Tolerance::Abs).pass);
    }

    #[test]
    fn rollout_instance_offloads_half() {
        let (_, energy, _, _, d) = rollout_instance().unwrap();
        assert!((d.operating.offload_fraction - 0.5).abs() < 1e-9);
        assert!((d.operating.queue.utilization - 0.7).abs() < 1e-12);
        assert_eq!(energy.handover_cost_j, 0.0);
    }

    #[test]
    fn suite_selection() {
        let checks = run_suite(Suite::Outage, 2000, 1).unwrap();
        assert_eq!(checks.len(), 7);
        assert!(checks.iter().all(|c| c.suite == "outage"));
    }
}
