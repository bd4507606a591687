//! Rollout of a per-period decision against the simulated energy buffer.

use serde::{Deserialize, Serialize};

use super::queue::simulate_energy_queue_until;
use crate::eots::EotsDecision;
use crate::error::{Error, Result};
use crate::model::{NetworkConfig, QosSpec, TrafficSnapshot};
use crate::queue::EnergyConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyLedger {
    pub ongrid_energy_j: f64,
    /// Shutdowns plus reactivations.
    pub handover_count: u64,
    pub sc_uptime_fraction: f64,
    pub mean_power_w: f64,
    pub horizon_s: f64,
    pub seed: u64,
}

/// Integrates macro on-grid energy over `horizon_s` while the small cell
/// follows `decision`.
///
/// While the buffer holds energy the macro spends `w_mm + w_msa`; while it is
/// empty it also carries the offloaded users on `w_mso`. Each shutdown and
/// each reactivation costs `C_ho`. Estimates settle once the horizon covers
/// about 10^4 energy arrivals. The buffer starts empty.
pub fn simulate_policy(
    traffic: &TrafficSnapshot,
    energy: &EnergyConfig,
    net: &NetworkConfig,
    qos: &QosSpec,
    decision: &EotsDecision,
    horizon_s: f64,
    seed: u64,
) -> Result<PolicyLedger> {
    traffic.validate()?;
    energy.validate()?;
    net.validate()?;
    qos.validate()?;
    if !(horizon_s > 0.0 && horizon_s.is_finite()) {
        return Err(Error::Precondition(format!("horizon must be positive, got {horizon_s}")));
    }
    let m = &net.macro_bs;
    let per_hz = m.amp_inefficiency * m.tx_power_w / m.bandwidth_hz;
    let op = &decision.operating;
    let p_on = m.static_power_w + per_hz * (op.w_mm_hz + op.w_msa_hz);
    let p_off = p_on + per_hz * op.w_mso_hz;

    let (off_time_s, handover_count) = if !decision.activate_sc {
        (horizon_s, 0)
    } else if energy.arrival_rate_per_s == 0.0 {
        // nothing is ever harvested, so the cell never wakes
        (horizon_s, 0)
    } else {
        let trace = simulate_energy_queue_until(energy.arrival_rate_per_s, decision.mu_e_per_s, horizon_s, seed)?;
        (trace.off_time_s, trace.shutdowns + trace.reactivations)
    };
    let ongrid_energy_j = if decision.activate_sc {
        p_on * (horizon_s - off_time_s) + p_off * off_time_s + energy.handover_cost_j * handover_count as f64
    } else {
        p_off * horizon_s
    };
    Ok(PolicyLedger {
        ongrid_energy_j,
        handover_count,
        sc_uptime_fraction: 1.0 - off_time_s / horizon_s,
        mean_power_w: ongrid_energy_j / horizon_s,
        horizon_s,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eots::{eots_decision, greedy_decision};
    use crate::model::DerivedConstants;
    use crate::power::{ongrid_power_active, ongrid_power_sc_off};

    fn setup() -> (NetworkConfig, QosSpec, TrafficSnapshot) {
        (NetworkConfig::table1(), QosSpec::table1(), TrafficSnapshot::per_km2(5.0, 60.0))
    }

    #[test]
    fn inactive_cell_draws_static_off_power() {
        let (net, qos, traffic) = setup();
        let consts = DerivedConstants::new(&net, &qos).unwrap();
        let energy = EnergyConfig::new(0.0, 1.0, 5.0).unwrap();
        let d = eots_decision(&traffic, &energy, &net, &qos).unwrap();
        assert!(!d.activate_sc);
        let l = simulate_policy(&traffic, &energy, &net, &qos, &d, 3600.0, 1).unwrap();
        let p_off = ongrid_power_sc_off(&traffic, &net, &qos, &consts).unwrap();
        assert_eq!(l.handover_count, 0);
        assert_eq!(l.ongrid_energy_j, p_off * 3600.0);
    }

    #[test]
    fn surplus_energy_keeps_cell_up() {
        let (net, qos, traffic) = setup();
        let energy = EnergyConfig::new(200.0, 1.0, 0.0).unwrap();
        let d = greedy_decision(&traffic, &energy, &net, &qos).unwrap();
        let l = simulate_policy(&traffic, &energy, &net, &qos, &d, 2000.0, 5).unwrap();
        assert!(l.sc_uptime_fraction > 0.999, "{l:?}");
        assert!(l.handover_count <= 2);
        let expected = ongrid_power_active(&d.operating, &net);
        assert!((l.mean_power_w / expected - 1.0).abs() < 1e-3);
    }

    #[test]
    fn stable_rollout_tracks_average_power() {
        let (net, qos, traffic) = setup();
        let energy = EnergyConfig::new(40.0, 1.0, 0.0).unwrap();
        let d = greedy_decision(&traffic, &energy, &net, &qos).unwrap();
        assert!(d.operating.queue.stable);
        let horizon = 1e4 / energy.arrival_rate_per_s * 10.0;
        let l = simulate_policy(&traffic, &energy, &net, &qos, &d, horizon, 8).unwrap();
        let expected = ongrid_power_active(&d.operating, &net);
        assert!((l.mean_power_w / expected - 1.0).abs() < 0.02, "{} vs {expected}", l.mean_power_w);
    }

    #[test]
    fn reproducible() {
        let (net, qos, traffic) = setup();
        let energy = EnergyConfig::new(40.0, 1.0, 1.0).unwrap();
        let d = greedy_decision(&traffic, &energy, &net, &qos).unwrap();
        let a = simulate_policy(&traffic, &energy, &net, &qos, &d, 500.0, 3).unwrap();
        let b = simulate_policy(&traffic, &energy, &net, &qos, &d, 500.0, 3).unwrap();
        assert_eq!(a, b);
    }
}
