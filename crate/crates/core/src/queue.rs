//! M/D/1 analytics for the small cell's harvest-and-consume energy buffer.
//!
//! Energy units of `E` joules arrive as a Poisson process of rate `lambda_E`
//! and the active small cell drains one unit every `1 / mu_E` seconds. The
//! cell sleeps whenever the buffer is empty. The battery is unbounded.

use serde::{Deserialize, Serialize};

use crate::error::{check_non_negative, check_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyConfig {
    pub arrival_rate_per_s: f64,
    pub unit_joules: f64,
    /// Energy of one handover procedure (a shutdown or a reactivation).
    pub handover_cost_j: f64,
}

impl EnergyConfig {
    pub fn new(arrival_rate_per_s: f64, unit_joules: f64, handover_cost_j: f64) -> Result<Self> {
        let cfg = Self { arrival_rate_per_s, unit_joules, handover_cost_j };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_non_negative("energy.lambda_e_per_s", self.arrival_rate_per_s)?;
        check_positive("energy.e_j", self.unit_joules)?;
        check_non_negative("energy.c_ho_j", self.handover_cost_j)
    }

    pub fn with_arrival_rate(self, arrival_rate_per_s: f64) -> Self {
        Self { arrival_rate_per_s, ..self }
    }

    pub fn with_handover_cost(self, handover_cost_j: f64) -> Self {
        Self { handover_cost_j, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueueAnalytics {
    /// `lambda_E / mu_E`.
    pub utilization: f64,
    /// Probability that the buffer is empty and the small cell sleeps.
    pub off_probability: f64,
    /// Probability that exactly one unit is in the buffer.
    pub p_one: f64,
    pub shutdown_rate_per_s: f64,
    pub handover_power_w: f64,
    /// False when harvested energy outpaces consumption.
    pub stable: bool,
}

impl QueueAnalytics {
    /// State reported for a small cell that is switched off for the whole period.
    pub fn inactive() -> Self {
        Self {
            utilization: 0.0,
            off_probability: 1.0,
            p_one: 0.0,
            shutdown_rate_per_s: 0.0,
            handover_power_w: 0.0,
            stable: true,
        }
    }
}

/// `(1 - rho) * (e^rho - 1)`, the M/D/1 probability of exactly one unit.
pub fn md1_p_one(rho: f64) -> f64 {
    (1.0 - rho) * rho.exp_m1()
}

pub fn analyze_queue(energy: &EnergyConfig, service_rate_per_s: f64) -> Result<QueueAnalytics> {
    if !(service_rate_per_s.is_finite() && service_rate_per_s > 0.0) {
        return Err(Error::Domain(format!("service rate must be positive, got {service_rate_per_s}")));
    }
    let rho = energy.arrival_rate_per_s / service_rate_per_s;
    if rho >= 1.0 {
        // energy sufficient: the buffer never drains
        return Ok(QueueAnalytics {
            utilization: rho,
            off_probability: 0.0,
            p_one: 0.0,
            shutdown_rate_per_s: 0.0,
            handover_power_w: 0.0,
            stable: false,
        });
    }
    let p_one = md1_p_one(rho);
    let shutdown_rate_per_s = p_one * service_rate_per_s * (-rho).exp();
    Ok(QueueAnalytics {
        utilization: rho,
        off_probability: 1.0 - rho,
        p_one,
        shutdown_rate_per_s,
        // each cycle pays one shutdown and one reactivation
        handover_power_w: 2.0 * energy.handover_cost_j * shutdown_rate_per_s,
        stable: true,
    })
}
