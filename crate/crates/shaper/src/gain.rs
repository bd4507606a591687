//! Gain as a function of the consumption rate for one scenario.

use std::io::Write;

use serde::Serialize;
use shaper_core::eots::feasible_mu_range;
use shaper_core::power::gain_for;
use shaper_core::{DerivedConstants, GainForm, OperatingPoint};

use crate::config::Scenario;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainRow {
    pub mu_e: f64,
    pub delta_p_closed_w: f64,
    pub delta_p_pipeline_w: f64,
    pub p_off: f64,
    pub p_ho_w: f64,
}

/// Both gain forms at `points` evenly spaced rates over the feasible range.
pub fn gain_table(scenario: &Scenario, points: usize) -> Result<Vec<GainRow>> {
    if points < 2 {
        return Err(CliError::Input(format!("grid needs at least 2 points, got {points}")));
    }
    let Scenario { net, qos, energy, traffic } = scenario;
    let consts = DerivedConstants::new(net, qos)?;
    OperatingPoint::sc_off(traffic, net, qos, &consts)?;
    let range = feasible_mu_range(energy, net, qos, &consts, traffic);
    (0..points)
        .map(|i| {
            let mu = if i + 1 == points {
                range.mu_max
            } else {
                range.mu_min + (range.mu_max - range.mu_min) * i as f64 / (points - 1) as f64
            };
            let op = OperatingPoint::active(mu, energy, traffic, net, qos, &consts)?;
            let closed = gain_for(&op, energy, &consts, traffic, net, qos, GainForm::Closed)?;
            let pipeline = gain_for(&op, energy, &consts, traffic, net, qos, GainForm::Pipeline)?;
            Ok(GainRow {
                mu_e: mu,
                delta_p_closed_w: closed.total_gain_w,
                delta_p_pipeline_w: pipeline.total_gain_w,
                p_off: op.queue.off_probability,
                p_ho_w: op.queue.handover_power_w,
            })
        })
        .collect()
}

pub fn write_gain_csv<W: Write>(out: W, rows: &[GainRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Input(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::io("writing gain table", e))
}
