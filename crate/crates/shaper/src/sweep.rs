//! Optimal gain as a function of the energy arrival rate.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use shaper_core::eots_decision;

use crate::config::Scenario;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda_e_per_s: f64,
    pub c_ho_j: f64,
    pub activate_sc: bool,
    pub mu_e_per_s: f64,
    /// Gain of the EOTS decision, zero when the small cell stays off.
    pub delta_p_eots_w: f64,
    /// Best gain over active operating points.
    pub delta_p_active_w: f64,
}

/// `n` evenly spaced points over `[0, max]`.
pub fn linear_grid(max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| max * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Rows ordered by handover cost, then arrival rate.
pub fn sweep_gain(scenario: &Scenario, lambda_grid: &[f64], c_ho_list: &[f64]) -> Result<Vec<SweepRow>> {
    if lambda_grid.is_empty() || c_ho_list.is_empty() {
        return Err(CliError::Input("sweep grid and handover cost list must be nonempty".into()));
    }
    let jobs: Vec<(f64, f64)> = c_ho_list.iter().flat_map(|&c| lambda_grid.iter().map(move |&l| (c, l))).collect();
    jobs.par_iter()
        .map(|&(c_ho, lambda)| {
            let energy = scenario.energy.with_arrival_rate(lambda).with_handover_cost(c_ho);
            energy.validate()?;
            let d = eots_decision(&scenario.traffic, &energy, &scenario.net, &scenario.qos)?;
            Ok(SweepRow {
                lambda_e_per_s: lambda,
                c_ho_j: c_ho,
                activate_sc: d.activate_sc,
                mu_e_per_s: d.mu_e_per_s,
                delta_p_eots_w: d.predicted_gain_w,
                delta_p_active_w: d.active_gain_w,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Input(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::io("writing sweep", e))
}

/// Number of local minima after merging runs of equal values; a run at either
/// end counts when its single neighbour is larger.
pub fn count_local_minima(values: &[f64]) -> usize {
    let mut runs: Vec<f64> = Vec::with_capacity(values.len());
    for &v in values {
        if runs.last() != Some(&v) {
            runs.push(v);
        }
    }
    if runs.len() < 2 {
        return 0;
    }
    (0..runs.len())
        .filter(|&i| {
            let left = i == 0 || runs[i - 1] > runs[i];
            let right = i + 1 == runs.len() || runs[i + 1] > runs[i];
            left && right
        })
        .count()
}

pub fn is_nondecreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] >= w[0])
}
