//! Energy-optimal traffic shaping: pick the small cell's on/off state and
//! energy consumption rate that maximize the on-grid power-saving gain.
//!
//! For `mu_E > lambda_E` write `rho = lambda_E / mu_E`. The closed-form gain is
//!
//! ```text
//! dP(rho) = zeta * lambda_E * E - rho * kappa - 2 * C_ho * lambda_E * (1 - rho) * (1 - e^-rho) / rho
//! ```
//!
//! and its derivative is `-kappa + 2 * lambda_E * C_ho * f(rho)` with
//! `f(rho) = e^-rho * (e^rho - 1 - rho + rho^2) / rho^2`, which decreases
//! from 3/2 at `rho = 0` to `1 - 1/e` at `rho = 1`. The gain is therefore
//! concave in `rho` and its shape is fixed by where `kappa` falls relative
//! to `2 * lambda_E * C_ho * f` over that range.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DerivedConstants, NetworkConfig, QosSpec, TrafficSnapshot};
use crate::power::{max_consumption, total_gain, GainForm, GainReport, OperatingPoint};
use crate::queue::EnergyConfig;

/// Default relative tolerance on the stationarity residual.
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;
/// Guard keeping bisection away from the removable singularity at `rho = 0`.
pub const RHO_GUARD: f64 = 1e-9;
/// Gains at or below this are treated as zero and the small cell stays off.
pub const ZERO_GAIN_W: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeKind {
    /// Harvested energy covers the maximal consumption rate; gain grows linearly with `mu_E`.
    EnergySufficientLinear,
    MonotoneIncreasing,
    /// Gain falls with `mu_E` once `mu_E > lambda_E`.
    MonotoneDecreasing,
    /// Concave in `rho` with an interior stationary point.
    InteriorConcave,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub kind: RegimeKind,
    pub kappa_w: f64,
    /// `kappa` at or above this makes the gain increase with `mu_E`.
    pub increasing_from_w: f64,
    /// `kappa` at or below this makes the gain decrease for `mu_E > lambda_E`.
    pub decreasing_until_w: f64,
}

/// `f(rho) = e^-rho * (e^rho - 1 - rho + rho^2) / rho^2`, evaluated by series
/// so that it stays accurate down to `rho = 0`.
pub fn stationarity_f(rho: f64) -> f64 {
    // (e^rho - 1 - rho) / rho^2 = sum_{k>=2} rho^(k-2) / k!
    let mut term = 0.5;
    let mut sum = 0.0;
    for k in 2..40u32 {
        sum += term;
        term *= rho / f64::from(k + 1);
        if term < 1e-18 * sum {
            break;
        }
    }
    (-rho).exp() * (sum + 1.0)
}

pub fn classify_regime(kappa_w: f64, lambda_e: f64, c_ho: f64) -> Regime {
    // a shutdown and a reactivation are paid per cycle
    let cycle_load = 2.0 * lambda_e * c_ho;
    let increasing_from_w = 1.5 * cycle_load;
    let decreasing_until_w = (1.0 - (-1f64).exp()) * cycle_load;
    let kind = if cycle_load == 0.0 || kappa_w >= increasing_from_w {
        RegimeKind::MonotoneIncreasing
    } else if kappa_w <= decreasing_until_w {
        RegimeKind::MonotoneDecreasing
    } else {
        RegimeKind::InteriorConcave
    };
    Regime { kind, kappa_w, increasing_from_w, decreasing_until_w }
}

/// Bisection for the root of a strictly decreasing function on `[lo, hi]`.
///
/// Stops when `|g(x)| <= abs_tol` or the bracket collapses. If `g` does not
/// change sign the endpoint with the smaller residual is returned.
pub fn bisect_decreasing<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64, abs_tol: f64) -> f64 {
    let (g_lo, g_hi) = (g(lo), g(hi));
    if g_lo <= 0.0 {
        return lo;
    }
    if g_hi >= 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = g(mid);
        if v.abs() <= abs_tol {
            return mid;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Utilization `rho*` where the closed-form gain is stationary.
pub fn solve_optimal_rho(kappa_w: f64, lambda_e: f64, c_ho: f64, tol: f64) -> Result<f64> {
    let regime = classify_regime(kappa_w, lambda_e, c_ho);
    if regime.kind != RegimeKind::InteriorConcave {
        return Err(Error::Precondition(format!(
            "stationary point requires the interior-concave regime, got {:?}",
            regime.kind
        )));
    }
    let cycle_load = 2.0 * lambda_e * c_ho;
    let residual = |rho: f64| cycle_load * stationarity_f(rho) - kappa_w;
    Ok(bisect_decreasing(residual, RHO_GUARD, 1.0 - RHO_GUARD, tol * kappa_w))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibleRange {
    pub mu_min: f64,
    pub mu_max: f64,
}

impl FeasibleRange {
    pub fn clamp(&self, mu: f64) -> f64 {
        mu.clamp(self.mu_min, self.mu_max)
    }
}

/// Consumption rates for which `0 <= w_ss <= W_s` and `phi <= 1`.
pub fn feasible_mu_range(
    energy: &EnergyConfig,
    net: &NetworkConfig,
    qos: &QosSpec,
    consts: &DerivedConstants,
    traffic: &TrafficSnapshot,
) -> FeasibleRange {
    let (mu_max, _) = max_consumption(energy, traffic, net, qos, consts);
    FeasibleRange { mu_min: net.small_cell.static_power_w / energy.unit_joules, mu_max }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EotsDecision {
    pub activate_sc: bool,
    pub mu_e_per_s: f64,
    pub operating: OperatingPoint,
    pub predicted_gain_w: f64,
    /// Best gain among active candidates, whether or not the cell is activated.
    pub active_gain_w: f64,
    pub gain_form: GainForm,
    pub regime: Regime,
}

struct Context {
    consts: DerivedConstants,
    range: FeasibleRange,
    regime: Regime,
}

fn prepare(traffic: &TrafficSnapshot, energy: &EnergyConfig, net: &NetworkConfig, qos: &QosSpec) -> Result<Context> {
    traffic.validate()?;
    energy.validate()?;
    let consts = DerivedConstants::new(net, qos)?;
    // macro capacity does not depend on the offloading split
    OperatingPoint::sc_off(traffic, net, qos, &consts)?;
    let range = feasible_mu_range(energy, net, qos, &consts, traffic);
    let lambda = energy.arrival_rate_per_s;
    let mut regime = classify_regime(consts.kappa_w, lambda, energy.handover_cost_j);
    if lambda >= range.mu_max {
        regime.kind = RegimeKind::EnergySufficientLinear;
    }
    Ok(Context { consts, range, regime })
}

fn closed_gain(
    mu: f64,
    ctx: &Context,
    traffic: &TrafficSnapshot,
    energy: &EnergyConfig,
    net: &NetworkConfig,
    qos: &QosSpec,
) -> Result<GainReport> {
    total_gain(mu, energy, &ctx.consts, traffic, net, qos, GainForm::Closed)
}

/// Candidate rates: both interval ends, the kink at `lambda_E`, and the
/// projected stationary point when one exists.
pub fn candidate_rates(range: &FeasibleRange, regime: &Regime, energy: &EnergyConfig) -> Vec<f64> {
    let lambda = energy.arrival_rate_per_s;
    let mut rates = vec![range.mu_max];
    if regime.kind == RegimeKind::InteriorConcave {
        if let Ok(rho) = solve_optimal_rho(regime.kappa_w, lambda, energy.handover_cost_j, DEFAULT_ROOT_TOL) {
            rates.push(range.clamp(lambda / rho));
        }
    }
    rates.push(range.clamp(lambda));
    rates.push(range.mu_min);
    rates
}

pub fn eots_decision(
    traffic: &TrafficSnapshot,
    energy: &EnergyConfig,
    net: &NetworkConfig,
    qos: &QosSpec,
) -> Result<EotsDecision> {
    let ctx = prepare(traffic, energy, net, qos)?;
    let mut best: Option<(f64, GainReport)> = None;
    for mu in candidate_rates(&ctx.range, &ctx.regime, energy) {
        let g = closed_gain(mu, &ctx, traffic, energy, net, qos)?;
        if best.is_none_or(|(_, b)| g.total_gain_w > b.total_gain_w) {
            best = Some((mu, g));
        }
    }
    let (mu, gain) = best.expect("candidate list is never empty");
    if gain.total_gain_w <= ZERO_GAIN_W {
        let operating = OperatingPoint::sc_off(traffic, net, qos, &ctx.consts)?;
        return Ok(EotsDecision {
            activate_sc: false,
            mu_e_per_s: 0.0,
            operating,
            predicted_gain_w: 0.0,
            active_gain_w: gain.total_gain_w,
            gain_form: GainForm::Closed,
            regime: ctx.regime,
        });
    }
    let operating = OperatingPoint::active(mu, energy, traffic, net, qos, &ctx.consts)?;
    Ok(EotsDecision {
        activate_sc: true,
        mu_e_per_s: mu,
        operating,
        predicted_gain_w: gain.total_gain_w,
        active_gain_w: gain.total_gain_w,
        gain_form: GainForm::Closed,
        regime: ctx.regime,
    })
}

/// Baseline: always active at the maximal feasible consumption rate.
pub fn greedy_decision(
    traffic: &TrafficSnapshot,
    energy: &EnergyConfig,
    net: &NetworkConfig,
    qos: &QosSpec,
) -> Result<EotsDecision> {
    let ctx = prepare(traffic, energy, net, qos)?;
    let mu = ctx.range.mu_max;
    let gain = closed_gain(mu, &ctx, traffic, energy, net, qos)?;
    let operating = OperatingPoint::active(mu, energy, traffic, net, qos, &ctx.consts)?;
    Ok(EotsDecision {
        activate_sc: true,
        mu_e_per_s: mu,
        operating,
        predicted_gain_w: gain.total_gain_w,
        active_gain_w: gain.total_gain_w,
        gain_form: GainForm::Closed,
        regime: ctx.regime,
    })
}
