//! Base-station power accounting and the on-grid power-saving gain.
//!
//! The chain runs from the small cell's energy consumption rate `mu_E` to
//! its utilized bandwidth, the offloading probability that bandwidth can
//! sustain, the bandwidth the macro still has to spend, and finally the
//! macro's average on-grid power with the small cell active or off.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{required_bandwidth, DerivedConstants, NetworkConfig, QosSpec, TrafficSnapshot, UserClass};
use crate::queue::{analyze_queue, EnergyConfig, QueueAnalytics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BsMode {
    Active,
    Sleep,
}

/// Load-proportional power model: `P_0 + (w / W) * beta * P_T` when active, zero asleep.
pub fn bs_power(
    static_w: f64,
    amp_inefficiency: f64,
    tx_power_w: f64,
    utilized_bw_hz: f64,
    total_bw_hz: f64,
    mode: BsMode,
) -> Result<f64> {
    if !(0.0..=total_bw_hz).contains(&utilized_bw_hz) {
        return Err(Error::Domain(format!("utilized bandwidth {utilized_bw_hz} Hz outside [0, {total_bw_hz}] Hz")));
    }
    Ok(match mode {
        BsMode::Active => static_w + utilized_bw_hz / total_bw_hz * amp_inefficiency * tx_power_w,
        BsMode::Sleep => 0.0,
    })
}

/// Small-cell bandwidth whose power draw equals `mu_E * E`.
pub fn sc_bandwidth_from_rate(mu_e_per_s: f64, energy: &EnergyConfig, net: &NetworkConfig) -> Result<f64> {
    let sc = &net.small_cell;
    let supply_w = mu_e_per_s * energy.unit_joules;
    let w_ss = sc.bandwidth_hz * (supply_w - sc.static_power_w) / (sc.amp_inefficiency * sc.tx_power_w);
    if supply_w.is_nan() || supply_w < sc.static_power_w || w_ss > sc.bandwidth_hz * (1.0 + 1e-12) {
        return Err(Error::RateOutOfRange {
            mu_e_per_s,
            min: sc.static_power_w / energy.unit_joules,
            max: sc.full_load_power_w() / energy.unit_joules,
        });
    }
    Ok(w_ss.min(sc.bandwidth_hz))
}

/// Offloading probability supported by `w_ss`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffloadFraction {
    pub raw: f64,
    pub clamped: f64,
}

pub fn offload_fraction(
    w_ss_hz: f64,
    traffic: &TrafficSnapshot,
    net: &NetworkConfig,
    qos: &QosSpec,
    consts: &DerivedConstants,
) -> OffloadFraction {
    let served_users = consts.tau_ssu * w_ss_hz / qos.rate_threshold_bps;
    let sc_users = traffic.sc_user_mean(net);
    if sc_users == 0.0 {
        let phi = if served_users >= 1.0 { 1.0 } else { 0.0 };
        return OffloadFraction { raw: phi, clamped: phi };
    }
    let raw = (served_users - 1.0) / sc_users;
    OffloadFraction { raw, clamped: raw.clamp(0.0, 1.0) }
}

/// Small-cell bandwidth that serves every user in the disc.
pub fn full_offload_bandwidth(
    traffic: &TrafficSnapshot,
    net: &NetworkConfig,
    qos: &QosSpec,
    consts: &DerivedConstants,
) -> f64 {
    required_bandwidth(UserClass::Ssu, traffic.sc_user_mean(net), qos, consts)
}

/// Largest usable small-cell bandwidth and the consumption rate that drives it.
pub fn max_consumption(
    energy: &EnergyConfig,
    traffic: &TrafficSnapshot,
    net: &NetworkConfig,
    qos: &QosSpec,
    consts: &DerivedConstants,
) -> (f64, f64) {
    let sc = &net.small_cell;
    let load = (full_offload_bandwidth(traffic, net, qos, consts) / sc.bandwidth_hz).min(1.0);
    let mu_max = (sc.static_power_w + load * sc.amp_inefficiency * sc.tx_power_w) / energy.unit_joules;
    (mu_max, load * sc.bandwidth_hz)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroBandwidths {
    /// Serves MMUs.
    pub mm_hz: f64,
    /// Serves MSUs that stay on the macro.
    pub msa_hz: f64,
    /// Serves offloaded users while the small cell sleeps.
    pub mso_hz: f64,
}

impl MacroBandwidths {
    /// Bandwidths without the macro capacity check.
    pub fn unchecked(
        offload: f64,
        traffic: &TrafficSnapshot,
        net: &NetworkConfig,
        qos: &QosSpec,
        consts: &DerivedConstants,
    ) -> Self {
        let sc_users = traffic.sc_user_mean(net);
        Self {
            mm_hz: required_bandwidth(UserClass::Mmu, traffic.mmu_mean(net), qos, consts),
            msa_hz: required_bandwidth(UserClass::Msu, (1.0 - offload) * sc_users, qos, consts),
            mso_hz: required_bandwidth(UserClass::Msu, offload * sc_users, qos, consts),
        }
    }

    pub fn total_hz(&self) -> f64 {
        self.mm_hz + self.msa_hz + self.mso_hz
    }
}

/// Macro bandwidths for offloading probability `offload`; errors when the
/// macro cannot carry all three even with the small cell off.
pub fn macro_bandwidths(
    offload: f64,
    traffic: &TrafficSnapshot,
    net: &NetworkConfig,
    qos: &QosSpec,
    consts: &DerivedConstants,
) -> Result<MacroBandwidths> {
    if !(0.0..=1.0).contains(&offload) {
        return Err(Error::Domain(format!("offloading probability {offload} outside [0, 1]")));
    }
    let bw = MacroBandwidths::unchecked(offload, traffic, net, qos, consts);
    let required_hz = bw.total_hz();
    if required_hz > net.macro_bs.bandwidth_hz {
        return Err(Error::MacroInfeasible { required_hz, available_hz: net.macro_bs.bandwidth_hz });
    }
    Ok(bw)
}

/// Complete bandwidth, offloading and queue state for one period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub sc_active: bool,
    pub mu_e_per_s: f64,
    pub w_ss_hz: f64,
    pub offload_fraction: f64,
    pub w_mm_hz: f64,
    pub w_msa_hz: f64,
    pub w_mso_hz: f64,
    pub queue: QueueAnalytics,
}

impl OperatingPoint {
    pub fn sc_off(
        traffic: &TrafficSnapshot,
        net: &NetworkConfig,
        qos: &QosSpec,
        consts: &DerivedConstants,
    ) -> Result<Self> {
        let bw = macro_bandwidths(0.0, traffic, net, qos, consts)?;
        Ok(Self {
            sc_active: false,
            mu_e_per_s: 0.0,
            w_ss_hz: 0.0,
            offload_fraction: 0.0,
            w_mm_hz: bw.mm_hz,
            w_msa_hz: bw.msa_hz,
            w_mso_hz: bw.mso_hz,
            queue: QueueAnalytics::inactive(),
        })
    }

    /// Active small cell draining energy at `mu_e_per_s`.
    ///
    /// The rate must lie in the feasible range `[P_0s / E, mu_max]`. At the
    /// upper end the bandwidth is taken from the range itself, so it equals
    /// `W_s` or the full-offload bandwidth exactly.
    pub fn active(
        mu_e_per_s: f64,
        energy: &EnergyConfig,
        traffic: &TrafficSnapshot,
        net: &NetworkConfig,
        qos: &QosSpec,
        consts: &DerivedConstants,
    ) -> Result<Self> {
        let sc = &net.small_cell;
        let mu_min = sc.static_power_w / energy.unit_joules;
        let (mu_max, w_cap) = max_consumption(energy, traffic, net, qos, consts);
        let out_of_range = Error::RateOutOfRange { mu_e_per_s, min: mu_min, max: mu_max };
        if mu_e_per_s.is_nan() || mu_e_per_s < mu_min || mu_e_per_s > mu_max * (1.0 + 1e-12) {
            return Err(out_of_range);
        }
        let w_full = full_offload_bandwidth(traffic, net, qos, consts);
        let (w_ss_hz, offload) = if mu_e_per_s >= mu_max {
            let phi = offload_fraction(w_cap, traffic, net, qos, consts).clamped;
            (w_cap, if w_cap == w_full { 1.0 } else { phi })
        } else if mu_e_per_s == mu_min {
            (0.0, offload_fraction(0.0, traffic, net, qos, consts).clamped)
        } else {
            let w = sc_bandwidth_from_rate(mu_e_per_s, energy, net)?.min(w_cap);
            let phi = offload_fraction(w, traffic, net, qos, consts);
            if phi.raw > 1.0 {
                // plentiful energy: serve everyone with the minimum bandwidth
                (w_full, 1.0)
            } else {
                (w, phi.clamped)
            }
        };
        let bw = macro_bandwidths(offload, traffic, net, qos, consts)?;
        let queue = analyze_queue(energy, mu_e_per_s)?;
        Ok(Self {
            sc_active: true,
            mu_e_per_s,
            w_ss_hz,
            offload_fraction: offload,
            w_mm_hz: bw.mm_hz,
            w_msa_hz: bw.msa_hz,
            w_mso_hz: bw.mso_hz,
            queue,
        })
    }
}

fn macro_rf_per_hz(net: &NetworkConfig) -> f64 {
    let m = &net.macro_bs;
    m.amp_inefficiency * m.tx_power_w / m.bandwidth_hz
}

/// Average macro on-grid power while the small cell is in use.
pub fn ongrid_power_active(op: &OperatingPoint, net: &NetworkConfig) -> f64 {
    let avg_bw = op.w_mm_hz + op.w_msa_hz + op.queue.off_probability * op.w_mso_hz;
    net.macro_bs.static_power_w + macro_rf_per_hz(net) * avg_bw + op.queue.handover_power_w
}

/// Macro on-grid power with the small cell switched off for the period.
pub fn ongrid_power_sc_off(
    traffic: &TrafficSnapshot,
    net: &NetworkConfig,
    qos: &QosSpec,
    consts: &DerivedConstants,
) -> Result<f64> {
    let bw = macro_bandwidths(0.0, traffic, net, qos, consts)?;
    Ok(net.macro_bs.static_power_w + macro_rf_per_hz(net) * bw.total_hz())
}

/// Closed-form RF power saved at the macro, piecewise in `mu_E` against `lambda_E`.
pub fn rf_gain_closed_form(
    mu_e_per_s: f64,
    energy: &EnergyConfig,
    consts: &DerivedConstants,
    net: &NetworkConfig,
) -> Result<f64> {
    let supply_w = mu_e_per_s * energy.unit_joules;
    if supply_w.is_nan() || supply_w < net.small_cell.static_power_w {
        return Err(Error::RateOutOfRange {
            mu_e_per_s,
            min: net.small_cell.static_power_w / energy.unit_joules,
            max: f64::INFINITY,
        });
    }
    let lambda = energy.arrival_rate_per_s;
    let e = energy.unit_joules;
    Ok(if mu_e_per_s <= lambda {
        consts.zeta_ee * mu_e_per_s * e - consts.kappa_w
    } else {
        consts.zeta_ee * lambda * e - lambda / mu_e_per_s * consts.kappa_w
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GainForm {
    Closed,
    Pipeline,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    pub form: GainForm,
    pub rf_gain_w: f64,
    pub total_gain_w: f64,
    /// Macro power with the small cell active; implied by the gain for the closed form.
    pub p_active_w: f64,
    pub p_off_w: f64,
    pub handover_power_w: f64,
}

/// On-grid power-saving gain `rf_gain - P_ho` of running the small cell at `mu_e_per_s`.
pub fn total_gain(
    mu_e_per_s: f64,
    energy: &EnergyConfig,
    consts: &DerivedConstants,
    traffic: &TrafficSnapshot,
    net: &NetworkConfig,
    qos: &QosSpec,
    form: GainForm,
) -> Result<GainReport> {
    let op = OperatingPoint::active(mu_e_per_s, energy, traffic, net, qos, consts)?;
    gain_for(&op, energy, consts, traffic, net, qos, form)
}

/// Gain of an already built active operating point.
pub fn gain_for(
    op: &OperatingPoint,
    energy: &EnergyConfig,
    consts: &DerivedConstants,
    traffic: &TrafficSnapshot,
    net: &NetworkConfig,
    qos: &QosSpec,
    form: GainForm,
) -> Result<GainReport> {
    let p_off_w = ongrid_power_sc_off(traffic, net, qos, consts)?;
    let p_ho = op.queue.handover_power_w;
    if !op.sc_active {
        return Ok(GainReport {
            form,
            rf_gain_w: 0.0,
            total_gain_w: 0.0,
            p_active_w: p_off_w,
            p_off_w,
            handover_power_w: 0.0,
        });
    }
    if traffic.sc_density == 0.0 {
        // nothing to offload, only handovers remain
        return Ok(GainReport {
            form,
            rf_gain_w: 0.0,
            total_gain_w: -p_ho,
            p_active_w: p_off_w + p_ho,
            p_off_w,
            handover_power_w: p_ho,
        });
    }
    Ok(match form {
        GainForm::Closed => {
            let rf = rf_gain_closed_form(op.mu_e_per_s, energy, consts, net)?;
            let total = rf - p_ho;
            GainReport {
                form,
                rf_gain_w: rf,
                total_gain_w: total,
                p_active_w: p_off_w - total,
                p_off_w,
                handover_power_w: p_ho,
            }
        }
        GainForm::Pipeline => {
            let p_active_w = ongrid_power_active(op, net);
            let total = p_off_w - p_active_w;
            GainReport {
                form,
                rf_gain_w: total + p_ho,
                total_gain_w: total,
                p_active_w,
                p_off_w,
                handover_power_w: p_ho,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PER_KM2;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn setup() -> (NetworkConfig, QosSpec, DerivedConstants) {
        let net = NetworkConfig::table1();
        let qos = QosSpec::table1();
        let consts = DerivedConstants::new(&net, &qos).unwrap();
        (net, qos, consts)
    }

    #[test]
    fn power_model_cases() {
        assert_relative_eq!(bs_power(56.0, 2.6, 6.3, 10e6, 10e6, BsMode::Active).unwrap(), 72.38, max_relative = 1e-12);
        assert_eq!(bs_power(56.0, 2.6, 6.3, 0.0, 10e6, BsMode::Active).unwrap(), 56.0);
        assert_eq!(bs_power(56.0, 2.6, 6.3, 5e6, 10e6, BsMode::Sleep).unwrap(), 0.0);
        assert!(bs_power(56.0, 2.6, 6.3, 11e6, 10e6, BsMode::Active).is_err());
    }

    #[test]
    fn bandwidth_from_rate_cases() {
        let (net, _, _) = setup();
        let energy = EnergyConfig::new(10.0, 1.0, 0.0).unwrap();
        assert_eq!(sc_bandwidth_from_rate(56.0, &energy, &net).unwrap(), 0.0);
        assert_relative_eq!(
            sc_bandwidth_from_rate(56.0 + 2.6 * 6.3, &energy, &net).unwrap(),
            10e6,
            max_relative = 1e-12
        );
        // (64.19 - 56) / (2.6 * 6.3) * 10 MHz
        let w = sc_bandwidth_from_rate(64.19, &energy, &net).unwrap();
        assert_relative_eq!(w, (64.19 - 56.0) / 16.38 * 10e6, max_relative = 1e-12);
        assert!((w - 5e6).abs() < 1e3);
        assert!(matches!(sc_bandwidth_from_rate(55.0, &energy, &net), Err(Error::RateOutOfRange { .. })));
        assert!(sc_bandwidth_from_rate(80.0, &energy, &net).is_err());
    }

    #[test]
    fn offload_fraction_cases() {
        let (net, qos, consts) = setup();
        let traffic = TrafficSnapshot::per_km2(5.0, 60.0);
        let n = traffic.sc_user_mean(&net);
        let w_for = |users: f64| users * qos.rate_threshold_bps / consts.tau_ssu;
        assert!(offload_fraction(w_for(1.0), &traffic, &net, &qos, &consts).clamped.abs() < 1e-12);
        assert_relative_eq!(
            offload_fraction(w_for(1.0 + n), &traffic, &net, &qos, &consts).clamped,
            1.0,
            max_relative = 1e-12
        );
        let over = offload_fraction(w_for(1.0 + 2.0 * n), &traffic, &net, &qos, &consts);
        assert_eq!(over.clamped, 1.0);
        assert_relative_eq!(over.raw, 2.0, max_relative = 1e-12);
        let empty = TrafficSnapshot::per_km2(5.0, 0.0);
        assert_eq!(offload_fraction(w_for(1.5), &empty, &net, &qos, &consts).clamped, 1.0);
        assert_eq!(offload_fraction(w_for(0.5), &empty, &net, &qos, &consts).clamped, 0.0);
    }

    #[test]
    fn macro_bandwidth_boundaries() {
        let (net, qos, consts) = setup();
        let traffic = TrafficSnapshot::per_km2(5.0, 60.0);
        let single = qos.rate_threshold_bps / consts.tau_msu;
        let b0 = macro_bandwidths(0.0, &traffic, &net, &qos, &consts).unwrap();
        assert_eq!(b0.mso_hz, single);
        let b1 = macro_bandwidths(1.0, &traffic, &net, &qos, &consts).unwrap();
        assert_eq!(b1.msa_hz, single);
        let total = single * (2.0 + traffic.sc_user_mean(&net));
        for phi in [0.0, 0.1, 0.37, 0.5, 0.93, 1.0] {
            let b = macro_bandwidths(phi, &traffic, &net, &qos, &consts).unwrap();
            assert_relative_eq!(b.msa_hz + b.mso_hz, total, max_relative = 1e-12);
        }
    }

    #[test]
    fn table1_macro_density_is_infeasible() {
        let (net, qos, consts) = setup();
        let traffic = TrafficSnapshot::per_km2(20.0, 60.0);
        assert!(matches!(macro_bandwidths(0.0, &traffic, &net, &qos, &consts), Err(Error::MacroInfeasible { .. })));
    }

    #[test]
    fn table1_active_power_by_hand() {
        // phi = 0.5, rho_s = 60/km^2, rho_m = 20/km^2, p_off = 0.3, C_ho = 0
        let (net, qos, consts) = setup();
        let traffic = TrafficSnapshot::per_km2(20.0, 60.0);
        let bw = MacroBandwidths::unchecked(0.5, &traffic, &net, &qos, &consts);
        let mut queue = QueueAnalytics::inactive();
        queue.off_probability = 0.3;
        let op = OperatingPoint {
            sc_active: true,
            mu_e_per_s: 0.0,
            w_ss_hz: 0.0,
            offload_fraction: 0.5,
            w_mm_hz: bw.mm_hz,
            w_msa_hz: bw.msa_hz,
            w_mso_hz: bw.mso_hz,
            queue,
        };
        // spreadsheet evaluation
        let r = 1e5;
        let rho_mp = 20e-6 * (1e6 - 9e4) / 1e6;
        let w_mm = r / consts.tau_mmu * (1.0 + PI * 1e6 * rho_mp);
        let n_s = 60e-6 * PI * 9e4;
        let w_msa = r / consts.tau_msu * (1.0 + 0.5 * n_s);
        let w_mso = r / consts.tau_msu * (1.0 + 0.5 * n_s);
        let expected = 130.0 + 4.7 * 20.0 / 1e7 * (w_mm + w_msa + 0.3 * w_mso);
        assert_relative_eq!(ongrid_power_active(&op, &net), expected, max_relative = 1e-12);
    }

    #[test]
    fn active_power_reduces_to_off_power() {
        let (net, qos, consts) = setup();
        let traffic = TrafficSnapshot::per_km2(5.0, 60.0);
        let mut op = OperatingPoint::sc_off(&traffic, &net, &qos, &consts).unwrap();
        op.sc_active = true;
        op.queue.off_probability = 1.0;
        let p_off = ongrid_power_sc_off(&traffic, &net, &qos, &consts).unwrap();
        assert_relative_eq!(ongrid_power_active(&op, &net), p_off, max_relative = 1e-12);
        op.queue.off_probability = 0.0;
        let bw = MacroBandwidths::unchecked(0.0, &traffic, &net, &qos, &consts);
        assert_relative_eq!(
            ongrid_power_active(&op, &net),
            130.0 + 4.7 * 20.0 / 1e7 * (bw.mm_hz + bw.msa_hz),
            max_relative = 1e-12
        );
    }

    #[test]
    fn off_power_with_only_typical_users() {
        let (net, qos, consts) = setup();
        let traffic = TrafficSnapshot::per_km2(0.0, 0.0);
        let expected = 130.0 + 4.7 * 20.0 / 1e7 * (1e5 / consts.tau_mmu + 2e5 / consts.tau_msu);
        assert_relative_eq!(
            ongrid_power_sc_off(&traffic, &net, &qos, &consts).unwrap(),
            expected,
            max_relative = 1e-12
        );
        assert_eq!(TrafficSnapshot::per_km2(3.0, 0.0).macro_density, 3.0 * PER_KM2);
    }

    #[test]
    fn closed_form_branches() {
        let (net, _, consts) = setup();
        let lambda = 63.0;
        let energy = EnergyConfig::new(lambda, 1.0, 0.0).unwrap();
        let at = rf_gain_closed_form(lambda, &energy, &consts, &net).unwrap();
        assert_relative_eq!(at, consts.zeta_ee * lambda - consts.kappa_w, max_relative = 1e-12);
        let above = rf_gain_closed_form(lambda * (1.0 + 1e-14), &energy, &consts, &net).unwrap();
        assert_relative_eq!(at, above, max_relative = 1e-12);
        // large mu approaches the conversion-rate ceiling
        let far = rf_gain_closed_form(1e12, &energy, &consts, &net).unwrap();
        assert_relative_eq!(far, consts.zeta_ee * lambda, max_relative = 1e-9);
        // energy-rich: linear in mu with slope zeta
        let rich = EnergyConfig::new(1e9, 1.0, 0.0).unwrap();
        let g1 = rf_gain_closed_form(60.0, &rich, &consts, &net).unwrap();
        let g2 = rf_gain_closed_form(70.0, &rich, &consts, &net).unwrap();
        assert_relative_eq!((g2 - g1) / 10.0, consts.zeta_ee, max_relative = 1e-9);
        assert!(rf_gain_closed_form(50.0, &rich, &consts, &net).is_err());
    }

    #[test]
    fn free_handovers_at_max_rate() {
        let (net, qos, consts) = setup();
        let traffic = TrafficSnapshot::per_km2(5.0, 60.0);
        let energy = EnergyConfig::new(500.0, 1.0, 0.0).unwrap();
        let (mu_max, _) = max_consumption(&energy, &traffic, &net, &qos, &consts);
        let g = total_gain(mu_max, &energy, &consts, &traffic, &net, &qos, GainForm::Closed).unwrap();
        assert_eq!(g.total_gain_w, g.rf_gain_w);
        assert!(g.total_gain_w > 0.0);
    }

    #[test]
    fn pipeline_and_closed_forms_differ_by_typical_user() {
        let (net, qos, consts) = setup();
        let traffic = TrafficSnapshot::per_km2(5.0, 60.0);
        let energy = EnergyConfig::new(62.0, 1.0, 0.7).unwrap();
        let c = consts.typical_msu_rf_power(&net, &qos);
        for mu in [59.0, 61.5, 62.0, 64.0, 67.0] {
            let closed = total_gain(mu, &energy, &consts, &traffic, &net, &qos, GainForm::Closed).unwrap();
            let pipe = total_gain(mu, &energy, &consts, &traffic, &net, &qos, GainForm::Pipeline).unwrap();
            let p_off = analyze_queue(&energy, mu).unwrap().off_probability;
            assert_relative_eq!(closed.total_gain_w + (1.0 - p_off) * c, pipe.total_gain_w, max_relative = 1e-9);
            for g in [closed, pipe] {
                assert_relative_eq!(g.total_gain_w, g.p_off_w - g.p_active_w, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn empty_small_cell_only_pays_handovers() {
        let (net, qos, consts) = setup();
        let traffic = TrafficSnapshot::per_km2(5.0, 0.0);
        let energy = EnergyConfig::new(30.0, 1.0, 2.0).unwrap();
        let (mu_max, _) = max_consumption(&energy, &traffic, &net, &qos, &consts);
        for form in [GainForm::Closed, GainForm::Pipeline] {
            let g = total_gain(mu_max, &energy, &consts, &traffic, &net, &qos, form).unwrap();
            assert_eq!(g.rf_gain_w, 0.0);
            assert!(g.total_gain_w < 0.0);
            assert_eq!(g.total_gain_w, -g.handover_power_w);
        }
    }

    #[test]
    fn operating_point_endpoints_are_exact() {
        let (net, qos, consts) = setup();
        let energy = EnergyConfig::new(30.0, 1.0, 2.0).unwrap();
        // full load
        let dense = TrafficSnapshot::per_km2(5.0, 100.0);
        let (mu_max, w) = max_consumption(&energy, &dense, &net, &qos, &consts);
        assert_eq!(w, net.small_cell.bandwidth_hz);
        let op = OperatingPoint::active(mu_max, &energy, &dense, &net, &qos, &consts).unwrap();
        assert_eq!(op.w_ss_hz, net.small_cell.bandwidth_hz);
        // full offload
        let sparse = TrafficSnapshot::per_km2(5.0, 60.0);
        let (mu_max, _) = max_consumption(&energy, &sparse, &net, &qos, &consts);
        let op = OperatingPoint::active(mu_max, &energy, &sparse, &net, &qos, &consts).unwrap();
        assert_eq!(op.offload_fraction, 1.0);
        assert_eq!(op.w_ss_hz, full_offload_bandwidth(&sparse, &net, &qos, &consts));
        let op = OperatingPoint::active(56.0, &energy, &sparse, &net, &qos, &consts).unwrap();
        assert_eq!(op.w_ss_hz, 0.0);
        assert_eq!(op.offload_fraction, 0.0);
        assert!(OperatingPoint::active(mu_max * 1.01, &energy, &sparse, &net, &qos, &consts).is_err());
    }
}
