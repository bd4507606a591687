//! Network geometry, radio parameters and the simplified outage constraints.
//!
//! Every user class (MMU, MSU, SSU) has an outage constraint
//! `P{r < R_th} <= eta`. Under high SNR and sufficient bandwidth the
//! constraint reduces to `w / (1 + n) * tau >= R_th`, where `n` is the
//! expected number of other users sharing the band and `tau` is an
//! effective cell-edge spectral efficiency. This module computes those
//! efficiencies and the bandwidth needed to satisfy each constraint with
//! equality.
//!
//! All quantities are SI: metres, watts, hertz, users per square metre.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_non_negative, check_positive, Error, Result};

/// Users per km² to users per m².
pub const PER_KM2: f64 = 1e-6;

/// Converts a noise density in dBm/MHz to W/Hz.
pub fn dbm_per_mhz_to_w_per_hz(dbm_per_mhz: f64) -> f64 {
    10f64.powf(dbm_per_mhz / 10.0) * 1e-3 / 1e6
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroConfig {
    pub coverage_radius_m: f64,
    pub static_power_w: f64,
    pub tx_power_w: f64,
    pub amp_inefficiency: f64,
    pub pathloss_exp: f64,
    pub bandwidth_hz: f64,
    pub interference_factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallCellConfig {
    pub coverage_radius_m: f64,
    pub static_power_w: f64,
    pub tx_power_w: f64,
    pub amp_inefficiency: f64,
    pub pathloss_exp: f64,
    pub bandwidth_hz: f64,
    pub interference_factor: f64,
    /// Distance between the macro base station and the small cell.
    pub macro_sc_distance_m: f64,
}

/// Both tiers of the heterogeneous network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub macro_bs: MacroConfig,
    pub small_cell: SmallCellConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QosSpec {
    pub rate_threshold_bps: f64,
    pub outage_target: f64,
    pub noise_density_w_per_hz: f64,
}

/// User densities for one period, in users/m².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficSnapshot {
    pub macro_density: f64,
    pub sc_density: f64,
}

/// Constants derived once per configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub tau_ssu: f64,
    pub tau_msu: f64,
    pub tau_mmu: f64,
    /// Conversion rate of harvested energy into saved macro RF power.
    pub zeta_ee: f64,
    /// `zeta_ee * P_0s + beta_m * P_Tm * R_th / (W_m * tau_ms)`.
    pub kappa_w: f64,
}

/// Tier whose cell-edge efficiency is requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tier {
    SmallCell,
    MacroEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UserClass {
    /// Outside the small cell, served by the macro.
    Mmu,
    /// Inside the small cell, served by the macro.
    Msu,
    /// Offloaded to the small cell.
    Ssu,
}

impl MacroConfig {
    pub fn table1() -> Self {
        Self {
            coverage_radius_m: 1000.0,
            static_power_w: 130.0,
            tx_power_w: 20.0,
            amp_inefficiency: 4.7,
            pathloss_exp: 3.5,
            bandwidth_hz: 10e6,
            interference_factor: 1000.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("macro.coverage_radius_m", self.coverage_radius_m)?;
        check_positive("macro.static_power_w", self.static_power_w)?;
        check_positive("macro.tx_power_w", self.tx_power_w)?;
        check_positive("macro.amp_inefficiency", self.amp_inefficiency)?;
        check_pathloss("macro.pathloss_exp", self.pathloss_exp)?;
        check_positive("macro.bandwidth_hz", self.bandwidth_hz)?;
        check_non_negative("macro.interference_factor", self.interference_factor)
    }

    pub fn area_m2(&self) -> f64 {
        PI * self.coverage_radius_m * self.coverage_radius_m
    }
}

impl SmallCellConfig {
    pub fn table1() -> Self {
        Self {
            coverage_radius_m: 300.0,
            static_power_w: 56.0,
            tx_power_w: 6.3,
            amp_inefficiency: 2.6,
            pathloss_exp: 4.0,
            bandwidth_hz: 10e6,
            interference_factor: 2000.0,
            macro_sc_distance_m: 600.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("sc.coverage_radius_m", self.coverage_radius_m)?;
        check_positive("sc.static_power_w", self.static_power_w)?;
        check_positive("sc.tx_power_w", self.tx_power_w)?;
        check_positive("sc.amp_inefficiency", self.amp_inefficiency)?;
        check_pathloss("sc.pathloss_exp", self.pathloss_exp)?;
        check_positive("sc.bandwidth_hz", self.bandwidth_hz)?;
        check_non_negative("sc.interference_factor", self.interference_factor)?;
        check_positive("sc.macro_sc_distance_m", self.macro_sc_distance_m)
    }

    pub fn area_m2(&self) -> f64 {
        PI * self.coverage_radius_m * self.coverage_radius_m
    }

    /// Full-load power draw `P_0s + beta_s * P_Ts`.
    pub fn full_load_power_w(&self) -> f64 {
        self.static_power_w + self.amp_inefficiency * self.tx_power_w
    }
}

fn check_pathloss(field: &'static str, alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { field, reason: format!("path-loss exponent must exceed 2, got {alpha}") })
    }
}

impl NetworkConfig {
    pub fn table1() -> Self {
        Self { macro_bs: MacroConfig::table1(), small_cell: SmallCellConfig::table1() }
    }

    pub fn validate(&self) -> Result<()> {
        self.macro_bs.validate()?;
        self.small_cell.validate()?;
        let (dm, ds) = (self.macro_bs.coverage_radius_m, self.small_cell.coverage_radius_m);
        if ds >= dm {
            return Err(Error::InvalidParameter {
                field: "sc.coverage_radius_m",
                reason: format!("small-cell radius {ds} m must be below the macro radius {dm} m"),
            });
        }
        if self.small_cell.macro_sc_distance_m + ds > dm {
            return Err(Error::InvalidParameter {
                field: "sc.macro_sc_distance_m",
                reason: format!(
                    "small cell at {} m with radius {ds} m leaves the macro coverage of {dm} m",
                    self.small_cell.macro_sc_distance_m
                ),
            });
        }
        Ok(())
    }
}

impl QosSpec {
    pub fn table1() -> Self {
        Self { rate_threshold_bps: 100e3, outage_target: 0.05, noise_density_w_per_hz: dbm_per_mhz_to_w_per_hz(-105.0) }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("qos.rate_threshold_bps", self.rate_threshold_bps)?;
        if !(self.outage_target > 0.0 && self.outage_target < 1.0) {
            return Err(Error::InvalidParameter {
                field: "qos.eta",
                reason: format!("outage target must lie in (0, 1), got {}", self.outage_target),
            });
        }
        check_positive("qos.noise_density", self.noise_density_w_per_hz)
    }
}

impl TrafficSnapshot {
    pub fn per_km2(macro_per_km2: f64, sc_per_km2: f64) -> Self {
        Self { macro_density: macro_per_km2 * PER_KM2, sc_density: sc_per_km2 * PER_KM2 }
    }

    pub fn validate(&self) -> Result<()> {
        check_non_negative("traffic.rho_m", self.macro_density)?;
        check_non_negative("traffic.rho_s", self.sc_density)
    }

    /// Expected number of users inside the small-cell disc, `rho_s * pi * D_s^2`.
    pub fn sc_user_mean(&self, net: &NetworkConfig) -> f64 {
        self.sc_density * net.small_cell.area_m2()
    }

    /// Expected MMU count under the PPP approximation, `pi * D_m^2 * rho'_m`.
    pub fn mmu_mean(&self, net: &NetworkConfig) -> f64 {
        effective_mmu_density(self.macro_density, net.macro_bs.coverage_radius_m, net.small_cell.coverage_radius_m)
            * net.macro_bs.area_m2()
    }

    /// Expected number of users of `class`, other than a typical user.
    pub fn expected_peers(&self, class: UserClass, offload: f64, net: &NetworkConfig) -> f64 {
        match class {
            UserClass::Ssu => offload * self.sc_user_mean(net),
            UserClass::Msu => (1.0 - offload) * self.sc_user_mean(net),
            UserClass::Mmu => self.mmu_mean(net),
        }
    }
}

/// Cell-edge spectral efficiency of a disc-shaped tier.
///
/// `tau = log2(1 + eta * P_T * (alpha + 2) / (2 * (theta + 1) * sigma^2 * W * D^alpha))`.
/// The bandwidth enters once, through the noise power `sigma^2 * W`.
pub fn edge_spectral_efficiency(tier: Tier, net: &NetworkConfig, qos: &QosSpec) -> Result<f64> {
    let (tx, alpha, theta, bw, radius) = match tier {
        Tier::SmallCell => {
            let sc = &net.small_cell;
            (sc.tx_power_w, sc.pathloss_exp, sc.interference_factor, sc.bandwidth_hz, sc.coverage_radius_m)
        }
        Tier::MacroEdge => {
            let m = &net.macro_bs;
            (m.tx_power_w, m.pathloss_exp, m.interference_factor, m.bandwidth_hz, m.coverage_radius_m)
        }
    };
    if alpha <= 2.0 {
        return Err(Error::Precondition(format!("path-loss exponent {alpha} must exceed 2")));
    }
    let snr = qos.outage_target * tx * (alpha + 2.0)
        / (2.0 * (theta + 1.0) * qos.noise_density_w_per_hz * bw * radius.powf(alpha));
    checked_tau(snr.ln_1p() / std::f64::consts::LN_2, tier_name(tier))
}

/// MSU spectral efficiency with every MSU placed at the small-cell site.
pub fn msu_spectral_efficiency(net: &NetworkConfig, qos: &QosSpec) -> Result<f64> {
    let m = &net.macro_bs;
    let d_ms = net.small_cell.macro_sc_distance_m;
    if d_ms.is_nan() || d_ms <= 0.0 {
        return Err(Error::Precondition(format!("macro-to-small-cell distance must be positive, got {d_ms}")));
    }
    let snr = qos.outage_target * m.tx_power_w
        / (qos.noise_density_w_per_hz * m.bandwidth_hz * (m.interference_factor + 1.0) * d_ms.powf(m.pathloss_exp));
    checked_tau(snr.ln_1p() / std::f64::consts::LN_2, "msu")
}

fn tier_name(tier: Tier) -> &'static str {
    match tier {
        Tier::SmallCell => "small-cell edge",
        Tier::MacroEdge => "macro edge",
    }
}

fn checked_tau(tau: f64, what: &str) -> Result<f64> {
    if tau.is_finite() && tau > 0.0 {
        Ok(tau)
    } else {
        Err(Error::Infeasible(format!("{what} spectral efficiency is {tau}")))
    }
}

/// Density of the PPP that approximates MMUs over the whole macro disc.
pub fn effective_mmu_density(macro_density: f64, macro_radius_m: f64, sc_radius_m: f64) -> f64 {
    let ratio = sc_radius_m / macro_radius_m;
    macro_density * (1.0 - ratio * ratio)
}

/// Minimum bandwidth that meets the class's outage constraint with equality,
/// `(R_th / tau_class) * (1 + expected_user_count)`.
///
/// The result may exceed the tier's bandwidth; callers decide feasibility.
pub fn required_bandwidth(class: UserClass, expected_user_count: f64, qos: &QosSpec, consts: &DerivedConstants) -> f64 {
    qos.rate_threshold_bps / consts.tau_for(class) * (1.0 + expected_user_count)
}

/// First-order outage of a typical user of `class` sharing `allocated_bw_hz`
/// with `peers` other users on average.
///
/// Uses `P{h < x} ~ x` for the fading and averages the path loss over the
/// class geometry (MSUs sit at the small-cell site). Equals the outage
/// target exactly at the bandwidth returned by [`required_bandwidth`].
pub fn outage_closed_form(
    class: UserClass,
    allocated_bw_hz: f64,
    peers: f64,
    net: &NetworkConfig,
    qos: &QosSpec,
) -> f64 {
    let (m, sc) = (&net.macro_bs, &net.small_cell);
    let noise = qos.noise_density_w_per_hz;
    let scale = match class {
        UserClass::Ssu => {
            2.0 * (sc.interference_factor + 1.0) * noise * sc.bandwidth_hz * sc.coverage_radius_m.powf(sc.pathloss_exp)
                / ((sc.pathloss_exp + 2.0) * sc.tx_power_w)
        }
        UserClass::Mmu => {
            2.0 * (m.interference_factor + 1.0) * noise * m.bandwidth_hz * m.coverage_radius_m.powf(m.pathloss_exp)
                / ((m.pathloss_exp + 2.0) * m.tx_power_w)
        }
        UserClass::Msu => {
            (m.interference_factor + 1.0) * noise * m.bandwidth_hz * sc.macro_sc_distance_m.powf(m.pathloss_exp)
                / m.tx_power_w
        }
    };
    scale * (qos.rate_threshold_bps * (1.0 + peers) / allocated_bw_hz * std::f64::consts::LN_2).exp_m1()
}

impl DerivedConstants {
    pub fn new(net: &NetworkConfig, qos: &QosSpec) -> Result<Self> {
        net.validate()?;
        qos.validate()?;
        let tau_ssu = edge_spectral_efficiency(Tier::SmallCell, net, qos)?;
        let tau_mmu = edge_spectral_efficiency(Tier::MacroEdge, net, qos)?;
        let tau_msu = msu_spectral_efficiency(net, qos)?;
        let (m, sc) = (&net.macro_bs, &net.small_cell);
        let zeta_ee = sc.bandwidth_hz * tau_ssu * m.amp_inefficiency * m.tx_power_w
            / (m.bandwidth_hz * tau_msu * sc.amp_inefficiency * sc.tx_power_w);
        let kappa_w = zeta_ee * sc.static_power_w + typical_msu_rf_power(net, qos, tau_msu);
        Ok(Self { tau_ssu, tau_msu, tau_mmu, zeta_ee, kappa_w })
    }

    pub fn tau_for(&self, class: UserClass) -> f64 {
        match class {
            UserClass::Ssu => self.tau_ssu,
            UserClass::Msu => self.tau_msu,
            UserClass::Mmu => self.tau_mmu,
        }
    }

    /// Macro RF power spent on one typical MSU, `beta_m * P_Tm * R_th / (W_m * tau_ms)`.
    pub fn typical_msu_rf_power(&self, net: &NetworkConfig, qos: &QosSpec) -> f64 {
        typical_msu_rf_power(net, qos, self.tau_msu)
    }
}

fn typical_msu_rf_power(net: &NetworkConfig, qos: &QosSpec, tau_msu: f64) -> f64 {
    let m = &net.macro_bs;
    m.amp_inefficiency * m.tx_power_w * qos.rate_threshold_bps / (m.bandwidth_hz * tau_msu)
}
