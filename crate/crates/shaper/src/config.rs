//! Scenario configuration files.
//!
//! The format is TOML restricted to numbers and one string (the noise
//! density), addressed by dotted keys. Sections and inline dotted keys are
//! equivalent. Every key is required and unknown keys are rejected.

use std::path::Path;

use serde::Serialize;
use shaper_core::model::{dbm_per_mhz_to_w_per_hz, MacroConfig, SmallCellConfig};
use shaper_core::{EnergyConfig, Error as ModelError, NetworkConfig, QosSpec, TrafficSnapshot};
use toml::{Table, Value};

use crate::error::{CliError, Result};

/// Config key, the core field it feeds, and a short description.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("macro.d_m_m", "macro.coverage_radius_m", "macro coverage radius [m]"),
    ("macro.p_0m_w", "macro.static_power_w", "macro static power [W]"),
    ("macro.p_tm_w", "macro.tx_power_w", "macro transmit power [W]"),
    ("macro.beta_m", "macro.amp_inefficiency", "macro amplifier inefficiency"),
    ("macro.alpha_m", "macro.pathloss_exp", "macro path-loss exponent"),
    ("macro.w_m_hz", "macro.bandwidth_hz", "macro bandwidth [Hz]"),
    ("macro.theta_m", "macro.interference_factor", "macro interference-to-noise factor"),
    ("sc.d_s_m", "sc.coverage_radius_m", "small-cell coverage radius [m]"),
    ("sc.p_0s_w", "sc.static_power_w", "small-cell static power [W]"),
    ("sc.p_ts_w", "sc.tx_power_w", "small-cell transmit power [W]"),
    ("sc.beta_s", "sc.amp_inefficiency", "small-cell amplifier inefficiency"),
    ("sc.alpha_s", "sc.pathloss_exp", "small-cell path-loss exponent"),
    ("sc.w_s_hz", "sc.bandwidth_hz", "small-cell bandwidth [Hz]"),
    ("sc.theta_s", "sc.interference_factor", "small-cell interference-to-noise factor"),
    ("sc.d_ms_m", "sc.macro_sc_distance_m", "macro to small-cell distance [m]"),
    ("qos.rate_threshold_bps", "qos.rate_threshold_bps", "per-user rate threshold [bit/s]"),
    ("qos.eta", "qos.eta", "outage probability target"),
    ("qos.noise_density", "qos.noise_density", "noise density, e.g. \"-105 dBm/MHz\""),
    ("energy.e_j", "energy.e_j", "energy per harvested unit [J]"),
    ("energy.lambda_e_per_s", "energy.lambda_e_per_s", "energy arrival rate [units/s]"),
    ("energy.c_ho_j", "energy.c_ho_j", "energy per handover [J]"),
    ("traffic.rho_m_per_km2", "traffic.rho_m", "macro user density [1/km^2]"),
    ("traffic.rho_s_per_km2", "traffic.rho_s", "small-cell user density [1/km^2]"),
];

/// Everything a scenario file describes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    pub net: NetworkConfig,
    pub qos: QosSpec,
    pub energy: EnergyConfig,
    pub traffic: TrafficSnapshot,
}

pub fn load_config(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    parse_config(&text).map_err(|message| CliError::Config { path: path.to_path_buf(), message })
}

/// Parses and validates config text; the error names the offending key.
pub fn parse_config(text: &str) -> std::result::Result<Scenario, String> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| e.to_string().trim_end().to_string())?;
    let mut flat = Vec::new();
    flatten("", &table, &mut flat);

    for (key, _) in &flat {
        if !KEYS.iter().any(|(k, _, _)| k == key) {
            return Err(format!("unknown key `{key}`"));
        }
    }
    let lookup = |key: &str| -> std::result::Result<&Value, String> {
        flat.iter().find(|(k, _)| k == key).map(|(_, v)| *v).ok_or_else(|| format!("missing key `{key}`"))
    };
    let num = |key: &str| -> std::result::Result<f64, String> {
        match lookup(key)? {
            Value::Float(x) => Ok(*x),
            Value::Integer(i) => Ok(*i as f64),
            other => Err(format!("key `{key}` must be a number, got {}", other.type_str())),
        }
    };
    let noise = match lookup("qos.noise_density")? {
        Value::String(s) => parse_noise_density(s).map_err(|e| format!("key `qos.noise_density`: {e}"))?,
        other => return Err(format!("key `qos.noise_density` must be a string, got {}", other.type_str())),
    };

    let net = NetworkConfig {
        macro_bs: MacroConfig {
            coverage_radius_m: num("macro.d_m_m")?,
            static_power_w: num("macro.p_0m_w")?,
            tx_power_w: num("macro.p_tm_w")?,
            amp_inefficiency: num("macro.beta_m")?,
            pathloss_exp: num("macro.alpha_m")?,
            bandwidth_hz: num("macro.w_m_hz")?,
            interference_factor: num("macro.theta_m")?,
        },
        small_cell: SmallCellConfig {
            coverage_radius_m: num("sc.d_s_m")?,
            static_power_w: num("sc.p_0s_w")?,
            tx_power_w: num("sc.p_ts_w")?,
            amp_inefficiency: num("sc.beta_s")?,
            pathloss_exp: num("sc.alpha_s")?,
            bandwidth_hz: num("sc.w_s_hz")?,
            interference_factor: num("sc.theta_s")?,
            macro_sc_distance_m: num("sc.d_ms_m")?,
        },
    };
    let qos = QosSpec {
        rate_threshold_bps: num("qos.rate_threshold_bps")?,
        outage_target: num("qos.eta")?,
        noise_density_w_per_hz: noise,
    };
    let energy = EnergyConfig {
        arrival_rate_per_s: num("energy.lambda_e_per_s")?,
        unit_joules: num("energy.e_j")?,
        handover_cost_j: num("energy.c_ho_j")?,
    };
    let traffic = TrafficSnapshot::per_km2(num("traffic.rho_m_per_km2")?, num("traffic.rho_s_per_km2")?);

    let named = |e: ModelError| rename_field(e);
    net.validate().map_err(named)?;
    qos.validate().map_err(named)?;
    energy.validate().map_err(named)?;
    traffic.validate().map_err(named)?;
    Ok(Scenario { net, qos, energy, traffic })
}

fn flatten<'a>(prefix: &str, table: &'a Table, out: &mut Vec<(String, &'a Value)>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Table(t) => flatten(&key, t, out),
            _ => out.push((key, v)),
        }
    }
}

fn rename_field(e: ModelError) -> String {
    match e {
        ModelError::InvalidParameter { field, reason } => {
            let key = KEYS.iter().find(|(_, f, _)| *f == field).map_or(field, |(k, _, _)| k);
            format!("invalid value for `{key}`: {reason}")
        }
        other => other.to_string(),
    }
}

/// Accepts `<x> dBm/MHz`, `<x> dBm/Hz` or `<x> W/Hz`.
pub fn parse_noise_density(text: &str) -> std::result::Result<f64, String> {
    let normalized = text.trim().replace('\u{2212}', "-");
    let (value, unit) =
        normalized.split_once(char::is_whitespace).ok_or_else(|| format!("expected `<value> <unit>`, got `{text}`"))?;
    let x: f64 = value.parse().map_err(|_| format!("`{value}` is not a number"))?;
    let w_per_hz = match unit.trim() {
        "dBm/MHz" => dbm_per_mhz_to_w_per_hz(x),
        "dBm/Hz" => dbm_per_mhz_to_w_per_hz(x + 60.0),
        "W/Hz" => x,
        other => return Err(format!("unknown unit `{other}`; use dBm/MHz, dBm/Hz or W/Hz")),
    };
    if w_per_hz.is_finite() && w_per_hz > 0.0 {
        Ok(w_per_hz)
    } else {
        Err(format!("noise density must be positive, got {text}"))
    }
}

/// Serializes a scenario in the file format; `parse_config` reads it back.
pub fn render_config(s: &Scenario, noise_density: &str) -> String {
    let (m, sc) = (&s.net.macro_bs, &s.net.small_cell);
    let values: [(&str, f64); 22] = [
        ("macro.d_m_m", m.coverage_radius_m),
        ("macro.p_0m_w", m.static_power_w),
        ("macro.p_tm_w", m.tx_power_w),
        ("macro.beta_m", m.amp_inefficiency),
        ("macro.alpha_m", m.pathloss_exp),
        ("macro.w_m_hz", m.bandwidth_hz),
        ("macro.theta_m", m.interference_factor),
        ("sc.d_s_m", sc.coverage_radius_m),
        ("sc.p_0s_w", sc.static_power_w),
        ("sc.p_ts_w", sc.tx_power_w),
        ("sc.beta_s", sc.amp_inefficiency),
        ("sc.alpha_s", sc.pathloss_exp),
        ("sc.w_s_hz", sc.bandwidth_hz),
        ("sc.theta_s", sc.interference_factor),
        ("sc.d_ms_m", sc.macro_sc_distance_m),
        ("qos.rate_threshold_bps", s.qos.rate_threshold_bps),
        ("qos.eta", s.qos.outage_target),
        ("energy.e_j", s.energy.unit_joules),
        ("energy.lambda_e_per_s", s.energy.arrival_rate_per_s),
        ("energy.c_ho_j", s.energy.handover_cost_j),
        ("traffic.rho_m_per_km2", s.traffic.macro_density / shaper_core::model::PER_KM2),
        ("traffic.rho_s_per_km2", s.traffic.sc_density / shaper_core::model::PER_KM2),
    ];
    let mut out = String::new();
    for (key, v) in values {
        out.push_str(&format!("{key} = {v:?}\n"));
        if key == "qos.eta" {
            out.push_str(&format!("qos.noise_density = \"{noise_density}\"\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE1: &str = include_str!("../data/table1.cfg");

    #[test]
    fn shipped_defaults() {
        let s = parse_config(TABLE1).unwrap();
        assert_eq!(s.net.macro_bs.coverage_radius_m, 1000.0);
        assert_eq!(s.qos.outage_target, 0.05);
        assert_eq!(s.net.small_cell.interference_factor, 2000.0);
        assert_eq!(s.net, NetworkConfig::table1());
        assert_eq!(s.qos, QosSpec::table1());
    }

    #[test]
    fn noise_over_macro_band() {
        let s = parse_config(TABLE1).unwrap();
        let n = s.qos.noise_density_w_per_hz * s.net.macro_bs.bandwidth_hz;
        assert!((n / 3.162e-13 - 1.0).abs() < 1e-3, "{n}");
    }

    #[test]
    fn noise_units() {
        let a = parse_noise_density("-105 dBm/MHz").unwrap();
        let b = parse_noise_density("-165 dBm/Hz").unwrap();
        let c = parse_noise_density("3.1622776601683795e-20 W/Hz").unwrap();
        assert!((a / b - 1.0).abs() < 1e-12 && (a / c - 1.0).abs() < 1e-12);
        assert!(parse_noise_density("-105").is_err());
        assert!(parse_noise_density("-105 dB").is_err());
        assert_eq!(parse_noise_density("\u{2212}105 dBm/MHz").unwrap(), a);
    }

    #[test]
    fn missing_key_is_named() {
        let text: String =
            TABLE1.lines().filter(|l| !l.starts_with("qos.rate_threshold_bps")).map(|l| format!("{l}\n")).collect();
        let err = parse_config(&text).unwrap_err();
        assert!(err.contains("qos.rate_threshold_bps"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_config(&format!("{TABLE1}\nsc.colour = 3\n")).unwrap_err();
        assert!(err.contains("sc.colour"), "{err}");
    }

    #[test]
    fn invariant_violation_names_config_key() {
        let text = TABLE1.replace("sc.d_s_m = 300.0", "sc.d_s_m = -1.0");
        let err = parse_config(&text).unwrap_err();
        assert!(err.contains("sc.d_s_m"), "{err}");
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = parse_config("macro.d_m_m = = 3\n").unwrap_err();
        assert!(err.contains("line 1"), "{err}");
    }

    #[test]
    fn section_form_is_equivalent() {
        let mut sections = String::new();
        let mut current = "";
        for line in TABLE1.lines().filter(|l| l.contains('=')) {
            let (key, value) = line.split_once('=').unwrap();
            let (section, field) = key.trim().split_once('.').unwrap();
            if section != current {
                sections.push_str(&format!("[{section}]\n"));
                current = section;
            }
            sections.push_str(&format!("{field} ={value}\n"));
        }
        assert_eq!(parse_config(&sections).unwrap(), parse_config(TABLE1).unwrap());
    }

    #[test]
    fn render_round_trip() {
        let s = parse_config(TABLE1).unwrap();
        let text = render_config(&s, "-105 dBm/MHz");
        assert_eq!(parse_config(&text).unwrap(), s);
    }
}
