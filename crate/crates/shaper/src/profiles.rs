//! Per-period traffic and energy profiles.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use shaper_core::TrafficSnapshot;

use crate::error::{CliError, Result};

pub const HEADER: [&str; 5] = ["start_s", "duration_s", "rho_m_per_km2", "rho_s_per_km2", "lambda_e_per_s"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Period {
    pub start_s: f64,
    pub duration_s: f64,
    pub rho_m_per_km2: f64,
    pub rho_s_per_km2: f64,
    pub lambda_e_per_s: f64,
}

impl Period {
    pub fn traffic(&self) -> TrafficSnapshot {
        TrafficSnapshot::per_km2(self.rho_m_per_km2, self.rho_s_per_km2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DailyProfiles {
    pub periods: Vec<Period>,
    /// One label per period; `HH:MM` of the start time.
    pub labels: Vec<String>,
}

impl DailyProfiles {
    pub fn new(periods: Vec<Period>) -> Result<Self> {
        validate(&periods)?;
        let labels = periods.iter().map(|p| clock_label(p.start_s)).collect();
        Ok(Self { periods, labels })
    }

    pub fn total_duration_s(&self) -> f64 {
        self.periods.iter().map(|p| p.duration_s).sum()
    }
}

fn clock_label(start_s: f64) -> String {
    let minutes = (start_s / 60.0).round() as i64;
    format!("{:02}:{:02}", minutes.div_euclid(60).rem_euclid(24), minutes.rem_euclid(60))
}

fn validate(periods: &[Period]) -> Result<()> {
    if periods.is_empty() {
        return Err(CliError::Input("profile has no periods".into()));
    }
    for (i, p) in periods.iter().enumerate() {
        let row = i + 1;
        let fields = [
            ("start_s", p.start_s),
            ("rho_m_per_km2", p.rho_m_per_km2),
            ("rho_s_per_km2", p.rho_s_per_km2),
            ("lambda_e_per_s", p.lambda_e_per_s),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(CliError::Input(format!("period {row}: {name} must be finite and >= 0, got {v}")));
            }
        }
        if !(p.duration_s.is_finite() && p.duration_s > 0.0) {
            return Err(CliError::Input(format!("period {row}: duration_s must be > 0, got {}", p.duration_s)));
        }
        if i > 0 {
            let prev = &periods[i - 1];
            let end = prev.start_s + prev.duration_s;
            let slack = 1e-9 * end.abs().max(1.0);
            if p.start_s > end + slack {
                return Err(CliError::Input(format!(
                    "gap before period {row}: previous period ends at {end} s, next starts at {} s",
                    p.start_s
                )));
            }
            if p.start_s < end - slack {
                return Err(CliError::Input(format!(
                    "period {row} starting at {} s overlaps the previous period ending at {end} s",
                    p.start_s
                )));
            }
        }
    }
    Ok(())
}

pub fn read_profiles<R: Read>(input: R) -> Result<DailyProfiles> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(input);
    let headers = reader.headers().map_err(|e| CliError::Input(format!("profile header: {e}")))?.clone();
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(CliError::Input(format!(
            "profile header must be `{}`, got `{}`",
            HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut periods = Vec::new();
    for (i, row) in reader.deserialize::<Period>().enumerate() {
        periods.push(row.map_err(|e| CliError::Input(format!("profile row {}: {e}", i + 1)))?);
    }
    DailyProfiles::new(periods)
}

pub fn load_profiles(path: &Path) -> Result<DailyProfiles> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(format!("opening {}", path.display()), e))?;
    read_profiles(file).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn write_profiles<W: Write>(out: W, profiles: &DailyProfiles) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in &profiles.periods {
        w.serialize(p).map_err(|e| CliError::Input(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::io("writing profile", e))
}

/// Parameters of the synthetic daily profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticDay {
    pub rho_m_max_per_km2: f64,
    pub rho_s_max_per_km2: f64,
    pub lambda_e_max_per_s: f64,
    pub periods: usize,
}

impl Default for SyntheticDay {
    fn default() -> Self {
        Self { rho_m_max_per_km2: 5.0, rho_s_max_per_km2: 100.0, lambda_e_max_per_s: 60.0, periods: 24 }
    }
}

/// Traffic as a fraction of its peak at `hour`: 0.1 at 04:00, rising on a
/// half cosine to 1.0 at 21:00 and falling back by 04:00.
pub fn traffic_fraction(hour: f64) -> f64 {
    use std::f64::consts::PI;
    let h = (hour - 4.0).rem_euclid(24.0) + 4.0;
    let shape = if h <= 21.0 {
        (1.0 - (PI * (h - 4.0) / 17.0).cos()) / 2.0
    } else {
        (1.0 + (PI * (h - 21.0) / 7.0).cos()) / 2.0
    };
    0.1 + 0.9 * shape
}

/// Solar energy as a fraction of its peak: half sine over 06:00 to 18:00.
pub fn solar_fraction(hour: f64) -> f64 {
    let h = hour.rem_euclid(24.0);
    if (6.0..=18.0).contains(&h) {
        (std::f64::consts::PI * (h - 6.0) / 12.0).sin().max(0.0)
    } else {
        0.0
    }
}

/// Equal-length periods over one day, each sampled at its start time.
pub fn synthetic_day(params: &SyntheticDay) -> DailyProfiles {
    let len = 86_400.0 / params.periods as f64;
    let periods = (0..params.periods)
        .map(|i| {
            let start_s = i as f64 * len;
            let hour = start_s / 3600.0;
            let t = traffic_fraction(hour);
            Period {
                start_s,
                duration_s: len,
                rho_m_per_km2: t * params.rho_m_max_per_km2,
                rho_s_per_km2: t * params.rho_s_max_per_km2,
                lambda_e_per_s: solar_fraction(hour) * params.lambda_e_max_per_s,
            }
        })
        .collect();
    DailyProfiles::new(periods).expect("synthetic profile is contiguous")
}

#[cfg(test)]
mod tests {
    use super::*;

    const DAY24: &str = include_str!("../data/day24.csv");

    fn csv_of(rows: &[[f64; 5]]) -> String {
        let mut s = HEADER.join(",") + "\n";
        for r in rows {
            s += &r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            s.push('\n');
        }
        s
    }

    #[test]
    fn shipped_day_has_24_periods() {
        let p = read_profiles(DAY24.as_bytes()).unwrap();
        assert_eq!(p.periods.len(), 24);
        assert_eq!(p.total_duration_s(), 86_400.0);
        assert_eq!(p.labels[13], "13:00");
    }

    #[test]
    fn shipped_day_matches_generator() {
        let mut buf = Vec::new();
        write_profiles(&mut buf, &synthetic_day(&SyntheticDay::default())).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), DAY24);
    }

    #[test]
    fn profile_shape() {
        assert!((traffic_fraction(4.0) - 0.1).abs() < 1e-15);
        assert!((traffic_fraction(21.0) - 1.0).abs() < 1e-15);
        assert!((traffic_fraction(28.0) - traffic_fraction(4.0)).abs() < 1e-12);
        assert_eq!(solar_fraction(3.0), 0.0);
        assert_eq!(solar_fraction(12.0), 1.0);
        assert_eq!(solar_fraction(20.0), 0.0);
        let p = synthetic_day(&SyntheticDay::default());
        let peak = p.periods.iter().max_by(|a, b| a.rho_s_per_km2.total_cmp(&b.rho_s_per_km2)).unwrap();
        assert_eq!(peak.start_s, 21.0 * 3600.0);
    }

    #[test]
    fn single_period() {
        let p = read_profiles(csv_of(&[[0.0, 86400.0, 5.0, 60.0, 30.0]]).as_bytes()).unwrap();
        assert_eq!(p.periods.len(), 1);
    }

    #[test]
    fn gaps_and_overlaps_rejected() {
        let gap = csv_of(&[[0.0, 3600.0, 5.0, 60.0, 0.0], [4000.0, 3600.0, 5.0, 60.0, 0.0]]);
        let err = read_profiles(gap.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("gap"), "{err}");
        assert_eq!(err.exit_code(), 1);
        let overlap = csv_of(&[[0.0, 3600.0, 5.0, 60.0, 0.0], [3000.0, 3600.0, 5.0, 60.0, 0.0]]);
        assert!(read_profiles(overlap.as_bytes()).unwrap_err().to_string().contains("overlap"));
    }

    #[test]
    fn bad_values_rejected() {
        assert!(read_profiles(csv_of(&[[0.0, 0.0, 5.0, 60.0, 0.0]]).as_bytes()).is_err());
        assert!(read_profiles(csv_of(&[[0.0, 10.0, -5.0, 60.0, 0.0]]).as_bytes()).is_err());
        assert!(read_profiles("start_s,duration_s\n0,1\n".as_bytes()).is_err());
        assert!(read_profiles(HEADER.join(",").as_bytes()).is_err());
    }
}
