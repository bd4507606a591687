//! Rate-outage estimation for typical users under Rayleigh fading.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{draw_field, fading, poisson, uniform_in_disc};
use super::stats::BinomialEstimate;
use super::{batches, stream_rng};
use crate::error::{Error, Result};
use crate::model::{NetworkConfig, QosSpec, TrafficSnapshot, UserClass};

/// Where a typical MSU is placed relative to the macro.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MsuPlacement {
    /// Uniform in the small-cell disc, distance to the macro from geometry.
    #[default]
    Exact,
    /// Every MSU at the small-cell site, distance `D_ms`.
    AtSmallCell,
}

/// Transmit side of one serving link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub tx_power_w: f64,
    pub pathloss_exp: f64,
    pub bandwidth_hz: f64,
    pub interference_factor: f64,
    pub noise_density_w_per_hz: f64,
}

impl LinkBudget {
    pub fn macro_link(net: &NetworkConfig, qos: &QosSpec) -> Self {
        let m = &net.macro_bs;
        Self {
            tx_power_w: m.tx_power_w,
            pathloss_exp: m.pathloss_exp,
            bandwidth_hz: m.bandwidth_hz,
            interference_factor: m.interference_factor,
            noise_density_w_per_hz: qos.noise_density_w_per_hz,
        }
    }

    pub fn small_cell_link(net: &NetworkConfig, qos: &QosSpec) -> Self {
        let s = &net.small_cell;
        Self {
            tx_power_w: s.tx_power_w,
            pathloss_exp: s.pathloss_exp,
            bandwidth_hz: s.bandwidth_hz,
            interference_factor: s.interference_factor,
            noise_density_w_per_hz: qos.noise_density_w_per_hz,
        }
    }

    pub fn for_class(class: UserClass, net: &NetworkConfig, qos: &QosSpec) -> Self {
        match class {
            UserClass::Ssu => Self::small_cell_link(net, qos),
            UserClass::Msu | UserClass::Mmu => Self::macro_link(net, qos),
        }
    }

    /// `P_T * d^-alpha * h / ((theta + 1) * sigma^2 * W)`.
    pub fn sinr(&self, distance_m: f64, fading: f64) -> f64 {
        self.tx_power_w * distance_m.powf(-self.pathloss_exp) * fading
            / ((self.interference_factor + 1.0) * self.noise_density_w_per_hz * self.bandwidth_hz)
    }

    /// SINR of a user holding `user_bw_hz`.
    ///
    /// The user's transmit power `P_T * w_u / W` and its noise
    /// `(theta + 1) * sigma^2 * w_u` both scale with `w_u`, so the ratio is
    /// formed from power spectral densities and `w_u` never enters.
    pub fn sinr_with_share(&self, distance_m: f64, fading: f64, user_bw_hz: f64) -> f64 {
        debug_assert!(user_bw_hz > 0.0);
        let tx_psd = self.tx_power_w / self.bandwidth_hz;
        let noise_psd = (self.interference_factor + 1.0) * self.noise_density_w_per_hz;
        tx_psd * distance_m.powf(-self.pathloss_exp) * fading / noise_psd
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageRequest {
    pub class: UserClass,
    pub offload: f64,
    /// Bandwidth shared by all users of the class.
    pub allocated_bw_hz: f64,
    pub placement: MsuPlacement,
}

fn check_request(req: &OutageRequest, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Precondition("at least one sample is required".into()));
    }
    if req.allocated_bw_hz.is_nan() || req.allocated_bw_hz <= 0.0 {
        return Err(Error::Precondition(format!("allocated bandwidth must be positive, got {}", req.allocated_bw_hz)));
    }
    if !(0.0..=1.0).contains(&req.offload) {
        return Err(Error::Precondition(format!("offload fraction {} outside [0, 1]", req.offload)));
    }
    Ok(())
}

fn in_outage(link: &LinkBudget, distance_m: f64, h: f64, peers: u64, bw: f64, rate_threshold: f64) -> bool {
    let rate = bw / (peers as f64 + 1.0) * link.sinr(distance_m, h).ln_1p() / std::f64::consts::LN_2;
    rate < rate_threshold
}

/// Fraction of typical users whose rate falls below the threshold.
///
/// Each sample draws a Poisson peer count with the class mean, a distance
/// from the class geometry and an exponential fading gain.
pub fn estimate_outage(
    req: &OutageRequest,
    net: &NetworkConfig,
    qos: &QosSpec,
    traffic: &TrafficSnapshot,
    n_samples: u64,
    seed: u64,
) -> Result<BinomialEstimate> {
    check_request(req, n_samples)?;
    let link = LinkBudget::for_class(req.class, net, qos);
    let peers_mean = traffic.expected_peers(req.class, req.offload, net);
    let d_s = net.small_cell.coverage_radius_m;
    let d_m = net.macro_bs.coverage_radius_m;
    let d_ms = net.small_cell.macro_sc_distance_m;
    let draw_distance = |rng: &mut rand_chacha::ChaCha8Rng| -> f64 {
        match req.class {
            UserClass::Ssu => d_s * rng.random::<f64>().sqrt(),
            UserClass::Mmu => d_m * rng.random::<f64>().sqrt(),
            UserClass::Msu => match req.placement {
                MsuPlacement::AtSmallCell => d_ms,
                MsuPlacement::Exact => {
                    let (r, a) = uniform_in_disc(rng, d_s);
                    (d_ms + r * a.cos()).hypot(r * a.sin())
                }
            },
        }
    };

    let outages: u64 = batches(n_samples)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(stream, count)| {
            let mut rng = stream_rng(seed, stream);
            let mut hits = 0u64;
            for _ in 0..count {
                let peers = poisson(&mut rng, peers_mean);
                let d = draw_distance(&mut rng);
                let h = fading(&mut rng);
                if in_outage(&link, d, h, peers, req.allocated_bw_hz, qos.rate_threshold_bps) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    Ok(BinomialEstimate::new(outages, n_samples))
}

/// Outage over full spatial realizations: every user of the class in each of
/// `n_fields` fields is counted, with peers taken from the same field.
pub fn estimate_outage_full_field(
    req: &OutageRequest,
    net: &NetworkConfig,
    qos: &QosSpec,
    traffic: &TrafficSnapshot,
    n_fields: u64,
    seed: u64,
) -> Result<BinomialEstimate> {
    check_request(req, n_fields)?;
    traffic.validate()?;
    net.validate()?;
    let link = LinkBudget::for_class(req.class, net, qos);
    let (hits, users) = batches(n_fields)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(stream, count)| {
            let mut rng = stream_rng(seed, stream);
            let (mut hits, mut users) = (0u64, 0u64);
            for _ in 0..count {
                for u in draw_field(&mut rng, traffic, net, req.offload) {
                    if u.user_class != req.class {
                        continue;
                    }
                    users += 1;
                    if in_outage(&link, u.distance_m, u.fading, u.peers, req.allocated_bw_hz, qos.rate_threshold_bps) {
                        hits += 1;
                    }
                }
            }
            (hits, users)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(BinomialEstimate::new(hits, users))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::required_bandwidth;
    use crate::model::DerivedConstants;
    use proptest::prelude::*;

    fn setup() -> (NetworkConfig, QosSpec, DerivedConstants) {
        let net = NetworkConfig::table1();
        let qos = QosSpec::table1();
        let consts = DerivedConstants::new(&net, &qos).unwrap();
        (net, qos, consts)
    }

    fn request(class: UserClass, offload: f64, bw: f64) -> OutageRequest {
        OutageRequest { class, offload, allocated_bw_hz: bw, placement: MsuPlacement::Exact }
    }

    #[test]
    fn share_cancels_exactly() {
        let (net, qos, _) = setup();
        let link = LinkBudget::small_cell_link(&net, &qos);
        for w in [1.0, 3.7, 1e3, 180e3, 2.5e6, 1e9] {
            for (d, h) in [(10.0, 1.0), (55.5, 0.3), (99.0, 4.2)] {
                assert_eq!(link.sinr_with_share(d, h, w), link.sinr_with_share(d, h, 1.0));
                let full = link.sinr(d, h);
                assert!((link.sinr_with_share(d, h, w) / full - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn ssu_at_equality_bandwidth() {
        let (net, qos, consts) = setup();
        let traffic = TrafficSnapshot::per_km2(5.0, 60.0);
        let phi = 0.5;
        let peers = traffic.expected_peers(UserClass::Ssu, phi, &net);
        let w = required_bandwidth(UserClass::Ssu, peers, &qos, &consts);
        let est = estimate_outage(&request(UserClass::Ssu, phi, w), &net, &qos, &traffic, 5000, 1).unwrap();
        assert!((est.estimate - qos.outage_target).abs() <= 0.02, "{est:?}");
    }

    #[test]
    fn huge_bandwidth_never_fails() {
        let (net, qos, _) = setup();
        let traffic = TrafficSnapshot::per_km2(5.0, 60.0);
        let est = estimate_outage(&request(UserClass::Mmu, 0.5, 1e15), &net, &qos, &traffic, 2000, 3).unwrap();
        assert_eq!(est.successes, 0);
    }

    #[test]
    fn impossible_rate_always_fails() {
        let (net, mut qos, _) = setup();
        qos.rate_threshold_bps = 1e12;
        let traffic = TrafficSnapshot::per_km2(5.0, 60.0);
        let est = estimate_outage(&request(UserClass::Ssu, 0.5, 1e6), &net, &qos, &traffic, 2000, 3).unwrap();
        assert_eq!(est.successes, 2000);
    }

    #[test]
    fn rejects_bad_requests() {
        let (net, qos, _) = setup();
        let traffic = TrafficSnapshot::per_km2(5.0, 60.0);
        assert!(estimate_outage(&request(UserClass::Ssu, 0.5, 0.0), &net, &qos, &traffic, 10, 0).is_err());
        assert!(estimate_outage(&request(UserClass::Ssu, 0.5, 1e6), &net, &qos, &traffic, 0, 0).is_err());
    }

    #[test]
    fn placement_matters_for_msu() {
        let (net, qos, _) = setup();
        let traffic = TrafficSnapshot::per_km2(5.0, 60.0);
        let mut req = request(UserClass::Msu, 0.5, 1e6);
        let exact = estimate_outage(&req, &net, &qos, &traffic, 20_000, 5).unwrap();
        req.placement = MsuPlacement::AtSmallCell;
        let at_sc = estimate_outage(&req, &net, &qos, &traffic, 20_000, 5).unwrap();
        assert_ne!(exact.successes, at_sc.successes);
    }

    #[test]
    fn full_field_counts_class_users() {
        let (net, qos, consts) = setup();
        let traffic = TrafficSnapshot::per_km2(5.0, 60.0);
        let peers = traffic.expected_peers(UserClass::Ssu, 1.0, &net);
        let w = required_bandwidth(UserClass::Ssu, peers, &qos, &consts);
        let est = estimate_outage_full_field(&request(UserClass::Ssu, 1.0, w), &net, &qos, &traffic, 3000, 2).unwrap();
        assert!(est.trials > 0);
        assert!(est.estimate < 0.2, "{est:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn seed_reproducible(seed in any::<u64>(), phi in 0.05..1.0f64) {
            let (net, qos, _) = setup();
            let traffic = TrafficSnapshot::per_km2(5.0, 60.0);
            let req = request(UserClass::Ssu, phi, 5e5);
            let a = estimate_outage(&req, &net, &qos, &traffic, 5000, seed).unwrap();
            let b = estimate_outage(&req, &net, &qos, &traffic, 5000, seed).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
