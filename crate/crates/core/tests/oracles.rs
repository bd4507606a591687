//! Cross-module checks of the analytic chain against the simulators.

use shaper_core::eots::{eots_decision, greedy_decision};
use shaper_core::power::{ongrid_power_active, ongrid_power_sc_off};
use shaper_core::queue::md1_p_one;
use shaper_core::sim::{
    estimate_outage, sample_user_field, simulate_energy_queue, simulate_policy, MsuPlacement, OutageRequest,
};
use shaper_core::{DerivedConstants, EnergyConfig, NetworkConfig, QosSpec, TrafficSnapshot, UserClass};

fn table1() -> (NetworkConfig, QosSpec, DerivedConstants) {
    let net = NetworkConfig::table1();
    let qos = QosSpec::table1();
    let consts = DerivedConstants::new(&net, &qos).unwrap();
    (net, qos, consts)
}

#[test]
fn frozen_constants() {
    // independent evaluation of the edge efficiencies and cost constants
    let (_, _, c) = table1();
    for (got, want) in [
        (c.tau_ssu, 0.244125),
        (c.tau_msu, 0.675442),
        (c.tau_mmu, 0.350186),
        (c.zeta_ee, 2.07414),
        (c.kappa_w, 117.5435),
    ] {
        assert!((got / want - 1.0).abs() < 5e-6, "{got} vs {want}");
    }
}

#[test]
fn queue_occupancy_matches_closed_forms() {
    for load in [0.2, 0.45, 0.8] {
        let t = simulate_energy_queue(load * 2.0, 2.0, 300_000, 17).unwrap();
        assert!((t.empirical_p_off - (1.0 - load)).abs() < 0.01, "{load}: {t:?}");
        assert!((t.empirical_p_one - md1_p_one(load)).abs() < 0.01, "{load}: {t:?}");
    }
}

#[test]
fn simulated_shutdowns_follow_empty_arrivals() {
    // a busy period starts with every arrival that finds the buffer empty and
    // ends with one shutdown
    for load in [0.3, 0.7] {
        let t = simulate_energy_queue(load, 1.0, 500_000, 23).unwrap();
        let expected = load * (1.0 - load);
        assert!((t.empirical_shutdown_rate / expected - 1.0).abs() < 0.02, "{load}: {t:?}");
    }
}

#[test]
fn rollout_of_optimal_decision() {
    let (net, qos, consts) = table1();
    let traffic = TrafficSnapshot::per_km2(5.0, 60.0);
    let energy = EnergyConfig::new(45.0, 1.0, 0.0).unwrap();
    let d = eots_decision(&traffic, &energy, &net, &qos).unwrap();
    assert!(d.activate_sc);
    let ledger = simulate_policy(&traffic, &energy, &net, &qos, &d, 1e5 / 45.0, 2).unwrap();
    let analytic = ongrid_power_active(&d.operating, &net);
    assert!((ledger.mean_power_w / analytic - 1.0).abs() < 0.02);
    let p_off = ongrid_power_sc_off(&traffic, &net, &qos, &consts).unwrap();
    assert!(ledger.mean_power_w < p_off);
}

#[test]
fn eots_never_loses_to_greedy() {
    let (net, qos, _) = table1();
    for rho_s in [10.0, 60.0, 100.0] {
        for lambda in [0.0, 20.0, 57.0, 90.0] {
            for c_ho in [0.0, 0.5, 4.0] {
                let traffic = TrafficSnapshot::per_km2(5.0, rho_s);
                let energy = EnergyConfig::new(lambda, 1.0, c_ho).unwrap();
                let e = eots_decision(&traffic, &energy, &net, &qos).unwrap();
                let g = greedy_decision(&traffic, &energy, &net, &qos).unwrap();
                assert!(e.predicted_gain_w >= g.predicted_gain_w - 1e-9);
                assert!(e.predicted_gain_w >= 0.0);
            }
        }
    }
}

#[test]
fn mmu_outage_at_equality_bandwidth() {
    let (net, qos, consts) = table1();
    let traffic = TrafficSnapshot::per_km2(20.0, 60.0);
    let w = shaper_core::model::required_bandwidth(UserClass::Mmu, traffic.mmu_mean(&net), &qos, &consts);
    let req = OutageRequest { class: UserClass::Mmu, offload: 0.5, allocated_bw_hz: w, placement: MsuPlacement::Exact };
    let est = estimate_outage(&req, &net, &qos, &traffic, 50_000, 8).unwrap();
    assert!((est.estimate - qos.outage_target).abs() < 0.02, "{est:?}");
    assert!(est.ci_low <= est.estimate && est.estimate <= est.ci_high);
}

#[test]
fn msu_site_approximation_matches_its_closed_form() {
    let (net, qos, _) = table1();
    let traffic = TrafficSnapshot::per_km2(5.0, 60.0);
    let peers = traffic.expected_peers(UserClass::Msu, 0.5, &net);
    let closed = shaper_core::model::outage_closed_form(UserClass::Msu, 1e6, peers, &net, &qos);
    let req = OutageRequest {
        class: UserClass::Msu,
        offload: 0.5,
        allocated_bw_hz: 1e6,
        placement: MsuPlacement::AtSmallCell,
    };
    let est = estimate_outage(&req, &net, &qos, &traffic, 100_000, 4).unwrap();
    assert!((est.estimate - closed).abs() < 0.01, "{} vs {closed}", est.estimate);
}

#[test]
fn field_counts_follow_densities() {
    let (net, _, _) = table1();
    let traffic = TrafficSnapshot::per_km2(5.0, 60.0);
    let draws = 4000;
    let mut mmu = 0usize;
    for seed in 0..draws {
        let users = sample_user_field(&traffic, &net, 0.5, seed).unwrap();
        mmu += users.iter().filter(|u| u.user_class == UserClass::Mmu).count();
    }
    let mean = mmu as f64 / draws as f64;
    let expected = traffic.mmu_mean(&net);
    let se = (expected / draws as f64).sqrt();
    assert!((mean - expected).abs() < 4.0 * se, "{mean} vs {expected}");
}
