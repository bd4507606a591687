//! Spatial user realizations. The macro sits at the origin and the small
//! cell at `(D_ms, 0)`.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use serde::{Deserialize, Serialize};

use super::stream_rng;
use crate::error::Result;
use crate::model::{NetworkConfig, TrafficSnapshot, UserClass};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserSample {
    pub user_class: UserClass,
    /// Distance to the serving station.
    pub distance_m: f64,
    /// Unit-mean exponential power fading.
    pub fading: f64,
    /// Other users of the same class in the realization.
    pub peers: u64,
    pub x_m: f64,
    pub y_m: f64,
}

pub(crate) fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if mean > 0.0 {
        // rand_distr returns the count as f64
        Poisson::new(mean).expect("finite positive mean").sample(rng) as u64
    } else {
        0
    }
}

pub(crate) fn fading<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let h: f64 = Exp1.sample(rng);
        if h > 0.0 {
            return h;
        }
    }
}

/// Uniform point in a disc of `radius`, as `(r, angle)`.
pub(crate) fn uniform_in_disc<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> (f64, f64) {
    let r = radius * rng.random::<f64>().sqrt();
    let a = std::f64::consts::TAU * rng.random::<f64>();
    (r, a)
}

/// Draws one realization of every user in the macro cell.
///
/// Users inside the small-cell disc are offloaded independently with
/// probability `offload`. Macro-only users are uniform over the macro disc
/// minus the small-cell disc.
pub fn sample_user_field(
    traffic: &TrafficSnapshot,
    net: &NetworkConfig,
    offload: f64,
    seed: u64,
) -> Result<Vec<UserSample>> {
    traffic.validate()?;
    net.validate()?;
    let mut rng = stream_rng(seed, 0);
    Ok(draw_field(&mut rng, traffic, net, offload))
}

pub(crate) fn draw_field<R: Rng + ?Sized>(
    rng: &mut R,
    traffic: &TrafficSnapshot,
    net: &NetworkConfig,
    offload: f64,
) -> Vec<UserSample> {
    let d_s = net.small_cell.coverage_radius_m;
    let d_m = net.macro_bs.coverage_radius_m;
    let d_ms = net.small_cell.macro_sc_distance_m;

    let n_sc = poisson(rng, traffic.sc_user_mean(net));
    let n_mm = poisson(rng, traffic.macro_density * (net.macro_bs.area_m2() - net.small_cell.area_m2()));

    let mut users = Vec::with_capacity((n_sc + n_mm) as usize);
    for _ in 0..n_sc {
        let (r, a) = uniform_in_disc(rng, d_s);
        let (x, y) = (d_ms + r * a.cos(), r * a.sin());
        let offloaded = rng.random::<f64>() < offload;
        let (user_class, distance_m) = if offloaded { (UserClass::Ssu, r) } else { (UserClass::Msu, x.hypot(y)) };
        users.push(UserSample { user_class, distance_m, fading: fading(rng), peers: 0, x_m: x, y_m: y });
    }
    let mut placed = 0;
    while placed < n_mm {
        let (r, a) = uniform_in_disc(rng, d_m);
        let (x, y) = (r * a.cos(), r * a.sin());
        if (x - d_ms).hypot(y) < d_s {
            continue;
        }
        users.push(UserSample {
            user_class: UserClass::Mmu,
            distance_m: r,
            fading: fading(rng),
            peers: 0,
            x_m: x,
            y_m: y,
        });
        placed += 1;
    }

    let count = |c: UserClass| users.iter().filter(|u| u.user_class == c).count() as u64;
    let (ssu, msu, mmu) = (count(UserClass::Ssu), count(UserClass::Msu), count(UserClass::Mmu));
    for u in &mut users {
        let n = match u.user_class {
            UserClass::Ssu => ssu,
            UserClass::Msu => msu,
            UserClass::Mmu => mmu,
        };
        u.peers = n - 1;
    }
    users
}
