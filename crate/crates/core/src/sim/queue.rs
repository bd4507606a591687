//! Event-driven M/D/1 simulation of the small-cell energy buffer.

use std::io::{self, Write};

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::stream_rng;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueueEventKind {
    /// Arrival to a nonempty buffer.
    Arrival,
    /// Arrival to an empty buffer; the small cell wakes up.
    Reactivation,
    /// A unit is consumed and the buffer stays nonempty.
    Consumption,
    /// The last unit is consumed; the small cell sleeps.
    Shutdown,
}

impl QueueEventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Arrival => "arrival",
            Self::Reactivation => "reactivation",
            Self::Consumption => "consumption",
            Self::Shutdown => "shutdown",
        }
    }
}

/// State right after an event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueueEvent {
    pub time_s: f64,
    pub queue_len: u64,
    pub kind: QueueEventKind,
}

impl QueueEvent {
    pub fn sc_active(&self) -> bool {
        self.queue_len > 0
    }
}

/// Infinite event stream of the buffer, starting empty at time zero.
pub struct EnergyQueueSim {
    rng: ChaCha8Rng,
    inter_arrival: Exp<f64>,
    service_s: f64,
    len: u64,
    next_arrival: f64,
    next_departure: f64,
}

impl EnergyQueueSim {
    pub fn new(lambda_e: f64, mu_e: f64, seed: u64) -> Result<Self> {
        if !(lambda_e > 0.0 && lambda_e.is_finite()) || !(mu_e > 0.0 && mu_e.is_finite()) {
            return Err(Error::Precondition(format!("rates must be positive, got lambda {lambda_e}, mu {mu_e}")));
        }
        let mut rng = stream_rng(seed, 0);
        let inter_arrival = Exp::new(lambda_e).expect("positive rate");
        let next_arrival = inter_arrival.sample(&mut rng);
        Ok(Self { rng, inter_arrival, service_s: 1.0 / mu_e, len: 0, next_arrival, next_departure: f64::INFINITY })
    }

    /// Time of the next event without advancing.
    pub fn peek_time(&self) -> f64 {
        self.next_arrival.min(self.next_departure)
    }

    pub fn queue_len(&self) -> u64 {
        self.len
    }

    fn draw_gap(&mut self) -> f64 {
        self.inter_arrival.sample(&mut self.rng)
    }
}

impl Iterator for EnergyQueueSim {
    type Item = QueueEvent;

    fn next(&mut self) -> Option<QueueEvent> {
        if self.next_arrival <= self.next_departure {
            let t = self.next_arrival;
            self.len += 1;
            let kind = if self.len == 1 {
                self.next_departure = t + self.service_s;
                QueueEventKind::Reactivation
            } else {
                QueueEventKind::Arrival
            };
            self.next_arrival = t + self.draw_gap();
            Some(QueueEvent { time_s: t, queue_len: self.len, kind })
        } else {
            let t = self.next_departure;
            self.len -= 1;
            let kind = if self.len == 0 {
                self.next_departure = f64::INFINITY;
                QueueEventKind::Shutdown
            } else {
                self.next_departure = t + self.service_s;
                QueueEventKind::Consumption
            };
            Some(QueueEvent { time_s: t, queue_len: self.len, kind })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueTrace {
    pub empirical_p_off: f64,
    pub empirical_p_one: f64,
    pub empirical_shutdown_rate: f64,
    pub events: u64,
    pub seed: u64,
    pub horizon_s: f64,
    pub arrivals: u64,
    pub shutdowns: u64,
    pub reactivations: u64,
    /// Time spent with an empty buffer.
    pub off_time_s: f64,
}

#[derive(Default)]
struct Accumulator {
    t: f64,
    len: u64,
    off: f64,
    one: f64,
    events: u64,
    arrivals: u64,
    shutdowns: u64,
    reactivations: u64,
}

impl Accumulator {
    fn hold_until(&mut self, t: f64) {
        let dt = t - self.t;
        match self.len {
            0 => self.off += dt,
            1 => self.one += dt,
            _ => {}
        }
        self.t = t;
    }

    fn record(&mut self, e: &QueueEvent) {
        self.hold_until(e.time_s);
        self.len = e.queue_len;
        self.events += 1;
        match e.kind {
            QueueEventKind::Arrival => self.arrivals += 1,
            QueueEventKind::Reactivation => {
                self.arrivals += 1;
                self.reactivations += 1;
            }
            QueueEventKind::Shutdown => self.shutdowns += 1,
            QueueEventKind::Consumption => {}
        }
    }

    fn finish(self, seed: u64) -> QueueTrace {
        let h = self.t;
        let frac = |x: f64| if h > 0.0 { x / h } else { 0.0 };
        QueueTrace {
            empirical_p_off: frac(self.off),
            empirical_p_one: frac(self.one),
            empirical_shutdown_rate: frac(self.shutdowns as f64),
            events: self.events,
            seed,
            horizon_s: h,
            arrivals: self.arrivals,
            shutdowns: self.shutdowns,
            reactivations: self.reactivations,
            off_time_s: self.off,
        }
    }
}

/// Runs until the `n_arrivals`-th arrival; the horizon ends at that arrival.
///
/// `on_event` sees every event in time order, e.g. for trace export.
pub fn simulate_energy_queue_with<F: FnMut(&QueueEvent)>(
    lambda_e: f64,
    mu_e: f64,
    n_arrivals: u64,
    seed: u64,
    mut on_event: F,
) -> Result<QueueTrace> {
    if n_arrivals == 0 {
        return Err(Error::Precondition("at least one arrival is required".into()));
    }
    let mut acc = Accumulator::default();
    for e in EnergyQueueSim::new(lambda_e, mu_e, seed)? {
        acc.record(&e);
        on_event(&e);
        if acc.arrivals == n_arrivals {
            break;
        }
    }
    Ok(acc.finish(seed))
}

pub fn simulate_energy_queue(lambda_e: f64, mu_e: f64, n_arrivals: u64, seed: u64) -> Result<QueueTrace> {
    simulate_energy_queue_with(lambda_e, mu_e, n_arrivals, seed, |_| {})
}

/// Runs over the fixed window `[0, horizon_s]`.
pub fn simulate_energy_queue_until(lambda_e: f64, mu_e: f64, horizon_s: f64, seed: u64) -> Result<QueueTrace> {
    if !(horizon_s > 0.0 && horizon_s.is_finite()) {
        return Err(Error::Precondition(format!("horizon must be positive, got {horizon_s}")));
    }
    let mut sim = EnergyQueueSim::new(lambda_e, mu_e, seed)?;
    let mut acc = Accumulator::default();
    while sim.peek_time() <= horizon_s {
        let e = sim.next().expect("event stream is infinite");
        acc.record(&e);
    }
    acc.hold_until(horizon_s);
    Ok(acc.finish(seed))
}

/// Writes `time_s,queue_len,sc_state,event_type` rows.
pub fn write_trace_csv<W: Write>(mut out: W, events: &[QueueEvent]) -> io::Result<()> {
    writeln!(out, "time_s,queue_len,sc_state,event_type")?;
    for e in events {
        let state = if e.sc_active() { "on" } else { "off" };
        writeln!(out, "{},{},{},{}", e.time_s, e.queue_len, state, e.kind.as_str())?;
    }
    Ok(())
}
