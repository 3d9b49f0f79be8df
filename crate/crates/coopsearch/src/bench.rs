//! Wall-clock cost of one planning call over a grid of jump values and
//! horizons.

use std::time::Instant;

use coopsearch_core::{Clock, FixedPlan, Scenario, ScenarioError, Simulation, UavKind};
use serde::Serialize;

/// Seconds since construction.
#[derive(Debug, Clone, Copy)]
pub struct StdClock(Instant);

impl StdClock {
    pub fn new() -> Self {
        StdClock(Instant::now())
    }
}

impl Default for StdClock {
    fn default() -> Self {
        StdClock::new()
    }
}

impl Clock for StdClock {
    fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchCell {
    pub j: u32,
    pub m: usize,
    pub calls: usize,
    pub mean_seconds: f64,
    pub max_seconds: f64,
}

/// Fly every rotor of `base` at each fixed `(j, m)` and collect the time
/// spent per planning call. `duration` defaults to the scenario's own; the
/// whole sweep is repeated `rounds` times and pooled, so slow drift in machine
/// load spreads over every cell.
pub fn ga_bench(
    base: &Scenario,
    js: &[u32],
    ms: &[usize],
    duration: Option<u32>,
    rounds: usize,
) -> Result<Vec<BenchCell>, ScenarioError> {
    let rotors: Vec<u32> = base
        .roster()
        .iter()
        .filter(|u| u.kind == UavKind::Rotor)
        .map(|u| u.id)
        .collect();
    let mut times: Vec<Vec<f64>> = vec![Vec::new(); js.len() * ms.len()];
    for _ in 0..rounds.max(1) {
        for (a, &m) in ms.iter().enumerate() {
            for (b, &j) in js.iter().enumerate() {
                let mut sc = base.clone();
                if let Some(d) = duration {
                    sc.duration = d;
                }
                sc.platforms.rotor.fixed_plan = Some(FixedPlan { j, m });
                let out = Simulation::with_clock(&sc, Box::new(StdClock::new()))?.run();
                times[a * js.len() + b].extend(
                    out.timing
                        .iter()
                        .filter(|r| rotors.contains(&r.id))
                        .map(|r| r.seconds),
                );
            }
        }
    }
    let mut cells = Vec::new();
    for (a, &m) in ms.iter().enumerate() {
        for (b, &j) in js.iter().enumerate() {
            let t = &times[a * js.len() + b];
            cells.push(BenchCell {
                j,
                m,
                calls: t.len(),
                mean_seconds: coopsearch_core::sim::mean(t),
                max_seconds: t.iter().copied().fold(0.0, f64::max),
            });
        }
    }
    Ok(cells)
}
