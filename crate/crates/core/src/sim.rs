//! The closed loop. Each epoch runs, for every alive UAV in id order: expert
//! evaluation, planning, the jump-grid step and sensing; then the
//! communication barrier (deliver, merge, replay), scripted events, denied
//! area motion and a metrics frame.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::comms::{self, LocalStore, MessagePackage, PoseRecord, RadioNode, TargetRecord};
use crate::expert::{closest_target_distance, ExpertInputs, ExpertOutput};
use crate::grid_world::{
    advance_denied_areas, apply_detection_footprint, DeniedArea, FootprintCache, FovGeometry,
    GridSpec, Prior, SearchMap, SensorModel, Target, Vec2,
};
use crate::jump_grid::{self, GridPose};
use crate::objective::{Constraints, RevenueContext};
use crate::planner::{Decision, Planner};
use crate::scenario::{EventSpec, Platform, Scenario, ScenarioError, Strategy, UavKind};

/// Wall-clock source for GA timing. Simulation results never depend on it.
pub trait Clock {
    fn seconds(&self) -> f64;
}

/// A clock that always reads zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn seconds(&self) -> f64 {
        0.0
    }
}

const DENIED_STREAM: u64 = 1 << 32;

/// Per-UAV state inside a running simulation.
#[derive(Debug, Clone)]
pub struct UavAgent {
    pub id: u32,
    pub slot: usize,
    pub kind: UavKind,
    pub pose: GridPose,
    pub alive: bool,
    pub altitude: f64,
    pub com_distance: f64,
    pub j_range: RangeInclusive<u32>,
    pub map: SearchMap,
    pub store: LocalStore,
    pub expert: Option<ExpertOutput>,
    pub trajectory_length: f64,
    platform: Platform,
    planner: Planner,
    plan_rng: ChaCha8Rng,
    sense_rng: ChaCha8Rng,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavMetrics {
    pub id: u32,
    pub alive: bool,
    pub chi: f64,
    pub p: f64,
    pub length: f64,
    pub found: usize,
}

/// Search state after one epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsFrame {
    pub t: u32,
    pub global_chi: f64,
    pub global_p: f64,
    pub targets_found: usize,
    pub uavs: Vec<UavMetrics>,
    /// Links between alive UAVs this epoch.
    pub links: usize,
    /// Cumulative counts of UAVs found out of bounds or inside a denied area.
    pub violations: u32,
    pub emergency_violations: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: u32,
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub j: u32,
    pub u: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRow {
    pub t: u32,
    pub id: u32,
    pub j_expert: u32,
    pub j_used: u32,
    pub m: usize,
    pub generations: usize,
    pub evaluations: usize,
    pub best: f64,
    pub min: f64,
    pub max: f64,
    pub emergency: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub t: u32,
    pub id: u32,
    pub j_used: u32,
    pub m: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpertRow {
    pub t: u32,
    pub id: u32,
    pub e1: f64,
    pub e2: f64,
    pub j: u32,
    pub kw1: f64,
    pub kw2: f64,
    pub kw3: f64,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkRow {
    pub t: u32,
    pub a: u32,
    pub b: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRow {
    pub t: u32,
    pub id: u32,
    pub kind: String,
    pub detail: String,
}

/// One receiver's communication outcome in one epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactRow {
    pub t: u32,
    pub id: u32,
    pub peers: usize,
    pub replayed_poses: usize,
    pub dropped_records: usize,
    pub chi_before: f64,
    pub chi_after: f64,
    /// `χ` decrease predicted by the replay accounting.
    pub chi_accounted: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimOutput {
    pub strategy: Option<Strategy>,
    pub seed: u64,
    pub metrics: Vec<MetricsFrame>,
    pub trajectory: Vec<TrajectoryRow>,
    pub decisions: Vec<DecisionRow>,
    pub timing: Vec<TimingRow>,
    pub expert: Vec<ExpertRow>,
    pub links: Vec<LinkRow>,
    pub events: Vec<EventRow>,
    pub contacts: Vec<ContactRow>,
    pub decode_failures: u32,
}

impl SimOutput {
    pub fn final_frame(&self) -> Option<&MetricsFrame> {
        self.metrics.last()
    }

    /// First epoch at which every target had been discovered.
    pub fn all_found_at(&self, n_targets: usize) -> Option<u32> {
        self.metrics
            .iter()
            .find(|f| f.targets_found >= n_targets)
            .map(|f| f.t)
    }

    /// Epochs with at least one link between distinct alive UAVs.
    pub fn contact_epochs(&self) -> usize {
        self.metrics.iter().filter(|f| f.links > 0).count()
    }

    pub fn emergencies(&self) -> usize {
        self.decisions.iter().filter(|d| d.emergency).count()
    }
}

pub struct Simulation {
    scenario: Scenario,
    grid: GridSpec,
    sensor: SensorModel,
    t: u32,
    agents: Vec<UavAgent>,
    targets: Vec<Target>,
    denied: Vec<DeniedArea>,
    global: SearchMap,
    caches: Vec<Option<FootprintCache>>,
    violations: u32,
    emergency_violations: u32,
    clock: Box<dyn Clock>,
    out: SimOutput,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl Simulation {
    pub fn new(scenario: &Scenario) -> Result<Simulation, ScenarioError> {
        Simulation::with_clock(scenario, Box::new(NoClock))
    }

    pub fn with_clock(
        scenario: &Scenario,
        clock: Box<dyn Clock>,
    ) -> Result<Simulation, ScenarioError> {
        scenario.validate()?;
        let grid = scenario.grid()?;
        let sensor = scenario.search.sensor;
        let priors: Vec<Prior> = scenario
            .targets
            .iter()
            .map(|t| Prior {
                position: t.prior_position(),
                c: t.c,
                v: t.v,
            })
            .collect();
        let base_map =
            SearchMap::init_probability(grid, &priors, 0).map_err(|e| ScenarioError {
                issues: alloc::vec![crate::scenario::Issue {
                    path: "targets".into(),
                    message: alloc::string::ToString::to_string(&e)
                }],
            })?;
        let roster = scenario.roster();
        let n = roster.len();
        let mut agents = Vec::with_capacity(n);
        let mut caches = Vec::with_capacity(n);
        for (slot, spec) in roster.iter().enumerate() {
            let platform = scenario.platforms.get(spec.kind).clone();
            let j_range = scenario.j_range(spec.kind).unwrap_or(1..=1);
            let j0 = platform.initial_j.unwrap_or(*j_range.end());
            let position = spec.position.unwrap_or_else(|| scenario.centroid());
            let cell = grid.cell_of(position);
            let mut map = base_map.clone();
            map.owner = spec.id;
            let fov = platform.fov.unwrap_or(FovGeometry {
                length: 0.0,
                width: 0.0,
                forward_offset: 0.0,
            });
            caches.push(platform.fov.map(|f| FootprintCache::new(grid.cell_size, f)));
            let stream = 2 * spec.id as u64;
            agents.push(UavAgent {
                id: spec.id,
                slot,
                kind: spec.kind,
                pose: GridPose::new(cell, spec.heading, j0),
                alive: true,
                altitude: platform.altitude,
                com_distance: if scenario.strategy.limits_range() {
                    platform.com_distance
                } else {
                    f64::INFINITY
                },
                j_range,
                map,
                store: LocalStore::new(
                    spec.id,
                    n,
                    scenario.targets.len(),
                    scenario.search.history_len,
                ),
                expert: None,
                trajectory_length: 0.0,
                planner: Planner::new(grid.cell_size, fov, grid.cell_count()),
                platform,
                plan_rng: stream_rng(scenario.seed, stream),
                sense_rng: stream_rng(scenario.seed, stream + 1),
            });
        }
        let mut denied_rng = stream_rng(scenario.seed, DENIED_STREAM);
        let denied = scenario
            .denied_areas
            .iter()
            .map(|d| {
                let fallback = denied_rng.gen_range(-180.0..180.0);
                d.build(fallback).expect("validated shape")
            })
            .collect();
        let targets = scenario
            .targets
            .iter()
            .enumerate()
            .map(|(i, t)| Target {
                id: i as u32,
                position: t.position,
                prior: t.prior_position(),
                discovered_at: None,
            })
            .collect();
        let mut global = base_map;
        global.owner = 0;
        let mut sim = Simulation {
            scenario: scenario.clone(),
            grid,
            sensor,
            t: 0,
            agents,
            targets,
            denied,
            global,
            caches,
            violations: 0,
            emergency_violations: 0,
            clock,
            out: SimOutput {
                strategy: Some(scenario.strategy),
                seed: scenario.seed,
                ..SimOutput::default()
            },
        };
        let frame = sim.frame(0);
        sim.out.metrics.push(frame);
        Ok(sim)
    }

    pub fn time(&self) -> u32 {
        self.t
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn agents(&self) -> &[UavAgent] {
        &self.agents
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn denied_areas(&self) -> &[DeniedArea] {
        &self.denied
    }

    pub fn global_map(&self) -> &SearchMap {
        &self.global
    }

    pub fn output(&self) -> &SimOutput {
        &self.out
    }

    pub fn is_finished(&self) -> bool {
        self.t >= self.scenario.duration
            || (self.scenario.early_exit && self.targets.iter().all(|t| t.discovered_at.is_some()))
    }

    pub fn run(mut self) -> SimOutput {
        while !self.is_finished() {
            self.step();
        }
        self.out
    }

    /// Stop here and hand over the logs collected so far.
    pub fn finish(self) -> SimOutput {
        self.out
    }

    /// Advance one epoch and return its metrics.
    pub fn step(&mut self) -> &MetricsFrame {
        self.t += 1;
        let t = self.t;
        for slot in 0..self.agents.len() {
            if self.agents[slot].alive {
                self.act(slot, t);
            }
        }
        self.communicate(t);
        self.apply_events(t);
        advance_denied_areas(
            &mut self.denied,
            self.scenario.dt,
            self.grid.width(),
            self.grid.height(),
        );
        let frame = self.frame(t);
        self.out.metrics.push(frame);
        self.out.metrics.last().expect("frame just pushed")
    }

    /// Expert, plan, move and sense for one UAV.
    fn act(&mut self, slot: usize, t: u32) {
        let grid = self.grid;
        let tables = &self.scenario.expert_tables;
        let agent = &self.agents[slot];
        let here = grid.center(agent.pose.cell);

        let references: Vec<Vec2> = self
            .targets
            .iter()
            .enumerate()
            .map(|(k, tg)| agent.store.targets()[k].map_or(tg.prior, |r| r.position()))
            .collect();
        let inputs = ExpertInputs {
            b: closest_target_distance(here, &references),
            found: agent.store.found_count(),
            total: self.targets.len(),
        };
        let expert = match agent.platform.fixed_plan {
            Some(f) => ExpertOutput {
                e1: inputs.e1(tables.b_star),
                e2: inputs.e2(),
                j: f.j,
                kw1: 1.0,
                kw2: 1.0,
                kw3: 1.0,
                m: f.m,
            },
            None => agent.platform.expert.apply(
                tables.eval(&inputs),
                *agent.j_range.start(),
                *agent.j_range.end(),
            ),
        };
        self.out.expert.push(ExpertRow {
            t,
            id: agent.id,
            e1: expert.e1,
            e2: expert.e2,
            j: expert.j,
            kw1: expert.kw1,
            kw2: expert.kw2,
            kw3: expert.kw3,
            m: expert.m,
        });

        let perceived: Vec<DeniedArea> = if agent.platform.avoid_denied {
            self.denied
                .iter()
                .filter(|a| a.signed_distance(here) <= agent.platform.perc_distance)
                .cloned()
                .collect()
        } else {
            Vec::new()
        };
        let constraints = Constraints {
            grid,
            denied: &perceived,
            dt: self.scenario.dt,
        };
        let ga = *self.scenario.ga.get(agent.kind);
        let j_min = *agent.j_range.start();
        let alive: Vec<bool> = self.agents.iter().map(|a| a.alive).collect();
        let kinds: Vec<UavKind> = self.agents.iter().map(|a| a.kind).collect();

        let agent = &mut self.agents[slot];
        let decision: Decision = match agent.kind {
            UavKind::Rotor => {
                let peers: Vec<Vec2> = (0..kinds.len())
                    .filter(|&s| s != slot && alive[s] && kinds[s] == agent.kind)
                    .filter_map(|s| agent.store.latest(s).map(|r| r.position()))
                    .collect();
                let angle: f64 = agent.plan_rng.gen_range(-180.0..180.0);
                let ctx = RevenueContext {
                    map: &agent.map,
                    peers: &peers,
                    weights: self
                        .scenario
                        .search
                        .weights
                        .with_corrections(expert.kw1, expert.kw2, expert.kw3),
                    repulsion: self.scenario.search.repulsion,
                    coincident: Vec2::from_heading(angle),
                };
                agent.planner.decide(
                    &ctx,
                    &constraints,
                    &agent.pose,
                    expert.j,
                    j_min,
                    expert.m,
                    &ga,
                    &mut agent.plan_rng,
                    &*self.clock,
                )
            }
            UavKind::FixedWing => {
                let rotors: Vec<Vec2> = (0..kinds.len())
                    .filter(|&s| alive[s] && kinds[s] == UavKind::Rotor)
                    .filter_map(|s| agent.store.latest(s).map(|r| r.position()))
                    .collect();
                let goal = (!rotors.is_empty()).then(|| {
                    let sum = rotors.iter().fold(Vec2::ZERO, |acc, &p| acc + p);
                    sum * (1.0 / rotors.len() as f64)
                });
                agent.planner.relay_plan(
                    &constraints,
                    &agent.pose,
                    goal,
                    expert.j,
                    j_min,
                    expert.m,
                    &ga,
                    &mut agent.plan_rng,
                    &*self.clock,
                )
            }
        };
        agent.expert = Some(expert);
        self.out.decisions.push(DecisionRow {
            t,
            id: agent.id,
            j_expert: expert.j,
            j_used: decision.j_used,
            m: decision.horizon,
            generations: decision.generations,
            evaluations: decision.evaluations,
            best: decision.best.score(),
            min: decision.min_score,
            max: decision.max_score,
            emergency: decision.emergency,
        });
        self.out.timing.push(TimingRow {
            t,
            id: agent.id,
            j_used: decision.j_used,
            m: decision.horizon,
            seconds: decision.ga_seconds,
        });
        if decision.emergency {
            self.out.events.push(EventRow {
                t,
                id: agent.id,
                kind: "emergency".into(),
                detail: alloc::format!("u={}", decision.action),
            });
        }

        let mut next = jump_grid::step(&agent.pose, decision.action as i32, decision.j_used);
        let mut violated = false;
        if !grid.contains(next.cell) {
            violated = true;
            next.cell.x = next.cell.x.clamp(1, grid.cols as i32);
            next.cell.y = next.cell.y.clamp(1, grid.rows as i32);
        }
        let there = grid.center(next.cell);
        if agent.platform.avoid_denied && self.denied.iter().any(|a| a.contains(there)) {
            violated = true;
        }
        if violated {
            if decision.emergency {
                self.emergency_violations += 1;
            } else {
                self.violations += 1;
            }
            self.out.events.push(EventRow {
                t,
                id: agent.id,
                kind: "violation".into(),
                detail: alloc::format!(
                    "x={:.1} y={:.1} emergency={}",
                    there.x,
                    there.y,
                    decision.emergency
                ),
            });
        }
        agent.trajectory_length += here.distance(there);
        agent.pose = next;
        self.out.trajectory.push(TrajectoryRow {
            t,
            id: agent.id,
            x: there.x,
            y: there.y,
            heading: next.heading,
            j: decision.j_used,
            u: decision.action,
        });

        if let Some(cache) = self.caches[slot].as_mut() {
            let mut cells = Vec::new();
            cache.covered_indices(&grid, next.cell, next.heading, &mut cells);
            let report = apply_detection_footprint(
                &mut agent.map,
                &cells,
                &mut self.targets,
                &self.sensor,
                t as f64,
                &mut agent.sense_rng,
            );
            for obs in &report.observations {
                self.global.observe(obs.index, obs.detected, &self.sensor);
            }
            for &k in &report.discoveries {
                let c = grid.center(grid.cell_of(self.targets[k].position));
                let rec = TargetRecord {
                    x: c.x as f32,
                    y: c.y as f32,
                    t: t as f32,
                };
                if agent.store.targets()[k].is_none() && agent.store.record_target(k, rec) {
                    self.out.events.push(EventRow {
                        t,
                        id: agent.id,
                        kind: "discovery".into(),
                        detail: alloc::format!("target={}", k + 1),
                    });
                }
            }
        }
        agent.store.push_pose(
            slot,
            PoseRecord {
                x: there.x as f32,
                y: there.y as f32,
                heading: next.heading as f32,
                t: t as f32,
            },
        );
    }

    /// Snapshot packages, link, merge per receiver in id order, then replay.
    fn communicate(&mut self, t: u32) {
        let nodes: Vec<RadioNode> = self
            .agents
            .iter()
            .filter(|a| a.alive)
            .map(|a| RadioNode {
                slot: a.slot,
                position: self.grid.center(a.pose.cell),
                altitude: a.altitude,
                range: a.com_distance,
            })
            .collect();
        let links = comms::compute_links(&nodes);
        for l in &links {
            self.out.links.push(LinkRow {
                t,
                a: self.agents[l.a].id,
                b: self.agents[l.b].id,
            });
        }
        let wire: Vec<Option<Vec<u8>>> = self
            .agents
            .iter()
            .map(|a| a.alive.then(|| a.store.encode()))
            .collect();
        for slot in 0..self.agents.len() {
            if !self.agents[slot].alive {
                continue;
            }
            let mut peers: Vec<usize> = links
                .iter()
                .filter_map(|l| {
                    if l.a == slot {
                        Some(l.b)
                    } else if l.b == slot {
                        Some(l.a)
                    } else {
                        None
                    }
                })
                .collect();
            if peers.is_empty() {
                continue;
            }
            peers.sort_unstable();
            let agent = &mut self.agents[slot];
            let mut merged = comms::MergeReport::default();
            for &peer in &peers {
                let Some(bytes) = wire[peer].as_ref() else {
                    continue;
                };
                match MessagePackage::decode(bytes).and_then(|pkg| agent.store.merge(&pkg)) {
                    Ok(rep) => merged.absorb(rep),
                    Err(e) => {
                        self.out.decode_failures += 1;
                        self.out.events.push(EventRow {
                            t,
                            id: agent.id,
                            kind: "decode_failure".into(),
                            detail: alloc::format!("{e}"),
                        });
                    }
                }
            }
            merged.sort();
            let chi_before = agent.map.total_uncertainty();
            let rep = comms::replay_detections(
                &mut agent.map,
                &merged.replay,
                &mut self.caches,
                agent.store.targets(),
                &self.sensor,
            );
            let chi_after = agent.map.total_uncertainty();
            self.out.contacts.push(ContactRow {
                t,
                id: agent.id,
                peers: peers.len(),
                replayed_poses: rep.poses,
                dropped_records: merged.dropped,
                chi_before,
                chi_after,
                chi_accounted: rep.chi_decrease,
            });
        }
    }

    fn apply_events(&mut self, t: u32) {
        for ev in self.scenario.events.iter().filter(|e| e.time() == t) {
            let Some(agent) = self.agents.iter_mut().find(|a| a.id == ev.uav()) else {
                continue;
            };
            match ev {
                EventSpec::Dropout { .. } => {
                    if agent.alive {
                        agent.alive = false;
                        self.out.events.push(EventRow {
                            t,
                            id: agent.id,
                            kind: "dropout".into(),
                            detail: String::new(),
                        });
                    }
                }
                EventSpec::RangeChange { com_distance, .. } => {
                    if self.scenario.strategy.limits_range() {
                        agent.com_distance = *com_distance;
                    }
                    self.out.events.push(EventRow {
                        t,
                        id: agent.id,
                        kind: "range_change".into(),
                        detail: alloc::format!("com_distance={com_distance}"),
                    });
                }
            }
        }
    }

    fn frame(&self, t: u32) -> MetricsFrame {
        let links = self.out.links.iter().rev().take_while(|l| l.t == t).count();
        MetricsFrame {
            t,
            global_chi: self.global.total_uncertainty(),
            global_p: self.global.total_probability(),
            targets_found: self
                .targets
                .iter()
                .filter(|tg| tg.discovered_at.is_some())
                .count(),
            uavs: self
                .agents
                .iter()
                .map(|a| UavMetrics {
                    id: a.id,
                    alive: a.alive,
                    chi: if a.alive {
                        a.map.total_uncertainty()
                    } else {
                        0.0
                    },
                    p: if a.alive {
                        a.map.total_probability()
                    } else {
                        0.0
                    },
                    length: a.trajectory_length,
                    found: a.store.found_count(),
                })
                .collect(),
            links,
            violations: self.violations,
            emergency_violations: self.emergency_violations,
        }
    }
}

/// Per-epoch means across seeds for one strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub seeds: Vec<u64>,
    pub mean_chi: Vec<f64>,
    pub mean_p: Vec<f64>,
    pub final_chi: Vec<f64>,
    pub final_p: Vec<f64>,
    pub final_found: Vec<usize>,
}

/// Run every `(strategy, seed)` pair and average the global search state
/// per epoch.
pub fn compare_strategies(
    base: &Scenario,
    strategies: &[Strategy],
    seeds: &[u64],
    mut clock: impl FnMut() -> Box<dyn Clock>,
    mut on_run: impl FnMut(Strategy, u64, &SimOutput),
) -> Result<Vec<StrategySummary>, ScenarioError> {
    let mut out = Vec::new();
    for &strategy in strategies {
        let mut summary = StrategySummary {
            strategy,
            seeds: seeds.to_vec(),
            mean_chi: Vec::new(),
            mean_p: Vec::new(),
            final_chi: Vec::new(),
            final_p: Vec::new(),
            final_found: Vec::new(),
        };
        for &seed in seeds {
            let sc = base.with_strategy(strategy).with_seed(seed);
            let run = Simulation::with_clock(&sc, clock())?.run();
            if summary.mean_chi.len() < run.metrics.len() {
                summary.mean_chi.resize(run.metrics.len(), 0.0);
                summary.mean_p.resize(run.metrics.len(), 0.0);
            }
            for (k, f) in run.metrics.iter().enumerate() {
                summary.mean_chi[k] += f.global_chi / seeds.len() as f64;
                summary.mean_p[k] += f.global_p / seeds.len() as f64;
            }
            let last = run.final_frame().expect("at least the initial frame");
            summary.final_chi.push(last.global_chi);
            summary.final_p.push(last.global_p);
            summary.final_found.push(last.targets_found);
            on_run(strategy, seed, &run);
        }
        out.push(summary);
    }
    Ok(out)
}

/// Mean of a slice, NaN when empty.
pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{Area, UavSpec};

    fn small() -> Scenario {
        let mut s = Scenario::paper();
        s.duration = 30;
        s
    }

    #[test]
    fn runs_and_is_deterministic() {
        let a = Simulation::new(&small()).unwrap().run();
        let b = Simulation::new(&small()).unwrap().run();
        assert_eq!(a.metrics.len(), 31);
        assert_eq!(a.metrics, b.metrics);
        assert_eq!(a.trajectory, b.trajectory);
    }

    #[test]
    fn unconstrained_views_agree() {
        let s = small().with_strategy(Strategy::Unconstrained);
        let out = Simulation::new(&s).unwrap().run();
        for f in &out.metrics {
            for u in f.uavs.iter().filter(|u| u.alive) {
                assert_eq!(u.chi, f.global_chi, "t={} uav={}", f.t, u.id);
            }
        }
    }

    #[test]
    fn dropout_zeroes_metrics() {
        let mut s = small();
        s.events = alloc::vec![EventSpec::Dropout { uav: 2, t: 10 }];
        let out = Simulation::new(&s).unwrap().run();
        let f = &out.metrics[20];
        let u = f.uavs.iter().find(|u| u.id == 2).unwrap();
        assert!(!u.alive);
        assert_eq!((u.chi, u.p), (0.0, 0.0));
        assert!(out
            .trajectory
            .iter()
            .filter(|r| r.id == 2)
            .all(|r| r.t <= 10));
    }

    #[test]
    fn straight_flight_length() {
        let s = Scenario {
            area: Area {
                width: 800.0,
                height: 400.0,
                cell_size: 4.0,
            },
            uavs: alloc::vec![UavSpec {
                id: 1,
                kind: UavKind::Rotor,
                position: Some(Vec2::new(100.0, 200.0)),
                heading: 0.0
            }],
            targets: Vec::new(),
            denied_areas: Vec::new(),
            events: Vec::new(),
            duration: 5,
            ..Scenario::paper()
        };
        let out = Simulation::new(&s).unwrap().run();
        let last = out.final_frame().unwrap();
        assert!(last.uavs[0].length > 0.0);
        assert_eq!(last.targets_found, 0);
        assert!(out.decisions.iter().all(|d| !d.emergency));
    }
}
