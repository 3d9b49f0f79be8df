//! Declarative experiment description, its defaults and validation.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expert::{ExpertAdapter, ExpertTables};
use crate::ga::GaConfig;
use crate::grid_world::{DeniedArea, DeniedShape, FovGeometry, GridSpec, SensorModel, Vec2};
use crate::jump_grid::{self, JumpParams};
use crate::math;
use crate::objective::{RepulsionParams, Weights};

/// Communication preset.
///
/// 1: rotors only, unlimited range. 2: rotors only, limited range.
/// 3: rotors plus fixed-wing relays, limited range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Strategy {
    Unconstrained = 1,
    Constrained = 2,
    Relay = 3,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [
        Strategy::Unconstrained,
        Strategy::Constrained,
        Strategy::Relay,
    ];

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn uses_fixed_wing(self) -> bool {
        self == Strategy::Relay
    }

    pub fn limits_range(self) -> bool {
        self != Strategy::Unconstrained
    }
}

impl TryFrom<u8> for Strategy {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            1 => Ok(Strategy::Unconstrained),
            2 => Ok(Strategy::Constrained),
            3 => Ok(Strategy::Relay),
            other => Err(format!("strategy must be 1, 2 or 3, got {other}")),
        }
    }
}

impl From<Strategy> for u8 {
    fn from(s: Strategy) -> u8 {
        s as u8
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", *self as u8)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UavKind {
    Rotor,
    FixedWing,
}

impl UavKind {
    pub fn name(self) -> &'static str {
        match self {
            UavKind::Rotor => "rotor",
            UavKind::FixedWing => "fixed_wing",
        }
    }
}

/// Per-kind platform parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Platform {
    pub altitude: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub a_max: f64,
    pub com_distance: f64,
    pub perc_distance: f64,
    /// Sensor footprint; `None` for platforms without a sensor.
    #[serde(default)]
    pub fov: Option<FovGeometry>,
    /// Whether denied areas constrain this platform.
    #[serde(default = "yes")]
    pub avoid_denied: bool,
    /// Starting jump value; defaults to the largest admissible one.
    #[serde(default)]
    pub initial_j: Option<u32>,
    #[serde(default)]
    pub expert: ExpertAdapter,
    /// Fly at a fixed jump value and horizon with the expert system off.
    #[serde(default)]
    pub fixed_plan: Option<FixedPlan>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPlan {
    pub j: u32,
    pub m: usize,
}

fn yes() -> bool {
    true
}

impl Platform {
    pub fn rotor() -> Self {
        Platform {
            altitude: 40.0,
            v_min: 0.0,
            v_max: 35.0,
            a_max: 10.0,
            com_distance: 160.0,
            perc_distance: 300.0,
            fov: Some(FovGeometry {
                length: 40.0,
                width: 40.0,
                forward_offset: 0.0,
            }),
            avoid_denied: true,
            initial_j: None,
            expert: ExpertAdapter::default(),
            fixed_plan: None,
        }
    }

    pub fn fixed_wing() -> Self {
        Platform {
            altitude: 200.0,
            v_min: 20.0,
            v_max: 70.0,
            a_max: 10.0,
            com_distance: 300.0,
            perc_distance: 600.0,
            fov: None,
            avoid_denied: false,
            initial_j: Some(12),
            expert: ExpertAdapter::fixed_wing(),
            fixed_plan: None,
        }
    }

    pub fn jump_params(&self, dt: f64) -> JumpParams {
        JumpParams {
            dt,
            v_min: self.v_min,
            v_max: self.v_max,
            a_max: self.a_max,
        }
    }
}

/// Platform parameters per kind. When read from a file, each kind starts from
/// its defaults and only the listed fields change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "PlatformsPatch")]
pub struct Platforms {
    pub rotor: Platform,
    pub fixed_wing: Platform,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PlatformsPatch {
    rotor: PlatformPatch,
    fixed_wing: PlatformPatch,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PlatformPatch {
    altitude: Option<f64>,
    v_min: Option<f64>,
    v_max: Option<f64>,
    a_max: Option<f64>,
    com_distance: Option<f64>,
    perc_distance: Option<f64>,
    fov: Option<FovGeometry>,
    avoid_denied: Option<bool>,
    initial_j: Option<u32>,
    expert: Option<ExpertAdapter>,
    fixed_plan: Option<FixedPlan>,
}

impl PlatformPatch {
    fn apply(self, mut p: Platform) -> Platform {
        p.altitude = self.altitude.unwrap_or(p.altitude);
        p.v_min = self.v_min.unwrap_or(p.v_min);
        p.v_max = self.v_max.unwrap_or(p.v_max);
        p.a_max = self.a_max.unwrap_or(p.a_max);
        p.com_distance = self.com_distance.unwrap_or(p.com_distance);
        p.perc_distance = self.perc_distance.unwrap_or(p.perc_distance);
        p.fov = self.fov.or(p.fov);
        p.avoid_denied = self.avoid_denied.unwrap_or(p.avoid_denied);
        p.initial_j = self.initial_j.or(p.initial_j);
        p.expert = self.expert.unwrap_or(p.expert);
        p.fixed_plan = self.fixed_plan.or(p.fixed_plan);
        p
    }
}

impl From<PlatformsPatch> for Platforms {
    fn from(patch: PlatformsPatch) -> Self {
        Platforms {
            rotor: patch.rotor.apply(Platform::rotor()),
            fixed_wing: patch.fixed_wing.apply(Platform::fixed_wing()),
        }
    }
}

impl Default for Platforms {
    fn default() -> Self {
        Platforms {
            rotor: Platform::rotor(),
            fixed_wing: Platform::fixed_wing(),
        }
    }
}

impl Platforms {
    pub fn get(&self, kind: UavKind) -> &Platform {
        match kind {
            UavKind::Rotor => &self.rotor,
            UavKind::FixedWing => &self.fixed_wing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaSection {
    pub rotor: GaConfig,
    pub fixed_wing: GaConfig,
}

impl Default for GaSection {
    fn default() -> Self {
        GaSection {
            rotor: GaConfig::rotor(),
            fixed_wing: GaConfig::fixed_wing(),
        }
    }
}

impl GaSection {
    pub fn get(&self, kind: UavKind) -> &GaConfig {
        match kind {
            UavKind::Rotor => &self.rotor,
            UavKind::FixedWing => &self.fixed_wing,
        }
    }
}

/// Objective weights, repulsion and the existence threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSection {
    pub weights: Weights,
    pub repulsion: RepulsionParams,
    pub sensor: SensorModel,
    /// Pose records kept per UAV in every local store.
    pub history_len: usize,
}

impl Default for SearchSection {
    fn default() -> Self {
        SearchSection {
            weights: Weights::default(),
            repulsion: RepulsionParams::default(),
            sensor: SensorModel::default(),
            history_len: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Area {
    pub width: f64,
    pub height: f64,
    #[serde(default = "default_cell")]
    pub cell_size: f64,
}

fn default_cell() -> f64 {
    4.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavSpec {
    pub id: u32,
    pub kind: UavKind,
    /// Spawn point; fixed-wing UAVs default to the area centroid.
    #[serde(default)]
    pub position: Option<Vec2>,
    #[serde(default)]
    pub heading: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub position: Vec2,
    /// Prior peak; defaults to the true position.
    #[serde(default)]
    pub prior: Option<Vec2>,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_v")]
    pub v: f64,
}

fn default_c() -> f64 {
    0.3
}

fn default_v() -> f64 {
    50.0
}

impl TargetSpec {
    pub fn prior_position(&self) -> Vec2 {
        self.prior.unwrap_or(self.position)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeniedSpec {
    pub center: Vec2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Polygon vertices relative to `center`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec2>>,
    #[serde(default)]
    pub speed: f64,
    /// Direction of motion in degrees; drawn at random when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heading: Option<f64>,
}

impl DeniedSpec {
    pub fn circle(x: f64, y: f64, radius: f64) -> Self {
        DeniedSpec {
            center: Vec2::new(x, y),
            radius: Some(radius),
            vertices: None,
            speed: 0.0,
            heading: None,
        }
    }

    /// The area at rest, or `None` when the shape is ill-formed.
    pub fn shape(&self) -> Option<DeniedShape> {
        match (&self.radius, &self.vertices) {
            (Some(r), None) => Some(DeniedShape::Circle { radius: *r }),
            (None, Some(v)) => Some(DeniedShape::Polygon {
                vertices: v.clone(),
            }),
            _ => None,
        }
    }

    /// Build the area with velocity from `heading` (or `fallback_heading`).
    pub fn build(&self, fallback_heading: f64) -> Option<DeniedArea> {
        let shape = self.shape()?;
        let heading = self.heading.unwrap_or(fallback_heading);
        let velocity = if self.speed > 0.0 {
            Vec2::from_heading(heading) * self.speed
        } else {
            Vec2::ZERO
        };
        Some(DeniedArea {
            center: self.center,
            shape,
            velocity,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EventSpec {
    /// UAV `uav` leaves the task at the end of epoch `t`.
    Dropout { uav: u32, t: u32 },
    /// UAV `uav` switches to a new radio range at the end of epoch `t`.
    RangeChange { uav: u32, t: u32, com_distance: f64 },
}

impl EventSpec {
    pub fn time(&self) -> u32 {
        match self {
            EventSpec::Dropout { t, .. } | EventSpec::RangeChange { t, .. } => *t,
        }
    }

    pub fn uav(&self) -> u32 {
        match self {
            EventSpec::Dropout { uav, .. } | EventSpec::RangeChange { uav, .. } => *uav,
        }
    }
}

/// A full experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Simulated seconds.
    pub duration: u32,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_strategy")]
    pub strategy: Strategy,
    /// Stop as soon as every target is discovered.
    #[serde(default)]
    pub early_exit: bool,
    pub area: Area,
    #[serde(default)]
    pub search: SearchSection,
    #[serde(default)]
    pub expert_tables: ExpertTables,
    #[serde(default)]
    pub ga: GaSection,
    #[serde(default)]
    pub platforms: Platforms,
    pub uavs: Vec<UavSpec>,
    #[serde(default)]
    pub targets: Vec<TargetSpec>,
    #[serde(default)]
    pub denied_areas: Vec<DeniedSpec>,
    #[serde(default)]
    pub events: Vec<EventSpec>,
}

fn default_seed() -> u64 {
    1
}

fn default_dt() -> f64 {
    1.0
}

fn default_strategy() -> Strategy {
    Strategy::Relay
}

/// One validation finding, addressed by a dotted field path such as
/// `uavs[2].position`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid scenario: {}", first_issue(.issues))]
pub struct ScenarioError {
    pub issues: Vec<Issue>,
}

fn first_issue(issues: &[Issue]) -> String {
    match issues {
        [] => String::from("no details"),
        [one] => one.to_string(),
        [one, rest @ ..] => format!("{one} (and {} more)", rest.len()),
    }
}

struct Issues(Vec<Issue>);

impl Issues {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(Issue {
            path: path.into(),
            message: message.into(),
        });
    }

    fn check(&mut self, ok: bool, path: impl Into<String>, message: impl Into<String>) {
        if !ok {
            self.push(path, message);
        }
    }
}

fn finite(v: Vec2) -> bool {
    v.x.is_finite() && v.y.is_finite()
}

impl Scenario {
    pub fn grid(&self) -> Result<GridSpec, ScenarioError> {
        GridSpec::for_area(self.area.width, self.area.height, self.area.cell_size).map_err(|e| {
            ScenarioError {
                issues: alloc::vec![Issue {
                    path: "area".into(),
                    message: e.to_string()
                }],
            }
        })
    }

    pub fn centroid(&self) -> Vec2 {
        Vec2::new(0.5 * self.area.width, 0.5 * self.area.height)
    }

    /// Admissible jump values for a platform.
    pub fn j_range(&self, kind: UavKind) -> Option<RangeInclusive<u32>> {
        let p = self.platforms.get(kind);
        jump_grid::feasible_j_range(&p.jump_params(self.dt), self.area.cell_size)
            .ok()
            .flatten()
    }

    /// UAVs taking part under the scenario's strategy, sorted by id.
    pub fn roster(&self) -> Vec<UavSpec> {
        let mut r: Vec<UavSpec> = self
            .uavs
            .iter()
            .filter(|u| u.kind == UavKind::Rotor || self.strategy.uses_fixed_wing())
            .cloned()
            .collect();
        r.sort_by_key(|u| u.id);
        r
    }

    pub fn with_strategy(&self, strategy: Strategy) -> Scenario {
        Scenario {
            strategy,
            ..self.clone()
        }
    }

    pub fn with_seed(&self, seed: u64) -> Scenario {
        Scenario {
            seed,
            ..self.clone()
        }
    }

    /// Schema-level and physical checks. Every problem found is reported.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let mut is = Issues(Vec::new());
        let area_ok = self.area.width > 0.0 && self.area.height > 0.0 && self.area.cell_size > 0.0;
        is.check(
            area_ok,
            "area",
            "width, height and cell_size must be positive",
        );
        if area_ok {
            if let Err(e) =
                GridSpec::for_area(self.area.width, self.area.height, self.area.cell_size)
            {
                is.push("area", e.to_string());
            }
        }
        is.check(
            self.dt > 0.0 && self.dt.is_finite(),
            "dt",
            "decision interval must be positive",
        );
        is.check(
            self.duration >= 1,
            "duration",
            "duration must be at least 1 s",
        );
        is.check(
            self.search.history_len >= 1,
            "search.history_len",
            "history length must be at least 1",
        );
        is.check(
            self.search.sensor.is_valid(),
            "search.sensor",
            "need 0 < p_f < p_d <= 1 and 0 < delta_p <= 1",
        );
        is.check(
            self.search.weights.is_valid(),
            "search.weights",
            "weights must be finite and non-negative",
        );
        is.check(
            self.search.repulsion.is_valid(),
            "search.repulsion",
            "k, mu and d_max must be positive",
        );
        if let Err(e) = self.expert_tables.validate() {
            is.push(e.path(), e.to_string());
        }

        let inside = |p: Vec2| {
            finite(p) && p.x >= 0.0 && p.y >= 0.0 && p.x < self.area.width && p.y < self.area.height
        };

        for kind in [UavKind::Rotor, UavKind::FixedWing] {
            let used = self.uavs.iter().any(|u| u.kind == kind);
            let path = format!("platforms.{}", kind.name());
            let p = self.platforms.get(kind);
            if let Some(problem) = self.ga.get(kind).problem() {
                is.push(format!("ga.{}", kind.name()), problem);
            }
            if !used || !area_ok || !(self.dt > 0.0) {
                continue;
            }
            is.check(
                p.v_max >= p.v_min && p.v_min >= 0.0,
                format!("{path}.v_max"),
                "need 0 <= v_min <= v_max",
            );
            is.check(
                p.com_distance > 0.0,
                format!("{path}.com_distance"),
                "must be positive",
            );
            is.check(
                p.perc_distance >= 0.0,
                format!("{path}.perc_distance"),
                "must be non-negative",
            );
            is.check(
                p.altitude >= 0.0 && p.altitude.is_finite(),
                format!("{path}.altitude"),
                "must be non-negative",
            );
            match jump_grid::feasible_j_range(&p.jump_params(self.dt), self.area.cell_size) {
                Err(e) => is.push(format!("{path}.a_max"), e.to_string()),
                Ok(None) => is.push(
                    format!("{path}.v_max"),
                    format!("empty jump-value range: no j satisfies the speed and turning-radius limits (v_min={}, v_max={})", p.v_min, p.v_max),
                ),
                Ok(Some(range)) => {
                    if let Some(j) = p.initial_j {
                        is.check(range.contains(&j), format!("{path}.initial_j"), format!("{j} outside admissible range {}..={}", range.start(), range.end()));
                    }
                    if let Some(f) = p.fixed_plan {
                        is.check(range.contains(&f.j), format!("{path}.fixed_plan.j"), format!("{} outside admissible range {}..={}", f.j, range.start(), range.end()));
                        is.check((1..=40).contains(&f.m), format!("{path}.fixed_plan.m"), "horizon must lie in 1..=40");
                    }
                }
            }
            if let Some(fov) = p.fov {
                is.check(
                    fov.length > 0.0 && fov.width > 0.0 && fov.forward_offset.is_finite(),
                    format!("{path}.fov"),
                    "length and width must be positive",
                );
            } else if kind == UavKind::Rotor {
                is.push(format!("{path}.fov"), "rotors need a sensor footprint");
            }
            let a = &p.expert;
            is.check(
                a.j_scale >= 1 && a.m_min >= 1 && a.m_min <= a.m_max && a.m_max <= 40,
                format!("{path}.expert"),
                "need j_scale >= 1 and 1 <= m_min <= m_max <= 40",
            );
        }

        is.check(
            self.uavs.iter().any(|u| u.kind == UavKind::Rotor),
            "uavs",
            "at least one rotor UAV is required",
        );
        for (i, u) in self.uavs.iter().enumerate() {
            if self.uavs[..i].iter().any(|o| o.id == u.id) {
                is.push(
                    format!("uavs[{i}].id"),
                    format!("duplicate UAV id {}", u.id),
                );
            }
            match u.position {
                Some(p) => is.check(
                    inside(p),
                    format!("uavs[{i}].position"),
                    "spawn point outside the task area",
                ),
                None => is.check(
                    u.kind == UavKind::FixedWing,
                    format!("uavs[{i}].position"),
                    "rotor UAVs need a spawn point",
                ),
            }
            is.check(
                u.heading.is_finite(),
                format!("uavs[{i}].heading"),
                "heading must be finite",
            );
        }

        for (i, t) in self.targets.iter().enumerate() {
            is.check(
                inside(t.position),
                format!("targets[{i}].position"),
                "outside the task area",
            );
            is.check(
                inside(t.prior_position()),
                format!("targets[{i}].prior"),
                "outside the task area",
            );
            is.check(
                t.c > 0.0 && t.c <= 1.0,
                format!("targets[{i}].c"),
                "peak height must lie in (0, 1]",
            );
            is.check(
                t.v > 0.0,
                format!("targets[{i}].v"),
                "peak width must be positive",
            );
        }

        for (i, d) in self.denied_areas.iter().enumerate() {
            is.check(
                inside(d.center),
                format!("denied_areas[{i}].center"),
                "outside the task area",
            );
            match d.build(0.0) {
                None => is.push(
                    format!("denied_areas[{i}]"),
                    "give exactly one of radius or vertices",
                ),
                Some(a) => is.check(
                    a.is_valid(),
                    format!("denied_areas[{i}]"),
                    "radius must be positive and polygons need at least 3 vertices",
                ),
            }
            is.check(
                d.speed >= 0.0 && d.speed.is_finite(),
                format!("denied_areas[{i}].speed"),
                "speed must be non-negative",
            );
        }

        for (i, e) in self.events.iter().enumerate() {
            is.check(
                self.uavs.iter().any(|u| u.id == e.uav()),
                format!("events[{i}].uav"),
                format!("no UAV with id {}", e.uav()),
            );
            if let EventSpec::RangeChange { com_distance, .. } = e {
                is.check(
                    *com_distance > 0.0,
                    format!("events[{i}].com_distance"),
                    "must be positive",
                );
            }
        }

        if is.0.is_empty() {
            Ok(())
        } else {
            Err(ScenarioError { issues: is.0 })
        }
    }

    /// The 1600 m × 800 m block scenario: four rotors, one fixed-wing relay,
    /// five targets, six static denied areas and UAV 4 leaving at 100 s.
    pub fn paper() -> Scenario {
        let target = |tx, ty, px, py| TargetSpec {
            position: Vec2::new(tx, ty),
            prior: Some(Vec2::new(px, py)),
            c: 0.3,
            v: 50.0,
        };
        let rotor = |id, x, y, heading| UavSpec {
            id,
            kind: UavKind::Rotor,
            position: Some(Vec2::new(x, y)),
            heading,
        };
        Scenario {
            name: "paper".into(),
            seed: 1,
            duration: 300,
            dt: 1.0,
            strategy: Strategy::Relay,
            early_exit: false,
            area: Area {
                width: 1600.0,
                height: 800.0,
                cell_size: 4.0,
            },
            search: SearchSection::default(),
            expert_tables: ExpertTables::default(),
            ga: GaSection::default(),
            platforms: Platforms::default(),
            uavs: alloc::vec![
                rotor(1, 100.0, 700.0, -30.0),
                rotor(2, 500.0, 80.0, 60.0),
                rotor(3, 1100.0, 80.0, 120.0),
                rotor(4, 1500.0, 400.0, -180.0),
                UavSpec {
                    id: 5,
                    kind: UavKind::FixedWing,
                    position: None,
                    heading: 0.0
                },
            ],
            targets: alloc::vec![
                target(265.0, 585.0, 250.0, 600.0),
                target(580.0, 215.0, 600.0, 200.0),
                target(870.0, 540.0, 850.0, 550.0),
                target(1185.0, 270.0, 1200.0, 250.0),
                target(1420.0, 630.0, 1400.0, 650.0),
            ],
            denied_areas: alloc::vec![
                DeniedSpec::circle(420.0, 380.0, 60.0),
                DeniedSpec::circle(720.0, 680.0, 45.0),
                DeniedSpec::circle(1000.0, 380.0, 100.0),
                DeniedSpec::circle(1320.0, 450.0, 40.0),
                DeniedSpec::circle(170.0, 250.0, 70.0),
                DeniedSpec::circle(1150.0, 720.0, 55.0),
            ],
            events: alloc::vec![EventSpec::Dropout { uav: 4, t: 100 }],
        }
    }

    /// The 2000 m × 800 m dynamic scenario: five rotors with a 40 m × 60 m
    /// footprint led 40 m ahead, one relay, seven targets and eight denied
    /// areas drifting at 4 m/s in random directions.
    pub fn dynamic() -> Scenario {
        let mut s = Scenario::paper();
        s.name = "dynamic".into();
        s.duration = 600;
        s.area = Area {
            width: 2000.0,
            height: 800.0,
            cell_size: 4.0,
        };
        s.platforms.rotor.fov = Some(FovGeometry {
            length: 60.0,
            width: 40.0,
            forward_offset: 40.0,
        });
        let rotor = |id, x, y, heading| UavSpec {
            id,
            kind: UavKind::Rotor,
            position: Some(Vec2::new(x, y)),
            heading,
        };
        s.uavs = alloc::vec![
            rotor(1, 100.0, 100.0, 45.0),
            rotor(2, 100.0, 700.0, -45.0),
            rotor(3, 1000.0, 50.0, 90.0),
            rotor(4, 1900.0, 100.0, 135.0),
            rotor(5, 1900.0, 700.0, -135.0),
            UavSpec {
                id: 6,
                kind: UavKind::FixedWing,
                position: None,
                heading: 0.0
            },
        ];
        let priors = [
            (250.0, 200.0),
            (500.0, 600.0),
            (800.0, 300.0),
            (1050.0, 650.0),
            (1300.0, 200.0),
            (1600.0, 550.0),
            (1850.0, 300.0),
        ];
        s.targets = priors
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| {
                let off = if i % 2 == 0 { 15.0 } else { -15.0 };
                TargetSpec {
                    position: Vec2::new(x + off, y - off),
                    prior: Some(Vec2::new(x, y)),
                    c: 0.3,
                    v: 50.0,
                }
            })
            .collect();
        let areas = [
            (400.0, 400.0, 50.0),
            (700.0, 150.0, 40.0),
            (900.0, 600.0, 60.0),
            (1150.0, 400.0, 55.0),
            (1400.0, 700.0, 45.0),
            (1500.0, 300.0, 50.0),
            (1750.0, 600.0, 40.0),
            (200.0, 650.0, 45.0),
        ];
        s.denied_areas = areas
            .iter()
            .map(|&(x, y, r)| DeniedSpec {
                speed: 4.0,
                ..DeniedSpec::circle(x, y, r)
            })
            .collect();
        s
    }
}

/// Heading in degrees from `from` towards `to`.
pub fn heading_towards(from: Vec2, to: Vec2) -> f64 {
    math::wrap_degrees(math::atan2(to.y - from.y, to.x - from.x) / math::DEG)
}
