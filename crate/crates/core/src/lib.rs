//! Distributed receding-horizon cooperative search for heterogeneous UAV
//! clusters.
//!
//! The crate is `no_std` (it needs `alloc`) and contains every algorithmic
//! piece of the search stack:
//!
//! * [`grid_world`] rasterized task area, probability/uncertainty layers and
//!   the Bayesian sensor update,
//! * [`jump_grid`] maneuver-constrained discrete motion on a jump grid,
//! * [`objective`] per-state and per-horizon search revenue,
//! * [`ga`] and [`planner`] the genetic receding-horizon optimizer with the
//!   maneuverability fallback ladder,
//! * [`expert`] rule tables selecting jump value, horizon and weight
//!   corrections online,
//! * [`comms`] the fixed-size message package, timestamp merge and local
//!   replay of remote search history,
//! * [`sim`] the deterministic closed loop tying everything together.
//!
//! File IO, the scenario file format and the command line live in the
//! `coopsearch` companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod comms;
pub mod expert;
pub mod ga;
pub mod grid_world;
pub mod jump_grid;
pub mod math;
pub mod objective;
pub mod planner;
pub mod scenario;
pub mod sim;

pub use comms::{LocalStore, MessagePackage, PoseRecord, TargetRecord, WireError};
pub use expert::{ExpertInputs, ExpertOutput, ExpertTables};
pub use ga::{ga_optimize, ga_optimize_seeded, Fitness, GaConfig, GaOutcome};
pub use grid_world::{
    Cell, DeniedArea, DeniedShape, FovGeometry, GridSpec, SearchMap, SensorModel, Target, Vec2,
};
pub use jump_grid::{GridPose, JumpParams};
pub use objective::{RepulsionParams, Revenue, Weights};
pub use planner::{Action, ActionSequence, Decision};
pub use scenario::{FixedPlan, Platform, Scenario, ScenarioError, Strategy, UavKind};
pub use sim::{compare_strategies, Clock, MetricsFrame, NoClock, SimOutput, Simulation, StrategySummary};
