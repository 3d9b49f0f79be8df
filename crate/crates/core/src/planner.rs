//! Receding-horizon decisions: GA over action sequences, the jump-value
//! fallback ladder and the emergency rule when nothing is feasible.

use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ga::{ga_optimize, ga_optimize_seeded, GaConfig, GaOutcome};
use crate::grid_world::{FootprintCache, FovGeometry, Vec2};
use crate::jump_grid::{self, GridPose};
use crate::objective::{sequence_revenue, Constraints, Revenue, RevenueContext, RolloutScratch};
use crate::sim::Clock;

/// `−1` turns left, `0` flies straight, `+1` turns right.
pub type Action = i8;

pub const ACTIONS: [Action; 3] = [-1, 0, 1];

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ActionSequence(pub Vec<Action>);

impl ActionSequence {
    pub fn first(&self) -> Option<Action> {
        self.0.first().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Result of one planning call.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub action: Action,
    /// Jump value the action is executed at.
    pub j_used: u32,
    pub horizon: usize,
    pub sequence: ActionSequence,
    pub best: Revenue,
    pub min_score: f64,
    pub max_score: f64,
    /// Generations summed over every rung of the ladder that ran.
    pub generations: usize,
    pub evaluations: usize,
    pub emergency: bool,
    pub ga_seconds: f64,
}

/// Per-UAV planner state: footprint patterns and rollout buffers.
#[derive(Debug, Clone)]
pub struct Planner {
    cache: FootprintCache,
    scratch: RolloutScratch,
}

impl Planner {
    pub fn new(cell_size: f64, fov: FovGeometry, cell_count: usize) -> Self {
        Planner {
            cache: FootprintCache::new(cell_size, fov),
            scratch: RolloutScratch::new(cell_count),
        }
    }

    /// Search-revenue planning with the fallback ladder: run the GA at `j`,
    /// and while no feasible sequence turns up, retry one jump value lower
    /// down to `j_min`. If even that fails the emergency rule picks the move.
    #[allow(clippy::too_many_arguments)]
    pub fn decide<R: Rng + ?Sized>(
        &mut self,
        ctx: &RevenueContext<'_>,
        constraints: &Constraints<'_>,
        pose: &GridPose,
        j: u32,
        j_min: u32,
        m: usize,
        ga: &GaConfig,
        rng: &mut R,
        clock: &dyn Clock,
    ) -> Decision {
        let Planner { cache, scratch } = self;
        ladder(constraints, pose, j, j_min, m, clock, |jj| {
            ga_optimize(m, ga, rng, |seq: &[i8]| {
                sequence_revenue(ctx, constraints, cache, scratch, pose, seq, jj)
            })
        })
    }

    /// Relay planning: any feasible sequence will do, with a bonus that
    /// shrinks with the final predicted distance to `goal`. The constant
    /// sequences seed the population so full turns are always on the table.
    #[allow(clippy::too_many_arguments)]
    pub fn relay_plan<R: Rng + ?Sized>(
        &mut self,
        constraints: &Constraints<'_>,
        pose: &GridPose,
        goal: Option<Vec2>,
        j: u32,
        j_min: u32,
        m: usize,
        ga: &GaConfig,
        rng: &mut R,
        clock: &dyn Clock,
    ) -> Decision {
        ladder(constraints, pose, j, j_min, m, clock, |jj| {
            let seeds = [alloc::vec![-1; m], alloc::vec![0; m], alloc::vec![1; m]];
            ga_optimize_seeded(m, ga, rng, &seeds, |seq: &[i8]| {
                relay_fitness(constraints, pose, goal, seq, jj)
            })
        })
    }
}

/// Feasibility plus `1/(1 + d/100)` for a final distance `d` to `goal`.
pub fn relay_fitness(
    constraints: &Constraints<'_>,
    pose: &GridPose,
    goal: Option<Vec2>,
    seq: &[i8],
    j: u32,
) -> Revenue {
    let (violations, end) = constraints.check(pose, seq, j);
    if violations > 0 {
        return Revenue::Infeasible { violations };
    }
    let bonus = match goal {
        Some(g) => 1.0 / (1.0 + constraints.grid.center(end.cell).distance(g) / 100.0),
        None => 0.0,
    };
    Revenue::Feasible(bonus)
}

fn ladder(
    constraints: &Constraints<'_>,
    pose: &GridPose,
    j: u32,
    j_min: u32,
    m: usize,
    clock: &dyn Clock,
    mut run: impl FnMut(u32) -> GaOutcome<Revenue>,
) -> Decision {
    let started = clock.seconds();
    let j_min = j_min.max(1).min(j);
    let mut generations = 0;
    let mut evaluations = 0;
    let mut min_score = f64::INFINITY;
    let mut max_score = f64::NEG_INFINITY;
    let mut jj = j;
    loop {
        let out = run(jj);
        generations += out.generations;
        evaluations += out.evaluations;
        min_score = min_score.min(out.min_score);
        max_score = max_score.max(out.max_score);
        if out.best_fitness.is_feasible() {
            return Decision {
                action: out.best[0],
                j_used: jj,
                horizon: m,
                sequence: ActionSequence(out.best),
                best: out.best_fitness,
                min_score,
                max_score,
                generations,
                evaluations,
                emergency: false,
                ga_seconds: clock.seconds() - started,
            };
        }
        if jj <= j_min {
            let action = emergency_action(constraints, pose, j_min);
            return Decision {
                action,
                j_used: j_min,
                horizon: m,
                sequence: ActionSequence(alloc::vec![action]),
                best: out.best_fitness,
                min_score,
                max_score,
                generations,
                evaluations,
                emergency: true,
                ga_seconds: clock.seconds() - started,
            };
        }
        jj -= 1;
    }
}

/// Clearance of a point: distance to the nearest area edge or perceived
/// denied-area edge, negative when outside the area or inside a denied one.
pub fn clearance(constraints: &Constraints<'_>, p: Vec2) -> f64 {
    let g = &constraints.grid;
    let mut d = p.x.min(g.width() - p.x).min(p.y).min(g.height() - p.y);
    for area in constraints.denied {
        d = d.min(area.signed_distance(p));
    }
    d
}

/// The move at jump value `j` whose successor has the most clearance; ties
/// prefer flying straight, then left.
pub fn emergency_action(constraints: &Constraints<'_>, pose: &GridPose, j: u32) -> Action {
    let mut best = 0;
    let mut best_d = f64::NEG_INFINITY;
    for u in [0, -1, 1] {
        let next = jump_grid::step(pose, u as i32, j);
        let d = clearance(constraints, constraints.grid.center(next.cell));
        if d > best_d {
            best_d = d;
            best = u;
        }
    }
    best
}
