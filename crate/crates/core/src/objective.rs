//! Search revenue: target benefit `J_p`, uncertainty benefit `J_E`,
//! repulsion benefit `J_C`, their weighted per-state sum and the horizon
//! rollout used as GA fitness.

use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::grid_world::{DeniedArea, FootprintCache, GridSpec, SearchMap, Vec2};
use crate::jump_grid::{self, GridPose};
use crate::math;

/// Base weights and the expert corrections applied on top of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Weights {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub kw1: f64,
    pub kw2: f64,
    pub kw3: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            w1: 10.0,
            w2: 1.0,
            w3: 5.0,
            kw1: 1.0,
            kw2: 1.0,
            kw3: 1.0,
        }
    }
}

impl Weights {
    pub fn with_corrections(self, kw1: f64, kw2: f64, kw3: f64) -> Self {
        Weights {
            kw1,
            kw2,
            kw3,
            ..self
        }
    }

    pub fn effective(&self) -> [f64; 3] {
        [self.kw1 * self.w1, self.kw2 * self.w2, self.kw3 * self.w3]
    }

    pub fn is_valid(&self) -> bool {
        [self.w1, self.w2, self.w3, self.kw1, self.kw2, self.kw3]
            .iter()
            .all(|w| w.is_finite() && *w >= 0.0)
    }
}

/// Virtual repulsion between UAVs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RepulsionParams {
    pub k: f64,
    pub mu: f64,
    pub d_max: f64,
}

impl Default for RepulsionParams {
    fn default() -> Self {
        RepulsionParams {
            k: 10.0,
            mu: 6e-3,
            d_max: 200.0,
        }
    }
}

impl RepulsionParams {
    pub fn is_valid(&self) -> bool {
        self.k > 0.0 && self.mu > 0.0 && self.d_max > 0.0
    }
}

/// `J_p = Σ (1 − ζ)·p` over the covered cells.
pub fn target_benefit(map: &SearchMap, cells: &[usize]) -> f64 {
    cells
        .iter()
        .filter(|&&i| !map.found[i])
        .map(|&i| map.p[i])
        .sum()
}

/// `J_E = Σ χ` over the covered cells.
pub fn uncertainty_benefit(map: &SearchMap, cells: &[usize]) -> f64 {
    cells.iter().map(|&i| map.chi[i]).sum()
}

/// `J_C = 1 − ‖Σ F_ij‖` with `F_ij = k·e^{−μ·D_ij}·d_ij` for peers within
/// `D_max`. `coincident` is the unit direction used for a peer sitting
/// exactly on top of the UAV.
pub fn collision_benefit(
    own: Vec2,
    peers: &[Vec2],
    params: &RepulsionParams,
    coincident: Vec2,
) -> f64 {
    let mut force = Vec2::ZERO;
    for &peer in peers {
        let d = own - peer;
        let dist = d.norm();
        if dist > params.d_max {
            continue;
        }
        let dir = if dist > 0.0 {
            d * (1.0 / dist)
        } else {
            coincident
        };
        force = force + dir * (params.k * math::exp(-params.mu * dist));
    }
    1.0 - force.norm()
}

/// Everything a revenue evaluation reads besides the candidate itself.
#[derive(Debug, Clone, Copy)]
pub struct RevenueContext<'a> {
    pub map: &'a SearchMap,
    pub peers: &'a [Vec2],
    pub weights: Weights,
    pub repulsion: RepulsionParams,
    pub coincident: Vec2,
}

/// `J_i` for one footprint at `position`.
pub fn state_revenue(ctx: &RevenueContext<'_>, cells: &[usize], position: Vec2) -> f64 {
    let [a, b, c] = ctx.weights.effective();
    a * target_benefit(ctx.map, cells)
        + b * uncertainty_benefit(ctx.map, cells)
        + c * collision_benefit(position, ctx.peers, &ctx.repulsion, ctx.coincident)
}

/// Horizon revenue of a candidate sequence.
///
/// Feasible sequences always rank above infeasible ones, and fewer violating
/// steps rank higher among infeasible ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Revenue {
    Infeasible { violations: u32 },
    Feasible(f64),
}

impl Revenue {
    /// Scalar form; infeasible sequences map to `−(1 + violations)`.
    pub fn score(&self) -> f64 {
        match *self {
            Revenue::Feasible(v) => v,
            Revenue::Infeasible { violations } => -(1.0 + violations as f64),
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Revenue::Feasible(_))
    }
}

impl PartialOrd for Revenue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Revenue::Feasible(a), Revenue::Feasible(b)) => a.partial_cmp(b),
            (Revenue::Feasible(_), Revenue::Infeasible { .. }) => Some(Ordering::Greater),
            (Revenue::Infeasible { .. }, Revenue::Feasible(_)) => Some(Ordering::Less),
            (Revenue::Infeasible { violations: a }, Revenue::Infeasible { violations: b }) => {
                Some(b.cmp(a))
            }
        }
    }
}

/// Safety constraints checked on every predicted step.
#[derive(Debug, Clone, Copy)]
pub struct Constraints<'a> {
    pub grid: GridSpec,
    /// Denied areas the UAV currently perceives.
    pub denied: &'a [DeniedArea],
    pub dt: f64,
}

impl Constraints<'_> {
    /// Whether moving from `from` into `to` during predicted step `q` (1-based)
    /// leaves the area or touches a denied area at its predicted position.
    pub fn violates(&self, from: &GridPose, to: &GridPose, q: usize) -> bool {
        if !self.grid.contains(to.cell) {
            return true;
        }
        let a = self.grid.center(from.cell);
        let b = self.grid.center(to.cell);
        let elapsed = (q - 1) as f64 * self.dt;
        self.denied.iter().any(|area| {
            let shift = area.velocity * elapsed;
            area.intersects_segment(a - shift, b - shift)
        })
    }

    /// Violating steps along a sequence, plus the final predicted pose.
    pub fn check(&self, start: &GridPose, actions: &[i8], j: u32) -> (u32, GridPose) {
        let mut pose = start.at_jump(j);
        let mut violations = 0;
        for (q, &u) in actions.iter().enumerate() {
            let next = jump_grid::step(&pose, u as i32, j);
            if self.violates(&pose, &next, q + 1) {
                violations += 1;
            }
            pose = next;
        }
        (violations, pose)
    }
}

/// Scratch buffers for horizon rollouts, sized to one map.
///
/// The visit overlay lets a rollout treat its own earlier footprints as
/// already searched without copying the map. Entries stamped with an older
/// rollout count as unvisited, so nothing needs clearing between rollouts.
#[derive(Debug, Clone, Default)]
pub struct RolloutScratch {
    visits: Vec<(u32, u8)>,
    rollout: u32,
    cells: Vec<usize>,
}

impl RolloutScratch {
    pub fn new(cell_count: usize) -> Self {
        RolloutScratch {
            visits: alloc::vec![(0, 0); cell_count],
            rollout: 0,
            cells: Vec::new(),
        }
    }

    fn begin(&mut self, cell_count: usize) {
        if self.visits.len() != cell_count || self.rollout == u32::MAX {
            self.visits = alloc::vec![(0, 0); cell_count];
            self.rollout = 0;
        }
        self.rollout += 1;
    }
}

/// `Ĵ_i`: roll `actions` forward at jump value `j` and sum the per-state
/// revenue, decaying `χ` and masking `p` on cells already covered earlier in
/// the same rollout. A sequence with any violating step is rolled out in full
/// and then reported infeasible.
pub fn sequence_revenue(
    ctx: &RevenueContext<'_>,
    constraints: &Constraints<'_>,
    cache: &mut FootprintCache,
    scratch: &mut RolloutScratch,
    start: &GridPose,
    actions: &[i8],
    j: u32,
) -> Revenue {
    let (violations, _) = constraints.check(start, actions, j);
    let map = ctx.map;
    scratch.begin(map.grid.cell_count());
    let rollout = scratch.rollout;
    let [wp, we, wc] = ctx.weights.effective();
    let mut pose = start.at_jump(j);
    let mut total = 0.0;
    for &u in actions {
        pose = jump_grid::step(&pose, u as i32, j);
        cache.covered_indices(&map.grid, pose.cell, pose.heading, &mut scratch.cells);
        let (mut jp, mut je) = (0.0, 0.0);
        for &i in &scratch.cells {
            let slot = &mut scratch.visits[i];
            if slot.0 != rollout {
                *slot = (rollout, 1);
                if !map.found[i] {
                    jp += map.p[i];
                }
                je += map.chi[i];
            } else {
                je += map.chi[i] * HALVINGS[slot.1 as usize];
                slot.1 = slot.1.saturating_add(1);
            }
        }
        let jc = collision_benefit(
            map.grid.center(pose.cell),
            ctx.peers,
            &ctx.repulsion,
            ctx.coincident,
        );
        total += wp * jp + we * je + wc * jc;
    }
    if violations > 0 {
        return Revenue::Infeasible { violations };
    }
    Revenue::Feasible(total)
}

const HALVINGS: [f64; 256] = {
    let mut t = [1.0; 256];
    let mut i = 1;
    while i < 256 {
        t[i] = t[i - 1] * 0.5;
        i += 1;
    }
    t
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_world::{Cell, FovGeometry, Prior};
    use approx::assert_relative_eq;

    fn map() -> SearchMap {
        let g = GridSpec::new(4.0, 60, 60).unwrap();
        SearchMap::init_probability(g, &[], 0).unwrap()
    }

    fn fov() -> FovGeometry {
        FovGeometry {
            length: 40.0,
            width: 40.0,
            forward_offset: 0.0,
        }
    }

    #[test]
    fn target_benefit_masks_found() {
        let mut m = map();
        assert_eq!(target_benefit(&m, &[0, 1, 2]), 0.0);
        m.p[5] = 0.3;
        assert_relative_eq!(target_benefit(&m, &[5]), 0.3);
        m.found[5] = true;
        assert_eq!(target_benefit(&m, &[5]), 0.0);
    }

    #[test]
    fn uncertainty_benefit_sums() {
        let mut m = map();
        let cells: Vec<usize> = (0..100).collect();
        assert_eq!(uncertainty_benefit(&m, &cells), 100.0);
        for &i in &cells {
            m.chi[i] *= 0.5;
        }
        assert_eq!(uncertainty_benefit(&m, &cells), 50.0);
        for &i in &cells {
            m.chi[i] = 0.0;
        }
        assert_eq!(uncertainty_benefit(&m, &cells), 0.0);
    }

    #[test]
    fn repulsion_values() {
        let p = RepulsionParams::default();
        let own = Vec2::new(500.0, 500.0);
        assert_eq!(collision_benefit(own, &[], &p, Vec2::new(1.0, 0.0)), 1.0);
        assert_eq!(
            collision_benefit(own, &[Vec2::new(800.0, 500.0)], &p, Vec2::new(1.0, 0.0)),
            1.0
        );
        let jc = collision_benefit(own, &[Vec2::new(600.0, 500.0)], &p, Vec2::new(1.0, 0.0));
        assert_relative_eq!(jc, 1.0 - 10.0 * (-0.6f64).exp(), max_relative = 1e-12);
        assert!((jc + 4.488).abs() < 1e-3);
        let sym = collision_benefit(
            own,
            &[Vec2::new(600.0, 500.0), Vec2::new(400.0, 500.0)],
            &p,
            Vec2::new(1.0, 0.0),
        );
        assert_relative_eq!(sym, 1.0, epsilon = 1e-12);
        let on_top = collision_benefit(own, &[own], &p, Vec2::new(0.0, 1.0));
        assert_relative_eq!(on_top, -9.0, epsilon = 1e-12);
    }

    #[test]
    fn weighted_sum() {
        let mut m = map();
        let cells: Vec<usize> = (0..50).collect();
        m.p[0] = 0.3;
        let w = Weights {
            w1: 1.0,
            w2: 1.0,
            w3: 1.0,
            ..Weights::default()
        };
        let ctx = RevenueContext {
            map: &m,
            peers: &[],
            weights: w,
            repulsion: RepulsionParams::default(),
            coincident: Vec2::new(1.0, 0.0),
        };
        assert_relative_eq!(
            state_revenue(&ctx, &cells, Vec2::ZERO),
            51.3,
            max_relative = 1e-12
        );
        let ctx0 = RevenueContext {
            weights: w.with_corrections(0.0, 1.0, 1.0),
            ..ctx
        };
        assert_relative_eq!(
            state_revenue(&ctx0, &cells, Vec2::ZERO),
            51.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn revenue_order() {
        use Revenue::*;
        assert!(Feasible(-100.0) > Infeasible { violations: 0 });
        assert!(Infeasible { violations: 1 } > Infeasible { violations: 3 });
        assert!(Feasible(2.0) > Feasible(1.0));
        assert_eq!(Infeasible { violations: 2 }.score(), -3.0);
    }

    fn rollout(
        m: &SearchMap,
        denied: &[DeniedArea],
        start: &GridPose,
        actions: &[i8],
        j: u32,
    ) -> Revenue {
        let ctx = RevenueContext {
            map: m,
            peers: &[],
            weights: Weights::default(),
            repulsion: RepulsionParams::default(),
            coincident: Vec2::new(1.0, 0.0),
        };
        let cons = Constraints {
            grid: m.grid,
            denied,
            dt: 1.0,
        };
        let mut cache = FootprintCache::new(m.grid.cell_size, fov());
        let mut scratch = RolloutScratch::new(m.grid.cell_count());
        sequence_revenue(&ctx, &cons, &mut cache, &mut scratch, start, actions, j)
    }

    #[test]
    fn single_step_equals_state_revenue() {
        let m = SearchMap::init_probability(
            GridSpec::new(4.0, 60, 60).unwrap(),
            &[Prior {
                position: Vec2::new(120.0, 120.0),
                c: 0.3,
                v: 50.0,
            }],
            0,
        )
        .unwrap();
        let start = GridPose::new(Cell::new(20, 30), 0.0, 2);
        let next = jump_grid::step(&start, 1, 2);
        let mut cache = FootprintCache::new(4.0, fov());
        let mut cells = Vec::new();
        cache.covered_indices(&m.grid, next.cell, next.heading, &mut cells);
        let ctx = RevenueContext {
            map: &m,
            peers: &[],
            weights: Weights::default(),
            repulsion: RepulsionParams::default(),
            coincident: Vec2::new(1.0, 0.0),
        };
        let direct = state_revenue(&ctx, &cells, m.grid.center(next.cell));
        assert_eq!(rollout(&m, &[], &start, &[1], 2), Revenue::Feasible(direct));
    }

    #[test]
    fn denied_area_makes_sequence_infeasible() {
        let m = map();
        let start = GridPose::new(Cell::new(20, 30), 0.0, 2);
        let ahead = m.grid.center(Cell::new(26, 30));
        let r = rollout(
            &m,
            &[DeniedArea::circle(ahead, 10.0)],
            &start,
            &[0, 0, 0],
            2,
        );
        assert!(matches!(r, Revenue::Infeasible { violations: 2 }), "{r:?}");
        assert!(r.score() < 0.0);
        let off = GridPose::new(Cell::new(59, 30), 0.0, 2);
        assert!(!rollout(&m, &[], &off, &[0], 2).is_feasible());
    }

    #[test]
    fn virgin_path_beats_covered_path() {
        let fresh = map();
        let mut covered = map();
        let start = GridPose::new(Cell::new(10, 30), 0.0, 2);
        let mut cache = FootprintCache::new(4.0, fov());
        let mut cells = Vec::new();
        let mut pose = start;
        for _ in 0..3 {
            pose = jump_grid::step(&pose, 0, 2);
            cache.covered_indices(&covered.grid, pose.cell, pose.heading, &mut cells);
            for &i in &cells {
                covered.chi[i] = 0.5;
            }
        }
        let a = rollout(&fresh, &[], &start, &[0, 0, 0], 2);
        let b = rollout(&covered, &[], &start, &[0, 0, 0], 2);
        assert!(a > b);
    }

    #[test]
    fn revisits_earn_less() {
        // Footprints 40 m long stepping 4 m apart overlap almost entirely, so
        // the rollout's J_E falls well short of summing fresh footprints.
        let m = map();
        let weights = Weights {
            w1: 0.0,
            w2: 1.0,
            w3: 0.0,
            ..Weights::default()
        };
        let ctx = RevenueContext {
            map: &m,
            peers: &[],
            weights,
            repulsion: RepulsionParams::default(),
            coincident: Vec2::new(1.0, 0.0),
        };
        let cons = Constraints {
            grid: m.grid,
            denied: &[],
            dt: 1.0,
        };
        let mut cache = FootprintCache::new(4.0, fov());
        let mut scratch = RolloutScratch::new(m.grid.cell_count());
        let start = GridPose::new(Cell::new(20, 30), 0.0, 1);
        let got =
            sequence_revenue(&ctx, &cons, &mut cache, &mut scratch, &start, &[0; 4], 1).score();

        let mut pose = start;
        let mut cells = Vec::new();
        let (mut fresh, mut halved) = (0.0, 0.0);
        let mut visits = alloc::vec![0u32; m.grid.cell_count()];
        for _ in 0..4 {
            pose = jump_grid::step(&pose, 0, 1);
            cache.covered_indices(&m.grid, pose.cell, pose.heading, &mut cells);
            fresh += uncertainty_benefit(&m, &cells);
            for &i in &cells {
                halved += m.chi[i] * 0.5f64.powi(visits[i] as i32);
                visits[i] += 1;
            }
        }
        assert!(got < fresh);
        assert_relative_eq!(got, halved, max_relative = 1e-12);
    }
}
