//! Rasterized task area, per-UAV probability/uncertainty layers, denied areas
//! and the sensor update.
//!
//! Cells are 1-based `(x_g, y_g)` with `x_g ∈ 1..=cols` and `y_g ∈ 1..=rows`;
//! a cell's center sits at `(r·(x_g − 0.5), r·(y_g − 0.5))` meters. Headings
//! are measured from `+x` towards `+y`, and `+y` is drawn downwards (screen
//! convention), so a positive heading change is a right turn.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("cell size must be positive, got {0}")]
    BadCellSize(f64),
    #[error("grid must have at least one cell along each axis")]
    EmptyGrid,
    #[error("cell ({x}, {y}) is outside the {cols}x{rows} grid")]
    CellOutOfBounds {
        x: i32,
        y: i32,
        cols: u32,
        rows: u32,
    },
    #[error("position ({x}, {y}) m lies outside the task area")]
    PositionOutOfArea { x: f64, y: f64 },
    #[error("prior {index}: {reason}")]
    BadPrior { index: usize, reason: &'static str },
}

/// Planar point or vector in meters; serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Vec2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Vec2 { x, y }
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        math::hypot(self.x, self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    /// Unit vector for a heading in degrees.
    pub fn from_heading(deg: f64) -> Vec2 {
        let (s, c) = math::sin_cos(deg * math::DEG);
        Vec2::new(snap_unit(c), snap_unit(s))
    }
}

// Exact zeros/ones on the axes keep footprints symmetric at 0°, 90°, ...
fn snap_unit(v: f64) -> f64 {
    if v.abs() < 1e-12 {
        0.0
    } else if (v.abs() - 1.0).abs() < 1e-12 {
        v.signum()
    } else {
        v
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub const fn new(x: i32, y: i32) -> Self {
        Cell { x, y }
    }

    pub fn offset(self, dx: i32, dy: i32) -> Cell {
        Cell::new(self.x + dx, self.y + dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Cell side length `r` in meters.
    pub cell_size: f64,
    /// Cell count along x (`L_x`).
    pub cols: u32,
    /// Cell count along y (`W_y`).
    pub rows: u32,
}

impl GridSpec {
    pub fn new(cell_size: f64, cols: u32, rows: u32) -> Result<Self, GridError> {
        if !(cell_size > 0.0) || !cell_size.is_finite() {
            return Err(GridError::BadCellSize(cell_size));
        }
        if cols == 0 || rows == 0 {
            return Err(GridError::EmptyGrid);
        }
        Ok(GridSpec {
            cell_size,
            cols,
            rows,
        })
    }

    /// Grid covering a `width × height` meter area, rounding to whole cells.
    pub fn for_area(width: f64, height: f64, cell_size: f64) -> Result<Self, GridError> {
        if !(cell_size > 0.0) {
            return Err(GridError::BadCellSize(cell_size));
        }
        let cols = math::round(width / cell_size);
        let rows = math::round(height / cell_size);
        if !(cols >= 1.0 && rows >= 1.0) {
            return Err(GridError::EmptyGrid);
        }
        GridSpec::new(cell_size, cols as u32, rows as u32)
    }

    pub fn width(&self) -> f64 {
        self.cols as f64 * self.cell_size
    }

    pub fn height(&self) -> f64 {
        self.rows as f64 * self.cell_size
    }

    pub fn cell_count(&self) -> usize {
        self.cols as usize * self.rows as usize
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.x >= 1 && cell.y >= 1 && cell.x <= self.cols as i32 && cell.y <= self.rows as i32
    }

    pub fn contains_point(&self, p: Vec2) -> bool {
        p.x >= 0.0 && p.y >= 0.0 && p.x < self.width() && p.y < self.height()
    }

    /// Row-major linear index of an in-bounds cell.
    #[inline]
    pub fn index(&self, cell: Cell) -> Option<usize> {
        if self.contains(cell) {
            Some(self.index_unchecked(cell))
        } else {
            None
        }
    }

    #[inline]
    pub(crate) fn index_unchecked(&self, cell: Cell) -> usize {
        (cell.y - 1) as usize * self.cols as usize + (cell.x - 1) as usize
    }

    pub fn cell_at(&self, index: usize) -> Cell {
        let cols = self.cols as usize;
        Cell::new((index % cols) as i32 + 1, (index / cols) as i32 + 1)
    }

    /// Center of a cell without bounds checks.
    #[inline]
    pub fn center(&self, cell: Cell) -> Vec2 {
        Vec2::new(
            self.cell_size * (cell.x as f64 - 0.5),
            self.cell_size * (cell.y as f64 - 0.5),
        )
    }

    pub fn grid_to_world(&self, cell: Cell) -> Result<Vec2, GridError> {
        if !self.contains(cell) {
            return Err(GridError::CellOutOfBounds {
                x: cell.x,
                y: cell.y,
                cols: self.cols,
                rows: self.rows,
            });
        }
        Ok(self.center(cell))
    }

    /// Containing cell for any position, in bounds or not.
    #[inline]
    pub fn cell_of(&self, p: Vec2) -> Cell {
        Cell::new(
            math::floor(p.x / self.cell_size) as i32 + 1,
            math::floor(p.y / self.cell_size) as i32 + 1,
        )
    }

    pub fn world_to_grid(&self, p: Vec2) -> Result<Cell, GridError> {
        let cell = self.cell_of(p);
        if !self.contains(cell) || !p.x.is_finite() || !p.y.is_finite() {
            return Err(GridError::PositionOutOfArea { x: p.x, y: p.y });
        }
        Ok(cell)
    }
}

/// Sensor detection model and the existence threshold `δ_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorModel {
    pub p_d: f64,
    pub p_f: f64,
    #[serde(default = "default_delta_p")]
    pub delta_p: f64,
}

fn default_delta_p() -> f64 {
    0.95
}

impl Default for SensorModel {
    fn default() -> Self {
        SensorModel {
            p_d: 0.8,
            p_f: 1e-4,
            delta_p: 0.95,
        }
    }
}

impl SensorModel {
    pub fn is_valid(&self) -> bool {
        self.p_f > 0.0
            && self.p_f < self.p_d
            && self.p_d <= 1.0
            && self.delta_p > 0.0
            && self.delta_p <= 1.0
    }
}

/// Bayesian existence update for one cell.
///
/// Returns the clamped posterior and whether the denominator was non-positive
/// (which cannot happen for valid inputs and is counted as an anomaly).
pub fn bayes_update(p: f64, detected: bool, p_d: f64, p_f: f64) -> (f64, bool) {
    let (num, den) = if detected {
        (p_d * p, p_f + (p_d - p_f) * p)
    } else {
        ((1.0 - p_d) * p, 1.0 - p_d * p - p_f * (1.0 - p))
    };
    if !(den > 0.0) {
        return (p.clamp(0.0, 1.0), true);
    }
    ((num / den).clamp(0.0, 1.0), false)
}

/// A Gaussian prior bump of height `c` and width `v` meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prior {
    pub position: Vec2,
    pub c: f64,
    pub v: f64,
}

/// One UAV's private belief over the task area.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchMap {
    pub grid: GridSpec,
    pub p: Vec<f64>,
    pub chi: Vec<f64>,
    pub found: Vec<bool>,
    pub owner: u32,
    /// Non-positive denominators met in [`bayes_update`].
    pub anomalies: u64,
}

impl SearchMap {
    /// Gaussian-mixture initialization of the probability layer, clamped to 1,
    /// with full uncertainty everywhere.
    pub fn init_probability(
        grid: GridSpec,
        priors: &[Prior],
        owner: u32,
    ) -> Result<SearchMap, GridError> {
        for (index, prior) in priors.iter().enumerate() {
            if !grid.contains_point(prior.position) {
                return Err(GridError::BadPrior {
                    index,
                    reason: "position outside the task area",
                });
            }
            if !(prior.c > 0.0 && prior.c <= 1.0) {
                return Err(GridError::BadPrior {
                    index,
                    reason: "peak height must lie in (0, 1]",
                });
            }
            if !(prior.v > 0.0) {
                return Err(GridError::BadPrior {
                    index,
                    reason: "peak width must be positive",
                });
            }
        }
        let n = grid.cell_count();
        let mut p = Vec::with_capacity(n);
        for idx in 0..n {
            let center = grid.center(grid.cell_at(idx));
            let mut sum = 0.0;
            for prior in priors {
                let d = center - prior.position;
                sum += prior.c * math::exp(-(d.x * d.x + d.y * d.y) / (prior.v * prior.v));
            }
            p.push(sum.min(1.0));
        }
        Ok(SearchMap {
            grid,
            p,
            chi: alloc::vec![1.0; n],
            found: alloc::vec![false; n],
            owner,
            anomalies: 0,
        })
    }

    pub fn total_uncertainty(&self) -> f64 {
        self.chi.iter().sum()
    }

    pub fn total_probability(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Apply one sensor outcome to a cell: Bayes update, uncertainty halving
    /// and the existence latch. Returns true when the cell is at or above
    /// `δ_p` afterwards.
    #[inline]
    pub fn observe(&mut self, idx: usize, detected: bool, sensor: &SensorModel) -> bool {
        let (p, anomaly) = bayes_update(self.p[idx], detected, sensor.p_d, sensor.p_f);
        if anomaly {
            self.anomalies += 1;
        }
        self.p[idx] = p;
        self.chi[idx] *= 0.5;
        if p >= sensor.delta_p {
            self.found[idx] = true;
            true
        } else {
            false
        }
    }
}

/// Ground-truth target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub id: u32,
    pub position: Vec2,
    pub prior: Vec2,
    /// Time of first discovery by any UAV.
    pub discovered_at: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DeniedShape {
    Circle {
        radius: f64,
    },
    /// Vertices relative to the area's center.
    Polygon {
        vertices: Vec<Vec2>,
    },
}

/// A no-fly region, optionally drifting with constant speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeniedArea {
    pub center: Vec2,
    pub shape: DeniedShape,
    pub velocity: Vec2,
}

impl DeniedArea {
    pub fn circle(center: Vec2, radius: f64) -> Self {
        DeniedArea {
            center,
            shape: DeniedShape::Circle { radius },
            velocity: Vec2::ZERO,
        }
    }

    pub fn is_valid(&self) -> bool {
        match &self.shape {
            DeniedShape::Circle { radius } => *radius > 0.0,
            DeniedShape::Polygon { vertices } => vertices.len() >= 3,
        }
    }

    /// Center position after `dt` seconds of straight drift (no bounce).
    pub fn predicted(&self, dt: f64) -> DeniedArea {
        DeniedArea {
            center: self.center + self.velocity * dt,
            shape: self.shape.clone(),
            velocity: self.velocity,
        }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let d = p - self.center;
        match &self.shape {
            DeniedShape::Circle { radius } => d.dot(d) <= radius * radius,
            DeniedShape::Polygon { vertices } => point_in_polygon(d, vertices),
        }
    }

    /// Distance from `p` to the area's edge, negative inside.
    pub fn signed_distance(&self, p: Vec2) -> f64 {
        let d = p - self.center;
        match &self.shape {
            DeniedShape::Circle { radius } => d.norm() - radius,
            DeniedShape::Polygon { vertices } => {
                let mut best = f64::INFINITY;
                for i in 0..vertices.len() {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % vertices.len()];
                    best = best.min(point_segment_distance(d, a, b));
                }
                if point_in_polygon(d, vertices) {
                    -best
                } else {
                    best
                }
            }
        }
    }

    /// Whether the straight segment `a → b` touches the area.
    pub fn intersects_segment(&self, a: Vec2, b: Vec2) -> bool {
        let a = a - self.center;
        let b = b - self.center;
        match &self.shape {
            DeniedShape::Circle { radius } => point_segment_distance(Vec2::ZERO, a, b) <= *radius,
            DeniedShape::Polygon { vertices } => {
                if point_in_polygon(a, vertices) || point_in_polygon(b, vertices) {
                    return true;
                }
                (0..vertices.len())
                    .any(|i| segments_cross(a, b, vertices[i], vertices[(i + 1) % vertices.len()]))
            }
        }
    }
}

fn point_in_polygon(p: Vec2, vertices: &[Vec2]) -> bool {
    let mut inside = false;
    let n = vertices.len();
    let mut j = n - 1;
    for i in 0..n {
        let (vi, vj) = (vertices[i], vertices[j]);
        if (vi.y > p.y) != (vj.y > p.y) && p.x < (vj.x - vi.x) * (p.y - vi.y) / (vj.y - vi.y) + vi.x
        {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 > 0.0 {
        ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a + ab * t).distance(p)
}

fn cross(o: Vec2, a: Vec2, b: Vec2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn segments_cross(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Translate moving areas by `velocity·dt`, reflecting the velocity component
/// whose axis the center would cross.
pub fn advance_denied_areas(areas: &mut [DeniedArea], dt: f64, width: f64, height: f64) {
    for area in areas.iter_mut() {
        if area.velocity == Vec2::ZERO {
            continue;
        }
        let mut c = area.center + area.velocity * dt;
        if c.x <= 0.0 {
            c.x = -c.x;
            area.velocity.x = area.velocity.x.abs();
        } else if c.x >= width {
            c.x = 2.0 * width - c.x;
            area.velocity.x = -area.velocity.x.abs();
        }
        if c.y <= 0.0 {
            c.y = -c.y;
            area.velocity.y = area.velocity.y.abs();
        } else if c.y >= height {
            c.y = 2.0 * height - c.y;
            area.velocity.y = -area.velocity.y.abs();
        }
        area.center = c;
    }
}

/// Rectangular sensor footprint: `length` along the heading, `width` across
/// it, centered `forward_offset` meters ahead of the UAV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FovGeometry {
    pub length: f64,
    pub width: f64,
    #[serde(default)]
    pub forward_offset: f64,
}

/// Cell offsets (relative to the UAV's cell) whose centers fall inside the
/// footprint. Membership is half-open in the footprint frame so an
/// axis-aligned `L×W` rectangle over `r`-cells yields exactly `(L/r)·(W/r)`.
pub fn footprint_offsets(cell_size: f64, heading_deg: f64, fov: &FovGeometry) -> Vec<(i32, i32)> {
    let dir = Vec2::from_heading(heading_deg);
    let side = Vec2::new(-dir.y, dir.x);
    let half_l = 0.5 * fov.length;
    let half_w = 0.5 * fov.width;
    let reach = fov.forward_offset.abs() + math::hypot(half_l, half_w);
    let k = math::ceil(reach / cell_size) as i32 + 1;
    let mut out = Vec::new();
    for dy in -k..=k {
        for dx in -k..=k {
            let d = Vec2::new(dx as f64 * cell_size, dy as f64 * cell_size);
            let along = d.dot(dir) - fov.forward_offset;
            let across = d.dot(side);
            if along >= -half_l && along < half_l && across >= -half_w && across < half_w {
                out.push((dx, dy));
            }
        }
    }
    out
}

/// Cells covered by a UAV at `cell` with `heading_deg`, clipped to the grid.
pub fn rasterize_fov(
    grid: &GridSpec,
    cell: Cell,
    heading_deg: f64,
    fov: &FovGeometry,
) -> Vec<Cell> {
    footprint_offsets(grid.cell_size, heading_deg, fov)
        .into_iter()
        .map(|(dx, dy)| cell.offset(dx, dy))
        .filter(|c| grid.contains(*c))
        .collect()
}

/// Memoized [`footprint_offsets`] keyed by the exact heading bits.
#[derive(Debug, Clone)]
pub struct FootprintCache {
    cell_size: f64,
    fov: FovGeometry,
    patterns: BTreeMap<u64, Pattern>,
}

#[derive(Debug, Clone)]
struct Pattern {
    offsets: Vec<(i32, i32)>,
    lo: (i32, i32),
    hi: (i32, i32),
    /// Row-major offsets for a grid `linear_cols` wide.
    linear: Vec<isize>,
    linear_cols: u32,
}

impl Pattern {
    fn new(offsets: Vec<(i32, i32)>) -> Self {
        let lo = offsets
            .iter()
            .fold((0, 0), |(x, y), &(dx, dy)| (x.min(dx), y.min(dy)));
        let hi = offsets
            .iter()
            .fold((0, 0), |(x, y), &(dx, dy)| (x.max(dx), y.max(dy)));
        Pattern {
            offsets,
            lo,
            hi,
            linear: Vec::new(),
            linear_cols: 0,
        }
    }
}

impl FootprintCache {
    pub fn new(cell_size: f64, fov: FovGeometry) -> Self {
        FootprintCache {
            cell_size,
            fov,
            patterns: BTreeMap::new(),
        }
    }

    pub fn fov(&self) -> &FovGeometry {
        &self.fov
    }

    fn pattern(&mut self, heading_deg: f64) -> &mut Pattern {
        let (cell_size, fov) = (self.cell_size, self.fov);
        self.patterns
            .entry(heading_deg.to_bits())
            .or_insert_with(|| Pattern::new(footprint_offsets(cell_size, heading_deg, &fov)))
    }

    pub fn offsets(&mut self, heading_deg: f64) -> &[(i32, i32)] {
        &self.pattern(heading_deg).offsets
    }

    /// Linear indices of covered in-bounds cells, written to `out`.
    pub fn covered_indices(
        &mut self,
        grid: &GridSpec,
        cell: Cell,
        heading_deg: f64,
        out: &mut Vec<usize>,
    ) {
        out.clear();
        let pattern = self.pattern(heading_deg);
        let inside = grid.contains(cell.offset(pattern.lo.0, pattern.lo.1))
            && grid.contains(cell.offset(pattern.hi.0, pattern.hi.1));
        if inside {
            if pattern.linear_cols != grid.cols {
                let cols = grid.cols as isize;
                pattern.linear = pattern
                    .offsets
                    .iter()
                    .map(|&(dx, dy)| dy as isize * cols + dx as isize)
                    .collect();
                pattern.linear_cols = grid.cols;
            }
            let base = grid.index_unchecked(cell) as isize;
            out.extend(pattern.linear.iter().map(|&o| (base + o) as usize));
        } else {
            for &(dx, dy) in &pattern.offsets {
                if let Some(idx) = grid.index(cell.offset(dx, dy)) {
                    out.push(idx);
                }
            }
        }
    }
}

/// Outcome of sensing one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellObservation {
    pub index: usize,
    pub detected: bool,
}

/// Result of one footprint pass.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FootprintReport {
    pub observations: Vec<CellObservation>,
    /// Indices into the target slice that this pass confirmed.
    pub discoveries: Vec<usize>,
    pub false_alarms: u32,
}

/// Sense every covered cell once, update the map and confirm targets.
///
/// One uniform draw per cell in the given order: a cell holding a target
/// reports with probability `P_D`, an empty one with probability `P_F`.
/// A target counts as discovered only when its own cell is at or above `δ_p`
/// after the update.
pub fn apply_detection_footprint<R: Rng + ?Sized>(
    map: &mut SearchMap,
    cells: &[usize],
    targets: &mut [Target],
    sensor: &SensorModel,
    t: f64,
    rng: &mut R,
) -> FootprintReport {
    let mut report = FootprintReport::default();
    let grid = map.grid;
    for &idx in cells {
        let cell = grid.cell_at(idx);
        let occupied = targets.iter().any(|tg| grid.cell_of(tg.position) == cell);
        let u: f64 = rng.gen();
        let detected = if occupied {
            u < sensor.p_d
        } else {
            u < sensor.p_f
        };
        if detected && !occupied {
            report.false_alarms += 1;
        }
        let confirmed = map.observe(idx, detected, sensor);
        report.observations.push(CellObservation {
            index: idx,
            detected,
        });
        if confirmed && occupied {
            for (k, tg) in targets.iter_mut().enumerate() {
                if grid.cell_of(tg.position) == cell {
                    if tg.discovered_at.is_none() {
                        tg.discovered_at = Some(t);
                    }
                    report.discoveries.push(k);
                }
            }
        }
    }
    report
}
