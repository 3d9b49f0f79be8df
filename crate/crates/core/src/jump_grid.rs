//! Jump-grid motion: a UAV at cell `c` may only move to the ring of cells at
//! Chebyshev distance `j`, numbered `n ∈ (−4j, 4j]` with `n = 0` straight
//! ahead along `+x` and `n = 4j` straight behind. A decision `u ∈ {−1, 0, 1}`
//! shifts the number by one slot, so the per-step turn shrinks as `j` grows.

use core::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid_world::Cell;
use crate::math;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JumpError {
    #[error("ring slot {n} is outside 1..={j}")]
    SlotOutOfRange { j: u32, n: u32 },
    #[error("jump value must be at least 1")]
    ZeroJump,
    #[error(
        "grid too coarse for the lateral acceleration limit: need sqrt(2)*pi/4 * r/dt^2 = {required:.3} < a_max = {a_max}"
    )]
    GridTooCoarse { required: f64, a_max: f64 },
}

/// Per-kind maneuverability limits plus the decision interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpParams {
    pub dt: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub a_max: f64,
}

/// `R = (½(j+1)² + j(j−1))·r`.
pub fn turning_radius(j: u32, r: f64) -> f64 {
    let j = j as f64;
    (0.5 * (j + 1.0) * (j + 1.0) + j * (j - 1.0)) * r
}

fn check_slot(j: u32, n: u32) -> Result<(), JumpError> {
    if j == 0 {
        return Err(JumpError::ZeroJump);
    }
    if n == 0 || n > j {
        return Err(JumpError::SlotOutOfRange { j, n });
    }
    Ok(())
}

fn turn_radians(j: u32, n: u32) -> f64 {
    let (j, n) = (j as f64, n as f64);
    math::atan(n / j) - math::atan((n - 1.0) / j)
}

/// Heading change in degrees when moving from slot `n − 1` to slot `n`.
pub fn turning_angle(j: u32, n: u32) -> Result<f64, JumpError> {
    check_slot(j, n)?;
    Ok(turn_radians(j, n) / math::DEG)
}

/// Dimensionless lateral-acceleration coefficient `k_a`; the acceleration is
/// `k_a·r/dt²`.
pub fn acceleration_coeff(j: u32, n: u32) -> Result<f64, JumpError> {
    check_slot(j, n)?;
    let (jf, nf) = (j as f64, n as f64);
    Ok(math::sqrt(jf * jf + nf * nf) * turn_radians(j, n))
}

pub const MAX_ACCEL_COEFF: f64 = core::f64::consts::SQRT_2 * core::f64::consts::FRAC_PI_4;

/// Grid/interval compatibility with the lateral acceleration limit.
pub fn check_grid_resolution(r: f64, dt: f64, a_max: f64) -> Result<(), JumpError> {
    let required = MAX_ACCEL_COEFF * r / (dt * dt);
    if required < a_max {
        Ok(())
    } else {
        Err(JumpError::GridTooCoarse { required, a_max })
    }
}

/// Admissible jump values: strict speed bounds
/// `V_min·dt/r < j < √2·V_max·dt/(2r)` intersected with a turning radius
/// above `V²/a_max`, where `V = √2·j·r/dt` is the fastest per-step speed at
/// that `j`. `Ok(None)` means no admissible value exists.
pub fn feasible_j_range(
    params: &JumpParams,
    r: f64,
) -> Result<Option<RangeInclusive<u32>>, JumpError> {
    check_grid_resolution(r, params.dt, params.a_max)?;
    let lower = params.v_min * params.dt / r;
    let upper = core::f64::consts::SQRT_2 * params.v_max * params.dt / (2.0 * r);
    let mut first = None;
    let mut last = None;
    let mut j = 1u32;
    while (j as f64) < upper && j < 10_000 {
        let jf = j as f64;
        let speed = core::f64::consts::SQRT_2 * jf * r / params.dt;
        let r_min = speed * speed / params.a_max;
        if jf > lower && turning_radius(j, r) > r_min {
            first.get_or_insert(j);
            last = Some(j);
        }
        j += 1;
    }
    Ok(match (first, last) {
        (Some(a), Some(b)) => Some(a..=b),
        _ => None,
    })
}

/// Wrap a jump number into the canonical `(−4j, 4j]`.
pub fn wrap_number(n: i32, j: u32) -> i32 {
    let four = 4 * j as i32;
    let mut n = n;
    while n <= -four {
        n += 2 * four;
    }
    while n > four {
        n -= 2 * four;
    }
    n
}

/// Ring-cell increment `(Δx_g, Δy_g)` for a jump number, branches evaluated
/// top to bottom with half-open upper bounds.
pub fn increment(n: i32, j: u32) -> (i32, i32) {
    let j = j as i32;
    if n < -3 * j {
        (-j, -n - 4 * j)
    } else if n < -j {
        (2 * j + n, -j)
    } else if n < j {
        (j, n)
    } else if n < 3 * j {
        (2 * j - n, j)
    } else {
        (-j, 4 * j - n)
    }
}

/// Jump number whose ring cell is nearest to `heading_deg` along the ring.
///
/// The heading ray is intersected with the ring square and the hit point's
/// perimeter coordinate is rounded half-up, so this inverts [`increment`]
/// exactly for every `j`.
pub fn heading_to_number(heading_deg: f64, j: u32) -> i32 {
    let h = math::wrap_degrees(heading_deg);
    let jf = j as f64;
    let t = |deg: f64| math::tan(deg * math::DEG);
    let s = if (-45.0..=45.0).contains(&h) {
        jf * t(h)
    } else if h > 45.0 && h < 135.0 {
        2.0 * jf - jf / t(h)
    } else if h >= 135.0 {
        4.0 * jf + jf * t(h)
    } else if h < -135.0 {
        jf * t(h) - 4.0 * jf
    } else {
        -2.0 * jf - jf / t(h)
    };
    wrap_number(math::floor(s + 0.5) as i32, j)
}

/// Heading of a ring increment, rounded to `f32` so that poses survive the
/// single-precision wire format bit for bit.
pub fn increment_heading(dx: i32, dy: i32) -> f64 {
    let deg = math::atan2(dy as f64, dx as f64) / math::DEG;
    math::wrap_degrees(deg) as f32 as f64
}

/// Straight-line speed implied by one jump.
pub fn implied_speed(n: i32, j: u32, r: f64, dt: f64) -> f64 {
    let (dx, dy) = increment(n, j);
    r * math::hypot(dx as f64, dy as f64) / dt
}

/// Discrete kinematic state on the jump grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPose {
    pub cell: Cell,
    /// Degrees in `[−180, 180)`.
    pub heading: f64,
    /// Jump number consistent with `heading` at jump value `jump`.
    pub number: i32,
    pub jump: u32,
}

impl GridPose {
    pub fn new(cell: Cell, heading: f64, jump: u32) -> Self {
        let heading = math::wrap_degrees(heading) as f32 as f64;
        GridPose {
            cell,
            heading,
            number: heading_to_number(heading, jump),
            jump,
        }
    }

    /// The same pose described at another jump value.
    pub fn at_jump(&self, j: u32) -> GridPose {
        if j == self.jump {
            *self
        } else {
            GridPose {
                number: heading_to_number(self.heading, j),
                jump: j,
                ..*self
            }
        }
    }
}

/// Apply one decision at jump value `j`. Bounds are not checked here.
pub fn step(pose: &GridPose, u: i32, j: u32) -> GridPose {
    let n = wrap_number(pose.at_jump(j).number + u, j);
    let (dx, dy) = increment(n, j);
    GridPose {
        cell: pose.cell.offset(dx, dy),
        heading: increment_heading(dx, dy),
        number: n,
        jump: j,
    }
}
