//! Rule tables mapping the task state to jump value, horizon and weight
//! corrections.
//!
//! System 1 reads `E1 = b/b*`, the closest target distance over the warning
//! distance, and picks `j` and `k_w3`. System 2 reads `E2`, the discovered
//! fraction of targets, and picks `k_w1`, `k_w2` and the horizon `m`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid_world::Vec2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpertError {
    #[error("{table} table is empty")]
    Empty { table: &'static str },
    #[error("{table} row {row}: range must start at 0, got {from}")]
    BadStart {
        table: &'static str,
        row: usize,
        from: f64,
    },
    #[error("{table} row {row}: gap or overlap, previous row ends at {prev_to} but this one starts at {from}")]
    Gap {
        table: &'static str,
        row: usize,
        prev_to: f64,
        from: f64,
    },
    #[error("{table} row {row}: empty range [{from}, {to})")]
    EmptyRange {
        table: &'static str,
        row: usize,
        from: f64,
        to: f64,
    },
    #[error("{table}: last row must extend to infinity, ends at {to}")]
    Unbounded { table: &'static str, to: f64 },
    #[error("{table} row {row}: {reason}")]
    BadValue {
        table: &'static str,
        row: usize,
        reason: &'static str,
    },
}

impl ExpertError {
    /// Scenario field path of the offending table or row.
    pub fn path(&self) -> alloc::string::String {
        match *self {
            ExpertError::BadValue { table: "expert", .. } => "expert_tables.b_star".into(),
            ExpertError::Empty { table } | ExpertError::Unbounded { table, .. } => alloc::format!("expert_tables.{table}"),
            ExpertError::BadStart { table, row, .. }
            | ExpertError::Gap { table, row, .. }
            | ExpertError::EmptyRange { table, row, .. }
            | ExpertError::BadValue { table, row, .. } => alloc::format!("expert_tables.{table}[{row}]"),
        }
    }
}

/// System-1 row covering `E1 ∈ [from, to)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct System1Row {
    pub from: f64,
    pub to: f64,
    pub j: u32,
    pub kw3: f64,
}

/// System-2 row covering `E2 ∈ [from, to)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct System2Row {
    pub from: f64,
    pub to: f64,
    pub kw1: f64,
    pub kw2: f64,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExpertTables {
    /// Warning distance `b*` in meters.
    pub b_star: f64,
    pub system1: Vec<System1Row>,
    pub system2: Vec<System2Row>,
}

impl Default for ExpertTables {
    fn default() -> Self {
        let inf = f64::INFINITY;
        ExpertTables {
            b_star: 160.0,
            system1: alloc::vec![
                System1Row {
                    from: 0.0,
                    to: 1.0,
                    j: 2,
                    kw3: 2.0
                },
                System1Row {
                    from: 1.0,
                    to: 2.0,
                    j: 4,
                    kw3: 1.0
                },
                System1Row {
                    from: 2.0,
                    to: inf,
                    j: 6,
                    kw3: 0.8
                },
            ],
            system2: alloc::vec![
                System2Row {
                    from: 0.0,
                    to: 0.8,
                    kw1: 1.0,
                    kw2: 1.0,
                    m: 8
                },
                System2Row {
                    from: 0.8,
                    to: 1.0,
                    kw1: 0.8,
                    kw2: 1.2,
                    m: 10
                },
                System2Row {
                    from: 1.0,
                    to: inf,
                    kw1: 0.4,
                    kw2: 1.6,
                    m: 12
                },
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpertInputs {
    /// Closest target distance `b` in meters, `+∞` without targets.
    pub b: f64,
    pub found: usize,
    pub total: usize,
}

impl ExpertInputs {
    pub fn e1(&self, b_star: f64) -> f64 {
        self.b / b_star
    }

    /// Discovered fraction; 1 when there are no targets at all.
    pub fn e2(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.found as f64 / self.total as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpertOutput {
    pub e1: f64,
    pub e2: f64,
    pub j: u32,
    pub kw1: f64,
    pub kw2: f64,
    pub kw3: f64,
    pub m: usize,
}

fn check_coverage(
    table: &'static str,
    ranges: impl Iterator<Item = (f64, f64)>,
) -> Result<(), ExpertError> {
    let mut prev: Option<f64> = None;
    let mut last_to = None;
    for (row, (from, to)) in ranges.enumerate() {
        match prev {
            None if from != 0.0 => return Err(ExpertError::BadStart { table, row, from }),
            Some(prev_to) if from != prev_to => {
                return Err(ExpertError::Gap {
                    table,
                    row,
                    prev_to,
                    from,
                })
            }
            _ => {}
        }
        if !(to > from) {
            return Err(ExpertError::EmptyRange {
                table,
                row,
                from,
                to,
            });
        }
        prev = Some(to);
        last_to = Some(to);
    }
    match last_to {
        None => Err(ExpertError::Empty { table }),
        Some(to) if to != f64::INFINITY => Err(ExpertError::Unbounded { table, to }),
        Some(_) => Ok(()),
    }
}

impl ExpertTables {
    /// Both tables must tile `[0, ∞)` without gaps or overlaps.
    pub fn validate(&self) -> Result<(), ExpertError> {
        if !(self.b_star > 0.0) {
            return Err(ExpertError::BadValue {
                table: "expert",
                row: 0,
                reason: "b_star must be positive",
            });
        }
        check_coverage("system1", self.system1.iter().map(|r| (r.from, r.to)))?;
        check_coverage("system2", self.system2.iter().map(|r| (r.from, r.to)))?;
        for (row, r) in self.system1.iter().enumerate() {
            if r.j == 0 {
                return Err(ExpertError::BadValue {
                    table: "system1",
                    row,
                    reason: "j must be at least 1",
                });
            }
            if !(r.kw3 >= 0.0) {
                return Err(ExpertError::BadValue {
                    table: "system1",
                    row,
                    reason: "kw3 must be non-negative",
                });
            }
        }
        for (row, r) in self.system2.iter().enumerate() {
            if r.m == 0 {
                return Err(ExpertError::BadValue {
                    table: "system2",
                    row,
                    reason: "m must be at least 1",
                });
            }
            if !(r.kw1 >= 0.0 && r.kw2 >= 0.0) {
                return Err(ExpertError::BadValue {
                    table: "system2",
                    row,
                    reason: "kw1 and kw2 must be non-negative",
                });
            }
        }
        Ok(())
    }

    /// Look up both systems. Tables are assumed valid; a value no row covers
    /// falls back to the last row.
    pub fn eval(&self, inputs: &ExpertInputs) -> ExpertOutput {
        let e1 = inputs.e1(self.b_star);
        let e2 = inputs.e2();
        let r1 = self
            .system1
            .iter()
            .find(|r| e1 >= r.from && e1 < r.to)
            .or(self.system1.last())
            .copied();
        let r2 = self
            .system2
            .iter()
            .find(|r| e2 >= r.from && e2 < r.to)
            .or(self.system2.last())
            .copied();
        let r1 = r1.unwrap_or(System1Row {
            from: 0.0,
            to: f64::INFINITY,
            j: 1,
            kw3: 1.0,
        });
        let r2 = r2.unwrap_or(System2Row {
            from: 0.0,
            to: f64::INFINITY,
            kw1: 1.0,
            kw2: 1.0,
            m: 8,
        });
        ExpertOutput {
            e1,
            e2,
            j: r1.j,
            kw1: r2.kw1,
            kw2: r2.kw2,
            kw3: r1.kw3,
            m: r2.m,
        }
    }
}

/// Per-kind mapping of the table output onto a UAV's own limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExpertAdapter {
    pub j_scale: u32,
    pub m_offset: i32,
    pub m_min: usize,
    pub m_max: usize,
}

impl Default for ExpertAdapter {
    fn default() -> Self {
        ExpertAdapter {
            j_scale: 1,
            m_offset: 0,
            m_min: 1,
            m_max: 40,
        }
    }
}

impl ExpertAdapter {
    pub fn fixed_wing() -> Self {
        ExpertAdapter {
            j_scale: 2,
            m_offset: 3,
            m_min: 10,
            m_max: 15,
        }
    }

    /// Scale and clamp `j` into `j_lo..=j_hi` and `m` into the horizon bounds.
    pub fn apply(&self, out: ExpertOutput, j_lo: u32, j_hi: u32) -> ExpertOutput {
        let j = (out.j * self.j_scale).clamp(j_lo, j_hi);
        let m = (out.m as i64 + self.m_offset as i64).clamp(self.m_min as i64, self.m_max as i64)
            as usize;
        ExpertOutput { j, m, ..out }
    }
}

/// Closest distance from `position` to any reference point, `+∞` if none.
pub fn closest_target_distance(position: Vec2, references: &[Vec2]) -> f64 {
    references
        .iter()
        .map(|r| r.distance(position))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn out(b: f64, found: usize, total: usize) -> ExpertOutput {
        ExpertTables::default().eval(&ExpertInputs { b, found, total })
    }

    #[test]
    fn table_rows() {
        let o = out(100.0, 0, 5);
        assert_eq!((o.j, o.kw3), (2, 2.0));
        assert_eq!(o.e1, 0.625);
        let o = out(200.0, 4, 5);
        assert_eq!((o.j, o.kw3), (4, 1.0));
        assert_eq!((o.kw1, o.kw2, o.m), (0.8, 1.2, 10));
        let o = out(400.0, 5, 5);
        assert_eq!((o.j, o.kw3), (6, 0.8));
        assert_eq!((o.kw1, o.kw2, o.m), (0.4, 1.6, 12));
        let o = out(f64::INFINITY, 0, 0);
        assert_eq!(o.j, 6);
        assert_eq!(o.m, 12);
    }

    #[test]
    fn row_boundaries_are_low_inclusive() {
        assert_eq!(out(160.0, 0, 5).j, 4);
        assert_eq!(out(159.999, 0, 5).j, 2);
        assert_eq!(out(320.0, 0, 5).j, 6);
        assert_eq!(out(0.0, 3, 5).m, 8);
    }

    #[test]
    fn monotone_in_inputs() {
        let mut last_j = 0;
        for k in 0..1000 {
            let o = out(k as f64, 0, 5);
            assert!(o.j >= last_j);
            last_j = o.j;
        }
        let mut last_m = 0;
        for found in 0..=10 {
            let o = out(0.0, found, 10);
            assert!(o.m >= last_m);
            last_m = o.m;
        }
    }

    #[test]
    fn coverage_validation() {
        assert!(ExpertTables::default().validate().is_ok());
        let mut gap = ExpertTables::default();
        gap.system1[1].from = 1.2;
        assert!(matches!(
            gap.validate(),
            Err(ExpertError::Gap { row: 1, .. })
        ));
        let mut open = ExpertTables::default();
        open.system2[2].to = 5.0;
        assert!(matches!(
            open.validate(),
            Err(ExpertError::Unbounded { .. })
        ));
        let mut late = ExpertTables::default();
        late.system2[0].from = 0.1;
        assert!(matches!(late.validate(), Err(ExpertError::BadStart { .. })));
    }

    #[test]
    fn fixed_wing_adaptation() {
        let a = ExpertAdapter::fixed_wing();
        assert_eq!(a.apply(out(100.0, 0, 5), 6, 12).j, 6);
        assert_eq!(a.apply(out(200.0, 0, 5), 6, 12).j, 8);
        assert_eq!(a.apply(out(400.0, 0, 5), 6, 12).j, 12);
        assert_eq!(a.apply(out(400.0, 5, 5), 6, 12).m, 15);
        assert_eq!(a.apply(out(400.0, 0, 5), 6, 12).m, 11);
        assert_eq!(ExpertAdapter::default().apply(out(400.0, 0, 5), 1, 6).j, 6);
    }

    #[test]
    fn closest_distance() {
        let p = Vec2::new(0.0, 0.0);
        assert_eq!(closest_target_distance(p, &[]), f64::INFINITY);
        assert_eq!(
            closest_target_distance(p, &[Vec2::new(400.0, 0.0), Vec2::new(0.0, 100.0)]),
            100.0
        );
        assert_eq!(closest_target_distance(p, &[p]), 0.0);
    }
}
