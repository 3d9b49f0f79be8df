//! Search-information exchange: per-UAV pose histories and the target table,
//! the fixed-size message package, latest-timestamp merge and local replay of
//! remote footprints.
//!
//! # Wire format
//!
//! All fields are little-endian. The header is six `u32`: magic
//! [`MAGIC`], [`VERSION`], sender id, `H`, `N_U`, `N_T`. The payload follows
//! as `f32` values: for each UAV slot `0..N_U` its `H` records
//! `(x, y, heading, t)` oldest first, unused records padded with
//! `(0, 0, 0, −1)`; then `N_T` target records `(x, y, t)`, empty slots
//! `(0, 0, −1)`. The payload is `(4·H·N_U + 3·N_T)·4` bytes.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid_world::{FootprintCache, SearchMap, SensorModel, Vec2};

pub const MAGIC: u32 = 0x4353_4850;
pub const VERSION: u32 = 1;
pub const HEADER_BYTES: usize = 24;
const PAD_T: f32 = -1.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("package too short for a header: {0} bytes")]
    Truncated(usize),
    #[error("bad magic {0:#010x}")]
    BadMagic(u32),
    #[error("unsupported version {0}")]
    UnsupportedVersion(u32),
    #[error("payload length {got} does not match header dimensions (expected {expected})")]
    LengthMismatch { expected: usize, got: usize },
    #[error("package dimensions H={h}, N_U={n_uav}, N_T={n_targets} do not match the local store")]
    DimensionMismatch {
        h: usize,
        n_uav: usize,
        n_targets: usize,
    },
    #[error("UAV slot {slot}: timestamps are not strictly increasing")]
    NonMonotonic { slot: usize },
}

/// One history entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseRecord {
    pub x: f32,
    pub y: f32,
    pub heading: f32,
    pub t: f32,
}

impl PoseRecord {
    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x as f64, self.y as f64)
    }
}

/// A confirmed target and when it was confirmed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetRecord {
    pub x: f32,
    pub y: f32,
    pub t: f32,
}

impl TargetRecord {
    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x as f64, self.y as f64)
    }
}

/// A UAV's local view of everyone's recent history and of found targets.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalStore {
    pub owner: u32,
    capacity: usize,
    histories: Vec<VecDeque<PoseRecord>>,
    targets: Vec<Option<TargetRecord>>,
}

/// What a merge changed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MergeReport {
    /// Newly acquired `(uav slot, record)` pairs, ordered by time then slot.
    pub replay: Vec<(usize, PoseRecord)>,
    /// Histories replaced wholesale.
    pub replaced: Vec<usize>,
    /// Target slots that changed.
    pub targets: Vec<usize>,
    /// Local records that disappeared in a replacement without being in the
    /// incoming history.
    pub dropped: usize,
}

impl MergeReport {
    pub fn is_empty(&self) -> bool {
        self.replaced.is_empty() && self.targets.is_empty()
    }

    pub fn absorb(&mut self, other: MergeReport) {
        self.replay.extend(other.replay);
        self.replaced.extend(other.replaced);
        self.targets.extend(other.targets);
        self.dropped += other.dropped;
    }

    /// Sort the replay set into time order, ties by UAV slot.
    pub fn sort(&mut self) {
        self.replay
            .sort_by(|a, b| a.1.t.total_cmp(&b.1.t).then(a.0.cmp(&b.0)));
    }
}

impl LocalStore {
    pub fn new(owner: u32, n_uav: usize, n_targets: usize, capacity: usize) -> Self {
        LocalStore {
            owner,
            capacity,
            histories: alloc::vec![VecDeque::with_capacity(capacity); n_uav],
            targets: alloc::vec![None; n_targets],
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn n_uav(&self) -> usize {
        self.histories.len()
    }

    pub fn n_targets(&self) -> usize {
        self.targets.len()
    }

    pub fn history(&self, slot: usize) -> &VecDeque<PoseRecord> {
        &self.histories[slot]
    }

    pub fn latest(&self, slot: usize) -> Option<&PoseRecord> {
        self.histories[slot].back()
    }

    fn latest_t(&self, slot: usize) -> Option<f32> {
        self.latest(slot).map(|r| r.t)
    }

    pub fn targets(&self) -> &[Option<TargetRecord>] {
        &self.targets
    }

    pub fn found_count(&self) -> usize {
        self.targets.iter().filter(|t| t.is_some()).count()
    }

    /// Append a record, evicting the oldest beyond capacity. Records not
    /// strictly newer than the latest are ignored; returns whether it was kept.
    pub fn push_pose(&mut self, slot: usize, record: PoseRecord) -> bool {
        if self.capacity == 0 || self.latest_t(slot).is_some_and(|t| record.t <= t) {
            return false;
        }
        let h = &mut self.histories[slot];
        if h.len() == self.capacity {
            h.pop_front();
        }
        h.push_back(record);
        true
    }

    /// Fill a target slot unless it already holds an entry at least as new.
    pub fn record_target(&mut self, slot: usize, record: TargetRecord) -> bool {
        match self.targets[slot] {
            Some(old) if old.t >= record.t => false,
            _ => {
                self.targets[slot] = Some(record);
                true
            }
        }
    }

    /// Snapshot into a package sent by `owner`.
    pub fn package(&self) -> MessagePackage {
        MessagePackage {
            sender: self.owner,
            capacity: self.capacity,
            histories: self
                .histories
                .iter()
                .map(|h| h.iter().copied().collect())
                .collect(),
            targets: self.targets.clone(),
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        self.package().encode()
    }

    /// Rebuild a store from a package, owned by the sender.
    pub fn from_package(pkg: &MessagePackage) -> LocalStore {
        LocalStore {
            owner: pkg.sender,
            capacity: pkg.capacity,
            histories: pkg
                .histories
                .iter()
                .map(|h| h.iter().copied().collect())
                .collect(),
            targets: pkg.targets.clone(),
        }
    }

    /// Latest-timestamp-wins merge. A UAV's history is replaced wholesale when
    /// the incoming latest record is strictly newer than the local one; a
    /// target slot is replaced when the incoming entry is strictly newer.
    pub fn merge(&mut self, pkg: &MessagePackage) -> Result<MergeReport, WireError> {
        if pkg.capacity != self.capacity
            || pkg.histories.len() != self.histories.len()
            || pkg.targets.len() != self.targets.len()
        {
            return Err(WireError::DimensionMismatch {
                h: pkg.capacity,
                n_uav: pkg.histories.len(),
                n_targets: pkg.targets.len(),
            });
        }
        let mut report = MergeReport::default();
        for (slot, incoming) in pkg.histories.iter().enumerate() {
            let Some(last_in) = incoming.last() else {
                continue;
            };
            let local_t = self.latest_t(slot);
            if local_t.is_some_and(|t| last_in.t <= t) {
                continue;
            }
            for r in incoming {
                if local_t.map_or(true, |t| r.t > t) {
                    report.replay.push((slot, *r));
                }
            }
            let local = &self.histories[slot];
            report.dropped += local
                .iter()
                .filter(|r| !incoming.iter().any(|i| i.t == r.t))
                .count();
            self.histories[slot] = incoming.iter().copied().collect();
            report.replaced.push(slot);
        }
        for (slot, incoming) in pkg.targets.iter().enumerate() {
            if let Some(rec) = incoming {
                if self.record_target(slot, *rec) {
                    report.targets.push(slot);
                }
            }
        }
        report.sort();
        Ok(report)
    }
}

/// Decoded message package.
#[derive(Debug, Clone, PartialEq)]
pub struct MessagePackage {
    pub sender: u32,
    /// `H`, the history length per UAV.
    pub capacity: usize,
    pub histories: Vec<Vec<PoseRecord>>,
    pub targets: Vec<Option<TargetRecord>>,
}

/// Payload size in bytes for the given dimensions.
pub fn payload_len(h: usize, n_uav: usize, n_targets: usize) -> usize {
    (4 * h * n_uav + 3 * n_targets) * 4
}

fn put_f32(out: &mut Vec<u8>, v: f32) {
    out.extend_from_slice(&v.to_le_bytes());
}

impl MessagePackage {
    pub fn encoded_len(&self) -> usize {
        HEADER_BYTES + payload_len(self.capacity, self.histories.len(), self.targets.len())
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        for v in [
            MAGIC,
            VERSION,
            self.sender,
            self.capacity as u32,
            self.histories.len() as u32,
            self.targets.len() as u32,
        ] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for h in &self.histories {
            for r in h.iter().take(self.capacity) {
                for v in [r.x, r.y, r.heading, r.t] {
                    put_f32(&mut out, v);
                }
            }
            for _ in h.len().min(self.capacity)..self.capacity {
                for v in [0.0, 0.0, 0.0, PAD_T] {
                    put_f32(&mut out, v);
                }
            }
        }
        for t in &self.targets {
            let (x, y, ts) = t.map_or((0.0, 0.0, PAD_T), |r| (r.x, r.y, r.t));
            for v in [x, y, ts] {
                put_f32(&mut out, v);
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<MessagePackage, WireError> {
        if bytes.len() < HEADER_BYTES {
            return Err(WireError::Truncated(bytes.len()));
        }
        let word = |i: usize| {
            u32::from_le_bytes([
                bytes[4 * i],
                bytes[4 * i + 1],
                bytes[4 * i + 2],
                bytes[4 * i + 3],
            ])
        };
        if word(0) != MAGIC {
            return Err(WireError::BadMagic(word(0)));
        }
        if word(1) != VERSION {
            return Err(WireError::UnsupportedVersion(word(1)));
        }
        let (sender, h, n_uav, n_targets) = (
            word(2),
            word(3) as usize,
            word(4) as usize,
            word(5) as usize,
        );
        let expected = (h as u64 * n_uav as u64 * 16 + n_targets as u64 * 12) as usize;
        let got = bytes.len() - HEADER_BYTES;
        if got != expected {
            return Err(WireError::LengthMismatch { expected, got });
        }
        let mut vals = bytes[HEADER_BYTES..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]));
        let mut next = || vals.next().unwrap_or(PAD_T);
        let mut histories = Vec::with_capacity(n_uav);
        for slot in 0..n_uav {
            let mut hist: Vec<PoseRecord> = Vec::new();
            for _ in 0..h {
                let r = PoseRecord {
                    x: next(),
                    y: next(),
                    heading: next(),
                    t: next(),
                };
                if r.t >= 0.0 {
                    if hist.last().is_some_and(|p| r.t <= p.t) {
                        return Err(WireError::NonMonotonic { slot });
                    }
                    hist.push(r);
                }
            }
            histories.push(hist);
        }
        let mut targets = Vec::with_capacity(n_targets);
        for _ in 0..n_targets {
            let r = TargetRecord {
                x: next(),
                y: next(),
                t: next(),
            };
            targets.push((r.t >= 0.0).then_some(r));
        }
        Ok(MessagePackage {
            sender,
            capacity: h,
            histories,
            targets,
        })
    }
}

/// Accounting for one replay pass.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ReplayReport {
    pub poses: usize,
    pub cells: usize,
    /// Sum of the `χ` decrements applied.
    pub chi_decrease: f64,
    pub detections: usize,
}

/// Re-apply remote footprints to a local map.
///
/// Every replayed pose covers its UAV's footprint with the no-detection
/// update, except the cell of a target table entry stamped with the same
/// time, which gets the detection update. `caches[slot]` is `None` for UAVs
/// without a sensor; their poses are skipped.
pub fn replay_detections(
    map: &mut SearchMap,
    replay: &[(usize, PoseRecord)],
    caches: &mut [Option<FootprintCache>],
    targets: &[Option<TargetRecord>],
    sensor: &SensorModel,
) -> ReplayReport {
    let mut report = ReplayReport::default();
    let grid = map.grid;
    let mut cells = Vec::new();
    for &(slot, rec) in replay {
        let Some(cache) = caches.get_mut(slot).and_then(|c| c.as_mut()) else {
            continue;
        };
        let cell = grid.cell_of(rec.position());
        cache.covered_indices(&grid, cell, rec.heading as f64, &mut cells);
        report.poses += 1;
        for &idx in &cells {
            let here = grid.cell_at(idx);
            let detected = targets
                .iter()
                .flatten()
                .any(|tr| tr.t == rec.t && grid.cell_of(tr.position()) == here);
            report.chi_decrease += map.chi[idx] * 0.5;
            map.observe(idx, detected, sensor);
            report.cells += 1;
            report.detections += detected as usize;
        }
    }
    report
}

/// A bidirectional link between two UAV slots, `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Link {
    pub a: usize,
    pub b: usize,
}

/// Position and radio reach of one UAV for link computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioNode {
    pub slot: usize,
    pub position: Vec2,
    pub altitude: f64,
    pub range: f64,
}

/// Links between every pair whose 3-D distance is within the longer of the
/// two ranges, in `(a, b)` order.
pub fn compute_links(nodes: &[RadioNode]) -> Vec<Link> {
    let mut links = Vec::new();
    for (i, na) in nodes.iter().enumerate() {
        for nb in &nodes[i + 1..] {
            let d = na.position - nb.position;
            let dz = na.altitude - nb.altitude;
            let dist2 = d.x * d.x + d.y * d.y + dz * dz;
            let reach = na.range.max(nb.range);
            if reach.is_infinite() || dist2 <= reach * reach {
                let (a, b) = if na.slot < nb.slot {
                    (na.slot, nb.slot)
                } else {
                    (nb.slot, na.slot)
                };
                links.push(Link { a, b });
            }
        }
    }
    links.sort();
    links
}
