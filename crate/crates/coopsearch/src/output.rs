//! Run artifacts: delimited logs, map snapshots and an SVG trajectory plot.
//!
//! Everything except `timing.csv` depends only on the scenario and seed, so
//! re-running a seed rewrites those files byte for byte.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use coopsearch_core::{DeniedArea, DeniedShape, SearchMap};
use coopsearch_core::{GridSpec, Scenario, SimOutput, StrategySummary, Target, UavKind};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
#[error("cannot write {path}: {source}")]
pub struct OutputError {
    pub path: PathBuf,
    #[source]
    pub source: io::Error,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> OutputError + '_ {
    move |source| OutputError {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> OutputError + '_ {
    move |e| OutputError {
        path: path.to_path_buf(),
        source: io::Error::other(e),
    }
}

/// Global `χ` and `p` layers at one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: u32,
    pub grid: GridSpec,
    pub chi: Vec<f64>,
    pub p: Vec<f64>,
}

impl Snapshot {
    pub fn of(t: u32, map: &SearchMap) -> Self {
        Snapshot {
            t,
            grid: map.grid,
            chi: map.chi.clone(),
            p: map.p.clone(),
        }
    }
}

/// Scene geometry for the trajectory plot.
#[derive(Debug, Clone, Default)]
pub struct Scene {
    pub targets: Vec<Target>,
    pub denied_start: Vec<DeniedArea>,
    pub denied_end: Vec<DeniedArea>,
}

pub fn create_dir(dir: &Path) -> Result<(), OutputError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Serialize `rows` with a header row.
pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), OutputError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for row in rows {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn write_table(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), OutputError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// One row per epoch: global state, link count, violation counters, then
/// `chi`, `p`, `found`, `length` and `alive` for every UAV.
pub fn write_metrics(path: &Path, out: &SimOutput) -> Result<(), OutputError> {
    let mut header: Vec<String> = [
        "t",
        "global_chi",
        "global_p",
        "targets_found",
        "links",
        "violations",
        "emergency_violations",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    if let Some(first) = out.metrics.first() {
        for u in &first.uavs {
            for field in ["chi", "p", "found", "length", "alive"] {
                header.push(format!("{field}_{}", u.id));
            }
        }
    }
    let rows: Vec<Vec<String>> = out
        .metrics
        .iter()
        .map(|f| {
            let mut row = vec![
                f.t.to_string(),
                f.global_chi.to_string(),
                f.global_p.to_string(),
                f.targets_found.to_string(),
                f.links.to_string(),
                f.violations.to_string(),
                f.emergency_violations.to_string(),
            ];
            for u in &f.uavs {
                row.extend([
                    u.chi.to_string(),
                    u.p.to_string(),
                    u.found.to_string(),
                    u.length.to_string(),
                    u8::from(u.alive).to_string(),
                ]);
            }
            row
        })
        .collect();
    write_table(path, &header, &rows)
}

/// Row-major matrix, one grid row per line, bottom row first.
pub fn write_matrix(path: &Path, grid: &GridSpec, values: &[f64]) -> Result<(), OutputError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let cols = grid.cols as usize;
    for row in values.chunks(cols) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(",")).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Write every log of one run into `dir`.
pub fn write_run(
    dir: &Path,
    scenario: &Scenario,
    out: &SimOutput,
    snapshots: &[Snapshot],
    scene: &Scene,
) -> Result<(), OutputError> {
    create_dir(dir)?;
    write_metrics(&dir.join("metrics.csv"), out)?;
    write_rows(&dir.join("trajectory.csv"), &out.trajectory)?;
    write_rows(&dir.join("decisions.csv"), &out.decisions)?;
    write_rows(&dir.join("timing.csv"), &out.timing)?;
    write_rows(&dir.join("expert.csv"), &out.expert)?;
    write_rows(&dir.join("links.csv"), &out.links)?;
    write_rows(&dir.join("events.csv"), &out.events)?;
    write_rows(&dir.join("contacts.csv"), &out.contacts)?;
    if !snapshots.is_empty() {
        let snap_dir = dir.join("snapshots");
        create_dir(&snap_dir)?;
        for s in snapshots {
            write_matrix(&snap_dir.join(format!("chi_t{:05}.csv", s.t)), &s.grid, &s.chi)?;
            write_matrix(&snap_dir.join(format!("p_t{:05}.csv", s.t)), &s.grid, &s.p)?;
        }
    }
    let svg_path = dir.join("trajectory.svg");
    fs::write(&svg_path, render_svg(scenario, out, scene)).map_err(io_err(&svg_path))
}

/// Per-run summary line shared by `run` and the aggregate file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub strategy: u8,
    pub targets_found: usize,
    pub all_found_at: Option<u32>,
    pub final_chi: f64,
    pub final_p: f64,
    pub violations: u32,
    pub emergencies: usize,
    pub contact_epochs: usize,
    pub mean_ga_seconds: f64,
    pub max_ga_seconds: f64,
}

impl RunSummary {
    pub fn of(out: &SimOutput, n_targets: usize) -> Self {
        let last = out.final_frame();
        let times: Vec<f64> = out.timing.iter().map(|r| r.seconds).collect();
        RunSummary {
            seed: out.seed,
            strategy: out.strategy.map_or(0, |s| s.number()),
            targets_found: last.map_or(0, |f| f.targets_found),
            all_found_at: out.all_found_at(n_targets),
            final_chi: last.map_or(f64::NAN, |f| f.global_chi),
            final_p: last.map_or(f64::NAN, |f| f.global_p),
            violations: last.map_or(0, |f| f.violations),
            emergencies: out.emergencies(),
            contact_epochs: out.contact_epochs(),
            mean_ga_seconds: coopsearch_core::sim::mean(&times),
            max_ga_seconds: times.iter().copied().fold(0.0, f64::max),
        }
    }
}

/// Mean curves per strategy, one row per epoch.
pub fn write_curves(path: &Path, summaries: &[StrategySummary]) -> Result<(), OutputError> {
    let mut header = vec!["t".to_string()];
    for s in summaries {
        header.push(format!("chi_s{}", s.strategy.number()));
        header.push(format!("p_s{}", s.strategy.number()));
    }
    let len = summaries.iter().map(|s| s.mean_chi.len()).max().unwrap_or(0);
    let rows: Vec<Vec<String>> = (0..len)
        .map(|t| {
            let mut row = vec![t.to_string()];
            for s in summaries {
                row.push(s.mean_chi.get(t).map_or(String::new(), |v| v.to_string()));
                row.push(s.mean_p.get(t).map_or(String::new(), |v| v.to_string()));
            }
            row
        })
        .collect();
    write_table(path, &header, &rows)
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

fn shape_svg(area: &DeniedArea, h: f64, style: &str) -> String {
    match &area.shape {
        DeniedShape::Circle { radius } => format!(
            "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"{:.1}\" {style}/>",
            area.center.x,
            h - area.center.y,
            radius
        ),
        DeniedShape::Polygon { vertices } => {
            let pts: Vec<String> = vertices
                .iter()
                .map(|v| format!("{:.1},{:.1}", area.center.x + v.x, h - (area.center.y + v.y)))
                .collect();
            format!("<polygon points=\"{}\" {style}/>", pts.join(" "))
        }
    }
}

/// Top-down plot: area outline, denied areas at start (solid) and end
/// (dashed, when they moved), targets, and one polyline per UAV.
pub fn render_svg(scenario: &Scenario, out: &SimOutput, scene: &Scene) -> String {
    let (w, h) = (scenario.area.width, scenario.area.height);
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-20 -20 {} {}\" width=\"{}\" height=\"{}\">\n",
        w + 40.0,
        h + 40.0,
        w + 40.0,
        h + 40.0
    ));
    s.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\" stroke=\"black\"/>\n"
    ));
    for a in &scene.denied_start {
        s.push_str(&shape_svg(a, h, "fill=\"#f4cccc\" stroke=\"#cc0000\""));
        s.push('\n');
    }
    for (a, b) in scene.denied_start.iter().zip(&scene.denied_end) {
        if a.center != b.center {
            s.push_str(&shape_svg(b, h, "fill=\"none\" stroke=\"#cc0000\" stroke-dasharray=\"6 4\""));
            s.push('\n');
        }
    }
    for t in &scene.targets {
        let (x, y) = (t.position.x, h - t.position.y);
        s.push_str(&format!(
            "<path d=\"M{:.1} {:.1}L{:.1} {:.1}M{:.1} {:.1}L{:.1} {:.1}\" stroke=\"black\" stroke-width=\"2\"/>\n",
            x - 8.0,
            y - 8.0,
            x + 8.0,
            y + 8.0,
            x - 8.0,
            y + 8.0,
            x + 8.0,
            y - 8.0
        ));
    }
    let mut ids: Vec<u32> = out.trajectory.iter().map(|r| r.id).collect();
    ids.sort_unstable();
    ids.dedup();
    for (k, id) in ids.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let fixed_wing = scenario
            .roster()
            .iter()
            .any(|u| u.id == *id && u.kind == UavKind::FixedWing);
        let pts: Vec<String> = out
            .trajectory
            .iter()
            .filter(|r| r.id == *id)
            .map(|r| format!("{:.1},{:.1}", r.x, h - r.y))
            .collect();
        let dash = if fixed_wing { " stroke-dasharray=\"4 3\"" } else { "" };
        s.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash}/>\n",
            pts.join(" ")
        ));
        if let Some(first) = out.trajectory.iter().find(|r| r.id == *id) {
            s.push_str(&format!(
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"5\" fill=\"{color}\"/>\n<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"14\">{id}</text>\n",
                first.x,
                h - first.y,
                first.x + 7.0,
                h - first.y - 7.0
            ));
        }
    }
    s.push_str("</svg>\n");
    s
}
