//! Scenario files.
//!
//! A scenario is one TOML document. Top-level keys set the run (`name`,
//! `seed`, `duration`, `dt`, `strategy`, `early_exit`); tables hold the rest:
//! `[area]`, `[[uavs]]`, `[[targets]]`, `[[denied_areas]]`, `[[events]]`,
//! `[expert_tables]`, `[ga.rotor]` / `[ga.fixed_wing]`, and the overrides
//! `[search]` and `[platforms.rotor]` / `[platforms.fixed_wing]`. Every table
//! except `[area]` and `[[uavs]]` may be omitted to take the defaults. See
//! `scenarios/paper.toml` for a complete annotated example.

use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};

use coopsearch_core::scenario::Issue;
use coopsearch_core::Scenario;
use thiserror::Error;
use toml_edit::{Document, Item};

/// A validation problem tied to a line of the source file when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct LocatedIssue {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for LocatedIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{}: {message}", line.map_or_else(|| "?".to_string(), |l| l.to_string()))]
    Parse {
        origin: String,
        line: Option<usize>,
        message: String,
    },
    #[error("{origin}: {} problem(s)\n{}", issues.len(), render(issues))]
    Invalid {
        origin: String,
        issues: Vec<LocatedIssue>,
    },
}

fn render(issues: &[LocatedIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("  {i}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Read, parse and validate a scenario file.
pub fn load(path: &Path) -> Result<Scenario, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&text, &path.display().to_string())
}

/// Parse and validate scenario text. `origin` names the source in messages.
pub fn parse(text: &str, origin: &str) -> Result<Scenario, LoadError> {
    let scenario: Scenario = toml::from_str(text).map_err(|e| LoadError::Parse {
        origin: origin.to_string(),
        line: e.span().map(|s| line_of(text, s.start)),
        message: e.message().trim().to_string(),
    })?;
    scenario.validate().map_err(|err| LoadError::Invalid {
        origin: origin.to_string(),
        issues: locate_all(text, &err.issues),
    })?;
    Ok(scenario)
}

/// Attach source lines to field-path issues such as `uavs[2].position`.
pub fn locate_all(text: &str, issues: &[Issue]) -> Vec<LocatedIssue> {
    let doc = Document::parse(text).ok();
    issues
        .iter()
        .map(|i| LocatedIssue {
            line: doc
                .as_ref()
                .and_then(|d| span_of(d.as_item(), &i.path))
                .map(|s| line_of(text, s.start)),
            field: i.path.clone(),
            message: i.message.clone(),
        })
        .collect()
}

enum Step<'a> {
    Key(&'a str),
    Index(usize),
}

fn steps(path: &str) -> Vec<Step<'_>> {
    let mut out = Vec::new();
    for part in path.split('.') {
        let (key, rest) = part.split_once('[').unwrap_or((part, ""));
        if !key.is_empty() {
            out.push(Step::Key(key));
        }
        for idx in rest.split('[') {
            if let Ok(i) = idx.trim_end_matches(']').parse() {
                out.push(Step::Index(i));
            }
        }
    }
    out
}

/// Span of the deepest item along `path` that exists in the document.
fn span_of(root: &Item, path: &str) -> Option<Range<usize>> {
    let mut item = root;
    let mut best = None;
    for step in steps(path) {
        let next = match step {
            Step::Key(k) => item.get(k),
            Step::Index(i) => item.get(i),
        };
        match next {
            Some(n) => {
                item = n;
                best = n.span().or(best);
            }
            None => break,
        }
    }
    best
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Serialize a scenario back to TOML.
pub fn to_toml(scenario: &Scenario) -> Result<String, toml::ser::Error> {
    toml::to_string_pretty(scenario)
}
