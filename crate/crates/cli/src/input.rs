use std::path::Path;

use anyhow::Result;
use netbench_core::textio::{parse_dialog_spec, parse_problem, SourceError};
use netbench_core::{DialogSpec, Limits, Problem};

use crate::{exit, EXIT_FAILURE, EXIT_LIMIT, EXIT_USAGE};

pub enum Loaded {
    Problem(Problem),
    Dialog(DialogSpec),
}

impl Loaded {
    /// The planning problem; dialog specs are compiled.
    pub fn into_problem(self, limits: &Limits) -> Result<Problem> {
        match self {
            Loaded::Problem(pr) => Ok(pr),
            Loaded::Dialog(ds) => Ok(ds.compile(limits).map_err(|e| exit(EXIT_LIMIT, e.to_string()))?.problem),
        }
    }
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| exit(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))
}

pub fn located(path: &Path, e: &SourceError) -> anyhow::Error {
    exit(EXIT_FAILURE, format!("{}:{}:{}: {} error: {}", path.display(), e.line, e.column, e.kind, e.message))
}

fn is_dialog(path: &Path, text: &str) -> bool {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    if name.ends_with(".dlg.txt") {
        return true;
    }
    if name.ends_with(".plan.txt") {
        return false;
    }
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .is_some_and(|l| l.split_whitespace().next() == Some("dialog"))
}

/// Reads a problem or a dialog spec, chosen by extension or, failing that,
/// by the first keyword.
pub fn load(path: &Path) -> Result<Loaded> {
    let text = read(path)?;
    if is_dialog(path, &text) {
        parse_dialog_spec(&text).map(Loaded::Dialog).map_err(|e| located(path, &e))
    } else {
        parse_problem(&text).map(Loaded::Problem).map_err(|e| located(path, &e))
    }
}

/// `slot=answer` per line; blank lines and `#` comments are skipped.
pub fn read_answers(path: &Path) -> Result<Vec<(String, String)>> {
    let text = read(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((slot, answer)) = line.split_once('=') else {
            return Err(exit(EXIT_FAILURE, format!("{}:{}:1: expected `slot=answer`", path.display(), i + 1)));
        };
        out.push((slot.trim().to_string(), answer.trim().to_string()));
    }
    Ok(out)
}
