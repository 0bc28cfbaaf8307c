use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use netbench_core::search::Solver;
use netbench_core::{Algorithm, Limits, SolveResult};
use rayon::prelude::*;

use crate::input::load;
use crate::{exit, EXIT_FAILURE, EXIT_USAGE};

const ORDER: [Algorithm; 3] = [Algorithm::Dp, Algorithm::Bnb, Algorithm::Brute];

struct Row {
    algo: Algorithm,
    outcome: Result<SolveResult, String>,
    micros: u128,
}

struct Report {
    name: String,
    rows: Result<Vec<Row>, String>,
}

fn instances(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries =
        std::fs::read_dir(dir).map_err(|e| exit(EXIT_USAGE, format!("cannot read {}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.with_context(|| format!("cannot list {}", dir.display()))?.path();
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        if name.ends_with(".plan.txt") || name.ends_with(".dlg.txt") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn solve_all(path: &Path, limits: &Limits) -> Report {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let rows = load(path).and_then(|l| l.into_problem(limits)).map_err(|e| format!("{e:#}")).map(|pr| {
        let solver = Solver::new(*limits);
        ORDER
            .iter()
            .map(|&algo| {
                let started = Instant::now();
                let outcome = solver.solve(algo, &pr).map_err(|e| e.to_string());
                Row { algo, outcome, micros: started.elapsed().as_micros() }
            })
            .collect()
    });
    Report { name, rows }
}

/// One line per (instance, algorithm), one verdict line per instance and a
/// summary. Any disagreement makes the run fail.
pub fn run(dir: &Path, limits: &Limits, parallel: bool, out: &mut impl Write) -> Result<ExitCode> {
    let files = instances(dir)?;
    let reports: Vec<Report> = if parallel {
        files.par_iter().map(|f| solve_all(f, limits)).collect()
    } else {
        files.iter().map(|f| solve_all(f, limits)).collect()
    };
    let (mut agreed, mut bounded, mut failed) = (0usize, 0usize, 0usize);
    for report in &reports {
        let rows = match &report.rows {
            Ok(rows) => rows,
            Err(e) => {
                eprintln!("error: {e}");
                writeln!(out, "instance={} error=load", report.name)?;
                failed += 1;
                continue;
            }
        };
        for row in rows {
            match &row.outcome {
                Ok(res) => writeln!(
                    out,
                    "instance={} algo={} value={} nodes={} micros={}",
                    report.name,
                    row.algo,
                    res.value.as_ref().map_or("infeasible".to_string(), ToString::to_string),
                    res.nodes_expanded,
                    row.micros
                )?,
                Err(_) => writeln!(
                    out,
                    "instance={} algo={} value=refused nodes=- micros={}",
                    report.name, row.algo, row.micros
                )?,
            }
        }
        let solved: Vec<&SolveResult> = rows.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
        let agree = solved.windows(2).all(|w| w[0].value == w[1].value);
        let nodes = |a: Algorithm| solved.iter().find(|r| r.algorithm == a).map(|r| r.nodes_expanded);
        let bnb_le_brute = match (nodes(Algorithm::Bnb), nodes(Algorithm::Brute)) {
            (Some(b), Some(f)) => Some(b <= f),
            _ => None,
        };
        let yn = |b: bool| if b { "yes" } else { "no" };
        writeln!(out, "instance={} agree={} bnb_le_brute={}", report.name, yn(agree), bnb_le_brute.map_or("n/a", yn))?;
        if agree {
            agreed += 1;
        } else {
            eprintln!("error: algorithms disagree on {}", report.name);
            failed += 1;
        }
        if bnb_le_brute == Some(true) {
            bounded += 1;
        }
    }
    writeln!(out, "instances={} agreed={} bnb_le_brute={} failed={}", reports.len(), agreed, bounded, failed)?;
    if failed > 0 {
        return Err(exit(EXIT_FAILURE, format!("{failed} instance(s) failed")));
    }
    Ok(ExitCode::SUCCESS)
}
