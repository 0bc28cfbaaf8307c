//! `netbench`: validate, solve, simulate and serve planned dialogs.

mod bench;
mod chat;
mod input;

use std::fmt;
use std::io::Write as _;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use netbench_core::dialog::{make_sim_env, SimUser};
use netbench_core::exec::{run_episode, Faithful};
use netbench_core::generate::{gen_instance, GenClass, InstanceClass};
use netbench_core::search::Solver;
use netbench_core::textio::serialize_problem;
use netbench_core::{Algorithm, Limits, ObjectiveKind, SearchError};
use netbench_service::{ServiceConfig, SessionStore, DEFAULT_ADDR};

use input::{load, read_answers, Loaded};

/// A failure with a specific exit code.
#[derive(Debug)]
pub struct Exit {
    pub code: u8,
    pub message: String,
}

impl fmt::Display for Exit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Exit {}

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_LIMIT: u8 = 3;

pub fn exit(code: u8, message: impl Into<String>) -> anyhow::Error {
    Exit { code, message: message.into() }.into()
}

/// Solver refusals exit with the limit code; other search errors are plain
/// failures.
pub fn search_failure(e: SearchError) -> anyhow::Error {
    let code = if e.is_limit() { EXIT_LIMIT } else { EXIT_FAILURE };
    exit(code, format!("refused: {e}"))
}

#[derive(Parser)]
#[command(name = "netbench", version, about = "Exact cost/utility planning for dialogs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a problem (.plan.txt) or dialog spec (.dlg.txt).
    Validate { file: PathBuf },
    /// Print an optimal plan.
    Plan {
        file: PathBuf,
        #[arg(long, default_value = "dp")]
        algo: Algorithm,
        /// Split brute-force enumeration over threads.
        #[arg(long)]
        parallel: bool,
    },
    /// Print the nondominated (cost, utility) points.
    Pareto { file: PathBuf },
    /// Run a plan-execute-replan episode against a simulated user.
    Simulate {
        file: PathBuf,
        /// `slot=answer` lines; unlisted slots get their default.
        #[arg(long)]
        answers: Option<PathBuf>,
        /// Random answers from this seed instead of a script.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "dp")]
        algo: Algorithm,
    },
    /// Conduct a dialog in the terminal.
    Chat {
        spec: PathBuf,
        #[arg(long, default_value = "dp")]
        algo: Algorithm,
    },
    /// Emit a random problem of the given class.
    Gen {
        #[arg(long)]
        class: InstanceClass,
        #[arg(long, default_value_t = 3)]
        vars: usize,
        #[arg(long, default_value_t = 3)]
        dom: usize,
        #[arg(long, default_value_t = 5)]
        ops: usize,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "netbenefit")]
        objective: ObjectiveKind,
        /// Write here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Solve every problem in a directory with every algorithm and check
    /// that they agree.
    Bench {
        dir: PathBuf,
        /// Solve instances concurrently.
        #[arg(long)]
        parallel: bool,
    },
    /// Run the HTTP session service.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        addr: std::net::IpAddr,
        #[arg(long, default_value_t = 8750)]
        port: u16,
        /// Serve files from this directory at `/`.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
        /// Append session transcripts to files in this directory.
        #[arg(long)]
        transcripts: Option<PathBuf>,
        /// Minutes of inactivity before a session is abandoned.
        #[arg(long, default_value_t = 30)]
        idle_minutes: u64,
        #[arg(long, default_value = "dp")]
        algo: Algorithm,
    },
}

fn limits() -> Result<Limits> {
    Limits::from_env().map_err(|e| exit(EXIT_USAGE, e.to_string()))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Validate { file } => {
            match load(&file)? {
                Loaded::Problem(pr) => writeln!(
                    out,
                    "ok problem {} vars={} ops={} horizon={} objective={}",
                    pr.name(),
                    pr.variables().len(),
                    pr.operators().len(),
                    pr.horizon(),
                    pr.objective().kind()
                )?,
                Loaded::Dialog(ds) => {
                    let compiled = ds.compile(&limits()?).map_err(|e| exit(EXIT_LIMIT, e.to_string()))?;
                    writeln!(
                        out,
                        "ok dialog {} slots={} queries={} advisories={} turns={} ops={}",
                        ds.name(),
                        ds.slots().len(),
                        ds.queries().len(),
                        ds.advisories().len(),
                        ds.max_turns(),
                        compiled.problem.operators().len()
                    )?
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Plan { file, algo, parallel } => {
            let limits = limits()?;
            let pr = load(&file)?.into_problem(&limits)?;
            let res = Solver::new(limits).parallel(parallel).solve(algo, &pr).map_err(search_failure)?;
            match &res.value {
                Some(v) => writeln!(out, "value {v}")?,
                None => writeln!(out, "value infeasible")?,
            }
            writeln!(out, "plan {}", res.plan)?;
            writeln!(out, "algorithm {}", res.algorithm)?;
            writeln!(out, "nodes {}", res.nodes_expanded)?;
            if res.degenerate {
                writeln!(out, "degenerate yes")?;
            }
            Ok(if res.value.is_some() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAILURE) })
        }
        Command::Pareto { file } => {
            let limits = limits()?;
            let pr = load(&file)?.into_problem(&limits)?;
            let front = Solver::new(limits).pareto(&pr).map_err(search_failure)?;
            for p in &front.points {
                writeln!(out, "point cost={} utility={} plan={}", p.cost, p.utility, p.plan)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate { file, answers, seed, algo } => {
            let limits = limits()?;
            let solver = Solver::new(limits);
            let episode = match load(&file)? {
                Loaded::Problem(pr) => {
                    if answers.is_some() || seed.is_some() {
                        return Err(exit(EXIT_USAGE, "--answers and --seed apply to dialog specs only"));
                    }
                    run_episode(&pr, Faithful, &solver, algo).map_err(search_failure)?
                }
                Loaded::Dialog(ds) => {
                    let user = match (answers, seed) {
                        (Some(_), Some(_)) => return Err(exit(EXIT_USAGE, "give either --answers or --seed")),
                        (Some(path), None) => SimUser::Scripted(read_answers(&path)?.into_iter().collect()),
                        (None, Some(seed)) => SimUser::Random { seed },
                        (None, None) => SimUser::Scripted(Default::default()),
                    };
                    let pr = ds.compile(&limits).map_err(|e| exit(EXIT_LIMIT, e.to_string()))?.problem;
                    let env = make_sim_env(&ds, user).map_err(|e| exit(EXIT_FAILURE, e.to_string()))?;
                    run_episode(&pr, env, &solver, algo).map_err(search_failure)?
                }
            };
            write!(out, "{}", episode.transcript())?;
            if let Some(fault) = &episode.fault {
                eprintln!("error: {fault}");
                return Ok(ExitCode::from(EXIT_FAILURE));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Chat { spec, algo } => {
            let limits = limits()?;
            let text = input::read(&spec)?;
            let config = ServiceConfig { limits, algorithm: algo, ..ServiceConfig::default() };
            let store = SessionStore::new(config);
            let stdin = std::io::stdin().lock();
            chat::run(&store, &text, &spec, stdin, &mut out, &mut std::io::stderr())
        }
        Command::Gen { class, vars, dom, ops, k, seed, objective, output } => {
            let g = GenClass { class, vars, domain: dom, ops, horizon: k, seed };
            let pr = gen_instance(&g, objective).map_err(|e| exit(EXIT_USAGE, e.to_string()))?;
            let text = serialize_problem(&pr);
            match output {
                Some(path) => {
                    std::fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?
                }
                None => out.write_all(text.as_bytes())?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { dir, parallel } => {
            let limits = limits()?;
            bench::run(&dir, &limits, parallel, &mut out)
        }
        Command::Serve { addr, port, static_dir, transcripts, idle_minutes, algo } => {
            let limits = limits()?;
            if let Some(dir) = &transcripts {
                std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            }
            let config = ServiceConfig {
                limits,
                algorithm: algo,
                idle_timeout: Duration::from_secs(idle_minutes.saturating_mul(60)),
                transcript_dir: transcripts,
            };
            let addr = SocketAddr::new(addr, port);
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async move {
                let listener =
                    netbench_service::http::bind(addr).await.with_context(|| format!("cannot bind {addr}"))?;
                let local = listener.local_addr()?;
                eprintln!("listening on http://{local} (default {DEFAULT_ADDR})");
                netbench_service::serve(listener, Arc::new(SessionStore::new(config)), static_dir).await?;
                anyhow::Ok(())
            })?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let code = e.downcast_ref::<Exit>().map_or(EXIT_FAILURE, |x| x.code);
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
