use std::io::{BufRead, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::Result;
use netbench_core::dialog::DialogError;
use netbench_core::Episode;
use netbench_service::{AgentAction, ServiceError, SessionStore, SpecSource};

use crate::input::located;
use crate::{exit, search_failure, EXIT_FAILURE, EXIT_LIMIT};

fn failure(path: &Path, e: ServiceError) -> anyhow::Error {
    match e {
        ServiceError::Parse(se) => located(path, &se),
        ServiceError::Dialog(e @ DialogError::TooManyOperators { .. }) => exit(EXIT_LIMIT, e.to_string()),
        ServiceError::Search(se) => search_failure(se),
        other => exit(EXIT_FAILURE, other.to_string()),
    }
}

/// Talks to the user on `talk` and reads answers from `input`. When the
/// dialog ends, the transcript goes to `out` in the same format as
/// `simulate`.
pub fn run(
    store: &SessionStore,
    spec_text: &str,
    path: &Path,
    mut input: impl BufRead,
    out: &mut impl Write,
    talk: &mut impl Write,
) -> Result<ExitCode> {
    let mut reply = store.create(SpecSource::Text(spec_text.to_string())).map_err(|e| failure(path, e))?;
    let id = reply.session_id.clone();
    loop {
        for a in &reply.actions {
            if let AgentAction::Act { message, .. } = a {
                writeln!(talk, "agent: {message}")?;
            }
        }
        let AgentAction::Ask { prompt, answers, .. } = &reply.action else {
            break;
        };
        writeln!(talk, "agent: {prompt} [{}]", answers.join(" / "))?;
        loop {
            write!(talk, "> ")?;
            talk.flush()?;
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 {
                writeln!(talk)?;
                store.abandon(&id).map_err(|e| failure(path, e))?;
                return finish(store, &id, path, out);
            }
            match store.advance(&id, line.trim()) {
                Ok(r) => {
                    reply = r;
                    break;
                }
                Err(ServiceError::IllegalAnswer { allowed, .. }) => {
                    writeln!(talk, "agent: please answer one of: {}", allowed.join(", "))?;
                }
                Err(e) => return Err(failure(path, e)),
            }
        }
    }
    writeln!(talk, "agent: goodbye")?;
    finish(store, &id, path, out)
}

fn finish(store: &SessionStore, id: &str, path: &Path, out: &mut impl Write) -> Result<ExitCode> {
    let snap = store.get(id).map_err(|e| failure(path, e))?;
    let episode = Episode {
        turns: snap.turns.iter().map(|t| t.turn.clone()).collect(),
        realized_value: snap.value.clone(),
        status: snap.status.outcome().expect("finished session"),
        fault: None,
    };
    write!(out, "{}", episode.transcript())?;
    Ok(ExitCode::SUCCESS)
}
