//! External value oracle over a line protocol.
//!
//! The command runs once per session under `sh -c`. Each request is a mask
//! string followed by `\n` on the child's stdin; each response is one
//! decimal value per line on its stdout, in request order. Requests go out
//! in batches of [`BATCH`], flushed before the responses are read.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use crate::coalition::Coalition;
use crate::error::{config, Error, Result};

use super::Oracle;

pub const BATCH: usize = 256;

struct Session {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
    broken: Option<String>,
}

pub struct ExecOracle {
    n: usize,
    command: String,
    session: Mutex<Session>,
}

impl std::fmt::Debug for ExecOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExecOracle")
            .field("n", &self.n)
            .field("command", &self.command)
            .finish()
    }
}

impl ExecOracle {
    pub fn spawn(n: usize, command: &str) -> Result<Self> {
        if command.trim().is_empty() {
            return Err(config("exec oracle command is empty"));
        }
        if n == 0 || n > crate::coalition::MAX_PLAYERS {
            return Err(config(format!("exec oracle player count {n} out of range")));
        }
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| config(format!("cannot spawn oracle `{command}`: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(Self {
            n,
            command: command.to_string(),
            session: Mutex::new(Session {
                child,
                stdin,
                stdout,
                broken: None,
            }),
        })
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    fn round_trip(&self, session: &mut Session, masks: &[u64]) -> Result<Vec<f64>> {
        let mut request = String::with_capacity(masks.len() * (self.n + 1));
        for &m in masks {
            request.push_str(&Coalition::from_raw(self.n, m).to_mask_string());
            request.push('\n');
        }
        session
            .stdin
            .write_all(request.as_bytes())
            .and_then(|_| session.stdin.flush())
            .map_err(|e| Error::Oracle(format!("cannot write to oracle: {e}")))?;
        let mut out = Vec::with_capacity(masks.len());
        let mut line = String::new();
        for (k, &m) in masks.iter().enumerate() {
            line.clear();
            let read = session
                .stdout
                .read_line(&mut line)
                .map_err(|e| Error::Oracle(format!("cannot read from oracle: {e}")))?;
            if read == 0 {
                let status = match session.child.try_wait() {
                    Ok(Some(s)) => format!(" ({s})"),
                    _ => String::new(),
                };
                return Err(Error::Oracle(format!(
                    "oracle closed its output after {k} of {} responses in the batch{status}",
                    masks.len()
                )));
            }
            let text = line.trim();
            let x: f64 = text.parse().map_err(|_| {
                Error::Oracle(format!(
                    "unparseable response {text:?} for mask {}",
                    Coalition::from_raw(self.n, m)
                ))
            })?;
            if !x.is_finite() {
                return Err(Error::Oracle(format!(
                    "non-finite response {text:?} for mask {}",
                    Coalition::from_raw(self.n, m)
                )));
            }
            out.push(x);
        }
        Ok(out)
    }
}

impl Oracle for ExecOracle {
    fn players(&self) -> usize {
        self.n
    }

    fn evaluate(&self, mask: u64) -> Result<f64> {
        Ok(self.evaluate_batch(&[mask])?[0])
    }

    fn evaluate_batch(&self, masks: &[u64]) -> Result<Vec<f64>> {
        let mut session = self.session.lock().unwrap_or_else(|p| p.into_inner());
        if let Some(reason) = &session.broken {
            return Err(Error::Oracle(format!("oracle session unusable: {reason}")));
        }
        let mut out = Vec::with_capacity(masks.len());
        for chunk in masks.chunks(BATCH) {
            match self.round_trip(&mut session, chunk) {
                Ok(values) => out.extend(values),
                Err(e) => {
                    session.broken = Some(e.to_string());
                    return Err(e);
                }
            }
        }
        Ok(out)
    }

    fn concurrent(&self) -> bool {
        false
    }
}

impl Drop for ExecOracle {
    fn drop(&mut self) {
        let session = self.session.get_mut().unwrap_or_else(|p| p.into_inner());
        let _ = session.child.kill();
        let _ = session.child.wait();
    }
}
