//! An external process driven over a line protocol on stdin and stdout.
//!
//! ```text
//! RESET          -> OK
//! STEP <letter>  -> OUT <p1> <p2> ...   or   VAL <var>=<float> ...
//! ```

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use super::{RawOutput, Sut, SutError};
use crate::formula::{PropSet, Valuation};

pub struct ProcessSut {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
    inputs: Vec<String>,
    propositions: BTreeSet<String>,
    timeout: Duration,
}

impl ProcessSut {
    /// Spawns `command[0]` with the remaining arguments.
    pub fn spawn(
        command: &[String],
        inputs: Vec<String>,
        propositions: BTreeSet<String>,
        timeout: Duration,
    ) -> Result<Self, SutError> {
        let (prog, args) = command
            .split_first()
            .ok_or_else(|| SutError::Io("empty command line".into()))?;
        let mut child = Command::new(prog)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| SutError::Io(format!("cannot start `{prog}`: {e}")))?;
        let stdin = child.stdin.take().expect("stdin is piped");
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });
        Ok(ProcessSut {
            child,
            stdin,
            lines: rx,
            inputs,
            propositions,
            timeout,
        })
    }

    fn exchange(&mut self, request: &str) -> Result<String, SutError> {
        writeln!(self.stdin, "{request}")
            .and_then(|_| self.stdin.flush())
            .map_err(|e| self.exited(e.to_string()))?;
        match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => Ok(line),
            Ok(Err(e)) => Err(SutError::Io(e.to_string())),
            Err(RecvTimeoutError::Timeout) => Err(SutError::Timeout(self.timeout)),
            Err(RecvTimeoutError::Disconnected) => Err(self.exited("stdout closed".into())),
        }
    }

    fn exited(&mut self, detail: String) -> SutError {
        match self.child.try_wait() {
            Ok(Some(status)) => SutError::Exited(status.to_string()),
            _ => SutError::Exited(detail),
        }
    }

    fn parse_reply(&self, line: &str) -> Result<RawOutput, SutError> {
        let mut words = line.split_whitespace();
        match words.next() {
            Some("OUT") => {
                let set: PropSet = words.map(String::from).collect();
                if !self.propositions.is_empty() {
                    if let Some(p) = set.iter().find(|p| !self.propositions.contains(*p)) {
                        return Err(SutError::Protocol(format!("undeclared proposition `{p}`")));
                    }
                }
                Ok(RawOutput::Props(set))
            }
            Some("VAL") => {
                let mut val = Valuation::new();
                for w in words {
                    let (k, x) = w.split_once('=').ok_or_else(|| {
                        SutError::Protocol(format!("expected `var=value`, got `{w}`"))
                    })?;
                    let x: f64 = x
                        .parse()
                        .map_err(|_| SutError::Protocol(format!("bad number in `{w}`")))?;
                    if k.is_empty() || !x.is_finite() {
                        return Err(SutError::Protocol(format!("bad sample `{w}`")));
                    }
                    val.insert(k.to_string(), x);
                }
                if val.is_empty() {
                    return Err(SutError::Protocol("empty VAL reply".into()));
                }
                Ok(RawOutput::Values(val))
            }
            _ => Err(SutError::Protocol(format!("unexpected reply `{line}`"))),
        }
    }
}

impl Sut for ProcessSut {
    fn inputs(&self) -> &[String] {
        &self.inputs
    }

    fn propositions(&self) -> BTreeSet<String> {
        self.propositions.clone()
    }

    fn reset(&mut self) -> Result<(), SutError> {
        let reply = self.exchange("RESET")?;
        if reply.trim() != "OK" {
            return Err(SutError::Protocol(format!("expected `OK`, got `{reply}`")));
        }
        Ok(())
    }

    fn step(&mut self, input: usize) -> Result<RawOutput, SutError> {
        let letter = self
            .inputs
            .get(input)
            .ok_or(SutError::UnknownInput(input))?
            .clone();
        let reply = self.exchange(&format!("STEP {letter}"))?;
        self.parse_reply(&reply)
    }
}

impl Drop for ProcessSut {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
