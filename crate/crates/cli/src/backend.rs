//! Selection and construction of the system under test.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use bbcheck::formula::{AtomKind, Formula};
use bbcheck::machine::{load_machine, MealyMachine};
use bbcheck::sut::{
    MealySut, OutputMapper, ProcessSut, Sut, SutSession, TransmissionParams, TransmissionSim,
};
use clap::Args;

#[derive(Debug, Clone, Args)]
pub struct SutArgs {
    /// Mealy machine file used as the system under test.
    #[arg(long, value_name = "FILE")]
    pub machine: Option<PathBuf>,
    /// Use the built-in transmission simulator.
    #[arg(long)]
    pub simulator: bool,
    /// External program speaking the line protocol, split on whitespace.
    #[arg(long, value_name = "COMMAND")]
    pub process: Option<String>,
    /// Input letters of the external program.
    #[arg(long, value_delimiter = ',')]
    pub inputs: Vec<String>,
    /// Propositions the external program may emit.
    #[arg(long, value_delimiter = ',')]
    pub propositions: Vec<String>,
    #[arg(long, default_value_t = 5000, value_name = "MS")]
    pub step_timeout_ms: u64,
    #[arg(long)]
    pub sim_accel: Option<f64>,
    #[arg(long)]
    pub sim_brake: Option<f64>,
    #[arg(long)]
    pub sim_drag: Option<f64>,
    #[arg(long)]
    pub sim_rpm_factor: Option<f64>,
    #[arg(long)]
    pub sim_shift_up: Option<f64>,
    #[arg(long)]
    pub sim_shift_down: Option<f64>,
}

/// A fully resolved backend that can open any number of sessions.
#[derive(Debug, Clone)]
pub enum Backend {
    Machine(MealyMachine),
    Simulator(TransmissionParams),
    Process {
        command: Vec<String>,
        inputs: Vec<String>,
        propositions: BTreeSet<String>,
        timeout: Duration,
    },
}

impl SutArgs {
    pub fn backend(&self) -> Result<Backend> {
        let chosen = [
            self.machine.is_some(),
            self.simulator,
            self.process.is_some(),
        ];
        match chosen.iter().filter(|&&b| b).count() {
            0 => bail!("select a system under test with --machine, --simulator or --process"),
            1 => {}
            _ => bail!("select exactly one of --machine, --simulator and --process"),
        }
        if let Some(path) = &self.machine {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read `{}`", path.display()))?;
            let m = load_machine(&text)
                .with_context(|| format!("in machine file `{}`", path.display()))?;
            return Ok(Backend::Machine(m));
        }
        if self.simulator {
            let mut p = TransmissionParams::default();
            let set = |slot: &mut f64, v: Option<f64>| {
                if let Some(v) = v {
                    *slot = v;
                }
            };
            set(&mut p.accel, self.sim_accel);
            set(&mut p.brake, self.sim_brake);
            set(&mut p.drag, self.sim_drag);
            set(&mut p.rpm_factor, self.sim_rpm_factor);
            set(&mut p.shift_up, self.sim_shift_up);
            set(&mut p.shift_down, self.sim_shift_down);
            return Ok(Backend::Simulator(p));
        }
        let command: Vec<String> = self
            .process
            .as_deref()
            .unwrap_or_default()
            .split_whitespace()
            .map(String::from)
            .collect();
        if command.is_empty() {
            bail!("--process needs a command");
        }
        if self.inputs.is_empty() {
            bail!("--process needs --inputs");
        }
        Ok(Backend::Process {
            command,
            inputs: self.inputs.clone(),
            propositions: self.propositions.iter().cloned().collect(),
            timeout: Duration::from_millis(self.step_timeout_ms),
        })
    }
}

impl Backend {
    pub fn open(&self) -> Result<Box<dyn Sut>, bbcheck::sut::SutError> {
        Ok(match self {
            Backend::Machine(m) => Box::new(MealySut::new(m.clone())),
            Backend::Simulator(p) => Box::new(TransmissionSim::new(p.clone())),
            Backend::Process {
                command,
                inputs,
                propositions,
                timeout,
            } => Box::new(ProcessSut::spawn(
                command,
                inputs.clone(),
                propositions.clone(),
                *timeout,
            )?),
        })
    }

    /// A session with the output mapper that `f` requires, if any.
    pub fn session(&self, f: Option<&Formula>) -> Result<SutSession, bbcheck::sut::SutError> {
        let mapper = match f {
            Some(f) if matches!(f.atom_kind(), AtomKind::Signal | AtomKind::Mixed) => {
                Some(OutputMapper::from_formula(f)?)
            }
            _ => None,
        };
        Ok(SutSession::new(self.open()?, mapper))
    }
}
