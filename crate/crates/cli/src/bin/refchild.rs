//! Reference child process for the line protocol, used in tests.
//!
//! `--machine FILE` answers from a Mealy machine, `--transmission` from
//! the built-in simulator, and `--echo` replies `OUT <letter>`.
//! `--garbage` answers nonsense and `--die-after N` exits after N steps.

use std::fs;
use std::io::{self, BufRead, Write};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bbcheck::formula::Letter;
use bbcheck::machine::load_machine;
use bbcheck::sut::{MealySut, RawOutput, Sut, TransmissionParams, TransmissionSim};
use clap::Parser;

#[derive(Parser)]
struct Args {
    #[arg(long)]
    machine: Option<String>,
    #[arg(long)]
    transmission: bool,
    #[arg(long)]
    echo: bool,
    #[arg(long)]
    garbage: bool,
    #[arg(long)]
    die_after: Option<usize>,
}

enum Model {
    Sut(Box<dyn Sut>),
    Echo,
}

fn reply(model: &mut Model, letter: &str) -> Result<String> {
    match model {
        Model::Echo => Ok(format!("OUT {letter}")),
        Model::Sut(s) => {
            let Some(a) = s.inputs().iter().position(|i| i == letter) else {
                bail!("unknown letter {letter}");
            };
            Ok(match s.step(a)? {
                RawOutput::Props(p) => {
                    let names: Vec<&str> = p.iter().map(String::as_str).collect();
                    format!("OUT {}", names.join(" ")).trim_end().to_string()
                }
                RawOutput::Values(v) => {
                    format!("VAL {}", Letter::Values(v).to_string().replace(',', " "))
                }
            })
        }
    }
}

fn serve(mut model: Model, args: &Args) -> Result<()> {
    let stdin = io::stdin();
    let mut out = io::stdout().lock();
    let mut steps = 0;
    for line in stdin.lock().lines() {
        let line = line?;
        let mut words = line.split_whitespace();
        let answer = match (words.next(), words.next()) {
            _ if args.garbage => "garbage".to_string(),
            (Some("RESET"), None) => {
                if let Model::Sut(s) = &mut model {
                    s.reset()?;
                }
                "OK".into()
            }
            (Some("STEP"), Some(letter)) => {
                if args.die_after.is_some_and(|n| steps >= n) {
                    return Ok(());
                }
                steps += 1;
                reply(&mut model, letter)?
            }
            _ => bail!("unexpected request `{line}`"),
        };
        writeln!(out, "{answer}")?;
        out.flush()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let model = if let Some(path) = &args.machine {
        let text = match fs::read_to_string(path).with_context(|| format!("cannot read {path}")) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("{e:#}");
                return ExitCode::from(1);
            }
        };
        match load_machine(&text) {
            Ok(m) => Model::Sut(Box::new(MealySut::new(m))),
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
        }
    } else if args.transmission {
        Model::Sut(Box::new(
            TransmissionSim::new(TransmissionParams::default()),
        ))
    } else {
        Model::Echo
    };
    match serve(model, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e:#}");
            ExitCode::from(1)
        }
    }
}
