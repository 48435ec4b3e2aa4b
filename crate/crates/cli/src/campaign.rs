//! Repeated checking runs over a list of seeds, and their summary.

use std::fmt::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use bbcheck::engine::{run_bbc, BbcConfig, BbcReport, EngineError, Outcome};
use bbcheck::formula::Formula;

use crate::backend::Backend;

/// A failed run with the partial report when one exists.
#[derive(Debug, Clone)]
pub struct RunFailure {
    pub error: EngineError,
    pub partial: Option<BbcReport>,
}

pub type RunResult = Result<BbcReport, Box<RunFailure>>;

fn run_one(backend: &Backend, f: &Formula, cfg: &BbcConfig) -> RunResult {
    let fail = |error, partial| Box::new(RunFailure { error, partial });
    let mut sut = backend
        .session(Some(f))
        .map_err(|e| fail(EngineError::Sut(e), None))?;
    match run_bbc(&mut sut, f, cfg) {
        Ok(r) => Ok(r),
        Err(EngineError::Aborted { error, partial }) => {
            Err(fail(EngineError::Sut(error), Some(*partial)))
        }
        Err(e) => Err(fail(e, None)),
    }
}

/// Runs every seed, `parallel` at a time; results keep the seed order.
pub fn run_campaign(
    backend: &Backend,
    f: &Formula,
    base: &BbcConfig,
    seeds: &[u64],
    parallel: usize,
) -> Vec<RunResult> {
    let configs: Vec<BbcConfig> = seeds
        .iter()
        .map(|&seed| {
            let mut c = base.clone();
            c.search.seed = seed;
            c
        })
        .collect();
    if parallel <= 1 {
        return configs.iter().map(|c| run_one(backend, f, c)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<RunResult>>> = Mutex::new(vec![None; configs.len()]);
    thread::scope(|s| {
        for _ in 0..parallel.min(configs.len()) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= configs.len() {
                    break;
                }
                let r = run_one(backend, f, &configs[k]);
                slots
                    .lock()
                    .expect("no worker panics while holding the lock")[k] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every seed ran"))
        .collect()
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Summary over completed runs: verdict counts, mean and standard
/// deviation of executions and equivalence rounds, and one `run:` line per
/// seed.
pub fn aggregate(reports: &[BbcReport], timing: bool) -> String {
    let mut s = String::new();
    let count = |name: &str| reports.iter().filter(|r| r.outcome.name() == name).count();
    let first = reports.first();
    writeln!(s, "campaign: {} runs", reports.len()).unwrap();
    if let Some(r) = first {
        writeln!(s, "formula: {}", r.formula).unwrap();
        writeln!(s, "mode: {}", r.mode).unwrap();
        writeln!(s, "eq_strategy: {}", r.eq_strategy).unwrap();
    }
    writeln!(s, "runs: {}", reports.len()).unwrap();
    writeln!(s, "falsified: {}", count("FALSIFIED")).unwrap();
    writeln!(s, "deemed_satisfied: {}", count("DEEMED_SATISFIED")).unwrap();
    writeln!(s, "timeout: {}", count("TIMEOUT")).unwrap();
    let stat = |s: &mut String, key: &str, xs: Vec<f64>| {
        let (m, d) = mean_std(&xs);
        writeln!(s, "{key}_mean: {m:.3}").unwrap();
        writeln!(s, "{key}_std: {d:.3}").unwrap();
    };
    stat(
        &mut s,
        "executions",
        reports
            .iter()
            .map(|r| r.counters.sut_executions as f64)
            .collect(),
    );
    stat(
        &mut s,
        "eq_rounds",
        reports
            .iter()
            .map(|r| r.counters.eq_rounds as f64)
            .collect(),
    );
    if timing {
        stat(
            &mut s,
            "time_ms",
            reports
                .iter()
                .map(|r| r.elapsed.as_secs_f64() * 1000.0)
                .collect(),
        );
    }
    for r in reports {
        write!(
            s,
            "run: seed={} verdict={} executions={} eq_rounds={}",
            r.seed,
            r.outcome.name(),
            r.counters.sut_executions,
            r.counters.eq_rounds
        )
        .unwrap();
        if let Outcome::Falsified { witness, .. } = &r.outcome {
            write!(s, " witness_len={}", witness.len()).unwrap();
        }
        if timing {
            write!(s, " time_ms={}", r.elapsed.as_millis()).unwrap();
        }
        s.push('\n');
    }
    s
}
