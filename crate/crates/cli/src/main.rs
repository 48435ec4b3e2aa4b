mod backend;
mod campaign;
mod config;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use bbcheck::engine::{BbcConfig, EngineError, EqStrategy, Mode};
use bbcheck::formula::{evaluate, robustness, Formula, Letter};
use bbcheck::learn::ObservationTable;
use bbcheck::machine::{model_check, save_machine, Verdict, DEFAULT_CAP};
use bbcheck::search::{ga_eqtest, random_eqtest, wmethod_eqtest, SearchParams};
use bbcheck::strengthen::{choose_fml, gen_candidates, gen_int, gen_no_int};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;

use backend::SutArgs;

#[derive(Parser)]
#[command(
    name = "bbcheck",
    version,
    about = "Black-box checking with strengthened temporal specifications"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a system against a formula, once per seed.
    Check(CheckArgs),
    /// List the strengthened candidates of a formula.
    Strengthen(StrengthenArgs),
    /// Model check a Mealy machine file.
    ModelCheck(ModelCheckArgs),
    /// Learn a Mealy machine of a system and print it.
    Learn(LearnArgs),
    /// Run one input word on a system and print its outputs.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct FormulaArgs {
    #[arg(long)]
    formula: Option<String>,
    #[arg(long, value_name = "FILE")]
    formula_file: Option<PathBuf>,
}

impl FormulaArgs {
    fn load(&self) -> anyhow::Result<Option<Formula>> {
        let text = match (&self.formula, &self.formula_file) {
            (Some(_), Some(_)) => bail!("give either --formula or --formula-file"),
            (Some(t), None) => t.clone(),
            (None, Some(p)) => {
                fs::read_to_string(p).with_context(|| format!("cannot read `{}`", p.display()))?
            }
            (None, None) => return Ok(None),
        };
        let f = text
            .trim()
            .parse::<Formula>()
            .with_context(|| format!("cannot parse formula `{}`", text.trim()))?;
        Ok(Some(f))
    }

    fn require(&self) -> anyhow::Result<Formula> {
        self.load()?
            .ok_or_else(|| anyhow!("a formula is required (--formula or --formula-file)"))
    }
}

#[derive(Args)]
struct SearchArgs {
    /// Equivalence testing strategy: random, ga or wmethod.
    #[arg(long, default_value = "random")]
    eq_strategy: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = SearchParams::default().max_words)]
    max_words: usize,
    #[arg(long, default_value_t = SearchParams::default().min_len)]
    min_len: usize,
    #[arg(long, default_value_t = SearchParams::default().max_len)]
    max_len: usize,
    #[arg(long, default_value_t = SearchParams::default().population)]
    population: usize,
    #[arg(long, default_value_t = SearchParams::default().generations)]
    generations: usize,
    #[arg(long, default_value_t = SearchParams::default().mutation_rate)]
    mutation_rate: f64,
    #[arg(long, default_value_t = SearchParams::default().crossover_rate)]
    crossover_rate: f64,
    #[arg(long, default_value_t = SearchParams::default().wmethod_depth)]
    wmethod_depth: usize,
}

impl SearchArgs {
    fn params(&self) -> SearchParams {
        SearchParams {
            seed: self.seed,
            max_words: self.max_words,
            min_len: self.min_len,
            max_len: self.max_len,
            population: self.population,
            generations: self.generations,
            mutation_rate: self.mutation_rate,
            crossover_rate: self.crossover_rate,
            wmethod_depth: self.wmethod_depth,
        }
    }

    fn strategy(&self) -> anyhow::Result<EqStrategy> {
        Ok(self.eq_strategy.parse()?)
    }
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    formula: FormulaArgs,
    #[command(flatten)]
    sut: SutArgs,
    #[command(flatten)]
    search: SearchArgs,
    /// baseline or enhanced.
    #[arg(long, default_value = "enhanced")]
    mode: String,
    /// Time bound used when strengthening intervals.
    #[arg(long, default_value_t = 30)]
    horizon: u64,
    /// Longest word explored by the model checker.
    #[arg(long, default_value_t = 30)]
    mc_horizon: usize,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    mc_cap: usize,
    /// Wall-clock limit per run in seconds.
    #[arg(long, value_name = "SECONDS")]
    timeout: Option<f64>,
    /// Execution budget per run; 0 means unlimited.
    #[arg(long, default_value_t = 100_000)]
    max_executions: u64,
    /// Explicit seed list; overrides --seed and --repetitions.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    /// Number of runs, with seeds counting up from --seed.
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    /// Runs executed at the same time.
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    /// Directory for per-run reports and the aggregate.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Include wall-clock times in reports.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct StrengthenArgs {
    formula: String,
    #[arg(long, default_value_t = 30)]
    horizon: u64,
    /// Also print the candidates chosen first.
    #[arg(long)]
    chosen: bool,
}

#[derive(Args)]
struct ModelCheckArgs {
    #[arg(long, value_name = "FILE")]
    machine: PathBuf,
    #[command(flatten)]
    formula: FormulaArgs,
    #[arg(long, default_value_t = 20)]
    horizon: usize,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

#[derive(Args)]
struct LearnArgs {
    #[command(flatten)]
    sut: SutArgs,
    /// Formula whose comparisons define the output letters of numeric systems.
    #[command(flatten)]
    formula: FormulaArgs,
    #[command(flatten)]
    search: SearchArgs,
    /// Maximum number of equivalence testing rounds.
    #[arg(long, default_value_t = 100)]
    max_rounds: usize,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    sut: SutArgs,
    #[command(flatten)]
    formula: FormulaArgs,
    /// Input letters separated by spaces or commas.
    #[arg(long)]
    word: String,
}

/// Failures and their exit codes.
enum Failure {
    Config(anyhow::Error),
    Sut(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Sut(_) => 2,
        }
    }
}

trait OrConfig<T> {
    fn config(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> OrConfig<T> for Result<T, E> {
    fn config(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Config(e.into()))
    }
}

fn sut_failure(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Sut(e.into())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match config::expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let parsed = Cli::command()
        .mut_subcommands(|c| c.args_override_self(true))
        .try_get_matches_from(args)
        .and_then(|m| Cli::from_arg_matches(&m));
    let cli = match parsed {
        Ok(c) => c,
        // usage errors are configuration errors; help and version exit 0
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Strengthen(a) => cmd_strengthen(a),
        Command::ModelCheck(a) => cmd_model_check(a),
        Command::Learn(a) => cmd_learn(a),
        Command::Simulate(a) => cmd_simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Config(e) | Failure::Sut(e)) = &f;
            eprintln!("error: {e:#}");
            ExitCode::from(f.code())
        }
    }
}

fn cmd_check(a: CheckArgs) -> Result<(), Failure> {
    let f = a.formula.require().config()?;
    let backend = a.sut.backend().config()?;
    let cfg = BbcConfig {
        mode: a.mode.parse::<Mode>().config()?,
        horizon: a.horizon,
        mc_horizon: a.mc_horizon,
        mc_cap: a.mc_cap,
        timeout: a.timeout.map(Duration::from_secs_f64),
        max_executions: (a.max_executions > 0).then_some(a.max_executions),
        eq_strategy: a.search.strategy().config()?,
        search: a.search.params(),
    };
    cfg.validate().config()?;
    if a.repetitions == 0 || a.parallel == 0 {
        return Err(Failure::Config(anyhow!(
            "--repetitions and --parallel must be at least 1"
        )));
    }
    let seeds: Vec<u64> = if a.seeds.is_empty() {
        (0..a.repetitions as u64)
            .map(|k| a.search.seed + k)
            .collect()
    } else {
        a.seeds.clone()
    };
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create `{}`", dir.display()))
            .config()?;
    }
    let results = campaign::run_campaign(&backend, &f, &cfg, &seeds, a.parallel);
    let mut reports = Vec::new();
    let mut failure = None;
    for (seed, r) in seeds.iter().zip(results) {
        let (text, report) = match r {
            Ok(rep) => (rep.to_text(a.timing), Some(rep)),
            Err(failed) => {
                let campaign::RunFailure { error: e, partial } = *failed;
                let mut text = partial.map(|p| p.to_text(a.timing)).unwrap_or_default();
                text.push_str(&format!("error: {e}\n"));
                let fail = match e {
                    EngineError::Sut(_) | EngineError::Aborted { .. } => {
                        Failure::Sut(anyhow!("seed {seed}: {e}"))
                    }
                    other => Failure::Config(anyhow!("seed {seed}: {other}")),
                };
                failure.get_or_insert(fail);
                (text, None)
            }
        };
        match &a.out {
            Some(dir) => {
                let path = dir.join(format!("run-{seed}.txt"));
                fs::write(&path, &text)
                    .with_context(|| format!("cannot write `{}`", path.display()))
                    .config()?;
            }
            None => println!("{text}"),
        }
        reports.extend(report);
    }
    let summary = campaign::aggregate(&reports, a.timing);
    if let Some(dir) = &a.out {
        let path = dir.join("aggregate.txt");
        fs::write(&path, &summary)
            .with_context(|| format!("cannot write `{}`", path.display()))
            .config()?;
    }
    print!("{summary}");
    match failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn cmd_strengthen(a: StrengthenArgs) -> Result<(), Failure> {
    let f: Formula = a
        .formula
        .parse()
        .with_context(|| format!("cannot parse formula `{}`", a.formula))
        .config()?;
    for g in gen_no_int(&f) {
        println!("{g}");
    }
    for g in gen_int(&f, a.horizon).config()? {
        println!("{g}");
    }
    if a.chosen {
        for g in choose_fml(&gen_candidates(&f, a.horizon).config()?) {
            println!("chosen: {g}");
        }
    }
    Ok(())
}

fn cmd_model_check(a: ModelCheckArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&a.machine)
        .with_context(|| format!("cannot read `{}`", a.machine.display()))
        .config()?;
    let m = bbcheck::machine::load_machine(&text).config()?;
    let f = a.formula.require().config()?;
    match model_check(&m, &f, a.horizon, a.cap).config()? {
        Verdict::Holds => println!("verdict: HOLDS"),
        Verdict::Violated { witness, outputs } => {
            println!("verdict: VIOLATED");
            println!("witness: {}", m.word_names(&witness).join(" "));
            let outs: Vec<String> = outputs
                .into_iter()
                .map(|o| Letter::Props(o).to_string())
                .collect();
            println!("outputs: {}", outs.join(" "));
        }
        Verdict::Inconclusive(why) => {
            println!("verdict: INCONCLUSIVE");
            println!("reason: {why}");
        }
    }
    Ok(())
}

fn cmd_learn(a: LearnArgs) -> Result<(), Failure> {
    let backend = a.sut.backend().config()?;
    let f = a.formula.load().config()?;
    let strategy = a.search.strategy().config()?;
    let params = a.search.params();
    params.validate().config()?;
    let mut sut = backend.session(f.as_ref()).map_err(sut_failure)?;
    let mut table = ObservationTable::new(sut.inputs().to_vec(), sut.propositions());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(params.seed);
    let mut hyp = table.learn_hypothesis(&mut sut).map_err(sut_failure)?;
    let mut rounds = 0;
    loop {
        if rounds >= a.max_rounds {
            eprintln!("stopped after {rounds} rounds");
            break;
        }
        rounds += 1;
        let cex = match strategy {
            EqStrategy::WMethod => wmethod_eqtest(&mut sut, &hyp, params.wmethod_depth),
            EqStrategy::Random => random_eqtest(&mut sut, &hyp, &params, &mut rng),
            EqStrategy::Ga => {
                let f = f
                    .as_ref()
                    .ok_or_else(|| Failure::Config(anyhow!("ga needs a formula")))?;
                ga_eqtest(&mut sut, &hyp, f, &params, &mut rng)
            }
        }
        .map_err(sut_failure)?;
        let Some(w) = cex else { break };
        table
            .refine_with_counterexample(&w, &mut sut)
            .map_err(sut_failure)?;
        hyp = table.learn_hypothesis(&mut sut).map_err(sut_failure)?;
    }
    eprintln!(
        "states: {}, rounds: {rounds}, executions: {}",
        hyp.num_locations(),
        sut.executions()
    );
    let text = save_machine(&hyp);
    match &a.out {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("cannot write `{}`", p.display()))
            .config()?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> Result<(), Failure> {
    let backend = a.sut.backend().config()?;
    let f = a.formula.load().config()?;
    let mut sut = backend.session(f.as_ref()).map_err(sut_failure)?;
    let names: Vec<&str> = a.word.split([' ', ',']).filter(|s| !s.is_empty()).collect();
    if names.is_empty() {
        return Err(Failure::Config(anyhow!("the input word is empty")));
    }
    let word = names
        .iter()
        .map(|n| {
            sut.inputs()
                .iter()
                .position(|i| i == n)
                .ok_or_else(|| anyhow!("unknown input letter `{n}`"))
        })
        .collect::<anyhow::Result<Vec<usize>>>()
        .config()?;
    let exec = sut.execute(&word).map_err(sut_failure)?;
    for (k, (raw, mapped)) in exec.raw.iter().zip(&exec.mapped).enumerate() {
        let raw = raw.to_letter();
        let mapped = Letter::Props(mapped.clone());
        if raw == mapped {
            println!("{k} {} {raw}", names[k]);
        } else {
            println!("{k} {} {raw} {mapped}", names[k]);
        }
    }
    if let Some(f) = f {
        let trace = exec.raw_trace().expect("word is non-empty");
        let holds = evaluate(&f, &trace, 0).config()?;
        println!("verdict: {}", if holds { "satisfied" } else { "violated" });
        if exec.is_numeric() {
            println!("robustness: {}", robustness(&f, &trace, 0).config()?);
        }
    }
    Ok(())
}
