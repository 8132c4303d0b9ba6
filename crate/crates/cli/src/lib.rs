//! Command-line driver: argument parsing, command runners and JSON reports.
//!
//! Every command takes a seed (default 0) and derives all randomness from
//! it, so the `results` payload of a report is byte-identical across runs
//! with the same configuration. Only `duration_ms` varies.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use qbc_core::analysis::{cheat_statistics, find_distinguishing_bob_state, nonstatic_sweep};
use qbc_core::attack::{check_concealing_condition, synthesize_diagonal, synthesize_uhlmann, verify_attack};
use qbc_core::choi::{no_ttp_attack, run_protocol, AliceStrategy};
use qbc_core::qcore::{haar_random_state, CVector, Complex, StateVector};
use qbc_core::rng::Seed;
use qbc_core::scheme::{Bit, CommitmentScheme};
use qbc_core::QbcError;

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default tolerance for the cross-checks that guard each report.
pub const DEFAULT_CHECK_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, unreadable files or invalid scheme documents.
    #[error("configuration error: {0}")]
    Config(String),
    /// A computed quantity failed its independent cross-check.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

fn internal(context: &str) -> impl FnOnce(QbcError) -> CliError + '_ {
    move |e| CliError::Invariant(format!("{context}: {e}"))
}

#[derive(Debug, Parser)]
#[command(name = "qbc", version, about = "Quantum bit commitment simulation and attack synthesis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Concealment of a scheme and both cheating-unitary constructions.
    DemoMlc(SchemeCmd),
    /// The TTP-assisted protocol (`run`) or the no-TTP attack (`attack`).
    Choi(ChoiCmd),
    /// One fixed cheat versus per-input cheats over random Bob inputs.
    Sweep(SchemeCmd),
    /// Search for Bob's most distinguishing input state.
    Search(SchemeCmd),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Tolerance for the report's internal cross-checks.
    #[arg(long, default_value_t = DEFAULT_CHECK_TOL)]
    pub check_tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SchemeCmd {
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    pub scheme: Option<PathBuf>,
    /// One of `phase`, `choi-nottp`, `product`, `bobcopy`.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Bob inputs sampled for concealment profiles and sweeps.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Concealment evaluations allowed to `search`.
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChoiMode {
    Run,
    Attack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyArg {
    Honest0,
    Honest1,
    Flip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsiArg {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
}

impl PsiArg {
    pub fn state(self) -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (a, b) = match self {
            PsiArg::Zero => (Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)),
            PsiArg::One => (Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)),
            PsiArg::Plus => (Complex::new(h, 0.0), Complex::new(h, 0.0)),
            PsiArg::Minus => (Complex::new(h, 0.0), Complex::new(-h, 0.0)),
            PsiArg::PlusI => (Complex::new(h, 0.0), Complex::new(0.0, h)),
            PsiArg::MinusI => (Complex::new(h, 0.0), Complex::new(0.0, -h)),
        };
        StateVector::normalized(CVector::from_vec(vec![a, b]), vec![2]).expect("named states are non-zero")
    }
}

#[derive(Debug, Clone, Args)]
pub struct ChoiCmd {
    #[arg(long, value_enum, default_value_t = ChoiMode::Run)]
    pub mode: ChoiMode,
    #[arg(long, value_enum, default_value_t = StrategyArg::Honest0)]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 64)]
    pub rounds: usize,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Fixed input for `attack`; without it `--samples` Haar inputs are drawn.
    #[arg(long, value_enum)]
    pub psi: Option<PsiArg>,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[command(flatten)]
    pub common: Common,
}

/// Echo of the effective configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ChoiMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategyArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<PsiArg>,
    pub check_tol: f64,
}

impl RunConfig {
    fn base(common: &Common) -> Self {
        RunConfig {
            seed: common.seed,
            scheme_path: None,
            builtin: None,
            samples: None,
            budget: None,
            rounds: None,
            trials: None,
            mode: None,
            strategy: None,
            psi: None,
            check_tol: common.check_tol,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let counts =
            [("samples", self.samples), ("budget", self.budget), ("rounds", self.rounds), ("trials", self.trials)];
        for (name, value) in counts {
            if value == Some(0) {
                return Err(CliError::Config(format!("--{name} must be at least 1")));
            }
        }
        if self.check_tol.is_nan() || self.check_tol <= 0.0 {
            return Err(CliError::Config("--check-tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub toolkit_version: String,
    pub command: String,
    pub config: RunConfig,
    pub results: Value,
    pub duration_ms: u128,
    /// One line per headline number, for the terminal.
    #[serde(skip)]
    pub summary: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results always serialize")
}

fn check(name: &str, deviation: f64, tol: f64) -> Result<Value, CliError> {
    if deviation.is_nan() || deviation > tol {
        return Err(CliError::Invariant(format!("{name}: deviation {deviation:e} exceeds {tol:e}")));
    }
    Ok(json!({ "check": name, "deviation": deviation, "tolerance": tol }))
}

pub fn load_scheme(cmd: &SchemeCmd) -> Result<CommitmentScheme, CliError> {
    match (&cmd.scheme, &cmd.builtin) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read scheme file {}: {e}", path.display())))?;
            CommitmentScheme::from_json(&text)
                .map_err(|e| CliError::Config(format!("invalid scheme file {}: {e}", path.display())))
        }
        (None, Some(name)) => CommitmentScheme::builtin(name).map_err(|e| CliError::Config(e.to_string())),
        _ => Err(CliError::Config("exactly one of --scheme or --builtin is required".into())),
    }
}

fn scheme_config(cmd: &SchemeCmd) -> RunConfig {
    let mut config = RunConfig::base(&cmd.common);
    config.scheme_path = cmd.scheme.clone();
    config.builtin = cmd.builtin.clone();
    config
}

fn scheme_header(scheme: &CommitmentScheme) -> Value {
    let (d_a, d_b) = scheme.dims();
    json!({ "name": scheme.name(), "dims": [d_a, d_b] })
}

/// Parses, validates and executes one command.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let start = Instant::now();
    let (command, config, (results, summary)) = match &cli.command {
        Command::DemoMlc(cmd) => {
            let mut config = scheme_config(cmd);
            config.samples = Some(cmd.samples);
            config.validate()?;
            ("demo-mlc", config.clone(), demo_mlc(&load_scheme(cmd)?, &config)?)
        }
        Command::Sweep(cmd) => {
            let mut config = scheme_config(cmd);
            config.samples = Some(cmd.samples);
            config.validate()?;
            ("sweep", config.clone(), sweep(&load_scheme(cmd)?, &config)?)
        }
        Command::Search(cmd) => {
            let mut config = scheme_config(cmd);
            config.budget = Some(cmd.budget);
            config.validate()?;
            ("search", config.clone(), search(&load_scheme(cmd)?, &config)?)
        }
        Command::Choi(cmd) => {
            let mut config = RunConfig::base(&cmd.common);
            config.mode = Some(cmd.mode);
            match cmd.mode {
                ChoiMode::Run => {
                    config.strategy = Some(cmd.strategy);
                    config.rounds = Some(cmd.rounds);
                    config.trials = Some(cmd.trials);
                }
                ChoiMode::Attack => {
                    config.psi = cmd.psi;
                    if cmd.psi.is_none() {
                        config.samples = Some(cmd.samples);
                    }
                }
            }
            config.validate()?;
            let out = match cmd.mode {
                ChoiMode::Run => choi_run(&config)?,
                ChoiMode::Attack => choi_attack(&config)?,
            };
            ("choi", config, out)
        }
    };
    Ok(Report {
        schema_version: REPORT_SCHEMA_VERSION,
        toolkit_version: TOOLKIT_VERSION.to_string(),
        command: command.to_string(),
        config,
        results,
        duration_ms: start.elapsed().as_millis(),
        summary,
    })
}

type Output = (Value, Vec<String>);

fn demo_mlc(scheme: &CommitmentScheme, config: &RunConfig) -> Result<Output, CliError> {
    let seed = Seed(config.seed);
    let tol = config.check_tol;
    let bob_init = scheme.draw_bob_init(&mut seed.child(0).rng());
    let concealment = scheme.concealment(&bob_init).map_err(internal("concealment"))?;
    let profile = scheme
        .concealment_profile(config.samples.unwrap_or(1), &mut seed.child(1).rng())
        .map_err(internal("concealment profile"))?;
    let phi0 = scheme.commit_state(Bit::Zero, &bob_init).map_err(internal("commit"))?;
    let phi1 = scheme.commit_state(Bit::One, &bob_init).map_err(internal("commit"))?;
    let dims = scheme.dims();

    let mut checks = Vec::new();
    let uhlmann = synthesize_uhlmann(&phi0, &phi1, dims).map_err(internal("uhlmann synthesis"))?;
    let verified = verify_attack(&uhlmann.s_a, &phi0, &phi1, dims).map_err(internal("verify"))?;
    checks.push(check("uhlmann verify_attack", (verified - uhlmann.achieved_fidelity).abs(), tol)?);
    checks.push(check("uhlmann tightness", (uhlmann.achieved_fidelity - concealment.fidelity).abs(), tol)?);

    let residuals = check_concealing_condition(scheme).ok();
    let (diagonal, diagonal_on_input) = match synthesize_diagonal(scheme) {
        Ok(report) => {
            let on_input = verify_attack(&report.s_a, &phi0, &phi1, dims).map_err(internal("verify"))?;
            (to_value(&report), Some(on_input))
        }
        Err(e) => (json!({ "unavailable": e.to_string() }), None),
    };

    let mut summary = vec![
        format!("scheme {} dims {:?}", scheme.name(), dims),
        format!("concealment fidelity {:.12} (delta {:.3e})", concealment.fidelity, concealment.delta),
        format!("uhlmann cheat fidelity {:.12}", uhlmann.achieved_fidelity),
    ];
    match diagonal_on_input {
        Some(f) => summary.push(format!("diagonal cheat fidelity on drawn input {f:.12}")),
        None => summary.push("diagonal cheat unavailable".into()),
    }
    let results = json!({
        "scheme": scheme_header(scheme),
        "bob_init": bob_init,
        "concealment": concealment,
        "concealment_profile": profile,
        "condition_residuals": residuals,
        "uhlmann": uhlmann,
        "uhlmann_verified_fidelity": verified,
        "diagonal": diagonal,
        "diagonal_fidelity_on_input": diagonal_on_input,
        "checks": checks,
    });
    Ok((results, summary))
}

fn sweep(scheme: &CommitmentScheme, config: &RunConfig) -> Result<Output, CliError> {
    let result = nonstatic_sweep(scheme, config.samples.unwrap_or(1), &mut Seed(config.seed).rng())
        .map_err(internal("sweep"))?;
    let gap = result.samples.iter().map(|s| (s.adapted_s_fidelity - s.concealment_fidelity).abs()).fold(0.0, f64::max);
    let checks = vec![check("adapted cheat equals concealment fidelity", gap, config.check_tol)?];
    let summary = vec![
        format!("scheme {} with {} Bob inputs", scheme.name(), result.samples.len()),
        format!(
            "fixed S_A ({:?}) fidelity min {:.12} mean {:.12}",
            result.fixed_method, result.fixed_s_summary.min, result.fixed_s_summary.mean
        ),
        format!(
            "adapted S_A fidelity min {:.12} mean {:.12}",
            result.adapted_s_summary.min, result.adapted_s_summary.mean
        ),
    ];
    Ok((json!({ "scheme": scheme_header(scheme), "sweep": result, "checks": checks }), summary))
}

fn search(scheme: &CommitmentScheme, config: &RunConfig) -> Result<Output, CliError> {
    let result = find_distinguishing_bob_state(scheme, config.budget.unwrap_or(1), &mut Seed(config.seed).rng())
        .map_err(internal("search"))?;
    let recomputed = scheme.concealment(&result.best_bob_init).map_err(internal("concealment"))?;
    let checks =
        vec![check("best fidelity recomputed", (recomputed.fidelity - result.best_fidelity).abs(), config.check_tol)?];
    let summary = vec![
        format!("scheme {} searched with budget {}", scheme.name(), config.budget.unwrap_or(1)),
        format!(
            "best concealment fidelity {:.12} after {} evaluations, {} restarts",
            result.best_fidelity, result.iterations, result.restarts
        ),
    ];
    Ok((json!({ "scheme": scheme_header(scheme), "search": result, "checks": checks }), summary))
}

fn strategy(arg: StrategyArg) -> AliceStrategy {
    match arg {
        StrategyArg::Honest0 => AliceStrategy::Honest(Bit::Zero),
        StrategyArg::Honest1 => AliceStrategy::Honest(Bit::One),
        StrategyArg::Flip => AliceStrategy::FlipAtReveal,
    }
}

fn choi_run(config: &RunConfig) -> Result<Output, CliError> {
    let seed = Seed(config.seed);
    let strat = strategy(config.strategy.unwrap_or(StrategyArg::Honest0));
    let rounds = config.rounds.unwrap_or(1);
    let trials = config.trials.unwrap_or(1);
    let transcript = run_protocol(rounds, &strat, &mut seed.child(0).rng()).map_err(internal("protocol"))?;
    let per_round: Vec<Value> = transcript
        .rounds
        .iter()
        .map(|r| {
            json!({
                "ttp_basis": r.ttp_basis,
                "ttp_outcome": r.ttp_outcome,
                "alice_operator": r.alice_operator,
                "claimed_operator": r.claimed_operator,
                "bob_outcome": r.bob_outcome,
                "accepted": r.accepted,
            })
        })
        .collect();
    let stats = cheat_statistics(rounds, trials, &strat, &mut seed.child(1).rng()).map_err(internal("statistics"))?;
    let summary = vec![
        format!(
            "first run: verdict {:?}, {}/{} rounds accepted",
            transcript.verdict,
            transcript.accepted_rounds(),
            rounds
        ),
        format!(
            "{} runs: {} accepted, rate {:.6} (95% CI [{:.6}, {:.6}])",
            trials, stats.accepted, stats.rate, stats.wilson_95[0], stats.wilson_95[1]
        ),
    ];
    let results = json!({
        "transcript": {
            "committed_bit": transcript.committed_bit,
            "claimed_bit": transcript.claimed_bit,
            "verdict": transcript.verdict,
            "phases": transcript.phases,
            "accepted_rounds": transcript.accepted_rounds(),
            "rounds": per_round,
        },
        "statistics": stats,
    });
    Ok((results, summary))
}

fn choi_attack(config: &RunConfig) -> Result<Output, CliError> {
    let psis: Vec<StateVector> = match config.psi {
        Some(p) => vec![p.state()],
        None => {
            let seed = Seed(config.seed);
            (0..config.samples.unwrap_or(1) as u64).map(|i| haar_random_state(2, &mut seed.child(i).rng())).collect()
        }
    };
    let mut entries = Vec::new();
    let mut checks = Vec::new();
    let mut summary = Vec::new();
    let mut linear_fit = Value::Null;
    for psi in &psis {
        let attack = no_ttp_attack(psi).map_err(internal("no-TTP attack"))?;
        checks.push(check(
            "achieved equals view fidelity",
            (attack.report.achieved_fidelity - attack.view_fidelity).abs(),
            config.check_tol,
        )?);
        summary.push(format!(
            "psi {:?}: view fidelity {:.12}, cheat fidelity {:.12}",
            pairs(psi),
            attack.view_fidelity,
            attack.report.achieved_fidelity
        ));
        linear_fit = to_value(&attack.linear_fit);
        entries.push(json!({
            "psi": attack.psi,
            "view_fidelity": attack.view_fidelity,
            "report": attack.report,
        }));
    }
    Ok((json!({ "attacks": entries, "linear_fit": linear_fit, "checks": checks }), summary))
}

fn pairs(psi: &StateVector) -> Vec<[f64; 2]> {
    psi.amplitudes().iter().map(|z| [(z.re * 1e5).round() / 1e5, (z.im * 1e5).round() / 1e5]).collect()
}

/// Runs the parsed command, prints the summary and persists the report.
/// Returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    match run(cli) {
        Ok(report) => {
            for line in &report.summary {
                eprintln!("{line}");
            }
            let out = match &cli.command {
                Command::DemoMlc(c) | Command::Sweep(c) | Command::Search(c) => c.common.out.as_ref(),
                Command::Choi(c) => c.common.out.as_ref(),
            };
            let written = match out {
                Some(path) => report.write(path),
                None => {
                    println!("{}", report.to_json());
                    Ok(())
                }
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
