//! Command-line front end.
//!
//! ```text
//! linfactory flip   [options]          one invocation, prints the bit and ledger
//! linfactory verify [options]          n trials judged against the oracle, JSON
//! linfactory sweep  --grid FILE [--out FILE]   one CSV row per grid cell
//! ```
//!
//! Options may come from a TOML file (`--config`); every flag overrides the
//! matching key. Exit codes: 0 pass, 1 statistical failure, 2 invalid
//! configuration, 3 budget abort.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::coins::{CoinEnsemble, CoinSource};
use crate::factories::{Budget, Constants, Factory, FactoryError};
use crate::oracle::{Experiment, FactoryKind};
use crate::rng::RngStream;
use crate::stats::{judge, run_trials, StatsError, DEFAULT_Z_THRESHOLD};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_ABORT: i32 = 3;

pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_MAX_FLIPS: u64 = 100_000_000;

/// Column order of `sweep` output. Stable; new columns only ever append.
pub const SWEEP_COLUMNS: [&str; 22] = [
    "experiment_id",
    "factory",
    "k",
    "C_total",
    "slack_kind",
    "slack_value",
    "r_true",
    "n_trials",
    "heads",
    "p_hat",
    "target_mean",
    "z",
    "mean_flips",
    "flip_bound",
    "flip_ratio",
    "mean_recursion",
    "aborted",
    "seed",
    "elapsed_s",
    "flip_lower_bound",
    "trial_range",
    "pass",
];

#[derive(Debug, Parser)]
#[command(name = "linfactory", version, about = "Linear Bernoulli factory experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one factory invocation and print the bit and flip ledger.
    Flip(RunArgs),
    /// Run many trials and judge them against the oracle (JSON on stdout).
    Verify(RunArgs),
    /// Run every cell of a grid file (CSV).
    Sweep(SweepArgs),
}

#[derive(Debug, Args, Default)]
struct RunArgs {
    /// TOML file with any of the keys below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// logistic, walk_to_zero, high_power, residual, linear, small_r
    #[arg(long)]
    factory: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    constants: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    biases: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    /// The small-mean bound M.
    #[arg(long = "m-bound", allow_hyphen_values = true)]
    m_bound: Option<f64>,
    /// Walk length for walk_to_zero, high_power, residual.
    #[arg(long)]
    m: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long = "max-flips")]
    max_flips: Option<u64>,
    #[arg(long = "max-depth")]
    max_depth: Option<u32>,
    #[arg(long = "z")]
    z: Option<f64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// TOML grid file.
    #[arg(long)]
    grid: PathBuf,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long = "max-flips")]
    max_flips: Option<u64>,
    #[arg(long = "z")]
    z: Option<f64>,
}

/// On-disk experiment configuration; every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub factory: Option<String>,
    pub constants: Option<Vec<f64>>,
    pub biases: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
    pub m_bound: Option<f64>,
    pub m: Option<u64>,
    pub beta: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub max_flips: Option<u64>,
    pub max_depth: Option<u32>,
    pub z: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }

    fn apply(&mut self, args: &RunArgs) {
        macro_rules! over {
            ($($field:ident),*) => {
                $(if args.$field.is_some() { self.$field = args.$field.clone(); })*
            };
        }
        over!(factory, constants, biases, epsilon, m_bound, m, beta, trials, seed, workers, max_flips, max_depth, z);
    }
}

/// A validated, ready-to-run experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub budget: Budget,
    pub z_threshold: f64,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Builds a [`FactoryKind`] from a name and the parameters supplied for it.
/// Parameters the factory does not use are rejected.
pub fn factory_kind(
    name: &str,
    epsilon: Option<f64>,
    m_bound: Option<f64>,
    m: Option<u64>,
    beta: Option<f64>,
) -> Result<FactoryKind, String> {
    let need = |value: Option<f64>, key: &str| {
        value.ok_or_else(|| format!("factory {name} needs {key}"))
    };
    let need_m = || m.ok_or_else(|| format!("factory {name} needs m"));
    let (kind, used) = match name {
        "logistic" => (FactoryKind::Logistic, [false; 4]),
        "walk_to_zero" => (FactoryKind::WalkToZero { m: need_m()? }, [false, false, true, false]),
        "high_power" => (
            FactoryKind::HighPower {
                m: need_m()?,
                beta: need(beta, "beta")?,
            },
            [false, false, true, true],
        ),
        "residual" => (
            FactoryKind::Residual {
                epsilon: need(epsilon, "epsilon")?,
                m: need_m()?,
                beta: need(beta, "beta")?,
            },
            [true, false, true, true],
        ),
        "linear" => (
            FactoryKind::Linear {
                epsilon: need(epsilon, "epsilon")?,
            },
            [true, false, false, false],
        ),
        "small_r" => (
            FactoryKind::SmallR {
                m_bound: need(m_bound, "m_bound (M)")?,
            },
            [false, true, false, false],
        ),
        other => return Err(format!("unknown factory {other:?}")),
    };
    let given = [epsilon.is_some(), m_bound.is_some(), m.is_some(), beta.is_some()];
    for ((key, used), given) in ["epsilon", "m_bound", "m", "beta"].iter().zip(used).zip(given) {
        if given && !used {
            return Err(format!("factory {name} does not take {key}"));
        }
    }
    Ok(kind)
}

impl ExperimentConfig {
    /// Resolves and validates, including the oracle's precondition check.
    pub fn from_file(file: &ConfigFile) -> Result<Self, String> {
        let name = file.factory.as_deref().ok_or("no factory given")?;
        let kind = factory_kind(name, file.epsilon, file.m_bound, file.m, file.beta)?;
        let constants = file.constants.clone().ok_or("no constants given")?;
        let biases = file.biases.clone().ok_or("no biases given")?;
        let experiment = Experiment::new(kind, constants, biases);
        experiment.validate().map_err(|e| e.to_string())?;
        let trials = file.trials.unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err("trials must be positive".into());
        }
        let workers = file.workers.unwrap_or_else(default_workers);
        if workers == 0 {
            return Err("workers must be positive".into());
        }
        let z_threshold = file.z.unwrap_or(DEFAULT_Z_THRESHOLD);
        if !(z_threshold.is_finite() && z_threshold > 0.0) {
            return Err(format!("z threshold must be > 0, got {z_threshold}"));
        }
        Ok(Self {
            experiment,
            trials,
            seed: file.seed.unwrap_or(0),
            workers,
            budget: Budget {
                max_flips: Some(file.max_flips.unwrap_or(DEFAULT_MAX_FLIPS)),
                max_depth: file.max_depth,
            },
            z_threshold,
        })
    }

    fn echo(&self) -> serde_json::Value {
        json!({
            "kind": self.experiment.kind,
            "constants": self.experiment.constants,
            "biases": self.experiment.biases,
            "trials": self.trials,
            "seed": self.seed,
            "workers": self.workers,
            "max_flips": self.budget.max_flips,
            "max_depth": self.budget.max_depth,
            "z_threshold": self.z_threshold,
        })
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_PASS };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Flip(args) => resolve(&args).and_then(|cfg| cmd_flip(&cfg, out)),
        Command::Verify(args) => resolve(&args).and_then(|cfg| cmd_verify(&cfg, out)),
        Command::Sweep(args) => cmd_sweep_args(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(CliError { code, message }) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

/// A failed command: the exit code and the message for stderr.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

fn io_error(e: io::Error) -> CliError {
    CliError {
        code: EXIT_FAIL,
        message: format!("write failed: {e}"),
    }
}

fn resolve(args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let mut file = match &args.config {
        Some(path) => ConfigFile::load(path).map_err(invalid)?,
        None => ConfigFile::default(),
    };
    file.apply(args);
    ExperimentConfig::from_file(&file).map_err(invalid)
}

/// One invocation on stream `(seed, 0)`.
pub fn cmd_flip(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let constants =
        Constants::new(&cfg.experiment.constants).map_err(|e| invalid(e.to_string()))?;
    let mut coins =
        CoinEnsemble::new(cfg.experiment.biases.clone()).map_err(|e| invalid(e.to_string()))?;
    let mut stream = RngStream::new(cfg.seed, 0);
    let mut factory = Factory::new(&mut coins, &mut stream).with_budget(cfg.budget);
    let outcome = cfg.experiment.kind.sample(&mut factory, &constants);
    let stats = factory.into_stats();
    let bit = match outcome {
        Ok(bit) => bit,
        Err(e @ (FactoryError::BudgetExceeded { .. } | FactoryError::DepthExceeded { .. })) => {
            return Err(CliError {
                code: EXIT_ABORT,
                message: format!("{e} (seed {}, trial 0)", cfg.seed),
            })
        }
        Err(e) => return Err(invalid(e.to_string())),
    };
    let ledger = coins.ledger();
    let per_coin: Vec<String> = ledger.per_coin().iter().map(u64::to_string).collect();
    (|| {
        writeln!(out, "bit {}", bit as u8)?;
        writeln!(out, "flips_per_coin {}", per_coin.join(","))?;
        writeln!(out, "flips_total {}", ledger.total())?;
        writeln!(out, "recursion_calls {}", stats.recursion_calls)?;
        writeln!(out, "max_depth {}", stats.max_depth)
    })()
    .map_err(io_error)?;
    Ok(EXIT_PASS)
}

fn stats_error(e: StatsError) -> CliError {
    invalid(e.to_string())
}

/// Runs the trials, judges them, and prints a JSON report.
pub fn cmd_verify(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let summary = run_trials(&cfg.experiment, cfg.trials, cfg.seed, cfg.workers, cfg.budget)
        .map_err(stats_error)?;
    let verdict = judge(&summary, &cfg.experiment, cfg.z_threshold).map_err(stats_error)?;
    let report = json!({
        "config": cfg.echo(),
        "oracle": {
            "r": cfg.experiment.r(),
            "target_mean": verdict.target_mean,
            "flip_bound": verdict.flip_bound,
            "flip_bound_is_exact": verdict.flip_bound_is_exact,
            "flip_lower_bound": cfg.experiment.flip_lower_bound(),
        },
        "summary": summary,
        "verdict": verdict,
        "reproduce": {
            "seed": cfg.seed,
            "trial_range": [0, cfg.trials],
            "first_aborted_trial": summary.first_aborted_trial,
        },
    });
    let text = serde_json::to_string_pretty(&report).map_err(|e| invalid(e.to_string()))?;
    writeln!(out, "{text}").map_err(io_error)?;
    Ok(if summary.aborted_count > 0 {
        EXIT_ABORT
    } else if verdict.pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}

/// Sweep grid: the cartesian product of `slacks` x `constants` x (explicit
/// `biases` plus `r_fractions`).
///
/// An `r_fractions` entry `f` sets every bias to `f * limit / C`, where
/// `limit` is `1 - epsilon` (linear, residual), `M` (small_r), `1 / beta`
/// (high_power) or 1 (logistic, walk_to_zero).
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub factory: Option<String>,
    #[serde(default)]
    pub slacks: Vec<f64>,
    #[serde(default)]
    pub constants: Vec<Vec<f64>>,
    #[serde(default)]
    pub biases: Vec<Vec<f64>>,
    #[serde(default)]
    pub r_fractions: Vec<f64>,
    pub m: Option<u64>,
    pub beta: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub max_flips: Option<u64>,
    pub z: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
enum BiasSpec<'a> {
    Explicit(&'a [f64]),
    Fraction(f64),
}

impl GridFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("bad grid {}: {e}", path.display()))
    }

    /// Expands and validates every cell.
    pub fn cells(&self) -> Result<Vec<Experiment>, String> {
        let bias_specs: Vec<BiasSpec> = self
            .biases
            .iter()
            .map(|b| BiasSpec::Explicit(b))
            .chain(self.r_fractions.iter().map(|&f| BiasSpec::Fraction(f)))
            .collect();
        if self.constants.is_empty() || bias_specs.is_empty() {
            return Ok(Vec::new());
        }
        let name = self.factory.as_deref().ok_or("grid has cells but no factory")?;
        let slack_key = match name {
            "linear" | "residual" => Some("epsilon"),
            "small_r" => Some("m_bound"),
            _ => None,
        };
        let slacks: Vec<Option<f64>> = match slack_key {
            Some(_) => self.slacks.iter().copied().map(Some).collect(),
            None if self.slacks.is_empty() => vec![None],
            None => return Err(format!("factory {name} takes no slack, but slacks were given")),
        };

        let mut cells = Vec::new();
        for slack in slacks {
            let (epsilon, m_bound) = match slack_key {
                Some("epsilon") => (slack, None),
                Some(_) => (None, slack),
                None => (None, None),
            };
            let kind = factory_kind(name, epsilon, m_bound, self.m, self.beta)?;
            for constants in &self.constants {
                for spec in &bias_specs {
                    let biases = match *spec {
                        BiasSpec::Explicit(b) => b.to_vec(),
                        BiasSpec::Fraction(f) => {
                            let limit = match kind {
                                FactoryKind::Linear { epsilon }
                                | FactoryKind::Residual { epsilon, .. } => 1.0 - epsilon,
                                FactoryKind::SmallR { m_bound } => m_bound,
                                FactoryKind::HighPower { beta, .. } => 1.0 / beta,
                                FactoryKind::Logistic | FactoryKind::WalkToZero { .. } => 1.0,
                            };
                            let total: f64 = constants.iter().sum();
                            vec![f * limit / total; constants.len()]
                        }
                    };
                    let experiment = Experiment::new(kind, constants.clone(), biases);
                    experiment.validate().map_err(|e| {
                        format!("cell {} ({name}, constants {:?}): {e}", cells.len(), constants)
                    })?;
                    cells.push(experiment);
                }
            }
        }
        Ok(cells)
    }
}

fn cmd_sweep_args(args: &SweepArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut grid = GridFile::load(&args.grid).map_err(invalid)?;
    grid.trials = args.trials.or(grid.trials);
    grid.seed = args.seed.or(grid.seed);
    grid.workers = args.workers.or(grid.workers);
    grid.max_flips = args.max_flips.or(grid.max_flips);
    grid.z = args.z.or(grid.z);
    match &args.out {
        Some(path) => {
            let mut file = File::create(path)
                .map_err(|e| invalid(format!("cannot create {}: {e}", path.display())))?;
            cmd_sweep(&grid, &mut file)
        }
        None => cmd_sweep(&grid, out),
    }
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map_or_else(String::new, |v| v.to_string())
}

/// Runs every cell and writes one CSV row per cell, flushing as it goes.
/// Cell `i` uses seed `seed + i`.
pub fn cmd_sweep(grid: &GridFile, out: &mut dyn Write) -> Result<i32, CliError> {
    let cells = grid.cells().map_err(invalid)?;
    let trials = grid.trials.unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(invalid("trials must be positive"));
    }
    let workers = grid.workers.unwrap_or_else(default_workers).max(1);
    let base_seed = grid.seed.unwrap_or(0);
    let z_threshold = grid.z.unwrap_or(DEFAULT_Z_THRESHOLD);
    let budget = Budget::flips(grid.max_flips.unwrap_or(DEFAULT_MAX_FLIPS));

    let mut writer = csv::Writer::from_writer(out);
    let csv_error = |e: csv::Error| CliError {
        code: EXIT_FAIL,
        message: format!("csv write failed: {e}"),
    };
    writer.write_record(SWEEP_COLUMNS).map_err(csv_error)?;
    writer.flush().map_err(io_error)?;

    let mut any_failed = false;
    let mut any_aborted = false;
    for (id, experiment) in cells.iter().enumerate() {
        let seed = base_seed.wrapping_add(id as u64);
        let summary = run_trials(experiment, trials, seed, workers, budget).map_err(stats_error)?;
        let verdict = judge(&summary, experiment, z_threshold).map_err(stats_error)?;
        any_failed |= !verdict.pass;
        any_aborted |= summary.aborted_count > 0;
        let slack = experiment.kind.slack();
        let row = [
            id.to_string(),
            experiment.kind.name().to_string(),
            experiment.k().to_string(),
            experiment.total_constant().to_string(),
            slack.map_or_else(String::new, |s| s.kind().to_string()),
            fmt_opt(slack.map(|s| s.value())),
            experiment.r().to_string(),
            trials.to_string(),
            summary.heads.to_string(),
            verdict.p_hat.to_string(),
            verdict.target_mean.to_string(),
            verdict.z.to_string(),
            verdict.flip_mean.to_string(),
            verdict.flip_bound.to_string(),
            verdict.flip_ratio.to_string(),
            verdict.mean_recursion.to_string(),
            summary.aborted_count.to_string(),
            seed.to_string(),
            format!("{:.3}", summary.elapsed_s),
            fmt_opt(experiment.flip_lower_bound()),
            format!("0..{trials}"),
            verdict.pass.to_string(),
        ];
        writer.write_record(&row).map_err(csv_error)?;
        writer.flush().map_err(io_error)?;
    }
    Ok(if any_aborted {
        EXIT_ABORT
    } else if any_failed {
        EXIT_FAIL
    } else {
        EXIT_PASS
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("linfactory").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn kind_parameters_required_and_exclusive() {
        assert_eq!(
            factory_kind("linear", Some(0.5), None, None, None).unwrap(),
            FactoryKind::Linear { epsilon: 0.5 }
        );
        assert!(factory_kind("linear", None, None, None, None).is_err());
        assert!(factory_kind("linear", Some(0.5), Some(0.1), None, None)
            .unwrap_err()
            .contains("does not take m_bound"));
        assert!(factory_kind("bogus", None, None, None, None).is_err());
    }

    #[test]
    fn flip_is_deterministic() {
        let args = [
            "flip", "--factory", "linear", "--epsilon", "0.5", "--constants", "2", "--biases",
            "0.25", "--seed", "7",
        ];
        let (code, a, _) = run_capture(&args);
        let (_, b, _) = run_capture(&args);
        assert_eq!(code, EXIT_PASS);
        assert_eq!(a, b);
        assert!(a.starts_with("bit "));
    }

    #[test]
    fn small_r_with_large_m_is_invalid() {
        let (code, _, err) = run_capture(&[
            "flip", "--factory", "small_r", "--m-bound", "0.6", "--constants", "1", "--biases",
            "0.1",
        ]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("M ∈ (0, 1/2)"), "{err}");
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(
            &path,
            "factory = \"linear\"\nepsilon = 0.5\nconstants = [2.0]\nbiases = [0.0]\nseed = 3\n",
        )
        .unwrap();
        let (code, out, _) = run_capture(&["flip", "--config", path.to_str().unwrap()]);
        assert_eq!(code, EXIT_PASS);
        assert!(out.starts_with("bit 0"));
        // override pushes r above 1 - epsilon
        let (code, _, err) = run_capture(&[
            "flip", "--config", path.to_str().unwrap(), "--biases", "0.4",
        ]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("r <= 1 - epsilon"));
    }

    #[test]
    fn flip_budget_abort_exit_code() {
        let (code, _, err) = run_capture(&[
            "flip", "--factory", "walk_to_zero", "--m", "50", "--constants", "1", "--biases",
            "0", "--max-flips", "3",
        ]);
        assert_eq!(code, EXIT_ABORT, "{err}");
    }

    #[test]
    fn unknown_config_key_is_invalid() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(&path, "factory = \"logistic\"\nbogus = 1\n").unwrap();
        let (code, _, _) = run_capture(&["verify", "--config", path.to_str().unwrap()]);
        assert_eq!(code, EXIT_INVALID);
    }

    #[test]
    fn grid_fraction_cells() {
        let grid = GridFile {
            factory: Some("small_r".into()),
            slacks: vec![0.25, 0.1],
            constants: vec![vec![1.0], vec![2.0, 3.0]],
            r_fractions: vec![0.5],
            ..GridFile::default()
        };
        let cells = grid.cells().unwrap();
        assert_eq!(cells.len(), 4);
        assert!((cells[0].r() - 0.125).abs() < 1e-15);
        assert!((cells[3].r() - 0.05).abs() < 1e-15);
        assert_eq!(cells[3].biases, vec![0.01, 0.01]);
    }
}
