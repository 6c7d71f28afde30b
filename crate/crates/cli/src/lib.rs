//! The `randsync` command line.
//!
//! [`run`] takes the arguments and two sinks and returns the exit code, so
//! the binary and the tests share one code path.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use randsync_core::fastsync::Family;
use randsync_core::oracle::{greedy_reset_word, shortest_reset_word};
use randsync_core::randgen::uniform_dfa;
use randsync_core::stats::{
    lemma2_experiment, set_extension_experiment, success_profile, ExperimentRecord, MappingLaw,
};
use randsync_core::textio::{parse_dfa, write_dfa};
use randsync_core::{
    eval_word, format_word, parse_word, synchronize, verify_certificate, Dfa, Error, Rng,
    SyncCertificate,
};

/// Environment variable read for the worker count of `bench`.
pub const THREADS_ENV: &str = "RANDSYNC_THREADS";

/// Largest word `--expand` writes out letter by letter.
pub const EXPAND_LIMIT: u64 = 1_000_000;

/// Largest automaton handed to the greedy fallback, whose pair table is
/// quadratic in `n`.
pub const GREEDY_MAX_STATES: usize = 4096;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "randsync",
    version,
    about = "Synchronizing words for random automata"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a uniform random automaton.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        seed: u64,
        /// Output file; standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the fast synchronization algorithm.
    Sync {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        /// Fall back to another algorithm when merging fails.
        #[arg(long)]
        fallback: Option<Fallback>,
        /// Write the stage report (JSON) here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SyncFormat::Text)]
        format: SyncFormat,
        /// Print the word letter by letter instead of in compressed form.
        #[arg(long)]
        expand: bool,
    },
    /// Shortest reset word by exhaustive search (at most 24 states).
    Exact {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Check that a word, or a certificate in JSON, synchronizes the automaton.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        word: PathBuf,
    },
    /// Monte Carlo experiments.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fallback {
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SyncFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Lemma2,
    Sets,
    Success,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    E,
    F,
    G,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dist {
    Uniform,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub experiment: Experiment,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    #[arg(long)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    /// Family for `sets`.
    #[arg(long, value_enum, default_value_t = Which::E)]
    pub which: Which,
    /// Mapping law for `lemma2`.
    #[arg(long, value_enum, default_value_t = Dist::Uniform)]
    pub dist: Dist,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `json` writes one record per line; `csv` one row per trial.
    #[arg(long, value_enum, default_value_t = BenchFormat::Json)]
    pub format: BenchFormat,
    /// Worker threads; overrides the environment variable.
    #[arg(long)]
    pub threads: Option<usize>,
}

/// A failure with its exit code. The message goes to standard error.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn negative(message: impl Into<String>) -> Self {
        Self::new(EXIT_NEGATIVE, message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Capacity { .. } => EXIT_CAPACITY,
            _ => EXIT_ERROR,
        };
        Self::new(code, e.to_string())
    }
}

type CliResult = Result<(), Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> CliResult {
    match command {
        Command::Gen {
            n,
            k,
            seed,
            out: path,
        } => gen(n, k, seed, path.as_deref(), out),
        Command::Sync {
            input,
            epsilon,
            fallback,
            report,
            format,
            expand,
        } => sync(
            &input,
            epsilon,
            fallback,
            report.as_deref(),
            format,
            expand,
            out,
        ),
        Command::Exact { input } => exact(&input, out),
        Command::Check { input, word } => check(&input, &word, out),
        Command::Bench(args) => bench(&args, out),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::new(EXIT_ERROR, format!("{}: {e}", path.display()))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn read_dfa(path: &Path) -> Result<Dfa, Failure> {
    parse_dfa(&read_text(path)?)
        .map_err(|e| Failure::new(EXIT_ERROR, format!("{}: {e}", path.display())))
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> CliResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_failure(p, e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::new(EXIT_ERROR, e.to_string())),
    }
}

fn validate_epsilon(epsilon: f64) -> CliResult {
    if epsilon > 0.0 && epsilon < 0.125 {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_ERROR,
            format!("epsilon must lie in (0, 1/8), got {epsilon}"),
        ))
    }
}

fn gen(n: usize, k: usize, seed: u64, path: Option<&Path>, out: &mut dyn Write) -> CliResult {
    let d = uniform_dfa(n, k, &mut Rng::from_seed(seed))?;
    emit(&write_dfa(&d), path, out)
}

fn word_text(cert: &SyncCertificate, expand: bool) -> Result<String, Failure> {
    if !expand {
        return Ok(format_word(&cert.word)?);
    }
    if cert.length > EXPAND_LIMIT {
        return Err(Failure::new(
            EXIT_ERROR,
            format!(
                "word has {} letters; --expand is limited to {EXPAND_LIMIT}",
                cert.length
            ),
        ));
    }
    Ok(cert
        .word
        .letters()
        .map(|l| (b'a' + l as u8) as char)
        .collect())
}

fn print_certificate(
    cert: &SyncCertificate,
    format: SyncFormat,
    expand: bool,
) -> Result<String, Failure> {
    Ok(match format {
        SyncFormat::Json if !expand => format!("{}\n", cert.to_json()?),
        SyncFormat::Json => format!(
            "{{\"word\":\"{}\",\"length\":{},\"sink\":{}}}\n",
            word_text(cert, true)?,
            cert.length,
            cert.sink
        ),
        SyncFormat::Text => format!(
            "word {}\nlength {}\nsink {}\n",
            word_text(cert, expand)?,
            cert.length,
            cert.sink
        ),
    })
}

fn sync(
    input: &Path,
    epsilon: f64,
    fallback: Option<Fallback>,
    report_path: Option<&Path>,
    format: SyncFormat,
    expand: bool,
    out: &mut dyn Write,
) -> CliResult {
    validate_epsilon(epsilon)?;
    let d = read_dfa(input)?;
    let outcome = synchronize(&d, epsilon)?;
    if let Some(p) = report_path {
        emit(&format!("{}\n", outcome.report().to_json()), Some(p), out)?;
    }
    let cert = match (outcome.certificate(), fallback) {
        (Some(c), _) => c.clone(),
        (None, None) => {
            let r = outcome.report();
            let (p, q) = r.failed_pair.unwrap_or_default();
            return Err(Failure::negative(format!(
                "merge failure: states {p} and {q} did not merge within lambda = {}",
                r.thresholds.lambda
            )));
        }
        (None, Some(Fallback::Greedy)) => {
            if d.n() > GREEDY_MAX_STATES {
                return Err(Error::Capacity {
                    n: d.n(),
                    limit: GREEDY_MAX_STATES,
                }
                .into());
            }
            let word =
                greedy_reset_word(&d).ok_or_else(|| Failure::negative("not synchronizing"))?;
            let sink = eval_word(&d, &word)?.apply(0);
            SyncCertificate::new(word, sink)
        }
    };
    emit(&print_certificate(&cert, format, expand)?, None, out)
}

fn exact(input: &Path, out: &mut dyn Write) -> CliResult {
    let d = read_dfa(input)?;
    let word = shortest_reset_word(&d)?.ok_or_else(|| Failure::negative("not synchronizing"))?;
    let sink = eval_word(&d, &word)?.apply(0);
    let cert = SyncCertificate::new(word, sink);
    emit(
        &print_certificate(&cert, SyncFormat::Text, false)?,
        None,
        out,
    )
}

fn check(input: &Path, word_path: &Path, out: &mut dyn Write) -> CliResult {
    let d = read_dfa(input)?;
    let text = read_text(word_path)?;
    let ok = if text.trim_start().starts_with('{') {
        let cert = SyncCertificate::from_json(&text)?;
        eval_word(&d, &cert.word)?;
        verify_certificate(&d, &cert)
    } else {
        let word = parse_word(text.trim())?;
        eval_word(&d, &word)?.constant_value().is_some()
    };
    if ok {
        emit("ok\n", None, out)
    } else {
        Err(Failure::negative("not a synchronizing word"))
    }
}

fn configure_threads(flag: Option<usize>) -> CliResult {
    let from_env = std::env::var(THREADS_ENV).ok();
    let threads = match (flag, from_env) {
        (Some(t), _) => t,
        (None, Some(v)) => v.trim().parse().map_err(|_| {
            Failure::new(
                EXIT_ERROR,
                format!("{THREADS_ENV} must be a count, got {v:?}"),
            )
        })?,
        (None, None) => return Ok(()),
    };
    // Fails only if the global pool already exists, as in repeated in-process runs.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

fn bench(args: &BenchArgs, out: &mut dyn Write) -> CliResult {
    configure_threads(args.threads)?;
    let record: ExperimentRecord = match args.experiment {
        Experiment::Lemma2 => {
            if !(args.epsilon > 0.0 && args.epsilon < 0.5) {
                return Err(Failure::new(EXIT_ERROR, "lemma2 needs epsilon in (0, 1/2)"));
            }
            let law = match args.dist {
                Dist::Uniform => MappingLaw::Uniform,
                Dist::Linear => MappingLaw::Linear,
            };
            lemma2_experiment(args.n, args.epsilon, args.trials, args.seed, &law)?
        }
        Experiment::Sets => {
            validate_epsilon(args.epsilon)?;
            let family = match args.which {
                Which::E => Family::E,
                Which::F => Family::F,
                Which::G => Family::G,
            };
            set_extension_experiment(args.n, args.epsilon, args.trials, args.seed, family)?
        }
        Experiment::Success => {
            validate_epsilon(args.epsilon)?;
            success_profile(args.n, args.epsilon, args.trials, args.seed)?
        }
    };
    let text = match args.format {
        BenchFormat::Json => format!("{}\n", record.to_json()),
        BenchFormat::Csv => format!("{}\n{}", ExperimentRecord::csv_header(), record.csv_rows()),
    };
    emit(&text, args.out.as_deref(), out)
}
