//! The `rtcn` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid input, 3 failed check.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rtcn_core::conjecture::{BaseMode, ClassLabel, Classifier};
use rtcn_core::network::{generate, Network};
use rtcn_core::pattern::{count_occurrences, PatternId, PatternSpec};
use serde::Serialize;
use serde_json::Value;

use crate::data::{parse_pattern, parse_sigma, TABLE_IDS};
use crate::manifest::{artifact_versions, Digest, RunManifest};
use crate::montecarlo::{run_samples, ExperimentConfig, Source};
use crate::verify::{Suite, Verifier, VerifyOptions};
use crate::{format, LabError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "rtcn",
    version,
    about = "Pattern counts and limit laws of random ranked tree-child networks"
)]
pub struct Cli {
    /// Where to write the run manifest [default: <out>.manifest.json, or stderr]
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum Command {
    /// Draw a network from the forward construction
    Generate(GenerateArgs),
    /// Count the occurrences of a pattern in a network file
    Count(CountArgs),
    /// Classify a pattern by the recursive conjecture
    Classify(ClassifyArgs),
    /// Write per-replication pattern counts as CSV
    Simulate(SimulateArgs),
    /// Run a verification suite
    Verify(VerifyArgs),
    /// Re-run a manifest and compare output digests
    Replay(ReplayArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Generate(_) => "generate",
            Command::Count(_) => "count",
            Command::Classify(_) => "classify",
            Command::Simulate(_) => "simulate",
            Command::Verify(_) => "verify",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NetFormat {
    Events,
    Dot,
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    #[arg(long)]
    pub leaves: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = NetFormat::Events)]
    pub format: NetFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CountArgs {
    /// Network in the event format
    pub input: PathBuf,
    /// Catalog id or pattern file
    #[arg(long)]
    pub pattern: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    /// Only the bare lineage is a base case
    Trivial,
    /// Cherry and trident are base cases too
    HeightOne,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    /// Pattern file
    #[arg(required_unless_present = "pattern", conflicts_with = "pattern")]
    pub file: Option<PathBuf>,
    /// Catalog id
    #[arg(long)]
    pub pattern: Option<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Trivial)]
    pub mode: ModeArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub leaves: u64,
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `forward`, or a transition table id
    #[arg(long, default_value = "forward")]
    pub source: String,
    /// Catalog ids (forward) or statistic and type names (chains)
    #[arg(long, value_delimiter = ',', required = true)]
    pub pattern: Vec<String>,
    #[arg(long, env = "RTCN_THREADS")]
    #[serde(skip)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub suite: String,
    #[arg(long, default_value_t = 100_000)]
    pub reps: usize,
    #[arg(long, default_value_t = VerifyOptions::default().seed)]
    pub seed: u64,
    #[arg(long, env = "RTCN_THREADS")]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Covariance data file replacing the shipped one
    #[arg(long)]
    pub sigma: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    pub manifest_file: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn input(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: e.to_string(),
    }
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        let code = match e {
            LabError::UnknownId(_) | LabError::Config(_) => EXIT_USAGE,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// What a command produced, before anything is written.
#[derive(Debug)]
pub struct Product {
    pub output: Vec<u8>,
    pub config: Value,
    pub seed: Option<u64>,
    pub inputs: Vec<Digest>,
    /// Exit code when the command ran to completion.
    pub code: i32,
}

fn read(path: &Path, inputs: &mut Vec<Digest>) -> Result<String, Failure> {
    let bytes = std::fs::read(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    inputs.push(Digest::of(path.display().to_string(), &bytes));
    String::from_utf8(bytes).map_err(|_| input(format!("{}: not UTF-8", path.display())))
}

fn json_line<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s.into_bytes()
}

fn resolve_pattern(arg: &str, inputs: &mut Vec<Digest>) -> Result<(String, PatternSpec), Failure> {
    if let Ok(id) = arg.parse::<PatternId>() {
        return Ok((id.name().to_string(), id.spec()));
    }
    let path = Path::new(arg);
    if path.exists() {
        let spec = parse_pattern(&read(path, inputs)?).map_err(input)?;
        return Ok((path.display().to_string(), spec));
    }
    Err(usage(format!(
        "unknown pattern `{arg}`: not a catalog id or a file"
    )))
}

fn capitalized(l: ClassLabel) -> &'static str {
    match l {
        ClassLabel::Degenerate => "Degenerate",
        ClassLabel::Poisson => "Poisson",
        ClassLabel::Normal => "Normal",
    }
}

#[derive(Serialize)]
struct CountReport {
    pattern: String,
    leaves: usize,
    count: u64,
}

#[derive(Serialize)]
struct ClassifyReport {
    pattern: String,
    key: String,
    height: usize,
    mode: ModeArg,
    label: &'static str,
    conjectural: bool,
    /// Labels over every choice of removed maximal event.
    labels_over_removal_orders: Vec<&'static str>,
    ambiguous: bool,
}

/// Runs a parsed command without writing anything.
pub fn execute(cmd: &Command) -> Result<Product, Failure> {
    let config = serde_json::to_value(cmd).expect("serializable arguments");
    let mut inputs = Vec::new();
    let (output, seed, code) = match cmd {
        Command::Generate(a) => {
            if a.leaves < 2 {
                return Err(usage("--leaves must be at least 2"));
            }
            let net = generate(a.leaves, a.seed).map_err(|e| usage(e.to_string()))?;
            let report = net.validate();
            if !report.is_valid() {
                return Err(input(format!(
                    "generated network failed validation: {:?}",
                    report.violations
                )));
            }
            let text = match a.format {
                NetFormat::Events => format::serialize(net.log()),
                NetFormat::Dot => format::to_dot(&net),
            };
            (text.into_bytes(), Some(a.seed), EXIT_OK)
        }
        Command::Count(a) => {
            let (name, spec) = resolve_pattern(&a.pattern, &mut inputs)?;
            let log = format::parse(&read(&a.input, &mut inputs)?).map_err(input)?;
            let net = Network::from_log(&log);
            let count = count_occurrences(&net, &spec).map_err(input)?;
            (
                json_line(&CountReport {
                    pattern: name,
                    leaves: net.leaves(),
                    count,
                }),
                None,
                EXIT_OK,
            )
        }
        Command::Classify(a) => {
            let (name, spec) = match (&a.pattern, &a.file) {
                (Some(id), _) => {
                    let id: PatternId = id
                        .parse()
                        .map_err(|_| usage(format!("unknown pattern `{id}`")))?;
                    (id.name().to_string(), id.spec())
                }
                (None, Some(f)) => (
                    f.display().to_string(),
                    parse_pattern(&read(f, &mut inputs)?).map_err(input)?,
                ),
                (None, None) => return Err(usage("give a pattern file or --pattern")),
            };
            let mode = match a.mode {
                ModeArg::Trivial => BaseMode::TrivialNormal,
                ModeArg::HeightOne => BaseMode::HeightOne,
            };
            let c = Classifier::new(mode).classification(&spec).map_err(input)?;
            let report = ClassifyReport {
                pattern: name,
                height: c.height,
                mode: a.mode,
                label: capitalized(c.last_event),
                conjectural: c.conjectural,
                labels_over_removal_orders: c.labels.iter().map(|&l| capitalized(l)).collect(),
                ambiguous: c.is_ambiguous(),
                key: c.key,
            };
            (json_line(&report), None, EXIT_OK)
        }
        Command::Simulate(a) => {
            let source = match a.source.as_str() {
                "forward" => Source::Forward,
                t if TABLE_IDS.contains(&t) => Source::Chain(t.to_string()),
                t => {
                    return Err(usage(format!(
                        "unknown source `{t}`; use forward or one of {TABLE_IDS:?}"
                    )))
                }
            };
            let cfg = ExperimentConfig {
                source,
                statistics: a.pattern.clone(),
                n: a.leaves,
                replications: a.reps,
                seed: a.seed,
                threads: a.threads,
            };
            (
                run_samples(&cfg)?.to_csv().into_bytes(),
                Some(a.seed),
                EXIT_OK,
            )
        }
        Command::Verify(a) => {
            let suite: Suite = a
                .suite
                .parse()
                .map_err(|e: LabError| usage(e.to_string()))?;
            if a.reps < 100 {
                return Err(usage("--reps must be at least 100"));
            }
            let mut opts = VerifyOptions {
                replications: a.reps,
                seed: a.seed,
                threads: a.threads,
                ..Default::default()
            };
            if let Some(p) = &a.sigma {
                opts.sigma = parse_sigma(&read(p, &mut inputs)?).map_err(input)?;
            }
            let report = Verifier::new(opts).run_suite(suite)?;
            let code = if report.passed { EXIT_OK } else { EXIT_CHECK };
            (json_line(&report), Some(a.seed), code)
        }
        Command::Replay(a) => {
            let m = RunManifest::from_json(&read(&a.manifest_file, &mut inputs)?).map_err(input)?;
            let report = replay(&m)?;
            let code = if report.reproduced {
                EXIT_OK
            } else {
                EXIT_CHECK
            };
            (json_line(&report), m.seed, code)
        }
    };
    Ok(Product {
        output,
        config,
        seed,
        inputs,
        code,
    })
}

#[derive(Debug, Serialize)]
pub struct ReplayReport {
    pub subcommand: String,
    pub reproduced: bool,
    /// Inputs whose contents changed since the recorded run.
    pub changed_inputs: Vec<String>,
    /// Outputs whose digests differ.
    pub differing_outputs: Vec<String>,
    pub version_changes: Vec<String>,
}

/// Re-runs the command recorded in a manifest.
pub fn replay(m: &RunManifest) -> Result<ReplayReport, Failure> {
    let cli =
        Cli::try_parse_from(std::iter::once("rtcn".to_string()).chain(m.args.iter().cloned()))
            .map_err(|e| input(format!("manifest arguments do not parse: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(input("a replay manifest cannot be replayed"));
    }
    let p = execute(&cli.command)?;
    let changed_inputs = m
        .inputs
        .iter()
        .filter(|d| {
            !p.inputs
                .iter()
                .any(|q| q.name == d.name && q.sha256 == d.sha256)
        })
        .map(|d| d.name.clone())
        .collect();
    let differing_outputs: Vec<String> = m.output_differences(&[Digest::of("output", &p.output)]);
    let now = artifact_versions();
    let version_changes = m
        .versions
        .iter()
        .filter(|(k, v)| now.get(*k) != Some(v))
        .map(|(k, v)| {
            format!(
                "{k}: {v} -> {}",
                now.get(k).map(String::as_str).unwrap_or("absent")
            )
        })
        .collect();
    Ok(ReplayReport {
        subcommand: cli.command.name().to_string(),
        reproduced: differing_outputs.is_empty(),
        changed_inputs,
        differing_outputs,
        version_changes,
    })
}

fn out_path(cmd: &Command) -> Option<&Path> {
    match cmd {
        Command::Generate(a) => a.out.as_deref(),
        Command::Count(a) => a.out.as_deref(),
        Command::Classify(a) => a.out.as_deref(),
        Command::Simulate(a) => a.out.as_deref(),
        Command::Verify(a) => a.out.as_deref(),
        Command::Replay(a) => a.out.as_deref(),
    }
}

/// Full entry point: parses `args` (without the program name), runs, writes
/// output and manifest, and returns the exit code.
pub fn run(args: Vec<String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(
        std::iter::once("rtcn".to_string()).chain(args.iter().cloned()),
    ) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{shown}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{shown}");
                    EXIT_USAGE
                }
            };
        }
    };
    let product = match execute(&cli.command) {
        Ok(p) => p,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            return f.code;
        }
    };
    let out = out_path(&cli.command);
    let written = match out {
        Some(p) => std::fs::write(p, &product.output),
        None => stdout.write_all(&product.output),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_INPUT;
    }
    let manifest = RunManifest {
        subcommand: cli.command.name().to_string(),
        args,
        config: product.config,
        seed: product.seed,
        versions: artifact_versions(),
        inputs: product.inputs,
        outputs: vec![Digest::of("output", &product.output)],
    };
    let target = cli.manifest.clone().or_else(|| {
        out.map(|p| {
            let mut s = p.as_os_str().to_owned();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    });
    let text = manifest.to_json();
    let saved = match target {
        Some(p) => std::fs::write(&p, text),
        None => stderr.write_all(text.as_bytes()),
    };
    if let Err(e) = saved {
        let _ = writeln!(stderr, "error: cannot write manifest: {e}");
        return EXIT_INPUT;
    }
    product.code
}
