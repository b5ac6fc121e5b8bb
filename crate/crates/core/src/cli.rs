//! The `qpn` command line.
//!
//! ```text
//! qpn validate --network net.json
//! qpn infer    --network net.json --evidence obs.json [--trace] [--oracle]
//! qpn abstract --network bn.json
//! qpn gen      --seed 7 --nodes 5 [--force-nonmonotone]
//! ```
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 invalid network or
//! evidence, 3 soundness violation found by `--oracle`. `QPN_COLOR=1`
//! colours the node signs printed by `infer`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::engine::{run_sequence, StepReport, TraceEvent};
use crate::format::{emit_network, parse_evidence, parse_network, FormatError, NetworkDocument};
use crate::gen::{generate, GenOptions};
use crate::oracle::{abstract_network, soundness_report, Assignment};
use crate::sign::Sign;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNSOUND: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qpn",
    version,
    about = "Sign propagation in qualitative probabilistic networks"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a network document.
    Validate {
        #[arg(long)]
        network: PathBuf,
    },
    /// Propagate a sequence of observations.
    Infer {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        evidence: PathBuf,
        /// Print every propagation event.
        #[arg(long)]
        trace: bool,
        /// Check the node signs against the exact posteriors.
        #[arg(long)]
        oracle: bool,
    },
    /// Derive the qualitative network from probability tables.
    Abstract {
        #[arg(long)]
        network: PathBuf,
    },
    /// Emit a random network with tables and its abstraction.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        nodes: usize,
        /// Redraw until some influence is non-monotonic.
        #[arg(long)]
        force_nonmonotone: bool,
    },
}

/// What a command printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Outcome {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, message: impl std::fmt::Display) -> Outcome {
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

/// Runs the command line with colour taken from `QPN_COLOR`.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let color = std::env::var("QPN_COLOR").is_ok_and(|v| v == "1");
    run_with(args, color)
}

/// Runs the command line with explicit colour choice.
pub fn run_with<I, T>(args: I, color: bool) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(text)
            };
        }
    };
    let result = match args.command {
        Command::Validate { network } => validate(&network),
        Command::Infer {
            network,
            evidence,
            trace,
            oracle,
        } => infer(&network, &evidence, trace, oracle, color),
        Command::Abstract { network } => abstract_command(&network),
        Command::Gen {
            seed,
            nodes,
            force_nonmonotone,
        } => gen(seed, nodes, force_nonmonotone),
    };
    result.unwrap_or_else(|o| o)
}

fn read(path: &Path) -> Result<String, Outcome> {
    std::fs::read_to_string(path)
        .map_err(|e| Outcome::fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn format_failure(path: &Path, e: FormatError) -> Outcome {
    let code = match e {
        FormatError::Invalid(_) => EXIT_INVALID,
        _ => EXIT_USAGE,
    };
    Outcome::fail(code, format!("{}: {e}", path.display()))
}

fn load_network(path: &Path) -> Result<NetworkDocument, Outcome> {
    parse_network(&read(path)?).map_err(|e| format_failure(path, e))
}

fn validate(path: &Path) -> Result<Outcome, Outcome> {
    let doc = load_network(path)?;
    let net = &doc.network;
    let mut out = format!(
        "valid: {} nodes, {} arcs, {} situational, {} synergies\n",
        net.node_count(),
        net.arcs().count(),
        net.situational_arcs().len(),
        net.synergies().len()
    );
    if doc.bayes.is_some() {
        out.push_str("tables: complete\n");
    }
    Ok(Outcome::ok(out))
}

fn paint(sign: Sign, color: bool) -> String {
    if !color {
        return sign.to_string();
    }
    let code = match sign {
        Sign::Plus => "32",
        Sign::Minus => "31",
        Sign::Zero => "2",
        Sign::Ambiguous => "33",
    };
    format!("\x1b[{code}m{sign}\x1b[0m")
}

fn write_step(
    out: &mut String,
    index: usize,
    value: bool,
    report: &StepReport,
    trace: bool,
    color: bool,
) {
    let _ = writeln!(out, "step {} {}={}", index + 1, report.observation.0, value);
    for event in &report.trace {
        let summary = matches!(
            event,
            TraceEvent::Reduce { .. } | TraceEvent::Restart { .. }
        );
        if trace || summary {
            let _ = writeln!(out, "{event}");
        }
    }
    for (node, sign) in &report.node_signs {
        let _ = writeln!(out, "{node}\t{}", paint(*sign, color));
    }
}

fn infer(
    network: &Path,
    evidence: &Path,
    trace: bool,
    oracle: bool,
    color: bool,
) -> Result<Outcome, Outcome> {
    let doc = load_network(network)?;
    let observations = parse_evidence(&read(evidence)?).map_err(|e| format_failure(evidence, e))?;
    let signed: Vec<_> = observations
        .iter()
        .map(|(n, v)| (n.clone(), Sign::from_bool(*v)))
        .collect();
    let reports =
        run_sequence(&doc.network, &signed).map_err(|e| Outcome::fail(EXIT_INVALID, e))?;

    let mut out = String::new();
    for (i, (report, (_, value))) in reports.iter().zip(&observations).enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_step(&mut out, i, *value, report, trace, color);
    }

    let mut outcome = Outcome::ok(String::new());
    if oracle {
        match &doc.bayes {
            None => outcome
                .stderr
                .push_str("oracle: network has no probability tables; check skipped\n"),
            Some(bn) => {
                let report = soundness_report(bn, &observations, &reports)
                    .map_err(|e| Outcome::fail(EXIT_INVALID, format!("oracle: {e}")))?;
                out.push('\n');
                out.push_str(&report.to_string());
                if !report.is_sound() {
                    outcome.code = EXIT_UNSOUND;
                }
            }
        }
    }
    outcome.stdout = out;
    Ok(outcome)
}

fn abstract_command(path: &Path) -> Result<Outcome, Outcome> {
    let doc = load_network(path)?;
    let bn = doc.bayes.ok_or_else(|| {
        Outcome::fail(
            EXIT_USAGE,
            format!("{}: network has no probability tables", path.display()),
        )
    })?;
    let network =
        abstract_network(&bn, &Assignment::new()).map_err(|e| Outcome::fail(EXIT_USAGE, e))?;
    Ok(Outcome::ok(emit_network(&NetworkDocument {
        network,
        bayes: Some(bn),
    })))
}

fn gen(seed: u64, nodes: usize, force_nonmonotone: bool) -> Result<Outcome, Outcome> {
    let options = GenOptions {
        force_nonmonotone,
        ..GenOptions::new(nodes)
    };
    let doc = generate(seed, options).map_err(|e| Outcome::fail(EXIT_USAGE, e))?;
    Ok(Outcome::ok(emit_network(&doc)))
}
