use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use kurepa_core::game::{check_even_ell, decompose, diagonalize, verify_trace, Candidate, EOracle, Status};
use kurepa_core::mutation::Mutation;
use kurepa_core::suite::{run_all, run_suite, SuiteConfig, DEFAULT_PAIR_BUDGET, SUITES};
use kurepa_core::talagrand::{smoothness_probe, talagrand_witness, FinSuppFn, TalagrandOperator};
use kurepa_core::tau::{ell, p_value, tau};
use kurepa_core::tree::generate_fragment;
use kurepa_core::{Error, Fragment, Node, Point, Sign};

/// Finite-scale checks of the Kurepa-tree duplicate space.
///
/// Exit status: 0 when every check passes, 1 when a counterexample is
/// found, 2 on a usage error.
#[derive(Parser)]
#[command(name = "kurepa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the fragment of all injective sequences up to the given depth.
    GenFragment {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one suite, or `all`, and emit its JSON report.
    Verify {
        /// One of the suite names, or `all`.
        suite: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run every suite and emit the combined report.
    Report {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Decompose a candidate sequence of open sets and play the diagonalization against it.
    GruenhageGame {
        #[arg(long)]
        candidate: PathBuf,
        /// Fragment JSON; defaults to the one given by --depth/--alphabet.
        #[arg(long)]
        fragment: Option<PathBuf>,
        #[command(flatten)]
        shape: Shape,
        #[arg(long, default_value_t = 64)]
        rounds: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate or probe the smooth Talagrand operator.
    Talagrand {
        #[command(subcommand)]
        action: TalagrandAction,
    },
    /// Print τ(s,t), ℓ(s,t) and p(s,t).
    Tau {
        #[arg(long, value_parser = parse_node, allow_hyphen_values = true)]
        s: Node,
        #[arg(long, value_parser = parse_node, allow_hyphen_values = true)]
        t: Node,
    },
}

#[derive(Subcommand)]
enum TalagrandAction {
    /// `(Tf)(s,i,n)`.
    Eval {
        #[command(flatten)]
        at: At,
        /// Successor values this close to `f(s,i)` count as equal.
        #[arg(long, default_value_t = 0.0)]
        tolerance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A norm-attaining point and level where the operator is nonzero.
    Witness {
        #[arg(long)]
        function: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Central differences at h and h/2 against the analytic derivative.
    Probe {
        #[command(flatten)]
        at: At,
        #[arg(long)]
        direction: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct At {
    #[arg(long)]
    function: PathBuf,
    #[arg(long, value_parser = parse_node, allow_hyphen_values = true)]
    node: Node,
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
    sign: Sign,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
}

#[derive(Args, Clone, Copy)]
struct Shape {
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = 4)]
    alphabet: u32,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    shape: Shape,
    #[arg(long)]
    p_max: Option<u32>,
    #[arg(long, default_value_t = 64)]
    rounds: usize,
    #[arg(long, default_value_t = SuiteConfig::default().seed)]
    seed: u64,
    /// Random instances per seeded suite.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_PAIR_BUDGET)]
    pair_budget: usize,
    /// Deliberate defect for negative-control runs.
    #[arg(long, default_value = "none")]
    mutation: Mutation,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> SuiteConfig {
        SuiteConfig {
            depth: self.shape.depth,
            alphabet: self.shape.alphabet,
            p_max: self.p_max,
            rounds: self.rounds,
            seed: self.seed,
            samples: self.samples,
            pair_budget: self.pair_budget,
            mutation: self.mutation,
        }
    }
}

/// Accepts `[3,1,2]`, `3,1,2` or an empty string for `∅`.
fn parse_node(raw: &str) -> Result<Node, String> {
    let trimmed = raw.trim().trim_start_matches(['[', '(']).trim_end_matches([']', ')']);
    let values = trimmed
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u32>().map_err(|e| format!("bad value {s:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Node::new(values).map_err(|e| e.to_string())
}

fn parse_sign(raw: &str) -> Result<Sign, String> {
    match raw.trim() {
        "1" | "+1" | "+" => Ok(Sign::Plus),
        "-1" | "-" => Ok(Sign::Minus),
        other => Err(format!("sign must be 1 or -1, got {other:?}")),
    }
}

enum Failure {
    Usage(anyhow::Error),
    Counterexample,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.into())
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(value: &Value, out: Option<&Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn verdict(pass: bool) -> Result<(), Failure> {
    if pass {
        Ok(())
    } else {
        Err(Failure::Counterexample)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::GenFragment { shape, out } => {
            if shape.depth as u64 > shape.alphabet as u64 {
                return Err(anyhow!("depth {} exceeds alphabet {}", shape.depth, shape.alphabet).into());
            }
            let frag = generate_fragment(shape.depth, shape.alphabet);
            emit(&serde_json::to_value(&frag).map_err(anyhow::Error::from)?, out.as_deref())?;
            Ok(())
        }
        Command::Verify { suite, run } => {
            let config = run.config();
            if suite == "all" {
                return report(&config, run.out.as_deref());
            }
            if !SUITES.contains(&suite.as_str()) {
                return Err(anyhow!("unknown suite {suite:?}; expected one of {} or all", SUITES.join(", ")).into());
            }
            let r = run_suite(&suite, &config)?;
            eprintln!("{r}");
            emit(&serde_json::to_value(&r).map_err(anyhow::Error::from)?, run.out.as_deref())?;
            verdict(r.passed())
        }
        Command::Report { run } => report(&run.config(), run.out.as_deref()),
        Command::GruenhageGame {
            candidate,
            fragment,
            shape,
            rounds,
            out,
        } => {
            let candidate: Candidate = read_json(&candidate)?;
            let frag: Fragment = match fragment {
                Some(path) => read_json(&path)?,
                None => generate_fragment(shape.depth, shape.alphabet),
            };
            let esets = decompose(&candidate, &frag)?;
            let odd: Vec<Value> = esets
                .iter()
                .flat_map(|e| {
                    check_even_ell(e)
                        .into_iter()
                        .filter(|(a, b)| e.theta[a] == e.theta[b])
                        .map(move |(a, b)| json!({ "n": e.n, "m": e.m, "i": e.i, "pair": [a, b] }))
                })
                .collect();
            let oracles: Vec<&dyn EOracle> = esets.iter().map(|e| e as &dyn EOracle).collect();
            let trace = diagonalize(&oracles, &frag, rounds)?;
            let checked = verify_trace(&trace, &oracles, &frag);
            for e in &esets {
                eprintln!("E(n={}, m={}, i={}): {} nodes", e.n, e.m, e.i, e.nodes.len());
            }
            for r in &trace.rounds {
                eprintln!("round {r}");
            }
            eprintln!("status {:?}", trace.status);
            if let Err(e) = &checked {
                eprintln!("trace rejected: {e}");
            }
            if !odd.is_empty() {
                eprintln!("odd ℓ within an E-set: {}", Value::Array(odd.clone()));
            }
            emit(&serde_json::to_value(&trace).map_err(anyhow::Error::from)?, out.as_deref())?;
            verdict(checked.is_ok() && odd.is_empty() && trace.status != Status::ObstructionViolated)
        }
        Command::Talagrand { action } => talagrand(action),
        Command::Tau { s, t } => {
            let seq = tau(&s, &t)?;
            let value = json!({
                "s": s,
                "t": t,
                "tau": seq,
                "ell": ell(&s, &t)?,
                "p": p_value(&s, &t)?,
            });
            emit(&value, None)?;
            Ok(())
        }
    }
}

fn report(config: &SuiteConfig, out: Option<&Path>) -> Result<(), Failure> {
    let reports = run_all(config)?;
    for r in &reports {
        eprintln!("{r}");
    }
    let pass = reports.iter().all(|r| r.passed());
    let value = json!({
        "config": config,
        "status": if pass { "pass" } else { "fail" },
        "reports": reports,
    });
    emit(&value, out)?;
    verdict(pass)
}

fn talagrand(action: TalagrandAction) -> Result<(), Failure> {
    match action {
        TalagrandAction::Eval { at, tolerance, out } => {
            let f: FinSuppFn = read_json(&at.function)?;
            let p = Point::new(at.node, at.sign);
            let value = TalagrandOperator { tolerance }.eval(&f, &p, at.n);
            emit(&json!({ "point": p, "n": at.n, "value": value }), out.as_deref())?;
            Ok(())
        }
        TalagrandAction::Witness { function, out } => {
            let f: FinSuppFn = read_json(&function)?;
            let (p, n) = talagrand_witness(&f)?;
            let value = kurepa_core::talagrand::t_op(&f, &p, n);
            emit(&json!({ "point": p, "n": n, "value": value }), out.as_deref())?;
            Ok(())
        }
        TalagrandAction::Probe { at, direction, h, out } => {
            let f: FinSuppFn = read_json(&at.function)?;
            let d: FinSuppFn = read_json(&direction)?;
            let p = Point::new(at.node, at.sign);
            let report = smoothness_probe(&f, &p, at.n, &d, h)?;
            eprintln!("observed order {:.3}", report.ratio.log2());
            emit(&serde_json::to_value(&report).map_err(anyhow::Error::from)?, out.as_deref())?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Counterexample) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
