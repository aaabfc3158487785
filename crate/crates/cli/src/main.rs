//! Command-line front door: parse sequence and function descriptions,
//! dispatch the engine, oracle and refuter operations, and emit canonical
//! JSON documents or CSV tables.
//!
//! Exit codes: 0 success, 1 failed verdict or internal error, 2 refutation
//! found (the expected success for refuters), 3 resource exhaustion,
//! 4 parse or usage error. Diagnostics go to standard error; machine output
//! goes to standard out or `--out`.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dickson_core::canon::Value;
use dickson_core::dsl::{parse_coloring, parse_multifunction, parse_sequence};
use dickson_core::engine::{self, Witness};
use dickson_core::error::Error;
use dickson_core::oracle::{self, Family};
use dickson_core::pigeonhole;
use dickson_core::sequence::{EngineConfig, MultiFunction, Nat, Sequence, nat};
use dickson_core::unprovability;

#[derive(Parser)]
#[command(
    name = "dickson",
    version,
    about = "Witness extraction and bound certification for finite good-index sets",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Point-evaluation budget per engine call.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Write the output document here instead of standard out.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Extract a common good set with its bound certificate.
    Witness {
        /// Sequence description; repeat for more sequences (order matters).
        #[arg(long = "seq", required = true)]
        seqs: Vec<String>,
        /// Number of indices in the good set.
        #[arg(long)]
        l: u64,
        /// Search for an early witness instead; no certificate is produced.
        #[arg(long)]
        opportunistic: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Re-check a witness document against its sequences.
    Certify {
        /// Path of the witness document.
        #[arg(long = "in")]
        input: std::path::PathBuf,
        #[arg(long = "seq", required = true)]
        seqs: Vec<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Exhaustive minimal-witness search cross-checked with the engine.
    Oracle {
        #[arg(long = "seq", required = true)]
        seqs: Vec<String>,
        #[arg(long)]
        l: u64,
        /// Largest index searched (defaults to the extracted bound).
        #[arg(long)]
        horizon: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Bound-tightness table over a parametric family, as CSV.
    Tightness {
        /// Family name: dec, gap or const.
        #[arg(long)]
        family: String,
        /// Parameter range `lo..hi` (inclusive) or comma-separated list.
        #[arg(long)]
        params: String,
        #[arg(long)]
        l: u64,
        /// Fan parameter points out over this many threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Chain witnesses showing a function of pairs cannot linearize the
    /// product order in one step.
    #[command(name = "refute-2d")]
    Refute2d {
        /// Function description, `f2:<expr in i,j>`.
        #[arg(long)]
        f: String,
        #[arg(long)]
        l: u64,
        /// Independent constructions, with the coordinate floor set to the
        /// trial number.
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Triple witnesses showing a pair of functions of triples cannot
    /// linearize the product order in one step.
    #[command(name = "refute-3d")]
    Refute3d {
        #[arg(long)]
        f1: String,
        #[arg(long)]
        f2: String,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Violation witness for a claimed lexicographic-order embedding.
    #[command(name = "lex-refute")]
    LexRefute {
        #[arg(long)]
        f: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Equal-value run below a threshold or a crossing above it.
    Dichotomy {
        /// Exactly two sequence descriptions.
        #[arg(long = "seq", required = true)]
        seqs: Vec<String>,
        /// Threshold value.
        #[arg(long = "M")]
        threshold: String,
        #[arg(long)]
        l: u64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Monochromatic run under a 2-coloring.
    Pigeonhole {
        /// Coloring description (values must stay in {0,1}).
        #[arg(long = "seq")]
        seq: String,
        #[arg(long)]
        l: u64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Verify that no pair of indices is good for the whole descending
    /// family.
    Counterexample {
        #[arg(long = "n-max")]
        n_max: u64,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn config(common: &CommonArgs) -> EngineConfig {
    match common.budget {
        Some(b) => EngineConfig::with_budget(b),
        None => EngineConfig::default(),
    }
}

/// Effective limits go into every JSON document for reproducibility.
fn with_meta(mut doc: Value, cfg: &EngineConfig, horizon: Option<&Nat>) -> Value {
    let mut fields = vec![("budget", Value::nat(nat(cfg.eval_budget)))];
    if let Some(h) = horizon {
        fields.push(("horizon", Value::Nat(h.clone())));
    }
    if let Value::Obj(map) = &mut doc {
        map.insert("meta".to_string(), Value::obj(fields));
    }
    doc
}

fn parse_nat(text: &str) -> Result<Nat, Error> {
    text.parse::<Nat>().map_err(|_| Error::Parse {
        pos: 0,
        expected: "decimal natural".into(),
        found: format!("'{text}'"),
    })
}

fn parse_seqs(texts: &[String]) -> Result<Vec<Sequence>, Error> {
    texts.iter().map(|t| parse_sequence(t)).collect()
}

fn parse_params(text: &str) -> Result<Vec<u64>, Error> {
    let bad = |found: &str| Error::Parse {
        pos: 0,
        expected: "parameter range lo..hi or comma-separated list".into(),
        found: found.to_string(),
    };
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| bad(text))?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad(text))?;
        if hi < lo {
            return Err(bad(text));
        }
        return Ok((lo..=hi).collect());
    }
    text.split(',')
        .map(|p| p.trim().parse().map_err(|_| bad(text)))
        .collect()
}

/// Expanding-horizon search for an early witness. Never emits a bound.
fn opportunistic_witness(seqs: &[Sequence], l: u64, cfg: &EngineConfig) -> Result<Value, Error> {
    let mut horizon = nat(l.max(4) * 2);
    loop {
        let report = oracle::minimal_good_set(seqs, l, &horizon, cfg)?;
        if let Some(found) = report.minimal_witness {
            return Ok(Value::obj([
                ("kind", Value::str("witness-opportunistic")),
                ("k", Value::nat(nat(seqs.len() as u64))),
                ("l", Value::nat(nat(l))),
                ("indices", Value::nat_arr(found.indices.iter())),
            ]));
        }
        horizon = &horizon * 2u32;
    }
}

enum Outcome {
    Json(Value),
    Csv(String),
    /// Verdict documents fail the process when the check fails.
    Checked(Value, bool),
    /// Refutation documents exit with the dedicated code.
    Refutation(Value),
}

fn run(command: &Command) -> Result<(Outcome, Option<std::path::PathBuf>), Error> {
    match command {
        Command::Witness {
            seqs,
            l,
            opportunistic,
            common,
        } => {
            let cfg = config(common);
            let seqs = parse_seqs(seqs)?;
            let doc = if *opportunistic {
                opportunistic_witness(&seqs, *l, &cfg)?
            } else {
                engine::dl_k_l(&seqs, *l, &cfg)?.to_value(None)
            };
            Ok((
                Outcome::Json(with_meta(doc, &cfg, None)),
                common.out.clone(),
            ))
        }
        Command::Certify {
            input,
            seqs,
            common,
        } => {
            let cfg = config(common);
            let seqs = parse_seqs(seqs)?;
            let text = std::fs::read_to_string(input)
                .map_err(|e| Error::Certificate(format!("cannot read {}: {e}", input.display())))?;
            let witness = Witness::from_value(&dickson_core::canon::parse(&text)?)?;
            let verdict = engine::check_certificate(&seqs, &witness.good, &witness.cert, &cfg);
            let pass = verdict.pass;
            let doc = with_meta(verdict.to_value(), &cfg, None);
            Ok((Outcome::Checked(doc, pass), common.out.clone()))
        }
        Command::Oracle {
            seqs,
            l,
            horizon,
            common,
        } => {
            let cfg = config(common);
            let seqs = parse_seqs(seqs)?;
            let horizon = horizon.as_deref().map(parse_nat).transpose()?;
            let (report, _witness) = oracle::oracle_report(&seqs, *l, horizon.as_ref(), &cfg)?;
            let doc = with_meta(report.to_value(), &cfg, horizon.as_ref());
            Ok((Outcome::Json(doc), common.out.clone()))
        }
        Command::Tightness {
            family,
            params,
            l,
            jobs,
            common,
        } => {
            let cfg = config(common);
            let family = Family::parse(family)?;
            let params = parse_params(params)?;
            let rows = oracle::tightness_experiment(family, &params, *l, *jobs, &cfg)?;
            Ok((
                Outcome::Csv(oracle::tightness_csv(&rows)),
                common.out.clone(),
            ))
        }
        Command::Refute2d {
            f,
            l,
            trials,
            common,
        } => {
            let cfg = config(common);
            let f = parse_multifunction(f)?;
            let r = unprovability::one_step_refute_2d(&f, *l, *trials, &cfg)?;
            Ok((
                Outcome::Refutation(with_meta(r.to_value(), &cfg, None)),
                common.out.clone(),
            ))
        }
        Command::Refute3d {
            f1,
            f2,
            trials,
            common,
        } => {
            let cfg = config(common);
            let f1: MultiFunction = parse_multifunction(f1)?;
            let f2: MultiFunction = parse_multifunction(f2)?;
            let r = unprovability::one_step_refute_3d(&f1, &f2, *trials, &cfg)?;
            Ok((
                Outcome::Refutation(with_meta(r.to_value(), &cfg, None)),
                common.out.clone(),
            ))
        }
        Command::LexRefute { f, common } => {
            let cfg = config(common);
            let f = parse_multifunction(f)?;
            let v = unprovability::lex_embed_refute(&f, &cfg)?;
            Ok((
                Outcome::Refutation(with_meta(v.to_value(), &cfg, None)),
                common.out.clone(),
            ))
        }
        Command::Dichotomy {
            seqs,
            threshold,
            l,
            common,
        } => {
            let cfg = config(common);
            if seqs.len() != 2 {
                return Err(Error::InvalidArg(
                    "dichotomy takes exactly two --seq arguments".into(),
                ));
            }
            let parsed = parse_seqs(seqs)?;
            let m = parse_nat(threshold)?;
            let r = unprovability::dichotomy_lemma(&parsed[0], &parsed[1], &m, *l, &cfg)?;
            Ok((
                Outcome::Json(with_meta(r.to_value(), &cfg, None)),
                common.out.clone(),
            ))
        }
        Command::Pigeonhole { seq, l, common } => {
            let cfg = config(common);
            let chi = parse_coloring(seq)?;
            let r = pigeonhole::ph2_from_dl(&chi, *l, &cfg)?;
            Ok((
                Outcome::Json(with_meta(r.to_value(), &cfg, None)),
                common.out.clone(),
            ))
        }
        Command::Counterexample { n_max, common } => {
            let r = oracle::counterexample_family_check(*n_max)?;
            Ok((Outcome::Json(r.to_value()), common.out.clone()))
        }
    }
}

fn emit(text: &str, out: Option<&std::path::Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(4);
        }
    };
    match run(&cli.command) {
        Ok((outcome, out)) => {
            let (text, code) = match outcome {
                Outcome::Json(v) => (v.to_canonical_string() + "\n", ExitCode::SUCCESS),
                Outcome::Csv(csv) => (csv, ExitCode::SUCCESS),
                Outcome::Checked(v, pass) => (
                    v.to_canonical_string() + "\n",
                    if pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    },
                ),
                Outcome::Refutation(v) => (v.to_canonical_string() + "\n", ExitCode::from(2)),
            };
            if let Err(e) = emit(&text, out.as_deref()) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(1);
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_exhaustion() {
                ExitCode::from(3)
            } else if matches!(e, Error::Parse { .. }) {
                ExitCode::from(4)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
