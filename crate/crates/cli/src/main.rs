//! `kbosat`: KBO termination proofs for term and string rewrite systems.
//!
//! Exit codes: 0 YES, 1 MAYBE, 2 ERROR.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kbosat::corpus::{run_corpus, system_kind};
use kbosat::parse::parse_system;
use kbosat::proof::{render, ProofJson};
use kbosat::prover::{encode, import_model, parse_model, prove, Minimize, Outcome, RunConfig, Verdict};
use kbosat::{EngineKind, PrecedenceMode, Trs};
use serde_json::json;

#[derive(Parser)]
#[command(name = "kbosat", version, about = "KBO termination prover based on SAT and pseudo-boolean encodings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prove termination of a single .trs or .srs file.
    Prove {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
        #[command(flatten)]
        emit: Emit,
    },
    /// Run every problem in a directory and print a report.
    Corpus {
        dir: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Write the encoding without solving it.
    Export {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
        #[command(flatten)]
        emit: Emit,
    },
    /// Decode and verify a model produced by an external solver.
    Import {
        file: PathBuf,
        /// Model file with signed literals (DIMACS `v` lines or OPB `x` names).
        model: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Opts {
    #[arg(long, default_value = "pbc", value_parser = parse_engine)]
    engine: EngineKind,
    /// Weight bits; defaults to 4 for TRSs and 7 for SRSs.
    #[arg(long)]
    bits: Option<usize>,
    #[arg(long, default_value = "quasi", value_parser = parse_mode)]
    precedence: PrecedenceMode,
    #[arg(long, default_value = "none", value_parser = parse_minimize)]
    minimize: Minimize,
    /// Per-problem wall-clock limit in seconds; 0 disables it.
    #[arg(long, default_value_t = 10.0)]
    timeout: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct Emit {
    #[arg(long, value_name = "PATH")]
    emit_dimacs: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    emit_opb: Option<PathBuf>,
}

fn parse_engine(s: &str) -> Result<EngineKind, String> {
    s.parse()
}

fn parse_mode(s: &str) -> Result<PrecedenceMode, String> {
    s.parse()
}

fn parse_minimize(s: &str) -> Result<Minimize, String> {
    s.parse()
}

impl Opts {
    fn config(&self) -> Result<RunConfig> {
        if !self.timeout.is_finite() || self.timeout < 0.0 {
            bail!("timeout must be a non-negative number of seconds");
        }
        let cfg = RunConfig {
            engine: self.engine,
            bits: self.bits,
            mode: self.precedence,
            minimize: self.minimize,
            timeout: (self.timeout > 0.0).then(|| Duration::from_secs_f64(self.timeout)),
            ..RunConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn load(path: &Path) -> Result<Trs> {
    let kind = system_kind(path)
        .with_context(|| format!("{}: expected a .trs or .srs file", path.display()))?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_system(&text, kind).with_context(|| format!("parsing {}", path.display()))
}

fn write_encoding(trs: &Trs, cfg: &RunConfig, emit: &Emit) -> Result<()> {
    if emit.emit_dimacs.is_none() && emit.emit_opb.is_none() {
        return Ok(());
    }
    let encoded = encode(trs, cfg)?;
    if let Some(path) = &emit.emit_dimacs {
        std::fs::write(path, encoded.dimacs()).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &emit.emit_opb {
        let Some(opb) = encoded.opb() else {
            bail!("--emit-opb needs the pbc engine");
        };
        std::fs::write(path, opb).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn report(trs: &Trs, out: &Outcome, format: Format) {
    match format {
        Format::Text => match &out.verdict {
            Verdict::Yes { proof, objective } => {
                println!("YES");
                print!("{}", render(proof, trs.signature()));
                if let Some(o) = objective {
                    let note = if o.optimal { "optimal" } else { "not proved optimal" };
                    println!("objective: {} ({note})", o.value);
                }
            }
            Verdict::Maybe(reason) => {
                println!("MAYBE ({})", serde_json::to_value(reason).unwrap().as_str().unwrap_or(""));
            }
        },
        Format::Json => {
            let value = match &out.verdict {
                Verdict::Yes { proof, objective } => json!({
                    "verdict": "YES",
                    "proof": ProofJson::new(proof, trs.signature()),
                    "objective": objective,
                    "stats": out.stats,
                }),
                Verdict::Maybe(reason) => json!({
                    "verdict": "MAYBE",
                    "reason": reason,
                    "stats": out.stats,
                }),
            };
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Prove { file, opts, emit } => {
            let cfg = opts.config()?;
            let trs = load(&file)?;
            write_encoding(&trs, &cfg, &emit)?;
            let out = prove(&trs, &cfg)?;
            report(&trs, &out, opts.format);
            Ok(ExitCode::from(if out.verdict.is_yes() { 0 } else { 1 }))
        }
        Command::Corpus { dir, opts } => {
            let cfg = opts.config()?;
            let rep = run_corpus(&dir, &cfg).with_context(|| format!("reading {}", dir.display()))?;
            match opts.format {
                Format::Text => print!("{}", rep.to_text()),
                Format::Json => println!("{}", serde_json::to_string_pretty(&rep)?),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Export { file, opts, emit } => {
            if emit.emit_dimacs.is_none() && emit.emit_opb.is_none() {
                bail!("export needs --emit-dimacs or --emit-opb");
            }
            let cfg = opts.config()?;
            let trs = load(&file)?;
            write_encoding(&trs, &cfg, &emit)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Import { file, model, opts } => {
            let cfg = opts.config()?;
            let trs = load(&file)?;
            let text =
                std::fs::read_to_string(&model).with_context(|| format!("reading {}", model.display()))?;
            let m = parse_model(&text)?;
            let proof = import_model(&trs, &cfg, &m)?;
            match opts.format {
                Format::Text => {
                    println!("YES");
                    print!("{}", render(&proof, trs.signature()));
                }
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "verdict": "YES",
                        "proof": ProofJson::new(&proof, trs.signature()),
                    }))?
                ),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
