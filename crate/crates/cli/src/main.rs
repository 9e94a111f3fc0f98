use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use lefschetz_core::factorization::{Factorization, Move, SearchBudget};
use lefschetz_core::factorization::AurouxCertificate;
use lefschetz_core::report::{self, AurouxOptions, ExportTarget, Format, VerificationReport};
use lefschetz_core::surface::SignMode;
use lefschetz_core::Error;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Exit codes: 0 pass, 1 failure, 2 usage error, 3 only inconclusive checks.
#[derive(Parser)]
#[command(name = "lefschetz", version, about = "Twist factorizations, Hurwitz moves and braid monodromy for the (a,b,c) bidouble covers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the six Coxeter factors with the reference ψ on homology.
    VerifyPsi {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Build the lifted monodromy factorization and certify that every ψ core appears in it.
    Auroux {
        #[command(flatten)]
        model: ModelArgs,
        /// Block composition, e.g. XXYY.
        #[arg(long, default_value = "XXYY")]
        composition: String,
        /// Drop the σ letters (expected to fail the hypothesis check).
        #[arg(long)]
        without_sigma: bool,
        /// Where to write the certificate JSON.
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Replay an existing certificate instead of issuing one.
        #[arg(long, conflicts_with = "certificate")]
        replay: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Write a configuration, ribbon graph, homology model, monodromy blocks or the ψ word.
    Export {
        #[arg(value_enum)]
        what: ExportWhat,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Invariants, hypothesis margins and family enumeration for type ((2a,2b),(2c,2d)).
    Invariants {
        #[arg(long)]
        a: i64,
        #[arg(long)]
        b: i64,
        #[arg(long)]
        c: i64,
        /// Defaults to b.
        #[arg(long)]
        d: Option<i64>,
        /// Family parameter; enables the hypothesis checks and enumeration.
        #[arg(long)]
        k: Option<i64>,
        /// Enumerate the family even if the hypotheses fail.
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Braid equality and the relation checks
    #[command(subcommand)]
    Braid(BraidCommand),
    /// Bicoloured braid monodromy blocks
    #[command(subcommand)]
    Monodromy(MonodromyCommand),
    /// Replay, search and planted instances for Hurwitz moves
    #[command(subcommand)]
    Hurwitz(HurwitzCommand),
}

#[derive(Subcommand)]
enum BraidCommand {
    /// Decide equality of two braid words, given as comma separated signed generators.
    Eq {
        #[arg(long)]
        strands: usize,
        #[arg(long, allow_hyphen_values = true)]
        left: String,
        #[arg(long, allow_hyphen_values = true)]
        right: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check Manfredini's relations for A = σ_{n-k-1}, B = σ_{n-k}², C = σ_{n-k+1}.
    Manfredini {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Subcommand)]
enum MonodromyCommand {
    /// Print the two braid monodromy blocks for m = 2b.
    Emit {
        #[arg(long)]
        b: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum HurwitzCommand {
    /// Apply a move script and check the result bit for bit.
    Replay {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        factorization: PathBuf,
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        target: Option<PathBuf>,
        /// Compare with the target on homology classes instead of symbolically.
        #[arg(long)]
        homology: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Bounded bidirectional search for a script between two factorizations.
    Search {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        /// Maximum number of non-commuting moves.
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, env = SearchBudget::ENV, default_value_t = 2_000_000)]
        max_states: usize,
        /// Where to write the script when one is found.
        #[arg(long)]
        script_out: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Generate a random factorization, a random script and its image.
    Plant {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 8)]
        len: usize,
        #[arg(long, default_value_t = 5)]
        moves: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// Genus parameter; the fibre has genus 4b-3.
    #[arg(long, default_value_t = 2)]
    b: u32,
    /// `auto` or `explicit:s1,s2,s3,s4` for the signs of σ's crossings.
    #[arg(long, default_value = "auto")]
    sign_mode: String,
}

impl ModelArgs {
    fn sign_mode(&self) -> Result<SignMode, Error> {
        self.sign_mode.parse()
    }
}

#[derive(Args)]
struct OutArgs {
    #[arg(long, value_enum, default_value = "table")]
    format: OutFormat,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Dot,
    Table,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Dot => Format::Dot,
            OutFormat::Table => Format::Table,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportWhat {
    Config,
    Ribbon,
    Model,
    Monodromy,
    PsiWord,
}

impl From<ExportWhat> for ExportTarget {
    fn from(w: ExportWhat) -> Self {
        match w {
            ExportWhat::Config => ExportTarget::Config,
            ExportWhat::Ribbon => ExportTarget::Ribbon,
            ExportWhat::Model => ExportTarget::Model,
            ExportWhat::Monodromy => ExportTarget::Monodromy,
            ExportWhat::PsiWord => ExportTarget::PsiWord,
        }
    }
}

/// Outcome of a command, before mapping to an exit code.
enum Outcome {
    Report(VerificationReport),
    Done,
}

fn write_text(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(report: VerificationReport, out: &OutArgs) -> anyhow::Result<Outcome> {
    let json = serde_json::to_string_pretty(&report)? + "\n";
    match out.format {
        OutFormat::Json => print!("{json}"),
        _ => print!("{}", report.to_table()),
    }
    if let Some(p) = &out.out {
        std::fs::write(p, &json).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(Outcome::Report(report))
}

fn parse_word(s: &str) -> Result<Vec<i32>, Error> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<i32>().map_err(|_| Error::Parse(format!("bad generator {p:?}"))))
        .collect()
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::VerifyPsi { model, out } => emit(report::cmd_verify_psi(model.b, model.sign_mode()?)?, &out),
        Command::Auroux { model, composition, without_sigma, certificate, replay, out } => {
            let opts = AurouxOptions { b: model.b, mode: model.sign_mode()?, composition, without_sigma };
            if let Some(path) = replay {
                let cert: AurouxCertificate = read_json(&path)?;
                return emit(report::cmd_auroux_replay(&opts, &cert)?, &out);
            }
            let run = report::cmd_auroux(&opts)?;
            if let (Some(path), Some(cert)) = (certificate, &run.certificate) {
                write_text(Some(&path), &(serde_json::to_string_pretty(cert)? + "\n"))?;
            }
            emit(run.report, &out)
        }
        Command::Export { what, model, format, out } => {
            let text = report::cmd_export(what.into(), model.b, model.sign_mode()?, format.into())?;
            write_text(out.as_deref(), &text)?;
            Ok(Outcome::Done)
        }
        Command::Invariants { a, b, c, d, k, force, out } => emit(report::cmd_invariants(a, b, c, d, k, force)?, &out),
        Command::Braid(BraidCommand::Eq { strands, left, right, out }) => emit(report::cmd_braid_eq(strands, parse_word(&left)?, parse_word(&right)?)?, &out),
        Command::Braid(BraidCommand::Manfredini { n, k, out }) => emit(report::cmd_manfredini(n, k)?, &out),
        Command::Monodromy(MonodromyCommand::Emit { b, format, out }) => {
            let text = report::cmd_export(ExportTarget::Monodromy, b, SignMode::Auto, format.into())?;
            write_text(out.as_deref(), &text)?;
            Ok(Outcome::Done)
        }
        Command::Hurwitz(HurwitzCommand::Replay { model, factorization, script, target, homology, out }) => {
            let f: Factorization = read_json(&factorization)?;
            let s: Vec<Move> = read_json(&script)?;
            let t: Option<Factorization> = target.as_deref().map(read_json).transpose()?;
            emit(report::cmd_hurwitz_replay(&f, &s, t.as_ref(), homology, model.b, model.sign_mode()?)?, &out)
        }
        Command::Hurwitz(HurwitzCommand::Search { model, from, to, depth, max_states, script_out, out }) => {
            let f: Factorization = read_json(&from)?;
            let g: Factorization = read_json(&to)?;
            let budget = SearchBudget { max_depth: depth, max_states };
            let run = report::cmd_hurwitz_search(&f, &g, model.b, model.sign_mode()?, budget)?;
            if let (Some(path), Some(script)) = (script_out, &run.script) {
                write_text(Some(&path), &(serde_json::to_string_pretty(script)? + "\n"))?;
            }
            emit(run.report, &out)
        }
        Command::Hurwitz(HurwitzCommand::Plant { model, len, moves, seed, out }) => {
            let inst = report::cmd_hurwitz_plant(model.b, model.sign_mode()?, len, moves, seed)?;
            write_text(out.as_deref(), &(serde_json::to_string_pretty(&inst)? + "\n"))?;
            Ok(Outcome::Done)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Report(r)) => ExitCode::from(r.exit_code as u8),
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = matches!(e.downcast_ref::<Error>(), Some(Error::InvalidParameter(_) | Error::Parse(_)))
                || e.downcast_ref::<serde_json::Error>().is_some()
                || e.chain().any(|c| c.downcast_ref::<std::io::Error>().is_some());
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
