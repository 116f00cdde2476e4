//! `gradalg`: batch front end. Reads instance documents, writes a JSON report
//! to stdout and a short summary to stderr.
//!
//! Exit codes: 0 success, 2 negative verdict, 1 error.

mod commands;
mod doc;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use gradalg::corpus::{default_workers, CorpusConfig};
use gradalg::galg::{AlphaDoc, HomDoc};

use commands::Outcome;
use doc::{BudgetDoc, CliError, Command, InstanceDoc, Job, JobArgs};

#[derive(Parser)]
#[command(name = "gradalg", version, about = "Graded embeddings and graded identities of G-simple algebras")]
struct Cli {
    /// Add wall-clock timings to the JSON report (off by default, so reports are byte-reproducible).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Pair {
    /// Instance document.
    file: PathBuf,
    /// Source presentation name(s); several names form a direct sum.
    #[arg(long, value_delimiter = ',')]
    a: Vec<String>,
    /// Target presentation name(s).
    #[arg(long, value_delimiter = ',')]
    b: Vec<String>,
    /// Longest multidegree for bounded identity scans.
    #[arg(long)]
    max_len: Option<usize>,
    /// Cap on evaluations per identity space.
    #[arg(long)]
    max_evals: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether A embeds in B.
    Decide(Pair),
    /// Build and certify the embedding, or a separating identity when there is none.
    Construct(Pair),
    /// Re-certify a homomorphism from a report or a bare hom document.
    Verify {
        #[command(flatten)]
        pair: Pair,
        /// JSON file holding a hom, or a report with a `hom` or `construction.hom` field.
        #[arg(long)]
        hom: PathBuf,
        /// Number of copies of B in the target.
        #[arg(long)]
        power: Option<usize>,
    },
    /// Check Id(B) ⊆ Id(A) at every multidegree up to --max-len.
    IdentityInclusion(Pair),
    /// Build B^α with its isomorphism, and the round trip back to B.
    Envelope {
        #[command(flatten)]
        pair: Pair,
        /// Cocycle on the whole group: comma-separated bicharacter exponents,
        /// inline JSON, or @file.json.
        #[arg(long)]
        cocycle: String,
    },
    /// Embed a direct sum A into the fewest copies of B.
    SemisimpleEmbed(Pair),
    /// Generate a seeded corpus and check every instance.
    CorpusRun {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        order_bound: usize,
        #[arg(long, default_value_t = 240)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        max_tuple_len: usize,
        /// Multidegree length for the inclusion check on positive instances.
        #[arg(long, default_value_t = 3)]
        inclusion_len: usize,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        max_evals: Option<u64>,
    },
    /// Run the jobs listed in an instance document.
    Run { file: PathBuf },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<InstanceDoc, CliError> {
    doc::parse(&read(path)?)
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// A bare hom document, or the hom inside a construct or semisimple-embed report.
fn hom_from(v: Value) -> Result<HomDoc, CliError> {
    let candidate = if v.get("images").is_some() {
        v
    } else if let Some(h) = v.get("hom") {
        h.clone()
    } else if let Some(h) = v.pointer("/construction/hom") {
        h.clone()
    } else {
        return Err(CliError::validation("hom", "no hom found in the file"));
    };
    serde_json::from_value(candidate).map_err(|e| CliError::validation("hom", e))
}

fn cocycle_arg(s: &str) -> Result<AlphaDoc, CliError> {
    let s = s.trim();
    let json = if let Some(p) = s.strip_prefix('@') {
        Some(read(Path::new(p))?)
    } else if s.starts_with('{') {
        Some(s.to_string())
    } else {
        None
    };
    match json {
        Some(j) => serde_json::from_str(&j).map_err(|e| CliError::validation("cocycle", e)),
        None => {
            let bicharacter = s
                .split(',')
                .filter(|x| !x.is_empty())
                .map(|x| x.trim().parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::validation("cocycle", e))?;
            Ok(AlphaDoc::Bicharacter { bicharacter })
        }
    }
}

fn job(command: Command, p: &Pair, extra: impl FnOnce(&mut JobArgs)) -> Job {
    let mut args = JobArgs { a: p.a.clone(), b: p.b.clone(), max_len: p.max_len, ..Default::default() };
    extra(&mut args);
    Job { command, args, budget: BudgetDoc { max_len: p.max_len, max_evals: p.max_evals } }
}

fn single_job(p: &Pair, j: Job) -> Result<Outcome, CliError> {
    let d = load(&p.file)?;
    commands::run_job(&d, &j)
}

fn dispatch(cmd: &Cmd) -> Result<Outcome, CliError> {
    match cmd {
        Cmd::Decide(p) => single_job(p, job(Command::Decide, p, |_| {})),
        Cmd::Construct(p) => single_job(p, job(Command::Construct, p, |_| {})),
        Cmd::IdentityInclusion(p) => single_job(p, job(Command::IdentityInclusion, p, |_| {})),
        Cmd::SemisimpleEmbed(p) => single_job(p, job(Command::SemisimpleEmbed, p, |_| {})),
        Cmd::Verify { pair, hom, power } => {
            let h = hom_from(read_json(hom)?)?;
            single_job(pair, job(Command::Verify, pair, |a| {
                a.hom = Some(h);
                a.power = *power;
            }))
        }
        Cmd::Envelope { pair, cocycle } => {
            let c = cocycle_arg(cocycle)?;
            single_job(pair, job(Command::Envelope, pair, |a| a.cocycle = Some(c)))
        }
        Cmd::CorpusRun { seed, order_bound, count, max_tuple_len, inclusion_len, workers, max_evals } => {
            let mut budget = BudgetDoc { max_len: None, max_evals: *max_evals }.resolve();
            budget.max_len = budget.max_len.max(*inclusion_len);
            let args = commands::CorpusArgs {
                config: CorpusConfig { seed: *seed, order_bound: *order_bound, count: *count, max_tuple_len: *max_tuple_len },
                inclusion_len: *inclusion_len,
                workers: workers.unwrap_or_else(default_workers),
                budget,
            };
            Ok(commands::corpus_run(&args))
        }
        Cmd::Run { file } => Ok(commands::run_all(&load(file)?)),
    }
}

fn main() {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = dispatch(&cli.command);
    let elapsed = start.elapsed();
    let (mut report, code, summary) = match result {
        Ok(o) => (o.report, o.status.exit_code(), o.summary),
        Err(e) => (serde_json::json!({ "error": e.to_json() }), 1, format!("error [{}]: {e}", e.code())),
    };
    if cli.timings {
        report["timings_ms"] = serde_json::json!({ "total": elapsed.as_secs_f64() * 1000.0 });
    }
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    eprintln!("{summary}");
    eprintln!("elapsed {:.1} ms", elapsed.as_secs_f64() * 1000.0);
    std::process::exit(code);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cocycle_arguments() {
        assert!(matches!(cocycle_arg("1").unwrap(), AlphaDoc::Bicharacter { bicharacter } if bicharacter == [1]));
        assert!(matches!(cocycle_arg("1,0, 2").unwrap(), AlphaDoc::Bicharacter { bicharacter } if bicharacter == [1, 0, 2]));
        assert!(matches!(cocycle_arg(r#"{"bicharacter":[0]}"#).unwrap(), AlphaDoc::Bicharacter { .. }));
        assert!(cocycle_arg("x").is_err());
    }

    #[test]
    fn hom_lookup() {
        let bare = serde_json::json!({"source_dim": 1, "target_dim": 1, "images": [[]]});
        assert_eq!(hom_from(bare.clone()).unwrap().source_dim, 1);
        assert_eq!(hom_from(serde_json::json!({"construction": {"hom": bare.clone()}})).unwrap().target_dim, 1);
        assert_eq!(hom_from(serde_json::json!({"hom": bare})).unwrap().images.len(), 1);
        assert!(hom_from(serde_json::json!({})).is_err());
    }
}
