use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use semiforge_core::extension::{Grouping, InverseConvention, PseudoPoly, Scaling};
use semiforge_core::format::{ReportRecord, TableFormat};
use semiforge_core::pipeline::{self, BuildOptions, FunctionKind, PipelineError, SearchConfig};
use semiforge_core::semifield::InverseSide;

/// Build and score S-Boxes over pseudo-extensions of order-16 semifields.
#[derive(Parser, Debug)]
#[command(name = "semiforge", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate every semifield matrix tuple of a dimension.
    Enumerate {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        out: PathBuf,
        /// Largest determinant table the run may build.
        #[arg(long, default_value_t = pipeline::DEFAULT_DET_TABLE_MAX)]
        det_table_max: usize,
    },
    /// List the pseudo-irreducible quadratics of one semifield, or summary
    /// statistics over the whole file when --id is omitted.
    Polys {
        #[arg(long)]
        semifields: PathBuf,
        #[arg(long)]
        id: Option<u64>,
    },
    /// Build one function and write it as a hex grid plus a JSON document.
    Build {
        #[arg(long)]
        semifields: PathBuf,
        #[arg(long)]
        id: u64,
        #[arg(long, value_parser = parse_nibble)]
        alpha: u8,
        #[arg(long, value_parser = parse_nibble)]
        beta: u8,
        #[arg(long)]
        kind: FunctionKind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "right")]
        inverse_side: InverseSide,
        #[arg(long, default_value = "chained")]
        scaling: Scaling,
        #[arg(long, default_value = "printed")]
        grouping: Grouping,
        /// Byte XORed onto every output, in hex.
        #[arg(long, value_parser = parse_hex_byte)]
        whiten: Option<u8>,
    },
    /// Score a table from a file or a builtin (aes, camellia, paper-19203,
    /// paper-apn).
    Evaluate {
        #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
        sbox: Option<PathBuf>,
        #[arg(long)]
        builtin: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Run a configured search and write ranked results and a ledger.
    Search {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        resume: bool,
    },
    /// Convert a table or a results file to another format.
    Export {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        format: TableFormat,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_hex_byte(s: &str) -> Result<u8, String> {
    let t = s.strip_prefix("0x").unwrap_or(s);
    u8::from_str_radix(t, 16).map_err(|_| format!("{s:?} is not a hex byte"))
}

fn parse_nibble(s: &str) -> Result<u8, String> {
    let v = match s.strip_prefix("0x") {
        Some(h) => u8::from_str_radix(h, 16),
        None => s.parse(),
    }
    .map_err(|_| format!("{s:?} is not a number"))?;
    if v > 15 {
        return Err(format!("{v} is not a semifield element (0..=15)"));
    }
    Ok(v)
}

/// Outcome of a command that finished but found a broken construction.
#[derive(Debug)]
struct InvariantViolation(String);

impl std::fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InvariantViolation {}

fn print_report(rec: &ReportRecord) {
    let r = &rec.report;
    if let Some(name) = &rec.provenance.name {
        println!("name                  {name}");
    }
    println!("delta                 {}", r.delta);
    println!("lambda                {}", r.lambda);
    println!("algebraic degree      {}", r.alg_degree);
    println!("polynomial degree     {}", r.poly_degree);
    println!("fixed points          {}", r.fixed_points);
    println!("reverse fixed points  {}", r.reverse_fixed_points);
    println!("avalanche             {}", r.avalanche);
    println!("bit independence      {}", r.bit_independence);
    println!("transparency          {:.5}", r.transparency);
    println!("bijective             {}", r.bijective);
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Enumerate {
            dim,
            out,
            det_table_max,
        } => {
            let summary = pipeline::cmd_enumerate(dim, &out, det_table_max)?;
            println!(
                "{} semifields of dimension {} written to {} ({:.2}s)",
                summary.semifields,
                dim,
                out.display(),
                summary.wall_time_secs
            );
        }
        Command::Polys { semifields, id } => {
            let sfs = pipeline::read_semifields(&semifields)?;
            match id {
                Some(id) => {
                    let listing = pipeline::cmd_polys(&sfs, id)?;
                    for p in &listing.polys {
                        println!("{:2} {:2}  {p}", p.alpha, p.beta);
                    }
                    println!("count {}", listing.count);
                }
                None => {
                    let stats = pipeline::poly_stats(&sfs)?;
                    println!("{}", serde_json::to_string_pretty(&stats)?);
                }
            }
        }
        Command::Build {
            semifields,
            id,
            alpha,
            beta,
            kind,
            out,
            inverse_side,
            scaling,
            grouping,
            whiten,
        } => {
            let sfs = pipeline::read_semifields(&semifields)?;
            let opts = BuildOptions {
                kind,
                convention: InverseConvention::new(inverse_side, scaling),
                grouping,
                whiten,
            };
            let (f, _) = pipeline::cmd_build(&sfs, id, PseudoPoly::new(alpha, beta), &opts, &out)?;
            println!(
                "wrote {} and {} (bijective: {})",
                out.display(),
                pipeline::sidecar(&out).display(),
                f.is_bijective()
            );
        }
        Command::Evaluate {
            sbox,
            builtin,
            json,
        } => {
            let (f, prov) = match (sbox, builtin) {
                (Some(path), _) => pipeline::load_table(&path)?,
                (None, Some(name)) => pipeline::load_builtin(&name)?,
                (None, None) => unreachable!("clap requires one source"),
            };
            let rec = pipeline::cmd_evaluate(&f, prov)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&rec)?);
            } else {
                print_report(&rec);
            }
        }
        Command::Search {
            config,
            out,
            jobs,
            resume,
        } => {
            let mut cfg = SearchConfig::load(&config)?;
            if jobs.is_some() {
                cfg.jobs = jobs;
            }
            let outcome = pipeline::cmd_search(&cfg, &out, resume)?;
            let ledger = &outcome.ledger;
            println!("{}", serde_json::to_string_pretty(ledger)?);
            if ledger.bijectivity_violations > 0 {
                return Err(InvariantViolation(format!(
                    "{} builds were not bijective; results written to {}",
                    ledger.bijectivity_violations,
                    out.display()
                ))
                .into());
            }
        }
        Command::Export {
            input,
            format,
            out,
        } => {
            let text = pipeline::cmd_export(&input, format)?;
            match out {
                Some(path) => std::fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<InvariantViolation>().is_some() {
        return 3;
    }
    match err.downcast_ref::<PipelineError>() {
        Some(e) if e.is_invariant_violation() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
