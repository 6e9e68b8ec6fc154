use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use xdelta::remote::RemoteClient;
use xdelta::xdelta_core::classify::{Report, Status, Verdict};
use xdelta::xdelta_core::dataset::{CuratedFacts, CurveDataset};
use xdelta::xdelta_core::degpairing::gram_matrix;
use xdelta::xdelta_core::ellcurve::{an, ap_list};
use xdelta::xdelta_core::modcurve::{signature, signature_gamma0, CurveSignature};
use xdelta::xdelta_core::qform::{parse_gram, represented_values};
use xdelta::xdelta_core::units::{parse_delta_spec, subgroups_containing_minus_one};
use xdelta::{dataset, facts};

/// Intermediate modular curves X_Δ(N) and their quartic points.
#[derive(Parser)]
#[command(name = "xdq", version)]
struct Cli {
    /// Curve dataset CSV (default: $XDQ_DATA, else the bundled file).
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    /// Curated facts TOML (default: the bundled file).
    #[arg(long, global = true)]
    facts: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print `N,delta_size,index,nu2,nu3,cusps,genus` for Δ, or for every Δ ∋ −1.
    Signature {
        n: u64,
        /// Generators, e.g. `4` or `±1,±8` (−1 is adjoined).
        delta: Option<String>,
        /// Use Γ_0(N) itself.
        #[arg(long, conflicts_with = "delta")]
        gamma0: bool,
    },
    /// Traces of Frobenius a_p for p up to a bound.
    Ap {
        label: String,
        #[arg(long, default_value_t = 50)]
        bound: u64,
    },
    /// Newform coefficient a_n.
    An { label: String, n: u64 },
    /// Degree-pairing Gram matrix of maps X_0(N) → E.
    Gram { n: u64, label: String },
    /// Values of a positive definite form up to a bound.
    Qform {
        /// Rows separated by `;`, entries by `,`.
        #[arg(long)]
        gram: String,
        #[arg(long, default_value_t = 20)]
        bound: i64,
    },
    /// Classify one pair or every candidate, as JSON.
    Classify {
        /// `N:<delta>`, e.g. `53:4`.
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        pair: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Compare the classification with the expected table.
    Table {
        /// Exit nonzero on any mismatch.
        #[arg(long)]
        check: bool,
    },
    /// Fetch one record from $XDQ_LMFDB_URL (or the cache when offline).
    Fetch { label: String },
}

fn load_data(cli: &Cli) -> Result<CurveDataset> {
    Ok(match &cli.data {
        Some(p) => dataset::load_dataset(p)?,
        None => xdelta::dataset_from_env()?,
    })
}

fn load_facts(cli: &Cli) -> Result<CuratedFacts> {
    Ok(match &cli.facts {
        Some(p) => facts::load_facts(p)?,
        None => xdelta::bundled_facts()?,
    })
}

fn signature_line(s: &CurveSignature) -> String {
    let index = s.delta.index_in_units();
    format!(
        "{},{},{},{},{},{},{}",
        s.n,
        s.delta.len(),
        index,
        s.nu2,
        s.nu3,
        s.nu_inf,
        s.genus
    )
}

#[derive(Serialize)]
struct RuleJson {
    tag: &'static str,
    detail: String,
}

#[derive(Serialize)]
struct VerdictJson {
    n: u64,
    delta: String,
    delta_size: usize,
    genus: u64,
    status: String,
    rules: Vec<RuleJson>,
    blocking_reason: Option<String>,
}

impl From<&Verdict> for VerdictJson {
    fn from(v: &Verdict) -> Self {
        VerdictJson {
            n: v.n,
            delta: v.delta.plus_minus_string(),
            delta_size: v.delta.len(),
            genus: v.genus,
            status: v.status.to_string(),
            rules: v
                .rules
                .iter()
                .map(|r| RuleJson {
                    tag: r.tag(),
                    detail: r.to_string(),
                })
                .collect(),
            blocking_reason: v.blocking_reason().map(|r| r.to_string()),
        }
    }
}

fn print_report(verdicts: &[Verdict], report: &Report) {
    println!("| N | Δ | genus | status | rules |");
    println!("|---|---|---|---|---|");
    for v in verdicts.iter().filter(|v| v.status != Status::Finite) {
        let rules: Vec<&str> = v.rules.iter().map(|r| r.tag()).collect();
        println!(
            "| {} | {} | {} | {} | {} |",
            v.n,
            v.delta,
            v.genus,
            v.status,
            rules.join(", ")
        );
    }
    let finite = verdicts
        .iter()
        .filter(|v| v.status == Status::Finite)
        .count();
    println!();
    println!("candidates: {}, finite: {finite}", verdicts.len());
    println!("matches: {}", report.matches.len());
    let list = |name: &str, items: Vec<String>| {
        println!("{name}: {}", items.len());
        for i in items {
            println!("- {i}");
        }
    };
    list(
        "missing",
        report
            .missing
            .iter()
            .map(|(n, d)| format!("{n} {d}"))
            .collect(),
    );
    list(
        "spurious",
        report
            .spurious
            .iter()
            .map(|(n, d)| format!("{n} {d}"))
            .collect(),
    );
    list(
        "unknown",
        report
            .unknown
            .iter()
            .map(|(n, d, why)| format!("{n} {d}: {why}"))
            .collect(),
    );
    list(
        "unmatched rows",
        report
            .unmatched_rows
            .iter()
            .map(|(n, d)| format!("{n} {d}"))
            .collect(),
    );
    list(
        "genus mismatches",
        report
            .genus_mismatches
            .iter()
            .map(|(n, d, want, got)| format!("{n} {d}: expected {want}, computed {got}"))
            .collect(),
    );
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.cmd {
        Cmd::Signature { n, delta, gamma0 } => {
            println!("N,delta_size,index,nu2,nu3,cusps,genus");
            if *gamma0 {
                println!("{}", signature_line(&signature_gamma0(*n)?));
            } else if let Some(spec) = delta {
                let d = parse_delta_spec(*n, spec, true)?;
                println!("{}", signature_line(&signature(*n, &d)?));
            } else {
                for d in subgroups_containing_minus_one(*n)? {
                    println!("{}", signature_line(&signature(*n, &d)?));
                }
            }
        }
        Cmd::Ap { label, bound } => {
            let ds = load_data(cli)?;
            for (p, a) in ap_list(ds.get(label)?, *bound)? {
                println!("{p},{a}");
            }
        }
        Cmd::An { label, n } => {
            let ds = load_data(cli)?;
            println!("{}", an(ds.get(label)?, *n)?);
        }
        Cmd::Gram { n, label } => {
            let ds = load_data(cli)?;
            let form = gram_matrix(ds.get(label)?, *n)?.sign_normalized();
            print!("{form}");
            println!("{}", form.polynomial_string());
        }
        Cmd::Qform { gram, bound } => {
            let g = parse_gram(gram)?;
            for (v, w) in represented_values(&g, *bound)?.witnesses {
                let w: Vec<String> = w.iter().map(i64::to_string).collect();
                println!("{v}: ({})", w.join(","));
            }
        }
        Cmd::Classify { pair, all } => {
            let ds = load_data(cli)?;
            let facts = load_facts(cli)?;
            if *all {
                let out: Vec<VerdictJson> = xdelta::classify_all(&ds, &facts)?
                    .iter()
                    .map(VerdictJson::from)
                    .collect();
                println!("{}", serde_json::to_string_pretty(&out)?);
            } else {
                let pair = pair.as_deref().expect("clap requires --pair without --all");
                let (n, spec) = pair.split_once(':').context("expected N:<delta>")?;
                let n: u64 = n.trim().parse().context("bad level")?;
                let d = parse_delta_spec(n, spec, true)?;
                let v = xdelta::xdelta_core::classify::verdict(&d, &ds, &facts)?;
                println!("{}", serde_json::to_string_pretty(&VerdictJson::from(&v))?);
            }
        }
        Cmd::Table { check } => {
            let ds = load_data(cli)?;
            let facts = load_facts(cli)?;
            let start = Instant::now();
            let (verdicts, report) = xdelta::reproduce_main_table(&ds, &facts)?;
            print_report(&verdicts, &report);
            println!("elapsed: {:.2?}", start.elapsed());
            if *check && !report.is_ok() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Fetch { label } => {
            let client = RemoteClient::from_env();
            if client.config().base_url.is_none() && client.config().cache_dir.is_none() {
                bail!("set XDQ_LMFDB_URL or XDQ_CACHE_DIR");
            }
            let rec = client.fetch(label)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&dataset::Row::from_record(&rec))?
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
