use std::fs;
use std::process::ExitCode;

use clap::Parser;

use sasaki_cli::{batch, configure_threads, report_json, run, RunConfig, StructureKind, Suite, EXIT_USAGE};

/// Verify model Sasakian structures, immersions and embeddings.
#[derive(Debug, Parser)]
#[command(name = "sasaki", version)]
struct Args {
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    #[arg(long, value_enum)]
    structure: Option<StructureKind>,
    /// Complex transverse dimension.
    #[arg(long = "N", allow_hyphen_values = true)]
    n: Option<i64>,
    /// φ-sectional curvature.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Holomorphic sectional curvature over 4.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// D-homothety ratio, or the translation for heisenberg rigidity.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Tensor power of the line bundle.
    #[arg(long, allow_hyphen_values = true)]
    k: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    cutoff: Option<i64>,
    /// Expected curvature for the curvature suite.
    #[arg(long, allow_hyphen_values = true)]
    expected: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    samples: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<i64>,
    /// Report path; the CSV goes next to it.
    #[arg(long)]
    out: Option<String>,
    /// JSON-lines file with one run per line.
    #[arg(long, value_name = "FILE")]
    batch: Option<String>,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("sasaki: {msg}");
    ExitCode::from(EXIT_USAGE as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Err(e) = configure_threads(std::env::var("SASAKI_THREADS").ok().as_deref()) {
        return usage(e);
    }
    if let Some(file) = &args.batch {
        let text = match fs::read_to_string(file) {
            Ok(t) => t,
            Err(e) => return usage(format!("cannot read {file}: {e}")),
        };
        let summary = match batch(&text) {
            Ok(s) => s,
            Err(e) => return usage(e),
        };
        let json = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
        match &args.out {
            Some(out) => {
                if let Err(e) = fs::write(out, json) {
                    return usage(format!("cannot write {out}: {e}"));
                }
            }
            None => print!("{json}"),
        }
        for r in summary.runs.iter().filter(|r| !r.pass) {
            eprintln!("run {} ({}: {}) failed{}", r.index + 1, r.suite, r.label, r.error.as_deref().map(|e| format!(": {e}")).unwrap_or_default());
        }
        return ExitCode::from(summary.status() as u8);
    }
    let (Some(suite), Some(structure)) = (args.suite, args.structure) else {
        return usage("--suite and --structure are required unless --batch is given");
    };
    let config = RunConfig {
        suite,
        structure,
        n: args.n,
        c: args.c,
        b: args.b,
        a: args.a,
        k: args.k,
        cutoff: args.cutoff,
        expected: args.expected,
        samples: args.samples,
        tol: args.tol,
        seed: args.seed,
        out: args.out,
        defect: None,
    };
    let outcome = match run(&config) {
        Ok(o) => o,
        Err(e) => return usage(e),
    };
    if config.out.is_none() {
        print!("{}", report_json(&outcome.report));
    }
    if let Some(e) = &outcome.error {
        eprintln!("sasaki: {e}");
    } else if !outcome.report.pass {
        eprintln!("sasaki: failing identities: {}", outcome.report.failing().join(", "));
    }
    ExitCode::from(outcome.status() as u8)
}
