//! Command-line front end for prismkit.

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use prismkit::selftest::{self, CriterionResult, SelftestConfig};
use prismkit::Result;
use rayon::prelude::*;
use serde_json::json;

mod commands;
mod report;

use report::Report;

#[derive(Parser)]
#[command(name = "prismkit", version, about = "Exact checks for Hodge-Tate crystals")]
struct Cli {
    /// Emit a machine-readable JSON report.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Admissibility, stratification and cocycle checks for one crystal.
    Check {
        #[arg(long)]
        crystal: String,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Prints the stratification series of a crystal.
    Stratify {
        #[arg(long)]
        crystal: String,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Čech complex checks, H0/H1 and optional preimage roundtrips.
    Cohomology {
        #[arg(long)]
        crystal: String,
        #[arg(long, default_value_t = 3)]
        smax: usize,
        #[arg(long, default_value_t = 8)]
        degree: usize,
        #[arg(long)]
        preimage_s: Option<usize>,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Galois cocycle U(g) and its consistency checks.
    GaloisCocycle {
        #[arg(long)]
        crystal: String,
        #[arg(long, default_value = "tau")]
        g: String,
        #[arg(long, default_value_t = 8)]
        lambda_degree: usize,
        #[arg(long, allow_hyphen_values = true)]
        chi: Option<i64>,
    },
    /// q-derivative identities over a ring.
    QcalcVerify {
        #[arg(long)]
        ring: String,
        #[arg(long, default_value_t = 4)]
        h_max: usize,
        #[arg(long, default_value_t = 24)]
        u_cap: usize,
        #[arg(long, default_value_t = 12)]
        m_cap: usize,
        #[arg(long, default_value_t = 3)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Weighted nilpotency of a crystal matrix.
    WeightsCheck {
        #[arg(long)]
        crystal: String,
        /// Comma-separated nondecreasing weights, e.g. 0,1,3.
        #[arg(long)]
        weights: String,
        #[arg(long)]
        target: Option<u32>,
    },
    /// Nilpotency of the weighted product over F_p[m1].
    FlCheck {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        weights: String,
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value_t = 12)]
        m_cap: usize,
    },
    /// Runs the acceptance criteria.
    Selftest {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Comma-separated criterion ids; all by default.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

fn run_selftest(rep: &mut Report, seed: u64, only: &[usize]) -> Result<()> {
    let cfg = SelftestConfig { seed, ..SelftestConfig::default() };
    let ids: Vec<usize> = selftest::CRITERIA
        .iter()
        .map(|c| c.0)
        .filter(|id| only.is_empty() || only.contains(id))
        .collect();
    let threads = std::env::var("PRISMKIT_THREADS").ok().and_then(|s| s.parse().ok()).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| prismkit::Error::InvalidSpec(format!("thread pool: {e}")))?;
    let mut results: Vec<CriterionResult> =
        pool.install(|| ids.par_iter().filter_map(|&id| selftest::run_criterion(id, &cfg)).collect());
    results.sort_by_key(|r| r.id);
    for r in &results {
        let name = format!("{} {}", r.id, r.name);
        if r.passed {
            rep.pass(&name, r.detail.clone());
        } else {
            rep.fail(&name, r.detail.clone());
        }
    }
    // timings are left out so that reports from equal seeds are identical
    rep.result = json!({
        "config": cfg,
        "criteria": results.iter().map(|r| json!({"id": r.id, "name": r.name, "passed": r.passed})).collect::<Vec<_>>(),
    });
    Ok(())
}

fn dispatch(rep: &mut Report, cmd: &Command) -> Result<()> {
    match cmd {
        Command::Check { crystal, degree } => commands::check(rep, crystal, *degree),
        Command::Stratify { crystal, degree } => commands::stratify(rep, crystal, *degree),
        Command::Cohomology { crystal, smax, degree, preimage_s, samples, seed } => commands::cohomology(
            rep,
            &commands::CohomologyArgs {
                crystal,
                smax: *smax,
                degree: *degree,
                preimage_s: *preimage_s,
                samples: *samples,
                seed: *seed,
            },
        ),
        Command::GaloisCocycle { crystal, g, lambda_degree, chi } => {
            commands::galois_cocycle(rep, crystal, g, *lambda_degree, *chi)
        }
        Command::QcalcVerify { ring, h_max, u_cap, m_cap, samples, seed } => commands::qcalc_verify(
            rep,
            &commands::QcalcArgs { ring, h_max: *h_max, u_cap: *u_cap, m_cap: *m_cap, samples: *samples, seed: *seed },
        ),
        Command::WeightsCheck { crystal, weights, target } => commands::weights_check(rep, crystal, weights, *target),
        Command::FlCheck { p, weights, matrix, m_cap } => commands::fl_check(rep, *p, weights, matrix, *m_cap),
        Command::Selftest { seed, only } => run_selftest(rep, *seed, only),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let mut rep = Report::new(argv);
    let outcome = dispatch(&mut rep, &cli.command);
    let (rep, exit) = rep.finish(outcome);
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&rep).expect("report serializes"));
    } else {
        print!("{}", rep.render_text());
    }
    if let (false, Some(e)) = (cli.json, &rep.error) {
        eprintln!("prismkit: {e}");
    }
    ExitCode::from(exit as u8)
}
