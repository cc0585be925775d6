//! `nsma` — seeded verification campaigns and scenario runs for the
//! nonsymmetric Monge-Ampère matrix toolkit.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage / config /
//! scenario error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nsma_core::campaign::{run_dconcavity, run_verify, CampaignConfig, CheckKind, VerifyReport};
use nsma_core::comparison::{
    comparison_verdict_with, ClaimsConfig, Conclusion, Grid, Scenario, StauLattice, Verdict,
    DEFAULT_BOUNDARY_NODES,
};
use nsma_core::cone::{cone_report, log_det, membership, ConeParams, DecomposedR};

#[derive(Parser)]
#[command(
    name = "nsma",
    version,
    about = "Matrix analysis for nonsymmetric Monge-Ampère operators: cone membership, \
             log-det bounds, concavity defects, and comparison-principle scenarios"
)]
struct Cli {
    /// Worker threads for campaign and grid evaluation (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the seeded verification campaign (cone, forms, compound checks).
    Verify(CampaignArgs),
    /// Tabulate worst-case concavity defects per (n, delta) configuration.
    Dconcavity(CampaignArgs),
    /// Verify a comparison-principle scenario on a grid.
    Compare(CompareArgs),
    /// Ad-hoc checks on a single matrix given as JSON {"omega": ..., "beta": ...}.
    Check(CheckArgs),
}

#[derive(Args)]
struct CampaignArgs {
    /// Campaign config JSON; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Report path (JSON for verify, CSV for dconcavity).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the inequality slack tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct CompareArgs {
    /// Scenario JSON file.
    #[arg(long, conflicts_with = "builtin")]
    scenario: Option<PathBuf>,
    /// Name of a bundled scenario: "disk" or "disk-identical".
    #[arg(long)]
    builtin: Option<String>,
    /// Grid spacing.
    #[arg(long, default_value_t = 0.05)]
    grid_spacing: f64,
    /// Boundary nodes (angular resolution on disks).
    #[arg(long, default_value_t = DEFAULT_BOUNDARY_NODES)]
    boundary_nodes: usize,
    /// Points per axis of the (s, tau) lattice.
    #[arg(long, default_value_t = 5)]
    stau: usize,
    /// Random unit directions per node for the ellipticity sandwich.
    #[arg(long, default_value_t = 1000)]
    xi: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Verdict report path (JSON).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the inequality slack tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
}

#[derive(Args)]
struct CheckArgs {
    /// JSON file with row-major {"omega": [[...]], "beta": [[...]]}.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    /// Override the inequality slack tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: could not configure {jobs} worker threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let outcome = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Dconcavity(args) => cmd_dconcavity(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Check(args) => cmd_check(args),
    };
    match outcome {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn load_campaign_config(args: &CampaignArgs) -> Result<CampaignConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            serde_json::from_str::<CampaignConfig>(&text)
                .map_err(|e| format!("config {}: {e}", path.display()))?
        }
        None => CampaignConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(tol) = args.tolerance {
        cfg.slack = tol;
    }
    cfg.expand().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn cmd_verify(args: CampaignArgs) -> Result<ExitCode, String> {
    let cfg = load_campaign_config(&args)?;
    let report = run_verify(&cfg).map_err(|e| e.to_string())?;
    print_verify_summary(&report);
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from("nsma-verify.json"));
    write_file(
        &out,
        &serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    println!("report written to {}", out.display());
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    })
}

fn print_verify_summary(report: &VerifyReport) {
    println!(
        "verification campaign: seed {}, {} trials per configuration",
        report.seed, report.trials
    );
    for config in &report.configs {
        println!(
            "\n  n = {}, delta = {}, mu = {}",
            config.n, config.delta, config.mu
        );
        println!(
            "    {:<22} {:>9} {:>14} {:>14} {:>6}",
            "check", "trials", "worst", "threshold", "fails"
        );
        for check in &config.checks {
            let threshold = match check.kind {
                CheckKind::Margin => -check.threshold,
                CheckKind::Residual => check.threshold,
            };
            println!(
                "    {:<22} {:>9} {:>14.3e} {:>14.3e} {:>6}",
                check.name, check.trials, check.worst, threshold, check.failures
            );
        }
    }
    println!(
        "\ntotal failures: {}  wall clock: {:.2}s",
        report.total_failures, report.wall_clock_seconds
    );
}

fn cmd_dconcavity(args: CampaignArgs) -> Result<ExitCode, String> {
    let cfg = load_campaign_config(&args)?;
    let report = run_dconcavity(&cfg).map_err(|e| e.to_string())?;
    println!(
        "concavity-defect campaign: seed {}, {} pairs per configuration",
        report.seed, cfg.trials
    );
    println!(
        "  {:>3} {:>6} {:>6} {:>8} {:>14} {:>14} {:>14} {:>6}",
        "n", "delta", "mu", "trials", "max_gap", "d_bound", "margin", "fails"
    );
    for row in &report.rows {
        println!(
            "  {:>3} {:>6} {:>6} {:>8} {:>14.6e} {:>14.6e} {:>14.6e} {:>6}",
            row.n, row.delta, row.mu, row.trials, row.max_gap, row.d_bound, row.margin,
            row.failures
        );
    }
    println!(
        "total failures: {}  wall clock: {:.2}s",
        report.total_failures, report.wall_clock_seconds
    );
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from("nsma-dconcavity.csv"));
    write_file(&out, &report.to_csv())?;
    println!("gap table written to {}", out.display());
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    })
}

fn load_scenario(args: &CompareArgs) -> Result<Scenario, String> {
    match (&args.scenario, args.builtin.as_deref()) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            Scenario::from_json(&text).map_err(|e| e.to_string())
        }
        (None, Some("disk")) => Ok(Scenario::bundled_disk()),
        (None, Some("disk-identical")) => Ok(Scenario::bundled_disk_identical()),
        (None, Some(other)) => Err(format!(
            "unknown builtin scenario '{other}' (expected 'disk' or 'disk-identical')"
        )),
        (None, None) => Err("either --scenario PATH or --builtin NAME is required".into()),
        (Some(_), Some(_)) => unreachable!("clap rejects conflicting flags"),
    }
}

fn cmd_compare(args: CompareArgs) -> Result<ExitCode, String> {
    let scenario = load_scenario(&args)?;
    let grid = Grid::build(&scenario.domain, args.grid_spacing, args.boundary_nodes)
        .map_err(|e| e.to_string())?;
    let claims_cfg = ClaimsConfig {
        lattice: StauLattice::uniform(args.stau, args.stau),
        xi_samples: args.xi,
        seed: args.seed.unwrap_or(0x5eed),
    };
    let verdict = comparison_verdict_with(&scenario, &grid, &claims_cfg)
        .map_err(|e| e.to_string())?;
    print_verdict(&verdict, &grid);

    if let Some(out) = &args.out {
        let report = serde_json::json!({
            "schema": 1,
            "grid": {
                "interior_nodes": grid.interior.len(),
                "boundary_nodes": grid.boundary.len(),
                "spacing": grid.spacing,
            },
            "verdict": verdict,
        });
        write_file(out, &serde_json::to_string_pretty(&report).expect("verdict serializes"))?;
        println!("verdict report written to {}", out.display());
    }

    let claims_ok = verdict
        .claims
        .as_ref()
        .is_some_and(|c| c.all_pass(args.tolerance));
    let ok = verdict.conclusion != Conclusion::Violated && claims_ok;
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    })
}

fn print_verdict(verdict: &Verdict, grid: &Grid) {
    println!(
        "grid: {} interior nodes, {} boundary nodes (spacing {})",
        grid.interior.len(),
        grid.boundary.len(),
        grid.spacing
    );

    println!("\nhypotheses:");
    println!(
        "  {:<55} {:>13} {:>13} {:>10} {:>5}",
        "condition", "lhs", "rhs", "margin", "pass"
    );
    for cond in &verdict.hypotheses.conditions {
        println!(
            "  {:<55} {:>13.6e} {:>13.6e} {:>10.3e} {:>5}{}",
            cond.name,
            cond.lhs,
            cond.rhs,
            cond.margin,
            if cond.pass { "yes" } else { "NO" },
            if cond.estimated { "  (estimated)" } else { "" }
        );
    }

    match (&verdict.preconditions.min_g_gap, verdict.preconditions.g_ordered) {
        (Some(gap), ordered) => println!(
            "\noperator ordering: min (G[v] - G[u]) = {:.6e} ({})",
            gap,
            if ordered { "ordered" } else { "NOT ordered" }
        ),
        (None, _) => println!("\noperator ordering: not evaluable (omega not positive definite)"),
    }
    println!(
        "boundary ordering: min (u - v) on boundary = {:.6e} ({})",
        verdict.preconditions.min_boundary_gap,
        if verdict.preconditions.boundary_ordered {
            "ordered"
        } else {
            "NOT ordered"
        }
    );

    if let Some(claims) = &verdict.claims {
        println!("\nlinearized operator:");
        println!(
            "  eigenvalue bounds of omega fields: [{:.6e}, {:.6e}]",
            claims.lambda0, claims.big_lambda0
        );
        println!(
            "  ellipticity constants: lambda = {:.6e}, Lambda = {:.6e}",
            claims.lambda, claims.big_lambda
        );
        println!(
            "  sup |b| = {:.6e}, sup |c| = {:.6e}, max c = {:.6e}",
            claims.sup_b, claims.sup_c, claims.c_max
        );
        println!(
            "  {:<55} {:>13} {:>13} {:>10}",
            "claim", "lhs", "rhs", "margin"
        );
        for margin in claims.margins() {
            println!(
                "  {:<55} {:>13.6e} {:>13.6e} {:>10.3e}",
                margin.label, margin.lhs, margin.rhs, margin.margin
            );
        }
    }

    println!(
        "\nmin interior (u - v) = {:.6e}, max |u - v| = {:.6e}",
        verdict.min_interior_margin, verdict.max_abs_diff
    );
    if let Some(normal) = verdict.boundary_normal_margin {
        println!("boundary inner-normal margin d(u - v)/dnu: {normal:.9e}");
    }
    let verdict_name = match verdict.conclusion {
        Conclusion::UGtV => "u_gt_v",
        Conclusion::UIdenticalV => "u_identical_v",
        Conclusion::Violated => "violated",
    };
    println!("verdict: {verdict_name}");
}

fn cmd_check(args: CheckArgs) -> Result<ExitCode, String> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| format!("cannot read {}: {e}", args.input.display()))?;
    let r: DecomposedR =
        serde_json::from_str(&text).map_err(|e| format!("input {}: {e}", args.input.display()))?;
    let params = ConeParams::new(args.delta, args.mu).map_err(|e| e.to_string())?;

    let ms = membership(&r, &params);
    println!(
        "membership: {} (lambda_min = {:.6e}, cone margin = {:.6e}, beta margin = {:.6e})",
        if ms.member { "member" } else { "NOT a member" },
        ms.lambda_min,
        ms.cone_margin,
        ms.beta_margin
    );
    if !ms.member {
        return Ok(ExitCode::from(EXIT_CHECK_FAILED));
    }

    let f = log_det(&r).map_err(|e| e.to_string())?;
    println!("log det R = {f:.12e}");

    let report = cone_report(&r, &params).map_err(|e| e.to_string())?;
    println!(
        "  {:<70} {:>13} {:>13} {:>10}",
        "bound", "lhs", "rhs", "margin"
    );
    for margin in report.margins() {
        println!(
            "  {:<70} {:>13.6e} {:>13.6e} {:>10.3e}",
            margin.label, margin.lhs, margin.rhs, margin.margin
        );
    }
    Ok(if report.all_hold(args.tolerance) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    })
}
