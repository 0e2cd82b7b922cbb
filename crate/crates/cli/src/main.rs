//! Batch front end for rank-calibrated review scoring.
//!
//! Six commands cover the whole pipeline: `generate` draws a synthetic
//! conference, `adjust` calibrates raw scores toward author rankings,
//! `select` runs an award protocol on the adjusted scores, `sweep` measures
//! protocols across a noise/quota grid, `verify` spot-checks the incentive
//! guarantees by Monte Carlo, and `audit` fits an outcome-probability curve
//! to historical review data.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 runtime
//! error, 4 degenerate fit. Every output file gets a `<name>.meta.json`
//! sidecar recording the tool version, the seed, and a hash of the resolved
//! configuration, so results can be traced back to their inputs.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use isomech::audit::{
    bucket_probabilities, convexity_report, fit_logistic, nonuniform_preset_edges,
    normalize_scores, uniform_edges, ConvexityReport, OutcomeTier,
};
use isomech::io::{self, NetworkIds};
use isomech::mechanism::{adjusted_scores, fraction_modified, greedy_partition};
use isomech::network::AuthorRankings;
use isomech::selection::{select, Protocol, ProtocolSpec};
use isomech::simlab::{
    run_sweep, verify_individual_rationality, verify_majorization_step, verify_truthfulness,
};
use isomech::synthesis::gen_conference;
use isomech::utility::{AuthorUtility, BlindUtility, ScalarUtility, UtilityKind};
use isomech::{Error, Result, ScoreVector};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use config::RunConfig;

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "ISOMECH_OUT_DIR";

/// Common score scale that audit inputs are normalized onto.
const NORMALIZED_SCALE: (f64, f64) = (0.0, 9.0);

const DEFAULT_VERIFY_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "isomech",
    version,
    about = "Rank-calibrated review scoring: generate, adjust, select, sweep, verify, audit"
)]
struct Cli {
    /// Directory for output files (default: $ISOMECH_OUT_DIR, else ".").
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    /// Master seed; overrides `master_seed` from the config file.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,

    /// Worker threads for the sweep runner (0 = one per core). Results are
    /// identical for every value.
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a synthetic conference and write its CSV files.
    Generate(GenerateArgs),
    /// Calibrate raw scores toward the authors' reported rankings.
    Adjust(AdjustArgs),
    /// Run an award protocol over previously adjusted scores.
    Select(SelectArgs),
    /// Measure protocols across a noise/quota grid of simulated conferences.
    Sweep(SweepArgs),
    /// Monte-Carlo checks of the incentive guarantees.
    Verify(VerifyArgs),
    /// Fit an outcome-probability curve to historical review records.
    Audit(AuditArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// TOML config with [network], [quality], and [noise] sections.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
}

#[derive(Args)]
struct AdjustArgs {
    /// Authorship edges (`paper_id,author_id`).
    #[arg(long, value_name = "FILE")]
    network: PathBuf,
    /// Reported rankings (`author_id,paper_id,rank`), rank 1 = best.
    #[arg(long, value_name = "FILE")]
    rankings: PathBuf,
    /// Raw review scores (`paper_id,score`).
    #[arg(long, value_name = "FILE")]
    scores: PathBuf,
}

#[derive(Args)]
struct SelectArgs {
    /// Authorship edges (`paper_id,author_id`).
    #[arg(long, value_name = "FILE")]
    network: PathBuf,
    /// Reported rankings; optional for the benchmark protocol, which
    /// ignores them.
    #[arg(long, value_name = "FILE")]
    rankings: Option<PathBuf>,
    /// Output of `adjust` (`paper_id,raw,adjusted,modified`).
    #[arg(long, value_name = "FILE")]
    adjusted: PathBuf,
    /// Optional TOML config; its [protocol] section supplies defaults for
    /// the three flags below.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// benchmark | blind | informed_max | informed_min
    #[arg(long)]
    protocol: Option<String>,
    /// Nominations per author.
    #[arg(long)]
    quota: Option<usize>,
    /// Number of winners to pick.
    #[arg(long)]
    winners: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML config with [network], [quality], and [sweep] sections.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which guarantee to check.
    #[arg(long, value_parser = ["truthfulness", "majorization", "ir"])]
    theorem: String,
    /// Monte-Carlo sample count.
    #[arg(long)]
    trials: Option<usize>,
    /// Papers per author (truthfulness only; capped at 6).
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Nominations per author (truthfulness only).
    #[arg(long, default_value_t = 1)]
    quota: usize,
    /// Review noise variance (truthfulness only).
    #[arg(long, default_value_t = 1.0)]
    noise_variance: f64,
    /// Scalar utility: linear[:slope[:intercept]], exp[:rate],
    /// softplus[:power], sigmoid[:center[:steepness]].
    #[arg(long, default_value = "exp")]
    utility: String,
}

#[derive(Args)]
struct AuditArgs {
    /// Review records (`paper_id,score,outcome,year,scale_lo,scale_hi`).
    #[arg(long, value_name = "FILE")]
    records: PathBuf,
    /// Optional TOML config; its [audit] section supplies defaults for the
    /// three flags below.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Outcome tier counted as success: rejected | accepted | spotlight |
    /// oral | best.
    #[arg(long)]
    outcome: Option<String>,
    /// Ridge penalty on the slope.
    #[arg(long)]
    lambda: Option<f64>,
    /// Bucket layout: uniform[:width] or preset (coarse below 5, fine
    /// above 7).
    #[arg(long)]
    buckets: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        // Ignore "already initialized": tests may run several commands in
        // one process, and the pool size never affects results anyway.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global();
    }
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));

    match dispatch(&cli, &out_dir) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn dispatch(cli: &Cli, out_dir: &Path) -> Result<u8> {
    fs::create_dir_all(out_dir)?;
    match &cli.command {
        Command::Generate(args) => cmd_generate(args, cli.seed, out_dir),
        Command::Adjust(args) => cmd_adjust(args, out_dir),
        Command::Select(args) => cmd_select(args, out_dir),
        Command::Sweep(args) => cmd_sweep(args, cli.seed, out_dir),
        Command::Verify(args) => cmd_verify(args, cli.seed, out_dir),
        Command::Audit(args) => cmd_audit(args, out_dir),
    }
}

/// Map failures onto the documented exit codes: input problems are 2,
/// environment problems are 3, and an unidentifiable fit is 4.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DegenerateFit(_) => 4,
        Error::Io(_) => 3,
        _ => 2,
    }
}

// ---------------------------------------------------------------- generate

fn cmd_generate(args: &GenerateArgs, seed_flag: Option<u64>, out_dir: &Path) -> Result<u8> {
    let cfg = RunConfig::load(&args.config)?;
    let network_model = cfg.network()?;
    let quality_model = cfg.quality()?;
    let noise = cfg.noise()?;
    let seed = seed_flag.or(cfg.master_seed).unwrap_or(0);

    let conference = gen_conference(&network_model, &quality_model, &noise, seed)?;
    let ids = NetworkIds::sequential(
        conference.network.num_papers(),
        conference.network.num_authors(),
    );

    let resolved = json!({
        "command": "generate",
        "network": network_model,
        "quality": quality_model,
        "noise": noise,
        "seed": seed,
    });
    let meta = Meta::new("generate", Some(seed), &resolved);

    let network_path = out_dir.join("network.csv");
    io::write_network_csv(&network_path, &conference.network, &ids)?;
    meta.write_for(&network_path)?;

    let rankings_path = out_dir.join("rankings.csv");
    io::write_rankings_csv(&rankings_path, &conference.rankings, &ids)?;
    meta.write_for(&rankings_path)?;

    let scores_path = out_dir.join("scores.csv");
    io::write_scores_csv(&scores_path, &conference.reviews, &ids)?;
    meta.write_for(&scores_path)?;

    let truth_path = out_dir.join("truth.csv");
    io::write_truth_csv(&truth_path, &conference.quality, &conference.reviews, &ids)?;
    meta.write_for(&truth_path)?;

    println!(
        "generated {} papers by {} authors (seed {seed})",
        conference.network.num_papers(),
        conference.network.num_authors(),
    );
    for path in [&network_path, &rankings_path, &scores_path, &truth_path] {
        println!("wrote {}", path.display());
    }
    Ok(0)
}

// ------------------------------------------------------------------ adjust

fn cmd_adjust(args: &AdjustArgs, out_dir: &Path) -> Result<u8> {
    let (network, ids) = io::read_network_csv(&args.network)?;
    let rankings = io::read_rankings_csv(&args.rankings, &network, &ids)?;
    let raw = io::read_scores_csv(&args.scores, &network, &ids)?;

    let partition = greedy_partition(&network);
    let adjusted = adjusted_scores(&network, &rankings, &raw, &partition)?;

    let resolved = json!({
        "command": "adjust",
        "network": args.network,
        "rankings": args.rankings,
        "scores": args.scores,
    });
    let meta = Meta::new("adjust", None, &resolved);

    let adjusted_path = out_dir.join("adjusted.csv");
    io::write_adjusted_csv(&adjusted_path, &raw, &adjusted, &ids)?;
    meta.write_for(&adjusted_path)?;

    let blocks_path = out_dir.join("partition_blocks.csv");
    let owners_path = out_dir.join("partition_owners.csv");
    io::write_partition_csvs(&blocks_path, &owners_path, &partition, &ids)?;
    meta.write_for(&blocks_path)?;
    meta.write_for(&owners_path)?;

    let modified = adjusted.modified.iter().filter(|m| **m).count();
    println!(
        "{} papers in {} blocks ({} passthrough)",
        network.num_papers(),
        partition.num_blocks(),
        adjusted.passthrough_blocks.len(),
    );
    println!(
        "modified {modified}/{} scores ({:.1}%)",
        network.num_papers(),
        100.0 * fraction_modified(&adjusted),
    );
    for path in [&adjusted_path, &blocks_path, &owners_path] {
        println!("wrote {}", path.display());
    }
    Ok(0)
}

// ------------------------------------------------------------------ select

fn cmd_select(args: &SelectArgs, out_dir: &Path) -> Result<u8> {
    let cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let section = cfg.protocol.as_ref();
    let protocol_name = args
        .protocol
        .clone()
        .or_else(|| section.and_then(|s| s.protocol.clone()))
        .ok_or_else(|| {
            Error::InvalidArgument(
                "no protocol given (use --protocol or a [protocol] config section)".into(),
            )
        })?;
    let protocol = Protocol::parse(&protocol_name)?;
    let quota = args
        .quota
        .or_else(|| section.and_then(|s| s.quota))
        .unwrap_or(1);
    let winners = args
        .winners
        .or_else(|| section.and_then(|s| s.winners))
        .unwrap_or(1);

    let (network, ids) = io::read_network_csv(&args.network)?;
    let rankings = match (&args.rankings, protocol) {
        (Some(path), _) => io::read_rankings_csv(path, &network, &ids)?,
        // The benchmark ranks papers by raw score alone, so it works
        // without any rankings file.
        (None, Protocol::Benchmark) => {
            AuthorRankings::new(&network, vec![None; network.num_authors()])?
        }
        (None, _) => {
            return Err(Error::InvalidArgument(format!(
                "--rankings is required for protocol {protocol_name}"
            )))
        }
    };

    let rows = io::read_adjusted_csv(&args.adjusted)?;
    let mut raw = vec![None; network.num_papers()];
    let mut adjusted = vec![None; network.num_papers()];
    for row in &rows {
        let paper = ids.papers.internal(row.paper_id).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "adjusted file mentions paper {} which is not in the network",
                row.paper_id
            ))
        })?;
        raw[paper] = Some(row.raw);
        adjusted[paper] = Some(row.adjusted);
    }
    let unpack = |values: Vec<Option<f64>>| -> Result<ScoreVector> {
        let mut out = Vec::with_capacity(values.len());
        for (paper, v) in values.into_iter().enumerate() {
            out.push(v.ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "adjusted file has no row for paper {}",
                    ids.papers.external(paper)
                ))
            })?);
        }
        ScoreVector::new(out)
    };
    let raw = unpack(raw)?;
    let adjusted = unpack(adjusted)?;

    let spec = ProtocolSpec::new(protocol, quota, winners)?;
    let result = select(&spec, &network, &rankings, &raw, &adjusted)?;

    let resolved = json!({
        "command": "select",
        "protocol": protocol.name(),
        "quota": quota,
        "winners": winners,
        "network": args.network,
        "adjusted": args.adjusted,
    });
    let meta = Meta::new("select", None, &resolved);

    let selection_path = out_dir.join("selection.csv");
    io::write_selection_csv(&selection_path, &result, &ids)?;
    meta.write_for(&selection_path)?;

    println!(
        "{}: pool of {} eligible papers",
        protocol.name(),
        result.pool_size
    );
    for (i, entry) in result.entries.iter().enumerate() {
        println!(
            "winner {}: paper {} (raw {}, adjusted {})",
            i + 1,
            ids.papers.external(entry.paper),
            entry.raw,
            entry.adjusted,
        );
    }
    println!("wrote {}", selection_path.display());
    Ok(0)
}

// ------------------------------------------------------------------- sweep

fn cmd_sweep(args: &SweepArgs, seed_flag: Option<u64>, out_dir: &Path) -> Result<u8> {
    let cfg = RunConfig::load(&args.config)?;
    let network = cfg.network()?;
    let quality = cfg.quality()?;
    let seed = seed_flag.or(cfg.master_seed).unwrap_or(0);
    let sweep_cfg = match &cfg.sweep {
        Some(section) => section.to_sweep_config(network, quality, seed)?,
        None => isomech::simlab::SweepConfig::new(network, quality, seed),
    };

    let cells = sweep_cfg.epsilons.len()
        * sweep_cfg.quotas.len()
        * sweep_cfg.winners.len()
        * sweep_cfg.protocols.len();
    println!(
        "sweeping {cells} cells x {} rounds (seed {seed})",
        sweep_cfg.rounds
    );

    let result = run_sweep(&sweep_cfg)?;

    let resolved = json!({ "command": "sweep", "config": sweep_cfg });
    let meta = Meta::new("sweep", Some(seed), &resolved);
    let sweep_path = out_dir.join("sweep.csv");
    io::write_sweep_csv(&sweep_path, &result)?;
    meta.write_for(&sweep_path)?;

    println!(
        "{:>8} {:>6} {:>8}  {:<12} {:>14} {:>10}",
        "epsilon", "quota", "winners", "protocol", "mean_quality", "sem"
    );
    for cell in &result.cells {
        println!(
            "{:>8} {:>6} {:>8}  {:<12} {:>14.6} {:>10.6}",
            cell.epsilon,
            cell.quota,
            cell.winners,
            cell.protocol.name(),
            cell.mean_norm_quality,
            cell.sem,
        );
    }
    println!("wrote {}", sweep_path.display());
    Ok(0)
}

// ------------------------------------------------------------------ verify

fn cmd_verify(args: &VerifyArgs, seed_flag: Option<u64>, out_dir: &Path) -> Result<u8> {
    let seed = seed_flag.unwrap_or(DEFAULT_VERIFY_SEED);
    let report_path = out_dir.join("report.json");

    let (passed, report_json, headline) = match args.theorem.as_str() {
        "truthfulness" => {
            let trials = args.trials.unwrap_or(10_000);
            let scores = ScoreVector::new((0..args.n).rev().map(|i| i as f64).collect())?;
            let scalar = parse_scalar_utility(&args.utility)?;
            let utility = AuthorUtility::Blind(BlindUtility::new(args.quota, scalar)?);
            let report = verify_truthfulness(
                args.n,
                &scores,
                &utility,
                args.noise_variance,
                trials,
                seed,
            )?;
            let headline = format!(
                "truthfulness: {} reports x {trials} trials, max gap z = {:.2} -> {}",
                report.permutations.len(),
                report.max_gap_z,
                if report.truthful { "pass" } else { "FAIL" },
            );
            (report.truthful, to_json_value(&report), headline)
        }
        "majorization" => {
            let trials = args.trials.unwrap_or(10_000);
            let report = verify_majorization_step(trials, seed)?;
            let headline = format!(
                "majorization: {} samples, {} violations (worst margin {:.2e}) -> {}",
                report.trials,
                report.violations,
                report.diagnostic,
                if report.pass { "pass" } else { "FAIL" },
            );
            (report.pass, to_json_value(&report), headline)
        }
        "ir" => {
            let trials = args.trials.unwrap_or(10_000);
            let scalar = parse_scalar_utility(&args.utility)?;
            let report = verify_individual_rationality(trials, &scalar, seed)?;
            let headline = format!(
                "individual rationality: {} samples, {} violations \
                 (mean top-score gain {:.4}) -> {}",
                report.trials,
                report.violations,
                report.diagnostic,
                if report.pass { "pass" } else { "FAIL" },
            );
            (report.pass, to_json_value(&report), headline)
        }
        other => unreachable!("clap rejects theorem {other}"),
    };

    let resolved = json!({
        "command": "verify",
        "theorem": args.theorem,
        "utility": args.utility,
        "trials": args.trials,
        "n": args.n,
        "quota": args.quota,
        "noise_variance": args.noise_variance,
        "seed": seed,
    });
    fs::write(&report_path, pretty_json(&report_json))?;
    Meta::new("verify", Some(seed), &resolved).write_for(&report_path)?;

    println!("{headline}");
    println!("wrote {}", report_path.display());
    Ok(if passed { 0 } else { 1 })
}

/// Parse `name[:param[:param]]` into a measured scalar utility.
fn parse_scalar_utility(text: &str) -> Result<ScalarUtility> {
    let parts: Vec<&str> = text.split(':').collect();
    let param = |i: usize, default: f64| -> Result<f64> {
        match parts.get(i) {
            Some(p) => p.parse().map_err(|_| {
                Error::InvalidArgument(format!("utility parameter '{p}' is not a number"))
            }),
            None => Ok(default),
        }
    };
    let (kind, max_parts) = match parts[0] {
        "linear" => (
            UtilityKind::Linear {
                slope: param(1, 1.0)?,
                intercept: param(2, 0.0)?,
            },
            3,
        ),
        "exp" => (UtilityKind::Exponential { rate: param(1, 1.0)? }, 2),
        "softplus" => (UtilityKind::SoftplusPower { power: param(1, 2.0)? }, 2),
        "sigmoid" => (
            UtilityKind::ThresholdSigmoid {
                center: param(1, 1.5)?,
                steepness: param(2, 2.0)?,
            },
            3,
        ),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown utility '{other}' (expected linear, exp, softplus, or sigmoid)"
            )))
        }
    };
    if parts.len() > max_parts {
        return Err(Error::InvalidArgument(format!(
            "too many parameters for utility '{}'",
            parts[0]
        )));
    }
    ScalarUtility::new(kind)
}

// ------------------------------------------------------------------- audit

fn cmd_audit(args: &AuditArgs, out_dir: &Path) -> Result<u8> {
    let cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let section = cfg.audit.as_ref();
    let outcome_name = args
        .outcome
        .clone()
        .or_else(|| section.and_then(|s| s.outcome.clone()))
        .unwrap_or_else(|| "best".into());
    let threshold = OutcomeTier::parse(&outcome_name)?;
    let lambda = args
        .lambda
        .or_else(|| section.and_then(|s| s.lambda))
        .unwrap_or(1.0);
    let buckets = args
        .buckets
        .clone()
        .or_else(|| section.and_then(|s| s.buckets.clone()))
        .unwrap_or_else(|| "uniform".into());

    let (lo, hi) = NORMALIZED_SCALE;
    let edges = parse_bucket_edges(&buckets, lo, hi)?;

    let records = io::read_records_csv(&args.records)?;
    let normalized = normalize_scores(&records, lo, hi)?;
    let curve = bucket_probabilities(&normalized, &edges, threshold)?;
    let fit = fit_logistic(&normalized, threshold, lambda)?;
    let report = convexity_report(&fit, lo, hi)?;

    if !fit.converged {
        eprintln!(
            "warning: fit stopped after {} iterations without converging; \
             reporting the best iterate",
            fit.iterations
        );
    }

    let resolved = json!({
        "command": "audit",
        "records": args.records,
        "outcome": threshold.name(),
        "lambda": lambda,
        "buckets": buckets,
        "scale": [lo, hi],
    });
    let meta = Meta::new("audit", None, &resolved);

    let curve_path = out_dir.join("curve.csv");
    io::write_curve_csv(&curve_path, &curve)?;
    meta.write_for(&curve_path)?;

    let document = FitDocument {
        beta0: fit.intercept,
        beta1: fit.slope,
        lambda: fit.lambda,
        converged: fit.converged,
        iterations: fit.iterations,
        saturation: report.saturation,
        convexity: report.clone(),
    };
    let fit_path = out_dir.join("fit.json");
    fs::write(&fit_path, pretty_json(&document))?;
    meta.write_for(&fit_path)?;

    println!(
        "{} records, {} buckets; success = outcome >= {}",
        normalized.len(),
        curve.buckets.len(),
        threshold.name(),
    );
    println!(
        "fit: p(s) = sigmoid({:.4} + {:.4} s), lambda = {lambda}",
        fit.intercept, fit.slope
    );
    match report.saturation {
        Some(s) => println!("saturation s* = {s:.4}; {}", describe(&report)),
        None => println!("{}", describe(&report)),
    }
    for path in [&curve_path, &fit_path] {
        println!("wrote {}", path.display());
    }
    Ok(0)
}

/// `uniform[:width]` or `preset` on the normalized scale.
fn parse_bucket_edges(text: &str, lo: f64, hi: f64) -> Result<Vec<f64>> {
    match text.split_once(':') {
        None if text == "uniform" => uniform_edges(lo, hi, 0.5),
        None if text == "preset" => Ok(nonuniform_preset_edges()),
        Some(("uniform", width)) => {
            let width: f64 = width.parse().map_err(|_| {
                Error::InvalidArgument(format!("bucket width '{width}' is not a number"))
            })?;
            uniform_edges(lo, hi, width)
        }
        _ => Err(Error::InvalidArgument(format!(
            "unknown bucket layout '{text}' (expected uniform[:width] or preset)"
        ))),
    }
}

fn describe(report: &ConvexityReport) -> String {
    use isomech::audit::ConvexityVerdict::*;
    match &report.verdict {
        Convex => format!(
            "curve is convex on [{}, {}]",
            report.range.0, report.range.1
        ),
        NonConvex { first_negative } => format!(
            "curve turns concave at s = {first_negative:.4} within [{}, {}]",
            report.range.0, report.range.1
        ),
        Flat => "curve is flat: score carries no outcome information".into(),
    }
}

#[derive(Serialize)]
struct FitDocument {
    beta0: f64,
    beta1: f64,
    lambda: f64,
    converged: bool,
    iterations: usize,
    saturation: Option<f64>,
    convexity: ConvexityReport,
}

// ---------------------------------------------------------------- metadata

/// Provenance sidecar written next to every output file.
#[derive(Serialize)]
struct Meta {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: Option<u64>,
    /// SHA-256 over the canonical JSON of the resolved configuration (file
    /// sections merged with flag overrides), not over the raw config file.
    config_sha256: String,
}

impl Meta {
    fn new(command: &'static str, seed: Option<u64>, resolved: &serde_json::Value) -> Meta {
        let canonical = serde_json::to_vec(resolved).expect("json values always serialize");
        Meta {
            tool: "isomech",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            config_sha256: hex(&Sha256::digest(&canonical)),
        }
    }

    fn write_for(&self, output: &Path) -> Result<()> {
        let mut name = output
            .file_name()
            .expect("outputs always have file names")
            .to_os_string();
        name.push(".meta.json");
        let path = output.with_file_name(name);
        fs::write(&path, pretty_json(self))?;
        Ok(())
    }
}

fn to_json_value<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("reports always serialize")
}

fn pretty_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports always serialize")
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
