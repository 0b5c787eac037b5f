//! `matchaudit`: solve stable-matching instances, audit manipulation
//! strategies, generate random markets, run the Monte Carlo experiments, and
//! verify the structural claims against the brute-force oracle.
//!
//! Exit codes: 0 success, 1 verification failure, 2 parse/config error,
//! 3 unknown agent name, 4 unknown experiment or claim name.

use clap::{Parser, Subcommand, ValueEnum};
use matchaudit::experiments::{
    emit_report, run_experiment, seeded_profile, Experiment, ExperimentConfig, ExperimentReport,
    ReportFormat,
};
use matchaudit::manipulation::{
    best_accomplice, optimal_accomplice_no_regret, optimal_accomplice_with_regret, optimal_self,
    AccompliceMode, ManipulationResult, Strategy,
};
use matchaudit::model::{PreferenceProfile, Side};
use matchaudit::oracle::{verify_claim, Claim, VerifyConfig};
use matchaudit::{run_da, run_da_women_proposing};
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "matchaudit",
    version,
    about = "Stable matching, manipulation audits, and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print timing information to stderr.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run deferred acceptance on a profile file and print the matching.
    Solve {
        profile: PathBuf,
        /// Append the proposal trace.
        #[arg(long)]
        trace: bool,
        /// Let the women propose (women-optimal matching).
        #[arg(long)]
        women_proposing: bool,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Compute an optimal manipulation for a woman and report its effects.
    Audit {
        profile: PathBuf,
        /// Target woman, e.g. `w1`.
        #[arg(long)]
        woman: String,
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        /// Fixed accomplice, e.g. `m2` (accomplice strategies only).
        #[arg(long, conflicts_with = "pool")]
        accomplice: Option<String>,
        /// Comma-separated accomplice pool; defaults to all men.
        #[arg(long, value_delimiter = ',')]
        pool: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Run one of the named Monte Carlo experiments.
    Experiment {
        /// Experiment name, e.g. `fraction-women`.
        name: String,
        /// Inclusive range `LO..HI` (or a single value) of market sizes.
        #[arg(long, default_value = "8..8")]
        n_range: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Accomplice pool sizes (accomplice-pool experiment only).
        #[arg(long, value_delimiter = ',')]
        pool_sizes: Vec<usize>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormatArg::Csv)]
        format: ReportFormatArg,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Check a structural claim against seeded random instances.
    Verify {
        /// Claim name, e.g. `thm-4-5`.
        #[arg(long)]
        claim: String,
        #[arg(long, default_value_t = 500)]
        trials: u64,
        #[arg(long, default_value = "3..6")]
        n_range: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Enumerate the full profile space (n <= 3 only).
        #[arg(long)]
        exhaustive: bool,
        /// Where to write a counterexample bundle on failure.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Generate a uniformly random profile, deterministic per (n, seed).
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ProfileFormatArg::Text)]
        format: ProfileFormatArg,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    #[value(name = "self")]
    SelfManipulation,
    #[value(name = "accomplice-nr")]
    AccompliceNr,
    #[value(name = "accomplice-wr")]
    AccompliceWr,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProfileFormatArg {
    Text,
    Json,
}

enum CliError {
    /// Exit 1: a verification run found counterexamples.
    VerificationFailed(String),
    /// Exit 2: unreadable input, profile parse error, bad config.
    Parse(String),
    /// Exit 3: agent name unknown in this instance.
    UnknownAgent(String),
    /// Exit 4: unknown experiment or claim name.
    UnknownName(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::VerificationFailed(_) => 1,
            CliError::Parse(_) => 2,
            CliError::UnknownAgent(_) => 3,
            CliError::UnknownName(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::VerificationFailed(msg)
            | CliError::Parse(msg)
            | CliError::UnknownAgent(msg)
            | CliError::UnknownName(msg) => f.write_str(msg),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = std::time::Instant::now();
    let result = run(cli.command);
    if cli.verbose {
        eprintln!("elapsed: {:?}", started.elapsed());
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Solve {
            profile,
            trace,
            women_proposing,
            format,
        } => cmd_solve(&profile, trace, women_proposing, format),
        Command::Audit {
            profile,
            woman,
            strategy,
            accomplice,
            pool,
            format,
        } => cmd_audit(
            &profile,
            &woman,
            strategy,
            accomplice.as_deref(),
            pool.as_deref(),
            format,
        ),
        Command::Experiment {
            name,
            n_range,
            trials,
            seed,
            pool_sizes,
            out,
            format,
            jobs,
        } => with_jobs(jobs, || {
            cmd_experiment(
                &name,
                &n_range,
                trials,
                seed,
                pool_sizes,
                out.as_deref(),
                format,
            )
        }),
        Command::Verify {
            claim,
            trials,
            n_range,
            seed,
            exhaustive,
            out_dir,
            jobs,
        } => with_jobs(jobs, || {
            cmd_verify(&claim, trials, &n_range, seed, exhaustive, &out_dir)
        }),
        Command::Gen {
            n,
            seed,
            out,
            format,
        } => cmd_gen(n, seed, out.as_deref(), format),
    }
}

fn with_jobs(
    jobs: Option<usize>,
    f: impl FnOnce() -> Result<(), CliError> + Send,
) -> Result<(), CliError> {
    match jobs {
        None => f(),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| CliError::Parse(format!("cannot build thread pool: {e}")))?
            .install(f),
    }
}

fn load_profile(path: &Path) -> Result<PreferenceProfile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    PreferenceProfile::parse_auto(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Parses `m3` / `w7` against the instance size.
fn parse_agent(profile: &PreferenceProfile, name: &str, want: Side) -> Result<usize, CliError> {
    let err = || CliError::UnknownAgent(format!("unknown agent name `{name}`"));
    let rest = match (want, name.as_bytes().first()) {
        (Side::Men, Some(b'm')) | (Side::Women, Some(b'w')) => &name[1..],
        _ => return Err(err()),
    };
    let idx: usize = rest.parse().map_err(|_| err())?;
    if idx == 0 || idx > profile.n() {
        return Err(err());
    }
    Ok(idx - 1)
}

/// Inclusive `LO..HI` range, or a single size.
fn parse_n_range(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Parse(format!("invalid n range `{text}` (expected LO..HI)"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|_| bad())?;
        if lo == 0 || hi < lo {
            return Err(bad());
        }
        Ok((lo, hi))
    } else {
        let v: usize = text.trim().parse().map_err(|_| bad())?;
        Ok((v, v))
    }
}

fn matching_lines(mu: &matchaudit::Matching) -> String {
    mu.pairs()
        .map(|(m, w)| format!("m{} -- w{}\n", m + 1, w + 1))
        .collect()
}

fn cmd_solve(
    path: &Path,
    trace: bool,
    women_proposing: bool,
    format: OutputFormat,
) -> Result<(), CliError> {
    let profile = load_profile(path)?;
    // Women-proposing runs are the men-proposing algorithm on the transposed
    // market, which also yields a trace when asked for.
    let (matching, trace_out, proposer) = if women_proposing {
        let transposed = PreferenceProfile::new(
            (0..profile.n())
                .map(|w| profile.woman_list(w).to_vec())
                .collect(),
            (0..profile.n())
                .map(|m| profile.man_list(m).to_vec())
                .collect(),
        )
        .expect("transposed profile is valid");
        let (wtm, t) = run_da(&transposed);
        let mut man_to_woman = vec![0; profile.n()];
        for (w, m) in wtm.pairs() {
            man_to_woman[m] = w;
        }
        debug_assert_eq!(
            man_to_woman,
            run_da_women_proposing(&profile).man_to_woman()
        );
        (
            matchaudit::Matching::from_man_to_woman(man_to_woman).expect("permutation"),
            t,
            'w',
        )
    } else {
        let (mu, t) = run_da(&profile);
        (mu, t, 'm')
    };
    let other = if proposer == 'm' { 'w' } else { 'm' };
    match format {
        OutputFormat::Text => {
            print!("{}", matching_lines(&matching));
            if trace {
                println!("trace:");
                for (p, r) in trace_out.iter() {
                    println!("{proposer}{} -> {other}{}", p + 1, r + 1);
                }
            }
        }
        OutputFormat::Json => {
            let mut doc = serde_json::json!({
                "matching": matching_json(&matching),
                "women_proposing": women_proposing,
            });
            if trace {
                doc["trace"] = trace_out
                    .iter()
                    .map(|(p, r)| {
                        serde_json::json!([
                            format!("{proposer}{}", p + 1),
                            format!("{other}{}", r + 1)
                        ])
                    })
                    .collect();
            }
            println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
        }
    }
    Ok(())
}

fn matching_json(mu: &matchaudit::Matching) -> serde_json::Value {
    mu.pairs()
        .map(|(m, w)| {
            (
                format!("m{}", m + 1),
                serde_json::json!(format!("w{}", w + 1)),
            )
        })
        .collect::<serde_json::Map<_, _>>()
        .into()
}

fn cmd_audit(
    path: &Path,
    woman: &str,
    strategy: StrategyArg,
    accomplice: Option<&str>,
    pool: Option<&[String]>,
    format: OutputFormat,
) -> Result<(), CliError> {
    let profile = load_profile(path)?;
    let w = parse_agent(&profile, woman, Side::Women)?;
    let result = match strategy {
        StrategyArg::SelfManipulation => optimal_self(&profile, w),
        StrategyArg::AccompliceNr | StrategyArg::AccompliceWr => {
            let mode = if strategy == StrategyArg::AccompliceNr {
                AccompliceMode::NoRegret
            } else {
                AccompliceMode::WithRegret
            };
            match (accomplice, pool) {
                (Some(name), _) => {
                    let m = parse_agent(&profile, name, Side::Men)?;
                    match mode {
                        AccompliceMode::NoRegret => optimal_accomplice_no_regret(&profile, m, w),
                        AccompliceMode::WithRegret => {
                            optimal_accomplice_with_regret(&profile, m, w)
                        }
                    }
                }
                (None, pool) => {
                    // Default pool: any man may act as the accomplice.
                    let members: Vec<usize> = match pool {
                        Some(names) => names
                            .iter()
                            .map(|name| parse_agent(&profile, name, Side::Men))
                            .collect::<Result<_, _>>()?,
                        None => (0..profile.n()).collect(),
                    };
                    best_accomplice(&profile, w, &members, mode)
                        .map_err(|e| CliError::Parse(e.to_string()))?
                }
            }
        }
    };
    print_audit(&profile, &result, format);
    Ok(())
}

fn print_audit(profile: &PreferenceProfile, r: &ManipulationResult, format: OutputFormat) {
    let side = if r.strategy == Strategy::SelfManipulation {
        'm'
    } else {
        'w'
    };
    let manip_side = if r.strategy == Strategy::SelfManipulation {
        'w'
    } else {
        'm'
    };
    let misreport: Vec<String> = r
        .misreport
        .iter()
        .map(|&a| format!("{side}{}", a + 1))
        .collect();
    let promoted = r.promoted_agent.map(|a| format!("{side}{}", a + 1));
    let partner = r.outcome.man_of(r.target_woman);
    match format {
        OutputFormat::Text => {
            println!("strategy: {}", r.strategy);
            println!("woman: w{}", r.target_woman + 1);
            println!("manipulator: {manip_side}{}", r.manipulator + 1);
            println!("misreport: {}", misreport.join(" "));
            match &promoted {
                Some(a) => println!("promoted: {a}"),
                None => println!("promoted: none (truth-telling is optimal)"),
            }
            println!(
                "outcome: {}",
                r.outcome
                    .pairs()
                    .map(|(m, w)| format!("m{}-w{}", m + 1, w + 1))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            println!("partner of w{}: m{}", r.target_woman + 1, partner + 1);
            println!("improvement: {}", r.improvement);
            println!("regret: {}", r.regret);
            println!("outcome_stable_wrt_truth: {}", r.outcome_stable_wrt_truth);
            println!(
                "outcome_m_stable_wrt_truth: {}",
                r.outcome_m_stable_wrt_truth
            );
        }
        OutputFormat::Json => {
            let doc = serde_json::json!({
                "strategy": r.strategy.to_string(),
                "woman": format!("w{}", r.target_woman + 1),
                "manipulator": format!("{manip_side}{}", r.manipulator + 1),
                "misreport": misreport,
                "promoted": promoted,
                "outcome": matching_json(&r.outcome),
                "partner": format!("m{}", partner + 1),
                "improvement": r.improvement,
                "regret": r.regret,
                "outcome_stable_wrt_truth": r.outcome_stable_wrt_truth,
                "outcome_m_stable_wrt_truth": r.outcome_m_stable_wrt_truth,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
        }
    }
    let _ = profile;
}

fn cmd_experiment(
    name: &str,
    n_range: &str,
    trials: u64,
    seed: u64,
    pool_sizes: Vec<usize>,
    out: Option<&Path>,
    format: ReportFormatArg,
) -> Result<(), CliError> {
    let experiment: Experiment =
        name.parse()
            .map_err(|e: matchaudit::experiments::UnknownName| {
                CliError::UnknownName(format!("{e}; known experiments: {}", known_experiments()))
            })?;
    let (lo, hi) = parse_n_range(n_range)?;
    let mut config = ExperimentConfig::new(experiment, (lo..=hi).collect());
    config.trials = trials;
    config.seed = seed;
    config.pool_sizes = pool_sizes;
    let report = run_experiment(&config).map_err(|e| CliError::Parse(e.to_string()))?;
    let format = match format {
        ReportFormatArg::Csv => ReportFormat::Csv,
        ReportFormatArg::Json => ReportFormat::Json,
    };
    let body = emit_report(&report, format);
    match out {
        Some(path) => {
            std::fs::write(path, &body)
                .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
            print_summary(&report);
        }
        None => {
            print_summary_to(&report, &mut std::io::stderr());
            print!("{body}");
        }
    }
    Ok(())
}

fn known_experiments() -> String {
    Experiment::ALL
        .iter()
        .map(|e| e.cli_name())
        .collect::<Vec<_>>()
        .join(", ")
}

fn print_summary(report: &ExperimentReport) {
    print_summary_to(report, &mut std::io::stdout());
}

fn print_summary_to(report: &ExperimentReport, sink: &mut dyn std::io::Write) {
    for &n in &report.config.n_values {
        let rows: Vec<_> = report.rows.iter().filter(|r| r.n == n).collect();
        let shown = rows
            .iter()
            .take(4)
            .map(|r| format!("{}={}", r.metric, r.value))
            .collect::<Vec<_>>()
            .join(" ");
        let more = if rows.len() > 4 {
            format!(" (+{} more)", rows.len() - 4)
        } else {
            String::new()
        };
        let _ = writeln!(sink, "{} n={n}: {shown}{more}", report.experiment);
    }
}

fn cmd_verify(
    claim: &str,
    trials: u64,
    n_range: &str,
    seed: u64,
    exhaustive: bool,
    out_dir: &Path,
) -> Result<(), CliError> {
    let claim: Claim = claim
        .parse()
        .map_err(|e: matchaudit::oracle::UnknownClaim| {
            let known = Claim::ALL
                .iter()
                .map(|c| c.name())
                .collect::<Vec<_>>()
                .join(", ");
            CliError::UnknownName(format!("{e}; known claims: {known}"))
        })?;
    let (lo, hi) = parse_n_range(n_range)?;
    let config = VerifyConfig {
        trials,
        n_range: lo..=hi,
        seed,
        exhaustive,
    };
    let report = verify_claim(claim, &config).map_err(|e| CliError::Parse(e.to_string()))?;
    println!("{report}");
    if let Some(ce) = &report.first_counterexample {
        let profile_path = out_dir.join(format!("{claim}-counterexample.profile"));
        let sidecar_path = out_dir.join(format!("{claim}-counterexample.json"));
        let sidecar = serde_json::json!({
            "claim": claim.name(),
            "trial": ce.trial,
            "trial_seed": ce.trial_seed,
            "detail": ce.sidecar,
        });
        let io_err = |e: std::io::Error| CliError::Parse(format!("{}: {e}", out_dir.display()));
        std::fs::write(&profile_path, &ce.profile_text).map_err(io_err)?;
        std::fs::write(
            &sidecar_path,
            serde_json::to_string_pretty(&sidecar).expect("json"),
        )
        .map_err(io_err)?;
        println!(
            "counterexample: {} / {}",
            profile_path.display(),
            sidecar_path.display()
        );
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(format!(
            "{} failed {} checks",
            claim, report.failures
        )))
    }
}

fn cmd_gen(
    n: usize,
    seed: u64,
    out: Option<&Path>,
    format: ProfileFormatArg,
) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Parse("n must be at least 1".to_string()));
    }
    let profile = seeded_profile(n, seed);
    let body = match format {
        ProfileFormatArg::Text => profile.to_text(),
        ProfileFormatArg::Json => {
            let mut s = profile.to_json();
            s.push('\n');
            s
        }
    };
    match out {
        Some(path) => std::fs::write(path, &body)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
