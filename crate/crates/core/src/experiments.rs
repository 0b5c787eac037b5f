//! Seeded Monte Carlo harness over uniformly random preference profiles.
//!
//! Each experiment reproduces one of the headline simulations at configurable
//! scale and emits tabular data (CSV or JSON). Reports are deterministic
//! functions of the config: per-trial RNG streams are derived from
//! `(seed, n, trial)`, trials run in parallel, and aggregation folds the
//! per-trial records in trial order.

use crate::da::run_da;
use crate::manipulation::{accomplice_candidates, self_candidate_lists};
use crate::model::{Matching, PreferenceProfile};
use crate::rng_util::{derive_seed, RNG_ALGORITHM};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};
use thiserror::Error;

/// The fixed strategic woman of the single-woman experiments. Profiles are
/// i.i.d. uniform, so the choice is distribution-irrelevant.
pub const FIXED_WOMAN: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Experiment {
    /// How often the best no-regret accomplice and the best self manipulation
    /// strictly beat truthful reporting for the fixed woman.
    FreqVsTruth,
    /// How often one strategy strictly beats the other for the fixed woman.
    HeadToHead,
    /// Distribution of the rank improvement, conditioned on strict success.
    RankImprovement,
    /// Fraction of all women who can strictly improve, per strategy.
    FractionWomen,
    /// Mean improvement when the accomplice comes from a fixed pool.
    AccomplicePool,
    /// Fraction of instances manipulable by at least one woman.
    ManipulableInstances,
    /// Improvement/regret samples when each man in turn plays the
    /// with-regret accomplice for the fixed woman.
    RegretVsImprovement,
    /// Histogram of how many women benefit per instance.
    WomenBenefitTable,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::FreqVsTruth,
        Experiment::HeadToHead,
        Experiment::RankImprovement,
        Experiment::FractionWomen,
        Experiment::AccomplicePool,
        Experiment::ManipulableInstances,
        Experiment::RegretVsImprovement,
        Experiment::WomenBenefitTable,
    ];

    /// Name used in report files.
    pub fn name(self) -> &'static str {
        match self {
            Experiment::FreqVsTruth => "FreqVsTruth",
            Experiment::HeadToHead => "HeadToHead",
            Experiment::RankImprovement => "RankImprovement",
            Experiment::FractionWomen => "FractionWomen",
            Experiment::AccomplicePool => "AccomplicePool",
            Experiment::ManipulableInstances => "ManipulableInstances",
            Experiment::RegretVsImprovement => "RegretVsImprovement",
            Experiment::WomenBenefitTable => "WomenBenefitTable",
        }
    }

    /// Name used on the command line.
    pub fn cli_name(self) -> &'static str {
        match self {
            Experiment::FreqVsTruth => "freq-vs-truth",
            Experiment::HeadToHead => "head-to-head",
            Experiment::RankImprovement => "rank-improvement",
            Experiment::FractionWomen => "fraction-women",
            Experiment::AccomplicePool => "accomplice-pool",
            Experiment::ManipulableInstances => "manipulable-instances",
            Experiment::RegretVsImprovement => "regret-vs-improvement",
            Experiment::WomenBenefitTable => "women-benefit-table",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, UnknownName> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.cli_name() == s || e.name() == s)
            .ok_or_else(|| UnknownName(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown name `{0}`")]
pub struct UnknownName(pub String);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExperimentError {
    #[error("invalid config: {0}")]
    ConfigInvalid(String),
    #[error("malformed report: {0}")]
    MalformedReport(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n_values: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    /// Accomplice pool sizes; only used by [`Experiment::AccomplicePool`].
    /// Empty means `1..=n`.
    #[serde(default)]
    pub pool_sizes: Vec<usize>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, n_values: Vec<usize>) -> Self {
        Self {
            experiment,
            n_values,
            trials: 1000,
            seed: 0,
            pool_sizes: Vec::new(),
        }
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        if self.trials == 0 {
            return Err(ExperimentError::ConfigInvalid("trials must be >= 1".into()));
        }
        if self.n_values.is_empty() || self.n_values.iter().any(|&n| n < 2) {
            return Err(ExperimentError::ConfigInvalid(
                "need at least one n >= 2".into(),
            ));
        }
        if self.experiment == Experiment::AccomplicePool {
            let max_n = *self.n_values.iter().max().unwrap();
            if self.pool_sizes.iter().any(|&p| p == 0 || p > max_n) {
                return Err(ExperimentError::ConfigInvalid(format!(
                    "pool sizes must lie in 1..={max_n}"
                )));
            }
        }
        Ok(())
    }
}

/// A metric value: counts stay integers, fractions are formatted with six
/// decimal places.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricValue {
    Int(i64),
    Fraction(f64),
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricValue::Int(v) => write!(f, "{v}"),
            MetricValue::Fraction(v) => write!(f, "{v:.6}"),
        }
    }
}

impl MetricValue {
    pub fn as_f64(self) -> f64 {
        match self {
            MetricValue::Int(v) => v as f64,
            MetricValue::Fraction(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub n: usize,
    pub metric: String,
    pub value: MetricValue,
}

/// One raw per-trial record, kept for the distribution figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub n: usize,
    pub kind: String,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub config: ExperimentConfig,
    pub rows: Vec<MetricRow>,
    pub samples: Vec<SampleRow>,
    pub rng_algorithm: String,
    pub notes: Vec<String>,
    #[serde(skip, default)]
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Draws a profile where each of the `2n` lists is an independent uniform
/// random permutation.
pub fn random_profile<R: Rng>(n: usize, rng: &mut R) -> PreferenceProfile {
    let side = |rng: &mut R| -> Vec<Vec<usize>> {
        (0..n)
            .map(|_| {
                let mut list: Vec<usize> = (0..n).collect();
                list.shuffle(rng);
                list
            })
            .collect()
    };
    let men = side(rng);
    let women = side(rng);
    PreferenceProfile::new(men, women).expect("shuffled permutations are valid")
}

fn trial_rng(seed: u64, n: usize, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, &[n as u64, trial]))
}

/// One deterministic profile per `(n, seed)`; the generator behind `gen`.
pub fn seeded_profile(n: usize, seed: u64) -> PreferenceProfile {
    random_profile(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

// ---------------------------------------------------------------------------
// Per-profile measurements shared by the experiments
// ---------------------------------------------------------------------------

/// Per-woman true rank of the DA partner.
fn truth_ranks(p: &PreferenceProfile, mu: &Matching) -> Vec<usize> {
    (0..p.n()).map(|w| p.woman_rank(w, mu.man_of(w))).collect()
}

/// For every woman, her best achievable true rank under no-regret accomplice
/// manipulation by *any* man (one sweep over all single promotions).
fn no_regret_best_ranks(p: &PreferenceProfile, mu: &Matching) -> Vec<usize> {
    let mut best = truth_ranks(p, mu);
    for m in 0..p.n() {
        for cand in accomplice_candidates(p, m, mu) {
            if cand.regret != 0 {
                continue;
            }
            for (w, slot) in best.iter_mut().enumerate() {
                let r = p.woman_rank(w, cand.matching.man_of(w));
                if r < *slot {
                    *slot = r;
                }
            }
        }
    }
    best
}

/// Per accomplice: the fixed woman's best rank without regret, and her best
/// `(rank, regret)` pair with regret allowed (minimum regret among ties).
struct PerAccomplice {
    nr_rank: usize,
    wr_rank: usize,
    wr_regret: usize,
}

fn per_accomplice(p: &PreferenceProfile, mu: &Matching, w: usize) -> Vec<PerAccomplice> {
    let truth = p.woman_rank(w, mu.man_of(w));
    (0..p.n())
        .map(|m| {
            let mut nr = truth;
            let mut wr = (truth, 0usize);
            for cand in accomplice_candidates(p, m, mu) {
                let r = p.woman_rank(w, cand.matching.man_of(w));
                if cand.regret == 0 && r < nr {
                    nr = r;
                }
                if (r, cand.regret) < wr {
                    wr = (r, cand.regret);
                }
            }
            PerAccomplice {
                nr_rank: nr,
                wr_rank: wr.0,
                wr_regret: wr.1,
            }
        })
        .collect()
}

/// Best true rank woman `w` can reach by permuting her own list.
fn best_self_rank(p: &PreferenceProfile, mu: &Matching, w: usize) -> usize {
    let pos = p.woman_rank(w, mu.man_of(w));
    let mut best = pos;
    for (_, _, list) in self_candidate_lists(p.woman_list(w), pos) {
        let r = p.woman_rank(w, crate::da::da_woman_override(p, w, &list).man_of(w));
        if r < best {
            best = r;
            if best == 0 {
                break;
            }
        }
    }
    best
}

/// Early-exit existence check for self manipulation.
fn self_improves(p: &PreferenceProfile, mu: &Matching, w: usize) -> bool {
    let pos = p.woman_rank(w, mu.man_of(w));
    if pos == 0 {
        return false;
    }
    self_candidate_lists(p.woman_list(w), pos).any(|(_, _, list)| {
        p.woman_rank(w, crate::da::da_woman_override(p, w, &list).man_of(w)) < pos
    })
}

// ---------------------------------------------------------------------------
// Experiment driver
// ---------------------------------------------------------------------------

/// Runs one experiment. Identical configs produce identical reports
/// regardless of thread count; only `wall_time` varies.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    config.validate()?;
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    let mut notes = vec![
        format!("fixed strategic woman: w{}", FIXED_WOMAN + 1),
        "improvement and regret are true-list rank differences".to_string(),
    ];

    for &n in &config.n_values {
        match config.experiment {
            Experiment::FreqVsTruth => freq_vs_truth(config, n, &mut rows),
            Experiment::HeadToHead => head_to_head(config, n, &mut rows),
            Experiment::RankImprovement => rank_improvement(config, n, &mut rows, &mut samples),
            Experiment::FractionWomen => fraction_women(config, n, &mut rows),
            Experiment::AccomplicePool => accomplice_pool(config, n, &mut rows),
            Experiment::ManipulableInstances => manipulable_instances(config, n, &mut rows),
            Experiment::RegretVsImprovement => {
                regret_vs_improvement(config, n, &mut rows, &mut samples)
            }
            Experiment::WomenBenefitTable => women_benefit_table(config, n, &mut rows),
        }
    }
    if config.experiment == Experiment::RankImprovement {
        notes.push("distribution rows are conditioned on strict success".to_string());
    }

    Ok(ExperimentReport {
        experiment: config.experiment,
        config: config.clone(),
        rows,
        samples,
        rng_algorithm: RNG_ALGORITHM.to_string(),
        notes,
        wall_time: start.elapsed(),
    })
}

/// Maps trials in parallel, preserving trial order so that aggregation is
/// schedule-independent.
fn map_trials<T: Send>(
    config: &ExperimentConfig,
    n: usize,
    f: impl Fn(&PreferenceProfile, &Matching) -> T + Sync,
) -> Vec<T> {
    (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(config.seed, n, trial);
            let p = random_profile(n, &mut rng);
            let (mu, _) = run_da(&p);
            f(&p, &mu)
        })
        .collect()
}

fn frac(count: u64, total: u64) -> MetricValue {
    MetricValue::Fraction(count as f64 / total as f64)
}

fn row(rows: &mut Vec<MetricRow>, n: usize, metric: impl Into<String>, value: MetricValue) {
    rows.push(MetricRow {
        n,
        metric: metric.into(),
        value,
    });
}

fn freq_vs_truth(config: &ExperimentConfig, n: usize, rows: &mut Vec<MetricRow>) {
    let w = FIXED_WOMAN;
    let per: Vec<(bool, bool)> = map_trials(config, n, |p, mu| {
        let truth = p.woman_rank(w, mu.man_of(w));
        let acc = per_accomplice(p, mu, w)
            .iter()
            .map(|a| a.nr_rank)
            .min()
            .unwrap();
        let selfr = best_self_rank(p, mu, w);
        (acc < truth, selfr < truth)
    });
    let acc = per.iter().filter(|x| x.0).count() as u64;
    let slf = per.iter().filter(|x| x.1).count() as u64;
    row(rows, n, "accomplice_beats_truth", frac(acc, config.trials));
    row(rows, n, "self_beats_truth", frac(slf, config.trials));
}

fn head_to_head(config: &ExperimentConfig, n: usize, rows: &mut Vec<MetricRow>) {
    let w = FIXED_WOMAN;
    let per: Vec<(usize, usize)> = map_trials(config, n, |p, mu| {
        let acc = per_accomplice(p, mu, w)
            .iter()
            .map(|a| a.nr_rank)
            .min()
            .unwrap();
        (acc, best_self_rank(p, mu, w))
    });
    let acc = per.iter().filter(|&&(a, s)| a < s).count() as u64;
    let slf = per.iter().filter(|&&(a, s)| s < a).count() as u64;
    row(rows, n, "accomplice_beats_self", frac(acc, config.trials));
    row(rows, n, "self_beats_accomplice", frac(slf, config.trials));
}

/// Boxplot summary: quartiles by linear interpolation plus Tukey whiskers
/// (the furthest samples within 1.5 IQR of the quartiles).
fn distribution_rows(rows: &mut Vec<MetricRow>, n: usize, prefix: &str, samples: &[i64]) {
    row(
        rows,
        n,
        format!("{prefix}_count"),
        MetricValue::Int(samples.len() as i64),
    );
    if samples.is_empty() {
        return;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let quantile = |q: f64| -> f64 {
        let pos = q * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let fracpart = pos - lo as f64;
        sorted[lo] as f64 + (sorted[hi] - sorted[lo]) as f64 * fracpart
    };
    let (q1, med, q3) = (quantile(0.25), quantile(0.5), quantile(0.75));
    let iqr = q3 - q1;
    let lo_fence = q1 - 1.5 * iqr;
    let hi_fence = q3 + 1.5 * iqr;
    let whisker_low = *sorted.iter().find(|&&x| x as f64 >= lo_fence).unwrap();
    let whisker_high = *sorted
        .iter()
        .rev()
        .find(|&&x| x as f64 <= hi_fence)
        .unwrap();
    let mean = sorted.iter().sum::<i64>() as f64 / sorted.len() as f64;
    row(
        rows,
        n,
        format!("{prefix}_mean"),
        MetricValue::Fraction(mean),
    );
    row(rows, n, format!("{prefix}_q1"), MetricValue::Fraction(q1));
    row(
        rows,
        n,
        format!("{prefix}_median"),
        MetricValue::Fraction(med),
    );
    row(rows, n, format!("{prefix}_q3"), MetricValue::Fraction(q3));
    row(
        rows,
        n,
        format!("{prefix}_whisker_low"),
        MetricValue::Int(whisker_low),
    );
    row(
        rows,
        n,
        format!("{prefix}_whisker_high"),
        MetricValue::Int(whisker_high),
    );
}

fn rank_improvement(
    config: &ExperimentConfig,
    n: usize,
    rows: &mut Vec<MetricRow>,
    samples: &mut Vec<SampleRow>,
) {
    let w = FIXED_WOMAN;
    let per: Vec<(usize, usize)> = map_trials(config, n, |p, mu| {
        let truth = p.woman_rank(w, mu.man_of(w));
        let acc = per_accomplice(p, mu, w)
            .iter()
            .map(|a| a.nr_rank)
            .min()
            .unwrap();
        (truth - acc, truth - best_self_rank(p, mu, w))
    });
    let acc: Vec<i64> = per.iter().filter(|x| x.0 > 0).map(|x| x.0 as i64).collect();
    let slf: Vec<i64> = per.iter().filter(|x| x.1 > 0).map(|x| x.1 as i64).collect();
    distribution_rows(rows, n, "accomplice_improvement", &acc);
    distribution_rows(rows, n, "self_improvement", &slf);
    samples.extend(acc.iter().map(|&v| SampleRow {
        n,
        kind: "accomplice_improvement".into(),
        value: v,
    }));
    samples.extend(slf.iter().map(|&v| SampleRow {
        n,
        kind: "self_improvement".into(),
        value: v,
    }));
}

fn fraction_women(config: &ExperimentConfig, n: usize, rows: &mut Vec<MetricRow>) {
    let per: Vec<(u64, u64)> = map_trials(config, n, |p, mu| {
        let truth = truth_ranks(p, mu);
        let acc = no_regret_best_ranks(p, mu)
            .iter()
            .zip(&truth)
            .filter(|(b, t)| b < t)
            .count() as u64;
        let slf = (0..n).filter(|&w| self_improves(p, mu, w)).count() as u64;
        (acc, slf)
    });
    let acc: u64 = per.iter().map(|x| x.0).sum();
    let slf: u64 = per.iter().map(|x| x.1).sum();
    row(
        rows,
        n,
        "accomplice_fraction",
        frac(acc, config.trials * n as u64),
    );
    row(
        rows,
        n,
        "self_fraction",
        frac(slf, config.trials * n as u64),
    );
}

fn accomplice_pool(config: &ExperimentConfig, n: usize, rows: &mut Vec<MetricRow>) {
    let w = FIXED_WOMAN;
    let pools: Vec<usize> = if config.pool_sizes.is_empty() {
        (1..=n).collect()
    } else {
        let mut p: Vec<usize> = config
            .pool_sizes
            .iter()
            .copied()
            .filter(|&p| p <= n)
            .collect();
        p.sort_unstable();
        p.dedup();
        p
    };
    struct Trial {
        nr_imp: Vec<u64>,
        wr_imp: Vec<u64>,
        self_imp: u64,
    }
    let per: Vec<Trial> = map_trials(config, n, |p, mu| {
        let truth = p.woman_rank(w, mu.man_of(w));
        let accs = per_accomplice(p, mu, w);
        // Prefix minima: the pool of size k is the first k men.
        let mut nr_best = truth;
        let mut wr_best = truth;
        let mut nr_prefix = Vec::with_capacity(n);
        let mut wr_prefix = Vec::with_capacity(n);
        for a in &accs {
            nr_best = nr_best.min(a.nr_rank);
            wr_best = wr_best.min(a.wr_rank);
            nr_prefix.push((truth - nr_best) as u64);
            wr_prefix.push((truth - wr_best) as u64);
        }
        Trial {
            nr_imp: pools.iter().map(|&p| nr_prefix[p - 1]).collect(),
            wr_imp: pools.iter().map(|&p| wr_prefix[p - 1]).collect(),
            self_imp: (truth - best_self_rank(p, mu, w)) as u64,
        }
    });
    let mean =
        |get: &dyn Fn(&Trial) -> u64| per.iter().map(get).sum::<u64>() as f64 / per.len() as f64;
    row(
        rows,
        n,
        "self_mean_improvement",
        MetricValue::Fraction(mean(&|t| t.self_imp)),
    );
    for (i, &p) in pools.iter().enumerate() {
        row(
            rows,
            n,
            format!("pool{p}_no_regret_mean_improvement"),
            MetricValue::Fraction(mean(&|t: &Trial| t.nr_imp[i])),
        );
        row(
            rows,
            n,
            format!("pool{p}_with_regret_mean_improvement"),
            MetricValue::Fraction(mean(&|t: &Trial| t.wr_imp[i])),
        );
    }
}

fn manipulable_instances(config: &ExperimentConfig, n: usize, rows: &mut Vec<MetricRow>) {
    let per: Vec<(bool, bool)> = map_trials(config, n, |p, mu| {
        let truth = truth_ranks(p, mu);
        let acc = no_regret_best_ranks(p, mu)
            .iter()
            .zip(&truth)
            .any(|(b, t)| b < t);
        let slf = (0..n).any(|w| self_improves(p, mu, w));
        (acc, slf)
    });
    let acc = per.iter().filter(|x| x.0).count() as u64;
    let slf = per.iter().filter(|x| x.1).count() as u64;
    row(rows, n, "accomplice_fraction", frac(acc, config.trials));
    row(rows, n, "self_fraction", frac(slf, config.trials));
}

fn regret_vs_improvement(
    config: &ExperimentConfig,
    n: usize,
    rows: &mut Vec<MetricRow>,
    samples: &mut Vec<SampleRow>,
) {
    let w = FIXED_WOMAN;
    let per: Vec<Vec<(i64, i64)>> = map_trials(config, n, |p, mu| {
        let truth = p.woman_rank(w, mu.man_of(w));
        per_accomplice(p, mu, w)
            .iter()
            .map(|a| ((truth - a.wr_rank) as i64, a.wr_regret as i64))
            .collect()
    });
    let imp: Vec<i64> = per.iter().flatten().map(|x| x.0).collect();
    let reg: Vec<i64> = per.iter().flatten().map(|x| x.1).collect();
    distribution_rows(rows, n, "improvement", &imp);
    distribution_rows(rows, n, "regret", &reg);
    samples.extend(imp.iter().map(|&v| SampleRow {
        n,
        kind: "improvement".into(),
        value: v,
    }));
    samples.extend(reg.iter().map(|&v| SampleRow {
        n,
        kind: "regret".into(),
        value: v,
    }));
}

fn women_benefit_table(config: &ExperimentConfig, n: usize, rows: &mut Vec<MetricRow>) {
    let per: Vec<(usize, usize)> = map_trials(config, n, |p, mu| {
        let truth = truth_ranks(p, mu);
        let acc = no_regret_best_ranks(p, mu)
            .iter()
            .zip(&truth)
            .filter(|(b, t)| b < t)
            .count();
        let slf = (0..n).filter(|&w| self_improves(p, mu, w)).count();
        (acc, slf)
    });
    let mut acc_hist = vec![0i64; n + 1];
    let mut self_hist = vec![0i64; n + 1];
    for &(a, s) in &per {
        acc_hist[a] += 1;
        self_hist[s] += 1;
    }
    for (k, &count) in acc_hist.iter().enumerate() {
        row(
            rows,
            n,
            format!("accomplice_count_{k}"),
            MetricValue::Int(count),
        );
    }
    for (k, &count) in self_hist.iter().enumerate() {
        row(rows, n, format!("self_count_{k}"), MetricValue::Int(count));
    }
}

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

/// Serializes a report. CSV: a `experiment,n,metric,value` section followed,
/// when raw samples exist, by a `experiment,n,sample_kind,value` section.
/// JSON mirrors the same rows. Neither format contains timestamps.
pub fn emit_report(report: &ExperimentReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => {
            let mut out = String::from("experiment,n,metric,value\n");
            for r in &report.rows {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    report.experiment, r.n, r.metric, r.value
                ));
            }
            if !report.samples.is_empty() {
                out.push_str("experiment,n,sample_kind,value\n");
                for s in &report.samples {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        report.experiment, s.n, s.kind, s.value
                    ));
                }
            }
            out
        }
        ReportFormat::Json => {
            serde_json::to_string_pretty(report).expect("report serialization cannot fail")
        }
    }
}

/// Parses a JSON report back; the inverse of [`emit_report`] with
/// [`ReportFormat::Json`].
pub fn parse_json_report(text: &str) -> Result<ExperimentReport, ExperimentError> {
    serde_json::from_str(text).map_err(|e| ExperimentError::MalformedReport(e.to_string()))
}
