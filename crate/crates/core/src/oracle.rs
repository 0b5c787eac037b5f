//! Independent brute-force ground truth.
//!
//! Exhaustive misreport search and seeded property trials certify every
//! structural claim at desk scale. Dependency rule: this module uses only
//! `model`, `da`, and `stability`, never the `manipulation` solvers it
//! checks. Where a claim needs single-promotion lists, they are rebuilt
//! from the list-surgery primitives.

use crate::da::{da_man_override, da_with_misreport, da_woman_override, run_da};
use crate::model::{Matching, PreferenceProfile, SplitPreference};
use crate::rng_util::derive_seed;
use crate::stability::{
    enumerate_stable_with_cap, is_m_stable, is_stable, join, meet, StabilityError,
};
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use std::collections::HashSet;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance size {n} exceeds the oracle cap {cap} for this operation")]
    InstanceTooLarge { n: usize, cap: usize },
    #[error("exhaustive instance enumeration is limited to n <= 3, got {0}")]
    ExhaustiveTooLarge(usize),
    #[error(transparent)]
    Stability(#[from] StabilityError),
}

/// The misreporting agent of an exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agent {
    Man(usize),
    Woman(usize),
}

/// Strategy space for an exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    NoRegret,
    WithRegret,
    SelfManipulation,
}

/// Result of an exhaustive misreport search for one target woman.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExhaustiveBest {
    /// The man matched with the target woman at the optimum.
    pub best_partner: usize,
    /// Her true-list rank of that partner (0 = top choice).
    pub best_rank: usize,
    /// Optimal misreport: minimal regret among rank ties, then first in
    /// lexicographic list order.
    pub witness: Vec<usize>,
    pub witness_regret: usize,
}

const FACTORIAL_CAP: usize = 7;

/// Best match for `target_w` over *all* `n!` preference lists of the agent.
///
/// `NoRegret` keeps only misreports preserving the man's own DA partner;
/// `SelfManipulation` expects `Agent::Woman`. Lists are enumerated in
/// lexicographic order so the witness is reproducible.
pub fn exhaustive_best_manipulation(
    profile: &PreferenceProfile,
    agent: Agent,
    target_w: usize,
    mode: SearchMode,
) -> Result<ExhaustiveBest, OracleError> {
    let n = profile.n();
    if n > FACTORIAL_CAP {
        return Err(OracleError::InstanceTooLarge {
            n,
            cap: FACTORIAL_CAP,
        });
    }
    let (mu0, _) = run_da(profile);
    let mut best: Option<(usize, usize, Vec<usize>)> = None;
    let mut consider = |rank: usize, regret: usize, list: &[usize]| {
        if best
            .as_ref()
            .is_none_or(|(r, g, _)| (rank, regret) < (*r, *g))
        {
            best = Some((rank, regret, list.to_vec()));
        }
    };
    match (agent, mode) {
        (Agent::Man(m), SearchMode::NoRegret | SearchMode::WithRegret) => {
            let own = mu0.woman_of(m);
            for list in (0..n).permutations(n) {
                let mu = da_man_override(profile, m, &list);
                if mode == SearchMode::NoRegret && mu.woman_of(m) != own {
                    continue;
                }
                let regret = profile.man_rank(m, mu.woman_of(m)) - profile.man_rank(m, own);
                consider(
                    profile.woman_rank(target_w, mu.man_of(target_w)),
                    regret,
                    &list,
                );
            }
        }
        (Agent::Woman(w), SearchMode::SelfManipulation) => {
            for list in (0..n).permutations(n) {
                let mu = da_woman_override(profile, w, &list);
                consider(profile.woman_rank(target_w, mu.man_of(target_w)), 0, &list);
            }
        }
        _ => panic!("agent side does not match search mode"),
    }
    let (best_rank, witness_regret, witness) = best.expect("n! >= 1 lists considered");
    let best_partner = profile.woman_list(target_w)[best_rank];
    Ok(ExhaustiveBest {
        best_partner,
        best_rank,
        witness,
        witness_regret,
    })
}

// ---------------------------------------------------------------------------
// Claim verification
// ---------------------------------------------------------------------------

/// A falsifiable statement checked over seeded random instances.
///
/// Variant names double as the wire identifiers used by `verify --claim`
/// (in kebab case), so they are kept verbatim rather than camel-cased.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Claim {
    /// No-regret push up: the manipulated stable set is contained in the true one.
    Thm4_1,
    /// No-regret push up weakly improves all women and weakly hurts all men.
    Cor4_2,
    /// Optimal no-regret manipulation is achieved by a single promotion.
    Thm4_5,
    /// Optimal with-regret manipulation is achieved by a single promotion.
    Thm4_9,
    /// Every beneficial match, optimal or not, is reachable by a single promotion.
    ThmD_3,
    /// Matchings stable under a misreport are m-stable under the truth.
    Prop3_2,
    /// Permuting the list parts around the DA partner leaves the matching unchanged.
    Prop3_3,
    /// Push down keeps the manipulator's match and weakly improves all men.
    Prop3_4,
    /// Push down weakly hurts all women.
    Lemma3_5,
    /// Adding a push down to a push up never changes a strictly-improved woman's match.
    Lemma4_3,
    /// A with-regret push up matches the accomplice inside the pushed-up set.
    LemmaB_2,
    /// Proposals under a set push up are covered by the single promotions.
    LemmaB_3,
    /// No-regret push up only adds proposals.
    LemmaC_PushUpProposals,
    /// Pushing up women who all prefer their partners changes nothing.
    LemmaC_2,
    /// A matching-changing no-regret push up improves >= 2 women and hurts >= 2 men.
    PropC_1,
    /// Stable matchings are closed under meet and join.
    PropA_1_Lattice,
    /// No man can improve his own DA match by misreporting.
    StrategyproofnessMen,
}

impl Claim {
    pub const ALL: [Claim; 17] = [
        Claim::Thm4_1,
        Claim::Cor4_2,
        Claim::Thm4_5,
        Claim::Thm4_9,
        Claim::ThmD_3,
        Claim::Prop3_2,
        Claim::Prop3_3,
        Claim::Prop3_4,
        Claim::Lemma3_5,
        Claim::Lemma4_3,
        Claim::LemmaB_2,
        Claim::LemmaB_3,
        Claim::LemmaC_PushUpProposals,
        Claim::LemmaC_2,
        Claim::PropC_1,
        Claim::PropA_1_Lattice,
        Claim::StrategyproofnessMen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Claim::Thm4_1 => "thm-4-1",
            Claim::Cor4_2 => "cor-4-2",
            Claim::Thm4_5 => "thm-4-5",
            Claim::Thm4_9 => "thm-4-9",
            Claim::ThmD_3 => "thm-d-3",
            Claim::Prop3_2 => "prop-3-2",
            Claim::Prop3_3 => "prop-3-3",
            Claim::Prop3_4 => "prop-3-4",
            Claim::Lemma3_5 => "lemma-3-5",
            Claim::Lemma4_3 => "lemma-4-3",
            Claim::LemmaB_2 => "lemma-b-2",
            Claim::LemmaB_3 => "lemma-b-3",
            Claim::LemmaC_PushUpProposals => "lemma-c-push-up-proposals",
            Claim::LemmaC_2 => "lemma-c-2",
            Claim::PropC_1 => "prop-c-1",
            Claim::PropA_1_Lattice => "prop-a-1-lattice",
            Claim::StrategyproofnessMen => "strategyproofness-men",
        }
    }

    /// Largest instance the claim's machinery supports (factorial search and
    /// stable-set enumeration bound the small ones).
    pub fn size_cap(self) -> usize {
        match self {
            Claim::Thm4_5 | Claim::Thm4_9 | Claim::ThmD_3 | Claim::StrategyproofnessMen => 7,
            Claim::Thm4_1 | Claim::Prop3_2 | Claim::PropA_1_Lattice => 9,
            _ => 64,
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Claim {
    type Err = UnknownClaim;

    fn from_str(s: &str) -> Result<Self, UnknownClaim> {
        Claim::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| UnknownClaim(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown claim `{0}`")]
pub struct UnknownClaim(pub String);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    pub trials: u64,
    pub n_range: RangeInclusive<usize>,
    pub seed: u64,
    /// Enumerate the full profile space instead of sampling (n <= 3 only).
    pub exhaustive: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            trials: 500,
            n_range: 3..=6,
            seed: 7,
            exhaustive: false,
        }
    }
}

/// A failing instance, reproducible from its embedded seed. The profile is
/// stored in the standard text format; `sidecar` holds claim-specific detail
/// (sets, misreports, matchings) as JSON with 1-indexed agents.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub trial: u64,
    pub trial_seed: u64,
    pub profile_text: String,
    pub sidecar: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub claim: Claim,
    /// Instances processed (sampled, or the full space when exhaustive).
    pub trials: u64,
    /// Checks whose precondition was satisfied.
    pub condition_met: u64,
    pub failures: u64,
    pub first_counterexample: Option<Counterexample>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: trials={} condition_met={} failures={}",
            self.claim, self.trials, self.condition_met, self.failures
        )
    }
}

/// Runs `claim` over seeded random instances (or over every profile of each
/// size when `exhaustive` is set). Reports are deterministic in the config;
/// trials run in parallel with per-trial derived seeds.
pub fn verify_claim(claim: Claim, config: &VerifyConfig) -> Result<OracleReport, OracleError> {
    let max_n = *config.n_range.end();
    if max_n > claim.size_cap() {
        return Err(OracleError::InstanceTooLarge {
            n: max_n,
            cap: claim.size_cap(),
        });
    }
    if config.exhaustive {
        return verify_exhaustive(claim, config);
    }
    let outcomes: Vec<CheckStats> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = derive_seed(config.seed, &[claim as u64, trial]);
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
            let n = rng.gen_range(config.n_range.clone());
            let profile = random_profile_for_oracle(n, &mut rng);
            let mut picker = Picker::Random(&mut rng);
            let mut stats = check_claim(claim, &profile, &mut picker);
            stats.attach_context(trial, trial_seed, &profile);
            stats
        })
        .collect();
    Ok(fold_stats(claim, outcomes, config.trials))
}

fn verify_exhaustive(claim: Claim, config: &VerifyConfig) -> Result<OracleReport, OracleError> {
    let mut all = Vec::new();
    let mut trials = 0u64;
    for n in config.n_range.clone() {
        if n > 3 {
            return Err(OracleError::ExhaustiveTooLarge(n));
        }
        for_each_profile(n, |index, profile| {
            let mut picker = Picker::Exhaustive;
            let mut stats = check_claim(claim, profile, &mut picker);
            stats.attach_context(trials + index, config.seed, profile);
            all.push(stats);
        });
        let perms = factorial(n) as u64;
        trials += perms.pow(2 * n as u32);
    }
    Ok(fold_stats(claim, all, trials))
}

fn factorial(n: usize) -> usize {
    (1..=n).product::<usize>().max(1)
}

/// Visits every profile of size `n` (all `(n!)^(2n)` of them).
fn for_each_profile(n: usize, mut f: impl FnMut(u64, &PreferenceProfile)) {
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let k = perms.len();
    let mut digits = vec![0usize; 2 * n];
    let mut index = 0u64;
    loop {
        let men: Vec<Vec<usize>> = (0..n).map(|i| perms[digits[i]].clone()).collect();
        let women: Vec<Vec<usize>> = (0..n).map(|i| perms[digits[n + i]].clone()).collect();
        f(
            index,
            &PreferenceProfile::new(men, women).expect("permutations"),
        );
        index += 1;
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                return;
            }
            digits[pos] += 1;
            if digits[pos] < k {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

fn random_profile_for_oracle(n: usize, rng: &mut ChaCha8Rng) -> PreferenceProfile {
    let side = |rng: &mut ChaCha8Rng| -> Vec<Vec<usize>> {
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
    PreferenceProfile::new(men, women).expect("permutations")
}

/// Subset / permutation source: one random draw per call, or the full space.
enum Picker<'a> {
    Random(&'a mut ChaCha8Rng),
    Exhaustive,
}

impl Picker<'_> {
    fn subsets(&mut self, ground: &[usize]) -> Vec<Vec<usize>> {
        match self {
            Picker::Random(rng) => {
                vec![ground
                    .iter()
                    .copied()
                    .filter(|_| rng.gen_bool(0.5))
                    .collect()]
            }
            Picker::Exhaustive => all_subsets(ground),
        }
    }

    fn nonempty_subsets(&mut self, ground: &[usize]) -> Vec<Vec<usize>> {
        if ground.is_empty() {
            return Vec::new();
        }
        match self {
            Picker::Random(rng) => {
                let mut set: Vec<usize> = ground
                    .iter()
                    .copied()
                    .filter(|_| rng.gen_bool(0.5))
                    .collect();
                if set.is_empty() {
                    set.push(*ground.choose(*rng).expect("nonempty ground set"));
                }
                vec![set]
            }
            Picker::Exhaustive => all_subsets(ground)
                .into_iter()
                .filter(|s| !s.is_empty())
                .collect(),
        }
    }

    fn permutations(&mut self, n: usize) -> Vec<Vec<usize>> {
        match self {
            Picker::Random(rng) => {
                let mut list: Vec<usize> = (0..n).collect();
                list.shuffle(*rng);
                vec![list]
            }
            Picker::Exhaustive => (0..n).permutations(n).collect(),
        }
    }

    fn shuffled(&mut self, part: &[usize]) -> Vec<usize> {
        match self {
            Picker::Random(rng) => {
                let mut part = part.to_vec();
                part.shuffle(*rng);
                part
            }
            // The exhaustive pass relies on subset enumeration elsewhere;
            // reversing is enough to exercise a nontrivial permutation.
            Picker::Exhaustive => part.iter().rev().copied().collect(),
        }
    }

    /// Random mode: a subset biased to contain a woman who prefers `m` over
    /// her partner, so that matching-changing push ups are actually sampled.
    fn biased_subsets(&mut self, ground: &[usize], preferring: &[usize]) -> Vec<Vec<usize>> {
        match self {
            Picker::Random(rng) => {
                let mut set: Vec<usize> = ground
                    .iter()
                    .copied()
                    .filter(|_| rng.gen_bool(0.5))
                    .collect();
                if !preferring.is_empty() && rng.gen_bool(0.5) {
                    let pick = *preferring.choose(*rng).expect("nonempty");
                    if !set.contains(&pick) {
                        set.push(pick);
                    }
                }
                vec![set]
            }
            Picker::Exhaustive => all_subsets(ground),
        }
    }
}

fn all_subsets(ground: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(1 << ground.len());
    for mask in 0u32..(1 << ground.len()) {
        out.push(
            ground
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask & (1 << i) != 0)
                .map(|(_, &x)| x)
                .collect(),
        );
    }
    out
}

#[derive(Default)]
struct CheckStats {
    met: u64,
    failures: u64,
    first_failure: Option<Counterexample>,
    pending_detail: Option<serde_json::Value>,
}

impl CheckStats {
    fn pass(&mut self) {
        self.met += 1;
    }

    fn fail(&mut self, detail: serde_json::Value) {
        self.met += 1;
        self.failures += 1;
        if self.pending_detail.is_none() {
            self.pending_detail = Some(detail);
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> serde_json::Value) {
        if ok {
            self.pass();
        } else {
            self.fail(detail());
        }
    }

    fn attach_context(&mut self, trial: u64, trial_seed: u64, profile: &PreferenceProfile) {
        if let Some(detail) = self.pending_detail.take() {
            self.first_failure = Some(Counterexample {
                trial,
                trial_seed,
                profile_text: profile.to_text(),
                sidecar: detail,
            });
        }
    }
}

fn fold_stats(claim: Claim, outcomes: Vec<CheckStats>, trials: u64) -> OracleReport {
    let mut report = OracleReport {
        claim,
        trials,
        condition_met: 0,
        failures: 0,
        first_counterexample: None,
    };
    for stats in outcomes {
        report.condition_met += stats.met;
        report.failures += stats.failures;
        if report.first_counterexample.is_none() {
            report.first_counterexample = stats.first_failure;
        }
    }
    report
}

fn plus1(list: &[usize]) -> Vec<usize> {
    list.iter().map(|&x| x + 1).collect()
}

fn matching_json(mu: &Matching) -> serde_json::Value {
    json!(plus1(mu.man_to_woman()))
}

/// Dispatches one profile through the claim's property check.
fn check_claim(claim: Claim, p: &PreferenceProfile, picker: &mut Picker) -> CheckStats {
    let mut stats = CheckStats::default();
    let n = p.n();
    let (mu0, trace0) = run_da(p);
    let split_of = |m: usize| p.split_at(m, mu0.woman_of(m)).expect("valid indices");

    match claim {
        Claim::Thm4_1 => {
            let truth_set = enumerate_stable_with_cap(p, 9).expect("size checked by caller");
            for m in 0..n {
                let split = split_of(m);
                for x_set in picker.subsets(&split.below) {
                    let list = split.push_up(&x_set).expect("x below pivot");
                    let q = p.with_man_list(m, list.clone()).expect("permutation");
                    let (mu1, _) = run_da(&q);
                    if mu1.woman_of(m) != mu0.woman_of(m) {
                        continue; // with regret; out of scope for this claim
                    }
                    let manip_set = enumerate_stable_with_cap(&q, 9).expect("size checked");
                    stats.check(manip_set.is_subset_of(&truth_set), || {
                        json!({
                            "claim": claim.name(),
                            "man": m + 1,
                            "pushed_up": plus1(&x_set),
                            "misreport": plus1(&list),
                            "note": "stable set of the manipulated profile escapes the true stable set",
                        })
                    });
                }
            }
        }
        Claim::Cor4_2 => {
            for m in 0..n {
                let split = split_of(m);
                for x_set in picker.subsets(&split.below) {
                    let list = split.push_up(&x_set).expect("x below pivot");
                    let mu1 = da_man_override(p, m, &list);
                    if mu1.woman_of(m) != mu0.woman_of(m) {
                        continue;
                    }
                    let women_ok = (0..n)
                        .all(|w| p.woman_rank(w, mu1.man_of(w)) <= p.woman_rank(w, mu0.man_of(w)));
                    let men_ok = (0..n)
                        .all(|i| p.man_rank(i, mu0.woman_of(i)) <= p.man_rank(i, mu1.woman_of(i)));
                    stats.check(women_ok && men_ok, || {
                        json!({
                            "claim": claim.name(),
                            "man": m + 1,
                            "pushed_up": plus1(&x_set),
                            "true_matching": matching_json(&mu0),
                            "manipulated_matching": matching_json(&mu1),
                        })
                    });
                }
            }
        }
        Claim::Thm4_5 | Claim::Thm4_9 | Claim::ThmD_3 => {
            exhaustive_vs_single_promotion(claim, p, &mu0, &mut stats);
        }
        Claim::Prop3_2 => {
            for m in 0..n {
                for list in picker.permutations(n) {
                    let q = p.with_man_list(m, list.clone()).expect("permutation");
                    let manip_set = enumerate_stable_with_cap(&q, 9).expect("size checked");
                    let bad = manip_set.iter().find(|mu| !is_m_stable(mu, p, m)).cloned();
                    stats.check(bad.is_none(), || {
                        json!({
                            "claim": claim.name(),
                            "man": m + 1,
                            "misreport": plus1(&list),
                            "stable_under_misreport_but_not_m_stable":
                                bad.as_ref().map(matching_json),
                        })
                    });
                }
            }
        }
        Claim::Prop3_3 => {
            for m in 0..n {
                let split = split_of(m);
                let mut list = picker.shuffled(&split.above);
                list.push(split.pivot);
                list.extend(picker.shuffled(&split.below));
                let mu1 = da_man_override(p, m, &list);
                stats.check(mu1 == mu0, || {
                    json!({
                        "claim": claim.name(),
                        "man": m + 1,
                        "misreport": plus1(&list),
                        "true_matching": matching_json(&mu0),
                        "manipulated_matching": matching_json(&mu1),
                    })
                });
            }
        }
        Claim::Prop3_4 | Claim::Lemma3_5 => {
            for m in 0..n {
                let split = split_of(m);
                for y_set in picker.subsets(&split.above) {
                    let list = split.push_down(&y_set).expect("y above pivot");
                    let mu1 = da_man_override(p, m, &list);
                    let ok = match claim {
                        Claim::Prop3_4 => {
                            mu1.woman_of(m) == mu0.woman_of(m)
                                && (0..n).all(|i| {
                                    p.man_rank(i, mu1.woman_of(i)) <= p.man_rank(i, mu0.woman_of(i))
                                })
                        }
                        _ => (0..n).all(|w| {
                            p.woman_rank(w, mu0.man_of(w)) <= p.woman_rank(w, mu1.man_of(w))
                        }),
                    };
                    stats.check(ok, || {
                        json!({
                            "claim": claim.name(),
                            "man": m + 1,
                            "pushed_down": plus1(&y_set),
                            "true_matching": matching_json(&mu0),
                            "manipulated_matching": matching_json(&mu1),
                        })
                    });
                }
            }
        }
        Claim::Lemma4_3 => {
            for m in 0..n {
                let split = split_of(m);
                for x_set in picker.subsets(&split.below) {
                    let up_list = split.push_up(&x_set).expect("x below pivot");
                    let pivot_pos = up_list
                        .iter()
                        .position(|&w| w == split.pivot)
                        .expect("pivot");
                    let up_split = SplitPreference {
                        above: up_list[..pivot_pos].to_vec(),
                        pivot: split.pivot,
                        below: up_list[pivot_pos + 1..].to_vec(),
                    };
                    for y_set in picker.subsets(&split.above) {
                        let both_list = up_split.push_down(&y_set).expect("y above pivot");
                        let mu_up = da_man_override(p, m, &up_list);
                        let mu_both = da_man_override(p, m, &both_list);
                        for w in 0..n {
                            if p.woman_rank(w, mu_both.man_of(w)) < p.woman_rank(w, mu0.man_of(w)) {
                                stats.check(mu_both.man_of(w) == mu_up.man_of(w), || {
                                    json!({
                                        "claim": claim.name(),
                                        "man": m + 1,
                                        "woman": w + 1,
                                        "pushed_up": plus1(&x_set),
                                        "pushed_down": plus1(&y_set),
                                        "push_up_only_matching": matching_json(&mu_up),
                                        "combined_matching": matching_json(&mu_both),
                                    })
                                });
                            }
                        }
                    }
                }
            }
        }
        Claim::LemmaB_2 => {
            for m in 0..n {
                let split = split_of(m);
                for x_set in picker.nonempty_subsets(&split.below) {
                    let list = split.push_up(&x_set).expect("x below pivot");
                    let mu1 = da_man_override(p, m, &list);
                    if mu1.woman_of(m) == mu0.woman_of(m) {
                        continue; // no regret; out of scope
                    }
                    stats.check(x_set.contains(&mu1.woman_of(m)), || {
                        json!({
                            "claim": claim.name(),
                            "man": m + 1,
                            "pushed_up": plus1(&x_set),
                            "new_partner": mu1.woman_of(m) + 1,
                        })
                    });
                }
            }
        }
        Claim::LemmaB_3 => {
            for m in 0..n {
                let split = split_of(m);
                for x_set in picker.nonempty_subsets(&split.below) {
                    let list = split.push_up(&x_set).expect("x below pivot");
                    let (_, trace_set) = da_with_misreport(p, m, &list).expect("permutation");
                    let mut union: HashSet<(usize, usize)> = HashSet::new();
                    for &x in &x_set {
                        let single = split.promote_above_pivot(x).expect("x below pivot");
                        let (_, t) = da_with_misreport(p, m, &single).expect("permutation");
                        union.extend(t.iter());
                    }
                    let missing = trace_set.iter().find(|proposal| !union.contains(proposal));
                    stats.check(missing.is_none(), || {
                        json!({
                            "claim": claim.name(),
                            "man": m + 1,
                            "pushed_up": plus1(&x_set),
                            "uncovered_proposal": missing.map(|(a, b)| (a + 1, b + 1)),
                        })
                    });
                }
            }
        }
        Claim::LemmaC_PushUpProposals => {
            let base: HashSet<(usize, usize)> = trace0.to_set();
            for m in 0..n {
                let split = split_of(m);
                for x_set in picker.subsets(&split.below) {
                    let list = split.push_up(&x_set).expect("x below pivot");
                    let (mu1, trace1) = da_with_misreport(p, m, &list).expect("permutation");
                    if mu1.woman_of(m) != mu0.woman_of(m) {
                        continue;
                    }
                    let manip: HashSet<(usize, usize)> = trace1.to_set();
                    let missing = base.iter().find(|proposal| !manip.contains(proposal));
                    stats.check(missing.is_none(), || {
                        json!({
                            "claim": claim.name(),
                            "man": m + 1,
                            "pushed_up": plus1(&x_set),
                            "missing_proposal": missing.map(|&(a, b)| (a + 1, b + 1)),
                        })
                    });
                }
            }
        }
        Claim::LemmaC_2 => {
            for m in 0..n {
                let split = split_of(m);
                let timid: Vec<usize> = split
                    .below
                    .iter()
                    .copied()
                    .filter(|&x| p.woman_prefers(x, mu0.man_of(x), m))
                    .collect();
                for x_set in picker.nonempty_subsets(&timid) {
                    let list = split.push_up(&x_set).expect("x below pivot");
                    let mu1 = da_man_override(p, m, &list);
                    if mu1.woman_of(m) != mu0.woman_of(m) {
                        continue;
                    }
                    stats.check(mu1 == mu0, || {
                        json!({
                            "claim": claim.name(),
                            "man": m + 1,
                            "pushed_up": plus1(&x_set),
                            "true_matching": matching_json(&mu0),
                            "manipulated_matching": matching_json(&mu1),
                        })
                    });
                }
            }
        }
        Claim::PropC_1 => {
            for m in 0..n {
                let split = split_of(m);
                let eager: Vec<usize> = split
                    .below
                    .iter()
                    .copied()
                    .filter(|&x| p.woman_prefers(x, m, mu0.man_of(x)))
                    .collect();
                for x_set in picker.biased_subsets(&split.below, &eager) {
                    let list = split.push_up(&x_set).expect("x below pivot");
                    let mu1 = da_man_override(p, m, &list);
                    if mu1.woman_of(m) != mu0.woman_of(m) || mu1 == mu0 {
                        continue;
                    }
                    let improved = (0..n)
                        .filter(|&w| {
                            p.woman_rank(w, mu1.man_of(w)) < p.woman_rank(w, mu0.man_of(w))
                        })
                        .count();
                    let worsened = (0..n)
                        .filter(|&i| {
                            p.man_rank(i, mu1.woman_of(i)) > p.man_rank(i, mu0.woman_of(i))
                        })
                        .count();
                    stats.check(improved >= 2 && worsened >= 2, || {
                        json!({
                            "claim": claim.name(),
                            "man": m + 1,
                            "pushed_up": plus1(&x_set),
                            "women_improved": improved,
                            "men_worsened": worsened,
                        })
                    });
                }
            }
        }
        Claim::PropA_1_Lattice => {
            let set = enumerate_stable_with_cap(p, 9).expect("size checked by caller");
            let matchings: Vec<&Matching> = set.iter().collect();
            for (i, a) in matchings.iter().enumerate() {
                for b in &matchings[i..] {
                    let closed = [meet(a, b, p), join(a, b, p)].into_iter().all(|r| {
                        r.map(|mu| set.contains(&mu) && is_stable(&mu, p))
                            .unwrap_or(false)
                    });
                    stats.check(closed, || {
                        json!({
                            "claim": claim.name(),
                            "first": matching_json(a),
                            "second": matching_json(b),
                        })
                    });
                }
            }
        }
        Claim::StrategyproofnessMen => {
            for m in 0..n {
                let own_rank = p.man_rank(m, mu0.woman_of(m));
                let mut violation: Option<Vec<usize>> = None;
                for list in (0..n).permutations(n) {
                    let mu1 = da_man_override(p, m, &list);
                    if p.man_rank(m, mu1.woman_of(m)) < own_rank {
                        violation = Some(list);
                        break;
                    }
                }
                stats.check(violation.is_none(), || {
                    json!({
                        "claim": claim.name(),
                        "man": m + 1,
                        "improving_misreport": violation.as_deref().map(plus1),
                    })
                });
            }
        }
    }
    stats
}

/// Shared body of the inconspicuousness claims: for every (accomplice, woman)
/// pair compare the full `n!` misreport space against the single-promotion
/// candidates.
fn exhaustive_vs_single_promotion(
    claim: Claim,
    p: &PreferenceProfile,
    mu0: &Matching,
    stats: &mut CheckStats,
) {
    let n = p.n();
    let all: Vec<Vec<Matching>> = (0..n)
        .map(|m| {
            (0..n)
                .permutations(n)
                .map(|list| da_man_override(p, m, &list))
                .collect()
        })
        .collect();
    for (m, full_space) in all.iter().enumerate() {
        let split = p.split_at(m, mu0.woman_of(m)).expect("valid indices");
        let candidates: Vec<Matching> = split
            .below
            .iter()
            .map(|&x| da_man_override(p, m, &split.promote_above_pivot(x).expect("below pivot")))
            .collect();
        let own = mu0.woman_of(m);
        for w in 0..n {
            let truth_rank = p.woman_rank(w, mu0.man_of(w));
            match claim {
                Claim::Thm4_5 | Claim::Thm4_9 => {
                    let no_regret_only = claim == Claim::Thm4_5;
                    let best = |set: &[Matching]| {
                        set.iter()
                            .filter(|mu| !no_regret_only || mu.woman_of(m) == own)
                            .map(|mu| p.woman_rank(w, mu.man_of(w)))
                            .chain(std::iter::once(truth_rank))
                            .min()
                            .expect("truth included")
                    };
                    let exhaustive = best(full_space);
                    let inconspicuous = best(&candidates);
                    stats.check(exhaustive == inconspicuous, || {
                        json!({
                            "claim": claim.name(),
                            "accomplice": m + 1,
                            "woman": w + 1,
                            "exhaustive_best_rank": exhaustive,
                            "single_promotion_best_rank": inconspicuous,
                        })
                    });
                }
                _ => {
                    // Thm D.3: every strictly-improving match reachable by a
                    // full misreport is reachable by a single promotion, in
                    // both the unconstrained and the no-regret space.
                    let improving = |set: &[Matching], no_regret: bool| -> HashSet<usize> {
                        set.iter()
                            .filter(|mu| !no_regret || mu.woman_of(m) == own)
                            .map(|mu| mu.man_of(w))
                            .filter(|&partner| p.woman_rank(w, partner) < truth_rank)
                            .collect()
                    };
                    let ok = [false, true]
                        .into_iter()
                        .all(|nr| improving(full_space, nr).is_subset(&improving(&candidates, nr)));
                    stats.check(ok, || {
                        json!({
                            "claim": claim.name(),
                            "accomplice": m + 1,
                            "woman": w + 1,
                            "note": "a beneficial match is unreachable by single promotion",
                        })
                    });
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INTRO: &str = include_str!("../tests/fixtures/intro.txt");
    const WITH_REGRET: &str = include_str!("../tests/fixtures/with_regret.txt");
    const SELF_BEATS: &str = include_str!("../tests/fixtures/self_beats_accomplice.txt");

    #[test]
    fn exhaustive_intro_no_regret() {
        // Over all 4! lists of m1, the best no-regret match for w1 is m3.
        let p = PreferenceProfile::parse(INTRO).unwrap();
        let best =
            exhaustive_best_manipulation(&p, Agent::Man(0), 0, SearchMode::NoRegret).unwrap();
        assert_eq!(best.best_partner, 2);
        assert_eq!(best.best_rank, 1);
        assert_eq!(best.witness_regret, 0);
        // With regret allowed m1 still cannot get w1 anyone better than m3.
        let best =
            exhaustive_best_manipulation(&p, Agent::Man(0), 0, SearchMode::WithRegret).unwrap();
        assert_eq!(best.best_partner, 2);
    }

    #[test]
    fn exhaustive_with_regret_example() {
        let p = PreferenceProfile::parse(WITH_REGRET).unwrap();
        let best =
            exhaustive_best_manipulation(&p, Agent::Man(0), 0, SearchMode::WithRegret).unwrap();
        assert_eq!(best.best_partner, 0);
        assert_eq!(best.best_rank, 0);
        assert_eq!(best.witness_regret, 1);
        // No-regret tops out at m2 (her best stable partner).
        let best =
            exhaustive_best_manipulation(&p, Agent::Man(0), 0, SearchMode::NoRegret).unwrap();
        assert_eq!(best.best_partner, 1);
    }

    #[test]
    fn exhaustive_self_search() {
        let p = PreferenceProfile::parse(SELF_BEATS).unwrap();
        let best =
            exhaustive_best_manipulation(&p, Agent::Woman(0), 0, SearchMode::SelfManipulation)
                .unwrap();
        assert_eq!(best.best_partner, 0);
        assert_eq!(best.best_rank, 0);
    }

    #[test]
    fn truth_is_the_floor_when_no_misreport_helps() {
        // In the intro example no accomplice helps w2 (she is matched with m4,
        // her top choice): the search returns her current partner.
        let p = PreferenceProfile::parse(INTRO).unwrap();
        let best =
            exhaustive_best_manipulation(&p, Agent::Man(1), 1, SearchMode::NoRegret).unwrap();
        assert_eq!(best.best_rank, 0);
    }

    #[test]
    fn size_cap_is_enforced() {
        let lists: Vec<Vec<usize>> = (0..8).map(|_| (0..8).collect()).collect();
        let p = PreferenceProfile::new(lists.clone(), lists).unwrap();
        assert!(matches!(
            exhaustive_best_manipulation(&p, Agent::Man(0), 0, SearchMode::NoRegret),
            Err(OracleError::InstanceTooLarge { .. })
        ));
        let config = VerifyConfig {
            n_range: 3..=8,
            ..VerifyConfig::default()
        };
        assert!(matches!(
            verify_claim(Claim::Thm4_5, &config),
            Err(OracleError::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn claim_names_round_trip() {
        for claim in Claim::ALL {
            assert_eq!(claim.name().parse::<Claim>().unwrap(), claim);
        }
        assert!("thm-9-9".parse::<Claim>().is_err());
    }

    #[test]
    fn reports_are_deterministic() {
        let config = VerifyConfig {
            trials: 40,
            n_range: 3..=5,
            seed: 11,
            exhaustive: false,
        };
        let a = verify_claim(Claim::PropC_1, &config).unwrap();
        let b = verify_claim(Claim::PropC_1, &config).unwrap();
        assert_eq!(a, b);
        assert!(a.passed());
    }

    #[test]
    fn quick_claim_smoke() {
        // Small-trial runs of every claim; the acceptance suite runs the
        // full-size versions.
        for claim in Claim::ALL {
            let config = VerifyConfig {
                trials: 12,
                n_range: 3..=4.min(claim.size_cap()),
                seed: 3,
                exhaustive: false,
            };
            let report = verify_claim(claim, &config).unwrap();
            assert!(report.passed(), "{claim}: {report}");
            assert_eq!(report.trials, 12);
        }
    }

    #[test]
    fn strategyproofness_holds_on_every_n3_profile() {
        // Full enumeration: all (3!)^6 profiles, all misreports of every man.
        let config = VerifyConfig {
            trials: 0,
            n_range: 3..=3,
            seed: 0,
            exhaustive: true,
        };
        let report = verify_claim(Claim::StrategyproofnessMen, &config).unwrap();
        assert_eq!(report.trials, 46656);
        assert_eq!(report.condition_met, 3 * 46656);
        assert!(report.passed());
    }

    #[test]
    fn exhaustive_mode_covers_the_whole_space_at_n2() {
        let config = VerifyConfig {
            trials: 0,
            n_range: 2..=2,
            seed: 0,
            exhaustive: true,
        };
        let report = verify_claim(Claim::StrategyproofnessMen, &config).unwrap();
        assert_eq!(report.trials, 16); // (2!)^4 profiles
        assert!(report.passed());
        let config = VerifyConfig {
            n_range: 4..=4,
            exhaustive: true,
            ..VerifyConfig::default()
        };
        assert!(matches!(
            verify_claim(Claim::StrategyproofnessMen, &config),
            Err(OracleError::ExhaustiveTooLarge(4))
        ));
    }
}
