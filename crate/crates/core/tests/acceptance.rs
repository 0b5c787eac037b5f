//! Acceptance suite: one test per gating criterion, each printing a
//! `[PASS] criterion N` line (visible with `cargo test --test acceptance --
//! --nocapture`). Worked-example regressions are bit-exact; the statistical
//! checks pin the documented seeds and tolerance brackets.

use matchaudit::da::{da_with_misreport, run_da, run_da_women_proposing};
use matchaudit::experiments::{
    random_profile, run_experiment, Experiment, ExperimentConfig, ExperimentReport,
};
use matchaudit::manipulation::{
    best_accomplice, optimal_accomplice_no_regret, optimal_accomplice_with_regret, optimal_self,
    AccompliceMode,
};
use matchaudit::model::PreferenceProfile;
use matchaudit::oracle::{
    exhaustive_best_manipulation, verify_claim, Agent, Claim, SearchMode, VerifyConfig,
};
use matchaudit::stability::blocking_pairs;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

const INTRO: &str = include_str!("fixtures/intro.txt");
const UNSTABLE_NR: &str = include_str!("fixtures/unstable_no_regret.txt");
const WITH_REGRET: &str = include_str!("fixtures/with_regret.txt");
const SELF_BEATS: &str = include_str!("fixtures/self_beats_accomplice.txt");

fn profile(text: &str) -> PreferenceProfile {
    PreferenceProfile::parse(text).unwrap()
}

fn experiment_config(
    experiment: Experiment,
    n_values: Vec<usize>,
    trials: u64,
    seed: u64,
) -> ExperimentConfig {
    let mut config = ExperimentConfig::new(experiment, n_values);
    config.trials = trials;
    config.seed = seed;
    config
}

fn metric(report: &ExperimentReport, n: usize, name: &str) -> f64 {
    report
        .rows
        .iter()
        .find(|r| r.n == n && r.metric == name)
        .unwrap_or_else(|| panic!("metric {name} at n={n} missing"))
        .value
        .as_f64()
}

#[test]
fn criterion_1_worked_example_regressions() {
    let started = Instant::now();

    // Intro example: DA matching and the no-regret accomplice outcome.
    let intro = profile(INTRO);
    let (mu, _) = run_da(&intro);
    assert_eq!(mu.man_to_woman(), &[2, 0, 3, 1]);
    let r = best_accomplice(&intro, 0, &[0, 1, 2, 3], AccompliceMode::NoRegret).unwrap();
    assert_eq!(r.outcome.man_of(0), 2, "w1 must improve from m2 to m3");
    let direct = optimal_accomplice_no_regret(&intro, 0, 0);
    assert_eq!(direct.outcome.man_of(0), 2);
    assert_eq!(direct.regret, 0);

    // Unstable-no-regret example: both optimal lists for m3.
    let ex41 = profile(UNSTABLE_NR);
    let (mu, _) = run_da(&ex41);
    assert_eq!(mu.man_to_woman(), &[0, 1, 2, 3, 4]);
    let (star, _) = da_with_misreport(&ex41, 2, &[3, 2, 0, 1, 4]).unwrap();
    assert_eq!(star.man_to_woman(), &[1, 0, 2, 4, 3]);
    assert_eq!(star.man_of(3), 4, "w4 reaches her top choice m5");
    assert_eq!(blocking_pairs(&star, &ex41).unwrap(), vec![(2, 0)]);
    let (dagger, _) = da_with_misreport(&ex41, 2, &[3, 0, 2, 1, 4]).unwrap();
    assert_eq!(dagger.man_to_woman(), &[0, 1, 2, 4, 3]);
    assert!(blocking_pairs(&dagger, &ex41).unwrap().is_empty());
    let r = optimal_accomplice_no_regret(&ex41, 2, 3);
    assert_eq!(r.outcome.man_of(3), 4);
    assert_eq!(r.regret, 0);

    // With-regret example: no-regret vs with-regret optima for (m1, w1).
    let ex42 = profile(WITH_REGRET);
    let (mu, _) = run_da(&ex42);
    assert_eq!(mu.man_to_woman(), &[3, 1, 0, 4, 2]);
    assert_eq!(run_da_women_proposing(&ex42).man_of(0), 1);
    let nr = optimal_accomplice_no_regret(&ex42, 0, 0);
    assert_eq!(nr.outcome.man_of(0), 1, "no-regret optimum is m2");
    let wr = optimal_accomplice_with_regret(&ex42, 0, 0);
    assert_eq!(wr.outcome.man_of(0), 0, "with-regret optimum is m1");
    assert_eq!(wr.regret, 1);
    assert!(blocking_pairs(&wr.outcome, &ex42)
        .unwrap()
        .contains(&(0, 3)));
    assert!(!wr.outcome_stable_wrt_truth && wr.outcome_m_stable_wrt_truth);

    // Self-beats-accomplice example: w1 reaches m1 on her own, while every
    // accomplice's optimum is truth-telling.
    let a1 = profile(SELF_BEATS);
    let r = optimal_self(&a1, 0);
    assert_eq!(r.outcome.man_of(0), 0);
    for m in 0..4 {
        let r = optimal_accomplice_no_regret(&a1, m, 0);
        assert_eq!(r.improvement, 0);
        assert_eq!(r.promoted_agent, None);
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1 s");
    println!("[PASS] criterion 1: worked-example regressions ({elapsed:?})");
}

#[test]
fn criterion_2_fraction_women_at_n8() {
    let started = Instant::now();
    let config = experiment_config(Experiment::FractionWomen, vec![8], 1000, 42);
    let report = run_experiment(&config).unwrap();
    let self_frac = metric(&report, 8, "self_fraction");
    let acc_frac = metric(&report, 8, "accomplice_fraction");
    assert!(
        (0.028..=0.057).contains(&self_frac),
        "self fraction {self_frac} outside [0.028, 0.057]"
    );
    assert!(
        (0.085..=0.115).contains(&acc_frac),
        "accomplice fraction {acc_frac} outside [0.085, 0.115]"
    );
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "took {elapsed:?}, budget 30 s"
    );
    println!(
        "[PASS] criterion 2: n=8 fractions self={self_frac:.4} accomplice={acc_frac:.4} ({elapsed:?})"
    );
}

#[test]
fn criterion_3_accomplice_dominance_across_sizes() {
    let started = Instant::now();
    let config = experiment_config(Experiment::FractionWomen, vec![8, 16, 24], 1000, 42);
    let report = run_experiment(&config).unwrap();
    for n in [8, 16, 24] {
        let self_frac = metric(&report, n, "self_fraction");
        let acc_frac = metric(&report, n, "accomplice_fraction");
        assert!(
            acc_frac >= 1.8 * self_frac,
            "n={n}: accomplice {acc_frac} < 1.8 * self {self_frac}"
        );
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 300.0,
        "took {elapsed:?}, budget 5 min"
    );
    println!(
        "[PASS] criterion 3: accomplice fraction >= 1.8x self at n in {{8,16,24}} ({elapsed:?})"
    );
}

#[test]
fn criterion_4_women_benefit_histogram_at_n20() {
    let started = Instant::now();
    let config = experiment_config(Experiment::WomenBenefitTable, vec![20], 1000, 42);
    let report = run_experiment(&config).unwrap();
    let exactly_one = metric(&report, 20, "accomplice_count_1");
    assert_eq!(
        exactly_one, 0.0,
        "exactly-one-benefiting bin must be structurally zero"
    );
    let acc_zero = metric(&report, 20, "accomplice_count_0") / 1000.0;
    let self_zero = metric(&report, 20, "self_count_0") / 1000.0;
    assert!(
        (acc_zero - 0.307).abs() <= 0.05,
        "accomplice zero-benefit bin {acc_zero} not within 0.05 of 0.307"
    );
    assert!(
        (self_zero - 0.411).abs() <= 0.05,
        "self zero-benefit bin {self_zero} not within 0.05 of 0.411"
    );
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 180.0,
        "took {elapsed:?}, budget 3 min"
    );
    println!(
        "[PASS] criterion 4: n=20 histogram bins acc0={acc_zero:.3} self0={self_zero:.3} one-bin=0 ({elapsed:?})"
    );
}

#[test]
fn criterion_5_solvers_match_exhaustive_oracle() {
    let started = Instant::now();
    let mut checked = 0u64;
    for n in [3usize, 4, 5] {
        for trial in 0..200u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(0xACCE5 + trial * 31 + n as u64);
            let p = random_profile(n, &mut rng);
            for m in 0..n {
                for w in 0..n {
                    let nr = optimal_accomplice_no_regret(&p, m, w);
                    let ex =
                        exhaustive_best_manipulation(&p, Agent::Man(m), w, SearchMode::NoRegret)
                            .unwrap();
                    assert_eq!(
                        p.woman_rank(w, nr.outcome.man_of(w)),
                        ex.best_rank,
                        "no-regret gap at n={n} trial={trial} m={m} w={w}\n{}",
                        p.to_text()
                    );
                    let wr = optimal_accomplice_with_regret(&p, m, w);
                    let ex =
                        exhaustive_best_manipulation(&p, Agent::Man(m), w, SearchMode::WithRegret)
                            .unwrap();
                    assert_eq!(
                        p.woman_rank(w, wr.outcome.man_of(w)),
                        ex.best_rank,
                        "with-regret gap at n={n} trial={trial} m={m} w={w}\n{}",
                        p.to_text()
                    );
                    checked += 2;
                }
                // The self solver is held to the same exhaustive standard.
                let sf = optimal_self(&p, m);
                let ex = exhaustive_best_manipulation(
                    &p,
                    Agent::Woman(m),
                    m,
                    SearchMode::SelfManipulation,
                )
                .unwrap();
                assert_eq!(
                    p.woman_rank(m, sf.outcome.man_of(m)),
                    ex.best_rank,
                    "self gap at n={n} trial={trial} w={m}\n{}",
                    p.to_text()
                );
                checked += 1;
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 120.0,
        "took {elapsed:?}, budget 2 min"
    );
    println!(
        "[PASS] criterion 5: {checked} solver results equal the exhaustive oracle ({elapsed:?})"
    );
}

#[test]
fn criterion_6_theorem_property_suites() {
    let started = Instant::now();
    let suites: [(Claim, std::ops::RangeInclusive<usize>); 14] = [
        (Claim::Thm4_1, 3..=7),
        (Claim::Cor4_2, 3..=7),
        (Claim::Prop3_2, 3..=6),
        (Claim::Prop3_3, 3..=7),
        (Claim::Prop3_4, 3..=7),
        (Claim::Lemma3_5, 3..=7),
        (Claim::Lemma4_3, 3..=6),
        (Claim::LemmaB_2, 3..=7),
        (Claim::LemmaB_3, 3..=7),
        (Claim::LemmaC_PushUpProposals, 3..=7),
        (Claim::LemmaC_2, 3..=7),
        (Claim::PropC_1, 3..=7),
        (Claim::PropA_1_Lattice, 3..=7),
        (Claim::StrategyproofnessMen, 3..=4),
    ];
    for (claim, n_range) in suites {
        let config = VerifyConfig {
            trials: 500,
            n_range,
            seed: 7,
            exhaustive: false,
        };
        let report = verify_claim(claim, &config).unwrap();
        assert!(
            report.passed(),
            "{claim}: {} failures, first: {:?}",
            report.failures,
            report.first_counterexample
        );
        assert!(
            report.condition_met > 0,
            "{claim}: no check had its condition met"
        );
        println!("  {report}");
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 300.0,
        "took {elapsed:?}, budget 5 min"
    );
    println!("[PASS] criterion 6: 14 property suites, 500 seeded trials each, zero failures ({elapsed:?})");
}

#[test]
fn criterion_7_regret_exceeds_improvement_at_n20() {
    let started = Instant::now();
    let config = experiment_config(Experiment::RegretVsImprovement, vec![20], 1000, 42);
    let report = run_experiment(&config).unwrap();
    let mean_improvement = metric(&report, 20, "improvement_mean");
    let mean_regret = metric(&report, 20, "regret_mean");
    assert!(
        mean_regret > mean_improvement,
        "mean regret {mean_regret} not greater than mean improvement {mean_improvement}"
    );
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 120.0,
        "took {elapsed:?}, budget 2 min"
    );
    println!(
        "[PASS] criterion 7: n=20 mean regret {mean_regret:.3} > mean improvement {mean_improvement:.3} ({elapsed:?})"
    );
}

#[test]
fn criterion_8_pool_comparison_at_n40() {
    let started = Instant::now();

    // A statistical check: on failure it is re-run once with a second seed
    // before being flagged.
    let run = |seed: u64| -> Result<ExperimentReport, String> {
        let mut config = experiment_config(Experiment::AccomplicePool, vec![40], 200, seed);
        config.pool_sizes = vec![1, 4, 10, 40];
        let report = run_experiment(&config).unwrap();
        let self_mean = metric(&report, 40, "self_mean_improvement");
        for p in [1usize, 4, 10, 40] {
            let wr = metric(
                &report,
                40,
                &format!("pool{p}_with_regret_mean_improvement"),
            );
            if wr < self_mean {
                return Err(format!(
                    "seed {seed}: with-regret mean {wr} < self {self_mean} at pool {p}"
                ));
            }
            if p >= 4 {
                let nr = metric(&report, 40, &format!("pool{p}_no_regret_mean_improvement"));
                if nr < self_mean {
                    return Err(format!(
                        "seed {seed}: no-regret mean {nr} < self {self_mean} at pool {p}"
                    ));
                }
            }
        }
        Ok(report)
    };
    let outcome = run(42).or_else(|first| {
        println!("  primary seed failed ({first}); retrying with the fallback seed");
        run(1042)
    });
    assert!(outcome.is_ok(), "{}", outcome.err().unwrap());

    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 600.0,
        "took {elapsed:?}, budget 10 min"
    );
    println!("[PASS] criterion 8: n=40 pool comparison holds ({elapsed:?})");
}
