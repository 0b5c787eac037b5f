//! Optimal manipulation solvers: no-regret accomplice, with-regret accomplice,
//! and self manipulation, all via inconspicuous single-promotion search.
//!
//! An accomplice solver considers, for each woman `x` ranked below his true
//! match, the misreport that promotes `x` to the slot immediately above the
//! match (plus truth-telling). Promoting one woman per candidate is sufficient
//! for optimality over the full misreport space; the `oracle` module certifies
//! this against exhaustive search.
//!
//! Self manipulation promotes each man below the woman's match to *every*
//! position above it: the single-slot shortcut is only known to be safe for
//! the proposing side, so the receiving side searches all slots.

use crate::da::{da_man_override, da_woman_override, run_da};
use crate::model::{Matching, PreferenceProfile};
use crate::stability::blocking_pairs;
use std::fmt;
use thiserror::Error;

/// Which agent misreports, and under what constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    SelfManipulation,
    AccompliceNoRegret,
    AccompliceWithRegret,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::SelfManipulation => "self",
            Strategy::AccompliceNoRegret => "accomplice-nr",
            Strategy::AccompliceWithRegret => "accomplice-wr",
        })
    }
}

/// Accomplice strategy space: must the accomplice keep his own match?
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AccompliceMode {
    NoRegret,
    WithRegret,
}

impl AccompliceMode {
    pub fn strategy(self) -> Strategy {
        match self {
            AccompliceMode::NoRegret => Strategy::AccompliceNoRegret,
            AccompliceMode::WithRegret => Strategy::AccompliceWithRegret,
        }
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum ManipulationError {
    #[error("accomplice pool is empty")]
    EmptyPool,
}

/// A solved manipulation: the misreport, the resulting matching, and how it
/// scores against the *true* preferences.
///
/// `improvement` and `regret` are rank deltas on the true lists. When
/// truth-telling is optimal the misreport equals the true list and
/// `promoted_agent` is `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManipulationResult {
    pub strategy: Strategy,
    /// The misreporting agent: the accomplice man, or the woman herself.
    pub manipulator: usize,
    pub target_woman: usize,
    pub misreport: Vec<usize>,
    pub promoted_agent: Option<usize>,
    pub outcome: Matching,
    pub improvement: usize,
    pub regret: usize,
    pub outcome_stable_wrt_truth: bool,
    pub outcome_m_stable_wrt_truth: bool,
}

/// One inconspicuous accomplice candidate: promote `promoted` immediately
/// above the accomplice's true match.
#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    pub promoted: usize,
    pub list: Vec<usize>,
    pub matching: Matching,
    pub regret: usize,
}

/// All single-promotion candidates for accomplice `m` (truth-telling not
/// included). `mu_true` must be the DA matching of `profile`.
pub(crate) fn accomplice_candidates(
    profile: &PreferenceProfile,
    m: usize,
    mu_true: &Matching,
) -> Vec<Candidate> {
    let pivot = mu_true.woman_of(m);
    let split = profile.split_at(m, pivot).expect("valid indices");
    let true_rank = profile.man_rank(m, pivot);
    split
        .below
        .iter()
        .map(|&x| {
            let list = split.promote_above_pivot(x).expect("x is below the pivot");
            let matching = da_man_override(profile, m, &list);
            // Strategyproofness: the accomplice can only stay put or lose.
            let regret = profile.man_rank(m, matching.woman_of(m)) - true_rank;
            Candidate {
                promoted: x,
                list,
                matching,
                regret,
            }
        })
        .collect()
}

/// Self-manipulation candidates for a woman whose true list is `list` and
/// whose match sits at `partner_pos`: every (promoted man, slot) pair yields
/// one list. Yields `(promoted_man, slot, candidate_list)`.
pub(crate) fn self_candidate_lists(
    list: &[usize],
    partner_pos: usize,
) -> impl Iterator<Item = (usize, usize, Vec<usize>)> + '_ {
    list[partner_pos + 1..].iter().flat_map(move |&x| {
        let base: Vec<usize> = list.iter().copied().filter(|&y| y != x).collect();
        (0..=partner_pos).map(move |slot| {
            let mut cand = base.clone();
            cand.insert(slot, x);
            (x, slot, cand)
        })
    })
}

fn truth_result(
    profile: &PreferenceProfile,
    strategy: Strategy,
    manipulator: usize,
    w: usize,
    mu: &Matching,
) -> ManipulationResult {
    let misreport = match strategy {
        Strategy::SelfManipulation => profile.woman_list(w).to_vec(),
        _ => profile.man_list(manipulator).to_vec(),
    };
    ManipulationResult {
        strategy,
        manipulator,
        target_woman: w,
        misreport,
        promoted_agent: None,
        outcome: mu.clone(),
        improvement: 0,
        regret: 0,
        outcome_stable_wrt_truth: true,
        outcome_m_stable_wrt_truth: true,
    }
}

/// Wraps a winning candidate into a classified result.
fn finish(
    profile: &PreferenceProfile,
    strategy: Strategy,
    manipulator: usize,
    w: usize,
    chosen: Chosen,
) -> ManipulationResult {
    let result = ManipulationResult {
        strategy,
        manipulator,
        target_woman: w,
        misreport: chosen.misreport,
        promoted_agent: Some(chosen.promoted),
        outcome: chosen.outcome,
        improvement: 0,
        regret: 0,
        outcome_stable_wrt_truth: false,
        outcome_m_stable_wrt_truth: false,
    };
    classify_outcome(profile, result)
}

struct Chosen {
    misreport: Vec<usize>,
    promoted: usize,
    outcome: Matching,
}

fn solve_accomplice(
    profile: &PreferenceProfile,
    m: usize,
    w: usize,
    mode: AccompliceMode,
) -> ManipulationResult {
    let (mu, _) = run_da(profile);
    let truth_rank = profile.woman_rank(w, mu.man_of(w));
    let mut best: Option<(usize, usize, usize)> = None; // (w-rank, regret, promoted)
    let mut chosen: Option<Candidate> = None;
    for cand in accomplice_candidates(profile, m, &mu) {
        if mode == AccompliceMode::NoRegret && cand.regret != 0 {
            continue;
        }
        let key = (
            profile.woman_rank(w, cand.matching.man_of(w)),
            cand.regret,
            cand.promoted,
        );
        if best.is_none_or(|b| key < b) {
            best = Some(key);
            chosen = Some(cand);
        }
    }
    match (best, chosen) {
        // A candidate counts only if it strictly improves w's match.
        (Some((rank, _, _)), Some(cand)) if rank < truth_rank => finish(
            profile,
            mode.strategy(),
            m,
            w,
            Chosen {
                misreport: cand.list,
                promoted: cand.promoted,
                outcome: cand.matching,
            },
        ),
        _ => truth_result(profile, mode.strategy(), m, w, &mu),
    }
}

/// Optimal no-regret accomplice manipulation by `m` on behalf of `w`:
/// maximizes `w`'s true-list match over all misreports that keep the
/// accomplice's own match fixed.
///
/// ```
/// use matchaudit::PreferenceProfile;
/// use matchaudit::manipulation::optimal_accomplice_no_regret;
///
/// let p = PreferenceProfile::parse(
///     "n=4\nm1: w3 w2 w1 w4\nm2: w1 w4 w2 w3\nm3: w2 w4 w1 w3\nm4: w2 w1 w3 w4\n\
///      w1: m4 m3 m1 m2\nw2: m4 m3 m2 m1\nw3: m3 m1 m2 m4\nw4: m2 m1 m3 m4\n",
/// )?;
/// // m1 promotes w1 in his list; her match improves from m2 to m3 while
/// // m1 keeps his own partner.
/// let r = optimal_accomplice_no_regret(&p, 0, 0);
/// assert_eq!(r.outcome.man_of(0), 2);
/// assert_eq!((r.improvement, r.regret), (2, 0));
/// # Ok::<(), matchaudit::model::ParseError>(())
/// ```
pub fn optimal_accomplice_no_regret(
    profile: &PreferenceProfile,
    m: usize,
    w: usize,
) -> ManipulationResult {
    solve_accomplice(profile, m, w, AccompliceMode::NoRegret)
}

/// Optimal with-regret accomplice manipulation: maximizes `w`'s match over
/// all misreports; among ties, the accomplice's regret is minimized.
pub fn optimal_accomplice_with_regret(
    profile: &PreferenceProfile,
    m: usize,
    w: usize,
) -> ManipulationResult {
    solve_accomplice(profile, m, w, AccompliceMode::WithRegret)
}

/// Optimal self manipulation by woman `w`: maximizes her true-list match over
/// all permutations of her own list.
pub fn optimal_self(profile: &PreferenceProfile, w: usize) -> ManipulationResult {
    let (mu, _) = run_da(profile);
    let partner_pos = profile.woman_rank(w, mu.man_of(w));
    let mut best: Option<(usize, usize, usize)> = None; // (w-rank, promoted, slot)
    let mut chosen: Option<(Vec<usize>, usize, Matching)> = None;
    for (x, slot, list) in self_candidate_lists(profile.woman_list(w), partner_pos) {
        let matching = da_woman_override(profile, w, &list);
        let key = (profile.woman_rank(w, matching.man_of(w)), x, slot);
        if best.is_none_or(|b| key < b) {
            best = Some(key);
            chosen = Some((list, x, matching));
        }
    }
    match (best, chosen) {
        (Some((rank, ..)), Some((list, x, matching))) if rank < partner_pos => finish(
            profile,
            Strategy::SelfManipulation,
            w,
            w,
            Chosen {
                misreport: list,
                promoted: x,
                outcome: matching,
            },
        ),
        _ => truth_result(profile, Strategy::SelfManipulation, w, w, &mu),
    }
}

/// Best manipulation for `w` over a pool of accomplices: maximizes her match,
/// then minimizes accomplice regret, then takes the lowest accomplice index.
pub fn best_accomplice(
    profile: &PreferenceProfile,
    w: usize,
    pool: &[usize],
    mode: AccompliceMode,
) -> Result<ManipulationResult, ManipulationError> {
    let mut pool: Vec<usize> = pool.to_vec();
    pool.sort_unstable();
    pool.dedup();
    if pool.is_empty() {
        return Err(ManipulationError::EmptyPool);
    }
    let mut best: Option<(usize, usize, usize)> = None;
    let mut chosen: Option<ManipulationResult> = None;
    for &m in &pool {
        let result = match mode {
            AccompliceMode::NoRegret => optimal_accomplice_no_regret(profile, m, w),
            AccompliceMode::WithRegret => optimal_accomplice_with_regret(profile, m, w),
        };
        let key = (
            profile.woman_rank(w, result.outcome.man_of(w)),
            result.regret,
            m,
        );
        if best.is_none_or(|b| key < b) {
            best = Some(key);
            chosen = Some(result);
        }
    }
    Ok(chosen.expect("pool is nonempty"))
}

/// Recomputes the true-list rank deltas and the stability flags of a result.
///
/// Improvement and regret are clamped at zero; the solvers never produce a
/// worsening strategy, but foreign outcomes may.
pub fn classify_outcome(
    profile: &PreferenceProfile,
    mut result: ManipulationResult,
) -> ManipulationResult {
    let (mu, _) = run_da(profile);
    let w = result.target_woman;
    let truth_rank = profile.woman_rank(w, mu.man_of(w));
    let new_rank = profile.woman_rank(w, result.outcome.man_of(w));
    result.improvement = truth_rank.saturating_sub(new_rank);
    result.regret = match result.strategy {
        Strategy::SelfManipulation => 0,
        _ => {
            let m = result.manipulator;
            profile
                .man_rank(m, result.outcome.woman_of(m))
                .saturating_sub(profile.man_rank(m, mu.woman_of(m)))
        }
    };
    let blocking = blocking_pairs(&result.outcome, profile).expect("outcome size matches profile");
    result.outcome_stable_wrt_truth = blocking.is_empty();
    result.outcome_m_stable_wrt_truth = match result.strategy {
        // Only the misreporting agent can sit in a blocking pair (Prop 3.2
        // and its mirror for the receiving side).
        Strategy::SelfManipulation => blocking.iter().all(|&(_, bw)| bw == w),
        _ => blocking.iter().all(|&(bm, _)| bm == result.manipulator),
    };
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::da::da_with_misreport;

    const INTRO: &str = include_str!("../tests/fixtures/intro.txt");
    const UNSTABLE_NR: &str = include_str!("../tests/fixtures/unstable_no_regret.txt");
    const WITH_REGRET: &str = include_str!("../tests/fixtures/with_regret.txt");
    const SELF_BEATS: &str = include_str!("../tests/fixtures/self_beats_accomplice.txt");

    fn profile(text: &str) -> PreferenceProfile {
        PreferenceProfile::parse(text).unwrap()
    }

    #[test]
    fn intro_no_regret_promotes_w1() {
        // m1 promotes w1; w1's match improves from m2 to m3 at no cost to m1.
        let p = profile(INTRO);
        let r = optimal_accomplice_no_regret(&p, 0, 0);
        assert_eq!(r.promoted_agent, Some(0));
        assert_eq!(r.outcome.man_of(0), 2);
        assert_eq!(r.outcome.man_to_woman(), &[2, 3, 0, 1]);
        // w1's list is m4 > m3 > m1 > m2: two rank steps gained.
        assert_eq!(r.improvement, 2);
        assert_eq!(r.regret, 0);
        assert_eq!(r.outcome.woman_of(0), run_da(&p).0.woman_of(0));
        assert!(r.outcome_stable_wrt_truth);
    }

    #[test]
    fn intro_with_regret_cannot_beat_no_regret() {
        // Frozen from exhaustive search over all 4! lists of m1: m3 is the
        // best w1 can get through m1 even with regret allowed.
        let p = profile(INTRO);
        let r = optimal_accomplice_with_regret(&p, 0, 0);
        assert_eq!(r.outcome.man_of(0), 2);
        assert_eq!(r.improvement, 2);
        assert_eq!(r.regret, 0);
    }

    #[test]
    fn unstable_example_no_regret_reaches_top_choice() {
        // §4.1 manipulating pair (m3, w4): w4 reaches her top choice m5.
        let p = profile(UNSTABLE_NR);
        let r = optimal_accomplice_no_regret(&p, 2, 3);
        assert_eq!(r.promoted_agent, Some(3));
        assert_eq!(r.outcome.man_of(3), 4);
        assert_eq!(r.regret, 0);
        assert_eq!(r.improvement, 4);
        // The solver's canonical list is stability-preserving, unlike the
        // equally optimal list that reshuffles the lower part.
        assert!(r.outcome_stable_wrt_truth);
    }

    #[test]
    fn with_regret_example() {
        // §4.2 manipulating pair (m1, w1): promoting w1 gets her m1, her top
        // choice, while m1 drops one rank (w4 to w1).
        let p = profile(WITH_REGRET);
        let r = optimal_accomplice_with_regret(&p, 0, 0);
        assert_eq!(r.promoted_agent, Some(0));
        assert_eq!(r.outcome.man_of(0), 0);
        assert_eq!(r.outcome.man_to_woman(), &[0, 4, 1, 2, 3]);
        assert_eq!(r.regret, 1);
        assert_eq!(r.improvement, 2);
        assert!(!r.outcome_stable_wrt_truth);
        assert!(r.outcome_m_stable_wrt_truth);

        // The no-regret optimum for the same pair stops at m2.
        let r = optimal_accomplice_no_regret(&p, 0, 0);
        assert_eq!(r.outcome.man_of(0), 1);
        assert_eq!(r.promoted_agent, Some(1));
        assert_eq!(r.regret, 0);
    }

    #[test]
    fn truth_telling_when_target_has_top_choice() {
        // §4.1: w3 is already matched with her top choice m3.
        let p = profile(UNSTABLE_NR);
        for m in 0..p.n() {
            let r = optimal_accomplice_with_regret(&p, m, 2);
            assert_eq!(r.improvement, 0);
            assert_eq!(r.promoted_agent, None);
            assert_eq!(r.misreport, p.man_list(m));
        }
        let r = optimal_self(&p, 2);
        assert_eq!(r.improvement, 0);
        assert_eq!(r.promoted_agent, None);
    }

    #[test]
    fn self_manipulation_example() {
        // Appendix example: w1 promotes m4 above her match and lands her top
        // choice m1. Promoting m4 to the very top backfires; the solver must
        // find the working slot.
        let p = profile(SELF_BEATS);
        let r = optimal_self(&p, 0);
        assert_eq!(r.strategy, Strategy::SelfManipulation);
        assert_eq!(r.outcome.man_of(0), 0);
        assert_eq!(r.promoted_agent, Some(3));
        assert_eq!(r.misreport, vec![0, 3, 1, 2]);
        assert_eq!(r.improvement, 2);
        assert_eq!(r.regret, 0);
        // No accomplice can do anything for w1 in this instance.
        for m in 0..p.n() {
            let r = optimal_accomplice_no_regret(&p, m, 0);
            assert_eq!(r.improvement, 0);
            assert_eq!(r.promoted_agent, None);
        }
    }

    #[test]
    fn intro_self_manipulation_is_truth_telling() {
        // m2 is the only man who proposes to w1, so she has nothing to gain.
        let p = profile(INTRO);
        let r = optimal_self(&p, 0);
        assert_eq!(r.improvement, 0);
        assert_eq!(r.promoted_agent, None);
        assert_eq!(r.misreport, p.woman_list(0));
    }

    #[test]
    fn best_accomplice_over_pool() {
        let p = profile(INTRO);
        let r = best_accomplice(&p, 0, &[0, 1, 2, 3], AccompliceMode::NoRegret).unwrap();
        assert_eq!(r.manipulator, 0);
        assert_eq!(r.outcome.man_of(0), 2);

        // Singleton pool equals the single-accomplice solver.
        for mode in [AccompliceMode::NoRegret, AccompliceMode::WithRegret] {
            let single = best_accomplice(&p, 0, &[2], mode).unwrap();
            let direct = match mode {
                AccompliceMode::NoRegret => optimal_accomplice_no_regret(&p, 2, 0),
                AccompliceMode::WithRegret => optimal_accomplice_with_regret(&p, 2, 0),
            };
            assert_eq!(single, direct);
        }

        assert_eq!(
            best_accomplice(&p, 0, &[], AccompliceMode::NoRegret).unwrap_err(),
            ManipulationError::EmptyPool
        );
    }

    #[test]
    fn with_regret_pool_reaches_top_choice() {
        // §4.2: over all accomplices, with-regret manipulation gets w1 her
        // top choice m1 (frozen against the exhaustive oracle).
        let p = profile(WITH_REGRET);
        let r = best_accomplice(
            &p,
            0,
            &(0..5).collect::<Vec<_>>(),
            AccompliceMode::WithRegret,
        )
        .unwrap();
        assert_eq!(r.outcome.man_of(0), 0);
        assert_eq!(r.manipulator, 0);
    }

    #[test]
    fn classify_fills_flags_and_deltas() {
        // §4.1 with the alternative optimal list w4 > w1 > w3 > w2 > w5: the
        // dagger matching is stable with respect to the truth.
        let p = profile(UNSTABLE_NR);
        let (outcome, _) = da_with_misreport(&p, 2, &[3, 0, 2, 1, 4]).unwrap();
        let r = classify_outcome(
            &p,
            ManipulationResult {
                strategy: Strategy::AccompliceNoRegret,
                manipulator: 2,
                target_woman: 3,
                misreport: vec![3, 0, 2, 1, 4],
                promoted_agent: Some(3),
                outcome,
                improvement: 0,
                regret: 0,
                outcome_stable_wrt_truth: false,
                outcome_m_stable_wrt_truth: false,
            },
        );
        assert!(r.outcome_stable_wrt_truth);
        assert_eq!(r.improvement, 4);
        assert_eq!(r.regret, 0);

        // Truth-telling classifies as stable with zero deltas.
        let p = profile(INTRO);
        let (mu, _) = run_da(&p);
        let r = classify_outcome(
            &p,
            truth_result(&p, Strategy::AccompliceNoRegret, 0, 0, &mu),
        );
        assert!(r.outcome_stable_wrt_truth && r.improvement == 0 && r.regret == 0);
    }
}
