//! Blocking-pair analysis, relaxed stability, stable-set enumeration, and the
//! lattice meet/join over stable matchings.
//!
//! Enumeration is brute force (recursive extension with blocking-pair
//! pruning) and capped to small instances; it exists for verification, not
//! for scale.

use crate::da::{run_da, run_da_women_proposing};
use crate::model::{Matching, PreferenceProfile};
use thiserror::Error;

/// Default cap for [`enumerate_stable`].
pub const DEFAULT_ENUMERATION_CAP: usize = 9;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum StabilityError {
    #[error("matching is over {matching} agents but the profile has {profile}")]
    SizeMismatch { matching: usize, profile: usize },
    #[error("instance size {n} exceeds the enumeration cap {cap}")]
    InstanceTooLarge { n: usize, cap: usize },
    #[error("input matching is not stable for this profile")]
    InputNotStable,
    #[error("man-side and woman-side assignments disagree; inputs were not both stable")]
    InconsistentLattice,
}

/// All pairs `(m, w)` who strictly prefer each other to their partners under
/// `matching`, in lexicographic order.
pub fn blocking_pairs(
    matching: &Matching,
    profile: &PreferenceProfile,
) -> Result<Vec<(usize, usize)>, StabilityError> {
    if matching.n() != profile.n() {
        return Err(StabilityError::SizeMismatch {
            matching: matching.n(),
            profile: profile.n(),
        });
    }
    let n = profile.n();
    let mut out = Vec::new();
    for m in 0..n {
        let matched_rank = profile.man_rank(m, matching.woman_of(m));
        for &w in &profile.man_list(m)[..matched_rank] {
            if profile.woman_prefers(w, m, matching.man_of(w)) {
                out.push((m, w));
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// No blocking pair at all.
pub fn is_stable(matching: &Matching, profile: &PreferenceProfile) -> bool {
    blocking_pairs(matching, profile)
        .map(|b| b.is_empty())
        .unwrap_or(false)
}

/// m-stability: every blocking pair (if any) involves man `m`.
pub fn is_m_stable(matching: &Matching, profile: &PreferenceProfile, m: usize) -> bool {
    blocking_pairs(matching, profile)
        .map(|b| b.iter().all(|&(bm, _)| bm == m))
        .unwrap_or(false)
}

/// The enumerated set `S` of all stable matchings of one profile, kept in
/// lexicographic order of the man-side assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableSet {
    matchings: Vec<Matching>,
}

impl StableSet {
    pub fn len(&self) -> usize {
        self.matchings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matchings.is_empty()
    }

    pub fn contains(&self, mu: &Matching) -> bool {
        self.matchings.binary_search(mu).is_ok()
    }

    pub fn is_subset_of(&self, other: &StableSet) -> bool {
        self.matchings.iter().all(|mu| other.contains(mu))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Matching> {
        self.matchings.iter()
    }
}

/// Enumerates every stable matching, up to [`DEFAULT_ENUMERATION_CAP`].
pub fn enumerate_stable(profile: &PreferenceProfile) -> Result<StableSet, StabilityError> {
    enumerate_stable_with_cap(profile, DEFAULT_ENUMERATION_CAP)
}

/// Enumeration with an explicit instance-size cap.
pub fn enumerate_stable_with_cap(
    profile: &PreferenceProfile,
    cap: usize,
) -> Result<StableSet, StabilityError> {
    let n = profile.n();
    if n > cap || n > 32 {
        return Err(StabilityError::InstanceTooLarge {
            n,
            cap: cap.min(32),
        });
    }
    let mut assignment = vec![0usize; n];
    let mut used: u32 = 0;
    let mut found = Vec::new();
    extend(profile, 0, &mut assignment, &mut used, &mut found);
    found.sort_unstable();
    debug_assert!(found.windows(2).all(|p| p[0] != p[1]));

    let set = StableSet { matchings: found };
    debug_assert!(set.contains(&run_da(profile).0));
    debug_assert!(set.contains(&run_da_women_proposing(profile)));
    Ok(set)
}

/// Assigns a woman to man `m`, pruning any partial assignment that already
/// contains a blocking pair among the assigned agents.
fn extend(
    profile: &PreferenceProfile,
    m: usize,
    assignment: &mut Vec<usize>,
    used: &mut u32,
    found: &mut Vec<Matching>,
) {
    let n = profile.n();
    if m == n {
        found.push(Matching::from_man_to_woman(assignment.clone()).expect("permutation"));
        return;
    }
    'women: for w in 0..n {
        if *used & (1 << w) != 0 {
            continue;
        }
        for (prev, &pw) in assignment[..m].iter().enumerate() {
            // (prev, w): prev prefers w to his partner and w prefers prev to m.
            if profile.man_prefers(prev, w, pw) && profile.woman_prefers(w, prev, m) {
                continue 'women;
            }
            // (m, pw): m prefers pw to w and pw prefers m to prev.
            if profile.man_prefers(m, pw, w) && profile.woman_prefers(pw, m, prev) {
                continue 'women;
            }
        }
        assignment[m] = w;
        *used |= 1 << w;
        extend(profile, m + 1, assignment, used, found);
        *used &= !(1 << w);
    }
}

fn check_lattice_inputs(
    a: &Matching,
    b: &Matching,
    profile: &PreferenceProfile,
) -> Result<(), StabilityError> {
    if a.n() != profile.n() || b.n() != profile.n() {
        return Err(StabilityError::SizeMismatch {
            matching: if a.n() != profile.n() { a.n() } else { b.n() },
            profile: profile.n(),
        });
    }
    if !is_stable(a, profile) || !is_stable(b, profile) {
        return Err(StabilityError::InputNotStable);
    }
    Ok(())
}

/// Combines the man-side and woman-side selections and checks that they form
/// one consistent matching. `men_take_better` selects the join; its negation
/// the meet.
fn lattice_op(
    a: &Matching,
    b: &Matching,
    profile: &PreferenceProfile,
    men_take_better: bool,
) -> Result<Matching, StabilityError> {
    check_lattice_inputs(a, b, profile)?;
    let n = profile.n();
    let man_side: Vec<usize> = (0..n)
        .map(|m| {
            let better = profile.man_prefers(m, a.woman_of(m), b.woman_of(m));
            if better == men_take_better {
                a.woman_of(m)
            } else {
                b.woman_of(m)
            }
        })
        .collect();
    // Women get the opposite extreme of the men.
    let woman_side: Vec<usize> = (0..n)
        .map(|w| {
            let better = profile.woman_prefers(w, a.man_of(w), b.man_of(w));
            if better != men_take_better {
                a.man_of(w)
            } else {
                b.man_of(w)
            }
        })
        .collect();
    let joined =
        Matching::from_man_to_woman(man_side).map_err(|_| StabilityError::InconsistentLattice)?;
    for (w, &man) in woman_side.iter().enumerate() {
        if joined.man_of(w) != man {
            return Err(StabilityError::InconsistentLattice);
        }
    }
    debug_assert!(is_stable(&joined, profile));
    Ok(joined)
}

/// Lattice meet: each man gets his less-preferred partner of the two stable
/// matchings, each woman her more-preferred one.
pub fn meet(
    a: &Matching,
    b: &Matching,
    profile: &PreferenceProfile,
) -> Result<Matching, StabilityError> {
    lattice_op(a, b, profile, false)
}

/// Lattice join: each man gets his more-preferred partner, each woman her
/// less-preferred one.
pub fn join(
    a: &Matching,
    b: &Matching,
    profile: &PreferenceProfile,
) -> Result<Matching, StabilityError> {
    lattice_op(a, b, profile, true)
}
