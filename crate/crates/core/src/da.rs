//! Men-proposing deferred acceptance with full proposal tracing.
//!
//! Every other module funnels through [`run_da`]; the engine is a pure
//! function of the profile, so it can be called concurrently on shared data.
//!
//! Proposal order inside a round is fixed (men in ascending index, one
//! proposal per unmatched man per round) to make traces deterministic. The
//! final matching does not depend on this choice; the trace does.

use crate::model::{Matching, PreferenceProfile, ProposalTrace};
use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum MisreportError {
    #[error("misreport is not a permutation of the other side")]
    InvalidMisreport,
}

/// Core proposal/rejection loop. `list(p)` is proposer `p`'s submitted list,
/// `rank(r, p)` the receiver-side rank. Returns proposer -> receiver.
fn propose<'a, L, R>(
    n: usize,
    list: L,
    rank: R,
    mut trace: Option<&mut Vec<(usize, usize)>>,
) -> Vec<usize>
where
    L: Fn(usize) -> &'a [usize],
    R: Fn(usize, usize) -> usize,
{
    let mut next = vec![0usize; n];
    let mut holder: Vec<Option<usize>> = vec![None; n];
    let mut engaged = vec![false; n];
    let mut free = n;
    while free > 0 {
        let mut progressed = false;
        for p in 0..n {
            if engaged[p] || next[p] >= n {
                continue;
            }
            let r = list(p)[next[p]];
            next[p] += 1;
            progressed = true;
            if let Some(t) = trace.as_deref_mut() {
                t.push((p, r));
            }
            match holder[r] {
                None => {
                    holder[r] = Some(p);
                    engaged[p] = true;
                    free -= 1;
                }
                Some(q) => {
                    if rank(r, p) < rank(r, q) {
                        holder[r] = Some(p);
                        engaged[p] = true;
                        engaged[q] = false;
                    }
                }
            }
        }
        // With complete lists on a balanced market no man can run out of
        // women while unmatched.
        debug_assert!(progressed, "deferred acceptance stalled");
    }
    let mut out = vec![0; n];
    for (r, p) in holder.iter().enumerate() {
        out[p.expect("complete lists leave no one unmatched")] = r;
    }
    out
}

/// Runs men-proposing deferred acceptance, returning the men-optimal stable
/// matching and the full proposal trace.
///
/// ```
/// use matchaudit::{run_da, PreferenceProfile};
///
/// let p = PreferenceProfile::parse("n=2\nm1: w1 w2\nm2: w1 w2\nw1: m2 m1\nw2: m1 m2\n")?;
/// let (matching, trace) = run_da(&p);
/// assert_eq!(matching.man_to_woman(), &[1, 0]);
/// assert_eq!(trace.by_man(0), vec![0, 1]); // m1 proposes to w1, is bumped, then w2
/// # Ok::<(), matchaudit::model::ParseError>(())
/// ```
pub fn run_da(profile: &PreferenceProfile) -> (Matching, ProposalTrace) {
    let mut trace = Vec::new();
    let mtw = propose(
        profile.n(),
        |m| profile.man_list(m),
        |w, m| profile.woman_rank(w, m),
        Some(&mut trace),
    );
    let matching = Matching::from_man_to_woman(mtw).expect("DA yields a perfect matching");
    (matching, ProposalTrace::from_vec(trace))
}

/// Women-proposing deferred acceptance: the women-optimal (men-pessimal)
/// stable matching of the same profile.
pub fn run_da_women_proposing(profile: &PreferenceProfile) -> Matching {
    let wtm = propose(
        profile.n(),
        |w| profile.woman_list(w),
        |m, w| profile.man_rank(m, w),
        None,
    );
    let mut mtw = vec![0; profile.n()];
    for (w, &m) in wtm.iter().enumerate() {
        mtw[m] = w;
    }
    Matching::from_man_to_woman(mtw).expect("DA yields a perfect matching")
}

/// Runs DA with man `m`'s list replaced by `list`, leaving `profile` untouched.
pub fn da_with_misreport(
    profile: &PreferenceProfile,
    m: usize,
    list: &[usize],
) -> Result<(Matching, ProposalTrace), MisreportError> {
    let mut seen = vec![false; profile.n()];
    if list.len() != profile.n()
        || !list
            .iter()
            .all(|&w| w < profile.n() && !std::mem::replace(&mut seen[w], true))
    {
        return Err(MisreportError::InvalidMisreport);
    }
    let mut trace = Vec::new();
    let mtw = propose(
        profile.n(),
        |i| if i == m { list } else { profile.man_list(i) },
        |w, i| profile.woman_rank(w, i),
        Some(&mut trace),
    );
    let matching = Matching::from_man_to_woman(mtw).expect("DA yields a perfect matching");
    Ok((matching, ProposalTrace::from_vec(trace)))
}

/// Match-only variant of [`da_with_misreport`] for search loops. The caller
/// guarantees `list` is a permutation.
pub(crate) fn da_man_override(profile: &PreferenceProfile, m: usize, list: &[usize]) -> Matching {
    let mtw = propose(
        profile.n(),
        |i| if i == m { list } else { profile.man_list(i) },
        |w, i| profile.woman_rank(w, i),
        None,
    );
    Matching::from_man_to_woman(mtw).expect("DA yields a perfect matching")
}

/// Men-proposing DA with woman `w`'s list replaced; used by self-manipulation
/// search. The caller guarantees `list` is a permutation.
pub(crate) fn da_woman_override(profile: &PreferenceProfile, w: usize, list: &[usize]) -> Matching {
    let mut rank_row = vec![0usize; profile.n()];
    for (pos, &m) in list.iter().enumerate() {
        rank_row[m] = pos;
    }
    let mtw = propose(
        profile.n(),
        |m| profile.man_list(m),
        |r, m| {
            if r == w {
                rank_row[m]
            } else {
                profile.woman_rank(r, m)
            }
        },
        None,
    );
    Matching::from_man_to_woman(mtw).expect("DA yields a perfect matching")
}

#[cfg(test)]
mod tests {
    use super::*;

    const INTRO: &str = include_str!("../tests/fixtures/intro.txt");
    const WITH_REGRET: &str = include_str!("../tests/fixtures/with_regret.txt");

    fn intro() -> PreferenceProfile {
        PreferenceProfile::parse(INTRO).unwrap()
    }

    #[test]
    fn intro_example_matching() {
        let (mu, _) = run_da(&intro());
        // m1-w3, m2-w1, m3-w4, m4-w2
        assert_eq!(mu.man_to_woman(), &[2, 0, 3, 1]);
    }

    #[test]
    fn with_regret_example_matching() {
        let p = PreferenceProfile::parse(WITH_REGRET).unwrap();
        let (mu, _) = run_da(&p);
        // m1-w4, m2-w2, m3-w1, m4-w5, m5-w3
        assert_eq!(mu.man_to_woman(), &[3, 1, 0, 4, 2]);
    }

    #[test]
    fn mutual_first_choices() {
        let lists: Vec<Vec<usize>> = (0..5)
            .map(|i| {
                let mut l: Vec<usize> = (0..5).collect();
                l.rotate_left(i);
                l
            })
            .collect();
        let p = PreferenceProfile::new(lists.clone(), lists).unwrap();
        let (mu, trace) = run_da(&p);
        assert_eq!(mu.man_to_woman(), &[0, 1, 2, 3, 4]);
        assert_eq!(trace.len(), 5);
        assert_eq!(run_da_women_proposing(&p).man_to_woman(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn trace_is_prefix_of_each_list() {
        let p = intro();
        let (mu, trace) = run_da(&p);
        for m in 0..p.n() {
            let proposed = trace.by_man(m);
            assert_eq!(proposed.as_slice(), &p.man_list(m)[..proposed.len()]);
            assert_eq!(*proposed.last().unwrap(), mu.woman_of(m));
        }
    }

    #[test]
    fn women_proposing_examples() {
        // §4.2 footnote: the woman-optimal matching pairs w1 with m2.
        let p = PreferenceProfile::parse(WITH_REGRET).unwrap();
        assert_eq!(run_da_women_proposing(&p).man_of(0), 1);
        // For the intro profile the women-optimal matching is the *-marked one.
        assert_eq!(
            run_da_women_proposing(&intro()).man_to_woman(),
            &[2, 3, 0, 1]
        );
    }

    #[test]
    fn misreport_examples() {
        let p = intro();
        // m1 reports w1 > w3 > w2 > w4: the *-marked matching.
        let (mu, _) = da_with_misreport(&p, 0, &[0, 2, 1, 3]).unwrap();
        assert_eq!(mu.man_to_woman(), &[2, 3, 0, 1]);
        // Truthful "misreport" changes nothing.
        let (same, _) = da_with_misreport(&p, 0, p.man_list(0)).unwrap();
        assert_eq!(same.man_to_woman(), run_da(&p).0.man_to_woman());

        // §4.2: m1 reports w1 > w4 > w2 > w5 > w3: the dagger matching.
        let p = PreferenceProfile::parse(WITH_REGRET).unwrap();
        let (mu, _) = da_with_misreport(&p, 0, &[0, 3, 1, 4, 2]).unwrap();
        assert_eq!(mu.man_to_woman(), &[0, 4, 1, 2, 3]);
    }

    #[test]
    fn misreport_must_be_a_permutation() {
        let p = intro();
        assert_eq!(
            da_with_misreport(&p, 0, &[0, 0, 1, 3]).unwrap_err(),
            MisreportError::InvalidMisreport
        );
        assert_eq!(
            da_with_misreport(&p, 0, &[0, 1, 2]).unwrap_err(),
            MisreportError::InvalidMisreport
        );
    }
}
