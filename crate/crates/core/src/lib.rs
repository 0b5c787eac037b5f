//! Stable-matching engine with strategic-manipulation solvers.
//!
//! The crate is organized around a few small layers:
//!
//! - [`model`]: preference profiles, matchings, proposal traces, and the
//!   push-up / push-down list surgery, plus the text and JSON file formats.
//! - [`da`]: men-proposing deferred acceptance with full proposal tracing
//!   (and the women-proposing variant).
//! - [`stability`]: blocking pairs, m-stability, brute-force stable-set
//!   enumeration, and the lattice meet/join.
//! - [`manipulation`]: optimal no-regret accomplice, with-regret accomplice,
//!   and self manipulation via inconspicuous single-promotion search.
//! - [`oracle`]: exhaustive misreport search and seeded property trials that
//!   certify the solvers and the structural claims they rest on.
//! - [`experiments`]: a deterministic Monte Carlo harness emitting CSV/JSON
//!   reports.
//!
//! The `matchaudit` CLI in this workspace is a thin front end over these
//! modules; the mdbook under `book/` walks through the concepts with runnable
//! snippets (mirrored as doc-tests).

pub mod da;
pub mod experiments;
pub mod manipulation;
pub mod model;
pub mod oracle;
pub mod stability;

pub use da::{da_with_misreport, run_da, run_da_women_proposing};
pub use manipulation::{
    best_accomplice, classify_outcome, optimal_accomplice_no_regret,
    optimal_accomplice_with_regret, optimal_self, AccompliceMode, ManipulationResult, Strategy,
};
pub use model::{Matching, PreferenceProfile, ProposalTrace, SplitPreference};
pub use stability::{
    blocking_pairs, enumerate_stable, is_m_stable, is_stable, join, meet, StableSet,
};

// Every fenced Rust block in the book compiles and runs under
// `cargo test --doc`, keeping the guide in lockstep with the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/profiles.md")]
    mod profiles {}
    #[doc = include_str!("../../../book/src/deferred-acceptance.md")]
    mod deferred_acceptance {}
    #[doc = include_str!("../../../book/src/stability.md")]
    mod stability {}
    #[doc = include_str!("../../../book/src/manipulation.md")]
    mod manipulation {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}

pub(crate) mod rng_util {
    //! Seed derivation for reproducible, schedule-independent streams.

    pub(crate) const RNG_ALGORITHM: &str =
        "chacha8, per-trial key = splitmix64 fold of (seed, n, trial)";

    fn splitmix64(mut x: u64) -> u64 {
        x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
        x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        x ^ (x >> 31)
    }

    /// Folds `parts` into `seed`, one splitmix round per part.
    pub(crate) fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
        parts
            .iter()
            .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ p))
    }
}
