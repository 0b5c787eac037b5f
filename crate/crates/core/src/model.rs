//! Instance representation: preference profiles, matchings, and preference-list
//! surgery (splitting a list around a pivot, push up, push down).
//!
//! Agents are 0-indexed internally. The external text/JSON formats use the
//! 1-indexed `m1`/`w1` naming convention; conversion happens at the parse and
//! serialize boundary.

use serde_json::Value;
use std::collections::HashSet;
use thiserror::Error;

/// Market side of an agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Men,
    Women,
}

impl Side {
    pub fn letter(self) -> char {
        match self {
            Side::Men => 'm',
            Side::Women => 'w',
        }
    }
}

/// A balanced stable-marriage instance: `n` men and `n` women, each with a
/// strict, complete preference list over the other side.
///
/// Rank tables (`position of partner in list`, 0 = most preferred) are derived
/// at construction and kept in sync with the lists. The type is immutable:
/// "surgery" methods return a new profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceProfile {
    n: usize,
    men_prefs: Vec<Vec<usize>>,
    women_prefs: Vec<Vec<usize>>,
    men_rank: Vec<Vec<usize>>,
    women_rank: Vec<Vec<usize>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProfileError {
    #[error("expected {expected} preference lists for {side}, got {got}", side = side.letter())]
    WrongListCount {
        side: Side,
        expected: usize,
        got: usize,
    },
    #[error("list for {}{} is not a permutation of 0..{n}", side.letter(), agent + 1)]
    NotAPermutation { side: Side, agent: usize, n: usize },
}

fn is_permutation(list: &[usize], n: usize) -> bool {
    if list.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &x in list {
        if x >= n || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

fn rank_table(prefs: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = prefs.len();
    let mut table = vec![vec![0; n]; n];
    for (a, list) in prefs.iter().enumerate() {
        for (pos, &b) in list.iter().enumerate() {
            table[a][b] = pos;
        }
    }
    table
}

impl PreferenceProfile {
    /// Builds a profile from 0-indexed preference lists, validating that every
    /// list is a permutation of `0..n`.
    pub fn new(
        men_prefs: Vec<Vec<usize>>,
        women_prefs: Vec<Vec<usize>>,
    ) -> Result<Self, ProfileError> {
        let n = men_prefs.len();
        if women_prefs.len() != n {
            return Err(ProfileError::WrongListCount {
                side: Side::Women,
                expected: n,
                got: women_prefs.len(),
            });
        }
        for (side, prefs) in [(Side::Men, &men_prefs), (Side::Women, &women_prefs)] {
            for (agent, list) in prefs.iter().enumerate() {
                if !is_permutation(list, n) {
                    return Err(ProfileError::NotAPermutation { side, agent, n });
                }
            }
        }
        let men_rank = rank_table(&men_prefs);
        let women_rank = rank_table(&women_prefs);
        Ok(Self {
            n,
            men_prefs,
            women_prefs,
            men_rank,
            women_rank,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Man `m`'s list, most preferred first.
    pub fn man_list(&self, m: usize) -> &[usize] {
        &self.men_prefs[m]
    }

    /// Woman `w`'s list, most preferred first.
    pub fn woman_list(&self, w: usize) -> &[usize] {
        &self.women_prefs[w]
    }

    /// Position of woman `w` in man `m`'s list (0 = best).
    pub fn man_rank(&self, m: usize, w: usize) -> usize {
        self.men_rank[m][w]
    }

    /// Position of man `m` in woman `w`'s list (0 = best).
    pub fn woman_rank(&self, w: usize, m: usize) -> usize {
        self.women_rank[w][m]
    }

    /// `true` iff man `m` strictly prefers `w1` to `w2`.
    pub fn man_prefers(&self, m: usize, w1: usize, w2: usize) -> bool {
        self.men_rank[m][w1] < self.men_rank[m][w2]
    }

    /// `true` iff woman `w` strictly prefers `m1` to `m2`.
    pub fn woman_prefers(&self, w: usize, m1: usize, m2: usize) -> bool {
        self.women_rank[w][m1] < self.women_rank[w][m2]
    }

    /// New profile with man `m`'s list replaced.
    pub fn with_man_list(&self, m: usize, list: Vec<usize>) -> Result<Self, ProfileError> {
        if !is_permutation(&list, self.n) {
            return Err(ProfileError::NotAPermutation {
                side: Side::Men,
                agent: m,
                n: self.n,
            });
        }
        let mut out = self.clone();
        for (pos, &w) in list.iter().enumerate() {
            out.men_rank[m][w] = pos;
        }
        out.men_prefs[m] = list;
        Ok(out)
    }

    /// New profile with woman `w`'s list replaced.
    pub fn with_woman_list(&self, w: usize, list: Vec<usize>) -> Result<Self, ProfileError> {
        if !is_permutation(&list, self.n) {
            return Err(ProfileError::NotAPermutation {
                side: Side::Women,
                agent: w,
                n: self.n,
            });
        }
        let mut out = self.clone();
        for (pos, &m) in list.iter().enumerate() {
            out.women_rank[w][m] = pos;
        }
        out.women_prefs[w] = list;
        Ok(out)
    }

    /// Splits man `m`'s list around `pivot`: the women he prefers to the
    /// pivot, the pivot itself, and the women he likes less.
    pub fn split_at(&self, m: usize, pivot: usize) -> Result<SplitPreference, SurgeryError> {
        if m >= self.n || pivot >= self.n {
            return Err(SurgeryError::IndexOutOfRange);
        }
        let pos = self.men_rank[m][pivot];
        Ok(SplitPreference {
            above: self.men_prefs[m][..pos].to_vec(),
            pivot,
            below: self.men_prefs[m][pos + 1..].to_vec(),
        })
    }
}

/// A man's preference list decomposed around a pivot woman (usually his
/// current match): `above` are the women he prefers to the pivot, `below`
/// the rest, both in list order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPreference {
    pub above: Vec<usize>,
    pub pivot: usize,
    pub below: Vec<usize>,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum SurgeryError {
    #[error("agent index out of range")]
    IndexOutOfRange,
    #[error("the pivot cannot be part of the moved set")]
    PivotInSet,
    #[error("a pushed-down agent is not above the pivot")]
    NotAbovePivot,
}

impl SplitPreference {
    fn contains(&self, x: usize) -> bool {
        x == self.pivot || self.above.contains(&x) || self.below.contains(&x)
    }

    /// Push up: moves the members of `set` that lie below the pivot to the
    /// front of the upper part, keeping their relative order. Members already
    /// above the pivot stay where they are.
    pub fn push_up(&self, set: &[usize]) -> Result<Vec<usize>, SurgeryError> {
        let set: HashSet<usize> = set.iter().copied().collect();
        if set.contains(&self.pivot) {
            return Err(SurgeryError::PivotInSet);
        }
        if !set.iter().all(|&x| self.contains(x)) {
            return Err(SurgeryError::IndexOutOfRange);
        }
        let mut list: Vec<usize> = self
            .below
            .iter()
            .copied()
            .filter(|x| set.contains(x))
            .collect();
        list.extend_from_slice(&self.above);
        list.push(self.pivot);
        list.extend(self.below.iter().copied().filter(|x| !set.contains(x)));
        Ok(list)
    }

    /// Push down: moves `set` (which must lie above the pivot) below it, to
    /// the back of the lower part, keeping relative order.
    pub fn push_down(&self, set: &[usize]) -> Result<Vec<usize>, SurgeryError> {
        let set: HashSet<usize> = set.iter().copied().collect();
        if set.contains(&self.pivot) {
            return Err(SurgeryError::PivotInSet);
        }
        if !set.iter().all(|&x| self.above.contains(&x)) {
            return Err(SurgeryError::NotAbovePivot);
        }
        let mut list: Vec<usize> = self
            .above
            .iter()
            .copied()
            .filter(|x| !set.contains(x))
            .collect();
        list.push(self.pivot);
        list.extend_from_slice(&self.below);
        list.extend(self.above.iter().copied().filter(|x| set.contains(x)));
        Ok(list)
    }

    /// Single promotion: lifts `x` from below the pivot to the slot
    /// immediately above it. This is the canonical inconspicuous misreport.
    pub fn promote_above_pivot(&self, x: usize) -> Result<Vec<usize>, SurgeryError> {
        if x == self.pivot {
            return Err(SurgeryError::PivotInSet);
        }
        if !self.below.contains(&x) {
            return Err(SurgeryError::NotAbovePivot);
        }
        let mut list = self.above.clone();
        list.push(x);
        list.push(self.pivot);
        list.extend(self.below.iter().copied().filter(|&y| y != x));
        Ok(list)
    }

    /// Reassembled list without any changes.
    pub fn to_list(&self) -> Vec<usize> {
        let mut list = self.above.clone();
        list.push(self.pivot);
        list.extend_from_slice(&self.below);
        list
    }
}

/// A perfect matching between men and women, stored both ways for O(1)
/// lookups. `μ(m) = w ⟺ μ(w) = m` by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    man_to_woman: Vec<usize>,
    woman_to_man: Vec<usize>,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum MatchingError {
    #[error("assignment is not a permutation")]
    NotAPermutation,
}

impl Matching {
    pub fn from_man_to_woman(man_to_woman: Vec<usize>) -> Result<Self, MatchingError> {
        let n = man_to_woman.len();
        if !is_permutation(&man_to_woman, n) {
            return Err(MatchingError::NotAPermutation);
        }
        let mut woman_to_man = vec![0; n];
        for (m, &w) in man_to_woman.iter().enumerate() {
            woman_to_man[w] = m;
        }
        Ok(Self {
            man_to_woman,
            woman_to_man,
        })
    }

    pub fn n(&self) -> usize {
        self.man_to_woman.len()
    }

    /// The woman matched to man `m`.
    pub fn woman_of(&self, m: usize) -> usize {
        self.man_to_woman[m]
    }

    /// The man matched to woman `w`.
    pub fn man_of(&self, w: usize) -> usize {
        self.woman_to_man[w]
    }

    pub fn man_to_woman(&self) -> &[usize] {
        &self.man_to_woman
    }

    /// `(man, woman)` pairs in man order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.man_to_woman.iter().copied().enumerate()
    }
}

/// The ordered list of proposals made during one deferred-acceptance run.
///
/// Per man the proposed women follow his submitted list from the top down;
/// lemma-level checks compare traces as sets of `(man, woman)` pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProposalTrace {
    proposals: Vec<(usize, usize)>,
}

impl ProposalTrace {
    pub(crate) fn from_vec(proposals: Vec<(usize, usize)>) -> Self {
        Self { proposals }
    }

    pub fn len(&self) -> usize {
        self.proposals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.proposals.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.proposals.iter().copied()
    }

    /// The proposal set `P`, forgetting execution order.
    pub fn to_set(&self) -> HashSet<(usize, usize)> {
        self.proposals.iter().copied().collect()
    }

    /// Women proposed to by man `m`, in proposal order.
    pub fn by_man(&self, m: usize) -> Vec<usize> {
        self.proposals
            .iter()
            .filter(|&&(p, _)| p == m)
            .map(|&(_, w)| w)
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Text and JSON formats
// ---------------------------------------------------------------------------

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: list for {agent} repeats {entry}")]
    DuplicateEntry {
        line: usize,
        agent: String,
        entry: String,
    },
    #[error("line {line}: list for {agent} has {got} entries, expected {expected}")]
    IncompleteList {
        line: usize,
        agent: String,
        got: usize,
        expected: usize,
    },
    #[error("{men} men vs {women} women declared")]
    SizeMismatch { men: usize, women: usize },
}

fn malformed(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError::MalformedLine {
        line,
        reason: reason.into(),
    }
}

/// Parses an agent token such as `m3` or `w12` into (side, 0-based index).
fn parse_agent_token(tok: &str) -> Option<(Side, usize)> {
    let side = match tok.as_bytes().first()? {
        b'm' => Side::Men,
        b'w' => Side::Women,
        _ => return None,
    };
    let idx: usize = tok[1..].parse().ok()?;
    if idx == 0 {
        return None;
    }
    Some((side, idx - 1))
}

struct ParsedLine {
    line_no: usize,
    entries: Vec<usize>,
}

impl PreferenceProfile {
    /// Parses the line-oriented profile format:
    ///
    /// ```text
    /// n=4
    /// m1: w3 w2 w1 w4
    /// ...
    /// w1: m4 m3 m1 m2
    /// ...
    /// ```
    ///
    /// Lines starting with `#` are comments; agent lines may appear in any
    /// order. Entries on a man's line are women (`w<j>`) and vice versa.
    /// External names are 1-indexed, the API is 0-indexed:
    ///
    /// ```
    /// use matchaudit::PreferenceProfile;
    ///
    /// let p = PreferenceProfile::parse("n=2\nm1: w2 w1\nm2: w1 w2\nw1: m1 m2\nw2: m2 m1\n")?;
    /// assert_eq!(p.man_list(0), &[1, 0]);
    /// assert_eq!(p.man_rank(0, 1), 0);
    /// # Ok::<(), matchaudit::model::ParseError>(())
    /// ```
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut n: Option<usize> = None;
        let mut men: Vec<Option<ParsedLine>> = Vec::new();
        let mut women: Vec<Option<ParsedLine>> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("n=").or_else(|| line.strip_prefix("n =")) {
                if n.is_some() {
                    return Err(malformed(line_no, "duplicate n= declaration"));
                }
                let v: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| malformed(line_no, format!("invalid size `{}`", rest.trim())))?;
                if v == 0 {
                    return Err(malformed(line_no, "n must be positive"));
                }
                n = Some(v);
                continue;
            }
            let (head, tail) = line
                .split_once(':')
                .ok_or_else(|| malformed(line_no, "expected `<agent>: <list>`"))?;
            let (side, agent) = parse_agent_token(head.trim()).ok_or_else(|| {
                malformed(line_no, format!("invalid agent name `{}`", head.trim()))
            })?;
            let agent_name = format!("{}{}", side.letter(), agent + 1);
            let entry_side = match side {
                Side::Men => Side::Women,
                Side::Women => Side::Men,
            };
            let mut entries = Vec::new();
            let mut seen = HashSet::new();
            for tok in tail.split_whitespace() {
                let (s, e) = parse_agent_token(tok)
                    .filter(|&(s, _)| s == entry_side)
                    .ok_or_else(|| {
                        malformed(
                            line_no,
                            format!("invalid entry `{tok}` in list for {agent_name}"),
                        )
                    })?;
                debug_assert_eq!(s, entry_side);
                if !seen.insert(e) {
                    return Err(ParseError::DuplicateEntry {
                        line: line_no,
                        agent: agent_name,
                        entry: tok.to_string(),
                    });
                }
                entries.push(e);
            }
            let slot_list = match side {
                Side::Men => &mut men,
                Side::Women => &mut women,
            };
            if slot_list.len() <= agent {
                slot_list.resize_with(agent + 1, || None);
            }
            if slot_list[agent].is_some() {
                return Err(malformed(
                    line_no,
                    format!("list for {agent_name} given twice"),
                ));
            }
            slot_list[agent] = Some(ParsedLine { line_no, entries });
        }

        let n = n.ok_or_else(|| malformed(1, "missing n= declaration"))?;
        let defined = |v: &[Option<ParsedLine>]| v.iter().filter(|x| x.is_some()).count();
        let (men_count, women_count) = (defined(&men), defined(&women));
        if men_count != women_count {
            return Err(ParseError::SizeMismatch {
                men: men_count,
                women: women_count,
            });
        }

        let finish =
            |side: Side, rows: Vec<Option<ParsedLine>>| -> Result<Vec<Vec<usize>>, ParseError> {
                if rows.len() > n {
                    let line = rows
                        .last()
                        .and_then(|r| r.as_ref().map(|p| p.line_no))
                        .unwrap_or(1);
                    return Err(malformed(line, format!("agent index exceeds n={n}")));
                }
                let mut out = Vec::with_capacity(n);
                for agent in 0..n {
                    let name = format!("{}{}", side.letter(), agent + 1);
                    let parsed = rows.get(agent).and_then(|r| r.as_ref()).ok_or(
                        ParseError::IncompleteList {
                            line: 1,
                            agent: name.clone(),
                            got: 0,
                            expected: n,
                        },
                    )?;
                    for &e in &parsed.entries {
                        if e >= n {
                            return Err(malformed(
                                parsed.line_no,
                                format!("entry index {} out of range for n={n}", e + 1),
                            ));
                        }
                    }
                    if parsed.entries.len() < n {
                        return Err(ParseError::IncompleteList {
                            line: parsed.line_no,
                            agent: name,
                            got: parsed.entries.len(),
                            expected: n,
                        });
                    }
                    out.push(parsed.entries.clone());
                }
                Ok(out)
            };

        let men_prefs = finish(Side::Men, men)?;
        let women_prefs = finish(Side::Women, women)?;
        // A full, duplicate-free, in-range list of length n is a permutation,
        // so this cannot fail.
        Ok(Self::new(men_prefs, women_prefs).expect("validated above"))
    }

    /// Canonical text form; `parse(to_text())` round-trips exactly.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for (m, list) in self.men_prefs.iter().enumerate() {
            out.push_str(&format!("m{}:", m + 1));
            for &w in list {
                out.push_str(&format!(" w{}", w + 1));
            }
            out.push('\n');
        }
        for (w, list) in self.women_prefs.iter().enumerate() {
            out.push_str(&format!("w{}:", w + 1));
            for &m in list {
                out.push_str(&format!(" m{}", m + 1));
            }
            out.push('\n');
        }
        out
    }

    /// Parses the JSON form `{"n":…, "men":[[…]], "women":[[…]]}` (1-indexed).
    pub fn parse_json(text: &str) -> Result<Self, ParseError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| malformed(e.line().max(1), e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| malformed(1, "expected a JSON object"))?;
        let n = obj
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| malformed(1, "missing numeric field `n`"))? as usize;
        if n == 0 {
            return Err(malformed(1, "n must be positive"));
        }
        let side_lists = |key: &str, side: Side| -> Result<Vec<Vec<usize>>, ParseError> {
            let rows = obj
                .get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| malformed(1, format!("missing array field `{key}`")))?;
            let mut out = Vec::with_capacity(rows.len());
            for (agent, row) in rows.iter().enumerate() {
                let name = format!("{}{}", side.letter(), agent + 1);
                let row = row
                    .as_array()
                    .ok_or_else(|| malformed(1, format!("list for {name} is not an array")))?;
                let mut entries = Vec::with_capacity(row.len());
                let mut seen = HashSet::new();
                for v in row {
                    let e = v
                        .as_u64()
                        .filter(|&e| e >= 1)
                        .ok_or_else(|| malformed(1, format!("bad entry in list for {name}")))?
                        as usize;
                    if e > n {
                        return Err(malformed(
                            1,
                            format!("entry index {e} out of range for n={n}"),
                        ));
                    }
                    if !seen.insert(e) {
                        return Err(ParseError::DuplicateEntry {
                            line: 1,
                            agent: name.clone(),
                            entry: e.to_string(),
                        });
                    }
                    entries.push(e - 1);
                }
                if entries.len() < n {
                    return Err(ParseError::IncompleteList {
                        line: 1,
                        agent: name,
                        got: entries.len(),
                        expected: n,
                    });
                }
                out.push(entries);
            }
            Ok(out)
        };
        let men = side_lists("men", Side::Men)?;
        let women = side_lists("women", Side::Women)?;
        if men.len() != women.len() {
            return Err(ParseError::SizeMismatch {
                men: men.len(),
                women: women.len(),
            });
        }
        if men.len() != n {
            return Err(malformed(
                1,
                format!("expected {n} lists per side, got {}", men.len()),
            ));
        }
        Ok(Self::new(men, women).expect("validated above"))
    }

    /// JSON form with 1-indexed entries, mirroring [`Self::parse_json`].
    pub fn to_json(&self) -> String {
        let bump = |prefs: &[Vec<usize>]| -> Vec<Vec<usize>> {
            prefs
                .iter()
                .map(|l| l.iter().map(|&x| x + 1).collect())
                .collect()
        };
        serde_json::to_string_pretty(&serde_json::json!({
            "n": self.n,
            "men": bump(&self.men_prefs),
            "women": bump(&self.women_prefs),
        }))
        .expect("serializing plain arrays cannot fail")
    }

    /// Auto-detects the text vs JSON format by the first non-space byte.
    pub fn parse_auto(text: &str) -> Result<Self, ParseError> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse(text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INTRO: &str = include_str!("../tests/fixtures/intro.txt");

    #[test]
    fn parse_intro_example() {
        let p = PreferenceProfile::parse(INTRO).unwrap();
        assert_eq!(p.n(), 4);
        // m1: w3 w2 w1 w4
        assert_eq!(p.man_list(0), &[2, 1, 0, 3]);
        // w1: m4 m3 m1 m2
        assert_eq!(p.woman_list(0), &[3, 2, 0, 1]);
        assert_eq!(p.man_rank(0, 2), 0);
        assert_eq!(p.woman_rank(0, 1), 3);
    }

    #[test]
    fn parse_minimal_instance() {
        let p = PreferenceProfile::parse("n=1\nm1: w1\nw1: m1\n").unwrap();
        assert_eq!(p.n(), 1);
        assert_eq!(p.man_list(0), &[0]);
        assert_eq!(p.woman_list(0), &[0]);
    }

    #[test]
    fn parse_duplicate_entry() {
        let err = PreferenceProfile::parse("m1: w1 w1").unwrap_err();
        assert!(
            matches!(err, ParseError::DuplicateEntry { line: 1, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn parse_incomplete_list() {
        let err =
            PreferenceProfile::parse("n=2\nm1: w1\nm2: w1 w2\nw1: m1 m2\nw2: m2 m1\n").unwrap_err();
        assert!(
            matches!(
                err,
                ParseError::IncompleteList {
                    line: 2,
                    got: 1,
                    expected: 2,
                    ..
                }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn parse_size_mismatch() {
        let err = PreferenceProfile::parse("n=2\nm1: w1 w2\nm2: w2 w1\nw1: m1 m2\n").unwrap_err();
        assert_eq!(err, ParseError::SizeMismatch { men: 2, women: 1 });
    }

    #[test]
    fn parse_rejects_out_of_range_and_bad_names() {
        let err = PreferenceProfile::parse("n=2\nm1: w1 w3\nm2: w2 w1\nw1: m1 m2\nw2: m2 m1\n")
            .unwrap_err();
        assert!(
            matches!(err, ParseError::MalformedLine { line: 2, .. }),
            "{err:?}"
        );
        let err = PreferenceProfile::parse("n=1\nq1: w1\nw1: m1\n").unwrap_err();
        assert!(
            matches!(err, ParseError::MalformedLine { line: 2, .. }),
            "{err:?}"
        );
        let err = PreferenceProfile::parse("n=1\nm1: m1\nw1: m1\n").unwrap_err();
        assert!(
            matches!(err, ParseError::MalformedLine { line: 2, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn parse_comments_and_order_insensitive() {
        let text = "# a comment\nw1: m1\n\nn=1\nm1: w1\n";
        let p = PreferenceProfile::parse(text).unwrap();
        assert_eq!(p.to_text(), "n=1\nm1: w1\nw1: m1\n");
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let p = PreferenceProfile::parse(INTRO).unwrap();
        let text = p.to_text();
        let q = PreferenceProfile::parse(&text).unwrap();
        assert_eq!(p, q);
        assert_eq!(q.to_text(), text);
    }

    #[test]
    fn json_round_trip() {
        let p = PreferenceProfile::parse(INTRO).unwrap();
        let q = PreferenceProfile::parse_json(&p.to_json()).unwrap();
        assert_eq!(p, q);
        assert!(PreferenceProfile::parse_auto(&p.to_json()).is_ok());
    }

    #[test]
    fn split_at_intro_examples() {
        let p = PreferenceProfile::parse(INTRO).unwrap();
        // m1 split at his match w3: nothing above.
        let s = p.split_at(0, 2).unwrap();
        assert_eq!(
            s,
            SplitPreference {
                above: vec![],
                pivot: 2,
                below: vec![1, 0, 3]
            }
        );
        // m3 (list w2 w4 w1 w3) split at w4.
        let s = p.split_at(2, 3).unwrap();
        assert_eq!(
            s,
            SplitPreference {
                above: vec![1],
                pivot: 3,
                below: vec![0, 2]
            }
        );
        assert_eq!(p.split_at(0, 9).unwrap_err(), SurgeryError::IndexOutOfRange);
    }

    #[test]
    fn push_up_examples() {
        let p = PreferenceProfile::parse(INTRO).unwrap();
        let s = p.split_at(0, 2).unwrap();
        // Promote w1 above m1's match w3.
        assert_eq!(s.push_up(&[0]).unwrap(), vec![0, 2, 1, 3]);
        assert_eq!(s.push_up(&[]).unwrap(), p.man_list(0));
        assert_eq!(s.push_up(&[2]).unwrap_err(), SurgeryError::PivotInSet);
    }

    #[test]
    fn push_down_examples() {
        let p = PreferenceProfile::parse(INTRO).unwrap();
        // m3 split at w4: above = [w2].
        let s = p.split_at(2, 3).unwrap();
        assert_eq!(s.push_down(&[1]).unwrap(), vec![3, 0, 2, 1]);
        assert_eq!(s.push_down(&[]).unwrap(), p.man_list(2));
        // Pushing the whole upper part leaves the pivot first.
        assert_eq!(s.push_down(&s.above.clone()).unwrap()[0], 3);
        assert_eq!(s.push_down(&[0]).unwrap_err(), SurgeryError::NotAbovePivot);
        assert_eq!(s.push_down(&[3]).unwrap_err(), SurgeryError::PivotInSet);
    }

    #[test]
    fn promote_above_pivot_is_adjacent() {
        let p = PreferenceProfile::parse(INTRO).unwrap();
        let s = p.split_at(2, 3).unwrap(); // m3: above=[w2], below=[w1, w3]
        assert_eq!(s.promote_above_pivot(0).unwrap(), vec![1, 0, 3, 2]);
    }

    #[test]
    fn matching_validates_permutation() {
        assert!(Matching::from_man_to_woman(vec![1, 0, 2]).is_ok());
        assert_eq!(
            Matching::from_man_to_woman(vec![1, 1, 2]).unwrap_err(),
            MatchingError::NotAPermutation
        );
        let mu = Matching::from_man_to_woman(vec![2, 0, 1]).unwrap();
        assert_eq!(mu.man_of(2), 0);
        assert_eq!(mu.woman_of(1), 0);
    }
}
