//! Combinatorial partition oracles for the mod-14 difference-condition
//! sets.
//!
//! A partition is written with weakly decreasing parts. A *window* is a
//! contiguous subsequence of parts; it satisfies the difference condition
//! `[d_1, ..., d_(j-1)]` when consecutive parts differ by exactly those
//! amounts. The base set `N` contains the partitions with
//!
//! * no window matching `[1]`, `[0,0]`, `[0,2]`, `[2,0]`, or `[0,3]`, and
//! * no window of odd weight (sum of the window's parts) matching `[3,0]`,
//!   `[0,4]`, `[4,0]`, or `[3,2*,3,0]` (`2*` = zero or more 2s).
//!
//! The refined sets restrict multiplicities `m_i` (number of parts equal
//! to `i`) and, for `N3`, additionally forbid any window of the explicit
//! shape `(2k+3), 2k, 2k-2, ..., 4, 2` with `k >= 1`:
//!
//! * `N1`: `m_1 = 0`
//! * `N2`: `m_1, m_2, m_3 <= 1`
//! * `N3`: `m_1 = m_3 = 0`, `m_2 <= 1`, no explicit-shape window
//! * `NF1`: `m_1 = 0`, `m_2 <= 1`, `m_3 <= 1`
//! * `NF5`: `m_1 <= 1`
//!
//! Membership tests return a concrete witness on failure. Enumeration uses
//! descending-part backtracking, rejecting each appended part against the
//! windows it completes, so that every visited stack is already admissible.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactalg::LaurentPoly;
use crate::qseries::TruncatedSeries;

/// Largest weight the enumerator will attempt.
pub const MAX_ENUMERATION_WEIGHT: i64 = 300;

/// A partition: weakly decreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    parts: Vec<i64>,
}

impl Partition {
    pub fn new(parts: Vec<i64>) -> Result<Self> {
        if parts.iter().any(|&p| p < 1) {
            return Err(Error::InvalidPartition(format!(
                "parts must be positive: {parts:?}"
            )));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!(
                "parts must be weakly decreasing: {parts:?}"
            )));
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[i64] {
        &self.parts
    }

    pub fn weight(&self) -> i64 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Multiplicity of the part `i`.
    pub fn multiplicity(&self, i: i64) -> i64 {
        self.parts.iter().filter(|&&p| p == i).count() as i64
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("()");
        }
        let body: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", body.join(" + "))
    }
}

/// The six difference-condition sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetName {
    N,
    N1,
    N2,
    N3,
    NF1,
    NF5,
}

impl SetName {
    pub const ALL: [SetName; 6] =
        [SetName::N, SetName::N1, SetName::N2, SetName::N3, SetName::NF1, SetName::NF5];
}

impl fmt::Display for SetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SetName::N => "N",
            SetName::N1 => "N1",
            SetName::N2 => "N2",
            SetName::N3 => "N3",
            SetName::NF1 => "NF1",
            SetName::NF5 => "NF5",
        };
        write!(f, "{s}")
    }
}

impl FromStr for SetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "N" => Ok(SetName::N),
            "N1" => Ok(SetName::N1),
            "N2" => Ok(SetName::N2),
            "N3" => Ok(SetName::N3),
            "NF1" => Ok(SetName::NF1),
            "NF5" => Ok(SetName::NF5),
            other => Err(Error::UnknownLabel(format!("partition set {other}"))),
        }
    }
}

/// Why a partition is rejected from a set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A window (1-based start position) matching a forbidden difference
    /// condition; `pattern` names it, `weight` is the window's part sum.
    Window { start: usize, parts: Vec<i64>, pattern: String, weight: i64 },
    /// A multiplicity clause `m_part <= max` failed.
    Multiplicity { part: i64, count: i64, max: i64 },
    /// A window matching the explicit shape `(2k+3), 2k, ..., 4, 2`.
    Shape { start: usize, parts: Vec<i64> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Window { start, parts, pattern, weight } => write!(
                f,
                "window {parts:?} at position {start} matches {pattern} (window weight {weight})"
            ),
            Violation::Multiplicity { part, count, max } => {
                write!(f, "part {part} occurs {count} times (allowed at most {max})")
            }
            Violation::Shape { start, parts } => {
                write!(f, "window {parts:?} at position {start} matches (2k+3), 2k, ..., 4, 2")
            }
        }
    }
}

/// Membership verdict with an optional counterexample window/clause.
#[derive(Debug, Clone)]
pub struct Admission {
    pub member: bool,
    pub witness: Option<Violation>,
}

/// Test membership of `lambda` in the named set, with a witness on
/// rejection.
pub fn admits(lambda: &Partition, set: SetName) -> Admission {
    let verdict = check_membership(lambda, set);
    Admission { member: verdict.is_none(), witness: verdict }
}

fn check_membership(lambda: &Partition, set: SetName) -> Option<Violation> {
    if let Some(v) = base_window_violation(lambda.parts()) {
        return Some(v);
    }
    let m = |i: i64| lambda.multiplicity(i);
    let mult = |part: i64, max: i64| -> Option<Violation> {
        let count = m(part);
        (count > max).then_some(Violation::Multiplicity { part, count, max })
    };
    match set {
        SetName::N => None,
        SetName::N1 => mult(1, 0),
        SetName::N2 => mult(1, 1).or_else(|| mult(2, 1)).or_else(|| mult(3, 1)),
        SetName::N3 => mult(1, 0)
            .or_else(|| mult(3, 0))
            .or_else(|| mult(2, 1))
            .or_else(|| shape_violation(lambda.parts())),
        SetName::NF1 => mult(1, 0).or_else(|| mult(2, 1)).or_else(|| mult(3, 1)),
        SetName::NF5 => mult(1, 1),
    }
}

/// Scan every window of `parts` for the base forbidden difference
/// conditions; positions are 1-based in witnesses.
fn base_window_violation(parts: &[i64]) -> Option<Violation> {
    let n = parts.len();
    for end in 1..n {
        if let Some(v) = window_violation_ending_at(parts, end) {
            return Some(v);
        }
    }
    None
}

/// Check only the windows whose last part is `parts[end]` — enough for
/// incremental enumeration, and scanning all `end` covers every window.
fn window_violation_ending_at(parts: &[i64], end: usize) -> Option<Violation> {
    if end == 0 {
        return None;
    }
    let report = |start: usize, pattern: &str| {
        let window = parts[start..=end].to_vec();
        let weight = window.iter().sum();
        Violation::Window {
            start: start + 1,
            parts: window,
            pattern: pattern.to_string(),
            weight,
        }
    };
    let d = |i: usize| parts[i] - parts[i + 1];
    // two-part window [1]
    if d(end - 1) == 1 {
        return Some(report(end - 1, "[1]"));
    }
    if end >= 2 {
        let pair = (d(end - 2), d(end - 1));
        let plain = match pair {
            (0, 0) => Some("[0,0]"),
            (0, 2) => Some("[0,2]"),
            (2, 0) => Some("[2,0]"),
            (0, 3) => Some("[0,3]"),
            _ => None,
        };
        if let Some(p) = plain {
            return Some(report(end - 2, p));
        }
        let weight: i64 = parts[end - 2..=end].iter().sum();
        if weight % 2 != 0 {
            let odd = match pair {
                (3, 0) => Some("[3,0]"),
                (0, 4) => Some("[0,4]"),
                (4, 0) => Some("[4,0]"),
                _ => None,
            };
            if let Some(p) = odd {
                return Some(report(end - 2, p));
            }
        }
    }
    // starred window [3,2*,3,0]: diffs 3, 2...2, 3, 0 ending here
    if end >= 3 && d(end - 1) == 0 && d(end - 2) == 3 {
        let mut s = end - 2;
        while s > 0 && d(s - 1) == 2 {
            s -= 1;
        }
        if s > 0 && d(s - 1) == 3 {
            let start = s - 1;
            let weight: i64 = parts[start..=end].iter().sum();
            if weight % 2 != 0 {
                return Some(report(start, "[3,2*,3,0]"));
            }
        }
    }
    None
}

/// Any window of the explicit shape `(2k+3), 2k, 2k-2, ..., 4, 2`
/// (`k >= 1`, so `5,2` then `7,4,2`, `9,6,4,2`, ...).
fn shape_violation(parts: &[i64]) -> Option<Violation> {
    let n = parts.len();
    for start in 0..n {
        let head = parts[start];
        if head < 5 || head % 2 == 0 {
            continue;
        }
        let k = (head - 3) / 2;
        let needed = usize::try_from(k).expect("shape length fits usize");
        if start + needed >= n {
            continue;
        }
        let matches = (1..=needed).all(|i| parts[start + i] == 2 * (k - i as i64 + 1));
        if matches {
            return Some(Violation::Shape {
                start: start + 1,
                parts: parts[start..=start + needed].to_vec(),
            });
        }
    }
    None
}

/// Enumerate every member of the base set `N` with weight at most
/// `max_weight`, invoking `visit(parts)` once per member (including the
/// empty partition).
pub fn enumerate_base(max_weight: i64, visit: &mut dyn FnMut(&[i64])) -> Result<()> {
    if max_weight < 0 {
        return Ok(());
    }
    if max_weight > MAX_ENUMERATION_WEIGHT {
        return Err(Error::Precondition(format!(
            "enumeration cap is weight {MAX_ENUMERATION_WEIGHT}, asked for {max_weight}"
        )));
    }
    let mut stack: Vec<i64> = Vec::new();
    visit(&stack);
    fn recurse(
        stack: &mut Vec<i64>,
        remaining: i64,
        visit: &mut dyn FnMut(&[i64]),
    ) {
        let top = stack.last().copied().unwrap_or(i64::MAX);
        let mut p = top.min(remaining);
        while p >= 1 {
            stack.push(p);
            if window_violation_ending_at(stack, stack.len() - 1).is_none() {
                visit(stack);
                recurse(stack, remaining - p, visit);
            }
            stack.pop();
            p -= 1;
        }
    }
    recurse(&mut stack, max_weight, visit);
    Ok(())
}

/// Subset clauses layered on the base difference conditions: given parts
/// already known to lie in the base set, decide membership in `set`.
pub fn subset_predicate(set: SetName, parts: &[i64]) -> bool {
    let count = |v: i64| parts.iter().filter(|&&p| p == v).count() as i64;
    match set {
        SetName::N => true,
        SetName::N1 => count(1) == 0,
        SetName::N2 => count(1) <= 1 && count(2) <= 1 && count(3) <= 1,
        SetName::N3 => {
            count(1) == 0
                && count(3) == 0
                && count(2) <= 1
                && shape_violation(parts).is_none()
        }
        SetName::NF1 => count(1) == 0 && count(2) <= 1 && count(3) <= 1,
        SetName::NF5 => count(1) <= 1,
    }
}

/// The `(x, q)` generating function `sum x^length q^weight` of the named
/// set, exact for all weights `<= max_weight`.
pub fn genfun(set: SetName, max_weight: i64) -> Result<TruncatedSeries> {
    let mut tally: BTreeMap<i64, BTreeMap<(i64, i64), BigInt>> = BTreeMap::new();
    enumerate_base(max_weight, &mut |parts| {
        if !subset_predicate(set, parts) {
            return;
        }
        let weight: i64 = parts.iter().sum();
        let len = parts.len() as i64;
        let entry = tally
            .entry(weight)
            .or_default()
            .entry((len, 0))
            .or_insert_with(BigInt::zero);
        *entry += 1;
    })?;
    let coeffs: BTreeMap<i64, LaurentPoly> = tally
        .into_iter()
        .map(|(w, xy)| (w, LaurentPoly::from_xy_terms(xy)))
        .collect();
    Ok(TruncatedSeries::from_parts(1, max_weight + 1, coeffs))
}

/// Number of members of the named set with each weight `<= max_weight`.
pub fn count_by_weight(set: SetName, max_weight: i64) -> Result<Vec<BigInt>> {
    let mut counts = vec![BigInt::zero(); usize::try_from(max_weight.max(0)).unwrap() + 1];
    enumerate_base(max_weight, &mut |parts| {
        if !subset_predicate(set, parts) {
            return;
        }
        let weight: i64 = parts.iter().sum();
        counts[weight as usize] += 1;
    })?;
    Ok(counts)
}

/// Partitions of `n` into parts whose residue mod `modulus` lies in
/// `residues` (dynamic programming, exact).
pub fn congruence_count(n: i64, modulus: i64, residues: &[i64]) -> Result<BigInt> {
    Ok(congruence_table(n, modulus, residues)?
        .pop()
        .unwrap_or_else(BigInt::one))
}

/// The table of congruence-restricted partition counts for `0..=max`.
pub fn congruence_table(max: i64, modulus: i64, residues: &[i64]) -> Result<Vec<BigInt>> {
    if modulus < 1 {
        return Err(Error::Precondition(format!("modulus must be >= 1, got {modulus}")));
    }
    if max < 0 {
        return Err(Error::Precondition(format!("count bound must be >= 0, got {max}")));
    }
    let allowed: Vec<bool> = (0..modulus)
        .map(|r| residues.iter().any(|&x| x.rem_euclid(modulus) == r))
        .collect();
    let size = usize::try_from(max).unwrap() + 1;
    let mut dp = vec![BigInt::zero(); size];
    dp[0] = BigInt::one();
    for part in 1..=max {
        if !allowed[usize::try_from(part.rem_euclid(modulus)).unwrap()] {
            continue;
        }
        let step = usize::try_from(part).unwrap();
        for w in step..size {
            let (lo, hi) = dp.split_at_mut(w);
            hi[0] += &lo[w - step];
        }
    }
    Ok(dp)
}
