//! Several fair coins are each flipped until they land heads, all flipping
//! together on each trial.
//!
//! A state is the vector of flip counts, one per coin. The engines below
//! compute exact answer distributions for five coarse questions about the
//! whole experiment, aggregated into cells that carry closed-form bounds on
//! the tails and trials of their member states.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::genprob::{Cell, CellTable, Residual, SufficiencyRule};
use crate::scalar::{pow2_inv, Rational};

pub const COINS: usize = 10;
/// Default number of total-tails values enumerated before the certified tail.
pub const DEFAULT_DEPTH: u32 = 128;
/// Total-tails depth for outcome shapes, whose count grows quickly.
pub const SHAPE_DEPTH: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RacingQuestion {
    ExactOutcome,
    OutcomeShape,
    TotalTails,
    HowLongUntilOver,
    HowManyEndTogether,
}

impl RacingQuestion {
    pub const ALL: [RacingQuestion; 5] = [
        RacingQuestion::ExactOutcome,
        RacingQuestion::OutcomeShape,
        RacingQuestion::TotalTails,
        RacingQuestion::HowLongUntilOver,
        RacingQuestion::HowManyEndTogether,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RacingQuestion::ExactOutcome => "exact outcome",
            RacingQuestion::OutcomeShape => "outcome shape",
            RacingQuestion::TotalTails => "how many total tails",
            RacingQuestion::HowLongUntilOver => "how long until over",
            RacingQuestion::HowManyEndTogether => "how many end together",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim().to_ascii_lowercase().replace(['-', '_'], " ");
        Self::ALL.into_iter().find(|q| {
            q.name() == s
                || matches!(
                    (q, s.as_str()),
                    (RacingQuestion::ExactOutcome, "exact")
                        | (RacingQuestion::OutcomeShape, "shape")
                        | (RacingQuestion::TotalTails, "tails" | "total tails")
                        | (RacingQuestion::HowLongUntilOver, "duration" | "how long")
                        | (RacingQuestion::HowManyEndTogether, "together" | "end together")
                )
        })
    }
}

impl fmt::Display for RacingQuestion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A count that may be unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(n) => write!(f, "{n}"),
            Bound::Infinite => f.write_str("∞"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SameEnd {
    Yes,
    No,
    Maybe,
}

impl fmt::Display for SameEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SameEnd::Yes => "yes",
            SameEnd::No => "no",
            SameEnd::Maybe => "maybe",
        })
    }
}

/// Extremes over the states in a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellStats {
    pub min_tails: u64,
    pub max_tails: Bound,
    pub min_trials: u64,
    pub max_trials: Bound,
    /// Some member has every coin ending on the same trial.
    pub some_same: bool,
    /// Some member has coins ending on different trials.
    pub some_different: bool,
}

/// One answer (or `copies` equiprobable answers) with the stats of its states.
#[derive(Debug, Clone, PartialEq)]
pub struct RacingCell {
    pub label: String,
    /// Probability of each copy.
    pub mass: Rational,
    pub copies: BigUint,
    pub stats: CellStats,
}

/// A racing outcome: the flip on which each coin first lands heads.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RacingState(Vec<u32>);

impl RacingState {
    pub fn new(flips: Vec<u32>) -> Result<Self> {
        if flips.is_empty() || flips.contains(&0) {
            return Err(Error::Parameter("every coin needs at least one flip".into()));
        }
        Ok(RacingState(flips))
    }

    pub fn flips(&self) -> &[u32] {
        &self.0
    }

    /// Product of independent geometric(1/2) laws.
    pub fn prior(&self) -> Rational {
        pow2_inv(self.0.iter().sum())
    }

    pub fn tails(&self) -> u64 {
        self.0.iter().map(|&f| f as u64 - 1).sum()
    }

    pub fn trials(&self) -> u64 {
        self.0.iter().copied().max().unwrap_or(0) as u64
    }
}

#[derive(Debug, Clone)]
pub struct AnswerDistribution {
    pub question: RacingQuestion,
    pub coins: usize,
    pub cells: Vec<RacingCell>,
    /// Unlisted answers beyond the truncation depth.
    pub residual: Option<Residual<Rational>>,
}

impl AnswerDistribution {
    pub fn table(&self) -> CellTable<Rational> {
        CellTable::new(
            self.cells
                .iter()
                .map(|c| Cell::with_copies(c.label.clone(), c.mass.clone(), c.copies.clone()))
                .collect(),
            self.residual.clone(),
        )
    }

    /// Listed plus residual mass.
    pub fn total(&self) -> Rational {
        self.table().total()
    }

    /// Probability of the cell with this label (all copies together).
    pub fn mass_of(&self, label: &str) -> Option<Rational> {
        self.cells
            .iter()
            .find(|c| c.label == label)
            .map(|c| c.mass.clone() * Rational::from_integer(c.copies.clone().into()))
    }
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn count(n: &BigUint) -> Rational {
    Rational::from_integer(n.clone().into())
}

/// Probability of `tails` tails in total: negative binomial.
fn total_tails_mass(coins: usize, tails: u32) -> Rational {
    count(&binomial(big(tails as u64 + coins as u64 - 1), big(coins as u64 - 1))) * pow2_inv(coins as u32 + tails)
}

fn tails_stats(coins: usize, t: u64) -> CellStats {
    let n = coins as u64;
    CellStats {
        min_tails: t,
        max_tails: Bound::Finite(t),
        min_trials: t.div_ceil(n) + 1,
        max_trials: Bound::Finite(t + 1),
        some_same: t % n == 0,
        some_different: t > 0 && n > 1,
    }
}

fn tails_residual(depth: u32, listed: &Rational, max_cell: Rational) -> Option<Residual<Rational>> {
    let mass = Rational::one() - listed.clone();
    (!mass.is_zero()).then_some(Residual { mass, max_cell, depth })
}

fn exact_outcome(coins: usize, depth: u32) -> AnswerDistribution {
    let mut listed = Rational::zero();
    let cells = (0..depth)
        .map(|t| {
            let copies = binomial(big(t as u64 + coins as u64 - 1), big(coins as u64 - 1));
            let mass = pow2_inv(coins as u32 + t);
            listed = listed.clone() + mass.clone() * count(&copies);
            let label = if t == 0 { "all heads on the first flip".to_string() } else { format!("an outcome with {t} tails") };
            RacingCell { label, mass, copies, stats: tails_stats(coins, t as u64) }
        })
        .collect();
    let residual = tails_residual(depth, &listed, pow2_inv(coins as u32 + depth));
    AnswerDistribution { question: RacingQuestion::ExactOutcome, coins, cells, residual }
}

fn total_tails(coins: usize, depth: u32) -> Result<AnswerDistribution> {
    if (depth as usize) < coins {
        return Err(Error::Parameter(format!("total-tails depth must be at least {coins}")));
    }
    let mut listed = Rational::zero();
    let cells = (0..depth)
        .map(|t| {
            let mass = total_tails_mass(coins, t);
            listed = listed.clone() + mass.clone();
            RacingCell {
                label: format!("{t} total tails"),
                mass,
                copies: BigUint::one(),
                stats: tails_stats(coins, t as u64),
            }
        })
        .collect();
    // the negative binomial decreases beyond its mode, so the first unlisted
    // value bounds every unlisted cell
    let residual = tails_residual(depth, &listed, total_tails_mass(coins, depth));
    Ok(AnswerDistribution { question: RacingQuestion::TotalTails, coins, cells, residual })
}

fn all_done_by(coins: usize, d: u32) -> Rational {
    let p = Rational::one() - pow2_inv(d);
    let mut acc = Rational::one();
    for _ in 0..coins {
        acc = acc * p.clone();
    }
    acc
}

fn how_long(coins: usize, depth: u32) -> Result<AnswerDistribution> {
    let n = coins as u64;
    let cells: Vec<RacingCell> = (1..=depth)
        .map(|d| {
            let d64 = d as u64;
            RacingCell {
                label: format!("ends on trial {d}"),
                mass: all_done_by(coins, d) - all_done_by(coins, d - 1),
                copies: BigUint::one(),
                stats: CellStats {
                    min_tails: d64 - 1,
                    max_tails: Bound::Finite(n * (d64 - 1)),
                    min_trials: d64,
                    max_trials: Bound::Finite(d64),
                    some_same: true,
                    some_different: d > 1 && n > 1,
                },
            }
        })
        .collect();
    let next = all_done_by(coins, depth + 1) - all_done_by(coins, depth);
    if cells.last().is_some_and(|c| c.mass < next) {
        return Err(Error::Parameter(format!("duration depth {depth} is before the mode")));
    }
    let mass = Rational::one() - all_done_by(coins, depth);
    let residual = (!mass.is_zero()).then_some(Residual { mass, max_cell: next, depth });
    Ok(AnswerDistribution { question: RacingQuestion::HowLongUntilOver, coins, cells, residual })
}

/// Partitions of `total` into at most `parts` positive parts, non-increasing.
fn partitions(total: u32, parts: usize, max: u32, prefix: &mut Vec<u32>, out: &mut impl FnMut(&[u32])) {
    if total == 0 {
        out(prefix);
        return;
    }
    if parts == 0 {
        return;
    }
    for p in (1..=max.min(total)).rev() {
        prefix.push(p);
        partitions(total - p, parts - 1, p, prefix, out);
        prefix.pop();
    }
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |a, k| a * big(k))
}

/// Label such as "6×1 flip, 3×2 flips, 1×3 flips".
pub fn shape_label(flips: &[u32]) -> String {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for &f in flips {
        *counts.entry(f).or_default() += 1;
    }
    counts
        .iter()
        .map(|(f, c)| format!("{c}×{f} flip{}", if *f == 1 { "" } else { "s" }))
        .collect::<Vec<_>>()
        .join(", ")
}

fn outcome_shape(coins: usize, depth: u32) -> Result<AnswerDistribution> {
    let n = coins as u64;
    let nf = factorial(n);
    let mut cells = Vec::new();
    let mut listed = Rational::zero();
    for t in 0..depth {
        let scale = pow2_inv(coins as u32 + t);
        partitions(t, coins, t, &mut Vec::new(), &mut |tails| {
            let mut flips: Vec<u32> = tails.iter().map(|x| x + 1).collect();
            flips.resize(coins, 1);
            let mut counts: HashMap<u32, u64> = HashMap::new();
            for &f in &flips {
                *counts.entry(f).or_default() += 1;
            }
            let ways = counts.values().fold(nf.clone(), |a, &c| a / factorial(c));
            let mass = count(&ways) * scale.clone();
            listed = listed.clone() + mass.clone();
            let trials = *flips.iter().max().unwrap_or(&1) as u64;
            cells.push(RacingCell {
                label: shape_label(&flips),
                mass,
                copies: BigUint::one(),
                stats: CellStats {
                    min_tails: t as u64,
                    max_tails: Bound::Finite(t as u64),
                    min_trials: trials,
                    max_trials: Bound::Finite(trials),
                    some_same: counts.len() == 1,
                    some_different: counts.len() > 1,
                },
            });
        });
    }
    // no shape has more than n! orderings
    let residual = tails_residual(depth, &listed, count(&nf) * pow2_inv(coins as u32 + depth));
    Ok(AnswerDistribution { question: RacingQuestion::OutcomeShape, coins, cells, residual })
}

/// Distribution of the largest number of coins landing heads on one trial.
pub fn end_together_distribution(coins: usize) -> BTreeMap<usize, Rational> {
    fn go(a: usize, b: usize, memo: &mut HashMap<(usize, usize), BTreeMap<usize, Rational>>) -> BTreeMap<usize, Rational> {
        if a == 0 {
            return BTreeMap::from([(b, Rational::one())]);
        }
        if let Some(v) = memo.get(&(a, b)) {
            return v.clone();
        }
        // condition on at least one of the `a` active coins landing heads
        let stay = pow2_inv(a as u32);
        let norm = Rational::one() - stay.clone();
        let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
        for h in 1..=a {
            let p = count(&binomial(big(a as u64), big(h as u64))) * stay.clone() / norm.clone();
            for (k, v) in go(a - h, b.max(h), memo) {
                let e = out.entry(k).or_insert_with(Rational::zero);
                *e = e.clone() + p.clone() * v;
            }
        }
        memo.insert((a, b), out.clone());
        out
    }
    go(coins, 0, &mut HashMap::new())
}

fn end_together(coins: usize) -> AnswerDistribution {
    let n = coins as u64;
    let cells = end_together_distribution(coins)
        .into_iter()
        .map(|(k, mass)| {
            let k64 = k as u64;
            RacingCell {
                label: format!("{k} at once"),
                mass,
                copies: BigUint::one(),
                stats: CellStats {
                    // groups of k coins ending on trials 1, 2, 3, ...
                    min_tails: (0..n).map(|i| i / k64).sum(),
                    max_tails: Bound::Infinite,
                    min_trials: n.div_ceil(k64),
                    max_trials: Bound::Infinite,
                    some_same: k64 == n,
                    some_different: k64 < n,
                },
            }
        })
        .collect();
    AnswerDistribution { question: RacingQuestion::HowManyEndTogether, coins, cells, residual: None }
}

/// Exact answer distribution. `depth` bounds the enumerated total tails (or
/// trials, for the duration question); outcome shapes use at most
/// [`SHAPE_DEPTH`].
pub fn answer_distribution(q: RacingQuestion, coins: usize, depth: u32) -> Result<AnswerDistribution> {
    if coins == 0 {
        return Err(Error::Parameter("at least one coin is needed".into()));
    }
    if depth == 0 {
        return Err(Error::Parameter("depth must be positive".into()));
    }
    match q {
        RacingQuestion::ExactOutcome => Ok(exact_outcome(coins, depth)),
        RacingQuestion::OutcomeShape => outcome_shape(coins, depth.min(SHAPE_DEPTH)),
        RacingQuestion::TotalTails => total_tails(coins, depth),
        RacingQuestion::HowLongUntilOver => how_long(coins, depth),
        RacingQuestion::HowManyEndTogether => Ok(end_together(coins)),
    }
}

/// What is believed at the start of the experiment, summarised.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefSummary {
    pub question: RacingQuestion,
    pub threshold: Rational,
    /// Labels of the most likely answers.
    pub most_normal: Vec<String>,
    /// Labels of the believed answers, most likely first.
    pub believed: Vec<String>,
    pub min_tails: u64,
    pub max_tails: Bound,
    pub min_trials: u64,
    pub max_trials: Bound,
    pub same_end: SameEnd,
}

pub fn summarize(dist: &AnswerDistribution, t: &Rational, rule: SufficiencyRule) -> Result<BeliefSummary> {
    let table = dist.table();
    let mut believed = table.believed(t, rule)?;
    believed.sort_by(|&a, &b| dist.cells[b].mass.cmp(&dist.cells[a].mass).then(a.cmp(&b)));
    let first = believed
        .first()
        .map(|&i| dist.cells[i].stats)
        .ok_or_else(|| Error::Structure("nothing is believed".into()))?;
    let mut s = first;
    for &i in &believed {
        let c = &dist.cells[i].stats;
        s.min_tails = s.min_tails.min(c.min_tails);
        s.max_tails = s.max_tails.max(c.max_tails);
        s.min_trials = s.min_trials.min(c.min_trials);
        s.max_trials = s.max_trials.max(c.max_trials);
        s.some_same |= c.some_same;
        s.some_different |= c.some_different;
    }
    let same_end = match (s.some_same, s.some_different) {
        (true, false) => SameEnd::Yes,
        (false, _) => SameEnd::No,
        (true, true) => SameEnd::Maybe,
    };
    Ok(BeliefSummary {
        question: dist.question,
        threshold: t.clone(),
        most_normal: table.modal().into_iter().map(|i| dist.cells[i].label.clone()).collect(),
        believed: believed.into_iter().map(|i| dist.cells[i].label.clone()).collect(),
        min_tails: s.min_tails,
        max_tails: s.max_tails,
        min_trials: s.min_trials,
        max_trials: s.max_trials,
        same_end,
    })
}

pub fn racing_summary(q: RacingQuestion, coins: usize, t: &Rational, depth: u32) -> Result<BeliefSummary> {
    summarize(&answer_distribution(q, coins, depth)?, t, SufficiencyRule::Sufficiency)
}

/// All five questions at each threshold, in question order.
pub fn racing_table(coins: usize, thresholds: &[Rational], depth: u32) -> Result<Vec<BeliefSummary>> {
    let mut rows = Vec::new();
    for q in RacingQuestion::ALL {
        let dist = answer_distribution(q, coins, depth)?;
        for t in thresholds {
            rows.push(summarize(&dist, t, SufficiencyRule::Sufficiency)?);
        }
    }
    Ok(rows)
}

pub const TABLE_COLUMNS: [&str; 8] =
    ["Q", "most normal", "t", "min tails", "max tails", "min trials", "max trials", "same end"];

/// Table cells as strings, one row per summary.
pub fn table_rows(rows: &[BeliefSummary]) -> Vec<[String; 8]> {
    rows.iter()
        .map(|r| {
            [
                r.question.name().to_string(),
                r.most_normal.join(" or "),
                crate::scalar::format_decimal(&r.threshold),
                r.min_tails.to_string(),
                r.max_tails.to_string(),
                r.min_trials.to_string(),
                r.max_trials.to_string(),
                r.same_end.to_string(),
            ]
        })
        .collect()
}

pub fn table_tsv(rows: &[BeliefSummary]) -> String {
    let mut out = TABLE_COLUMNS.join("\t");
    out.push('\n');
    for r in table_rows(rows) {
        out.push_str(&r.join("\t"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn distributions_sum_to_one() {
        for q in RacingQuestion::ALL {
            let d = answer_distribution(q, 10, 60).unwrap();
            assert_eq!(d.total(), Rational::one(), "{q}");
        }
    }

    #[test]
    fn closed_forms() {
        let d = answer_distribution(RacingQuestion::HowLongUntilOver, 10, 60).unwrap();
        let le4: Rational = (1..=4).map(|k| d.mass_of(&format!("ends on trial {k}")).unwrap()).sum();
        assert_eq!(le4, all_done_by(10, 4));
        let t = answer_distribution(RacingQuestion::TotalTails, 10, 60).unwrap();
        assert_eq!(t.mass_of("0 total tails").unwrap(), pow2_inv(10));
    }

    #[test]
    fn modal_shape() {
        let d = answer_distribution(RacingQuestion::OutcomeShape, 10, 30).unwrap();
        let modal: Vec<String> = d.table().modal().into_iter().map(|i| d.cells[i].label.clone()).collect();
        assert_eq!(modal, vec!["6×1 flip, 3×2 flips, 1×3 flips".to_string()]);
    }

    #[test]
    fn one_coin_matches_flipping() {
        let s = racing_summary(RacingQuestion::TotalTails, 1, &ratio(99, 100), 64).unwrap();
        assert_eq!((s.min_tails, s.max_tails), (0, Bound::Finite(6)));
        assert_eq!(s.same_end, SameEnd::Yes);
    }

    #[test]
    fn state_helpers() {
        let s = RacingState::new(vec![1, 3, 2]).unwrap();
        assert_eq!((s.tails(), s.trials()), (3, 3));
        assert_eq!(s.prior(), pow2_inv(6));
        assert!(RacingState::new(vec![0, 1]).is_err());
    }
}
