//! One PASS/FAIL line per acceptance criterion, written straight to stderr so
//! it shows even when test output is captured.

mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use common::{q, racing_oracle, random_case, violations};
use epinorm::dese::{dedicto_contrast, DecayModel, Measuring};
use epinorm::modelspec::{self, Model};
use epinorm::normality::StateId;
use epinorm::scenarios::continuous::{build_clock, build_weighing, two_sigma_mass};
use epinorm::scenarios::flipping::{build_flipping, evidence_after, states_between, FlippingConfig};
use epinorm::scenarios::heading::{default_threshold, heading_checks};
use epinorm::scenarios::lottery::{build_lottery, knows_alice_loses, LotteryConfig};
use epinorm::scenarios::racing::{
    answer_distribution, racing_table, summarize, Bound, RacingQuestion, SameEnd, DEFAULT_DEPTH,
};
use epinorm::{KnowledgeVariant, Rational, SufficiencyRule, World};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn report(n: u32, name: &str, outcome: Result<String, String>) {
    let line = match &outcome {
        Ok(detail) => format!("criterion {n:>2} {name}: PASS ({detail})\n"),
        Err(why) => format!("criterion {n:>2} {name}: FAIL ({why})\n"),
    };
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    if let Err(why) = outcome {
        panic!("criterion {n} failed: {why}");
    }
}

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn names(range: std::ops::RangeInclusive<u32>) -> Vec<String> {
    range.map(|n| n.to_string()).collect()
}

#[test]
fn criterion_01_flipping() {
    let run = || -> Result<String, String> {
        let start = Instant::now();
        let ps = build_flipping(&FlippingConfig::default()).map_err(|e| e.to_string())?;
        let ns = ps.generate(SufficiencyRule::Sufficiency).map_err(|e| e.to_string())?;
        let f = ns.frame();
        for x in 0..=30u32 {
            let e = evidence_after(&ps, x).map_err(|e| e.to_string())?;
            for &w in f.cell(e).iter().take(10) {
                let b = ns.doxastic(w).map_err(|e| e.to_string())?;
                ensure(b.exact, || format!("belief after {x} tails touches the tail"))?;
                let got = b.state_names(&ns);
                ensure(got == names(x + 1..=x + 7), || format!("after {x} tails believed {got:?}"))?;
            }
        }
        // flip n is sufficiently more normal than flip m exactly when m is
        // at least seven flips later
        let e = evidence_after(&ps, 0).map_err(|e| e.to_string())?;
        let id = |n: u32| f.world_id(StateId(n as usize - 1), e).unwrap();
        for n in 1..=40u32 {
            for m in 1..=40u32 {
                let got = ns.sufficiently_more_normal(id(n), id(m));
                ensure(got == (m >= n + 7), || format!("≫ between flips {n} and {m} is {got}"))?;
            }
        }
        within(start.elapsed(), Duration::from_secs(1))?;
        Ok(format!("x = 0..30 and n, m <= 40 exact in {:?}", start.elapsed()))
    };
    report(1, "flipping", run());
}

#[test]
fn criterion_02_discovery() {
    let run = || -> Result<String, String> {
        let cfg = FlippingConfig { bounded: vec![(1, 7)], ..Default::default() };
        let ps = build_flipping(&cfg).map_err(|e| e.to_string())?;
        let ns = ps.generate(SufficiencyRule::Sufficiency).map_err(|e| e.to_string())?;
        let f = ns.frame();
        let start = evidence_after(&ps, 0).map_err(|e| e.to_string())?;
        let believed = |w| ns.doxastic(w).map(|b| b.state_names(&ns)).map_err(|e| e.to_string());

        let w = f.world_id(StateId(1), start).unwrap();
        let r = ns.revision_report(w, &states_between(&ps, 2, None)).map_err(|e| e.to_string())?;
        let (before, after) = (believed(w)?, believed(r.discovered)?);
        ensure(before == names(1..=7) && after == names(2..=8), || format!("{before:?} then {after:?}"))?;
        ensure(!r.agm_preservation_holds, || "preservation reported to hold".into())?;

        let w = f.world_id(StateId(0), start).unwrap();
        let r = ns.revision_report(w, &states_between(&ps, 1, Some(7))).map_err(|e| e.to_string())?;
        let after = believed(r.discovered)?;
        ensure(after == names(1..=6), || format!("learning 1..7 leaves {after:?}"))?;
        ensure(!r.agm_inclusion_holds, || "inclusion reported to hold".into())?;
        Ok("1..7 to 2..8 after learning 2.., and 1..6 after learning 1..7".into())
    };
    report(2, "discovery", run());
}

#[test]
fn criterion_03_heading() {
    let run = || -> Result<String, String> {
        let start = Instant::now();
        let r = heading_checks(default_threshold()).map_err(|e| e.to_string())?;
        let big = Rational::from_integer(num_bigint::BigInt::from(1u8) << 100usize);
        let want_after = big.clone() / (big + Rational::from_integer(1.into()));
        ensure(r.excluded_after == (true, true), || format!("excluded after: {:?}", r.excluded_after))?;
        ensure(r.possible_before == (true, true), || format!("possible before: {:?}", r.possible_before))?;
        ensure(r.ratio_after == want_after, || format!("ratio after {}", r.ratio_after))?;
        ensure(r.ratio_before == q(1, 2), || format!("ratio before {}", r.ratio_before))?;
        ensure(r.tau_c_before == q(1, 2), || format!("τ(c@S) = {}", r.tau_c_before))?;
        within(start.elapsed(), Duration::from_secs(1))?;
        Ok(format!("both variants, exact ratios, {:?}", start.elapsed()))
    };
    report(3, "heading", run());
}

type PublishedRow = (RacingQuestion, (i64, i64), u64, Option<u64>, u64, Option<u64>, SameEnd);

fn published() -> Vec<PublishedRow> {
    use RacingQuestion::*;
    use SameEnd::*;
    let (a, b) = ((3, 4), (19, 20));
    vec![
        (ExactOutcome, a, 0, Some(13), 1, Some(14), Maybe),
        (ExactOutcome, b, 0, Some(18), 1, Some(19), Maybe),
        (OutcomeShape, a, 1, Some(15), 2, Some(8), No),
        (OutcomeShape, b, 0, Some(22), 1, Some(12), Maybe),
        (TotalTails, a, 5, Some(14), 1, Some(15), Maybe),
        (TotalTails, b, 2, Some(18), 1, Some(19), Maybe),
        (HowLongUntilOver, a, 2, Some(50), 3, Some(6), Maybe),
        (HowLongUntilOver, b, 1, Some(70), 2, Some(8), Maybe),
        (HowManyEndTogether, a, 3, None, 2, None, No),
        (HowManyEndTogether, b, 2, None, 2, None, No),
    ]
}

fn bound(b: Option<u64>) -> Bound {
    b.map_or(Bound::Infinite, Bound::Finite)
}

#[test]
fn criterion_04_racing() {
    let run = || -> Result<String, String> {
        let start = Instant::now();
        for question in RacingQuestion::ALL {
            for t in [q(3, 4), q(19, 20)] {
                let dist = answer_distribution(question, 3, 40).map_err(|e| e.to_string())?;
                let got = summarize(&dist, &t, SufficiencyRule::Sufficiency).map_err(|e| e.to_string())?;
                let want = racing_oracle(question, 3, 40, &t);
                let same = got.believed.iter().cloned().collect::<BTreeSet<_>>() == want.believed
                    && (got.min_tails, got.max_tails, got.min_trials, got.max_trials, got.same_end)
                        == (want.min_tails, want.max_tails, want.min_trials, want.max_trials, want.same_end);
                ensure(same, || format!("3-coin oracle disagrees on {} at {t}", question.name()))?;
            }
        }
        let rows = racing_table(10, &[q(3, 4), q(19, 20)], DEFAULT_DEPTH).map_err(|e| e.to_string())?;
        let mut bad = Vec::new();
        let mut cells = 0;
        for (question, (n, d), min_tails, max_tails, min_trials, max_trials, same_end) in published() {
            let t = q(n, d);
            let row = rows
                .iter()
                .find(|r| r.question == question && r.threshold == t)
                .ok_or_else(|| format!("no row for {} at {t}", question.name()))?;
            let checks = [
                ("min tails", row.min_tails == min_tails, row.min_tails.to_string()),
                ("max tails", row.max_tails == bound(max_tails), row.max_tails.to_string()),
                ("min trials", row.min_trials == min_trials, row.min_trials.to_string()),
                ("max trials", row.max_trials == bound(max_trials), row.max_trials.to_string()),
                ("same end", row.same_end == same_end, row.same_end.to_string()),
            ];
            for (column, ok, value) in checks {
                cells += 1;
                if !ok {
                    bad.push(format!("{} at {n}/{d} {column} = {value}", question.name()));
                }
            }
        }
        within(start.elapsed(), Duration::from_secs(300))?;
        ensure(bad.is_empty(), || format!("{}/{cells} cells differ: {}", bad.len(), bad.join("; ")))?;
        Ok(format!("{cells} cells and the 3-coin oracle agree in {:?}", start.elapsed()))
    };
    report(4, "racing table", run());
}

#[test]
fn criterion_05_weighing() {
    let run = || -> Result<String, String> {
        let t = two_sigma_mass();
        let mut worst = 0.0f64;
        for (mu, sigma) in [(0.0, 1.0), (70.0, 0.5), (-3.0, 4.0), (1000.0, 25.0)] {
            let w = build_weighing(mu, sigma, t).map_err(|e| e.to_string())?;
            let r = w.belief_region().map_err(|e| e.to_string())?;
            let (lo, hi) = r.bounds().ok_or("empty region")?;
            ensure(r.intervals.len() == 1, || format!("{} intervals", r.intervals.len()))?;
            let err = ((lo - (mu - 2.0 * sigma)).abs()).max((hi - (mu + 2.0 * sigma)).abs()) / sigma;
            worst = worst.max(err);
            ensure(err < 1e-6, || format!("endpoints off by {err}σ at μ = {mu}, σ = {sigma}"))?;
        }
        let literal = build_weighing(0.0, 1.0, 0.9545).and_then(|w| w.belief_region()).map_err(|e| e.to_string())?;
        let literal_err = (literal.bounds().unwrap().1 - 2.0).abs();
        Ok(format!("t = {t}, worst endpoint error {worst:.1e}σ; t = .9545 would be off by {literal_err:.2e}σ"))
    };
    report(5, "weighing", run());
}

#[test]
fn criterion_06_clock() {
    let run = || -> Result<String, String> {
        let clock = build_clock(0.3).map_err(|e| e.to_string())?;
        let mut last = 0.0;
        for k in 1..=99 {
            let t = k as f64 / 100.0;
            for apparent in [0.0, 1.0, 3.0, 6.0] {
                let arc = clock.belief_arc(apparent, t).map_err(|e| e.to_string())?;
                ensure((arc.left - arc.right).abs() < 1e-9, || format!("asymmetric arc at t = {t}: {arc:?}"))?;
                ensure(arc.mass >= t - 1e-9, || format!("mass {} below t = {t}", arc.mass))?;
                ensure(arc.contains(apparent), || format!("arc misses the apparent reading at t = {t}"))?;
            }
            let width = clock.belief_arc(0.0, t).map_err(|e| e.to_string())?.width();
            ensure(width > last, || format!("width {width} at t = {t} does not grow"))?;
            last = width;
        }
        Ok("symmetric, mass >= t, width increasing over t = .01..=.99".into())
    };
    report(6, "clock", run());
}

#[test]
fn criterion_07_decay() {
    let run = || -> Result<String, String> {
        let t = 0.95;
        let index = DecayModel::new(Measuring::Index, t).map_err(|e| e.to_string())?;
        for k in 1..=12 {
            let eps = 10f64.powi(-k);
            let ok = index.doxastically_possible(1.0, eps / 2.0).map_err(|e| e.to_string())?;
            ensure(ok, || format!("no possible delay below {eps}"))?;
        }
        let sup = index.belief_interval(1.0).map_err(|e| e.to_string())?.hi;
        let want = -(1.0 - t as f64).ln();
        ensure((sup - want).abs() < 1e-6, || format!("sup {sup}, expected {want}"))?;

        let log = DecayModel::new(Measuring::Logarithmic, t).map_err(|e| e.to_string())?;
        let i = log.belief_interval(1.0).map_err(|e| e.to_string())?;
        ensure(0.0 < i.lo && i.lo < 1.0 && 1.0 < i.hi, || format!("interval [{}, {}]", i.lo, i.hi))?;
        let (da, db) = (log.density(1.0, 1.0 + i.lo).unwrap(), log.density(1.0, 1.0 + i.hi).unwrap());
        ensure((da - db).abs() < 1e-9, || format!("endpoint densities {da} and {db}"))?;
        let shifted = log.belief_interval(6.0).map_err(|e| e.to_string())?;
        ensure((shifted.lo - i.lo).abs() < 1e-9 && (shifted.hi - i.hi).abs() < 1e-9, || {
            format!("shifted interval [{}, {}]", shifted.lo, shifted.hi)
        })?;

        let c = dedicto_contrast(&log, 1.0).map_err(|e| e.to_string())?;
        ensure(c.immediate_decay_possible(), || format!("de dicto interval starts at {}", c.dedicto.lo))?;
        ensure(c.dese.lo > 0.0, || "de se interval also admits immediate decay".into())?;
        Ok(format!("sup {sup:.9}, log interval [{:.6}, {:.6}]", i.lo, i.hi))
    };
    report(7, "decay", run());
}

#[test]
fn criterion_08_property_fuzz() {
    let run = || -> Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut failures = Vec::new();
        for i in 0..10_000 {
            let case = random_case(&mut rng);
            let v = violations(&case);
            if !v.is_empty() {
                failures.push(format!("case {i}: {}", v.join(", ")));
            }
        }
        ensure(failures.is_empty(), || {
            format!("{} violating structures, first: {}", failures.len(), failures[0])
        })?;
        Ok("10000 structures, zero violations".into())
    };
    report(8, "property fuzz", run());
}

/// Whether Alice winning stays epistemically possible in a world where
/// entrant 1 wins, computed from the ticket counts alone.
fn lottery_oracle(entrants: usize, each: i64, alice: i64, t: &Rational, plus: bool) -> bool {
    // answer 0 is Alice
    let total = entrants as i64 * each + alice;
    let mass: Vec<Rational> = std::iter::once(alice).chain(std::iter::repeat_n(each, entrants)).map(|k| q(k, total)).collect();
    let tau = |i: usize| -> Rational { mass.iter().filter(|m| **m <= mass[i]).cloned().sum() };
    let slack = Rational::from_integer(1.into()) - t.clone();
    let suff = |u: usize, v: usize| {
        tau(u) > Rational::from_integer(0.into())
            && tau(v) <= slack.clone() * tau(u)
            && (!plus || mass[v] <= slack.clone() * mass[u].clone())
    };
    let (w, v) = (1, 0);
    let undominated = !(0..mass.len()).any(|u| suff(u, v));
    let at_least = mass[v] >= mass[w];
    undominated || at_least
}

#[test]
fn criterion_09_lottery() {
    let run = || -> Result<String, String> {
        let t = q(99, 100);
        let mut out = Vec::new();
        for (rule, plus) in [(SufficiencyRule::Sufficiency, false), (SufficiencyRule::SufficiencyPlus, true)] {
            let possible = lottery_oracle(1001, 1000, 999, &t, plus);
            for aggregate in [true, false] {
                let cfg = LotteryConfig { entrants: 1001, aggregate, ..Default::default() };
                let ps = build_lottery(&cfg).map_err(|e| e.to_string())?;
                for variant in [KnowledgeVariant::Stalnakerian, KnowledgeVariant::Williamsonian] {
                    let knows = knows_alice_loses(&ps, rule, variant).map_err(|e| e.to_string())?;
                    ensure(knows == !possible, || format!("{rule:?}/{variant:?}: knows = {knows}"))?;
                }
            }
            out.push(!possible);
        }
        ensure(out == [true, false], || format!("oracle gives {out:?}"))?;
        Ok("known under Sufficiency, not under SufficiencyPlus".into())
    };
    report(9, "lottery", run());
}

#[test]
fn criterion_10_counterexample_model() {
    let run = || -> Result<String, String> {
        let text = include_str!("../../../models/equal_likeliness.model");
        let doc = modelspec::parse(text).map_err(|d| format!("{d:?}"))?;
        let Model::Discrete { structure, .. } = doc.build(64).map_err(|e| e.to_string())? else {
            return Err("not a discrete model".into());
        };
        let f = structure.frame();
        let world = |s: &str, e: &str| World { state: f.state_by_name(s).unwrap(), evidence: f.evidence_by_name(e).unwrap() };
        let (w, v) = (world("3", "low"), world("5", "high"));
        let (tw, tv) = (structure.typicality(w).unwrap(), structure.typicality(v).unwrap());
        ensure(tw == q(1, 5) && tv == q(3, 5), || format!("τ(3@low) = {tw}, τ(5@high) = {tv}"))?;
        let (lw, lv) = (structure.likeliness(w).unwrap(), structure.likeliness(v).unwrap());
        ensure(lw == lv, || format!("likeliness {lw} and {lv} differ"))?;
        Ok(format!("τ = {tw} and {tv}, equal likeliness {lw}"))
    };
    report(10, "counterexample model", run());
}
