#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use epinorm::genprob::{CellKey, ExactProbabilityStructure, ProbabilityStructure, Question, SufficiencyRule};
use epinorm::normality::{EvidenceId, KnowledgeVariant, NormalityStructure, StateId, WorldId};
use epinorm::scenarios::racing::{Bound, RacingQuestion, SameEnd};
use epinorm::Rational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// A random finite structure together with the raw data it was built from.
pub struct Case {
    pub ps: ExactProbabilityStructure,
    pub rule: SufficiencyRule,
    pub prior: Vec<Rational>,
    /// Answer label of each state.
    pub labels: Vec<String>,
    pub evidence: Vec<Vec<usize>>,
    pub t: Rational,
}

/// Up to 8 states, up to 4 distinct bodies of evidence, random positive
/// rational priors, a random question and `t` in (0, 1).
pub fn random_case(rng: &mut impl Rng) -> Case {
    let n = rng.gen_range(1..=8usize);
    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=12)).collect();
    let total: i64 = weights.iter().sum();
    let prior: Vec<Rational> = weights.iter().map(|&w| q(w, total)).collect();
    let finest = rng.gen_bool(0.5);
    let labels: Vec<String> = (0..n)
        .map(|i| if finest { format!("s{i}") } else { format!("a{}", rng.gen_range(0..3)) })
        .collect();
    let want = rng.gen_range(1..=4usize);
    let mut evidence: Vec<Vec<usize>> = Vec::new();
    for _ in 0..20 {
        if evidence.len() == want {
            break;
        }
        let mut members: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
        if members.is_empty() {
            members.push(rng.gen_range(0..n));
        }
        if !evidence.contains(&members) {
            evidence.push(members);
        }
    }
    evidence.shuffle(rng);
    let t = q(rng.gen_range(1..100), 100);
    let rule = if rng.gen_bool(0.5) { SufficiencyRule::Sufficiency } else { SufficiencyRule::SufficiencyPlus };

    let mut b = ProbabilityStructure::builder();
    let ids: Vec<StateId> = (0..n).map(|i| b.state(format!("s{i}"), prior[i].clone())).collect();
    for (i, e) in evidence.iter().enumerate() {
        b.evidence(format!("E{i}"), e.iter().map(|&s| ids[s]));
    }
    if !finest {
        b.question(Question::DeDicto(labels.iter().map(|l| CellKey::Shared(l.clone())).collect()));
    }
    b.threshold(t.clone());
    let ps = b.build().expect("random structure builds");
    Case { ps, rule, prior, labels, evidence, t }
}

/// Answer masses given one body of evidence, computed from scratch.
pub fn answer_masses(case: &Case, e: usize) -> BTreeMap<String, Rational> {
    let members = &case.evidence[e];
    let total: Rational = members.iter().map(|&s| case.prior[s].clone()).sum();
    let mut out: BTreeMap<String, Rational> = BTreeMap::new();
    for &s in members {
        let m = out.entry(case.labels[s].clone()).or_insert_with(Rational::zero);
        *m = m.clone() + case.prior[s].clone() / total.clone();
    }
    out
}

/// Mass of all answers no more likely than `label`.
pub fn typicality(masses: &BTreeMap<String, Rational>, label: &str) -> Rational {
    let m = &masses[label];
    masses.values().filter(|v| *v <= m).cloned().sum()
}

/// Every violated property, described.
pub fn violations(case: &Case) -> Vec<String> {
    let mut out = Vec::new();
    let ns = match case.ps.generate(case.rule) {
        Ok(ns) => ns,
        Err(e) => return vec![format!("generation failed: {e}")],
    };
    let frame = ns.frame();
    let one = Rational::one();
    for (ei, members) in case.evidence.iter().enumerate() {
        let e = EvidenceId(ei);
        let cell: Vec<WorldId> = frame.cell(e).to_vec();
        let masses = answer_masses(case, ei);
        let label_of = |w: WorldId| case.labels[frame.world(w).unwrap().state.0].clone();

        for &a in &cell {
            if !ns.at_least_as_normal(a, a) {
                out.push(format!("E{ei}: at-least-as-normal is not reflexive"));
            }
            if ns.sufficiently_more_normal(a, a) {
                out.push(format!("E{ei}: sufficiently-more-normal is reflexive"));
            }
            for &b in &cell {
                if ns.sufficiently_more_normal(a, b) && !ns.at_least_as_normal(a, b) {
                    out.push(format!("E{ei}: axiom 5a fails"));
                }
                if !ns.at_least_as_normal(a, b) && !ns.at_least_as_normal(b, a) {
                    out.push(format!("E{ei}: incomparable worlds"));
                }
                for &c in &cell {
                    if ns.at_least_as_normal(a, b) && ns.at_least_as_normal(b, c) && !ns.at_least_as_normal(a, c) {
                        out.push(format!("E{ei}: at-least-as-normal is not transitive"));
                    }
                    for &d in &cell {
                        if ns.at_least_as_normal(a, b)
                            && ns.sufficiently_more_normal(b, c)
                            && ns.at_least_as_normal(c, d)
                            && !ns.sufficiently_more_normal(a, d)
                        {
                            out.push(format!("E{ei}: axiom 5b fails"));
                        }
                    }
                }
            }
        }
        if has_cycle(&ns, &cell) {
            out.push(format!("E{ei}: sufficiently-more-normal has a cycle"));
        }

        let slack = one.clone() - case.t.clone();
        for &w in &cell {
            let b = ns.doxastic(w).unwrap();
            let mass: Rational = b.states(&ns).iter().map(|s| case.prior[s.0].clone()).sum::<Rational>()
                / members.iter().map(|&s| case.prior[s].clone()).sum::<Rational>();
            if mass < case.t {
                out.push(format!("E{ei}: THRESHOLD fails ({mass} < {})", case.t));
            }
            if case.rule == SufficiencyRule::Sufficiency {
                let want: Vec<WorldId> =
                    cell.iter().copied().filter(|&v| typicality(&masses, &label_of(v)) > slack).collect();
                if b.worlds != want {
                    out.push(format!("E{ei}: doxastic set differs from typicality above 1 - t"));
                }
            }
            let simple = ns.simple_williamsonian(w).unwrap();
            let brute: Vec<WorldId> = cell.iter().copied().filter(|&v| !ns.sufficiently_more_normal(w, v)).collect();
            let wk = ns.epistemic(w, KnowledgeVariant::Williamsonian).unwrap();
            if simple.worlds != wk.worlds || wk.worlds != brute {
                out.push(format!("E{ei}: simple Williamsonian form differs"));
            }
            let k = ns.epistemic(w, KnowledgeVariant::Stalnakerian).unwrap();
            for &v in &k.worlds {
                let kv = ns.epistemic(v, KnowledgeVariant::Stalnakerian).unwrap();
                if !kv.worlds.iter().all(|x| k.contains(*x)) {
                    out.push(format!("E{ei}: Stalnakerian accessibility is not transitive"));
                }
            }
        }

        let believed: BTreeSet<String> = case.ps.believed_answers(e, case.rule).unwrap().into_iter().collect();
        let max = masses.values().max().unwrap();
        if masses.iter().any(|(l, m)| m == max && !believed.contains(l)) {
            out.push(format!("E{ei}: a most probable answer is not believed"));
        }
        for v in &believed {
            if masses.iter().any(|(l, m)| m >= &masses[v] && !believed.contains(l)) {
                out.push(format!("E{ei}: believed answers are not closed under at least as probable"));
            }
        }
        let bmass: Rational = believed.iter().map(|l| masses[l].clone()).sum();
        if bmass < case.t {
            out.push(format!("E{ei}: believed answers have mass {bmass} < {}", case.t));
        }
        if case.rule == SufficiencyRule::Sufficiency {
            // the least such set: the answers above some probability level
            // with enough mass, smallest first
            let mut levels: Vec<&Rational> = masses.values().collect();
            levels.sort();
            levels.dedup();
            let least = levels
                .iter()
                .rev()
                .map(|lvl| masses.iter().filter(|(_, m)| m >= lvl).map(|(l, _)| l.clone()).collect::<BTreeSet<_>>())
                .find(|s| s.iter().map(|l| masses[l].clone()).sum::<Rational>() >= case.t)
                .unwrap();
            if least != believed {
                out.push(format!("E{ei}: believed answers are not the least such set"));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn has_cycle(ns: &NormalityStructure, cell: &[WorldId]) -> bool {
    // repeatedly strip worlds with no sufficiently-more-normal predecessor
    let mut left: Vec<WorldId> = cell.to_vec();
    loop {
        let before = left.len();
        let keep: Vec<WorldId> = left
            .iter()
            .copied()
            .filter(|&v| left.iter().any(|&u| ns.sufficiently_more_normal(u, v)))
            .collect();
        left = keep;
        if left.is_empty() {
            return false;
        }
        if left.len() == before {
            return true;
        }
    }
}

/// What a brute-force enumeration of racing outcomes says is believed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSummary {
    pub most_normal: BTreeSet<String>,
    pub believed: BTreeSet<String>,
    pub min_tails: u64,
    pub max_tails: Bound,
    pub min_trials: u64,
    pub max_trials: Bound,
    pub same_end: SameEnd,
}

fn oracle_label(q: RacingQuestion, flips: &[u32]) -> String {
    let n = flips.len();
    let tails: u32 = flips.iter().map(|f| f - 1).sum();
    let trials = *flips.iter().max().unwrap();
    match q {
        RacingQuestion::ExactOutcome if tails == 0 => "all heads on the first flip".into(),
        RacingQuestion::ExactOutcome => format!("an outcome with {tails} tails"),
        RacingQuestion::OutcomeShape => {
            let mut count: BTreeMap<u32, usize> = BTreeMap::new();
            for &f in flips {
                *count.entry(f).or_default() += 1;
            }
            count
                .iter()
                .map(|(f, c)| format!("{c}×{f} {}", if *f == 1 { "flip" } else { "flips" }))
                .collect::<Vec<_>>()
                .join(", ")
        }
        RacingQuestion::TotalTails => format!("{tails} total tails"),
        RacingQuestion::HowLongUntilOver => format!("ends on trial {trials}"),
        RacingQuestion::HowManyEndTogether => {
            let mut per_trial: HashMap<u32, usize> = HashMap::new();
            for &f in flips {
                *per_trial.entry(f).or_default() += 1;
            }
            let k = per_trial.values().max().copied().unwrap_or(n);
            format!("{k} at once")
        }
    }
}

fn all_outcomes(coins: usize, max_tails: u32, f: &mut impl FnMut(&[u32])) {
    fn go(coins: usize, left: u32, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if cur.len() == coins {
            f(cur);
            return;
        }
        for extra in 0..=left {
            cur.push(extra + 1);
            go(coins, left - extra, cur, f);
            cur.pop();
        }
    }
    go(coins, max_tails, &mut Vec::new(), f)
}

/// Enumerates every outcome with at most `depth` total tails. Answers with a
/// member at that edge are reported unbounded.
pub fn racing_oracle(q: RacingQuestion, coins: usize, depth: u32, t: &Rational) -> OracleSummary {
    struct Agg {
        mass: Rational,
        min_tails: u64,
        max_tails: u64,
        min_trials: u64,
        max_trials: u64,
        same: bool,
        different: bool,
        edge: bool,
    }
    let mut answers: BTreeMap<String, Agg> = BTreeMap::new();
    let mut listed = Rational::zero();
    all_outcomes(coins, depth, &mut |flips| {
        let sum: u32 = flips.iter().sum();
        let p = Rational::new(1.into(), num_bigint::BigInt::one() << sum as usize);
        listed = listed.clone() + p.clone();
        let tails = (sum - coins as u32) as u64;
        let trials = *flips.iter().max().unwrap() as u64;
        let same = flips.iter().all(|&f| f == flips[0]);
        // for exact outcomes each state is its own answer
        let key = if q == RacingQuestion::ExactOutcome { format!("{flips:?}") } else { oracle_label(q, flips) };
        let a = answers.entry(key).or_insert(Agg {
            mass: Rational::zero(),
            min_tails: u64::MAX,
            max_tails: 0,
            min_trials: u64::MAX,
            max_trials: 0,
            same: false,
            different: false,
            edge: false,
        });
        a.mass = a.mass.clone() + p;
        a.min_tails = a.min_tails.min(tails);
        a.max_tails = a.max_tails.max(tails);
        a.min_trials = a.min_trials.min(trials);
        a.max_trials = a.max_trials.max(trials);
        a.same |= same;
        a.different |= !same;
        a.edge |= tails == depth as u64;
    });
    let residual = Rational::one() - listed;
    let max = answers.values().map(|a| a.mass.clone()).max().unwrap();
    let slack = Rational::one() - t.clone();
    let label_of = |key: &str, a: &Agg| -> String {
        if q == RacingQuestion::ExactOutcome {
            if a.min_tails == 0 {
                "all heads on the first flip".into()
            } else {
                format!("an outcome with {} tails", a.min_tails)
            }
        } else {
            key.to_string()
        }
    };
    // every unlisted answer is less likely than anything that matters here,
    // so the residual counts towards every typicality
    let mut sorted: Vec<Rational> = answers.values().map(|a| a.mass.clone()).collect();
    sorted.sort();
    let mut prefix = vec![residual.clone()];
    for m in &sorted {
        let next = prefix.last().unwrap().clone() + m.clone();
        prefix.push(next);
    }
    let typ = |m: &Rational| -> Rational { prefix[sorted.partition_point(|x| x <= m)].clone() };
    let top = typ(&max);
    let mut s = OracleSummary {
        most_normal: BTreeSet::new(),
        believed: BTreeSet::new(),
        min_tails: u64::MAX,
        max_tails: Bound::Finite(0),
        min_trials: u64::MAX,
        max_trials: Bound::Finite(0),
        same_end: SameEnd::No,
    };
    let (mut same, mut different) = (false, false);
    for (key, a) in &answers {
        if a.mass == max {
            s.most_normal.insert(label_of(key, a));
        }
        if typ(&a.mass) <= slack.clone() * top.clone() {
            continue;
        }
        s.believed.insert(label_of(key, a));
        s.min_tails = s.min_tails.min(a.min_tails);
        s.min_trials = s.min_trials.min(a.min_trials);
        let bound = |x: u64| if a.edge { Bound::Infinite } else { Bound::Finite(x) };
        s.max_tails = s.max_tails.max(bound(a.max_tails));
        s.max_trials = s.max_trials.max(bound(a.max_trials));
        same |= a.same;
        different |= a.different;
    }
    s.same_end = match (same, different) {
        (true, false) => SameEnd::Yes,
        (false, _) => SameEnd::No,
        (true, true) => SameEnd::Maybe,
    };
    s
}
