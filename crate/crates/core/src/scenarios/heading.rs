//! A coin, either double-headed (`d`) or fair, is flipped 100 times.
//!
//! The 2^100 fair outcomes are grouped by number of heads: state `fair-h`
//! stands for the C(100, h) sequences with `h` heads, and `c` is the fair
//! coin landing heads every time. Seeing all heads leaves the evidence
//! `cd = {c, d}`; any other sequence is seen exactly (`seq-h`, one body of
//! evidence per sequence).

use num_bigint::BigUint;
use num_integer::binomial;

use crate::error::Result;
use crate::genprob::{CellKey, ExactProbabilityStructure, ProbabilityStructure, Question, SufficiencyRule};
use crate::normality::{KnowledgeVariant, World};
use crate::scalar::{pow2_inv, ratio, Rational};

pub const FLIPS: u32 = 100;

/// Default threshold `.9999999`.
pub fn default_threshold() -> Rational {
    ratio(9_999_999, 10_000_000)
}

/// Which question the agent is asking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadingQuestion {
    /// Which exact state obtains (every sequence is its own answer).
    Exact,
    /// Whether the coin is fair, and how many heads it lands.
    FairnessAndHeads,
}

pub fn build_heading(question: HeadingQuestion, threshold: Rational) -> Result<ExactProbabilityStructure> {
    let mut b = ProbabilityStructure::builder();
    let each = pow2_inv(FLIPS + 1);
    let d = b.state("d", ratio(1, 2));
    let mut fair = Vec::new();
    for h in 0..FLIPS {
        let copies: BigUint = binomial(BigUint::from(FLIPS), BigUint::from(h));
        fair.push(b.state_with_copies(format!("fair-{h}"), each.clone(), copies));
    }
    let c = b.state("c", each);
    let all: Vec<_> = std::iter::once(d).chain(fair.iter().copied()).chain([c]).collect();
    b.evidence("S", all);
    b.evidence("cd", [c, d]);
    for (h, &s) in fair.iter().enumerate() {
        b.evidence_per_copy(format!("seq-{h}"), s);
    }
    if question == HeadingQuestion::FairnessAndHeads {
        let mut keys = vec![CellKey::Shared("double".into())];
        keys.extend((0..FLIPS).map(|h| CellKey::Shared(format!("fair/{h}"))));
        keys.push(CellKey::Shared(format!("fair/{FLIPS}")));
        b.question(Question::DeDicto(keys));
    }
    b.threshold(threshold);
    b.build()
}

/// The accessibility facts about the all-heads worlds.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadingReport {
    pub threshold: Rational,
    /// `1 - τ(c@cd) / τ(d@cd)`.
    pub ratio_after: Rational,
    /// `1 - τ(c@S) / τ(d@S)`.
    pub ratio_before: Rational,
    /// Whether `c@cd` is outside the epistemic set of `d@cd`, per
    /// (Stalnakerian, Williamsonian).
    pub excluded_after: (bool, bool),
    /// Whether `c@S` is inside the epistemic set of `d@S`, per variant.
    pub possible_before: (bool, bool),
    pub tau_c_before: Rational,
    /// `τ(c@S)` when asking about fairness and number of heads.
    pub tau_c_before_coarse: Rational,
}

fn world(ps: &ExactProbabilityStructure, s: &str, e: &str) -> World {
    let f = ps.frame();
    World { state: f.state_by_name(s).expect("state"), evidence: f.evidence_by_name(e).expect("evidence") }
}

pub fn heading_checks(threshold: Rational) -> Result<HeadingReport> {
    let ps = build_heading(HeadingQuestion::Exact, threshold.clone())?;
    let coarse = build_heading(HeadingQuestion::FairnessAndHeads, threshold.clone())?;
    let ns = ps.generate(SufficiencyRule::Sufficiency)?;
    let f = ps.frame();
    let id = |s: &str, e: &str| {
        let w = world(&ps, s, e);
        f.world_id(w.state, w.evidence)
    };
    let (c_cd, d_cd, c_s, d_s) = (id("c", "cd")?, id("d", "cd")?, id("c", "S")?, id("d", "S")?);
    let one = Rational::from_integer(1.into());
    let ratio_of = |c: &str, d: &str, e: &str| -> Result<Rational> {
        Ok(one.clone() - ps.typicality(world(&ps, c, e))? / ps.typicality(world(&ps, d, e))?)
    };
    let k = |w, v| -> Result<(bool, bool)> {
        Ok((
            ns.epistemic(w, KnowledgeVariant::Stalnakerian)?.contains(v),
            ns.epistemic(w, KnowledgeVariant::Williamsonian)?.contains(v),
        ))
    };
    let after = k(d_cd, c_cd)?;
    Ok(HeadingReport {
        ratio_after: ratio_of("c", "d", "cd")?,
        ratio_before: ratio_of("c", "d", "S")?,
        excluded_after: (!after.0, !after.1),
        possible_before: k(d_s, c_s)?,
        tau_c_before: ps.typicality(world(&ps, "c", "S"))?,
        tau_c_before_coarse: coarse.typicality(world(&coarse, "c", "S"))?,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn priors_sum_to_one_and_d_is_half() {
        let ps = build_heading(HeadingQuestion::Exact, default_threshold()).unwrap();
        assert_eq!(ps.likeliness(world(&ps, "d", "S")).unwrap(), ratio(1, 2));
        assert_eq!(ps.likeliness(world(&ps, "c", "S")).unwrap(), pow2_inv(101));
    }

    #[test]
    fn believed_after_all_heads_is_double() {
        let ps = build_heading(HeadingQuestion::Exact, default_threshold()).unwrap();
        let e = ps.frame().evidence_by_name("cd").unwrap();
        assert_eq!(ps.believed_answers(e, SufficiencyRule::Sufficiency).unwrap(), vec!["d".to_string()]);
    }

    #[test]
    fn sequences_are_seen_exactly() {
        let ps = build_heading(HeadingQuestion::Exact, default_threshold()).unwrap();
        let w = world(&ps, "fair-37", "seq-37");
        assert_eq!(ps.likeliness(w).unwrap(), ratio(1, 1));
    }
}
