//! A lottery where Alice holds slightly fewer tickets than everyone else.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::genprob::{ExactProbabilityStructure, ProbabilityStructure, SufficiencyRule};
use crate::normality::KnowledgeVariant;
use crate::scalar::{ratio, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct LotteryConfig {
    pub entrants: u32,
    pub tickets_each: u32,
    pub alice_tickets: u32,
    pub threshold: Rational,
    /// Represent the other entrants by one aggregated state instead of
    /// one state each.
    pub aggregate: bool,
}

impl Default for LotteryConfig {
    fn default() -> Self {
        LotteryConfig {
            entrants: 1000,
            tickets_each: 1000,
            alice_tickets: 999,
            threshold: ratio(99, 100),
            aggregate: true,
        }
    }
}

pub fn build_lottery(cfg: &LotteryConfig) -> Result<ExactProbabilityStructure> {
    if cfg.entrants == 0 || cfg.tickets_each == 0 || cfg.alice_tickets == 0 {
        return Err(Error::Parameter("lottery needs entrants and tickets".into()));
    }
    let total = cfg.entrants as i64 * cfg.tickets_each as i64 + cfg.alice_tickets as i64;
    let mut b = ProbabilityStructure::builder();
    let mut all = vec![b.state("alice", ratio(cfg.alice_tickets as i64, total))];
    let each = ratio(cfg.tickets_each as i64, total);
    if cfg.aggregate {
        all.push(b.state_with_copies("other", each, BigUint::from(cfg.entrants)));
    } else {
        all.extend((1..=cfg.entrants).map(|i| b.state(format!("other-{i}"), each.clone())));
    }
    b.evidence("S", all);
    b.threshold(cfg.threshold.clone());
    b.build()
}

/// Whether, in a world where someone else wins, the agent knows that Alice
/// loses (Alice winning is not epistemically accessible).
pub fn knows_alice_loses(ps: &ExactProbabilityStructure, rule: SufficiencyRule, variant: KnowledgeVariant) -> Result<bool> {
    let f = ps.frame();
    let s = f.evidence_by_name("S").ok_or_else(|| Error::Structure("missing evidence S".into()))?;
    let other = f
        .state_by_name("other")
        .or_else(|| f.state_by_name("other-1"))
        .ok_or_else(|| Error::Structure("missing other entrants".into()))?;
    let alice = f.state_by_name("alice").ok_or_else(|| Error::Structure("missing alice".into()))?;
    let ns = ps.generate(rule)?;
    let k = ns.epistemic(f.world_id(other, s)?, variant)?;
    Ok(!k.contains(f.world_id(alice, s)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lottery_contrast() {
        let cfg = LotteryConfig { entrants: 200, tickets_each: 10, alice_tickets: 9, ..Default::default() };
        let ps = build_lottery(&cfg).unwrap();
        let st = KnowledgeVariant::Stalnakerian;
        assert!(knows_alice_loses(&ps, SufficiencyRule::Sufficiency, st).unwrap());
        assert!(!knows_alice_loses(&ps, SufficiencyRule::SufficiencyPlus, st).unwrap());
    }
}
