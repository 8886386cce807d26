//! A fair coin is flipped until it lands heads.
//!
//! States `1, 2, …` count the flips (the n-th flip is the first heads, with
//! prior `2^-n`). Seeing `x` tails leaves the evidence `{x+1, x+2, …}`,
//! named `"{x+1}.."`. States beyond the truncation depth are covered by a
//! tail state named `"{depth+1}+"`.

use crate::dese::dese_question;
use crate::error::{Error, Result};
use crate::genprob::{ExactProbabilityStructure, ProbabilityStructure};
use crate::normality::{EvidenceId, StateId};
use crate::scalar::{pow2_inv, Rational};

/// Default number of enumerated states.
pub const DEFAULT_DEPTH: u32 = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct FlippingConfig {
    pub depth: u32,
    pub threshold: Rational,
    /// Extra bounded evidence sets `{lo..=hi}`, e.g. for learning "within 7 flips".
    pub bounded: Vec<(u32, u32)>,
    /// Ask "how many more flips" (de se) instead of "on which flip".
    pub more_flips: bool,
}

impl Default for FlippingConfig {
    fn default() -> Self {
        FlippingConfig {
            depth: DEFAULT_DEPTH,
            threshold: crate::scalar::ratio(99, 100),
            bounded: vec![],
            more_flips: false,
        }
    }
}

pub fn state_name(n: u32) -> String {
    n.to_string()
}

pub fn tail_name(depth: u32) -> String {
    format!("{}+", depth + 1)
}

/// Name of the evidence left after `tails` tails.
pub fn after_tails(tails: u32) -> String {
    format!("{}..", tails + 1)
}

pub fn bounded_name(lo: u32, hi: u32) -> String {
    format!("{lo}..{hi}")
}

pub fn build_flipping(cfg: &FlippingConfig) -> Result<ExactProbabilityStructure> {
    if cfg.depth < 1 {
        return Err(Error::Parameter("flipping depth must be at least 1".into()));
    }
    let d = cfg.depth;
    let mut b = ProbabilityStructure::builder();
    let states: Vec<StateId> = (1..=d).map(|n| b.state(state_name(n), pow2_inv(n))).collect();
    // the tail state stands for flip d+1; the residual covers d+2, d+3, ...
    let tail = b.tail_state(tail_name(d), pow2_inv(d + 1), pow2_inv(d + 1), d);
    for x in 0..=d {
        let members = states[x as usize..].iter().copied().chain([tail]);
        b.evidence(after_tails(x), members);
    }
    for &(lo, hi) in &cfg.bounded {
        if lo < 1 || lo > hi || hi > d {
            return Err(Error::Parameter(format!("bounded evidence {lo}..{hi} must lie within 1..{d}")));
        }
        b.evidence(bounded_name(lo, hi), (lo..=hi).map(|n| states[n as usize - 1]));
    }
    b.threshold(cfg.threshold.clone());
    if cfg.more_flips {
        // a throwaway build gives the frame the question is defined over
        let probe = b.clone();
        let frame = probe.build()?.frame().clone();
        let q = dese_question(&frame, |s, e| {
            let first = frame.evidence()[e.0].members()[0];
            let name = &frame.state(s).name;
            if frame.state(s).tail {
                format!("{}+", d + 1 - first.0 as u32)
            } else {
                let n: u32 = name.parse().unwrap_or(0);
                (n - first.0 as u32).to_string()
            }
        });
        b.question(q);
    }
    b.build()
}

/// Identifiers of states `lo..=hi`; `None` for `hi` means "and all later
/// flips, including the tail".
pub fn states_between(ps: &ExactProbabilityStructure, lo: u32, hi: Option<u32>) -> Vec<StateId> {
    let frame = ps.frame();
    (0..frame.states().len())
        .map(StateId)
        .filter(|&s| {
            let st = frame.state(s);
            if st.tail {
                return hi.is_none();
            }
            let n: u32 = st.name.parse().unwrap_or(0);
            n >= lo && hi.is_none_or(|h| n <= h)
        })
        .collect()
}

pub fn evidence_after(ps: &ExactProbabilityStructure, tails: u32) -> Result<EvidenceId> {
    ps.frame()
        .evidence_by_name(&after_tails(tails))
        .ok_or_else(|| Error::Parameter(format!("{tails} tails is beyond the truncation depth")))
}
