//! Questions about the agent's own position, and the decaying atom.
//!
//! A de se question partitions worlds rather than states, so the same state
//! can answer differently depending on the evidence it is paired with (for
//! example "how many more flips" or "how many years from now").

use std::fmt::Write as _;

use crate::density::{belief_region, Density, FnDensity};
use crate::error::{Error, Result};
use crate::genprob::{CellKey, ProbabilityStructure, Question};
use crate::normality::{EvidenceId, Frame, StateId, World};
use crate::numeric::Real;
use crate::scalar::Probability;

/// Builds a de se question from a labelling of (state, evidence) pairs.
/// Each label becomes one answer within each body of evidence.
pub fn dese_question(frame: &Frame, label: impl Fn(StateId, EvidenceId) -> String) -> Question {
    Question::DeSe(
        frame
            .evidence()
            .iter()
            .enumerate()
            .map(|(e, ev)| ev.members().iter().map(|&s| CellKey::Shared(label(s, EvidenceId(e)))).collect())
            .collect(),
    )
}

/// The de se question that asks what a de dicto question asks, in every world.
pub fn lift(frame: &Frame, q: &Question) -> Result<Question> {
    let key = |s: StateId| -> CellKey {
        match q {
            Question::DeDicto(keys) => keys[s.0].clone(),
            _ => CellKey::Split(frame.state(s).name.clone()),
        }
    };
    match q {
        Question::DeSe(_) => Ok(q.clone()),
        Question::DeDicto(keys) if keys.len() != frame.states().len() => {
            Err(Error::Structure("question does not label every state".into()))
        }
        _ => Ok(Question::DeSe(
            frame
                .evidence()
                .iter()
                .map(|ev| ev.members().iter().map(|&s| key(s)).collect())
                .collect(),
        )),
    }
}

/// Probability, given the world's evidence, of the cell of the evidence's
/// question partition containing the world's state.
pub fn dese_likeliness<P: Probability>(ps: &ProbabilityStructure<P>, w: World) -> Result<P> {
    ps.likeliness(w)
}

/// How answers "decays r years from now" are placed on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measuring {
    /// `m(q_r) = r`
    Index,
    /// `m(q_r) = ln r`
    Logarithmic,
}

/// Set of believed delays `r`, with `lo_open` when `lo` itself is excluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayInterval<F> {
    pub lo: F,
    pub hi: F,
    pub lo_open: bool,
    pub mass: F,
}

impl<F: Real> DelayInterval<F> {
    pub fn contains(&self, r: F) -> bool {
        (r > self.lo || (!self.lo_open && r == self.lo)) && r <= self.hi
    }
}

/// Exponential decay from creation (time 0), observed at `now` not yet decayed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayModel<F> {
    pub measuring: Measuring,
    /// Decay rate; the mean lifetime is its reciprocal.
    pub rate: F,
    pub threshold: F,
}

impl<F: Real> DecayModel<F> {
    pub fn new(measuring: Measuring, threshold: F) -> Result<Self> {
        Self::with_rate(measuring, F::one(), threshold)
    }

    pub fn with_rate(measuring: Measuring, rate: F, threshold: F) -> Result<Self> {
        if !(threshold > F::zero()) || threshold > F::one() {
            return Err(Error::Threshold(format!("{threshold:?}")));
        }
        if !(rate > F::zero()) || !rate.is_finite() {
            return Err(Error::Parameter(format!("decay rate must be positive, got {rate:?}")));
        }
        Ok(DecayModel { measuring, rate, threshold })
    }

    fn check_now(now: F) -> Result<()> {
        if !(now >= F::zero()) || !now.is_finite() {
            return Err(Error::Parameter(format!("evidence must be (t, ∞) with t >= 0, got t = {now:?}")));
        }
        Ok(())
    }

    /// Density of the decay time `s` given that it exceeds `now` (right
    /// limit at `s = now`).
    pub fn conditional_pdf(&self, now: F, s: F) -> F {
        if s < now {
            return F::zero();
        }
        self.rate * (-self.rate * s).exp() / (-self.rate * now).exp()
    }

    fn conditional_survival(&self, now: F, s: F) -> F {
        if s <= now {
            F::one()
        } else {
            (-self.rate * s).exp() / (-self.rate * now).exp()
        }
    }

    /// Density of the world where the atom decays at `later`, seen from `now`.
    pub fn density(&self, now: F, later: F) -> Result<F> {
        Self::check_now(now)?;
        if !(later > now) {
            return Err(Error::Parameter(format!(
                "malformed world: decay time {later:?} is not after the evidence time {now:?}"
            )));
        }
        let r = later - now;
        let f = self.conditional_pdf(now, later);
        Ok(match self.measuring {
            Measuring::Index => f,
            Measuring::Logarithmic => r * f,
        })
    }

    /// Density over measured coordinates of the answers given evidence `(now, ∞)`.
    pub fn measured_density(&self, now: F) -> Result<FnDensity<F>> {
        Self::check_now(now)?;
        let me = *self;
        Ok(match self.measuring {
            Measuring::Index => FnDensity::new(move |r: F| me.conditional_pdf(now, now + r), (F::zero(), F::infinity()))
                .with_mode(F::zero())
                .with_cdf(move |r: F| F::one() - me.conditional_survival(now, now + r.max(F::zero()))),
            Measuring::Logarithmic => FnDensity::new(
                move |x: F| {
                    let r = x.exp();
                    if r.is_infinite() {
                        F::zero()
                    } else {
                        r * me.conditional_pdf(now, now + r)
                    }
                },
                (F::neg_infinity(), F::infinity()),
            )
            .with_mode(-me.rate.ln())
            .with_cdf(move |x: F| F::one() - me.conditional_survival(now, now + x.exp())),
        })
    }

    /// Believed delays given evidence `(now, ∞)`.
    pub fn belief_interval(&self, now: F) -> Result<DelayInterval<F>> {
        let d = self.measured_density(now)?;
        let region = belief_region(&d, self.threshold)?;
        let (a, b) = region
            .bounds()
            .ok_or_else(|| Error::Numeric("empty belief region".into()))?;
        Ok(match self.measuring {
            Measuring::Index => DelayInterval { lo: a, hi: b, lo_open: a <= F::zero(), mass: region.mass },
            Measuring::Logarithmic => DelayInterval { lo: a.exp(), hi: b.exp(), lo_open: false, mass: region.mass },
        })
    }

    /// Whether decaying `r` years after `now` is doxastically possible.
    pub fn doxastically_possible(&self, now: F, r: F) -> Result<bool> {
        Ok(r > F::zero() && self.belief_interval(now)?.contains(r))
    }
}

/// The same atom, asked the de dicto question "how many years after its
/// creation will it decay", measured logarithmically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeDictoReport<F> {
    /// Believed delays from now under the de dicto question.
    pub dedicto: DelayInterval<F>,
    /// Believed delays from now under the de se question.
    pub dese: DelayInterval<F>,
    /// Probability, given the evidence, that it decays within its first year.
    pub first_year: F,
    /// The same probability at creation.
    pub first_year_at_creation: F,
}

impl<F: Real> DeDictoReport<F> {
    /// Whether decay arbitrarily soon from now is doxastically possible
    /// under the de dicto question.
    pub fn immediate_decay_possible(&self) -> bool {
        self.dedicto.lo <= F::c(1e-9)
    }
}

/// Density of `ln s` for the decay time `s` given `s > now`.
pub fn dedicto_density<F: Real>(model: &DecayModel<F>, now: F) -> Result<FnDensity<F>> {
    DecayModel::check_now(now)?;
    let me = *model;
    let lo = if now > F::zero() { now.ln() } else { F::neg_infinity() };
    Ok(FnDensity::new(
        move |x: F| {
            let s = x.exp();
            if s.is_infinite() {
                F::zero()
            } else {
                s * me.conditional_pdf(now, s)
            }
        },
        (lo, F::infinity()),
    )
    .with_mode((-me.rate.ln()).max(lo))
    .with_cdf(move |x: F| F::one() - me.conditional_survival(now, x.exp())))
}

pub fn dedicto_contrast<F: Real>(model: &DecayModel<F>, now: F) -> Result<DeDictoReport<F>> {
    let d = dedicto_density(model, now)?;
    let region = belief_region(&d, model.threshold)?;
    let (a, b) = region.bounds().ok_or_else(|| Error::Numeric("empty belief region".into()))?;
    let lo = (a.exp() - now).max(F::zero());
    let dedicto = DelayInterval { lo, hi: b.exp() - now, lo_open: lo <= F::zero(), mass: region.mass };
    let dese = DecayModel { measuring: Measuring::Logarithmic, ..*model }.belief_interval(now)?;
    let one = F::one();
    let first_year = if now >= one { F::zero() } else { one - model.conditional_survival(now, one) };
    Ok(DeDictoReport { dedicto, dese, first_year, first_year_at_creation: one - model.conditional_survival(F::zero(), one) })
}

/// Samples `f^I`, `f^ln` (over coordinate `x`) and `d^I`, `d^ln` (over the
/// delay `r = x`) given evidence `(now, ∞)`, as CSV.
pub fn decay_curves_csv(now: f64, lo: f64, hi: f64, n: usize) -> Result<String> {
    let idx = DecayModel::new(Measuring::Index, 0.5)?;
    let log = DecayModel::new(Measuring::Logarithmic, 0.5)?;
    let (fi, fl) = (idx.measured_density(now)?, log.measured_density(now)?);
    let mut out = String::from("x,f_index,f_log,d_index,d_log\n");
    let n = n.max(2);
    for i in 0..n {
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let (di, dl) = if x > 0.0 {
            (idx.density(now, now + x)?, log.density(now, now + x)?)
        } else {
            (0.0, 0.0)
        };
        let _ = writeln!(out, "{x},{},{},{di},{dl}", fi.pdf(x), fl.pdf(x));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn densities_match_closed_forms() {
        let i = DecayModel::new(Measuring::Index, 0.9).unwrap();
        let l = DecayModel::new(Measuring::Logarithmic, 0.9).unwrap();
        assert!((i.density(0.5, 1.5).unwrap() - (-1f64).exp()).abs() < 1e-15);
        assert!((l.density(1.0, 3.0).unwrap() - 2.0 * (-2f64).exp()).abs() < 1e-15);
        assert!(matches!(i.density(2.0, 1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn log_density_peaks_at_one() {
        let l = DecayModel::new(Measuring::Logarithmic, 0.9).unwrap();
        let peak = l.density(0.0, 1.0).unwrap();
        for r in [0.5, 0.9, 0.99, 1.01, 1.1, 2.0] {
            assert!(l.density(0.0, r).unwrap() < peak);
        }
    }

    #[test]
    fn index_interval_is_open_at_zero() {
        let i = DecayModel::new(Measuring::Index, 0.95f64).unwrap();
        let b = i.belief_interval(0.0).unwrap();
        assert!(b.lo_open && b.lo == 0.0);
        assert!((b.hi - 20f64.ln()).abs() < 1e-6);
        assert!(!b.contains(0.0) && b.contains(1e-12));
    }

    #[test]
    fn curves_have_four_columns() {
        let csv = decay_curves_csv(0.0, -2.0, 4.0, 13).unwrap();
        assert!(csv.lines().skip(1).all(|l| l.split(',').count() == 5));
    }
}
