//! A small line-oriented text format for models.
//!
//! ```text
//! # seven states, two bodies of evidence
//! states: 1..7
//! evidence low = {1, 2, 3}
//! evidence high = {4..7}
//! prior: 1=.2 2=.2 3=.1 4=.2 5=.1 6=.1 7=.1
//! threshold: .5
//! rule: sufficiency
//! variant: stalnaker
//! ```
//!
//! Infinite models come from named generators instead of enumeration:
//! `generator: geometric depth=64`, `generator: racing question=shape`,
//! `generator: decay rate=1 now=1` (with `measuring: index|log`). A continuous
//! model is a single `density:` line such as `density: gaussian mu=0 sigma=1`.

mod parse;

use std::collections::BTreeSet;

use num_traits::ToPrimitive;

pub use parse::{is_valid_name, parse, parse_bytes, parse_variant, parse_with_diagnostics, Diagnostic, Severity};

use crate::density::{Density, DensityNormality, Exponential, Gaussian, Uniform, WrappedNormal};
use crate::dese::{DecayModel, Measuring};
use crate::error::{Error, Result};
use crate::genprob::{CellKey, ExactProbabilityStructure, ProbabilityStructure, Question, SufficiencyRule};
use crate::normality::{Frame, KnowledgeVariant, StateId};
use crate::scalar::{format_decimal, Rational};
use crate::scenarios::flipping::{build_flipping, FlippingConfig};
use crate::scenarios::racing::{answer_distribution, AnswerDistribution, RacingQuestion};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvidenceDecl {
    pub name: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prior {
    Uniform,
    /// One entry per state, in declaration order.
    Explicit(Vec<(String, Rational)>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuestionDecl {
    Finest,
    /// Answers as blocks of states.
    Partition(Vec<Vec<String>>),
    /// An answer label for each state.
    Labels(Vec<(String, String)>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    /// Flip a coin until heads; `bounded` adds evidence sets `{lo..hi}`.
    Geometric { depth: Option<u32>, bounded: Vec<(u32, u32)> },
    Racing { coins: u32, question: RacingQuestion, depth: Option<u32> },
    Decay { rate: Rational, now: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DensityDecl {
    Gaussian { mu: Rational, sigma: Rational },
    Uniform { lo: Rational, hi: Rational },
    Exponential { rate: Rational },
    WrappedNormal { center: Rational, sigma: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDocument {
    pub states: Vec<String>,
    pub evidence: Vec<EvidenceDecl>,
    pub prior: Prior,
    pub question: QuestionDecl,
    pub threshold: Option<Rational>,
    pub rule: Option<SufficiencyRule>,
    pub variant: Option<KnowledgeVariant>,
    pub generator: Option<Generator>,
    pub density: Option<DensityDecl>,
    pub measuring: Option<Measuring>,
}

fn dec(r: &Rational) -> String {
    format_decimal(r)
}

fn f64_of(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl ModelDocument {
    /// Canonical text; parsing it gives back an equal document.
    pub fn render(&self) -> String {
        let mut out = Vec::new();
        if !self.states.is_empty() {
            out.push(format!("states: {}", self.states.join(" ")));
        }
        for e in &self.evidence {
            out.push(format!("evidence {} = {{{}}}", e.name, e.members.join(", ")));
        }
        if !self.states.is_empty() {
            match &self.prior {
                Prior::Uniform => out.push("prior: uniform".into()),
                Prior::Explicit(p) => {
                    let items: Vec<String> = p.iter().map(|(s, v)| format!("{s}={}", dec(v))).collect();
                    out.push(format!("prior: {}", items.join(" ")));
                }
            }
        }
        match &self.question {
            QuestionDecl::Finest => {}
            QuestionDecl::Partition(blocks) => {
                let b: Vec<String> = blocks.iter().map(|b| format!("{{{}}}", b.join(", "))).collect();
                out.push(format!("question: {}", b.join(" ")));
            }
            QuestionDecl::Labels(l) => {
                let items: Vec<String> = l.iter().map(|(s, v)| format!("{s}={v}")).collect();
                out.push(format!("question: {}", items.join(" ")));
            }
        }
        if let Some(t) = &self.threshold {
            out.push(format!("threshold: {}", dec(t)));
        }
        if let Some(r) = self.rule {
            out.push(format!("rule: {}", rule_name(r)));
        }
        if let Some(v) = self.variant {
            out.push(format!("variant: {}", variant_name(v)));
        }
        match &self.generator {
            None => {}
            Some(Generator::Geometric { depth, bounded }) => {
                let mut line = "generator: geometric".to_string();
                if let Some(d) = depth {
                    line += &format!(" depth={d}");
                }
                if !bounded.is_empty() {
                    let b: Vec<String> = bounded.iter().map(|(a, b)| format!("{a}..{b}")).collect();
                    line += &format!(" bounded={}", b.join(";"));
                }
                out.push(line);
            }
            Some(Generator::Racing { coins, question, depth }) => {
                let q = question.name().replace(' ', "-");
                let mut line = format!("generator: racing coins={coins} question={q}");
                if let Some(d) = depth {
                    line += &format!(" depth={d}");
                }
                out.push(line);
            }
            Some(Generator::Decay { rate, now }) => {
                out.push(format!("generator: decay rate={} now={}", dec(rate), dec(now)));
            }
        }
        match &self.density {
            None => {}
            Some(DensityDecl::Gaussian { mu, sigma }) => {
                out.push(format!("density: gaussian mu={} sigma={}", dec(mu), dec(sigma)))
            }
            Some(DensityDecl::Uniform { lo, hi }) => out.push(format!("density: uniform lo={} hi={}", dec(lo), dec(hi))),
            Some(DensityDecl::Exponential { rate }) => out.push(format!("density: exponential rate={}", dec(rate))),
            Some(DensityDecl::WrappedNormal { center, sigma }) => {
                out.push(format!("density: wrapped-normal center={} sigma={}", dec(center), dec(sigma)))
            }
        }
        if let Some(m) = self.measuring {
            out.push(format!("measuring: {}", measuring_name(m)));
        }
        let mut s = out.join("\n");
        s.push('\n');
        s
    }

    pub fn rule(&self) -> SufficiencyRule {
        self.rule.unwrap_or(SufficiencyRule::Sufficiency)
    }

    pub fn variant(&self) -> KnowledgeVariant {
        self.variant.unwrap_or(KnowledgeVariant::Stalnakerian)
    }

    /// Builds the model. `default_depth` applies to generators without an
    /// explicit depth.
    pub fn build(&self, default_depth: u32) -> Result<Model> {
        let t = self.threshold.clone().ok_or_else(|| Error::Threshold("missing".into()))?;
        let (rule, variant) = (self.rule(), self.variant());
        if let Some(d) = &self.density {
            let density: Box<dyn Density<f64>> = match d {
                DensityDecl::Gaussian { mu, sigma } => Box::new(Gaussian::new(f64_of(mu), f64_of(sigma))?),
                DensityDecl::Uniform { lo, hi } => Box::new(Uniform::new(f64_of(lo), f64_of(hi))?),
                DensityDecl::Exponential { rate } => Box::new(Exponential { rate: f64_of(rate) }),
                DensityDecl::WrappedNormal { center, sigma } => {
                    Box::new(WrappedNormal::new(f64_of(center), f64_of(sigma))?)
                }
            };
            return Ok(Model::Density(DensityNormality::new(density, f64_of(&t))?));
        }
        match &self.generator {
            Some(Generator::Geometric { depth, bounded }) => {
                let cfg = FlippingConfig {
                    depth: depth.unwrap_or(default_depth),
                    threshold: t,
                    bounded: bounded.clone(),
                    more_flips: false,
                };
                Ok(Model::Discrete { structure: build_flipping(&cfg)?, rule, variant })
            }
            Some(Generator::Racing { coins, question, depth }) => Ok(Model::Racing {
                distribution: answer_distribution(*question, *coins as usize, depth.unwrap_or(default_depth))?,
                threshold: t,
                rule,
            }),
            Some(Generator::Decay { rate, now }) => {
                let m = self.measuring.unwrap_or(Measuring::Logarithmic);
                Ok(Model::Decay { model: DecayModel::with_rate(m, f64_of(rate), f64_of(&t))?, now: f64_of(now) })
            }
            None => Ok(Model::Discrete { structure: self.build_enumerated(t)?, rule, variant }),
        }
    }

    fn build_enumerated(&self, t: Rational) -> Result<ExactProbabilityStructure> {
        let mut b = ProbabilityStructure::builder();
        let n = self.states.len();
        let ids: Vec<StateId> = match &self.prior {
            Prior::Uniform => {
                let p = Rational::new(1.into(), (n as i64).into());
                self.states.iter().map(|s| b.state(s.clone(), p.clone())).collect()
            }
            Prior::Explicit(p) => self
                .states
                .iter()
                .map(|s| {
                    let v = p.iter().find(|(k, _)| k == s).map(|(_, v)| v.clone());
                    v.map(|v| b.state(s.clone(), v)).ok_or_else(|| Error::Model(format!("no prior for state {s:?}")))
                })
                .collect::<Result<_>>()?,
        };
        let id = |name: &str| -> Result<StateId> {
            self.states
                .iter()
                .position(|s| s == name)
                .map(|i| ids[i])
                .ok_or_else(|| Error::Model(format!("state {name:?} is not declared")))
        };
        if self.evidence.is_empty() {
            b.evidence("S", ids.iter().copied());
        }
        for e in &self.evidence {
            let members = e.members.iter().map(|m| id(m)).collect::<Result<Vec<_>>>()?;
            b.evidence(e.name.clone(), members);
        }
        match &self.question {
            QuestionDecl::Finest => {}
            QuestionDecl::Partition(blocks) => {
                let mut keys = vec![None; n];
                for block in blocks {
                    let label = format!("{{{}}}", block.join(","));
                    for s in block {
                        keys[id(s)?.0] = Some(CellKey::Shared(label.clone()));
                    }
                }
                b.question(Question::DeDicto(full_keys(keys)?));
            }
            QuestionDecl::Labels(labels) => {
                let mut keys = vec![None; n];
                for (s, l) in labels {
                    keys[id(s)?.0] = Some(CellKey::Shared(l.clone()));
                }
                b.question(Question::DeDicto(full_keys(keys)?));
            }
        }
        b.threshold(t);
        b.build()
    }
}

fn full_keys(keys: Vec<Option<CellKey>>) -> Result<Vec<CellKey>> {
    keys.into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Model("the question does not cover every state".into()))
}

pub fn rule_name(r: SufficiencyRule) -> &'static str {
    match r {
        SufficiencyRule::Sufficiency => "sufficiency",
        SufficiencyRule::SufficiencyPlus => "sufficiency-plus",
    }
}

pub fn variant_name(v: KnowledgeVariant) -> &'static str {
    match v {
        KnowledgeVariant::Stalnakerian => "stalnaker",
        KnowledgeVariant::Williamsonian => "williamson",
    }
}

pub fn measuring_name(m: Measuring) -> &'static str {
    match m {
        Measuring::Index => "index",
        Measuring::Logarithmic => "log",
    }
}

/// A built model, ready for queries.
pub enum Model {
    Discrete { structure: ExactProbabilityStructure, rule: SufficiencyRule, variant: KnowledgeVariant },
    Racing { distribution: AnswerDistribution, threshold: Rational, rule: SufficiencyRule },
    Density(DensityNormality<f64, Box<dyn Density<f64>>>),
    Decay { model: DecayModel<f64>, now: f64 },
}

/// A set of states written on the command line: `{a, b}`, `3..7`, `2..`
/// (every numbered state from 2 on, tail included) or `{2, 3, ...}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StateSetSpec {
    pub names: Vec<String>,
    pub ranges: Vec<(u64, u64)>,
    pub from: Option<u64>,
}

impl StateSetSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let inner = match (t.strip_prefix('{'), t.ends_with('}')) {
            (Some(rest), true) => &rest[..rest.len() - 1],
            (None, false) => t,
            _ => return Err(Error::Parameter(format!("unbalanced braces in {text:?}"))),
        };
        let items: Vec<&str> = inner.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        let mut spec = StateSetSpec::default();
        let mut prev: Option<u64> = None;
        let mut i = 0;
        while i < items.len() {
            let it = items[i];
            if it == "..." || it == "…" {
                let lo = prev.ok_or_else(|| Error::Parameter(format!("{text:?}: '...' needs a number before it")))?;
                match items.get(i + 1).and_then(|s| s.parse::<u64>().ok()) {
                    Some(hi) if hi >= lo => {
                        spec.ranges.push((lo, hi));
                        prev = Some(hi);
                        i += 2;
                        continue;
                    }
                    Some(_) => return Err(Error::Parameter(format!("{text:?}: decreasing range"))),
                    None if i + 1 == items.len() => {
                        spec.from = Some(lo);
                    }
                    None => return Err(Error::Parameter(format!("{text:?}: '...' must end the set or precede a number"))),
                }
            } else if let Some(lo) = it.strip_suffix("..").or_else(|| it.strip_suffix('…')) {
                let lo: u64 = lo.parse().map_err(|_| Error::Parameter(format!("bad open range {it:?}")))?;
                spec.from = Some(spec.from.map_or(lo, |f| f.min(lo)));
            } else if let Some((a, b)) = it.split_once("..") {
                match (a.parse::<u64>(), b.parse::<u64>()) {
                    (Ok(a), Ok(b)) if a <= b => {
                        spec.ranges.push((a, b));
                        prev = Some(b);
                    }
                    _ => return Err(Error::Parameter(format!("bad range {it:?}"))),
                }
            } else {
                prev = it.parse().ok();
                match prev {
                    Some(n) => spec.ranges.push((n, n)),
                    None => spec.names.push(it.to_string()),
                }
            }
            i += 1;
        }
        if spec.names.is_empty() && spec.ranges.is_empty() && spec.from.is_none() {
            return Err(Error::Parameter(format!("empty state set {text:?}")));
        }
        Ok(spec)
    }

    /// The set as one closed numeric range, when it is one.
    pub fn closed_range(&self) -> Option<(u64, u64)> {
        if !self.names.is_empty() || self.from.is_some() || self.ranges.is_empty() {
            return None;
        }
        let mut r = self.ranges.clone();
        r.sort();
        let mut acc = r[0];
        for &(a, b) in &r[1..] {
            if a > acc.1 + 1 {
                return None;
            }
            acc.1 = acc.1.max(b);
        }
        Some(acc)
    }

    /// The states of `frame` in the set, in id order.
    pub fn resolve(&self, frame: &Frame) -> Result<Vec<StateId>> {
        let mut out = BTreeSet::new();
        for n in &self.names {
            out.insert(frame.state_by_name(n).ok_or_else(|| Error::Parameter(format!("unknown state {n:?}")))?);
        }
        for (i, st) in frame.states().iter().enumerate() {
            let num = st.name.trim_end_matches('+').parse::<u64>().ok();
            let Some(num) = num else { continue };
            let hit = if st.tail {
                self.from.is_some()
            } else {
                self.ranges.iter().any(|&(a, b)| a <= num && num <= b) || self.from.is_some_and(|f| num >= f)
            };
            if hit {
                out.insert(StateId(i));
            }
        }
        if out.is_empty() {
            return Err(Error::Parameter("the state set matches no state".into()));
        }
        Ok(out.into_iter().collect())
    }
}
