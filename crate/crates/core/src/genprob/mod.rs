//! Normality from probability.
//!
//! A [`ProbabilityStructure`] fixes a prior over states, the possible bodies of
//! evidence, a question and a threshold. Worlds are ordered by the likeliness
//! of their true answer given their evidence, and one world is sufficiently
//! more normal than another when the typicality ratio drops by the threshold.

pub mod cells;

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;

pub use self::cells::{Cell, CellTable, Residual, SufficiencyRule};
use crate::error::{Error, Result};
use crate::normality::{Evidence, EvidenceId, Frame, NormalityStructure, State, StateId, World, WorldId};
use crate::relation::Relation;
use crate::scalar::Probability;

/// Which cell of the question a state (or copy of a state) falls into.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellKey {
    /// All states with this label form one answer.
    Shared(String),
    /// Every copy of the state is an answer of its own.
    Split(String),
}

impl CellKey {
    pub fn label(&self) -> &str {
        match self {
            CellKey::Shared(l) | CellKey::Split(l) => l,
        }
    }
}

/// A partition of states (de dicto) or of worlds (de se), given as labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Question {
    /// Every state (and every copy of it) is its own answer.
    Finest,
    /// One key per state.
    DeDicto(Vec<CellKey>),
    /// One key per world: indexed by evidence, then by position among the
    /// evidence's members.
    DeSe(Vec<Vec<CellKey>>),
}

#[derive(Debug, Clone)]
pub struct StateSpec<P> {
    pub name: String,
    /// Prior mass of each copy.
    pub prior: P,
    pub copies: BigUint,
}

#[derive(Debug, Clone)]
pub struct EvidenceSpec {
    pub name: String,
    pub members: Vec<StateId>,
    /// Stands for one evidence set per copy of its single member state.
    pub per_copy: bool,
}

/// Truncation tail: `state` is the most likely unenumerated state, and
/// `residual` is the prior mass of all remaining ones, each of which is
/// answer-wise no more likely than `state`. Every evidence set containing the
/// tail state contains the residual states too.
#[derive(Debug, Clone)]
pub struct TailSpec<P> {
    pub state: StateId,
    pub residual: P,
    pub depth: u32,
}

#[derive(Debug, Clone)]
struct EvidenceTable<P> {
    table: CellTable<P>,
    /// Cell index of each member world, aligned with the evidence's members.
    world_cell: Vec<usize>,
    /// Prior mass of the evidence.
    mass: P,
}

#[derive(Debug, Clone)]
pub struct ProbabilityStructure<P> {
    frame: Frame,
    states: Vec<StateSpec<P>>,
    per_copy: Vec<bool>,
    question: Question,
    threshold: P,
    tail: Option<TailSpec<P>>,
    tables: Vec<EvidenceTable<P>>,
}

#[derive(Debug, Clone)]
pub struct ProbabilityStructureBuilder<P> {
    states: Vec<StateSpec<P>>,
    evidence: Vec<EvidenceSpec>,
    question: Question,
    threshold: Option<P>,
    tail: Option<TailSpec<P>>,
    tail_flag: Vec<bool>,
}

impl<P: Probability> Default for ProbabilityStructureBuilder<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P: Probability> ProbabilityStructureBuilder<P> {
    pub fn new() -> Self {
        ProbabilityStructureBuilder {
            states: Vec::new(),
            evidence: Vec::new(),
            question: Question::Finest,
            threshold: None,
            tail: None,
            tail_flag: Vec::new(),
        }
    }

    pub fn state(&mut self, name: impl Into<String>, prior: P) -> StateId {
        self.state_with_copies(name, prior, BigUint::one())
    }

    /// A state standing for `copies` interchangeable states of equal prior.
    pub fn state_with_copies(&mut self, name: impl Into<String>, prior: P, copies: BigUint) -> StateId {
        self.states.push(StateSpec { name: name.into(), prior, copies });
        self.tail_flag.push(false);
        StateId(self.states.len() - 1)
    }

    /// The tail state of a truncated model, see [`TailSpec`].
    pub fn tail_state(&mut self, name: impl Into<String>, prior: P, residual: P, depth: u32) -> StateId {
        let id = self.state(name, prior);
        self.tail_flag[id.0] = true;
        self.tail = Some(TailSpec { state: id, residual, depth });
        id
    }

    pub fn evidence(&mut self, name: impl Into<String>, members: impl IntoIterator<Item = StateId>) -> EvidenceId {
        let mut members: Vec<StateId> = members.into_iter().collect();
        members.sort();
        members.dedup();
        self.evidence.push(EvidenceSpec { name: name.into(), members, per_copy: false });
        EvidenceId(self.evidence.len() - 1)
    }

    /// Evidence that singles out one copy of `state` (one such set per copy).
    pub fn evidence_per_copy(&mut self, name: impl Into<String>, state: StateId) -> EvidenceId {
        self.evidence.push(EvidenceSpec { name: name.into(), members: vec![state], per_copy: true });
        EvidenceId(self.evidence.len() - 1)
    }

    pub fn question(&mut self, q: Question) -> &mut Self {
        self.question = q;
        self
    }

    pub fn threshold(&mut self, t: P) -> &mut Self {
        self.threshold = Some(t);
        self
    }

    pub fn build(self) -> Result<ProbabilityStructure<P>> {
        let states: Vec<State> = self
            .states
            .iter()
            .zip(&self.tail_flag)
            .map(|(s, &t)| if t { State::tail(&s.name) } else { State::new(&s.name) })
            .collect();
        let evidence: Vec<Evidence> = self
            .evidence
            .iter()
            .map(|e| Evidence::new(&e.name, e.members.iter().copied()))
            .collect();
        let frame = Frame::new(states, evidence)?;
        let threshold = self.threshold.ok_or_else(|| Error::Threshold("missing".into()))?;
        if threshold <= P::zero() || threshold > P::one() {
            return Err(Error::Threshold(threshold.to_string()));
        }
        for s in &self.states {
            if s.prior.is_negative() {
                return Err(Error::Model(format!("negative prior for state {:?}", s.name)));
            }
        }
        let mut total = self.states.iter().fold(P::zero(), |a, s| a + s.prior.clone() * P::from_count(&s.copies));
        if let Some(t) = &self.tail {
            if t.residual.is_negative() {
                return Err(Error::Model("negative residual tail mass".into()));
            }
            total = total + t.residual.clone();
        }
        if !total.is_unit() {
            return Err(Error::Model(format!("prior mass {total} ≠ 1")));
        }
        for e in &self.evidence {
            if e.per_copy && e.members.len() != 1 {
                return Err(Error::Structure(format!("per-copy evidence {:?} must have exactly one member", e.name)));
            }
        }
        match &self.question {
            Question::Finest => {}
            Question::DeDicto(keys) if keys.len() != self.states.len() => {
                return Err(Error::Structure(format!(
                    "question labels {} states but there are {}",
                    keys.len(),
                    self.states.len()
                )))
            }
            Question::DeDicto(_) => {}
            Question::DeSe(keys) => {
                if keys.len() != self.evidence.len()
                    || keys.iter().zip(&self.evidence).any(|(k, e)| k.len() != e.members.len())
                {
                    return Err(Error::Structure("de se question does not label every world".into()));
                }
            }
        }
        let mut ps = ProbabilityStructure {
            frame,
            per_copy: self.evidence.iter().map(|e| e.per_copy).collect(),
            states: self.states,
            question: self.question,
            threshold,
            tail: self.tail,
            tables: Vec::new(),
        };
        ps.tables = (0..ps.frame.evidence().len())
            .map(|e| ps.evidence_table(EvidenceId(e)))
            .collect::<Result<_>>()?;
        Ok(ps)
    }
}

impl<P: Probability> ProbabilityStructure<P> {
    pub fn builder() -> ProbabilityStructureBuilder<P> {
        ProbabilityStructureBuilder::new()
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn threshold(&self) -> &P {
        &self.threshold
    }

    pub fn question(&self) -> &Question {
        &self.question
    }

    pub fn state_spec(&self, s: StateId) -> &StateSpec<P> {
        &self.states[s.0]
    }

    pub fn tail(&self) -> Option<&TailSpec<P>> {
        self.tail.as_ref()
    }

    /// Same structure with a different threshold.
    pub fn with_threshold(&self, t: P) -> Result<Self> {
        if t <= P::zero() || t > P::one() {
            return Err(Error::Threshold(t.to_string()));
        }
        Ok(ProbabilityStructure { threshold: t, ..self.clone() })
    }

    fn key(&self, e: EvidenceId, pos: usize) -> CellKey {
        let s = self.frame.evidence()[e.0].members()[pos];
        match &self.question {
            Question::Finest => CellKey::Split(self.states[s.0].name.clone()),
            Question::DeDicto(keys) => keys[s.0].clone(),
            Question::DeSe(keys) => keys[e.0][pos].clone(),
        }
    }

    /// Prior mass of the state's copies that lie in evidence `e`.
    fn copies_in(&self, s: StateId, e: EvidenceId) -> BigUint {
        if self.per_copy[e.0] {
            BigUint::one()
        } else {
            self.states[s.0].copies.clone()
        }
    }

    fn evidence_table(&self, e: EvidenceId) -> Result<EvidenceTable<P>> {
        let ev = &self.frame.evidence()[e.0];
        let mut cells: Vec<Cell<P>> = Vec::new();
        let mut shared: HashMap<String, usize> = HashMap::new();
        let mut world_cell = Vec::with_capacity(ev.members().len());
        let mut mass = P::zero();
        for (pos, &s) in ev.members().iter().enumerate() {
            let spec = &self.states[s.0];
            let copies = self.copies_in(s, e);
            let weight = spec.prior.clone() * P::from_count(&copies);
            mass = mass + weight.clone();
            match self.key(e, pos) {
                CellKey::Shared(label) => {
                    if let Some(&i) = shared.get(&label) {
                        cells[i].mass = cells[i].mass.clone() + weight;
                        world_cell.push(i);
                    } else {
                        shared.insert(label.clone(), cells.len());
                        world_cell.push(cells.len());
                        cells.push(Cell::new(label, weight));
                    }
                }
                CellKey::Split(label) => {
                    world_cell.push(cells.len());
                    cells.push(Cell::with_copies(label, spec.prior.clone(), copies));
                }
            }
        }
        let mut residual = None;
        if let Some(tail) = &self.tail {
            if let Some(pos) = ev.members().iter().position(|&s| s == tail.state) {
                let tc = world_cell[pos];
                if world_cell.iter().filter(|&&c| c == tc).count() != 1 {
                    return Err(Error::Structure("the tail state must be alone in its answer".into()));
                }
                if cells.iter().any(|c| c.mass < cells[tc].mass) {
                    return Err(Error::Structure(format!(
                        "in evidence {:?} the tail answer is not the least likely",
                        ev.name
                    )));
                }
                mass = mass + tail.residual.clone();
                residual = Some(Residual { mass: tail.residual.clone(), max_cell: cells[tc].mass.clone(), depth: tail.depth });
            }
        }
        if mass <= P::zero() {
            return Err(Error::Conditioning(format!("evidence {:?}", ev.name)));
        }
        let table = CellTable::conditioned(cells, residual)?;
        Ok(EvidenceTable { table, world_cell, mass })
    }

    fn locate(&self, w: World) -> Result<(usize, &EvidenceTable<P>)> {
        let ev = self
            .frame
            .evidence()
            .get(w.evidence.0)
            .ok_or_else(|| Error::Structure(format!("unknown evidence #{}", w.evidence.0)))?;
        let pos = ev
            .members()
            .binary_search(&w.state)
            .map_err(|_| Error::Structure(format!("state #{} is not in evidence {:?}", w.state.0, ev.name)))?;
        let tab = &self.tables[w.evidence.0];
        Ok((tab.world_cell[pos], tab))
    }

    /// The answer distribution given evidence `e`.
    pub fn cell_table(&self, e: EvidenceId) -> &CellTable<P> {
        &self.tables[e.0].table
    }

    /// Prior probability of the evidence.
    pub fn evidence_mass(&self, e: EvidenceId) -> &P {
        &self.tables[e.0].mass
    }

    /// Probability, given the world's evidence, of the world's true answer.
    pub fn likeliness(&self, w: World) -> Result<P> {
        let (c, tab) = self.locate(w)?;
        Ok(tab.table.likeliness(c).clone())
    }

    /// Probability, given the world's evidence, that things are no more normal than at the world.
    pub fn typicality(&self, w: World) -> Result<P> {
        let (c, tab) = self.locate(w)?;
        tab.table.typicality(c)
    }

    /// Conditional probability of a set of states given evidence `e`
    /// (the tail state counts only its own prior).
    pub fn conditional_mass(&self, states: &[StateId], e: EvidenceId) -> P {
        let ev = &self.frame.evidence()[e.0];
        let m = states
            .iter()
            .filter(|s| ev.contains(**s))
            .fold(P::zero(), |a, &s| a + self.states[s.0].prior.clone() * P::from_count(&self.copies_in(s, e)));
        m / self.tables[e.0].mass.clone()
    }

    /// Generates the normality structure.
    pub fn generate(&self, rule: SufficiencyRule) -> Result<NormalityStructure> {
        let n = self.frame.world_count();
        let mut ge = Relation::empty(n);
        let mut gg = Relation::empty(n);
        for (ei, tab) in self.tables.iter().enumerate() {
            let cell = self.frame.cell(EvidenceId(ei));
            let lam: Vec<&P> = tab.world_cell.iter().map(|&c| tab.table.likeliness(c)).collect();
            let typ: Vec<P> = tab.world_cell.iter().map(|&c| tab.table.typicality(c)).collect::<Result<_>>()?;
            let mut order: Vec<usize> = (0..cell.len()).collect();
            order.sort_by(|&a, &b| lam[a].partial_cmp(lam[b]).unwrap_or(std::cmp::Ordering::Equal));
            for u in 0..cell.len() {
                let k = order.partition_point(|&v| lam[v] <= lam[u]);
                for &v in &order[..k] {
                    ge.insert(cell[u].0, cell[v].0);
                }
                let k = order.partition_point(|&v| {
                    CellTable::sufficiently(&typ[u], lam[u], &typ[v], lam[v], &self.threshold, rule)
                });
                for &v in &order[..k] {
                    gg.insert(cell[u].0, cell[v].0);
                }
            }
        }
        NormalityStructure::new(self.frame.clone(), ge, gg)
    }

    /// Labels of the believed answers given evidence `e`, ordered by their
    /// first member state.
    pub fn believed_answers(&self, e: EvidenceId, rule: SufficiencyRule) -> Result<Vec<String>> {
        let tab = self
            .tables
            .get(e.0)
            .ok_or_else(|| Error::Structure(format!("unknown evidence #{}", e.0)))?;
        let believed = tab.table.believed(&self.threshold, rule)?;
        let mut seen = Vec::new();
        for &c in &tab.world_cell {
            if believed.contains(&c) && !seen.contains(&c) {
                seen.push(c);
            }
        }
        Ok(seen.into_iter().map(|c| tab.table.cells()[c].label.clone()).collect())
    }

    /// Finds a world whose believed states have conditional mass below the
    /// threshold in `ns`.
    pub fn threshold_witness(&self, ns: &NormalityStructure) -> Result<Option<WorldId>> {
        for (i, w) in self.frame.worlds().iter().enumerate() {
            let b = ns.doxastic(WorldId(i))?;
            let mass = self.conditional_mass(&b.states(ns), w.evidence);
            if mass < self.threshold {
                return Ok(Some(WorldId(i)));
            }
        }
        Ok(None)
    }

    pub fn check_threshold(&self, rule: SufficiencyRule) -> Result<ThresholdReport> {
        let ns = self.generate(rule)?;
        let witness = self.threshold_witness(&ns)?;
        Ok(ThresholdReport { holds: witness.is_none(), witness })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdReport {
    pub holds: bool,
    pub witness: Option<WorldId>,
}

/// Probability structure over rationals.
pub type ExactProbabilityStructure = ProbabilityStructure<crate::scalar::Rational>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normality::KnowledgeVariant;
    use crate::scalar::{ratio, Rational};

    /// Seven states, two evidence sets; two worlds with equal likeliness but
    /// different typicality.
    fn equal_likeliness() -> ExactProbabilityStructure {
        let mut b = ProbabilityStructure::builder();
        let s: Vec<StateId> = [2, 2, 1, 2, 1, 1, 1]
            .iter()
            .enumerate()
            .map(|(i, &p)| b.state((i + 1).to_string(), ratio(p, 10)))
            .collect();
        b.evidence("low", s[0..3].to_vec());
        b.evidence("high", s[3..7].to_vec());
        b.threshold(ratio(1, 2));
        b.build().unwrap()
    }

    #[test]
    fn equal_likeliness_different_typicality() {
        let ps = equal_likeliness();
        let w = World { state: StateId(2), evidence: EvidenceId(0) };
        let v = World { state: StateId(4), evidence: EvidenceId(1) };
        assert_eq!(ps.likeliness(w).unwrap(), ratio(1, 5));
        assert_eq!(ps.likeliness(v).unwrap(), ratio(1, 5));
        assert_eq!(ps.typicality(w).unwrap(), ratio(1, 5));
        assert_eq!(ps.typicality(v).unwrap(), ratio(3, 5));
        let ns = ps.generate(SufficiencyRule::Sufficiency).unwrap();
        let (wi, vi) = (ns.frame().world_id(w.state, w.evidence).unwrap(), ns.frame().world_id(v.state, v.evidence).unwrap());
        // never related across evidence cells
        assert!(!ns.at_least_as_normal(wi, vi) && !ns.at_least_as_normal(vi, wi));
    }

    #[test]
    fn least_normal_world_has_typicality_equal_to_likeliness() {
        let ps = equal_likeliness();
        let w = World { state: StateId(2), evidence: EvidenceId(0) };
        assert_eq!(ps.typicality(w).unwrap(), ps.likeliness(w).unwrap());
    }

    #[test]
    fn trivial_question() {
        let mut b = ProbabilityStructure::<Rational>::builder();
        let a = b.state("a", ratio(1, 3));
        let c = b.state("c", ratio(2, 3));
        b.evidence("all", [a, c]);
        b.question(Question::DeDicto(vec![CellKey::Shared("*".into()); 2]));
        b.threshold(ratio(9, 10));
        let ps = b.build().unwrap();
        for s in [a, c] {
            assert_eq!(ps.likeliness(World { state: s, evidence: EvidenceId(0) }).unwrap(), ratio(1, 1));
        }
        assert_eq!(ps.believed_answers(EvidenceId(0), SufficiencyRule::Sufficiency).unwrap(), vec!["*"]);
    }

    #[test]
    fn threshold_one_with_positive_priors_believes_everything() {
        let ps = equal_likeliness().with_threshold(ratio(1, 1)).unwrap();
        let ns = ps.generate(SufficiencyRule::Sufficiency).unwrap();
        assert!(ns.sufficiently_relation().is_empty());
        for w in 0..ns.frame().world_count() {
            assert_eq!(ns.doxastic(WorldId(w)).unwrap(), ns.evidential(WorldId(w)).unwrap());
        }
    }

    #[test]
    fn zero_threshold_rejected() {
        assert!(matches!(equal_likeliness().with_threshold(ratio(0, 1)), Err(Error::Threshold(_))));
        let mut b = ProbabilityStructure::<Rational>::builder();
        let a = b.state("a", ratio(1, 1));
        b.evidence("e", [a]);
        b.threshold(ratio(0, 1));
        assert!(matches!(b.build(), Err(Error::Threshold(_))));
    }

    #[test]
    fn prior_must_sum_to_one() {
        let mut b = ProbabilityStructure::<Rational>::builder();
        let a = b.state("a", ratio(99, 100));
        b.evidence("e", [a]);
        b.threshold(ratio(1, 2));
        let err = b.build().unwrap_err();
        assert_eq!(err.to_string(), "model error: prior mass 99/100 ≠ 1");
    }

    #[test]
    fn zero_mass_evidence_is_a_conditioning_error() {
        let mut b = ProbabilityStructure::<Rational>::builder();
        let a = b.state("a", ratio(1, 1));
        let z = b.state("z", ratio(0, 1));
        b.evidence("e", [a, z]);
        b.evidence("null", [z]);
        b.threshold(ratio(1, 2));
        assert!(matches!(b.build(), Err(Error::Conditioning(_))));
    }

    #[test]
    fn hand_built_structure_can_violate_threshold() {
        let ps = equal_likeliness();
        let frame = ps.frame().clone();
        let n = frame.world_count();
        // within "low": 1 ~ 2 >= 3, with 1 >> 3 and 2 >> 3; "high" all tied
        let mut ge2 = Relation::identity(n);
        for (a, c) in [(0, 1), (1, 0), (0, 2), (1, 2)] {
            ge2.insert(a, c);
        }
        for &a in frame.cell(EvidenceId(1)) {
            for &c in frame.cell(EvidenceId(1)) {
                ge2.insert(a.0, c.0);
            }
        }
        let gg = Relation::from_pairs(n, [(0, 2), (1, 2)]);
        let ns = NormalityStructure::new(frame.clone(), ge2, gg).unwrap();
        // dropping state 3 (mass 1/5) leaves 4/5 >= 1/2, so raise the bar
        let strict = ps.with_threshold(ratio(9, 10)).unwrap();
        let witness = strict.threshold_witness(&ns).unwrap();
        assert!(witness.is_some());
        assert!(strict.check_threshold(SufficiencyRule::Sufficiency).unwrap().holds);
    }

    #[test]
    fn generated_structure_is_total_per_cell() {
        let ps = equal_likeliness();
        let ns = ps.generate(SufficiencyRule::Sufficiency).unwrap();
        for w in 0..ns.frame().world_count() {
            let a = ns.epistemic(WorldId(w), KnowledgeVariant::Williamsonian).unwrap();
            let b = ns.simple_williamsonian(WorldId(w)).unwrap();
            assert_eq!(a, b);
        }
    }
}
