//! Normality structures over centered worlds.
//!
//! A world is a state paired with a body of evidence containing it. Given an
//! "at least as normal" preorder and a well-founded "sufficiently more normal"
//! relation, this module answers evidential, doxastic and epistemic
//! accessibility queries and models discovery (learning a true proposition).

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::relation::Relation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EvidenceId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WorldId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct World {
    pub state: StateId,
    pub evidence: EvidenceId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub name: String,
    /// Stands for the unenumerated remainder of a truncated infinite state
    /// space. Results containing a tail world are not exact.
    pub tail: bool,
}

impl State {
    pub fn new(name: impl Into<String>) -> Self {
        State { name: name.into(), tail: false }
    }

    pub fn tail(name: impl Into<String>) -> Self {
        State { name: name.into(), tail: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evidence {
    pub name: String,
    members: Vec<StateId>,
}

impl Evidence {
    pub fn new(name: impl Into<String>, members: impl IntoIterator<Item = StateId>) -> Self {
        let members: BTreeSet<StateId> = members.into_iter().collect();
        Evidence { name: name.into(), members: members.into_iter().collect() }
    }

    /// Member states in ascending id order.
    pub fn members(&self) -> &[StateId] {
        &self.members
    }

    pub fn contains(&self, s: StateId) -> bool {
        self.members.binary_search(&s).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnowledgeVariant {
    /// Transitive accessibility: knowing entails knowing that one knows.
    Stalnakerian,
    /// Adds a margin for error around the actual world.
    Williamsonian,
}

/// States, evidence and the derived set of worlds, without any ordering.
#[derive(Debug, Clone)]
pub struct Frame {
    states: Vec<State>,
    evidence: Vec<Evidence>,
    worlds: Vec<World>,
    index: HashMap<World, WorldId>,
    /// Worlds of each evidence cell, ordered by state id.
    cells: Vec<Vec<WorldId>>,
}

impl Frame {
    pub fn new(states: Vec<State>, evidence: Vec<Evidence>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Structure("the state set is empty".into()));
        }
        let mut seen = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if let Some(j) = seen.insert(s.name.as_str(), i) {
                return Err(Error::Structure(format!(
                    "duplicate state id {:?} (positions {j} and {i})",
                    s.name
                )));
            }
        }
        let mut names = HashMap::new();
        let mut sets = HashMap::new();
        for (i, e) in evidence.iter().enumerate() {
            if e.members.is_empty() {
                return Err(Error::Structure(format!("evidence {:?} is empty", e.name)));
            }
            if let Some(&bad) = e.members.iter().find(|s| s.0 >= states.len()) {
                return Err(Error::Structure(format!(
                    "evidence {:?} mentions unknown state #{}",
                    e.name, bad.0
                )));
            }
            if names.insert(e.name.as_str(), i).is_some() {
                return Err(Error::Structure(format!("duplicate evidence name {:?}", e.name)));
            }
            if let Some(j) = sets.insert(e.members.clone(), i) {
                return Err(Error::Structure(format!(
                    "evidence {:?} and {:?} are the same set",
                    evidence[j].name, e.name
                )));
            }
        }
        let mut worlds = Vec::new();
        let mut index = HashMap::new();
        let mut cells = Vec::with_capacity(evidence.len());
        for (ei, e) in evidence.iter().enumerate() {
            let mut cell = Vec::with_capacity(e.members.len());
            for &s in &e.members {
                let w = World { state: s, evidence: EvidenceId(ei) };
                let id = WorldId(worlds.len());
                worlds.push(w);
                index.insert(w, id);
                cell.push(id);
            }
            cells.push(cell);
        }
        Ok(Frame { states, evidence, worlds, index, cells })
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn evidence(&self) -> &[Evidence] {
        &self.evidence
    }

    pub fn worlds(&self) -> &[World] {
        &self.worlds
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn world(&self, id: WorldId) -> Result<World> {
        self.worlds
            .get(id.0)
            .copied()
            .ok_or_else(|| Error::Structure(format!("unknown world #{}", id.0)))
    }

    pub fn world_id(&self, state: StateId, evidence: EvidenceId) -> Result<WorldId> {
        self.index.get(&World { state, evidence }).copied().ok_or_else(|| {
            Error::Structure(format!(
                "no world <{}, {}>",
                self.states.get(state.0).map_or("?", |s| s.name.as_str()),
                self.evidence.get(evidence.0).map_or("?", |e| e.name.as_str()),
            ))
        })
    }

    pub fn state(&self, id: StateId) -> &State {
        &self.states[id.0]
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s.name == name).map(StateId)
    }

    pub fn evidence_by_name(&self, name: &str) -> Option<EvidenceId> {
        self.evidence.iter().position(|e| e.name == name).map(EvidenceId)
    }

    /// Evidence set with exactly these members, if it is a possible body of evidence.
    pub fn evidence_by_members(&self, members: &[StateId]) -> Option<EvidenceId> {
        self.evidence.iter().position(|e| e.members == members).map(EvidenceId)
    }

    /// Worlds sharing this evidence, ordered by state id.
    pub fn cell(&self, e: EvidenceId) -> &[WorldId] {
        &self.cells[e.0]
    }

    /// Parses `state@evidence`.
    pub fn parse_world(&self, text: &str) -> Result<WorldId> {
        let (s, e) = text
            .split_once('@')
            .ok_or_else(|| Error::Structure(format!("world {text:?} is not of the form state@evidence")))?;
        let s = self
            .state_by_name(s.trim())
            .ok_or_else(|| Error::Structure(format!("unknown state {s:?}")))?;
        let e = self
            .evidence_by_name(e.trim())
            .ok_or_else(|| Error::Structure(format!("unknown evidence {e:?}")))?;
        self.world_id(s, e)
    }

    pub fn world_name(&self, id: WorldId) -> String {
        let w = self.worlds[id.0];
        format!("{}@{}", self.states[w.state.0].name, self.evidence[w.evidence.0].name)
    }
}

/// Result of an accessibility query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Accessible {
    /// Accessible worlds, ordered by state id.
    pub worlds: Vec<WorldId>,
    /// False when a truncation tail world is involved, i.e. the truncated
    /// model may differ from the infinite one.
    pub exact: bool,
}

impl Accessible {
    pub fn contains(&self, w: WorldId) -> bool {
        self.worlds.contains(&w)
    }

    pub fn states(&self, ns: &NormalityStructure) -> Vec<StateId> {
        self.worlds.iter().map(|&w| ns.frame.worlds[w.0].state).collect()
    }

    pub fn state_names(&self, ns: &NormalityStructure) -> Vec<String> {
        self.states(ns).into_iter().map(|s| ns.frame.state(s).name.clone()).collect()
    }
}

/// A validated normality structure.
#[derive(Debug, Clone)]
pub struct NormalityStructure {
    frame: Frame,
    at_least: Relation,
    sufficiently: Relation,
}

impl NormalityStructure {
    /// Builds the structure, checking that `at_least` is a preorder, that
    /// `sufficiently` is well-founded, implies `at_least`, and is absorbed by
    /// `at_least` on both sides.
    pub fn new(frame: Frame, at_least: Relation, sufficiently: Relation) -> Result<Self> {
        let ns = Self::new_unchecked(frame, at_least, sufficiently)?;
        ns.validate()?;
        Ok(ns)
    }

    /// Builds without checking the axioms. Used for deliberately broken
    /// structures in tests, and by generators whose output is checked separately.
    pub fn new_unchecked(frame: Frame, at_least: Relation, sufficiently: Relation) -> Result<Self> {
        let n = frame.world_count();
        if at_least.size() != n || sufficiently.size() != n {
            return Err(Error::Structure(format!(
                "relations are over {} / {} worlds but the frame has {n}",
                at_least.size(),
                sufficiently.size()
            )));
        }
        Ok(NormalityStructure { frame, at_least, sufficiently })
    }

    pub fn validate(&self) -> Result<()> {
        let f = &self.frame;
        if let Some(w) = self.at_least.irreflexive_violation() {
            return Err(Error::Axiom(format!("at-least-as-normal is not reflexive at {}", f.world_name(WorldId(w)))));
        }
        if let Some((a, b, c)) = self.at_least.transitivity_violation() {
            return Err(Error::Axiom(format!(
                "at-least-as-normal is not transitive: {} >= {} >= {}",
                f.world_name(WorldId(a)),
                f.world_name(WorldId(b)),
                f.world_name(WorldId(c))
            )));
        }
        if let Some(w) = self.sufficiently.cycle_element() {
            return Err(Error::Axiom(format!(
                "sufficiently-more-normal is not well-founded: {} lies on a cycle",
                f.world_name(WorldId(w))
            )));
        }
        if !self.sufficiently.is_subset_of(&self.at_least) {
            let (a, b) = self.sufficiently.pairs().find(|&(a, b)| !self.at_least.contains(a, b)).unwrap();
            return Err(Error::Axiom(format!(
                "{} >> {} but not {} >= {}",
                f.world_name(WorldId(a)),
                f.world_name(WorldId(b)),
                f.world_name(WorldId(a)),
                f.world_name(WorldId(b))
            )));
        }
        // w1 >= w2 >> w3 >= w4 implies w1 >> w4
        let chained = self.at_least.compose(&self.sufficiently).compose(&self.at_least);
        if !chained.is_subset_of(&self.sufficiently) {
            let (a, b) = chained.pairs().find(|&(a, b)| !self.sufficiently.contains(a, b)).unwrap();
            return Err(Error::Axiom(format!(
                "{} >= . >> . >= {} but not {} >> {}",
                f.world_name(WorldId(a)),
                f.world_name(WorldId(b)),
                f.world_name(WorldId(a)),
                f.world_name(WorldId(b))
            )));
        }
        Ok(())
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn at_least_as_normal(&self, a: WorldId, b: WorldId) -> bool {
        self.at_least.contains(a.0, b.0)
    }

    pub fn sufficiently_more_normal(&self, a: WorldId, b: WorldId) -> bool {
        self.sufficiently.contains(a.0, b.0)
    }

    pub fn at_least_relation(&self) -> &Relation {
        &self.at_least
    }

    pub fn sufficiently_relation(&self) -> &Relation {
        &self.sufficiently
    }

    fn check(&self, w: WorldId) -> Result<World> {
        self.frame.world(w)
    }

    fn accessible(&self, worlds: Vec<WorldId>) -> Accessible {
        let exact = worlds.iter().all(|w| !self.frame.state(self.frame.worlds[w.0].state).tail);
        Accessible { worlds, exact }
    }

    /// Worlds compatible with the evidence at `w`.
    pub fn evidential(&self, w: WorldId) -> Result<Accessible> {
        let world = self.check(w)?;
        Ok(self.accessible(self.frame.cell(world.evidence).to_vec()))
    }

    /// Evidential possibilities that no evidential possibility is sufficiently more normal than.
    pub fn doxastic(&self, w: WorldId) -> Result<Accessible> {
        let world = self.check(w)?;
        let cell = self.frame.cell(world.evidence);
        let worlds = cell
            .iter()
            .copied()
            .filter(|v| !cell.iter().any(|u| self.sufficiently.contains(u.0, v.0)))
            .collect();
        Ok(self.accessible(worlds))
    }

    pub fn epistemic(&self, w: WorldId, variant: KnowledgeVariant) -> Result<Accessible> {
        let world = self.check(w)?;
        let doxastic = self.doxastic(w)?;
        let cell = self.frame.cell(world.evidence);
        let worlds = cell
            .iter()
            .copied()
            .filter(|&v| {
                doxastic.worlds.binary_search(&v).is_ok()
                    || self.at_least.contains(v.0, w.0)
                    || (variant == KnowledgeVariant::Williamsonian
                        && self.at_least.contains(w.0, v.0)
                        && !self.sufficiently.contains(w.0, v.0))
            })
            .collect();
        Ok(self.accessible(worlds))
    }

    /// The short form of Williamsonian accessibility: evidential possibilities
    /// that `w` is not sufficiently more normal than. Agrees with
    /// [`epistemic`](Self::epistemic) when every evidence cell is totally
    /// preordered, which is checked.
    pub fn simple_williamsonian(&self, w: WorldId) -> Result<Accessible> {
        let world = self.check(w)?;
        let cell = self.frame.cell(world.evidence);
        for (i, &a) in cell.iter().enumerate() {
            for &b in &cell[i + 1..] {
                if !self.at_least.contains(a.0, b.0) && !self.at_least.contains(b.0, a.0) {
                    return Err(Error::NonTotal(format!(
                        "{} ({} and {} are incomparable)",
                        self.frame.evidence[world.evidence.0].name,
                        self.frame.world_name(a),
                        self.frame.world_name(b)
                    )));
                }
            }
        }
        let worlds = cell.iter().copied().filter(|v| !self.sufficiently.contains(w.0, v.0)).collect();
        Ok(self.accessible(worlds))
    }

    /// The world reached by learning the (true) proposition `p` at `w`.
    pub fn discover(&self, w: WorldId, p: &[StateId]) -> Result<WorldId> {
        let world = self.check(w)?;
        let p: BTreeSet<StateId> = p.iter().copied().collect();
        if !p.contains(&world.state) {
            return Err(Error::FalseDiscovery { state: self.frame.state(world.state).name.clone() });
        }
        let members: Vec<StateId> = self.frame.evidence[world.evidence.0]
            .members
            .iter()
            .copied()
            .filter(|s| p.contains(s))
            .collect();
        let e = self.frame.evidence_by_members(&members).ok_or_else(|| {
            let names: Vec<&str> = members.iter().map(|s| self.frame.state(*s).name.as_str()).collect();
            Error::InexpressibleEvidence(format!("{{{}}}", names.join(",")))
        })?;
        self.frame.world_id(world.state, e)
    }

    /// Compares beliefs (as state sets) before and after discovering `p`.
    pub fn revision_report(&self, w: WorldId, p: &[StateId]) -> Result<RevisionReport> {
        let v = self.discover(w, p)?;
        let pre: BTreeSet<StateId> = self.doxastic(w)?.states(self).into_iter().collect();
        let post: BTreeSet<StateId> = self.doxastic(v)?.states(self).into_iter().collect();
        let p: BTreeSet<StateId> = p.iter().copied().collect();
        let expansion: BTreeSet<StateId> = pre.intersection(&p).copied().collect();
        // In possible-state terms: revising never rules out more than expanding
        // would (inclusion), and when p is compatible with prior beliefs nothing
        // outside the expansion survives (preservation).
        let inclusion = expansion.is_subset(&post);
        let preservation = expansion.is_empty() || post.is_subset(&expansion);
        Ok(RevisionReport {
            discovered: v,
            pre_belief: pre.into_iter().collect(),
            post_belief: post.into_iter().collect(),
            agm_inclusion_holds: inclusion,
            agm_preservation_holds: preservation,
        })
    }

    /// Checks all invariants relating the accessibility functions at `w`.
    /// Returns a description of the first violation.
    pub fn invariant_violation(&self, w: WorldId) -> Result<Option<String>> {
        let e = self.evidential(w)?;
        let b = self.doxastic(w)?;
        if b.worlds.is_empty() {
            return Ok(Some("empty doxastic set".into()));
        }
        for variant in [KnowledgeVariant::Stalnakerian, KnowledgeVariant::Williamsonian] {
            let k = self.epistemic(w, variant)?;
            if !k.contains(w) {
                return Ok(Some(format!("{variant:?} accessibility is not reflexive")));
            }
            if !b.worlds.iter().all(|x| k.contains(*x)) || !k.worlds.iter().all(|x| e.contains(*x)) {
                return Ok(Some(format!("{variant:?}: doxastic within epistemic within evidential fails")));
            }
        }
        Ok(None)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevisionReport {
    pub discovered: WorldId,
    pub pre_belief: Vec<StateId>,
    pub post_belief: Vec<StateId>,
    /// Post-discovery beliefs rule out nothing that expanding the prior beliefs by p keeps.
    pub agm_inclusion_holds: bool,
    /// If p is compatible with prior beliefs, post-discovery beliefs are within their expansion by p.
    pub agm_preservation_holds: bool,
}
