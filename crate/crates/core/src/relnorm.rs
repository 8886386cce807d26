//! Normality relative to a reference world.
//!
//! Worlds are unstructured points and evidential accessibility is an
//! arbitrary reflexive relation. Likeliness, typicality and both normality
//! relations are indexed by the world whose evidence is used to compare. No
//! notion of discovery exists here.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::genprob::{CellTable, SufficiencyRule};
use crate::normality::KnowledgeVariant;
use crate::relation::Relation;
use crate::scalar::Probability;

#[derive(Debug, Clone)]
pub struct WorldlyProbabilityStructure<P> {
    names: Vec<String>,
    /// Evidentially accessible worlds from each world, sorted.
    access: Vec<Vec<usize>>,
    /// Answer label of each world.
    labels: Vec<String>,
    prior: Vec<P>,
    threshold: P,
}

impl<P: Probability> WorldlyProbabilityStructure<P> {
    pub fn new(
        names: Vec<String>,
        access: Vec<Vec<usize>>,
        labels: Vec<String>,
        prior: Vec<P>,
        threshold: P,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Structure("no worlds".into()));
        }
        if access.len() != n || labels.len() != n || prior.len() != n {
            return Err(Error::Structure("accessibility, labels and prior must cover every world".into()));
        }
        if threshold <= P::zero() || threshold > P::one() {
            return Err(Error::Threshold(threshold.to_string()));
        }
        let total = prior.iter().fold(P::zero(), |a, p| a + p.clone());
        if prior.iter().any(|p| p.is_negative()) || !total.is_unit() {
            return Err(Error::Model(format!("prior mass {total} ≠ 1")));
        }
        let mut access = access;
        for (w, acc) in access.iter_mut().enumerate() {
            acc.sort_unstable();
            acc.dedup();
            if acc.iter().any(|&v| v >= n) {
                return Err(Error::Structure(format!("world {:?} accesses an unknown world", names[w])));
            }
            if acc.binary_search(&w).is_err() {
                return Err(Error::Structure(format!("evidential accessibility is not reflexive at {:?}", names[w])));
            }
            let mass = acc.iter().fold(P::zero(), |a, &v| a + prior[v].clone());
            if mass <= P::zero() {
                return Err(Error::Conditioning(format!("the evidence of {:?}", names[w])));
            }
        }
        Ok(WorldlyProbabilityStructure { names, access, labels, prior, threshold })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, w: usize) -> &str {
        &self.names[w]
    }

    pub fn world(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn evidential(&self, w: usize) -> &[usize] {
        &self.access[w]
    }

    fn check(&self, w: usize) -> Result<()> {
        if w < self.len() {
            Ok(())
        } else {
            Err(Error::Structure(format!("unknown world #{w}")))
        }
    }

    /// Answer distribution restricted to the evidence of `w`: every label
    /// present anywhere gets a (possibly zero) conditional mass.
    fn answers(&self, w: usize) -> (CellTable<P>, HashMap<&str, usize>) {
        let mut index: HashMap<&str, usize> = HashMap::new();
        let mut masses: Vec<P> = Vec::new();
        let mut labels: Vec<String> = Vec::new();
        for l in &self.labels {
            if !index.contains_key(l.as_str()) {
                index.insert(l, masses.len());
                masses.push(P::zero());
                labels.push(l.clone());
            }
        }
        let mut total = P::zero();
        for &v in &self.access[w] {
            let c = index[self.labels[v].as_str()];
            masses[c] = masses[c].clone() + self.prior[v].clone();
            total = total + self.prior[v].clone();
        }
        let cells = labels
            .into_iter()
            .zip(masses)
            .map(|(l, m)| crate::genprob::Cell::new(l, m / total.clone()))
            .collect();
        (CellTable::new(cells, None), index)
    }

    /// Probability of `v`'s answer given `w`'s evidence.
    pub fn rel_likeliness(&self, w: usize, v: usize) -> Result<P> {
        self.check(w)?;
        self.check(v)?;
        let (tab, idx) = self.answers(w);
        Ok(tab.likeliness(idx[self.labels[v].as_str()]).clone())
    }

    /// Probability, given `w`'s evidence, of the worlds no more normal than `v`
    /// (relative to `w`).
    pub fn rel_typicality(&self, w: usize, v: usize) -> Result<P> {
        self.check(w)?;
        self.check(v)?;
        let (tab, idx) = self.answers(w);
        let lv = tab.likeliness(idx[self.labels[v].as_str()]).clone();
        Ok(self.access[w]
            .iter()
            .filter(|&&u| *tab.likeliness(idx[self.labels[u].as_str()]) <= lv)
            .fold(P::zero(), |a, &u| a + self.prior[u].clone())
            / self.access[w].iter().fold(P::zero(), |a, &u| a + self.prior[u].clone()))
    }

    pub fn threshold(&self) -> &P {
        &self.threshold
    }

    /// Builds the per-reference-world relations.
    pub fn rel_generate(&self, rule: SufficiencyRule) -> Result<RelativizedNormalityStructure> {
        let n = self.len();
        let mut at_least = Vec::with_capacity(n);
        let mut sufficiently = Vec::with_capacity(n);
        for w in 0..n {
            let lam: Vec<P> = (0..n).map(|v| self.rel_likeliness(w, v)).collect::<Result<_>>()?;
            let typ: Vec<P> = (0..n).map(|v| self.rel_typicality(w, v)).collect::<Result<_>>()?;
            let mut ge = Relation::empty(n);
            let mut gg = Relation::empty(n);
            for v in 0..n {
                for u in 0..n {
                    if lam[v] >= lam[u] {
                        ge.insert(v, u);
                    }
                    if CellTable::sufficiently(&typ[v], &lam[v], &typ[u], &lam[u], &self.threshold, rule) {
                        gg.insert(v, u);
                    }
                }
            }
            at_least.push(ge);
            sufficiently.push(gg);
        }
        RelativizedNormalityStructure::new(self.names.clone(), self.access.clone(), at_least, sufficiently)
    }

    /// Conditional mass, given `w`'s evidence, of a set of worlds.
    pub fn conditional_mass(&self, w: usize, worlds: &[usize]) -> P {
        let acc = &self.access[w];
        let total = acc.iter().fold(P::zero(), |a, &u| a + self.prior[u].clone());
        worlds
            .iter()
            .filter(|v| acc.binary_search(v).is_ok())
            .fold(P::zero(), |a, &u| a + self.prior[u].clone())
            / total
    }
}

/// Evidential accessibility plus one normality preorder and one
/// sufficiently-more-normal relation per reference world.
#[derive(Debug, Clone)]
pub struct RelativizedNormalityStructure {
    names: Vec<String>,
    access: Vec<Vec<usize>>,
    at_least: Vec<Relation>,
    sufficiently: Vec<Relation>,
}

impl RelativizedNormalityStructure {
    pub fn new(
        names: Vec<String>,
        access: Vec<Vec<usize>>,
        at_least: Vec<Relation>,
        sufficiently: Vec<Relation>,
    ) -> Result<Self> {
        let n = names.len();
        if access.len() != n || at_least.len() != n || sufficiently.len() != n {
            return Err(Error::Structure("one relation pair per reference world is required".into()));
        }
        for (w, acc) in access.iter().enumerate() {
            if !acc.contains(&w) {
                return Err(Error::Structure(format!("evidential accessibility is not reflexive at {:?}", names[w])));
            }
        }
        for w in 0..n {
            let (ge, gg) = (&at_least[w], &sufficiently[w]);
            let at = |what: &str| Error::Axiom(format!("{what} (reference world {:?})", names[w]));
            if ge.size() != n || gg.size() != n {
                return Err(at("relation size mismatch"));
            }
            if ge.irreflexive_violation().is_some() || ge.transitivity_violation().is_some() {
                return Err(at("at-least-as-normal is not a preorder"));
            }
            if gg.cycle_element().is_some() {
                return Err(at("sufficiently-more-normal is not well-founded"));
            }
            if !gg.is_subset_of(ge) {
                return Err(at("sufficiently-more-normal does not imply at-least-as-normal"));
            }
            if !ge.compose(gg).compose(ge).is_subset_of(gg) {
                return Err(at("sufficiently-more-normal is not absorbed by at-least-as-normal"));
            }
        }
        Ok(RelativizedNormalityStructure { names, access, at_least, sufficiently })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn at_least_as_normal(&self, reference: usize, a: usize, b: usize) -> bool {
        self.at_least[reference].contains(a, b)
    }

    pub fn sufficiently_more_normal(&self, reference: usize, a: usize, b: usize) -> bool {
        self.sufficiently[reference].contains(a, b)
    }

    pub fn evidential(&self, w: usize) -> Result<Vec<usize>> {
        self.access.get(w).cloned().ok_or_else(|| Error::Structure(format!("unknown world #{w}")))
    }

    pub fn rel_doxastic(&self, w: usize) -> Result<Vec<usize>> {
        let acc = self.evidential(w)?;
        let gg = &self.sufficiently[w];
        Ok(acc.iter().copied().filter(|&v| !acc.iter().any(|&u| gg.contains(u, v))).collect())
    }

    pub fn rel_epistemic(&self, w: usize, variant: KnowledgeVariant) -> Result<Vec<usize>> {
        let acc = self.evidential(w)?;
        let b = self.rel_doxastic(w)?;
        let (ge, gg) = (&self.at_least[w], &self.sufficiently[w]);
        Ok(acc
            .iter()
            .copied()
            .filter(|&v| {
                b.contains(&v)
                    || ge.contains(v, w)
                    || (variant == KnowledgeVariant::Williamsonian && ge.contains(w, v) && !gg.contains(w, v))
            })
            .collect())
    }
}
