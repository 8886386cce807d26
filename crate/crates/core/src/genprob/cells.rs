//! Answer distributions given a body of evidence.
//!
//! A [`CellTable`] lists the answers to a question with their conditional
//! masses. Identical answers can be aggregated through `copies` (for example
//! the 2^100 equiprobable coin-flip patterns), and a truncated infinite tail of
//! unlisted, less likely answers is tracked through a [`Residual`].

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::Probability;

#[derive(Debug, Clone, PartialEq)]
pub struct Cell<P> {
    pub label: String,
    /// Conditional mass of each copy of this answer.
    pub mass: P,
    /// Number of distinct answers with exactly this mass that this entry stands for.
    pub copies: BigUint,
}

impl<P: Probability> Cell<P> {
    pub fn new(label: impl Into<String>, mass: P) -> Self {
        Cell { label: label.into(), mass, copies: BigUint::one() }
    }

    pub fn with_copies(label: impl Into<String>, mass: P, copies: BigUint) -> Self {
        Cell { label: label.into(), mass, copies }
    }

    /// Mass of all copies together.
    pub fn weight(&self) -> P {
        if self.copies.is_one() {
            self.mass.clone()
        } else {
            self.mass.clone() * P::from_count(&self.copies)
        }
    }
}

/// Unlisted answers, each at most `max_cell` likely, with total mass `mass`.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual<P> {
    pub mass: P,
    pub max_cell: P,
    /// Truncation depth that produced this residual (for diagnostics).
    pub depth: u32,
}

/// Which rule decides "sufficiently more normal".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SufficiencyRule {
    /// Typicality drops by at least the threshold.
    Sufficiency,
    /// Additionally, likeliness drops by at least the threshold.
    SufficiencyPlus,
}

#[derive(Debug, Clone)]
pub struct CellTable<P> {
    cells: Vec<Cell<P>>,
    residual: Option<Residual<P>>,
    typ_lo: Vec<P>,
    typ_hi: Vec<P>,
    top: Option<usize>,
}

impl<P: Probability> CellTable<P> {
    pub fn new(cells: Vec<Cell<P>>, residual: Option<Residual<P>>) -> Self {
        let mut order: Vec<usize> = (0..cells.len()).collect();
        order.sort_by(|&a, &b| cells[a].mass.partial_cmp(&cells[b].mass).unwrap_or(Ordering::Equal));
        let mut typ_lo = vec![P::zero(); cells.len()];
        let mut typ_hi = vec![P::zero(); cells.len()];
        let mut acc = P::zero();
        let mut i = 0;
        while i < order.len() {
            let m = &cells[order[i]].mass;
            let mut j = i;
            while j < order.len() && cells[order[j]].mass == *m {
                acc = acc + cells[order[j]].weight();
                j += 1;
            }
            for &k in &order[i..j] {
                let (lo, hi) = match &residual {
                    None => (acc.clone(), acc.clone()),
                    Some(r) if *m >= r.max_cell => (acc.clone() + r.mass.clone(), acc.clone() + r.mass.clone()),
                    Some(r) => (acc.clone(), acc.clone() + r.mass.clone()),
                };
                typ_lo[k] = lo;
                typ_hi[k] = hi;
            }
            i = j;
        }
        let top = order.last().copied();
        CellTable { cells, residual, typ_lo, typ_hi, top }
    }

    /// Builds a table from unnormalised masses, conditioning on their total
    /// (including the residual).
    pub fn conditioned(cells: Vec<Cell<P>>, residual: Option<Residual<P>>) -> Result<Self> {
        let mut total = cells.iter().fold(P::zero(), |a, c| a + c.weight());
        if let Some(r) = &residual {
            total = total + r.mass.clone();
        }
        if total <= P::zero() {
            return Err(Error::Conditioning("an answer distribution".into()));
        }
        let cells = cells
            .into_iter()
            .map(|c| Cell { mass: c.mass / total.clone(), ..c })
            .collect();
        let residual = residual.map(|r| Residual {
            mass: r.mass / total.clone(),
            max_cell: r.max_cell / total.clone(),
            depth: r.depth,
        });
        Ok(Self::new(cells, residual))
    }

    pub fn cells(&self) -> &[Cell<P>] {
        &self.cells
    }

    pub fn residual(&self) -> Option<&Residual<P>> {
        self.residual.as_ref()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Total listed mass plus residual.
    pub fn total(&self) -> P {
        let listed = self.cells.iter().fold(P::zero(), |a, c| a + c.weight());
        match &self.residual {
            Some(r) => listed + r.mass.clone(),
            None => listed,
        }
    }

    /// Index of a most likely listed answer.
    pub fn top(&self) -> Option<usize> {
        self.top
    }

    /// All listed answers of maximal likeliness.
    pub fn modal(&self) -> Vec<usize> {
        match self.top {
            None => vec![],
            Some(t) => (0..self.cells.len()).filter(|&i| self.cells[i].mass == self.cells[t].mass).collect(),
        }
    }

    pub fn likeliness(&self, i: usize) -> &P {
        &self.cells[i].mass
    }

    /// Conditional mass of all answers no more likely than answer `i`, as
    /// lower/upper bounds (equal unless the residual interferes).
    pub fn typicality_bounds(&self, i: usize) -> (&P, &P) {
        (&self.typ_lo[i], &self.typ_hi[i])
    }

    pub fn typicality(&self, i: usize) -> Result<P> {
        if self.typ_lo[i] == self.typ_hi[i] {
            Ok(self.typ_lo[i].clone())
        } else {
            Err(self.undecided(format!("typicality of {:?} depends on the truncated tail", self.cells[i].label)))
        }
    }

    fn undecided(&self, detail: String) -> Error {
        Error::Undecided { depth: self.residual.as_ref().map_or(0, |r| r.depth), detail }
    }

    /// Whether the answer with typicality `tu`/likeliness `lu` is sufficiently
    /// more normal than the one with `tv`/`lv`.
    pub fn sufficiently(tu: &P, lu: &P, tv: &P, lv: &P, t: &P, rule: SufficiencyRule) -> bool {
        // 1 - tv/tu >= t, written without division
        let slack = P::one() - t.clone();
        if *tu <= P::zero() || *tv > slack.clone() * tu.clone() {
            return false;
        }
        match rule {
            SufficiencyRule::Sufficiency => true,
            SufficiencyRule::SufficiencyPlus => *lu > P::zero() && *lv <= slack * lu.clone(),
        }
    }

    /// Indices of the believed answers: those no answer is sufficiently more
    /// normal than. Fails if the truncated residual could change the result.
    pub fn believed(&self, t: &P, rule: SufficiencyRule) -> Result<Vec<usize>> {
        let Some(top) = self.top else { return Ok(vec![]) };
        let (top_lo, top_hi) = (&self.typ_lo[top], &self.typ_hi[top]);
        let lmax = &self.cells[top].mass;
        let mut out = Vec::new();
        for i in 0..self.cells.len() {
            let (lo, hi) = (&self.typ_lo[i], &self.typ_hi[i]);
            let l = &self.cells[i].mass;
            let surely_out = Self::sufficiently(top_lo, lmax, hi, l, t, rule);
            let surely_in = !Self::sufficiently(top_hi, lmax, lo, l, t, rule);
            match (surely_out, surely_in) {
                (true, _) => {}
                (false, true) => out.push(i),
                (false, false) => {
                    return Err(self.undecided(format!("whether {:?} is believed", self.cells[i].label)));
                }
            }
        }
        if let Some(r) = &self.residual {
            // the most normal unlisted answer has likeliness <= max_cell
            let below = self
                .cells
                .iter()
                .enumerate()
                .filter(|(_, c)| c.mass <= r.max_cell)
                .fold(P::zero(), |a, (_, c)| a + c.weight());
            let tail_hi = below + r.mass.clone();
            if !Self::sufficiently(top_lo, lmax, &tail_hi, &r.max_cell, t, rule) {
                return Err(self.undecided("unlisted answers might be believed".into()));
            }
        }
        Ok(out)
    }

    /// Conditional mass of the given answers.
    pub fn mass_of(&self, cells: &[usize]) -> P {
        cells.iter().fold(P::zero(), |a, &i| a + self.cells[i].weight())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn table(masses: &[(i64, i64)]) -> CellTable<Rational> {
        CellTable::new(
            masses.iter().enumerate().map(|(i, &(n, d))| Cell::new(i.to_string(), ratio(n, d))).collect(),
            None,
        )
    }

    #[test]
    fn typicality_accumulates_ties() {
        let t = table(&[(2, 5), (2, 5), (1, 5)]);
        assert_eq!(t.typicality(0).unwrap(), ratio(1, 1));
        assert_eq!(t.typicality(1).unwrap(), ratio(1, 1));
        assert_eq!(t.typicality(2).unwrap(), ratio(1, 5));
    }

    #[test]
    fn single_cell_is_believed() {
        let t = table(&[(1, 1)]);
        assert_eq!(t.believed(&ratio(99, 100), SufficiencyRule::Sufficiency).unwrap(), vec![0]);
    }

    #[test]
    fn believed_is_least_prefix_reaching_threshold() {
        let t = table(&[(5, 10), (3, 10), (1, 10), (1, 10)]);
        assert_eq!(t.believed(&ratio(1, 2), SufficiencyRule::Sufficiency).unwrap(), vec![0]);
        assert_eq!(t.believed(&ratio(6, 10), SufficiencyRule::Sufficiency).unwrap(), vec![0, 1]);
        assert_eq!(t.believed(&ratio(81, 100), SufficiencyRule::Sufficiency).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn plus_rule_keeps_nearly_as_likely_answers() {
        let t = table(&[(50, 100), (49, 100), (1, 100)]);
        let th = ratio(1, 2);
        assert_eq!(t.believed(&th, SufficiencyRule::Sufficiency).unwrap(), vec![0]);
        assert_eq!(t.believed(&th, SufficiencyRule::SufficiencyPlus).unwrap(), vec![0, 1]);
    }

    #[test]
    fn copies_count_towards_typicality() {
        let t = CellTable::new(
            vec![
                Cell::new("d", ratio(1, 2)),
                Cell::with_copies("fair", ratio(1, 8), BigUint::from(4u32)),
            ],
            None,
        );
        assert_eq!(t.typicality(1).unwrap(), ratio(1, 2));
        assert_eq!(t.total(), ratio(1, 1));
    }

    #[test]
    fn residual_bounds_and_undecided() {
        // listed masses 1/2, 1/4; residual 1/4 in cells of at most 1/8
        let r = Residual { mass: ratio(1, 4), max_cell: ratio(1, 8), depth: 2 };
        let t = CellTable::new(vec![Cell::new("1", ratio(1, 2)), Cell::new("2", ratio(1, 4))], Some(r));
        assert_eq!(t.typicality(1).unwrap(), ratio(1, 2));
        assert_eq!(t.believed(&ratio(1, 2), SufficiencyRule::Sufficiency).unwrap(), vec![0]);
        assert!(matches!(
            t.believed(&ratio(9, 10), SufficiencyRule::Sufficiency),
            Err(Error::Undecided { depth: 2, .. })
        ));
    }

    #[test]
    fn threshold_one_excludes_only_null_answers() {
        let t = table(&[(1, 2), (1, 2), (0, 1)]);
        assert_eq!(t.believed(&ratio(1, 1), SufficiencyRule::Sufficiency).unwrap(), vec![0, 1]);
    }
}
