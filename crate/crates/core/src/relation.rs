//! Dense binary relations over `0..n`, stored as one bitset row per element.

use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct Relation {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Relation")
            .field("n", &self.n)
            .field("pairs", &self.len())
            .finish()
    }
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Relation { n, words, bits: vec![0; n * words] }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            r.insert(i, i);
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Self::empty(n);
        for (a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Number of related pairs.
    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn contains(&self, a: usize, b: usize) -> bool {
        debug_assert!(a < self.n && b < self.n);
        self.bits[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, a: usize, b: usize) {
        assert!(a < self.n && b < self.n, "relation index out of range");
        self.bits[a * self.words + b / 64] |= 1 << (b % 64);
    }

    pub fn remove(&mut self, a: usize, b: usize) {
        self.bits[a * self.words + b / 64] &= !(1 << (b % 64));
    }

    fn row(&self, a: usize) -> &[u64] {
        &self.bits[a * self.words..(a + 1) * self.words]
    }

    /// Elements `b` with `a R b`, ascending.
    pub fn successors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(a).iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + tz)
            })
        })
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| self.successors(a).map(move |b| (a, b)))
    }

    pub fn is_subset_of(&self, other: &Relation) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// First element not related to itself, if any.
    pub fn irreflexive_violation(&self) -> Option<usize> {
        (0..self.n).find(|&a| !self.contains(a, a))
    }

    /// First element related to itself, if any.
    pub fn reflexive_element(&self) -> Option<usize> {
        (0..self.n).find(|&a| self.contains(a, a))
    }

    /// Returns a triple `(a, b, c)` with `a R b`, `b R c` but not `a R c`.
    pub fn transitivity_violation(&self) -> Option<(usize, usize, usize)> {
        for a in 0..self.n {
            let ra = self.row(a);
            for b in self.successors(a) {
                let rb = self.row(b);
                for (wi, (x, y)) in rb.iter().zip(ra).enumerate() {
                    let missing = x & !y;
                    if missing != 0 {
                        return Some((a, b, wi * 64 + missing.trailing_zeros() as usize));
                    }
                }
            }
        }
        None
    }

    /// Relational composition: `a (self;other) c` iff `a self b` and `b other c` for some `b`.
    pub fn compose(&self, other: &Relation) -> Relation {
        assert_eq!(self.n, other.n);
        let mut out = Relation::empty(self.n);
        for a in 0..self.n {
            for b in self.successors(a) {
                let (dst, src) = (a * out.words, b * other.words);
                for w in 0..out.words {
                    out.bits[dst + w] |= other.bits[src + w];
                }
            }
        }
        out
    }

    /// Finds an element lying on a cycle, if the relation has one.
    pub fn cycle_element(&self) -> Option<usize> {
        // Kahn's algorithm on the graph a -> b.
        let mut indeg = vec![0usize; self.n];
        for (_, b) in self.pairs() {
            indeg[b] += 1;
        }
        let mut stack: Vec<usize> = (0..self.n).filter(|&a| indeg[a] == 0).collect();
        let mut removed = vec![false; self.n];
        while let Some(a) = stack.pop() {
            removed[a] = true;
            for b in self.successors(a) {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    stack.push(b);
                }
            }
        }
        removed.iter().position(|&r| !r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let mut r = Relation::empty(130);
        r.insert(0, 129);
        r.insert(0, 64);
        assert!(r.contains(0, 129));
        assert_eq!(r.successors(0).collect::<Vec<_>>(), vec![64, 129]);
        assert_eq!(r.len(), 2);
        r.remove(0, 64);
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn transitivity_and_cycles() {
        let r = Relation::from_pairs(3, [(0, 1), (1, 2)]);
        assert_eq!(r.transitivity_violation(), Some((0, 1, 2)));
        assert_eq!(r.cycle_element(), None);
        let c = Relation::from_pairs(3, [(0, 1), (1, 0)]);
        assert!(c.cycle_element().is_some());
        let id = Relation::identity(3);
        assert!(id.cycle_element().is_some());
        assert_eq!(id.transitivity_violation(), None);
    }

    #[test]
    fn composition() {
        let r = Relation::from_pairs(3, [(0, 1)]);
        let s = Relation::from_pairs(3, [(1, 2)]);
        let rs = r.compose(&s);
        assert!(rs.contains(0, 2));
        assert_eq!(rs.len(), 1);
    }
}
