//! Normality from probability densities.
//!
//! When every answer to a continuous question has probability zero, worlds
//! are ordered by the density of their answer at its measured coordinate.
//! The believed answers then form a superlevel set of the density (the
//! shortest region reaching the threshold for unimodal densities).

use std::fmt::Write as _;

use libm::erfc;

use crate::error::{Error, Result};
use crate::normality::{Evidence, Frame, NormalityStructure, State, StateId};
use crate::numeric::{bisect_predicate, integrate, Real};
use crate::relation::Relation;

/// Quadrature tolerance for masses without an analytic distribution function.
pub const QUAD_TOL: f64 = 1e-12;
/// Tolerance in mass when locating the density cutoff.
pub const MASS_TOL: f64 = 1e-9;

/// A probability density over measured coordinates.
pub trait Density<F: Real>: Send + Sync {
    fn pdf(&self, x: F) -> F;

    /// Closure of the set where the density may be positive.
    fn support(&self) -> (F, F);

    /// Location of the maximum of a unimodal density (non-increasing on
    /// both sides of it). `None` selects the grid-scan path.
    fn mode(&self) -> Option<F> {
        None
    }

    /// Distribution function, when known in closed form.
    fn cdf(&self, _x: F) -> Option<F> {
        None
    }

    /// Probability of `[a, b]`, clipped to the support.
    fn mass(&self, a: F, b: F) -> Result<F> {
        let (lo, hi) = self.support();
        let (a, b) = (a.max(lo), b.min(hi));
        if a >= b {
            return Ok(F::zero());
        }
        if let (Some(fa), Some(fb)) = (self.cdf(a), self.cdf(b)) {
            return Ok(fb - fa);
        }
        integrate(|x| self.pdf(x), a, b, F::c(QUAD_TOL))
    }
}

impl<F: Real, D: Density<F> + ?Sized> Density<F> for &D {
    fn pdf(&self, x: F) -> F {
        (**self).pdf(x)
    }
    fn support(&self) -> (F, F) {
        (**self).support()
    }
    fn mode(&self) -> Option<F> {
        (**self).mode()
    }
    fn cdf(&self, x: F) -> Option<F> {
        (**self).cdf(x)
    }
    fn mass(&self, a: F, b: F) -> Result<F> {
        (**self).mass(a, b)
    }
}

impl<F: Real> Density<F> for Box<dyn Density<F>> {
    fn pdf(&self, x: F) -> F {
        (**self).pdf(x)
    }
    fn support(&self) -> (F, F) {
        (**self).support()
    }
    fn mode(&self) -> Option<F> {
        (**self).mode()
    }
    fn cdf(&self, x: F) -> Option<F> {
        (**self).cdf(x)
    }
    fn mass(&self, a: F, b: F) -> Result<F> {
        (**self).mass(a, b)
    }
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian<F> {
    pub mu: F,
    pub sigma: F,
}

impl<F: Real> Gaussian<F> {
    pub fn new(mu: F, sigma: F) -> Result<Self> {
        if !(sigma > F::zero()) || !mu.is_finite() || !sigma.is_finite() {
            return Err(Error::Parameter(format!("gaussian needs finite mu and sigma > 0, got {mu:?}, {sigma:?}")));
        }
        Ok(Gaussian { mu, sigma })
    }
}

impl<F: Real> Density<F> for Gaussian<F> {
    fn pdf(&self, x: F) -> F {
        let z = (x - self.mu) / self.sigma;
        (-(z * z) / F::c(2.0)).exp() / (self.sigma * F::c((2.0 * std::f64::consts::PI).sqrt()))
    }
    fn support(&self) -> (F, F) {
        (F::neg_infinity(), F::infinity())
    }
    fn mode(&self) -> Option<F> {
        Some(self.mu)
    }
    fn cdf(&self, x: F) -> Option<F> {
        let z = ((x - self.mu) / self.sigma).to_f64()?;
        F::from_f64(std_normal_cdf(z))
    }
    fn mass(&self, a: F, b: F) -> Result<F> {
        // Use the upper tail on the right of the mean to keep precision.
        let za = ((a - self.mu) / self.sigma).to_f64().unwrap_or(f64::NAN);
        let zb = ((b - self.mu) / self.sigma).to_f64().unwrap_or(f64::NAN);
        if za >= zb {
            return Ok(F::zero());
        }
        let m = if za >= 0.0 {
            std_normal_cdf(-za) - std_normal_cdf(-zb)
        } else {
            std_normal_cdf(zb) - std_normal_cdf(za)
        };
        Ok(F::c(m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniform<F> {
    pub lo: F,
    pub hi: F,
}

impl<F: Real> Uniform<F> {
    pub fn new(lo: F, hi: F) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Parameter(format!("uniform needs finite lo < hi, got {lo:?}, {hi:?}")));
        }
        Ok(Uniform { lo, hi })
    }
}

impl<F: Real> Density<F> for Uniform<F> {
    fn pdf(&self, x: F) -> F {
        if x >= self.lo && x <= self.hi {
            F::one() / (self.hi - self.lo)
        } else {
            F::zero()
        }
    }
    fn support(&self) -> (F, F) {
        (self.lo, self.hi)
    }
    fn cdf(&self, x: F) -> Option<F> {
        Some(((x - self.lo) / (self.hi - self.lo)).max(F::zero()).min(F::one()))
    }
}

/// Exponential law with the given rate on `(0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential<F> {
    pub rate: F,
}

impl<F: Real> Density<F> for Exponential<F> {
    fn pdf(&self, x: F) -> F {
        if x < F::zero() {
            F::zero()
        } else {
            self.rate * (-self.rate * x).exp()
        }
    }
    fn support(&self) -> (F, F) {
        (F::zero(), F::infinity())
    }
    fn mode(&self) -> Option<F> {
        Some(F::zero())
    }
    fn cdf(&self, x: F) -> Option<F> {
        Some(if x <= F::zero() { F::zero() } else { -(-self.rate * x).exp_m1() })
    }
    fn mass(&self, a: F, b: F) -> Result<F> {
        let a = a.max(F::zero());
        if a >= b {
            return Ok(F::zero());
        }
        // e^{-ra} - e^{-rb} without cancellation near 1
        let ea = (-self.rate * a).exp();
        Ok(if b.is_infinite() { ea } else { -ea * (-self.rate * (b - a)).exp_m1() })
    }
}

/// Law of `ln X` for `X` exponential with rate 1: `f(x) = e^x e^{-e^x}`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LogExponential;

impl<F: Real> Density<F> for LogExponential {
    fn pdf(&self, x: F) -> F {
        let e = x.exp();
        if e.is_infinite() {
            return F::zero();
        }
        e * (-e).exp()
    }
    fn support(&self) -> (F, F) {
        (F::neg_infinity(), F::infinity())
    }
    fn mode(&self) -> Option<F> {
        Some(F::zero())
    }
    fn cdf(&self, x: F) -> Option<F> {
        Some(-(-x.exp()).exp_m1())
    }
    fn mass(&self, a: F, b: F) -> Result<F> {
        if a >= b {
            return Ok(F::zero());
        }
        let (ea, eb) = (a.exp(), b.exp());
        Ok((-ea).exp() - (-eb).exp())
    }
}

/// Normal law wrapped onto a circle of circumference 2π, expressed on the
/// window `[center - π, center + π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrappedNormal<F> {
    pub center: F,
    pub sigma: F,
    terms: i32,
}

impl<F: Real> WrappedNormal<F> {
    pub fn new(center: F, sigma: F) -> Result<Self> {
        if !(sigma > F::zero()) || !sigma.is_finite() || !center.is_finite() {
            return Err(Error::Parameter(format!("wrapped normal needs sigma > 0, got {sigma:?}")));
        }
        // wrapping terms out to six standard deviations
        let s = sigma.to_f64().unwrap_or(1.0);
        let terms = (6.0 * s / (2.0 * std::f64::consts::PI)).ceil() as i32 + 1;
        Ok(WrappedNormal { center, sigma, terms })
    }

    fn shifts(&self) -> impl Iterator<Item = F> + '_ {
        (-self.terms..=self.terms).map(|k| F::c(2.0 * std::f64::consts::PI * k as f64))
    }
}

impl<F: Real> Density<F> for WrappedNormal<F> {
    fn pdf(&self, x: F) -> F {
        let g = Gaussian { mu: self.center, sigma: self.sigma };
        self.shifts().fold(F::zero(), |a, s| a + g.pdf(x + s))
    }
    fn support(&self) -> (F, F) {
        let pi = F::c(std::f64::consts::PI);
        (self.center - pi, self.center + pi)
    }
    fn mode(&self) -> Option<F> {
        Some(self.center)
    }
    fn mass(&self, a: F, b: F) -> Result<F> {
        let (lo, hi) = self.support();
        let (a, b) = (a.max(lo), b.min(hi));
        if a >= b {
            return Ok(F::zero());
        }
        let g = Gaussian { mu: self.center, sigma: self.sigma };
        let mut m = F::zero();
        for s in self.shifts() {
            m = m + g.mass(a + s, b + s)?;
        }
        Ok(m)
    }
}

type PdfFn<F> = Box<dyn Fn(F) -> F + Send + Sync>;

/// Density given by a closure.
pub struct FnDensity<F> {
    pdf: PdfFn<F>,
    cdf: Option<PdfFn<F>>,
    support: (F, F),
    mode: Option<F>,
}

impl<F: Real> FnDensity<F> {
    pub fn new(pdf: impl Fn(F) -> F + Send + Sync + 'static, support: (F, F)) -> Self {
        FnDensity { pdf: Box::new(pdf), cdf: None, support, mode: None }
    }

    pub fn with_mode(mut self, mode: F) -> Self {
        self.mode = Some(mode);
        self
    }

    pub fn with_cdf(mut self, cdf: impl Fn(F) -> F + Send + Sync + 'static) -> Self {
        self.cdf = Some(Box::new(cdf));
        self
    }
}

impl<F: Real> Density<F> for FnDensity<F> {
    fn pdf(&self, x: F) -> F {
        if x < self.support.0 || x > self.support.1 {
            F::zero()
        } else {
            (self.pdf)(x)
        }
    }
    fn support(&self) -> (F, F) {
        self.support
    }
    fn mode(&self) -> Option<F> {
        self.mode
    }
    fn cdf(&self, x: F) -> Option<F> {
        self.cdf.as_ref().map(|c| c(x))
    }
}

/// Density of the answer at coordinate `x` (zero outside the support).
pub fn world_density<F: Real, D: Density<F> + ?Sized>(d: &D, x: F) -> F {
    let (lo, hi) = d.support();
    if x < lo || x > hi {
        F::zero()
    } else {
        d.pdf(x)
    }
}

/// Total mass over the support; fails unless it is 1 within `tol`.
pub fn validate<F: Real, D: Density<F> + ?Sized>(d: &D, tol: F) -> Result<F> {
    let (lo, hi) = d.support();
    let m = d.mass(lo, hi)?;
    if (m - F::one()).abs() > tol {
        return Err(Error::Numeric(format!("density integrates to {m:?}, not 1")));
    }
    Ok(m)
}

/// Believed answers: `{x : f(x) >= cutoff}` as a union of intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefRegion<F> {
    pub intervals: Vec<(F, F)>,
    pub mass: F,
    pub cutoff: F,
}

impl<F: Real> BeliefRegion<F> {
    pub fn contains(&self, x: F) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= x && x <= b)
    }

    /// Total length.
    pub fn width(&self) -> F {
        self.intervals.iter().fold(F::zero(), |s, &(a, b)| s + (b - a))
    }

    pub fn bounds(&self) -> Option<(F, F)> {
        Some((self.intervals.first()?.0, self.intervals.last()?.1))
    }
}

const GRID: usize = 4096;

/// Superlevel set of a density at a given cutoff.
struct Levels<'a, F, D: ?Sized> {
    d: &'a D,
    /// Whether the set is `{f > c}` rather than `{f >= c}`.
    strict: bool,
    peak: F,
    grid: Vec<(F, F)>,
}

impl<'a, F: Real, D: Density<F> + ?Sized> Levels<'a, F, D> {
    fn new(d: &'a D, strict: bool) -> Result<Self> {
        let (lo, hi) = d.support();
        match d.mode() {
            Some(m) => Ok(Levels { d, strict, peak: d.pdf(m), grid: vec![] }),
            None => {
                if !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::Numeric(
                        "densities without a declared mode need a bounded support".into(),
                    ));
                }
                let step = (hi - lo) / F::c(GRID as f64);
                let grid: Vec<(F, F)> = (0..=GRID)
                    .map(|i| {
                        let x = lo + step * F::c(i as f64);
                        (x, d.pdf(x))
                    })
                    .collect();
                let peak = grid.iter().fold(F::zero(), |m, p| m.max(p.1));
                Ok(Levels { d, strict, peak, grid })
            }
        }
    }

    fn above(&self, y: F, c: F) -> bool {
        if self.strict {
            y > c
        } else {
            y >= c
        }
    }

    /// Point where the density crosses `c`, between `inside` and `outside`.
    fn crossing(&self, inside: F, outside: F, c: F) -> F {
        bisect_predicate(inside, outside, F::zero(), |x| self.above(self.d.pdf(x), c))
    }

    fn side(&self, m: F, bound: F, dir: F, c: F) -> F {
        if bound.is_finite() {
            if self.above(self.d.pdf(bound), c) {
                return bound;
            }
            return self.crossing(m, bound, c);
        }
        let mut step = F::one();
        let mut x = m + dir * step;
        let mut n = 0;
        while self.above(self.d.pdf(x), c) && n < 2000 {
            step = step * F::c(2.0);
            x = m + dir * step;
            n += 1;
        }
        self.crossing(m, x, c)
    }

    fn intervals(&self, c: F) -> Vec<(F, F)> {
        let (lo, hi) = self.d.support();
        if c <= F::zero() {
            return vec![(lo, hi)];
        }
        if let Some(m) = self.d.mode() {
            if !self.above(self.d.pdf(m), c) {
                return vec![];
            }
            let left = if m <= lo { lo } else { self.side(m, lo, -F::one(), c) };
            let right = if m >= hi { hi } else { self.side(m, hi, F::one(), c) };
            return vec![(left, right)];
        }
        let mut out = Vec::new();
        let mut start: Option<F> = None;
        for i in 0..self.grid.len() {
            let (x, y) = self.grid[i];
            let inside = self.above(y, c);
            match (inside, start) {
                (true, None) => {
                    start = Some(if i == 0 { x } else { self.crossing(x, self.grid[i - 1].0, c) });
                }
                (false, Some(s)) => {
                    out.push((s, self.crossing(self.grid[i - 1].0, x, c)));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push((s, hi));
        }
        out
    }

    fn mass(&self, c: F) -> Result<F> {
        if c <= F::zero() {
            return Ok(F::one());
        }
        self.intervals(c).iter().try_fold(F::zero(), |s, &(a, b)| Ok(s + self.d.mass(a, b)?))
    }
}

/// The superlevel set of largest cutoff whose mass reaches `t`.
pub fn belief_region<F: Real, D: Density<F> + ?Sized>(d: &D, t: F) -> Result<BeliefRegion<F>> {
    if !(t > F::zero()) || t > F::one() {
        return Err(Error::Threshold(format!("{t:?}")));
    }
    let lv = Levels::new(d, false)?;
    let (mut lo, mut hi) = (F::zero(), lv.peak);
    let mut lo_mass = F::one();
    if lv.mass(hi)? >= t {
        lo = hi;
        lo_mass = lv.mass(hi)?;
    } else {
        let mass_tol = F::c(MASS_TOL).max(F::epsilon() * F::c(16.0));
        for _ in 0..300 {
            if lo_mass - t <= mass_tol {
                break;
            }
            let mid = (lo + hi) / F::c(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            let m = lv.mass(mid)?;
            if !m.is_finite() {
                return Err(Error::Numeric(format!("non-finite region mass at cutoff {mid:?}")));
            }
            if m >= t {
                lo = mid;
                lo_mass = m;
            } else {
                hi = mid;
            }
        }
    }
    Ok(BeliefRegion { intervals: lv.intervals(lo), mass: lo_mass, cutoff: lo })
}

/// Mass of the answers strictly denser than `c`.
fn denser_mass<F: Real, D: Density<F> + ?Sized>(d: &D, c: F) -> Result<F> {
    Levels::new(d, true)?.mass(c)
}

/// Normality among answers of one body of evidence, ordered by density.
pub struct DensityNormality<F, D> {
    density: D,
    threshold: F,
}

impl<F: Real, D: Density<F>> DensityNormality<F, D> {
    pub fn new(density: D, threshold: F) -> Result<Self> {
        if !(threshold > F::zero()) || threshold > F::one() {
            return Err(Error::Threshold(format!("{threshold:?}")));
        }
        Ok(DensityNormality { density, threshold })
    }

    pub fn density(&self) -> &D {
        &self.density
    }

    pub fn threshold(&self) -> F {
        self.threshold
    }

    pub fn world_density(&self, x: F) -> F {
        world_density(&self.density, x)
    }

    /// Probability that the answer is no denser than at `x`.
    pub fn typicality(&self, x: F) -> Result<F> {
        let c = self.world_density(x);
        if c <= F::zero() {
            return Ok(F::zero());
        }
        Ok((F::one() - denser_mass(&self.density, c)?).max(F::zero()))
    }

    pub fn at_least_as_normal(&self, x: F, y: F) -> bool {
        self.world_density(x) >= self.world_density(y)
    }

    pub fn sufficiently_more_normal(&self, x: F, y: F) -> Result<bool> {
        let (tx, ty) = (self.typicality(x)?, self.typicality(y)?);
        Ok(tx > F::zero() && ty <= (F::one() - self.threshold) * tx)
    }

    /// Whether no answer is sufficiently more normal than the one at `x`.
    pub fn doxastically_possible(&self, x: F) -> Result<bool> {
        // the supremum of typicality is 1
        Ok(self.typicality(x)? > F::one() - self.threshold)
    }

    pub fn belief_region(&self) -> Result<BeliefRegion<F>> {
        belief_region(&self.density, self.threshold)
    }

    /// Finite normality structure over the answers at `points`, all sharing
    /// one body of evidence.
    pub fn discretize(&self, points: &[F]) -> Result<NormalityStructure> {
        let typ: Vec<F> = points.iter().map(|&x| self.typicality(x)).collect::<Result<_>>()?;
        let dens: Vec<F> = points.iter().map(|&x| self.world_density(x)).collect();
        discretize_ranked(points, &dens, &typ, self.threshold)
    }
}

/// Builds a single-evidence structure from per-point rank keys and typicalities.
fn discretize_ranked<F: Real, K: PartialOrd>(points: &[F], rank: &[K], typ: &[F], t: F) -> Result<NormalityStructure> {
    let n = points.len();
    let states: Vec<State> = points.iter().map(|x| State::new(format!("{x:?}"))).collect();
    let frame = Frame::new(states, vec![Evidence::new("E", (0..n).map(StateId))])?;
    // typicality must be monotone in rank; smooth over quadrature noise
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| rank[a].partial_cmp(&rank[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut typ = typ.to_vec();
    let (mut i, mut running) = (0, F::zero());
    while i < n {
        let mut j = i;
        while j < n && rank[order[j]] == rank[order[i]] {
            running = running.max(typ[order[j]]);
            j += 1;
        }
        for &k in &order[i..j] {
            typ[k] = running;
        }
        i = j;
    }
    let mut ge = Relation::empty(n);
    let mut gg = Relation::empty(n);
    let cell = frame.cell(crate::normality::EvidenceId(0)).to_vec();
    for u in 0..n {
        for v in 0..n {
            if rank[u] >= rank[v] {
                ge.insert(cell[u].0, cell[v].0);
            }
            if typ[u] > F::zero() && typ[v] <= (F::one() - t) * typ[u] {
                gg.insert(cell[u].0, cell[v].0);
            }
        }
    }
    NormalityStructure::new(frame, ge, gg)
}

/// An answer carrying positive probability in a hybrid model.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom<F> {
    pub label: String,
    pub at: F,
    pub mass: F,
}

/// Which kind of answer sits at a coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HybridAnswer<F> {
    Atom(usize),
    Point(F),
}

/// Mixture of point masses and a density of total weight `density_weight`.
/// Any atom outranks any density-only answer; density-only answers are
/// ordered by density.
pub struct Hybrid<F, D> {
    atoms: Vec<Atom<F>>,
    density_weight: F,
    density: D,
    threshold: F,
}

impl<F: Real, D: Density<F>> Hybrid<F, D> {
    pub fn new(atoms: Vec<Atom<F>>, density_weight: F, density: D, threshold: F) -> Result<Self> {
        if !(threshold > F::zero()) || threshold > F::one() {
            return Err(Error::Threshold(format!("{threshold:?}")));
        }
        if atoms.iter().any(|a| !(a.mass > F::zero())) || density_weight < F::zero() {
            return Err(Error::Model("atom masses must be positive and the density weight non-negative".into()));
        }
        let total = atoms.iter().fold(density_weight, |s, a| s + a.mass);
        if (total - F::one()).abs() > F::c(1e-9) {
            return Err(Error::Model(format!("prior mass {total:?} ≠ 1")));
        }
        Ok(Hybrid { atoms, density_weight, density, threshold })
    }

    pub fn atoms(&self) -> &[Atom<F>] {
        &self.atoms
    }

    pub fn classify(&self, x: F) -> Result<HybridAnswer<F>> {
        if let Some(i) = self.atoms.iter().position(|a| a.at == x) {
            return Ok(HybridAnswer::Atom(i));
        }
        if self.density_weight > F::zero() && world_density(&self.density, x) > F::zero() {
            return Ok(HybridAnswer::Point(x));
        }
        Err(Error::Model(format!("answer at {x:?} has neither atom mass nor density")))
    }

    pub fn typicality(&self, a: HybridAnswer<F>) -> Result<F> {
        match a {
            HybridAnswer::Atom(i) => {
                let m = self.atoms[i].mass;
                Ok(self.atoms.iter().filter(|b| b.mass <= m).fold(self.density_weight, |s, b| s + b.mass))
            }
            HybridAnswer::Point(x) => {
                let c = world_density(&self.density, x);
                Ok(self.density_weight * (F::one() - denser_mass(&self.density, c)?).max(F::zero()))
            }
        }
    }

    pub fn at_least_as_normal(&self, a: HybridAnswer<F>, b: HybridAnswer<F>) -> bool {
        match (a, b) {
            (HybridAnswer::Atom(i), HybridAnswer::Atom(j)) => self.atoms[i].mass >= self.atoms[j].mass,
            (HybridAnswer::Atom(_), HybridAnswer::Point(_)) => true,
            (HybridAnswer::Point(_), HybridAnswer::Atom(_)) => false,
            (HybridAnswer::Point(x), HybridAnswer::Point(y)) => {
                world_density(&self.density, x) >= world_density(&self.density, y)
            }
        }
    }

    /// Labels of the believed atoms.
    pub fn believed_atoms(&self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for (i, a) in self.atoms.iter().enumerate() {
            if self.typicality(HybridAnswer::Atom(i))? > F::one() - self.threshold {
                out.push(a.label.clone());
            }
        }
        Ok(out)
    }

    /// Believed density-only answers, as a region of the (normalised)
    /// density; `None` when no such answer is believed.
    pub fn density_region(&self) -> Result<Option<BeliefRegion<F>>> {
        if self.density_weight <= F::zero() {
            return Ok(None);
        }
        let inner = F::one() - (F::one() - self.threshold) / self.density_weight;
        if inner <= F::zero() {
            return Ok(None);
        }
        belief_region(&self.density, inner).map(Some)
    }

    /// Total probability of everything believed.
    pub fn believed_mass(&self) -> Result<F> {
        let believed = self.believed_atoms()?;
        let atoms = self
            .atoms
            .iter()
            .filter(|a| believed.contains(&a.label))
            .fold(F::zero(), |s, a| s + a.mass);
        Ok(atoms + self.density_region()?.map_or(F::zero(), |r| r.mass * self.density_weight))
    }

    pub fn discretize(&self, points: &[F]) -> Result<NormalityStructure> {
        let answers: Vec<HybridAnswer<F>> = points.iter().map(|&x| self.classify(x)).collect::<Result<_>>()?;
        let typ: Vec<F> = answers.iter().map(|&a| self.typicality(a)).collect::<Result<_>>()?;
        // atoms rank above every density, by mass; points by density
        let rank: Vec<(u8, F)> = answers
            .iter()
            .map(|a| match *a {
                HybridAnswer::Atom(i) => (1, self.atoms[i].mass),
                HybridAnswer::Point(x) => (0, world_density(&self.density, x)),
            })
            .collect();
        discretize_ranked(points, &rank, &typ, self.threshold)
    }
}

/// Samples the density on `n` evenly spaced points of `[lo, hi]` as CSV.
pub fn density_csv<F: Real, D: Density<F> + ?Sized>(
    d: &D,
    region: Option<&BeliefRegion<F>>,
    lo: F,
    hi: F,
    n: usize,
) -> String {
    let mut out = String::from("m,density,in_belief_region\n");
    let n = n.max(2);
    for i in 0..n {
        let x = lo + (hi - lo) * F::c(i as f64 / (n - 1) as f64);
        let inside = region.is_some_and(|r| r.contains(x));
        let _ = writeln!(
            out,
            "{},{},{}",
            x.to_f64().unwrap_or(f64::NAN),
            world_density(d, x).to_f64().unwrap_or(f64::NAN),
            inside
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_mass_and_peak() {
        let g = Gaussian::new(3.0f64, 2.0).unwrap();
        assert!((g.pdf(3.0) - 1.0 / (2.0 * (2.0 * std::f64::consts::PI).sqrt())).abs() < 1e-15);
        assert!((validate(&g, 1e-9).unwrap() - 1.0).abs() < 1e-12);
        let r = belief_region(&g, 0.6826894921370859).unwrap();
        let (a, b) = r.bounds().unwrap();
        assert!((a - 1.0).abs() < 1e-6 && (b - 5.0).abs() < 1e-6);
    }

    #[test]
    fn uniform_believes_everything() {
        let u = Uniform::new(0.0, 2.0).unwrap();
        let dn = DensityNormality::new(u, 0.9).unwrap();
        assert!(dn.doxastically_possible(0.1).unwrap());
        assert!(dn.doxastically_possible(1.9).unwrap());
        let s = dn.discretize(&[0.0, 0.5, 1.0, 2.0]).unwrap();
        assert_eq!(s.doxastic(crate::normality::WorldId(0)).unwrap().worlds.len(), 4);
    }

    #[test]
    fn grid_path_finds_two_humps() {
        let bimodal = FnDensity::new(
            |x: f64| {
                let g = |m: f64| (-(x - m) * (x - m) / 0.02).exp() / (0.02 * std::f64::consts::PI).sqrt();
                0.5 * g(-1.0) + 0.5 * g(1.0)
            },
            (-3.0, 3.0),
        );
        let r = belief_region(&bimodal, 0.9).unwrap();
        assert_eq!(r.intervals.len(), 2);
        assert!(r.mass >= 0.9);
        assert!(r.contains(-1.0) && r.contains(1.0) && !r.contains(0.0));
    }

    #[test]
    fn unbounded_density_without_mode_is_rejected() {
        let f = FnDensity::new(|x: f64| (-x).exp(), (0.0, f64::INFINITY));
        assert!(matches!(belief_region(&f, 0.5), Err(Error::Numeric(_))));
    }

    #[test]
    fn wrapped_normal_integrates_to_one() {
        let w = WrappedNormal::new(1.0f64, 2.0).unwrap();
        assert!((validate(&w, 1e-9).unwrap() - 1.0).abs() < 1e-9);
        let q = integrate(|x| w.pdf(x), w.support().0, w.support().1, 1e-12).unwrap();
        assert!((q - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hybrid_rejects_bare_points() {
        let h = Hybrid::new(
            vec![Atom { label: "zero".into(), at: 0.0, mass: 1.0 }],
            0.0,
            Gaussian::new(0.0, 1.0).unwrap(),
            0.5,
        )
        .unwrap();
        assert!(matches!(h.classify(0.3), Err(Error::Model(_))));
    }

    #[test]
    fn csv_has_header_and_flags() {
        let g = Gaussian::new(0.0, 1.0).unwrap();
        let r = belief_region(&g, 0.5).unwrap();
        let csv = density_csv(&g, Some(&r), -3.0, 3.0, 7);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "m,density,in_belief_region");
        assert_eq!(lines.len(), 8);
        assert!(lines[4].ends_with("true") && lines[1].ends_with("false"));
    }
}
